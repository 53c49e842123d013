//! Truncated expansions of the Borcherds products Psi_m and Phi_1 as Fourier
//! series on the lattice (1/D) d^{-1}, graded by the sum of alpha-coordinates.
//!
//! Exponents follow X^nu = e(-(nu, z)) with (nu, z) = -p (nu z2 + conj(nu) z1).

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{binomial_signed, factorize, is_square, isqrt, legendre, q_int, Q};
use crate::error::{domain, Error, Result};
use crate::plusforms::PlusForm;
use crate::qfield::{fundamental_unit, QuadElem};
use crate::rootsys::{bilinear_form, real_roots, Reflection, RootDatum, RootF};

/// nu = (u + v (1 + sqrt p)/2) / (d sqrt p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeIndex {
    pub u: i64,
    pub v: i64,
    pub d: i64,
}

impl LatticeIndex {
    pub fn new(u: i64, v: i64, d: i64) -> Self {
        LatticeIndex { u, v, d }
    }

    /// xi = nu sqrt(p) = (u + v omega)/d.
    pub fn xi(&self, p: u64) -> QuadElem {
        let d = BigInt::from(self.d);
        let c0 = Q::new(BigInt::from(2 * self.u + self.v), &d * 2);
        let c1 = Q::new(BigInt::from(self.v), &d * 2);
        QuadElem::new(p, c0, c1)
    }

    pub fn root(&self, p: u64) -> RootF {
        RootF::from_xi(self.xi(p))
    }

    /// Inverse of [`LatticeIndex::xi`]; `None` if xi is not in (1/d) O.
    pub fn from_xi(xi: &QuadElem, d: i64) -> Option<Self> {
        let dq = q_int(d);
        let v = xi.c1() * q_int(2) * &dq;
        let u = (xi.c0() - xi.c1()) * &dq;
        if !v.is_integer() || !u.is_integer() {
            return None;
        }
        Some(LatticeIndex { u: u.to_integer().to_i64()?, v: v.to_integer().to_i64()?, d })
    }

    /// lambda = (tr(nu) + tr(nu conj eta_1))/s, the sum of alpha-coordinates.
    pub fn lambda(&self, datum: &RootDatum) -> Q {
        datum.height(&self.root(datum.p()))
    }
}

/// Which Borcherds lift to expand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// Some prime q with (q/p) = -1 divides m to an odd power; no Weyl vector.
    NonRep,
    /// m = m0^2 with no prime factor of m0 split in F.
    Square,
}

#[derive(Clone, Debug)]
pub struct FourierSeries2 {
    p: u64,
    m: u64,
    datum: RootDatum,
    d: i64,
    h: i64,
    offset: LatticeIndex,
    terms: BTreeMap<LatticeIndex, Q>,
}

impl FourierSeries2 {
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Index m of the lifted form.
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn datum(&self) -> &RootDatum {
        &self.datum
    }

    pub fn denominator(&self) -> i64 {
        self.d
    }

    pub fn height(&self) -> i64 {
        self.h
    }

    pub fn offset(&self) -> LatticeIndex {
        self.offset
    }

    pub fn terms(&self) -> &BTreeMap<LatticeIndex, Q> {
        &self.terms
    }

    /// b_mu, zero when absent.
    pub fn coeff(&self, mu: &LatticeIndex) -> Q {
        self.terms.get(mu).cloned().unwrap_or_else(Q::zero)
    }

    pub fn set_coeff(&mut self, mu: LatticeIndex, c: Q) {
        if c.is_zero() {
            self.terms.remove(&mu);
        } else {
            self.terms.insert(mu, c);
        }
    }

    /// lambda(mu - offset).
    pub fn grade(&self, mu: &LatticeIndex) -> Q {
        let x = mu.root(self.p).sub(&self.offset.root(self.p));
        self.datum.height(&x)
    }

    /// The index of an element given by its xi, if it lies on this series' lattice.
    pub fn index_of(&self, x: &RootF) -> Option<LatticeIndex> {
        LatticeIndex::from_xi(x.xi(), self.d)
    }

    /// True if mu - offset lies in the grid spanned by the expansion with grade <= H.
    pub fn in_region(&self, mu: &LatticeIndex) -> bool {
        let x = mu.root(self.p).sub(&self.offset.root(self.p));
        let (c1, c2) = self.datum.alpha_coords(&x);
        !c1.is_negative() && !c2.is_negative() && c1 + c2 <= q_int(self.h)
    }

    /// Every index offset + nu with nu in d^{-1}, both alpha-coordinates >= 0 and grade <= H.
    pub fn region(&self) -> Vec<LatticeIndex> {
        let s = self.datum.s().to_i64().unwrap_or(i64::MAX);
        let off = self.offset.root(self.p);
        let mut out = Vec::new();
        let top = s * self.h;
        for k1 in 0..=top {
            for k2 in 0..=(top - k1) {
                let nu = self.datum.from_alpha(&Q::new(k1.into(), s.into()), &Q::new(k2.into(), s.into()));
                if LatticeIndex::from_xi(nu.xi(), 1).is_none() {
                    continue;
                }
                if let Some(idx) = self.index_of(&off.add(&nu)) {
                    out.push(idx);
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| format!("[{}, {}, {}, {}]", k.u, k.v, c.numer(), c.denom()))
            .collect();
        format!(
            "{{\"p\": {}, \"m\": {}, \"D\": {}, \"H\": {}, \"offset\": [{}, {}], \"terms\": [\n{}\n]}}\n",
            self.p,
            self.m,
            self.d,
            self.h,
            self.offset.u,
            self.offset.v,
            rows.join(",\n")
        )
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["u", "v", "lambda", "numerator", "denominator"])?;
        for (k, c) in &self.terms {
            w.write_record([
                k.u.to_string(),
                k.v.to_string(),
                self.grade(k).to_string(),
                c.numer().to_string(),
                c.denom().to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
    }

    /// Reads the JSON written by [`FourierSeries2::to_json`].
    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        let int = |key: &str| -> Result<i64> {
            v.get(key)
                .and_then(|x| x.as_i64())
                .ok_or_else(|| Error::Fixture(format!("missing integer field {key:?}")))
        };
        let p = int("p")? as u64;
        let m = v.get("m").and_then(|x| x.as_u64()).unwrap_or(1);
        let d = int("D")?;
        let h = int("H")?;
        if d < 1 || h < 0 {
            return Err(Error::Fixture("D must be positive and H non-negative".into()));
        }
        let off = v
            .get("offset")
            .and_then(|x| x.as_array())
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::Fixture("offset must be [u, v]".into()))?;
        let get = |x: &serde_json::Value| x.as_i64().ok_or_else(|| Error::Fixture("non-integer index".into()));
        let offset = LatticeIndex::new(get(&off[0])?, get(&off[1])?, d);
        let mut terms = BTreeMap::new();
        for row in v.get("terms").and_then(|x| x.as_array()).ok_or_else(|| Error::Fixture("missing terms".into()))? {
            let r = row.as_array().filter(|r| r.len() == 4).ok_or_else(|| Error::Fixture("term must be [u, v, num, den]".into()))?;
            let big = |x: &serde_json::Value| -> Result<BigInt> {
                x.to_string().trim_matches('"').parse().map_err(|_| Error::Fixture(format!("bad integer {x}")))
            };
            let den = big(&r[3])?;
            if den.is_zero() {
                return Err(Error::Fixture("zero denominator".into()));
            }
            let c = Q::new(big(&r[2])?, den);
            if !c.is_zero() {
                terms.insert(LatticeIndex::new(get(&r[0])?, get(&r[1])?, d), c);
            }
        }
        let datum = RootDatum::new(p, 1)?;
        Ok(FourierSeries2 { p, m, datum, d, h, offset, terms })
    }
}

/// rho_W = m eps0 / (tr(eps0) sqrt p), returned as an element of F.
pub fn weyl_vector(p: u64, m: u64) -> Result<QuadElem> {
    if m == 0 {
        return domain("weyl_vector needs m >= 1");
    }
    if !all_nonsplit(p, m) {
        return domain(format!("a prime factor of {m} splits in Q(sqrt {p})"));
    }
    Ok(weyl_root(p, m)?.value())
}

fn weyl_root(p: u64, m: u64) -> Result<RootF> {
    let e = fundamental_unit(p)?;
    let t = e.trace();
    Ok(RootF::from_xi(e.scale(&(q_int(m as i64) / t))))
}

fn all_nonsplit(p: u64, m: u64) -> bool {
    factorize(m).iter().all(|&(q, _)| legendre(q as i64, p) != 1)
}

fn has_inert_odd(p: u64, m: u64) -> bool {
    factorize(m).iter().any(|&(q, e)| e % 2 == 1 && legendre(q as i64, p) == -1)
}

fn check_prime(p: u64) -> Result<()> {
    if p % 4 != 1 || !crate::arith::is_prime(p) {
        return domain(format!("Borcherds expansions need a prime p = 1 mod 4, got {p}"));
    }
    Ok(())
}

/// Exponent of the factor (1 - X^nu): s(n) a(n) with n = p N(nu) for nu >> 0, 1 for positive real roots.
pub fn mult_exponent(p: u64, f1: &PlusForm, nu: &LatticeIndex) -> Result<BigInt> {
    check_prime(p)?;
    if nu.d != 1 {
        return domain("mult_exponent needs an index of d^{-1} (D = 1)");
    }
    let x = nu.root(p);
    if x.value().is_totally_positive() {
        let n = -x.xi().norm();
        if !n.is_integer() || !n.is_positive() {
            return Err(Error::Internal(format!("p N(nu) = {n} is not a positive integer")));
        }
        let n = n.to_integer().to_i64().ok_or_else(|| Error::ResourceBound("norm too large".into()))?;
        let c = f1
            .weighted_coeff(n)
            .ok_or(Error::InsufficientPrecision { required: n, available: f1.order() })?;
        if !c.is_integer() {
            return Err(Error::Invariant(format!("s(n) a(n) = {c} is not an integer at n = {n}")));
        }
        return Ok(c.to_integer());
    }
    let datum = RootDatum::new(p, 1)?;
    let norm = bilinear_form(&x, &x);
    if norm == q_int(2) && crate::rootsys::is_root(&datum, &x) {
        let (c1, c2) = datum.alpha_coords(&x);
        if !c1.is_negative() && !c2.is_negative() {
            return Ok(BigInt::one());
        }
    }
    domain(format!("nu = {x} is neither totally positive nor a positive real root"))
}

/// A factor (1 - X^nu)^e, with nu given by integer key (s c1, s c2).
#[derive(Clone, Debug)]
pub struct Factor {
    pub key: (i64, i64),
    pub nu: RootF,
    pub exponent: BigInt,
}

/// Everything needed to expand or evaluate a truncated product.
#[derive(Clone, Debug)]
pub struct ProductData {
    pub p: u64,
    pub m: u64,
    pub datum: RootDatum,
    pub offset: RootF,
    pub h: i64,
    pub factors: Vec<Factor>,
}

/// The factors of Psi_m with grade <= H, in ascending grade.
pub fn product_data(p: u64, fm: &PlusForm, variant: Variant, h: i64) -> Result<ProductData> {
    check_prime(p)?;
    if fm.p() != p {
        return domain(format!("form has level {}, expected {p}", fm.p()));
    }
    if h < 1 {
        return domain("height must be at least 1");
    }
    let m = fm.m();
    let datum = RootDatum::new(p, 1)?;
    let (offset, m0) = match variant {
        Variant::NonRep => {
            if !has_inert_odd(p, m) {
                return domain(format!("m = {m} has no inert prime to an odd power for p = {p}"));
            }
            (RootF::from_xi(QuadElem::zero(p)), 0)
        }
        Variant::Square => {
            let m0 = is_square(&BigInt::from(m))
                .and_then(|r| r.to_u64())
                .ok_or_else(|| Error::Domain(format!("m = {m} is not a square")))?;
            if !all_nonsplit(p, m0) {
                return domain(format!("a prime factor of {m0} splits in Q(sqrt {p})"));
            }
            (weyl_root(p, m0)?, m0)
        }
    };
    let s = datum.s().to_i64().ok_or_else(|| Error::ResourceBound("s exceeds i64".into()))?;
    let a = datum.a_i64()?;
    let top = s.checked_mul(h).ok_or_else(|| Error::ResourceBound("height overflow".into()))?;
    let mut factors = Vec::new();
    let mut required = 0i64;
    // totally positive nu in d^{-1}: xi = (X + Y sqrt p)/2, |X| < Y sqrt p
    for y in 1..=top {
        let bound = isqrt(&(BigInt::from(p) * y * y)).to_i64().unwrap();
        for x in -bound..=bound {
            if (x - y).rem_euclid(2) != 0 || x * x >= (p as i64) * y * y {
                continue;
            }
            let k2 = (y * a - x * s) / 2;
            if k2 < 1 || y + k2 > top {
                continue;
            }
            let n = ((p as i64) * y * y - x * x) / 4;
            required = required.max(n);
            let xi = QuadElem::new(p, Q::new(x.into(), 2.into()), Q::new(y.into(), 2.into()));
            factors.push((y, k2, RootF::from_xi(xi), Some(n)));
        }
    }
    if required > fm.order() {
        return Err(Error::InsufficientPrecision { required, available: fm.order() });
    }
    if m0 > 0 {
        let scale = q_int(m0 as i64);
        let mut j_max = 1;
        loop {
            let roots = real_roots(&datum, j_max)?;
            let too_high = roots.iter().filter(|r| r.j == j_max).all(|r| datum.height(&r.root) * &scale > q_int(h));
            if too_high {
                for r in roots {
                    let nu = r.root.scale(&scale);
                    let (c1, c2) = datum.alpha_coords(&nu);
                    if &c1 + &c2 <= q_int(h) {
                        let k1 = (c1 * q_int(s)).to_integer().to_i64().unwrap();
                        let k2 = (c2 * q_int(s)).to_integer().to_i64().unwrap();
                        factors.push((k1, k2, nu, None));
                    }
                }
                break;
            }
            j_max += 1;
        }
    }
    let mut out = Vec::with_capacity(factors.len());
    for (k1, k2, nu, n) in factors {
        let exponent = match n {
            None => BigInt::one(),
            Some(n) => {
                let c = fm.weighted_coeff(n).unwrap();
                if !c.is_integer() {
                    return Err(Error::Invariant(format!("s(n) a(n) = {c} is not an integer at n = {n}")));
                }
                c.to_integer()
            }
        };
        if !exponent.is_zero() {
            out.push(Factor { key: (k1, k2), nu, exponent });
        }
    }
    out.sort_by_key(|f| (f.key.0 + f.key.1, f.key));
    Ok(ProductData { p, m, datum, offset, h, factors: out })
}

/// Multiplies out the truncated product of Psi_m.
pub fn expand_psi_m(p: u64, fm: &PlusForm, variant: Variant, h: i64) -> Result<FourierSeries2> {
    let data = product_data(p, fm, variant, h)?;
    expand_product(&data)
}

/// Phi_1 = Psi_1: Weyl vector rho, real-root factors and the totally positive factors.
pub fn expand_phi1(p: u64, f1: &PlusForm, h: i64) -> Result<FourierSeries2> {
    if f1.m() != 1 {
        return domain(format!("expand_phi1 needs f_1, got f_{}", f1.m()));
    }
    expand_psi_m(p, f1, Variant::Square, h)
}

pub fn expand_product(data: &ProductData) -> Result<FourierSeries2> {
    let p = data.p;
    let s = data.datum.s().to_i64().unwrap();
    let top = (s * data.h) as usize;
    let w = top + 1;
    let mut grid: Vec<BigInt> = vec![BigInt::zero(); w * w];
    grid[0] = BigInt::one();
    let mut reach = 0usize;
    for f in &data.factors {
        let (k1, k2) = (f.key.0 as usize, f.key.1 as usize);
        let step = k1 + k2;
        let t_max = top / step;
        let coeffs: Vec<BigInt> = (0..=t_max as u32)
            .map(|t| {
                let c = binomial_signed(&f.exponent, t);
                if t % 2 == 1 {
                    -c
                } else {
                    c
                }
            })
            .collect();
        reach = (reach + step * t_max).min(top);
        for deg in (step..=reach).rev() {
            for i in 0..=deg {
                let j = deg - i;
                let mut acc = BigInt::zero();
                for (t, c) in coeffs.iter().enumerate().skip(1) {
                    if c.is_zero() {
                        continue;
                    }
                    let (di, dj) = (t * k1, t * k2);
                    if di > i || dj > j {
                        break;
                    }
                    let old = &grid[(i - di) * w + (j - dj)];
                    if !old.is_zero() {
                        acc += old * c;
                    }
                }
                if !acc.is_zero() {
                    grid[i * w + j] += acc;
                }
            }
        }
    }
    let d = offset_denominator(&data.offset)?;
    let offset = LatticeIndex::from_xi(data.offset.xi(), d).ok_or_else(|| Error::Internal("offset off lattice".into()))?;
    let sq = q_int(s);
    let mut terms = BTreeMap::new();
    for i in 0..=top {
        for j in 0..=(top - i) {
            let c = &grid[i * w + j];
            if c.is_zero() {
                continue;
            }
            let nu = data.datum.from_alpha(&(q_int(i as i64) / &sq), &(q_int(j as i64) / &sq));
            let mu = data.offset.add(&nu);
            let idx = LatticeIndex::from_xi(mu.xi(), d)
                .ok_or_else(|| Error::Internal(format!("coefficient off the lattice at ({i}, {j})")))?;
            terms.insert(idx, Q::from_integer(c.clone()));
        }
    }
    Ok(FourierSeries2 { p, m: data.m, datum: data.datum.clone(), d, h: data.h, offset, terms })
}

fn offset_denominator(x: &RootF) -> Result<i64> {
    let xi = x.xi();
    let v = xi.c1() * q_int(2);
    let u = xi.c0() - xi.c1();
    let d = v.denom().lcm(u.denom());
    d.to_i64().ok_or_else(|| Error::ResourceBound("index denominator too large".into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub mu: LatticeIndex,
    pub reflection: Reflection,
    pub image: LatticeIndex,
    pub b_mu: Q,
    pub b_image: Q,
}

#[derive(Clone, Debug, Default)]
pub struct AntisymmetryReport {
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl AntisymmetryReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks b_{w mu} = det(w) b_mu for the simple reflections wherever w mu stays in range.
pub fn check_antisymmetry(series: &FourierSeries2) -> AntisymmetryReport {
    let mut rep = AntisymmetryReport::default();
    let h = q_int(series.h);
    for (mu, b) in &series.terms {
        let x = mu.root(series.p);
        for r in [Reflection::R1, Reflection::R2] {
            let y = series.datum.reflect(r, &x);
            let image = match series.index_of(&y) {
                Some(i) => i,
                None => {
                    rep.violations.push(Violation {
                        mu: *mu,
                        reflection: r,
                        image: *mu,
                        b_mu: b.clone(),
                        b_image: Q::zero(),
                    });
                    continue;
                }
            };
            if series.grade(&image) > h {
                continue;
            }
            rep.checked += 1;
            let bi = series.coeff(&image);
            if bi != -b.clone() {
                rep.violations.push(Violation { mu: *mu, reflection: r, image, b_mu: b.clone(), b_image: bi });
            }
        }
    }
    rep
}

/// Indices with a nonzero coefficient that are not totally positive.
pub fn support_violations(series: &FourierSeries2) -> Vec<LatticeIndex> {
    series
        .terms
        .keys()
        .filter(|mu| {
            let v = mu.root(series.p).value();
            !(v.is_totally_positive() && v.norm().is_positive())
        })
        .copied()
        .collect()
}

/// Sum-side data of a denominator identity.
#[derive(Clone, Debug, Default)]
pub struct SumSide {
    /// m(nu) = -b_{rho + nu} for rho + nu in the fundamental chamber, nu != 0, keyed by nu (D = 1).
    pub multiplicities: BTreeMap<LatticeIndex, Q>,
    /// Nonzero coefficients whose orbit was traced back to rho or rho + nu.
    pub covered: usize,
}

/// Reduces mu into the fundamental chamber {(x, alpha_i) <= 0}; returns the chamber point and det(w).
pub fn reduce_to_chamber(datum: &RootDatum, mu: &RootF) -> Result<(RootF, i32)> {
    if !mu.value().is_totally_positive() {
        return domain(format!("{mu} is not totally positive"));
    }
    let (a1, a2) = (datum.alpha1(), datum.alpha2());
    let mut x = mu.clone();
    let mut det = 1;
    loop {
        if bilinear_form(&x, &a1).is_positive() {
            x = datum.reflect(Reflection::R1, &x);
        } else if bilinear_form(&x, &a2).is_positive() {
            x = datum.reflect(Reflection::R2, &x);
        } else {
            return Ok((x, det));
        }
        det = -det;
    }
}

/// Reads off m(nu) and checks that every nonzero b_mu sits in the W-orbit of rho or of rho + nu
/// with nu in M and in the fundamental chamber, with b_mu = det(w) b of the chamber point.
pub fn extract_sum_side(series: &FourierSeries2) -> Result<SumSide> {
    let p = series.p;
    let datum = &series.datum;
    let rho = series.offset.root(p);
    let h = q_int(series.h);
    let mut out = SumSide::default();
    for mu in series.region() {
        let x = mu.root(p);
        let nu = x.sub(&rho);
        if nu.xi().is_zero() || series.grade(&mu) > h {
            continue;
        }
        if bilinear_form(&x, &datum.alpha1()) <= Q::zero()
            && bilinear_form(&x, &datum.alpha2()) <= Q::zero()
            && nu.value().is_totally_positive()
        {
            let key = LatticeIndex::from_xi(nu.xi(), 1)
                .ok_or_else(|| Error::Invariant(format!("nu = {nu} is not in d^-1")))?;
            out.multiplicities.insert(key, -series.coeff(&mu));
        }
    }
    for (mu, b) in &series.terms {
        let x = mu.root(p);
        let (x0, det) = reduce_to_chamber(datum, &x)
            .map_err(|_| Error::Invariant(format!("coefficient {b} at {mu:?} lies outside the positive cone")))?;
        let nu = x0.sub(&rho);
        let idx0 = series
            .index_of(&x0)
            .ok_or_else(|| Error::Invariant(format!("orbit of {mu:?} leaves the lattice")))?;
        let b0 = series.coeff(&idx0);
        if *b != b0.clone() * q_int(det as i64) {
            return Err(Error::Invariant(format!(
                "b at {mu:?} is {b}, but its chamber representative {idx0:?} carries {b0} with det {det}"
            )));
        }
        if nu.xi().is_zero() {
            out.covered += 1;
            continue;
        }
        let on_wall = bilinear_form(&x0, &datum.alpha1()).is_zero() || bilinear_form(&x0, &datum.alpha2()).is_zero();
        let in_lattice = LatticeIndex::from_xi(nu.xi(), 1).is_some();
        let chamber = bilinear_form(&nu, &datum.alpha1()) <= Q::zero()
            && bilinear_form(&nu, &datum.alpha2()) <= Q::zero()
            && nu.value().is_totally_positive();
        if on_wall || !in_lattice || !chamber {
            return Err(Error::Invariant(format!(
                "coefficient {b} at {mu:?} reduces to {idx0:?}, which is not rho + nu with nu in M and the chamber"
            )));
        }
        out.covered += 1;
    }
    Ok(out)
}

/// Summary of the structural checks on an expansion.
#[derive(Clone, Debug)]
pub struct DenominatorReport {
    pub terms: usize,
    pub antisymmetry: AntisymmetryReport,
    pub support_violations: Vec<LatticeIndex>,
    pub coverage: std::result::Result<SumSide, String>,
}

impl DenominatorReport {
    pub fn is_clean(&self) -> bool {
        self.antisymmetry.is_clean() && self.support_violations.is_empty() && self.coverage.is_ok()
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "terms: {}\nantisymmetry: {} pairs checked, {} violations\nsupport violations: {}\n",
            self.terms,
            self.antisymmetry.checked,
            self.antisymmetry.violations.len(),
            self.support_violations.len()
        );
        for v in self.antisymmetry.violations.iter().take(20) {
            s.push_str(&format!(
                "  b{:?} = {} but b{:?} = {} under {:?}\n",
                v.mu, v.b_mu, v.image, v.b_image, v.reflection
            ));
        }
        match &self.coverage {
            Ok(side) => {
                let nonzero = side.multiplicities.values().filter(|c| !c.is_zero()).count();
                s.push_str(&format!(
                    "orbit coverage: {} coefficients covered, {} chamber points, {} nonzero m(nu)\n",
                    side.covered,
                    side.multiplicities.len(),
                    nonzero
                ));
            }
            Err(e) => s.push_str(&format!("orbit coverage: FAILED ({e})\n")),
        }
        s.push_str(if self.is_clean() { "status: ok\n" } else { "status: FAILED\n" });
        s
    }
}

pub fn check_denominator(series: &FourierSeries2) -> DenominatorReport {
    DenominatorReport {
        terms: series.terms.len(),
        antisymmetry: check_antisymmetry(series),
        support_violations: support_violations(series),
        coverage: extract_sum_side(series).map_err(|e| e.to_string()),
    }
}

fn check_point(p: u64, m: u64, z1: Complex64, z2: Complex64) -> Result<()> {
    let need = 2.0 * m as f64 / p as f64;
    if z1.im <= 0.0 || z2.im <= 0.0 || z1.im * z2.im < need {
        return domain(format!(
            "(z1, z2) = ({z1}, {z2}) is outside Im z1 Im z2 >= {need:.6} (twice the convergence bound)"
        ));
    }
    Ok(())
}

/// 2 pi i p (nu z2 + conj(nu) z1), the logarithm of X^nu.
fn log_monomial(p: u64, x: &RootF, z1: Complex64, z2: Complex64) -> Complex64 {
    let v = x.value();
    let nu = v.to_f64();
    let nub = v.conj().to_f64();
    Complex64::new(0.0, 2.0 * PI * p as f64) * (z2 * nu + z1 * nub)
}

/// The truncated product X^offset prod (1 - X^nu)^e evaluated in floating point.
pub fn evaluate_product(data: &ProductData, z1: Complex64, z2: Complex64) -> Result<Complex64> {
    check_point(data.p, data.m.max(1), z1, z2)?;
    let mut log = log_monomial(data.p, &data.offset, z1, z2);
    for f in &data.factors {
        let x = log_monomial(data.p, &f.nu, z1, z2).exp();
        let e = f.exponent.to_f64().ok_or_else(|| Error::ResourceBound("exponent exceeds f64".into()))?;
        log += (Complex64::new(1.0, 0.0) - x).ln() * e;
    }
    Ok(log.exp())
}

/// sum b_mu X^mu over the stored terms.
pub fn evaluate_series(series: &FourierSeries2, z1: Complex64, z2: Complex64) -> Result<Complex64> {
    check_point(series.p, series.m.max(1), z1, z2)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (mu, b) in &series.terms {
        let c = b.to_f64().ok_or_else(|| Error::ResourceBound("coefficient exceeds f64".into()))?;
        acc += log_monomial(series.p, &mu.root(series.p), z1, z2).exp() * c;
    }
    Ok(acc)
}

/// Which side of the identity to evaluate.
#[derive(Clone, Copy, Debug)]
pub enum EvalSource<'a> {
    Product(&'a ProductData),
    Series(&'a FourierSeries2),
}

pub fn evaluate_at_point(source: EvalSource<'_>, z1: Complex64, z2: Complex64) -> Result<Complex64> {
    match source {
        EvalSource::Product(d) => evaluate_product(d, z1, z2),
        EvalSource::Series(s) => evaluate_series(s, z1, z2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plusforms::{build_f1, build_fm};
    use std::sync::OnceLock;

    fn f1_5() -> &'static PlusForm {
        static F: OnceLock<PlusForm> = OnceLock::new();
        F.get_or_init(|| build_f1(5, 120).unwrap())
    }

    fn phi5_10() -> &'static FourierSeries2 {
        static S: OnceLock<FourierSeries2> = OnceLock::new();
        S.get_or_init(|| expand_phi1(5, f1_5(), 10).unwrap())
    }

    #[test]
    fn weyl_vectors() {
        let e5 = fundamental_unit(5).unwrap();
        assert_eq!(weyl_vector(5, 1).unwrap(), RootF::from_xi(e5).value());
        let e13 = fundamental_unit(13).unwrap();
        assert_eq!(weyl_vector(13, 1).unwrap(), RootF::from_xi(e13.scale(&crate::arith::q_frac(1, 3))).value());
        let d = RootDatum::new(5, 1).unwrap();
        assert_eq!(d.alpha_coords(&weyl_root(5, 1).unwrap()), (q_int(1), q_int(1)));
        let d = RootDatum::new(13, 1).unwrap();
        let q9 = crate::arith::q_frac(1, 9);
        assert_eq!(d.alpha_coords(&weyl_root(13, 1).unwrap()), (q9.clone(), q9));
        assert!(weyl_vector(17, 2).is_err());
        assert!(weyl_vector(17, 3).is_ok());
    }

    #[test]
    fn lattice_index_roundtrip() {
        for (p, xi) in [(5u64, QuadElem::from_frac(5, 3, 1, 2)), (13, QuadElem::from_frac(13, 7, -3, 6))] {
            let idx = LatticeIndex::from_xi(&xi, 3).unwrap();
            assert_eq!(idx.xi(p), xi);
        }
        assert!(LatticeIndex::from_xi(&QuadElem::from_frac(5, 1, 0, 2), 1).is_none());
        let d = RootDatum::new(5, 1).unwrap();
        let rho = LatticeIndex::from_xi(weyl_root(5, 1).unwrap().xi(), 1).unwrap();
        assert_eq!(rho, LatticeIndex::new(0, 1, 1));
        assert_eq!(rho.lambda(&d), q_int(2));
    }

    #[test]
    fn exponents() {
        let f = f1_5();
        let d = RootDatum::new(5, 1).unwrap();
        let nu = LatticeIndex::from_xi(d.from_alpha_ints(1, 1).xi(), 1).unwrap();
        assert_eq!(mult_exponent(5, f, &nu).unwrap(), BigInt::from(11));
        let nu2 = LatticeIndex::from_xi(d.from_alpha_ints(2, 2).xi(), 1).unwrap();
        assert_eq!(mult_exponent(5, f, &nu2).unwrap(), BigInt::from(-54));
        let a1 = LatticeIndex::from_xi(d.alpha1().xi(), 1).unwrap();
        assert_eq!(mult_exponent(5, f, &a1).unwrap(), BigInt::one());
        let neg = LatticeIndex::from_xi(d.alpha1().neg().xi(), 1).unwrap();
        assert!(matches!(mult_exponent(5, f, &neg), Err(Error::Domain(_))));
    }

    #[test]
    fn leading_terms() {
        let s = phi5_10();
        let d = s.datum().clone();
        let rho = weyl_root(5, 1).unwrap();
        let idx = |x: &RootF| s.index_of(x).unwrap();
        assert_eq!(s.coeff(&s.offset()), q_int(1));
        assert_eq!(s.coeff(&idx(&rho.add(&d.alpha1()))), q_int(-1));
        assert_eq!(s.coeff(&idx(&d.reflect(Reflection::R2, &rho))), q_int(-1));
        assert!(support_violations(s).is_empty());
    }

    #[test]
    fn antisymmetry_and_coverage_p5() {
        let s = phi5_10();
        let rep = check_antisymmetry(s);
        assert!(rep.is_clean(), "{:?}", rep.violations.first());
        assert!(rep.checked > 0);
        let side = extract_sum_side(s).unwrap();
        assert!(side.multiplicities.values().all(|c| c.is_integer()));
        assert!(side.multiplicities.values().any(|c| !c.is_zero()));
        assert_eq!(side.covered, s.terms().len());
    }

    #[test]
    fn walls_carry_zero() {
        let s = phi5_10();
        let d = s.datum();
        let mut walls = 0;
        for mu in s.region() {
            let x = mu.root(5);
            for r in [Reflection::R1, Reflection::R2] {
                if d.reflect(r, &x) == x {
                    walls += 1;
                    assert!(s.coeff(&mu).is_zero(), "{mu:?}");
                }
            }
        }
        assert!(walls > 0);
    }

    #[test]
    fn perturbation_is_localised() {
        let mut s = phi5_10().clone();
        let d = s.datum().clone();
        let target = s.index_of(&weyl_root(5, 1).unwrap().add(&d.from_alpha_ints(2, 3))).unwrap();
        let old = s.coeff(&target);
        s.set_coeff(target, old + q_int(1));
        let rep = check_antisymmetry(&s);
        assert!(!rep.is_clean());
        for v in &rep.violations {
            assert!(v.mu == target || v.image == target, "{v:?}");
        }
        assert!(extract_sum_side(&s).is_err() || !rep.is_clean());
    }

    #[test]
    fn square_variant_m1_is_phi1() {
        let a = expand_psi_m(5, f1_5(), Variant::Square, 8).unwrap();
        let b = expand_phi1(5, f1_5(), 8).unwrap();
        assert_eq!(a.terms(), b.terms());
        assert!(matches!(expand_psi_m(5, f1_5(), Variant::NonRep, 8), Err(Error::Domain(_))));
    }

    #[test]
    fn nonrep_variant() {
        // 2 and 3 are inert for p = 5
        let f6 = build_fm(5, 6, 60).unwrap();
        let s = expand_psi_m(5, &f6, Variant::NonRep, 6).unwrap();
        assert_eq!(s.offset(), LatticeIndex::new(0, 0, 1));
        assert_eq!(s.coeff(&s.offset()), q_int(1));
        assert!(support_violations(&s).iter().all(|mu| *mu == s.offset()));
        assert!(matches!(expand_psi_m(5, &f6, Variant::Square, 6), Err(Error::Domain(_))));
    }

    #[test]
    fn square_variant_real_root_factors() {
        let f4 = build_fm(13, 4, 200).unwrap();
        let data = product_data(13, &f4, Variant::Square, 4).unwrap();
        let d = RootDatum::new(13, 1).unwrap();
        let two_a1 = d.alpha1().scale(&q_int(2));
        let two_a2 = d.alpha2().scale(&q_int(2));
        for target in [two_a1, two_a2] {
            assert!(data.factors.iter().any(|f| f.nu == target && f.exponent.is_one()));
        }
        assert_eq!(data.offset, weyl_root(13, 2).unwrap());
    }

    #[test]
    fn insufficient_depth() {
        let short = build_f1(5, 20).unwrap();
        match expand_phi1(5, &short, 15) {
            Err(Error::InsufficientPrecision { required, available }) => {
                assert!(required > available);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_factor_matches_exponential() {
        let d = RootDatum::new(5, 1).unwrap();
        let nu = d.from_alpha_ints(1, 1);
        let data = ProductData {
            p: 5,
            m: 1,
            datum: d,
            offset: RootF::from_xi(QuadElem::zero(5)),
            h: 2,
            factors: vec![Factor { key: (1, 1), nu: nu.clone(), exponent: BigInt::one() }],
        };
        let (z1, z2) = (Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0));
        let got = evaluate_product(&data, z1, z2).unwrap();
        let v = nu.value();
        let arg = Complex64::new(0.0, 2.0 * PI * 5.0) * (z2 * v.to_f64() + z1 * v.conj().to_f64());
        let want = Complex64::new(1.0, 0.0) - arg.exp();
        assert!((got - want).norm() < 1e-14);
        assert!(evaluate_product(&data, Complex64::new(0.0, 0.1), Complex64::new(0.0, 0.1)).is_err());
    }

    #[test]
    fn product_matches_sum() {
        let f = f1_5();
        let (z1, z2) = (Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0));
        let mut gaps = Vec::new();
        for h in [4, 8, 12] {
            let data = product_data(5, f, Variant::Square, h).unwrap();
            let series = expand_product(&data).unwrap();
            let a = evaluate_product(&data, z1, z2).unwrap();
            let b = evaluate_series(&series, z1, z2).unwrap();
            gaps.push((a - b).norm() / a.norm());
        }
        assert!(gaps[2] < 1e-8, "{gaps:?}");
        assert!(gaps[2] <= gaps[0] + 1e-13, "{gaps:?}");
    }

    #[test]
    fn json_roundtrip() {
        let s = expand_phi1(5, f1_5(), 5).unwrap();
        let back = FourierSeries2::from_json(&s.to_json()).unwrap();
        assert_eq!(back.terms(), s.terms());
        assert_eq!(back.offset(), s.offset());
        assert!(s.to_csv().unwrap().starts_with("u,v,lambda,numerator,denominator"));
    }
}
