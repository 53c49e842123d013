//! Rank 2 hyperbolic root systems H(a) realised inside Q(sqrt p).
//!
//! A root nu is stored through xi = nu sqrt(p), so nu = xi / sqrt(p) and
//! conj(nu) = -conj(xi) / sqrt(p). Simple roots are eta / sqrt(p) and
//! -1 / sqrt(p), and <x, y> = -p tr(x conj y) = tr(xi_x conj(xi_y)).

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{is_square, q_int, Q};
use crate::error::{domain, Error, Result};
use crate::qfield::{pell_solutions, QuadElem};

/// Peterson tables refuse roots above this height.
pub const PETERSON_HEIGHT_CAP: i64 = 200;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootF {
    xi: QuadElem,
}

impl RootF {
    /// The element xi / sqrt(p).
    pub fn from_xi(xi: QuadElem) -> Self {
        RootF { xi }
    }

    pub fn xi(&self) -> &QuadElem {
        &self.xi
    }

    pub fn p(&self) -> u64 {
        self.xi.p()
    }

    /// The value nu itself as an element of F.
    pub fn value(&self) -> QuadElem {
        let p = self.p();
        &self.xi * &QuadElem::new(p, Q::zero(), Q::new(BigInt::one(), BigInt::from(p)))
    }

    pub fn neg(&self) -> Self {
        RootF { xi: -&self.xi }
    }

    pub fn add(&self, other: &RootF) -> Self {
        RootF { xi: &self.xi + &other.xi }
    }

    pub fn sub(&self, other: &RootF) -> Self {
        RootF { xi: &self.xi - &other.xi }
    }

    pub fn scale(&self, k: &Q) -> Self {
        RootF { xi: self.xi.scale(k) }
    }

    /// Multiplication by a field element.
    pub fn mul_field(&self, x: &QuadElem) -> Self {
        RootF { xi: &self.xi * x }
    }

    /// conj(nu) in RootF coordinates.
    pub fn conj(&self) -> Self {
        RootF { xi: -&self.xi.conj() }
    }
}

impl fmt::Display for RootF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/sqrt({})", self.xi, self.p())
    }
}

/// <x, y> = -p tr(x conj(y)).
pub fn bilinear_form(x: &RootF, y: &RootF) -> Q {
    (&x.xi * &y.xi.conj()).trace()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reflection {
    R1,
    R2,
}

impl Reflection {
    pub fn det(self) -> i32 {
        -1
    }
}

/// Parses words such as "r1r2r1" or "r1 r2" (empty for the identity).
pub fn parse_word(s: &str) -> Result<Vec<Reflection>> {
    let t: String = s.chars().filter(|c| !c.is_whitespace() && *c != ',' && *c != '.').collect();
    let mut out = Vec::new();
    let mut chars = t.chars().peekable();
    while let Some(c) = chars.next() {
        if c != 'r' {
            return domain(format!("bad Weyl word {s:?}"));
        }
        match chars.next() {
            Some('1') => out.push(Reflection::R1),
            Some('2') => out.push(Reflection::R2),
            _ => return domain(format!("bad Weyl word {s:?}")),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDatum {
    p: u64,
    a: BigInt,
    s: BigInt,
    eta: QuadElem,
}

impl RootDatum {
    /// H(a_k) for the k-th Pell solution of p.
    pub fn new(p: u64, k: u32) -> Result<Self> {
        let fam = pell_solutions(p, k)?;
        let e = fam.entry(k).ok_or_else(|| Error::Internal("missing Pell entry".into()))?;
        Ok(RootDatum { p, a: e.a.clone(), s: e.s.clone(), eta: e.eta.clone() })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn s(&self) -> &BigInt {
        &self.s
    }

    pub fn eta(&self) -> &QuadElem {
        &self.eta
    }

    pub fn a_i64(&self) -> Result<i64> {
        self.a.to_i64().ok_or_else(|| Error::ResourceBound(format!("a = {} exceeds i64", self.a)))
    }

    pub fn alpha1(&self) -> RootF {
        RootF::from_xi(self.eta.clone())
    }

    pub fn alpha2(&self) -> RootF {
        RootF::from_xi(QuadElem::from_ints(self.p, -1, 0))
    }

    pub fn cartan(&self) -> [[BigInt; 2]; 2] {
        let two = BigInt::from(2);
        [[two.clone(), -self.a.clone()], [-self.a.clone(), two]]
    }

    /// (c1, c2) with nu = c1 alpha1 + c2 alpha2: c1 = tr(nu)/s, c2 = tr(nu conj eta)/s.
    pub fn alpha_coords(&self, x: &RootF) -> (Q, Q) {
        let s = Q::from_integer(self.s.clone());
        let a = Q::from_integer(self.a.clone());
        let c1 = x.xi.c1() * q_int(2) / &s;
        let c2 = &c1 * &a / q_int(2) - x.xi.c0();
        (c1, c2)
    }

    pub fn from_alpha(&self, c1: &Q, c2: &Q) -> RootF {
        let xi = &self.eta.scale(c1) - &QuadElem::rational(self.p, c2.clone());
        RootF::from_xi(xi)
    }

    pub fn from_alpha_ints(&self, c1: i64, c2: i64) -> RootF {
        self.from_alpha(&q_int(c1), &q_int(c2))
    }

    /// Integer alpha-coordinates, if both are integral.
    pub fn int_coords(&self, x: &RootF) -> Option<(BigInt, BigInt)> {
        let (c1, c2) = self.alpha_coords(x);
        if c1.is_integer() && c2.is_integer() {
            Some((c1.to_integer(), c2.to_integer()))
        } else {
            None
        }
    }

    pub fn height(&self, x: &RootF) -> Q {
        let (c1, c2) = self.alpha_coords(x);
        c1 + c2
    }

    pub fn reflect(&self, r: Reflection, x: &RootF) -> RootF {
        let c = x.conj();
        match r {
            Reflection::R2 => c,
            Reflection::R1 => c.mul_field(&(&self.eta * &self.eta)),
        }
    }

    /// Matrix action of a reflection on alpha-coordinates.
    pub fn reflect_coords(&self, r: Reflection, c: (Q, Q)) -> (Q, Q) {
        let a = Q::from_integer(self.a.clone());
        match r {
            Reflection::R1 => (&a * &c.1 - &c.0, c.1),
            Reflection::R2 => (c.0.clone(), &a * &c.0 - &c.1),
        }
    }

    /// gamma+ and gamma- in alpha-coordinates over F: (alpha1 + conj(eta) alpha2)/s
    /// and (alpha1 + eta alpha2)/s.
    pub fn gamma_pair(&self) -> ((QuadElem, QuadElem), (QuadElem, QuadElem)) {
        let inv_s = Q::new(BigInt::one(), self.s.clone());
        let one = QuadElem::rational(self.p, inv_s.clone());
        (
            (one.clone(), self.eta.conj().scale(&inv_s)),
            (one, self.eta.scale(&inv_s)),
        )
    }

    /// Cartan pairing of alpha-coordinate vectors with entries in F.
    pub fn cartan_pairing(&self, x: &(QuadElem, QuadElem), y: &(QuadElem, QuadElem)) -> QuadElem {
        let two = q_int(2);
        let a = Q::from_integer(self.a.clone());
        let t11 = (&x.0 * &y.0).scale(&two);
        let t22 = (&x.1 * &y.1).scale(&two);
        let t12 = (&(&x.0 * &y.1) + &(&x.1 * &y.0)).scale(&(-a));
        &(&t11 + &t22) + &t12
    }
}

/// Applies the letters of `word` in order, the first letter acting first.
pub fn weyl_apply(datum: &RootDatum, word: &[Reflection], x: &RootF) -> RootF {
    word.iter().fold(x.clone(), |acc, r| datum.reflect(*r, &acc))
}

/// Sign of the word as an element of O(1, 1).
pub fn word_det(word: &[Reflection]) -> i32 {
    if word.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// eta^j / sqrt p, j > 0
    RealEta,
    /// -conj(eta)^j / sqrt p, j >= 0
    RealEtaBar,
    /// eta^j (m eta - n) / sqrt p
    ImagA,
    /// eta^j (n eta - m) / sqrt p
    ImagB,
    /// conj(eta)^j (n - m conj eta) / sqrt p
    ImagC,
    /// conj(eta)^j (m - n conj eta) / sqrt p
    ImagD,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::RealEta => "re+",
            Family::RealEtaBar => "re-",
            Family::ImagA => "im-a",
            Family::ImagB => "im-b",
            Family::ImagC => "im-c",
            Family::ImagD => "im-d",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootRecord {
    pub root: RootF,
    pub family: Family,
    pub j: u32,
    /// Norm index: <nu, nu> = -2k for imaginary roots, 0 for real ones.
    pub k: u64,
}

pub fn real_roots(datum: &RootDatum, j_max: u32) -> Result<Vec<RootRecord>> {
    if j_max < 1 {
        return domain("real_roots needs j_max >= 1");
    }
    let mut out = Vec::new();
    let mut e = datum.eta.clone();
    for j in 1..=j_max {
        out.push(RootRecord { root: RootF::from_xi(e.clone()), family: Family::RealEta, j, k: 0 });
        e = &e * &datum.eta;
    }
    let eb = datum.eta.conj();
    let mut e = QuadElem::one(datum.p);
    for j in 0..=j_max {
        out.push(RootRecord { root: RootF::from_xi(-&e), family: Family::RealEtaBar, j, k: 0 });
        e = &e * &eb;
    }
    Ok(out)
}

/// Integer pairs (m, n) of Omega_k.
pub fn omega(datum: &RootDatum, k: u64) -> Vec<(BigInt, BigInt)> {
    let a = &datum.a;
    let k = BigInt::from(k);
    let a2m4 = a * a - 4;
    let am2 = a - 2;
    let mut out = Vec::new();
    if am2 <= BigInt::zero() {
        return out;
    }
    let mut m = BigInt::one();
    loop {
        let m2 = &m * &m;
        if &m2 * &am2 > k {
            break;
        }
        if &m2 * &a2m4 >= &k * 4 {
            let disc = &m2 * &a2m4 - &k * 4;
            if let Some(d) = is_square(&disc) {
                let num = a * &m - d;
                if !num.is_negative() && num.is_even() {
                    out.push((m.clone(), num / 2));
                }
            }
        }
        m += 1;
    }
    out
}

fn imag_family(datum: &RootDatum, m: &BigInt, n: &BigInt, j: u32) -> [(Family, QuadElem); 4] {
    let p = datum.p;
    let mq = QuadElem::rational(p, Q::from_integer(m.clone()));
    let nq = QuadElem::rational(p, Q::from_integer(n.clone()));
    let eta = &datum.eta;
    let etab = eta.conj();
    let ej = eta.pow(j as i64).expect("unit power");
    let ebj = etab.pow(j as i64).expect("unit power");
    [
        (Family::ImagA, &ej * &(&(&mq * eta) - &nq)),
        (Family::ImagB, &ej * &(&(&nq * eta) - &mq)),
        (Family::ImagC, &ebj * &(&nq - &(&mq * &etab))),
        (Family::ImagD, &ebj * &(&mq - &(&nq * &etab))),
    ]
}

/// Positive imaginary roots of norm -2k from Omega_k, 0 <= j <= j_max, without repeats.
pub fn imaginary_roots(datum: &RootDatum, k: u64, j_max: u32) -> Result<Vec<RootRecord>> {
    if k < 1 {
        return domain("imaginary_roots needs k >= 1");
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (m, n) in omega(datum, k) {
        for j in 0..=j_max {
            for (family, xi) in imag_family(datum, &m, &n, j) {
                if seen.insert(xi.clone()) {
                    out.push(RootRecord { root: RootF::from_xi(xi), family, j, k });
                }
            }
        }
    }
    Ok(out)
}

/// True if x is a (positive or negative) root of H(a).
pub fn is_root(datum: &RootDatum, x: &RootF) -> bool {
    let norm = bilinear_form(x, x);
    if norm > q_int(2) || norm.is_zero() {
        return false;
    }
    let Some((c1, c2)) = datum.int_coords(x) else {
        return false;
    };
    let x = if c1.is_negative() || c2.is_negative() {
        if c1.is_positive() || c2.is_positive() {
            return false;
        }
        x.neg()
    } else {
        x.clone()
    };
    if norm == q_int(2) {
        return is_real_root(datum, &x);
    }
    let norm_int: BigInt = norm.to_integer();
    if norm_int.is_odd() {
        return false;
    }
    let Some(k) = (-norm_int / BigInt::from(2)).to_u64() else {
        return false;
    };
    let target_h = datum.height(&x);
    let target = x.xi.clone();
    for (m, n) in omega(datum, k) {
        let mut j = 0;
        loop {
            let fam = imag_family(datum, &m, &n, j);
            if fam.iter().any(|(_, xi)| *xi == target) {
                return true;
            }
            let min_h = fam
                .iter()
                .map(|(_, xi)| datum.height(&RootF::from_xi(xi.clone())))
                .min()
                .unwrap();
            if min_h > target_h {
                break;
            }
            j += 1;
        }
    }
    false
}

/// Norm-2 positive x: reduce by simple reflections until a simple root appears.
fn is_real_root(datum: &RootDatum, x: &RootF) -> bool {
    let mut c = datum.alpha_coords(x);
    let a = Q::from_integer(datum.a.clone());
    loop {
        if c.0.is_negative() || c.1.is_negative() {
            return false;
        }
        if (c.0.is_one() && c.1.is_zero()) || (c.0.is_zero() && c.1.is_one()) {
            return true;
        }
        // <x, alpha1> = 2c1 - a c2, <x, alpha2> = 2c2 - a c1
        let p1 = q_int(2) * &c.0 - &a * &c.1;
        let p2 = q_int(2) * &c.1 - &a * &c.0;
        if p1.is_positive() {
            c = datum.reflect_coords(Reflection::R1, c);
        } else if p2.is_positive() {
            c = datum.reflect_coords(Reflection::R2, c);
        } else {
            return false;
        }
    }
}

#[derive(Clone, Debug)]
pub struct EmbeddingPair {
    pub p: u64,
    pub k: u32,
    pub l: u32,
    pub j: u32,
    pub a_l: BigInt,
    pub beta1: RootF,
    pub beta2: RootF,
    pub gram: [[Q; 2]; 2],
    /// Whether beta1 - beta2 is a root of H(a_k); the embedding needs `false`.
    pub difference_is_root: bool,
}

impl EmbeddingPair {
    /// Image in H(a_k) (alpha-coordinates) of c1 alpha1' + c2 alpha2' of H(a_l).
    pub fn image(&self, datum_k: &RootDatum, c1: i64, c2: i64) -> Option<(BigInt, BigInt)> {
        let x = self.beta1.scale(&q_int(c1)).add(&self.beta2.scale(&q_int(c2)));
        datum_k.int_coords(&x)
    }
}

pub fn embedding_pair(p: u64, k: u32, l: u32) -> Result<EmbeddingPair> {
    if k == 0 || l == 0 || l % k != 0 {
        return domain(format!("embedding needs k | l, got k={k} l={l}"));
    }
    let datum = RootDatum::new(p, k)?;
    let fam = pell_solutions(p, l)?;
    let a_l = fam.entry(l).unwrap().a.clone();
    let t = l / k;
    let eta_k = datum.eta.clone();
    let (j, e1, e2) = if t % 2 == 0 {
        let j = t / 2;
        (j, j, j)
    } else {
        let j = (t + 1) / 2;
        (j, j, j - 1)
    };
    let beta1 = RootF::from_xi(eta_k.pow(e1 as i64)?);
    let beta2 = RootF::from_xi(-&eta_k.conj().pow(e2 as i64)?);
    let gram = [
        [bilinear_form(&beta1, &beta1), bilinear_form(&beta1, &beta2)],
        [bilinear_form(&beta2, &beta1), bilinear_form(&beta2, &beta2)],
    ];
    let want = Q::from_integer(-a_l.clone());
    if gram[0][0] != q_int(2) || gram[1][1] != q_int(2) || gram[0][1] != want || gram[1][0] != want {
        return Err(Error::Invariant(format!(
            "gram matrix of the embedding pair for k={k} l={l} is not the Cartan matrix of H({a_l})"
        )));
    }
    let diff = beta1.sub(&beta2);
    let difference_is_root = is_root(&datum, &diff);
    Ok(EmbeddingPair { p, k, l, j, a_l, beta1, beta2, gram, difference_is_root })
}

/// Root multiplicities of H(a) on a box of the positive root lattice.
#[derive(Clone, Debug)]
pub struct PetersonTable {
    a: i64,
    c1_max: usize,
    c2_max: usize,
    mult: Vec<BigInt>,
}

impl PetersonTable {
    pub fn new(a: i64, c1_max: usize, c2_max: usize) -> Result<Self> {
        if (c1_max + c2_max) as i64 > PETERSON_HEIGHT_CAP {
            return Err(Error::ResourceBound(format!(
                "Peterson box ({c1_max}, {c2_max}) exceeds height cap {PETERSON_HEIGHT_CAP}"
            )));
        }
        let w = c2_max + 1;
        let idx = |i: usize, j: usize| i * w + j;
        let size = (c1_max + 1) * w;
        let mut cval: Vec<BigRational> = vec![BigRational::zero(); size];
        let mut mult: Vec<BigInt> = vec![BigInt::zero(); size];
        let form = |x1: i64, x2: i64, y1: i64, y2: i64| 2 * x1 * y1 + 2 * x2 * y2 - a * (x1 * y2 + x2 * y1);
        let mut order: Vec<(usize, usize)> =
            (0..=c1_max).flat_map(|i| (0..=c2_max).map(move |j| (i, j))).filter(|&(i, j)| i + j > 0).collect();
        order.sort_by_key(|&(i, j)| (i + j, i));
        for (i, j) in order {
            let (bi, bj) = (i as i64, j as i64);
            let g = bi.gcd(&bj) as usize;
            // sum_{n >= 2, n | g} mult(beta/n)/n
            let mut lower = BigRational::zero();
            for n in 2..=g {
                if g % n == 0 {
                    lower += BigRational::new(mult[idx(i / n, j / n)].clone(), BigInt::from(n));
                }
            }
            let lhs = form(bi, bj, bi, bj) - 2 * (bi + bj);
            let c = if i + j == 1 {
                BigRational::one()
            } else if lhs == 0 {
                lower.clone()
            } else {
                let mut int_sum = BigInt::zero();
                let mut rat_sum = BigRational::zero();
                for i1 in 0..=i {
                    for j1 in 0..=j {
                        let (i2, j2) = (i - i1, j - j1);
                        if (i1 + j1 == 0) || (i2 + j2 == 0) {
                            continue;
                        }
                        // each unordered pair once, doubled
                        if (i1, j1) > (i2, j2) {
                            continue;
                        }
                        let c1 = &cval[idx(i1, j1)];
                        let c2 = &cval[idx(i2, j2)];
                        if c1.is_zero() || c2.is_zero() {
                            continue;
                        }
                        let w = form(i1 as i64, j1 as i64, i2 as i64, j2 as i64);
                        let w = if (i1, j1) == (i2, j2) { w } else { 2 * w };
                        if w == 0 {
                            continue;
                        }
                        if c1.is_integer() && c2.is_integer() {
                            int_sum += c1.numer() * c2.numer() * w;
                        } else {
                            rat_sum += c1 * c2 * BigRational::from_integer(BigInt::from(w));
                        }
                    }
                }
                (rat_sum + BigRational::from_integer(int_sum)) / BigRational::from_integer(BigInt::from(lhs))
            };
            let m = &c - &lower;
            if !m.is_integer() || m.is_negative() {
                return Err(Error::Invariant(format!(
                    "Peterson recurrence gave multiplicity {m} at ({i}, {j}) for H({a})"
                )));
            }
            mult[idx(i, j)] = m.to_integer();
            cval[idx(i, j)] = c;
        }
        Ok(PetersonTable { a, c1_max, c2_max, mult })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn mult(&self, c1: usize, c2: usize) -> Option<&BigInt> {
        if c1 > self.c1_max || c2 > self.c2_max {
            return None;
        }
        self.mult.get(c1 * (self.c2_max + 1) + c2)
    }
}

/// Multiplicity of c1 alpha1 + c2 alpha2 in H(a).
pub fn peterson_mult(datum: &RootDatum, c1: i64, c2: i64) -> Result<BigInt> {
    if c1 < 0 || c2 < 0 || (c1 == 0 && c2 == 0) {
        return domain("peterson_mult needs a nonzero element of the positive cone");
    }
    let t = PetersonTable::new(datum.a_i64()?, c1 as usize, c2 as usize)?;
    Ok(t.mult(c1 as usize, c2 as usize).unwrap().clone())
}

pub fn roots_to_csv(datum: &RootDatum, roots: &[RootRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["c1", "c2", "norm", "family", "j", "k"])?;
    for r in roots {
        let (c1, c2) = datum.alpha_coords(&r.root);
        let norm = bilinear_form(&r.root, &r.root);
        w.write_record([
            c1.to_string(),
            c2.to_string(),
            norm.to_string(),
            r.family.tag().to_string(),
            r.j.to_string(),
            r.k.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

pub fn roots_to_json(datum: &RootDatum, roots: &[RootRecord]) -> String {
    let mut out = format!("{{\"p\": {}, \"a\": {}, \"roots\": [\n", datum.p, datum.a);
    let rows: Vec<String> = roots
        .iter()
        .map(|r| {
            let (c1, c2) = datum.alpha_coords(&r.root);
            let norm = bilinear_form(&r.root, &r.root);
            format!(
                "{{\"c1\": \"{c1}\", \"c2\": \"{c2}\", \"norm\": \"{norm}\", \"family\": \"{}\", \"j\": {}, \"k\": {}}}",
                r.family.tag(),
                r.j,
                r.k
            )
        })
        .collect();
    out.push_str(&rows.join(",\n"));
    out.push_str("\n]}\n");
    out
}
