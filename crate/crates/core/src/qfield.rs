//! Exact arithmetic in the real quadratic field Q(sqrt p), fundamental units
//! and the solution families of a^2 - p s^2 = 4.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{is_prime, is_square, q_frac, q_int, Q};
use crate::error::{domain, Error, Result};

/// Iteration cap for the continued-fraction unit search.
pub const CF_ITERATION_CAP: usize = 1_000_000;

/// `c0 + c1 * sqrt(p)` with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    p: u64,
    c0: Q,
    c1: Q,
}

/// Selector for [`field_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Conj,
    Norm,
    Trace,
    Inv,
}

/// Result of [`field_arith`]: either a field element or a rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldValue {
    Elem(QuadElem),
    Rational(Q),
}

impl QuadElem {
    pub fn new(p: u64, c0: Q, c1: Q) -> Self {
        QuadElem { p, c0, c1 }
    }

    pub fn from_ints(p: u64, c0: i64, c1: i64) -> Self {
        QuadElem::new(p, q_int(c0), q_int(c1))
    }

    /// `(c0 + c1 sqrt p) / den`
    pub fn from_frac(p: u64, c0: i64, c1: i64, den: i64) -> Self {
        QuadElem::new(p, q_frac(c0, den), q_frac(c1, den))
    }

    pub fn rational(p: u64, c0: Q) -> Self {
        QuadElem::new(p, c0, Q::zero())
    }

    pub fn zero(p: u64) -> Self {
        QuadElem::rational(p, Q::zero())
    }

    pub fn one(p: u64) -> Self {
        QuadElem::rational(p, Q::one())
    }

    pub fn sqrt_p(p: u64) -> Self {
        QuadElem::from_ints(p, 0, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn c0(&self) -> &Q {
        &self.c0
    }

    pub fn c1(&self) -> &Q {
        &self.c1
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero()
    }

    pub fn conj(&self) -> Self {
        QuadElem::new(self.p, self.c0.clone(), -self.c1.clone())
    }

    pub fn norm(&self) -> Q {
        &self.c0 * &self.c0 - q_int(self.p as i64) * &self.c1 * &self.c1
    }

    pub fn trace(&self) -> Q {
        &self.c0 * q_int(2)
    }

    pub fn scale(&self, k: &Q) -> Self {
        QuadElem::new(self.p, &self.c0 * k, &self.c1 * k)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(QuadElem::new(self.p, &self.c0 + &other.c0, &self.c1 + &other.c1))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let p = q_int(self.p as i64);
        Ok(QuadElem::new(
            self.p,
            &self.c0 * &other.c0 + p * &self.c1 * &other.c1,
            &self.c0 * &other.c1 + &self.c1 * &other.c0,
        ))
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::Division("inverse of zero field element".into()));
        }
        Ok(self.conj().scale(&(Q::one() / n)))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = QuadElem::one(self.p);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Approximate real value under the embedding sqrt p > 0.
    pub fn to_f64(&self) -> f64 {
        self.c0.to_f64().unwrap_or(f64::NAN) + self.c1.to_f64().unwrap_or(f64::NAN) * (self.p as f64).sqrt()
    }

    /// Exact sign of the real value under sqrt p > 0.
    pub fn signum(&self) -> i32 {
        let s0 = sign_of(&self.c0);
        let s1 = sign_of(&self.c1);
        if s0 == 0 {
            return s1;
        }
        if s1 == 0 || s0 == s1 {
            return s0;
        }
        // opposite signs: compare c0^2 with p c1^2
        let lhs = &self.c0 * &self.c0;
        let rhs = q_int(self.p as i64) * &self.c1 * &self.c1;
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Greater => s0,
            std::cmp::Ordering::Less => s1,
            std::cmp::Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    /// Both real embeddings positive.
    pub fn is_totally_positive(&self) -> bool {
        self.signum() > 0 && self.conj().signum() > 0
    }

    /// Membership in the ring of integers O.
    pub fn is_integral(&self) -> bool {
        if self.p % 4 == 1 {
            let s = &self.c0 + &self.c1;
            let t = &self.c1 * q_int(2);
            s.is_integer() && t.is_integer()
        } else {
            self.c0.is_integer() && self.c1.is_integer()
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return domain(format!(
                "operands live in different fields: Q(sqrt {}) vs Q(sqrt {})",
                self.p, other.p
            ));
        }
        Ok(())
    }
}

fn sign_of(x: &Q) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", self.c0, self.c1, self.p)
    }
}

// Operator forms assume both operands share p; use the try_* methods at API
// boundaries where that is not already guaranteed.
impl<'a> Add<&'a QuadElem> for &'a QuadElem {
    type Output = QuadElem;
    fn add(self, rhs: &QuadElem) -> QuadElem {
        self.try_add(rhs).expect("field mismatch in add")
    }
}

impl<'a> Sub<&'a QuadElem> for &'a QuadElem {
    type Output = QuadElem;
    fn sub(self, rhs: &QuadElem) -> QuadElem {
        self.try_add(&-rhs).expect("field mismatch in sub")
    }
}

impl<'a> Mul<&'a QuadElem> for &'a QuadElem {
    type Output = QuadElem;
    fn mul(self, rhs: &QuadElem) -> QuadElem {
        self.try_mul(rhs).expect("field mismatch in mul")
    }
}

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem::new(self.p, -self.c0.clone(), -self.c1.clone())
    }
}

impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        -&self
    }
}

/// One-stop dispatcher over the field operations.
pub fn field_arith(x: &QuadElem, y: Option<&QuadElem>, op: FieldOp) -> Result<FieldValue> {
    let need_y = || y.ok_or_else(|| Error::Domain(format!("{op:?} needs two operands")));
    Ok(match op {
        FieldOp::Add => FieldValue::Elem(x.try_add(need_y()?)?),
        FieldOp::Mul => FieldValue::Elem(x.try_mul(need_y()?)?),
        FieldOp::Conj => FieldValue::Elem(x.conj()),
        FieldOp::Norm => FieldValue::Rational(x.norm()),
        FieldOp::Trace => FieldValue::Rational(x.trace()),
        FieldOp::Inv => FieldValue::Elem(x.inv()?),
    })
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p % 2 == 0 || !is_prime(p) {
        return domain(format!("{p} is not an odd prime"));
    }
    Ok(())
}

/// Fundamental unit > 1 of the ring of integers of Q(sqrt p).
pub fn fundamental_unit(p: u64) -> Result<QuadElem> {
    check_odd_prime(p)?;
    Ok(match p {
        5 => QuadElem::from_frac(5, 1, 1, 2),
        13 => QuadElem::from_frac(13, 3, 1, 2),
        17 => QuadElem::from_ints(17, 4, 1),
        _ => unit_by_continued_fraction(p)?,
    })
}

/// Fundamental unit via the continued fraction of sqrt p. For p = 1 mod 4 the
/// unit of Z[sqrt p] may be the cube of the unit of O, which is then recovered
/// from its trace.
pub fn unit_by_continued_fraction(p: u64) -> Result<QuadElem> {
    check_odd_prime(p)?;
    let a0 = BigInt::from(p).sqrt();
    let pb = BigInt::from(p);
    let (mut m, mut d, mut a) = (BigInt::zero(), BigInt::one(), a0.clone());
    let (mut h_prev, mut h) = (BigInt::one(), a0.clone());
    let (mut k_prev, mut k) = (BigInt::zero(), BigInt::one());
    let mut found = None;
    for _ in 0..CF_ITERATION_CAP {
        let n = &h * &h - &pb * &k * &k;
        if n.abs().is_one() {
            found = Some((h.clone(), k.clone(), n));
            break;
        }
        m = &d * &a - &m;
        d = (&pb - &m * &m) / &d;
        a = (&a0 + &m) / &d;
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
    }
    let (x, y, nrm) = found.ok_or_else(|| {
        Error::ResourceBound(format!(
            "continued fraction of sqrt {p} did not close within {CF_ITERATION_CAP} steps"
        ))
    })?;
    let unit_z = QuadElem::new(p, Q::from_integer(x.clone()), Q::from_integer(y));
    if p % 4 != 1 {
        return Ok(unit_z);
    }
    // Look for t with t^3 - 3 N t = tr(unit_z); then (t + u sqrt p)/2 cubes to unit_z.
    let big_t = &x * BigInt::from(2);
    let guess = big_t.cbrt();
    for dt in -2i64..=2 {
        let t = &guess + BigInt::from(dt);
        if t <= BigInt::zero() {
            continue;
        }
        if &t * &t * &t - BigInt::from(3) * &nrm * &t != big_t {
            continue;
        }
        let disc = &t * &t - BigInt::from(4) * &nrm;
        if !(&disc % &pb).is_zero() {
            continue;
        }
        if let Some(u) = is_square(&(&disc / &pb)) {
            let cand = QuadElem::new(
                p,
                Q::new(t.clone(), BigInt::from(2)),
                Q::new(u, BigInt::from(2)),
            );
            if cand.pow(3)? == unit_z {
                return Ok(cand);
            }
        }
    }
    Ok(unit_z)
}

/// One entry (k, a_k, s_k, eta_k) of a Pell family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PellEntry {
    pub k: u32,
    pub a: BigInt,
    pub s: BigInt,
    pub eta: QuadElem,
}

/// The solutions of a^2 - p s^2 = 4 indexed by powers of the fundamental unit.
#[derive(Clone, Debug)]
pub struct PellFamily {
    pub p: u64,
    pub eps0: QuadElem,
    pub entries: Vec<PellEntry>,
}

impl PellFamily {
    pub fn entry(&self, k: u32) -> Option<&PellEntry> {
        self.entries.get((k as usize).checked_sub(1)?)
    }
}

/// eta_1 in terms of the fundamental unit: eps0^2 for p = 1 mod 4, eps0 otherwise.
pub fn base_eta(p: u64) -> Result<QuadElem> {
    let e = fundamental_unit(p)?;
    if p % 4 == 1 {
        Ok(&e * &e)
    } else {
        Ok(e)
    }
}

/// The first `count` solutions (a_k, s_k) with eta_k = (a_k + s_k sqrt p)/2.
pub fn pell_solutions(p: u64, count: u32) -> Result<PellFamily> {
    if count == 0 {
        return domain("pell_solutions needs at least one entry");
    }
    let eps0 = fundamental_unit(p)?;
    let eta1 = base_eta(p)?;
    let mut entries = Vec::with_capacity(count as usize);
    let mut eta = eta1.clone();
    for k in 1..=count {
        let a = eta.trace();
        let s = eta.c1() * q_int(2);
        if !a.is_integer() || !s.is_integer() {
            return Err(Error::Internal(format!("eta_{k} is not of the form (a + s sqrt p)/2")));
        }
        entries.push(PellEntry {
            k,
            a: a.to_integer(),
            s: s.to_integer(),
            eta: eta.clone(),
        });
        eta = &eta * &eta1;
    }
    Ok(PellFamily { p, eps0, entries })
}
