//! Main-term asymptotics of a_m(n) from the circle method: a Salié sum times I_1.

use std::f64::consts::PI;

use num_traits::{ToPrimitive, Zero};

use crate::arith::{inv_mod, is_prime, legendre, Q};
use crate::error::{domain, Error, Result};
use crate::plusforms::PlusForm;

/// Agreement required between the direct and closed-form Salié sums.
pub const SALIE_TOLERANCE: f64 = 1e-10;

/// Below this argument I_nu is summed from its power series.
pub const BESSEL_SWITCH: f64 = 20.0;

fn e(x: f64) -> (f64, f64) {
    let t = 2.0 * PI * x;
    (t.cos(), t.sin())
}

/// The Salié sum in both forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SalieValue {
    /// sum over d mod p of chi(d) e((n d - m dbar)/p); always real.
    pub direct: f64,
    /// sqrt(p) chi(-m) sum_{v^2 = -mn} e(2v/p) for p not dividing m, chi(n) sqrt(p) otherwise.
    pub closed: f64,
    /// sum_{v^2 = -mn mod p} e(2v/p).
    pub inner: f64,
}

pub fn salie_sum(n: i64, m: i64, p: u64) -> Result<SalieValue> {
    if p < 3 || !is_prime(p) {
        return domain(format!("salie_sum needs an odd prime, got {p}"));
    }
    let pi = p as i64;
    let (mut re, mut im) = (0.0, 0.0);
    for d in 1..pi {
        let dbar = inv_mod(d, p).unwrap() as i64;
        let k = (n * d - m * dbar).rem_euclid(pi);
        let (c, s) = e(k as f64 / p as f64);
        let chi = legendre(d, p) as f64;
        re += chi * c;
        im += chi * s;
    }
    let mut inner = 0.0;
    let t = (-m * n).rem_euclid(pi);
    for v in 0..pi {
        if (v * v).rem_euclid(pi) == t {
            inner += e(2.0 * v as f64 / p as f64).0;
        }
    }
    let sp = (p as f64).sqrt();
    let closed = if m.rem_euclid(pi) != 0 {
        sp * legendre(-m, p) as f64 * inner
    } else {
        sp * legendre(n, p) as f64
    };
    let scale = 1.0f64.max(re.abs());
    if (re - closed).abs() > SALIE_TOLERANCE * scale || im.abs() > SALIE_TOLERANCE * scale {
        return Err(Error::Internal(format!(
            "Salié sum mismatch at p={p}, m={m}, n={n}: direct {re} + {im}i, closed {closed}"
        )));
    }
    Ok(SalieValue { direct: re, closed, inner })
}

fn bessel_series(nu: u32, x: f64) -> f64 {
    let h = x / 2.0;
    let mut term = h.powi(nu as i32) / (1..=nu).map(f64::from).product::<f64>();
    let mut sum = term;
    let h2 = h * h;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= h2 / (k as f64 * (k + nu) as f64);
        sum += term;
        if term < sum * 1e-18 {
            return sum;
        }
    }
}

fn bessel_asymptotic(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu as f64).powi(2);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1u32;
    loop {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if k > 10 && next.abs() >= term.abs() {
            break;
        }
        sum += next;
        term = next;
        if k >= 10 && term.abs() < 1e-17 * sum.abs() {
            break;
        }
        k += 1;
    }
    x.exp() / (2.0 * PI * x).sqrt() * sum
}

/// Modified Bessel function I_nu of integer order.
pub fn bessel_i(nu: u32, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("Bessel I needs a finite x >= 0, got {x}"));
    }
    if x == 0.0 {
        return Ok(if nu == 0 { 1.0 } else { 0.0 });
    }
    Ok(if x < BESSEL_SWITCH { bessel_series(nu, x) } else { bessel_asymptotic(nu, x) })
}

pub fn bessel_i0(x: f64) -> Result<f64> {
    bessel_i(0, x)
}

pub fn bessel_i1(x: f64) -> Result<f64> {
    bessel_i(1, x)
}

pub fn bessel_i2(x: f64) -> Result<f64> {
    bessel_i(2, x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymReport {
    pub p: u64,
    pub m: i64,
    pub n: i64,
    pub main_term: f64,
    pub exact: Option<Q>,
    pub rel_error: Option<f64>,
    pub salie_value: f64,
    /// exact = 0 while the main term is not.
    pub flagged: bool,
}

impl AsymReport {
    pub fn csv_header() -> [&'static str; 7] {
        ["p", "m", "n", "main_term", "exact_num", "exact_den", "rel_error"]
    }

    pub fn csv_row(&self) -> [String; 7] {
        let (num, den) = match &self.exact {
            Some(q) => (q.numer().to_string(), q.denom().to_string()),
            None => (String::new(), String::new()),
        };
        [
            self.p.to_string(),
            self.m.to_string(),
            self.n.to_string(),
            fmt_float(self.main_term),
            num,
            den,
            self.rel_error.map(fmt_float).unwrap_or_default(),
        ]
    }

    pub fn to_json(&self) -> String {
        let exact = match &self.exact {
            Some(q) => format!("[{}, {}]", q.numer(), q.denom()),
            None => "null".into(),
        };
        let rel = self.rel_error.map(fmt_float).unwrap_or_else(|| "null".into());
        format!(
            "{{\"p\": {}, \"m\": {}, \"n\": {}, \"main_term\": {}, \"salie_value\": {}, \"exact\": {}, \"rel_error\": {}, \"flagged\": {}}}\n",
            self.p,
            self.m,
            self.n,
            fmt_float(self.main_term),
            fmt_float(self.salie_value),
            exact,
            rel,
            self.flagged
        )
    }
}

/// 15 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn reports_to_csv(reports: &[AsymReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(AsymReport::csv_header())?;
    for r in reports {
        w.write_record(r.csv_row())?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

/// Leading circle-method term for a_m(n).
pub fn main_term(p: u64, m: i64, n: i64) -> Result<AsymReport> {
    if m < 1 || n < 1 {
        return domain("main_term needs m, n >= 1");
    }
    if legendre(m, p) == -1 {
        return domain(format!("chi_{p}({m}) = -1"));
    }
    let sal = salie_sum(n, m, p)?;
    let sp = (p as f64).sqrt();
    let ratio = (m as f64 / n as f64).sqrt();
    let bessel = bessel_i1(4.0 * PI * ((m * n) as f64).sqrt() / p as f64)?;
    let main = if m.rem_euclid(p as i64) != 0 {
        2.0 * PI / sp * ratio * bessel * sal.inner
    } else {
        PI / sp * ratio * bessel * (legendre(n, p) as f64 + 1.0)
    };
    Ok(AsymReport { p, m, n, main_term: main, exact: None, rel_error: None, salie_value: sal.direct, flagged: false })
}

/// Attaches a_m(n) from `f` and the relative error of the main term.
pub fn compare_exact(p: u64, m: i64, n: i64, f: &PlusForm) -> Result<AsymReport> {
    if f.p() != p || f.m() as i64 != m {
        return domain(format!("form is f_{} for p={}, expected f_{m} for p={p}", f.m(), f.p()));
    }
    let exact = f.coeff(n).ok_or(Error::InsufficientPrecision { required: n, available: f.order() })?;
    with_exact(main_term(p, m, n)?, exact)
}

/// Attaches a known exact value to a report.
pub fn with_exact(mut r: AsymReport, exact: Q) -> Result<AsymReport> {
    let ex = exact.to_f64().ok_or_else(|| Error::ResourceBound("exact value exceeds f64".into()))?;
    if exact.is_zero() {
        r.flagged = r.main_term != 0.0;
    } else {
        r.rel_error = Some((r.main_term - ex).abs() / ex.abs());
    }
    r.exact = Some(exact);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q_int;
    use crate::plusforms::build_f1;

    #[test]
    fn salie_examples() {
        let s = salie_sum(9, 6, 5).unwrap();
        assert!((s.inner - 2.0 * (4.0 * PI / 5.0).cos()).abs() < 1e-12);
        let s = salie_sum(10, 5, 5).unwrap();
        assert!(s.direct.abs() < 1e-12);
        let s = salie_sum(5, 1, 5).unwrap();
        assert!((s.direct - 5f64.sqrt()).abs() < 1e-12);
        assert!(salie_sum(1, 1, 9).is_err());
    }

    #[test]
    fn salie_grid() {
        for p in [5u64, 13, 17] {
            for m in 1..=50 {
                for n in 1..=50 {
                    let s = salie_sum(n, m, p).unwrap();
                    assert!((s.direct - s.closed).abs() < SALIE_TOLERANCE);
                }
            }
        }
    }

    #[test]
    fn bessel_values() {
        assert_eq!(bessel_i1(0.0).unwrap(), 0.0);
        assert!((bessel_i1(1.0).unwrap() - 0.565_159_103_992_485).abs() < 1e-14);
        let lead = 100f64.exp() / (2.0 * PI * 100.0).sqrt();
        assert!((bessel_i1(100.0).unwrap() / lead - 1.0).abs() < 0.01);
        assert!(bessel_i1(-1.0).is_err());
        // I1(10) = 2670.988303701255
        assert!((bessel_i1(10.0).unwrap() / 2670.988_303_701_255 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn bessel_branches_meet() {
        let a = bessel_series(1, 20.0);
        let b = bessel_asymptotic(1, 20.0);
        assert!((a / b - 1.0).abs() < 1e-12, "{a} {b}");
        for x in [0.5, 3.0, 19.5, 20.0, 25.0, 60.0, 150.0] {
            let lhs = bessel_i0(x).unwrap() - bessel_i2(x).unwrap();
            let rhs = 2.0 * bessel_i1(x).unwrap() / x;
            assert!((lhs / rhs - 1.0).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn worked_examples() {
        let r = main_term(5, 6, 9).unwrap();
        assert!((r.main_term / -35_409_600.0 - 1.0).abs() < 1e-4, "{}", r.main_term);
        let r = with_exact(r, q_int(-35_408_776)).unwrap();
        assert!(r.rel_error.unwrap() <= 3e-5);
        let r = main_term(5, 10, 9).unwrap();
        assert!((r.main_term / 5_391_530_000.0 - 1.0).abs() < 1e-4, "{}", r.main_term);
        let r = with_exact(r, q_int(5_391_558_200)).unwrap();
        assert!(r.rel_error.unwrap() <= 6e-6);
        assert!(matches!(main_term(5, 2, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn vanishing_and_positivity() {
        let f1 = build_f1(5, 60).unwrap();
        let r = main_term(5, 1, 2).unwrap();
        assert_eq!(r.main_term, 0.0);
        let r = compare_exact(5, 1, 2, &f1).unwrap();
        assert_eq!(r.exact, Some(q_int(0)));
        assert!(!r.flagged);
        for n in [5, 10, 15, 20, 25] {
            assert!(main_term(5, 1, n).unwrap().main_term > 0.0);
        }
        let r = compare_exact(5, 1, 10, &f1).unwrap();
        assert_eq!(r.exact, Some(q_int(340)));
        assert!(r.rel_error.unwrap() < 0.2);
    }

    #[test]
    fn error_shrinks_along_multiples_of_p() {
        let f1 = build_f1(5, 60).unwrap();
        let errs: Vec<f64> =
            [5, 10, 25, 50].iter().map(|&n| compare_exact(5, 1, n, &f1).unwrap().rel_error.unwrap()).collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    }

    #[test]
    fn csv_shape() {
        let r = main_term(5, 6, 9).unwrap();
        let text = reports_to_csv(&[r]).unwrap();
        assert!(text.starts_with("p,m,n,main_term,exact_num,exact_den,rel_error"));
    }
}
