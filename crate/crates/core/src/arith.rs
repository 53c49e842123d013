//! Small integer number theory used throughout: primality, Legendre symbols,
//! divisor sums, modular inverses.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorisation as (prime, exponent) pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Legendre symbol (n/p) for an odd prime p; 0 when p | n.
pub fn legendre(n: i64, p: u64) -> i32 {
    let p = p as i64;
    let r = n.rem_euclid(p);
    if r == 0 {
        return 0;
    }
    let t = pow_mod(r as u64, ((p - 1) / 2) as u64, p as u64);
    if t == 1 {
        1
    } else {
        -1
    }
}

pub fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut r = 1u128 % m;
    let mut b = b as u128 % m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r as u64
}

/// Inverse of `a` modulo the prime `p`.
pub fn inv_mod(a: i64, p: u64) -> Option<u64> {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        None
    } else {
        Some(pow_mod(r, p - 2, p))
    }
}

/// `s(n)` of the plus space: 2 when p | n, else 1.
pub fn s_factor(n: i64, p: u64) -> i64 {
    if n.rem_euclid(p as i64) == 0 {
        2
    } else {
        1
    }
}

/// Divisor power sums sigma_k(n) for 0 <= n <= limit (entry 0 is 0).
pub fn sigma_table(k: u32, limit: usize) -> Vec<BigInt> {
    let mut t = vec![BigInt::zero(); limit + 1];
    for d in 1..=limit {
        let dk = BigInt::from(d).pow(k);
        let mut n = d;
        while n <= limit {
            t[n] += &dk;
            n += d;
        }
    }
    t
}

/// Integer square root of a non-negative BigInt (floor).
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of negative");
    n.sqrt()
}

pub fn is_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = isqrt(n);
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

pub fn lcm_denoms<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Generalised binomial coefficient C(c, k) for an integer top entry (may be negative).
pub fn binomial_signed(c: &BigInt, k: u32) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= c - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_small_primes() {
        let residues5: Vec<i64> = (1..5).filter(|&n| legendre(n, 5) == 1).collect();
        assert_eq!(residues5, vec![1, 4]);
        let residues13: Vec<i64> = (1..13).filter(|&n| legendre(n, 13) == 1).collect();
        assert_eq!(residues13, vec![1, 3, 4, 9, 10, 12]);
        assert_eq!(legendre(34, 17), 0);
        assert_eq!(legendre(-1, 5), 1);
    }

    #[test]
    fn sigma_values() {
        let t = sigma_table(1, 12);
        assert_eq!(t[12], BigInt::from(28));
        let t3 = sigma_table(3, 4);
        assert_eq!(t3[2], BigInt::from(9));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial_signed(&BigInt::from(5), 2), BigInt::from(10));
        // (1-x)^{-3}: coefficient of x^2 is C(-3,2) = 6
        assert_eq!(binomial_signed(&BigInt::from(-3), 2), BigInt::from(6));
        assert_eq!(binomial_signed(&BigInt::from(2), 3), BigInt::from(0));
    }

    #[test]
    fn factorization() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1), vec![]);
    }
}
