//! Arithmetic in the prime field `F_p` and its quadratic character.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

/// Largest modulus for which [`PrimeCtx`] keeps a character table.
pub const CHI_TABLE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("zero has no inverse")]
    ZeroInverse,
}

/// An odd prime modulus plus an optional quadratic-character table.
///
/// Cloning is cheap; the table is shared.
#[derive(Clone)]
pub struct PrimeCtx {
    p: u64,
    chi: Option<Arc<[i8]>>,
}

impl fmt::Debug for PrimeCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrimeCtx").field("p", &self.p).finish()
    }
}

impl PartialEq for PrimeCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl Eq for PrimeCtx {}

impl PrimeCtx {
    /// Validates `p` and builds the character table when `p <= 2^20`.
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < 3 || p.is_multiple_of(2) || !is_prime(p) {
            return Err(FieldError::NotOddPrime(p));
        }
        let chi = (p <= CHI_TABLE_LIMIT).then(|| {
            let mut t = vec![-1i8; p as usize];
            t[0] = 0;
            for x in 1..=(p - 1) / 2 {
                t[(x * x % p) as usize] = 1;
            }
            Arc::from(t)
        });
        Ok(Self { p, chi })
    }

    /// Like [`PrimeCtx::new`] but never builds the table.
    pub fn without_table(p: u64) -> Result<Self, FieldError> {
        if p < 3 || p.is_multiple_of(2) || !is_prime(p) {
            return Err(FieldError::NotOddPrime(p));
        }
        Ok(Self { p, chi: None })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// `(p - 1) / 2`, the degree every solution in the classifier has.
    #[inline]
    pub fn half(&self) -> u64 {
        (self.p - 1) / 2
    }

    pub fn elem(&self, v: u64) -> FieldElement {
        FieldElement { value: v % self.p, modulus: self.p }
    }

    /// Maps a signed integer to its canonical residue.
    pub fn elem_i64(&self, v: i64) -> FieldElement {
        self.elem(v.rem_euclid(self.p as i64) as u64)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, base: u64, exp: u64) -> u64 {
        pow_mod(base % self.p, exp, self.p)
    }

    /// Inverse via Fermat. Returns `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = a % self.p;
        (a != 0).then(|| self.pow(a, self.p - 2))
    }

    /// Legendre symbol of a canonical residue.
    #[inline]
    pub fn legendre(&self, a: u64) -> i8 {
        match &self.chi {
            Some(t) => t[(a % self.p) as usize],
            None => self.legendre_euler(a),
        }
    }

    /// Legendre symbol by Euler's criterion, bypassing the table.
    pub fn legendre_euler(&self, a: u64) -> i8 {
        let a = a % self.p;
        if a == 0 {
            return 0;
        }
        if self.pow(a, (self.p - 1) / 2) == 1 {
            1
        } else {
            -1
        }
    }

    /// Legendre symbol of `a - b`.
    #[inline]
    pub fn chi_diff(&self, a: u64, b: u64) -> i8 {
        self.legendre(self.sub(a, b))
    }

    pub fn is_qr(&self, a: u64) -> bool {
        self.legendre(a) == 1
    }

    /// Smallest quadratic non-residue.
    pub fn least_qnr(&self) -> u64 {
        (2..self.p).find(|&a| self.legendre(a) == -1).expect("odd prime has a non-residue")
    }

    /// Nonzero squares in increasing order.
    pub fn residues(&self) -> Vec<u64> {
        (1..self.p).filter(|&a| self.legendre(a) == 1).collect()
    }

    pub fn nonresidues(&self) -> Vec<u64> {
        (1..self.p).filter(|&a| self.legendre(a) == -1).collect()
    }
}

/// A residue tagged with its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FieldElement {
    value: u64,
    modulus: u64,
}

impl FieldElement {
    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_field(self, rhs: Self) -> Result<u64, FieldError> {
        if self.modulus == rhs.modulus {
            Ok(self.modulus)
        } else {
            Err(FieldError::ModulusMismatch(self.modulus, rhs.modulus))
        }
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self, FieldError> {
        let p = self.same_field(rhs)?;
        Ok(Self { value: (self.value + rhs.value) % p, modulus: p })
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self, FieldError> {
        let p = self.same_field(rhs)?;
        Ok(Self { value: (self.value + p - rhs.value) % p, modulus: p })
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self, FieldError> {
        let p = self.same_field(rhs)?;
        let value = (self.value as u128 * rhs.value as u128 % p as u128) as u64;
        Ok(Self { value, modulus: p })
    }

    pub fn inv(self) -> Result<Self, FieldError> {
        if self.value == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(Self { value: pow_mod(self.value, self.modulus - 2, self.modulus), modulus: self.modulus })
    }

    pub fn pow(self, exp: u64) -> Self {
        Self { value: pow_mod(self.value, exp, self.modulus), modulus: self.modulus }
    }

    /// Legendre symbol via Euler's criterion.
    pub fn legendre(self) -> i8 {
        if self.value == 0 {
            0
        } else if pow_mod(self.value, (self.modulus - 1) / 2, self.modulus) == 1 {
            1
        } else {
            -1
        }
    }

    /// The quadratic character; identical to [`FieldElement::legendre`] on prime fields.
    pub fn omega(self) -> i8 {
        self.legendre()
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

// Operators panic on mismatched moduli; use the checked_* forms to recover.
impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(rhs).expect("field operands")
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(rhs).expect("field operands")
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(rhs).expect("field operands")
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        Self { value: (self.modulus - self.value) % self.modulus, modulus: self.modulus }
    }
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc: u128 = 1 % m128;
    let mut b = base as u128 % m128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = (x as u128 * x as u128 % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Odd primes in `[lo, hi]`.
pub fn odd_primes(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi).filter(|&n| n % 2 == 1 && is_prime(n)).collect()
}

/// `|sum_{x in F_p} e^{2 pi i x^2 / p}|` in double precision.
pub fn gauss_sum_magnitude(ctx: &PrimeCtx) -> f64 {
    let p = ctx.p();
    let step = std::f64::consts::TAU / p as f64;
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for x in 0..p {
        let k = ctx.mul(x, x) as f64;
        re += (step * k).cos();
        im += (step * k).sin();
    }
    re.hypot(im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_arithmetic() {
        let f7 = PrimeCtx::new(7).unwrap();
        assert_eq!((f7.elem(3) + f7.elem(5)).value(), 1);
        assert_eq!(f7.elem(3).inv().unwrap().value(), 5);
        let f5 = PrimeCtx::new(5).unwrap();
        assert_eq!((f5.elem(4) * f5.elem(4)).value(), 1);
        assert_eq!(f7.inv(3), Some(5));
        assert_eq!(f7.sub(2, 5), 4);
        assert_eq!(f7.neg(0), 0);
    }

    #[test]
    fn errors() {
        let f7 = PrimeCtx::new(7).unwrap();
        let f5 = PrimeCtx::new(5).unwrap();
        assert_eq!(f7.elem(1).checked_add(f5.elem(1)), Err(FieldError::ModulusMismatch(7, 5)));
        assert_eq!(f7.elem(0).inv(), Err(FieldError::ZeroInverse));
        assert_eq!(f7.inv(0), None);
        for bad in [0, 1, 2, 4, 9, 15, 91] {
            assert!(PrimeCtx::new(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn legendre_examples() {
        let f7 = PrimeCtx::new(7).unwrap();
        assert_eq!(f7.elem(0).legendre(), 0);
        assert_eq!(f7.elem(2).legendre(), 1);
        assert_eq!(f7.elem(3).legendre(), -1);
        assert_eq!(f7.elem(3).omega(), -1);
        assert_eq!(f7.legendre(2), 1);
        assert_eq!(f7.legendre(3), -1);
    }

    #[test]
    fn table_matches_euler() {
        for p in odd_primes(3, 400) {
            let ctx = PrimeCtx::new(p).unwrap();
            for a in 0..p {
                assert_eq!(ctx.legendre(a), ctx.legendre_euler(a), "p={p} a={a}");
            }
            let total: i64 = (0..p).map(|a| ctx.legendre(a) as i64).sum();
            assert_eq!(total, 0);
        }
    }

    #[test]
    fn primality_matches_trial_division() {
        let trial = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
        for n in 0..5000 {
            assert_eq!(is_prime(n), trial(n), "{n}");
        }
        assert!(is_prime(7408853));
        assert!(!is_prime(7408849));
        assert!(is_prime(4_611_686_018_427_387_847)); // 2^62 - 57
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2,3,5,7
    }

    #[test]
    fn large_modulus_arithmetic() {
        let p = 4_611_686_018_427_387_847;
        let ctx = PrimeCtx::new(p).unwrap();
        let a = p - 3;
        let ia = ctx.inv(a).unwrap();
        assert_eq!(ctx.mul(a, ia), 1);
        assert_eq!(ctx.legendre(4), 1);
    }

    #[test]
    fn gauss_sum_examples() {
        let g = |p| gauss_sum_magnitude(&PrimeCtx::new(p).unwrap());
        assert!((g(5) - 2.2360679).abs() < 1e-6);
        assert!((g(7) - 2.6457513).abs() < 1e-6);
        // 1 + 2 e^{2 pi i / 3} computed directly
        let direct = {
            let t = std::f64::consts::TAU / 3.0;
            (1.0 + 2.0 * t.cos()).hypot(2.0 * t.sin())
        };
        assert!((g(3) - direct).abs() < 1e-12);
        assert!((g(3) - 1.7320508).abs() < 1e-6);
    }

    #[test]
    fn gauss_sum_magnitude_is_sqrt_p() {
        for p in odd_primes(3, 10_000) {
            let ctx = PrimeCtx::new(p).unwrap();
            let s = (p as f64).sqrt();
            assert!((gauss_sum_magnitude(&ctx) - s).abs() < 1e-9 * s, "p={p}");
        }
    }
}
