//! Reduced polynomials over `F_p`.
//!
//! Every function `F_p -> F_p` has a unique representative of degree at most
//! `p - 1`. [`Polynomial`] stores that representative densely, constant term
//! first. Values are lifted to integers in `[0, p-1]` whenever a range sum is
//! taken.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldElement, FieldError, PrimeCtx};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("modulus mismatch: polynomial over F_{0}, operand over F_{1}")]
    ModulusMismatch(u64, u64),
    #[error("affine substitution needs a nonzero multiplier")]
    ZeroMultiplier,
    #[error("operation is undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("power-sum index {j} exceeds p - 2 = {max}")]
    IndexTooLarge { j: usize, max: usize },
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A reduced polynomial `a_0 + a_1 x + ... + a_d x^d` with `d <= p - 1`.
///
/// `coeffs` is empty for the zero polynomial and otherwise ends in a nonzero
/// entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    ctx: PrimeCtx,
    coeffs: Vec<u64>,
}

impl Polynomial {
    /// Builds the reduced form of `sum coeffs[k] x^k`.
    ///
    /// Coefficients are reduced mod `p`, and exponents `k >= p` fold onto
    /// `((k - 1) mod (p - 1)) + 1` since `x^p = x` on `F_p`.
    pub fn new(ctx: &PrimeCtx, coeffs: Vec<u64>) -> Self {
        let p = ctx.p();
        let mut out = if coeffs.len() as u64 <= p {
            coeffs.into_iter().map(|c| c % p).collect::<Vec<_>>()
        } else {
            let mut folded = vec![0u64; p as usize];
            for (k, c) in coeffs.into_iter().enumerate() {
                let k = k as u64;
                let slot = if k < p { k } else { (k - 1) % (p - 1) + 1 };
                folded[slot as usize] = ctx.add(folded[slot as usize], c % p);
            }
            folded
        };
        trim(&mut out);
        Self { ctx: ctx.clone(), coeffs: out }
    }

    /// Signed coefficients, each taken mod `p`.
    pub fn from_signed(ctx: &PrimeCtx, coeffs: &[i64]) -> Self {
        Self::new(ctx, coeffs.iter().map(|&c| ctx.elem_i64(c).value()).collect())
    }

    pub fn zero(ctx: &PrimeCtx) -> Self {
        Self { ctx: ctx.clone(), coeffs: Vec::new() }
    }

    pub fn constant(ctx: &PrimeCtx, c: u64) -> Self {
        Self::new(ctx, vec![c])
    }

    /// `c * prod (x - r)` over the given roots.
    pub fn from_roots(ctx: &PrimeCtx, c: u64, roots: &[u64]) -> Self {
        let mut coeffs = vec![c % ctx.p()];
        for &r in roots {
            let neg_r = ctx.neg(r % ctx.p());
            let mut next = vec![0u64; coeffs.len() + 1];
            for (k, &a) in coeffs.iter().enumerate() {
                next[k + 1] = ctx.add(next[k + 1], a);
                next[k] = ctx.add(next[k], ctx.mul(a, neg_r));
            }
            coeffs = next;
        }
        Self::new(ctx, coeffs)
    }

    pub fn ctx(&self) -> &PrimeCtx {
        &self.ctx
    }

    pub fn p(&self) -> u64 {
        self.ctx.p()
    }

    /// Ascending coefficients `a_0, ..., a_d`.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> u64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Leading coefficient as a residue in `[1, p-1]`; 0 for the zero polynomial.
    pub fn leading_coeff(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    /// Horner evaluation at a canonical residue.
    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        self.coeffs.iter().rev().fold(0, |acc, &a| self.ctx.add(self.ctx.mul(acc, x), a))
    }

    pub fn evaluate(&self, x: FieldElement) -> Result<FieldElement, PolyError> {
        if x.modulus() != self.p() {
            return Err(PolyError::ModulusMismatch(self.p(), x.modulus()));
        }
        Ok(self.ctx.elem(self.eval(x.value())))
    }

    /// Values at `x = 0, 1, ..., p-1`.
    pub fn values(&self) -> Vec<u64> {
        (0..self.p()).map(|x| self.eval(x)).collect()
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: u64) -> Self {
        let c = c % self.p();
        Self::new(&self.ctx, self.coeffs.iter().map(|&a| self.ctx.mul(a, c)).collect())
    }

    /// `x -> P(x + b)` by repeated Horner steps.
    pub fn shift(&self, b: u64) -> Self {
        let ctx = &self.ctx;
        let b = b % ctx.p();
        let mut out: Vec<u64> = Vec::with_capacity(self.coeffs.len());
        for &a in self.coeffs.iter().rev() {
            // out <- out * (x + b) + a
            out.push(0);
            for i in (1..out.len()).rev() {
                out[i] = ctx.add(out[i - 1], ctx.mul(b, out[i]));
            }
            out[0] = ctx.add(ctx.mul(b, out[0]), a);
        }
        Self::new(ctx, out)
    }

    /// `x -> P(a x)`.
    pub fn dilate(&self, a: u64) -> Self {
        let ctx = &self.ctx;
        let mut pw = 1u64;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| {
                let v = ctx.mul(c, pw);
                pw = ctx.mul(pw, a);
                v
            })
            .collect();
        Self::new(ctx, coeffs)
    }

    /// The reduced polynomial `x -> P(a x + b)`.
    ///
    /// Degree is preserved and the leading coefficient is multiplied by
    /// `a^deg`.
    pub fn affine_substitute(&self, a: FieldElement, b: FieldElement) -> Result<Self, PolyError> {
        for e in [a, b] {
            if e.modulus() != self.p() {
                return Err(PolyError::ModulusMismatch(self.p(), e.modulus()));
            }
        }
        if a.is_zero() {
            return Err(PolyError::ZeroMultiplier);
        }
        Ok(self.substitute_raw(a.value(), b.value()))
    }

    /// Unchecked form of [`Polynomial::affine_substitute`]; `a` must be nonzero.
    pub fn substitute_raw(&self, a: u64, b: u64) -> Self {
        debug_assert!(!a.is_multiple_of(self.p()));
        self.shift(b).dilate(a)
    }

    pub fn range_profile(&self) -> RangeProfile {
        RangeProfile::from_values(self.p(), self.values())
    }

    /// Checks, for `k = 0..=j`, that
    /// `sum x^k P(x) = sum x^k - sum_roots a^k + sum_excess b^k` in `F_p`.
    ///
    /// The identity follows from writing each lifted value as
    /// `1 - [P(x) = 0] + (P(x) - 1)[P(x) >= 1]`.
    pub fn power_sum_identity_check(&self, j: usize) -> Result<PowerSumReport, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let p = self.p();
        let max = (p - 2) as usize;
        if j > max {
            return Err(PolyError::IndexTooLarge { j, max });
        }
        let ctx = &self.ctx;
        let profile = self.range_profile();
        let power_sum = |pts: &mut dyn Iterator<Item = u64>, k: u64| {
            pts.fold(0u64, |acc, x| ctx.add(acc, ctx.pow(x, k)))
        };
        let residuals = (0..=j as u64)
            .map(|k| {
                let lhs = (0..p).fold(0u64, |acc, x| {
                    ctx.add(acc, ctx.mul(ctx.pow(x, k), profile.values[x as usize]))
                });
                let all = power_sum(&mut (0..p), k);
                let roots = power_sum(&mut profile.roots.iter().copied(), k);
                let excess = power_sum(&mut profile.excess.iter().copied(), k);
                let rhs = ctx.add(ctx.sub(all, roots), excess);
                ctx.sub(lhs, rhs)
            })
            .collect::<Vec<_>>();
        let holds = residuals.iter().all(|&r| r == 0);
        Ok(PowerSumReport { j, residuals, holds })
    }
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

impl fmt::Display for Polynomial {
    /// `p=7; coeffs=[1,0,0,1]`, constant term first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={}; coeffs=[", self.p())?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for Polynomial {
    type Err = PolyError;

    /// Grammar (whitespace allowed around every token):
    ///
    /// ```text
    /// poly   := "p" "=" uint ";" "coeffs" "=" "[" [ int { "," int } ] "]" [";"]
    /// int    := ["-"] digits
    /// ```
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m: &str| PolyError::Parse(m.to_string());
        let s = s.trim().trim_end_matches(';');
        let (head, tail) = s.split_once(';').ok_or_else(|| bad("missing ';' after p=<prime>"))?;
        let p_str = head
            .trim()
            .strip_prefix('p')
            .and_then(|r| r.trim_start().strip_prefix('='))
            .ok_or_else(|| bad("expected 'p=<prime>'"))?;
        let p: u64 = p_str.trim().parse().map_err(|_| bad("p is not an unsigned integer"))?;
        let ctx = PrimeCtx::new(p)?;
        let list = tail
            .trim()
            .strip_prefix("coeffs")
            .and_then(|r| r.trim_start().strip_prefix('='))
            .map(str::trim)
            .and_then(|r| r.strip_prefix('['))
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| bad("expected 'coeffs=[...]'"))?;
        let coeffs = if list.trim().is_empty() {
            Vec::new()
        } else {
            list.split(',')
                .map(|t| t.trim().parse::<i64>().map_err(|_| bad(&format!("bad coefficient '{}'", t.trim()))))
                .collect::<Result<Vec<_>, _>>()?
        };
        Ok(Polynomial::from_signed(&ctx, &coeffs))
    }
}

/// The lifted value multiset of a polynomial and the data derived from it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RangeProfile {
    pub p: u64,
    /// `P(0), ..., P(p-1)` as integers in `[0, p-1]`.
    pub values: Vec<u64>,
    /// Integer sum of `values`, no reduction.
    pub range_sum: u64,
    /// Sorted zeros of `P`.
    pub roots: Vec<u64>,
    /// Sorted multiset: each `x` with `P(x) >= 1` appears `P(x) - 1` times.
    pub excess: Vec<u64>,
}

impl RangeProfile {
    pub fn from_values(p: u64, values: Vec<u64>) -> Self {
        let range_sum = values.iter().sum();
        let roots = (0..p).filter(|&x| values[x as usize] == 0).collect();
        let excess = (0..p)
            .flat_map(|x| std::iter::repeat_n(x, values[x as usize].saturating_sub(1) as usize))
            .collect();
        Self { p, values, range_sum, roots, excess }
    }

    /// Number of `x` with `P(x) != 0`.
    pub fn support_size(&self) -> usize {
        self.values.len() - self.roots.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowerSumReport {
    pub j: usize,
    /// Residual of the identity for `k = 0..=j`; all zero when it holds.
    pub residuals: Vec<u64>,
    pub holds: bool,
}

/// Moments `m_t = sum_x x^t f(x)` for `t = 0..=p-2`, with `0^0 = 1`.
pub fn moments(ctx: &PrimeCtx, f: &[u64]) -> Result<Vec<u64>, PolyError> {
    let p = ctx.p() as usize;
    if f.len() != p {
        return Err(PolyError::WrongLength { expected: p, got: f.len() });
    }
    let f: Vec<u64> = f.iter().map(|&v| v % ctx.p()).collect();
    let mut pw = vec![1u64; p];
    let mut out = Vec::with_capacity(p - 1);
    for _ in 0..p - 1 {
        let m = pw.iter().zip(&f).fold(0u64, |acc, (&x, &v)| ctx.add(acc, ctx.mul(x, v)));
        out.push(m);
        for (x, w) in pw.iter_mut().enumerate() {
            *w = ctx.mul(*w, x as u64);
        }
    }
    Ok(out)
}

/// The reduced polynomial agreeing with `f` on `0..p`.
///
/// Coefficients come from the moment formula `a_{p-1-t} = -sum_x x^t f(x)`
/// for `t = 0..=p-2`, and `a_0 = f(0)`. The formula at `t = p-1` would give
/// `-(a_0 + a_{p-1})` because `x^{p-1}` vanishes only at zero, so the
/// constant term is read off directly.
pub fn interpolate(ctx: &PrimeCtx, f: &[u64]) -> Result<Polynomial, PolyError> {
    let m = moments(ctx, f)?;
    let p = ctx.p() as usize;
    let mut coeffs = vec![0u64; p];
    coeffs[0] = f[0] % ctx.p();
    for (t, &mt) in m.iter().enumerate() {
        coeffs[p - 1 - t] = ctx.neg(mt);
    }
    Ok(Polynomial::new(ctx, coeffs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeWitness {
    /// `None` when `f` is identically zero.
    pub degree: Option<usize>,
    /// Smallest `t` with a nonzero moment; then `degree = p - 1 - t`.
    pub witness: Option<usize>,
}

/// Degree of the interpolating polynomial read off from the first nonzero moment.
pub fn min_degree_witness(ctx: &PrimeCtx, f: &[u64]) -> Result<DegreeWitness, PolyError> {
    let m = moments(ctx, f)?;
    let p = ctx.p() as usize;
    Ok(match m.iter().position(|&v| v != 0) {
        Some(t) => DegreeWitness { degree: Some(p - 1 - t), witness: Some(t) },
        None if !f[0].is_multiple_of(ctx.p()) => DegreeWitness { degree: Some(0), witness: None },
        None => DegreeWitness { degree: None, witness: None },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FamilyVariant {
    /// `±(x-a)^{(p-1)/2} + 1`
    #[serde(rename = "i")]
    I,
    /// `(p+1)/2 · (±(x-a)^{(p-1)/2} + 1)`
    #[serde(rename = "ii")]
    II,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// One member of the two known families of degree-`(p-1)/2` polynomials
/// with range sum `p`.
pub fn make_family(ctx: &PrimeCtx, variant: FamilyVariant, sign: Sign, a: FieldElement) -> Polynomial {
    assert_eq!(a.modulus(), ctx.p(), "shift from another field");
    let h = ctx.half() as usize;
    let mut base = vec![0u64; h + 1];
    base[0] = 1;
    base[h] = match sign {
        Sign::Plus => 1,
        Sign::Minus => ctx.p() - 1,
    };
    let mut poly = Polynomial::new(ctx, base).shift(ctx.neg(a.value()));
    if variant == FamilyVariant::II {
        poly = poly.scale(ctx.half() + 1);
    }
    assert_eq!(poly.degree(), Some(h), "family member has wrong degree");
    assert_eq!(poly.range_profile().range_sum, ctx.p(), "family member has wrong range sum");
    poly
}

/// All `4p` family members: both variants, both signs, every shift.
pub fn all_family_members(ctx: &PrimeCtx) -> Vec<(FamilyVariant, Sign, u64, Polynomial)> {
    let mut out = Vec::with_capacity(4 * ctx.p() as usize);
    for variant in [FamilyVariant::I, FamilyVariant::II] {
        for sign in [Sign::Plus, Sign::Minus] {
            for a in 0..ctx.p() {
                out.push((variant, sign, a, make_family(ctx, variant, sign, ctx.elem(a))));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeCtx {
        PrimeCtx::new(p).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let ctx = f(7);
        let p = Polynomial::new(&ctx, vec![1, 0, 0, 1]);
        assert_eq!(p.evaluate(ctx.elem(3)).unwrap().value(), 0);
        let one = Polynomial::constant(&ctx, 1);
        assert!((0..7).all(|x| one.eval(x) == 1));
        let q = Polynomial::new(&ctx, vec![4, 0, 0, 4]);
        assert_eq!(q.eval(0), 4);
        assert_eq!(p.evaluate(f(5).elem(1)), Err(PolyError::ModulusMismatch(7, 5)));
    }

    #[test]
    fn reduction_folds_high_exponents() {
        let ctx = f(5);
        // x^5 = x, x^8 = x^4, x^9 = x
        let p = Polynomial::new(&ctx, vec![0, 0, 0, 0, 0, 1, 0, 0, 2, 3]);
        assert_eq!(p.coeffs(), &[0, 4, 0, 0, 2]);
        assert!(Polynomial::new(&ctx, vec![5, 10]).is_zero());
    }

    #[test]
    fn interpolate_examples() {
        let ctx = f(5);
        let ones = vec![1u64; 5];
        assert_eq!(interpolate(&ctx, &ones).unwrap(), Polynomial::constant(&ctx, 1));
        let delta0 = vec![1, 0, 0, 0, 0];
        let d = interpolate(&ctx, &delta0).unwrap();
        assert_eq!(d.coeffs(), &[1, 0, 0, 0, 4]);
        assert_eq!(d.values(), delta0);
        let ctx7 = f(7);
        let p = Polynomial::new(&ctx7, vec![1, 0, 0, 1]);
        assert_eq!(interpolate(&ctx7, &p.values()).unwrap(), p);
        assert_eq!(
            interpolate(&ctx7, &[1, 2]),
            Err(PolyError::WrongLength { expected: 7, got: 2 })
        );
    }

    #[test]
    fn degree_witness_examples() {
        let ctx = f(7);
        let p = Polynomial::new(&ctx, vec![1, 0, 0, 1]);
        assert_eq!(
            min_degree_witness(&ctx, &p.values()).unwrap(),
            DegreeWitness { degree: Some(3), witness: Some(3) }
        );
        assert_eq!(
            min_degree_witness(&ctx, &[0; 7]).unwrap(),
            DegreeWitness { degree: None, witness: None }
        );
        assert_eq!(
            min_degree_witness(&ctx, &[2; 7]).unwrap(),
            DegreeWitness { degree: Some(0), witness: None }
        );
    }

    #[test]
    fn range_profile_examples() {
        let ctx = f(7);
        let r = Polynomial::new(&ctx, vec![1, 0, 0, 1]).range_profile();
        assert_eq!(r.values, vec![1, 2, 2, 0, 2, 0, 0]);
        assert_eq!(r.range_sum, 7);
        assert_eq!(r.roots, vec![3, 5, 6]);
        assert_eq!(r.excess, vec![1, 2, 4]);
        let r2 = Polynomial::new(&ctx, vec![4, 0, 0, 4]).range_profile();
        assert_eq!(r2.values, vec![4, 1, 1, 0, 1, 0, 0]);
        assert_eq!(r2.range_sum, 7);
        let r3 = Polynomial::constant(&ctx, 1).range_profile();
        assert_eq!(r3.range_sum, 7);
        assert!(r3.roots.is_empty() && r3.excess.is_empty());
    }

    #[test]
    fn affine_examples() {
        let ctx = f(7);
        let p = Polynomial::new(&ctx, vec![1, 0, 0, 1]);
        assert_eq!(p.affine_substitute(ctx.elem(1), ctx.elem(0)).unwrap(), p);
        let q = p.affine_substitute(ctx.elem(3), ctx.elem(0)).unwrap();
        assert_eq!(q.coeffs(), &[1, 0, 0, 6]);
        // (x+1)^3 + 1 = x^3 + 3x^2 + 3x + 2
        let r = p.affine_substitute(ctx.elem(1), ctx.elem(1)).unwrap();
        assert_eq!(r.coeffs(), &[2, 3, 3, 1]);
        assert_eq!(p.affine_substitute(ctx.elem(0), ctx.elem(1)), Err(PolyError::ZeroMultiplier));
    }

    #[test]
    fn power_sum_examples() {
        let ctx = f(7);
        let p = Polynomial::new(&ctx, vec![1, 0, 0, 1]);
        let rep = p.power_sum_identity_check(3).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.residuals, vec![0; 4]);
        let ctx5 = f(5);
        assert!(Polynomial::constant(&ctx5, 2).power_sum_identity_check(1).unwrap().holds);
        assert_eq!(Polynomial::zero(&ctx5).power_sum_identity_check(1), Err(PolyError::ZeroPolynomial));
        assert!(matches!(p.power_sum_identity_check(6), Err(PolyError::IndexTooLarge { .. })));
    }

    #[test]
    fn family_examples() {
        let ctx = f(7);
        let i = make_family(&ctx, FamilyVariant::I, Sign::Plus, ctx.elem(0));
        assert_eq!(i.coeffs(), &[1, 0, 0, 1]);
        let ii = make_family(&ctx, FamilyVariant::II, Sign::Plus, ctx.elem(0));
        assert_eq!(ii.coeffs(), &[4, 0, 0, 4]);
        let ctx5 = f(5);
        let m = make_family(&ctx5, FamilyVariant::I, Sign::Minus, ctx5.elem(0));
        assert_eq!(m.coeffs(), &[1, 0, 4]);
        assert_eq!(m.values(), vec![1, 0, 2, 2, 0]);
        // (x-2)^3 + 1 over F_7
        let shifted = make_family(&ctx, FamilyVariant::I, Sign::Plus, ctx.elem(2));
        assert_eq!(shifted, i.shift(5));
    }

    #[test]
    fn family_members_have_disjoint_roots_and_excess() {
        for p in [3, 5, 7, 11, 13, 17] {
            let ctx = f(p);
            for (_, _, _, poly) in all_family_members(&ctx) {
                let r = poly.range_profile();
                assert_eq!(r.roots.len() as u64, ctx.half());
                assert!(r.excess.iter().all(|b| r.roots.binary_search(b).is_err()));
            }
        }
    }

    #[test]
    fn parse_and_display() {
        let p: Polynomial = "p=7; coeffs=[1,0,0,1]".parse().unwrap();
        assert_eq!(p.to_string(), "p=7; coeffs=[1,0,0,1]");
        let q: Polynomial = " p = 5 ;coeffs = [ -1, 0 , 1 ] ;".parse().unwrap();
        assert_eq!(q.coeffs(), &[4, 0, 1]);
        let z: Polynomial = "p=3; coeffs=[]".parse().unwrap();
        assert!(z.is_zero());
        assert!("p=8; coeffs=[1]".parse::<Polynomial>().is_err());
        assert!("p=7 coeffs=[1]".parse::<Polynomial>().is_err());
        assert!("p=7; coeffs=[1,x]".parse::<Polynomial>().is_err());
    }
}
