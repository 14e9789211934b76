//! Exhaustive search for reduced polynomials of degree `(p-1)/2` whose
//! lifted values sum to `p`, grouped into orbits under `x -> ax + b`.
//!
//! Two independent strategies are provided:
//!
//! - [`enumerate_naive`] walks every coefficient tuple. It assumes nothing
//!   about the solutions and serves as the oracle.
//! - [`enumerate_rootsets`] only visits `c * prod (x - r)` over root sets
//!   containing 0 with `1 <= c <= (p-1)/2`. Every solution splits into
//!   `(p-1)/2` distinct linear factors, a translation moves one root to 0,
//!   and `x -> n x` with `n` a non-residue flips the sign of the leading
//!   coefficient, so each orbit meets this search space.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::field::PrimeCtx;
use crate::par;
use crate::poly::{all_family_members, make_family, FamilyVariant, PolyError, Polynomial, Sign};

/// Largest prime the coefficient-walking oracle accepts.
pub const NAIVE_MAX_P: u64 = 13;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("naive enumeration supports p <= {NAIVE_MAX_P}, got {0}")]
    NaiveTooLarge(u64),
    #[error("search needs {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("constant polynomials have no orbit representative")]
    ConstantPolynomial,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("leading coefficient {c} outside the normalized range [1, {max}]")]
    LeadingCoeffOutOfRange { c: u64, max: u64 },
    #[error("unsupported option: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    I,
    II,
    Other,
}

impl From<FamilyVariant> for Family {
    fn from(v: FamilyVariant) -> Self {
        match v {
            FamilyVariant::I => Family::I,
            FamilyVariant::II => Family::II,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Naive,
    Rootsets,
}

/// Shifted character sums over the roots and excess multiset of a solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueProfile {
    pub p: u64,
    /// Leading coefficient lifted to `[1, p-1]`.
    pub lc: u64,
    /// `sum_l chi(a_l - gamma)` over the roots, indexed by gamma.
    pub s_roots: Vec<i64>,
    /// `sum_l chi(b_l - gamma)` over the excess multiset.
    pub s_excess: Vec<i64>,
    /// `s_roots - s_excess`.
    pub r: Vec<i64>,
    pub m_c: u64,
    pub m_c_minus_p: u64,
    /// Every `r_gamma` is `c` or `c - p`.
    pub all_in_range: bool,
}

impl ResidueProfile {
    /// `r_gamma in {c, c-p}` everywhere, with `c - p` taken exactly `c` times.
    pub fn cor36_holds(&self) -> bool {
        self.all_in_range && self.m_c_minus_p == self.lc && self.m_c == self.p - self.lc
    }
}

fn require_solution(poly: &Polynomial) -> Result<(), ClassifyError> {
    let h = poly.ctx().half() as usize;
    if poly.degree() != Some(h) {
        return Err(ClassifyError::Precondition(format!(
            "degree must be {h}, got {:?}",
            poly.degree()
        )));
    }
    let sum = poly.range_profile().range_sum;
    if sum != poly.p() {
        return Err(ClassifyError::Precondition(format!("range sum must be {}, got {sum}", poly.p())));
    }
    Ok(())
}

pub fn residue_profile(poly: &Polynomial) -> Result<ResidueProfile, ClassifyError> {
    require_solution(poly)?;
    let ctx = poly.ctx();
    let p = ctx.p();
    let prof = poly.range_profile();
    let lc = poly.leading_coeff();
    let shifted = |pts: &[u64], g: u64| pts.iter().map(|&a| ctx.chi_diff(a, g) as i64).sum::<i64>();
    let s_roots: Vec<i64> = (0..p).map(|g| shifted(&prof.roots, g)).collect();
    let s_excess: Vec<i64> = (0..p).map(|g| shifted(&prof.excess, g)).collect();
    let r: Vec<i64> = s_roots.iter().zip(&s_excess).map(|(a, b)| a - b).collect();
    let (c, cp) = (lc as i64, lc as i64 - p as i64);
    let m_c = r.iter().filter(|&&v| v == c).count() as u64;
    let m_c_minus_p = r.iter().filter(|&&v| v == cp).count() as u64;
    Ok(ResidueProfile {
        p,
        lc,
        all_in_range: m_c + m_c_minus_p == p,
        s_roots,
        s_excess,
        r,
        m_c,
        m_c_minus_p,
    })
}

/// The lexicographically least image under all `x -> ax + b`.
///
/// Images are compared on the leading coefficient first, then on the
/// remaining coefficients from high degree to low.
pub fn canonicalize_orbit(poly: &Polynomial) -> Result<Polynomial, ClassifyError> {
    if poly.is_constant() {
        return Err(ClassifyError::ConstantPolynomial);
    }
    let p = poly.p();
    let mut best: Option<Polynomial> = None;
    for b in 0..p {
        let shifted = poly.shift(b);
        for a in 1..p {
            let img = shifted.dilate(a);
            let better = match &best {
                None => true,
                Some(cur) => img.coeffs().iter().rev().lt(cur.coeffs().iter().rev()),
            };
            if better {
                best = Some(img);
            }
        }
    }
    Ok(best.expect("p >= 3 gives at least one image"))
}

/// Every image of `poly` under the affine group, as coefficient vectors.
pub fn orbit(poly: &Polynomial) -> BTreeSet<Vec<u64>> {
    let p = poly.p();
    let mut out = BTreeSet::new();
    for b in 0..p {
        let shifted = poly.shift(b);
        for a in 1..p {
            out.insert(shifted.dilate(a).coeffs().to_vec());
        }
    }
    out
}

/// Decides which known family, if any, the orbit of `poly` belongs to.
pub fn family_membership(poly: &Polynomial) -> Result<Family, ClassifyError> {
    require_solution(poly)?;
    let ctx = poly.ctx();
    let canon = canonicalize_orbit(poly)?;
    for variant in [FamilyVariant::I, FamilyVariant::II] {
        let rep = make_family(ctx, variant, Sign::Plus, ctx.elem(0));
        if canonicalize_orbit(&rep)? == canon {
            return Ok(variant.into());
        }
    }
    Ok(Family::Other)
}

/// Hash lookup over all `4p` family members.
///
/// The two families are unions of affine orbits, so membership of a single
/// polynomial is the same question as membership of its orbit.
#[derive(Clone, Debug)]
pub struct FamilyIndex {
    members: HashMap<Vec<u64>, FamilyVariant>,
}

impl FamilyIndex {
    pub fn new(ctx: &PrimeCtx) -> Self {
        let mut members = HashMap::new();
        // Variant I first so that it wins where the families coincide (p = 3).
        for (variant, _, _, poly) in all_family_members(ctx) {
            members.entry(poly.coeffs().to_vec()).or_insert(variant);
        }
        Self { members }
    }

    pub fn lookup(&self, poly: &Polynomial) -> Option<FamilyVariant> {
        self.members.get(poly.coeffs()).copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SupportDegree {
    pub degree: usize,
    pub support: usize,
    pub holds: bool,
}

/// `deg P >= |supp P| - 1` for a non-constant `P` with range sum `p`.
pub fn support_degree_check(poly: &Polynomial) -> Result<SupportDegree, ClassifyError> {
    if poly.is_constant() {
        return Err(ClassifyError::ConstantPolynomial);
    }
    let prof = poly.range_profile();
    if prof.range_sum != poly.p() {
        return Err(ClassifyError::Precondition(format!(
            "range sum must be {}, got {}",
            poly.p(),
            prof.range_sum
        )));
    }
    let degree = poly.degree().expect("non-constant");
    let support = prof.support_size();
    Ok(SupportDegree { degree, support, holds: degree + 1 >= support })
}

/// Knobs shared by both strategies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchOptions {
    /// Target range sum is `range_sum_multiple * p`.
    pub range_sum_multiple: u64,
    /// Also scan every degree in `1..(p-1)/2` (naive strategy only).
    pub scan_lower_degrees: bool,
    /// Refuse to start if the candidate count exceeds this.
    pub budget: Option<u128>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { range_sum_multiple: 1, scan_lower_degrees: false, budget: None }
    }
}

impl SearchOptions {
    /// Degrees the naive walk visits. A range-sum multiple above 1 implies
    /// the lower degrees as well, since those solutions need not have
    /// degree `(p-1)/2`.
    fn degrees(&self, h: usize) -> Vec<usize> {
        if self.scan_lower_degrees || self.range_sum_multiple > 1 {
            (1..=h).collect()
        } else {
            vec![h]
        }
    }

    fn check_budget(&self, needed: u128) -> Result<(), ClassifyError> {
        match self.budget {
            Some(budget) if needed > budget => Err(ClassifyError::BudgetExceeded { needed, budget }),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitChecks {
    /// `(p-1)/2` distinct roots.
    pub prop31: bool,
    /// Power-sum identity for `k <= (p-1)/2`.
    pub eq2: bool,
    pub cor36: bool,
    /// `min(c, p - c)`, the leading coefficient after non-residue rescaling.
    pub normalized_lc: u64,
    /// `normalized_lc` is 1 or `(p-1)/2`.
    pub thm37: bool,
    pub support_degree: bool,
}

impl OrbitChecks {
    pub fn compute(poly: &Polynomial) -> Result<Self, ClassifyError> {
        let ctx = poly.ctx();
        let h = ctx.half();
        let prof = poly.range_profile();
        let eq2 = poly.power_sum_identity_check(h as usize)?.holds;
        let cor36 = residue_profile(poly)?.cor36_holds();
        let c = poly.leading_coeff();
        let normalized_lc = c.min(ctx.p() - c);
        Ok(Self {
            prop31: prof.roots.len() as u64 == h,
            eq2,
            cor36,
            normalized_lc,
            thm37: normalized_lc == 1 || normalized_lc == h,
            support_degree: support_degree_check(poly)?.holds,
        })
    }

    /// The checks that hold for every odd prime.
    pub fn unconditional_ok(&self) -> bool {
        self.prop31 && self.eq2 && self.cor36 && self.support_degree
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    /// Leading coefficient of the canonical representative, lifted.
    pub lc: u64,
    pub degree: usize,
    pub roots: Vec<u64>,
    /// Canonical representative, constant term first.
    pub coeffs: Vec<u64>,
    pub orbit_size: usize,
    pub range_sum: u64,
    /// Only set for degree `(p-1)/2` with range sum `p`.
    pub family: Option<Family>,
    pub checks: Option<OrbitChecks>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationResult {
    pub p: u64,
    pub strategy: Strategy,
    pub range_sum: u64,
    pub degrees_scanned: Vec<usize>,
    pub orbits: Vec<OrbitReport>,
    /// Degree-`(p-1)/2`, range-sum-`p` orbits outside both known families.
    pub other_count: usize,
    /// Non-constant solutions found below degree `(p-1)/2`.
    pub lower_degree_count: usize,
    /// Total number of polynomials over all reported orbits.
    pub polynomials_found: usize,
    pub candidates_scanned: u128,
}

impl ClassificationResult {
    /// Canonical coefficient vectors of every orbit.
    pub fn orbit_keys(&self) -> BTreeSet<Vec<u64>> {
        self.orbits.iter().map(|o| o.coeffs.clone()).collect()
    }

    pub fn has_family(&self, f: Family) -> bool {
        self.orbits.iter().any(|o| o.family == Some(f))
    }

    /// Violations of facts that hold for every odd prime. Leading
    /// coefficient constraints are only enforced when no orbit falls
    /// outside the known families.
    pub fn failed_assertions(&self) -> Vec<String> {
        let mut out = Vec::new();
        for o in &self.orbits {
            if let Some(ch) = &o.checks {
                if !ch.unconditional_ok() {
                    out.push(format!("orbit {:?}: structural check failed {ch:?}", o.coeffs));
                }
                if self.other_count == 0 && !ch.thm37 {
                    out.push(format!("orbit {:?}: normalized LC {} not in {{1, (p-1)/2}}", o.coeffs, ch.normalized_lc));
                }
            }
        }
        if self.range_sum == self.p {
            if self.lower_degree_count > 0 {
                out.push(format!("{} non-constant solutions below degree (p-1)/2", self.lower_degree_count));
            }
            if self.p >= 5 && !(self.has_family(Family::I) && self.has_family(Family::II)) {
                out.push("a known family is missing from the search output".into());
            }
        }
        out
    }
}

fn build_result(
    ctx: &PrimeCtx,
    strategy: Strategy,
    opts: &SearchOptions,
    degrees: Vec<usize>,
    found: Vec<Polynomial>,
    candidates: u128,
) -> Result<ClassificationResult, ClassifyError> {
    let p = ctx.p();
    let h = ctx.half() as usize;
    let target = opts.range_sum_multiple * p;
    let canon: Vec<Result<Polynomial, ClassifyError>> = par::map_slice(&found, canonicalize_orbit);
    let mut groups: BTreeMap<Vec<u64>, (Polynomial, usize)> = BTreeMap::new();
    for c in canon {
        let c = c?;
        groups.entry(c.coeffs().to_vec()).or_insert_with(|| (c, 0)).1 += 1;
    }
    let reps: Vec<(Polynomial, usize)> = groups.into_values().collect();
    let fam_canon = if opts.range_sum_multiple == 1 {
        vec![
            (Family::I, canonicalize_orbit(&make_family(ctx, FamilyVariant::I, Sign::Plus, ctx.elem(0)))?),
            (Family::II, canonicalize_orbit(&make_family(ctx, FamilyVariant::II, Sign::Plus, ctx.elem(0)))?),
        ]
    } else {
        Vec::new()
    };
    let reports: Vec<Result<OrbitReport, ClassifyError>> = par::map_slice(&reps, |(rep, hits)| {
        let prof = rep.range_profile();
        let degree = rep.degree().expect("non-constant");
        let size = orbit(rep).len();
        if strategy == Strategy::Naive {
            // The oracle sees whole orbits, never partial ones.
            assert_eq!(*hits, size, "naive search returned a partial orbit");
        }
        let is_solution = degree == h && prof.range_sum == p;
        let family = is_solution.then(|| {
            fam_canon.iter().find(|(_, c)| c == rep).map(|(f, _)| *f).unwrap_or(Family::Other)
        });
        let checks = if is_solution { Some(OrbitChecks::compute(rep)?) } else { None };
        Ok(OrbitReport {
            lc: rep.leading_coeff(),
            degree,
            roots: prof.roots,
            coeffs: rep.coeffs().to_vec(),
            orbit_size: size,
            range_sum: prof.range_sum,
            family,
            checks,
        })
    });
    let orbits = reports.into_iter().collect::<Result<Vec<_>, _>>()?;
    let other_count = orbits.iter().filter(|o| o.family == Some(Family::Other)).count();
    let lower_degree_count = orbits.iter().filter(|o| o.degree < h).map(|o| o.orbit_size).sum();
    let polynomials_found = orbits.iter().map(|o| o.orbit_size).sum();
    Ok(ClassificationResult {
        p,
        strategy,
        range_sum: target,
        degrees_scanned: degrees,
        orbits,
        other_count,
        lower_degree_count,
        polynomials_found,
        candidates_scanned: candidates,
    })
}

/// Number of coefficient tuples the naive walk visits.
pub fn naive_candidate_count(p: u64, degrees: &[usize]) -> u128 {
    degrees.iter().map(|&d| (p as u128 - 1) * (p as u128).pow(d as u32)).sum()
}

/// Walks every coefficient tuple of the requested degrees and keeps those
/// with the target range sum.
pub fn enumerate_naive(ctx: &PrimeCtx, opts: &SearchOptions) -> Result<ClassificationResult, ClassifyError> {
    let p = ctx.p();
    if p > NAIVE_MAX_P {
        return Err(ClassifyError::NaiveTooLarge(p));
    }
    if opts.range_sum_multiple == 0 {
        return Err(ClassifyError::Unsupported("range-sum multiple must be positive".into()));
    }
    let h = ctx.half() as usize;
    let degrees = opts.degrees(h);
    let candidates = naive_candidate_count(p, &degrees);
    opts.check_budget(candidates)?;
    let target = opts.range_sum_multiple * p;

    let mut found = Vec::new();
    for &d in &degrees {
        // Work unit = (leading coefficient, coefficient of x^{d-1}).
        let tops = if d >= 2 { p } else { 1 };
        let units = (p - 1) * tops;
        let hits: Vec<Vec<Vec<u64>>> =
            par::map_range(0..units, |u| naive_unit(ctx, d, 1 + u / tops, u % tops, target));
        found.extend(hits.into_iter().flatten().map(|c| Polynomial::new(ctx, c)));
    }
    build_result(ctx, Strategy::Naive, opts, degrees, found, candidates)
}

fn naive_unit(ctx: &PrimeCtx, d: usize, lead: u64, top: u64, target: u64) -> Vec<Vec<u64>> {
    let p = ctx.p();
    let pu = p as usize;
    // pw[k][x] = x^k
    let mut pw = vec![vec![1u64; pu]; d + 1];
    for k in 1..=d {
        let (lo, hi) = pw.split_at_mut(k);
        for (x, (cur, prev)) in hi[0].iter_mut().zip(&lo[k - 1]).enumerate() {
            *cur = ctx.mul(*prev, x as u64);
        }
    }
    let mut coeffs = vec![0u64; d + 1];
    coeffs[d] = lead;
    if d >= 2 {
        coeffs[d - 1] = top;
    }
    let mut base: Vec<u64> = (0..pu)
        .map(|x| {
            let mut v = ctx.mul(lead, pw[d][x]);
            if d >= 2 {
                v = ctx.add(v, ctx.mul(top, pw[d - 1][x]));
            }
            v
        })
        .collect();
    let mut out = Vec::new();
    // Odometer over a_1..a_{d-2}; a_0 is the innermost loop.
    loop {
        for a0 in 0..p {
            let mut sum = 0u64;
            let mut ok = true;
            for &v in &base {
                sum += ctx.add(v, a0);
                if sum > target {
                    ok = false;
                    break;
                }
            }
            if ok && sum == target {
                let mut c = coeffs.clone();
                c[0] = a0;
                out.push(c);
            }
        }
        let mut k = 1;
        loop {
            if k + 1 >= d {
                return out;
            }
            coeffs[k] += 1;
            for x in 0..pu {
                base[x] = ctx.add(base[x], pw[k][x]);
            }
            if coeffs[k] < p {
                break;
            }
            coeffs[k] = 0;
            k += 1;
        }
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of (root set, leading coefficient) pairs the root-set search visits.
pub fn rootset_candidate_count(p: u64, lc_count: u64) -> u128 {
    let h = (p - 1) / 2;
    binomial(p - 1, h - 1) * lc_count as u128
}

/// Root-set search over all normalized leading coefficients `1..=(p-1)/2`.
pub fn enumerate_rootsets(ctx: &PrimeCtx, opts: &SearchOptions) -> Result<ClassificationResult, ClassifyError> {
    let lcs: Vec<u64> = (1..=ctx.half()).collect();
    enumerate_rootsets_with(ctx, &lcs, opts)
}

/// Root-set search restricted to the given leading coefficients, each of
/// which must lie in `[1, (p-1)/2]`.
pub fn enumerate_rootsets_with(
    ctx: &PrimeCtx,
    lcs: &[u64],
    opts: &SearchOptions,
) -> Result<ClassificationResult, ClassifyError> {
    let h = ctx.half();
    if let Some(&c) = lcs.iter().find(|&&c| c == 0 || c > h) {
        return Err(ClassifyError::LeadingCoeffOutOfRange { c, max: h });
    }
    if opts.range_sum_multiple != 1 {
        return Err(ClassifyError::Unsupported(
            "root-set search relies on the range sum being exactly p; use the naive strategy".into(),
        ));
    }
    if opts.scan_lower_degrees {
        return Err(ClassifyError::Unsupported("lower-degree scan needs the naive strategy".into()));
    }
    let p = ctx.p();
    let candidates = rootset_candidate_count(p, lcs.len() as u64);
    opts.check_budget(candidates)?;

    let prefixes = rootset_prefixes(p, (h - 1) as usize);
    let hits: Vec<Vec<(u64, Vec<u64>)>> =
        par::map_slice(&prefixes, |prefix| rootset_unit(ctx, prefix, lcs));
    let found = hits
        .into_iter()
        .flatten()
        .map(|(c, roots)| Polynomial::from_roots(ctx, c, &roots))
        .collect();
    build_result(ctx, Strategy::Rootsets, opts, vec![h as usize], found, candidates)
}

/// Work units: every increasing choice of the first `min(2, need)` nonzero roots.
fn rootset_prefixes(p: u64, need: usize) -> Vec<Vec<u64>> {
    match need {
        0 => vec![vec![]],
        1 => (1..p).map(|a| vec![a]).collect(),
        _ => (1..p)
            .flat_map(|a| (a + 1..p).map(move |b| vec![a, b]))
            .filter(|v| (p - 1 - v[1]) as usize >= need - 2)
            .collect(),
    }
}

fn rootset_unit(ctx: &PrimeCtx, prefix: &[u64], lcs: &[u64]) -> Vec<(u64, Vec<u64>)> {
    let p = ctx.p();
    let need = (ctx.half() - 1) as usize;
    let mut roots = vec![0u64];
    roots.extend_from_slice(prefix);
    let prod: Vec<u64> = (0..p)
        .map(|x| roots.iter().fold(1u64, |acc, &r| ctx.mul(acc, ctx.sub(x, r))))
        .collect();
    let mut out = Vec::new();
    let start = prefix.last().map_or(1, |&l| l + 1);
    rootset_dfs(ctx, start, need - prefix.len(), &prod, &mut roots, lcs, &mut out);
    out
}

fn rootset_dfs(
    ctx: &PrimeCtx,
    start: u64,
    remaining: usize,
    prod: &[u64],
    roots: &mut Vec<u64>,
    lcs: &[u64],
    out: &mut Vec<(u64, Vec<u64>)>,
) {
    let p = ctx.p();
    if remaining == 0 {
        for &c in lcs {
            let mut sum = 0u64;
            let mut ok = true;
            for &v in prod {
                sum += ctx.mul(c, v);
                if sum > p {
                    ok = false;
                    break;
                }
            }
            if ok && sum == p {
                out.push((c, roots.clone()));
            }
        }
        return;
    }
    let mut next = vec![0u64; prod.len()];
    let last = p - remaining as u64;
    for r in start..=last {
        for (x, (n, &v)) in next.iter_mut().zip(prod).enumerate() {
            *n = ctx.mul(v, ctx.sub(x as u64, r));
        }
        roots.push(r);
        rootset_dfs(ctx, r + 1, remaining - 1, &next, roots, lcs, out);
        roots.pop();
    }
}

/// Runs the requested strategy.
pub fn classify(ctx: &PrimeCtx, strategy: Strategy, opts: &SearchOptions) -> Result<ClassificationResult, ClassifyError> {
    match strategy {
        Strategy::Naive => enumerate_naive(ctx, opts),
        Strategy::Rootsets => enumerate_rootsets(ctx, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Sign;

    fn f(p: u64) -> PrimeCtx {
        PrimeCtx::new(p).unwrap()
    }

    fn poly(ctx: &PrimeCtx, c: &[u64]) -> Polynomial {
        Polynomial::new(ctx, c.to_vec())
    }

    #[test]
    fn residue_profile_examples() {
        let ctx = f(7);
        let rp = residue_profile(&poly(&ctx, &[1, 0, 0, 1])).unwrap();
        assert_eq!(rp.s_roots[0], -3);
        assert_eq!(rp.s_excess[0], 3);
        assert_eq!(rp.r[0], -6);
        assert_eq!((rp.m_c_minus_p, rp.m_c), (1, 6));
        assert!(rp.cor36_holds());
        let rp2 = residue_profile(&poly(&ctx, &[4, 0, 0, 4])).unwrap();
        assert_eq!(rp2.lc, 4);
        assert_eq!((rp2.m_c_minus_p, rp2.m_c), (4, 3));
        assert!(rp2.cor36_holds());
        assert!(matches!(residue_profile(&poly(&ctx, &[1, 1])), Err(ClassifyError::Precondition(_))));
        assert!(matches!(residue_profile(&poly(&ctx, &[0, 0, 0, 1])), Err(ClassifyError::Precondition(_))));
    }

    #[test]
    fn canonicalize_examples() {
        let ctx = f(7);
        let p = poly(&ctx, &[1, 0, 0, 1]);
        let shifted = p.shift(2);
        assert_eq!(canonicalize_orbit(&p).unwrap(), canonicalize_orbit(&shifted).unwrap());
        let neg = poly(&ctx, &[1, 0, 0, 6]);
        assert_eq!(p.substitute_raw(3, 0), neg);
        assert_eq!(canonicalize_orbit(&p).unwrap(), canonicalize_orbit(&neg).unwrap());
        assert_eq!(canonicalize_orbit(&Polynomial::constant(&ctx, 3)), Err(ClassifyError::ConstantPolynomial));
    }

    #[test]
    fn canonicalize_is_idempotent() {
        use rand::{Rng, SeedableRng};
        let ctx = f(13);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let d = rng.gen_range(1..13);
            let mut c: Vec<u64> = (0..d).map(|_| rng.gen_range(0..13)).collect();
            c.push(rng.gen_range(1..13));
            let q = poly(&ctx, &c);
            let once = canonicalize_orbit(&q).unwrap();
            assert_eq!(canonicalize_orbit(&once).unwrap(), once);
            let moved = q.substitute_raw(rng.gen_range(1..13), rng.gen_range(0..13));
            assert_eq!(canonicalize_orbit(&moved).unwrap(), once);
        }
    }

    #[test]
    fn family_membership_examples() {
        let ctx = f(7);
        assert_eq!(family_membership(&poly(&ctx, &[1, 0, 0, 1])).unwrap(), Family::I);
        assert_eq!(family_membership(&poly(&ctx, &[4, 0, 0, 4])).unwrap(), Family::II);
        let m = make_family(&ctx, FamilyVariant::I, Sign::Plus, ctx.elem(2));
        assert_eq!(family_membership(&m).unwrap(), Family::I);
        let idx = FamilyIndex::new(&ctx);
        assert_eq!(idx.len(), 28);
        assert_eq!(idx.lookup(&m), Some(FamilyVariant::I));
    }

    #[test]
    fn support_degree_examples() {
        let ctx = f(7);
        let s = support_degree_check(&poly(&ctx, &[1, 0, 0, 1])).unwrap();
        assert_eq!((s.support, s.degree, s.holds), (4, 3, true));
        let s2 = support_degree_check(&poly(&ctx, &[4, 0, 0, 4])).unwrap();
        assert_eq!((s2.support, s2.degree, s2.holds), (4, 3, true));
        assert_eq!(support_degree_check(&Polynomial::constant(&ctx, 1)), Err(ClassifyError::ConstantPolynomial));
    }

    #[test]
    fn naive_small_primes() {
        let r5 = enumerate_naive(&f(5), &SearchOptions::default()).unwrap();
        assert_eq!(r5.orbits.len(), 2);
        assert_eq!(r5.other_count, 0);
        assert!(r5.has_family(Family::I) && r5.has_family(Family::II));
        assert!(r5.failed_assertions().is_empty());

        let r3 = enumerate_naive(&f(3), &SearchOptions::default()).unwrap();
        assert_eq!(r3.orbits.len(), 1);
        assert_eq!(r3.polynomials_found, 6);
        assert_eq!(r3.orbits[0].family, Some(Family::I));

        let r7 = enumerate_naive(&f(7), &SearchOptions::default()).unwrap();
        let keys = r7.orbit_keys();
        let c = |v: &[u64]| canonicalize_orbit(&poly(&f(7), v)).unwrap().coeffs().to_vec();
        assert!(keys.contains(&c(&[1, 0, 0, 1])));
        assert!(keys.contains(&c(&[4, 0, 0, 4])));
    }

    #[test]
    fn naive_rejects_large_p_and_budget() {
        assert_eq!(
            enumerate_naive(&f(17), &SearchOptions::default()).unwrap_err(),
            ClassifyError::NaiveTooLarge(17)
        );
        let opts = SearchOptions { budget: Some(10), ..Default::default() };
        assert!(matches!(enumerate_naive(&f(7), &opts), Err(ClassifyError::BudgetExceeded { .. })));
        assert!(matches!(enumerate_rootsets(&f(7), &opts), Err(ClassifyError::BudgetExceeded { .. })));
    }

    #[test]
    fn rootsets_match_naive_at_seven() {
        let ctx = f(7);
        let a = enumerate_naive(&ctx, &SearchOptions::default()).unwrap();
        let b = enumerate_rootsets(&ctx, &SearchOptions::default()).unwrap();
        assert_eq!(a.orbit_keys(), b.orbit_keys());
        assert_eq!(a.polynomials_found, b.polynomials_found);
    }

    #[test]
    fn rootsets_reject_unnormalized_lc() {
        let ctx = f(7);
        let err = enumerate_rootsets_with(&ctx, &[4], &SearchOptions::default()).unwrap_err();
        assert_eq!(err, ClassifyError::LeadingCoeffOutOfRange { c: 4, max: 3 });
        assert!(enumerate_rootsets_with(&ctx, &[0], &SearchOptions::default()).is_err());
    }

    #[test]
    fn range_sum_multiple_two_at_seven() {
        let ctx = f(7);
        let opts = SearchOptions { range_sum_multiple: 2, ..Default::default() };
        let r = enumerate_naive(&ctx, &opts).unwrap();
        let keys = r.orbit_keys();
        // (x-1)(x-2) + 1 and (x-1)(x-2) + 2
        for add in [1, 2] {
            let base = Polynomial::from_roots(&ctx, 1, &[1, 2]);
            let q = Polynomial::new(&ctx, vec![ctx.add(base.coeff(0), add), base.coeff(1), base.coeff(2)]);
            assert_eq!(q.range_profile().range_sum, 14);
            assert!(keys.contains(canonicalize_orbit(&q).unwrap().coeffs()));
        }
        assert!(r.orbits.iter().all(|o| o.range_sum == 14));
    }

    #[test]
    fn lower_degree_scan_finds_nothing() {
        for p in [5, 7, 11] {
            let opts = SearchOptions { scan_lower_degrees: true, ..Default::default() };
            let r = enumerate_naive(&f(p), &opts).unwrap();
            assert_eq!(r.lower_degree_count, 0, "p={p}");
        }
    }

    #[test]
    fn sequential_matches_parallel() {
        let ctx = f(11);
        let par_run = enumerate_rootsets(&ctx, &SearchOptions::default()).unwrap();
        let seq_run = par::sequential(|| enumerate_rootsets(&ctx, &SearchOptions::default()).unwrap());
        assert_eq!(par_run, seq_run);
    }

    #[test]
    fn candidate_counts() {
        assert_eq!(naive_candidate_count(13, &[6]), 12 * 13u128.pow(6));
        assert_eq!(rootset_candidate_count(23, 11), binomial(22, 10) * 11);
        assert_eq!(binomial(22, 10), 646_646);
    }
}
