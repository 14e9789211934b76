//! Sums of the quadratic character over shifted subsets of `F_p`, and the
//! counting lemmas built on them.
//!
//! All thresholds are compared in exact integer arithmetic. Bounds that
//! involve `sqrt(p)` are decided by isolating the square root and squaring
//! both sides; the `f64` values stored in reports are for display only.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::PrimeCtx;
use crate::par;

/// Threshold below which the concentration count is reported, not asserted.
pub const CONCENTRATION_P0: u64 = 7_408_848;
/// Cap on the concentration count above [`CONCENTRATION_P0`].
pub const CONCENTRATION_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharsumError {
    #[error("subset is empty")]
    EmptySubset,
    #[error("element {0} is not a residue mod p")]
    OutOfRange(u64),
    #[error("element {0} appears twice")]
    Duplicate(u64),
    #[error("subset must have {expected} elements, got {got}")]
    WrongSize { expected: usize, got: usize },
    #[error("premise fails: 2^(m-1) * {degree} must be below sqrt({p}) - 1 (m = {m})")]
    PremiseFails { p: u64, m: usize, degree: usize },
    #[error("{t} translates need 4^t < p = {p}")]
    TooManyTranslates { t: usize, p: u64 },
    #[error("proviso fails: {union} points lie in at least r̂ sets but |B| = {b}")]
    ProvisoViolated { union: usize, b: usize },
    #[error("r̂ must lie in 1..={t}, got {r_hat}")]
    BadRHat { r_hat: usize, t: usize },
    #[error("malformed threshold '{0}' (expected e.g. p/7 or 2p/9)")]
    BadThreshold(String),
    #[error("need at least one set")]
    NoSets,
}

fn validate_subset(ctx: &PrimeCtx, subset: &[u64]) -> Result<(), CharsumError> {
    if subset.is_empty() {
        return Err(CharsumError::EmptySubset);
    }
    let mut seen = vec![false; ctx.p() as usize];
    for &c in subset {
        if c >= ctx.p() {
            return Err(CharsumError::OutOfRange(c));
        }
        if std::mem::replace(&mut seen[c as usize], true) {
            return Err(CharsumError::Duplicate(c));
        }
    }
    Ok(())
}

/// A rational multiple `num/den` of `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Threshold {
    pub num: u64,
    pub den: u64,
}

impl Threshold {
    pub const P_OVER_7: Threshold = Threshold { num: 1, den: 7 };

    /// `value >= (num/den) * p`, exactly.
    pub fn reached(&self, value: u64, p: u64) -> bool {
        value as u128 * self.den as u128 >= self.num as u128 * p as u128
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.num, self.den) {
            (1, 1) => write!(f, "p"),
            (1, d) => write!(f, "p/{d}"),
            (n, 1) => write!(f, "{n}p"),
            (n, d) => write!(f, "{n}p/{d}"),
        }
    }
}

impl Serialize for Threshold {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Threshold {
    type Err = CharsumError;

    /// Accepts `p`, `p/7`, `2p/7`, `2*p/7`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CharsumError::BadThreshold(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (lhs, den) = match compact.split_once('/') {
            Some((l, d)) => (l.to_string(), d.parse::<u64>().map_err(|_| bad())?),
            None => (compact.clone(), 1),
        };
        let num_str = lhs.strip_suffix('p').ok_or_else(bad)?.trim_end_matches('*');
        let num = if num_str.is_empty() { 1 } else { num_str.parse::<u64>().map_err(|_| bad())? };
        if den == 0 || num == 0 {
            return Err(bad());
        }
        Ok(Threshold { num, den })
    }
}

/// `T_gamma = sum_{c in C} chi(c - gamma)` for every `gamma`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftProfile {
    pub p: u64,
    pub subset: Vec<u64>,
    pub sums: Vec<i64>,
}

impl ShiftProfile {
    pub fn max_abs(&self) -> u64 {
        self.sums.iter().map(|s| s.unsigned_abs()).max().unwrap_or(0)
    }

    /// Smallest gamma attaining [`ShiftProfile::max_abs`].
    pub fn argmax(&self) -> u64 {
        let m = self.max_abs();
        self.sums.iter().position(|s| s.unsigned_abs() == m).unwrap_or(0) as u64
    }

    pub fn total(&self) -> i64 {
        self.sums.iter().sum()
    }

    /// Shifts with `|T_gamma| >= threshold * p`, in increasing gamma.
    pub fn at_least(&self, threshold: Threshold) -> Vec<(u64, i64)> {
        self.sums
            .iter()
            .enumerate()
            .filter(|(_, s)| threshold.reached(s.unsigned_abs(), self.p))
            .map(|(g, &s)| (g as u64, s))
            .collect()
    }

    pub fn count_at_least(&self, threshold: Threshold) -> usize {
        self.at_least(threshold).len()
    }
}

pub fn shift_profile(ctx: &PrimeCtx, subset: &[u64]) -> Result<ShiftProfile, CharsumError> {
    validate_subset(ctx, subset)?;
    let sums = par::map_range(0..ctx.p(), |g| subset.iter().map(|&c| ctx.chi_diff(c, g) as i64).sum());
    Ok(ShiftProfile { p: ctx.p(), subset: subset.to_vec(), sums })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaClass {
    Qr,
    Qnr,
}

impl GammaClass {
    pub fn of(ctx: &PrimeCtx, gamma: u64) -> Option<Self> {
        match ctx.legendre(gamma) {
            1 => Some(Self::Qr),
            -1 => Some(Self::Qnr),
            _ => None,
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Self::Qr => 1,
            Self::Qnr => -1,
        }
    }
}

/// `|A_{e1,e2}|` with `A_{e1,e2} = {a : chi(a) = e1, chi(a + gamma) = e2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PaleyTable {
    pub p: u64,
    pub class: GammaClass,
    pub gamma: u64,
    pub a_pp: u64,
    pub a_pm: u64,
    pub a_mp: u64,
    pub a_mm: u64,
}

impl PaleyTable {
    pub fn get(&self, e1: i8, e2: i8) -> u64 {
        match (e1, e2) {
            (1, 1) => self.a_pp,
            (1, -1) => self.a_pm,
            (-1, 1) => self.a_mp,
            (-1, -1) => self.a_mm,
            _ => panic!("signs must be ±1"),
        }
    }

    pub fn counts(&self) -> [u64; 4] {
        [self.a_pp, self.a_pm, self.a_mp, self.a_mm]
    }
}

/// Brute-force counts for one shift `gamma != 0`.
pub fn paley_table_for(ctx: &PrimeCtx, gamma: u64) -> Option<PaleyTable> {
    let class = GammaClass::of(ctx, gamma)?;
    let mut n = [[0u64; 2]; 2];
    for a in 0..ctx.p() {
        let (e1, e2) = (ctx.legendre(a), ctx.legendre(ctx.add(a, gamma)));
        if e1 != 0 && e2 != 0 {
            n[(e1 < 0) as usize][(e2 < 0) as usize] += 1;
        }
    }
    Some(PaleyTable {
        p: ctx.p(),
        class,
        gamma,
        a_pp: n[0][0],
        a_pm: n[0][1],
        a_mp: n[1][0],
        a_mm: n[1][1],
    })
}

/// Counts for the least representative of the class.
pub fn paley_table(ctx: &PrimeCtx, class: GammaClass) -> PaleyTable {
    let gamma = (1..ctx.p()).find(|&g| ctx.legendre(g) == class.sign()).expect("both classes are nonempty");
    paley_table_for(ctx, gamma).expect("gamma is nonzero")
}

/// The four counts as published, `[A_{1,1}, A_{1,-1}, A_{-1,1}, A_{-1,-1}]`.
///
/// For `p = 3 mod 4` this lists `(p-3)/4` in all four places, which sums to
/// `p - 3` rather than `p - 2`; see [`paley_closed_form`] for the true counts.
pub fn paley_published_form(p: u64, class: GammaClass) -> [u64; 4] {
    if p % 4 == 3 {
        return [(p - 3) / 4; 4];
    }
    paley_closed_form(p, class)
}

/// Closed-form counts as functions of `p mod 4` and the class of gamma.
pub fn paley_closed_form(p: u64, class: GammaClass) -> [u64; 4] {
    if p % 4 == 3 {
        let (small, big) = ((p - 3) / 4, (p + 1) / 4);
        return match class {
            GammaClass::Qr => [small, big, small, small],
            GammaClass::Qnr => [small, small, big, small],
        };
    }
    let (small, big) = ((p - 5) / 4, (p - 1) / 4);
    match class {
        GammaClass::Qr => [small, big, big, big],
        GammaClass::Qnr => [big, big, big, small],
    }
}

/// Representatives of `class` whose counts differ from `expected`.
pub fn paley_mismatches(ctx: &PrimeCtx, class: GammaClass, expected: [u64; 4]) -> Vec<PaleyTable> {
    (1..ctx.p())
        .filter(|&g| ctx.legendre(g) == class.sign())
        .filter_map(|g| paley_table_for(ctx, g))
        .filter(|t| t.counts() != expected)
        .collect()
}

/// True when every representative of `class` gives the closed-form counts.
pub fn paley_consistent(ctx: &PrimeCtx, class: GammaClass) -> bool {
    let expected = paley_closed_form(ctx.p(), class);
    (1..ctx.p())
        .filter(|&g| ctx.legendre(g) == class.sign())
        .all(|g| paley_table_for(ctx, g).map(|t| t.counts()) == Some(expected))
}

/// At most one large shift, and a cap on the others once the max exceeds `(p-1)/4`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniqueShiftReport {
    pub p: u64,
    /// Every gamma with `|T_gamma| >= (p-1)/4`.
    pub large: Vec<(u64, i64)>,
    pub max_abs: u64,
    pub argmax: u64,
    /// At most one entry in `large`.
    pub clause_a: bool,
    /// `None` unless `max_abs > (p-1)/4`; then whether every other gamma has
    /// `|T_gamma| <= (p-1)/4 - t + 1` with `t = max_abs - (p-1)/4`.
    pub clause_b: Option<bool>,
    /// Some `|T_gamma|` equals `(p-1)/4` exactly, where the strict and
    /// non-strict readings of the threshold differ.
    pub boundary_hit: bool,
    pub holds: bool,
}

pub fn unique_large_shift_check(ctx: &PrimeCtx, subset: &[u64]) -> Result<UniqueShiftReport, CharsumError> {
    let expected = ctx.half() as usize;
    if subset.len() != expected {
        return Err(CharsumError::WrongSize { expected, got: subset.len() });
    }
    let prof = shift_profile(ctx, subset)?;
    let p = ctx.p();
    let large: Vec<(u64, i64)> = prof
        .sums
        .iter()
        .enumerate()
        .filter(|(_, s)| 4 * s.unsigned_abs() >= p - 1)
        .map(|(g, &s)| (g as u64, s))
        .collect();
    let max_abs = prof.max_abs();
    let argmax = prof.argmax();
    let clause_a = large.len() <= 1;
    // (p-1)/4 - t + 1 = (p-1)/2 - max + 1
    let clause_b = (4 * max_abs > p - 1).then(|| {
        prof.sums
            .iter()
            .enumerate()
            .filter(|&(g, _)| g as u64 != argmax)
            .all(|(_, s)| s.unsigned_abs() + max_abs <= (p - 1) / 2 + 1)
    });
    let boundary_hit = prof.sums.iter().any(|s| 4 * s.unsigned_abs() == p - 1);
    let holds = clause_a && clause_b.unwrap_or(true);
    Ok(UniqueShiftReport { p, large, max_abs, argmax, clause_a, clause_b, boundary_hit, holds })
}

/// `(2^(m-1) * total_degree + 1)^2 < p`, i.e. `2^(m-1) deg < sqrt(p) - 1`.
pub fn weil_premise(p: u64, m: usize, total_degree: usize) -> bool {
    if m == 0 || m > 60 {
        return false;
    }
    let lhs = (1u128 << (m - 1)) * total_degree as u128 + 1;
    lhs.checked_mul(lhs).is_some_and(|sq| sq < p as u128)
}

/// `|n - p/2^m| < deg * (sqrt(p) + 1) / 2`, decided exactly.
pub fn weil_bound_holds(p: u64, m: usize, total_degree: usize, n: u64) -> bool {
    let scale = 1i128 << m;
    let dev = (scale * n as i128 - p as i128).abs();
    let k = scale * total_degree as i128;
    // 2 dev < k (sqrt p + 1)  <=>  2 dev - k < k sqrt p
    let lhs = 2 * dev - k;
    lhs < 0 || (lhs as u128).pow(2) < (k as u128).pow(2) * p as u128
}

/// `N(v)` for every sign vector, indexed by bitmask: bit `i` set means `v_i = -1`.
/// Points where some `y + r_i = 0` belong to no pattern.
pub fn sign_pattern_counts(ctx: &PrimeCtx, shifts: &[u64]) -> Vec<u64> {
    let m = shifts.len();
    let mut counts = vec![0u64; 1 << m];
    'y: for y in 0..ctx.p() {
        let mut mask = 0usize;
        for (i, &r) in shifts.iter().enumerate() {
            match ctx.legendre(ctx.add(y, r % ctx.p())) {
                0 => continue 'y,
                -1 => mask |= 1 << i,
                _ => {}
            }
        }
        counts[mask] += 1;
    }
    counts
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignPattern {
    pub v: Vec<i8>,
    pub count: u64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeilReport {
    pub p: u64,
    pub shifts: Vec<u64>,
    pub premise_holds: bool,
    pub expected: f64,
    /// `m (sqrt(p) + 1) / 2`.
    pub bound: f64,
    pub patterns: Vec<SignPattern>,
    pub all_hold: bool,
}

fn check_shifts(ctx: &PrimeCtx, shifts: &[u64]) -> Result<(), CharsumError> {
    if shifts.is_empty() {
        return Err(CharsumError::NoSets);
    }
    validate_subset(ctx, shifts)
}

/// Sign-pattern counts and bound verdicts without enforcing the premise.
pub fn sign_pattern_report(ctx: &PrimeCtx, shifts: &[u64]) -> Result<WeilReport, CharsumError> {
    check_shifts(ctx, shifts)?;
    let (p, m) = (ctx.p(), shifts.len());
    let counts = sign_pattern_counts(ctx, shifts);
    let patterns: Vec<SignPattern> = counts
        .iter()
        .enumerate()
        .map(|(mask, &count)| SignPattern {
            v: (0..m).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect(),
            count,
            holds: weil_bound_holds(p, m, m, count),
        })
        .collect();
    Ok(WeilReport {
        p,
        shifts: shifts.to_vec(),
        premise_holds: weil_premise(p, m, m),
        expected: p as f64 / (1u64 << m) as f64,
        bound: m as f64 * ((p as f64).sqrt() + 1.0) / 2.0,
        all_hold: patterns.iter().all(|s| s.holds),
        patterns,
    })
}

/// Counts for `f_i(y) = y + r_i`, refusing when the premise fails.
pub fn weil_sign_patterns(ctx: &PrimeCtx, shifts: &[u64]) -> Result<WeilReport, CharsumError> {
    check_shifts(ctx, shifts)?;
    let m = shifts.len();
    if !weil_premise(ctx.p(), m, m) {
        return Err(CharsumError::PremiseFails { p: ctx.p(), m, degree: m });
    }
    sign_pattern_report(ctx, shifts)
}

/// `p/2^t + t (sqrt(p) + 1)/2 > size`, decided exactly.
pub fn cell_bound_holds(p: u64, t: usize, size: u64) -> bool {
    let scale = 1i128 << t;
    let k = scale * t as i128;
    // 2^(t+1) size < 2p + 2^t t (sqrt p + 1)  <=>  x < k sqrt p
    let x = 2 * scale * size as i128 - 2 * p as i128 - k;
    x < 0 || (x as u128).pow(2) < (k as u128).pow(2) * p as u128
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellReport {
    pub p: u64,
    pub shifts: Vec<u64>,
    /// Indexed by bitmask `I`: bit `i` set means the cell lies inside `A_i`.
    pub cells: Vec<u64>,
    pub bound: f64,
    pub all_hold: bool,
}

/// `A_i = Q + r_i` with `Q` the nonzero squares.
pub fn in_translate(ctx: &PrimeCtx, a: u64, r: u64) -> bool {
    ctx.legendre(ctx.sub(a, r)) == 1
}

/// Sizes of all `2^t` cells cut out by the translates `Q + r_i`.
pub fn translate_cell_sizes(ctx: &PrimeCtx, shifts: &[u64]) -> Result<CellReport, CharsumError> {
    check_shifts(ctx, shifts)?;
    let (p, t) = (ctx.p(), shifts.len());
    if t >= 32 || (1u64 << (2 * t)) >= p {
        return Err(CharsumError::TooManyTranslates { t, p });
    }
    let mut cells = vec![0u64; 1 << t];
    for a in 0..p {
        let mask = shifts
            .iter()
            .enumerate()
            .filter(|&(_, &r)| in_translate(ctx, a, r))
            .fold(0usize, |m, (i, _)| m | 1 << i);
        cells[mask] += 1;
    }
    Ok(CellReport {
        p,
        shifts: shifts.to_vec(),
        bound: p as f64 / (1u64 << t) as f64 + t as f64 * ((p as f64).sqrt() + 1.0) / 2.0,
        all_hold: cells.iter().all(|&c| cell_bound_holds(p, t, c)),
        cells,
    })
}

/// `min_i |A_i ∩ B|` against the level-set bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinIntersectionReport {
    pub t: usize,
    pub r_hat: usize,
    pub lhs: usize,
    pub argmin: usize,
    /// `t * rhs = sum_{r >= r̂} |H_r| + (r̂ - 1)|B|`, where `H_r` is the set
    /// of points lying in at least `r` of the `A_i`.
    pub rhs_times_t: usize,
    pub rhs: f64,
    /// `|H_r̂|`, which the proviso requires to be at most `|B|`.
    pub proviso_size: usize,
    pub b_size: usize,
    pub holds: bool,
}

/// Sets are lists of distinct `u64` labels over any ground set.
pub fn min_intersection_bound(sets: &[Vec<u64>], b: &[u64], r_hat: usize) -> Result<MinIntersectionReport, CharsumError> {
    use std::collections::{BTreeMap, BTreeSet};
    let t = sets.len();
    if t == 0 {
        return Err(CharsumError::NoSets);
    }
    if r_hat == 0 || r_hat > t {
        return Err(CharsumError::BadRHat { r_hat, t });
    }
    let b: BTreeSet<u64> = b.iter().copied().collect();
    let mut membership: BTreeMap<u64, usize> = BTreeMap::new();
    let mut inter = Vec::with_capacity(t);
    for s in sets {
        let s: BTreeSet<u64> = s.iter().copied().collect();
        inter.push(s.intersection(&b).count());
        for x in s {
            *membership.entry(x).or_default() += 1;
        }
    }
    let mut at_least = vec![0usize; t + 2];
    for &k in membership.values() {
        at_least[k] += 1;
    }
    for r in (0..=t).rev() {
        at_least[r] += at_least[r + 1];
    }
    let proviso_size = at_least[r_hat];
    if proviso_size > b.len() {
        return Err(CharsumError::ProvisoViolated { union: proviso_size, b: b.len() });
    }
    let rhs_times_t = (r_hat..=t).map(|r| at_least[r]).sum::<usize>() + (r_hat - 1) * b.len();
    let (argmin, &lhs) = inter.iter().enumerate().min_by_key(|&(_, v)| *v).expect("t >= 1");
    Ok(MinIntersectionReport {
        t,
        r_hat,
        lhs,
        argmin,
        rhs_times_t,
        rhs: rhs_times_t as f64 / t as f64,
        proviso_size,
        b_size: b.len(),
        holds: lhs * t <= rhs_times_t,
    })
}

/// The translates `Q + r` for each shift.
pub fn qr_translates(ctx: &PrimeCtx, shifts: &[u64]) -> Vec<Vec<u64>> {
    shifts.iter().map(|&r| ctx.residues().into_iter().map(|q| ctx.add(q, r % ctx.p())).collect()).collect()
}

/// `93 (p/256 + 4(sqrt p + 1)) < (p-1)/2`: the cell-bound estimate of the
/// points lying in at least 5 of 8 square translates stays below `|Q|`.
pub fn eight_translate_proviso_holds(p: u64) -> bool {
    // x256: 93p + 95232 sqrt p + 95232 < 128p - 128  <=>  95232 sqrt p < 35p - 95360
    let rhs = 35 * p as i128 - 95_360;
    rhs > 0 && (95_232u128 * 95_232) * (p as u128) < (rhs as u128).saturating_mul(rhs as u128)
}

/// `(140 (p/256 + 4(sqrt p + 1)) + 2(p-1)) / 8 < (9/14)(p-1)/2`: the
/// resulting cap on `min |A_i ∩ Q|` drops below `(9/14)|Q|`.
pub fn eight_translate_min_below_nine_fourteenths(p: u64) -> bool {
    // x1792: 1003520 sqrt p < 44p - 1004544
    let rhs = 44 * p as i128 - 1_004_544;
    rhs > 0 && (1_003_520u128 * 1_003_520) * (p as u128) < (rhs as u128).saturating_mul(rhs as u128)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub p: u64,
    pub threshold: Threshold,
    pub count: usize,
    pub witnesses: Vec<(u64, i64)>,
    /// Whether `count <= 16` is a claim at this `p`.
    pub asserted: bool,
    pub within_cap: bool,
}

/// Counts the shifts with `|T_gamma| >= threshold`.
pub fn concentration_scan(ctx: &PrimeCtx, subset: &[u64], threshold: Threshold) -> Result<ConcentrationReport, CharsumError> {
    let expected = ctx.half() as usize;
    if subset.len() != expected {
        return Err(CharsumError::WrongSize { expected, got: subset.len() });
    }
    let prof = shift_profile(ctx, subset)?;
    let witnesses = prof.at_least(threshold);
    Ok(ConcentrationReport {
        p: ctx.p(),
        threshold,
        count: witnesses.len(),
        within_cap: witnesses.len() <= CONCENTRATION_CAP,
        asserted: ctx.p() > CONCENTRATION_P0,
        witnesses,
    })
}

/// Uniform random subset of `F_p` of the given size, sorted.
pub fn random_subset<R: Rng + ?Sized>(ctx: &PrimeCtx, size: usize, rng: &mut R) -> Vec<u64> {
    let mut v: Vec<u64> = sample(rng, ctx.p() as usize, size).into_iter().map(|i| i as u64).collect();
    v.sort_unstable();
    v
}
