//! Point sets in the affine plane over `F_p`, their directions and
//! projection polynomials.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::classify::FamilyIndex;
use crate::field::{FieldError, PrimeCtx};
use crate::par;
use crate::poly::{interpolate, FamilyVariant, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("point ({0}, {1}) is not in the plane")]
    OutOfRange(u64, u64),
    #[error("point ({0}, {1}) appears twice")]
    Duplicate(u64, u64),
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("set must have {expected} points, got {got}")]
    WrongCardinality { expected: usize, got: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cannot draw {n} points from a plane of {total}")]
    TooManyPoints { n: usize, total: u64 },
    #[error("linear part is singular")]
    Singular,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A direction: finite slope `m` (lines `y = mx + i`) or vertical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slope {
    Finite(u64),
    Infinite,
}

impl Slope {
    /// `0..p` followed by `Infinite`, the order used by every report.
    pub fn all(p: u64) -> Vec<Slope> {
        (0..p).map(Slope::Finite).chain([Slope::Infinite]).collect()
    }

    /// Position in [`Slope::all`].
    pub fn index(self, p: u64) -> usize {
        match self {
            Slope::Finite(m) => m as usize,
            Slope::Infinite => p as usize,
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(m) => write!(f, "{m}"),
            Slope::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Slope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Distinct points of `AG(2, p)`, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    ctx: PrimeCtx,
    points: Vec<(u64, u64)>,
}

impl PointSet {
    pub fn new(ctx: &PrimeCtx, mut points: Vec<(u64, u64)>) -> Result<Self, GeometryError> {
        let p = ctx.p();
        if let Some(&(x, y)) = points.iter().find(|&&(x, y)| x >= p || y >= p) {
            return Err(GeometryError::OutOfRange(x, y));
        }
        points.sort_unstable();
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(GeometryError::Duplicate(w[0].0, w[0].1));
        }
        Ok(Self { ctx: ctx.clone(), points })
    }

    pub fn ctx(&self) -> &PrimeCtx {
        &self.ctx
    }

    pub fn p(&self) -> u64 {
        self.ctx.p()
    }

    pub fn points(&self) -> &[(u64, u64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, pt: (u64, u64)) -> bool {
        self.points.binary_search(&pt).is_ok()
    }

    /// Image under `v -> M v + t` with `M = [[a, b], [c, d]]`.
    pub fn transform(&self, m: [[u64; 2]; 2], t: (u64, u64)) -> Result<Self, GeometryError> {
        let f = &self.ctx;
        let det = f.sub(f.mul(m[0][0], m[1][1]), f.mul(m[0][1], m[1][0]));
        if det == 0 {
            return Err(GeometryError::Singular);
        }
        let pts = self
            .points
            .iter()
            .map(|&(x, y)| {
                (
                    f.add(f.add(f.mul(m[0][0], x), f.mul(m[0][1], y)), t.0 % f.p()),
                    f.add(f.add(f.mul(m[1][0], x), f.mul(m[1][1], y)), t.1 % f.p()),
                )
            })
            .collect();
        Self::new(f, pts)
    }

    /// True when all points lie on one line (or there are fewer than 3).
    pub fn is_collinear(&self) -> bool {
        direction_mask(self).iter().filter(|&&b| b).count() <= 1
    }

    /// The point-file format: a `p=<prime>` header, then one `x,y` per line.
    pub fn to_file_string(&self) -> String {
        let mut s = format!("p={}\n", self.p());
        for (x, y) in &self.points {
            s.push_str(&format!("{x},{y}\n"));
        }
        s
    }

    /// Parses the point-file format. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, GeometryError> {
        let mut ctx: Option<PrimeCtx> = None;
        let mut pts = Vec::new();
        let mut seen = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |msg: String| GeometryError::Parse { line, msg };
            let s = raw.split('#').next().unwrap_or("").trim();
            if s.is_empty() {
                continue;
            }
            let Some(f) = &ctx else {
                let v = s
                    .strip_prefix("p=")
                    .or_else(|| s.strip_prefix("p ="))
                    .ok_or_else(|| err(format!("expected header p=<prime>, found '{s}'")))?;
                let p: u64 = v.trim().parse().map_err(|_| err(format!("bad prime '{}'", v.trim())))?;
                ctx = Some(PrimeCtx::new(p).map_err(|e| err(e.to_string()))?);
                continue;
            };
            let (a, b) = s.split_once(',').ok_or_else(|| err(format!("expected x,y, found '{s}'")))?;
            let parse = |t: &str| -> Result<u64, GeometryError> {
                let v: i64 = t.trim().parse().map_err(|_| err(format!("bad coordinate '{}'", t.trim())))?;
                Ok(v.rem_euclid(f.p() as i64) as u64)
            };
            let pt = (parse(a)?, parse(b)?);
            if !seen.insert(pt) {
                return Err(err(format!("duplicate point ({}, {})", pt.0, pt.1)));
            }
            pts.push(pt);
        }
        let ctx = ctx.ok_or(GeometryError::Parse { line: 0, msg: "missing p=<prime> header".into() })?;
        Self::new(&ctx, pts)
    }
}

/// Slope of the line through two distinct points, `dy/dx`.
pub fn slope_between(ctx: &PrimeCtx, a: (u64, u64), b: (u64, u64)) -> Slope {
    let dx = ctx.sub(b.0, a.0);
    let dy = ctx.sub(b.1, a.1);
    match ctx.inv(dx) {
        Some(inv) => Slope::Finite(ctx.mul(dy, inv)),
        None => Slope::Infinite,
    }
}

fn direction_mask(s: &PointSet) -> Vec<bool> {
    let p = s.p();
    let mut mask = vec![false; p as usize + 1];
    let pts = s.points();
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i + 1..] {
            mask[slope_between(&s.ctx, a, b).index(p)] = true;
        }
    }
    mask
}

/// All slopes determined by pairs of points.
pub fn direction_set(s: &PointSet) -> Result<BTreeSet<Slope>, GeometryError> {
    if s.len() < 2 {
        return Err(GeometryError::TooFewPoints(s.len()));
    }
    let all = Slope::all(s.p());
    Ok(direction_mask(s).into_iter().zip(all).filter(|(b, _)| *b).map(|(_, m)| m).collect())
}

/// Integer number of points on each line `y = mx + i` (or `x = i`), by `i`.
pub fn projection_counts(s: &PointSet, slope: Slope) -> Vec<u64> {
    let f = &s.ctx;
    let mut counts = vec![0u64; f.p() as usize];
    for &(x, y) in s.points() {
        let i = match slope {
            Slope::Finite(m) => f.sub(y, f.mul(m, x)),
            Slope::Infinite => x,
        };
        counts[i as usize] += 1;
    }
    counts
}

/// Interpolates the line counts, reduced mod `p`.
pub fn projection_polynomial(s: &PointSet, slope: Slope) -> Polynomial {
    let p = s.p();
    let vals: Vec<u64> = projection_counts(s, slope).into_iter().map(|c| c % p).collect();
    interpolate(&s.ctx, &vals).expect("one value per field element")
}

/// The union of the two square half-axes and the origin.
pub fn ls_set(ctx: &PrimeCtx) -> PointSet {
    let q = ctx.residues();
    let pts: Vec<(u64, u64)> =
        q.iter().map(|&x| (0, x)).chain(q.iter().map(|&x| (x, 0))).chain([(0, 0)]).collect();
    let s = PointSet::new(ctx, pts).expect("distinct points");
    assert_eq!(s.len() as u64, ctx.p());
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SlopeClass {
    Constant,
    #[serde(rename = "family-i")]
    FamilyI,
    #[serde(rename = "family-ii")]
    FamilyII,
    Other,
}

pub fn classify_projection(index: &FamilyIndex, poly: &Polynomial) -> SlopeClass {
    if poly.is_constant() {
        return SlopeClass::Constant;
    }
    match index.lookup(poly) {
        Some(FamilyVariant::I) => SlopeClass::FamilyI,
        Some(FamilyVariant::II) => SlopeClass::FamilyII,
        None => SlopeClass::Other,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlopeReport {
    pub slope: Slope,
    pub determined: bool,
    /// Projection polynomial, constant term first.
    pub coeffs: Vec<u64>,
    pub degree: Option<usize>,
    pub lc: u64,
    pub class: SlopeClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirectionReport {
    pub p: u64,
    pub size: usize,
    pub directions: Vec<Slope>,
    pub direction_count: usize,
    pub slopes: Vec<SlopeReport>,
    /// Slopes whose projection polynomial is the constant 1.
    pub constant_one: usize,
    /// `direction_count + constant_one == p + 1`; only meaningful when `size == p`.
    pub partition_holds: bool,
}

impl DirectionReport {
    pub fn count_class(&self, class: SlopeClass) -> usize {
        self.slopes.iter().filter(|s| s.class == class).count()
    }
}

pub fn analyze(s: &PointSet) -> Result<DirectionReport, GeometryError> {
    analyze_with(s, &FamilyIndex::new(s.ctx()))
}

/// [`analyze`] with a prebuilt family index, for repeated calls at one `p`.
pub fn analyze_with(s: &PointSet, index: &FamilyIndex) -> Result<DirectionReport, GeometryError> {
    let dirs = direction_set(s)?;
    let p = s.p();
    let slopes = par::map_slice(&Slope::all(p), |&m| {
        let poly = projection_polynomial(s, m);
        SlopeReport {
            slope: m,
            determined: dirs.contains(&m),
            coeffs: poly.coeffs().to_vec(),
            degree: poly.degree(),
            lc: poly.leading_coeff(),
            class: classify_projection(index, &poly),
        }
    });
    let constant_one = slopes.iter().filter(|r| r.coeffs == [1]).count();
    Ok(DirectionReport {
        p,
        size: s.len(),
        direction_count: dirs.len(),
        partition_holds: dirs.len() + constant_one == p as usize + 1,
        directions: dirs.into_iter().collect(),
        slopes,
        constant_one,
    })
}

/// `|D| >= d + 2` for every projection polynomial of degree `1 <= d <= p-2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeBoundReport {
    pub p: u64,
    pub direction_count: usize,
    /// Slope with the largest qualifying degree, and that degree.
    pub tightest: Option<(Slope, usize)>,
    pub slack: Option<i64>,
    pub holds: bool,
}

pub fn direction_degree_check(s: &PointSet) -> Result<DegreeBoundReport, GeometryError> {
    let p = s.p();
    if s.len() as u64 != p {
        return Err(GeometryError::WrongCardinality { expected: p as usize, got: s.len() });
    }
    let dirs = direction_set(s)?.len();
    let degrees = par::map_slice(&Slope::all(p), |&m| (m, projection_polynomial(s, m).degree()));
    let tightest = degrees
        .into_iter()
        .filter_map(|(m, d)| d.filter(|&d| d >= 1 && d as u64 <= p - 2).map(|d| (m, d)))
        .fold(None, |best: Option<(Slope, usize)>, cur| match best {
            Some(b) if b.1 >= cur.1 => Some(b),
            _ => Some(cur),
        });
    let slack = tightest.map(|(_, d)| dirs as i64 - d as i64 - 2);
    Ok(DegreeBoundReport { p, direction_count: dirs, tightest, slack, holds: slack.is_none_or(|s| s >= 0) })
}

/// Slope classes of the projection polynomials of [`ls_set`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LsCensus {
    pub p: u64,
    pub direction_count: usize,
    pub constants: usize,
    pub family_i: usize,
    pub family_ii: usize,
    pub other: usize,
    pub expected_constants: usize,
    pub expected_family_i: usize,
    pub expected_family_ii: usize,
    /// `(p - 1) - (p + 3)/2`, two fewer than `expected_constants`; kept for
    /// comparison since the two counts are sometimes quoted interchangeably.
    pub alt_constant_count: i64,
    pub alt_matches: bool,
    pub holds: bool,
}

pub fn ls_profile_census(ctx: &PrimeCtx) -> LsCensus {
    census_of(&analyze(&ls_set(ctx)).expect("p >= 3 points"))
}

pub fn census_of(rep: &DirectionReport) -> LsCensus {
    let p = rep.p as usize;
    let (constants, family_i, family_ii, other) = (
        rep.count_class(SlopeClass::Constant),
        rep.count_class(SlopeClass::FamilyI),
        rep.count_class(SlopeClass::FamilyII),
        rep.count_class(SlopeClass::Other),
    );
    let expected_constants = (p - 1) / 2;
    let expected_family_ii = 2;
    let expected_family_i = (p + 3) / 2 - 2;
    let alt = (p as i64 - 1) - (p as i64 + 3) / 2;
    LsCensus {
        p: rep.p,
        direction_count: rep.direction_count,
        constants,
        family_i,
        family_ii,
        other,
        expected_constants,
        expected_family_i,
        expected_family_ii,
        alt_constant_count: alt,
        alt_matches: alt == constants as i64,
        holds: rep.direction_count == (p + 3) / 2
            && constants == expected_constants
            && family_ii == expected_family_ii
            && family_i == expected_family_i
            && other == 0,
    }
}

/// Uniform `n`-subset of the plane; with `non_collinear`, redraws until the
/// points do not all lie on one line.
pub fn random_point_set<R: Rng + ?Sized>(
    ctx: &PrimeCtx,
    n: usize,
    non_collinear: bool,
    rng: &mut R,
) -> Result<PointSet, GeometryError> {
    let p = ctx.p();
    let total = p * p;
    if n as u64 > total || (non_collinear && n < 3) {
        return Err(GeometryError::TooManyPoints { n, total });
    }
    loop {
        let pts = sample(rng, total as usize, n).into_iter().map(|k| (k as u64 / p, k as u64 % p)).collect();
        let s = PointSet::new(ctx, pts)?;
        if !non_collinear || !s.is_collinear() {
            return Ok(s);
        }
    }
}
