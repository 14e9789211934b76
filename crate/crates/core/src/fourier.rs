//! Fourier coefficients of indicator functions on `F_p^2`.
//!
//! Normalization: `f^(xi) = (1/p) sum_x f(x) conj(xi(x))` with
//! `xi_v(x) = exp(2 pi i <x, v> / p)`. Under it the coefficients of an
//! indicator of `p` points satisfy `sum_xi |f^(xi)|^2 = p`, and the trivial
//! character carries `|S| / p`.
//!
//! The `p^2 - 1` nontrivial characters split into `p + 1` directions. For
//! slope `m` the direction is spanned by `v0 = (-m, 1)`, so `<x, lambda v0>`
//! is `lambda` times the intercept of the line `y = mx + i` through `x`; for
//! the vertical direction `v0 = (1, 0)`. Hence
//! `p f^(xi_{lambda v0}) = sum_i count(i) sigma^(-lambda i)`, one length-`p`
//! sum per character, computed from the line counts.

use std::f64::consts::TAU;

use serde::Serialize;
use thiserror::Error;

use crate::classify::FamilyIndex;
use crate::geometry::{self, PointSet, Slope, SlopeClass};
use crate::par;

/// Absolute tolerance on `p |f^|` for the magnitude laws.
pub const MAGNITUDE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FourierError {
    #[error("set has {got} points; the direction argument needs exactly {p}")]
    WrongCardinality { p: u64, got: usize },
    #[error("set determines {got} directions, expected {expected}")]
    DirectionCount { expected: usize, got: usize },
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
}

/// `cos` and `sin` of `2 pi k / p` for `k < p`.
#[derive(Clone, Debug)]
pub struct Twiddles {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Twiddles {
    pub fn new(p: u64) -> Self {
        let (cos, sin) = (0..p).map(|k| (TAU * k as f64 / p as f64).sin_cos()).map(|(s, c)| (c, s)).unzip();
        Self { cos, sin }
    }

    /// `|sum_i w_i sigma^(-lambda i)|` for integer weights.
    pub fn magnitude(&self, weights: &[u64], lambda: u64) -> f64 {
        let p = self.cos.len() as u64;
        let (mut re, mut im) = (0.0, 0.0);
        for (i, &w) in weights.iter().enumerate() {
            if w != 0 {
                let k = (lambda * i as u64 % p) as usize;
                re += w as f64 * self.cos[k];
                im -= w as f64 * self.sin[k];
            }
        }
        re.hypot(im)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MagnitudeClass {
    /// `p |f^| = 0`.
    Zero,
    /// `p |f^| = sqrt(p)`.
    Gauss,
    /// `p |f^|` in `[p/2 - sqrt(p)/2, p/2 + sqrt(p)/2]`.
    Heavy,
    Other,
}

impl MagnitudeClass {
    pub fn of(p: u64, p_mag: f64) -> Self {
        let (pf, r) = (p as f64, (p as f64).sqrt());
        if p_mag < MAGNITUDE_TOL {
            Self::Zero
        } else if (p_mag - r).abs() <= MAGNITUDE_TOL {
            Self::Gauss
        } else if p_mag >= pf / 2.0 - r / 2.0 - MAGNITUDE_TOL && p_mag <= pf / 2.0 + r / 2.0 + MAGNITUDE_TOL {
            Self::Heavy
        } else {
            Self::Other
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirectionSpectrum {
    pub slope: Slope,
    pub class: MagnitudeClass,
    /// Largest `p |f^|` over the direction.
    pub p_mag: f64,
    /// Largest minus smallest `p |f^|` over the direction.
    pub spread: f64,
    /// Lifted leading coefficient of the projection polynomial.
    pub poly_lc: u64,
    pub poly_class: SlopeClass,
    /// Whether every line of the direction meets the set equally often.
    pub counts_constant: bool,
    /// `p |f^(xi_{lambda v0})|` for `lambda = 1..p`.
    #[serde(skip)]
    pub p_mags: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub p: u64,
    pub size: usize,
    /// `|f^|` at the trivial character, `|S| / p`.
    pub trivial: f64,
    pub directions: Vec<DirectionSpectrum>,
    pub plancherel_sum: f64,
    pub plancherel_residual: f64,
}

impl SpectrumReport {
    /// `|f^(xi_v)|` read back from the direction grouping.
    pub fn magnitude_at(&self, v: (u64, u64)) -> f64 {
        let p = self.p;
        let (v1, v2) = (v.0 % p, v.1 % p);
        if (v1, v2) == (0, 0) {
            return self.trivial;
        }
        // v = lambda (-m, 1) or lambda (1, 0)
        let (slope, lambda) = if v2 != 0 {
            let inv = crate::field::pow_mod(v2, p - 2, p);
            (Slope::Finite((p - v1) % p * inv % p), v2)
        } else {
            (Slope::Infinite, v1)
        };
        self.directions[slope.index(p)].p_mags[lambda as usize - 1] / p as f64
    }

    pub fn count_class(&self, class: MagnitudeClass) -> usize {
        self.directions.iter().filter(|d| d.class == class).count()
    }
}

pub fn spectrum(s: &PointSet) -> SpectrumReport {
    spectrum_with(s, &FamilyIndex::new(s.ctx()))
}

pub fn spectrum_with(s: &PointSet, index: &FamilyIndex) -> SpectrumReport {
    let p = s.p();
    let tw = Twiddles::new(p);
    let directions = par::map_slice(&Slope::all(p), |&m| {
        let counts = geometry::projection_counts(s, m);
        let poly = geometry::projection_polynomial(s, m);
        let p_mags: Vec<f64> = (1..p).map(|l| tw.magnitude(&counts, l)).collect();
        let max = p_mags.iter().copied().fold(0.0, f64::max);
        let min = p_mags.iter().copied().fold(f64::INFINITY, f64::min);
        DirectionSpectrum {
            slope: m,
            class: MagnitudeClass::of(p, max),
            p_mag: max,
            spread: max - min,
            poly_lc: poly.leading_coeff(),
            poly_class: geometry::classify_projection(index, &poly),
            counts_constant: counts.windows(2).all(|w| w[0] == w[1]),
            p_mags,
        }
    });
    let pf = p as f64;
    let trivial = s.len() as f64 / pf;
    let plancherel_sum = trivial * trivial
        + directions.iter().flat_map(|d| d.p_mags.iter()).map(|x| (x / pf) * (x / pf)).sum::<f64>();
    SpectrumReport {
        p,
        size: s.len(),
        trivial,
        plancherel_residual: (plancherel_sum - s.len() as f64).abs(),
        plancherel_sum,
        directions,
    }
}

/// The magnitude law a direction should obey, read off its projection polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    /// Constant line counts: zero.
    Zero,
    /// First family: `sqrt(p)`.
    Gauss,
    /// Second family: within `sqrt(p)/2` of `p/2`.
    Heavy,
    /// None of the above.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirectionVerdict {
    pub slope: Slope,
    pub expected: Expectation,
    pub normalized_lc: u64,
    pub p_mag: f64,
    /// `None` when `expected` is `Unknown`.
    pub holds: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MagnitudeLawReport {
    pub p: u64,
    pub verdicts: Vec<DirectionVerdict>,
    pub unknown: usize,
    pub all_hold: bool,
}

fn verdict(p: u64, d: &DirectionSpectrum) -> DirectionVerdict {
    let expected = if d.counts_constant {
        Expectation::Zero
    } else {
        match d.poly_class {
            SlopeClass::FamilyI => Expectation::Gauss,
            SlopeClass::FamilyII => Expectation::Heavy,
            _ => Expectation::Unknown,
        }
    };
    let (pf, r) = (p as f64, (p as f64).sqrt());
    let ok = |x: f64| match expected {
        Expectation::Zero => x.abs() <= MAGNITUDE_TOL,
        Expectation::Gauss => (x - r).abs() <= MAGNITUDE_TOL,
        Expectation::Heavy => x >= pf / 2.0 - r / 2.0 - MAGNITUDE_TOL && x <= pf / 2.0 + r / 2.0 + MAGNITUDE_TOL,
        Expectation::Unknown => true,
    };
    DirectionVerdict {
        slope: d.slope,
        expected,
        normalized_lc: d.poly_lc.min(p - d.poly_lc),
        p_mag: d.p_mag,
        holds: (expected != Expectation::Unknown).then(|| d.p_mags.iter().all(|&x| ok(x))),
    }
}

pub fn magnitude_laws(spec: &SpectrumReport) -> MagnitudeLawReport {
    let verdicts: Vec<DirectionVerdict> = spec.directions.iter().map(|d| verdict(spec.p, d)).collect();
    MagnitudeLawReport {
        p: spec.p,
        unknown: verdicts.iter().filter(|v| v.expected == Expectation::Unknown).count(),
        all_hold: verdicts.iter().all(|v| v.holds != Some(false)),
        verdicts,
    }
}

pub fn magnitude_law_check(s: &PointSet) -> MagnitudeLawReport {
    magnitude_laws(&spectrum(s))
}

/// Directions with magnitude `sqrt(p)` against the direction count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GaussCount {
    pub p: u64,
    pub direction_count: usize,
    pub m: usize,
    /// `(p+3)/2 - m`.
    pub gap: i64,
    /// Whether `gap == 2` is a claim at this `p` (it is for `p > 9`).
    pub asserted: bool,
    pub gap_is_two: bool,
}

pub fn gauss_count(s: &PointSet) -> Result<GaussCount, FourierError> {
    let p = s.p();
    if s.len() as u64 != p {
        return Err(FourierError::WrongCardinality { p, got: s.len() });
    }
    let expected = (p as usize + 3) / 2;
    let got = geometry::direction_set(s)?.len();
    if got != expected {
        return Err(FourierError::DirectionCount { expected, got });
    }
    let laws = magnitude_law_check(s);
    let m = laws.verdicts.iter().filter(|v| v.expected == Expectation::Gauss).count();
    let gap = expected as i64 - m as i64;
    Ok(GaussCount { p, direction_count: got, m, gap, asserted: p > 9, gap_is_two: gap == 2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeCtx;
    use crate::geometry::ls_set;

    fn f(p: u64) -> PrimeCtx {
        PrimeCtx::new(p).unwrap()
    }

    /// Direct double sum over the plane, for every `v`.
    fn naive(s: &PointSet) -> Vec<f64> {
        let p = s.p();
        let mut out = Vec::new();
        for v1 in 0..p {
            for v2 in 0..p {
                let (mut re, mut im) = (0.0f64, 0.0f64);
                for x in 0..p {
                    for y in 0..p {
                        if s.contains((x, y)) {
                            let ang = TAU * ((x * v1 + y * v2) % p) as f64 / p as f64;
                            re += ang.cos();
                            im -= ang.sin();
                        }
                    }
                }
                out.push(re.hypot(im) / p as f64);
            }
        }
        out
    }

    #[test]
    fn matches_naive_transform() {
        for p in [7, 11, 13] {
            let s = ls_set(&f(p));
            let rep = spectrum(&s);
            let direct = naive(&s);
            for v1 in 0..p {
                for v2 in 0..p {
                    let a = rep.magnitude_at((v1, v2));
                    let b = direct[(v1 * p + v2) as usize];
                    assert!((a - b).abs() < 1e-9, "p={p} v=({v1},{v2}) {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn ls_spectrum_p7() {
        let rep = spectrum(&ls_set(&f(7)));
        assert!(rep.plancherel_residual < 1e-9 * 7.0);
        assert_eq!(rep.count_class(MagnitudeClass::Zero), 3);
        assert_eq!(rep.count_class(MagnitudeClass::Gauss), 3);
        assert_eq!(rep.count_class(MagnitudeClass::Heavy), 2);
        for d in &rep.directions {
            assert!(d.spread < 1e-9);
            if d.counts_constant {
                assert!(d.p_mag < 1e-12);
            }
        }
        let laws = magnitude_laws(&rep);
        assert!(laws.all_hold);
        assert_eq!(laws.unknown, 0);
    }

    #[test]
    fn line_spectrum() {
        let ctx = f(7);
        let s = PointSet::new(&ctx, (0..7).map(|x| (x, 0)).collect()).unwrap();
        let rep = spectrum(&s);
        let nonzero: Vec<_> = rep.directions.iter().filter(|d| d.p_mag > 1e-9).map(|d| d.slope).collect();
        assert_eq!(nonzero, vec![Slope::Finite(0)]);
        assert!((rep.directions[0].p_mag - 7.0).abs() < 1e-9);
        assert!(rep.plancherel_residual < 1e-9);
    }

    #[test]
    fn gauss_count_examples() {
        for (p, m) in [(11, 5), (13, 6)] {
            let g = gauss_count(&ls_set(&f(p))).unwrap();
            assert_eq!((g.m, g.gap), (m, 2));
            assert!(g.asserted);
        }
        let g7 = gauss_count(&ls_set(&f(7))).unwrap();
        assert!(!g7.asserted);
        let empty = PointSet::new(&f(7), vec![]).unwrap();
        assert_eq!(gauss_count(&empty), Err(FourierError::WrongCardinality { p: 7, got: 0 }));
    }
}
