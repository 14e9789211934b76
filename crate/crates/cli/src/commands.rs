use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use redeilab::charsum::{self, GammaClass, Threshold};
use redeilab::classify::{self, FamilyIndex, OrbitChecks, SearchOptions, Strategy};
use redeilab::fourier;
use redeilab::geometry::{self, PointSet};
use redeilab::{Polynomial, PrimeCtx};

use crate::args::{CharsumOp, Cli, Command, DirectionsOp, StrategyArg};
use crate::report::Output;

const PLANCHEREL_REL_TOL: f64 = 1e-8;

pub fn run(cli: &Cli) -> Result<Output> {
    let seed = cli.global.seed;
    match &cli.command {
        Command::Classify { p, strategy, scan_lower_degrees, range_sum_multiple } => {
            let opts = SearchOptions {
                range_sum_multiple: *range_sum_multiple,
                scan_lower_degrees: *scan_lower_degrees,
                budget: cli.global.budget,
            };
            let strategy = match strategy {
                Some(StrategyArg::Naive) => Strategy::Naive,
                Some(StrategyArg::Rootsets) => Strategy::Rootsets,
                None if *scan_lower_degrees || *range_sum_multiple > 1 => Strategy::Naive,
                None => Strategy::Rootsets,
            };
            classify_cmd(&field(*p)?, strategy, &opts)
        }
        Command::Charsum { op } => charsum_cmd(op, seed),
        Command::Directions { op } => directions_cmd(op, seed),
        Command::Fourier { p, points, ls } => {
            let s = match (points, ls) {
                (Some(path), _) => read_points(path)?,
                (None, true) => geometry::ls_set(&field(p.ok_or_else(|| anyhow!("--ls needs --p"))?)?),
                (None, false) => bail!("give --points FILE or --ls"),
            };
            if let Some(p) = p {
                if *p != s.p() {
                    bail!("--p {p} disagrees with the point file header p={}", s.p());
                }
            }
            fourier_cmd(&s)
        }
        Command::Poly { poly } => poly_cmd(&poly.parse::<Polynomial>()?),
    }
}

fn field(p: u64) -> Result<PrimeCtx> {
    Ok(PrimeCtx::new(p)?)
}

fn read_points(path: &Path) -> Result<PointSet> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    PointSet::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn join<T: ToString>(v: &[T], sep: &str) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

fn classify_cmd(ctx: &PrimeCtx, strategy: Strategy, opts: &SearchOptions) -> Result<Output> {
    let r = classify::classify(ctx, strategy, opts)?;
    let rows = r
        .orbits
        .iter()
        .map(|o| {
            vec![
                join(&o.coeffs, " "),
                o.degree.to_string(),
                o.lc.to_string(),
                o.orbit_size.to_string(),
                o.range_sum.to_string(),
                o.family.map(|f| format!("{f:?}").to_lowercase()).unwrap_or_default(),
            ]
        })
        .collect();
    let mut out = Output::new(&r)?.table(vec!["coeffs", "degree", "lc", "orbit_size", "range_sum", "family"], rows);
    out.failures.extend(r.failed_assertions());
    Ok(out)
}

fn charsum_cmd(op: &CharsumOp, seed: u64) -> Result<Output> {
    match op {
        CharsumOp::Paley { p } => {
            let ctx = field(*p)?;
            let mut tables = Vec::new();
            let mut rows = Vec::new();
            let mut failures = Vec::new();
            for class in [GammaClass::Qr, GammaClass::Qnr] {
                let t = charsum::paley_table(&ctx, class);
                let closed = charsum::paley_closed_form(*p, class);
                let published = charsum::paley_published_form(*p, class);
                let mismatches = charsum::paley_mismatches(&ctx, class, closed);
                if !mismatches.is_empty() {
                    failures.push(format!("{class:?}: {} representatives differ from the closed form", mismatches.len()));
                }
                rows.push(
                    [format!("{class:?}").to_lowercase(), t.gamma.to_string()]
                        .into_iter()
                        .chain(t.counts().iter().map(u64::to_string))
                        .chain([(t.counts() == published).to_string()])
                        .collect(),
                );
                tables.push(json!({
                    "table": t,
                    "closed_form": closed,
                    "published_form": published,
                    "matches_published": t.counts() == published,
                    "all_representatives_agree": mismatches.is_empty(),
                }));
            }
            let mut out = Output::new(json!({"p": p, "op": "paley", "classes": tables}))?.table(
                vec!["class", "gamma", "a_pp", "a_pm", "a_mp", "a_mm", "matches_published"],
                rows,
            );
            out.failures = failures;
            Ok(out)
        }
        CharsumOp::Weil { p, shifts } => {
            let ctx = field(*p)?;
            let r = charsum::sign_pattern_report(&ctx, shifts)?;
            let rows = r
                .patterns
                .iter()
                .map(|s| {
                    let v: String = s.v.iter().map(|&e| if e > 0 { '+' } else { '-' }).collect();
                    vec![v, s.count.to_string(), s.holds.to_string()]
                })
                .collect();
            let mut out = Output::new(&r)?.table(vec!["signs", "count", "holds"], rows);
            // the bound is only a claim when the premise holds
            out.check(!r.premise_holds || r.all_hold, || "sign-pattern bound violated".into());
            Ok(out)
        }
        CharsumOp::Cells { p, shifts } => {
            let ctx = field(*p)?;
            let r = charsum::translate_cell_sizes(&ctx, shifts)?;
            let t = shifts.len();
            let rows = r
                .cells
                .iter()
                .enumerate()
                .map(|(mask, &size)| {
                    let inside: String = (0..t).map(|i| if mask >> i & 1 == 1 { '1' } else { '0' }).collect();
                    vec![inside, size.to_string(), charsum::cell_bound_holds(*p, t, size).to_string()]
                })
                .collect();
            let mut out = Output::new(&r)?.table(vec!["inside", "size", "holds"], rows);
            out.check(r.all_hold, || "cell bound violated".into());
            Ok(out)
        }
        CharsumOp::Minint { p, shifts, r_hat } => {
            let ctx = field(*p)?;
            let sets = charsum::qr_translates(&ctx, shifts);
            let r = charsum::min_intersection_bound(&sets, &ctx.residues(), *r_hat)?;
            let row = vec![vec![
                r.t.to_string(),
                r.r_hat.to_string(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.proviso_size.to_string(),
                r.b_size.to_string(),
                r.holds.to_string(),
            ]];
            let body = json!({
                "p": p,
                "shifts": shifts,
                "bound": r,
                "eight_translate_proviso": charsum::eight_translate_proviso_holds(*p),
                "min_below_nine_fourteenths": charsum::eight_translate_min_below_nine_fourteenths(*p),
            });
            let mut out =
                Output::new(body)?.table(vec!["t", "r_hat", "lhs", "rhs", "proviso_size", "b_size", "holds"], row);
            out.check(r.holds, || "min-intersection bound violated".into());
            Ok(out)
        }
        CharsumOp::Scan { p, subset, threshold } => {
            let ctx = field(*p)?;
            let threshold: Threshold = threshold.parse()?;
            let subsets = subsets_from(&ctx, subset, seed)?;
            let mut reports = Vec::new();
            for s in &subsets {
                reports.push(charsum::concentration_scan(&ctx, s, threshold)?);
            }
            let rows = reports
                .iter()
                .enumerate()
                .flat_map(|(i, r)| r.witnesses.iter().map(move |(g, s)| vec![i.to_string(), g.to_string(), s.to_string()]))
                .collect();
            let failures: Vec<String> = reports
                .iter()
                .enumerate()
                .filter(|(_, r)| r.asserted && !r.within_cap)
                .map(|(i, r)| format!("subset {i}: {} shifts at or above {}", r.count, r.threshold))
                .collect();
            let body = if let [r] = reports.as_slice() {
                let mut v = serde_json::to_value(r)?;
                v["op"] = json!("concentration_scan");
                v["subset"] = json!(subset);
                v
            } else {
                json!({
                    "p": p,
                    "op": "concentration_scan",
                    "subset": subset,
                    "threshold": threshold,
                    "asserted": reports.iter().any(|r| r.asserted),
                    "max_count": reports.iter().map(|r| r.count).max(),
                    "scans": reports,
                })
            };
            let mut out = Output::new(body)?.table(vec!["subset", "gamma", "sum"], rows);
            out.failures = failures;
            Ok(out)
        }
    }
}

fn subsets_from(ctx: &PrimeCtx, spec: &str, seed: u64) -> Result<Vec<Vec<u64>>> {
    if spec == "qr" {
        return Ok(vec![ctx.residues()]);
    }
    if let Some(n) = spec.strip_prefix("random:") {
        let n: usize = n.parse().with_context(|| format!("bad subset count '{n}'"))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        return Ok((0..n).map(|_| charsum::random_subset(ctx, ctx.half() as usize, &mut rng)).collect());
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        let v = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u64>().with_context(|| format!("bad element '{t}' in {path}")))
            .collect::<Result<Vec<_>>>()?;
        return Ok(vec![v]);
    }
    bail!("subset must be qr, random:N or file:PATH, got '{spec}'")
}

fn slope_rows(rep: &geometry::DirectionReport) -> Vec<Vec<String>> {
    rep.slopes
        .iter()
        .map(|s| {
            vec![
                s.slope.to_string(),
                s.determined.to_string(),
                s.degree.map(|d| d.to_string()).unwrap_or_default(),
                s.lc.to_string(),
                serde_json::to_value(s.class).unwrap().as_str().unwrap_or_default().to_string(),
                join(&s.coeffs, " "),
            ]
        })
        .collect()
}

const SLOPE_HEADERS: [&str; 6] = ["slope", "determined", "degree", "lc", "class", "coeffs"];

fn directions_cmd(op: &DirectionsOp, seed: u64) -> Result<Output> {
    match op {
        DirectionsOp::Analyze { p, points } => {
            let s = match (points, p) {
                (Some(path), _) => read_points(path)?,
                (None, Some(p)) => {
                    let ctx = field(*p)?;
                    geometry::random_point_set(&ctx, *p as usize, true, &mut ChaCha8Rng::seed_from_u64(seed))?
                }
                (None, None) => bail!("give --points FILE or --p P"),
            };
            let rep = geometry::analyze(&s)?;
            let body = json!({"points": s.points(), "report": rep});
            let mut out = Output::new(body)?.table(SLOPE_HEADERS.to_vec(), slope_rows(&rep));
            out.check(rep.size as u64 != rep.p || rep.partition_holds, || {
                "determined directions and constant-one slopes do not add up to p + 1".into()
            });
            Ok(out)
        }
        DirectionsOp::Ls { p } => {
            let ctx = field(*p)?;
            let l = geometry::ls_set(&ctx);
            let rep = geometry::analyze(&l)?;
            let census = geometry::census_of(&rep);
            let degree = geometry::direction_degree_check(&l)?;
            let expected = (*p as usize + 3) / 2;
            let body = json!({
                "p": p,
                "size": l.len(),
                "direction_count": rep.direction_count,
                "expected_direction_count": expected,
                "census": census,
                "degree_bound": degree,
                "report": rep,
            });
            let mut out = Output::new(body)?.table(SLOPE_HEADERS.to_vec(), slope_rows(&rep));
            out.check(rep.direction_count == expected, || format!("{} directions, expected {expected}", rep.direction_count));
            out.check(census.holds, || "slope census differs from the expected counts".into());
            out.check(degree.holds, || "degree bound violated".into());
            Ok(out)
        }
        DirectionsOp::Census { p } => {
            let census = geometry::ls_profile_census(&field(*p)?);
            let row = vec![vec![
                census.p.to_string(),
                census.direction_count.to_string(),
                census.constants.to_string(),
                census.family_i.to_string(),
                census.family_ii.to_string(),
                census.other.to_string(),
                census.holds.to_string(),
            ]];
            let mut out = Output::new(&census)?
                .table(vec!["p", "directions", "constants", "family_i", "family_ii", "other", "holds"], row);
            out.check(census.holds, || "slope census differs from the expected counts".into());
            Ok(out)
        }
        DirectionsOp::Check { p, points, random } => {
            let sets: Vec<PointSet> = match (points, p) {
                (Some(path), _) => vec![read_points(path)?],
                (None, Some(p)) => {
                    let ctx = field(*p)?;
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    (0..*random)
                        .map(|_| geometry::random_point_set(&ctx, *p as usize, true, &mut rng))
                        .collect::<Result<_, _>>()?
                }
                (None, None) => bail!("give --points FILE or --p P"),
            };
            let mut trials = Vec::new();
            let mut rows = Vec::new();
            let mut failures = Vec::new();
            for (i, s) in sets.iter().enumerate() {
                let d = geometry::direction_degree_check(s)?;
                let min = (s.p() as usize + 3) / 2;
                let many = s.is_collinear() || d.direction_count >= min;
                if !d.holds || !many {
                    failures.push(format!("set {i}: {} directions, tightest {:?}", d.direction_count, d.tightest));
                }
                rows.push(vec![
                    i.to_string(),
                    d.direction_count.to_string(),
                    d.tightest.map(|t| t.1.to_string()).unwrap_or_default(),
                    d.holds.to_string(),
                    many.to_string(),
                ]);
                trials.push(json!({"degree_bound": d, "at_least_half_plus": many}));
            }
            let body = json!({
                "p": sets.first().map(PointSet::p),
                "trials": sets.len(),
                "passed": sets.len() - failures.len(),
                "results": trials,
            });
            let mut out = Output::new(body)?
                .table(vec!["set", "directions", "max_degree", "degree_bound", "at_least_half_plus"], rows);
            out.failures = failures;
            Ok(out)
        }
    }
}

fn fourier_cmd(s: &PointSet) -> Result<Output> {
    let p = s.p();
    if s.len() as u64 != p {
        bail!("|S| = {} but p = {p}; the spectrum checks need exactly p points", s.len());
    }
    let spec = fourier::spectrum_with(s, &FamilyIndex::new(s.ctx()));
    let laws = fourier::magnitude_laws(&spec);
    let count = fourier::gauss_count(s);
    let rows = spec
        .directions
        .iter()
        .map(|d| {
            vec![
                d.slope.to_string(),
                serde_json::to_value(d.class).unwrap().as_str().unwrap_or_default().to_string(),
                format!("{:.6}", d.p_mag),
                d.poly_lc.to_string(),
            ]
        })
        .collect();
    let body = json!({
        "p": p,
        "size": spec.size,
        "trivial": spec.trivial,
        "plancherel_sum": spec.plancherel_sum,
        "plancherel_residual": spec.plancherel_residual,
        "directions": spec.directions,
        "magnitude_laws": laws,
        "gauss_count": count.as_ref().ok(),
        "gauss_count_error": count.as_ref().err().map(ToString::to_string),
        "exploratory": p <= 9,
    });
    let mut out = Output::new(body)?.table(vec!["slope", "class", "p_mag", "poly_lc"], rows);
    out.check(spec.plancherel_residual < PLANCHEREL_REL_TOL * p as f64, || {
        format!("Plancherel residual {:e}", spec.plancherel_residual)
    });
    out.check(laws.all_hold, || "a direction breaks its magnitude law".into());
    if let Ok(c) = &count {
        out.check(!c.asserted || c.gap_is_two, || format!("gap {} != 2", c.gap));
    }
    Ok(out)
}

fn poly_cmd(poly: &Polynomial) -> Result<Output> {
    let h = poly.ctx().half() as usize;
    let prof = poly.range_profile();
    let solution = poly.degree() == Some(h) && prof.range_sum == poly.p();
    let checks = if solution { Some(OrbitChecks::compute(poly)?) } else { None };
    let body = json!({
        "p": poly.p(),
        "text": poly.to_string(),
        "coeffs": poly.coeffs(),
        "degree": poly.degree(),
        "leading_coeff": poly.leading_coeff(),
        "range": prof,
        "power_sums": poly.power_sum_identity_check(h.min(poly.p() as usize - 2)).ok(),
        "solution": solution,
        "residue_profile": classify::residue_profile(poly).ok(),
        "family": classify::family_membership(poly).ok(),
        "canonical": classify::canonicalize_orbit(poly).ok().map(|c| c.coeffs().to_vec()),
        "checks": checks,
    });
    let row = vec![vec![poly.to_string(), format!("{:?}", poly.degree()), prof.range_sum.to_string(), solution.to_string()]];
    let mut out = Output::new(body)?.table(vec!["poly", "degree", "range_sum", "solution"], row);
    if let Some(c) = checks {
        out.check(c.unconditional_ok(), || format!("structural checks failed: {c:?}"));
    }
    Ok(out)
}
