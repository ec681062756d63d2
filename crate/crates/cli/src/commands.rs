use clap::{Args, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use kobalt::c01::{
    build_lattice_map, f_lower, f_upper, lattice_gaps, metric_interval, mu, mu_curvature, ConstantsConfig, DiskRegion,
};
use kobalt::domains::{parse_complex, punctured_disk_metric, Domain};
use kobalt::holo::{parse_with, Bindings, HoloFunction};
use kobalt::kobayashi::{estimate_distance, metric_from_distance, OptimizerBudget};
use kobalt::poincare::omega_at;
use kobalt::rescaling::{
    disc_samples, distance_to_roots_of_unity, exponential_family, rescaling_sequence_demo, root_trick, verify_two_bound,
    zalcman_rescale, RescalingConfig, SHRINK,
};
use kobalt::theorems::{
    bounded_domain_escape, equivalence_witnesses, landau_radius, picard_circle_budget, schottky_budget,
    schottky_sample_check, ApproachPoint, EquivalenceSampling, ModulusBound,
};

use crate::error::{invalid, CliError};
use crate::report::{num, Check, Outcome, Table};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Settings shared by every command.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Context {
    pub seed: u64,
    pub constants: ConstantsConfig,
}

fn complex(s: &str) -> Result<Complex64, String> {
    parse_complex(s)
}

fn binding(s: &str) -> Result<(String, Complex64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("'{s}' is not of the form name=value"))?;
    Ok((name.trim().to_string(), parse_complex(value)?))
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive, got {x}")))
    }
}

fn at_least(name: &str, n: usize, min: usize) -> Result<(), CliError> {
    if n >= min {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be at least {min}, got {n}")))
    }
}

/// An expression with `name=value` parameters.
#[derive(Debug, Clone, Args, Serialize)]
pub struct FunctionArgs {
    /// Expression in z, e.g. `exp(n*(z+2))`.
    #[arg(long = "f")]
    pub f: String,
    /// Parameter binding `name=value`, repeatable.
    #[arg(long = "set", value_parser = binding)]
    pub set: Vec<(String, Complex64)>,
}

impl FunctionArgs {
    fn function(&self) -> Result<HoloFunction, CliError> {
        let bindings: Bindings = self.set.iter().cloned().collect();
        Ok(HoloFunction::from(parse_with(&self.f, &bindings)?))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OmegaArgs {
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub z: Complex64,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub w: Complex64,
}

pub fn omega(a: &OmegaArgs) -> Result<Outcome, CliError> {
    Ok(Outcome::default().with("omega", omega_at(a.z, a.w)?))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DistanceArgs {
    /// Domain, e.g. `disk`, `punctured-disk`, `annulus:0.3`, `c01`, `plane-minus:0,1,2i`.
    #[arg(long)]
    pub domain: String,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub p: Complex64,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub q: Complex64,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 4)]
    pub max_links: usize,
    #[arg(long, default_value_t = 400)]
    pub evals: usize,
}

pub fn distance(a: &DistanceArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let domain: Domain = a.domain.parse()?;
    at_least("restarts", a.restarts, 1)?;
    at_least("max-links", a.max_links, 1)?;
    at_least("evals", a.evals, 1)?;
    let budget = OptimizerBudget { restarts: a.restarts, max_links: a.max_links, evals_per_restart: a.evals, seed: ctx.seed };
    let est = estimate_distance(&domain, a.p, a.q, &budget, &ctx.constants)?;
    let exact = domain.exact_distance(a.p, a.q)?;
    let ordered = est.lower <= est.upper + 1e-9 * (1.0 + est.upper);
    let chain = match &est.validation {
        Some(v) => Check::new("upper witness validates", v.valid, format!("{} samples, clearance {:e}", v.samples, v.min_clearance)),
        None => Check::new("upper witness validates", est.p == est.q, "no chain was found"),
    };
    Ok(Outcome::from_result(&est)
        .with("exact", exact)
        .check(Check::new("lower <= upper", ordered, format!("{} <= {}", est.lower, est.upper)))
        .check(chain))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MetricArgs {
    #[arg(long)]
    pub domain: String,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub z: Complex64,
    #[arg(long, value_parser = complex, allow_hyphen_values = true, default_value = "1")]
    pub v: Complex64,
    /// Step of the difference quotient `d(z, z + h·v)/h` reported beside the exact value.
    #[arg(long, default_value_t = 1e-6)]
    pub h: f64,
}

pub fn metric(a: &MetricArgs, ctx: &Context) -> Result<Outcome, CliError> {
    positive("h", a.h)?;
    let domain: Domain = a.domain.parse()?;
    domain.require(a.z)?;
    if let Some(exact) = domain.exact_metric(a.z, a.v)? {
        let quotient = metric_from_distance(&domain, a.z, a.v, a.h)?;
        let rel = (quotient / exact - 1.0).abs();
        return Ok(Outcome::default()
            .with("lower", exact)
            .with("upper", exact)
            .with("exact", exact)
            .with("difference_quotient", quotient)
            .check(Check::new("difference quotient matches", rel <= 1e-3, format!("relative error {rel:e}"))));
    }
    if matches!(domain.canonical(), Domain::TwicePuncturedPlane) {
        let m = metric_interval(a.z, a.v, &ctx.constants)?;
        return Ok(Outcome::default()
            .with("lower", m.lower)
            .with("upper", m.upper)
            .with("exact", Option::<f64>::None)
            .check(Check::new("lower <= upper", m.lower <= m.upper, format!("{} <= {}", m.lower, m.upper))));
    }
    Err(invalid(format!("no metric is available on {domain}; use `distance` for bounds")))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LandauArgs {
    /// Value f(0).
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub a: Complex64,
    /// Derivative f′(0).
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub b: Complex64,
}

pub fn landau(a: &LandauArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let r = landau_radius(a.a, a.b, &ctx.constants)?;
    Ok(Outcome::from_result(&r)
        .check(Check::new("lower <= upper", r.lower <= r.upper, format!("{} <= {}", r.lower, r.upper)))
        .check(Check::new("affine witness reaches 0 or 1", r.affine_witness_hits(), "a + b·z on |z| < upper")))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SchottkyArgs {
    #[arg(long, default_value = "disk")]
    pub domain: String,
    /// Centre of the family: every f has f(0) within distance R of it.
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub a: Complex64,
    #[arg(long = "R")]
    pub family_radius: f64,
    #[arg(long)]
    pub r: f64,
    /// Random maps for the sampled check; 0 skips it.
    #[arg(long, default_value_t = 200)]
    pub maps: usize,
}

pub fn schottky(a: &SchottkyArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let domain: Domain = a.domain.parse()?;
    let budget = schottky_budget(a.a, a.family_radius, a.r, &domain, &ctx.constants)?;
    let mut out = Outcome::from_result(&budget);
    let sampled = matches!(budget.bound, ModulusBound::Exact { .. } | ModulusBound::Finite { .. });
    if a.maps > 0 && sampled {
        let c = schottky_sample_check(&budget, &domain, a.maps, ctx.seed)?;
        out = out
            .check(Check::new("sampled maps stay below the bound", c.passed, format!("max |f| = {} over {} points", c.max_modulus, c.points)))
            .with("sample_check", c);
    }
    Ok(out)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PicardCircleArgs {
    #[arg(long)]
    pub r: f64,
    #[arg(long = "R", default_value_t = 0.0)]
    pub family_radius: f64,
}

pub fn picard_circle(a: &PicardCircleArgs) -> Result<Outcome, CliError> {
    Ok(Outcome::from_result(&picard_circle_budget(a.r, a.family_radius)?))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RescaleArgs {
    /// Expression to rescale once. Without it the family exp(n·z) is run.
    #[arg(long = "f")]
    pub f: Option<String>,
    #[arg(long = "set", value_parser = binding)]
    pub set: Vec<(String, Complex64)>,
    /// Last member of the exp(n·z) family.
    #[arg(long, default_value_t = 10)]
    pub n_max: u32,
    #[arg(long, default_value_t = 201)]
    pub resolution: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
}

pub fn rescale(a: &RescaleArgs) -> Result<Outcome, CliError> {
    at_least("resolution", a.resolution, 2)?;
    at_least("samples", a.samples, 2)?;
    let cfg = RescalingConfig { resolution: a.resolution, samples: a.samples };
    if let Some(f) = &a.f {
        let f = FunctionArgs { f: f.clone(), set: a.set.clone() }.function()?;
        let step = zalcman_rescale(&f, &cfg)?;
        let two = verify_two_bound(&step, cfg.samples)?;
        let norm = (step.normalization - 1.0).abs();
        return Ok(Outcome::from_result(&step)
            .check(Check::new("normalisation", norm <= 1e-10, format!("|(f∘r)′(0)| − 1 = {norm:e}")))
            .check(Check::new("two-bound", two.passed, format!("sup {} over {} samples", two.sup, two.samples)))
            .with("two_bound", two));
    }
    at_least("n-max", a.n_max as usize, 1)?;
    let r = rescaling_sequence_demo(exponential_family, a.n_max, &cfg)?;
    let norm = r.steps.iter().map(|s| (s.normalization - 1.0).abs()).fold(0.0, f64::max);
    let sup = r.derivative_sup.iter().copied().fold(0.0, f64::max);
    let mut table = Table::new(&["n", "a_re", "a_im", "radius", "derivative_sup", "two_bound_passed"]);
    for s in &r.steps {
        table.rows.push(vec![
            s.n.to_string(),
            num(s.a.re),
            num(s.a.im),
            num(s.preimage_radius),
            num(s.two_bound.sup),
            s.two_bound.passed.to_string(),
        ]);
    }
    let mut out = Outcome::from_result(&r)
        .check(Check::new("normalisation", norm <= 1e-10, format!("max error {norm:e}")))
        .check(Check::new("two-bound", r.two_bound_passed, format!("max sup {sup}")))
        .check(Check::new("radii increase", r.radii_increasing, "preimage radii strictly increase in n"));
    out.table = Some(table);
    Ok(out)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RootTrickArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
}

pub fn root_trick_cmd(a: &RootTrickArgs) -> Result<Outcome, CliError> {
    at_least("n", a.n as usize, 1)?;
    at_least("samples", a.samples, 2)?;
    let f = a.function.function()?;
    let g = root_trick(&f, a.n)?;
    let mut worst: f64 = 0.0;
    for z in disc_samples(SHRINK, a.samples) {
        let fz = f.value(z)?;
        worst = worst.max((g.value(z)?.powu(a.n) - fz).norm() / fz.norm());
    }
    let gap = distance_to_roots_of_unity(&g, a.n, a.samples)?;
    Ok(Outcome::default()
        .with("root", g.label())
        .with("n", a.n)
        .with("max_round_trip", worst)
        .with("distance_to_roots_of_unity", gap)
        .check(Check::new("root raised back", worst <= 1e-8, format!("max relative error {worst:e}"))))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LatticeMapArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[arg(long, value_parser = complex, allow_hyphen_values = true, default_value = "0")]
    pub center: Complex64,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Point where the branches are fixed; the centre by default.
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub base: Option<Complex64>,
    /// Side of the sample grid.
    #[arg(long, default_value_t = 14)]
    pub grid: usize,
}

pub fn lattice_map(a: &LatticeMapArgs) -> Result<Outcome, CliError> {
    positive("radius", a.radius)?;
    at_least("grid", a.grid, 2)?;
    let f = a.function.function()?;
    let chain = build_lattice_map(f, DiskRegion { center: a.center, radius: a.radius }, a.base.unwrap_or(a.center))?;
    let r = chain.verify(a.grid)?;
    Ok(Outcome::from_result(&r)
        .check(Check::new("round trip", r.max_round_trip <= 1e-8, format!("max error {:e}", r.max_round_trip)))
        .check(Check::new("k omits the lattice", r.min_lattice_distance > 0.0, format!("min distance {}", r.min_lattice_distance)))
        .check(Check::new("h omits the integers", r.min_integer_distance > 0.0, format!("min distance {}", r.min_integer_distance))))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LatticeGapsArgs {
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
}

pub fn lattice_gaps_cmd(a: &LatticeGapsArgs) -> Result<Outcome, CliError> {
    at_least("n", a.n, 2)?;
    let r = lattice_gaps(a.n);
    let mut table = Table::new(&["n", "height", "gap"]);
    for (i, h) in r.heights.iter().enumerate() {
        let gap = r.gaps.get(i).map_or(String::new(), |g| num(*g));
        table.rows.push(vec![(i + 1).to_string(), num(*h), gap]);
    }
    let mut out = Outcome::default()
        .with("n", a.n)
        .with("max_gap", r.max_gap)
        .with("max_gap_at", r.max_gap_at)
        .with("gap_bound", r.gap_bound)
        .with("horizontal_spacing", r.horizontal_spacing)
        .with("within_bound", r.within_bound)
        .check(Check::new("gaps below log 4", r.within_bound, format!("max gap {} at n = {}", r.max_gap, r.max_gap_at)));
    out.table = Some(table);
    Ok(out)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CurvatureArgs {
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub z: Complex64,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
}

pub fn curvature(a: &CurvatureArgs) -> Result<Outcome, CliError> {
    positive("step", a.step)?;
    let k = mu_curvature(a.z, a.step)?;
    Ok(Outcome::default()
        .with("mu", mu(a.z)?)
        .with("curvature", k)
        .check(Check::new("negative curvature", k < 0.0, format!("{k}"))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Mu,
    MuCurvature,
    FLower,
    FUpper,
    PuncturedDiskMetric,
    /// Both ends of the metric interval on ℂ∖{0,1}.
    Sandwich,
}

impl Quantity {
    fn columns(self) -> &'static [&'static str] {
        match self {
            Quantity::Mu => &["mu"],
            Quantity::MuCurvature => &["curvature"],
            Quantity::FLower => &["f_lower"],
            Quantity::FUpper => &["f_upper"],
            Quantity::PuncturedDiskMetric => &["metric"],
            Quantity::Sandwich => &["lower", "upper"],
        }
    }

    fn punctures(self) -> &'static [Complex64] {
        match self {
            Quantity::PuncturedDiskMetric => &[ZERO],
            _ => &[ZERO, ONE],
        }
    }

    fn eval(self, z: Complex64, step: f64, cfg: &ConstantsConfig) -> Result<Vec<f64>, CliError> {
        Ok(match self {
            Quantity::Mu => vec![mu(z)?],
            Quantity::MuCurvature => vec![mu_curvature(z, step)?],
            Quantity::FLower => vec![f_lower(z, ONE, cfg)?],
            Quantity::FUpper => vec![f_upper(z, ONE)?],
            Quantity::PuncturedDiskMetric => vec![punctured_disk_metric(z, ONE)?],
            Quantity::Sandwich => {
                let m = metric_interval(z, ONE, cfg)?;
                vec![m.lower, m.upper]
            }
        })
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub re_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub re_max: f64,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub im_min: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub im_max: f64,
    #[arg(long, default_value_t = 100)]
    pub nx: usize,
    #[arg(long, default_value_t = 80)]
    pub ny: usize,
    /// Points closer than this to a puncture are flagged.
    #[arg(long, default_value_t = 0.05)]
    pub exclusion: f64,
    /// Finite-difference step of the curvature sweep.
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
}

#[derive(Debug, Serialize)]
struct SweepRow {
    re: f64,
    im: f64,
    values: Vec<Option<f64>>,
    flagged: bool,
}

pub fn sweep(a: &SweepArgs, ctx: &Context) -> Result<Outcome, CliError> {
    at_least("nx", a.nx, 2)?;
    at_least("ny", a.ny, 2)?;
    positive("step", a.step)?;
    if !(a.exclusion >= 0.0) {
        return Err(invalid("exclusion must be non-negative"));
    }
    if !(a.re_min < a.re_max && a.im_min < a.im_max) {
        return Err(invalid("the grid rectangle is empty"));
    }
    let columns = a.quantity.columns();
    let mut header = vec!["re", "im"];
    header.extend_from_slice(columns);
    header.push("flagged");
    let mut table = Table::new(&header);
    let mut rows = Vec::with_capacity(a.nx * a.ny);
    for i in 0..a.nx {
        for j in 0..a.ny {
            let z = Complex64::new(
                a.re_min + (a.re_max - a.re_min) * i as f64 / (a.nx - 1) as f64,
                a.im_min + (a.im_max - a.im_min) * j as f64 / (a.ny - 1) as f64,
            );
            let near = a.quantity.punctures().iter().any(|p| (z - p).norm() < a.exclusion);
            let values = a.quantity.eval(z, a.step, &ctx.constants).ok();
            let flagged = near || values.is_none();
            let values: Vec<Option<f64>> = values.map_or(vec![None; columns.len()], |v| v.into_iter().map(Some).collect());
            let mut cells = vec![num(z.re), num(z.im)];
            cells.extend(values.iter().map(|v| v.map_or(String::new(), num)));
            cells.push(flagged.to_string());
            table.rows.push(cells);
            rows.push(SweepRow { re: z.re, im: z.im, values, flagged });
        }
    }
    let clear: Vec<&Vec<Option<f64>>> = rows.iter().filter(|r| !r.flagged).map(|r| &r.values).collect();
    let flagged = rows.len() - clear.len();
    let mut out = Outcome::default().with("quantity", a.quantity).with("columns", columns).with("flagged", flagged);
    match a.quantity {
        Quantity::MuCurvature => {
            let max = clear.iter().filter_map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
            out = out.check(Check::new("negative on unflagged rows", max < 0.0, format!("max curvature {max}")));
        }
        Quantity::Sandwich => {
            let bad = clear.iter().filter(|v| v[0] > v[1]).count();
            out = out.check(Check::new("lower <= upper on unflagged rows", bad == 0, format!("{bad} violations")));
        }
        _ => {}
    }
    out = out.with("rows", rows);
    out.table = Some(table);
    Ok(out)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EquivalenceArgs {
    #[arg(long)]
    pub domain: String,
    #[arg(long, default_value_t = 100)]
    pub maps: usize,
    #[arg(long, default_value_t = 100)]
    pub pairs: usize,
}

pub fn equivalence(a: &EquivalenceArgs, ctx: &Context) -> Result<Outcome, CliError> {
    at_least("maps", a.maps, 1)?;
    at_least("pairs", a.pairs, 1)?;
    let domain: Domain = a.domain.parse()?;
    let sampling = EquivalenceSampling { maps: a.maps, pairs: a.pairs, seed: ctx.seed };
    let r = equivalence_witnesses(&domain, &sampling, &ctx.constants)?;
    let mut out = Outcome::from_result(&r).check(Check::new("verdicts agree", r.consistent, "all four properties"));
    if let Some(c) = &r.non_normality {
        out = out.check(Check::new("non-normality certificate", c.passed, format!("{} on K = {{0, 1/2}}", c.sequence)));
    }
    if let Some(c) = &r.equicontinuity {
        out = out.check(Check::new("equicontinuity", c.passed, format!("max excess {:e} over {} maps", c.max_excess, c.maps)));
    }
    Ok(out)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EscapeArgs {
    /// A bounded domain.
    #[arg(long)]
    pub domain: String,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub p: Complex64,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub boundary_point: Complex64,
    /// Unit direction from the boundary point into the domain.
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub direction: Complex64,
    /// Logarithms of the Euclidean distances to the boundary point.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-10,-100,-1000,-10000,-100000,-1000000")]
    pub log_distance: Vec<f64>,
    /// Distance every bound should eventually exceed.
    #[arg(long, default_value_t = 5.0)]
    pub threshold: f64,
}

pub fn escape(a: &EscapeArgs) -> Result<Outcome, CliError> {
    if a.log_distance.is_empty() {
        return Err(invalid("at least one approach point is needed"));
    }
    let domain: Domain = a.domain.parse()?;
    let approach: Vec<ApproachPoint> =
        a.log_distance.iter().map(|l| ApproachPoint::new(a.direction, *l)).collect::<Result<_, _>>()?;
    let r = bounded_domain_escape(&domain, a.p, a.boundary_point, &approach)?;
    let past = r.first_exceeding(a.threshold);
    Ok(Outcome::from_result(&r)
        .with("first_exceeding", past)
        .check(Check::new("strictly increasing", r.strictly_increasing, format!("{} bounds", r.bounds.len())))
        .check(Check::new("exceeds threshold", past.is_some(), format!("threshold {}", a.threshold))))
}
