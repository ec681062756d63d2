//! Landau radii, Schottky budgets, the Picard circle, the equivalence of
//! the Picard, Schottky, Landau and Montel properties, and escape to the
//! boundary of bounded domains.

use std::f64::consts::{LN_2, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::c01::{completeness_lower_bound, f_lower, f_lower_chain, f_upper, C01Error, ConstantsConfig};
use crate::domains::{punctured_lift, punctured_lift_distance, puncture_to_origin, Ambient, Domain, DomainError, DEFAULT_WINDOW};
use crate::holo::{HoloFunction, Jet};
use crate::kobayashi::{lower_bound_distance, template_dictionary, DiscTemplate, KobayashiError};
use crate::poincare::{artanh_from_parts, omega_at, DiskMobius, DiskPoint};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Error)]
pub enum TheoremError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    C01(#[from] C01Error),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Kobayashi(#[from] KobayashiError),
    #[error("approach point {index} is not in the domain")]
    ApproachOutside { index: usize },
}

fn invalid(msg: impl Into<String>) -> TheoremError {
    TheoremError::InvalidArgument(msg.into())
}

/// `[2/f_upper(a; b), 2/f_lower(a; b)]`, the affine and metric ends of the
/// Landau radius at `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandauRadiusInterval {
    pub a: Complex64,
    pub b: Complex64,
    /// Radius on which the affine map `a + b·z` already reaches 0 or 1.
    pub lower: f64,
    /// Radius beyond which every `f` with `f(0) = a`, `f′(0) = b` hits 0 or 1.
    pub upper: f64,
}

impl LandauRadiusInterval {
    /// Whether the image `D(a, |b|·lower)` of the affine map contains 0 or 1.
    pub fn affine_witness_hits(&self) -> bool {
        let reach = self.b.norm() * self.lower;
        self.a.norm() < reach || (self.a - ONE).norm() < reach
    }
}

pub fn landau_radius(a: Complex64, b: Complex64, cfg: &ConstantsConfig) -> Result<LandauRadiusInterval, TheoremError> {
    if b.norm() == 0.0 || !b.is_finite() {
        return Err(invalid("b must be a nonzero finite number"));
    }
    let lower = 2.0 / f_upper(a, b)?;
    let metric_lower = f_lower(a, b, cfg)?.max(f_lower_chain(a, b, cfg)?);
    let upper = if metric_lower > 0.0 { 2.0 / metric_lower } else { f64::INFINITY };
    Ok(LandauRadiusInterval { a, b, lower, upper: upper.max(lower) })
}

/// What is known about `sup |f(z)|` for the Schottky family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModulusBound {
    /// Attained supremum of `|w|` over the Kobayashi ball.
    Exact { value: f64 },
    /// A bound that holds but is not sharp.
    Finite { value: f64 },
    /// Finite by compactness of the ball. Every `w` with
    /// `ln ln |w| ≥ log_log_exclusion` (after the affine change of variables
    /// taking two punctures to 0 and 1) lies outside the ball.
    FiniteUncomputed { log_log_exclusion: f64 },
    /// The ball is unbounded, so no bound exists.
    Unbounded,
}

/// The family `{f: 𝔻 → D : d(a, f(0)) < R}` and the ball `B(a, R + δ)` that
/// contains `f(z)` for `|z| ≤ r`, `δ = artanh r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchottkyBudget {
    pub domain: String,
    pub a: Complex64,
    pub family_radius: f64,
    pub r: f64,
    pub delta: f64,
    pub ball_radius: f64,
    pub bound: ModulusBound,
}

/// Euclidean centre and radius of `{u : ω(a, u) < b}`.
fn disk_ball(a: Complex64, b: f64) -> (Complex64, f64) {
    let t = b.tanh();
    let s = a.norm_sqr();
    let denom = 1.0 - s * t * t;
    (a * (1.0 - t * t) / denom, t * (1.0 - s) / denom)
}

pub fn schottky_budget(a: Complex64, family_radius: f64, r: f64, domain: &Domain, cfg: &ConstantsConfig) -> Result<SchottkyBudget, TheoremError> {
    domain.validate()?;
    domain.require(a)?;
    if !(family_radius > 0.0 && family_radius.is_finite()) {
        return Err(invalid("family radius must be positive"));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid("r must lie in (0, 1)"));
    }
    let delta = r.atanh();
    let ball = family_radius + delta;
    let bound = match domain.canonical() {
        Domain::UnitDisk => {
            let (c, rad) = disk_ball(a, ball);
            ModulusBound::Exact { value: (c.norm() + rad).min(1.0) }
        }
        Domain::EuclideanDisk { center, radius } => {
            let (c, rad) = disk_ball((a - center) / radius, ball);
            ModulusBound::Exact { value: (center + radius * c).norm() + radius * rad }
        }
        Domain::PuncturedDisk => ModulusBound::Exact { value: a.norm().powf((-2.0 * ball).exp()) },
        Domain::Annulus { inner } => {
            let height = -inner.ln();
            let theta = PI * -a.norm().ln() / height;
            let theta_m = 2.0 * ((theta / 2.0).tan() * (-2.0 * ball).exp()).atan();
            ModulusBound::Exact { value: (-theta_m * height / PI).exp() }
        }
        Domain::PuncturedRegion { ambient: Ambient::Disk { center, radius }, .. } => {
            ModulusBound::Finite { value: center.norm() + radius }
        }
        Domain::PuncturedRegion { ambient: Ambient::Plane, punctures } if punctures.len() <= 1 => ModulusBound::Unbounded,
        Domain::TwicePuncturedPlane | Domain::PuncturedRegion { .. } => {
            let p = domain.punctures();
            let x = (a - p[0]) / (p[1] - p[0]);
            // In the chart at ∞ the bound is (1/C′)·ln(|Log(1/w)|/E) with E
            // the exit value or the depth of the base point.
            let mut exit = cfg.chart_exit_log();
            if x.norm() > 1.0 / cfg.chart_radius {
                exit = exit.max(x.ln().norm());
            }
            ModulusBound::FiniteUncomputed { log_log_exclusion: exit.ln() + cfg.chart_constant() * ball }
        }
    };
    Ok(SchottkyBudget { domain: domain.to_string(), a, family_radius, r, delta, ball_radius: ball, bound })
}

/// Sampled `|f(z)| ≤ M` over random members of the Schottky family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchottkyCheck {
    pub maps: usize,
    pub points: usize,
    pub bound: f64,
    pub max_modulus: f64,
    pub passed: bool,
}

/// Random finite Blaschke product fixing 0, with 1 to 3 factors.
fn random_blaschke(rng: &mut ChaCha8Rng) -> HoloFunction {
    let degree = rng.random_range(0..3usize);
    let zeros: Vec<Complex64> =
        (0..degree).map(|_| Complex64::from_polar(rng.random_range(0.0..0.95), rng.random_range(0.0..TAU))).collect();
    let rot = Complex64::from_polar(1.0, rng.random_range(0.0..TAU));
    HoloFunction::from_fn("blaschke", move |z| {
        let mut j = Jet::variable(z).scale(rot);
        for a in &zeros {
            let num = Jet::variable(z) - Jet::constant(*a);
            let den = Jet::constant(ONE) - Jet::variable(z).scale(a.conj());
            j = j * (num / den);
        }
        Ok(j)
    })
}

/// A random point of `domain` drawn from its bounding disk or, for unbounded
/// domains, the square `|Re|, |Im| ≤ 4`.
fn random_point(domain: &Domain, rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let z = match domain.bounding_disk() {
            Some((c, r)) => c + Complex64::from_polar(r * rng.random_range(0.0f64..1.0).sqrt(), rng.random_range(0.0..TAU)),
            None => Complex64::new(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)),
        };
        if domain.contains(z) && domain.boundary_distance(z) > 1e-6 {
            return z;
        }
    }
}

/// Draws maps `F∘B` with `F` a template disc centred at a point within the
/// family radius of `a` and `B` a Blaschke product fixing 0, and checks them
/// against the budget's exact bound on the disk `|z| ≤ r`.
pub fn schottky_sample_check(budget: &SchottkyBudget, domain: &Domain, maps: usize, seed: u64) -> Result<SchottkyCheck, TheoremError> {
    let bound = match budget.bound {
        ModulusBound::Exact { value } | ModulusBound::Finite { value } => value,
        _ => return Err(invalid("sampling needs a numeric bound")),
    };
    let templates = template_dictionary(domain);
    let Some(template) = templates.first().copied() else { return Err(invalid("no disc template for this domain")) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid: Vec<Complex64> = (0..=8)
        .flat_map(|i| {
            let rho = budget.r * f64::from(i) / 8.0;
            (0..32).map(move |j| Complex64::from_polar(rho, TAU * f64::from(j) / 32.0))
        })
        .collect();
    let mut max_modulus: f64 = 0.0;
    let mut points = 0;
    for _ in 0..maps {
        let centre = loop {
            let z = random_point(domain, &mut rng);
            if domain.exact_distance(budget.a, z)?.is_some_and(|d| d < budget.family_radius) {
                break z;
            }
        };
        let other = random_point(domain, &mut rng);
        let link = template.link(centre, other).ok_or_else(|| invalid("template disc failed"))?;
        // Template discs send 0 to their first point, so f(0) = centre.
        debug_assert_eq!(link.a.value(), ZERO);
        let f = link.map.clone();
        let inner = random_blaschke(&mut rng);
        for z in &grid {
            let w = f.value(inner.value(*z).map_err(|e| invalid(e.to_string()))?).map_err(|e| invalid(e.to_string()))?;
            max_modulus = max_modulus.max(w.norm());
            points += 1;
        }
    }
    Ok(SchottkyCheck { maps, points, bound, max_modulus, passed: max_modulus <= bound * (1.0 + 1e-12) })
}

/// Length of `|z| = r` in the punctured disk and the ball that must contain
/// the image of that circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardCircleBudget {
    pub r: f64,
    pub family_radius: f64,
    /// `π/(−ln r)`.
    pub length: f64,
    /// `R + π/ln 2`.
    pub ball_radius: f64,
}

pub fn picard_circle_budget(r: f64, family_radius: f64) -> Result<PicardCircleBudget, TheoremError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid("r must lie in (0, 1)"));
    }
    if !family_radius.is_finite() {
        return Err(invalid("family radius must be finite"));
    }
    Ok(PicardCircleBudget { r, family_radius, length: PI / -r.ln(), ball_radius: family_radius + PI / LN_2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComplementSize {
    Empty,
    One,
    TwoOrMore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Picard,
    Schottky,
    Landau,
    Montel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyVerdict {
    pub property: Property,
    pub holds: bool,
    pub witness: String,
}

/// Values of `f_n` on `K = {0, 1/2}`: bounded at 0 and escaping at 1/2, so no
/// subsequence converges and none diverges compactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonNormalityCertificate {
    pub sequence: String,
    pub n: Vec<u32>,
    pub at_zero: Vec<f64>,
    pub at_half: Vec<f64>,
    pub passed: bool,
}

/// Sampled distance-decreasing check `d(f(z), f(w)) ≤ ω(z, w)` with the
/// domain's lower-bound distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquicontinuityCertificate {
    pub maps: usize,
    pub pairs: usize,
    pub max_excess: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub domain: String,
    pub complement_size: ComplementSize,
    pub verdicts: Vec<PropertyVerdict>,
    pub non_normality: Option<NonNormalityCertificate>,
    pub equicontinuity: Option<EquicontinuityCertificate>,
    /// All four verdicts agree.
    pub consistent: bool,
}

fn non_normality(label: &str, f: impl Fn(u32, Complex64) -> Complex64) -> NonNormalityCertificate {
    let n: Vec<u32> = (0..=10).map(|k| 1 << k).collect();
    let at_zero: Vec<f64> = n.iter().map(|&k| f(k, ZERO).norm()).collect();
    let at_half: Vec<f64> = n.iter().map(|&k| f(k, Complex64::new(0.5, 0.0)).norm()).collect();
    let bounded = at_zero.iter().all(|v| (v - at_zero[0]).abs() <= 1e-12 * (1.0 + at_zero[0]));
    let escaping = at_half.windows(2).all(|w| w[1] > w[0]) && at_half.last().is_some_and(|v| *v >= 100.0 * (1.0 + at_zero[0]));
    NonNormalityCertificate { sequence: label.into(), n, at_zero, at_half, passed: bounded && escaping }
}

/// Settings for the sampling side of [`equivalence_witnesses`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceSampling {
    pub maps: usize,
    pub pairs: usize,
    pub seed: u64,
}

impl Default for EquivalenceSampling {
    fn default() -> Self {
        Self { maps: 100, pairs: 100, seed: 0x6b6f_6261_6c74 }
    }
}

pub fn equivalence_witnesses(domain: &Domain, sampling: &EquivalenceSampling, cfg: &ConstantsConfig) -> Result<EquivalenceReport, TheoremError> {
    domain.validate()?;
    let size = match domain.complement_points() {
        Some(0) => ComplementSize::Empty,
        Some(1) => ComplementSize::One,
        _ => ComplementSize::TwoOrMore,
    };
    let mut report = EquivalenceReport {
        domain: domain.to_string(),
        complement_size: size,
        verdicts: Vec::new(),
        non_normality: None,
        equicontinuity: None,
        consistent: false,
    };
    let verdict = |property, holds, witness: String| PropertyVerdict { property, holds, witness };
    match size {
        ComplementSize::Empty | ComplementSize::One => {
            let (cert, entire) = if size == ComplementSize::Empty {
                (non_normality("n·z", |n, z| f64::from(n) * z), "z ↦ z".to_string())
            } else {
                let a = domain.punctures()[0];
                (non_normality(&format!("{a} + exp(n·z)"), move |n, z| a + (f64::from(n) * z).exp()), format!("z ↦ {a} + exp(z)"))
            };
            let seq = cert.sequence.clone();
            report.verdicts = vec![
                verdict(Property::Picard, false, format!("nonconstant entire map {entire}")),
                verdict(Property::Schottky, false, format!("{seq} fixes its value at 0 but is unbounded at 1/2")),
                verdict(Property::Landau, false, format!("{seq} has unbounded derivative at 0 and omits the complement")),
                verdict(Property::Montel, false, format!("{seq} is not normal on {{0, 1/2}}")),
            ];
            report.consistent = cert.passed;
            report.non_normality = Some(cert);
        }
        ComplementSize::TwoOrMore => {
            let cert = equicontinuity(domain, sampling, cfg)?;
            report.verdicts = [Property::Picard, Property::Schottky, Property::Landau, Property::Montel]
                .into_iter()
                .map(|p| verdict(p, cert.passed, "holomorphic maps into the domain do not increase its distance".into()))
                .collect();
            report.consistent = cert.passed;
            report.equicontinuity = Some(cert);
        }
    }
    Ok(report)
}

fn equicontinuity(domain: &Domain, sampling: &EquivalenceSampling, cfg: &ConstantsConfig) -> Result<EquicontinuityCertificate, TheoremError> {
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let templates: Vec<DiscTemplate> = template_dictionary(domain);
    let mut maps = Vec::with_capacity(sampling.maps);
    while maps.len() < sampling.maps {
        let (p, q) = (random_point(domain, &mut rng), random_point(domain, &mut rng));
        let t = if templates.is_empty() || rng.random_bool(0.3) {
            DiscTemplate::Disk { center: p, radius: domain.boundary_distance(p) * (1.0 - 1e-9) }
        } else {
            templates[rng.random_range(0..templates.len())]
        };
        if let Some(link) = t.link(p, q) {
            let inner = DiskMobius::new(DiskPoint::new(Complex64::from_polar(rng.random_range(0.0..0.5), rng.random_range(0.0..TAU))).expect("inside"), rng.random_range(0.0..TAU));
            maps.push((link.map, inner));
        }
    }
    let mut max_excess = f64::NEG_INFINITY;
    for (f, inner) in &maps {
        for _ in 0..sampling.pairs {
            let z = Complex64::from_polar(rng.random_range(0.0..0.9), rng.random_range(0.0..TAU));
            let w = Complex64::from_polar(rng.random_range(0.0..0.9), rng.random_range(0.0..TAU));
            let fz = f.value(inner.apply(z)).map_err(|e| invalid(e.to_string()))?;
            let fw = f.value(inner.apply(w)).map_err(|e| invalid(e.to_string()))?;
            if !(domain.contains(fz) && domain.contains(fw)) {
                return Err(invalid(format!("sampled map left the domain at {fz} or {fw}")));
            }
            let d = lower_bound_distance(domain, fz, fw, cfg)?.value;
            max_excess = max_excess.max(d - omega_at(z, w).map_err(|e| invalid(e.to_string()))?);
        }
    }
    Ok(EquicontinuityCertificate { maps: maps.len(), pairs: sampling.pairs, max_excess, passed: max_excess <= 1e-9 })
}

/// `boundary_point + direction·exp(log_distance)`, kept in this form so that
/// points far closer to the boundary than `f64` resolves remain usable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproachPoint {
    pub direction: Complex64,
    pub log_distance: f64,
}

impl ApproachPoint {
    pub fn new(direction: Complex64, log_distance: f64) -> Result<Self, TheoremError> {
        if direction.norm() == 0.0 || !direction.is_finite() || log_distance.is_nan() {
            return Err(invalid("approach direction must be nonzero"));
        }
        Ok(Self { direction: direction / direction.norm(), log_distance })
    }

    /// The point at Euclidean distance `distance` from the boundary point.
    pub fn at_distance(direction: Complex64, distance: f64) -> Result<Self, TheoremError> {
        Self::new(direction, distance.ln())
    }

    pub fn point(&self, boundary_point: Complex64) -> Complex64 {
        boundary_point + self.direction * self.log_distance.exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeReport {
    pub domain: String,
    /// The larger domain `G` whose exact distance is used.
    pub comparison: String,
    pub p: Complex64,
    pub boundary_point: Complex64,
    pub bounds: Vec<f64>,
    pub strictly_increasing: bool,
}

impl EscapeReport {
    /// Index of the first bound above `threshold`.
    pub fn first_exceeding(&self, threshold: f64) -> Option<usize> {
        self.bounds.iter().position(|b| *b > threshold)
    }
}

/// Lower bounds `d_G(p, q_k) ≤ d_D(p, q_k)` with `G` the ambient disk of `D`
/// minus the boundary point, so that escaping sequences are seen to leave
/// every ball.
pub fn bounded_domain_escape(
    domain: &Domain,
    p: Complex64,
    boundary_point: Complex64,
    approach: &[ApproachPoint],
) -> Result<EscapeReport, TheoremError> {
    domain.validate()?;
    domain.require(p)?;
    let Some((center, radius)) = domain.bounding_disk() else { return Err(invalid("the domain must be bounded")) };
    if domain.contains(boundary_point) {
        return Err(invalid(format!("{boundary_point} is an interior point")));
    }
    let bn = (boundary_point - center) / radius;
    if bn.norm() > 1.0 + 1e-12 {
        return Err(invalid(format!("{boundary_point} is outside the closure of the domain")));
    }
    let interior = bn.norm() < 1.0;
    let comparison = if interior { Domain::disk_minus(center, radius, vec![boundary_point])? } else { Domain::euclidean_disk(center, radius)? };
    // Below this distance from the boundary point the approach point is
    // inside the domain whenever it points inward.
    let reach = domain.clearance(boundary_point, &[boundary_point]).max(0.0);
    let up = (p - center) / radius;
    let m = puncture_to_origin(center, radius, boundary_point);
    let mut bounds = Vec::with_capacity(approach.len());
    for (index, ap) in approach.iter().enumerate() {
        let eps = ap.log_distance.exp();
        let q = ap.point(boundary_point);
        let tiny = eps < 1e-6 * radius;
        let inside = if interior && tiny {
            eps < 0.5 * reach
        } else if tiny {
            // Inward means a negative component along the outward normal.
            (ap.direction * bn.conj()).re < 0.0
        } else {
            domain.contains(q)
        };
        if !inside {
            return Err(TheoremError::ApproachOutside { index });
        }
        let d = if interior {
            let lp = punctured_lift(m.apply(up));
            let lq = if tiny {
                // m(bn + δ) ≈ m′(bn)·δ with δ = direction·ε/radius.
                let d = m.derivative(bn) * ap.direction;
                Complex64::new(d.arg(), -(d.norm().ln() + ap.log_distance - radius.ln()))
            } else {
                punctured_lift(m.apply((q - center) / radius))
            };
            punctured_lift_distance(lp, lq, DEFAULT_WINDOW).distance
        } else {
            let uq = if tiny { bn } else { (q - center) / radius };
            let denom = (ONE - up.conj() * uq).norm_sqr();
            if tiny {
                // 1 − |bn + δ|² ≈ −2 Re(conj(bn)·δ), kept as a logarithm so
                // that depths below f64 range still give finite distances.
                let ln_one_minus = (1.0 - up.norm_sqr()).ln() - denom.ln()
                    + (-2.0 * (bn.conj() * ap.direction).re).ln()
                    + ap.log_distance
                    - radius.ln();
                let one_minus = ln_one_minus.exp();
                let rho = (1.0 - one_minus).max(0.0).sqrt();
                // artanh ρ = ln(1 + ρ) − ½ ln(1 − ρ²).
                (1.0 + rho).ln() - 0.5 * ln_one_minus
            } else {
                let one_minus = (1.0 - up.norm_sqr()) * (1.0 - uq.norm()) * (1.0 + uq.norm()) / denom;
                let rho = (1.0 - one_minus).max(0.0).sqrt();
                artanh_from_parts(rho, one_minus)
            }
        };
        bounds.push(d);
    }
    Ok(EscapeReport {
        domain: domain.to_string(),
        comparison: comparison.to_string(),
        p,
        boundary_point,
        strictly_increasing: bounds.windows(2).all(|w| w[1] > w[0]),
        bounds,
    })
}

/// Log-log lower bounds from `a` to the points `10^{-k}` of `ℂ∖{0,1}`.
pub fn completeness_profile(a: Complex64, ks: &[i32], cfg: &ConstantsConfig) -> Result<Vec<f64>, TheoremError> {
    Ok(ks.iter().map(|k| completeness_lower_bound(Complex64::new(10f64.powi(-k), 0.0), a, cfg)).collect::<Result<_, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::punctured_disk_distance;
    use crate::kobayashi::curve_length;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn landau_interval_scales_and_orders() {
        let cfg = ConstantsConfig::default();
        let i = landau_radius(c(0.5, 0.0), ONE, &cfg).unwrap();
        assert!(i.lower >= 1.0 - 1e-15 && i.lower <= i.upper);
        assert!(i.affine_witness_hits());
        let j = landau_radius(c(0.5, 0.0), c(0.0, 2.0), &cfg).unwrap();
        assert_relative_eq!(j.lower, i.lower / 2.0, max_relative = 1e-14);
        assert_relative_eq!(j.upper, i.upper / 2.0, max_relative = 1e-14);
        assert!(landau_radius(ZERO, ONE, &cfg).is_err());
        assert!(landau_radius(c(0.5, 0.0), ZERO, &cfg).is_err());
    }

    #[test]
    fn schottky_on_the_disk() {
        let cfg = ConstantsConfig::default();
        let b = schottky_budget(ZERO, 1.0, 0.5, &Domain::UnitDisk, &cfg).unwrap();
        assert_relative_eq!(b.delta, 0.549_306_144_334_054_8, max_relative = 1e-14);
        assert_eq!(b.ball_radius, 1.0 + b.delta);
        assert_eq!(b.bound, ModulusBound::Exact { value: (1.0 + b.delta).tanh() });
        assert!(((1.0f64 + b.delta).tanh() - 0.913_670_934).abs() < 1e-9);
        let check = schottky_sample_check(&b, &Domain::UnitDisk, 50, 7).unwrap();
        assert!(check.passed, "{check:?}");
        assert!(schottky_budget(ZERO, 1.0, 1.0, &Domain::UnitDisk, &cfg).is_err());
    }

    #[test]
    fn schottky_ball_extremes_match_distances() {
        let cfg = ConstantsConfig::default();
        let a = c(0.0, 0.4);
        let b = schottky_budget(a, 0.7, 0.3, &Domain::PuncturedDisk, &cfg).unwrap();
        let ModulusBound::Exact { value } = b.bound else { panic!() };
        // The extreme point lies on the ray through a at distance R + δ.
        let extreme = a / a.norm() * value;
        assert_relative_eq!(punctured_disk_distance(a, extreme).unwrap(), b.ball_radius, max_relative = 1e-9);
        let annulus = Domain::annulus(0.2).unwrap();
        let a = c(-0.45, 0.0);
        let b = schottky_budget(a, 0.3, 0.2, &annulus, &cfg).unwrap();
        let ModulusBound::Exact { value } = b.bound else { panic!() };
        assert_relative_eq!(annulus.exact_distance(a, c(-value, 0.0)).unwrap().unwrap(), b.ball_radius, max_relative = 1e-9);
        let check = schottky_sample_check(&b, &annulus, 30, 3).unwrap();
        assert!(check.passed, "{check:?}");
        let b = schottky_budget(c(2.0, 1.0), 1.0, 0.5, &Domain::TwicePuncturedPlane, &cfg).unwrap();
        assert!(matches!(b.bound, ModulusBound::FiniteUncomputed { log_log_exclusion } if log_log_exclusion.is_finite()));
        let b = schottky_budget(c(2.0, 1.0), 1.0, 0.5, &Domain::plane(), &cfg).unwrap();
        assert_eq!(b.bound, ModulusBound::Unbounded);
    }

    #[test]
    fn picard_circle() {
        let b = picard_circle_budget(0.5, 0.0).unwrap();
        assert_relative_eq!(b.length, 4.532_360_141_827_194, max_relative = 1e-14);
        assert_eq!(b.ball_radius, b.length);
        assert_relative_eq!(picard_circle_budget((-1.0f64).exp(), 1.0).unwrap().length, PI, max_relative = 1e-15);
        let lengths: Vec<f64> = (1..10).map(|k| picard_circle_budget(f64::from(k) / 10.0, 0.0).unwrap().length).collect();
        assert!(lengths.windows(2).all(|w| w[1] > w[0]));
        let curve = crate::kobayashi::Curve::circle(Domain::PuncturedDisk, ZERO, 0.3).unwrap();
        let q = curve_length(|z, v| crate::domains::punctured_disk_metric(z, v).unwrap(), &curve).unwrap();
        assert!((q - picard_circle_budget(0.3, 0.0).unwrap().length).abs() < 1e-8);
        assert!(picard_circle_budget(1.0, 0.0).is_err());
    }

    #[test]
    fn equivalence_for_small_and_large_complements() {
        let cfg = ConstantsConfig::default();
        let s = EquivalenceSampling { maps: 20, pairs: 20, seed: 1 };
        let r = equivalence_witnesses(&Domain::plane(), &s, &cfg).unwrap();
        let cert = r.non_normality.as_ref().unwrap();
        assert!(r.consistent && cert.passed && r.verdicts.iter().all(|v| !v.holds));
        assert_eq!(cert.at_half[3], 4.0);
        let r = equivalence_witnesses(&Domain::plane_minus(vec![ZERO]).unwrap(), &s, &cfg).unwrap();
        let cert = r.non_normality.as_ref().unwrap();
        assert!(cert.passed && cert.at_zero.iter().all(|v| *v == 1.0));
        assert_relative_eq!(cert.at_half[2], 2.0f64.exp(), max_relative = 1e-14);
        let r = equivalence_witnesses(&Domain::TwicePuncturedPlane, &s, &cfg).unwrap();
        assert!(r.consistent && r.verdicts.iter().all(|v| v.holds));
        let r = equivalence_witnesses(&Domain::PuncturedDisk, &s, &cfg).unwrap();
        assert!(r.consistent && r.equicontinuity.unwrap().max_excess <= 1e-9);
    }

    #[test]
    fn escape_in_the_punctured_disk() {
        let d = Domain::disk_minus(ZERO, 1.0, vec![ZERO]).unwrap();
        let p = c(0.5, 0.0);
        let approach: Vec<ApproachPoint> = (1..=8).map(|k| ApproachPoint::at_distance(ONE, 10f64.powi(-k)).unwrap()).collect();
        let r = bounded_domain_escape(&d, p, ZERO, &approach).unwrap();
        assert!(r.strictly_increasing);
        for (k, b) in r.bounds.iter().enumerate() {
            let q = c(10f64.powi(-(k as i32 + 1)), 0.0);
            assert_relative_eq!(*b, punctured_disk_distance(p, q).unwrap(), max_relative = 1e-9);
        }
        // Larger ambient disk, smaller distances.
        let big = Domain::disk_minus(ZERO, 2.0, vec![ZERO]).unwrap();
        let r2 = bounded_domain_escape(&big, p, ZERO, &approach).unwrap();
        assert!(r2.bounds.iter().zip(&r.bounds).all(|(b2, b)| b2 < b));
        // Points beyond f64 resolution keep increasing past 5.
        let deep: Vec<ApproachPoint> = (1..=6).map(|k| ApproachPoint::new(ONE, -(10f64.powi(k))).unwrap()).collect();
        let r3 = bounded_domain_escape(&d, p, ZERO, &deep).unwrap();
        assert!(r3.strictly_increasing && r3.first_exceeding(5.0).is_some(), "{:?}", r3.bounds);
        let first = bounded_domain_escape(&d, p, ZERO, &[ApproachPoint::at_distance(ONE, 0.5).unwrap()]).unwrap();
        assert!(first.bounds[0].abs() < 1e-15);
    }

    #[test]
    fn escape_to_the_outer_circle() {
        let d = Domain::disk_minus(ZERO, 1.0, vec![c(0.2, 0.0)]).unwrap();
        let approach: Vec<ApproachPoint> = (1..=12).map(|k| ApproachPoint::at_distance(-ONE, 10f64.powi(-k)).unwrap()).collect();
        let r = bounded_domain_escape(&d, ZERO, ONE, &approach).unwrap();
        assert!(r.strictly_increasing);
        assert_relative_eq!(r.bounds[1], 0.99f64.atanh(), max_relative = 1e-9);
        // ε = e^{-1000}: ω(0, 1 − ε) = artanh(1 − ε) ≈ ½·ln(2/ε).
        let deep = [ApproachPoint::new(-ONE, -1000.0).unwrap()];
        let r = bounded_domain_escape(&d, ZERO, ONE, &deep).unwrap();
        assert_relative_eq!(r.bounds[0], 0.5 * (2f64.ln() + 1000.0), max_relative = 1e-12);
        let outward = [ApproachPoint::at_distance(ONE, 1e-9).unwrap()];
        assert!(matches!(bounded_domain_escape(&d, ZERO, ONE, &outward), Err(TheoremError::ApproachOutside { .. })));
    }

    #[test]
    fn completeness_profile_grows() {
        let cfg = ConstantsConfig::default();
        let ks: Vec<i32> = (2..=10).collect();
        let v = completeness_profile(c(0.5, 0.0), &ks, &cfg).unwrap();
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        assert!(v[8] > 3.0 * v[0]);
    }
}
