//! Curve lengths, analytic disc chains and two-sided distance estimates.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::c01::{completeness_lower_bound, distance_to_omitted, lattice_cover, lattice_preimages, C01Error, ConstantsConfig};
use crate::domains::{
    annulus_fiber, punctured_lift, punctured_lift_distance, puncture_to_origin, Domain, DomainError, DEFAULT_WINDOW,
};
use crate::holo::{EvalError, HoloFunction, Jet};
use crate::poincare::{cayley, omega, omega_at, DiskMobius, DiskPoint, DISK_GUARD};
use crate::quadrature::{integrate, QuadratureError};
use crate::simplex::{minimize, SimplexOptions};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Samples per segment when checking that a curve stays in its domain.
const CURVE_SAMPLES: usize = 64;
/// Ring radius and count for disc-image validation.
const RING_RADIUS: f64 = 1.0 - 1e-3;
const RING_SAMPLES: usize = 256;
const RADIAL_RINGS: usize = 9;
const RADIAL_SPOKES: usize = 32;
/// Smallest admissible distance from a sampled disc image to the complement.
pub const CLEARANCE_MARGIN: f64 = 1e-9;
/// Cost charged per link that no template can realise.
const INFEASIBLE: f64 = 1e6;
/// Rescaling of the discs used in `ℂ` and `ℂ∖{a}`, where the distance is 0
/// but no single disc attains it.
const FLAT_SCALE: f64 = 1e6;
/// Largest `|E|` for which the annulus disc can be written without overflow.
const STRIP_LIMIT: f64 = 600.0;

#[derive(Debug, Error)]
pub enum KobayashiError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    C01(#[from] C01Error),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("curve leaves the domain at {0}")]
    CurveLeavesDomain(Complex64),
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("no exact distance is available on {0}")]
    NoExactDistance(String),
    #[error("step from {z} along {v} leaves the domain")]
    StepLeavesDomain { z: Complex64, v: Complex64 },
    #[error("lower bound {lower} exceeds upper bound {upper}")]
    InconsistentBounds { lower: f64, upper: f64 },
    #[error("{sub} is not contained in {sup}")]
    NotContained { sub: String, sup: String },
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
}

/// A `C¹` piece of a curve, parametrised over `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Segment {
    Line { from: Complex64, to: Complex64 },
    /// `center + radius·e^{i(start + t·sweep)}`.
    Arc { center: Complex64, radius: f64, start: f64, sweep: f64 },
}

impl Segment {
    pub fn point(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * t,
            Segment::Arc { center, radius, start, sweep } => center + Complex64::from_polar(radius, start + t * sweep),
        }
    }

    pub fn velocity(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc { radius, start, sweep, .. } => I * sweep * Complex64::from_polar(radius, start + t * sweep),
        }
    }

    /// The pieces over `[0, t]` and `[t, 1]`.
    pub fn split(&self, t: f64) -> (Segment, Segment) {
        match *self {
            Segment::Line { from, to } => {
                let m = self.point(t);
                (Segment::Line { from, to: m }, Segment::Line { from: m, to })
            }
            Segment::Arc { center, radius, start, sweep } => (
                Segment::Arc { center, radius, start, sweep: t * sweep },
                Segment::Arc { center, radius, start: start + t * sweep, sweep: (1.0 - t) * sweep },
            ),
        }
    }
}

/// A piecewise-`C¹` curve in a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub domain: Domain,
    pub segments: Vec<Segment>,
}

impl Curve {
    /// Checks that every node and sampled interior point lies in `domain`.
    pub fn new(domain: Domain, segments: Vec<Segment>) -> Result<Self, KobayashiError> {
        domain.validate()?;
        for s in &segments {
            for j in 0..=CURVE_SAMPLES {
                let z = s.point(j as f64 / CURVE_SAMPLES as f64);
                if !domain.contains(z) {
                    return Err(KobayashiError::CurveLeavesDomain(z));
                }
            }
        }
        Ok(Self { domain, segments })
    }

    pub fn polyline(domain: Domain, nodes: &[Complex64]) -> Result<Self, KobayashiError> {
        let segments = nodes.windows(2).map(|w| Segment::Line { from: w[0], to: w[1] }).collect();
        Self::new(domain, segments)
    }

    /// The positively oriented circle `|z − center| = radius`.
    pub fn circle(domain: Domain, center: Complex64, radius: f64) -> Result<Self, KobayashiError> {
        Self::new(domain, vec![Segment::Arc { center, radius, start: 0.0, sweep: TAU }])
    }

    pub fn nodes(&self) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = self.segments.iter().map(|s| s.point(0.0)).collect();
        if let Some(last) = self.segments.last() {
            out.push(last.point(1.0));
        }
        out
    }

    /// Splits segment `index` at parameter `t`.
    pub fn split_at(&self, index: usize, t: f64) -> Self {
        let mut segments = self.segments.clone();
        let (a, b) = segments[index].split(t);
        segments[index] = a;
        segments.insert(index + 1, b);
        Self { domain: self.domain.clone(), segments }
    }

    /// Halves every segment.
    pub fn refined(&self) -> Self {
        let segments = self
            .segments
            .iter()
            .flat_map(|s| {
                let (a, b) = s.split(0.5);
                [a, b]
            })
            .collect();
        Self { domain: self.domain.clone(), segments }
    }
}

/// `∫ F(σ(t); σ′(t)) dt` over the curve.
pub fn curve_length<M: Fn(Complex64, Complex64) -> f64>(metric: M, curve: &Curve) -> Result<f64, KobayashiError> {
    let mut total = 0.0;
    for s in &curve.segments {
        total += integrate(|t| metric(s.point(t), s.velocity(t)), 0.0, 1.0, 1e-13, 1e-12)?;
    }
    Ok(total)
}

/// [`curve_length`] with the domain's closed-form metric.
pub fn exact_curve_length(curve: &Curve) -> Result<f64, KobayashiError> {
    let domain = &curve.domain;
    if domain.exact_metric(curve.segments.first().map_or(Complex64::new(0.0, 0.0), |s| s.point(0.0)), ONE)?.is_none() {
        return Err(KobayashiError::NoExactDistance(domain.to_string()));
    }
    curve_length(|z, v| domain.exact_metric(z, v).ok().flatten().unwrap_or(f64::NAN), curve)
}

/// Model sub-domains whose discs are written down explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DiscTemplate {
    /// `D(center, radius)` through a Möbius disc.
    Disk { center: Complex64, radius: f64 },
    /// `D(center, radius)∖{puncture}` through the exponential cover.
    PuncturedDisk { center: Complex64, radius: f64, puncture: Complex64 },
    /// `|z − center| > radius` through `z = center + radius/u`.
    Exterior { center: Complex64, radius: f64 },
    /// `inner < |z| < 1` through the strip cover.
    Annulus { inner: f64 },
    /// `ℂ∖{puncture}` through `puncture + exp(·)`.
    PuncturedPlane { puncture: Complex64 },
    Plane,
    /// `ℂ∖{base, base + step}` through `base + step·Q(w)` on a disc avoiding
    /// the points where `Q = 1`.
    Lattice { base: Complex64, step: Complex64 },
}

fn same_point(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-12 * (1.0 + a.norm())
}

fn disk_coordinate(z: Complex64, center: Complex64, radius: f64) -> Option<Complex64> {
    let u = (z - center) / radius;
    (u.norm() <= DISK_GUARD).then_some(u)
}

fn punctured_coordinate(u: Complex64) -> Option<Complex64> {
    (u.norm() > 0.0 && u.norm() <= DISK_GUARD && u.is_finite()).then_some(u)
}

/// Jet of `x0 + y0·i(1+ζ)/(1−ζ)`, the disc onto the half-plane sending 0 to
/// `x0 + i·y0`.
fn halfplane_disc(centre: Complex64, zeta: Complex64) -> Jet {
    let d = ONE - zeta;
    let value = centre.re + centre.im * I * (ONE + zeta) / d;
    Jet::new(value, centre.im * 2.0 * I / (d * d))
}

/// The point of the disc mapped to `w` by [`halfplane_disc`] with this centre.
fn halfplane_preimage(centre: Complex64, w: Complex64) -> Complex64 {
    cayley((w - centre.re) / centre.im)
}

/// Two lifts of a small-ω disc in `ℂ`: the points `∓Δ/R` and the disc radius `R`.
fn flat_pair(delta: Complex64) -> (Complex64, Complex64, f64) {
    let r = FLAT_SCALE * (1.0 + delta.norm());
    (-delta / r, delta / r, r)
}

struct LatticePlan {
    centre: Complex64,
    radius: f64,
    a: Complex64,
    b: Complex64,
}

fn lattice_plan(x: Complex64, y: Complex64) -> Option<LatticePlan> {
    let (px, py) = (lattice_preimages(x, 1).ok()?, lattice_preimages(y, 1).ok()?);
    let keep = |w: &Complex64| w.re.abs() <= 1.0;
    let mut best: Option<(f64, LatticePlan)> = None;
    for wp in px.iter().filter(|w| keep(w)) {
        for wq in py.iter() {
            let half = 0.5 * (wq - wp);
            if half.norm() >= 1.0 {
                continue;
            }
            for centre in [wp + half, *wp, *wq] {
                let radius = distance_to_omitted(centre);
                let (a, b) = ((wp - centre) / radius, (wq - centre) / radius);
                let Ok(cost) = omega_at(a, b) else { continue };
                if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                    best = Some((cost, LatticePlan { centre, radius, a, b }));
                }
            }
        }
    }
    best.map(|(_, p)| p)
}

impl DiscTemplate {
    /// Structural check that the template's model domain lies in `domain`.
    pub fn fits(&self, domain: &Domain) -> bool {
        let punctures = domain.punctures();
        let plane = domain.complement_points().is_some();
        match *self {
            DiscTemplate::Disk { center, radius } => {
                Domain::euclidean_disk(center, radius).is_ok_and(|d| domain.contains_domain(&d))
            }
            DiscTemplate::PuncturedDisk { center, radius, puncture } => {
                Domain::disk_minus(center, radius, vec![puncture]).is_ok_and(|d| domain.contains_domain(&d))
            }
            DiscTemplate::Annulus { inner } => Domain::annulus(inner).is_ok_and(|d| domain.contains_domain(&d)),
            DiscTemplate::Exterior { center, radius } => {
                plane && punctures.iter().all(|b| (b - center).norm() <= radius * (1.0 + 1e-12))
            }
            DiscTemplate::PuncturedPlane { puncture } => plane && punctures.iter().all(|b| same_point(*b, puncture)),
            DiscTemplate::Plane => plane && punctures.is_empty(),
            DiscTemplate::Lattice { base, step } => {
                plane && punctures.iter().all(|b| same_point(*b, base) || same_point(*b, base + step))
            }
        }
    }

    /// Points of the complement that the disc maps omit by construction.
    pub fn omitted(&self) -> Vec<Complex64> {
        match *self {
            DiscTemplate::PuncturedDisk { puncture, .. } | DiscTemplate::PuncturedPlane { puncture } => vec![puncture],
            DiscTemplate::Lattice { base, step } => vec![base, base + step],
            DiscTemplate::Annulus { .. } => vec![Complex64::new(0.0, 0.0)],
            _ => Vec::new(),
        }
    }

    /// Whether the model domain is unbounded, so that overflowing sample
    /// images stand for points near `∞` inside it.
    pub fn unbounded(&self) -> bool {
        matches!(
            self,
            DiscTemplate::Exterior { .. } | DiscTemplate::PuncturedPlane { .. } | DiscTemplate::Plane | DiscTemplate::Lattice { .. }
        )
    }

    fn punctured_coordinates(&self, z: Complex64) -> Option<Complex64> {
        match *self {
            DiscTemplate::PuncturedDisk { center, radius, puncture } => {
                let m = puncture_to_origin(center, radius, puncture);
                punctured_coordinate(m.apply(disk_coordinate(z, center, radius)?))
            }
            DiscTemplate::Exterior { center, radius } => punctured_coordinate(radius / (z - center)),
            _ => None,
        }
    }

    /// Length of the template's link from `p` to `q`, or `None` when the
    /// template cannot join them.
    pub fn cost(&self, p: Complex64, q: Complex64) -> Option<f64> {
        match *self {
            DiscTemplate::Disk { center, radius } => {
                omega_at(disk_coordinate(p, center, radius)?, disk_coordinate(q, center, radius)?).ok()
            }
            DiscTemplate::PuncturedDisk { .. } | DiscTemplate::Exterior { .. } => {
                let (u, w) = (self.punctured_coordinates(p)?, self.punctured_coordinates(q)?);
                Some(punctured_lift_distance(punctured_lift(u), punctured_lift(w), DEFAULT_WINDOW).distance)
            }
            DiscTemplate::Annulus { inner } => {
                let fiber = annulus_fiber(p, q, inner, DEFAULT_WINDOW).ok()?;
                let e = PI * (fiber.lift_p.re - fiber.lift_q.re) / -inner.ln();
                (e.abs() <= STRIP_LIMIT).then_some(fiber.distance)
            }
            DiscTemplate::PuncturedPlane { puncture } => {
                let (lp, lq) = ((p - puncture).ln(), (q - puncture).ln());
                let k = ((lp.im - lq.im) / TAU).round();
                let (a, b, _) = flat_pair(0.5 * (lq + TAU * k * I - lp));
                omega_at(a, b).ok().filter(|_| p != puncture && q != puncture)
            }
            DiscTemplate::Plane => {
                let (a, b, _) = flat_pair(0.5 * (q - p));
                omega_at(a, b).ok()
            }
            DiscTemplate::Lattice { base, step } => {
                let plan = lattice_plan((p - base) / step, (q - base) / step)?;
                omega_at(plan.a, plan.b).ok()
            }
        }
    }

    /// The explicit disc joining `p` to `q`.
    pub fn link(&self, p: Complex64, q: Complex64) -> Option<DiscLink> {
        let (map, a, b) = match *self {
            DiscTemplate::Disk { center, radius } => {
                let (u, w) = (disk_coordinate(p, center, radius)?, disk_coordinate(q, center, radius)?);
                let to_origin = DiskMobius::to_origin(DiskPoint::new(u).ok()?, 0.0);
                let inv = to_origin.inverse();
                let map = HoloFunction::from_fn(format!("{center} + {radius}·möbius"), move |z| {
                    Ok(Jet::new(center + radius * inv.apply(z), radius * inv.derivative(z)))
                });
                (map, Complex64::new(0.0, 0.0), to_origin.apply(w))
            }
            DiscTemplate::PuncturedDisk { center, radius, puncture } => {
                let (u, w) = (self.punctured_coordinates(p)?, self.punctured_coordinates(q)?);
                let fiber = punctured_lift_distance(punctured_lift(u), punctured_lift(w), DEFAULT_WINDOW);
                let lp = fiber.lift_p;
                let inv = puncture_to_origin(center, radius, puncture).inverse();
                let map = HoloFunction::from_fn(format!("punctured disc around {puncture}"), move |z| {
                    let psi = halfplane_disc(lp, z);
                    let e = (I * psi.value).exp();
                    let du = I * psi.derivative * e;
                    Ok(Jet::new(center + radius * inv.apply(e), radius * inv.derivative(e) * du))
                });
                (map, Complex64::new(0.0, 0.0), halfplane_preimage(lp, fiber.lift_q))
            }
            DiscTemplate::Exterior { center, radius } => {
                let (u, w) = (self.punctured_coordinates(p)?, self.punctured_coordinates(q)?);
                let fiber = punctured_lift_distance(punctured_lift(u), punctured_lift(w), DEFAULT_WINDOW);
                let lp = fiber.lift_p;
                let map = HoloFunction::from_fn(format!("exterior disc of D({center}, {radius})"), move |z| {
                    let psi = halfplane_disc(lp, z);
                    let e = (-I * psi.value).exp();
                    Ok(Jet::new(center + radius * e, -I * radius * psi.derivative * e))
                });
                (map, Complex64::new(0.0, 0.0), halfplane_preimage(lp, fiber.lift_q))
            }
            DiscTemplate::Annulus { inner } => {
                let fiber = annulus_fiber(p, q, inner, DEFAULT_WINDOW).ok()?;
                let height = -inner.ln();
                let (zp, zq) = (fiber.lift_p, fiber.lift_q);
                if (PI * (zp.re - zq.re) / height).abs() > STRIP_LIMIT {
                    return None;
                }
                let shift = 0.5 * (zp.re + zq.re);
                let (wp, wq) = ((PI * (zp - shift) / height).exp(), (PI * (zq - shift) / height).exp());
                let map = HoloFunction::from_fn(format!("strip disc of annulus:{inner}"), move |z| {
                    let psi = halfplane_disc(wp, z);
                    let zeta = shift + height / PI * psi.value.ln();
                    let e = (I * zeta).exp();
                    Ok(Jet::new(e, I * e * height / PI * psi.derivative / psi.value))
                });
                (map, Complex64::new(0.0, 0.0), halfplane_preimage(wp, wq))
            }
            DiscTemplate::PuncturedPlane { puncture } => {
                if p == puncture || q == puncture {
                    return None;
                }
                let (lp, lq) = ((p - puncture).ln(), (q - puncture).ln());
                let lq = lq + TAU * ((lp.im - lq.im) / TAU).round() * I;
                let mid = 0.5 * (lp + lq);
                let (a, b, r) = flat_pair(0.5 * (lq - lp));
                let map = HoloFunction::from_fn(format!("{puncture} + exp(·)"), move |z| {
                    let e = (mid + r * z).exp();
                    Ok(Jet::new(puncture + e, r * e))
                });
                (map, a, b)
            }
            DiscTemplate::Plane => {
                let mid = 0.5 * (p + q);
                let (a, b, r) = flat_pair(0.5 * (q - p));
                let map = HoloFunction::from_fn("affine disc", move |z| Ok(Jet::new(mid + r * z, Complex64::new(r, 0.0))));
                (map, a, b)
            }
            DiscTemplate::Lattice { base, step } => {
                let plan = lattice_plan((p - base) / step, (q - base) / step)?;
                let (centre, radius) = (plan.centre, plan.radius);
                let map = HoloFunction::from_fn(format!("{base} + {step}·Q"), move |z| {
                    let j = lattice_cover(centre + radius * z);
                    Ok(Jet::new(base + step * j.value, step * radius * j.derivative))
                });
                (map, plan.a, plan.b)
            }
        };
        DiscLink::new(map, *self, a, b).ok()
    }
}

/// One disc `f` of a chain with its marked points.
#[derive(Clone, Serialize)]
pub struct DiscLink {
    #[serde(skip)]
    pub map: HoloFunction,
    pub label: String,
    pub template: DiscTemplate,
    pub a: DiskPoint,
    pub b: DiskPoint,
    /// `f(a)` and `f(b)`.
    pub start: Complex64,
    pub end: Complex64,
}

impl std::fmt::Debug for DiscLink {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiscLink")
            .field("label", &self.label)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("start", &self.start)
            .field("end", &self.end)
            .finish()
    }
}

impl DiscLink {
    pub fn new(map: HoloFunction, template: DiscTemplate, a: Complex64, b: Complex64) -> Result<Self, KobayashiError> {
        let point = |z| DiskPoint::new(z).map_err(|e| KobayashiError::InvalidChain(e.to_string()));
        let (a, b) = (point(a)?, point(b)?);
        let eval = |z: DiskPoint| map.value(z.value()).map_err(|e: EvalError| KobayashiError::InvalidChain(e.to_string()));
        let (start, end) = (eval(a)?, eval(b)?);
        Ok(Self { label: map.label(), map, template, a, b, start, end })
    }

    pub fn length(&self) -> f64 {
        omega(self.a, self.b)
    }
}

/// Discs `f_1, …, f_k` with `f_1(a_1) = p`, `f_i(b_i) = f_{i+1}(a_{i+1})` and
/// `f_k(b_k) = q`.
#[derive(Debug, Clone, Serialize)]
pub struct DiscChain {
    pub p: Complex64,
    pub q: Complex64,
    pub links: Vec<DiscLink>,
}

/// Outcome of [`DiscChain::validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainValidation {
    pub links: usize,
    pub samples: usize,
    pub max_endpoint_error: f64,
    pub min_clearance: f64,
    pub valid: bool,
    pub failure: Option<String>,
}

fn link_tolerance(z: Complex64) -> f64 {
    1e-8 * (1.0 + z.norm())
}

/// Parameter-disc points where disc images are checked.
pub fn validation_samples() -> Vec<Complex64> {
    let mut out: Vec<Complex64> =
        (0..RING_SAMPLES).map(|j| Complex64::from_polar(RING_RADIUS, TAU * j as f64 / RING_SAMPLES as f64)).collect();
    out.push(Complex64::new(0.0, 0.0));
    for r in 1..=RADIAL_RINGS {
        let rho = r as f64 / (RADIAL_RINGS + 1) as f64;
        for s in 0..RADIAL_SPOKES {
            out.push(Complex64::from_polar(rho, TAU * (s as f64 + 0.5) / RADIAL_SPOKES as f64));
        }
    }
    out
}

impl DiscChain {
    /// Checks the link endpoints, the tolerance-free joins, and that the sampled
    /// image of every disc stays at least [`CLEARANCE_MARGIN`] inside `domain`.
    pub fn validate(&self, domain: &Domain) -> ChainValidation {
        let mut report = ChainValidation {
            links: self.links.len(),
            samples: 0,
            max_endpoint_error: 0.0,
            min_clearance: f64::INFINITY,
            valid: false,
            failure: None,
        };
        if let Err(e) = self.check_joins() {
            report.failure = Some(e.to_string());
            return report;
        }
        let samples = validation_samples();
        for (i, link) in self.links.iter().enumerate() {
            if !link.template.fits(domain) {
                report.failure = Some(format!("link {i}: template {:?} does not fit {domain}", link.template));
                return report;
            }
            for (z, target) in [(link.a, link.start), (link.b, link.end)] {
                match link.map.value(z.value()) {
                    Ok(w) => report.max_endpoint_error = report.max_endpoint_error.max((w - target).norm()),
                    Err(e) => {
                        report.failure = Some(format!("link {i}: {e}"));
                        return report;
                    }
                }
            }
            let exempt = link.template.omitted();
            for zeta in &samples {
                report.samples += 1;
                let w = match link.map.value(*zeta) {
                    Ok(w) if w.is_finite() => w,
                    Ok(_) if link.template.unbounded() => continue,
                    _ => {
                        report.failure = Some(format!("link {i}: disc map fails at {zeta}"));
                        return report;
                    }
                };
                // Images near an omitted puncture may round onto it.
                let inside = domain.contains(w) || exempt.iter().any(|e| same_point(*e, w));
                let clearance = if inside { domain.clearance(w, &exempt) } else { f64::NEG_INFINITY };
                report.min_clearance = report.min_clearance.min(clearance);
                if clearance < CLEARANCE_MARGIN {
                    report.failure = Some(format!("link {i}: image point {w} is within {clearance:e} of the boundary"));
                    return report;
                }
            }
        }
        let tol = self.links.iter().map(|l| link_tolerance(l.start).max(link_tolerance(l.end))).fold(0.0, f64::max);
        if report.max_endpoint_error > tol {
            report.failure = Some(format!("endpoint error {:e}", report.max_endpoint_error));
            return report;
        }
        report.valid = true;
        report
    }

    fn check_joins(&self) -> Result<(), KobayashiError> {
        let Some(first) = self.links.first() else {
            return if self.p == self.q { Ok(()) } else { Err(KobayashiError::InvalidChain("empty chain between distinct points".into())) };
        };
        let last = self.links.last().expect("nonempty");
        if (first.start - self.p).norm() > link_tolerance(self.p) {
            return Err(KobayashiError::InvalidChain(format!("first link starts at {} not {}", first.start, self.p)));
        }
        if (last.end - self.q).norm() > link_tolerance(self.q) {
            return Err(KobayashiError::InvalidChain(format!("last link ends at {} not {}", last.end, self.q)));
        }
        for (i, w) in self.links.windows(2).enumerate() {
            if (w[0].end - w[1].start).norm() > link_tolerance(w[0].end) {
                return Err(KobayashiError::InvalidChain(format!("links {i} and {} do not meet", i + 1)));
            }
        }
        Ok(())
    }

    /// This chain followed by `other`.
    pub fn concat(&self, other: &DiscChain) -> Result<DiscChain, KobayashiError> {
        if (self.q - other.p).norm() > link_tolerance(self.q) {
            return Err(KobayashiError::InvalidChain(format!("chain ends at {} but the next starts at {}", self.q, other.p)));
        }
        let mut links = self.links.clone();
        links.extend(other.links.iter().cloned());
        Ok(DiscChain { p: self.p, q: other.q, links })
    }
}

/// `Σ ω(a_i, b_i)` after checking that the links join up.
pub fn chain_length(chain: &DiscChain) -> Result<f64, KobayashiError> {
    chain.check_joins()?;
    Ok(chain.links.iter().map(DiscLink::length).sum())
}

/// Search effort for [`upper_bound_distance`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerBudget {
    pub restarts: usize,
    pub max_links: usize,
    pub evals_per_restart: usize,
    pub seed: u64,
}

impl Default for OptimizerBudget {
    fn default() -> Self {
        Self { restarts: 8, max_links: 4, evals_per_restart: 400, seed: 0x6b6f_6261_6c74 }
    }
}

/// The disc templates tried on every link, beyond the inscribed disks.
pub fn template_dictionary(domain: &Domain) -> Vec<DiscTemplate> {
    let zero = Complex64::new(0.0, 0.0);
    let out = match domain.canonical() {
        Domain::UnitDisk => vec![DiscTemplate::Disk { center: zero, radius: 1.0 }],
        Domain::EuclideanDisk { center, radius } => vec![DiscTemplate::Disk { center, radius }],
        Domain::PuncturedDisk => vec![DiscTemplate::PuncturedDisk { center: zero, radius: 1.0, puncture: zero }],
        Domain::Annulus { inner } => vec![DiscTemplate::Annulus { inner }],
        _ => {
            let punctures = domain.punctures();
            let nearest = |b: Complex64| {
                punctures.iter().filter(|c| **c != b).map(|c| (c - b).norm()).fold(f64::INFINITY, f64::min)
            };
            match domain.bounding_disk() {
                None => match punctures.len() {
                    0 => vec![DiscTemplate::Plane],
                    1 => vec![DiscTemplate::PuncturedPlane { puncture: punctures[0] }],
                    n => {
                        let mut v: Vec<DiscTemplate> = punctures
                            .iter()
                            .map(|b| DiscTemplate::PuncturedDisk { center: *b, radius: nearest(*b), puncture: *b })
                            .collect();
                        let centroid = punctures.iter().sum::<Complex64>() / n as f64;
                        let radius = punctures.iter().map(|b| (b - centroid).norm()).fold(0.0, f64::max);
                        v.push(DiscTemplate::Exterior { center: centroid, radius });
                        if n == 2 {
                            v.push(DiscTemplate::Lattice { base: punctures[0], step: punctures[1] - punctures[0] });
                        }
                        v
                    }
                },
                Some((center, radius)) => match punctures.len() {
                    0 => vec![DiscTemplate::Disk { center, radius }],
                    1 => vec![DiscTemplate::PuncturedDisk { center, radius, puncture: punctures[0] }],
                    _ => punctures
                        .iter()
                        .map(|b| {
                            let r = nearest(*b).min(radius - (b - center).norm());
                            DiscTemplate::PuncturedDisk { center: *b, radius: r, puncture: *b }
                        })
                        .collect(),
                },
            }
        }
    };
    out.into_iter().filter(|t| t.fits(domain)).collect()
}

/// The disk around `centre` inscribed in `domain`, shrunk slightly so that it
/// passes the structural containment check.
fn inscribed(domain: &Domain, centre: Complex64) -> Option<DiscTemplate> {
    let r = domain.boundary_distance(centre);
    (domain.contains(centre) && r.is_finite() && r > 0.0).then_some(DiscTemplate::Disk { center: centre, radius: r * (1.0 - 1e-9) })
}

struct Problem<'a> {
    domain: &'a Domain,
    p: Complex64,
    q: Complex64,
    links: usize,
    templates: Vec<DiscTemplate>,
}

impl Problem<'_> {
    fn dimension(&self) -> usize {
        2 * (self.links - 1) + 2 * self.links
    }

    fn nodes(&self, x: &[f64]) -> Vec<Complex64> {
        let mut nodes = vec![self.p];
        for i in 0..self.links - 1 {
            nodes.push(Complex64::new(x[2 * i], x[2 * i + 1]));
        }
        nodes.push(self.q);
        nodes
    }

    /// Best template and its cost for the `i`-th link.
    fn best_link(&self, x: &[f64], nodes: &[Complex64], i: usize) -> Option<(f64, DiscTemplate)> {
        let (a, b) = (nodes[i], nodes[i + 1]);
        let off = 2 * (self.links - 1) + 2 * i;
        let centre = 0.5 * (a + b) + (b - a).norm() * Complex64::new(x[off], x[off + 1]);
        let mut best: Option<(f64, DiscTemplate)> = None;
        for t in self.templates.iter().copied().chain(inscribed(self.domain, centre)) {
            if let Some(c) = t.cost(a, b) {
                if best.is_none_or(|(bc, _)| c < bc) {
                    best = Some((c, t));
                }
            }
        }
        best
    }

    fn objective(&self, x: &[f64]) -> f64 {
        let nodes = self.nodes(x);
        let mut total = 0.0;
        for i in 0..self.links {
            let (a, b) = (nodes[i], nodes[i + 1]);
            if !self.domain.contains(a) || !self.domain.contains(b) {
                total += INFEASIBLE * (1.0 + (b - a).norm());
                continue;
            }
            total += match self.best_link(x, &nodes, i) {
                Some((c, _)) => c,
                None => INFEASIBLE * (1.0 + (b - a).norm()),
            };
        }
        total
    }

    fn chain(&self, x: &[f64]) -> Option<DiscChain> {
        let nodes = self.nodes(x);
        let mut links = Vec::with_capacity(self.links);
        for i in 0..self.links {
            let (_, t) = self.best_link(x, &nodes, i)?;
            links.push(t.link(nodes[i], nodes[i + 1])?);
        }
        Some(DiscChain { p: self.p, q: self.q, links })
    }

    fn start(&self, restart: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((self.links as u64) << 32) ^ restart as u64);
        let scale = (self.q - self.p).norm().max(1e-3);
        let mut x = Vec::with_capacity(self.dimension());
        for i in 1..self.links {
            let mut z = self.p + (self.q - self.p) * (i as f64 / self.links as f64);
            if restart > 0 {
                z += scale * 0.5 * Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
            x.extend([z.re, z.im]);
        }
        for _ in 0..self.links {
            let o = if restart > 0 { 0.3 * Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) } else { Complex64::new(0.0, 0.0) };
            x.extend([o.re, o.im]);
        }
        x
    }

    fn steps(&self) -> Vec<f64> {
        let scale = 0.25 * (self.q - self.p).norm().max(1e-3);
        let mut s = vec![scale; 2 * (self.links - 1)];
        s.extend(vec![0.25; 2 * self.links]);
        s
    }
}

/// Result of the chain search.
#[derive(Debug, Clone, Serialize)]
pub struct UpperBound {
    /// Length of the validated chain, or `+∞` when none was found.
    pub value: f64,
    pub chain: Option<DiscChain>,
    pub validation: Option<ChainValidation>,
    /// Best objective value after each evaluation, in a fixed order.
    pub trace: Vec<f64>,
    pub evals: usize,
}

/// Searches chains of at most `budget.max_links` discs from the template
/// dictionary and inscribed disks, by simplex descent over the intermediate
/// points and disk centres with seeded restarts.
pub fn upper_bound_distance(domain: &Domain, p: Complex64, q: Complex64, budget: &OptimizerBudget) -> Result<UpperBound, KobayashiError> {
    domain.validate()?;
    domain.require(p)?;
    domain.require(q)?;
    if budget.restarts == 0 || budget.max_links == 0 || budget.evals_per_restart == 0 {
        return Err(KobayashiError::InvalidBudget(format!("{budget:?}")));
    }
    let templates = template_dictionary(domain);
    let mut trace = Vec::new();
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    for links in 1..=budget.max_links {
        let problem = Problem { domain, p, q, links, templates: templates.clone() };
        let opts = SimplexOptions { max_evals: budget.evals_per_restart, ..Default::default() };
        let runs: Vec<_> = (0..budget.restarts)
            .into_par_iter()
            .map(|r| minimize(|x| problem.objective(x), &problem.start(r, budget.seed), &problem.steps(), opts))
            .collect();
        for run in runs {
            let floor = trace.last().copied().unwrap_or(f64::INFINITY);
            trace.extend(run.trace.iter().map(|v| v.min(floor)));
            if best.as_ref().is_none_or(|(v, _, _)| run.value < *v) {
                best = Some((run.value, links, run.x));
            }
        }
    }
    let evals = trace.len();
    let none = |validation| UpperBound { value: f64::INFINITY, chain: None, validation, trace: trace.clone(), evals };
    let Some((value, links, x)) = best else { return Ok(none(None)) };
    if value >= INFEASIBLE {
        return Ok(none(None));
    }
    let problem = Problem { domain, p, q, links, templates };
    let Some(chain) = problem.chain(&x) else { return Ok(none(None)) };
    let validation = chain.validate(domain);
    if !validation.valid {
        return Ok(none(Some(validation)));
    }
    let value = chain_length(&chain)?;
    Ok(UpperBound { value, chain: Some(chain), validation: Some(validation), trace, evals })
}

/// A lower bound and the comparison that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub value: f64,
    pub method: String,
}

/// Largest of the available comparisons: the exact distance when the domain
/// is a model, exact distances on containing punctured disks, and the chart
/// bound of every containing twice-punctured plane.
pub fn lower_bound_distance(domain: &Domain, p: Complex64, q: Complex64, cfg: &ConstantsConfig) -> Result<LowerBound, KobayashiError> {
    domain.validate()?;
    domain.require(p)?;
    domain.require(q)?;
    if let Some(d) = domain.exact_distance(p, q)? {
        return Ok(LowerBound { value: d, method: format!("exact:{domain}") });
    }
    let mut best = LowerBound { value: 0.0, method: "trivial".into() };
    let punctures = domain.punctures();
    match domain.bounding_disk() {
        Some((center, radius)) if domain.complement_points().is_none() => {
            for b in &punctures {
                let sup = Domain::disk_minus(center, radius, vec![*b])?;
                if let Some(d) = sup.exact_distance(p, q)? {
                    if d > best.value {
                        best = LowerBound { value: d, method: format!("superset:{sup}") };
                    }
                }
            }
        }
        _ => {
            for (i, a) in punctures.iter().enumerate() {
                for b in &punctures[i + 1..] {
                    let d = completeness_lower_bound((p - a) / (b - a), (q - a) / (b - a), cfg)?;
                    if d > best.value {
                        best = LowerBound { value: d, method: format!("chart:plane-minus:{a},{b}") };
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Two-sided estimate of the Kobayashi distance.
#[derive(Debug, Clone, Serialize)]
pub struct DistanceEstimate {
    pub domain: String,
    pub p: Complex64,
    pub q: Complex64,
    pub lower: f64,
    pub upper: f64,
    pub lower_witness: String,
    pub upper_witness: Option<DiscChain>,
    pub validation: Option<ChainValidation>,
    pub evals: usize,
}

/// Slack allowed between an exact lower bound and a chain length that
/// realises it.
fn bound_slack(upper: f64) -> f64 {
    1e-9 * (1.0 + upper.abs())
}

/// Lower and upper bounds together. Fails if they cross.
pub fn estimate_distance(
    domain: &Domain,
    p: Complex64,
    q: Complex64,
    budget: &OptimizerBudget,
    cfg: &ConstantsConfig,
) -> Result<DistanceEstimate, KobayashiError> {
    let lower = lower_bound_distance(domain, p, q, cfg)?;
    let upper = upper_bound_distance(domain, p, q, budget)?;
    if lower.value > upper.value + bound_slack(upper.value) {
        return Err(KobayashiError::InconsistentBounds { lower: lower.value, upper: upper.value });
    }
    Ok(DistanceEstimate {
        domain: domain.to_string(),
        p,
        q,
        lower: lower.value.min(upper.value),
        upper: upper.value,
        lower_witness: lower.method,
        upper_witness: upper.chain,
        validation: upper.validation,
        evals: upper.evals,
    })
}

/// `d(z, z + h·v)/h` with the domain's exact distance.
pub fn metric_from_distance(domain: &Domain, z: Complex64, v: Complex64, h: f64) -> Result<f64, KobayashiError> {
    domain.validate()?;
    domain.require(z)?;
    let w = z + h * v;
    if !domain.contains(w) {
        return Err(KobayashiError::StepLeavesDomain { z, v: h * v });
    }
    let d = domain.exact_distance(z, w)?.ok_or_else(|| KobayashiError::NoExactDistance(domain.to_string()))?;
    Ok(d / h)
}

/// Distances on `inner ⊆ outer` between the same two points.
#[derive(Debug, Clone, Serialize)]
pub struct InclusionComparison {
    pub inner: DistanceEstimate,
    pub outer: DistanceEstimate,
    /// The outer lower bound does not exceed the inner upper bound.
    pub consistent: bool,
}

/// Estimates both distances and checks that the inclusion does not increase
/// them.
pub fn inclusion_compare(
    inner: &Domain,
    outer: &Domain,
    p: Complex64,
    q: Complex64,
    budget: &OptimizerBudget,
    cfg: &ConstantsConfig,
) -> Result<InclusionComparison, KobayashiError> {
    inner.validate()?;
    outer.validate()?;
    if !outer.contains_domain(inner) {
        return Err(KobayashiError::NotContained { sub: inner.to_string(), sup: outer.to_string() });
    }
    let inner_est = estimate_distance(inner, p, q, budget, cfg)?;
    let outer_est = estimate_distance(outer, p, q, budget, cfg)?;
    let consistent = outer_est.lower <= inner_est.upper + bound_slack(inner_est.upper);
    Ok(InclusionComparison { inner: inner_est, outer: outer_est, consistent })
}
