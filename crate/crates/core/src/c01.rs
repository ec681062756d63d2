//! The twice-punctured plane `ℂ∖{0, 1}`.
//!
//! Lower bounds for the Kobayashi–Royden metric come from the lattice
//! construction. A disc `f: 𝔻 → ℂ∖{0,1}` has a logarithm `g`, then
//! `h = (i/2π)g` omits the integers and `k = (−i/π)·log(h + √(h² − 1))`
//! omits every point `m ± i·arcosh(n)/π`. The image of `k` contains no disk
//! of radius above 2, so the Bloch–Landau theorem caps `|k′(0)| ≤ 2/c`.
//! Unwinding the chain gives `|f′(0)| ≤ (4π²/c)·|f(0)|·|√(h(0)² − 1)|`.

use std::f64::consts::{LN_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::holo::{EvalError, HoloFunction, Jet};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
/// `|f|`, `|f − 1|` or `|h² − 1|` below this aborts a lattice map.
const LATTICE_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum C01Error {
    #[error("{0} is a puncture of the twice-punctured plane")]
    Puncture(Complex64),
    #[error("invalid constants: {0}")]
    InvalidConfig(String),
    #[error("step {step} is too large for z = {z}: keep 10·step below the distance to 0 and 1")]
    StepTooLarge { z: Complex64, step: f64 },
    #[error("the map takes the omitted value {value} near z = {at}")]
    OmittedValueHit { at: Complex64, value: Complex64 },
    #[error("{0} is outside the evaluation region")]
    OutsideRegion(Complex64),
    #[error("branch tracking failed near {at}: {reason}")]
    Continuation { at: Complex64, reason: String },
    #[error(transparent)]
    Eval(#[from] Box<EvalError>),
}

impl From<EvalError> for C01Error {
    fn from(e: EvalError) -> Self {
        C01Error::Eval(Box::new(e))
    }
}

fn check_point(z: Complex64) -> Result<(), C01Error> {
    if z.is_finite() && z != Complex64::new(0.0, 0.0) && z != ONE {
        Ok(())
    } else {
        Err(C01Error::Puncture(z))
    }
}

/// Constants feeding the metric lower bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsConfig {
    /// A lower bound for the Bloch–Landau constant.
    pub bloch_landau_c: f64,
    /// Radius of the charts around 0 and 1. The chart at infinity is
    /// `|z| > 1/chart_radius`.
    pub chart_radius: f64,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        Self { bloch_landau_c: 0.5, chart_radius: 0.5 }
    }
}

impl ConstantsConfig {
    pub fn new(bloch_landau_c: f64, chart_radius: f64) -> Result<Self, C01Error> {
        let cfg = Self { bloch_landau_c, chart_radius };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), C01Error> {
        if !(self.bloch_landau_c > 0.0 && self.bloch_landau_c.is_finite()) {
            return Err(C01Error::InvalidConfig(format!("bloch_landau_c must be positive, got {}", self.bloch_landau_c)));
        }
        if !(self.chart_radius > 0.0 && self.chart_radius < 1.0) {
            return Err(C01Error::InvalidConfig(format!("chart_radius must be in (0, 1), got {}", self.chart_radius)));
        }
        Ok(())
    }

    /// `C = 4π²/c`, the factor in `|f′(0)| ≤ C·|z0|·|√(h² − 1)|`.
    pub fn chain_constant(&self) -> f64 {
        4.0 * PI * PI / self.bloch_landau_c
    }

    /// `C′ = C·√(1/ln²(1/ρ) + 1/4π²)`, the factor in
    /// `|f′(0)| ≤ C′·|z|·|Log z|` for `|z| < ρ`.
    pub fn chart_constant(&self) -> f64 {
        let l = -self.chart_radius.ln();
        self.chain_constant() * (1.0 / (l * l) + 1.0 / (4.0 * PI * PI)).sqrt()
    }

    /// Largest `|Log z|` on the chart boundary circle `|z| = ρ`.
    pub fn chart_exit_log(&self) -> f64 {
        let l = -self.chart_radius.ln();
        (l * l + PI * PI).sqrt()
    }
}

/// Certified bounds for the Kobayashi–Royden metric at `(point, direction)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricInterval {
    pub point: Complex64,
    pub direction: Complex64,
    pub lower: f64,
    pub upper: f64,
}

/// The six automorphisms of `ℂ∖{0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Anharmonic {
    Identity,
    OneMinus,
    Inverse,
    InverseOneMinus,
    ZOverZMinusOne,
    ZMinusOneOverZ,
}

impl Anharmonic {
    pub const ALL: [Anharmonic; 6] = [
        Anharmonic::Identity,
        Anharmonic::OneMinus,
        Anharmonic::Inverse,
        Anharmonic::InverseOneMinus,
        Anharmonic::ZOverZMinusOne,
        Anharmonic::ZMinusOneOverZ,
    ];

    pub fn apply(self, z: Complex64) -> Complex64 {
        match self {
            Anharmonic::Identity => z,
            Anharmonic::OneMinus => ONE - z,
            Anharmonic::Inverse => z.inv(),
            Anharmonic::InverseOneMinus => (ONE - z).inv(),
            Anharmonic::ZOverZMinusOne => z / (z - ONE),
            Anharmonic::ZMinusOneOverZ => (z - ONE) / z,
        }
    }

    /// `φ(z) − 1`, formed without cancellation.
    pub fn minus_one(self, z: Complex64) -> Complex64 {
        match self {
            Anharmonic::Identity => z - ONE,
            Anharmonic::OneMinus => -z,
            Anharmonic::Inverse => (ONE - z) / z,
            Anharmonic::InverseOneMinus => z / (ONE - z),
            Anharmonic::ZOverZMinusOne => (z - ONE).inv(),
            Anharmonic::ZMinusOneOverZ => -z.inv(),
        }
    }

    /// `|φ(z)| / |φ′(z)|`, which is `|z|`, `|1 − z|` or their product.
    pub fn modulus_over_derivative(self, z: Complex64) -> f64 {
        let (r0, r1) = (z.norm(), (ONE - z).norm());
        match self {
            Anharmonic::Identity | Anharmonic::Inverse => r0,
            Anharmonic::OneMinus | Anharmonic::InverseOneMinus => r1,
            Anharmonic::ZOverZMinusOne | Anharmonic::ZMinusOneOverZ => r0 * r1,
        }
    }

    pub fn derivative(self, z: Complex64) -> Complex64 {
        match self {
            Anharmonic::Identity => ONE,
            Anharmonic::OneMinus => -ONE,
            Anharmonic::Inverse => -(z * z).inv(),
            Anharmonic::InverseOneMinus => ((ONE - z) * (ONE - z)).inv(),
            Anharmonic::ZOverZMinusOne => -((z - ONE) * (z - ONE)).inv(),
            Anharmonic::ZMinusOneOverZ => (z * z).inv(),
        }
    }
}

/// `μ(z) = (1+|z|^{1/3})^{1/2}/|z|^{5/6} · (1+|z−1|^{1/3})^{1/2}/|z−1|^{5/6}`.
pub fn mu(z: Complex64) -> Result<f64, C01Error> {
    check_point(z)?;
    let factor = |r: f64| (1.0 + r.cbrt()).sqrt() / r.powf(5.0 / 6.0);
    Ok(factor(z.norm()) * factor((z - ONE).norm()))
}

/// Gaussian curvature `−Δ log μ / μ²` of `μ|dz|`, with the Laplacian taken
/// by five-point central differences.
pub fn mu_curvature(z: Complex64, step: f64) -> Result<f64, C01Error> {
    check_point(z)?;
    if !(step > 0.0) || z.norm().min((z - ONE).norm()) <= 10.0 * step {
        return Err(C01Error::StepTooLarge { z, step });
    }
    let lm = |w: Complex64| mu(w).map(f64::ln);
    let h = Complex64::new(step, 0.0);
    let v = Complex64::new(0.0, step);
    let lap = (lm(z + h)? + lm(z - h)? + lm(z + v)? + lm(z - v)? - 4.0 * lm(z)?) / (step * step);
    let m = mu(z)?;
    Ok(-lap / (m * m))
}

/// Chart lower bound `|v|/(C′|z||Log z|)` near 0, 1 and ∞; zero elsewhere.
pub fn f_lower(z: Complex64, v: Complex64, cfg: &ConstantsConfig) -> Result<f64, C01Error> {
    check_point(z)?;
    cfg.validate()?;
    let rho = cfg.chart_radius;
    let cp = cfg.chart_constant();
    let w = if z.norm() < rho {
        z
    } else if (ONE - z).norm() < rho {
        ONE - z
    } else if z.norm() > 1.0 / rho {
        // Invariance under 1/z turns the bound at 1/z into the same formula.
        z
    } else {
        return Ok(0.0);
    };
    Ok(v.norm() / (cp * w.norm() * w.ln().norm()))
}

/// `Log(1 + u)` without cancellation for small `u`.
fn ln_1p(u: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * u.re + u.norm_sqr()).ln_1p();
    Complex64::new(re, u.im.atan2(1.0 + u.re))
}

/// `min_m |√(h_m² − 1)|` over `h_m = (i/2π)(log + 2πim)`. The product
/// `(h − 1)(h + 1)` avoids the cancellation in `h² − 1` near `h = ±1`.
fn chain_root_factor(log: Complex64) -> f64 {
    let h0 = I / TAU * log;
    let centre = h0.re.round() as i64;
    (centre - 3..=centre + 3)
        .map(|m| ((h0 - (m + 1) as f64).norm() * (h0 - (m - 1) as f64).norm()).sqrt())
        .fold(f64::INFINITY, f64::min)
}

/// Upper bound for `|f′(0)|` over all holomorphic `f: 𝔻 → ℂ∖{0,1}` with
/// `f(0) = z0`.
///
/// The raw chain bound `(4π²/c)·|w|·min_m |√(h_m² − 1)|` is evaluated at
/// `w = φ(z0)` for each automorphism `φ` and divided by `|φ′(z0)|`; the
/// smallest is kept. Near `w = 1` the logarithm is taken from `w − 1` in
/// closed form so points next to a puncture keep full precision.
pub fn landau_derivative_bound(z0: Complex64, cfg: &ConstantsConfig) -> Result<f64, C01Error> {
    check_point(z0)?;
    cfg.validate()?;
    let c = cfg.chain_constant();
    Ok(Anharmonic::ALL
        .iter()
        .map(|a| {
            let w = a.apply(z0);
            let u = a.minus_one(z0);
            let log = if u.norm() < 0.5 { ln_1p(u) } else { w.ln() };
            c * a.modulus_over_derivative(z0) * chain_root_factor(log)
        })
        .fold(f64::INFINITY, f64::min))
}

/// Lower bound `|v| / landau_derivative_bound(z)`, valid at every point.
pub fn f_lower_chain(z: Complex64, v: Complex64, cfg: &ConstantsConfig) -> Result<f64, C01Error> {
    Ok(v.norm() / landau_derivative_bound(z, cfg)?)
}

/// Upper bound from the affine disc `ζ ↦ z + dist(z, {0,1})·ζ` and from the
/// punctured disk, transported through the six automorphisms.
pub fn f_upper(z: Complex64, v: Complex64) -> Result<f64, C01Error> {
    check_point(z)?;
    let mut best = v.norm() / z.norm().min((z - ONE).norm());
    for a in Anharmonic::ALL {
        let r = a.apply(z).norm();
        if r > 0.0 && r < 1.0 {
            // Punctured-disk metric at φ(z) applied to φ′(z)·v.
            best = best.min(v.norm() / (-2.0 * a.modulus_over_derivative(z) * r.ln()));
        }
    }
    Ok(best)
}

/// Best available bounds at `(z, v)`: the lower end is the larger of the
/// chart and chain bounds.
pub fn metric_interval(z: Complex64, v: Complex64, cfg: &ConstantsConfig) -> Result<MetricInterval, C01Error> {
    let lower = f_lower(z, v, cfg)?.max(f_lower_chain(z, v, cfg)?);
    Ok(MetricInterval { point: z, direction: v, lower, upper: f_upper(z, v)? })
}

/// Lower bound for the Kobayashi distance from `z` to `a`.
///
/// In the chart `|w| < ρ` around 0 the metric is at least
/// `|dw|/(C′|w||Log w|)`, which bounds the change of `log|log w|` along any
/// branch. A curve that leaves the chart re-enters where
/// `|Log w| ≤ √(ln²(1/ρ) + π²)`, so the bound is
/// `(1/C′)·log(|Log w_in| / max(|Log w_out|, that exit value))` with `w_in`
/// the point deeper in the chart. The same holds at 1 and ∞ through the
/// automorphisms; the largest of the three is returned.
pub fn completeness_lower_bound(z: Complex64, a: Complex64, cfg: &ConstantsConfig) -> Result<f64, C01Error> {
    check_point(z)?;
    check_point(a)?;
    cfg.validate()?;
    let exit = cfg.chart_exit_log();
    let chart = |p: Complex64| (p.norm() < cfg.chart_radius).then(|| p.ln().norm());
    let mut best: f64 = 0.0;
    for phi in [Anharmonic::Identity, Anharmonic::OneMinus, Anharmonic::Inverse] {
        let (lz, la) = (chart(phi.apply(z)), chart(phi.apply(a)));
        let value = match (lz, la) {
            (Some(x), Some(y)) => x.max(y) / x.min(y).max(exit),
            (Some(x), None) | (None, Some(x)) => x / exit,
            (None, None) => continue,
        };
        best = best.max(value.ln());
    }
    Ok(best / cfg.chart_constant())
}

/// `Q(w) = exp(−2πi·cos(πw))`, the map that undoes the lattice chain.
pub fn lattice_cover(w: Complex64) -> Jet {
    let q = (-TAU * I * (PI * w).cos()).exp();
    Jet::new(q, TAU * PI * I * (PI * w).sin() * q)
}

/// Solutions of `Q(w) = z` with `|Re w| ≲ 2` for the branches `|m| ≤ depth`.
pub fn lattice_preimages(z: Complex64, depth: i32) -> Result<Vec<Complex64>, C01Error> {
    check_point(z)?;
    let mut out = Vec::new();
    for m in -depth..=depth {
        let h = I / TAU * (z.ln() + TAU * I * f64::from(m));
        let w = acos(h) / PI;
        for j in -1..=1 {
            out.push(w + 2.0 * f64::from(j));
            out.push(-w + 2.0 * f64::from(j));
        }
    }
    Ok(out)
}

fn acos(h: Complex64) -> Complex64 {
    // acos h = −i·log(h + i√(1 − h²)), principal.
    -I * (h + I * (ONE - h * h).sqrt()).ln()
}

/// Distance from `w` to the values omitted by `k`, namely the points where
/// `cos(πw)` is an integer: `m ± i·arcosh(n)/π` for `n ≥ 1` and `m + 1/2`.
pub fn distance_to_omitted(w: Complex64) -> f64 {
    let mut best = f64::INFINITY;
    let m0 = w.re.floor() as i64;
    let y = w.im.abs();
    // cosh(πy) locates the nearest height index.
    let n0 = (PI * y).cosh().min(1e15) as i64;
    for m in m0 - 1..=m0 + 2 {
        let x = m as f64;
        best = best.min((w - Complex64::new(x + 0.5, 0.0)).norm());
        for n in (n0 - 2).max(1)..=n0 + 2 {
            let height = (n as f64).acosh() / PI;
            best = best.min(Complex64::new(w.re - x, y - height).norm());
        }
    }
    best
}

/// Heights `log(n + √(n² − 1))` of the omitted lattice and their gaps.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeGapReport {
    pub heights: Vec<f64>,
    /// `gaps[j] = heights[j + 1] − heights[j]`.
    pub gaps: Vec<f64>,
    pub max_gap: f64,
    /// `n` at the lower end of the largest gap.
    pub max_gap_at: usize,
    pub horizontal_spacing: f64,
    /// `log 4`, the bound every gap stays under.
    pub gap_bound: f64,
    pub within_bound: bool,
}

/// Scans the lattice heights for `n = 1…n_max`.
pub fn lattice_gaps(n_max: usize) -> LatticeGapReport {
    let n_max = n_max.max(2);
    let heights: Vec<f64> = (1..=n_max).map(|n| (n as f64).acosh()).collect();
    let gaps: Vec<f64> = heights.windows(2).map(|w| w[1] - w[0]).collect();
    let (idx, max_gap) = gaps
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, g)| if g > acc.1 { (i, g) } else { acc });
    let gap_bound = 2.0 * LN_2;
    LatticeGapReport {
        within_bound: gaps.iter().all(|g| *g <= gap_bound),
        heights,
        gaps,
        max_gap,
        max_gap_at: idx + 1,
        horizontal_spacing: 1.0,
        gap_bound,
    }
}

/// A disk on which a lattice map is built and sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskRegion {
    pub center: Complex64,
    pub radius: f64,
}

impl DiskRegion {
    pub fn unit() -> Self {
        Self { center: Complex64::new(0.0, 0.0), radius: 1.0 }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// Points of an `n × n` grid over the bounding square that lie within
    /// `0.95·radius` of the center.
    pub fn grid(&self, n: usize) -> Vec<Complex64> {
        let n = n.max(2);
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let x = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
                let y = -1.0 + 2.0 * j as f64 / (n - 1) as f64;
                let u = Complex64::new(x, y) * self.radius;
                if u.norm() <= 0.95 * self.radius {
                    out.push(self.center + u);
                }
            }
        }
        out
    }

    /// `count` points: a polar grid scaled by `0.95·radius`.
    pub fn polar_grid(&self, rings: usize, spokes: usize) -> Vec<Complex64> {
        let mut out = vec![self.center];
        for i in 1..=rings {
            let r = 0.95 * self.radius * i as f64 / rings as f64;
            for j in 0..spokes {
                out.push(self.center + Complex64::from_polar(r, TAU * j as f64 / spokes as f64));
            }
        }
        out
    }
}

/// Values of the lattice chain at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticePoint {
    pub z: Complex64,
    pub f: Complex64,
    pub g: Complex64,
    pub h: Complex64,
    pub k: Complex64,
    pub k_derivative: Complex64,
}

/// `f` together with continued branches of `g = log f`, `√(h² − 1)` and
/// `log(h + √(h² − 1))` on a disk, all starting from principal values at
/// `base`.
#[derive(Debug, Clone)]
pub struct LatticeMapChain {
    pub f: HoloFunction,
    pub region: DiskRegion,
    pub base: Complex64,
    base_state: Track,
}

#[derive(Debug, Clone, Copy)]
struct Track {
    z: Complex64,
    f: Complex64,
    /// `f′/f`.
    dlog_f: Complex64,
    g: Complex64,
    /// Continued `log(h² − 1)`.
    log_q: Complex64,
    /// Continued `log(h + √(h² − 1))`.
    log_big_h: Complex64,
}

impl Track {
    fn h(&self) -> Complex64 {
        I / TAU * self.g
    }

    fn s(&self) -> Complex64 {
        (0.5 * self.log_q).exp()
    }

    fn h_derivative(&self) -> Complex64 {
        I / TAU * self.dlog_f
    }

    /// Derivatives of the tracked logarithms with respect to `z`.
    fn rates(&self) -> (Complex64, Complex64, Complex64) {
        let hp = self.h_derivative();
        let s = self.s();
        (self.dlog_f, 2.0 * self.h() * hp / (s * s), hp / s)
    }
}

fn jet_checked(f: &HoloFunction, z: Complex64) -> Result<Jet, C01Error> {
    let j = f.jet(z)?;
    if j.value.norm() < LATTICE_ZERO || (j.value - ONE).norm() < LATTICE_ZERO {
        return Err(C01Error::OmittedValueHit { at: z, value: j.value });
    }
    Ok(j)
}

fn start_track(f: &HoloFunction, z: Complex64) -> Result<Track, C01Error> {
    let j = jet_checked(f, z)?;
    let g = j.value.ln();
    let h = I / TAU * g;
    let q = h * h - ONE;
    if q.norm() < LATTICE_ZERO {
        return Err(C01Error::OmittedValueHit { at: z, value: j.value });
    }
    let s = q.sqrt();
    Ok(Track { z, f: j.value, dlog_f: j.derivative / j.value, g, log_q: q.ln(), log_big_h: (h + s).ln() })
}

/// Advances every tracked logarithm from `a` to `z1`. Each principal
/// increment must agree with the trapezoid integral of its derivative so a
/// hidden winding cannot slip through.
fn step_track(f: &HoloFunction, a: &Track, z1: Complex64) -> Result<Option<Track>, C01Error> {
    const AGREE: f64 = 0.1;
    let j = jet_checked(f, z1)?;
    let dz = z1 - a.z;
    let dg = (j.value / a.f).ln();
    let dlog_f = j.derivative / j.value;
    if (dg - 0.5 * dz * (a.dlog_f + dlog_f)).norm() > AGREE {
        return Ok(None);
    }
    let g = a.g + dg;
    let h = I / TAU * g;
    let q = h * h - ONE;
    if q.norm() < LATTICE_ZERO {
        return Err(C01Error::OmittedValueHit { at: z1, value: j.value });
    }
    let prev_q = (a.log_q).exp();
    let log_q = a.log_q + (q / prev_q).ln();
    let s = (0.5 * log_q).exp();
    let big_h = h + s;
    let log_big_h = a.log_big_h + (big_h / (a.h() + a.s())).ln();
    let next = Track { z: z1, f: j.value, dlog_f, g, log_q, log_big_h };
    let (_, rq0, rl0) = a.rates();
    let (_, rq1, rl1) = next.rates();
    let ok_q = (log_q - a.log_q - 0.5 * dz * (rq0 + rq1)).norm() <= AGREE;
    let ok_l = (log_big_h - a.log_big_h - 0.5 * dz * (rl0 + rl1)).norm() <= AGREE;
    Ok((ok_q && ok_l).then_some(next))
}

fn march(f: &HoloFunction, start: Track, end: Complex64) -> Result<Track, C01Error> {
    const MAX_HALVINGS: u32 = 40;
    let mut cur = start;
    let span = end - start.z;
    if span.norm() == 0.0 {
        return Ok(cur);
    }
    let mut t: f64 = 0.0;
    let mut dt: f64 = 1.0 / 16.0;
    while t < 1.0 {
        let t1 = (t + dt).min(1.0);
        match step_track(f, &cur, start.z + span * t1)? {
            Some(next) => {
                cur = next;
                t = t1;
                dt = (dt * 2.0).min(0.25);
            }
            None => {
                dt *= 0.5;
                if dt < 0.5f64.powi(MAX_HALVINGS as i32) {
                    return Err(C01Error::Continuation { at: start.z + span * t, reason: "step refinement did not converge".into() });
                }
            }
        }
    }
    Ok(cur)
}

impl LatticeMapChain {
    /// Evaluates the chain at `z` by continuing along `[base, z]`.
    pub fn eval(&self, z: Complex64) -> Result<LatticePoint, C01Error> {
        if !self.region.contains(z) {
            return Err(C01Error::OutsideRegion(z));
        }
        let t = march(&self.f, self.base_state, z)?;
        let hp = t.h_derivative();
        Ok(LatticePoint {
            z,
            f: t.f,
            g: t.g,
            h: t.h(),
            k: -I / PI * t.log_big_h,
            k_derivative: -I / PI * hp / t.s(),
        })
    }

    /// `|f − exp(−2πi·cos(πk))| / |f|` at `z`.
    pub fn round_trip_error(&self, z: Complex64) -> Result<f64, C01Error> {
        let p = self.eval(z)?;
        Ok((lattice_cover(p.k).value - p.f).norm() / p.f.norm())
    }

    /// Samples the chain on an `n × n` grid.
    pub fn verify(&self, n: usize) -> Result<LatticeMapReport, C01Error> {
        let mut report = LatticeMapReport {
            samples: 0,
            max_round_trip: 0.0,
            min_lattice_distance: f64::INFINITY,
            min_integer_distance: f64::INFINITY,
        };
        for z in self.region.grid(n) {
            let p = self.eval(z)?;
            report.samples += 1;
            report.max_round_trip = report.max_round_trip.max((lattice_cover(p.k).value - p.f).norm() / p.f.norm());
            report.min_lattice_distance = report.min_lattice_distance.min(distance_to_omitted(p.k));
            report.min_integer_distance = report.min_integer_distance.min((p.h - p.h.re.round()).norm());
        }
        Ok(report)
    }
}

/// Grid check of a [`LatticeMapChain`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeMapReport {
    pub samples: usize,
    pub max_round_trip: f64,
    /// Smallest distance from `k` to its omitted set.
    pub min_lattice_distance: f64,
    /// Smallest distance from `h` to an integer.
    pub min_integer_distance: f64,
}

/// Builds the lattice chain for `f` on `region` with branches fixed at
/// `base`. `f` is sample-checked to omit 0 and 1 first.
pub fn build_lattice_map(f: HoloFunction, region: DiskRegion, base: Complex64) -> Result<LatticeMapChain, C01Error> {
    if !region.contains(base) {
        return Err(C01Error::OutsideRegion(base));
    }
    for z in region.polar_grid(24, 48) {
        jet_checked(&f, z)?;
    }
    let base_state = start_track(&f, base)?;
    Ok(LatticeMapChain { f, region, base, base_state })
}
