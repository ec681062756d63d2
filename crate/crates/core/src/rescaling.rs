//! Zalcman rescaling: the maximum of `(1 − |z|)|f′(z)|`, the map
//! `r(z) = a + z/f′(a)`, and the derivative bound on the rescaled disc.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domains::Domain;
use crate::holo::{nth_root, ContinuationError, EvalError, HoloFunction};
use crate::simplex::{minimize, SimplexOptions};

/// The disk is shrunk by this factor before rescaling so that `g` vanishes
/// on the unit circle.
pub const SHRINK: f64 = 0.999;
/// Relative slack in the bound `|(f∘r)′| ≤ 2`.
pub const TWO_BOUND_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum RescalingError {
    #[error("derivative vanishes on the sampled disk")]
    Flat,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Continuation(#[from] ContinuationError),
    #[error("function vanishes near {0}")]
    ZeroOnDisk(Complex64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("|f_n′(0)| does not grow at n = {0}")]
    NotDiverging(u32),
}

/// Search settings for [`zalcman_rescale`] and [`verify_two_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescalingConfig {
    /// Rings and spokes of the polar grid scan.
    pub resolution: usize,
    /// Points of `D′` where `|(f∘r)′|` is sampled.
    pub samples: usize,
}

impl Default for RescalingConfig {
    fn default() -> Self {
        Self { resolution: 201, samples: 10_000 }
    }
}

/// One rescaling of `f` (already shrunk by [`SHRINK`]) at `a`.
#[derive(Clone, Serialize)]
pub struct RescalingStep {
    #[serde(skip)]
    pub f: HoloFunction,
    pub label: String,
    pub a: Complex64,
    /// `f′(a)`.
    pub fpa: Complex64,
    /// `δ(a) = 1 − |a|`.
    pub boundary_distance: f64,
    /// `D(a, δ(a)/2)`.
    pub inner_disc: Domain,
    /// Radius of `D′ = r⁻¹(inner_disc)`, equal to `δ(a)|f′(a)|/2`.
    pub preimage_radius: f64,
    /// `|(f∘r)′(0)|`.
    pub normalization: f64,
    /// `g(a) = δ(a)|f′(a)|`.
    pub g_max: f64,
}

impl std::fmt::Debug for RescalingStep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RescalingStep")
            .field("label", &self.label)
            .field("a", &self.a)
            .field("fpa", &self.fpa)
            .field("preimage_radius", &self.preimage_radius)
            .finish()
    }
}

fn g_at(f: &HoloFunction, z: Complex64) -> f64 {
    let r = z.norm();
    if r >= 1.0 {
        return 0.0;
    }
    match f.derivative(z) {
        Ok(d) if d.is_finite() => (1.0 - r) * d.norm(),
        _ => f64::NAN,
    }
}

impl RescalingStep {
    /// The step at a caller-chosen point, which need not be the maximiser.
    pub fn at_point(f: HoloFunction, a: Complex64) -> Result<Self, RescalingError> {
        if !(a.norm() < 1.0) {
            return Err(RescalingError::InvalidArgument(format!("{a} is not in the unit disk")));
        }
        let fpa = f.derivative(a)?;
        if fpa.norm() == 0.0 || !fpa.is_finite() {
            return Err(RescalingError::Flat);
        }
        let delta = 1.0 - a.norm();
        let inner_disc = Domain::EuclideanDisk { center: a, radius: delta / 2.0 };
        let mut step = Self {
            label: f.label(),
            f,
            a,
            fpa,
            boundary_distance: delta,
            inner_disc,
            preimage_radius: delta * fpa.norm() / 2.0,
            normalization: 0.0,
            g_max: delta * fpa.norm(),
        };
        step.normalization = step.rescaled_derivative(Complex64::new(0.0, 0.0))?.norm();
        Ok(step)
    }

    /// `r(z) = a + z/f′(a)`.
    pub fn rescale(&self, z: Complex64) -> Complex64 {
        self.a + z / self.fpa
    }

    /// `f∘r`.
    pub fn rescaled(&self) -> HoloFunction {
        self.f.precompose_affine(self.a, 1.0 / self.fpa)
    }

    /// `(f∘r)′(z) = f′(r(z))/f′(a)`.
    pub fn rescaled_derivative(&self, z: Complex64) -> Result<Complex64, RescalingError> {
        Ok(self.f.derivative(self.rescale(z))? / self.fpa)
    }
}

/// Locates the maximum of `g(z) = (1 − |z|)|f′(z)|` for `f` shrunk to
/// `f(SHRINK·z)`, first on a polar grid (the earliest of equal values wins)
/// and then by simplex polish.
pub fn zalcman_rescale(f: &HoloFunction, cfg: &RescalingConfig) -> Result<RescalingStep, RescalingError> {
    if cfg.resolution < 2 {
        return Err(RescalingError::InvalidArgument("grid resolution must be at least 2".into()));
    }
    let shrunk = f.precompose_affine(Complex64::new(0.0, 0.0), Complex64::new(SHRINK, 0.0));
    f.derivative(Complex64::new(0.0, 0.0))?;
    let n = cfg.resolution;
    let ring = |i: usize| {
        let rho = i as f64 / n as f64;
        let spokes = if i == 0 { 1 } else { n };
        (0..spokes)
            .map(|j| {
                let z = Complex64::from_polar(rho, TAU * j as f64 / n as f64);
                (g_at(&shrunk, z), z)
            })
            .fold((f64::NEG_INFINITY, Complex64::new(0.0, 0.0)), |best, c| if c.0 > best.0 { c } else { best })
    };
    let rings: Vec<(f64, Complex64)> = (0..n).into_par_iter().map(ring).collect();
    let (grid_best, grid_at) =
        rings.into_iter().fold((f64::NEG_INFINITY, Complex64::new(0.0, 0.0)), |best, c| if c.0 > best.0 { c } else { best });
    if !(grid_best > 0.0) {
        return Err(RescalingError::Flat);
    }
    let h = 1.0 / n as f64;
    let polish = minimize(
        |x| {
            let z = Complex64::new(x[0], x[1]);
            -g_at(&shrunk, z) / grid_best
        },
        &[grid_at.re, grid_at.im],
        &[h, h],
        SimplexOptions { max_evals: 2000, f_tol: 1e-15, x_tol: 1e-13 },
    );
    let polished = Complex64::new(polish.x[0], polish.x[1]);
    let a = if -polish.value * grid_best >= grid_best && polished.norm() < 1.0 { polished } else { grid_at };
    RescalingStep::at_point(shrunk, a)
}

/// Sampled check of `|(f∘r)′| ≤ 2` on `D′`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoBoundReport {
    pub samples: usize,
    pub sup: f64,
    pub at: Complex64,
    pub bound: f64,
    pub normalization: f64,
    pub passed: bool,
    /// A sample exceeding the bound, when there is one.
    pub witness: Option<Complex64>,
}

/// Points of the disk of radius `radius`: a boundary ring with a quarter of
/// the budget, which is four times the density of the interior rings, and
/// a polar grid for the rest.
pub fn disc_samples(radius: f64, samples: usize) -> Vec<Complex64> {
    let samples = samples.max(8);
    let rest = samples - samples / 4 - 1;
    let rings = ((rest as f64).sqrt() / 2.0).round().max(1.0) as usize;
    let spokes = (rest / rings).max(1);
    let outer = samples - 1 - rings * spokes;
    let mut out = vec![Complex64::new(0.0, 0.0)];
    for k in 1..=rings {
        let rho = radius * k as f64 / (rings + 1) as f64;
        out.extend((0..spokes).map(|j| Complex64::from_polar(rho, TAU * (j as f64 + 0.5 * (k % 2) as f64) / spokes as f64)));
    }
    out.extend((0..outer).map(|j| Complex64::from_polar(radius, TAU * j as f64 / outer as f64)));
    out
}

pub fn verify_two_bound(step: &RescalingStep, samples: usize) -> Result<TwoBoundReport, RescalingError> {
    let bound = 2.0 * (1.0 + TWO_BOUND_TOLERANCE);
    let points = disc_samples(step.preimage_radius, samples);
    let values: Vec<(f64, Complex64)> = points
        .par_iter()
        .map(|z| Ok((step.rescaled_derivative(*z)?.norm(), *z)))
        .collect::<Result<_, RescalingError>>()?;
    let (sup, at) = values.iter().fold((f64::NEG_INFINITY, Complex64::new(0.0, 0.0)), |b, c| if c.0 > b.0 { *c } else { b });
    let witness = values.iter().find(|(v, _)| *v > bound).map(|(_, z)| *z);
    Ok(TwoBoundReport {
        samples: points.len(),
        sup,
        at,
        bound,
        normalization: step.normalization,
        passed: witness.is_none(),
        witness,
    })
}

/// A branch of `f^{1/n}` continued from the origin, after checking on a
/// grid that `f` has no zero in the disk.
pub fn root_trick(f: &HoloFunction, n: u32) -> Result<HoloFunction, RescalingError> {
    if n == 0 {
        return Err(RescalingError::InvalidArgument("root order must be positive".into()));
    }
    for z in disc_samples(SHRINK, 4000) {
        let w = f.value(z)?;
        if w.norm() < 1e-300 || !w.is_finite() {
            return Err(RescalingError::ZeroOnDisk(z));
        }
    }
    Ok(nth_root(f, n, Complex64::new(0.0, 0.0))?)
}

/// Smallest `|g(z) − ζ|` over the `n`-th roots of unity `ζ` and the grid.
pub fn distance_to_roots_of_unity(g: &HoloFunction, n: u32, samples: usize) -> Result<f64, RescalingError> {
    let roots: Vec<Complex64> = (0..n).map(|k| Complex64::from_polar(1.0, TAU * f64::from(k) / f64::from(n))).collect();
    let mut best = f64::INFINITY;
    for z in disc_samples(SHRINK, samples) {
        let w = g.value(z)?;
        for r in &roots {
            best = best.min((w - r).norm());
        }
    }
    Ok(best)
}

/// Serializable summary of one step of a sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub n: u32,
    pub a: Complex64,
    pub fpa: Complex64,
    pub boundary_distance: f64,
    pub preimage_radius: f64,
    pub normalization: f64,
    pub derivative_at_origin: f64,
    pub two_bound: TwoBoundReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescalingReport {
    pub steps: Vec<StepSummary>,
    pub derivative_sup: Vec<f64>,
    pub radii: Vec<f64>,
    pub radii_increasing: bool,
    pub two_bound_passed: bool,
    /// Radius of the grid on which consecutive rescaled maps are compared.
    pub cauchy_radius: f64,
    /// Chordal sup-distance between `f_n∘r_n` and `f_{n+1}∘r_{n+1}`.
    pub cauchy_differences: Vec<f64>,
}

/// Spherical distance between two values.
pub fn chordal(z: Complex64, w: Complex64) -> f64 {
    if !z.is_finite() && !w.is_finite() {
        return 0.0;
    }
    if !z.is_finite() {
        return 1.0 / (1.0 + w.norm_sqr()).sqrt();
    }
    if !w.is_finite() {
        return 1.0 / (1.0 + z.norm_sqr()).sqrt();
    }
    (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
}

/// Rescales `family(1), …, family(n_max)` and tabulates the radii of `D′`,
/// the two-bound checks and a Cauchy table of the rescaled maps.
pub fn rescaling_sequence_demo<F>(family: F, n_max: u32, cfg: &RescalingConfig) -> Result<RescalingReport, RescalingError>
where
    F: Fn(u32) -> HoloFunction,
{
    if n_max == 0 {
        return Err(RescalingError::InvalidArgument("n_max must be positive".into()));
    }
    let mut steps = Vec::new();
    let mut rescaled = Vec::new();
    let mut previous_growth = 0.0;
    for n in 1..=n_max {
        let f = family(n);
        let growth = f.derivative(Complex64::new(0.0, 0.0))?.norm();
        if growth <= previous_growth {
            return Err(RescalingError::NotDiverging(n));
        }
        previous_growth = growth;
        let step = zalcman_rescale(&f, cfg)?;
        let two_bound = verify_two_bound(&step, cfg.samples)?;
        rescaled.push((step.rescaled(), step.preimage_radius));
        steps.push(StepSummary {
            n,
            a: step.a,
            fpa: step.fpa,
            boundary_distance: step.boundary_distance,
            preimage_radius: step.preimage_radius,
            normalization: step.normalization,
            derivative_at_origin: growth,
            two_bound,
        });
    }
    let radii: Vec<f64> = steps.iter().map(|s| s.preimage_radius).collect();
    let cauchy_radius = rescaled.iter().map(|(_, r)| *r).fold(0.5f64, f64::min);
    let grid = disc_samples(cauchy_radius, 400);
    let mut cauchy_differences = Vec::new();
    for pair in rescaled.windows(2) {
        let mut sup: f64 = 0.0;
        for z in &grid {
            sup = sup.max(chordal(pair[0].0.value(*z)?, pair[1].0.value(*z)?));
        }
        cauchy_differences.push(sup);
    }
    Ok(RescalingReport {
        derivative_sup: steps.iter().map(|s| s.two_bound.sup).collect(),
        radii_increasing: radii.windows(2).all(|w| w[1] > w[0]),
        two_bound_passed: steps.iter().all(|s| s.two_bound.passed),
        radii,
        steps,
        cauchy_radius,
        cauchy_differences,
    })
}

/// `exp(n(z + 2))`, which omits 0 and, for `n ≤ 6`, also 1 on the unit disk.
pub fn exponential_family(n: u32) -> HoloFunction {
    let k = f64::from(n);
    HoloFunction::from_fn(format!("exp({n}(z+2))"), move |z| {
        let e = (k * (z + 2.0)).exp();
        Ok(crate::holo::Jet::new(e, k * e))
    })
}
