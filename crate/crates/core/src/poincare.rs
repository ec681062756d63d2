//! Hyperbolic geometry of the unit disk and the upper half-plane.
//!
//! Distances use the normalisation `ω(z, w) = artanh |(z − w)/(1 − w̄z)|`,
//! whose infinitesimal form is `|v|/(1 − |z|²)`. The half-plane carries the
//! Cayley-conjugate distance, with infinitesimal form `|v|/(2 Im z)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::holo::HoloFunction;

/// Points with `|z|` above this are rejected.
pub const DISK_GUARD: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("{0} is not inside the unit disk (|z| must be at most 1 - 1e-12)")]
    OutsideDisk(Complex64),
    #[error("{0} is not in the upper half-plane")]
    NotInHalfPlane(Complex64),
}

/// A point of the open unit disk, away from the boundary by [`DISK_GUARD`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub fn new(z: Complex64) -> Result<Self, GeometryError> {
        if z.is_finite() && z.norm() <= DISK_GUARD {
            Ok(Self(z))
        } else {
            Err(GeometryError::OutsideDisk(z))
        }
    }

    pub fn origin() -> Self {
        Self(Complex64::new(0.0, 0.0))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

impl TryFrom<Complex64> for DiskPoint {
    type Error = GeometryError;
    fn try_from(z: Complex64) -> Result<Self, GeometryError> {
        Self::new(z)
    }
}

impl From<DiskPoint> for Complex64 {
    fn from(p: DiskPoint) -> Complex64 {
        p.0
    }
}

/// `artanh ρ` from `ρ` and an accurately computed `1 − ρ²`.
pub(crate) fn artanh_from_parts(rho: f64, one_minus_rho_sq: f64) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    0.5 * (2.0 * rho * (1.0 + rho) / one_minus_rho_sq).ln_1p()
}

/// Poincaré distance on the unit disk.
pub fn omega(z: DiskPoint, w: DiskPoint) -> f64 {
    let (z, w) = (z.0, w.0);
    let denom = Complex64::new(1.0, 0.0) - w.conj() * z;
    let d2 = denom.norm_sqr();
    let rho = ((z - w).norm() / denom.norm()).min(1.0);
    let one_minus = (1.0 - z.norm()) * (1.0 + z.norm()) * (1.0 - w.norm()) * (1.0 + w.norm()) / d2;
    artanh_from_parts(rho, one_minus)
}

/// [`omega`] on raw complex numbers.
pub fn omega_at(z: Complex64, w: Complex64) -> Result<f64, GeometryError> {
    Ok(omega(DiskPoint::new(z)?, DiskPoint::new(w)?))
}

/// Infinitesimal Poincaré metric `|v|/(1 − |z|²)`.
pub fn disk_metric(z: DiskPoint, v: Complex64) -> f64 {
    let r = z.0.norm();
    v.norm() / ((1.0 - r) * (1.0 + r))
}

/// Distance on the upper half-plane, equal to `ω(C(z), C(w))` for the Cayley
/// map `C(z) = (z − i)/(z + i)`.
pub fn halfplane_distance(z: Complex64, w: Complex64) -> Result<f64, GeometryError> {
    for p in [z, w] {
        if !(p.im > 0.0) || !p.is_finite() {
            return Err(GeometryError::NotInHalfPlane(p));
        }
    }
    let denom = (z - w.conj()).norm();
    let rho = ((z - w).norm() / denom).min(1.0);
    let one_minus = 4.0 * z.im * w.im / (denom * denom);
    Ok(artanh_from_parts(rho, one_minus))
}

/// Cayley map from the upper half-plane onto the unit disk.
pub fn cayley(z: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    (z - i) / (z + i)
}

/// Inverse Cayley map from the unit disk onto the upper half-plane.
pub fn cayley_inverse(w: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    Complex64::new(0.0, 1.0) * (one + w) / (one - w)
}

/// Disk automorphism `z ↦ e^{iθ}(z − a)/(1 − āz)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskMobius {
    pub a: DiskPoint,
    pub theta: f64,
}

impl DiskMobius {
    pub fn new(a: DiskPoint, theta: f64) -> Self {
        Self { a, theta }
    }

    pub fn identity() -> Self {
        Self { a: DiskPoint::origin(), theta: 0.0 }
    }

    /// The automorphism sending `from` to 0 and then rotating by `theta`.
    pub fn to_origin(from: DiskPoint, theta: f64) -> Self {
        Self { a: from, theta }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        let a = self.a.0;
        Complex64::from_polar(1.0, self.theta) * (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let a = self.a.0;
        let d = Complex64::new(1.0, 0.0) - a.conj() * z;
        Complex64::from_polar(1.0, self.theta) * (1.0 - a.norm_sqr()) / (d * d)
    }

    pub fn inverse(&self) -> Self {
        let b = -self.a.0 * Complex64::from_polar(1.0, self.theta);
        Self { a: DiskPoint(b), theta: -self.theta }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &DiskMobius) -> Self {
        let a = inner.inverse().apply(self.a.0);
        let d = self.derivative(inner.apply(a)) * inner.derivative(a);
        // Clamp against rounding that pushes |a| past the guard.
        let a = if a.norm() > DISK_GUARD { a * (DISK_GUARD / a.norm()) } else { a };
        Self { a: DiskPoint(a), theta: d.arg() }
    }

    pub fn as_function(&self) -> HoloFunction {
        let m = *self;
        HoloFunction::from_fn(format!("mobius(a={}, θ={})", m.a.0, m.theta), move |z| {
            Ok(crate::holo::Jet::new(m.apply(z), m.derivative(z)))
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SchwarzPickViolation {
    pub z: Complex64,
    pub w: Complex64,
    pub slack: f64,
}

/// Outcome of checking `ω(f(z), f(w)) ≤ ω(z, w)` on sample pairs.
#[derive(Debug, Clone, Serialize)]
pub struct SchwarzPickReport {
    pub checked: usize,
    /// Pairs where `f` left the disk or failed to evaluate.
    pub flagged: usize,
    /// Largest `ω(f(z), f(w)) − ω(z, w)` over checked pairs.
    pub max_slack: f64,
    pub tolerance: f64,
    pub violations: Vec<SchwarzPickViolation>,
    pub passed: bool,
}

/// Checks the distance-decreasing property of `f` on each sample pair.
/// Violations are reported, never thrown.
pub fn schwarz_pick_certificate(
    f: &HoloFunction,
    samples: &[(DiskPoint, DiskPoint)],
    tolerance: f64,
) -> SchwarzPickReport {
    let mut report = SchwarzPickReport {
        checked: 0,
        flagged: 0,
        max_slack: f64::NEG_INFINITY,
        tolerance,
        violations: Vec::new(),
        passed: true,
    };
    for &(z, w) in samples {
        let images = f.value(z.0).ok().zip(f.value(w.0).ok());
        let Some((fz, fw)) = images.and_then(|(a, b)| DiskPoint::new(a).ok().zip(DiskPoint::new(b).ok()))
        else {
            report.flagged += 1;
            continue;
        };
        let d = omega(z, w);
        let slack = omega(fz, fw) - d;
        report.checked += 1;
        report.max_slack = report.max_slack.max(slack);
        if slack > tolerance * (1.0 + d) {
            report.violations.push(SchwarzPickViolation { z: z.0, w: w.0, slack });
            report.passed = false;
        }
    }
    report
}
