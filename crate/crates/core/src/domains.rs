//! Planar domains and exact distances on the covered model domains.
//!
//! The punctured disk is covered by the upper half-plane through
//! `w ↦ exp(iw)`, and the annulus `r < |z| < 1` by the strip
//! `0 < Im ζ < ln(1/r)` through the same map. Distances are minima of the
//! half-plane distance over deck translates of one lift.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poincare::{artanh_from_parts, halfplane_distance, omega, DiskMobius, DiskPoint, DISK_GUARD};

pub const DEFAULT_WINDOW: i64 = 50;
const MAX_WINDOW: i64 = 1 << 20;
/// Relative slack used when comparing radii and puncture positions.
const SHAPE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("invalid domain: {0}")]
    Invalid(String),
    #[error("{point} is not in {domain}")]
    Outside { point: Complex64, domain: String },
    #[error("{sub} is not contained in {sup}")]
    NotContained { sub: String, sup: String },
    #[error("cannot parse domain '{text}': {reason}")]
    Parse { text: String, reason: String },
    #[error("no exact distance is available on {0}")]
    NoExactDistance(String),
}

/// The region a [`Domain::PuncturedRegion`] removes points from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ambient {
    Plane,
    Disk { center: Complex64, radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    UnitDisk,
    /// `0 < |z| < 1`.
    PuncturedDisk,
    /// `inner < |z| < 1`.
    Annulus { inner: f64 },
    EuclideanDisk { center: Complex64, radius: f64 },
    /// `ℂ ∖ {0, 1}`.
    TwicePuncturedPlane,
    PuncturedRegion { ambient: Ambient, punctures: Vec<Complex64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Plane,
    Disk(Complex64, f64),
    Annulus(f64),
}

impl Shape {
    fn contains(self, z: Complex64) -> bool {
        self.clearance(z) > 0.0
    }

    /// Signed distance to the boundary, positive inside.
    fn clearance(self, z: Complex64) -> f64 {
        match self {
            Shape::Plane => f64::INFINITY,
            Shape::Disk(c, r) => r - (z - c).norm(),
            Shape::Annulus(r) => (1.0 - z.norm()).min(z.norm() - r),
        }
    }

    fn inside(self, other: Shape) -> bool {
        let tol = |x: f64| SHAPE_TOL * (1.0 + x.abs());
        match (self, other) {
            (_, Shape::Plane) => true,
            (Shape::Plane, _) => false,
            (Shape::Disk(c1, r1), Shape::Disk(c2, r2)) => (c1 - c2).norm() + r1 <= r2 + tol(r2),
            (Shape::Annulus(_), Shape::Disk(c, r)) => c.norm() + 1.0 <= r + tol(r),
            (Shape::Disk(c, r), Shape::Annulus(ri)) => c.norm() + r <= 1.0 + tol(1.0) && c.norm() - r >= ri - tol(ri),
            (Shape::Annulus(r1), Shape::Annulus(r2)) => r1 >= r2 - tol(r2),
        }
    }
}

fn same_point(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= SHAPE_TOL * (1.0 + a.norm())
}

impl Domain {
    pub fn unit_disk() -> Self {
        Domain::UnitDisk
    }

    pub fn plane() -> Self {
        Domain::PuncturedRegion { ambient: Ambient::Plane, punctures: Vec::new() }
    }

    pub fn plane_minus(punctures: Vec<Complex64>) -> Result<Self, DomainError> {
        let d = Domain::PuncturedRegion { ambient: Ambient::Plane, punctures };
        d.validate()?;
        Ok(d)
    }

    pub fn disk_minus(center: Complex64, radius: f64, punctures: Vec<Complex64>) -> Result<Self, DomainError> {
        let d = Domain::PuncturedRegion { ambient: Ambient::Disk { center, radius }, punctures };
        d.validate()?;
        Ok(d)
    }

    pub fn annulus(inner: f64) -> Result<Self, DomainError> {
        let d = Domain::Annulus { inner };
        d.validate()?;
        Ok(d)
    }

    pub fn euclidean_disk(center: Complex64, radius: f64) -> Result<Self, DomainError> {
        let d = Domain::EuclideanDisk { center, radius };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        let bad = |m: String| Err(DomainError::Invalid(m));
        match self {
            Domain::Annulus { inner } if !(*inner > 0.0 && *inner < 1.0) => {
                bad(format!("annulus inner radius must be in (0, 1), got {inner}"))
            }
            Domain::EuclideanDisk { center, radius } | Domain::PuncturedRegion { ambient: Ambient::Disk { center, radius }, .. }
                if !(radius.is_finite() && *radius > 0.0 && center.is_finite()) =>
            {
                bad(format!("disk needs a finite center and positive radius, got {center}, {radius}"))
            }
            Domain::PuncturedRegion { ambient, punctures } => {
                for (i, p) in punctures.iter().enumerate() {
                    if !p.is_finite() {
                        return bad(format!("puncture {p} is not finite"));
                    }
                    if let Ambient::Disk { center, radius } = ambient {
                        if (p - center).norm() >= *radius {
                            return bad(format!("puncture {p} is outside the ambient disk"));
                        }
                    }
                    if punctures[..i].iter().any(|q| same_point(*p, *q)) {
                        return bad(format!("puncture {p} is repeated"));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn parts(&self) -> (Shape, Vec<Complex64>) {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Domain::UnitDisk => (Shape::Disk(zero, 1.0), vec![]),
            Domain::PuncturedDisk => (Shape::Disk(zero, 1.0), vec![zero]),
            Domain::Annulus { inner } => (Shape::Annulus(*inner), vec![]),
            Domain::EuclideanDisk { center, radius } => (Shape::Disk(*center, *radius), vec![]),
            Domain::TwicePuncturedPlane => (Shape::Plane, vec![zero, Complex64::new(1.0, 0.0)]),
            Domain::PuncturedRegion { ambient: Ambient::Plane, punctures } => (Shape::Plane, punctures.clone()),
            Domain::PuncturedRegion { ambient: Ambient::Disk { center, radius }, punctures } => {
                (Shape::Disk(*center, *radius), punctures.clone())
            }
        }
    }

    /// Rewrites special cases of [`Domain::PuncturedRegion`] as the
    /// dedicated variants.
    pub fn canonical(&self) -> Domain {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match self {
            Domain::EuclideanDisk { center, radius } if *center == zero && *radius == 1.0 => Domain::UnitDisk,
            Domain::PuncturedRegion { ambient: Ambient::Plane, punctures } if punctures.len() == 2 => {
                let (a, b) = (punctures[0], punctures[1]);
                if (a == zero && b == one) || (a == one && b == zero) {
                    Domain::TwicePuncturedPlane
                } else {
                    self.clone()
                }
            }
            Domain::PuncturedRegion { ambient: Ambient::Disk { center, radius }, punctures } => {
                if punctures.is_empty() {
                    Domain::EuclideanDisk { center: *center, radius: *radius }.canonical()
                } else if *center == zero && *radius == 1.0 && punctures.len() == 1 && punctures[0] == zero {
                    Domain::PuncturedDisk
                } else {
                    self.clone()
                }
            }
            _ => self.clone(),
        }
    }

    pub fn punctures(&self) -> Vec<Complex64> {
        self.parts().1
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let (shape, punctures) = self.parts();
        z.is_finite() && shape.contains(z) && punctures.iter().all(|p| *p != z)
    }

    /// Distance from `z` to the complement, ignoring the punctures listed
    /// in `exempt`. Negative outside the ambient shape.
    pub fn clearance(&self, z: Complex64, exempt: &[Complex64]) -> f64 {
        let (shape, punctures) = self.parts();
        let mut d = shape.clearance(z);
        for p in punctures {
            if !exempt.iter().any(|e| same_point(*e, p)) {
                d = d.min((z - p).norm());
            }
        }
        d
    }

    /// Distance from `z` to the complement.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        self.clearance(z, &[])
    }

    /// A disk containing the domain, when it is bounded.
    pub fn bounding_disk(&self) -> Option<(Complex64, f64)> {
        match self.parts().0 {
            Shape::Plane => None,
            Shape::Disk(c, r) => Some((c, r)),
            Shape::Annulus(_) => Some((Complex64::new(0.0, 0.0), 1.0)),
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.bounding_disk().is_some()
    }

    /// Number of omitted points when the complement in `ℂ` is finite.
    pub fn complement_points(&self) -> Option<usize> {
        match self.parts() {
            (Shape::Plane, p) => Some(p.len()),
            _ => None,
        }
    }

    /// Whether `sub ⊆ self`.
    pub fn contains_domain(&self, sub: &Domain) -> bool {
        let (s_shape, s_punct) = sub.parts();
        let (shape, punct) = self.parts();
        s_shape.inside(shape) && punct.iter().all(|p| !s_shape.contains(*p) || s_punct.iter().any(|q| same_point(*p, *q)))
    }

    pub fn require(&self, z: Complex64) -> Result<(), DomainError> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(DomainError::Outside { point: z, domain: self.to_string() })
        }
    }

    /// Exact Kobayashi distance where a closed form or covering formula is
    /// available.
    pub fn exact_distance(&self, p: Complex64, q: Complex64) -> Result<Option<f64>, DomainError> {
        self.validate()?;
        self.require(p)?;
        self.require(q)?;
        let zero = Complex64::new(0.0, 0.0);
        Ok(match self.canonical() {
            Domain::UnitDisk => Some(omega(DiskPoint::new(p).map_err(|_| self.outside(p))?, DiskPoint::new(q).map_err(|_| self.outside(q))?)),
            Domain::EuclideanDisk { center, radius } => {
                let u = DiskPoint::new((p - center) / radius).map_err(|_| self.outside(p))?;
                let w = DiskPoint::new((q - center) / radius).map_err(|_| self.outside(q))?;
                Some(omega(u, w))
            }
            Domain::PuncturedDisk => Some(punctured_disk_distance(p, q)?),
            Domain::Annulus { inner } => Some(annulus_distance(p, q, inner)?),
            Domain::PuncturedRegion { ambient: Ambient::Plane, punctures } if punctures.len() <= 1 => Some(0.0),
            Domain::PuncturedRegion { ambient: Ambient::Disk { center, radius }, punctures } if punctures.len() == 1 => {
                let m = puncture_to_origin(center, radius, punctures[0]);
                let (u, w) = (m.apply((p - center) / radius), m.apply((q - center) / radius));
                if u == zero || w == zero {
                    return Err(self.outside(if u == zero { p } else { q }));
                }
                Some(punctured_disk_distance(u, w)?)
            }
            _ => None,
        })
    }

    /// Exact infinitesimal Kobayashi metric where available.
    pub fn exact_metric(&self, z: Complex64, v: Complex64) -> Result<Option<f64>, DomainError> {
        self.validate()?;
        self.require(z)?;
        Ok(match self.canonical() {
            Domain::UnitDisk => Some(crate::poincare::disk_metric(DiskPoint::new(z).map_err(|_| self.outside(z))?, v)),
            Domain::EuclideanDisk { center, radius } => {
                let u = DiskPoint::new((z - center) / radius).map_err(|_| self.outside(z))?;
                Some(crate::poincare::disk_metric(u, v / radius))
            }
            Domain::PuncturedDisk => Some(punctured_disk_metric(z, v)?),
            Domain::Annulus { inner } => Some(annulus_metric(z, v, inner)?),
            Domain::PuncturedRegion { ambient: Ambient::Plane, punctures } if punctures.len() <= 1 => Some(0.0),
            Domain::PuncturedRegion { ambient: Ambient::Disk { center, radius }, punctures } if punctures.len() == 1 => {
                let m = puncture_to_origin(center, radius, punctures[0]);
                let u = (z - center) / radius;
                Some(punctured_disk_metric(m.apply(u), m.derivative(u) * v / radius)?)
            }
            _ => None,
        })
    }

    fn outside(&self, z: Complex64) -> DomainError {
        DomainError::Outside { point: z, domain: self.to_string() }
    }
}

/// Disk automorphism taking the normalised puncture of `D(center, radius)∖{b}`
/// to the origin.
pub(crate) fn puncture_to_origin(center: Complex64, radius: f64, b: Complex64) -> DiskMobius {
    let bn = (b - center) / radius;
    let bn = if bn.norm() > DISK_GUARD { bn * (DISK_GUARD / bn.norm()) } else { bn };
    DiskMobius::new(DiskPoint::new(bn).expect("clamped into the disk"), 0.0)
}

/// One lift pair realising a covering distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiberLift {
    /// Deck translation applied to the second lift.
    pub k: i64,
    pub lift_p: Complex64,
    pub lift_q: Complex64,
    pub distance: f64,
    /// Final half-width of the scanned window.
    pub window: i64,
}

/// Lift of `0 < |p| < 1` to the upper half-plane under `w ↦ exp(iw)`.
pub fn punctured_lift(p: Complex64) -> Complex64 {
    Complex64::new(p.arg(), -p.norm().ln())
}

fn check_punctured(p: Complex64) -> Result<(), DomainError> {
    let r = p.norm();
    if r > 0.0 && r < 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(DomainError::Outside { point: p, domain: Domain::PuncturedDisk.to_string() })
    }
}

fn scan_fiber<D: Fn(Complex64, Complex64) -> f64>(lp: Complex64, lq: Complex64, window: i64, dist: D) -> FiberLift {
    let center = ((lp.re - lq.re) / TAU).round() as i64;
    let mut w = window.max(1);
    loop {
        let mut best = (center, f64::INFINITY);
        for k in center - w..=center + w {
            let d = dist(lp, lq + TAU * k as f64);
            if d < best.1 {
                best = (k, d);
            }
        }
        if (best.0 - center).abs() < w || w >= MAX_WINDOW {
            return FiberLift { k: best.0, lift_p: lp, lift_q: lq + TAU * best.0 as f64, distance: best.1, window: w };
        }
        w *= 2;
    }
}

/// Punctured-disk distance between two half-plane lifts.
pub fn punctured_lift_distance(lp: Complex64, lq: Complex64, window: i64) -> FiberLift {
    scan_fiber(lp, lq, window, |a, b| halfplane_distance(a, b).unwrap_or(f64::INFINITY))
}

/// Fiber minimisation for the punctured disk with a caller-chosen window.
pub fn punctured_disk_fiber(p: Complex64, q: Complex64, window: i64) -> Result<FiberLift, DomainError> {
    check_punctured(p)?;
    check_punctured(q)?;
    Ok(punctured_lift_distance(punctured_lift(p), punctured_lift(q), window))
}

/// Kobayashi distance on `0 < |z| < 1`.
pub fn punctured_disk_distance(p: Complex64, q: Complex64) -> Result<f64, DomainError> {
    punctured_disk_fiber(p, q, DEFAULT_WINDOW).map(|f| f.distance)
}

/// `|v| / (−2|z| ln|z|)`.
pub fn punctured_disk_metric(z: Complex64, v: Complex64) -> Result<f64, DomainError> {
    check_punctured(z)?;
    let r = z.norm();
    Ok(v.norm() / (-2.0 * r * r.ln()))
}

fn check_annulus(p: Complex64, inner: f64) -> Result<(), DomainError> {
    if !(inner > 0.0 && inner < 1.0) {
        return Err(DomainError::Invalid(format!("annulus inner radius must be in (0, 1), got {inner}")));
    }
    let r = p.norm();
    if r > inner && r < 1.0 {
        Ok(())
    } else {
        Err(DomainError::Outside { point: p, domain: Domain::Annulus { inner }.to_string() })
    }
}

/// Distance between two points of the strip `0 < Im ζ < height` carrying the
/// metric pulled back from the half-plane by `ζ ↦ exp(πζ/height)`.
pub fn strip_distance(a: Complex64, b: Complex64, height: f64) -> f64 {
    let e = PI * (a.re - b.re) / height;
    let (t1, t2) = (PI * a.im / height, PI * b.im / height);
    if e.abs() > 600.0 {
        // exp would overflow; the remaining terms are below e^{-600}.
        return 0.5 * (e.abs() - (t1.sin() * t2.sin()).ln());
    }
    let w1 = Complex64::from_polar((0.5 * e).exp(), t1);
    let w2 = Complex64::from_polar((-0.5 * e).exp(), t2);
    // Same as halfplane_distance but with the imaginary parts known exactly.
    let denom = (w1 - w2.conj()).norm();
    let rho = ((w1 - w2).norm() / denom).min(1.0);
    let one_minus = 4.0 * t1.sin() * t2.sin() / (denom * denom);
    artanh_from_parts(rho, one_minus)
}

/// Fiber minimisation for the annulus `inner < |z| < 1`.
pub fn annulus_fiber(p: Complex64, q: Complex64, inner: f64, window: i64) -> Result<FiberLift, DomainError> {
    check_annulus(p, inner)?;
    check_annulus(q, inner)?;
    let height = -inner.ln();
    Ok(scan_fiber(punctured_lift(p), punctured_lift(q), window, |a, b| strip_distance(a, b, height)))
}

/// Kobayashi distance on the annulus `inner < |z| < 1`.
pub fn annulus_distance(p: Complex64, q: Complex64, inner: f64) -> Result<f64, DomainError> {
    annulus_fiber(p, q, inner, DEFAULT_WINDOW).map(|f| f.distance)
}

/// Infinitesimal Kobayashi metric on the annulus `inner < |z| < 1`.
pub fn annulus_metric(z: Complex64, v: Complex64, inner: f64) -> Result<f64, DomainError> {
    check_annulus(z, inner)?;
    let height = -inner.ln();
    let r = z.norm();
    Ok(v.norm() * PI / (2.0 * height * r * (PI * (-r.ln()) / height).sin()))
}

fn fmt_c(z: Complex64) -> String {
    match (z.re, z.im) {
        (re, im) if im == 0.0 => format!("{re}"),
        (re, im) if re == 0.0 => format!("{im}i"),
        (re, im) if im < 0.0 => format!("{re}{im}i"),
        (re, im) => format!("{re}+{im}i"),
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |p: &[Complex64]| p.iter().map(|z| fmt_c(*z)).collect::<Vec<_>>().join(",");
        match self {
            Domain::UnitDisk => write!(f, "disk"),
            Domain::PuncturedDisk => write!(f, "punctured-disk"),
            Domain::Annulus { inner } => write!(f, "annulus:{inner}"),
            Domain::EuclideanDisk { center, radius } => write!(f, "edisk:{},{radius}", fmt_c(*center)),
            Domain::TwicePuncturedPlane => write!(f, "c01"),
            Domain::PuncturedRegion { ambient: Ambient::Plane, punctures } if punctures.is_empty() => write!(f, "plane"),
            Domain::PuncturedRegion { ambient: Ambient::Plane, punctures } => write!(f, "plane-minus:{}", list(punctures)),
            Domain::PuncturedRegion { ambient: Ambient::Disk { center, radius }, punctures } => {
                write!(f, "edisk-minus:{},{radius}", fmt_c(*center))?;
                if !punctures.is_empty() {
                    write!(f, ",{}", list(punctures))?;
                }
                Ok(())
            }
        }
    }
}

/// Parses a complex number written as `1.5`, `-2i`, `0.3+0.4i` or `i`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    Complex64::from_str(s).map_err(|_| format!("'{s}' is not a complex number"))
}

impl FromStr for Domain {
    type Err = DomainError;

    fn from_str(text: &str) -> Result<Self, DomainError> {
        let err = |reason: String| DomainError::Parse { text: text.to_string(), reason };
        let (head, args) = match text.trim().split_once(':') {
            Some((h, a)) => (h.trim(), Some(a)),
            None => (text.trim(), None),
        };
        let nums = |a: Option<&str>| -> Result<Vec<Complex64>, DomainError> {
            a.map_or(Ok(Vec::new()), |a| a.split(',').map(|s| parse_complex(s).map_err(err)).collect())
        };
        let real = |z: Complex64| if z.im == 0.0 { Ok(z.re) } else { Err(err(format!("{z} must be real"))) };
        let domain = match (head, args) {
            ("disk", None) => Domain::UnitDisk,
            ("punctured-disk", None) => Domain::PuncturedDisk,
            ("c01", None) => Domain::TwicePuncturedPlane,
            ("plane", None) => Domain::plane(),
            ("annulus", Some(a)) => {
                let v = nums(Some(a))?;
                if v.len() != 1 {
                    return Err(err("annulus takes one inner radius".into()));
                }
                Domain::Annulus { inner: real(v[0])? }
            }
            ("edisk", Some(a)) => {
                let v = nums(Some(a))?;
                if v.len() != 2 {
                    return Err(err("edisk takes a center and a radius".into()));
                }
                Domain::EuclideanDisk { center: v[0], radius: real(v[1])? }
            }
            ("plane-minus", a) => Domain::PuncturedRegion { ambient: Ambient::Plane, punctures: nums(a)? },
            ("edisk-minus", Some(a)) => {
                let v = nums(Some(a))?;
                if v.len() < 2 {
                    return Err(err("edisk-minus takes a center, a radius and punctures".into()));
                }
                Domain::PuncturedRegion {
                    ambient: Ambient::Disk { center: v[0], radius: real(v[1])? },
                    punctures: v[2..].to_vec(),
                }
            }
            _ => return Err(err("expected disk, punctured-disk, annulus:r, edisk:c,ρ, c01, plane, plane-minus:… or edisk-minus:c,ρ,…".into())),
        };
        domain.validate()?;
        Ok(domain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_in_annulus(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Complex64 {
        Complex64::from_polar(rng.random_range(lo..hi), rng.random_range(-PI..PI))
    }

    /// Independent oracle: scan every deck translate in a fixed window using
    /// the textbook arcosh form of the half-plane distance.
    fn brute_force_punctured(p: Complex64, q: Complex64) -> f64 {
        let (lp, lq) = (punctured_lift(p), punctured_lift(q));
        (-50..=50)
            .map(|k| {
                let w = lq + TAU * k as f64;
                let x = 1.0 + (lp - w).norm_sqr() / (2.0 * lp.im * w.im);
                0.5 * x.acosh()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn punctured_distance_reference_values() {
        assert_eq!(punctured_disk_distance(c(0.3, 0.0), c(0.3, 0.0)).unwrap(), 0.0);
        let d = punctured_disk_distance(c(0.1, 0.0), c(-0.1, 0.0)).unwrap();
        assert!((d - brute_force_punctured(c(0.1, 0.0), c(-0.1, 0.0))).abs() < 1e-12);
        // Same modulus, opposite arguments: lifts differ by π horizontally at
        // height ln 10, so d = asinh(π/(2 ln 10)).
        assert!((d - (PI / (2.0 * 10f64.ln())).asinh()).abs() < 1e-13);
        assert!(punctured_disk_distance(c(0.0, 0.0), c(0.5, 0.0)).is_err());
        assert!(punctured_disk_distance(c(1.0, 0.0), c(0.5, 0.0)).is_err());
    }

    #[test]
    fn punctured_matches_brute_force_and_is_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..300 {
            let (p, q) = (random_in_annulus(&mut rng, 1e-3, 0.999), random_in_annulus(&mut rng, 1e-3, 0.999));
            let d = punctured_disk_distance(p, q).unwrap();
            assert!((d - brute_force_punctured(p, q)).abs() < 1e-9 * (1.0 + d));
            let r = Complex64::from_polar(1.0, rng.random_range(-PI..PI));
            assert!((punctured_disk_distance(r * p, r * q).unwrap() - d).abs() < 1e-10 * (1.0 + d));
            // Inclusion into the disk is distance-decreasing.
            assert!(omega(DiskPoint::new(p).unwrap(), DiskPoint::new(q).unwrap()) <= d + 1e-10);
        }
    }

    #[test]
    fn window_widening_changes_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let (p, q) = (random_in_annulus(&mut rng, 1e-6, 0.999), random_in_annulus(&mut rng, 1e-6, 0.999));
            let a = punctured_disk_fiber(p, q, 50).unwrap();
            let b = punctured_disk_fiber(p, q, 200).unwrap();
            assert!((a.distance - b.distance).abs() <= 1e-12);
            let (p2, q2) = (random_in_annulus(&mut rng, 0.31, 0.99), random_in_annulus(&mut rng, 0.31, 0.99));
            let a = annulus_fiber(p2, q2, 0.3, 50).unwrap();
            let b = annulus_fiber(p2, q2, 0.3, 200).unwrap();
            assert!((a.distance - b.distance).abs() <= 1e-12);
        }
    }

    #[test]
    fn lifts_project_back() {
        let (p, q) = (c(0.2, -0.4), c(-0.3, -0.1));
        let f = punctured_disk_fiber(p, q, 50).unwrap();
        let i = Complex64::new(0.0, 1.0);
        assert!(((i * f.lift_p).exp() - p).norm() < 1e-14);
        assert!(((i * f.lift_q).exp() - q).norm() < 1e-14);
        assert!((halfplane_distance(f.lift_p, f.lift_q).unwrap() - f.distance).abs() < 1e-15);
    }

    #[test]
    fn punctured_metric_values() {
        let e = std::f64::consts::E;
        let v = punctured_disk_metric(c(1.0 / e, 0.0), c(1.0, 0.0)).unwrap();
        assert!((v - e / 2.0).abs() < 1e-15);
        let z = c(0.2, 0.3);
        let m = punctured_disk_metric(z, c(1.0, 0.0)).unwrap();
        assert!((punctured_disk_metric(z, c(0.0, -3.0)).unwrap() - 3.0 * m).abs() < 1e-14);
        let h = 1e-6;
        let fd = punctured_disk_distance(z, z + h).unwrap() / h;
        assert!((fd - m).abs() / m < 1e-4);
        assert!(punctured_disk_metric(c(0.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn distances_grow_toward_the_puncture() {
        let base = c(0.5, 0.0);
        let mut last = 0.0;
        for k in 1..=300 {
            let d = punctured_disk_distance(base, c(10f64.powi(-k), 0.0)).unwrap();
            assert!(d > last, "k = {k}");
            last = d;
        }
        assert!(last > 3.0);
    }

    #[test]
    fn annulus_core_antipodes() {
        for r in [0.05, 0.3, 0.5, 0.9, 0.999] {
            let s = f64::sqrt(r);
            let d = annulus_distance(c(s, 0.0), c(-s, 0.0), r).unwrap();
            let expect = PI * PI / (2.0 * -f64::ln(r));
            assert!((d - expect).abs() < 1e-11 * expect, "r = {r}: {d} vs {expect}");
        }
        assert_eq!(annulus_distance(c(0.6, 0.0), c(0.6, 0.0), 0.5).unwrap(), 0.0);
        assert!(annulus_distance(c(0.4, 0.0), c(0.6, 0.0), 0.5).is_err());
    }

    #[test]
    fn annulus_dominates_punctured_disk_and_matches_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..300 {
            let (p, q) = (random_in_annulus(&mut rng, 0.21, 0.999), random_in_annulus(&mut rng, 0.21, 0.999));
            let da = annulus_distance(p, q, 0.2).unwrap();
            assert!(da + 1e-10 >= punctured_disk_distance(p, q).unwrap());
            assert!((annulus_distance(q, p, 0.2).unwrap() - da).abs() < 1e-10 * (1.0 + da));
        }
        let z = c(0.3, 0.5);
        let h = 1e-6;
        let m = annulus_metric(z, c(0.0, 1.0), 0.2).unwrap();
        let fd = annulus_distance(z, z + c(0.0, h), 0.2).unwrap() / h;
        assert!((fd - m).abs() / m < 1e-4);
    }

    #[test]
    fn annulus_far_apart_lifts_stay_finite() {
        // A thin annulus makes the exponent in the strip map large.
        let d = annulus_distance(c(0.99995, 0.0), c(-0.99995, 0.0), 0.9999).unwrap();
        let expect = PI * PI / (2.0 * -0.9999f64.ln());
        assert!(d.is_finite() && (d - expect).abs() < 1e-6 * expect);
    }

    #[test]
    fn triangle_inequality_on_model_domains() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let pts: Vec<_> = (0..3).map(|_| random_in_annulus(&mut rng, 0.26, 0.99)).collect();
            let d = |a, b| punctured_disk_distance(a, b).unwrap();
            assert!(d(pts[0], pts[1]) + d(pts[1], pts[2]) - d(pts[0], pts[2]) >= -1e-10);
            let d = |a, b| annulus_distance(a, b, 0.25).unwrap();
            assert!(d(pts[0], pts[1]) + d(pts[1], pts[2]) - d(pts[0], pts[2]) >= -1e-10);
        }
    }

    #[test]
    fn containment_rules() {
        let pd = Domain::PuncturedDisk;
        assert!(pd.contains_domain(&Domain::annulus(0.5).unwrap()));
        assert!(Domain::TwicePuncturedPlane.contains_domain(&pd));
        assert!(!pd.contains_domain(&Domain::UnitDisk));
        assert!(Domain::UnitDisk.contains_domain(&pd));
        assert!(!Domain::annulus(0.5).unwrap().contains_domain(&pd));
        let half = Domain::euclidean_disk(c(0.5, 0.0), 0.5).unwrap();
        // The closed disk meets 0 and 1 only on its boundary circle.
        assert!(Domain::TwicePuncturedPlane.contains_domain(&half));
        assert!(!Domain::TwicePuncturedPlane.contains_domain(&Domain::euclidean_disk(c(0.5, 0.0), 0.6).unwrap()));
        assert!(pd.contains_domain(&half));
        assert!(Domain::plane().contains_domain(&Domain::TwicePuncturedPlane));
        let r = Domain::disk_minus(c(0.0, 0.0), 2.0, vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(Domain::TwicePuncturedPlane.contains_domain(&r));
        assert!(!r.contains_domain(&Domain::TwicePuncturedPlane));
    }

    #[test]
    fn canonical_forms_and_parsing() {
        let d: Domain = "plane-minus:0,1".parse().unwrap();
        assert_eq!(d.canonical(), Domain::TwicePuncturedPlane);
        let d: Domain = "edisk-minus:0,1,0".parse().unwrap();
        assert_eq!(d.canonical(), Domain::PuncturedDisk);
        for s in ["disk", "punctured-disk", "annulus:0.25", "edisk:0.5+1i,2", "c01", "plane", "plane-minus:2-1i", "edisk-minus:0,3,1,-1i"] {
            let d: Domain = s.parse().unwrap();
            assert_eq!(d.to_string().parse::<Domain>().unwrap(), d, "{s}");
        }
        assert!("annulus:1.5".parse::<Domain>().is_err());
        assert!("edisk-minus:0,1,2".parse::<Domain>().is_err());
        assert!("plane-minus:1,1".parse::<Domain>().is_err());
        assert!("torus".parse::<Domain>().is_err());
    }

    #[test]
    fn exact_distance_on_scaled_punctured_disk() {
        // D(2, 3) ∖ {2} is D* scaled by 3 and shifted.
        let d = Domain::disk_minus(c(2.0, 0.0), 3.0, vec![c(2.0, 0.0)]).unwrap();
        let (p, q) = (c(2.3, 0.6), c(0.5, -1.0));
        let got = d.exact_distance(p, q).unwrap().unwrap();
        let expect = punctured_disk_distance((p - 2.0) / 3.0, (q - 2.0) / 3.0).unwrap();
        assert!((got - expect).abs() < 1e-12);
        // Off-centre puncture: a disk automorphism moves it to the origin.
        let d = Domain::disk_minus(c(0.0, 0.0), 1.0, vec![c(0.4, 0.0)]).unwrap();
        let m = DiskMobius::new(DiskPoint::new(c(0.4, 0.0)).unwrap(), 0.0);
        let got = d.exact_distance(p / 3.0, q / 3.0).unwrap().unwrap();
        let expect = punctured_disk_distance(m.apply(p / 3.0), m.apply(q / 3.0)).unwrap();
        assert!((got - expect).abs() < 1e-12);
        assert_eq!(Domain::TwicePuncturedPlane.exact_distance(p, q).unwrap(), None);
        assert_eq!(Domain::plane().exact_distance(p, q).unwrap(), Some(0.0));
    }
}
