//! Property tests for the invariants each module promises.

use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;

use kobalt::c01::{f_lower, f_lower_chain, f_upper, metric_interval, mu, ConstantsConfig};
use kobalt::domains::{annulus_distance, punctured_disk_distance, punctured_disk_fiber, Domain, DEFAULT_WINDOW};
use kobalt::holo::{continue_log, nth_root, parse, HoloFunction};
use kobalt::kobayashi::{curve_length, estimate_distance, Curve, OptimizerBudget};
use kobalt::poincare::{omega, DiskMobius, DiskPoint};
use kobalt::rescaling::{root_trick, zalcman_rescale, RescalingConfig, RescalingStep, SHRINK};
use kobalt::theorems::{landau_radius, picard_circle_budget, schottky_budget};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn disk_point(max: f64) -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, 0.0..TAU).prop_map(move |(s, t)| Complex64::from_polar(max * s.sqrt(), t))
}

fn punctured_point() -> impl Strategy<Value = Complex64> {
    (0.01..0.97f64, 0.0..TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn c01_point() -> impl Strategy<Value = Complex64> {
    (-3.0..4.0f64, -3.0..3.0f64)
        .prop_map(|(x, y)| Complex64::new(x, y))
        .prop_filter("away from 0 and 1", |z| z.norm() > 1e-3 && (z - ONE).norm() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mobius_composition_preserves_omega(
        a in disk_point(0.9), b in disk_point(0.9), s in 0.0..TAU, t in 0.0..TAU,
        z in disk_point(0.9), w in disk_point(0.9),
    ) {
        let f = DiskMobius::new(DiskPoint::new(a).unwrap(), s).compose(&DiskMobius::new(DiskPoint::new(b).unwrap(), t));
        let (z, w) = (DiskPoint::new(z).unwrap(), DiskPoint::new(w).unwrap());
        let (fz, fw) = (DiskPoint::new(f.apply(z.value())).unwrap(), DiskPoint::new(f.apply(w.value())).unwrap());
        let d = omega(z, w);
        prop_assert!((omega(fz, fw) - d).abs() <= 1e-9 * (1.0 + d));
    }

    #[test]
    fn punctured_distance_is_rotation_invariant_and_symmetric(p in punctured_point(), q in punctured_point(), t in 0.0..TAU) {
        let d = punctured_disk_distance(p, q).unwrap();
        let rot = Complex64::from_polar(1.0, t);
        prop_assert!((punctured_disk_distance(rot * p, rot * q).unwrap() - d).abs() <= 1e-10 * (1.0 + d));
        prop_assert!((punctured_disk_distance(q, p).unwrap() - d).abs() <= 1e-10 * (1.0 + d));
    }

    #[test]
    fn widening_the_fiber_window_changes_nothing(p in punctured_point(), q in punctured_point()) {
        let narrow = punctured_disk_fiber(p, q, DEFAULT_WINDOW).unwrap().distance;
        let wide = punctured_disk_fiber(p, q, 4 * DEFAULT_WINDOW).unwrap().distance;
        prop_assert!((narrow - wide).abs() <= 1e-12);
    }

    #[test]
    fn annulus_triangle_inequality(r in 0.05..0.9f64, s in proptest::collection::vec((0.0..1.0f64, 0.0..TAU), 3)) {
        let pts: Vec<Complex64> = s.iter().map(|(u, t)| Complex64::from_polar(r + (1.0 - r) * (0.01 + 0.98 * u), *t)).collect();
        let d = |a: Complex64, b: Complex64| annulus_distance(a, b, r).unwrap();
        prop_assert!(d(pts[0], pts[1]) + d(pts[1], pts[2]) - d(pts[0], pts[2]) >= -1e-10);
    }

    #[test]
    fn metric_bounds_are_ordered_and_homogeneous(z in c01_point(), c in (0.1..10.0f64, 0.0..TAU)) {
        let cfg = ConstantsConfig::default();
        let v = Complex64::from_polar(c.0, c.1);
        let m = metric_interval(z, v, &cfg).unwrap();
        prop_assert!(0.0 <= m.lower && m.lower <= m.upper);
        let lo = f_lower(z, ONE, &cfg).unwrap().max(f_lower_chain(z, ONE, &cfg).unwrap());
        let up = f_upper(z, ONE).unwrap();
        prop_assert!((m.lower - c.0 * lo).abs() <= 1e-12 * (1.0 + m.lower));
        prop_assert!((m.upper - c.0 * up).abs() <= 1e-12 * (1.0 + m.upper));
    }

    #[test]
    fn mu_is_positive_and_symmetric(z in c01_point()) {
        let m = mu(z).unwrap();
        prop_assert!(m > 0.0);
        prop_assert!((mu(ONE - z).unwrap() - m).abs() <= 1e-12 * m);
    }

    #[test]
    fn landau_interval_scales_with_the_derivative(a in c01_point(), b in (0.01..10.0f64, 0.0..TAU), c in 0.1..10.0f64) {
        let cfg = ConstantsConfig::default();
        let b = Complex64::from_polar(b.0, b.1);
        let base = landau_radius(a, b, &cfg).unwrap();
        let scaled = landau_radius(a, c * b, &cfg).unwrap();
        prop_assert!(0.0 < base.lower && base.lower <= base.upper);
        prop_assert!(base.affine_witness_hits());
        prop_assert!((scaled.lower * c - base.lower).abs() <= 1e-12 * base.lower);
        prop_assert!((scaled.upper * c - base.upper).abs() <= 1e-12 * base.upper);
    }

    #[test]
    fn schottky_ball_radius_adds_the_disk_radius(big_r in 0.0..5.0f64, r in 0.0..0.99f64) {
        let b = schottky_budget(Complex64::new(0.0, 0.0), big_r, r, &Domain::UnitDisk, &ConstantsConfig::default()).unwrap();
        prop_assert!((b.delta - r.atanh()).abs() <= 1e-15);
        prop_assert!((b.ball_radius - (big_r + b.delta)).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn continued_log_exponentiates_back(c in (-2.0..2.0f64, -2.0..2.0f64), end in disk_point(0.9)) {
        let f = HoloFunction::from(parse(&format!("exp(z^2 + ({} + {}*i)*z) * (z + 2)", c.0, c.1)).unwrap());
        let path = [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.5), end];
        let l = continue_log(&f, &path).unwrap();
        let fv = f.value(end).unwrap();
        prop_assert!((l.exp() - fv).norm() <= 1e-9 * fv.norm());
    }

    #[test]
    fn nth_root_raised_back(n in 1u32..8, z in disk_point(0.9)) {
        let f = HoloFunction::from(parse("exp(3*z) * (z + 2)").unwrap());
        let g = nth_root(&f, n, Complex64::new(0.0, 0.0)).unwrap();
        let fv = f.value(z).unwrap();
        prop_assert!((g.value(z).unwrap().powu(n) - fv).norm() <= 1e-9 * fv.norm());
        let h = root_trick(&f, n).unwrap();
        prop_assert!((h.value(z).unwrap().powu(n) - fv).norm() <= 1e-8 * fv.norm());
    }

    #[test]
    fn curve_length_is_refinement_invariant(nodes in proptest::collection::vec(punctured_point(), 2..5)) {
        let Ok(curve) = Curve::polyline(Domain::PuncturedDisk, &nodes) else { return Ok(()) };
        let metric = |z, v| kobalt::domains::punctured_disk_metric(z, v).unwrap_or(f64::NAN);
        let coarse = curve_length(metric, &curve).unwrap();
        let fine = curve_length(metric, &curve.refined()).unwrap();
        prop_assert!((coarse - fine).abs() <= 1e-9 * (1.0 + coarse));
    }

    #[test]
    fn picard_circle_matches_quadrature(r in 0.05..0.95f64) {
        let b = picard_circle_budget(r, 0.0).unwrap();
        let curve = Curve::circle(Domain::PuncturedDisk, Complex64::new(0.0, 0.0), r).unwrap();
        let len = curve_length(|z, v| kobalt::domains::punctured_disk_metric(z, v).unwrap(), &curve).unwrap();
        prop_assert!((b.length - len).abs() <= 1e-8);
    }

    #[test]
    fn rescaling_step_radius_and_normalisation(c in 0.2..4.0f64, a in disk_point(0.99)) {
        let f = HoloFunction::from(parse(&format!("exp({c}*z)")).unwrap());
        let step = RescalingStep::at_point(f.clone(), a).unwrap();
        prop_assert!((step.preimage_radius - step.boundary_distance * step.fpa.norm() / 2.0).abs() <= 1e-12 * step.preimage_radius);
        prop_assert!((step.rescaled_derivative(Complex64::new(0.0, 0.0)).unwrap().norm() - 1.0).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn rescaled_radius_dominates_the_origin(c in (0.5..6.0f64, 0.0..TAU), k in 1i64..4) {
        let c = Complex64::from_polar(c.0, c.1);
        let f = HoloFunction::from(parse(&format!("exp(({} + {}*i)*z^{k})", c.re, c.im)).unwrap());
        let step = zalcman_rescale(&f, &RescalingConfig { resolution: 61, samples: 1000 }).unwrap();
        // The step rescales f(SHRINK·z), whose derivative at 0 carries the factor.
        let origin = SHRINK * f.derivative(Complex64::new(0.0, 0.0)).unwrap().norm();
        prop_assert!(step.preimage_radius >= origin / 2.0 * (1.0 - 1e-12));
    }

    #[test]
    fn estimates_are_ordered_and_witnessed(p in punctured_point(), q in punctured_point()) {
        let budget = OptimizerBudget { restarts: 2, evals_per_restart: 150, ..Default::default() };
        let e = estimate_distance(&Domain::PuncturedDisk, p, q, &budget, &ConstantsConfig::default()).unwrap();
        prop_assert!(e.lower <= e.upper + 1e-9 * (1.0 + e.upper));
        prop_assert!(e.validation.as_ref().is_none_or(|v| v.valid && v.min_clearance >= 1e-9));
    }
}
