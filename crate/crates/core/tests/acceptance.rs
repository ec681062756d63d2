//! Acceptance criteria. Each prints one PASS or FAIL line; the process exits
//! nonzero if any fails.

use std::f64::consts::{LN_2, PI, TAU};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kobalt::c01::{build_lattice_map, f_lower, f_upper, lattice_gaps, mu_curvature, ConstantsConfig, DiskRegion};
use kobalt::domains::{annulus_distance, punctured_disk_distance, punctured_disk_metric, Domain};
use kobalt::holo::{bind, parse, parse_with, HoloFunction, Jet};
use kobalt::kobayashi::{curve_length, upper_bound_distance, Curve, OptimizerBudget};
use kobalt::poincare::{halfplane_distance, omega_at, schwarz_pick_certificate, DiskPoint};
use kobalt::rescaling::{exponential_family, rescaling_sequence_demo, RescalingConfig, TWO_BOUND_TOLERANCE};
use kobalt::theorems::{
    bounded_domain_escape, completeness_profile, equivalence_witnesses, landau_radius, schottky_budget,
    schottky_sample_check, ApproachPoint, EquivalenceSampling, ModulusBound,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_disk_point(rng: &mut ChaCha8Rng, max: f64) -> Complex64 {
    Complex64::from_polar(max * rng.random_range(0.0f64..1.0).sqrt(), rng.random_range(0.0..TAU))
}

fn random_punctured_point(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(rng.random_range(0.02..0.95), rng.random_range(0.0..TAU))
}

fn picard_circle_length() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 1..=9 {
        let r = f64::from(k) / 10.0;
        let curve = Curve::circle(Domain::PuncturedDisk, ZERO, r).map_err(|e| e.to_string())?;
        let len = curve_length(|z, v| punctured_disk_metric(z, v).unwrap_or(f64::NAN), &curve).map_err(|e| e.to_string())?;
        worst = worst.max((len - PI / -r.ln()).abs());
    }
    let curve = Curve::circle(Domain::PuncturedDisk, ZERO, 0.5).map_err(|e| e.to_string())?;
    let half = curve_length(|z, v| punctured_disk_metric(z, v).unwrap_or(f64::NAN), &curve).map_err(|e| e.to_string())?;
    check(
        worst <= 1e-8 && (half - PI / LN_2).abs() <= 1e-8 && (half - 4.532_360_1).abs() < 1e-7,
        format!("max error {worst:.2e}, length at r = 1/2 is {half:.10}"),
    )
}

fn metric_distance_consistency() -> Outcome {
    let mut rng = rng(2);
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let z = random_punctured_point(&mut rng);
        let v = Complex64::from_polar(1.0, rng.random_range(0.0..TAU));
        let quotient = punctured_disk_distance(z, z + h * v).map_err(|e| e.to_string())? / h;
        let exact = punctured_disk_metric(z, v).map_err(|e| e.to_string())?;
        worst = worst.max((quotient / exact - 1.0).abs());
    }
    check(worst <= 1e-3, format!("max relative error {worst:.2e} over 50 points"))
}

fn rescaling_two_bound() -> Outcome {
    let report = rescaling_sequence_demo(exponential_family, 10, &RescalingConfig::default()).map_err(|e| e.to_string())?;
    let sup = report.derivative_sup.iter().copied().fold(0.0, f64::max);
    let norm = report.steps.iter().map(|s| (s.normalization - 1.0).abs()).fold(0.0, f64::max);
    let samples = report.steps.iter().map(|s| s.two_bound.samples).min().unwrap_or(0);
    check(
        sup <= 2.0 * (1.0 + TWO_BOUND_TOLERANCE) && norm <= 1e-10 && report.radii_increasing && samples >= 10_000,
        format!("max sup {sup:.9}, normalisation error {norm:.1e}, radii increasing: {}, {samples} samples per step", report.radii_increasing),
    )
}

fn lattice_lemma() -> Outcome {
    let gaps = lattice_gaps(10_000);
    let expected = (2.0 + 3f64.sqrt()).ln();
    let mut worst: f64 = 0.0;
    let mut samples = usize::MAX;
    for f in [parse_with("exp(n*(z+2))", &bind("n", 3.0)), parse("z/3 + 2")] {
        let f = HoloFunction::from(f.map_err(|e| e.to_string())?);
        let chain = build_lattice_map(f, DiskRegion::unit(), ZERO).map_err(|e| e.to_string())?;
        let r = chain.verify(14).map_err(|e| e.to_string())?;
        worst = worst.max(r.max_round_trip);
        samples = samples.min(r.samples);
    }
    check(
        (gaps.max_gap - expected).abs() < 1e-12 && gaps.max_gap <= 4f64.ln() && worst <= 1e-8 && samples >= 100,
        format!("max gap {:.6} (log(2+√3) = {expected:.6}), round trip {worst:.1e} on {samples} points", gaps.max_gap),
    )
}

fn chart_grid() -> Vec<Complex64> {
    let mut out = Vec::new();
    for i in 0..67 {
        let rho = 0.45 * (f64::from(i % 6) + 1.0) / 6.0;
        let t = TAU * f64::from(i) / 67.0;
        out.push(Complex64::from_polar(rho, t));
        out.push(ONE + Complex64::from_polar(rho, t + 0.3));
        out.push(Complex64::from_polar(1.0 / rho, t + 0.6));
    }
    out.truncate(200);
    out
}

fn metric_sandwich() -> Outcome {
    let cfg = ConstantsConfig::default();
    let grid = chart_grid();
    let mut worst = f64::NEG_INFINITY;
    for z in &grid {
        let lo = f_lower(*z, ONE, &cfg).map_err(|e| e.to_string())?;
        let up = f_upper(*z, ONE).map_err(|e| e.to_string())?;
        worst = worst.max(lo / up);
    }
    let mut rng = rng(5);
    let mut worst_disk = f64::NEG_INFINITY;
    for _ in 0..200 {
        let z = random_punctured_point(&mut rng);
        let up = f_upper(z, ONE).map_err(|e| e.to_string())?;
        worst_disk = worst_disk.max(up / punctured_disk_metric(z, ONE).map_err(|e| e.to_string())?);
    }
    check(
        grid.len() == 200 && worst <= 1.0 && worst_disk <= 1.0 + 1e-12,
        format!("max f_lower/f_upper {worst:.4} on {} chart points, max f_upper/punctured metric {worst_disk:.6}", grid.len()),
    )
}

fn landau_affine_witness() -> Outcome {
    let cfg = ConstantsConfig::default();
    let mut rng = rng(6);
    let mut hits = 0;
    for _ in 0..1000 {
        let a = Complex64::new(rng.random_range(-3.0..4.0), rng.random_range(-3.0..3.0));
        let b = Complex64::from_polar(rng.random_range(0.01..10.0), rng.random_range(0.0..TAU));
        let Ok(interval) = landau_radius(a, b, &cfg) else { continue };
        if interval.affine_witness_hits() && interval.lower <= interval.upper {
            hits += 1;
        }
    }
    check(hits == 1000, format!("{hits}/1000 affine images reach 0 or 1"))
}

fn schottky_disk() -> Outcome {
    let cfg = ConstantsConfig::default();
    let (big_r, r) = (1.0, 0.5);
    let budget = schottky_budget(ZERO, big_r, r, &Domain::UnitDisk, &cfg).map_err(|e| e.to_string())?;
    let expected = (big_r + r.atanh()).tanh();
    let exact = matches!(budget.bound, ModulusBound::Exact { value } if (value - expected).abs() <= 1e-15);
    let sample = schottky_sample_check(&budget, &Domain::UnitDisk, 200, 7).map_err(|e| e.to_string())?;
    check(
        exact && sample.passed && sample.maps == 200,
        format!("M = {expected:.6}, max |f| = {:.6} over {} maps and {} points", sample.max_modulus, sample.maps, sample.points),
    )
}

fn completeness_divergence() -> Outcome {
    let cfg = ConstantsConfig::default();
    let ks: Vec<i32> = (2..=10).collect();
    let profile = completeness_profile(Complex64::new(0.5, 0.0), &ks, &cfg).map_err(|e| e.to_string())?;
    let increasing = profile.windows(2).all(|w| w[1] > w[0]);
    let ratio = profile[8] / profile[0];
    let domain = Domain::disk_minus(ZERO, 1.0, vec![ZERO]).map_err(|e| e.to_string())?;
    let approach: Vec<ApproachPoint> =
        (1..=8).map(|k| ApproachPoint::new(ONE, -(10f64.powi(k)))).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let escape = bounded_domain_escape(&domain, Complex64::new(0.5, 0.0), ZERO, &approach).map_err(|e| e.to_string())?;
    let past = escape.first_exceeding(5.0);
    check(
        increasing && ratio > 3.0 && escape.strictly_increasing && past.is_some(),
        format!("log-log ratio k=10/k=2 {ratio:.2}, escape bounds reach {:.3} (past 5 at step {past:?})", escape.bounds.last().unwrap_or(&0.0)),
    )
}

fn disc_chain_optimizer() -> Outcome {
    let budget = OptimizerBudget::default();
    let mut rng = rng(9);
    let mut worst_disk: f64 = 0.0;
    let mut worst_punctured: f64 = 0.0;
    let mut below = false;
    for _ in 0..20 {
        let (p, q) = (random_disk_point(&mut rng, 0.9), random_disk_point(&mut rng, 0.9));
        let up = upper_bound_distance(&Domain::UnitDisk, p, q, &budget).map_err(|e| e.to_string())?;
        worst_disk = worst_disk.max((up.value - omega_at(p, q).map_err(|e| e.to_string())?).abs());
    }
    for _ in 0..20 {
        let (p, q) = (random_punctured_point(&mut rng), random_punctured_point(&mut rng));
        let up = upper_bound_distance(&Domain::PuncturedDisk, p, q, &budget).map_err(|e| e.to_string())?;
        let exact = punctured_disk_distance(p, q).map_err(|e| e.to_string())?;
        below |= up.value < exact - 1e-9;
        worst_punctured = worst_punctured.max(up.value / exact - 1.0);
    }
    check(
        worst_disk <= 1e-3 && worst_punctured <= 0.05 && !below,
        format!("max |upper − ω| {worst_disk:.1e} on 𝔻, max relative excess {worst_punctured:.1e} on 𝔻*"),
    )
}

fn blaschke(rng: &mut ChaCha8Rng) -> HoloFunction {
    let zeros: Vec<Complex64> = (0..rng.random_range(1..=4)).map(|_| random_disk_point(rng, 0.95)).collect();
    let rot = Complex64::from_polar(1.0, rng.random_range(0.0..TAU));
    HoloFunction::from_fn("blaschke", move |z| {
        let mut j = Jet::constant(rot);
        for a in &zeros {
            j = j * ((Jet::variable(z) - Jet::constant(*a)) / (Jet::constant(ONE) - Jet::variable(z).scale(a.conj())));
        }
        Ok(j)
    })
}

fn schwarz_pick_and_axioms() -> Outcome {
    let mut rng = rng(10);
    let mut passed_maps = 0;
    for _ in 0..500 {
        let f = blaschke(&mut rng);
        let pairs: Vec<(DiskPoint, DiskPoint)> = (0..20)
            .map(|_| {
                let z = DiskPoint::new(random_disk_point(&mut rng, 0.95)).expect("inside");
                let w = DiskPoint::new(random_disk_point(&mut rng, 0.95)).expect("inside");
                (z, w)
            })
            .collect();
        if schwarz_pick_certificate(&f, &pairs, 1e-10).passed {
            passed_maps += 1;
        }
    }
    type Dist = Box<dyn Fn(Complex64, Complex64) -> f64>;
    let region = Domain::disk_minus(Complex64::new(0.5, 0.0), 2.0, vec![Complex64::new(0.0, 0.3)]).map_err(|e| e.to_string())?;
    let distances: Vec<(&str, Dist, Box<dyn Fn(&mut ChaCha8Rng) -> Complex64>)> = vec![
        ("disk", Box::new(|a, b| omega_at(a, b).unwrap()), Box::new(|r| random_disk_point(r, 0.95))),
        (
            "half-plane",
            Box::new(|a, b| halfplane_distance(a, b).unwrap()),
            Box::new(|r| Complex64::new(r.random_range(-3.0..3.0), r.random_range(0.01..3.0))),
        ),
        ("punctured disk", Box::new(|a, b| punctured_disk_distance(a, b).unwrap()), Box::new(random_punctured_point)),
        (
            "annulus",
            Box::new(|a, b| annulus_distance(a, b, 0.3).unwrap()),
            Box::new(|r| Complex64::from_polar(r.random_range(0.31..0.99), r.random_range(0.0..TAU))),
        ),
        (
            "punctured region",
            Box::new(move |a, b| region.exact_distance(a, b).unwrap().unwrap()),
            Box::new(|r| loop {
                let z = Complex64::new(0.5, 0.0) + random_disk_point(r, 1.98);
                if (z - Complex64::new(0.0, 0.3)).norm() > 1e-3 {
                    break z;
                }
            }),
        ),
    ];
    let mut worst = f64::INFINITY;
    for (_, d, sample) in &distances {
        for _ in 0..1000 {
            let (x, y, z) = (sample(&mut rng), sample(&mut rng), sample(&mut rng));
            let (xy, yz, xz) = (d(x, y), d(y, z), d(x, z));
            worst = worst.min(xy + yz - xz).min(-(xy - d(y, x)).abs());
        }
    }
    check(
        passed_maps == 500 && worst >= -1e-10,
        format!("{passed_maps}/500 maps distance-decreasing, worst triangle/symmetry slack {worst:.1e} over {} distances", distances.len()),
    )
}

fn curvature_of_mu() -> Outcome {
    let (nx, ny) = (101, 81);
    let mut max = f64::NEG_INFINITY;
    let mut points = 0;
    for i in 0..nx {
        for j in 0..ny {
            let z = Complex64::new(-2.0 + 5.0 * f64::from(i) / f64::from(nx - 1), -2.0 + 4.0 * f64::from(j) / f64::from(ny - 1));
            if z.norm().min((z - ONE).norm()) < 0.05 {
                continue;
            }
            max = max.max(mu_curvature(z, 1e-3).map_err(|e| e.to_string())?);
            points += 1;
        }
    }
    check(max < 0.0, format!("max curvature {max:.4} over {points} grid points"))
}

fn equivalence() -> Outcome {
    let cfg = ConstantsConfig::default();
    let sampling = EquivalenceSampling { maps: 100, pairs: 100, ..Default::default() };
    let plane = equivalence_witnesses(&Domain::plane(), &sampling, &cfg).map_err(|e| e.to_string())?;
    let punctured = equivalence_witnesses(&Domain::plane_minus(vec![ZERO]).map_err(|e| e.to_string())?, &sampling, &cfg).map_err(|e| e.to_string())?;
    let c01 = equivalence_witnesses(&Domain::TwicePuncturedPlane, &sampling, &cfg).map_err(|e| e.to_string())?;
    let nn = |r: &kobalt::theorems::EquivalenceReport| r.non_normality.as_ref().is_some_and(|c| c.passed);
    let eq = c01.equicontinuity.as_ref();
    check(
        nn(&plane) && nn(&punctured) && c01.consistent && eq.is_some_and(|c| c.passed && c.maps == 100 && c.pairs == 100),
        format!(
            "n·z: {}, exp(n·z): {}, equicontinuity on ℂ∖{{0,1}}: max excess {:.2e}",
            nn(&plane),
            nn(&punctured),
            eq.map_or(f64::NAN, |c| c.max_excess)
        ),
    )
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 12] = [
        ("picard circle length", Duration::from_secs(1), picard_circle_length),
        ("metric/distance consistency", Duration::from_secs(5), metric_distance_consistency),
        ("rescaling two-bound", Duration::from_secs(30), rescaling_two_bound),
        ("lattice lemma", Duration::from_secs(5), lattice_lemma),
        ("metric sandwich", Duration::from_secs(5), metric_sandwich),
        ("landau affine witness", Duration::from_secs(5), landau_affine_witness),
        ("schottky on the disk", Duration::from_secs(10), schottky_disk),
        ("completeness divergence", Duration::from_secs(1), completeness_divergence),
        ("disc-chain optimizer", Duration::from_secs(60), disc_chain_optimizer),
        ("schwarz-pick and axioms", Duration::from_secs(30), schwarz_pick_and_axioms),
        ("curvature of mu", Duration::from_secs(10), curvature_of_mu),
        ("equivalence witnesses", Duration::from_secs(10), equivalence),
    ];
    let mut failures = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) => (elapsed <= *limit, d),
            Err(d) => (false, d),
        };
        let timing = format!("{:.2}s of {}s", elapsed.as_secs_f64(), limit.as_secs());
        println!("{} {:>2} {name}: {detail} [{timing}]", if ok { "PASS" } else { "FAIL" }, i + 1);
        if !ok {
            failures += 1;
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
