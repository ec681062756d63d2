//! Analytic continuation of logarithms and roots along paths.
//!
//! The logarithm of a nonvanishing `f` is continued from the start of a
//! polyline by summing principal increments `Log(f(b)/f(a))` over segments
//! refined until the argument change across each one is below `π/2` and a
//! five-point Gauss–Legendre value of `∫ f'/f` over the segment agrees with
//! the increment. The second check catches windings a coarse segment hides.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use super::{EvalError, HoloFunction, Holomorphic, Jet};

/// `|f|` below this on a path aborts continuation.
pub const ZERO_THRESHOLD: f64 = 1e-12;
const MAX_DEPTH: u32 = 48;
const QUAD_AGREEMENT: f64 = 1e-7;

const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContinuationError {
    #[error("function nearly vanishes on the path at {at} (|f| = {modulus:e})")]
    ZeroCrossing { at: Complex64, modulus: f64 },
    #[error("segment refinement did not converge between {from} and {to}")]
    NonConvergence { from: Complex64, to: Complex64 },
    #[error("path needs at least one point")]
    EmptyPath,
    #[error("supplied base logarithm {log} does not match f = {value} at the base point")]
    BaseMismatch { log: Complex64, value: Complex64 },
    #[error("evaluation failed: {0}")]
    Eval(Box<EvalError>),
}

impl From<EvalError> for ContinuationError {
    fn from(e: EvalError) -> Self {
        ContinuationError::Eval(Box::new(e))
    }
}

/// Record of one continuation: where it started, which branch it started
/// on, the refined path actually followed and the value reached.
#[derive(Debug, Clone, Serialize)]
pub struct BranchTrack {
    pub base_point: Complex64,
    pub base_log_value: Complex64,
    pub path: Vec<Complex64>,
    pub continued_value: Complex64,
}

fn checked_jet<F: Holomorphic + ?Sized>(f: &F, z: Complex64) -> Result<Jet, ContinuationError> {
    let j = f.jet(z)?;
    let m = j.value.norm();
    if m < ZERO_THRESHOLD {
        return Err(ContinuationError::ZeroCrossing { at: z, modulus: m });
    }
    Ok(j)
}

struct Walker<'a, F: ?Sized> {
    f: &'a F,
    refined: Vec<Complex64>,
    keep_path: bool,
}

impl<F: Holomorphic + ?Sized> Walker<'_, F> {
    fn segment(
        &mut self,
        a: Complex64,
        fa: Complex64,
        b: Complex64,
        fb: Complex64,
        depth: u32,
    ) -> Result<Complex64, ContinuationError> {
        let step = (fb / fa).ln();
        let half = (b - a) * 0.5;
        let mid = (a + b) * 0.5;
        let mut quad = Complex64::new(0.0, 0.0);
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            let j = checked_jet(self.f, mid + half * *x)?;
            quad += w * j.derivative / j.value;
        }
        quad *= half;
        let agrees = (quad - step).norm() <= QUAD_AGREEMENT * (1.0 + step.norm());
        if step.im.abs() < FRAC_PI_2 && agrees {
            if self.keep_path {
                self.refined.push(b);
            }
            return Ok(step);
        }
        if depth >= MAX_DEPTH {
            return Err(ContinuationError::NonConvergence { from: a, to: b });
        }
        let fm = checked_jet(self.f, mid)?.value;
        let left = self.segment(a, fa, mid, fm, depth + 1)?;
        let right = self.segment(mid, fm, b, fb, depth + 1)?;
        Ok(left + right)
    }
}

fn walk<F: Holomorphic + ?Sized>(
    f: &F,
    path: &[Complex64],
    base_log: Option<Complex64>,
    keep_path: bool,
) -> Result<BranchTrack, ContinuationError> {
    let (&start, rest) = path.split_first().ok_or(ContinuationError::EmptyPath)?;
    let f0 = checked_jet(f, start)?.value;
    let base_log_value = match base_log {
        None => f0.ln(),
        Some(l) => {
            if (l.exp() - f0).norm() > 1e-9 * f0.norm() {
                return Err(ContinuationError::BaseMismatch { log: l, value: f0 });
            }
            l
        }
    };
    let mut walker = Walker { f, refined: vec![start], keep_path };
    let mut acc = base_log_value;
    let (mut a, mut fa) = (start, f0);
    for &b in rest {
        if b == a {
            continue;
        }
        let fb = checked_jet(f, b)?.value;
        acc += walker.segment(a, fa, b, fb, 0)?;
        a = b;
        fa = fb;
    }
    Ok(BranchTrack {
        base_point: start,
        base_log_value,
        path: walker.refined,
        continued_value: acc,
    })
}

/// Continues `log f` along `path`, starting from the principal value at the
/// first point.
pub fn continue_log<F: Holomorphic + ?Sized>(
    f: &F,
    path: &[Complex64],
) -> Result<Complex64, ContinuationError> {
    walk(f, path, None, false).map(|t| t.continued_value)
}

/// Like [`continue_log`] but starts from a caller-chosen branch and keeps
/// the refined path.
pub fn track_log<F: Holomorphic + ?Sized>(
    f: &F,
    path: &[Complex64],
    base_log: Option<Complex64>,
) -> Result<BranchTrack, ContinuationError> {
    walk(f, path, base_log, true)
}

/// A branch of `log f` on a region star-shaped about `base`, continued along
/// straight segments from `base`.
#[derive(Clone)]
pub struct LogBranch {
    f: HoloFunction,
    base: Complex64,
    base_log: Complex64,
}

impl LogBranch {
    pub fn new(f: HoloFunction, base: Complex64, base_log: Option<Complex64>) -> Result<Self, ContinuationError> {
        let t = walk(&f, &[base], base_log, false)?;
        Ok(Self { f, base, base_log: t.base_log_value })
    }

    pub fn base(&self) -> Complex64 {
        self.base
    }

    pub fn base_log(&self) -> Complex64 {
        self.base_log
    }
}

impl Holomorphic for LogBranch {
    fn jet(&self, z: Complex64) -> Result<Jet, EvalError> {
        let l = walk(&self.f, &[self.base, z], Some(self.base_log), false)?.continued_value;
        let j = self.f.jet(z)?;
        Ok(Jet::new(l, j.derivative / j.value))
    }

    fn label(&self) -> String {
        format!("log[{}]", self.f.label())
    }
}

/// A branch of `f^(1/n)` defined as `exp(log f / n)` with `log f`
/// continued from `base`.
#[derive(Clone)]
pub struct NthRoot {
    log: LogBranch,
    n: u32,
}

impl Holomorphic for NthRoot {
    fn jet(&self, z: Complex64) -> Result<Jet, EvalError> {
        let l = self.log.jet(z)?;
        let g = (l.value / f64::from(self.n)).exp();
        Ok(Jet::new(g, g * l.derivative / f64::from(self.n)))
    }

    fn label(&self) -> String {
        format!("({})^(1/{})", self.log.f.label(), self.n)
    }
}

/// Branch of the `n`-th root of `f` normalised by the principal logarithm of
/// `f(base)`.
pub fn nth_root(f: &HoloFunction, n: u32, base: Complex64) -> Result<HoloFunction, ContinuationError> {
    assert!(n >= 1, "root order must be positive");
    let log = LogBranch::new(f.clone(), base, None)?;
    Ok(HoloFunction::new(NthRoot { log, n }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holo::parse;
    use std::f64::consts::{E, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn h(s: &str) -> HoloFunction {
        HoloFunction::from(parse(s).unwrap())
    }

    #[test]
    fn log_along_real_axis() {
        let v = continue_log(&h("z"), &[c(1.0, 0.0), c(E, 0.0)]).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn winding_once_gives_two_pi_i() {
        // Four coarse edges: the segment refinement must find the winding.
        let square = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0), c(1.0, 0.0)];
        let v = continue_log(&h("z"), &square).unwrap();
        // Oracle: sum of principal argument increments over a fine polyline.
        let fine: Vec<Complex64> = (0..=4000)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 4000.0))
            .collect();
        let winding: f64 = fine.windows(2).map(|w| (w[1] / w[0]).arg()).sum();
        assert!((v - c(0.0, winding)).norm() < 1e-12);
        assert!((v - c(0.0, 2.0 * PI)).norm() < 1e-12);
    }

    #[test]
    fn log_of_exp_follows_the_path() {
        let v = continue_log(&h("exp(z)"), &[c(0.0, 0.0), c(0.0, PI)]).unwrap();
        assert!((v - c(0.0, PI)).norm() < 1e-13);
        let v = continue_log(&h("exp(z)"), &[c(0.0, 0.0), c(0.0, 5.0 * PI)]).unwrap();
        assert!((v - c(0.0, 5.0 * PI)).norm() < 1e-12);
    }

    #[test]
    fn zero_on_path_is_detected() {
        let err = continue_log(&h("z"), &[c(-1.0, 0.0), c(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, ContinuationError::ZeroCrossing { .. }));
        assert_eq!(continue_log(&h("z"), &[]).unwrap_err(), ContinuationError::EmptyPath);
    }

    #[test]
    fn track_keeps_refined_path_and_checks_base() {
        let t = track_log(&h("z"), &[c(1.0, 0.0), c(-1.0, 1e-3)], Some(c(0.0, 2.0 * PI))).unwrap();
        assert!(t.path.len() > 2);
        assert!((t.continued_value.exp() - c(-1.0, 1e-3)).norm() < 1e-12);
        assert!((t.continued_value.im - 3.0 * PI).abs() < 1e-2);
        assert!(matches!(
            track_log(&h("z"), &[c(1.0, 0.0)], Some(c(1.0, 0.0))),
            Err(ContinuationError::BaseMismatch { .. })
        ));
    }

    #[test]
    fn roots() {
        let g = nth_root(&h("exp(z)"), 2, c(0.0, 0.0)).unwrap();
        assert!((g.value(c(2.0, 0.0)).unwrap() - c(E, 0.0)).norm() < 1e-13);
        let g = nth_root(&h("z+2"), 3, c(0.0, 0.0)).unwrap();
        assert!((g.value(c(0.0, 0.0)).unwrap() - c(2f64.cbrt(), 0.0)).norm() < 1e-14);
        let j = g.jet(c(0.3, 0.4)).unwrap();
        assert!((j.value.powi(3) - c(2.3, 0.4)).norm() < 1e-13);
    }
}
