//! Holomorphic expressions: parsing, forward-mode evaluation and branch
//! continuation.

mod branch;
mod expr;
mod jet;
mod parse;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

pub use branch::{
    continue_log, nth_root, track_log, BranchTrack, ContinuationError, LogBranch, NthRoot,
    ZERO_THRESHOLD,
};
pub use expr::{DomainFault, EvalError, Exponent, Expr};
pub use jet::Jet;
pub use parse::{bind, parse, parse_with, Bindings, ParseError};

/// Anything that can report its value and complex derivative at a point.
pub trait Holomorphic: Send + Sync {
    fn jet(&self, z: Complex64) -> Result<Jet, EvalError>;

    /// Short human-readable description used in reports.
    fn label(&self) -> String;
}

impl Holomorphic for Expr {
    fn jet(&self, z: Complex64) -> Result<Jet, EvalError> {
        self.eval_jet(z)
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

/// Shared handle to a holomorphic function.
#[derive(Clone)]
pub struct HoloFunction {
    inner: Arc<dyn Holomorphic>,
}

type JetFn = dyn Fn(Complex64) -> Result<Jet, EvalError> + Send + Sync;

struct FromFn {
    label: String,
    f: Box<JetFn>,
}

impl Holomorphic for FromFn {
    fn jet(&self, z: Complex64) -> Result<Jet, EvalError> {
        (self.f)(z)
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

struct Precomposed {
    inner: HoloFunction,
    shift: Complex64,
    scale: Complex64,
}

impl Holomorphic for Precomposed {
    fn jet(&self, z: Complex64) -> Result<Jet, EvalError> {
        let j = self.inner.jet(self.shift + self.scale * z)?;
        Ok(Jet::new(j.value, j.derivative * self.scale))
    }

    fn label(&self) -> String {
        format!("{}∘({} + {}·z)", self.inner.label(), self.shift, self.scale)
    }
}

impl HoloFunction {
    pub fn new<H: Holomorphic + 'static>(h: H) -> Self {
        Self { inner: Arc::new(h) }
    }

    /// Wraps a closure returning the jet at a point.
    pub fn from_fn<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(Complex64) -> Result<Jet, EvalError> + Send + Sync + 'static,
    {
        Self::new(FromFn { label: label.into(), f: Box::new(f) })
    }

    pub fn jet(&self, z: Complex64) -> Result<Jet, EvalError> {
        self.inner.jet(z)
    }

    pub fn value(&self, z: Complex64) -> Result<Complex64, EvalError> {
        self.inner.jet(z).map(|j| j.value)
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64, EvalError> {
        self.inner.jet(z).map(|j| j.derivative)
    }

    pub fn label(&self) -> String {
        self.inner.label()
    }

    /// `z ↦ self(shift + scale·z)`.
    pub fn precompose_affine(&self, shift: Complex64, scale: Complex64) -> Self {
        Self::new(Precomposed { inner: self.clone(), shift, scale })
    }
}

impl Holomorphic for HoloFunction {
    fn jet(&self, z: Complex64) -> Result<Jet, EvalError> {
        self.inner.jet(z)
    }

    fn label(&self) -> String {
        self.inner.label()
    }
}

impl From<Expr> for HoloFunction {
    fn from(e: Expr) -> Self {
        Self::new(e)
    }
}

impl fmt::Debug for HoloFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HoloFunction({})", self.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            Just(Expr::Var),
            (-4.0..4.0f64).prop_map(Expr::real),
            ((-2.0..2.0f64), (-2.0..2.0f64)).prop_map(|(a, b)| Expr::constant(Complex64::new(a, b))),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| -e),
                inner.clone().prop_map(Expr::exp),
                inner.clone().prop_map(Expr::log),
                inner.clone().prop_map(Expr::sqrt),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a / b),
                (inner.clone(), -3i64..4).prop_map(|(a, n)| a.pow(Exponent::integer(n))),
                (inner, -3i64..4, 1i64..4)
                    .prop_map(|(a, p, q)| a.pow(Exponent::rational(p, q).unwrap())),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn print_then_parse_is_identity(e in arb_expr()) {
            let back = parse(&e.to_string()).unwrap();
            prop_assert_eq!(back, e);
        }

        #[test]
        fn derivative_matches_central_difference(
            e in arb_expr(),
            re in -0.9..0.9f64,
            im in -0.9..0.9f64,
        ) {
            let z = Complex64::new(re, im);
            let h = 1e-6;
            let (Ok(j), Ok(p), Ok(m)) = (e.eval_jet(z), e.value(z + h), e.value(z - h)) else {
                return Ok(());
            };
            let fd = (p - m) / (2.0 * h);
            // Skip points near a branch cut or singularity, where the
            // difference quotient itself is meaningless.
            let (Ok(p2), Ok(m2)) = (e.value(z + 2.0 * h), e.value(z - 2.0 * h)) else {
                return Ok(());
            };
            let fd2 = (p2 - m2) / (4.0 * h);
            prop_assume!((fd - fd2).norm() <= 1e-7 * (1.0 + fd.norm()));
            prop_assume!(j.value.norm() < 1e6 && j.derivative.norm() < 1e6);
            prop_assert!(
                (j.derivative - fd).norm() <= 1e-6 * (1.0 + j.derivative.norm()),
                "f = {e}, z = {z}, jet = {:?}, fd = {fd}", j.derivative
            );
        }
    }

    #[test]
    fn exp_shifted_derivative_matches_difference_quotient() {
        let f = parse_with("exp(n*(z+2))", &bind("n", 3.0)).unwrap();
        let z = Complex64::new(0.0, 0.0);
        let h = 1e-6;
        let fd = (f.value(z + h).unwrap() - f.value(z - h).unwrap()) / (2.0 * h);
        let d = f.eval_jet(z).unwrap().derivative;
        assert!((d - fd).norm() <= 1e-6 * d.norm());
        assert!((d.re - 1210.286).abs() < 1e-3);
    }

    #[test]
    fn affine_precomposition() {
        let f = HoloFunction::from(parse("z^2").unwrap());
        let g = f.precompose_affine(Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0));
        let j = g.jet(Complex64::new(2.0, 0.0)).unwrap();
        assert_eq!(j.value, Complex64::new(4.0, 0.0));
        assert_eq!(j.derivative, Complex64::new(2.0, 0.0));
    }
}
