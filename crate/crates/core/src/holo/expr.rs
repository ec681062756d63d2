use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use super::branch::ContinuationError;
use super::jet::Jet;

/// Rational exponent `num/den`, kept in lowest terms with `den >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exponent {
    num: i64,
    den: u32,
}

impl Exponent {
    pub fn integer(n: i64) -> Self {
        Self { num: n, den: 1 }
    }

    /// Returns `None` when `den == 0`.
    pub fn rational(num: i64, den: i64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let sign = if den < 0 { -1 } else { 1 };
        let (mut a, mut b) = ((num * sign).unsigned_abs(), den.unsigned_abs());
        let g = gcd(a, b);
        if g > 1 {
            a /= g;
            b /= g;
        }
        let num = if num * sign < 0 { -(a as i64) } else { a as i64 };
        Some(Self { num, den: u32::try_from(b).ok()? })
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> u32 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / f64::from(self.den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.den, self.num >= 0) {
            (1, true) => write!(f, "{}", self.num),
            (1, false) => write!(f, "({})", self.num),
            _ => write!(f, "({}/{})", self.num, self.den),
        }
    }
}

/// Expression tree for a holomorphic function of the single variable `z`.
///
/// `log`, `sqrt` and non-integer powers use the principal branch; branch
/// continuation along paths lives in [`super::branch`].
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Var,
    Neg(Box<Expr>),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Sqrt(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Exponent),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainFault {
    LogOfZero,
    SqrtOfZero,
    DivisionByZero,
    ZeroToNegativePower,
    ZeroToFractionalPower,
}

impl fmt::Display for DomainFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DomainFault::LogOfZero => "logarithm of zero",
            DomainFault::SqrtOfZero => "square root at its branch point",
            DomainFault::DivisionByZero => "division by zero",
            DomainFault::ZeroToNegativePower => "zero raised to a negative power",
            DomainFault::ZeroToFractionalPower => "zero raised to a fractional power",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{fault} in `{node}` at z = {at}")]
    Domain { node: String, fault: DomainFault, at: Complex64 },
    #[error("non-finite value in `{node}` at z = {at}")]
    NonFinite { node: String, at: Complex64 },
    #[error("branch continuation failed: {0}")]
    Continuation(Box<ContinuationError>),
}

impl From<ContinuationError> for EvalError {
    fn from(e: ContinuationError) -> Self {
        EvalError::Continuation(Box::new(e))
    }
}

impl Expr {
    pub fn var() -> Self {
        Expr::Var
    }

    pub fn constant(c: Complex64) -> Self {
        Expr::Const(c)
    }

    pub fn real(x: f64) -> Self {
        Expr::Const(Complex64::new(x, 0.0))
    }

    pub fn exp(self) -> Self {
        Expr::Exp(Box::new(self))
    }

    pub fn log(self) -> Self {
        Expr::Log(Box::new(self))
    }

    pub fn sqrt(self) -> Self {
        Expr::Sqrt(Box::new(self))
    }

    pub fn pow(self, e: Exponent) -> Self {
        Expr::Pow(Box::new(self), e)
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var => 1,
            Expr::Neg(a) | Expr::Exp(a) | Expr::Log(a) | Expr::Sqrt(a) | Expr::Pow(a, _) => {
                1 + a.size()
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    pub fn value(&self, z: Complex64) -> Result<Complex64, EvalError> {
        self.eval_jet(z).map(|j| j.value)
    }

    /// Value and derivative at `z` by forward-mode differentiation.
    pub fn eval_jet(&self, z: Complex64) -> Result<Jet, EvalError> {
        let fault = |fault| EvalError::Domain { node: self.to_string(), fault, at: z };
        let out = match self {
            Expr::Const(c) => Jet::constant(*c),
            Expr::Var => Jet::variable(z),
            Expr::Neg(a) => -a.eval_jet(z)?,
            Expr::Exp(a) => a.eval_jet(z)?.exp(),
            Expr::Log(a) => {
                let x = a.eval_jet(z)?;
                if x.value == Complex64::new(0.0, 0.0) {
                    return Err(fault(DomainFault::LogOfZero));
                }
                x.ln()
            }
            Expr::Sqrt(a) => {
                let x = a.eval_jet(z)?;
                if x.value == Complex64::new(0.0, 0.0) {
                    return Err(fault(DomainFault::SqrtOfZero));
                }
                x.sqrt()
            }
            Expr::Add(a, b) => a.eval_jet(z)? + b.eval_jet(z)?,
            Expr::Sub(a, b) => a.eval_jet(z)? - b.eval_jet(z)?,
            Expr::Mul(a, b) => a.eval_jet(z)? * b.eval_jet(z)?,
            Expr::Div(a, b) => {
                let (x, y) = (a.eval_jet(z)?, b.eval_jet(z)?);
                if y.value == Complex64::new(0.0, 0.0) {
                    return Err(fault(DomainFault::DivisionByZero));
                }
                x / y
            }
            Expr::Pow(a, e) => {
                let x = a.eval_jet(z)?;
                let zero = x.value == Complex64::new(0.0, 0.0);
                if e.is_integer() {
                    let n = i32::try_from(e.numerator()).map_err(|_| EvalError::NonFinite {
                        node: self.to_string(),
                        at: z,
                    })?;
                    if n < 0 {
                        if zero {
                            return Err(fault(DomainFault::ZeroToNegativePower));
                        }
                        Jet::constant(Complex64::new(1.0, 0.0)) / x.powi(-n)
                    } else {
                        x.powi(n)
                    }
                } else {
                    if zero {
                        return Err(fault(DomainFault::ZeroToFractionalPower));
                    }
                    x.powf(e.as_f64())
                }
            }
        };
        if out.is_finite() {
            Ok(out)
        } else {
            Err(EvalError::NonFinite { node: self.to_string(), at: z })
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl std::ops::$trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(self), Box::new(rhs))
            }
        }
    };
}

binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

fn write_real(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    if x.is_sign_negative() {
        write!(f, "(-{:?})", -x)
    } else {
        write!(f, "{x:?}")
    }
}

/// Prints in the grammar accepted by [`super::parse`]; reparsing yields an
/// identical tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if c.im == 0.0 && !c.im.is_sign_negative() => write_real(f, c.re),
            Expr::Const(c) if c.re == 0.0 && !c.re.is_sign_negative() && c.im == 1.0 => {
                f.write_str("i")
            }
            Expr::Const(c) => write!(f, "[{:?}, {:?}]", c.re, c.im),
            Expr::Var => f.write_str("z"),
            Expr::Neg(a) => write!(f, "(-({a}))"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Log(a) => write!(f, "log({a})"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, e) => write!(f, "({a})^{e}"),
        }
    }
}
