use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// First-order jet of a holomorphic function at a point: the value and the
/// complex derivative carried together through arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub value: Complex64,
    pub derivative: Complex64,
}

impl Jet {
    pub fn new(value: Complex64, derivative: Complex64) -> Self {
        Self { value, derivative }
    }

    pub fn constant(value: Complex64) -> Self {
        Self { value, derivative: Complex64::new(0.0, 0.0) }
    }

    /// The identity jet `z` at `z`.
    pub fn variable(z: Complex64) -> Self {
        Self { value: z, derivative: Complex64::new(1.0, 0.0) }
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        Self::new(e, e * self.derivative)
    }

    /// Principal logarithm. The caller guarantees `value != 0`.
    pub fn ln(self) -> Self {
        Self::new(self.value.ln(), self.derivative / self.value)
    }

    /// Principal square root. The caller guarantees `value != 0`.
    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        Self::new(s, self.derivative / (2.0 * s))
    }

    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::constant(Complex64::new(1.0, 0.0)),
            1 => self,
            _ => {
                let lower = self.value.powi(n - 1);
                Self::new(lower * self.value, f64::from(n) * lower * self.derivative)
            }
        }
    }

    /// Principal branch of `value^p` for real `p`; requires `value != 0`.
    pub fn powf(self, p: f64) -> Self {
        let v = (p * self.value.ln()).exp();
        Self::new(v, p * v / self.value * self.derivative)
    }

    /// Composition with a function whose value and derivative at `self.value`
    /// are `outer`.
    pub fn compose(self, outer: Jet) -> Self {
        Self::new(outer.value, outer.derivative * self.derivative)
    }

    pub fn scale(self, c: Complex64) -> Self {
        Self::new(c * self.value, c * self.derivative)
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.derivative.is_finite()
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        Jet::new(self.value + rhs.value, self.derivative + rhs.derivative)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        Jet::new(self.value - rhs.value, self.derivative - rhs.derivative)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        Jet::new(
            self.value * rhs.value,
            self.derivative * rhs.value + self.value * rhs.derivative,
        )
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let q = self.value / rhs.value;
        Jet::new(q, (self.derivative - q * rhs.derivative) / rhs.value)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.value, -self.derivative)
    }
}
