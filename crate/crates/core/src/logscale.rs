//! Overflow-safe complex products.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Div, DivAssign, Mul, MulAssign, Neg};

use num_complex::Complex64;

/// A complex number stored as `exp(log_mag + i·phase)`.
///
/// Products and quotients are additions of the two components, so long
/// products such as `∏_{i<j} (q_j - q_i)` for `m` in the hundreds stay finite.
/// Zero is `log_mag = -∞`.
#[derive(Clone, Copy, PartialEq)]
pub struct LogComplex {
    log_mag: f64,
    phase: f64,
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_phase(p: f64) -> f64 {
    if p > -PI && p <= PI {
        return p;
    }
    let w = (p + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        log_mag: f64::NEG_INFINITY,
        phase: 0.0,
    };
    pub const ONE: LogComplex = LogComplex {
        log_mag: 0.0,
        phase: 0.0,
    };

    pub fn new(log_mag: f64, phase: f64) -> Self {
        if log_mag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogComplex {
            log_mag,
            phase: wrap_phase(phase),
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            return Self::ZERO;
        }
        LogComplex {
            log_mag: z.norm().ln(),
            phase: z.arg(),
        }
    }

    pub fn from_real(x: f64) -> Self {
        Self::from_complex(Complex64::new(x, 0.0))
    }

    /// Product of an iterator of complex factors.
    pub fn product<I: IntoIterator<Item = Complex64>>(factors: I) -> Self {
        let mut log_mag = 0.0;
        let mut phase = 0.0;
        for z in factors {
            if z.re == 0.0 && z.im == 0.0 {
                return Self::ZERO;
            }
            log_mag += z.norm().ln();
            phase += z.arg();
        }
        Self::new(log_mag, phase)
    }

    pub fn log_mag(self) -> f64 {
        self.log_mag
    }

    pub fn phase(self) -> f64 {
        self.phase
    }

    pub fn is_zero(self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    pub fn abs(self) -> f64 {
        self.log_mag.exp()
    }

    /// Linear value. Overflows to infinity when `log_mag > ~709`.
    pub fn to_complex(self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_mag.exp(), self.phase)
    }

    /// Linear value, only when `|log_mag| < 700`.
    pub fn to_complex_checked(self) -> Option<Complex64> {
        if self.is_zero() {
            return Some(Complex64::new(0.0, 0.0));
        }
        (self.log_mag.abs() < 700.0).then(|| self.to_complex())
    }

    pub fn conj(self) -> Self {
        Self::new(self.log_mag, -self.phase)
    }

    pub fn recip(self) -> Self {
        LogComplex {
            log_mag: -self.log_mag,
            phase: wrap_phase(-self.phase),
        }
    }

    pub fn powi(self, n: i32) -> Self {
        if self.is_zero() {
            return if n == 0 { Self::ONE } else { Self::ZERO };
        }
        Self::new(self.log_mag * n as f64, self.phase * n as f64)
    }
}

impl fmt::Debug for LogComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({} + {}i)", self.log_mag, self.phase)
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;
    fn mul(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        LogComplex::new(self.log_mag + rhs.log_mag, self.phase + rhs.phase)
    }
}

impl Div for LogComplex {
    type Output = LogComplex;
    fn div(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() {
            return Self::ZERO;
        }
        LogComplex::new(self.log_mag - rhs.log_mag, self.phase - rhs.phase)
    }
}

impl MulAssign for LogComplex {
    fn mul_assign(&mut self, rhs: LogComplex) {
        *self = *self * rhs;
    }
}

impl DivAssign for LogComplex {
    fn div_assign(&mut self, rhs: LogComplex) {
        *self = *self / rhs;
    }
}

impl Neg for LogComplex {
    type Output = LogComplex;
    fn neg(self) -> LogComplex {
        if self.is_zero() {
            return self;
        }
        LogComplex::new(self.log_mag, self.phase + PI)
    }
}

impl From<Complex64> for LogComplex {
    fn from(z: Complex64) -> Self {
        Self::from_complex(z)
    }
}

/// `ln(n!)`.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `exp(x)` when it is representable without overflow or total underflow.
pub fn linear_view(log_value: f64) -> Option<f64> {
    (log_value.abs() < 700.0).then(|| log_value.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_products() {
        let a = Complex64::new(3.0, -4.0);
        let b = Complex64::new(-0.5, 2.0);
        let p = (LogComplex::from(a) * LogComplex::from(b)).to_complex();
        assert!((p - a * b).norm() < 1e-13);
        let q = (LogComplex::from(a) / LogComplex::from(b)).to_complex();
        assert!((q - a / b).norm() < 1e-13);
        assert!((LogComplex::from(a).recip().to_complex() - 1.0 / a).norm() < 1e-15);
        assert!(((-LogComplex::from(a)).to_complex() + a).norm() < 1e-13);
    }

    #[test]
    fn zero_absorbs() {
        let z = LogComplex::from_complex(Complex64::new(0.0, 0.0));
        assert!(z.is_zero());
        assert!((z * LogComplex::from_real(5.0)).is_zero());
        assert_eq!(z.to_complex(), Complex64::new(0.0, 0.0));
        assert!(LogComplex::product([Complex64::new(1.0, 1.0), Complex64::new(0.0, 0.0)]).is_zero());
    }

    #[test]
    fn huge_products_stay_finite() {
        // 200! is far beyond f64 range.
        let p = LogComplex::product((1..=200).map(|k| Complex64::new(k as f64, 0.0)));
        assert!((p.log_mag() - ln_factorial(200)).abs() < 1e-9);
        assert!(p.to_complex_checked().is_none());
    }

    #[test]
    fn phase_is_wrapped() {
        for p in [-7.0, -PI, 0.0, PI, 3.5, 100.0] {
            let w = wrap_phase(p);
            assert!(w > -PI && w <= PI, "{p} -> {w}");
            assert!(((p - w) / (2.0 * PI)).fract().abs() < 1e-12 || ((p - w) / (2.0 * PI)).fract().abs() > 1.0 - 1e-12);
        }
        assert_eq!(wrap_phase(-PI), PI);
    }
}
