//! Entire functions given by their derivatives at the origin, and
//! holomorphic test functions with known Taylor data.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative slack applied to the `1 <= |F_n| <= Γ` band check.
const BAND_SLACK: f64 = 1e-12;
const MAX_TERMS: usize = 100_000;

type CoeffRule = Arc<dyn Fn(usize) -> Complex64 + Send + Sync>;
type Evaluator = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum CoeffSource {
    Exp,
    Alternating,
    /// Supplied coefficients repeated with period `len`.
    Periodic(Arc<[Complex64]>),
    Rule(CoeffRule),
}

/// An entire function `F` described by `F_n = F^(n)(0)`.
///
/// Coefficients are produced on demand; every access checks the band
/// `1 <= |F_n| <= Γ` and reports [`Error::BoundViolation`] otherwise.
#[derive(Clone)]
pub struct EntireFunction {
    label: String,
    gamma: f64,
    source: CoeffSource,
}

impl fmt::Debug for EntireFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EntireFunction")
            .field("label", &self.label)
            .field("gamma", &self.gamma)
            .finish()
    }
}

impl EntireFunction {
    /// `F = exp`, all `F_n = 1`, `Γ = 1`.
    pub fn exp() -> Self {
        EntireFunction {
            label: "exp".into(),
            gamma: 1.0,
            source: CoeffSource::Exp,
        }
    }

    /// `F(z) = e^{-z}`, `F_n = (-1)^n`.
    pub fn alternating() -> Self {
        EntireFunction {
            label: "alt".into(),
            gamma: 1.0,
            source: CoeffSource::Alternating,
        }
    }

    /// `F_n = e^{i θ_n}` for a phase rule `θ_n`; `Γ = 1`.
    pub fn oscillating<P>(label: impl Into<String>, phase: P) -> Self
    where
        P: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        EntireFunction {
            label: label.into(),
            gamma: 1.0,
            source: CoeffSource::Rule(Arc::new(move |n| Complex64::from_polar(1.0, phase(n)))),
        }
    }

    /// Custom coefficient rule with a declared bound `Γ`.
    pub fn from_rule<R>(label: impl Into<String>, gamma: f64, rule: R) -> Result<Self>
    where
        R: Fn(usize) -> Complex64 + Send + Sync + 'static,
    {
        if !(gamma >= 1.0 && gamma.is_finite()) {
            return Err(Error::domain(format!("Γ must be finite and >= 1, got {gamma}")));
        }
        let f = EntireFunction {
            label: label.into(),
            gamma,
            source: CoeffSource::Rule(Arc::new(rule)),
        };
        f.coeff(0)?;
        Ok(f)
    }

    /// Finitely many supplied coefficients, extended periodically.
    /// `Γ` is the largest supplied modulus.
    pub fn from_periodic(label: impl Into<String>, coeffs: Vec<Complex64>) -> Result<Self> {
        let label = label.into();
        if coeffs.is_empty() {
            return Err(Error::domain("custom coefficient list is empty"));
        }
        let gamma = coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
        let f = EntireFunction {
            label,
            gamma,
            source: CoeffSource::Periodic(coeffs.into()),
        };
        for n in 0..f.period().unwrap_or(1) {
            f.coeff(n)?;
        }
        Ok(f)
    }

    /// Loads coefficients from a JSON array of `[re, im]` pairs.
    pub fn from_json(label: impl Into<String>, json: &str) -> Result<Self> {
        let pairs: Vec<[f64; 2]> = serde_json::from_str(json)?;
        Self::from_periodic(
            label,
            pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
        )
    }

    /// Built-in registry: `exp`, `alt`, `osc` (phase `n²`) and `osc:<a>`
    /// (phase `a·n²`).
    pub fn from_label(label: &str) -> Result<Self> {
        match label {
            "exp" => Ok(Self::exp()),
            "alt" => Ok(Self::alternating()),
            "osc" => Ok(Self::oscillating("osc", |n| (n * n) as f64)),
            _ => {
                if let Some(rest) = label.strip_prefix("osc:") {
                    let a: f64 = rest
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad osc parameter `{rest}`")))?;
                    let lbl = label.to_string();
                    return Ok(Self::oscillating(lbl, move |n| a * (n * n) as f64));
                }
                Err(Error::Parse(format!("unknown entire function `{label}`")))
            }
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn period(&self) -> Option<usize> {
        match &self.source {
            CoeffSource::Periodic(c) => Some(c.len()),
            _ => None,
        }
    }

    fn raw_coeff(&self, n: usize) -> Complex64 {
        match &self.source {
            CoeffSource::Exp => Complex64::new(1.0, 0.0),
            CoeffSource::Alternating => Complex64::new(if n.is_multiple_of(2) { 1.0 } else { -1.0 }, 0.0),
            CoeffSource::Periodic(c) => c[n % c.len()],
            CoeffSource::Rule(r) => r(n),
        }
    }

    /// `F_n`, checked against the band `[1, Γ]`.
    pub fn coeff(&self, n: usize) -> Result<Complex64> {
        let c = self.raw_coeff(n);
        let modulus = c.norm();
        if !(modulus >= 1.0 - BAND_SLACK && modulus <= self.gamma * (1.0 + BAND_SLACK)) {
            return Err(Error::BoundViolation {
                label: self.label.clone(),
                index: n,
                modulus,
                gamma: self.gamma,
            });
        }
        Ok(c)
    }

    /// Truncated Taylor evaluation `Σ_{n<=N} F_n z^n / n!`.
    ///
    /// `N` is the first index with `N + 2 > |z|` and
    /// `Γ |z|^{N+1} / ((N+1)! (1 - |z|/(N+2))) < tol`, which bounds the
    /// neglected tail by a geometric majorant.
    pub fn eval(&self, z: Complex64, tol: f64) -> Result<Complex64> {
        if !(tol > 0.0) {
            return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
        }
        let r = z.norm();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0); // z^n / n!
        let mut next_mag = 1.0; // |z|^{n+1} / (n+1)!, updated below
        for n in 0..MAX_TERMS {
            sum += self.coeff(n)? * term;
            next_mag *= r / (n + 1) as f64;
            let ratio = r / (n + 2) as f64;
            if ratio < 1.0 && self.gamma * next_mag / (1.0 - ratio) < tol {
                return Ok(sum);
            }
            term *= z / (n + 1) as f64;
        }
        Err(Error::NonConvergent(format!(
            "Taylor series of `{}` at |z| = {r} needs more than {MAX_TERMS} terms",
            self.label
        )))
    }

    /// `F(q z)`.
    pub fn eval_dilation(&self, q: Complex64, z: Complex64, tol: f64) -> Result<Complex64> {
        self.eval(q * z, tol)
    }

    /// Coefficient-wise sum `F_n + G_n`, labelled `a+b`. The bound of the
    /// result is `Γ_F + Γ_G`; the lower bound must still hold per index.
    pub fn coefficient_sum(&self, other: &EntireFunction) -> Result<EntireFunction> {
        let a = self.clone();
        let b = other.clone();
        Self::from_rule(
            format!("{}+{}", self.label, other.label),
            self.gamma + other.gamma,
            move |n| a.raw_coeff(n) + b.raw_coeff(n),
        )
    }
}

/// A holomorphic function on the disk `D_R`, described by its Taylor
/// coefficients `a_n = g^(n)(0) / n!` and optionally a closed form.
#[derive(Clone)]
pub struct HoloFunction {
    label: String,
    radius: f64,
    taylor: CoeffRule,
    evaluator: Option<Evaluator>,
}

impl fmt::Debug for HoloFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HoloFunction")
            .field("label", &self.label)
            .field("radius", &self.radius)
            .finish()
    }
}

impl HoloFunction {
    pub fn from_taylor<T>(label: impl Into<String>, radius: f64, taylor: T) -> Result<Self>
    where
        T: Fn(usize) -> Complex64 + Send + Sync + 'static,
    {
        if !(radius > 0.0) {
            return Err(Error::domain(format!("radius must be positive, got {radius}")));
        }
        Ok(HoloFunction {
            label: label.into(),
            radius,
            taylor: Arc::new(taylor),
            evaluator: None,
        })
    }

    /// Attaches a closed-form evaluation rule.
    pub fn with_evaluator<E>(mut self, eval: E) -> Self
    where
        E: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        self.evaluator = Some(Arc::new(eval));
        self
    }

    /// From derivatives `g_n = g^(n)(0)` rather than Taylor coefficients.
    pub fn from_derivatives<D>(label: impl Into<String>, radius: f64, derivs: D) -> Result<Self>
    where
        D: Fn(usize) -> Complex64 + Send + Sync + 'static,
    {
        Self::from_taylor(label, radius, move |n| derivs(n) / factorial(n))
    }

    /// `1 / (1 - z/R)`, holomorphic in `D_R`.
    pub fn geometric(radius: f64) -> Result<Self> {
        let inv = 1.0 / radius;
        Ok(Self::from_taylor(format!("geometric:{radius}"), radius, move |n| {
            Complex64::new(inv.powi(n as i32), 0.0)
        })?
        .with_evaluator(move |z| 1.0 / (1.0 - z * inv)))
    }

    /// `e^{λ z}`, entire.
    pub fn exponential(lambda: Complex64) -> Self {
        Self::from_taylor(format!("exp:{lambda}"), f64::INFINITY, move |n| {
            lambda.powu(n as u32) / factorial(n)
        })
        .expect("infinite radius is valid")
        .with_evaluator(move |z| (lambda * z).exp())
    }

    /// `Σ a_n z^n` with the given Taylor coefficients.
    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        let c: Arc<[Complex64]> = coeffs.into();
        let c2 = c.clone();
        Self::from_taylor("poly", f64::INFINITY, move |n| c.get(n).copied().unwrap_or_default())
            .expect("infinite radius is valid")
            .with_evaluator(move |z| c2.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a))
    }

    /// `z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); k + 1];
        c[k] = Complex64::new(1.0, 0.0);
        let mut p = Self::polynomial(c);
        p.label = format!("z^{k}");
        p
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn has_evaluator(&self) -> bool {
        self.evaluator.is_some()
    }

    /// `a_n = g^(n)(0) / n!`.
    pub fn taylor_coeff(&self, n: usize) -> Complex64 {
        (self.taylor)(n)
    }

    /// `g_n = g^(n)(0)`.
    pub fn derivative(&self, n: usize) -> Complex64 {
        self.taylor_coeff(n) * factorial(n)
    }

    /// Evaluates by the closed form if present, else by summing the series.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if let Some(e) = &self.evaluator {
            return Ok(e(z));
        }
        self.eval_series(z)
    }

    /// Partial Taylor sum until four consecutive terms are negligible.
    pub fn eval_series(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() >= self.radius {
            return Err(Error::domain(format!(
                "|z| = {} outside the disk of radius {}",
                z.norm(),
                self.radius
            )));
        }
        let mut sum = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        let mut small = 0;
        for n in 0..MAX_TERMS {
            let t = self.taylor_coeff(n) * pow;
            sum += t;
            if t.norm() <= 1e-17 * sum.norm() || t.norm() == 0.0 && n > 64 {
                small += 1;
                if small >= 4 && n >= 8 {
                    return Ok(sum);
                }
            } else {
                small = 0;
            }
            pow *= z;
        }
        Err(Error::NonConvergent(format!("series of `{}` at {z}", self.label)))
    }
}

/// `n!` as `f64` (infinite beyond 170).
pub fn factorial(n: usize) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}
