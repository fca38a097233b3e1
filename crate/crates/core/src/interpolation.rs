//! The interpolation operator `T_{F,q}`, F-polynomials, the pointwise error
//! bound and the brackets on `t(q)` and `ε(q)`.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::logscale::{linear_view, ln_factorial, LogComplex};
use crate::series::{EntireFunction, HoloFunction};
use crate::table::{fmt_float, json_string};
use crate::vandermonde::{complete_homogeneous_all, schur_ratio, vdm_det, vdm_inverse, FrequencyTuple};

/// Circle samples used for sup norms.
pub const SUP_SAMPLES: usize = 4096;
/// One-sided inflation applied to sampled sup norms.
pub const SUP_INFLATION: f64 = 1.01;

/// `f(z) = Σ_j c_j F(q_j z)`.
#[derive(Debug, Clone)]
pub struct FPolynomial {
    freqs: FrequencyTuple,
    coeffs: Vec<Complex64>,
    func: EntireFunction,
    /// Present when `f = s · Σ_{k>=m-1} F_k h_{k-m+1}(q) z^k / k!`; holds `s`.
    hook_scale: Option<LogComplex>,
}

#[derive(Deserialize)]
struct FPolynomialRecord {
    #[serde(rename = "F")]
    func: String,
    freqs: Vec<[f64; 2]>,
    coeffs: Vec<[f64; 2]>,
}

impl FPolynomial {
    pub fn new(freqs: FrequencyTuple, coeffs: Vec<Complex64>, func: EntireFunction) -> Result<Self> {
        if coeffs.len() != freqs.m() {
            return Err(Error::domain(format!(
                "{} coefficients for {} frequencies",
                coeffs.len(),
                freqs.m()
            )));
        }
        Ok(FPolynomial {
            freqs,
            coeffs,
            func,
            hook_scale: None,
        })
    }

    pub fn freqs(&self) -> &FrequencyTuple {
        &self.freqs
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn func(&self) -> &EntireFunction {
        &self.func
    }

    pub fn m(&self) -> usize {
        self.coeffs.len()
    }

    /// `‖f‖_∞ = max_j |c_j|`.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `‖f‖_1 = Σ_j |c_j|`.
    pub fn norm_1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Order of the zero at the origin that holds by construction
    /// (`m - 1` for the extremal polynomial, otherwise 0).
    pub fn vanishing_order(&self) -> usize {
        if self.hook_scale.is_some() {
            self.m() - 1
        } else {
            0
        }
    }

    /// `Σ_j c_j q_j^l`.
    pub fn power_sum(&self, l: usize) -> Complex64 {
        self.freqs
            .points()
            .iter()
            .zip(&self.coeffs)
            .map(|(q, c)| c * q.powu(l as u32))
            .sum()
    }

    /// `f^(l)(0) = F_l Σ_j c_j q_j^l`.
    pub fn derivative_at_zero(&self, l: usize) -> Result<Complex64> {
        Ok(self.func.coeff(l)? * self.power_sum(l))
    }

    /// Direct evaluation, see [`eval_fpoly`].
    pub fn eval(&self, z: Complex64, tol: f64) -> Result<Complex64> {
        eval_fpoly(self, z, tol)
    }

    /// Taylor coefficients of `f(z) / z^v · v! / s` for `v = m - 1`, up to
    /// the first index where the majorant `Γ (M r)^n / n!` drops below
    /// `1e-17`. Only available for polynomials built by [`extremal_fpoly`].
    pub fn deflated_series(&self, radius: f64) -> Result<Option<Vec<Complex64>>> {
        if self.hook_scale.is_none() {
            return Ok(None);
        }
        let v = self.m() - 1;
        let x = self.freqs.max_modulus() * radius;
        let gamma = self.func.gamma();
        let mut n = 0usize;
        let mut bound = gamma;
        while !(bound < 1e-17 && (n as f64) > x) {
            n += 1;
            bound *= x / n as f64;
            if n > 100_000 {
                return Err(Error::NonConvergent("deflated series too long".into()));
            }
        }
        let h = complete_homogeneous_all(self.freqs.points(), n);
        let mut out = Vec::with_capacity(n + 1);
        let mut ratio = 1.0; // v! / (v+i)!
        for (i, hi) in h.iter().enumerate() {
            if i > 0 {
                ratio /= (v + i) as f64;
            }
            out.push(self.func.coeff(v + i)? * hi * ratio);
        }
        Ok(Some(out))
    }

    /// Evaluation in log scale. Uses the hook expansion when available, which
    /// avoids the cancellation of `Σ c_j F(q_j z)` for tiny `f`.
    pub fn eval_log(&self, z: Complex64, tol: f64) -> Result<LogComplex> {
        match (self.hook_scale, self.deflated_series(z.norm())?) {
            (Some(scale), Some(series)) => {
                let v = self.m() - 1;
                let d = series
                    .iter()
                    .rev()
                    .fold(Complex64::new(0.0, 0.0), |acc, &b| acc * z + b);
                Ok(
                    scale * LogComplex::from(z).powi(v as i32) / LogComplex::new(ln_factorial(v), 0.0)
                        * LogComplex::from(d),
                )
            }
            _ => Ok(LogComplex::from(eval_fpoly(self, z, tol)?)),
        }
    }

    /// `ln ‖f‖_Δ` estimated from [`SUP_SAMPLES`] points of the unit circle,
    /// inflated by [`SUP_INFLATION`].
    pub fn log_sup_norm_disk(&self, tol: f64) -> Result<f64> {
        let mut best = f64::NEG_INFINITY;
        for s in 0..SUP_SAMPLES {
            let z = Complex64::from_polar(1.0, TAU * s as f64 / SUP_SAMPLES as f64);
            best = best.max(self.eval_log(z, tol)?.log_mag());
        }
        Ok(best + SUP_INFLATION.ln())
    }

    /// `{"F": label, "freqs": [[re, im], ...], "coeffs": [[re, im], ...]}`.
    pub fn to_json(&self) -> String {
        let pairs = |zs: &[Complex64]| {
            let mut s = String::from("[");
            for (i, z) in zs.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                let _ = write!(s, "[{}, {}]", fmt_float(z.re), fmt_float(z.im));
            }
            s.push(']');
            s
        };
        format!(
            "{{\"F\": {}, \"coeffs\": {}, \"freqs\": {}}}",
            json_string(self.func.label()),
            pairs(&self.coeffs),
            pairs(self.freqs.points())
        )
    }

    /// Parses the JSON form; `resolve` maps the `F` label to a function.
    pub fn from_json<R>(json: &str, resolve: R) -> Result<Self>
    where
        R: FnOnce(&str) -> Result<EntireFunction>,
    {
        let rec: FPolynomialRecord = serde_json::from_str(json)?;
        let to_c = |v: Vec<[f64; 2]>| v.into_iter().map(|[a, b]| Complex64::new(a, b)).collect::<Vec<_>>();
        let func = resolve(&rec.func)?;
        Self::new(FrequencyTuple::new(to_c(rec.freqs))?, to_c(rec.coeffs), func)
    }
}

/// Output of [`interpolate`].
#[derive(Debug, Clone)]
pub struct Interpolant {
    pub poly: FPolynomial,
    /// Propagated from the inverse Vandermonde matrix.
    pub conditioning_warning: bool,
}

/// `T_{F,q} g`: the F-polynomial with frequencies `q` matching `g` to order
/// `m` at the origin, `c_i = Σ_k v_ik g_{k-1} / F_{k-1}`.
pub fn interpolate(g: &HoloFunction, func: &EntireFunction, q: &FrequencyTuple) -> Result<Interpolant> {
    let m = q.m();
    let inv = vdm_inverse(q)?;
    let rhs: Vec<Complex64> = (0..m)
        .map(|l| Ok(g.derivative(l) / func.coeff(l)?))
        .collect::<Result<_>>()?;
    let coeffs = inv
        .matrix
        .iter()
        .map(|row| row.iter().zip(&rhs).map(|(v, b)| v * b).sum())
        .collect();
    Ok(Interpolant {
        poly: FPolynomial::new(q.clone(), coeffs, func.clone())?,
        conditioning_warning: inv.conditioning_warning,
    })
}

/// `Σ_j c_j F(q_j z)` with the tolerance split across terms.
pub fn eval_fpoly(f: &FPolynomial, z: Complex64, tol: f64) -> Result<Complex64> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let m = f.m() as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for (q, c) in f.freqs.points().iter().zip(&f.coeffs) {
        if c.norm() == 0.0 {
            continue;
        }
        let t = tol / (m * c.norm().max(1.0));
        sum += c * f.func.eval_dilation(*q, z, t)?;
    }
    Ok(sum)
}

/// Longest tail summed by [`eval_interpolant_series`] beyond order `m`.
pub const MAX_SERIES_TAIL: usize = 10_000;

/// `T_{F,q} g(z)` summed as a Taylor series instead of `Σ c_j F(q_j z)`.
///
/// The first `m` coefficients are those of `g`. Beyond that,
/// `Σ_j c_j q_j^n = Σ_p (-1)^{m-1-p} s_{p,n}(q) g_p / F_p` with the hook
/// Schur ratios `s_{p,n} = det A_m^{p,n} / det A_m`, which stay bounded by
/// their term count times `M^{n-p}`. This avoids the cancellation among
/// coefficients of size `(m-1)!/γ(q)`, so the result is accurate to `tol`
/// even when `ε ‖T g‖_1` is not small.
pub fn eval_interpolant_series(
    g: &HoloFunction,
    func: &EntireFunction,
    q: &FrequencyTuple,
    z: Complex64,
    tol: f64,
) -> Result<Complex64> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let m = q.m();
    let head = (0..m)
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, n| acc * z + g.taylor_coeff(n));
    let (az, big_m) = (z.norm(), q.max_modulus());
    if az == 0.0 || big_m == 0.0 {
        return Ok(head);
    }
    let b: Vec<Complex64> = (0..m)
        .map(|p| Ok(g.derivative(p) / func.coeff(p)?))
        .collect::<Result<_>>()?;
    let mut tail = Complex64::new(0.0, 0.0);
    for n in m..=m + MAX_SERIES_TAIL {
        let fn_ = func.coeff(n)?;
        // |s_{p,n}| <= n! / (p! (m-p-1)! (n-m)! (n-p)) M^{n-p}; the n! cancels
        let log_majorant = (0..m)
            .filter(|&p| b[p].norm() > 0.0)
            .map(|p| {
                b[p].norm().ln() + (n - p) as f64 * big_m.ln()
                    - ln_factorial(p)
                    - ln_factorial(m - p - 1)
                    - ln_factorial(n - m)
                    - ((n - p) as f64).ln()
            })
            .fold(f64::NEG_INFINITY, |a, x| a.max(x));
        let majorant = fn_.norm() * (log_majorant + n as f64 * az.ln() + (m as f64).ln()).exp();
        if fn_.norm() > 0.0 && log_majorant > f64::NEG_INFINITY {
            let mut power_sum = Complex64::new(0.0, 0.0);
            for (p, bp) in b.iter().enumerate() {
                let sign = if (m - 1 - p).is_multiple_of(2) { 1.0 } else { -1.0 };
                power_sum += sign * schur_ratio(q, p, n)?.to_complex() * bp;
            }
            tail += (LogComplex::from(fn_ * power_sum) * LogComplex::from(z).powi(n as i32)
                / LogComplex::new(ln_factorial(n), 0.0))
            .to_complex();
        }
        if majorant <= tol * (1.0 + (head + tail).norm()) && (n - m) as f64 > 2.0 * big_m * az {
            return Ok(head + tail);
        }
    }
    Err(Error::NonConvergent(format!(
        "interpolant series did not settle within {MAX_SERIES_TAIL} terms"
    )))
}

/// `γ_i(q) = ∏_{j≠i} |q_i - q_j|` in log scale.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaProfile {
    pub log_gamma: Vec<f64>,
    pub log_gamma_min: f64,
}

impl GammaProfile {
    pub fn gamma(&self, i: usize) -> f64 {
        self.log_gamma[i].exp()
    }

    /// `γ(q) = min_i γ_i(q)`.
    pub fn gamma_min(&self) -> f64 {
        self.log_gamma_min.exp()
    }

    /// `ln ∏_i γ_i(q)`, equal to `2 ln |det A_m(q)|`.
    pub fn log_product(&self) -> f64 {
        self.log_gamma.iter().sum()
    }
}

pub fn gamma_profile(q: &FrequencyTuple) -> GammaProfile {
    let pts = q.points();
    let log_gamma: Vec<f64> = (0..pts.len())
        .map(|i| {
            pts.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, qj)| (pts[i] - qj).norm().ln())
                .sum()
        })
        .collect();
    let log_gamma_min = log_gamma.iter().cloned().fold(f64::INFINITY, f64::min);
    GammaProfile {
        log_gamma,
        log_gamma_min,
    }
}

/// Right-hand side of the pointwise error estimate
/// `(|z|/r)^m (r/(r-|z|) + Γ e^{2Mr}) max_{|w|=r} |g(w)|`, with the maximum
/// taken over [`SUP_SAMPLES`] circle points and inflated by [`SUP_INFLATION`].
pub fn error_bound(g: &HoloFunction, q: &FrequencyTuple, func: &EntireFunction, z: Complex64, r: f64) -> Result<f64> {
    let az = z.norm();
    if !(az < r) {
        return Err(Error::domain(format!("need |z| < r, got |z| = {az}, r = {r}")));
    }
    if !(r < g.radius()) {
        return Err(Error::domain(format!("need r < R, got r = {r}, R = {}", g.radius())));
    }
    if az == 0.0 {
        return Ok(0.0);
    }
    let mut cmax = 0.0f64;
    for s in 0..SUP_SAMPLES {
        let w = Complex64::from_polar(r, TAU * s as f64 / SUP_SAMPLES as f64);
        cmax = cmax.max(g.eval(w)?.norm());
    }
    let c = cmax * SUP_INFLATION;
    let m = q.m() as f64;
    let big_m = q.max_modulus();
    let factor = r / (r - az) + func.gamma() * (2.0 * big_m * r).exp();
    Ok((m * (az / r).ln()).exp() * factor * c)
}

/// The F-polynomial `α det[q^0; ...; q^{m-2}; F(q z)]` with
/// `α = γ(q) / |det A_m(q)|`, normalized so that `‖f‖_∞ = 1`; it vanishes to
/// order `m - 1` at the origin.
///
/// Expanding along the last row, `c_j = (-1)^{m+j} α det A_{m-1}(q^j)`,
/// which simplifies to `c_j = γ(q) e^{i arg det A_m} / ∏_{i≠j} (q_j - q_i)`.
pub fn extremal_fpoly(q: &FrequencyTuple, func: &EntireFunction) -> FPolynomial {
    let pts = q.points();
    let profile = gamma_profile(q);
    let det = vdm_det(q);
    let scale = LogComplex::new(profile.log_gamma_min, det.phase());
    let coeffs = (0..pts.len())
        .map(|j| {
            let denom = LogComplex::product(
                pts.iter()
                    .enumerate()
                    .filter(|&(i, _)| i != j)
                    .map(|(_, qi)| pts[j] - qi),
            );
            (scale / denom).to_complex()
        })
        .collect();
    FPolynomial {
        freqs: q.clone(),
        coeffs,
        func: func.clone(),
        hook_scale: Some(scale),
    }
}

/// Brackets on `t(q)` and `ε(q)`, all in natural-log scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TqBounds {
    pub log_t_lower: f64,
    pub log_t_upper: f64,
    pub log_eps_lower: f64,
    pub log_eps_upper: f64,
}

impl TqBounds {
    pub fn t_lower(&self) -> Option<f64> {
        linear_view(self.log_t_lower)
    }
    pub fn t_upper(&self) -> Option<f64> {
        linear_view(self.log_t_upper)
    }
    pub fn eps_lower(&self) -> Option<f64> {
        linear_view(self.log_eps_lower)
    }
    pub fn eps_upper(&self) -> Option<f64> {
        linear_view(self.log_eps_upper)
    }
}

/// `(m-1)!/(Γγ) <= t(q) <= e^M (m-1)!/γ` and
/// `e^{-M} γ/(m-1)! <= ε(q) <= Γ e^M γ/(m-1)!`.
pub fn tq_bounds(q: &FrequencyTuple, func: &EntireFunction) -> TqBounds {
    let m = q.m();
    let lf = ln_factorial(m - 1);
    let lg = gamma_profile(q).log_gamma_min;
    let big_m = q.max_modulus();
    let lgam = func.gamma().ln();
    TqBounds {
        log_t_lower: lf - lgam - lg,
        log_t_upper: big_m + lf - lg,
        log_eps_lower: -big_m + lg - lf,
        log_eps_upper: lgam + big_m + lg - lf,
    }
}
