//! Laplace transforms `L_F μ(z) = ∫ F(zζ) dμ(ζ)` of atomic measures and of
//! densities `χ(e^{iθ}) dθ` on the unit circle, interpolation of `L_F μ` via
//! integrated Lagrange weights, and the `Λ(Q_m, μ)` functional.
//!
//! Circle densities live in Fourier space: `χ = Σ χ̂(n) e^{inθ}` with either
//! finite support or a generator plus a bound on `Σ_{|n|>N} |χ̂(n)|`.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interpolation::{interpolate, FPolynomial};
use crate::logscale::LogComplex;
use crate::series::{factorial, EntireFunction, HoloFunction};
use crate::table::Table;
use crate::vandermonde::FrequencyTuple;

/// Trapezoid points on the circle; the doubling check uses twice as many.
pub const QUAD_POINTS: usize = 8192;
/// Inflation applied to quadrature estimates of `|μ|(K)` for densities.
pub const TV_GUARD: f64 = 1.005;
/// Largest Fourier index used when truncating a generated density.
pub const FOURIER_CAP: usize = 1 << 16;
/// Tolerance for integrated Lagrange weights of densities.
pub const WEIGHT_TOL: f64 = 1e-10;
/// Below this distance from 1 the roots-of-unity weight uses its power sum.
pub const REMOVABLE_BRANCH: f64 = 1e-8;

type IndexFn = Arc<dyn Fn(i64) -> Complex64 + Send + Sync>;
type TailFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;
type ThetaFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(with = "crate::table::complex_pair")]
    pub loc: Complex64,
    #[serde(with = "crate::table::complex_pair")]
    pub mass: Complex64,
}

#[derive(Clone)]
enum Fourier {
    Finite(BTreeMap<i64, Complex64>),
    Generated { rule: IndexFn, tail: Option<TailFn> },
}

/// `χ(e^{iθ}) dθ` on the unit circle.
#[derive(Clone)]
pub struct CircleDensity {
    label: String,
    fourier: Fourier,
    chi: Option<ThetaFn>,
    chi_minus: Option<ThetaFn>,
}

impl CircleDensity {
    pub fn label(&self) -> &str {
        &self.label
    }

    /// `χ̂(n)`.
    pub fn coeff(&self, n: i64) -> Complex64 {
        match &self.fourier {
            Fourier::Finite(map) => map.get(&n).copied().unwrap_or_default(),
            Fourier::Generated { rule, .. } => rule(n),
        }
    }

    /// Bound on `Σ_{|n|>N} |χ̂(n)|`, when one is available.
    pub fn tail_bound(&self, n: usize) -> Option<f64> {
        match &self.fourier {
            Fourier::Finite(map) => Some(
                map.iter()
                    .filter(|(k, _)| k.unsigned_abs() as usize > n)
                    .fold(0.0, |acc, (_, c)| acc + c.norm()),
            ),
            Fourier::Generated { tail, .. } => tail.as_ref().map(|t| t(n)),
        }
    }

    /// Smallest `N` with tail beyond `N` at most `tol`.
    pub fn truncation(&self, tol: f64) -> Result<usize> {
        match &self.fourier {
            Fourier::Finite(map) => {
                let n = map.keys().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0);
                if n > FOURIER_CAP {
                    return Err(Error::AbsHypothesisViolated(format!(
                        "support reaches |n| = {n}, beyond the cap {FOURIER_CAP}"
                    )));
                }
                Ok(n)
            }
            Fourier::Generated { tail: None, .. } => Err(Error::AbsHypothesisViolated(format!(
                "`{}` has no finite support and no tail bound",
                self.label
            ))),
            Fourier::Generated { tail: Some(t), .. } => (0..=FOURIER_CAP).find(|&n| t(n) <= tol).ok_or_else(|| {
                Error::AbsHypothesisViolated(format!(
                    "tail of `{}` stays above {tol:e} up to |n| = {FOURIER_CAP}",
                    self.label
                ))
            }),
        }
    }

    /// `χ(e^{iθ})`.
    pub fn value(&self, theta: f64) -> Result<Complex64> {
        if let Some(f) = &self.chi {
            return Ok(f(theta));
        }
        let n = self.truncation(1e-16)? as i64;
        Ok((-n..=n)
            .map(|k| self.coeff(k) * Complex64::from_polar(1.0, k as f64 * theta))
            .sum())
    }

    /// `χ^-(e^{iθ}) = Σ_{n>=0} χ̂(-n) e^{-inθ}`.
    pub fn minus_value(&self, theta: f64) -> Result<Complex64> {
        if let Some(f) = &self.chi_minus {
            return Ok(f(theta));
        }
        let n = self.truncation(1e-16)?;
        Ok(self.minus_partial(n + 1, theta))
    }

    /// `χ_m^-(e^{iθ}) = Σ_{n=0}^{m-1} χ̂(-n) e^{-inθ}`.
    pub fn minus_partial(&self, m: usize, theta: f64) -> Complex64 {
        let limit = match &self.fourier {
            Fourier::Finite(map) => m.min(map.keys().map(|k| (-k).max(0) as usize + 1).max().unwrap_or(0)),
            Fourier::Generated { .. } => m,
        };
        (0..limit)
            .map(|n| self.coeff(-(n as i64)) * Complex64::from_polar(1.0, -(n as f64) * theta))
            .sum()
    }

    /// Bound on `‖χ_m^- - χ^-‖_T`.
    pub fn minus_tail(&self, m: usize) -> Option<f64> {
        match &self.fourier {
            Fourier::Finite(map) => Some(
                map.iter()
                    .filter(|(k, _)| **k <= -(m as i64))
                    .fold(0.0, |acc, (_, c)| acc + c.norm()),
            ),
            Fourier::Generated { tail, .. } => tail.as_ref().map(|t| t(m.saturating_sub(1))),
        }
    }
}

#[derive(Clone)]
pub enum MeasureKind {
    Atomic(Vec<Atom>),
    CircleDensity(CircleDensity),
}

/// A complex measure with compact support: finitely many atoms, or a
/// density on the unit circle.
#[derive(Clone)]
pub struct SpectralMeasure {
    pub kind: MeasureKind,
}

impl fmt::Debug for SpectralMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MeasureKind::Atomic(atoms) => f.debug_tuple("Atomic").field(atoms).finish(),
            MeasureKind::CircleDensity(d) => f.debug_tuple("CircleDensity").field(&d.label).finish(),
        }
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum MeasureSpec {
    Atomic { atoms: Vec<Atom> },
    Fourier { coeffs: BTreeMap<String, [f64; 2]> },
    ChiR { r: f64 },
}

impl SpectralMeasure {
    pub fn atomic(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::domain("atomic measure needs at least one atom"));
        }
        for (i, a) in atoms.iter().enumerate() {
            let finite = [a.loc.re, a.loc.im, a.mass.re, a.mass.im].iter().all(|x| x.is_finite());
            if !finite {
                return Err(Error::domain("atom locations and masses must be finite"));
            }
            if atoms[..i].iter().any(|b| b.loc == a.loc) {
                return Err(Error::domain(format!("duplicate atom at {}", a.loc)));
            }
        }
        Ok(SpectralMeasure {
            kind: MeasureKind::Atomic(atoms),
        })
    }

    /// Unit point mass at `loc`.
    pub fn dirac(loc: Complex64) -> Self {
        Self::atomic(vec![Atom {
            loc,
            mass: Complex64::new(1.0, 0.0),
        }])
        .expect("finite location")
    }

    /// Density with finitely many Fourier coefficients.
    pub fn fourier(label: impl Into<String>, coeffs: BTreeMap<i64, Complex64>) -> Result<Self> {
        if coeffs.values().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::domain("Fourier coefficients must be finite"));
        }
        let coeffs = coeffs.into_iter().filter(|(_, c)| c.norm() != 0.0).collect();
        Ok(Self::density(CircleDensity {
            label: label.into(),
            fourier: Fourier::Finite(coeffs),
            chi: None,
            chi_minus: None,
        }))
    }

    /// Density with generated coefficients; `tail(N)` must bound
    /// `Σ_{|n|>N} |χ̂(n)|`. Without a tail bound the absolute-summability
    /// hypothesis cannot be checked and operations that need it fail.
    pub fn from_generator<R>(label: impl Into<String>, rule: R, tail: Option<TailFn>) -> Self
    where
        R: Fn(i64) -> Complex64 + Send + Sync + 'static,
    {
        Self::density(CircleDensity {
            label: label.into(),
            fourier: Fourier::Generated {
                rule: Arc::new(rule),
                tail,
            },
            chi: None,
            chi_minus: None,
        })
    }

    /// Attaches closed forms for `χ(e^{iθ})` and `χ^-(e^{iθ})`.
    pub fn with_closed_forms(mut self, chi: ThetaFn, chi_minus: ThetaFn) -> Self {
        if let MeasureKind::CircleDensity(d) = &mut self.kind {
            d.chi = Some(chi);
            d.chi_minus = Some(chi_minus);
        }
        self
    }

    fn density(d: CircleDensity) -> Self {
        SpectralMeasure {
            kind: MeasureKind::CircleDensity(d),
        }
    }

    /// `χ(e^{iθ}) = cos θ`.
    pub fn cosine() -> Self {
        Self::fourier(
            "cos",
            BTreeMap::from([(-1, Complex64::new(0.5, 0.0)), (1, Complex64::new(0.5, 0.0))]),
        )
        .expect("finite coefficients")
    }

    /// `χ_r = 1 + Σ_n r^{|n|} e^{inθ} = 2 Re 1/(1 - r e^{iθ})`, `0 <= r < 1`.
    pub fn chi_r(r: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::domain(format!("chi_r needs 0 <= r < 1, got {r}")));
        }
        let rule = move |n: i64| Complex64::new(if n == 0 { 2.0 } else { r.powi(n.unsigned_abs() as i32) }, 0.0);
        let tail: TailFn = Arc::new(move |n| 2.0 * r.powi(n as i32 + 1) / (1.0 - r));
        let chi: ThetaFn = Arc::new(move |t| Complex64::new(chi_r_value(r, t), 0.0));
        let minus: ThetaFn = Arc::new(move |t| chi_r_minus(r, t));
        Ok(Self::from_generator(format!("chi_r:{r}"), rule, Some(tail)).with_closed_forms(chi, minus))
    }

    pub fn from_json(json: &str) -> Result<Self> {
        match serde_json::from_str::<MeasureSpec>(json)? {
            MeasureSpec::Atomic { atoms } => Self::atomic(atoms),
            MeasureSpec::Fourier { coeffs } => {
                let mut map = BTreeMap::new();
                for (k, [re, im]) in coeffs {
                    let n: i64 = k
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("Fourier index `{k}` is not an integer")))?;
                    map.insert(n, Complex64::new(re, im));
                }
                Self::fourier("fourier", map)
            }
            MeasureSpec::ChiR { r } => Self::chi_r(r),
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            MeasureKind::Atomic(atoms) => format!("atomic[{}]", atoms.len()),
            MeasureKind::CircleDensity(d) => d.label.clone(),
        }
    }

    pub fn atoms(&self) -> Option<&[Atom]> {
        match &self.kind {
            MeasureKind::Atomic(a) => Some(a),
            MeasureKind::CircleDensity(_) => None,
        }
    }

    pub fn density_part(&self) -> Option<&CircleDensity> {
        match &self.kind {
            MeasureKind::Atomic(_) => None,
            MeasureKind::CircleDensity(d) => Some(d),
        }
    }

    /// `|μ|(K)`: `Σ |mass|`, or for densities the trapezoid estimate of
    /// `∫ |χ| dθ` inflated by [`TV_GUARD`].
    pub fn total_variation(&self) -> Result<f64> {
        match &self.kind {
            MeasureKind::Atomic(atoms) => Ok(atoms.iter().map(|a| a.mass.norm()).sum()),
            MeasureKind::CircleDensity(d) => {
                let mut s = 0.0;
                for k in 0..QUAD_POINTS {
                    s += d.value(TAU * k as f64 / QUAD_POINTS as f64)?.norm();
                }
                Ok(s * TAU / QUAD_POINTS as f64 * TV_GUARD)
            }
        }
    }

    /// `∫ ζ^n dμ(ζ)`; for densities `2π χ̂(-n)`.
    pub fn moment(&self, n: usize) -> Complex64 {
        match &self.kind {
            MeasureKind::Atomic(atoms) => atoms.iter().map(|a| a.mass * a.loc.powu(n as u32)).sum(),
            MeasureKind::CircleDensity(d) => TAU * d.coeff(-(n as i64)),
        }
    }

    /// Largest `|ζ|` on the support.
    pub fn support_radius(&self) -> f64 {
        match &self.kind {
            MeasureKind::Atomic(atoms) => atoms.iter().map(|a| a.loc.norm()).fold(0.0, f64::max),
            MeasureKind::CircleDensity(_) => 1.0,
        }
    }
}

// half-angle forms keep `1 - 2r cos θ + r²` accurate near the peak θ = 0
fn chi_r_value(r: f64, theta: f64) -> f64 {
    let s2 = 2.0 * r * (0.5 * theta).sin().powi(2);
    2.0 * ((1.0 - r) + s2) / ((1.0 - r).powi(2) + 2.0 * s2)
}

fn chi_r_minus(r: f64, theta: f64) -> Complex64 {
    let s2 = 2.0 * r * (0.5 * theta).sin().powi(2);
    1.0 + 1.0 / Complex64::new((1.0 - r) + s2, r * theta.sin())
}

/// Lagrange basis `l_i(Q_m, ζ) = ∏_{j≠i} (ζ - q_j)/(q_i - q_j)`.
#[derive(Debug, Clone)]
pub struct LagrangeSystem {
    nodes: FrequencyTuple,
    inv_denoms: Vec<LogComplex>,
}

impl LagrangeSystem {
    pub fn new(nodes: FrequencyTuple) -> Self {
        let q = nodes.points();
        let inv_denoms = (0..q.len())
            .map(|i| {
                LogComplex::product(q.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, qj)| q[i] - qj)).recip()
            })
            .collect();
        LagrangeSystem { nodes, inv_denoms }
    }

    pub fn nodes(&self) -> &FrequencyTuple {
        &self.nodes
    }

    /// `(l_1(ζ), ..., l_m(ζ))`.
    pub fn weights(&self, zeta: Complex64) -> Vec<Complex64> {
        let q = self.nodes.points();
        if let Some(k) = q.iter().position(|&qk| qk == zeta) {
            let mut e = vec![Complex64::new(0.0, 0.0); q.len()];
            e[k] = Complex64::new(1.0, 0.0);
            return e;
        }
        let diffs: Vec<Complex64> = q.iter().map(|qj| zeta - qj).collect();
        let full = LogComplex::product(diffs.iter().copied());
        diffs
            .iter()
            .zip(&self.inv_denoms)
            .map(|(d, w)| (full / LogComplex::from(*d) * *w).to_complex())
            .collect()
    }
}

/// Closed-form weights for `ζ_j = exp(2πij/m)`:
/// `l_j(ζ) = l_m(ζ/ζ_j)`, `l_m(w) = (w^m - 1)/(m(w - 1))`.
pub fn roots_of_unity_lagrange(m: usize, zeta: Complex64) -> Result<Vec<Complex64>> {
    if m == 0 {
        return Err(Error::domain("m must be positive"));
    }
    let mf = m as f64;
    Ok((1..=m)
        .map(|j| {
            let w = zeta * Complex64::from_polar(1.0, -TAU * j as f64 / mf);
            if (w - 1.0).norm() < REMOVABLE_BRANCH {
                let mut pow = Complex64::new(1.0, 0.0);
                let mut s = Complex64::new(0.0, 0.0);
                for _ in 0..m {
                    s += pow;
                    pow *= w;
                }
                s / mf
            } else {
                (w.powu(m as u32) - 1.0) / (mf * (w - 1.0))
            }
        })
        .collect())
}

fn trapezoid_checked<G>(n: usize, tol: f64, dim: usize, integrand: G) -> Result<Vec<Complex64>>
where
    G: Fn(f64) -> Result<Vec<Complex64>>,
{
    // even indices of the 2n grid give the n-point rule
    let mut coarse = vec![Complex64::new(0.0, 0.0); dim];
    let mut fine_odd = vec![Complex64::new(0.0, 0.0); dim];
    for k in 0..2 * n {
        let v = integrand(PI * k as f64 / n as f64)?;
        let acc = if k % 2 == 0 { &mut coarse } else { &mut fine_odd };
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
    }
    let h = TAU / n as f64;
    let mut out = Vec::with_capacity(dim);
    let mut change: f64 = 0.0;
    for (c, o) in coarse.iter().zip(&fine_odd) {
        let lo = c * h;
        let hi = (c + o) * (h / 2.0);
        change = change.max((hi - lo).norm());
        out.push(hi);
    }
    if change > tol {
        return Err(Error::QuadratureNonConvergent { change, tol });
    }
    Ok(out)
}

/// `L_F μ(z)`.
pub fn laplace_transform(mu: &SpectralMeasure, func: &EntireFunction, z: Complex64, tol: f64) -> Result<Complex64> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    match &mu.kind {
        MeasureKind::Atomic(atoms) => {
            let k = atoms.len() as f64;
            let mut s = Complex64::new(0.0, 0.0);
            for a in atoms {
                s += a.mass * func.eval_dilation(a.loc, z, tol / (k * a.mass.norm().max(1.0)))?;
            }
            Ok(s)
        }
        MeasureKind::CircleDensity(d) => {
            let inner = tol / (4.0 * TAU * mu.total_variation()?.max(1.0));
            let v = trapezoid_checked(QUAD_POINTS, tol, 1, |t| {
                let zeta = Complex64::from_polar(1.0, t);
                Ok(vec![func.eval(z * zeta, inner)? * d.value(t)?])
            })?;
            Ok(v[0])
        }
    }
}

/// `L_F μ` as a holomorphic function with Taylor data
/// `g_n = F_n ∫ ζ^n dμ`, evaluated in closed form by [`laplace_transform`].
pub fn laplace_holo(mu: &SpectralMeasure, func: &EntireFunction) -> Result<HoloFunction> {
    let (m1, f1) = (mu.clone(), func.clone());
    let (m2, f2) = (mu.clone(), func.clone());
    // Taylor rule must be infallible; coefficients were band-checked at construction
    let h = HoloFunction::from_taylor(format!("L[{}]", mu.label()), f64::INFINITY, move |n| {
        f1.coeff(n).unwrap_or(Complex64::new(f64::NAN, 0.0)) * m1.moment(n) / factorial(n)
    })?;
    Ok(h.with_evaluator(move |z| laplace_transform(&m2, &f2, z, 1e-13).unwrap_or(Complex64::new(f64::NAN, f64::NAN))))
}

/// `∫ l_i(Q_m, ζ) dμ(ζ)` for every node.
pub fn lagrange_integrals(mu: &SpectralMeasure, nodes: &FrequencyTuple) -> Result<Vec<Complex64>> {
    let sys = LagrangeSystem::new(nodes.clone());
    let m = nodes.m();
    match &mu.kind {
        MeasureKind::Atomic(atoms) => {
            let mut c = vec![Complex64::new(0.0, 0.0); m];
            for a in atoms {
                for (ci, w) in c.iter_mut().zip(sys.weights(a.loc)) {
                    *ci += a.mass * w;
                }
            }
            Ok(c)
        }
        MeasureKind::CircleDensity(d) => {
            let tol = WEIGHT_TOL * mu.total_variation()?.max(1.0);
            trapezoid_checked(QUAD_POINTS, tol, m, |t| {
                let chi = d.value(t)?;
                Ok(sys
                    .weights(Complex64::from_polar(1.0, t))
                    .into_iter()
                    .map(|w| w * chi)
                    .collect())
            })
        }
    }
}

/// `T_{F,Q_m}(L_F μ)` with coefficients `c_i = ∫ l_i(Q_m, ζ) dμ`.
pub fn interpolate_laplace(mu: &SpectralMeasure, func: &EntireFunction, nodes: &FrequencyTuple) -> Result<FPolynomial> {
    FPolynomial::new(nodes.clone(), lagrange_integrals(mu, nodes)?, func.clone())
}

/// The same coefficients through the generic interpolation operator applied
/// to the Taylor data of `L_F μ`.
pub fn interpolate_laplace_via_taylor(
    mu: &SpectralMeasure,
    func: &EntireFunction,
    nodes: &FrequencyTuple,
) -> Result<FPolynomial> {
    Ok(interpolate(&laplace_holo(mu, func)?, func, nodes)?.poly)
}

/// `Λ(Q_m, μ) = Σ_j |∫ l_j(Q_m, ζ) dμ|`.
pub fn lambda_functional(mu: &SpectralMeasure, nodes: &FrequencyTuple) -> Result<f64> {
    Ok(lagrange_integrals(mu, nodes)?.iter().map(|c| c.norm()).sum())
}

/// `Λ(Q_m, μ)` for the roots of unity of order `m`, using the closed-form
/// weights for atoms and `∫ l_j χ dθ = (2π/m) χ_m^-(ζ_j)` for densities.
pub fn lambda_roots_of_unity(mu: &SpectralMeasure, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("m must be positive"));
    }
    match &mu.kind {
        MeasureKind::Atomic(atoms) => {
            let mut c = vec![Complex64::new(0.0, 0.0); m];
            for a in atoms {
                for (ci, w) in c.iter_mut().zip(roots_of_unity_lagrange(m, a.loc)?) {
                    *ci += a.mass * w;
                }
            }
            Ok(c.iter().map(|x| x.norm()).sum())
        }
        MeasureKind::CircleDensity(d) => {
            d.truncation(f64::INFINITY)?;
            let mf = m as f64;
            Ok((1..=m)
                .map(|j| (TAU / mf) * d.minus_partial(m, TAU * j as f64 / mf).norm())
                .sum())
        }
    }
}

/// `∫_0^{2π} |χ^-(e^{iθ})| dθ` by the trapezoid rule with a doubling check.
/// Returns the estimate and the doubling change.
pub fn minus_l1_norm(d: &CircleDensity) -> Result<(f64, f64)> {
    let mut coarse = 0.0;
    let mut odd = 0.0;
    for k in 0..2 * QUAD_POINTS {
        let v = d.minus_value(PI * k as f64 / QUAD_POINTS as f64)?.norm();
        if k % 2 == 0 {
            coarse += v;
        } else {
            odd += v;
        }
    }
    let h = TAU / QUAD_POINTS as f64;
    let lo = coarse * h;
    let hi = (coarse + odd) * h / 2.0;
    Ok((hi, (hi - lo).abs()))
}

/// Per `m`: `Λ(Q_m, χ)` on roots of unity, the limit `∫|χ^-|`, their
/// distance, and the partial-sum correction bound `2π ‖χ_m^- - χ^-‖_T`.
pub fn lambda_limit_abs(chi: &SpectralMeasure, m_list: &[usize]) -> Result<Table> {
    let d = chi
        .density_part()
        .ok_or_else(|| Error::domain("lambda_limit_abs needs a circle density"))?;
    d.truncation(1e-16)?;
    let (limit, change) = minus_l1_norm(d)?;
    let mut t = Table::new(&[
        "m",
        "lambda",
        "limit",
        "abs_diff",
        "partial_sum_bound",
        "limit_quad_change",
    ]);
    for &m in m_list {
        let lambda = lambda_roots_of_unity(chi, m)?;
        t.push(vec![
            m.into(),
            lambda.into(),
            limit.into(),
            (lambda - limit).abs().into(),
            d.minus_tail(m).map(|b| TAU * b).into(),
            change.into(),
        ]);
    }
    Ok(t)
}

/// Result of [`chi_r_family`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiR {
    pub r: f64,
    pub m: usize,
    pub lambda: f64,
    pub l1_chi: f64,
    pub l1_chi_minus: f64,
    /// Adaptive quadrature hit its depth limit somewhere.
    pub flagged: bool,
}

const SIMPSON_TOL: f64 = 1e-11;
const SIMPSON_DEPTH: u32 = 48;

fn adaptive_simpson<G: Fn(f64) -> f64>(f: &G, a: f64, b: f64, tol: f64) -> (f64, bool) {
    #[allow(clippy::too_many_arguments)]
    fn rec<G: Fn(f64) -> f64>(
        f: &G,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> (f64, bool) {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        // below roundoff further halving of tol cannot succeed
        let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        if diff.abs() <= 15.0 * tol.max(floor) {
            return (left + right + diff / 15.0, false);
        }
        if depth == 0 {
            return (left + right + diff / 15.0, true);
        }
        let (l, fl) = rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1);
        let (r, fr) = rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
        (l + r, fl || fr)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, SIMPSON_DEPTH)
}

/// `∫_{-π}^{π} g`, split at the peak `θ = 0`.
fn peaked_integral<G: Fn(f64) -> f64>(g: G) -> (f64, bool) {
    let (l, fl) = adaptive_simpson(&g, -PI, 0.0, SIMPSON_TOL);
    let (r, fr) = adaptive_simpson(&g, 0.0, PI, SIMPSON_TOL);
    (l + r, fl || fr)
}

/// `Λ(Q_m, χ_r)` from the closed-form partial sums
/// `χ_{r,m}^-(ζ) = 1 + (1 - w^m)/(1 - w)`, `w = r ζ̄`, together with
/// `∫|χ_r|` and `∫|χ_r^-|`.
pub fn chi_r_family(r: f64, m: usize) -> Result<ChiR> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::domain(format!("chi_r needs 0 <= r < 1, got {r}")));
    }
    if m == 0 {
        return Err(Error::domain("m must be positive"));
    }
    let mf = m as f64;
    let lambda = (1..=m)
        .map(|j| {
            let w = Complex64::from_polar(r, -TAU * j as f64 / mf);
            let partial = if r == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                (1.0 - w.powu(m as u32)) / (1.0 - w)
            };
            (TAU / mf) * (1.0 + partial).norm()
        })
        .sum();
    let (l1_chi, f1) = peaked_integral(|t| chi_r_value(r, t).abs());
    let (l1_chi_minus, f2) = peaked_integral(|t| chi_r_minus(r, t).norm());
    Ok(ChiR {
        r,
        m,
        lambda,
        l1_chi,
        l1_chi_minus,
        flagged: f1 || f2,
    })
}

/// `Λ(Q_m, δ_{-1})` for roots of unity (`Q_m`) and roots of `-1` (`Q'_m`),
/// with the closed form `(2/m) Σ_j 1/|ζ_j + 1|` for odd `m`.
pub fn dirac_example_table(m_list: &[usize]) -> Result<Table> {
    let mu = SpectralMeasure::dirac(Complex64::new(-1.0, 0.0));
    let mut t = Table::new(&[
        "m",
        "lambda_roots_of_unity",
        "lambda_roots_of_minus_one",
        "odd_closed_form",
    ]);
    for &m in m_list {
        let q = lambda_roots_of_unity(&mu, m)?;
        let qp = lambda_functional(&mu, &FrequencyTuple::roots_of_minus_one(m)?)?;
        let closed = (m % 2 == 1).then(|| odd_dirac_lambda(m));
        t.push(vec![m.into(), q.into(), qp.into(), closed.into()]);
    }
    Ok(t)
}

/// `(2/m) Σ_j 1/|ζ_j + 1|` over the roots of unity of odd order `m`.
pub fn odd_dirac_lambda(m: usize) -> f64 {
    let mf = m as f64;
    (1..=m)
        .map(|j| 1.0 / (Complex64::from_polar(1.0, TAU * j as f64 / mf) + 1.0).norm())
        .sum::<f64>()
        * 2.0
        / mf
}

/// Random atomic measure on the unit circle with `|μ| = 1`.
pub fn random_circle_measure(rng: &mut ChaCha8Rng, atoms: usize) -> Result<SpectralMeasure> {
    let mut list: Vec<Atom> = (0..atoms)
        .map(|_| Atom {
            loc: Complex64::from_polar(1.0, rng.gen::<f64>() * TAU),
            mass: Complex64::from_polar(rng.gen::<f64>() + 1e-3, rng.gen::<f64>() * TAU),
        })
        .collect();
    let total: f64 = list.iter().map(|a| a.mass.norm()).sum();
    for a in &mut list {
        a.mass /= total;
    }
    SpectralMeasure::atomic(list)
}

/// Boundedness check on roots-of-unity nodes: per trial, `‖T(L_F μ)‖_∞`
/// for a random unit-mass atomic measure and the distance between the
/// Lagrange and Taylor-data coefficient paths.
pub fn fekete_bound_experiment(func: &EntireFunction, m_list: &[usize], trials: usize, seed: u64) -> Result<Table> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Table::new(&["m", "trial", "atoms", "total_variation", "norm_inf", "two_path_diff"]);
    for &m in m_list {
        let nodes = FrequencyTuple::roots_of_unity(m, 1.0)?;
        for trial in 0..trials {
            let atoms = rng.gen_range(1..=8);
            let mu = random_circle_measure(&mut rng, atoms)?;
            let direct = interpolate_laplace(&mu, func, &nodes)?;
            let via = interpolate_laplace_via_taylor(&mu, func, &nodes)?;
            let diff = direct
                .coeffs()
                .iter()
                .zip(via.coeffs())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            t.push(vec![
                m.into(),
                trial.into(),
                atoms.into(),
                mu.total_variation()?.into(),
                direct.norm_inf().into(),
                diff.into(),
            ]);
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dirac_transforms() {
        let f = EntireFunction::exp();
        let z = c(0.3, -0.7);
        let one = laplace_transform(&SpectralMeasure::dirac(c(1.0, 0.0)), &f, z, 1e-14).unwrap();
        assert!((one - z.exp()).norm() < 1e-14);
        let alt = EntireFunction::alternating();
        let minus = laplace_transform(&SpectralMeasure::dirac(c(-1.0, 0.0)), &alt, z, 1e-14).unwrap();
        assert!((minus - alt.eval(-z, 1e-15).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn constant_density_transform_is_two_pi() {
        let mu = SpectralMeasure::fourier("one", BTreeMap::from([(0, c(1.0, 0.0))])).unwrap();
        let v = laplace_transform(&mu, &EntireFunction::exp(), c(0.8, 0.4), 1e-10).unwrap();
        assert!((v - TAU).norm() < 1e-10);
        assert!((mu.total_variation().unwrap() - TAU * TV_GUARD).abs() < 1e-10);
    }

    #[test]
    fn lagrange_delta_and_partition() {
        let nodes = FrequencyTuple::new(vec![c(1.0, 0.0), c(-0.5, 0.3), c(0.2, -0.9), c(0.0, 0.5)]).unwrap();
        let sys = LagrangeSystem::new(nodes.clone());
        for (j, q) in nodes.points().iter().enumerate() {
            let w = sys.weights(*q);
            for (i, x) in w.iter().enumerate() {
                assert!((x - if i == j { 1.0 } else { 0.0 }).norm() < 1e-12);
            }
        }
        let w = sys.weights(c(0.37, 0.11));
        assert!((w.iter().sum::<Complex64>() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn roots_of_unity_weights() {
        let w = roots_of_unity_lagrange(2, c(-1.0, 0.0)).unwrap();
        assert!((w[0] - 1.0).norm() < 1e-15 && w[1].norm() < 1e-15);
        let w = roots_of_unity_lagrange(5, Complex64::from_polar(1.0, TAU * 2.0 / 5.0)).unwrap();
        assert!((w[1] - 1.0).norm() < 1e-12);
        assert!(w.iter().enumerate().all(|(i, x)| i == 1 || x.norm() < 1e-12));
    }

    #[test]
    fn dirac_at_a_node_gives_unit_vector() {
        let nodes = FrequencyTuple::new(vec![c(0.5, 0.5), c(-1.0, 0.0), c(0.0, -1.0)]).unwrap();
        let p = interpolate_laplace(&SpectralMeasure::dirac(c(0.5, 0.5)), &EntireFunction::exp(), &nodes).unwrap();
        assert_eq!(p.coeffs(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn small_lambda_examples() {
        let mu = SpectralMeasure::dirac(c(-1.0, 0.0));
        assert!((lambda_roots_of_unity(&mu, 4).unwrap() - 1.0).abs() < 1e-12);
        assert!((lambda_functional(&mu, &FrequencyTuple::roots_of_minus_one(3).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        let two = lambda_functional(&mu, &FrequencyTuple::roots_of_minus_one(2).unwrap()).unwrap();
        assert!((two - 2f64.sqrt()).abs() < 1e-12);
        for m in [3, 7, 11] {
            assert!((lambda_roots_of_unity(&mu, m).unwrap() - odd_dirac_lambda(m)).abs() < 1e-10);
        }
    }

    #[test]
    fn density_lambda_trivial_cases() {
        let one = SpectralMeasure::fourier("one", BTreeMap::from([(0, c(1.0, 0.0))])).unwrap();
        let plus5 = SpectralMeasure::fourier("p5", BTreeMap::from([(5, c(1.0, 0.0))])).unwrap();
        for m in [1, 2, 7] {
            assert!((lambda_roots_of_unity(&one, m).unwrap() - TAU).abs() < 1e-12);
            assert_eq!(lambda_roots_of_unity(&plus5, m).unwrap(), 0.0);
        }
        // generic path agrees with the Fourier identity
        let nodes = FrequencyTuple::roots_of_unity(6, 1.0).unwrap();
        let cos = SpectralMeasure::cosine();
        let a = lambda_functional(&cos, &nodes).unwrap();
        let b = lambda_roots_of_unity(&cos, 6).unwrap();
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn json_forms() {
        let a = SpectralMeasure::from_json(r#"{"kind":"atomic","atoms":[{"loc":[-1,0],"mass":[1,0]}]}"#).unwrap();
        assert_eq!(a.atoms().unwrap()[0].loc, c(-1.0, 0.0));
        let f = SpectralMeasure::from_json(r#"{"kind":"fourier","coeffs":{"-1":[0.5,0],"1":[0.5,0]}}"#).unwrap();
        assert!((f.density_part().unwrap().value(0.3).unwrap() - 0.3f64.cos()).norm() < 1e-15);
        assert!(SpectralMeasure::from_json(r#"{"kind":"fourier","coeffs":{"x":[1,0]}}"#).is_err());
        assert!(SpectralMeasure::from_json(r#"{"kind":"atomic","atoms":[]}"#).is_err());
        let dup = r#"{"kind":"atomic","atoms":[{"loc":[1,0],"mass":[1,0]},{"loc":[1,0],"mass":[2,0]}]}"#;
        assert!(SpectralMeasure::from_json(dup).is_err());
    }

    #[test]
    fn generator_without_tail_is_rejected() {
        let mu = SpectralMeasure::from_generator("g", |n| c(1.0 / (1.0 + (n * n) as f64), 0.0), None);
        assert!(matches!(
            lambda_limit_abs(&mu, &[4]),
            Err(Error::AbsHypothesisViolated(_))
        ));
    }

    #[test]
    fn chi_r_degenerate() {
        let z = chi_r_family(0.0, 5).unwrap();
        assert!((z.lambda - 2.0 * TAU).abs() < 1e-12);
        assert!((z.l1_chi - 2.0 * TAU).abs() < 1e-9);
        assert!((z.l1_chi_minus - 2.0 * TAU).abs() < 1e-9);
    }

    #[test]
    fn chi_r_closed_forms_match_series() {
        let mu = SpectralMeasure::chi_r(0.6).unwrap();
        let d = mu.density_part().unwrap();
        let series = SpectralMeasure::from_generator(
            "s",
            |n| {
                c(
                    if n == 0 {
                        2.0
                    } else {
                        0.6f64.powi(n.unsigned_abs() as i32)
                    },
                    0.0,
                )
            },
            Some(Arc::new(|n| 2.0 * 0.6f64.powi(n as i32 + 1) / 0.4)),
        );
        let s = series.density_part().unwrap();
        for t in [0.0, 0.4, 2.0, -1.3] {
            assert!((d.value(t).unwrap() - s.value(t).unwrap()).norm() < 1e-12);
            assert!((d.minus_value(t).unwrap() - s.minus_value(t).unwrap()).norm() < 1e-12);
        }
        let fam = chi_r_family(0.6, 9).unwrap();
        assert!((fam.lambda - lambda_roots_of_unity(&mu, 9).unwrap()).abs() < 1e-12);
    }
}
