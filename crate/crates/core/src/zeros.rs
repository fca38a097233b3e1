//! Argument-principle zero counting on circles and the `N_m` experiment.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::capacity::{chebyshev_bracket, default_grid_n, fekete_search, CompactSetDescriptor, SetKind};
use crate::error::{Error, Result};
use crate::interpolation::{eval_fpoly, extremal_fpoly, FPolynomial};
use crate::series::EntireFunction;
use crate::table::Table;
use crate::vandermonde::FrequencyTuple;

/// Refinement stops with `NonConvergent` beyond this many contour points.
pub const MAX_CONTOUR_POINTS: usize = 1 << 22;
/// A sample with `|f| < NEAR_ZERO_REL · max|f|` counts as a zero on the contour.
pub const NEAR_ZERO_REL: f64 = 1e-8;
pub const NUDGE_FACTOR: f64 = 1.0 + 1e-4;
pub const MAX_NUDGES: usize = 8;
/// Radius used for zeros "in the closed unit disk".
pub const CLOSED_DISK_RADIUS: f64 = 1.0 + 1e-6;
pub const DEFAULT_SAMPLES: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroCount {
    pub count: usize,
    /// Radius of the contour actually used (after any nudging).
    pub radius: f64,
    /// Distance of the raw winding number from the nearest integer.
    pub winding_residual: f64,
}

enum Attempt {
    Done(ZeroCount),
    NearZero,
}

fn wind_once<E>(eval: &E, radius: f64, samples: usize) -> Result<Attempt>
where
    E: Fn(Complex64) -> Result<Complex64>,
{
    let at = |theta: f64| eval(Complex64::from_polar(radius, theta));
    let thetas: Vec<f64> = (0..=samples).map(|k| TAU * k as f64 / samples as f64).collect();
    let mut values = Vec::with_capacity(samples + 1);
    for &t in &thetas[..samples] {
        values.push(at(t)?);
    }
    values.push(values[0]);
    let max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !(max > 0.0) || !max.is_finite() {
        return Ok(Attempt::NearZero);
    }
    let floor = NEAR_ZERO_REL * max;
    if values.iter().any(|v| !(v.norm() >= floor)) {
        return Ok(Attempt::NearZero);
    }
    let mut total = 0.0;
    let mut points = samples;
    for k in 0..samples {
        // adaptive bisection until every phase increment is at most π/2
        let mut stack = vec![(thetas[k], values[k], thetas[k + 1], values[k + 1])];
        while let Some((t0, v0, t1, v1)) = stack.pop() {
            let inc = (v1 / v0).arg();
            if inc.abs() <= PI / 2.0 {
                total += inc;
                continue;
            }
            points += 1;
            if points > MAX_CONTOUR_POINTS {
                return Err(Error::NonConvergent(format!(
                    "winding refinement exceeded {MAX_CONTOUR_POINTS} points at radius {radius}"
                )));
            }
            let tm = 0.5 * (t0 + t1);
            let vm = at(tm)?;
            if !(vm.norm() >= floor) {
                return Ok(Attempt::NearZero);
            }
            stack.push((tm, vm, t1, v1));
            stack.push((t0, v0, tm, vm));
        }
    }
    let raw = total / TAU;
    let nearest = raw.round();
    let residual = (raw - nearest).abs();
    if residual >= 0.25 || nearest < 0.0 {
        return Err(Error::NonConvergent(format!(
            "winding number {raw} is not near a non-negative integer"
        )));
    }
    Ok(Attempt::Done(ZeroCount {
        count: nearest as usize,
        radius,
        winding_residual: residual,
    }))
}

/// Winding number of `eval` around `|z| = radius`, i.e. the number of zeros
/// in the open disk for a holomorphic function. The radius is multiplied by
/// [`NUDGE_FACTOR`] (up to [`MAX_NUDGES`] times) when the contour passes
/// near a zero.
pub fn winding_count<E>(eval: E, radius: f64, samples: usize) -> Result<ZeroCount>
where
    E: Fn(Complex64) -> Result<Complex64>,
{
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::domain(format!("contour radius must be positive, got {radius}")));
    }
    if samples < 8 {
        return Err(Error::domain("need at least 8 contour samples"));
    }
    let mut r = radius;
    for _ in 0..=MAX_NUDGES {
        if let Attempt::Done(c) = wind_once(&eval, r, samples)? {
            return Ok(c);
        }
        r *= NUDGE_FACTOR;
    }
    Err(Error::ContourThroughZero { radius })
}

/// Zeros of an F-polynomial in `|z| < radius`. For polynomials with a
/// structural zero of order `v` at the origin (the extremal polynomial) the
/// count is `v` plus the winding number of the deflated series, which keeps
/// the phase accurate where `f` itself is tiny.
pub fn count_zeros(f: &FPolynomial, radius: f64, samples: usize) -> Result<ZeroCount> {
    let v = f.vanishing_order();
    let reach = radius * NUDGE_FACTOR.powi(MAX_NUDGES as i32 + 1);
    if v > 0 {
        if let Some(series) = f.deflated_series(reach)? {
            let eval = |z: Complex64| {
                Ok(series
                    .iter()
                    .rev()
                    .fold(Complex64::new(0.0, 0.0), |acc, &b| acc * z + b))
            };
            let mut c = winding_count(eval, radius, samples)?;
            c.count += v;
            return Ok(c);
        }
    }
    winding_count(|z| eval_fpoly(f, z, 1e-14), radius, samples)
}

/// Right-hand side of
/// `N_m log((r²+1)/(2r)) <= log Γ + M(r+1) + m log m - (m-1) log τ_{m-1}`,
/// divided through. Requires `r > 1`.
pub fn nm_upper_bound(gamma: f64, big_m: f64, m: usize, log_tau: f64, r: f64) -> Result<f64> {
    if !(r > 1.0) {
        return Err(Error::domain(format!("bound needs r > 1, got {r}")));
    }
    let mf = m as f64;
    let rhs = gamma.ln() + big_m * (r + 1.0) + mf * mf.ln() - (mf - 1.0) * log_tau;
    Ok(rhs / ((r * r + 1.0) / (2.0 * r)).ln())
}

/// For each `m`: zeros in the closed unit disk of the extremal F-polynomial
/// over near-Fekete tuples of `K` (maximum over trials), the upper bound at
/// `r`, and `count/(m log m)`. Circles use rotated roots of unity per trial;
/// other sets reseed the Fekete search. Failed cells are left missing.
pub fn nm_experiment(
    k: &CompactSetDescriptor,
    func: &EntireFunction,
    m_list: &[usize],
    trials: usize,
    seed: u64,
    r: f64,
) -> Result<Table> {
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    if m_list.contains(&0) {
        return Err(Error::domain("m must be positive"));
    }
    let mut table = Table::new(&[
        "m",
        "count",
        "bound_at_r",
        "ratio",
        "min_count",
        "max_residual",
        "failed_trials",
    ]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &m in m_list {
        let log_tau = match k.kind {
            SetKind::Disk { radius } | SetKind::Circle { radius } => Some(radius.ln()),
            _ if m == 1 => Some(0.0),
            _ => chebyshev_bracket(k, m, default_grid_n(m), seed)
                .ok()
                .map(|b| b.tau_low.ln()),
        };
        let bound = log_tau.and_then(|lt| nm_upper_bound(func.gamma(), k.big_m(), m, lt, r).ok());
        let mut counts = Vec::new();
        let mut max_residual: f64 = 0.0;
        let mut failed = 0usize;
        for t in 0..trials {
            let q = match k.kind {
                SetKind::Disk { radius } | SetKind::Circle { radius } => {
                    let phi = if t == 0 { 0.0 } else { rng.gen::<f64>() * TAU };
                    let rot = Complex64::from_polar(1.0, phi);
                    FrequencyTuple::roots_of_unity(m, radius)
                        .and_then(|q| FrequencyTuple::new(q.points().iter().map(|z| z * rot).collect()))
                }
                _ => fekete_search(k, m, default_grid_n(m), seed.wrapping_add(t as u64)),
            };
            let res = q.and_then(|q| count_zeros(&extremal_fpoly(&q, func), CLOSED_DISK_RADIUS, DEFAULT_SAMPLES));
            match res {
                Ok(c) => {
                    counts.push(c.count);
                    max_residual = max_residual.max(c.winding_residual);
                }
                Err(_) => failed += 1,
            }
        }
        let best = counts.iter().max().copied();
        let ratio = best.filter(|_| m > 1).map(|c| c as f64 / (m as f64 * (m as f64).ln()));
        table.push(vec![
            m.into(),
            best.into(),
            bound.into(),
            ratio.into(),
            counts.iter().min().copied().into(),
            (!counts.is_empty()).then_some(max_residual).into(),
            failed.into(),
        ]);
    }
    Ok(table)
}
