//! Vandermonde determinants, the closed-form inverse of the Vandermonde
//! matrix, and generalized Vandermonde (Schur) ratios.
//!
//! Row convention: `A_m(q)` has rows `(q_1^p, ..., q_m^p)` for
//! `p = 0, ..., m-1`, so `det A_m(q) = ∏_{i<j} (q_j - q_i)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::logscale::LogComplex;

/// Relative separation guard: points closer than `1e-10 (1 + max|q|)` are
/// rejected.
pub const SEPARATION_GUARD: f64 = 1e-10;
/// Default largest `m` for which a dense inverse is produced.
pub const DEFAULT_DENSE_CAP: usize = 64;
/// Entries of the inverse above this modulus raise a conditioning warning.
pub const CONDITIONING_LIMIT: f64 = 1e14;

/// An ordered tuple of pairwise distinct frequencies `q_1, ..., q_m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyTuple {
    #[serde(with = "crate::table::complex_pairs")]
    points: Vec<Complex64>,
    separation: f64,
}

impl FrequencyTuple {
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("frequency tuple must be non-empty"));
        }
        if points.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("frequencies must be finite"));
        }
        let separation = min_separation(&points);
        let scale = 1.0 + points.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let required = SEPARATION_GUARD * scale;
        if !(separation > required) {
            return Err(Error::NotSeparated { separation, required });
        }
        Ok(FrequencyTuple { points, separation })
    }

    /// `ζ_j = R exp(2πi j/m)`, `j = 1..=m` (so `ζ_m = R`).
    pub fn roots_of_unity(m: usize, radius: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("m must be positive"));
        }
        Self::new(
            (1..=m)
                .map(|j| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * j as f64 / m as f64))
                .collect(),
        )
    }

    /// The `m` roots of `z^m = -1`: `exp(iπ(2j-1)/m)`, `j = 1..=m`.
    pub fn roots_of_minus_one(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("m must be positive"));
        }
        Self::new(
            (1..=m)
                .map(|j| Complex64::from_polar(1.0, std::f64::consts::PI * (2 * j - 1) as f64 / m as f64))
                .collect(),
        )
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn m(&self) -> usize {
        self.points.len()
    }

    /// Minimum pairwise distance (`+∞` for a single point).
    pub fn separation(&self) -> f64 {
        self.separation
    }

    /// `M = max_j |q_j|`.
    pub fn max_modulus(&self) -> f64 {
        self.points.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// The tuple with the `i`-th point (0-based) removed.
    pub fn without(&self, i: usize) -> Vec<Complex64> {
        self.points
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, &z)| z)
            .collect()
    }

    pub fn into_points(self) -> Vec<Complex64> {
        self.points
    }
}

fn min_separation(points: &[Complex64]) -> f64 {
    let mut sep = f64::INFINITY;
    for i in 0..points.len() {
        for j in 0..i {
            sep = sep.min((points[i] - points[j]).norm());
        }
    }
    sep
}

/// `∏_{i<j} (q_j - q_i)` over an arbitrary list of points.
pub fn vdm_det_points(points: &[Complex64]) -> LogComplex {
    let n = points.len();
    LogComplex::product((0..n).flat_map(|j| (0..j).map(move |i| points[j] - points[i])))
}

/// `det A_m(q) = ∏_{i<j} (q_j - q_i)`, accumulated in log scale.
pub fn vdm_det(q: &FrequencyTuple) -> LogComplex {
    vdm_det_points(q.points())
}

/// `s_0, ..., s_n` of the given points via `e_k <- e_k + x e_{k-1}`.
pub fn elementary_symmetric_all(points: &[Complex64]) -> Vec<Complex64> {
    let n = points.len();
    let mut e = vec![Complex64::new(0.0, 0.0); n + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (t, &x) in points.iter().enumerate() {
        for k in (1..=t + 1).rev() {
            let prev = e[k - 1];
            e[k] += x * prev;
        }
    }
    e
}

/// Elementary symmetric polynomial `s_l` of the points.
pub fn elementary_symmetric(points: &[Complex64], l: usize) -> Result<Complex64> {
    if l > points.len() {
        return Err(Error::domain(format!(
            "degree {l} exceeds number of variables {}",
            points.len()
        )));
    }
    Ok(elementary_symmetric_all(points)[l])
}

/// Complete homogeneous symmetric polynomials `h_0, ..., h_deg`.
pub fn complete_homogeneous_all(points: &[Complex64], deg: usize) -> Vec<Complex64> {
    let mut h = vec![Complex64::new(0.0, 0.0); deg + 1];
    h[0] = Complex64::new(1.0, 0.0);
    for &x in points {
        for n in 1..=deg {
            let prev = h[n - 1];
            h[n] += x * prev;
        }
    }
    h
}

/// Result of [`vdm_inverse`]: the dense matrix `[v_ik]` (row `i`, column `k`,
/// both 0-based here) plus conditioning metadata.
#[derive(Debug, Clone)]
pub struct VdmInverse {
    pub matrix: Vec<Vec<Complex64>>,
    pub max_entry: f64,
    /// Set when some `|v_ik| > 1e14`.
    pub conditioning_warning: bool,
}

/// Closed-form inverse `v_ik = (-1)^{m-k} s_{m-k}(q^i) / ∏_{j≠i}(q_i - q_j)`
/// (1-based `k`), with the default dense cap.
pub fn vdm_inverse(q: &FrequencyTuple) -> Result<VdmInverse> {
    vdm_inverse_capped(q, DEFAULT_DENSE_CAP)
}

pub fn vdm_inverse_capped(q: &FrequencyTuple, cap: usize) -> Result<VdmInverse> {
    let m = q.m();
    if m > cap {
        return Err(Error::domain(format!("m = {m} exceeds dense cap {cap}")));
    }
    let pts = q.points();
    let mut matrix = Vec::with_capacity(m);
    let mut max_entry = 0.0f64;
    for i in 0..m {
        let rest = q.without(i);
        let e = elementary_symmetric_all(&rest);
        let denom = LogComplex::product(rest.iter().map(|&qj| pts[i] - qj));
        let row: Vec<Complex64> = (1..=m)
            .map(|k| {
                let s = e[m - k];
                let sign = if (m - k).is_multiple_of(2) { 1.0 } else { -1.0 };
                (LogComplex::from(s * sign) / denom).to_complex()
            })
            .collect();
        max_entry = row.iter().map(|v| v.norm()).fold(max_entry, f64::max);
        matrix.push(row);
    }
    Ok(VdmInverse {
        matrix,
        max_entry,
        conditioning_warning: !(max_entry <= CONDITIONING_LIMIT),
    })
}

/// The Vandermonde matrix `A_m(q)` with rows of powers `0..m`.
pub fn vandermonde_matrix(points: &[Complex64]) -> Vec<Vec<Complex64>> {
    let m = points.len();
    (0..m)
        .map(|p| points.iter().map(|z| z.powu(p as u32)).collect())
        .collect()
}

fn check_schur_indices(m: usize, j: usize, k: usize) -> Result<()> {
    let top = m - 1;
    let ok = (k > top && top > j) || (k >= top && j == top);
    if ok {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "need k > m-1 > j >= 0 or k >= m-1 = j; got m = {m}, j = {j}, k = {k}"
        )))
    }
}

/// Power rows of `A_m^{j,k}`: `0, ..., j-1, j+1, ..., m-1, k`.
pub fn generalized_powers(m: usize, j: usize, k: usize) -> Vec<usize> {
    (0..m).filter(|&p| p != j).chain(std::iter::once(k)).collect()
}

/// Log-scaled determinant of the matrix with rows `(q_1^p, ..., q_m^p)`
/// for the given powers. Each row is normalized by its largest entry
/// before elimination with partial pivoting.
fn log_det_power_rows(points: &[Complex64], powers: &[usize]) -> LogComplex {
    let m = points.len();
    debug_assert_eq!(powers.len(), m);
    let mut det = LogComplex::ONE;
    let mut a: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    for &p in powers {
        let logs: Vec<f64> = points
            .iter()
            .map(|z| if p == 0 { 0.0 } else { p as f64 * z.norm().ln() })
            .collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return LogComplex::ZERO;
        }
        det *= LogComplex::new(top, 0.0);
        a.push(
            points
                .iter()
                .zip(&logs)
                .map(|(z, &l)| {
                    if p == 0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::from_polar((l - top).exp(), p as f64 * z.arg())
                    }
                })
                .collect(),
        );
    }
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()).then(y.cmp(&x)))
            .expect("non-empty range");
        if a[piv][col].norm() == 0.0 {
            return LogComplex::ZERO;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let pivot = a[col][col];
        det *= LogComplex::from(pivot);
        for r in col + 1..m {
            let f = a[r][col] / pivot;
            if f.norm() == 0.0 {
                continue;
            }
            for c in col..m {
                let v = a[col][c];
                a[r][c] -= f * v;
            }
        }
    }
    det
}

/// `det A_m^{j,k}(q) / det A_m(q)`, the Schur polynomial of the hook
/// `(k-m+1, 1^{m-j-1})`.
///
/// The numerator is a log-scaled row reduction of the generalized
/// Vandermonde matrix (rows in the order `q^0, ..., q^{m-1}` without `q^j`,
/// then `q^k`); the denominator is the exact product formula.
pub fn schur_ratio(q: &FrequencyTuple, j: usize, k: usize) -> Result<LogComplex> {
    let m = q.m();
    check_schur_indices(m, j, k)?;
    if j == m - 1 && k == m - 1 {
        return Ok(LogComplex::ONE);
    }
    let num = log_det_power_rows(q.points(), &generalized_powers(m, j, k));
    Ok(num / vdm_det(q))
}

/// Sum of monomials `q^{μ(T)}` over semistandard tableaux `T` of the hook
/// shape `(k-m+1, 1^{m-j-1})` with entries in `1..=m`, together with the
/// number of tableaux. Restricted to `m <= 8`, `k - j <= 10`.
pub fn schur_tableau_sum(q: &FrequencyTuple, j: usize, k: usize) -> Result<(Complex64, u64)> {
    let m = q.m();
    check_schur_indices(m, j, k)?;
    if m > 8 || k - j > 10 {
        return Err(Error::domain("tableau enumeration limited to m <= 8 and k - j <= 10"));
    }
    let row_len = k + 1 - m;
    if row_len == 0 {
        return Ok((Complex64::new(1.0, 0.0), 1));
    }
    let col_extra = m - j - 1;
    let pts = q.points();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut count = 0u64;
    let mut row = Vec::with_capacity(row_len);
    let mut col = Vec::with_capacity(col_extra);
    // corner cell shared by the first row and the first column
    for corner in 0..m {
        row.clear();
        row.push(corner);
        walk_row(
            corner, row_len, col_extra, m, pts, &mut row, &mut col, &mut sum, &mut count,
        );
    }
    Ok((sum, count))
}

#[allow(clippy::too_many_arguments)]
fn walk_row(
    corner: usize,
    row_len: usize,
    col_extra: usize,
    m: usize,
    pts: &[Complex64],
    row: &mut Vec<usize>,
    col: &mut Vec<usize>,
    sum: &mut Complex64,
    count: &mut u64,
) {
    if row.len() == row_len {
        col.clear();
        walk_col(corner, col_extra, m, pts, row, col, sum, count);
        return;
    }
    let last = *row.last().expect("row starts with the corner");
    for v in last..m {
        row.push(v);
        walk_row(corner, row_len, col_extra, m, pts, row, col, sum, count);
        row.pop();
    }
}

#[allow(clippy::too_many_arguments)]
fn walk_col(
    corner: usize,
    col_extra: usize,
    m: usize,
    pts: &[Complex64],
    row: &[usize],
    col: &mut Vec<usize>,
    sum: &mut Complex64,
    count: &mut u64,
) {
    if col.len() == col_extra {
        let mono = row
            .iter()
            .chain(col.iter())
            .fold(Complex64::new(1.0, 0.0), |acc, &i| acc * pts[i]);
        *sum += mono;
        *count += 1;
        return;
    }
    let last = col.last().copied().unwrap_or(corner);
    for v in last + 1..m {
        col.push(v);
        walk_col(corner, col_extra, m, pts, row, col, sum, count);
        col.pop();
    }
}

/// Number of monomials of the hook Schur polynomial,
/// `k! / (j! (m-j-1)! (k-m)! (k-j))`, evaluated exactly.
pub fn schur_term_count(m: usize, j: usize, k: usize) -> Result<u64> {
    if m == 0 {
        return Err(Error::domain("m must be positive"));
    }
    check_schur_indices(m, j, k)?;
    if j == m - 1 && k == m - 1 {
        return Ok(1);
    }
    let primes = primes_up_to(k);
    let mut result: u128 = 1;
    let limit: u128 = 1u128 << 63;
    for &p in &primes {
        let mut e =
            legendre(k, p) as i64 - legendre(j, p) as i64 - legendre(m - j - 1, p) as i64 - legendre(k - m, p) as i64;
        let mut t = k - j;
        while t.is_multiple_of(p) {
            e -= 1;
            t /= p;
        }
        if e < 0 {
            return Err(Error::domain("term count formula is not integral"));
        }
        for _ in 0..e {
            result = result.checked_mul(p as u128).ok_or(Error::Overflow)?;
            if result > limit {
                return Err(Error::Overflow);
            }
        }
    }
    Ok(result as u64)
}

fn legendre(n: usize, p: usize) -> usize {
    let mut e = 0;
    let mut pk = p;
    while pk <= n {
        e += n / pk;
        match pk.checked_mul(p) {
            Some(v) => pk = v,
            None => break,
        }
    }
    e
}

fn primes_up_to(n: usize) -> Vec<usize> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            for s in (i * i..=n).step_by(i) {
                sieve[s] = false;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&i| sieve[i]).collect()
}
