//! Compact sets, Fekete-point search on boundary grids, `V_m` and
//! Chebyshev-constant sequences, capacity brackets and equilibrium moments.
//!
//! For circles and disks the Fekete points are known exactly (scaled roots
//! of unity). Everything else is a grid-restricted local optimum: Leja
//! initialization followed by single-point exchange passes.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interpolation::tq_bounds;
use crate::logscale::ln_factorial;
use crate::series::EntireFunction;
use crate::table::{fmt_float, Table};
use crate::vandermonde::{vdm_det_points, FrequencyTuple};

/// Maximum number of exchange passes.
pub const MAX_PASSES: usize = 50;
/// An exchange must raise `log|det|` by more than this to be accepted.
pub const IMPROVEMENT_TOL: f64 = 1e-12;
const MAX_REFINE_SWEEPS: usize = 200;

pub fn default_grid_n(m: usize) -> usize {
    (16 * m).max(512)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SetKind {
    Disk {
        #[serde(rename = "R")]
        radius: f64,
    },
    Circle {
        #[serde(rename = "R")]
        radius: f64,
    },
    Segment {
        a: f64,
        b: f64,
    },
    Polygon {
        #[serde(with = "crate::table::complex_pairs")]
        vertices: Vec<Complex64>,
    },
    Cloud {
        #[serde(with = "crate::table::complex_pairs")]
        points: Vec<Complex64>,
    },
}

/// A compact set `K` with a boundary sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CompactSetDescriptor {
    pub kind: SetKind,
}

impl CompactSetDescriptor {
    pub fn new(kind: SetKind) -> Result<Self> {
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        match &kind {
            SetKind::Disk { radius } | SetKind::Circle { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::domain(format!("radius must be positive, got {radius}")));
                }
            }
            SetKind::Segment { a, b } => {
                if !(a.is_finite() && b.is_finite() && a != b) {
                    return Err(Error::domain(format!("degenerate segment [{a}, {b}]")));
                }
            }
            SetKind::Polygon { vertices } => {
                if vertices.len() < 2 || !vertices.iter().all(finite) {
                    return Err(Error::domain("polygon needs at least two finite vertices"));
                }
            }
            SetKind::Cloud { points } => {
                if points.is_empty() || !points.iter().all(finite) {
                    return Err(Error::domain("point cloud must be non-empty and finite"));
                }
            }
        }
        Ok(CompactSetDescriptor { kind })
    }

    pub fn circle(radius: f64) -> Self {
        Self::new(SetKind::Circle { radius }).expect("invalid circle radius")
    }

    pub fn disk(radius: f64) -> Self {
        Self::new(SetKind::Disk { radius }).expect("invalid disk radius")
    }

    pub fn segment(a: f64, b: f64) -> Self {
        Self::new(SetKind::Segment { a, b }).expect("invalid segment")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let kind: SetKind = serde_json::from_str(json)?;
        Self::new(kind)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.kind).expect("set descriptor serializes")
    }

    /// Short name used in tables and file names.
    pub fn label(&self) -> String {
        match &self.kind {
            SetKind::Disk { radius } => format!("disk:{radius}"),
            SetKind::Circle { radius } => format!("circle:{radius}"),
            SetKind::Segment { a, b } => format!("segment:{a},{b}"),
            SetKind::Polygon { vertices } => format!("polygon[{}]", vertices.len()),
            SetKind::Cloud { points } => format!("cloud[{}]", points.len()),
        }
    }

    /// Radius of the smallest origin-centered disk containing `K`.
    pub fn big_m(&self) -> f64 {
        match &self.kind {
            SetKind::Disk { radius } | SetKind::Circle { radius } => *radius,
            SetKind::Segment { a, b } => a.abs().max(b.abs()),
            SetKind::Polygon { vertices: pts } | SetKind::Cloud { points: pts } => {
                pts.iter().map(|z| z.norm()).fold(0.0, f64::max)
            }
        }
    }

    /// Classical transfinite diameter, when known in closed form.
    pub fn d_known(&self) -> Option<f64> {
        match &self.kind {
            SetKind::Disk { radius } | SetKind::Circle { radius } => Some(*radius),
            SetKind::Segment { a, b } => Some((b - a).abs() / 4.0),
            SetKind::Cloud { .. } => Some(0.0),
            SetKind::Polygon { .. } => None,
        }
    }

    /// Whether the Fekete points are known exactly (scaled roots of unity).
    pub fn is_round(&self) -> bool {
        matches!(self.kind, SetKind::Disk { .. } | SetKind::Circle { .. })
    }

    /// `n` samples of the (outer) boundary. A cloud returns its own points.
    pub fn boundary_grid(&self, n: usize) -> Vec<Complex64> {
        match &self.kind {
            SetKind::Disk { radius } | SetKind::Circle { radius } => (0..n)
                .map(|k| Complex64::from_polar(*radius, TAU * k as f64 / n as f64))
                .collect(),
            SetKind::Segment { a, b } => {
                if n == 1 {
                    return vec![Complex64::new(*a, 0.0)];
                }
                // cosine spacing, endpoints included
                (0..n)
                    .map(|k| {
                        let t = (1.0 - (PI * k as f64 / (n - 1) as f64).cos()) / 2.0;
                        Complex64::new(a + (b - a) * t, 0.0)
                    })
                    .collect()
            }
            SetKind::Polygon { vertices } => polygon_grid(vertices, n),
            SetKind::Cloud { points } => points.clone(),
        }
    }
}

fn polygon_grid(vertices: &[Complex64], n: usize) -> Vec<Complex64> {
    let k = vertices.len();
    let edges: Vec<(Complex64, Complex64)> = (0..k).map(|i| (vertices[i], vertices[(i + 1) % k])).collect();
    let lengths: Vec<f64> = edges.iter().map(|(p, q)| (q - p).norm()).collect();
    let total: f64 = lengths.iter().sum();
    let n = n.max(k);
    // every edge contributes its start vertex; the rest is shared by length
    let spare = n - k;
    let mut counts: Vec<usize> = lengths
        .iter()
        .map(|l| (spare as f64 * l / total).floor() as usize)
        .collect();
    let mut left = spare - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| {
        let fi = spare as f64 * lengths[i] / total - counts[i] as f64;
        let fj = spare as f64 * lengths[j] / total - counts[j] as f64;
        fj.total_cmp(&fi).then(i.cmp(&j))
    });
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    let mut out = Vec::with_capacity(n);
    for ((p, q), c) in edges.iter().zip(&counts) {
        for s in 0..=*c {
            let t = s as f64 / (*c + 1) as f64;
            out.push(p + (q - p) * t);
        }
    }
    out
}

impl FromStr for CompactSetDescriptor {
    type Err = Error;

    /// JSON (`{"kind":"circle","R":1}`) or shorthand: `circle:1`, `disk:2`,
    /// `segment:-1,1`, `polygon:0,0;1,0;0,1`, `cloud:0,0;1,1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return Self::from_json(s);
        }
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("set `{s}`: expected kind:parameters")))?;
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("set `{s}`: bad number `{t}`")))
        };
        let pairs = |t: &str| -> Result<Vec<Complex64>> {
            t.split(';')
                .map(|p| {
                    let (re, im) = p.split_once(',').unwrap_or((p, "0"));
                    Ok(Complex64::new(num(re)?, num(im)?))
                })
                .collect()
        };
        let kind = match kind.trim() {
            "circle" => SetKind::Circle { radius: num(rest)? },
            "disk" => SetKind::Disk { radius: num(rest)? },
            "segment" => {
                let (a, b) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("set `{s}`: segment needs a,b")))?;
                SetKind::Segment { a: num(a)?, b: num(b)? }
            }
            "polygon" => SetKind::Polygon { vertices: pairs(rest)? },
            "cloud" => SetKind::Cloud { points: pairs(rest)? },
            other => return Err(Error::Parse(format!("unknown set kind `{other}`"))),
        };
        Self::new(kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeketeMethod {
    ExactRootsOfUnity,
    LejaExchange,
}

impl FeketeMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            FeketeMethod::ExactRootsOfUnity => "exact_roots_of_unity",
            FeketeMethod::LejaExchange => "leja_exchange",
        }
    }
}

/// Near-Fekete tuples for several `m` on one set.
#[derive(Debug, Clone)]
pub struct FeketeArray {
    pub per_m: BTreeMap<usize, FrequencyTuple>,
    pub vdm_log: BTreeMap<usize, f64>,
    pub method: FeketeMethod,
}

impl FeketeArray {
    /// Rows `(m, point_index, re, im, logdet)`.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["m", "point_index", "re", "im", "logdet"]);
        for (m, q) in &self.per_m {
            for (i, z) in q.points().iter().enumerate() {
                t.push(vec![
                    (*m).into(),
                    i.into(),
                    z.re.into(),
                    z.im.into(),
                    self.vdm_log[m].into(),
                ]);
            }
        }
        t
    }
}

/// Working state of a grid search: indices into the grid plus the
/// potential sums `S[g] = Σ_j ln|g - q_j|` split into a finite part and a
/// count of exact coincidences.
struct GridTuple<'a> {
    grid: &'a [Complex64],
    idx: Vec<usize>,
    pot: Vec<f64>,
    hits: Vec<u32>,
}

impl<'a> GridTuple<'a> {
    fn new(grid: &'a [Complex64], idx: Vec<usize>) -> Self {
        let mut t = GridTuple {
            grid,
            idx: Vec::new(),
            pot: vec![0.0; grid.len()],
            hits: vec![0; grid.len()],
        };
        for i in idx {
            t.add(i);
        }
        t
    }

    fn add(&mut self, p: usize) {
        self.update(p, 1.0);
        self.idx.push(p);
    }

    fn update(&mut self, p: usize, sign: f64) {
        let zp = self.grid[p];
        let grid = self.grid;
        self.pot
            .par_iter_mut()
            .zip(self.hits.par_iter_mut())
            .enumerate()
            .for_each(|(g, (s, h))| {
                let d = (grid[g] - zp).norm();
                if d == 0.0 {
                    if sign > 0.0 {
                        *h += 1;
                    } else {
                        *h -= 1;
                    }
                } else {
                    *s += sign * d.ln();
                }
            });
    }

    fn replace(&mut self, slot: usize, g: usize) {
        let old = self.idx[slot];
        self.update(old, -1.0);
        self.update(g, 1.0);
        self.idx[slot] = g;
    }

    fn logdet(&self) -> f64 {
        // Σ_{i<j} ln|q_i - q_j| = (1/2) Σ_i S[q_i], each q_i hitting itself once
        if self.idx.iter().any(|&i| self.hits[i] != 1) {
            return f64::NEG_INFINITY;
        }
        0.5 * self.idx.iter().map(|&i| self.pot[i]).sum::<f64>()
    }

    /// Grid point maximizing `S[g]` among points not already chosen
    /// (lowest index wins ties).
    fn best_extension(&self) -> Option<(usize, f64)> {
        best_by(self.grid.len(), |g| (self.hits[g] == 0).then(|| self.pot[g]))
    }

    /// `ln|det|` of the tuple without slot `i`.
    fn logdet_without(&self, slot: usize) -> f64 {
        self.logdet() - self.pot[self.idx[slot]]
    }

    fn points(&self) -> Vec<Complex64> {
        self.idx.iter().map(|&i| self.grid[i]).collect()
    }

    /// Single-point exchange passes. Returns the number of passes run.
    fn exchange(&mut self, rng: &mut ChaCha8Rng) -> usize {
        let m = self.idx.len();
        let mut order: Vec<usize> = (0..m).collect();
        for pass in 1..=MAX_PASSES {
            order.shuffle(rng);
            let mut improved = false;
            for &slot in &order {
                let p = self.idx[slot];
                let zp = self.grid[p];
                let current = self.pot[p];
                let grid = self.grid;
                let cand = best_by(grid.len(), |g| {
                    let d = (grid[g] - zp).norm();
                    let own = u32::from(d == 0.0);
                    (self.hits[g] == own && g != p).then(|| self.pot[g] - if own == 1 { 0.0 } else { d.ln() })
                });
                if let Some((g, val)) = cand {
                    if val > current + IMPROVEMENT_TOL {
                        self.replace(slot, g);
                        improved = true;
                    }
                }
            }
            if !improved {
                return pass;
            }
        }
        MAX_PASSES
    }
}

/// Deterministic parallel argmax over `0..n`: largest value, then lowest index.
fn best_by<F>(n: usize, value: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> Option<f64> + Sync,
{
    (0..n)
        .into_par_iter()
        .filter_map(|g| value(g).filter(|v| v.is_finite()).map(|v| (g, v)))
        .reduce_with(|a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a })
}

fn leja(grid: &[Complex64], m: usize) -> Result<GridTuple<'_>> {
    let start = best_by(grid.len(), |g| Some(grid[g].norm()))
        .map(|(g, _)| g)
        .unwrap_or(0);
    let mut t = GridTuple::new(grid, vec![start]);
    while t.idx.len() < m {
        let (g, _) = t.best_extension().ok_or(Error::GridTooCoarse { separation: 0.0 })?;
        t.add(g);
    }
    Ok(t)
}

fn check_grid(k: &CompactSetDescriptor, m: usize, grid_n: usize) -> Result<Vec<Complex64>> {
    if m == 0 {
        return Err(Error::domain("m must be positive"));
    }
    if grid_n < 4 * m {
        return Err(Error::domain(format!(
            "grid_n = {grid_n} must be at least 4m = {}",
            4 * m
        )));
    }
    let grid = k.boundary_grid(grid_n);
    if grid.len() < m {
        return Err(Error::GridTooCoarse { separation: 0.0 });
    }
    Ok(grid)
}

fn to_tuple(points: Vec<Complex64>) -> Result<FrequencyTuple> {
    FrequencyTuple::new(points).map_err(|e| match e {
        Error::NotSeparated { separation, .. } => Error::GridTooCoarse { separation },
        other => other,
    })
}

fn search_on_grid<'a>(grid: &'a [Complex64], m: usize, rng: &mut ChaCha8Rng) -> Result<GridTuple<'a>> {
    let mut t = leja(grid, m)?;
    t.exchange(rng);
    Ok(t)
}

/// Near-Fekete `m`-tuple of `K`. Exact scaled roots of unity for circles and
/// disks; otherwise Leja initialization plus exchange passes on
/// `boundary_grid(grid_n)`, visiting slots in a seeded random order.
pub fn fekete_search(k: &CompactSetDescriptor, m: usize, grid_n: usize, seed: u64) -> Result<FrequencyTuple> {
    let grid = check_grid(k, m, grid_n)?;
    if let SetKind::Disk { radius } | SetKind::Circle { radius } = k.kind {
        return FrequencyTuple::roots_of_unity(m, radius);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = search_on_grid(&grid, m, &mut rng)?;
    to_tuple(t.points())
}

pub fn fekete_array(k: &CompactSetDescriptor, ms: &[usize], grid_n: usize, seed: u64) -> Result<FeketeArray> {
    let mut per_m = BTreeMap::new();
    let mut vdm_log = BTreeMap::new();
    for &m in ms {
        let q = fekete_search(k, m, grid_n, seed)?;
        vdm_log.insert(m, vdm_det_points(q.points()).log_mag());
        per_m.insert(m, q);
    }
    let method = if k.is_round() {
        FeketeMethod::ExactRootsOfUnity
    } else {
        FeketeMethod::LejaExchange
    };
    Ok(FeketeArray { per_m, vdm_log, method })
}

/// Near-Fekete tuples for every `m = 1..=m_max`, refined against each other
/// until, on the grid,
/// `V_m >= V_{m-1} · max_g |∏(g - q_j)|` (extension) and
/// `V_{m-1} >= max_i |det A(Q_m \ q_i)|` (deletion) hold for all `m`.
/// The second condition makes the `V_m^{2/(m(m-1))}` estimates nonincreasing
/// and the first makes the Chebyshev brackets contain the direct norm.
pub struct FeketeChain {
    pub grid: Vec<Complex64>,
    pub tuples: Vec<Vec<usize>>,
    pub logdet: Vec<f64>,
    pub method: FeketeMethod,
}

impl FeketeChain {
    pub fn build(k: &CompactSetDescriptor, m_max: usize, grid_n: usize, seed: u64) -> Result<Self> {
        let grid = check_grid(k, m_max, grid_n)?;
        if let SetKind::Disk { radius } | SetKind::Circle { radius } = k.kind {
            let mut tuples = vec![Vec::new()];
            let mut logdet = vec![0.0];
            for m in 1..=m_max {
                let q = FrequencyTuple::roots_of_unity(m, radius)?;
                logdet.push(vdm_det_points(q.points()).log_mag());
                tuples.push(Vec::new());
            }
            return Ok(FeketeChain {
                grid,
                tuples,
                logdet,
                method: FeketeMethod::ExactRootsOfUnity,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tuples = vec![Vec::new()];
        let mut logdet = vec![0.0];
        for m in 1..=m_max {
            let t = search_on_grid(&grid, m, &mut rng)?;
            logdet.push(t.logdet());
            tuples.push(t.idx);
        }
        let mut chain = FeketeChain {
            grid,
            tuples,
            logdet,
            method: FeketeMethod::LejaExchange,
        };
        chain.refine(&mut rng);
        Ok(chain)
    }

    fn refine(&mut self, rng: &mut ChaCha8Rng) {
        let m_max = self.tuples.len() - 1;
        for _ in 0..MAX_REFINE_SWEEPS {
            let mut changed = false;
            for m in 2..=m_max {
                let lower = GridTuple::new(&self.grid, self.tuples[m - 1].clone());
                if let Some((g, s)) = lower.best_extension() {
                    if self.logdet[m - 1] + s > self.logdet[m] + IMPROVEMENT_TOL {
                        let mut idx = lower.idx.clone();
                        idx.push(g);
                        let mut t = GridTuple::new(&self.grid, idx);
                        t.exchange(rng);
                        self.logdet[m] = t.logdet();
                        self.tuples[m] = t.idx;
                        changed = true;
                    }
                }
                let upper = GridTuple::new(&self.grid, self.tuples[m].clone());
                let (slot, best) = (0..m)
                    .map(|i| (i, upper.logdet_without(i)))
                    .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
                if best > self.logdet[m - 1] + IMPROVEMENT_TOL {
                    let mut idx = upper.idx.clone();
                    idx.remove(slot);
                    let mut t = GridTuple::new(&self.grid, idx);
                    t.exchange(rng);
                    self.logdet[m - 1] = t.logdet();
                    self.tuples[m - 1] = t.idx;
                    changed = true;
                }
            }
            if !changed {
                return;
            }
        }
    }

    pub fn m_max(&self) -> usize {
        self.tuples.len() - 1
    }

    pub fn tuple(&self, m: usize) -> Result<FrequencyTuple> {
        match self.method {
            FeketeMethod::ExactRootsOfUnity => {
                FrequencyTuple::roots_of_unity(m, self.grid.first().map_or(1.0, |z| z.norm()))
            }
            FeketeMethod::LejaExchange => to_tuple(self.tuples[m].iter().map(|&i| self.grid[i]).collect()),
        }
    }

    pub fn log_vm(&self, m: usize) -> f64 {
        self.logdet[m]
    }

    /// Chebyshev bracket for `τ_{m-1}` from this chain, `2 <= m <= m_max`.
    pub fn bracket(&self, m: usize) -> Result<ChebyshevBracket> {
        if m < 2 || m > self.m_max() {
            return Err(Error::domain(format!("bracket needs 2 <= m <= {}", self.m_max())));
        }
        bracket_from_chain(self, m)
    }

    pub fn array(&self, ms: &[usize]) -> Result<FeketeArray> {
        let mut per_m = BTreeMap::new();
        let mut vdm_log = BTreeMap::new();
        for &m in ms {
            if m == 0 || m > self.m_max() {
                return Err(Error::domain(format!("array needs 1 <= m <= {}", self.m_max())));
            }
            per_m.insert(m, self.tuple(m)?);
            vdm_log.insert(m, self.log_vm(m));
        }
        Ok(FeketeArray {
            per_m,
            vdm_log,
            method: self.method,
        })
    }

    /// `ln max_grid |∏_{j} (z - q_j)|` over the `m`-tuple.
    pub fn log_monic_norm(&self, m: usize) -> Result<f64> {
        let q = self.tuple(m)?;
        let grid = &self.grid;
        let best = best_by(grid.len(), |g| {
            Some(q.points().iter().map(|qj| (grid[g] - qj).norm().ln()).sum::<f64>())
        });
        Ok(best.map_or(f64::NEG_INFINITY, |(_, v)| v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VmEntry {
    pub m: usize,
    pub log_vm: f64,
    /// `V_m^{2/(m(m-1))}`, the running estimate of `d(K)`.
    pub d_estimate: f64,
}

pub fn vm_sequence(k: &CompactSetDescriptor, m_max: usize, grid_n: usize, seed: u64) -> Result<Vec<VmEntry>> {
    if m_max < 2 {
        return Err(Error::domain("m_max must be at least 2"));
    }
    let chain = FeketeChain::build(k, m_max, grid_n, seed)?;
    Ok(vm_entries(&chain))
}

fn vm_entries(chain: &FeketeChain) -> Vec<VmEntry> {
    (2..=chain.m_max())
        .map(|m| {
            let log_vm = chain.log_vm(m);
            VmEntry {
                m,
                log_vm,
                d_estimate: (2.0 * log_vm / (m * (m - 1)) as f64).exp(),
            }
        })
        .collect()
}

/// Bracket for `τ_{m-1}` plus the direct grid norm of the monic polynomial
/// vanishing at the Fekete `(m-1)`-tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChebyshevBracket {
    pub m: usize,
    pub tau_low: f64,
    pub tau_high: f64,
    pub direct: f64,
}

pub fn chebyshev_bracket(k: &CompactSetDescriptor, m: usize, grid_n: usize, seed: u64) -> Result<ChebyshevBracket> {
    if m < 2 {
        return Err(Error::domain("m must be at least 2"));
    }
    let chain = FeketeChain::build(k, m, grid_n, seed)?;
    bracket_from_chain(&chain, m)
}

fn bracket_from_chain(chain: &FeketeChain, m: usize) -> Result<ChebyshevBracket> {
    let n = (m - 1) as f64;
    let ratio = chain.log_vm(m) - chain.log_vm(m - 1);
    Ok(ChebyshevBracket {
        m,
        tau_low: ((ratio - (m as f64).ln()) / n).exp(),
        tau_high: (ratio / n).exp(),
        direct: (chain.log_monic_norm(m - 1)? / n).exp(),
    })
}

/// Capacity bracket table: for each `m`, the bracket
/// `e^{-M} τ_{m-1}^{m-1}/(m-1)! <= ε_m <= Γ e^M V_m^{2/m}/(m-1)!` in log
/// scale, the normalized endpoints `m · endpoint^{1/m}`, and the product
/// `t(Q_m) ε(Q_m)` bracketed through the Fekete tuple.
///
/// `τ_{m-1}` is the exact value `R` on circles and disks and the lower
/// Chebyshev bracket elsewhere.
pub fn capacity_limits(
    k: &CompactSetDescriptor,
    func: &EntireFunction,
    ms: &[usize],
    grid_n: Option<usize>,
    seed: u64,
) -> Result<Table> {
    if ms.iter().any(|&m| m < 2) {
        return Err(Error::domain("capacity_limits needs m >= 2"));
    }
    let mut table = Table::new(&[
        "m",
        "log_eps_lower",
        "log_eps_upper",
        "norm_lower",
        "norm_upper",
        "e_d_known",
        "log_t_upper_q",
        "log_eps_lower_q",
        "log_tq_product",
        "product_ok",
    ]);
    let Some(&m_max) = ms.iter().max() else {
        return Ok(table);
    };
    let big_m = k.big_m();
    let lgam = func.gamma().ln();
    let chain = if k.is_round() {
        None
    } else {
        Some(FeketeChain::build(
            k,
            m_max,
            grid_n.unwrap_or(default_grid_n(m_max)),
            seed,
        )?)
    };
    for &m in ms {
        let mf = m as f64;
        let (log_vm, log_tau, q) = match (&k.kind, &chain) {
            (SetKind::Disk { radius } | SetKind::Circle { radius }, _) => {
                let q = FrequencyTuple::roots_of_unity(m, *radius)?;
                (vdm_det_points(q.points()).log_mag(), radius.ln(), q)
            }
            (_, Some(c)) => {
                let b = bracket_from_chain(c, m)?;
                (c.log_vm(m), b.tau_low.ln(), c.tuple(m)?)
            }
            _ => unreachable!(),
        };
        let lf = ln_factorial(m - 1);
        let lower = -big_m + (mf - 1.0) * log_tau - lf;
        let upper = lgam + big_m + 2.0 * log_vm / mf - lf;
        let tq = tq_bounds(&q, func);
        let product = tq.log_t_upper + tq.log_eps_lower;
        let ok = product >= -1e-9 && product <= lgam + 2.0 * big_m + 1e-9;
        table.push(vec![
            m.into(),
            lower.into(),
            upper.into(),
            (mf * (lower / mf).exp()).into(),
            (mf * (upper / mf).exp()).into(),
            k.d_known().map(|d| std::f64::consts::E * d).into(),
            tq.log_t_upper.into(),
            tq.log_eps_lower.into(),
            product.into(),
            ok.into(),
        ]);
    }
    Ok(table)
}

/// `(1/m) Σ_i q_i^k` for `k = 1..=k_max`.
pub fn equilibrium_moments(q: &FrequencyTuple, k_max: usize) -> Result<Vec<Complex64>> {
    if k_max == 0 {
        return Err(Error::domain("k_max must be at least 1"));
    }
    let m = q.m() as f64;
    let mut powers: Vec<Complex64> = q.points().to_vec();
    let mut out = Vec::with_capacity(k_max);
    for _ in 0..k_max {
        out.push(powers.iter().sum::<Complex64>() / m);
        for (p, z) in powers.iter_mut().zip(q.points()) {
            *p *= z;
        }
    }
    Ok(out)
}

/// Moments `∫ z^k dμ` of the equilibrium measure, where known in closed
/// form: uniform measure on a circle (or disk boundary) and the arcsine
/// law on a segment.
pub fn reference_moment(k: &CompactSetDescriptor, order: usize) -> Option<Complex64> {
    match k.kind {
        SetKind::Disk { .. } | SetKind::Circle { .. } => Some(if order == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }),
        SetKind::Segment { a, b } => {
            // x = c + h t with t arcsine on [-1, 1]: E t^{2j} = binom(2j, j)/4^j
            let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
            let mut sum = 0.0;
            let mut binom = 1.0;
            for i in 0..=order {
                if i > 0 {
                    binom = binom * (order - i + 1) as f64 / i as f64;
                }
                if i % 2 == 0 {
                    sum += binom * c.powi((order - i) as i32) * h.powi(i as i32) * arcsine_even(i / 2);
                }
            }
            Some(Complex64::new(sum, 0.0))
        }
        _ => None,
    }
}

fn arcsine_even(j: usize) -> f64 {
    (1..=j).fold(1.0, |acc, i| acc * (2 * i - 1) as f64 / (2 * i) as f64)
}

/// Table of empirical moments against reference moments.
pub fn moments_table(k: &CompactSetDescriptor, q: &FrequencyTuple, k_max: usize) -> Result<Table> {
    let mut t = Table::new(&["k", "re", "im", "reference_re", "abs_error"]);
    for (i, mu) in equilibrium_moments(q, k_max)?.into_iter().enumerate() {
        let r = reference_moment(k, i + 1);
        t.push(vec![
            (i + 1).into(),
            mu.re.into(),
            mu.im.into(),
            r.map(|r| r.re).into(),
            r.map(|r| (mu - r).norm()).into(),
        ]);
    }
    Ok(t)
}

/// Human-readable one-line summary of a bracket.
pub fn describe_bracket(b: &ChebyshevBracket) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "tau_{}: [{}, {}] direct {}",
        b.m - 1,
        fmt_float(b.tau_low),
        fmt_float(b.tau_high),
        fmt_float(b.direct)
    );
    s
}
