//! One function per subcommand. Each returns named tables; the first one is
//! the main artifact.

use fpade_core::capacity::{capacity_limits, default_grid_n, FeketeChain};
use fpade_core::interpolation::{error_bound, eval_interpolant_series, extremal_fpoly, interpolate, tq_bounds};
use fpade_core::laplace::{
    chi_r_family, dirac_example_table, fekete_bound_experiment, lambda_functional, lambda_limit_abs,
    lambda_roots_of_unity,
};
use fpade_core::table::{Cell, Table};
use fpade_core::zeros::nm_experiment;
use fpade_core::{CompactSetDescriptor, Complex64, FrequencyTuple, HoloFunction, SetKind, SpectralMeasure};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

use crate::args::{Kind, RunConfig};
use crate::failure::Failure;

pub type Named = Vec<(&'static str, Table)>;

pub fn run(kind: Kind, cfg: &RunConfig) -> Result<Named, Failure> {
    match kind {
        Kind::Interp => interp(cfg),
        Kind::Bounds => bounds(cfg),
        Kind::Fekete => fekete(cfg),
        Kind::Capacity => capacity(cfg),
        Kind::Zeros => zeros(cfg),
        Kind::Laplace => laplace(cfg),
    }
}

/// `geometric:R` or `exp:λ` (λ real, or `re,im`).
pub fn parse_g(spec: &str) -> Result<HoloFunction, Failure> {
    let bad = |msg: String| Failure::config("bad_g", msg);
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| bad(format!("`{spec}`: expected geometric:R or exp:λ")))?;
    let nums: Vec<f64> = arg
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad(format!("`{spec}`: bad number")))?;
    match (kind.trim(), nums.as_slice()) {
        ("geometric", [r]) => Ok(HoloFunction::geometric(*r)?),
        ("exp", [re]) => Ok(HoloFunction::exponential(Complex64::new(*re, 0.0))),
        ("exp", [re, im]) => Ok(HoloFunction::exponential(Complex64::new(*re, *im))),
        _ => Err(bad(format!("`{spec}`: expected geometric:R or exp:λ"))),
    }
}

/// `m` random points of `K`: uniform in disks, on circles and segments;
/// distinct boundary-grid points for polygons and clouds.
pub fn sample_tuple(k: &CompactSetDescriptor, m: usize, rng: &mut ChaCha8Rng) -> Result<FrequencyTuple, Failure> {
    for _ in 0..100 {
        let pts: Vec<Complex64> = match &k.kind {
            SetKind::Disk { radius } => (0..m)
                .map(|_| Complex64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen::<f64>() * TAU))
                .collect(),
            SetKind::Circle { radius } => (0..m)
                .map(|_| Complex64::from_polar(*radius, rng.gen::<f64>() * TAU))
                .collect(),
            SetKind::Segment { a, b } => (0..m)
                .map(|_| Complex64::new(rng.gen_range(a.min(*b)..=a.max(*b)), 0.0))
                .collect(),
            SetKind::Polygon { .. } | SetKind::Cloud { .. } => {
                let grid = k.boundary_grid(default_grid_n(m).max(1024));
                if grid.len() < m {
                    return Err(Failure::config(
                        "set_too_small",
                        format!("{} has fewer than {m} points", k.label()),
                    ));
                }
                sample(rng, grid.len(), m).into_iter().map(|i| grid[i]).collect()
            }
        };
        if let Ok(q) = FrequencyTuple::new(pts) {
            return Ok(q);
        }
    }
    Err(Failure::config("sampling_failed", "could not draw separated points"))
}

fn interp(cfg: &RunConfig) -> Result<Named, Failure> {
    let g = parse_g(cfg.g.as_deref().unwrap_or("geometric:2"))?;
    let r = cfg.r.first().copied().unwrap_or(1.5);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut t = Table::new(&[
        "m",
        "trial",
        "z_re",
        "z_im",
        "err",
        "err_direct",
        "bound",
        "ok",
        "conditioning_warning",
    ]);
    for &m in &cfg.m_list {
        for trial in 0..cfg.trials {
            let q = sample_tuple(&cfg.set, m, &mut rng)?;
            let z = Complex64::from_polar(cfg.z_max * rng.gen::<f64>().sqrt(), rng.gen::<f64>() * TAU);
            let ip = interpolate(&g, &cfg.func, &q)?;
            let gz = g.eval(z)?;
            // the direct sum Σ c_j F(q_j z) loses about ε‖c‖_1 to cancellation
            let err = (gz - eval_interpolant_series(&g, &cfg.func, &q, z, cfg.tol)?).norm();
            let err_direct = (gz - ip.poly.eval(z, cfg.tol)?).norm();
            let bound = error_bound(&g, &q, &cfg.func, z, r)?;
            t.push(vec![
                m.into(),
                trial.into(),
                z.re.into(),
                z.im.into(),
                err.into(),
                err_direct.into(),
                bound.into(),
                (err <= bound + 1e-8).into(),
                ip.conditioning_warning.into(),
            ]);
        }
    }
    Ok(vec![("interp", t)])
}

fn bounds(cfg: &RunConfig) -> Result<Named, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut t = Table::new(&[
        "m",
        "trial",
        "log_gamma",
        "log_t_lower",
        "log_witness",
        "log_t_upper",
        "witness_in_bracket",
        "log_eps_lower",
        "log_extremal_sup",
        "log_eps_upper",
        "extremal_ok",
    ]);
    for &m in &cfg.m_list {
        for trial in 0..cfg.trials {
            let q = sample_tuple(&cfg.set, m, &mut rng)?;
            let b = tq_bounds(&q, &cfg.func);
            let lg = fpade_core::interpolation::gamma_profile(&q).log_gamma_min;
            let witness = interpolate(&HoloFunction::monomial(m - 1), &cfg.func, &q)?
                .poly
                .norm_inf()
                .ln();
            let slack = 1e-9f64.ln_1p();
            let inside = witness >= b.log_t_lower - slack && witness <= b.log_t_upper + slack;
            let sup = extremal_fpoly(&q, &cfg.func).log_sup_norm_disk(cfg.tol)?;
            t.push(vec![
                m.into(),
                trial.into(),
                lg.into(),
                b.log_t_lower.into(),
                witness.into(),
                b.log_t_upper.into(),
                inside.into(),
                b.log_eps_lower.into(),
                sup.into(),
                b.log_eps_upper.into(),
                (sup <= b.log_eps_upper + 1e-6f64.ln_1p()).into(),
            ]);
        }
    }
    Ok(vec![("bounds", t)])
}

fn fekete(cfg: &RunConfig) -> Result<Named, Failure> {
    let m_max = *cfg.m_list.iter().max().expect("non-empty m list");
    let grid_n = cfg.grid_n.unwrap_or(default_grid_n(m_max));
    let chain = FeketeChain::build(&cfg.set, m_max, grid_n, cfg.seed)?;
    let array = chain.array(&cfg.m_list)?;
    let mut b = Table::new(&["m", "log_vm", "d_estimate", "tau_low", "tau_high", "direct", "method"]);
    for &m in cfg.m_list.iter().filter(|&&m| m >= 2) {
        let br = chain.bracket(m)?;
        let log_vm = chain.log_vm(m);
        b.push(vec![
            m.into(),
            log_vm.into(),
            (2.0 * log_vm / (m * (m - 1)) as f64).exp().into(),
            br.tau_low.into(),
            br.tau_high.into(),
            br.direct.into(),
            array.method.as_str().into(),
        ]);
    }
    Ok(vec![("array", array.to_table()), ("brackets", b)])
}

fn capacity(cfg: &RunConfig) -> Result<Named, Failure> {
    if cfg.m_list.iter().any(|&m| m < 2) {
        return Err(Failure::config("bad_m_list", "capacity needs m >= 2"));
    }
    Ok(vec![(
        "capacity",
        capacity_limits(&cfg.set, &cfg.func, &cfg.m_list, cfg.grid_n, cfg.seed)?,
    )])
}

fn zeros(cfg: &RunConfig) -> Result<Named, Failure> {
    let r = cfg.r.first().copied().unwrap_or(3.0);
    Ok(vec![(
        "zeros",
        nm_experiment(&cfg.set, &cfg.func, &cfg.m_list, cfg.trials, cfg.seed, r)?,
    )])
}

fn read_measure(text: &str) -> Result<SpectralMeasure, Failure> {
    let text = text.trim();
    let json = if text.starts_with('{') {
        text.to_string()
    } else {
        std::fs::read_to_string(text).map_err(|e| Failure::config("measure_unreadable", format!("{text}: {e}")))?
    };
    Ok(SpectralMeasure::from_json(&json)?)
}

fn laplace(cfg: &RunConfig) -> Result<Named, Failure> {
    let experiment = cfg.experiment.as_deref().unwrap_or("dirac-example");
    let table = match experiment {
        "dirac-example" => dirac_example_table(&cfg.m_list)?,
        "cos" => lambda_limit_abs(&SpectralMeasure::cosine(), &cfg.m_list)?,
        "chi-r" => {
            let rs = if cfg.r.is_empty() {
                vec![0.9, 0.99, 0.999]
            } else {
                cfg.r.clone()
            };
            let mut t = Table::new(&["r", "m", "lambda", "l1_chi", "l1_chi_minus", "flagged"]);
            for &r in &rs {
                for &m in &cfg.m_list {
                    let c = chi_r_family(r, m)?;
                    t.push(vec![
                        r.into(),
                        m.into(),
                        c.lambda.into(),
                        c.l1_chi.into(),
                        c.l1_chi_minus.into(),
                        c.flagged.into(),
                    ]);
                }
            }
            t
        }
        "fekete-bound" => fekete_bound_experiment(&cfg.func, &cfg.m_list, cfg.trials, cfg.seed)?,
        "lambda" => {
            let spec = cfg
                .measure
                .as_deref()
                .ok_or_else(|| Failure::config("missing_measure", "the lambda experiment needs --measure"))?;
            let mu = read_measure(spec)?;
            if mu.density_part().is_some() {
                lambda_limit_abs(&mu, &cfg.m_list)?
            } else {
                let mut t = Table::new(&["m", "lambda_roots_of_unity", "lambda_roots_of_minus_one"]);
                for &m in &cfg.m_list {
                    let qp = lambda_functional(&mu, &FrequencyTuple::roots_of_minus_one(m)?)?;
                    t.push(vec![m.into(), lambda_roots_of_unity(&mu, m)?.into(), Cell::from(qp)]);
                }
                t
            }
        }
        other => {
            return Err(Failure::config(
                "unknown_experiment",
                format!("unknown laplace experiment `{other}` (dirac-example, cos, chi-r, fekete-bound, lambda)"),
            ))
        }
    };
    Ok(vec![("laplace", table)])
}
