#![allow(clippy::needless_range_loop)]

use fpade_core::interpolation::{error_bound, extremal_fpoly, gamma_profile, interpolate, tq_bounds};
use fpade_core::series::factorial;
use fpade_core::vandermonde::vdm_det;
use fpade_core::{Complex64, EntireFunction, FrequencyTuple, HoloFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

fn random_disk_tuple(rng: &mut ChaCha8Rng, m: usize, radius: f64) -> FrequencyTuple {
    loop {
        let pts: Vec<Complex64> = (0..m)
            .map(|_| Complex64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen::<f64>() * TAU))
            .collect();
        if let Ok(q) = FrequencyTuple::new(pts) {
            if q.separation() > 1e-3 {
                return q;
            }
        }
    }
}

#[test]
fn jet_is_reproduced_for_random_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for f in [
        EntireFunction::exp(),
        EntireFunction::alternating(),
        EntireFunction::from_label("osc").unwrap(),
    ] {
        for m in 1..=10 {
            let q = random_disk_tuple(&mut rng, m, 1.0);
            let a: Vec<Complex64> = (0..m)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let g = HoloFunction::polynomial(a.clone());
            let t = interpolate(&g, &f, &q).unwrap().poly;
            for l in 0..m {
                let want = a[l] * factorial(l);
                let got = t.derivative_at_zero(l).unwrap();
                // the power sum cancels; measure against the size of its terms
                let terms: f64 = t
                    .coeffs()
                    .iter()
                    .zip(q.points())
                    .map(|(c, qj)| c.norm() * qj.norm().powi(l as i32))
                    .sum::<f64>()
                    * f.coeff(l).unwrap().norm();
                let scale = want.norm().max(terms);
                assert!((got - want).norm() <= 1e-9 * scale, "m={m} l={l}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn pointwise_error_bound_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let g = HoloFunction::geometric(2.0).unwrap();
    let f = EntireFunction::exp();
    for trial in 0..20 {
        let m = [4, 8, 12][trial % 3];
        let q = random_disk_tuple(&mut rng, m, 1.0);
        let z = Complex64::from_polar(0.6 * rng.gen::<f64>().sqrt(), rng.gen::<f64>() * TAU);
        let r = 1.0 + rng.gen::<f64>() * 0.9;
        let t = interpolate(&g, &f, &q).unwrap().poly;
        let err = (g.eval(z).unwrap() - t.eval(z, 1e-15).unwrap()).norm();
        let bound = error_bound(&g, &q, &f, z, r).unwrap();
        assert!(err <= bound + 1e-8, "trial {trial}: {err} > {bound}");
    }
}

#[test]
fn witness_lies_in_bracket() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for f in [
        EntireFunction::exp(),
        EntireFunction::from_json("c", "[[1,0],[0,2],[-1.5,0]]").unwrap(),
    ] {
        for trial in 0..30 {
            let m = 1 + trial % 12;
            let q = random_disk_tuple(&mut rng, m, 1.3);
            let b = tq_bounds(&q, &f);
            let w = interpolate(&HoloFunction::monomial(m - 1), &f, &q)
                .unwrap()
                .poly
                .norm_inf();
            assert!(w.ln() >= b.log_t_lower + (1.0f64 - 1e-9).ln(), "m={m}");
            assert!(w.ln() <= b.log_t_upper + (1.0f64 + 1e-9).ln(), "m={m}");
            // c_i = v_im (m-1)!/F_{m-1} with |v_im| = 1/γ_i
            let p = gamma_profile(&q);
            let fm = f.coeff(m - 1).unwrap().norm();
            for (i, c) in interpolate(&HoloFunction::monomial(m - 1), &f, &q)
                .unwrap()
                .poly
                .coeffs()
                .iter()
                .enumerate()
            {
                let want = factorial(m - 1) / (fm * p.gamma(i));
                assert!((c.norm() - want).abs() <= 1e-9 * want);
            }
        }
    }
}

#[test]
fn bracket_products_are_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let f = EntireFunction::from_json("c", "[[1,0],[0,2]]").unwrap();
    for m in 1..=20 {
        let q = random_disk_tuple(&mut rng, m, 1.0);
        let b = tq_bounds(&q, &f);
        let big_m = q.max_modulus();
        let lg = f.gamma().ln();
        assert!(b.log_t_lower + b.log_eps_lower <= lg + 1e-12);
        assert!((b.log_t_upper + b.log_eps_lower).abs() < 1e-9);
        assert!(b.log_t_upper + b.log_eps_upper <= lg + 2.0 * big_m + 1e-9);
    }
}

#[test]
fn extremal_is_normalized_and_vanishes() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let f = EntireFunction::exp();
    for trial in 0..40 {
        let m = 1 + trial % 30;
        let q = random_disk_tuple(&mut rng, m, 1.0);
        let e = extremal_fpoly(&q, &f);
        assert!((e.norm_inf() - 1.0).abs() < 1e-10, "m={m}");
        assert_eq!(e.vanishing_order(), m - 1);
        if m <= 12 {
            for k in 0..m.saturating_sub(1) {
                let t = e.derivative_at_zero(k).unwrap() / factorial(k);
                assert!(t.norm() < 1e-9 * e.norm_1(), "m={m} k={k}");
            }
        }
    }
}

#[test]
fn extremal_sup_norm_below_eps_upper() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let f = EntireFunction::exp();
    for trial in 0..20 {
        let m = 2 + trial % 14;
        let q = random_disk_tuple(&mut rng, m, 1.0);
        let e = extremal_fpoly(&q, &f);
        let sup = e.log_sup_norm_disk(1e-14).unwrap();
        let b = tq_bounds(&q, &f);
        assert!(
            sup <= b.log_eps_upper + (1.0f64 + 1e-6).ln(),
            "m={m}: {sup} > {}",
            b.log_eps_upper
        );
        // hook expansion agrees with the direct sum where the latter is accurate
        if m <= 6 {
            let z = Complex64::new(0.6, 0.5);
            let a = e.eval_log(z, 1e-15).unwrap().to_complex();
            let d = e.eval(z, 1e-15).unwrap();
            assert!((a - d).norm() < 1e-12, "m={m}: {a} vs {d}");
        }
    }
}

#[test]
fn gamma_product_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    for m in 1..=40 {
        let q = random_disk_tuple(&mut rng, m, 2.0);
        let p = gamma_profile(&q);
        let want = 2.0 * vdm_det(&q).log_mag();
        assert!((p.log_product() - want).abs() <= 1e-9 * want.abs().max(1.0));
        assert!(p.log_gamma.iter().all(|&g| g >= p.log_gamma_min));
        // γ(q)^m <= ∏ γ_i
        assert!(m as f64 * p.log_gamma_min <= p.log_product() + 1e-9);
    }
}
