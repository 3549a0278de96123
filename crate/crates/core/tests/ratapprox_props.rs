mod common;

use memsolve::kernel::log_grid;
use memsolve::ratapprox::io::TABULATED_ALPHA_025;
use memsolve::ratapprox::{
    aaa, certify, default_s_grid, format_coefficients, load_coefficients, parse_coefficients,
    poles_to_terms, sample_grid, save_coefficients, tabulated,
};
use memsolve::{fit_exp_sum, AnalyticKernel, Error, ExpSumKernel, ExpTerm, FitConfig};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn partial_fractions_match_barycentric_form() {
    let mut rng = common::rng(11);
    for &(alpha, delta, m) in &[
        (0.5, 1.0, 10),
        (0.25, 1.0, 8),
        (0.75, 2.0, 6),
        (0.5, 0.3, 4),
    ] {
        let s_max = 1e3;
        let truth = AnalyticKernel::new(alpha, delta).unwrap();
        let z = sample_grid(s_max, 2000, 1e-6);
        let f: Vec<f64> = z.iter().map(|&s| truth.eval_laplace(s).unwrap()).collect();
        let bary = aaa(&z, &f, m + 1, 0.0).unwrap();
        let pr = poles_to_terms(&bary.support, &bary.weights, &bary.values).unwrap();
        for _ in 0..1000 {
            let s = rng.random_range(0.0..s_max);
            let (a, b) = (pr.eval(s), bary.eval(s));
            assert!(
                (a - b).abs() <= 1e-8 * b.abs(),
                "alpha {alpha} s {s}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn refining_grids_never_lowers_reported_maxima() {
    let truth = AnalyticKernel::new(0.5, 1.0).unwrap();
    for fit in [
        tabulated(0.5).unwrap(),
        fit_exp_sum(&truth, &FitConfig::new(5, 1e3)).unwrap().kernel,
    ] {
        let s = sample_grid(1e3, 200, 1e-6);
        let t = log_grid(1e-3, 1e2, 100);
        let refine = |g: &[f64]| {
            let mut out = g.to_vec();
            out.extend(g.windows(2).map(|w| 0.5 * (w[0] + w[1])));
            out.sort_by(f64::total_cmp);
            out
        };
        let coarse = certify(&truth, &fit, &s, &t).unwrap();
        let fine = certify(&truth, &fit, &refine(&s), &refine(&t)).unwrap();
        assert!(fine.eps_F_max >= coarse.eps_F_max);
        assert!(fine.eps_f_max_on_window >= coarse.eps_f_max_on_window);
    }
}

#[test]
fn fits_satisfy_sign_conditions_or_fail_loudly() {
    for alpha in [0.1, 0.25, 0.5, 0.75, 0.9] {
        for delta in [0.0, 0.5, 1.0, 3.0] {
            for m in [2, 5, 10] {
                let truth = AnalyticKernel::new(alpha, delta).unwrap();
                match fit_exp_sum(&truth, &FitConfig::new(m, 1e3)) {
                    Ok(rep) => {
                        let k = &rep.kernel;
                        assert_eq!(k.m(), m);
                        assert!(k.terms().iter().all(|t| t.weight > 0.0 && t.rate > 0.0));
                        assert!(k.gamma1() >= 0.0 && k.gamma2() >= 0.0);
                    }
                    Err(Error::FitFailure(_)) | Err(Error::Domain(_)) => {}
                    Err(e) => panic!("alpha {alpha} delta {delta} m {m}: unexpected {e}"),
                }
            }
        }
    }
}

#[test]
fn tabulated_kernels_satisfy_sign_conditions() {
    for alpha in [0.25, 0.5, 0.75] {
        let k = tabulated(alpha).unwrap();
        assert_eq!(k.m(), 10);
        assert_eq!(k.gamma1(), 0.0);
        assert!(k.gamma2() > 0.0);
        assert!(k.terms().iter().all(|t| t.weight > 0.0 && t.rate > 0.0));
    }
}

/// `K~(10)` summed straight from the fixture text, without the crate parser.
#[test]
fn tabulated_transform_by_direct_summation() {
    let mut lines = TABULATED_ALPHA_025.lines();
    let head: Vec<f64> = lines
        .next()
        .unwrap()
        .split_whitespace()
        .map(|x| x.parse().unwrap())
        .collect();
    let mut sum = head[2];
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let ab: Vec<f64> = line
            .split_whitespace()
            .map(|x| x.parse().unwrap())
            .collect();
        sum += ab[0] / (10.0 + ab[1]);
    }
    let k = tabulated(0.25).unwrap();
    assert!((k.eval_laplace(10.0).unwrap() - sum).abs() <= 1e-15 * sum);
    let exact = 11f64.powf(-0.75);
    assert!((sum - exact).abs() < 1e-6, "{sum} vs {exact}");
}

#[test]
fn default_grid_shape() {
    let g = default_s_grid(1e3);
    assert_eq!(g.len(), 2001);
    assert_eq!(g[0], 0.0);
    assert!((g[1] - 1e-3).abs() < 1e-15);
    assert!((g[2000] - 1e3).abs() < 1e-9);
}

fn kernel_strategy() -> impl Strategy<Value = ExpSumKernel> {
    (
        prop::collection::vec((1e-12..1e6f64, 1e-9..1e9f64), 0..12),
        0.0..10.0f64,
        0.0..10.0f64,
    )
        .prop_map(|(pairs, g1, g2)| {
            let terms = pairs
                .into_iter()
                .map(|(weight, rate)| ExpTerm { weight, rate })
                .collect();
            ExpSumKernel::new(g1, g2, terms).unwrap()
        })
}

proptest! {
    #[test]
    fn coefficient_text_round_trips(kern in kernel_strategy()) {
        let back = parse_coefficients(&format_coefficients(&kern), "mem".as_ref()).unwrap();
        prop_assert_eq!(back, kern);
    }
}

#[test]
fn coefficient_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = common::rng(12);
    for i in 0..20 {
        let kern = common::random_kernel(&mut rng, i % 7, i % 2 == 0);
        let path = dir.path().join(format!("k{i}.txt"));
        save_coefficients(&kern, &path).unwrap();
        assert_eq!(load_coefficients(&path).unwrap(), kern);
    }
}
