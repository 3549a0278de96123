use memsolve::kernel::log_grid;
use memsolve::quad::integrate;
use memsolve::special::gamma;
use memsolve::{AnalyticKernel, ExpSumKernel, ExpTerm};
use proptest::prelude::*;

fn exp_sum() -> impl Strategy<Value = ExpSumKernel> {
    (
        prop::collection::vec((1e-3..10.0f64, 1e-2..1e3f64), 0..8),
        0.0..2.0f64,
    )
        .prop_map(|(pairs, g2)| {
            let terms = pairs
                .into_iter()
                .map(|(weight, rate)| ExpTerm { weight, rate })
                .collect();
            ExpSumKernel::new(0.0, g2, terms).unwrap()
        })
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

proptest! {
    #[test]
    fn analytic_kernel_is_decreasing_and_convex(
        alpha in 0.05..0.95f64,
        delta in 0.0..3.0f64,
        t in 1e-3..30.0f64,
        h in 1e-3..1.0f64,
    ) {
        let k = AnalyticKernel::new(alpha, delta).unwrap();
        let (k0, k1, k2) = (k.eval(t).unwrap(), k.eval(t + h).unwrap(), k.eval(t + 2.0 * h).unwrap());
        prop_assert!(k1 > 0.0);
        prop_assert!(k0 > k1);
        prop_assert!(k0 + k2 >= 2.0 * k1 * (1.0 - 1e-12));
    }

    #[test]
    fn exp_sum_is_decreasing_and_convex(kern in exp_sum(), mut ts in prop::collection::vec(0.0..50.0f64, 2..40)) {
        ts.sort_by(f64::total_cmp);
        for w in ts.windows(2) {
            prop_assert!(kern.eval(w[1]) <= kern.eval(w[0]));
        }
        for &t in &ts {
            prop_assert!(kern.derivative(t) <= 0.0);
            prop_assert!(kern.second_derivative(t) >= 0.0);
        }
        let grid: Vec<f64> = ts.into_iter().filter(|&t| t > 0.0).collect();
        prop_assert!(kern.check_positive_type(&grid).unwrap().passed());
    }

    #[test]
    fn exp_sum_laplace_matches_quadrature(kern in exp_sum(), s in 0.5..20.0f64) {
        let t_big = 60.0 / s;
        // Geometric panels resolve the fast terms near t = 0.
        let mut edges = vec![0.0];
        edges.extend(log_grid(1e-7 * t_big, t_big, 30));
        let numeric: f64 = edges
            .windows(2)
            .map(|w| integrate(|t| kern.eval(t) * (-s * t).exp(), w[0], w[1], 1e-13).unwrap())
            .sum();
        let closed = kern.eval_laplace(s).unwrap() - kern.gamma2();
        prop_assert!((numeric - closed).abs() <= 1e-6 * (1.0 + closed.abs()), "{} vs {}", numeric, closed);
    }

    #[test]
    fn laplace_shift_identity(alpha in 0.05..0.95f64, delta in 0.0..5.0f64, s in 1e-6..1e3f64) {
        let shifted = AnalyticKernel::new(alpha, delta).unwrap().eval_laplace(s).unwrap();
        let plain = AnalyticKernel::new(alpha, 0.0).unwrap().eval_laplace(s + delta).unwrap();
        prop_assert!(close(shifted, plain, 1e-14));
    }

    #[test]
    fn kernel_damping_identity(alpha in 0.05..0.95f64, delta in 0.0..5.0f64, t in 1e-6..1e2f64) {
        let damped = AnalyticKernel::new(alpha, delta).unwrap().eval(t).unwrap();
        let plain = AnalyticKernel::new(alpha, 0.0).unwrap().eval(t).unwrap();
        prop_assert!(close(damped, plain * (-delta * t).exp(), 1e-13));
    }
}

/// `∫ e^{-st} k(t) dt` after `u = t^{1-alpha}`, compared with the closed form.
#[test]
fn analytic_laplace_matches_quadrature() {
    for &(alpha, delta) in &[(0.25, 1.0), (0.5, 1.0), (0.75, 1.0), (0.5, 0.0), (0.3, 2.5)] {
        let k = AnalyticKernel::new(alpha, delta).unwrap();
        for &s in &[0.1, 1.0, 7.0, 50.0] {
            let p = 1.0 - alpha;
            let rate = s + delta;
            let upper = (60.0 / rate).powf(p);
            let v = integrate(|u| (-rate * u.powf(1.0 / p)).exp(), 0.0, upper, 1e-13).unwrap()
                / gamma(2.0 - alpha);
            let closed = k.eval_laplace(s).unwrap();
            assert!(
                (v - closed).abs() <= 1e-6 * closed,
                "alpha {alpha} delta {delta} s {s}: {v} vs {closed}"
            );
        }
    }
}

#[test]
fn positivity_on_default_grid_for_every_tabulated_kernel() {
    for alpha in [0.25, 0.5, 0.75] {
        let k = memsolve::ratapprox::tabulated(alpha).unwrap();
        assert!(k
            .check_positive_type(&memsolve::kernel::default_positivity_grid())
            .unwrap()
            .passed());
        assert!(k
            .check_positive_type(&log_grid(1e-6, 1e4, 300))
            .unwrap()
            .passed());
    }
}
