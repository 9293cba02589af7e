use ils_core::backerr::mu_bar;
use ils_core::cond::{
    frechet_adjoint, frechet_apply, kappa_c, kappa_inf_rel, kappa_upper, kappa_upper_estimated, CondCore, Kind,
};
use ils_core::ils::solve;
use ils_core::matcore::{vecops, Mat};
use ils_core::testgen::{gen_problem_gaussian, GenSpec};
use ils_core::{IlsProblem, Selector};
use proptest::prelude::*;

const SLACK: f64 = 1e-12;

fn problem() -> impl Strategy<Value = IlsProblem> {
    (2usize..=6, 0usize..=4, 1usize..=4, 0.1f64..1.0, any::<u64>()).prop_map(|(n, extra_p, q, delta, seed)| {
        let p = n + extra_p;
        gen_problem_gaussian(&GenSpec { m: p + q, n, p, delta, eps_sol: 1.0, seed }).unwrap()
    })
}

fn with_selector() -> impl Strategy<Value = (IlsProblem, Selector)> {
    problem().prop_flat_map(|prob| {
        let n = prob.n();
        (Just(prob), 1..=n, proptest::collection::vec(-1.0f64..1.0, n * n)).prop_map(move |(prob, k, data)| {
            let l = Mat::from_fn(n, k, |i, j| data[i * n + j] + if i == j { 1.5 } else { 0.0 });
            (prob, Selector::new(l).unwrap())
        })
    })
}

fn core(prob: &IlsProblem) -> CondCore {
    CondCore::new(prob, &solve(prob).unwrap()).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn upper_bounds_sandwich((prob, sel) in with_selector()) {
        let c = core(&prob);
        let kr = kappa_inf_rel(&c, &sel).unwrap();
        let ku = kappa_upper(&c, &sel, Kind::Inf).unwrap();
        prop_assert!(0.5 * ku <= kr * (1.0 + SLACK) && kr <= ku * (1.0 + SLACK));
        let kc = kappa_c(&c, &sel).unwrap();
        let kcu = kappa_upper(&c, &sel, Kind::C).unwrap();
        prop_assert!(0.5 * kcu <= kc * (1.0 + SLACK) && kc <= kcu * (1.0 + SLACK));
    }

    #[test]
    fn mixed_below_componentwise((prob, sel) in with_selector()) {
        let c = core(&prob);
        prop_assert!(kappa_inf_rel(&c, &sel).unwrap() <= kappa_c(&c, &sel).unwrap() * (1.0 + SLACK));
    }

    #[test]
    fn estimate_never_exceeds_exact((prob, sel) in with_selector()) {
        let c = core(&prob);
        for kind in [Kind::Inf, Kind::C] {
            let exact = kappa_upper(&c, &sel, kind).unwrap();
            let est = kappa_upper_estimated(&c, &sel, kind).unwrap();
            prop_assert!(est <= exact * (1.0 + SLACK) && est > 0.0);
        }
    }

    #[test]
    fn relative_numbers_ignore_data_scaling(prob in problem(), s in 0.01f64..100.0) {
        let scaled = IlsProblem::new(prob.a().scale(s), vecops::scale(prob.b(), s), prob.p(), prob.q()).unwrap();
        let sel = Selector::identity(prob.n());
        let (c0, c1) = (core(&prob), core(&scaled));
        prop_assert!(close(kappa_inf_rel(&c0, &sel).unwrap(), kappa_inf_rel(&c1, &sel).unwrap(), 1e-9));
        prop_assert!(close(kappa_c(&c0, &sel).unwrap(), kappa_c(&c1, &sel).unwrap(), 1e-9));
    }

    #[test]
    fn componentwise_ignores_selector_column_scaling(prob in problem(), s in prop::collection::vec(0.1f64..10.0, 2)) {
        let n = prob.n();
        let c = core(&prob);
        let base = Selector::unit_columns(n, &[0, n - 1]).unwrap();
        let l = Mat::from_fn(n, 2, |i, j| if (j == 0 && i == 0) || (j == 1 && i == n - 1) { s[j] } else { 0.0 });
        let scaled = Selector::new(l).unwrap();
        prop_assert!(close(kappa_c(&c, &base).unwrap(), kappa_c(&c, &scaled).unwrap(), 1e-12));
    }

    #[test]
    fn adjoint_identity((prob, sel) in with_selector(), seed in any::<u64>()) {
        let c = core(&prob);
        let (m, n) = prob.a().shape();
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let b = Mat::from_fn(m, n, |_, _| next());
        let cv: Vec<f64> = (0..m).map(|_| next()).collect();
        let u: Vec<f64> = (0..sel.k()).map(|_| next()).collect();
        let lhs = vecops::dot(&u, &frechet_apply(&c, &sel, &b, &cv).unwrap());
        let (ba, ca) = frechet_adjoint(&c, &sel, &u).unwrap();
        let rhs = vecops::dot(ba.as_slice(), b.as_slice()) + vecops::dot(&ca, &cv);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn solution_satisfies_normal_equations(prob in problem()) {
        let sol = solve(&prob).unwrap();
        let scale = prob.a().max_abs() * (prob.a().max_abs() * vecops::abs(&sol.x).iter().cloned().fold(0.0, f64::max)
            + prob.b().iter().map(|v| v.abs()).fold(0.0, f64::max));
        let nr = prob.normal_residual(&sol.x).unwrap();
        prop_assert!(nr.iter().all(|v| v.abs() <= 1e-12 * scale * (prob.m() as f64)));
    }

    #[test]
    fn backward_error_nonnegative_and_small_at_solution(prob in problem(), noise in 1e-10f64..1e-6) {
        let x = solve(&prob).unwrap().x;
        let at_x = mu_bar(&prob, &x, 1.0).unwrap().mu_bar;
        let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| v * (1.0 + if i % 2 == 0 { noise } else { -noise })).collect();
        let at_y = mu_bar(&prob, &y, 1.0).unwrap().mu_bar;
        prop_assert!(at_x >= 0.0 && at_y >= 0.0);
        prop_assert!(at_x <= at_y || at_x < 1e-13);
    }
}
