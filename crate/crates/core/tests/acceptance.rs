//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any fails.

use std::process::Command;
use std::time::Instant;

use ils_core::backerr::{mu_bar, mu_one, LOWER_FACTOR};
use ils_core::cli::args::RhsMode;
use ils_core::cli::tables::{table1, table_mu, MU_DELTAS, MU_LEVELS};
use ils_core::cond::{
    frechet_adjoint, frechet_apply, frechet_dense, kappa_c, kappa_inf, kappa_inf_alt, kappa_inf_rel, kappa_upper,
    kappa_upper_estimated, CondCore, Kind,
};
use ils_core::matcore::{cholesky, frobenius, tri_solve_vec, vec_2, vecops, Mat, Trans, Uplo};
use ils_core::oracle::{dense_condition, fd_jacobian, feasible_mu_ub};
use ils_core::testgen::{error_metrics, gen_perturbation, gen_problem, gen_problem_gaussian, GenSpec, PerturbSpec};
use ils_core::{ils::solve, IlsProblem, Selector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Upper sandwich factor `(1 + sqrt 2) / 2`.
const UPPER_FACTOR: f64 = 1.0 / LOWER_FACTOR;
/// Rounding slack for inequalities that can hold with equality.
const ROUND: f64 = 1e-12;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Random well-conditioned instance with `m <= 16`, `n <= 8`.
fn random_problem(rng: &mut ChaCha8Rng) -> IlsProblem {
    let n = rng.random_range(2..=8);
    let p = rng.random_range(n..=12);
    let m = rng.random_range((p + 1).max(n + 1)..=16);
    let spec = GenSpec {
        m,
        n,
        p,
        delta: rng.random_range(0.1..1.0),
        eps_sol: rng.random_range(0.2..1.0),
        seed: rng.random(),
    };
    if rng.random_bool(0.5) {
        gen_problem(&spec).unwrap()
    } else {
        gen_problem_gaussian(&spec).unwrap()
    }
}

fn random_selector(rng: &mut ChaCha8Rng, n: usize, which: usize) -> Selector {
    match which % 3 {
        0 => Selector::identity(n),
        1 => Selector::unit_columns(n, &[rng.random_range(0..n)]).unwrap(),
        _ => Selector::new(Mat::from_fn(n, 2, |_, _| StandardNormal.sample(rng))).unwrap(),
    }
}

fn cases(count: usize, seed: u64) -> Vec<(IlsProblem, Selector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|t| {
            let prob = random_problem(&mut rng);
            let sel = random_selector(&mut rng, prob.n(), t);
            (prob, sel)
        })
        .collect()
}

fn core_of(prob: &IlsProblem) -> CondCore {
    CondCore::new(prob, &solve(prob).unwrap()).unwrap()
}

fn c1_expression_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (prob, sel) in cases(200, 1) {
        let core = core_of(&prob);
        let k = kappa_inf(&core, &sel).unwrap();
        let alt = kappa_inf_alt(&core, &sel).unwrap();
        let dense = dense_condition(&core, &sel, Kind::Inf).unwrap();
        worst = worst.max(rel(alt, k)).max(rel(dense, k));
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: worst <= 1e-12 && secs < 30.0,
        detail: format!("200 problems, max rel diff {worst:.3e} (<= 1e-12), {secs:.2}s (< 30s)"),
    }
}

fn c2_sandwich() -> Outcome {
    let mut violations = 0;
    let mut checked = 0;
    for (prob, sel) in cases(200, 1) {
        let core = core_of(&prob);
        let kr = kappa_inf_rel(&core, &sel).unwrap();
        let ku = kappa_upper(&core, &sel, Kind::Inf).unwrap();
        let kc = kappa_c(&core, &sel).unwrap();
        let kcu = kappa_upper(&core, &sel, Kind::C).unwrap();
        checked += 2;
        if !(0.5 * ku <= kr * (1.0 + ROUND) && kr <= ku * (1.0 + ROUND)) {
            violations += 1;
        }
        if !(0.5 * kcu <= kc * (1.0 + ROUND) && kc <= kcu * (1.0 + ROUND)) {
            violations += 1;
        }
    }
    Outcome {
        pass: violations == 0,
        detail: format!("{checked} sandwich checks on 200 problems, {violations} violations"),
    }
}

fn c3_power_method() -> Outcome {
    let mut above = 0;
    let mut good = 0;
    let trials = 500;
    for (t, (prob, sel)) in cases(trials, 3).into_iter().enumerate() {
        let core = core_of(&prob);
        let kind = if t % 2 == 0 { Kind::Inf } else { Kind::C };
        let exact = kappa_upper(&core, &sel, kind).unwrap();
        let est = kappa_upper_estimated(&core, &sel, kind).unwrap();
        if est > exact * (1.0 + ROUND) {
            above += 1;
        }
        if est >= exact / 3.0 {
            good += 1;
        }
    }
    let frac = good as f64 / trials as f64;
    Outcome {
        pass: above == 0 && frac >= 0.9,
        detail: format!("{trials} trials: {above} estimates above exact, {:.1}% within factor 3 (>= 90%)", 100.0 * frac),
    }
}

fn c4_derivative_adjoint() -> Outcome {
    let mut worst_fd: f64 = 0.0;
    for (prob, sel) in cases(20, 4) {
        let core = core_of(&prob);
        let an = frechet_dense(&core, &sel).unwrap();
        let fd = fd_jacobian(&prob, &sel, 1e-6).unwrap();
        worst_fd = worst_fd.max(fd.sub(&an).unwrap().max_abs() / an.max_abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut worst_adj: f64 = 0.0;
    for _ in 0..100 {
        let prob = loop {
            let a = Mat::from_fn(3, 2, |_, _| StandardNormal.sample(&mut rng));
            let b: Vec<f64> = (0..3).map(|_| StandardNormal.sample(&mut rng)).collect();
            if let Ok(p) = IlsProblem::new(a, b, 2, 1) {
                if solve(&p).is_ok() {
                    break p;
                }
            }
        };
        let core = core_of(&prob);
        let sel = Selector::identity(2);
        let bm = Mat::from_fn(3, 2, |_, _| StandardNormal.sample(&mut rng));
        let c: Vec<f64> = (0..3).map(|_| StandardNormal.sample(&mut rng)).collect();
        let u: Vec<f64> = (0..2).map(|_| StandardNormal.sample(&mut rng)).collect();
        let lhs = vecops::dot(&u, &frechet_apply(&core, &sel, &bm, &c).unwrap());
        let (ba, ca) = frechet_adjoint(&core, &sel, &u).unwrap();
        let rhs = vecops::dot(ba.as_slice(), bm.as_slice()) + vecops::dot(&ca, &c);
        worst_adj = worst_adj.max((lhs - rhs).abs() / lhs.abs().max(1.0));
    }
    Outcome {
        pass: worst_fd <= 1e-6 && worst_adj <= 1e-12,
        detail: format!(
            "finite differences max rel err {worst_fd:.3e} (<= 1e-6) on 20 problems; adjoint max err {worst_adj:.3e} (<= 1e-12) on 100 triples"
        ),
    }
}

fn c5_backward_bracket() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    let mut violations = 0;
    let mut worst_exact: f64 = 0.0;
    for t in 0..100u64 {
        let prob = random_problem(&mut rng);
        let x = solve(&prob).unwrap().x;
        let scale = frobenius(prob.a()) * vec_2(prob.b());
        worst_exact = worst_exact.max(mu_bar(&prob, &x, 1.0).unwrap().mu_bar / scale);

        // y from data perturbed componentwise at 1e-8: the perturbation is a
        // feasible point with cost mu_1
        let (da, db) = gen_perturbation(&prob, &PerturbSpec { level: 1e-8, seed: t }).unwrap();
        let y = solve(&prob.perturbed(&da, &db).unwrap()).unwrap().x;
        let rep = mu_bar(&prob, &y, 1.0).unwrap();
        if rep.hypothesis_ok {
            checked += 1;
            let bound = mu_one(&da, &db, 1.0).min(feasible_mu_ub(&prob, &y, 1.0).unwrap());
            if rep.mu_bar > UPPER_FACTOR * bound * (1.0 + ROUND) {
                violations += 1;
            }
        }

        // y = x with componentwise relative noise 1e-8
        let y2: Vec<f64> = x.iter().map(|&v| v * (1.0 + 1e-8 * rng.random_range(-1.0..1.0))).collect();
        let rep2 = mu_bar(&prob, &y2, 1.0).unwrap();
        if rep2.hypothesis_ok {
            checked += 1;
            if rep2.mu_bar > UPPER_FACTOR * feasible_mu_ub(&prob, &y2, 1.0).unwrap() * (1.0 + ROUND) {
                violations += 1;
            }
        }
    }
    Outcome {
        pass: violations == 0 && checked > 0 && worst_exact <= 1e-13,
        detail: format!(
            "{checked} bracket checks with hypothesis holding, {violations} violations; mu_bar at computed x <= {worst_exact:.3e} * ||A||_F ||b|| (<= 1e-13)"
        ),
    }
}

fn c6_first_order_dominance() -> Outcome {
    let trials = 1000;
    let level = 1e-10;
    let mut ok_inf = 0;
    let mut ok_c = 0;
    for t in 0..trials {
        let delta = if t % 2 == 0 { 1e-3 } else { 1e-6 };
        let eps_sol = if (t / 2) % 2 == 0 { 1e-3 } else { 1e-6 };
        let spec = GenSpec { delta, eps_sol, seed: 6000 + t as u64, ..GenSpec::default() };
        let prob = gen_problem(&spec).unwrap();
        let sol = solve(&prob).unwrap();
        let (da, db) = gen_perturbation(&prob, &PerturbSpec { level, seed: t as u64 }).unwrap();
        let xt = solve(&prob.perturbed(&da, &db).unwrap()).unwrap().x;
        let core = CondCore::new(&prob, &sol).unwrap();
        let sel = match t % 3 {
            0 => Selector::identity(8),
            1 => Selector::unit_columns(8, &[0, 1]).unwrap(),
            _ => Selector::unit_columns(8, &[7]).unwrap(),
        };
        let e = error_metrics(&sol.x, &xt, &sel).unwrap();
        if e.rinf <= 1.5 * kappa_inf_rel(&core, &sel).unwrap() * level {
            ok_inf += 1;
        }
        if e.rc <= 1.5 * kappa_c(&core, &sel).unwrap() * level {
            ok_c += 1;
        }
    }
    let (fi, fc) = (ok_inf as f64 / trials as f64, ok_c as f64 / trials as f64);
    Outcome {
        pass: fi >= 0.99 && fc >= 0.99,
        detail: format!("{trials} trials: rinf bounded in {:.1}%, rc bounded in {:.1}% (>= 99%)", 100.0 * fi, 100.0 * fc),
    }
}

fn c7_trends() -> Outcome {
    let seed = 2024;
    let rows = table1(seed).unwrap();
    let base = rows.iter().find(|r| r.eps_sol == 1e-3 && r.delta == 1e-3 && r.selector == "I").unwrap();
    let cond_ok = (1e5..=1e7).contains(&base.cond);
    let mut gap_min = f64::INFINITY;
    for delta in [1e-3, 1e-6] {
        let get = |l: &str| rows.iter().find(|r| r.eps_sol == 1e-3 && r.delta == delta && r.selector == l).unwrap();
        let (l1, l2) = (get("L1"), get("L2"));
        gap_min = gap_min.min(l1.kappa_inf_rel / l2.kappa_inf_rel).min(l1.kappa_c / l2.kappa_c);
    }
    let mut gamma_ok = true;
    for rhs in [RhsMode::Structured, RhsMode::Gaussian] {
        let mu = table_mu(seed, rhs).unwrap();
        for level in MU_LEVELS {
            let g: Vec<f64> = MU_DELTAS
                .iter()
                .map(|&d| mu.iter().find(|r| r.level == level && r.delta == d).unwrap().gamma)
                .collect();
            gamma_ok &= g.windows(2).all(|w| w[1] >= w[0] / 2.0);
        }
    }
    Outcome {
        pass: cond_ok && gap_min >= 1e3 && gamma_ok,
        detail: format!(
            "cond(A^T Sigma A) = {:.4e} in [1e5, 1e7]; min kappa ratio L1/L2 = {gap_min:.3e} (>= 1e3); gamma grows as delta falls: {gamma_ok}",
            base.cond
        ),
    }
}

fn normal_equations_solve(prob: &IlsProblem) -> Vec<f64> {
    let u = cholesky(&prob.normal_matrix()).unwrap();
    let mut x = prob.a().tr_matvec(&prob.sigma(prob.b())).unwrap();
    tri_solve_vec(&u, Uplo::Upper, Trans::Yes, &mut x).unwrap();
    tri_solve_vec(&u, Uplo::Upper, Trans::No, &mut x).unwrap();
    x
}

fn c8_solver() -> Outcome {
    let mut worst_direct: f64 = 0.0;
    let mut worst_resid: f64 = 0.0;
    for (prob, _) in cases(200, 8) {
        let x = solve(&prob).unwrap().x;
        let xd = normal_equations_solve(&prob);
        worst_direct = worst_direct.max(vec_2(&vecops::sub(&x, &xd)) / vec_2(&x));
    }
    for t in 0..40u64 {
        let delta = [1e-1, 1e-3, 1e-6, 1e-8][(t % 4) as usize];
        let prob = gen_problem(&GenSpec { delta, seed: t, ..GenSpec::default() }).unwrap();
        let x = solve(&prob).unwrap().x;
        let af = frobenius(prob.a());
        let scale = af * (af * vec_2(&x) + vec_2(prob.b()));
        worst_resid = worst_resid.max(vec_2(&prob.normal_residual(&x).unwrap()) / scale);
    }
    let p1 = IlsProblem::new(Mat::from_rows(&[&[2.0, 0.0], &[0.0, 2.0], &[1.0, 1.0]]), vec![1.0, 2.0, 1.0], 2, 1).unwrap();
    let x = solve(&p1).unwrap().x;
    let p1_err = (x[0] - 0.75).abs().max((x[1] - 1.25).abs());
    Outcome {
        pass: worst_direct <= 1e-10 && worst_resid <= 1e-10 && p1_err <= 1e-14,
        detail: format!(
            "vs normal equations {worst_direct:.3e} (<= 1e-10, 200 problems); scaled normal residual {worst_resid:.3e} (<= 1e-10, delta down to 1e-8); hand instance error {p1_err:.1e}"
        ),
    }
}

fn run_bin(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_ils")).args(args).env_remove("ILS_SEED").output().unwrap();
    assert!(out.status.success(), "ils {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn c9_determinism() -> Outcome {
    let mut same = true;
    for args in [
        &["table1", "--seed", "9", "--format", "csv"][..],
        &["table-mu", "--seed", "9", "--rhs", "structured", "--format", "csv"][..],
        &["table-mu", "--seed", "9", "--rhs", "gaussian", "--format", "csv"][..],
    ] {
        same &= run_bin(args) == run_bin(args);
    }
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        run_bin(&["gen", "--seed", "9", "--out", d.path().to_str().unwrap()]);
        run_bin(&["cond", d.path().to_str().unwrap(), "--format", "csv"]);
    }
    for f in ["A.mat", "b.vec", "meta"] {
        same &= std::fs::read(d1.path().join(f)).unwrap() == std::fs::read(d2.path().join(f)).unwrap();
    }
    let c1 = run_bin(&["cond", d1.path().to_str().unwrap(), "--format", "csv"]);
    let c2 = run_bin(&["cond", d2.path().to_str().unwrap(), "--format", "csv"]);
    same &= c1 == c2;
    Outcome { pass: same, detail: format!("repeated table/gen/cond runs byte-identical: {same}") }
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("expression equivalence", c1_expression_equivalence),
        ("sandwich bounds", c2_sandwich),
        ("power-method soundness", c3_power_method),
        ("derivative and adjoint audit", c4_derivative_adjoint),
        ("backward-error bracket", c5_backward_bracket),
        ("first-order dominance", c6_first_order_dominance),
        ("trend reproduction", c7_trends),
        ("solver correctness", c8_solver),
        ("determinism", c9_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("{tag} [{}] {name}: {}", i + 1, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
