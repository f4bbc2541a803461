//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so the lines always
//! print.

use std::process::ExitCode;
use std::time::Instant;

use gcap::campaign::{self, Negate};
use gcap_core::functionals::{
    concavity_grid, g_p, gaussian_holevo_capacity, min_output_entropy, min_output_fp_closed, numeric_inf_fp,
    numeric_min_output_entropy, EnergyBudget,
};
use gcap_core::rng::{self, Rng};
use gcap_core::state::{schatten_norm, von_neumann_entropy};
use gcap_core::symplectic::{
    euler_decompose, orthogonality_residual, orthosymplectic_to_unitary, random_unitary, sample_positive_definite,
    sample_symplectic, symplectic_residual, unitary_to_orthosymplectic, SqueezeLaw,
};
use gcap_core::williamson::{symplectic_eigenvalues, williamson};
use gcap_core::{ComplexUnitary, GaussianChannel, Matrix, Tolerances};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

const SEED: u64 = 23;

fn symplectic_core() -> Outcome {
    let mut worst = [0.0f64; 5];
    for i in 0..1000u64 {
        let mut r = rng::stream(SEED, i);
        let n = r.random_range(1..=4usize);
        let law = SqueezeLaw::Uniform { max: 4.0 };
        let a = sample_positive_definite(n, (0.5, 5.0), law, &mut r).unwrap();
        let s = sample_symplectic(n, law, &mut r).unwrap();

        let w = williamson(&a).unwrap();
        let e = euler_decompose(&s, &Tolerances::default()).unwrap();
        let nu = symplectic_eigenvalues(&a).unwrap();
        let nu_moved = symplectic_eigenvalues(&s.matrix().congruence(&a)).unwrap();
        let invariance = nu
            .values()
            .iter()
            .zip(nu_moved.values())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let det = (w.s.matrix().determinant() - 1.0)
            .abs()
            .max((s.matrix().determinant() - 1.0).abs());
        let values = [
            w.residual(&a),
            e.recompose().max_abs_diff(s.matrix()),
            invariance,
            det,
            symplectic_residual(w.s.matrix()).unwrap(),
        ];
        for (w, v) in worst.iter_mut().zip(values) {
            *w = if v.is_nan() { f64::NAN } else { w.max(v) };
        }
    }
    let pass = worst.iter().all(|w| *w <= 1e-8);
    outcome(
        pass,
        format!(
            "1000 trials: williamson {:.1e}, euler {:.1e}, congruence {:.1e}, |det−1| {:.1e} (limit 1e-8)",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn isomorphism() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..500u64 {
        let mut r = rng::stream(SEED, 10_000 + i);
        let n = r.random_range(1..=4usize);
        let u = random_unitary(n, &mut r);
        let v = random_unitary(n, &mut r);
        let tu = unitary_to_orthosymplectic(&u);
        let tv = unitary_to_orthosymplectic(&v);
        let tuv = unitary_to_orthosymplectic(&u.mul(&v));
        let back = orthosymplectic_to_unitary(&tu, 1e-10).unwrap();
        let adj = ComplexUnitary::new(u.matrix().adjoint(), 1e-10).unwrap();
        let values = [
            tuv.matrix().max_abs_diff(&(tu.matrix() * tv.matrix())),
            back.matrix().max_abs_diff(u.matrix()),
            unitary_to_orthosymplectic(&adj).matrix().max_abs_diff(&tu.matrix().transpose()),
            symplectic_residual(tu.matrix()).unwrap(),
            orthogonality_residual(tu.matrix()),
        ];
        for v in values {
            worst = if v.is_nan() { f64::NAN } else { worst.max(v) };
        }
    }
    outcome(worst <= 1e-10, format!("500 trials: worst residual {worst:.1e} (limit 1e-10)"))
}

fn entropy_derivative() -> Outcome {
    let h = 1e-4;
    let mut worst = 0.0f64;
    for i in 0..200u64 {
        let mut r = rng::stream(SEED, 20_000 + i);
        let n = r.random_range(1..=3usize);
        let nu: Vec<f64> = (0..n).map(|_| r.random_range(1.0..10.0)).collect();
        let s = von_neumann_entropy(&nu).unwrap();
        let d = (schatten_norm(&nu, 1.0 + h).unwrap() - schatten_norm(&nu, 1.0 - h).unwrap()) / (2.0 * h);
        let rel = (d + s).abs() / s.abs();
        worst = if rel.is_nan() { f64::NAN } else { worst.max(rel) };
    }
    outcome(worst <= 1e-4, format!("200 spectra: worst relative error {worst:.1e} (limit 1e-4)"))
}

fn concavity() -> Outcome {
    let ps = [1.1, 2.0, 3.0, 7.0];
    let r = concavity_grid(&ps, 2000, 1e-9);
    // g_p evaluated directly on a second, linear grid
    let mut min_g = f64::INFINITY;
    for &p in &[2.0, 3.0, 7.0] {
        for j in 0..=5000 {
            let x = 1.0 + 1e-3 + (50.0 - 1.0 - 1e-3) * j as f64 / 5000.0;
            min_g = min_g.min(g_p(x, p));
        }
    }
    outcome(
        r.pass && min_g >= 0.0,
        format!(
            "{} grid points: max second difference {:.2e} (limit 1e-9), min g_p {min_g:.3}",
            r.points, r.worst_second_difference
        ),
    )
}

fn theorem1() -> Outcome {
    let tol = Tolerances::default();
    let r = campaign::theorem1(4, (1.0, 5.0), 10_000, SEED, &tol, Negate(false)).unwrap();
    outcome(
        r.pass && r.trials == 10_000 && tol.prefix_abs == 1e-9,
        format!("{} trials: {} failures, worst margin {:.2e}", r.trials, r.failures, r.worst_margin),
    )
}

fn lemma1() -> Outcome {
    let tol = Tolerances::default();
    let r = campaign::lemma1(3, 100, 10_000, SEED, &tol, Negate(false)).unwrap();
    outcome(
        r.pass && r.worst_witness_gap <= 1e-8,
        format!(
            "100 instances, {} (A, k) checks × 10^4 samples: {} violations, worst witness gap {:.1e}",
            r.checks, r.failures, r.worst_witness_gap
        ),
    )
}

fn closed_forms() -> Outcome {
    let tol = Tolerances::default();
    let classical = GaussianChannel::classical_noise(Matrix::from_diag(&[2.0, 2.0]), &tol).unwrap();
    let thermal = GaussianChannel::thermal_noise(&[0.5], &[1.0], &tol).unwrap();
    let s_expected = 2.0 * std::f64::consts::LN_2;
    let mut pass = (min_output_fp_closed(&classical, 2.0).unwrap() - 12.0).abs() <= 1e-12
        && (min_output_entropy(&classical).unwrap() - s_expected).abs() <= 1e-12
        && (min_output_fp_closed(&thermal, 2.0).unwrap() - 8.0).abs() <= 1e-12;
    let searches = [
        (numeric_inf_fp(&classical, 2.0, 20_000, SEED).unwrap(), 12.0),
        (numeric_min_output_entropy(&classical, 20_000, SEED).unwrap(), s_expected),
        (numeric_inf_fp(&thermal, 2.0, 20_000, SEED).unwrap(), 8.0),
    ];
    let mut detail = Vec::new();
    for (r, target) in &searches {
        let gap = r.best_value - target;
        // the search evaluates the objective at real inputs, so only
        // rounding can place it below the optimum
        pass &= (0.0..=1e-6).contains(&(gap + 1e-12 * target));
        detail.push(format!("{gap:.1e}"));
    }
    outcome(
        pass,
        format!("F_2 = 12, S_min = 2 ln 2, F_2 = 8; search gaps [{}] (limit 1e-6)", detail.join(", ")),
    )
}

fn multiplicativity() -> Outcome {
    let tol = Tolerances::default();
    let pairs = campaign::builtin_pairs(&tol).unwrap();
    let records = campaign::multiplicativity(&pairs, &[2.0, 3.0], 20_000, SEED, &tol, Negate(false)).unwrap();
    let worst_excess = records.iter().map(|r| r.excess).fold(f64::INFINITY, f64::min);
    let worst_witness = records
        .iter()
        .map(|r| (r.witness_value - r.product).abs())
        .fold(0.0, f64::max);
    let pass = pairs.len() >= 5 && records.iter().all(|r| r.pass) && worst_excess >= -1e-6 && worst_witness <= 1e-6;
    outcome(
        pass,
        format!(
            "{} pairs × p ∈ {{2, 3}}: min search excess {worst_excess:.1e}, max witness gap {worst_witness:.1e} (limit 1e-6)",
            pairs.len()
        ),
    )
}

fn capacity() -> Outcome {
    let id = GaussianChannel::identity(1).unwrap();
    let cap = |e: f64| gaussian_holevo_capacity(&id, &EnergyBudget::new(e, vec![1.0]).unwrap(), 20_000, SEED).unwrap();
    let at = cap(1.5);
    let err = (at.capacity - 2.0 * std::f64::consts::LN_2).abs();
    let infeasible = cap(0.3);
    let grid: Vec<f64> = (0..10).map(|i| 0.5 + 0.5 * i as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&e| cap(e).capacity).collect();
    let monotone = values.windows(2).all(|w| w[1] >= w[0]);
    let pass = err <= 1e-3 && infeasible.capacity == 0.0 && infeasible.infeasible && monotone;
    outcome(
        pass,
        format!(
            "C(1.5) error {err:.1e} (limit 1e-3), infeasible C = {}, nondecreasing on 10 points: {monotone}",
            infeasible.capacity
        ),
    )
}

fn schur() -> Outcome {
    let r = campaign::schur(8, 1000, SEED, &Tolerances::default(), Negate(false)).unwrap();
    outcome(
        r.pass && r.trials == 1000,
        format!("{} matrices: {} failures, worst margin {:.1e}", r.trials, r.failures, r.worst_margin),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("symplectic core suite", symplectic_core),
        ("unitary isomorphism", isomorphism),
        ("entropy as p-derivative", entropy_derivative),
        ("ln f_p concavity", concavity),
        ("weak supermajorization campaign", theorem1),
        ("symplectic trace bound campaign", lemma1),
        ("closed-form optima", closed_forms),
        ("multiplicativity", multiplicativity),
        ("capacity", capacity),
        ("Schur diagonal majorization", schur),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "[{verdict}] {:>2} {name}: {} [{:.2} s]",
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
        failed += (!o.pass) as usize;
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
