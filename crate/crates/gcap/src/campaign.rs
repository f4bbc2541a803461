//! Parallel verification campaigns.
//!
//! Every trial derives its instance from `(seed, index)` alone, and
//! [`TrialReport::merge`] is associative with an order-independent result,
//! so reports do not depend on how rayon splits the work.

use gcap_core::functionals::{
    additivity_check, concavity_grid, multiplicativity_check, subadditivity_gap, AdditivityReport, ConcavityReport,
    MultiplicativityReport,
};
use gcap_core::majorization::{
    lemma1_bound, lemma1_instance, lemma1_margin, lemma1_sample_trace, lemma1_witness, schur_instance, schur_margin,
    theorem1_instance, theorem1_margin, TrialReport, NEAR_ATTAINMENT,
};
use gcap_core::symplectic::random_covariance;
use gcap_core::{GaussianChannel, Matrix, Tolerances};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;

/// Test-only corruption of a check: every margin `m` becomes `−m − 1`, and
/// verdict-style checks are inverted. Used to prove the harness can fail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Negate(pub bool);

impl Negate {
    fn margin(self, m: f64) -> f64 {
        if self.0 {
            -m - 1.0
        } else {
            m
        }
    }

    fn verdict(self, pass: bool) -> bool {
        pass != self.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub index: u64,
    pub margin: f64,
    pub instance: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trials: u64,
    pub failures: u64,
    pub worst_margin: f64,
    pub near_attainers: u64,
    pub seed: u64,
    pub counterexample: Option<Counterexample>,
    pub pass: bool,
}

impl TrialRecord {
    fn from_report(r: &TrialReport, instance: impl FnOnce(u64) -> Result<Value>) -> Result<Self> {
        let counterexample = match r.counterexample {
            Some((index, margin)) => Some(Counterexample {
                index,
                margin,
                instance: instance(index)?,
            }),
            None => None,
        };
        Ok(Self {
            trials: r.trials,
            failures: r.failures,
            worst_margin: r.worst_margin,
            near_attainers: r.near_attainers,
            seed: r.seed,
            counterexample,
            pass: r.passed(),
        })
    }
}

fn matrix_value(m: &Matrix) -> Value {
    json!({"rows": m.rows(), "data": m.as_slice()})
}

fn parallel_trials<F>(trials: u64, seed: u64, tol: &Tolerances, near_band: f64, margin: F) -> Result<TrialReport>
where
    F: Fn(u64) -> gcap_core::Result<f64> + Sync,
{
    let report = (0..trials)
        .into_par_iter()
        .map(|i| -> gcap_core::Result<TrialReport> {
            Ok(TrialReport::single(seed, i, margin(i)?, tol.prefix_abs, near_band))
        })
        .try_reduce(|| TrialReport::empty(seed), |a, b| Ok(a.merge(b)))?;
    Ok(report)
}

/// `ν(A + B) ≺^w ν(A) + ν(B)` over `trials` random pairs.
pub fn theorem1(
    max_modes: usize,
    nu_range: (f64, f64),
    trials: u64,
    seed: u64,
    tol: &Tolerances,
    negate: Negate,
) -> Result<TrialRecord> {
    let report = parallel_trials(trials, seed, tol, NEAR_ATTAINMENT, |i| {
        let (a, b) = theorem1_instance(max_modes, nu_range, seed, i)?;
        Ok(negate.margin(theorem1_margin(&a, &b, tol)?))
    })?;
    TrialRecord::from_report(&report, |i| {
        let (a, b) = theorem1_instance(max_modes, nu_range, seed, i)?;
        Ok(json!({"a": matrix_value(&a), "b": matrix_value(&b)}))
    })
}

/// `diag(H) ≺ λ(H)` over `trials` random Hermitian matrices.
pub fn schur(max_n: usize, trials: u64, seed: u64, tol: &Tolerances, negate: Negate) -> Result<TrialRecord> {
    // the full sums always agree, so near-attainment carries no information
    let report = parallel_trials(trials, seed, tol, f64::NEG_INFINITY, |i| {
        Ok(negate.margin(schur_margin(&schur_instance(max_n, seed, i)?, tol)?))
    })?;
    TrialRecord::from_report(&report, |i| {
        let h = schur_instance(max_n, seed, i)?;
        let re: Vec<f64> = h.as_slice().iter().map(|z| z.re).collect();
        let im: Vec<f64> = h.as_slice().iter().map(|z| z.im).collect();
        Ok(json!({"n": h.rows(), "re": re, "im": im}))
    })
}

/// Seed of the sample stream for instance `instance` and truncation `k`.
pub fn lemma1_sample_seed(seed: u64, instance: u64, k: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(instance.wrapping_mul(64))
        .wrapping_add(k as u64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma1Record {
    pub instance: u64,
    pub modes: usize,
    pub k: usize,
    pub bound: f64,
    pub witness_value: f64,
    pub witness_gap: f64,
    pub samples: TrialRecord,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma1Campaign {
    pub instances: u64,
    pub samples_per_k: u64,
    pub checks: usize,
    pub failures: u64,
    pub worst_margin: f64,
    pub worst_witness_gap: f64,
    pub near_attainers: u64,
    /// Only the failing `(A, k)` checks, to keep passing reports small.
    pub failing: Vec<Lemma1Record>,
    pub pass: bool,
}

/// For each of `instances` random `A` and every `k ≤ n`: the lower bound
/// over `samples` truncated symplectics and the Williamson witness.
pub fn lemma1(
    max_modes: usize,
    instances: u64,
    samples: u64,
    seed: u64,
    tol: &Tolerances,
    negate: Negate,
) -> Result<Lemma1Campaign> {
    let mut checks = Vec::new();
    for inst in 0..instances {
        let a = lemma1_instance(max_modes, seed, inst)?;
        for k in 1..=a.rows() / 2 {
            checks.push((inst, a.clone(), k));
        }
    }
    let records = checks
        .iter()
        .map(|(inst, a, k)| {
            let k = *k;
            let bound = lemma1_bound(a, k, tol)?;
            let witness_value = lemma1_witness(a, k, tol)?;
            let witness_gap = (witness_value - bound).abs() + if negate.0 { 1.0 } else { 0.0 };
            let sample_seed = lemma1_sample_seed(seed, *inst, k);
            let report = parallel_trials(samples, sample_seed, tol, NEAR_ATTAINMENT, |i| {
                let t = lemma1_sample_trace(a, k, sample_seed, i)?;
                Ok(negate.margin(lemma1_margin(t, bound, tol)))
            })?;
            let samples = TrialRecord::from_report(&report, |i| {
                Ok(json!({"a": matrix_value(a), "k": k, "sample_seed": sample_seed, "sample": i}))
            })?;
            let pass = samples.pass && witness_gap <= tol.decomp;
            Ok(Lemma1Record {
                instance: *inst,
                modes: a.rows() / 2,
                k,
                bound,
                witness_value,
                witness_gap,
                samples,
                pass,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = records.iter().map(|r| r.samples.failures).sum();
    let worst_margin = records
        .iter()
        .map(|r| r.samples.worst_margin)
        .fold(f64::INFINITY, f64::min);
    let worst_witness_gap = records.iter().map(|r| r.witness_gap).fold(0.0, f64::max);
    let near_attainers = records.iter().map(|r| r.samples.near_attainers).sum();
    let pass = records.iter().all(|r| r.pass);
    Ok(Lemma1Campaign {
        instances,
        samples_per_k: samples,
        checks: records.len(),
        failures,
        worst_margin,
        worst_witness_gap,
        near_attainers,
        failing: records.into_iter().filter(|r| !r.pass).collect(),
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcavityRecord {
    pub ps: Vec<f64>,
    pub points: usize,
    pub failures: usize,
    pub worst_second_difference: f64,
    pub worst_x: f64,
    pub worst_p: f64,
    pub min_g: Option<f64>,
    pub g_failures: usize,
    pub threshold: f64,
    pub pass: bool,
}

/// Concavity of `ln f_p` on the grid, with second differences compared
/// against `threshold`.
pub fn concavity(ps: &[f64], points: usize, threshold: f64, negate: Negate) -> ConcavityRecord {
    let r: ConcavityReport = concavity_grid(ps, points, threshold);
    ConcavityRecord {
        ps: ps.to_vec(),
        points: r.points,
        failures: r.failures,
        worst_second_difference: r.worst_second_difference,
        worst_x: r.worst_at.0,
        worst_p: r.worst_at.1,
        min_g: r.min_g,
        g_failures: r.g_failures,
        threshold,
        pass: negate.verdict(r.pass),
    }
}

/// Named tensor configuration for the multiplicativity and additivity
/// campaigns.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    pub name: String,
    pub channels: Vec<GaussianChannel>,
    pub omegas: Vec<Vec<f64>>,
}

fn diag(values: &[f64]) -> Matrix {
    Matrix::from_diag(values)
}

/// Built-in tensor pairs of classical and thermal channels.
pub fn builtin_pairs(tol: &Tolerances) -> Result<Vec<Configuration>> {
    let classical = |y: Matrix| GaussianChannel::classical_noise(y, tol);
    let thermal = |eta: f64, nbar: f64| GaussianChannel::thermal_noise(&[eta], &[nbar], tol);
    let pairs = vec![
        ("classical(2,2)+classical(1,1)", vec![classical(diag(&[2.0, 2.0]))?, classical(diag(&[1.0, 1.0]))?]),
        ("thermal(0.5,1)+thermal(0.3,2)", vec![thermal(0.5, 1.0)?, thermal(0.3, 2.0)?]),
        ("classical(2,2)+thermal(0.5,1)", vec![classical(diag(&[2.0, 2.0]))?, thermal(0.5, 1.0)?]),
        (
            "classical([[3,1],[1,1]])+thermal(0.8,0.5)",
            vec![
                classical(Matrix::from_rows(&[[3.0, 1.0], [1.0, 1.0]])?)?,
                thermal(0.8, 0.5)?,
            ],
        ),
        ("thermal(0.7,2)+classical(0.5,3)", vec![thermal(0.7, 2.0)?, classical(diag(&[0.5, 3.0]))?]),
        ("lossy(0.4)+thermal(0.9,0.2)", vec![thermal(0.4, 0.0)?, thermal(0.9, 0.2)?]),
    ];
    Ok(pairs
        .into_iter()
        .map(|(name, channels)| Configuration {
            name: name.to_string(),
            omegas: channels.iter().map(|c| vec![1.0; c.modes()]).collect(),
            channels,
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplicativityRecord {
    pub configuration: String,
    pub p: f64,
    pub factors: Vec<f64>,
    pub product: f64,
    pub numeric_best: f64,
    pub witness_value: f64,
    /// `numeric_best − product`; negative values beat the product.
    pub excess: f64,
    pub evaluations: usize,
    pub budget: usize,
    pub restarts: usize,
    pub converged: bool,
    pub pass: bool,
}

impl MultiplicativityRecord {
    fn new(name: &str, r: &MultiplicativityReport, negate: Negate) -> Self {
        Self {
            configuration: name.to_string(),
            p: r.p,
            factors: r.factors.clone(),
            product: r.product,
            numeric_best: r.numeric_best,
            witness_value: r.witness_value,
            excess: r.numeric_best - r.product,
            evaluations: r.search.evaluations,
            budget: r.search.budget,
            restarts: r.search.restarts,
            converged: r.search.converged,
            pass: negate.verdict(r.pass),
        }
    }
}

/// One joint search per `(configuration, p)`, run in parallel.
pub fn multiplicativity(
    configs: &[Configuration],
    ps: &[f64],
    budget: usize,
    seed: u64,
    tol: &Tolerances,
    negate: Negate,
) -> Result<Vec<MultiplicativityRecord>> {
    let jobs: Vec<(&Configuration, f64)> = configs.iter().flat_map(|c| ps.iter().map(move |&p| (c, p))).collect();
    jobs.par_iter()
        .map(|(c, p)| {
            log::info!("multiplicativity: {} at p = {p}", c.name);
            let r = multiplicativity_check(&c.channels, *p, budget, seed, tol)?;
            Ok(MultiplicativityRecord::new(&c.name, &r, negate))
        })
        .collect()
}

/// Pairs used by the additivity campaign; the first mode of each pair has
/// unit frequency and the second a different one to make the split
/// nontrivial.
pub fn builtin_additivity(tol: &Tolerances) -> Result<Vec<Configuration>> {
    let mut configs = builtin_pairs(tol)?;
    configs.truncate(3);
    for c in &mut configs {
        c.omegas = vec![vec![1.0], vec![1.5]];
    }
    Ok(configs)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdditivityRecord {
    pub configuration: String,
    pub energy: f64,
    pub omegas: Vec<Vec<f64>>,
    pub joint_capacity: f64,
    pub best_split_energies: Vec<f64>,
    pub best_split_capacity: f64,
    pub gap: f64,
    pub grid_points: usize,
    /// Smallest `Σ S(marginal) − S(joint)` over random inputs; nonnegative
    /// by subadditivity.
    pub min_subadditivity_gap: f64,
    pub pass: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn additivity(
    configs: &[Configuration],
    energy: f64,
    grid_points: usize,
    subadditivity_samples: u64,
    budget: usize,
    seed: u64,
    tol: &Tolerances,
    negate: Negate,
) -> Result<Vec<AdditivityRecord>> {
    configs
        .par_iter()
        .map(|c| {
            log::info!("additivity: {} at energy {energy}", c.name);
            let r: AdditivityReport = additivity_check(&c.channels, &c.omegas, energy, grid_points, budget, seed, tol)?;
            let modes: usize = c.channels.iter().map(|ch| ch.modes()).sum();
            let mut min_gap = f64::INFINITY;
            for i in 0..subadditivity_samples {
                let gamma = random_covariance(modes, (1.0, 4.0), seed.wrapping_add(i))?;
                min_gap = min_gap.min(subadditivity_gap(&c.channels, gamma.matrix())?);
            }
            let sub_ok = !(min_gap < -tol.decomp);
            Ok(AdditivityRecord {
                configuration: c.name.clone(),
                energy,
                omegas: c.omegas.clone(),
                joint_capacity: r.joint.capacity,
                best_split_energies: r.best_split.energies.clone(),
                best_split_capacity: r.best_split.capacity,
                gap: r.gap,
                grid_points,
                min_subadditivity_gap: min_gap,
                pass: negate.verdict(r.pass && sub_ok),
            })
        })
        .collect()
}
