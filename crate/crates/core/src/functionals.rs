//! Channel figures of merit: output p-norms, minimal output entropy and the
//! energy-constrained Gaussian Holevo capacity, with closed forms for
//! classical- and thermal-noise channels and numeric searches for the rest.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::channel::GaussianChannel;
use crate::error::{invalid, Error, Result};
use crate::linalg::{sym_eigenvalues, Matrix};
use crate::optimize::{minimize, NelderMeadOptions};
use crate::param::{mixed_covariance, mixed_dimension, pure_covariance, pure_dimension, MixedCandidate};
use crate::state::{f_p_raw, ln_product_fp, product_fp, von_neumann_entropy};
use crate::tolerance::Tolerances;
use crate::williamson::symplectic_eigenvalues;

/// Mean-energy budget `ℰ` over modes with frequencies `ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyBudget {
    total: f64,
    omega: Vec<f64>,
}

impl EnergyBudget {
    pub fn new(total: f64, omega: Vec<f64>) -> Result<Self> {
        if omega.is_empty() {
            return Err(invalid("omega", "must be nonempty"));
        }
        if let Some(w) = omega.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(invalid("omega", alloc::format!("frequencies must be positive, got {w}")));
        }
        if !total.is_finite() {
            return Err(invalid("energy", alloc::format!("must be finite, got {total}")));
        }
        Ok(Self { total, omega })
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn modes(&self) -> usize {
        self.omega.len()
    }

    /// `Σ ω_k / 2`, the vacuum energy.
    pub fn zero_point(&self) -> f64 {
        0.5 * self.omega.iter().sum::<f64>()
    }

    pub fn is_feasible(&self) -> bool {
        self.total >= self.zero_point()
    }

    /// True when only the vacuum meets the budget.
    fn at_boundary(&self) -> bool {
        let zp = self.zero_point();
        (self.total - zp).abs() <= 1e-12 * zp.max(1.0)
    }
}

fn closed_form_spectrum(ch: &GaussianChannel) -> Result<Vec<f64>> {
    ch.optimal_output_spectrum().ok_or(Error::UnsupportedKind {
        kind: ch.kind().name(),
    })
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(invalid("p", alloc::format!("must be > 1, got {p}")));
    }
    Ok(())
}

/// `inf F_p` over pure Gaussian inputs, from the closed form.
pub fn min_output_fp_closed(ch: &GaussianChannel, p: f64) -> Result<f64> {
    check_p(p)?;
    product_fp(&closed_form_spectrum(ch)?, p)
}

/// `ξ_p = 2ⁿ / (inf F_p)^{1/p}`.
pub fn max_output_p_norm(ch: &GaussianChannel, p: f64) -> Result<f64> {
    check_p(p)?;
    let ln_f = ln_product_fp(&closed_form_spectrum(ch)?, p)?;
    Ok((ch.modes() as f64 * core::f64::consts::LN_2 - ln_f / p).exp())
}

/// Closed-form minimal output entropy in nats.
pub fn min_output_entropy(ch: &GaussianChannel) -> Result<f64> {
    von_neumann_entropy(&closed_form_spectrum(ch)?)
}

/// Outcome of a numeric search.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationReport {
    pub best_value: f64,
    /// Input covariance at the best value.
    pub argument: Matrix,
    pub evaluations: usize,
    pub budget: usize,
    pub restarts: usize,
    pub converged: bool,
    pub closed_form: Option<f64>,
    /// `best_value − closed_form`.
    pub gap: Option<f64>,
}

fn options(budget: usize) -> Result<NelderMeadOptions> {
    if budget == 0 {
        return Err(invalid("budget", "must be positive"));
    }
    Ok(NelderMeadOptions {
        budget,
        ..NelderMeadOptions::default()
    })
}

fn output_spectrum(ch: &GaussianChannel, gamma: &Matrix) -> Option<Vec<f64>> {
    symplectic_eigenvalues(&ch.apply_covariance(gamma))
        .ok()
        .map(|s| s.into_values())
}

/// Minimizes `objective(ν(φ(γ)))` over pure inputs.
fn pure_search(
    ch: &GaussianChannel,
    budget: usize,
    seed: u64,
    objective: impl Fn(&[f64]) -> Result<f64>,
) -> Result<(f64, Matrix, crate::optimize::Minimum)> {
    let n = ch.modes();
    let opts = options(budget)?;
    let f = |x: &[f64]| {
        output_spectrum(ch, &pure_covariance(n, x))
            .and_then(|nu| objective(&nu).ok())
            .unwrap_or(f64::INFINITY)
    };
    let m = minimize(f, &vec![0.0; pure_dimension(n)], &opts, seed)?;
    let arg = pure_covariance(n, &m.x);
    Ok((m.value, arg, m))
}

/// Searches pure inputs (entangled ones included) for the smallest `F_p`
/// of the output. Works for any channel; the gap is reported when a closed
/// form exists.
pub fn numeric_inf_fp(ch: &GaussianChannel, p: f64, budget: usize, seed: u64) -> Result<OptimizationReport> {
    check_p(p)?;
    let (ln_best, argument, m) = pure_search(ch, budget, seed, |nu| ln_product_fp(nu, p))?;
    let best_value = ln_best.exp();
    let closed_form = min_output_fp_closed(ch, p).ok();
    Ok(OptimizationReport {
        best_value,
        argument,
        evaluations: m.evaluations,
        budget,
        restarts: m.restarts,
        converged: m.converged,
        gap: closed_form.map(|c| best_value - c),
        closed_form,
    })
}

/// Searches pure inputs for the smallest output entropy.
pub fn numeric_min_output_entropy(ch: &GaussianChannel, budget: usize, seed: u64) -> Result<OptimizationReport> {
    let (best_value, argument, m) = pure_search(ch, budget, seed, von_neumann_entropy)?;
    let closed_form = min_output_entropy(ch).ok();
    Ok(OptimizationReport {
        best_value,
        argument,
        evaluations: m.evaluations,
        budget,
        restarts: m.restarts,
        converged: m.converged,
        gap: closed_form.map(|c| best_value - c),
        closed_form,
    })
}

fn check_budget_modes(ch: &GaussianChannel, energy: &EnergyBudget) -> Result<()> {
    if energy.modes() != ch.modes() {
        return Err(Error::DimensionMismatch {
            expected: ch.modes(),
            found: energy.modes(),
        });
    }
    Ok(())
}

/// `sup S(φ(γ))` over physical `γ` with mean energy `ℰ`.
///
/// Infeasible budgets return [`Error::InfeasibleEnergy`]. At the zero-point
/// energy only the vacuum is admissible and no search is run. Otherwise the
/// search runs over the mixed family of [`crate::param`], where every
/// feasible candidate meets the energy exactly and candidates whose pure
/// part alone is too energetic score their energy excess (a positive number,
/// worse than any feasible `−S ≤ 0`).
pub fn max_output_entropy_under_energy(
    ch: &GaussianChannel,
    energy: &EnergyBudget,
    budget: usize,
    seed: u64,
) -> Result<OptimizationReport> {
    check_budget_modes(ch, energy)?;
    let opts = options(budget)?;
    let n = ch.modes();
    if !energy.is_feasible() && !energy.at_boundary() {
        return Err(Error::InfeasibleEnergy {
            energy: energy.total(),
            zero_point: energy.zero_point(),
        });
    }
    if energy.at_boundary() {
        let argument = Matrix::identity(2 * n);
        let value = output_spectrum(ch, &argument)
            .map(|nu| von_neumann_entropy(&nu))
            .ok_or(Error::Numerical {
                context: "vacuum output",
                residual: f64::NAN,
            })??;
        return Ok(OptimizationReport {
            best_value: value,
            argument,
            evaluations: 1,
            budget,
            restarts: 0,
            converged: true,
            closed_form: None,
            gap: None,
        });
    }
    let f = |x: &[f64]| match mixed_covariance(n, x, energy) {
        MixedCandidate::Feasible(g) => output_spectrum(ch, &g)
            .and_then(|nu| von_neumann_entropy(&nu).ok())
            .map(|s| -s)
            .unwrap_or(f64::INFINITY),
        MixedCandidate::Infeasible { excess } => excess,
    };
    let m = minimize(f, &vec![0.0; mixed_dimension(n)], &opts, seed)?;
    let argument = match mixed_covariance(n, &m.x, energy) {
        MixedCandidate::Feasible(g) => g,
        MixedCandidate::Infeasible { excess } => {
            return Err(Error::Numerical {
                context: "energy search ended infeasible",
                residual: excess,
            })
        }
    };
    Ok(OptimizationReport {
        best_value: -m.value,
        argument,
        evaluations: m.evaluations,
        budget,
        restarts: m.restarts,
        converged: m.converged,
        closed_form: None,
        gap: None,
    })
}

/// Energy-constrained Gaussian Holevo capacity `sup S(φ(γ̄)) − S_min`.
#[derive(Clone, Debug, PartialEq)]
pub struct CapacityReport {
    /// In nats; exactly 0 for infeasible budgets.
    pub capacity: f64,
    pub infeasible: bool,
    pub max_output_entropy: Option<OptimizationReport>,
    pub s_min: Option<f64>,
    pub s_min_closed_form: bool,
    pub s_min_search: Option<OptimizationReport>,
    /// Implied modulation covariance `Y_μ = γ̄ − γ*`, where `γ*` is the
    /// minimal-entropy input.
    pub modulation: Option<Matrix>,
    pub modulation_min_eigenvalue: Option<f64>,
}

/// Capacity with `S_min` from the closed form when available and from a
/// pure-state search (seeded with `seed + 1`) otherwise.
///
/// The reported value is clamped at 0: both terms are searched over nested
/// families, so a negative difference can only be search error.
pub fn gaussian_holevo_capacity(
    ch: &GaussianChannel,
    energy: &EnergyBudget,
    budget: usize,
    seed: u64,
) -> Result<CapacityReport> {
    check_budget_modes(ch, energy)?;
    options(budget)?;
    if !energy.is_feasible() && !energy.at_boundary() {
        return Ok(CapacityReport {
            capacity: 0.0,
            infeasible: true,
            max_output_entropy: None,
            s_min: None,
            s_min_closed_form: false,
            s_min_search: None,
            modulation: None,
            modulation_min_eigenvalue: None,
        });
    }
    let (s_min, witness, search) = match min_output_entropy(ch) {
        Ok(s) => (s, ch.optimal_input()?, None),
        Err(Error::UnsupportedKind { .. }) => {
            let r = numeric_min_output_entropy(ch, budget, seed.wrapping_add(1))?;
            (r.best_value, r.argument.clone(), Some(r))
        }
        Err(e) => return Err(e),
    };
    let sup = max_output_entropy_under_energy(ch, energy, budget, seed)?;
    let modulation = &sup.argument - &witness;
    let min_eig = sym_eigenvalues(&modulation.symmetrized())[0];
    Ok(CapacityReport {
        capacity: (sup.best_value - s_min).max(0.0),
        infeasible: false,
        s_min: Some(s_min),
        s_min_closed_form: search.is_none(),
        s_min_search: search,
        max_output_entropy: Some(sup),
        modulation: Some(modulation),
        modulation_min_eigenvalue: Some(min_eig),
    })
}

/// Comparison of the joint `inf F_p` against the product of single-channel
/// optima.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicativityReport {
    pub p: f64,
    /// Closed-form `inf F_p` of each factor.
    pub factors: Vec<f64>,
    pub product: f64,
    /// Best value found over (possibly entangled) joint pure inputs.
    pub numeric_best: f64,
    /// `F_p` at the product of the factors' optimal inputs.
    pub witness_value: f64,
    pub search: OptimizationReport,
    pub pass: bool,
}

/// Passes iff no joint input beats the product by more than `tol.opt` and
/// the separable witness attains the product within `tol.opt`.
pub fn multiplicativity_check(
    channels: &[GaussianChannel],
    p: f64,
    budget: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<MultiplicativityReport> {
    if channels.len() < 2 {
        return Err(invalid("channels", "need at least two channels"));
    }
    let factors = channels
        .iter()
        .map(|c| min_output_fp_closed(c, p))
        .collect::<Result<Vec<_>>>()?;
    let product: f64 = factors.iter().product();
    let joint = GaussianChannel::tensor(channels)?;
    let search = numeric_inf_fp(&joint, p, budget, seed)?;

    let inputs = channels
        .iter()
        .map(|c| c.optimal_input())
        .collect::<Result<Vec<_>>>()?;
    let witness = Matrix::direct_sum(&inputs.iter().collect::<Vec<_>>());
    let nu = output_spectrum(&joint, &witness).ok_or(Error::Numerical {
        context: "witness output",
        residual: f64::NAN,
    })?;
    let witness_value = product_fp(&nu, p)?;

    let numeric_best = search.best_value;
    let pass = numeric_best >= product - tol.opt && (witness_value - product).abs() <= tol.opt;
    Ok(MultiplicativityReport {
        p,
        factors,
        product,
        numeric_best,
        witness_value,
        search,
        pass,
    })
}

/// One energy split and the sum of single-channel capacities it yields.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitPoint {
    pub energies: Vec<f64>,
    pub capacity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdditivityReport {
    pub joint: CapacityReport,
    pub grid: Vec<SplitPoint>,
    pub best_split: SplitPoint,
    /// `joint − best_split`.
    pub gap: f64,
    pub pass: bool,
}

/// All ways to write `total` as an ordered sum of `parts` nonnegative integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Compares the joint capacity of `⊗Φ_j` at total energy `ℰ` against the
/// best sum `Σ C(Φ_j, ℰ_j)` over energy splits.
///
/// Splits share the energy above the zero points on a uniform grid with
/// `grid_points` values per split dimension. For two channels the best grid
/// cell is then refined by golden-section search. Passes iff the joint value
/// and the best split agree within `tol.opt_sup`.
pub fn additivity_check(
    channels: &[GaussianChannel],
    omegas: &[Vec<f64>],
    total_energy: f64,
    grid_points: usize,
    budget: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<AdditivityReport> {
    if channels.len() < 2 {
        return Err(invalid("channels", "need at least two channels"));
    }
    if omegas.len() != channels.len() {
        return Err(Error::DimensionMismatch {
            expected: channels.len(),
            found: omegas.len(),
        });
    }
    if grid_points < 2 {
        return Err(invalid("grid_points", "need at least two points"));
    }
    for c in channels {
        closed_form_spectrum(c)?;
    }
    let budgets = omegas
        .iter()
        .map(|w| EnergyBudget::new(0.0, w.clone()))
        .collect::<Result<Vec<_>>>()?;
    let zero_points: Vec<f64> = budgets.iter().map(|b| b.zero_point()).collect();
    let spare = total_energy - zero_points.iter().sum::<f64>();

    let joint_channel = GaussianChannel::tensor(channels)?;
    let joint_budget = EnergyBudget::new(total_energy, omegas.concat())?;
    let joint = gaussian_holevo_capacity(&joint_channel, &joint_budget, budget, seed)?;

    let split_value = |fractions: &[f64]| -> Result<SplitPoint> {
        let mut energies = Vec::with_capacity(channels.len());
        let mut capacity = 0.0;
        for ((c, w), (zp, f)) in channels
            .iter()
            .zip(omegas)
            .zip(zero_points.iter().zip(fractions))
        {
            let e = zp + spare.max(0.0) * f;
            let b = EnergyBudget::new(e, w.clone())?;
            capacity += gaussian_holevo_capacity(c, &b, budget, seed)?.capacity;
            energies.push(e);
        }
        Ok(SplitPoint { energies, capacity })
    };

    let steps = grid_points - 1;
    let mut grid = Vec::new();
    for comp in compositions(steps, channels.len()) {
        let fractions: Vec<f64> = comp.iter().map(|&k| k as f64 / steps as f64).collect();
        grid.push(split_value(&fractions)?);
    }
    let mut best_split = grid
        .iter()
        .cloned()
        .reduce(|a, b| if b.capacity > a.capacity { b } else { a })
        .expect("grid is nonempty");

    if channels.len() == 2 && spare > 0.0 {
        let h = 1.0 / steps as f64;
        let f0 = (best_split.energies[0] - zero_points[0]) / spare;
        let (mut lo, mut hi) = ((f0 - h).max(0.0), (f0 + h).min(1.0));
        let ratio = 0.5 * (5.0.sqrt() - 1.0);
        let eval = |f: f64| split_value(&[f, 1.0 - f]);
        let mut a = hi - ratio * (hi - lo);
        let mut b = lo + ratio * (hi - lo);
        let mut pa = eval(a)?;
        let mut pb = eval(b)?;
        for _ in 0..24 {
            if pa.capacity >= pb.capacity {
                hi = b;
                b = a;
                pb = pa;
                a = hi - ratio * (hi - lo);
                pa = eval(a)?;
            } else {
                lo = a;
                a = b;
                pa = pb;
                b = lo + ratio * (hi - lo);
                pb = eval(b)?;
            }
        }
        for cand in [pa, pb] {
            if cand.capacity > best_split.capacity {
                best_split = cand;
            }
        }
    }

    let gap = joint.capacity - best_split.capacity;
    Ok(AdditivityReport {
        pass: gap.abs() <= tol.opt_sup,
        joint,
        grid,
        best_split,
        gap,
    })
}

/// `Σ_j S(φ(γ)_j) − S(φ(γ))` for the tensor product of `channels`, where
/// `φ(γ)_j` is the principal block of factor `j`. Nonnegative by
/// subadditivity of the von Neumann entropy.
pub fn subadditivity_gap(channels: &[GaussianChannel], gamma: &Matrix) -> Result<f64> {
    let joint = GaussianChannel::tensor(channels)?;
    if gamma.rows() != 2 * joint.modes() {
        return Err(Error::DimensionMismatch {
            expected: 2 * joint.modes(),
            found: gamma.rows(),
        });
    }
    let out = joint.apply_covariance(gamma);
    let total = von_neumann_entropy(symplectic_eigenvalues(&out)?.values())?;
    let mut marginals = 0.0;
    let mut offset = 0;
    for c in channels {
        let k = 2 * c.modes();
        let block = out.submatrix(offset, offset, k, k);
        marginals += von_neumann_entropy(symplectic_eigenvalues(&block)?.values())?;
        offset += k;
    }
    Ok(marginals - total)
}

/// Second central difference of `ln f_p` at `x`, in the cancellation-free
/// form `ln(f(x+h) f(x−h) / f(x)²) / h²` with `h = min(10⁻³x, (x−1)/2)`.
pub fn ln_fp_second_difference(x: f64, p: f64) -> f64 {
    let h = (1e-3 * x).min(0.5 * (x - 1.0));
    let fx = f_p_raw(x, p);
    let up = f_p_raw(x + h, p) / fx;
    let down = f_p_raw(x - h, p) / fx;
    (up * down).ln() / (h * h)
}

/// `g_p(x) = 4p(x² − 1)^{p−2} + f_p(x) f_{p−2}(x)`; `d²/dx² ln f_p = −p g_p / f_p²`.
pub fn g_p(x: f64, p: f64) -> f64 {
    4.0 * p * (x * x - 1.0).powf(p - 2.0) + f_p_raw(x, p) * f_p_raw(x, p - 2.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConcavityReport {
    pub points: usize,
    pub failures: usize,
    /// Largest second difference seen, with its `(x, p)`.
    pub worst_second_difference: f64,
    pub worst_at: (f64, f64),
    /// Smallest `g_p` over the grid points with `p ≥ 2`.
    pub min_g: Option<f64>,
    pub g_failures: usize,
    pub pass: bool,
}

/// The `(x, p)` grid used by [`concavity_grid`]: `x − 1` geometric on
/// `[10⁻³, 49]`.
pub fn concavity_xs(points: usize) -> Vec<f64> {
    let (lo, hi) = (1e-3f64, 49.0f64);
    (0..points)
        .map(|i| {
            let t = if points == 1 { 0.0 } else { i as f64 / (points - 1) as f64 };
            1.0 + (lo.ln() + t * (hi.ln() - lo.ln())).exp()
        })
        .collect()
}

/// Checks that `ln f_p` is concave on the grid (second difference ≤ `tol`)
/// and that `g_p ≥ 0` wherever `p ≥ 2`.
pub fn concavity_grid(ps: &[f64], points: usize, tol: f64) -> ConcavityReport {
    let xs = concavity_xs(points);
    let mut failures = 0;
    let mut g_failures = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_at = (f64::NAN, f64::NAN);
    let mut min_g: Option<f64> = None;
    for &p in ps {
        for &x in &xs {
            let d2 = ln_fp_second_difference(x, p);
            if !(d2 <= tol) {
                failures += 1;
            }
            if d2 > worst || d2.is_nan() {
                worst = d2;
                worst_at = (x, p);
            }
            if p >= 2.0 {
                let g = g_p(x, p);
                min_g = Some(min_g.map_or(g, |m| m.min(g)));
                if !(g >= 0.0) {
                    g_failures += 1;
                }
            }
        }
    }
    ConcavityReport {
        points: xs.len() * ps.len(),
        failures,
        worst_second_difference: worst,
        worst_at,
        min_g,
        g_failures,
        pass: failures == 0 && g_failures == 0,
    }
}
