//! Majorization predicates and randomized trial harnesses.
//!
//! Prefix sums are compared with an absolute slack `tol.prefix_abs` plus a
//! relative slack `tol.prefix_rel·max(|Σx|, |Σy|)`. Margins returned by the
//! `*_margin` functions already include the relative part, so a check passes
//! exactly when its margin is at least `−tol.prefix_abs`.
//!
//! Each harness is split into an instance generator keyed by
//! `(seed, index)` and a pure margin function, so trials can be run in any
//! order or in parallel and merged with [`TrialReport::merge`].

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg::{CMatrix, Matrix};
use crate::rng::{self, Rng};
use crate::symplectic::{sample_positive_definite, sample_symplectic, truncate_rows, SqueezeLaw};
use crate::tolerance::Tolerances;
use crate::williamson::{symplectic_eigenvalues_with, williamson_with};

fn check_lengths(x: &[f64], y: &[f64]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::InvalidDimension("empty vector".into()));
    }
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(())
}

fn sorted(v: &[f64], descending: bool) -> Vec<f64> {
    let mut s = v.to_vec();
    if descending {
        s.sort_by(|a, b| b.total_cmp(a));
    } else {
        s.sort_by(f64::total_cmp);
    }
    s
}

/// `min_k (Σ_{j≤k} upper_j − Σ_{j≤k} lower_j + rel·scale)` over prefixes.
fn prefix_margin(upper: &[f64], lower: &[f64], tol: &Tolerances, range: core::ops::Range<usize>) -> f64 {
    let (mut su, mut sl) = (0.0, 0.0);
    let mut worst = f64::INFINITY;
    for k in 0..range.end {
        su += upper[k];
        sl += lower[k];
        if k >= range.start {
            let slack = tol.prefix_rel * su.abs().max(sl.abs());
            worst = worst.min(su - sl + slack);
        }
    }
    worst
}

/// Margin of `x ≺^w y`: ascending prefix sums of `x` dominate those of `y`.
pub fn weak_supermajorization_margin(x: &[f64], y: &[f64], tol: &Tolerances) -> Result<f64> {
    check_lengths(x, y)?;
    Ok(prefix_margin(&sorted(x, false), &sorted(y, false), tol, 0..x.len()))
}

/// Margin of `x ≺_w y`: descending prefix sums of `x` are dominated by `y`'s.
pub fn weak_submajorization_margin(x: &[f64], y: &[f64], tol: &Tolerances) -> Result<f64> {
    check_lengths(x, y)?;
    Ok(prefix_margin(&sorted(y, true), &sorted(x, true), tol, 0..x.len()))
}

/// Margin of `x ≺ y`: descending prefixes plus equality of totals.
pub fn majorization_margin(x: &[f64], y: &[f64], tol: &Tolerances) -> Result<f64> {
    check_lengths(x, y)?;
    let n = x.len();
    let (xs, ys) = (sorted(x, true), sorted(y, true));
    let prefixes = if n > 1 {
        prefix_margin(&ys, &xs, tol, 0..n - 1)
    } else {
        f64::INFINITY
    };
    let (tx, ty): (f64, f64) = (xs.iter().sum(), ys.iter().sum());
    let total = -(tx - ty).abs() + tol.prefix_rel * tx.abs().max(ty.abs());
    Ok(prefixes.min(total))
}

pub fn majorize(x: &[f64], y: &[f64], tol: &Tolerances) -> Result<bool> {
    Ok(majorization_margin(x, y, tol)? >= -tol.prefix_abs)
}

/// `x ≺^w y`.
pub fn weak_supermajorize(x: &[f64], y: &[f64], tol: &Tolerances) -> Result<bool> {
    Ok(weak_supermajorization_margin(x, y, tol)? >= -tol.prefix_abs)
}

/// `x ≺_w y`.
pub fn weak_submajorize(x: &[f64], y: &[f64], tol: &Tolerances) -> Result<bool> {
    Ok(weak_submajorization_margin(x, y, tol)? >= -tol.prefix_abs)
}

/// Margin of `diag(H) ≺ λ(H)`.
pub fn schur_margin(h: &CMatrix, tol: &Tolerances) -> Result<f64> {
    if h.rows() != h.cols() || h.rows() == 0 {
        return Err(Error::InvalidDimension(alloc::format!(
            "expected a nonempty square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let residual = h.hermitian_residual();
    let scale = h.as_slice().iter().map(|z| z.norm()).fold(1.0, f64::max);
    if residual > tol.sym * scale {
        return Err(Error::NotHermitian { residual });
    }
    majorization_margin(&h.diagonal_real(), &h.hermitian_eigenvalues(), tol)
}

pub fn schur_diag_check(h: &CMatrix, tol: &Tolerances) -> Result<bool> {
    Ok(schur_margin(h, tol)? >= -tol.prefix_abs)
}

/// Replaces `(x_i, x_j)` by `(λx_i + (1−λ)x_j, λx_j + (1−λ)x_i)`.
pub fn t_transform(x: &mut [f64], i: usize, j: usize, lambda: f64) {
    let (a, b) = (x[i], x[j]);
    x[i] = lambda * a + (1.0 - lambda) * b;
    x[j] = lambda * b + (1.0 - lambda) * a;
}

/// `y` uniform on `[0, 10)ⁿ`; `x` is `y` after `transforms` random
/// T-transforms, so `x ≺ y`.
pub fn sample_majorization_pair<R: Rng + ?Sized>(n: usize, transforms: usize, rng: &mut R) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidDimension("length must be positive".into()));
    }
    let y: Vec<f64> = (0..n).map(|_| 10.0 * rng.random::<f64>()).collect();
    let mut x = y.clone();
    if n > 1 {
        for _ in 0..transforms {
            let i = rng.random_range(0..n);
            let j = (i + rng.random_range(1..n)) % n;
            let lambda: f64 = rng.random();
            t_transform(&mut x, i, j, lambda);
        }
    }
    Ok((x, y))
}

pub fn random_majorization_pair(n: usize, transforms: usize, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    sample_majorization_pair(n, transforms, &mut rng::stream(seed, 0))
}

/// Mergeable summary of a trial campaign.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialReport {
    pub trials: u64,
    pub failures: u64,
    /// Smallest margin seen; `+∞` for an empty report.
    pub worst_margin: f64,
    pub seed: u64,
    /// Smallest failing trial index and its margin.
    pub counterexample: Option<(u64, f64)>,
    /// Trials whose margin fell inside the near-attainment band.
    pub near_attainers: u64,
}

impl TrialReport {
    pub fn empty(seed: u64) -> Self {
        Self {
            trials: 0,
            failures: 0,
            worst_margin: f64::INFINITY,
            seed,
            counterexample: None,
            near_attainers: 0,
        }
    }

    /// Report for a single trial. A trial fails when `margin < −tol_abs`
    /// (or is NaN); it is a near-attainer when not failing and
    /// `margin ≤ near_band`.
    pub fn single(seed: u64, index: u64, margin: f64, tol_abs: f64, near_band: f64) -> Self {
        let failed = !(margin >= -tol_abs);
        Self {
            trials: 1,
            failures: failed as u64,
            worst_margin: margin,
            seed,
            counterexample: failed.then_some((index, margin)),
            near_attainers: (!failed && margin <= near_band) as u64,
        }
    }

    pub fn merge(self, other: Self) -> Self {
        let counterexample = match (self.counterexample, other.counterexample) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        Self {
            trials: self.trials + other.trials,
            failures: self.failures + other.failures,
            worst_margin: if self.worst_margin.is_nan() || other.worst_margin.is_nan() {
                f64::NAN
            } else {
                self.worst_margin.min(other.worst_margin)
            },
            seed: self.seed,
            counterexample,
            near_attainers: self.near_attainers + other.near_attainers,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Squeezing range of the Euler factors used to draw random positive
/// matrices in the weak-supermajorization harness.
pub const THEOREM1_SQUEEZE_MAX: f64 = 4.0;

/// Trial `index`: mode count uniform in `1..=max_modes`, then `A` and `B`
/// positive definite with symplectic spectra uniform in `nu_range`.
pub fn theorem1_instance(max_modes: usize, nu_range: (f64, f64), seed: u64, index: u64) -> Result<(Matrix, Matrix)> {
    if max_modes == 0 {
        return Err(invalid("max_modes", "must be positive"));
    }
    let mut r = rng::stream(seed, index);
    let n = r.random_range(1..=max_modes);
    let law = SqueezeLaw::Uniform {
        max: THEOREM1_SQUEEZE_MAX,
    };
    let a = sample_positive_definite(n, nu_range, law, &mut r)?;
    let b = sample_positive_definite(n, nu_range, law, &mut r)?;
    Ok((a, b))
}

/// Margin of `ν(A + B) ≺^w ν↑(A) + ν↑(B)`.
pub fn theorem1_margin(a: &Matrix, b: &Matrix, tol: &Tolerances) -> Result<f64> {
    let na = symplectic_eigenvalues_with(a, tol)?;
    let nb = symplectic_eigenvalues_with(b, tol)?;
    let nab = symplectic_eigenvalues_with(&(a + b), tol)?;
    let sum: Vec<f64> = na.values().iter().zip(nb.values()).map(|(x, y)| x + y).collect();
    weak_supermajorization_margin(nab.values(), &sum, tol)
}

/// Band (absolute) inside which a margin counts as attaining the bound.
pub const NEAR_ATTAINMENT: f64 = 1e-6;

pub fn theorem1_trial(max_modes: usize, nu_range: (f64, f64), trials: u64, seed: u64, tol: &Tolerances) -> Result<TrialReport> {
    if trials == 0 {
        return Err(invalid("trials", "must be positive"));
    }
    let mut report = TrialReport::empty(seed);
    for i in 0..trials {
        let (a, b) = theorem1_instance(max_modes, nu_range, seed, i)?;
        let m = theorem1_margin(&a, &b, tol)?;
        report = report.merge(TrialReport::single(seed, i, m, tol.prefix_abs, NEAR_ATTAINMENT));
    }
    Ok(report)
}

/// Squeezing range for sampled truncated symplectics; squeezings are
/// log-uniform on `[1, LEMMA1_SQUEEZE_MAX]`.
pub const LEMMA1_SQUEEZE_MAX: f64 = 8.0;

/// Symplectic spectral range of the random matrices `A` in trace-bound campaigns.
pub const LEMMA1_NU_RANGE: (f64, f64) = (0.5, 5.0);

/// A random positive-definite `A` for campaign instance `index`.
pub fn lemma1_instance(max_modes: usize, seed: u64, index: u64) -> Result<Matrix> {
    if max_modes == 0 {
        return Err(invalid("max_modes", "must be positive"));
    }
    let mut r = rng::stream(seed, index);
    let n = r.random_range(1..=max_modes);
    sample_positive_definite(n, LEMMA1_NU_RANGE, SqueezeLaw::Uniform { max: THEOREM1_SQUEEZE_MAX }, &mut r)
}

/// `2 Σ_{j≤k} ν↑_j(A)`.
pub fn lemma1_bound(a: &Matrix, k: usize, tol: &Tolerances) -> Result<f64> {
    let nu = symplectic_eigenvalues_with(a, tol)?;
    if k == 0 || k > nu.len() {
        return Err(invalid("k", alloc::format!("must lie in 1..={}, got {k}", nu.len())));
    }
    Ok(2.0 * nu.values()[..k].iter().sum::<f64>())
}

/// `Tr S A Sᵀ` for the sample `index`: the first `2k` rows of a random
/// symplectic matrix.
pub fn lemma1_sample_trace(a: &Matrix, k: usize, seed: u64, index: u64) -> Result<f64> {
    let n = a.rows() / 2;
    let mut r = rng::stream(seed, index);
    let s = sample_symplectic(n, SqueezeLaw::LogUniform { max: LEMMA1_SQUEEZE_MAX }, &mut r)?;
    Ok(truncate_rows(&s, k)?.congruence_trace(a))
}

/// `trace − bound`, with the relative prefix slack folded in.
pub fn lemma1_margin(trace: f64, bound: f64, tol: &Tolerances) -> f64 {
    trace - bound + tol.prefix_rel * trace.abs().max(bound.abs())
}

/// `Tr S A Sᵀ` for the first `2k` rows of the Williamson transform of `A`;
/// with `ν` ascending these rows span the `k` smallest planes.
pub fn lemma1_witness(a: &Matrix, k: usize, tol: &Tolerances) -> Result<f64> {
    let w = williamson_with(a, tol)?;
    Ok(truncate_rows(&w.s, k)?.congruence_trace(a))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma1Report {
    pub k: usize,
    pub bound: f64,
    pub witness_value: f64,
    /// `|witness − bound|`.
    pub witness_gap: f64,
    pub samples: TrialReport,
}

impl Lemma1Report {
    pub fn passed(&self, tol: &Tolerances) -> bool {
        self.samples.passed() && self.witness_gap <= tol.decomp
    }
}

/// Lower-bound check over `samples` random truncated symplectics, plus the
/// attainment check at the Williamson witness. Sampling can only falsify the
/// bound, never certify the minimum.
pub fn lemma1_trial(a: &Matrix, k: usize, samples: u64, seed: u64, tol: &Tolerances) -> Result<Lemma1Report> {
    if samples == 0 {
        return Err(invalid("samples", "must be positive"));
    }
    let bound = lemma1_bound(a, k, tol)?;
    let witness_value = lemma1_witness(a, k, tol)?;
    let mut report = TrialReport::empty(seed);
    for i in 0..samples {
        let t = lemma1_sample_trace(a, k, seed, i)?;
        let m = lemma1_margin(t, bound, tol);
        report = report.merge(TrialReport::single(seed, i, m, tol.prefix_abs, NEAR_ATTAINMENT));
    }
    Ok(Lemma1Report {
        k,
        bound,
        witness_value,
        witness_gap: (witness_value - bound).abs(),
        samples: report,
    })
}

/// `(G + G†)/2` for complex Gaussian `G`, size uniform in `1..=max_n`.
pub fn schur_instance(max_n: usize, seed: u64, index: u64) -> Result<CMatrix> {
    if max_n == 0 {
        return Err(invalid("max_n", "must be positive"));
    }
    let mut r = rng::stream(seed, index);
    let n = r.random_range(1..=max_n);
    let mut g = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let re = rng::normal(&mut r);
            let im = rng::normal(&mut r);
            g[(i, j)] = Complex64::new(re, im);
        }
    }
    let ga = g.adjoint();
    let mut h = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = (g[(i, j)] + ga[(i, j)]) * 0.5;
        }
    }
    Ok(h)
}

pub fn schur_trial(max_n: usize, trials: u64, seed: u64, tol: &Tolerances) -> Result<TrialReport> {
    if trials == 0 {
        return Err(invalid("trials", "must be positive"));
    }
    let mut report = TrialReport::empty(seed);
    for i in 0..trials {
        let m = schur_margin(&schur_instance(max_n, seed, i)?, tol)?;
        // the full sums always agree, so near-attainment carries no information
        report = report.merge(TrialReport::single(seed, i, m, tol.prefix_abs, f64::NEG_INFINITY));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn majorize_examples() {
        assert!(majorize(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], &tol()).unwrap());
        assert!(majorize(&[2.0, 2.0], &[3.0, 1.0], &tol()).unwrap());
        assert!(!majorize(&[3.0, 1.0], &[2.0, 2.0], &tol()).unwrap());
        assert!(!majorize(&[1.0, 1.0], &[3.0, 1.0], &tol()).unwrap());
        assert!(majorize(&[1.0], &[2.0], &tol()).is_ok_and(|b| !b));
        assert!(majorize(&[1.0], &[1.0, 2.0], &tol()).is_err());
    }

    #[test]
    fn weak_supermajorize_examples() {
        assert!(weak_supermajorize(&[4.0, 1.0], &[4.0, 1.0], &tol()).unwrap());
        assert!(weak_supermajorize(&[2.0, 2.0], &[1.0, 3.0], &tol()).unwrap());
        assert!(!weak_supermajorize(&[0.5, 10.0], &[1.0, 1.0], &tol()).unwrap());
        let m = weak_supermajorization_margin(&[0.5, 10.0], &[1.0, 1.0], &tol()).unwrap();
        assert!((m + 0.5).abs() < 1e-9);
    }

    #[test]
    fn weak_submajorize_examples() {
        assert!(weak_submajorize(&[1.0, 1.0], &[3.0, 1.0], &tol()).unwrap());
        assert!(!weak_submajorize(&[3.0, 2.0], &[3.0, 1.0], &tol()).unwrap());
    }

    #[test]
    fn schur_examples() {
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 1)] = Complex64::new(1.0, 0.0);
        a[(1, 0)] = Complex64::new(1.0, 0.0);
        assert!(schur_diag_check(&a, &tol()).unwrap());
        let mut d = CMatrix::zeros(3, 3);
        for i in 0..3 {
            d[(i, i)] = Complex64::new(i as f64 - 1.0, 0.0);
        }
        assert!(schur_diag_check(&d, &tol()).unwrap());
        let mut bad = CMatrix::zeros(2, 2);
        bad[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            schur_diag_check(&bad, &tol()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn t_transforms() {
        let (x, y) = random_majorization_pair(5, 0, 1).unwrap();
        assert_eq!(x, y);
        let mut v = vec![1.0, 5.0, 3.0];
        t_transform(&mut v, 0, 1, 0.5);
        assert_eq!(v, vec![3.0, 3.0, 3.0]);
        for seed in 0..50 {
            let (x, y) = random_majorization_pair(6, 8, seed).unwrap();
            assert!(majorize(&x, &y, &tol()).unwrap());
        }
    }

    #[test]
    fn theorem1_examples() {
        let i2 = Matrix::identity(2);
        let m = theorem1_margin(&i2, &i2, &tol()).unwrap();
        assert!(m.abs() < 1e-11);
        let a = Matrix::from_diag(&[1.0, 4.0]);
        let b = Matrix::from_diag(&[4.0, 1.0]);
        let m = theorem1_margin(&a, &b, &tol()).unwrap();
        assert!((m - 1.0).abs() < 1e-10);
        let r = theorem1_trial(3, (0.2, 5.0), 200, 23, &tol()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.trials, 200);
    }

    #[test]
    fn lemma1_examples() {
        let id = Matrix::identity(4);
        for k in 1..=2 {
            assert!((lemma1_bound(&id, k, &tol()).unwrap() - 2.0 * k as f64).abs() < 1e-12);
            assert!((lemma1_witness(&id, k, &tol()).unwrap() - 2.0 * k as f64).abs() < 1e-12);
        }
        let a = Matrix::from_diag(&[1.0, 1.0, 9.0, 9.0]);
        assert!((lemma1_bound(&a, 1, &tol()).unwrap() - 2.0).abs() < 1e-12);
        assert!((lemma1_witness(&a, 1, &tol()).unwrap() - 2.0).abs() < 1e-10);

        let a = lemma1_instance(3, 29, 0).unwrap();
        let n = a.rows() / 2;
        for k in 1..=n {
            let r = lemma1_trial(&a, k, 500, 29, &tol()).unwrap();
            assert!(r.passed(&tol()), "{r:?}");
        }
        assert!(lemma1_bound(&a, 0, &tol()).is_err());
    }

    #[test]
    fn schur_campaign() {
        let r = schur_trial(8, 200, 17, &tol()).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn report_merge_is_associative() {
        let r = |i, m| TrialReport::single(1, i, m, 1e-9, 1e-6);
        let a = r(5, -1.0);
        let b = r(2, -0.5);
        let c = r(9, 3.0);
        let left = a.clone().merge(b.clone()).merge(c.clone());
        let right = a.merge(b.merge(c));
        assert_eq!(left, right);
        assert_eq!(left.counterexample, Some((2, -0.5)));
        assert_eq!(left.worst_margin, -1.0);
        assert_eq!(left.failures, 2);
        assert_eq!(TrialReport::empty(1).merge(r(0, 0.0)).near_attainers, 1);
    }
}
