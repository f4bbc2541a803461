//! Symplectic eigenvalues and the Williamson normal form.
//!
//! Two independent routes are provided. [`symplectic_eigenvalues`] reads the
//! spectrum from the symmetric matrix `KᵀK` with `K = A^{1/2} J A^{1/2}`,
//! whose eigenvalues are `ν²`, each twice. [`williamson`] reduces the skew
//! matrix `B = A^{-1/2} J A^{-1/2}` to real canonical form and builds the
//! diagonalizing symplectic transform explicitly. Only symmetric
//! eigenproblems are ever solved.

use alloc::vec::Vec;

#[allow(unused_imports)] // float methods live in core only on recent toolchains
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{norm, sym_eigen, Matrix, SymEigen};
use crate::symplectic::{j_matrix, pair_planes, symplectic_residual, SymplecticMatrix};
use crate::tolerance::Tolerances;

/// Ascending symplectic eigenvalues `ν₁ ≤ … ≤ νₙ`, all positive.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticSpectrum {
    values: Vec<f64>,
}

impl SymplecticSpectrum {
    /// Sorts `values` ascending; rejects empty input and non-positive entries.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDimension("empty spectrum".into()));
        }
        if let Some(&bad) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: bad,
            });
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// `diag(ν₁, ν₁, …, νₙ, νₙ)`.
    pub fn paired_diagonal(&self) -> Matrix {
        Matrix::paired_diag(&self.values)
    }
}

/// `S A Sᵀ = diag(ν₁, ν₁, …)` with `ν` ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct WilliamsonDecomposition {
    pub s: SymplecticMatrix,
    pub spectrum: SymplecticSpectrum,
}

impl WilliamsonDecomposition {
    /// `‖S A Sᵀ − D‖_max`.
    pub fn residual(&self, a: &Matrix) -> f64 {
        self.s
            .matrix()
            .congruence(a)
            .max_abs_diff(&self.spectrum.paired_diagonal())
    }
}

fn check_even_square(a: &Matrix) -> Result<()> {
    if !a.is_square() || a.rows() == 0 || a.rows() % 2 != 0 {
        return Err(Error::InvalidDimension(alloc::format!(
            "expected a nonempty 2n x 2n matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

fn check_symmetric(a: &Matrix, tol: &Tolerances) -> Result<()> {
    let residual = a.symmetry_residual();
    if residual > tol.sym * a.max_abs().max(1.0) {
        return Err(Error::NotSymmetric { residual });
    }
    Ok(())
}

/// Eigen-decomposition of a symmetric positive-definite `2n × 2n` matrix.
pub(crate) fn spd_eigen(a: &Matrix, tol: &Tolerances) -> Result<SymEigen> {
    check_even_square(a)?;
    check_symmetric(a, tol)?;
    let eig = sym_eigen(a);
    let min = eig.values[0];
    if !(min > 0.0) {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min,
        });
    }
    Ok(eig)
}

/// Pairs of eigenvalues of `KᵀK`, averaged, square-rooted.
fn spectrum_from_sqrt(root: &Matrix) -> Vec<f64> {
    let n = root.rows() / 2;
    let k = &(root * &j_matrix(n)) * root;
    let ktk = k.transpose_congruence(&Matrix::identity(2 * n));
    let mu = sym_eigen(&ktk).values;
    (0..n)
        .map(|j| (0.5 * (mu[2 * j] + mu[2 * j + 1])).max(0.0).sqrt())
        .collect()
}

pub fn symplectic_eigenvalues(a: &Matrix) -> Result<SymplecticSpectrum> {
    symplectic_eigenvalues_with(a, &Tolerances::default())
}

pub fn symplectic_eigenvalues_with(a: &Matrix, tol: &Tolerances) -> Result<SymplecticSpectrum> {
    let eig = spd_eigen(a, tol)?;
    let root = eig.map(f64::sqrt);
    SymplecticSpectrum::new(spectrum_from_sqrt(&root))
}

/// Symplectic spectrum of a positive *semi*definite matrix, ascending.
///
/// Zero entries are allowed. The values coincide with the `ε → 0` limit of
/// the spectrum of `Y + εI`, so no regularization is needed here.
pub fn psd_symplectic_eigenvalues(y: &Matrix, tol: &Tolerances) -> Result<Vec<f64>> {
    check_even_square(y)?;
    check_symmetric(y, tol)?;
    let eig = sym_eigen(y);
    let min = eig.values[0];
    if min < -tol.phys * y.max_abs().max(1.0) {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: min,
        });
    }
    let root = eig.map(|v| v.max(0.0).sqrt());
    Ok(spectrum_from_sqrt(&root))
}

pub fn williamson(a: &Matrix) -> Result<WilliamsonDecomposition> {
    williamson_with(a, &Tolerances::default())
}

/// Williamson normal form of a symmetric positive-definite matrix.
///
/// `B = A^{-1/2} J A^{-1/2}` is skew, so `BᵀB` has eigenvalues `ν⁻²` in
/// pairs. For a unit eigenvector `u`, the partner `w = −Bu/|Bu|` spans with
/// `u` an invariant plane on which `B` acts as `ν⁻¹ J₁`. Collecting the
/// planes into `O` gives `S = D^{1/2} Oᵀ A^{-1/2}`.
pub fn williamson_with(a: &Matrix, tol: &Tolerances) -> Result<WilliamsonDecomposition> {
    let eig = spd_eigen(a, tol)?;
    let n = a.rows() / 2;
    let inv_root = eig.map(|v| 1.0 / v.sqrt());
    let b = &(&inv_root * &j_matrix(n)) * &inv_root;
    let btb = b.transpose_congruence(&Matrix::identity(2 * n));
    let beig = sym_eigen(&btb);

    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| beig.values[j].total_cmp(&beig.values[i]));
    let candidates: Vec<Vec<f64>> = order.iter().map(|&i| beig.vectors.column(i)).collect();

    let mut planes = pair_planes(&candidates, n, |u| {
        let bu = b.mul_vec(u);
        let len = norm(&bu);
        (bu.iter().map(|x| -x / len).collect(), 1.0 / len)
    })
    .ok_or(Error::Numerical {
        context: "williamson pairing",
        residual: f64::NAN,
    })?;
    planes.sort_by(|x, y| x.2.total_cmp(&y.2));

    let mut rows = Vec::with_capacity(2 * n);
    let mut nu = Vec::with_capacity(n);
    for (u, w, v) in planes {
        let scale = v.sqrt();
        rows.push(u.iter().map(|x| x * scale).collect::<Vec<_>>());
        rows.push(w.iter().map(|x| x * scale).collect::<Vec<_>>());
        nu.push(v);
    }
    // rows are D^{1/2} Oᵀ
    let s = &Matrix::from_rows(&rows)? * &inv_root;
    let spectrum = SymplecticSpectrum::new(nu)?;

    let sym = symplectic_residual(&s)?;
    if sym > tol.sym {
        return Err(Error::Numerical {
            context: "williamson symplectic residual",
            residual: sym,
        });
    }
    let out = WilliamsonDecomposition {
        s: SymplecticMatrix::from_trusted(s),
        spectrum,
    };
    let decomp = out.residual(a);
    if decomp > tol.decomp {
        return Err(Error::Numerical {
            context: "williamson diagonalization",
            residual: decomp,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{random_covariance, random_symplectic, squeeze_matrix};

    fn d(v: &[f64]) -> Matrix {
        Matrix::from_diag(v)
    }

    #[test]
    fn identity_spectrum() {
        let s = symplectic_eigenvalues(&Matrix::identity(6)).unwrap();
        for v in s.values() {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn single_mode_diagonal() {
        let s = symplectic_eigenvalues(&d(&[4.0, 1.0])).unwrap();
        assert!((s.values()[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn paired_diagonal_is_read_off() {
        let s = symplectic_eigenvalues(&d(&[5.0, 5.0, 2.0, 2.0])).unwrap();
        assert!((s.values()[0] - 2.0).abs() < 1e-13);
        assert!((s.values()[1] - 5.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_input() {
        let asym = Matrix::from_rows(&[[1.0, 0.5], [0.0, 1.0]]).unwrap();
        assert!(matches!(
            symplectic_eigenvalues(&asym),
            Err(Error::NotSymmetric { .. })
        ));
        match symplectic_eigenvalues(&d(&[1.0, -2.0])) {
            Err(Error::NotPositiveDefinite { min_eigenvalue }) => assert_eq!(min_eigenvalue, -2.0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(symplectic_eigenvalues(&Matrix::identity(3)).is_err());
    }

    #[test]
    fn spectrum_construction_sorts() {
        let s = SymplecticSpectrum::new(alloc::vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
        assert!(SymplecticSpectrum::new(alloc::vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn williamson_of_paired_diagonal() {
        let a = d(&[1.5, 1.5, 3.0, 3.0]);
        let w = williamson(&a).unwrap();
        assert!(w.residual(&a) <= 1e-8);
        assert!((w.spectrum.values()[0] - 1.5).abs() < 1e-12);
        assert!((w.spectrum.values()[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn williamson_single_mode() {
        let a = d(&[1.0, 4.0]);
        let w = williamson(&a).unwrap();
        assert!((w.spectrum.values()[0] - 2.0).abs() < 1e-12);
        let out = w.s.matrix().congruence(&a);
        assert!(out.max_abs_diff(&d(&[2.0, 2.0])) <= 1e-8);
        // the textbook transform diag(√2, 1/√2) is one valid answer
        let s = squeeze_matrix(&[2.0.sqrt()]);
        assert!(s.congruence(&a).max_abs_diff(&d(&[2.0, 2.0])) < 1e-14);
    }

    #[test]
    fn williamson_random_covariance() {
        let gamma = random_covariance(3, (1.0, 5.0), 42).unwrap();
        let a = gamma.matrix();
        let w = williamson(a).unwrap();
        assert!(w.residual(a) <= 1e-8);
        assert!(w.s.residual() <= 1e-10);
        let direct = symplectic_eigenvalues(a).unwrap();
        for (x, y) in w.spectrum.values().iter().zip(direct.values()) {
            assert!((x - y).abs() <= 1e-8);
        }
    }

    #[test]
    fn williamson_degenerate_spectrum() {
        // all ν equal: every vector is an eigenvector of BᵀB
        let s = random_symplectic(3, 3.0, 5).unwrap();
        let a = s.matrix().congruence(&Matrix::identity(6).scale(2.0));
        let w = williamson(&a).unwrap();
        assert!(w.residual(&a) <= 1e-8);
        assert!(w.spectrum.values().iter().all(|v| (v - 2.0).abs() < 1e-8));
    }

    #[test]
    fn congruence_invariance() {
        let gamma = random_covariance(2, (1.0, 3.0), 5).unwrap();
        let s = random_symplectic(2, 4.0, 6).unwrap();
        let a = gamma.matrix();
        let moved = s.matrix().congruence(a).symmetrized();
        let x = symplectic_eigenvalues(a).unwrap();
        let y = symplectic_eigenvalues(&moved).unwrap();
        for (p, q) in x.values().iter().zip(y.values()) {
            assert!((p - q).abs() <= 1e-8);
        }
        assert!(x.min() >= 1.0 - 1e-8 && x.max() <= 3.0 + 1e-8);
    }

    #[test]
    fn psd_spectrum_of_singular_matrix() {
        let y = d(&[1.0, 0.0]);
        let nu = psd_symplectic_eigenvalues(&y, &Tolerances::default()).unwrap();
        assert!(nu[0].abs() < 1e-12);
        let zero = psd_symplectic_eigenvalues(&Matrix::zeros(4, 4), &Tolerances::default()).unwrap();
        assert_eq!(zero, alloc::vec![0.0, 0.0]);
        // limit agrees with the regularized Williamson route
        let eps = 1e-10;
        let reg = &d(&[2.0, 2.0, 3.0, 0.0]) + &Matrix::identity(4).scale(eps);
        let w = williamson(&reg).unwrap();
        let nu = psd_symplectic_eigenvalues(&d(&[2.0, 2.0, 3.0, 0.0]), &Tolerances::default())
            .unwrap();
        for (x, y) in w.spectrum.values().iter().zip(&nu) {
            assert!((x - y).abs() < 1e-4);
        }
        assert!(psd_symplectic_eigenvalues(&d(&[1.0, -1.0]), &Tolerances::default()).is_err());
    }
}
