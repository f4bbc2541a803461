//! Gaussian states at the level of first and second moments.
//!
//! A state is a covariance matrix, a displacement vector and the mode
//! frequencies. Quadratures are frequency-weighted, so the vacuum covariance
//! is the identity for every choice of `ω`; frequencies only enter energies.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::linalg::{CMatrix, Matrix};
use crate::symplectic::j_matrix;
use crate::tolerance::Tolerances;
use crate::williamson::{spd_eigen, symplectic_eigenvalues_with, SymplecticSpectrum};

/// A symmetric positive-definite `2n × 2n` matrix. Physicality is *not*
/// required here; see [`CovarianceMatrix::physicality`].
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    n: usize,
    matrix: Matrix,
}

/// Both characterizations of `γ + iJ ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Physicality {
    pub physical: bool,
    pub min_nu: f64,
    /// Smallest eigenvalue of the Hermitian matrix `γ + iJ`.
    pub min_eigenvalue: f64,
    /// Whether the two criteria agree.
    pub consistent: bool,
}

impl CovarianceMatrix {
    pub fn new(matrix: Matrix, tol: &Tolerances) -> Result<Self> {
        spd_eigen(&matrix, tol)?;
        Ok(Self {
            n: matrix.rows() / 2,
            matrix: matrix.symmetrized(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            matrix: Matrix::identity(2 * n),
        }
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn spectrum(&self) -> SymplecticSpectrum {
        // validated at construction, so only a pathological loss of
        // definiteness in the eigen-solver could fail here
        symplectic_eigenvalues_with(&self.matrix, &Tolerances::default())
            .expect("covariance matrix validated at construction")
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    /// `ν_min ≥ 1 − tol`, cross-checked against `λ_min(γ + iJ) ≥ −tol`.
    pub fn physicality(&self, tol: f64) -> Physicality {
        let min_nu = self.spectrum().min();
        let herm = CMatrix::from_parts(&self.matrix, &j_matrix(self.n))
            .expect("shapes agree by construction");
        let min_eigenvalue = herm.hermitian_eigenvalues()[0];
        let by_nu = min_nu >= 1.0 - tol;
        let by_eig = min_eigenvalue >= -tol;
        Physicality {
            physical: by_nu,
            min_nu,
            min_eigenvalue,
            consistent: by_nu == by_eig,
        }
    }

    /// `(ω_k/4)·Tr γ_[k]` for each mode.
    pub fn mode_energies(&self, omega: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|k| 0.25 * omega[k] * (self.matrix[(2 * k, 2 * k)] + self.matrix[(2 * k + 1, 2 * k + 1)]))
            .collect()
    }
}

/// Per-mode and total mean energy, `ħ = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeEnergy {
    pub per_mode: Vec<f64>,
    pub total: f64,
}

/// A physical Gaussian state.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    gamma: CovarianceMatrix,
    m: Vec<f64>,
    omega: Vec<f64>,
}

fn check_omega(n: usize, omega: &[f64]) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDimension("mode count must be positive".into()));
    }
    if omega.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: omega.len(),
        });
    }
    if let Some(w) = omega.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
        return Err(invalid("omega", alloc::format!("frequencies must be positive, got {w}")));
    }
    Ok(())
}

impl GaussianState {
    pub fn new(gamma: CovarianceMatrix, m: Vec<f64>, omega: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        let n = gamma.modes();
        check_omega(n, &omega)?;
        if m.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                found: m.len(),
            });
        }
        let phys = gamma.physicality(tol.phys);
        if !phys.physical {
            return Err(Error::Unphysical { min_nu: phys.min_nu });
        }
        Ok(Self { gamma, m, omega })
    }

    pub fn vacuum(n: usize, omega: Vec<f64>) -> Result<Self> {
        check_omega(n, &omega)?;
        Ok(Self {
            gamma: CovarianceMatrix::identity(n),
            m: vec![0.0; 2 * n],
            omega,
        })
    }

    /// `γ = ⊕ (2n̄_k + 1) I₂`.
    pub fn thermal(nbar: &[f64], omega: Vec<f64>) -> Result<Self> {
        check_omega(nbar.len(), &omega)?;
        if let Some(v) = nbar.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(invalid("nbar", alloc::format!("must be ≥ 0, got {v}")));
        }
        let nu: Vec<f64> = nbar.iter().map(|v| 2.0 * v + 1.0).collect();
        Ok(Self {
            gamma: CovarianceMatrix {
                n: nbar.len(),
                matrix: Matrix::paired_diag(&nu),
            },
            m: vec![0.0; 2 * nbar.len()],
            omega,
        })
    }

    /// Displaced vacuum.
    pub fn coherent(n: usize, omega: Vec<f64>, m: Vec<f64>) -> Result<Self> {
        let mut state = Self::vacuum(n, omega)?;
        if m.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                found: m.len(),
            });
        }
        state.m = m;
        Ok(state)
    }

    pub fn modes(&self) -> usize {
        self.gamma.modes()
    }

    pub fn covariance(&self) -> &CovarianceMatrix {
        &self.gamma
    }

    pub fn gamma(&self) -> &Matrix {
        self.gamma.matrix()
    }

    pub fn displacement(&self) -> &[f64] {
        &self.m
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn spectrum(&self) -> SymplecticSpectrum {
        self.gamma.spectrum()
    }

    pub fn physicality(&self, tol: f64) -> Physicality {
        self.gamma.physicality(tol)
    }

    /// `|det γ − 1| ≤ tol` and every `ν` within `tol` of 1.
    pub fn is_pure(&self, tol: f64) -> bool {
        let by_det = (self.gamma.determinant() - 1.0).abs() <= tol;
        let by_nu = self.spectrum().values().iter().all(|v| (v - 1.0).abs() <= tol);
        by_det && by_nu
    }

    /// `(ω_k/4)·Tr γ_[k] + (ω_k/2)(m_{2k}² + m_{2k+1}²)`.
    pub fn mean_energy(&self) -> ModeEnergy {
        let per_mode: Vec<f64> = self
            .gamma
            .mode_energies(&self.omega)
            .into_iter()
            .enumerate()
            .map(|(k, e)| e + 0.5 * self.omega[k] * (self.m[2 * k].powi(2) + self.m[2 * k + 1].powi(2)))
            .collect();
        let total = per_mode.iter().sum();
        ModeEnergy { per_mode, total }
    }

    pub fn trace_p(&self, p: f64) -> Result<f64> {
        trace_p(self.spectrum().values(), p)
    }

    pub fn entropy(&self) -> Result<f64> {
        von_neumann_entropy(self.spectrum().values())
    }
}

/// Slack for `ν` slightly below 1 before a spectrum counts as unphysical.
pub const SPECTRUM_CLAMP: f64 = crate::tolerance::TOL_PHYS;

/// Clamps `ν ∈ [1 − SPECTRUM_CLAMP, 1)` up to 1; anything lower is unphysical.
pub fn clamp_spectrum(nu: &[f64]) -> Result<Vec<f64>> {
    nu.iter()
        .map(|&v| {
            if v >= 1.0 {
                Ok(v)
            } else if v >= 1.0 - SPECTRUM_CLAMP {
                log::debug!("clamping symplectic eigenvalue {v} to 1 (shift {:e})", 1.0 - v);
                Ok(1.0)
            } else {
                Err(Error::Unphysical { min_nu: v })
            }
        })
        .collect()
}

/// `(x+1)^p − (x−1)^p` without domain checks; `p > 0`, `x ≥ 1`.
pub(crate) fn f_p_raw(x: f64, p: f64) -> f64 {
    (x + 1.0).powf(p) - (x - 1.0).powf(p)
}

/// `f_p(x) = (x+1)^p − (x−1)^p` for `x ≥ 1`, `p ≥ 1`.
pub fn f_p(x: f64, p: f64) -> Result<f64> {
    if !(x >= 1.0) || !x.is_finite() {
        return Err(invalid("x", alloc::format!("must be ≥ 1, got {x}")));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid("p", alloc::format!("must be ≥ 1, got {p}")));
    }
    if x == 1.0 {
        return Ok(2.0.powf(p));
    }
    Ok(f_p_raw(x, p))
}

/// `F_p(ν) = Π f_p(ν_j)` after clamping.
pub fn product_fp(nu: &[f64], p: f64) -> Result<f64> {
    clamp_spectrum(nu)?.iter().try_fold(1.0, |acc, &v| Ok(acc * f_p(v, p)?))
}

/// `ln F_p(ν)`; avoids overflow for many modes or large `p`.
pub fn ln_product_fp(nu: &[f64], p: f64) -> Result<f64> {
    clamp_spectrum(nu)?.iter().try_fold(0.0, |acc, &v| Ok(acc + f_p(v, p)?.ln()))
}

/// `Tr ρᵖ = Π 2ᵖ / f_p(ν_j)`. `p = 1` returns exactly 1.
pub fn trace_p(nu: &[f64], p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid("p", alloc::format!("must be ≥ 1, got {p}")));
    }
    let nu = clamp_spectrum(nu)?;
    if p == 1.0 {
        return Ok(1.0);
    }
    let two_p = 2.0.powf(p);
    Ok(nu.iter().map(|&v| two_p / f_p_raw(v, p)).product())
}

/// `‖ρ‖_p = (Tr ρᵖ)^{1/p}` from the product formula, for any `p > 0`.
///
/// Below `p = 1` this is the analytic continuation of the same formula;
/// it is what a one-sided difference quotient around `p = 1` needs.
pub fn schatten_norm(nu: &[f64], p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(invalid("p", alloc::format!("must be > 0, got {p}")));
    }
    let nu = clamp_spectrum(nu)?;
    let ln: f64 = nu
        .iter()
        .map(|&v| p * core::f64::consts::LN_2 - f_p_raw(v, p).ln())
        .sum();
    Ok((ln / p).exp())
}

/// Single-mode entropy `s(ν)` in nats; `s(1) = 0`.
pub fn mode_entropy(nu: f64) -> f64 {
    let plus = 0.5 * (nu + 1.0);
    let minus = 0.5 * (nu - 1.0);
    if minus <= 0.0 {
        return 0.0;
    }
    plus * plus.ln() - minus * minus.ln()
}

/// `S = Σ s(ν_j)` in nats.
pub fn von_neumann_entropy(nu: &[f64]) -> Result<f64> {
    Ok(clamp_spectrum(nu)?.into_iter().map(mode_entropy).sum())
}
