//! Unconstrained coordinates for the input-state searches.
//!
//! Pure inputs are `γ = T Z² Tᵀ` with `T ∈ K(n)` and `Z` a squeezer; the
//! second orthosymplectic factor of an Euler decomposition drops out because
//! it acts on the vacuum. `T` is the image of a unitary built from
//! beamsplitters on every mode pair followed by phase shifts, giving `n²`
//! angles, plus `n` log-squeezings: `n² + n` coordinates in total.
//!
//! Mixed inputs under an energy constraint are `γ = S (I + T) Sᵀ` with a full
//! Euler-parameterized `S` and `T` a paired diagonal of thermal excesses
//! scaled so that the energy is met exactly.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // float methods live in core only on recent toolchains
use num_traits::Float;

use crate::functionals::EnergyBudget;
use crate::linalg::{CMatrix, Matrix};
use crate::symplectic::{complex_to_real_blocks, squeeze_matrix, SymplecticMatrix};

/// Log-squeezings are mapped through `L·tanh(x/L)` so searches cannot run
/// off to numerically meaningless squeezing.
pub const MAX_LOG_SQUEEZE: f64 = 6.0;

fn bounded_squeeze(x: f64) -> f64 {
    MAX_LOG_SQUEEZE * (x / MAX_LOG_SQUEEZE).tanh()
}

pub fn unitary_dimension(n: usize) -> usize {
    n * n
}

/// `U = diag(e^{iα}) · Π_{j<k} BS_{jk}(θ, φ)`; zero parameters give `I`.
pub fn unitary_from_params(n: usize, params: &[f64]) -> CMatrix {
    debug_assert_eq!(params.len(), unitary_dimension(n));
    let mut u = CMatrix::identity(n);
    let mut idx = 0;
    for j in 0..n {
        for k in j + 1..n {
            let (theta, phi) = (params[idx], params[idx + 1]);
            idx += 2;
            let (c, s) = (theta.cos(), theta.sin());
            let e = Complex64::from_polar(1.0, phi);
            // left-multiply by the beamsplitter acting on rows j and k
            for col in 0..n {
                let a = u[(j, col)];
                let b = u[(k, col)];
                u[(j, col)] = a * c - e.conj() * b * s;
                u[(k, col)] = e * a * s + b * c;
            }
        }
    }
    for j in 0..n {
        let phase = Complex64::from_polar(1.0, params[idx + j]);
        for col in 0..n {
            u[(j, col)] *= phase;
        }
    }
    u
}

pub fn pure_dimension(n: usize) -> usize {
    n * n + n
}

/// Pure covariance `T Z² Tᵀ` from `n² + n` coordinates.
pub fn pure_covariance(n: usize, params: &[f64]) -> Matrix {
    debug_assert_eq!(params.len(), pure_dimension(n));
    let t = complex_to_real_blocks(&unitary_from_params(n, &params[..n * n]));
    let z2: Vec<f64> = params[n * n..]
        .iter()
        .map(|&x| (2.0 * bounded_squeeze(x)).exp())
        .collect();
    t.congruence(&squeeze_matrix(&z2)).symmetrized()
}

pub fn symplectic_dimension(n: usize) -> usize {
    2 * n * n + n
}

/// `T(U₁) Z T(U₂)` from `2n² + n` coordinates.
pub fn symplectic_from_params(n: usize, params: &[f64]) -> SymplecticMatrix {
    debug_assert_eq!(params.len(), symplectic_dimension(n));
    let nn = n * n;
    let t1 = complex_to_real_blocks(&unitary_from_params(n, &params[..nn]));
    let t2 = complex_to_real_blocks(&unitary_from_params(n, &params[nn..2 * nn]));
    let z: Vec<f64> = params[2 * nn..]
        .iter()
        .map(|&x| bounded_squeeze(x).exp())
        .collect();
    SymplecticMatrix::from_trusted(&(&t1 * &squeeze_matrix(&z)) * &t2)
}

pub fn mixed_dimension(n: usize) -> usize {
    symplectic_dimension(n) + n
}

/// A candidate from [`mixed_covariance`].
#[derive(Clone, Debug, PartialEq)]
pub enum MixedCandidate {
    /// Physical covariance with energy exactly `budget.total`.
    Feasible(Matrix),
    /// The pure part alone already exceeds the budget by `excess`.
    Infeasible { excess: f64 },
}

/// Energy of `S Sᵀ` and the energy added per unit of thermal excess in each
/// Williamson plane of `S`.
fn energy_coefficients(s: &Matrix, omega: &[f64]) -> (f64, Vec<f64>) {
    let n = omega.len();
    let mut e0 = 0.0;
    let mut c = alloc::vec![0.0; n];
    for (k, &wk) in omega.iter().enumerate() {
        for r in [2 * k, 2 * k + 1] {
            for (j, cj) in c.iter_mut().enumerate() {
                let w = s[(r, 2 * j)].powi(2) + s[(r, 2 * j + 1)].powi(2);
                e0 += 0.25 * wk * w;
                *cj += 0.25 * wk * w;
            }
        }
    }
    (e0, c)
}

/// `γ = S (I + T) Sᵀ` from `2n² + 2n` coordinates. The last `n` entries are
/// weights `w_j`; the thermal excesses are `t_j ∝ w_j²`, rescaled so the
/// mean energy equals the budget (equal weights when all `w ≈ 0`).
pub fn mixed_covariance(n: usize, params: &[f64], budget: &EnergyBudget) -> MixedCandidate {
    debug_assert_eq!(params.len(), mixed_dimension(n));
    let split = symplectic_dimension(n);
    let s = symplectic_from_params(n, &params[..split]).into_matrix();
    let (e0, c) = energy_coefficients(&s, budget.omega());
    let spare = budget.total() - e0;
    if spare < 0.0 {
        return MixedCandidate::Infeasible { excess: -spare };
    }
    let mut w2: Vec<f64> = params[split..].iter().map(|w| w * w).collect();
    let norm: f64 = w2.iter().sum();
    if norm <= 1e-24 {
        w2.iter_mut().for_each(|w| *w = 1.0);
    }
    let denom: f64 = w2.iter().zip(&c).map(|(w, cj)| w * cj).sum();
    let diag: Vec<f64> = w2.iter().map(|w| 1.0 + spare * w / denom).collect();
    MixedCandidate::Feasible(s.congruence(&Matrix::paired_diag(&diag)).symmetrized())
}
