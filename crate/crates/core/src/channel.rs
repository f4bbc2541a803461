//! Gaussian channels acting on moments as `γ ↦ XᵀγX + Y`, `m ↦ Xᵀm`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // float methods live in core only on recent toolchains
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::linalg::{sym_eigenvalues, CMatrix, Matrix};
use crate::state::{CovarianceMatrix, GaussianState};
use crate::symplectic::j_matrix;
use crate::tolerance::{Tolerances, NOISE_REGULARIZATION};
use crate::williamson::{psd_symplectic_eigenvalues, williamson_with};

/// Constructor provenance, kept so closed-form functionals can recognise
/// the channels they cover.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelKind {
    /// `X = I`; retains the symplectic spectrum of `Y` (zeros allowed).
    Classical { noise_spectrum: Vec<f64> },
    /// Beamsplitter coupling to thermal reservoirs.
    Thermal { eta: Vec<f64>, nbar: Vec<f64> },
    /// Thermal with vacuum reservoirs.
    Lossy { eta: Vec<f64> },
    /// Direct sum of channels of different kinds.
    Tensor(Vec<GaussianChannel>),
    Custom,
}

impl ChannelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ChannelKind::Classical { .. } => "classical",
            ChannelKind::Thermal { .. } => "thermal",
            ChannelKind::Lossy { .. } => "lossy",
            ChannelKind::Tensor(_) => "tensor",
            ChannelKind::Custom => "custom",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianChannel {
    n: usize,
    x: Matrix,
    y: Matrix,
    kind: ChannelKind,
    cp_min_eigenvalue: f64,
}

/// Smallest eigenvalue of the Hermitian matrix `Y + iJ − iXᵀJX`.
pub fn cp_certificate(x: &Matrix, y: &Matrix) -> Result<f64> {
    let n = x.rows() / 2;
    let j = j_matrix(n);
    let im = &j - &x.transpose_congruence(&j);
    let h = CMatrix::from_parts(y, &im)?;
    Ok(h.hermitian_eigenvalues()[0])
}

fn check_noise(y: &Matrix, n: usize, tol: &Tolerances) -> Result<()> {
    if y.rows() != 2 * n || y.cols() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            found: if y.rows() != 2 * n { y.rows() } else { y.cols() },
        });
    }
    let residual = y.symmetry_residual();
    if residual > tol.sym * y.max_abs().max(1.0) {
        return Err(Error::NotSymmetric { residual });
    }
    let min = sym_eigenvalues(y)[0];
    if min < -tol.phys {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: min,
        });
    }
    Ok(())
}

fn thermal_matrices(eta: &[f64], nbar: &[f64]) -> (Matrix, Matrix) {
    let x: Vec<f64> = eta.iter().map(|e| e.sqrt()).collect();
    let y: Vec<f64> = eta
        .iter()
        .zip(nbar)
        .map(|(e, b)| (2.0 * b + 1.0) * (1.0 - e))
        .collect();
    (Matrix::paired_diag(&x), Matrix::paired_diag(&y))
}

fn check_fraction(name: &'static str, values: &[f64], lo: f64, hi: f64) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !(**v >= lo && **v <= hi)) {
        return Err(invalid(name, alloc::format!("{v} outside [{lo}, {hi}]")));
    }
    Ok(())
}

impl GaussianChannel {
    /// Arbitrary `(X, Y)`, accepted when `Y ≥ 0` and the complete-positivity
    /// certificate is at least `−tol.phys`.
    pub fn new(x: Matrix, y: Matrix, tol: &Tolerances) -> Result<Self> {
        if !x.is_square() || x.rows() == 0 || x.rows() % 2 != 0 {
            return Err(Error::InvalidDimension(alloc::format!(
                "X must be 2n x 2n, got {}x{}",
                x.rows(),
                x.cols()
            )));
        }
        let n = x.rows() / 2;
        check_noise(&y, n, tol)?;
        let y = y.symmetrized();
        Self::certified(n, x, y, ChannelKind::Custom, tol)
    }

    fn certified(n: usize, x: Matrix, y: Matrix, kind: ChannelKind, tol: &Tolerances) -> Result<Self> {
        let cp = cp_certificate(&x, &y)?;
        if cp < -tol.phys {
            return Err(Error::NotCompletelyPositive { min_eigenvalue: cp });
        }
        Ok(Self {
            n,
            x,
            y,
            kind,
            cp_min_eigenvalue: cp,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::classical_noise(Matrix::zeros(2 * n, 2 * n), &Tolerances::default())
    }

    /// `γ ↦ γ + Y`.
    pub fn classical_noise(y: Matrix, tol: &Tolerances) -> Result<Self> {
        if !y.is_square() || y.rows() == 0 || y.rows() % 2 != 0 {
            return Err(Error::InvalidDimension(alloc::format!(
                "Y must be 2n x 2n, got {}x{}",
                y.rows(),
                y.cols()
            )));
        }
        let n = y.rows() / 2;
        check_noise(&y, n, tol)?;
        let y = y.symmetrized();
        let noise_spectrum = psd_symplectic_eigenvalues(&y, tol)?;
        Self::certified(
            n,
            Matrix::identity(2 * n),
            y,
            ChannelKind::Classical { noise_spectrum },
            tol,
        )
    }

    /// `X = ⊕√η_k I₂`, `Y = ⊕(2n̄_k + 1)(1 − η_k) I₂`.
    pub fn thermal_noise(eta: &[f64], nbar: &[f64], tol: &Tolerances) -> Result<Self> {
        if eta.is_empty() {
            return Err(Error::InvalidDimension("eta must be nonempty".into()));
        }
        if nbar.len() != eta.len() {
            return Err(Error::DimensionMismatch {
                expected: eta.len(),
                found: nbar.len(),
            });
        }
        check_fraction("eta", eta, 0.0, 1.0)?;
        check_fraction("nbar", nbar, 0.0, f64::MAX)?;
        let (x, y) = thermal_matrices(eta, nbar);
        Self::certified(
            eta.len(),
            x,
            y,
            ChannelKind::Thermal {
                eta: eta.to_vec(),
                nbar: nbar.to_vec(),
            },
            tol,
        )
    }

    pub fn lossy(eta: &[f64], tol: &Tolerances) -> Result<Self> {
        let mut ch = Self::thermal_noise(eta, &vec![0.0; eta.len()], tol)?;
        ch.kind = ChannelKind::Lossy { eta: eta.to_vec() };
        Ok(ch)
    }

    /// Direct sum. Same-family parts collapse into one channel of that
    /// family; mixed parts are kept as [`ChannelKind::Tensor`].
    pub fn tensor(channels: &[GaussianChannel]) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::InvalidDimension("tensor of an empty list".into()));
        }
        let mut parts: Vec<GaussianChannel> = Vec::new();
        for ch in channels {
            match &ch.kind {
                ChannelKind::Tensor(inner) => parts.extend(inner.iter().cloned()),
                _ => parts.push(ch.clone()),
            }
        }
        if parts.len() == 1 {
            return Ok(parts.pop().expect("one part"));
        }
        let n = parts.iter().map(|c| c.n).sum();
        let x = Matrix::direct_sum(&parts.iter().map(|c| &c.x).collect::<Vec<_>>());
        let y = Matrix::direct_sum(&parts.iter().map(|c| &c.y).collect::<Vec<_>>());
        let cp = parts
            .iter()
            .map(|c| c.cp_min_eigenvalue)
            .fold(f64::INFINITY, f64::min);

        let all = |f: fn(&ChannelKind) -> bool| parts.iter().all(|c| f(&c.kind));
        let kind = if all(|k| matches!(k, ChannelKind::Classical { .. })) {
            let mut noise_spectrum: Vec<f64> = parts
                .iter()
                .flat_map(|c| match &c.kind {
                    ChannelKind::Classical { noise_spectrum } => noise_spectrum.clone(),
                    _ => unreachable!(),
                })
                .collect();
            noise_spectrum.sort_by(f64::total_cmp);
            ChannelKind::Classical { noise_spectrum }
        } else if all(|k| matches!(k, ChannelKind::Lossy { .. })) {
            ChannelKind::Lossy {
                eta: parts.iter().flat_map(|c| c.thermal_parameters().0).collect(),
            }
        } else if all(|k| matches!(k, ChannelKind::Thermal { .. } | ChannelKind::Lossy { .. })) {
            let (mut eta, mut nbar) = (Vec::new(), Vec::new());
            for c in &parts {
                let (e, b) = c.thermal_parameters();
                eta.extend(e);
                nbar.extend(b);
            }
            ChannelKind::Thermal { eta, nbar }
        } else {
            ChannelKind::Tensor(parts)
        };
        Ok(Self {
            n,
            x,
            y,
            kind,
            cp_min_eigenvalue: cp,
        })
    }

    fn thermal_parameters(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.kind {
            ChannelKind::Thermal { eta, nbar } => (eta.clone(), nbar.clone()),
            ChannelKind::Lossy { eta } => (eta.clone(), vec![0.0; eta.len()]),
            _ => (Vec::new(), Vec::new()),
        }
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn y(&self) -> &Matrix {
        &self.y
    }

    pub fn kind(&self) -> &ChannelKind {
        &self.kind
    }

    pub fn cp_min_eigenvalue(&self) -> f64 {
        self.cp_min_eigenvalue
    }

    /// `XᵀγX + Y` with no validation of `γ`.
    pub fn apply_covariance(&self, gamma: &Matrix) -> Matrix {
        (&self.x.transpose_congruence(gamma) + &self.y).symmetrized()
    }

    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        if state.modes() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: state.modes(),
            });
        }
        let tol = Tolerances::default();
        let gamma = CovarianceMatrix::new(self.apply_covariance(state.gamma()), &tol)?;
        let m = self.x.transpose().mul_vec(state.displacement());
        GaussianState::new(gamma, m, state.omega().to_vec(), &tol).map_err(|e| match e {
            Error::Unphysical { min_nu } => Error::Numerical {
                context: "channel output",
                residual: 1.0 - min_nu,
            },
            other => other,
        })
    }

    /// Output symplectic eigenvalues at the closed-form optimum, when the
    /// channel (or every tensor part) has one: `1 + y_k` for classical noise,
    /// `1 + 2(1 − η_k)n̄_k` for thermal noise.
    pub fn optimal_output_spectrum(&self) -> Option<Vec<f64>> {
        match &self.kind {
            ChannelKind::Classical { noise_spectrum } => {
                Some(noise_spectrum.iter().map(|y| 1.0 + y).collect())
            }
            ChannelKind::Thermal { .. } | ChannelKind::Lossy { .. } => {
                let (eta, nbar) = self.thermal_parameters();
                Some(
                    eta.iter()
                        .zip(&nbar)
                        .map(|(e, b)| 1.0 + 2.0 * (1.0 - e) * b)
                        .collect(),
                )
            }
            ChannelKind::Tensor(parts) => {
                let mut out = Vec::with_capacity(self.n);
                for p in parts {
                    out.extend(p.optimal_output_spectrum()?);
                }
                Some(out)
            }
            ChannelKind::Custom => None,
        }
    }

    /// A pure input covariance attaining the closed-form optimum.
    ///
    /// For classical noise this is `S⁻¹S⁻ᵀ` with `S` the Williamson transform
    /// of `Y` (regularized by `εI` only when `Y` is singular), so that the
    /// output is `S⁻¹(I + D)S⁻ᵀ`. Thermal-noise optima are the vacuum. For a
    /// tensor product the witness is the direct sum of the parts' witnesses,
    /// i.e. a product state.
    pub fn optimal_input(&self) -> Result<Matrix> {
        match &self.kind {
            ChannelKind::Classical { noise_spectrum } => {
                if noise_spectrum.iter().all(|&v| v == 0.0) && self.y.max_abs() == 0.0 {
                    return Ok(Matrix::identity(2 * self.n));
                }
                let tol = Tolerances::default();
                let singular = sym_eigenvalues(&self.y)[0] <= 0.0;
                let y = if singular {
                    &self.y + &Matrix::identity(2 * self.n).scale(NOISE_REGULARIZATION)
                } else {
                    self.y.clone()
                };
                let w = williamson_with(&y, &tol)?;
                let inv = w.s.inverse();
                Ok(inv.matrix().congruence(&Matrix::identity(2 * self.n)).symmetrized())
            }
            ChannelKind::Thermal { .. } | ChannelKind::Lossy { .. } => {
                Ok(Matrix::identity(2 * self.n))
            }
            ChannelKind::Tensor(parts) => {
                let blocks = parts
                    .iter()
                    .map(|p| p.optimal_input())
                    .collect::<Result<Vec<_>>>()?;
                Ok(Matrix::direct_sum(&blocks.iter().collect::<Vec<_>>()))
            }
            ChannelKind::Custom => Err(Error::UnsupportedKind { kind: "custom" }),
        }
    }

    /// Mode ranges `(offset, modes)` of the tensor factors; a single range
    /// for non-tensor channels.
    pub fn factor_ranges(&self) -> Vec<(usize, usize)> {
        match &self.kind {
            ChannelKind::Tensor(parts) => {
                let mut offset = 0;
                parts
                    .iter()
                    .map(|p| {
                        let r = (offset, p.n);
                        offset += p.n;
                        r
                    })
                    .collect()
            }
            _ => vec![(0, self.n)],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::williamson::symplectic_eigenvalues;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn d(v: &[f64]) -> Matrix {
        Matrix::from_diag(v)
    }

    #[test]
    fn identity_channel_certificate_is_zero() {
        let ch = GaussianChannel::new(Matrix::identity(2), Matrix::zeros(2, 2), &tol()).unwrap();
        assert_eq!(ch.cp_min_eigenvalue(), 0.0);
        let v = GaussianState::vacuum(1, vec![1.0]).unwrap();
        assert_eq!(ch.apply(&v).unwrap(), v);
    }

    #[test]
    fn classical_noise_examples() {
        let ch = GaussianChannel::new(Matrix::identity(2), Matrix::identity(2), &tol()).unwrap();
        assert!((ch.cp_min_eigenvalue() - 1.0).abs() < 1e-14);

        let ch = GaussianChannel::classical_noise(d(&[2.0, 2.0]), &tol()).unwrap();
        let out = ch.apply(&GaussianState::vacuum(1, vec![1.0]).unwrap()).unwrap();
        assert_eq!(out.gamma(), &d(&[3.0, 3.0]));
        assert!((out.spectrum().values()[0] - 3.0).abs() < 1e-13);

        assert!(matches!(
            GaussianChannel::classical_noise(d(&[1.0, -1.0]), &tol()),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn amplification_without_noise_is_rejected() {
        let x = Matrix::identity(2).scale(2.0.sqrt());
        match GaussianChannel::new(x, Matrix::zeros(2, 2), &tol()) {
            Err(Error::NotCompletelyPositive { min_eigenvalue }) => {
                assert!((min_eigenvalue + 1.0).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn asymmetric_noise_is_rejected() {
        let y = Matrix::from_rows(&[[1.0, 0.3], [0.0, 1.0]]).unwrap();
        assert!(matches!(
            GaussianChannel::new(Matrix::identity(2), y, &tol()),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn thermal_examples() {
        let id = GaussianChannel::thermal_noise(&[1.0], &[3.0], &tol()).unwrap();
        assert_eq!(id.x(), &Matrix::identity(2));
        assert_eq!(id.y(), &Matrix::zeros(2, 2));

        let full = GaussianChannel::thermal_noise(&[0.0], &[2.0], &tol()).unwrap();
        let input = GaussianState::thermal(&[4.0], vec![1.0]).unwrap();
        assert_eq!(full.apply(&input).unwrap().gamma(), &d(&[5.0, 5.0]));

        let ch = GaussianChannel::thermal_noise(&[0.5], &[1.0], &tol()).unwrap();
        let out = ch.apply(&GaussianState::vacuum(1, vec![1.0]).unwrap()).unwrap();
        assert!(out.gamma().max_abs_diff(&d(&[2.0, 2.0])) < 1e-15);

        assert!(GaussianChannel::thermal_noise(&[1.2], &[0.0], &tol()).is_err());
        assert!(GaussianChannel::thermal_noise(&[0.5], &[-1.0], &tol()).is_err());
    }

    #[test]
    fn lossy_examples() {
        let ch = GaussianChannel::lossy(&[0.5], &tol()).unwrap();
        assert_eq!(ch.y(), &d(&[0.5, 0.5]));
        assert_eq!(ch.kind().name(), "lossy");
        let vac = GaussianState::vacuum(1, vec![1.0]).unwrap();
        assert!(ch.apply(&vac).unwrap().gamma().max_abs_diff(&Matrix::identity(2)) < 1e-15);
        let th = GaussianState::thermal(&[1.0], vec![1.0]).unwrap();
        let out = ch.apply(&th).unwrap();
        assert!(out.gamma().max_abs_diff(&d(&[2.0, 2.0])) < 1e-15);
        assert!((out.spectrum().values()[0] - 2.0).abs() < 1e-13);
    }

    #[test]
    fn displacement_transforms_with_x() {
        let ch = GaussianChannel::lossy(&[0.25], &tol()).unwrap();
        let c = GaussianState::coherent(1, vec![1.0], vec![2.0, -4.0]).unwrap();
        let out = ch.apply(&c).unwrap();
        assert_eq!(out.displacement(), &[1.0, -2.0]);
        let cl = GaussianChannel::classical_noise(d(&[1.0, 1.0]), &tol()).unwrap();
        assert_eq!(cl.apply(&c).unwrap().displacement(), c.displacement());
    }

    #[test]
    fn tensor_rules() {
        let a = GaussianChannel::classical_noise(d(&[2.0, 2.0]), &tol()).unwrap();
        let b = GaussianChannel::classical_noise(d(&[1.0, 1.0]), &tol()).unwrap();
        assert_eq!(GaussianChannel::tensor(core::slice::from_ref(&a)).unwrap(), a);
        assert!(GaussianChannel::tensor(&[]).is_err());

        let ab = GaussianChannel::tensor(&[a.clone(), b.clone()]).unwrap();
        let direct = GaussianChannel::classical_noise(d(&[2.0, 2.0, 1.0, 1.0]), &tol()).unwrap();
        assert_eq!(ab.x(), direct.x());
        assert_eq!(ab.y(), direct.y());
        assert_eq!(ab.kind().name(), "classical");

        let t = GaussianChannel::thermal_noise(&[0.5], &[1.0], &tol()).unwrap();
        let l = GaussianChannel::lossy(&[0.3], &tol()).unwrap();
        assert_eq!(GaussianChannel::tensor(&[t.clone(), l.clone()]).unwrap().kind().name(), "thermal");
        assert_eq!(GaussianChannel::tensor(&[l.clone(), l.clone()]).unwrap().kind().name(), "lossy");
        let mixed = GaussianChannel::tensor(&[a.clone(), t.clone()]).unwrap();
        assert_eq!(mixed.kind().name(), "tensor");
        assert_eq!(mixed.factor_ranges(), vec![(0, 1), (1, 1)]);
        let nested = GaussianChannel::tensor(&[mixed.clone(), l]).unwrap();
        assert_eq!(nested.factor_ranges().len(), 3);
    }

    #[test]
    fn tensor_acts_blockwise() {
        let a = GaussianChannel::classical_noise(d(&[2.0, 0.5]), &tol()).unwrap();
        let t = GaussianChannel::thermal_noise(&[0.4], &[1.5], &tol()).unwrap();
        let joint = GaussianChannel::tensor(&[a.clone(), t.clone()]).unwrap();
        let g1 = d(&[3.0, 0.5]);
        let g2 = d(&[1.2, 2.0]);
        let out = joint.apply_covariance(&Matrix::direct_sum(&[&g1, &g2]));
        let expect = Matrix::direct_sum(&[&a.apply_covariance(&g1), &t.apply_covariance(&g2)]);
        assert!(out.max_abs_diff(&expect) <= 1e-15);
    }

    #[test]
    fn classical_witness_reaches_closed_form() {
        let y = Matrix::from_rows(&[[3.0, 1.0], [1.0, 1.0]]).unwrap();
        let ch = GaussianChannel::classical_noise(y, &tol()).unwrap();
        let input = ch.optimal_input().unwrap();
        assert!((input.determinant() - 1.0).abs() < 1e-10);
        let nu = symplectic_eigenvalues(&ch.apply_covariance(&input)).unwrap();
        let target = ch.optimal_output_spectrum().unwrap();
        assert!((nu.values()[0] - target[0]).abs() < 1e-8);
        assert!((target[0] - (1.0 + 2.0.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn singular_noise_spectrum() {
        let ch = GaussianChannel::classical_noise(Matrix::zeros(4, 4), &tol()).unwrap();
        assert_eq!(ch.optimal_output_spectrum().unwrap(), vec![1.0, 1.0]);
        assert_eq!(ch.optimal_input().unwrap(), Matrix::identity(4));
        let ch = GaussianChannel::classical_noise(d(&[4.0, 0.0]), &tol()).unwrap();
        assert!((ch.optimal_output_spectrum().unwrap()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn custom_has_no_closed_form() {
        let x = Matrix::identity(2).scale(0.5);
        let ch = GaussianChannel::new(x, Matrix::identity(2), &tol()).unwrap();
        assert_eq!(ch.kind(), &ChannelKind::Custom);
        assert!(ch.optimal_output_spectrum().is_none());
        assert!(matches!(ch.optimal_input(), Err(Error::UnsupportedKind { .. })));
    }
}
