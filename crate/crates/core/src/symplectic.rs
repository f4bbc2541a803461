//! The real symplectic group `Sp(2n, ℝ)`, its compact subgroup `K(n) ≅ U(n)`,
//! the Euler decomposition, and seeded random generators.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
#[allow(unused_imports)] // float methods live in core only on recent toolchains
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, norm, sym_eigen, CMatrix, Matrix};
use crate::rng::{self, Rng};
use crate::state::CovarianceMatrix;
use crate::tolerance::Tolerances;

/// `Jₙ = J₁ ⊕ … ⊕ J₁` with `J₁ = [[0, 1], [−1, 0]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticForm {
    n: usize,
    matrix: Matrix,
}

impl SymplecticForm {
    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

pub fn symplectic_form(n: usize) -> Result<SymplecticForm> {
    if n == 0 {
        return Err(Error::InvalidDimension("mode count must be positive".into()));
    }
    Ok(SymplecticForm {
        n,
        matrix: j_matrix(n),
    })
}

pub(crate) fn j_matrix(n: usize) -> Matrix {
    let mut j = Matrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(2 * k, 2 * k + 1)] = 1.0;
        j[(2 * k + 1, 2 * k)] = -1.0;
    }
    j
}

/// `J·v` without forming `J`.
pub(crate) fn apply_j(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for k in 0..v.len() / 2 {
        out[2 * k] = v[2 * k + 1];
        out[2 * k + 1] = -v[2 * k];
    }
    out
}

/// Outcome of a membership test; the residual is always reported.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymplecticCheck {
    pub is_symplectic: bool,
    pub residual: f64,
}

/// `‖M Jₙ Mᵀ − Jₖ‖_max` for a `2k × 2n` matrix.
pub fn symplectic_residual(m: &Matrix) -> Result<f64> {
    if m.rows() % 2 != 0 || m.cols() % 2 != 0 || m.rows() == 0 {
        return Err(Error::InvalidDimension(alloc::format!(
            "expected even dimensions, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let jn = j_matrix(m.cols() / 2);
    let jk = j_matrix(m.rows() / 2);
    Ok(m.congruence(&jn).max_abs_diff(&jk))
}

pub fn is_symplectic(m: &Matrix, tol: f64) -> Result<SymplecticCheck> {
    if !m.is_square() {
        return Err(Error::InvalidDimension(alloc::format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let residual = symplectic_residual(m)?;
    Ok(SymplecticCheck {
        is_symplectic: residual <= tol,
        residual,
    })
}

/// `‖M Mᵀ − I‖_max`.
pub fn orthogonality_residual(m: &Matrix) -> f64 {
    (m * &m.transpose()).max_abs_diff(&Matrix::identity(m.rows()))
}

/// A validated element of `Sp(2n, ℝ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMatrix {
    n: usize,
    matrix: Matrix,
}

impl SymplecticMatrix {
    /// Accepts `m` when `‖m J mᵀ − J‖_max ≤ tol.sym` and `|det m − 1| ≤ tol.decomp`.
    pub fn new(m: Matrix, tol: &Tolerances) -> Result<Self> {
        let check = is_symplectic(&m, tol.sym)?;
        if !check.is_symplectic {
            return Err(Error::NotSymplectic {
                residual: check.residual,
            });
        }
        let det = m.determinant();
        if (det - 1.0).abs() > tol.decomp {
            return Err(Error::NotSymplectic {
                residual: (det - 1.0).abs(),
            });
        }
        Ok(Self::from_trusted(m))
    }

    pub(crate) fn from_trusted(m: Matrix) -> Self {
        Self {
            n: m.rows() / 2,
            matrix: m,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_trusted(Matrix::identity(2 * n))
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

    /// `S⁻¹ = −J Sᵀ J`, exact up to rounding.
    pub fn inverse(&self) -> Self {
        let j = j_matrix(self.n);
        let inv = &(&j * &self.matrix.transpose()) * &j;
        Self::from_trusted(inv.scale(-1.0))
    }

    pub fn transpose(&self) -> Self {
        Self::from_trusted(self.matrix.transpose())
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> Self {
        Self::from_trusted(&self.matrix * &other.matrix)
    }

    pub fn residual(&self) -> f64 {
        symplectic_residual(&self.matrix).unwrap_or(f64::INFINITY)
    }

    pub fn orthogonality_residual(&self) -> f64 {
        orthogonality_residual(&self.matrix)
    }
}

/// The first `2k` rows of a symplectic matrix: `S Jₙ Sᵀ = Jₖ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSymplectic {
    k: usize,
    n: usize,
    matrix: Matrix,
}

impl TruncatedSymplectic {
    pub fn output_modes(&self) -> usize {
        self.k
    }

    pub fn input_modes(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn residual(&self) -> f64 {
        symplectic_residual(&self.matrix).unwrap_or(f64::INFINITY)
    }

    /// `Tr S A Sᵀ`.
    pub fn congruence_trace(&self, a: &Matrix) -> f64 {
        let s = &self.matrix;
        (0..s.rows())
            .map(|r| {
                let row = s.row(r);
                dot(row, &a.mul_vec(row))
            })
            .sum()
    }
}

pub fn truncate_rows(s: &SymplecticMatrix, k: usize) -> Result<TruncatedSymplectic> {
    if k == 0 || k > s.n {
        return Err(invalid(
            "k",
            alloc::format!("must lie in 1..={}, got {k}", s.n),
        ));
    }
    Ok(TruncatedSymplectic {
        k,
        n: s.n,
        matrix: s.matrix.top_rows(2 * k),
    })
}

/// A validated `n × n` unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexUnitary {
    matrix: CMatrix,
}

impl ComplexUnitary {
    pub fn new(u: CMatrix, tol: f64) -> Result<Self> {
        if u.rows() != u.cols() || u.rows() == 0 {
            return Err(Error::InvalidDimension(alloc::format!(
                "expected a nonempty square matrix, got {}x{}",
                u.rows(),
                u.cols()
            )));
        }
        let residual = unitarity_residual(&u);
        if residual > tol {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { matrix: u })
    }

    pub(crate) fn from_trusted(u: CMatrix) -> Self {
        Self { matrix: u }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_trusted(CMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn mul(&self, other: &ComplexUnitary) -> ComplexUnitary {
        Self::from_trusted(&self.matrix * &other.matrix)
    }

    pub fn residual(&self) -> f64 {
        unitarity_residual(&self.matrix)
    }
}

fn unitarity_residual(u: &CMatrix) -> f64 {
    (u * &u.adjoint()).max_abs_diff(&CMatrix::identity(u.rows()))
}

/// Real `2n × 2n` image of `U` in `K(n)`: each entry `a + ib` becomes the
/// block `[[a, b], [−b, a]]`.
pub fn unitary_to_orthosymplectic(u: &ComplexUnitary) -> SymplecticMatrix {
    SymplecticMatrix::from_trusted(complex_to_real_blocks(&u.matrix))
}

pub(crate) fn complex_to_real_blocks(u: &CMatrix) -> Matrix {
    let n = u.rows();
    let mut t = Matrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..n {
            let z = u[(j, k)];
            t[(2 * j, 2 * k)] = z.re;
            t[(2 * j + 1, 2 * k + 1)] = z.re;
            t[(2 * j, 2 * k + 1)] = z.im;
            t[(2 * j + 1, 2 * k)] = -z.im;
        }
    }
    t
}

/// Inverse of [`unitary_to_orthosymplectic`]. Rejects matrices outside
/// `K(n)`, reporting the larger of the symplectic and orthogonality residuals.
pub fn orthosymplectic_to_unitary(t: &SymplecticMatrix, tol: f64) -> Result<ComplexUnitary> {
    let residual = t.residual().max(t.orthogonality_residual());
    if residual > tol {
        return Err(Error::NotOrthosymplectic { residual });
    }
    let n = t.n;
    let m = &t.matrix;
    let mut u = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let re = 0.5 * (m[(2 * j, 2 * k)] + m[(2 * j + 1, 2 * k + 1)]);
            let im = 0.5 * (m[(2 * j, 2 * k + 1)] - m[(2 * j + 1, 2 * k)]);
            u[(j, k)] = Complex64::new(re, im);
        }
    }
    Ok(ComplexUnitary::from_trusted(u))
}

/// Haar-random unitary: Gram–Schmidt QR of a complex Ginibre matrix, which
/// leaves `R` with a positive real diagonal.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexUnitary {
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let re = rng::normal(rng);
                    let im = rng::normal(rng);
                    Complex64::new(re, im) * FRAC_1_SQRT_2
                })
                .collect()
        })
        .collect();
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = cols[k]
                    .iter()
                    .zip(&cols[j])
                    .map(|(q, c)| q.conj() * c)
                    .sum();
                let qk = cols[k].clone();
                for (c, q) in cols[j].iter_mut().zip(&qk) {
                    *c -= proj * q;
                }
            }
        }
        let nrm = cols[j].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for c in cols[j].iter_mut() {
            *c /= nrm;
        }
    }
    let mut u = CMatrix::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            u[(i, j)] = v;
        }
    }
    ComplexUnitary::from_trusted(u)
}

/// How squeezing parameters `z ≥ 1` are drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SqueezeLaw {
    /// `z` uniform on `[1, max]`.
    Uniform { max: f64 },
    /// `ln z` uniform on `[0, ln max]`.
    LogUniform { max: f64 },
}

impl SqueezeLaw {
    fn max(&self) -> f64 {
        match *self {
            SqueezeLaw::Uniform { max } | SqueezeLaw::LogUniform { max } => max,
        }
    }

    fn validate(&self) -> Result<()> {
        let max = self.max();
        if !(max >= 1.0) || !max.is_finite() {
            return Err(invalid("z_max", alloc::format!("must be ≥ 1, got {max}")));
        }
        Ok(())
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        match *self {
            SqueezeLaw::Uniform { max } => 1.0 + (max - 1.0) * u,
            SqueezeLaw::LogUniform { max } => (max.ln() * u).exp(),
        }
    }
}

/// `diag(z₁, 1/z₁, …, zₙ, 1/zₙ)`.
pub fn squeeze_matrix(z: &[f64]) -> Matrix {
    let d: Vec<f64> = z.iter().flat_map(|&v| [v, 1.0 / v]).collect();
    Matrix::from_diag(&d)
}

/// `S = T¹ Z T²` with Haar-random `T¹, T² ∈ K(n)` and `z` drawn from `law`.
pub fn sample_symplectic<R: Rng + ?Sized>(
    n: usize,
    law: SqueezeLaw,
    rng: &mut R,
) -> Result<SymplecticMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("mode count must be positive".into()));
    }
    law.validate()?;
    let t1 = unitary_to_orthosymplectic(&random_unitary(n, rng));
    let z: Vec<f64> = (0..n).map(|_| law.sample(rng)).collect();
    let t2 = unitary_to_orthosymplectic(&random_unitary(n, rng));
    let s = &(&t1.matrix * &squeeze_matrix(&z)) * &t2.matrix;
    Ok(SymplecticMatrix::from_trusted(s))
}

/// Random symplectic matrix with squeezings uniform in `[1, z_max]`.
pub fn random_symplectic(n: usize, z_max: f64, seed: u64) -> Result<SymplecticMatrix> {
    sample_symplectic(n, SqueezeLaw::Uniform { max: z_max }, &mut rng::stream(seed, 0))
}

/// Squeezing range used by [`random_covariance`].
pub const COVARIANCE_SQUEEZE_MAX: f64 = 4.0;

/// `S⁻¹ D S⁻ᵀ` with `D` the paired diagonal of `ν` drawn uniformly from
/// `nu_range` (any positive lower bound) and `S` from `law`.
pub fn sample_positive_definite<R: Rng + ?Sized>(
    n: usize,
    nu_range: (f64, f64),
    law: SqueezeLaw,
    rng: &mut R,
) -> Result<Matrix> {
    let (lo, hi) = nu_range;
    if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
        return Err(invalid(
            "nu_range",
            alloc::format!("need 0 < min ≤ max, got [{lo}, {hi}]"),
        ));
    }
    let s = sample_symplectic(n, law, rng)?;
    let nu: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            lo + (hi - lo) * u
        })
        .collect();
    let inv = s.inverse();
    Ok(inv.matrix.congruence(&Matrix::paired_diag(&nu)).symmetrized())
}

/// Random physical covariance matrix with symplectic spectrum in `nu_range`.
pub fn random_covariance(n: usize, nu_range: (f64, f64), seed: u64) -> Result<CovarianceMatrix> {
    if !(nu_range.0 >= 1.0) {
        return Err(invalid(
            "nu_range",
            alloc::format!("minimum must be ≥ 1 for a physical state, got {}", nu_range.0),
        ));
    }
    let gamma = sample_positive_definite(
        n,
        nu_range,
        SqueezeLaw::Uniform {
            max: COVARIANCE_SQUEEZE_MAX,
        },
        &mut rng::stream(seed, 0),
    )?;
    CovarianceMatrix::new(gamma, &Tolerances::default())
}

/// Greedy selection of `count` mutually orthogonal 2-planes `(u, partner(u))`
/// from `candidates`, visited in priority order.
///
/// Each accepted candidate is Gram–Schmidt orthogonalized against every vector
/// already chosen (both plane members). Within a degenerate eigenspace this
/// yields a symplectically adapted basis; across well-separated eigenspaces it
/// is a no-op. The scalar returned by `partner` is passed through.
/// Plane `(u, w)` with the scalar from `partner`.
pub(crate) type Plane = (Vec<f64>, Vec<f64>, f64);

pub(crate) fn pair_planes(
    candidates: &[Vec<f64>],
    count: usize,
    partner: impl Fn(&[f64]) -> (Vec<f64>, f64),
) -> Option<Vec<Plane>> {
    fn orthogonalize(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
        let mut r = v.to_vec();
        for _ in 0..2 {
            for b in basis {
                let d = dot(&r, b);
                for (x, y) in r.iter_mut().zip(b) {
                    *x -= d * y;
                }
            }
        }
        r
    }

    let mut chosen: Vec<Vec<f64>> = Vec::with_capacity(2 * count);
    let mut used = vec![false; candidates.len()];
    let mut planes = Vec::with_capacity(count);
    while planes.len() < count {
        let mut pick: Option<(usize, Vec<f64>, f64)> = None;
        let mut fallback: Option<(usize, Vec<f64>, f64)> = None;
        for (i, c) in candidates.iter().enumerate() {
            if used[i] {
                continue;
            }
            let r = orthogonalize(c, &chosen);
            let nr = norm(&r);
            if nr >= FRAC_1_SQRT_2 {
                pick = Some((i, r, nr));
                break;
            }
            if fallback.as_ref().map_or(true, |f| nr > f.2) {
                fallback = Some((i, r, nr));
            }
        }
        let (i, r, nr) = pick.or(fallback)?;
        if nr < 1e-6 {
            return None;
        }
        used[i] = true;
        let u: Vec<f64> = r.iter().map(|x| x / nr).collect();
        let (w_raw, aux) = partner(&u);
        chosen.push(u.clone());
        let w = orthogonalize(&w_raw, &chosen);
        let nw = norm(&w);
        if nw < 1e-6 {
            return None;
        }
        let w: Vec<f64> = w.iter().map(|x| x / nw).collect();
        chosen.push(w.clone());
        planes.push((u, w, aux));
    }
    Some(planes)
}

/// `S = T¹ Z T²` with `T¹, T² ∈ K(n)` and `Z = diag(z₁, 1/z₁, …)`, `z` descending.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerDecomposition {
    pub t1: SymplecticMatrix,
    pub z: Vec<f64>,
    pub t2: SymplecticMatrix,
}

impl EulerDecomposition {
    pub fn recompose(&self) -> Matrix {
        &(&self.t1.matrix * &squeeze_matrix(&self.z)) * &self.t2.matrix
    }
}

/// Euler (Bloch–Messiah) decomposition through the polar factor
/// `P = (SᵀS)^{1/2}`.
///
/// The eigenvectors `v` of `SᵀS` with eigenvalue `z² ≥ 1` pair with `−Jv`
/// (eigenvalue `z⁻²`); stacking the rows `(v₁, −Jv₁, v₂, −Jv₂, …)` gives
/// `T²` with `T² P T²ᵀ = Z`, and `T¹ = S T²ᵀ Z⁻¹`.
pub fn euler_decompose(s: &SymplecticMatrix, tol: &Tolerances) -> Result<EulerDecomposition> {
    let check = is_symplectic(&s.matrix, tol.sym)?;
    if !check.is_symplectic {
        return Err(Error::NotSymplectic {
            residual: check.residual,
        });
    }
    let n = s.n;
    let gram = s.matrix.transpose_congruence(&Matrix::identity(2 * n));
    let eig = sym_eigen(&gram);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.values[b].total_cmp(&eig.values[a]));
    let candidates: Vec<Vec<f64>> = order.iter().map(|&i| eig.vectors.column(i)).collect();

    let planes = pair_planes(&candidates, n, |v| {
        (apply_j(v).iter().map(|x| -x).collect(), 0.0)
    })
    .ok_or(Error::Numerical {
        context: "euler pairing",
        residual: f64::NAN,
    })?;

    let mut rows = Vec::with_capacity(2 * n);
    let mut z = Vec::with_capacity(n);
    for (v, w, _) in &planes {
        let rq = dot(v, &gram.mul_vec(v));
        z.push(rq.max(1.0).sqrt());
        rows.push(v.clone());
        rows.push(w.clone());
    }
    let t2 = Matrix::from_rows(&rows)?;
    let zinv: Vec<f64> = z.iter().flat_map(|&v| [1.0 / v, v]).collect();
    let t1 = &(&s.matrix * &t2.transpose()) * &Matrix::from_diag(&zinv);

    let factor_residual = symplectic_residual(&t1)?
        .max(orthogonality_residual(&t1))
        .max(symplectic_residual(&t2)?)
        .max(orthogonality_residual(&t2));
    if factor_residual > tol.sym {
        return Err(Error::Numerical {
            context: "euler factors",
            residual: factor_residual,
        });
    }
    let out = EulerDecomposition {
        t1: SymplecticMatrix::from_trusted(t1),
        z,
        t2: SymplecticMatrix::from_trusted(t2),
    };
    let recomposition = out.recompose().max_abs_diff(&s.matrix);
    if recomposition > tol.decomp {
        return Err(Error::Numerical {
            context: "euler recomposition",
            residual: recomposition,
        });
    }
    Ok(out)
}
