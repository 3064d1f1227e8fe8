//! Pure vectors, density operators, Bloch geometry and the two purity notions.
//!
//! *Abstract* purity is a basis-free statement (`Tr ρ² = 1`). *Operational*
//! purity asks whether some detector of a given orthonormal basis fires with
//! certainty. The two disagree on superpositions: `(|0⟩ + |1⟩)/√2` is
//! abstractly pure but gives a 50/50 split in the computational basis.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qlin::{self, herm_eig, re, ComplexMatrix, C64};

/// Tolerance for vector normalization and for density-operator trace/Hermiticity.
pub const STATE_TOL: f64 = 1e-9;
/// Eigenvalues down to `-PSD_TOL` are accepted as floating-point noise.
pub const PSD_TOL: f64 = 1e-7;
/// Mixture components lighter than this are dropped.
pub const WEIGHT_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PureVector {
    amplitudes: Vec<C64>,
}

impl PureVector {
    /// Fails unless `Σ|aᵢ|² = 1` within [`STATE_TOL`].
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::shape("empty state vector"));
        }
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm2.is_finite() || (norm2 - 1.0).abs() > STATE_TOL {
            return Err(Error::domain(format!("state vector has squared norm {norm2}")));
        }
        Ok(PureVector { amplitudes })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 || !norm.is_finite() {
            return Err(Error::domain("cannot normalize a zero vector"));
        }
        Ok(PureVector {
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| re(x)).collect())
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut amplitudes = vec![re(0.0); dim];
        amplitudes[i] = re(1.0);
        PureVector { amplitudes }
    }

    /// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`
    pub fn from_bloch_angles(theta: f64, phi: f64) -> Self {
        PureVector {
            amplitudes: vec![
                re((theta / 2.0).cos()),
                C64::from_polar((theta / 2.0).sin(), phi),
            ],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &PureVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn tensor(&self, other: &PureVector) -> PureVector {
        PureVector {
            amplitudes: qlin::kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }
}

/// Trace-one positive semidefinite Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity and unit trace within [`STATE_TOL`] and
    /// eigenvalues no lower than `-PSD_TOL`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, STATE_TOL, PSD_TOL)
    }

    /// [`DensityOperator::new`] with explicit Hermiticity/trace and
    /// eigenvalue margins.
    pub fn with_tolerances(matrix: ComplexMatrix, state_tol: f64, psd_tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::shape(format!(
                "density operator must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermiticity_error();
        if herm > state_tol {
            return Err(Error::domain(format!("not Hermitian (max |ρ - ρ†| = {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > state_tol || tr.im.abs() > state_tol {
            return Err(Error::domain(format!("trace is {} + {}i, expected 1", tr.re, tr.im)));
        }
        let min = herm_eig(&matrix)?.min();
        if min < -psd_tol {
            return Err(Error::domain(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityOperator { matrix })
    }

    /// Skips validation. For operators that are density operators by construction.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        DensityOperator { matrix }
    }

    /// Normalizes a nonzero positive operator to unit trace.
    pub fn from_unnormalized(matrix: ComplexMatrix) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr <= 0.0 || !tr.is_finite() {
            return Err(Error::domain(format!("operator trace {tr} cannot be normalized")));
        }
        Self::new(matrix.hermitian_part().scale_real(1.0 / tr))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `Tr ρ²`
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues, descending, with `[-PSD_TOL, 0)` clipped to zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        herm_eig(&self.matrix)
            .expect("density operators are Hermitian")
            .eigenvalues
            .into_iter()
            .map(|l| if (-PSD_TOL..0.0).contains(&l) { 0.0 } else { l })
            .collect()
    }

    /// `Tr(ρ O)` (real part; exact for Hermitian `O`).
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<f64> {
        if op.rows() != self.dim() || op.cols() != self.dim() {
            return Err(Error::shape(format!(
                "operator is {}x{}, state has dimension {}",
                op.rows(),
                op.cols(),
                self.dim()
            )));
        }
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.matrix[(i, j)] * op[(j, i)];
            }
        }
        Ok(acc.re)
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        Ok(DensityOperator::new_unchecked(qlin::kron(&self.matrix, &other.matrix)?))
    }

    /// `U ρ U†`
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<DensityOperator> {
        if u.rows() != self.dim() || !u.has_orthonormal_columns(1e-9) {
            return Err(Error::domain("evolution operator is not unitary on this space"));
        }
        Ok(DensityOperator::new_unchecked(
            self.matrix.conjugate_by(u)?.hermitian_part(),
        ))
    }

    /// Reduced state on the kept factors (0-based).
    pub fn reduce(&self, dims: &[usize], keep: &[usize]) -> Result<DensityOperator> {
        let m = qlin::partial_trace(&self.matrix, dims, keep)?;
        Ok(DensityOperator::new_unchecked(m.hermitian_part()))
    }
}

/// Projector `|v⟩⟨v|`.
pub fn density_from_vector(v: &PureVector) -> DensityOperator {
    DensityOperator::new_unchecked(ComplexMatrix::projector(v.amplitudes()))
}

/// An orthonormal basis of `ℂ^d`, stored as the columns of a unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    columns: ComplexMatrix,
}

impl OrthonormalBasis {
    /// Fails unless the square column matrix is unitary within `1e-9`.
    pub fn new(columns: ComplexMatrix) -> Result<Self> {
        if !columns.is_square() {
            return Err(Error::shape(format!(
                "basis needs {} vectors of dimension {}, got {}",
                columns.rows(),
                columns.rows(),
                columns.cols()
            )));
        }
        if !columns.has_orthonormal_columns(STATE_TOL) {
            return Err(Error::domain("basis vectors are not orthonormal"));
        }
        Ok(OrthonormalBasis { columns })
    }

    pub fn from_vectors(vectors: &[PureVector]) -> Result<Self> {
        let cols: Vec<Vec<C64>> = vectors.iter().map(|v| v.amplitudes().to_vec()).collect();
        Self::new(ComplexMatrix::from_columns(&cols)?)
    }

    pub fn computational(dim: usize) -> Self {
        OrthonormalBasis {
            columns: ComplexMatrix::identity(dim),
        }
    }

    /// `{(|0⟩+|1⟩)/√2, (|0⟩−|1⟩)/√2}`
    pub fn hadamard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        OrthonormalBasis {
            columns: ComplexMatrix::from_real(2, 2, &[s, s, s, -s]).expect("2x2"),
        }
    }

    /// Discrete Fourier basis of `ℂ^d`.
    pub fn fourier(dim: usize) -> Self {
        let norm = 1.0 / (dim as f64).sqrt();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = C64::from_polar(norm, 2.0 * PI * (i * j) as f64 / dim as f64);
            }
        }
        OrthonormalBasis { columns: m }
    }

    pub fn dim(&self) -> usize {
        self.columns.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.columns
    }

    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.columns.col(i)
    }

    pub fn is_computational(&self, tol: f64) -> bool {
        self.columns.max_abs_diff(&ComplexMatrix::identity(self.dim())) <= tol
    }
}

/// `Tr ρ² >= 1 - tol`
pub fn abstract_purity(rho: &DensityOperator, tol: f64) -> bool {
    rho.purity() >= 1.0 - tol
}

/// Whether some detector of `basis` fires with probability `>= 1 - tol`.
pub fn operational_purity(rho: &DensityOperator, basis: &OrthonormalBasis, tol: f64) -> Result<bool> {
    if basis.dim() != rho.dim() {
        return Err(Error::shape(format!(
            "basis has dimension {}, state has {}",
            basis.dim(),
            rho.dim()
        )));
    }
    Ok(detector_probabilities(rho, basis)
        .into_iter()
        .any(|p| p >= 1.0 - tol))
}

/// Existential reading: is there *some* maximal test with a certain outcome?
/// Returns such a basis (the eigenbasis of `ρ`) when one exists.
pub fn operational_purity_witness(rho: &DensityOperator, tol: f64) -> Option<OrthonormalBasis> {
    let spectrum = herm_eig(rho.matrix()).ok()?;
    if spectrum.max() < 1.0 - tol {
        return None;
    }
    OrthonormalBasis::new(spectrum.eigenvectors).ok()
}

/// `⟨i|ρ|i⟩` for every basis vector.
pub fn detector_probabilities(rho: &DensityOperator, basis: &OrthonormalBasis) -> Vec<f64> {
    (0..basis.dim())
        .map(|i| {
            let v = basis.vector(i);
            let rv = rho.matrix().apply(&v).expect("dimensions checked");
            v.iter().zip(&rv).map(|(a, b)| a.conj() * b).sum::<C64>().re
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PurityReport {
    pub abstract_pure: bool,
    pub operational_pure: bool,
}

pub fn purity_agreement_report(rho: &DensityOperator, basis: &OrthonormalBasis, tol: f64) -> Result<PurityReport> {
    Ok(PurityReport {
        abstract_pure: abstract_purity(rho, tol),
        operational_pure: operational_purity(rho, basis, tol)?,
    })
}

/// A point of the Bloch ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let r = (x * x + y * y + z * z).sqrt();
        if !r.is_finite() || r > 1.0 + STATE_TOL {
            return Err(Error::domain(format!("Bloch vector norm {r} exceeds 1")));
        }
        Ok(BlochPoint { x, y, z })
    }

    /// Surface point for `θ ∈ [0, π)`, `φ ∈ [0, 2π)`.
    pub fn from_angles(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..PI).contains(&theta) || !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::domain(format!("angles (θ={theta}, φ={phi}) out of range")));
        }
        Ok(BlochPoint {
            x: theta.sin() * phi.cos(),
            y: theta.sin() * phi.sin(),
            z: theta.cos(),
        })
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_on_surface(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// `(I + xσ_x + yσ_y + zσ_z)/2`
    pub fn to_density(&self) -> DensityOperator {
        let [sx, sy, sz] = qlin::pauli();
        let m = &(&(&ComplexMatrix::identity(2) + &sx.scale_real(self.x)) + &sy.scale_real(self.y))
            + &sz.scale_real(self.z);
        DensityOperator::new_unchecked(m.scale_real(0.5))
    }

    /// `(Tr ρσ_x, Tr ρσ_y, Tr ρσ_z)` for a qubit state.
    pub fn from_density(rho: &DensityOperator) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::shape(format!(
                "Bloch coordinates need a qubit, state has dimension {}",
                rho.dim()
            )));
        }
        let [sx, sy, sz] = qlin::pauli();
        Ok(BlochPoint {
            x: rho.expectation(&sx)?,
            y: rho.expectation(&sy)?,
            z: rho.expectation(&sz)?,
        })
    }
}

/// Projection of a vector onto a unit axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Shadow {
    /// `⟨axis|v⟩`; its squared modulus is the Born intensity on the axis.
    pub coefficient: C64,
    pub projection: Vec<C64>,
}

pub fn shadow(v: &PureVector, axis: &PureVector) -> Result<Shadow> {
    if v.dim() != axis.dim() {
        return Err(Error::shape(format!(
            "vector dimension {} vs axis dimension {}",
            v.dim(),
            axis.dim()
        )));
    }
    let coefficient = axis.inner(v);
    Ok(Shadow {
        coefficient,
        projection: axis.amplitudes().iter().map(|a| a * coefficient).collect(),
    })
}

/// Hilbert–Schmidt distance `√Tr((P−Q)²)` between two rank-one projectors.
pub fn projective_distance(p: &DensityOperator, q: &DensityOperator) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::shape(format!("dimensions {} and {}", p.dim(), q.dim())));
    }
    for (name, rho) in [("first", p), ("second", q)] {
        if !abstract_purity(rho, STATE_TOL) {
            return Err(Error::domain(format!(
                "{name} operand is not a rank-one projector (Tr ρ² = {})",
                rho.purity()
            )));
        }
    }
    Ok((p.matrix() - q.matrix()).frobenius_norm())
}

/// A convex combination `Σ wᵢ |vᵢ⟩⟨vᵢ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureDecomposition {
    weights: Vec<f64>,
    components: Vec<PureVector>,
}

impl MixtureDecomposition {
    pub fn new(weights: Vec<f64>, components: Vec<PureVector>) -> Result<Self> {
        if weights.len() != components.len() || weights.is_empty() {
            return Err(Error::shape(format!(
                "{} weights for {} components",
                weights.len(),
                components.len()
            )));
        }
        let dim = components[0].dim();
        if components.iter().any(|c| c.dim() != dim) {
            return Err(Error::shape("components have differing dimensions"));
        }
        if weights.iter().any(|&w| w.is_nan() || w < 0.0) {
            return Err(Error::domain("negative or NaN mixture weight"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::domain(format!("weights sum to {total}")));
        }
        let (weights, components) = weights
            .into_iter()
            .zip(components)
            .filter(|(w, _)| *w > WEIGHT_CUTOFF)
            .unzip();
        Ok(MixtureDecomposition { weights, components })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[PureVector] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let dim = self.components[0].dim();
        self.weights
            .iter()
            .zip(&self.components)
            .fold(ComplexMatrix::zeros(dim, dim), |acc, (w, v)| {
                &acc + &ComplexMatrix::projector(v.amplitudes()).scale_real(*w)
            })
    }

    /// `|⟨uᵢ|vⱼ⟩|²` between the components of two decompositions.
    pub fn overlap_matrix(&self, other: &MixtureDecomposition) -> Vec<Vec<f64>> {
        self.components
            .iter()
            .map(|u| other.components.iter().map(|v| u.inner(v).norm_sqr()).collect())
            .collect()
    }
}

/// Eigen-ensemble of `ρ`: weights are the nonzero eigenvalues.
pub fn spectral_decomposition(rho: &DensityOperator) -> MixtureDecomposition {
    let spectrum = herm_eig(rho.matrix()).expect("density operators are Hermitian");
    let mut weights = Vec::new();
    let mut components = Vec::new();
    for (i, &l) in spectrum.eigenvalues.iter().enumerate() {
        if l > WEIGHT_CUTOFF {
            weights.push(l);
            components.push(PureVector {
                amplitudes: spectrum.eigenvector(i),
            });
        }
    }
    // clipped noise eigenvalues leave the sum a hair off 1
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    MixtureDecomposition { weights, components }
}

/// Remixes an ensemble through an isometry: `√w'ᵢ|v'ᵢ⟩ = Σⱼ Uᵢⱼ √wⱼ|vⱼ⟩`.
///
/// `mixer` is `m×k` with orthonormal columns, `k` the number of components.
/// The resulting ensemble represents the same density operator.
pub fn alternative_decomposition(d: &MixtureDecomposition, mixer: &ComplexMatrix) -> Result<MixtureDecomposition> {
    if mixer.cols() != d.len() || mixer.rows() < mixer.cols() {
        return Err(Error::shape(format!(
            "mixer is {}x{}, decomposition has {} components",
            mixer.rows(),
            mixer.cols(),
            d.len()
        )));
    }
    if !mixer.has_orthonormal_columns(STATE_TOL) {
        return Err(Error::domain("mixer is not an isometry"));
    }
    let dim = d.components[0].dim();
    let mut weights = Vec::new();
    let mut components = Vec::new();
    for i in 0..mixer.rows() {
        let mut v = vec![re(0.0); dim];
        for (j, (w, comp)) in d.weights.iter().zip(&d.components).enumerate() {
            let coeff = mixer[(i, j)] * w.sqrt();
            for (slot, a) in v.iter_mut().zip(comp.amplitudes()) {
                *slot += coeff * a;
            }
        }
        let weight: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        if weight > WEIGHT_CUTOFF {
            weights.push(weight);
            components.push(PureVector::normalized(v)?);
        }
    }
    Ok(MixtureDecomposition { weights, components })
}
