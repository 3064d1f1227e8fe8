//! Separability criteria on bipartite states.
//!
//! Entropy and majorization are necessary conditions only, so they never
//! answer `Separable`. The partial-transpose test is exact for `2×2` and
//! `2×3` systems and otherwise also only one-sided.

use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::qlin::{herm_eig, kron_vec, partial_transpose, re, ComplexMatrix, Party, C64};
use crate::random;
use crate::states::{DensityOperator, PureVector};

/// Default margin for all separability decisions.
pub const SEPARABILITY_TOL: f64 = 1e-9;
/// Schmidt coefficients at or below this count as zero.
pub const SCHMIDT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Separable,
    Entangled,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Separable => "Separable",
            Verdict::Entangled => "Entangled",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    Entropy,
    Majorization,
    PartialTranspose,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::Entropy => "entropy",
            Criterion::Majorization => "majorization",
            Criterion::PartialTranspose => "ppt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparabilityVerdict {
    pub verdict: Verdict,
    pub criterion: Criterion,
    /// Entropy: `min(S(ρ) − S(ρ_A), S(ρ) − S(ρ_B))`.
    /// Majorization: largest partial-sum excess of `λ(ρ)` over a reduced spectrum.
    /// Partial transpose: smallest eigenvalue of `ρ^{T_B}`.
    pub evidence: f64,
}

fn bipartite(dims: &[usize], dim: usize) -> Result<(usize, usize)> {
    match dims {
        [a, b] if a * b == dim && *a > 0 && *b > 0 => Ok((*a, *b)),
        _ => Err(Error::shape(format!(
            "{dims:?} is not a bipartition of dimension {dim}"
        ))),
    }
}

/// Schmidt coefficients of a bipartite pure state, descending.
pub fn schmidt(v: &PureVector, dims: &[usize]) -> Result<Vec<f64>> {
    let (da, db) = bipartite(dims, v.dim())?;
    let coeffs = DMatrix::<C64>::from_row_slice(da, db, v.amplitudes());
    let mut sv: Vec<f64> = coeffs.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Number of Schmidt coefficients above [`SCHMIDT_TOL`].
pub fn schmidt_rank(coefficients: &[f64]) -> usize {
    coefficients.iter().filter(|&&c| c > SCHMIDT_TOL).count()
}

fn entropy_of(eigenvalues: &[f64]) -> f64 {
    let s: f64 = eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum();
    s.max(0.0)
}

/// `S(ρ) = −Tr ρ log₂ ρ`, in bits.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    entropy_of(&rho.eigenvalues())
}

/// `|S(a⊗b) − S(a) − S(b)| <= tol`
pub fn entropy_additivity_check(a: &DensityOperator, b: &DensityOperator, tol: f64) -> Result<bool> {
    let joint = von_neumann_entropy(&a.tensor(b)?);
    Ok((joint - von_neumann_entropy(a) - von_neumann_entropy(b)).abs() <= tol)
}

/// Entangled when the whole is less mixed than either part.
pub fn entropy_criterion(rho: &DensityOperator, dims: &[usize], tol: f64) -> Result<SeparabilityVerdict> {
    bipartite(dims, rho.dim())?;
    let s = von_neumann_entropy(rho);
    let sa = von_neumann_entropy(&rho.reduce(dims, &[0])?);
    let sb = von_neumann_entropy(&rho.reduce(dims, &[1])?);
    let evidence = (s - sa).min(s - sb);
    Ok(SeparabilityVerdict {
        verdict: if evidence < -tol {
            Verdict::Entangled
        } else {
            Verdict::Inconclusive
        },
        criterion: Criterion::Entropy,
        evidence,
    })
}

/// Largest `Σ_{i<k} x_i − Σ_{i<k} y_i` over `k`, both spectra descending and
/// zero-padded. Positive means `x` is not majorized by `y`.
fn majorization_excess(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().max(y.len());
    let (mut sx, mut sy, mut worst) = (0.0, 0.0, f64::NEG_INFINITY);
    for k in 0..n {
        sx += x.get(k).copied().unwrap_or(0.0);
        sy += y.get(k).copied().unwrap_or(0.0);
        worst = worst.max(sx - sy);
    }
    worst
}

/// Entangled unless `λ(ρ) ⪯ λ(ρ_A)` and `λ(ρ) ⪯ λ(ρ_B)`.
pub fn majorization_criterion(rho: &DensityOperator, dims: &[usize], tol: f64) -> Result<SeparabilityVerdict> {
    bipartite(dims, rho.dim())?;
    let global = rho.eigenvalues();
    let la = rho.reduce(dims, &[0])?.eigenvalues();
    let lb = rho.reduce(dims, &[1])?.eigenvalues();
    let evidence = majorization_excess(&global, &la).max(majorization_excess(&global, &lb));
    Ok(SeparabilityVerdict {
        verdict: if evidence > tol {
            Verdict::Entangled
        } else {
            Verdict::Inconclusive
        },
        criterion: Criterion::Majorization,
        evidence,
    })
}

/// Smallest eigenvalue of `ρ^{T_B}`.
pub fn min_partial_transpose_eigenvalue(rho: &DensityOperator, dims: &[usize]) -> Result<f64> {
    bipartite(dims, rho.dim())?;
    let pt = partial_transpose(rho.matrix(), dims, Party::B)?;
    Ok(herm_eig(&pt)?.min())
}

/// Whether positivity of the partial transpose also implies separability.
pub fn ppt_is_sufficient(dims: &[usize]) -> bool {
    matches!(dims, [2, 2] | [2, 3] | [3, 2])
}

/// Peres–Horodecki test.
pub fn ppt_criterion(rho: &DensityOperator, dims: &[usize], tol: f64) -> Result<SeparabilityVerdict> {
    let evidence = min_partial_transpose_eigenvalue(rho, dims)?;
    let verdict = if evidence < -tol {
        Verdict::Entangled
    } else if ppt_is_sufficient(dims) {
        Verdict::Separable
    } else {
        Verdict::Inconclusive
    };
    Ok(SeparabilityVerdict {
        verdict,
        criterion: Criterion::PartialTranspose,
        evidence,
    })
}

/// Hermitian operator with `Tr(Wσ) >= 0` on product states and
/// `Tr(Wρ_ref) < 0` on its reference state.
#[derive(Debug, Clone)]
pub struct WitnessOperator {
    matrix: ComplexMatrix,
    reference_state: DensityOperator,
    dims: [usize; 2],
}

impl WitnessOperator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn reference_state(&self) -> &DensityOperator {
        &self.reference_state
    }

    pub fn dims(&self) -> [usize; 2] {
        self.dims
    }

    /// `Tr(W σ)`
    pub fn expectation(&self, sigma: &DensityOperator) -> Result<f64> {
        sigma.expectation(&self.matrix)
    }

    /// `⟨a⊗b| W |a⊗b⟩` for a pure product state.
    pub fn product_expectation(&self, a: &PureVector, b: &PureVector) -> Result<f64> {
        if a.dim() != self.dims[0] || b.dim() != self.dims[1] {
            return Err(Error::shape("product factors do not match the witness dims"));
        }
        let v = kron_vec(a.amplitudes(), b.amplitudes());
        let wv = self.matrix.apply(&v)?;
        Ok(v.iter().zip(&wv).map(|(x, y)| x.conj() * y).sum::<C64>().re)
    }

    /// Minimum of `Tr(Wσ)` over `samples` Haar-random pure product states.
    pub fn min_over_product_samples<R: Rng + ?Sized>(&self, samples: usize, rng: &mut R) -> f64 {
        (0..samples)
            .map(|_| {
                let a = random::pure_state(self.dims[0], rng);
                let b = random::pure_state(self.dims[1], rng);
                self.product_expectation(&a, &b).expect("dims match by construction")
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// `W = (|η⟩⟨η|)^{T_B}` with `η` the eigenvector of the most negative
/// eigenvalue of `ρ^{T_B}`, so that `Tr(Wρ)` equals that eigenvalue.
pub fn witness_from_entangled(rho: &DensityOperator, dims: &[usize]) -> Result<WitnessOperator> {
    let (da, db) = bipartite(dims, rho.dim())?;
    let pt = partial_transpose(rho.matrix(), dims, Party::B)?;
    let spectrum = herm_eig(&pt)?;
    let min = spectrum.min();
    if min >= -SEPARABILITY_TOL {
        return Err(Error::NoWitness { min_eigenvalue: min });
    }
    let eta = spectrum.eigenvector(spectrum.eigenvalues.len() - 1);
    let w = partial_transpose(&ComplexMatrix::projector(&eta), dims, Party::B)?;
    Ok(WitnessOperator {
        matrix: w.hermitian_part(),
        reference_state: rho.clone(),
        dims: [da, db],
    })
}

/// `(|00⟩ + |11⟩)/√2`
pub fn phi_plus() -> PureVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PureVector::new(vec![re(s), re(0.0), re(0.0), re(s)]).expect("normalized")
}

/// `p|φ₊⟩⟨φ₊| + (1−p) I/4`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WernerState {
    p: f64,
}

impl WernerState {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("Werner parameter {p} outside [0, 1]")));
        }
        Ok(WernerState { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn density(&self) -> DensityOperator {
        let bell = ComplexMatrix::projector(phi_plus().amplitudes()).scale_real(self.p);
        let noise = ComplexMatrix::identity(4).scale_real((1.0 - self.p) / 4.0);
        DensityOperator::new_unchecked(&bell + &noise)
    }
}

pub fn werner(p: f64) -> Result<DensityOperator> {
    Ok(WernerState::new(p)?.density())
}

/// Region of the Werner line, derived from the PPT test and the CHSH maximum.
pub fn werner_classify(p: f64) -> Result<crate::bell::Region> {
    crate::bell::classify_regions(&werner(p)?)
}

/// Bisection for a sign change of `f` on `[lo, hi]` (`f(lo) <= 0 < f(hi)`
/// or the reverse), to width `tol`.
pub fn bisect(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> Option<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo.signum() == fhi.signum() && flo != 0.0 && fhi != 0.0 {
        return None;
    }
    let rising = flo < fhi;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let below = f(mid) <= 0.0;
        if below == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// `p` where the smallest partial-transpose eigenvalue of the Werner state
/// crosses zero, located by bisection on `[lo, hi]`.
pub fn werner_ppt_boundary(lo: f64, hi: f64, tol: f64) -> Option<f64> {
    bisect(lo, hi, tol, |p| {
        -min_partial_transpose_eigenvalue(&WernerState { p }.density(), &[2, 2])
            .expect("Werner states are two-qubit")
    })
}
