//! Experimental arrangements: a state seen through screens and detectors.
//!
//! An arrangement pairs a density operator with a factorization into screens
//! and an orthonormal detector basis on each screen. The diagonal of the
//! state written in the product detector basis holds the intensities of the
//! arrangement's powers.
//!
//! Multi-indices map to flat indices in mixed radix with screen 0 most
//! significant (see [`crate::qlin::flatten`]). All screen and detector
//! indices in this module are 0-based.

use crate::error::{Error, Result};
use crate::qlin::{flatten, kron_all, unflatten, ComplexMatrix};
use crate::states::{DensityOperator, OrthonormalBasis, STATE_TOL};

/// Overlap below which a restriction has nothing left to condition on.
pub const CONDITIONING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    screen_dims: Vec<usize>,
}

impl Factorization {
    pub fn new(screen_dims: Vec<usize>) -> Result<Self> {
        if screen_dims.is_empty() || screen_dims.contains(&0) {
            return Err(Error::shape(format!("invalid screen dims {screen_dims:?}")));
        }
        Ok(Factorization { screen_dims })
    }

    pub fn single(degree: usize) -> Self {
        Factorization {
            screen_dims: vec![degree],
        }
    }

    pub fn screen_dims(&self) -> &[usize] {
        &self.screen_dims
    }

    pub fn screens(&self) -> usize {
        self.screen_dims.len()
    }

    /// Total number of detectors, `i₁·…·iₙ`.
    pub fn degree(&self) -> usize {
        self.screen_dims.iter().product()
    }
}

/// One orthonormal detector basis per screen.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorBasis {
    screens: Vec<OrthonormalBasis>,
}

impl DetectorBasis {
    pub fn new(screens: Vec<OrthonormalBasis>) -> Result<Self> {
        if screens.is_empty() {
            return Err(Error::shape("detector basis needs at least one screen"));
        }
        Ok(DetectorBasis { screens })
    }

    pub fn computational(f: &Factorization) -> Self {
        DetectorBasis {
            screens: f.screen_dims.iter().map(|&d| OrthonormalBasis::computational(d)).collect(),
        }
    }

    pub fn screens(&self) -> &[OrthonormalBasis] {
        &self.screens
    }

    /// Product basis as the columns of an `N×N` unitary.
    pub fn product_frame(&self) -> Result<ComplexMatrix> {
        kron_all(self.screens.iter().map(OrthonormalBasis::matrix))
    }

    fn fits(&self, f: &Factorization) -> Result<()> {
        if self.screens.len() != f.screens() {
            return Err(Error::shape(format!(
                "{} detector bases for {} screens",
                self.screens.len(),
                f.screens()
            )));
        }
        for (k, (b, &d)) in self.screens.iter().zip(&f.screen_dims).enumerate() {
            if b.dim() != d {
                return Err(Error::shape(format!(
                    "screen {k} has {d} detectors, basis has dimension {}",
                    b.dim()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentalArrangement {
    factorization: Factorization,
    /// Columns are the product detector vectors in flat order.
    frame: ComplexMatrix,
    /// Per-screen detectors, when the frame is a product over the screens.
    detectors: Option<DetectorBasis>,
    /// The state written in the detector frame: `frame† ρ frame`.
    represented: ComplexMatrix,
}

/// Arrangement of `rho` (given in computational coordinates) under `f` and `b`.
pub fn make_ea(rho: &DensityOperator, f: &Factorization, b: &DetectorBasis) -> Result<ExperimentalArrangement> {
    if f.degree() != rho.dim() {
        return Err(Error::shape(format!(
            "factorization {:?} has degree {}, state has dimension {}",
            f.screen_dims,
            f.degree(),
            rho.dim()
        )));
    }
    b.fits(f)?;
    let frame = b.product_frame()?;
    let represented = represent(rho.matrix(), &frame)?;
    Ok(ExperimentalArrangement {
        factorization: f.clone(),
        frame,
        detectors: Some(b.clone()),
        represented,
    })
}

/// Arrangement whose detector vectors are the columns of an arbitrary
/// unitary `frame`, not necessarily a product over the screens.
pub fn make_ea_in_frame(rho: &DensityOperator, f: &Factorization, frame: &ComplexMatrix) -> Result<ExperimentalArrangement> {
    if f.degree() != rho.dim() || frame.rows() != rho.dim() || frame.cols() != rho.dim() {
        return Err(Error::shape(format!(
            "factorization degree {}, frame {}×{}, state dimension {}",
            f.degree(),
            frame.rows(),
            frame.cols(),
            rho.dim()
        )));
    }
    if !frame.has_orthonormal_columns(STATE_TOL) {
        return Err(Error::domain("detector frame is not unitary"));
    }
    Ok(ExperimentalArrangement {
        factorization: f.clone(),
        represented: represent(rho.matrix(), frame)?,
        frame: frame.clone(),
        detectors: None,
    })
}

fn represent(rho: &ComplexMatrix, frame: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(frame.adjoint().matmul(rho)?.matmul(frame)?.hermitian_part())
}

impl ExperimentalArrangement {
    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    pub fn degree(&self) -> usize {
        self.factorization.degree()
    }

    pub fn detectors(&self) -> Option<&DetectorBasis> {
        self.detectors.as_ref()
    }

    pub fn frame(&self) -> &ComplexMatrix {
        &self.frame
    }

    /// Matrix of coefficients `α` in the detector frame.
    pub fn represented(&self) -> &ComplexMatrix {
        &self.represented
    }

    /// The state pushed back to computational coordinates.
    pub fn abstract_density(&self) -> DensityOperator {
        let m = self
            .frame
            .matmul(&self.represented)
            .and_then(|m| m.matmul(&self.frame.adjoint()))
            .expect("frame and representation share the degree");
        DensityOperator::new_unchecked(m.hermitian_part())
    }

    /// Intensities of all powers in flat order.
    pub fn intensities(&self) -> Vec<f64> {
        self.represented.diagonal().iter().map(|z| z.re).collect()
    }

    fn check_index(&self, multi_index: &[usize]) -> Result<usize> {
        let dims = &self.factorization.screen_dims;
        if multi_index.len() != dims.len()
            || multi_index.iter().zip(dims).any(|(&i, &d)| i >= d)
        {
            return Err(Error::IndexOutOfRange(format!(
                "multi-index {multi_index:?} for screens {dims:?}"
            )));
        }
        Ok(flatten(multi_index, dims))
    }

    /// Intensity distribution of each screen's detectors on their own.
    pub fn screen_marginals(&self) -> Vec<Vec<f64>> {
        let dims = &self.factorization.screen_dims;
        let mut out: Vec<Vec<f64>> = dims.iter().map(|&d| vec![0.0; d]).collect();
        for (flat, alpha) in self.intensities().into_iter().enumerate() {
            for (k, i) in unflatten(flat, dims).into_iter().enumerate() {
                out[k][i] += alpha;
            }
        }
        out
    }

    /// Whether every joint intensity equals the product of its screen marginals.
    pub fn intensities_factorize(&self, tol: f64) -> bool {
        let dims = &self.factorization.screen_dims;
        let marginals = self.screen_marginals();
        self.intensities().into_iter().enumerate().all(|(flat, alpha)| {
            let product: f64 = unflatten(flat, dims)
                .into_iter()
                .enumerate()
                .map(|(k, i)| marginals[k][i])
                .product();
            (alpha - product).abs() <= tol
        })
    }
}

/// Replaces the detectors of one screen. The abstract state is unchanged.
pub fn change_detectors(
    ea: &ExperimentalArrangement,
    screen: usize,
    new_basis: &OrthonormalBasis,
) -> Result<ExperimentalArrangement> {
    let dims = &ea.factorization.screen_dims;
    if screen >= dims.len() {
        return Err(Error::IndexOutOfRange(format!(
            "screen {screen} of {}",
            dims.len()
        )));
    }
    if new_basis.dim() != dims[screen] {
        return Err(Error::shape(format!(
            "screen {screen} has {} detectors, basis has dimension {}",
            dims[screen],
            new_basis.dim()
        )));
    }
    let detectors = ea.detectors.as_ref().ok_or_else(|| {
        Error::domain("detector frame is not a product over the current screens")
    })?;
    let mut screens = detectors.screens.clone();
    screens[screen] = new_basis.clone();
    let detectors = DetectorBasis { screens };
    let frame = detectors.product_frame()?;
    let rho = ea.abstract_density();
    Ok(ExperimentalArrangement {
        factorization: ea.factorization.clone(),
        represented: represent(rho.matrix(), &frame)?,
        frame,
        detectors: Some(detectors),
    })
}

/// Reads the same flat detector frame under another factorization of the
/// same degree. Intensities are only relabeled.
pub fn refactor(ea: &ExperimentalArrangement, f2: &Factorization) -> Result<ExperimentalArrangement> {
    if f2.degree() != ea.degree() {
        return Err(Error::shape(format!(
            "factorization {:?} has degree {}, arrangement has degree {}",
            f2.screen_dims,
            f2.degree(),
            ea.degree()
        )));
    }
    let detectors = if f2 == &ea.factorization {
        ea.detectors.clone()
    } else if ea.frame.max_abs_diff(&ComplexMatrix::identity(ea.degree())) == 0.0 {
        Some(DetectorBasis::computational(f2))
    } else {
        ea.detectors
            .as_ref()
            .and_then(|d| coarsen(d, &ea.factorization, f2))
    };
    Ok(ExperimentalArrangement {
        factorization: f2.clone(),
        frame: ea.frame.clone(),
        detectors,
        represented: ea.represented.clone(),
    })
}

/// Merges consecutive screens' bases when `to` groups the screens of `from`.
fn coarsen(d: &DetectorBasis, from: &Factorization, to: &Factorization) -> Option<DetectorBasis> {
    let mut screens = Vec::with_capacity(to.screens());
    let mut old = from.screen_dims.iter().zip(&d.screens);
    for &target in &to.screen_dims {
        let mut group = Vec::new();
        let mut size = 1;
        while size < target {
            let (&dim, basis) = old.next()?;
            size *= dim;
            group.push(basis.matrix());
        }
        if size != target || group.is_empty() {
            return None;
        }
        screens.push(OrthonormalBasis::new(kron_all(group).ok()?).ok()?);
    }
    old.next().is_none().then_some(DetectorBasis { screens })
}

/// Same degree and same abstract state within `tol` (max entry).
pub fn ea_equivalent(ea1: &ExperimentalArrangement, ea2: &ExperimentalArrangement, tol: f64) -> bool {
    ea1.degree() == ea2.degree()
        && ea1
            .abstract_density()
            .matrix()
            .max_abs_diff(ea2.abstract_density().matrix())
            <= tol
}

/// Conditions on a subset of detectors per screen: `PρP / Tr(PρP)`.
///
/// The result lives on the reduced screens, whose computational detectors
/// are the kept detectors in increasing order.
pub fn restrict(ea: &ExperimentalArrangement, kept_detectors: &[Vec<usize>]) -> Result<ExperimentalArrangement> {
    let dims = &ea.factorization.screen_dims;
    if kept_detectors.len() != dims.len() {
        return Err(Error::shape(format!(
            "{} detector subsets for {} screens",
            kept_detectors.len(),
            dims.len()
        )));
    }
    let mut kept: Vec<Vec<usize>> = Vec::with_capacity(dims.len());
    for (k, (subset, &d)) in kept_detectors.iter().zip(dims).enumerate() {
        let mut s = subset.clone();
        s.sort_unstable();
        s.dedup();
        if s.is_empty() {
            return Err(Error::shape(format!("screen {k} keeps no detectors")));
        }
        if let Some(&bad) = s.iter().find(|&&i| i >= d) {
            return Err(Error::IndexOutOfRange(format!(
                "detector {bad} on screen {k} with {d} detectors"
            )));
        }
        kept.push(s);
    }
    let new_dims: Vec<usize> = kept.iter().map(Vec::len).collect();
    let new_degree: usize = new_dims.iter().product();
    let flat: Vec<usize> = (0..new_degree)
        .map(|j| {
            let sub = unflatten(j, &new_dims);
            let full: Vec<usize> = sub.iter().zip(&kept).map(|(&i, s)| s[i]).collect();
            flatten(&full, dims)
        })
        .collect();

    let mut block = ComplexMatrix::zeros(new_degree, new_degree);
    for (r, &fr) in flat.iter().enumerate() {
        for (c, &fc) in flat.iter().enumerate() {
            block[(r, c)] = ea.represented[(fr, fc)];
        }
    }
    let overlap = block.trace().re;
    if overlap <= CONDITIONING_TOL {
        return Err(Error::DegenerateConditioning { overlap });
    }
    let f = Factorization::new(new_dims)?;
    let rho = DensityOperator::new_unchecked(block.scale_real(1.0 / overlap).hermitian_part());
    make_ea(&rho, &f, &DetectorBasis::computational(&f))
}

/// Intensity `α_{k₁…kₙ}` of the power `|k₁…kₙ⟩⟨k₁…kₙ|`.
pub fn power_intensity(ea: &ExperimentalArrangement, multi_index: &[usize]) -> Result<f64> {
    let flat = ea.check_index(multi_index)?;
    Ok(ea.represented[(flat, flat)].re)
}

/// For each screen `k`, the total intensity on detector `multi_index[k]` of
/// that screen, i.e. `Tr(ρ · I⊗…⊗|k⟩⟨k|⊗…⊗I)`.
pub fn multiscreen_effect(ea: &ExperimentalArrangement, multi_index: &[usize]) -> Result<Vec<f64>> {
    ea.check_index(multi_index)?;
    Ok(ea
        .screen_marginals()
        .into_iter()
        .zip(multi_index)
        .map(|(m, &i)| m[i])
        .collect())
}

/// One arrangement in a complexity chain, with the restriction (applied to
/// the next, larger arrangement) that is claimed to produce it.
#[derive(Debug, Clone)]
pub struct ChainLink {
    pub arrangement: ExperimentalArrangement,
    pub restriction: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainFailure {
    /// Index of the lower arrangement of the failing link.
    pub link: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainReport {
    pub degrees: Vec<usize>,
    pub failure: Option<ChainFailure>,
}

impl ChainReport {
    pub fn is_valid(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks that degrees strictly increase along the chain and that each
/// arrangement is the stated restriction of its successor.
pub fn complexity_chain_check(links: &[ChainLink], tol: f64) -> ChainReport {
    let degrees: Vec<usize> = links.iter().map(|l| l.arrangement.degree()).collect();
    let fail = |link: usize, reason: String| ChainReport {
        degrees: degrees.clone(),
        failure: Some(ChainFailure { link, reason }),
    };
    for (i, pair) in links.windows(2).enumerate() {
        let (lower, upper) = (&pair[0], &pair[1]);
        if lower.arrangement.degree() >= upper.arrangement.degree() {
            return fail(
                i,
                format!(
                    "degree {} is not below {}",
                    lower.arrangement.degree(),
                    upper.arrangement.degree()
                ),
            );
        }
        let Some(kept) = &lower.restriction else {
            return fail(i, "no restriction recorded".into());
        };
        match restrict(&upper.arrangement, kept) {
            Ok(derived) if ea_equivalent(&derived, &lower.arrangement, tol) => {}
            Ok(_) => return fail(i, format!("restriction {kept:?} of the successor gives a different state")),
            Err(e) => return fail(i, format!("restriction {kept:?} failed: {e}")),
        }
    }
    ChainReport {
        degrees,
        failure: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlin::kron;
    use crate::states::{density_from_vector, PureVector};

    const TOL: f64 = 1e-12;

    fn worked_state() -> DensityOperator {
        DensityOperator::new(ComplexMatrix::diag(&[0.5, 0.0, 0.0, 0.5])).unwrap()
    }

    fn two_by_two() -> Factorization {
        Factorization::new(vec![2, 2]).unwrap()
    }

    fn comp_ea(rho: &DensityOperator, dims: Vec<usize>) -> ExperimentalArrangement {
        let f = Factorization::new(dims).unwrap();
        make_ea(rho, &f, &DetectorBasis::computational(&f)).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn construction_examples() {
        let ea = comp_ea(&worked_state(), vec![2, 2]);
        assert!(close(&ea.intensities(), &[0.5, 0.0, 0.0, 0.5]));
        let mixed = comp_ea(&DensityOperator::maximally_mixed(4), vec![2, 2]);
        assert!(close(&mixed.intensities(), &[0.25; 4]));
        let prod = comp_ea(&density_from_vector(&PureVector::basis(4, 0)), vec![2, 2]);
        assert!((power_intensity(&prod, &[0, 0]).unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn construction_errors() {
        let f = Factorization::new(vec![2, 3]).unwrap();
        assert!(matches!(
            make_ea(&worked_state(), &f, &DetectorBasis::computational(&f)),
            Err(Error::Shape(_))
        ));
        let wrong = DetectorBasis::computational(&Factorization::new(vec![4]).unwrap());
        assert!(make_ea(&worked_state(), &two_by_two(), &wrong).is_err());
        let bad = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(OrthonormalBasis::new(bad), Err(Error::Domain(_))));
    }

    #[test]
    fn detector_change_on_worked_example() {
        let ea = comp_ea(&worked_state(), vec![2, 2]);
        let changed = change_detectors(&ea, 0, &OrthonormalBasis::hadamard()).unwrap();
        assert!(close(&changed.intensities(), &[0.25; 4]));
        assert!(ea_equivalent(&ea, &changed, 1e-12));

        // oracle: conjugation by (H ⊗ I) written out; flat order (↑1, ↑2, ↓1, ↓2)
        let h_i = kron(OrthonormalBasis::hadamard().matrix(), &ComplexMatrix::identity(2)).unwrap();
        let oracle = h_i.adjoint().matmul(worked_state().matrix()).unwrap().matmul(&h_i).unwrap();
        assert!(changed.represented().max_abs_diff(&oracle) < 1e-12);
        let r = changed.represented();
        assert!((r[(0, 2)].re - 0.25).abs() < 1e-12 && (r[(2, 0)].re - 0.25).abs() < 1e-12);
        assert!((r[(1, 3)].re + 0.25).abs() < 1e-12 && (r[(3, 1)].re + 0.25).abs() < 1e-12);
        assert!(r[(0, 1)].norm() < 1e-12 && r[(0, 3)].norm() < 1e-12);

        let same = change_detectors(&ea, 1, &OrthonormalBasis::computational(2)).unwrap();
        assert_eq!(same, ea);
        assert!(change_detectors(&ea, 2, &OrthonormalBasis::hadamard()).is_err());
        assert!(change_detectors(&ea, 0, &OrthonormalBasis::computational(3)).is_err());
    }

    #[test]
    fn refactoring_relabels() {
        let rho = DensityOperator::new(ComplexMatrix::diag(&[0.05, 0.1, 0.15, 0.2, 0.22, 0.28])).unwrap();
        let ea = comp_ea(&rho, vec![2, 3]);
        let flipped = refactor(&ea, &Factorization::new(vec![3, 2]).unwrap()).unwrap();
        assert_eq!(flipped.intensities(), ea.intensities());
        assert!((power_intensity(&ea, &[1, 0]).unwrap() - 0.2).abs() < TOL);
        assert!((power_intensity(&flipped, &[1, 1]).unwrap() - 0.2).abs() < TOL);
        let flat = refactor(&ea, &Factorization::single(6)).unwrap();
        assert_eq!(flat.intensities(), ea.intensities());
        assert!(ea_equivalent(&ea, &flat, 0.0));
        assert!(refactor(&ea, &Factorization::new(vec![2, 2]).unwrap()).is_err());

        let worked = comp_ea(&worked_state(), vec![2, 2]);
        let four = refactor(&worked, &Factorization::single(4)).unwrap();
        // index map oracle: (k1, k2) -> 2*k1 + k2
        for (k1, k2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let a = power_intensity(&worked, &[k1, k2]).unwrap();
            let b = power_intensity(&four, &[2 * k1 + k2]).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn refactor_keeps_product_detectors_when_merging_screens() {
        let ea = comp_ea(&worked_state(), vec![2, 2]);
        let changed = change_detectors(&ea, 0, &OrthonormalBasis::hadamard()).unwrap();
        let merged = refactor(&changed, &Factorization::single(4)).unwrap();
        assert!(merged.detectors().is_some());
        let back = refactor(&merged, &two_by_two()).unwrap();
        assert_eq!(back.represented(), changed.represented());
        assert_eq!(back.frame(), changed.frame());
        assert!(back.detectors().is_none());
        assert!(change_detectors(&back, 0, &OrthonormalBasis::hadamard()).is_err());
    }

    #[test]
    fn equivalence_distinguishes_states() {
        let a = comp_ea(&worked_state(), vec![2, 2]);
        let b = comp_ea(&DensityOperator::maximally_mixed(4), vec![2, 2]);
        assert!(!ea_equivalent(&a, &b, 1e-9));
        let c = comp_ea(&DensityOperator::maximally_mixed(2), vec![2]);
        assert!(!ea_equivalent(&b, &c, 1e-9));
    }

    #[test]
    fn restriction_examples() {
        let rho_a = DensityOperator::new(ComplexMatrix::diag(&[0.7, 0.3])).unwrap();
        let prod = rho_a.tensor(&density_from_vector(&PureVector::basis(2, 0))).unwrap();
        let ea = comp_ea(&prod, vec![2, 2]);
        let r = restrict(&ea, &[vec![0, 1], vec![0]]).unwrap();
        assert_eq!(r.factorization().screen_dims(), &[2, 1]);
        assert!(r.abstract_density().matrix().max_abs_diff(rho_a.matrix()) < TOL);

        let mixed = comp_ea(&DensityOperator::maximally_mixed(4), vec![2, 2]);
        let r = restrict(&mixed, &[vec![0, 1], vec![1]]).unwrap();
        assert!(r.abstract_density().matrix().max_abs_diff(&ComplexMatrix::diag(&[0.5, 0.5])) < TOL);

        let worked = comp_ea(&worked_state(), vec![2, 2]);
        let r = restrict(&worked, &[vec![0], vec![0, 1]]).unwrap();
        assert!(close(&r.intensities(), &[1.0, 0.0]));

        assert!(matches!(
            restrict(&worked, &[vec![0], vec![1]]),
            Err(Error::DegenerateConditioning { .. })
        ));
        assert!(restrict(&worked, &[vec![], vec![1]]).is_err());
        assert!(restrict(&worked, &[vec![2], vec![1]]).is_err());
    }

    #[test]
    fn intensities_and_effects() {
        let worked = comp_ea(&worked_state(), vec![2, 2]);
        assert!((power_intensity(&worked, &[0, 0]).unwrap() - 0.5).abs() < TOL);
        assert!(power_intensity(&worked, &[0, 2]).is_err());
        assert!(power_intensity(&worked, &[0]).is_err());
        assert!(close(&multiscreen_effect(&worked, &[0, 0]).unwrap(), &[0.5, 0.5]));

        // partial-trace oracle for the marginals
        let rho_a = worked_state().reduce(&[2, 2], &[0]).unwrap();
        assert!((rho_a.matrix()[(0, 0)].re - 0.5).abs() < TOL);

        let prod = comp_ea(&density_from_vector(&PureVector::basis(4, 0)), vec![2, 2]);
        assert!(close(&multiscreen_effect(&prod, &[0, 0]).unwrap(), &[1.0, 1.0]));
        let mixed = comp_ea(&DensityOperator::maximally_mixed(4), vec![2, 2]);
        assert!(close(&multiscreen_effect(&mixed, &[1, 0]).unwrap(), &[0.5, 0.5]));

        let changed = change_detectors(&worked, 0, &OrthonormalBasis::hadamard()).unwrap();
        let total: f64 = changed.intensities().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_two_screen_arrangement_is_not_two_single_screens() {
        let worked = comp_ea(&worked_state(), vec![2, 2]);
        assert!(!worked.intensities_factorize(1e-9));
        let prod = comp_ea(&DensityOperator::maximally_mixed(4), vec![2, 2]);
        assert!(prod.intensities_factorize(1e-12));
    }

    #[test]
    fn chain_of_restrictions() {
        let ea4 = comp_ea(&worked_state(), vec![2, 2]);
        let kept2 = vec![vec![0], vec![0, 1]];
        let ea2 = restrict(&ea4, &kept2).unwrap();
        let kept1 = vec![vec![0], vec![0]];
        let ea1 = restrict(&ea2, &kept1).unwrap();
        let chain = vec![
            ChainLink { arrangement: ea1, restriction: Some(kept1) },
            ChainLink { arrangement: ea2, restriction: Some(kept2) },
            ChainLink { arrangement: ea4.clone(), restriction: None },
        ];
        let report = complexity_chain_check(&chain, 1e-10);
        assert!(report.is_valid(), "{report:?}");
        assert_eq!(report.degrees, vec![1, 2, 4]);

        assert!(complexity_chain_check(&chain[2..], 1e-10).is_valid());

        let other = comp_ea(&DensityOperator::maximally_mixed(2), vec![2]);
        let bogus = vec![
            ChainLink { arrangement: other, restriction: Some(vec![vec![0], vec![0, 1]]) },
            ChainLink { arrangement: ea4, restriction: None },
        ];
        let report = complexity_chain_check(&bogus, 1e-10);
        assert_eq!(report.failure.as_ref().map(|f| f.link), Some(0));
    }
}
