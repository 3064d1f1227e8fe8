//! Quantum instruments as Kraus families, and one-way local instruments.
//!
//! Only single-round instruments are built here. The wider classes
//! `LOCC₁ ⊂ LOCC₂ ⊂ … ⊂ LOCC_ℕ ⊂ closure(LOCC) ⊂ SEP` have no membership test.

use crate::error::{Error, Result};
use crate::qlin::{herm_eig, kron, pauli, ComplexMatrix};
use crate::states::{DensityOperator, OrthonormalBasis};

/// Completeness sums must match the identity to this.
pub const COMPLETENESS_TOL: f64 = 1e-8;
/// Branches with probability at or below this carry no post-state.
pub const ZERO_PROBABILITY: f64 = 1e-12;
pub const MAX_KRAUS_RANK: usize = 16;

/// Completely positive, trace non-increasing map `ρ ↦ Σ K ρ K†`.
#[derive(Debug, Clone, PartialEq)]
pub struct CPMap {
    kraus: Vec<ComplexMatrix>,
}

fn completeness(kraus: &[ComplexMatrix]) -> ComplexMatrix {
    let n = kraus[0].cols();
    kraus.iter().fold(ComplexMatrix::zeros(n, n), |acc, k| {
        &acc + &k.adjoint().matmul(k).expect("Kraus shapes agree")
    })
}

impl CPMap {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::shape("a CP map needs at least one Kraus operator"))?;
        let (out_dim, in_dim) = (first.rows(), first.cols());
        if kraus.len() > MAX_KRAUS_RANK {
            return Err(Error::Capacity(format!(
                "{} Kraus operators exceed the cap of {MAX_KRAUS_RANK}",
                kraus.len()
            )));
        }
        if let Some(k) = kraus.iter().find(|k| k.rows() != out_dim || k.cols() != in_dim) {
            return Err(Error::shape(format!(
                "Kraus operator is {}×{}, expected {out_dim}×{in_dim}",
                k.rows(),
                k.cols()
            )));
        }
        let top = herm_eig(&completeness(&kraus).hermitian_part())?.max();
        if top > 1.0 + COMPLETENESS_TOL {
            return Err(Error::domain(format!(
                "Σ K†K has eigenvalue {top} > 1, the map increases trace"
            )));
        }
        Ok(CPMap { kraus })
    }

    pub fn identity(dim: usize) -> Self {
        CPMap { kraus: vec![ComplexMatrix::identity(dim)] }
    }

    /// Qubit depolarizing channel `ρ ↦ (1−p)ρ + p I/2`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("depolarizing parameter {p} outside [0, 1]")));
        }
        let mut kraus = vec![ComplexMatrix::identity(2).scale_real((1.0 - 0.75 * p).sqrt())];
        kraus.extend(pauli().iter().map(|s| s.scale_real((p / 4.0).sqrt())));
        CPMap::new(kraus)
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn in_dim(&self) -> usize {
        self.kraus[0].cols()
    }

    pub fn out_dim(&self) -> usize {
        self.kraus[0].rows()
    }

    /// Largest entry of `|Σ K†K − I|`.
    pub fn completeness_error(&self) -> f64 {
        completeness(&self.kraus).max_abs_diff(&ComplexMatrix::identity(self.in_dim()))
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.completeness_error() <= tol
    }

    /// Unnormalized image `Σ K ρ K†`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.in_dim() || !rho.is_square() {
            return Err(Error::shape(format!(
                "map acts on dimension {}, state is {}×{}",
                self.in_dim(),
                rho.rows(),
                rho.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.out_dim(), self.out_dim());
        for k in &self.kraus {
            out = &out + &k.matmul(rho)?.matmul(&k.adjoint())?;
        }
        Ok(out)
    }

    /// `self ⊗ other`, Kraus operators ordered with `self` most significant.
    pub fn tensor(&self, other: &CPMap) -> Result<CPMap> {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(kron(a, b)?);
            }
        }
        if kraus.len() > MAX_KRAUS_RANK {
            return Err(Error::Capacity(format!(
                "tensor product has Kraus rank {} > {MAX_KRAUS_RANK}",
                kraus.len()
            )));
        }
        Ok(CPMap { kraus })
    }
}

/// Finite family of CP maps, one per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumInstrument {
    branches: Vec<CPMap>,
}

impl QuantumInstrument {
    pub fn new(branches: Vec<CPMap>) -> Result<Self> {
        let first = branches
            .first()
            .ok_or_else(|| Error::shape("an instrument needs at least one branch"))?;
        let in_dim = first.in_dim();
        if let Some((j, b)) = branches.iter().enumerate().find(|(_, b)| b.in_dim() != in_dim) {
            return Err(Error::shape(format!(
                "branch {j} acts on dimension {}, branch 0 on {in_dim}",
                b.in_dim()
            )));
        }
        Ok(QuantumInstrument { branches })
    }

    /// One single-Kraus branch per projector.
    pub fn projective(projectors: &[ComplexMatrix]) -> Result<Self> {
        let branches = projectors
            .iter()
            .map(|p| CPMap::new(vec![p.clone()]))
            .collect::<Result<_>>()?;
        QuantumInstrument::new(branches)
    }

    /// Lüders measurement in `basis`.
    pub fn measure_in(basis: &OrthonormalBasis) -> Self {
        let projectors: Vec<_> = (0..basis.dim())
            .map(|i| ComplexMatrix::projector(&basis.vector(i)))
            .collect();
        QuantumInstrument::projective(&projectors).expect("basis projectors are a valid family")
    }

    pub fn branches(&self) -> &[CPMap] {
        &self.branches
    }

    pub fn in_dim(&self) -> usize {
        self.branches[0].in_dim()
    }

    /// Largest entry of `|Σ_j Σ_k K†K − I|`.
    pub fn completeness_error(&self) -> f64 {
        let all: Vec<ComplexMatrix> = self.branches.iter().flat_map(|b| b.kraus.iter().cloned()).collect();
        completeness(&all).max_abs_diff(&ComplexMatrix::identity(self.in_dim()))
    }
}

pub fn is_valid_instrument(ins: &QuantumInstrument, tol: f64) -> bool {
    ins.completeness_error() <= tol
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchOutcome {
    pub probability: f64,
    /// Renormalized post-measurement state; `None` when the branch cannot occur.
    pub state: Option<DensityOperator>,
}

/// `p_j = Tr E_j(ρ)` and `E_j(ρ)/p_j` for every branch.
pub fn apply_instrument(ins: &QuantumInstrument, rho: &DensityOperator) -> Result<Vec<BranchOutcome>> {
    ins.branches
        .iter()
        .map(|branch| {
            let image = branch.apply(rho.matrix())?;
            let probability = image.trace().re;
            let state = (probability > ZERO_PROBABILITY)
                .then(|| DensityOperator::new_unchecked(image.scale_real(1.0 / probability).hermitian_part()));
            Ok(BranchOutcome { probability: probability.max(0.0), state })
        })
        .collect()
}

/// Branch `j` acts as `T₁ ⊗ … ⊗ E_{k,j} ⊗ … ⊗ T_n`: party `k` applies
/// `local`, every other party applies its trace-preserving map from
/// `bystanders` (given in party order, skipping `k`).
pub fn one_way_local(
    n_parties: usize,
    k: usize,
    local: &QuantumInstrument,
    bystanders: &[CPMap],
) -> Result<QuantumInstrument> {
    if k >= n_parties {
        return Err(Error::IndexOutOfRange(format!("party {k} of {n_parties}")));
    }
    if bystanders.len() + 1 != n_parties {
        return Err(Error::shape(format!(
            "{n_parties} parties need {} bystander maps, got {}",
            n_parties - 1,
            bystanders.len()
        )));
    }
    if let Some((i, t)) = bystanders
        .iter()
        .enumerate()
        .find(|(_, t)| !t.is_trace_preserving(COMPLETENESS_TOL))
    {
        return Err(Error::domain(format!(
            "bystander map {i} is not trace-preserving (error {})",
            t.completeness_error()
        )));
    }
    if !is_valid_instrument(local, COMPLETENESS_TOL) {
        return Err(Error::domain(format!(
            "local instrument is incomplete (error {})",
            local.completeness_error()
        )));
    }
    let branches = local
        .branches
        .iter()
        .map(|e| {
            let mut factors: Vec<&CPMap> = bystanders.iter().collect();
            factors.insert(k, e);
            let (head, rest) = factors.split_first().expect("at least one party");
            rest.iter().try_fold((*head).clone(), |acc, m| acc.tensor(m))
        })
        .collect::<Result<_>>()?;
    QuantumInstrument::new(branches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::phi_plus;
    use crate::qlin::re;
    use crate::states::{density_from_vector, PureVector};

    fn basis_projector(dim: usize, i: usize) -> ComplexMatrix {
        ComplexMatrix::projector(PureVector::basis(dim, i).amplitudes())
    }

    #[test]
    fn validity_examples() {
        let p = basis_projector(2, 0);
        let q = &ComplexMatrix::identity(2) - &p;
        let ins = QuantumInstrument::projective(&[p.clone(), q]).unwrap();
        assert!(is_valid_instrument(&ins, 1e-8));
        assert!(!is_valid_instrument(&QuantumInstrument::projective(&[p]).unwrap(), 1e-8));
        let dep = QuantumInstrument::new(vec![CPMap::depolarizing(0.3).unwrap()]).unwrap();
        assert!(is_valid_instrument(&dep, 1e-8));
    }

    #[test]
    fn shape_and_domain_errors() {
        assert!(matches!(
            QuantumInstrument::new(vec![CPMap::identity(2), CPMap::identity(3)]),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            CPMap::new(vec![ComplexMatrix::identity(2), ComplexMatrix::identity(3)]),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            CPMap::new(vec![ComplexMatrix::identity(2).scale_real(1.5)]),
            Err(Error::Domain(_))
        ));
        let many = vec![ComplexMatrix::identity(2).scale_real(0.2); 17];
        assert!(matches!(CPMap::new(many), Err(Error::Capacity(_))));
    }

    #[test]
    fn born_example() {
        let plus = density_from_vector(&PureVector::from_real(&[1.0, 1.0].map(|x: f64| x / 2f64.sqrt())).unwrap());
        let ins = QuantumInstrument::measure_in(&OrthonormalBasis::computational(2));
        let out = apply_instrument(&ins, &plus).unwrap();
        for (j, o) in out.iter().enumerate() {
            assert!((o.probability - 0.5).abs() < 1e-12);
            let state = o.state.as_ref().unwrap();
            assert!(state.matrix().max_abs_diff(&basis_projector(2, j)) < 1e-12);
        }
    }

    #[test]
    fn identity_branch_keeps_state() {
        let rho = DensityOperator::new(ComplexMatrix::diag(&[0.25, 0.75])).unwrap();
        let ins = QuantumInstrument::new(vec![CPMap::identity(2)]).unwrap();
        let out = apply_instrument(&ins, &rho).unwrap();
        assert_eq!(out.len(), 1);
        assert!((out[0].probability - 1.0).abs() < 1e-12);
        assert!(out[0].state.as_ref().unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn depolarizing_oracle() {
        let rho = density_from_vector(&PureVector::basis(2, 0));
        let out = CPMap::depolarizing(0.4).unwrap().apply(rho.matrix()).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::diag(&[0.8, 0.2])) < 1e-12);
    }

    #[test]
    fn worked_arrangement_screen_measurement() {
        // ½|11⟩⟨11| + ½|22⟩⟨22| on two qubits, detectors labelled 1 and 2
        let rho = DensityOperator::new(ComplexMatrix::diag(&[0.5, 0.0, 0.0, 0.5])).unwrap();
        let ins = one_way_local(
            2,
            0,
            &QuantumInstrument::measure_in(&OrthonormalBasis::computational(2)),
            &[CPMap::identity(2)],
        )
        .unwrap();
        let out = apply_instrument(&ins, &rho).unwrap();
        assert!((out[0].probability - 0.5).abs() < 1e-12 && (out[1].probability - 0.5).abs() < 1e-12);
        assert!(out[0].state.as_ref().unwrap().matrix().max_abs_diff(&basis_projector(4, 0)) < 1e-12);
        assert!(out[1].state.as_ref().unwrap().matrix().max_abs_diff(&basis_projector(4, 3)) < 1e-12);
    }

    #[test]
    fn zero_probability_branch() {
        let rho = density_from_vector(&PureVector::basis(2, 0));
        let out = apply_instrument(&QuantumInstrument::measure_in(&OrthonormalBasis::computational(2)), &rho).unwrap();
        assert!(out[1].probability.abs() < 1e-15 && out[1].state.is_none());
    }

    #[test]
    fn steering_phi_plus() {
        let local = QuantumInstrument::measure_in(&OrthonormalBasis::computational(2));
        let ins = one_way_local(2, 0, &local, &[CPMap::identity(2)]).unwrap();
        assert!(is_valid_instrument(&ins, 1e-8));
        let out = apply_instrument(&ins, &density_from_vector(&phi_plus())).unwrap();
        for (j, o) in out.iter().enumerate() {
            assert!((o.probability - 0.5).abs() < 1e-10);
            let bob = o.state.as_ref().unwrap().reduce(&[2, 2], &[1]).unwrap();
            assert!(bob.matrix().max_abs_diff(&basis_projector(2, j)) < 1e-10);
        }
    }

    #[test]
    fn product_marginal_untouched() {
        let a = DensityOperator::new(ComplexMatrix::from_vec(2, 2, vec![re(0.6), re(0.2), re(0.2), re(0.4)]).unwrap()).unwrap();
        let b = DensityOperator::new(ComplexMatrix::diag(&[0.1, 0.9])).unwrap();
        let rho = a.tensor(&b).unwrap();
        let local = QuantumInstrument::measure_in(&OrthonormalBasis::hadamard());
        let ins = one_way_local(2, 0, &local, &[CPMap::identity(2)]).unwrap();
        for o in apply_instrument(&ins, &rho).unwrap() {
            let bob = o.state.unwrap().reduce(&[2, 2], &[1]).unwrap();
            assert!(bob.matrix().max_abs_diff(b.matrix()) < 1e-12);
        }
    }

    #[test]
    fn one_way_local_errors() {
        let local = QuantumInstrument::measure_in(&OrthonormalBasis::computational(2));
        let leaky = CPMap::new(vec![basis_projector(2, 0)]).unwrap();
        assert!(matches!(one_way_local(2, 0, &local, &[leaky]), Err(Error::Domain(_))));
        assert!(one_way_local(2, 2, &local, &[CPMap::identity(2)]).is_err());
        assert!(one_way_local(3, 0, &local, &[CPMap::identity(2)]).is_err());
    }

    #[test]
    fn three_party_ordering() {
        // party 1 of three measured; Kraus ops are I ⊗ |j⟩⟨j| ⊗ I
        let local = QuantumInstrument::measure_in(&OrthonormalBasis::computational(2));
        let ins = one_way_local(3, 1, &local, &[CPMap::identity(2), CPMap::identity(2)]).unwrap();
        let expect = kron(&kron(&ComplexMatrix::identity(2), &basis_projector(2, 1)).unwrap(), &ComplexMatrix::identity(2)).unwrap();
        assert!(ins.branches()[1].kraus()[0].max_abs_diff(&expect) < 1e-15);
    }
}
