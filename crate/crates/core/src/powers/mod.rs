//! The graph of powers and intensive valuations on it.
//!
//! Nodes are projectors ("powers"), edges join commuting pairs, and a
//! valuation assigns every node a potentia in `[0, 1]`. Born-rule valuations
//! `P ↦ Tr(ρP)` always satisfy the valuation axioms; `{0, 1}`-valued ones can
//! fail to exist on Kochen–Specker families (see [`find_binary_valuation`]).

pub mod fixtures;

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::qlin::{commutes, ComplexMatrix, C64};
use crate::states::DensityOperator;

/// Tolerance on `P² = P`, `P† = P` and on node identity.
pub const PROJECTOR_TOL: f64 = 1e-8;
/// Potentia at or below this count as zero for the actualization map.
pub const ZERO_THRESHOLD: f64 = 1e-10;
/// Largest graph for which maximal contexts are enumerated.
pub const MAX_CONTEXT_NODES: usize = 24;
/// Largest orthogonal family checked for additivity.
pub const MAX_FAMILY_SIZE: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerNode {
    projector: ComplexMatrix,
    label: String,
}

impl PowerNode {
    pub fn new(projector: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if !projector.is_square() {
            return Err(Error::domain(format!("power '{label}' is not square")));
        }
        let herm = projector.hermiticity_error();
        let idem = projector.matmul(&projector)?.max_abs_diff(&projector);
        if herm > PROJECTOR_TOL || idem > PROJECTOR_TOL {
            return Err(Error::domain(format!(
                "power '{label}' is not a projector (|P - P†| = {herm:e}, |P² - P| = {idem:e})"
            )));
        }
        Ok(PowerNode { projector, label })
    }

    pub fn projector(&self) -> &ComplexMatrix {
        &self.projector
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.projector.trace().re.round() as usize
    }
}

/// A pairwise orthogonal set of nodes whose sum is itself a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalFamily {
    pub members: Vec<usize>,
    pub sum_node: usize,
}

#[derive(Debug, Clone)]
pub struct PowersGraph {
    nodes: Vec<PowerNode>,
    adjacency: Vec<Vec<bool>>,
    identity: usize,
    dim: usize,
}

/// Builds the commutation graph; appends the identity if no node equals it.
pub fn build_graph(mut nodes: Vec<PowerNode>, tol: f64) -> Result<PowersGraph> {
    let dim = match nodes.first() {
        Some(n) => n.projector.rows(),
        None => return Err(Error::shape("a powers graph needs at least one node")),
    };
    if let Some(bad) = nodes.iter().find(|n| n.projector.rows() != dim) {
        return Err(Error::shape(format!(
            "power '{}' has dimension {}, expected {dim}",
            bad.label,
            bad.projector.rows()
        )));
    }
    let id = ComplexMatrix::identity(dim);
    let identity = match nodes
        .iter()
        .position(|n| n.projector.max_abs_diff(&id) <= PROJECTOR_TOL)
    {
        Some(i) => i,
        None => {
            nodes.push(PowerNode::new(id, "I")?);
            nodes.len() - 1
        }
    };
    let n = nodes.len();
    let mut adjacency = vec![vec![false; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let edge = commutes(&nodes[i].projector, &nodes[j].projector, tol)?;
            adjacency[i][j] = edge;
            adjacency[j][i] = edge;
        }
    }
    Ok(PowersGraph {
        nodes,
        adjacency,
        identity,
        dim,
    })
}

impl PowersGraph {
    pub fn nodes(&self) -> &[PowerNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j]
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.adjacency[i][j])
            .collect()
    }

    pub fn position(&self, projector: &ComplexMatrix) -> Option<usize> {
        self.nodes
            .iter()
            .position(|n| n.projector.max_abs_diff(projector) <= PROJECTOR_TOL)
    }

    fn orthogonal(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j]
            && self.nodes[i]
                .projector
                .matmul(&self.nodes[j].projector)
                .map(|m| m.max_abs() <= PROJECTOR_TOL)
                .unwrap_or(false)
    }

    fn is_zero(&self, i: usize) -> bool {
        self.nodes[i].projector.max_abs() <= PROJECTOR_TOL
    }

    /// Pairwise orthogonal pairs of nonzero nodes.
    pub fn orthogonal_pairs(&self) -> Vec<(usize, usize)> {
        let live: Vec<usize> = (0..self.len()).filter(|&i| !self.is_zero(i)).collect();
        let mut out = Vec::new();
        for (a, &i) in live.iter().enumerate() {
            for &j in &live[a + 1..] {
                if self.orthogonal(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Every orthogonal family of 2 to [`MAX_FAMILY_SIZE`] nonzero nodes whose
    /// sum is also a node.
    pub fn orthogonal_families(&self) -> Vec<OrthogonalFamily> {
        let live: Vec<usize> = (0..self.len()).filter(|&i| !self.is_zero(i)).collect();
        let mut out = Vec::new();
        let mut members = Vec::new();
        let zero = ComplexMatrix::zeros(self.dim, self.dim);
        self.extend_families(&live, 0, &mut members, &zero, &mut out);
        out
    }

    fn extend_families(
        &self,
        live: &[usize],
        start: usize,
        members: &mut Vec<usize>,
        sum: &ComplexMatrix,
        out: &mut Vec<OrthogonalFamily>,
    ) {
        if members.len() >= 2 {
            if let Some(s) = self.position(sum) {
                out.push(OrthogonalFamily {
                    members: members.clone(),
                    sum_node: s,
                });
            }
        }
        if members.len() == MAX_FAMILY_SIZE {
            return;
        }
        for (pos, &cand) in live.iter().enumerate().skip(start) {
            if members.iter().all(|&m| self.orthogonal(m, cand)) {
                members.push(cand);
                let next = sum + &self.nodes[cand].projector;
                self.extend_families(live, pos + 1, members, &next, out);
                members.pop();
            }
        }
    }
}

/// A complete subgraph, as sorted node indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Context {
    pub nodes: Vec<usize>,
}

/// All maximal cliques of the commutation graph, sorted.
pub fn maximal_contexts(graph: &PowersGraph) -> Result<Vec<Context>> {
    let n = graph.len();
    if n > MAX_CONTEXT_NODES {
        return Err(Error::Capacity(format!(
            "{n} nodes exceed the {MAX_CONTEXT_NODES}-node limit for context enumeration"
        )));
    }
    let mut out = Vec::new();
    bron_kerbosch(
        graph,
        &mut Vec::new(),
        (0..n).collect(),
        BTreeSet::new(),
        &mut out,
    );
    for ctx in &mut out {
        ctx.nodes.sort_unstable();
    }
    out.sort();
    Ok(out)
}

fn bron_kerbosch(
    graph: &PowersGraph,
    clique: &mut Vec<usize>,
    mut candidates: BTreeSet<usize>,
    mut excluded: BTreeSet<usize>,
    out: &mut Vec<Context>,
) {
    if candidates.is_empty() {
        if excluded.is_empty() {
            out.push(Context {
                nodes: clique.clone(),
            });
        }
        return;
    }
    // pivot on the vertex with most neighbours among the candidates
    let pivot = *candidates
        .union(&excluded)
        .max_by_key(|&&u| candidates.iter().filter(|&&v| graph.adjacent(u, v)).count())
        .expect("candidates is nonempty");
    let branch: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&v| !graph.adjacent(pivot, v))
        .collect();
    for v in branch {
        let neighbours = |set: &BTreeSet<usize>| -> BTreeSet<usize> {
            set.iter().copied().filter(|&u| graph.adjacent(v, u)).collect()
        };
        clique.push(v);
        bron_kerbosch(graph, clique, neighbours(&candidates), neighbours(&excluded), out);
        clique.pop();
        candidates.remove(&v);
        excluded.insert(v);
    }
}

/// Potentia assigned to every node of a graph.
#[derive(Debug, Clone)]
pub struct ISAValuation {
    graph: PowersGraph,
    potentia: Vec<f64>,
}

impl ISAValuation {
    /// Hand-built valuation. Only shape and range are checked here; the
    /// axioms are data for [`check_isa_axioms`].
    pub fn new(graph: PowersGraph, potentia: Vec<f64>) -> Result<Self> {
        if potentia.len() != graph.len() {
            return Err(Error::shape(format!(
                "{} potentia for {} nodes",
                potentia.len(),
                graph.len()
            )));
        }
        if let Some(i) = potentia.iter().position(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::domain(format!(
                "potentia {} of '{}' lies outside [0, 1]",
                potentia[i],
                graph.nodes[i].label
            )));
        }
        Ok(ISAValuation { graph, potentia })
    }

    pub fn graph(&self) -> &PowersGraph {
        &self.graph
    }

    pub fn potentia(&self) -> &[f64] {
        &self.potentia
    }

    pub fn into_parts(self) -> (PowersGraph, Vec<f64>) {
        (self.graph, self.potentia)
    }
}

/// Born-rule valuation `Pᵢ ↦ Tr(ρPᵢ)`.
pub fn isa_from_density(rho: &DensityOperator, graph: &PowersGraph) -> Result<ISAValuation> {
    if rho.dim() != graph.dim {
        return Err(Error::shape(format!(
            "state has dimension {}, graph has {}",
            rho.dim(),
            graph.dim
        )));
    }
    let potentia = graph
        .nodes
        .iter()
        .map(|n| rho.expectation(&n.projector).map(|p| p.clamp(0.0, 1.0)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ISAValuation {
        graph: graph.clone(),
        potentia,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdditivityViolation {
    pub family: OrthogonalFamily,
    /// `Σ Ψ(Pᵢ)` over the members.
    pub member_sum: f64,
    /// `Ψ(Σ Pᵢ)`
    pub sum_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub identity_ok: bool,
    pub identity_value: f64,
    pub families_checked: usize,
    pub additivity_violations: Vec<AdditivityViolation>,
}

impl AxiomReport {
    pub fn is_valid(&self) -> bool {
        self.identity_ok && self.additivity_violations.is_empty()
    }
}

/// Checks `Ψ(I) = 1` and additivity on every recorded orthogonal family.
pub fn check_isa_axioms(val: &ISAValuation, tol: f64) -> AxiomReport {
    let identity_value = val.potentia[val.graph.identity];
    let families = val.graph.orthogonal_families();
    let additivity_violations = families
        .iter()
        .filter_map(|f| {
            let member_sum: f64 = f.members.iter().map(|&m| val.potentia[m]).sum();
            let sum_value = val.potentia[f.sum_node];
            ((member_sum - sum_value).abs() > tol).then(|| AdditivityViolation {
                family: f.clone(),
                member_sum,
                sum_value,
            })
        })
        .collect();
    AxiomReport {
        identity_ok: (identity_value - 1.0).abs() <= tol,
        identity_value,
        families_checked: families.len(),
        additivity_violations,
    }
}

/// `τ ∘ Ψ`: 0 for nodes with zero potentia, 1 otherwise.
pub fn actualization_map(val: &ISAValuation) -> Vec<u8> {
    val.potentia
        .iter()
        .map(|&p| u8::from(p > ZERO_THRESHOLD))
        .collect()
}

/// Residual allowed when solving for `ρ` from potentia.
pub const RECONSTRUCTION_TOL: f64 = 1e-7;

/// Orthonormal (Hilbert–Schmidt) basis of the real space of `d×d` Hermitian matrices.
fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(i, i)] = C64::new(1.0, 0.0);
        out.push(m);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym[(i, j)] = C64::new(s, 0.0);
            sym[(j, i)] = C64::new(s, 0.0);
            out.push(sym);
            let mut anti = ComplexMatrix::zeros(d, d);
            anti[(i, j)] = C64::new(0.0, -s);
            anti[(j, i)] = C64::new(0.0, s);
            out.push(anti);
        }
    }
    out
}

/// Solves `Tr(ρPᵢ) = Ψ(Pᵢ)` for `ρ` by least squares.
///
/// This is the linear inverse of [`isa_from_density`]; it needs the node
/// projectors to span all `d²` real dimensions of the Hermitian matrices.
pub fn reconstruct_density(val: &ISAValuation) -> Result<DensityOperator> {
    let d = val.graph.dim;
    let basis = hermitian_basis(d);
    let n = val.graph.len();
    let a = DMatrix::<f64>::from_fn(n, basis.len(), |i, k| {
        // Tr(H_k P_i)
        let p = &val.graph.nodes[i].projector;
        let h = &basis[k];
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..d {
            for s in 0..d {
                acc += h[(r, s)] * p[(s, r)];
            }
        }
        acc.re
    });
    let b = DVector::from_column_slice(&val.potentia);

    let svd = a.transpose().svd(true, true);
    let smax = svd.singular_values.max();
    let cutoff = 1e-9 * smax.max(1.0);
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    if rank < basis.len() {
        return Err(Error::Underdetermined {
            rank,
            required: basis.len(),
        });
    }
    let pinv_t = svd
        .pseudo_inverse(cutoff)
        .map_err(|e| Error::domain(format!("least-squares solve failed: {e}")))?;
    let x = pinv_t.transpose() * &b;
    let residual = (&a * &x - &b).amax();
    if residual > RECONSTRUCTION_TOL {
        return Err(Error::Residual {
            residual,
            limit: RECONSTRUCTION_TOL,
        });
    }
    let rho = basis
        .iter()
        .zip(x.iter())
        .fold(ComplexMatrix::zeros(d, d), |acc, (h, &c)| &acc + &h.scale_real(c));
    DensityOperator::new(rho)
        .map_err(|e| Error::domain(format!("potentia are not Born values of any state: {e}")))
}

/// Exhaustive search for a `{0, 1}` valuation that respects the valuation
/// axioms on the graph: `ν(I) = 1`, additivity on every recorded orthogonal
/// family, at most one 1 within any orthogonal pair (their sum is a
/// subprojector of `I`), and `ν(0) = 0`.
///
/// Returns the first assignment found, or `None` when the family is
/// Kochen–Specker uncolourable.
pub fn find_binary_valuation(graph: &PowersGraph) -> Option<Vec<u8>> {
    let n = graph.len();
    let families = graph.orthogonal_families();
    let pairs = graph.orthogonal_pairs();

    let mut pair_partners = vec![Vec::new(); n];
    for &(i, j) in &pairs {
        pair_partners[i].push(j);
        pair_partners[j].push(i);
    }
    let mut families_of = vec![Vec::new(); n];
    for (k, f) in families.iter().enumerate() {
        for &m in f.members.iter().chain(std::iter::once(&f.sum_node)) {
            families_of[m].push(k);
        }
    }

    let mut assignment: Vec<Option<u8>> = vec![None; n];
    for (i, a) in assignment.iter_mut().enumerate() {
        if graph.is_zero(i) {
            *a = Some(0);
        }
    }
    assignment[graph.identity] = Some(1);

    // most-constrained nodes first
    let mut order: Vec<usize> = (0..n).filter(|&i| assignment[i].is_none()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(families_of[i].len() + pair_partners[i].len()));

    let consistent = |assignment: &[Option<u8>], node: usize| -> bool {
        if assignment[node] == Some(1)
            && pair_partners[node].iter().any(|&j| assignment[j] == Some(1))
        {
            return false;
        }
        families_of[node].iter().all(|&k| {
            let f = &families[k];
            let mut sum = 0u32;
            let mut open = 0u32;
            for &m in &f.members {
                match assignment[m] {
                    Some(v) => sum += u32::from(v),
                    None => open += 1,
                }
            }
            match assignment[f.sum_node] {
                Some(target) => sum <= u32::from(target) && sum + open >= u32::from(target),
                None => sum <= 1,
            }
        })
    };

    // the fixed nodes must already be consistent
    if !(0..n).all(|i| assignment[i].is_none() || consistent(&assignment, i)) {
        return None;
    }

    fn search(
        depth: usize,
        order: &[usize],
        assignment: &mut Vec<Option<u8>>,
        consistent: &dyn Fn(&[Option<u8>], usize) -> bool,
    ) -> bool {
        let Some(&node) = order.get(depth) else {
            return true;
        };
        for value in [1u8, 0u8] {
            assignment[node] = Some(value);
            if consistent(assignment, node) && search(depth + 1, order, assignment, consistent) {
                return true;
            }
        }
        assignment[node] = None;
        false
    }

    search(0, &order, &mut assignment, &consistent)
        .then(|| assignment.into_iter().map(|v| v.unwrap_or(0)).collect())
}
