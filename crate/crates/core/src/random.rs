//! Random states, unitaries and projector families for sampling checks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::locc::{CPMap, QuantumInstrument};
use crate::qlin::{c, ComplexMatrix, C64};
use crate::states::{DensityOperator, OrthonormalBasis, PureVector};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureVector {
    let v = (0..dim).map(|_| gaussian(rng)).collect();
    PureVector::normalized(v).expect("a Gaussian vector is nonzero almost surely")
}

/// Haar-random unitary (QR of a Ginibre matrix with phase correction).
pub fn unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = nalgebra::DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_nalgebra(&q)
}

pub fn basis<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> OrthonormalBasis {
    OrthonormalBasis::new(unitary(dim, rng)).expect("Haar unitaries are unitary")
}

/// Induced-measure mixed state `G G† / Tr(G G†)` with `G` a `dim×rank` Ginibre matrix.
pub fn density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityOperator {
    let data = (0..dim * rank).map(|_| gaussian(rng)).collect();
    let g = ComplexMatrix::from_vec(dim, rank, data).expect("shape is consistent");
    let m = g.matmul(&g.adjoint()).expect("G G† is defined");
    DensityOperator::from_unnormalized(m).expect("G G† is positive")
}

/// Mixed state of random rank in `1..=dim`.
pub fn density_any_rank<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityOperator {
    let rank = rng.random_range(1..=dim);
    density(dim, rank, rng)
}

/// Projectors onto random subspaces spanned by subsets of a random basis.
pub fn projector_family<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let b = basis(dim, rng);
        let mut p = ComplexMatrix::zeros(dim, dim);
        let mut complement = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            let proj = ComplexMatrix::projector(&b.vector(i));
            if rng.random_bool(0.5) {
                p = &p + &proj;
            } else {
                complement = &complement + &proj;
            }
        }
        out.push(p);
        if out.len() < count {
            out.push(complement);
        }
    }
    out
}

/// Instrument with `kraus_counts[j]` Kraus operators in branch `j`, cut
/// from the first `dim` columns of a Haar unitary.
pub fn instrument<R: Rng + ?Sized>(dim: usize, kraus_counts: &[usize], rng: &mut R) -> QuantumInstrument {
    let total: usize = kraus_counts.iter().sum();
    let u = unitary(dim * total, rng);
    let block = |m: usize| {
        let data = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| u[(m * dim + i, j)])
            .collect();
        ComplexMatrix::from_vec(dim, dim, data).expect("block shape")
    };
    let mut next = 0;
    let branches = kraus_counts
        .iter()
        .map(|&n| {
            let kraus = (next..next + n).map(block).collect();
            next += n;
            CPMap::new(kraus).expect("blocks of an isometry are contractive")
        })
        .collect();
    QuantumInstrument::new(branches).expect("branches share a dimension")
}
