//! Bundled projector families.

use crate::qlin::{c, re, ComplexMatrix};
use crate::powers::PowerNode;

fn ray(label: impl Into<String>, v: &[crate::C64]) -> PowerNode {
    let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let unit: Vec<_> = v.iter().map(|a| a / norm).collect();
    PowerNode::new(ComplexMatrix::projector(&unit), label).expect("unit rays give projectors")
}

/// `|i⟩⟨i|` for every computational basis vector.
pub fn computational_basis(dim: usize) -> Vec<PowerNode> {
    (0..dim)
        .map(|i| {
            let mut v = vec![re(0.0); dim];
            v[i] = re(1.0);
            ray(format!("|{i}⟩"), &v)
        })
        .collect()
}

/// `|0⟩, |1⟩, |+⟩, |−⟩`: two mutually unbiased qubit bases.
pub fn qubit_two_bases() -> Vec<PowerNode> {
    vec![
        ray("|0⟩", &[re(1.0), re(0.0)]),
        ray("|1⟩", &[re(0.0), re(1.0)]),
        ray("|+⟩", &[re(1.0), re(1.0)]),
        ray("|−⟩", &[re(1.0), re(-1.0)]),
    ]
}

/// All three qubit MUBs. Together with `I` these span the Hermitian 2×2 matrices.
pub fn qubit_three_bases() -> Vec<PowerNode> {
    let mut nodes = qubit_two_bases();
    nodes.push(ray("|+i⟩", &[re(1.0), c(0.0, 1.0)]));
    nodes.push(ray("|−i⟩", &[re(1.0), c(0.0, -1.0)]));
    nodes
}

/// Peres' 33 rays in `ℂ³`: coordinate permutations of `(0,0,1)`, `(0,1,±1)`,
/// `(0,1,±√2)` and `(1,±1,±√2)`, up to overall sign. No `{0,1}` assignment
/// gives exactly one 1 on each of its 16 orthogonal triads while keeping
/// orthogonal pairs from both being 1.
pub fn peres_33() -> Vec<PowerNode> {
    let r2 = 2f64.sqrt();
    let seeds: [[f64; 3]; 9] = [
        [0.0, 0.0, 1.0],
        [0.0, 1.0, 1.0],
        [0.0, 1.0, -1.0],
        [0.0, 1.0, r2],
        [0.0, 1.0, -r2],
        [1.0, 1.0, r2],
        [1.0, 1.0, -r2],
        [1.0, -1.0, r2],
        [1.0, -1.0, -r2],
    ];
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

    let mut rays: Vec<[f64; 3]> = Vec::new();
    for seed in seeds {
        for perm in PERMS {
            let mut v = [seed[perm[0]], seed[perm[1]], seed[perm[2]]];
            // canonical sign: first nonzero coordinate positive
            if v.iter().find(|x| x.abs() > 0.0).is_some_and(|x| *x < 0.0) {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            if !rays.iter().any(|r| r.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-12)) {
                rays.push(v);
            }
        }
    }
    debug_assert_eq!(rays.len(), 33);
    rays.iter()
        .map(|v| {
            let fmt = |x: f64| -> String {
                let s = if x < 0.0 { "-" } else { "" };
                match x.abs() {
                    0.0 => "0".into(),
                    a if (a - 1.0).abs() < 1e-12 => format!("{s}1"),
                    _ => format!("{s}√2"),
                }
            };
            let label = format!("({},{},{})", fmt(v[0]), fmt(v[1]), fmt(v[2]));
            ray(label, &[re(v[0]), re(v[1]), re(v[2])])
        })
        .collect()
}
