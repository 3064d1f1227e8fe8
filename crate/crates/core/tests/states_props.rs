use proptest::prelude::*;
use qlab::entanglement::von_neumann_entropy;
use qlab::random;
use qlab::states::{
    abstract_purity, alternative_decomposition, density_from_vector, operational_purity, projective_distance,
    spectral_decomposition, BlochPoint, MixtureDecomposition,
};
use qlab::{OrthonormalBasis, PureVector};

mod common;

const PURE_TOL: f64 = 1e-7;

proptest! {
    #[test]
    fn purity_notions_agree_with_spectrum(seed in any::<u64>(), d in 2usize..7, rank in 1usize..4) {
        let mut rng = common::rng(seed);
        let rho = random::density(d, rank.min(d), &mut rng);
        let pure = abstract_purity(&rho, PURE_TOL);
        let top = rho.eigenvalues()[0];
        prop_assert_eq!(pure, top >= 1.0 - PURE_TOL);
        prop_assert_eq!(pure, von_neumann_entropy(&rho) <= 1e-6);
        prop_assert_eq!(pure, rank == 1 || d == 1);
    }

    #[test]
    fn operational_implies_abstract(seed in any::<u64>(), d in 2usize..6, rank in 1usize..3) {
        let mut rng = common::rng(seed);
        let rho = random::density(d, rank, &mut rng);
        let basis = random::basis(d, &mut rng);
        if operational_purity(&rho, &basis, PURE_TOL).unwrap() {
            prop_assert!(abstract_purity(&rho, PURE_TOL));
        }
        if operational_purity(&rho, &OrthonormalBasis::computational(d), PURE_TOL).unwrap() {
            prop_assert!(abstract_purity(&rho, PURE_TOL));
        }
    }

    #[test]
    fn bloch_round_trip(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
        let r = (x * x + y * y + z * z).sqrt();
        let s = if r > 1.0 { 1.0 / r } else { 1.0 };
        let p = BlochPoint::new(x * s, y * s, z * s).unwrap();
        let back = BlochPoint::from_density(&p.to_density()).unwrap();
        prop_assert!((back.x - p.x).abs() <= 1e-9 && (back.y - p.y).abs() <= 1e-9 && (back.z - p.z).abs() <= 1e-9);
    }

    #[test]
    fn remixing_reconstructs(seed in any::<u64>(), d in 2usize..5, extra in 0usize..3) {
        let mut rng = common::rng(seed);
        let rho = random::density_any_rank(d, &mut rng);
        let spectral = spectral_decomposition(&rho);
        let k = spectral.len();
        let u = random::unitary(k + extra, &mut rng);
        let columns: Vec<Vec<_>> = (0..k).map(|j| u.col(j)).collect();
        let mixer = qlab::ComplexMatrix::from_columns(&columns).unwrap();
        let other: MixtureDecomposition = alternative_decomposition(&spectral, &mixer).unwrap();
        prop_assert!(other.reconstruct().max_abs_diff(rho.matrix()) <= 1e-8);
    }

    #[test]
    fn projective_distance_range(seed in any::<u64>(), d in 2usize..6) {
        let mut rng = common::rng(seed);
        let a = density_from_vector(&random::pure_state(d, &mut rng));
        let b = density_from_vector(&random::pure_state(d, &mut rng));
        let dist = projective_distance(&a, &b).unwrap();
        prop_assert!((0.0..=2f64.sqrt() + 1e-12).contains(&dist));

        let basis = random::basis(d, &mut rng);
        let u = density_from_vector(&PureVector::new(basis.vector(0)).unwrap());
        let v = density_from_vector(&PureVector::new(basis.vector(1)).unwrap());
        prop_assert!((projective_distance(&u, &v).unwrap() - 2f64.sqrt()).abs() <= 1e-12);
    }
}
