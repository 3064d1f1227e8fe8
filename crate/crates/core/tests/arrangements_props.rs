use proptest::prelude::*;
use qlab::arrangements::{
    change_detectors, complexity_chain_check, ea_equivalent, make_ea, refactor, restrict, ChainLink,
    DetectorBasis, ExperimentalArrangement, Factorization,
};
use qlab::random;
use qlab::DensityOperator;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

mod common;

fn screen_dims() -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(1usize..5, 1..4).prop_filter("degree at most 36", |d| d.iter().product::<usize>() <= 36)
}

fn random_ea(dims: &[usize], rng: &mut ChaCha8Rng) -> ExperimentalArrangement {
    let f = Factorization::new(dims.to_vec()).unwrap();
    let rho = random::density_any_rank(f.degree(), rng);
    let b = DetectorBasis::new(dims.iter().map(|&d| random::basis(d, rng)).collect()).unwrap();
    make_ea(&rho, &f, &b).unwrap()
}

fn total(ea: &ExperimentalArrangement) -> f64 {
    ea.intensities().iter().sum()
}

fn random_subset(d: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..d).collect();
    idx.shuffle(rng);
    let keep = rng.random_range(1..=d);
    let mut s = idx[..keep].to_vec();
    s.sort_unstable();
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn basis_changes_preserve_the_state(seed in any::<u64>(), dims in screen_dims()) {
        let mut rng = common::rng(seed);
        let ea = random_ea(&dims, &mut rng);
        let mut changed = ea.clone();
        for (k, &d) in dims.iter().enumerate() {
            changed = change_detectors(&changed, k, &random::basis(d, &mut rng)).unwrap();
            prop_assert!((total(&changed) - 1.0).abs() <= 1e-9);
        }
        prop_assert!(ea_equivalent(&ea, &changed, 1e-10));
        prop_assert!(changed.abstract_density().matrix().max_abs_diff(ea.abstract_density().matrix()) <= 1e-10);
    }

    #[test]
    fn refactor_round_trip(seed in any::<u64>(), dims in screen_dims()) {
        let mut rng = common::rng(seed);
        let ea = random_ea(&dims, &mut rng);
        let f1 = ea.factorization().clone();
        let f2 = Factorization::single(ea.degree());
        let there = refactor(&ea, &f2).unwrap();
        prop_assert!((total(&there) - 1.0).abs() <= 1e-9);
        prop_assert!(ea_equivalent(&ea, &there, 1e-10));
        let back = refactor(&there, &f1).unwrap();
        prop_assert_eq!(back.represented(), ea.represented());
        prop_assert_eq!(back.frame(), ea.frame());
        prop_assert_eq!(back.factorization(), &f1);
        prop_assert_eq!(back.intensities(), ea.intensities());
    }

    #[test]
    fn restrictions_compose(seed in any::<u64>(), dims in screen_dims()) {
        let mut rng = common::rng(seed);
        let ea = random_ea(&dims, &mut rng);
        let outer: Vec<Vec<usize>> = dims.iter().map(|&d| random_subset(d, &mut rng)).collect();
        let inner: Vec<Vec<usize>> = outer.iter().map(|s| random_subset(s.len(), &mut rng)).collect();
        let combined: Vec<Vec<usize>> = outer
            .iter()
            .zip(&inner)
            .map(|(o, i)| i.iter().map(|&j| o[j]).collect())
            .collect();
        let step = restrict(&ea, &outer).and_then(|r| restrict(&r, &inner));
        let direct = restrict(&ea, &combined);
        match (step, direct) {
            (Ok(a), Ok(b)) => {
                prop_assert!(a.represented().max_abs_diff(b.represented()) <= 1e-10);
                prop_assert_eq!(a.factorization(), b.factorization());
                let chain = [
                    ChainLink { arrangement: b.clone(), restriction: Some(combined.clone()) },
                    ChainLink { arrangement: ea.clone(), restriction: None },
                ];
                if b.degree() < ea.degree() {
                    prop_assert!(complexity_chain_check(&chain, 1e-9).is_valid());
                }
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "one path failed: {:?} / {:?}", a.err(), b.err()),
        }
    }

    #[test]
    fn product_states_factorize(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let a = random::density_any_rank(2, &mut rng);
        let b = random::density_any_rank(2, &mut rng);
        let f = Factorization::new(vec![2, 2]).unwrap();
        let det = DetectorBasis::new(vec![random::basis(2, &mut rng), random::basis(2, &mut rng)]).unwrap();
        let ea = make_ea(&a.tensor(&b).unwrap(), &f, &det).unwrap();
        prop_assert!(ea.intensities_factorize(1e-10));
    }
}

#[test]
fn correlated_two_screen_intensities_do_not_factorize() {
    let f = Factorization::new(vec![2, 2]).unwrap();
    let rho = DensityOperator::new(qlab::ComplexMatrix::diag(&[0.5, 0.0, 0.0, 0.5])).unwrap();
    let ea = make_ea(&rho, &f, &DetectorBasis::computational(&f)).unwrap();
    assert!(!ea.intensities_factorize(1e-10));
}
