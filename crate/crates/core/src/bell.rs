//! CHSH analysis of two-qubit states.

use std::fmt;

use nalgebra::{Matrix3, Vector3};

use crate::entanglement::{ppt_criterion, Verdict, SEPARABILITY_TOL};
use crate::error::{Error, Result};
use crate::qlin::{kron, pauli};
use crate::states::DensityOperator;

/// Largest CHSH value attainable by local hidden variables.
pub const CLASSICAL_BOUND: f64 = 2.0;
/// `chsh_max` above `2 + VIOLATION_TOL` counts as a violation.
pub const VIOLATION_TOL: f64 = 1e-9;
const UNIT_TOL: f64 = 1e-9;

pub type Direction = [f64; 3];

/// `t_ij = Tr(ρ σ_i⊗σ_j)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationMatrix {
    pub t: [[f64; 3]; 3],
}

impl CorrelationMatrix {
    fn to_nalgebra(self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.t[i][j])
    }

    /// `uᵀ t v`
    pub fn correlation(&self, u: &Direction, v: &Direction) -> f64 {
        (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| u[i] * self.t[i][j] * v[j])
            .sum()
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> [f64; 3] {
        let mut s: Vec<f64> = self.to_nalgebra().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        [s[0], s[1], s[2]]
    }
}

/// Alice's directions `a, a′` and Bob's `b, b′` on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting {
    pub a: Direction,
    pub a_prime: Direction,
    pub b: Direction,
    pub b_prime: Direction,
}

fn norm(v: &Direction) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl MeasurementSetting {
    pub fn new(a: Direction, a_prime: Direction, b: Direction, b_prime: Direction) -> Result<Self> {
        for (name, v) in [("a", &a), ("a'", &a_prime), ("b", &b), ("b'", &b_prime)] {
            if (norm(v) - 1.0).abs() > UNIT_TOL {
                return Err(Error::domain(format!("direction {name} has norm {}", norm(v))));
            }
        }
        Ok(MeasurementSetting { a, a_prime, b, b_prime })
    }

    /// `a = z, a′ = x, b = (z+x)/√2, b′ = (z−x)/√2`
    pub fn standard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        MeasurementSetting {
            a: [0.0, 0.0, 1.0],
            a_prime: [1.0, 0.0, 0.0],
            b: [s, 0.0, s],
            b_prime: [-s, 0.0, s],
        }
    }
}

fn check_two_qubit(rho: &DensityOperator) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::shape(format!("CHSH needs a two-qubit state, got dimension {}", rho.dim())));
    }
    Ok(())
}

pub fn correlation_matrix(rho: &DensityOperator) -> Result<CorrelationMatrix> {
    check_two_qubit(rho)?;
    let sigma = pauli();
    let mut t = [[0.0; 3]; 3];
    for (i, si) in sigma.iter().enumerate() {
        for (j, sj) in sigma.iter().enumerate() {
            t[i][j] = rho.expectation(&kron(si, sj)?)?;
        }
    }
    Ok(CorrelationMatrix { t })
}

/// `E(a,b) + E(a,b′) + E(a′,b) − E(a′,b′)`
pub fn chsh_value_from(t: &CorrelationMatrix, s: &MeasurementSetting) -> f64 {
    t.correlation(&s.a, &s.b) + t.correlation(&s.a, &s.b_prime) + t.correlation(&s.a_prime, &s.b)
        - t.correlation(&s.a_prime, &s.b_prime)
}

pub fn chsh_value(rho: &DensityOperator, s: &MeasurementSetting) -> Result<f64> {
    Ok(chsh_value_from(&correlation_matrix(rho)?, s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshMaximum {
    pub value: f64,
    pub setting: MeasurementSetting,
}

impl ChshMaximum {
    pub fn violates(&self) -> bool {
        self.value > CLASSICAL_BOUND + VIOLATION_TOL
    }
}

fn as_direction(v: Vector3<f64>) -> Direction {
    [v[0], v[1], v[2]]
}

/// Flips the sign so that the first entry with magnitude above `1e-12` is positive.
fn sign_fixed(v: Vector3<f64>) -> (Vector3<f64>, f64) {
    match v.iter().find(|x| x.abs() > 1e-12) {
        Some(x) if *x < 0.0 => (-v, -1.0),
        _ => (v, 1.0),
    }
}

/// `2√(s₁² + s₂²)` with `s₁ ≥ s₂` the leading singular values of `t`,
/// and a setting reaching it.
pub fn chsh_max_from(t: &CorrelationMatrix) -> ChshMaximum {
    let svd = t.to_nalgebra().svd(true, true);
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));

    let pair = |k: usize| {
        let (v, sign) = sign_fixed(v_t.row(order[k]).transpose());
        (u.column(order[k]) * sign, v, svd.singular_values[order[k]])
    };
    let (u1, v1, s1) = pair(0);
    let (u2, v2, s2) = pair(1);

    let theta = s2.atan2(s1);
    let (sin, cos) = theta.sin_cos();
    let setting = MeasurementSetting {
        a: as_direction(u1),
        a_prime: as_direction(u2),
        b: as_direction(v1 * cos + v2 * sin),
        b_prime: as_direction(v1 * cos - v2 * sin),
    };
    ChshMaximum {
        value: 2.0 * (s1 * s1 + s2 * s2).sqrt(),
        setting,
    }
}

pub fn chsh_max(rho: &DensityOperator) -> Result<ChshMaximum> {
    Ok(chsh_max_from(&correlation_matrix(rho)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Separable,
    EntangledLocal,
    Nonlocal,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Separable => "Separable",
            Region::EntangledLocal => "EntangledLocal",
            Region::Nonlocal => "Nonlocal",
        })
    }
}

pub fn classify_regions(rho: &DensityOperator) -> Result<Region> {
    check_two_qubit(rho)?;
    if ppt_criterion(rho, &[2, 2], SEPARABILITY_TOL)?.verdict == Verdict::Separable {
        return Ok(Region::Separable);
    }
    Ok(if chsh_max(rho)?.violates() {
        Region::Nonlocal
    } else {
        Region::EntangledLocal
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{phi_plus, werner};
    use crate::qlin::ComplexMatrix;
    use crate::random;
    use crate::states::density_from_vector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

    fn close(t: &CorrelationMatrix, expect: [[f64; 3]; 3], tol: f64) -> bool {
        (0..3).all(|i| (0..3).all(|j| (t.t[i][j] - expect[i][j]).abs() < tol))
    }

    #[test]
    fn correlation_examples() {
        let bell = density_from_vector(&phi_plus());
        let t = correlation_matrix(&bell).unwrap();
        assert!(close(&t, [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]], 1e-12));
        let t = correlation_matrix(&DensityOperator::maximally_mixed(4)).unwrap();
        assert!(close(&t, [[0.0; 3]; 3], 1e-12));
        let t = correlation_matrix(&werner(0.4).unwrap()).unwrap();
        assert!(close(&t, [[0.4, 0.0, 0.0], [0.0, -0.4, 0.0], [0.0, 0.0, 0.4]], 1e-12));
        assert!(correlation_matrix(&DensityOperator::maximally_mixed(3)).is_err());
    }

    #[test]
    fn chsh_value_examples() {
        let s = MeasurementSetting::standard();
        assert!(MeasurementSetting::new(s.a, s.a_prime, s.b, s.b_prime).is_ok());
        assert!(MeasurementSetting::new([1.0, 1.0, 0.0], s.a_prime, s.b, s.b_prime).is_err());
        assert!(chsh_value(&DensityOperator::maximally_mixed(4), &s).unwrap().abs() < 1e-12);
        let bell = density_from_vector(&phi_plus());
        assert!((chsh_value(&bell, &s).unwrap() - TSIRELSON).abs() < 1e-9);
        let p = 0.6;
        assert!((chsh_value(&werner(p).unwrap(), &s).unwrap() - p * TSIRELSON).abs() < 1e-9);
    }

    #[test]
    fn chsh_max_examples() {
        let bell = density_from_vector(&phi_plus());
        let m = chsh_max(&bell).unwrap();
        assert!((m.value - TSIRELSON).abs() < 1e-9);
        assert!((chsh_value(&bell, &m.setting).unwrap() - m.value).abs() < 1e-7);

        for p in [0.0, 0.3, 0.5, 1.0 / std::f64::consts::SQRT_2, 0.9] {
            let w = werner(p).unwrap();
            let m = chsh_max(&w).unwrap();
            assert!((m.value - p * TSIRELSON).abs() < 1e-9);
            assert!((chsh_value(&w, &m.setting).unwrap() - m.value).abs() < 1e-7);
        }
        assert!(!chsh_max(&werner(1.0 / std::f64::consts::SQRT_2).unwrap()).unwrap().violates());
    }

    #[test]
    fn product_states_stay_local() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let a = random::density_any_rank(2, &mut rng);
            let b = random::density_any_rank(2, &mut rng);
            let m = chsh_max(&a.tensor(&b).unwrap()).unwrap();
            assert!(m.value <= 2.0 + 1e-9, "{}", m.value);
        }
    }

    #[test]
    fn setting_reaches_maximum_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let rho = random::density_any_rank(4, &mut rng);
            let m = chsh_max(&rho).unwrap();
            let s = m.setting;
            assert!(MeasurementSetting::new(s.a, s.a_prime, s.b, s.b_prime).is_ok());
            assert!((chsh_value(&rho, &s).unwrap() - m.value).abs() < 1e-7);
        }
    }

    #[test]
    fn regions() {
        assert_eq!(classify_regions(&werner(0.2).unwrap()).unwrap(), Region::Separable);
        assert_eq!(classify_regions(&werner(0.5).unwrap()).unwrap(), Region::EntangledLocal);
        assert_eq!(classify_regions(&werner(0.9).unwrap()).unwrap(), Region::Nonlocal);
        assert_eq!(classify_regions(&werner(1.0 / 3.0).unwrap()).unwrap(), Region::Separable);
        let zero = ComplexMatrix::projector(crate::states::PureVector::basis(4, 0).amplitudes());
        assert_eq!(classify_regions(&DensityOperator::new(zero).unwrap()).unwrap(), Region::Separable);
    }
}
