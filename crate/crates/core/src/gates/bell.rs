use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::{rotation, Axis, Pauli};
use crate::qlinalg::{self, ComplexMatrix, DensityOperator};
use crate::temporal::{TemporalLabel, TemporalRegister};
use crate::{Error, Result, C64, TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellTag {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellTag {
    pub const ALL: [BellTag; 4] = [BellTag::PhiPlus, BellTag::PhiMinus, BellTag::PsiPlus, BellTag::PsiMinus];

    pub fn as_str(self) -> &'static str {
        match self {
            BellTag::PhiPlus => "phi+",
            BellTag::PhiMinus => "phi-",
            BellTag::PsiPlus => "psi+",
            BellTag::PsiMinus => "psi-",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Unit vector in the computational basis of the two measured qubits.
    pub fn state_vector(self) -> [C64; 4] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (a, b, c, d) = match self {
            BellTag::PhiPlus => (s, 0.0, 0.0, s),
            BellTag::PhiMinus => (s, 0.0, 0.0, -s),
            BellTag::PsiPlus => (0.0, s, s, 0.0),
            BellTag::PsiMinus => (0.0, s, -s, 0.0),
        };
        [a, b, c, d].map(|x| C64::new(x, 0.0))
    }

    /// Correction that undoes the Pauli frame this outcome leaves on the receiver.
    pub fn correction(self) -> Correction {
        match self {
            BellTag::PhiPlus => Correction::Identity,
            BellTag::PhiMinus => Correction::Z,
            BellTag::PsiPlus => Correction::X,
            BellTag::PsiMinus => Correction::XZ,
        }
    }
}

impl fmt::Display for BellTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BellTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BellTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown outcome tag '{s}' (expected phi+, phi-, psi+, psi-)")))
    }
}

impl Serialize for BellTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// Pauli correction applied by the receiver once the outcome is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Correction {
    Identity,
    Z,
    X,
    /// `X * Z`
    XZ,
}

impl Correction {
    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Correction::Identity => Pauli::I.matrix(),
            Correction::Z => Pauli::Z.matrix(),
            Correction::X => Pauli::X.matrix(),
            Correction::XZ => &Pauli::X.matrix() * &Pauli::Z.matrix(),
        }
    }

    /// `C rho C^dag`
    pub fn apply(self, rho: &DensityOperator) -> Result<DensityOperator> {
        rho.conjugate_by(&self.matrix())
    }
}

/// One element of a (possibly rotated) Bell basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BellOutcome {
    pub tag: BellTag,
    pub vector: [C64; 4],
    pub projector: ComplexMatrix,
    pub correction: Correction,
}

impl BellOutcome {
    fn from_vector(tag: BellTag, vector: [C64; 4]) -> Self {
        Self { tag, vector, projector: ComplexMatrix::outer(&vector), correction: tag.correction() }
    }
}

/// `phi+-, psi+-` with the standard teleportation corrections.
pub fn bell_basis() -> [BellOutcome; 4] {
    BellTag::ALL.map(|t| BellOutcome::from_vector(t, t.state_vector()))
}

/// Bell basis with `R_axis(angle)` applied to the first measured qubit.
pub fn rotated_bell_basis(axis: Axis, angle: f64) -> [BellOutcome; 4] {
    let local = qlinalg::tensor(&rotation(axis, angle), &ComplexMatrix::identity(2)).expect("4x4");
    BellTag::ALL.map(|t| {
        let v = local.apply(&t.state_vector());
        BellOutcome::from_vector(t, [v[0], v[1], v[2], v[3]])
    })
}

/// Ideal Bell basis conjugated by `R_y(epsilon)` on the first measured qubit.
pub fn perturbed_bell_basis(epsilon: f64) -> Result<[BellOutcome; 4]> {
    if epsilon.is_nan() || epsilon.abs() >= 0.5 {
        return Err(Error::InvalidArgument(format!("|epsilon| must be below 0.5, got {epsilon}")));
    }
    Ok(rotated_bell_basis(Axis::Y, epsilon))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementResult {
    /// Position of the projector in the basis that was measured.
    pub index: usize,
    /// Set when the basis was a Bell basis.
    pub tag: Option<BellTag>,
    pub probability: f64,
    /// Renormalized state of the unmeasured slots; `None` for negligible
    /// outcomes or when every slot was measured.
    pub post_state: Option<TemporalRegister>,
}

fn check_complete(basis: &[ComplexMatrix]) -> Result<()> {
    let Some(first) = basis.first() else {
        return Err(Error::IncompleteBasis("empty basis".into()));
    };
    let dim = first.rows();
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for (i, p) in basis.iter().enumerate() {
        if p.rows() != dim || !p.is_square() {
            return Err(Error::IncompleteBasis(format!("projector {i} has the wrong shape")));
        }
        for (j, q) in basis.iter().enumerate() {
            let expected = if i == j { p.clone() } else { ComplexMatrix::zeros(dim, dim) };
            let dev = (p * q).max_abs_diff(&expected);
            if dev > TOL.hermitian_input {
                return Err(Error::IncompleteBasis(format!("P{i} P{j} deviates by {dev:.3e}")));
            }
        }
        sum = &sum + p;
    }
    let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim));
    if dev > TOL.hermitian_input {
        return Err(Error::IncompleteBasis(format!("projectors sum to identity only within {dev:.3e}")));
    }
    Ok(())
}

/// Born-rule measurement of `on` in the projective basis `basis`.
pub fn projective_measure(
    reg: &TemporalRegister,
    basis: &[ComplexMatrix],
    on: &[TemporalLabel],
) -> Result<Vec<MeasurementResult>> {
    check_complete(basis)?;
    if basis[0].rows() != 1 << on.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}-dimensional projectors on {} slots",
            basis[0].rows(),
            on.len()
        )));
    }
    let measures_everything = on.len() == reg.slot_count();
    let slots: Vec<usize> = on.iter().map(|l| reg.slot_of(l)).collect::<Result<_>>()?;
    let dims = vec![2; reg.slot_count()];
    let rho = reg.operator();
    basis
        .iter()
        .enumerate()
        .map(|(index, p)| {
            let (probability, post_state) = if measures_everything {
                let full = qlinalg::embed(p, &dims, &slots)?;
                ((&full * &rho).trace().re, None)
            } else {
                let rest = reg.apply_effect(p, on)?;
                let prob = rest.weight().re;
                let post = if prob < TOL.null_probability {
                    None
                } else {
                    Some(TemporalRegister::mixed(rest.labels().to_vec(), rest.density()?)?)
                };
                (prob, post)
            };
            Ok(MeasurementResult { index, tag: None, probability, post_state })
        })
        .collect()
}

/// Measurement in the ideal Bell basis on two labelled slots.
pub fn bell_measure(reg: &TemporalRegister, on: [TemporalLabel; 2]) -> Result<Vec<MeasurementResult>> {
    let basis = bell_basis();
    let projectors: Vec<ComplexMatrix> = basis.iter().map(|b| b.projector.clone()).collect();
    let mut results = projective_measure(reg, &projectors, &on)?;
    for (r, b) in results.iter_mut().zip(&basis) {
        r.tag = Some(b.tag);
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::PureState;
    use crate::temporal::{make_bell_pair, ClockCycle};

    fn inner(a: &[C64; 4], b: &[C64; 4]) -> C64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    }

    #[test]
    fn bell_states_are_orthonormal_and_complete() {
        let basis = bell_basis();
        let mut sum = ComplexMatrix::zeros(4, 4);
        for a in &basis {
            for b in &basis {
                let expected = if a.tag == b.tag { 1.0 } else { 0.0 };
                assert!((inner(&a.vector, &b.vector) - C64::new(expected, 0.0)).norm() < 1e-15);
            }
            sum = &sum + &a.projector;
        }
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn bell_pair_measures_phi_plus_with_certainty() {
        let reg = make_bell_pair(ClockCycle(0));
        let labels = [reg.labels()[0], reg.labels()[1]];
        let results = bell_measure(&reg, labels).unwrap();
        assert_eq!(results[0].tag, Some(BellTag::PhiPlus));
        assert!((results[0].probability - 1.0).abs() < 1e-15);
        assert!(results[1..].iter().all(|r| r.probability.abs() < 1e-15));
    }

    #[test]
    fn computational_measurement_of_plus() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::qubit(C64::new(s, 0.0), C64::new(s, 0.0)).unwrap();
        let reg = TemporalRegister::pure(vec![TemporalLabel::at(1, 0)], plus).unwrap();
        let basis = [ComplexMatrix::diag(&[1.0, 0.0]), ComplexMatrix::diag(&[0.0, 1.0])];
        let results = projective_measure(&reg, &basis, &[TemporalLabel::at(1, 0)]).unwrap();
        for r in results {
            assert!((r.probability - 0.5).abs() < 1e-15);
            assert!(r.post_state.is_none());
        }
    }

    #[test]
    fn bell_measurement_of_01() {
        let reg = TemporalRegister::pure(
            vec![TemporalLabel::at(1, 0), TemporalLabel::at(2, 0)],
            PureState::basis(2, 0b01).unwrap(),
        )
        .unwrap();
        let results = bell_measure(&reg, [TemporalLabel::at(1, 0), TemporalLabel::at(2, 0)]).unwrap();
        let probs: Vec<f64> = results.iter().map(|r| r.probability).collect();
        for (p, e) in probs.iter().zip([0.0, 0.0, 0.5, 0.5]) {
            assert!((p - e).abs() < 1e-15, "{probs:?}");
        }
    }

    #[test]
    fn incomplete_basis_is_rejected() {
        let reg = make_bell_pair(ClockCycle(0));
        let basis = [ComplexMatrix::diag(&[1.0, 0.0])];
        let err = projective_measure(&reg, &basis, &[reg.labels()[0]]).unwrap_err();
        assert!(matches!(err, Error::IncompleteBasis(_)));
    }

    #[test]
    fn perturbed_basis_limits() {
        let ideal = bell_basis();
        let zero = perturbed_bell_basis(0.0).unwrap();
        for (a, b) in ideal.iter().zip(&zero) {
            assert_eq!(a.projector.max_abs_diff(&b.projector), 0.0);
        }
        let sum = perturbed_bell_basis(0.1)
            .unwrap()
            .iter()
            .fold(ComplexMatrix::zeros(4, 4), |acc, b| &acc + &b.projector);
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
        assert!(perturbed_bell_basis(0.5).is_err());
        assert!(perturbed_bell_basis(f64::NAN).is_err());
    }

    #[test]
    fn perturbed_overlap_is_second_order() {
        // <phi+|(R_y(e) x I)|phi+> = tr(R_y(e))/2 = cos(e/2), so 1 - overlap ~ e^2/8.
        for eps in [1e-2, 1e-3] {
            let pert = perturbed_bell_basis(eps).unwrap();
            let overlap = inner(&BellTag::PhiPlus.state_vector(), &pert[0].vector).norm();
            let deviation = 1.0 - overlap;
            assert!((deviation / (eps * eps) - 0.125).abs() < 1e-3, "eps {eps}: {deviation:e}");
        }
    }

    #[test]
    fn tag_round_trip() {
        for t in BellTag::ALL {
            assert_eq!(t.as_str().parse::<BellTag>().unwrap(), t);
        }
        assert!("phi".parse::<BellTag>().is_err());
    }
}
