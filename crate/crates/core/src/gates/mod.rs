//! Gates, Bell bases and projective measurement.

mod bell;
mod perturbation;

pub use bell::{
    bell_basis, bell_measure, perturbed_bell_basis, projective_measure, rotated_bell_basis, BellOutcome,
    BellTag, Correction, MeasurementResult,
};
pub use perturbation::{
    AxisJitter, DepolarizedMeasurement, PerturbationModel, PerturbationRegistry, RyRotation,
};

use crate::qlinalg::ComplexMatrix;
use crate::temporal::{TemporalLabel, TemporalRegister};
use crate::{Error, Result, C64, TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> ComplexMatrix {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let entries = match self {
            Pauli::I => vec![l, o, o, l],
            Pauli::X => vec![o, l, l, o],
            Pauli::Y => vec![o, -i, i, o],
            Pauli::Z => vec![l, o, o, -l],
        };
        ComplexMatrix::new(2, 2, entries).expect("2x2")
    }
}

/// Rotation axis on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// `exp(-i angle sigma_axis / 2)`
pub fn rotation(axis: Axis, angle: f64) -> ComplexMatrix {
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let pauli = match axis {
        Axis::X => Pauli::X,
        Axis::Y => Pauli::Y,
        Axis::Z => Pauli::Z,
    };
    &ComplexMatrix::identity(2).scale_real(c) + &pauli.matrix().scale(C64::new(0.0, -s))
}

/// CNOT with the first qubit as control.
pub fn cnot_matrix() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
    ])
}

pub fn swap_matrix() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
}

/// A unitary bound to the register slots it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    unitary: ComplexMatrix,
    acts_on: Vec<TemporalLabel>,
}

impl Gate {
    pub fn new(unitary: ComplexMatrix, acts_on: Vec<TemporalLabel>) -> Result<Self> {
        let dev = unitary.unitarity_deviation();
        if dev > TOL.unitarity {
            return Err(Error::NotUnitary(dev));
        }
        if acts_on.is_empty() || unitary.rows() != 1 << acts_on.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} unitary on {} slots",
                unitary.rows(),
                unitary.cols(),
                acts_on.len()
            )));
        }
        for (k, l) in acts_on.iter().enumerate() {
            if acts_on[..k].contains(l) {
                return Err(Error::InvalidArgument(format!("gate acts on {l} twice")));
            }
        }
        Ok(Self { unitary, acts_on })
    }

    pub fn cnot(control: TemporalLabel, target: TemporalLabel) -> Result<Self> {
        if control == target {
            return Err(Error::InvalidArgument(format!("CNOT control and target are both {control}")));
        }
        Self::new(cnot_matrix(), vec![control, target])
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn acts_on(&self) -> &[TemporalLabel] {
        &self.acts_on
    }

    pub fn apply(&self, reg: &TemporalRegister) -> Result<TemporalRegister> {
        reg.apply_unitary(&self.unitary, &self.acts_on)
    }
}

/// `|c, t> -> |c, t xor c>` on the two labelled slots.
pub fn cnot(reg: &TemporalRegister, control: TemporalLabel, target: TemporalLabel) -> Result<TemporalRegister> {
    Gate::cnot(control, target)?.apply(reg)
}
