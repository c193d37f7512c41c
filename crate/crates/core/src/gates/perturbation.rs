//! Ways of moving a Bell measurement away from the ideal basis.
//!
//! Each model turns an outcome tag and a strength `epsilon` into the effect
//! operator `E` that fires on the two measured qubits. At `epsilon = 0` every
//! model reduces to the ideal Bell projector, and for every `epsilon` the four
//! effects sum to the identity.

use std::sync::Arc;

use super::{bell_basis, perturbed_bell_basis, rotated_bell_basis, Axis, BellTag};
use crate::qlinalg::ComplexMatrix;
use crate::{Error, Result};

pub trait PerturbationModel: Send + Sync {
    fn name(&self) -> &'static str;

    fn summary(&self) -> &'static str;

    /// Effect operator for `tag` on the measured pair, first qubit most significant.
    fn effect(&self, tag: BellTag, epsilon: f64) -> Result<ComplexMatrix>;
}

fn check_strength(epsilon: f64) -> Result<()> {
    if !(0.0..0.5).contains(&epsilon) {
        return Err(Error::InvalidArgument(format!("perturbation strength must lie in [0, 0.5), got {epsilon}")));
    }
    Ok(())
}

/// The whole basis rotated by `R_y(epsilon)` on the first measured qubit.
/// Effects stay rank-1, so post-selected maps keep a single Kraus operator.
#[derive(Debug, Default, Clone, Copy)]
pub struct RyRotation;

impl PerturbationModel for RyRotation {
    fn name(&self) -> &'static str {
        "ry"
    }

    fn summary(&self) -> &'static str {
        "Bell basis rotated by R_y(eps) on the first measured qubit"
    }

    fn effect(&self, tag: BellTag, epsilon: f64) -> Result<ComplexMatrix> {
        Ok(perturbed_bell_basis(epsilon)?[tag.index()].projector.clone())
    }
}

/// Equal mixture of the six bases rotated by `+-epsilon` about x, y and z on
/// the first measured qubit: the measurement basis jitters isotropically.
#[derive(Debug, Default, Clone, Copy)]
pub struct AxisJitter;

impl PerturbationModel for AxisJitter {
    fn name(&self) -> &'static str {
        "axis-jitter"
    }

    fn summary(&self) -> &'static str {
        "uniform mixture of Bell bases rotated by +-eps about x, y, z on the first measured qubit"
    }

    fn effect(&self, tag: BellTag, epsilon: f64) -> Result<ComplexMatrix> {
        check_strength(epsilon)?;
        let mut sum = ComplexMatrix::zeros(4, 4);
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            for angle in [epsilon, -epsilon] {
                sum = &sum + &rotated_bell_basis(axis, angle)[tag.index()].projector;
            }
        }
        Ok(sum.scale_real(1.0 / 6.0))
    }
}

/// `(1 - eps) P + eps (I - P) / 3`: the outcome is misreported uniformly with probability `eps`.
#[derive(Debug, Default, Clone, Copy)]
pub struct DepolarizedMeasurement;

impl PerturbationModel for DepolarizedMeasurement {
    fn name(&self) -> &'static str {
        "depolarizing"
    }

    fn summary(&self) -> &'static str {
        "ideal Bell projector mixed with the other three outcomes at weight eps"
    }

    fn effect(&self, tag: BellTag, epsilon: f64) -> Result<ComplexMatrix> {
        check_strength(epsilon)?;
        let p = bell_basis()[tag.index()].projector.clone();
        let rest = &ComplexMatrix::identity(4) - &p;
        Ok(&p.scale_real(1.0 - epsilon) + &rest.scale_real(epsilon / 3.0))
    }
}

/// Perturbation models addressable by name.
#[derive(Clone)]
pub struct PerturbationRegistry {
    models: Vec<Arc<dyn PerturbationModel>>,
}

impl PerturbationRegistry {
    pub const DEFAULT: &'static str = "axis-jitter";

    pub fn empty() -> Self {
        Self { models: Vec::new() }
    }

    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register(Arc::new(AxisJitter));
        reg.register(Arc::new(RyRotation));
        reg.register(Arc::new(DepolarizedMeasurement));
        reg
    }

    /// Adds a model, replacing any previous one with the same name.
    pub fn register(&mut self, model: Arc<dyn PerturbationModel>) {
        self.models.retain(|m| m.name() != model.name());
        self.models.push(model);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.models.iter().map(|m| m.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn PerturbationModel>> {
        self.models.iter().find(|m| m.name() == name).cloned().ok_or_else(|| Error::UnknownStrategy {
            kind: "perturbation model",
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }

    pub fn default_model(&self) -> Result<Arc<dyn PerturbationModel>> {
        self.get(Self::DEFAULT)
    }
}

impl Default for PerturbationRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}
