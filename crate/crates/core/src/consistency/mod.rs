//! Self-consistency of states that meet their own past.
//!
//! [`build_consistency_map`] tabulates one pass around a scenario's loop as a
//! matrix acting on the row-major vectorization of the unknown state `gamma`.
//! [`solve_fixed_point`] finds the states reproduced by that pass up to the
//! outcome probability, [`stability_limit`] resolves degenerate families by
//! perturbing the measurement, and [`deutsch_ctc_oracle`] is an independent
//! iteration used to cross-check the solver.

mod ctc;
mod scenario;
mod solver;
mod stability;

pub use ctc::{deutsch_ctc_oracle, CtcInteraction, CtcSolution, FixedInteraction, InteractionRegistry};
pub use scenario::{BellOnTde, ConsistencyScenario, ScenarioFactory, ScenarioParams, ScenarioRegistry, TimeLoopTeleport};
pub use solver::{hermitian_basis, solve_fixed_point, SolutionReport};
pub use stability::{stability_limit, StabilityReport, StabilityStep, DEFAULT_EPSILONS};

use crate::gates::{bell_basis, BellTag, PerturbationModel};
use crate::qlinalg::{ComplexMatrix, DensityOperator};
use crate::temporal::{TemporalLabel, TemporalRegister};
use crate::{Error, Result, C64, TOL};

/// Linear consistency map for one scenario and one measurement outcome.
#[derive(Debug, Clone)]
pub struct ConsistencyProblem {
    /// Number of gamma parameters (entries of the unknown matrix).
    pub gamma_dim: usize,
    /// `gamma_dim x gamma_dim` matrix acting on row-major `vec(gamma)`.
    pub map_matrix: ComplexMatrix,
    pub outcome: BellTag,
    pub description: String,
    pub gamma_labels: Vec<TemporalLabel>,
    pub output_labels: Vec<TemporalLabel>,
    /// `|alpha|^2` of the scenario's input qubit, if any.
    pub alpha2: Option<f64>,
    /// Perturbation model name and strength, if the measurement was perturbed.
    pub perturbation: Option<(String, f64)>,
}

impl ConsistencyProblem {
    /// Side length of the gamma matrix.
    pub fn gamma_side(&self) -> usize {
        1 << self.gamma_labels.len()
    }

    /// `L(gamma)` through the tabulated matrix.
    pub fn apply(&self, gamma: &ComplexMatrix) -> ComplexMatrix {
        let n = self.gamma_side();
        let image = self.map_matrix.apply(&gamma.to_row_major());
        ComplexMatrix::new(n, n, image).expect("map preserves shape")
    }

    /// Output slots of a solution on `gamma_labels`.
    pub fn output_of(&self, gamma: &DensityOperator) -> Result<DensityOperator> {
        TemporalRegister::mixed(self.gamma_labels.clone(), gamma.clone())?.reduced(&self.output_labels)
    }
}

/// Consistency map under the ideal Bell projector for `outcome`.
pub fn build_consistency_map(scenario: &dyn ConsistencyScenario, outcome: BellTag) -> Result<ConsistencyProblem> {
    let effect = bell_basis()[outcome.index()].projector.clone();
    build_map_with_effect(scenario, outcome, &effect, None)
}

/// Consistency map with the measurement perturbed by `model` at strength `epsilon`.
pub fn build_perturbed_map(
    scenario: &dyn ConsistencyScenario,
    outcome: BellTag,
    model: &dyn PerturbationModel,
    epsilon: f64,
) -> Result<ConsistencyProblem> {
    let effect = model.effect(outcome, epsilon)?;
    build_map_with_effect(scenario, outcome, &effect, Some((model.name().to_string(), epsilon)))
}

/// Tabulates one pass of `scenario` on every matrix unit `|i><j|`.
pub fn build_map_with_effect(
    scenario: &dyn ConsistencyScenario,
    outcome: BellTag,
    effect: &ComplexMatrix,
    perturbation: Option<(String, f64)>,
) -> Result<ConsistencyProblem> {
    let labels = scenario.gamma_labels();
    let n = 1usize << labels.len();
    let gamma_dim = n * n;
    let mut columns = vec![C64::new(0.0, 0.0); gamma_dim * gamma_dim];
    for i in 0..n {
        for j in 0..n {
            let guess = TemporalRegister::unnormalized(labels.clone(), ComplexMatrix::unit(n, i, j))?;
            let image = scenario.propagate(&guess, effect)?;
            if image.labels() != labels.as_slice() {
                return Err(Error::InvalidLabel(format!(
                    "scenario '{}' returned slots {:?} instead of {:?}",
                    scenario.name(),
                    image.labels(),
                    labels
                )));
            }
            let col = i * n + j;
            for (row, z) in image.operator().to_row_major().into_iter().enumerate() {
                columns[row * gamma_dim + col] = z;
            }
        }
    }
    let map_matrix = ComplexMatrix::new(gamma_dim, gamma_dim, columns)?;

    let mut description = scenario.name().to_string();
    if let Some((name, eps)) = &perturbation {
        description.push_str(&format!(" [{name} eps={eps:e}]"));
    }
    let problem = ConsistencyProblem {
        gamma_dim,
        map_matrix,
        outcome,
        description,
        gamma_labels: labels,
        output_labels: scenario.output_labels(),
        alpha2: scenario.input().map(|rho| rho.matrix().get(0, 0).re),
        perturbation,
    };
    for b in hermitian_basis(n) {
        let dev = problem.apply(&b).hermitian_deviation();
        if dev > TOL.hermitian_input {
            return Err(Error::NotHermitian(dev));
        }
    }
    Ok(problem)
}
