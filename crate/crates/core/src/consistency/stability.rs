use super::{build_perturbed_map, solve_fixed_point, ConsistencyScenario, SolutionReport};
use crate::gates::{BellTag, PerturbationModel};
use crate::qlinalg::{trace_distance, DensityOperator};
use crate::{Error, Result};

pub const DEFAULT_EPSILONS: [f64; 3] = [1e-1, 1e-2, 1e-3];

#[derive(Debug, Clone)]
pub struct StabilityStep {
    pub epsilon: f64,
    pub report: SolutionReport,
    /// Trace distance to the previous (larger-epsilon) solution.
    pub change_from_previous: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub model: String,
    pub outcome: BellTag,
    /// Solution at the smallest epsilon.
    pub limit: DensityOperator,
    pub steps: Vec<StabilityStep>,
}

fn check_schedule(epsilons: &[f64]) -> Result<()> {
    if epsilons.is_empty() {
        return Err(Error::InvalidArgument("epsilon schedule is empty".into()));
    }
    if let Some(e) = epsilons.iter().find(|e| !(**e > 0.0 && **e < 0.5)) {
        return Err(Error::InvalidArgument(format!("epsilon {e} outside (0, 0.5)")));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(format!("epsilons must be strictly descending: {epsilons:?}")));
    }
    Ok(())
}

/// Solves the perturbed problem along a shrinking schedule and takes the last
/// solution as the `epsilon -> 0` limit. Every step must have a unique fixed point.
pub fn stability_limit(
    scenario: &dyn ConsistencyScenario,
    outcome: BellTag,
    model: &dyn PerturbationModel,
    epsilons: &[f64],
) -> Result<StabilityReport> {
    check_schedule(epsilons)?;
    let mut steps: Vec<StabilityStep> = Vec::with_capacity(epsilons.len());
    for &epsilon in epsilons {
        let report = solve_fixed_point(&build_perturbed_map(scenario, outcome, model, epsilon)?)?;
        if !report.unique {
            return Err(Error::NonUniqueUnderPerturbation { epsilon, nullspace_dim: report.nullspace_dim });
        }
        let change_from_previous = match steps.last() {
            Some(prev) => Some(trace_distance(&prev.report.gamma, &report.gamma)?),
            None => None,
        };
        steps.push(StabilityStep { epsilon, report, change_from_previous });
    }
    let limit = steps.last().expect("non-empty schedule").report.gamma.clone();
    Ok(StabilityReport { model: model.name().to_string(), outcome, limit, steps })
}
