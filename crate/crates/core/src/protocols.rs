//! End-to-end runs of the three loop experiments: a Bell measurement on a
//! time-displaced pair, teleportation into the past, and teleportation
//! through a loop in which the qubit meets its own past via a CNOT.
//!
//! Outcomes are enumerated with their probabilities, never sampled.

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::consistency::{
    build_consistency_map, solve_fixed_point, stability_limit, BellOnTde, ConsistencyScenario, TimeLoopTeleport,
    DEFAULT_EPSILONS,
};
use crate::gates::{bell_measure, BellTag, Correction, PerturbationModel, PerturbationRegistry};
use crate::qlinalg::{ComplexMatrix, DensityOperator, PureState};
use crate::temporal::{make_tde, ClockCycle, TemporalLabel, TemporalRegister};
use crate::{Error, Result, C64, TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    BellOnTde,
    TeleportToPast,
    TimeLoopTeleport,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::BellOnTde => "bell-on-tde",
            ScenarioKind::TeleportToPast => "teleport-to-past",
            ScenarioKind::TimeLoopTeleport => "time-loop",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomePolicy {
    PostSelect(BellTag),
    AverageAll,
}

/// How a degenerate family of fixed points is narrowed to one state.
#[derive(Clone)]
pub struct Resolution {
    pub model: Arc<dyn PerturbationModel>,
    pub epsilons: Vec<f64>,
}

impl Resolution {
    pub fn new(model: Arc<dyn PerturbationModel>, epsilons: Vec<f64>) -> Self {
        Self { model, epsilons }
    }
}

impl Default for Resolution {
    fn default() -> Self {
        let model = PerturbationRegistry::builtin().default_model().expect("default model is registered");
        Self { model, epsilons: DEFAULT_EPSILONS.to_vec() }
    }
}

impl fmt::Debug for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Resolution").field("model", &self.model.name()).field("epsilons", &self.epsilons).finish()
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub alpha: C64,
    pub beta: C64,
    pub tau_cycles: i64,
    pub outcome_policy: OutcomePolicy,
    /// Apply the receiver's correction to the reported outputs.
    pub correct: bool,
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind, alpha: C64, beta: C64, tau_cycles: i64, outcome_policy: OutcomePolicy) -> Self {
        Self { kind, alpha, beta, tau_cycles, outcome_policy, correct: false }
    }

    pub fn with_correction(mut self, correct: bool) -> Self {
        self.correct = correct;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let norm = self.alpha.norm_sqr() + self.beta.norm_sqr();
        if (norm - 1.0).abs() > TOL.norm {
            return Err(Error::NotNormalized(norm));
        }
        if self.tau_cycles < 1 {
            return Err(Error::InvalidArgument(format!("tau must be at least one cycle, got {}", self.tau_cycles)));
        }
        if self.kind == ScenarioKind::TimeLoopTeleport && self.tau_cycles != TimeLoopTeleport::TAU_CYCLES {
            return Err(Error::InvalidArgument(format!(
                "time-loop teleportation needs tau = {} cycles, got {}",
                TimeLoopTeleport::TAU_CYCLES,
                self.tau_cycles
            )));
        }
        Ok(())
    }

    pub fn run(&self) -> Result<ProtocolResult> {
        self.run_with(&Resolution::default())
    }

    pub fn run_with(&self, resolution: &Resolution) -> Result<ProtocolResult> {
        self.validate()?;
        let mut result = match self.kind {
            ScenarioKind::BellOnTde => run_bell_on_tde_with(self.tau_cycles, resolution)?,
            ScenarioKind::TeleportToPast => teleport_to_past(self.alpha, self.beta, self.tau_cycles, self.correct)?,
            ScenarioKind::TimeLoopTeleport => {
                time_loop_teleport_with(self.alpha, self.beta, self.outcome_policy, self.correct, resolution)?
            }
        };
        result.policy = self.outcome_policy;
        Ok(result)
    }
}

/// Where an outcome's state came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Route {
    /// Direct Born-rule measurement.
    Measured,
    /// Unique fixed point of the consistency map.
    Unique,
    /// Limit of the perturbed problem; the unperturbed family had this dimension.
    StabilityLimit { model: String, epsilon: f64, family_dim: usize },
}

impl Route {
    fn describe(&self) -> String {
        match self {
            Route::Measured => "measured".into(),
            Route::Unique => "unique".into(),
            Route::StabilityLimit { model, epsilon, .. } => format!("stability-limit:{model}@{epsilon:e}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OutcomeRecord {
    pub tag: BellTag,
    pub probability: f64,
    /// Reported state: `uncorrected` with `correction` applied when `correction_applied`.
    pub output: DensityOperator,
    pub uncorrected: DensityOperator,
    pub correction: Correction,
    pub correction_applied: bool,
    pub route: Route,
}

#[derive(Debug, Clone)]
pub struct ProtocolResult {
    pub scenario: ScenarioKind,
    pub alpha2: Option<f64>,
    pub tau_cycles: i64,
    pub policy: OutcomePolicy,
    /// All four outcomes in `BellTag::ALL` order.
    pub outcomes: Vec<OutcomeRecord>,
    /// `sum_k p_k * uncorrected_k`: what a receiver holds without learning the outcome.
    pub averaged: DensityOperator,
}

fn rho_json(rho: &DensityOperator) -> Value {
    json!({ "real": rho.matrix().real_rows(), "imag": rho.matrix().imag_rows() })
}

impl ProtocolResult {
    fn assemble(
        scenario: ScenarioKind,
        alpha2: Option<f64>,
        tau_cycles: i64,
        outcomes: Vec<OutcomeRecord>,
    ) -> Result<Self> {
        let total: f64 = outcomes.iter().map(|o| o.probability).sum();
        if (total - 1.0).abs() > TOL.hermitian_input {
            return Err(Error::NotNormalized(total));
        }
        let mut avg = ComplexMatrix::zeros(2, 2);
        for o in &outcomes {
            avg = &avg + &o.uncorrected.matrix().scale_real(o.probability);
        }
        let averaged = DensityOperator::from_unnormalized(&avg, vec![2])?;
        Ok(Self { scenario, alpha2, tau_cycles, policy: OutcomePolicy::AverageAll, outcomes, averaged })
    }

    pub fn outcome(&self, tag: BellTag) -> &OutcomeRecord {
        &self.outcomes[tag.index()]
    }

    /// The post-selected outcome, if the policy names one.
    pub fn selected(&self) -> Option<&OutcomeRecord> {
        match self.policy {
            OutcomePolicy::PostSelect(tag) => Some(self.outcome(tag)),
            OutcomePolicy::AverageAll => None,
        }
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    pub fn to_json(&self) -> Value {
        let outcome_json = |o: &OutcomeRecord| {
            json!({
                "tag": o.tag,
                "prob": o.probability,
                "rho": rho_json(&o.output),
                "correction_applied": o.correction_applied,
                "route": o.route.describe(),
            })
        };
        let mut out = json!({
            "scenario": self.scenario.as_str(),
            "alpha2": self.alpha2,
            "tau": self.tau_cycles,
            "outcomes": self.outcomes.iter().map(outcome_json).collect::<Vec<_>>(),
            "averaged_rho": rho_json(&self.averaged),
        });
        if let Some(sel) = self.selected() {
            out["selected"] = outcome_json(sel);
        }
        out
    }
}

/// Probability and state of one outcome of a consistency scenario.
/// Degenerate families go through the stability limit.
pub fn resolve_outcome(
    scenario: &dyn ConsistencyScenario,
    outcome: BellTag,
    resolution: &Resolution,
) -> Result<(f64, DensityOperator, Route)> {
    let report = solve_fixed_point(&build_consistency_map(scenario, outcome)?)?;
    let probability = report.eigenvalue;
    if report.unique {
        return Ok((probability, report.output()?, Route::Unique));
    }
    let stable = stability_limit(scenario, outcome, resolution.model.as_ref(), &resolution.epsilons)?;
    let last = stable.steps.last().expect("non-empty schedule");
    let route = Route::StabilityLimit {
        model: stable.model.clone(),
        epsilon: last.epsilon,
        family_dim: report.nullspace_dim,
    };
    Ok((probability, last.report.output()?, route))
}

pub fn run_bell_on_tde(tau_cycles: i64) -> Result<ProtocolResult> {
    run_bell_on_tde_with(tau_cycles, &Resolution::default())
}

/// Bell measurement on `(1, n)` and `(2, n)` when the location-2 qubit is the
/// later self of the TDE partner at `n - tau`. Reports the state at `n - tau`.
pub fn run_bell_on_tde_with(tau_cycles: i64, resolution: &Resolution) -> Result<ProtocolResult> {
    let scenario = BellOnTde::new(ClockCycle(0), tau_cycles)?;
    let outcomes = BellTag::ALL
        .into_iter()
        .map(|tag| {
            let (probability, state, route) = resolve_outcome(&scenario, tag, resolution)?;
            Ok(OutcomeRecord {
                tag,
                probability,
                output: state.clone(),
                uncorrected: state,
                correction: Correction::Identity,
                correction_applied: false,
                route,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ProtocolResult::assemble(ScenarioKind::BellOnTde, None, tau_cycles, outcomes)
}

/// Teleports `alpha|0> + beta|1>` from `(3, n)` onto the TDE partner at `(2, n - tau)`.
pub fn teleport_to_past(alpha: C64, beta: C64, tau_cycles: i64, correct: bool) -> Result<ProtocolResult> {
    let input = PureState::qubit(alpha, beta)?;
    let n = 0;
    let receiver = TemporalLabel::at(2, n - tau_cycles);
    let reg = make_tde(ClockCycle(n), tau_cycles)?.tensor(&TemporalRegister::pure(vec![TemporalLabel::at(3, n)], input)?)?;
    let outcomes = bell_measure(&reg, [TemporalLabel::at(3, n), TemporalLabel::at(1, n)])?
        .into_iter()
        .map(|m| {
            let tag = m.tag.expect("Bell measurement tags its outcomes");
            let post = m.post_state.ok_or_else(|| {
                Error::InvalidArgument(format!("outcome {tag} has negligible probability {:e}", m.probability))
            })?;
            let uncorrected = post.reduced(&[receiver])?;
            let correction = tag.correction();
            let output = if correct { correction.apply(&uncorrected)? } else { uncorrected.clone() };
            Ok(OutcomeRecord {
                tag,
                probability: m.probability,
                output,
                uncorrected,
                correction,
                correction_applied: correct,
                route: Route::Measured,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ProtocolResult::assemble(ScenarioKind::TeleportToPast, Some(alpha.norm_sqr()), tau_cycles, outcomes)
}

/// Correction on the loop output: a single bit flip for `psi+-`, nothing for `phi+-`.
pub fn time_loop_correction(tag: BellTag) -> Correction {
    match tag {
        BellTag::PhiPlus | BellTag::PhiMinus => Correction::Identity,
        BellTag::PsiPlus | BellTag::PsiMinus => Correction::X,
    }
}

pub fn time_loop_teleport(alpha: C64, beta: C64, policy: OutcomePolicy, correct: bool) -> Result<ProtocolResult> {
    time_loop_teleport_with(alpha, beta, policy, correct, &Resolution::default())
}

pub fn time_loop_teleport_with(
    alpha: C64,
    beta: C64,
    policy: OutcomePolicy,
    correct: bool,
    resolution: &Resolution,
) -> Result<ProtocolResult> {
    let scenario = TimeLoopTeleport::new(ClockCycle(0), alpha, beta)?;
    let mut result = run_time_loop(&scenario, correct, resolution)?;
    result.alpha2 = Some(alpha.norm_sqr());
    result.policy = policy;
    Ok(result)
}

fn run_time_loop(scenario: &TimeLoopTeleport, correct: bool, resolution: &Resolution) -> Result<ProtocolResult> {
    let outcomes = BellTag::ALL
        .into_iter()
        .map(|tag| {
            let (probability, uncorrected, route) = resolve_outcome(scenario, tag, resolution)?;
            let correction = time_loop_correction(tag);
            let output = if correct { correction.apply(&uncorrected)? } else { uncorrected.clone() };
            Ok(OutcomeRecord { tag, probability, output, uncorrected, correction, correction_applied: correct, route })
        })
        .collect::<Result<Vec<_>>>()?;
    ProtocolResult::assemble(ScenarioKind::TimeLoopTeleport, None, TimeLoopTeleport::TAU_CYCLES, outcomes)
}

/// Uncorrected loop output of one outcome for an arbitrary (possibly mixed) input qubit.
pub fn time_loop_output(input: &DensityOperator, outcome: BellTag) -> Result<DensityOperator> {
    let scenario = TimeLoopTeleport::with_input(ClockCycle(0), input.clone())?;
    Ok(resolve_outcome(&scenario, outcome, &Resolution::default())?.1)
}

/// `diag(alpha^4 + beta^4, 2 alpha^2 beta^2)` for `|alpha|^2 = alpha2`.
pub fn closed_form_phi_output(alpha2: f64) -> DensityOperator {
    let beta2 = 1.0 - alpha2;
    DensityOperator::qubit_diag(alpha2 * alpha2 + beta2 * beta2, 2.0 * alpha2 * beta2).expect("valid diagonal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::trace_distance;

    fn real(alpha2: f64) -> (C64, C64) {
        (C64::new(alpha2.sqrt(), 0.0), C64::new((1.0 - alpha2).sqrt(), 0.0))
    }

    fn mixed() -> DensityOperator {
        DensityOperator::maximally_mixed(1)
    }

    #[test]
    fn tde_outcomes_are_uniform_and_mixed() {
        let r = run_bell_on_tde(1).unwrap();
        for o in &r.outcomes {
            assert!((o.probability - 0.25).abs() < 1e-10);
            assert!(trace_distance(&o.output, &mixed()).unwrap() < 1e-9);
            assert!(matches!(o.route, Route::StabilityLimit { .. }));
        }
        assert!(trace_distance(&r.averaged, &mixed()).unwrap() < 1e-10);
    }

    #[test]
    fn tde_rejects_zero_tau() {
        assert!(run_bell_on_tde(0).is_err());
    }

    #[test]
    fn teleport_phi_plus_delivers_input() {
        let (a, b) = real(0.8);
        let r = teleport_to_past(a, b, 1, false).unwrap();
        let phi = r.outcome(BellTag::PhiPlus);
        assert!((phi.output.matrix().get(0, 0).re - 0.8).abs() < 1e-12);
        assert!(phi.output.min_eigenvalue().abs() < 1e-10);
        let target = PureState::qubit(a, b).unwrap().density();
        for o in &r.outcomes {
            assert!((o.probability - 0.25).abs() < 1e-12);
            assert!(trace_distance(&o.correction.apply(&o.uncorrected).unwrap(), &target).unwrap() < 1e-10);
        }
        assert!(trace_distance(&r.averaged, &mixed()).unwrap() < 1e-10);
    }

    #[test]
    fn teleport_basis_input() {
        let r = teleport_to_past(C64::new(1.0, 0.0), C64::new(0.0, 0.0), 3, true).unwrap();
        for o in &r.outcomes {
            assert!(o.output.max_abs_diff(&DensityOperator::qubit_diag(1.0, 0.0).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn time_loop_matches_closed_form() {
        let (a, b) = real(0.8);
        let r = time_loop_teleport(a, b, OutcomePolicy::PostSelect(BellTag::PsiPlus), true).unwrap();
        let phi = closed_form_phi_output(0.8);
        for o in &r.outcomes {
            assert!(o.output.max_abs_diff(&phi) < 1e-9, "{}", o.tag);
        }
        let psi = r.outcome(BellTag::PsiPlus);
        assert!(psi.uncorrected.max_abs_diff(&DensityOperator::qubit_diag(0.32, 0.68).unwrap()) < 1e-9);
        assert_eq!(r.selected().unwrap().tag, BellTag::PsiPlus);
        assert!(trace_distance(&r.averaged, &mixed()).unwrap() < 1e-10);
    }

    #[test]
    fn time_loop_equal_superposition_is_mixed() {
        let (a, b) = real(0.5);
        let r = time_loop_teleport(a, b, OutcomePolicy::AverageAll, false).unwrap();
        assert!(r.outcome(BellTag::PhiPlus).output.max_abs_diff(&mixed()) < 1e-9);
    }

    #[test]
    fn time_loop_rejects_wrong_tau() {
        let spec = ScenarioSpec::new(
            ScenarioKind::TimeLoopTeleport,
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            3,
            OutcomePolicy::AverageAll,
        );
        assert!(spec.run().is_err());
    }

    #[test]
    fn unnormalized_amplitudes_rejected() {
        let spec =
            ScenarioSpec::new(ScenarioKind::TeleportToPast, C64::new(1.0, 0.0), C64::new(0.1, 0.0), 1, OutcomePolicy::AverageAll);
        assert!(matches!(spec.validate(), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn mixed_input_breaks_linearity() {
        let zero = PureState::basis(1, 0).unwrap().density();
        let plus = PureState::real_qubit(0.5).unwrap().density();
        let out_zero = time_loop_output(&zero, BellTag::PhiPlus).unwrap();
        let out_plus = time_loop_output(&plus, BellTag::PhiPlus).unwrap();
        let ensemble = (&out_zero.matrix().scale_real(0.5) + &out_plus.matrix().scale_real(0.5)).hermitize();
        let ensemble = DensityOperator::new(ensemble, vec![2]).unwrap();
        let mix = (&zero.matrix().scale_real(0.5) + &plus.matrix().scale_real(0.5)).hermitize();
        let out_mix = time_loop_output(&DensityOperator::new(mix, vec![2]).unwrap(), BellTag::PhiPlus).unwrap();
        let gap = trace_distance(&ensemble, &out_mix).unwrap();
        assert!(gap > 0.1, "gap {gap}");
    }

    #[test]
    fn basis_inputs_follow_closed_form() {
        let zero = PureState::basis(1, 0).unwrap().density();
        let one = PureState::basis(1, 1).unwrap().density();
        let ground = DensityOperator::qubit_diag(1.0, 0.0).unwrap();
        assert!(time_loop_output(&zero, BellTag::PhiPlus).unwrap().max_abs_diff(&ground) < 1e-10);
        // beta = 1 makes alpha^4 + beta^4 = 1: |1> comes back as |0>.
        assert!(time_loop_output(&one, BellTag::PhiPlus).unwrap().max_abs_diff(&ground) < 1e-10);
    }

    #[test]
    fn json_shape() {
        let (a, b) = real(0.8);
        let v = time_loop_teleport(a, b, OutcomePolicy::PostSelect(BellTag::PhiPlus), false).unwrap().to_json();
        assert_eq!(v["scenario"], "time-loop");
        assert_eq!(v["outcomes"].as_array().unwrap().len(), 4);
        assert_eq!(v["selected"]["tag"], "phi+");
        assert!((v["selected"]["rho"]["real"][0][0].as_f64().unwrap() - 0.68).abs() < 1e-9);
    }
}
