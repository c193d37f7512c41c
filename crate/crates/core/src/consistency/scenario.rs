//! Scenarios whose Bell measurement closes a loop in time.
//!
//! A scenario describes one pass around the loop: given a guess for the
//! unknown state on [`ConsistencyScenario::gamma_labels`], it produces the
//! (unnormalized) state those same slots end up in once the measurement
//! effect has fired. Every step is linear in the guess, so the pass is a
//! linear map whose fixed points are the self-consistent states.

use std::sync::Arc;

use crate::gates::Gate;
use crate::qlinalg::{ComplexMatrix, DensityOperator, PureState};
use crate::temporal::{make_tde, ClockCycle, TemporalLabel, TemporalRegister};
use crate::{Error, Result, C64};

pub trait ConsistencyScenario: Send + Sync {
    fn name(&self) -> &'static str;

    /// Slots of the unknown state, in the order its matrix uses.
    fn gamma_labels(&self) -> Vec<TemporalLabel>;

    /// Slots reported as the scenario's output, a subset of `gamma_labels`.
    fn output_labels(&self) -> Vec<TemporalLabel>;

    /// The Bell-measured pair; the first entry is the qubit perturbation models act on.
    fn measured(&self) -> [TemporalLabel; 2];

    /// Input qubit fed into the loop, if the scenario has one.
    fn input(&self) -> Option<&DensityOperator> {
        None
    }

    /// One pass around the loop for the guess `gamma` (any operator on
    /// `gamma_labels`, Hermitian or not) under measurement effect `effect`.
    /// The result lives on `gamma_labels` in the same order.
    fn propagate(&self, gamma: &TemporalRegister, effect: &ComplexMatrix) -> Result<TemporalRegister>;
}

/// Bell measurement at cycle `n` on a pair displaced by `tau` cycles: the
/// location-2 member at `n` is the later self of the one held at `n - tau`.
#[derive(Debug, Clone)]
pub struct BellOnTde {
    cycle: ClockCycle,
    tau_cycles: i64,
}

impl BellOnTde {
    pub fn new(cycle: ClockCycle, tau_cycles: i64) -> Result<Self> {
        if tau_cycles < 1 {
            return Err(Error::InvalidArgument(format!("tau must be at least one cycle, got {tau_cycles}")));
        }
        Ok(Self { cycle, tau_cycles })
    }

    pub fn tau_cycles(&self) -> i64 {
        self.tau_cycles
    }
}

impl ConsistencyScenario for BellOnTde {
    fn name(&self) -> &'static str {
        "bell-on-tde"
    }

    fn gamma_labels(&self) -> Vec<TemporalLabel> {
        vec![TemporalLabel::at(2, self.cycle.0)]
    }

    fn output_labels(&self) -> Vec<TemporalLabel> {
        self.gamma_labels()
    }

    fn measured(&self) -> [TemporalLabel; 2] {
        [TemporalLabel::at(1, self.cycle.0), TemporalLabel::at(2, self.cycle.0)]
    }

    fn propagate(&self, gamma: &TemporalRegister, effect: &ComplexMatrix) -> Result<TemporalRegister> {
        let joint = make_tde(self.cycle, self.tau_cycles)?.tensor(gamma)?;
        // Leaves qubit 2 at n - tau; carry it forward to where the guess lives.
        joint.apply_effect(effect, &self.measured())?.time_translate(2, self.tau_cycles)
    }
}

/// Teleportation through a pair displaced by two cycles, with a CNOT
/// (input qubit 3 as control, qubit 2 as target) at the intermediate cycle.
#[derive(Debug, Clone)]
pub struct TimeLoopTeleport {
    cycle: ClockCycle,
    input: DensityOperator,
}

impl TimeLoopTeleport {
    pub const TAU_CYCLES: i64 = 2;

    pub fn new(cycle: ClockCycle, alpha: C64, beta: C64) -> Result<Self> {
        Ok(Self { cycle, input: PureState::qubit(alpha, beta)?.density() })
    }

    /// Feeds a (possibly mixed) single-qubit state into the loop.
    pub fn with_input(cycle: ClockCycle, input: DensityOperator) -> Result<Self> {
        if input.slot_dims() != [2] {
            return Err(Error::DimensionMismatch(format!("loop input has slots {:?}", input.slot_dims())));
        }
        Ok(Self { cycle, input })
    }
}

impl ConsistencyScenario for TimeLoopTeleport {
    fn name(&self) -> &'static str {
        "time-loop"
    }

    fn gamma_labels(&self) -> Vec<TemporalLabel> {
        vec![TemporalLabel::at(3, self.cycle.0), TemporalLabel::at(2, self.cycle.0)]
    }

    fn output_labels(&self) -> Vec<TemporalLabel> {
        vec![TemporalLabel::at(2, self.cycle.0)]
    }

    fn measured(&self) -> [TemporalLabel; 2] {
        [TemporalLabel::at(1, self.cycle.0), TemporalLabel::at(3, self.cycle.0)]
    }

    fn input(&self) -> Option<&DensityOperator> {
        Some(&self.input)
    }

    fn propagate(&self, gamma: &TemporalRegister, effect: &ComplexMatrix) -> Result<TemporalRegister> {
        let n = self.cycle.0;
        let tau = Self::TAU_CYCLES;
        let joint = make_tde(self.cycle, tau)?.tensor(gamma)?;
        // Qubit 2 now lives at n - tau and at n.
        let two_time = joint.apply_effect(effect, &self.measured())?;
        let fresh = TemporalRegister::mixed(vec![TemporalLabel::at(3, n - tau)], self.input.clone())?;
        let mut reg = two_time.tensor(&fresh)?;
        for _ in 0..tau / 2 {
            reg = reg.time_translate(2, 1)?.time_translate(3, 1)?;
        }
        let mid = n - tau / 2;
        reg = Gate::cnot(TemporalLabel::at(3, mid), TemporalLabel::at(2, mid))?.apply(&reg)?;
        for _ in 0..tau - tau / 2 {
            reg = reg.time_translate(2, 1)?.time_translate(3, 1)?;
        }
        reg.trace_out(&[TemporalLabel::at(2, n + tau)])?.reorder(&self.gamma_labels())
    }
}

/// Parameters a scenario factory may read.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams {
    pub alpha: C64,
    pub beta: C64,
    pub tau_cycles: i64,
    pub cycle: ClockCycle,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self { alpha: C64::new(1.0, 0.0), beta: C64::new(0.0, 0.0), tau_cycles: 1, cycle: ClockCycle(0) }
    }
}

impl ScenarioParams {
    /// Real amplitudes `alpha = sqrt(alpha2)`, `beta = sqrt(1 - alpha2)`.
    pub fn with_alpha2(mut self, alpha2: f64) -> Self {
        self.alpha = C64::new(alpha2.sqrt(), 0.0);
        self.beta = C64::new((1.0 - alpha2).max(0.0).sqrt(), 0.0);
        self
    }

    pub fn with_tau(mut self, tau_cycles: i64) -> Self {
        self.tau_cycles = tau_cycles;
        self
    }
}

pub type ScenarioFactory = fn(&ScenarioParams) -> Result<Arc<dyn ConsistencyScenario>>;

struct ScenarioEntry {
    name: &'static str,
    summary: &'static str,
    factory: ScenarioFactory,
}

/// Consistency scenarios addressable by name.
pub struct ScenarioRegistry {
    entries: Vec<ScenarioEntry>,
}

impl ScenarioRegistry {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register("bell-on-tde", "Bell measurement on a time-displaced pair", |p| {
            Ok(Arc::new(BellOnTde::new(p.cycle, p.tau_cycles)?))
        });
        reg.register("time-loop", "teleportation through a two-cycle loop with a CNOT", |p| {
            if p.tau_cycles != TimeLoopTeleport::TAU_CYCLES {
                return Err(Error::InvalidArgument(format!(
                    "time-loop teleportation needs tau = {} cycles, got {}",
                    TimeLoopTeleport::TAU_CYCLES,
                    p.tau_cycles
                )));
            }
            Ok(Arc::new(TimeLoopTeleport::new(p.cycle, p.alpha, p.beta)?))
        });
        reg
    }

    pub fn register(&mut self, name: &'static str, summary: &'static str, factory: ScenarioFactory) {
        self.entries.retain(|e| e.name != name);
        self.entries.push(ScenarioEntry { name, summary, factory });
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name).collect()
    }

    pub fn summary(&self, name: &str) -> Option<&'static str> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.summary)
    }

    pub fn build(&self, name: &str, params: &ScenarioParams) -> Result<Arc<dyn ConsistencyScenario>> {
        let entry = self.entries.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownStrategy {
            kind: "scenario",
            name: name.to_string(),
            available: self.names().join(", "),
        })?;
        (entry.factory)(params)
    }
}

impl Default for ScenarioRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}
