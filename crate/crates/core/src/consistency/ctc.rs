//! Deutsch fixed-point iteration for a qubit interacting with a closed
//! time-like curve. Slot order is always `(system, ctc)`.

use std::sync::Arc;

use crate::gates::{cnot_matrix, swap_matrix};
use crate::qlinalg::{trace_distance, ComplexMatrix, DensityOperator};
use crate::{Error, Result, TOL};

const MAX_ITERATIONS: usize = 100_000;
const CONVERGENCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct CtcSolution {
    pub rho_ctc: DensityOperator,
    pub rho_out: DensityOperator,
    pub iterations: usize,
    /// Trace distance between the last two iterates.
    pub residual: f64,
}

/// Iterates `rho_ctc <- tr_sys[U (rho_in (x) rho_ctc) U^dag]` from `I/2`.
pub fn deutsch_ctc_oracle(interaction: &ComplexMatrix, input: &DensityOperator) -> Result<CtcSolution> {
    let dev = interaction.unitarity_deviation();
    if interaction.rows() != 4 || dev > TOL.unitarity {
        return Err(Error::NotUnitary(dev));
    }
    if input.slot_dims() != [2] {
        return Err(Error::DimensionMismatch(format!("system input has slots {:?}", input.slot_dims())));
    }
    let evolve = |ctc: &DensityOperator| -> Result<DensityOperator> { input.tensor(ctc)?.conjugate_by(interaction) };

    let mut ctc = DensityOperator::maximally_mixed(1);
    let mut residual = f64::INFINITY;
    for iteration in 1..=MAX_ITERATIONS {
        let next = evolve(&ctc)?.partial_trace(&[1])?;
        residual = trace_distance(&next, &ctc)?;
        ctc = next;
        if residual < CONVERGENCE {
            let rho_out = evolve(&ctc)?.partial_trace(&[0])?;
            return Ok(CtcSolution { rho_ctc: ctc, rho_out, iterations: iteration, residual });
        }
    }
    Err(Error::NotConverged { iterations: MAX_ITERATIONS, residual })
}

/// A two-qubit interaction between a system qubit and a CTC qubit.
pub trait CtcInteraction: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    /// 4x4 unitary on `(system, ctc)`.
    fn unitary(&self) -> ComplexMatrix;
}

#[derive(Debug, Clone, Copy)]
pub struct FixedInteraction {
    pub name: &'static str,
    pub summary: &'static str,
    pub build: fn() -> ComplexMatrix,
}

impl CtcInteraction for FixedInteraction {
    fn name(&self) -> &'static str {
        self.name
    }

    fn summary(&self) -> &'static str {
        self.summary
    }

    fn unitary(&self) -> ComplexMatrix {
        (self.build)()
    }
}

fn cnot_ctc_control() -> ComplexMatrix {
    cnot_matrix().conjugate_by(&swap_matrix())
}

/// Interaction orderings addressable by name.
#[derive(Clone)]
pub struct InteractionRegistry {
    entries: Vec<Arc<dyn CtcInteraction>>,
}

impl InteractionRegistry {
    /// The ordering that reproduces the time-loop output map.
    pub const DEFAULT: &'static str = "cnot-then-swap";

    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register(Arc::new(FixedInteraction {
            name: "cnot-then-swap",
            summary: "CNOT (system controls CTC), then SWAP",
            build: || &swap_matrix() * &cnot_matrix(),
        }));
        reg.register(Arc::new(FixedInteraction {
            name: "cnot-ctc-control-then-swap",
            summary: "CNOT (CTC controls system), then SWAP",
            build: || &swap_matrix() * &cnot_ctc_control(),
        }));
        reg.register(Arc::new(FixedInteraction {
            name: "swap",
            summary: "SWAP only",
            build: swap_matrix,
        }));
        reg.register(Arc::new(FixedInteraction {
            name: "identity",
            summary: "no interaction",
            build: || ComplexMatrix::identity(4),
        }));
        reg
    }

    pub fn register(&mut self, interaction: Arc<dyn CtcInteraction>) {
        self.entries.retain(|e| e.name() != interaction.name());
        self.entries.push(interaction);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn CtcInteraction>> {
        self.entries.iter().find(|e| e.name() == name).cloned().ok_or_else(|| Error::UnknownStrategy {
            kind: "CTC interaction",
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }
}

impl Default for InteractionRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}
