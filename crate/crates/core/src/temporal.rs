//! Clock-cycle bookkeeping for qubits that live at several times.
//!
//! A qubit slot is identified by its spatial location and the clock cycle at
//! which it is held. The same physical qubit at two different cycles occupies
//! two distinct slots, which is what lets a register hold a "two-time" state.

use std::fmt;

use crate::qlinalg::{self, ComplexMatrix, DensityOperator, PureState};
use crate::{Error, Result, C64};

/// Integer clock-cycle index; physical times are never represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockCycle(pub i64);

impl ClockCycle {
    pub fn shifted(self, cycles: i64) -> Self {
        Self(self.0 + cycles)
    }
}

/// Spatial location (1, 2 or 3) plus clock cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TemporalLabel {
    location: u8,
    cycle: ClockCycle,
}

impl TemporalLabel {
    pub fn new(location: u8, cycle: ClockCycle) -> Result<Self> {
        if !(1..=3).contains(&location) {
            return Err(Error::InvalidLabel(format!("location {location} is not one of 1, 2, 3")));
        }
        Ok(Self { location, cycle })
    }

    /// Panicking shorthand for fixed labels.
    pub fn at(location: u8, cycle: i64) -> Self {
        Self::new(location, ClockCycle(cycle)).expect("valid location")
    }

    pub fn location(&self) -> u8 {
        self.location
    }

    pub fn cycle(&self) -> ClockCycle {
        self.cycle
    }
}

impl fmt::Display for TemporalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(loc {}, cycle {})", self.location, self.cycle.0)
    }
}

/// What a register holds. Intermediate results of projections are
/// unnormalized and may be non-Hermitian while a linear map is being tabulated.
#[derive(Debug, Clone, PartialEq)]
pub enum RegisterState {
    Pure(PureState),
    Mixed(DensityOperator),
    Unnormalized(ComplexMatrix),
}

/// Qubit slots labelled by `(location, cycle)` together with their joint state.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalRegister {
    labels: Vec<TemporalLabel>,
    state: RegisterState,
}

fn check_labels(labels: &[TemporalLabel], dim: usize) -> Result<()> {
    for (k, l) in labels.iter().enumerate() {
        if labels[..k].contains(l) {
            return Err(Error::InvalidLabel(format!("duplicate label {l}")));
        }
    }
    if labels.is_empty() || labels.len() >= usize::BITS as usize || 1usize << labels.len() != dim {
        return Err(Error::DimensionMismatch(format!("{} labels for dimension {dim}", labels.len())));
    }
    Ok(())
}

impl TemporalRegister {
    pub fn pure(labels: Vec<TemporalLabel>, state: PureState) -> Result<Self> {
        check_labels(&labels, state.amplitudes().len())?;
        Ok(Self { labels, state: RegisterState::Pure(state) })
    }

    pub fn mixed(labels: Vec<TemporalLabel>, state: DensityOperator) -> Result<Self> {
        check_labels(&labels, state.dim())?;
        Ok(Self { labels, state: RegisterState::Mixed(state) })
    }

    pub fn unnormalized(labels: Vec<TemporalLabel>, operator: ComplexMatrix) -> Result<Self> {
        if !operator.is_square() {
            return Err(Error::DimensionMismatch("register operator must be square".into()));
        }
        check_labels(&labels, operator.rows())?;
        Ok(Self { labels, state: RegisterState::Unnormalized(operator) })
    }

    pub fn labels(&self) -> &[TemporalLabel] {
        &self.labels
    }

    pub fn state(&self) -> &RegisterState {
        &self.state
    }

    pub fn slot_count(&self) -> usize {
        self.labels.len()
    }

    fn slot_dims(&self) -> Vec<usize> {
        vec![2; self.labels.len()]
    }

    pub fn slot_of(&self, label: &TemporalLabel) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::InvalidLabel(format!("{label} is not in the register")))
    }

    fn slots_of(&self, labels: &[TemporalLabel]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.slot_of(l)).collect()
    }

    /// The register's state as an operator `rho`.
    pub fn operator(&self) -> ComplexMatrix {
        match &self.state {
            RegisterState::Pure(p) => ComplexMatrix::outer(p.amplitudes()),
            RegisterState::Mixed(d) => d.matrix().clone(),
            RegisterState::Unnormalized(m) => m.clone(),
        }
    }

    /// `tr(rho)`; the probability weight carried by an unnormalized register.
    pub fn weight(&self) -> C64 {
        match &self.state {
            RegisterState::Unnormalized(m) => m.trace(),
            _ => C64::new(1.0, 0.0),
        }
    }

    /// Normalized density operator of the whole register.
    pub fn density(&self) -> Result<DensityOperator> {
        match &self.state {
            RegisterState::Pure(p) => Ok(p.density()),
            RegisterState::Mixed(d) => Ok(d.clone()),
            RegisterState::Unnormalized(m) => DensityOperator::from_unnormalized(m, self.slot_dims()),
        }
    }

    /// Shifts every slot held at `location` by `cycles`. Amplitudes are untouched.
    pub fn time_translate(&self, location: u8, cycles: i64) -> Result<Self> {
        if !self.labels.iter().any(|l| l.location == location) {
            return Err(Error::UnknownLocation(location));
        }
        let labels: Vec<TemporalLabel> = self
            .labels
            .iter()
            .map(|l| if l.location == location { TemporalLabel { cycle: l.cycle.shifted(cycles), ..*l } } else { *l })
            .collect();
        check_labels(&labels, 1 << labels.len())?;
        Ok(Self { labels, state: self.state.clone() })
    }

    /// Joint register; `self`'s slots come first.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        check_labels(&labels, 1 << labels.len())?;
        let state = match (&self.state, &other.state) {
            (RegisterState::Pure(a), RegisterState::Pure(b)) => RegisterState::Pure(a.tensor(b)?),
            (RegisterState::Unnormalized(_), _) | (_, RegisterState::Unnormalized(_)) => {
                RegisterState::Unnormalized(qlinalg::tensor(&self.operator(), &other.operator())?)
            }
            _ => RegisterState::Mixed(self.density()?.tensor(&other.density()?)?),
        };
        Ok(Self { labels, state })
    }

    /// Applies a unitary acting on `on` (first label most significant).
    pub fn apply_unitary(&self, unitary: &ComplexMatrix, on: &[TemporalLabel]) -> Result<Self> {
        let slots = self.slots_of(on)?;
        let full = qlinalg::embed(unitary, &self.slot_dims(), &slots)?;
        let state = match &self.state {
            RegisterState::Pure(p) => {
                RegisterState::Pure(PureState::new(full.apply(p.amplitudes()), p.slot_dims().to_vec())?)
            }
            RegisterState::Mixed(d) => RegisterState::Mixed(d.conjugate_by(&full)?),
            RegisterState::Unnormalized(m) => RegisterState::Unnormalized(m.conjugate_by(&full)),
        };
        Ok(Self { labels: self.labels.clone(), state })
    }

    /// Unnormalized state left on the other slots after the effect `effect`
    /// fires on `on`: `tr_on[(E (x) I) rho]`. Its trace is the outcome probability.
    pub fn apply_effect(&self, effect: &ComplexMatrix, on: &[TemporalLabel]) -> Result<Self> {
        let slots = self.slots_of(on)?;
        let full = qlinalg::embed(effect, &self.slot_dims(), &slots)?;
        let projected = &full * &self.operator();
        let keep: Vec<usize> = (0..self.labels.len()).filter(|k| !slots.contains(k)).collect();
        if keep.is_empty() {
            return Err(Error::InvalidArgument("effect consumes every slot".into()));
        }
        let reduced = qlinalg::partial_trace(&projected, &self.slot_dims(), &keep)?;
        Self::unnormalized(keep.iter().map(|&k| self.labels[k]).collect(), reduced)
    }

    /// Traces out the listed slots.
    pub fn trace_out(&self, labels: &[TemporalLabel]) -> Result<Self> {
        let drop = self.slots_of(labels)?;
        let keep: Vec<usize> = (0..self.labels.len()).filter(|k| !drop.contains(k)).collect();
        if keep.is_empty() {
            return Err(Error::InvalidArgument("cannot trace out every slot".into()));
        }
        let reduced = qlinalg::partial_trace(&self.operator(), &self.slot_dims(), &keep)?;
        let kept_labels = keep.iter().map(|&k| self.labels[k]).collect();
        match self.state {
            RegisterState::Unnormalized(_) => Self::unnormalized(kept_labels, reduced),
            _ => Self::mixed(kept_labels, DensityOperator::from_unnormalized(&reduced, vec![2; keep.len()])?),
        }
    }

    /// Normalized reduced state on `labels`, in the order given.
    pub fn reduced(&self, labels: &[TemporalLabel]) -> Result<DensityOperator> {
        let others: Vec<TemporalLabel> = self.labels.iter().copied().filter(|l| !labels.contains(l)).collect();
        let reg = if others.is_empty() { self.clone() } else { self.trace_out(&others)? };
        reg.reorder(labels)?.density()
    }

    /// Permutes slots into the order given by `labels`.
    pub fn reorder(&self, labels: &[TemporalLabel]) -> Result<Self> {
        if labels.len() != self.labels.len() {
            return Err(Error::InvalidArgument("reorder needs every label exactly once".into()));
        }
        let order = self.slots_of(labels)?;
        let m = qlinalg::permute_slots(&self.operator(), &self.slot_dims(), &order)?;
        let state = match &self.state {
            RegisterState::Pure(p) => {
                let dims = self.slot_dims();
                let n = dims.len();
                let mut amps = vec![C64::new(0.0, 0.0); p.amplitudes().len()];
                for (i, a) in p.amplitudes().iter().enumerate() {
                    let bits: Vec<usize> = (0..n).map(|s| (i >> (n - 1 - s)) & 1).collect();
                    let j = order.iter().fold(0, |acc, &src| (acc << 1) | bits[src]);
                    amps[j] = *a;
                }
                RegisterState::Pure(PureState::new(amps, dims)?)
            }
            RegisterState::Mixed(_) => RegisterState::Mixed(DensityOperator::new(m, self.slot_dims())?),
            RegisterState::Unnormalized(_) => RegisterState::Unnormalized(m),
        };
        Ok(Self { labels: labels.to_vec(), state })
    }
}

/// `(|00> + |11>)/sqrt2` on `(1, cycle)` and `(2, cycle)`.
pub fn make_bell_pair(cycle: ClockCycle) -> TemporalRegister {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    let state = PureState::new(vec![s, z, z, s], vec![2, 2]).expect("normalized Bell pair");
    TemporalRegister::pure(
        vec![TemporalLabel { location: 1, cycle }, TemporalLabel { location: 2, cycle }],
        state,
    )
    .expect("distinct labels")
}

/// Bell pair whose location-2 member sits `tau_cycles` earlier: labels `(1, n)` and `(2, n - tau)`.
pub fn make_tde(cycle_n: ClockCycle, tau_cycles: i64) -> Result<TemporalRegister> {
    if tau_cycles < 1 {
        return Err(Error::InvalidArgument(format!("time displacement must be at least one cycle, got {tau_cycles}")));
    }
    make_bell_pair(cycle_n).time_translate(2, -tau_cycles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::trace_distance;

    #[test]
    fn translate_shifts_only_that_location() {
        let reg = make_bell_pair(ClockCycle(5));
        let moved = reg.time_translate(2, -1).unwrap();
        assert_eq!(moved.labels(), &[TemporalLabel::at(1, 5), TemporalLabel::at(2, 4)]);
        assert_eq!(moved.state(), reg.state());
    }

    #[test]
    fn translate_by_zero_and_back() {
        let reg = make_tde(ClockCycle(3), 2).unwrap();
        assert_eq!(reg.time_translate(1, 0).unwrap(), reg);
        assert_eq!(reg.time_translate(2, 4).unwrap().time_translate(2, -4).unwrap(), reg);
    }

    #[test]
    fn translate_unknown_location() {
        let reg = make_bell_pair(ClockCycle(0));
        assert_eq!(reg.time_translate(3, 1), Err(Error::UnknownLocation(3)));
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        let a = make_bell_pair(ClockCycle(0));
        assert!(a.tensor(&a).is_err());
        let dup = vec![TemporalLabel::at(1, 0), TemporalLabel::at(1, 0)];
        assert!(TemporalRegister::pure(dup, PureState::basis(2, 0).unwrap()).is_err());
    }

    #[test]
    fn bell_pair_amplitudes_and_marginals() {
        let reg = make_bell_pair(ClockCycle(7));
        let RegisterState::Pure(p) = reg.state() else { panic!("pure") };
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [s, 0.0, 0.0, s];
        for (a, e) in p.amplitudes().iter().zip(expected) {
            assert_eq!(*a, C64::new(e, 0.0));
        }
        for label in reg.labels() {
            let rho = reg.reduced(&[*label]).unwrap();
            assert!(rho.max_abs_diff(&DensityOperator::maximally_mixed(1)) < 1e-15);
        }
    }

    #[test]
    fn tde_labels() {
        let n = ClockCycle(10);
        assert_eq!(make_tde(n, 1).unwrap().labels(), &[TemporalLabel::at(1, 10), TemporalLabel::at(2, 9)]);
        assert_eq!(make_tde(n, 2).unwrap().labels(), &[TemporalLabel::at(1, 10), TemporalLabel::at(2, 8)]);
        assert!(make_tde(n, 0).is_err());
    }

    #[test]
    fn tde_is_locally_indistinguishable() {
        let bell = make_bell_pair(ClockCycle(4));
        let tde = make_tde(ClockCycle(4), 3).unwrap();
        for (b, t) in bell.labels().iter().zip(tde.labels()) {
            let d = trace_distance(&bell.reduced(&[*b]).unwrap(), &tde.reduced(&[*t]).unwrap()).unwrap();
            assert!(d < 1e-12);
        }
    }

    #[test]
    fn reorder_pure_matches_operator_permutation() {
        let zero = PureState::basis(1, 0).unwrap();
        let one = PureState::basis(1, 1).unwrap();
        let a = TemporalRegister::pure(vec![TemporalLabel::at(1, 0)], zero).unwrap();
        let b = TemporalRegister::pure(vec![TemporalLabel::at(2, 0)], one).unwrap();
        let ab = a.tensor(&b).unwrap();
        let ba = ab.reorder(&[TemporalLabel::at(2, 0), TemporalLabel::at(1, 0)]).unwrap();
        let RegisterState::Pure(p) = ba.state() else { panic!("pure") };
        assert_eq!(p.amplitudes()[2], C64::new(1.0, 0.0));
        assert_eq!(ba.operator(), ComplexMatrix::outer(p.amplitudes()));
    }

    #[test]
    fn invalid_location() {
        assert!(TemporalLabel::new(4, ClockCycle(0)).is_err());
        assert!(TemporalLabel::new(0, ClockCycle(0)).is_err());
    }
}
