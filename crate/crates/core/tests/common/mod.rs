//! Independent reference values and randomized checks shared by the
//! integration suites.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use tdesim::consistency::{BellOnTde, ConsistencyScenario, TimeLoopTeleport};
use tdesim::gates::{
    bell_basis, cnot_matrix, projective_measure, rotation, swap_matrix, Axis, BellTag, PerturbationRegistry,
};
use tdesim::protocols::time_loop_output;
use tdesim::qlinalg::{embed, partial_trace, tensor, trace_distance, ComplexMatrix, DensityOperator, PureState};
use tdesim::temporal::{ClockCycle, TemporalLabel, TemporalRegister};
use tdesim::C64;

pub const TRIALS: u32 = 128;

pub const ALPHA2_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Self-consistent two-time state of the loop on slots `(3, n), (2, n)`,
/// written out entry by entry for real amplitudes.
pub fn closed_form_gamma(alpha2: f64) -> ComplexMatrix {
    let a = alpha2.sqrt();
    let b = (1.0 - alpha2).sqrt();
    let mut m = [[0.0; 4]; 4];
    m[0][0] = a.powi(4);
    m[0][3] = a.powi(3) * b;
    m[3][0] = a.powi(3) * b;
    m[3][3] = a * a * b * b;
    m[1][1] = a * a * b * b;
    m[1][2] = a * b.powi(3);
    m[2][1] = a * b.powi(3);
    m[2][2] = b.powi(4);
    ComplexMatrix::from_real_rows(&m)
}

/// Loop output on the `phi+` branch: `diag(a^4 + b^4, 2 a^2 b^2)`.
pub fn closed_form_output(alpha2: f64) -> DensityOperator {
    let b2 = 1.0 - alpha2;
    DensityOperator::qubit_diag(alpha2 * alpha2 + b2 * b2, 2.0 * alpha2 * b2).unwrap()
}

pub fn bit_flip(rho: &DensityOperator) -> DensityOperator {
    let x = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
    rho.conjugate_by(&x).unwrap()
}

pub fn real_input(alpha2: f64) -> (C64, C64) {
    (C64::new(alpha2.sqrt(), 0.0), C64::new((1.0 - alpha2).sqrt(), 0.0))
}

pub fn runner() -> TestRunner {
    TestRunner::new(Config { cases: TRIALS, failure_persistence: None, ..Config::default() })
}

fn c64() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

pub fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(c64(), n * n).prop_map(move |v| ComplexMatrix::new(n, n, v).unwrap().hermitize())
}

/// Random density operator on `qubits` qubits: `G G^dag / tr`.
pub fn density(qubits: usize) -> impl Strategy<Value = DensityOperator> {
    let n = 1 << qubits;
    prop::collection::vec(c64(), n * n).prop_map(move |v| {
        let g = ComplexMatrix::new(n, n, v).unwrap();
        DensityOperator::from_unnormalized(&(&g * &g.adjoint()), vec![2; qubits]).unwrap()
    })
}

pub fn pure_state(qubits: usize) -> impl Strategy<Value = PureState> {
    let n = 1 << qubits;
    prop::collection::vec(c64(), n)
        .prop_filter("nonzero", |v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(move |v| {
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            PureState::new(v.into_iter().map(|z| z / norm).collect(), vec![2; qubits]).unwrap()
        })
}

pub fn bell_tag() -> impl Strategy<Value = BellTag> {
    prop::sample::select(BellTag::ALL.to_vec())
}

pub fn axis() -> impl Strategy<Value = Axis> {
    prop::sample::select(vec![Axis::X, Axis::Y, Axis::Z])
}

fn ensure(cond: bool, msg: String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg))
    }
}

/// A loop scenario with random real-or-complex input, or the pair scenario.
fn scenario(pick: bool, input: &PureState) -> Box<dyn ConsistencyScenario> {
    if pick {
        let a = input.amplitudes();
        Box::new(TimeLoopTeleport::new(ClockCycle(0), a[0], a[1]).unwrap())
    } else {
        Box::new(BellOnTde::new(ClockCycle(0), 1).unwrap())
    }
}

fn pass(
    s: &dyn ConsistencyScenario,
    gamma: &ComplexMatrix,
    effect: &ComplexMatrix,
) -> Result<ComplexMatrix, TestCaseError> {
    let reg = TemporalRegister::unnormalized(s.gamma_labels(), gamma.clone()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    Ok(s.propagate(&reg, effect).map_err(|e| TestCaseError::fail(e.to_string()))?.operator())
}

/// One pass around either loop is linear in the guess.
pub fn check_linearity(
    pick: bool,
    input: &PureState,
    tag: BellTag,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    x: f64,
    y: f64,
) -> Result<(), TestCaseError> {
    let s = scenario(pick, input);
    let n = 1 << s.gamma_labels().len();
    let (a, b) = (sub(a, n), sub(b, n));
    let effect = bell_basis()[tag.index()].projector.clone();
    let combo = &a.scale_real(x) + &b.scale_real(y);
    let lhs = pass(s.as_ref(), &combo, &effect)?;
    let rhs = &pass(s.as_ref(), &a, &effect)?.scale_real(x) + &pass(s.as_ref(), &b, &effect)?.scale_real(y);
    let dev = lhs.max_abs_diff(&rhs);
    ensure(dev < 1e-10, format!("linearity deviation {dev:e}"))
}

/// Hermitian guesses stay Hermitian, for ideal and perturbed effects.
pub fn check_hermiticity(
    pick: bool,
    input: &PureState,
    tag: BellTag,
    h: &ComplexMatrix,
    epsilon: f64,
) -> Result<(), TestCaseError> {
    let s = scenario(pick, input);
    let h = sub(h, 1 << s.gamma_labels().len());
    let model = PerturbationRegistry::builtin().default_model().unwrap();
    for effect in [bell_basis()[tag.index()].projector.clone(), model.effect(tag, epsilon).unwrap()] {
        let dev = pass(s.as_ref(), &h, &effect)?.hermitian_deviation();
        ensure(dev < 1e-12, format!("hermiticity deviation {dev:e}"))?;
    }
    Ok(())
}

fn sub(m: &ComplexMatrix, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| m.get(i, j))
}

/// Bell probabilities on any pair of a random three-qubit state sum to one,
/// and every perturbation model's effects resolve the identity.
pub fn check_completeness(state: &PureState, pair: (usize, usize), epsilon: f64) -> Result<(), TestCaseError> {
    let labels = vec![TemporalLabel::at(1, 0), TemporalLabel::at(2, 0), TemporalLabel::at(3, 0)];
    let reg = TemporalRegister::pure(labels.clone(), state.clone()).unwrap();
    let projectors: Vec<ComplexMatrix> = bell_basis().iter().map(|b| b.projector.clone()).collect();
    let results = projective_measure(&reg, &projectors, &[labels[pair.0], labels[pair.1]]).unwrap();
    let total: f64 = results.iter().map(|r| r.probability).sum();
    ensure((total - 1.0).abs() < 1e-12, format!("probabilities sum to {total}"))?;
    ensure(results.iter().all(|r| r.probability >= -1e-14), "negative probability".into())?;
    let registry = PerturbationRegistry::builtin();
    for name in registry.names() {
        let model = registry.get(name).unwrap();
        let mut sum = ComplexMatrix::zeros(4, 4);
        for tag in BellTag::ALL {
            let e = model.effect(tag, epsilon).unwrap();
            ensure(e.is_hermitian(1e-12), format!("{name} effect not Hermitian"))?;
            sum = &sum + &e;
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(4));
        ensure(dev < 1e-12, format!("{name} effects sum to identity within {dev:e}"))?;
    }
    Ok(())
}

/// Rotations, CNOT, SWAP and their products are unitary; embedded gates too.
pub fn check_unitarity(axes: (Axis, Axis), angles: (f64, f64), targets: (usize, usize)) -> Result<(), TestCaseError> {
    let r = tensor(&rotation(axes.0, angles.0), &rotation(axes.1, angles.1)).unwrap();
    let product = &(&r * &cnot_matrix()) * &swap_matrix();
    for (name, u) in [("rotations", &r), ("product", &product)] {
        let dev = u.unitarity_deviation();
        ensure(dev < 1e-12, format!("{name} unitarity deviation {dev:e}"))?;
    }
    if targets.0 != targets.1 {
        let big = embed(&product, &[2, 2, 2], &[targets.0, targets.1]).unwrap();
        let dev = big.unitarity_deviation();
        ensure(dev < 1e-12, format!("embedded unitarity deviation {dev:e}"))?;
    }
    Ok(())
}

/// `tr_B(A (x) B) = A tr B`, traces are preserved, reductions stay positive.
pub fn check_partial_trace(a: &DensityOperator, b: &DensityOperator, joint: &DensityOperator) -> Result<(), TestCaseError> {
    let ab = tensor(a.matrix(), b.matrix()).unwrap();
    let dims = [2, 2, 2];
    let left = partial_trace(&ab, &dims, &[0]).unwrap();
    ensure(left.max_abs_diff(a.matrix()) < 1e-12, "tr_B(A x B) != A".into())?;
    let right = partial_trace(&ab, &dims, &[1, 2]).unwrap();
    ensure(right.max_abs_diff(b.matrix()) < 1e-12, "tr_A(A x B) != B".into())?;
    for keep in [&[0][..], &[1], &[2], &[0, 2], &[1, 2]] {
        let r = joint.partial_trace(keep).map_err(|e| TestCaseError::fail(e.to_string()))?;
        ensure((r.matrix().trace().re - 1.0).abs() < 1e-12, format!("trace lost keeping {keep:?}"))?;
        ensure(r.min_eigenvalue() > -1e-10, format!("negative reduction keeping {keep:?}"))?;
    }
    // Tracing in two steps equals tracing at once.
    let step = partial_trace(&partial_trace(joint.matrix(), &dims, &[0, 1]).unwrap(), &[2, 2], &[0]).unwrap();
    let once = partial_trace(joint.matrix(), &dims, &[0]).unwrap();
    ensure(step.max_abs_diff(&once) < 1e-12, "nested partial trace mismatch".into())
}

/// Mixing inputs before the loop differs from mixing the loop's outputs.
pub fn nonlinearity_gap(theta: f64, weight: f64) -> f64 {
    let zero = PureState::basis(1, 0).unwrap().density();
    let other = PureState::qubit(C64::new(theta.cos(), 0.0), C64::new(theta.sin(), 0.0)).unwrap().density();
    let out_zero = time_loop_output(&zero, BellTag::PhiPlus).unwrap();
    let out_other = time_loop_output(&other, BellTag::PhiPlus).unwrap();
    let mix = |x: &DensityOperator, y: &DensityOperator| {
        let m = &x.matrix().scale_real(weight) + &y.matrix().scale_real(1.0 - weight);
        DensityOperator::new(m.hermitize(), vec![2]).unwrap()
    };
    let ensemble = mix(&out_zero, &out_other);
    let mixed_in = time_loop_output(&mix(&zero, &other), BellTag::PhiPlus).unwrap();
    trace_distance(&ensemble, &mixed_in).unwrap()
}

pub fn check_nonlinearity(theta: f64, weight: f64) -> Result<(), TestCaseError> {
    let gap = nonlinearity_gap(theta, weight);
    ensure(gap > 0.1, format!("gap {gap} at theta {theta}, weight {weight}"))
}

/// Strategy domains for the randomized witness: the second input at least a
/// quarter turn of the Bloch circle away from `|0>`, comparable weights.
pub fn witness_domain() -> (std::ops::Range<f64>, std::ops::Range<f64>) {
    (std::f64::consts::FRAC_PI_4..std::f64::consts::FRAC_PI_2, 0.25..0.75)
}
