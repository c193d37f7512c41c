use nalgebra::DMatrix;
use serde_json::{json, Value};

use super::ConsistencyProblem;
use crate::gates::BellTag;
use crate::qlinalg::{hermitian_eig, ComplexMatrix, DensityOperator};
use crate::temporal::TemporalLabel;
use crate::{Error, Result, C64, TOL};

/// Hilbert-Schmidt orthonormal basis of the `n x n` Hermitian matrices:
/// diagonal units first, then `(E_jk + E_kj)/sqrt2` and `i(E_jk - E_kj)/sqrt2` for `j < k`.
pub fn hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis: Vec<ComplexMatrix> = (0..n).map(|k| ComplexMatrix::unit(n, k, k)).collect();
    for j in 0..n {
        for k in j + 1..n {
            let (ejk, ekj) = (ComplexMatrix::unit(n, j, k), ComplexMatrix::unit(n, k, j));
            basis.push((&ejk + &ekj).scale_real(s));
            basis.push((&ejk - &ekj).scale(C64::new(0.0, s)));
        }
    }
    basis
}

fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    (&a.adjoint() * b).trace()
}

/// Self-consistent state of a [`ConsistencyProblem`].
#[derive(Debug, Clone)]
pub struct SolutionReport {
    pub scenario: String,
    pub outcome: BellTag,
    pub alpha2: Option<f64>,
    /// Scale absorbed by the map, `L(gamma) = eigenvalue * gamma`; the outcome probability.
    pub eigenvalue: f64,
    /// Dimension of the fixed-point family at `eigenvalue`.
    pub nullspace_dim: usize,
    /// Frobenius norm of `L(gamma) - eigenvalue * gamma`.
    pub residual: f64,
    pub unique: bool,
    /// The fixed point when unique. For a degenerate family this is the
    /// member of least Hilbert-Schmidt norm, a representative only.
    pub gamma: DensityOperator,
    pub gamma_labels: Vec<TemporalLabel>,
    pub output_labels: Vec<TemporalLabel>,
}

impl SolutionReport {
    pub fn output(&self) -> Result<DensityOperator> {
        crate::temporal::TemporalRegister::mixed(self.gamma_labels.clone(), self.gamma.clone())?
            .reduced(&self.output_labels)
    }

    pub fn to_json(&self) -> Value {
        let g = self.gamma.matrix();
        json!({
            "scenario": self.scenario,
            "outcome": self.outcome,
            "alpha2": self.alpha2,
            "eigenvalue": self.eigenvalue,
            "nullspace_dim": self.nullspace_dim,
            "residual": self.residual,
            "gamma_real": g.real_rows(),
            "gamma_imag": g.imag_rows(),
        })
    }
}

/// Real matrix of the map restricted to Hermitian matrices, in [`hermitian_basis`] coordinates.
fn hermitian_restriction(problem: &ConsistencyProblem, basis: &[ComplexMatrix]) -> DMatrix<f64> {
    let images: Vec<ComplexMatrix> = basis.iter().map(|b| problem.apply(b)).collect();
    DMatrix::from_fn(basis.len(), basis.len(), |a, b| hs_inner(&basis[a], &images[b]).re)
}

/// Real positive eigenvalues, largest first, merged within the degeneracy tolerance.
fn positive_real_eigenvalues(real_map: &DMatrix<f64>) -> Vec<f64> {
    let mut values: Vec<f64> = real_map
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= TOL.degeneracy * z.re.abs().max(1.0) && z.re > TOL.min_eigenvalue)
        .map(|z| z.re)
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values.dedup_by(|a, b| (*a - *b).abs() <= TOL.degeneracy);
    values
}

/// Orthonormal basis (as coefficient vectors) of the null space of `m`.
fn null_space(m: DMatrix<f64>) -> Vec<Vec<f64>> {
    let dim = m.ncols();
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let mut null: Vec<Vec<f64>> = order
        .iter()
        .take_while(|&&k| svd.singular_values[k] <= TOL.degeneracy)
        .map(|&k| (0..dim).map(|c| v_t[(k, c)]).collect())
        .collect();
    if null.is_empty() {
        // `lambda` came from the spectrum, so the smallest singular direction is its eigenvector.
        null.push((0..dim).map(|c| v_t[(order[0], c)]).collect());
    }
    null
}

/// Clamps round-off negativity and renormalizes; `None` if `h` is genuinely indefinite.
fn admissible_density(h: &ComplexMatrix, slots: usize) -> Option<DensityOperator> {
    let h = h.hermitize();
    let tr = h.trace().re;
    if tr.abs() < TOL.degeneracy {
        return None;
    }
    let h = h.scale_real(1.0 / tr);
    let (values, vectors) = hermitian_eig(&h).ok()?;
    if values[0] < TOL.admissible_psd_floor {
        return None;
    }
    let rho = if values[0] < 0.0 {
        let clamped: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        let d = ComplexMatrix::diag(&clamped.iter().map(|v| v / total).collect::<Vec<_>>());
        (&(&vectors * &d) * &vectors.adjoint()).hermitize()
    } else {
        h
    };
    DensityOperator::new(rho, vec![2; slots]).ok()
}

/// Finds the admissible fixed point of the largest real positive scale.
///
/// Candidates are eigenvalues of the map restricted to Hermitian matrices.
/// For each, the null space of `L - lambda` is computed by SVD; its dimension
/// is the size of the fixed-point family. The family must contain a
/// trace-normalizable positive semidefinite member to be admissible.
pub fn solve_fixed_point(problem: &ConsistencyProblem) -> Result<SolutionReport> {
    let n = problem.gamma_side();
    let basis = hermitian_basis(n);
    let real_map = hermitian_restriction(problem, &basis);
    let candidates = positive_real_eigenvalues(&real_map);
    if candidates.is_empty() {
        return Err(Error::NoAdmissibleFixedPoint(format!(
            "{} / {}: no real positive eigenvalue",
            problem.description, problem.outcome
        )));
    }

    for &lambda in &candidates {
        let shifted = &real_map - DMatrix::identity(basis.len(), basis.len()) * lambda;
        let null = null_space(shifted);
        // Traces of the family's basis members; only diagonal units carry trace.
        let traces: Vec<f64> = null.iter().map(|v| v[..n].iter().sum()).collect();
        let norm2: f64 = traces.iter().map(|t| t * t).sum();
        if norm2.sqrt() < TOL.degeneracy {
            continue;
        }
        // Least-norm trace-one member: coefficients proportional to the traces.
        let mut gamma = ComplexMatrix::zeros(n, n);
        for (v, t) in null.iter().zip(&traces) {
            for (coef, b) in v.iter().zip(&basis) {
                gamma = &gamma + &b.scale_real(coef * t / norm2);
            }
        }
        let Some(rho) = admissible_density(&gamma, problem.gamma_labels.len()) else {
            continue;
        };
        let residual = (&problem.apply(rho.matrix()) - &rho.matrix().scale_real(lambda)).frobenius_norm();
        return Ok(SolutionReport {
            scenario: problem.description.clone(),
            outcome: problem.outcome,
            alpha2: problem.alpha2,
            eigenvalue: lambda,
            nullspace_dim: null.len(),
            residual,
            unique: null.len() == 1,
            gamma: rho,
            gamma_labels: problem.gamma_labels.clone(),
            output_labels: problem.output_labels.clone(),
        });
    }
    Err(Error::NoAdmissibleFixedPoint(format!(
        "{} / {}: no eigenvalue in {:?} has a positive semidefinite, trace-normalizable fixed point",
        problem.description, problem.outcome, candidates
    )))
}
