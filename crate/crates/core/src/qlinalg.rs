//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Slot convention: in a tensor product the leftmost factor is the most
//! significant digit of the basis index, so for qubits `|q0 q1 q2>` sits at
//! index `4*q0 + 2*q1 + q2`.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{Error, Result, C64, TOL};

/// Dense complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, &entries))
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let z = m[(r, c)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(Self(m))
    }

    /// Real-valued matrix from rows; handy for fixed gates and tests.
    pub fn from_real_rows<const N: usize>(rows: &[[f64; N]]) -> Self {
        let entries: Vec<C64> = rows.iter().flatten().map(|&x| C64::new(x, 0.0)).collect();
        Self(DMatrix::from_row_slice(rows.len(), N, &entries))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |r, c| if r == c { C64::new(values[r], 0.0) } else { C64::new(0.0, 0.0) })
    }

    /// `|v><v|`
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |r, c| v[r] * v[c].conj())
    }

    /// `|i><j|` in dimension `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.0[(i, j)] = C64::new(1.0, 0.0);
        m
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.0.shape() != other.0.shape() {
            return f64::INFINITY;
        }
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Entrywise deviation of `U^dag U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows()))
    }

    /// `(M + M^dag) / 2`
    pub fn hermitize(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    /// Row-major entries.
    pub fn to_row_major(&self) -> Vec<C64> {
        self.0.transpose().iter().copied().collect()
    }

    pub fn real_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows()).map(|r| (0..self.cols()).map(|c| self.get(r, c).re).collect()).collect()
    }

    pub fn imag_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows()).map(|r| (0..self.cols()).map(|c| self.get(r, c).im).collect()).collect()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (0..self.rows())
            .map(|r| (0..self.cols()).map(|c| self.get(r, c) * v[c]).sum())
            .collect()
    }

    /// `U M U^dag`
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Kronecker product, `a`'s slots leftmost.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    if rows.max(cols) > TOL.max_dim {
        return Err(Error::DimensionOverflow(rows.max(cols)));
    }
    Ok(ComplexMatrix(a.0.kronecker(&b.0)))
}

pub fn tensor_vec(a: &[C64], b: &[C64]) -> Result<Vec<C64>> {
    let dim = a.len() * b.len();
    if dim > TOL.max_dim {
        return Err(Error::DimensionOverflow(dim));
    }
    Ok(a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect())
}

fn total_dim(slot_dims: &[usize]) -> usize {
    slot_dims.iter().product()
}

/// Digits of `index` in the mixed radix given by `slot_dims` (most significant first).
fn digits(mut index: usize, slot_dims: &[usize], out: &mut [usize]) {
    for (k, &d) in slot_dims.iter().enumerate().rev() {
        out[k] = index % d;
        index /= d;
    }
}

fn compose(digits: &[usize], slot_dims: &[usize]) -> usize {
    digits.iter().zip(slot_dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

fn check_slots(m: &ComplexMatrix, slot_dims: &[usize]) -> Result<()> {
    if !m.is_square() || m.rows() != total_dim(slot_dims) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for slot dimensions {:?}",
            m.rows(),
            m.cols(),
            slot_dims
        )));
    }
    Ok(())
}

/// Reduced operator on the slots in `keep`, listed in ascending slot order.
pub fn partial_trace(m: &ComplexMatrix, slot_dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    check_slots(m, slot_dims)?;
    if keep.is_empty() {
        return Err(Error::InvalidArgument("partial trace must keep at least one slot".into()));
    }
    let n = slot_dims.len();
    let mut kept = vec![false; n];
    for &k in keep {
        if k >= n {
            return Err(Error::InvalidSlot { index: k, slots: n });
        }
        kept[k] = true;
    }
    let keep_order: Vec<usize> = (0..n).filter(|&k| kept[k]).collect();
    let keep_dims: Vec<usize> = keep_order.iter().map(|&k| slot_dims[k]).collect();
    let out_dim = total_dim(&keep_dims);
    let dim = m.rows();

    let mut out = DMatrix::<C64>::zeros(out_dim, out_dim);
    let mut di = vec![0; n];
    let mut dj = vec![0; n];
    let mut ki = vec![0; keep_order.len()];
    let mut kj = vec![0; keep_order.len()];
    for i in 0..dim {
        digits(i, slot_dims, &mut di);
        for j in 0..dim {
            digits(j, slot_dims, &mut dj);
            if (0..n).any(|s| !kept[s] && di[s] != dj[s]) {
                continue;
            }
            for (pos, &s) in keep_order.iter().enumerate() {
                ki[pos] = di[s];
                kj[pos] = dj[s];
            }
            out[(compose(&ki, &keep_dims), compose(&kj, &keep_dims))] += m.get(i, j);
        }
    }
    Ok(ComplexMatrix(out))
}

/// Lifts `op` (acting on `targets`, first target most significant) to the full space.
pub fn embed(op: &ComplexMatrix, slot_dims: &[usize], targets: &[usize]) -> Result<ComplexMatrix> {
    let n = slot_dims.len();
    for (pos, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(Error::InvalidSlot { index: t, slots: n });
        }
        if targets[..pos].contains(&t) {
            return Err(Error::InvalidArgument(format!("slot {t} targeted twice")));
        }
    }
    let target_dims: Vec<usize> = targets.iter().map(|&t| slot_dims[t]).collect();
    let op_dim = total_dim(&target_dims);
    if !op.is_square() || op.rows() != op_dim {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator on slots of dimensions {:?}",
            op.rows(),
            op.cols(),
            target_dims
        )));
    }
    let dim = total_dim(slot_dims);
    if dim > TOL.max_dim {
        return Err(Error::DimensionOverflow(dim));
    }
    let mut di = vec![0; n];
    let mut dj = vec![0; n];
    let mut ti = vec![0; targets.len()];
    let mut tj = vec![0; targets.len()];
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..dim {
        digits(i, slot_dims, &mut di);
        for j in 0..dim {
            digits(j, slot_dims, &mut dj);
            if (0..n).any(|s| !targets.contains(&s) && di[s] != dj[s]) {
                continue;
            }
            for (pos, &t) in targets.iter().enumerate() {
                ti[pos] = di[t];
                tj[pos] = dj[t];
            }
            out[(i, j)] = op.get(compose(&ti, &target_dims), compose(&tj, &target_dims));
        }
    }
    Ok(ComplexMatrix(out))
}

/// Reorders slots so that new slot `k` is old slot `order[k]`.
pub fn permute_slots(m: &ComplexMatrix, slot_dims: &[usize], order: &[usize]) -> Result<ComplexMatrix> {
    check_slots(m, slot_dims)?;
    let n = slot_dims.len();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(Error::InvalidArgument(format!("{order:?} is not a permutation of {n} slots")));
    }
    let new_dims: Vec<usize> = order.iter().map(|&k| slot_dims[k]).collect();
    let dim = m.rows();
    let mut old = vec![0; n];
    let mut new = vec![0; n];
    let map: Vec<usize> = (0..dim)
        .map(|i| {
            digits(i, slot_dims, &mut old);
            for (k, &src) in order.iter().enumerate() {
                new[k] = old[src];
            }
            compose(&new, &new_dims)
        })
        .collect();
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            out[(map[i], map[j])] = m.get(i, j);
        }
    }
    Ok(ComplexMatrix(out))
}

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// the matching unit eigenvectors as columns.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let dev = m.hermitian_deviation();
    if dev > TOL.hermitian_input {
        return Err(Error::NotHermitian(dev));
    }
    let eig = SymmetricEigen::new(m.hermitize().0);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let n = m.rows();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// `tr|M|` for Hermitian `M`.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    let (values, _) = hermitian_eig(m)?;
    Ok(values.iter().map(|x| x.abs()).sum())
}

/// `tr|a - b|`, without the customary factor 1/2: orthogonal pure states are at distance 2.
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    if a.slot_dims != b.slot_dims {
        return Err(Error::DimensionMismatch(format!(
            "trace distance between slots {:?} and {:?}",
            a.slot_dims, b.slot_dims
        )));
    }
    trace_norm(&(&a.matrix - &b.matrix))
}

/// Hermitian, positive semidefinite, unit-trace operator over labelled slots.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    slot_dims: Vec<usize>,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix, slot_dims: Vec<usize>) -> Result<Self> {
        check_slots(&matrix, &slot_dims)?;
        let dev = matrix.hermitian_deviation();
        if dev > TOL.hermiticity {
            return Err(Error::InvalidDensity(format!("Hermiticity deviation {dev:.3e}")));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TOL.trace {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let (values, _) = hermitian_eig(&matrix)?;
        if values[0] < TOL.psd_floor {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {:.3e}", values[0])));
        }
        Ok(Self { matrix, slot_dims })
    }

    /// Hermitizes and trace-normalizes `m` before validating it.
    pub fn from_unnormalized(m: &ComplexMatrix, slot_dims: Vec<usize>) -> Result<Self> {
        let h = m.hermitize();
        let tr = h.trace().re;
        if tr.abs() < TOL.null_probability {
            return Err(Error::InvalidDensity(format!("trace {tr:e} cannot be normalized")));
        }
        Self::new(h.scale_real(1.0 / tr), slot_dims)
    }

    pub fn qubits(n: usize) -> Vec<usize> {
        vec![2; n]
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
            slot_dims: Self::qubits(n_qubits),
        }
    }

    /// Single-qubit density operator from a real diagonal.
    pub fn qubit_diag(p0: f64, p1: f64) -> Result<Self> {
        Self::new(ComplexMatrix::diag(&[p0, p1]), vec![2])
    }

    pub fn from_pure(state: &PureState) -> Self {
        Self { matrix: ComplexMatrix::outer(&state.amplitudes), slot_dims: state.slot_dims.clone() }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn slot_dims(&self) -> &[usize] {
        &self.slot_dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let reduced = partial_trace(&self.matrix, &self.slot_dims, keep)?;
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        keep_sorted.dedup();
        let dims = keep_sorted.iter().map(|&k| self.slot_dims[k]).collect();
        Self::from_unnormalized(&reduced, dims)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut dims = self.slot_dims.clone();
        dims.extend_from_slice(&other.slot_dims);
        Ok(Self { matrix: tensor(&self.matrix, &other.matrix)?, slot_dims: dims })
    }

    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::from_unnormalized(&self.matrix.conjugate_by(u), self.slot_dims.clone())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eig(&self.matrix).map(|(v, _)| v[0]).unwrap_or(f64::NAN)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }
}

/// Unit-norm state vector over labelled slots.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
    slot_dims: Vec<usize>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>, slot_dims: Vec<usize>) -> Result<Self> {
        if amplitudes.len() != total_dim(&slot_dims) {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for slot dimensions {:?}",
                amplitudes.len(),
                slot_dims
            )));
        }
        if let Some(k) = amplitudes.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { row: k, col: 0 });
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > TOL.norm {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes, slot_dims })
    }

    /// `alpha|0> + beta|1>`
    pub fn qubit(alpha: C64, beta: C64) -> Result<Self> {
        Self::new(vec![alpha, beta], vec![2])
    }

    /// Real qubit `sqrt(1 - beta2)|0> + sqrt(beta2)|1>`.
    pub fn real_qubit(beta2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta2) {
            return Err(Error::InvalidArgument(format!("beta^2 = {beta2} outside [0, 1]")));
        }
        Self::qubit(C64::new((1.0 - beta2).sqrt(), 0.0), C64::new(beta2.sqrt(), 0.0))
    }

    /// Computational basis state of `n` qubits.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Self::new(amps, vec![2; n_qubits])
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn slot_dims(&self) -> &[usize] {
        &self.slot_dims
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_pure(self)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut dims = self.slot_dims.clone();
        dims.extend_from_slice(&other.slot_dims);
        Ok(Self { amplitudes: tensor_vec(&self.amplitudes, &other.amplitudes)?, slot_dims: dims })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])
    }

    #[test]
    fn identity_tensor_identity() {
        let i4 = tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn tensor_slot_order_is_msb_first() {
        let p0 = ComplexMatrix::diag(&[1.0, 0.0]);
        let p1 = ComplexMatrix::diag(&[0.0, 1.0]);
        assert_eq!(tensor(&p0, &p1).unwrap(), ComplexMatrix::diag(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn x_on_first_slot_flips_msb() {
        let xi = tensor(&pauli_x(), &ComplexMatrix::identity(2)).unwrap();
        let out = xi.apply(&[c(1.0), c(0.0), c(0.0), c(0.0)]);
        assert_eq!(out, vec![c(0.0), c(0.0), c(1.0), c(0.0)]);
    }

    #[test]
    fn tensor_rejects_oversized_products() {
        let big = ComplexMatrix::identity(64);
        assert_eq!(tensor(&big, &big), Err(Error::DimensionOverflow(4096)));
    }

    #[test]
    fn trace_out_second_of_product_basis_state() {
        let rho = ComplexMatrix::diag(&[1.0, 0.0, 0.0, 0.0]);
        let reduced = partial_trace(&rho, &[2, 2], &[0]).unwrap();
        assert_eq!(reduced, ComplexMatrix::diag(&[1.0, 0.0]));
    }

    #[test]
    fn bell_pair_reduces_to_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = ComplexMatrix::outer(&[c(s), c(0.0), c(0.0), c(s)]);
        for keep in [0, 1] {
            let reduced = partial_trace(&phi, &[2, 2], &[keep]).unwrap();
            assert!(reduced.max_abs_diff(&ComplexMatrix::diag(&[0.5, 0.5])) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_slots() {
        let rho = ComplexMatrix::identity(4).scale_real(0.25);
        assert_eq!(partial_trace(&rho, &[2, 2], &[2]), Err(Error::InvalidSlot { index: 2, slots: 2 }));
        assert!(partial_trace(&rho, &[2, 2], &[]).is_err());
    }

    #[test]
    fn embed_matches_kronecker() {
        let x = pauli_x();
        let via_embed = embed(&x, &[2, 2, 2], &[1]).unwrap();
        let via_kron =
            tensor(&tensor(&ComplexMatrix::identity(2), &x).unwrap(), &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(via_embed, via_kron);
    }

    #[test]
    fn permute_swaps_two_slots() {
        let p0 = ComplexMatrix::diag(&[1.0, 0.0]);
        let p1 = ComplexMatrix::diag(&[0.0, 1.0]);
        let ab = tensor(&p0, &p1).unwrap();
        let ba = permute_slots(&ab, &[2, 2], &[1, 0]).unwrap();
        assert_eq!(ba, tensor(&p1, &p0).unwrap());
    }

    #[test]
    fn eig_of_pauli_z_and_mixed() {
        let (vals, _) = hermitian_eig(&ComplexMatrix::diag(&[1.0, -1.0])).unwrap();
        assert_eq!(vals, vec![-1.0, 1.0]);
        let (vals, _) = hermitian_eig(&ComplexMatrix::diag(&[0.5, 0.5])).unwrap();
        assert_eq!(vals, vec![0.5, 0.5]);
    }

    #[test]
    fn eig_of_plus_projector() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = ComplexMatrix::outer(&[c(s), c(s)]);
        let (vals, vecs) = hermitian_eig(&plus).unwrap();
        assert!(vals[0].abs() < 1e-15 && (vals[1] - 1.0).abs() < 1e-15);
        // Eigenvector for 1 is (1,1)/sqrt2 up to a global phase.
        let overlap = (vecs.get(0, 1).conj() * c(s) + vecs.get(1, 1).conj() * c(s)).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn trace_distance_has_no_half() {
        let zero = DensityOperator::qubit_diag(1.0, 0.0).unwrap();
        let one = DensityOperator::qubit_diag(0.0, 1.0).unwrap();
        let mixed = DensityOperator::qubit_diag(0.68, 0.32).unwrap();
        assert_eq!(trace_distance(&zero, &zero).unwrap(), 0.0);
        assert!((trace_distance(&zero, &one).unwrap() - 2.0).abs() < 1e-15);
        assert!((trace_distance(&zero, &mixed).unwrap() - 0.64).abs() < 1e-14);
    }

    #[test]
    fn trace_distance_dimension_mismatch() {
        let a = DensityOperator::maximally_mixed(1);
        let b = DensityOperator::maximally_mixed(2);
        assert!(matches!(trace_distance(&a, &b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn density_validation() {
        assert!(DensityOperator::new(ComplexMatrix::diag(&[0.6, 0.6]), vec![2]).is_err());
        assert!(DensityOperator::new(ComplexMatrix::diag(&[1.5, -0.5]), vec![2]).is_err());
        let skew = ComplexMatrix::new(2, 2, vec![c(0.5), c(0.1), c(0.0), c(0.5)]).unwrap();
        assert!(DensityOperator::new(skew, vec![2]).is_err());
        assert!(ComplexMatrix::new(1, 1, vec![C64::new(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn pure_state_requires_unit_norm() {
        assert!(PureState::qubit(c(1.0), c(1.0)).is_err());
        assert!(PureState::real_qubit(0.2).is_ok());
    }
}
