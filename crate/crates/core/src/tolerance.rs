//! Numerical tolerances shared by every module and by the acceptance suite.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Entrywise `|M - M^dag|` bound for a stored density operator.
    pub hermiticity: f64,
    /// Bound used when accepting a Hermitian matrix as eigensolver input.
    pub hermitian_input: f64,
    /// `|tr(rho) - 1|` bound.
    pub trace: f64,
    /// `| ||psi|| - 1 |` bound.
    pub norm: f64,
    /// Smallest eigenvalue allowed for a stored density operator.
    pub psd_floor: f64,
    /// Smallest eigenvalue allowed for an admissible fixed point.
    pub admissible_psd_floor: f64,
    /// Per-pair eigen residual `|Mv - lambda v|`.
    pub eig_residual: f64,
    /// `U^dag U = I` bound.
    pub unitarity: f64,
    /// Singular values / eigenvalue gaps below this are degenerate.
    pub degeneracy: f64,
    /// Measurement outcomes below this probability carry no post-state.
    pub null_probability: f64,
    /// Smallest eigenvalue treated as a physical (positive) scale.
    pub min_eigenvalue: f64,
    /// Largest Hilbert-space dimension a tensor product may produce.
    pub max_dim: usize,
}

pub const TOL: Tolerances = Tolerances {
    hermiticity: 1e-12,
    hermitian_input: 1e-10,
    trace: 1e-12,
    norm: 1e-12,
    psd_floor: -1e-10,
    admissible_psd_floor: -1e-8,
    eig_residual: 1e-10,
    unitarity: 1e-12,
    degeneracy: 1e-9,
    null_probability: 1e-14,
    min_eigenvalue: 1e-12,
    max_dim: 1024,
};
