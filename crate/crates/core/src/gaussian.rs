//! N-mode Gaussian states as covariance matrices, and the beam-splitter
//! network that turns squeezed vacua into the CV GHZ state.
//!
//! Quadrature convention: x and p are the real and imaginary parts of the
//! mode's annihilation operator, vacuum variance 1/4, so the single-mode
//! vacuum Wigner density is (2/pi) exp(-2x^2 - 2p^2). Quadratures are stored
//! interleaved: (x1, p1, ..., xN, pN).

use crate::error::{invalid, numeric, Result};
use crate::linalg::{self, Matrix};
use crate::math;
use crate::point::PhasePoint;
use alloc::format;
use alloc::vec::Vec;

/// Marker for the phase-space scaling used throughout the crate.
/// The numerical value of the vacuum quadrature variance lives here and
/// nowhere else.
pub struct QuadratureConvention;

impl QuadratureConvention {
    pub const VACUUM_VARIANCE: f64 = 0.25;
}

/// Dimensionless squeezing parameter, equal in all initial modes. r = 0 is
/// the vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingParameter(f64);

impl SqueezingParameter {
    pub fn new(r: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(invalid(format!("squeezing parameter must be >= 0, got {r}")));
        }
        Ok(SqueezingParameter(r))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which quadrature an initial squeezer narrows below the vacuum level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqueezeAxis {
    /// x-variance becomes e^{-2r}/4.
    Position,
    /// p-variance becomes e^{-2r}/4.
    Momentum,
}

/// Linear map on quadratures preserving the symplectic form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOp {
    matrix: Matrix,
}

impl SymplecticOp {
    /// Validates S Omega S^T = Omega to 1e-12 before accepting the map.
    pub fn new(matrix: Matrix) -> Result<Self> {
        if matrix.rows != matrix.cols || matrix.rows % 2 != 0 {
            return Err(invalid("symplectic map must be square of even order"));
        }
        let op = SymplecticOp { matrix };
        let defect = op.symplectic_defect();
        if defect > 1e-12 {
            return Err(invalid(format!(
                "map is not symplectic (defect {defect:e})"
            )));
        }
        Ok(op)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Max-norm of S Omega S^T - Omega.
    pub fn symplectic_defect(&self) -> f64 {
        let omega = linalg::symplectic_form(self.matrix.rows / 2);
        let lhs = self.matrix.matmul(&omega).matmul(&self.matrix.transpose());
        lhs.max_abs_diff(&omega)
    }
}

/// Zero-mean N-mode Gaussian state stored as a 2N x 2N covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    n_modes: usize,
    covariance: Matrix,
}

impl GaussianState {
    pub fn new(n_modes: usize, covariance: Matrix) -> Result<Self> {
        if n_modes == 0 {
            return Err(invalid("state needs at least one mode"));
        }
        if covariance.rows != 2 * n_modes || covariance.cols != 2 * n_modes {
            return Err(invalid(format!(
                "covariance must be {0}x{0} for {1} modes",
                2 * n_modes,
                n_modes
            )));
        }
        let asym = covariance.max_asymmetry();
        if asym > 1e-12 {
            return Err(invalid(format!("covariance asymmetric by {asym:e}")));
        }
        // positive definiteness
        linalg::cholesky(&covariance)
            .map_err(|_| numeric("covariance is not positive definite"))?;
        Ok(GaussianState { n_modes, covariance })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn covariance(&self) -> &Matrix {
        &self.covariance
    }

    /// sigma -> S sigma S^T.
    pub fn transformed(&self, op: &SymplecticOp) -> Result<Self> {
        if op.matrix().rows != 2 * self.n_modes {
            return Err(invalid("symplectic map dimension does not match state"));
        }
        let s = op.matrix();
        let cov = s.matmul(&self.covariance).matmul(&s.transpose());
        GaussianState::new(self.n_modes, cov)
    }

    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::symplectic_eigenvalues(&self.covariance)
    }
}

/// N-mode vacuum: covariance (1/4) I.
pub fn vacuum_state(n: usize) -> Result<GaussianState> {
    if n == 0 {
        return Err(invalid("mode count must be >= 1"));
    }
    let cov = Matrix::identity(2 * n).scale(QuadratureConvention::VACUUM_VARIANCE);
    GaussianState::new(n, cov)
}

/// Single-mode squeezer on `mode`: scales that mode's squeezed quadrature
/// variance by e^{-2r} and the conjugate by e^{+2r}; cross-covariances
/// transform symplectically.
pub fn squeeze_mode(
    state: &GaussianState,
    mode: usize,
    r: SqueezingParameter,
    axis: SqueezeAxis,
) -> Result<GaussianState> {
    let n = state.n_modes();
    if mode >= n {
        return Err(invalid(format!("mode {mode} out of range for {n} modes")));
    }
    let (fx, fp) = match axis {
        SqueezeAxis::Position => (math::exp(-r.value()), math::exp(r.value())),
        SqueezeAxis::Momentum => (math::exp(r.value()), math::exp(-r.value())),
    };
    let mut s = Matrix::identity(2 * n);
    s[(2 * mode, 2 * mode)] = fx;
    s[(2 * mode + 1, 2 * mode + 1)] = fp;
    state.transformed(&SymplecticOp::new(s)?)
}

/// Two-mode beam splitter acting as
///   (x_i, p_i) -> cos(theta) (x_i, p_i) + sin(theta) (x_j, p_j)
///   (x_j, p_j) -> sin(theta) (x_i, p_i) - cos(theta) (x_j, p_j)
/// and as the identity elsewhere.
pub fn beamsplitter(i: usize, j: usize, theta: f64, n: usize) -> Result<SymplecticOp> {
    if i == j {
        return Err(invalid("beam splitter needs two distinct modes"));
    }
    if i >= n || j >= n {
        return Err(invalid(format!(
            "beam splitter modes ({i}, {j}) out of range for {n} modes"
        )));
    }
    let (c, s) = (math::cos(theta), math::sin(theta));
    let mut m = Matrix::identity(2 * n);
    for q in 0..2 {
        m[(2 * i + q, 2 * i + q)] = c;
        m[(2 * i + q, 2 * j + q)] = s;
        m[(2 * j + q, 2 * i + q)] = s;
        m[(2 * j + q, 2 * j + q)] = -c;
    }
    SymplecticOp::new(m)
}

/// Builds the N-mode GHZ state: mode 1 momentum-squeezed, modes 2..N
/// position-squeezed, then the splitter chain
/// B_{1,2}(acos 1/sqrt(N)), B_{2,3}(acos 1/sqrt(N-1)), ..., B_{N-1,N}(pi/4).
pub fn build_ghz_state(n: usize, r: SqueezingParameter) -> Result<GaussianState> {
    if n < 2 {
        return Err(invalid(format!("GHZ construction needs n >= 2, got {n}")));
    }
    let mut state = vacuum_state(n)?;
    state = squeeze_mode(&state, 0, r, SqueezeAxis::Momentum)?;
    for mode in 1..n {
        state = squeeze_mode(&state, mode, r, SqueezeAxis::Position)?;
    }
    for k in 0..n - 1 {
        let theta = math::acos(1.0 / math::sqrt((n - k) as f64));
        let bs = beamsplitter(k, k + 1, theta, n)?;
        state = state.transformed(&bs)?;
    }
    Ok(state)
}

/// Wigner density at a phase-space point, normalized so the full integral
/// over all quadratures is 1:
///   W(v) = (2 pi)^{-N} det(sigma)^{-1/2} exp(-v^T sigma^{-1} v / 2).
pub fn wigner_at(state: &GaussianState, point: &PhasePoint) -> Result<f64> {
    if point.n_modes() != state.n_modes() {
        return Err(invalid(format!(
            "point has {} modes, state has {}",
            point.n_modes(),
            state.n_modes()
        )));
    }
    let v = point.quadratures();
    let quad = linalg::quad_form_inv(state.covariance(), &v)?;
    let det = linalg::det_spd(state.covariance())?;
    let norm = math::pow(2.0 * math::PI, state.n_modes() as f64) * math::sqrt(det);
    Ok(math::exp(-0.5 * quad) / norm)
}

/// The exponent matrix M with W(v) = (2/pi)^N exp(-v^T M v), i.e.
/// M = sigma^{-1}/2. Only meaningful for the pure states built here, whose
/// normalization satisfies det(sigma) = 16^{-N}; that consistency is
/// enforced before returning.
pub fn quadratic_form_of(state: &GaussianState) -> Result<Matrix> {
    let det = linalg::det_spd(state.covariance())?;
    let pure_det = math::pow(16.0, -(state.n_modes() as f64));
    let rel = (det / pure_det - 1.0).abs();
    if rel > 1e-6 {
        return Err(numeric(format!(
            "quadratic form requires det(sigma) = 16^-N (pure state); off by {rel:e}"
        )));
    }
    Ok(linalg::inverse_spd(state.covariance())?.scale(0.5))
}

/// Closed-form exponent matrix of the N-mode GHZ Wigner function, written
/// directly from the state's analytic form: the x block has
/// 2e^{2r} + (2/N)(e^{-2r} - e^{2r}) on the diagonal and
/// (2/N)(e^{-2r} - e^{2r}) off it; the p block is the same with r -> -r;
/// x and p do not mix.
pub fn ghz_exponent_matrix(n: usize, r: SqueezingParameter) -> Result<Matrix> {
    if n < 2 {
        return Err(invalid("closed form defined for n >= 2"));
    }
    let rv = r.value();
    let (ep, em) = (math::exp(2.0 * rv), math::exp(-2.0 * rv));
    let off_x = 2.0 / n as f64 * (em - ep);
    let off_p = 2.0 / n as f64 * (ep - em);
    let mut m = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            m[(2 * i, 2 * j)] = off_x + if i == j { 2.0 * ep } else { 0.0 };
            m[(2 * i + 1, 2 * j + 1)] = off_p + if i == j { 2.0 * em } else { 0.0 };
        }
    }
    Ok(m)
}
