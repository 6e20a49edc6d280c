use crate::error::{invalid, Result};
use alloc::vec::Vec;
use num_complex::Complex64;

/// N complex displacement amplitudes, one per mode: alpha_i = x_i + i p_i.
/// Doubles as a phase-space quadrature point via [`PhasePoint::quadratures`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    alphas: Vec<Complex64>,
}

impl PhasePoint {
    pub fn new(alphas: Vec<Complex64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(invalid("phase point needs at least one mode"));
        }
        if alphas.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(invalid("phase point entries must be finite"));
        }
        Ok(PhasePoint { alphas })
    }

    /// All modes displaced by the same amplitude.
    pub fn uniform(n: usize, alpha: Complex64) -> Result<Self> {
        Self::new(alloc::vec![alpha; n])
    }

    pub fn origin(n: usize) -> Result<Self> {
        Self::uniform(n, Complex64::new(0.0, 0.0))
    }

    pub fn n_modes(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    /// Interleaved quadratures (x1, p1, ..., xN, pN).
    pub fn quadratures(&self) -> Vec<f64> {
        let mut q = Vec::with_capacity(2 * self.alphas.len());
        for a in &self.alphas {
            q.push(a.re);
            q.push(a.im);
        }
        q
    }
}
