//! Displaced-parity correlation function Pi(alpha): closed form and the
//! Wigner-relation path through a Gaussian state.

use crate::error::{invalid, Result};
use crate::gaussian::{wigner_at, GaussianState};
use crate::math;
use crate::point::PhasePoint;
use alloc::format;
use num_complex::Complex64;

/// Expectation of a product of displaced parity operators; always a real
/// number in [-1, 1] up to round-off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationValue(f64);

impl CorrelationValue {
    pub fn value(self) -> f64 {
        self.0
    }

    pub(crate) fn from_raw(value: f64) -> Self {
        CorrelationValue(value)
    }
}

/// Log of Pi(alpha) for the N-mode GHZ state at squeezing r. The double sum
/// over ordered mode pairs (i = j included) collapses to (sum alpha)^2:
///
///   ln Pi = -2 cosh(2r) sum |a_i|^2
///           + sinh(2r) [ (4/N) Re((sum a_i)^2) - 2 Re(sum a_i^2) ]
///
/// Exponent computed fully before the single exponentiation, so scans deep
/// into the decaying tail underflow cleanly instead of losing precision.
pub fn pi_exponent(n: usize, r: f64, alphas: &[Complex64]) -> f64 {
    debug_assert_eq!(alphas.len(), n);
    let mut abs2 = 0.0;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sq = Complex64::new(0.0, 0.0);
    for a in alphas {
        abs2 += a.norm_sqr();
        sum += a;
        sq += a * a;
    }
    -2.0 * math::cosh(2.0 * r) * abs2
        + math::sinh(2.0 * r) * (4.0 / n as f64 * (sum * sum).re - 2.0 * sq.re)
}

/// Pi(alpha) from the closed form.
pub fn pi_closed_form(n: usize, r: f64, point: &PhasePoint) -> Result<CorrelationValue> {
    if n < 2 {
        return Err(invalid("correlation defined for n >= 2"));
    }
    if point.n_modes() != n {
        return Err(invalid(format!(
            "point has {} modes, expected {n}",
            point.n_modes()
        )));
    }
    Ok(CorrelationValue(math::exp(pi_exponent(n, r, point.alphas()))))
}

/// Pi(alpha) through the Wigner relation: (pi/2)^N W(alpha) with the
/// displacement amplitudes read as quadratures.
pub fn pi_from_state(state: &GaussianState, point: &PhasePoint) -> Result<CorrelationValue> {
    let w = wigner_at(state, point)?;
    let scale = math::pow(math::FRAC_PI_2, state.n_modes() as f64);
    Ok(CorrelationValue(scale * w))
}
