//! Truncated Fock-basis cross-check of the Gaussian machinery.
//!
//! Everything here is deliberately independent of the covariance-matrix
//! code: states are dense coefficient tensors over photon numbers, beam
//! splitters act per total-photon sector, and displaced parity is taken
//! against explicit D(alpha) matrix elements. Slow, but it validates the
//! closed forms from first principles.

use crate::correlation::CorrelationValue;
use crate::error::{invalid, Error, Result};
use crate::math;
use crate::point::PhasePoint;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Default memory budget for automatic cutoff selection (2 GiB of
/// amplitude storage).
pub const DEFAULT_FOCK_BUDGET_BYTES: usize = 2 << 30;

/// A pure N-mode state truncated at `cutoff` photons per mode
/// (dimension (cutoff+1)^N). Mode 0 is the most significant index.
#[derive(Debug, Clone)]
pub struct TruncatedState {
    n_modes: usize,
    cutoff: usize,
    amps: Vec<Complex64>,
}

impl TruncatedState {
    /// Wraps an explicit amplitude tensor (mode 0 most significant,
    /// (cutoff+1)^n entries).
    pub fn from_amplitudes(
        n_modes: usize,
        cutoff: usize,
        amps: Vec<Complex64>,
    ) -> Result<Self> {
        if n_modes == 0 {
            return Err(invalid("need at least one mode"));
        }
        let expect = (cutoff + 1).pow(n_modes as u32);
        if amps.len() != expect {
            return Err(invalid(format!(
                "amplitude tensor has {} entries, expected {expect}",
                amps.len()
            )));
        }
        Ok(TruncatedState {
            n_modes,
            cutoff,
            amps,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn dim_per_mode(&self) -> usize {
        self.cutoff + 1
    }

    /// Flat index of the occupation tuple, mode 0 most significant.
    fn index_of(&self, occ: &[usize]) -> usize {
        occ.iter().fold(0, |acc, &k| acc * self.dim_per_mode() + k)
    }

    pub fn amplitude(&self, occ: &[usize]) -> Complex64 {
        debug_assert_eq!(occ.len(), self.n_modes);
        self.amps[self.index_of(occ)]
    }
}

fn check_norm(state: &TruncatedState, context: &str) -> Result<()> {
    let leak = (1.0 - state.norm_sq()).abs();
    if leak > 1e-8 {
        return Err(Error::CapacityExceeded {
            what: format!("{context}: truncation leak {leak:.3e} exceeds 1e-8"),
            required_cutoff: Some(state.cutoff * 2),
        });
    }
    Ok(())
}

fn log_factorials(up_to: usize) -> Vec<f64> {
    let mut lf = vec![0.0f64; up_to + 1];
    for k in 1..=up_to {
        lf[k] = lf[k - 1] + math::ln(k as f64);
    }
    lf
}

/// Single-mode squeezed vacuum in the Fock basis:
/// c_{2m} = (sech r)^{1/2} (s tanh r)^m sqrt((2m)!) / (2^m m!), odd levels
/// empty, with s = -1 for position squeezing (x-variance e^{-2r}/4) and
/// s = +1 for momentum squeezing.
pub fn fock_squeezed_vacuum(
    r: f64,
    axis: crate::gaussian::SqueezeAxis,
    cutoff: usize,
) -> Result<TruncatedState> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(invalid(format!("squeezing must be finite and >= 0, got {r}")));
    }
    if cutoff % 2 != 0 {
        return Err(invalid(format!(
            "cutoff must be even (squeezed vacuum lives on even photon numbers), got {cutoff}"
        )));
    }
    let dim = cutoff + 1;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    let t = math::tanh(r);
    let sign = match axis {
        crate::gaussian::SqueezeAxis::Position => -1.0,
        crate::gaussian::SqueezeAxis::Momentum => 1.0,
    };
    let lf = log_factorials(cutoff);
    let lsech = -math::ln(math::cosh(r));
    for m in 0..=(cutoff / 2) {
        let k = 2 * m;
        let mag = if m == 0 {
            math::exp(0.5 * lsech)
        } else if t == 0.0 {
            0.0
        } else {
            math::exp(
                0.5 * lsech + m as f64 * math::ln(t) + 0.5 * lf[k]
                    - m as f64 * math::ln(2.0)
                    - lf[m],
            )
        };
        let s = if m % 2 == 0 { 1.0 } else { sign };
        amps[k] = Complex64::new(s * mag, 0.0);
    }
    let state = TruncatedState {
        n_modes: 1,
        cutoff,
        amps,
    };
    check_norm(&state, "squeezed vacuum")?;
    Ok(state)
}

/// Tensor product of single-mode states (mode 0 most significant).
pub fn fock_tensor(states: &[TruncatedState]) -> Result<TruncatedState> {
    if states.is_empty() {
        return Err(invalid("tensor product needs at least one factor"));
    }
    let cutoff = states[0].cutoff;
    if states.iter().any(|s| s.cutoff != cutoff || s.n_modes != 1) {
        return Err(invalid("tensor factors must be single-mode with equal cutoffs"));
    }
    let mut amps = states[0].amps.clone();
    for s in &states[1..] {
        let mut next = Vec::with_capacity(amps.len() * s.amps.len());
        for a in &amps {
            for b in &s.amps {
                next.push(a * b);
            }
        }
        amps = next;
    }
    Ok(TruncatedState {
        n_modes: states.len(),
        cutoff,
        amps,
    })
}

/// Matrix of the beam splitter with mixing angle theta on the
/// (m+1)-dimensional sector of total photon number m across two modes
/// (basis: k photons in the first mode, m-k in the second).
///
/// The quadrature convention [[cos, sin], [sin, -cos]] lifts to the mode
/// operators as a1 -> c a1 + s a2, a2 -> s a1 - c a2, so the transformed
/// state is ((c b1 + s b2)^dag)^k ((s b1 - c b2)^dag)^{m-k} |00> expanded
/// binomially; entry [j][k] maps input class k to output class j.
fn sector_matrix(theta: f64, m: usize, lf: &[f64]) -> Vec<Vec<f64>> {
    let c = math::cos(theta);
    let s = math::sin(theta);
    let dim = m + 1;
    let mut mat = vec![vec![0.0f64; dim]; dim];
    for k in 0..dim {
        for j in 0..dim {
            let mut acc = 0.0f64;
            let lo = j.saturating_sub(m - k);
            let hi = j.min(k);
            for i in lo..=hi {
                let t1 = binom_f64(k, i, lf) * powi(c, i) * powi(s, k - i);
                let t2 = binom_f64(m - k, j - i, lf)
                    * powi(s, j - i)
                    * powi(-c, (m - k) - (j - i));
                acc += t1 * t2;
            }
            let lognorm = 0.5 * (lf[j] + lf[m - j] - lf[k] - lf[m - k]);
            mat[j][k] = acc * math::exp(lognorm);
        }
    }
    mat
}

fn binom_f64(n: usize, k: usize, lf: &[f64]) -> f64 {
    if k > n {
        return 0.0;
    }
    math::exp(lf[n] - lf[k] - lf[n - k])
}

fn powi(x: f64, k: usize) -> f64 {
    let mut acc = 1.0;
    for _ in 0..k {
        acc *= x;
    }
    acc
}

/// Apply the beam splitter with angle theta to modes (a, b) of a truncated
/// state. Total photon number per pair is conserved, so the rotation never
/// leaves a total-m sector; amplitude rotated onto per-mode occupations
/// above `cutoff` cannot be represented and triggers a capacity error when
/// it carries more than 1e-8 of probability.
pub fn fock_beamsplitter_apply(
    state: &TruncatedState,
    a: usize,
    b: usize,
    theta: f64,
) -> Result<TruncatedState> {
    let n = state.n_modes;
    if a >= n || b >= n || a == b {
        return Err(invalid(format!(
            "beamsplitter modes ({a}, {b}) invalid for {n}-mode state"
        )));
    }
    if !theta.is_finite() {
        return Err(invalid("beamsplitter angle must be finite"));
    }
    let dim = state.dim_per_mode();
    let cutoff = state.cutoff;
    let lf = log_factorials(2 * cutoff);
    let sectors: Vec<Vec<Vec<f64>>> = (0..=2 * cutoff)
        .map(|m| sector_matrix(theta, m, &lf))
        .collect();

    let sa = dim.pow((n - 1 - a) as u32);
    let sb = dim.pow((n - 1 - b) as u32);
    let mut out = vec![Complex64::new(0.0, 0.0); state.amps.len()];
    let mut lost = 0.0f64;
    let mut inbuf = vec![Complex64::new(0.0, 0.0); 2 * cutoff + 1];
    for base in 0..state.amps.len() {
        // visit each configuration of the spectator modes once, via the
        // flat indices whose (a, b) occupations are both zero
        if base / sa % dim != 0 || base / sb % dim != 0 {
            continue;
        }
        for m in 0..=2 * cutoff {
            let klo = m.saturating_sub(cutoff);
            let khi = m.min(cutoff);
            let mut any = false;
            for k in klo..=khi {
                let v = state.amps[base + k * sa + (m - k) * sb];
                if v.norm_sqr() > 0.0 {
                    any = true;
                }
                inbuf[k] = v;
            }
            if !any {
                continue;
            }
            let mat = &sectors[m];
            for j in 0..=m {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in klo..=khi {
                    acc += mat[j][k] * inbuf[k];
                }
                if j > cutoff || m - j > cutoff {
                    lost += acc.norm_sqr();
                } else {
                    out[base + j * sa + (m - j) * sb] = acc;
                }
            }
        }
    }
    if lost > 1e-8 {
        return Err(Error::CapacityExceeded {
            what: format!("beamsplitter output leaks {lost:.3e} past the cutoff"),
            required_cutoff: Some(2 * cutoff),
        });
    }
    let result = TruncatedState {
        n_modes: n,
        cutoff,
        amps: out,
    };
    check_norm(&result, "beamsplitter output")?;
    Ok(result)
}

/// The N-mode GHZ state built in the Fock basis with the same network as
/// the covariance construction: mode 0 momentum-squeezed, the rest
/// position-squeezed, then the beam splitter chain.
pub fn fock_ghz_state(n: usize, r: f64, cutoff: usize) -> Result<TruncatedState> {
    if n < 1 {
        return Err(invalid("need at least one mode"));
    }
    let mut singles = Vec::with_capacity(n);
    singles.push(fock_squeezed_vacuum(
        r,
        crate::gaussian::SqueezeAxis::Momentum,
        cutoff,
    )?);
    for _ in 1..n {
        singles.push(fock_squeezed_vacuum(
            r,
            crate::gaussian::SqueezeAxis::Position,
            cutoff,
        )?);
    }
    let mut state = fock_tensor(&singles)?;
    for k in 0..n.saturating_sub(1) {
        let theta = math::acos(1.0 / math::sqrt((n - k) as f64));
        state = fock_beamsplitter_apply(&state, k, k + 1, theta)?;
    }
    Ok(state)
}

/// Matrix element <m| D(alpha) (-1)^{n_hat} |k> = <m| D(alpha) |k> (-1)^k.
fn displaced_parity_element(m: usize, k: usize, alpha: Complex64, lf: &[f64]) -> Complex64 {
    let parity = if k % 2 == 0 { 1.0 } else { -1.0 };
    parity * displacement_element(m, k, alpha, lf)
}

/// <m|D(alpha)|k> = sqrt(k!/m!) alpha^{m-k} e^{-|alpha|^2/2}
/// L_k^{(m-k)}(|alpha|^2) for m >= k; below the diagonal via
/// D(alpha)^dag = D(-alpha).
fn displacement_element(m: usize, k: usize, alpha: Complex64, lf: &[f64]) -> Complex64 {
    if m < k {
        return displacement_element(k, m, -alpha, lf).conj();
    }
    let d = (m - k) as f64;
    let x = alpha.norm_sqr();
    // associated Laguerre L_k^{(d)}(x) by the three-term recurrence
    let mut l_prev = 1.0f64;
    let mut l = if k == 0 { 1.0 } else { 1.0 + d - x };
    for i in 2..=k {
        let fi = i as f64;
        let next = ((2.0 * fi - 1.0 + d - x) * l - (fi - 1.0 + d) * l_prev) / fi;
        l_prev = l;
        l = next;
    }
    let lognorm = 0.5 * (lf[k] - lf[m]);
    let mut pow = Complex64::new(1.0, 0.0);
    for _ in k..m {
        pow *= alpha;
    }
    pow * (math::exp(lognorm - 0.5 * x) * l)
}

/// Expectation of the displaced parity operator
/// prod_i D_i(alpha_i) P_i D_i(alpha_i)^dag: the Fock image of the
/// correlation Pi(alpha). Since P D(-a) = D(a) P, the operator equals
/// prod_i D_i(2 alpha_i) P_i, which is what the dense per-mode matrices
/// implement.
pub fn displaced_parity_expectation(
    state: &TruncatedState,
    point: &PhasePoint,
) -> Result<CorrelationValue> {
    let n = state.n_modes;
    let alphas = point.alphas();
    if alphas.len() != n {
        return Err(invalid(format!(
            "{} displacements for {n}-mode state",
            alphas.len()
        )));
    }
    check_norm(state, "parity input")?;
    let dim = state.dim_per_mode();
    let lf = log_factorials(state.cutoff);
    let mut cur = state.amps.clone();
    let mut next = vec![Complex64::new(0.0, 0.0); cur.len()];
    for mode in 0..n {
        let mut mat = vec![Complex64::new(0.0, 0.0); dim * dim];
        for row in 0..dim {
            for col in 0..dim {
                mat[row * dim + col] =
                    displaced_parity_element(row, col, 2.0 * alphas[mode], &lf);
            }
        }
        let stride = dim.pow((n - 1 - mode) as u32);
        let block = stride * dim;
        for v in next.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        for base in (0..cur.len()).step_by(block) {
            for off in 0..stride {
                for row in 0..dim {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for col in 0..dim {
                        acc += mat[row * dim + col] * cur[base + off + col * stride];
                    }
                    next[base + off + row * stride] = acc;
                }
            }
        }
        core::mem::swap(&mut cur, &mut next);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in state.amps.iter().zip(cur.iter()) {
        acc += a.conj() * b;
    }
    // Hermitian observable: the imaginary part is pure roundoff
    Ok(CorrelationValue::from_raw(acc.re))
}

/// Covariance matrix of the interleaved quadratures extracted from a
/// truncated state, for comparison against the Gaussian construction.
/// Uses x = (a + a^dag)/2, p = (a - a^dag)/(2i) so vacuum variance is 1/4.
pub fn quadrature_covariance(state: &TruncatedState) -> Result<crate::linalg::Matrix> {
    check_norm(state, "covariance input")?;
    let n = state.n_modes;
    let dim = state.dim_per_mode();
    // a |k> = sqrt(k) |k-1>, a^dag |k> = sqrt(k+1) |k+1>; raising the top
    // level clips, bounded by the norm check above
    let apply_ladder = |src: &[Complex64], mode: usize, raise: bool| -> Vec<Complex64> {
        let stride = dim.pow((n - 1 - mode) as u32);
        let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
        for (idx, &v) in src.iter().enumerate() {
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let k = idx / stride % dim;
            if raise {
                if k + 1 < dim {
                    out[idx + stride] += math::sqrt((k + 1) as f64) * v;
                }
            } else if k > 0 {
                out[idx - stride] += math::sqrt(k as f64) * v;
            }
        }
        out
    };
    let quad_apply = |src: &[Complex64], q: usize| -> Vec<Complex64> {
        let mode = q / 2;
        let lowered = apply_ladder(src, mode, false);
        let raised = apply_ladder(src, mode, true);
        let half = Complex64::new(0.5, 0.0);
        let halfi = Complex64::new(0.0, -0.5);
        lowered
            .iter()
            .zip(raised.iter())
            .map(|(lo, hi)| {
                if q % 2 == 0 {
                    half * (lo + hi)
                } else {
                    halfi * (lo - hi)
                }
            })
            .collect()
    };
    let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
    };
    let quads: Vec<Vec<Complex64>> = (0..2 * n).map(|q| quad_apply(&state.amps, q)).collect();
    let means: Vec<Complex64> = quads.iter().map(|qv| dot(&state.amps, qv)).collect();
    let mut cov = crate::linalg::Matrix::zeros(2 * n, 2 * n);
    for i in 0..2 * n {
        for j in i..2 * n {
            let sym = 0.5 * (dot(&quads[i], &quads[j]) + dot(&quads[j], &quads[i]));
            let v = (sym - means[i] * means[j]).re;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    Ok(cov)
}

/// GHZ construction with automatic cutoff: start at 10 and double until
/// every truncation check passes, bounded by a memory budget on the
/// amplitude tensor (default 2 GiB). Predictable failure instead of
/// silent truncation error.
pub fn fock_ghz_auto(n: usize, r: f64, budget_bytes: Option<usize>) -> Result<TruncatedState> {
    let budget = budget_bytes.unwrap_or(DEFAULT_FOCK_BUDGET_BYTES);
    let mut cutoff = 10usize;
    loop {
        let amps = (cutoff + 1).checked_pow(n as u32);
        let bytes = amps.and_then(|a| a.checked_mul(core::mem::size_of::<Complex64>()));
        match bytes {
            Some(b) if b <= budget => {}
            _ => {
                return Err(Error::CapacityExceeded {
                    what: format!(
                        "cutoff {cutoff} needs more than the {budget}-byte budget for {n} modes"
                    ),
                    required_cutoff: Some(cutoff),
                });
            }
        }
        match fock_ghz_state(n, r, cutoff) {
            Ok(state) => return Ok(state),
            Err(Error::CapacityExceeded { .. }) => cutoff *= 2,
            Err(other) => return Err(other),
        }
    }
}
