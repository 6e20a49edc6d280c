//! Maximization of the Bell quantity over displacement magnitude,
//! asymptotic scale, and (for small N) per-party phases.
//!
//! The curves are multi-modal at large N (a second hump grows out of the
//! tail), so every search starts from a coarse log-spaced scan and only
//! then refines each detected peak by golden section. Scans run on the
//! f64 fast path; refinement and all reported values go through the
//! full evaluator with its arbitrary-precision fallback, so peak
//! positions stay trustworthy even at N = 85 where the raw f64 curve
//! carries ~1e-3 of cancellation noise.

use crate::bellval::{
    eval_asymptotic, eval_asymptotic_fast, eval_equal_settings, eval_equal_settings_fast,
    BellValue, ClassTable,
};
use crate::correlation::pi_exponent;
use crate::error::{invalid, Result};
use crate::expansion::{mk_expand_raw, SettingsTable};
use crate::math;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

const SCAN_POINTS: usize = 256;
const REFINE_TOL: f64 = 1e-10;
/// Local maxima closer in value than this are considered tied; ties
/// resolve to the smaller argument for determinism.
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct OptimizationResult {
    /// Argmax displacement parameter (J or A; for phase optimization the
    /// fixed J, with the phases in `phases`).
    pub argmax: f64,
    pub value: f64,
    /// The requested search interval.
    pub bracket: (f64, f64),
    /// Total objective evaluations (scan + refinement + candidate checks).
    pub evaluations: usize,
    /// Detected local maxima as (arg, value), ascending in arg.
    pub local_maxima: Vec<(f64, f64)>,
    /// Cancellation estimate of the reported maximum value.
    pub cancellation_estimate: f64,
    /// Optimal phases, present only for [`optimize_phases`].
    pub phases: Option<Vec<f64>>,
}

fn golden_max(f: &mut dyn FnMut(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > REFINE_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn validate_bracket(bracket: (f64, f64)) -> Result<()> {
    let (lo, hi) = bracket;
    if !lo.is_finite() || !hi.is_finite() || lo < 0.0 || hi <= lo || hi <= 0.0 {
        return Err(invalid(format!(
            "bracket must satisfy 0 <= lo < hi with finite endpoints, got ({lo}, {hi})"
        )));
    }
    Ok(())
}

/// Coarse log scan + per-peak golden refinement + definitive candidate
/// re-evaluation. `fast` is the f64 scan objective, `full` the evaluator
/// whose values are reported.
fn maximize_1d(
    bracket: (f64, f64),
    fast: &mut dyn FnMut(f64) -> f64,
    full: &mut dyn FnMut(f64) -> BellValue,
) -> Result<OptimizationResult> {
    validate_bracket(bracket)?;
    let (lo, hi) = bracket;
    let scan_lo = if lo > 0.0 { lo } else { hi * 1e-6 };
    let mut evals = 0usize;

    let log_lo = math::ln(scan_lo);
    let log_hi = math::ln(hi);
    let xs: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| math::exp(log_lo + (log_hi - log_lo) * i as f64 / (SCAN_POINTS - 1) as f64))
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| fast(x)).collect();
    evals += SCAN_POINTS;

    // strict interior peaks; flat stretches (underflowed tails) are not
    // maxima
    let mut peak_brackets: Vec<(f64, f64)> = Vec::new();
    for i in 1..SCAN_POINTS - 1 {
        if ys[i] > ys[i - 1] && ys[i] > ys[i + 1] {
            peak_brackets.push((xs[i - 1], xs[i + 1]));
        }
    }
    if ys[0] > ys[1] {
        peak_brackets.insert(0, (xs[0], xs[1]));
    }
    if ys[SCAN_POINTS - 1] > ys[SCAN_POINTS - 2] {
        peak_brackets.push((xs[SCAN_POINTS - 2], xs[SCAN_POINTS - 1]));
    }

    // refine against the full evaluator so the peak position is not
    // polluted by f64 cancellation noise at large N
    let mut locals: Vec<(f64, BellValue)> = Vec::new();
    for (a, b) in peak_brackets {
        let mut refine_evals = 0usize;
        let arg = {
            let mut obj = |x: f64| {
                refine_evals += 1;
                full(x).value
            };
            golden_max(&mut obj, a, b)
        };
        evals += refine_evals;
        let v = full(arg);
        evals += 1;
        locals.push((arg, v));
    }
    locals.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    locals.dedup_by(|b, a| {
        if (b.0 - a.0).abs() <= 1e-7 * (1.0 + a.0.abs()) {
            if b.1.value > a.1.value {
                a.0 = b.0;
                a.1 = b.1.clone();
            }
            true
        } else {
            false
        }
    });

    // candidates: refined locals plus both requested endpoints (the lower
    // endpoint carries the exact zero-displacement baseline when lo = 0)
    let mut candidates: Vec<(f64, BellValue)> = locals.clone();
    for end in [lo, hi] {
        let v = full(end);
        evals += 1;
        candidates.push((end, v));
    }
    candidates.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    let mut best = candidates[0].clone();
    for c in &candidates[1..] {
        if c.1.value > best.1.value + TIE_TOL {
            best = c.clone();
        }
    }

    let local_maxima: Vec<(f64, f64)> = if locals.is_empty() {
        vec![(best.0, best.1.value)]
    } else {
        locals.iter().map(|(a, v)| (*a, v.value)).collect()
    };

    Ok(OptimizationResult {
        argmax: best.0,
        value: best.1.value,
        bracket,
        evaluations: evals,
        local_maxima,
        cancellation_estimate: best.1.cancellation_estimate,
        phases: None,
    })
}

/// Maximize B_n(r, J) over the displacement magnitude J at fixed
/// squeezing. `bracket` defaults to (0, 5]; the zero-displacement value 2
/// is always a candidate, so the result never reports below 2.
pub fn maximize_over_displacement(
    n: usize,
    r: f64,
    bracket: Option<(f64, f64)>,
) -> Result<OptimizationResult> {
    if !r.is_finite() || r < 0.0 {
        return Err(invalid(format!("squeezing must be finite and >= 0, got {r}")));
    }
    let bracket = bracket.unwrap_or((0.0, 5.0));
    let table = ClassTable::new(n)?;
    maximize_1d(
        bracket,
        &mut |j| eval_equal_settings_fast(&table, r, j),
        &mut |j| eval_equal_settings(&table, r, j),
    )
}

/// Maximize the large-squeezing limit B_n(A) over A. `bracket` defaults
/// to (0, 3].
pub fn maximize_asymptotic(n: usize, bracket: Option<(f64, f64)>) -> Result<OptimizationResult> {
    let bracket = bracket.unwrap_or((0.0, 3.0));
    let table = ClassTable::new(n)?;
    maximize_1d(
        bracket,
        &mut |a| eval_asymptotic_fast(&table, a),
        &mut |a| eval_asymptotic(&table, a),
    )
}

/// Dense evaluation over an (r, J) grid, row-major with r as the slow
/// index: out[ir * j_grid.len() + ij] = B_n(r_grid[ir], j_grid[ij]).
pub fn scan_surface(n: usize, r_grid: &[f64], j_grid: &[f64]) -> Result<Vec<BellValue>> {
    for &r in r_grid {
        if !r.is_finite() || r < 0.0 {
            return Err(invalid(format!("grid squeezing must be finite and >= 0, got {r}")));
        }
    }
    for &j in j_grid {
        if !j.is_finite() || j < 0.0 {
            return Err(invalid(format!("grid displacement must be finite and >= 0, got {j}")));
        }
    }
    let table = ClassTable::new(n)?;
    let mut out = Vec::with_capacity(r_grid.len() * j_grid.len());
    for &r in r_grid {
        for &j in j_grid {
            out.push(eval_equal_settings(&table, r, j));
        }
    }
    Ok(out)
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn uniform(state: &mut u64) -> f64 {
    (splitmix(state) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

const TWO_PI: f64 = 2.0 * math::PI;

/// Maximize B_n over the per-party phases of the primed settings
/// sqrt(J) e^{i phi_k} (unprimed settings stay at the origin), at fixed r
/// and J. Multi-start coordinate ascent; n <= 10 because the objective
/// walks the full 2^n term list.
pub fn optimize_phases(n: usize, r: f64, j: f64) -> Result<OptimizationResult> {
    if n > 10 {
        return Err(invalid(format!(
            "phase optimization walks 2^n terms and is limited to n <= 10, got {n}"
        )));
    }
    if !r.is_finite() || r < 0.0 || !j.is_finite() || j < 0.0 {
        return Err(invalid(format!("need finite r >= 0 and J >= 0, got r={r}, J={j}")));
    }
    let (nums, den) = mk_expand_raw(n)?;
    let scale = math::pow(0.5, den as f64);
    let root = math::sqrt(j);
    let mut evals = 0usize;

    let mut alphas = vec![Complex64::new(0.0, 0.0); n];
    let mut objective = |phases: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let primed: Vec<Complex64> = phases
            .iter()
            .map(|&p| Complex64::new(root * math::cos(p), root * math::sin(p)))
            .collect();
        let mut acc = 0.0f64;
        for (s, &num) in nums.iter().enumerate() {
            if num == 0 {
                continue;
            }
            for (i, a) in alphas.iter_mut().enumerate() {
                *a = if s >> i & 1 == 1 {
                    primed[i]
                } else {
                    Complex64::new(0.0, 0.0)
                };
            }
            acc += num as f64 * math::exp(pi_exponent(n, r, &alphas));
        }
        acc * scale
    };

    // start 0: the symmetric guess; the rest: deterministic pseudo-random
    let mut rng_state: u64 = 0x5EED_0F0F_2026_0815;
    let mut starts: Vec<Vec<f64>> = vec![vec![math::FRAC_PI_2; n]];
    for _ in 1..8 {
        starts.push((0..n).map(|_| uniform(&mut rng_state) * TWO_PI).collect());
    }

    let mut converged: Vec<(Vec<f64>, f64)> = Vec::new();
    for start in starts {
        let mut cur = start;
        let mut cur_val = objective(&cur, &mut evals);
        for _sweep in 0..64 {
            let sweep_start = cur_val;
            for i in 0..n {
                // coarse periodic scan then golden refinement on the best
                // surrounding bracket (the objective is 2pi-periodic, so
                // out-of-range angles are fine)
                const COARSE: usize = 16;
                let mut best_k = 0usize;
                let mut best_v = f64::NEG_INFINITY;
                for k in 0..COARSE {
                    let mut cand = cur.clone();
                    cand[i] = k as f64 * TWO_PI / COARSE as f64;
                    let v = objective(&cand, &mut evals);
                    if v > best_v {
                        best_v = v;
                        best_k = k;
                    }
                }
                let center = best_k as f64 * TWO_PI / COARSE as f64;
                let half = TWO_PI / COARSE as f64;
                let arg = {
                    let mut coord_obj = |x: f64| {
                        let mut cand = cur.clone();
                        cand[i] = x;
                        objective(&cand, &mut evals)
                    };
                    golden_max(&mut coord_obj, center - half, center + half)
                };
                let mut cand = cur.clone();
                cand[i] = arg;
                let v = objective(&cand, &mut evals);
                if v >= cur_val {
                    cur = cand;
                    cur_val = v;
                }
            }
            if cur_val - sweep_start < 1e-8 {
                break;
            }
        }
        for p in cur.iter_mut() {
            *p = math::rem_euclid(*p, TWO_PI);
        }
        converged.push((cur, cur_val));
    }

    converged.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let (best_phases, _) = converged[0].clone();
    let settings = SettingsTable::with_phases(n, j, &best_phases)?;
    let definitive = crate::bellval::bell_value_general(n, r, &settings)?;
    evals += 1;

    let mut local_maxima: Vec<(f64, f64)> = Vec::new();
    for (_, v) in &converged {
        if local_maxima.iter().all(|(_, lv)| (lv - v).abs() > TIE_TOL) {
            local_maxima.push((j, *v));
        }
    }

    Ok(OptimizationResult {
        argmax: j,
        value: definitive.value,
        bracket: (0.0, TWO_PI),
        evaluations: evals,
        local_maxima,
        cancellation_estimate: definitive.cancellation_estimate,
        phases: Some(best_phases),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellval::bell_value_equal_settings;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{a} vs {b} (diff {:e})", (a - b).abs());
    }

    #[test]
    fn asymptotic_frozen_optima() {
        let cases = [
            (2usize, 0.23104906018664844, 2.1905507889761496),
            (3, 0.20598980412527057, 2.3244947809912952),
            (5, 0.14440566261665527, 2.4763769724403740),
        ];
        for (n, arg, val) in cases {
            let r = maximize_asymptotic(n, None).unwrap();
            close(r.argmax, arg, 1e-6);
            close(r.value, val, 1e-9);
            assert!(r.evaluations >= SCAN_POINTS);
            assert!((r.bracket.0, r.bracket.1) == (0.0, 3.0));
        }
    }

    #[test]
    fn no_violation_without_squeezing() {
        let r = maximize_over_displacement(2, 0.0, None).unwrap();
        assert_eq!(r.value, 2.0);
        assert_eq!(r.argmax, 0.0);
    }

    #[test]
    fn modest_squeezing_five_modes() {
        let r = maximize_over_displacement(5, 0.3, None).unwrap();
        close(r.argmax, 0.047302470356919803, 1e-6);
        close(r.value, 2.2113459237670712, 1e-9);
    }

    #[test]
    fn large_squeezing_two_modes_maps_to_asymptotic() {
        let r = maximize_over_displacement(2, 2.0, None).unwrap();
        close(r.argmax, 0.0042302364533701815, 1e-8);
        close(r.value, 2.1904277745499350, 1e-9);
    }

    #[test]
    fn multimodal_curve_reports_second_peak() {
        let r = maximize_asymptotic(15, None).unwrap();
        close(r.argmax, 0.052363704671976953, 1e-6);
        close(r.value, 2.6908024090749539, 1e-9);
        let second = r
            .local_maxima
            .iter()
            .find(|(a, _)| (a - 1.3432857131243896).abs() < 1e-4);
        let (_, v) = second.expect("second local maximum around A=1.343 not found");
        close(*v, 0.70480595699720152, 1e-9);
    }

    #[test]
    fn value_dominates_bracket_endpoints() {
        let res = maximize_over_displacement(7, 0.8, None).unwrap();
        for end in [res.bracket.0, res.bracket.1] {
            let v = bell_value_equal_settings(7, 0.8, end).value;
            assert!(res.value >= v - 1e-12, "endpoint {end} beats reported max");
        }
        assert!(res.argmax >= res.bracket.0 && res.argmax <= res.bracket.1);
    }

    #[test]
    fn any_nonzero_squeezing_violates() {
        for n in 2..=5 {
            for r in [0.05, 0.8] {
                let res = maximize_over_displacement(n, r, None).unwrap();
                assert!(res.value > 2.0, "n={n} r={r} max={}", res.value);
            }
        }
    }

    #[test]
    fn surface_scan_layout_and_zero_squeezing_row() {
        let r_grid = [0.0, 0.5, 1.0];
        let j_grid = [0.0, 0.1, 0.4, 1.0];
        let grid = scan_surface(2, &r_grid, &j_grid).unwrap();
        assert_eq!(grid.len(), 12);
        assert_eq!(grid[0].value, 2.0);
        for (ij, _) in j_grid.iter().enumerate() {
            assert!(grid[ij].value <= 2.0 + 1e-12, "r=0 cell violates");
        }
        for (ir, &r) in r_grid.iter().enumerate() {
            for (ij, &j) in j_grid.iter().enumerate() {
                let direct = bell_value_equal_settings(2, r, j).value;
                close(grid[ir * j_grid.len() + ij].value, direct, 1e-15);
            }
        }
    }

    #[test]
    fn invalid_brackets_rejected() {
        assert!(maximize_asymptotic(3, Some((1.0, 0.5))).is_err());
        assert!(maximize_asymptotic(3, Some((-1.0, 2.0))).is_err());
        assert!(maximize_over_displacement(3, f64::NAN, None).is_err());
    }

    #[test]
    fn phases_converge_to_symmetric_point() {
        let res = optimize_phases(3, 1.0, 0.05).unwrap();
        let eq = bell_value_equal_settings(3, 1.0, 0.05).value;
        assert!(res.value >= eq - 1e-9, "{} vs {eq}", res.value);
        close(res.value, eq, 1e-6);
        let phases = res.phases.as_ref().unwrap();
        // symmetric optimum modulo the global sign flip
        let near = |p: f64, t: f64| (p - t).abs() < 5e-3;
        let all_half = phases.iter().all(|&p| near(p, math::FRAC_PI_2));
        let all_three_half = phases.iter().all(|&p| near(p, 3.0 * math::FRAC_PI_2));
        assert!(
            all_half || all_three_half,
            "phases not symmetric: {phases:?}"
        );
    }

    #[test]
    fn phases_recover_two_party_closed_form() {
        let res = optimize_phases(2, 1.0, 0.05).unwrap();
        let eq = bell_value_equal_settings(2, 1.0, 0.05).value;
        close(res.value, eq, 1e-9);
    }

    #[test]
    fn phases_at_zero_displacement_stay_at_two() {
        let res = optimize_phases(3, 0.7, 0.0).unwrap();
        assert_eq!(res.value, 2.0);
    }

    #[test]
    fn phase_party_limit() {
        assert!(optimize_phases(11, 0.5, 0.1).is_err());
    }
}
