//! Evaluation of the Mermin-Klyshko Bell quantity for the GHZ states.
//!
//! Two regimes: the class-coefficient path (equal displacement magnitudes,
//! any N) and the explicit term-list path (arbitrary per-party settings,
//! N <= 24). The class path carries a cancellation-error estimate and falls
//! back to arbitrary-precision fixed point when the f64 terms cancel too
//! hard to trust — at N = 85 the individual class terms reach ~10^12 while
//! the sum stays near 2, so this is not optional.

use crate::correlation::{pi_exponent, CorrelationValue};
use crate::dyadic::{binomial_bigint, Dyadic};
use crate::error::{invalid, Result};
use crate::expansion::{class_coefficients, mk_expand_raw, SettingsTable};
use crate::highprec::{compensated_weighted_sum, frac_bits_for, BigFixed};
use crate::math;
use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Relative cancellation estimate above which the f64 class evaluation is
/// redone in arbitrary precision.
pub const FALLBACK_RELATIVE_THRESHOLD: f64 = 1e-8;
/// Party count above which the class evaluation always uses arbitrary
/// precision.
pub const FALLBACK_PARTY_THRESHOLD: usize = 100;

/// A Bell-combination value with its evaluation diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct BellValue {
    pub value: f64,
    pub n: usize,
    /// Estimated absolute numerical error from cancellation and rounding.
    pub cancellation_estimate: f64,
    /// True when the arbitrary-precision path produced the value.
    pub high_precision: bool,
}

/// Per-n precomputation shared by many evaluations: exact class
/// coefficients multiplied by binomial weights, plus their f64 images.
#[derive(Debug, Clone)]
pub struct ClassTable {
    n: usize,
    /// c[k] * C(n,k), exact.
    weighted: Vec<Dyadic>,
    /// f64 image of `weighted` (rounded once, here).
    weighted_f64: Vec<f64>,
}

impl ClassTable {
    pub fn new(n: usize) -> Result<Self> {
        let classes = class_coefficients(n)?;
        let weighted: Vec<Dyadic> = classes
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c.mul_bigint(&binomial_bigint(n, k)))
            .collect();
        let weighted_f64 = weighted.iter().map(|d| d.to_f64()).collect();
        Ok(ClassTable {
            n,
            weighted,
            weighted_f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Pi when exactly k of the n parties displace by i sqrt(J) and the rest
/// stay at the origin: exp(-2J e^{-2r} k - 4J sinh(2r) k^2 / n).
pub fn pi_by_class(n: usize, r: f64, j: f64, k: usize) -> CorrelationValue {
    debug_assert!(k <= n);
    CorrelationValue::from_raw(math::exp(finite_exponent(n, r, j, k)))
}

#[inline]
fn finite_exponent(n: usize, r: f64, j: f64, k: usize) -> f64 {
    let kf = k as f64;
    -2.0 * j * math::exp(-2.0 * r) * kf - 4.0 * j * math::sinh(2.0 * r) * kf * kf / n as f64
}

#[inline]
fn asymptotic_exponent(n: usize, a: f64, k: usize) -> f64 {
    let kf = k as f64;
    -2.0 * a * kf * kf / n as f64
}

/// f64 class evaluation: terms sorted by ascending magnitude, compensated
/// accumulation, and an error budget of |t| * (|exponent| + 6) * eps/2 per
/// term (exponent rounding dominates; the constant covers coefficient
/// rounding and the compensated sum's own residual).
fn eval_classes_f64(table: &ClassTable, exps: impl Fn(usize) -> f64) -> (f64, f64) {
    let mut terms: Vec<(f64, f64)> = Vec::with_capacity(table.n + 1);
    for (k, &c) in table.weighted_f64.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let x = exps(k);
        terms.push((c * math::exp(x), (x.abs() + 6.0) * (f64::EPSILON * 0.5)));
    }
    let (value, budget) = compensated_weighted_sum(&mut terms);
    (value, budget + value.abs() * f64::EPSILON)
}

/// Arbitrary-precision class evaluation. Exponents are rebuilt in fixed
/// point from the exact f64 inputs, so the only residual errors are the
/// 2^-frac truncation (bounded through the coefficient l1 scale) and the
/// final rounding to f64.
fn eval_classes_fixed(table: &ClassTable, exps: impl Fn(u32) -> Vec<BigFixed>) -> (f64, f64) {
    let frac = frac_bits_for(table.n);
    let xs = exps(frac);
    let mut sum = BigFixed::zero(frac);
    let mut coeff_scale = 0.0f64;
    for (k, d) in table.weighted.iter().enumerate() {
        if d.is_zero() {
            continue;
        }
        let e = xs[k].exp();
        let term = e.mul_bigint(d.numerator()).scale_pow2(-(d.den_pow2() as i32));
        sum = sum.add(&term);
        coeff_scale += table.weighted_f64[k].abs();
    }
    let value = sum.to_f64();
    let trunc = coeff_scale * math::pow(2.0, -((frac as i32 - 8) as f64));
    // 0.6 ulp: final conversion truncates to 64 bits before rounding
    let est = (value.abs() * f64::EPSILON * 0.6).max(trunc);
    (value, est)
}

fn finite_exponents_fixed(n: usize, r: f64, j: f64, frac: u32) -> Vec<BigFixed> {
    let two_r = BigFixed::from_f64(2.0 * r, frac);
    let ep = two_r.exp();
    let em = two_r.neg().exp();
    let sinh2r = ep.sub(&em).scale_pow2(-1);
    let jf = BigFixed::from_f64(j, frac);
    // -2 J e^{-2r} and -4 J sinh(2r) / n
    let lin = jf.mul(&em).mul_i64(-2);
    let quad = jf.mul(&sinh2r).mul_i64(-4);
    (0..=n)
        .map(|k| {
            lin.mul_i64(k as i64)
                .add(&quad.mul_i64((k * k) as i64).div_u64(n as u64))
        })
        .collect()
}

fn asymptotic_exponents_fixed(n: usize, a: f64, frac: u32) -> Vec<BigFixed> {
    let base = BigFixed::from_f64(a, frac).mul_i64(-2);
    (0..=n)
        .map(|k| base.mul_i64((k * k) as i64).div_u64(n as u64))
        .collect()
}

fn eval_classes_auto(
    table: &ClassTable,
    f64_exps: impl Fn(usize) -> f64,
    fixed_exps: impl Fn(u32) -> Vec<BigFixed>,
) -> BellValue {
    let n = table.n;
    let (value, est) = eval_classes_f64(table, f64_exps);
    if n <= FALLBACK_PARTY_THRESHOLD && est <= FALLBACK_RELATIVE_THRESHOLD * value.abs() {
        return BellValue {
            value,
            n,
            cancellation_estimate: est,
            high_precision: false,
        };
    }
    let (value, est) = eval_classes_fixed(table, fixed_exps);
    BellValue {
        value,
        n,
        cancellation_estimate: est,
        high_precision: true,
    }
}

/// The exact value at zero displacement: every correlation is 1, so the
/// combination collapses to its signed coefficient sum, which is exactly 2.
fn exact_zero_displacement(table: &ClassTable) -> BellValue {
    let mut acc = Dyadic::zero();
    for d in &table.weighted {
        acc = acc.add(d);
    }
    BellValue {
        value: acc.to_f64(),
        n: table.n,
        cancellation_estimate: 0.0,
        high_precision: false,
    }
}

/// B_n at squeezing r with every primed setting i sqrt(J) (reusing a
/// prebuilt table; see [`bell_value_equal_settings`]).
pub fn eval_equal_settings(table: &ClassTable, r: f64, j: f64) -> BellValue {
    debug_assert!(r >= 0.0 && j >= 0.0);
    if j == 0.0 {
        return exact_zero_displacement(table);
    }
    let n = table.n;
    eval_classes_auto(
        table,
        |k| finite_exponent(n, r, j, k),
        |frac| finite_exponents_fixed(n, r, j, frac),
    )
}

/// Large-squeezing limit B_n(A), A = J e^{2r} (reusing a prebuilt table).
pub fn eval_asymptotic(table: &ClassTable, a: f64) -> BellValue {
    debug_assert!(a >= 0.0);
    if a == 0.0 {
        return exact_zero_displacement(table);
    }
    let n = table.n;
    eval_classes_auto(
        table,
        |k| asymptotic_exponent(n, a, k),
        |frac| asymptotic_exponents_fixed(n, a, frac),
    )
}

/// f64-only evaluations for optimizer scans, where speed matters and the
/// definitive value is recomputed at the end.
pub fn eval_equal_settings_fast(table: &ClassTable, r: f64, j: f64) -> f64 {
    if j == 0.0 {
        return exact_zero_displacement(table).value;
    }
    let n = table.n;
    eval_classes_f64(table, |k| finite_exponent(n, r, j, k)).0
}

pub fn eval_asymptotic_fast(table: &ClassTable, a: f64) -> f64 {
    if a == 0.0 {
        return exact_zero_displacement(table).value;
    }
    let n = table.n;
    eval_classes_f64(table, |k| asymptotic_exponent(n, a, k)).0
}

/// B_n(r, J) with equal settings (unprimed 0, primed i sqrt(J)).
///
/// Panics if n < 2.
pub fn bell_value_equal_settings(n: usize, r: f64, j: f64) -> BellValue {
    let table = ClassTable::new(n).expect("bell value needs n >= 2");
    eval_equal_settings(&table, r, j)
}

/// Large-squeezing limit B_n(A).
///
/// Panics if n < 2.
pub fn bell_asymptotic(n: usize, a: f64) -> BellValue {
    let table = ClassTable::new(n).expect("bell value needs n >= 2");
    eval_asymptotic(&table, a)
}

/// B_n for arbitrary per-party settings through the explicit term list
/// (n <= 24). No arbitrary-precision fallback: the exponents are built from
/// f64 displacement products, so input rounding already bounds the accuracy;
/// the estimate reports it honestly.
pub fn bell_value_general(n: usize, r: f64, settings: &SettingsTable) -> Result<BellValue> {
    if settings.n_parties() != n {
        return Err(invalid(format!(
            "settings table has {} parties, expected {n}",
            settings.n_parties()
        )));
    }
    let (nums, den) = mk_expand_raw(n)?;
    let scale = math::pow(0.5, den as f64);
    let mut terms: Vec<(f64, f64)> = Vec::new();
    let mut buf: Vec<Complex64> = Vec::with_capacity(n);
    for (s, &num) in nums.iter().enumerate() {
        if num == 0 {
            continue;
        }
        settings.select_into(s as u32, &mut buf);
        let x = pi_exponent(n, r, &buf);
        terms.push((
            num as f64 * scale * math::exp(x),
            (x.abs() + 6.0) * (f64::EPSILON * 0.5),
        ));
    }
    let (value, budget) = compensated_weighted_sum(&mut terms);
    Ok(BellValue {
        value,
        n,
        cancellation_estimate: budget + value.abs() * f64::EPSILON,
        high_precision: false,
    })
}

/// Closed form for B_n at zero squeezing, defined for the n = 3 + 8M
/// family: 2^{(3-n)/2} (1 + e^{-4J})^{n/2} sin(n atan(e^{-2J})).
/// Other odd families evaluate through [`bell_value_equal_settings`] at
/// r = 0.
pub fn bell_zero_squeezing(n: usize, j: f64) -> Result<BellValue> {
    if n % 2 == 0 || n % 8 != 3 {
        return Err(invalid(format!(
            "zero-squeezing closed form needs n = 3 + 8M (odd), got {n}; evaluate other classes via the equal-settings path at r = 0"
        )));
    }
    if !(j >= 0.0) {
        return Err(invalid(format!("displacement parameter must be >= 0, got {j}")));
    }
    if j == 0.0 {
        // algebraic limit: (2)^{3/2} sin(3 pi / 4 mod symmetry) scaling out to 2
        return Ok(BellValue {
            value: 2.0,
            n,
            cancellation_estimate: 0.0,
            high_precision: false,
        });
    }
    let amp = math::pow(2.0, (3.0 - n as f64) / 2.0) * math::pow(1.0 + math::exp(-4.0 * j), n as f64 / 2.0);
    let value = amp * math::sin(n as f64 * math::atan(math::exp(-2.0 * j)));
    Ok(BellValue {
        value,
        n,
        cancellation_estimate: (n as f64 + 4.0) * f64::EPSILON * amp,
        high_precision: false,
    })
}
