//! Mermin-Klyshko Bell combinations.
//!
//! The N-party combination is defined recursively,
//!   B_N = (1/2)(s_N + s_N') B_{N-1} + (1/2)(s_N - s_N') B'_{N-1},
//! where the primed combination swaps every party's two settings and the
//! two-party base case is the CHSH sum with signs (+,+,+,-). Two views are
//! provided: the explicit 2^N term list for N <= 24, and exact per-class
//! coefficients (terms grouped by how many parties use the primed setting)
//! for any N, which is what makes N in the hundreds tractable.

use crate::dyadic::Dyadic;
use crate::error::{invalid, Error, Result};
use alloc::format;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_complex::Complex64;

/// Largest party count for the explicit term list (2^N terms).
pub const MAX_EXPAND_N: usize = 24;

/// Per-party measurement settings: (unprimed, primed) displacement
/// amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct SettingsTable {
    pairs: Vec<(Complex64, Complex64)>,
}

impl SettingsTable {
    pub fn new(pairs: Vec<(Complex64, Complex64)>) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(invalid("settings table needs at least two parties"));
        }
        for (a, b) in &pairs {
            if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
                return Err(invalid("settings must be finite"));
            }
        }
        Ok(SettingsTable { pairs })
    }

    /// The standard near-optimal choice: unprimed 0, primed i sqrt(J).
    pub fn equal_settings(n: usize, j: f64) -> Result<Self> {
        let primed = Complex64::new(0.0, crate::math::sqrt(j));
        Self::new(alloc::vec![(Complex64::new(0.0, 0.0), primed); n])
    }

    /// Unprimed 0, primed sqrt(J) e^{i phi_k}.
    pub fn with_phases(n: usize, j: f64, phases: &[f64]) -> Result<Self> {
        if phases.len() != n {
            return Err(invalid(format!(
                "expected {n} phases, got {}",
                phases.len()
            )));
        }
        let root = crate::math::sqrt(j);
        let pairs = phases
            .iter()
            .map(|&phi| {
                (
                    Complex64::new(0.0, 0.0),
                    Complex64::new(root * crate::math::cos(phi), root * crate::math::sin(phi)),
                )
            })
            .collect();
        Self::new(pairs)
    }

    pub fn n_parties(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(Complex64, Complex64)] {
        &self.pairs
    }

    /// Displacement vector selected by a bit mask (bit i set = party i
    /// primed).
    pub fn select(&self, selector: u32) -> Vec<Complex64> {
        let mut out = Vec::new();
        self.select_into(selector, &mut out);
        out
    }

    /// Allocation-free variant of [`select`](Self::select) for hot loops
    /// over all 2^n selectors.
    pub fn select_into(&self, selector: u32, out: &mut Vec<Complex64>) {
        out.clear();
        out.extend(
            self.pairs
                .iter()
                .enumerate()
                .map(|(i, (a, b))| if selector >> i & 1 == 1 { *b } else { *a }),
        );
    }
}

/// One term of the expanded combination: an exact coefficient on the
/// correlation whose parties use the settings picked by `selector`
/// (bit i set = party i primed).
#[derive(Debug, Clone, PartialEq)]
pub struct BellTerm {
    pub coefficient: Dyadic,
    pub selector: u32,
}

/// Coefficients grouped by primed-count: every selector with exactly k
/// primed parties carries the same coefficient c[k].
#[derive(Debug, Clone, PartialEq)]
pub struct ClassCoefficients {
    n: usize,
    coeffs: Vec<Dyadic>,
}

impl ClassCoefficients {
    pub fn n(&self) -> usize {
        self.n
    }

    /// c[k] for k = 0..=n.
    pub fn coeffs(&self) -> &[Dyadic] {
        &self.coeffs
    }

    /// sum_k C(n,k) |c[k]|, algebraically 2^{floor(n/2)+1}.
    pub fn l1_norm(&self) -> Dyadic {
        let mut acc = Dyadic::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            acc = acc.add(&c.abs().mul_bigint(&crate::dyadic::binomial_bigint(self.n, k)));
        }
        acc
    }

    /// sum_k C(n,k) c[k]: the combination's value when every correlation
    /// equals 1. Algebraically 2 for every n.
    pub fn signed_sum(&self) -> Dyadic {
        let mut acc = Dyadic::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            acc = acc.add(&c.mul_bigint(&crate::dyadic::binomial_bigint(self.n, k)));
        }
        acc
    }
}

fn capacity(n: usize) -> Error {
    Error::CapacityExceeded {
        what: format!(
            "term list has 2^{n} entries; supported up to n = {MAX_EXPAND_N} (use class coefficients instead)"
        ),
        required_cutoff: None,
    }
}

/// Raw dense expansion: numerators indexed by selector plus one shared
/// power-of-two denominator. Numerators stay within i64 because the
/// shared denominator never exceeds n - 2 halvings.
pub fn mk_expand_raw(n: usize) -> Result<(Vec<i64>, u32)> {
    if n < 2 {
        return Err(invalid(format!("expansion needs n >= 2, got {n}")));
    }
    if n > MAX_EXPAND_N {
        return Err(capacity(n));
    }
    // CHSH base: selectors 00, 01, 10, 11
    let mut num: Vec<i64> = alloc::vec![1, 1, 1, -1];
    let mut den: u32 = 0;
    for _ in 3..=n {
        let prev_len = num.len();
        let mask = prev_len - 1;
        let mut next = alloc::vec![0i64; prev_len * 2];
        for low in 0..prev_len {
            let a = num[low];
            let b = num[!low & mask]; // primed combination = complemented selector
            next[low] = a + b; // new party unprimed
            next[low | prev_len] = a - b; // new party primed
        }
        num = next;
        den += 1;
    }
    // strip common factors of two
    let min_tz = num
        .iter()
        .filter(|&&v| v != 0)
        .map(|v| v.trailing_zeros())
        .min()
        .unwrap_or(0)
        .min(den);
    if min_tz > 0 {
        for v in &mut num {
            *v >>= min_tz;
        }
        den -= min_tz;
    }
    Ok((num, den))
}

/// Explicit nonzero terms of the N-party combination, ascending selector.
pub fn mk_expand(n: usize) -> Result<Vec<BellTerm>> {
    let (num, den) = mk_expand_raw(n)?;
    Ok(num
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0)
        .map(|(s, &v)| BellTerm {
            coefficient: Dyadic::new(BigInt::from(v), den),
            selector: s as u32,
        })
        .collect())
}

/// Exact per-class coefficients for any n, via the O(n^2) recursion on
/// primed-count classes. Both recursion routes (attach the new party
/// unprimed to a k-class, or primed to a (k-1)-class) must agree; the
/// agreement is asserted because it is exactly the permutation symmetry
/// the grouping relies on.
pub fn class_coefficients(n: usize) -> Result<ClassCoefficients> {
    if n < 2 {
        return Err(invalid(format!("class coefficients need n >= 2, got {n}")));
    }
    let mut c = alloc::vec![
        Dyadic::from_integer(1),
        Dyadic::from_integer(1),
        Dyadic::from_integer(-1),
    ];
    for m in 3..=n {
        let mut next = Vec::with_capacity(m + 1);
        for k in 0..=m {
            let unprimed = if k <= m - 1 {
                Some(c[k].add(&c[m - 1 - k]).halved())
            } else {
                None
            };
            let primed = if k >= 1 {
                Some(c[k - 1].sub(&c[m - k]).halved())
            } else {
                None
            };
            let v = match (unprimed, primed) {
                (Some(u), Some(p)) => {
                    assert_eq!(u, p, "class recursion symmetry broke at m={m} k={k}");
                    u
                }
                (Some(u), None) => u,
                (None, Some(p)) => p,
                (None, None) => unreachable!(),
            };
            next.push(v);
        }
        c = next;
    }
    Ok(ClassCoefficients { n, coeffs: c })
}

/// Brute-force grouping of the explicit term list into classes (n <= 24);
/// oracle for `class_coefficients`.
pub fn classes_from_terms(n: usize) -> Result<ClassCoefficients> {
    let (num, den) = mk_expand_raw(n)?;
    let mut by_k: Vec<Option<i64>> = alloc::vec![None; n + 1];
    for (s, &v) in num.iter().enumerate() {
        let k = (s as u32).count_ones() as usize;
        match by_k[k] {
            None => by_k[k] = Some(v),
            Some(prev) => {
                if prev != v {
                    return Err(crate::error::numeric(format!(
                        "selectors of primed-count {k} carry different coefficients ({prev} vs {v})"
                    )));
                }
            }
        }
    }
    Ok(ClassCoefficients {
        n,
        coeffs: by_k
            .into_iter()
            .map(|v| Dyadic::new(BigInt::from(v.unwrap_or(0)), den))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{Signed, ToPrimitive};

    #[test]
    fn chsh_base_case() {
        let terms = mk_expand(2).unwrap();
        assert_eq!(terms.len(), 4);
        let coeffs: Vec<(u32, f64)> = terms
            .iter()
            .map(|t| (t.selector, t.coefficient.to_f64()))
            .collect();
        assert_eq!(
            coeffs,
            alloc::vec![(0, 1.0), (1, 1.0), (2, 1.0), (3, -1.0)]
        );
    }

    #[test]
    fn three_party_terms() {
        // nonzero only on the three single-primed selectors (+1) and the
        // all-primed selector (-1)
        let terms = mk_expand(3).unwrap();
        assert_eq!(terms.len(), 4);
        for t in &terms {
            match t.selector {
                1 | 2 | 4 => assert_eq!(t.coefficient.to_f64(), 1.0),
                7 => assert_eq!(t.coefficient.to_f64(), -1.0),
                s => panic!("unexpected selector {s}"),
            }
        }
    }

    #[test]
    fn four_party_terms() {
        let terms = mk_expand(4).unwrap();
        assert_eq!(terms.len(), 16);
        for t in &terms {
            assert_eq!(t.coefficient.to_f64().abs(), 0.5);
        }
        let c = class_coefficients(4).unwrap();
        let vals: Vec<f64> = c.coeffs().iter().map(|d| d.to_f64()).collect();
        assert_eq!(vals, alloc::vec![-0.5, 0.5, 0.5, -0.5, -0.5]);
    }

    #[test]
    fn five_party_classes() {
        let c = class_coefficients(5).unwrap();
        let vals: Vec<f64> = c.coeffs().iter().map(|d| d.to_f64()).collect();
        assert_eq!(vals, alloc::vec![-0.5, 0.0, 0.5, 0.0, -0.5, 0.0]);
    }

    #[test]
    fn grouping_matches_brute_force() {
        for n in 2..=12 {
            let fast = class_coefficients(n).unwrap();
            let brute = classes_from_terms(n).unwrap();
            assert_eq!(fast, brute, "n={n}");
        }
    }

    #[test]
    fn l1_norm_identity() {
        for n in 2..=12 {
            let l1 = class_coefficients(n).unwrap().l1_norm();
            let expect = Dyadic::from_integer(1 << (n / 2 + 1));
            assert_eq!(l1, expect, "n={n}");
        }
        // and far beyond the brute-force range
        for n in [51usize, 85, 200] {
            let l1 = class_coefficients(n).unwrap().l1_norm();
            assert_eq!(l1.den_pow2(), 0);
            let expect = BigInt::from(1u8) << (n / 2 + 1);
            assert_eq!(*l1.numerator(), expect, "n={n}");
        }
    }

    #[test]
    fn signed_sum_is_two() {
        for n in [2usize, 3, 7, 12, 45, 85, 130] {
            let s = class_coefficients(n).unwrap().signed_sum();
            assert_eq!(s, Dyadic::from_integer(2), "n={n}");
        }
    }

    #[test]
    fn term_list_l1_matches_class_l1() {
        for n in 2..=12 {
            let terms = mk_expand(n).unwrap();
            let mut acc = Dyadic::zero();
            for t in &terms {
                acc = acc.add(&t.coefficient.abs());
            }
            assert_eq!(acc, class_coefficients(n).unwrap().l1_norm(), "n={n}");
        }
    }

    #[test]
    fn odd_n_sign_and_magnitude_patterns() {
        for n in [3usize, 5, 7, 9, 11, 13, 15, 17] {
            let c = class_coefficients(n).unwrap();
            let mag = libm::exp2((3.0 - n as f64) / 2.0); // 2^{(3-n)/2}
            for (k, d) in c.coeffs().iter().enumerate() {
                let populated_parity = match n % 8 {
                    3 | 7 => 1, // odd k
                    1 | 5 => 0, // even k
                    _ => unreachable!(),
                };
                if k % 2 != populated_parity {
                    assert!(d.is_zero(), "n={n} k={k} should vanish");
                    continue;
                }
                let v = d.to_f64();
                assert!((v.abs() - mag).abs() < 1e-18, "n={n} k={k} |c|={}", v.abs());
                let j = k / 2; // for odd parity this is (k-1)/2
                let sign_positive = match n % 8 {
                    3 => j % 2 == 0,
                    5 => j % 2 == 1,
                    7 => j % 2 == 1,
                    1 => j % 2 == 0,
                    _ => unreachable!(),
                };
                assert_eq!(v > 0.0, sign_positive, "n={n} k={k} v={v}");
            }
        }
    }

    #[test]
    fn same_primed_count_same_coefficient() {
        for n in 2..=12 {
            // classes_from_terms errors out if any class is inhomogeneous
            classes_from_terms(n).unwrap();
        }
    }

    #[test]
    fn capacity_and_argument_errors() {
        assert!(matches!(
            mk_expand(25),
            Err(Error::CapacityExceeded { .. })
        ));
        assert!(mk_expand(1).is_err());
        assert!(class_coefficients(1).is_err());
    }

    #[test]
    fn numerators_are_unit_far_out() {
        // every populated class coefficient is +/- a pure power of two
        for n in [30usize, 85, 171] {
            for d in class_coefficients(n).unwrap().coeffs() {
                if !d.is_zero() {
                    assert_eq!(d.numerator().abs().to_i64(), Some(1), "n={n}");
                }
            }
        }
    }

    #[test]
    fn settings_table_select() {
        let t = SettingsTable::equal_settings(3, 0.25).unwrap();
        let v = t.select(0b101);
        assert_eq!(v[0], Complex64::new(0.0, 0.5));
        assert_eq!(v[1], Complex64::new(0.0, 0.0));
        assert_eq!(v[2], Complex64::new(0.0, 0.5));
        assert!(SettingsTable::with_phases(3, 0.1, &[0.0, 0.0]).is_err());
    }
}
