//! Arbitrary-precision binary fixed-point arithmetic on top of `BigInt`.
//!
//! Purpose-built for the high-cancellation Bell sums: the class terms reach
//! ~10^12 while the result stays near 2, so plain f64 keeps only ~4 reliable
//! digits at N = 85. Values are `mant / 2^frac`; `frac` is chosen per party
//! count so that coefficient growth (~2^{n/2}) still leaves far more than 50
//! decimal digits of headroom. Inputs arrive as f64 and convert exactly.

use alloc::vec::Vec;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

/// Guard bits carried through `exp` internals beyond the working precision.
const GUARD: u32 = 64;

/// Fixed-point fraction bits for an n-party evaluation: 192 baseline plus
/// headroom for the 2^{n/2} coefficient scale, rounded to whole limbs.
pub fn frac_bits_for(n: usize) -> u32 {
    let needed = 192 + (n as u32 + 1) / 2;
    needed.div_ceil(64) * 64
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigFixed {
    mant: BigInt,
    frac: u32,
}

impl BigFixed {
    pub fn zero(frac: u32) -> Self {
        BigFixed {
            mant: BigInt::zero(),
            frac,
        }
    }

    pub fn one(frac: u32) -> Self {
        BigFixed {
            mant: BigInt::from(1u8) << frac as usize,
            frac,
        }
    }

    /// Exact conversion: every finite f64 is a dyadic rational.
    pub fn from_f64(x: f64, frac: u32) -> Self {
        assert!(x.is_finite(), "BigFixed::from_f64 needs a finite value");
        if x == 0.0 {
            return Self::zero(frac);
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp_field = ((bits >> 52) & 0x7ff) as i64;
        let frac_field = bits & ((1u64 << 52) - 1);
        let (mantissa, exp) = if exp_field == 0 {
            (frac_field, -1074i64) // subnormal
        } else {
            (frac_field | (1u64 << 52), exp_field - 1075)
        };
        let m = BigInt::from(sign) * BigInt::from(mantissa);
        let shift = exp + frac as i64;
        let mant = if shift >= 0 {
            m << shift as usize
        } else {
            m >> (-shift) as usize // only reachable for |x| < 2^-frac
        };
        BigFixed { mant, frac }
    }

    pub fn from_bigint(v: &BigInt, frac: u32) -> Self {
        BigFixed {
            mant: v << frac as usize,
            frac,
        }
    }

    pub fn frac(&self) -> u32 {
        self.frac
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        // take the top 64 bits and rescale, so neither the mantissa
        // conversion nor the 2^-frac factor can overflow or underflow on
        // its own; scalbn performs the single final rounding
        let bits = self.mant.bits() as i64;
        let drop = (bits - 64).max(0);
        let top = (&self.mant >> drop as usize).to_f64().unwrap_or(f64::NAN);
        libm::scalbn(top, (drop - self.frac as i64) as i32)
    }

    pub fn add(&self, other: &BigFixed) -> BigFixed {
        debug_assert_eq!(self.frac, other.frac);
        BigFixed {
            mant: &self.mant + &other.mant,
            frac: self.frac,
        }
    }

    pub fn sub(&self, other: &BigFixed) -> BigFixed {
        debug_assert_eq!(self.frac, other.frac);
        BigFixed {
            mant: &self.mant - &other.mant,
            frac: self.frac,
        }
    }

    pub fn neg(&self) -> BigFixed {
        BigFixed {
            mant: -self.mant.clone(),
            frac: self.frac,
        }
    }

    pub fn mul(&self, other: &BigFixed) -> BigFixed {
        debug_assert_eq!(self.frac, other.frac);
        BigFixed {
            mant: (&self.mant * &other.mant) >> self.frac as usize,
            frac: self.frac,
        }
    }

    pub fn mul_i64(&self, v: i64) -> BigFixed {
        BigFixed {
            mant: &self.mant * BigInt::from(v),
            frac: self.frac,
        }
    }

    pub fn mul_bigint(&self, v: &BigInt) -> BigFixed {
        BigFixed {
            mant: &self.mant * v,
            frac: self.frac,
        }
    }

    pub fn div_u64(&self, v: u64) -> BigFixed {
        BigFixed {
            mant: &self.mant / BigInt::from(v),
            frac: self.frac,
        }
    }

    /// Multiply by 2^k (k may be negative).
    pub fn scale_pow2(&self, k: i32) -> BigFixed {
        let mant = if k >= 0 {
            &self.mant << k as usize
        } else {
            &self.mant >> (-k) as usize
        };
        BigFixed { mant, frac: self.frac }
    }

    fn widen(&self, extra: u32) -> BigFixed {
        BigFixed {
            mant: &self.mant << extra as usize,
            frac: self.frac + extra,
        }
    }

    fn narrow(&self, less: u32) -> BigFixed {
        BigFixed {
            mant: &self.mant >> less as usize,
            frac: self.frac - less,
        }
    }

    /// exp(x) by argument halving (|y| <= 1/4), Taylor series, and repeated
    /// squaring, all carried with GUARD extra fraction bits.
    pub fn exp(&self) -> BigFixed {
        let frac = self.frac;
        let xf = self.to_f64();
        if self.is_zero() {
            return Self::one(frac);
        }
        // halvings until the reduced argument is at most 1/4
        let mut halvings = 0u32;
        let mut scale = xf.abs();
        while scale > 0.25 {
            scale *= 0.5;
            halvings += 1;
        }
        let wide = self.widen(GUARD);
        let y = wide.scale_pow2(-(halvings as i32));
        // Taylor: sum_j y^j / j!
        let mut term = BigFixed::one(frac + GUARD);
        let mut sum = BigFixed::one(frac + GUARD);
        for j in 1..=160u64 {
            term = term.mul(&y).div_u64(j);
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term);
        }
        let mut acc = sum;
        for _ in 0..halvings {
            acc = acc.mul(&acc);
        }
        acc.narrow(GUARD)
    }
}

/// Neumaier (improved Kahan) compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sorts (term, weight) pairs by ascending |term| and accumulates with
/// compensation; returns (value, sum of |term| * weight). The weight channel
/// carries each term's relative-error budget so callers can report an
/// honest cancellation estimate.
pub fn compensated_weighted_sum(terms: &mut Vec<(f64, f64)>) -> (f64, f64) {
    terms.sort_by(|a, b| {
        a.0.abs()
            .partial_cmp(&b.0.abs())
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut acc = CompensatedSum::new();
    let mut budget = 0.0f64;
    for &(t, w) in terms.iter() {
        acc.add(t);
        budget += t.abs() * w;
    }
    (acc.value(), budget)
}
