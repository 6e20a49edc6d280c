//! Exact dyadic rationals: big-integer numerator over a power-of-two
//! denominator. The recursive Bell combinations only ever halve, add and
//! subtract, so this tiny ring holds their coefficients exactly at any N.

use alloc::string::ToString;
use core::cmp::Ordering;
use core::fmt;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// num / 2^den_pow2, normalized so num is odd or zero (den_pow2 = 0 for 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    num: BigInt,
    den_pow2: u32,
}

impl Dyadic {
    pub fn new(num: BigInt, den_pow2: u32) -> Self {
        let mut d = Dyadic { num, den_pow2 };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic {
            num: BigInt::zero(),
            den_pow2: 0,
        }
    }

    pub fn from_integer(v: i64) -> Self {
        Dyadic {
            num: BigInt::from(v),
            den_pow2: 0,
        }
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den_pow2 = 0;
            return;
        }
        while self.den_pow2 > 0 && (&self.num % 2u8).is_zero() {
            self.num /= 2;
            self.den_pow2 -= 1;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn den_pow2(&self) -> u32 {
        self.den_pow2
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let den = self.den_pow2.max(other.den_pow2);
        let a = &self.num << (den - self.den_pow2) as usize;
        let b = &other.num << (den - other.den_pow2) as usize;
        Dyadic::new(a + b, den)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            num: -self.num.clone(),
            den_pow2: self.den_pow2,
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            num: self.num.abs(),
            den_pow2: self.den_pow2,
        }
    }

    pub fn halved(&self) -> Dyadic {
        if self.num.is_zero() {
            return Dyadic::zero();
        }
        Dyadic::new(self.num.clone(), self.den_pow2 + 1)
    }

    pub fn mul_bigint(&self, m: &BigInt) -> Dyadic {
        Dyadic::new(&self.num * m, self.den_pow2)
    }

    pub fn to_f64(&self) -> f64 {
        // numerator rounding then an exact power-of-two scale
        self.num.to_f64().unwrap_or(f64::NAN) * libm::exp2(-(self.den_pow2 as f64))
    }

    pub fn cmp_value(&self, other: &Dyadic) -> Ordering {
        let d = self.sub(other);
        if d.num.is_positive() {
            Ordering::Greater
        } else if d.num.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den_pow2 == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num.to_string(), self.den_pow2)
        }
    }
}

/// Exact binomial coefficient.
pub fn binomial_bigint(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1u8);
    for i in 0..k {
        acc = acc * BigInt::from((n - i) as u64) / BigInt::from((i + 1) as u64);
    }
    acc
}
