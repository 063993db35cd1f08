//! Signed log-domain scalars.
//!
//! Correlation values in this crate range from order one down past 1e-170,
//! with factorials such as (2·10^4 + 1)! in the prefactors. All closed-form
//! evaluation therefore happens on `LogValue`: a sign together with the
//! natural log of the magnitude. Products and integer powers are exact in
//! log space; sums go through log-sum-exp.

use statrs::function::gamma::ln_gamma;

/// A real number stored as `sign * exp(ln_magnitude)`.
///
/// Zero is represented by sign 0 and `ln_magnitude = -inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogValue {
    sign: i8,
    ln_magnitude: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        sign: 0,
        ln_magnitude: f64::NEG_INFINITY,
    };

    pub const ONE: LogValue = LogValue {
        sign: 1,
        ln_magnitude: 0.0,
    };

    /// Positive value from its natural log.
    pub fn from_ln(ln_magnitude: f64) -> Self {
        LogValue {
            sign: 1,
            ln_magnitude,
        }
    }

    pub fn from_sign_ln(sign: i8, ln_magnitude: f64) -> Self {
        if sign == 0 || ln_magnitude == f64::NEG_INFINITY {
            LogValue::ZERO
        } else {
            LogValue {
                sign: sign.signum(),
                ln_magnitude,
            }
        }
    }

    pub fn from_f64(value: f64) -> Self {
        if value == 0.0 {
            LogValue::ZERO
        } else {
            LogValue {
                sign: if value > 0.0 { 1 } else { -1 },
                ln_magnitude: value.abs().ln(),
            }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Natural log of the magnitude (`-inf` for zero).
    pub fn ln_magnitude(&self) -> f64 {
        self.ln_magnitude
    }

    /// Base-10 log of the magnitude (`-inf` for zero).
    pub fn log10_magnitude(&self) -> f64 {
        self.ln_magnitude / std::f64::consts::LN_10
    }

    /// Convert to linear scale. Overflows to `±inf` and underflows to zero
    /// exactly as `exp` does.
    pub fn to_f64(&self) -> f64 {
        f64::from(self.sign) * self.ln_magnitude.exp()
    }

    pub fn mul(&self, other: &LogValue) -> LogValue {
        LogValue::from_sign_ln(self.sign * other.sign, self.ln_magnitude + other.ln_magnitude)
    }

    pub fn neg(&self) -> LogValue {
        LogValue::from_sign_ln(-self.sign, self.ln_magnitude)
    }

    pub fn abs(&self) -> LogValue {
        LogValue::from_sign_ln(self.sign.abs(), self.ln_magnitude)
    }

    /// Integer power. `0^0 = 1`.
    pub fn powi(&self, exponent: u32) -> LogValue {
        if exponent == 0 {
            return LogValue::ONE;
        }
        if self.sign == 0 {
            return LogValue::ZERO;
        }
        let sign = if self.sign < 0 && exponent % 2 == 1 {
            -1
        } else {
            1
        };
        LogValue::from_sign_ln(sign, self.ln_magnitude * f64::from(exponent))
    }

    /// Square root of a nonnegative value. Panics on negative input.
    pub fn sqrt(&self) -> LogValue {
        assert!(self.sign >= 0, "square root of a negative LogValue");
        LogValue::from_sign_ln(self.sign, self.ln_magnitude * 0.5)
    }

    /// Signed addition through log-sum-exp.
    pub fn add(&self, other: &LogValue) -> LogValue {
        if self.sign == 0 {
            return *other;
        }
        if other.sign == 0 {
            return *self;
        }
        let (hi, lo) = if self.ln_magnitude >= other.ln_magnitude {
            (self, other)
        } else {
            (other, self)
        };
        let delta = lo.ln_magnitude - hi.ln_magnitude;
        if hi.sign == lo.sign {
            LogValue::from_sign_ln(hi.sign, hi.ln_magnitude + delta.exp().ln_1p())
        } else {
            // Same magnitude with opposite signs cancels exactly.
            let diff = -delta.exp_m1();
            if diff == 0.0 {
                LogValue::ZERO
            } else {
                LogValue::from_sign_ln(hi.sign, hi.ln_magnitude + diff.ln())
            }
        }
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        match self.sign.cmp(&other.sign) {
            std::cmp::Ordering::Equal => {}
            ord => return Some(ord),
        }
        if self.sign == 0 {
            return Some(std::cmp::Ordering::Equal);
        }
        if self.sign > 0 {
            self.ln_magnitude.partial_cmp(&other.ln_magnitude)
        } else {
            other.ln_magnitude.partial_cmp(&self.ln_magnitude)
        }
    }
}

/// ln(n!) via the log-gamma function.
pub fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// ln of the multinomial coefficient (n_1 + ... + n_r)! / (n_1! ... n_r!).
pub fn ln_multinomial(parts: &[u64]) -> f64 {
    let total: u64 = parts.iter().sum();
    ln_factorial(total) - parts.iter().map(|&p| ln_factorial(p)).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_one() {
        assert!(LogValue::ZERO.is_zero());
        assert_eq!(LogValue::ONE.to_f64(), 1.0);
        assert_eq!(LogValue::from_f64(0.0), LogValue::ZERO);
    }

    #[test]
    fn mul_and_pow() {
        let a = LogValue::from_f64(-3.0);
        let b = LogValue::from_f64(4.0);
        assert!((a.mul(&b).to_f64() + 12.0).abs() < 1e-12);
        assert!((a.powi(2).to_f64() - 9.0).abs() < 1e-12);
        assert!((a.powi(3).to_f64() + 27.0).abs() < 1e-10);
        assert_eq!(LogValue::ZERO.powi(0), LogValue::ONE);
    }

    #[test]
    fn addition_extreme_range() {
        // exp(1000) + exp(998) in log space
        let a = LogValue::from_ln(1000.0);
        let b = LogValue::from_ln(998.0);
        let sum = a.add(&b);
        assert!((sum.ln_magnitude() - (1000.0 + (1.0 + (-2.0f64).exp()).ln())).abs() < 1e-12);
    }

    #[test]
    fn signed_addition_cancels() {
        let a = LogValue::from_f64(5.0);
        let b = LogValue::from_f64(-5.0);
        assert!(a.add(&b).is_zero());
        let c = LogValue::from_f64(-2.0);
        assert!((a.add(&c).to_f64() - 3.0).abs() < 1e-12);
        let d = LogValue::from_f64(2.0).add(&LogValue::from_f64(-5.0));
        assert!((d.to_f64() + 3.0).abs() < 1e-12);
    }

    #[test]
    fn factorials() {
        assert!((ln_factorial(5) - 120.0f64.ln()).abs() < 1e-12);
        assert!((ln_multinomial(&[3, 3]) - 20.0f64.ln()).abs() < 1e-12);
        assert!((ln_multinomial(&[1, 1, 1]) - 6.0f64.ln()).abs() < 1e-12);
        // (2e4 + 1)! stays finite in log space
        assert!(ln_factorial(20_001).is_finite());
    }

    #[test]
    fn ordering() {
        let small = LogValue::from_ln(-400.0);
        let tiny = LogValue::from_ln(-900.0);
        assert!(tiny < small);
        assert!(LogValue::from_f64(-1.0) < LogValue::ZERO);
        assert!(LogValue::ZERO < small);
    }
}
