//! Log-domain scalar arithmetic shared by the enumeration and message-passing
//! code. Partition functions overflow `f64` well below the enumeration
//! budgets, so every sum of positive terms is carried as a natural log and
//! accumulated with log-sum-exp.

/// Natural-log magnitude of a positive scalar.
///
/// `LogValue(x)` represents the number `exp(x)`; `x = -inf` represents zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogValue(pub f64);

impl LogValue {
    pub const ZERO: LogValue = LogValue(f64::NEG_INFINITY);

    pub fn from_ln(ln: f64) -> Self {
        LogValue(ln)
    }

    pub fn from_value(v: f64) -> Self {
        assert!(v >= 0.0, "LogValue represents nonnegative scalars");
        LogValue(v.ln())
    }

    /// The stored natural log.
    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0.exp()
    }

}

/// Log-domain product.
impl std::ops::Mul for LogValue {
    type Output = LogValue;

    #[allow(clippy::suspicious_arithmetic_impl)] // product of exps is a sum of logs
    fn mul(self, rhs: LogValue) -> LogValue {
        LogValue(self.0 + rhs.0)
    }
}

/// Log-domain sum via log-sum-exp.
impl std::ops::Add for LogValue {
    type Output = LogValue;

    fn add(self, rhs: LogValue) -> LogValue {
        LogValue(logsumexp2(self.0, rhs.0))
    }
}

/// `log(exp(a) + exp(b))` without overflow; tolerates `-inf` arguments.
pub fn logsumexp2(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a >= b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// Streaming log-sum-exp accumulator.
///
/// Pushes are rescaled against the running maximum, so the result is finite
/// whenever the true log-sum is. Merge order perturbs the result only at the
/// level of float rounding.
#[derive(Debug, Clone)]
pub struct LogSum {
    max: f64,
    sum: f64,
}

impl LogSum {
    pub fn new() -> Self {
        LogSum {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    pub fn push(&mut self, ln_term: f64) {
        if ln_term == f64::NEG_INFINITY {
            return;
        }
        if ln_term <= self.max {
            self.sum += (ln_term - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - ln_term).exp() + 1.0;
            self.max = ln_term;
        }
    }

    /// Log of the accumulated sum; `-inf` if nothing was pushed.
    pub fn ln(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

/// `log(1 + exp(x))`, stable for any `x` (softplus).
pub fn log1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `log sigmoid(x) = -log(1 + exp(-x))`; `log_sigmoid(inf) = 0`,
/// `log_sigmoid(-inf) = -inf`.
pub fn log_sigmoid(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    -log1p_exp(-x)
}

/// `x * ln(x)` with the `0 * ln 0 = 0` convention.
pub fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn logsumexp_handles_extremes() {
        assert_eq!(logsumexp2(f64::NEG_INFINITY, f64::NEG_INFINITY), f64::NEG_INFINITY);
        assert_eq!(logsumexp2(f64::NEG_INFINITY, 3.0), 3.0);
        // log(e^1000 + e^998) = 1000 + log(1 + e^-2)
        let got = logsumexp2(1000.0, 998.0);
        assert!((got - (1000.0 + (-2.0f64).exp().ln_1p())).abs() < 1e-12);
    }

    #[test]
    fn log_value_arithmetic() {
        let a = LogValue::from_value(3.0);
        let b = LogValue::from_value(4.0);
        assert!(((a * b).value() - 12.0).abs() < 1e-12);
        assert!(((a + b).value() - 7.0).abs() < 1e-12);
        assert_eq!((LogValue::ZERO + a).ln(), a.ln());
    }

    #[test]
    fn logsum_matches_direct_sum() {
        let terms = [0.3, -1.2, 2.7, 2.7, -40.0];
        let mut acc = LogSum::new();
        for &t in &terms {
            acc.push(t);
        }
        let direct: f64 = terms.iter().map(|t| t.exp()).sum();
        assert!((acc.ln() - direct.ln()).abs() < 1e-13);
    }

    #[test]
    fn empty_logsum_is_zero() {
        assert_eq!(LogSum::new().ln(), f64::NEG_INFINITY);
    }

    #[test]
    fn log_sigmoid_limits() {
        assert_eq!(log_sigmoid(f64::INFINITY), 0.0);
        assert_eq!(log_sigmoid(f64::NEG_INFINITY), f64::NEG_INFINITY);
        assert!((log_sigmoid(0.0) - 0.5f64.ln()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn logsumexp_bounds(a in -500.0..500.0f64, b in -500.0..500.0f64) {
            let l = logsumexp2(a, b);
            let hi = a.max(b);
            prop_assert!(l >= hi);
            prop_assert!(l <= hi + 2.0f64.ln() + 1e-12);
        }

        #[test]
        fn logsumexp_commutes(a in -500.0..500.0f64, b in -500.0..500.0f64) {
            prop_assert_eq!(logsumexp2(a, b), logsumexp2(b, a));
        }
    }
}
