//! Small numerical building blocks shared by the science modules.

use alloc::vec::Vec;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.carry += (self.sum - t) + value;
        } else {
            self.carry += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl core::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Trapezoid rule over `values[lo..=hi]` with uniform spacing `dx`.
pub fn trapezoid(values: &[f64], lo: usize, hi: usize, dx: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let mut acc = CompensatedSum::new();
    acc.add(0.5 * values[lo]);
    for v in &values[lo + 1..hi] {
        acc.add(*v);
    }
    acc.add(0.5 * values[hi]);
    acc.value() * dx
}

/// A real number kept as sign and natural log of magnitude, so series with
/// huge or tiny terms can be summed without overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMagnitude {
    pub sign: f64,
    pub ln_abs: f64,
}

impl LogMagnitude {
    pub const ZERO: LogMagnitude = LogMagnitude { sign: 0.0, ln_abs: f64::NEG_INFINITY };

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            LogMagnitude { sign: v.signum(), ln_abs: libm::log(v.abs()) }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    pub fn scaled(self, factor: f64) -> Self {
        if self.is_zero() || factor == 0.0 {
            return Self::ZERO;
        }
        LogMagnitude { sign: self.sign * factor.signum(), ln_abs: self.ln_abs + libm::log(factor.abs()) }
    }

    pub fn log10_abs(&self) -> f64 {
        self.ln_abs / core::f64::consts::LN_10
    }
}

/// Sum of signed log-magnitude terms, scaled by the largest term.
pub fn log_sum(terms: &[LogMagnitude]) -> LogMagnitude {
    let max = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| t.ln_abs)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return LogMagnitude::ZERO;
    }
    let scaled: CompensatedSum = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| t.sign * libm::exp(t.ln_abs - max))
        .collect();
    let s = scaled.value();
    if s == 0.0 {
        LogMagnitude::ZERO
    } else {
        LogMagnitude { sign: s.signum(), ln_abs: max + libm::log(s.abs()) }
    }
}

/// Number of eigenvalues of the symmetric tridiagonal matrix strictly below
/// `shift` (Sturm sequence count via the LDLᵀ pivots).
fn sturm_count(diag: &[f64], off: &[f64], shift: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - shift;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let denom = if q == 0.0 { f64::EPSILON * (off[i - 1].abs() + 1.0) } else { q };
        q = diag[i] - shift - off[i - 1] * off[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `k` eigenvalues of a symmetric tridiagonal matrix by bisection.
///
/// `off[i]` couples rows `i` and `i + 1`.
pub fn tridiagonal_lowest_eigenvalues(diag: &[f64], off: &[f64], k: usize) -> Vec<f64> {
    assert_eq!(off.len() + 1, diag.len());
    let k = k.min(diag.len());
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..diag.len() {
        let radius = if i > 0 { off[i - 1].abs() } else { 0.0 } + off.get(i).map_or(0.0, |v| v.abs());
        lo = lo.min(diag[i] - radius);
        hi = hi.max(diag[i] + radius);
    }
    (0..k)
        .map(|index| {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if sturm_count(diag, off, mid) > index {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}
