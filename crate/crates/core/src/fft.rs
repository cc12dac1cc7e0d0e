//! Radix-2 FFT and spectral calculus on a periodic [`Grid1D`].
//!
//! Grids are restricted to power-of-two sizes, so a plain iterative
//! Cooley-Tukey transform is all that is needed. Twiddles are evaluated
//! directly (not by recurrence) to keep round-off at the 1e-16 level.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::fields::Grid1D;

#[derive(Debug, Clone)]
pub struct FftPlan {
    n: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl FftPlan {
    /// Panics if `n` is not a power of two.
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "FFT size must be a power of two");
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        let twiddles = (0..n / 2)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(libm::cos(angle), libm::sin(angle))
            })
            .collect();
        FftPlan { n, twiddles, bitrev }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalized forward transform, `X_k = Σ x_j e^{-2πi jk/n}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    /// Inverse transform including the `1/n` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, true);
        let scale = 1.0 / self.n as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        assert_eq!(data.len(), n, "buffer length does not match FFT plan");
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

/// FFT plan plus the angular wavenumbers of a grid, in FFT ordering.
#[derive(Debug, Clone)]
pub struct Spectral {
    plan: FftPlan,
    k: Vec<f64>,
}

impl Spectral {
    pub fn new(grid: &Grid1D) -> Self {
        let n = grid.len();
        let dk = 2.0 * PI / grid.length();
        let k = (0..n)
            .map(|j| if j <= n / 2 { j as f64 * dk } else { (j as f64 - n as f64) * dk })
            .collect();
        Spectral { plan: FftPlan::new(n), k }
    }

    pub fn plan(&self) -> &FftPlan {
        &self.plan
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    fn nyquist(&self) -> usize {
        self.k.len() / 2
    }

    /// First derivative. The Nyquist mode is dropped, as usual for odd-order
    /// spectral derivatives.
    pub fn derivative(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.plan.forward(&mut buf);
        let nyq = self.nyquist();
        for (j, (z, &k)) in buf.iter_mut().zip(&self.k).enumerate() {
            *z = if j == nyq { Complex64::new(0.0, 0.0) } else { *z * Complex64::new(0.0, k) };
        }
        self.plan.inverse(&mut buf);
        buf
    }

    pub fn second_derivative(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.plan.forward(&mut buf);
        for (z, &k) in buf.iter_mut().zip(&self.k) {
            *z *= -k * k;
        }
        self.plan.inverse(&mut buf);
        buf
    }

    pub fn derivative_real(&self, values: &[f64]) -> Vec<f64> {
        let buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.derivative(&buf).into_iter().map(|z| z.re).collect()
    }

    pub fn second_derivative_real(&self, values: &[f64]) -> Vec<f64> {
        let buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.second_derivative(&buf).into_iter().map(|z| z.re).collect()
    }

    /// Cumulative integral `∫_{x_min}^{x_i} f dx` of a periodic real sample.
    ///
    /// The mean of `f` integrates to a linear ramp; the fluctuating part is
    /// integrated spectrally and shifted so the result vanishes at `x_min`.
    pub fn cumulative_integral(&self, values: &[f64], dx: f64) -> Vec<f64> {
        let n = values.len();
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.plan.forward(&mut buf);
        let mean = buf[0].re / n as f64;
        let nyq = self.nyquist();
        for (j, (z, &k)) in buf.iter_mut().zip(&self.k).enumerate() {
            *z = if j == 0 || j == nyq { Complex64::new(0.0, 0.0) } else { *z / Complex64::new(0.0, k) };
        }
        self.plan.inverse(&mut buf);
        let origin = buf[0].re;
        buf.iter()
            .enumerate()
            .map(|(i, z)| mean * dx * i as f64 + (z.re - origin))
            .collect()
    }
}
