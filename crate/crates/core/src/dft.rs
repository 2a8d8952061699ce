//! Arbitrary-length DFT by Bluestein's chirp-z algorithm.
//!
//! Computes `X[j] = sum_k x[k] e(sign * j k / n)` for any `n >= 1` by
//! rewriting `jk = (j^2 + k^2 - (j - k)^2) / 2`, which turns the transform
//! into a linear convolution with the chirp `e(-sign * m^2 / 2n)`. The
//! convolution is evaluated with power-of-two FFTs of length at least
//! `2n - 1`.
//!
//! The chirp phases are reduced exactly in integer arithmetic (`m^2 mod 2n`)
//! before conversion to floating point, so accuracy does not degrade for
//! large `n`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::arith::unit_root;

/// Sign of the exponent in the transform kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `e(-jk/n)`
    Forward,
    /// `e(+jk/n)`, without the `1/n` normalization
    Backward,
}

/// A reusable plan for transforms of one length.
pub struct ChirpZ {
    n: usize,
    padded: usize,
    /// `chirp[m] = e(m^2 / 2n)` for `m < n`.
    chirp: Vec<Complex64>,
    /// FFT of the convolution kernel, one per direction.
    kernel_fwd: Vec<Complex64>,
    kernel_bwd: Vec<Complex64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for ChirpZ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChirpZ").field("n", &self.n).field("padded", &self.padded).finish()
    }
}

impl ChirpZ {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "transform length must be positive");
        let padded = (2 * n - 1).next_power_of_two();
        let two_n = 2 * n as u64;
        let chirp: Vec<Complex64> = (0..n as u64)
            .map(|m| unit_root((m * m) % two_n, two_n))
            .collect();

        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(padded);
        let ifft = planner.plan_fft_inverse(padded);

        // kernel laid out circularly for indices -(n-1)..(n-1)
        let build = |conj: bool| {
            let mut b = vec![Complex64::new(0.0, 0.0); padded];
            for m in 0..n {
                let c = if conj { chirp[m].conj() } else { chirp[m] };
                b[m] = c;
                if m > 0 {
                    b[padded - m] = c;
                }
            }
            fft.process(&mut b);
            b
        };
        // X[j] = w^{j^2/2} sum_k (x_k w^{k^2/2}) w^{-(j-k)^2/2} with w = e(sign/n);
        // the kernel is w^{-m^2/2}: chirp for Forward, conj(chirp) for Backward.
        let kernel_fwd = build(false);
        let kernel_bwd = build(true);
        Self { n, padded, chirp, kernel_fwd, kernel_bwd, fft, ifft }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn transform(&self, input: &[Complex64], direction: Direction) -> Vec<Complex64> {
        assert_eq!(input.len(), self.n, "input length does not match the plan");
        let n = self.n;
        // w^{k^2/2} for the transform sign
        let pre = |m: usize| match direction {
            Direction::Forward => self.chirp[m].conj(),
            Direction::Backward => self.chirp[m],
        };
        let mut a = vec![Complex64::new(0.0, 0.0); self.padded];
        for k in 0..n {
            a[k] = input[k] * pre(k);
        }
        self.fft.process(&mut a);
        let kernel = match direction {
            Direction::Forward => &self.kernel_fwd,
            Direction::Backward => &self.kernel_bwd,
        };
        for (x, b) in a.iter_mut().zip(kernel) {
            *x *= b;
        }
        self.ifft.process(&mut a);
        let scale = 1.0 / self.padded as f64;
        (0..n).map(|j| a[j] * scale * pre(j)).collect()
    }
}

/// One-shot transform; builds a plan internally.
pub fn dft(input: &[Complex64], direction: Direction) -> Vec<Complex64> {
    ChirpZ::new(input.len()).transform(input, direction)
}

/// Direct O(n^2) evaluation, used as an oracle and for tiny lengths.
pub fn naive_dft(input: &[Complex64], direction: Direction) -> Vec<Complex64> {
    let n = input.len() as u64;
    (0..n)
        .map(|j| {
            input
                .iter()
                .enumerate()
                .map(|(k, &x)| {
                    let jk = (j * k as u64) % n;
                    let exp = match direction {
                        Direction::Forward => (n - jk) % n,
                        Direction::Backward => jk,
                    };
                    x * unit_root(exp, n)
                })
                .sum()
        })
        .collect()
}
