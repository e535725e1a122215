//! Complex discrete Fourier transform.
//!
//! Radix-2 for power-of-two lengths, Bluestein's chirp-z reduction to a
//! power-of-two transform otherwise. Forward transforms are unnormalized
//! (`X_k = sum_j x_j e^{-2 pi i jk/N}`); the inverse carries the `1/N`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::math;

#[derive(Debug)]
enum Kind {
    Radix2 {
        // e^{-2 pi i k / n}, k < n/2
        twiddles: Vec<Complex64>,
    },
    Bluestein {
        inner: Box<FftPlan>,
        // e^{-i pi j^2 / n}
        chirp: Vec<Complex64>,
        // forward transform of the conjugate chirp, zero padded to inner.len()
        filter: Vec<Complex64>,
    },
}

/// Precomputed transform of a fixed length.
#[derive(Debug)]
pub struct FftPlan {
    n: usize,
    kind: Kind,
}

impl FftPlan {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "FFT length must be positive");
        if n.is_power_of_two() {
            let twiddles = (0..n / 2)
                .map(|k| {
                    let theta = -2.0 * PI * k as f64 / n as f64;
                    Complex64::new(math::cos(theta), math::sin(theta))
                })
                .collect();
            return FftPlan {
                n,
                kind: Kind::Radix2 { twiddles },
            };
        }
        let m = (2 * n - 1).next_power_of_two();
        let inner = Box::new(FftPlan::new(m));
        let two_n = 2 * n as u128;
        let chirp: Vec<Complex64> = (0..n)
            .map(|j| {
                // j^2 mod 2n keeps the phase argument small
                let jj = ((j as u128 * j as u128) % two_n) as f64;
                let theta = -PI * jj / n as f64;
                Complex64::new(math::cos(theta), math::sin(theta))
            })
            .collect();
        let mut filter = vec![Complex64::new(0.0, 0.0); m];
        filter[0] = chirp[0].conj();
        for j in 1..n {
            filter[j] = chirp[j].conj();
            filter[m - j] = chirp[j].conj();
        }
        inner.forward(&mut filter);
        FftPlan {
            n,
            kind: Kind::Bluestein {
                inner,
                chirp,
                filter,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n, "buffer length does not match plan");
        match &self.kind {
            Kind::Radix2 { twiddles } => radix2(buf, twiddles),
            Kind::Bluestein {
                inner,
                chirp,
                filter,
            } => {
                let m = inner.len();
                let mut work = vec![Complex64::new(0.0, 0.0); m];
                for (w, (x, c)) in work.iter_mut().zip(buf.iter().zip(chirp)) {
                    *w = x * c;
                }
                inner.forward(&mut work);
                for (w, g) in work.iter_mut().zip(filter) {
                    *w *= g;
                }
                inner.inverse(&mut work);
                for (k, x) in buf.iter_mut().enumerate() {
                    *x = work[k] * chirp[k];
                }
            }
        }
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        for x in buf.iter_mut() {
            *x = x.conj();
        }
        self.forward(buf);
        let scale = 1.0 / self.n as f64;
        for x in buf.iter_mut() {
            *x = x.conj() * scale;
        }
    }
}

fn radix2(buf: &mut [Complex64], twiddles: &[Complex64]) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (j, v)| {
                    let theta = -2.0 * PI * ((j * k) % n) as f64 / n as f64;
                    acc + v * Complex64::new(theta.cos(), theta.sin())
                })
            })
            .collect()
    }

    fn signal(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|j| {
                let t = j as f64;
                Complex64::new((0.3 * t).sin() + 0.1 * t, (1.7 * t).cos())
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_for_power_of_two_and_other_lengths() {
        for &n in &[1usize, 2, 8, 16, 64, 12, 18, 100, 96] {
            let x = signal(n);
            let mut y = x.clone();
            FftPlan::new(n).forward(&mut y);
            let reference = naive_dft(&x);
            let scale = reference.iter().map(|c| c.norm()).fold(1.0, f64::max);
            for (a, b) in y.iter().zip(&reference) {
                assert!((a - b).norm() <= 1e-11 * scale, "n = {n}");
            }
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        for &n in &[32usize, 48] {
            let x = signal(n);
            let plan = FftPlan::new(n);
            let mut y = x.clone();
            plan.forward(&mut y);
            plan.inverse(&mut y);
            for (a, b) in y.iter().zip(&x) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
