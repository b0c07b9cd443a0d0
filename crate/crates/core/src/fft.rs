//! Complex FFT (iterative radix-2, Bluestein for other lengths) and the
//! type-I discrete sine transform built on it.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

/// Precomputed plan for a forward/backward complex DFT of fixed length.
///
/// `forward` computes `X_k = Σ_j x_j e^{-2πi jk/n}`; `backward` uses the
/// opposite sign. Neither is normalized.
#[derive(Debug, Clone)]
pub struct Fft {
    len: usize,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Trivial,
    Radix2(Radix2),
    Bluestein(Bluestein),
}

#[derive(Debug, Clone)]
struct Radix2 {
    len: usize,
    // e^{-2πik/len} for k < len/2
    twiddles: Vec<Complex64>,
    bitrev: Vec<u32>,
}

#[derive(Debug, Clone)]
struct Bluestein {
    inner: Radix2,
    // e^{-iπk²/n}
    chirp: Vec<Complex64>,
    // forward transform of the conjugate chirp, scaled by 1/inner.len
    kernel: Vec<Complex64>,
}

impl Fft {
    pub fn new(len: usize) -> Self {
        let kind = if len <= 1 {
            Kind::Trivial
        } else if len.is_power_of_two() {
            Kind::Radix2(Radix2::new(len))
        } else {
            Kind::Bluestein(Bluestein::new(len))
        };
        Self { len, kind }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.run(buf, false);
    }

    pub fn backward(&self, buf: &mut [Complex64]) {
        self.run(buf, true);
    }

    fn run(&self, buf: &mut [Complex64], inverse: bool) {
        assert_eq!(buf.len(), self.len, "buffer length does not match plan");
        match &self.kind {
            Kind::Trivial => {}
            Kind::Radix2(plan) => plan.run(buf, inverse),
            Kind::Bluestein(plan) => plan.run(buf, inverse),
        }
    }
}

/// Twiddle `e^{-2πi k/n}` evaluated from a reduced angle for accuracy.
fn root_of_unity(k: usize, n: usize) -> Complex64 {
    let k = k % n;
    let angle = -2.0 * PI * (k as f64) / (n as f64);
    Complex64::new(libm::cos(angle), libm::sin(angle))
}

impl Radix2 {
    fn new(len: usize) -> Self {
        debug_assert!(len.is_power_of_two() && len >= 2);
        let bits = len.trailing_zeros();
        let twiddles = (0..len / 2).map(|k| root_of_unity(k, len)).collect();
        let bitrev = (0..len as u32)
            .map(|i| i.reverse_bits() >> (32 - bits))
            .collect();
        Self {
            len,
            twiddles,
            bitrev,
        }
    }

    fn run(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.len;
        for i in 0..n {
            let j = self.bitrev[i] as usize;
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let w = if inverse { w.conj() } else { w };
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
    }
}

impl Bluestein {
    fn new(len: usize) -> Self {
        let inner_len = (2 * len - 1).next_power_of_two();
        let inner = Radix2::new(inner_len);
        // k² mod 2n keeps the chirp angle small
        let chirp: Vec<Complex64> = (0..len)
            .map(|k| {
                let k2 = (k as u128 * k as u128 % (2 * len as u128)) as usize;
                root_of_unity(k2, 2 * len)
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); inner_len];
        kernel[0] = chirp[0].conj();
        for k in 1..len {
            kernel[k] = chirp[k].conj();
            kernel[inner_len - k] = chirp[k].conj();
        }
        inner.run(&mut kernel, false);
        let scale = 1.0 / inner_len as f64;
        for v in kernel.iter_mut() {
            *v *= scale;
        }
        Self {
            inner,
            chirp,
            kernel,
        }
    }

    fn run(&self, buf: &mut [Complex64], inverse: bool) {
        let n = buf.len();
        let m = self.inner.len;
        let mut work = vec![Complex64::new(0.0, 0.0); m];
        // the backward transform is the conjugate of the forward transform of the conjugate
        for k in 0..n {
            let x = if inverse { buf[k].conj() } else { buf[k] };
            work[k] = x * self.chirp[k];
        }
        self.inner.run(&mut work, false);
        for (w, h) in work.iter_mut().zip(&self.kernel) {
            *w *= h;
        }
        self.inner.run(&mut work, true);
        for k in 0..n {
            let y = work[k] * self.chirp[k];
            buf[k] = if inverse { y.conj() } else { y };
        }
    }
}

/// Type-I discrete sine transform on `m` intervals:
/// `s_j = Σ_{n=1}^{m-1} b_n sin(nπj/m)` for `j = 1..m-1`.
///
/// Computed from one complex FFT of length `2m` applied to the odd
/// extension of `b`; complex inputs transform their real and imaginary
/// parts independently.
#[derive(Debug, Clone)]
pub struct SineTransform {
    intervals: usize,
    fft: Fft,
}

impl SineTransform {
    pub fn new(intervals: usize) -> Self {
        assert!(
            intervals >= 2,
            "sine transform needs at least two intervals"
        );
        Self {
            intervals,
            fft: Fft::new(2 * intervals),
        }
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// `coeffs[k]` multiplies `sin((k+1)x)`; at most `m-1` entries.
    /// Returns the `m-1` interior samples.
    pub fn apply(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let m = self.intervals;
        assert!(
            coeffs.len() < m,
            "sine series longer than the grid supports"
        );
        let mut work = vec![Complex64::new(0.0, 0.0); 2 * m];
        for (k, &b) in coeffs.iter().enumerate() {
            work[k + 1] = b;
            work[2 * m - k - 1] = -b;
        }
        self.fft.forward(&mut work);
        // Y_j = -2i s_j
        work[1..m]
            .iter()
            .map(|y| Complex64::new(-0.5 * y.im, 0.5 * y.re))
            .collect()
    }

    /// Real-coefficient variant of [`SineTransform::apply`].
    pub fn apply_real(&self, coeffs: &[f64]) -> Vec<f64> {
        let m = self.intervals;
        assert!(
            coeffs.len() < m,
            "sine series longer than the grid supports"
        );
        let mut work = vec![Complex64::new(0.0, 0.0); 2 * m];
        for (k, &b) in coeffs.iter().enumerate() {
            work[k + 1] = Complex64::new(b, 0.0);
            work[2 * m - k - 1] = Complex64::new(-b, 0.0);
        }
        self.fft.forward(&mut work);
        work[1..m].iter().map(|y| -0.5 * y.im).collect()
    }

    /// Two real series in one complex transform.
    pub fn apply_real_pair(&self, first: &[f64], second: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let len = first.len().max(second.len());
        let packed: Vec<Complex64> = (0..len)
            .map(|k| {
                Complex64::new(
                    first.get(k).copied().unwrap_or(0.0),
                    second.get(k).copied().unwrap_or(0.0),
                )
            })
            .collect();
        let out = self.apply(&packed);
        out.iter().map(|z| (z.re, z.im)).unzip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .fold(Complex64::new(0.0, 0.0), |acc, (j, &v)| {
                        let angle = sign * 2.0 * PI * ((j * k) % n) as f64 / n as f64;
                        acc + v * Complex64::new(libm::cos(angle), libm::sin(angle))
                    })
            })
            .collect()
    }

    fn signal(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|j| {
                let x = j as f64;
                Complex64::new(libm::sin(0.37 * x * x + 1.0), libm::cos(1.3 * x) - 0.25)
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_for_assorted_lengths() {
        for &n in &[1usize, 2, 3, 5, 8, 12, 17, 64, 100, 255] {
            let x = signal(n);
            for (sign, inverse) in [(-1.0, false), (1.0, true)] {
                let mut y = x.clone();
                let plan = Fft::new(n);
                if inverse {
                    plan.backward(&mut y);
                } else {
                    plan.forward(&mut y);
                }
                let reference = naive_dft(&x, sign);
                let err = y
                    .iter()
                    .zip(&reference)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(err < 1e-10 * n as f64, "n = {n}, err = {err}");
            }
        }
    }

    #[test]
    fn sine_transform_matches_direct_sum() {
        for &m in &[4usize, 7, 16, 30] {
            let dst = SineTransform::new(m);
            let coeffs: Vec<Complex64> = (1..m)
                .map(|k| Complex64::new(1.0 / k as f64, libm::sin(k as f64)))
                .collect();
            let fast = dst.apply(&coeffs);
            for j in 1..m {
                let direct = coeffs
                    .iter()
                    .enumerate()
                    .fold(Complex64::new(0.0, 0.0), |acc, (k, &b)| {
                        acc + b * libm::sin(((k + 1) * j) as f64 * PI / m as f64)
                    });
                assert!((fast[j - 1] - direct).norm() < 1e-12);
            }
            let re: Vec<f64> = coeffs.iter().map(|c| c.re).collect();
            let im: Vec<f64> = coeffs.iter().map(|c| c.im).collect();
            let (a, b) = dst.apply_real_pair(&re, &im);
            let single = dst.apply_real(&re);
            for j in 0..m - 1 {
                assert!((a[j] - fast[j].re).abs() < 1e-12);
                assert!((b[j] - fast[j].im).abs() < 1e-12);
                assert!((single[j] - a[j]).abs() < 1e-12);
            }
        }
    }
}
