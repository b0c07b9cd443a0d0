//! Small statistics helpers: least-squares lines, means, medians.

use alloc::vec::Vec;

/// Minimum coefficient of determination for a slope to be read at all.
pub const CONCLUSIVE_R_SQUARED: f64 = 0.9;

/// Least-squares line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Abscissa range actually used, in the caller's (untransformed) units.
    pub window: (f64, f64),
    pub n_points: usize,
}

impl FitResult {
    pub fn is_conclusive(&self) -> bool {
        self.r_squared >= CONCLUSIVE_R_SQUARED
    }

    /// The slope, or `None` when the fit is too poor to be read.
    pub fn conclusive_slope(&self) -> Option<f64> {
        self.is_conclusive().then_some(self.slope)
    }
}

/// Fits `ys` against `xs`; `window` is recorded as given. Needs at least two
/// distinct abscissae. A perfectly flat `ys` has `r_squared = 1`.
pub fn linear_fit(xs: &[f64], ys: &[f64], window: (f64, f64)) -> Option<FitResult> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 {
        ((sxy * sxy) / (sxx * syy)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Some(FitResult {
        slope,
        intercept: my - slope * mx,
        r_squared,
        window,
        n_points: n,
    })
}

/// Fit of `ln y` against `ln x`, skipping non-positive values.
pub fn log_log_fit(xs: &[f64], ys: &[f64]) -> Option<FitResult> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (libm::log(*x), libm::log(*y)))
        .unzip();
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    linear_fit(&lx, &ly, (lo, hi))
}

/// Mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl MeanEstimate {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                stderr: f64::NAN,
                samples: 0,
            };
        }
        let nf = n as f64;
        let mean = values.iter().sum::<f64>() / nf;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            stderr: libm::sqrt(var / nf),
            samples: n,
        }
    }

    /// Sample variance `(n-1)`-normalised, recovered from the stderr.
    pub fn variance(&self) -> f64 {
        self.stderr * self.stderr * self.samples as f64
    }

    /// `sqrt(se₁² + se₂²)`.
    pub fn combined_stderr(&self, other: &Self) -> f64 {
        libm::sqrt(self.stderr * self.stderr + other.stderr * other.stderr)
    }
}

/// Median of the finite entries; `None` if there are none.
pub fn median(values: &[f64]) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// `points` values geometrically spaced from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && points >= 2);
    let (a, b) = (libm::log(lo), libm::log(hi));
    (0..points)
        .map(|k| {
            if k + 1 == points {
                hi
            } else {
                libm::exp(a + (b - a) * k as f64 / (points - 1) as f64)
            }
        })
        .collect()
}

/// Half-width of the normal-approximation 95% binomial interval.
pub fn binomial_half_width(p: f64, trials: usize) -> f64 {
    1.96 * libm::sqrt(p * (1.0 - p) / trials.max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_is_recovered() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let fit = linear_fit(&xs, &ys, (1.0, 4.0)).unwrap();
        assert!((fit.slope - 2.5).abs() < 1e-14);
        assert!((fit.intercept + 1.0).abs() < 1e-14);
        assert!((fit.r_squared - 1.0).abs() < 1e-14);
        assert!(fit.is_conclusive());
        assert!(linear_fit(&[1.0], &[1.0], (1.0, 1.0)).is_none());
        assert!(linear_fit(&[2.0, 2.0], &[1.0, 3.0], (2.0, 2.0)).is_none());
    }

    #[test]
    fn power_law_through_log_log_fit() {
        let xs = geometric_grid(1.0, 1000.0, 12);
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * libm::pow(*x, -1.5)).collect();
        let fit = log_log_fit(&xs, &ys).unwrap();
        assert!((fit.slope + 1.5).abs() < 1e-12);
        assert_eq!(fit.window, (1.0, 1000.0));
        assert_eq!(xs[11], 1000.0);
    }

    #[test]
    fn noisy_fit_is_flagged() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let ys = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        let fit = linear_fit(&xs, &ys, (1.0, 6.0)).unwrap();
        assert!(!fit.is_conclusive());
        assert!(fit.conclusive_slope().is_none());
    }

    #[test]
    fn mean_and_median() {
        let est = MeanEstimate::from_values(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(est.mean, 2.5);
        assert!((est.variance() - 5.0 / 3.0).abs() < 1e-14);
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[f64::NAN]), None);
    }
}
