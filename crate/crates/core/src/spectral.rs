//! Zonal spectral basis on S³.
//!
//! Zonal functions are expanded as `u(R) = Σ_{n≥1} c_n e_n(R)` with
//! `e_n(R) = √(2/π) sin(nR)/sin R`, orthonormal for `sin²R dR` on `(0, π)`.
//! Collocation uses the interior points `R_j = jπ/M`, `j = 1..M-1`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;

use crate::fft::SineTransform;

/// √(2/π)
pub const BASIS_SCALE: f64 = 0.797_884_560_802_865_4;

/// Distance from 0 or π below which eigenfunctions use their limit value.
pub const ENDPOINT_EPS: f64 = 1e-12;

pub const DEFAULT_SIGMA: f64 = 0.4;

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralError {
    AngleOutOfRange {
        angle: f64,
    },
    ZeroMode,
    NoModes,
    GridTooSmall {
        modes: usize,
        grid: usize,
        required: usize,
    },
    NonFinite {
        index: usize,
    },
    InvalidExponent {
        p: f64,
    },
}

impl fmt::Display for SpectralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AngleOutOfRange { angle } => write!(f, "angle {angle} outside [0, π]"),
            Self::ZeroMode => f.write_str("mode index must be at least 1"),
            Self::NoModes => f.write_str("mode count must be at least 1"),
            Self::GridTooSmall {
                modes,
                grid,
                required,
            } => write!(
                f,
                "grid size {grid} too small for {modes} modes (need at least {required})"
            ),
            Self::NonFinite { index } => write!(f, "coefficient {} is not finite", index + 1),
            Self::InvalidExponent { p } => write!(f, "exponent {p} must be at least 1"),
        }
    }
}

impl core::error::Error for SpectralError {}

/// Truncation size, collocation size and Sobolev index of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams {
    pub modes: usize,
    pub grid: usize,
    pub sigma: f64,
}

impl SpectralParams {
    /// Oversampling factor required between modes and grid.
    pub const OVERSAMPLING: usize = 4;

    pub fn new(modes: usize, grid: usize) -> Result<Self, SpectralError> {
        if modes == 0 {
            return Err(SpectralError::NoModes);
        }
        let required = Self::OVERSAMPLING * modes;
        if grid < required {
            return Err(SpectralError::GridTooSmall {
                modes,
                grid,
                required,
            });
        }
        Ok(Self {
            modes,
            grid,
            sigma: DEFAULT_SIGMA,
        })
    }

    /// Minimal admissible grid `M = 4N`.
    pub fn with_default_grid(modes: usize) -> Result<Self, SpectralError> {
        Self::new(modes, Self::OVERSAMPLING * modes.max(1))
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }
}

/// Coefficients `c_1..c_N`; index `k` holds `c_{k+1}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ZonalCoeffs {
    coeffs: Vec<Complex64>,
}

impl ZonalCoeffs {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, SpectralError> {
        if let Some(index) = coeffs
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(SpectralError::NonFinite { index });
        }
        Ok(Self { coeffs })
    }

    pub fn zeros(modes: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); modes],
        }
    }

    /// `value · δ_mode` in a space of `modes` coefficients.
    pub fn basis(modes: usize, mode: usize, value: Complex64) -> Self {
        assert!(
            mode >= 1 && mode <= modes,
            "mode {mode} outside 1..={modes}"
        );
        let mut out = Self::zeros(modes);
        out.coeffs[mode - 1] = value;
        out
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self {
            coeffs: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn modes(&self) -> usize {
        self.coeffs.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient `c_n` (1-based).
    pub fn get(&self, n: usize) -> Complex64 {
        self.coeffs[n - 1]
    }

    /// `Re u = Σ Re(c_n) e_n`, valid because every `e_n` is real.
    pub fn real_part(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.re).collect()
    }

    pub fn imag_part(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.im).collect()
    }

    /// First `modes` coefficients, zero-padded if needed.
    pub fn resized(&self, modes: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(modes, Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// `self - other` over the common length; the shorter side is zero-padded.
    pub fn difference(&self, other: &Self) -> Self {
        let len = self.modes().max(other.modes());
        let zero = Complex64::new(0.0, 0.0);
        let coeffs = (0..len)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or(zero)
                    - other.coeffs.get(k).copied().unwrap_or(zero)
            })
            .collect();
        Self { coeffs }
    }
}

/// Samples at `R_j = jπ/M`, `j = 1..M-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    values: Vec<Complex64>,
}

impl GridField {
    pub fn new(values: Vec<Complex64>) -> Result<Self, SpectralError> {
        if values.is_empty() {
            return Err(SpectralError::GridTooSmall {
                modes: 0,
                grid: 1,
                required: 2,
            });
        }
        Ok(Self { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self, SpectralError> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `f(R_j)` of a closure on an `M`-interval grid.
    pub fn from_fn(grid: usize, f: impl Fn(f64) -> Complex64) -> Self {
        assert!(grid >= 2, "grid needs at least two intervals");
        Self {
            values: grid_angles(grid).map(f).collect(),
        }
    }

    /// Grid size `M` (number of intervals).
    pub fn grid(&self) -> usize {
        self.values.len() + 1
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }
}

/// Interior collocation angles `jπ/M`.
pub fn grid_angles(grid: usize) -> impl Iterator<Item = f64> + Clone {
    let step = PI / grid as f64;
    (1..grid).map(move |j| j as f64 * step)
}

/// `e_n(R)` with the analytic limit `±n√(2/π)` at the endpoints.
pub fn eigenfunction(n: usize, angle: f64) -> Result<f64, SpectralError> {
    if n == 0 {
        return Err(SpectralError::ZeroMode);
    }
    if !(0.0..=PI).contains(&angle) {
        return Err(SpectralError::AngleOutOfRange { angle });
    }
    Ok(eigenfunction_unchecked(n, angle))
}

fn eigenfunction_unchecked(n: usize, angle: f64) -> f64 {
    let nf = n as f64;
    if angle < ENDPOINT_EPS {
        BASIS_SCALE * nf
    } else if PI - angle < ENDPOINT_EPS {
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        sign * BASIS_SCALE * nf
    } else {
        BASIS_SCALE * libm::sin(nf * angle) / libm::sin(angle)
    }
}

/// `Σ_k a[k] sin((k+1)x)` by Clenshaw's recurrence.
pub fn sine_series(a: &[f64], x: f64) -> f64 {
    let two_cos = 2.0 * libm::cos(x);
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ak in a.iter().rev() {
        let b0 = ak + two_cos * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    b1 * libm::sin(x)
}

/// Real zonal function `Σ a_n e_n(R)` at a single angle in `[0, π]`.
pub fn zonal_value(a: &[f64], angle: f64) -> f64 {
    if angle < ENDPOINT_EPS {
        BASIS_SCALE
            * a.iter()
                .enumerate()
                .map(|(k, v)| (k + 1) as f64 * v)
                .sum::<f64>()
    } else if PI - angle < ENDPOINT_EPS {
        BASIS_SCALE * endpoint_sum(a)
    } else {
        BASIS_SCALE * sine_series(a, angle) / libm::sin(angle)
    }
}

/// `Σ a_n n (-1)^{n+1}`, i.e. `(Σ a_n e_n)(π) / √(2/π)`.
pub fn endpoint_sum(a: &[f64]) -> f64 {
    a.iter()
        .enumerate()
        .map(|(k, v)| {
            let n = (k + 1) as f64;
            if k % 2 == 0 {
                n * v
            } else {
                -n * v
            }
        })
        .sum()
}

/// Reusable analysis/synthesis pair on an `M`-interval grid.
#[derive(Debug, Clone)]
pub struct ZonalTransform {
    sine: SineTransform,
    sin_angle: Vec<f64>,
}

impl ZonalTransform {
    pub fn new(grid: usize) -> Self {
        assert!(grid >= 2, "grid needs at least two intervals");
        Self {
            sine: SineTransform::new(grid),
            sin_angle: grid_angles(grid).map(libm::sin).collect(),
        }
    }

    pub fn grid(&self) -> usize {
        self.sine.intervals()
    }

    /// `sin R_j` for the interior grid.
    pub fn sin_angles(&self) -> &[f64] {
        &self.sin_angle
    }

    /// Trapezoid weight `(π/M) sin²R_j` of the zonal measure.
    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        let h = PI / self.grid() as f64;
        self.sin_angle.iter().map(move |s| h * s * s)
    }

    pub fn synthesize(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let scaled: Vec<Complex64> = coeffs.iter().map(|c| c * BASIS_SCALE).collect();
        let mut out = self.sine.apply(&scaled);
        for (v, s) in out.iter_mut().zip(&self.sin_angle) {
            *v /= *s;
        }
        out
    }

    pub fn synthesize_real(&self, coeffs: &[f64]) -> Vec<f64> {
        let scaled: Vec<f64> = coeffs.iter().map(|c| c * BASIS_SCALE).collect();
        let mut out = self.sine.apply_real(&scaled);
        for (v, s) in out.iter_mut().zip(&self.sin_angle) {
            *v /= *s;
        }
        out
    }

    /// First `modes` coefficients of a sampled field.
    pub fn analyze(&self, values: &[Complex64], modes: usize) -> Vec<Complex64> {
        assert_eq!(
            values.len(),
            self.sin_angle.len(),
            "field length does not match grid"
        );
        assert!(
            modes < self.grid(),
            "cannot resolve {modes} modes on this grid"
        );
        let weighted: Vec<Complex64> = values
            .iter()
            .zip(&self.sin_angle)
            .map(|(v, s)| v * *s)
            .collect();
        let scale = self.analysis_scale();
        let mut out = self.sine.apply(&weighted);
        out.truncate(modes);
        for v in out.iter_mut() {
            *v *= scale;
        }
        out
    }

    pub fn analyze_real(&self, values: &[f64], modes: usize) -> Vec<f64> {
        assert_eq!(
            values.len(),
            self.sin_angle.len(),
            "field length does not match grid"
        );
        assert!(
            modes < self.grid(),
            "cannot resolve {modes} modes on this grid"
        );
        let weighted: Vec<f64> = values
            .iter()
            .zip(&self.sin_angle)
            .map(|(v, s)| v * s)
            .collect();
        let scale = self.analysis_scale();
        let mut out = self.sine.apply_real(&weighted);
        out.truncate(modes);
        for v in out.iter_mut() {
            *v *= scale;
        }
        out
    }

    fn analysis_scale(&self) -> f64 {
        BASIS_SCALE * PI / self.grid() as f64
    }
}

/// Coefficients `c_1..c_{M-1}` of a sampled field.
pub fn analyze(field: &GridField) -> ZonalCoeffs {
    let grid = field.grid();
    let transform = ZonalTransform::new(grid);
    ZonalCoeffs {
        coeffs: transform.analyze(field.values(), grid - 1),
    }
}

/// Samples of `Σ c_n e_n` on an `M`-interval grid; requires `M > N`.
pub fn synthesize(coeffs: &ZonalCoeffs, grid: usize) -> Result<GridField, SpectralError> {
    let required = coeffs.modes() + 1;
    if grid < required.max(2) {
        return Err(SpectralError::GridTooSmall {
            modes: coeffs.modes(),
            grid,
            required: required.max(2),
        });
    }
    let transform = ZonalTransform::new(grid);
    Ok(GridField {
        values: transform.synthesize(coeffs.as_slice()),
    })
}

/// Smooth cutoff profile: 1 on `|x| ≤ 1/2`, 0 on `|x| ≥ 1`, quintic smoothstep between.
pub fn cutoff_profile(x: f64) -> f64 {
    let x = x.abs();
    if x <= 0.5 {
        1.0
    } else if x >= 1.0 {
        0.0
    } else {
        let y = 2.0 * x - 1.0;
        1.0 - y * y * y * (10.0 - 15.0 * y + 6.0 * y * y)
    }
}

/// Diagonal multipliers on the zonal basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Multiplier {
    /// `c_n ↦ n^s c_n`
    HPower(f64),
    /// `c_n ↦ χ(n²/N²) c_n`
    SmoothCutoff(usize),
    /// `c_n ↦ 1_{n ≤ N} c_n`
    SharpProjector(usize),
}

impl Multiplier {
    pub fn symbol(&self, n: usize) -> f64 {
        match *self {
            Self::HPower(s) => {
                if s == 0.0 {
                    1.0
                } else if s == 1.0 {
                    n as f64
                } else if s == -1.0 {
                    1.0 / n as f64
                } else if s == 2.0 {
                    (n * n) as f64
                } else {
                    libm::pow(n as f64, s)
                }
            }
            Self::SmoothCutoff(cut) => {
                if cut == 0 {
                    0.0
                } else {
                    let ratio = n as f64 / cut as f64;
                    cutoff_profile(ratio * ratio)
                }
            }
            Self::SharpProjector(cut) => {
                if n <= cut {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Symbols for modes `1..=modes`.
    pub fn symbols(&self, modes: usize) -> Vec<f64> {
        (1..=modes).map(|n| self.symbol(n)).collect()
    }

    pub fn apply(&self, u: &ZonalCoeffs) -> ZonalCoeffs {
        ZonalCoeffs {
            coeffs: u
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * self.symbol(k + 1))
                .collect(),
        }
    }
}

pub fn apply_multiplier(spec: Multiplier, u: &ZonalCoeffs) -> ZonalCoeffs {
    spec.apply(u)
}

/// `(Σ_j (π/M) sin²R_j |f_j|^p)^{1/p}`; `p = ∞` gives the max modulus.
pub fn lp_norm(field: &GridField, p: f64) -> Result<f64, SpectralError> {
    let moduli: Vec<f64> = field.values.iter().map(|v| v.norm()).collect();
    lp_norm_moduli(&moduli, p)
}

/// [`lp_norm`] on precomputed moduli (or any real samples).
pub fn lp_norm_moduli(values: &[f64], p: f64) -> Result<f64, SpectralError> {
    if !(p >= 1.0) {
        return Err(SpectralError::InvalidExponent { p });
    }
    if p.is_infinite() {
        return Ok(values.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let grid = values.len() + 1;
    let h = PI / grid as f64;
    let sum: f64 = values
        .iter()
        .zip(grid_angles(grid))
        .map(|(v, angle)| {
            let s = libm::sin(angle);
            s * s * abs_pow(*v, p)
        })
        .sum();
    Ok(libm::pow(h * sum, 1.0 / p))
}

/// `|x|^p` with cheap paths for small even integer exponents.
pub fn abs_pow(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if p == 2.0 {
        a * a
    } else if p == 4.0 {
        let a2 = a * a;
        a2 * a2
    } else if p == 1.0 {
        a
    } else if a == 0.0 {
        0.0
    } else {
        libm::pow(a, p)
    }
}

/// `(Σ n^{2s} |c_n|²)^{1/2}`.
pub fn sobolev_norm(u: &ZonalCoeffs, s: f64) -> f64 {
    let weight = Multiplier::HPower(2.0 * s);
    let sum: f64 = u
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| weight.symbol(k + 1) * c.norm_sqr())
        .sum();
    libm::sqrt(sum)
}

/// `‖H^s u‖_{L^p}` on an `M`-interval grid.
pub fn wsp_norm(u: &ZonalCoeffs, s: f64, p: f64, grid: usize) -> Result<f64, SpectralError> {
    let lifted = Multiplier::HPower(s).apply(u);
    lp_norm(&synthesize(&lifted, grid)?, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pseudo_random_coeffs(modes: usize, salt: u64) -> ZonalCoeffs {
        let mut state = salt.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        ZonalCoeffs::new((0..modes).map(|_| Complex64::new(next(), next())).collect()).unwrap()
    }

    #[test]
    fn eigenfunction_values_and_limits() {
        assert!((eigenfunction(1, 0.3).unwrap() - BASIS_SCALE).abs() < 1e-15);
        assert!(eigenfunction(2, PI / 2.0).unwrap().abs() < 1e-15);
        assert!((eigenfunction(5, 0.0).unwrap() - 5.0 * BASIS_SCALE).abs() < 1e-15);
        assert!((eigenfunction(5, 1e-13).unwrap() - 3.989_422_804_014_327).abs() < 1e-12);
        assert!((eigenfunction(4, PI).unwrap() + 4.0 * BASIS_SCALE).abs() < 1e-15);
        assert!(eigenfunction(3, -0.1).is_err());
        assert!(eigenfunction(3, 3.5).is_err());
        assert!(eigenfunction(0, 1.0).is_err());
    }

    #[test]
    fn zonal_value_agrees_with_eigenfunction_sum() {
        let a = [0.3, -1.2, 0.7, 2.0, -0.1];
        for &angle in &[0.0, 1e-13, 0.2, 1.5, 3.0, PI - 1e-13, PI] {
            let direct: f64 = a
                .iter()
                .enumerate()
                .map(|(k, v)| v * eigenfunction(k + 1, angle).unwrap())
                .sum();
            assert!(
                (zonal_value(&a, angle) - direct).abs() < 1e-11,
                "angle {angle}"
            );
        }
    }

    #[test]
    fn synthesis_of_single_modes() {
        let field = synthesize(&ZonalCoeffs::basis(4, 1, Complex64::new(1.0, 0.0)), 16).unwrap();
        assert!(field
            .values()
            .iter()
            .all(|v| (v.re - BASIS_SCALE).abs() < 1e-14 && v.im.abs() < 1e-15));
        let field = synthesize(&ZonalCoeffs::basis(4, 2, Complex64::new(0.0, 1.0)), 16).unwrap();
        assert!(field.values().iter().all(|v| v.re.abs() < 1e-15));
        assert!(synthesize(&ZonalCoeffs::zeros(8), 8).is_err());
    }

    #[test]
    fn analysis_recovers_basis_vector_and_zero() {
        let field = synthesize(&ZonalCoeffs::basis(8, 3, Complex64::new(1.0, 0.0)), 32).unwrap();
        let c = analyze(&field);
        for (k, v) in c.as_slice().iter().enumerate() {
            let expected = if k == 2 { 1.0 } else { 0.0 };
            assert!((v - Complex64::new(expected, 0.0)).norm() < 1e-13);
        }
        let zero = GridField::from_real(&[0.0; 15]).unwrap();
        assert!(analyze(&zero).as_slice().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn roundtrip_at_minimal_grid() {
        let u = pseudo_random_coeffs(40, 3);
        let back = analyze(&synthesize(&u, 41).unwrap()).resized(40);
        let err = back
            .difference(&u)
            .as_slice()
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "err = {err}");
    }

    #[test]
    fn discrete_orthonormality_against_direct_quadrature() {
        // independent of the FFT path: direct trapezoid of e_m e_n sin²R
        let grid = 256;
        let h = PI / grid as f64;
        for m in [1usize, 7, 30, 63] {
            for n in [1usize, 8, 30, 64] {
                let ip: f64 = grid_angles(grid)
                    .map(|r| {
                        let s = libm::sin(r);
                        eigenfunction(m, r).unwrap() * eigenfunction(n, r).unwrap() * s * s * h
                    })
                    .sum();
                let expected = if m == n { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-12, "m={m} n={n} ip={ip}");
            }
        }
    }

    #[test]
    fn cutoff_profile_shape() {
        assert_eq!(cutoff_profile(0.0), 1.0);
        assert_eq!(cutoff_profile(0.5), 1.0);
        assert_eq!(cutoff_profile(-0.5), 1.0);
        assert_eq!(cutoff_profile(1.0), 0.0);
        assert_eq!(cutoff_profile(1.7), 0.0);
        assert!((cutoff_profile(0.75) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for k in 0..=100 {
            let v = cutoff_profile(0.5 + 0.005 * k as f64);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn multipliers_on_basis_vectors() {
        let n = 7;
        let delta = ZonalCoeffs::basis(10, n, Complex64::new(1.0, 0.0));
        let lifted = Multiplier::HPower(2.0).apply(&delta);
        assert_eq!(lifted.get(n), Complex64::new((n * n) as f64, 0.0));
        let cut = 12;
        for k in 1..=20 {
            let d = ZonalCoeffs::basis(20, k, Complex64::new(1.0, 0.0));
            let once = Multiplier::SmoothCutoff(cut).apply(&d);
            let twice = Multiplier::SmoothCutoff(cut).apply(&once);
            let ratio = k as f64 / cut as f64;
            if ratio <= core::f64::consts::FRAC_1_SQRT_2 {
                assert_eq!(once, d);
            }
            if k > cut {
                assert_eq!(once.get(k), Complex64::new(0.0, 0.0));
            }
            if ratio <= core::f64::consts::FRAC_1_SQRT_2 || k > cut {
                assert_eq!(once, twice);
            }
        }
        let sharp =
            Multiplier::SharpProjector(3).apply(&ZonalCoeffs::from_real(&[1.0, 2.0, 3.0, 4.0]));
        assert_eq!(sharp.real_part(), [1.0, 2.0, 3.0, 0.0]);
    }

    #[test]
    fn norms_of_simple_fields() {
        let e1 = synthesize(&ZonalCoeffs::basis(1, 1, Complex64::new(1.0, 0.0)), 64).unwrap();
        assert!((lp_norm(&e1, 2.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((lp_norm(&e1, f64::INFINITY).unwrap() - BASIS_SCALE).abs() < 1e-15);
        let zero = GridField::from_real(&[0.0; 31]).unwrap();
        assert_eq!(lp_norm(&zero, 3.0).unwrap(), 0.0);
        assert!(lp_norm(&zero, 0.5).is_err());

        let d = ZonalCoeffs::basis(4, 4, Complex64::new(1.0, 0.0));
        assert!((sobolev_norm(&d, 0.0) - 1.0).abs() < 1e-15);
        assert!((sobolev_norm(&d, 1.0) - 4.0).abs() < 1e-15);
        assert!((wsp_norm(&d, 1.0, 2.0, 64).unwrap() - 4.0).abs() < 1e-12);
        let d1 = ZonalCoeffs::basis(1, 1, Complex64::new(1.0, 0.0));
        assert!((wsp_norm(&d1, 2.0, 2.0, 16).unwrap() - 1.0).abs() < 1e-14);
        let u = pseudo_random_coeffs(16, 9);
        let plain = lp_norm(&synthesize(&u, 64).unwrap(), 3.0).unwrap();
        assert_eq!(wsp_norm(&u, 0.0, 3.0, 64).unwrap(), plain);
    }

    #[test]
    fn sobolev_partial_sums_converge_below_one_half() {
        // c_n = √2/n: Σ 2 n^{2s-2}, finite for s < 1/2, ~ 2 log N at s = 1/2
        let coeffs = |modes: usize| {
            ZonalCoeffs::from_real(
                &(1..=modes)
                    .map(|n| libm::sqrt(2.0) / n as f64)
                    .collect::<Vec<_>>(),
            )
        };
        let a = sobolev_norm(&coeffs(2_500), 0.4);
        let b = sobolev_norm(&coeffs(5_000), 0.4);
        let c = sobolev_norm(&coeffs(10_000), 0.4);
        assert!(c - b < b - a);
        assert!((c - b) / c < 0.02);
        let c = sobolev_norm(&coeffs(10_000), 0.5);
        assert!(c > sobolev_norm(&coeffs(5_000), 0.5) + 0.05);
        let partial: f64 = (1..=10_000).map(|n| 2.0 / n as f64).sum();
        assert!((c * c - partial).abs() < 1e-9);
        assert!((c / libm::sqrt(2.0 * libm::log(10_000.0)) - 1.0).abs() < 0.1);
    }
}
