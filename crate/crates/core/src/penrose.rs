//! Penrose chart between Minkowski `(t, r)` and the Einstein cylinder
//! `(T, R)`, the conformal factor, and radial fields on R³.
//!
//! With `a = atan(t + r)` and `b = atan(t - r)`: `T = a + b`, `R = a - b`,
//! `Ω = cos T + cos R = 2 cos a cos b`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt;

use crate::spectral::{zonal_value, Multiplier, ZonalCoeffs};

#[derive(Debug, Clone, PartialEq)]
pub enum PenroseError {
    /// `cos T + cos R ≤ 0`: the point is not the image of a Minkowski point.
    OutsideChart {
        cyl_time: f64,
        cyl_angle: f64,
    },
    UnsortedGrid,
    LengthMismatch {
        grid: usize,
        values: usize,
    },
    NonFinite,
}

impl fmt::Display for PenroseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OutsideChart {
                cyl_time,
                cyl_angle,
            } => {
                write!(
                    f,
                    "(T, R) = ({cyl_time}, {cyl_angle}) lies outside the Minkowski chart"
                )
            }
            Self::UnsortedGrid => {
                f.write_str("radial grid must be strictly increasing with at least two points")
            }
            Self::LengthMismatch { grid, values } => {
                write!(
                    f,
                    "radial grid has {grid} points but {values} values were given"
                )
            }
            Self::NonFinite => f.write_str("radial field contains non-finite values"),
        }
    }
}

impl core::error::Error for PenroseError {}

/// A Minkowski point with its cylinder image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenrosePoint {
    pub t: f64,
    pub r: f64,
    pub cyl_time: f64,
    pub cyl_angle: f64,
    pub omega: f64,
}

/// Image of `(t, r)`, `r ≥ 0`, on the cylinder.
pub fn forward_map(t: f64, r: f64) -> PenrosePoint {
    debug_assert!(r >= 0.0, "radius must be non-negative");
    // tan T = 2t/(1 - (t+r)(t-r)), tan R = 2r/(1 + (t+r)(t-r)); atan2 keeps
    // full relative accuracy where a ± b would cancel
    let (p, m) = (t + r, t - r);
    PenrosePoint {
        t,
        r,
        cyl_time: libm::atan2(2.0 * t, 1.0 - p * m),
        cyl_angle: libm::atan2(2.0 * r, 1.0 + p * m),
        omega: conformal_factor(t, r),
    }
}

/// `(t, r)` for a cylinder point inside the chart.
pub fn inverse_map(cyl_time: f64, cyl_angle: f64) -> Result<(f64, f64), PenroseError> {
    let a = 0.5 * (cyl_time + cyl_angle);
    let b = 0.5 * (cyl_time - cyl_angle);
    if !(a.abs() < FRAC_PI_2 && b.abs() < FRAC_PI_2) || cyl_angle < 0.0 {
        return Err(PenroseError::OutsideChart {
            cyl_time,
            cyl_angle,
        });
    }
    // t ± r = tan(a), tan(b); equal to sin T/Ω and sin R/Ω
    let (ta, tb) = (libm::tan(a), libm::tan(b));
    Ok((0.5 * (ta + tb), 0.5 * (ta - tb)))
}

/// `Ω = 2/√((1+(t+r)²)(1+(t-r)²))`.
pub fn conformal_factor(t: f64, r: f64) -> f64 {
    let (p, m) = (t + r, t - r);
    2.0 / libm::sqrt((1.0 + p * p) * (1.0 + m * m))
}

/// Truncated factor `max(cos T + cos R, 0)` used on the whole cylinder.
pub fn omega_tilde(cyl_time: f64, cyl_angle: f64) -> f64 {
    // product form avoids cancellation near the null boundary
    let v = 2.0 * libm::cos(0.5 * (cyl_time + cyl_angle)) * libm::cos(0.5 * (cyl_time - cyl_angle));
    v.max(0.0)
}

/// Radius `r(t, R)` at fixed Minkowski time, inverting `R(t, ·)`.
///
/// Solves `sin R · r² + 2 cos R · r - sin R (1 + t²) = 0` for the positive root.
pub fn radius_at_angle(t: f64, cyl_angle: f64) -> f64 {
    let (s, c) = (libm::sin(cyl_angle), libm::cos(cyl_angle));
    if s <= 0.0 {
        return if c > 0.0 { 0.0 } else { f64::INFINITY };
    }
    let k = 1.0 + t * t;
    let disc = libm::sqrt(c * c + s * s * k);
    if c > 0.0 {
        s * k / (c + disc)
    } else {
        (disc - c) / s
    }
}

/// `∂R/∂r` at fixed `t`.
pub fn angle_derivative(t: f64, r: f64) -> f64 {
    let (p, m) = (t + r, t - r);
    1.0 / (1.0 + p * p) + 1.0 / (1.0 + m * m)
}

/// Sampled radial function on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    r_grid: Vec<f64>,
    values: Vec<f64>,
}

impl RadialField {
    pub fn new(r_grid: Vec<f64>, values: Vec<f64>) -> Result<Self, PenroseError> {
        validate_grid(&r_grid)?;
        if r_grid.len() != values.len() {
            return Err(PenroseError::LengthMismatch {
                grid: r_grid.len(),
                values: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(PenroseError::NonFinite);
        }
        Ok(Self { r_grid, values })
    }

    pub fn r_grid(&self) -> &[f64] {
        &self.r_grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn validate_grid(r_grid: &[f64]) -> Result<(), PenroseError> {
    if r_grid.len() < 2 || r_grid.windows(2).any(|w| !(w[1] > w[0])) || r_grid[0] < 0.0 {
        return Err(PenroseError::UnsortedGrid);
    }
    Ok(())
}

/// Default radial grid: 4096 log-spaced radii on `[1e-3, 1e4]`.
pub fn default_radial_grid() -> Vec<f64> {
    crate::stats::geometric_grid(1e-3, 1e4, 4096)
}

/// Time-zero data `(f₀, f₁)` of the physical wave from cylinder data `u₀`.
///
/// `f₀(r) = (2/(1+r²)) Re u₀(2 atan r)` and
/// `f₁(r) = -(2/(1+r²))² (H Im u₀)(2 atan r)`.
pub fn pt_initial_data(
    u0: &ZonalCoeffs,
    r_grid: &[f64],
) -> Result<(RadialField, RadialField), PenroseError> {
    validate_grid(r_grid)?;
    let re = u0.real_part();
    let h_im = Multiplier::HPower(1.0)
        .apply(&ZonalCoeffs::from_real(&u0.imag_part()))
        .real_part();
    let (mut f0, mut f1) = (
        Vec::with_capacity(r_grid.len()),
        Vec::with_capacity(r_grid.len()),
    );
    for &r in r_grid {
        let angle = 2.0 * libm::atan(r);
        let weight = 2.0 / (1.0 + r * r);
        f0.push(weight * zonal_value(&re, angle));
        f1.push(-weight * weight * zonal_value(&h_im, angle));
    }
    Ok((
        RadialField::new(r_grid.to_vec(), f0)?,
        RadialField::new(r_grid.to_vec(), f1)?,
    ))
}

/// Anything that can produce coefficients at an arbitrary cylinder time.
pub trait CoefficientPath {
    fn coeffs_at(&self, cyl_time: f64) -> ZonalCoeffs;
}

impl<F: Fn(f64) -> ZonalCoeffs> CoefficientPath for F {
    fn coeffs_at(&self, cyl_time: f64) -> ZonalCoeffs {
        self(cyl_time)
    }
}

/// `f(t, r_j) = Ω(t, r_j) · Re u(T(t, r_j))(R(t, r_j))`.
pub fn physical_field<P: CoefficientPath + ?Sized>(
    path: &P,
    t: f64,
    r_grid: &[f64],
) -> Result<RadialField, PenroseError> {
    validate_grid(r_grid)?;
    let values = r_grid.iter().map(|&r| physical_value(path, t, r)).collect();
    RadialField::new(r_grid.to_vec(), values)
}

/// Single-point version of [`physical_field`].
pub fn physical_value<P: CoefficientPath + ?Sized>(path: &P, t: f64, r: f64) -> f64 {
    let point = forward_map(t, r);
    let re = path.coeffs_at(point.cyl_time).real_part();
    point.omega * zonal_value(&re, point.cyl_angle.clamp(0.0, PI))
}

/// `(∫ |((1+r²)/2)^{m/2} f|² r² dr)^{1/2}`.
///
/// Trapezoid rule in `ln r` over the grid nodes, which is spectrally
/// accurate for the log-spaced grids used throughout. The segment
/// `[0, r_0]` is closed with the leading-order term `g(r_0) r_0/3` of an
/// integrand `g ∝ r²` at the origin.
pub fn weighted_l2_norm(f: &RadialField, m: f64) -> f64 {
    let integrand: Vec<f64> = f
        .r_grid
        .iter()
        .zip(&f.values)
        .map(|(&r, &v)| libm::pow(0.5 * (1.0 + r * r), m) * v * v * r * r)
        .collect();
    let r0 = f.r_grid[0];
    let mut sum = integrand[0] * r0 / 3.0;
    if r0 > 0.0 {
        for k in 1..integrand.len() {
            let (ra, rb) = (f.r_grid[k - 1], f.r_grid[k]);
            let ds = libm::log(rb / ra);
            sum += 0.5 * ds * (integrand[k] * rb + integrand[k - 1] * ra);
        }
    } else {
        for k in 1..integrand.len() {
            sum += 0.5 * (f.r_grid[k] - f.r_grid[k - 1]) * (integrand[k] + integrand[k - 1]);
        }
    }
    libm::sqrt(sum)
}
