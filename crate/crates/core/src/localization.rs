//! Band-limited localized densities and their positive-frequency parts.
//!
//! Every distribution is regularized by a sharp cutoff at `k_max`. The
//! physical density is always `ρ⁺ + conj(ρ⁺)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::density::{centroid, DensityField};
use crate::error::{Error, Result};
use crate::numeric::{integrate, integrate_complex, pairwise_sum, sinc};
use crate::units::Units;

fn check_band(k_max: f64) -> Result<()> {
    if !(k_max.is_finite() && k_max > 0.0) {
        return Err(Error::Domain(format!("k_max must be positive, got {k_max}")));
    }
    Ok(())
}

/// ρ⁺(u) = ∫₀^{k_max} dk e^{iku} / (2πA), with `u = Δx − cΔt`.
///
/// Written as `k_max/(2πA)·[sinc(θ) + i(θ/2)sinc²(θ/2)]`, `θ = k_max·u`,
/// which stays accurate through `u = 0`.
pub fn localized_density_1d(u: f64, k_max: f64, area: f64) -> Result<Complex64> {
    check_band(k_max)?;
    if !(area.is_finite() && area > 0.0) {
        return Err(Error::Domain(format!("area must be positive, got {area}")));
    }
    let theta = k_max * u;
    let half = sinc(0.5 * theta);
    let scale = k_max / (2.0 * PI * area);
    Ok(Complex64::new(sinc(theta), 0.5 * theta * half * half) * scale)
}

/// sin(k_max u)/(πAu).
pub fn physical_density_1d(u: f64, k_max: f64, area: f64) -> Result<f64> {
    Ok(2.0 * localized_density_1d(u, k_max, area)?.re)
}

/// Positive-frequency part of the 3D localized density at radius `r` and
/// time separation `dt`:
/// `(1/4π²) ∫₀^{k_max} dk k² sinc(kr) e^{-ickΔt}`, by adaptive quadrature.
pub fn localized_density_3d(r: f64, dt: f64, k_max: f64, units: &Units) -> Result<Complex64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    check_band(k_max)?;
    let ct = units.c * dt;
    // One initial panel per half-period of the fastest oscillation.
    let panels = ((k_max * (r + ct.abs())) / PI).ceil() as usize + 4;
    let q = integrate_complex(
        |k| Complex64::from_polar(k * k * sinc(k * r), -k * ct),
        0.0,
        k_max,
        panels,
        1e-14 * k_max.powi(3),
        1e-12,
        50_000,
    );
    Ok(q.value / (4.0 * PI * PI))
}

/// Discrete-mode version of the 1D positive-frequency density in a box of
/// length `box_length`: `(1/(L·A)) Σ_{0 < k_l ≤ k_max} e^{i k_l u}`.
pub fn box_mode_density_1d(u: f64, k_max: f64, box_length: f64, area: f64) -> Result<Complex64> {
    check_band(k_max)?;
    if !(box_length > 0.0 && area > 0.0) {
        return Err(Error::Domain("box length and area must be positive".into()));
    }
    let dk = 2.0 * PI / box_length;
    let modes = (k_max / dk).floor() as usize;
    let (re, im): (Vec<f64>, Vec<f64>) = (1..=modes)
        .map(|l| {
            let phase = l as f64 * dk * u;
            (phase.cos(), phase.sin())
        })
        .unzip();
    Ok(Complex64::new(pairwise_sum(&re), pairwise_sum(&im)) / (box_length * area))
}

/// Positive-frequency density sampled on a uniform coordinate grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitDensity {
    pub coords: Vec<f64>,
    pub rho_plus: Vec<Complex64>,
}

impl SplitDensity {
    /// Samples the 1D localized ρ⁺ at `points` nodes spanning `[-extent, extent]`.
    pub fn localized_1d(k_max: f64, area: f64, extent: f64, points: usize) -> Result<Self> {
        if points < 2 || extent.is_nan() || extent <= 0.0 {
            return Err(Error::Domain("need at least two points and a positive extent".into()));
        }
        let step = 2.0 * extent / (points - 1) as f64;
        let coords: Vec<f64> = (0..points).map(|i| -extent + step * i as f64).collect();
        let rho_plus = coords
            .iter()
            .map(|&u| localized_density_1d(u, k_max, area))
            .collect::<Result<_>>()?;
        Ok(SplitDensity { coords, rho_plus })
    }

    /// ρ⁺ + conj(ρ⁺).
    pub fn physical(&self) -> Vec<f64> {
        self.rho_plus.iter().map(|z| 2.0 * z.re).collect()
    }

    pub fn physical_profile(&self) -> LineDensity {
        LineDensity {
            coords: self.coords.clone(),
            values: self.physical(),
        }
    }
}

/// A real density on a uniform, non-periodic coordinate grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LineDensity {
    pub coords: Vec<f64>,
    pub values: Vec<f64>,
}

impl LineDensity {
    /// Σ x ρ / Σ ρ, `None` when the total vanishes.
    pub fn centroid(&self) -> Option<f64> {
        let total = pairwise_sum(&self.values);
        if total == 0.0 {
            return None;
        }
        let moments: Vec<f64> = self.coords.iter().zip(&self.values).map(|(x, v)| x * v).collect();
        Some(pairwise_sum(&moments) / total)
    }
}

/// Anything whose mass outside a window can be measured.
pub trait MassProfile {
    /// (signed distance from the window centre, mass weight) per sample,
    /// plus the domain half-width.
    fn weighted_offsets(&self) -> (Vec<(f64, f64)>, f64);
}

fn line_offsets(coords: &[f64], weights: Vec<f64>) -> (Vec<(f64, f64)>, f64) {
    let span = match (coords.first(), coords.last()) {
        (Some(a), Some(b)) => 0.5 * (b - a).abs(),
        _ => 0.0,
    };
    let total = pairwise_sum(&weights);
    let center = if total != 0.0 {
        let m: Vec<f64> = coords.iter().zip(&weights).map(|(x, w)| x * w).collect();
        pairwise_sum(&m) / total
    } else {
        0.0
    };
    (coords.iter().zip(weights).map(|(x, w)| (x - center, w)).collect(), span)
}

impl MassProfile for LineDensity {
    fn weighted_offsets(&self) -> (Vec<(f64, f64)>, f64) {
        line_offsets(&self.coords, self.values.clone())
    }
}

/// Mass of the positive-frequency part alone is measured with |ρ⁺|.
impl MassProfile for SplitDensity {
    fn weighted_offsets(&self) -> (Vec<(f64, f64)>, f64) {
        line_offsets(&self.coords, self.rho_plus.iter().map(|z| z.norm()).collect())
    }
}

impl MassProfile for DensityField {
    fn weighted_offsets(&self) -> (Vec<(f64, f64)>, f64) {
        let length = self.grid.length;
        let center = centroid(&self.rho, &self.grid).unwrap_or(0.0);
        let offsets = self
            .rho
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let d = (self.grid.x(i) - center).rem_euclid(length);
                let d = if d >= 0.5 * length { d - length } else { d };
                (d, v)
            })
            .collect();
        (offsets, 0.5 * length)
    }
}

/// Fraction of a profile's mass outside `±halfwidth` of its centroid,
/// `|Σ_outside m| / |Σ m|`. Real densities carry signed mass, so the
/// band-limit ringing cancels as it does in the integrated number.
pub fn tail_mass(profile: &impl MassProfile, halfwidth: f64) -> Result<f64> {
    let (offsets, domain_half) = profile.weighted_offsets();
    if halfwidth.is_nan() || halfwidth <= 0.0 || halfwidth >= domain_half {
        return Err(Error::Domain(format!(
            "window half-width {halfwidth} must be positive and below the domain half-width {domain_half}"
        )));
    }
    let all: Vec<f64> = offsets.iter().map(|&(_, w)| w).collect();
    let outside: Vec<f64> = offsets
        .iter()
        .filter(|(d, _)| d.abs() > halfwidth)
        .map(|&(_, w)| w)
        .collect();
    let total = pairwise_sum(&all);
    if total == 0.0 {
        return Ok(0.0);
    }
    Ok((pairwise_sum(&outside) / total).abs())
}

/// Radial photon-number bookkeeping for the 3D shell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellMass {
    pub k_max: f64,
    pub shell_radius: f64,
    pub halfwidth: f64,
    /// ∫ 4πr² ρ dr over |r − cΔt| ≤ halfwidth.
    pub window: f64,
    /// All-space radial number (period-averaged cumulative integral).
    pub total: f64,
    pub fraction: f64,
}

/// 4πr² times the physical 3D density.
pub fn radial_number_density_3d(r: f64, dt: f64, k_max: f64, units: &Units) -> Result<f64> {
    Ok(4.0 * PI * r * r * 2.0 * localized_density_3d(r, dt, k_max, units)?.re)
}

fn radial_integral(a: f64, b: f64, dt: f64, k_max: f64, units: &Units, weight: impl Fn(f64) -> f64) -> f64 {
    let a = a.max(1e-12 / k_max);
    let panels = ((b - a) * k_max / PI).ceil() as usize + 2;
    integrate(
        |r| weight(r) * radial_number_density_3d(r, dt, k_max, units).unwrap_or(0.0),
        a,
        b,
        panels,
        1e-11,
        1e-10,
    )
    .value
    .re
}

/// Cumulative radial number out to infinity, taken as the mean of the
/// cumulative integral over one period `2π/k_max` beyond `r_far`.
pub fn total_radial_number_3d(dt: f64, k_max: f64, r_far: f64, units: &Units) -> Result<f64> {
    check_band(k_max)?;
    let period = 2.0 * PI / k_max;
    let head = radial_integral(0.0, r_far, dt, k_max, units, |_| 1.0);
    let tail = radial_integral(r_far, r_far + period, dt, k_max, units, |r| (r_far + period - r) / period);
    Ok(head + tail)
}

/// Radial number inside `|r − cΔt| ≤ halfwidth` relative to the total.
pub fn shell_mass_3d(dt: f64, k_max: f64, halfwidth: f64, units: &Units) -> Result<ShellMass> {
    check_band(k_max)?;
    let shell = units.c * dt;
    if !(shell > halfwidth && halfwidth > 0.0) {
        return Err(Error::Domain(format!(
            "shell radius {shell} must exceed the window half-width {halfwidth} > 0"
        )));
    }
    let window = radial_integral(shell - halfwidth, shell + halfwidth, dt, k_max, units, |_| 1.0);
    let total = total_radial_number_3d(dt, k_max, shell + 200.0 / k_max, units)?;
    Ok(ShellMass {
        k_max,
        shell_radius: shell,
        halfwidth,
        window,
        total,
        fraction: window / total,
    })
}
