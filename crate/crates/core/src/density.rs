//! Photon number density and current bilinears on the periodic x-grid.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::spectral::{potential_weights, sum_modes, synthesize_fields, SpectralAmplitude, XGrid1D};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Sampled photon density ρ(x) at one time, in 1/(m·A) per unit area.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub grid: XGrid1D,
    pub t: f64,
    pub area: f64,
    pub rho: Vec<f64>,
    /// Largest |Im| dropped when taking the real part of the bilinear.
    pub max_imag_residue: f64,
}

impl DensityField {
    /// Σ ρ dx A.
    pub fn integrated_number(&self) -> f64 {
        pairwise_sum(&self.rho) * self.grid.dx * self.area
    }

    pub fn peak(&self) -> f64 {
        self.rho.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Most negative sample (0 if the field is nonnegative).
    pub fn min_value(&self) -> f64 {
        self.rho.iter().copied().fold(0.0, f64::min)
    }

    pub fn centroid(&self) -> Option<f64> {
        centroid(&self.rho, &self.grid)
    }
}

/// Sampled photon current J(x) along the propagation axis.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentField {
    pub grid: XGrid1D,
    pub t: f64,
    pub j: Vec<f64>,
    pub max_imag_residue: f64,
}

fn bilinear_real(values: impl Iterator<Item = Complex64>) -> (Vec<f64>, f64) {
    let mut residue: f64 = 0.0;
    let re = values
        .map(|z| {
            residue = residue.max(z.im.abs());
            z.re
        })
        .collect();
    (re, residue)
}

/// ρ₁₂(x) = (iε₀/2ħ)[A₂⁺·E₁⁻ − E₁⁺·A₂⁻] at time `t`.
///
/// Opposite helicities give an identically zero field.
pub fn density_field(c1: &SpectralAmplitude, c2: &SpectralAmplitude, t: f64) -> Result<DensityField> {
    c1.grid().check_same(c2.grid())?;
    let g = *c1.grid();
    let xg = g.x_grid();
    if c1.helicity() != c2.helicity() {
        return Ok(DensityField {
            grid: xg,
            t,
            area: g.area(),
            rho: vec![0.0; xg.n],
            max_imag_residue: 0.0,
        });
    }
    let f1 = synthesize_fields(c1, t);
    let f2 = synthesize_fields(c2, t);
    let u = g.units();
    let pref = I * u.eps0 / (2.0 * u.hbar);
    let (rho, residue) = bilinear_real(
        (0..xg.n).map(|i| pref * (f2.a_plus[i] * f1.e_plus[i].conj() - f1.e_plus[i] * f2.a_plus[i].conj())),
    );
    Ok(DensityField {
        grid: xg,
        t,
        area: g.area(),
        rho,
        max_imag_residue: residue,
    })
}

/// J₁₂(x) = c·(iε₀/2ħ)[A₂⁺·cB₁⁻ − cB₁⁺·A₂⁻], the longitudinal component of
/// the `A × cB` current for transverse fields.
pub fn current_field(c1: &SpectralAmplitude, c2: &SpectralAmplitude, t: f64) -> Result<CurrentField> {
    c1.grid().check_same(c2.grid())?;
    let g = *c1.grid();
    let xg = g.x_grid();
    if c1.helicity() != c2.helicity() {
        return Ok(CurrentField {
            grid: xg,
            t,
            j: vec![0.0; xg.n],
            max_imag_residue: 0.0,
        });
    }
    let f1 = synthesize_fields(c1, t);
    let f2 = synthesize_fields(c2, t);
    let u = g.units();
    let pref = I * u.eps0 / (2.0 * u.hbar) * u.c;
    let (j, residue) = bilinear_real((0..xg.n).map(|i| {
        let cb1 = f1.b_plus[i] * u.c;
        pref * (f2.a_plus[i] * cb1.conj() - cb1 * f2.a_plus[i].conj())
    }));
    Ok(CurrentField {
        grid: xg,
        t,
        j,
        max_imag_residue: residue,
    })
}

/// ∂_x J for a single state, from spectrally differentiated fields.
pub fn current_divergence(c: &SpectralAmplitude, t: f64) -> Vec<f64> {
    let g = *c.grid();
    let u = g.units();
    let weights = potential_weights(c, t);
    let a = sum_modes(&g, &weights);
    // ∂_x(cB⁺) has spectrum c·(ik)² times the potential weights.
    let d2: Vec<Complex64> = weights
        .iter()
        .enumerate()
        .map(|(j, w)| -w * g.k(j) * g.k(j) * u.c)
        .collect();
    let cb_prime = sum_modes(&g, &d2);
    // The ∂A⁺·cB⁻ and cB⁺·∂A⁻ terms cancel identically.
    let pref = I * u.eps0 / (2.0 * u.hbar) * u.c;
    (0..a.len())
        .map(|i| (pref * (a[i] * cb_prime[i].conj() - cb_prime[i] * a[i].conj())).re)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuityReport {
    /// max |∂_tρ + ∂_xJ| / max(max |∂_xJ|, c·dk·max |ρ|)
    pub residual: f64,
    pub max_abs_divergence: f64,
    pub dt: f64,
}

/// Audits ∂_tρ + ∂_xJ = 0 with a centred time difference of step `dt`.
pub fn continuity_residual(c: &SpectralAmplitude, t: f64, dt: f64) -> Result<ContinuityReport> {
    let g = *c.grid();
    let dx = g.x_grid().dx;
    let c_dt = g.units().c * dt;
    if !(dt > 0.0 && c_dt < dx / 4.0) {
        return Err(Error::StepSize { c_dt, limit: dx / 4.0 });
    }
    let ahead = density_field(c, c, t + dt)?;
    let behind = density_field(c, c, t - dt)?;
    let div = current_divergence(c, t);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for ((a, b), d) in ahead.rho.iter().zip(&behind.rho).zip(&div) {
        let dt_rho = (a - b) / (2.0 * dt);
        worst = worst.max((dt_rho + d).abs());
        scale = scale.max(d.abs());
    }
    // Uniform fields have no divergence scale; fall back to the slowest
    // variation the periodic box supports.
    let rho_peak = ahead.peak().max(behind.peak());
    let floor = c_dt / dt * g.dk() * rho_peak;
    let denom = scale.max(floor);
    let residual = if denom > 0.0 { worst / denom } else { worst };
    Ok(ContinuityReport {
        residual,
        max_abs_divergence: scale,
        dt,
    })
}

/// Residuals at `dt` and `dt/2`; a second-order scheme gives a ratio near 4.
pub fn continuity_convergence(c: &SpectralAmplitude, t: f64, dt: f64) -> Result<(ContinuityReport, ContinuityReport)> {
    Ok((continuity_residual(c, t, dt)?, continuity_residual(c, t, dt / 2.0)?))
}

/// Weighted mean position on a periodic grid, unwrapped around the sample
/// of largest |value|.
pub fn centroid(values: &[f64], grid: &XGrid1D) -> Option<f64> {
    let n = values.len();
    let (peak, peak_val) = values
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) });
    if peak_val == 0.0 {
        return None;
    }
    let half = (n / 2) as isize;
    let offsets: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let mut d = i as isize - peak as isize;
            if d >= half {
                d -= n as isize;
            } else if d < -half {
                d += n as isize;
            }
            (d as f64 * grid.dx, values[i])
        })
        .collect();
    let weights: Vec<f64> = offsets.iter().map(|&(_, w)| w).collect();
    let moments: Vec<f64> = offsets.iter().map(|&(d, w)| d * w).collect();
    let total = pairwise_sum(&weights);
    if total == 0.0 {
        return None;
    }
    Some(grid.x(peak) + pairwise_sum(&moments) / total)
}
