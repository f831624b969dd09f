//! One-photon states as spectral amplitudes on a forward-only k-grid.
//!
//! The grid holds `k_j = j·dk` for `j = 1..=N` and is conjugate to a
//! periodic x-grid of `N` samples with `dx = 2π/(N·dk)`. Photon number is
//! `Σ |c_j|² dk/(2π)`; the transverse area only enters densities.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::Helicity;
use crate::numeric::{pairwise_sum, pairwise_sum_complex};
use crate::units::Units;

/// Samples at either end of the x-grid that a pulse must stay clear of.
pub const SUPPORT_MARGIN_SAMPLES: usize = 10;
/// Edge amplitude (relative to the peak) tolerated by [`make_gaussian_state`].
pub const EDGE_LEAKAGE: f64 = 1e-10;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KGrid1D {
    n: usize,
    dk: f64,
    area: f64,
    units: Units,
}

impl KGrid1D {
    pub fn new(n: usize, dk: f64, area: f64, units: Units) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Grid(format!("N must be a power of two >= 2, got {n}")));
        }
        if !(dk.is_finite() && dk > 0.0) {
            return Err(Error::Grid(format!("dk must be positive, got {dk}")));
        }
        if !(area.is_finite() && area > 0.0) {
            return Err(Error::Grid(format!("area must be positive, got {area}")));
        }
        units.validate()?;
        Ok(KGrid1D { n, dk, area, units })
    }

    pub fn natural(n: usize, dk: f64) -> Result<Self> {
        Self::new(n, dk, 1.0, Units::natural())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dk(&self) -> f64 {
        self.dk
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn units(&self) -> &Units {
        &self.units
    }

    /// Wavenumber of sample `j` (zero-based), i.e. `(j+1)·dk`.
    pub fn k(&self, j: usize) -> f64 {
        (j + 1) as f64 * self.dk
    }

    pub fn omega(&self, j: usize) -> f64 {
        self.units.c * self.k(j)
    }

    pub fn k_max(&self) -> f64 {
        self.n as f64 * self.dk
    }

    pub fn x_grid(&self) -> XGrid1D {
        let length = 2.0 * PI / self.dk;
        XGrid1D {
            n: self.n,
            dx: length / self.n as f64,
            length,
        }
    }

    pub fn check_same(&self, other: &KGrid1D) -> Result<()> {
        if self != other {
            return Err(Error::Dimension(format!(
                "grids differ: (N={}, dk={}, A={}) vs (N={}, dk={}, A={})",
                self.n, self.dk, self.area, other.n, other.dk, other.area
            )));
        }
        Ok(())
    }
}

/// Periodic spatial grid conjugate to a [`KGrid1D`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XGrid1D {
    pub n: usize,
    pub dx: f64,
    pub length: f64,
}

impl XGrid1D {
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }
}

/// Complex one-photon spectrum `c_λ(k)` on a forward k-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralAmplitude {
    grid: KGrid1D,
    helicity: Helicity,
    c: Vec<Complex64>,
}

impl SpectralAmplitude {
    pub fn new(grid: KGrid1D, helicity: Helicity, c: Vec<Complex64>) -> Result<Self> {
        if c.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "{} amplitudes for a grid of {} samples",
                c.len(),
                grid.len()
            )));
        }
        if c.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Domain("spectral amplitudes must be finite".into()));
        }
        Ok(SpectralAmplitude { grid, helicity, c })
    }

    pub fn zeros(grid: KGrid1D, helicity: Helicity) -> Self {
        SpectralAmplitude {
            grid,
            helicity,
            c: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// All weight in bin `j`, scaled to unit photon number.
    pub fn single_bin(grid: KGrid1D, helicity: Helicity, j: usize) -> Result<Self> {
        if j >= grid.len() {
            return Err(Error::Dimension(format!("bin {j} outside grid of {}", grid.len())));
        }
        let mut s = Self::zeros(grid, helicity);
        s.c[j] = Complex64::new((2.0 * PI / grid.dk).sqrt(), 0.0);
        Ok(s)
    }

    pub fn grid(&self) -> &KGrid1D {
        &self.grid
    }

    pub fn helicity(&self) -> Helicity {
        self.helicity
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.c
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.c
    }

    pub fn photon_number(&self) -> f64 {
        photon_number(self)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        self.map_bins(|_, z| z * factor)
    }

    /// Multiplies bin `j` by `f(j, c_j)`.
    pub fn map_bins(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        SpectralAmplitude {
            grid: self.grid,
            helicity: self.helicity,
            c: self.c.iter().enumerate().map(|(j, &z)| f(j, z)).collect(),
        }
    }

    /// `self + factor·other`; spectra must share grid and helicity.
    pub fn add_scaled(&self, other: &SpectralAmplitude, factor: Complex64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        if self.helicity != other.helicity {
            return Err(Error::Dimension("cannot superpose spectra of different helicity".into()));
        }
        Ok(self.map_bins(|j, z| z + factor * other.c[j]))
    }

    /// Rigid shift of the pulse by `x0` (multiplies by `e^{-i k x0}`).
    pub fn translated(&self, x0: f64) -> Self {
        self.map_bins(|j, z| z * Complex64::from_polar(1.0, -self.grid.k(j) * x0))
    }

    /// Power-weighted mean angular frequency; `None` for the zero state.
    pub fn mean_omega(&self) -> Option<f64> {
        let w: Vec<f64> = self.c.iter().map(|z| z.norm_sqr()).collect();
        let total = pairwise_sum(&w);
        if total == 0.0 {
            return None;
        }
        let weighted: Vec<f64> = w.iter().enumerate().map(|(j, p)| p * self.grid.omega(j)).collect();
        Some(pairwise_sum(&weighted) / total)
    }
}

/// Σ_j |c_j|² dk/(2π).
pub fn photon_number(c: &SpectralAmplitude) -> f64 {
    let v: Vec<f64> = c.c.iter().map(|z| z.norm_sqr()).collect();
    pairwise_sum(&v) * c.grid.dk / (2.0 * PI)
}

/// Unit-number Gaussian spectrum `∝ exp(-(k-k0)²/4σ²)`, peaked at x = 0.
pub fn make_gaussian_state(k0: f64, sigma: f64, grid: KGrid1D, helicity: Helicity) -> Result<SpectralAmplitude> {
    if !(k0.is_finite() && k0 > 0.0) {
        return Err(Error::Domain(format!("k0 must be positive, got {k0}")));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    // Exponents are taken relative to the nearest bin so a very narrow
    // Gaussian collapses onto one bin instead of underflowing to zero.
    let nearest = (0..grid.len())
        .min_by(|&a, &b| (grid.k(a) - k0).abs().total_cmp(&(grid.k(b) - k0).abs()))
        .unwrap_or(0);
    let offset = (grid.k(nearest) - k0).powi(2);
    let c: Vec<Complex64> = (0..grid.len())
        .map(|j| {
            let d2 = (grid.k(j) - k0).powi(2) - offset;
            Complex64::new((-d2 / (4.0 * sigma * sigma)).exp(), 0.0)
        })
        .collect();
    let peak = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let edge = c[0].norm().max(c[grid.len() - 1].norm());
    if nearest == 0 || nearest == grid.len() - 1 || edge >= EDGE_LEAKAGE * peak {
        return Err(Error::GridCoverage(format!(
            "Gaussian (k0={k0}, sigma={sigma}) leaks {:.3e} of its peak onto the grid edge [{}, {}]",
            edge / peak,
            grid.k(0),
            grid.k_max()
        )));
    }
    let s = SpectralAmplitude::new(grid, helicity, c)?;
    let n = photon_number(&s);
    Ok(s.scaled(Complex64::new(1.0 / n.sqrt(), 0.0)))
}

/// Flat-spectrum state whose equal-time overlap with other nodes vanishes.
pub fn localized_state(grid: KGrid1D, helicity: Helicity, node: usize) -> Result<SpectralAmplitude> {
    let xg = grid.x_grid();
    if node >= xg.n {
        return Err(Error::Dimension(format!("node {node} outside x-grid of {}", xg.n)));
    }
    let amp = xg.dx.sqrt();
    let c = (0..grid.len())
        .map(|j| Complex64::from_polar(amp, -grid.k(j) * xg.x(node)))
        .collect();
    SpectralAmplitude::new(grid, helicity, c)
}

/// Free evolution `c_j → c_j e^{-iω_j Δt}`.
pub fn evolve_free(c: &SpectralAmplitude, dt: f64) -> SpectralAmplitude {
    let grid = c.grid;
    c.map_bins(|j, z| z * Complex64::from_polar(1.0, -grid.omega(j) * dt))
}

/// Sampled positive-frequency fields on the periodic x-grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSet {
    pub grid: XGrid1D,
    pub t: f64,
    pub helicity: Helicity,
    pub a_plus: Vec<Complex64>,
    pub e_plus: Vec<Complex64>,
    pub b_plus: Vec<Complex64>,
}

/// Spectral weight of bin `j` in `A⁺(x, t)`:
/// `i √(ħ/ε₀) dk/(2π √(ω_j A)) c_j e^{-iω_j t}`.
pub(crate) fn potential_weights(c: &SpectralAmplitude, t: f64) -> Vec<Complex64> {
    let g = c.grid;
    let u = g.units;
    let prefactor = I * (u.hbar / u.eps0).sqrt() * g.dk / (2.0 * PI * g.area.sqrt());
    c.c.iter()
        .enumerate()
        .map(|(j, &z)| {
            let w = g.omega(j);
            prefactor * z * Complex64::from_polar(1.0 / w.sqrt(), -w * t)
        })
        .collect()
}

/// Evaluates `Σ_j w_j e^{i k_j x_i}` on every grid node by one inverse FFT.
pub(crate) fn sum_modes(grid: &KGrid1D, weights: &[Complex64]) -> Vec<Complex64> {
    let n = grid.len();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (j, &w) in weights.iter().enumerate() {
        buf[(j + 1) % n] += w;
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf
}

/// Inverse of [`sum_modes`]: recovers mode weights from node samples.
pub(crate) fn extract_modes(grid: &KGrid1D, samples: &[Complex64]) -> Vec<Complex64> {
    let n = grid.len();
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    (0..n).map(|j| buf[(j + 1) % n] * scale).collect()
}

/// Positive-frequency `A⁺`, `E⁺ = -∂_t A⁺` and `B⁺ = ∂_x A⁺` (transverse,
/// forward-propagating) at time `t`.
pub fn synthesize_fields(c: &SpectralAmplitude, t: f64) -> FieldSet {
    let g = c.grid;
    let weights = potential_weights(c, t);
    let a_plus = sum_modes(&g, &weights);
    let e_w: Vec<Complex64> = weights.iter().enumerate().map(|(j, w)| I * g.omega(j) * w).collect();
    let b_w: Vec<Complex64> = weights.iter().enumerate().map(|(j, w)| I * g.k(j) * w).collect();
    FieldSet {
        grid: g.x_grid(),
        t,
        helicity: c.helicity,
        a_plus,
        e_plus: sum_modes(&g, &e_w),
        b_plus: sum_modes(&g, &b_w),
    }
}

/// Recovers the spectral amplitude that generated `fields` on `grid`.
pub fn spectrum_from_fields(fields: &FieldSet, grid: KGrid1D) -> Result<SpectralAmplitude> {
    if fields.grid != grid.x_grid() {
        return Err(Error::Dimension("field grid is not conjugate to the k-grid".into()));
    }
    let modes = extract_modes(&grid, &fields.a_plus);
    let u = grid.units;
    let prefactor = I * (u.hbar / u.eps0).sqrt() * grid.dk / (2.0 * PI * grid.area.sqrt());
    let c = modes
        .iter()
        .enumerate()
        .map(|(j, &m)| {
            let w = grid.omega(j);
            m / prefactor * Complex64::from_polar(w.sqrt(), w * fields.t)
        })
        .collect();
    SpectralAmplitude::new(grid, fields.helicity, c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarProductMethod {
    KSpace,
    /// Field bilinear integrated over the x-grid at common time `t`.
    XSpace { t: f64 },
}

/// One-photon scalar product `⟨c1|c2⟩`, conjugate-linear in `c1`.
///
/// The x-space form is `(iε₀/2ħ)·A·Σ_x [A₂⁺·E₁⁻ − E₂⁺·A₁⁻] dx`, which reduces
/// to the number-density integral when both states coincide.
pub fn scalar_product(c1: &SpectralAmplitude, c2: &SpectralAmplitude, method: ScalarProductMethod) -> Result<Complex64> {
    c1.grid.check_same(&c2.grid)?;
    if c1.helicity != c2.helicity {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let g = c1.grid;
    match method {
        ScalarProductMethod::KSpace => {
            let terms: Vec<Complex64> = c1.c.iter().zip(&c2.c).map(|(a, b)| a.conj() * b).collect();
            Ok(pairwise_sum_complex(&terms) * (g.dk / (2.0 * PI)))
        }
        ScalarProductMethod::XSpace { t } => {
            let f1 = synthesize_fields(c1, t);
            let f2 = synthesize_fields(c2, t);
            let terms: Vec<Complex64> = (0..g.len())
                .map(|i| f2.a_plus[i] * f1.e_plus[i].conj() - f2.e_plus[i] * f1.a_plus[i].conj())
                .collect();
            let u = g.units;
            let xg = g.x_grid();
            Ok(pairwise_sum_complex(&terms) * (I * u.eps0 / (2.0 * u.hbar)) * (xg.dx * g.area))
        }
    }
}

/// Rejects profiles with weight above `rel_threshold·peak` within
/// [`SUPPORT_MARGIN_SAMPLES`] of either end of the periodic domain.
pub fn check_support(profile: &[f64], rel_threshold: f64) -> Result<()> {
    let n = profile.len();
    let peak = profile.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if peak == 0.0 || n <= 2 * SUPPORT_MARGIN_SAMPLES {
        return Ok(());
    }
    let limit = rel_threshold * peak;
    let offending = (0..SUPPORT_MARGIN_SAMPLES)
        .chain(n - SUPPORT_MARGIN_SAMPLES..n)
        .find(|&i| profile[i].abs() > limit);
    match offending {
        Some(i) => Err(Error::Support(format!(
            "sample {i} holds {:.3e} of the peak (limit {rel_threshold:e})",
            profile[i].abs() / peak
        ))),
        None => Ok(()),
    }
}

/// JSON form `{N, dk, area, helicity, re[], im[]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralAmplitudeJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub dk: f64,
    pub area: f64,
    pub helicity: i32,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl SpectralAmplitudeJson {
    pub fn from_state(s: &SpectralAmplitude) -> Self {
        SpectralAmplitudeJson {
            n: s.grid.n,
            dk: s.grid.dk,
            area: s.grid.area,
            helicity: s.helicity.value(),
            re: s.c.iter().map(|z| z.re).collect(),
            im: s.c.iter().map(|z| z.im).collect(),
        }
    }

    pub fn into_state(self, units: Units) -> Result<SpectralAmplitude> {
        if self.re.len() != self.n || self.im.len() != self.n {
            return Err(Error::Dimension(format!(
                "N = {} but re/im have {}/{} entries",
                self.n,
                self.re.len(),
                self.im.len()
            )));
        }
        let grid = KGrid1D::new(self.n, self.dk, self.area, units)?;
        let c = self.re.iter().zip(&self.im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        SpectralAmplitude::new(grid, Helicity::try_from(self.helicity)?, c)
    }
}
