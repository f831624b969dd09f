//! File formats: state specs, density/field CSV and pretty JSON.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::density::{CurrentField, DensityField};
use crate::error::{Error, Result};
use crate::spectral::{make_gaussian_state, FieldSet, KGrid1D, SpectralAmplitude, SpectralAmplitudeJson};
use crate::Helicity;

/// A one-photon state given either as explicit bins or as a Gaussian recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Gaussian { gaussian: GaussianSpec },
    Spectrum(SpectralAmplitudeJson),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub k0: f64,
    pub sigma: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default = "plus")]
    pub helicity: i32,
}

fn plus() -> i32 {
    1
}

impl StateSpec {
    /// Builds the state. Gaussians use `grid`; explicit spectra carry their own
    /// grid but take the unit system from `grid`.
    pub fn into_state(self, grid: KGrid1D) -> Result<SpectralAmplitude> {
        match self {
            StateSpec::Gaussian { gaussian: g } => {
                let h = Helicity::try_from(g.helicity)?;
                Ok(make_gaussian_state(g.k0, g.sigma, grid, h)?.translated(g.x0))
            }
            StateSpec::Spectrum(js) => js.into_state(*grid.units()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn read_state(path: &Path, grid: KGrid1D) -> Result<SpectralAmplitude> {
    StateSpec::from_json(&std::fs::read_to_string(path)?)?.into_state(grid)
}

pub fn write_state_json(path: &Path, state: &SpectralAmplitude) -> Result<()> {
    write_json(path, &SpectralAmplitudeJson::from_state(state))
}

/// Pretty JSON with a trailing newline.
pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn fmt(v: f64) -> String {
    v.to_string()
}

/// `# t=…,k_max=…,units=…` comment line followed by a CSV table.
pub fn write_table(
    path: &Path,
    header: &[(&str, String)],
    columns: &[&str],
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    if !header.is_empty() {
        let line: Vec<String> = header.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(file, "# {}", line.join(","))?;
    }
    let mut w = csv::Writer::from_writer(file);
    w.write_record(columns)?;
    for row in rows {
        w.write_record(row.into_iter().map(fmt))?;
    }
    w.flush()?;
    Ok(())
}

fn meta(t: f64, k_max: f64, units: &str) -> Vec<(&'static str, String)> {
    vec![("t", fmt(t)), ("k_max", fmt(k_max)), ("units", units.to_string())]
}

/// Columns x, rho, J.
pub fn write_density_csv(path: &Path, rho: &DensityField, j: &CurrentField, k_max: f64, units: &str) -> Result<()> {
    if rho.rho.len() != j.j.len() {
        return Err(Error::Dimension("density and current lengths differ".into()));
    }
    write_table(
        path,
        &meta(rho.t, k_max, units),
        &["x", "rho", "J"],
        (0..rho.rho.len()).map(|i| vec![rho.grid.x(i), rho.rho[i], j.j[i]]),
    )
}

/// Columns x, then real and imaginary parts of A⁺, E⁺ and B⁺.
pub fn write_fieldset_csv(path: &Path, f: &FieldSet, k_max: f64, units: &str) -> Result<()> {
    write_table(
        path,
        &meta(f.t, k_max, units),
        &["x", "re_A_plus", "im_A_plus", "re_E_plus", "im_E_plus", "re_B_plus", "im_B_plus"],
        (0..f.a_plus.len()).map(|i| {
            let (a, e, b) = (f.a_plus[i], f.e_plus[i], f.b_plus[i]);
            vec![f.grid.x(i), a.re, a.im, e.re, e.im, b.re, b.im]
        }),
    )
}

/// Columns coord, re(rho+), im(rho+), rho.
pub fn write_split_density_csv(
    path: &Path,
    coord_name: &str,
    coords: &[f64],
    rho_plus: &[num_complex::Complex64],
    t: f64,
    k_max: f64,
    units: &str,
) -> Result<()> {
    write_table(
        path,
        &meta(t, k_max, units),
        &[coord_name, "re_rho_plus", "im_rho_plus", "rho"],
        coords
            .iter()
            .zip(rho_plus)
            .map(|(&u, z)| vec![u, z.re, z.im, 2.0 * z.re]),
    )
}
