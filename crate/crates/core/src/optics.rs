//! Material and circuit-element models at normal incidence.

use std::io::Read;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::spectral::SpectralAmplitude;

/// n = √(1+χ) on the principal branch.
pub fn refractive_index(chi: Complex64) -> Result<Complex64> {
    let z = Complex64::new(1.0, 0.0) + chi;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("susceptibility {chi} is not finite")));
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(Error::Domain(format!("1+χ = {z} lies on the branch cut")));
    }
    Ok(z.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Susceptibility {
    Constant(Complex64),
    /// (ω, χ) rows sorted by ω; linearly interpolated, clamped at the ends.
    Table(Vec<(f64, Complex64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Medium {
    chi: Susceptibility,
}

impl Medium {
    pub fn constant(chi: Complex64) -> Result<Self> {
        let m = Medium {
            chi: Susceptibility::Constant(chi),
        };
        m.index_at(1.0)?;
        Ok(m)
    }

    /// Lossless medium with real index `n`.
    pub fn with_index(n: f64) -> Result<Self> {
        Self::constant(Complex64::new(n * n - 1.0, 0.0))
    }

    pub fn from_table(mut rows: Vec<(f64, Complex64)>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::Domain("susceptibility table needs at least two rows".into()));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        if rows.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Domain("duplicate frequency in susceptibility table".into()));
        }
        let m = Medium {
            chi: Susceptibility::Table(rows.clone()),
        };
        for (w, _) in &rows {
            m.index_at(*w)?;
        }
        Ok(m)
    }

    /// Reads `omega,re_chi,im_chi` rows; a header line is optional.
    pub fn from_csv(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            if rec.len() != 3 {
                return Err(Error::Parse(format!("expected 3 columns, found {}", rec.len())));
            }
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(|f| f.parse::<f64>()).collect();
            match parsed {
                Ok(v) => rows.push((v[0], Complex64::new(v[1], v[2]))),
                Err(_) if rows.is_empty() => continue,
                Err(e) => return Err(Error::Parse(e.to_string())),
            }
        }
        Self::from_table(rows)
    }

    pub fn susceptibility(&self) -> &Susceptibility {
        &self.chi
    }

    pub fn chi_at(&self, omega: f64) -> Complex64 {
        match &self.chi {
            Susceptibility::Constant(c) => *c,
            Susceptibility::Table(rows) => {
                let first = rows[0];
                let last = rows[rows.len() - 1];
                if omega <= first.0 {
                    return first.1;
                }
                if omega >= last.0 {
                    return last.1;
                }
                let hi = rows.partition_point(|r| r.0 <= omega);
                let (w0, c0) = rows[hi - 1];
                let (w1, c1) = rows[hi];
                let s = (omega - w0) / (w1 - w0);
                c0 + (c1 - c0) * s
            }
        }
    }

    /// Complex index at `omega`; a negative imaginary part is a passivity error.
    pub fn index_at(&self, omega: f64) -> Result<Complex64> {
        let n = refractive_index(self.chi_at(omega))?;
        if n.im < 0.0 {
            return Err(Error::Passivity(n.im));
        }
        Ok(n)
    }

    /// d(ω n′)/dω by a centred difference.
    pub fn group_index(&self, omega: f64) -> Result<f64> {
        let h = 1e-6 * omega.abs().max(1e-300);
        let plus = (omega + h) * self.index_at(omega + h)?.re;
        let minus = (omega - h) * self.index_at(omega - h)?.re;
        Ok((plus - minus) / (2.0 * h))
    }
}

/// Multiplies every bin by `exp(iω n(ω) L / c)`.
pub fn propagate_in_medium(c: &SpectralAmplitude, medium: &Medium, length: f64) -> Result<SpectralAmplitude> {
    if !(length.is_finite() && length >= 0.0) {
        return Err(Error::Domain(format!("segment length must be >= 0, got {length}")));
    }
    let g = *c.grid();
    let speed = g.units().c;
    let factors: Vec<Complex64> = (0..g.len())
        .map(|j| {
            let w = g.omega(j);
            let n = medium.index_at(w)?;
            let phase = w * length / speed;
            Ok(Complex64::from_polar((-n.im * phase).exp(), n.re * phase))
        })
        .collect::<Result<_>>()?;
    Ok(c.map_bins(|j, z| z * factors[j]))
}

/// Group delay `L·n_g/c` at the pulse's mean frequency.
pub fn group_delay(c: &SpectralAmplitude, medium: &Medium, length: f64) -> Result<f64> {
    let speed = c.grid().units().c;
    match c.mean_omega() {
        Some(w) => Ok(length * medium.group_index(w)? / speed),
        None => Ok(length * medium.index_at(1.0)?.re / speed),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FresnelConvention {
    /// r = (n1−n2)/(n1+n2), t = 2n1/(n1+n2).
    #[default]
    FluxConserving,
    /// r = (n−1)/(n+1), t = 2n/(n+1) with n = n2/n1.
    PaperLiteral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FresnelCoefficients {
    pub convention: FresnelConvention,
    #[serde(serialize_with = "ser_complex")]
    pub r: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub t: Complex64,
    pub reflectance: f64,
    /// (Re n2 / Re n1)·|t|²
    pub transmittance: f64,
    /// reflectance + transmittance − 1
    pub defect: f64,
}

pub(crate) fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// Normal-incidence field amplitudes for light going from `n1` into `n2`.
pub fn fresnel_interface(n1: Complex64, n2: Complex64, convention: FresnelConvention) -> Result<FresnelCoefficients> {
    let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
    if !finite(n1) || !finite(n2) || n1.norm() == 0.0 || n2.norm() == 0.0 {
        return Err(Error::Domain(format!("indices must be finite and nonzero: {n1}, {n2}")));
    }
    let sum = n1 + n2;
    if sum.norm() <= 1e-300 {
        return Err(Error::Domain("n1 + n2 = 0".into()));
    }
    if n1.re <= 0.0 {
        return Err(Error::Domain(format!("incident index must have Re n1 > 0, got {n1}")));
    }
    let (r, t) = match convention {
        FresnelConvention::FluxConserving => ((n1 - n2) / sum, n1 * 2.0 / sum),
        FresnelConvention::PaperLiteral => {
            let n = n2 / n1;
            let one = Complex64::new(1.0, 0.0);
            ((n - one) / (n + one), n * 2.0 / (n + one))
        }
    };
    let reflectance = r.norm_sqr();
    let transmittance = n2.re / n1.re * t.norm_sqr();
    Ok(FresnelCoefficients {
        convention,
        r,
        t,
        reflectance,
        transmittance,
        defect: reflectance + transmittance - 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KickMode {
    Reflect,
    Absorb,
}

/// Momentum handed to a mirror (reflection) or absorber.
pub fn mirror_momentum_kick(p_em: [f64; 3], mode: KickMode) -> [f64; 3] {
    let f = match mode {
        KickMode::Reflect => 2.0,
        KickMode::Absorb => 1.0,
    };
    p_em.map(|p| f * p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentumReport {
    /// Electromagnetic (Abraham) momentum along the propagation axis.
    pub p_abraham: f64,
    /// (1+χ)·p_A; `None` when χ is complex.
    pub p_minkowski: Option<f64>,
    #[serde(serialize_with = "ser_complex")]
    pub chi: Complex64,
}

/// p_A = Σ ħk_j |c_j|² dk/(2π) and p_M = (1+χ) p_A for real χ.
pub fn momentum_report(c: &SpectralAmplitude, chi: Complex64) -> MomentumReport {
    let g = *c.grid();
    let hbar = g.units().hbar;
    let terms: Vec<f64> = c
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(j, z)| g.k(j) * z.norm_sqr())
        .collect();
    let p_abraham = hbar * pairwise_sum(&terms) * g.dk() / (2.0 * std::f64::consts::PI);
    let p_minkowski = (chi.im == 0.0).then_some((1.0 + chi.re) * p_abraham);
    MomentumReport {
        p_abraham,
        p_minkowski,
        chi,
    }
}

/// A circuit element; port arities are fixed per kind.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementSpec {
    PhaseShifter { phi: f64 },
    /// A photon entering port A leaves A with amplitude `t` and B with `r`;
    /// one entering B leaves A with `−r*` and B with `t*`.
    BeamSplitter { t: Complex64, r: Complex64 },
    MediumSegment { medium: Medium, length: f64 },
    /// Outputs are (transmitted, reflected).
    Interface {
        n_in: Complex64,
        n_out: Complex64,
        convention: FresnelConvention,
    },
    Mirror,
}

impl ElementSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ElementSpec::PhaseShifter { .. } => "phase_shifter",
            ElementSpec::BeamSplitter { .. } => "beam_splitter",
            ElementSpec::MediumSegment { .. } => "medium_segment",
            ElementSpec::Interface { .. } => "interface",
            ElementSpec::Mirror => "mirror",
        }
    }

    pub fn arity(&self) -> (usize, usize) {
        match self {
            ElementSpec::BeamSplitter { .. } => (2, 2),
            ElementSpec::Interface { .. } => (1, 2),
            _ => (1, 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Helicity;
    use crate::spectral::{make_gaussian_state, KGrid1D};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exact_indices() {
        assert_eq!(refractive_index(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(refractive_index(c(3.0, 0.0)).unwrap(), c(2.0, 0.0));
        assert!(matches!(refractive_index(c(-2.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn gain_medium_is_rejected() {
        assert!(matches!(Medium::constant(c(0.2, -0.1)), Err(Error::Passivity(_))));
    }

    #[test]
    fn table_interpolates_and_clamps() {
        let m = Medium::from_table(vec![(2.0, c(1.0, 0.2)), (1.0, c(0.0, 0.0))]).unwrap();
        assert_eq!(m.chi_at(1.5), c(0.5, 0.1));
        assert_eq!(m.chi_at(0.1), c(0.0, 0.0));
        assert_eq!(m.chi_at(9.0), c(1.0, 0.2));
    }

    #[test]
    fn csv_table_with_header() {
        let text = "omega,re_chi,im_chi\n1.0,0.5,0.0\n3.0,1.5,0.01\n";
        let m = Medium::from_csv(text.as_bytes()).unwrap();
        assert!((m.chi_at(2.0) - c(1.0, 0.005)).norm() < 1e-15);
        assert!(Medium::from_csv("1.0,0.5\n".as_bytes()).is_err());
    }

    #[test]
    fn negative_length_is_rejected() {
        let g = KGrid1D::natural(128, 1.0).unwrap();
        let s = make_gaussian_state(40.0, 3.0, g, Helicity::Plus).unwrap();
        let m = Medium::with_index(1.5).unwrap();
        assert!(propagate_in_medium(&s, &m, -1.0).is_err());
    }

    #[test]
    fn matched_interface() {
        let f = fresnel_interface(c(1.5, 0.0), c(1.5, 0.0), FresnelConvention::FluxConserving).unwrap();
        assert_eq!(f.r, c(0.0, 0.0));
        assert_eq!(f.t, c(1.0, 0.0));
    }

    #[test]
    fn vacuum_to_three() {
        for conv in [FresnelConvention::FluxConserving, FresnelConvention::PaperLiteral] {
            let f = fresnel_interface(c(1.0, 0.0), c(3.0, 0.0), conv).unwrap();
            assert!((f.r.norm() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_indices() {
        assert!(fresnel_interface(c(1.0, 0.0), c(-1.0, 0.0), FresnelConvention::FluxConserving).is_err());
        assert!(fresnel_interface(c(0.0, 0.0), c(1.0, 0.0), FresnelConvention::FluxConserving).is_err());
    }

    #[test]
    fn kicks() {
        let p = [1.5, 0.0, 0.0];
        assert_eq!(mirror_momentum_kick(p, KickMode::Reflect), [3.0, 0.0, 0.0]);
        assert_eq!(mirror_momentum_kick(p, KickMode::Absorb), p);
        assert_eq!(mirror_momentum_kick([0.0; 3], KickMode::Reflect), [0.0; 3]);
    }

    #[test]
    fn complex_chi_has_no_minkowski_momentum() {
        let g = KGrid1D::natural(128, 1.0).unwrap();
        let s = make_gaussian_state(40.0, 3.0, g, Helicity::Plus).unwrap();
        assert!(momentum_report(&s, c(0.1, 0.01)).p_minkowski.is_none());
        let r = momentum_report(&s, c(0.0, 0.0));
        assert_eq!(r.p_minkowski, Some(r.p_abraham));
    }
}
