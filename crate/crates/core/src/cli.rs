//! Command-line front end. Every command writes CSV/JSON into `--out` and
//! echoes its JSON summary on stdout.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::{
    coincidence_probability, run_circuit, sample_counts, validate, Ledger, LedgerRow, Netlist, Outcome, CONSERVATION_TOL,
    LEDGER_TOL,
};
use crate::density::{continuity_residual, current_field, density_field};
use crate::error::Error;
use crate::io::{self, StateSpec};
use crate::localization::{shell_mass_3d, tail_mass, SplitDensity, LineDensity};
use crate::optics::{
    fresnel_interface, mirror_momentum_kick, momentum_report, ElementSpec, FresnelCoefficients, FresnelConvention, KickMode,
    MomentumReport,
};
use crate::spectral::{make_gaussian_state, synthesize_fields, KGrid1D, SpectralAmplitude};
use crate::units::{UnitMode, Units};
use crate::Helicity;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

/// Tolerance for Σρ dx A against the k-space photon number.
pub const NUMBER_TOL: f64 = 1e-8;
/// Tolerance on the continuity residual reported by `density`.
pub const CONTINUITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub dk: f64,
    pub area: f64,
}

fn parse_grid(s: &str) -> std::result::Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 && parts.len() != 3 {
        return Err("expected N,dk[,area]".into());
    }
    let n = parts[0].parse::<usize>().map_err(|e| format!("N: {e}"))?;
    let dk = parts[1].parse::<f64>().map_err(|e| format!("dk: {e}"))?;
    let area = match parts.get(2) {
        Some(a) => a.parse::<f64>().map_err(|e| format!("area: {e}"))?,
        None => 1.0,
    };
    if !n.is_power_of_two() || n < 2 {
        return Err(format!("N = {n} must be a power of two >= 2"));
    }
    if !(dk.is_finite() && dk > 0.0) {
        return Err(format!("dk = {dk} must be positive"));
    }
    if !(area.is_finite() && area > 0.0) {
        return Err(format!("area = {area} must be positive"));
    }
    Ok(GridSpec { n, dk, area })
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("'{p}': {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err("expected RE or RE,IM".into()),
    }
}

/// K0,SIGMA[,X0]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianArg {
    pub k0: f64,
    pub sigma: f64,
    pub x0: f64,
}

fn parse_gaussian(s: &str) -> std::result::Result<GaussianArg, String> {
    let v = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect::<std::result::Result<Vec<f64>, String>>()?;
    match v.as_slice() {
        [k0, sigma] => Ok(GaussianArg { k0: *k0, sigma: *sigma, x0: 0.0 }),
        [k0, sigma, x0] => Ok(GaussianArg { k0: *k0, sigma: *sigma, x0: *x0 }),
        _ => Err("expected K0,SIGMA[,X0]".into()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitsArg {
    Natural,
    Si,
}

#[derive(Debug, Parser)]
#[command(name = "photon-current", version, about = "Single-photon density, current and circuit toolkit")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "natural", global = true)]
    pub units: UnitsArg,
    #[arg(long, default_value = ".", global = true)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// N,dk[,area]
    #[arg(long, value_parser = parse_grid, default_value = "4096,1,1", global = true)]
    pub grid: GridSpec,
    /// Use the literal (r, t) = ((n−1)/(n+1), 2n/(n+1)) interface pair.
    #[arg(long, global = true)]
    pub paper_convention: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// State JSON: {N,dk,area,helicity,re,im} or {"gaussian":{k0,sigma,x0}}
    #[arg(long, group = "state_src")]
    pub state: Option<PathBuf>,
    /// K0,SIGMA[,X0] Gaussian on the global grid
    #[arg(long, value_parser = parse_gaussian, group = "state_src", allow_negative_numbers = true)]
    pub gaussian: Option<GaussianArg>,
    /// Single occupied bin j (k = (j+1) dk)
    #[arg(long, group = "state_src")]
    pub bin: Option<usize>,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub helicity: i32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density, current and continuity audit of a one-photon state.
    Density {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t: f64,
        /// Time step of the continuity audit (default 1e-4 dx/c).
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Closed-form localized densities in 1D or 3D.
    Localized {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        dim: u8,
        #[arg(long)]
        k_max: f64,
        /// Time offset Δt (default 50/(c k_max)).
        #[arg(long, allow_negative_numbers = true)]
        dt: Option<f64>,
        /// Samples per side (1D) or radial samples (3D).
        #[arg(long, default_value_t = 5000)]
        points: usize,
        /// Coordinate extent in units of 1/k_max.
        #[arg(long, default_value_t = 500.0)]
        extent: f64,
        /// Tail/shell half-width in units of 1/k_max (default 50 in 1D, 10 in 3D).
        #[arg(long)]
        halfwidth: Option<f64>,
    },
    /// Validate and run a netlist.
    Circuit {
        #[arg(long)]
        netlist: PathBuf,
        /// Number of seeded detection samples to draw.
        #[arg(long, default_value_t = 0)]
        samples: u64,
    },
    /// Normal-incidence Fresnel coefficients and flux audit.
    Fresnel {
        /// RE[,IM]
        #[arg(long, value_parser = parse_complex, default_value = "1")]
        n1: Complex64,
        /// RE[,IM]
        #[arg(long, value_parser = parse_complex)]
        n2: Complex64,
    },
    /// Abraham/Minkowski momentum and mirror kicks.
    Momentum {
        #[command(flatten)]
        state: StateArgs,
        /// RE[,IM]
        #[arg(long, value_parser = parse_complex, default_value = "0")]
        chi: Complex64,
    },
}

/// Failure with its process exit code.
#[derive(Debug)]
pub struct CliFailure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliFailure {
    fn from(e: Error) -> Self {
        CliFailure {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }
}

fn breach(message: String) -> CliFailure {
    CliFailure {
        code: EXIT_INVARIANT,
        message,
    }
}

type CliResult<T> = std::result::Result<T, CliFailure>;

struct Context {
    units: Units,
    grid: KGrid1D,
    out: PathBuf,
    seed: u64,
    convention: FresnelConvention,
}

impl Context {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn load_state(args: &StateArgs, grid: KGrid1D) -> CliResult<SpectralAmplitude> {
    let h = Helicity::try_from(args.helicity)?;
    let state = if let Some(path) = &args.state {
        let text = std::fs::read_to_string(path).map_err(Error::from)?;
        StateSpec::from_json(&text)?.into_state(grid)?
    } else if let Some(g) = args.gaussian {
        make_gaussian_state(g.k0, g.sigma, grid, h)?.translated(g.x0)
    } else if let Some(j) = args.bin {
        SpectralAmplitude::single_bin(grid, h, j)?
    } else {
        return Err(Error::Parse("one of --state, --gaussian or --bin is required".into()).into());
    };
    Ok(state)
}

#[derive(Debug, Serialize)]
struct DensitySummary {
    t: f64,
    units: &'static str,
    photon_number: f64,
    integrated_number: f64,
    centroid: Option<f64>,
    min_rho: f64,
    continuity_residual: f64,
    continuity_dt: f64,
}

fn cmd_density(ctx: &Context, args: &StateArgs, t: f64, dt: Option<f64>) -> CliResult<serde_json::Value> {
    let c = load_state(args, ctx.grid)?;
    let g = *c.grid();
    let rho = density_field(&c, &c, t)?;
    let j = current_field(&c, &c, t)?;
    let dt = dt.unwrap_or(1e-4 * g.x_grid().dx / g.units().c);
    let cont = continuity_residual(&c, t, dt)?;
    let units = g.units().label();
    io::write_density_csv(&ctx.path("density.csv"), &rho, &j, g.k_max(), units)?;
    io::write_fieldset_csv(&ctx.path("fields.csv"), &synthesize_fields(&c, t), g.k_max(), units)?;
    let summary = DensitySummary {
        t,
        units,
        photon_number: c.photon_number(),
        integrated_number: rho.integrated_number(),
        centroid: rho.centroid(),
        min_rho: rho.min_value(),
        continuity_residual: cont.residual,
        continuity_dt: dt,
    };
    io::write_json(&ctx.path("summary.json"), &summary)?;
    let value = serde_json::to_value(&summary).map_err(Error::from)?;
    let drift = (summary.integrated_number - summary.photon_number).abs();
    if drift > NUMBER_TOL {
        return Err(breach(format!("x-space number differs from k-space number by {drift:e}")));
    }
    if cont.residual > CONTINUITY_TOL {
        return Err(breach(format!("continuity residual {:e} exceeds {CONTINUITY_TOL:e}", cont.residual)));
    }
    Ok(value)
}

#[derive(Debug, Serialize)]
struct Localized1dSummary {
    dim: u8,
    k_max: f64,
    dt: f64,
    halfwidth: f64,
    rho_plus_at_origin: [f64; 2],
    tail_mass_physical: f64,
    tail_mass_positive_frequency: f64,
    contrast: f64,
    centroid: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Localized3dSummary {
    dim: u8,
    k_max: f64,
    dt: f64,
    shell_radius: f64,
    halfwidth: f64,
    window_mass: f64,
    total_mass: f64,
    shell_fraction: f64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_localized(
    ctx: &Context,
    dim: u8,
    k_max: f64,
    dt: Option<f64>,
    points: usize,
    extent: f64,
    halfwidth: Option<f64>,
) -> CliResult<serde_json::Value> {
    if dim != 1 && dim != 3 {
        return Err(Error::Domain(format!("dimension must be 1 or 3, got {dim}")).into());
    }
    if !(k_max.is_finite() && k_max > 0.0) {
        return Err(Error::Domain(format!("k_max must be positive, got {k_max}")).into());
    }
    let c = ctx.units.c;
    let area = ctx.grid.area();
    let units = ctx.units.label();
    if dim == 1 {
        let dt = dt.unwrap_or(0.0);
        let hw = halfwidth.unwrap_or(50.0) / k_max;
        let split = SplitDensity::localized_1d(k_max, area, extent / k_max, 2 * points + 1)?;
        let x: Vec<f64> = split.coords.iter().map(|u| u + c * dt).collect();
        io::write_split_density_csv(&ctx.path("localized_1d.csv"), "u", &split.coords, &split.rho_plus, dt, k_max, units)?;
        let physical = split.physical_profile();
        let tail_phys = tail_mass(&physical, hw)?;
        let tail_plus = tail_mass(&split, hw)?;
        let moved = LineDensity {
            coords: x,
            values: physical.values.clone(),
        };
        let summary = Localized1dSummary {
            dim,
            k_max,
            dt,
            halfwidth: hw,
            rho_plus_at_origin: {
                let z = split.rho_plus[points];
                [z.re, z.im]
            },
            tail_mass_physical: tail_phys,
            tail_mass_positive_frequency: tail_plus,
            contrast: if tail_phys > 0.0 { tail_plus / tail_phys } else { f64::INFINITY },
            centroid: moved.centroid(),
        };
        io::write_json(&ctx.path("localized_summary.json"), &summary)?;
        Ok(serde_json::to_value(&summary).map_err(Error::from)?)
    } else {
        let dt = dt.unwrap_or(50.0 / (c * k_max));
        let hw = halfwidth.unwrap_or(10.0) / k_max;
        let r_end = (c * dt).abs() + extent.min(100.0) / k_max;
        let step = r_end / points as f64;
        let coords: Vec<f64> = (1..=points).map(|i| i as f64 * step).collect();
        let rho_plus = coords
            .iter()
            .map(|&r| crate::localization::localized_density_3d(r, dt, k_max, &ctx.units))
            .collect::<crate::Result<Vec<_>>>()?;
        io::write_split_density_csv(&ctx.path("localized_3d.csv"), "r", &coords, &rho_plus, dt, k_max, units)?;
        let shell = shell_mass_3d(dt, k_max, hw, &ctx.units)?;
        let summary = Localized3dSummary {
            dim,
            k_max,
            dt,
            shell_radius: shell.shell_radius,
            halfwidth: hw,
            window_mass: shell.window,
            total_mass: shell.total,
            shell_fraction: shell.fraction,
        };
        io::write_json(&ctx.path("localized_summary.json"), &summary)?;
        Ok(serde_json::to_value(&summary).map_err(Error::from)?)
    }
}

#[derive(Debug, Serialize)]
pub struct CircuitResults {
    pub probabilities: BTreeMap<String, f64>,
    pub delays: BTreeMap<String, f64>,
    pub absorbed: f64,
    pub total: f64,
    pub coincidences: Vec<(String, String, f64)>,
    pub ledger: Vec<LedgerRow>,
    pub interface_convention: FresnelConvention,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<BTreeMap<String, u64>>,
    pub seed: u64,
}

/// Runs a parsed netlist and assembles the results record.
pub fn circuit_results(netlist: &Netlist, samples: u64, seed: u64, convention: FresnelConvention) -> crate::Result<CircuitResults> {
    let (state, ledger) = run_circuit(netlist)?;
    let mut coincidences = Vec::new();
    for (i, a) in netlist.detectors.iter().enumerate() {
        for b in &netlist.detectors[i + 1..] {
            coincidences.push((a.clone(), b.clone(), coincidence_probability(&state, a, b)?));
        }
    }
    let samples = (samples > 0).then(|| {
        sample_counts(&state, seed, samples)
            .into_iter()
            .map(|(o, n)| {
                let key = match o {
                    Outcome::Detector(d) => d,
                    Outcome::Absorbed => "absorbed".to_string(),
                };
                (key, n)
            })
            .collect()
    });
    Ok(CircuitResults {
        probabilities: state.detector_probabilities(),
        delays: state.ports.iter().map(|(k, p)| (k.clone(), p.delay)).collect(),
        absorbed: state.absorbed,
        total: state.total(),
        coincidences,
        ledger: ledger.rows,
        interface_convention: convention,
        samples,
        seed,
    })
}

fn cmd_circuit(ctx: &Context, path: &Path, samples: u64) -> CliResult<serde_json::Value> {
    let text = std::fs::read_to_string(path).map_err(Error::from)?;
    let mut netlist = Netlist::from_json(&text, ctx.grid, path.parent())?;
    if ctx.convention == FresnelConvention::PaperLiteral {
        for e in &mut netlist.elements {
            if let ElementSpec::Interface { convention, .. } = &mut e.spec {
                *convention = FresnelConvention::PaperLiteral;
            }
        }
    }
    let violations = validate(&netlist);
    if !violations.is_empty() {
        io::write_json(&ctx.path("violations.json"), &violations)?;
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(Error::Validation(list).into());
    }
    let results = circuit_results(&netlist, samples, ctx.seed, ctx.convention)?;
    io::write_json(&ctx.path("results.json"), &results)?;
    let value = serde_json::to_value(&results).map_err(Error::from)?;
    let ledger = Ledger {
        rows: results.ledger.clone(),
    };
    if ledger.max_imbalance() > LEDGER_TOL {
        return Err(breach(format!("ledger imbalance {:e} exceeds {LEDGER_TOL:e}", ledger.max_imbalance())));
    }
    if (results.total - 1.0).abs() > CONSERVATION_TOL {
        return Err(breach(format!("detector + absorbed probability = {} (expected 1)", results.total)));
    }
    Ok(value)
}

#[derive(Debug, Serialize)]
struct FresnelReport {
    n1: [f64; 2],
    n2: [f64; 2],
    coefficients: FresnelCoefficients,
    flux_conserving: FresnelCoefficients,
    conservation_defect: f64,
    conserves_flux: bool,
}

fn cmd_fresnel(ctx: &Context, n1: Complex64, n2: Complex64) -> CliResult<serde_json::Value> {
    let used = fresnel_interface(n1, n2, ctx.convention)?;
    let reference = fresnel_interface(n1, n2, FresnelConvention::FluxConserving)?;
    let report = FresnelReport {
        n1: [n1.re, n1.im],
        n2: [n2.re, n2.im],
        coefficients: used,
        flux_conserving: reference,
        conservation_defect: used.defect,
        conserves_flux: used.defect.abs() <= 1e-12,
    };
    io::write_json(&ctx.path("fresnel.json"), &report)?;
    Ok(serde_json::to_value(&report).map_err(Error::from)?)
}

#[derive(Debug, Serialize)]
struct MomentumSummary {
    report: MomentumReport,
    n_squared: Option<f64>,
    mirror_reflect: [f64; 3],
    mirror_absorb: [f64; 3],
}

fn cmd_momentum(ctx: &Context, args: &StateArgs, chi: Complex64) -> CliResult<serde_json::Value> {
    let c = load_state(args, ctx.grid)?;
    let report = momentum_report(&c, chi);
    let p = [report.p_abraham, 0.0, 0.0];
    let summary = MomentumSummary {
        report,
        n_squared: (chi.im == 0.0).then_some(1.0 + chi.re),
        mirror_reflect: mirror_momentum_kick(p, KickMode::Reflect),
        mirror_absorb: mirror_momentum_kick(p, KickMode::Absorb),
    };
    io::write_json(&ctx.path("momentum.json"), &summary)?;
    Ok(serde_json::to_value(&summary).map_err(Error::from)?)
}

fn dispatch(cli: &Cli) -> CliResult<serde_json::Value> {
    let units = Units::from_mode(match cli.units {
        UnitsArg::Natural => UnitMode::Natural,
        UnitsArg::Si => UnitMode::Si,
    });
    let grid = KGrid1D::new(cli.grid.n, cli.grid.dk, cli.grid.area, units)?;
    std::fs::create_dir_all(&cli.out).map_err(Error::from)?;
    let ctx = Context {
        units,
        grid,
        out: cli.out.clone(),
        seed: cli.seed,
        convention: if cli.paper_convention {
            FresnelConvention::PaperLiteral
        } else {
            FresnelConvention::FluxConserving
        },
    };
    match &cli.command {
        Command::Density { state, t, dt } => cmd_density(&ctx, state, *t, *dt),
        Command::Localized {
            dim,
            k_max,
            dt,
            points,
            extent,
            halfwidth,
        } => cmd_localized(&ctx, *dim, *k_max, *dt, *points, *extent, *halfwidth),
        Command::Circuit { netlist, samples } => cmd_circuit(&ctx, netlist, *samples),
        Command::Fresnel { n1, n2 } => cmd_fresnel(&ctx, *n1, *n2),
        Command::Momentum { state, chi } => cmd_momentum(&ctx, state, *chi),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(value) => {
            let text = serde_json::to_string_pretty(&value).unwrap_or_default();
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            EXIT_OK
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
