//! Single-photon propagation through a feed-forward optical netlist.
//!
//! Each port carries a complex path amplitude and a unit-number spectrum.
//! Elements act multiplicatively in k-space, so loss and dispersion are
//! resolved per frequency. A ledger records photon number into and out of
//! every element.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockState, ModeIndex, MixMatrix2, UNITARITY_TOL};
use crate::optics::{fresnel_interface, group_delay, propagate_in_medium, ElementSpec, FresnelConvention, Medium};
use crate::io::StateSpec;
use crate::spectral::{KGrid1D, SpectralAmplitude};

/// Tolerance on source normalization and end-to-end conservation.
pub const CONSERVATION_TOL: f64 = 1e-9;
/// Tolerance on each ledger row.
pub const LEDGER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub id: String,
    pub spec: ElementSpec,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    pub port: String,
    pub amplitude: Complex64,
    pub state: SpectralAmplitude,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    pub elements: Vec<Element>,
    pub sources: Vec<Source>,
    pub detectors: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Arity,
    Cycle,
    Wiring,
    Element,
    Source,
    Detector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

impl Violation {
    fn new(kind: ViolationKind, message: impl Into<String>) -> Self {
        Violation {
            kind,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.message)
    }
}

// ---------------------------------------------------------------- JSON schema

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetlistJson {
    #[serde(default)]
    grid: Option<GridJson>,
    elements: Vec<ElementJson>,
    sources: Vec<SourceJson>,
    detectors: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct GridJson {
    #[serde(rename = "N")]
    n: usize,
    dk: f64,
    #[serde(default = "one")]
    area: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
struct ElementJson {
    id: String,
    kind: String,
    #[serde(default)]
    params: serde_json::Map<String, serde_json::Value>,
    #[serde(rename = "in")]
    inputs: Vec<String>,
    #[serde(rename = "out")]
    outputs: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct SourceJson {
    port: String,
    #[serde(default)]
    amplitude: Option<[f64; 2]>,
    state: StateSpec,
}

fn param_f64(params: &serde_json::Map<String, serde_json::Value>, key: &str) -> std::result::Result<f64, String> {
    params
        .get(key)
        .and_then(|v| v.as_f64())
        .ok_or_else(|| format!("missing numeric parameter '{key}'"))
}

fn param_complex(params: &serde_json::Map<String, serde_json::Value>, key: &str) -> std::result::Result<Complex64, String> {
    match params.get(key) {
        Some(serde_json::Value::Number(n)) => Ok(Complex64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        Some(serde_json::Value::Array(a)) if a.len() == 2 => match (a[0].as_f64(), a[1].as_f64()) {
            (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
            _ => Err(format!("parameter '{key}' must be [re, im]")),
        },
        _ => Err(format!("missing complex parameter '{key}' (number or [re, im])")),
    }
}

fn parse_element(e: &ElementJson, base_dir: Option<&std::path::Path>) -> std::result::Result<ElementSpec, String> {
    let p = &e.params;
    let convention = match p.get("convention").and_then(|v| v.as_str()) {
        None | Some("flux_conserving") => FresnelConvention::FluxConserving,
        Some("paper_literal") => FresnelConvention::PaperLiteral,
        Some(other) => return Err(format!("unknown Fresnel convention '{other}'")),
    };
    match e.kind.as_str() {
        "phase_shifter" => Ok(ElementSpec::PhaseShifter { phi: param_f64(p, "phi")? }),
        "beam_splitter" => Ok(ElementSpec::BeamSplitter {
            t: param_complex(p, "t")?,
            r: param_complex(p, "r")?,
        }),
        "medium_segment" => {
            let length = param_f64(p, "length")?;
            let medium = if let Some(path) = p.get("table").and_then(|v| v.as_str()) {
                let full = match base_dir {
                    Some(dir) => dir.join(path),
                    None => std::path::PathBuf::from(path),
                };
                let file = std::fs::File::open(&full).map_err(|err| format!("cannot open {}: {err}", full.display()))?;
                Medium::from_csv(file).map_err(|err| err.to_string())?
            } else if let Some(n) = p.get("n").and_then(|v| v.as_f64()) {
                Medium::with_index(n).map_err(|err| err.to_string())?
            } else {
                Medium::constant(param_complex(p, "chi")?).map_err(|err| err.to_string())?
            };
            Ok(ElementSpec::MediumSegment { medium, length })
        }
        "interface" => Ok(ElementSpec::Interface {
            n_in: param_complex(p, "n_in")?,
            n_out: param_complex(p, "n_out")?,
            convention,
        }),
        "mirror" => Ok(ElementSpec::Mirror),
        other => Err(format!("unknown element kind '{other}'")),
    }
}

impl Netlist {
    /// Parses the netlist JSON. `grid` is used unless the file carries its own.
    /// Relative medium-table paths resolve against `base_dir`.
    pub fn from_json(text: &str, grid: KGrid1D, base_dir: Option<&std::path::Path>) -> Result<Self> {
        let raw: NetlistJson = serde_json::from_str(text)?;
        let grid = match raw.grid {
            Some(g) => KGrid1D::new(g.n, g.dk, g.area, *grid.units())?,
            None => grid,
        };
        let mut problems = Vec::new();
        let mut elements = Vec::new();
        for e in &raw.elements {
            match parse_element(e, base_dir) {
                Ok(spec) => elements.push(Element {
                    id: e.id.clone(),
                    spec,
                    inputs: e.inputs.clone(),
                    outputs: e.outputs.clone(),
                }),
                Err(msg) => problems.push(format!("element '{}': {msg}", e.id)),
            }
        }
        let mut sources = Vec::new();
        for s in raw.sources {
            let state = s.state.into_state(grid);
            match state {
                Ok(state) => sources.push(Source {
                    port: s.port,
                    amplitude: s.amplitude.map(|[re, im]| Complex64::new(re, im)).unwrap_or(Complex64::new(1.0, 0.0)),
                    state,
                }),
                Err(err) => problems.push(format!("source at '{}': {err}", s.port)),
            }
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(Netlist {
            elements,
            sources,
            detectors: raw.detectors,
        })
    }
}

// ---------------------------------------------------------------- validation

fn element_invariants(e: &Element) -> Option<String> {
    match &e.spec {
        ElementSpec::BeamSplitter { t, r } => {
            let defect = (t.norm_sqr() + r.norm_sqr() - 1.0).abs();
            (defect.is_nan() || defect > UNITARITY_TOL).then(|| format!("beam splitter '{}' has |t|²+|r|² − 1 = {defect:e}", e.id))
        }
        ElementSpec::PhaseShifter { phi } => (!phi.is_finite()).then(|| format!("phase shifter '{}' has non-finite phase", e.id)),
        ElementSpec::MediumSegment { length, .. } => {
            (!(length.is_finite() && *length >= 0.0)).then(|| format!("medium '{}' has invalid length {length}", e.id))
        }
        ElementSpec::Interface { n_in, n_out, convention } => fresnel_interface(*n_in, *n_out, *convention)
            .err()
            .map(|err| format!("interface '{}': {err}", e.id)),
        ElementSpec::Mirror => None,
    }
}

/// Topological order of element indices (ties by declaration order), or the
/// indices left on a cycle.
fn topological_order(n: &Netlist) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let mut consumer: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, e) in n.elements.iter().enumerate() {
        for p in &e.inputs {
            consumer.entry(p.as_str()).or_default().push(i);
        }
    }
    let mut indegree = vec![0usize; n.elements.len()];
    let mut edges: Vec<Vec<usize>> = vec![Vec::new(); n.elements.len()];
    for (i, e) in n.elements.iter().enumerate() {
        for p in &e.outputs {
            for &j in consumer.get(p.as_str()).map(|v| v.as_slice()).unwrap_or(&[]) {
                edges[i].push(j);
                indegree[j] += 1;
            }
        }
    }
    let mut ready: VecDeque<usize> = (0..n.elements.len()).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n.elements.len());
    while let Some(i) = ready.pop_front() {
        order.push(i);
        for &j in &edges[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.push_back(j);
            }
        }
    }
    if order.len() == n.elements.len() {
        Ok(order)
    } else {
        Err((0..n.elements.len()).filter(|&i| indegree[i] > 0).collect())
    }
}

/// Every structural and element-level problem with the netlist; empty
/// means it can be run.
pub fn validate(n: &Netlist) -> Vec<Violation> {
    use ViolationKind::*;
    let mut out = Vec::new();

    let mut ids = BTreeSet::new();
    for e in &n.elements {
        if !ids.insert(e.id.as_str()) {
            out.push(Violation::new(Element, format!("duplicate element id '{}'", e.id)));
        }
    }

    let mut producers: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    let mut consumers: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for s in &n.sources {
        producers.entry(s.port.as_str()).or_default().push(format!("source@{}", s.port));
    }
    for e in &n.elements {
        let (ni, no) = e.spec.arity();
        if e.inputs.len() != ni || e.outputs.len() != no {
            out.push(Violation::new(
                Arity,
                format!(
                    "{} '{}' needs {ni} input(s) and {no} output(s), has {} and {}",
                    e.spec.kind(),
                    e.id,
                    e.inputs.len(),
                    e.outputs.len()
                ),
            ));
        }
        if let Some(msg) = element_invariants(e) {
            out.push(Violation::new(Element, msg));
        }
        for p in &e.inputs {
            consumers.entry(p.as_str()).or_default().push(e.id.clone());
        }
        for p in &e.outputs {
            producers.entry(p.as_str()).or_default().push(e.id.clone());
        }
    }
    for d in &n.detectors {
        consumers.entry(d.as_str()).or_default().push(format!("detector@{d}"));
    }

    for (port, who) in &consumers {
        if who.len() > 1 {
            out.push(Violation::new(Wiring, format!("port '{port}' feeds more than one input: {}", who.join(", "))));
        }
    }
    for (port, who) in &producers {
        if who.len() > 1 {
            out.push(Violation::new(Wiring, format!("port '{port}' is driven more than once: {}", who.join(", "))));
        }
        if !consumers.contains_key(port) {
            out.push(Violation::new(Wiring, format!("port '{port}' is not terminated by an element or detector")));
        }
    }

    let mut seen = BTreeSet::new();
    for d in &n.detectors {
        if !seen.insert(d.as_str()) {
            out.push(Violation::new(Detector, format!("detector '{d}' listed twice")));
        }
        if !producers.contains_key(d.as_str()) {
            out.push(Violation::new(Detector, format!("detector '{d}' is not driven by any element or source")));
        }
    }
    if n.detectors.is_empty() {
        out.push(Violation::new(Detector, "netlist has no detectors"));
    }

    if n.sources.is_empty() {
        out.push(Violation::new(Source, "netlist has no sources"));
    } else {
        let first = &n.sources[0].state;
        for s in &n.sources[1..] {
            if s.state.grid() != first.grid() || s.state.helicity() != first.helicity() {
                out.push(Violation::new(Source, format!("source '{}' uses a different grid or helicity", s.port)));
            }
        }
        let total: f64 = n
            .sources
            .iter()
            .map(|s| s.amplitude.norm_sqr() * s.state.photon_number())
            .sum();
        if (total - 1.0).abs() > CONSERVATION_TOL {
            out.push(Violation::new(Source, format!("sources carry {total} photons, expected 1")));
        }
    }

    if let Err(stuck) = topological_order(n) {
        let names: Vec<&str> = stuck.iter().map(|&i| n.elements[i].id.as_str()).collect();
        out.push(Violation::new(Cycle, format!("wiring contains a cycle through {}", names.join(", "))));
    }
    out
}

// ---------------------------------------------------------------- propagation

/// Photon content of one port: `amplitude · spectrum`, spectrum unit-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct PortPulse {
    pub amplitude: Complex64,
    pub spectrum: SpectralAmplitude,
    /// Accumulated group delay relative to free flight.
    pub delay: f64,
}

impl PortPulse {
    fn from_wave(wave: SpectralAmplitude, delay: f64) -> Option<Self> {
        let number = wave.photon_number();
        if number == 0.0 {
            return None;
        }
        let a = number.sqrt();
        Some(PortPulse {
            amplitude: Complex64::new(a, 0.0),
            spectrum: wave.scaled(Complex64::new(1.0 / a, 0.0)),
            delay,
        })
    }

    fn wave(&self) -> SpectralAmplitude {
        self.spectrum.scaled(self.amplitude)
    }

    pub fn probability(&self) -> f64 {
        self.amplitude.norm_sqr() * self.spectrum.photon_number()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseState {
    pub ports: BTreeMap<String, PortPulse>,
    pub detectors: Vec<String>,
    pub absorbed: f64,
}

impl PulseState {
    /// Click probability at a detector port (0 if nothing reaches it).
    pub fn probability(&self, port: &str) -> Result<f64> {
        if !self.detectors.iter().any(|d| d == port) {
            return Err(Error::Port(port.to_string()));
        }
        Ok(self.ports.get(port).map(|p| p.probability()).unwrap_or(0.0))
    }

    pub fn detector_probabilities(&self) -> BTreeMap<String, f64> {
        self.detectors
            .iter()
            .map(|d| (d.clone(), self.ports.get(d).map(|p| p.probability()).unwrap_or(0.0)))
            .collect()
    }

    /// Σ detector probabilities + absorbed.
    pub fn total(&self) -> f64 {
        self.detector_probabilities().values().sum::<f64>() + self.absorbed
    }

    /// Single-excitation Fock state over the detector modes (amplitude
    /// phases dropped; only occupations matter for click statistics).
    pub fn detector_fock_state(&self) -> Result<FockState> {
        let modes: Vec<ModeIndex> = (0..self.detectors.len()).map(ModeIndex::plus).collect();
        let mut state = FockState::zero(modes, 1)?;
        for (i, d) in self.detectors.iter().enumerate() {
            let p = self.ports.get(d).map(|p| p.probability()).unwrap_or(0.0);
            let mut occ = vec![0; self.detectors.len()];
            occ[i] = 1;
            state.set_amplitude(occ, Complex64::new(p.sqrt(), 0.0))?;
        }
        Ok(state)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerRow {
    pub element: String,
    pub kind: String,
    pub number_in: f64,
    pub number_out: f64,
    pub absorbed: f64,
}

impl LedgerRow {
    /// number_in − number_out − absorbed
    pub fn imbalance(&self) -> f64 {
        self.number_in - self.number_out - self.absorbed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Ledger {
    pub rows: Vec<LedgerRow>,
}

impl Ledger {
    pub fn total_absorbed(&self) -> f64 {
        self.rows.iter().map(|r| r.absorbed).sum()
    }

    pub fn max_imbalance(&self) -> f64 {
        self.rows.iter().map(|r| r.imbalance().abs()).fold(0.0, f64::max)
    }
}

fn combine(waves: &[(Complex64, Option<&PortPulse>)], template: &SpectralAmplitude) -> Result<(SpectralAmplitude, f64)> {
    let mut acc = SpectralAmplitude::zeros(*template.grid(), template.helicity());
    let mut weight = 0.0;
    let mut delay = 0.0;
    for (coeff, pulse) in waves {
        if let Some(p) = pulse {
            acc = acc.add_scaled(&p.wave(), *coeff)?;
            let w = coeff.norm_sqr() * p.probability();
            weight += w;
            delay += w * p.delay;
        }
    }
    Ok((acc, if weight > 0.0 { delay / weight } else { 0.0 }))
}

/// Runs a validated netlist in topological order.
pub fn run_circuit(n: &Netlist) -> Result<(PulseState, Ledger)> {
    let violations = validate(n);
    if !violations.is_empty() {
        return Err(Error::Validation(violations.iter().map(|v| v.to_string()).collect()));
    }
    let order = topological_order(n).map_err(|_| Error::Validation(vec!["cycle".into()]))?;
    let template = n.sources[0].state.clone();
    let mut ports: BTreeMap<String, PortPulse> = BTreeMap::new();
    for s in &n.sources {
        ports.insert(
            s.port.clone(),
            PortPulse {
                amplitude: s.amplitude,
                spectrum: s.state.clone(),
                delay: 0.0,
            },
        );
    }
    let mut ledger = Ledger::default();
    let mut absorbed_total = 0.0;

    for i in order {
        let e = &n.elements[i];
        let inputs: Vec<Option<PortPulse>> = e.inputs.iter().map(|p| ports.remove(p)).collect();
        let number_in: f64 = inputs.iter().flatten().map(|p| p.probability()).sum();
        let mut absorbed = 0.0;
        let outputs: Vec<Option<PortPulse>> = match &e.spec {
            ElementSpec::PhaseShifter { phi } => vec![inputs[0].clone().map(|mut p| {
                p.amplitude *= Complex64::from_polar(1.0, *phi);
                p
            })],
            ElementSpec::Mirror => vec![inputs[0].clone()],
            ElementSpec::BeamSplitter { t, r } => {
                let mix = MixMatrix2::new(*t, *r)?;
                let (t, r) = (mix.t(), mix.r());
                let (a, b) = (inputs[0].as_ref(), inputs[1].as_ref());
                let (wa, da) = combine(&[(t, a), (-r.conj(), b)], &template)?;
                let (wb, db) = combine(&[(r, a), (t.conj(), b)], &template)?;
                vec![PortPulse::from_wave(wa, da), PortPulse::from_wave(wb, db)]
            }
            ElementSpec::MediumSegment { medium, length } => match &inputs[0] {
                Some(p) => {
                    let spectrum = propagate_in_medium(&p.spectrum, medium, *length)?;
                    let delay = p.delay + group_delay(&p.spectrum, medium, *length)?;
                    let out = PortPulse {
                        amplitude: p.amplitude,
                        spectrum,
                        delay,
                    };
                    absorbed = (p.probability() - out.probability()).max(0.0);
                    vec![PortPulse::from_wave(out.wave(), delay)]
                }
                None => vec![None],
            },
            ElementSpec::Interface { n_in, n_out, convention } => {
                let f = fresnel_interface(*n_in, *n_out, *convention)?;
                let tau = f.t * (n_out.re / n_in.re).sqrt();
                let scale = |p: &PortPulse, k: Complex64| PortPulse {
                    amplitude: p.amplitude * k,
                    spectrum: p.spectrum.clone(),
                    delay: p.delay,
                };
                match &inputs[0] {
                    Some(p) => vec![Some(scale(p, tau)), Some(scale(p, f.r))],
                    None => vec![None, None],
                }
            }
        };
        let number_out: f64 = outputs.iter().flatten().map(|p| p.probability()).sum();
        for (port, pulse) in e.outputs.iter().zip(outputs) {
            if let Some(p) = pulse {
                ports.insert(port.clone(), p);
            }
        }
        absorbed_total += absorbed;
        ledger.rows.push(LedgerRow {
            element: e.id.clone(),
            kind: e.spec.kind().to_string(),
            number_in,
            number_out,
            absorbed,
        });
    }

    Ok((
        PulseState {
            ports,
            detectors: n.detectors.clone(),
            absorbed: absorbed_total,
        },
        ledger,
    ))
}

/// Joint click probability at two distinct detectors, read off the
/// two-excitation components of the detector Fock state.
pub fn coincidence_probability(p: &PulseState, det_a: &str, det_b: &str) -> Result<f64> {
    let ia = p.detectors.iter().position(|d| d == det_a).ok_or_else(|| Error::Port(det_a.into()))?;
    let ib = p.detectors.iter().position(|d| d == det_b).ok_or_else(|| Error::Port(det_b.into()))?;
    if ia == ib {
        return Err(Error::Port(format!("coincidence needs two distinct detectors, got '{det_a}' twice")));
    }
    let state = p.detector_fock_state()?;
    Ok(state
        .terms()
        .filter(|(occ, _)| occ[ia] >= 1 && occ[ib] >= 1)
        .fold(0.0, |acc, (_, a)| acc + a.norm_sqr()))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Detector(String),
    Absorbed,
}

/// One counting event; afterwards the field is in the zero-photon state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Detection {
    pub outcome: Outcome,
    pub photons_remaining: u32,
}

fn outcome_table(p: &PulseState) -> Vec<(Outcome, f64)> {
    let mut table: Vec<(Outcome, f64)> = p
        .detector_probabilities()
        .into_iter()
        .map(|(d, prob)| (Outcome::Detector(d), prob))
        .collect();
    table.push((Outcome::Absorbed, p.absorbed));
    table
}

fn draw(table: &[(Outcome, f64)], total: f64, rng: &mut ChaCha8Rng) -> Outcome {
    let x = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (o, prob) in table {
        acc += prob;
        if x < acc {
            return o.clone();
        }
    }
    // Rounding left x at the top edge: fall back to the last nonzero bucket.
    table
        .iter()
        .rev()
        .find(|(_, prob)| *prob > 0.0)
        .map(|(o, _)| o.clone())
        .unwrap_or(Outcome::Absorbed)
}

pub fn detect_sample(p: &PulseState, seed: u64) -> Detection {
    let table = outcome_table(p);
    let total: f64 = table.iter().map(|(_, w)| w).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Detection {
        outcome: draw(&table, total, &mut rng),
        photons_remaining: 0,
    }
}

/// Outcome counts for `count` independent one-photon runs from one seed.
pub fn sample_counts(p: &PulseState, seed: u64, count: u64) -> BTreeMap<Outcome, u64> {
    let table = outcome_table(p);
    let total: f64 = table.iter().map(|(_, w)| w).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<Outcome, u64> = table.iter().map(|(o, _)| (o.clone(), 0)).collect();
    for _ in 0..count {
        *counts.entry(draw(&table, total, &mut rng)).or_default() += 1;
    }
    counts
}
