//! Truncated multimode bosonic Fock space.
//!
//! States are sparse maps from occupation tuples to amplitudes. Every mode
//! shares one truncation level `n_max`; creation past it is an error rather
//! than a silent clip.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

pub const NORMALIZATION_TOL: f64 = 1e-12;
pub const UNITARITY_TOL: f64 = 1e-12;

/// Transverse helicity label, ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub enum Helicity {
    Plus,
    Minus,
}

impl Helicity {
    pub fn value(self) -> i32 {
        match self {
            Helicity::Plus => 1,
            Helicity::Minus => -1,
        }
    }
}

impl TryFrom<i32> for Helicity {
    type Error = Error;

    fn try_from(v: i32) -> Result<Self> {
        match v {
            1 => Ok(Helicity::Plus),
            -1 => Ok(Helicity::Minus),
            other => Err(Error::InvalidMode(format!("helicity must be +1 or -1, got {other}"))),
        }
    }
}

impl From<Helicity> for i32 {
    fn from(h: Helicity) -> i32 {
        h.value()
    }
}

/// A discrete plane-wave mode: helicity plus k-mode label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndex {
    pub helicity: Helicity,
    pub mode_id: usize,
}

impl ModeIndex {
    pub fn new(helicity: i32, mode_id: usize) -> Result<Self> {
        Ok(ModeIndex {
            helicity: Helicity::try_from(helicity)?,
            mode_id,
        })
    }

    pub fn plus(mode_id: usize) -> Self {
        ModeIndex {
            helicity: Helicity::Plus,
            mode_id,
        }
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(λ={:+}, k#{})", self.helicity.value(), self.mode_id)
    }
}

/// Sparse amplitude vector over occupation tuples of a fixed mode list.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    modes: Vec<ModeIndex>,
    n_max: u32,
    amplitudes: BTreeMap<Vec<u32>, Complex64>,
}

impl FockState {
    /// The zero vector (not the vacuum).
    pub fn zero(modes: Vec<ModeIndex>, n_max: u32) -> Result<Self> {
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(Error::InvalidMode(format!("mode {m} declared twice")));
            }
        }
        Ok(FockState {
            modes,
            n_max,
            amplitudes: BTreeMap::new(),
        })
    }

    pub fn vacuum(modes: Vec<ModeIndex>, n_max: u32) -> Result<Self> {
        let occupation = vec![0; modes.len()];
        Self::basis(modes, n_max, occupation)
    }

    /// A single occupation-number basis state with unit amplitude.
    pub fn basis(modes: Vec<ModeIndex>, n_max: u32, occupation: Vec<u32>) -> Result<Self> {
        let mut s = Self::zero(modes, n_max)?;
        s.set_amplitude(occupation, Complex64::new(1.0, 0.0))?;
        Ok(s)
    }

    pub fn modes(&self) -> &[ModeIndex] {
        &self.modes
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Complex64)> {
        self.amplitudes.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn amplitude(&self, occupation: &[u32]) -> Complex64 {
        self.amplitudes.get(occupation).copied().unwrap_or_default()
    }

    /// Sets one amplitude; exact zeros are dropped from the map.
    pub fn set_amplitude(&mut self, occupation: Vec<u32>, value: Complex64) -> Result<()> {
        if occupation.len() != self.modes.len() {
            return Err(Error::Dimension(format!(
                "occupation tuple has {} entries for {} modes",
                occupation.len(),
                self.modes.len()
            )));
        }
        if let Some(&n) = occupation.iter().find(|&&n| n > self.n_max) {
            return Err(Error::Truncation(format!("occupation {n} exceeds n_max = {}", self.n_max)));
        }
        if value == Complex64::new(0.0, 0.0) {
            self.amplitudes.remove(&occupation);
        } else {
            self.amplitudes.insert(occupation, value);
        }
        Ok(())
    }

    fn accumulate(&mut self, occupation: Vec<u32>, value: Complex64) {
        let entry = self.amplitudes.entry(occupation).or_default();
        *entry += value;
    }

    fn prune(mut self) -> Self {
        self.amplitudes.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        self
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn mode_position(&self, mode: ModeIndex) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| *m == mode)
            .ok_or_else(|| Error::InvalidMode(format!("mode {mode} is not part of this state")))
    }

    pub fn norm_sqr(&self) -> f64 {
        let v: Vec<f64> = self.amplitudes.values().map(|a| a.norm_sqr()).collect();
        pairwise_sum(&v)
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORMALIZATION_TOL
    }

    pub fn scaled(&self, factor: Complex64) -> FockState {
        let mut out = self.clone();
        for v in out.amplitudes.values_mut() {
            *v *= factor;
        }
        out.prune()
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &FockState, factor: Complex64) -> Result<FockState> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, v) in &other.amplitudes {
            out.accumulate(k.clone(), factor * v);
        }
        Ok(out.prune())
    }

    fn check_compatible(&self, other: &FockState) -> Result<()> {
        if self.modes != other.modes || self.n_max != other.n_max {
            return Err(Error::Dimension(format!(
                "mode sets differ: {} modes/n_max {} vs {} modes/n_max {}",
                self.modes.len(),
                self.n_max,
                other.modes.len(),
                other.n_max
            )));
        }
        Ok(())
    }
}

/// a_mode |state⟩.
pub fn apply_annihilation(state: &FockState, mode: ModeIndex) -> Result<FockState> {
    let pos = state.mode_position(mode)?;
    let mut out = FockState::zero(state.modes.clone(), state.n_max)?;
    for (occ, amp) in &state.amplitudes {
        let n = occ[pos];
        if n == 0 {
            continue;
        }
        let mut lowered = occ.clone();
        lowered[pos] = n - 1;
        out.accumulate(lowered, amp * (n as f64).sqrt());
    }
    Ok(out.prune())
}

/// a†_mode |state⟩; fails if any occupied term already sits at `n_max`.
pub fn apply_creation(state: &FockState, mode: ModeIndex) -> Result<FockState> {
    let pos = state.mode_position(mode)?;
    let mut out = FockState::zero(state.modes.clone(), state.n_max)?;
    for (occ, amp) in &state.amplitudes {
        let n = occ[pos];
        if n >= state.n_max {
            return Err(Error::Truncation(format!(
                "creation in mode {mode} from occupation {n} exceeds n_max = {}",
                state.n_max
            )));
        }
        let mut raised = occ.clone();
        raised[pos] = n + 1;
        out.accumulate(raised, amp * ((n + 1) as f64).sqrt());
    }
    Ok(out.prune())
}

/// (a†)^n |0⟩ / √(n!) in a state space over `modes`.
pub fn n_photon_state(modes: Vec<ModeIndex>, mode: ModeIndex, n: u32, n_max: u32) -> Result<FockState> {
    if n > n_max {
        return Err(Error::Truncation(format!("n = {n} exceeds n_max = {n_max}")));
    }
    let mut state = FockState::vacuum(modes, n_max)?;
    state.mode_position(mode)?;
    for k in 1..=n {
        state = apply_creation(&state, mode)?.scaled(Complex64::new(1.0 / (k as f64).sqrt(), 0.0));
    }
    Ok(state)
}

/// ⟨s1|s2⟩, conjugate-linear in `s1`.
pub fn inner_product(s1: &FockState, s2: &FockState) -> Result<Complex64> {
    s1.check_compatible(s2)?;
    let (re, im): (Vec<f64>, Vec<f64>) = s1
        .amplitudes
        .iter()
        .filter_map(|(k, a)| s2.amplitudes.get(k).map(|b| a.conj() * b))
        .map(|z| (z.re, z.im))
        .unzip();
    Ok(Complex64::new(pairwise_sum(&re), pairwise_sum(&im)))
}

/// ⟨a†a⟩ for one mode of a normalized state.
pub fn number_expectation(state: &FockState, mode: ModeIndex) -> Result<f64> {
    let pos = state.mode_position(mode)?;
    let norm_sqr = state.norm_sqr();
    if (norm_sqr - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Normalization { norm_sqr });
    }
    let v: Vec<f64> = state
        .amplitudes
        .iter()
        .map(|(k, a)| k[pos] as f64 * a.norm_sqr())
        .collect();
    Ok(pairwise_sum(&v))
}

/// Dense single-mode ladder matrices on levels `0..=n_max`, returned as
/// (annihilation, creation), row-major.
pub fn ladder_matrices(n_max: u32) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let dim = n_max as usize + 1;
    let mut a = vec![vec![0.0; dim]; dim];
    for n in 1..dim {
        a[n - 1][n] = (n as f64).sqrt();
    }
    let mut adag = vec![vec![0.0; dim]; dim];
    for (i, row) in a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            adag[j][i] = v;
        }
    }
    (a, adag)
}

fn matmul(x: &[Vec<f64>], y: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dim = x.len();
    (0..dim)
        .map(|i| (0..dim).map(|j| (0..dim).map(|k| x[i][k] * y[k][j]).sum()).collect())
        .collect()
}

/// Max-norm deviation of `[a, a†]` from the identity for a truncated mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommutatorResidual {
    /// Residual on levels `0..n_max` (the cutoff level excluded).
    pub retained: f64,
    /// Residual over the whole truncated space, cutoff included.
    pub full: f64,
    /// Diagonal entry of `[a, a†]` at the cutoff level (equals `-n_max`).
    pub top_level_value: f64,
}

pub fn commutator_residual(n_max: u32) -> Result<CommutatorResidual> {
    if n_max < 2 {
        return Err(Error::Truncation(format!("commutator check needs n_max >= 2, got {n_max}")));
    }
    let (a, adag) = ladder_matrices(n_max);
    let aad = matmul(&a, &adag);
    let ada = matmul(&adag, &a);
    let dim = n_max as usize + 1;
    let mut retained: f64 = 0.0;
    let mut full: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let identity = if i == j { 1.0 } else { 0.0 };
            let dev = (aad[i][j] - ada[i][j] - identity).abs();
            full = full.max(dev);
            if i < dim - 1 && j < dim - 1 {
                retained = retained.max(dev);
            }
        }
    }
    let top = dim - 1;
    Ok(CommutatorResidual {
        retained,
        full,
        top_level_value: aad[top][top] - ada[top][top],
    })
}

/// Two-mode mixer `(t, r; -r*, t*)`.
///
/// Creation operators map as `a†_A → t a†_A + r a†_B` and
/// `a†_B → -r* a†_A + t* a†_B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixMatrix2 {
    t: Complex64,
    r: Complex64,
}

impl MixMatrix2 {
    pub fn new(t: Complex64, r: Complex64) -> Result<Self> {
        let defect = (t.norm_sqr() + r.norm_sqr() - 1.0).abs();
        if !defect.is_finite() || defect > UNITARITY_TOL {
            return Err(Error::Unitarity { defect });
        }
        Ok(MixMatrix2 { t, r })
    }

    pub fn identity() -> Self {
        MixMatrix2 {
            t: Complex64::new(1.0, 0.0),
            r: Complex64::new(0.0, 0.0),
        }
    }

    /// 50:50 splitter with a real reflection amplitude.
    pub fn balanced() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        MixMatrix2 {
            t: Complex64::new(h, 0.0),
            r: Complex64::new(h, 0.0),
        }
    }

    pub fn t(&self) -> Complex64 {
        self.t
    }

    pub fn r(&self) -> Complex64 {
        self.r
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.t, self.r], [-self.r.conj(), self.t.conj()]]
    }

    /// Max-norm of `U U† - I`.
    pub fn unitarity_defect(&self) -> f64 {
        let m = self.matrix();
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let v = m[i][0] * m[j][0].conj() + m[i][1] * m[j][1].conj();
                let id = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - id).norm());
            }
        }
        worst
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn sqrt_factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * (i as f64).sqrt())
}

/// Applies a two-mode mixer to every term of `state`.
pub fn two_mode_mix(state: &FockState, mode_a: ModeIndex, mode_b: ModeIndex, u: &MixMatrix2) -> Result<FockState> {
    let defect = u.unitarity_defect();
    if defect > UNITARITY_TOL {
        return Err(Error::Unitarity { defect });
    }
    let pa = state.mode_position(mode_a)?;
    let pb = state.mode_position(mode_b)?;
    if pa == pb {
        return Err(Error::InvalidMode(format!("mixer needs two distinct modes, got {mode_a} twice")));
    }
    let (t, r) = (u.t, u.r);
    let mut out = FockState::zero(state.modes.clone(), state.n_max)?;
    for (occ, amp) in &state.amplitudes {
        let (na, nb) = (occ[pa], occ[pb]);
        if na + nb > state.n_max {
            return Err(Error::Truncation(format!(
                "combined occupation {} of the mixed modes exceeds n_max = {}",
                na + nb,
                state.n_max
            )));
        }
        let norm = 1.0 / (sqrt_factorial(na) * sqrt_factorial(nb));
        for p in 0..=na {
            for q in 0..=nb {
                let coeff = t.powu(p) * r.powu(na - p) * (-r.conj()).powu(q) * t.conj().powu(nb - q);
                let out_a = p + q;
                let out_b = na + nb - out_a;
                let weight = binomial(na, p) * binomial(nb, q) * sqrt_factorial(out_a) * sqrt_factorial(out_b) * norm;
                let mut target = occ.clone();
                target[pa] = out_a;
                target[pb] = out_b;
                out.accumulate(target, amp * coeff * weight);
            }
        }
    }
    Ok(out.prune())
}
