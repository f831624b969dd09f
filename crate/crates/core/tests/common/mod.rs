//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use photon_current::circuit::Netlist;
use photon_current::KGrid1D;
use rand::Rng;
use serde_json::{json, Value};

pub const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

pub fn simpson_complex(f: impl Fn(f64) -> Complex64, a: f64, b: f64, n: usize) -> Complex64 {
    let re = simpson(|x| f(x).re, a, b, n);
    let im = simpson(|x| f(x).im, a, b, n);
    Complex64::new(re, im)
}

/// ∫₀^K k sin(ka) dk = (sin Ka − Ka cos Ka)/a², series near a = 0.
fn g(a: f64, k: f64) -> f64 {
    let x = k * a;
    if x.abs() < 0.5 {
        // Σ (−1)^{n+1} 2n x^{2n+1}/(2n+1)!
        let mut sum = 0.0;
        let mut term = x; // x^{2n+1}/(2n+1)! at n = 0
        for n in 1..14 {
            let m = 2 * n;
            term *= -x * x / (m as f64 * (m + 1) as f64);
            sum -= m as f64 * term;
        }
        return if a == 0.0 { 0.0 } else { sum / (a * a) };
    }
    (x.sin() - x * x.cos()) / (a * a)
}

/// ∫₀^K k cos(ka) dk = (cos Ka − 1 + Ka sin Ka)/a², series near a = 0.
fn h(a: f64, k: f64) -> f64 {
    let x = k * a;
    if x.abs() < 0.5 {
        // K² Σ (−1)^{n+1} (2n−1) x^{2n−2}/(2n)!
        let mut sum = 0.0;
        let mut term = 1.0; // x^{2n−2}/(2n)! at n = 0 scaled below
        for n in 1..14 {
            let m = 2 * n;
            term /= (m * (m - 1)) as f64;
            if n > 1 {
                term *= x * x;
            }
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * (m - 1) as f64 * term;
        }
        return k * k * sum;
    }
    (x.cos() - 1.0 + x * x.sin()) / (a * a)
}

/// Closed form of (1/4π²)∫₀^K k² sinc(kr) e^{−ikT} dk with T = cΔt.
pub fn rho_plus_3d_closed(r: f64, t: f64, k: f64) -> Complex64 {
    let re = g(r + t, k) + g(r - t, k);
    let im = h(r + t, k) - h(r - t, k);
    Complex64::new(re, im) / (8.0 * PI * PI * r)
}

/// Product of 2×2 complex matrices.
pub fn matmul2(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn grid() -> KGrid1D {
    KGrid1D::natural(256, 1.0).unwrap()
}

pub fn gaussian_source(port: &str) -> Value {
    json!({"port": port, "state": {"gaussian": {"k0": 60.0, "sigma": 4.0}}})
}

/// Mach–Zehnder with symmetric splitters (t = 1/√2, r = i/√2) and phase φ
/// on the upper arm; `d1` is the output that is bright at φ = 0.
pub fn mach_zehnder(phi: f64) -> Value {
    let bs = json!({"t": [H, 0.0], "r": [0.0, H]});
    json!({
        "elements": [
            {"id": "bs1", "kind": "beam_splitter", "params": bs, "in": ["a", "vac"], "out": ["upper", "lower"]},
            {"id": "ps", "kind": "phase_shifter", "params": {"phi": phi}, "in": ["upper"], "out": ["upper2"]},
            {"id": "bs2", "kind": "beam_splitter", "params": bs, "in": ["upper2", "lower"], "out": ["d2", "d1"]}
        ],
        "sources": [gaussian_source("a")],
        "detectors": ["d1", "d2"]
    })
}

pub fn parse(v: &Value) -> Netlist {
    Netlist::from_json(&v.to_string(), grid(), None).unwrap()
}

fn random_unit(rng: &mut impl Rng) -> (Complex64, Complex64) {
    let theta = rng.gen_range(0.0..PI / 2.0);
    let (pa, pb) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
    (Complex64::from_polar(theta.cos(), pa), Complex64::from_polar(theta.sin(), pb))
}

/// Random feed-forward netlist: one or two coherent sources, up to
/// `max_elements` elements, every open port terminated by a detector.
pub fn random_netlist(rng: &mut impl Rng, max_elements: usize) -> Value {
    let mut next = 0usize;
    let mut fresh = |prefix: &str| {
        next += 1;
        format!("{prefix}{next}")
    };
    let mut open: Vec<String> = Vec::new();
    let mut sources = Vec::new();
    let two = rng.gen_bool(0.3);
    let (a0, a1) = random_unit(rng);
    for (i, amp) in [a0, a1].into_iter().enumerate().take(if two { 2 } else { 1 }) {
        let port = format!("src{i}");
        let amp = if two { amp } else { Complex64::new(1.0, 0.0) };
        sources.push(json!({
            "port": port,
            "amplitude": [amp.re, amp.im],
            "state": {"gaussian": {"k0": 60.0, "sigma": 4.0}}
        }));
        open.push(port);
    }
    let mut elements = Vec::new();
    let count = rng.gen_range(1..=max_elements);
    for e in 0..count {
        let pick = rng.gen_range(0..open.len());
        let input = open.swap_remove(pick);
        let id = format!("e{e}");
        match rng.gen_range(0..5) {
            0 => {
                let second = if !open.is_empty() && rng.gen_bool(0.5) {
                    let j = rng.gen_range(0..open.len());
                    open.swap_remove(j)
                } else {
                    fresh("vac")
                };
                let (t, r) = random_unit(rng);
                let (o1, o2) = (fresh("p"), fresh("p"));
                elements.push(json!({
                    "id": id, "kind": "beam_splitter",
                    "params": {"t": [t.re, t.im], "r": [r.re, r.im]},
                    "in": [input, second], "out": [o1, o2]
                }));
                open.push(o1);
                open.push(o2);
            }
            1 => {
                let o = fresh("p");
                elements.push(json!({
                    "id": id, "kind": "phase_shifter",
                    "params": {"phi": rng.gen_range(-PI..PI)},
                    "in": [input], "out": [o]
                }));
                open.push(o);
            }
            2 => {
                let o = fresh("p");
                let chi = [rng.gen_range(0.0..2.0), rng.gen_range(0.0..0.01)];
                elements.push(json!({
                    "id": id, "kind": "medium_segment",
                    "params": {"chi": chi, "length": rng.gen_range(0.0..3.0)},
                    "in": [input], "out": [o]
                }));
                open.push(o);
            }
            3 => {
                let (o1, o2) = (fresh("p"), fresh("p"));
                let n_out = [rng.gen_range(1.0..3.0), rng.gen_range(0.0..0.5)];
                elements.push(json!({
                    "id": id, "kind": "interface",
                    "params": {"n_in": rng.gen_range(1.0..2.0), "n_out": n_out},
                    "in": [input], "out": [o1, o2]
                }));
                open.push(o1);
                open.push(o2);
            }
            _ => {
                let o = fresh("p");
                elements.push(json!({"id": id, "kind": "mirror", "params": {}, "in": [input], "out": [o]}));
                open.push(o);
            }
        }
    }
    json!({"elements": elements, "sources": sources, "detectors": open})
}
