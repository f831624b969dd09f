//! Deterministic summation and adaptive Gauss–Kronrod quadrature.
//!
//! All reductions in the crate go through [`pairwise_sum`] (or its complex
//! twin) so results do not depend on how a caller chunks the data.

use num_complex::Complex64;

const PAIRWISE_BLOCK: usize = 32;

/// Pairwise (cascade) summation with a fixed split point.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().fold(0.0, |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_sum_complex(values: &[Complex64]) -> Complex64 {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().fold(Complex64::new(0.0, 0.0), |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum_complex(&values[..mid]) + pairwise_sum_complex(&values[mid..])
}

/// Pairwise sum of `f(i)` for `i in 0..n`.
pub fn pairwise_sum_by(n: usize, f: impl Fn(usize) -> f64) -> f64 {
    let values: Vec<f64> = (0..n).map(f).collect();
    pairwise_sum(&values)
}

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn kronrod15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += sum * WGK[j];
        if j % 2 == 1 {
            gauss += sum * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    Segment { a, b, value, error }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: Complex64,
    pub error: f64,
    pub segments: usize,
}

/// Globally adaptive G7/K15 quadrature of a complex integrand on `[a, b]`.
///
/// The interval is first cut into `initial` equal pieces, which matters for
/// oscillatory kernels where a single K15 panel would alias.
pub fn integrate_complex<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    initial: usize,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Quadrature {
    let initial = initial.max(1);
    let width = (b - a) / initial as f64;
    let mut segments: Vec<Segment> = (0..initial)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == initial { b } else { lo + width };
            kronrod15(&f, lo, hi)
        })
        .collect();

    loop {
        let values: Vec<Complex64> = segments.iter().map(|s| s.value).collect();
        let errors: Vec<f64> = segments.iter().map(|s| s.error).collect();
        let total = pairwise_sum_complex(&values);
        let err = pairwise_sum(&errors);
        if err <= abs_tol.max(rel_tol * total.norm()) || segments.len() >= max_segments {
            return Quadrature {
                value: total,
                error: err,
                segments: segments.len(),
            };
        }
        // Bisect the worst panel; ties break toward the lowest index.
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, be), (i, s)| {
                if s.error > be {
                    (i, s.error)
                } else {
                    (bi, be)
                }
            });
        let seg = segments[worst];
        let mid = 0.5 * (seg.a + seg.b);
        segments[worst] = kronrod15(&f, seg.a, mid);
        segments.insert(worst + 1, kronrod15(&f, mid, seg.b));
    }
}

/// Real-valued convenience wrapper around [`integrate_complex`].
pub fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    initial: usize,
    abs_tol: f64,
    rel_tol: f64,
) -> Quadrature {
    integrate_complex(|x| Complex64::new(f(x), 0.0), a, b, initial, abs_tol, rel_tol, 20_000)
}

/// sin(x)/x with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}
