mod common;

use std::f64::consts::PI;

use common::simpson;
use num_complex::Complex64;
use photon_current::spectral::{
    evolve_free, make_gaussian_state, scalar_product, spectrum_from_fields, synthesize_fields, ScalarProductMethod,
    SpectralAmplitudeJson,
};
use photon_current::{Error, Helicity, KGrid1D, SpectralAmplitude, Units};

fn grid(n: usize, dk: f64) -> KGrid1D {
    KGrid1D::natural(n, dk).unwrap()
}

#[test]
fn gaussian_normalization_against_continuum_quadrature() {
    let dk = 0.5;
    let g = grid(4096, dk);
    let (k0, sigma) = (100.0 * dk, 5.0 * dk);
    let s = make_gaussian_state(k0, sigma, g, Helicity::Plus).unwrap();
    assert!((s.photon_number() - 1.0).abs() < 1e-10);
    // Continuum norm of the unnormalized profile: ∫ e^{−(k−k0)²/2σ²} dk/2π = σ√(2π)/2π.
    let peak = s.amplitudes().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let unnorm = simpson(|k| (-(k - k0).powi(2) / (2.0 * sigma * sigma)).exp(), k0 - 20.0 * sigma, k0 + 20.0 * sigma, 4000)
        / (2.0 * PI);
    let bin_nearest = ((k0 / dk).round() - 1.0) as usize;
    let scale = s.amplitudes()[bin_nearest].norm() / (-(g.k(bin_nearest) - k0).powi(2) / (4.0 * sigma * sigma)).exp();
    assert!((scale * scale * unnorm - 1.0).abs() < 1e-10, "{}", scale * scale * unnorm);
    assert!(peak > 0.0);
}

#[test]
fn narrow_gaussian_collapses_to_one_bin() {
    let g = grid(64, 1.0);
    let s = make_gaussian_state(20.0, 1e-3, g, Helicity::Plus).unwrap();
    assert!((s.photon_number() - 1.0).abs() < 1e-12);
    let occupied = s.amplitudes().iter().filter(|z| z.norm() > 1e-12).count();
    assert_eq!(occupied, 1);
    assert!(s.amplitudes()[19].norm() > 0.0);
}

#[test]
fn edge_gaussian_is_coverage_error() {
    let g = grid(256, 1.0);
    assert!(matches!(make_gaussian_state(250.0, 5.0, g, Helicity::Plus), Err(Error::GridCoverage(_))));
    assert!(matches!(make_gaussian_state(3.0, 5.0, g, Helicity::Plus), Err(Error::GridCoverage(_))));
}

#[test]
fn free_evolution_is_pure_phase() {
    let g = grid(512, 1.0);
    let s = make_gaussian_state(200.0, 8.0, g, Helicity::Minus).unwrap();
    assert_eq!(evolve_free(&s, 0.0), s);
    let e = evolve_free(&s, 13.7);
    assert!((e.photon_number() - s.photon_number()).abs() < 1e-12);
    for (j, (a, b)) in s.amplitudes().iter().zip(e.amplitudes()).enumerate() {
        let want = a * Complex64::from_polar(1.0, -g.omega(j) * 13.7);
        assert!((b - want).norm() < 1e-13);
    }
}

#[test]
fn single_bin_fields_match_plane_wave() {
    let g = grid(64, 0.25);
    let j = 9;
    let s = SpectralAmplitude::single_bin(g, Helicity::Plus, j).unwrap();
    let t = 0.37;
    let f = synthesize_fields(&s, t);
    let (k, w) = (g.k(j), g.omega(j));
    let c = s.amplitudes()[j];
    for i in 0..g.len() {
        let x = f.grid.x(i);
        let a = Complex64::i() * g.dk() / (2.0 * PI * w.sqrt()) * c * Complex64::from_polar(1.0, k * x - w * t);
        assert!((f.a_plus[i] - a).norm() < 1e-12 * a.norm().max(1.0));
        assert!((f.e_plus[i] - Complex64::i() * w * a).norm() < 1e-12 * w * a.norm().max(1.0));
        let real_a = f.a_plus[i] + f.a_plus[i].conj();
        assert_eq!(real_a.im, 0.0);
    }
}

#[test]
fn parseval_by_direct_summation() {
    let g = grid(128, 1.0);
    let s = make_gaussian_state(50.0, 4.0, g, Helicity::Plus).unwrap();
    let f = synthesize_fields(&s, 0.0);
    let dx = f.grid.dx;
    let lhs: f64 = f.a_plus.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx;
    // Two-sided sum Σ_j Σ_j' w_j w_j'* Σ_x e^{i(k_j − k_j')x} dx collapses to L Σ|w_j|².
    let pref = g.dk() / (2.0 * PI);
    let rhs: f64 = (0..g.len())
        .map(|j| (pref * s.amplitudes()[j]).norm_sqr() / g.omega(j))
        .sum::<f64>()
        * f.grid.length;
    assert!((lhs - rhs).abs() < 1e-12 * rhs, "{lhs} vs {rhs}");
}

#[test]
fn field_round_trip() {
    let g = grid(256, 0.5);
    let s = make_gaussian_state(60.0, 3.0, g, Helicity::Plus).unwrap().translated(1.3);
    let back = spectrum_from_fields(&synthesize_fields(&s, 2.5), g).unwrap();
    for (a, b) in s.amplitudes().iter().zip(back.amplitudes()) {
        assert!((a - b).norm() < 1e-10);
    }
}

#[test]
fn scalar_product_examples() {
    let g = grid(1024, 1.0);
    let plus = make_gaussian_state(300.0, 10.0, g, Helicity::Plus).unwrap();
    let minus = make_gaussian_state(300.0, 10.0, g, Helicity::Minus).unwrap();
    for m in [ScalarProductMethod::KSpace, ScalarProductMethod::XSpace { t: 0.4 }] {
        assert_eq!(scalar_product(&plus, &minus, m).unwrap(), Complex64::new(0.0, 0.0));
        let self_p = scalar_product(&plus, &plus, m).unwrap();
        assert!((self_p - Complex64::new(plus.photon_number(), 0.0)).norm() < 1e-10);
    }
    // Offset Gaussians: |⟨1|2⟩| = e^{−Δk²/8σ²}.
    let sigma = 10.0;
    let dk_off = 10.0 * sigma;
    let a = make_gaussian_state(300.0, sigma, g, Helicity::Plus).unwrap();
    let b = make_gaussian_state(300.0 + dk_off, sigma, g, Helicity::Plus).unwrap();
    let oracle = (-dk_off * dk_off / (8.0 * sigma * sigma)).exp();
    let got = scalar_product(&a, &b, ScalarProductMethod::KSpace).unwrap().norm();
    assert!((got - oracle).abs() < 1e-6, "{got} vs {oracle}");
    let other = KGrid1D::natural(512, 1.0).unwrap();
    let c = make_gaussian_state(100.0, 5.0, other, Helicity::Plus).unwrap();
    assert!(matches!(scalar_product(&a, &c, ScalarProductMethod::KSpace), Err(Error::Dimension(_))));
}

#[test]
fn json_round_trip_and_dimension_check() {
    let g = KGrid1D::new(16, 0.5, 2.0, Units::natural()).unwrap();
    let s = SpectralAmplitude::single_bin(g, Helicity::Minus, 4).unwrap();
    let js = SpectralAmplitudeJson::from_state(&s);
    let text = serde_json::to_string(&js).unwrap();
    assert!(text.contains("\"N\":16"));
    let back: SpectralAmplitudeJson = serde_json::from_str(&text).unwrap();
    assert_eq!(back.into_state(Units::natural()).unwrap(), s);
    let mut bad = SpectralAmplitudeJson::from_state(&s);
    bad.re.pop();
    assert!(matches!(bad.into_state(Units::natural()), Err(Error::Dimension(_))));
}
