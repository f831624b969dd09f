use num_complex::Complex64;
use photon_current::fock::{
    apply_annihilation, apply_creation, commutator_residual, inner_product, n_photon_state, number_expectation, two_mode_mix,
    FockState, MixMatrix2,
};
use photon_current::{Error, ModeIndex};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn one_mode() -> Vec<ModeIndex> {
    vec![ModeIndex::plus(0)]
}

/// Dense single-mode ladder matrices built from first principles.
fn ladder(n_max: usize) -> Vec<Vec<f64>> {
    let d = n_max + 1;
    let mut a = vec![vec![0.0; d]; d];
    for n in 1..d {
        a[n - 1][n] = (n as f64).sqrt();
    }
    a
}

fn to_vector(s: &FockState, n_max: usize) -> Vec<Complex64> {
    (0..=n_max).map(|n| s.amplitude(&[n as u32])).collect()
}

#[test]
fn annihilation_matches_dense_matrix() {
    let n_max = 6;
    let a = ladder(n_max);
    for n in 0..=n_max as u32 {
        let s = FockState::basis(one_mode(), n_max as u32, vec![n]).unwrap();
        let got = to_vector(&apply_annihilation(&s, ModeIndex::plus(0)).unwrap(), n_max);
        for row in 0..=n_max {
            let want = a[row][n as usize];
            assert!((got[row] - c(want, 0.0)).norm() < 1e-15, "n={n} row={row}");
        }
    }
    let three = FockState::basis(one_mode(), 5, vec![3]).unwrap();
    let out = apply_annihilation(&three, ModeIndex::plus(0)).unwrap();
    assert!((out.amplitude(&[2]) - c(3f64.sqrt(), 0.0)).norm() < 1e-15);
}

#[test]
fn creation_matches_dense_transpose() {
    let n_max = 6;
    let a = ladder(n_max);
    for n in 0..n_max as u32 {
        let s = FockState::basis(one_mode(), n_max as u32, vec![n]).unwrap();
        let got = to_vector(&apply_creation(&s, ModeIndex::plus(0)).unwrap(), n_max);
        for row in 0..=n_max {
            assert!((got[row] - c(a[n as usize][row], 0.0)).norm() < 1e-15);
        }
    }
    let one = FockState::basis(one_mode(), 4, vec![1]).unwrap();
    assert!((apply_creation(&one, ModeIndex::plus(0)).unwrap().amplitude(&[2]) - c(2f64.sqrt(), 0.0)).norm() < 1e-15);
}

#[test]
fn annihilation_edge_cases() {
    let vac = FockState::vacuum(one_mode(), 3).unwrap();
    assert!(apply_annihilation(&vac, ModeIndex::plus(0)).unwrap().is_zero());
    let modes = vec![ModeIndex::plus(0), ModeIndex::plus(1)];
    let one_other = FockState::basis(modes, 3, vec![0, 1]).unwrap();
    assert!(apply_annihilation(&one_other, ModeIndex::plus(0)).unwrap().is_zero());
    let err = apply_annihilation(&vac, ModeIndex::new(-1, 0).unwrap()).unwrap_err();
    assert!(matches!(err, Error::InvalidMode(_)));
}

#[test]
fn creation_at_cutoff_is_an_error() {
    let top = FockState::basis(one_mode(), 3, vec![3]).unwrap();
    assert!(matches!(apply_creation(&top, ModeIndex::plus(0)), Err(Error::Truncation(_))));
}

#[test]
fn n_photon_norms_from_explicit_amplitudes() {
    for n in [0u32, 2, 5] {
        let s = n_photon_state(one_mode(), ModeIndex::plus(0), n, 8).unwrap();
        let norm: f64 = s.terms().map(|(_, a)| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12, "n={n}");
        assert_eq!(s.terms().count(), 1);
    }
    assert!(matches!(
        n_photon_state(one_mode(), ModeIndex::plus(0), 9, 8),
        Err(Error::Truncation(_))
    ));
}

#[test]
fn inner_products() {
    let vac = FockState::vacuum(one_mode(), 2).unwrap();
    assert_eq!(inner_product(&vac, &vac).unwrap(), c(1.0, 0.0));
    let modes = vec![ModeIndex::plus(0), ModeIndex::plus(1)];
    let a = FockState::basis(modes.clone(), 2, vec![1, 0]).unwrap();
    let b = FockState::basis(modes, 2, vec![0, 1]).unwrap();
    assert_eq!(inner_product(&a, &b).unwrap(), c(0.0, 0.0));
    let two = n_photon_state(one_mode(), ModeIndex::plus(0), 2, 4).unwrap();
    let oracle: Complex64 = two.terms().map(|(_, z)| z.conj() * z).sum();
    assert!((inner_product(&two, &two).unwrap() - oracle).norm() < 1e-15);
    assert!((oracle - c(1.0, 0.0)).norm() < 1e-12);
    let other = FockState::vacuum(one_mode(), 3).unwrap();
    assert!(matches!(inner_product(&vac, &other), Err(Error::Dimension(_))));
}

#[test]
fn number_expectations() {
    let m = ModeIndex::plus(0);
    assert_eq!(number_expectation(&FockState::vacuum(one_mode(), 4).unwrap(), m).unwrap(), 0.0);
    let three = n_photon_state(one_mode(), m, 3, 4).unwrap();
    assert!((number_expectation(&three, m).unwrap() - 3.0).abs() < 1e-12);
    let mut sup = FockState::zero(one_mode(), 4).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    sup.set_amplitude(vec![0], c(h, 0.0)).unwrap();
    sup.set_amplitude(vec![1], c(h, 0.0)).unwrap();
    let oracle = 0.0 * h * h + 1.0 * h * h;
    assert!((number_expectation(&sup, m).unwrap() - oracle).abs() < 1e-15);
}

#[test]
fn commutator_residuals() {
    let r2 = commutator_residual(2).unwrap();
    assert!(r2.retained <= 1e-15);
    for n_max in [2u32, 8, 16] {
        let r = commutator_residual(n_max).unwrap();
        assert!(r.retained <= 1e-12);
        // Dense oracle: ([a,a†] − I) at the cutoff is −(n_max + 1).
        let a = ladder(n_max as usize);
        let d = n_max as usize + 1;
        let top = d - 1;
        let aad: f64 = (0..d).map(|k| a[top][k] * a[top][k]).sum();
        let ada: f64 = (0..d).map(|k| a[k][top] * a[k][top]).sum();
        assert!((r.top_level_value - (aad - ada)).abs() < 1e-12);
        assert!((r.top_level_value + n_max as f64).abs() < 1e-12);
        assert!((r.full - (aad - ada - 1.0).abs()).abs() < 1e-12);
    }
}

#[test]
fn mixer_examples() {
    let modes = vec![ModeIndex::plus(0), ModeIndex::plus(1)];
    let (ma, mb) = (modes[0], modes[1]);
    let one_zero = FockState::basis(modes.clone(), 3, vec![1, 0]).unwrap();
    let same = two_mode_mix(&one_zero, ma, mb, &MixMatrix2::identity()).unwrap();
    assert_eq!(same, one_zero);

    let t = c(0.6, 0.0);
    let r = c(0.0, 0.8);
    let u = MixMatrix2::new(t, r).unwrap();
    let out = two_mode_mix(&one_zero, ma, mb, &u).unwrap();
    assert!((out.amplitude(&[1, 0]) - t).norm() < 1e-15);
    assert!((out.amplitude(&[0, 1]) - r).norm() < 1e-15);
    assert!((t.norm_sqr() + r.norm_sqr() - 1.0).abs() < 1e-12);

    let bal = two_mode_mix(&one_zero, ma, mb, &MixMatrix2::balanced()).unwrap();
    let pa = bal.amplitude(&[1, 0]).norm_sqr();
    let pb = bal.amplitude(&[0, 1]).norm_sqr();
    assert!((pa - 0.5).abs() < 1e-15 && (pb - 0.5).abs() < 1e-15);
    assert_eq!(bal.amplitude(&[1, 1]), c(0.0, 0.0));

    assert!(matches!(MixMatrix2::new(c(0.9, 0.0), c(0.9, 0.0)), Err(Error::Unitarity { .. })));
}
