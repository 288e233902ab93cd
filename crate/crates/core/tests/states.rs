use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use qplasm::channels::*;
use qplasm::states::*;
use qplasm::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn build(spec: &StateSpec, repr: Representation, cap: usize) -> State {
    make_state(spec, repr, FockOptions { hard_cap: cap }).unwrap()
}

fn both(spec: &StateSpec, cap: usize) -> (NumberMoments, NumberMoments) {
    let f = build(spec, Representation::Fock, cap);
    let g = build(spec, Representation::Gaussian, cap);
    (number_moments(&f), number_moments(&g))
}

fn assert_moments_close(a: &NumberMoments, b: &NumberMoments, tol: f64) {
    for k in 0..2 {
        assert!((a.mean[k] - b.mean[k]).abs() <= tol * b.mean[k].max(1.0), "mean {a:?} vs {b:?}");
        assert!(
            (a.variance[k] - b.variance[k]).abs() <= tol * b.variance[k].max(1.0),
            "variance {a:?} vs {b:?}"
        );
    }
    assert!((a.covariance - b.covariance).abs() <= tol * b.covariance.abs().max(1.0));
}

#[test]
fn tmsv_amplitudes_follow_the_geometric_law() {
    let (r, th) = (0.8, 0.6);
    let s = build(&StateSpec::Tmsv { r, theta: th }, Representation::Fock, 64);
    let f = s.as_fock().unwrap();
    let d = f.dims()[1];
    let amps = f.amplitudes().unwrap();
    let ratio = -Complex64::from_polar(f64::tanh(r), th);
    for n in 0..10 {
        let q = amps[(n + 1) * d + n + 1] / amps[n * d + n];
        assert!((q - ratio).norm() < 1e-12);
    }
    assert_relative_eq!(amps[0].re, 1.0 / f64::cosh(r), epsilon = 1e-12);
    let m = number_moments(&s);
    assert_relative_eq!(m.mean[0], f64::sinh(r).powi(2), epsilon = 1e-9);
    assert!(f.leakage() < LEAKAGE_WARN && f.truncation_warning().is_none());
}

#[test]
fn fock_state_is_a_delta() {
    let s = build(&StateSpec::Fock { n: 3 }, Representation::Fock, 64);
    let p = s.as_fock().unwrap().marginal(0);
    for (n, x) in p.iter().enumerate() {
        assert_eq!(*x, if n == 3 { 1.0 } else { 0.0 });
    }
    let st = photon_statistics(&s, 0).unwrap();
    assert_eq!((st.mean, st.variance, st.mandel_q), (3.0, 0.0, -1.0));
}

#[test]
fn tmsd_means_in_both_representations() {
    let (alpha, r) = (c(1.2, -0.5), 0.4);
    let spec = StateSpec::Tmsd { alpha, r, theta: std::f64::consts::PI };
    let (f, g) = both(&spec, 64);
    let want = spec.mean_photons();
    let (s2, c2, a2) = (f64::sinh(r).powi(2), f64::cosh(r).powi(2), alpha.norm_sqr());
    assert_relative_eq!(want[0], s2 + a2 * c2);
    assert_relative_eq!(want[1], s2 + a2 * s2);
    for k in 0..2 {
        assert_relative_eq!(g.mean[k], want[k], max_relative = 1e-12);
        assert_relative_eq!(f.mean[k], want[k], max_relative = 1e-9);
    }
    assert_moments_close(&f, &g, 1e-6);
}

#[test]
fn tmsv_agrees_across_representations_up_to_r_1_5() {
    for i in 0..=15 {
        let r = 0.1 * i as f64;
        let (f, g) = both(&StateSpec::Tmsv { r, theta: 0.3 * i as f64 }, 200);
        assert_moments_close(&f, &g, 1e-6);
    }
}

#[test]
fn squeezed_vacuum_agrees_across_representations() {
    for r in [0.2, 0.6, 1.0] {
        let spec = StateSpec::product(
            StateSpec::SqueezedVacuum { r, theta: 1.1 },
            StateSpec::Coherent { alpha: c(0.7, 0.3) },
        );
        let (f, g) = both(&spec, 200);
        assert_moments_close(&f, &g, 1e-6);
    }
}

#[test]
fn cutoff_overflow_is_a_resource_error() {
    let err = make_state(&StateSpec::Tmsv { r: 1.5, theta: 0.0 }, Representation::Fock, FockOptions::default());
    assert!(matches!(err, Err(Error::Resource { .. })));
    let err = make_state(&StateSpec::Fock { n: 70 }, Representation::Fock, FockOptions::default());
    assert!(matches!(err, Err(Error::Resource { .. })));
}

#[test]
fn number_states_have_no_gaussian_form() {
    for spec in [StateSpec::Fock { n: 1 }, StateSpec::Noon { n: 2 }, StateSpec::TwinFock { n: 1 }] {
        let err = make_state(&spec, Representation::Gaussian, FockOptions::default()).unwrap_err();
        assert!(err.is_config());
    }
}

#[test]
fn photon_statistics_examples() {
    let alpha = c(1.1, 0.9);
    for repr in [Representation::Fock, Representation::Gaussian] {
        let s = build(&StateSpec::Coherent { alpha }, repr, 64);
        let st = photon_statistics(&s, 0).unwrap();
        assert_relative_eq!(st.mean, alpha.norm_sqr(), max_relative = 1e-10);
        assert_relative_eq!(st.variance, alpha.norm_sqr(), max_relative = 1e-10);
        assert!(st.mandel_q.abs() < 1e-9);

        let r = 0.7;
        let n = f64::sinh(r).powi(2);
        let s = build(&StateSpec::Tmsv { r, theta: 0.0 }, repr, 64);
        let st = photon_statistics(&s, 1).unwrap();
        assert_relative_eq!(st.variance / st.mean, n + 1.0, max_relative = 1e-9);

        let vac = build(&StateSpec::Vacuum, repr, 64);
        let st = photon_statistics(&vac, 0).unwrap();
        assert!(st.vacuum && st.mandel_q == 0.0);
        assert!(photon_statistics(&vac, 1).is_err());
    }
}

#[test]
fn nrf_examples() {
    for repr in [Representation::Fock, Representation::Gaussian] {
        let pc = StateSpec::product(
            StateSpec::Coherent { alpha: c(1.0, 0.5) },
            StateSpec::Coherent { alpha: c(-0.3, 1.4) },
        );
        assert_relative_eq!(nrf(&build(&pc, repr, 64)).unwrap(), 1.0, epsilon = 1e-9);
        let tmsv = build(&StateSpec::Tmsv { r: 0.9, theta: 0.2 }, repr, 64);
        assert!(nrf(&tmsv).unwrap().abs() < 1e-9);
        let tmsd = build(&StateSpec::Tmsd { alpha: c(0.0, 0.0), r: 0.5, theta: 0.0 }, repr, 64);
        assert!(nrf(&tmsd).unwrap().abs() < 1e-9);
        let vac = build(&StateSpec::product(StateSpec::Vacuum, StateSpec::Vacuum), repr, 64);
        assert!(matches!(nrf(&vac), Err(Error::Degenerate { .. })));
    }
    let tf = build(&StateSpec::TwinFock { n: 4 }, Representation::Fock, 64);
    assert_eq!(nrf(&tf).unwrap(), 0.0);
}

#[test]
fn tmsd_input_nrf_matches_its_closed_form() {
    for (a2, r) in [(1.0, 0.3), (10.0, 0.8), (4.0, 1.0)] {
        let alpha = c(f64::sqrt(a2), 0.0);
        let want = a2 / (a2 + 2.0 * (1.0 + a2) * f64::sinh(r).powi(2));
        let spec = StateSpec::Tmsd { alpha, r, theta: std::f64::consts::PI };
        for repr in [Representation::Gaussian, Representation::Fock] {
            let got = nrf(&build(&spec, repr, 200)).unwrap();
            assert!((got - want).abs() < 1e-6, "{repr:?} {a2} {r}: {got} vs {want}");
        }
    }
}

#[test]
fn construction_is_deterministic() {
    let spec = StateSpec::Tmsd { alpha: c(0.4, 0.2), r: 0.7, theta: 1.0 };
    assert_eq!(build(&spec, Representation::Fock, 64), build(&spec, Representation::Fock, 64));
    assert_eq!(build(&spec, Representation::Gaussian, 64), build(&spec, Representation::Gaussian, 64));
}

#[test]
fn gaussian_constructor_validates() {
    use nalgebra::{DMatrix, DVector};
    assert!(GaussianState::new(DVector::zeros(2), DMatrix::identity(2, 2) * 0.4).is_err());
    let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.1, 1.0]);
    assert!(GaussianState::new(DVector::zeros(2), asym).is_err());
    assert!(GaussianState::new(DVector::zeros(2), DMatrix::identity(2, 2) * 0.5).is_ok());
    assert_relative_eq!(GaussianState::squeezed_vacuum(0.9, 0.4).purity(), 1.0, epsilon = 1e-12);
}

#[test]
fn fock_constructors_check_normalisation() {
    assert!(FockState::single_pure(vec![c(0.5, 0.0), c(0.5, 0.0)]).is_err());
    assert!(FockState::single_diagonal(vec![0.5, 0.5]).is_ok());
    assert!(FockState::two_mode_diagonal([2, 2], vec![0.25; 3]).is_err());
}

proptest! {
    #[test]
    fn nrf_is_non_negative(
        r in 0.0f64..1.0, ar in -1.5f64..1.5, ai in -1.5f64..1.5, eta in 0.0f64..1.0,
        t in 0.0f64..1.0,
    ) {
        let spec = StateSpec::Tmsd { alpha: c(ar, ai), r, theta: std::f64::consts::PI };
        let g = build(&spec, Representation::Gaussian, 64);
        let out = apply_chain(&g, &[ChannelSpec::loss(eta, 0), ChannelSpec::beam_splitter(t)], FockOptions::default()).unwrap();
        if let Ok(s) = nrf(&out) {
            prop_assert!(s >= 0.0);
        }
    }

    #[test]
    fn mandel_q_is_at_least_minus_one(n in 0usize..20, eta in 0.0f64..1.0) {
        let s = build(&StateSpec::Fock { n }, Representation::Fock, 64);
        let s = apply_loss(&s, eta, 0).unwrap();
        let st = photon_statistics(&s, 0).unwrap();
        prop_assert!(st.variance >= 0.0 && st.mandel_q >= -1.0 - 1e-12);
    }
}
