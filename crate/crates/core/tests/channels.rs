use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use qplasm::channels::*;
use qplasm::states::*;

const PI: f64 = std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn opts(cap: usize) -> FockOptions {
    FockOptions { hard_cap: cap }
}

fn fock(spec: &StateSpec) -> State {
    make_state(spec, Representation::Fock, opts(128)).unwrap()
}

fn gauss(spec: &StateSpec) -> State {
    make_state(spec, Representation::Gaussian, opts(128)).unwrap()
}

fn poisson(mean: f64, n: usize) -> f64 {
    (-mean + n as f64 * mean.ln() - (1..=n).map(|k| (k as f64).ln()).sum::<f64>()).exp()
}

#[test]
fn loss_on_a_two_photon_state() {
    let s = fock(&StateSpec::Fock { n: 2 });
    let out = apply_loss(&s, 0.5, 0).unwrap();
    let p = out.as_fock().unwrap().marginal(0);
    for (got, want) in p.iter().zip([0.25, 0.5, 0.25]) {
        assert!((got - want).abs() < 1e-14);
    }
    assert!(matches!(out.as_fock().unwrap().data(), FockData::Diagonal(_)));
}

#[test]
fn unit_efficiency_is_the_identity() {
    for s in [fock(&StateSpec::Tmsv { r: 0.5, theta: 0.2 }), gauss(&StateSpec::Tmsv { r: 0.5, theta: 0.2 })] {
        assert_eq!(apply_loss(&s, 1.0, 1).unwrap(), s);
    }
}

#[test]
fn loss_thins_coherent_light() {
    let alpha = c(1.5, -0.8);
    let eta = 0.37;
    let out = apply_loss(&fock(&StateSpec::Coherent { alpha }), eta, 0).unwrap();
    let p = out.as_fock().unwrap().marginal(0);
    let mean = eta * alpha.norm_sqr();
    for (n, x) in p.iter().enumerate().take(25) {
        assert!((x - poisson(mean, n)).abs() < 1e-12, "n = {n}");
    }
    let g = apply_loss(&gauss(&StateSpec::Coherent { alpha }), eta, 0).unwrap();
    let st = photon_statistics(&g, 0).unwrap();
    assert_relative_eq!(st.mean, mean, max_relative = 1e-12);
    assert!(st.mandel_q.abs() < 1e-12);
}

#[test]
fn hong_ou_mandel_dip() {
    let s = fock(&StateSpec::TwinFock { n: 1 });
    let out = apply_beam_splitter(&s, 0.5, PI / 2.0, opts(64)).unwrap();
    let f = out.as_fock().unwrap();
    assert!(f.probability(1, 1) < 1e-15);
    assert_relative_eq!(f.probability(2, 0), 0.5, epsilon = 1e-14);
    assert_relative_eq!(f.probability(0, 2), 0.5, epsilon = 1e-14);
    let d = f.dims()[1];
    let amps = f.amplitudes().unwrap();
    // equal weights with a common phase
    let ratio = amps[2 * d] / amps[2];
    assert_relative_eq!(ratio.norm(), 1.0, epsilon = 1e-14);
    assert!((ratio - 1.0).norm() < 1e-14);
}

#[test]
fn full_transmission_is_the_identity() {
    let spec = StateSpec::product(StateSpec::Fock { n: 2 }, StateSpec::Coherent { alpha: c(0.3, 0.4) });
    let s = fock(&spec);
    let out = apply_beam_splitter(&s, 1.0, 0.7, opts(64)).unwrap();
    let (a, b) = (s.as_fock().unwrap(), out.as_fock().unwrap());
    let d = [a.dims()[0].max(b.dims()[0]), a.dims()[1].max(b.dims()[1])];
    let (a, b) = (a.padded(d).unwrap(), b.padded(d).unwrap());
    for (x, y) in a.amplitudes().unwrap().iter().zip(b.amplitudes().unwrap()) {
        assert!((x - y).norm() < 1e-12);
    }
    let g = gauss(&StateSpec::Tmsd { alpha: c(0.5, 0.1), r: 0.4, theta: 1.0 });
    let out = apply_beam_splitter(&g, 1.0, 0.7, opts(64)).unwrap();
    let (a, b) = (g.as_gaussian().unwrap(), out.as_gaussian().unwrap());
    assert!((&a.v - &b.v).abs().max() < 1e-15 && (&a.d - &b.d).abs().max() < 1e-15);
}

#[test]
fn beam_splitter_maps_coherent_amplitudes() {
    let alpha = c(0.9, 0.4);
    let (t, th): (f64, f64) = (0.3, 0.8);
    let want_a = alpha * t.sqrt();
    let want_b = -Complex64::from_polar((1.0 - t).sqrt(), -th) * alpha;
    let spec = StateSpec::product(StateSpec::Coherent { alpha }, StateSpec::Vacuum);

    let out = apply_beam_splitter(&gauss(&spec), t, th, opts(64)).unwrap();
    let g = out.as_gaussian().unwrap();
    let s2 = 2f64.sqrt();
    assert_relative_eq!(g.d[0], s2 * want_a.re, epsilon = 1e-14);
    assert_relative_eq!(g.d[1], s2 * want_a.im, epsilon = 1e-14);
    assert_relative_eq!(g.d[2], s2 * want_b.re, epsilon = 1e-14);
    assert_relative_eq!(g.d[3], s2 * want_b.im, epsilon = 1e-14);

    let out = apply_beam_splitter(&fock(&spec), t, th, opts(64)).unwrap();
    let f = out.as_fock().unwrap();
    let d = f.dims()[1];
    let amps = f.amplitudes().unwrap();
    assert!((amps[d] / amps[0] - want_a).norm() < 1e-12);
    assert!((amps[1] / amps[0] - want_b).norm() < 1e-12);
}

#[test]
fn phase_shifts() {
    let spec = StateSpec::product(StateSpec::Coherent { alpha: c(1.0, 0.2) }, StateSpec::Fock { n: 2 });
    let s = fock(&spec);
    assert_eq!(apply_phase(&s, 0.0, PhaseKind::Single { mode: 0 }).unwrap(), s);
    let out = apply_phase(&s, 1.3, PhaseKind::Relative).unwrap();
    let (p, q) = (out.as_fock().unwrap().joint_distribution(), s.as_fock().unwrap().joint_distribution());
    assert!(p.iter().zip(&q).all(|(x, y)| (x - y).abs() < 1e-15));

    let (r, th, phi) = (0.7, 0.4, 0.9);
    let sq = gauss(&StateSpec::SqueezedVacuum { r, theta: th });
    let out = apply_phase(&sq, phi, PhaseKind::Single { mode: 0 }).unwrap();
    let want = GaussianState::squeezed_vacuum(r, th + 2.0 * phi);
    assert!((&out.as_gaussian().unwrap().v - &want.v).abs().max() < 1e-14);

    let sqf = fock(&StateSpec::SqueezedVacuum { r, theta: th });
    let out = apply_phase(&sqf, phi, PhaseKind::Single { mode: 0 }).unwrap();
    let want = fock(&StateSpec::SqueezedVacuum { r, theta: th + 2.0 * phi });
    for (x, y) in out.as_fock().unwrap().amplitudes().unwrap().iter().zip(want.as_fock().unwrap().amplitudes().unwrap()) {
        assert!((x - y).norm() < 1e-13);
    }
}

#[test]
fn squeezer_examples() {
    let vac = StateSpec::product(StateSpec::Vacuum, StateSpec::Vacuum);
    for s in [fock(&vac), gauss(&vac)] {
        let same = apply_two_mode_squeezer(&s, 1.0, PI, opts(64)).unwrap();
        assert_eq!(number_moments(&same).mean, [0.0, 0.0]);
        let g = 2.5;
        let out = apply_two_mode_squeezer(&s, g, PI, opts(128)).unwrap();
        let m = number_moments(&out);
        assert_relative_eq!(m.mean[0], g - 1.0, max_relative = 1e-9);
        assert_relative_eq!(m.mean[1], g - 1.0, max_relative = 1e-9);
        assert!(nrf(&out).unwrap().abs() < 1e-9);
    }
    let seed = StateSpec::product(StateSpec::Coherent { alpha: c(1.3, 0.0) }, StateSpec::Vacuum);
    let r: f64 = 0.6;
    let out = apply_two_mode_squeezer(&gauss(&seed), r.cosh().powi(2), PI, opts(64)).unwrap();
    let a2 = 1.69;
    let want = a2 / (a2 + 2.0 * (1.0 + a2) * r.sinh().powi(2));
    assert_relative_eq!(nrf(&out).unwrap(), want, max_relative = 1e-10);
}

#[test]
fn gain_below_one_is_rejected() {
    let s = gauss(&StateSpec::product(StateSpec::Vacuum, StateSpec::Vacuum));
    assert!(apply_two_mode_squeezer(&s, 0.9, PI, opts(64)).is_err());
    assert!(apply_loss(&s, 1.2, 0).is_err());
    assert!(apply_beam_splitter(&s, -0.1, 0.0, opts(64)).is_err());
    assert!(apply_loss(&s, 0.5, 2).is_err());
}

#[test]
fn pipeline_agrees_across_representations() {
    for r in [0.0, 0.3, 0.7, 1.0] {
        let input = StateSpec::product(StateSpec::Coherent { alpha: c(0.8, -0.3) }, StateSpec::Vacuum);
        let chain = [
            ChannelSpec::squeezer_r(r, PI),
            ChannelSpec::loss(0.7, 0),
            ChannelSpec::loss(0.9, 1),
            ChannelSpec::beam_splitter(0.3),
        ];
        let f = apply_chain(&fock(&input), &chain, opts(200)).unwrap();
        let g = apply_chain(&gauss(&input), &chain, opts(200)).unwrap();
        let (mf, mg) = (number_moments(&f), number_moments(&g));
        for k in 0..2 {
            assert!((mf.mean[k] - mg.mean[k]).abs() < 1e-6 * mg.mean[k].max(1.0), "r = {r}");
            assert!((mf.variance[k] - mg.variance[k]).abs() < 1e-6 * mg.variance[k].max(1.0), "r = {r} {mf:?} {mg:?}");
        }
        assert!((mf.covariance - mg.covariance).abs() < 1e-6 * mg.covariance.abs().max(1.0), "{mf:?} {mg:?}");
    }
}

#[test]
fn beam_splitter_output_needing_a_larger_cutoff_is_a_resource_error() {
    let s = fock(&StateSpec::TwinFock { n: 40 });
    assert!(matches!(
        apply_beam_splitter(&s, 0.5, PI / 2.0, opts(64)),
        Err(qplasm::Error::Resource { .. })
    ));
}

proptest! {
    #[test]
    fn loss_composes(n in 0usize..15, e1 in 0.0f64..=1.0, e2 in 0.0f64..=1.0) {
        let s = fock(&StateSpec::Fock { n });
        let two = apply_loss(&apply_loss(&s, e1, 0).unwrap(), e2, 0).unwrap();
        let one = apply_loss(&s, e1 * e2, 0).unwrap();
        let (p, q) = (two.as_fock().unwrap().marginal(0), one.as_fock().unwrap().marginal(0));
        for (x, y) in p.iter().zip(&q) {
            prop_assert!((x - y).abs() < 1e-12);
        }

        let g = gauss(&StateSpec::SqueezedVacuum { r: 0.1 * n as f64, theta: 0.3 });
        let two = apply_loss(&apply_loss(&g, e1, 0).unwrap(), e2, 0).unwrap();
        let one = apply_loss(&g, e1 * e2, 0).unwrap();
        let d = (&two.as_gaussian().unwrap().v - &one.as_gaussian().unwrap().v).abs().max();
        prop_assert!(d < 1e-12);
    }

    #[test]
    fn beam_splitter_conserves_photons(
        n in 0usize..6, m in 0usize..6, t in 0.0f64..=1.0, th in -PI..PI,
    ) {
        let s = fock(&StateSpec::product(StateSpec::Fock { n }, StateSpec::Fock { n: m }));
        let out = apply_beam_splitter(&s, t, th, opts(64)).unwrap();
        let mo = number_moments(&out);
        prop_assert!((mo.mean[0] + mo.mean[1] - (n + m) as f64).abs() < 1e-12);
        let total = out.as_fock().unwrap().total_number_distribution();
        prop_assert!((total[n + m] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_channels_stay_physical(
        r in 0.0f64..1.5, ar in -2.0f64..2.0, eta in 0.0f64..=1.0, t in 0.0f64..=1.0,
        phi in -PI..PI, g in 1.0f64..4.0,
    ) {
        let s = gauss(&StateSpec::Tmsd { alpha: c(ar, 0.5), r, theta: PI });
        let chain = [
            ChannelSpec::loss(eta, 0),
            ChannelSpec::relative_phase(phi),
            ChannelSpec::beam_splitter(t),
            ChannelSpec::squeezer(g),
            ChannelSpec::loss(eta, 1),
        ];
        let out = apply_chain(&s, &chain, FockOptions::default()).unwrap();
        prop_assert!(out.as_gaussian().unwrap().check_physical().is_ok());
    }
}
