use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use qplasm::transduce::*;
use qplasm::Error;

const WP: f64 = 1.37e16;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gold_table() -> PermittivityTable {
    PermittivityTable::load(
        concat!(env!("CARGO_MANIFEST_DIR"), "/data/gold.txt"),
        Interpolation::Linear,
    )
    .unwrap()
}

fn sf14_gold_stack() -> LayerStack {
    let gold = MaterialModel::drude(WP, 1.07e14).unwrap().with_table(gold_table());
    LayerStack::new(3.0, gold, 50.0, 1.32 * 1.32)
        .unwrap()
        .with_prism_dispersion(Sellmeier::SF14, 632.8)
}

#[test]
fn drude_examples() {
    let lossless = MaterialModel::drude(WP, 0.0).unwrap();
    let e = drude_permittivity(WP, &lossless).unwrap();
    assert!(e.norm() < 1e-15);
    let e = drude_permittivity(WP / 2f64.sqrt(), &lossless).unwrap();
    assert_relative_eq!(e.re, -1.0, epsilon = 1e-12);
    assert_eq!(e.im, 0.0);
    let lossy = MaterialModel::drude(WP, 1e14).unwrap();
    for w in [1e14, 1e15, 3e15, 1e16, 5e16] {
        assert!(drude_permittivity(w, &lossy).unwrap().im > 0.0);
    }
    assert!(matches!(drude_permittivity(0.0, &lossy), Err(Error::Domain { .. })));
    assert!(matches!(drude_permittivity(-1.0, &lossy), Err(Error::Domain { .. })));
}

#[test]
fn table_takes_precedence_inside_range_only() {
    let mut m = MaterialModel::drude(WP, 1e14).unwrap().with_table(gold_table());
    let in_range = m.permittivity_at_wavelength(632.8).unwrap();
    assert!((in_range.re + 11.78).abs() < 0.05, "{in_range}");
    let far = m.permittivity_at_wavelength(5000.0).unwrap();
    assert_eq!(far, m.drude_only(wavelength_nm_to_omega(5000.0)));
    m.prefer_table = false;
    assert_eq!(
        m.permittivity_at_wavelength(632.8).unwrap(),
        m.drude_only(wavelength_nm_to_omega(632.8))
    );
}

#[test]
fn table_parsing_rejects_bad_input() {
    let ok = "# header\n500 -3 2\n600, -9, 1.5\n\n700 -16 1.1 # trailing\n";
    let t = PermittivityTable::parse(ok, Interpolation::Linear).unwrap();
    assert_eq!(t.range_nm(), (500.0, 700.0));
    assert_relative_eq!(t.at(550.0).unwrap().re, -6.0, epsilon = 1e-12);
    let bad_order = "500 -3 2\n500 -9 1.5\n";
    assert!(PermittivityTable::parse(bad_order, Interpolation::Linear).is_err());
    let bad_cols = "500 -3\n600 -9 1.5\n";
    assert!(PermittivityTable::parse(bad_cols, Interpolation::Linear).is_err());
}

#[test]
fn monotone_cubic_interpolates_samples_exactly() {
    let t = gold_table();
    let cubic = PermittivityTable::new(
        t.samples().map(|s| s.0).collect(),
        t.samples().map(|s| s.1).collect(),
        Interpolation::MonotoneCubic,
    )
    .unwrap();
    for (w, v) in t.samples() {
        assert!((cubic.at(w).unwrap() - v).norm() < 1e-9);
    }
}

#[test]
fn sellmeier_catalogue_values() {
    // nd at the helium d line
    assert_relative_eq!(Sellmeier::SF14.index(587.56), 1.7619, epsilon = 2e-4);
    assert_relative_eq!(Sellmeier::BK7.index(587.56), 1.5168, epsilon = 2e-4);
    let h = 1e-3;
    let fd = (Sellmeier::SF14.index(700.0 + h) - Sellmeier::SF14.index(700.0 - h)) / (2.0 * h);
    assert_relative_eq!(Sellmeier::SF14.index_slope(700.0), fd, max_relative = 1e-6);
}

#[test]
fn spp_examples() {
    let w = 2e15;
    let k0 = w / SPEED_OF_LIGHT;
    let m = MaterialModel::constant(c(-2.0, 0.0));
    let mode = spp_dispersion(w, 1.0, &m).unwrap();
    assert_relative_eq!(mode.k_parallel.re, 2f64.sqrt() * k0, max_relative = 1e-12);
    let m = MaterialModel::constant(c(-4.0, 0.0));
    let mode = spp_dispersion(w, 2.0, &m).unwrap();
    assert_relative_eq!(mode.k_parallel.re, 2.0 * k0, max_relative = 1e-12);
    assert!(mode.is_bound());
    let m = MaterialModel::constant(c(-1.7, 0.0));
    assert!(matches!(spp_dispersion(w, 1.7, &m), Err(Error::Pole { .. })));
}

#[test]
fn surface_plasma_frequency_examples() {
    let m = MaterialModel::drude(WP, 0.0).unwrap();
    assert_relative_eq!(surface_plasma_frequency(&m, 1.0), WP / 2f64.sqrt());
    assert_relative_eq!(surface_plasma_frequency(&m, 0.0), WP);
    assert_relative_eq!(surface_plasma_frequency(&m, 3.0), WP / 2.0);
}

/// Fresnel p-reflection written with angles and Snell's law.
fn fresnel_p(theta: f64, n1: f64, n3: f64) -> Complex64 {
    let cos1 = theta.cos();
    let sin3 = n1 / n3 * theta.sin();
    let mut cos3 = (c(1.0, 0.0) - sin3 * sin3).sqrt();
    if cos3.im < 0.0 {
        cos3 = -cos3;
    }
    (n3 * cos1 - n1 * cos3) / (n3 * cos1 + n1 * cos3)
}

#[test]
fn vanishing_film_reduces_to_two_layer_fresnel() {
    let gold = MaterialModel::constant(c(-11.8, 1.25));
    let stack = LayerStack::new(1.7561f64.powi(2), gold, 1e-10, 1.32 * 1.32).unwrap();
    for i in 0..=89 {
        let th = i as f64;
        let r = kretschmann_reflectance(th, 632.8, &stack).unwrap();
        let oracle = fresnel_p(th.to_radians(), 1.7561, 1.32);
        assert!((r.reflectance - oracle.norm_sqr()).abs() < 1e-9, "theta {th}");
    }
}

#[test]
fn index_matched_film_leaves_only_the_far_interface() {
    let ep = 1.7561f64.powi(2);
    let stack = LayerStack::new(ep, MaterialModel::constant(c(ep, 0.0)), 50.0, 1.32 * 1.32).unwrap();
    for th in [10.0, 30.0, 45.0, 60.0, 80.0] {
        let r = kretschmann_reflectance(th, 632.8, &stack).unwrap();
        let r23 = fresnel_p(f64::to_radians(th), 1.7561, 1.32);
        assert_relative_eq!(r.reflectance, r23.norm_sqr(), epsilon = 1e-12);
    }
}

#[test]
fn gold_dip_golden_values() {
    let stack = sf14_gold_stack();
    let crit = stack.critical_angle_deg(632.8);
    let n = 40_001;
    let mut below = Vec::new();
    let mut prev = f64::INFINITY;
    let mut falling = false;
    for i in 0..n {
        let th = crit + (89.99 - crit) * i as f64 / (n - 1) as f64;
        let r = kretschmann_reflectance(th, 632.8, &stack).unwrap().reflectance;
        if r > prev && falling && prev < 0.05 {
            below.push(th);
        }
        falling = r < prev;
        prev = r;
    }
    assert_eq!(below.len(), 1, "dips below 0.05: {below:?}");
    let res = find_resonance(
        &stack,
        ResonanceMode::Angular { wavelength_nm: 632.8 },
        SearchWindow::new(crit + 0.01, 89.9),
    )
    .unwrap();
    // frozen from the first verified run
    assert!((res.location - 54.6129).abs() < 2e-3, "{res:?}");
    assert!((res.r_min - 0.00613).abs() < 2e-4, "{res:?}");
}

#[test]
fn resonance_closed_form_limits() {
    let th = resonance_angle_closed_form(1.5, 1.32, -1e12).unwrap();
    assert_relative_eq!(th, (1.32f64 / 1.5).asin().to_degrees(), epsilon = 1e-6);
    assert!(resonance_angle_closed_form(1.5, 1.32, -1.0).is_err());
}

#[test]
fn resonance_search_matches_phase_matching_for_weak_loss() {
    let eps = c(-25.0, 0.3);
    let stack = LayerStack::new(2.25, MaterialModel::constant(eps), 50.0, 1.32 * 1.32).unwrap();
    let res = find_resonance(
        &stack,
        ResonanceMode::Angular { wavelength_nm: 632.8 },
        SearchWindow::new(62.0, 89.0),
    )
    .unwrap();
    let x = (1.32f64 * 1.32 * -25.0 / (1.32 * 1.32 - 25.0)).sqrt() / 1.5;
    let oracle = x.asin().to_degrees();
    assert!((res.location - oracle).abs() < 0.05, "{} vs {oracle}", res.location);
}

#[test]
fn no_metal_means_no_dip() {
    let ea = 1.32 * 1.32;
    let stack = LayerStack::new(2.25, MaterialModel::constant(c(ea, 0.0)), 50.0, ea).unwrap();
    let crit = stack.critical_angle_deg(632.8);
    let err = find_resonance(
        &stack,
        ResonanceMode::Angular { wavelength_nm: 632.8 },
        SearchWindow::new(crit + 1.0, 89.0),
    )
    .unwrap_err();
    assert!(matches!(err, Error::Ambiguity { ref candidates, .. } if candidates.is_empty()));
}

#[test]
fn spectral_resonance_search() {
    let silver = MaterialModel::drude(1.37e16, 2.7e13).unwrap();
    let stack = LayerStack::new(1.5168f64.powi(2), silver, 50.0, 1.33 * 1.33).unwrap();
    let res = find_resonance(
        &stack,
        ResonanceMode::Spectral { theta_deg: 70.0 },
        SearchWindow::new(450.0, 1500.0),
    )
    .unwrap();
    let eps = stack.metal.permittivity_at_wavelength(res.location).unwrap();
    let th = resonance_angle_closed_form(1.5168, 1.33, eps.re).unwrap();
    assert!((th - 70.0).abs() < 0.5, "{res:?} -> {th}");
}

#[test]
fn layer_stack_geometry_is_validated() {
    let m = MaterialModel::constant(c(-10.0, 1.0));
    assert!(LayerStack::new(1.7, m.clone(), 50.0, 1.8).is_err());
    assert!(LayerStack::new(2.0, m.clone(), 0.0, 1.7).is_err());
    assert!(LayerStack::new(0.9, m, 50.0, 1.0).is_err());
}

fn angular_inputs(eps: f64) -> SensitivityInputs {
    SensitivityInputs { n_a: 1.32, n_p: 1.7561, eps_real: eps, deps_dlambda: 0.0, dnp_dlambda: 0.0 }
}

#[test]
fn angular_sensitivity_diverges_at_the_pole() {
    let pole = angular_pole(1.32, 1.7561);
    let mut last = 0.0;
    for k in 1..=8 {
        let eps = pole - 10f64.powi(-k + 2);
        let s = sensitivity_closed_form(SensitivityKind::Angular, &angular_inputs(eps)).unwrap();
        assert!(s > last);
        last = s;
    }
    assert!(matches!(
        sensitivity_closed_form(SensitivityKind::Angular, &angular_inputs(pole)),
        Err(Error::Singularity { .. })
    ));
    assert!(sensitivity_closed_form(SensitivityKind::Angular, &angular_inputs(-2.0)).is_err());
    assert!(sensitivity_closed_form(SensitivityKind::Angular, &angular_inputs(1.0)).is_err());
}

#[test]
fn angular_sensitivity_matches_differentiated_phase_matching() {
    // central difference of the phase-matching angle in n_a
    for eps in [-8.0, -12.0, -25.0, -40.0] {
        let h = 1e-6;
        let f = |na: f64| resonance_angle_closed_form(1.7561, na, eps).unwrap();
        let fd = (f(1.32 + h) - f(1.32 - h)) / (2.0 * h);
        let s = sensitivity_closed_form(SensitivityKind::Angular, &angular_inputs(eps)).unwrap();
        assert_relative_eq!(s, fd.abs(), max_relative = 1e-6);
    }
}

#[test]
fn lsp_examples() {
    let m = MaterialModel::drude(WP, 0.0).unwrap();
    assert_relative_eq!(lsp_resonance(LspOrder::Finite(1), 1.0, &m).unwrap(), WP / 3f64.sqrt());
    assert_relative_eq!(lsp_resonance(LspOrder::Infinite, 1.0, &m).unwrap(), WP / 2f64.sqrt());
    assert_relative_eq!(
        lsp_resonance(LspOrder::Finite(1), 2.0, &m).unwrap(),
        WP / 5f64.sqrt(),
        max_relative = 1e-15
    );
    assert!(lsp_resonance(LspOrder::Finite(0), 1.0, &m).is_err());
}

#[test]
fn cross_section_scalings() {
    let lossless = MaterialModel::drude(WP, 0.0).unwrap();
    let cs = lsp_cross_sections(4e15, 1.77, &lossless, 1e-24).unwrap();
    assert_eq!(cs.absorption, 0.0);
    let lossy = MaterialModel::drude(WP, 1e14).unwrap();
    let a = lsp_cross_sections(4e15, 1.77, &lossy, 1e-24).unwrap();
    let b = lsp_cross_sections(4e15, 1.77, &lossy, 3e-24).unwrap();
    assert_relative_eq!(b.scattering / a.scattering, 9.0, max_relative = 1e-12);
    assert_relative_eq!(b.absorption / a.absorption, 3.0, max_relative = 1e-12);
}

#[test]
fn absorption_peaks_at_the_froehlich_condition() {
    let m = MaterialModel::drude(WP, 1e14).unwrap();
    let eps_d = 1.77;
    let grid: Vec<f64> = (0..20_000).map(|i| 3e15 + 5e15 * i as f64 / 19_999.0).collect();
    let by = |f: &dyn Fn(f64) -> f64| {
        grid.iter().copied().max_by(|a, b| f(*a).total_cmp(&f(*b))).unwrap()
    };
    let peak = by(&|w| lsp_cross_sections(w, eps_d, &m, 1e-24).unwrap().absorption);
    let match_ = by(&|w| -(m.permittivity(w).unwrap().re + 2.0 * eps_d).abs());
    // damping and the explicit frequency prefactor pull the peak off slightly
    assert!((peak - match_).abs() / match_ < 1e-3, "{peak} vs {match_}");
}

#[test]
fn figures_of_merit_examples() {
    let f = figures_of_merit(100.0, None, 1e-3, None).unwrap();
    assert_relative_eq!(f.lod, 1e-5);
    let f = figures_of_merit(100.0, Some(50.0), 0.0, None).unwrap();
    assert_relative_eq!(f.fom.unwrap(), 2.0);
    assert!(figures_of_merit(100.0, Some(0.0), 0.0, None).is_err());
}

#[test]
fn fom_star_of_a_shifting_lorentzian() {
    // I = 1/(1+u^2), u = (λ - λ0 - S (n - n0)) / w; max |dI/dn|/I = S/w at |u| = 1
    let (s, w, l0, n0) = (250.0, 40.0, 650.0, 1.33);
    let lor = |l: f64, n: f64| 1.0 / (1.0 + ((l - l0 - s * (n - n0)) / w).powi(2));
    let grid: Vec<f64> = (0..40_001).map(|i| 500.0 + 300.0 * i as f64 / 40_000.0).collect();
    let spec = SpectrumTriplet::sample(grid, n0, SpectrumTriplet::DEFAULT_DELTA_N, lor);
    let f = figures_of_merit(s, Some(2.0 * w), 0.0, Some(&spec)).unwrap();
    assert_relative_eq!(f.fom_star.unwrap(), s / w, max_relative = 1e-6);
    let (_, at) = fom_star(&spec).unwrap();
    assert!((at - (l0 - w)).abs() < 0.02 || (at - (l0 + w)).abs() < 0.02);
}

#[test]
fn fom_star_guards_zero_intensity() {
    let spec = SpectrumTriplet {
        wavelengths_nm: vec![1.0, 2.0],
        lower: vec![0.0, 1.0],
        center: vec![0.0, 1.0],
        upper: vec![1.0, 1.0],
        delta_n: 1e-5,
    };
    assert!(matches!(fom_star(&spec), Err(Error::Degenerate { .. })));
}

proptest! {
    #[test]
    fn passive_stacks_reflect_at_most_unity(
        theta in 0.0f64..89.9,
        lambda in 400.0f64..1200.0,
        er in -60.0f64..-0.5,
        ei in 0.0f64..10.0,
        d in 1.0f64..120.0,
        np in 1.4f64..1.9,
        na in 1.0f64..1.38,
    ) {
        let stack = LayerStack::new(np * np, MaterialModel::constant(c(er, ei)), d, na * na).unwrap();
        let r = kretschmann_reflectance(theta, lambda, &stack).unwrap();
        prop_assert!(r.reflectance >= 0.0 && r.reflectance <= 1.0 + 1e-12);
    }

    #[test]
    fn lossless_spp_satisfies_the_bound_mode_condition(
        eps_d in 1.0f64..3.0,
        extra in 0.1f64..50.0,
        w in 1e14f64..5e15,
    ) {
        let eps_m = -(eps_d + extra);
        let mode = spp_dispersion(w, eps_d, &MaterialModel::constant(c(eps_m, 0.0))).unwrap();
        let lhs = eps_d / mode.kappa_d + eps_m / mode.kappa_m;
        let scale = (eps_d / mode.kappa_d).norm();
        prop_assert!(lhs.norm() / scale < 1e-9);
        prop_assert!(mode.kappa_d.re >= 0.0 && mode.kappa_m.re >= 0.0);
    }

    #[test]
    fn lsp_order_increases_towards_the_planar_limit(eps_d in 0.5f64..4.0, l in 1u32..200) {
        let m = MaterialModel::drude(WP, 0.0).unwrap();
        let a = lsp_resonance(LspOrder::Finite(l), eps_d, &m).unwrap();
        let b = lsp_resonance(LspOrder::Finite(l + 1), eps_d, &m).unwrap();
        let inf = lsp_resonance(LspOrder::Infinite, eps_d, &m).unwrap();
        prop_assert!(a < b && b < inf);
    }
}
