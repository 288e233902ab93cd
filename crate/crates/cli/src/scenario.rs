//! Named scenarios: building a validated plan from a config, then executing it.

use num_complex::Complex64;
use qplasm::channels::ChannelSpec;
use qplasm::estimate::{
    bound_catalog, catalog_names, catalog_parameters, differential_intensity_figures, BoundParams,
    DifferentialChannels, DifferentialProbe,
};
use qplasm::mc::{
    compare_strategies, concentration_from_index, estimate_refractive_index, ExperimentConfig,
    KretschmannProbe, Measurement, RefractiveIndexConfig, Transmittance, DEFAULT_CALIBRATION_SLOPE,
    DEFAULT_SAMPLES, MC_FOCK_CAP,
};
use qplasm::states::{FockOptions, StateSpec};
use qplasm::transduce::{
    find_resonance, kretschmann_reflectance, lsp_cross_sections, lsp_resonance, omega_to_wavelength_nm,
    resonance_angle_closed_form, sensitivity_closed_form, wavelength_nm_to_omega, Interpolation,
    LayerStack, LspOrder, MaterialModel, PermittivityTable, ResonanceMode, SearchWindow, Sellmeier,
    SensitivityInputs, SensitivityKind,
};

use crate::config::{Document, Section};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    ReflectanceSweep,
    Sensitivity,
    Lsp,
    Bounds,
    MonteCarlo,
    Compare,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::ReflectanceSweep,
        Scenario::Sensitivity,
        Scenario::Lsp,
        Scenario::Bounds,
        Scenario::MonteCarlo,
        Scenario::Compare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::ReflectanceSweep => "reflectance-sweep",
            Scenario::Sensitivity => "sensitivity",
            Scenario::Lsp => "lsp",
            Scenario::Bounds => "bounds",
            Scenario::MonteCarlo => "montecarlo",
            Scenario::Compare => "compare",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

/// Executable form of a config.
#[derive(Debug, Clone)]
pub enum Plan {
    Reflectance { stack: LayerStack, wavelength_nm: f64, thetas: Vec<f64> },
    Sensitivity(SensitivityPlan),
    Lsp(LspPlan),
    Bounds { rows: Vec<(String, f64, f64)> },
    MonteCarlo(McPlan),
    Compare(ComparePlan),
}

#[derive(Debug, Clone)]
pub struct SensitivityPlan {
    stack: LayerStack,
    kind: SensitivityKind,
    wavelengths: Vec<f64>,
    theta_window: Option<(f64, f64)>,
    index_step: f64,
}

#[derive(Debug, Clone)]
pub struct LspPlan {
    metal: MaterialModel,
    eps_d: f64,
    orders: Vec<LspOrder>,
    spectrum: Option<(f64, Vec<f64>)>,
}

#[derive(Debug, Clone)]
pub struct McPlan {
    experiments: Vec<ExperimentConfig>,
    index: Option<IndexPlan>,
}

#[derive(Debug, Clone)]
struct IndexPlan {
    window: (f64, f64),
    reference_index: f64,
    solvent: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct ComparePlan {
    probes: Vec<DifferentialProbe>,
    eta_a: f64,
    eta_b: f64,
    ts: Vec<f64>,
}

/// Scenario results plus notes for the metadata file.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
}

/// `points` values evenly spaced over `[from, to]`.
pub fn linspace(from: f64, to: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![from];
    }
    (0..points)
        .map(|i| if i + 1 == points { to } else { from + (to - from) * i as f64 / (points - 1) as f64 })
        .collect()
}

pub fn scenario_of(doc: &Document) -> CliResult<Scenario> {
    let name = doc.section().string("scenario")?;
    Scenario::parse(name).ok_or_else(|| {
        let names: Vec<&str> = Scenario::ALL.iter().map(|s| s.name()).collect();
        CliError::config("scenario", format!("unknown scenario `{name}`; expected one of: {}", names.join(", ")))
    })
}

/// Seed stored in the config, if any.
pub fn config_seed(doc: &Document) -> CliResult<Option<u64>> {
    let root = doc.section();
    if root.has("seed") { Ok(Some(root.count("seed")? as u64)) } else { Ok(None) }
}

/// Parses and validates the whole config without running anything.
pub fn plan(doc: &Document) -> CliResult<Plan> {
    let root = doc.section();
    root.only(&["scenario", "seed", "transduce", "estimate", "mc"])?;
    match scenario_of(doc)? {
        Scenario::ReflectanceSweep => {
            let t = root.child("transduce")?;
            t.only(&["wavelength", "prism", "prism_index", "analyte_index", "metal_thickness", "metal", "sweep"])?;
            let stack = stack(&t)?;
            let sweep = t.child("sweep")?;
            sweep.only(&["theta_from", "theta_to", "points"])?;
            let (lo, hi) = (sweep.quantity("theta_from", "deg")?, sweep.quantity("theta_to", "deg")?);
            if !(0.0 <= lo && lo < hi && hi < 90.0) {
                return Err(CliError::config(sweep.field_path("theta_to"), "need 0 <= theta_from < theta_to < 90 deg"));
            }
            let points = sweep.count("points")?;
            if points < 2 {
                return Err(CliError::config(sweep.field_path("points"), "need at least 2 points"));
            }
            Ok(Plan::Reflectance { wavelength_nm: t.quantity("wavelength", "nm")?, stack, thetas: linspace(lo, hi, points) })
        }
        Scenario::Sensitivity => sensitivity_plan(&root.child("transduce")?).map(Plan::Sensitivity),
        Scenario::Lsp => lsp_plan(&root.child("transduce")?).map(Plan::Lsp),
        Scenario::Bounds => bounds_plan(&root.child("estimate")?),
        Scenario::MonteCarlo => mc_plan(&root).map(Plan::MonteCarlo),
        Scenario::Compare => compare_plan(&root.child("estimate")?).map(Plan::Compare),
    }
}

fn material(s: &Section) -> CliResult<MaterialModel> {
    s.only(&["plasma_frequency", "damping", "table", "interpolation"])?;
    let wp = s.quantity("plasma_frequency", "rad_s")?;
    let gamma = s.quantity("damping", "rad_s")?;
    let mut m = MaterialModel::drude(wp, gamma).map_err(|e| CliError::at(s.field_path("plasma_frequency"), e))?;
    if s.has("table") {
        let interpolation = match s.string_or("interpolation", "linear")? {
            "linear" => Interpolation::Linear,
            "monotone_cubic" => Interpolation::MonotoneCubic,
            other => {
                return Err(CliError::config(
                    s.field_path("interpolation"),
                    format!("unknown interpolation `{other}`; expected linear or monotone_cubic"),
                ))
            }
        };
        let path = s.path("table")?;
        let table = match PermittivityTable::load(&path, interpolation) {
            Ok(t) => t,
            Err(e) if !path.exists() => {
                return Err(CliError::io(path, std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string())))
            }
            Err(e) => return Err(CliError::at(s.field_path("table"), e)),
        };
        m = m.with_table(table);
    }
    Ok(m)
}

fn sellmeier(name: &str) -> Option<Sellmeier> {
    match name {
        "SF14" => Some(Sellmeier::SF14),
        "BK7" => Some(Sellmeier::BK7),
        _ => None,
    }
}

/// Kretschmann stack from the `transduce` section.
fn stack(t: &Section) -> CliResult<LayerStack> {
    let wavelength = t.quantity("wavelength", "nm")?;
    if !(wavelength > 0.0) {
        return Err(CliError::config(t.field_path("wavelength"), "wavelength must be > 0"));
    }
    let (eps_p, dispersion) = match (t.has("prism"), t.has("prism_index")) {
        (true, false) => {
            let name = t.string("prism")?;
            let s = sellmeier(name).ok_or_else(|| {
                CliError::config(t.field_path("prism"), format!("unknown prism glass `{name}`; expected SF14 or BK7"))
            })?;
            (s.index(wavelength).powi(2), Some(s))
        }
        (false, true) => (t.number("prism_index")?.powi(2), None),
        _ => return Err(CliError::config(t.field_path("prism"), "give exactly one of `prism` or `prism_index`")),
    };
    let n_a = t.number("analyte_index")?;
    if !(n_a >= 1.0) {
        return Err(CliError::config(t.field_path("analyte_index"), format!("analyte index {n_a} must be >= 1")));
    }
    let eps_a = n_a * n_a;
    if !(eps_p > eps_a) {
        return Err(CliError::config(
            t.field_path("analyte_index"),
            format!(
                "analyte permittivity eps_a = {eps_a} is not below the prism permittivity eps_p = {eps_p}; \
                 the Kretschmann geometry requires eps_p > eps_a for total internal reflection"
            ),
        ));
    }
    let thickness = t.quantity("metal_thickness", "nm")?;
    if !(thickness > 0.0) {
        return Err(CliError::config(t.field_path("metal_thickness"), "metal thickness must be > 0 nm"));
    }
    let metal = material(&t.child("metal")?)?;
    let stack = LayerStack::new(eps_p, metal, thickness, eps_a).map_err(|e| CliError::at(t.path.clone(), e))?;
    Ok(match dispersion {
        Some(s) => stack.with_prism_dispersion(s, wavelength),
        None => stack,
    })
}

/// Either a single `wavelength` or a `wavelength_from`/`wavelength_to`/`points` grid.
fn wavelength_grid(s: &Section, fallback: f64) -> CliResult<Vec<f64>> {
    if s.has("wavelength_from") || s.has("wavelength_to") {
        let (lo, hi) = (s.quantity("wavelength_from", "nm")?, s.quantity("wavelength_to", "nm")?);
        let points = s.count("points")?;
        if !(0.0 < lo && lo <= hi) || points < 1 {
            return Err(CliError::config(s.field_path("wavelength_to"), "need 0 < wavelength_from <= wavelength_to and points >= 1"));
        }
        Ok(linspace(lo, hi, points))
    } else {
        Ok(vec![s.quantity_or("wavelength", "nm", fallback)?])
    }
}

fn sensitivity_plan(t: &Section) -> CliResult<SensitivityPlan> {
    t.only(&["wavelength", "prism", "prism_index", "analyte_index", "metal_thickness", "metal", "sensitivity"])?;
    let stack = stack(t)?;
    let s = t.child("sensitivity")?;
    s.only(&["kind", "wavelength", "wavelength_from", "wavelength_to", "points", "theta_from", "theta_to", "index_step"])?;
    let kind = match s.string("kind")? {
        "angular" => SensitivityKind::Angular,
        "spectral" => SensitivityKind::Spectral,
        other => return Err(CliError::config(s.field_path("kind"), format!("unknown kind `{other}`; expected angular or spectral"))),
    };
    let wavelengths = wavelength_grid(&s, t.quantity("wavelength", "nm")?)?;
    let theta_window = if s.has("theta_from") || s.has("theta_to") {
        let w = (s.quantity("theta_from", "deg")?, s.quantity("theta_to", "deg")?);
        if !(0.0 <= w.0 && w.0 < w.1 && w.1 < 90.0) {
            return Err(CliError::config(s.field_path("theta_to"), "need 0 <= theta_from < theta_to < 90 deg"));
        }
        Some(w)
    } else {
        None
    };
    let index_step = s.number_or("index_step", 1e-4)?;
    if !(index_step > 0.0) {
        return Err(CliError::config(s.field_path("index_step"), "index step must be > 0"));
    }
    Ok(SensitivityPlan { stack, kind, wavelengths, theta_window, index_step })
}

fn lsp_plan(t: &Section) -> CliResult<LspPlan> {
    t.only(&["metal", "lsp"])?;
    let metal = material(&t.child("metal")?)?;
    let l = t.child("lsp")?;
    l.only(&["medium_index", "orders", "radius", "wavelength_from", "wavelength_to", "points"])?;
    let n_d = l.number("medium_index")?;
    if !(n_d > 0.0) {
        return Err(CliError::config(l.field_path("medium_index"), "medium index must be > 0"));
    }
    let mut orders = Vec::new();
    for (i, v) in l.array("orders")?.iter().enumerate() {
        let field = format!("{}[{i}]", l.field_path("orders"));
        orders.push(match v {
            toml::Value::Integer(k) if *k >= 1 => LspOrder::Finite(*k as u32),
            toml::Value::String(s) if s == "inf" => LspOrder::Infinite,
            other => return Err(CliError::config(field, format!("expected an order >= 1 or \"inf\", found {other}"))),
        });
    }
    let spectrum = if l.has("radius") {
        let radius = l.quantity("radius", "nm")?;
        if !(radius > 0.0) {
            return Err(CliError::config(l.field_path("radius"), "radius must be > 0 nm"));
        }
        Some((radius, wavelength_grid(&l, 0.0)?))
    } else {
        None
    };
    Ok(LspPlan { metal, eps_d: n_d * n_d, orders, spectrum })
}

fn bounds_plan(e: &Section) -> CliResult<Plan> {
    e.only(&["entries", "nu", "params"])?;
    let p = e.child("params")?;
    let mut params: BoundParams = p.numbers()?.into_iter().collect();
    params.insert("nu".into(), e.number_or("nu", 1.0)?);
    let entries: Vec<(String, String)> = if e.has("entries") {
        e.array("entries")?
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let field = format!("{}[{i}]", e.field_path("entries"));
                v.as_str().map(|s| (s.to_string(), field.clone())).ok_or_else(|| CliError::config(field, "expected a catalog name"))
            })
            .collect::<CliResult<_>>()?
    } else {
        // every entry whose parameters are all given
        catalog_names()
            .into_iter()
            .filter(|n| catalog_parameters(n).map(|ps| ps.iter().all(|k| params.contains_key(*k))).unwrap_or(false))
            .map(|n| (n.to_string(), e.field_path("params")))
            .collect()
    };
    if entries.is_empty() {
        return Err(CliError::config(e.field_path("params"), "no catalog entry has all of its parameters given"));
    }
    let mut rows = Vec::new();
    for (name, field) in entries {
        let r = bound_catalog(&name, &params).map_err(|err| match err {
            qplasm::Error::Catalog { .. } => CliError::at(field, err),
            other => CliError::at(e.field_path("params"), other),
        })?;
        rows.push((r.name, r.value, r.nu));
    }
    Ok(Plan::Bounds { rows })
}

fn unit_interval(s: &Section, key: &str, default: Option<f64>) -> CliResult<f64> {
    let v = match default {
        Some(d) => s.number_or(key, d)?,
        None => s.number(key)?,
    };
    if !(0.0..=1.0).contains(&v) {
        return Err(CliError::config(s.field_path(key), format!("{v} outside [0, 1]")));
    }
    Ok(v)
}

fn state(s: &Section) -> CliResult<StateSpec> {
    let kind = s.string("kind")?;
    let phase = |key: &str| s.quantity_or(key, "deg", 0.0).map(f64::to_radians);
    let alpha = || -> CliResult<Complex64> {
        let n = s.number("mean_photons")?;
        if !(n >= 0.0) {
            return Err(CliError::config(s.field_path("mean_photons"), "mean photon number must be >= 0"));
        }
        Ok(Complex64::from_polar(n.sqrt(), phase("alpha_phase")?))
    };
    let squeezing = || -> CliResult<f64> {
        let r = s.number("r")?;
        if !(r >= 0.0) {
            return Err(CliError::config(s.field_path("r"), "squeezing parameter must be >= 0"));
        }
        Ok(r)
    };
    let spec = match kind {
        "vacuum" => {
            s.only(&["kind"])?;
            StateSpec::Vacuum
        }
        "coherent" => {
            s.only(&["kind", "mean_photons", "alpha_phase"])?;
            StateSpec::Coherent { alpha: alpha()? }
        }
        "fock" | "twin_fock" | "noon" => {
            s.only(&["kind", "n"])?;
            let n = s.count("n")?;
            match kind {
                "fock" => StateSpec::Fock { n },
                "twin_fock" => StateSpec::TwinFock { n },
                _ => StateSpec::Noon { n },
            }
        }
        "squeezed_vacuum" | "tmsv" => {
            s.only(&["kind", "r", "phase"])?;
            let (r, theta) = (squeezing()?, phase("phase")?);
            if kind == "tmsv" { StateSpec::Tmsv { r, theta } } else { StateSpec::SqueezedVacuum { r, theta } }
        }
        "tmsd" => {
            s.only(&["kind", "r", "phase", "mean_photons", "alpha_phase"])?;
            StateSpec::Tmsd { alpha: alpha()?, r: squeezing()?, theta: phase("phase")? }
        }
        "product" => {
            s.only(&["kind", "a", "b"])?;
            let (a, b) = (state(&s.child("a")?)?, state(&s.child("b")?)?);
            if a.modes() != 1 || b.modes() != 1 {
                return Err(CliError::config(s.path.clone(), "product factors must be single-mode states"));
            }
            StateSpec::product(a, b)
        }
        other => {
            return Err(CliError::config(
                s.field_path("kind"),
                format!("unknown state `{other}`; expected vacuum, coherent, fock, twin_fock, noon, squeezed_vacuum, tmsv, tmsd or product"),
            ))
        }
    };
    Ok(spec)
}

fn channel(s: &Section) -> CliResult<ChannelSpec> {
    let spec = match s.string("kind")? {
        "loss" => {
            s.only(&["kind", "eta", "mode"])?;
            ChannelSpec::loss(unit_interval(s, "eta", None)?, s.count_or("mode", 0)?)
        }
        "beam_splitter" => {
            s.only(&["kind", "transmittance"])?;
            ChannelSpec::beam_splitter(unit_interval(s, "transmittance", None)?)
        }
        "phase" => {
            s.only(&["kind", "phi", "mode"])?;
            ChannelSpec::phase(s.quantity("phi", "deg")?.to_radians(), s.count_or("mode", 0)?)
        }
        "squeezer" => {
            s.only(&["kind", "gain"])?;
            ChannelSpec::squeezer(s.number("gain")?)
        }
        other => {
            return Err(CliError::config(
                s.field_path("kind"),
                format!("unknown channel `{other}`; expected loss, beam_splitter, phase or squeezer"),
            ))
        }
    };
    spec.validate().map_err(|e| CliError::at(s.path.clone(), e))?;
    Ok(spec)
}

fn mc_plan(root: &Section) -> CliResult<McPlan> {
    let m = root.child("mc")?;
    m.only(&[
        "kind", "measurement", "samples", "nu", "efficiency", "transmittance", "theta", "fock_cap",
        "window", "reference_index", "solvent_index", "calibration_slope", "probe",
    ])?;
    let index = match m.string_or("kind", "transmittance")? {
        "transmittance" => false,
        "index" => true,
        other => return Err(CliError::config(m.field_path("kind"), format!("unknown kind `{other}`; expected transmittance or index"))),
    };
    let measurement = match m.string_or("measurement", "photon_counting")? {
        "photon_counting" => Measurement::PhotonCounting,
        "intensity_difference" if !index => Measurement::IntensityDifference,
        other => {
            return Err(CliError::config(
                m.field_path("measurement"),
                format!("measurement `{other}` not available here; expected photon_counting{}", if index { "" } else { " or intensity_difference" }),
            ))
        }
    };
    let samples = m.count_or("samples", DEFAULT_SAMPLES)?;
    if samples < 2 {
        return Err(CliError::config(m.field_path("samples"), "need at least 2 samples"));
    }
    let nu = m.count_or("nu", 1)?;
    if nu < 1 {
        return Err(CliError::config(m.field_path("nu"), "nu must be >= 1"));
    }
    let efficiency = unit_interval(&m, "efficiency", Some(1.0))?;
    let transmittance = match (m.has("transmittance"), m.has("theta")) {
        (true, false) if !index => Transmittance::Direct(unit_interval(&m, "transmittance", None)?),
        (false, true) => {
            let t = root.child("transduce")?;
            let stack = stack(&t)?;
            let theta_deg = m.quantity("theta", "deg")?;
            let probe = KretschmannProbe { stack, theta_deg, wavelength_nm: t.quantity("wavelength", "nm")? };
            Transmittance::Kretschmann(probe)
        }
        _ if index => return Err(CliError::config(m.field_path("theta"), "index estimation needs the prism angle `theta`")),
        _ => return Err(CliError::config(m.field_path("transmittance"), "give exactly one of `transmittance` or `theta`")),
    };
    transmittance.value().map_err(|e| CliError::at(m.field_path("theta"), e))?;
    let fock = FockOptions { hard_cap: m.count_or("fock_cap", MC_FOCK_CAP)? };

    let mut experiments = Vec::new();
    for p in m.children("probe")? {
        p.only(&["label", "state", "channels"])?;
        let label = p.string("label")?;
        if label.is_empty() || label.contains([',', '"', '\n', '\r']) {
            return Err(CliError::config(p.field_path("label"), "labels must be non-empty without commas, quotes or newlines"));
        }
        let probe = state(&p.child("state")?)?;
        let channels = if p.has("channels") { p.children("channels")?.iter().map(channel).collect::<CliResult<_>>()? } else { Vec::new() };
        let mut cfg = ExperimentConfig::counting(label, probe, 0.0, efficiency);
        cfg.transmittance = transmittance.clone();
        cfg.channels = channels;
        cfg.measurement = measurement;
        cfg.nu = nu;
        cfg.samples = samples;
        cfg.fock = fock;
        cfg.validate().map_err(|e| CliError::at(p.path.clone(), e))?;
        experiments.push(cfg);
    }
    if experiments.is_empty() {
        return Err(CliError::config(m.field_path("probe"), "at least one probe is required"));
    }
    let index = if index {
        let w = m.array("window")?;
        let field = m.field_path("window");
        let window = match w {
            [a, b] => match (a.as_float().or(a.as_integer().map(|i| i as f64)), b.as_float().or(b.as_integer().map(|i| i as f64))) {
                (Some(a), Some(b)) if a < b => (a, b),
                _ => return Err(CliError::config(field, "expected [lo, hi] with lo < hi")),
            },
            _ => return Err(CliError::config(field, "expected [lo, hi]")),
        };
        let solvent = if m.has("solvent_index") {
            Some((m.number("solvent_index")?, m.number_or("calibration_slope", DEFAULT_CALIBRATION_SLOPE)?))
        } else {
            None
        };
        Some(IndexPlan { window, reference_index: m.number_or("reference_index", 1.0)?, solvent })
    } else {
        None
    };
    Ok(McPlan { experiments, index })
}

fn compare_plan(e: &Section) -> CliResult<ComparePlan> {
    e.only(&["differential"])?;
    let d = e.child("differential")?;
    d.only(&["probes", "photons", "gain", "seed_photons", "eta_a", "eta_b", "t_from", "t_to", "points"])?;
    let mut probes = Vec::new();
    for (i, v) in d.array("probes")?.iter().enumerate() {
        let field = format!("{}[{i}]", d.field_path("probes"));
        probes.push(match v.as_str() {
            Some("tf") => DifferentialProbe::TwinFock { n: d.number("photons")? },
            Some("pc") => DifferentialProbe::ProductCoherent { n: d.number("photons")? },
            Some("tmsv") => DifferentialProbe::Tmsv { gain: d.number("gain")?, alpha2: d.number_or("seed_photons", 0.0)? },
            Some("tmsd") => DifferentialProbe::Tmsd { gain: d.number("gain")?, alpha2: d.number("seed_photons")? },
            _ => return Err(CliError::config(field, format!("expected one of tf, tmsv, tmsd, pc, found {v}"))),
        });
    }
    let eta_a = unit_interval(&d, "eta_a", None)?;
    let eta_b = unit_interval(&d, "eta_b", None)?;
    let (lo, hi) = (unit_interval(&d, "t_from", None)?, unit_interval(&d, "t_to", None)?);
    let points = d.count("points")?;
    if points < 1 || lo > hi {
        return Err(CliError::config(d.field_path("points"), "need t_from <= t_to and points >= 1"));
    }
    let ts = linspace(lo, hi, points);
    for &t in &ts {
        for &p in &probes {
            differential_intensity_figures(p, DifferentialChannels { t, eta_a, eta_b })
                .map_err(|err| CliError::at(d.path.clone(), err))?;
        }
    }
    Ok(ComparePlan { probes, eta_a, eta_b, ts })
}

/// Runs a validated plan. `seed` feeds every Monte Carlo substream.
pub fn execute(plan: &Plan, seed: u64) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    match plan {
        Plan::Reflectance { stack, wavelength_nm, thetas } => {
            let mut t = Table::new("reflectance", &["theta_deg", "R"]);
            for &theta in thetas {
                let r = kretschmann_reflectance(theta, *wavelength_nm, stack)?;
                if r.clamped {
                    out.notes.push(format!("film propagation factor clamped at {theta} deg"));
                }
                t.push(vec![theta.into(), r.reflectance.into()]);
            }
            out.tables.push(t);
        }
        Plan::Sensitivity(p) => run_sensitivity(p, &mut out)?,
        Plan::Lsp(p) => run_lsp(p, &mut out)?,
        Plan::Bounds { rows } => {
            let mut t = Table::new("bounds", &["name", "value", "nu"]);
            for (name, value, nu) in rows {
                t.push(vec![name.as_str().into(), (*value).into(), (*nu).into()]);
            }
            out.tables.push(t);
        }
        Plan::MonteCarlo(p) => run_mc(p, seed, &mut out)?,
        Plan::Compare(p) => {
            let mut t = Table::new("nrf", &["T", "probe", "sigma_out", "snr", "r_snr"]);
            for &tv in &p.ts {
                for &probe in &p.probes {
                    let f = differential_intensity_figures(probe, DifferentialChannels { t: tv, eta_a: p.eta_a, eta_b: p.eta_b })?;
                    let or_nan = |r: Result<f64, _>| r.unwrap_or(f64::NAN);
                    t.push(vec![tv.into(), probe.label().into(), f.sigma_out.into(), or_nan(f.snr).into(), or_nan(f.r_snr).into()]);
                }
            }
            out.tables.push(t);
        }
    }
    Ok(out)
}

const DIP_HALF_WIDTH_DEG: f64 = 8.0;

/// Closed-form and numerically located resonance data at one wavelength.
pub fn sensitivity_row(p: &SensitivityPlan, wavelength_nm: f64) -> qplasm::Result<Vec<Cell>> {
    let stack = &p.stack;
    let n_a = stack.analyte_permittivity.sqrt();
    let n_p = stack.prism_permittivity_at(wavelength_nm).sqrt();
    let eps = stack.metal.permittivity_at_wavelength(wavelength_nm)?.re;
    let theta_closed = resonance_angle_closed_form(n_p, n_a, eps)?;
    match p.kind {
        SensitivityKind::Angular => {
            let inputs = SensitivityInputs { n_a, n_p, eps_real: eps, deps_dlambda: 0.0, dnp_dlambda: 0.0 };
            let s = sensitivity_closed_form(SensitivityKind::Angular, &inputs)?;
            // default: a band around the phase-matching angle, which keeps shallow
            // Fresnel wiggles at grazing incidence out of the dip search
            let (lo, hi) = p.theta_window.unwrap_or_else(|| {
                let critical = stack.critical_angle_deg(wavelength_nm);
                ((theta_closed - DIP_HALF_WIDTH_DEG).max(critical + 0.01), (theta_closed + DIP_HALF_WIDTH_DEG).min(89.5))
            });
            let mode = ResonanceMode::Angular { wavelength_nm };
            let locate = |n: f64| find_resonance(&stack.with_analyte_index(n), mode, SearchWindow::new(lo, hi)).map(|r| r.location);
            let theta = locate(n_a)?;
            let h = p.index_step;
            let fd = (locate(n_a + h)? - locate(n_a - h)?) / (2.0 * h);
            Ok(vec![wavelength_nm.into(), eps.into(), n_p.into(), theta.into(), theta_closed.into(), s.into(), fd.into()])
        }
        SensitivityKind::Spectral => {
            let dnp = stack.prism_dispersion.map(|s| s.index_slope(wavelength_nm)).unwrap_or(0.0);
            let inputs = SensitivityInputs {
                n_a,
                n_p,
                eps_real: eps,
                deps_dlambda: stack.metal.real_permittivity_slope(wavelength_nm, 1.0)?,
                dnp_dlambda: dnp,
            };
            let s = sensitivity_closed_form(SensitivityKind::Spectral, &inputs)?;
            Ok(vec![wavelength_nm.into(), eps.into(), n_p.into(), theta_closed.into(), s.into()])
        }
    }
}

fn run_sensitivity(p: &SensitivityPlan, out: &mut Outcome) -> CliResult<()> {
    let mut t = match p.kind {
        SensitivityKind::Angular => Table::new(
            "sensitivity",
            &["wavelength_nm", "eps_real", "n_prism", "theta_res_deg", "theta_closed_deg", "sensitivity_deg_per_riu", "fd_sensitivity_deg_per_riu"],
        ),
        SensitivityKind::Spectral => Table::new(
            "sensitivity",
            &["wavelength_nm", "eps_real", "n_prism", "theta_res_deg", "sensitivity_nm_per_riu"],
        ),
    };
    let mut first_error = None;
    for &w in &p.wavelengths {
        match sensitivity_row(p, w) {
            Ok(row) => t.push(row),
            Err(e) => {
                out.notes.push(format!("{} nm skipped: {e}", crate::output::format_float(w)));
                first_error.get_or_insert(e);
            }
        }
    }
    if t.rows.is_empty() {
        return Err(first_error.expect("at least one wavelength").into());
    }
    out.tables.push(t);
    Ok(())
}

fn order_label(order: LspOrder) -> String {
    match order {
        LspOrder::Finite(l) => l.to_string(),
        LspOrder::Infinite => "inf".into(),
    }
}

fn run_lsp(p: &LspPlan, out: &mut Outcome) -> CliResult<()> {
    let mut t = Table::new("lsp", &["order", "omega_rad_s", "wavelength_nm"]);
    for &order in &p.orders {
        let w = lsp_resonance(order, p.eps_d, &p.metal)?;
        t.push(vec![Cell::Text(order_label(order)), w.into(), omega_to_wavelength_nm(w).into()]);
    }
    out.tables.push(t);
    if let Some((radius, wavelengths)) = &p.spectrum {
        let volume = 4.0 / 3.0 * std::f64::consts::PI * (radius * 1e-9).powi(3);
        let mut s = Table::new("lsp_spectrum", &["wavelength_nm", "omega_rad_s", "scattering_m2", "absorption_m2"]);
        for &l in wavelengths {
            let w = wavelength_nm_to_omega(l);
            let c = lsp_cross_sections(w, p.eps_d, &p.metal, volume)?;
            s.push(vec![l.into(), w.into(), c.scattering.into(), c.absorption.into()]);
        }
        out.tables.push(s);
    }
    Ok(())
}

fn run_mc(p: &McPlan, seed: u64, out: &mut Outcome) -> CliResult<()> {
    let experiments: Vec<ExperimentConfig> = p
        .experiments
        .iter()
        .map(|e| ExperimentConfig { seed, ..e.clone() })
        .collect();
    match &p.index {
        None => {
            let rows = compare_strategies(&experiments)?;
            let mut t = Table::new(
                "comparison",
                &["label", "truth", "mean", "empirical_std", "std_error", "bound", "ratio", "bound_ratio", "within_tolerance"],
            );
            for r in rows {
                t.push(vec![
                    r.label.as_str().into(),
                    r.truth.into(),
                    r.mean.into(),
                    r.empirical_std.into(),
                    r.std_error.into(),
                    r.bound.into(),
                    r.ratio.into(),
                    r.bound_ratio.into(),
                    Cell::Int(r.within_tolerance as i64),
                ]);
            }
            out.tables.push(t);
        }
        Some(ix) => {
            let mut columns = vec!["label", "truth", "mean", "std", "std_error", "predicted_std", "bias", "saturated"];
            if ix.solvent.is_some() {
                columns.push("concentration_percent");
            }
            let mut t = Table::new("index", &columns);
            for e in experiments {
                let label = e.label.clone();
                let cfg = RefractiveIndexConfig { experiment: e, window: ix.window, reference_index: ix.reference_index };
                let r = estimate_refractive_index(&cfg)?;
                let d = &r.distribution;
                let mut row: Vec<Cell> = vec![
                    label.as_str().into(),
                    d.truth.into(),
                    d.mean.into(),
                    d.std.into(),
                    d.std_error_of_std().into(),
                    r.predicted_std.into(),
                    d.bias.into(),
                    r.saturated.into(),
                ];
                if let Some((solvent, slope)) = ix.solvent {
                    row.push(concentration_from_index(d.mean, solvent, slope)?.into());
                }
                if r.saturated > 0 {
                    out.notes.push(format!("{label}: {} estimates pinned to the index window", r.saturated));
                }
                t.push(row);
            }
            out.tables.push(t);
        }
    }
    Ok(())
}
