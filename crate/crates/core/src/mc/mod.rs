//! Monte Carlo sampling of detection experiments and empirical estimator statistics.
//!
//! Every sample draws from its own ChaCha substream (`seed`, stream = sample index),
//! so results do not depend on how work is scheduled across threads. The worker
//! count can be capped with the `QPLASM_THREADS` environment variable.

mod differential;
mod index;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::channels::{apply_chain, ChannelSpec};
use crate::error::{Error, Result};
use crate::estimate::{fisher_information, OutcomeModel};
use crate::states::{make_state, number_moments, FockOptions, Representation, State, StateSpec};
use crate::transduce::{kretschmann_reflectance, LayerStack};

pub use differential::{exact_sigma_out, sample_differential, DifferentialSample};
pub use index::{
    concentration_from_index, estimate_refractive_index, index_from_normalized_transmittance,
    IndexEstimate, RefractiveIndexConfig, DEFAULT_CALIBRATION_SLOPE,
};

/// Number of repeated estimates when a config does not say otherwise.
pub const DEFAULT_SAMPLES: usize = 1000;

/// Cutoff cap used for Monte Carlo state preparation (single-mode counting needs
/// room for `N ≈ 100` plus its Poisson tail).
pub const MC_FOCK_CAP: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measurement {
    PhotonCounting,
    IntensityDifference,
    /// Threshold detectors on both modes.
    Coincidence,
}

/// Prism reflectance at a fixed incidence angle and wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct KretschmannProbe {
    pub stack: LayerStack,
    pub theta_deg: f64,
    pub wavelength_nm: f64,
}

impl KretschmannProbe {
    pub fn reflectance_at_index(&self, n_a: f64) -> Result<f64> {
        let stack = self.stack.with_analyte_index(n_a);
        stack.validate()?;
        Ok(kretschmann_reflectance(self.theta_deg, self.wavelength_nm, &stack)?.reflectance)
    }
}

/// Object transmittance `T` probed by the signal mode.
#[derive(Debug, Clone, PartialEq)]
pub enum Transmittance {
    Direct(f64),
    Kretschmann(KretschmannProbe),
}

impl Transmittance {
    pub fn value(&self) -> Result<f64> {
        match self {
            Transmittance::Direct(t) => Ok(*t),
            Transmittance::Kretschmann(p) => {
                Ok(kretschmann_reflectance(p.theta_deg, p.wavelength_nm, &p.stack)?.reflectance)
            }
        }
    }
}

/// One simulated experiment: probe, object transmittance on mode 0, channel
/// efficiency `efficiency` on mode 0, any extra channels, and the readout.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub label: String,
    pub probe: StateSpec,
    pub transmittance: Transmittance,
    pub efficiency: f64,
    /// Applied before the object and efficiency losses.
    pub channels: Vec<ChannelSpec>,
    pub measurement: Measurement,
    /// Repetitions per estimate.
    pub nu: usize,
    /// Number of repeated estimates.
    pub samples: usize,
    pub seed: u64,
    pub fock: FockOptions,
}

impl ExperimentConfig {
    pub fn counting(label: impl Into<String>, probe: StateSpec, t: f64, efficiency: f64) -> Self {
        Self {
            label: label.into(),
            probe,
            transmittance: Transmittance::Direct(t),
            efficiency,
            channels: Vec::new(),
            measurement: Measurement::PhotonCounting,
            nu: 1,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            fock: FockOptions { hard_cap: MC_FOCK_CAP },
        }
    }

    pub fn validate(&self) -> Result<()> {
        const OP: &str = "ExperimentConfig";
        if self.nu < 1 {
            return Err(Error::config(OP, "nu must be >= 1"));
        }
        if self.samples < 2 {
            return Err(Error::config(OP, "samples must be >= 2"));
        }
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::config(OP, format!("efficiency = {} outside [0, 1]", self.efficiency)));
        }
        let t = self.transmittance.value()?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::config(OP, format!("transmittance = {t} outside [0, 1]")));
        }
        for c in &self.channels {
            c.validate()?;
        }
        Ok(())
    }

    /// Full channel chain for object transmittance `t`.
    fn chain(&self, t: f64) -> Vec<ChannelSpec> {
        let mut chain = self.channels.clone();
        chain.push(ChannelSpec::loss(t, 0));
        chain.push(ChannelSpec::loss(self.efficiency, 0));
        chain
    }

    fn representation(&self) -> Representation {
        match self.measurement {
            Measurement::IntensityDifference if !self.probe.is_number_state() => {
                Representation::Gaussian
            }
            _ => Representation::Fock,
        }
    }

    /// Output state for object transmittance `t`.
    fn output(&self, t: f64) -> Result<State> {
        let input = make_state(&self.probe, self.representation(), self.fock)?;
        apply_chain(&input, &self.chain(t), self.fock)
    }
}

/// Repeated estimates of one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateDistribution {
    pub estimates: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub truth: f64,
    pub bias: f64,
}

impl EstimateDistribution {
    pub fn new(estimates: Vec<f64>, truth: f64) -> Self {
        let (mean, std) = mean_std(&estimates);
        Self { estimates, mean, std, truth, bias: mean - truth }
    }

    /// Standard error of `std` from the χ approximation, `std / √(2(n-1))`.
    pub fn std_error_of_std(&self) -> f64 {
        std_of_std(self.std, self.estimates.len())
    }
}

pub(crate) fn std_of_std(std: f64, n: usize) -> f64 {
    std / (2.0 * (n as f64 - 1.0)).sqrt()
}

/// Sample mean and unbiased standard deviation.
pub(crate) fn mean_std(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

/// Generator for substream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed for work item `stream` derived from a master `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    substream(seed, stream).random()
}

/// Runs `f(i)` for `i in 0..n` in parallel and returns the results in index order.
pub(crate) fn parallel_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    let run = || (0..n).into_par_iter().map(&f).collect::<Vec<T>>();
    match std::env::var("QPLASM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(k) if k > 0 => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        _ => run(),
    }
}

/// Cumulative table for inverse-transform sampling of a discrete distribution.
#[derive(Debug, Clone)]
pub(crate) struct Sampler {
    cdf: Vec<f64>,
}

impl Sampler {
    pub(crate) fn new(p: &[f64]) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = p.iter().map(|x| {
            acc += x.max(0.0);
            acc
        }).collect();
        let total = acc;
        cdf.iter_mut().for_each(|c| *c /= total);
        Self { cdf }
    }

    pub(crate) fn draw(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

/// Prepared outcome distribution of one readout.
enum OutcomeSource {
    /// Joint photon-number distribution on `da x db`.
    Joint { sampler: Sampler, db: usize, coincidence: bool },
    /// Bivariate normal with the output number moments.
    Moments { mean: [f64; 2], chol: [[f64; 2]; 2] },
}

impl OutcomeSource {
    fn new(state: &State, measurement: Measurement) -> Result<Self> {
        const OP: &str = "sample_outcomes";
        match (state, measurement) {
            (State::Fock(f), m) => {
                if m == Measurement::Coincidence && f.modes() != 2 {
                    return Err(Error::config(OP, "coincidence detection needs a two-mode state"));
                }
                Ok(OutcomeSource::Joint {
                    sampler: Sampler::new(&f.joint_distribution()),
                    db: f.dims()[1],
                    coincidence: m == Measurement::Coincidence,
                })
            }
            (State::Gaussian(_), Measurement::IntensityDifference) => {
                if state.modes() != 2 {
                    return Err(Error::config(OP, "intensity-difference detection needs two modes"));
                }
                let m = number_moments(state);
                let (va, vb, c) = (m.variance[0].max(0.0), m.variance[1].max(0.0), m.covariance);
                let l00 = va.sqrt();
                let l10 = if l00 > 0.0 { c / l00 } else { 0.0 };
                let l11 = (vb - l10 * l10).max(0.0).sqrt();
                Ok(OutcomeSource::Moments { mean: m.mean, chol: [[l00, 0.0], [l10, l11]] })
            }
            (State::Gaussian(_), m) => Err(Error::config(
                OP,
                format!("{m:?} needs a number-basis state; Gaussian states support intensity difference only"),
            )),
        }
    }

    fn draw(&self, rng: &mut impl Rng) -> [f64; 2] {
        match self {
            OutcomeSource::Joint { sampler, db, coincidence } => {
                let i = sampler.draw(rng);
                let (n, m) = (i / db, i % db);
                if *coincidence {
                    [(n > 0) as u8 as f64, (m > 0) as u8 as f64]
                } else {
                    [n as f64, m as f64]
                }
            }
            OutcomeSource::Moments { mean, chol } => {
                let z: [f64; 2] = [rng.sample(StandardNormal), rng.sample(StandardNormal)];
                [
                    mean[0] + chol[0][0] * z[0],
                    mean[1] + chol[1][0] * z[0] + chol[1][1] * z[1],
                ]
            }
        }
    }
}

/// `nu` i.i.d. outcomes `[mode a, mode b]` of `measurement` on `state` after `chain`.
///
/// Counting returns photon numbers, coincidence returns click indicators and
/// intensity difference on Gaussian states returns normally distributed intensities.
pub fn sample_outcomes(
    state: &State,
    chain: &[ChannelSpec],
    measurement: Measurement,
    nu: usize,
    rng: &mut impl Rng,
    opts: FockOptions,
) -> Result<Vec<[f64; 2]>> {
    let out = apply_chain(state, chain, opts)?;
    let source = OutcomeSource::new(&out, measurement)?;
    Ok((0..nu).map(|_| source.draw(rng)).collect())
}

/// Mean input photon number of the signal mode.
fn signal_photons(probe: &StateSpec) -> Result<f64> {
    let n = probe.mean_photons()[0];
    if !(n > 0.0) {
        return Err(Error::config("estimate_transmittance", "probe has no photons in the signal mode"));
    }
    Ok(n)
}

/// Sample-mean estimator `T_est = mean(counts) / (η N)` applied per block of `nu` repetitions.
pub fn estimate_transmittance(config: &ExperimentConfig) -> Result<EstimateDistribution> {
    const OP: &str = "estimate_transmittance";
    config.validate()?;
    if config.measurement != Measurement::PhotonCounting {
        return Err(Error::config(OP, "transmittance estimation uses photon counting"));
    }
    if !(config.efficiency > 0.0) {
        return Err(Error::config(OP, "efficiency must be > 0"));
    }
    let truth = config.transmittance.value()?;
    let n = signal_photons(&config.probe)?;
    let source = OutcomeSource::new(&config.output(truth)?, config.measurement)?;
    let scale = 1.0 / (config.efficiency * n * config.nu as f64);
    let estimates = parallel_map(config.samples, |i| {
        let mut rng = substream(config.seed, i as u64);
        (0..config.nu).map(|_| source.draw(&mut rng)[0]).sum::<f64>() * scale
    });
    Ok(EstimateDistribution::new(estimates, truth))
}

/// Cramér-Rao standard deviation of the transmittance from the exact counting
/// distribution of the signal mode.
pub fn transmittance_bound(config: &ExperimentConfig) -> Result<f64> {
    const OP: &str = "transmittance_bound";
    let truth = config.transmittance.value()?;
    let cfg = config.clone();
    let marginal = move |t: f64| -> Result<Vec<f64>> {
        let out = cfg.output(t)?;
        let f = out.as_fock().ok_or_else(|| Error::config(OP, "counting needs a number-basis state"))?;
        Ok(f.marginal(0))
    };
    let outcomes = marginal(truth)?.len();
    let model = OutcomeModel::new(outcomes, (0.0, 1.0), move |t| {
        let mut p = marginal(t)?;
        p.resize(outcomes, 0.0);
        Ok(p)
    })?;
    let fi = if truth > 1.0 - 1e-6 {
        edge_fisher_information(&model, truth, 1e-4)?
    } else {
        let step = 1e-4_f64.min(0.25 * truth).min(0.25 * (1.0 - truth)).max(1e-7);
        fisher_information(&model, truth, step)?.value
    };
    Ok(crate::estimate::cramer_rao(fi, config.nu as f64))
}

/// Fisher information at the upper domain edge from Richardson-extrapolated
/// second-order backward differences.
fn edge_fisher_information(model: &OutcomeModel, x: f64, h: f64) -> Result<f64> {
    let backward = |h: f64| -> Result<Vec<f64>> {
        let (p0, p1, p2) = (model.probabilities(x)?, model.probabilities(x - h)?, model.probabilities(x - 2.0 * h)?);
        Ok((0..p0.len()).map(|i| (3.0 * p0[i] - 4.0 * p1[i] + p2[i]) / (2.0 * h)).collect())
    };
    let (coarse, fine) = (backward(h)?, backward(0.5 * h)?);
    let p = model.probabilities(x)?;
    Ok(p.iter()
        .zip(coarse.iter().zip(&fine))
        .filter(|(&pi, _)| pi > 1e-300)
        .map(|(&pi, (&c, &f))| {
            let d = (4.0 * f - c) / 3.0;
            d * d / pi
        })
        .sum())
}

/// One line of a strategy comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub label: String,
    pub truth: f64,
    pub mean: f64,
    pub empirical_std: f64,
    /// Standard error of `empirical_std`.
    pub std_error: f64,
    /// Analytic prediction for `empirical_std`.
    pub bound: f64,
    /// `empirical_std` relative to the first row.
    pub ratio: f64,
    /// `bound` relative to the first row.
    pub bound_ratio: f64,
    /// `|empirical_std - bound| <= 3 std_error`.
    pub within_tolerance: bool,
}

/// Empirical figure, its standard error and the analytic prediction for one config.
fn evaluate(config: &ExperimentConfig) -> Result<(String, f64, f64, f64, f64, f64)> {
    match config.measurement {
        Measurement::PhotonCounting => {
            let d = estimate_transmittance(config)?;
            let bound = transmittance_bound(config)?;
            Ok((config.label.clone(), d.truth, d.mean, d.std, d.std_error_of_std(), bound))
        }
        Measurement::IntensityDifference => {
            let truth = config.transmittance.value()?;
            let probe = differential::probe_from_spec(&config.probe)?;
            let channels = crate::estimate::DifferentialChannels {
                t: truth,
                eta_a: config.efficiency,
                eta_b: config.efficiency,
            };
            let s = sample_differential(probe, channels, config.samples, config.seed)?;
            let predicted = differential::exact_sigma_out(probe, channels)?;
            Ok((config.label.clone(), truth, s.mean_difference, s.sigma_out, s.sigma_out_error, predicted))
        }
        Measurement::Coincidence => Err(Error::config(
            "compare_strategies",
            "coincidence configs have no tabulated comparison",
        )),
    }
}

/// Tabulates empirical spreads next to their analytic predictions.
///
/// Photon-counting rows compare the transmittance std with the Cramér-Rao bound;
/// intensity-difference rows compare the empirical NRF with its closed form.
pub fn compare_strategies(configs: &[ExperimentConfig]) -> Result<Vec<ComparisonRow>> {
    const OP: &str = "compare_strategies";
    if configs.is_empty() {
        return Err(Error::config(OP, "no configurations given"));
    }
    let t0 = configs[0].transmittance.value()?;
    for c in configs {
        if (c.transmittance.value()? - t0).abs() > 1e-12 {
            return Err(Error::config(OP, "configurations must share the ground-truth transmittance"));
        }
    }
    let rows = configs.iter().map(evaluate).collect::<Result<Vec<_>>>()?;
    let (ref_emp, ref_bound) = (rows[0].3, rows[0].5);
    Ok(rows
        .into_iter()
        .map(|(label, truth, mean, emp, se, bound)| ComparisonRow {
            label,
            truth,
            mean,
            empirical_std: emp,
            std_error: se,
            bound,
            ratio: emp / ref_emp,
            bound_ratio: bound / ref_bound,
            within_tolerance: (emp - bound).abs() <= 3.0 * se,
        })
        .collect())
}
