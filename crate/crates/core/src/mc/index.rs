//! Refractive-index estimation from prism transmittance counts with an air reference.

use super::{mean_std, parallel_map, substream, EstimateDistribution, ExperimentConfig, KretschmannProbe, OutcomeSource, Transmittance};
use crate::error::{Error, Result};

/// Index change per percent concentration used when none is configured.
pub const DEFAULT_CALIBRATION_SLOPE: f64 = 1.933e-3;

const MONOTONIC_GRID: usize = 200;

/// Index estimation at a fixed incidence angle.
///
/// The experiment's transmittance must be a [`Transmittance::Kretschmann`] probe whose
/// stack holds the true analyte index.
#[derive(Debug, Clone, PartialEq)]
pub struct RefractiveIndexConfig {
    pub experiment: ExperimentConfig,
    /// Search interval for the inversion.
    pub window: (f64, f64),
    /// Index of the reference analyte (air).
    pub reference_index: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexEstimate {
    pub distribution: EstimateDistribution,
    /// Mean total transmittance of the simulated reference run.
    pub normalization: f64,
    /// Estimates pinned to a window edge because the measured ratio fell outside its range.
    pub saturated: usize,
    /// `d(R / R_ref)/dn` at the true index.
    pub slope: f64,
    /// Delta-method std of the estimate from counting noise alone.
    pub predicted_std: f64,
}

fn kretschmann(config: &RefractiveIndexConfig) -> Result<&KretschmannProbe> {
    match &config.experiment.transmittance {
        Transmittance::Kretschmann(p) => Ok(p),
        Transmittance::Direct(_) => Err(Error::config(
            "estimate_refractive_index",
            "index estimation needs a prism transmittance model",
        )),
    }
}

/// Normalised prism transmittance `R(n) / R(n_ref)`.
fn ratio(probe: &KretschmannProbe, reference: f64, n: f64) -> Result<f64> {
    Ok(probe.reflectance_at_index(n)? / probe.reflectance_at_index(reference)?)
}

/// Checks that `R(n)/R(n_ref)` is strictly monotonic over `window`. On failure the
/// error names the monotonic stretch around `truth`.
fn check_monotonic(probe: &KretschmannProbe, reference: f64, window: (f64, f64), truth: f64) -> Result<()> {
    const OP: &str = "estimate_refractive_index";
    let (lo, hi) = window;
    let grid: Vec<f64> = (0..=MONOTONIC_GRID)
        .map(|i| lo + (hi - lo) * i as f64 / MONOTONIC_GRID as f64)
        .collect();
    let values = grid.iter().map(|&n| ratio(probe, reference, n)).collect::<Result<Vec<_>>>()?;
    let signs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).signum()).collect();
    if signs.iter().all(|&s| s == signs[0] && s != 0.0) {
        return Ok(());
    }
    let at = ((truth - lo) / (hi - lo) * MONOTONIC_GRID as f64).clamp(0.0, (MONOTONIC_GRID - 1) as f64) as usize;
    let s = signs[at];
    let mut a = at;
    while a > 0 && signs[a - 1] == s {
        a -= 1;
    }
    let mut b = at;
    while b + 1 < signs.len() && signs[b + 1] == s {
        b += 1;
    }
    Err(Error::config(
        OP,
        format!(
            "normalised transmittance is not monotonic over [{lo}, {hi}]; monotonic window around the true index: [{:.6}, {:.6}]",
            grid[a],
            grid[b + 1]
        ),
    ))
}

/// Inverts `R(n)/R(n_ref) = t_prism` on `window` by bisection. Returns the index and
/// whether it was pinned to a window edge.
pub fn index_from_normalized_transmittance(
    probe: &KretschmannProbe,
    reference_index: f64,
    window: (f64, f64),
    t_prism: f64,
) -> Result<(f64, bool)> {
    let (mut lo, mut hi) = window;
    let f = |n: f64| ratio(probe, reference_index, n).map(|r| r - t_prism);
    let (mut flo, fhi) = (f(lo)?, f(hi)?);
    if flo * fhi > 0.0 {
        return Ok(if flo.abs() < fhi.abs() { (lo, true) } else { (hi, true) });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok((mid, false));
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), false))
}

/// Per sample: simulate counts, form the total transmittance, normalise by the mean of
/// a simulated reference run and invert the normalised prism reflectance.
pub fn estimate_refractive_index(config: &RefractiveIndexConfig) -> Result<IndexEstimate> {
    const OP: &str = "estimate_refractive_index";
    let exp = &config.experiment;
    exp.validate()?;
    let probe = kretschmann(config)?;
    let (lo, hi) = config.window;
    if !(hi > lo) {
        return Err(Error::config(OP, "index window must have hi > lo"));
    }
    let truth = probe.stack.analyte_permittivity.sqrt();
    if !(lo..=hi).contains(&truth) {
        return Err(Error::config(OP, format!("true index {truth} lies outside the window [{lo}, {hi}]")));
    }
    check_monotonic(probe, config.reference_index, config.window, truth)?;
    let photons = exp.probe.mean_photons()[0];
    if !(photons > 0.0) || !(exp.efficiency > 0.0) {
        return Err(Error::config(OP, "probe photons and efficiency must be > 0"));
    }

    let block = |t: f64, stream_offset: u64| -> Result<Vec<f64>> {
        let source = OutcomeSource::new(&exp.output(t)?, exp.measurement)?;
        let scale = 1.0 / (photons * exp.nu as f64);
        Ok(parallel_map(exp.samples, |i| {
            let mut rng = substream(exp.seed, stream_offset + i as u64);
            (0..exp.nu).map(|_| source.draw(&mut rng)[0]).sum::<f64>() * scale
        }))
    };
    let r_true = probe.reflectance_at_index(truth)?;
    let r_ref = probe.reflectance_at_index(config.reference_index)?;
    let totals = block(r_true, 0)?;
    let reference = block(r_ref, exp.samples as u64)?;
    let normalization = mean_std(&reference).0;
    if !(normalization > 0.0) {
        return Err(Error::Degenerate { op: OP, msg: "reference run detected no photons".into() });
    }

    let mut saturated = 0;
    let mut estimates = Vec::with_capacity(totals.len());
    for t in &totals {
        let (n, pinned) = index_from_normalized_transmittance(probe, config.reference_index, config.window, t / normalization)?;
        saturated += pinned as usize;
        estimates.push(n);
    }

    let h = 1e-5;
    let slope = (ratio(probe, config.reference_index, truth + h)? - ratio(probe, config.reference_index, truth - h)?) / (2.0 * h);
    let out = exp.output(r_true)?;
    let m = crate::states::number_moments(&out);
    let std_total = (m.variance[0] / exp.nu as f64).sqrt() / photons;
    let predicted_std = std_total / (exp.efficiency * r_ref) / slope.abs();
    Ok(IndexEstimate {
        distribution: EstimateDistribution::new(estimates, truth),
        normalization,
        saturated,
        slope,
        predicted_std,
    })
}

/// Concentration in percent from an index estimate and a calibration slope (index per percent).
pub fn concentration_from_index(n_hat: f64, n_solvent: f64, slope: f64) -> Result<f64> {
    if !(slope != 0.0) || !slope.is_finite() {
        return Err(Error::config("concentration_from_index", "calibration slope must be finite and non-zero"));
    }
    Ok((n_hat - n_solvent) / slope)
}
