//! Brute-force photon pipeline for intensity-difference detection.

use rand_distr::{Binomial, Distribution, Geometric, Poisson};

use super::{mean_std, parallel_map, substream};
use crate::error::{Error, Result};
use crate::estimate::{DifferentialChannels, DifferentialProbe};
use crate::states::StateSpec;

/// Empirical intensity-difference statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferentialSample {
    pub samples: usize,
    pub mean: [f64; 2],
    pub mean_difference: f64,
    pub variance_difference: f64,
    /// `Var(n_a - n_b) / (<n_a> + <n_b>)`.
    pub sigma_out: f64,
    /// Standard error of `sigma_out` from batch means.
    pub sigma_out_error: f64,
}

/// Maps a state spec onto the probes with a closed-form NRF.
pub(crate) fn probe_from_spec(spec: &StateSpec) -> Result<DifferentialProbe> {
    const OP: &str = "sample_differential";
    match spec {
        StateSpec::TwinFock { n } => Ok(DifferentialProbe::TwinFock { n: *n as f64 }),
        StateSpec::Tmsv { r, .. } => Ok(DifferentialProbe::Tmsv { gain: r.cosh().powi(2), alpha2: 0.0 }),
        StateSpec::Product(a, b) => match (a.as_ref(), b.as_ref()) {
            (StateSpec::Coherent { alpha }, StateSpec::Coherent { alpha: beta })
                if (alpha.norm_sqr() - beta.norm_sqr()).abs() < 1e-12 =>
            {
                Ok(DifferentialProbe::ProductCoherent { n: alpha.norm_sqr() })
            }
            _ => Err(Error::config(OP, "product probes must be two coherent states of equal intensity")),
        },
        other => Err(Error::config(OP, format!("no photon pipeline for probe {other:?}"))),
    }
}

/// Closed-form output NRF for a probe the pipeline can sample.
///
/// A vacuum-seeded TMSV carries one photon of seed noise per mode, so its NRF is the
/// seeded expression evaluated at `|alpha|^2 = 1`.
pub fn exact_sigma_out(probe: DifferentialProbe, ch: DifferentialChannels) -> Result<f64> {
    let probe = match probe {
        DifferentialProbe::Tmsv { gain, alpha2 } if alpha2 == 0.0 => DifferentialProbe::Tmsv { gain, alpha2: 1.0 },
        p => p,
    };
    Ok(crate::estimate::differential_intensity_figures(probe, ch)?.sigma_out)
}

fn thin(n: u64, p: f64, rng: &mut impl rand::Rng) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    Binomial::new(n, p.min(1.0)).expect("valid binomial").sample(rng)
}

/// Draws photon pairs from the probe, thins mode a by `T η_a` and mode b by `η_b`,
/// and reports the difference statistics over `samples` draws.
pub fn sample_differential(
    probe: DifferentialProbe,
    ch: DifferentialChannels,
    samples: usize,
    seed: u64,
) -> Result<DifferentialSample> {
    const OP: &str = "sample_differential";
    if samples < 20 {
        return Err(Error::config(OP, "need at least 20 samples"));
    }
    for (name, v) in [("T", ch.t), ("eta_a", ch.eta_a), ("eta_b", ch.eta_b)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::config(OP, format!("{name} = {v} outside [0, 1]")));
        }
    }
    let (a, b) = (ch.t * ch.eta_a, ch.eta_b);
    let source: Box<dyn Fn(&mut rand_chacha::ChaCha8Rng) -> (u64, u64) + Sync + Send> = match probe {
        DifferentialProbe::TwinFock { n } => {
            if !(n >= 0.0) || n.fract() != 0.0 {
                return Err(Error::config(OP, "twin Fock photon number must be a non-negative integer"));
            }
            let n = n as u64;
            Box::new(move |_| (n, n))
        }
        DifferentialProbe::ProductCoherent { n } => {
            let pois = Poisson::new(n).map_err(|e| Error::config(OP, e.to_string()))?;
            Box::new(move |rng| (pois.sample(rng) as u64, pois.sample(rng) as u64))
        }
        DifferentialProbe::Tmsv { gain, alpha2 } => {
            if alpha2 != 0.0 {
                return Err(Error::config(OP, "the photon pipeline needs a vacuum-seeded TMSV"));
            }
            // pair number is thermal with mean G - 1
            let geo = Geometric::new(1.0 / gain).map_err(|e| Error::config(OP, e.to_string()))?;
            Box::new(move |rng| {
                let k = geo.sample(rng);
                (k, k)
            })
        }
        DifferentialProbe::Tmsd { .. } => {
            return Err(Error::config(OP, "no photon pipeline for the displaced two-mode state"));
        }
    };
    let draws = parallel_map(samples, |i| {
        let mut rng = substream(seed, i as u64);
        let (n, m) = source(&mut rng);
        (thin(n, a, &mut rng) as f64, thin(m, b, &mut rng) as f64)
    });
    let stats = |d: &[(f64, f64)]| -> (f64, f64, f64, f64) {
        let na: Vec<f64> = d.iter().map(|x| x.0).collect();
        let nb: Vec<f64> = d.iter().map(|x| x.1).collect();
        let diff: Vec<f64> = d.iter().map(|x| x.0 - x.1).collect();
        let (ma, mb) = (mean_std(&na).0, mean_std(&nb).0);
        let (md, sd) = mean_std(&diff);
        (ma, mb, md, sd * sd)
    };
    let (ma, mb, md, vd) = stats(&draws);
    if !(ma + mb > 0.0) {
        return Err(Error::Degenerate { op: OP, msg: "no photons detected".into() });
    }
    let batches = (samples / 1000).clamp(20, 100);
    let size = samples / batches;
    let per_batch: Vec<f64> = draws
        .chunks_exact(size)
        .map(|c| {
            let (ma, mb, _, vd) = stats(c);
            vd / (ma + mb)
        })
        .collect();
    let (_, spread) = mean_std(&per_batch);
    Ok(DifferentialSample {
        samples,
        mean: [ma, mb],
        mean_difference: md,
        variance_difference: vd,
        sigma_out: vd / (ma + mb),
        sigma_out_error: spread / (per_batch.len() as f64).sqrt(),
    })
}
