//! Closed-form Cramér-Rao bounds and the NOON coincidence model.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Named parameters for a catalog entry. `nu` defaults to 1 when absent.
pub type BoundParams = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub name: String,
    /// Standard deviation bound in the units of the estimated parameter.
    pub value: f64,
    pub nu: f64,
    pub inputs: BoundParams,
}

struct Entry {
    name: &'static str,
    params: &'static [&'static str],
    /// Single-shot bound; the catalog divides by `√ν`.
    eval: fn(&Lookup) -> Result<f64>,
}

struct Lookup<'a> {
    name: &'static str,
    params: &'a BoundParams,
}

impl Lookup<'_> {
    fn get(&self, key: &str) -> Result<f64> {
        let v = *self.params.get(key).ok_or_else(|| {
            Error::config("bound_catalog", format!("`{}` needs parameter `{key}`", self.name))
        })?;
        if !v.is_finite() {
            return Err(Error::domain("bound_catalog", format!("`{key}` must be finite")));
        }
        Ok(v)
    }

    fn positive(&self, key: &str) -> Result<f64> {
        let v = self.get(key)?;
        if !(v > 0.0) {
            return Err(Error::domain("bound_catalog", format!("`{key}` = {v} must be > 0")));
        }
        Ok(v)
    }

    fn fraction(&self, key: &str) -> Result<f64> {
        let v = self.get(key)?;
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::domain("bound_catalog", format!("`{key}` = {v} outside (0, 1]")));
        }
        Ok(v)
    }

    fn non_negative(&self, key: &str) -> Result<f64> {
        let v = self.get(key)?;
        if !(v >= 0.0) {
            return Err(Error::domain("bound_catalog", format!("`{key}` = {v} must be >= 0")));
        }
        Ok(v)
    }
}

const ENTRIES: &[Entry] = &[
    Entry {
        name: "snl_intensity",
        params: &["T", "eta", "N"],
        eval: |p| Ok((p.fraction("T")? / (p.fraction("eta")? * p.positive("N")?)).sqrt()),
    },
    Entry {
        name: "fock_intensity",
        params: &["T", "eta", "N"],
        eval: |p| {
            let (t, eta, n) = (p.fraction("T")?, p.fraction("eta")?, p.positive("N")?);
            Ok((t * (1.0 - eta * t) / (eta * n)).sqrt())
        },
    },
    Entry {
        name: "sil",
        params: &["eta_a", "eta_b", "N"],
        eval: |p| {
            let (a, b) = (p.fraction("eta_a")?.sqrt(), p.fraction("eta_b")?.sqrt());
            Ok((a + b) / (2.0 * a * b) / p.positive("N")?.sqrt())
        },
    },
    Entry {
        name: "mzi_lossless_cs_sv",
        params: &["alpha2", "r"],
        eval: |p| {
            let (a2, r) = (p.non_negative("alpha2")?, p.non_negative("r")?);
            positive_information(a2 * (2.0 * r).exp() + r.sinh().powi(2))
        },
    },
    Entry {
        name: "mzi_lossy_cs_sv",
        params: &["alpha2", "r", "eta"],
        eval: |p| {
            let (a2, r, eta) = (p.non_negative("alpha2")?, p.non_negative("r")?, p.fraction("eta")?);
            positive_information(
                a2 * eta / ((1.0 - eta) + (-2.0 * r).exp() * eta) + eta * r.sinh().powi(2),
            )
        },
    },
    Entry {
        name: "sm_squeezed_phase",
        params: &["N"],
        eval: |p| {
            let n = p.positive("N")?;
            Ok(1.0 / (8.0 * (n + n * n)).sqrt())
        },
    },
    Entry {
        name: "noon",
        params: &["N"],
        eval: |p| Ok(1.0 / p.positive("N")?),
    },
    Entry {
        name: "two_smsv_optimal",
        params: &["N"],
        eval: |p| {
            let n = p.positive("N")?;
            Ok(1.0 / (n * (n + 1.0)).sqrt())
        },
    },
    Entry {
        name: "homodyne_lossy",
        params: &["alpha2", "r", "eta"],
        eval: |p| {
            let (a2, r, eta) = (p.positive("alpha2")?, p.non_negative("r")?, p.fraction("eta")?);
            Ok((1.0 / (a2 * (2.0 * r).exp()) + (1.0 - eta) / (eta * a2)).sqrt())
        },
    },
    Entry {
        name: "su11_external",
        params: &["delta_phi", "eta_e"],
        eval: |p| Ok(p.positive("delta_phi")? / p.fraction("eta_e")?.sqrt()),
    },
    Entry {
        name: "su11_internal",
        params: &["delta_phi", "eta_i", "N_i", "alpha2", "beta2"],
        eval: |p| {
            let eta = p.fraction("eta_i")?;
            let seed = p.non_negative("alpha2")? + p.non_negative("beta2")?;
            if !(seed > 0.0) {
                return Err(Error::domain("bound_catalog", "alpha2 + beta2 must be > 0"));
            }
            let factor = 1.0 + (1.0 - eta) / eta * p.non_negative("N_i")? / seed;
            Ok(factor.sqrt() * p.positive("delta_phi")?)
        },
    },
];

fn positive_information(h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::domain("bound_catalog", "probe carries no phase information"));
    }
    Ok(1.0 / h.sqrt())
}

/// Names of all catalog entries.
pub fn catalog_names() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.name).collect()
}

/// Parameters required by `name` (besides the optional `nu`).
pub fn catalog_parameters(name: &str) -> Result<&'static [&'static str]> {
    find(name).map(|e| e.params)
}

fn find(name: &str) -> Result<&'static Entry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Catalog { name: name.to_string(), available: catalog_names() })
}

/// Evaluates the named closed-form bound, including its `1/√ν` factor.
pub fn bound_catalog(name: &str, params: &BoundParams) -> Result<BoundResult> {
    let entry = find(name)?;
    let nu = params.get("nu").copied().unwrap_or(1.0);
    if !(nu >= 1.0) || !nu.is_finite() {
        return Err(Error::domain("bound_catalog", format!("nu = {nu} must be >= 1")));
    }
    let single = (entry.eval)(&Lookup { name: entry.name, params })?;
    let mut inputs = params.clone();
    inputs.insert("nu".into(), nu);
    Ok(BoundResult { name: entry.name.to_string(), value: single / nu.sqrt(), nu, inputs })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoonCoincidence {
    pub probability: f64,
    /// Single-shot CR bound; `None` where `V_N sin(Nφ) = 0` and the bound is infinite.
    pub delta_phi: Option<f64>,
    pub eta_tilde: f64,
    pub threshold_visibility: f64,
    pub super_sensitive: bool,
}

/// N-fold coincidence statistics of a NOON probe with visibility `visibility` and
/// coincidence fraction `f`.
pub fn noon_coincidence(
    phi: f64,
    f: f64,
    visibility: f64,
    n: u32,
    eta_a: f64,
    eta_b: f64,
) -> Result<NoonCoincidence> {
    const OP: &str = "noon_coincidence";
    if !(0.0..=1.0).contains(&f) || !(0.0..=1.0).contains(&visibility) {
        return Err(Error::domain(OP, "f_N and V_N must lie in [0, 1]"));
    }
    if n == 0 {
        return Err(Error::domain(OP, "N must be >= 1"));
    }
    if !(eta_a > 0.0 && eta_a <= 1.0 && eta_b > 0.0 && eta_b <= 1.0) {
        return Err(Error::domain(OP, "efficiencies must lie in (0, 1]"));
    }
    if !phi.is_finite() {
        return Err(Error::domain(OP, "phase must be finite"));
    }
    let nf = n as f64;
    let p = f * (1.0 + visibility * (nf * phi).cos()) / 2.0;
    let slope = f * visibility * nf * (nf * phi).sin().abs();
    let delta_phi = (slope > 1e-300).then(|| 2.0 * (p * (1.0 - p)).sqrt() / slope);
    let (sa, sb) = (eta_a.sqrt(), eta_b.sqrt());
    let eta_tilde = (2.0 * sa * sb / (sa + sb)).powi(2);
    let threshold_visibility = if f > 0.0 { (eta_tilde / (f * f * nf)).sqrt() } else { f64::INFINITY };
    Ok(NoonCoincidence {
        probability: p,
        delta_phi,
        eta_tilde,
        threshold_visibility,
        super_sensitive: visibility > threshold_visibility,
    })
}
