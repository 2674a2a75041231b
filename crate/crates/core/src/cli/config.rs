use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coefficients::RingTag;
use crate::eigenflow::{seeded_spectrum, MorseDatum, Space, SymmetricSpectrum, Vertical};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::oracle::OracleConfig;
use crate::scalar::Tolerances;

/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "MORSE_SEED";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumSpec {
    pub label: String,
    #[serde(default = "default_space")]
    pub space: Space,
    /// Row-major symmetric matrix of size `n + 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    /// Seed of a random spectrum, mixed with the run seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertical: Option<Vertical<f64>>,
}

fn default_space() -> Space {
    Space::Sphere
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub sym: Option<f64>,
    pub orth: Option<f64>,
    pub eig: Option<f64>,
    pub gap: Option<f64>,
    pub on: Option<f64>,
    pub flow: Option<f64>,
    pub rank: Option<f64>,
    pub pos: Option<f64>,
    pub support: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self) -> Result<Tolerances<f64>> {
        let base = Tolerances::standard();
        let t = Tolerances {
            sym: self.sym.unwrap_or(base.sym),
            orth: self.orth.unwrap_or(base.orth),
            eig: self.eig.unwrap_or(base.eig),
            gap: self.gap.unwrap_or(base.gap),
            on: self.on.unwrap_or(base.on),
            flow: self.flow.unwrap_or(base.flow),
            rank: self.rank.unwrap_or(base.rank),
            pos: self.pos.unwrap_or(base.pos),
            support: self.support.unwrap_or(base.support),
        };
        let all = [t.sym, t.orth, t.eig, t.gap, t.on, t.flow, t.rank, t.pos, t.support];
        if all.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::InvalidInput("tolerances must be positive and finite".into()));
        }
        Ok(t)
    }
}

/// Settings of the `verify` seed sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySettings {
    /// Random generic pairs per dimension in the sweep.
    pub seeds: u64,
    /// Largest `n` of the sweep.
    pub max_n: usize,
    /// Random configurations for the orientation swap rule.
    pub swap_trials: usize,
}

impl Default for VerifySettings {
    fn default() -> Self {
        VerifySettings { seeds: 5, max_n: 3, swap_trials: 20 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    #[serde(default = "default_ring")]
    pub ring: RingTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub data: Vec<DatumSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attracting_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_label: Option<String>,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub verify: VerifySettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_ring() -> RingTag {
    RingTag::Z2
}

/// Seed precedence: flag, then environment, then config, then 0.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>, config: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(raw) = env {
        return raw
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("{SEED_ENV}={raw} is not an unsigned integer")));
    }
    Ok(config.unwrap_or(0))
}

/// Seed of one datum's spectrum; a run seed of 0 leaves the datum seed unchanged.
pub fn datum_seed(run: u64, datum: u64) -> u64 {
    run.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(29) ^ datum
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        let mut labels = HashSet::new();
        for d in &self.data {
            if d.label.is_empty() || !labels.insert(d.label.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate or empty datum label `{}`", d.label)));
            }
            match (&d.matrix, d.seed) {
                (Some(m), None) => {
                    if m.len() != self.n + 1 || m.iter().any(|r| r.len() != self.n + 1) {
                        return Err(Error::InvalidInput(format!(
                            "matrix of datum {} must be {0}x{0}",
                            self.n + 1
                        )));
                    }
                }
                (None, Some(_)) => {}
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "datum {} needs exactly one of `matrix` and `seed`",
                        d.label
                    )))
                }
            }
            if self.ring == RingTag::Z && d.space == Space::Projective {
                return Err(Error::InvalidInput(format!("ring z requires sphere data, {} is projective", d.label)));
            }
        }
        for l in [&self.alpha_label, &self.attracting_label, &self.gamma_label].into_iter().flatten() {
            if !labels.contains(l.as_str()) {
                return Err(Error::InvalidInput(format!("label `{l}` does not name a datum")));
            }
        }
        self.tolerances.apply()?;
        self.oracle.validate()
    }

    pub fn datum(&self, label: &str, run_seed: u64, tol: &Tolerances<f64>) -> Result<MorseDatum<f64>> {
        let spec = self
            .data
            .iter()
            .find(|d| d.label == label)
            .ok_or_else(|| Error::InvalidInput(format!("label `{label}` does not name a datum")))?;
        let spectrum = match (&spec.matrix, spec.seed) {
            (Some(m), _) => SymmetricSpectrum::eigendecompose(&Matrix::from_rows(m), tol)?,
            (None, Some(s)) => seeded_spectrum(self.n, datum_seed(run_seed, s), tol)?,
            (None, None) => return Err(Error::InvalidInput(format!("datum {label} has no spectrum"))),
        };
        MorseDatum::new(spec.space, spectrum, spec.vertical, label)
    }

    pub fn required_label<'a>(&self, label: &'a Option<String>, what: &str) -> Result<&'a str> {
        label.as_deref().ok_or_else(|| Error::InvalidInput(format!("config is missing `{what}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(Some(3), Some("5"), Some(7)).unwrap(), 3);
        assert_eq!(resolve_seed(None, Some("5"), Some(7)).unwrap(), 5);
        assert_eq!(resolve_seed(None, None, Some(7)).unwrap(), 7);
        assert_eq!(resolve_seed(None, None, None).unwrap(), 0);
        assert!(resolve_seed(None, Some("x"), None).is_err());
        assert_eq!(datum_seed(0, 11), 11);
        assert_ne!(datum_seed(1, 11), 11);
    }

    #[test]
    fn parse_and_validate() {
        let text = r#"{"n": 2, "ring": "z2", "data": [
            {"label": "a", "space": "projective", "seed": 1, "vertical": {"sign": "-", "center": 0.0}},
            {"label": "b", "matrix": [[1,0,0],[0,2,0],[0,0,3]]}],
            "alpha_label": "a", "attracting_label": "b"}"#;
        let c: RunConfig = serde_json::from_str(text).unwrap();
        c.validate().unwrap();
        let tol = c.tolerances.apply().unwrap();
        assert_eq!(c.datum("a", 0, &tol).unwrap().index_shift(), 1);

        let bad = RunConfig { gamma_label: Some("zz".into()), ..c.clone() };
        assert!(bad.validate().is_err());
        let z = RunConfig { ring: RingTag::Z, ..c };
        assert!(z.validate().is_err());
    }
}
