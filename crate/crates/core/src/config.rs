//! Manifold description files.
//!
//! A JSON object:
//!
//! ```json
//! {
//!   "name": "warped",
//!   "dimension": 3,
//!   "signature": 0,
//!   "metric": { "0,0": "1", "1,1": "exp(2*x0)", "2,2": "exp(2*x0)*sin(x1)^2" },
//!   "xi": ["1", "0", "0"],
//!   "k": -1,
//!   "epsilon": 1,
//!   "chart_box": [[-0.5, 0.5], [0.3, 1.27], [0, 1]],
//!   "class_tag": "kenmotsu"
//! }
//! ```
//!
//! `signature` counts negative directions of `g`. `xi`, `k` (default 0),
//! `epsilon` (default 1), `class_tag` (default `generic`) and
//! `constant_curvature` (default false) are optional. Metric keys must lie
//! in the upper triangle; missing ones are zero.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geometry::ManifoldSpec;
use crate::nk::{ClassTag, RegistryEntry};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldConfigFile {
    pub name: String,
    pub dimension: usize,
    pub signature: usize,
    pub metric: BTreeMap<String, String>,
    #[serde(default)]
    pub xi: Option<Vec<String>>,
    #[serde(default)]
    pub k: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    pub chart_box: Vec<[f64; 2]>,
    #[serde(default)]
    pub class_tag: Option<ClassTag>,
    #[serde(default)]
    pub constant_curvature: bool,
}

fn default_epsilon() -> f64 {
    1.0
}

fn parse_key(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Invalid(format!("metric key '{key}' is not of the form \"i,j\""));
    let (i, j) = key.split_once(',').ok_or_else(bad)?;
    Ok((
        i.trim().parse().map_err(|_| bad())?,
        j.trim().parse().map_err(|_| bad())?,
    ))
}

impl ManifoldConfigFile {
    pub fn from_json(text: &str) -> Result<ManifoldConfigFile> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("config: {e}")))
    }

    /// Parses every expression and checks the declared signature at the
    /// centre of the chart box.
    pub fn into_entry(self) -> Result<RegistryEntry> {
        let keys = self
            .metric
            .iter()
            .map(|(k, v)| Ok((parse_key(k)?, v.as_str())))
            .collect::<Result<Vec<_>>>()?;
        let xi: Option<Vec<&str>> = self
            .xi
            .as_ref()
            .map(|v| v.iter().map(String::as_str).collect());
        let bx: Vec<(f64, f64)> = self.chart_box.iter().map(|[lo, hi]| (*lo, *hi)).collect();
        let spec = ManifoldSpec::from_sources(
            &self.name,
            self.dimension,
            &keys,
            xi.as_deref(),
            self.k,
            self.epsilon,
            &bx,
        )?;
        let centre: Vec<f64> = bx.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
        let found = spec.metric_at(&centre)?.signature;
        if found != self.signature {
            return Err(Error::Invalid(format!(
                "declared signature {} but g has {found} negative directions at the chart centre",
                self.signature
            )));
        }
        let class = self.class_tag.unwrap_or(ClassTag::Generic);
        RegistryEntry::new(spec, class, self.constant_curvature)
    }
}

pub fn load_entry(text: &str) -> Result<RegistryEntry> {
    ManifoldConfigFile::from_json(text)?.into_entry()
}
