//! Scenario configuration files (TOML).
//!
//! ```toml
//! version = 1
//! autoscaler = "both"          # smart | baseline | both
//! seed = 0
//! noise = 0.0                  # relative load jitter, seeded
//!
//! [load]
//! total_duration = 900
//! ramp_duration = 300
//! peak_users = 600
//! spawn_rate = 2.0
//!
//! [timing]
//! reconcile_period = 15
//! sample_period = 1
//! startup_delay = 0
//! metrics_window = 0
//!
//! [flags]
//! strict_conservation = false
//! apply_res_dr_on_noscale = false
//! reset_max_r_each_tick = false
//!
//! [baseline]
//! tolerance = 0.0
//! downscale_stabilization = 0
//!
//! [[services]]                 # omit to use the default 11-service app
//! name = "frontend"
//! cpu_request = 100
//! cpu_limit = 200
//! min_r = 1
//! max_r = 5
//! tmv = 50.0
//!
//! [demand.frontend]            # omit for default coefficients
//! base = 50
//! per_user = 1.0
//!
//! [matrix]                     # overrides every service's max_r and tmv
//! max_replicas = [2, 5, 10]
//! thresholds = [20.0, 50.0, 80.0]
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::autoscaler::AutoscalerKind;
use crate::baseline::BaselineOptions;
use crate::domain::{MicroserviceSpec, MilliCpu, SlaMetrics};
use crate::error::{Error, Result};
use crate::sim::{Flags, LoadProfile, Scenario, ServiceConfig, ServiceDemand, Timing};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoscalerSelection {
    Smart,
    Baseline,
    #[default]
    Both,
}

impl AutoscalerSelection {
    pub fn kinds(self) -> Vec<AutoscalerKind> {
        match self {
            AutoscalerSelection::Smart => vec![AutoscalerKind::Smart],
            AutoscalerSelection::Baseline => vec![AutoscalerKind::Baseline],
            AutoscalerSelection::Both => AutoscalerKind::ALL.to_vec(),
        }
    }
}

impl std::str::FromStr for AutoscalerSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smart" => Ok(AutoscalerSelection::Smart),
            "baseline" => Ok(AutoscalerSelection::Baseline),
            "both" => Ok(AutoscalerSelection::Both),
            other => Err(Error::Config(format!("unknown autoscaler `{other}`"))),
        }
    }
}

fn default_min_r() -> u32 {
    1
}

fn default_max_r() -> u32 {
    5
}

fn default_tmv() -> f64 {
    50.0
}

fn default_version() -> u32 {
    CONFIG_VERSION
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceEntry {
    pub name: String,
    pub cpu_request: u64,
    pub cpu_limit: u64,
    #[serde(default = "default_min_r")]
    pub min_r: u32,
    #[serde(default = "default_max_r")]
    pub max_r: u32,
    #[serde(default = "default_tmv")]
    pub tmv: f64,
    /// Defaults to `min_r`.
    #[serde(default)]
    pub initial_replicas: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Matrix {
    pub max_replicas: Vec<u32>,
    pub thresholds: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub autoscaler: AutoscalerSelection,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub noise: f64,
    #[serde(default)]
    pub load: LoadProfile,
    #[serde(default)]
    pub timing: Timing,
    #[serde(default)]
    pub flags: Flags,
    #[serde(default)]
    pub baseline: BaselineOptions,
    #[serde(default)]
    pub services: Option<Vec<ServiceEntry>>,
    #[serde(default)]
    pub demand: BTreeMap<String, ServiceDemand>,
    #[serde(default)]
    pub matrix: Option<Matrix>,
}

/// Requests and limits of the default 11-service application, in
/// millicores, with the synthetic demand coefficients used for it.
///
/// The coefficients are simulator calibration, not measurements: the
/// frontend and currency services saturate first during the ramp, the
/// catalogue/checkout/recommendation tier follows, and the rest stay light.
pub const DEFAULT_APP: [(&str, u64, u64, u64, f64); 11] = [
    ("frontend", 100, 200, 50, 1.0),
    ("cartservice", 200, 300, 30, 0.1),
    ("productcatalog", 100, 200, 30, 0.3),
    ("currency", 100, 200, 40, 1.0),
    ("payment", 100, 200, 20, 0.1),
    ("shipping", 100, 200, 20, 0.1),
    ("email", 100, 200, 20, 0.1),
    ("checkout", 100, 200, 30, 0.3),
    ("recommendation", 100, 200, 30, 0.3),
    ("adservice", 200, 300, 20, 0.1),
    ("redis", 70, 125, 20, 0.1),
];

pub fn default_demand(name: &str) -> Option<ServiceDemand> {
    DEFAULT_APP
        .iter()
        .find(|row| row.0 == name)
        .map(|&(_, _, _, base, per_user)| ServiceDemand { base, per_user })
}

fn default_services() -> Vec<ServiceEntry> {
    DEFAULT_APP
        .iter()
        .map(|&(name, req, limit, _, _)| ServiceEntry {
            name: name.to_string(),
            cpu_request: req,
            cpu_limit: limit,
            min_r: default_min_r(),
            max_r: default_max_r(),
            tmv: default_tmv(),
            initial_replicas: None,
        })
        .collect()
}

/// `<maxR>R-<threshold>%`, e.g. `5R-50%`.
pub fn scenario_id(max_r: u32, tmv: f64) -> String {
    if tmv.fract() == 0.0 {
        format!("{max_r}R-{}%", tmv as i64)
    } else {
        format!("{max_r}R-{tmv}%")
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            version: CONFIG_VERSION,
            name: None,
            autoscaler: AutoscalerSelection::Both,
            seed: 0,
            noise: 0.0,
            load: LoadProfile::default(),
            timing: Timing::default(),
            flags: Flags::default(),
            baseline: BaselineOptions::default(),
            services: None,
            demand: BTreeMap::new(),
            matrix: None,
        }
    }
}

impl ExperimentConfig {
    /// The nine-scenario matrix (2/5/10 replicas x 20/50/80 percent) over
    /// the default application.
    pub fn default_matrix() -> Self {
        ExperimentConfig {
            matrix: Some(Matrix {
                max_replicas: vec![2, 5, 10],
                thresholds: vec![20.0, 50.0, 80.0],
            }),
            ..Default::default()
        }
    }

    /// Default application with every service at `max_r` / `tmv`.
    pub fn single(max_r: u32, tmv: f64) -> Self {
        ExperimentConfig {
            matrix: Some(Matrix {
                max_replicas: vec![max_r],
                thresholds: vec![tmv],
            }),
            ..Default::default()
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.scenarios()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Config(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Expands the configuration into validated scenarios.
    pub fn scenarios(&self) -> Result<Vec<Scenario>> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        let entries = self.services.clone().unwrap_or_else(default_services);
        for name in self.demand.keys() {
            if !entries.iter().any(|e| &e.name == name) {
                return Err(Error::Config(format!("demand given for unknown service `{name}`")));
            }
        }

        let variants: Vec<(String, Option<(u32, f64)>)> = match &self.matrix {
            Some(m) => {
                if m.max_replicas.is_empty() || m.thresholds.is_empty() {
                    return Err(Error::Config("matrix needs at least one max_replicas and threshold".into()));
                }
                m.max_replicas
                    .iter()
                    .flat_map(|&r| m.thresholds.iter().map(move |&p| (scenario_id(r, p), Some((r, p)))))
                    .collect()
            }
            None => {
                let id = self.name.clone().unwrap_or_else(|| {
                    let first = &entries[..1.min(entries.len())];
                    match first {
                        [e] if entries.iter().all(|x| x.max_r == e.max_r && x.tmv == e.tmv) => {
                            scenario_id(e.max_r, e.tmv)
                        }
                        _ => "custom".to_string(),
                    }
                });
                vec![(id, None)]
            }
        };

        let mut out = Vec::with_capacity(variants.len());
        for (id, overrides) in variants {
            let services = entries
                .iter()
                .map(|e| self.service_config(e, overrides))
                .collect::<Result<Vec<_>>>()?;
            let scenario = Scenario {
                id,
                services,
                load: self.load,
                timing: self.timing,
                flags: self.flags,
                baseline: self.baseline,
                noise: self.noise,
            };
            scenario.validate()?;
            out.push(scenario);
        }
        let mut ids: Vec<_> = out.iter().map(|s| s.id.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("matrix produces duplicate scenario ids".into()));
        }
        Ok(out)
    }

    fn service_config(&self, e: &ServiceEntry, overrides: Option<(u32, f64)>) -> Result<ServiceConfig> {
        let (max_r, tmv) = overrides.unwrap_or((e.max_r, e.tmv));
        let spec = MicroserviceSpec::new(e.name.clone(), MilliCpu::new(e.cpu_request), MilliCpu::new(e.cpu_limit))?;
        let sla = SlaMetrics { tmv, min_r: e.min_r, max_r };
        sla.validate(&e.name)?;
        let demand = self
            .demand
            .get(&e.name)
            .copied()
            .or_else(|| default_demand(&e.name))
            .ok_or_else(|| Error::Config(format!("no demand coefficients for `{}`", e.name)))?;
        Ok(ServiceConfig {
            spec,
            sla,
            initial_replicas: e.initial_replicas.unwrap_or(e.min_r),
            demand,
        })
    }
}
