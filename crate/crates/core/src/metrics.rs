//! Evaluation metrics over a snapshot series.
//!
//! Per service and sample, demand is `dr * request` and capacity is
//! `max_r * request`. MilliCPU metrics are time averages of per-sample sums
//! over services; time metrics count samples where the condition holds for
//! at least one service, converted to minutes. CPU overutilization is the
//! mean utilization over the (sample, service) pairs above their threshold.

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sim::{ClusterSnapshot, ServiceSample};

fn round2<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64((x * 100.0).round() / 100.0)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ServiceReport {
    pub name: String,
    pub tmv: f64,
    #[serde(serialize_with = "round2")]
    pub supply_cpu: f64,
    #[serde(serialize_with = "round2")]
    pub cpu_overutilization: f64,
    #[serde(serialize_with = "round2")]
    pub overutilization_time: f64,
    #[serde(serialize_with = "round2")]
    pub cpu_overprovision: f64,
    #[serde(serialize_with = "round2")]
    pub overprovision_time: f64,
    #[serde(serialize_with = "round2")]
    pub cpu_underprovision: f64,
    #[serde(serialize_with = "round2")]
    pub underprovision_time: f64,
}

/// The seven headline metrics for one run, plus per-service breakdowns.
/// MilliCPU values are in millicores and times in minutes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub autoscaler: String,
    #[serde(serialize_with = "round2")]
    pub duration_minutes: f64,
    #[serde(serialize_with = "round2")]
    pub supply_cpu: f64,
    #[serde(serialize_with = "round2")]
    pub cpu_overutilization: f64,
    #[serde(serialize_with = "round2")]
    pub overutilization_time: f64,
    #[serde(serialize_with = "round2")]
    pub cpu_overprovision: f64,
    #[serde(serialize_with = "round2")]
    pub overprovision_time: f64,
    #[serde(serialize_with = "round2")]
    pub cpu_underprovision: f64,
    #[serde(serialize_with = "round2")]
    pub underprovision_time: f64,
    pub arm_activations: u64,
    pub services: Vec<ServiceReport>,
}

/// Names, units and preferred direction of the headline metrics.
pub const HEADLINE_METRICS: [(&str, &str, bool); 7] = [
    ("supply_cpu", "milliCPU", true),
    ("cpu_overutilization", "percent", false),
    ("overutilization_time", "minutes", false),
    ("cpu_overprovision", "milliCPU", false),
    ("overprovision_time", "minutes", true),
    ("cpu_underprovision", "milliCPU", false),
    ("underprovision_time", "minutes", false),
];

impl ScenarioReport {
    pub fn labeled(mut self, scenario: impl Into<String>, autoscaler: impl Into<String>) -> Self {
        self.scenario = scenario.into();
        self.autoscaler = autoscaler.into();
        self
    }

    /// Looks up a headline metric by its [`HEADLINE_METRICS`] name.
    pub fn metric(&self, name: &str) -> Option<f64> {
        Some(match name {
            "supply_cpu" => self.supply_cpu,
            "cpu_overutilization" => self.cpu_overutilization,
            "overutilization_time" => self.overutilization_time,
            "cpu_overprovision" => self.cpu_overprovision,
            "overprovision_time" => self.overprovision_time,
            "cpu_underprovision" => self.cpu_underprovision,
            "underprovision_time" => self.underprovision_time,
            _ => return None,
        })
    }
}

#[derive(Default)]
struct Acc {
    supply: f64,
    over: f64,
    under: f64,
    under_samples: u64,
    util_sum: f64,
    util_samples: u64,
}

fn under(s: &ServiceSample) -> f64 {
    s.demand.get().saturating_sub(s.capacity.get()) as f64
}

fn over(s: &ServiceSample) -> f64 {
    s.capacity.get().saturating_sub(s.demand.get()) as f64
}

fn overutilized(s: &ServiceSample) -> bool {
    s.cmv > s.tmv
}

pub fn compute_report(snapshots: &[ClusterSnapshot], sample_period: u64) -> Result<ScenarioReport> {
    if snapshots.is_empty() {
        return Err(Error::EmptySeries);
    }
    if sample_period == 0 {
        return Err(Error::Config("sample_period must be positive".into()));
    }
    for pair in snapshots.windows(2) {
        if pair[1].time != pair[0].time + sample_period {
            return Err(Error::NonUniformSampling(pair[1].time));
        }
    }

    let n = snapshots.len() as f64;
    let minutes_per_sample = sample_period as f64 / 60.0;

    let mut names: Vec<&str> = snapshots[0].services.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    let mut per_service: Vec<Acc> = names.iter().map(|_| Acc::default()).collect();
    let mut tmv = vec![0.0; names.len()];
    let slot = |name: &str| names.binary_search(&name).ok();

    let mut supply = 0.0;
    let mut over_total = 0.0;
    let mut under_total = 0.0;
    let mut under_samples = 0u64;
    let mut util_samples_any = 0u64;
    let mut util_sum = 0.0;
    let mut util_pairs = 0u64;

    for snap in snapshots {
        let mut ordered: Vec<&ServiceSample> = snap.services.iter().collect();
        ordered.sort_by(|a, b| a.name.cmp(&b.name));
        let mut any_under = false;
        let mut any_over_util = false;
        for s in ordered {
            supply += s.supply.get() as f64;
            over_total += over(s);
            under_total += under(s);
            if let Some(i) = slot(&s.name) {
                let acc = &mut per_service[i];
                tmv[i] = s.tmv;
                acc.supply += s.supply.get() as f64;
                acc.over += over(s);
                acc.under += under(s);
                if s.demand > s.capacity {
                    acc.under_samples += 1;
                }
                if overutilized(s) {
                    acc.util_sum += s.cmv;
                    acc.util_samples += 1;
                }
            }
            if s.demand > s.capacity {
                any_under = true;
            }
            if overutilized(s) {
                any_over_util = true;
                util_sum += s.cmv;
                util_pairs += 1;
            }
        }
        under_samples += u64::from(any_under);
        util_samples_any += u64::from(any_over_util);
    }

    let total = n * minutes_per_sample;
    let underprovision_time = under_samples as f64 * minutes_per_sample;
    let mean_util = |sum: f64, count: u64| if count == 0 { 0.0 } else { sum / count as f64 };

    let services = names
        .iter()
        .zip(&per_service)
        .zip(&tmv)
        .map(|((name, acc), &tmv)| {
            let under_time = acc.under_samples as f64 * minutes_per_sample;
            ServiceReport {
                name: name.to_string(),
                tmv,
                supply_cpu: acc.supply / n,
                cpu_overutilization: mean_util(acc.util_sum, acc.util_samples),
                overutilization_time: acc.util_samples as f64 * minutes_per_sample,
                cpu_overprovision: acc.over / n,
                overprovision_time: total - under_time,
                cpu_underprovision: acc.under / n,
                underprovision_time: under_time,
            }
        })
        .collect();

    Ok(ScenarioReport {
        scenario: String::new(),
        autoscaler: String::new(),
        duration_minutes: total,
        supply_cpu: supply / n,
        cpu_overutilization: mean_util(util_sum, util_pairs),
        overutilization_time: util_samples_any as f64 * minutes_per_sample,
        cpu_overprovision: over_total / n,
        overprovision_time: total - underprovision_time,
        cpu_underprovision: under_total / n,
        underprovision_time,
        arm_activations: 0,
        services,
    })
}
