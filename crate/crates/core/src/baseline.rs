//! Kubernetes-style comparison autoscaler: the same threshold formula as the
//! microservice managers, clamped to the SLA bounds, with no resource
//! exchange between services.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::domain::{PodMetrics, ResourcePlan, ScaleAction, SlaMetrics};
use crate::manager::threshold_desired_replicas;

/// Optional upstream-HPA behaviours. Both are off by default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineOptions {
    /// Skip scaling while `|cmv/tmv - 1|` is within this ratio.
    pub tolerance: f64,
    /// Scale-down stabilization window in seconds.
    pub downscale_stabilization: u64,
}

fn action_for(cr: u32, target: u32) -> ScaleAction {
    match target.cmp(&cr) {
        std::cmp::Ordering::Greater => ScaleAction::ScaleUp,
        std::cmp::Ordering::Less => ScaleAction::ScaleDown,
        std::cmp::Ordering::Equal => ScaleAction::NoScale,
    }
}

pub fn baseline_plan(name: &str, pod: &PodMetrics, sla: &SlaMetrics) -> ResourcePlan {
    let raw = threshold_desired_replicas(pod, sla);
    let res_dr = raw.clamp(sla.min_r, sla.max_r);
    ResourcePlan {
        name: name.to_string(),
        res_sd: action_for(pod.cr, res_dr),
        res_dr,
        updated_max_r: sla.max_r,
    }
}

/// Stateful wrapper applying the tolerance band and the scale-down
/// stabilization window on top of [`baseline_plan`].
#[derive(Debug, Default)]
pub struct BaselineAutoscaler {
    options: BaselineOptions,
    history: BTreeMap<String, VecDeque<(u64, u32)>>,
}

impl BaselineAutoscaler {
    pub fn new(options: BaselineOptions) -> Self {
        BaselineAutoscaler {
            options,
            history: BTreeMap::new(),
        }
    }

    /// Returns the plan and the raw (unclamped) desired replicas.
    pub fn plan(&mut self, now: u64, name: &str, pod: &PodMetrics, sla: &SlaMetrics) -> (ResourcePlan, u32) {
        let raw = threshold_desired_replicas(pod, sla);
        let mut plan = baseline_plan(name, pod, sla);

        if self.options.tolerance > 0.0 && pod.cr > 0 {
            let ratio = pod.cmv / sla.tmv;
            if (ratio - 1.0).abs() <= self.options.tolerance {
                plan.res_dr = pod.cr.clamp(sla.min_r, sla.max_r);
            }
        }

        if self.options.downscale_stabilization > 0 {
            let window = self.options.downscale_stabilization;
            let history = self.history.entry(name.to_string()).or_default();
            history.push_back((now, plan.res_dr));
            while let Some(&(t, _)) = history.front() {
                if t + window < now {
                    history.pop_front();
                } else {
                    break;
                }
            }
            let highest = history.iter().map(|&(_, r)| r).max().unwrap_or(plan.res_dr);
            if plan.res_dr < pod.cr {
                plan.res_dr = highest.min(pod.cr).max(plan.res_dr);
            }
        }

        plan.res_sd = action_for(pod.cr, plan.res_dr);
        (plan, raw)
    }
}
