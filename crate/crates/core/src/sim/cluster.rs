use serde::{Deserialize, Serialize};

use crate::domain::{MicroserviceSpec, ResourcePlan, ScaleAction, SlaMetrics};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutorOptions {
    /// Ticks before a newly scheduled replica becomes ready.
    pub startup_delay: u64,
    /// Move replicas to `res_dr` even when the decision is `NoScale`.
    pub apply_res_dr_on_noscale: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ServiceState {
    pub spec: MicroserviceSpec,
    /// `max_r` here may have been rewritten by the resource manager.
    pub sla: SlaMetrics,
    pub configured_max_r: u32,
    pub cr: u32,
    /// Ready-at tick of each replica that is starting up.
    pub pending: Vec<u64>,
}

impl ServiceState {
    pub fn new(spec: MicroserviceSpec, sla: SlaMetrics, initial_replicas: u32) -> Self {
        ServiceState {
            configured_max_r: sla.max_r,
            spec,
            sla,
            cr: initial_replicas,
            pending: Vec::new(),
        }
    }

    fn scale_to(&mut self, target: u32, now: u64, startup_delay: u64) {
        let scheduled = self.cr + self.pending.len() as u32;
        if target > scheduled {
            let ready_at = now + startup_delay;
            self.pending.extend(std::iter::repeat_n(ready_at, (target - scheduled) as usize));
        } else if target < self.cr {
            self.cr = target;
            self.pending.clear();
        } else if target < scheduled {
            self.pending.truncate((target - self.cr) as usize);
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClusterState {
    pub time: u64,
    pub services: Vec<ServiceState>,
}

impl ClusterState {
    pub fn service_mut(&mut self, name: &str) -> Option<&mut ServiceState> {
        self.services.iter_mut().find(|s| s.spec.name == name)
    }

    /// Moves replicas whose start-up has completed by `now` into `cr`.
    pub fn promote_ready(&mut self, now: u64) {
        for svc in &mut self.services {
            let before = svc.pending.len();
            svc.pending.retain(|&ready_at| ready_at > now);
            svc.cr += (before - svc.pending.len()) as u32;
        }
    }

    pub fn reset_capacities(&mut self) {
        for svc in &mut self.services {
            svc.sla.max_r = svc.configured_max_r;
        }
    }
}

/// Executes plans at tick `now`. Scale-ups go through the start-up queue and
/// become visible on a later tick; scale-downs take effect immediately.
pub fn apply_plans(state: &mut ClusterState, plans: &[ResourcePlan], now: u64, options: ExecutorOptions) -> Result<()> {
    for plan in plans {
        let svc = state
            .service_mut(&plan.name)
            .ok_or_else(|| Error::UnknownService(plan.name.clone()))?;
        svc.sla.max_r = plan.updated_max_r;
        match plan.res_sd {
            ScaleAction::ScaleUp if plan.res_dr > svc.cr => svc.scale_to(plan.res_dr, now, options.startup_delay),
            ScaleAction::ScaleDown if plan.res_dr < svc.cr => svc.scale_to(plan.res_dr, now, options.startup_delay),
            ScaleAction::NoScale if options.apply_res_dr_on_noscale => {
                svc.scale_to(plan.res_dr, now, options.startup_delay)
            }
            _ => {}
        }
    }
    Ok(())
}
