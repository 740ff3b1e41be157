//! Synthetic CPU demand model standing in for a real application.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{MicroserviceSpec, MilliCpu};
use crate::error::{Error, Result};

/// Affine per-service demand: `base + per_user * users` millicores.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceDemand {
    pub base: u64,
    pub per_user: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DemandModel {
    pub services: BTreeMap<String, ServiceDemand>,
}

impl DemandModel {
    pub fn validate(&self) -> Result<()> {
        for (name, d) in &self.services {
            if !d.per_user.is_finite() || d.per_user < 0.0 {
                return Err(Error::Config(format!("demand.{name}.per_user must be non-negative")));
            }
        }
        Ok(())
    }

    pub fn get(&self, service: &str) -> Option<&ServiceDemand> {
        self.services.get(service)
    }
}

pub fn service_demand(model: &DemandModel, service: &str, users: u32) -> Result<MilliCpu> {
    let d = model
        .get(service)
        .ok_or_else(|| Error::MissingSpec(service.to_string()))?;
    Ok(d.at(users))
}

impl ServiceDemand {
    pub fn at(&self, users: u32) -> MilliCpu {
        let m = self.base as f64 + self.per_user * f64::from(users);
        MilliCpu::new(m.round() as u64)
    }
}

/// Per-replica CPU utilization, percent of request. Usage per replica is
/// capped at the CPU limit.
pub fn utilization(demand: MilliCpu, cr: u32, spec: &MicroserviceSpec) -> f64 {
    if cr == 0 {
        if demand.get() > 0 {
            log::warn!("{}: {} of demand with zero replicas", spec.name, demand);
        }
        return 0.0;
    }
    let per_replica = (demand.get() as f64 / f64::from(cr)).min(spec.cpu_limit.get() as f64);
    100.0 * per_replica / spec.cpu_request.get() as f64
}
