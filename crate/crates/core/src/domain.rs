//! Shared domain types: CPU quantities, microservice specs, observed metrics,
//! SLA bounds and the decisions that flow between the autoscaler tiers.

use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A CPU quantity in millicores.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MilliCpu(u64);

impl MilliCpu {
    pub const ZERO: MilliCpu = MilliCpu(0);

    pub const fn new(millicores: u64) -> Self {
        MilliCpu(millicores)
    }

    pub const fn get(self) -> u64 {
        self.0
    }

    /// Signed view used for pool bookkeeping, where balances may go negative.
    pub fn as_i64(self) -> i64 {
        self.0 as i64
    }
}

/// Builds a [`MilliCpu`] from a signed integer, rejecting negative values.
pub fn milli(value: i64) -> Result<MilliCpu> {
    u64::try_from(value)
        .map(MilliCpu)
        .map_err(|_| Error::NegativeQuantity(value))
}

impl fmt::Display for MilliCpu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}m", self.0)
    }
}

impl Add for MilliCpu {
    type Output = MilliCpu;

    fn add(self, rhs: MilliCpu) -> MilliCpu {
        MilliCpu(self.0 + rhs.0)
    }
}

impl Mul<u32> for MilliCpu {
    type Output = MilliCpu;

    fn mul(self, replicas: u32) -> MilliCpu {
        MilliCpu(self.0 * u64::from(replicas))
    }
}

impl std::iter::Sum for MilliCpu {
    fn sum<I: Iterator<Item = MilliCpu>>(iter: I) -> MilliCpu {
        MilliCpu(iter.map(|m| m.0).sum())
    }
}

/// Static identity and per-replica CPU sizing of one microservice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MicroserviceSpec {
    pub name: String,
    pub cpu_request: MilliCpu,
    pub cpu_limit: MilliCpu,
}

impl MicroserviceSpec {
    pub fn new(name: impl Into<String>, cpu_request: MilliCpu, cpu_limit: MilliCpu) -> Result<Self> {
        let spec = MicroserviceSpec {
            name: name.into(),
            cpu_request,
            cpu_limit,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidSpec {
            name: self.name.clone(),
            reason: reason.to_string(),
        };
        if self.name.is_empty() {
            return Err(invalid("empty name"));
        }
        if self.cpu_request.get() == 0 {
            return Err(invalid("cpu_request must be positive"));
        }
        if self.cpu_limit < self.cpu_request {
            return Err(invalid("cpu_limit below cpu_request"));
        }
        Ok(())
    }

    /// Highest utilization (percent of request) a replica can report.
    pub fn max_utilization(&self) -> f64 {
        100.0 * self.cpu_limit.get() as f64 / self.cpu_request.get() as f64
    }
}

/// Runtime observation of one microservice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PodMetrics {
    /// Current CPU utilization, percent of the per-replica request.
    pub cmv: f64,
    /// Current ready replica count.
    pub cr: u32,
}

/// Threshold and replica bounds for one microservice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlaMetrics {
    /// Target CPU utilization, percent of request.
    pub tmv: f64,
    pub min_r: u32,
    pub max_r: u32,
}

impl SlaMetrics {
    pub fn new(tmv: f64, min_r: u32, max_r: u32) -> Result<Self> {
        let sla = SlaMetrics { tmv, min_r, max_r };
        sla.validate("")?;
        Ok(sla)
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidSla {
            name: name.to_string(),
            reason: reason.to_string(),
        };
        if !(self.tmv > 0.0 && self.tmv <= 100.0) {
            return Err(invalid("tmv must be in (0, 100]"));
        }
        if self.min_r < 1 {
            return Err(invalid("min_r must be at least 1"));
        }
        if self.min_r > self.max_r {
            return Err(invalid("min_r exceeds max_r"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScaleAction {
    ScaleUp,
    ScaleDown,
    NoScale,
}

impl ScaleAction {
    pub fn as_str(self) -> &'static str {
        match self {
            ScaleAction::ScaleUp => "ScaleUp",
            ScaleAction::ScaleDown => "ScaleDown",
            ScaleAction::NoScale => "NoScale",
        }
    }
}

impl fmt::Display for ScaleAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What one microservice manager hands to the capacity analyzer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManagerVerdict {
    pub name: String,
    pub dr: u32,
    pub sd: ScaleAction,
    pub max_r: u32,
}

/// Final per-microservice decision handed to the executor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourcePlan {
    pub name: String,
    pub res_sd: ScaleAction,
    pub res_dr: u32,
    pub updated_max_r: u32,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn milli_constructs_non_negative() {
        assert_eq!(milli(100).unwrap(), MilliCpu::new(100));
        assert_eq!(milli(0).unwrap(), MilliCpu::ZERO);
        assert_eq!(milli(100).unwrap().to_string(), "100m");
    }

    #[test]
    fn milli_rejects_negative() {
        assert!(matches!(milli(-5), Err(Error::NegativeQuantity(-5))));
    }

    #[test]
    fn spec_invariants() {
        assert!(MicroserviceSpec::new("a", MilliCpu::new(100), MilliCpu::new(200)).is_ok());
        assert!(MicroserviceSpec::new("a", MilliCpu::new(0), MilliCpu::new(200)).is_err());
        assert!(MicroserviceSpec::new("a", MilliCpu::new(200), MilliCpu::new(100)).is_err());
        assert!(MicroserviceSpec::new("", MilliCpu::new(100), MilliCpu::new(100)).is_err());
    }

    #[test]
    fn sla_invariants() {
        assert!(SlaMetrics::new(50.0, 1, 5).is_ok());
        assert!(SlaMetrics::new(0.0, 1, 5).is_err());
        assert!(SlaMetrics::new(120.0, 1, 5).is_err());
        assert!(SlaMetrics::new(50.0, 0, 5).is_err());
        assert!(SlaMetrics::new(50.0, 6, 5).is_err());
    }

    #[test]
    fn scale_action_round_trips() {
        for action in [ScaleAction::ScaleUp, ScaleAction::ScaleDown, ScaleAction::NoScale] {
            let json = serde_json::to_string(&action).unwrap();
            assert_eq!(json, format!("\"{}\"", action.as_str()));
            assert_eq!(serde_json::from_str::<ScaleAction>(&json).unwrap(), action);
        }
    }
}
