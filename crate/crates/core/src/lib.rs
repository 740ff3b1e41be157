//! Hierarchical horizontal pod autoscaling with resource exchange between
//! microservices, and a deterministic laboratory to evaluate it.
//!
//! The autoscaler has two tiers. Every microservice has its own
//! [`manager`] that turns utilization into a desired replica count. The
//! [`analyzer`] checks whether every desired count fits the service's
//! replica capacity; if one does not, the centralized [`arm`] moves unused
//! capacity from over-provisioned services to under-provisioned ones before
//! anything is executed. [`baseline`] is the per-service clamped autoscaler
//! used for comparison.
//!
//! [`sim`] drives either autoscaler against a synthetic application under a
//! ramp-and-sustain load test, [`metrics`] condenses a run into the seven
//! evaluation metrics, and [`kb`] is the append-only event log both tiers
//! write into.

pub mod analyzer;
pub mod arm;
pub mod autoscaler;
pub mod baseline;
pub mod config;
pub mod domain;
pub mod error;
pub mod experiment;
pub mod kb;
pub mod manager;
pub mod metrics;
pub mod sim;

pub use autoscaler::{Autoscaler, AutoscalerKind};
pub use config::ExperimentConfig;
pub use domain::{milli, ManagerVerdict, MicroserviceSpec, MilliCpu, PodMetrics, ResourcePlan, ScaleAction, SlaMetrics};
pub use error::{Error, Result};
pub use metrics::{compute_report, ScenarioReport};
