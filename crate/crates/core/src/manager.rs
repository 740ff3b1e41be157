//! Decentralized per-microservice manager: computes a desired replica count
//! with a pluggable scaling policy, detects violations and emits a verdict.

use crate::domain::{ManagerVerdict, MicroserviceSpec, PodMetrics, ScaleAction, SlaMetrics};
use crate::error::Result;
use crate::kb::{KbPayload, Recorder, VerdictRecord};

/// Float residue below which a replica quotient is snapped to the nearest
/// integer before rounding.
pub const REPLICA_EPSILON: f64 = 1e-9;

/// Snaps `x` to the nearest integer when it is within [`REPLICA_EPSILON`].
pub(crate) fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < REPLICA_EPSILON {
        r
    } else {
        x
    }
}

/// Maps an observation to a desired replica count. Implementations must be
/// pure.
pub trait ScalingPolicy: Send + Sync {
    fn desired_replicas(&self, pod: &PodMetrics, sla: &SlaMetrics) -> u32;
}

/// Static threshold policy: `ceil(cr * cmv / tmv)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ThresholdPolicy;

impl ScalingPolicy for ThresholdPolicy {
    fn desired_replicas(&self, pod: &PodMetrics, sla: &SlaMetrics) -> u32 {
        threshold_desired_replicas(pod, sla)
    }
}

/// Desired replicas under the threshold policy. Not clamped to the SLA
/// bounds; the capacity analyzer needs to see raw demand.
pub fn threshold_desired_replicas(pod: &PodMetrics, sla: &SlaMetrics) -> u32 {
    debug_assert!(sla.tmv > 0.0);
    if pod.cr == 0 {
        return 0;
    }
    let raw = f64::from(pod.cr) * (pod.cmv / sla.tmv);
    snap(raw).ceil().max(0.0) as u32
}

pub fn plan_scaling(cr: u32, dr: u32, min_r: u32) -> ScaleAction {
    if dr > cr {
        ScaleAction::ScaleUp
    } else if dr < cr && dr >= min_r {
        ScaleAction::ScaleDown
    } else {
        ScaleAction::NoScale
    }
}

/// One manager evaluation: policy, violation check, knowledge-base record.
pub fn manage(
    spec: &MicroserviceSpec,
    pod: &PodMetrics,
    sla: &SlaMetrics,
    policy: &dyn ScalingPolicy,
    recorder: &dyn Recorder,
) -> Result<ManagerVerdict> {
    let dr = policy.desired_replicas(pod, sla);
    let sd = plan_scaling(pod.cr, dr, sla.min_r);
    recorder.record(KbPayload::Verdict(VerdictRecord {
        name: spec.name.clone(),
        dr,
        sd,
        cmv: pod.cmv,
        tmv: sla.tmv,
        cr: pod.cr,
        min_r: sla.min_r,
        max_r: sla.max_r,
    }))?;
    Ok(ManagerVerdict {
        name: spec.name.clone(),
        dr,
        sd,
        max_r: sla.max_r,
    })
}
