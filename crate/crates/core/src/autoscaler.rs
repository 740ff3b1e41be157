//! The two autoscalers the simulator can drive, behind one trait.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analyzer::{analyze, FeasibilityOutcome};
use crate::arm::{self, ArmOptions, SpecCatalog};
use crate::baseline::{BaselineAutoscaler, BaselineOptions};
use crate::domain::{MicroserviceSpec, PodMetrics, ResourcePlan, ScaleAction, SlaMetrics};
use crate::error::{Error, Result};
use crate::kb::{KbPayload, Recorder};
use crate::manager::{manage, plan_scaling, ScalingPolicy, ThresholdPolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoscalerKind {
    Smart,
    Baseline,
}

impl AutoscalerKind {
    pub const ALL: [AutoscalerKind; 2] = [AutoscalerKind::Smart, AutoscalerKind::Baseline];

    pub fn as_str(self) -> &'static str {
        match self {
            AutoscalerKind::Smart => "smart",
            AutoscalerKind::Baseline => "baseline",
        }
    }
}

impl fmt::Display for AutoscalerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AutoscalerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smart" => Ok(AutoscalerKind::Smart),
            "baseline" => Ok(AutoscalerKind::Baseline),
            other => Err(Error::Config(format!("unknown autoscaler `{other}`"))),
        }
    }
}

/// What the autoscaler sees of one service on a reconcile tick.
#[derive(Clone, Debug)]
pub struct Observation<'a> {
    pub spec: &'a MicroserviceSpec,
    pub pod: PodMetrics,
    pub sla: SlaMetrics,
}

/// Outcome for one service: the raw desired replicas and decision, plus the
/// plan that is actually executed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub dr: u32,
    pub sd: ScaleAction,
    pub plan: ResourcePlan,
}

pub trait Autoscaler {
    fn kind(&self) -> AutoscalerKind;

    fn reconcile(&mut self, now: u64, observations: &[Observation<'_>], recorder: &dyn Recorder) -> Result<Vec<Decision>>;
}

/// Decentralized managers gated by the capacity analyzer, escalating to the
/// centralized resource manager when capacity is short.
pub struct SmartAutoscaler {
    policy: Box<dyn ScalingPolicy>,
    specs: SpecCatalog,
    options: ArmOptions,
    arm_invocations: u64,
}

impl SmartAutoscaler {
    pub fn new(specs: impl IntoIterator<Item = MicroserviceSpec>, options: ArmOptions) -> Self {
        Self::with_policy(specs, options, Box::new(ThresholdPolicy))
    }

    pub fn with_policy(
        specs: impl IntoIterator<Item = MicroserviceSpec>,
        options: ArmOptions,
        policy: Box<dyn ScalingPolicy>,
    ) -> Self {
        SmartAutoscaler {
            policy,
            specs: specs.into_iter().map(|s| (s.name.clone(), s)).collect(),
            options,
            arm_invocations: 0,
        }
    }

    pub fn arm_invocations(&self) -> u64 {
        self.arm_invocations
    }
}

impl Autoscaler for SmartAutoscaler {
    fn kind(&self) -> AutoscalerKind {
        AutoscalerKind::Smart
    }

    fn reconcile(&mut self, _now: u64, observations: &[Observation<'_>], recorder: &dyn Recorder) -> Result<Vec<Decision>> {
        let verdicts = observations
            .iter()
            .map(|o| manage(o.spec, &o.pod, &o.sla, self.policy.as_ref(), recorder))
            .collect::<Result<Vec<_>>>()?;

        let plans = match analyze(verdicts.clone())? {
            FeasibilityOutcome::AllFeasible(plans) => {
                for plan in &plans {
                    recorder.record(KbPayload::Plan(plan.clone()))?;
                }
                plans
            }
            FeasibilityOutcome::Infeasible(forwarded) => {
                self.arm_invocations += 1;
                arm::run(&forwarded, &self.specs, self.options, recorder)?.plans
            }
        };

        Ok(verdicts
            .into_iter()
            .zip(plans)
            .map(|(v, plan)| Decision {
                dr: v.dr,
                sd: v.sd,
                plan,
            })
            .collect())
    }
}

/// Independent per-service clamped threshold scaling.
pub struct BaselineHpa {
    inner: BaselineAutoscaler,
}

impl BaselineHpa {
    pub fn new(options: BaselineOptions) -> Self {
        BaselineHpa {
            inner: BaselineAutoscaler::new(options),
        }
    }
}

impl Autoscaler for BaselineHpa {
    fn kind(&self) -> AutoscalerKind {
        AutoscalerKind::Baseline
    }

    fn reconcile(&mut self, now: u64, observations: &[Observation<'_>], recorder: &dyn Recorder) -> Result<Vec<Decision>> {
        let mut out = Vec::with_capacity(observations.len());
        for o in observations {
            let (plan, dr) = self.inner.plan(now, &o.spec.name, &o.pod, &o.sla);
            recorder.record(KbPayload::Plan(plan.clone()))?;
            out.push(Decision {
                dr,
                sd: plan_scaling(o.pod.cr, dr, o.sla.min_r),
                plan,
            });
        }
        Ok(out)
    }
}
