//! Deterministic discrete-time model of a microservice application under a
//! load test, and the reconcile loop that drives an autoscaler against it.
//!
//! Each one-second tick:
//!
//! 1. replicas whose start-up finished are promoted;
//! 2. users, per-service CPU load and utilization are derived;
//! 3. on reconcile ticks the autoscaler runs and its plans are executed;
//! 4. on sample ticks one [`ServiceSample`] per service is emitted.
//!
//! Desired replicas, decisions and capacity in a sample are the ones from
//! the most recent reconcile tick. Utilization and replica counts are the
//! instantaneous values at the end of the tick.

mod cluster;
mod demand;
mod load;

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use cluster::{apply_plans, ClusterState, ExecutorOptions, ServiceState};
pub use demand::{service_demand, utilization, DemandModel, ServiceDemand};
pub use load::{users_at, LoadProfile};

use crate::arm::ArmOptions;
use crate::autoscaler::{Autoscaler, AutoscalerKind, BaselineHpa, Observation, SmartAutoscaler};
use crate::baseline::BaselineOptions;
use crate::domain::{MicroserviceSpec, MilliCpu, PodMetrics, ScaleAction, SlaMetrics};
use crate::error::{Error, Result};
use crate::kb::{KbPayload, NullRecorder, Recorder};

/// One service in one sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ServiceSample {
    pub name: String,
    /// Utilization, percent of request.
    pub cmv: f64,
    pub tmv: f64,
    pub cr: u32,
    pub dr: u32,
    pub max_r: u32,
    pub sd: ScaleAction,
    pub res_sd: ScaleAction,
    pub res_dr: u32,
    /// CPU the simulated workload actually asks for.
    pub load: MilliCpu,
    /// `cr * request`.
    pub supply: MilliCpu,
    /// `dr * request`.
    pub demand: MilliCpu,
    /// `max_r * request`.
    pub capacity: MilliCpu,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSnapshot {
    pub time: u64,
    pub services: Vec<ServiceSample>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ServiceConfig {
    pub spec: MicroserviceSpec,
    pub sla: SlaMetrics,
    pub initial_replicas: u32,
    pub demand: ServiceDemand,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Timing {
    /// Seconds between autoscaler evaluations.
    pub reconcile_period: u64,
    /// Seconds between emitted samples.
    pub sample_period: u64,
    /// Ticks before a new replica is ready.
    pub startup_delay: u64,
    /// Moving-average window over utilization seen by the autoscaler, in
    /// ticks. 0 or 1 means instantaneous.
    pub metrics_window: u64,
}

impl Default for Timing {
    fn default() -> Self {
        Timing {
            reconcile_period: 15,
            sample_period: 1,
            startup_delay: 0,
            metrics_window: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Flags {
    pub strict_conservation: bool,
    pub apply_res_dr_on_noscale: bool,
    pub reset_max_r_each_tick: bool,
}

/// A fully validated experiment definition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub services: Vec<ServiceConfig>,
    pub load: LoadProfile,
    pub timing: Timing,
    pub flags: Flags,
    pub baseline: BaselineOptions,
    /// Relative amplitude of seeded uniform jitter on every service's load.
    pub noise: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.load.validate()?;
        if self.services.is_empty() {
            return Err(Error::Config("scenario has no services".into()));
        }
        if self.timing.reconcile_period == 0 || self.timing.sample_period == 0 {
            return Err(Error::Config("reconcile_period and sample_period must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.noise) {
            return Err(Error::Config("noise must be in [0, 1)".into()));
        }
        let mut names = std::collections::BTreeSet::new();
        for svc in &self.services {
            svc.spec.validate()?;
            svc.sla.validate(&svc.spec.name)?;
            if !names.insert(svc.spec.name.as_str()) {
                return Err(Error::DuplicateService(svc.spec.name.clone()));
            }
            if svc.initial_replicas < 1 || svc.initial_replicas > svc.sla.min_r {
                return Err(Error::Config(format!(
                    "{}: initial_replicas must be in [1, min_r]",
                    svc.spec.name
                )));
            }
            if !svc.demand.per_user.is_finite() || svc.demand.per_user < 0.0 {
                return Err(Error::Config(format!("{}: per_user demand must be non-negative", svc.spec.name)));
            }
        }
        Ok(())
    }

    pub fn specs(&self) -> impl Iterator<Item = MicroserviceSpec> + '_ {
        self.services.iter().map(|s| s.spec.clone())
    }

    pub fn demand_model(&self) -> DemandModel {
        DemandModel {
            services: self
                .services
                .iter()
                .map(|s| (s.spec.name.clone(), s.demand))
                .collect(),
        }
    }

    pub fn total_minutes(&self) -> f64 {
        self.load.total_duration as f64 / 60.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub scenario: String,
    pub autoscaler: AutoscalerKind,
    pub sample_period: u64,
    pub snapshots: Vec<ClusterSnapshot>,
    pub arm_invocations: u64,
}

/// Runs a scenario without recording to a knowledge base.
pub fn simulate(scenario: &Scenario, kind: AutoscalerKind, seed: u64) -> Result<RunOutcome> {
    run_scenario(scenario, kind, seed, &NullRecorder)
}

pub fn run_scenario(scenario: &Scenario, kind: AutoscalerKind, seed: u64, recorder: &dyn Recorder) -> Result<RunOutcome> {
    scenario.validate()?;
    match kind {
        AutoscalerKind::Smart => {
            let mut smart = SmartAutoscaler::new(
                scenario.specs(),
                ArmOptions {
                    strict_conservation: scenario.flags.strict_conservation,
                },
            );
            let snapshots = drive(scenario, &mut smart, seed, recorder)?;
            Ok(RunOutcome {
                scenario: scenario.id.clone(),
                autoscaler: kind,
                sample_period: scenario.timing.sample_period,
                snapshots,
                arm_invocations: smart.arm_invocations(),
            })
        }
        AutoscalerKind::Baseline => {
            let mut hpa = BaselineHpa::new(scenario.baseline);
            let snapshots = drive(scenario, &mut hpa, seed, recorder)?;
            Ok(RunOutcome {
                scenario: scenario.id.clone(),
                autoscaler: kind,
                sample_period: scenario.timing.sample_period,
                snapshots,
                arm_invocations: 0,
            })
        }
    }
}

#[derive(Clone, Copy)]
struct LastDecision {
    dr: u32,
    sd: ScaleAction,
    res_sd: ScaleAction,
    res_dr: u32,
}

/// The reconcile loop, generic over the autoscaler.
pub fn drive(
    scenario: &Scenario,
    autoscaler: &mut dyn Autoscaler,
    seed: u64,
    recorder: &dyn Recorder,
) -> Result<Vec<ClusterSnapshot>> {
    let timing = scenario.timing;
    let executor = ExecutorOptions {
        startup_delay: timing.startup_delay,
        apply_res_dr_on_noscale: scenario.flags.apply_res_dr_on_noscale,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = ClusterState {
        time: 0,
        services: scenario
            .services
            .iter()
            .map(|s| ServiceState::new(s.spec.clone(), s.sla, s.initial_replicas))
            .collect(),
    };
    let n = state.services.len();
    let window = timing.metrics_window.max(1) as usize;
    let mut history: Vec<VecDeque<f64>> = vec![VecDeque::with_capacity(window); n];
    let mut last: Vec<LastDecision> = state
        .services
        .iter()
        .map(|s| LastDecision {
            dr: s.cr,
            sd: ScaleAction::NoScale,
            res_sd: ScaleAction::NoScale,
            res_dr: s.cr,
        })
        .collect();
    let mut snapshots = Vec::with_capacity((scenario.load.total_duration / timing.sample_period) as usize + 1);
    let mut loads = vec![MilliCpu::ZERO; n];

    for t in 0..scenario.load.total_duration {
        state.time = t;
        state.promote_ready(t);
        let users = users_at(&scenario.load, t)?;

        for (i, cfg) in scenario.services.iter().enumerate() {
            let mut load = cfg.demand.at(users);
            if scenario.noise > 0.0 {
                let jitter: f64 = rng.gen_range(-1.0..=1.0);
                load = MilliCpu::new((load.get() as f64 * (1.0 + scenario.noise * jitter)).round() as u64);
            }
            loads[i] = load;
            let svc = &state.services[i];
            let h = &mut history[i];
            if h.len() == window {
                h.pop_front();
            }
            h.push_back(utilization(load, svc.cr, &svc.spec));
        }

        if t % timing.reconcile_period == 0 {
            recorder.set_tick(t);
            if scenario.flags.reset_max_r_each_tick {
                state.reset_capacities();
            }
            let observations: Vec<Observation<'_>> = state
                .services
                .iter()
                .zip(&history)
                .map(|(svc, h)| Observation {
                    spec: &svc.spec,
                    pod: PodMetrics {
                        cmv: h.iter().sum::<f64>() / h.len() as f64,
                        cr: svc.cr,
                    },
                    sla: svc.sla,
                })
                .collect();
            let decisions = autoscaler.reconcile(t, &observations, recorder)?;
            drop(observations);
            let plans: Vec<_> = decisions.iter().map(|d| d.plan.clone()).collect();
            apply_plans(&mut state, &plans, t, executor)?;
            for (slot, d) in last.iter_mut().zip(&decisions) {
                *slot = LastDecision {
                    dr: d.dr,
                    sd: d.sd,
                    res_sd: d.plan.res_sd,
                    res_dr: d.plan.res_dr,
                };
            }
        }

        if t % timing.sample_period == 0 {
            recorder.set_tick(t);
            let services: Vec<ServiceSample> = state
                .services
                .iter()
                .zip(&last)
                .zip(&loads)
                .map(|((svc, d), &load)| {
                    let req = svc.spec.cpu_request;
                    ServiceSample {
                        name: svc.spec.name.clone(),
                        cmv: utilization(load, svc.cr, &svc.spec),
                        tmv: svc.sla.tmv,
                        cr: svc.cr,
                        dr: d.dr,
                        max_r: svc.sla.max_r,
                        sd: d.sd,
                        res_sd: d.res_sd,
                        res_dr: d.res_dr,
                        load,
                        supply: req * svc.cr,
                        demand: req * d.dr,
                        capacity: req * svc.sla.max_r,
                    }
                })
                .collect();
            for s in &services {
                recorder.record(KbPayload::Snapshot(s.clone()))?;
            }
            snapshots.push(ClusterSnapshot { time: t, services });
        }
    }
    Ok(snapshots)
}
