//! Centralized adaptive resource manager.
//!
//! Runs only when the capacity analyzer finds a service whose desired
//! replicas exceed its capacity. Three stages:
//!
//! 1. [`inspect`] splits services into under-provisioned (desired above
//!    capacity) and over-provisioned (everything else, including services
//!    sitting exactly at capacity with zero residual).
//! 2. [`balance`] pools the residual CPU of the over-provisioned services,
//!    grants it to the under-provisioned ones largest shortfall first, then
//!    walks the over-provisioned services smallest residual first and
//!    shrinks their capacity against what is left in the pool.
//! 3. [`adapt`] turns the balancer output into resource-wise plans.
//!
//! The over-provisioned pass debits the pool by the capacity *stripped* from
//! each service. A service that keeps its residual does not debit the pool,
//! so total capacity can grow and the pool can go negative. Setting
//! [`ArmOptions::strict_conservation`] debits the *retained* residual
//! instead.

use std::cmp::Reverse;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{ManagerVerdict, MicroserviceSpec, MilliCpu, ResourcePlan, ScaleAction};
use crate::error::{Error, Result};
use crate::kb::{KbPayload, Recorder};
use crate::manager::snap;

pub type SpecCatalog = BTreeMap<String, MicroserviceSpec>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProvisionKind {
    Under,
    Over,
}

/// One service as seen by the inspector. `delta_r` is the shortfall for
/// `Under` entries and the residual for `Over` entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvisionEntry {
    pub name: String,
    pub res_req: MilliCpu,
    pub dr: u32,
    pub max_r: u32,
    pub delta_r: u32,
    pub delta_res: MilliCpu,
    pub kind: ProvisionKind,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArmOptions {
    pub strict_conservation: bool,
}

/// Balancer result for one service.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feasibility {
    pub feasible_r: u32,
    pub u_max_r: u32,
}

/// Per-service balancer trace, in processing order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub name: String,
    pub kind: ProvisionKind,
    pub res_req: MilliCpu,
    pub dr: u32,
    pub max_r: u32,
    pub delta_r: u32,
    pub delta_res: MilliCpu,
    /// Pool expressed in replicas of this service when it was visited.
    pub total_r: f64,
    /// CPU moved by this service's capacity change.
    pub used_res: MilliCpu,
    /// Amount subtracted from the pool (equals `used_res` unless strict
    /// conservation is on).
    pub pool_debit: i64,
    pub feasible_r: u32,
    pub u_max_r: u32,
    pub pool_after: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BalancerState {
    pub initial_pool: i64,
    /// Lowest pool value observed during the under-provisioned pass.
    pub min_pool_under_pass: i64,
    pub pool: i64,
    pub trace: Vec<TraceRow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArmOutcome {
    pub plans: Vec<ResourcePlan>,
    pub state: BalancerState,
    pub feasibility: BTreeMap<String, Feasibility>,
}

pub fn inspect(
    verdicts: &[ManagerVerdict],
    specs: &SpecCatalog,
) -> Result<(Vec<ProvisionEntry>, Vec<ProvisionEntry>)> {
    let mut under = Vec::new();
    let mut over = Vec::new();
    for v in verdicts {
        let spec = specs.get(&v.name).ok_or_else(|| Error::MissingSpec(v.name.clone()))?;
        let res_req = spec.cpu_request;
        if v.dr > v.max_r {
            let delta_r = v.dr - v.max_r;
            under.push(ProvisionEntry {
                name: v.name.clone(),
                res_req,
                dr: v.dr,
                max_r: v.max_r,
                delta_r,
                delta_res: res_req * delta_r,
                kind: ProvisionKind::Under,
            });
        } else {
            let delta_r = v.max_r - v.dr;
            over.push(ProvisionEntry {
                name: v.name.clone(),
                res_req,
                dr: v.dr,
                max_r: v.max_r,
                delta_r,
                delta_res: res_req * delta_r,
                kind: ProvisionKind::Over,
            });
        }
    }
    Ok((under, over))
}

pub fn balance(
    under: &[ProvisionEntry],
    over: &[ProvisionEntry],
    options: ArmOptions,
) -> (BalancerState, BTreeMap<String, Feasibility>) {
    let mut pool: i64 = over.iter().map(|e| e.delta_res.as_i64()).sum();
    let mut state = BalancerState {
        initial_pool: pool,
        min_pool_under_pass: pool,
        ..Default::default()
    };
    let mut out = BTreeMap::new();

    let mut under: Vec<&ProvisionEntry> = under.iter().collect();
    under.sort_by(|a, b| (Reverse(a.delta_res), &a.name).cmp(&(Reverse(b.delta_res), &b.name)));
    for e in under {
        let req = e.res_req.as_i64();
        let total_r = snap(pool as f64 / req as f64);
        let feasible_r = if total_r >= f64::from(e.delta_r) {
            e.dr
        } else if total_r >= 1.0 {
            total_r.floor() as u32 + e.max_r
        } else {
            e.max_r
        };
        let used = i64::from(feasible_r - e.max_r) * req;
        pool -= used;
        state.min_pool_under_pass = state.min_pool_under_pass.min(pool);
        out.insert(
            e.name.clone(),
            Feasibility {
                feasible_r,
                u_max_r: feasible_r,
            },
        );
        state.trace.push(trace_row(e, total_r, used, used, feasible_r, feasible_r, pool));
    }

    let mut over: Vec<&ProvisionEntry> = over.iter().collect();
    over.sort_by(|a, b| (a.delta_res, &a.name).cmp(&(b.delta_res, &b.name)));
    for e in over {
        let req = e.res_req.as_i64();
        let total_r = snap(pool as f64 / req as f64);
        let u_max_r = if total_r >= f64::from(e.delta_r) {
            e.max_r
        } else if total_r >= 1.0 {
            total_r.floor() as u32 + e.dr
        } else {
            e.dr
        };
        let stripped = i64::from(e.max_r - u_max_r) * req;
        let debit = if options.strict_conservation {
            i64::from(u_max_r - e.dr) * req
        } else {
            stripped
        };
        pool -= debit;
        out.insert(
            e.name.clone(),
            Feasibility {
                feasible_r: e.dr,
                u_max_r,
            },
        );
        state.trace.push(trace_row(e, total_r, stripped, debit, e.dr, u_max_r, pool));
    }

    state.pool = pool;
    (state, out)
}

fn trace_row(
    e: &ProvisionEntry,
    total_r: f64,
    used: i64,
    debit: i64,
    feasible_r: u32,
    u_max_r: u32,
    pool_after: i64,
) -> TraceRow {
    TraceRow {
        name: e.name.clone(),
        kind: e.kind,
        res_req: e.res_req,
        dr: e.dr,
        max_r: e.max_r,
        delta_r: e.delta_r,
        delta_res: e.delta_res,
        total_r,
        used_res: MilliCpu::new(used.unsigned_abs()),
        pool_debit: debit,
        feasible_r,
        u_max_r,
        pool_after,
    }
}

/// Resource-wise scaling decisions. Plans come out in verdict order.
pub fn adapt(
    verdicts: &[ManagerVerdict],
    feasibility: &BTreeMap<String, Feasibility>,
    recorder: &dyn Recorder,
) -> Result<Vec<ResourcePlan>> {
    let mut plans = Vec::with_capacity(verdicts.len());
    for v in verdicts {
        let f = feasibility
            .get(&v.name)
            .ok_or_else(|| Error::MissingFeasibility(v.name.clone()))?;
        let res_sd = if f.feasible_r == v.dr {
            v.sd
        } else if f.feasible_r > v.max_r && f.feasible_r < v.dr {
            ScaleAction::ScaleUp
        } else {
            ScaleAction::NoScale
        };
        plans.push(ResourcePlan {
            name: v.name.clone(),
            res_sd,
            res_dr: f.feasible_r,
            updated_max_r: f.u_max_r,
        });
    }
    for plan in &plans {
        recorder.record(KbPayload::Plan(plan.clone()))?;
    }
    Ok(plans)
}

/// Inspect, balance and adapt in one pass.
pub fn run(
    verdicts: &[ManagerVerdict],
    specs: &SpecCatalog,
    options: ArmOptions,
    recorder: &dyn Recorder,
) -> Result<ArmOutcome> {
    let (under, over) = inspect(verdicts, specs)?;
    let (state, feasibility) = balance(&under, &over, options);
    for row in &state.trace {
        recorder.record(KbPayload::ArmTrace(row.clone()))?;
    }
    let plans = adapt(verdicts, &feasibility, recorder)?;
    Ok(ArmOutcome {
        plans,
        state,
        feasibility,
    })
}
