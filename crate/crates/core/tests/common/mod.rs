#![allow(dead_code)]

//! Test-side reference for the resource balancer, plus a random instance
//! generator. Written against the pseudocode with integer arithmetic only
//! and no code shared with the library.

use std::collections::BTreeMap;

use hpalab::arm::SpecCatalog;
use hpalab::{ManagerVerdict, MicroserviceSpec, MilliCpu, ResourcePlan, ScaleAction};
use rand::Rng;

#[derive(Clone, Debug)]
pub struct Row {
    pub name: String,
    pub req: i64,
    pub dr: i64,
    pub max_r: i64,
    pub sd: ScaleAction,
}

#[derive(Debug, PartialEq)]
pub struct OracleResult {
    pub plans: Vec<ResourcePlan>,
    /// Pool after every balancer step, in visiting order.
    pub pools: Vec<(String, i64)>,
    pub initial_pool: i64,
    pub final_pool: i64,
}

pub fn oracle(rows: &[Row], strict: bool) -> OracleResult {
    let mut under: Vec<&Row> = Vec::new();
    let mut over: Vec<&Row> = Vec::new();
    for r in rows {
        if r.dr > r.max_r {
            under.push(r);
        } else {
            over.push(r);
        }
    }

    let mut pool = 0i64;
    for r in &over {
        pool += (r.max_r - r.dr) * r.req;
    }
    let initial_pool = pool;

    // descending required resource, then name
    under.sort_by(|a, b| {
        let ka = (a.dr - a.max_r) * a.req;
        let kb = (b.dr - b.max_r) * b.req;
        kb.cmp(&ka).then(a.name.cmp(&b.name))
    });
    over.sort_by(|a, b| {
        let ka = (a.max_r - a.dr) * a.req;
        let kb = (b.max_r - b.dr) * b.req;
        ka.cmp(&kb).then(a.name.cmp(&b.name))
    });

    let mut feasible: BTreeMap<&str, (i64, i64)> = BTreeMap::new();
    let mut pools = Vec::new();

    for r in under {
        let required = r.dr - r.max_r;
        let f;
        if pool >= required * r.req {
            f = r.dr;
        } else if pool >= r.req {
            f = pool / r.req + r.max_r;
        } else {
            f = r.max_r;
        }
        pool -= (f - r.max_r) * r.req;
        feasible.insert(&r.name, (f, f));
        pools.push((r.name.clone(), pool));
    }

    for r in over {
        let residual = r.max_r - r.dr;
        let u;
        if pool >= residual * r.req {
            u = r.max_r;
        } else if pool >= r.req {
            u = pool / r.req + r.dr;
        } else {
            u = r.dr;
        }
        if strict {
            pool -= (u - r.dr) * r.req;
        } else {
            pool -= (r.max_r - u) * r.req;
        }
        feasible.insert(&r.name, (r.dr, u));
        pools.push((r.name.clone(), pool));
    }

    let mut plans = Vec::new();
    for r in rows {
        let (f, u) = feasible[r.name.as_str()];
        let res_sd = if f == r.dr {
            r.sd
        } else if f > r.max_r && f < r.dr {
            ScaleAction::ScaleUp
        } else {
            ScaleAction::NoScale
        };
        plans.push(ResourcePlan {
            name: r.name.clone(),
            res_sd,
            res_dr: f as u32,
            updated_max_r: u as u32,
        });
    }

    OracleResult {
        plans,
        pools,
        initial_pool,
        final_pool: pool,
    }
}

pub const REQUESTS: [u64; 3] = [70, 100, 200];

/// Up to 12 services, requests from [`REQUESTS`], dr and max_r in 0..=20.
pub fn random_instance(rng: &mut impl Rng) -> Vec<Row> {
    let n = rng.gen_range(1..=12);
    (0..n)
        .map(|i| {
            let sd = match rng.gen_range(0..3) {
                0 => ScaleAction::ScaleUp,
                1 => ScaleAction::ScaleDown,
                _ => ScaleAction::NoScale,
            };
            Row {
                name: format!("svc{i:02}"),
                req: REQUESTS[rng.gen_range(0..REQUESTS.len())] as i64,
                dr: rng.gen_range(0..=20),
                max_r: rng.gen_range(0..=20),
                sd,
            }
        })
        .collect()
}

pub fn verdicts(rows: &[Row]) -> Vec<ManagerVerdict> {
    rows.iter()
        .map(|r| ManagerVerdict {
            name: r.name.clone(),
            dr: r.dr as u32,
            sd: r.sd,
            max_r: r.max_r as u32,
        })
        .collect()
}

pub fn catalog(rows: &[Row]) -> SpecCatalog {
    rows.iter()
        .map(|r| {
            let req = MilliCpu::new(r.req as u64);
            let spec = MicroserviceSpec::new(r.name.as_str(), req, req * 2).unwrap();
            (r.name.clone(), spec)
        })
        .collect()
}

#[derive(serde::Deserialize)]
pub struct GoldenService {
    pub name: String,
    pub cpu_request: i64,
    pub dr: i64,
    pub max_r: i64,
    pub sd: ScaleAction,
}

#[derive(serde::Deserialize)]
pub struct Golden {
    pub strict_conservation: bool,
    pub services: Vec<GoldenService>,
    pub expected: serde_json::Value,
}

pub fn golden_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn load_golden(name: &str) -> Golden {
    let text = std::fs::read_to_string(golden_path(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

impl Golden {
    pub fn rows(&self) -> Vec<Row> {
        self.services
            .iter()
            .map(|s| Row {
                name: s.name.clone(),
                req: s.cpu_request,
                dr: s.dr,
                max_r: s.max_r,
                sd: s.sd,
            })
            .collect()
    }
}

/// Runs the library balancer on a golden input and renders the result in
/// the golden file's `expected` layout.
pub fn render_actual(golden: &Golden) -> serde_json::Value {
    use hpalab::arm::{self, ArmOptions};
    use hpalab::kb::NullRecorder;

    let rows = golden.rows();
    let options = ArmOptions {
        strict_conservation: golden.strict_conservation,
    };
    let out = arm::run(&verdicts(&rows), &catalog(&rows), options, &NullRecorder).unwrap();
    let steps: Vec<_> = out
        .state
        .trace
        .iter()
        .map(|t| {
            serde_json::json!({
                "name": t.name,
                "kind": t.kind,
                "feasible_r": t.feasible_r,
                "u_max_r": t.u_max_r,
                "pool_after": t.pool_after,
            })
        })
        .collect();
    let before: i64 = rows.iter().map(|r| r.max_r * r.req).sum();
    let after: i64 = rows
        .iter()
        .zip(&out.plans)
        .map(|(r, p)| i64::from(p.updated_max_r) * r.req)
        .sum();
    serde_json::json!({
        "initial_pool": out.state.initial_pool,
        "steps": steps,
        "final_pool": out.state.pool,
        "plans": out.plans,
        "capacity_before": before,
        "capacity_after": after,
    })
}
