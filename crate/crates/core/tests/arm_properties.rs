mod common;

use std::collections::BTreeMap;

use common::{catalog, oracle, verdicts, Row, REQUESTS};
use hpalab::arm::{self, ArmOptions, ProvisionKind};
use hpalab::kb::NullRecorder;
use hpalab::ScaleAction;
use proptest::prelude::*;

fn row() -> impl Strategy<Value = (usize, i64, i64, u8)> {
    (0..REQUESTS.len(), 0i64..=20, 0i64..=20, 0u8..3)
}

fn rows() -> impl Strategy<Value = Vec<Row>> {
    proptest::collection::vec(row(), 1..=12).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (r, dr, max_r, sd))| Row {
                name: format!("s{i:02}"),
                req: REQUESTS[r] as i64,
                dr,
                max_r,
                sd: [ScaleAction::ScaleUp, ScaleAction::ScaleDown, ScaleAction::NoScale][sd as usize],
            })
            .collect()
    })
}

fn run(rows: &[Row], strict: bool) -> arm::ArmOutcome {
    let options = ArmOptions {
        strict_conservation: strict,
    };
    arm::run(&verdicts(rows), &catalog(rows), options, &NullRecorder).unwrap()
}

proptest! {
    #[test]
    fn matches_reference(rows in rows(), strict in any::<bool>()) {
        let out = run(&rows, strict);
        let expected = oracle(&rows, strict);
        prop_assert_eq!(&out.plans, &expected.plans);
        prop_assert_eq!(out.state.initial_pool, expected.initial_pool);
        prop_assert_eq!(out.state.pool, expected.final_pool);
        let pools: Vec<_> = out.state.trace.iter().map(|t| (t.name.clone(), t.pool_after)).collect();
        prop_assert_eq!(pools, expected.pools);
    }

    #[test]
    fn bounds_hold(rows in rows(), strict in any::<bool>()) {
        let out = run(&rows, strict);
        let mut granted = 0i64;
        for t in &out.state.trace {
            match t.kind {
                ProvisionKind::Under => {
                    prop_assert!(t.max_r <= t.u_max_r && t.u_max_r <= t.dr);
                    prop_assert_eq!(t.u_max_r, t.feasible_r);
                    granted += i64::from(t.u_max_r - t.max_r) * t.res_req.as_i64();
                    prop_assert!(t.pool_after >= 0);
                }
                ProvisionKind::Over => {
                    prop_assert!(t.dr <= t.u_max_r && t.u_max_r <= t.max_r);
                    prop_assert_eq!(t.feasible_r, t.dr);
                }
            }
        }
        prop_assert!(granted <= out.state.initial_pool);
        prop_assert!(out.state.min_pool_under_pass >= 0);
        for p in &out.plans {
            prop_assert!(p.res_dr <= p.updated_max_r);
        }
    }

    #[test]
    fn input_order_is_irrelevant(rows in rows(), strict in any::<bool>()) {
        let forward = run(&rows, strict);
        let mut reversed_rows = rows.clone();
        reversed_rows.reverse();
        let reversed = run(&reversed_rows, strict);
        let by_name = |o: &arm::ArmOutcome| o.plans.iter().map(|p| (p.name.clone(), p.clone())).collect::<BTreeMap<_, _>>();
        prop_assert_eq!(by_name(&forward), by_name(&reversed));
        prop_assert_eq!(forward.state.pool, reversed.state.pool);
    }

    #[test]
    fn no_demand_keeps_everything(rows in rows()) {
        let rows: Vec<Row> = rows.into_iter().map(|mut r| { r.dr = r.dr.min(r.max_r); r }).collect();
        let out = run(&rows, false);
        for (r, p) in rows.iter().zip(&out.plans) {
            prop_assert_eq!(i64::from(p.updated_max_r), r.max_r);
            prop_assert_eq!(i64::from(p.res_dr), r.dr);
            prop_assert_eq!(p.res_sd, r.sd);
        }
    }
}
