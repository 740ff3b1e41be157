//! Capacity analyzer: decides whether the managers' verdicts can be executed
//! as-is or whether the application must go through resource exchange.

use std::collections::BTreeSet;

use crate::domain::{ManagerVerdict, ResourcePlan};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeasibilityOutcome {
    /// Every desired replica count fits its capacity.
    AllFeasible(Vec<ResourcePlan>),
    /// At least one service wants more than its capacity; the whole
    /// application snapshot is forwarded.
    Infeasible(Vec<ManagerVerdict>),
}

pub fn analyze(verdicts: Vec<ManagerVerdict>) -> Result<FeasibilityOutcome> {
    let mut seen = BTreeSet::new();
    for v in &verdicts {
        if !seen.insert(v.name.as_str()) {
            return Err(Error::DuplicateService(v.name.clone()));
        }
    }
    if verdicts.iter().any(|v| v.dr > v.max_r) {
        return Ok(FeasibilityOutcome::Infeasible(verdicts));
    }
    Ok(FeasibilityOutcome::AllFeasible(
        verdicts
            .into_iter()
            .map(|v| ResourcePlan {
                name: v.name,
                res_sd: v.sd,
                res_dr: v.dr,
                updated_max_r: v.max_r,
            })
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::ScaleAction::*;
    use proptest::prelude::*;

    fn v(name: &str, dr: u32, max_r: u32, sd: crate::domain::ScaleAction) -> ManagerVerdict {
        ManagerVerdict {
            name: name.into(),
            dr,
            sd,
            max_r,
        }
    }

    #[test]
    fn within_capacity_passes_through() {
        let out = analyze(vec![v("a", 3, 5, ScaleUp), v("b", 1, 5, ScaleDown)]).unwrap();
        let FeasibilityOutcome::AllFeasible(plans) = out else { panic!("expected feasible") };
        let got: Vec<_> = plans.iter().map(|p| (p.res_sd, p.res_dr, p.updated_max_r)).collect();
        assert_eq!(got, vec![(ScaleUp, 3, 5), (ScaleDown, 1, 5)]);
    }

    #[test]
    fn one_overflow_forwards_everything() {
        let input = vec![v("a", 7, 5, ScaleUp), v("b", 1, 5, ScaleDown)];
        assert_eq!(analyze(input.clone()).unwrap(), FeasibilityOutcome::Infeasible(input));
    }

    #[test]
    fn empty_is_feasible() {
        assert_eq!(analyze(vec![]).unwrap(), FeasibilityOutcome::AllFeasible(vec![]));
    }

    #[test]
    fn duplicates_rejected() {
        assert!(matches!(
            analyze(vec![v("a", 1, 5, NoScale), v("a", 2, 5, NoScale)]),
            Err(Error::DuplicateService(_))
        ));
    }

    proptest! {
        #[test]
        fn infeasible_iff_some_overflow(rows in proptest::collection::vec((0u32..20, 1u32..20), 0..12)) {
            let verdicts: Vec<_> = rows.iter().enumerate().map(|(i, &(dr, m))| v(&format!("s{i}"), dr, m, NoScale)).collect();
            let overflow = rows.iter().any(|&(dr, m)| dr > m);
            match analyze(verdicts).unwrap() {
                FeasibilityOutcome::Infeasible(_) => prop_assert!(overflow),
                FeasibilityOutcome::AllFeasible(plans) => {
                    prop_assert!(!overflow);
                    prop_assert!(plans.iter().all(|p| p.res_dr <= p.updated_max_r));
                }
            }
        }
    }
}
