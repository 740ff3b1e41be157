//! Fixtures shared by the benchmarks.

use hpalab::arm::SpecCatalog;
use hpalab::{ManagerVerdict, MicroserviceSpec, MilliCpu, ScaleAction};

/// `n` services, every third one short of capacity and the rest with slack,
/// cycling through 70m, 100m and 200m requests.
pub fn pressured_app(n: usize) -> (Vec<ManagerVerdict>, SpecCatalog) {
    let requests = [70u64, 100, 200];
    let mut verdicts = Vec::with_capacity(n);
    let mut specs = SpecCatalog::new();
    for i in 0..n {
        let name = format!("svc{i:03}");
        let req = MilliCpu::new(requests[i % requests.len()]);
        specs.insert(name.clone(), MicroserviceSpec::new(name.clone(), req, req * 2).unwrap());
        let (dr, sd) = if i % 3 == 0 {
            (8 + (i % 7) as u32, ScaleAction::ScaleUp)
        } else {
            (1 + (i % 4) as u32, ScaleAction::ScaleDown)
        };
        verdicts.push(ManagerVerdict {
            name,
            dr,
            sd,
            max_r: 5,
        });
    }
    (verdicts, specs)
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixture_is_infeasible() {
        let (v, s) = super::pressured_app(12);
        assert_eq!(s.len(), 12);
        assert!(v.iter().any(|v| v.dr > v.max_r));
        assert!(v.iter().any(|v| v.dr < v.max_r));
    }
}
