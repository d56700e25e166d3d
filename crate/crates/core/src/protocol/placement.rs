//! Where each group lands when it is dropped onto the field.

use std::f64::consts::TAU;

use rand::Rng;

use crate::keying::DeploymentPlan;
use crate::seed;
use crate::udg::Point;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Placement {
    /// Each group's GD lands on a uniform anchor; its ordinary sensors fall
    /// uniformly in a disk of radius `rho` around it, clipped to the field.
    Clustered { rho: f64 },
    /// Every sensor independently uniform over the field.
    Uniform,
}

impl Placement {
    pub fn label(&self) -> &'static str {
        match self {
            Placement::Clustered { .. } => "clustered",
            Placement::Uniform => "uniform",
        }
    }
}

/// Positions for every node of the plan, indexed by node id.
pub fn deploy(plan: &DeploymentPlan, placement: Placement, width: f64, height: f64, seed: u64) -> Vec<Point> {
    let mut rng = seed::rng(seed, "protocol/placement");
    let mut positions = vec![Point::new(0.0, 0.0); plan.node_count()];
    match placement {
        Placement::Uniform => {
            for p in &mut positions {
                *p = Point::new(rng.gen_range(0.0..=width), rng.gen_range(0.0..=height));
            }
        }
        Placement::Clustered { rho } => {
            for g in plan.groups() {
                let anchor = Point::new(rng.gen_range(0.0..=width), rng.gen_range(0.0..=height));
                positions[g.dominator] = anchor;
                for &node in &g.members {
                    let r = rho * rng.gen::<f64>().sqrt();
                    let theta = rng.gen::<f64>() * TAU;
                    positions[node] = Point::new(
                        (anchor.x + r * theta.cos()).clamp(0.0, width),
                        (anchor.y + r * theta.sin()).clamp(0.0, height),
                    );
                }
            }
        }
    }
    positions
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keying::build_plan;

    #[test]
    fn clustered_members_stay_within_rho_of_gd() {
        let plan = build_plan(60, 5, 128, 3).unwrap();
        let pos = deploy(&plan, Placement::Clustered { rho: 10.0 }, 500.0, 500.0, 3);
        for g in plan.groups() {
            for &m in &g.members {
                assert!(pos[m].distance(&pos[g.dominator]) <= 10.0);
            }
        }
        assert!(pos.iter().all(|p| (0.0..=500.0).contains(&p.x) && (0.0..=500.0).contains(&p.y)));
    }

    #[test]
    fn deterministic() {
        let plan = build_plan(30, 4, 128, 1).unwrap();
        for placement in [Placement::Uniform, Placement::Clustered { rho: 5.0 }] {
            assert_eq!(
                deploy(&plan, placement, 100.0, 50.0, 8),
                deploy(&plan, placement, 100.0, 50.0, 8)
            );
        }
    }
}
