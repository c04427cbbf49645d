//! Optical link-budget arithmetic and the continuous-laser energy model.
//!
//! Loss bookkeeping is plain dB addition: an `n x n` Clements-style mesh is
//! modeled as `n` MZI stages deep, passive fanout to `n` destinations costs
//! `10*log10(n)` dB, and a link is feasible while the accumulated loss stays
//! within the configured budget. Feasibility gates the monolithic tile size
//! reported alongside sweeps; it does not alter the dataflow simulation,
//! which fixes the tile at the small feasible granularity.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct OpticalParams {
    /// Insertion loss per MZI stage (dB).
    pub mzi_loss_db: f64,
    /// Loss per waveguide crossing (dB).
    pub crossing_loss_db: f64,
    /// Crossings traversed along one link.
    pub crossings_per_link: u64,
    /// Maximum tolerable end-to-end loss (dB).
    pub link_budget_db: f64,
    /// Extra margin reserved from the budget (dB).
    pub margin_db: f64,
}

impl Default for OpticalParams {
    fn default() -> Self {
        OpticalParams {
            mzi_loss_db: 0.4,
            crossing_loss_db: 0.05,
            crossings_per_link: 0,
            link_budget_db: 15.0,
            margin_db: 0.0,
        }
    }
}

impl OpticalParams {
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        for (label, v) in [
            ("mzi_loss_db", self.mzi_loss_db),
            ("crossing_loss_db", self.crossing_loss_db),
            ("margin_db", self.margin_db),
        ] {
            if v.is_nan() || v < 0.0 {
                violations.push(format!("{label} must be >= 0, got {v}"));
            }
        }
        if self.link_budget_db.is_nan() || self.link_budget_db <= 0.0 {
            violations.push(format!(
                "link_budget_db must be > 0, got {}",
                self.link_budget_db
            ));
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(violations))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct LaserParams {
    pub laser_power_w: f64,
    pub cycle_time_s: f64,
}

impl Default for LaserParams {
    fn default() -> Self {
        LaserParams {
            laser_power_w: 1.0,
            cycle_time_s: 1e-9,
        }
    }
}

impl LaserParams {
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        if self.laser_power_w.is_nan() || self.laser_power_w <= 0.0 {
            violations.push(format!(
                "laser_power_w must be > 0, got {}",
                self.laser_power_w
            ));
        }
        if self.cycle_time_s.is_nan() || self.cycle_time_s <= 0.0 {
            violations.push(format!(
                "cycle_time_s must be > 0, got {}",
                self.cycle_time_s
            ));
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(violations))
        }
    }
}

/// Passive 1-to-n splitting loss: `10 * log10(n)` dB.
pub fn fanout_loss_db(n: u64) -> f64 {
    debug_assert!(n >= 1);
    10.0 * (n as f64).log10()
}

/// Accumulated insertion loss through an `n x n` mesh: `n` MZI stages plus
/// the configured crossings.
pub fn mesh_loss_db(n: u64, p: &OpticalParams) -> f64 {
    n as f64 * p.mzi_loss_db + p.crossings_per_link as f64 * p.crossing_loss_db
}

/// Whether an `n x n` monolithic mesh closes its link budget.
pub fn link_feasible(n: u64, p: &OpticalParams) -> bool {
    mesh_loss_db(n, p) + fanout_loss_db(n) + p.margin_db <= p.link_budget_db
}

/// Upper scan bound for [`max_monolithic_mesh`].
pub const MESH_SCAN_LIMIT: u64 = 1024;

/// Largest mesh dimension that stays within the link budget, found by
/// upward scan (total loss is strictly increasing in `n`), capped at
/// [`MESH_SCAN_LIMIT`].
pub fn max_monolithic_mesh(p: &OpticalParams) -> Result<u64> {
    if !link_feasible(1, p) {
        return Err(Error::InfeasibleAtUnity(format!(
            "a 1x1 mesh already loses {:.2} dB against a {:.2} dB budget",
            mesh_loss_db(1, p) + p.margin_db,
            p.link_budget_db
        )));
    }
    let mut best = 1;
    for n in 2..=MESH_SCAN_LIMIT {
        if link_feasible(n, p) {
            best = n;
        } else {
            break;
        }
    }
    Ok(best)
}

/// Laser energy for an inference: the source stays on for every cycle,
/// productive or not, so energy is exactly linear in the cycle count.
pub fn laser_energy_j(total_cycles: u64, lp: &LaserParams) -> f64 {
    (lp.laser_power_w * lp.cycle_time_s) * total_cycles as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fanout_examples() {
        assert_eq!(fanout_loss_db(1), 0.0);
        assert!((fanout_loss_db(4) - 6.0206).abs() < 1e-3);
        assert!((fanout_loss_db(16) - 12.0412).abs() < 1e-3);
    }

    #[test]
    fn fanout_is_additive_over_products() {
        for (a, b) in [(2, 8), (4, 4), (3, 7), (16, 64), (5, 125)] {
            let joint = fanout_loss_db(a * b);
            let split = fanout_loss_db(a) + fanout_loss_db(b);
            assert!((joint - split).abs() < 1e-9, "{a}*{b}");
        }
    }

    #[test]
    fn mesh_loss_examples() {
        let p = OpticalParams::default();
        assert!((mesh_loss_db(16, &p) - 6.4).abs() < 1e-12);
        assert!((mesh_loss_db(1, &p) - 0.4).abs() < 1e-12);
        let crossed = OpticalParams {
            mzi_loss_db: 0.5,
            crossing_loss_db: 0.1,
            crossings_per_link: 10,
            ..OpticalParams::default()
        };
        assert!((mesh_loss_db(4, &crossed) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn feasibility_examples() {
        let p = OpticalParams::default();
        assert!(link_feasible(4, &p)); // 1.6 + 6.02 dB against 15 dB
        assert!(!link_feasible(16, &p)); // 6.4 + 12.04 dB against 15 dB
        let tiny_budget = OpticalParams {
            link_budget_db: 0.5,
            ..OpticalParams::default()
        };
        assert!(link_feasible(1, &tiny_budget));
    }

    #[test]
    fn max_mesh_under_defaults() {
        // 0.4n + 10*log10(n) crosses 15 dB between n=11 (14.81) and n=12 (15.59).
        let p = OpticalParams::default();
        let max = max_monolithic_mesh(&p).unwrap();
        assert_eq!(max, 11);
        assert!((4..=15).contains(&max));
        assert!(link_feasible(4, &p) && !link_feasible(16, &p));
    }

    #[test]
    fn max_mesh_boundary() {
        // Budget set just past the n=4 total of 1.6 + 6.0206 = 7.6206 dB.
        let p = OpticalParams {
            link_budget_db: 7.6206,
            ..OpticalParams::default()
        };
        assert_eq!(max_monolithic_mesh(&p).unwrap(), 4);
        // Just below the n=4 total the answer drops to 3.
        let p = OpticalParams {
            link_budget_db: 7.62,
            ..OpticalParams::default()
        };
        assert_eq!(max_monolithic_mesh(&p).unwrap(), 3);
    }

    #[test]
    fn max_mesh_fanout_only_and_scan_cap() {
        let p = OpticalParams {
            mzi_loss_db: 0.0,
            crossing_loss_db: 0.0,
            crossings_per_link: 0,
            link_budget_db: 30.0,
            margin_db: 0.0,
        };
        assert_eq!(max_monolithic_mesh(&p).unwrap(), 1000);
        let generous = OpticalParams {
            link_budget_db: 100.0,
            ..p
        };
        assert_eq!(max_monolithic_mesh(&generous).unwrap(), MESH_SCAN_LIMIT);
    }

    #[test]
    fn max_mesh_infeasible_at_unity() {
        let p = OpticalParams {
            mzi_loss_db: 20.0,
            ..OpticalParams::default()
        };
        assert!(matches!(
            max_monolithic_mesh(&p),
            Err(Error::InfeasibleAtUnity(_))
        ));
    }

    #[test]
    fn max_mesh_monotonicity() {
        let mut prev = u64::MAX;
        for tenths in 1..=10 {
            let p = OpticalParams {
                mzi_loss_db: tenths as f64 / 10.0,
                ..OpticalParams::default()
            };
            let max = max_monolithic_mesh(&p).unwrap();
            assert!(max <= prev, "mzi loss up, mesh bound must not grow");
            prev = max;
        }
        let mut prev = 0;
        for budget in [5.0, 10.0, 15.0, 20.0, 25.0] {
            let p = OpticalParams {
                link_budget_db: budget,
                ..OpticalParams::default()
            };
            let max = max_monolithic_mesh(&p).unwrap();
            assert!(max >= prev, "budget up, mesh bound must not shrink");
            prev = max;
        }
    }

    #[test]
    fn total_loss_strictly_increasing() {
        let p = OpticalParams::default();
        let mut prev = f64::NEG_INFINITY;
        for n in 1..=64 {
            let total = mesh_loss_db(n, &p) + fanout_loss_db(n);
            assert!(total > prev);
            prev = total;
        }
    }

    #[test]
    fn laser_energy_examples() {
        let lp = LaserParams {
            laser_power_w: 1.0,
            cycle_time_s: 1e-9,
        };
        assert_eq!(laser_energy_j(0, &lp), 0.0);
        assert!((laser_energy_j(1_000_000, &lp) - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn laser_energy_exactly_linear() {
        let lp = LaserParams {
            laser_power_w: 0.731,
            cycle_time_s: 3.3e-10,
        };
        for k in [1u64, 7, 1000, 123_456_789] {
            assert_eq!(laser_energy_j(2 * k, &lp), 2.0 * laser_energy_j(k, &lp));
        }
    }
}
