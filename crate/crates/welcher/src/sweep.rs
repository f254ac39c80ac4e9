//! Wire-thickness sweeps of the visibility bounds.

use serde::Serialize;
use welcher_core::metrics::{wire_limited_visibility, worst_case_visibility};
use welcher_core::scenario::{analytic_blocked_fraction, run_scenario};
use welcher_core::{Error as CoreError, ExperimentGeometry, Scenario, SimOptions};

use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub wire_thickness_mm: f64,
    pub v_wire_limited: f64,
    /// Closed-form fraction of the light stopped by the grid.
    pub blocked_fraction_estimate: f64,
    /// Worst-case visibility implied by the estimate; empty when undefined.
    pub v_star_estimate: Option<f64>,
    pub sim_loss_1_pct: Option<f64>,
    pub sim_loss_2_pct: Option<f64>,
    pub v_star_simulated: Option<f64>,
}

/// Evenly spaced thicknesses from `from_mm` to `to_mm` inclusive.
pub fn thicknesses(from_mm: f64, to_mm: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !from_mm.is_finite() || !to_mm.is_finite() || from_mm < 0.0 || to_mm < 0.0 {
        return Err(CoreError::InvalidArgument(
            "sweep needs steps >= 1 and non-negative, finite bounds".into(),
        )
        .into());
    }
    if steps == 1 {
        return Ok(vec![from_mm]);
    }
    let h = (to_mm - from_mm) / (steps - 1) as f64;
    Ok((0..steps).map(|i| from_mm + h * i as f64).collect())
}

fn v_star(geom: &ExperimentGeometry, blocked: f64) -> Option<f64> {
    let mm = 1e3;
    worst_case_visibility(
        geom.airy_radius() * mm,
        geom.wire_thickness * mm,
        geom.wire_count,
        blocked,
    )
    .ok()
    .map(|w| w.v_lower.value)
}

/// Visibility bounds per wire thickness. With `simulate`, cases a and b are
/// also run at each thickness to give the simulated per-detector loss.
pub fn wire_thickness_sweep(
    geom: &ExperimentGeometry,
    options: &SimOptions,
    thicknesses_mm: &[f64],
    simulate: bool,
) -> Result<Vec<SweepRow>> {
    let mm = 1e3;
    let baseline = if simulate {
        Some(run_scenario(geom, Scenario::A, options)?)
    } else {
        None
    };
    thicknesses_mm
        .iter()
        .map(|&t_mm| {
            let mut g = geom.clone();
            g.wire_thickness = t_mm / mm;
            let blocked = if t_mm > 0.0 {
                analytic_blocked_fraction(&g)?
            } else {
                0.0
            };
            let mut row = SweepRow {
                wire_thickness_mm: t_mm,
                v_wire_limited: wire_limited_visibility(g.fringe_constant() / mm, t_mm).value,
                blocked_fraction_estimate: blocked,
                v_star_estimate: v_star(&g, blocked),
                sim_loss_1_pct: None,
                sim_loss_2_pct: None,
                v_star_simulated: None,
            };
            if let Some(a) = &baseline {
                log::info!("simulating case b at t = {t_mm} mm");
                let b = run_scenario(&g, Scenario::B, options)?;
                let loss = [0, 1].map(|k| 100.0 * (1.0 - b.counts()[k] / a.counts()[k]));
                row.sim_loss_1_pct = Some(loss[0]);
                row.sim_loss_2_pct = Some(loss[1]);
                row.v_star_simulated = v_star(&g, loss[0].max(loss[1]) / 100.0);
            }
            Ok(row)
        })
        .collect()
}
