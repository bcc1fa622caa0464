//! CSV exports of computed curves, trajectories and search grids, plus the
//! JSON document layout shared by all subcommands.

use std::io::Write;

use serde::Serialize;
use softgrasp_core::dynamics::Trajectory;
use softgrasp_core::optim::CandidateVerdict;
use softgrasp_core::stability::RestCurvePoint;

use crate::error::Result;
use crate::table::{num, write_rows};

pub const REST_CURVE_COLUMNS: [&str; 2] = ["f_p_N", "theta_r_rad"];
pub const TRAJECTORY_COLUMNS: [&str; 6] = ["t_s", "theta_rad", "theta_dot_rad_s", "f_n_N", "f_t_N", "energy_J"];
pub const REGION_COLUMNS: [&str; 4] = ["pressure_Pa", "offset_m", "margin_N", "stable"];

/// A preload without a rest angle leaves the second cell empty.
pub fn write_rest_curve<W: Write>(out: W, curve: &[RestCurvePoint]) -> Result<()> {
    write_rows(
        out,
        &REST_CURVE_COLUMNS,
        curve
            .iter()
            .map(|p| vec![num(p.f_p), p.theta_r.map(num).unwrap_or_default()]),
    )
}

pub fn write_trajectory<W: Write>(out: W, traj: &Trajectory) -> Result<()> {
    write_rows(
        out,
        &TRAJECTORY_COLUMNS,
        traj.samples.iter().map(|s| {
            vec![
                num(s.t),
                num(s.state.theta),
                num(s.state.theta_dot),
                num(s.forces.f_n),
                num(s.forces.f_t),
                num(s.energy),
            ]
        }),
    )
}

pub fn write_region<W: Write>(out: W, region: &[CandidateVerdict]) -> Result<()> {
    write_rows(
        out,
        &REGION_COLUMNS,
        region.iter().map(|v| {
            vec![
                num(v.candidate.pressure),
                num(v.candidate.offset),
                num(v.margin),
                v.stable.to_string(),
            ]
        }),
    )
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n").map_err(serde_json::Error::io)?;
    Ok(())
}
