//! Stiffness map and probe CSV.

use std::io::Write;
use std::path::Path;

use softgrasp_core::stiffness::{Direction, StiffnessMap, StiffnessProbe, StiffnessRow};

use crate::error::{io_error, FormatError, Result};
use crate::table::{num, write_rows, Table};

pub const MAP_COLUMNS: [&str; 6] = ["pressure_Pa", "offset_m", "kx_N_m", "ky_N_m", "kz_N_m", "fy_N"];
pub const PROBE_COLUMNS: [&str; 7] = ["direction", "x0_m", "x1_m", "f0_N", "f1_N", "pressure_Pa", "offset_m"];

pub fn parse_map(text: &str) -> Result<StiffnessMap> {
    let table = Table::read(text.as_bytes(), &MAP_COLUMNS, 0)?;
    let mut rows = Vec::with_capacity(table.len());
    for row in 0..table.len() {
        let mut v = [0.0; 6];
        for (c, name) in MAP_COLUMNS.iter().enumerate() {
            v[c] = table.number(row, c, name)?;
        }
        rows.push(StiffnessRow {
            pressure: v[0],
            offset: v[1],
            k_x: v[2],
            k_y: v[3],
            k_z: v[4],
            f_y: v[5],
        });
    }
    Ok(StiffnessMap::new(rows)?)
}

pub fn read_map(path: &Path) -> Result<StiffnessMap> {
    parse_map(&std::fs::read_to_string(path).map_err(io_error(path))?)
}

pub fn write_map<W: Write>(out: W, map: &StiffnessMap) -> Result<()> {
    write_rows(
        out,
        &MAP_COLUMNS,
        map.rows()
            .iter()
            .map(|r| vec![num(r.pressure), num(r.offset), num(r.k_x), num(r.k_y), num(r.k_z), num(r.f_y)]),
    )
}

fn parse_direction(text: &str) -> Option<Direction> {
    match text {
        "x" | "X" => Some(Direction::X),
        "y" | "Y" => Some(Direction::Y),
        "z" | "Z" => Some(Direction::Z),
        _ => None,
    }
}

pub fn parse_probes(text: &str) -> Result<Vec<StiffnessProbe>> {
    let table = Table::read(text.as_bytes(), &PROBE_COLUMNS, 0)?;
    let mut probes = Vec::with_capacity(table.len());
    for row in 0..table.len() {
        let direction = parse_direction(table.text(row, 0)).ok_or_else(|| FormatError::MalformedRow {
            line: table.line(row),
            reason: format!("direction must be x, y or z, found `{}`", table.text(row, 0)),
        })?;
        let mut v = [0.0; 6];
        for (c, name) in PROBE_COLUMNS.iter().enumerate().skip(1) {
            v[c - 1] = table.number(row, c, name)?;
        }
        probes.push(StiffnessProbe {
            direction,
            x0: v[0],
            x1: v[1],
            f0: v[2],
            f1: v[3],
            pressure: v[4],
            offset: v[5],
        });
    }
    Ok(probes)
}

pub fn read_probes(path: &Path) -> Result<Vec<StiffnessProbe>> {
    parse_probes(&std::fs::read_to_string(path).map_err(io_error(path))?)
}

pub fn write_probes<W: Write>(out: W, probes: &[StiffnessProbe]) -> Result<()> {
    write_rows(
        out,
        &PROBE_COLUMNS,
        probes.iter().map(|p| {
            vec![
                p.direction.to_string(),
                num(p.x0),
                num(p.x1),
                num(p.f0),
                num(p.f1),
                num(p.pressure),
                num(p.offset),
            ]
        }),
    )
}
