//! Force trace CSV.
//!
//! ```text
//! # pressure_bar: 0.8
//! # material: reference
//! t_s,disp_m,fx_N,fy_N,fz_N
//! 0,0,10.02,0.01,-0.03
//! ```
//!
//! Metadata lines are `# key: value`. Lab units are accepted and converted
//! to SI on load; other `#` lines are comments.

use std::io::Write;
use std::path::Path;

use softgrasp_core::friction::{ForceTrace, TraceMetadata, TraceSample};
use softgrasp_core::units::{bar_to_pa, cm2_to_m2, mm_to_m};
use softgrasp_core::Error as ModelError;

use crate::error::{io_error, FormatError, Result};
use crate::table::{num, Table};

pub const TRACE_COLUMNS: [&str; 5] = ["t_s", "disp_m", "fx_N", "fy_N", "fz_N"];

fn apply_metadata(meta: &mut TraceMetadata, key: &str, value: &str, line: usize) -> Result<()> {
    let number = || {
        value.parse::<f64>().map_err(|_| FormatError::Metadata {
            line,
            reason: format!("`{key}` needs a number, found `{value}`"),
        })
    };
    match key {
        "pressure_bar" => meta.pressure = Some(bar_to_pa(number()?)),
        "pressure_Pa" => meta.pressure = Some(number()?),
        "contact_area_cm2" => meta.contact_area = Some(cm2_to_m2(number()?)),
        "contact_area_m2" => meta.contact_area = Some(number()?),
        "h_offset_mm" => meta.h_offset = Some(mm_to_m(number()?)),
        "h_offset_m" => meta.h_offset = Some(number()?),
        "v_offset_mm" => meta.v_offset = Some(mm_to_m(number()?)),
        "v_offset_m" => meta.v_offset = Some(number()?),
        "material" => meta.material = Some(value.to_string()),
        _ => {}
    }
    Ok(())
}

pub fn parse_trace(text: &str) -> Result<ForceTrace> {
    let mut metadata = TraceMetadata::default();
    let mut body_start = 0;
    let mut header_line = 0;
    for (i, raw) in text.split_inclusive('\n').enumerate() {
        let trimmed = raw.trim();
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once(':') {
                apply_metadata(&mut metadata, key.trim(), value.trim(), i + 1)?;
            }
        } else if !trimmed.is_empty() {
            header_line = i;
            break;
        }
        body_start += raw.len();
    }
    let body = &text[body_start..];
    let table = Table::read(body.as_bytes(), &TRACE_COLUMNS, header_line as u64)?;
    let mut samples = Vec::with_capacity(table.len());
    for row in 0..table.len() {
        let mut v = [0.0; 5];
        for (c, name) in TRACE_COLUMNS.iter().enumerate() {
            v[c] = table.number(row, c, name)?;
        }
        samples.push(TraceSample {
            t: v[0],
            displacement: v[1],
            f_x: v[2],
            f_y: v[3],
            f_z: v[4],
        });
    }
    ForceTrace::new(samples, metadata).map_err(|e| match e {
        ModelError::NonMonotoneTime { index } | ModelError::DecreasingDisplacement { index } => {
            FormatError::AtLine {
                line: table.line(index),
                source: e,
            }
        }
        other => FormatError::Model(other),
    })
}

pub fn read_trace(path: &Path) -> Result<ForceTrace> {
    let text = std::fs::read_to_string(path).map_err(io_error(path))?;
    parse_trace(&text)
}

pub fn write_trace<W: Write>(mut out: W, trace: &ForceTrace) -> Result<()> {
    let m = &trace.metadata;
    let io = |e| FormatError::Csv(csv::Error::from(e));
    for (key, value) in [
        ("pressure_Pa", m.pressure),
        ("contact_area_m2", m.contact_area),
        ("h_offset_m", m.h_offset),
        ("v_offset_m", m.v_offset),
    ] {
        if let Some(v) = value {
            writeln!(out, "# {key}: {v}").map_err(io)?;
        }
    }
    if let Some(material) = &m.material {
        writeln!(out, "# material: {material}").map_err(io)?;
    }
    crate::table::write_rows(
        out,
        &TRACE_COLUMNS,
        trace
            .samples()
            .iter()
            .map(|s| vec![num(s.t), num(s.displacement), num(s.f_x), num(s.f_y), num(s.f_z)]),
    )
}
