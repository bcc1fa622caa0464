//! Bulk stiffness from small probing moves, and interpolable stiffness maps
//! over actuation pressure and mounting offset.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum Direction {
    X,
    Y,
    Z,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::X, Direction::Y, Direction::Z];

    fn index(self) -> usize {
        match self {
            Direction::X => 0,
            Direction::Y => 1,
            Direction::Z => 2,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::X => "x",
            Direction::Y => "y",
            Direction::Z => "z",
        })
    }
}

/// One probing move: the robot steps from `x0` to `x1` along `direction`
/// and the sensor reads `f0` and `f1` on the same axis.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StiffnessProbe {
    pub direction: Direction,
    /// m
    pub x0: f64,
    /// m
    pub x1: f64,
    /// N
    pub f0: f64,
    /// N
    pub f1: f64,
    /// Pa
    pub pressure: f64,
    /// m
    pub offset: f64,
}

/// Secant stiffness `(f1 − f0)/(x1 − x0)` in N/m.
pub fn estimate_stiffness(probe: &StiffnessProbe) -> Result<f64> {
    let dx = probe.x1 - probe.x0;
    if dx == 0.0 {
        return Err(Error::ZeroDisplacement);
    }
    Ok((probe.f1 - probe.f0) / dx)
}

/// Probe step sizes used for each finger family (m, in x, y, z).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "kebab-case")
)]
pub enum FingerType {
    SoftGripping,
    PneuNet,
}

impl FingerType {
    pub fn probe_deltas(self) -> [f64; 3] {
        match self {
            FingerType::SoftGripping => [2e-3, 2e-3, 0.5e-3],
            FingerType::PneuNet => [2e-3, 2e-3, 1e-3],
        }
    }

    pub fn probe_delta(self, direction: Direction) -> f64 {
        self.probe_deltas()[direction.index()]
    }
}

/// Stiffnesses and normal preload of one finger at one pressure and offset.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StiffnessRow {
    /// Pa
    pub pressure: f64,
    /// m
    pub offset: f64,
    /// N/m
    pub k_x: f64,
    /// N/m
    pub k_y: f64,
    /// N/m
    pub k_z: f64,
    /// Normal force held by the finger before probing (N).
    pub f_y: f64,
}

/// Interpolated map values at a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffnessSample {
    pub k_x: f64,
    pub k_y: f64,
    pub k_z: f64,
    pub f_y: f64,
}

impl From<&StiffnessRow> for StiffnessSample {
    fn from(row: &StiffnessRow) -> Self {
        StiffnessSample {
            k_x: row.k_x,
            k_y: row.k_y,
            k_z: row.k_z,
            f_y: row.f_y,
        }
    }
}

/// A complete rectangular grid of [`StiffnessRow`]s, sorted by pressure then
/// offset. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct StiffnessMap {
    rows: Vec<StiffnessRow>,
    pressures: Vec<f64>,
    offsets: Vec<f64>,
}

fn sorted_unique(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    values.dedup();
    values
}

impl StiffnessMap {
    pub fn new(mut rows: Vec<StiffnessRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyMap);
        }
        for row in &rows {
            let values = [row.pressure, row.offset, row.k_x, row.k_y, row.k_z, row.f_y];
            if !values.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "stiffness map row",
                    reason: "must be finite",
                });
            }
            if row.k_x < 0.0 || row.k_y < 0.0 || row.k_z < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "stiffness",
                    reason: "must be >= 0",
                });
            }
        }
        rows.sort_by(|a, b| {
            a.pressure
                .total_cmp(&b.pressure)
                .then(a.offset.total_cmp(&b.offset))
        });
        if let Some(w) = rows
            .windows(2)
            .find(|w| w[0].pressure == w[1].pressure && w[0].offset == w[1].offset)
        {
            return Err(Error::DuplicateKey {
                pressure: w[0].pressure,
                offset: w[0].offset,
            });
        }
        let pressures = sorted_unique(rows.iter().map(|r| r.pressure).collect());
        let offsets = sorted_unique(rows.iter().map(|r| r.offset).collect());
        // Sorted, duplicate-free and of full size means every cell is present.
        if rows.len() != pressures.len() * offsets.len() {
            return Err(Error::NotRectangular);
        }
        Ok(StiffnessMap {
            rows,
            pressures,
            offsets,
        })
    }

    /// Rows sorted by pressure, then offset.
    pub fn rows(&self) -> &[StiffnessRow] {
        &self.rows
    }

    pub fn pressures(&self) -> &[f64] {
        &self.pressures
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn row(&self, pressure_index: usize, offset_index: usize) -> &StiffnessRow {
        &self.rows[pressure_index * self.offsets.len() + offset_index]
    }

    pub fn contains(&self, pressure: f64, offset: f64) -> bool {
        let inside = |axis: &[f64], q: f64| axis[0] <= q && q <= axis[axis.len() - 1];
        inside(&self.pressures, pressure) && inside(&self.offsets, offset)
    }

    /// Bilinear interpolation; points outside the grid are refused.
    pub fn query(&self, pressure: f64, offset: f64) -> Result<StiffnessSample> {
        if !self.contains(pressure, offset) {
            return Err(Error::OutOfHull { pressure, offset });
        }
        let (ip, wp) = locate(&self.pressures, pressure);
        let (io, wo) = locate(&self.offsets, offset);
        let ip1 = (ip + 1).min(self.pressures.len() - 1);
        let io1 = (io + 1).min(self.offsets.len() - 1);
        let corners = [
            self.row(ip, io),
            self.row(ip, io1),
            self.row(ip1, io),
            self.row(ip1, io1),
        ];
        let blend = |get: fn(&StiffnessRow) -> f64| {
            let lo = lerp(get(corners[0]), get(corners[1]), wo);
            let hi = lerp(get(corners[2]), get(corners[3]), wo);
            lerp(lo, hi, wp)
        };
        Ok(StiffnessSample {
            k_x: blend(|r| r.k_x),
            k_y: blend(|r| r.k_y),
            k_z: blend(|r| r.k_z),
            f_y: blend(|r| r.f_y),
        })
    }
}

fn lerp(a: f64, b: f64, w: f64) -> f64 {
    if w == 0.0 {
        a
    } else if w == 1.0 {
        b
    } else {
        (1.0 - w) * a + w * b
    }
}

/// Cell index and weight of `q` on a sorted axis known to contain it.
fn locate(axis: &[f64], q: f64) -> (usize, f64) {
    if axis.len() == 1 {
        return (0, 0.0);
    }
    let upper = axis.partition_point(|&v| v <= q).clamp(1, axis.len() - 1);
    let k = upper - 1;
    (k, ((q - axis[k]) / (axis[k + 1] - axis[k])).clamp(0.0, 1.0))
}

/// Result of [`build_stiffness_map`].
#[derive(Debug, Clone, PartialEq)]
pub struct MapBuild {
    pub map: StiffnessMap,
    /// Grid points where more than one probe per direction was averaged.
    pub averaged: Vec<(f64, f64)>,
}

/// Groups probes by exact (pressure, offset) and reduces each group to one
/// row.
///
/// Each direction's stiffness is the mean magnitude of its probes, so the
/// sensor's sign convention does not matter. The preload `f_y` is the mean
/// magnitude of the y-probe starting force, the normal load held before the
/// probing move.
pub fn build_stiffness_map(probes: &[StiffnessProbe]) -> Result<MapBuild> {
    if probes.is_empty() {
        return Err(Error::EmptyMap);
    }
    let mut order: Vec<&StiffnessProbe> = probes.iter().collect();
    order.sort_by(|a, b| {
        a.pressure
            .total_cmp(&b.pressure)
            .then(a.offset.total_cmp(&b.offset))
    });
    let mut rows = Vec::new();
    let mut averaged = Vec::new();
    for group in order.chunk_by(|a, b| a.pressure == b.pressure && a.offset == b.offset) {
        let (pressure, offset) = (group[0].pressure, group[0].offset);
        let mut sums = [0.0; 3];
        let mut counts = [0usize; 3];
        let mut preload = 0.0;
        for probe in group {
            let d = probe.direction.index();
            sums[d] += estimate_stiffness(probe)?.abs();
            counts[d] += 1;
            if probe.direction == Direction::Y {
                preload += probe.f0.abs();
            }
        }
        if let Some(missing) = Direction::ALL.into_iter().find(|d| counts[d.index()] == 0) {
            return Err(Error::IncompleteGroup {
                pressure,
                offset,
                missing,
            });
        }
        if counts.iter().any(|&c| c > 1) {
            averaged.push((pressure, offset));
        }
        let mean = |d: Direction| sums[d.index()] / counts[d.index()] as f64;
        rows.push(StiffnessRow {
            pressure,
            offset,
            k_x: mean(Direction::X),
            k_y: mean(Direction::Y),
            k_z: mean(Direction::Z),
            f_y: preload / counts[Direction::Y.index()] as f64,
        });
    }
    Ok(MapBuild {
        map: StiffnessMap::new(rows)?,
        averaged,
    })
}
