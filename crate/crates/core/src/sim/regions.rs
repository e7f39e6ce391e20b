//! Decision-region mapping for the analytic two-bit channel: which vectors
//! the exhaustive detector, the one-flip local criterion, and the parallel
//! ascent's fixed-point condition select at each matched-filter point.

use serde::Serialize;

use crate::analysis::parallel_thresholds;
use crate::bits::BitVector;
use crate::channel::{two_bit_channel, Observation};
use crate::detect::{detect_gml, is_lml_point};
use crate::error::{Error, Result};
use crate::likelihood::gradient_from_mf;

/// Labels attached to one matched-filter grid point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegionCell {
    /// The exhaustive-search winner (lexicographically smallest on ties).
    pub gml: [i8; 2],
    /// Vectors no single flip can improve.
    pub lml1: Vec<[i8; 2]>,
    /// Fixed points of the parallel-schedule ascent.
    pub plas: Vec<[i8; 2]>,
}

/// Region map over a rectangle of matched-filter outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RegionGrid {
    /// First matched-filter coordinate of each column.
    pub y1: Vec<f64>,
    /// Second matched-filter coordinate of each row.
    pub y2: Vec<f64>,
    /// Row-major cells: `cells[row * y1.len() + col]` labels
    /// `(y1[col], y2[row])`.
    pub cells: Vec<RegionCell>,
}

impl RegionGrid {
    /// The cell labeling `(y1[col], y2[row])`.
    pub fn cell(&self, row: usize, col: usize) -> &RegionCell {
        &self.cells[row * self.y1.len() + col]
    }
}

const CANDIDATES: [[i8; 2]; 4] = [[-1, -1], [-1, 1], [1, -1], [1, 1]];

fn linspace(range: (f64, f64), count: usize) -> Result<Vec<f64>> {
    if count < 2 || !(range.1 > range.0) {
        return Err(Error::InvalidConfig(
            "grid axes need at least two points and an increasing range".into(),
        ));
    }
    let step = (range.1 - range.0) / (count - 1) as f64;
    Ok((0..count).map(|i| range.0 + step * i as f64).collect())
}

/// Maps the two-bit channel's decision regions on a matched-filter grid.
///
/// For each grid point the cell records the exhaustive winner, every
/// vector that no single flip improves, and every fixed point of the
/// parallel-schedule ascent. The one-flip set is always contained in the
/// parallel fixed-point set because the parallel flip thresholds dominate
/// the single-bit ones.
pub fn map_regions_2bit(
    rho: f64,
    a1: f64,
    a2: f64,
    y1_range: (f64, f64),
    y2_range: (f64, f64),
    grid: (usize, usize),
) -> Result<RegionGrid> {
    if !(rho.abs() < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "crosscorrelation {rho} must lie strictly inside (-1, 1)"
        )));
    }
    if !(a1 > 0.0) || !(a2 > 0.0) {
        return Err(Error::InvalidConfig("amplitudes must be positive".into()));
    }
    let ch = two_bit_channel(rho, a1, a2, 1.0);
    let y1 = linspace(y1_range, grid.0)?;
    let y2 = linspace(y2_range, grid.1)?;
    let t_par = parallel_thresholds(&ch);

    let mut cells = Vec::with_capacity(y1.len() * y2.len());
    for &b2 in &y2 {
        for &b1 in &y1 {
            let obs = Observation::from_mf_output(vec![b1, b2], BitVector::all_plus(2));
            let gml = detect_gml(&ch, &obs)?;
            let gml = [gml.as_slice()[0], gml.as_slice()[1]];

            let mut lml1 = Vec::new();
            let mut plas = Vec::new();
            for cand in CANDIDATES {
                let b = BitVector::new(vec![cand[0], cand[1]]);
                if is_lml_point(&ch, &obs, &b, 1)? {
                    lml1.push(cand);
                }
                let g = gradient_from_mf(&ch, obs.mf_output(), &b);
                let fixed = (0..2).all(|k| b.get_f(k) * g[k] >= -t_par[k]);
                if fixed {
                    plas.push(cand);
                }
            }
            cells.push(RegionCell { gml, lml1, plas });
        }
    }
    Ok(RegionGrid { y1, y2, cells })
}
