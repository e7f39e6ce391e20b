//! Solution-count phase structure over the load/SNR plane.
//!
//! At fixed SNR there is a load band inside which good and bad large-system
//! solutions coexist; its two edges trace a pair of boundary curves that
//! merge at a cusp.  Below the cusp's SNR a single solution exists at every
//! load.  The scan classifies a grid of operating points, refines the band
//! edges by bisection, and locates the cusp.

use crate::analysis::replica::{replica_ber, EnergyDistribution};
use crate::channel::snr_db_to_sigma;
use crate::error::{Error, Result};
use crate::par::indexed_map;

/// One classified operating point of the load/SNR plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    /// Channel load (bits per dimension).
    pub alpha: f64,
    /// SNR per bit in dB.
    pub snr_db: f64,
    /// Number of large-system solution branches at this point.
    pub solution_count: usize,
    /// True when more than one branch exists.
    pub coexistence: bool,
}

/// Result of a phase scan: classified grid plus refined boundary polylines.
#[derive(Debug, Clone)]
pub struct SpinodalScan {
    /// Grid classification in row-major order (SNR outer, load inner).
    pub points: Vec<PhasePoint>,
    /// Lower band edge per SNR row that has a band: `(alpha, snr_db)`,
    /// refined to the stated load tolerance.
    pub lower_edge: Vec<(f64, f64)>,
    /// Upper band edge per SNR row that has a band.
    pub upper_edge: Vec<(f64, f64)>,
}

/// Load tolerance to which band edges are bisected.
const EDGE_TOL: f64 = 1e-4;

/// Number of solution branches at load `alpha` and noise `sigma`.
pub fn solution_count(dist: &EnergyDistribution, alpha: f64, sigma: f64) -> Result<usize> {
    Ok(replica_ber(dist, alpha, sigma)?.solution_count())
}

/// Classifies an inclusive grid over `[alpha_lo, alpha_hi] x [snr_lo, snr_hi]`
/// and extracts the coexistence-band edges per SNR row.
pub fn spinodal_scan(
    dist: &EnergyDistribution,
    alpha_range: (f64, f64),
    snr_db_range: (f64, f64),
    grid: (usize, usize),
) -> Result<SpinodalScan> {
    let (alpha_lo, alpha_hi) = alpha_range;
    let (snr_lo, snr_hi) = snr_db_range;
    let (n_alpha, n_snr) = grid;
    if !(alpha_lo > 0.0 && alpha_hi > alpha_lo) {
        return Err(Error::InvalidConfig("need 0 < alpha_lo < alpha_hi".into()));
    }
    if !(snr_hi >= snr_lo) {
        return Err(Error::InvalidConfig("need snr_lo <= snr_hi".into()));
    }
    if n_alpha < 2 || n_snr < 1 {
        return Err(Error::InvalidConfig(
            "grid needs at least 2 loads and 1 SNR row".into(),
        ));
    }
    let mean_energy = dist.mean_energy();
    let alphas: Vec<f64> = (0..n_alpha)
        .map(|i| alpha_lo + (alpha_hi - alpha_lo) * i as f64 / (n_alpha - 1) as f64)
        .collect();
    let snrs: Vec<f64> = if n_snr == 1 {
        vec![snr_lo]
    } else {
        (0..n_snr)
            .map(|j| snr_lo + (snr_hi - snr_lo) * j as f64 / (n_snr - 1) as f64)
            .collect()
    };

    let dist_ref = dist.clone();
    let alphas_for_scan = alphas.clone();
    let snrs_for_scan = snrs.clone();
    let points: Vec<PhasePoint> = indexed_map(n_alpha * n_snr, 0, move |idx| {
        let (row, col) = (idx / n_alpha, idx % n_alpha);
        let (alpha, snr_db) = (alphas_for_scan[col], snrs_for_scan[row]);
        let sigma = snr_db_to_sigma(snr_db, mean_energy);
        let count = solution_count(&dist_ref, alpha, sigma).unwrap_or(0);
        PhasePoint {
            alpha,
            snr_db,
            solution_count: count,
            coexistence: count > 1,
        }
    });
    if points.iter().any(|p| p.solution_count == 0) {
        return Err(Error::InvalidConfig(
            "solution count failed inside the scan grid".into(),
        ));
    }

    let mut lower_edge = Vec::new();
    let mut upper_edge = Vec::new();
    for (row, &snr_db) in snrs.iter().enumerate() {
        let sigma = snr_db_to_sigma(snr_db, mean_energy);
        let cells = &points[row * n_alpha..(row + 1) * n_alpha];
        let first_in = cells.iter().position(|p| p.coexistence);
        let last_in = cells.iter().rposition(|p| p.coexistence);
        let (Some(first_in), Some(last_in)) = (first_in, last_in) else {
            continue;
        };
        // Lower edge: bisect between the last single-solution cell before the
        // band and the first coexistence cell.
        let lower = if first_in == 0 {
            cells[0].alpha
        } else {
            bisect_edge(dist, sigma, cells[first_in - 1].alpha, cells[first_in].alpha)?
        };
        let upper = if last_in + 1 == n_alpha {
            cells[n_alpha - 1].alpha
        } else {
            bisect_edge(dist, sigma, cells[last_in + 1].alpha, cells[last_in].alpha)?
        };
        lower_edge.push((lower, snr_db));
        upper_edge.push((upper, snr_db));
    }
    Ok(SpinodalScan {
        points,
        lower_edge,
        upper_edge,
    })
}

/// Bisects between a load outside the band and one inside it, returning the
/// edge to within the load tolerance.
fn bisect_edge(
    dist: &EnergyDistribution,
    sigma: f64,
    mut outside: f64,
    mut inside: f64,
) -> Result<f64> {
    while (outside - inside).abs() > EDGE_TOL {
        let mid = 0.5 * (outside + inside);
        if solution_count(dist, mid, sigma)? > 1 {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(0.5 * (outside + inside))
}

/// Coexistence band edges at one SNR, if a band exists within the window.
fn band_at(
    dist: &EnergyDistribution,
    sigma: f64,
    alpha_lo: f64,
    alpha_hi: f64,
    probes: usize,
) -> Result<Option<(f64, f64)>> {
    let mut hit = None;
    for i in 0..=probes {
        let alpha = alpha_lo + (alpha_hi - alpha_lo) * i as f64 / probes as f64;
        if solution_count(dist, alpha, sigma)? > 1 {
            hit = Some(alpha);
            break;
        }
    }
    let Some(alpha_in) = hit else {
        return Ok(None);
    };
    let lower = bisect_edge(dist, sigma, alpha_lo, alpha_in)?;
    let upper = bisect_edge(dist, sigma, alpha_hi, alpha_in)?;
    Ok(Some((lower, upper)))
}

/// Locates the cusp where the two boundary curves meet: the lowest SNR at
/// which a coexistence band exists inside the load window.
///
/// Returns `(alpha, snr_db)`.  The SNR window must straddle the cusp: no band
/// at the low end, a band at the high end.
pub fn cusp_point(
    dist: &EnergyDistribution,
    alpha_range: (f64, f64),
    snr_db_range: (f64, f64),
) -> Result<(f64, f64)> {
    let (alpha_lo, alpha_hi) = alpha_range;
    let (mut snr_lo, mut snr_hi) = snr_db_range;
    let mean_energy = dist.mean_energy();
    let probes = 600;
    if band_at(dist, snr_db_to_sigma(snr_lo, mean_energy), alpha_lo, alpha_hi, probes)?
        .is_some()
    {
        return Err(Error::InvalidConfig(
            "coexistence already present at the low end of the SNR window".into(),
        ));
    }
    let mut band = band_at(
        dist,
        snr_db_to_sigma(snr_hi, mean_energy),
        alpha_lo,
        alpha_hi,
        probes,
    )?;
    if band.is_none() {
        return Err(Error::InvalidConfig(
            "no coexistence at the high end of the SNR window".into(),
        ));
    }
    while snr_hi - snr_lo > 2e-3 {
        let mid = 0.5 * (snr_lo + snr_hi);
        match band_at(dist, snr_db_to_sigma(mid, mean_energy), alpha_lo, alpha_hi, probes)? {
            Some(edges) => {
                snr_hi = mid;
                band = Some(edges);
            }
            None => snr_lo = mid,
        }
    }
    let (lower, upper) = band.expect("band tracked through bisection");
    Ok((0.5 * (lower + upper), 0.5 * (snr_lo + snr_hi)))
}
