//! Large-system BER fixed points for the single-bit local-maximum detector.
//!
//! In the large-system limit the per-class BERs solve a coupled fixed-point
//! system that reduces exactly to one scalar unknown, the aggregate
//! interference energy `s = 4a * E[A^2 p(A)]` with `p(A) = Q(A / sqrt(s2+s))`.
//! This module finds *all* roots of that scalar map — a dense grid scan with
//! sign-change bracketing plus a curvature probe that catches tangent (double)
//! roots — and reports per-class BERs, efficiency, and a goodness label per
//! branch.

use crate::analysis::qfunc::q_function;
use crate::error::{Error, Result};

/// Number of grid points used to bracket roots of the scalar map.
const GRID_POINTS: usize = 10_000;

/// Absolute slack (scaled by `1 + s_max`) under which a grazing extremum of
/// the scalar map counts as a tangent root.
const TANGENCY_TOL: f64 = 1e-8;

/// A discrete amplitude distribution: classes of `(amplitude, fraction)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyDistribution {
    classes: Vec<(f64, f64)>,
}

impl EnergyDistribution {
    /// Validates amplitudes and fractions; fractions must sum to one.
    pub fn new(classes: Vec<(f64, f64)>) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::InvalidConfig(
                "energy distribution needs at least one class".into(),
            ));
        }
        if classes.iter().any(|&(a, _)| !(a > 0.0)) {
            return Err(Error::InvalidConfig(
                "class amplitudes must be positive".into(),
            ));
        }
        if classes.iter().any(|&(_, l)| !(0.0..=1.0).contains(&l)) {
            return Err(Error::InvalidConfig(
                "class fractions must lie in [0, 1]".into(),
            ));
        }
        let total: f64 = classes.iter().map(|&(_, l)| l).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "class fractions sum to {total}, expected 1"
            )));
        }
        Ok(Self { classes })
    }

    /// Single class of unit amplitude.
    pub fn equal_unit() -> Self {
        Self {
            classes: vec![(1.0, 1.0)],
        }
    }

    /// Two classes: fraction `lambda1` at `a1`, the rest at `a2`.
    pub fn two_class(lambda1: f64, a1: f64, a2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda1) {
            return Err(Error::InvalidConfig(
                "first-class fraction must lie in [0, 1]".into(),
            ));
        }
        Self::new(vec![(a1, lambda1), (a2, 1.0 - lambda1)])
    }

    /// The `(amplitude, fraction)` classes.
    pub fn classes(&self) -> &[(f64, f64)] {
        &self.classes
    }

    /// Expectation of `f(A)` under the class fractions.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.classes.iter().map(|&(a, l)| l * f(a)).sum()
    }

    /// Mean bit energy `E[A^2]`.
    pub fn mean_energy(&self) -> f64 {
        self.expect(|a| a * a)
    }

    /// Same class structure rescaled to unit mean energy.
    pub fn normalized(&self) -> Self {
        let scale = self.mean_energy().sqrt();
        Self {
            classes: self
                .classes
                .iter()
                .map(|&(a, l)| (a / scale, l))
                .collect(),
        }
    }
}

/// Stability label of a solution branch, assigned by BER order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchClass {
    /// Lowest-BER branch; the operating point reached from good starts.
    Good,
    /// Intermediate branch separating the basins.
    Marginal,
    /// Highest-BER branch.
    Bad,
}

/// One solution branch of the interference fixed point.
#[derive(Debug, Clone)]
pub struct ReplicaBranch {
    /// Aggregate interference energy `s` at the root.
    pub interference: f64,
    /// BER per amplitude class, aligned with the distribution's classes.
    pub ber_per_class: Vec<f64>,
    /// Population-averaged BER.
    pub avg_ber: f64,
    /// Efficiency `s2 / (s2 + s)`; at zero noise this limits to 1 on the
    /// interference-free branch and 0 on any other.
    pub efficiency: f64,
    /// Largest per-class self-consistency residual at this root.
    pub residual: f64,
    /// Goodness label by BER order.
    pub class: BranchClass,
}

/// All solution branches at one operating point, ordered by BER.
#[derive(Debug, Clone)]
pub struct ReplicaSolution {
    /// Channel load the system was solved at.
    pub alpha: f64,
    /// Noise level the system was solved at.
    pub sigma: f64,
    /// Branches sorted by average BER, lowest first.
    pub branches: Vec<ReplicaBranch>,
}

impl ReplicaSolution {
    /// Number of distinct solution branches.
    pub fn solution_count(&self) -> usize {
        self.branches.len()
    }

    /// The lowest-BER branch (always present).
    pub fn good(&self) -> &ReplicaBranch {
        &self.branches[0]
    }

    /// The highest-BER branch (same as `good` when unique).
    pub fn worst(&self) -> &ReplicaBranch {
        self.branches.last().expect("at least one branch")
    }
}

/// Finds every fixed point of the large-system BER equations at load `alpha`
/// and noise `sigma` (zero noise uses a dedicated limiting path).
pub fn replica_ber(
    dist: &EnergyDistribution,
    alpha: f64,
    sigma: f64,
) -> Result<ReplicaSolution> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidConfig("channel load must be positive".into()));
    }
    if !(sigma >= 0.0) {
        return Err(Error::InvalidConfig(
            "noise level must be nonnegative".into(),
        ));
    }
    let s2 = sigma * sigma;
    // Each class BER is at most 1/2, so s = 4a E[A^2 p] <= 2a E[A^2].
    let s_max = 2.0 * alpha * dist.mean_energy();
    let g = |s: f64| 4.0 * alpha * dist.expect(|a| a * a * q_function(a / (s2 + s).sqrt())) - s;

    let mut roots: Vec<f64> = Vec::new();
    if sigma == 0.0 {
        // Interference-free branch: with s = 0 every class sees no noise and
        // no interference, so p = 0 identically.
        roots.push(0.0);
    }
    let scan_lo = if sigma == 0.0 { s_max / GRID_POINTS as f64 } else { 0.0 };
    if sigma == 0.0 && g(scan_lo) > 0.0 {
        // At extreme loads the map turns positive below the first grid node;
        // the crossing between 0+ and the node would otherwise be missed.
        roots.push(bisect(&g, s_max * 1e-15, scan_lo));
    }
    bracket_roots(&g, scan_lo, s_max, &mut roots);
    refine_tangencies(&g, scan_lo, s_max, &mut roots);
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut branches: Vec<ReplicaBranch> = roots
        .iter()
        .map(|&s| make_branch(dist, alpha, s2, s))
        .collect();
    branches.sort_by(|a, b| a.avg_ber.partial_cmp(&b.avg_ber).unwrap());
    let count = branches.len();
    for (i, br) in branches.iter_mut().enumerate() {
        br.class = if i == 0 {
            BranchClass::Good
        } else if i + 1 == count {
            BranchClass::Bad
        } else {
            BranchClass::Marginal
        };
    }
    Ok(ReplicaSolution {
        alpha,
        sigma,
        branches,
    })
}

/// Scans the grid for sign changes and bisects each bracket to convergence.
fn bracket_roots(g: &impl Fn(f64) -> f64, lo: f64, hi: f64, roots: &mut Vec<f64>) {
    let n = GRID_POINTS;
    let mut prev_s = lo;
    let mut prev_g = g(prev_s);
    if prev_g == 0.0 && lo > 0.0 {
        roots.push(lo);
    }
    for i in 1..=n {
        let s = lo + (hi - lo) * i as f64 / n as f64;
        let gs = g(s);
        if (prev_g < 0.0) != (gs < 0.0) {
            roots.push(bisect(g, prev_s, s));
        }
        prev_s = s;
        prev_g = gs;
    }
}

/// Bisection to floating-point resolution inside a sign-change bracket.
fn bisect(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let neg_at_lo = g(lo) < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (g(mid) < 0.0) == neg_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Detects tangent roots: grid-local extrema that graze zero without a sign
/// change, plus slivers narrower than the grid spacing (two roots inside one
/// cell), which are split and bracketed individually.
fn refine_tangencies(
    g: &impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    roots: &mut Vec<f64>,
) {
    let n = GRID_POINTS;
    let step = (hi - lo) / n as f64;
    let tol = TANGENCY_TOL * (1.0 + hi);
    let coarse = 1e-4 * (1.0 + hi);
    let dedup = 1e-6 * (1.0 + hi);
    let vals: Vec<f64> = (0..=n).map(|i| g(lo + step * i as f64)).collect();
    for i in 1..n {
        let maximum = vals[i] > vals[i - 1] && vals[i] >= vals[i + 1];
        let minimum = vals[i] < vals[i - 1] && vals[i] <= vals[i + 1];
        if !maximum && !minimum {
            continue;
        }
        // Only extrema already grazing zero at grid resolution matter.
        if vals[i].abs() > coarse {
            continue;
        }
        let a = lo + step * (i - 1) as f64;
        let b = lo + step * (i + 1) as f64;
        let (s_ext, g_ext) = golden_extremum(g, a, b, maximum);
        if g_ext.abs() <= tol {
            if roots.iter().all(|&r| (r - s_ext).abs() > dedup) {
                roots.push(s_ext);
            }
        } else if (maximum && g_ext > tol && vals[i - 1] < 0.0 && vals[i + 1] < 0.0)
            || (minimum && g_ext < -tol && vals[i - 1] > 0.0 && vals[i + 1] > 0.0)
        {
            // A sliver crossed zero between grid nodes: two distinct roots.
            for r in [bisect(g, a, s_ext), bisect(g, s_ext, b)] {
                if roots.iter().all(|&q| (q - r).abs() > dedup) {
                    roots.push(r);
                }
            }
        }
    }
}

/// Golden-section search for an extremum of `g` on `[a, b]`.
fn golden_extremum(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, maximum: bool) -> (f64, f64) {
    let inv_phi = 0.618_033_988_749_894_8;
    let sign = if maximum { 1.0 } else { -1.0 };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut gc = sign * g(c);
    let mut gd = sign * g(d);
    for _ in 0..90 {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = sign * g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = sign * g(d);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, g(mid))
}

/// Evaluates per-class BERs, efficiency, and the self-consistency residual at
/// an interference root.
fn make_branch(dist: &EnergyDistribution, alpha: f64, s2: f64, s: f64) -> ReplicaBranch {
    let per_class: Vec<f64> = dist
        .classes()
        .iter()
        .map(|&(a, _)| {
            if s2 + s == 0.0 {
                0.0
            } else {
                q_function(a / (s2 + s).sqrt())
            }
        })
        .collect();
    let avg = dist
        .classes()
        .iter()
        .zip(&per_class)
        .map(|(&(_, l), &p)| l * p)
        .sum();
    // Re-substitute the per-class BERs to measure self-consistency.
    let s_back = 4.0
        * alpha
        * dist
            .classes()
            .iter()
            .zip(&per_class)
            .map(|(&(a, l), &p)| l * a * a * p)
            .sum::<f64>();
    let residual = dist
        .classes()
        .iter()
        .zip(&per_class)
        .map(|(&(a, _), &p)| {
            let back = if s2 + s_back == 0.0 {
                0.0
            } else {
                q_function(a / (s2 + s_back).sqrt())
            };
            (p - back).abs()
        })
        .fold(0.0, f64::max);
    let efficiency = if s2 == 0.0 {
        if s == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        s2 / (s2 + s)
    };
    ReplicaBranch {
        interference: s,
        ber_per_class: per_class,
        avg_ber: avg,
        efficiency,
        residual,
        class: BranchClass::Good,
    }
}
