//! Subcommand implementations: run the library operations and shape their
//! results into tables.

use std::path::PathBuf;

use lasmimo::analysis::{
    ame_lower_bound, cutoff_load, cusp_point, enumerate_error_set, parallel_thresholds,
    replica_ber, signal_distance, spinodal_scan, union_bound, BranchClass, DistanceKind,
};
use lasmimo::channel::{
    generate_dense, generate_sparse, sigma_to_snr_db, snr_db_to_sigma, ChannelInstance,
};
use lasmimo::sim::{map_regions_2bit, run_ber, run_bfr, ExperimentConfig};

use crate::config::{
    BoundKindSpec, BoundsSection, CliConfig, Measure, RegionsSection, ReplicaSection,
    SimulateSection,
};
use crate::output::{cell, cell_opt, OutputFormat, Table};

/// Command-line context shared by every subcommand.
pub struct Ctx {
    pub out: PathBuf,
    pub format: OutputFormat,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

/// What a subcommand produced.
pub struct Outcome {
    /// The configuration actually run, overrides included.
    pub effective: CliConfig,
    /// Seed recorded in the manifest.
    pub master_seed: u64,
    /// Tables written.
    pub outputs: Vec<PathBuf>,
    /// True when any cell stopped at its trial cap short of the target
    /// error count.
    pub under_powered: bool,
    /// Human-readable result lines for stdout.
    pub summary: Vec<String>,
}

fn dims_of(exp: &ExperimentConfig) -> Result<(usize, usize, f64), String> {
    let (n, k, _) = exp.channel.dimensions().map_err(|e| e.to_string())?;
    Ok((n, k, k as f64 / n as f64))
}

/// Reported SNR for a row: as configured, or derived from the noise level.
fn row_snr(exp: &ExperimentConfig, snr_db: Option<f64>, sigma: f64) -> Result<f64, String> {
    if let Some(db) = snr_db {
        return Ok(db);
    }
    let (_, k, _) = exp.channel.dimensions().map_err(|e| e.to_string())?;
    let mean = exp.profile.build(k).map_err(|e| e.to_string())?.mean_energy();
    Ok(sigma_to_snr_db(sigma, mean))
}

/// Runs the `[simulate]` section.
pub fn run_simulate(mut section: SimulateSection, ctx: &Ctx) -> Result<Outcome, String> {
    for exp in &mut section.experiment {
        if let Some(seed) = ctx.seed {
            exp.master_seed = seed;
        }
        if let Some(workers) = ctx.workers {
            exp.workers = workers;
        }
    }
    if section.experiment.is_empty() {
        return Err("the [simulate] section lists no experiments".into());
    }
    let master_seed = section.experiment[0].master_seed;

    let mut under_powered = false;
    let mut summary = Vec::new();
    let table = match section.measure {
        Measure::Ber => {
            let mut t = Table::new(
                "ber",
                vec![
                    "detector",
                    "K",
                    "N",
                    "alpha",
                    "snr_db",
                    "ber",
                    "stderr",
                    "bit_errors",
                    "bits",
                    "mean_c",
                    "mean_steps",
                ],
            );
            for exp in &section.experiment {
                let (n, k, alpha) = dims_of(exp)?;
                for row in run_ber(exp).map_err(|e| e.to_string())? {
                    under_powered |= row.under_powered;
                    if row.under_powered {
                        summary.push(format!(
                            "under-powered: {} at snr_db={} stopped at {} errors",
                            row.detector,
                            cell(row_snr(exp, row.snr_db, row.sigma)?),
                            row.bit_errors
                        ));
                    }
                    t.push(vec![
                        row.detector.clone(),
                        k.to_string(),
                        n.to_string(),
                        cell(alpha),
                        cell(row_snr(exp, row.snr_db, row.sigma)?),
                        cell(row.ber),
                        cell(row.std_error),
                        row.bit_errors.to_string(),
                        row.bits_simulated.to_string(),
                        cell(row.mean_flip_rate),
                        cell(row.mean_steps),
                    ]);
                }
            }
            t
        }
        Measure::Bfr => {
            let mut t = Table::new(
                "bfr",
                vec![
                    "detector",
                    "K",
                    "N",
                    "alpha",
                    "snr_db",
                    "trials",
                    "mean_c",
                    "max_c",
                    "mean_steps",
                ],
            );
            for exp in &section.experiment {
                let (n, k, alpha) = dims_of(exp)?;
                for row in run_bfr(exp).map_err(|e| e.to_string())? {
                    t.push(vec![
                        row.detector.clone(),
                        k.to_string(),
                        n.to_string(),
                        cell(alpha),
                        cell(row_snr(exp, row.snr_db, row.sigma)?),
                        row.trials.to_string(),
                        cell(row.mean_c),
                        cell(row.max_c),
                        cell(row.mean_steps),
                    ]);
                }
            }
            t
        }
    };

    let outputs = vec![table.write(&ctx.out, ctx.format)?];
    summary.push(format!("{} rows written", table.rows.len()));
    Ok(Outcome {
        effective: CliConfig {
            simulate: Some(section),
            ..CliConfig::default()
        },
        master_seed,
        outputs,
        under_powered,
        summary,
    })
}

fn class_name(class: BranchClass) -> &'static str {
    match class {
        BranchClass::Good => "good",
        BranchClass::Marginal => "marginal",
        BranchClass::Bad => "bad",
    }
}

/// Runs the `[replica]` section.
pub fn run_replica(section: ReplicaSection, ctx: &Ctx) -> Result<Outcome, String> {
    let dist = section.distribution.build()?;
    let mut outputs = Vec::new();
    let mut summary = Vec::new();

    let noise_grid: Option<Vec<(Option<f64>, f64)>> = match (&section.snr_db, &section.sigma) {
        (Some(_), Some(_)) => {
            return Err("give at most one of replica.snr_db and replica.sigma".into())
        }
        (Some(snrs), None) => Some(
            snrs.iter()
                .map(|&db| (Some(db), snr_db_to_sigma(db, dist.mean_energy())))
                .collect(),
        ),
        (None, Some(sigmas)) => Some(sigmas.iter().map(|&s| (None, s)).collect()),
        (None, None) => None,
    };

    if let (Some(alphas), Some(grid)) = (&section.alphas, &noise_grid) {
        let mut t = Table::new(
            "replica_branches",
            vec![
                "alpha",
                "snr_db",
                "sigma",
                "branch_index",
                "ber",
                "eta",
                "classification",
            ],
        );
        for &alpha in alphas {
            for &(snr_db, sigma) in grid {
                let solution = replica_ber(&dist, alpha, sigma).map_err(|e| e.to_string())?;
                for (i, branch) in solution.branches.iter().enumerate() {
                    t.push(vec![
                        cell(alpha),
                        cell_opt(snr_db),
                        cell(sigma),
                        i.to_string(),
                        cell(branch.avg_ber),
                        cell(branch.efficiency),
                        class_name(branch.class).to_string(),
                    ]);
                }
            }
        }
        summary.push(format!("{} branch rows", t.rows.len()));
        outputs.push(t.write(&ctx.out, ctx.format)?);
    } else if section.alphas.is_some() || noise_grid.is_some() {
        return Err("the branch table needs both replica.alphas and a noise grid".into());
    }

    if let (Some(ar), Some(sr), Some(grid)) =
        (section.alpha_range, section.snr_db_range, section.grid)
    {
        let scan = spinodal_scan(&dist, (ar[0], ar[1]), (sr[0], sr[1]), (grid[0], grid[1]))
            .map_err(|e| e.to_string())?;
        let mut phase = Table::new(
            "replica_phase",
            vec!["alpha", "snr_db", "solution_count", "coexistence"],
        );
        for p in &scan.points {
            phase.push(vec![
                cell(p.alpha),
                cell(p.snr_db),
                p.solution_count.to_string(),
                (p.coexistence as u8).to_string(),
            ]);
        }
        outputs.push(phase.write(&ctx.out, ctx.format)?);

        let mut edges = Table::new(
            "replica_spinodal",
            vec!["snr_db", "alpha_lower", "alpha_upper"],
        );
        for (&(lo, snr), &(hi, _)) in scan.lower_edge.iter().zip(&scan.upper_edge) {
            edges.push(vec![cell(snr), cell(lo), cell(hi)]);
        }
        summary.push(format!(
            "{} phase cells, {} banded rows",
            scan.points.len(),
            scan.lower_edge.len()
        ));
        outputs.push(edges.write(&ctx.out, ctx.format)?);
    } else if section.grid.is_some() {
        return Err("the phase scan needs alpha_range, snr_db_range, and grid".into());
    }

    if section.locate_cusp {
        let (ar, sr) = match (section.alpha_range, section.snr_db_range) {
            (Some(a), Some(s)) => (a, s),
            _ => return Err("locating the corner needs alpha_range and snr_db_range".into()),
        };
        let (alpha, snr_db) = cusp_point(&dist, (ar[0], ar[1]), (sr[0], sr[1]))
            .map_err(|e| e.to_string())?;
        summary.push(format!(
            "spinodal intersection: alpha={}, snr_db={}",
            cell(alpha),
            cell(snr_db)
        ));
    }

    if let Some(sweep) = &section.cutoff_sweep {
        let mut t = Table::new(
            "replica_cutoff",
            vec!["lambda1", "a1", "a2", "alpha_star", "interference"],
        );
        for &a2 in &sweep.a2 {
            let d = crate::config::DistSpec::TwoClass {
                lambda1: sweep.lambda1,
                a1: sweep.a1,
                a2,
            }
            .build()?;
            let (alpha_star, interference) = cutoff_load(&d).map_err(|e| e.to_string())?;
            t.push(vec![
                cell(sweep.lambda1),
                cell(sweep.a1),
                cell(a2),
                cell(alpha_star),
                cell(interference),
            ]);
        }
        summary.push(format!("{} cutoff rows", t.rows.len()));
        outputs.push(t.write(&ctx.out, ctx.format)?);
    }

    if outputs.is_empty() && !section.locate_cusp {
        return Err("the [replica] section requests nothing to compute".into());
    }

    Ok(Outcome {
        effective: CliConfig {
            replica: Some(section),
            ..CliConfig::default()
        },
        master_seed: 0,
        outputs,
        under_powered: false,
        summary,
    })
}

fn bound_kind(spec: BoundKindSpec, ch: &ChannelInstance) -> DistanceKind {
    match spec {
        BoundKindSpec::Gml => DistanceKind::Gml,
        BoundKindSpec::Las => DistanceKind::Las(parallel_thresholds(ch)),
        BoundKindSpec::Lml1 => DistanceKind::Lml1,
    }
}

fn kind_name(spec: BoundKindSpec) -> &'static str {
    match spec {
        BoundKindSpec::Gml => "gml",
        BoundKindSpec::Las => "las",
        BoundKindSpec::Lml1 => "lml1",
    }
}

/// Runs the `[bounds]` section.
pub fn run_bounds(mut section: BoundsSection, ctx: &Ctx) -> Result<Outcome, String> {
    if let Some(seed) = ctx.seed {
        section.seed = seed;
    }
    let (n, k, l) = section.channel.dimensions().map_err(|e| e.to_string())?;
    let profile = section.profile.build(k).map_err(|e| e.to_string())?;
    let ch = match l {
        None => generate_dense(n, k, &profile, 1.0, section.seed),
        Some(l) => generate_sparse(n, k, l, &profile, 1.0, section.seed),
    }
    .map_err(|e| e.to_string())?;

    let bits: Vec<usize> = match &section.bits {
        Some(list) => list.clone(),
        None => (0..k).collect(),
    };
    if section.sigma.iter().any(|&s| s <= 0.0) {
        return Err("bounds.sigma entries must be positive".into());
    }

    let mut t = Table::new(
        "bounds",
        vec![
            "kind",
            "bit",
            "sigma",
            "bound",
            "terms",
            "truncated",
            "min_distance",
            "ame",
        ],
    );
    for &spec in &section.kinds {
        let kind = bound_kind(spec, &ch);
        for &bit in &bits {
            let set = enumerate_error_set(&ch, bit, section.max_weight, true)
                .map_err(|e| e.to_string())?;
            let mut min_distance = f64::INFINITY;
            for e in &set {
                let d = signal_distance(&ch, e, &kind).map_err(|e| e.to_string())?;
                min_distance = min_distance.min(d);
            }
            let ame = match spec {
                BoundKindSpec::Gml => None,
                _ => Some(
                    ame_lower_bound(&ch, bit, &kind, section.max_weight)
                        .map_err(|e| e.to_string())?,
                ),
            };
            for &sigma in &section.sigma {
                let bound = union_bound(&ch, sigma, bit, &kind, section.max_weight)
                    .map_err(|e| e.to_string())?;
                t.push(vec![
                    kind_name(spec).to_string(),
                    bit.to_string(),
                    cell(sigma),
                    cell(bound.value),
                    bound.terms.to_string(),
                    (bound.truncated as u8).to_string(),
                    cell(min_distance),
                    cell_opt(ame),
                ]);
            }
        }
    }

    let rows = t.rows.len();
    let outputs = vec![t.write(&ctx.out, ctx.format)?];
    Ok(Outcome {
        effective: CliConfig {
            bounds: Some(section.clone()),
            ..CliConfig::default()
        },
        master_seed: section.seed,
        outputs,
        under_powered: false,
        summary: vec![format!("{rows} bound rows")],
    })
}

fn pair_str(v: [i8; 2]) -> String {
    v.iter()
        .map(|&s| if s > 0 { '+' } else { '-' })
        .collect()
}

fn set_str(set: &[[i8; 2]]) -> String {
    set.iter()
        .map(|&v| pair_str(v))
        .collect::<Vec<_>>()
        .join(";")
}

/// Runs the `[regions]` section.
pub fn run_regions(section: RegionsSection, ctx: &Ctx) -> Result<Outcome, String> {
    let grid = map_regions_2bit(
        section.rho,
        section.a1,
        section.a2,
        (section.y1_range[0], section.y1_range[1]),
        (section.y2_range[0], section.y2_range[1]),
        (section.grid[0], section.grid[1]),
    )
    .map_err(|e| e.to_string())?;

    let mut t = Table::new("regions", vec!["y1", "y2", "gml", "lml1", "plas"]);
    for (row, &y2) in grid.y2.iter().enumerate() {
        for (col, &y1) in grid.y1.iter().enumerate() {
            let c = grid.cell(row, col);
            t.push(vec![
                cell(y1),
                cell(y2),
                pair_str(c.gml),
                set_str(&c.lml1),
                set_str(&c.plas),
            ]);
        }
    }

    let multi = grid.cells.iter().filter(|c| c.lml1.len() > 1).count();
    let outputs = vec![t.write(&ctx.out, ctx.format)?];
    Ok(Outcome {
        effective: CliConfig {
            regions: Some(section),
            ..CliConfig::default()
        },
        master_seed: 0,
        outputs,
        under_powered: false,
        summary: vec![format!(
            "{} cells mapped, {multi} with multiple one-flip points",
            grid.cells.len()
        )],
    })
}
