use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use prefchoice::analytic::{tau_exponent, MuKProfile};
use prefchoice::constants::{FIT_MIN_TAIL_COUNT, RNG_NAME, WEIGHT_DRIFT_CHECK_INTERVAL, WEIGHT_DRIFT_TOL};
use prefchoice::growth::{run_with_rng, seeded_rng};
use prefchoice::stats::{binomial_se, condensation_diagnostic, fit_power_law};
use prefchoice::{AnalyticModel, Maximizers, ModelParams, Phase, SnapshotStats};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{create_dir, opt, write_csv, write_json, Provenance, Table};

pub const PSI_COLUMNS: [&str; 3] = ["step", "x", "psi_empirical"];
pub const CCDF_COLUMNS: [&str; 4] = ["step", "k", "count", "fraction"];
pub const LOCAL_GRID_COLUMNS: [&str; 6] = ["step", "x", "k", "count", "bin_count", "fraction"];
pub const DIAGNOSTICS_COLUMNS: [&str; 4] = ["step", "vertex_count", "max_degree", "max_degree_ratio"];
pub const KERNEL_COLUMNS: [&str; 3] = ["x", "k", "mu_cdf"];
pub const COMPARE_COLUMNS: [&str; 7] = ["x", "k", "empirical", "analytic", "abs_error", "se", "bin_count"];
pub const SWEEP_COLUMNS: [&str; 3] = ["alpha", "tau_hat", "tau_analytic"];

fn provenance(config: &ExperimentConfig) -> Provenance {
    Provenance {
        config_hash: config.hash(),
        seed: config.params.seed,
    }
}

fn grid_points(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| i as f64 / (n - 1) as f64)
}

fn bin_centers(bins: usize) -> impl Iterator<Item = f64> {
    (0..bins).map(move |b| (b as f64 + 0.5) / bins as f64)
}

pub fn replica_dir(out: &Path, replica: usize) -> PathBuf {
    out.join("simulate").join(format!("replica_{replica:03}"))
}

fn phase_error(dir: &Path, prov: &Provenance, model: &AnalyticModel, what: &str) -> CliResult<()> {
    let err = CliError::Phase {
        alpha: model.alpha(),
        alpha_c: model.alpha_c(),
        phase: model.phase(),
        what: what.to_string(),
    };
    let mut fields = Map::new();
    fields.insert("error".into(), json!("phase"));
    fields.insert("phase".into(), json!(model.phase().as_str()));
    fields.insert("alpha".into(), json!(model.alpha()));
    fields.insert("alpha_c".into(), json!(model.alpha_c()));
    fields.insert("message".into(), json!(err.to_string()));
    write_json(&dir.join("error.json"), prov, fields)?;
    Err(err)
}

/// Writes the analytic curves to `<out>/analyze/`.
pub fn analyze(config: &ExperimentConfig, out: &Path) -> CliResult<()> {
    let prov = provenance(config);
    let dir = out.join("analyze");
    create_dir(&dir)?;
    let model = AnalyticModel::new(config.params.choice.clone(), config.params.alpha)?;

    write_csv(
        &dir.join("f_curve.csv"),
        &prov,
        &["x", "f"],
        grid_points(config.x_grid).map(|x| [x.to_string(), model.density(x).to_string()]),
    )?;

    let mut fields = Map::new();
    fields.insert("alpha".into(), json!(model.alpha()));
    fields.insert("alpha_c".into(), json!(model.alpha_c()));
    fields.insert("f_max".into(), json!(model.f_max()));
    let (points, constant) = match model.maximizers() {
        Maximizers::Points(p) => (p.clone(), false),
        Maximizers::Everywhere => (Vec::new(), true),
    };
    fields.insert("maximizers".into(), json!(points));
    fields.insert("f_constant".into(), json!(constant));
    fields.insert("phase".into(), json!(model.phase().as_str()));
    fields.insert("tau".into(), json!(model.tau().ok()));
    write_json(&dir.join("phase.json"), &prov, fields)?;

    if model.phase() == Phase::Condensation {
        return phase_error(&dir, &prov, &model, "Psi and the degree kernel are");
    }
    let psi = grid_points(config.x_grid)
        .map(|x| Ok([x.to_string(), model.psi(x)?.psi.to_string()]))
        .collect::<prefchoice::Result<Vec<_>>>()?;
    write_csv(&dir.join("psi_curve.csv"), &prov, &["x", "psi"], psi)?;

    if model.phase() == Phase::Critical {
        return phase_error(&dir, &prov, &model, "the degree kernel is");
    }
    let mut kernel = Vec::with_capacity(config.bins * config.k_list.len());
    for x in bin_centers(config.bins) {
        for &k in &config.k_list {
            kernel.push([x.to_string(), k.to_string(), model.kernel_cdf(k, x)?.to_string()]);
        }
    }
    write_csv(&dir.join("kernel_grid.csv"), &prov, &KERNEL_COLUMNS, kernel)?;

    let profile = MuKProfile::new(&model, config.panels)?;
    let saddle_valid = model.saddle_point_constant().is_ok();
    write_csv(
        &dir.join("mu_k.csv"),
        &prov,
        &["k", "mu_k", "saddle"],
        (1..=config.mu_k_max).map(|k| {
            let saddle = if saddle_valid { model.saddle_point_mu_k(k).ok() } else { None };
            [k.to_string(), profile.mu_k(k).to_string(), opt(saddle)]
        }),
    )
}

fn simulate_replica(config: &ExperimentConfig, out: &Path, replica: usize) -> CliResult<()> {
    let prov = provenance(config);
    let dir = replica_dir(out, replica);
    create_dir(&dir)?;
    let mut rng = seeded_rng(config.params.seed, replica as u64);
    let start = Instant::now();
    let snaps = run_with_rng(&config.params, &config.snapshots, &mut rng)?;
    let elapsed = start.elapsed().as_secs_f64();
    write_snapshots(&dir, &prov, config, &snaps)?;

    let p = &config.params;
    let last = snaps.last().expect("schedule is nonempty");
    let mut fields = Map::new();
    fields.insert("replica".into(), json!(replica));
    fields.insert("stream".into(), json!(replica));
    fields.insert("rng".into(), json!(RNG_NAME));
    fields.insert("xi".into(), json!(p.choice.to_string()));
    fields.insert("alpha".into(), json!(p.alpha));
    fields.insert("n0".into(), json!(p.n0));
    fields.insert("steps".into(), json!(p.steps));
    fields.insert("initial_tree".into(), json!(format!("{:?}", p.initial_tree)));
    fields.insert("final_step".into(), json!(last.step()));
    fields.insert("final_vertex_count".into(), json!(last.vertex_count()));
    fields.insert("elapsed_seconds".into(), json!(elapsed));
    fields.insert("weight_drift_tol".into(), json!(WEIGHT_DRIFT_TOL));
    fields.insert("weight_drift_check_interval".into(), json!(WEIGHT_DRIFT_CHECK_INTERVAL));
    write_json(&dir.join("metadata.json"), &prov, fields)
}

fn write_snapshots(
    dir: &Path,
    prov: &Provenance,
    config: &ExperimentConfig,
    snaps: &[SnapshotStats],
) -> CliResult<()> {
    let mut psi = Vec::new();
    let mut ccdf = Vec::new();
    let mut grid_rows = Vec::new();
    for snap in snaps {
        let step = snap.step().to_string();
        for x in grid_points(config.x_grid) {
            psi.push([step.clone(), x.to_string(), snap.psi_empirical(x).to_string()]);
        }
        for p in snap.degree_ccdf() {
            ccdf.push([step.clone(), p.k.to_string(), p.count.to_string(), p.fraction.to_string()]);
        }
        let grid = snap.local_degree_grid(config.bins, &config.k_list)?;
        for b in 0..grid.bins {
            for (j, &k) in grid.k_list.iter().enumerate() {
                grid_rows.push([
                    step.clone(),
                    grid.bin_center(b).to_string(),
                    k.to_string(),
                    grid.counts_at_most[b][j].to_string(),
                    grid.bin_counts[b].to_string(),
                    opt(grid.fraction(b, j)),
                ]);
            }
        }
    }
    write_csv(&dir.join("psi_empirical.csv"), prov, &PSI_COLUMNS, psi)?;
    write_csv(&dir.join("degree_ccdf.csv"), prov, &CCDF_COLUMNS, ccdf)?;
    write_csv(&dir.join("local_grid.csv"), prov, &LOCAL_GRID_COLUMNS, grid_rows)?;
    let ratios = condensation_diagnostic(snaps)?;
    write_csv(
        &dir.join("diagnostics.csv"),
        prov,
        &DIAGNOSTICS_COLUMNS,
        snaps.iter().zip(ratios).map(|(s, ratio)| {
            [
                s.step().to_string(),
                s.vertex_count().to_string(),
                s.max_degree().to_string(),
                ratio.to_string(),
            ]
        }),
    )
}

/// Grows every replica and writes `<out>/simulate/replica_XXX/`.
pub fn simulate(config: &ExperimentConfig, out: &Path) -> CliResult<()> {
    create_dir(&out.join("simulate"))?;
    (0..config.replicas)
        .into_par_iter()
        .map(|replica| simulate_replica(config, out, replica))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Pooled degree CCDF at one step: `k -> #{deg >= k}` summed over replicas, and the vertex total.
#[derive(Debug, Default)]
struct PooledCcdf {
    counts: BTreeMap<u64, u64>,
    vertices: u64,
}

impl PooledCcdf {
    fn add(&mut self, k: u64, count: u64) {
        if k == 1 {
            self.vertices += count;
        }
        *self.counts.entry(k).or_default() += count;
    }

    fn fit(&self, config: &ExperimentConfig) -> Result<prefchoice::PowerLawFit, String> {
        let k_max = config.fit_k_max.unwrap_or_else(|| {
            self.counts
                .iter()
                .rev()
                .find(|(_, &c)| c >= FIT_MIN_TAIL_COUNT)
                .map_or(0, |(&k, _)| k)
        });
        let points: Vec<(u64, f64)> = self
            .counts
            .iter()
            .map(|(&k, &c)| (k, c as f64 / self.vertices as f64))
            .collect();
        fit_power_law(&points, config.params.alpha, config.fit_k_min, k_max).map_err(|e| e.to_string())
    }
}

fn pool_ccdf(tables: &[Table], step: &str) -> CliResult<PooledCcdf> {
    let mut pooled = PooledCcdf::default();
    for table in tables {
        let (s, k, c) = (table.column("step"), table.column("k"), table.column("count"));
        for row in 0..table.rows.len() {
            if table.rows[row][s] == step {
                pooled.add(table.parse(row, k)?, table.parse(row, c)?);
            }
        }
    }
    Ok(pooled)
}

/// Joins the analytic kernel with the pooled empirical grid at the final step
/// and fits the pooled degree CCDF.
pub fn compare(config: &ExperimentConfig, out: &Path) -> CliResult<()> {
    let prov = provenance(config);
    let hash = prov.config_hash.clone();
    let kernel = Table::read_checked(&out.join("analyze").join("kernel_grid.csv"), &hash, &KERNEL_COLUMNS)?;
    let step = config.final_step().to_string();

    let mut grids = Vec::new();
    let mut ccdfs = Vec::new();
    let mut psis = Vec::new();
    for replica in 0..config.replicas {
        let dir = replica_dir(out, replica);
        grids.push(Table::read_checked(&dir.join("local_grid.csv"), &hash, &LOCAL_GRID_COLUMNS)?);
        ccdfs.push(Table::read_checked(&dir.join("degree_ccdf.csv"), &hash, &CCDF_COLUMNS)?);
        psis.push(Table::read_checked(&dir.join("psi_empirical.csv"), &hash, &PSI_COLUMNS)?);
    }

    // (x, k) -> (count, bin_count) pooled over replicas
    let mut pooled: BTreeMap<(String, String), (u64, u64)> = BTreeMap::new();
    for table in &grids {
        let [s, x, k, c, n] = ["step", "x", "k", "count", "bin_count"].map(|name| table.column(name));
        for row in 0..table.rows.len() {
            let r = &table.rows[row];
            if r[s] != step {
                continue;
            }
            let cell = pooled.entry((r[x].clone(), r[k].clone())).or_default();
            cell.0 += table.parse::<u64>(row, c)?;
            cell.1 += table.parse::<u64>(row, n)?;
        }
    }
    if pooled.is_empty() {
        return Err(CliError::MissingInput {
            path: replica_dir(out, 0).join("local_grid.csv"),
            reason: format!("no rows at step {step}"),
        });
    }
    let mut rows = Vec::with_capacity(kernel.rows.len());
    for row in 0..kernel.rows.len() {
        let r = &kernel.rows[row];
        let analytic: f64 = kernel.parse(row, 2)?;
        let key = (r[0].clone(), r[1].clone());
        let &(count, bin_count) = pooled.get(&key).ok_or_else(|| CliError::MissingInput {
            path: replica_dir(out, 0).join("local_grid.csv"),
            reason: format!("no empirical cell for x = {}, k = {}", key.0, key.1),
        })?;
        let (empirical, error, se) = if bin_count == 0 {
            (None, None, None)
        } else {
            let p = count as f64 / bin_count as f64;
            (Some(p), Some((p - analytic).abs()), Some(binomial_se(p, bin_count)))
        };
        rows.push([
            key.0,
            key.1,
            opt(empirical),
            analytic.to_string(),
            opt(error),
            opt(se),
            bin_count.to_string(),
        ]);
    }
    write_csv(&out.join("compare_grid.csv"), &prov, &COMPARE_COLUMNS, rows)?;

    let model = AnalyticModel::new(config.params.choice.clone(), config.params.alpha)?;
    let tau = model.tau()?;
    let mut fields = Map::new();
    fields.insert("step".into(), json!(config.final_step()));
    fields.insert("replicas".into(), json!(config.replicas));
    fields.insert("tau_analytic".into(), json!(tau));
    match pool_ccdf(&ccdfs, &step)?.fit(config) {
        Ok(fit) => {
            fields.insert("tau_hat".into(), json!(fit.tau_hat));
            fields.insert("tau_difference".into(), json!(fit.tau_hat - tau));
            fields.insert("amplitude".into(), json!(fit.amplitude));
            fields.insert("fit_k_min".into(), json!(fit.k_min));
            fields.insert("fit_k_max".into(), json!(fit.k_max));
            fields.insert("fit_points".into(), json!(fit.points));
            fields.insert("residual_rms".into(), json!(fit.residual_rms));
        }
        Err(reason) => {
            for key in ["tau_hat", "tau_difference", "amplitude", "fit_k_min", "fit_k_max", "fit_points", "residual_rms"] {
                fields.insert(key.into(), Value::Null);
            }
            fields.insert("fit_error".into(), json!(reason));
        }
    }
    let mut sup_errors = Vec::with_capacity(psis.len());
    for table in &psis {
        let mut worst: f64 = 0.0;
        for row in 0..table.rows.len() {
            if table.rows[row][0] != step {
                continue;
            }
            let x: f64 = table.parse(row, 1)?;
            let empirical: f64 = table.parse(row, 2)?;
            worst = worst.max((empirical - model.psi(x)?.psi).abs());
        }
        sup_errors.push(worst);
    }
    fields.insert("psi_sup_error_max".into(), json!(sup_errors.iter().copied().fold(0.0, f64::max)));
    fields.insert(
        "psi_sup_error_mean".into(),
        json!(sup_errors.iter().sum::<f64>() / sup_errors.len() as f64),
    );
    write_json(&out.join("fit.json"), &prov, fields)
}

/// One sweep point: `(tau_hat, tau_analytic)`, each `Err` with a reason on failure.
type SweepPoint = (Result<f64, String>, Result<f64, String>);

fn sweep_point(config: &ExperimentConfig, alpha: f64) -> SweepPoint {
    let tau = tau_exponent(&config.params.choice, alpha).map_err(|e| e.to_string());
    if tau.is_err() {
        return (Err("skipped: no power law outside the noncondensation phase".into()), tau);
    }
    let params = ModelParams {
        alpha,
        ..config.params.clone()
    };
    let step = config.final_step();
    let mut pooled = PooledCcdf::default();
    for replica in 0..config.replicas {
        let mut rng = seeded_rng(params.seed, replica as u64);
        match run_with_rng(&params, &[step], &mut rng) {
            Ok(snaps) => {
                for p in snaps[0].degree_ccdf() {
                    pooled.add(p.k, p.count);
                }
            }
            Err(e) => return (Err(e.to_string()), tau),
        }
    }
    let fit = pooled
        .fit(&ExperimentConfig {
            params,
            ..config.clone()
        })
        .map(|f| f.tau_hat);
    (fit, tau)
}

/// Simulates and fits every `alpha`, writing `<out>/sweep/exponent_sweep.csv`
/// and `<out>/sweep/sweep_errors.csv`. Failed points are recorded, not fatal.
pub fn sweep(config: &ExperimentConfig, alphas: &[f64], out: &Path) -> CliResult<()> {
    let prov = provenance(config);
    let dir = out.join("sweep");
    create_dir(&dir)?;
    let results: Vec<SweepPoint> = alphas.par_iter().map(|&a| sweep_point(config, a)).collect();
    let mut rows = Vec::with_capacity(alphas.len());
    let mut errors = Vec::new();
    for (&alpha, (fit, tau)) in alphas.iter().zip(&results) {
        rows.push([alpha.to_string(), opt(fit.clone().ok()), opt(tau.clone().ok())]);
        for (field, result) in [("tau_hat", fit), ("tau_analytic", tau)] {
            if let Err(reason) = result {
                errors.push([alpha.to_string(), field.to_string(), reason.clone()]);
            }
        }
    }
    write_csv(&dir.join("exponent_sweep.csv"), &prov, &SWEEP_COLUMNS, rows)?;
    write_csv(&dir.join("sweep_errors.csv"), &prov, &["alpha", "field", "error"], errors)
}
