//! Experiment drivers behind the CLI subcommands.
//!
//! Replicas run in parallel, each owning its state and random stream;
//! results are keyed by replica index and sorted before they are returned.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{ExperimentConfig, InitMode};
use super::manifest::RunManifest;
use crate::error::{Error, Result};
use crate::final_density::{self, BetaEstimate, FinalDensity};
use crate::grid::TorusGrid;
use crate::kernel::{build_kernel, DiscreteKernel, KernelShape, KernelSpec};
use crate::meanfield::{self, MeanFieldParams};
use crate::particle::{EpidemicState, TrajectorySample};
use crate::pde::{self, DensityField, PdeConfig};
use crate::profile::{sample_pair, ProfileSpec};
use crate::rng::ReplicaSeed;

/// Seed family of the hydrodynamic sweep and single simulations.
const HYDRO_FAMILY: u64 = 0;

fn critical_family(beta_index: usize) -> u64 {
    1 + beta_index as u64
}

fn kernel_for(config: &ExperimentConfig, side: usize, beta: f64) -> Result<Arc<DiscreteKernel>> {
    let grid = TorusGrid::new(config.dim, side)?;
    Ok(Arc::new(build_kernel(KernelSpec::new(config.kernel, beta), grid)?))
}

/// Quantile by linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

fn exact_counts(config: &ExperimentConfig, n_sites: usize) -> Result<(usize, usize)> {
    match (config.rho0, config.rho1) {
        (ProfileSpec::Constant(a), ProfileSpec::Constant(b)) => {
            Ok(((a * n_sites as f64).round() as usize, (b * n_sites as f64).round() as usize))
        }
        _ => Err(Error::Config("exact-count init needs constant profiles".into())),
    }
}

fn init_state(
    config: &ExperimentConfig,
    kernel: &Arc<DiscreteKernel>,
    rho0: &[f64],
    rho1: &[f64],
    seed: ReplicaSeed,
) -> Result<EpidemicState> {
    match config.init {
        InitMode::Product => EpidemicState::init_random(kernel.clone(), rho0, rho1, seed.rng()),
        InitMode::Exact => {
            let (ns, ni) = exact_counts(config, rho0.len())?;
            EpidemicState::init_exact_counts(kernel.clone(), ns, ni, seed.rng())
        }
    }
}

// ---------------------------------------------------------------------------
// hydrodynamic convergence

#[derive(Debug, Clone, PartialEq)]
pub struct HydroRow {
    pub side: usize,
    pub gamma: f64,
    pub replica: usize,
    pub seed: ReplicaSeed,
    /// `max_{t, G} |<pi^0_t, G> - Riemann(u0(t) G)|`
    pub err_i0: f64,
    /// Same for the infected density.
    pub err_i1: f64,
    pub x0: f64,
    pub y0: f64,
}

impl HydroRow {
    pub fn err(&self) -> f64 {
        self.err_i0.max(self.err_i1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HydroSummary {
    pub side: usize,
    pub gamma: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

/// One trajectory point of replica 0 next to the PDE prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub side: usize,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub x_pde: f64,
    pub y_pde: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HydroSweep {
    pub rows: Vec<HydroRow>,
    pub summary: Vec<HydroSummary>,
    pub curves: Vec<CurvePoint>,
}

impl HydroSweep {
    /// Least-squares slope of `log(median err)` against `log L`.
    pub fn loglog_slope(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .summary
            .iter()
            .map(|s| ((s.side as f64).ln(), s.median.ln()))
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    }
}

fn riemann(grid: &TorusGrid, u: &[f64], g: &[f64]) -> f64 {
    u.iter().zip(g).map(|(a, b)| a * b).sum::<f64>() * grid.cell_volume()
}

pub fn run_hydro_sweep(config: &ExperimentConfig, manifest: &mut RunManifest) -> Result<HydroSweep> {
    let beta = config.beta();
    let times = config.sample_times();
    let tests = config.tests();
    let mut sweep = HydroSweep::default();

    for &side in &config.sides {
        let kernel = kernel_for(config, side, beta)?;
        let grid = kernel.grid();
        let (rho0, rho1) = sample_pair(&grid, &config.rho0, &config.rho1)?;
        let fields = pde::integrate_pde_at(&rho0, &rho1, &kernel, config.dt, &times)?;
        let tables = tests
            .iter()
            .map(|g| g.tabulate(&grid))
            .collect::<Result<Vec<_>>>()?;
        // predicted[t][g] = [Riemann(u0 G), Riemann(u1 G)]
        let predicted: Vec<Vec<[f64; 2]>> = fields
            .iter()
            .map(|f| {
                tables
                    .iter()
                    .map(|g| [riemann(&grid, &f.u0, g), riemann(&grid, &f.u1, g)])
                    .collect()
            })
            .collect();

        let results: Vec<(HydroRow, Vec<TrajectorySample>)> = (0..config.replicas)
            .into_par_iter()
            .map(|replica| {
                let seed = ReplicaSeed::new(config.seed, HYDRO_FAMILY, side, replica);
                let mut state = init_state(config, &kernel, &rho0, &rho1, seed)?;
                let (x0, y0, _) = state.fractions();
                let samples = state.run_sampled(&times, &tests)?;
                let mut err = [0.0f64; 2];
                for (smp, pred) in samples.iter().zip(&predicted) {
                    for (emp, p) in smp.averages.iter().zip(pred) {
                        for i in 0..2 {
                            err[i] = err[i].max((emp[i] - p[i]).abs());
                        }
                    }
                }
                Ok((
                    HydroRow {
                        side,
                        gamma: grid.gamma(),
                        replica,
                        seed,
                        err_i0: err[0],
                        err_i1: err[1],
                        x0,
                        y0,
                    },
                    samples,
                ))
            })
            .collect::<Result<Vec<_>>>()?;

        for (row, _) in &results {
            manifest.record(format!("seed.L{side}.r{}", row.replica), row.seed.stream);
            manifest.record(format!("realized.L{side}.r{}.x0", row.replica), row.x0);
            manifest.record(format!("realized.L{side}.r{}.y0", row.replica), row.y0);
        }
        if let Some((_, samples)) = results.first() {
            for (smp, f) in samples.iter().zip(&fields) {
                sweep.curves.push(CurvePoint {
                    side,
                    t: smp.t,
                    x: smp.x,
                    y: smp.y,
                    x_pde: f.mean_u0(),
                    y_pde: f.mean_u1(),
                });
            }
        }
        let errs = sorted(results.iter().map(|(r, _)| r.err()).collect());
        sweep.summary.push(HydroSummary {
            side,
            gamma: grid.gamma(),
            median: quantile(&errs, 0.5),
            q1: quantile(&errs, 0.25),
            q3: quantile(&errs, 0.75),
        });
        sweep.rows.extend(results.into_iter().map(|(r, _)| r));
    }
    Ok(sweep)
}

// ---------------------------------------------------------------------------
// critical behaviour

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalRow {
    pub beta: f64,
    pub alpha: f64,
    pub side: usize,
    pub replica: usize,
    pub seed: ReplicaSeed,
    pub x_inf: f64,
    pub target: f64,
    pub events: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSummary {
    pub beta: f64,
    pub side: usize,
    pub n_infected: usize,
    /// Realized initial infected fraction `n_infected / L^d`.
    pub y0: f64,
    pub median: f64,
    pub mean: f64,
    pub std: f64,
    pub target: f64,
    /// Mean of `1 - x_inf`.
    pub mean_attack: f64,
    /// `2 gamma^alpha / (1 - beta)` for subcritical `beta`.
    pub attack_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CriticalSweep {
    pub rows: Vec<CriticalRow>,
    pub summary: Vec<CriticalSummary>,
}

/// Limit of `x^gamma(inf)` under `gamma^alpha` seeding: 1 below the
/// threshold, the small-seed root above it.
pub fn critical_target(beta: f64) -> f64 {
    meanfield::hat_x_infinity(beta).value
}

pub fn run_critical_sweep(
    config: &ExperimentConfig,
    manifest: &mut RunManifest,
) -> Result<CriticalSweep> {
    let alpha = config
        .alpha
        .ok_or_else(|| Error::Config("critical sweep needs alpha".into()))?;
    if config.kernel != KernelShape::MeanField {
        return Err(Error::Config("critical sweep runs in the mean-field regime only".into()));
    }
    let mut sweep = CriticalSweep::default();
    for (bi, &beta) in config.betas.iter().enumerate() {
        let target = critical_target(beta);
        for &side in &config.sides {
            let kernel = kernel_for(config, side, beta)?;
            let grid = kernel.grid();
            let n = grid.n_sites();
            let seeded = grid.gamma().powf(alpha) * n as f64;
            let n_infected = (seeded.round() as usize).min(n);
            manifest.record(format!("realized.beta{bi}.L{side}.n_infected"), n_infected);
            manifest.record(
                format!("realized.beta{bi}.L{side}.y0"),
                n_infected as f64 / n as f64,
            );

            let rows: Vec<CriticalRow> = (0..config.replicas)
                .into_par_iter()
                .map(|replica| {
                    let seed = ReplicaSeed::new(config.seed, critical_family(bi), side, replica);
                    let mut state = EpidemicState::init_exact_counts(
                        kernel.clone(),
                        n - n_infected,
                        n_infected,
                        seed.rng(),
                    )?;
                    let fin = state.run_to_absorption();
                    Ok(CriticalRow {
                        beta,
                        alpha,
                        side,
                        replica,
                        seed,
                        x_inf: fin.x_inf,
                        target,
                        events: fin.events,
                    })
                })
                .collect::<Result<Vec<_>>>()?;

            let xs: Vec<f64> = rows.iter().map(|r| r.x_inf).collect();
            let m = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / m;
            let var = if xs.len() > 1 {
                xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0)
            } else {
                0.0
            };
            for r in &rows {
                manifest.record(format!("seed.beta{bi}.L{side}.r{}", r.replica), r.seed.stream);
            }
            sweep.summary.push(CriticalSummary {
                beta,
                side,
                n_infected,
                y0: n_infected as f64 / n as f64,
                median: quantile(&sorted(xs), 0.5),
                mean,
                std: var.sqrt(),
                target,
                mean_attack: 1.0 - mean,
                attack_bound: (beta < 1.0)
                    .then(|| 2.0 * grid.gamma().powf(alpha) / (1.0 - beta)),
            });
            sweep.rows.extend(rows);
        }
    }
    Ok(sweep)
}

/// Solution of the linearisation around the disease-free state under
/// `gamma^alpha` seeding, with the time `t_c` at which `y~` reaches 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linearized {
    pub x: f64,
    pub y: f64,
    pub t_c: f64,
}

pub fn linearized_trajectory(beta: f64, alpha: f64, gamma: f64, t: f64) -> Result<Linearized> {
    if beta == 1.0 {
        return Err(Error::DomainError("the linearisation is degenerate at beta = 1".into()));
    }
    let seed = gamma.powf(alpha);
    let growth = ((beta - 1.0) * t).exp();
    Ok(Linearized {
        y: seed * growth,
        x: 1.0 - beta / (beta - 1.0) * seed * growth + seed / (beta - 1.0),
        t_c: alpha / (beta - 1.0) * (1.0 / gamma).ln(),
    })
}

// ---------------------------------------------------------------------------
// single-run commands

#[derive(Debug, Clone, PartialEq)]
pub struct FinalRow {
    pub replica: usize,
    pub seed: ReplicaSeed,
    pub x_inf: f64,
    pub events: u64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Simulation {
    pub trajectories: Vec<(usize, Vec<TrajectorySample>)>,
    pub finals: Vec<FinalRow>,
}

fn single_side(config: &ExperimentConfig) -> Result<usize> {
    match config.sides.as_slice() {
        [side] => Ok(*side),
        _ => Err(Error::Config("this command takes a single L".into())),
    }
}

/// Replicas sampled on `[0, t_end]` and then run to absorption.
pub fn run_simulation(config: &ExperimentConfig, manifest: &mut RunManifest) -> Result<Simulation> {
    let side = single_side(config)?;
    let kernel = kernel_for(config, side, config.beta())?;
    let (rho0, rho1) = sample_pair(&kernel.grid(), &config.rho0, &config.rho1)?;
    let times = config.sample_times();
    let results = (0..config.replicas)
        .into_par_iter()
        .map(|replica| {
            let start = Instant::now();
            let seed = ReplicaSeed::new(config.seed, HYDRO_FAMILY, side, replica);
            let mut state = init_state(config, &kernel, &rho0, &rho1, seed)?;
            let x0 = state.fractions();
            let samples = state.run_sampled(&times, &[])?;
            let fin = state.run_to_absorption();
            Ok((
                replica,
                x0,
                samples,
                FinalRow {
                    replica,
                    seed,
                    x_inf: fin.x_inf,
                    events: fin.events,
                    wall_ms: start.elapsed().as_secs_f64() * 1e3,
                },
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sim = Simulation::default();
    for (replica, (x0, y0, _), samples, fin) in results {
        manifest.record(format!("seed.L{side}.r{replica}"), fin.seed.stream);
        manifest.record(format!("realized.L{side}.r{replica}.x0"), x0);
        manifest.record(format!("realized.L{side}.r{replica}.y0"), y0);
        sim.trajectories.push((replica, samples));
        sim.finals.push(fin);
    }
    Ok(sim)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdeSummaryRow {
    pub t: f64,
    pub mean_u0: f64,
    pub mean_u1: f64,
    pub max_resid: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PdeRun {
    pub fields: Vec<DensityField>,
    pub summary: Vec<PdeSummaryRow>,
}

pub fn run_pde(config: &ExperimentConfig) -> Result<PdeRun> {
    let side = single_side(config)?;
    let beta = config.beta();
    let kernel = kernel_for(config, side, beta)?;
    let (rho0, rho1) = sample_pair(&kernel.grid(), &config.rho0, &config.rho1)?;
    let pde_cfg = PdeConfig {
        dt: config.dt,
        t_end: config.t_end,
        sample_every: config.sample_every,
    };
    let fields = pde::integrate_pde(&rho0, &rho1, &kernel, &pde_cfg)?;
    let summary = fields
        .iter()
        .map(|f| {
            let r = pde::exp_identity_residual(f, &rho0, &rho1, &kernel, beta)?;
            Ok(PdeSummaryRow {
                t: f.t,
                mean_u0: f.mean_u0(),
                mean_u1: f.mean_u1(),
                max_resid: pde::max_abs(&r),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PdeRun { fields, summary })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FinalRun {
    pub rho0: Vec<f64>,
    pub rho1: Vec<f64>,
    pub solution: FinalDensity,
}

pub fn run_final(config: &ExperimentConfig) -> Result<FinalRun> {
    let side = single_side(config)?;
    let kernel = kernel_for(config, side, config.beta())?;
    let (rho0, rho1) = sample_pair(&kernel.grid(), &config.rho0, &config.rho1)?;
    let solution = final_density::solve_final_density(&rho0, &rho1, &kernel, config.fp_tol)?;
    Ok(FinalRun {
        rho0,
        rho1,
        solution,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldRow {
    pub beta: f64,
    pub rho0: f64,
    pub rho1: f64,
    pub x_inf: f64,
    pub y_peak: Option<f64>,
    pub x_hat: f64,
}

pub fn run_meanfield(config: &ExperimentConfig) -> Result<Vec<MeanFieldRow>> {
    let (rho0, rho1) = match (config.rho0, config.rho1) {
        (ProfileSpec::Constant(a), ProfileSpec::Constant(b)) => (a, b),
        (ProfileSpec::Complement, ProfileSpec::Constant(b)) => (1.0 - b, b),
        (ProfileSpec::Constant(a), ProfileSpec::Complement) => (a, 1.0 - a),
        _ => return Err(Error::Config("meanfield needs constant profiles".into())),
    };
    config
        .betas
        .iter()
        .map(|&beta| {
            let p = MeanFieldParams::new(beta, rho0, rho1)?;
            Ok(MeanFieldRow {
                beta,
                rho0,
                rho1,
                x_inf: meanfield::final_size(&p),
                y_peak: meanfield::peak_infection(&p).map(|pk| pk.y_peak),
                x_hat: meanfield::hat_x_infinity(beta).value,
            })
        })
        .collect()
}

/// Final-density table `site_index,rho0,rho1,rho_final`.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalTable {
    pub rho0: Vec<f64>,
    pub rho1: Vec<f64>,
    pub rho_final: Vec<f64>,
}

impl FinalTable {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().unwrap_or("");
        if header.trim() != "site_index,rho0,rho1,rho_final" {
            return Err(Error::Config(format!("unexpected header {header:?}")));
        }
        let mut rows: Vec<(usize, [f64; 3])> = Vec::new();
        for (k, line) in lines.enumerate() {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = || Error::Config(format!("row {}: cannot parse {line:?}", k + 1));
            if cols.len() != 4 {
                return Err(bad());
            }
            let site: usize = cols[0].parse().map_err(|_| bad())?;
            let mut v = [0.0; 3];
            for (slot, c) in v.iter_mut().zip(&cols[1..]) {
                *slot = c.parse().map_err(|_| bad())?;
            }
            rows.push((site, v));
        }
        rows.sort_by_key(|r| r.0);
        if rows.iter().enumerate().any(|(i, r)| r.0 != i) {
            return Err(Error::Config("site indices must be 0..n without gaps".into()));
        }
        Ok(Self {
            rho0: rows.iter().map(|r| r.1[0]).collect(),
            rho1: rows.iter().map(|r| r.1[1]).collect(),
            rho_final: rows.iter().map(|r| r.1[2]).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferRun {
    pub beta: BetaEstimate,
    pub rho0: Vec<f64>,
    pub rho1: Vec<f64>,
}

/// Infer `beta` on the sites listed with `rho1 = 0`, and the initial profiles
/// under the config's `beta`.
pub fn run_infer(config: &ExperimentConfig, table: &FinalTable) -> Result<InferRun> {
    let side = single_side(config)?;
    let kernel = kernel_for(config, side, config.beta())?;
    kernel.grid().check_len(table.rho_final.len())?;
    let region: Vec<usize> = (0..table.rho1.len()).filter(|&i| table.rho1[i] == 0.0).collect();
    let beta = final_density::infer_beta(&table.rho_final, &kernel, &region)?;
    let (rho0, rho1) = final_density::infer_initial_infected(&table.rho_final, &kernel, config.beta())?;
    Ok(InferRun { beta, rho0, rho1 })
}
