//! CSV and plot-data writers.
//!
//! Floats are written in scientific notation with 17 significant digits, so
//! every value parses back to the same `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::manifest::RunManifest;
use super::sweeps::{
    CriticalSweep, FinalRun, HydroSweep, InferRun, MeanFieldRow, PdeRun, Simulation,
};
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.txt";

/// Bins of the `x_inf` histograms on `[0, 1]`.
pub const HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub enum Results {
    Empty,
    Hydro(HydroSweep),
    Critical(CriticalSweep),
    Simulation(Simulation),
    Pde(PdeRun),
    Final(FinalRun),
    MeanField(Vec<MeanFieldRow>),
    Infer(InferRun),
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// CSV text from a header and pre-formatted rows.
fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = String::with_capacity(64);
    s.push_str(header);
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

struct Writer<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl Writer<'_> {
    fn put(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }
}

pub fn meanfield_csv(rows: &[MeanFieldRow]) -> String {
    csv(
        "beta,rho0,rho1,x_inf,y_peak,x_hat",
        rows.iter().map(|r| {
            vec![
                fmt_f64(r.beta),
                fmt_f64(r.rho0),
                fmt_f64(r.rho1),
                fmt_f64(r.x_inf),
                fmt_opt(r.y_peak),
                fmt_f64(r.x_hat),
            ]
        }),
    )
}

/// Histogram counts of values in `[0, 1]`; 1 falls in the last bin.
pub fn histogram(values: &[f64], bins: usize) -> Vec<usize> {
    let mut counts = vec![0; bins];
    for &v in values {
        let b = ((v * bins as f64).floor() as isize).clamp(0, bins as isize - 1) as usize;
        counts[b] += 1;
    }
    counts
}

/// Write the manifest and every table of `results` into `out_dir`, creating
/// it if needed. Returns the paths written, manifest last.
pub fn write_outputs(results: &Results, manifest: &RunManifest, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut w = Writer {
        dir: out_dir,
        written: Vec::new(),
    };
    match results {
        Results::Empty => {}
        Results::Hydro(sweep) => write_hydro(&mut w, sweep)?,
        Results::Critical(sweep) => write_critical(&mut w, sweep)?,
        Results::Simulation(sim) => write_simulation(&mut w, sim)?,
        Results::Pde(run) => write_pde(&mut w, run)?,
        Results::Final(run) => {
            let rows = (0..run.rho0.len()).map(|i| {
                vec![
                    i.to_string(),
                    fmt_f64(run.rho0[i]),
                    fmt_f64(run.rho1[i]),
                    fmt_f64(run.solution.rho[i]),
                ]
            });
            w.put("final_density.csv", &csv("site_index,rho0,rho1,rho_final", rows))?;
        }
        Results::MeanField(rows) => w.put("meanfield.csv", &meanfield_csv(rows))?,
        Results::Infer(run) => write_infer(&mut w, run)?,
    }
    w.put(MANIFEST_FILE, &manifest.to_text())?;
    Ok(w.written)
}

fn write_hydro(w: &mut Writer, sweep: &HydroSweep) -> Result<()> {
    w.put(
        "hydro_convergence.csv",
        &csv(
            "L,gamma,replica,err_i0,err_i1",
            sweep.rows.iter().map(|r| {
                vec![
                    r.side.to_string(),
                    fmt_f64(r.gamma),
                    r.replica.to_string(),
                    fmt_f64(r.err_i0),
                    fmt_f64(r.err_i1),
                ]
            }),
        ),
    )?;
    w.put(
        "hydro_err_vs_L.csv",
        &csv(
            "L,gamma,median_err,q1_err,q3_err",
            sweep.summary.iter().map(|s| {
                vec![
                    s.side.to_string(),
                    fmt_f64(s.gamma),
                    fmt_f64(s.median),
                    fmt_f64(s.q1),
                    fmt_f64(s.q3),
                ]
            }),
        ),
    )?;
    w.put(
        "hydro_curves.csv",
        &csv(
            "L,t,x,y,x_pde,y_pde",
            sweep.curves.iter().map(|c| {
                vec![
                    c.side.to_string(),
                    fmt_f64(c.t),
                    fmt_f64(c.x),
                    fmt_f64(c.y),
                    fmt_f64(c.x_pde),
                    fmt_f64(c.y_pde),
                ]
            }),
        ),
    )
}

fn write_critical(w: &mut Writer, sweep: &CriticalSweep) -> Result<()> {
    w.put(
        "critical.csv",
        &csv(
            "beta,alpha,L,replica,seed,x_inf,target",
            sweep.rows.iter().map(|r| {
                vec![
                    fmt_f64(r.beta),
                    fmt_f64(r.alpha),
                    r.side.to_string(),
                    r.replica.to_string(),
                    r.seed.stream.to_string(),
                    fmt_f64(r.x_inf),
                    fmt_f64(r.target),
                ]
            }),
        ),
    )?;
    w.put(
        "critical_summary.csv",
        &csv(
            "beta,L,n_infected,y0,median,mean,std,target,mean_attack,attack_bound",
            sweep.summary.iter().map(|s| {
                vec![
                    fmt_f64(s.beta),
                    s.side.to_string(),
                    s.n_infected.to_string(),
                    fmt_f64(s.y0),
                    fmt_f64(s.median),
                    fmt_f64(s.mean),
                    fmt_f64(s.std),
                    fmt_f64(s.target),
                    fmt_f64(s.mean_attack),
                    fmt_opt(s.attack_bound),
                ]
            }),
        ),
    )?;
    let mut hist = Vec::new();
    for s in &sweep.summary {
        let xs: Vec<f64> = sweep
            .rows
            .iter()
            .filter(|r| r.beta == s.beta && r.side == s.side)
            .map(|r| r.x_inf)
            .collect();
        for (b, count) in histogram(&xs, HISTOGRAM_BINS).into_iter().enumerate() {
            let width = 1.0 / HISTOGRAM_BINS as f64;
            hist.push(vec![
                fmt_f64(s.beta),
                s.side.to_string(),
                fmt_f64(b as f64 * width),
                fmt_f64((b + 1) as f64 * width),
                count.to_string(),
            ]);
        }
    }
    w.put("critical_histogram.csv", &csv("beta,L,bin_lo,bin_hi,count", hist))
}

fn write_simulation(w: &mut Writer, sim: &Simulation) -> Result<()> {
    for (replica, samples) in &sim.trajectories {
        w.put(
            &format!("trajectory_r{replica}.csv"),
            &csv(
                "t,x,y,z,events",
                samples.iter().map(|s| {
                    vec![
                        fmt_f64(s.t),
                        fmt_f64(s.x),
                        fmt_f64(s.y),
                        fmt_f64(s.z),
                        s.events.to_string(),
                    ]
                }),
            ),
        )?;
    }
    w.put(
        "final.csv",
        &csv(
            "replica,seed,x_inf,events,wall_ms",
            sim.finals.iter().map(|f| {
                vec![
                    f.replica.to_string(),
                    f.seed.stream.to_string(),
                    fmt_f64(f.x_inf),
                    f.events.to_string(),
                    fmt_f64(f.wall_ms),
                ]
            }),
        ),
    )
}

fn write_pde(w: &mut Writer, run: &PdeRun) -> Result<()> {
    let mut fields = String::from("t,site_index,u0,u1\n");
    for f in &run.fields {
        let t = fmt_f64(f.t);
        for i in 0..f.u0.len() {
            let _ = writeln!(fields, "{t},{i},{},{}", fmt_f64(f.u0[i]), fmt_f64(f.u1[i]));
        }
    }
    w.put("fields.csv", &fields)?;
    w.put(
        "summary.csv",
        &csv(
            "t,mean_u0,mean_u1,max_resid_poq",
            run.summary.iter().map(|s| {
                vec![
                    fmt_f64(s.t),
                    fmt_f64(s.mean_u0),
                    fmt_f64(s.mean_u1),
                    fmt_f64(s.max_resid),
                ]
            }),
        ),
    )
}

fn write_infer(w: &mut Writer, run: &InferRun) -> Result<()> {
    w.put(
        "infer_beta.csv",
        &csv(
            "site_index,beta",
            run.beta
                .per_site
                .iter()
                .map(|(i, b)| vec![i.to_string(), fmt_opt(*b)]),
        ),
    )?;
    w.put(
        "infer_beta_summary.csv",
        &csv(
            "sites,degenerate,mean,min,max",
            [vec![
                run.beta.per_site.len().to_string(),
                run.beta.degenerate.len().to_string(),
                fmt_opt(run.beta.mean),
                fmt_opt(run.beta.min),
                fmt_opt(run.beta.max),
            ]],
        ),
    )?;
    w.put(
        "infer_initial.csv",
        &csv(
            "site_index,rho0,rho1",
            (0..run.rho0.len())
                .map(|i| vec![i.to_string(), fmt_f64(run.rho0[i]), fmt_f64(run.rho1[i])]),
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ExperimentConfig;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 0.20319, 1e-300, 2.0f64.sqrt()] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn histogram_edges() {
        assert_eq!(histogram(&[0.0, 0.05, 0.999, 1.0], 10), vec![2, 0, 0, 0, 0, 0, 0, 0, 0, 2]);
    }

    #[test]
    fn empty_results_write_manifest_only() {
        let dir = std::env::temp_dir().join(format!("epi-out-{}", std::process::id()));
        let m = RunManifest::new("none", &ExperimentConfig::default());
        let files = write_outputs(&Results::Empty, &m, &dir).unwrap();
        assert_eq!(files, vec![dir.join(MANIFEST_FILE)]);
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn unwritable_dir_reports_path() {
        let m = RunManifest::new("none", &ExperimentConfig::default());
        let err = write_outputs(&Results::Empty, &m, Path::new("/proc/epi-no-such/x")).unwrap_err();
        assert!(err.to_string().contains("/proc/epi-no-such"), "{err}");
    }
}
