use std::sync::Arc;

use episim::experiments::sweeps::{critical_target, quantile};
use episim::experiments::{
    linearized_trajectory, run_critical_sweep, run_final, run_hydro_sweep, run_infer,
    run_meanfield, run_pde, write_outputs, ExperimentConfig, FinalTable, InitMode, Results,
    RunManifest,
};
use episim::kernel::build_kernel;
use episim::observables::TestFunction;
use episim::particle::EpidemicState;
use episim::profile::ProfileSpec;
use episim::rng::ReplicaSeed;
use episim::{Error, KernelShape, KernelSpec, TorusGrid};

fn manifest(config: &ExperimentConfig) -> RunManifest {
    RunManifest::new("test", config)
}

#[test]
fn exact_init_error_at_time_zero_is_rounding() {
    for side in [97, 1000] {
        let config = ExperimentConfig {
            sides: vec![side],
            init: InitMode::Exact,
            rho0: ProfileSpec::Constant(0.987),
            rho1: ProfileSpec::Constant(0.013),
            test_functions: vec![TestFunction::One],
            t_end: 0.0,
            samples: 1,
            replicas: 3,
            ..Default::default()
        };
        let sweep = run_hydro_sweep(&config, &mut manifest(&config)).unwrap();
        let gamma = 1.0 / side as f64;
        for row in &sweep.rows {
            assert!(row.err_i0 <= gamma && row.err_i1 <= gamma, "{row:?}");
            let expect0 = ((0.987 * side as f64).round() / side as f64 - 0.987).abs();
            assert!((row.err_i0 - expect0).abs() < 1e-12);
        }
    }
}

#[test]
fn no_infection_only_sampling_noise() {
    let config = ExperimentConfig {
        sides: vec![500],
        rho0: ProfileSpec::Constant(0.8),
        rho1: ProfileSpec::Constant(0.0),
        replicas: 4,
        samples: 8,
        ..Default::default()
    };
    let sweep = run_hydro_sweep(&config, &mut manifest(&config)).unwrap();
    let x0 = sweep.curves[0].x;
    for c in &sweep.curves {
        assert_eq!(c.x, x0);
        assert_eq!(c.y, 0.0);
        assert!((c.x_pde - 0.8).abs() < 1e-12);
    }
    for row in &sweep.rows {
        assert_eq!(row.err_i1, 0.0);
        assert!(row.err_i0 < 0.1);
    }
}

#[test]
fn no_initial_infected_means_no_epidemic() {
    let k = Arc::new(
        build_kernel(KernelSpec::new(KernelShape::MeanField, 2.0), TorusGrid::new(1, 1000).unwrap()).unwrap(),
    );
    for replica in 0..5 {
        let rng = ReplicaSeed::new(3, 1, 1000, replica).rng();
        let mut s = EpidemicState::init_exact_counts(k.clone(), 1000, 0, rng).unwrap();
        let fin = s.run_to_absorption();
        assert_eq!(fin.x_inf, 1.0);
        assert_eq!(fin.events, 0);
    }
}

#[test]
fn critical_sweep_requires_alpha_and_meanfield() {
    let config = ExperimentConfig::default();
    assert!(matches!(
        run_critical_sweep(&config, &mut manifest(&config)),
        Err(Error::Config(_))
    ));
    let config = ExperimentConfig {
        alpha: Some(0.25),
        kernel: KernelShape::TopHat { radius: 0.1 },
        ..Default::default()
    };
    assert!(matches!(
        run_critical_sweep(&config, &mut manifest(&config)),
        Err(Error::Config(_))
    ));
}

#[test]
fn critical_sweep_records_realized_fraction() {
    let config = ExperimentConfig {
        betas: vec![2.0],
        sides: vec![100],
        alpha: Some(0.25),
        replicas: 2,
        ..Default::default()
    };
    let mut m = manifest(&config);
    let sweep = run_critical_sweep(&config, &mut m).unwrap();
    assert_eq!(sweep.summary[0].n_infected, 32);
    assert!(m.entries.iter().any(|(k, v)| k == "realized.beta0.L100.n_infected" && v == "32"));
    assert_eq!(critical_target(0.5), 1.0);
    assert!((critical_target(2.0) - 0.20319).abs() < 1e-5);
}

#[test]
fn early_growth_tracks_linearisation() {
    let (beta, alpha, side) = (2.0, 0.25, 10_000usize);
    let gamma = 1.0 / side as f64;
    let t_c = linearized_trajectory(beta, alpha, gamma, 0.0).unwrap().t_c;
    assert!((t_c - 0.25 * 1e4f64.ln()).abs() < 1e-12);
    let horizon = t_c - 2.0;
    let times: Vec<f64> = (0..=10).map(|k| horizon * k as f64 / 10.0).collect();
    let k = Arc::new(
        build_kernel(KernelSpec::new(KernelShape::MeanField, beta), TorusGrid::new(1, side).unwrap()).unwrap(),
    );
    let n_inf = (gamma.powf(alpha) * side as f64).round() as usize;
    let mut ys: Vec<Vec<f64>> = vec![Vec::new(); times.len()];
    for replica in 0..20 {
        let rng = ReplicaSeed::new(77, 1, side, replica).rng();
        let mut s = EpidemicState::init_exact_counts(k.clone(), side - n_inf, n_inf, rng).unwrap();
        for (j, smp) in s.run_sampled(&times, &[]).unwrap().iter().enumerate() {
            ys[j].push(smp.y);
        }
    }
    for (j, &t) in times.iter().enumerate() {
        ys[j].sort_by(f64::total_cmp);
        let lin = linearized_trajectory(beta, alpha, gamma, t).unwrap().y;
        let rel = (quantile(&ys[j], 0.5) - lin).abs() / lin;
        assert!(rel <= 0.2, "t = {t}: relative gap {rel}");
    }
}

#[test]
fn single_run_commands_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        kernel: KernelShape::TopHat { radius: 0.1 },
        betas: vec![1.5],
        sides: vec![50],
        rho0: ProfileSpec::Complement,
        rho1: "bump:0.5:0.5:0.1".parse().unwrap(),
        t_end: 1.0,
        sample_every: 250,
        dt: 1e-2,
        ..Default::default()
    };
    let pde = run_pde(&config).unwrap();
    assert!(pde.summary.iter().all(|s| s.max_resid < 1e-6));
    let files = write_outputs(&Results::Pde(pde), &manifest(&config), dir.path()).unwrap();
    let fields = std::fs::read_to_string(&files[0]).unwrap();
    assert!(fields.starts_with("t,site_index,u0,u1\n"));
    let summary = std::fs::read_to_string(&files[1]).unwrap();
    assert!(summary.starts_with("t,mean_u0,mean_u1,max_resid_poq\n"));

    let fin = run_final(&config).unwrap();
    let files = write_outputs(&Results::Final(fin.clone()), &manifest(&config), dir.path()).unwrap();
    let table = FinalTable::read(&files[0]).unwrap();
    assert_eq!(table.rho_final, fin.solution.rho);
    let inferred = run_infer(&config, &table).unwrap();
    assert!((inferred.beta.mean.unwrap() - 1.5).abs() < 1e-6);
    for i in 0..50 {
        assert!((inferred.rho1[i] - fin.rho1[i]).abs() < 1e-8);
    }

    let mf = run_meanfield(&ExperimentConfig {
        betas: vec![0.5, 2.0],
        ..Default::default()
    })
    .unwrap();
    assert_eq!(mf[0].y_peak, None);
    assert!((mf[1].x_inf - 0.1998).abs() < 1e-3);
}

#[test]
fn sweep_tables_have_documented_headers() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        betas: vec![2.0],
        sides: vec![50, 100],
        alpha: Some(0.25),
        replicas: 2,
        t_end: 2.0,
        samples: 4,
        ..Default::default()
    };
    let hydro = run_hydro_sweep(&config, &mut manifest(&config)).unwrap();
    write_outputs(&Results::Hydro(hydro), &manifest(&config), dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("hydro_convergence.csv")).unwrap();
    assert!(text.starts_with("L,gamma,replica,err_i0,err_i1\n"));
    assert_eq!(text.lines().count(), 1 + 4);

    let crit = run_critical_sweep(&config, &mut manifest(&config)).unwrap();
    write_outputs(&Results::Critical(crit), &manifest(&config), dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("critical.csv")).unwrap();
    assert!(text.starts_with("beta,alpha,L,replica,seed,x_inf,target\n"));
    let hist = std::fs::read_to_string(dir.path().join("critical_histogram.csv")).unwrap();
    assert_eq!(hist.lines().count(), 1 + 2 * 20);
}
