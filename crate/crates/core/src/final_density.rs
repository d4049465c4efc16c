//! Final survivor density and the inverse problems built on it.
//!
//! The final density solves
//!
//! ```text
//! rho = rho0 exp(-beta J*(rho0 + rho1 - rho))
//! ```
//!
//! which is found by monotone iteration from the lower bound
//! `rho0 exp(-beta J*(rho0 + rho1))`. The map is increasing in `rho` and sends
//! `[lower, rho0]` into itself, so the iterates increase to the least fixed
//! point above the lower bound.

use crate::error::{Error, Result};
use crate::kernel::DiscreteKernel;
use crate::profile::validate_pair;

pub const MAX_ITERATIONS: usize = 100_000;

/// Slack for the monotonicity and upper-bound checks on the iterates.
const ITERATE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FinalDensity {
    pub rho: Vec<f64>,
    pub iterations: usize,
    /// Max-norm of the last update.
    pub last_update: f64,
}

pub fn solve_final_density(
    rho0: &[f64],
    rho1: &[f64],
    kernel: &DiscreteKernel,
    tol: f64,
) -> Result<FinalDensity> {
    solve_final_density_with(rho0, rho1, kernel, tol, |_, _| {})
}

/// As [`solve_final_density`], calling `observer(n, iterate)` on every
/// iterate including the starting point.
pub fn solve_final_density_with<F: FnMut(usize, &[f64])>(
    rho0: &[f64],
    rho1: &[f64],
    kernel: &DiscreteKernel,
    tol: f64,
    mut observer: F,
) -> Result<FinalDensity> {
    let grid = kernel.grid();
    grid.check_len(rho0.len())?;
    grid.check_len(rho1.len())?;
    validate_pair(rho0, rho1)?;
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    // no infection anywhere: the dynamics never leaves the initial state
    if rho1.iter().all(|&v| v == 0.0) {
        observer(0, rho0);
        return Ok(FinalDensity {
            rho: rho0.to_vec(),
            iterations: 0,
            last_update: 0.0,
        });
    }

    let beta = kernel.beta();
    let v0: Vec<f64> = rho0.iter().zip(rho1).map(|(a, b)| a + b).collect();
    let j_v0 = kernel.convolve(&v0)?;
    let mut rho: Vec<f64> = rho0
        .iter()
        .zip(&j_v0)
        .map(|(&r0, &jv)| r0 * (-beta * jv).exp())
        .collect();
    observer(0, &rho);
    let mut j_rho = vec![0.0; rho.len()];
    let mut update = f64::INFINITY;
    for n in 1..=MAX_ITERATIONS {
        kernel.convolve_into(&rho, &mut j_rho);
        update = 0.0;
        for i in 0..rho.len() {
            let next = rho0[i] * (beta * (j_rho[i] - j_v0[i])).exp();
            debug_assert!(next >= rho[i] - ITERATE_SLACK, "iterate decreased at site {i}");
            debug_assert!(next <= rho0[i] + ITERATE_SLACK, "iterate exceeded rho0 at site {i}");
            update = update.max((next - rho[i]).abs());
            rho[i] = next;
        }
        observer(n, &rho);
        if update < tol {
            return Ok(FinalDensity {
                rho,
                iterations: n,
                last_update: update,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        residual: update,
    })
}

/// Max-norm residual of the fixed-point equation.
pub fn fixed_point_residual(
    rho: &[f64],
    rho0: &[f64],
    rho1: &[f64],
    kernel: &DiscreteKernel,
) -> Result<f64> {
    let beta = kernel.beta();
    let excess: Vec<f64> = (0..rho.len()).map(|i| rho0[i] + rho1[i] - rho[i]).collect();
    let j = kernel.convolve(&excess)?;
    Ok((0..rho.len())
        .map(|i| (rho[i] - rho0[i] * (-beta * j[i]).exp()).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaEstimate {
    /// `(site, estimate)` for every region site; `None` where degenerate.
    pub per_site: Vec<(usize, Option<f64>)>,
    /// Sites where `rho = 1` and `J*(1 - rho) = 0`.
    pub degenerate: Vec<usize>,
    pub mean: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

/// Infection strength from the final density on a region that was initially
/// fully susceptible, assuming `rho0 + rho1 = 1` everywhere:
/// `beta = -ln(rho(r)) / J*(1 - rho)(r)`.
///
/// The kernel's own `beta` is not used.
pub fn infer_beta(rho: &[f64], kernel: &DiscreteKernel, region: &[usize]) -> Result<BetaEstimate> {
    let grid = kernel.grid();
    grid.check_len(rho.len())?;
    let deficit: Vec<f64> = rho.iter().map(|r| 1.0 - r).collect();
    let j = kernel.convolve(&deficit)?;
    let mut per_site = Vec::with_capacity(region.len());
    let mut degenerate = Vec::new();
    let mut valid = Vec::new();
    for &site in region {
        if site >= rho.len() {
            return Err(Error::InconsistentInput {
                site,
                reason: "region site outside the grid".into(),
            });
        }
        let r = rho[site];
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::InconsistentInput {
                site,
                reason: format!("final density {r} outside (0, 1]"),
            });
        }
        if j[site] <= 0.0 {
            if r == 1.0 {
                degenerate.push(site);
                per_site.push((site, None));
                continue;
            }
            return Err(Error::InconsistentInput {
                site,
                reason: format!("density {r} < 1 with no infection pressure"),
            });
        }
        let b = -r.ln() / j[site];
        valid.push(b);
        per_site.push((site, Some(b)));
    }
    let (mean, min, max) = if valid.is_empty() {
        (None, None, None)
    } else {
        (
            Some(valid.iter().sum::<f64>() / valid.len() as f64),
            valid.iter().copied().reduce(f64::min),
            valid.iter().copied().reduce(f64::max),
        )
    };
    Ok(BetaEstimate {
        per_site,
        degenerate,
        mean,
        min,
        max,
    })
}

/// Initial profiles `(rho0, rho1)` with `rho0 + rho1 = 1` that lead to the
/// final density `rho`: `rho0 = rho exp(beta (1 - J*rho))`.
pub fn infer_initial_infected(
    rho: &[f64],
    kernel: &DiscreteKernel,
    beta: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    const FEASIBILITY_TOL: f64 = 1e-9;
    let j = kernel.convolve(rho)?;
    let mut rho0 = Vec::with_capacity(rho.len());
    for (site, (&r, &jr)) in rho.iter().zip(&j).enumerate() {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::InconsistentInput {
                site,
                reason: format!("final density {r} outside (0, 1]"),
            });
        }
        let r0 = r * (beta * (1.0 - jr)).exp();
        if !(-FEASIBILITY_TOL..=1.0 + FEASIBILITY_TOL).contains(&r0) {
            return Err(Error::InconsistentInput {
                site,
                reason: format!("implied rho0 = {r0} outside [0, 1]"),
            });
        }
        rho0.push(r0.clamp(0.0, 1.0));
    }
    let rho1 = rho0.iter().map(|r| 1.0 - r).collect();
    Ok((rho0, rho1))
}
