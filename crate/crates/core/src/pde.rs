//! The nonlocal hydrodynamic system
//!
//! ```text
//! d/dt u0 = -beta (J * u1) u0
//! d/dt u1 =  beta (J * u1) u0 - u1
//! ```
//!
//! collocated on the particle lattice and advanced with classic RK4. Bounds
//! are never clipped: a step that leaves `0 <= u0`, `0 <= u1 <= 1 - u0`, or
//! increases `u0` or `u0 + u1` by more than [`BOUND_TOL`] is an error.

use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::kernel::DiscreteKernel;
use crate::profile::validate_pair;

/// Largest bound violation tolerated before a step is rejected.
pub const BOUND_TOL: f64 = 1e-6;

/// Largest admissible time step.
pub const MAX_DT: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub grid: TorusGrid,
    pub t: f64,
    /// Survivor (susceptible) density.
    pub u0: Vec<f64>,
    /// Infected density.
    pub u1: Vec<f64>,
}

impl DensityField {
    pub fn mean_u0(&self) -> f64 {
        self.grid.integrate(&self.u0)
    }

    pub fn mean_u1(&self) -> f64 {
        self.grid.integrate(&self.u1)
    }

    pub fn max_u1(&self) -> f64 {
        self.u1.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Keep every `sample_every`-th step (the initial and final fields are
    /// always kept).
    pub sample_every: usize,
}

impl PdeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= MAX_DT) {
            return Err(Error::Config(format!("dt must lie in (0, {MAX_DT}], got {}", self.dt)));
        }
        if !(self.t_end >= 0.0) {
            return Err(Error::Config(format!("t_end must be nonnegative, got {}", self.t_end)));
        }
        if self.sample_every == 0 {
            return Err(Error::Config("sample_every must be positive".into()));
        }
        Ok(())
    }
}

/// Stepper holding the current field and RK4 scratch space.
pub struct PdeIntegrator<'k> {
    kernel: &'k DiscreteKernel,
    beta: f64,
    field: DensityField,
    stage_u0: Vec<f64>,
    stage_u1: Vec<f64>,
    conv: Vec<f64>,
    acc0: Vec<f64>,
    acc1: Vec<f64>,
    k0: Vec<f64>,
    k1: Vec<f64>,
}

impl<'k> PdeIntegrator<'k> {
    pub fn new(kernel: &'k DiscreteKernel, rho0: &[f64], rho1: &[f64]) -> Result<Self> {
        let grid = kernel.grid();
        grid.check_len(rho0.len())?;
        grid.check_len(rho1.len())?;
        validate_pair(rho0, rho1)?;
        let n = grid.n_sites();
        Ok(Self {
            kernel,
            beta: kernel.beta(),
            field: DensityField {
                grid,
                t: 0.0,
                u0: rho0.to_vec(),
                u1: rho1.to_vec(),
            },
            stage_u0: vec![0.0; n],
            stage_u1: vec![0.0; n],
            conv: vec![0.0; n],
            acc0: vec![0.0; n],
            acc1: vec![0.0; n],
            k0: vec![0.0; n],
            k1: vec![0.0; n],
        })
    }

    pub fn field(&self) -> &DensityField {
        &self.field
    }

    pub fn into_field(self) -> DensityField {
        self.field
    }

    /// Evaluate the vector field at `(stage_u0, stage_u1)` into `(k0, k1)`.
    fn eval_stage(&mut self) {
        self.kernel.convolve_into(&self.stage_u1, &mut self.conv);
        for i in 0..self.conv.len() {
            let inf = self.beta * self.conv[i] * self.stage_u0[i];
            self.k0[i] = -inf;
            self.k1[i] = inf - self.stage_u1[i];
        }
    }

    /// One RK4 step of size `h`.
    pub fn step(&mut self, h: f64) -> Result<()> {
        const NODES: [f64; 3] = [0.5, 0.5, 1.0];
        const WEIGHTS: [f64; 4] = [1.0, 2.0, 2.0, 1.0];

        self.stage_u0.copy_from_slice(&self.field.u0);
        self.stage_u1.copy_from_slice(&self.field.u1);
        self.acc0.iter_mut().for_each(|a| *a = 0.0);
        self.acc1.iter_mut().for_each(|a| *a = 0.0);
        for stage in 0..4 {
            self.eval_stage();
            for i in 0..self.k0.len() {
                self.acc0[i] += WEIGHTS[stage] * self.k0[i];
                self.acc1[i] += WEIGHTS[stage] * self.k1[i];
            }
            if stage < 3 {
                let c = NODES[stage] * h;
                for i in 0..self.k0.len() {
                    self.stage_u0[i] = self.field.u0[i] + c * self.k0[i];
                    self.stage_u1[i] = self.field.u1[i] + c * self.k1[i];
                }
            }
        }
        let t_new = self.field.t + h;
        for i in 0..self.acc0.len() {
            let old0 = self.field.u0[i];
            let old_v = old0 + self.field.u1[i];
            let new0 = old0 + h / 6.0 * self.acc0[i];
            let new1 = self.field.u1[i] + h / 6.0 * self.acc1[i];
            let violation = if new0 > old0 + BOUND_TOL {
                Some(format!("u0 increased from {old0} to {new0}"))
            } else if !(-BOUND_TOL..=1.0 + BOUND_TOL).contains(&new0) {
                Some(format!("u0 = {new0} outside [0, 1]"))
            } else if new1 < -BOUND_TOL || new0 + new1 > 1.0 + BOUND_TOL {
                Some(format!("u1 = {new1} outside [0, 1 - u0] with u0 = {new0}"))
            } else if new0 + new1 > old_v + BOUND_TOL {
                Some(format!("u0 + u1 increased from {old_v} to {}", new0 + new1))
            } else {
                None
            };
            if let Some(detail) = violation {
                return Err(Error::StabilityViolation {
                    t: t_new,
                    site: i,
                    detail,
                });
            }
            self.field.u0[i] = new0;
            self.field.u1[i] = new1;
        }
        self.field.t = t_new;
        Ok(())
    }

    /// Advance to time `t` with equal steps no larger than `dt`.
    pub fn advance_to(&mut self, t: f64, dt: f64) -> Result<()> {
        let span = t - self.field.t;
        if span <= 0.0 {
            return Ok(());
        }
        let steps = (span / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        let t0 = self.field.t;
        for k in 0..steps {
            self.step(h)?;
            self.field.t = t0 + (k + 1) as f64 * h;
        }
        self.field.t = t;
        Ok(())
    }
}

/// Integrate from `(rho0, rho1)` to `config.t_end`, keeping every
/// `sample_every`-th step.
pub fn integrate_pde(
    rho0: &[f64],
    rho1: &[f64],
    kernel: &DiscreteKernel,
    config: &PdeConfig,
) -> Result<Vec<DensityField>> {
    config.validate()?;
    let mut integ = PdeIntegrator::new(kernel, rho0, rho1)?;
    let steps = (config.t_end / config.dt).round() as usize;
    let mut out = vec![integ.field().clone()];
    for k in 1..=steps {
        integ.step(config.dt)?;
        integ.field.t = k as f64 * config.dt;
        if k % config.sample_every == 0 || k == steps {
            out.push(integ.field().clone());
        }
    }
    Ok(out)
}

/// Fields at the given nondecreasing times, using steps no larger than `dt`.
pub fn integrate_pde_at(
    rho0: &[f64],
    rho1: &[f64],
    kernel: &DiscreteKernel,
    dt: f64,
    times: &[f64],
) -> Result<Vec<DensityField>> {
    PdeConfig {
        dt,
        t_end: 0.0,
        sample_every: 1,
    }
    .validate()?;
    if times.iter().any(|&t| t < 0.0) || times.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::DomainError("times must be nonnegative and nondecreasing".into()));
    }
    let mut integ = PdeIntegrator::new(kernel, rho0, rho1)?;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        integ.advance_to(t, dt)?;
        out.push(integ.field().clone());
    }
    Ok(out)
}

/// Residual of the exponential identity
/// `u0(t) = rho0 exp(-beta J*(rho0 + rho1) + beta J*(u0 + u1)(t))`
/// at every site.
pub fn exp_identity_residual(
    field: &DensityField,
    rho0: &[f64],
    rho1: &[f64],
    kernel: &DiscreteKernel,
    beta: f64,
) -> Result<Vec<f64>> {
    let v0: Vec<f64> = rho0.iter().zip(rho1).map(|(a, b)| a + b).collect();
    let vt: Vec<f64> = field.u0.iter().zip(&field.u1).map(|(a, b)| a + b).collect();
    let j_v0 = kernel.convolve(&v0)?;
    let j_vt = kernel.convolve(&vt)?;
    Ok((0..field.u0.len())
        .map(|i| field.u0[i] - rho0[i] * (beta * (j_vt[i] - j_v0[i])).exp())
        .collect())
}

pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Approximation of the final survivor density by integrating until the
/// infected density is uniformly small.
#[derive(Debug, Clone, PartialEq)]
pub struct LongTimeLimit {
    /// Field at the stopping time; `u0` approximates the final density.
    pub field: DensityField,
    /// Whether `u0 >= rho0 exp(-beta J*(rho0 + rho1))` holds at every site.
    pub lower_bound_holds: bool,
    pub horizon: f64,
}

/// Horizon after which [`long_time_limit`] gives up.
pub fn horizon_cap(beta: f64) -> f64 {
    if beta < 1.0 {
        50.0 * (1.0 / (1.0 - beta)).max(1.0)
    } else {
        200.0
    }
}

pub fn long_time_limit(
    rho0: &[f64],
    rho1: &[f64],
    kernel: &DiscreteKernel,
    config: &PdeConfig,
    u1_tol: f64,
) -> Result<LongTimeLimit> {
    config.validate()?;
    if !(u1_tol > 0.0) {
        return Err(Error::Config(format!("u1_tol must be positive, got {u1_tol}")));
    }
    let beta = kernel.beta();
    let horizon = horizon_cap(beta);
    let mut integ = PdeIntegrator::new(kernel, rho0, rho1)?;
    let mut k = 0u64;
    while integ.field().max_u1() >= u1_tol {
        if integ.field().t >= horizon {
            return Err(Error::HorizonExceeded {
                horizon,
                max_u1: integ.field().max_u1(),
            });
        }
        integ.step(config.dt)?;
        k += 1;
        integ.field.t = k as f64 * config.dt;
    }
    let field = integ.into_field();
    let v0: Vec<f64> = rho0.iter().zip(rho1).map(|(a, b)| a + b).collect();
    let j_v0 = kernel.convolve(&v0)?;
    let lower_bound_holds = field
        .u0
        .iter()
        .zip(rho0)
        .zip(&j_v0)
        .all(|((&u, &r0), &jv)| u >= r0 * (-beta * jv).exp() - 1e-12);
    Ok(LongTimeLimit {
        field,
        lower_bound_holds,
        horizon,
    })
}
