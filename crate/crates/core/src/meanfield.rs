//! The space-homogeneous system `x' = -beta x y`, `y' = beta x y - y`.
//!
//! Besides the ODE itself this module holds the closed-form relations of the
//! homogeneous model: the conserved phase curve, the infection peak, the
//! final size `x_inf` and its supercritical small-seed counterpart, and the
//! relations between `rho0`, `beta` and `x_inf` when `rho1 = 1 - rho0`.

use crate::error::{Error, Result};
use crate::roots::bisect;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldParams {
    pub beta: f64,
    pub rho0: f64,
    pub rho1: f64,
}

impl MeanFieldParams {
    pub fn new(beta: f64, rho0: f64, rho1: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::DomainError(format!("beta must be positive, got {beta}")));
        }
        if !(0.0..=1.0).contains(&rho0) || !(0.0..=1.0).contains(&rho1) || rho0 + rho1 > 1.0 + 1e-12
        {
            return Err(Error::DomainError(format!(
                "need rho0, rho1 in [0, 1] with rho0 + rho1 <= 1, got ({rho0}, {rho1})"
            )));
        }
        Ok(Self { beta, rho0, rho1 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// Removed density, `z' = y`.
    pub z: f64,
}

fn rhs(beta: f64, x: f64, y: f64) -> (f64, f64, f64) {
    let inf = beta * x * y;
    (-inf, inf - y, y)
}

fn rk4_step(beta: f64, s: &MeanFieldState, h: f64, t_next: f64) -> MeanFieldState {
    let (a1, b1, c1) = rhs(beta, s.x, s.y);
    let (a2, b2, c2) = rhs(beta, s.x + 0.5 * h * a1, s.y + 0.5 * h * b1);
    let (a3, b3, c3) = rhs(beta, s.x + 0.5 * h * a2, s.y + 0.5 * h * b2);
    let (a4, b4, c4) = rhs(beta, s.x + h * a3, s.y + h * b3);
    MeanFieldState {
        t: t_next,
        x: s.x + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
        y: s.y + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4),
        z: s.z + h / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4),
    }
}

/// Classic RK4 trajectory from `(rho0, rho1, 1 - rho0 - rho1)` with fixed
/// step `dt`, sampled at every step; the last step is shortened to land on
/// `t_end`.
pub fn ode_integrate(params: &MeanFieldParams, dt: f64, t_end: f64) -> Result<Vec<MeanFieldState>> {
    if !(dt > 0.0 && dt <= 0.1) {
        return Err(Error::DomainError(format!("dt must lie in (0, 0.1], got {dt}")));
    }
    if !(t_end >= 0.0) {
        return Err(Error::DomainError(format!("t_end must be nonnegative, got {t_end}")));
    }
    let beta = params.beta;
    let steps = (t_end / dt).ceil() as usize;
    let mut s = MeanFieldState {
        t: 0.0,
        x: params.rho0,
        y: params.rho1,
        z: 1.0 - params.rho0 - params.rho1,
    };
    let mut out = Vec::with_capacity(steps + 1);
    out.push(s);
    for k in 0..steps {
        let (h, t) = if k + 1 == steps {
            (t_end - k as f64 * dt, t_end)
        } else {
            (dt, (k + 1) as f64 * dt)
        };
        s = rk4_step(beta, &s, h, t);
        out.push(s);
    }
    Ok(out)
}

/// Infected density on the conserved curve through `(rho0, rho1)`:
/// `y(x) = -x + ln(x) / beta + rho0 + rho1 - ln(rho0) / beta`.
pub fn phase_curve(params: &MeanFieldParams, x: f64) -> Result<f64> {
    let MeanFieldParams { beta, rho0, rho1 } = *params;
    if !(x > 0.0 && x <= rho0) {
        return Err(Error::DomainError(format!("x must lie in (0, rho0 = {rho0}], got {x}")));
    }
    Ok(-x + x.ln() / beta + rho0 + rho1 - rho0.ln() / beta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Time at which `x` crosses `1 / beta`, located on an RK4 trajectory.
    pub t_peak: f64,
    pub y_peak: f64,
}

/// Step used to locate the peak time.
const PEAK_DT: f64 = 1e-3;

/// Maximum of `y(t)` when the epidemic initially grows, `None` when
/// `rho0 <= 1 / beta` (including the tie, where `y'(0) = 0`).
pub fn peak_infection(params: &MeanFieldParams) -> Option<Peak> {
    let MeanFieldParams { beta, rho0, rho1 } = *params;
    if rho1 <= 0.0 || beta * rho0 <= 1.0 {
        return None;
    }
    let y_peak = rho0 + rho1 - 1.0 / beta - (beta * rho0).ln() / beta;

    let threshold = 1.0 / beta;
    let mut s = MeanFieldState {
        t: 0.0,
        x: rho0,
        y: rho1,
        z: 1.0 - rho0 - rho1,
    };
    let mut t_peak = f64::NAN;
    // crossing time grows like ln(1 / rho1) / (beta rho0 - 1)
    for k in 0..100_000_000u64 {
        let next = rk4_step(beta, &s, PEAK_DT, (k + 1) as f64 * PEAK_DT);
        if next.x <= threshold {
            let frac = (s.x - threshold) / (s.x - next.x);
            t_peak = s.t + frac * (next.t - s.t);
            break;
        }
        s = next;
    }
    Some(Peak { t_peak, y_peak })
}

/// Final susceptible density of the homogeneous system: `rho0` if
/// `rho1 = 0`, `0` if `rho0 = 0`, otherwise the unique root in `(0, rho0)` of
/// `x = rho0 exp(-beta (rho0 + rho1 - x))`.
pub fn final_size(params: &MeanFieldParams) -> f64 {
    let MeanFieldParams { beta, rho0, rho1 } = *params;
    if rho1 == 0.0 {
        return rho0;
    }
    if rho0 == 0.0 {
        return 0.0;
    }
    let f = |x: f64| x - rho0 * (-beta * (rho0 + rho1 - x)).exp();
    bisect(f, 0.0, rho0).expect("f(0) < 0 < f(rho0) whenever rho0, rho1 > 0")
}

/// Root of `x = exp(beta (x - 1))`, with a flag for the degenerate case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallSeedLimit {
    pub value: f64,
    /// `beta <= 1`: the only root in `(0, 1]` is `1`.
    pub degenerate: bool,
}

/// Smallest positive root of `x = exp(beta (x - 1))`.
pub fn hat_x_infinity(beta: f64) -> SmallSeedLimit {
    if beta <= 1.0 {
        return SmallSeedLimit {
            value: 1.0,
            degenerate: true,
        };
    }
    let g = |x: f64| x - (beta * (x - 1.0)).exp();
    match bisect(g, 0.0, 1.0 - 1e-9) {
        Ok(value) => SmallSeedLimit {
            value,
            degenerate: false,
        },
        // beta so close to 1 that the two roots are not separated at 1e-9
        Err(_) => SmallSeedLimit {
            value: 1.0,
            degenerate: true,
        },
    }
}

/// Smallest positive root of `1 = x exp(beta (1 - x))`; `1` for `beta <= 1`.
pub fn xinf_max(beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::DomainError(format!("beta must be positive, got {beta}")));
    }
    if beta <= 1.0 {
        return Ok(1.0);
    }
    let h = |x: f64| 1.0 - x * (beta * (1.0 - x)).exp();
    Ok(bisect(h, 0.0, 1.0 - 1e-9).unwrap_or(1.0))
}

/// Parameter relations of the homogeneous model under `rho1 = 1 - rho0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Relation {
    /// `rho0(x_inf) = x_inf exp(beta (1 - x_inf))` for `x_inf in (0, x_inf^M)`.
    Rho0FromXinf { beta: f64, x_inf: f64 },
    /// `beta(x_inf) = (ln x_inf - ln rho0) / (x_inf - 1)` for `x_inf in (0, rho0)`.
    BetaFromXinf { rho0: f64, x_inf: f64 },
    /// `rho0(beta) = x_inf exp(beta (1 - x_inf))` for
    /// `beta in (0, ln x_inf / (x_inf - 1))`.
    Rho0FromBeta { x_inf: f64, beta: f64 },
}

pub fn invert_relations(relation: Relation) -> Result<f64> {
    let out_of_domain = |what: String| Err(Error::DomainError(what));
    match relation {
        Relation::Rho0FromXinf { beta, x_inf } => {
            let upper = xinf_max(beta)?;
            if !(x_inf > 0.0 && x_inf < upper) {
                return out_of_domain(format!("x_inf = {x_inf} outside (0, {upper})"));
            }
            Ok(x_inf * (beta * (1.0 - x_inf)).exp())
        }
        Relation::BetaFromXinf { rho0, x_inf } => {
            if !(rho0 > 0.0 && rho0 <= 1.0) {
                return out_of_domain(format!("rho0 = {rho0} outside (0, 1]"));
            }
            if !(x_inf > 0.0 && x_inf < rho0) {
                return out_of_domain(format!("x_inf = {x_inf} outside (0, {rho0})"));
            }
            Ok((x_inf.ln() - rho0.ln()) / (x_inf - 1.0))
        }
        Relation::Rho0FromBeta { x_inf, beta } => {
            if !(x_inf > 0.0 && x_inf < 1.0) {
                return out_of_domain(format!("x_inf = {x_inf} outside (0, 1)"));
            }
            let upper = x_inf.ln() / (x_inf - 1.0);
            if !(beta > 0.0 && beta < upper) {
                return out_of_domain(format!("beta = {beta} outside (0, {upper})"));
            }
            Ok(x_inf * (beta * (1.0 - x_inf)).exp())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(beta: f64, rho0: f64, rho1: f64) -> MeanFieldParams {
        MeanFieldParams::new(beta, rho0, rho1).unwrap()
    }

    /// Plain bisection written independently of `roots::bisect`.
    fn oracle(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(lo) < 0.0) == (f(mid) < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn rejects_bad_params() {
        assert!(MeanFieldParams::new(0.0, 0.5, 0.5).is_err());
        assert!(MeanFieldParams::new(1.0, 0.7, 0.4).is_err());
        assert!(MeanFieldParams::new(1.0, -0.1, 0.4).is_err());
    }

    #[test]
    fn trivial_trajectories() {
        for s in ode_integrate(&p(2.0, 0.7, 0.0), 0.01, 5.0).unwrap() {
            assert_eq!((s.x, s.y), (0.7, 0.0));
        }
        for s in ode_integrate(&p(2.0, 0.0, 0.4), 0.01, 5.0).unwrap() {
            assert!((s.y - 0.4 * (-s.t).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn ode_reaches_final_size() {
        let traj = ode_integrate(&p(2.0, 0.99, 0.01), 0.01, 50.0).unwrap();
        let last = traj.last().unwrap();
        assert_eq!(last.t, 50.0);
        assert!((last.x - 0.2).abs() < 1e-3);
        assert!((last.x - final_size(&p(2.0, 0.99, 0.01))).abs() < 1e-4);
        for s in &traj {
            assert!((s.x + s.y + s.z - 1.0).abs() < 1e-9 * (1.0 + s.t));
        }
        assert!(traj.windows(2).all(|w| w[1].x <= w[0].x));
        assert!(ode_integrate(&p(2.0, 0.99, 0.01), 0.2, 1.0).is_err());
    }

    #[test]
    fn phase_curve_values() {
        let q = p(2.0, 0.99, 0.01);
        assert!((phase_curve(&q, 0.99).unwrap() - 0.01).abs() < 1e-15);
        let expect = -0.5 + 0.5 * 0.5f64.ln() + 1.0 - 0.5 * 0.99f64.ln();
        assert!((phase_curve(&q, 0.5).unwrap() - expect).abs() < 1e-15);
        assert!((expect - 0.1584).abs() < 1e-4);
        let xinf = final_size(&q);
        assert!(phase_curve(&q, xinf).unwrap().abs() < 1e-11);
        assert!(phase_curve(&q, 0.0).is_err());
        assert!(phase_curve(&q, 0.995).is_err());
    }

    #[test]
    fn peak_values() {
        assert!(peak_infection(&p(0.5, 0.9, 0.1)).is_none());
        assert!(peak_infection(&p(2.0, 0.5, 0.1)).is_none());
        let q = p(2.0, 0.99, 0.01);
        let peak = peak_infection(&q).unwrap();
        assert!((peak.y_peak - (0.5 - 0.5 * 1.98f64.ln())).abs() < 1e-15);
        assert!((peak.y_peak - 0.1585).abs() < 1e-4);
        let traj = ode_integrate(&q, 1e-3, 20.0).unwrap();
        let top = traj.iter().max_by(|a, b| a.y.total_cmp(&b.y)).unwrap();
        assert!((top.y - peak.y_peak).abs() < 1e-4);
        assert!((top.t - peak.t_peak).abs() < 1e-2);
    }

    #[test]
    fn final_size_values() {
        assert_eq!(final_size(&p(3.0, 0.7, 0.0)), 0.7);
        assert_eq!(final_size(&p(3.0, 0.0, 0.3)), 0.0);
        for (beta, r0, r1, approx) in [(2.0, 0.99, 0.01, 0.1999), (0.5, 0.9, 0.1, 0.824)] {
            let x = final_size(&p(beta, r0, r1));
            let o = oracle(|x| x - r0 * (-beta * (r0 + r1 - x)).exp(), 0.0, r0);
            assert!((x - o).abs() < 1e-12, "{x} vs {o}");
            assert!((x - approx).abs() < 5e-4);
            assert!(x < r0.min(1.0 / beta));
            assert!((x - r0 * (-beta * (r0 + r1 - x)).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn small_seed_limit_values() {
        let two = hat_x_infinity(2.0);
        assert!(!two.degenerate);
        assert!((two.value - 0.20319).abs() < 1e-5);
        let o = oracle(|x| x - (2.0 * (x - 1.0)).exp(), 0.0, 0.9);
        assert!((two.value - o).abs() < 1e-12);
        assert!((hat_x_infinity(1.1).value - 0.8239).abs() < 1e-4);
        for beta in [0.3, 1.0] {
            assert_eq!(hat_x_infinity(beta), SmallSeedLimit { value: 1.0, degenerate: true });
        }
    }

    #[test]
    fn xinf_max_matches_small_seed_limit() {
        assert_eq!(xinf_max(0.8).unwrap(), 1.0);
        for beta in [1.1, 1.5, 2.0, 3.0] {
            let a = xinf_max(beta).unwrap();
            assert!((a - hat_x_infinity(beta).value).abs() < 1e-12, "beta {beta}");
        }
        assert!(xinf_max(0.0).is_err());
    }

    #[test]
    fn relations_round_trip() {
        let r0 = invert_relations(Relation::Rho0FromXinf { beta: 2.0, x_inf: 0.1 }).unwrap();
        assert!((r0 - 0.1 * 1.8f64.exp()).abs() < 1e-15);
        assert!((r0 - 0.6050).abs() < 1e-4);
        assert!((final_size(&p(2.0, r0, 1.0 - r0)) - 0.1).abs() < 1e-9);

        let beta = invert_relations(Relation::BetaFromXinf { rho0: 0.5, x_inf: 0.25 }).unwrap();
        assert!((beta - 2f64.ln() / 0.75).abs() < 1e-15);
        assert!((beta - 0.9242).abs() < 1e-4);
        assert!((final_size(&p(beta, 0.5, 0.5)) - 0.25).abs() < 1e-9);

        let r0 = invert_relations(Relation::Rho0FromBeta { x_inf: 0.3, beta: 1.2 }).unwrap();
        assert!((final_size(&p(1.2, r0, 1.0 - r0)) - 0.3).abs() < 1e-9);

        let tiny = invert_relations(Relation::Rho0FromXinf { beta: 2.0, x_inf: 1e-12 }).unwrap();
        assert!(tiny < 1e-10);
    }

    #[test]
    fn relations_monotone_and_domains() {
        let rho0_of = |x| invert_relations(Relation::Rho0FromXinf { beta: 2.0, x_inf: x }).unwrap();
        assert!(rho0_of(0.05) < rho0_of(0.1) && rho0_of(0.1) < rho0_of(0.2));
        let beta_of = |x| invert_relations(Relation::BetaFromXinf { rho0: 0.8, x_inf: x }).unwrap();
        assert!(beta_of(0.1) > beta_of(0.3) && beta_of(0.3) > beta_of(0.6));
        let rho0_b = |b| invert_relations(Relation::Rho0FromBeta { x_inf: 0.3, beta: b }).unwrap();
        assert!(rho0_b(0.5) < rho0_b(1.0));

        let upper = xinf_max(2.0).unwrap();
        for rel in [
            Relation::Rho0FromXinf { beta: 2.0, x_inf: upper },
            Relation::Rho0FromXinf { beta: 2.0, x_inf: 0.0 },
            Relation::BetaFromXinf { rho0: 0.5, x_inf: 0.5 },
            Relation::BetaFromXinf { rho0: 0.5, x_inf: 0.0 },
            Relation::Rho0FromBeta { x_inf: 0.3, beta: 0.3f64.ln() / (0.3 - 1.0) },
            Relation::Rho0FromBeta { x_inf: 1.0, beta: 1.0 },
        ] {
            assert!(matches!(invert_relations(rel), Err(Error::DomainError(_))), "{rel:?}");
        }
    }
}
