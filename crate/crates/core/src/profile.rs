//! Initial density profiles on the torus.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::TorusGrid;

/// Slack allowed on `rho0 + rho1 <= 1` for profiles built in floating point.
const SUM_SLACK: f64 = 1e-12;

/// A macroscopic profile `r -> [0, 1]`.
///
/// Text forms: `<c>`, `bump:<height>:<center>:<width>` (a cosine bump in the
/// minimal-image distance to `center` on every axis), `cos:<mean>:<amp>:<k>`
/// (`mean + amp * prod_axes cos(2 pi k r_a)`), and `complement` for
/// `1 - other` where `other` is the partner profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileSpec {
    Constant(f64),
    Bump { height: f64, center: f64, width: f64 },
    Cosine { mean: f64, amp: f64, k: u32 },
    Complement,
}

impl ProfileSpec {
    pub fn is_constant(&self) -> bool {
        matches!(self, ProfileSpec::Constant(_))
    }

    /// Value at a macroscopic position; `Complement` evaluates to NaN and must
    /// be resolved against its partner with [`sample_pair`].
    pub fn eval(&self, r: &[f64]) -> f64 {
        match *self {
            ProfileSpec::Constant(c) => c,
            ProfileSpec::Bump {
                height,
                center,
                width,
            } => {
                let d2: f64 = r
                    .iter()
                    .map(|&x| {
                        let d = (x - center).rem_euclid(1.0);
                        let d = d.min(1.0 - d);
                        d * d
                    })
                    .sum();
                let s = d2.sqrt() / width;
                if s < 1.0 {
                    height * 0.5 * (1.0 + (std::f64::consts::PI * s).cos())
                } else {
                    0.0
                }
            }
            ProfileSpec::Cosine { mean, amp, k } => {
                let tau = std::f64::consts::TAU;
                mean + amp * r.iter().map(|&x| (tau * k as f64 * x).cos()).product::<f64>()
            }
            ProfileSpec::Complement => f64::NAN,
        }
    }
}

impl fmt::Display for ProfileSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileSpec::Constant(c) => write!(f, "{c}"),
            ProfileSpec::Bump {
                height,
                center,
                width,
            } => write!(f, "bump:{height}:{center}:{width}"),
            ProfileSpec::Cosine { mean, amp, k } => write!(f, "cos:{mean}:{amp}:{k}"),
            ProfileSpec::Complement => write!(f, "complement"),
        }
    }
}

impl FromStr for ProfileSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Config(format!("bad profile {s:?}"));
        let nums = |rest: &str| -> Result<Vec<f64>> {
            rest.split(':')
                .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
                .collect()
        };
        if s == "complement" {
            return Ok(ProfileSpec::Complement);
        }
        if let Some(rest) = s.strip_prefix("bump:") {
            let v = nums(rest)?;
            if v.len() != 3 || !(v[2] > 0.0) {
                return Err(bad());
            }
            return Ok(ProfileSpec::Bump {
                height: v[0],
                center: v[1],
                width: v[2],
            });
        }
        if let Some(rest) = s.strip_prefix("cos:") {
            let v = nums(rest)?;
            if v.len() != 3 || v[2] < 0.0 || v[2].fract() != 0.0 {
                return Err(bad());
            }
            return Ok(ProfileSpec::Cosine {
                mean: v[0],
                amp: v[1],
                k: v[2] as u32,
            });
        }
        s.parse::<f64>().map(ProfileSpec::Constant).map_err(|_| bad())
    }
}

/// Sample a `(rho0, rho1)` pair on the grid, resolving `complement`, and
/// check the bounds.
pub fn sample_pair(
    grid: &TorusGrid,
    rho0: &ProfileSpec,
    rho1: &ProfileSpec,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (r0, r1) = match (rho0, rho1) {
        (ProfileSpec::Complement, ProfileSpec::Complement) => {
            return Err(Error::Config("both profiles are `complement`".into()))
        }
        (ProfileSpec::Complement, p1) => {
            let r1 = grid.sample(|r| p1.eval(r));
            (r1.iter().map(|v| 1.0 - v).collect(), r1)
        }
        (p0, ProfileSpec::Complement) => {
            let r0 = grid.sample(|r| p0.eval(r));
            let r1 = r0.iter().map(|v| 1.0 - v).collect();
            (r0, r1)
        }
        (p0, p1) => (grid.sample(|r| p0.eval(r)), grid.sample(|r| p1.eval(r))),
    };
    validate_pair(&r0, &r1)?;
    Ok((r0, r1))
}

/// `0 <= rho0, rho1` and `rho0 + rho1 <= 1` at every site.
pub fn validate_pair(rho0: &[f64], rho1: &[f64]) -> Result<()> {
    if rho0.len() != rho1.len() {
        return Err(Error::GridMismatch {
            expected: rho0.len(),
            found: rho1.len(),
        });
    }
    for (site, (&a, &b)) in rho0.iter().zip(rho1).enumerate() {
        if !(a >= 0.0 && b >= 0.0) {
            return Err(Error::InvalidProfile {
                site,
                reason: format!("negative or NaN density ({a}, {b})"),
            });
        }
        if a + b > 1.0 + SUM_SLACK {
            return Err(Error::InvalidProfile {
                site,
                reason: format!("rho0 + rho1 = {} exceeds 1", a + b),
            });
        }
    }
    Ok(())
}
