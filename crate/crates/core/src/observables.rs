//! Test functions `G` and the empirical pairings `<pi^{gamma,i}, G>`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::TorusGrid;

/// A trigonometric test function of one coordinate, or the constant 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    One,
    /// `cos(2 pi k r_axis)`
    Cos { k: u32, axis: usize },
    /// `sin(2 pi k r_axis)`
    Sin { k: u32, axis: usize },
}

impl TestFunction {
    pub fn eval(&self, r: &[f64]) -> f64 {
        let tau = std::f64::consts::TAU;
        match *self {
            TestFunction::One => 1.0,
            TestFunction::Cos { k, axis } => (tau * k as f64 * r[axis]).cos(),
            TestFunction::Sin { k, axis } => (tau * k as f64 * r[axis]).sin(),
        }
    }

    /// `{1, cos 2 pi r, sin 2 pi r, cos 4 pi r}` on every axis.
    pub fn standard_family(dim: usize) -> Vec<TestFunction> {
        let mut out = vec![TestFunction::One];
        for axis in 0..dim {
            out.push(TestFunction::Cos { k: 1, axis });
            out.push(TestFunction::Sin { k: 1, axis });
            out.push(TestFunction::Cos { k: 2, axis });
        }
        out
    }

    /// Values at every site of the grid.
    pub fn tabulate(&self, grid: &TorusGrid) -> Result<Vec<f64>> {
        match *self {
            TestFunction::Cos { axis, .. } | TestFunction::Sin { axis, .. } if axis >= grid.dim() => {
                Err(Error::Config(format!(
                    "test function {self} uses axis {axis} on a {}-d grid",
                    grid.dim()
                )))
            }
            _ => Ok(grid.sample(|r| self.eval(r))),
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::One => write!(f, "1"),
            TestFunction::Cos { k, axis: 0 } => write!(f, "cos{k}"),
            TestFunction::Sin { k, axis: 0 } => write!(f, "sin{k}"),
            TestFunction::Cos { k, axis } => write!(f, "cos{k}@{axis}"),
            TestFunction::Sin { k, axis } => write!(f, "sin{k}@{axis}"),
        }
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    /// `1`, `cos<k>`, `sin<k>`, optionally suffixed `@<axis>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Config(format!("bad test function {s:?}"));
        if s == "1" {
            return Ok(TestFunction::One);
        }
        let (body, axis) = match s.split_once('@') {
            Some((b, a)) => (b, a.parse::<usize>().map_err(|_| bad())?),
            None => (s, 0),
        };
        if let Some(k) = body.strip_prefix("cos") {
            let k = k.parse().map_err(|_| bad())?;
            Ok(TestFunction::Cos { k, axis })
        } else if let Some(k) = body.strip_prefix("sin") {
            let k = k.parse().map_err(|_| bad())?;
            Ok(TestFunction::Sin { k, axis })
        } else {
            Err(bad())
        }
    }
}
