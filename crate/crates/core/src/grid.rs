//! The discrete torus with `side` sites per axis and spacing `1 / side`.
//!
//! Sites are stored in a flat vector with axis 0 varying fastest, so the site
//! with coordinates `(c_0, .., c_{d-1})` has index `c_0 + c_1 L + c_2 L^2 + ..`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TorusGrid {
    dim: usize,
    side: usize,
}

impl TorusGrid {
    pub fn new(dim: usize, side: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("dimension must be positive".into()));
        }
        if side == 0 {
            return Err(Error::Config("side length must be positive".into()));
        }
        side.checked_pow(dim as u32)
            .filter(|&n| n <= u32::MAX as usize)
            .ok_or_else(|| Error::Config(format!("grid {side}^{dim} is too large")))?;
        Ok(Self { dim, side })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sites per axis, `L = 1 / gamma`.
    pub fn side(&self) -> usize {
        self.side
    }

    /// Lattice spacing `gamma = 1 / L`.
    pub fn gamma(&self) -> f64 {
        1.0 / self.side as f64
    }

    /// Volume of one lattice cell, `gamma^d`.
    pub fn cell_volume(&self) -> f64 {
        1.0 / self.n_sites() as f64
    }

    pub fn n_sites(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn coords(&self, mut idx: usize) -> Vec<usize> {
        let mut c = Vec::with_capacity(self.dim);
        for _ in 0..self.dim {
            c.push(idx % self.side);
            idx /= self.side;
        }
        c
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * self.side + c % self.side)
    }

    /// Macroscopic position `gamma * x` in `[0, 1)^d`.
    pub fn position(&self, idx: usize) -> Vec<f64> {
        let g = self.gamma();
        self.coords(idx).into_iter().map(|c| c as f64 * g).collect()
    }

    /// Minimal-image displacement encoded by a site index, each component in
    /// `(-L/2, L/2]`.
    pub fn displacement(&self, idx: usize) -> Vec<i64> {
        let l = self.side as i64;
        self.coords(idx)
            .into_iter()
            .map(|c| {
                let c = c as i64;
                if 2 * c > l {
                    c - l
                } else {
                    c
                }
            })
            .collect()
    }

    /// Site index encoding a displacement (taken modulo `L` per axis).
    pub fn displacement_index(&self, disp: &[i64]) -> usize {
        let l = self.side as i64;
        disp.iter()
            .rev()
            .fold(0, |acc, &z| acc * self.side + z.rem_euclid(l) as usize)
    }

    /// Site `idx + disp` on the torus.
    pub fn shift(&self, idx: usize, disp: &[i64]) -> usize {
        let l = self.side as i64;
        let mut rest = idx;
        let mut out = 0;
        let mut stride = 1;
        for &z in disp {
            let c = (rest % self.side) as i64;
            rest /= self.side;
            out += (c + z).rem_euclid(l) as usize * stride;
            stride *= self.side;
        }
        out
    }

    /// Euclidean length of the minimal-image displacement, in lattice units.
    pub fn lattice_norm(&self, disp_idx: usize) -> f64 {
        self.displacement(disp_idx)
            .iter()
            .map(|&z| (z * z) as f64)
            .sum::<f64>()
            .sqrt()
    }

    /// Evaluate a macroscopic profile at every site.
    pub fn sample<F: Fn(&[f64]) -> f64>(&self, f: F) -> Vec<f64> {
        (0..self.n_sites()).map(|i| f(&self.position(i))).collect()
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n_sites() {
            return Err(Error::GridMismatch {
                expected: self.n_sites(),
                found: len,
            });
        }
        Ok(())
    }

    /// Riemann sum `gamma^d * sum_x f(x)`.
    pub fn integrate(&self, field: &[f64]) -> f64 {
        field.iter().sum::<f64>() * self.cell_volume()
    }
}
