//! Infection kernels sampled on lattice displacements, and normalised
//! convolution `(J * f)(x) = gamma^d sum_y w[x - y] f(y)`.
//!
//! Raw samples are taken at the minimal-image distance of each displacement
//! and then rescaled so that `gamma^d sum_z w[z] = 1` holds to rounding. A
//! constant field is therefore a fixed point of the convolution, which the
//! particle and PDE code both rely on.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::TorusGrid;

/// Supports at most this large are convolved by direct summation.
pub const DIRECT_SUPPORT_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelShape {
    /// `J == 1`.
    MeanField,
    /// Indicator of the ball of the given macroscopic radius.
    TopHat { radius: f64 },
    /// Smooth compactly supported bump `exp(1 - 1 / (1 - (r / width)^2))`.
    WrappedBump { width: f64 },
}

impl KernelShape {
    fn validate(&self) -> Result<()> {
        match *self {
            KernelShape::MeanField => Ok(()),
            KernelShape::TopHat { radius: len } | KernelShape::WrappedBump { width: len } => {
                if !(len > 0.0) || !len.is_finite() {
                    return Err(Error::InvalidSpec(format!("length must be positive, got {len}")));
                }
                if len > 0.5 {
                    return Err(Error::InvalidSpec(format!(
                        "length {len} exceeds the half-torus"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Unnormalised profile at macroscopic distance `r`.
    fn raw(&self, r: f64) -> f64 {
        match *self {
            KernelShape::MeanField => 1.0,
            KernelShape::TopHat { radius } => {
                if r <= radius * (1.0 + 1e-12) {
                    1.0
                } else {
                    0.0
                }
            }
            KernelShape::WrappedBump { width } => {
                let s = r / width;
                if s < 1.0 {
                    (1.0 - 1.0 / (1.0 - s * s)).exp()
                } else {
                    0.0
                }
            }
        }
    }
}

impl fmt::Display for KernelShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelShape::MeanField => write!(f, "meanfield"),
            KernelShape::TopHat { radius } => write!(f, "tophat:{radius}"),
            KernelShape::WrappedBump { width } => write!(f, "bump:{width}"),
        }
    }
}

impl FromStr for KernelShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_len = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad kernel length {v:?}")))
        };
        let shape = match s.split_once(':') {
            None if s.eq_ignore_ascii_case("meanfield") => KernelShape::MeanField,
            Some(("tophat", v)) => KernelShape::TopHat {
                radius: parse_len(v)?,
            },
            Some(("bump", v)) => KernelShape::WrappedBump { width: parse_len(v)? },
            _ => {
                return Err(Error::Config(format!(
                    "kernel must be meanfield | tophat:<radius> | bump:<width>, got {s:?}"
                )))
            }
        };
        shape.validate()?;
        Ok(shape)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub shape: KernelShape,
    /// Infection strength.
    pub beta: f64,
}

impl KernelSpec {
    pub fn new(shape: KernelShape, beta: f64) -> Self {
        Self { shape, beta }
    }
}

/// One displacement with positive weight.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportEntry {
    /// Site index encoding the displacement.
    pub index: usize,
    pub disp: Vec<i64>,
    pub weight: f64,
}

struct Spectral {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Transform of the weights, real because the weights are symmetric.
    symbol: Vec<f64>,
}

#[derive(Clone)]
pub struct DiscreteKernel {
    grid: TorusGrid,
    spec: KernelSpec,
    weights: Vec<f64>,
    support: Vec<SupportEntry>,
    uniform: bool,
    spectral: Option<Arc<Spectral>>,
}

impl fmt::Debug for DiscreteKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscreteKernel")
            .field("grid", &self.grid)
            .field("spec", &self.spec)
            .field("support_len", &self.support.len())
            .finish()
    }
}

/// Discretise a kernel on the grid.
pub fn build_kernel(spec: KernelSpec, grid: TorusGrid) -> Result<DiscreteKernel> {
    spec.shape.validate()?;
    if !(spec.beta >= 0.0) || !spec.beta.is_finite() {
        return Err(Error::InvalidSpec(format!("beta must be nonnegative, got {}", spec.beta)));
    }
    let n = grid.n_sites();
    let gamma = grid.gamma();
    let mut weights: Vec<f64> = (0..n)
        .map(|z| spec.shape.raw(grid.lattice_norm(z) * gamma))
        .collect();

    if !weights.iter().enumerate().any(|(z, &w)| z != 0 && w > 0.0) {
        return Err(Error::EmptySupport(format!(
            "{} reaches no neighbour at spacing {gamma}",
            spec.shape
        )));
    }
    let scale = 1.0 / (grid.cell_volume() * weights.iter().sum::<f64>());
    weights.iter_mut().for_each(|w| *w *= scale);

    let support: Vec<SupportEntry> = weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(index, &weight)| SupportEntry {
            index,
            disp: grid.displacement(index),
            weight,
        })
        .collect();
    let uniform = matches!(spec.shape, KernelShape::MeanField);
    let spectral = (!uniform && support.len() > DIRECT_SUPPORT_LIMIT)
        .then(|| Arc::new(Spectral::new(grid, &weights)));

    Ok(DiscreteKernel {
        grid,
        spec,
        weights,
        support,
        uniform,
        spectral,
    })
}

impl DiscreteKernel {
    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn spec(&self) -> KernelSpec {
        self.spec
    }

    pub fn beta(&self) -> f64 {
        self.spec.beta
    }

    /// Weight of the displacement encoded by site index `disp_idx`.
    pub fn weight(&self, disp_idx: usize) -> f64 {
        self.weights[disp_idx]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn support(&self) -> &[SupportEntry] {
        &self.support
    }

    /// True for the mean-field kernel, where every displacement has weight 1.
    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    pub fn convolve(&self, field: &[f64]) -> Result<Vec<f64>> {
        self.grid.check_len(field.len())?;
        let mut out = vec![0.0; field.len()];
        self.convolve_into(field, &mut out);
        Ok(out)
    }

    /// Convolution into a preallocated buffer; both slices must have one
    /// entry per site.
    pub fn convolve_into(&self, field: &[f64], out: &mut [f64]) {
        debug_assert_eq!(field.len(), self.grid.n_sites());
        debug_assert_eq!(out.len(), self.grid.n_sites());
        if self.uniform {
            let mean = self.grid.integrate(field) * self.weights[0];
            out.iter_mut().for_each(|o| *o = mean);
        } else if let Some(spectral) = &self.spectral {
            spectral.apply(self.grid, field, out);
        } else {
            self.convolve_support(field, out);
        }
    }

    fn convolve_support(&self, field: &[f64], out: &mut [f64]) {
        let cell = self.grid.cell_volume();
        for (x, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for e in &self.support {
                // w is symmetric, so sum_z w[z] f(x - z) = sum_z w[z] f(x + z)
                acc += e.weight * field[self.grid.shift(x, &e.disp)];
            }
            *o = cell * acc;
        }
    }

    /// Full-grid direct summation, independent of the fast paths.
    pub fn convolve_direct(&self, field: &[f64]) -> Result<Vec<f64>> {
        self.grid.check_len(field.len())?;
        let n = self.grid.n_sites();
        let cell = self.grid.cell_volume();
        let mut out = vec![0.0; n];
        for (x, o) in out.iter_mut().enumerate() {
            let cx = self.grid.coords(x);
            let mut acc = 0.0;
            for (y, &fy) in field.iter().enumerate() {
                let cy = self.grid.coords(y);
                let disp: Vec<i64> = cx.iter().zip(&cy).map(|(&a, &b)| a as i64 - b as i64).collect();
                acc += self.weights[self.grid.displacement_index(&disp)] * fy;
            }
            *o = cell * acc;
        }
        Ok(out)
    }
}

impl Spectral {
    fn new(grid: TorusGrid, weights: &[f64]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.side());
        let inverse = planner.plan_fft_inverse(grid.side());
        let mut buf: Vec<Complex64> = weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
        transform_nd(forward.as_ref(), grid, &mut buf);
        let symbol = buf.iter().map(|c| c.re).collect();
        Self {
            forward,
            inverse,
            symbol,
        }
    }

    fn apply(&self, grid: TorusGrid, field: &[f64], out: &mut [f64]) {
        let mut buf: Vec<Complex64> = field.iter().map(|&f| Complex64::new(f, 0.0)).collect();
        transform_nd(self.forward.as_ref(), grid, &mut buf);
        for (b, &s) in buf.iter_mut().zip(&self.symbol) {
            *b *= s;
        }
        transform_nd(self.inverse.as_ref(), grid, &mut buf);
        // inverse FFT is unnormalised: 1/N, times gamma^d = 1/N
        let scale = grid.cell_volume() * grid.cell_volume();
        for (o, b) in out.iter_mut().zip(&buf) {
            *o = b.re * scale;
        }
    }
}

/// In-place transform along every axis.
fn transform_nd(plan: &dyn Fft<f64>, grid: TorusGrid, buf: &mut [Complex64]) {
    let side = grid.side();
    let n = buf.len();
    let mut line = vec![Complex64::new(0.0, 0.0); side];
    let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
    let mut stride = 1;
    for _ in 0..grid.dim() {
        let block = stride * side;
        for hi in (0..n).step_by(block) {
            for lo in 0..stride {
                let base = hi + lo;
                for (k, v) in line.iter_mut().enumerate() {
                    *v = buf[base + k * stride];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    buf[base + k * stride] = *v;
                }
            }
        }
        stride = block;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1(l: usize) -> TorusGrid {
        TorusGrid::new(1, l).unwrap()
    }

    #[test]
    fn meanfield_weights_are_one() {
        let k = build_kernel(KernelSpec::new(KernelShape::MeanField, 1.0), grid1(8)).unwrap();
        assert!(k.weights().iter().all(|&w| (w - 1.0).abs() < 1e-15));
        assert_eq!(k.support().len(), 8);
        assert!((k.grid().cell_volume() * k.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tophat_quarter_radius_on_eight_sites() {
        let k = build_kernel(
            KernelSpec::new(KernelShape::TopHat { radius: 0.25 }, 1.0),
            grid1(8),
        )
        .unwrap();
        let mut disps: Vec<i64> = k.support().iter().map(|e| e.disp[0]).collect();
        disps.sort();
        assert_eq!(disps, vec![-2, -1, 0, 1, 2]);
        for e in k.support() {
            assert!((e.weight - 8.0 / 5.0).abs() < 1e-14);
        }
    }

    #[test]
    fn radius_below_spacing_is_rejected() {
        let err = build_kernel(
            KernelSpec::new(KernelShape::TopHat { radius: 0.01 }, 1.0),
            grid1(8),
        )
        .unwrap_err();
        assert!(matches!(err, Error::EmptySupport(_)));
        let err = build_kernel(
            KernelSpec::new(KernelShape::WrappedBump { width: 0.1 }, 1.0),
            grid1(8),
        )
        .unwrap_err();
        assert!(matches!(err, Error::EmptySupport(_)));
    }

    #[test]
    fn invalid_lengths() {
        for shape in [
            KernelShape::TopHat { radius: 0.0 },
            KernelShape::TopHat { radius: -0.1 },
            KernelShape::TopHat { radius: 0.6 },
            KernelShape::WrappedBump { width: 0.0 },
        ] {
            let err = build_kernel(KernelSpec::new(shape, 1.0), grid1(8)).unwrap_err();
            assert!(matches!(err, Error::InvalidSpec(_)), "{shape}");
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("meanfield".parse::<KernelShape>().unwrap(), KernelShape::MeanField);
        assert_eq!(
            "tophat:0.1".parse::<KernelShape>().unwrap(),
            KernelShape::TopHat { radius: 0.1 }
        );
        assert_eq!(
            "bump:0.25".parse::<KernelShape>().unwrap(),
            KernelShape::WrappedBump { width: 0.25 }
        );
        assert!("gauss:0.1".parse::<KernelShape>().is_err());
        assert!("tophat:x".parse::<KernelShape>().is_err());
        assert!("tophat:0.7".parse::<KernelShape>().is_err());
        let s = KernelShape::WrappedBump { width: 0.3 };
        assert_eq!(s.to_string().parse::<KernelShape>().unwrap(), s);
    }

    #[test]
    fn point_mass_response() {
        let g = grid1(16);
        let k = build_kernel(KernelSpec::new(KernelShape::WrappedBump { width: 0.3 }, 1.0), g).unwrap();
        let mut e0 = vec![0.0; 16];
        e0[0] = 1.0;
        let out = k.convolve(&e0).unwrap();
        for (x, o) in out.iter().enumerate() {
            assert!((o - g.gamma() * k.weight(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn meanfield_gives_average() {
        let g = grid1(10);
        let k = build_kernel(KernelSpec::new(KernelShape::MeanField, 1.0), g).unwrap();
        let f: Vec<f64> = (0..10).map(|i| (i * i) as f64).collect();
        let avg = f.iter().sum::<f64>() / 10.0;
        for o in k.convolve(&f).unwrap() {
            assert!((o - avg).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_mismatch() {
        let k = build_kernel(KernelSpec::new(KernelShape::MeanField, 1.0), grid1(10)).unwrap();
        assert!(matches!(
            k.convolve(&[1.0; 9]),
            Err(Error::GridMismatch { expected: 10, found: 9 })
        ));
    }
}
