//! Minimal unitary dilation of the contraction semigroup
//! C_t: z ↦ e^{−(g+iω)t} z, realized on L²(ℝ, 2g dx):
//!
//! ```text
//! v(x) = e^{−(g+iω)x} for x ≥ 0, 0 otherwise
//! J(z) = z·v,   [U_t u](x) = u(x + t),   Π(u) = ⟨v, u⟩
//! ```
//!
//! and Π(U_t(J(z))) = C_t(z).
//!
//! Vectors are sampled at x_i = i·dx on [0, x_max) and are implicitly zero
//! for x < 0 and beyond the cutoff. Inner products use the trapezoid rule on
//! the full-line grid: every sample, including x = 0, is an interior node
//! with weight dx. Because v jumps at the origin the quadrature is first
//! order, with ⟨v, v⟩ ≈ 1 + g·dx.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::CavityParams;

/// Samples closer than this fraction of dx to a grid multiple count as aligned.
const ALIGN_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilationGrid {
    x_max: f64,
    nx: usize,
    dx: f64,
    weight: f64,
}

impl DilationGrid {
    /// Grid of spacing `dx` over [0, x_max). Requires the discarded tail
    /// mass e^{−2g·x_max} to be below 1e−8.
    pub fn new(x_max: f64, dx: f64, params: &CavityParams) -> Result<Self> {
        let g = params.g();
        if g.is_nan() || g <= 0.0 {
            return Err(Error::InvalidParams("dilation needs g > 0".into()));
        }
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::InvalidConfig(format!("dx must be positive, got {dx}")));
        }
        if !(x_max.is_finite() && x_max > dx) {
            return Err(Error::InvalidConfig(format!("x_max must exceed dx, got {x_max}")));
        }
        let tail = (-2.0 * g * x_max).exp();
        if tail >= 1e-8 {
            return Err(Error::InvalidConfig(format!(
                "x_max={x_max} leaves tail mass {tail:.2e}; need x_max >= {:.3}",
                1e8f64.ln() / (2.0 * g)
            )));
        }
        let nx = (x_max / dx).round() as usize;
        Ok(Self {
            x_max,
            nx,
            dx,
            weight: 2.0 * g,
        })
    }

    /// dx = 1e−3 and x_max = 20/(2g).
    pub fn default_for(params: &CavityParams) -> Result<Self> {
        Self::new(20.0 / (2.0 * params.g()), 1e-3, params)
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Density 2g of the measure.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    /// Number of grid points in a shift by `t`, or an error if `t` is not a
    /// non-negative multiple of dx.
    pub fn shift_points(&self, t: f64) -> Result<usize> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::GridAlignment { t, dx: self.dx });
        }
        let ratio = t / self.dx;
        let k = ratio.round();
        if (ratio - k).abs() > ALIGN_TOL {
            return Err(Error::GridAlignment { t, dx: self.dx });
        }
        Ok(k as usize)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct L2Vector {
    grid: DilationGrid,
    samples: Vec<Complex64>,
}

impl L2Vector {
    pub fn new(grid: DilationGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.nx {
            return Err(Error::DimensionMismatch {
                expected: grid.nx,
                found: samples.len(),
            });
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: DilationGrid) -> Self {
        Self {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.nx],
        }
    }

    pub fn from_fn(grid: DilationGrid, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            grid,
            samples: (0..grid.nx).map(|i| f(grid.x(i))).collect(),
        }
    }

    pub fn grid(&self) -> &DilationGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|s| s * z).collect(),
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Precondition(format!("t must be non-negative, got {t}")));
    }
    Ok(())
}

/// C_t(z) = e^{−(g+iω)t}·z.
pub fn contraction_apply(z: Complex64, t: f64, params: &CavityParams) -> Result<Complex64> {
    check_time(t)?;
    Ok((-params.complex_rate() * t).exp() * z)
}

pub fn cyclic_vector(grid: &DilationGrid, params: &CavityParams) -> L2Vector {
    let rate = params.complex_rate();
    L2Vector::from_fn(*grid, |x| (-rate * x).exp())
}

/// ∫ conj(u)·w·2g dx on the grid.
pub fn inner_product(u: &L2Vector, w: &L2Vector, grid: &DilationGrid) -> Result<Complex64> {
    if u.grid != *grid || w.grid != *grid {
        return Err(Error::GridMismatch);
    }
    let sum: Complex64 = u.samples.iter().zip(&w.samples).map(|(a, b)| a.conj() * b).sum();
    Ok(sum * (grid.weight * grid.dx))
}

/// J(z) = z·v.
pub fn embed_j(z: Complex64, grid: &DilationGrid, params: &CavityParams) -> L2Vector {
    cyclic_vector(grid, params).scale(z)
}

/// [U_t u](x) = u(x + t); samples pushed past x_max are dropped and the
/// vacated end is zero-filled.
pub fn shift_u(u: &L2Vector, t: f64, grid: &DilationGrid) -> Result<L2Vector> {
    if u.grid != *grid {
        return Err(Error::GridMismatch);
    }
    let k = grid.shift_points(t)?;
    let n = grid.nx;
    let mut samples = vec![Complex64::new(0.0, 0.0); n];
    if k < n {
        samples[..n - k].copy_from_slice(&u.samples[k..]);
    }
    Ok(L2Vector { grid: *grid, samples })
}

/// Π(u) = ⟨v, u⟩.
pub fn project_pi(u: &L2Vector, grid: &DilationGrid, params: &CavityParams) -> Result<Complex64> {
    inner_product(&cyclic_vector(grid, params), u, grid)
}

/// |Π(U_t(J(z))) − C_t(z)|.
pub fn diagram_residual(z: Complex64, t: f64, grid: &DilationGrid, params: &CavityParams) -> Result<f64> {
    let lifted = shift_u(&embed_j(z, grid, params), t, grid)?;
    let down = project_pi(&lifted, grid, params)?;
    Ok((down - contraction_apply(z, t, params)?).norm())
}
