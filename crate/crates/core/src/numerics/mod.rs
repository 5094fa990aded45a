//! Quadrature, minimization and finite-difference probes.

mod fiber;
pub(crate) mod gk;
mod line;
mod minimize;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fiber::{integrate_fiber, integrate_fiber_seamed, integrate_fiber_vec};
pub use gk::VecIntegrand;
pub use line::{integrate_1d, integrate_line, integrate_line_vec, integrate_radial_2d, integrate_radial_2d_with};
pub use minimize::{minimize_in_box, minimize_over_fiber};

/// Tolerances and tail handling for every integral in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Panel budget of one adaptive run.
    pub max_subdiv: usize,
    /// Radius beyond which unbounded ranges are handled as tails.
    pub tail_radius: f64,
    /// Assumed rate `c` with integrand ≤ exp(−c(|x| − tail_radius)) beyond the
    /// tail radius; 0 means no envelope is known.
    pub tail_growth_bound: f64,
    /// How many dyadic shells the tail may add before it is declared divergent.
    pub max_tail_doublings: usize,
    /// Geometric refinement levels (ratio 1/8) laid toward each declared
    /// breakpoint, so integrands that collapse steeply off a seam are seen.
    pub seam_grading: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_subdiv: 4000,
            tail_radius: 8.0,
            tail_growth_bound: 0.0,
            max_tail_doublings: 64,
            seam_grading: 8,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParam("quadrature tolerances must be positive".into()));
        }
        if self.max_subdiv < 1 {
            return Err(Error::InvalidParam("max_subdiv must be at least 1".into()));
        }
        if !(self.tail_radius > 0.0) {
            return Err(Error::InvalidParam("tail_radius must be positive".into()));
        }
        Ok(())
    }

    /// Same configuration with both tolerances scaled.
    pub fn tightened(&self, factor: f64) -> Self {
        Self { abs_tol: self.abs_tol * factor, rel_tol: self.rel_tol * factor, ..*self }
    }

    pub(crate) fn tolerance(&self) -> gk::Tolerance {
        gk::Tolerance { abs: self.abs_tol, rel: self.rel_tol, max_panels: self.max_subdiv }
    }
}

/// Grid-then-refine minimizer settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MinConfig {
    /// Nodes per axis of the coarse grid.
    pub grid_points: usize,
    pub refine_iters: usize,
    pub tol: f64,
    /// Half-width of the search box along directions where the fiber is unbounded.
    pub search_radius: f64,
}

impl Default for MinConfig {
    fn default() -> Self {
        Self { grid_points: 2001, refine_iters: 200, tol: 1e-12, search_radius: 8.0 }
    }
}

impl MinConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 3 {
            return Err(Error::InvalidParam("grid_points must be at least 3".into()));
        }
        if !(self.tol > 0.0) || !(self.search_radius > 0.0) {
            return Err(Error::InvalidParam("tol and search_radius must be positive".into()));
        }
        Ok(())
    }
}

/// A sphere `|x − center| = radius` across which an integrand is not smooth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Seam {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Seam {
    pub fn new(center: Vec<f64>, radius: f64) -> Self {
        Self { center, radius }
    }

    /// Points where the seam meets the line `{x : x_j fixed for j ≠ axis}`
    /// through `p`.
    pub fn crossings(&self, p: &[f64], axis: usize) -> Vec<f64> {
        let mut off = 0.0;
        for (j, (pj, cj)) in p.iter().zip(&self.center).enumerate() {
            if j != axis {
                off += (pj - cj) * (pj - cj);
            }
        }
        let r2 = self.radius * self.radius - off;
        if r2 < 0.0 {
            return Vec::new();
        }
        let h = r2.sqrt();
        let c = self.center[axis];
        if h == 0.0 {
            vec![c]
        } else {
            vec![c - h, c + h]
        }
    }
}

/// Volume of the unit ball in ℝ^N.
pub fn ball_volume(n: usize) -> f64 {
    // σ_N = 2π/N · σ_{N−2}, seeded by σ_0 = 1 and σ_1 = 2.
    let mut v = if n.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut d = if n.is_multiple_of(2) { 2 } else { 3 };
    while d <= n {
        v *= 2.0 * std::f64::consts::PI / d as f64;
        d += 2;
    }
    v
}

/// Central second difference `f(t−h) − 2f(t) + f(t+h)`.
pub fn second_difference<F: Fn(f64) -> f64>(f: F, t: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidParam(format!("step h = {h} must be positive")));
    }
    let lo = f(t - h);
    let mid = f(t);
    let hi = f(t + h);
    for (x, v) in [(t - h, lo), (t, mid), (t + h, hi)] {
        if !v.is_finite() {
            return Err(Error::OutOfDomain(x));
        }
    }
    Ok(lo - 2.0 * mid + hi)
}
