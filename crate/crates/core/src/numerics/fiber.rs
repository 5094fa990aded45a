//! Integration over fibers of dimension one or two.
//!
//! One-dimensional fibers are split into their exact maximal intervals. Two-
//! dimensional fibers are integrated iteratively: the outer variable runs over
//! the fiber's extent, split where the chord structure or a seam changes, and
//! each chord is integrated over its exact intervals with seam crossings as
//! breakpoints. Removing a set of measure zero therefore never changes a
//! result.

use std::cell::RefCell;

use super::gk::VecIntegrand;
use super::line::integrate_line_vec;
use super::{QuadConfig, Seam};
use crate::error::{Error, Result};
use crate::geometry::FiberDomain;

/// `∫_{fiber} f dλ`.
pub fn integrate_fiber<F: Fn(&[f64]) -> f64>(f: F, fiber: &FiberDomain, cfg: &QuadConfig) -> Result<f64> {
    integrate_fiber_seamed(f, fiber, &[], cfg)
}

/// `∫_{fiber} f dλ` where `f` is smooth away from the listed seams.
pub fn integrate_fiber_seamed<F: Fn(&[f64]) -> f64>(
    f: F,
    fiber: &FiberDomain,
    seams: &[Seam],
    cfg: &QuadConfig,
) -> Result<f64> {
    let mut g = |x: &[f64], out: &mut [f64]| out[0] = f(x);
    Ok(integrate_fiber_vec(&mut g, 1, fiber, seams, cfg)?[0])
}

/// Vector-valued fiber integral; `f` writes `dim` components.
pub fn integrate_fiber_vec(
    f: &mut dyn FnMut(&[f64], &mut [f64]),
    dim: usize,
    fiber: &FiberDomain,
    seams: &[Seam],
    cfg: &QuadConfig,
) -> Result<Vec<f64>> {
    match fiber.dim() {
        1 => line_integral(f, dim, fiber, &[], seams, cfg),
        2 => plane_integral(f, dim, fiber, seams, cfg),
        d => Err(Error::InvalidParam(format!("fiber integrals need dimension 1 or 2, got {d}"))),
    }
}

/// Integral along the last fiber axis with the other coordinates fixed to
/// `prefix`.
fn line_integral(
    f: &mut dyn FnMut(&[f64], &mut [f64]),
    dim: usize,
    fiber: &FiberDomain,
    prefix: &[f64],
    seams: &[Seam],
    cfg: &QuadConfig,
) -> Result<Vec<f64>> {
    let axis = prefix.len();
    let mut probe = prefix.to_vec();
    probe.push(0.0);
    let breaks: Vec<f64> = seams.iter().flat_map(|s| s.crossings(&probe, axis)).collect();
    let mut total = vec![0.0; dim];
    let mut point = probe.clone();
    for (a, b) in fiber.line_intervals(prefix) {
        let mut g = |s: f64, out: &mut [f64]| {
            point[axis] = s;
            f(&point, out)
        };
        let part = integrate_line_vec(&mut g as &mut VecIntegrand<'_>, dim, a, b, &breaks, cfg)?;
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    Ok(total)
}

fn plane_integral(
    f: &mut dyn FnMut(&[f64], &mut [f64]),
    dim: usize,
    fiber: &FiberDomain,
    seams: &[Seam],
    cfg: &QuadConfig,
) -> Result<Vec<f64>> {
    let (lo, hi) = fiber.bbox();
    if !(lo[0] < hi[0]) || !(lo[1] < hi[1]) {
        return Ok(vec![0.0; dim]);
    }
    let mut breaks = fiber.first_axis_breaks();
    for s in seams {
        breaks.extend([s.center[0] - s.radius, s.center[0], s.center[0] + s.radius]);
    }
    let inner_cfg = QuadConfig { abs_tol: cfg.abs_tol * 0.1, rel_tol: (cfg.rel_tol * 0.1).max(1e-14), ..*cfg };
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let mut outer = |x0: f64, out: &mut [f64]| {
        if failure.borrow().is_some() {
            out.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        match line_integral(&mut *f, dim, fiber, &[x0], seams, &inner_cfg) {
            Ok(v) => out.copy_from_slice(&v),
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                out.iter_mut().for_each(|v| *v = 0.0);
            }
        }
    };
    let result = integrate_line_vec(&mut outer, dim, lo[0], hi[0], &breaks, cfg);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{fiber, shapes, Csg, Domain};
    use std::f64::consts::PI;

    #[test]
    fn unit_interval() {
        let f = FiberDomain::from_csg(Csg::cuboid(vec![0.0], vec![1.0]), 1);
        assert!((integrate_fiber(|_| 1.0, &f, &QuadConfig::default()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_on_punctured_line() {
        let d = Domain::real(Csg::Space.minus(Csg::ball(vec![0.0, 0.0], 0.0)), 1, 1);
        let f = fiber(&d, &[0.0]);
        let v = integrate_fiber(|x| (-x[0] * x[0]).exp(), &f, &QuadConfig::default()).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-12);
        let full = integrate_fiber(|x| (-x[0] * x[0]).exp(), &FiberDomain::whole(1), &QuadConfig::default()).unwrap();
        assert_eq!(v, full);
    }

    #[test]
    fn unit_disc_area() {
        let f = fiber(&shapes::disc(1.0), &[]);
        let v = integrate_fiber(|_| 1.0, &f, &QuadConfig::default()).unwrap();
        assert!((v - PI).abs() < 1e-10, "{v}");
    }

    #[test]
    fn seamed_plane_integral_matches_radial_form() {
        let cfg = QuadConfig::default();
        let seam = [Seam::new(vec![0.0, 0.0], 0.1)];
        let v = integrate_fiber_seamed(
            |x| (-(x[0] * x[0] + x[1] * x[1] - 0.01).abs()).exp(),
            &FiberDomain::whole(2),
            &seam,
            &cfg,
        )
        .unwrap();
        let radial = PI * (2.0 - (-0.01f64).exp());
        assert!((v - radial).abs() < 1e-8, "{v} vs {radial}");
    }
}
