//! Integrals over intervals of the real line, finite or not.

use std::f64::consts::PI;

use super::gk::{adaptive, Tolerance, VecIntegrand};
use super::QuadConfig;
use crate::error::{Error, Result};

/// `∫_a^b f` with no declared breakpoints.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<f64> {
    integrate_line(f, a, b, &[], cfg)
}

/// `∫_a^b f` where either end may be infinite and `breaks` marks kinks or
/// integrable singularities.
pub fn integrate_line<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], cfg: &QuadConfig) -> Result<f64> {
    let mut g = |x: f64, out: &mut [f64]| out[0] = f(x);
    Ok(integrate_line_vec(&mut g, 1, a, b, breaks, cfg)?[0])
}

/// Planar integral of a radial profile: `2π ∫_0^∞ g(r) r dr`.
pub fn integrate_radial_2d<F: Fn(f64) -> f64>(g: F, cfg: &QuadConfig) -> Result<f64> {
    integrate_radial_2d_with(g, &[], f64::INFINITY, cfg)
}

/// Radial integral over the disc of radius `outer` (possibly infinite), with
/// seams at the radii in `breaks`.
pub fn integrate_radial_2d_with<F: Fn(f64) -> f64>(g: F, breaks: &[f64], outer: f64, cfg: &QuadConfig) -> Result<f64> {
    let v = integrate_line(|r| if r == 0.0 { 0.0 } else { g(r) * r }, 0.0, outer, breaks, cfg)?;
    Ok(2.0 * PI * v)
}

/// Vector-valued integral over `[a, b]`; infinite ends are handled by a
/// bounded core plus dyadic shells.
pub fn integrate_line_vec(
    f: &mut VecIntegrand<'_>,
    dim: usize,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<Vec<f64>> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::InvalidParam("NaN integration limit".into()));
    }
    if !(a < b) {
        return Ok(vec![0.0; dim]);
    }
    let finite_breaks: Vec<f64> = breaks.iter().copied().filter(|x| x.is_finite()).collect();
    let r = cfg.tail_radius;

    let core_hi = if b.is_finite() {
        b
    } else {
        finite_breaks.iter().chain(std::iter::once(&a).filter(|x| x.is_finite())).fold(r, |m, &x| m.max(x.abs()).max(x))
    };
    let core_lo = if a.is_finite() {
        a
    } else {
        finite_breaks
            .iter()
            .chain(std::iter::once(&b).filter(|x| x.is_finite()))
            .fold(-r, |m, &x| m.min(-x.abs()).min(x))
    };

    let tol = cfg.tolerance();
    let mut total = if core_lo < core_hi {
        let graded = graded_breaks(&finite_breaks, core_lo, core_hi, cfg.seam_grading);
        adaptive(f, dim, core_lo, core_hi, &graded, tol)?.value
    } else {
        vec![0.0; dim]
    };
    if !b.is_finite() {
        let tail = tail(f, dim, core_hi, 1.0, cfg)?;
        add(&mut total, &tail);
    }
    if !a.is_finite() {
        let tail = tail(f, dim, -core_lo, -1.0, cfg)?;
        add(&mut total, &tail);
    }
    Ok(total)
}

/// Breakpoints inside `(lo, hi)` plus, on each side of every one, points at
/// distances `L·8^{-j}`, `j = 1..=levels`, where `L` is the gap to the
/// neighbouring breakpoint or end.
fn graded_breaks(breaks: &[f64], lo: f64, hi: f64, levels: usize) -> Vec<f64> {
    let mut b: Vec<f64> = breaks.iter().copied().filter(|x| *x > lo && *x < hi).collect();
    b.sort_by(f64::total_cmp);
    b.dedup();
    if levels == 0 || b.is_empty() {
        return b;
    }
    let mut out = b.clone();
    for (i, &x) in b.iter().enumerate() {
        let left = if i == 0 { lo } else { b[i - 1] };
        let right = b.get(i + 1).copied().unwrap_or(hi);
        let (mut dl, mut dr) = ((x - left) / 2.0, (right - x) / 2.0);
        for _ in 0..levels {
            dl /= 8.0;
            dr /= 8.0;
            out.push(x - dl);
            out.push(x + dr);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

fn add(acc: &mut [f64], v: &[f64]) {
    for (x, y) in acc.iter_mut().zip(v) {
        *x += y;
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Integral over `sign·[start, ∞)`, `start > 0`, by shells `[s·2^j, s·2^{j+1}]`.
fn tail(f: &mut VecIntegrand<'_>, dim: usize, start: f64, sign: f64, cfg: &QuadConfig) -> Result<Vec<f64>> {
    let start = start.max(f64::MIN_POSITIVE);
    let shell_tol = Tolerance { abs: cfg.abs_tol / 8.0, rel: cfg.rel_tol, max_panels: cfg.max_subdiv };
    let envelope_ok = |s: f64| {
        let c = cfg.tail_growth_bound;
        c <= 0.0 || (-c * (s - cfg.tail_radius)).exp() / c <= cfg.abs_tol / 4.0
    };

    let mut mirrored = |x: f64, out: &mut [f64]| f(sign * x, out);
    let mut total = vec![0.0; dim];
    let mut prev: Option<Vec<f64>> = None;
    let mut lo = start;
    for _ in 0..cfg.max_tail_doublings.max(1) {
        let hi = 2.0 * lo;
        let shell = match adaptive(&mut mirrored, dim, lo, hi, &[], shell_tol) {
            Ok(e) => e.value,
            Err(Error::DivergentIntegral { .. }) => {
                return Err(Error::DivergentIntegral { radius: lo, increment: f64::INFINITY })
            }
            Err(e) => return Err(e),
        };
        let inc = max_abs(&shell);
        if !inc.is_finite() {
            return Err(Error::DivergentIntegral { radius: lo, increment: inc });
        }
        add(&mut total, &shell);
        let small = inc <= (cfg.abs_tol / 4.0).max(cfg.rel_tol * max_abs(&total) / 4.0);
        if small && envelope_ok(hi) {
            // Geometric remainder from the last two shells, per component.
            if let Some(p) = &prev {
                for c in 0..dim {
                    if p[c] != 0.0 {
                        let rho = shell[c] / p[c];
                        if rho > 0.0 && rho < 0.9 {
                            total[c] += shell[c] * rho / (1.0 - rho);
                        }
                    }
                }
            }
            return Ok(total.iter().map(|v| sign.abs() * v).collect());
        }
        prev = Some(shell);
        lo = hi;
    }
    Err(Error::DivergentIntegral { radius: lo, increment: prev.as_deref().map(max_abs).unwrap_or(f64::INFINITY) })
}
