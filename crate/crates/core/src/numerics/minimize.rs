//! Grid search followed by local refinement.

use super::MinConfig;
use crate::error::{Error, Result};
use crate::geometry::FiberDomain;
use crate::par;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimize `f` over a 1- or 2-d fiber. Directions in which the fiber is
/// unbounded are cut at `±cfg.search_radius`.
pub fn minimize_over_fiber<F>(f: F, fiber: &FiberDomain, cfg: &MinConfig) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let (lo, hi) = fiber.bbox();
    let r = cfg.search_radius;
    let lo: Vec<f64> = lo.iter().map(|v| if v.is_finite() { *v } else { -r }).collect();
    let hi: Vec<f64> = hi.iter().map(|v| if v.is_finite() { *v } else { r }).collect();
    minimize_in_box(f, fiber, &lo, &hi, cfg)
}

/// Minimize `f` over the part of the fiber inside the box `[lo, hi]`. Box
/// faces lying strictly inside the fiber's own bounding box are artificial:
/// a grid minimum on such a face with values still decreasing toward it is
/// reported as [`Error::Unbounded`].
pub fn minimize_in_box<F>(f: F, fiber: &FiberDomain, lo: &[f64], hi: &[f64], cfg: &MinConfig) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    let d = fiber.dim();
    if d != 1 && d != 2 {
        return Err(Error::InvalidParam(format!("minimization needs fiber dimension 1 or 2, got {d}")));
    }
    let (flo, fhi) = fiber.bbox();
    let lo: Vec<f64> = lo.iter().zip(&flo).map(|(a, b)| a.max(*b)).collect();
    let hi: Vec<f64> = hi.iter().zip(&fhi).map(|(a, b)| a.min(*b)).collect();
    if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
        return Err(Error::InvalidParam("search box does not meet the fiber".into()));
    }
    let artificial_lo: Vec<bool> = lo.iter().zip(&flo).map(|(a, b)| a > b).collect();
    let artificial_hi: Vec<bool> = hi.iter().zip(&fhi).map(|(a, b)| a < b).collect();

    let n = cfg.grid_points;
    let node = |axis: usize, i: usize| -> f64 {
        if i + 1 == n {
            hi[axis]
        } else {
            lo[axis] + (hi[axis] - lo[axis]) * i as f64 / (n - 1) as f64
        }
    };
    let eval = |x: &[f64]| -> f64 {
        if !fiber.contains(x) {
            return f64::INFINITY;
        }
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let total = n.pow(d as u32);
    let point_of = |k: usize| -> Vec<f64> {
        if d == 1 {
            vec![node(0, k)]
        } else {
            vec![node(0, k / n), node(1, k % n)]
        }
    };
    let values = par::map_range(total, |k| eval(&point_of(k)));

    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = k;
        }
    }
    let vbest = values[best];
    if vbest == f64::INFINITY {
        return Err(Error::InvalidParam("no grid node lies inside the fiber".into()));
    }

    // Minimum on an artificial face with the inward neighbour larger.
    let idx: Vec<usize> = if d == 1 { vec![best] } else { vec![best / n, best % n] };
    for axis in 0..d {
        let i = idx[axis];
        let inward = |step: isize| -> usize {
            let mut j = idx.clone();
            j[axis] = (i as isize + step) as usize;
            if d == 1 {
                j[0]
            } else {
                j[0] * n + j[1]
            }
        };
        let on_lo = i == 0 && artificial_lo[axis] && values[inward(1)] > vbest;
        let on_hi = i + 1 == n && artificial_hi[axis] && values[inward(-1)] > vbest;
        if on_lo || on_hi {
            return Err(Error::Unbounded { edge: point_of(best), value: vbest });
        }
    }

    let start = point_of(best);
    let (x, v) = if d == 1 {
        let a = node(0, idx[0].saturating_sub(1));
        let b = node(0, (idx[0] + 1).min(n - 1));
        golden(|t| eval(&[t]), a, b, start[0], vbest, cfg)
    } else {
        let steps = [(hi[0] - lo[0]) / (n - 1) as f64, (hi[1] - lo[1]) / (n - 1) as f64];
        compass(&eval, start, vbest, steps, cfg)
    };
    Ok((x, v))
}

/// Golden-section search on `[a, b]`, never returning anything worse than
/// the seed `(x0, v0)`.
fn golden<G: Fn(f64) -> f64>(g: G, mut a: f64, mut b: f64, x0: f64, v0: f64, cfg: &MinConfig) -> (Vec<f64>, f64) {
    let (mut bx, mut bv) = (x0, v0);
    let mut c = b - INV_PHI * (b - a);
    let mut e = a + INV_PHI * (b - a);
    let mut gc = g(c);
    let mut ge = g(e);
    for _ in 0..cfg.refine_iters {
        if gc < bv {
            bx = c;
            bv = gc;
        }
        if ge < bv {
            bx = e;
            bv = ge;
        }
        if (b - a).abs() <= cfg.tol {
            break;
        }
        if gc <= ge {
            b = e;
            e = c;
            ge = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = e;
            gc = ge;
            e = a + INV_PHI * (b - a);
            ge = g(e);
        }
    }
    (vec![bx], bv)
}

/// Compass search with halving steps from `(x, v)`.
fn compass<G: Fn(&[f64]) -> f64>(
    g: &G,
    mut x: Vec<f64>,
    mut v: f64,
    mut steps: [f64; 2],
    cfg: &MinConfig,
) -> (Vec<f64>, f64) {
    for _ in 0..cfg.refine_iters {
        if steps[0].max(steps[1]) <= cfg.tol {
            break;
        }
        let mut moved = false;
        for (axis, sign) in [(0, -1.0), (0, 1.0), (1, -1.0), (1, 1.0)] {
            let mut y = x.clone();
            y[axis] += sign * steps[axis];
            let gy = g(&y);
            if gy < v {
                x = y;
                v = gy;
                moved = true;
                break;
            }
        }
        if !moved {
            steps[0] *= 0.5;
            steps[1] *= 0.5;
        }
    }
    (x, v)
}
