use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{fiber, CoordKind, Csg, Domain, FiberDomain};
use crate::numerics::{integrate_fiber_vec, QuadConfig, Seam};
use crate::weights::WeightField;

/// Largest condition number accepted before a Gram solve is refused.
pub const MAX_CONDITION: f64 = 1e12;

/// Gram matrix `G_{kj} = ∫ \overline{w^k} w^j e^{−φ} dλ` of the monomials of
/// degree `≤ d` on a bounded one-dimensional complex fiber.
#[derive(Clone, Debug)]
pub struct GramKernel {
    pub domain: String,
    pub weight: String,
    pub degree: usize,
    pub gram: DMatrix<Complex64>,
    pub condition_estimate: f64,
}

impl GramKernel {
    /// `sup |f(z)|²/‖f‖²` over polynomials of degree `≤ d`.
    pub fn kernel_at(&self, z: [f64; 2]) -> Result<f64> {
        if self.condition_estimate > MAX_CONDITION {
            return Err(Error::IllConditioned(self.condition_estimate));
        }
        let chol = self.gram.clone().cholesky().ok_or(Error::IllConditioned(f64::INFINITY))?;
        let zc = Complex64::new(z[0], z[1]);
        let mut p = Complex64::new(1.0, 0.0);
        let v = DVector::from_fn(self.degree + 1, |_, _| {
            let out = p.conj();
            p *= zc;
            out
        });
        let sol = chol.solve(&v);
        Ok(v.dotc(&sol).re)
    }
}

/// Assemble the Gram matrix on a fiber, with `phi` evaluated on the fiber
/// coordinates and `seams` marking where it is not smooth.
pub fn gram_kernel<P>(
    fiber: &FiberDomain,
    phi: P,
    seams: &[Seam],
    names: (&str, &str),
    degree: usize,
    cfg: &QuadConfig,
) -> Result<GramKernel>
where
    P: Fn(&[f64]) -> f64,
{
    if fiber.dim() != 2 {
        return Err(Error::InvalidParam("Gram kernels need a one-dimensional complex fiber".into()));
    }
    let (lo, hi) = fiber.bbox();
    if lo.iter().chain(&hi).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParam("Gram kernels need a bounded fiber".into()));
    }
    let n = degree + 1;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|k| (k..n).map(move |j| (k, j))).collect();
    let dim = 2 * pairs.len();
    let mut powers = vec![Complex64::new(0.0, 0.0); n];
    let mut integrand = |x: &[f64], out: &mut [f64]| {
        let e = (-phi(x)).exp();
        if !(e > 0.0) {
            out.fill(0.0);
            return;
        }
        let w = Complex64::new(x[0], x[1]);
        powers[0] = Complex64::new(e, 0.0);
        for j in 1..n {
            powers[j] = powers[j - 1] * w;
        }
        // e·conj(w^k)·w^j = conj(e w^k)·(e w^j)/e
        let inv = 1.0 / e;
        for (i, &(k, j)) in pairs.iter().enumerate() {
            let v = powers[k].conj() * powers[j] * inv;
            out[2 * i] = v.re;
            out[2 * i + 1] = v.im;
        }
    };
    let flat = integrate_fiber_vec(&mut integrand, dim, fiber, seams, cfg)?;
    let mut gram = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (i, &(k, j)) in pairs.iter().enumerate() {
        let v = Complex64::new(flat[2 * i], flat[2 * i + 1]);
        gram[(k, j)] = v;
        gram[(j, k)] = v.conj();
    }
    for k in 0..n {
        gram[(k, k)].im = 0.0;
    }
    let eig = gram.clone().symmetric_eigenvalues();
    let (mn, mx) = eig.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), &x| (a.min(x), b.max(x.abs())));
    let condition_estimate = if mn > 0.0 { mx / mn } else { f64::INFINITY };
    Ok(GramKernel { domain: names.0.to_string(), weight: names.1.to_string(), degree, gram, condition_estimate })
}

/// `B_d(z)` on a bounded domain of ℂ (a fiber-only complex domain) with a
/// weight that has no base variables.
pub fn bergman_gram(domain: &Domain, phi: &WeightField, z: [f64; 2], degree: usize, cfg: &QuadConfig) -> Result<f64> {
    if domain.kind != CoordKind::Complex || domain.split != [0, 1] {
        return Err(Error::InvalidParam("expected a domain in ℂ with no base variables".into()));
    }
    let f = fiber(domain, &[]);
    let seams = phi.seams(&[]);
    let g = gram_kernel(&f, |x| phi.eval(&[], x), &seams, ("domain", phi.name()), degree, cfg)?;
    g.kernel_at(z)
}

/// Radius of the fiber when it is a disc (or the whole plane, radius `+∞`)
/// about `center`; `None` for any other shape.
pub fn disc_radius_about(slice: &Csg, center: &[f64]) -> Option<f64> {
    match slice {
        Csg::Space => Some(f64::INFINITY),
        Csg::Const { open: true, .. } => Some(f64::INFINITY),
        Csg::Ball { center: c, radius, axes } => {
            let axes_ok = axes.as_ref().map_or(c.len() == 2, |a| a == &[0, 1]);
            (axes_ok && c.as_slice() == center && *radius > 0.0).then_some(*radius)
        }
        Csg::Intersection(parts) => {
            parts.iter().map(|p| disc_radius_about(p, center)).try_fold(f64::INFINITY, |acc, r| r.map(|r| acc.min(r)))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes;
    use std::f64::consts::PI;

    fn zero() -> WeightField {
        WeightField::zero(CoordKind::Complex, 0, 1)
    }

    #[test]
    fn constant_competitor_at_centre() {
        let v = bergman_gram(&shapes::disc(1.0), &zero(), [0.0, 0.0], 0, &QuadConfig::default()).unwrap();
        assert!((v - 1.0 / PI).abs() < 1e-12);
        let v = bergman_gram(&shapes::disc(2.0), &zero(), [0.0, 0.0], 3, &QuadConfig::default()).unwrap();
        assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn degree_increases_toward_the_series() {
        let cfg = QuadConfig::default();
        let mut last = 0.0;
        for d in [4, 8, 16] {
            let v = bergman_gram(&shapes::disc(1.0), &zero(), [0.5, 0.0], d, &cfg).unwrap();
            assert!(v >= last);
            last = v;
        }
        assert!((last - 16.0 / (9.0 * PI)).abs() < 1e-6);
    }

    #[test]
    fn unbounded_fiber_rejected() {
        let r = bergman_gram(&shapes::complex_plane(), &zero(), [0.0, 0.0], 1, &QuadConfig::default());
        assert!(matches!(r, Err(Error::InvalidParam(_))));
    }

    #[test]
    fn disc_detection() {
        assert_eq!(disc_radius_about(&Csg::ball(vec![0.0, 0.0], 2.0), &[0.0, 0.0]), Some(2.0));
        assert_eq!(disc_radius_about(&Csg::ball(vec![0.1, 0.0], 2.0), &[0.0, 0.0]), None);
        assert_eq!(disc_radius_about(&Csg::Space, &[3.0, 0.0]), Some(f64::INFINITY));
        let hole = Csg::ball(vec![0.0, 0.0], 1.0).minus(Csg::ball(vec![0.0, 0.0], 0.5));
        assert_eq!(disc_radius_about(&hole, &[0.0, 0.0]), None);
    }
}
