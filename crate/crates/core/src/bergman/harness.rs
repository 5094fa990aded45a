use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::gram::{bergman_gram, disc_radius_about, gram_kernel};
use super::{bergman_radial, radial_moments_with};
use crate::error::{Error, Result};
use crate::geometry::{fiber, fiber_distance, AffineFiberMap, CoordKind, Csg, Domain, FiberDomain};
use crate::numerics::{integrate_fiber_seamed, QuadConfig, Seam};
use crate::par;
use crate::weights::{lemma3_weight, paper_weight, psh_localizer, LocalizationSchedule, WeightField};

/// Kernel at the symmetry centre of a radial weight on a disc (or ℂ) of
/// radius `outer`: `1/m_0`.
fn centre_kernel(w: &WeightField, t: &[f64], outer: f64, cfg: &QuadConfig) -> Result<f64> {
    if w.profile(t, 0.0).is_none() {
        return Err(Error::MethodUnavailable(format!("`{}` is not radial", w.name())));
    }
    let mt =
        radial_moments_with(w.name(), |r| w.profile(t, r).unwrap_or(f64::INFINITY), 0, &w.radial_seams(t), outer, cfg)?;
    bergman_radial(&mt, 0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Row {
    pub k: u32,
    /// `B(0)` for the twisted weight.
    pub value: f64,
    /// `e^{φ(0)}`.
    pub target: f64,
    pub error: f64,
    /// `e^{sup_{|z| ≤ 1/k} φ}`.
    pub upper_bound: f64,
}

/// Kernel at the origin for `φ + ψ_k` with the complex localizer about 0, on
/// the disc of radius `outer` (`+∞` for ℂ). `φ` must be radial about 0 and
/// have no base variables.
pub fn lemma2_harness(
    phi: &WeightField,
    outer: f64,
    schedule: &LocalizationSchedule,
    cfg: &QuadConfig,
) -> Result<Vec<Lemma2Row>> {
    if phi.kind() != CoordKind::Complex || phi.split() != (0, 1) {
        return Err(Error::InvalidParam("expected a weight on ℂ with no base variables".into()));
    }
    let origin = AffineFiberMap::constant(CoordKind::Complex, 0, vec![0.0, 0.0]);
    let target = (phi.eval(&[], &[0.0, 0.0])).exp();
    par::try_map_slice(&schedule.ks, |&k| {
        let w = phi.sum(&psh_localizer(k, &origin, 1));
        let value = centre_kernel(&w, &[], outer, cfg)?;
        let reach = (1.0 / k as f64).min(outer);
        let sup = (0..=1000)
            .map(|i| phi.profile(&[], reach * i as f64 / 1000.0).unwrap_or(f64::INFINITY))
            .fold(f64::NEG_INFINITY, f64::max);
        Ok::<_, Error>(Lemma2Row { k, value, target, error: (value - target).abs(), upper_bound: sup.exp() })
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma3Row {
    pub k: u32,
    pub value: f64,
    /// `1/(|D ∩ B(0,r)| + tail_k)`: the constant competitor.
    pub lower_bound: f64,
    /// `1/(π r²)`, present only when `B(0, r) ⊂ D`.
    pub upper_bound: Option<f64>,
    pub within_bounds: bool,
}

/// `∫_{r<|z|<1} e^{−φ_k}` for the unit disc in closed form.
pub fn lemma3_tail(k: u32, r: f64) -> f64 {
    2.0 * PI * (r * r - r.powi(k as i32)) / (k as f64 - 2.0)
}

/// Kernel at 0 of a bounded domain in ℂ for `φ_k = k max(ln(|z|/r), 0)`,
/// bracketed by the constant competitor from below and by the sub-mean-value
/// bound from above.
pub fn lemma3_harness(
    domain: &Domain,
    r: f64,
    schedule: &LocalizationSchedule,
    degree: usize,
    cfg: &QuadConfig,
) -> Result<Vec<Lemma3Row>> {
    const SLACK: f64 = 1e-6;
    let origin = [0.0, 0.0];
    let inside_r = fiber_distance(domain, &[], &origin)? >= r;
    let near = Csg::Intersection(vec![domain.csg.clone(), Csg::ball(origin.to_vec(), r)]);
    let far = Csg::Intersection(vec![domain.csg.clone(), Csg::ball(origin.to_vec(), r).complement()]);
    let near = FiberDomain::from_csg(near, 2);
    let far = FiberDomain::from_csg(far, 2);
    let seam = [Seam::new(origin.to_vec(), r)];
    let area = integrate_fiber_seamed(|_| 1.0, &near, &seam, cfg)?;
    par::try_map_slice(&schedule.ks, |&k| {
        let w = lemma3_weight(k, r)?;
        let value = bergman_gram(domain, &w, origin, degree, cfg)?;
        let tail = integrate_fiber_seamed(|x| w.density(&[], x), &far, &seam, cfg)?;
        let lower_bound = 1.0 / (area + tail);
        let upper_bound = inside_r.then(|| 1.0 / (PI * r * r));
        Ok::<_, Error>(Lemma3Row {
            k,
            value,
            lower_bound,
            upper_bound,
            within_bounds: value >= lower_bound - SLACK && upper_bound.is_none_or(|u| value <= u + SLACK),
        })
    })
}

/// `∫_ℂ e^{−φ_z}` for the example weight, both branches.
pub fn berndtsson_m0_closed(eps: f64, abs_z: f64) -> f64 {
    let (e2, s) = (eps * eps, abs_z * abs_z);
    if abs_z >= eps {
        2.0 * PI / (1.0 - e2 + s).sqrt()
    } else {
        4.0 * PI - 2.0 * PI / (1.0 + e2 - s).sqrt()
    }
}

/// `Φ(z) = −ln ∫_ℂ e^{−φ_z}` in closed form.
pub fn berndtsson_phi_closed(eps: f64, abs_z: f64) -> f64 {
    let (e2, s) = (eps * eps, abs_z * abs_z);
    if abs_z >= eps {
        0.5 * (1.0 - e2 + s).ln() - (2.0 * PI).ln()
    } else {
        -(2.0 - 1.0 / (1.0 + e2 - s).sqrt()).ln() - (2.0 * PI).ln()
    }
}

/// `∂²Φ/∂z∂z̄` inside `|z| < ε` in closed form.
pub fn laplacian_closed(eps: f64, abs_z: f64) -> f64 {
    let (e2, s) = (eps * eps, abs_z * abs_z);
    let q = (1.0 + e2 - s).sqrt();
    ((2.0 + 2.0 * e2 + s) * q - (1.0 + e2)) / (2.0 * (1.0 + e2 - s).powi(2) * (2.0 * q - 1.0).powi(2))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiRow {
    pub z: [f64; 2],
    pub m0: f64,
    pub computed: f64,
    pub closed_form: f64,
}

fn berndtsson_phi(w: &WeightField, z: [f64; 2], cfg: &QuadConfig) -> Result<f64> {
    Ok(centre_kernel(w, &z, f64::INFINITY, cfg)?.ln())
}

/// `Φ(z)` through the moment path next to its closed form.
pub fn berndtsson_phi_curve(eps: f64, zs: &[[f64; 2]], cfg: &QuadConfig) -> Result<Vec<PhiRow>> {
    let w = paper_weight("berndtsson_cex", eps)?;
    par::try_map_slice(zs, |&z| {
        let computed = berndtsson_phi(&w, z, cfg)?;
        let a = z[0].hypot(z[1]);
        Ok::<_, Error>(PhiRow { z, m0: (-computed).exp(), computed, closed_form: berndtsson_phi_closed(eps, a) })
    })
}

/// The computed `Φ` as a function, for mean-value checks.
pub fn berndtsson_phi_fn(eps: f64, cfg: QuadConfig) -> Result<impl Fn([f64; 2]) -> f64 + Sync> {
    let w = paper_weight("berndtsson_cex", eps)?;
    Ok(move |z: [f64; 2]| berndtsson_phi(&w, z, &cfg).unwrap_or(f64::NAN))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplacianRow {
    pub z: [f64; 2],
    pub stencil: f64,
    pub closed_form: f64,
}

/// Five-point-stencil `∂∂̄Φ = ΔΦ/4` of the computed `Φ` against the closed
/// form, at points with `|z| + 2h < ε`.
pub fn laplacian_check(eps: f64, zs: &[[f64; 2]], h: f64, cfg: &QuadConfig) -> Result<Vec<LaplacianRow>> {
    if !(h > 0.0) {
        return Err(Error::InvalidParam("stencil step must be positive".into()));
    }
    if let Some(z) = zs.iter().find(|z| z[0].hypot(z[1]) + 2.0 * h >= eps) {
        return Err(Error::InvalidParam(format!("stencil at {z:?} reaches |z| ≥ ε")));
    }
    let w = paper_weight("berndtsson_cex", eps)?;
    par::try_map_slice(zs, |&z| {
        let f = |dx: f64, dy: f64| berndtsson_phi(&w, [z[0] + dx, z[1] + dy], cfg);
        let c = f(0.0, 0.0)?;
        let sum = f(h, 0.0)? + f(-h, 0.0)? + f(0.0, h)? + f(0.0, -h)?;
        Ok::<_, Error>(LaplacianRow {
            z,
            stencil: (sum - 4.0 * c) / (4.0 * h * h),
            closed_form: laplacian_closed(eps, z[0].hypot(z[1])),
        })
    })
}

/// How the fiber kernel is computed in [`uk_curve`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelMethod {
    /// Moment series; needs a radial weight on a disc or ℂ about `a(τ)`.
    Radial,
    /// Monomial Gram matrix of the given degree; needs a bounded fiber.
    Gram { degree: usize },
}

/// `u_k(τ) = ln B_{Ω_τ}(a(τ); e^{−φ_τ−ψ_{k,τ}})` on a grid of base points.
pub fn uk_curve(
    phi: &WeightField,
    domain: &Domain,
    a: &AffineFiberMap,
    k: u32,
    taus: &[[f64; 2]],
    method: KernelMethod,
    cfg: &QuadConfig,
) -> Result<Vec<f64>> {
    if domain.kind != CoordKind::Complex || domain.split != [1, 1] || phi.split() != (1, 1) {
        return Err(Error::InvalidParam("u_k needs ℂ×ℂ domains and weights".into()));
    }
    let w = phi.sum(&psh_localizer(k, a, 1));
    par::try_map_slice(taus, |tau| {
        let centre = a.eval(tau);
        let f = fiber(domain, tau);
        let b = match method {
            KernelMethod::Radial => {
                let outer = disc_radius_about(f.slice(), &centre)
                    .ok_or_else(|| Error::MethodUnavailable(format!("fiber over {tau:?} is not a disc about a(τ)")))?;
                centre_kernel(&w, tau, outer, cfg)?
            }
            KernelMethod::Gram { degree } => {
                let g = gram_kernel(&f, |x| w.eval(tau, x), &w.seams(tau), ("fiber", w.name()), degree, cfg).map_err(
                    |e| match e {
                        Error::InvalidParam(m) => Error::MethodUnavailable(m),
                        e => e,
                    },
                )?;
                g.kernel_at([centre[0], centre[1]])?
            }
        };
        Ok::<_, Error>(b.ln())
    })
}
