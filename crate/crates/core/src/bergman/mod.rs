//! Weighted Bergman kernels on one-dimensional complex fibers.
//!
//! Two representations: for radial weights the monomials are orthogonal and
//! the kernel is the series `Σ ρ^{2k}/m_k` over the finite moments; for
//! bounded fibers the kernel is approximated from below by the Gram matrix of
//! the monomials up to a fixed degree.

mod gram;
mod harness;
mod psh;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_line, QuadConfig};
use crate::par;

pub use gram::{bergman_gram, disc_radius_about, gram_kernel, GramKernel};
pub use harness::{
    berndtsson_m0_closed, berndtsson_phi_closed, berndtsson_phi_curve, berndtsson_phi_fn, laplacian_check,
    laplacian_closed, lemma2_harness, lemma3_harness, lemma3_tail, uk_curve, KernelMethod, LaplacianRow, Lemma2Row,
    Lemma3Row, PhiRow,
};
pub use psh::{psh_mean_value_check, PshReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentStatus {
    Finite,
    Divergent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moment {
    #[serde(with = "crate::extended")]
    pub value: f64,
    pub status: MomentStatus,
}

/// `m_k = ∫ |w|^{2k} e^{−φ(|w|)} dλ_w` for `k = 0..=K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub weight: String,
    pub moments: Vec<Moment>,
}

impl MomentTable {
    pub fn m0(&self) -> Moment {
        self.moments[0]
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "value", "status"])?;
        for (k, m) in self.moments.iter().enumerate() {
            let status = match m.status {
                MomentStatus::Finite => "finite",
                MomentStatus::Divergent => "divergent",
            };
            w.write_record([k.to_string(), crate::extended::fmt(m.value), status.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Radial moments over the whole plane with no declared seams.
pub fn radial_moments<P>(profile: P, k_max: usize, cfg: &QuadConfig) -> Result<MomentTable>
where
    P: Fn(f64) -> f64 + Sync,
{
    radial_moments_with("profile", profile, k_max, &[], f64::INFINITY, cfg)
}

/// `m_k = 2π ∫_0^R r^{2k+1} e^{−φ(r)} dr`, evaluated as
/// `exp((2k+1) ln r − φ(r))` so large powers never meet underflowed
/// densities. A divergent tail marks the moment divergent instead of failing.
pub fn radial_moments_with<P>(
    name: &str,
    profile: P,
    k_max: usize,
    seams: &[f64],
    outer: f64,
    cfg: &QuadConfig,
) -> Result<MomentTable>
where
    P: Fn(f64) -> f64 + Sync,
{
    if !(outer > 0.0) {
        return Err(Error::InvalidParam("outer radius must be positive".into()));
    }
    let breaks: Vec<f64> = seams.iter().copied().filter(|r| *r > 0.0 && *r < outer).collect();
    let moments = par::try_map_range(k_max + 1, |k| {
        let p = (2 * k + 1) as f64;
        let integrand = |r: f64| {
            if r <= 0.0 {
                return 0.0;
            }
            let phi = profile(r);
            if phi.is_nan() || phi == f64::INFINITY {
                0.0
            } else {
                (p * r.ln() - phi).exp()
            }
        };
        match integrate_line(integrand, 0.0, outer, &breaks, cfg) {
            Ok(v) => Ok(Moment { value: 2.0 * std::f64::consts::PI * v, status: MomentStatus::Finite }),
            Err(Error::DivergentIntegral { .. }) => {
                Ok(Moment { value: f64::INFINITY, status: MomentStatus::Divergent })
            }
            Err(e) => Err(e),
        }
    })?;
    Ok(MomentTable { weight: name.to_string(), moments })
}

/// `Σ_{k: m_k finite} ρ^{2k}/m_k`.
pub fn bergman_radial(mt: &MomentTable, rho: f64) -> Result<f64> {
    if mt.m0().status == MomentStatus::Divergent || !(mt.m0().value > 0.0) {
        return Err(Error::ZeroKernel);
    }
    let r2 = rho * rho;
    let mut sum = 0.0;
    let mut pow = 1.0;
    for m in &mt.moments {
        if m.status == MomentStatus::Finite && m.value > 0.0 {
            sum += pow / m.value;
        }
        pow *= r2;
    }
    Ok(sum)
}

/// Kernel values along a list of points, as CSV `z_re,z_im,value`.
pub fn write_kernel_csv<W: Write>(out: W, points: &[([f64; 2], f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["z_re", "z_im", "value"])?;
    for (z, v) in points {
        w.write_record([crate::extended::fmt(z[0]), crate::extended::fmt(z[1]), crate::extended::fmt(*v)])?;
    }
    w.flush()?;
    Ok(())
}
