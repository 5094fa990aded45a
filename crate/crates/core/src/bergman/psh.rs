use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::prekopa::Verdict;

/// Outcome of a sampled sub-mean-value check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PshReport {
    pub centers_checked: usize,
    pub radii: Vec<f64>,
    /// Largest `u(c) − mean_{|z−c|=ρ} u`.
    #[serde(with = "crate::extended")]
    pub worst_deficit: f64,
    /// `(c_re, c_im, ρ)` of the worst circle.
    pub witness: [f64; 3],
    pub tol: f64,
    pub verdict: Verdict,
}

/// Compare `u(c)` with trapezoidal circle means on every centre/radius pair.
pub fn psh_mean_value_check<U>(
    u: U,
    centers: &[[f64; 2]],
    radii: &[f64],
    n_angles: usize,
    tol: f64,
) -> Result<PshReport>
where
    U: Fn([f64; 2]) -> f64 + Sync,
{
    if centers.is_empty() || radii.is_empty() || n_angles < 3 {
        return Err(Error::InvalidParam("need centres, radii and at least three angles".into()));
    }
    let jobs: Vec<([f64; 2], f64)> = centers.iter().flat_map(|c| radii.iter().map(move |r| (*c, *r))).collect();
    let deficits = par::map_slice(&jobs, |&(c, r)| {
        let mean = (0..n_angles)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / n_angles as f64;
                u([c[0] + r * th.cos(), c[1] + r * th.sin()])
            })
            .sum::<f64>()
            / n_angles as f64;
        let d = u(c) - mean;
        if d.is_nan() {
            f64::INFINITY
        } else {
            d
        }
    });
    let mut worst = f64::NEG_INFINITY;
    let mut witness = [f64::NAN; 3];
    for ((c, r), d) in jobs.iter().zip(&deficits) {
        if *d > worst {
            worst = *d;
            witness = [c[0], c[1], *r];
        }
    }
    Ok(PshReport {
        centers_checked: centers.len(),
        radii: radii.to_vec(),
        worst_deficit: worst,
        witness,
        tol,
        verdict: Verdict::from_bool(worst <= tol),
    })
}
