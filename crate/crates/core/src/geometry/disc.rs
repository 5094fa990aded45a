use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::domain::{boundary_distance, Domain};
use crate::error::{Error, Result};
use crate::par;

/// Polynomial analytic disc `w ↦ (f(w), g_1(w), …, g_n(w))` on the closed
/// unit disc. Coefficients are listed from the constant term up.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticDisc {
    pub f_coeffs: Vec<[f64; 2]>,
    pub g_coeffs: Vec<Vec<[f64; 2]>>,
}

fn horner(coeffs: &[[f64; 2]], w: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + Complex64::new(c[0], c[1]))
}

impl AnalyticDisc {
    pub fn new(f_coeffs: Vec<[f64; 2]>, g_coeffs: Vec<Vec<[f64; 2]>>) -> Self {
        Self { f_coeffs, g_coeffs }
    }

    /// Complex components `(f(w), g(w))`.
    pub fn eval(&self, w: Complex64) -> Vec<Complex64> {
        std::iter::once(horner(&self.f_coeffs, w)).chain(self.g_coeffs.iter().map(|g| horner(g, w))).collect()
    }

    /// The disc point in real (re, im) layout.
    pub fn point(&self, w: Complex64) -> Vec<f64> {
        self.eval(w).iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub fn is_base_constant(&self) -> bool {
        self.f_coeffs.iter().skip(1).all(|c| c[0] == 0.0 && c[1] == 0.0)
    }
}

/// Interior versus boundary distance of a disc to `∂Ω`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscDistanceReport {
    /// Minimum of `d_Ω` over all samples (interior and boundary).
    pub d_disc: f64,
    /// Minimum of `d_Ω` over the boundary circle samples.
    pub d_boundary: f64,
    /// `d_boundary − d_disc`, never negative.
    pub gap: f64,
    /// Parameter `w` where the overall minimum was attained.
    pub witness: [f64; 2],
    /// Whether every distance was exact.
    pub exact: bool,
    pub samples: usize,
}

/// Compare the distance to the boundary of `domain` over the whole closed
/// disc with that over its boundary circle. Interior samples follow a Vogel
/// spiral; boundary samples are equally spaced.
pub fn disc_distance_check(
    disc: &AnalyticDisc,
    domain: &Domain,
    n_interior: usize,
    n_boundary: usize,
) -> Result<DiscDistanceReport> {
    if n_boundary == 0 {
        return Err(Error::InvalidParam("need at least one boundary sample".into()));
    }
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut params: Vec<Complex64> = (0..n_boundary)
        .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n_boundary as f64))
        .collect();
    params.extend((0..n_interior).map(|j| {
        let r = ((j as f64 + 0.5) / n_interior as f64).sqrt();
        Complex64::from_polar(r, golden * j as f64)
    }));

    let dists = par::try_map_slice(&params, |&w| {
        let p = disc.point(w);
        boundary_distance(domain, &p).map_err(|e| match e {
            Error::PointOutsideDomain(_) => Error::DiscEscapesDomain { re: w.re, im: w.im },
            other => other,
        })
    })?;

    let mut d_boundary = f64::INFINITY;
    let mut d_disc = f64::INFINITY;
    let mut witness = [0.0, 0.0];
    let mut exact = true;
    for (i, (w, d)) in params.iter().zip(&dists).enumerate() {
        exact &= d.exact;
        if i < n_boundary {
            d_boundary = d_boundary.min(d.value);
        }
        if d.value < d_disc {
            d_disc = d.value;
            witness = [w.re, w.im];
        }
    }
    Ok(DiscDistanceReport { d_disc, d_boundary, gap: d_boundary - d_disc, witness, exact, samples: params.len() })
}
