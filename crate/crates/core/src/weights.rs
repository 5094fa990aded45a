//! Weight fields `φ(t, x)` on base × fiber space and the localization
//! families built from them.
//!
//! Values live in `(−∞, +∞]`: constructors never produce `−∞` or NaN, and
//! `+∞` means `e^{−φ} = 0`. Metadata (lower bound, radial symmetry, seams) is
//! set by the constructors and never inferred.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AffineFiberMap, CoordKind};
use crate::numerics::{ball_volume, Seam};

type EvalFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
type SeamFn = Arc<dyn Fn(&[f64]) -> Vec<Seam> + Send + Sync>;

/// How a weight depends on the fiber variable.
#[derive(Clone, Debug, PartialEq)]
pub enum Radiality {
    /// No symmetry is declared.
    None,
    /// `φ(t, x)` depends on `x` only through `|x − a(t)|`.
    About(AffineFiberMap),
    /// `φ(t, x)` does not depend on `x` at all.
    Constant,
}

/// An extended-real weight with the metadata quadrature and kernels rely on.
#[derive(Clone)]
pub struct WeightField {
    name: String,
    kind: CoordKind,
    m: usize,
    n: usize,
    eval: EvalFn,
    lower_bound: Option<f64>,
    radial: Radiality,
    seams: SeamFn,
    /// `(c, R)`: `φ(t, x) ≥ c(|x| − R)` for `|x| ≥ R`.
    decay: Option<(f64, f64)>,
}

impl fmt::Debug for WeightField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightField")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("split", &(self.m, self.n))
            .field("lower_bound", &self.lower_bound)
            .field("radial", &self.radial)
            .field("decay", &self.decay)
            .finish()
    }
}

fn no_seams() -> SeamFn {
    Arc::new(|_| Vec::new())
}

fn dist(x: &[f64], a: &[f64]) -> f64 {
    x.iter().zip(a).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

impl WeightField {
    /// A weight from a closure, with no metadata.
    pub fn from_fn<F>(name: &str, kind: CoordKind, m: usize, n: usize, f: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.to_string(),
            kind,
            m,
            n,
            eval: Arc::new(f),
            lower_bound: None,
            radial: Radiality::None,
            seams: no_seams(),
            decay: None,
        }
    }

    /// The constant weight `c`.
    pub fn constant(c: f64, kind: CoordKind, m: usize, n: usize) -> Self {
        Self {
            lower_bound: Some(c),
            radial: Radiality::Constant,
            ..Self::from_fn(&format!("const({c})"), kind, m, n, move |_, _| c)
        }
    }

    pub fn zero(kind: CoordKind, m: usize, n: usize) -> Self {
        Self::constant(0.0, kind, m, n)
    }

    pub fn with_lower_bound(mut self, lb: f64) -> Self {
        self.lower_bound = Some(lb);
        self
    }

    pub fn with_radial(mut self, r: Radiality) -> Self {
        self.radial = r;
        self
    }

    /// Seams as a function of the base point.
    pub fn with_seams<F>(mut self, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<Seam> + Send + Sync + 'static,
    {
        self.seams = Arc::new(f);
        self
    }

    pub fn with_decay(mut self, rate: f64, radius: f64) -> Self {
        self.decay = Some((rate, radius));
        self
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> CoordKind {
        self.kind
    }

    /// Logical `(m, n)`.
    pub fn split(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn lower_bound(&self) -> Option<f64> {
        self.lower_bound
    }

    pub fn radial(&self) -> &Radiality {
        &self.radial
    }

    pub fn decay(&self) -> Option<(f64, f64)> {
        self.decay
    }

    /// `φ(t, x)` in real coordinate layout. NaN is mapped to `+∞`.
    pub fn eval(&self, t: &[f64], x: &[f64]) -> f64 {
        let v = (self.eval)(t, x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    /// `φ(p)` with `p = (t, x)` concatenated.
    pub fn eval_point(&self, p: &[f64]) -> f64 {
        let b = self.m * self.kind.width();
        self.eval(&p[..b], &p[b..])
    }

    /// `e^{−φ(t, x)}`, zero where `φ = +∞`.
    pub fn density(&self, t: &[f64], x: &[f64]) -> f64 {
        (-self.eval(t, x)).exp()
    }

    pub fn seams(&self, t: &[f64]) -> Vec<Seam> {
        (self.seams)(t)
    }

    /// Radii (about the symmetry centre) where the radial profile at `t` has
    /// seams. Empty unless the weight is radial.
    pub fn radial_seams(&self, t: &[f64]) -> Vec<f64> {
        match &self.radial {
            Radiality::About(a) => {
                let c = a.eval(t);
                self.seams(t).into_iter().filter(|s| s.center == c).map(|s| s.radius).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Radial profile `r ↦ φ(t, a(t) + r e₁)` for radial weights.
    pub fn profile(&self, t: &[f64], r: f64) -> Option<f64> {
        let centre = match &self.radial {
            Radiality::About(a) => a.eval(t),
            Radiality::Constant => vec![0.0; self.n * self.kind.width()],
            Radiality::None => return None,
        };
        let mut x = centre;
        x[0] += r;
        Some(self.eval(t, &x))
    }

    /// Pointwise sum. Lower bounds add; symmetry survives when compatible.
    pub fn sum(&self, other: &WeightField) -> WeightField {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let (s1, s2) = (self.seams.clone(), other.seams.clone());
        let radial = match (&self.radial, &other.radial) {
            (Radiality::Constant, r) | (r, Radiality::Constant) => r.clone(),
            (Radiality::About(a), Radiality::About(b)) if a == b => Radiality::About(a.clone()),
            _ => Radiality::None,
        };
        let decay = match (self.decay, other.decay, self.lower_bound, other.lower_bound) {
            (Some((c, r)), _, _, Some(lb)) | (_, Some((c, r)), Some(lb), _) => Some((c, r - lb.min(0.0) / c)),
            _ => None,
        };
        WeightField {
            name: format!("{}+{}", self.name, other.name),
            kind: self.kind,
            m: self.m,
            n: self.n,
            eval: Arc::new(move |t, x| f(t, x) + g(t, x)),
            lower_bound: match (self.lower_bound, other.lower_bound) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            },
            radial,
            seams: Arc::new(move |t| {
                let mut v = s1(t);
                v.extend(s2(t));
                v
            }),
            decay,
        }
    }

    /// `φ + c`.
    pub fn shift(&self, c: f64) -> WeightField {
        let f = self.eval.clone();
        WeightField {
            name: format!("{}{:+}", self.name, c),
            eval: Arc::new(move |t, x| f(t, x) + c),
            lower_bound: self.lower_bound.map(|lb| lb + c),
            decay: self.decay.map(|(rate, r)| (rate, r - c.min(0.0) / rate)),
            ..self.clone()
        }
    }
}

/// Real localizer `ψ_k(t, x) = k² max(|x − a(t)| − 1/k, 0) + ln(σ_n k^{−n})`.
pub fn convex_localizer(k: u32, a: &AffineFiberMap, n: usize) -> WeightField {
    let kf = k as f64;
    let c = (ball_volume(n) * kf.powi(-(n as i32))).ln();
    let amap = a.clone();
    let seam_map = a.clone();
    let inv = 1.0 / kf;
    WeightField::from_fn(&format!("convex_localizer(k={k})"), CoordKind::Real, a.m, n, move |t, x| {
        let r = dist(x, &amap.eval(t));
        kf * kf * (r - inv).max(0.0) + c
    })
    .with_lower_bound(c)
    .with_radial(Radiality::About(a.clone()))
    .with_seams(move |t| vec![Seam::new(seam_map.eval(t), inv)])
}

/// Complex localizer `ψ_k(τ, z) = k max(ln(k|z − a(τ)|), 0) + ln(σ_{2n} k^{−2n})`.
pub fn psh_localizer(k: u32, a: &AffineFiberMap, n: usize) -> WeightField {
    let kf = k as f64;
    let c = (ball_volume(2 * n) * kf.powi(-2 * n as i32)).ln();
    let amap = a.clone();
    let seam_map = a.clone();
    WeightField::from_fn(&format!("psh_localizer(k={k})"), CoordKind::Complex, a.m, n, move |t, z| {
        let r = dist(z, &amap.eval(t));
        kf * (kf * r).ln().max(0.0) + c
    })
    .with_lower_bound(c)
    .with_radial(Radiality::About(a.clone()))
    .with_seams(move |t| vec![Seam::new(seam_map.eval(t), 1.0 / kf)])
}

/// `φ_k(z) = k max(ln(|z|/r), 0)` on a one-dimensional complex fiber.
pub fn lemma3_weight(k: u32, r: f64) -> Result<WeightField> {
    if k < 1 || !(r > 0.0) {
        return Err(Error::InvalidParam("need k ≥ 1 and r > 0".into()));
    }
    let kf = k as f64;
    let origin = AffineFiberMap::constant(CoordKind::Complex, 0, vec![0.0, 0.0]);
    Ok(WeightField::from_fn(&format!("lemma3(k={k},r={r})"), CoordKind::Complex, 0, 1, move |_, z| {
        let s = (z[0] * z[0] + z[1] * z[1]).sqrt();
        kf * (s / r).ln().max(0.0)
    })
    .with_lower_bound(0.0)
    .with_radial(Radiality::About(origin))
    .with_seams(move |_| vec![Seam::new(vec![0.0, 0.0], r)]))
}

fn poly(coeffs: &[[f64; 2]], w: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + Complex64::new(c[0], c[1]))
}

/// `ψ_k(τ, z) = k max(ln|z − γ(τ)| + Re g(τ), 0)` for polynomial `γ` and `g`
/// in one base and one fiber variable.
pub fn disc_twist_weight(k: u32, gamma: &[[f64; 2]], g: &[[f64; 2]]) -> Result<WeightField> {
    if k < 3 {
        return Err(Error::InvalidParam(format!("disc twist needs k ≥ 3, got {k}")));
    }
    let kf = k as f64;
    let (gm, gg) = (gamma.to_vec(), g.to_vec());
    let (sm, sg) = (gamma.to_vec(), g.to_vec());
    Ok(WeightField::from_fn(&format!("disc_twist(k={k})"), CoordKind::Complex, 1, 1, move |t, z| {
        let tau = Complex64::new(t[0], t[1]);
        let c = poly(&gm, tau);
        let r = Complex64::new(z[0] - c.re, z[1] - c.im).norm();
        kf * (r.ln() + poly(&gg, tau).re).max(0.0)
    })
    .with_lower_bound(0.0)
    .with_seams(move |t| {
        let tau = Complex64::new(t[0], t[1]);
        let c = poly(&sm, tau);
        vec![Seam::new(vec![c.re, c.im], (-poly(&sg, tau).re).exp())]
    }))
}

/// The three closed-form weights of the worked examples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalogWeight {
    /// `|t² + x² − ε²|` on ℝ×ℝ.
    PrekopaCex,
    /// `(3/2) ln(1 + ||τ|² + |z|² − ε²|)` on ℂ×ℂ.
    BerndtssonCex,
    /// `|t² + x² − 1|` on ℝ×ℝ.
    MinprincipleCex,
}

impl FromStr for CatalogWeight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "prekopa_cex" => Ok(CatalogWeight::PrekopaCex),
            "berndtsson_cex" => Ok(CatalogWeight::BerndtssonCex),
            "minprinciple_cex" | "min_principle_cex" => Ok(CatalogWeight::MinprincipleCex),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

fn zero_set_seam(level: f64, t_sq: f64, width: usize) -> Vec<Seam> {
    let r2 = level - t_sq;
    if r2 > 0.0 {
        vec![Seam::new(vec![0.0; width], r2.sqrt())]
    } else {
        Vec::new()
    }
}

/// Build one of the example weights by name.
pub fn paper_weight(name: &str, eps: f64) -> Result<WeightField> {
    let which: CatalogWeight = name.parse()?;
    paper_weight_of(which, eps)
}

pub fn paper_weight_of(which: CatalogWeight, eps: f64) -> Result<WeightField> {
    let sq = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>();
    match which {
        CatalogWeight::PrekopaCex | CatalogWeight::BerndtssonCex => {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::InvalidParam(format!("ε = {eps} must lie in (0, 1)")));
            }
        }
        CatalogWeight::MinprincipleCex => {}
    }
    let e2 = eps * eps;
    Ok(match which {
        CatalogWeight::PrekopaCex => {
            let origin = AffineFiberMap::constant(CoordKind::Real, 1, vec![0.0]);
            WeightField::from_fn(&format!("prekopa_cex(eps={eps})"), CoordKind::Real, 1, 1, move |t, x| {
                (sq(t) + sq(x) - e2).abs()
            })
            .with_lower_bound(0.0)
            .with_radial(Radiality::About(origin))
            .with_seams(move |t| zero_set_seam(e2, sq(t), 1))
            .with_decay(2.0, 1.0)
        }
        CatalogWeight::MinprincipleCex => {
            let origin = AffineFiberMap::constant(CoordKind::Real, 1, vec![0.0]);
            WeightField::from_fn("minprinciple_cex", CoordKind::Real, 1, 1, move |t, x| (sq(t) + sq(x) - 1.0).abs())
                .with_lower_bound(0.0)
                .with_radial(Radiality::About(origin))
                .with_seams(move |t| zero_set_seam(1.0, sq(t), 1))
                .with_decay(2.0, 1.0)
        }
        CatalogWeight::BerndtssonCex => {
            let origin = AffineFiberMap::constant(CoordKind::Complex, 1, vec![0.0, 0.0]);
            WeightField::from_fn(&format!("berndtsson_cex(eps={eps})"), CoordKind::Complex, 1, 1, move |t, z| {
                1.5 * (1.0 + (sq(t) + sq(z) - e2).abs()).ln()
            })
            .with_lower_bound(0.0)
            .with_radial(Radiality::About(origin))
            .with_seams(move |t| zero_set_seam(e2, sq(t), 2))
        }
    })
}

/// Weight descriptor as it appears in scenario configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

impl WeightSpec {
    pub fn build(&self) -> Result<WeightField> {
        let need_k = || self.k.ok_or_else(|| Error::InvalidParam(format!("weight `{}` needs k", self.name)));
        match self.name.replace('-', "_").as_str() {
            "convex_localizer" => {
                Ok(convex_localizer(need_k()?, &AffineFiberMap::constant(CoordKind::Real, 1, vec![0.0]), 1))
            }
            "psh_localizer" => {
                Ok(psh_localizer(need_k()?, &AffineFiberMap::constant(CoordKind::Complex, 1, vec![0.0, 0.0]), 1))
            }
            "lemma3" => lemma3_weight(need_k()?, self.r.unwrap_or(0.5)),
            _ => paper_weight(&self.name, self.epsilon.unwrap_or(0.1)),
        }
    }
}

/// Localization parameters `k` with the radii `δ_k = k^{(2n+1)/k − 1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationSchedule {
    pub ks: Vec<u32>,
    pub n: usize,
}

impl LocalizationSchedule {
    pub fn new(ks: Vec<u32>, n: usize) -> Result<Self> {
        if ks.is_empty() || ks[0] < 1 || ks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParam("schedule must be a non-empty increasing list of k ≥ 1".into()));
        }
        Ok(Self { ks, n })
    }

    pub fn delta(k: u32, n: usize) -> f64 {
        let kf = k as f64;
        kf.powf((2 * n + 1) as f64 / kf - 1.0)
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.ks.iter().map(|&k| Self::delta(k, self.n)).collect()
    }

    /// `k·δ_k` along the schedule.
    pub fn k_deltas(&self) -> Vec<f64> {
        self.ks.iter().map(|&k| k as f64 * Self::delta(k, self.n)).collect()
    }
}
