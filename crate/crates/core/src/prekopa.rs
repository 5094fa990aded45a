//! Marginal transforms `φ̃(t) = −ln ∫_{Ω_t} e^{−φ(t,·)}`, their twisted
//! variants, the infimal transform, and grid convexity checks.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{fiber, AffineFiberMap, Domain};
use crate::numerics::{integrate_fiber_seamed, integrate_line, minimize_in_box, MinConfig, QuadConfig};
use crate::par;
use crate::weights::{convex_localizer, LocalizationSchedule, WeightField};

/// Quadrature settings adjusted to a weight's declared decay envelope.
pub(crate) fn cfg_for(w: &WeightField, cfg: &QuadConfig) -> QuadConfig {
    match w.decay() {
        Some((c, r)) if cfg.tail_growth_bound <= 0.0 => {
            QuadConfig { tail_growth_bound: c, tail_radius: cfg.tail_radius.max(r), ..*cfg }
        }
        _ => *cfg,
    }
}

/// `∫_{Ω_t} e^{−φ(t, x)} dx`.
pub fn fiber_mass(phi: &WeightField, domain: &Domain, t: &[f64], cfg: &QuadConfig) -> Result<f64> {
    let f = fiber(domain, t);
    let seams = phi.seams(t);
    integrate_fiber_seamed(|x| phi.density(t, x), &f, &seams, &cfg_for(phi, cfg))
}

fn neg_log(mass: f64) -> f64 {
    if mass > 0.0 {
        -mass.ln()
    } else {
        f64::INFINITY
    }
}

/// `φ̃(t) = −ln ∫_{Ω_t} e^{−φ(t, ·)}`; `+∞` when the fiber carries no mass.
pub fn marginal_transform(phi: &WeightField, domain: &Domain, t: &[f64], cfg: &QuadConfig) -> Result<f64> {
    Ok(neg_log(fiber_mass(phi, domain, t, cfg)?))
}

/// `ψ̃(t) = −ln ∫_{Ω_t} e^{−φ(t, ·) − ψ(t, ·)}` for a twist `ψ` that is
/// bounded below.
pub fn twisted_marginal(
    phi: &WeightField,
    psi: &WeightField,
    domain: &Domain,
    t: &[f64],
    cfg: &QuadConfig,
) -> Result<f64> {
    if psi.lower_bound().is_none() {
        return Err(Error::MissingLowerBound(psi.name().to_string()));
    }
    marginal_transform(&phi.sum(psi), domain, t, cfg)
}

/// Sampled marginal values on a base grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalCurve {
    pub ts: Vec<f64>,
    #[serde(with = "crate::extended::vec")]
    pub values: Vec<f64>,
    pub quad_cfg: QuadConfig,
}

impl MarginalCurve {
    /// `φ̃` on a grid of scalar base points (computed in parallel).
    pub fn sample(phi: &WeightField, domain: &Domain, ts: &[f64], cfg: &QuadConfig) -> Result<Self> {
        check_grid(ts)?;
        let values = par::try_map_slice(ts, |&t| marginal_transform(phi, domain, &[t], cfg))?;
        Ok(Self { ts: ts.to_vec(), values, quad_cfg: *cfg })
    }

    /// Twisted marginal on a grid.
    pub fn sample_twisted(
        phi: &WeightField,
        psi: &WeightField,
        domain: &Domain,
        ts: &[f64],
        cfg: &QuadConfig,
    ) -> Result<Self> {
        check_grid(ts)?;
        if psi.lower_bound().is_none() {
            return Err(Error::MissingLowerBound(psi.name().to_string()));
        }
        let w = phi.sum(psi);
        let values = par::try_map_slice(ts, |&t| marginal_transform(&w, domain, &[t], cfg))?;
        Ok(Self { ts: ts.to_vec(), values, quad_cfg: *cfg })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "value"])?;
        for (t, v) in self.ts.iter().zip(&self.values) {
            w.write_record([crate::extended::fmt(*t), crate::extended::fmt(*v)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

fn check_grid(ts: &[f64]) -> Result<()> {
    if ts.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParam("base grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Evenly spaced grid of `n ≥ 2` points on `[a, b]` with exact endpoints.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()
}

/// One row of the localization harness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationRow {
    pub k: u32,
    #[serde(with = "crate::extended")]
    pub value: f64,
    #[serde(with = "crate::extended")]
    pub error: f64,
}

/// `ψ̃_k(t)` for the real localizer about `a` along a schedule, with the
/// distance to the target `φ(t, a(t))`.
pub fn lemma1_harness(
    phi: &WeightField,
    domain: &Domain,
    a: &AffineFiberMap,
    t: &[f64],
    schedule: &LocalizationSchedule,
    cfg: &QuadConfig,
) -> Result<Vec<LocalizationRow>> {
    let at = a.eval(t);
    let target = phi.eval(t, &at);
    let n = domain.fiber_dim();
    par::try_map_slice(&schedule.ks, |&k| {
        let psi = convex_localizer(k, a, n);
        let value = twisted_marginal(phi, &psi, domain, t, cfg)?;
        Ok(LocalizationRow { k, value, error: (value - target).abs() })
    })
}

/// Twisted values at the two ends and at the midpoint of a base segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MidpointRow {
    pub k: u32,
    #[serde(with = "crate::extended")]
    pub at_t0: f64,
    #[serde(with = "crate::extended")]
    pub at_t1: f64,
    #[serde(with = "crate::extended")]
    pub at_mid: f64,
    /// `ψ̃(t*) − (ψ̃(t₀) + ψ̃(t₁))/2`.
    #[serde(with = "crate::extended")]
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MidpointProbe {
    pub rows: Vec<MidpointRow>,
    /// True when the midpoint exceeds the chord by more than 1 at the
    /// largest `k`.
    pub obstruction_found: bool,
}

/// Follow the twisted marginals along the localizer through `p0` and `p1`
/// and watch the midpoint inequality.
pub fn midpoint_divergence_probe(
    phi: &WeightField,
    domain: &Domain,
    p0: &[f64],
    p1: &[f64],
    schedule: &LocalizationSchedule,
    cfg: &QuadConfig,
) -> Result<MidpointProbe> {
    let m = domain.base_dim();
    if m != 1 {
        return Err(Error::InvalidParam("midpoint probe needs a one-dimensional real base".into()));
    }
    for p in [p0, p1] {
        if !domain.contains(p) {
            return Err(Error::PointOutsideDomain(p.to_vec()));
        }
    }
    let (t0, t1) = (p0[0], p1[0]);
    let a = AffineFiberMap::through_points(t0, p0[1..].to_vec(), t1, &p1[1..])?;
    let tm = 0.5 * (t0 + t1);
    let n = domain.fiber_dim();
    let rows = par::try_map_slice(&schedule.ks, |&k| {
        let psi = convex_localizer(k, &a, n);
        let v0 = twisted_marginal(phi, &psi, domain, &[t0], cfg)?;
        let v1 = twisted_marginal(phi, &psi, domain, &[t1], cfg)?;
        let vm = twisted_marginal(phi, &psi, domain, &[tm], cfg)?;
        let chord = 0.5 * (v0 + v1);
        let excess = if vm.is_infinite() && chord.is_finite() { f64::INFINITY } else { vm - chord };
        Ok::<_, Error>(MidpointRow { k, at_t0: v0, at_t1: v1, at_mid: vm, excess })
    })?;
    let obstruction_found = rows.last().map(|r| r.excess > 1.0).unwrap_or(false);
    Ok(MidpointProbe { rows, obstruction_found })
}

/// `u_k(t) = inf_x (φ(t, x) + k|x − a(t)|)` over the fiber.
pub fn min_principle_transform(
    phi: &WeightField,
    domain: &Domain,
    a: &AffineFiberMap,
    k: f64,
    t: &[f64],
    mcfg: &MinConfig,
) -> Result<f64> {
    let f = fiber(domain, t);
    let at = a.eval(t);
    let pinned = if f.contains(&at) { phi.eval(t, &at) } else { f64::INFINITY };
    // The penalty confines minimisers to |x − a(t)| ≤ (φ(t,a(t)) − inf φ)/k.
    let radius = match phi.lower_bound() {
        Some(lb) if pinned.is_finite() && k > 0.0 => (pinned - lb) / k + 1.0,
        _ => mcfg.search_radius,
    };
    let lo: Vec<f64> = at.iter().map(|c| c - radius).collect();
    let hi: Vec<f64> = at.iter().map(|c| c + radius).collect();
    let objective = |x: &[f64]| {
        let d = x.iter().zip(&at).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
        phi.eval(t, x) + k * d
    };
    let (_, v) = minimize_in_box(objective, &f, &lo, &hi, mcfg)?;
    Ok(v.min(pinned))
}

/// `inf_x φ(t, x)` over the fiber (the untwisted infimal transform).
pub fn fiber_infimum(phi: &WeightField, domain: &Domain, t: &[f64], mcfg: &MinConfig) -> Result<f64> {
    let f = fiber(domain, t);
    let (_, v) = crate::numerics::minimize_over_fiber(|x| phi.eval(t, x), &f, mcfg)?;
    Ok(v)
}

/// Outcome of a midpoint-convexity scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub checked: usize,
    /// Largest `f(t_l) − chord(t_l)` over checked pairs.
    #[serde(with = "crate::extended")]
    pub worst_violation: f64,
    /// `(t_i, t_j, t_l)` for the worst pair.
    pub witness: [f64; 3],
    pub tol: f64,
    /// Largest distance between a pair's exact midpoint and the grid point
    /// used for it. Diagnostic only; not part of the JSON report.
    #[serde(skip)]
    pub grid_offset: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// Violation of convexity for the pair `(i, j)`: the grid point `l` nearest
/// the midpoint is compared with the chord evaluated at `t_l` itself, so the
/// test is exact on the grid. `None` when the pair is skipped.
pub fn pair_violation(ts: &[f64], fs: &[f64], i: usize, j: usize) -> Option<(f64, usize, f64)> {
    if j < i + 2 || !fs[i].is_finite() || !fs[j].is_finite() {
        return None;
    }
    let mid = 0.5 * (ts[i] + ts[j]);
    let l = match ts[i + 1..j].binary_search_by(|x| x.total_cmp(&mid)) {
        Ok(p) => i + 1 + p,
        Err(p) => {
            let hi = (i + 1 + p).min(j - 1);
            let lo = (i + p).max(i + 1);
            if (ts[hi] - mid).abs() < (mid - ts[lo]).abs() {
                hi
            } else {
                lo
            }
        }
    };
    let chord = fs[i] + (fs[j] - fs[i]) * (ts[l] - ts[i]) / (ts[j] - ts[i]);
    let v = if fs[l].is_infinite() { f64::INFINITY } else { fs[l] - chord };
    Some((v, l, (ts[l] - mid).abs()))
}

/// Check midpoint convexity over every grid pair `j ≥ i + 2`.
pub fn convexity_check(ts: &[f64], fs: &[f64], tol: f64) -> Result<ConvexityReport> {
    if ts.len() < 3 || ts.len() != fs.len() {
        return Err(Error::InvalidParam("need at least three samples of matching length".into()));
    }
    check_grid(ts)?;
    let n = ts.len();
    // Per-row results reduced in row order: first strict maximum wins.
    let rows = par::map_range(n, |i| {
        let mut best: Option<(f64, [f64; 3])> = None;
        let mut count = 0;
        let mut offset = 0.0_f64;
        for j in i + 2..n {
            if let Some((v, l, off)) = pair_violation(ts, fs, i, j) {
                count += 1;
                offset = offset.max(off);
                if best.is_none_or(|b| v > b.0) {
                    best = Some((v, [ts[i], ts[j], ts[l]]));
                }
            }
        }
        (count, offset, best)
    });
    let mut checked = 0;
    let mut grid_offset = 0.0_f64;
    let mut worst = f64::NEG_INFINITY;
    let mut witness = [f64::NAN; 3];
    for (c, off, best) in rows {
        checked += c;
        grid_offset = grid_offset.max(off);
        if let Some((v, w)) = best {
            if v > worst {
                worst = v;
                witness = w;
            }
        }
    }
    Ok(ConvexityReport {
        checked,
        worst_violation: worst,
        witness,
        tol,
        grid_offset,
        verdict: Verdict::from_bool(worst <= tol),
    })
}

/// Convexity check of a function sampled on a grid.
pub fn convexity_check_fn<F: Fn(f64) -> f64 + Sync>(f: F, ts: &[f64], tol: f64) -> Result<ConvexityReport> {
    let fs = par::map_slice(ts, |&t| f(t));
    convexity_check(ts, &fs, tol)
}

/// `−ln ∫_ℝ e^{−φ(t e₁ + s e₂)} ds` for a weight on ℝ×ℝ.
pub fn directional_marginal(phi: &WeightField, e1: [f64; 2], e2: [f64; 2], t: f64, cfg: &QuadConfig) -> Result<f64> {
    let det = e1[0] * e2[1] - e1[1] * e2[0];
    if det.abs() < 1e-12 {
        return Err(Error::InvalidParam("directions must be linearly independent".into()));
    }
    // Seams given as fiber spheres over t = 0 are circles about the origin
    // for the radial example weights; locate where the line crosses them.
    let mut breaks = Vec::new();
    let (aa, bb) = (e2[0] * e2[0] + e2[1] * e2[1], t * (e1[0] * e2[0] + e1[1] * e2[1]));
    let cc = t * t * (e1[0] * e1[0] + e1[1] * e1[1]);
    breaks.push(-bb / aa);
    for s in phi.seams(&[0.0]) {
        let off = s.center.iter().map(|c| c * c).sum::<f64>();
        if off == 0.0 {
            let disc = bb * bb - aa * (cc - s.radius * s.radius);
            if disc >= 0.0 {
                breaks.push((-bb - disc.sqrt()) / aa);
                breaks.push((-bb + disc.sqrt()) / aa);
            }
        }
    }
    let c = cfg_for(phi, cfg);
    let mass = integrate_line(
        |s| phi.density(&[t * e1[0] + s * e2[0]], &[t * e1[1] + s * e2[1]]),
        f64::NEG_INFINITY,
        f64::INFINITY,
        &breaks,
        &c,
    )?;
    Ok(neg_log(mass))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{shapes, CoordKind, Csg};
    use crate::weights::paper_weight;
    use std::f64::consts::PI;

    fn gaussian2() -> WeightField {
        WeightField::from_fn("t2+x2", CoordKind::Real, 1, 1, |t, x| t[0] * t[0] + x[0] * x[0]).with_lower_bound(0.0)
    }

    #[test]
    fn gaussian_marginal() {
        let cfg = QuadConfig::default();
        let v = marginal_transform(&gaussian2(), &shapes::real_space(1, 1), &[1.0], &cfg).unwrap();
        assert!((v - (1.0 - PI.sqrt().ln())).abs() < 1e-12);
        assert!((v - 0.427_635_1).abs() < 1e-7);
    }

    #[test]
    fn example_marginal_closed_form() {
        let phi = paper_weight("prekopa_cex", 0.1).unwrap();
        let v = marginal_transform(&phi, &shapes::real_space(1, 1), &[0.3], &QuadConfig::default()).unwrap();
        assert!((v - (0.09 - 0.01 - PI.sqrt().ln())).abs() < 1e-10);
    }

    #[test]
    fn empty_fiber_is_infinite() {
        let d = Domain::real(Csg::ball(vec![0.0, 0.0], 1.0), 1, 1);
        let v = marginal_transform(&gaussian2(), &d, &[2.0], &QuadConfig::default()).unwrap();
        assert_eq!(v, f64::INFINITY);
    }

    #[test]
    fn twist_needs_lower_bound() {
        let psi = WeightField::from_fn("raw", CoordKind::Real, 1, 1, |_, _| 0.0);
        let r = twisted_marginal(&gaussian2(), &psi, &shapes::real_space(1, 1), &[0.0], &QuadConfig::default());
        assert!(matches!(r, Err(Error::MissingLowerBound(_))));
    }

    #[test]
    fn convexity_examples() {
        let ts = linspace(-1.0, 1.0, 101);
        let r = convexity_check_fn(|t| t * t, &ts, 1e-15).unwrap();
        assert!(r.verdict.passed() && r.worst_violation <= 1e-15);

        let ts = linspace(-0.1, 0.1, 201);
        let fs: Vec<f64> = ts.iter().map(|t| (t * t - 0.01f64).abs()).collect();
        let r = convexity_check(&ts, &fs, 1e-7).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let i = ts.iter().position(|t| (t + 0.08).abs() < 1e-12).unwrap();
        let j = ts.iter().position(|t| (t - 0.08).abs() < 1e-12).unwrap();
        let (v, l, _) = pair_violation(&ts, &fs, i, j).unwrap();
        assert!((v - 0.0064).abs() < 1e-12 && ts[l].abs() < 1e-15);
        assert!(r.worst_violation >= v);
    }

    #[test]
    fn infinite_endpoints_are_skipped() {
        let ts = linspace(0.0, 4.0, 5);
        let fs = [f64::INFINITY, 1.0, 5.0, 1.0, f64::INFINITY];
        let r = convexity_check(&ts, &fs, 0.0).unwrap();
        assert_eq!(r.checked, 1);
        assert_eq!(r.worst_violation, 4.0);
    }

    #[test]
    fn curve_csv() {
        let c =
            MarginalCurve { ts: vec![0.0, 0.5], values: vec![1.25, f64::INFINITY], quad_cfg: QuadConfig::default() };
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,value\n0.0,1.25\n0.5,inf\n");
    }

    #[test]
    fn directional_matches_marginal() {
        let phi = paper_weight("prekopa_cex", 0.1).unwrap();
        let cfg = QuadConfig::default();
        for t in [0.0, 0.05, 0.3] {
            let a = directional_marginal(&phi, [1.0, 0.0], [0.0, 1.0], t, &cfg).unwrap();
            let b = marginal_transform(&phi, &shapes::real_space(1, 1), &[t], &cfg).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
        let g = directional_marginal(&gaussian2(), [1.0, 0.0], [0.0, 1.0], 0.0, &cfg).unwrap();
        assert!((g + PI.sqrt().ln()).abs() < 1e-12);
    }

    #[test]
    fn min_principle_values() {
        let phi = paper_weight("minprinciple_cex", 0.0).unwrap();
        let d = shapes::real_space(1, 1);
        let a = AffineFiberMap::constant(CoordKind::Real, 1, vec![0.0]);
        let m = MinConfig::default();
        assert_eq!(min_principle_transform(&phi, &d, &a, 64.0, &[0.0], &m).unwrap(), 1.0);
        assert!((min_principle_transform(&phi, &d, &a, 1024.0, &[2.0], &m).unwrap() - 3.0).abs() < 1e-3);
    }
}
