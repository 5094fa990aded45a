use serde::{Deserialize, Serialize};

use super::csg::{Csg, Dist};
use crate::error::{Error, Result};
use crate::par;

/// Whether coordinates are real or complex (stored as re/im pairs).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordKind {
    Real,
    Complex,
}

impl CoordKind {
    /// Real coordinates per logical coordinate.
    pub fn width(self) -> usize {
        match self {
            CoordKind::Real => 1,
            CoordKind::Complex => 2,
        }
    }
}

/// An open set in base × fiber space. `split = [m, n]` counts logical
/// coordinates; for complex domains each occupies two real slots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub csg: Csg,
    pub split: [usize; 2],
    pub kind: CoordKind,
}

impl Domain {
    pub fn new(csg: Csg, m: usize, n: usize, kind: CoordKind) -> Self {
        Self { csg, split: [m, n], kind }
    }

    pub fn real(csg: Csg, m: usize, n: usize) -> Self {
        Self::new(csg, m, n, CoordKind::Real)
    }

    pub fn complex(csg: Csg, m: usize, n: usize) -> Self {
        Self::new(csg, m, n, CoordKind::Complex)
    }

    pub fn base_dim(&self) -> usize {
        self.split[0] * self.kind.width()
    }

    pub fn fiber_dim(&self) -> usize {
        self.split[1] * self.kind.width()
    }

    pub fn dim(&self) -> usize {
        self.base_dim() + self.fiber_dim()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.csg.contains(p)
    }

    pub fn contains_closed(&self, p: &[f64]) -> bool {
        self.csg.contains_closed(p)
    }

    pub fn join(t: &[f64], x: &[f64]) -> Vec<f64> {
        let mut p = Vec::with_capacity(t.len() + x.len());
        p.extend_from_slice(t);
        p.extend_from_slice(x);
        p
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// The slice `Ω_t = {x : (t, x) ∈ Ω}`.
#[derive(Clone, Debug)]
pub struct FiberDomain {
    parent: Domain,
    t: Vec<f64>,
    slice: Csg,
}

/// Fiber of `domain` over the base point `t` (real layout).
pub fn fiber(domain: &Domain, t: &[f64]) -> FiberDomain {
    let mut fixed: Vec<Option<f64>> = t.iter().map(|v| Some(*v)).collect();
    fixed.extend(std::iter::repeat_n(None, domain.fiber_dim()));
    FiberDomain { parent: domain.clone(), t: t.to_vec(), slice: domain.csg.restrict(&fixed) }
}

impl FiberDomain {
    /// The whole of ℝ^dim as a fiber (of the trivial domain with no base).
    pub fn whole(dim: usize) -> Self {
        fiber(&Domain::real(Csg::Space, 0, dim), &[])
    }

    /// A fiber given directly by a set in ℝ^dim.
    pub fn from_csg(csg: Csg, dim: usize) -> Self {
        fiber(&Domain::real(csg, 0, dim), &[])
    }

    pub fn parent(&self) -> &Domain {
        &self.parent
    }

    pub fn base_point(&self) -> &[f64] {
        &self.t
    }

    pub fn slice(&self) -> &Csg {
        &self.slice
    }

    /// Real dimension of the fiber.
    pub fn dim(&self) -> usize {
        self.parent.fiber_dim()
    }

    /// Exact membership: delegates to the parent at `(t, x)`.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.parent.contains(&Domain::join(&self.t, x))
    }

    pub fn contains_closed(&self, x: &[f64]) -> bool {
        self.parent.contains_closed(&Domain::join(&self.t, x))
    }

    pub fn bbox(&self) -> (Vec<f64>, Vec<f64>) {
        self.slice.bbox(self.dim())
    }

    /// Distance from `x` to the complement of the fiber.
    pub fn dist_to_complement(&self, x: &[f64]) -> Dist {
        self.slice.dist_to_complement(x)
    }

    /// Maximal open intervals of the line `{(prefix, s)}` inside the fiber,
    /// where `prefix` fixes all but the last fiber coordinate. Endpoints may be
    /// infinite. Points of measure zero removed from the fiber are ignored, so
    /// the result is unchanged by punctures.
    pub fn line_intervals(&self, prefix: &[f64]) -> Vec<(f64, f64)> {
        let d = self.dim();
        debug_assert_eq!(prefix.len() + 1, d);
        let line = if prefix.is_empty() {
            self.slice.clone()
        } else {
            let mut fixed: Vec<Option<f64>> = prefix.iter().map(|v| Some(*v)).collect();
            fixed.push(None);
            self.slice.restrict(&fixed)
        };
        let mut cuts = Vec::new();
        line.axis_breaks(0, &mut cuts);
        cuts.retain(|c| c.is_finite());
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut edges = Vec::with_capacity(cuts.len() + 2);
        edges.push(f64::NEG_INFINITY);
        edges.extend(cuts);
        edges.push(f64::INFINITY);

        let mut x = prefix.to_vec();
        x.push(0.0);
        let mut out: Vec<(f64, f64)> = Vec::new();
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid = match (a.is_finite(), b.is_finite()) {
                (true, true) => 0.5 * (a + b),
                (false, true) => b - 1.0,
                (true, false) => a + 1.0,
                (false, false) => 0.0,
            };
            x[d - 1] = mid;
            if self.contains(&x) {
                match out.last_mut() {
                    Some(last) if last.1 == a => last.1 = b,
                    _ => out.push((a, b)),
                }
            }
        }
        out
    }

    /// Coordinates along the first fiber axis where the shape of the
    /// line intervals can change (2-d fibers).
    pub fn first_axis_breaks(&self) -> Vec<f64> {
        let mut v = Vec::new();
        self.slice.axis_breaks(0, &mut v);
        v.retain(|c| c.is_finite());
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

/// An affine map `a(t) = x₀ + A(t − t₀)` from base to fiber. For complex
/// kind, `matrix` holds the n×m complex entries row-major as (re, im) pairs
/// and points use the real pair layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineFiberMap {
    pub kind: CoordKind,
    pub m: usize,
    pub n: usize,
    pub matrix: Vec<f64>,
    pub t0: Vec<f64>,
    pub x0: Vec<f64>,
}

impl AffineFiberMap {
    pub fn new(kind: CoordKind, m: usize, n: usize, matrix: Vec<f64>, t0: Vec<f64>, x0: Vec<f64>) -> Result<Self> {
        let w = kind.width();
        if matrix.len() != n * m * w || t0.len() != m * w || x0.len() != n * w {
            return Err(Error::InvalidParam("affine map dimensions do not match".into()));
        }
        Ok(Self { kind, m, n, matrix, t0, x0 })
    }

    /// The constant map `a ≡ x₀`.
    pub fn constant(kind: CoordKind, m: usize, x0: Vec<f64>) -> Self {
        let w = kind.width();
        let n = x0.len() / w;
        Self { kind, m, n, matrix: vec![0.0; n * m * w], t0: vec![0.0; m * w], x0 }
    }

    /// Real map with scalar base `a(t) = x₀ + slope·(t − t₀)`.
    pub fn real_line(slope: Vec<f64>, t0: f64, x0: Vec<f64>) -> Self {
        Self { kind: CoordKind::Real, m: 1, n: x0.len(), matrix: slope, t0: vec![t0], x0 }
    }

    /// Real map with scalar base through `(t0, x0)` and `(t1, x1)`.
    pub fn through_points(t0: f64, x0: Vec<f64>, t1: f64, x1: &[f64]) -> Result<Self> {
        if t0 == t1 {
            return Err(Error::InvalidParam("base points must differ".into()));
        }
        let slope = x0.iter().zip(x1).map(|(a, b)| (b - a) / (t1 - t0)).collect();
        Ok(Self::real_line(slope, t0, x0))
    }

    #[allow(clippy::needless_range_loop)]
    pub fn eval(&self, t: &[f64]) -> Vec<f64> {
        let mut x = self.x0.clone();
        match self.kind {
            CoordKind::Real => {
                for i in 0..self.n {
                    for j in 0..self.m {
                        x[i] += self.matrix[i * self.m + j] * (t[j] - self.t0[j]);
                    }
                }
            }
            CoordKind::Complex => {
                for i in 0..self.n {
                    for j in 0..self.m {
                        let k = 2 * (i * self.m + j);
                        let (ar, ai) = (self.matrix[k], self.matrix[k + 1]);
                        let (dr, di) = (t[2 * j] - self.t0[2 * j], t[2 * j + 1] - self.t0[2 * j + 1]);
                        x[2 * i] += ar * dr - ai * di;
                        x[2 * i + 1] += ar * di + ai * dr;
                    }
                }
            }
        }
        x
    }
}

/// `δ_Ω(t, x)`: distance from `x` to the complement of the fiber `Ω_t`.
pub fn fiber_distance(domain: &Domain, t: &[f64], x: &[f64]) -> Result<f64> {
    let p = Domain::join(t, x);
    if !domain.contains(&p) {
        return Err(Error::PointOutsideDomain(p));
    }
    let f = fiber(domain, t);
    let d = f.dist_to_complement(x);
    if d.exact {
        Ok(d.value)
    } else {
        Ok(trace_distance(f.slice(), x, d.value).value)
    }
}

/// `d_Ω(p)`: distance from `p` to the complement of the domain. Exact when
/// the CSG structure allows it; otherwise refined by ray marching and
/// flagged approximate.
pub fn boundary_distance(domain: &Domain, p: &[f64]) -> Result<Dist> {
    if !domain.contains(p) {
        return Err(Error::PointOutsideDomain(p.to_vec()));
    }
    let d = domain.csg.dist_to_complement(p);
    if d.exact {
        return Ok(d);
    }
    Ok(trace_distance(&domain.csg, p, d.value))
}

const TRACE_DIRECTIONS_PER_DIM: usize = 256;
const TRACE_MAX_STEPS: usize = 100_000;
const TRACE_REACH: f64 = 1e6;

/// Upper estimate of the distance from `p` to the complement of `csg`: the
/// nearest exit found along a fixed set of rays, each marched with steps no
/// longer than the lower-bound distance and finished by bisection.
fn trace_distance(csg: &Csg, p: &[f64], lower: f64) -> Dist {
    let d = p.len();
    let n_dirs = TRACE_DIRECTIONS_PER_DIM * d.max(1);
    let min_step = 1e-6 * lower.max(1e-3);
    let dirs = directions(d, n_dirs);
    let exits = par::map_slice(&dirs, |u| march(csg, p, u, min_step));
    let best = exits.into_iter().fold(f64::INFINITY, f64::min);
    Dist { value: best.max(lower), exact: false }
}

fn march(csg: &Csg, p: &[f64], u: &[f64], min_step: f64) -> f64 {
    let at = |s: f64| -> Vec<f64> { p.iter().zip(u).map(|(a, b)| a + s * b).collect() };
    let mut s = 0.0;
    let mut prev = 0.0;
    for _ in 0..TRACE_MAX_STEPS {
        let q = at(s);
        if !csg.contains(&q) {
            let (mut lo, mut hi) = (prev, s);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if csg.contains(&at(mid)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return hi;
        }
        let l = csg.dist_to_complement(&q).value;
        if l <= 1e-14 {
            return s;
        }
        prev = s;
        s += l.max(min_step);
        if s > TRACE_REACH {
            return f64::INFINITY;
        }
    }
    f64::INFINITY
}

/// Deterministic, roughly uniform unit vectors in ℝ^d.
fn directions(d: usize, count: usize) -> Vec<Vec<f64>> {
    if d == 1 {
        return vec![vec![1.0], vec![-1.0]];
    }
    if d == 2 {
        return (0..count)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
    }
    let mut state = 0x9E37_79B9_7F4A_7C15_u64;
    let mut next = move || {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        ((z >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    };
    let mut out = Vec::with_capacity(count + 2 * d);
    for axis in 0..d {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; d];
            v[axis] = s;
            out.push(v);
        }
    }
    while out.len() < count + 2 * d {
        let v: Vec<f64> = (0..d)
            .map(|_| {
                let (u1, u2) = (next(), next());
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            })
            .collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            out.push(v.iter().map(|x| x / n).collect());
        }
    }
    out
}

/// Whether the midpoint of `p0` and `p1` lies in the closure of the domain.
pub fn midpoint_closure_check(domain: &Domain, p0: &[f64], p1: &[f64]) -> bool {
    let mid: Vec<f64> = p0.iter().zip(p1).map(|(a, b)| 0.5 * (a + b)).collect();
    domain.contains_closed(&mid) || domain.csg.dist_to_set(&mid).value <= 1e-9
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes;

    #[test]
    fn fiber_of_the_unit_ball_is_a_disc() {
        let b = Domain::real(Csg::ball(vec![0.0; 3], 1.0), 1, 2);
        let f = fiber(&b, &[0.0]);
        assert!(f.contains(&[0.99, 0.0]));
        assert!(!f.contains(&[1.0, 0.0]));
        assert_eq!(f.bbox(), (vec![-1.0, -1.0], vec![1.0, 1.0]));
    }

    #[test]
    fn punctured_line_keeps_one_interval() {
        let d = Domain::real(Csg::Space.minus(Csg::ball(vec![0.0, 0.0], 0.0)), 1, 1);
        let f = fiber(&d, &[0.0]);
        assert!(!f.contains(&[0.0]));
        assert_eq!(f.line_intervals(&[]), vec![(f64::NEG_INFINITY, f64::INFINITY)]);
        let away = fiber(&d, &[0.5]);
        assert_eq!(away.line_intervals(&[]), vec![(f64::NEG_INFINITY, f64::INFINITY)]);
    }

    #[test]
    fn annulus_chord_has_two_intervals() {
        let ann = Csg::ball(vec![0.0, 0.0], 1.0).minus(Csg::ball(vec![0.0, 0.0], 0.5));
        let f = FiberDomain::from_csg(ann, 2);
        let iv = f.line_intervals(&[0.0]);
        assert_eq!(iv, vec![(-1.0, -0.5), (0.5, 1.0)]);
    }

    #[test]
    fn fiber_distances() {
        let bidisc = shapes::bidisc();
        assert_eq!(fiber_distance(&bidisc, &[0.0, 0.0], &[0.0, 0.0]).unwrap(), 1.0);
        assert!((fiber_distance(&bidisc, &[0.0, 0.0], &[0.7, 0.0]).unwrap() - 0.3).abs() < 1e-15);
        let ball = shapes::complex_ball(1.0);
        assert!((fiber_distance(&ball, &[0.6, 0.0], &[0.0, 0.0]).unwrap() - 0.8).abs() < 1e-15);
        assert!(matches!(fiber_distance(&bidisc, &[2.0, 0.0], &[0.0, 0.0]), Err(Error::PointOutsideDomain(_))));
    }

    #[test]
    fn boundary_distances() {
        let ball = Domain::real(Csg::ball(vec![0.0; 3], 1.0), 1, 2);
        assert_eq!(boundary_distance(&ball, &[0.0; 3]).unwrap().value, 1.0);
        let d = boundary_distance(&shapes::bidisc(), &[0.5, 0.0, 0.0, 0.0]).unwrap();
        assert!(d.exact && (d.value - 0.5).abs() < 1e-15);
        let h = boundary_distance(&shapes::hartogs(), &[0.0, 0.0, 0.25, 0.0]).unwrap();
        assert!(h.exact && (h.value - 0.25).abs() < 1e-15);
    }

    #[test]
    fn traced_distance_in_a_dumbbell() {
        let d = shapes::dumbbell();
        let got = boundary_distance(&d, &[-1.0, 0.0]).unwrap();
        assert!(!got.exact);
        // The left disc has radius 0.5; the tube enters it from above but the
        // nearest exit is still on the circle.
        assert!((got.value - 0.5).abs() < 1e-3, "{got:?}");
    }

    #[test]
    fn midpoints() {
        let ball = Domain::real(Csg::ball(vec![0.0; 3], 1.0), 1, 2);
        assert!(midpoint_closure_check(&ball, &[0.5, 0.2, 0.0], &[-0.3, 0.1, 0.4]));
        let punct = shapes::punctured_ball(1, 2);
        assert!(midpoint_closure_check(&punct, &[0.5, 0.0, 0.0], &[-0.5, 0.0, 0.0]));
        assert!(!midpoint_closure_check(&shapes::dumbbell(), &[-1.0, 0.0], &[1.0, 0.0]));
    }

    #[test]
    fn affine_maps() {
        let a = AffineFiberMap::through_points(0.0, vec![1.0], 2.0, &[5.0]).unwrap();
        assert_eq!(a.eval(&[0.0]), vec![1.0]);
        assert_eq!(a.eval(&[1.0]), vec![3.0]);
        let c = AffineFiberMap::new(CoordKind::Complex, 1, 1, vec![0.0, 1.0], vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
        // a(τ) = 1 + iτ
        assert_eq!(c.eval(&[2.0, 0.0]), vec![1.0, 2.0]);
    }

    #[test]
    fn domain_json_round_trips() {
        for d in [shapes::hartogs(), shapes::dumbbell(), shapes::bidisc(), shapes::punctured_ball(1, 1)] {
            let s = d.to_json().unwrap();
            assert_eq!(Domain::from_json(&s).unwrap(), d);
        }
    }
}
