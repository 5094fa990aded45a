//! Constructive solid geometry over balls, boxes and half-spaces.
//!
//! Every node answers two membership questions: whether a point lies in the
//! open set it represents and whether it lies in that set's closure. A
//! complement swaps the two, so `Complement(closed ball)` is the open exterior
//! and punctures such as "ball minus a point" are expressible exactly.

use serde::{Deserialize, Serialize};

/// Node of a CSG tree. Coordinates are real; complex domains store each
/// complex coordinate as a (re, im) pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Csg {
    /// The whole space.
    Space,
    /// Open ball `|p_A − center| < radius` over the coordinates `A = axes`
    /// (all coordinates `0..center.len()` when omitted). Restricting the axes
    /// gives cylinders.
    Ball {
        center: Vec<f64>,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        axes: Option<Vec<usize>>,
    },
    /// Open box `lo < p_A < hi` over `axes` (default `0..lo.len()`).
    #[serde(rename = "box")]
    Cuboid {
        lo: Vec<f64>,
        hi: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        axes: Option<Vec<usize>>,
    },
    /// Open half-space `normal · p < offset`.
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
    Union(Vec<Csg>),
    Intersection(Vec<Csg>),
    Complement(Box<Csg>),
    /// Constant membership, produced when slicing fixes every coordinate a
    /// node depends on.
    Const {
        open: bool,
        closed: bool,
    },
}

/// A distance value and whether it is exact or only a lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dist {
    pub value: f64,
    pub exact: bool,
}

impl Dist {
    fn exact(value: f64) -> Self {
        Self { value, exact: true }
    }
}

fn default_axes(n: usize, axes: &Option<Vec<usize>>) -> Vec<usize> {
    axes.clone().unwrap_or_else(|| (0..n).collect())
}

impl Csg {
    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        Csg::Ball { center, radius, axes: None }
    }

    /// Ball in the coordinates `axes` only (a cylinder in the others).
    pub fn ball_on(axes: Vec<usize>, center: Vec<f64>, radius: f64) -> Self {
        Csg::Ball { center, radius, axes: Some(axes) }
    }

    pub fn cuboid(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Csg::Cuboid { lo, hi, axes: None }
    }

    pub fn cuboid_on(axes: Vec<usize>, lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Csg::Cuboid { lo, hi, axes: Some(axes) }
    }

    pub fn complement(self) -> Self {
        Csg::Complement(Box::new(self))
    }

    /// `self` with the closed set `other` removed.
    pub fn minus(self, other: Csg) -> Self {
        Csg::Intersection(vec![self, other.complement()])
    }

    /// The same set with every coordinate index moved up by `by`, for
    /// building products `U × D` out of pieces defined on their own factor.
    pub fn shifted(&self, by: usize) -> Csg {
        let shift = |n: usize, axes: &Option<Vec<usize>>| Some(default_axes(n, axes).iter().map(|a| a + by).collect());
        match self {
            Csg::Space | Csg::Const { .. } => self.clone(),
            Csg::Ball { center, radius, axes } => {
                Csg::Ball { center: center.clone(), radius: *radius, axes: shift(center.len(), axes) }
            }
            Csg::Cuboid { lo, hi, axes } => Csg::Cuboid { lo: lo.clone(), hi: hi.clone(), axes: shift(lo.len(), axes) },
            Csg::Halfspace { normal, offset } => {
                let mut n = vec![0.0; by];
                n.extend_from_slice(normal);
                Csg::Halfspace { normal: n, offset: *offset }
            }
            Csg::Union(c) => Csg::Union(c.iter().map(|n| n.shifted(by)).collect()),
            Csg::Intersection(c) => Csg::Intersection(c.iter().map(|n| n.shifted(by)).collect()),
            Csg::Complement(c) => Csg::Complement(Box::new(c.shifted(by))),
        }
    }

    /// Coordinates this node depends on, sorted.
    pub fn support(&self) -> Vec<usize> {
        let mut s = match self {
            Csg::Space | Csg::Const { .. } => Vec::new(),
            Csg::Ball { center, axes, .. } => default_axes(center.len(), axes),
            Csg::Cuboid { lo, axes, .. } => default_axes(lo.len(), axes),
            Csg::Halfspace { normal, .. } => {
                normal.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, _)| i).collect()
            }
            Csg::Union(c) | Csg::Intersection(c) => c.iter().flat_map(|n| n.support()).collect(),
            Csg::Complement(c) => c.support(),
        };
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Smallest ambient dimension the tree is well-defined in.
    pub fn min_dim(&self) -> usize {
        match self {
            Csg::Halfspace { normal, .. } => normal.len(),
            Csg::Union(c) | Csg::Intersection(c) => c.iter().map(|n| n.min_dim()).max().unwrap_or(0),
            Csg::Complement(c) => c.min_dim(),
            _ => self.support().last().map_or(0, |m| m + 1),
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.member(p, false)
    }

    pub fn contains_closed(&self, p: &[f64]) -> bool {
        self.member(p, true)
    }

    fn member(&self, p: &[f64], closed: bool) -> bool {
        match self {
            Csg::Space => true,
            Csg::Const { open, closed: c } => {
                if closed {
                    *c
                } else {
                    *open
                }
            }
            Csg::Ball { center, radius, axes } => {
                let s = ball_sq(p, center, axes);
                if closed {
                    s <= radius * radius
                } else {
                    s < radius * radius
                }
            }
            Csg::Cuboid { lo, hi, axes } => {
                let ax = default_axes(lo.len(), axes);
                ax.iter().enumerate().all(|(i, &a)| {
                    if closed {
                        lo[i] <= p[a] && p[a] <= hi[i]
                    } else {
                        lo[i] < p[a] && p[a] < hi[i]
                    }
                })
            }
            Csg::Halfspace { normal, offset } => {
                let d = dot(normal, p);
                if closed {
                    d <= *offset
                } else {
                    d < *offset
                }
            }
            Csg::Union(c) => c.iter().any(|n| n.member(p, closed)),
            Csg::Intersection(c) => c.iter().all(|n| n.member(p, closed)),
            Csg::Complement(c) => !c.member(p, !closed),
        }
    }

    /// Distance from `p` to the complement of the open set (0 outside it).
    pub fn dist_to_complement(&self, p: &[f64]) -> Dist {
        if !self.contains(p) {
            return Dist::exact(0.0);
        }
        match self {
            Csg::Space => Dist::exact(f64::INFINITY),
            Csg::Const { open, .. } => Dist::exact(if *open { f64::INFINITY } else { 0.0 }),
            Csg::Ball { center, radius, axes } => Dist::exact((radius - ball_sq(p, center, axes).sqrt()).max(0.0)),
            Csg::Cuboid { lo, hi, axes } => {
                let ax = default_axes(lo.len(), axes);
                let m =
                    ax.iter().enumerate().map(|(i, &a)| (p[a] - lo[i]).min(hi[i] - p[a])).fold(f64::INFINITY, f64::min);
                Dist::exact(m.max(0.0))
            }
            Csg::Halfspace { normal, offset } => Dist::exact(((offset - dot(normal, p)) / norm(normal)).max(0.0)),
            // The complement of an intersection is the union of complements.
            Csg::Intersection(c) => min_of(c.iter().map(|n| n.dist_to_complement(p))),
            Csg::Union(c) => combine_product(c, |n| n.dist_to_complement(p)),
            Csg::Complement(c) => c.dist_to_set(p),
        }
    }

    /// Distance from `p` to the closure of the set (0 inside the closure).
    pub fn dist_to_set(&self, p: &[f64]) -> Dist {
        if self.contains_closed(p) {
            return Dist::exact(0.0);
        }
        match self {
            Csg::Space => Dist::exact(0.0),
            Csg::Const { .. } => Dist::exact(f64::INFINITY),
            Csg::Ball { center, radius, axes } => Dist::exact((ball_sq(p, center, axes).sqrt() - radius).max(0.0)),
            Csg::Cuboid { lo, hi, axes } => {
                let ax = default_axes(lo.len(), axes);
                let s: f64 = ax
                    .iter()
                    .enumerate()
                    .map(|(i, &a)| {
                        let d = (lo[i] - p[a]).max(p[a] - hi[i]).max(0.0);
                        d * d
                    })
                    .sum();
                Dist::exact(s.sqrt())
            }
            Csg::Halfspace { normal, offset } => Dist::exact(((dot(normal, p) - offset) / norm(normal)).max(0.0)),
            Csg::Union(c) => min_of(c.iter().map(|n| n.dist_to_set(p))),
            Csg::Intersection(c) => combine_product(c, |n| n.dist_to_set(p)),
            Csg::Complement(c) => c.dist_to_complement(p),
        }
    }

    /// Fix the coordinates given as `Some` in `fixed` (indexed by ambient
    /// coordinate) and renumber the free ones in order.
    pub fn restrict(&self, fixed: &[Option<f64>]) -> Csg {
        let mut map = vec![None; fixed.len()];
        let mut next = 0;
        for (i, f) in fixed.iter().enumerate() {
            if f.is_none() {
                map[i] = Some(next);
                next += 1;
            }
        }
        self.restrict_with(fixed, &map)
    }

    fn restrict_with(&self, fixed: &[Option<f64>], map: &[Option<usize>]) -> Csg {
        let fix = |a: usize| fixed.get(a).copied().flatten();
        match self {
            Csg::Space | Csg::Const { .. } => self.clone(),
            Csg::Ball { center, radius, axes } => {
                let ax = default_axes(center.len(), axes);
                let mut off = 0.0;
                let mut new_axes = Vec::new();
                let mut new_center = Vec::new();
                for (i, &a) in ax.iter().enumerate() {
                    match fix(a) {
                        Some(v) => off += (v - center[i]) * (v - center[i]),
                        None => {
                            new_axes.push(map[a].expect("free axis"));
                            new_center.push(center[i]);
                        }
                    }
                }
                let r2 = radius * radius - off;
                if new_axes.is_empty() {
                    return Csg::Const { open: r2 > 0.0, closed: r2 >= 0.0 };
                }
                if r2 < 0.0 {
                    return Csg::Const { open: false, closed: false };
                }
                if r2 == 0.0 {
                    // The slice of the closed ball is the single point `center`.
                    return Csg::Intersection(vec![
                        Csg::Const { open: false, closed: true },
                        Csg::Ball { center: new_center, radius: 0.0, axes: Some(new_axes) },
                    ]);
                }
                Csg::Ball { center: new_center, radius: r2.sqrt(), axes: Some(new_axes) }
            }
            Csg::Cuboid { lo, hi, axes } => {
                let ax = default_axes(lo.len(), axes);
                let mut open = true;
                let mut closed = true;
                let (mut nl, mut nh, mut na) = (Vec::new(), Vec::new(), Vec::new());
                for (i, &a) in ax.iter().enumerate() {
                    match fix(a) {
                        Some(v) => {
                            open &= lo[i] < v && v < hi[i];
                            closed &= lo[i] <= v && v <= hi[i];
                        }
                        None => {
                            nl.push(lo[i]);
                            nh.push(hi[i]);
                            na.push(map[a].expect("free axis"));
                        }
                    }
                }
                let konst = Csg::Const { open, closed };
                if na.is_empty() || !closed {
                    return konst;
                }
                let free = Csg::Cuboid { lo: nl, hi: nh, axes: Some(na) };
                if open {
                    free
                } else {
                    Csg::Intersection(vec![konst, free])
                }
            }
            Csg::Halfspace { normal, offset } => {
                let mut off = *offset;
                let n_free = map.iter().filter(|m| m.is_some()).count();
                let mut nn = vec![0.0; n_free];
                for (a, &c) in normal.iter().enumerate() {
                    match fix(a) {
                        Some(v) => off -= c * v,
                        None => {
                            if let Some(j) = map.get(a).copied().flatten() {
                                nn[j] = c;
                            }
                        }
                    }
                }
                if nn.iter().all(|c| *c == 0.0) {
                    Csg::Const { open: 0.0 < off, closed: 0.0 <= off }
                } else {
                    Csg::Halfspace { normal: nn, offset: off }
                }
            }
            Csg::Union(c) => Csg::Union(c.iter().map(|n| n.restrict_with(fixed, map)).collect()),
            Csg::Intersection(c) => Csg::Intersection(c.iter().map(|n| n.restrict_with(fixed, map)).collect()),
            Csg::Complement(c) => Csg::Complement(Box::new(c.restrict_with(fixed, map))),
        }
    }

    /// Coordinates along `axis` where membership along a line parallel to
    /// that axis can change (finite values only).
    pub fn axis_breaks(&self, axis: usize, out: &mut Vec<f64>) {
        match self {
            Csg::Space | Csg::Const { .. } => {}
            Csg::Ball { center, radius, axes } => {
                let ax = default_axes(center.len(), axes);
                if let Some(i) = ax.iter().position(|&a| a == axis) {
                    out.push(center[i] - radius);
                    out.push(center[i]);
                    out.push(center[i] + radius);
                }
            }
            Csg::Cuboid { lo, hi, axes } => {
                let ax = default_axes(lo.len(), axes);
                if let Some(i) = ax.iter().position(|&a| a == axis) {
                    out.push(lo[i]);
                    out.push(hi[i]);
                }
            }
            Csg::Halfspace { normal, offset } => {
                let nz: Vec<usize> = (0..normal.len()).filter(|&i| normal[i] != 0.0).collect();
                if nz == [axis] {
                    out.push(offset / normal[axis]);
                }
            }
            Csg::Union(c) | Csg::Intersection(c) => {
                for n in c {
                    n.axis_breaks(axis, out);
                }
            }
            Csg::Complement(c) => c.axis_breaks(axis, out),
        }
    }

    /// Axis-aligned bounding box of the open set in `dim` coordinates.
    /// Unbounded directions are ±∞; an empty set gives `lo > hi`.
    pub fn bbox(&self, dim: usize) -> (Vec<f64>, Vec<f64>) {
        let full = || (vec![f64::NEG_INFINITY; dim], vec![f64::INFINITY; dim]);
        let empty = || (vec![f64::INFINITY; dim], vec![f64::NEG_INFINITY; dim]);
        match self {
            Csg::Space | Csg::Complement(_) => full(),
            Csg::Const { open, .. } => {
                if *open {
                    full()
                } else {
                    empty()
                }
            }
            Csg::Ball { center, radius, axes } => {
                let (mut lo, mut hi) = full();
                for (i, &a) in default_axes(center.len(), axes).iter().enumerate() {
                    if a < dim {
                        lo[a] = center[i] - radius;
                        hi[a] = center[i] + radius;
                    }
                }
                (lo, hi)
            }
            Csg::Cuboid { lo: l, hi: h, axes } => {
                let (mut lo, mut hi) = full();
                for (i, &a) in default_axes(l.len(), axes).iter().enumerate() {
                    if a < dim {
                        lo[a] = l[i];
                        hi[a] = h[i];
                    }
                }
                (lo, hi)
            }
            Csg::Halfspace { normal, offset } => {
                let (mut lo, mut hi) = full();
                let nz: Vec<usize> = (0..normal.len()).filter(|&i| normal[i] != 0.0).collect();
                if let [a] = nz[..] {
                    if a < dim {
                        let v = offset / normal[a];
                        if normal[a] > 0.0 {
                            hi[a] = v;
                        } else {
                            lo[a] = v;
                        }
                    }
                }
                (lo, hi)
            }
            Csg::Union(c) => {
                let (mut lo, mut hi) = empty();
                for n in c {
                    let (l, h) = n.bbox(dim);
                    for i in 0..dim {
                        lo[i] = lo[i].min(l[i]);
                        hi[i] = hi[i].max(h[i]);
                    }
                }
                (lo, hi)
            }
            Csg::Intersection(c) => {
                let (mut lo, mut hi) = full();
                for n in c {
                    let (l, h) = n.bbox(dim);
                    for i in 0..dim {
                        lo[i] = lo[i].max(l[i]);
                        hi[i] = hi[i].min(h[i]);
                    }
                }
                (lo, hi)
            }
        }
    }
}

fn ball_sq(p: &[f64], center: &[f64], axes: &Option<Vec<usize>>) -> f64 {
    match axes {
        None => center.iter().zip(p).map(|(c, x)| (x - c) * (x - c)).sum(),
        Some(ax) => ax.iter().zip(center).map(|(&a, c)| (p[a] - c) * (p[a] - c)).sum(),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn min_of<I: Iterator<Item = Dist>>(it: I) -> Dist {
    it.fold(Dist::exact(f64::INFINITY), |acc, d| Dist { value: acc.value.min(d.value), exact: acc.exact && d.exact })
}

/// Distance to an intersection of sets, each given by a child distance.
/// When the children depend on pairwise disjoint coordinates the intersection
/// is a product and the distances combine in quadrature; otherwise the largest
/// child distance is only a lower bound.
fn combine_product<F: Fn(&Csg) -> Dist>(children: &[Csg], d: F) -> Dist {
    let supports: Vec<Vec<usize>> = children.iter().map(|c| c.support()).collect();
    let mut disjoint = true;
    'outer: for i in 0..supports.len() {
        for j in i + 1..supports.len() {
            if supports[i].iter().any(|a| supports[j].contains(a)) {
                disjoint = false;
                break 'outer;
            }
        }
    }
    let ds: Vec<Dist> = children.iter().map(d).collect();
    if disjoint {
        let exact = ds.iter().all(|x| x.exact);
        let v = ds.iter().map(|x| x.value * x.value).sum::<f64>().sqrt();
        Dist { value: v, exact }
    } else {
        Dist { value: ds.iter().map(|x| x.value).fold(0.0, f64::max), exact: false }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open_and_closed_membership() {
        let b = Csg::ball(vec![0.0, 0.0], 1.0);
        assert!(!b.contains(&[1.0, 0.0]));
        assert!(b.contains_closed(&[1.0, 0.0]));
        let punctured = b.clone().minus(Csg::ball(vec![0.0, 0.0], 0.0));
        assert!(!punctured.contains(&[0.0, 0.0]));
        assert!(punctured.contains(&[1e-100, 0.0]));
        assert!(punctured.contains_closed(&[0.0, 0.0]));
    }

    #[test]
    fn slicing_a_ball() {
        let b = Csg::ball(vec![0.0, 0.0, 0.0], 1.0);
        let s = b.restrict(&[Some(0.6), None, None]);
        assert!(s.contains(&[0.79, 0.0]));
        assert!(!s.contains(&[0.81, 0.0]));
        let gone = b.restrict(&[Some(1.5), None, None]);
        assert!(!gone.contains_closed(&[0.0, 0.0]));
    }

    #[test]
    fn bidisc_distances() {
        let bidisc = Csg::Intersection(vec![
            Csg::ball_on(vec![0, 1], vec![0.0, 0.0], 1.0),
            Csg::ball_on(vec![2, 3], vec![0.0, 0.0], 1.0),
        ]);
        let d = bidisc.dist_to_complement(&[0.5, 0.0, 0.0, 0.0]);
        assert!(d.exact && (d.value - 0.5).abs() < 1e-15);
        let out = bidisc.dist_to_set(&[2.0, 0.0, 2.0, 0.0]);
        assert!(out.exact && (out.value - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bbox_of_union_and_halfspace() {
        let u = Csg::Union(vec![Csg::ball(vec![-1.0, 0.0], 0.5), Csg::ball(vec![1.0, 0.0], 0.5)]);
        let (lo, hi) = u.bbox(2);
        assert_eq!(lo, vec![-1.5, -0.5]);
        assert_eq!(hi, vec![1.5, 0.5]);
        let h = Csg::Halfspace { normal: vec![0.0, -2.0], offset: 1.0 };
        assert_eq!(h.bbox(2).0[1], -0.5);
    }

    #[test]
    fn json_round_trip() {
        let c = Csg::Intersection(vec![
            Csg::ball_on(vec![0, 1], vec![0.0, 0.0], 1.0),
            Csg::cuboid(vec![-1.0, -2.0], vec![1.0, 2.0]),
            Csg::Halfspace { normal: vec![1.0, 1.0], offset: 0.3 }.complement(),
        ]);
        let s = serde_json::to_string(&c).unwrap();
        let back: Csg = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
