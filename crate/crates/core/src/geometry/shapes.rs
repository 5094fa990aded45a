//! Ready-made domains used by the scenarios and tests.

use super::csg::Csg;
use super::domain::Domain;

/// Open disc of radius `r` about the origin in ℂ, as a fiber-only domain.
pub fn disc(r: f64) -> Domain {
    Domain::complex(Csg::ball(vec![0.0, 0.0], r), 0, 1)
}

/// The whole complex line as a fiber-only domain.
pub fn complex_plane() -> Domain {
    Domain::complex(Csg::Space, 0, 1)
}

/// Unit bidisc Δ×Δ ⊂ ℂ×ℂ.
pub fn bidisc() -> Domain {
    Domain::complex(
        Csg::Intersection(vec![
            Csg::ball_on(vec![0, 1], vec![0.0, 0.0], 1.0),
            Csg::ball_on(vec![2, 3], vec![0.0, 0.0], 1.0),
        ]),
        1,
        1,
    )
}

/// Ball of radius `r` in ℂ×ℂ.
pub fn complex_ball(r: f64) -> Domain {
    Domain::complex(Csg::ball(vec![0.0; 4], r), 1, 1)
}

/// Hartogs figure `(Δ×Δ) ∖ ({|τ| ≤ 1/2} × {|z| ≥ 1/2})`.
pub fn hartogs() -> Domain {
    let removed = Csg::Intersection(vec![
        Csg::ball_on(vec![0, 1], vec![0.0, 0.0], 0.5),
        Csg::ball_on(vec![2, 3], vec![0.0, 0.0], 0.5).complement(),
    ]);
    Domain::complex(
        Csg::Intersection(vec![
            Csg::ball_on(vec![0, 1], vec![0.0, 0.0], 1.0),
            Csg::ball_on(vec![2, 3], vec![0.0, 0.0], 1.0),
            removed.complement(),
        ]),
        1,
        1,
    )
}

/// Two discs of radius 1/2 about (±1, 0) in ℝ_t×ℝ_x joined by a thin
/// U-shaped tube that passes above them, so the segment between the centres
/// leaves the closure.
pub fn dumbbell() -> Domain {
    Domain::real(
        Csg::Union(vec![
            Csg::ball(vec![-1.0, 0.0], 0.5),
            Csg::ball(vec![1.0, 0.0], 0.5),
            Csg::cuboid(vec![-1.05, 0.0], vec![-0.95, 1.5]),
            Csg::cuboid(vec![-1.05, 1.45], vec![1.05, 1.55]),
            Csg::cuboid(vec![0.95, 0.0], vec![1.05, 1.5]),
        ]),
        1,
        1,
    )
}

/// Unit ball of ℝ^{m+n} with the origin removed.
pub fn punctured_ball(m: usize, n: usize) -> Domain {
    let d = m + n;
    Domain::real(Csg::ball(vec![0.0; d], 1.0).minus(Csg::ball(vec![0.0; d], 0.0)), m, n)
}

/// Product `U × D` of a base set and a fiber set, each given in its own
/// coordinates.
pub fn product(base: Csg, fiber: Csg, m: usize, n: usize, kind: super::CoordKind) -> Domain {
    let shift = m * kind.width();
    Domain::new(Csg::Intersection(vec![base, fiber.shifted(shift)]), m, n, kind)
}

/// ℝ^m × ℝ^n.
pub fn real_space(m: usize, n: usize) -> Domain {
    Domain::real(Csg::Space, m, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{fiber, CoordKind};

    #[test]
    fn product_fibers_do_not_depend_on_the_base_point() {
        let d = product(Csg::cuboid(vec![-1.0], vec![1.0]), Csg::ball(vec![0.0], 2.0), 1, 1, CoordKind::Real);
        for t in [-0.9, 0.0, 0.7] {
            assert_eq!(fiber(&d, &[t]).line_intervals(&[]), vec![(-2.0, 2.0)]);
        }
        assert!(fiber(&d, &[1.5]).line_intervals(&[]).is_empty());
    }

    #[test]
    fn hartogs_fibers() {
        let h = hartogs();
        let inner = fiber(&h, &[0.2, 0.0]);
        assert!(inner.contains(&[0.3, 0.0]));
        assert!(!inner.contains(&[0.6, 0.0]));
        let outer = fiber(&h, &[0.8, 0.0]);
        assert!(outer.contains(&[0.9, 0.0]));
    }
}
