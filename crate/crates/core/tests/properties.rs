//! Invariants as property tests.

use std::f64::consts::PI;

use proptest::prelude::*;
use proptest::test_runner::RngSeed;

use convlab::bergman::{bergman_gram, bergman_radial, psh_mean_value_check, radial_moments_with};
use convlab::geometry::{
    boundary_distance, disc_distance_check, fiber, fiber_distance, shapes, AffineFiberMap, AnalyticDisc, CoordKind,
    Csg, Domain,
};
use convlab::numerics::{
    integrate_1d, integrate_fiber, integrate_radial_2d, minimize_over_fiber, second_difference, MinConfig, QuadConfig,
};
use convlab::prekopa::{convexity_check, marginal_transform};
use convlab::weights::{convex_localizer, paper_weight, psh_localizer, LocalizationSchedule, WeightField};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, rng_seed: RngSeed::Fixed(0xc0ffee), failure_persistence: None, ..ProptestConfig::default() }
}

fn coeff() -> impl Strategy<Value = f64> {
    -3.0..3.0_f64
}

fn poly(c: [f64; 3]) -> impl Fn(f64) -> f64 {
    move |x| c[0] + c[1] * x + c[2] * x * x
}

// Numerics -----------------------------------------------------------------

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn quadrature_is_linear(a in coeff(), b in coeff(), f in prop::array::uniform3(coeff()), g in prop::array::uniform3(coeff())) {
        let cfg = QuadConfig::default();
        let (f, g) = (poly(f), poly(g));
        let sin_f = |x: f64| f(x) * x.sin();
        let lhs = integrate_1d(|x| a * sin_f(x) + b * g(x), -1.0, 2.0, &cfg).unwrap();
        let rhs = a * integrate_1d(sin_f, -1.0, 2.0, &cfg).unwrap() + b * integrate_1d(&g, -1.0, 2.0, &cfg).unwrap();
        prop_assert!((lhs - rhs).abs() <= 2.0 * cfg.abs_tol * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn quadrature_is_monotone(c in prop::array::uniform3(coeff()), bump in 0.0..1.0_f64) {
        let cfg = QuadConfig::default();
        let f = poly(c);
        let lo = integrate_1d(|x| f(x).cos(), 0.0, 1.0, &cfg).unwrap();
        let hi = integrate_1d(|x| f(x).cos() + bump * x * x, 0.0, 1.0, &cfg).unwrap();
        prop_assert!(lo <= hi + 2.0 * cfg.abs_tol);
    }

    #[test]
    fn quadrature_is_deterministic(c in prop::array::uniform3(coeff())) {
        let cfg = QuadConfig::default();
        let f = poly(c);
        let once = integrate_1d(|x| (-f(x).abs()).exp(), -2.0, 2.0, &cfg).unwrap();
        let again = integrate_1d(|x| (-f(x).abs()).exp(), -2.0, 2.0, &cfg).unwrap();
        prop_assert_eq!(once.to_bits(), again.to_bits());
    }

    #[test]
    fn radial_and_planar_integrals_agree(a in 0.2..3.0_f64, b in 0.0..2.0_f64) {
        let cfg = QuadConfig::default();
        let profile = move |r: f64| (-a * r * r).exp() * (1.0 + b * r * r);
        let radial = integrate_radial_2d(profile, &cfg).unwrap();
        let disc = fiber(&shapes::disc(8.0 / a.sqrt()), &[]);
        let planar = integrate_fiber(|x| profile((x[0] * x[0] + x[1] * x[1]).sqrt()), &disc, &cfg).unwrap();
        prop_assert!((radial - planar).abs() <= 1e-9 * radial, "{radial} vs {planar}");
    }

    #[test]
    fn minimum_is_below_every_sample(c in prop::array::uniform3(coeff()), xs in prop::collection::vec(-2.0..2.0_f64, 16)) {
        let cfg = MinConfig { grid_points: 201, ..MinConfig::default() };
        let dom = Domain::real(Csg::cuboid_on(vec![1], vec![-2.0], vec![2.0]), 1, 1);
        let f = poly(c);
        let (_, v) = minimize_over_fiber(|x| f(x[0]), &fiber(&dom, &[0.0]), &cfg).unwrap();
        for x in xs {
            prop_assert!(v <= f(x) + 1e-12);
        }
    }
}

// Geometry -----------------------------------------------------------------

fn complex_domains() -> Vec<Domain> {
    vec![shapes::bidisc(), shapes::complex_ball(1.0), shapes::hartogs()]
}

proptest! {
    #![proptest_config(config(512))]

    #[test]
    fn fiber_membership_matches_parent(which in 0..3usize, p in prop::array::uniform4(-1.2..1.2_f64)) {
        let d = &complex_domains()[which];
        let f = fiber(d, &p[..2]);
        prop_assert_eq!(f.contains(&p[2..]), d.contains(&p));
        prop_assert_eq!(f.contains_closed(&p[2..]), d.contains_closed(&p));
    }

    #[test]
    fn full_distance_never_exceeds_fiber_distance(which in 0..3usize, p in prop::array::uniform4(-1.0..1.0_f64)) {
        let d = &complex_domains()[which];
        prop_assume!(d.contains(&p));
        let full = boundary_distance(d, &p).unwrap().value;
        let along = fiber_distance(d, &p[..2], &p[2..]).unwrap();
        prop_assert!(full <= along + 1e-12, "d = {full} > δ = {along}");
    }

    #[test]
    fn fiber_distance_is_lipschitz_on_products(p in prop::array::uniform4(-0.9..0.9_f64), q in prop::array::uniform4(-0.9..0.9_f64)) {
        let d = shapes::bidisc();
        prop_assume!(d.contains(&p) && d.contains(&q));
        let dp = fiber_distance(&d, &p[..2], &p[2..]).unwrap();
        let dq = fiber_distance(&d, &q[..2], &q[2..]).unwrap();
        let gap = p.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        prop_assert!((dp - dq).abs() <= gap + 1e-12);
    }

    #[test]
    fn domains_round_trip_through_json(which in 0..3usize) {
        let d = &complex_domains()[which];
        prop_assert_eq!(&Domain::from_json(&d.to_json().unwrap()).unwrap(), d);
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn disc_distance_never_beats_its_boundary(a in -0.4..0.4_f64, b in -0.4..0.4_f64, c in -0.3..0.3_f64) {
        let disc = AnalyticDisc::new(vec![[0.0, 0.0], [a, b]], vec![vec![[c, 0.0], [0.0, 0.0], [0.3, 0.0]]]);
        let r = disc_distance_check(&disc, &shapes::bidisc(), 400, 64).unwrap();
        prop_assert!(r.d_disc <= r.d_boundary);
        prop_assert!(r.gap >= 0.0);
    }
}

// Weights ------------------------------------------------------------------

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn convex_localizer_is_convex_on_segments(
        k in 1..64u32,
        a in -1.0..1.0_f64,
        x0 in prop::array::uniform2(-2.0..2.0_f64),
        dir in prop::array::uniform2(-1.0..1.0_f64),
        s in -1.0..1.0_f64,
    ) {
        let psi = convex_localizer(k, &AffineFiberMap::constant(CoordKind::Real, 1, vec![a, -a]), 2);
        let along = |u: f64| psi.eval(&[0.0], &[x0[0] + u * dir[0], x0[1] + u * dir[1]]);
        prop_assert!(second_difference(along, s, 1e-3).unwrap() >= -1e-12);
    }

    #[test]
    fn psh_localizer_is_subharmonic(
        k in 1..64u32,
        c in prop::array::uniform2(-1.0..1.0_f64),
        r in 0.001..0.5_f64,
    ) {
        let psi = psh_localizer(k, &AffineFiberMap::constant(CoordKind::Complex, 1, vec![0.1, -0.2]), 1);
        // Adaptive circle mean: near the 1/k seam the integrand is too sharp
        // for a fixed trapezoid rule at this tolerance.
        let mean = integrate_1d(
            |th| psi.eval(&[0.0, 0.0], &[c[0] + r * th.cos(), c[1] + r * th.sin()]),
            0.0,
            2.0 * PI,
            &QuadConfig::default(),
        )
        .unwrap()
            / (2.0 * PI);
        prop_assert!(psi.eval(&[0.0, 0.0], &c) <= mean + 1e-9);
    }

    #[test]
    fn localizers_sit_at_their_lower_bound_inside(k in 1..200u32, u in 0.0..1.0_f64, th in 0.0..(2.0 * PI)) {
        let rho = u / k as f64;
        let real = convex_localizer(k, &AffineFiberMap::constant(CoordKind::Real, 1, vec![0.3]), 1);
        prop_assert_eq!(real.eval(&[0.0], &[0.3 + rho * th.cos()]), real.lower_bound().unwrap());
        let cx = psh_localizer(k, &AffineFiberMap::constant(CoordKind::Complex, 1, vec![0.0, 0.0]), 1);
        prop_assert_eq!(cx.eval(&[0.0, 0.0], &[rho * th.cos(), rho * th.sin()]), cx.lower_bound().unwrap());
    }

    #[test]
    fn weights_respect_their_lower_bounds(k in 1..64u32, p in prop::array::uniform2(-3.0..3.0_f64), eps in 0.05..0.5_f64) {
        let loc = convex_localizer(k, &AffineFiberMap::constant(CoordKind::Real, 1, vec![0.0]), 1);
        let cex = paper_weight("prekopa_cex", eps).unwrap();
        for w in [&loc, &cex, &cex.sum(&loc)] {
            let v = w.eval(&p[..1], &p[1..]);
            prop_assert!(!v.is_nan());
            if let Some(lb) = w.lower_bound() {
                prop_assert!(v >= lb);
            }
        }
        prop_assert_eq!(cex.sum(&loc).lower_bound(), Some(cex.lower_bound().unwrap() + loc.lower_bound().unwrap()));
    }

    #[test]
    fn berndtsson_weight_is_radial(p in prop::array::uniform4(-1.0..1.0_f64), a in 0.0..(2.0 * PI), b in 0.0..(2.0 * PI), q in 0..4usize, conj in any::<bool>()) {
        let w = paper_weight("berndtsson_cex", 0.3).unwrap();
        let v = w.eval(&p[..2], &p[2..]);
        // Quarter turns and conjugation are exact in floating point.
        let exact = |x: f64, y: f64| {
            let y = if conj { -y } else { y };
            match q {
                0 => [x, y],
                1 => [-y, x],
                2 => [-x, -y],
                _ => [y, -x],
            }
        };
        prop_assert_eq!(w.eval(&exact(p[0], p[1]), &exact(p[2], p[3])), v);
        let rot = |x: f64, y: f64, t: f64| [x * t.cos() - y * t.sin(), x * t.sin() + y * t.cos()];
        let turned = w.eval(&rot(p[0], p[1], a), &rot(p[2], p[3], b));
        prop_assert!((turned - v).abs() <= 1e-12 * (1.0 + v.abs()));
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn schedule_deltas_exceed_one_over_k(mut ks in prop::collection::vec(2..10_000u32, 1..12), n in 1..4usize) {
        ks.sort_unstable();
        ks.dedup();
        let s = LocalizationSchedule::new(ks.clone(), n).unwrap();
        for (k, d) in ks.iter().zip(s.deltas()) {
            prop_assert!(d > 1.0 / *k as f64);
        }
    }
}

// Marginals and kernels --------------------------------------------------------

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn convexity_verdict_matches_worst_violation(fs in prop::collection::vec(-1.0..1.0_f64, 3..24), tol in 1e-9..1e-1_f64) {
        let ts: Vec<f64> = (0..fs.len()).map(|i| i as f64 * 0.1).collect();
        let r = convexity_check(&ts, &fs, tol).unwrap();
        prop_assert_eq!(r.verdict.passed(), r.worst_violation <= tol);
    }

    #[test]
    fn a_point_of_measure_zero_is_negligible(t in -0.9..0.9_f64, eps in 0.05..0.5_f64) {
        let cfg = QuadConfig::default();
        let phi = paper_weight("prekopa_cex", eps).unwrap();
        let ball = Domain::real(Csg::ball(vec![0.0, 0.0], 1.0), 1, 1);
        let punctured = shapes::punctured_ball(1, 1);
        prop_assert_eq!(
            marginal_transform(&phi, &ball, &[t], &cfg).unwrap(),
            marginal_transform(&phi, &punctured, &[t], &cfg).unwrap()
        );
    }

    #[test]
    fn radial_kernel_at_centre_is_one_over_m0(a in 0.0..3.0_f64, radius in 0.3..3.0_f64) {
        let mt = radial_moments_with("a|z|^2", |r| a * r * r, 8, &[], radius, &QuadConfig::default()).unwrap();
        prop_assert_eq!(bergman_radial(&mt, 0.0).unwrap(), 1.0 / mt.m0().value);
    }

    #[test]
    fn psh_verdict_matches_worst_deficit(a in -1.0..1.0_f64, tol in 1e-9..1e-2_f64) {
        let u = move |z: [f64; 2]| a * (z[0] * z[0] - z[1] * z[1]);
        let r = psh_mean_value_check(u, &[[0.1, 0.2], [-0.3, 0.0]], &[0.1], 16, tol).unwrap();
        prop_assert_eq!(r.verdict.passed(), r.worst_deficit <= r.tol);
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn radial_and_gram_kernels_agree_on_discs(a in 0.0..1.5_f64, radius in 0.8..1.5_f64, u in 0.0..0.6_f64) {
        let cfg = QuadConfig::default();
        // Kept small enough that the monomial Gram matrix stays well conditioned.
        let k = 16;
        let mt = radial_moments_with("a|z|^2", |r| a * r * r, k, &[], radius, &cfg).unwrap();
        let w = WeightField::from_fn("a|z|^2", CoordKind::Complex, 0, 1, move |_, z| a * (z[0] * z[0] + z[1] * z[1]));
        let z = [u * radius, 0.0];
        let radial = bergman_radial(&mt, z[0]).unwrap();
        let gram = bergman_gram(&shapes::disc(radius), &w, z, k, &cfg).unwrap();
        prop_assert!((radial - gram).abs() <= 1e-6 * radial, "{radial} vs {gram}");
    }
}
