use std::f64::consts::PI;

use super::{Check, Outcome, Params, ScenarioInfo, Table};
use crate::bergman::{
    self, berndtsson_m0_closed, berndtsson_phi_curve, berndtsson_phi_fn, laplacian_check, laplacian_closed,
    lemma2_harness, lemma3_harness, psh_mean_value_check, MomentStatus,
};
use crate::error::Result;
use crate::geometry::{
    disc_distance_check, fiber_distance, shapes, AffineFiberMap, AnalyticDisc, CoordKind, Csg, Domain,
};
use crate::prekopa::{
    convexity_check, fiber_infimum, lemma1_harness, linspace, marginal_transform, midpoint_divergence_probe,
    min_principle_transform, twisted_marginal, MarginalCurve,
};
use crate::weights::{convex_localizer, paper_weight, LocalizationSchedule, Radiality, WeightField};

pub(super) static REGISTRY: &[ScenarioInfo] = &[
    ScenarioInfo {
        name: "prekopa-cex",
        summary: "non-convex weight |t²+x²−ε²| whose marginal is still convex",
        references: &[
            "marginal of |x²+y²−ε²| equals x² − ε² − log√π for |x| ≥ ε",
            "the marginal is convex on ℝ with one-sided slopes 2ε at x = ε",
        ],
        run: prekopa_cex,
    },
    ScenarioInfo {
        name: "berndtsson-cex",
        summary: "weighted kernel with only constants; Φ is psh although the weight is not",
        references: &[
            "∫|w^k|² e^{−φ_z} converges only for k = 0",
            "piecewise closed form of Φ and its positive Laplacian near |z| ≤ ε",
        ],
        run: berndtsson_cex,
    },
    ScenarioInfo {
        name: "lemma1",
        summary: "real localization: twisted marginals converge to φ(t, a(t))",
        references: &["lim ψ̃_k(t) = φ(t, a(t)) for the convex localizer"],
        run: lemma1,
    },
    ScenarioInfo {
        name: "lemma2",
        summary: "complex localization: twisted kernels at a(τ) converge to e^{φ}",
        references: &["lim B(a(τ); e^{−φ−ψ_k}) = e^{φ(τ, a(τ))}", "finite-k bound B ≤ e^{sup φ}"],
        run: lemma2,
    },
    ScenarioInfo {
        name: "lemma3",
        summary: "two-sided kernel bounds for k max(log(|z|/r), 0)",
        references: &["liminf B ≥ 1/|D ∩ B(0, r)|", "B ≤ 1/(σ r²) once B(0, r) ⊂ D"],
        run: lemma3,
    },
    ScenarioInfo {
        name: "min-principle",
        summary: "penalised infimal transform of |t²+x²−1| is not convex",
        references: &["inf_x |t²+x²−1| = max{t²−1, 0}", "u_k(t) = inf_x (φ + k|x − a(t)|)"],
        run: min_principle,
    },
    ScenarioInfo {
        name: "twisted-nonconvex",
        summary: "a convex twist breaks convexity of the example marginal",
        references: &["twisted marginals of a non-convex weight fail the midpoint inequality"],
        run: twisted_nonconvex,
    },
    ScenarioInfo {
        name: "midpoint-probe",
        summary: "twisted marginals blow up at midpoints outside the closure",
        references: &["ψ̃_k(t*) → +∞ when the midpoint leaves the closed domain", "a single point is negligible"],
        run: midpoint_probe,
    },
    ScenarioInfo {
        name: "disc-distance",
        summary: "analytic discs: interior versus boundary distance",
        references: &["pseudoconvexity via d_Ω(disc) = d_Ω(∂disc)"],
        run: disc_distance,
    },
    ScenarioInfo {
        name: "psh-delta",
        summary: "−log of the fiber distance is psh exactly on pseudoconvex domains",
        references: &["δ_Ω(τ, z) = d_{Ω_τ}(z)", "−log δ_Ω is psh for pseudoconvex Ω"],
        run: psh_delta,
    },
];

fn prekopa_cex(p: &Params) -> Result<Outcome> {
    let eps = p.f64("epsilon")?;
    let cfg = p.quad()?;
    let phi = paper_weight("prekopa_cex", eps)?;
    let dom = shapes::real_space(1, 1);
    let f = |x: f64| marginal_transform(&phi, &dom, &[x], &cfg);
    let closed = |x: f64| x * x - eps * eps - PI.sqrt().ln();
    let mut checks = Vec::new();
    let vt = p.f64("value_tol")?;
    for x in p.f64s("points")? {
        checks.push(Check::close(format!("marginal at x = {x} matches x² − ε² − log√π"), closed(x), f(x)?, vt));
    }
    let ts = linspace(p.f64("grid_from")?, p.f64("grid_to")?, p.usize("grid_points")?);
    let curve = MarginalCurve::sample(&phi, &dom, &ts, &cfg)?;
    let tol = p.f64("tol")?;
    let report = convexity_check(&curve.ts, &curve.values, tol)?;
    checks.push(Check::at_most(
        format!("marginal convex on {} grid points (worst midpoint excess)", ts.len()),
        0.0,
        report.worst_violation,
        tol,
    ));
    let h = p.f64("h")?;
    let st = p.f64("slope_tol")?;
    let at = f(eps)?;
    checks.push(Check::close("left difference quotient at x = ε is 2ε", 2.0 * eps, (at - f(eps - h)?) / h, st));
    checks.push(Check::close("right difference quotient at x = ε is 2ε", 2.0 * eps, (f(eps + h)? - at) / h, st));
    let mut table = Table::new("marginal", &["t", "value"]);
    for (t, v) in curve.ts.iter().zip(&curve.values) {
        table.push(vec![*t, *v]);
    }
    Ok(Outcome { checks, tables: vec![table] })
}

fn twisted_nonconvex(p: &Params) -> Result<Outcome> {
    let eps = p.f64("epsilon")?;
    let k = p.u32("k")?;
    let cfg = p.quad()?;
    let phi = paper_weight("prekopa_cex", eps)?;
    let psi = convex_localizer(k, &AffineFiberMap::constant(CoordKind::Real, 1, vec![0.0]), 1);
    let dom = shapes::real_space(1, 1);
    let g = |t: f64| twisted_marginal(&phi, &psi, &dom, &[t], &cfg);
    let (t0, t1) = (p.f64("t0")?, p.f64("t1")?);
    let violation = g(0.5 * (t0 + t1))? - 0.5 * (g(t0)? + g(t1)?);
    let limit = (0.25 * (t0 + t1).powi(2) - eps * eps).abs()
        - 0.5 * ((t0 * t0 - eps * eps).abs() + (t1 * t1 - eps * eps).abs());
    let mut checks = vec![
        Check::at_least(format!("midpoint violation of ψ̃_k at ({t0}, {t1})"), p.f64("min_violation")?, violation, 0.0),
        Check::close("violation approaches the limit chord gap", limit, violation, p.f64("limit_tol")?),
    ];
    let ts = linspace(p.f64("grid_from")?, p.f64("grid_to")?, p.usize("grid_points")?);
    let curve = MarginalCurve::sample_twisted(&phi, &psi, &dom, &ts, &cfg)?;
    let report = convexity_check(&curve.ts, &curve.values, p.f64("tol")?)?;
    checks.push(Check::holds("grid convexity check fails for ψ̃_k", !report.verdict.passed()));
    let mut table = Table::new("twisted", &["t", "value"]);
    for (t, v) in curve.ts.iter().zip(&curve.values) {
        table.push(vec![*t, *v]);
    }
    Ok(Outcome { checks, tables: vec![table] })
}

fn x_squared() -> WeightField {
    WeightField::from_fn("x^2", CoordKind::Real, 1, 1, |_, x| x[0] * x[0])
        .with_lower_bound(0.0)
        .with_radial(Radiality::About(AffineFiberMap::constant(CoordKind::Real, 1, vec![0.0])))
        .with_decay(1.0, 1.0)
}

fn lemma1(p: &Params) -> Result<Outcome> {
    let cfg = p.quad()?;
    let schedule = LocalizationSchedule::new(p.u32s("ks")?, 1)?;
    let t = p.f64("t")?;
    let dom = shapes::real_space(1, 1);
    let a = AffineFiberMap::real_line(vec![1.0], 0.0, vec![0.0]);
    let rows = lemma1_harness(&x_squared(), &dom, &a, &[t], &schedule, &cfg)?;
    let mut checks = vec![
        Check::holds("errors strictly decrease along the schedule", rows.windows(2).all(|w| w[1].error < w[0].error)),
        Check::at_most("final error", p.f64("final_tol")?, rows.last().unwrap().error, 0.0),
    ];
    let zero = WeightField::zero(CoordKind::Real, 1, 1);
    let origin = AffineFiberMap::constant(CoordKind::Real, 1, vec![0.0]);
    let exact = lemma1_harness(&zero, &dom, &origin, &[0.0], &schedule, &cfg)?;
    let et = p.f64("exact_tol")?;
    for r in &exact {
        let k = r.k as f64;
        checks.push(Check::close(
            format!("φ ≡ 0: ψ̃_k = −log(1 + 1/k) at k = {}", r.k),
            -(1.0 + 1.0 / k).ln(),
            r.value,
            et,
        ));
    }
    // Fiber {|x| > 1} keeps a(t) = 0 at distance 1.
    let gapped = Domain::real(Csg::cuboid_on(vec![1], vec![-1.0], vec![1.0]).complement(), 1, 1);
    let k_far = p.u32("empty_k")?;
    let psi = convex_localizer(k_far, &origin, 1);
    let far = twisted_marginal(&zero, &psi, &gapped, &[0.0], &cfg)?;
    checks.push(Check::at_least(
        format!("a(t) outside the closed fiber: ψ̃_k large at k = {k_far}"),
        p.f64("empty_min")?,
        far,
        0.0,
    ));
    let mut table = Table::new("lemma1", &["k", "value", "error"]);
    for r in &rows {
        table.push(vec![r.k as f64, r.value, r.error]);
    }
    Ok(Outcome { checks, tables: vec![table] })
}

fn lemma2(p: &Params) -> Result<Outcome> {
    let cfg = p.quad()?;
    let schedule = LocalizationSchedule::new(p.u32s("ks")?, 1)?;
    let origin = AffineFiberMap::constant(CoordKind::Complex, 0, vec![0.0, 0.0]);
    let phi = WeightField::from_fn("|z|^2", CoordKind::Complex, 0, 1, |_, z| z[0] * z[0] + z[1] * z[1])
        .with_lower_bound(0.0)
        .with_radial(Radiality::About(origin));
    let rows = lemma2_harness(&phi, f64::INFINITY, &schedule, &cfg)?;
    let mut checks = vec![
        Check::holds("errors |B(0) − 1| strictly decrease", rows.windows(2).all(|w| w[1].error < w[0].error)),
        Check::at_most("final error", p.f64("final_tol")?, rows.last().unwrap().error, 0.0),
    ];
    for r in &rows {
        checks.push(Check::at_most(format!("B(0) ≤ e^{{sup φ}} at k = {}", r.k), r.upper_bound, r.value, 0.0));
    }
    let disc_k = p.u32("disc_k")?;
    let zero = WeightField::zero(CoordKind::Complex, 0, 1);
    let d = lemma2_harness(&zero, 1.0, &LocalizationSchedule::new(vec![disc_k], 1)?, &cfg)?;
    checks.push(Check::close(format!("φ ≡ 0 on the unit disc, k = {disc_k}"), 1.0, d[0].value, p.f64("disc_tol")?));
    let mut table = Table::new("lemma2", &["k", "value", "error", "upper_bound"]);
    for r in &rows {
        table.push(vec![r.k as f64, r.value, r.error, r.upper_bound]);
    }
    Ok(Outcome { checks, tables: vec![table] })
}

fn lemma3(p: &Params) -> Result<Outcome> {
    let cfg = p.quad()?;
    let r = p.f64("r")?;
    let degree = p.usize("degree")?;
    let schedule = LocalizationSchedule::new(p.u32s("ks")?, 1)?;
    let rows = lemma3_harness(&shapes::disc(1.0), r, &schedule, degree, &cfg)?;
    let mut checks = Vec::new();
    let upper = 1.0 / (PI * r * r);
    let slack = p.f64("slack")?;
    for row in &rows {
        let k = row.k as f64;
        let formula = 1.0 / (PI * r * r * (1.0 + 2.0 * (r * r - r.powi(row.k as i32)) / (r * r * (k - 2.0))));
        checks.push(Check::at_least(format!("B ≥ lower bound at k = {}", row.k), formula, row.value, slack));
        checks.push(Check::at_most(format!("B ≤ 1/(πr²) at k = {}", row.k), upper, row.value, slack));
    }
    let last = rows.last().unwrap();
    checks.push(Check::close(
        format!("B within reach of 1/(πr²) at k = {}", last.k),
        upper,
        last.value,
        p.f64("final_tol")?,
    ));
    let small = p.f64("small_radius")?;
    let srows = lemma3_harness(&shapes::disc(small), r, &schedule, degree, &cfg)?;
    for row in &srows {
        checks.push(Check::at_least(
            format!("disc of radius {small}: B ≥ 1/|D| at k = {}", row.k),
            1.0 / (PI * small * small),
            row.value,
            slack,
        ));
    }
    let mut table = Table::new("lemma3", &["k", "value", "lower_bound", "upper_bound"]);
    for row in &rows {
        table.push(vec![row.k as f64, row.value, row.lower_bound, upper]);
    }
    Ok(Outcome { checks, tables: vec![table] })
}

fn min_principle(p: &Params) -> Result<Outcome> {
    let k = p.f64("k")?;
    let mcfg = p.min()?;
    let phi = paper_weight("minprinciple_cex", 0.0)?;
    let dom = shapes::real_space(1, 1);
    let a = AffineFiberMap::constant(CoordKind::Real, 1, vec![0.0]);
    let ts = p.f64s("ts")?;
    let mut checks = Vec::new();
    let mut us = Vec::new();
    for &t in &ts {
        let u = min_principle_transform(&phi, &dom, &a, k, &[t], &mcfg)?;
        checks.push(Check::at_most(format!("u_k({t}) ≤ φ(t, a(t))"), phi.eval(&[t], &[0.0]), u, 0.0));
        us.push(u);
    }
    if us.len() == 3 {
        checks.push(Check::at_least(
            format!("midpoint violation of u_k over ({}, {})", ts[0], ts[2]),
            p.f64("min_violation")?,
            us[1] - 0.5 * (us[0] + us[2]),
            0.0,
        ));
    }
    let it = p.f64("inf_tol")?;
    for t in p.f64s("inf_ts")? {
        let v = fiber_infimum(&phi, &dom, &[t], &mcfg)?;
        checks.push(Check::close(format!("inf_x φ({t}, x) = max(t² − 1, 0)"), (t * t - 1.0).max(0.0), v, it));
    }
    let mut table = Table::new("uk", &["t", "u_k"]);
    for (t, u) in ts.iter().zip(&us) {
        table.push(vec![*t, *u]);
    }
    Ok(Outcome { checks, tables: vec![table] })
}

fn midpoint_probe(p: &Params) -> Result<Outcome> {
    let cfg = p.quad()?;
    let schedule = LocalizationSchedule::new(p.u32s("ks")?, 1)?;
    let zero = WeightField::zero(CoordKind::Real, 1, 1);
    let tol = p.f64("tol")?;
    let mut checks = Vec::new();
    let mut table = Table::new("probe", &["case", "k", "excess"]);

    let dumbbell = midpoint_divergence_probe(&zero, &shapes::dumbbell(), &[-1.0, 0.0], &[1.0, 0.0], &schedule, &cfg)?;
    checks.push(Check::holds("dumbbell: midpoint obstruction found", dumbbell.obstruction_found));

    let ball = Domain::real(Csg::ball(vec![0.0, 0.0], 1.0), 1, 1);
    let convex = midpoint_divergence_probe(&zero, &ball, &[-0.5, 0.0], &[0.5, 0.0], &schedule, &cfg)?;
    checks.push(Check::holds("ball: no obstruction", !convex.obstruction_found));
    let worst = convex.rows.iter().map(|r| r.excess).fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::at_most("ball: midpoint inequality at every k", 0.0, worst, tol));

    let punctured =
        midpoint_divergence_probe(&zero, &shapes::punctured_ball(1, 1), &[-0.5, 0.0], &[0.5, 0.0], &schedule, &cfg)?;
    checks.push(Check::holds("punctured ball: no obstruction", !punctured.obstruction_found));
    let same = punctured.rows.iter().zip(&convex.rows).all(|(a, b)| a.at_mid == b.at_mid);
    checks.push(Check::holds("puncture leaves ψ̃_k(t*) unchanged", same));

    for (case, probe) in [(0.0, &dumbbell), (1.0, &convex), (2.0, &punctured)] {
        for r in &probe.rows {
            table.push(vec![case, r.k as f64, r.excess]);
        }
    }
    Ok(Outcome { checks, tables: vec![table] })
}

fn disc_distance(p: &Params) -> Result<Outcome> {
    let bidisc_disc = AnalyticDisc::new(vec![[0.0, 0.0], [0.5, 0.0]], vec![vec![[0.0, 0.0], [0.0, 0.0], [0.5, 0.0]]]);
    let rb =
        disc_distance_check(&bidisc_disc, &shapes::bidisc(), p.usize("bidisc_interior")?, p.usize("bidisc_boundary")?)?;
    let mut checks = vec![Check::at_most(
        format!("bidisc, (w/2, w²/2): |gap| over {} samples", rb.samples),
        0.0,
        rb.gap.abs(),
        p.f64("gap_tol")?,
    )];
    let [f, g]: [Vec<[f64; 2]>; 2] = serde_json::from_value(p.0["hartogs_disc"].clone())
        .map_err(|_| crate::Error::InvalidParam("hartogs_disc must be [f_coeffs, g_coeffs]".into()))?;
    let hd = AnalyticDisc::new(f, vec![g]);
    let rh = disc_distance_check(&hd, &shapes::hartogs(), p.usize("hartogs_interior")?, p.usize("hartogs_boundary")?)?;
    checks.push(Check::at_least(
        "Hartogs figure: interior comes strictly closer to the boundary than ∂disc",
        p.f64("min_gap")?,
        rh.gap,
        0.0,
    ));
    let mut table = Table::new("discs", &["case", "d_disc", "d_boundary", "gap", "witness_re", "witness_im"]);
    for (case, r) in [(0.0, &rb), (1.0, &rh)] {
        table.push(vec![case, r.d_disc, r.d_boundary, r.gap, r.witness[0], r.witness[1]]);
    }
    Ok(Outcome { checks, tables: vec![table] })
}

/// Centres spread over the disc of radius `r` (Vogel spiral).
pub fn spiral(n: usize, r: f64) -> Vec<[f64; 2]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let rho = r * ((i as f64 + 0.5) / n as f64).sqrt();
            let th = golden * i as f64;
            [rho * th.cos(), rho * th.sin()]
        })
        .collect()
}

fn psh_delta(p: &Params) -> Result<Outcome> {
    let radii = p.f64s("radii")?;
    let n = p.usize("angles")?;
    let tol = p.f64("tol")?;
    let centers = spiral(p.usize("centers")?, p.f64("center_radius")?);
    let neg_log_delta = |d: &Domain| {
        let d = d.clone();
        move |tau: [f64; 2]| fiber_distance(&d, &tau, &[0.0, 0.0]).map(|v| -v.ln()).unwrap_or(f64::NAN)
    };
    let mut checks = Vec::new();
    let mut table = Table::new("deficits", &["case", "worst_deficit"]);
    for (case, (label, dom)) in
        [("bidisc", shapes::bidisc()), ("ball", shapes::complex_ball(1.0))].into_iter().enumerate()
    {
        let r = psh_mean_value_check(neg_log_delta(&dom), &centers, &radii, n, tol)?;
        checks.push(Check::at_most(format!("{label}: −log δ sub-mean-value"), 0.0, r.worst_deficit, tol));
        table.push(vec![case as f64, r.worst_deficit]);
    }
    let hc = p.point("hartogs_center")?;
    let r = psh_mean_value_check(neg_log_delta(&shapes::hartogs()), &[hc], &radii, n, tol)?;
    checks.push(Check::at_least(
        "Hartogs figure: −log δ fails the mean-value inequality",
        p.f64("min_deficit")?,
        r.worst_deficit,
        0.0,
    ));
    table.push(vec![2.0, r.worst_deficit]);
    Ok(Outcome { checks, tables: vec![table] })
}

fn berndtsson_cex(p: &Params) -> Result<Outcome> {
    let eps = p.f64("epsilon")?;
    let cfg = p.quad()?;
    let vt = p.f64("value_tol")?;
    let w = paper_weight("berndtsson_cex", eps)?;
    let mut checks = Vec::new();
    let k_max = p.usize("moments")?;
    for a in p.f64s("abs_z")? {
        let t = [a, 0.0];
        let mt = bergman::radial_moments_with(
            w.name(),
            |r| w.profile(&t, r).unwrap_or(f64::INFINITY),
            k_max,
            &w.radial_seams(&t),
            f64::INFINITY,
            &cfg,
        )?;
        checks.push(Check::close(format!("m_0 at |z| = {a}"), berndtsson_m0_closed(eps, a), mt.m0().value, vt));
        checks.push(Check::holds(
            format!("m_k divergent for 1 ≤ k ≤ {k_max} at |z| = {a}"),
            mt.moments[1..].iter().all(|m| m.status == MomentStatus::Divergent),
        ));
    }
    let n_curve = p.usize("curve_points")?;
    let zs: Vec<[f64; 2]> = linspace(0.0, p.f64("curve_to")?, n_curve).into_iter().map(|x| [x, 0.0]).collect();
    let rows = berndtsson_phi_curve(eps, &zs, &cfg)?;
    let worst = rows.iter().map(|r| (r.computed - r.closed_form).abs()).fold(0.0, f64::max);
    checks.push(Check::at_most(format!("Φ matches the piecewise closed form on {n_curve} points"), 0.0, worst, vt));

    let tol = p.f64("tol")?;
    let centers = spiral(p.usize("centers")?, p.f64("center_radius")?);
    let phi_fn = berndtsson_phi_fn(eps, cfg)?;
    let psh = psh_mean_value_check(phi_fn, &centers, &p.f64s("radii")?, p.usize("angles")?, tol)?;
    checks.push(Check::at_most(
        format!("Φ sub-mean-value on {} centres", psh.centers_checked),
        0.0,
        psh.worst_deficit,
        tol,
    ));

    let lap = laplacian_check(eps, &p.points("laplacian_points")?, p.f64("laplacian_h")?, &cfg)?;
    let lt = p.f64("laplacian_tol")?;
    for r in &lap {
        checks.push(Check::close(format!("stencil ∂∂̄Φ at {:?}", r.z), r.closed_form, r.stencil, lt));
    }
    let n_pos = p.usize("positivity_samples")?;
    let positive = linspace(0.0, 0.9 * eps, n_pos).into_iter().all(|s| laplacian_closed(eps, s) > 0.0);
    checks.push(Check::holds(format!("closed-form Laplacian positive at {n_pos} radii in [0, 0.9ε]"), positive));

    let mut table = Table::new("phi", &["z_re", "z_im", "computed", "closed_form"]);
    for r in &rows {
        table.push(vec![r.z[0], r.z[1], r.computed, r.closed_form]);
    }
    Ok(Outcome { checks, tables: vec![table] })
}
