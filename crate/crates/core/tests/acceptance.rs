//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Expected values come from closed forms or brute force written here, not
//! from the library routines under test.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use ising_bounds::bounds::{averaging_bounds, mixture_mean, projection_bounds, theorem_membership};
use ising_bounds::homogenize::{phi_direction, phi_profile, DirectionFan, SurfaceTensionProfile};
use ising_bounds::lattice::{random_mixture, BondField};
use ising_bounds::microgeometry::{laminate, realize};
use ising_bounds::spin_oracle::{dual_path_min, exhaustive_min, SpinWindow};
use ising_bounds::wulff::{admissible, contains_admissible_rectangle, render_svg, wulff_shape, ConvexPolygon};
use ising_bounds::Rational64;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// `|z|_1 / |z|` scaled by the weight, straight from the integer vector.
fn l1_over_l2(z: [i64; 2]) -> f64 {
    (z[0].abs() + z[1].abs()) as f64 / (z[0] as f64).hypot(z[1] as f64)
}

/// `c1 |nu1| + c2 |nu2|` with `nu = (z2, -z1) / |z|`.
fn weighted(z: [i64; 2], c1: f64, c2: f64) -> f64 {
    (c1 * z[1].abs() as f64 + c2 * z[0].abs() as f64) / (z[0] as f64).hypot(z[1] as f64)
}

fn criterion_1() -> Outcome {
    let fan = DirectionFan::with_max_coordinate(8).unwrap();
    let mut worst = 0.0f64;
    let mut failures = 0;
    let mut count = 0;
    for (t, alpha) in [(1usize, 1.0), (2, 0.5), (3, 1.7), (4, 2.0)] {
        let f = BondField::homogeneous(t, alpha).unwrap();
        for &z in fan.directions() {
            let e = phi_direction(&f, z, 8, 1e-12).unwrap();
            let err = (e.value - alpha * l1_over_l2(z)).abs();
            worst = worst.max(err);
            count += 1;
            if err > 1e-12 || !e.converged || e.k_used != 1 {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("{count} (field, direction) pairs, max |error| {worst:.1e}, {failures} failures"))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = Vec::new();
    let mut worst_rel = 0.0f64;
    for i in 0..20 {
        let t = [2usize, 4, 8][i % 3];
        let n1 = rng.gen_range(0..=t);
        let n2 = rng.gen_range(0..=t);
        let alpha = rng.gen_range(0.5..1.5);
        let beta = alpha + rng.gen_range(0.2..2.0);
        let f = laminate(t, n1, n2, alpha, beta).unwrap();
        let c1 = (n1 as f64 * beta + (t - n1) as f64 * alpha) / t as f64;
        let c2 = (n2 as f64 * beta + (t - n2) as f64 * alpha) / t as f64;
        let (p, a) = (projection_bounds(&f), averaging_bounds(&f));
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12;
        if !(close(p.c1, a.c1) && close(p.c2, a.c2) && close(p.c1, c1) && close(p.c2, c2)) {
            failures.push(format!("laminate {i}: pairs differ"));
        }
        for (z, want) in [([0, 1], c1), ([1, 0], c2)] {
            let e = phi_direction(&f, z, 1, 0.0).unwrap();
            if !close(e.value, want) {
                failures.push(format!("laminate {i}: axis z={z:?} gives {} not {want}", e.value));
            }
        }
        for z in [[1, 1], [1, -1]] {
            let e = phi_direction(&f, z, 8, 0.0).unwrap();
            let want = weighted(z, c1, c2);
            let rel = (e.value - want).abs() / want;
            worst_rel = worst_rel.max(rel);
            let sandwich = e.lower_certificate <= want + 1e-12 && want <= e.upper_certificate + 1e-12;
            if rel > 0.02 || !sandwich {
                failures.push(format!("laminate {i}: diagonal z={z:?} rel {rel:.3e} sandwich {sandwich}"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("20 laminates, max diagonal rel error {worst_rel:.2e}{}", summarize(&failures)),
    )
}

fn summarize(failures: &[String]) -> String {
    if failures.is_empty() {
        String::new()
    } else {
        format!("; {} failures, first: {}", failures.len(), failures[0])
    }
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let fan = DirectionFan::at_least(16).unwrap();
    let mut failures = Vec::new();
    let mut checks = 0;
    let (alpha, beta) = (1.0, 2.0);
    for i in 0..100 {
        let t = rng.gen_range(1..=8usize);
        let theta = [0.25, 0.5, 0.75][i % 3];
        let f = random_mixture(t, theta, alpha, beta, rng.gen()).unwrap();
        // Bounds recomputed from the raw weights.
        let rows_min: f64 =
            (0..t).map(|y| f.horizontal_row(y).iter().cloned().fold(f64::INFINITY, f64::min)).sum::<f64>() / t as f64;
        let cols_min: f64 = (0..t).map(|x| f.vertical_column(x).fold(f64::INFINITY, f64::min)).sum::<f64>() / t as f64;
        let avg_h: f64 = f.horizontal().iter().sum::<f64>() / (t * t) as f64;
        let avg_v: f64 = f.vertical().iter().sum::<f64>() / (t * t) as f64;
        for &z in fan.directions() {
            let e = phi_direction(&f, z, 4, 0.0).unwrap();
            let lower = weighted(z, rows_min, cols_min);
            let upper = weighted(z, avg_h, avg_v);
            let z_len = (z[0] as f64).hypot(z[1] as f64);
            let slack = 4.0 * beta / ((e.k_used * t) as f64 * z_len);
            checks += 1;
            if lower > e.upper_certificate + 1e-12 {
                failures.push(format!("field {i} z={z:?}: lower {lower} > upper certificate {}", e.upper_certificate));
            }
            if e.value > upper + slack + 1e-12 {
                failures.push(format!("field {i} (T={t}) z={z:?}: {} > averaging {upper} + slack {slack}", e.value));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("100 mixtures x {} directions ({checks} checks){}", fan.len(), summarize(&failures)),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (alpha, beta) = (1.0, 2.0);
    let t = 40usize;
    let fan = DirectionFan::with_max_coordinate(3).unwrap();
    let mut failures = Vec::new();
    let mut worst_rel = 0.0f64;
    let mut made = 0;
    while made < 10 {
        // theta on the 1/(2 T^2) grid so the declared fraction is attainable.
        let theta = rng.gen_range(0..=2 * t * t) as f64 / (2 * t * t) as f64;
        let m = mixture_mean(theta, alpha, beta);
        let c1 = rng.gen_range(alpha..=beta);
        let c2 = rng.gen_range(alpha..=beta);
        if c1 + c2 > 2.0 * m {
            continue;
        }
        made += 1;
        let r = match realize(c1, c2, theta, alpha, beta, t, rng.gen()) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("target ({c1:.3}, {c2:.3}, theta {theta}): {e}"));
                continue;
            }
        };
        let vf = r.field.volume_fractions().unwrap();
        let declared = Rational64::approximate_float(theta).unwrap();
        if (vf.theta - declared).abs() > Rational64::new(1, (t * t) as i64) {
            failures.push(format!("theta {} vs declared {declared}", vf.theta));
        }
        for &z in fan.directions() {
            let e = phi_direction(&r.field, z, 2, 1e-12).unwrap();
            let want = weighted(z, c1, c2);
            let rel = (e.value - want).abs() / want;
            worst_rel = worst_rel.max(rel);
            if rel > 0.02 {
                failures.push(format!("target ({c1:.3}, {c2:.3}) z={z:?}: rel {rel:.3e}"));
            }
        }
        let profile = phi_profile(&r.field, &fan, 2, 1e-12).unwrap();
        let verdict = theorem_membership(&profile, alpha, beta, theta, 1e-9).unwrap();
        if !verdict.member {
            failures.push(format!("target ({c1:.3}, {c2:.3}, theta {theta}) rejected"));
        }
    }
    outcome(failures.is_empty(), format!("10 targets at T={t}, max rel error {worst_rel:.2e}{}", summarize(&failures)))
}

fn criterion_5() -> Outcome {
    let fan = DirectionFan::with_max_coordinate(4).unwrap();
    let (alpha, beta) = (1.0, 2.0);
    let mut failures = Vec::new();
    let top = SurfaceTensionProfile::weighted_l1(&fan, beta, beta);
    let v = theorem_membership(&top, alpha, beta, 0.5, 1e-9).unwrap();
    match v.worst_violation {
        Some(viol) if !v.member && viol.amount > 0.0 => {}
        _ => failures.push("beta l1 at theta 1/2 not rejected with a violation".to_string()),
    }
    let bottom = SurfaceTensionProfile::weighted_l1(&fan, alpha, alpha);
    for theta in [0.0, 0.25, 0.5, 1.0] {
        if !theorem_membership(&bottom, alpha, beta, theta, 1e-9).unwrap().member {
            failures.push(format!("alpha l1 rejected at theta {theta}"));
        }
    }
    let mut profiles: Vec<SurfaceTensionProfile<f64>> = vec![
        SurfaceTensionProfile::weighted_l1(&fan, 1.2, 1.7),
        SurfaceTensionProfile::weighted_l1(&fan, 2.0, 1.0),
        SurfaceTensionProfile::weighted_l1(&fan, 1.5, 1.5),
        SurfaceTensionProfile::weighted_l1(&fan, 1.9, 1.9),
        SurfaceTensionProfile::from_fn(&fan, "euclid", |nu: [f64; 2]| 1.6 * nu[0].hypot(nu[1])),
        SurfaceTensionProfile::from_fn(&fan, "max", |nu: [f64; 2]| {
            1.8 * nu[0].abs().max(nu[1].abs()) + 0.2 * nu[0].abs()
        }),
    ];
    for seed in 0..4u64 {
        let f = random_mixture(4, 0.25 + 0.15 * seed as f64, alpha, beta, seed).unwrap();
        profiles.push(phi_profile(&f, &fan, 4, 1e-9).unwrap());
    }
    let sweep: Vec<f64> = (0..=40).map(|i| i as f64 / 40.0).collect();
    for (j, p) in profiles.iter().enumerate() {
        let members: Vec<bool> =
            sweep.iter().map(|&th| theorem_membership(p, alpha, beta, th, 1e-9).unwrap().member).collect();
        if members.windows(2).any(|w| w[0] && !w[1]) {
            failures.push(format!("profile {j} loses membership as theta grows"));
        }
    }
    outcome(failures.is_empty(), format!("2 extremes, 10 sweep profiles x 41 values{}", summarize(&failures)))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let fan = DirectionFan::with_max_coordinate(4).unwrap();
    let (alpha, beta) = (1.0, 2.0);
    let mut failures = Vec::new();
    let mut worst_vertex = 0.0f64;
    let mut worst_energy = 0.0f64;
    let mut worst_curve = 0.0f64;
    let energy_of = |poly: &ConvexPolygon<f64>, c1: f64, c2: f64| {
        let v = poly.vertices();
        (0..v.len())
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % v.len()]);
                // Outward normal direction of a counterclockwise edge is (dy, -dx).
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                c1 * dy.abs() + c2 * dx.abs()
            })
            .sum::<f64>()
    };
    let first_quadrant =
        |poly: &ConvexPolygon<f64>| *poly.vertices().iter().find(|v| v[0] > 0.0 && v[1] > 0.0).unwrap();
    for _ in 0..25 {
        let (c1, c2) = (rng.gen_range(alpha..=beta), rng.gen_range(alpha..=beta));
        let w = wulff_shape(&SurfaceTensionProfile::weighted_l1(&fan, c1, c2)).unwrap();
        let v = first_quadrant(&w.polygon);
        let err = (v[0] - 1.0 / (8.0 * c2)).abs().max((v[1] - 1.0 / (8.0 * c1)).abs());
        worst_vertex = worst_vertex.max(err);
        let e = (energy_of(&w.polygon, c1, c2) - 1.0).abs();
        worst_energy = worst_energy.max(e).max((w.energy - 1.0).abs());
        if err > 1e-9 || e > 1e-9 || w.polygon.vertices().len() != 4 {
            failures.push(format!("({c1:.4}, {c2:.4}): vertex err {err:.2e}, energy err {e:.2e}"));
        }
    }
    let sq = wulff_shape(&SurfaceTensionProfile::weighted_l1(&fan, alpha, alpha)).unwrap();
    let v = first_quadrant(&sq.polygon);
    if (v[0] - 1.0 / (8.0 * alpha)).abs() > 1e-9 || (v[1] - 1.0 / (8.0 * alpha)).abs() > 1e-9 {
        failures.push(format!("alpha l1 square vertex {v:?}"));
    }
    // Euclidean samples: normalization only.
    let euclid =
        wulff_shape(&SurfaceTensionProfile::from_fn(&fan, "euclid", |nu: [f64; 2]| nu[0].hypot(nu[1]))).unwrap();
    let euclid_energy = {
        let v = euclid.polygon.vertices();
        (0..v.len())
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % v.len()]);
                (b[0] - a[0]).hypot(b[1] - a[1])
            })
            .sum::<f64>()
    };
    worst_energy = worst_energy.max((euclid_energy - 1.0).abs());
    if (euclid_energy - 1.0).abs() > 1e-9 {
        failures.push(format!("euclidean energy {euclid_energy}"));
    }
    for theta in [0.0, 0.2, 0.5, 0.8, 1.0] {
        let m = mixture_mean(theta, alpha, beta);
        let radius = (beta - m).min(m - alpha);
        for i in 0..=10 {
            let s = -radius + 2.0 * radius * i as f64 / 10.0;
            let (c1, c2) = (m + s, m - s);
            let w = wulff_shape(&SurfaceTensionProfile::weighted_l1(&fan, c1, c2)).unwrap();
            let v = first_quadrant(&w.polygon);
            let r = (1.0 / v[0] + 1.0 / v[1] - 16.0 * m).abs();
            worst_curve = worst_curve.max(r);
            if r > 1e-12 {
                failures.push(format!("theta {theta} s {s:.3}: curve residual {r:.2e}"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "max vertex err {worst_vertex:.1e}, energy err {worst_energy:.1e}, curve residual {worst_curve:.1e}{}",
            summarize(&failures)
        ),
    )
}

/// Random centrally symmetric convex polygon inside the square of half-side
/// `h`. Points are drawn along random rays at radius `rho` times the distance
/// to the envelope for `m`, with `rho` near one, then clamped to the square,
/// so that both verdicts of the predicates occur often.
fn random_symmetric_polygon(rng: &mut ChaCha8Rng, h: f64, m: f64, axis_symmetric: bool) -> ConvexPolygon<f64> {
    loop {
        let n = rng.gen_range(2..=6);
        let mut pts: Vec<[f64; 2]> = (0..n)
            .map(|_| {
                let a: f64 = rng.gen_range(0.02..std::f64::consts::PI - 0.02);
                let (c, s) = (a.cos(), a.sin());
                let reach =
                    if c.abs() < 1e-9 { 1.0 / (16.0 * m) * 2.0 } else { (1.0 / c.abs() + 1.0 / s) / (16.0 * m) };
                let r = reach * rng.gen_range(0.85..1.2);
                [(r * c).clamp(-h, h), (r * s).clamp(-h, h)]
            })
            .collect();
        if axis_symmetric {
            let mirrored: Vec<[f64; 2]> = pts.iter().map(|p| [-p[0], p[1]]).collect();
            pts.extend(mirrored);
        }
        if let Ok(p) = ConvexPolygon::symmetric_hull(&pts) {
            if p.area() > 1e-6 * h * h {
                return p;
            }
        }
    }
}

/// Smallest outward excess of an admissible rectangle's corners over a dense
/// scan of `s`; positive means no rectangle fits.
fn rectangle_margin(poly: &ConvexPolygon<f64>, theta: f64, alpha: f64, beta: f64) -> f64 {
    let m = mixture_mean(theta, alpha, beta);
    let radius = beta - m;
    (0..=200_000)
        .map(|i| -radius + 2.0 * radius * i as f64 / 200_000.0)
        .filter(|s| m - s > 0.0 && m + s > 0.0)
        .map(|s| {
            let (a, b) = (1.0 / (8.0 * (m - s)), 1.0 / (8.0 * (m + s)));
            [[a, b], [-a, b], [a, -b], [-a, -b]].into_iter().map(|p| poly.gauge(p)).fold(f64::MIN, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

fn criterion_7() -> Outcome {
    let (alpha, beta) = (1.0f64, 2.0f64);
    let h = 1.0 / (8.0 * alpha);
    let fan = DirectionFan::with_max_coordinate(4).unwrap();
    let mut failures = Vec::new();
    let square = ConvexPolygon::rectangle(h, h);
    for theta in [0.0, 0.1, 0.25, 0.4, 0.5] {
        if !admissible(&square, theta, alpha, beta).unwrap().admissible {
            failures.push(format!("square rejected at theta {theta}"));
        }
    }
    for theta in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let m = mixture_mean(theta, alpha, beta);
        let radius = (beta - m).min(m - alpha);
        for s in [-radius, -0.5 * radius, 0.0, 0.3 * radius, radius] {
            let w = wulff_shape(&SurfaceTensionProfile::weighted_l1(&fan, m + s, m - s)).unwrap();
            if !admissible(&w.polygon, theta, alpha, beta).unwrap().admissible {
                failures.push(format!("rectangle theta {theta} s {s:.3} rejected"));
            }
        }
    }
    let tiny = square.scaled(1e-3);
    if admissible(&tiny, 0.5, alpha, beta).unwrap().admissible {
        failures.push("tiny square accepted".into());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let thetas = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut divergences = Vec::new();
    let mut positives = 0;
    for i in 0..100 {
        let theta = thetas[i % thetas.len()];
        let poly = random_symmetric_polygon(&mut rng, h, mixture_mean(theta, alpha, beta), false);
        let a = admissible(&poly, theta, alpha, beta).unwrap().admissible;
        let r = contains_admissible_rectangle(&poly, theta, alpha, beta).unwrap().is_some();
        positives += a as usize;
        if a != r {
            let margin = rectangle_margin(&poly, theta, alpha, beta);
            divergences.push(format!(
                "polygon {i} theta {theta}: arcs {a}, rectangle {r} (dense-scan margin {margin:.3e}), vertices {:?}",
                poly.vertices()
            ));
        }
    }
    let mut axis_divergences = 0;
    for i in 0..100 {
        let theta = thetas[i % thetas.len()];
        let poly = random_symmetric_polygon(&mut rng, h, mixture_mean(theta, alpha, beta), true);
        let a = admissible(&poly, theta, alpha, beta).unwrap().admissible;
        let r = contains_admissible_rectangle(&poly, theta, alpha, beta).unwrap().is_some();
        axis_divergences += (a != r) as usize;
    }
    // Hull of p = (1/9, 1/15), q = (1/15, -1/9) and their negations: one vertex
    // on each arc at theta = 1/2, yet not axis-symmetric.
    let tilted = ConvexPolygon::symmetric_hull(&[[1.0 / 9.0, 1.0 / 15.0], [1.0 / 15.0, -1.0 / 9.0]]).unwrap();
    let tilted_arcs = admissible(&tilted, 0.5, alpha, beta).unwrap().admissible;
    let tilted_rect = contains_admissible_rectangle(&tilted, 0.5, alpha, beta).unwrap().is_some();
    println!(
        "    finding: tilted square theta 0.5: arcs {tilted_arcs}, rectangle {tilted_rect} (dense-scan margin {:.3e})",
        rectangle_margin(&tilted, 0.5, alpha, beta)
    );
    for d in &divergences {
        println!("    finding: {d}");
    }
    if axis_divergences > 0 {
        failures.push(format!("{axis_divergences} divergences on axis-symmetric polygons"));
    }
    if !divergences.is_empty() {
        failures.push(format!("{} divergences on centrally symmetric polygons", divergences.len()));
    }
    outcome(
        failures.is_empty(),
        format!(
            "fixed cases ok={}, random: {positives}/100 admissible, {} divergences (axis-symmetric control: {axis_divergences}/100){}",
            failures.iter().all(|f| f.contains("divergences")),
            divergences.len(),
            summarize(&failures)
        ),
    )
}

/// Minimal `(1/8) sum_{ordered pairs} c (u_i - u_j)^2` over all fillings of the
/// free sites, enumerated directly on lattice coordinates.
fn brute_force_energy(f: &BondField<Rational64>, w: usize, h: usize, nu: [f64; 2], offset: f64) -> Rational64 {
    let (wi, hi) = (w as i64, h as i64);
    let free = |x: i64, y: i64| x >= 0 && y >= 0 && x < wi && y < hi;
    let trace = |x: i64, y: i64| if x as f64 * nu[0] + y as f64 * nu[1] - offset >= 0.0 { 1i64 } else { -1 };
    let mut best: Option<Rational64> = None;
    for mask in 0u32..(1 << (w * h)) {
        let spin = |x: i64, y: i64| {
            if free(x, y) {
                if mask >> (y * wi + x) & 1 == 1 {
                    -1
                } else {
                    1
                }
            } else {
                trace(x, y)
            }
        };
        let mut raw = Rational64::from_integer(0);
        for y in -1..=hi {
            for x in -1..=wi {
                // Each site looks at its four neighbours: ordered pairs.
                if !free(x, y) {
                    continue;
                }
                for (dx, dy) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                    let (nx, ny) = (x + dx, y + dy);
                    let c = match (dx, dy) {
                        (1, 0) => f.h(x, y),
                        (-1, 0) => f.h(nx, ny),
                        (0, 1) => f.v(x, y),
                        _ => f.v(nx, ny),
                    };
                    let d = spin(x, y) - spin(nx, ny);
                    // Pairs with two free ends are met twice here, pairs with one
                    // free end once; count the latter in both orders.
                    let mult = if free(nx, ny) { 1 } else { 2 };
                    raw += c * Rational64::from_integer(mult * d * d);
                }
            }
        }
        let e = raw / 8;
        if best.is_none_or(|b| e < b) {
            best = Some(e);
        }
    }
    best.unwrap()
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = Vec::new();
    let alpha = Rational64::from_integer(1);
    let beta = Rational64::new(5, 2);
    let mut nontrivial = 0;
    for i in 0..50 {
        let t = rng.gen_range(1..=4usize);
        let f = random_mixture(t, rng.gen_range(0.0..=1.0), alpha, beta, rng.gen()).unwrap();
        let (w, h) = if i % 2 == 0 { (3, 3) } else { (4, 4) };
        let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let nu = [angle.cos(), angle.sin()];
        let origin = [rng.gen_range(-4..4), rng.gen_range(-4..4)];
        let centre = SpinWindow::centered(w, h, origin, nu).unwrap();
        let offset = centre.offset() + rng.gen_range(-1.0..1.0);
        let window = SpinWindow::new(w, h, origin, nu, offset).unwrap();
        let (exhaustive, _) = exhaustive_min(&f, &window).unwrap();
        let dual = dual_path_min(&f, &window);
        // Shift the oracle to the window's lattice position.
        let shifted_offset = offset - (origin[0] as f64 * nu[0] + origin[1] as f64 * nu[1]);
        let shifted = shifted_field(&f, origin);
        let brute = brute_force_energy(&shifted, w, h, nu, shifted_offset);
        nontrivial += (dual > Rational64::from_integer(0)) as usize;
        if exhaustive != dual || brute != dual {
            failures.push(format!("instance {i}: brute {brute}, exhaustive {exhaustive}, dual {dual}"));
        }
    }
    outcome(failures.is_empty(), format!("50 instances ({nontrivial} with an interface){}", summarize(&failures)))
}

/// Same field with the lattice origin moved to `origin`.
fn shifted_field(f: &BondField<Rational64>, origin: [i64; 2]) -> BondField<Rational64> {
    let t = f.period();
    let rows = |g: &dyn Fn(i64, i64) -> Rational64| -> Vec<Vec<Rational64>> {
        (0..t as i64).map(|y| (0..t as i64).map(|x| g(x + origin[0], y + origin[1])).collect()).collect()
    };
    BondField::new(t, rows(&|x, y| f.h(x, y)), rows(&|x, y| f.v(x, y)), f.alpha(), f.beta()).unwrap()
}

fn run_cli(args: &[&str], dir: &Path) -> (i32, Vec<u8>) {
    let out =
        Command::new(env!("CARGO_BIN_EXE_ising-bounds")).args(args).current_dir(dir).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn criterion_9() -> Outcome {
    let mut failures = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let setup: &[&[&str]] = &[
        &["gen", "--kind", "random", "--T", "4", "--theta", "0.5", "--seed", "7", "--out", "field.json"],
        &[
            "gen",
            "--kind",
            "realize",
            "--T",
            "8",
            "--c1",
            "1.25",
            "--c2",
            "1.5",
            "--theta",
            "0.5",
            "--out",
            "real.json",
        ],
        &["phi", "--field", "field.json", "--directions", "8", "--k-max", "2", "--out", "profile.json"],
    ];
    for args in setup {
        let (code, _) = run_cli(args, d);
        if code != 0 {
            failures.push(format!("setup {args:?} exit {code}"));
        }
    }
    let commands: &[&[&str]] = &[
        &["gen", "--kind", "homogeneous", "--T", "1", "--alpha", "1"],
        &["gen", "--kind", "laminate", "--T", "4", "--N1", "2", "--N2", "1", "--alpha", "1", "--beta", "2"],
        &["gen", "--kind", "random", "--T", "4", "--theta", "0.5", "--seed", "7"],
        &["gen", "--kind", "special", "--T", "8", "--t1", "1/4", "--t2", "1/2", "--theta1", "1/2", "--theta2", "3/4"],
        &["gen", "--kind", "realize", "--T", "8", "--c1", "1.25", "--c2", "1.5", "--theta", "0.5", "--seed", "3"],
        &["phi", "--field", "field.json", "--directions", "8", "--k-max", "2"],
        &["bounds", "--field", "field.json"],
        &["check", "--profile", "profile.json", "--theta", "0.5", "--alpha", "1", "--beta", "2"],
        &["wulff", "--c1", "1", "--c2", "2", "--theta", "0.5", "--alpha", "1", "--beta", "2"],
        &["wulff", "--profile", "profile.json"],
        &["oracle", "--field", "field.json", "--z", "1,1", "--width", "4", "--height", "4"],
        &["report", "--field", "real.json", "--directions", "8", "--k-max", "2"],
    ];
    for args in commands {
        let (c1, o1) = run_cli(args, d);
        let (c2, o2) = run_cli(args, d);
        if c1 != c2 || o1 != o2 || o1.is_empty() {
            failures.push(format!("{args:?}: outputs differ between runs (exit {c1}/{c2})"));
        }
        if c1 != 0 {
            failures.push(format!("{args:?}: exit {c1}"));
        }
    }

    // Round trips on random documents.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let fan = DirectionFan::with_max_coordinate(2).unwrap();
    for i in 0..50 {
        let t = rng.gen_range(1..=6usize);
        let f = if i % 2 == 0 {
            random_mixture(t, rng.gen_range(0.0..=1.0), rng.gen_range(0.1..1.0), rng.gen_range(1.0..3.0), rng.gen())
                .unwrap()
        } else {
            let h: Vec<Vec<f64>> = (0..t).map(|_| (0..t).map(|_| rng.gen_range(1e-3..1e3)).collect()).collect();
            let v: Vec<Vec<f64>> = (0..t).map(|_| (0..t).map(|_| rng.gen_range(1e-3..1e3)).collect()).collect();
            BondField::new(t, h, v, None, None).unwrap()
        };
        let text = f.to_json();
        let back = BondField::<f64>::from_json(&text).unwrap();
        if back != f || back.to_json() != text {
            failures.push(format!("field document {i} does not round-trip"));
        }
        let (a, b) = (rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0));
        let p = SurfaceTensionProfile::from_fn(&fan, "random", |nu: [f64; 2]| {
            a * nu[0].abs() + b * nu[1].abs() + 0.1 * nu[0].hypot(nu[1])
        });
        let text = p.to_json();
        let back = SurfaceTensionProfile::<f64>::from_json(&text).unwrap();
        if back != p || back.to_json() != text {
            failures.push(format!("profile document {i} does not round-trip"));
        }
    }

    // Golden SVGs.
    let goldens = [("rectangle_theta_half.svg", 1.0, 2.0, 0.5), ("rectangle_theta_three_quarters.svg", 1.8, 1.2, 0.75)];
    let fan = DirectionFan::with_max_coordinate(4).unwrap();
    for (name, c1, c2, theta) in goldens {
        let w = wulff_shape(&SurfaceTensionProfile::weighted_l1(&fan, c1, c2)).unwrap();
        let svg = render_svg(&w.polygon, theta, 1.0, 2.0, 64).unwrap();
        let path = golden_dir().join(name);
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            std::fs::write(&path, &svg).unwrap();
        }
        match std::fs::read_to_string(&path) {
            Ok(want) if want == svg => {}
            Ok(_) => failures.push(format!("{name} differs from golden")),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    outcome(
        failures.is_empty(),
        format!("{} commands x 2 runs, 100 round trips, 2 golden SVGs{}", commands.len(), summarize(&failures)),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("homogeneous law", criterion_1),
        ("laminate exactness", criterion_2),
        ("bound sandwich", criterion_3),
        ("realization", criterion_4),
        ("membership verdicts", criterion_5),
        ("wulff identities", criterion_6),
        ("admissibility predicates", criterion_7),
        ("cut-path duality", criterion_8),
        ("determinism and formats", criterion_9),
    ];
    let filter: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        if filter.is_some_and(|f| f != n) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n} {status}: {name}: {} ({:.2}s)", o.detail, start.elapsed().as_secs_f64());
        failed += !o.pass as usize;
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
