//! Acceptance gate: one test per headline criterion, each printing a
//! PASS/FAIL line (visible with --nocapture) and enforcing its runtime
//! budget.  Oracles here are written independently of the library paths
//! they check.

use std::f64::consts::PI;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hypervol::angles::{AngleAssignment, AngleTarget};
use hypervol::boundary::{
    geometric_lengths, lengths_from_schlafli, lengths_to_shifts, quad_corners, shifts_to_lengths,
    LengthClass,
};
use hypervol::complex::{euler_check, IdealComplex};
use hypervol::fixtures;
use hypervol::geom::{chordal, cross_ratio, develop, Circle, Mobius, ProjPoint};
use hypervol::loba::lobachevsky;
use hypervol::packing::{cone_over_cellulation, delaunay_on_sphere, thurston_augment};
use hypervol::solver::{
    feasible_start, interior_shear_residuals, solve_structure, solve_structure_from,
    tangent_basis, volume_grad_hess, Degeneracy, SolveStatus, SolverOptions,
};
use hypervol::teich::{pentagon_holonomy, Angle};

fn finish(criterion: usize, label: &str, started: Instant, budget: Duration, ok: bool) {
    let took = started.elapsed();
    let verdict = if ok && took <= budget { "PASS" } else { "FAIL" };
    println!(
        "criterion {criterion} ({label}): {verdict} in {:.2}s (budget {:.0}s)",
        took.as_secs_f64(),
        budget.as_secs_f64()
    );
    assert!(ok, "criterion {criterion} ({label}) failed");
    assert!(
        took <= budget,
        "criterion {criterion} ({label}) overran its {budget:?} budget: {took:?}"
    );
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypervol"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field_f64(dump: &str, key: &str) -> f64 {
    let pat = format!("\"{key}\": ");
    let at = dump
        .find(&pat)
        .unwrap_or_else(|| panic!("no field {key} in:\n{dump}"));
    let rest = &dump[at + pat.len()..];
    let end = rest
        .find(|c| c == ',' || c == '\n' || c == ']' || c == '}')
        .unwrap();
    rest[..end].trim().parse().unwrap()
}

/// Body of the top-level array stored under `key`.
fn array_block<'a>(dump: &'a str, key: &str) -> &'a str {
    let pat = format!("\"{key}\": [");
    let at = dump
        .find(&pat)
        .unwrap_or_else(|| panic!("no field {key} in:\n{dump}"))
        + pat.len();
    let mut depth = 1usize;
    for (i, ch) in dump[at..].char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => {
                depth -= 1;
                if depth == 0 {
                    return &dump[at..at + i];
                }
            }
            _ => {}
        }
    }
    panic!("unterminated array for {key}");
}

/// Split an array body into elements at top-level commas.
fn split_top(body: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in body.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(body[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = body[start..].trim();
    if !last.is_empty() {
        out.push(last);
    }
    out
}

fn parse_circles(dump: &str, key: &str) -> Vec<Circle> {
    split_top(array_block(dump, key))
        .iter()
        .map(|el| {
            let inner = el.trim_start_matches('[').trim_end_matches(']');
            let v: Vec<f64> = inner.split(',').map(|t| t.trim().parse().unwrap()).collect();
            assert_eq!(v.len(), 4, "circle row: {el}");
            Circle {
                a: v[0],
                b: Complex64::new(v[1], v[2]),
                d: v[3],
            }
        })
        .collect()
}

fn parse_points(dump: &str, key: &str) -> Vec<ProjPoint> {
    split_top(array_block(dump, key))
        .iter()
        .map(|el| {
            if el.starts_with('"') {
                assert_eq!(*el, "\"inf\"", "point element: {el}");
                ProjPoint::infinity()
            } else {
                let inner = el.trim_start_matches('[').trim_end_matches(']');
                let v: Vec<f64> = inner.split(',').map(|t| t.trim().parse().unwrap()).collect();
                assert_eq!(v.len(), 2, "point row: {el}");
                ProjPoint::from_z(Complex64::new(v[0], v[1]))
            }
        })
        .collect()
}

fn fixture(name: &str) -> String {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn c1_pentagon_holonomy_is_exact() {
    let t0 = Instant::now();
    let m = pentagon_holonomy();
    let frac = |n: i64| Angle::new(BigInt::from(n), BigInt::from(32));
    let ok = m[0][0] == frac(28)
        && m[0][1] == frac(-10)
        && m[1][0] == frac(10)
        && m[1][1] == frac(33)
        && (&m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]) == Angle::from_integer(BigInt::from(1));
    finish(1, "pentagon holonomy", t0, Duration::from_secs(1), ok);
}

/// Independent quadrature oracle for the Lobachevsky function.
mod quad_oracle {
    use std::f64::consts::PI;

    /// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
    fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        (nodes, weights)
    }

    /// -integral of log|2 sin t| from 0 to x for x in [0, pi/2]: the log
    /// singularity at 0 is integrated in closed form, the smooth remainder
    /// log(sin t / t) by 48-point Gauss-Legendre.
    fn core(x: f64, nodes: &[f64], weights: &[f64]) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let mut smooth = 0.0;
        for (t, w) in nodes.iter().zip(weights) {
            let u = 0.5 * x * (t + 1.0);
            let f = if u < 1e-30 { 0.0 } else { (u.sin() / u).ln() };
            smooth += w * f;
        }
        smooth *= 0.5 * x;
        x - x * (2.0 * x).ln() - smooth
    }

    /// Oracle value at any angle, by oddness and pi-periodicity.
    pub fn value(theta: f64) -> f64 {
        let (nodes, weights) = gauss_legendre(48);
        let mut r = theta.rem_euclid(PI);
        let mut sign = 1.0;
        if r > PI / 2.0 {
            r = PI - r;
            sign = -1.0;
        }
        sign * core(r, &nodes, &weights)
    }
}

#[test]
fn c2_lobachevsky_matches_quadrature_and_identities() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut ok = (lobachevsky(PI / 6.0) - 0.507_470_803_204_826_7).abs() < 1e-9;
    ok &= (quad_oracle::value(PI / 6.0) - 0.507_470_803_204_826_7).abs() < 1e-12;
    for _ in 0..1000 {
        let theta = rng.gen_range(-3.0 * PI..3.0 * PI);
        let l = lobachevsky(theta);
        ok &= (l + lobachevsky(-theta)).abs() < 1e-10;
        ok &= (l - lobachevsky(theta + PI)).abs() < 1e-10;
        ok &= (lobachevsky(2.0 * theta) - 2.0 * (l + lobachevsky(theta + PI / 2.0))).abs() < 1e-10;
        ok &= (l - quad_oracle::value(theta)).abs() < 1e-10;
        if !ok {
            eprintln!("lobachevsky mismatch at theta = {theta}");
            break;
        }
    }
    finish(2, "lobachevsky kernel", t0, Duration::from_secs(10), ok);
}

/// Vertex classes of the coned octahedron in the order N, S, E0, E1, E2, E3.
fn octahedron_vertex_classes(cx: &IdealComplex) -> [usize; 6] {
    [
        cx.vertex_class_of[0][0],
        cx.vertex_class_of[0][1],
        cx.vertex_class_of[0][2],
        cx.vertex_class_of[0][3],
        cx.vertex_class_of[1][3],
        cx.vertex_class_of[2][3],
    ]
}

#[test]
fn c3_regular_solids_reach_reference_volumes_and_shape() {
    let t0 = Instant::now();
    let mut ok = true;

    let o = run(&["solve", &fixture("single-tet.tri")]);
    ok &= o.status.code() == Some(0);
    ok &= (field_f64(&stdout(&o), "volume") - 1.014_941_606_409_653_5).abs() < 1e-9;

    let o = run(&["solve", &fixture("cone-over-octahedron.tri")]);
    ok &= o.status.code() == Some(0);
    ok &= (field_f64(&stdout(&o), "volume") - 3.663_862_376_708_876).abs() < 1e-7;

    // Shear residuals and the developed shape, through the library.
    let cx = fixtures::cone_over_octahedron();
    let target = AngleTarget::uniform_boundary(&cx, PI / 2.0);
    let s = solve_structure(&cx, &target, &SolverOptions::default()).unwrap();
    ok &= s.status == SolveStatus::Converged;
    let asg = s.assignment.unwrap();
    let shear = interior_shear_residuals(&cx, &asg)
        .into_iter()
        .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    ok &= shear < 1e-8;

    // Developed ideal points against the regular octahedron 0, inf, +-1, +-i:
    // send (N, S, E0) to (inf, 0, 1), then compare every ordered 4-tuple by
    // cross-ratio.  E1 may land on i or -i depending on orientation.
    let dev = develop(&cx, &asg).unwrap();
    let classes = octahedron_vertex_classes(&cx);
    let pts: Vec<ProjPoint> = classes
        .iter()
        .map(|&c| dev.vertex_positions[c])
        .collect();
    let z = |re: f64, im: f64| ProjPoint::from_z(Complex64::new(re, im));
    let m = Mobius::between(
        [&pts[0], &pts[1], &pts[2]],
        [&ProjPoint::infinity(), &z(0.0, 0.0), &z(1.0, 0.0)],
    )
    .unwrap();
    let mapped: Vec<ProjPoint> = pts.iter().map(|p| m.apply(p)).collect();
    let e1_up = chordal(&mapped[3], &z(0.0, 1.0)) < 1e-6;
    let sign = if e1_up { 1.0 } else { -1.0 };
    let standard = [
        ProjPoint::infinity(),
        z(0.0, 0.0),
        z(1.0, 0.0),
        z(0.0, sign),
        z(-1.0, 0.0),
        z(0.0, -sign),
    ];
    let mut cr_err = 0.0f64;
    for i in 0..6 {
        for j in i + 1..6 {
            for k in j + 1..6 {
                for l in k + 1..6 {
                    let a = cross_ratio(&mapped[i], &mapped[j], &mapped[k], &mapped[l]);
                    let b = cross_ratio(&standard[i], &standard[j], &standard[k], &standard[l]);
                    cr_err = cr_err.max((a - b).norm());
                }
            }
        }
    }
    ok &= cr_err < 1e-6;

    finish(3, "regular solids", t0, Duration::from_secs(30), ok);
}

#[test]
fn c4_schlafli_differential_matches_lengths() {
    let t0 = Instant::now();
    let o = run(&["schlafli-check", "--samples", "100", "--seed", "271828"]);
    let ok = o.status.code() == Some(0) && field_f64(&stdout(&o), "max_rel_error") < 1e-5;
    finish(4, "schlafli property", t0, Duration::from_secs(30), ok);
}

/// Random triangulated-sphere cone with right-angle boundary targets; the
/// same construction the packing pipeline uses, so targets are feasible.
fn random_coned_complex(rng: &mut ChaCha8Rng) -> (IdealComplex, AngleTarget) {
    loop {
        let n = rng.gen_range(4..=8);
        let mut pts = Vec::with_capacity(n);
        for _ in 0..n {
            pts.push(unit_vec(rng));
        }
        let Ok(cell) = delaunay_on_sphere(&pts) else { continue };
        let Ok(aug) = thurston_augment(&cell) else { continue };
        let Ok(cc) = hypervol::cell::build_cell(aug.cell.clone()) else { continue };
        let dihedral = vec![PI / 2.0; cc.edges.len()];
        let apex = rng.gen_range(0..aug.cell.num_vertices);
        let Ok(coned) = cone_over_cellulation(&aug.cell, &dihedral, apex) else { continue };
        return (coned.complex, coned.target);
    }
}

fn unit_vec(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-2 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Sup-norm of the volume gradient projected on the constraint tangent space.
fn projected_grad_norm(cx: &IdealComplex, asg: &AngleAssignment) -> f64 {
    let gh = volume_grad_hess(asg).unwrap();
    let mut g = vec![0.0; 3 * cx.num_tets()];
    for (t, (gt, _)) in gh.iter().enumerate() {
        g[3 * t..3 * t + 3].copy_from_slice(gt);
    }
    tangent_basis(cx)
        .iter()
        .map(|z| z.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>().abs())
        .fold(0.0, f64::max)
}

fn max_shear(cx: &IdealComplex, asg: &AngleAssignment) -> f64 {
    interior_shear_residuals(cx, asg)
        .into_iter()
        .fold(0.0, |m, (_, v)| m.max(v.abs()))
}

/// Random interior point of the angle polytope: LP start pushed along a
/// random tangent direction, stopping well before the walls.
fn random_start(
    cx: &IdealComplex,
    target: &AngleTarget,
    rng: &mut ChaCha8Rng,
) -> AngleAssignment {
    let (start, _) = feasible_start(cx, target).unwrap();
    let mut x = start.flat();
    let basis = tangent_basis(cx);
    let mut d = vec![0.0; x.len()];
    for z in &basis {
        let c = rng.gen_range(-1.0..1.0);
        for (di, zi) in d.iter_mut().zip(z) {
            *di += c * zi;
        }
    }
    let margin = 0.02;
    let mut s_max = f64::INFINITY;
    for (xi, di) in x.iter().zip(&d) {
        if *di > 1e-14 {
            s_max = s_max.min((PI - margin - xi) / di);
        } else if *di < -1e-14 {
            s_max = s_max.min((margin - xi) / di);
        }
    }
    if s_max.is_finite() && s_max > 0.0 {
        let s = rng.gen_range(0.1..0.8) * s_max;
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += s * di;
        }
    }
    AngleAssignment::from_flat(cx, &x).unwrap()
}

#[test]
fn c5_convergence_iff_critical_and_unique() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let opts = SolverOptions::default();
    let mut ok = true;

    let mut cases: Vec<(IdealComplex, AngleTarget)> = vec![
        (
            fixtures::single_tet(),
            AngleTarget::uniform_boundary(&fixtures::single_tet(), PI / 3.0),
        ),
        (
            fixtures::cone_over_octahedron(),
            AngleTarget::uniform_boundary(&fixtures::cone_over_octahedron(), PI / 2.0),
        ),
    ];
    {
        let cx = fixtures::bipyramid();
        let totals = (0..cx.edge_classes.len())
            .map(|id| {
                let (p, q) = cx.edge_classes[id].endpoints;
                if cx.corner_count(p) == 1 || cx.corner_count(q) == 1 {
                    PI / 3.0
                } else {
                    2.0 * PI / 3.0
                }
            })
            .collect();
        cases.push((cx, AngleTarget::from_totals(totals)));
    }
    while cases.len() < 20 {
        cases.push(random_coned_complex(&mut rng));
    }

    for (idx, (cx, target)) in cases.iter().enumerate() {
        let s = solve_structure(cx, target, &opts).unwrap();
        let critical = match &s.assignment {
            Some(asg) => {
                projected_grad_norm(cx, asg) < 1e-10 && max_shear(cx, asg) < 1e-8
            }
            None => false,
        };
        if (s.status == SolveStatus::Converged) != critical {
            eprintln!(
                "case {idx}: status {:?} but criticality {critical} ({} tets)",
                s.status,
                cx.num_tets()
            );
            ok = false;
            continue;
        }

        // Uniqueness probe: the maximizer is start-independent.
        let reference = s.assignment.as_ref().map(|a| a.flat());
        for _ in 0..20 {
            let start = random_start(cx, target, &mut rng);
            let s2 = solve_structure_from(cx, target, start, &opts).unwrap();
            match (&reference, &s2.assignment) {
                (Some(a), Some(b)) if s2.status == SolveStatus::Converged => {
                    let b = b.flat();
                    let diff = a
                        .iter()
                        .zip(&b)
                        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
                    if diff > 1e-6 {
                        eprintln!("case {idx}: starts disagree by {diff}");
                        ok = false;
                    }
                }
                _ => {
                    eprintln!(
                        "case {idx}: restart ended {:?} after {} iterations, grad {:e} ({} tets)",
                        s2.status,
                        s2.iterations,
                        s2.grad_norm,
                        cx.num_tets()
                    );
                    ok = false;
                }
            }
        }
    }
    finish(5, "critical-point equivalence", t0, Duration::from_secs(300), ok);
}

#[test]
fn c6_koebe_packings_touch_and_normalize() {
    let t0 = Instant::now();
    let mut ok = true;

    // K4: four vertex circles, mutually tangent, congruent after the
    // centered normalization.
    let o = run(&["pack", &fixture("k4.graph")]);
    ok &= o.status.code() == Some(0);
    let out = stdout(&o);
    let circles = parse_circles(&out, "vertex_circles");
    ok &= circles.len() == 4;
    for i in 0..4 {
        for j in i + 1..4 {
            let d = circles[i].inversive(&circles[j]);
            ok &= (d.abs() - 1.0).abs() < 1e-7;
        }
    }
    let radii: Vec<f64> = circles
        .iter()
        .map(|c| c.spherical_cap().unwrap().1)
        .collect();
    for r in &radii {
        ok &= (r - radii[0]).abs() < 1e-6;
    }

    // Octahedron and icosahedron: tangency along every graph edge, and the
    // normalized packing does not depend on the cone apex.
    for (graph, other_apex) in [("octahedron.graph", "5"), ("icosahedron.graph", "7")] {
        let a = run(&["pack", &fixture(graph)]);
        let b = run(&["pack", &fixture(graph), "--apex", other_apex]);
        ok &= a.status.code() == Some(0) && b.status.code() == Some(0);
        let (sa, sb) = (stdout(&a), stdout(&b));
        let circles = parse_circles(&sa, "vertex_circles");
        let edges: Vec<(usize, usize)> = split_top(array_block(&sa, "edges"))
            .iter()
            .map(|el| {
                let inner = el.trim_start_matches('[').trim_end_matches(']');
                let v: Vec<usize> = inner
                    .split(',')
                    .map(|t| t.trim().parse().unwrap())
                    .collect();
                (v[0], v[1])
            })
            .collect();
        for &(u, v) in &edges {
            let d = circles[u].inversive(&circles[v]);
            ok &= (d.abs() - 1.0).abs() < 1e-6;
        }
        let pa = parse_points(&sa, "tangency_points");
        let pb = parse_points(&sb, "tangency_points");
        ok &= pa.len() == pb.len();
        for (p, q) in pa.iter().zip(&pb) {
            ok &= chordal(p, q) < 1e-6;
        }
    }

    finish(6, "koebe packings", t0, Duration::from_secs(120), ok);
}

#[test]
fn c7_boundary_metric_linear_algebra() {
    let t0 = Instant::now();
    let mut ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(77);

    // Shift <-> length round trip on the octahedron complex.
    let cx = fixtures::cone_over_octahedron();
    let e = cx.edge_classes.len();
    for _ in 0..10 {
        let lengths: Vec<f64> = (0..e).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let shifts = lengths_to_shifts(&cx, &lengths).unwrap();
        let back = shifts_to_lengths(&cx, &shifts).unwrap();
        let shifts2 = lengths_to_shifts(&cx, &back).unwrap();
        for (s1, s2) in shifts.iter().zip(&shifts2) {
            ok &= (s1 - s2).abs() < 1e-10;
        }
    }

    // Quad instance 2 delta = l12 - l23 + l34 - l41 around a boundary edge.
    let tet = fixtures::single_tet();
    let by_ends: std::collections::BTreeMap<(usize, usize), usize> = tet
        .edge_classes
        .iter()
        .enumerate()
        .map(|(id, ec)| {
            let (p, q) = ec.endpoints;
            ((p.min(q), p.max(q)), id)
        })
        .collect();
    for class in 0..tet.edge_classes.len() {
        let (a, b, cp, cm) = quad_corners(&tet, class).unwrap();
        let lengths: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let shifts = lengths_to_shifts(&tet, &lengths).unwrap();
        let side = |x: usize, y: usize| lengths[by_ends[&(x.min(y), x.max(y))]];
        let rhs = side(a, cp) - side(cp, b) + side(b, cm) - side(cm, a);
        ok &= (2.0 * shifts[class] - rhs).abs() < 1e-12;
    }

    // Schlafli lengths against developed geometry, modulo horoball moves.
    let target = AngleTarget::uniform_boundary(&cx, PI / 2.0);
    let s = solve_structure(&cx, &target, &SolverOptions::default()).unwrap();
    let asg = s.assignment.unwrap();
    let schlafli = lengths_from_schlafli(&cx, &target, &asg).unwrap();
    let dev = develop(&cx, &asg).unwrap();
    let geometric = geometric_lengths(&cx, &dev).unwrap();
    let c1 = LengthClass::new(&cx, &schlafli).unwrap();
    let c2 = LengthClass::new(&cx, &geometric).unwrap();
    ok &= c1.max_difference(&c2) < 1e-5;

    finish(7, "boundary metric", t0, Duration::from_secs(60), ok);
}

#[test]
fn c8_degenerate_target_names_a_flat_circuit() {
    let t0 = Instant::now();
    let (cx, target, hexagon) = fixtures::degenerate_octahedron_target();
    let s = solve_structure(&cx, &target, &SolverOptions::default()).unwrap();
    let ok = match &s.status {
        SolveStatus::Degenerate(Degeneracy::CircuitCollapse { edges, exterior_sum }) => {
            let mut sorted = edges.clone();
            sorted.sort_unstable();
            sorted == hexagon && (exterior_sum - 2.0 * PI).abs() < 1e-6
        }
        other => {
            eprintln!("unexpected status {other:?}");
            false
        }
    };
    finish(8, "degeneration taxonomy", t0, Duration::from_secs(30), ok);
}

#[test]
fn c9_euler_counts_and_delaunay_oracle() {
    let t0 = Instant::now();
    let mut ok = true;

    // Euler identity on every fixture complex, including the coned medial
    // cellulations behind the packing pipeline.
    let mut complexes: Vec<IdealComplex> = vec![
        fixtures::single_tet(),
        fixtures::bipyramid(),
        fixtures::cone_over_octahedron(),
        fixtures::degenerate_octahedron_target().0,
    ];
    for cell in [
        fixtures::tetrahedron_cell(),
        fixtures::octahedron_cell(),
        fixtures::icosahedron_cell(),
    ] {
        let aug = thurston_augment(&cell).unwrap();
        let cc = hypervol::cell::build_cell(aug.cell.clone()).unwrap();
        let coned =
            cone_over_cellulation(&aug.cell, &vec![PI / 2.0; cc.edges.len()], 0).unwrap();
        complexes.push(coned.complex);
    }
    for cx in &complexes {
        ok &= euler_check(cx).holds;
    }

    // Spherical Delaunay against the brute-force support-plane oracle: no
    // sample point may lie strictly outside any face's circumplane.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for round in 0..100 {
        let n = rng.gen_range(4..=30);
        let pts: Vec<[f64; 3]> = (0..n).map(|_| unit_vec(&mut rng)).collect();
        let cell = match delaunay_on_sphere(&pts) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("round {round}: delaunay failed: {e}");
                ok = false;
                continue;
            }
        };
        for face in &cell.faces {
            let (a, b, c) = (pts[face[0]], pts[face[1]], pts[face[2]]);
            let det = |p: [f64; 3]| {
                let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
                let w = [p[0] - a[0], p[1] - a[1], p[2] - a[2]];
                u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
                    + u[2] * (v[0] * w[1] - v[1] * w[0])
            };
            // Extra corners of a merged (cocircular) face lie on the plane.
            for &extra in &face[3..] {
                ok &= det(pts[extra]).abs() < 1e-9;
            }
            let (mut pos, mut neg) = (0usize, 0usize);
            for (i, p) in pts.iter().enumerate() {
                if face.contains(&i) {
                    continue;
                }
                let d = det(*p);
                if d > 1e-12 {
                    pos += 1;
                } else if d < -1e-12 {
                    neg += 1;
                }
            }
            if pos > 0 && neg > 0 {
                eprintln!("round {round}: face {face:?} has points on both sides");
                ok = false;
            }
        }
    }

    finish(9, "combinatorics", t0, Duration::from_secs(60), ok);
}
