//! Command-line frontend: validate triangulation files, solve for hyperbolic
//! structures, compute circle packings, and run self-checks.
//!
//! Exit codes: 0 success, 1 domain failure (invalid complex, infeasible or
//! degenerate targets, non-sphere packing input), 2 parse or usage failure.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hypervol_cli::dump::Val;
use hypervol_cli::formats::{self, GraphFile, TriFile};
use hypervol::angles::{edge_angle_totals, AngleAssignment, AngleTarget};
use hypervol::boundary::{boundary_shifts, lengths_from_schlafli};
use hypervol::cell::{build_cell, validate_dihedral_data, DihedralOptions};
use hypervol::complex::{build_complex, euler_check, IdealComplex, EDGE_LABEL};
use hypervol::geom::develop;
use hypervol::loba::{tet_volume, TetAngles};
use hypervol::packing::{emit_svg, koebe_pack, PackOptions};
use hypervol::solver::{
    interior_shear_residuals, solve_structure, Degeneracy, SolveStatus, SolvedStructure,
    SolverOptions,
};
use hypervol::teich::{pentagon_holonomy, Angle};

#[derive(Parser)]
#[command(name = "hypervol", version, about = "Ideal hyperbolic structures and circle packings")]
struct Cli {
    /// Worker threads for parallel paths (default: HYPERVOL_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a triangulation file: gluing, Euler counts, targets, dihedral circuits.
    Validate {
        file: PathBuf,
        /// Length cap for the dual circuit scan.
        #[arg(long, default_value_t = 12)]
        max_circuit_len: usize,
    },
    /// Maximize volume under the file's angle targets and dump the structure.
    Solve {
        file: PathBuf,
        /// Sup-norm threshold on the reduced gradient.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        /// Include the per-iteration trace in the dump.
        #[arg(long)]
        dump_iterates: bool,
    },
    /// Compute the tangency circle packing of a sphere cellulation.
    Pack {
        file: PathBuf,
        /// Medial vertex to cone from; the packing does not depend on it.
        #[arg(long, default_value_t = 0)]
        apex: usize,
        /// Also write an SVG rendering here.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
    },
    /// Print the exact pentagon diagonal-flip holonomy matrix.
    Holonomy,
    /// Compare numeric volume differentials against the length pairing on
    /// random ideal tetrahedra.
    SchlafliCheck {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 271828)]
        seed: u64,
        /// Central finite-difference step.
        #[arg(long, default_value_t = 1e-5)]
        step: f64,
    },
}

/// Failure with a process exit code: 1 domain, 2 parse.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn domain(msg: impl Into<String>) -> Self {
        Self { code: 1, msg: msg.into() }
    }
    fn parse(msg: impl Into<String>) -> Self {
        Self { code: 2, msg: msg.into() }
    }
}

impl From<formats::ParseError> for Failure {
    fn from(e: formats::ParseError) -> Self {
        Failure::parse(e.to_string())
    }
}

impl From<hypervol::Error> for Failure {
    fn from(e: hypervol::Error) -> Self {
        Failure::domain(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads(cli.threads);
    let res = match cli.cmd {
        Cmd::Validate { file, max_circuit_len } => cmd_validate(&file, max_circuit_len),
        Cmd::Solve { file, tol, max_iters, dump_iterates } => {
            cmd_solve(&file, tol, max_iters, dump_iterates)
        }
        Cmd::Pack { file, apex, svg, tol, max_iters } => {
            cmd_pack(&file, apex, svg.as_deref(), tol, max_iters)
        }
        Cmd::Holonomy => cmd_holonomy(),
        Cmd::SchlafliCheck { samples, seed, step } => cmd_schlafli_check(samples, seed, step),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn init_threads(flag: Option<usize>) {
    let n = flag.or_else(|| {
        std::env::var("HYPERVOL_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    let Some(n) = n else { return };
    #[cfg(feature = "parallel")]
    if let Err(e) = hypervol::set_threads(n.max(1)) {
        eprintln!("note: thread pool already running, --threads ignored ({e})");
    }
    #[cfg(not(feature = "parallel"))]
    eprintln!("note: built without the parallel feature, --threads {n} ignored");
}

fn read(path: &std::path::Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::parse(format!("cannot read {}: {e}", path.display())))
}

fn load_tri(path: &std::path::Path) -> Result<(TriFile, IdealComplex), Failure> {
    let tri = formats::parse_tri(&read(path)?)
        .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let cx = build_complex(tri.gluing.clone())?;
    Ok((tri, cx))
}

/// The boundary surface as a cellulation on boundary vertex classes, plus the
/// complex edge class behind each cellulation edge.  None when some pair of
/// vertex classes is joined by more than one boundary edge class; such a
/// surface has no simple polygonal model and the circuit scan is skipped.
fn boundary_cellulation(
    cx: &IdealComplex,
) -> Option<(hypervol::cell::CellComplex, Vec<usize>)> {
    if cx.boundary_faces.is_empty() {
        return None;
    }
    let mut verts: Vec<usize> = cx
        .boundary_faces
        .iter()
        .flat_map(|bf| bf.corners.iter().map(|&c| cx.vertex_class_of[bf.tet][c]))
        .collect();
    verts.sort_unstable();
    verts.dedup();
    let index_of = |v: usize| verts.binary_search(&v).unwrap();

    let mut class_of_pair: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut faces = Vec::with_capacity(cx.boundary_faces.len());
    for bf in &cx.boundary_faces {
        let vc: Vec<usize> = bf
            .corners
            .iter()
            .map(|&c| index_of(cx.vertex_class_of[bf.tet][c]))
            .collect();
        for k in 0..3 {
            let (a, b) = (vc[k], vc[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            let cls = bf.side_classes[k];
            if *class_of_pair.entry(key).or_insert(cls) != cls {
                return None;
            }
        }
        faces.push(vc);
    }
    let cc = build_cell(hypervol::cell::Cellulation {
        num_vertices: verts.len(),
        faces,
    })
    .ok()?;
    let classes: Vec<usize> = cc
        .edges
        .iter()
        .map(|&(a, b)| class_of_pair[&(a, b)])
        .collect();
    Some((cc, classes))
}

fn cmd_validate(path: &PathBuf, max_circuit_len: usize) -> Result<(), Failure> {
    let (tri, cx) = load_tri(path)?;
    println!("parse: ok ({} tets)", cx.num_tets());

    let euler = euler_check(&cx);
    println!(
        "counts: tets {} interior-edges {} boundary-edges {} vertices {}",
        euler.tets, euler.interior_edges, euler.boundary_edges, euler.vertices
    );
    if !euler.holds {
        return Err(Failure::domain(
            "Euler count violated: not an ideal triangulation of a compact domain".to_string(),
        ));
    }
    println!(
        "boundary: components {} euler {:?}{}",
        cx.component_euler.len(),
        cx.component_euler,
        if cx.boundary_is_sphere() { " (sphere)" } else { "" }
    );

    let target = tri.resolve_target(&cx)?;
    let Some(target) = target else {
        println!("targets: none");
        println!("validate: PASS");
        return Ok(());
    };
    let warnings = target.validate(&cx)?;
    println!("targets: ok ({} warnings)", warnings.len());
    for w in &warnings {
        println!("  warning: {w}");
    }

    match boundary_cellulation(&cx) {
        None => println!("circuits: skipped (no polygonal boundary model)"),
        Some((cc, classes)) => {
            let theta: Vec<f64> = classes.iter().map(|&c| PI - target.totals[c]).collect();
            let opts = DihedralOptions {
                max_len: max_circuit_len,
                declared: tri.circuits.clone(),
                ..Default::default()
            };
            let report = validate_dihedral_data(&cc, &theta, &opts);
            println!(
                "circuits: elementary {} nonelementary {} min-slack {} complete {}",
                report.elementary_count,
                report.nonelementary_count,
                report
                    .min_slack
                    .map_or("n/a".to_string(), formats::float),
                report.complete
            );
            if !report.ok {
                for v in &report.violations {
                    println!("  violation: {v:?}");
                }
                return Err(Failure::domain(format!(
                    "{} dihedral circuit violations",
                    report.violations.len()
                )));
            }
        }
    }

    println!("validate: PASS");
    Ok(())
}

fn degeneracy_val(d: &Degeneracy) -> Val {
    match d {
        Degeneracy::CircuitCollapse { edges, exterior_sum } => Val::Obj(vec![
            ("kind", Val::Str("circuit-collapse".into())),
            ("edges", Val::uints(edges.iter().copied())),
            ("exterior_sum", Val::Float(*exterior_sum)),
        ]),
        Degeneracy::BoundaryCollapse { edge, total } => Val::Obj(vec![
            ("kind", Val::Str("boundary-collapse".into())),
            ("edge", Val::Uint(*edge)),
            ("total", Val::Float(*total)),
        ]),
        Degeneracy::AngleCollapse { tet, label, value } => Val::Obj(vec![
            ("kind", Val::Str("angle-collapse".into())),
            ("tet", Val::Uint(*tet)),
            ("label", Val::Uint(*label)),
            ("value", Val::Float(*value)),
        ]),
    }
}

fn solve_dump(
    cx: &IdealComplex,
    target: &AngleTarget,
    s: &SolvedStructure,
    dump_iterates: bool,
) -> Val {
    let status = match &s.status {
        SolveStatus::Converged => "converged",
        SolveStatus::Degenerate(_) => "degenerate",
        SolveStatus::IterLimit => "iteration-limit",
    };
    let mut fields = vec![
        ("status", Val::Str(status.into())),
        ("iterations", Val::Uint(s.iterations)),
        (
            "grad_norm",
            if s.grad_norm.is_finite() {
                Val::Float(s.grad_norm)
            } else {
                Val::Null
            },
        ),
        ("volume", s.volume.map_or(Val::Null, Val::Float)),
        (
            "degeneracy",
            match &s.status {
                SolveStatus::Degenerate(d) => degeneracy_val(d),
                _ => Val::Null,
            },
        ),
        (
            "warnings",
            Val::Arr(s.warnings.iter().map(|w| Val::Str(w.clone())).collect()),
        ),
    ];

    if let Some(asg) = &s.assignment {
        fields.push((
            "angles",
            Val::Arr(
                asg.tets()
                    .iter()
                    .map(|t| Val::floats(t.as_array()))
                    .collect(),
            ),
        ));
        let totals = edge_angle_totals(cx, asg);
        let residual = totals
            .iter()
            .zip(&target.totals)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        fields.push(("edge_totals", Val::floats(totals)));
        fields.push(("target_residual", Val::Float(residual)));
        fields.push((
            "interior_shear",
            Val::Arr(
                interior_shear_residuals(cx, asg)
                    .into_iter()
                    .map(|(id, v)| Val::Arr(vec![Val::Uint(id), Val::Float(v)]))
                    .collect(),
            ),
        ));
        match lengths_from_schlafli(cx, target, asg) {
            Ok(lengths) => fields.push(("lengths", Val::floats(lengths))),
            Err(_) => fields.push(("lengths", Val::Null)),
        }
        match develop(cx, asg) {
            Ok(dev) => {
                fields.push(("develop_consistency", Val::Float(dev.consistency)));
                fields.push((
                    "vertices",
                    Val::Arr(dev.vertex_positions.iter().map(Val::point).collect()),
                ));
                match boundary_shifts(cx, &dev) {
                    Ok(sh) => fields.push(("boundary_shifts", Val::floats(sh))),
                    Err(_) => fields.push(("boundary_shifts", Val::Null)),
                }
            }
            Err(_) => {
                fields.push(("develop_consistency", Val::Null));
                fields.push(("vertices", Val::Null));
                fields.push(("boundary_shifts", Val::Null));
            }
        }
    } else {
        for k in [
            "angles",
            "edge_totals",
            "target_residual",
            "interior_shear",
            "lengths",
            "develop_consistency",
            "vertices",
            "boundary_shifts",
        ] {
            fields.push((k, Val::Null));
        }
    }

    if dump_iterates {
        fields.push((
            "trace",
            Val::Arr(
                s.trace
                    .iter()
                    .map(|t| {
                        Val::Obj(vec![
                            ("iteration", Val::Uint(t.iteration)),
                            ("volume", Val::Float(t.volume)),
                            ("grad_norm", Val::Float(t.grad_norm)),
                            ("step", Val::Float(t.step)),
                        ])
                    })
                    .collect(),
            ),
        ));
    }

    Val::Obj(fields)
}

fn cmd_solve(path: &PathBuf, tol: f64, max_iters: usize, dump_iterates: bool) -> Result<(), Failure> {
    let (tri, cx) = load_tri(path)?;
    let target = tri
        .resolve_target(&cx)?
        .ok_or_else(|| Failure::domain("file has no target section; nothing to solve"))?;
    let opts = SolverOptions {
        grad_tol: tol,
        max_iters,
        trace: dump_iterates,
        ..Default::default()
    };
    match solve_structure(&cx, &target, &opts) {
        Ok(s) => {
            print!("{}", solve_dump(&cx, &target, &s, dump_iterates).render());
            match s.status {
                SolveStatus::Converged => Ok(()),
                SolveStatus::Degenerate(_) => {
                    Err(Failure::domain("target is degenerate; no interior maximizer"))
                }
                SolveStatus::IterLimit => Err(Failure::domain(format!(
                    "no convergence in {max_iters} iterations (grad norm {:e})",
                    s.grad_norm
                ))),
            }
        }
        Err(hypervol::Error::Infeasible { reason, certificate }) => {
            let v = Val::Obj(vec![
                ("status", Val::Str("infeasible".into())),
                ("reason", Val::Str(reason.clone())),
                (
                    "certificate",
                    Val::Arr(
                        certificate
                            .iter()
                            .map(|(label, x)| {
                                Val::Arr(vec![Val::Str(label.clone()), Val::Float(*x)])
                            })
                            .collect(),
                    ),
                ),
            ]);
            print!("{}", v.render());
            Err(Failure::domain(format!("infeasible targets: {reason}")))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_pack(
    path: &PathBuf,
    apex: usize,
    svg: Option<&std::path::Path>,
    tol: f64,
    max_iters: usize,
) -> Result<(), Failure> {
    let g: GraphFile = formats::parse_graph(&read(path)?)
        .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let opts = PackOptions {
        apex,
        solver: SolverOptions {
            grad_tol: tol,
            max_iters,
            ..Default::default()
        },
    };
    let p = koebe_pack(&g.cell, &opts)?;
    let v = Val::Obj(vec![
        (
            "circles",
            Val::Uint(p.vertex_circles.len() + p.face_circles.len()),
        ),
        ("volume", Val::Float(p.volume)),
        ("concyclicity", Val::Float(p.concyclicity)),
        ("develop_consistency", Val::Float(p.develop_consistency)),
        (
            "vertex_circles",
            Val::Arr(p.vertex_circles.iter().map(Val::circle).collect()),
        ),
        (
            "face_circles",
            Val::Arr(p.face_circles.iter().map(Val::circle).collect()),
        ),
        (
            "tangency_points",
            Val::Arr(p.tangency_points.iter().map(Val::point).collect()),
        ),
        (
            "edges",
            Val::Arr(
                p.augmented
                    .edge_endpoints
                    .iter()
                    .map(|&(a, b)| Val::uints([a, b]))
                    .collect(),
            ),
        ),
    ]);
    print!("{}", v.render());
    if let Some(out) = svg {
        std::fs::write(out, emit_svg(&p))
            .map_err(|e| Failure::domain(format!("cannot write {}: {e}", out.display())))?;
    }
    Ok(())
}

/// Entry as "n/32"; the matrix is known to have denominator dividing 32.
fn over_32(x: &Angle) -> String {
    let scale = BigInt::from(32);
    assert!((&scale % x.denom()).is_zero(), "denominator does not divide 32");
    let num = x.numer() * (&scale / x.denom());
    format!("{num}/32")
}

fn cmd_holonomy() -> Result<(), Failure> {
    let m = pentagon_holonomy();
    let det: Angle = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    println!("doubled pentagon, flip cycle (0,3) (0,2) (2,4) (1,4) (1,3)");
    println!("holonomy on the diagonal chart (d02, d03):");
    println!("  [ {}  {} ]", over_32(&m[0][0]), over_32(&m[0][1]));
    println!("  [ {}  {} ]", over_32(&m[1][0]), over_32(&m[1][1]));
    println!(
        "entries: {}, {}, {}, {}",
        over_32(&m[0][0]),
        over_32(&m[0][1]),
        over_32(&m[1][0]),
        over_32(&m[1][1])
    );
    let det_str = if det.denom() == &BigInt::from(1) {
        det.numer().to_string()
    } else {
        format!("{}/{}", det.numer(), det.denom())
    };
    println!("det = {det_str}");
    if !det.is_one() {
        return Err(Failure::domain("holonomy determinant is not 1"));
    }
    Ok(())
}

fn cmd_schlafli_check(samples: usize, seed: u64, step: f64) -> Result<(), Failure> {
    if !(step.is_finite() && step > 0.0 && step < 0.1) {
        return Err(Failure::parse(format!("step {step} outside (0, 0.1)")));
    }
    let cx = hypervol::fixtures::single_tet();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_rel: Option<(usize, f64)> = None;

    for i in 0..samples {
        let a = rng.gen_range(0.15..PI - 0.3);
        let b = rng.gen_range(0.15..PI - a - 0.15);
        let angles = [a, b, PI - a - b];
        let asg = AngleAssignment::new(&cx, vec![TetAngles::new(a, b, angles[2])?])?;
        let target = AngleTarget::from_totals(edge_angle_totals(&cx, &asg));
        let lengths = lengths_from_schlafli(&cx, &target, &asg)?;

        // Admissible direction with a non-negligible predicted differential;
        // keeps the relative error well defined.
        let (delta, predicted) = loop {
            let da: f64 = rng.gen_range(-1.0..1.0);
            let db: f64 = rng.gen_range(-1.0..1.0);
            let d = [da, db, -da - db];
            let mut pred = 0.0;
            for (id, ec) in cx.edge_classes.iter().enumerate() {
                let (_, slot) = ec.slots[0];
                pred += lengths[id] * d[EDGE_LABEL[slot]];
            }
            pred *= -0.5;
            if pred.abs() >= 1e-2 {
                break (d, pred);
            }
        };

        let vol = |s: f64| -> Result<f64, Failure> {
            let t = TetAngles::new(
                angles[0] + s * delta[0],
                angles[1] + s * delta[1],
                angles[2] + s * delta[2],
            )?;
            Ok(tet_volume(&t))
        };
        let numeric = (vol(step)? - vol(-step)?) / (2.0 * step);
        let rel = (numeric - predicted).abs() / predicted.abs();
        if max_rel.map_or(true, |(_, m)| rel > m) {
            max_rel = Some((i, rel));
        }
    }

    let v = Val::Obj(vec![
        ("samples", Val::Uint(samples)),
        ("seed", Val::Uint(seed as usize)),
        ("step", Val::Float(step)),
        (
            "max_rel_error",
            max_rel.map_or(Val::Null, |(_, m)| Val::Float(m)),
        ),
        (
            "worst_sample",
            max_rel.map_or(Val::Null, |(i, _)| Val::Uint(i)),
        ),
    ]);
    print!("{}", v.render());
    Ok(())
}
