//! Tangent circle packings on the sphere via volume maximization.
//!
//! The pipeline: take a sphere cellulation, pass to its medial cellulation
//! (one vertex per edge, a polygon per original vertex and per original
//! face), cone that over one of its vertices with right dihedral angles
//! everywhere, maximize volume, develop the boundary, and read the circles
//! off the developed medial polygons.  Vertex circles end up mutually
//! tangent along original edges and orthogonal to the face circles.
//!
//! Also here: a convex-hull Delaunay cellulation for points on the sphere,
//! with exact rational orientation predicates behind a floating filter, so
//! packings can be computed from sampled data.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::Zero;

use crate::angles::AngleTarget;
use crate::cell::{build_cell, validate_dihedral_data, Cellulation, DihedralOptions};
use crate::complex::{build_complex, GluingData, IdealComplex, Perm, FACE_ORIENTED};
use crate::error::{Error, Result};
use crate::geom::{
    centering_mobius, develop, lift_to_sphere, rotation_mobius, vertical_rotation_mobius, Circle,
    ProjPoint,
};
use crate::solver::{solve_structure, SolveStatus, SolverOptions};

/// Medial cellulation of a sphere cellulation, with the bookkeeping tying
/// its vertices and faces back to the input.
#[derive(Debug, Clone)]
pub struct Augmented {
    pub cell: Cellulation,
    /// Original edge behind each medial vertex, as a sorted vertex pair.
    pub edge_endpoints: Vec<(usize, usize)>,
    /// Medial face wrapping each original vertex.
    pub vertex_faces: Vec<usize>,
    /// Medial face inscribed in each original face.
    pub face_faces: Vec<usize>,
}

/// Build the medial cellulation: one vertex per edge, connected when two
/// edges are consecutive around a face corner.
pub fn thurston_augment(cell: &Cellulation) -> Result<Augmented> {
    let cc = build_cell(cell.clone())?;
    if !cc.all_spheres() {
        return Err(Error::Topology(
            "medial construction expects sphere components".into(),
        ));
    }

    // Each corner of a face at v pairs the incoming edge with the outgoing
    // one.  The medial polygon around v follows outgoing -> incoming links,
    // which orients it against the inscribed face polygons.
    let mut corner_in: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); cell.num_vertices];
    for cyc in &cell.faces {
        let k = cyc.len();
        for j in 0..k {
            let v = cyc[j];
            let e_in = cc.edge_id(cyc[(j + k - 1) % k], v).unwrap();
            let e_out = cc.edge_id(v, cyc[(j + 1) % k]).unwrap();
            if corner_in[v].insert(e_out, e_in).is_some() {
                return Err(Error::Topology(format!(
                    "edge repeated around vertex {v}; medial polygon is ambiguous"
                )));
            }
        }
    }

    let mut faces = Vec::with_capacity(cell.num_vertices + cell.faces.len());
    let mut vertex_faces = Vec::with_capacity(cell.num_vertices);
    for (v, chain) in corner_in.iter().enumerate() {
        let start = *chain
            .keys()
            .next()
            .ok_or_else(|| Error::Topology(format!("vertex {v} lies on no face")))?;
        let mut cyc = vec![start];
        let mut cur = chain[&start];
        while cur != start {
            cyc.push(cur);
            cur = *chain
                .get(&cur)
                .ok_or_else(|| Error::Internal("corner chain left the vertex star".into()))?;
            if cyc.len() > chain.len() {
                return Err(Error::Internal("corner chain fails to close".into()));
            }
        }
        if cyc.len() != chain.len() {
            return Err(Error::Topology(format!(
                "corners at vertex {v} split into several cycles"
            )));
        }
        vertex_faces.push(faces.len());
        faces.push(cyc);
    }

    let mut face_faces = Vec::with_capacity(cell.faces.len());
    for cyc in &cell.faces {
        let k = cyc.len();
        let med = (0..k)
            .map(|j| cc.edge_id(cyc[j], cyc[(j + 1) % k]).unwrap())
            .collect();
        face_faces.push(faces.len());
        faces.push(med);
    }

    let aug = Cellulation {
        num_vertices: cc.edges.len(),
        faces,
    };
    build_cell(aug.clone())?;
    Ok(Augmented {
        cell: aug,
        edge_endpoints: cc.edges,
        vertex_faces,
        face_faces,
    })
}

/// Ideal triangulation of the cone over a sphere cellulation, apex at one
/// of its vertices, with angle targets carried over from per-edge dihedral
/// angles.  Fan diagonals introduced by triangulating the faces stay flat.
#[derive(Debug, Clone)]
pub struct Coned {
    pub complex: IdealComplex,
    pub target: AngleTarget,
    /// Cellulation vertex of each tet's local vertices; local 0 is the apex.
    pub tet_globals: Vec<[usize; 4]>,
    /// Vertex class realizing each cellulation vertex.
    pub class_of_vertex: Vec<usize>,
    pub apex: usize,
}

/// How a tet edge slot arose; used to assign targets unambiguously even
/// when a fan diagonal happens to share endpoints with a cellulation edge.
#[derive(Clone, Copy, PartialEq, Eq)]
enum SlotKind {
    /// Runs from the apex down to a cellulation vertex.
    Cone,
    /// Lies in the coned face: a cellulation edge or a fan diagonal.
    Surface(Option<usize>),
}

pub fn cone_over_cellulation(cell: &Cellulation, dihedral: &[f64], apex: usize) -> Result<Coned> {
    let cc = build_cell(cell.clone())?;
    if !cc.all_spheres() {
        return Err(Error::Topology("cone expects a sphere cellulation".into()));
    }
    if apex >= cell.num_vertices {
        return Err(Error::Mismatch(format!("apex {apex} out of range")));
    }
    if dihedral.len() != cc.edges.len() {
        return Err(Error::Mismatch(format!(
            "{} dihedral angles for {} edges",
            dihedral.len(),
            cc.edges.len()
        )));
    }
    for cyc in &cell.faces {
        let mut seen = cyc.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != cyc.len() {
            return Err(Error::Topology(
                "cone needs faces with distinct corners".into(),
            ));
        }
    }

    // Fan-triangulate every face missing the apex, rooted at its lowest
    // corner, and cone each triangle.  Local 0 is always the apex.
    let mut tet_globals: Vec<[usize; 4]> = Vec::new();
    let mut slot_kinds: Vec<[SlotKind; 6]> = Vec::new();
    for cyc in &cell.faces {
        if cyc.contains(&apex) {
            continue;
        }
        let k = cyc.len();
        let lo = (0..k).min_by_key(|&j| cyc[j]).unwrap();
        let corner = |j: usize| cyc[(lo + j) % k];
        for j in 1..k - 1 {
            let (a, b, c) = (corner(0), corner(j), corner(j + 1));
            tet_globals.push([apex, a, b, c]);
            let ab = if j == 1 {
                SlotKind::Surface(cc.edge_id(a, b))
            } else {
                SlotKind::Surface(None)
            };
            let ac = if j == k - 2 {
                SlotKind::Surface(cc.edge_id(a, c))
            } else {
                SlotKind::Surface(None)
            };
            let bc = SlotKind::Surface(cc.edge_id(b, c));
            slot_kinds.push([
                SlotKind::Cone,
                SlotKind::Cone,
                SlotKind::Cone,
                ab,
                ac,
                bc,
            ]);
        }
    }
    if tet_globals.is_empty() {
        return Err(Error::Topology("every face contains the apex".into()));
    }

    // Faces 1..3 contain the apex; identical global triples pair up.
    let mut pending: BTreeMap<[usize; 3], Vec<(usize, usize)>> = BTreeMap::new();
    for (t, tg) in tet_globals.iter().enumerate() {
        for f in 1..4 {
            let mut key = [0usize; 3];
            for (i, &l) in FACE_ORIENTED[f].iter().enumerate() {
                key[i] = tg[l];
            }
            key.sort_unstable();
            pending.entry(key).or_default().push((t, f));
        }
    }
    let mut g = GluingData::unglued(tet_globals.len());
    for (key, inc) in &pending {
        match inc[..] {
            [_] => {} // side face of the cone; stays on the boundary
            [(t1, f1), (t2, f2)] => {
                let mut map = [4usize; 4];
                map[f1] = f2;
                for &l1 in &FACE_ORIENTED[f1] {
                    let gv = tet_globals[t1][l1];
                    let l2 = (0..4)
                        .find(|&l| l != f2 && tet_globals[t2][l] == gv)
                        .ok_or_else(|| Error::Internal("cone face globals disagree".into()))?;
                    map[l1] = l2;
                }
                g.glue(t1, f1, t2, Perm::new(map)?)?;
            }
            _ => {
                return Err(Error::Topology(format!(
                    "cone face {key:?} shared by more than two tetrahedra"
                )));
            }
        }
    }
    let complex = build_complex(g)?;

    // Tie vertex classes back to cellulation vertices; the cone must keep
    // them distinct and realize all of them.
    let mut global_of_class = vec![usize::MAX; complex.vertex_classes.len()];
    for (t, tg) in tet_globals.iter().enumerate() {
        for l in 0..4 {
            let c = complex.vertex_class_of[t][l];
            if global_of_class[c] == usize::MAX {
                global_of_class[c] = tg[l];
            } else if global_of_class[c] != tg[l] {
                return Err(Error::Internal("cone identified distinct vertices".into()));
            }
        }
    }
    let mut class_of_vertex = vec![usize::MAX; cell.num_vertices];
    for (c, &gv) in global_of_class.iter().enumerate() {
        if gv == usize::MAX {
            return Err(Error::Internal("vertex class without a global label".into()));
        }
        if class_of_vertex[gv] != usize::MAX {
            return Err(Error::Topology(format!(
                "cellulation vertex {gv} splits into several classes"
            )));
        }
        class_of_vertex[gv] = c;
    }
    if let Some(v) = class_of_vertex.iter().position(|&c| c == usize::MAX) {
        return Err(Error::Topology(format!(
            "vertex {v} lies only on apex faces and drops out of the cone"
        )));
    }

    // Boundary targets per edge class, resolved through the slot kinds:
    // cellulation edges take their dihedral angle, everything flat else.
    let mut boundary = BTreeMap::new();
    for (id, ec) in complex.edge_classes.iter().enumerate() {
        if ec.interior {
            continue;
        }
        let mut surface_edge: Option<Option<usize>> = None;
        let mut all_cone = true;
        for &(t, s) in &ec.slots {
            match slot_kinds[t][s] {
                SlotKind::Cone => {}
                SlotKind::Surface(e) => {
                    all_cone = false;
                    match surface_edge {
                        None => surface_edge = Some(e),
                        Some(prev) if prev == e => {}
                        Some(_) => {
                            return Err(Error::Topology(
                                "fan diagonal coincides with a cellulation edge".into(),
                            ));
                        }
                    }
                }
            }
        }
        let theta = if all_cone {
            // Apex edge: a cellulation edge at the apex, or a flat diagonal
            // across an apex face.
            let (u, v) = ec.endpoints;
            let (gu, gv) = (global_of_class[u], global_of_class[v]);
            match cc.edge_id(gu, gv) {
                Some(e) if gu == apex || gv == apex => dihedral[e],
                _ => PI,
            }
        } else {
            match surface_edge.unwrap() {
                Some(e) => dihedral[e],
                None => PI,
            }
        };
        boundary.insert(id, theta);
    }
    let target = AngleTarget::with_boundary(&complex, &boundary)?;

    Ok(Coned {
        complex,
        target,
        tet_globals,
        class_of_vertex,
        apex,
    })
}

#[derive(Debug, Clone)]
pub struct PackOptions {
    /// Medial vertex to cone from.  The packing itself does not depend on
    /// the choice; it only steers the intermediate triangulation.
    pub apex: usize,
    pub solver: SolverOptions,
}

impl Default for PackOptions {
    fn default() -> Self {
        Self {
            apex: 0,
            solver: SolverOptions::default(),
        }
    }
}

/// A tangent circle packing realizing a cellulation on the sphere, read off
/// a maximal-volume ideal structure.  Circles live on the Riemann sphere as
/// Hermitian forms; `Circle::spherical_cap` converts to caps.
#[derive(Debug, Clone)]
pub struct Packing {
    pub augmented: Augmented,
    /// One circle per original vertex, oriented with its own disk inside.
    pub vertex_circles: Vec<Circle>,
    /// One circle per original face, orthogonal to its vertices' circles.
    pub face_circles: Vec<Circle>,
    /// One point per original edge where the end circles touch; the packing
    /// is normalized so point 0 sits at the origin and point 1 on the
    /// positive real axis (south pole and zero meridian on the sphere).
    pub tangency_points: Vec<ProjPoint>,
    /// Hyperbolic volume of the maximizer behind the packing.
    pub volume: f64,
    /// Worst deviation of a tangency point from its two derived circles.
    pub concyclicity: f64,
    /// Consistency of the developing map that produced the points.
    pub develop_consistency: f64,
}

pub fn koebe_pack(cell: &Cellulation, opts: &PackOptions) -> Result<Packing> {
    let aug = thurston_augment(cell)?;
    let acc = build_cell(aug.cell.clone())?;

    // Right angles everywhere on the medial cellulation; check the
    // existence conditions so bad inputs fail with a named violation
    // instead of a solver breakdown.
    let weights = vec![PI / 2.0; acc.edges.len()];
    let report = validate_dihedral_data(&acc, &weights, &DihedralOptions::default());
    if !report.ok {
        return Err(Error::Topology(format!(
            "medial right-angle data violates the existence conditions: {:?}",
            report.violations.first().unwrap()
        )));
    }
    let dihedral: Vec<f64> = weights.iter().map(|&w| PI - w).collect();

    let coned = cone_over_cellulation(&aug.cell, &dihedral, opts.apex)?;
    let solved = solve_structure(&coned.complex, &coned.target, &opts.solver)?;
    let asg = match (&solved.status, solved.assignment) {
        (SolveStatus::Converged, Some(a)) => a,
        (SolveStatus::Degenerate(d), _) => {
            return Err(Error::DegenerateInput(format!(
                "volume maximizer degenerates: {d:?}"
            )));
        }
        _ => {
            return Err(Error::Internal(format!(
                "maximization stopped after {} iterations at gradient {:.3e}",
                solved.iterations, solved.grad_norm
            )));
        }
    };
    let volume = solved.volume.unwrap();
    let dev = develop(&coned.complex, &asg)?;

    // The medial vertices develop to the tangency points.  Center them so
    // the packing is unique up to rotation, then pin the rotation.
    let raw: Vec<ProjPoint> = (0..aug.cell.num_vertices)
        .map(|m| dev.vertex_positions[coned.class_of_vertex[m]])
        .collect();
    let center = centering_mobius(&raw)?;
    let south = rotation_mobius(
        lift_to_sphere(&center.apply(&raw[0])),
        [0.0, 0.0, -1.0],
    );
    let placed = south.compose(&center);
    let mut spin = 0.0;
    for p in raw.iter().skip(1) {
        let x = lift_to_sphere(&placed.apply(p));
        if x[0].hypot(x[1]) > 1e-9 {
            spin = -x[1].atan2(x[0]);
            break;
        }
    }
    let m = vertical_rotation_mobius(spin).compose(&placed);
    let tangency: Vec<ProjPoint> = raw.iter().map(|p| m.apply(p).normalized()).collect();

    // Circles through the developed medial polygons.  All polygon corners
    // must agree on them; the worst residual is the concyclicity defect.
    let mut concyclicity: f64 = 0.0;
    let mut circle_of_face = |fid: usize| -> Result<Circle> {
        let corners = &aug.cell.faces[fid];
        let circ = Circle::through(
            &tangency[corners[0]],
            &tangency[corners[1]],
            &tangency[corners[2]],
        )?
        .normalized()?;
        for &c in &corners[3..] {
            concyclicity = concyclicity.max(circ.eval(&tangency[c]).abs());
        }
        let outside = (0..aug.cell.num_vertices)
            .find(|v| !corners.contains(v))
            .ok_or_else(|| Error::Topology("medial face touches every vertex".into()))?;
        Ok(circ.oriented_with_inside(&tangency[outside]).flipped())
    };
    let mut vertex_circles = Vec::with_capacity(aug.vertex_faces.len());
    for &fid in &aug.vertex_faces {
        vertex_circles.push(circle_of_face(fid)?);
    }
    let mut face_circles = Vec::with_capacity(aug.face_faces.len());
    for &fid in &aug.face_faces {
        face_circles.push(circle_of_face(fid)?);
    }

    Ok(Packing {
        augmented: aug,
        vertex_circles,
        face_circles,
        tangency_points: tangency,
        volume,
        concyclicity,
        develop_consistency: dev.consistency,
    })
}

/// Sign of the determinant of [b - a, c - a, d - a]: +1 when d sees the
/// triangle (a, b, c) counterclockwise.  Floating filter with an exact
/// rational fallback, so ties are decided correctly.
fn orient3(pts: &[[f64; 3]], a: usize, b: usize, c: usize, d: usize) -> i8 {
    let u = sub(pts[b], pts[a]);
    let v = sub(pts[c], pts[a]);
    let w = sub(pts[d], pts[a]);
    let minor = |i: usize, j: usize| v[i] * w[j] - v[j] * w[i];
    let det = u[0] * minor(1, 2) - u[1] * minor(0, 2) + u[2] * minor(0, 1);
    let mag = |i: usize, j: usize| (v[i] * w[j]).abs() + (v[j] * w[i]).abs();
    let scale = u[0].abs() * mag(1, 2) + u[1].abs() * mag(0, 2) + u[2].abs() * mag(0, 1);
    if det.abs() > 1e-12 * scale {
        return det.signum() as i8;
    }
    orient3_exact(pts, a, b, c, d)
}

fn orient3_exact(pts: &[[f64; 3]], a: usize, b: usize, c: usize, d: usize) -> i8 {
    let row = |i: usize, j: usize| -> [BigRational; 3] {
        std::array::from_fn(|k| {
            BigRational::from_float(pts[i][k]).unwrap() - BigRational::from_float(pts[j][k]).unwrap()
        })
    };
    let u = row(b, a);
    let v = row(c, a);
    let w = row(d, a);
    let minor =
        |i: usize, j: usize| v[i].clone() * w[j].clone() - v[j].clone() * w[i].clone();
    let det =
        u[0].clone() * minor(1, 2) - u[1].clone() * minor(0, 2) + u[2].clone() * minor(0, 1);
    if det.is_zero() {
        0
    } else if det > BigRational::zero() {
        1
    } else {
        -1
    }
}

fn sub(p: [f64; 3], q: [f64; 3]) -> [f64; 3] {
    [p[0] - q[0], p[1] - q[1], p[2] - q[2]]
}

/// True when the four points are within the merging tolerance of a common
/// plane.  Deliberately inexact: cocircular point sets on the sphere land
/// near-coplanar and should merge into one face.
fn nearly_coplanar(pts: &[[f64; 3]], a: usize, b: usize, c: usize, d: usize) -> bool {
    let u = sub(pts[b], pts[a]);
    let v = sub(pts[c], pts[a]);
    let w = sub(pts[d], pts[a]);
    let det = u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
        + u[2] * (v[0] * w[1] - v[1] * w[0]);
    let n = |x: [f64; 3]| (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    det.abs() <= 1e-10 * n(u).max(n(v)).max(n(w)).max(1e-30).powi(3)
}

#[derive(Clone, Copy)]
struct Facet {
    v: [usize; 3],
    alive: bool,
}

/// Delaunay cellulation of points on the unit sphere: the boundary of
/// their convex hull, with coplanar (cocircular) facet groups merged into
/// polygonal faces.  Points must be pairwise distinct and in convex
/// position; at least four, not all coplanar.
pub fn delaunay_on_sphere(points: &[[f64; 3]]) -> Result<Cellulation> {
    let n = points.len();
    if n < 4 {
        return Err(Error::DegenerateInput(format!(
            "need at least 4 points, got {n}"
        )));
    }
    for (i, p) in points.iter().enumerate() {
        if !p.iter().all(|x| x.is_finite()) {
            return Err(Error::DegenerateInput(format!("point {i} is not finite")));
        }
        for (j, q) in points.iter().enumerate().skip(i + 1) {
            let d = sub(*p, *q);
            if d[0].abs().max(d[1].abs()).max(d[2].abs()) < 1e-12 {
                return Err(Error::DegenerateInput(format!(
                    "points {i} and {j} coincide"
                )));
            }
        }
    }

    // Initial simplex: 0, 1, a non-collinear point, a non-coplanar point.
    let c = (2..n)
        .find(|&i| {
            (0..n).any(|j| orient3_span(points, 0, 1, i, j))
        })
        .ok_or_else(|| Error::DegenerateInput("all points collinear".into()))?;
    let d = (2..n)
        .filter(|&i| i != c)
        .find(|&i| orient3(points, 0, 1, c, i) != 0)
        .ok_or_else(|| Error::DegenerateInput("all points coplanar".into()))?;
    let (mut t2, t3) = (c, d);
    let mut t1 = 1;
    if orient3(points, 0, t1, t2, t3) < 0 {
        std::mem::swap(&mut t1, &mut t2);
    }
    let mut facets = vec![
        Facet { v: [0, t2, t1], alive: true },
        Facet { v: [0, t1, t3], alive: true },
        Facet { v: [t1, t2, t3], alive: true },
        Facet { v: [0, t3, t2], alive: true },
    ];

    let seed = [0, t1, t2, t3];
    for p in (1..n).filter(|i| !seed.contains(i)) {
        // A facet is visible when p lies on or beyond its plane; growing
        // past coplanar facets keeps on-face points in the triangulation.
        let visible: Vec<usize> = (0..facets.len())
            .filter(|&f| facets[f].alive && orient3(points, facets[f].v[0], facets[f].v[1], facets[f].v[2], p) >= 0)
            .collect();
        if visible.is_empty() {
            return Err(Error::DegenerateInput(format!(
                "point {p} lies inside the hull; input is not in convex position"
            )));
        }
        let mut owner: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (f, facet) in facets.iter().enumerate() {
            if facet.alive {
                for k in 0..3 {
                    owner.insert((facet.v[k], facet.v[(k + 1) % 3]), f);
                }
            }
        }
        let vis = |f: usize| visible.binary_search(&f).is_ok();
        let mut horizon = Vec::new();
        for &f in &visible {
            for k in 0..3 {
                let e = (facets[f].v[k], facets[f].v[(k + 1) % 3]);
                let backer = owner[&(e.1, e.0)];
                if !vis(backer) {
                    horizon.push(e);
                }
            }
        }
        for &f in &visible {
            facets[f].alive = false;
        }
        for (x, y) in horizon {
            facets.push(Facet { v: [x, y, p], alive: true });
        }
    }

    let hull: Vec<[usize; 3]> = facets.iter().filter(|f| f.alive).map(|f| f.v).collect();

    // Merge runs of near-coplanar facets into single faces.
    let mut owner: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (f, tri) in hull.iter().enumerate() {
        for k in 0..3 {
            owner.insert((tri[k], tri[(k + 1) % 3]), f);
        }
    }
    let mut region = vec![usize::MAX; hull.len()];
    let mut n_regions = 0;
    for f0 in 0..hull.len() {
        if region[f0] != usize::MAX {
            continue;
        }
        let id = n_regions;
        n_regions += 1;
        let mut stack = vec![f0];
        region[f0] = id;
        while let Some(f) = stack.pop() {
            for k in 0..3 {
                let (x, y) = (hull[f][k], hull[f][(k + 1) % 3]);
                let g = owner[&(y, x)];
                if region[g] != usize::MAX {
                    continue;
                }
                let apex = *hull[g].iter().find(|v| !hull[f].contains(v)).unwrap();
                if nearly_coplanar(points, hull[f][0], hull[f][1], hull[f][2], apex) {
                    region[g] = id;
                    stack.push(g);
                }
            }
        }
    }

    let mut faces = Vec::with_capacity(n_regions);
    for id in 0..n_regions {
        let members: Vec<usize> = (0..hull.len()).filter(|&f| region[f] == id).collect();
        // Boundary of the region: edges whose twin lies in another region.
        let mut next = BTreeMap::new();
        for &f in &members {
            for k in 0..3 {
                let (x, y) = (hull[f][k], hull[f][(k + 1) % 3]);
                if region[owner[&(y, x)]] != id && next.insert(x, y).is_some() {
                    return Err(Error::DegenerateInput(
                        "merged face is pinched; perturb the input".into(),
                    ));
                }
            }
        }
        let start = *next.keys().next().unwrap();
        let mut cyc = vec![start];
        let mut cur = next[&start];
        while cur != start {
            cyc.push(cur);
            cur = next[&cur];
            if cyc.len() > next.len() {
                return Err(Error::Internal("face boundary fails to close".into()));
            }
        }
        if cyc.len() != next.len() {
            return Err(Error::DegenerateInput(
                "merged face boundary splits into several cycles".into(),
            ));
        }
        faces.push(cyc);
    }

    // Canonical form: lowest corner first in each face, faces sorted.
    for cyc in &mut faces {
        let lo = (0..cyc.len()).min_by_key(|&j| cyc[j]).unwrap();
        cyc.rotate_left(lo);
    }
    faces.sort();

    let cell = Cellulation {
        num_vertices: n,
        faces,
    };
    let cc = build_cell(cell.clone())?;
    if !cc.all_spheres() {
        return Err(Error::Internal("hull boundary is not a sphere".into()));
    }
    let mut used = vec![false; n];
    for cyc in &cell.faces {
        for &v in cyc {
            used[v] = true;
        }
    }
    if let Some(v) = used.iter().position(|&u| !u) {
        return Err(Error::DegenerateInput(format!(
            "point {v} vanished inside a merged face"
        )));
    }
    Ok(cell)
}

/// True when j does not lie on the line through a, b, i never holds for
/// degenerate i; used only to pick a spanning triple, correctness rests on
/// the exact orientation test afterwards.
fn orient3_span(pts: &[[f64; 3]], a: usize, b: usize, i: usize, j: usize) -> bool {
    orient3(pts, a, b, i, j) != 0
}

/// Plane snapshot of a packing, deterministic down to the byte.  Vertex
/// circles are drawn solid, face circles dashed, tangency points as dots.
/// Circles through or around the point at infinity are left out.
pub fn emit_svg(packing: &Packing) -> String {
    let mut kept: Vec<(char, usize, f64, f64, f64)> = Vec::new();
    let mut skipped = 0usize;
    for (kind, list) in [('v', &packing.vertex_circles), ('f', &packing.face_circles)] {
        for (i, c) in list.iter().enumerate() {
            match c.center_radius() {
                Some((z, r)) if r <= 100.0 => kept.push((kind, i, z.re, z.im, r)),
                _ => skipped += 1,
            }
        }
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    let mut grow = |x: f64, y: f64, r: f64| {
        lo[0] = lo[0].min(x - r);
        lo[1] = lo[1].min(y - r);
        hi[0] = hi[0].max(x + r);
        hi[1] = hi[1].max(y + r);
    };
    for &(_, _, x, y, r) in &kept {
        grow(x, y, r);
    }
    for p in &packing.tangency_points {
        if let Some(z) = p.to_z() {
            grow(z.re, z.im, 0.0);
        }
    }
    if !lo[0].is_finite() {
        lo = [-1.0; 2];
        hi = [1.0; 2];
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-6);
    let pad = 0.05 * span;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\">",
        lo[0] - pad,
        lo[1] - pad,
        span + 2.0 * pad,
        span + 2.0 * pad
    );
    let _ = writeln!(s, "<!-- {} circles omitted (unbounded) -->", skipped);
    for &(kind, i, x, y, r) in &kept {
        let style = match kind {
            'v' => "fill=\"none\" stroke=\"#000000\" stroke-width=\"0.01\"",
            _ => "fill=\"none\" stroke=\"#888888\" stroke-width=\"0.01\" stroke-dasharray=\"0.03,0.03\"",
        };
        let _ = writeln!(
            s,
            "<circle class=\"{kind}{i}\" cx=\"{x:.6}\" cy=\"{y:.6}\" r=\"{r:.6}\" {style}/>"
        );
    }
    let dot = 0.004 * span;
    for (i, p) in packing.tangency_points.iter().enumerate() {
        if let Some(z) = p.to_z() {
            let _ = writeln!(
                s,
                "<circle class=\"t{i}\" cx=\"{:.6}\" cy=\"{:.6}\" r=\"{dot:.6}\" fill=\"#cc0000\"/>",
                z.re, z.im
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
