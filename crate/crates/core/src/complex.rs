//! Gluing data for ideal triangulations and the derived combinatorics.
//!
//! A complex is a list of tetrahedra with face gluings.  Local conventions,
//! used everywhere downstream:
//!
//! - vertices of a tetrahedron are 0..4, faces are indexed by the opposite
//!   vertex, and edge slots 0..6 enumerate vertex pairs lexicographically:
//!   01, 02, 03, 12, 13, 23;
//! - opposite edge slots (01/23, 02/13, 03/12) carry the same dihedral angle,
//!   giving the label map [`EDGE_LABEL`];
//! - every tetrahedron is positively oriented, so face gluings must be odd
//!   permutations of the vertex labels (orientation-reversing on the face).
//!
//! [`build_complex`] validates the gluing data, traces edge and vertex
//! orbits, checks that vertex links are disks, and assembles the boundary
//! cellulation with its dual graph.  [`enumerate_circuits`] lists closed
//! paths in that dual graph, the objects the dihedral-angle existence
//! conditions quantify over.

use crate::error::{Error, Result};
use std::collections::BTreeSet;

/// Vertex pairs of the six edge slots, lexicographic.
pub const EDGE_ENDS: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

/// Angle label (0, 1, 2) carried by each edge slot; opposite slots share one.
pub const EDGE_LABEL: [usize; 6] = [0, 1, 2, 2, 1, 0];

/// Oriented vertex triples of the four faces, inducing the boundary
/// orientation of a positively oriented tetrahedron.
pub const FACE_ORIENTED: [[usize; 3]; 4] = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]];

/// Edge slot of the vertex pair {i, j}.
pub fn edge_index(i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    match (a, b) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => panic!("bad edge pair ({i}, {j})"),
    }
}

/// Permutation of the four vertex labels of a tetrahedron.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Perm([u8; 4]);

impl Perm {
    pub fn new(map: [usize; 4]) -> Result<Self> {
        let mut seen = [false; 4];
        for &v in &map {
            if v > 3 || seen[v] {
                return Err(Error::Mismatch(format!("not a permutation: {map:?}")));
            }
            seen[v] = true;
        }
        Ok(Self([map[0] as u8, map[1] as u8, map[2] as u8, map[3] as u8]))
    }

    pub fn apply(&self, v: usize) -> usize {
        self.0[v] as usize
    }

    pub fn inverse(&self) -> Self {
        let mut inv = [0u8; 4];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        Self(inv)
    }

    /// True for odd permutations (the orientation-compatible gluings).
    pub fn is_odd(&self) -> bool {
        let mut inversions = 0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        inversions % 2 == 1
    }

    pub fn as_array(&self) -> [usize; 4] {
        [
            self.0[0] as usize,
            self.0[1] as usize,
            self.0[2] as usize,
            self.0[3] as usize,
        ]
    }
}

/// State of one face of one tetrahedron.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceGluing {
    Boundary,
    Glued { tet: usize, face: usize, perm: Perm },
}

/// Raw input: tetrahedra and face identifications.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluingData {
    pub num_tets: usize,
    pub faces: Vec<[FaceGluing; 4]>,
}

impl GluingData {
    /// All faces boundary.
    pub fn unglued(num_tets: usize) -> Self {
        Self {
            num_tets,
            faces: vec![[FaceGluing::Boundary; 4]; num_tets],
        }
    }

    /// Install a gluing (t, f) <-> (t2, perm(f)) and its inverse.
    pub fn glue(&mut self, t: usize, f: usize, t2: usize, perm: Perm) -> Result<()> {
        if t >= self.num_tets || t2 >= self.num_tets {
            return Err(Error::Mismatch(format!(
                "tet index out of range: {t} or {t2}"
            )));
        }
        let f2 = perm.apply(f);
        self.faces[t][f] = FaceGluing::Glued { tet: t2, face: f2, perm };
        self.faces[t2][f2] = FaceGluing::Glued {
            tet: t,
            face: f,
            perm: perm.inverse(),
        };
        Ok(())
    }
}

/// Side incidences of a boundary edge class on the boundary surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundarySides {
    /// (boundary face id, side position): side runs along the class direction.
    pub positive: (usize, usize),
    /// (boundary face id, side position): side runs against it.
    pub negative: (usize, usize),
}

/// One edge class: the fan of (tet, edge slot) incidences around it.
#[derive(Debug, Clone)]
pub struct EdgeClass {
    /// (tet, edge slot) in fan order; cyclic for interior classes, linear
    /// from one boundary face to the other for boundary classes.  A slot
    /// appears at most once per class (wilder identifications are rejected).
    pub slots: Vec<(usize, usize)>,
    /// Directed local vertex pair per slot, consistently oriented along the
    /// class.
    pub directions: Vec<(usize, usize)>,
    pub interior: bool,
    /// Vertex classes of (tail, head) of the chosen direction.
    pub endpoints: (usize, usize),
    /// Boundary classes: their two sides on the boundary surface.
    pub sides: Option<BoundarySides>,
}

impl EdgeClass {
    /// Boundary face ids of the two sides (positive, negative).
    pub fn side_faces(&self) -> Option<(usize, usize)> {
        self.sides.map(|s| (s.positive.0, s.negative.0))
    }

    /// Direction of the class at a given slot.
    pub fn direction_at(&self, tet: usize, slot: usize) -> Option<(usize, usize)> {
        self.slots
            .iter()
            .position(|&s| s == (tet, slot))
            .map(|k| self.directions[k])
    }
}

/// A boundary 2-cell: an unglued tetrahedron face.
#[derive(Debug, Clone)]
pub struct BoundaryFace {
    pub tet: usize,
    pub face: usize,
    /// Local vertex indices in the induced boundary orientation.
    pub corners: [usize; 3],
    /// Boundary edge class of each side (corners[k] -> corners[k+1]).
    pub side_classes: [usize; 3],
}

/// Validated complex with derived combinatorics.
#[derive(Debug, Clone)]
pub struct IdealComplex {
    pub gluing: GluingData,
    pub edge_classes: Vec<EdgeClass>,
    /// Per tet: edge slot -> edge class id.
    pub edge_class_of: Vec<[usize; 6]>,
    /// Vertex classes as lists of (tet, vertex) slots.
    pub vertex_classes: Vec<Vec<(usize, usize)>>,
    pub vertex_class_of: Vec<[usize; 4]>,
    pub boundary_faces: Vec<BoundaryFace>,
    /// (tet, face) -> boundary face id.
    pub boundary_face_of: Vec<[Option<usize>; 4]>,
    /// Boundary surface component of each boundary face, plus per-component
    /// Euler characteristic.
    pub face_component: Vec<usize>,
    pub component_euler: Vec<i64>,
}

impl IdealComplex {
    pub fn num_tets(&self) -> usize {
        self.gluing.num_tets
    }

    pub fn num_interior_edges(&self) -> usize {
        self.edge_classes.iter().filter(|e| e.interior).count()
    }

    pub fn num_boundary_edges(&self) -> usize {
        self.edge_classes.len() - self.num_interior_edges()
    }

    /// Number of tetrahedron corners in a vertex class (the link's triangle
    /// count); appears in the per-vertex angle identity.
    pub fn corner_count(&self, vertex_class: usize) -> usize {
        self.vertex_classes[vertex_class].len()
    }

    /// True when the boundary is a single sphere.
    pub fn boundary_is_sphere(&self) -> bool {
        self.component_euler == [2]
    }

    /// Boundary edge classes incident to a boundary vertex class, with
    /// multiplicity, in cyclic order around the vertex on the boundary
    /// surface, together with the dual path of boundary face ids.
    pub fn edges_around_vertex(&self, v: usize) -> (Vec<usize>, Vec<usize>) {
        // Starting corner of v on the boundary.
        let mut start = None;
        'outer: for (fid, bf) in self.boundary_faces.iter().enumerate() {
            for (pos, &c) in bf.corners.iter().enumerate() {
                if self.vertex_class_of[bf.tet][c] == v {
                    start = Some((fid, pos));
                    break 'outer;
                }
            }
        }
        let Some(start) = start else {
            return (Vec::new(), Vec::new());
        };
        // Rotate: exit through the side whose tail is the current corner;
        // land at the head corner of the matching side of the other face.
        let mut edges = Vec::new();
        let mut faces = Vec::new();
        let (mut fid, mut pos) = start;
        loop {
            faces.push(fid);
            let bf = &self.boundary_faces[fid];
            let cls = bf.side_classes[pos];
            edges.push(cls);
            let sides = self.edge_classes[cls].sides.unwrap();
            let other = if sides.positive == (fid, pos) {
                sides.negative
            } else {
                sides.positive
            };
            fid = other.0;
            pos = (other.1 + 1) % 3;
            if (fid, pos) == start {
                break;
            }
            assert!(
                edges.len() <= 6 * self.boundary_faces.len(),
                "vertex rotation does not close"
            );
        }
        (edges, faces)
    }
}

/// Counts for the boundary/interior Euler identity 2f = 2 e_i + e_b - v.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EulerReport {
    pub tets: usize,
    pub interior_edges: usize,
    pub boundary_edges: usize,
    pub vertices: usize,
    pub holds: bool,
}

/// Check the count identity relating simplices, edges and ideal vertices.
pub fn euler_check(cx: &IdealComplex) -> EulerReport {
    let f = cx.num_tets();
    let e_i = cx.num_interior_edges();
    let e_b = cx.num_boundary_edges();
    let v = cx.vertex_classes.len();
    EulerReport {
        tets: f,
        interior_edges: e_i,
        boundary_edges: e_b,
        vertices: v,
        holds: 2 * f == 2 * e_i + e_b - v,
    }
}

/// Validate gluing data and derive the combinatorial structure.
pub fn build_complex(data: GluingData) -> Result<IdealComplex> {
    let n = data.num_tets;
    if n == 0 {
        return Err(Error::Mismatch("empty complex".into()));
    }
    if data.faces.len() != n {
        return Err(Error::Mismatch(format!(
            "expected {n} face records, got {}",
            data.faces.len()
        )));
    }

    // Face-level validation: ranges, involution, orientation.
    for t in 0..n {
        for f in 0..4 {
            let FaceGluing::Glued { tet: t2, face: f2, perm } = data.faces[t][f] else {
                continue;
            };
            if t2 >= n || f2 > 3 {
                return Err(Error::Gluing {
                    tet: t,
                    face: f,
                    reason: format!("target ({t2}, {f2}) out of range"),
                });
            }
            if (t2, f2) == (t, f) {
                return Err(Error::Gluing {
                    tet: t,
                    face: f,
                    reason: "face glued to itself".into(),
                });
            }
            if perm.apply(f) != f2 {
                return Err(Error::Gluing {
                    tet: t,
                    face: f,
                    reason: format!(
                        "permutation {:?} does not map face {f} to face {f2}",
                        perm.as_array()
                    ),
                });
            }
            if !perm.is_odd() {
                return Err(Error::Gluing {
                    tet: t,
                    face: f,
                    reason: "even permutation (orientation-violating gluing)".into(),
                });
            }
            match data.faces[t2][f2] {
                FaceGluing::Glued { tet: bt, face: bf, perm: bp } => {
                    if (bt, bf) != (t, f) || bp != perm.inverse() {
                        return Err(Error::Gluing {
                            tet: t,
                            face: f,
                            reason: "gluing is not involutive".into(),
                        });
                    }
                }
                FaceGluing::Boundary => {
                    return Err(Error::Gluing {
                        tet: t,
                        face: f,
                        reason: "gluing is not involutive (back side unglued)".into(),
                    });
                }
            }
        }
    }

    // Vertex classes by union-find over (tet, vertex) slots.
    let mut uf = UnionFind::new(4 * n);
    for t in 0..n {
        for f in 0..4 {
            if let FaceGluing::Glued { tet: t2, perm, .. } = data.faces[t][f] {
                for v in 0..4 {
                    if v != f {
                        uf.union(4 * t + v, 4 * t2 + perm.apply(v));
                    }
                }
            }
        }
    }
    let (vertex_class_of_flat, num_vertex_classes) = uf.canonical();
    let mut vertex_class_of = vec![[0usize; 4]; n];
    let mut vertex_classes = vec![Vec::new(); num_vertex_classes];
    for t in 0..n {
        for v in 0..4 {
            let c = vertex_class_of_flat[4 * t + v];
            vertex_class_of[t][v] = c;
            vertex_classes[c].push((t, v));
        }
    }

    // Edge classes by orbit tracing.  Walk state: (tet, directed edge (i, j),
    // face about to be crossed).  Crossing a gluing maps the state by the
    // gluing permutation; the next crossing face is the remaining one.
    let mut edge_class_of = vec![[usize::MAX; 6]; n];
    let mut edge_classes: Vec<EdgeClass> = Vec::new();
    for t0 in 0..n {
        for s0 in 0..6 {
            if edge_class_of[t0][s0] != usize::MAX {
                continue;
            }
            let class_id = edge_classes.len();
            let [i0, j0] = EDGE_ENDS[s0];
            let mut edge_faces = (0..4).filter(|&k| k != i0 && k != j0);
            let ka = edge_faces.next().unwrap();
            let kb = edge_faces.next().unwrap();

            let walk = |start_exit: usize| -> Result<(Vec<(usize, usize, usize)>, bool)> {
                // Yields (tet, i, j) after each crossing; true when the walk
                // closed up (interior edge), false when it hit the boundary.
                let (mut t, mut i, mut j, mut exit) = (t0, i0, j0, start_exit);
                let mut out = Vec::new();
                loop {
                    match data.faces[t][exit] {
                        FaceGluing::Boundary => return Ok((out, false)),
                        FaceGluing::Glued { tet: t2, face: f2, perm } => {
                            let (i2, j2) = (perm.apply(i), perm.apply(j));
                            let exit2 =
                                (0..4).find(|&k| k != i2 && k != j2 && k != f2).unwrap();
                            t = t2;
                            i = i2;
                            j = j2;
                            exit = exit2;
                            if t == t0 && (i, j) == (j0, i0) {
                                return Err(Error::Topology(format!(
                                    "edge orbit of tet {t0} slot {s0} reverses orientation"
                                )));
                            }
                            if (t, i, j, exit) == (t0, i0, j0, start_exit) {
                                return Ok((out, true));
                            }
                            if out.len() > 24 * n {
                                return Err(Error::Topology(format!(
                                    "edge orbit of tet {t0} slot {s0} does not close"
                                )));
                            }
                            out.push((t, i, j));
                        }
                    }
                }
            };

            let (fwd, closed) = walk(ka)?;
            let (slots, directions, interior) = if closed {
                let mut slots = vec![(t0, s0)];
                let mut dirs = vec![(i0, j0)];
                for &(t, i, j) in &fwd {
                    slots.push((t, edge_index(i, j)));
                    dirs.push((i, j));
                }
                (slots, dirs, true)
            } else {
                let (bwd, closed_bwd) = walk(kb)?;
                if closed_bwd {
                    return Err(Error::Internal(format!(
                        "edge orbit of tet {t0} slot {s0} closed in one direction only"
                    )));
                }
                // Fan from the kb-side boundary face to the ka-side one.
                let mut slots = Vec::with_capacity(bwd.len() + fwd.len() + 1);
                let mut dirs = Vec::new();
                for &(t, i, j) in bwd.iter().rev() {
                    slots.push((t, edge_index(i, j)));
                    dirs.push((i, j));
                }
                slots.push((t0, s0));
                dirs.push((i0, j0));
                for &(t, i, j) in &fwd {
                    slots.push((t, edge_index(i, j)));
                    dirs.push((i, j));
                }
                (slots, dirs, false)
            };
            for (k, &(t, s)) in slots.iter().enumerate() {
                if slots.iter().position(|&x| x == (t, s)) != Some(k) {
                    return Err(Error::Topology(format!(
                        "edge slot ({t}, {s}) repeats inside one edge class; such identifications are not supported"
                    )));
                }
                if edge_class_of[t][s] != usize::MAX {
                    return Err(Error::Internal(format!(
                        "edge slot ({t}, {s}) reached from two orbits"
                    )));
                }
                edge_class_of[t][s] = class_id;
            }
            let endpoints = (vertex_class_of[t0][i0], vertex_class_of[t0][j0]);
            edge_classes.push(EdgeClass {
                slots,
                directions,
                interior,
                endpoints,
                sides: None,
            });
        }
    }

    // Boundary faces.
    let mut boundary_faces = Vec::new();
    let mut boundary_face_of = vec![[None; 4]; n];
    for t in 0..n {
        for f in 0..4 {
            if data.faces[t][f] == FaceGluing::Boundary {
                let corners = FACE_ORIENTED[f];
                let mut side_classes = [0usize; 3];
                for k in 0..3 {
                    let (a, b) = (corners[k], corners[(k + 1) % 3]);
                    side_classes[k] = edge_class_of[t][edge_index(a, b)];
                }
                boundary_face_of[t][f] = Some(boundary_faces.len());
                boundary_faces.push(BoundaryFace { tet: t, face: f, corners, side_classes });
            }
        }
    }
    if boundary_faces.is_empty() {
        return Err(Error::Topology(
            "closed complex: every vertex link is closed; only complexes with ideal boundary are supported"
                .into(),
        ));
    }

    // Side incidences per boundary class.  Consistent orientation of the
    // boundary surface means each class occurs exactly once along and once
    // against its direction.
    let mut side_acc: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new(); edge_classes.len()];
    for (fid, bf) in boundary_faces.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (bf.corners[k], bf.corners[(k + 1) % 3]);
            let cls = bf.side_classes[k];
            let dir = edge_classes[cls]
                .direction_at(bf.tet, edge_index(a, b))
                .ok_or_else(|| Error::Internal("side slot missing from its class".into()))?;
            side_acc[cls].push((fid, k, (a, b) == dir));
        }
    }
    for (cid, inc) in side_acc.iter().enumerate() {
        let ec = &mut edge_classes[cid];
        if ec.interior {
            if !inc.is_empty() {
                return Err(Error::Internal(format!(
                    "interior edge class {cid} appears on the boundary"
                )));
            }
            continue;
        }
        if inc.len() != 2 || inc[0].2 == inc[1].2 {
            return Err(Error::Topology(format!(
                "boundary edge class {cid} has inconsistent side incidences"
            )));
        }
        let pos = inc.iter().find(|x| x.2).unwrap();
        let neg = inc.iter().find(|x| !x.2).unwrap();
        ec.sides = Some(BoundarySides {
            positive: (pos.0, pos.1),
            negative: (neg.0, neg.1),
        });
    }

    // Vertex link checks: every link must be a disk.
    let mut incident_edges = vec![0i64; vertex_classes.len()];
    for ec in &edge_classes {
        incident_edges[ec.endpoints.0] += 1;
        incident_edges[ec.endpoints.1] += 1;
    }
    for (vc, slots) in vertex_classes.iter().enumerate() {
        let f_l = slots.len() as i64;
        let mut b_sides = 0i64;
        for &(t, v) in slots {
            for f in 0..4 {
                if f != v && data.faces[t][f] == FaceGluing::Boundary {
                    b_sides += 1;
                }
            }
        }
        let e_l = (3 * f_l - b_sides) / 2 + b_sides;
        let v_l = incident_edges[vc];
        let chi = v_l - e_l + f_l;
        if b_sides == 0 {
            return Err(Error::Topology(format!(
                "vertex class {vc} has a closed link (interior vertex); only ideal boundary vertices are supported"
            )));
        }
        if chi != 1 {
            return Err(Error::Topology(format!(
                "vertex class {vc} has a non-disk link (Euler characteristic {chi})"
            )));
        }
    }

    // Boundary surface components and their Euler characteristics.
    let mut comp_uf = UnionFind::new(boundary_faces.len());
    for ec in edge_classes.iter().filter(|e| !e.interior) {
        let (fa, fb) = ec.side_faces().unwrap();
        comp_uf.union(fa, fb);
    }
    let (face_component, num_components) = comp_uf.canonical();
    let mut comp_v: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); num_components];
    let mut comp_e = vec![0i64; num_components];
    let mut comp_f = vec![0i64; num_components];
    for (fid, bf) in boundary_faces.iter().enumerate() {
        let c = face_component[fid];
        comp_f[c] += 1;
        for &cv in &bf.corners {
            comp_v[c].insert(vertex_class_of[bf.tet][cv]);
        }
    }
    for ec in edge_classes.iter().filter(|e| !e.interior) {
        let (fa, _) = ec.side_faces().unwrap();
        comp_e[face_component[fa]] += 1;
    }
    let component_euler: Vec<i64> = (0..num_components)
        .map(|c| comp_v[c].len() as i64 - comp_e[c] + comp_f[c])
        .collect();

    Ok(IdealComplex {
        gluing: data,
        edge_classes,
        edge_class_of,
        vertex_classes,
        vertex_class_of,
        boundary_faces,
        boundary_face_of,
        face_component,
        component_euler,
    })
}

/// Whether a circuit is known to bound a disk in the complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contractibility {
    /// Circuit lies on a sphere boundary component.
    Known,
    /// Declared contractible by the caller.
    UserDeclared,
    /// No information; excluded from strict angle validation.
    Unknown,
}

/// A closed path in the dual graph of the boundary cellulation.
#[derive(Debug, Clone)]
pub struct Circuit {
    /// Boundary edge class ids along the path.
    pub edges: Vec<usize>,
    /// Dual path: boundary face ids, same length as `edges`.
    pub faces: Vec<usize>,
    /// Vertex class when the circuit is elementary (edges around one vertex).
    pub elementary: Option<usize>,
    pub contractibility: Contractibility,
}

/// Result of circuit enumeration.
#[derive(Debug, Clone)]
pub struct CircuitReport {
    pub circuits: Vec<Circuit>,
    /// False when non-elementary enumeration was truncated by max_len.
    pub complete: bool,
    pub max_len: usize,
}

/// Default length cap for non-elementary circuit enumeration.
pub const DEFAULT_CIRCUIT_MAX_LEN: usize = 12;

/// Enumerate circuits: all elementary ones, plus simple cycles of the dual
/// multigraph with at most `max_len` edges.  `declared` lists edge-class
/// sets the caller asserts to be contractible.
pub fn enumerate_circuits(
    cx: &IdealComplex,
    max_len: usize,
    declared: &[Vec<usize>],
) -> CircuitReport {
    let declared_sets: Vec<Vec<usize>> = declared
        .iter()
        .map(|d| {
            let mut s = d.clone();
            s.sort_unstable();
            s
        })
        .collect();

    let mut circuits = Vec::new();

    // Elementary circuits, one per boundary vertex class.
    let mut elementary_sets: Vec<Vec<usize>> = Vec::new();
    for v in 0..cx.vertex_classes.len() {
        let (edges, faces) = cx.edges_around_vertex(v);
        if edges.is_empty() {
            continue;
        }
        let mut key = edges.clone();
        key.sort_unstable();
        elementary_sets.push(key);
        let known = cx.component_euler[cx.face_component[faces[0]]] == 2;
        circuits.push(Circuit {
            edges,
            faces,
            elementary: Some(v),
            contractibility: if known {
                Contractibility::Known
            } else {
                Contractibility::Unknown
            },
        });
    }

    // Simple cycles of the dual multigraph.
    let arcs: Vec<(usize, usize, usize)> = cx
        .edge_classes
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.interior)
        .map(|(id, e)| {
            let (a, b) = e.side_faces().unwrap();
            (id, a, b)
        })
        .collect();
    let (cycles, complete) =
        crate::cycles::simple_cycles(cx.boundary_faces.len(), &arcs, max_len);
    for (arc_path, node_path) in cycles {
        let mut key = arc_path.clone();
        key.sort_unstable();
        if elementary_sets.contains(&key) {
            continue; // already listed as elementary
        }
        let contractibility = if cx.component_euler[cx.face_component[node_path[0]]] == 2 {
            Contractibility::Known
        } else if declared_sets.contains(&key) {
            Contractibility::UserDeclared
        } else {
            Contractibility::Unknown
        };
        circuits.push(Circuit {
            edges: arc_path,
            faces: node_path,
            elementary: None,
            contractibility,
        });
    }

    circuits.sort_by(|a, b| {
        (a.elementary.is_none(), a.edges.len(), a.edges.clone()).cmp(&(
            b.elementary.is_none(),
            b.edges.len(),
            b.edges.clone(),
        ))
    });
    CircuitReport {
        circuits,
        complete,
        max_len,
    }
}

/// Union-find with deterministic canonical numbering by first appearance.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
            r
        } else {
            x
        }
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// (class index per element, class count), numbered by first appearance.
    fn canonical(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut map = std::collections::BTreeMap::new();
        let mut out = vec![0; n];
        for x in 0..n {
            let r = self.find(x);
            let next = map.len();
            let id = *map.entry(r).or_insert(next);
            out[x] = id;
        }
        (out, map.len())
    }
}
