//! Small named complexes and graphs used by tests, benches and the CLI.

use crate::angles::AngleTarget;
use crate::cell::Cellulation;
use crate::complex::{build_complex, GluingData, IdealComplex, Perm, EDGE_ENDS};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// One tetrahedron, all faces boundary.
pub fn single_tet() -> IdealComplex {
    build_complex(GluingData::unglued(1)).unwrap()
}

/// Two tetrahedra glued along one face: triangle suspension, no interior
/// edges.
pub fn bipyramid() -> IdealComplex {
    let mut g = GluingData::unglued(2);
    g.glue(0, 3, 1, Perm::new([1, 0, 2, 3]).unwrap()).unwrap();
    build_complex(g).unwrap()
}

/// Cone over the octahedron: four tetrahedra (N, S, E_i, E_{i+1}) around the
/// interior edge N-S.  Boundary is the octahedron.
pub fn cone_over_octahedron() -> IdealComplex {
    // Tet i has local vertices (0, 1, 2, 3) = (N, S, E_i, E_{i+1 mod 4}).
    // Face 2 of tet i ({N, S, E_{i+1}}) glues to face 3 of tet i+1
    // ({N, S, E_{i+1}}): N -> N, S -> S, E_{i+1} -> E_{i+1} means the local
    // map fixes 0, 1 and swaps 2 <-> 3.
    let mut g = GluingData::unglued(4);
    let swap23 = Perm::new([0, 1, 3, 2]).unwrap();
    for i in 0..4 {
        g.glue(i, 2, (i + 1) % 4, swap23).unwrap();
    }
    build_complex(g).unwrap()
}

/// Coned octahedron together with a map from octahedron edges (vertex pairs,
/// 0 = N, 1..5 = equator E_0..E_3, 5 = S) to boundary edge class ids.
pub fn cone_over_octahedron_labeled() -> (IdealComplex, BTreeMap<(usize, usize), usize>) {
    let cx = cone_over_octahedron();
    let glob = |tet: usize, v: usize| [0, 5, 1 + tet, 1 + (tet + 1) % 4][v];
    let mut map = BTreeMap::new();
    for (id, ec) in cx.edge_classes.iter().enumerate() {
        if !ec.interior {
            let (t, s) = ec.slots[0];
            let [i, j] = EDGE_ENDS[s];
            let (a, b) = (glob(t, i), glob(t, j));
            map.insert((a.min(b), a.max(b)), id);
        }
    }
    (cx, map)
}

/// Coned octahedron with dihedral targets 2 pi / 3 along a great hexagon of
/// boundary edges and pi / 3 elsewhere.  Every vertex sum is consistent, but
/// the hexagon's exterior angles total exactly 2 pi, so the volume maximizer
/// degenerates along it.  Returns the hexagon's edge class ids too.
pub fn degenerate_octahedron_target() -> (IdealComplex, AngleTarget, Vec<usize>) {
    let (cx, map) = cone_over_octahedron_labeled();
    let hexagon = [(0, 2), (0, 3), (3, 4), (4, 5), (1, 5), (1, 2)];
    let mut dihedral = BTreeMap::new();
    for (&e, &id) in &map {
        let on_hex = hexagon.contains(&e);
        dihedral.insert(id, if on_hex { 2.0 * PI / 3.0 } else { PI / 3.0 });
    }
    let target = AngleTarget::with_boundary(&cx, &dihedral).unwrap();
    let mut hex_ids: Vec<usize> = hexagon.iter().map(|e| map[e]).collect();
    hex_ids.sort_unstable();
    (cx, target, hex_ids)
}

/// Edges of the complete graph on 4 vertices.
pub fn k4_graph() -> (usize, Vec<(usize, usize)>) {
    (4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
}

/// Edges of the octahedron graph: vertices 0 = N, 1..5 = equator E_0..E_3,
/// 5 = S.
pub fn octahedron_graph() -> (usize, Vec<(usize, usize)>) {
    let mut edges = Vec::new();
    for i in 0..4 {
        let e = 1 + i;
        let e_next = 1 + (i + 1) % 4;
        edges.push((0, e));
        edges.push((e, 5));
        edges.push((e.min(e_next), e.max(e_next)));
    }
    edges.sort_unstable();
    (6, edges)
}

/// Edges of the icosahedron graph (12 vertices, 30 edges).
pub fn icosahedron_graph() -> (usize, Vec<(usize, usize)>) {
    // Standard construction: north pole 0, upper ring 1..6, lower ring 6..11,
    // south pole 11.
    let mut edges = Vec::new();
    for i in 0..5 {
        let u = 1 + i;
        let u_next = 1 + (i + 1) % 5;
        let l = 6 + i;
        let l_next = 6 + (i + 1) % 5;
        edges.push((0, u));
        edges.push((u, u_next));
        edges.push((u, l));
        edges.push((u_next, l));
        edges.push((l, l_next));
        edges.push((l, 11));
    }
    let mut edges: Vec<(usize, usize)> = edges
        .into_iter()
        .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    (12, edges)
}

/// Boundary of the tetrahedron as a sphere cellulation.
pub fn tetrahedron_cell() -> Cellulation {
    Cellulation {
        num_vertices: 4,
        faces: vec![vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 1], vec![3, 2, 1]],
    }
}

/// Octahedron cellulation with the `octahedron_graph` vertex labels.
pub fn octahedron_cell() -> Cellulation {
    let mut faces = Vec::new();
    for i in 0..4 {
        let e = 1 + i;
        let e_next = 1 + (i + 1) % 4;
        faces.push(vec![0, e, e_next]);
        faces.push(vec![5, e_next, e]);
    }
    Cellulation { num_vertices: 6, faces }
}

/// Icosahedron cellulation with the `icosahedron_graph` vertex labels.
pub fn icosahedron_cell() -> Cellulation {
    let mut faces = Vec::new();
    for i in 0..5 {
        let u = 1 + i;
        let u_next = 1 + (i + 1) % 5;
        let l = 6 + i;
        let l_next = 6 + (i + 1) % 5;
        faces.push(vec![0, u, u_next]);
        faces.push(vec![u, l, u_next]);
        faces.push(vec![l, l_next, u_next]);
        faces.push(vec![11, l_next, l]);
    }
    Cellulation { num_vertices: 12, faces }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::build_cell;
    use crate::complex::euler_check;

    #[test]
    fn cone_over_octahedron_counts() {
        let cx = cone_over_octahedron();
        let e = euler_check(&cx);
        assert_eq!(
            (e.tets, e.interior_edges, e.boundary_edges, e.vertices),
            (4, 1, 12, 6)
        );
        assert!(e.holds);
        assert_eq!(cx.boundary_faces.len(), 8);
        assert!(cx.boundary_is_sphere());
        // The interior edge N-S is shared by all four tets.
        let interior = cx.edge_classes.iter().find(|c| c.interior).unwrap();
        assert_eq!(interior.slots.len(), 4);
    }

    #[test]
    fn octahedron_boundary_vertex_degrees() {
        let cx = cone_over_octahedron();
        let mut degrees: Vec<usize> = (0..cx.vertex_classes.len())
            .map(|v| cx.edges_around_vertex(v).0.len())
            .collect();
        degrees.sort_unstable();
        assert_eq!(degrees, vec![4; 6]);
    }

    #[test]
    fn graph_sizes() {
        let (n, e) = k4_graph();
        assert_eq!((n, e.len()), (4, 6));
        let (n, e) = octahedron_graph();
        assert_eq!((n, e.len()), (6, 12));
        let (n, e) = icosahedron_graph();
        assert_eq!((n, e.len()), (12, 30));
        // Icosahedron is 5-regular.
        let mut deg = vec![0usize; 12];
        for (a, b) in e {
            deg[a] += 1;
            deg[b] += 1;
        }
        assert!(deg.iter().all(|&d| d == 5));
    }

    #[test]
    fn cellulations_are_spheres_matching_their_graphs() {
        for (cell, (n, graph)) in [
            (tetrahedron_cell(), k4_graph()),
            (octahedron_cell(), octahedron_graph()),
            (icosahedron_cell(), icosahedron_graph()),
        ] {
            let cc = build_cell(cell).unwrap();
            assert!(cc.all_spheres());
            assert_eq!(cc.cell.num_vertices, n);
            assert_eq!(cc.edges, graph);
        }
    }
}
