//! Piecewise-affine structure on dihedral angle data: diagonal flips of
//! triangulated cellulations acting on angle charts, preservation of the
//! circuit conditions, and holonomy around codimension-2 walls.
//!
//! Angles are exact rationals in units of pi.  Flips are linear with
//! rational coefficients, so every identity here is checked with no
//! tolerance at all; floats only enter at the solver interface, and an f64
//! converts losslessly to a rational when needed.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cell::{build_cell, Cellulation};
use crate::error::{Error, Result};

/// Exterior angle in units of pi.
pub type Angle = BigRational;

/// Angle chart over the edges of a cellulation.  Interior charts keep all
/// values in (0, 1); transitional values outside that range appear while
/// crossing walls.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AngleChart {
    pub cell: Cellulation,
    /// Angle per edge, keyed by the sorted endpoint pair.
    pub angles: BTreeMap<(usize, usize), Angle>,
}

impl AngleChart {
    pub fn new(cell: Cellulation, angles: BTreeMap<(usize, usize), Angle>) -> Result<Self> {
        let cc = build_cell(cell.clone())?;
        if angles.len() != cc.edges.len() || cc.edges.iter().any(|e| !angles.contains_key(e)) {
            return Err(Error::Mismatch(
                "chart angles must cover exactly the cellulation edges".into(),
            ));
        }
        Ok(Self { cell, angles })
    }

    /// True when every angle lies strictly between 0 and pi.
    pub fn is_interior(&self) -> bool {
        let one = Angle::one();
        self.angles
            .values()
            .all(|q| *q > Angle::zero() && *q < one)
    }

    /// Angle sum around each vertex: the elementary circuit values, in
    /// units of pi.
    pub fn elementary_sums(&self) -> Result<Vec<Angle>> {
        let cc = build_cell(self.cell.clone())?;
        Ok((0..self.cell.num_vertices)
            .map(|v| {
                cc.vertex_rotations[v]
                    .iter()
                    .map(|&e| self.angles[&cc.edges[e]].clone())
                    .sum()
            })
            .collect())
    }
}

fn canonical_triangle(t: [usize; 3]) -> Vec<usize> {
    let lo = (0..3).min_by_key(|&i| t[i]).unwrap();
    vec![t[lo], t[(lo + 1) % 3], t[(lo + 2) % 3]]
}

/// Cross the wall at the diagonal `e1`: the two triangles beside it merge
/// into a quadrilateral which is re-cut along the opposite diagonal.  The
/// chart must carry exactly -2u at `e1`; the result carries 2u on the new
/// diagonal and the four quad sides decrease by u.  Everything else is
/// untouched.
pub fn flip(chart: &AngleChart, e1: (usize, usize), u: &Angle) -> Result<AngleChart> {
    let key = (e1.0.min(e1.1), e1.0.max(e1.1));
    let cc = build_cell(chart.cell.clone())?;
    let id = cc
        .edge_id(key.0, key.1)
        .ok_or_else(|| Error::Flip(format!("no edge {key:?} in the cellulation")))?;
    let two_u = u.clone() + u.clone();
    if chart.angles[&key] != -two_u.clone() {
        return Err(Error::Flip(format!(
            "edge {key:?} carries {}, crossing with u = {u} needs {}",
            chart.angles[&key],
            -two_u
        )));
    }

    let [(f1, k1), (f2, k2)] = cc.sides[id];
    if f1 == f2 {
        return Err(Error::Flip("edge bounds a single face twice".into()));
    }
    let (t1, t2) = (&chart.cell.faces[f1], &chart.cell.faces[f2]);
    if t1.len() != 3 || t2.len() != 3 {
        return Err(Error::Flip(
            "both faces beside the diagonal must be triangles".into(),
        ));
    }
    // t1 runs the diagonal as x -> y, t2 as y -> x; the quad boundary is
    // then y -> c1 -> x -> c2.
    let (x, y) = (t1[k1], t1[(k1 + 1) % 3]);
    let c1 = t1[(k1 + 2) % 3];
    let c2 = t2[(k2 + 2) % 3];
    if c1 == c2 || [c1, c2].iter().any(|c| *c == x || *c == y) {
        return Err(Error::Flip("quad at the diagonal is not embedded".into()));
    }
    let e2 = (c1.min(c2), c1.max(c2));
    if cc.edge_id(e2.0, e2.1).is_some() {
        return Err(Error::Flip(format!(
            "opposite diagonal {e2:?} already present; quad is not embedded"
        )));
    }

    let mut faces = chart.cell.faces.clone();
    faces[f1.min(f2)] = canonical_triangle([c1, x, c2]);
    faces[f1.max(f2)] = canonical_triangle([c2, y, c1]);

    let mut angles = chart.angles.clone();
    angles.remove(&key);
    angles.insert(e2, two_u);
    for (s, t) in [(y, c1), (c1, x), (x, c2), (c2, y)] {
        let k = (s.min(t), s.max(t));
        let a = angles
            .get_mut(&k)
            .ok_or_else(|| Error::Internal("quad side missing from the chart".into()))?;
        *a -= u.clone();
    }
    AngleChart::new(
        Cellulation {
            num_vertices: chart.cell.num_vertices,
            faces,
        },
        angles,
    )
}

#[derive(Debug, Clone)]
pub struct PreservationReport {
    /// Elementary sums before the flip, one per vertex.
    pub before: Vec<Angle>,
    pub after: Vec<Angle>,
    pub preserved: bool,
}

/// Flip and compare the elementary circuit sums vertex by vertex.  The
/// wall-crossing rule never moves them; a report saying otherwise means
/// the input was not a legal crossing.
pub fn elementary_circuit_preservation(
    chart: &AngleChart,
    e1: (usize, usize),
    u: &Angle,
) -> Result<PreservationReport> {
    let before = chart.elementary_sums()?;
    let after = flip(chart, e1, u)?.elementary_sums()?;
    let preserved = before == after;
    Ok(PreservationReport {
        before,
        after,
        preserved,
    })
}

/// Pentagon with one triangulated side: the five fan triangulations of the
/// front face are connected by flips in a cycle, while the back face keeps
/// the wall structure at codimension 2.
fn doubled_pentagon(diag_02: Angle, diag_03: Angle) -> AngleChart {
    let mut angles = BTreeMap::new();
    for e in [(0usize, 1usize), (1, 2), (2, 3), (3, 4), (0, 4)] {
        angles.insert(e, Angle::zero());
    }
    angles.insert((0, 2), diag_02);
    angles.insert((0, 3), diag_03);
    let cell = Cellulation {
        num_vertices: 5,
        faces: vec![
            vec![0, 1, 2],
            vec![0, 2, 3],
            vec![0, 3, 4],
            vec![4, 3, 2, 1, 0],
        ],
    };
    AngleChart::new(cell, angles).unwrap()
}

/// One full turn around the pentagon wall: five crossings, each at the
/// value the previous ones produced, ending on the starting triangulation.
fn pentagon_cycle(mut chart: AngleChart) -> AngleChart {
    let two = Angle::one() + Angle::one();
    for e1 in [(0usize, 3usize), (0, 2), (2, 4), (1, 4), (1, 3)] {
        let u = -chart.angles[&e1].clone() / two.clone();
        chart = flip(&chart, e1, &u).unwrap();
    }
    chart
}

/// Linear part of the holonomy around a pentagon wall, acting on the two
/// diagonal angles of the fan triangulation.  Row i, column j is the
/// coefficient of the j-th starting diagonal in the i-th final one.
pub fn pentagon_holonomy() -> [[Angle; 2]; 2] {
    // The five side angles enter the crossings but never feed back into
    // the diagonals, so two basis runs determine the block exactly.
    let col0 = pentagon_cycle(doubled_pentagon(Angle::one(), Angle::zero()));
    let col1 = pentagon_cycle(doubled_pentagon(Angle::zero(), Angle::one()));
    [
        [col0.angles[&(0, 2)].clone(), col1.angles[&(0, 2)].clone()],
        [col0.angles[&(0, 3)].clone(), col1.angles[&(0, 3)].clone()],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Angle {
        Angle::new(n.into(), d.into())
    }

    /// Doubled square: front face cut along (0, 2), back face whole.
    fn doubled_square(sides: [Angle; 4], diag: Angle) -> AngleChart {
        let mut angles = BTreeMap::new();
        let keys = [(0usize, 1usize), (1, 2), (2, 3), (0, 3)];
        for (k, v) in keys.into_iter().zip(sides) {
            angles.insert(k, v);
        }
        angles.insert((0, 2), diag);
        let cell = Cellulation {
            num_vertices: 4,
            faces: vec![vec![0, 1, 2], vec![0, 2, 3], vec![3, 2, 1, 0]],
        };
        AngleChart::new(cell, angles).unwrap()
    }

    fn sorted_faces(chart: &AngleChart) -> Vec<Vec<usize>> {
        let mut f = chart.cell.faces.clone();
        f.sort();
        f
    }

    #[test]
    fn wall_point_flip_only_swaps_the_diagonal() {
        let sides = [rat(1, 2), rat(2, 3), rat(3, 5), rat(4, 7)];
        let chart = doubled_square(sides.clone(), Angle::zero());
        let flipped = flip(&chart, (0, 2), &Angle::zero()).unwrap();
        assert_eq!(flipped.angles[&(1, 3)], Angle::zero());
        assert!(!flipped.angles.contains_key(&(0, 2)));
        let keys = [(0usize, 1usize), (1, 2), (2, 3), (0, 3)];
        for (k, v) in keys.into_iter().zip(sides) {
            assert_eq!(flipped.angles[&k], v);
        }
    }

    #[test]
    fn flip_arithmetic_matches_the_rule() {
        // Sides (1, 6/5, 9/10, 11/10), u = 1/10: sides drop by u and the
        // new diagonal carries 2u.
        let sides = [rat(1, 1), rat(6, 5), rat(9, 10), rat(11, 10)];
        let chart = doubled_square(sides.clone(), rat(-1, 5));
        let flipped = flip(&chart, (0, 2), &rat(1, 10)).unwrap();
        assert_eq!(flipped.angles[&(1, 3)], rat(1, 5));
        let keys = [(0usize, 1usize), (1, 2), (2, 3), (0, 3)];
        for (k, v) in keys.into_iter().zip(sides) {
            assert_eq!(flipped.angles[&k], v - rat(1, 10));
        }
    }

    #[test]
    fn flip_back_with_negated_u_is_the_identity() {
        let chart = doubled_square(
            [rat(1, 2), rat(5, 7), rat(2, 3), rat(3, 4)],
            rat(-2, 9),
        );
        let there = flip(&chart, (0, 2), &rat(1, 9)).unwrap();
        let back = flip(&there, (1, 3), &rat(-1, 9)).unwrap();
        assert_eq!(back.angles, chart.angles);
        assert_eq!(sorted_faces(&back), sorted_faces(&chart));
    }

    #[test]
    fn flip_is_additive_in_chart_and_crossing_parameter() {
        let a = doubled_square([rat(1, 2), rat(1, 3), rat(1, 5), rat(1, 7)], rat(-2, 5));
        let b = doubled_square([rat(1, 11), rat(2, 11), rat(3, 11), rat(4, 11)], rat(-2, 13));
        let mut sum_angles = a.angles.clone();
        for (k, v) in &b.angles {
            *sum_angles.get_mut(k).unwrap() += v.clone();
        }
        let sum = AngleChart::new(a.cell.clone(), sum_angles).unwrap();

        let fa = flip(&a, (0, 2), &rat(1, 5)).unwrap();
        let fb = flip(&b, (0, 2), &rat(1, 13)).unwrap();
        let fsum = flip(&sum, (0, 2), &(rat(1, 5) + rat(1, 13))).unwrap();
        for (k, v) in &fsum.angles {
            assert_eq!(*v, fa.angles[k].clone() + fb.angles[k].clone());
        }
    }

    #[test]
    fn flip_rejects_wrong_crossing_value_and_missing_edges() {
        let chart = doubled_square(std::array::from_fn(|_| rat(1, 2)), rat(-1, 4));
        assert!(matches!(
            flip(&chart, (0, 2), &rat(1, 3)),
            Err(Error::Flip(_))
        ));
        assert!(matches!(
            flip(&chart, (1, 3), &rat(1, 8)),
            Err(Error::Flip(_))
        ));
    }

    #[test]
    fn flip_rejects_non_embedded_quads() {
        // Two triangles over the same three vertices: apexes coincide.
        let cell = Cellulation {
            num_vertices: 3,
            faces: vec![vec![0, 1, 2], vec![2, 1, 0]],
        };
        let mut angles = BTreeMap::new();
        angles.insert((0, 1), Angle::zero());
        angles.insert((1, 2), Angle::zero());
        angles.insert((0, 2), Angle::zero());
        let chart = AngleChart::new(cell, angles).unwrap();
        assert!(matches!(
            flip(&chart, (0, 2), &Angle::zero()),
            Err(Error::Flip(_))
        ));
    }

    #[test]
    fn elementary_sums_survive_flips_exactly() {
        let chart = doubled_pentagon(rat(-2, 7), rat(5, 9));
        let report = elementary_circuit_preservation(&chart, (0, 2), &rat(1, 7)).unwrap();
        assert!(report.preserved);
        assert_eq!(report.before, report.after);

        // Negative control: breaking the rule on one quad side moves the
        // sums at its endpoints.
        let mut corrupted = flip(&chart, (0, 2), &rat(1, 7)).unwrap();
        *corrupted.angles.get_mut(&(2, 3)).unwrap() += rat(1, 7);
        assert_ne!(chart.elementary_sums().unwrap(), corrupted.elementary_sums().unwrap());
    }

    #[test]
    fn boundary_walls_stay_flat_only_off_the_quad() {
        // Crossing with u < 0: a non-quad edge at pi keeps its value, a
        // quad side at pi moves above pi.
        let chart = doubled_pentagon(rat(1, 5), Angle::one());
        let mut chart = chart;
        *chart.angles.get_mut(&(0, 4)).unwrap() = Angle::one();
        *chart.angles.get_mut(&(0, 2)).unwrap() = rat(1, 5);
        let flipped = flip(&chart, (0, 2), &rat(-1, 10)).unwrap();
        // (0, 4) bounds the flipped quad (1, 2, 3, 0) nowhere: unchanged.
        assert_eq!(flipped.angles[&(0, 4)], Angle::one());
        // (0, 3) is a quad side at pi: pushed strictly above.
        assert_eq!(flipped.angles[&(0, 3)], Angle::one() + rat(1, 10));
    }

    #[test]
    fn pentagon_holonomy_is_the_published_matrix() {
        let m = pentagon_holonomy();
        assert_eq!(m[0][0], rat(28, 32));
        assert_eq!(m[0][1], rat(-10, 32));
        assert_eq!(m[1][0], rat(10, 32));
        assert_eq!(m[1][1], rat(33, 32));
        let det = m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone();
        assert_eq!(det, Angle::one());
    }

    #[test]
    fn quadrilateral_wall_holonomy_is_trivial() {
        // Cube with two opposite quads and triangulated sides: flipping
        // both quads there and back returns every angle exactly.
        let faces = vec![
            vec![0, 3, 2],
            vec![0, 2, 1],
            vec![4, 5, 6],
            vec![4, 6, 7],
            vec![0, 1, 5],
            vec![0, 5, 4],
            vec![1, 2, 6],
            vec![1, 6, 5],
            vec![2, 3, 7],
            vec![2, 7, 6],
            vec![3, 0, 4],
            vec![3, 4, 7],
        ];
        let cell = Cellulation {
            num_vertices: 8,
            faces,
        };
        let cc = build_cell(cell.clone()).unwrap();
        let mut angles = BTreeMap::new();
        for (i, &e) in cc.edges.iter().enumerate() {
            angles.insert(e, rat(i as i64 + 1, 17));
        }
        *angles.get_mut(&(0, 2)).unwrap() = rat(-2, 5);
        *angles.get_mut(&(4, 6)).unwrap() = rat(-2, 11);
        let chart = AngleChart::new(cell, angles).unwrap();

        let s1 = flip(&chart, (0, 2), &rat(1, 5)).unwrap();
        let s2 = flip(&s1, (4, 6), &rat(1, 11)).unwrap();
        let s3 = flip(&s2, (1, 3), &rat(-1, 5)).unwrap();
        let s4 = flip(&s3, (5, 7), &rat(-1, 11)).unwrap();
        assert_eq!(s4.angles, chart.angles);
        assert_eq!(sorted_faces(&s4), sorted_faces(&chart));
    }
}
