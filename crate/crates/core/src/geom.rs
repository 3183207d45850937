//! Realizing angle assignments geometrically: tetrahedron shape parameters,
//! points of the boundary sphere in homogeneous coordinates, Mobius maps,
//! the developing map, and circles as Hermitian forms.

use crate::angles::AngleAssignment;
use crate::complex::{FaceGluing, IdealComplex, EDGE_LABEL};
use crate::error::{Error, Result};
use crate::linalg;
use crate::loba::TetAngles;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Point of the boundary sphere CP^1 in homogeneous coordinates (a : b);
/// the affine point is a / b, with b = 0 at infinity.
#[derive(Debug, Clone, Copy)]
pub struct ProjPoint {
    pub a: Complex64,
    pub b: Complex64,
}

impl ProjPoint {
    pub fn from_z(z: Complex64) -> Self {
        Self { a: z, b: Complex64::new(1.0, 0.0) }.normalized()
    }

    pub fn infinity() -> Self {
        Self { a: Complex64::new(1.0, 0.0), b: Complex64::new(0.0, 0.0) }
    }

    pub fn is_finite(&self, tol: f64) -> bool {
        self.b.norm() > tol * self.a.norm().max(1.0)
    }

    /// Affine coordinate; None at (numerical) infinity.
    pub fn to_z(&self) -> Option<Complex64> {
        if self.is_finite(1e-13) {
            Some(self.a / self.b)
        } else {
            None
        }
    }

    pub fn normalized(&self) -> Self {
        let n = (self.a.norm_sqr() + self.b.norm_sqr()).sqrt();
        if n == 0.0 {
            *self
        } else {
            Self { a: self.a / n, b: self.b / n }
        }
    }
}

/// Determinant bracket; vanishes exactly when the points coincide.
pub fn bracket(p: &ProjPoint, q: &ProjPoint) -> Complex64 {
    p.a * q.b - p.b * q.a
}

/// Chordal distance |p - q| on the unit-normalized sphere; bounded by 1.
pub fn chordal(p: &ProjPoint, q: &ProjPoint) -> f64 {
    let np = (p.a.norm_sqr() + p.b.norm_sqr()).sqrt();
    let nq = (q.a.norm_sqr() + q.b.norm_sqr()).sqrt();
    if np == 0.0 || nq == 0.0 {
        return f64::INFINITY;
    }
    bracket(p, q).norm() / (np * nq)
}

/// Cross-ratio (p0 - p2)(p1 - p3) / ((p0 - p3)(p1 - p2)) in homogeneous
/// form; for an ideal tetrahedron placed in local vertex order this equals
/// the shape parameter of the 01/23 edge pair.
pub fn cross_ratio(p0: &ProjPoint, p1: &ProjPoint, p2: &ProjPoint, p3: &ProjPoint) -> Complex64 {
    (bracket(p0, p2) * bracket(p1, p3)) / (bracket(p0, p3) * bracket(p1, p2))
}

/// Shape parameters (zeta_a, zeta_b, zeta_c) of the tetrahedron with the
/// given dihedral angles: |zeta_a| = sin b / sin c and arg zeta_a = a,
/// cyclically.  They satisfy zeta_{next} = 1 / (1 - zeta) and have positive
/// imaginary part.
pub fn shape_from_angles(ta: &TetAngles) -> [Complex64; 3] {
    let ang = ta.as_array();
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for l in 0..3 {
        let m = ang[(l + 1) % 3].sin() / ang[(l + 2) % 3].sin();
        out[l] = Complex64::from_polar(m, ang[l]);
    }
    out
}

/// Log of the shape modulus at an edge slot: the signed shear the
/// tetrahedron contributes along that edge.
pub fn shear_at_slot(ta: &TetAngles, slot: usize) -> f64 {
    let l = EDGE_LABEL[slot];
    let ang = ta.as_array();
    ang[(l + 1) % 3].sin().ln() - ang[(l + 2) % 3].sin().ln()
}

/// Mobius transformation as a complex 2 x 2 matrix acting on homogeneous
/// coordinates.
#[derive(Debug, Clone, Copy)]
pub struct Mobius {
    pub m: [[Complex64; 2]; 2],
}

impl Mobius {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { m: [[one, zero], [zero, one]] }
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        ProjPoint {
            a: self.m[0][0] * p.a + self.m[0][1] * p.b,
            b: self.m[1][0] * p.a + self.m[1][1] * p.b,
        }
        .normalized()
    }

    pub fn compose(&self, other: &Mobius) -> Mobius {
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = self.m[i][0] * other.m[0][j] + self.m[i][1] * other.m[1][j];
            }
        }
        Mobius { m }
    }

    pub fn inverse(&self) -> Result<Mobius> {
        let d = self.det();
        if d.norm() < 1e-300 {
            return Err(Error::Internal("singular Mobius matrix".into()));
        }
        Ok(Mobius {
            m: [
                [self.m[1][1] / d, -self.m[0][1] / d],
                [-self.m[1][0] / d, self.m[0][0] / d],
            ],
        })
    }

    /// The map sending p0, p1, p2 to 0, 1, infinity.
    pub fn to_standard(p0: &ProjPoint, p1: &ProjPoint, p2: &ProjPoint) -> Result<Mobius> {
        let d12 = bracket(p1, p2);
        let d10 = bracket(p1, p0);
        let m = Mobius {
            m: [
                [d12 * p0.b, -d12 * p0.a],
                [d10 * p2.b, -d10 * p2.a],
            ],
        };
        if m.det().norm() < 1e-30 {
            return Err(Error::Internal(
                "three-point normalization needs distinct points".into(),
            ));
        }
        Ok(m)
    }

    /// The map sending the p triple to the q triple.
    pub fn between(p: [&ProjPoint; 3], q: [&ProjPoint; 3]) -> Result<Mobius> {
        let mp = Mobius::to_standard(p[0], p[1], p[2])?;
        let mq = Mobius::to_standard(q[0], q[1], q[2])?;
        Ok(mq.inverse()?.compose(&mp))
    }
}

/// Placement of every ideal vertex on the boundary sphere.
#[derive(Debug, Clone)]
pub struct Developed {
    /// Positions of the four local vertices of each tetrahedron.
    pub tet_positions: Vec<[ProjPoint; 4]>,
    /// One position per vertex class.
    pub vertex_positions: Vec<ProjPoint>,
    /// Largest placement disagreement seen: chordal mismatch across glued
    /// faces and vertex classes, and cross-ratio error against the shapes.
    pub consistency: f64,
}

/// Given three placed vertices of a tetrahedron and its a-shape, place the
/// fourth so the cross-ratio in local order equals the shape.  The
/// cross-ratio is linear in the missing homogeneous coordinates.
fn place_fourth(pos: &[Option<ProjPoint>; 4], zeta_a: Complex64) -> Result<ProjPoint> {
    let missing = pos.iter().position(|p| p.is_none()).ok_or_else(|| {
        Error::Internal("place_fourth called with all vertices placed".into())
    })?;
    let eval = |probe: ProjPoint| -> Complex64 {
        let get = |i: usize| -> ProjPoint {
            match &pos[i] {
                Some(p) => *p,
                None => probe,
            }
        };
        let (p0, p1, p2, p3) = (get(0), get(1), get(2), get(3));
        bracket(&p0, &p2) * bracket(&p1, &p3) - zeta_a * bracket(&p0, &p3) * bracket(&p1, &p2)
    };
    let c1 = eval(ProjPoint { a: Complex64::new(1.0, 0.0), b: Complex64::new(0.0, 0.0) });
    let c2 = eval(ProjPoint { a: Complex64::new(0.0, 0.0), b: Complex64::new(1.0, 0.0) });
    let p = ProjPoint { a: c2, b: -c1 }.normalized();
    if p.a.norm_sqr() + p.b.norm_sqr() < 0.5 {
        return Err(Error::Develop(format!(
            "degenerate placement for local vertex {missing}"
        )));
    }
    Ok(p)
}

/// Develop the complex into the boundary sphere by breadth-first
/// propagation from tetrahedron 0, placed with local vertices at
/// (0, 1, infinity, zeta_b).  Gluings revisited across the traversal tree
/// measure the holonomy error of the assignment; it vanishes exactly when
/// all interior edges close up rigidly.
pub fn develop(cx: &IdealComplex, asg: &AngleAssignment) -> Result<Developed> {
    let n = cx.num_tets();
    if n == 0 {
        return Err(Error::Develop("empty complex".into()));
    }
    let shapes: Vec<[Complex64; 3]> = asg.tets().iter().map(shape_from_angles).collect();
    let mut placed: Vec<Option<[ProjPoint; 4]>> = vec![None; n];
    placed[0] = Some([
        ProjPoint::from_z(Complex64::new(0.0, 0.0)),
        ProjPoint::from_z(Complex64::new(1.0, 0.0)),
        ProjPoint::infinity(),
        ProjPoint::from_z(shapes[0][1]),
    ]);
    let mut consistency: f64 = 0.0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    let mut seen = vec![false; n];
    seen[0] = true;
    while let Some(t) = queue.pop_front() {
        let here = placed[t].unwrap();
        for f in 0..4 {
            let FaceGluing::Glued { tet: t2, face: _, perm } = cx.gluing.faces[t][f] else {
                continue;
            };
            if let Some(there) = placed[t2] {
                // Cross edge: the three shared vertices must land together.
                for v in 0..4 {
                    if v == f {
                        continue;
                    }
                    consistency = consistency.max(chordal(&here[v], &there[perm.apply(v)]));
                }
                continue;
            }
            let mut pos: [Option<ProjPoint>; 4] = [None; 4];
            for v in 0..4 {
                if v != f {
                    pos[perm.apply(v)] = Some(here[v]);
                }
            }
            let fourth = place_fourth(&pos, shapes[t2][0])?;
            let mut full = [ProjPoint::infinity(); 4];
            for v in 0..4 {
                full[v] = pos[v].unwrap_or(fourth);
            }
            placed[t2] = Some(full);
            if !seen[t2] {
                seen[t2] = true;
                queue.push_back(t2);
            }
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::Develop("complex is not face-connected".into()));
    }
    let tet_positions: Vec<[ProjPoint; 4]> = placed.into_iter().map(|p| p.unwrap()).collect();

    // Cross-ratio residual of every placed tetrahedron.
    for (t, p) in tet_positions.iter().enumerate() {
        let cr = cross_ratio(&p[0], &p[1], &p[2], &p[3]);
        consistency = consistency.max((cr - shapes[t][0]).norm());
    }

    // One position per vertex class; disagreements are placement error.
    let mut vertex_positions: Vec<Option<ProjPoint>> = vec![None; cx.vertex_classes.len()];
    for (t, p) in tet_positions.iter().enumerate() {
        for v in 0..4 {
            let class = cx.vertex_class_of[t][v];
            match &vertex_positions[class] {
                Some(q) => consistency = consistency.max(chordal(&p[v], q)),
                None => vertex_positions[class] = Some(p[v]),
            }
        }
    }
    Ok(Developed {
        tet_positions,
        vertex_positions: vertex_positions.into_iter().map(|p| p.unwrap()).collect(),
        consistency,
    })
}

/// Circle (or line) on the boundary sphere as a Hermitian form
/// [[a, b], [conj b, d]]: the locus of v with v* H v = 0.
#[derive(Debug, Clone, Copy)]
pub struct Circle {
    pub a: f64,
    pub b: Complex64,
    pub d: f64,
}

impl Circle {
    /// Value of the form at a point; zero on the circle, one sign inside,
    /// the other outside.
    pub fn eval(&self, p: &ProjPoint) -> f64 {
        let p = p.normalized();
        self.a * p.a.norm_sqr() + 2.0 * (self.b * p.a.conj() * p.b).re + self.d * p.b.norm_sqr()
    }

    /// Inversive norm |b|^2 - a d; positive for real circles.
    pub fn norm(&self) -> f64 {
        self.b.norm_sqr() - self.a * self.d
    }

    /// Scale so the inversive norm is 1, keeping the orientation.
    pub fn normalized(&self) -> Result<Circle> {
        let n = self.norm();
        if n <= 0.0 {
            return Err(Error::Internal("imaginary circle".into()));
        }
        let s = n.sqrt();
        Ok(Circle { a: self.a / s, b: self.b / s, d: self.d / s })
    }

    /// Flip the orientation (inside and outside exchange).
    pub fn flipped(&self) -> Circle {
        Circle { a: -self.a, b: -self.b, d: -self.d }
    }

    /// Same circle, oriented so the given point is inside (form negative).
    pub fn oriented_with_inside(&self, p: &ProjPoint) -> Circle {
        if self.eval(p) > 0.0 {
            self.flipped()
        } else {
            *self
        }
    }

    /// Circle through three distinct points.
    pub fn through(p: &ProjPoint, q: &ProjPoint, r: &ProjPoint) -> Result<Circle> {
        // Each point gives one real linear condition on (a, Re b, Im b, d).
        let mut m = DMatrix::zeros(3, 4);
        for (i, pt) in [p, q, r].iter().enumerate() {
            let pt = pt.normalized();
            let cross = pt.a.conj() * pt.b;
            m[(i, 0)] = pt.a.norm_sqr();
            m[(i, 1)] = 2.0 * cross.re;
            m[(i, 2)] = -2.0 * cross.im;
            m[(i, 3)] = pt.b.norm_sqr();
        }
        let ns = linalg::nullspace(&m, 1e-10);
        if ns.ncols() != 1 {
            return Err(Error::Internal(
                "circle through three points is not unique; points coincide".into(),
            ));
        }
        let v = ns.column(0);
        Circle {
            a: v[0],
            b: Complex64::new(v[1], v[2]),
            d: v[3],
        }
        .normalized()
    }

    /// Inversive product of unit-norm circles: 0 at right angles, -cos of
    /// the intersection angle for oriented circles, +1 or -1 at tangency,
    /// beyond 1 in absolute value when disjoint.
    pub fn inversive(&self, other: &Circle) -> f64 {
        (self.b * other.b.conj()).re - 0.5 * (self.a * other.d + other.a * self.d)
    }

    /// Euclidean center and radius; None for lines.
    pub fn center_radius(&self) -> Option<(Complex64, f64)> {
        if self.a.abs() < 1e-12 {
            return None;
        }
        let c = -self.b.conj() / self.a;
        let n = self.norm();
        if n < 0.0 {
            return None;
        }
        Some((c, n.sqrt() / self.a.abs()))
    }

    /// The plane n . X = -offset cutting the unit sphere in this circle
    /// under stereographic projection from the north pole; returns
    /// (n1, n2, n3, offset).
    pub fn sphere_plane(&self) -> [f64; 4] {
        [2.0 * self.b.re, 2.0 * self.b.im, self.a - self.d, self.a + self.d]
    }

    /// Spherical cap cut out by the circle: unit center vector and angular
    /// radius in (0, pi).  The cap is the side the form is negative on.
    pub fn spherical_cap(&self) -> Result<([f64; 3], f64)> {
        let [n1, n2, n3, off] = self.sphere_plane();
        let n = (n1 * n1 + n2 * n2 + n3 * n3).sqrt();
        if n == 0.0 {
            return Err(Error::Internal("degenerate circle".into()));
        }
        let h = -off / n;
        if h.abs() >= 1.0 {
            return Err(Error::Internal("circle does not meet the sphere".into()));
        }
        // The form at a sphere point X is proportional to n . X + off, so
        // the negative side is the cap around -n.
        Ok(([-n1 / n, -n2 / n, -n3 / n], (-h).acos()))
    }

    /// Image of the circle under a Mobius transformation.
    pub fn transformed(&self, m: &Mobius) -> Result<Circle> {
        let i = m.inverse()?;
        // H' = inv(m)^* H inv(m).
        let (a, b, d) = (Complex64::new(self.a, 0.0), self.b, Complex64::new(self.d, 0.0));
        let col0 = [i.m[0][0], i.m[1][0]];
        let col1 = [i.m[0][1], i.m[1][1]];
        let h = |u: &[Complex64; 2], v: &[Complex64; 2]| {
            u[0].conj() * (a * v[0] + b * v[1]) + u[1].conj() * (b.conj() * v[0] + d * v[1])
        };
        Ok(Circle {
            a: h(&col0, &col0).re,
            b: h(&col0, &col1),
            d: h(&col1, &col1).re,
        })
    }
}

/// Unit-sphere position of a boundary point, inverse stereographic from
/// the north pole (infinity lifts to the north pole).
pub fn lift_to_sphere(p: &ProjPoint) -> [f64; 3] {
    let n = p.a.norm_sqr() + p.b.norm_sqr();
    let cross = p.a * p.b.conj();
    [
        2.0 * cross.re / n,
        2.0 * cross.im / n,
        (p.a.norm_sqr() - p.b.norm_sqr()) / n,
    ]
}

fn quaternion_mobius(w: f64, x: f64, y: f64, z: f64) -> Mobius {
    let n = (w * w + x * x + y * y + z * z).sqrt();
    let (w, x, y, z) = (w / n, x / n, y / n, z / n);
    Mobius {
        m: [
            [Complex64::new(w, z), Complex64::new(-y, x)],
            [Complex64::new(y, x), Complex64::new(w, -z)],
        ],
    }
}

/// Rotation of the sphere taking one unit vector to another, as a Mobius
/// transformation of the boundary plane.
pub fn rotation_mobius(from: [f64; 3], to: [f64; 3]) -> Mobius {
    let dot = from[0] * to[0] + from[1] * to[1] + from[2] * to[2];
    let cross = [
        from[1] * to[2] - from[2] * to[1],
        from[2] * to[0] - from[0] * to[2],
        from[0] * to[1] - from[1] * to[0],
    ];
    let w = 1.0 + dot;
    if w < 1e-12 {
        // Antipodal: half turn about any perpendicular axis.
        let axis = if from[0].abs() < 0.9 {
            [0.0, from[2], -from[1]]
        } else {
            [from[2], 0.0, -from[0]]
        };
        return quaternion_mobius(0.0, axis[0], axis[1], axis[2]);
    }
    quaternion_mobius(w, cross[0], cross[1], cross[2])
}

/// Rotation about the vertical axis: multiplication by a phase.
pub fn vertical_rotation_mobius(angle: f64) -> Mobius {
    let h = Complex64::from_polar(1.0, 0.5 * angle);
    Mobius {
        m: [
            [h, Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), h.conj()],
        ],
    }
}

/// Mobius transformation after which the sphere lifts of the given points
/// average to the origin (their conformal barycenter).  Unique up to
/// rotation; at least three distinct points are required.
pub fn centering_mobius(points: &[ProjPoint]) -> Result<Mobius> {
    if points.len() < 3 {
        return Err(Error::Internal("centering needs at least three points".into()));
    }
    let north = [0.0, 0.0, 1.0];
    let mut m = Mobius::identity();
    for _ in 0..400 {
        let mut c = [0.0; 3];
        for p in points {
            let x = lift_to_sphere(&m.apply(p));
            for k in 0..3 {
                c[k] += x[k] / points.len() as f64;
            }
        }
        let norm = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        if norm < 1e-13 {
            return Ok(m);
        }
        let dir = [-c[0] / norm, -c[1] / norm, -c[2] / norm];
        let r = norm.min(0.5);
        let s = ((1.0 + r) / (1.0 - r)).sqrt();
        let scale = Mobius {
            m: [
                [Complex64::new(s, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(1.0 / s, 0.0)],
            ],
        };
        let to_north = rotation_mobius(dir, north);
        let back = rotation_mobius(north, dir);
        m = back.compose(&scale).compose(&to_north).compose(&m);
    }
    Err(Error::Internal("conformal centering did not converge".into()))
}

/// Distance between horoballs at two finite points, of Euclidean diameters
/// d1 and d2: log(|z1 - z2|^2 / (d1 d2)).  Negative when they overlap.
pub fn truncated_length(z1: Complex64, d1: f64, z2: Complex64, d2: f64) -> Result<f64> {
    if d1 <= 0.0 || d2 <= 0.0 {
        return Err(Error::Domain("horoball diameters must be positive".into()));
    }
    let sep = (z1 - z2).norm_sqr();
    if sep == 0.0 {
        return Err(Error::Domain("coincident ideal points".into()));
    }
    Ok((sep / (d1 * d2)).ln())
}

/// Distance between the horoball at infinity of height h and a horoball of
/// diameter d at a finite point: log(h / d).
pub fn truncated_length_inf(h: f64, d: f64) -> Result<f64> {
    if h <= 0.0 || d <= 0.0 {
        return Err(Error::Domain("horoball sizes must be positive".into()));
    }
    Ok((h / d).ln())
}
