//! Truncated boundary geometry: shear shifts across boundary edges,
//! decorated edge lengths, and the recovery of lengths from volume
//! sensitivities.
//!
//! A decoration (one horoball per ideal vertex) assigns every edge a
//! truncated length.  Changing the horoballs moves all lengths at a vertex
//! by a common amount, so only the class of lengths modulo those moves has
//! geometric content; [`LengthClass`] is that quotient.  The shift of a
//! boundary edge is an alternating half-sum of the four lengths around its
//! quadrilateral and is decoration-independent.

use crate::angles::AngleTarget;
use crate::complex::IdealComplex;
use crate::error::{Error, Result};
use crate::geom::{truncated_length, truncated_length_inf, Developed, Mobius};
use crate::linalg;
use crate::solver;
use nalgebra::{DMatrix, DVector};

/// Vertex classes (a, b, c_plus, c_minus) around a boundary edge class:
/// the edge runs a to b, c_plus is the third corner of the positive side
/// face, c_minus of the negative one.
pub fn quad_corners(cx: &IdealComplex, class: usize) -> Result<(usize, usize, usize, usize)> {
    let ec = &cx.edge_classes[class];
    let sides = ec
        .sides
        .ok_or_else(|| Error::Mismatch(format!("edge class {class} is interior")))?;
    let corner = |bf: usize, pos: usize| {
        let f = &cx.boundary_faces[bf];
        cx.vertex_class_of[f.tet][f.corners[pos]]
    };
    let (bfp, kp) = sides.positive;
    let (bfm, km) = sides.negative;
    Ok((
        corner(bfp, kp),
        corner(bfp, (kp + 1) % 3),
        corner(bfp, (kp + 2) % 3),
        corner(bfm, (km + 2) % 3),
    ))
}

/// Rows: one per boundary edge class (ids returned alongside); columns: all
/// edge classes.  Each adjacent boundary face contributes +1/2 on the side
/// two steps past the edge and -1/2 on the side one step past it.
pub fn shift_matrix(cx: &IdealComplex) -> (DMatrix<f64>, Vec<usize>) {
    let rows: Vec<usize> = (0..cx.edge_classes.len())
        .filter(|&e| !cx.edge_classes[e].interior)
        .collect();
    let mut s = DMatrix::zeros(rows.len(), cx.edge_classes.len());
    for (r, &e) in rows.iter().enumerate() {
        let sides = cx.edge_classes[e].sides.unwrap();
        for (bf, k) in [sides.positive, sides.negative] {
            let f = &cx.boundary_faces[bf];
            s[(r, f.side_classes[(k + 2) % 3])] += 0.5;
            s[(r, f.side_classes[(k + 1) % 3])] -= 0.5;
        }
    }
    (s, rows)
}

/// Shifts of all boundary edge classes from truncated lengths, as a full
/// per-class vector (zero at interior classes).
pub fn lengths_to_shifts(cx: &IdealComplex, lengths: &[f64]) -> Result<Vec<f64>> {
    if lengths.len() != cx.edge_classes.len() {
        return Err(Error::Mismatch(format!(
            "expected {} lengths, got {}",
            cx.edge_classes.len(),
            lengths.len()
        )));
    }
    let (s, rows) = shift_matrix(cx);
    let l = DVector::from_column_slice(lengths);
    let d = s * l;
    let mut out = vec![0.0; cx.edge_classes.len()];
    for (r, &e) in rows.iter().enumerate() {
        out[e] = d[r];
    }
    Ok(out)
}

/// A set of truncated lengths realizing the given boundary shifts, when one
/// exists; minimum-norm representative.  Interior entries of `shifts` are
/// ignored.
pub fn shifts_to_lengths(cx: &IdealComplex, shifts: &[f64]) -> Result<Vec<f64>> {
    if shifts.len() != cx.edge_classes.len() {
        return Err(Error::Mismatch(format!(
            "expected {} shifts, got {}",
            cx.edge_classes.len(),
            shifts.len()
        )));
    }
    let (s, rows) = shift_matrix(cx);
    let d = DVector::from_iterator(rows.len(), rows.iter().map(|&e| shifts[e]));
    let l = linalg::lstsq(&s, &d);
    let residual = (&s * &l - &d).amax();
    if residual > 1e-8 * d.amax().max(1.0) {
        return Err(Error::Mismatch(format!(
            "shift data is not realizable by lengths (residual {residual:.3e})"
        )));
    }
    Ok(l.iter().cloned().collect())
}

/// Edge lengths modulo horoball moves: adding t_v at a vertex subtracts
/// t_v from each incident edge end.  Stored as the orthogonal projection
/// away from the move subspace.
#[derive(Debug, Clone)]
pub struct LengthClass {
    canonical: Vec<f64>,
}

impl LengthClass {
    pub fn new(cx: &IdealComplex, lengths: &[f64]) -> Result<Self> {
        let e = cx.edge_classes.len();
        if lengths.len() != e {
            return Err(Error::Mismatch(format!(
                "expected {e} lengths, got {}",
                lengths.len()
            )));
        }
        let v = cx.vertex_classes.len();
        let mut k = DMatrix::zeros(e, v);
        for (id, ec) in cx.edge_classes.iter().enumerate() {
            let (p, q) = ec.endpoints;
            k[(id, p)] += 1.0;
            k[(id, q)] += 1.0;
        }
        let l = DVector::from_column_slice(lengths);
        let coeffs = linalg::lstsq(&k, &l);
        let canonical = l - k * coeffs;
        Ok(Self { canonical: canonical.iter().cloned().collect() })
    }

    pub fn canonical(&self) -> &[f64] {
        &self.canonical
    }

    pub fn max_difference(&self, other: &LengthClass) -> f64 {
        self.canonical
            .iter()
            .zip(&other.canonical)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Truncated lengths of every edge class of a developed complex under the
/// unit decoration (diameter 1 horoballs, height 1 at infinity).  Only the
/// induced [`LengthClass`] is decoration-free.
pub fn geometric_lengths(cx: &IdealComplex, dev: &Developed) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(cx.edge_classes.len());
    for ec in &cx.edge_classes {
        let (p, q) = ec.endpoints;
        let zp = dev.vertex_positions[p].to_z();
        let zq = dev.vertex_positions[q].to_z();
        let l = match (zp, zq) {
            (Some(zp), Some(zq)) => truncated_length(zp, 1.0, zq, 1.0)?,
            (None, Some(_)) | (Some(_), None) => truncated_length_inf(1.0, 1.0)?,
            (None, None) => {
                return Err(Error::Develop(
                    "two vertex classes placed at infinity".into(),
                ))
            }
        };
        out.push(l);
    }
    Ok(out)
}

/// Shift of every boundary edge class read off the developed picture: send
/// the edge ends and the positive corner to 0, infinity, 1; the shift is
/// log of the image of the negative corner.  Full per-class vector, zero at
/// interior classes.
pub fn boundary_shifts(cx: &IdealComplex, dev: &Developed) -> Result<Vec<f64>> {
    let mut out = vec![0.0; cx.edge_classes.len()];
    for class in 0..cx.edge_classes.len() {
        if cx.edge_classes[class].interior {
            continue;
        }
        let (a, b, cp, cm) = quad_corners(cx, class)?;
        let pa = &dev.vertex_positions[a];
        let pb = &dev.vertex_positions[b];
        let pp = &dev.vertex_positions[cp];
        let pm = &dev.vertex_positions[cm];
        // to_standard sends its arguments to 0, 1, infinity.
        let m = Mobius::to_standard(pa, pp, pb)?;
        let image = m.apply(pm).to_z().ok_or_else(|| {
            Error::Develop(format!("degenerate quadrilateral at edge class {class}"))
        })?;
        let r = image.norm();
        if r <= 0.0 {
            return Err(Error::Develop(format!(
                "degenerate quadrilateral at edge class {class}"
            )));
        }
        out[class] = r.ln();
    }
    Ok(out)
}

/// Edge lengths from volume sensitivities: at a critical point of the
/// volume the gradient is a combination of the constraint rows, and the
/// multiplier on each edge row is -L/2 for that edge's length.  Defined up
/// to horoball moves; compare as [`LengthClass`].
pub fn lengths_from_schlafli(
    cx: &IdealComplex,
    target: &AngleTarget,
    asg: &crate::angles::AngleAssignment,
) -> Result<Vec<f64>> {
    let (a, _, _) = solver::constraint_system(cx, target);
    let gh = solver::volume_grad_hess(asg)?;
    let n = a.ncols();
    let mut g = DVector::zeros(n);
    for (t, (gt, _)) in gh.iter().enumerate() {
        for l in 0..3 {
            g[3 * t + l] = gt[l];
        }
    }
    let at = a.transpose();
    let lambda = linalg::lstsq(&at, &g);
    let residual = (&at * &lambda - &g).amax();
    if residual > 1e-6 * g.amax().max(1.0) {
        return Err(Error::Mismatch(format!(
            "assignment is not a critical point (gradient residual {residual:.3e})"
        )));
    }
    let f = cx.num_tets();
    Ok((0..cx.edge_classes.len()).map(|e| -2.0 * lambda[f + e]).collect())
}
