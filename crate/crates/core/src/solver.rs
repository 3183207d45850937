//! Volume maximization over the polytope of angle assignments.
//!
//! Variables are the 3 f opposite-edge angles; linear constraints fix each
//! tetrahedron's angle sum to pi and each edge class's total to its target.
//! The objective, the sum of Lobachevsky volumes, is strictly concave on
//! that polytope, so the maximizer is found by a Newton iteration in an
//! orthonormal basis of the constraint null space, with a line search that
//! keeps every angle strictly inside (0, pi).
//!
//! The unique critical point is the complete structure: at it the signed
//! log-shear around every interior edge vanishes, which is what
//! [`interior_shear_residuals`] measures.

use crate::angles::{edge_angle_totals, AngleAssignment, AngleTarget};
use crate::complex::{enumerate_circuits, Contractibility, IdealComplex, EDGE_LABEL};
use crate::error::{Error, Result};
use crate::linalg;
use crate::loba::{tet_volume, tet_volume_grad_hess, TetAngles};
use crate::simplex;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// Tuning knobs for [`solve_structure`].
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Sup-norm threshold on the reduced gradient.
    pub grad_tol: f64,
    /// Iteration cap before degeneracy classification.
    pub max_iters: usize,
    /// Angles are confined to [guard, pi - guard] during the search.
    pub angle_guard: f64,
    /// Threshold for naming a degeneracy (circuit sums, collapsing angles).
    pub degeneracy_tol: f64,
    /// Length cap when scanning circuits during classification.
    pub circuit_max_len: usize,
    /// Record one [`IterTrace`] per Newton step.
    pub trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            max_iters: 200,
            angle_guard: 1e-8,
            degeneracy_tol: 1e-6,
            circuit_max_len: crate::complex::DEFAULT_CIRCUIT_MAX_LEN,
            trace: false,
        }
    }
}

/// One accepted step of the maximizer.
#[derive(Debug, Clone, Copy)]
pub struct IterTrace {
    pub iteration: usize,
    pub volume: f64,
    pub grad_norm: f64,
    pub step: f64,
}

/// Why the maximizer does not exist in the open polytope.
#[derive(Debug, Clone, PartialEq)]
pub enum Degeneracy {
    /// A contractible dual circuit whose exterior angles total 2 pi instead
    /// of exceeding it; the tetrahedra along it flatten.
    CircuitCollapse { edges: Vec<usize>, exterior_sum: f64 },
    /// A boundary edge whose realized dihedral angle collapses to 0 or pi.
    BoundaryCollapse { edge: usize, total: f64 },
    /// A single tetrahedron angle collapsing to 0.
    AngleCollapse { tet: usize, label: usize, value: f64 },
}

/// Exit state of the solver.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveStatus {
    Converged,
    Degenerate(Degeneracy),
    IterLimit,
}

/// Result of [`solve_structure`].
#[derive(Debug, Clone)]
pub struct SolvedStructure {
    pub status: SolveStatus,
    /// Final iterate; absent when the target admits no strictly positive
    /// assignment at all (degeneracy detected before iterating).
    pub assignment: Option<AngleAssignment>,
    /// Volume at the final iterate.
    pub volume: Option<f64>,
    pub iterations: usize,
    /// Sup norm of the reduced gradient at exit; infinite when no iterate.
    pub grad_norm: f64,
    /// Warnings from target validation (flat edges, cone angles).
    pub warnings: Vec<String>,
    /// Per-step records; populated when [`SolverOptions::trace`] is set.
    pub trace: Vec<IterTrace>,
}

/// Rows: one angle-sum row per tetrahedron, one total row per edge class.
pub(crate) fn constraint_system(
    cx: &IdealComplex,
    target: &AngleTarget,
) -> (DMatrix<f64>, DVector<f64>, Vec<String>) {
    let f = cx.num_tets();
    let e = cx.edge_classes.len();
    let n = 3 * f;
    let mut a = DMatrix::zeros(f + e, n);
    let mut b = DVector::zeros(f + e);
    let mut labels = Vec::with_capacity(f + e);
    for t in 0..f {
        for l in 0..3 {
            a[(t, 3 * t + l)] = 1.0;
        }
        b[t] = PI;
        labels.push(format!("tet {t} angle sum"));
    }
    for (id, ec) in cx.edge_classes.iter().enumerate() {
        let row = f + id;
        for &(t, s) in &ec.slots {
            a[(row, 3 * t + EDGE_LABEL[s])] += 1.0;
        }
        b[row] = target.totals[id];
        labels.push(format!(
            "{} edge class {id} total",
            if ec.interior { "interior" } else { "boundary" }
        ));
    }
    (a, b, labels)
}

/// Orthonormal basis of admissible angle variations (constraint null space),
/// as column vectors of length 3 f.
pub fn tangent_basis(cx: &IdealComplex) -> Vec<Vec<f64>> {
    let target = AngleTarget::from_totals(vec![0.0; cx.edge_classes.len()]);
    let (a, _, _) = constraint_system(cx, &target);
    let z = linalg::nullspace(&a, 1e-12);
    (0..z.ncols()).map(|j| z.column(j).iter().cloned().collect()).collect()
}

/// Consistency check plus the max-min LP over the constraint system.
fn lp_start(cx: &IdealComplex, target: &AngleTarget) -> Result<(simplex::MaxMin, Vec<String>)> {
    let (a, b, labels) = constraint_system(cx, target);

    // Consistency first: an inconsistent system yields a row combination
    // with y^T A = 0 but y^T b != 0.
    let x_ls = linalg::lstsq(&a, &b);
    let r = &b - &a * &x_ls;
    let scale = b.amax().max(1.0);
    if r.amax() > 1e-9 * scale {
        let certificate = labels
            .iter()
            .zip(r.iter())
            .filter(|(_, &v)| v.abs() > 1e-12 * scale)
            .map(|(l, &v)| (l.clone(), v))
            .collect();
        return Err(Error::Infeasible {
            reason: "edge targets are inconsistent with the tetrahedron angle sums".into(),
            certificate,
        });
    }
    let lp = simplex::maximize_min_component(&a, &b)?;
    Ok((lp, labels))
}

fn infeasibility_error(lp: &simplex::MaxMin, labels: &[String]) -> Error {
    let certificate = labels
        .iter()
        .zip(lp.dual.iter())
        .filter(|(_, &v)| v.abs() > 1e-12)
        .map(|(l, &v)| (l.clone(), v))
        .collect();
    Error::Infeasible {
        reason: format!(
            "no strictly positive angle assignment; best smallest angle is {:.3e}",
            lp.value
        ),
        certificate,
    }
}

/// A strictly positive angle assignment meeting the targets, from the
/// max-min linear program.  Returns the LP value (the smallest angle) too.
pub fn feasible_start(cx: &IdealComplex, target: &AngleTarget) -> Result<(AngleAssignment, f64)> {
    let (lp, labels) = lp_start(cx, target)?;
    if lp.value <= 1e-9 {
        return Err(infeasibility_error(&lp, &labels));
    }
    Ok((AngleAssignment::from_flat(cx, &lp.x)?, lp.value))
}

fn per_tet_volume_serial(tets: &[TetAngles]) -> f64 {
    tets.iter().map(tet_volume).sum()
}

#[cfg(feature = "parallel")]
fn per_tet_volume_parallel(tets: &[TetAngles]) -> f64 {
    use rayon::prelude::*;
    tets.par_iter().map(tet_volume).sum()
}

/// Total volume of an assignment.
pub fn total_volume(asg: &AngleAssignment) -> f64 {
    #[cfg(feature = "parallel")]
    {
        per_tet_volume_parallel(asg.tets())
    }
    #[cfg(not(feature = "parallel"))]
    {
        per_tet_volume_serial(asg.tets())
    }
}

/// Serial evaluation regardless of features; benchmark baseline.
pub fn total_volume_serial(asg: &AngleAssignment) -> f64 {
    per_tet_volume_serial(asg.tets())
}

fn grad_hess_serial(tets: &[TetAngles]) -> Result<Vec<([f64; 3], [f64; 3])>> {
    tets.iter().map(tet_volume_grad_hess).collect()
}

#[cfg(feature = "parallel")]
fn grad_hess_parallel(tets: &[TetAngles]) -> Result<Vec<([f64; 3], [f64; 3])>> {
    use rayon::prelude::*;
    tets.par_iter().map(tet_volume_grad_hess).collect()
}

/// Per-tet gradient and diagonal Hessian of the volume.
pub fn volume_grad_hess(asg: &AngleAssignment) -> Result<Vec<([f64; 3], [f64; 3])>> {
    #[cfg(feature = "parallel")]
    {
        grad_hess_parallel(asg.tets())
    }
    #[cfg(not(feature = "parallel"))]
    {
        grad_hess_serial(asg.tets())
    }
}

/// Serial variant; benchmark baseline.
pub fn volume_grad_hess_serial(asg: &AngleAssignment) -> Result<Vec<([f64; 3], [f64; 3])>> {
    grad_hess_serial(asg.tets())
}

/// Signed log-shear total around each interior edge class; all zero exactly
/// at the complete structure.
pub fn interior_shear_residuals(cx: &IdealComplex, asg: &AngleAssignment) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for (id, ec) in cx.edge_classes.iter().enumerate() {
        if !ec.interior {
            continue;
        }
        let mut sum = 0.0;
        for &(t, s) in &ec.slots {
            let l = EDGE_LABEL[s];
            let ang = asg.tets()[t].as_array();
            sum += ang[(l + 1) % 3].sin().ln() - ang[(l + 2) % 3].sin().ln();
        }
        out.push((id, sum));
    }
    out
}

/// Maximize total volume subject to the angle constraints, starting from
/// the max-min interior point.
///
/// Targets whose polytope has empty interior but whose closure is nonempty
/// are reported as [`SolveStatus::Degenerate`] when a collapsing circuit or
/// boundary edge explains them; genuinely unsatisfiable targets come back
/// as [`Error::Infeasible`] with a dual certificate.
pub fn solve_structure(
    cx: &IdealComplex,
    target: &AngleTarget,
    opts: &SolverOptions,
) -> Result<SolvedStructure> {
    let warnings = target.validate(cx)?;
    let (lp, labels) = lp_start(cx, target)?;
    if lp.value <= 1e-9 {
        if lp.value.abs() <= opts.degeneracy_tol {
            if let Some(d) = classify_target_circuits(cx, target, opts) {
                return Ok(SolvedStructure {
                    status: SolveStatus::Degenerate(d),
                    assignment: None,
                    volume: None,
                    iterations: 0,
                    grad_norm: f64::INFINITY,
                    warnings,
                    trace: Vec::new(),
                });
            }
        }
        return Err(infeasibility_error(&lp, &labels));
    }
    let start = AngleAssignment::from_flat(cx, &lp.x)?;
    solve_from(cx, target, start, opts, warnings)
}

/// Same, from a caller-provided feasible start.
pub fn solve_structure_from(
    cx: &IdealComplex,
    target: &AngleTarget,
    start: AngleAssignment,
    opts: &SolverOptions,
) -> Result<SolvedStructure> {
    let warnings = target.validate(cx)?;
    solve_from(cx, target, start, opts, warnings)
}

fn solve_from(
    cx: &IdealComplex,
    target: &AngleTarget,
    start: AngleAssignment,
    opts: &SolverOptions,
    warnings: Vec<String>,
) -> Result<SolvedStructure> {
    let (a, b, _) = constraint_system(cx, target);
    let n = a.ncols();
    let mut x = DVector::from_vec(start.flat());
    let res0 = (&a * &x - &b).amax();
    if res0 > 1e-7 {
        return Err(Error::Mismatch(format!(
            "start does not satisfy the constraints (residual {res0:.3e})"
        )));
    }
    let z = linalg::nullspace(&a, 1e-12);
    let k = z.ncols();

    let guard = opts.angle_guard;
    let mut grad_norm = f64::INFINITY;
    let mut iterations = 0;
    let mut trace = Vec::new();

    for it in 0..opts.max_iters {
        iterations = it;
        let asg = AngleAssignment::from_flat(cx, x.as_slice())?;
        let gh = volume_grad_hess(&asg)?;
        let mut g = DVector::zeros(n);
        let mut h = DVector::zeros(n);
        for (t, (gt, ht)) in gh.iter().enumerate() {
            for l in 0..3 {
                g[3 * t + l] = gt[l];
                h[3 * t + l] = ht[l];
            }
        }
        if k == 0 {
            grad_norm = 0.0;
            break;
        }
        let gz = z.transpose() * &g;
        grad_norm = gz.amax();
        if it == 0 && opts.trace {
            trace.push(IterTrace {
                iteration: 0,
                volume: total_volume(&asg),
                grad_norm,
                step: 0.0,
            });
        }
        if grad_norm <= opts.grad_tol {
            break;
        }
        // Reduced Hessian Z^T diag(h) Z; negative definite on the polytope.
        let hz_cols = DMatrix::from_fn(n, k, |i, j| h[i] * z[(i, j)]);
        let hz = z.transpose() * hz_cols;
        let neg = -hz;
        let Some(chol) = neg.cholesky() else {
            break;
        };
        let dz = chol.solve(&gz);
        let d = &z * dz;

        // Largest step keeping all angles inside the guard band.
        let mut s_max = f64::INFINITY;
        for i in 0..n {
            if d[i] > 0.0 {
                s_max = s_max.min((PI - guard - x[i]) / d[i]);
            } else if d[i] < 0.0 {
                s_max = s_max.min((guard - x[i]) / d[i]);
            }
        }
        let mut s = (0.99 * s_max).min(1.0);
        let v0 = total_volume(&asg);
        let slope = g.dot(&d);
        // Near the maximum the predicted gain s*slope drops below the
        // rounding noise of summed volumes; without the allowance the test
        // becomes a coin flip on noise and the iterate freezes just above
        // grad_tol.
        let noise = 1e-13 * v0.abs().max(1.0);
        let mut accepted = false;
        while s > 1e-14 {
            let xs = &x + s * &d;
            if let Ok(trial) = AngleAssignment::from_flat(cx, xs.as_slice()) {
                let v = total_volume(&trial);
                if v >= v0 + 1e-4 * s * slope - noise {
                    x = xs;
                    accepted = true;
                    if opts.trace {
                        trace.push(IterTrace {
                            iteration: it + 1,
                            volume: v,
                            grad_norm,
                            step: s,
                        });
                    }
                    break;
                }
            }
            s *= 0.5;
        }
        if !accepted {
            break;
        }
    }

    let assignment = AngleAssignment::from_flat(cx, x.as_slice())?;
    let volume = total_volume(&assignment);
    let converged = grad_norm <= opts.grad_tol;
    let status = if converged {
        SolveStatus::Converged
    } else {
        match classify_degeneracy(cx, target, &assignment, opts) {
            Some(d) => SolveStatus::Degenerate(d),
            None => SolveStatus::IterLimit,
        }
    };
    Ok(SolvedStructure {
        status,
        assignment: Some(assignment),
        volume: Some(volume),
        iterations: iterations + 1,
        grad_norm,
        warnings,
        trace,
    })
}

/// Scan known-contractible circuits for exterior angle sums at or below
/// 2 pi.  Elementary circuits are skipped; their sums are pinned to 2 pi by
/// the vertex identities.
fn classify_target_circuits(
    cx: &IdealComplex,
    target: &AngleTarget,
    opts: &SolverOptions,
) -> Option<Degeneracy> {
    let tol = opts.degeneracy_tol;
    let report = enumerate_circuits(cx, opts.circuit_max_len, &[]);
    for c in &report.circuits {
        if c.contractibility == Contractibility::Unknown || c.elementary.is_some() {
            continue;
        }
        let exterior_sum: f64 = c.edges.iter().map(|&e| PI - target.totals[e]).sum();
        if exterior_sum - 2.0 * PI <= tol {
            return Some(Degeneracy::CircuitCollapse {
                edges: c.edges.clone(),
                exterior_sum,
            });
        }
    }
    None
}

/// Name the degeneracy responsible for non-convergence: first look for a
/// contractible circuit whose exterior angles total 2 pi, then for
/// collapsing boundary dihedral angles, then for collapsing tet angles.
fn classify_degeneracy(
    cx: &IdealComplex,
    target: &AngleTarget,
    asg: &AngleAssignment,
    opts: &SolverOptions,
) -> Option<Degeneracy> {
    let tol = opts.degeneracy_tol;
    if let Some(d) = classify_target_circuits(cx, target, opts) {
        return Some(d);
    }
    let totals = edge_angle_totals(cx, asg);
    for (id, ec) in cx.edge_classes.iter().enumerate() {
        if ec.interior {
            continue;
        }
        let t = totals[id];
        // Classes prescribed flat (target at 0 or pi, e.g. fan diagonals)
        // are flat by design, not degenerations.
        let prescribed_flat =
            target.totals[id] >= PI - 1e-9 || target.totals[id] <= 1e-9;
        if !prescribed_flat && (t <= tol || t >= PI - tol) {
            return Some(Degeneracy::BoundaryCollapse { edge: id, total: t });
        }
    }
    for (t, ta) in asg.tets().iter().enumerate() {
        for l in 0..3 {
            let v = ta.angle(l);
            if v <= tol {
                return Some(Degeneracy::AngleCollapse { tet: t, label: l, value: v });
            }
        }
    }
    None
}
