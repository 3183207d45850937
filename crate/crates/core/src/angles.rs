//! Dihedral-angle assignments and per-edge angle targets on a complex.
//!
//! An assignment gives each tetrahedron its three opposite-edge angles; the
//! target prescribes what the angles around each edge class must total:
//! 2 pi at interior edges (smooth gluing), the desired dihedral angle at
//! boundary edges, and pi at subdivision diagonals that must end up flat.

use crate::complex::{IdealComplex, EDGE_LABEL};
use crate::error::{Error, Result};
use crate::loba::TetAngles;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// One [`TetAngles`] per tetrahedron of a complex.
#[derive(Debug, Clone)]
pub struct AngleAssignment {
    angles: Vec<TetAngles>,
}

impl AngleAssignment {
    pub fn new(cx: &IdealComplex, angles: Vec<TetAngles>) -> Result<Self> {
        if angles.len() != cx.num_tets() {
            return Err(Error::Mismatch(format!(
                "{} angle triples for {} tetrahedra",
                angles.len(),
                cx.num_tets()
            )));
        }
        Ok(Self { angles })
    }

    /// Build from a flat vector of 3 n angles (labels a, b, c per tet).
    pub fn from_flat(cx: &IdealComplex, x: &[f64]) -> Result<Self> {
        if x.len() != 3 * cx.num_tets() {
            return Err(Error::Mismatch(format!(
                "{} angles for {} tetrahedra",
                x.len(),
                cx.num_tets()
            )));
        }
        let angles = x
            .chunks_exact(3)
            .map(|c| TetAngles::new(c[0], c[1], c[2]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { angles })
    }

    pub fn tets(&self) -> &[TetAngles] {
        &self.angles
    }

    pub fn flat(&self) -> Vec<f64> {
        self.angles.iter().flat_map(|t| t.as_array()).collect()
    }

    /// Angle carried by an edge slot of a tetrahedron.
    pub fn at_slot(&self, tet: usize, slot: usize) -> f64 {
        self.angles[tet].angle(EDGE_LABEL[slot])
    }
}

/// Sum of assigned angles around each edge class.
pub fn edge_angle_totals(cx: &IdealComplex, asg: &AngleAssignment) -> Vec<f64> {
    cx.edge_classes
        .iter()
        .map(|ec| ec.slots.iter().map(|&(t, s)| asg.at_slot(t, s)).sum())
        .collect()
}

/// Prescribed angle total per edge class.
#[derive(Debug, Clone)]
pub struct AngleTarget {
    pub totals: Vec<f64>,
}

impl AngleTarget {
    pub fn from_totals(totals: Vec<f64>) -> Self {
        Self { totals }
    }

    /// 2 pi at interior edges; boundary targets from the given map of edge
    /// class id to dihedral angle.  Every boundary class must be covered.
    pub fn with_boundary(cx: &IdealComplex, boundary: &BTreeMap<usize, f64>) -> Result<Self> {
        let mut totals = Vec::with_capacity(cx.edge_classes.len());
        for (id, ec) in cx.edge_classes.iter().enumerate() {
            if ec.interior {
                if boundary.contains_key(&id) {
                    return Err(Error::Mismatch(format!(
                        "edge class {id} is interior; boundary target not applicable"
                    )));
                }
                totals.push(2.0 * PI);
            } else {
                let &v = boundary.get(&id).ok_or_else(|| {
                    Error::Mismatch(format!("no target for boundary edge class {id}"))
                })?;
                totals.push(v);
            }
        }
        Ok(Self { totals })
    }

    /// The same dihedral angle at every boundary edge, 2 pi inside.
    pub fn uniform_boundary(cx: &IdealComplex, dihedral: f64) -> Self {
        let totals = cx
            .edge_classes
            .iter()
            .map(|ec| if ec.interior { 2.0 * PI } else { dihedral })
            .collect();
        Self { totals }
    }

    /// Range checks and the per-vertex feasibility identity.  Returns
    /// warnings for unusual but admissible targets (flat boundary edges,
    /// interior cone angles other than 2 pi).
    pub fn validate(&self, cx: &IdealComplex) -> Result<Vec<String>> {
        if self.totals.len() != cx.edge_classes.len() {
            return Err(Error::Mismatch(format!(
                "{} targets for {} edge classes",
                self.totals.len(),
                cx.edge_classes.len()
            )));
        }
        let mut warnings = Vec::new();
        for (id, (&v, ec)) in self.totals.iter().zip(&cx.edge_classes).enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidAngles(format!(
                    "target at edge class {id} is not finite"
                )));
            }
            if ec.interior {
                if v <= 0.0 || v >= 4.0 * PI {
                    return Err(Error::InvalidAngles(format!(
                        "interior target {v} at edge class {id} outside (0, 4 pi)"
                    )));
                }
                if (v - 2.0 * PI).abs() > 1e-12 {
                    warnings.push(format!(
                        "edge class {id}: interior target {v} is a cone angle, not 2 pi"
                    ));
                }
            } else {
                if v <= 0.0 || v > PI + 1e-12 {
                    return Err(Error::InvalidAngles(format!(
                        "boundary target {v} at edge class {id} outside (0, pi]"
                    )));
                }
                if (v - PI).abs() <= 1e-12 {
                    warnings.push(format!(
                        "edge class {id}: boundary target pi (edge will be flat)"
                    ));
                }
            }
        }
        // Per-vertex identity: targets around a vertex must total pi times
        // the number of tetrahedron corners there; otherwise no assignment
        // with per-tet sums pi can meet them.
        for v in 0..cx.vertex_classes.len() {
            let mut sum = 0.0;
            for (id, ec) in cx.edge_classes.iter().enumerate() {
                let mult = usize::from(ec.endpoints.0 == v) + usize::from(ec.endpoints.1 == v);
                sum += mult as f64 * self.totals[id];
            }
            let expect = PI * cx.corner_count(v) as f64;
            if (sum - expect).abs() > 1e-9 * expect.max(1.0) {
                return Err(Error::InvalidAngles(format!(
                    "targets around vertex class {v} total {sum}, need {expect}; no angle assignment can satisfy them"
                )));
            }
        }
        Ok(warnings)
    }
}

/// Residuals of an assignment against a target.
#[derive(Debug, Clone)]
pub struct ThetaReport {
    pub ok: bool,
    pub max_residual: f64,
    /// Per edge class: total minus target.
    pub residuals: Vec<f64>,
}

/// Compare realized edge totals with the target.
pub fn validate_theta(
    cx: &IdealComplex,
    asg: &AngleAssignment,
    target: &AngleTarget,
    tol: f64,
) -> Result<ThetaReport> {
    if target.totals.len() != cx.edge_classes.len() {
        return Err(Error::Mismatch(format!(
            "{} targets for {} edge classes",
            target.totals.len(),
            cx.edge_classes.len()
        )));
    }
    let totals = edge_angle_totals(cx, asg);
    let residuals: Vec<f64> = totals
        .iter()
        .zip(&target.totals)
        .map(|(t, g)| t - g)
        .collect();
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(ThetaReport {
        ok: max_residual <= tol,
        max_residual,
        residuals,
    })
}
