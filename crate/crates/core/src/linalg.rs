//! Small dense linear-algebra helpers shared by the solver and boundary
//! modules.

use nalgebra::{DMatrix, DVector};

/// Orthonormal basis (columns) of the null space of `a`.
pub(crate) fn nullspace(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let (m, n) = a.shape();
    // Thin SVD of a wide matrix omits the trailing right singular vectors;
    // pad with zero rows to force a full V.
    let work = if m < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("SVD with V requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let tol = rel_tol * smax.max(1.0);
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= tol {
            cols.push(v_t.row(i).transpose());
        }
    }
    let mut z = DMatrix::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        z.set_column(j, c);
    }
    z
}

/// Minimum-norm least-squares solution of a x = b.
pub(crate) fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    a.clone()
        .svd(true, true)
        .solve(b, 1e-13)
        .expect("SVD solve")
}
