//! Dense two-phase simplex used for the max-min feasibility program.
//!
//! The only consumer solves: maximize t subject to A x = b, x >= t 1.
//! Substituting x = y + t 1 with y >= 0 and splitting the free t gives a
//! standard-form LP small enough for a tableau method.  Bland's rule keeps
//! it cycle-free; these systems have at most a few hundred rows.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Solution of the max-min program.
pub(crate) struct MaxMin {
    /// Argmax x (original variables).
    pub x: Vec<f64>,
    /// Optimal value t = min_i x_i.
    pub value: f64,
    /// Dual multiplier per constraint row; certifies optimality, and
    /// infeasibility of strict positivity when value <= 0.
    pub dual: Vec<f64>,
}

const EPS: f64 = 1e-10;

/// Maximize min_i x_i over A x = b.  Errors when the equalities themselves
/// are inconsistent (callers should pre-check rank) or the LP is unbounded.
pub(crate) fn maximize_min_component(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<MaxMin> {
    let (m, n) = a.shape();
    assert_eq!(b.len(), m);
    // Columns: y (n), t+, t-, artificials (m).  Rows scaled to rhs >= 0.
    let nt = n + 2;
    let ncols = nt + m;
    let a1 = a * DVector::from_element(n, 1.0);

    let mut t = DMatrix::zeros(m, ncols + 1);
    let mut sign = vec![1.0f64; m];
    for i in 0..m {
        if b[i] < 0.0 {
            sign[i] = -1.0;
        }
        for j in 0..n {
            t[(i, j)] = sign[i] * a[(i, j)];
        }
        t[(i, n)] = sign[i] * a1[i];
        t[(i, n + 1)] = -sign[i] * a1[i];
        t[(i, nt + i)] = 1.0;
        t[(i, ncols)] = sign[i] * b[i];
    }

    // Phase-2 objective: minimize -t+ + t- (i.e. maximize t).
    let mut cost2 = DVector::zeros(ncols);
    cost2[n] = -1.0;
    cost2[n + 1] = 1.0;
    // Phase-1 objective: minimize the artificial sum.
    let mut cost1 = DVector::zeros(ncols);
    for i in 0..m {
        cost1[nt + i] = 1.0;
    }

    let mut basis: Vec<usize> = (0..m).map(|i| nt + i).collect();

    let phase1 = run(&mut t, &mut basis, &cost1, Some(nt))?;
    if phase1 > EPS.max(1e-9 * b.amax().max(1.0)) {
        return Err(Error::Internal(format!(
            "equality system inconsistent inside LP (phase-1 value {phase1:.3e})"
        )));
    }
    // Pivot any artificial still basic (at zero) out, or mark its row dead.
    for i in 0..m {
        if basis[i] >= nt {
            let mut done = false;
            for j in 0..nt {
                if t[(i, j)].abs() > EPS {
                    pivot(&mut t, &mut basis, i, j);
                    done = true;
                    break;
                }
            }
            if !done {
                // Redundant row: leave the artificial basic at level zero;
                // block it from ever leaving with nonzero value.
            }
        }
    }
    let _ = run(&mut t, &mut basis, &cost2, Some(nt))?;

    // Primal solution.
    let mut u = vec![0.0f64; ncols];
    for (i, &bj) in basis.iter().enumerate() {
        u[bj] = t[(i, ncols)];
    }
    let tval = u[n] - u[n + 1];
    let x: Vec<f64> = (0..n).map(|j| u[j] + tval).collect();

    // Duals from the reduced costs of the artificial columns: for the
    // phase-2 costs (zero on artificials), redcost_j = -pi_i, so
    // pi_i = sum_k cost2[basis_k] * T[k][artificial i].
    let mut dual = vec![0.0f64; m];
    for i in 0..m {
        let mut pi = 0.0;
        for (k, &bj) in basis.iter().enumerate() {
            if cost2[bj] != 0.0 {
                pi += cost2[bj] * t[(k, nt + i)];
            }
        }
        // Dual of original row i carries the sign flip; negate because the
        // solver minimized -t.
        dual[i] = -pi * sign[i];
    }

    Ok(MaxMin {
        x,
        value: tval,
        dual,
    })
}

/// Minimize cost over the current tableau; returns the objective value.
fn run(
    t: &mut DMatrix<f64>,
    basis: &mut [usize],
    cost: &DVector<f64>,
    forbid_from: Option<usize>,
) -> Result<f64> {
    let m = t.nrows();
    let ncols = t.ncols() - 1;
    let limit = 50_000usize;
    for _ in 0..limit {
        // Reduced costs: c_j - pi^T col_j with pi from the basic costs.
        let mut entering = None;
        for j in 0..ncols {
            if let Some(f) = forbid_from {
                if j >= f && !basis.contains(&j) {
                    continue; // artificials may not re-enter
                }
            }
            if basis.contains(&j) {
                continue;
            }
            let mut rc = cost[j];
            for (i, &bj) in basis.iter().enumerate() {
                if cost[bj] != 0.0 {
                    rc -= cost[bj] * t[(i, j)];
                }
            }
            if rc < -EPS {
                entering = Some(j); // Bland: first improving index
                break;
            }
        }
        let Some(j) = entering else {
            let mut val = 0.0;
            for (i, &bj) in basis.iter().enumerate() {
                val += cost[bj] * t[(i, ncols)];
            }
            return Ok(val);
        };
        // Ratio test, Bland ties by smallest basis index.
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let aij = t[(i, j)];
            if aij > EPS {
                let ratio = t[(i, ncols)] / aij;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-12
                            || (ratio < lr + 1e-12 && basis[i] < basis[li])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((i, _)) = leave else {
            return Err(Error::Internal("LP unbounded".into()));
        };
        pivot(t, basis, i, j);
    }
    Err(Error::Internal("simplex iteration limit".into()))
}

fn pivot(t: &mut DMatrix<f64>, basis: &mut [usize], row: usize, col: usize) {
    let m = t.nrows();
    let ncols = t.ncols();
    let p = t[(row, col)];
    for j in 0..ncols {
        t[(row, j)] /= p;
    }
    for i in 0..m {
        if i != row {
            let f = t[(i, col)];
            if f != 0.0 {
                for j in 0..ncols {
                    t[(i, j)] -= f * t[(row, j)];
                }
            }
        }
    }
    basis[row] = col;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sum_constraint() {
        // x1 + x2 + x3 = pi: maximin at x = (pi/3, pi/3, pi/3).
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let b = DVector::from_row_slice(&[std::f64::consts::PI]);
        let r = maximize_min_component(&a, &b).unwrap();
        assert!((r.value - std::f64::consts::PI / 3.0).abs() < 1e-9);
        for &x in &r.x {
            assert!((x - std::f64::consts::PI / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn forced_negative_component() {
        // x1 + x2 = 2, x1 - x2 = 4 forces x2 = -1: maximin value -1, and the
        // dual certifies it.
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]);
        let b = DVector::from_row_slice(&[2.0, 4.0]);
        let r = maximize_min_component(&a, &b).unwrap();
        assert!((r.value + 1.0).abs() < 1e-9);
        assert!((r.x[0] - 3.0).abs() < 1e-9 && (r.x[1] + 1.0).abs() < 1e-9);
        // Certificate: y^T A >= 0 componentwise and y^T b = value.
        let y = DVector::from_vec(r.dual.clone());
        let yta = a.transpose() * &y;
        assert!(yta.min() > -1e-9, "y^T A = {yta:?}");
        assert!((y.dot(&b) - r.value).abs() < 1e-8);
    }

    #[test]
    fn asymmetric_optimum() {
        // 2 x1 + x2 = 4: maximin x1 = x2 = 4/3.
        let a = DMatrix::from_row_slice(1, 2, &[2.0, 1.0]);
        let b = DVector::from_row_slice(&[4.0]);
        let r = maximize_min_component(&a, &b).unwrap();
        assert!((r.value - 4.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn redundant_rows_ok() {
        // Duplicated constraint must not break phase 1.
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_row_slice(&[3.0, 3.0]);
        let r = maximize_min_component(&a, &b).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dual_feasibility_on_random_systems() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = rng.gen_range(1..4usize);
            let n = rng.gen_range(m..m + 4);
            let a = DMatrix::from_fn(m, n, |_, _| rng.gen_range(-2.0..2.0f64));
            let x0 = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..2.0f64));
            let b = &a * &x0; // guaranteed consistent
            let Ok(r) = maximize_min_component(&a, &b) else {
                continue; // unbounded is possible here; skip
            };
            // Optimality: value >= min component of the witness x0.
            let wmin = x0.min();
            assert!(r.value >= wmin - 1e-7, "value {} < witness {}", r.value, wmin);
            // Duals: A^T y >= 0, y^T b = value (strong duality).
            let y = DVector::from_vec(r.dual.clone());
            let yta = a.transpose() * &y;
            assert!(yta.min() > -1e-7);
            assert!((y.dot(&b) - r.value).abs() < 1e-6);
        }
    }
}
