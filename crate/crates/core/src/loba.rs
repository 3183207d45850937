//! Lobachevsky function and ideal tetrahedron volume.
//!
//! This module provides:
//! - [`lobachevsky`]: the Lobachevsky function L(theta) = -int_0^theta log|2 sin u| du
//! - [`lobachevsky_deriv`]: its derivative -log|2 sin theta|
//! - [`TetAngles`]: validated dihedral angles of an ideal tetrahedron
//! - [`tet_volume`], [`tet_volume_grad_hess`]: hyperbolic volume and derivatives
//!
//! L is odd, pi-periodic and satisfies the duplication identity
//! L(2 theta) = 2 L(theta) + 2 L(theta + pi/2).  The volume of an ideal
//! tetrahedron with dihedral angles (a, b, c), a + b + c = pi, is
//! L(a) + L(b) + L(c); it is strictly concave on that simplex.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Angles closer than this to 0 or pi are rejected by derivative-based ops.
pub const ANGLE_GUARD: f64 = 1e-9;

/// Tolerance on the angle sum of a tetrahedron at construction.
pub const ANGLE_SUM_TOL: f64 = 1e-12;

/// |sin theta| below this is treated as a pole of -log|2 sin theta|.
const SIN_SINGULAR: f64 = 1e-14;

/// zeta(2n) for n = 1..=ZETA_TERMS, computed once at first use.
const ZETA_TERMS: usize = 40;

fn zeta_even() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(ZETA_TERMS);
        for n in 1..=ZETA_TERMS {
            t.push(zeta(2 * n as u32));
        }
        t
    })
}

/// zeta(s) for even s >= 2 to near machine precision.
///
/// s = 2, 4, 6 use closed forms; larger s sums k^-s directly with an
/// Euler-Maclaurin tail, which converges fast enough there.
fn zeta(s: u32) -> f64 {
    use std::f64::consts::PI;
    match s {
        2 => PI * PI / 6.0,
        4 => PI.powi(4) / 90.0,
        6 => PI.powi(6) / 945.0,
        _ => {
            let sf = f64::from(s);
            let k_max = 50u32;
            let mut sum = 0.0;
            for k in 1..=k_max {
                sum += f64::from(k).powi(-(s as i32));
            }
            let kf = f64::from(k_max);
            // Euler-Maclaurin tail for sum_{k > k_max} k^-s.
            sum += kf.powf(1.0 - sf) / (sf - 1.0) - 0.5 * kf.powf(-sf)
                + sf * kf.powf(-sf - 1.0) / 12.0
                - sf * (sf + 1.0) * (sf + 2.0) * kf.powf(-sf - 3.0) / 720.0;
            sum
        }
    }
}

/// Clausen function Cl2 on [-pi, pi].
///
/// Cl2(x) = x - x log|x| + sum_{n>=1} zeta(2n) x^(2n+1) / (n (2n+1) (2pi)^(2n)).
/// The series is obtained by integrating the expansion of -log(2 sin(x/2));
/// successive terms shrink by at least (x/2pi)^2 <= 1/4, so the tail after a
/// term t is bounded by |t| / 3 and truncation at term < 2^-60 |acc| is safe.
fn clausen2(x: f64) -> f64 {
    debug_assert!(x.abs() <= std::f64::consts::PI + 1e-9);
    if x == 0.0 {
        return 0.0;
    }
    let table = zeta_even();
    let q = (x / std::f64::consts::TAU).powi(2);
    let mut acc = x - x * x.abs().ln();
    let mut pow = x;
    for (i, z) in table.iter().enumerate() {
        let n = (i + 1) as f64;
        pow *= q; // pow = x^(2n+1) / (2pi)^(2n)
        let term = z * pow / (n * (2.0 * n + 1.0));
        acc += term;
        if term.abs() < acc.abs() * 8.7e-19 {
            break;
        }
    }
    acc
}

/// The Lobachevsky function L(theta) = -int_0^theta log|2 sin u| du.
///
/// Total on R; odd and pi-periodic.  Absolute error stays below 1e-12 on
/// [0, pi] (the argument is range-reduced, so accuracy for very large |theta|
/// is limited only by the reduction step).
pub fn lobachevsky(theta: f64) -> f64 {
    use std::f64::consts::PI;
    // Reduce mod pi into [-pi/2, pi/2]; L(theta) = Cl2(2 theta) / 2.
    let r = theta - PI * (theta / PI).round();
    0.5 * clausen2(2.0 * r)
}

/// Derivative L'(theta) = -log|2 sin theta|.
///
/// Errors with [`Error::SingularAngle`] when theta is a multiple of pi
/// (detected as |sin theta| < 1e-14); never returns NaN or infinity.
pub fn lobachevsky_deriv(theta: f64) -> Result<f64> {
    let s = theta.sin().abs();
    if s < SIN_SINGULAR {
        return Err(Error::SingularAngle(format!(
            "lobachevsky_deriv at theta = {theta:e}: theta = 0 mod pi"
        )));
    }
    Ok(-(2.0 * s).ln())
}

/// Dihedral angles (a, b, c) of an ideal tetrahedron.
///
/// Opposite edges carry equal angles, so three numbers determine all six
/// edge angles.  Construction enforces a, b, c in (0, pi) and
/// a + b + c = pi within 1e-12.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetAngles {
    angles: [f64; 3],
}

impl TetAngles {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c)] {
            if !(v > 0.0 && v < std::f64::consts::PI) || !v.is_finite() {
                return Err(Error::InvalidAngles(format!(
                    "angle {name} = {v} outside (0, pi)"
                )));
            }
        }
        let sum = a + b + c;
        if (sum - std::f64::consts::PI).abs() > ANGLE_SUM_TOL {
            return Err(Error::InvalidAngles(format!(
                "angle sum {sum} differs from pi by {:e}",
                (sum - std::f64::consts::PI).abs()
            )));
        }
        Ok(Self { angles: [a, b, c] })
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.angles
    }

    /// Angle at edge pair `i` (0: edges 01/23, 1: edges 02/13, 2: edges 03/12).
    pub fn angle(&self, i: usize) -> f64 {
        self.angles[i]
    }
}

/// Hyperbolic volume L(a) + L(b) + L(c) of the ideal tetrahedron.
pub fn tet_volume(t: &TetAngles) -> f64 {
    t.angles.iter().map(|&x| lobachevsky(x)).sum()
}

/// Gradient and Hessian of the volume in the three angle coordinates.
///
/// grad_i = -log(2 sin theta_i), hess = diag(-cot theta_i).  The full
/// diagonal Hessian is indefinite; restricted to the tangent plane
/// {da + db + dc = 0} it is negative definite.  Angles within 1e-9 of 0 or
/// pi are rejected rather than clamped.
pub fn tet_volume_grad_hess(t: &TetAngles) -> Result<([f64; 3], [f64; 3])> {
    let mut grad = [0.0; 3];
    let mut hess = [0.0; 3];
    for i in 0..3 {
        let x = t.angles[i];
        if x < ANGLE_GUARD || x > std::f64::consts::PI - ANGLE_GUARD {
            return Err(Error::SingularAngle(format!(
                "volume derivatives need angles in [{ANGLE_GUARD:e}, pi - {ANGLE_GUARD:e}]; got {x:e}"
            )));
        }
        grad[i] = -(2.0 * x.sin()).ln();
        hess[i] = -x.cos() / x.sin();
    }
    Ok((grad, hess))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zeta_values() {
        assert!((zeta(8) - 1.0040773561979443).abs() < 1e-15);
        assert!((zeta(10) - 1.0009945751278181).abs() < 1e-15);
    }

    #[test]
    fn lobachevsky_zero_at_multiples_of_half_pi() {
        assert_eq!(lobachevsky(0.0), 0.0);
        assert!(lobachevsky(PI / 2.0).abs() < 1e-15);
        assert!(lobachevsky(PI).abs() < 1e-12);
    }

    #[test]
    fn deriv_singularities() {
        assert!(lobachevsky_deriv(0.0).is_err());
        assert!(lobachevsky_deriv(PI).is_err());
        assert!(lobachevsky_deriv(-3.0 * PI).is_err());
        // L'(pi/6) = -log(2 sin(pi/6)) = -log(1) = 0.
        assert!(lobachevsky_deriv(PI / 6.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn tet_angles_validation() {
        assert!(TetAngles::new(PI / 3.0, PI / 3.0, PI / 3.0).is_ok());
        assert!(TetAngles::new(0.0, PI / 2.0, PI / 2.0).is_err());
        assert!(TetAngles::new(PI / 3.0, PI / 3.0, PI / 3.0 + 1e-9).is_err());
        assert!(TetAngles::new(-0.1, PI / 2.0, PI / 2.0 + 0.1).is_err());
    }

    #[test]
    fn grad_hess_guard() {
        let t = TetAngles::new(1e-10, PI / 2.0, PI / 2.0 - 1e-10).unwrap();
        assert!(matches!(
            tet_volume_grad_hess(&t),
            Err(Error::SingularAngle(_))
        ));
    }

    #[test]
    fn grad_matches_finite_differences() {
        let t = TetAngles::new(0.7, 1.1, PI - 1.8).unwrap();
        let (g, h) = tet_volume_grad_hess(&t).unwrap();
        let eps = 1e-6;
        for i in 0..3 {
            let mut up = t.angles;
            let mut dn = t.angles;
            up[i] += eps;
            dn[i] -= eps;
            let fd = (lobachevsky(up[i]) - lobachevsky(dn[i])) / (2.0 * eps);
            assert!((fd - g[i]).abs() < 1e-9, "grad[{i}]: {fd} vs {}", g[i]);
            let fd2 = (lobachevsky_deriv(up[i]).unwrap() - lobachevsky_deriv(dn[i]).unwrap())
                / (2.0 * eps);
            assert!((fd2 - h[i]).abs() < 1e-6, "hess[{i}]: {fd2} vs {}", h[i]);
        }
    }

    #[test]
    fn restricted_hessian_negative_definite() {
        // Basis of {da + db + dc = 0}: (1,-1,0), (1,0,-1).
        for (a, b) in [(0.3, 0.4), (1.0, 1.0), (2.5, 0.3), (0.05, 1.5)] {
            let c = PI - a - b;
            let t = TetAngles::new(a, b, c).unwrap();
            let (_, h) = tet_volume_grad_hess(&t).unwrap();
            let q11 = h[0] + h[1];
            let q12 = h[0];
            let q22 = h[0] + h[2];
            assert!(q11 < 0.0, "q11 = {q11} at ({a}, {b}, {c})");
            assert!(q11 * q22 - q12 * q12 > 0.0, "det at ({a}, {b}, {c})");
        }
    }
}
