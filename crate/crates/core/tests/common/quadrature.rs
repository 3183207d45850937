//! Adaptive quadrature oracle for -int_0^theta log|2 sin u| du.
//!
//! Deliberately implemented without any series shared with the library:
//! adaptive Simpson on smooth stretches, with the logarithmic endpoint
//! singularities at multiples of pi split off analytically via
//! log(2 sin u) = log(2u) + log(sin u / u) near 0 (and mirrored near pi).

/// Adaptive Simpson integration of a smooth function.
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() < 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, fm, flm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, fb, frm, right, tol / 2.0, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fb, fm, whole, tol, 48)
}

/// int_0^t log(2 sin u) du for t in [0, pi/2], singularity at 0 handled
/// analytically: int_0^d log(2u) du = d (log(2d) - 1).
fn integral_from_zero(t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let d = t.min(0.1);
    let smooth = |u: f64| {
        if u == 0.0 {
            0.0
        } else {
            (u.sin() / u).ln()
        }
    };
    let mut total = d * ((2.0 * d).ln() - 1.0) + simpson(&smooth, 0.0, d, 1e-15);
    if t > d {
        total += simpson(&|u: f64| (2.0 * u.sin()).ln(), d, t, 1e-15);
    }
    total
}

/// Oracle value of the Lobachevsky function, valid on all of R.
pub fn lobachevsky_oracle(theta: f64) -> f64 {
    use std::f64::consts::PI;
    // Reduce mod pi (the integrand is pi-periodic with zero mean), then use
    // oddness to land in [0, pi/2].
    let r = theta - PI * (theta / PI).round();
    let s = r.abs().min(PI / 2.0); // r is within [-pi/2, pi/2] already
    let v = -integral_from_zero(s);
    if r < 0.0 {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn oracle_at_known_zeros() {
        assert!(lobachevsky_oracle(0.0).abs() < 1e-15);
        assert!(lobachevsky_oracle(std::f64::consts::FRAC_PI_2).abs() < 1e-13);
    }
}
