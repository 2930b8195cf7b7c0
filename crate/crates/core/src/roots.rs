//! Bracketed scalar root finding: bisection safeguarding inverse-quadratic
//! and secant steps (Brent's method).

use crate::error::{Error, Result};

/// Finds a root of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` differ in sign.
///
/// Terminates once the bracket half-width is below `rel_tol * |x|` (floored
/// at a few ulps) or `f(x) == 0`.
pub fn brent<F>(f: F, lo: f64, hi: f64, rel_tol: f64, max_iters: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::SolverFailure(format!(
            "root not bracketed by [{lo}, {hi}] (f = {fa:e}, {fb:e})"
        )));
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..max_iters {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }

        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * rel_tol * b.abs() + f64::MIN_POSITIVE;
        let half = 0.5 * (c - b);
        if half.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }

        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * half * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * half * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }

        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(half) };
        fb = f(b)?;
    }

    Err(Error::SolverFailure(format!(
        "no convergence within {max_iters} iterations"
    )))
}

/// Solves `f(x) = 0` for a strictly increasing `f` on `[0, inf)` with
/// `f(0) < 0`, doubling the upper end from `initial_hi` until it brackets.
pub fn solve_increasing_from_zero<F>(f: F, initial_hi: f64, rel_tol: f64, max_iters: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut hi = initial_hi;
    let mut expansions = 0;
    loop {
        let f_hi = f(hi)?;
        if f_hi >= 0.0 {
            break;
        }
        expansions += 1;
        hi *= 2.0;
        if expansions > max_iters || !hi.is_finite() {
            return Err(Error::SolverFailure(format!(
                "bracket expansion exhausted at x = {hi:e}"
            )));
        }
    }
    brent(f, 0.0, hi, rel_tol, max_iters)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = brent(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-14, 100).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn finds_transcendental_root() {
        let r = brent(|x: f64| Ok(x.cos() - x), 0.0, 1.0, 1e-15, 100).unwrap();
        assert!((r - 0.739_085_133_215_160_6).abs() < 1e-14);
    }

    #[test]
    fn rejects_unbracketed() {
        assert!(matches!(
            brent(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12, 100),
            Err(Error::SolverFailure(_))
        ));
    }

    #[test]
    fn iteration_cap() {
        assert!(matches!(
            brent(|x: f64| Ok(x.powi(3) - 0.3), 0.0, 1.0, 1e-15, 2),
            Err(Error::SolverFailure(_))
        ));
    }

    #[test]
    fn expansion_finds_far_root() {
        let r = solve_increasing_from_zero(|x| Ok(x - 1234.5), 1.0, 1e-12, 200).unwrap();
        assert!((r - 1234.5).abs() < 1e-8);
    }

    #[test]
    fn tiny_root_relative_accuracy() {
        let r = solve_increasing_from_zero(|x| Ok(x - 3e-12), 1.0, 1e-10, 200).unwrap();
        assert!(((r - 3e-12) / 3e-12).abs() < 1e-9);
    }

    #[test]
    fn propagates_errors() {
        let r = solve_increasing_from_zero(|_| Err(Error::SolverFailure("boom".into())), 1.0, 1e-12, 10);
        assert!(r.is_err());
    }
}
