//! Adaptive Simpson quadrature with a relative tolerance and an interval cap.

use crate::error::{Error, Result};

/// Relative tolerance used for every model integral.
pub const REL_TOL: f64 = 1e-10;
/// Hard cap on the number of accepted subintervals.
pub const MAX_INTERVALS: usize = 1 << 20;

/// Integrates `f` over `[a, b]` to relative accuracy `rel_tol`.
///
/// The absolute target is `rel_tol` times a coarse estimate of the integral
/// magnitude; it is split between subintervals in proportion to their width.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    // coarse magnitude from 64 composite panels
    let coarse = composite_simpson(&f, a, b, 64);
    let scale = coarse.abs().max(f64::MIN_POSITIVE);
    let abs_tol = rel_tol * scale;
    let width = b - a;

    struct Panel {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        depth: u32,
    }

    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let mut stack = vec![Panel {
        a,
        b,
        fa,
        fm,
        fb,
        whole: (b - a) / 6.0 * (fa + 4.0 * fm + fb),
        depth: 0,
    }];
    let mut total = 0.0;
    let mut accepted = 0usize;

    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        let right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        let delta = left + right - p.whole;
        let local_tol = abs_tol * (p.b - p.a) / width;
        // a few forced levels so that a lucky coarse panel is not accepted
        if p.depth >= 4 && delta.abs() <= 15.0 * local_tol || p.depth >= 60 {
            total += left + right + delta / 15.0;
            accepted += 1;
            if accepted > MAX_INTERVALS {
                return Err(Error::QuadratureFailed {
                    estimate: total,
                    intervals: accepted,
                });
            }
            continue;
        }
        if stack.len() + accepted >= MAX_INTERVALS {
            return Err(Error::QuadratureFailed {
                estimate: total + left + right,
                intervals: accepted + stack.len(),
            });
        }
        stack.push(Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
            depth: p.depth + 1,
        });
        stack.push(Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
            depth: p.depth + 1,
        });
    }
    Ok(total)
}

/// Composite Simpson rule on `n` (rounded up to even) panels.
pub fn composite_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = adaptive_simpson(|x| 3.0 * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn smooth_transcendental() {
        let v = adaptive_simpson(|x: f64| x.exp(), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-11);
        let v = adaptive_simpson(|x: f64| 1.0 / (1.0 + x), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn empty_interval() {
        assert_eq!(adaptive_simpson(|x| x, 1.0, 1.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn pathological_integrand_hits_the_cap() {
        // wildly oscillating integrand cannot reach 1e-15 relative within the cap
        let r = adaptive_simpson(|x: f64| (1e6 * x).sin() + 1e-9, 0.0, 1.0, 1e-15);
        assert!(matches!(r, Err(Error::QuadratureFailed { .. })));
    }
}
