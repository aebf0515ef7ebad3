use crate::error::{Error, Result};

/// Bisection safeguarded secant search on a sign-changing bracket.
///
/// Iteration stops once `|f(x)| <= ftol * max(|f(a)|, |f(b)|)` or the bracket
/// width drops below `xtol * max(1, |x|)`. With both tolerances at zero the
/// search runs until the bracket cannot shrink any further in `f64`.
#[derive(Debug, Clone, Copy)]
pub struct RootFinder {
    pub xtol: f64,
    pub ftol: f64,
    pub max_iter: usize,
}

impl Default for RootFinder {
    fn default() -> Self {
        Self {
            xtol: 1e-15,
            ftol: 1e-15,
            max_iter: 400,
        }
    }
}

impl RootFinder {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            xtol: tol,
            ftol: tol,
            ..Self::default()
        }
    }

    pub fn solve<F>(&self, mut f: F, a: f64, b: f64) -> Result<f64>
    where
        F: FnMut(f64) -> f64,
    {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::Argument(format!("bracket [{a}, {b}] is not finite")));
        }
        let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
        let mut flo = eval(&mut f, lo)?;
        let mut fhi = eval(&mut f, hi)?;
        if flo == 0.0 {
            return Ok(lo);
        }
        if fhi == 0.0 {
            return Ok(hi);
        }
        if flo.signum() == fhi.signum() {
            return Err(Error::Bracket {
                a: lo,
                b: hi,
                fa: flo,
                fb: fhi,
            });
        }
        let fscale = flo.abs().max(fhi.abs());
        let mut width_before = hi - lo;
        let mut slow_steps = 0usize;
        for _ in 0..self.max_iter {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= self.xtol * mid.abs().max(1.0) || mid <= lo || mid >= hi {
                return Ok(if flo.abs() <= fhi.abs() { lo } else { hi });
            }
            // secant (regula falsi) candidate, rejected near the bracket ends
            let secant = hi - fhi * (hi - lo) / (fhi - flo);
            let margin = 0.01 * (hi - lo);
            let x = if slow_steps < 2 && secant > lo + margin && secant < hi - margin {
                secant
            } else {
                mid
            };
            let fx = eval(&mut f, x)?;
            if fx == 0.0 || fx.abs() <= self.ftol * fscale {
                return Ok(x);
            }
            if fx.signum() == flo.signum() {
                lo = x;
                flo = fx;
            } else {
                hi = x;
                fhi = fx;
            }
            let width = hi - lo;
            if width > 0.5 * width_before {
                slow_steps += 1;
            } else {
                slow_steps = 0;
            }
            width_before = width;
        }
        Ok(0.5 * (lo + hi))
    }
}

fn eval<F: FnMut(f64) -> f64>(f: &mut F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation { x, value: v })
    }
}

/// Root of `f` in `[a, b]` to tolerance `tol` (see [`RootFinder`]).
pub fn find_root_bracketed<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Argument(format!("tolerance must be positive, got {tol}")));
    }
    RootFinder::with_tol(tol).solve(f, a, b)
}
