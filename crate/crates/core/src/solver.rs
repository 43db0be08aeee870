//! Bracketed scalar root finding (Brent's method: bisection safeguarded
//! secant and inverse quadratic steps).

/// Stopping rules for [`brent`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Stop once `|f(x)|` is at or below this value.
    pub residual: f64,
    /// Stop once the bracket is narrower than this.
    pub width: f64,
    pub max_iterations: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            residual: 1e-12,
            width: 1e-14,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveError {
    /// `f(lo)` and `f(hi)` have the same strict sign.
    NoSignChange {
        f_lo: f64,
        f_hi: f64,
    },
    NotFinite {
        x: f64,
    },
    MaxIterations {
        best: Root,
    },
}

/// Finds a root of `f` in `[lo, hi]`.
///
/// The bracket keeps shrinking after `|f| <= tol.residual` is first met
/// until either the width rule fires or `f` hits exactly zero, so the
/// returned root is typically accurate to a few ulps of `x` rather than
/// just to the residual tolerance.
pub fn brent<F>(mut f: F, lo: f64, hi: f64, tol: Tolerance) -> Result<Root, SolveError>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let mut fb = f(b);
    if !fa.is_finite() {
        return Err(SolveError::NotFinite { x: a });
    }
    if !fb.is_finite() {
        return Err(SolveError::NotFinite { x: b });
    }
    if fa == 0.0 {
        return Ok(Root {
            x: a,
            residual: 0.0,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(Root {
            x: b,
            residual: 0.0,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() {
        return Err(SolveError::NoSignChange { f_lo: fa, f_hi: fb });
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for iteration in 1..=tol.max_iterations {
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
        let half_tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol.width;
        let mid = 0.5 * (c - b);
        if fb == 0.0 || mid.abs() <= half_tol {
            let root = Root {
                x: b,
                residual: fb,
                iterations: iteration,
            };
            return if fb.abs() <= tol.residual {
                Ok(root)
            } else {
                Err(SolveError::MaxIterations { best: root })
            };
        }
        if e.abs() >= half_tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = 2.0 * mid * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic interpolation
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * mid * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * mid * q - (half_tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = mid;
                e = d;
            }
        } else {
            d = mid;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > half_tol {
            d
        } else {
            half_tol.copysign(mid)
        };
        fb = f(b);
        if !fb.is_finite() {
            return Err(SolveError::NotFinite { x: b });
        }
    }
    Err(SolveError::MaxIterations {
        best: Root {
            x: b,
            residual: fb,
            iterations: tol.max_iterations,
        },
    })
}
