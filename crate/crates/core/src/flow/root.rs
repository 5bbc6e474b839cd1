//! Bracketed scalar root finding (Brent: inverse quadratic / secant steps
//! guarded by bisection).

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RootError {
    /// `f(a)` and `f(b)` have the same sign.
    NotBracketed { a: f64, fa: f64, b: f64, fb: f64 },
    NotFinite { x: f64 },
    MaxIterations { best: f64 },
}

impl std::fmt::Display for RootError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RootError::NotBracketed { a, fa, b, fb } => {
                write!(f, "root not bracketed: f({a}) = {fa}, f({b}) = {fb}")
            }
            RootError::NotFinite { x } => write!(f, "non-finite function value at {x}"),
            RootError::MaxIterations { best } => {
                write!(f, "root finder did not converge (best {best})")
            }
        }
    }
}

const MAX_ITER: usize = 200;

/// Root of `f` in `[a, b]` with `f(a)·f(b) ≤ 0`, to `rel_tol·|x| + 4ε|x|`.
pub fn brent<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64, RootError>
where
    F: Fn(f64) -> Result<f64, RootError>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if !fa.is_finite() {
        return Err(RootError::NotFinite { x: a });
    }
    if !fb.is_finite() {
        return Err(RootError::NotFinite { x: b });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(RootError::NotBracketed { a, fa, b, fb });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
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
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * rel_tol * b.abs();
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
        if !fb.is_finite() {
            return Err(RootError::NotFinite { x: b });
        }
    }
    Err(RootError::MaxIterations { best: b })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let x = brent(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-15).unwrap();
        assert!((x - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn steep_monotone_function() {
        let x = brent(|x| Ok(x.powi(9) - 1e-3), 0.0, 5.0, 1e-14).unwrap();
        assert!((x - 1e-3f64.powf(1.0 / 9.0)).abs() < 1e-13);
    }

    #[test]
    fn unbracketed_is_an_error() {
        assert!(matches!(
            brent(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12),
            Err(RootError::NotBracketed { .. })
        ));
    }
}
