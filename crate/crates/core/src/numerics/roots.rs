use crate::{PlateError, Result};

/// Locate the roots of a continuous scalar function on `[a, b]` by an
/// equispaced sign-change scan followed by bisection.
///
/// One root is reported per detected sign change, bisected until the
/// bracket width drops below `rel_tol` times the local magnitude. An
/// empty result means the scan saw no sign change; non-finite function
/// values are an error.
pub fn find_roots<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    scan_steps: usize,
    rel_tol: f64,
) -> Result<Vec<f64>> {
    assert!(a < b, "find_roots requires a < b");
    assert!(scan_steps >= 2, "find_roots requires scan_steps >= 2");
    let h = (b - a) / scan_steps as f64;
    let mut roots = Vec::new();
    let mut x_prev = a;
    let mut f_prev = f(a);
    if !f_prev.is_finite() {
        return Err(PlateError::NonFiniteValue(a));
    }
    for i in 1..=scan_steps {
        let x = a + h * i as f64;
        let fx = f(x);
        if !fx.is_finite() {
            return Err(PlateError::NonFiniteValue(x));
        }
        if f_prev == 0.0 {
            push_root(&mut roots, x_prev, rel_tol);
        } else if f_prev * fx < 0.0 {
            let r = bisect(&f, x_prev, x, f_prev, rel_tol);
            push_root(&mut roots, r, rel_tol);
        }
        x_prev = x;
        f_prev = fx;
    }
    if f_prev == 0.0 {
        push_root(&mut roots, x_prev, rel_tol);
    }
    Ok(roots)
}

fn push_root(roots: &mut Vec<f64>, r: f64, rel_tol: f64) {
    let scale = r.abs().max(1e-300);
    if roots
        .last()
        .is_none_or(|&prev| (r - prev).abs() > 4.0 * rel_tol * scale)
    {
        roots.push(r);
    }
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, f_lo: f64, rel_tol: f64) -> f64 {
    let mut sign_lo = f_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= rel_tol * mid.abs().max(1e-300) {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == sign_lo {
            lo = mid;
            sign_lo = fm.signum();
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sqrt_two() {
        let r = find_roots(|x| x * x - 2.0, 0.0, 2.0, 10, 1e-12).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 2.0_f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn sine_roots() {
        let r = find_roots(f64::sin, 1.0, 7.0, 100, 1e-12).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] - PI).abs() < 1e-10);
        assert!((r[1] - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn j0_roots() {
        let r = find_roots(
            |x| crate::numerics::bessel_j(0, x, 0).unwrap(),
            1e-6,
            10.0,
            400,
            1e-12,
        )
        .unwrap();
        assert_eq!(r.len(), 3);
        assert!((r[0] - 2.404825557695773).abs() < 1e-10);
        assert!((r[1] - 5.520078110286311).abs() < 1e-10);
    }

    #[test]
    fn no_sign_change_is_empty() {
        let r = find_roots(|x| x * x + 1.0, -1.0, 1.0, 50, 1e-12).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn non_finite_is_error() {
        assert!(find_roots(|x| 1.0 / (x * 0.0), 0.0, 1.0, 4, 1e-12).is_err());
    }
}
