//! Bessel functions `J_n` and exponentially scaled modified Bessel
//! functions `e^{-x} I_n`, with derivatives up to third order through
//! the standard two-term recurrences.
//!
//! Small arguments use the ascending power series; larger arguments use
//! Miller's downward recurrence with the usual normalization sums. The
//! scaled `I_n` keeps Steklov determinants finite for eigenvalues up to
//! about 1e6.

use crate::{PlateError, Result};

const J_SERIES_CUTOFF: f64 = 12.0;
const I_SERIES_CUTOFF: f64 = 30.0;

/// `(d/dx)^deriv J_n(x)` for integer order `n >= 0`, `x >= 0`,
/// `deriv <= 3`.
pub fn bessel_j(n: u32, x: f64, deriv: u8) -> Result<f64> {
    check_args(x, deriv)?;
    let top = n as i64 + deriv as i64;
    let table = j_table(top as u32, x);
    let value = |m: i64| -> f64 {
        let (m_abs, sign) = if m < 0 {
            ((-m) as usize, if m % 2 == 0 { 1.0 } else { -1.0 })
        } else {
            (m as usize, 1.0)
        };
        sign * table[m_abs]
    };
    Ok(derivative_j(&value, n as i64, deriv))
}

/// `e^{-x} (d/dx)^deriv I_n(x)` for integer order `n >= 0`, `x >= 0`,
/// `deriv <= 3`. The scale factor is applied to the *derivative* of the
/// unscaled function, so determinant ratios are unaffected.
pub fn bessel_i_scaled(n: u32, x: f64, deriv: u8) -> Result<f64> {
    check_args(x, deriv)?;
    let top = n as i64 + deriv as i64;
    let table = i_scaled_table(top as u32, x);
    let value = |m: i64| -> f64 { table[m.unsigned_abs() as usize] };
    Ok(derivative_i(&value, n as i64, deriv))
}

fn check_args(x: f64, deriv: u8) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(PlateError::InvalidParams(format!(
            "Bessel argument must be finite and non-negative, got {x}"
        )));
    }
    if deriv > 3 {
        return Err(PlateError::InvalidParams(format!(
            "Bessel derivative order must be <= 3, got {deriv}"
        )));
    }
    Ok(())
}

fn derivative_j(value: &dyn Fn(i64) -> f64, n: i64, deriv: u8) -> f64 {
    if deriv == 0 {
        value(n)
    } else {
        // J_n' = (J_{n-1} - J_{n+1}) / 2
        0.5 * (derivative_j(value, n - 1, deriv - 1) - derivative_j(value, n + 1, deriv - 1))
    }
}

fn derivative_i(value: &dyn Fn(i64) -> f64, n: i64, deriv: u8) -> f64 {
    if deriv == 0 {
        value(n)
    } else {
        // I_n' = (I_{n-1} + I_{n+1}) / 2
        0.5 * (derivative_i(value, n - 1, deriv - 1) + derivative_i(value, n + 1, deriv - 1))
    }
}

/// Values J_0(x) .. J_top(x).
fn j_table(top: u32, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut t = vec![0.0; top as usize + 1];
        t[0] = 1.0;
        return t;
    }
    if x <= J_SERIES_CUTOFF {
        (0..=top).map(|m| j_series(m, x)).collect()
    } else {
        j_miller(top, x)
    }
}

fn j_series(m: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=m as u64 {
        term *= half / k as f64;
    }
    let mut sum = term;
    let q = half * half;
    for k in 1..200u64 {
        term *= -q / (k as f64 * (m as u64 + k) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() + 1e-300 {
            break;
        }
    }
    sum
}

/// Miller's algorithm: downward recurrence from a high starting order,
/// normalized with J_0 + 2 Σ J_{2k} = 1.
fn j_miller(top: u32, x: f64) -> Vec<f64> {
    let start = ((x + 1.5 * x.sqrt()) as usize + top as usize + 40) | 1;
    let mut jp = 0.0_f64; // J_{m+1}
    let mut j = 1e-30_f64; // J_m
    let mut out = vec![0.0; top as usize + 1];
    let mut norm = 0.0;
    for m in (0..=start).rev() {
        let jm = 2.0 * (m as f64 + 1.0) / x * j - jp;
        jp = j;
        j = jm;
        if m % 2 == 0 {
            norm += if m == 0 { j } else { 2.0 * j };
        }
        if m <= top as usize {
            out[m] = j;
        }
        if j.abs() > 1e250 {
            jp /= 1e250;
            j /= 1e250;
            norm /= 1e250;
            for v in out.iter_mut() {
                *v /= 1e250;
            }
        }
    }
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// Values e^{-x} I_0(x) .. e^{-x} I_top(x).
fn i_scaled_table(top: u32, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut t = vec![0.0; top as usize + 1];
        t[0] = 1.0;
        return t;
    }
    if x <= I_SERIES_CUTOFF {
        let scale = (-x).exp();
        (0..=top).map(|m| scale * i_series(m, x)).collect()
    } else {
        i_miller(top, x)
    }
}

fn i_series(m: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=m as u64 {
        term *= half / k as f64;
    }
    let mut sum = term;
    let q = half * half;
    for k in 1..300u64 {
        term *= q / (k as f64 * (m as u64 + k) as f64);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

/// Downward recurrence for I with the normalization
/// e^{-x}(I_0 + 2 Σ_{k>=1} I_k) = 1, which yields the scaled values
/// directly.
fn i_miller(top: u32, x: f64) -> Vec<f64> {
    let start = ((x + 1.5 * x.sqrt()) as usize + top as usize + 40) | 1;
    let mut ip = 0.0_f64; // I_{m+1}
    let mut i = 1e-30_f64; // I_m
    let mut out = vec![0.0; top as usize + 1];
    let mut norm = 0.0;
    for m in (0..=start).rev() {
        let im = ip + 2.0 * (m as f64 + 1.0) / x * i;
        ip = i;
        i = im;
        norm += if m == 0 { i } else { 2.0 * i };
        if m <= top as usize {
            out[m] = i;
        }
        if i > 1e250 {
            ip /= 1e250;
            i /= 1e250;
            norm /= 1e250;
            for v in out.iter_mut() {
                *v /= 1e250;
            }
        }
    }
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_at_origin() {
        assert_eq!(bessel_j(0, 0.0, 0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0, 0).unwrap(), 0.0);
    }

    #[test]
    fn j0_first_zero() {
        // first zero of J_0, located by bisection on the power series
        let z = 2.404825557695773;
        assert!(bessel_j(0, z, 0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn i_scaled_examples() {
        assert_eq!(bessel_i_scaled(0, 0.0, 0).unwrap(), 1.0);
        // e^{-1} Σ (1/4)^k / (k!)^2 by direct series summation
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..40u64 {
            term *= 0.25 / (k * k) as f64;
            sum += term;
        }
        let expected = sum * (-1.0f64).exp();
        assert!((bessel_i_scaled(0, 1.0, 0).unwrap() - expected).abs() < 1e-12);
        for i in 1..200 {
            let x = 0.25 * i as f64;
            assert!(bessel_i_scaled(1, x, 0).unwrap() > 0.0);
        }
    }

    #[test]
    fn rejects_bad_args() {
        assert!(bessel_j(0, -1.0, 0).is_err());
        assert!(bessel_i_scaled(0, -1.0, 0).is_err());
        assert!(bessel_j(0, 1.0, 4).is_err());
    }

    #[test]
    fn miller_matches_series_at_cutoff() {
        // the two evaluation branches must agree where they meet
        for n in 0..=10u32 {
            let s = j_series(n, 12.0);
            let m = j_miller(n, 12.0)[n as usize];
            assert!((s - m).abs() < 1e-11, "J_{n}(12): {s} vs {m}");
        }
        for n in 0..=10u32 {
            let s = (-30.0f64).exp() * i_series(n, 30.0);
            let m = i_miller(n, 30.0)[n as usize];
            assert!((s - m).abs() < 1e-13 * s.abs().max(1.0));
        }
    }

    #[test]
    fn wronskian_matches_direct_series() {
        // J_n I_n' - J_n' I_n, scaled by e^{-x}, against a test-local
        // series computation
        for n in 0..=10u32 {
            for i in 1..=20 {
                let x = i as f64;
                let w_mod = bessel_j(n, x, 0).unwrap() * bessel_i_scaled(n, x, 1).unwrap()
                    - bessel_j(n, x, 1).unwrap() * bessel_i_scaled(n, x, 0).unwrap();
                assert!(w_mod.is_finite());
                if x <= J_SERIES_CUTOFF {
                    let scale = (-x).exp();
                    let j = j_series(n, x);
                    let jd = 0.5
                        * (if n == 0 { -j_series(1, x) } else { j_series(n - 1, x) }
                            - j_series(n + 1, x));
                    let iv = scale * i_series(n, x);
                    let id = 0.5
                        * scale
                        * (if n == 0 { i_series(1, x) } else { i_series(n - 1, x) }
                            + i_series(n + 1, x));
                    let w_ref = j * id - jd * iv;
                    assert!((w_mod - w_ref).abs() < 1e-10, "n={n} x={x}");
                }
            }
        }
    }

    #[test]
    fn third_derivative_consistency() {
        // J_n satisfies x^2 y'' + x y' + (x^2 - n^2) y = 0; differentiate
        // once to pin the third derivative against lower ones.
        for n in 0..=4u32 {
            for &x in &[0.5, 3.0, 9.0, 15.0, 25.0] {
                let j = bessel_j(n, x, 0).unwrap();
                let j1 = bessel_j(n, x, 1).unwrap();
                let j2 = bessel_j(n, x, 2).unwrap();
                let j3 = bessel_j(n, x, 3).unwrap();
                let n2 = (n * n) as f64;
                // differentiated ODE: x^2 y''' + 3x y'' + (x^2 - n^2 + 1) y' + 2x y = 0
                let ode3 = x * x * j3 + 3.0 * x * j2 + (x * x - n2 + 1.0) * j1 + 2.0 * x * j;
                assert!(ode3.abs() < 1e-9 * (1.0 + j.abs()), "n={n} x={x}: {ode3}");
            }
        }
    }
}
