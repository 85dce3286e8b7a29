//! Third-order two-variable derivative jets.
//!
//! A [`Jet3`] carries the value of a scalar field together with all its
//! partial derivatives up to third order at a point. Arithmetic on jets
//! propagates derivatives exactly (to roundoff), which is how basis
//! functions on curved star-shaped charts get their closed-form
//! derivatives without any symbolic machinery.

/// Value and partial derivatives up to order three of a scalar field of
/// two variables at a single point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet3 {
    pub f: f64,
    pub fx: f64,
    pub fy: f64,
    pub fxx: f64,
    pub fxy: f64,
    pub fyy: f64,
    pub fxxx: f64,
    pub fxxy: f64,
    pub fxyy: f64,
    pub fyyy: f64,
}

impl Jet3 {
    pub fn constant(c: f64) -> Self {
        Jet3 {
            f: c,
            ..Default::default()
        }
    }

    /// The coordinate function x at the point (x0, y0).
    pub fn var_x(x0: f64) -> Self {
        Jet3 {
            f: x0,
            fx: 1.0,
            ..Default::default()
        }
    }

    /// The coordinate function y at the point (x0, y0).
    pub fn var_y(y0: f64) -> Self {
        Jet3 {
            f: y0,
            fy: 1.0,
            ..Default::default()
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Jet3 {
            f: s * self.f,
            fx: s * self.fx,
            fy: s * self.fy,
            fxx: s * self.fxx,
            fxy: s * self.fxy,
            fyy: s * self.fyy,
            fxxx: s * self.fxxx,
            fxxy: s * self.fxxy,
            fxyy: s * self.fxyy,
            fyyy: s * self.fyyy,
        }
    }

    pub fn add(&self, o: &Jet3) -> Self {
        Jet3 {
            f: self.f + o.f,
            fx: self.fx + o.fx,
            fy: self.fy + o.fy,
            fxx: self.fxx + o.fxx,
            fxy: self.fxy + o.fxy,
            fyy: self.fyy + o.fyy,
            fxxx: self.fxxx + o.fxxx,
            fxxy: self.fxxy + o.fxxy,
            fxyy: self.fxyy + o.fxyy,
            fyyy: self.fyyy + o.fyyy,
        }
    }

    pub fn sub(&self, o: &Jet3) -> Self {
        self.add(&o.scale(-1.0))
    }

    /// Leibniz product rule through third order.
    pub fn mul(&self, o: &Jet3) -> Self {
        let (u, v) = (self, o);
        Jet3 {
            f: u.f * v.f,
            fx: u.fx * v.f + u.f * v.fx,
            fy: u.fy * v.f + u.f * v.fy,
            fxx: u.fxx * v.f + 2.0 * u.fx * v.fx + u.f * v.fxx,
            fxy: u.fxy * v.f + u.fx * v.fy + u.fy * v.fx + u.f * v.fxy,
            fyy: u.fyy * v.f + 2.0 * u.fy * v.fy + u.f * v.fyy,
            fxxx: u.fxxx * v.f + 3.0 * u.fxx * v.fx + 3.0 * u.fx * v.fxx + u.f * v.fxxx,
            fxxy: u.fxxy * v.f
                + u.fxx * v.fy
                + 2.0 * u.fxy * v.fx
                + 2.0 * u.fx * v.fxy
                + u.fy * v.fxx
                + u.f * v.fxxy,
            fxyy: u.fxyy * v.f
                + u.fyy * v.fx
                + 2.0 * u.fxy * v.fy
                + 2.0 * u.fy * v.fxy
                + u.fx * v.fyy
                + u.f * v.fxyy,
            fyyy: u.fyyy * v.f + 3.0 * u.fyy * v.fy + 3.0 * u.fy * v.fyy + u.f * v.fyyy,
        }
    }

    /// Compose a univariate function with this jet. `d` holds the
    /// derivatives `[h(f), h'(f), h''(f), h'''(f)]` of the outer
    /// function at the jet's value.
    pub fn compose(&self, d: [f64; 4]) -> Self {
        let g = self;
        let [h0, h1, h2, h3] = d;
        Jet3 {
            f: h0,
            fx: h1 * g.fx,
            fy: h1 * g.fy,
            fxx: h2 * g.fx * g.fx + h1 * g.fxx,
            fxy: h2 * g.fx * g.fy + h1 * g.fxy,
            fyy: h2 * g.fy * g.fy + h1 * g.fyy,
            fxxx: h3 * g.fx.powi(3) + 3.0 * h2 * g.fx * g.fxx + h1 * g.fxxx,
            fxxy: h3 * g.fx * g.fx * g.fy
                + h2 * (g.fxx * g.fy + 2.0 * g.fx * g.fxy)
                + h1 * g.fxxy,
            fxyy: h3 * g.fx * g.fy * g.fy
                + h2 * (g.fyy * g.fx + 2.0 * g.fy * g.fxy)
                + h1 * g.fxyy,
            fyyy: h3 * g.fy.powi(3) + 3.0 * h2 * g.fy * g.fyy + h1 * g.fyyy,
        }
    }

    pub fn recip(&self) -> Self {
        let v = self.f;
        self.compose([
            1.0 / v,
            -1.0 / (v * v),
            2.0 / (v * v * v),
            -6.0 / (v * v * v * v),
        ])
    }

    pub fn div(&self, o: &Jet3) -> Self {
        self.mul(&o.recip())
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut out = Jet3::constant(1.0);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.f.sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.f.sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn sqrt(&self) -> Self {
        let r = self.f.sqrt();
        self.compose([
            r,
            0.5 / r,
            -0.25 / (r * r * r),
            0.375 / (r * r * r * r * r),
        ])
    }

    pub fn gradient(&self) -> [f64; 2] {
        [self.fx, self.fy]
    }

    pub fn laplacian(&self) -> f64 {
        self.fxx + self.fyy
    }

    pub fn hessian_frobenius_sq(&self) -> f64 {
        self.fxx * self.fxx + 2.0 * self.fxy * self.fxy + self.fyy * self.fyy
    }

    /// Gradient of the Laplacian, `∇Δf`.
    pub fn grad_laplacian(&self) -> [f64; 2] {
        [self.fxxx + self.fxyy, self.fxxy + self.fyyy]
    }
}

/// Jet of the polar angle `θ = atan2(y, x)` at `(x0, y0) != 0`.
///
/// Built from the exact first derivatives `θ_x = -y/r²`, `θ_y = x/r²`,
/// themselves expanded as jets, so all ten coefficients are closed-form.
pub fn theta_jet(x0: f64, y0: f64) -> Jet3 {
    let x = Jet3::var_x(x0);
    let y = Jet3::var_y(y0);
    let s = x.mul(&x).add(&y.mul(&y));
    let tx = y.scale(-1.0).div(&s);
    let ty = x.div(&s);
    Jet3 {
        f: y0.atan2(x0),
        fx: tx.f,
        fy: ty.f,
        fxx: tx.fx,
        fxy: tx.fy,
        fyy: ty.fy,
        fxxx: tx.fxx,
        fxxy: tx.fxy,
        fxyy: tx.fyy,
        fyyy: ty.fyy,
    }
}

/// Jet of `r = |(x, y)|` at `(x0, y0) != 0`.
pub fn radius_jet(x0: f64, y0: f64) -> Jet3 {
    let x = Jet3::var_x(x0);
    let y = Jet3::var_y(y0);
    x.mul(&x).add(&y.mul(&y)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check<F: Fn(f64, f64) -> f64>(f: F, jet: &Jet3, x: f64, y: f64, tol: f64) {
        let h = 1e-4;
        let d = |g: &dyn Fn(f64, f64) -> f64, wx: f64, wy: f64| {
            (g(x + wx * h, y + wy * h) - g(x - wx * h, y - wy * h)) / (2.0 * h)
        };
        assert!((jet.f - f(x, y)).abs() < tol);
        assert!((jet.fx - d(&f, 1.0, 0.0)).abs() < tol, "fx");
        assert!((jet.fy - d(&f, 0.0, 1.0)).abs() < tol, "fy");
        let fxx = (f(x + h, y) - 2.0 * f(x, y) + f(x - h, y)) / (h * h);
        let fyy = (f(x, y + h) - 2.0 * f(x, y) + f(x, y - h)) / (h * h);
        let fxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h))
            / (4.0 * h * h);
        assert!((jet.fxx - fxx).abs() < tol * 100.0, "fxx");
        assert!((jet.fyy - fyy).abs() < tol * 100.0, "fyy");
        assert!((jet.fxy - fxy).abs() < tol * 100.0, "fxy");
    }

    #[test]
    fn product_and_compose_match_finite_differences() {
        let (x0, y0) = (0.7, -0.4);
        let x = Jet3::var_x(x0);
        let y = Jet3::var_y(y0);
        let g = x.mul(&x).add(&y.mul(&y).mul(&x)).sin();
        fd_check(
            |x, y| (x * x + y * y * x).sin(),
            &g,
            x0,
            y0,
            1e-7,
        );
    }

    #[test]
    fn theta_jet_matches_finite_differences() {
        let (x0, y0) = (0.8, 0.55);
        let t = theta_jet(x0, y0);
        fd_check(|x, y| y.atan2(x), &t, x0, y0, 1e-7);
        // third order, one representative coefficient against a 5-point
        // FD of fxx in x
        let h = 1e-3;
        let fxx = |x: f64, y: f64| theta_jet(x, y).fxx;
        let fd = (fxx(x0 + h, y0) - fxx(x0 - h, y0)) / (2.0 * h);
        assert!((t.fxxx - fd).abs() < 1e-4);
        let fd_xy = (fxx(x0, y0 + h) - fxx(x0, y0 - h)) / (2.0 * h);
        assert!((t.fxxy - fd_xy).abs() < 1e-4);
    }

    #[test]
    fn division_inverts_product() {
        let (x0, y0) = (1.3, 0.2);
        let x = Jet3::var_x(x0);
        let y = Jet3::var_y(y0);
        let a = x.mul(&x).add(&Jet3::constant(2.0));
        let b = y.sin().add(&Jet3::constant(3.0));
        let c = a.mul(&b).div(&b);
        for (p, q) in [
            (a.f, c.f),
            (a.fx, c.fx),
            (a.fy, c.fy),
            (a.fxx, c.fxx),
            (a.fxy, c.fxy),
            (a.fyy, c.fyy),
            (a.fxxx, c.fxxx),
            (a.fxxy, c.fxxy),
            (a.fxyy, c.fxyy),
            (a.fyyy, c.fyyy),
        ] {
            assert!((p - q).abs() < 1e-12);
        }
    }
}
