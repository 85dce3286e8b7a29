//! Bivariate polynomials with exact coefficient arithmetic, and
//! polynomial vector fields used as smooth test perturbations.

use crate::jet::Jet3;
use std::collections::BTreeMap;

/// Polynomial in two variables, stored as a sparse map from `(i, j)`
/// exponent pairs to coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), f64>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Poly2::default();
        p.add_term(0, 0, c);
        p
    }

    pub fn x() -> Self {
        let mut p = Poly2::default();
        p.add_term(1, 0, 1.0);
        p
    }

    pub fn y() -> Self {
        let mut p = Poly2::default();
        p.add_term(0, 1, 1.0);
        p
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&(i, j));
        }
    }

    pub fn from_terms(terms: &[(u32, u32, f64)]) -> Self {
        let mut p = Poly2::default();
        for &(i, j, c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn add(&self, o: &Poly2) -> Poly2 {
        let mut p = self.clone();
        for (&(i, j), &c) in &o.terms {
            p.add_term(i, j, c);
        }
        p
    }

    pub fn scale(&self, s: f64) -> Poly2 {
        let mut p = Poly2::default();
        for (&(i, j), &c) in &self.terms {
            p.add_term(i, j, s * c);
        }
        p
    }

    pub fn sub(&self, o: &Poly2) -> Poly2 {
        self.add(&o.scale(-1.0))
    }

    pub fn mul(&self, o: &Poly2) -> Poly2 {
        let mut p = Poly2::default();
        for (&(i1, j1), &c1) in &self.terms {
            for (&(i2, j2), &c2) in &o.terms {
                p.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        p
    }

    pub fn diff_x(&self) -> Poly2 {
        let mut p = Poly2::default();
        for (&(i, j), &c) in &self.terms {
            if i > 0 {
                p.add_term(i - 1, j, c * i as f64);
            }
        }
        p
    }

    pub fn diff_y(&self) -> Poly2 {
        let mut p = Poly2::default();
        for (&(i, j), &c) in &self.terms {
            if j > 0 {
                p.add_term(i, j - 1, c * j as f64);
            }
        }
        p
    }

    pub fn laplacian(&self) -> Poly2 {
        self.diff_x().diff_x().add(&self.diff_y().diff_y())
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), &c)| c * x.powi(i as i32) * y.powi(j as i32))
            .sum()
    }

    /// Full third-order jet at a point, by evaluating the derivative
    /// polynomials.
    pub fn jet(&self, x: f64, y: f64) -> Jet3 {
        let px = self.diff_x();
        let py = self.diff_y();
        let pxx = px.diff_x();
        let pxy = px.diff_y();
        let pyy = py.diff_y();
        Jet3 {
            f: self.eval(x, y),
            fx: px.eval(x, y),
            fy: py.eval(x, y),
            fxx: pxx.eval(x, y),
            fxy: pxy.eval(x, y),
            fyy: pyy.eval(x, y),
            fxxx: pxx.diff_x().eval(x, y),
            fxxy: pxx.diff_y().eval(x, y),
            fxyy: pyy.diff_x().eval(x, y),
            fyyy: pyy.diff_y().eval(x, y),
        }
    }

    /// Re[(x + iy)^n] or Im[(x + iy)^n] — harmonic polynomials used as
    /// angular generators of the Ritz basis.
    pub fn harmonic(n: u32, imaginary: bool) -> Poly2 {
        let mut p = Poly2::default();
        let mut binom = 1.0_f64;
        for k in 0..=n {
            // i^k coefficient of binom(n,k) x^{n-k} (iy)^k
            let c = match k % 4 {
                0 => binom,
                1 => binom,
                2 => -binom,
                _ => -binom,
            };
            let is_imag = k % 2 == 1;
            if is_imag == imaginary {
                p.add_term(n - k, k, c);
            }
            binom *= (n - k) as f64 / (k + 1) as f64;
        }
        p
    }
}

/// A polynomial with its ten derivative polynomials precomputed, for
/// repeated jet evaluation at many points.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyDerivs {
    d: [Poly2; 10],
}

impl PolyDerivs {
    pub fn new(p: &Poly2) -> Self {
        let px = p.diff_x();
        let py = p.diff_y();
        let pxx = px.diff_x();
        let pxy = px.diff_y();
        let pyy = py.diff_y();
        let d = [
            p.clone(),
            px.clone(),
            py.clone(),
            pxx.clone(),
            pxy.clone(),
            pyy.clone(),
            pxx.diff_x(),
            pxx.diff_y(),
            pyy.diff_x(),
            pyy.diff_y(),
        ];
        PolyDerivs { d }
    }

    pub fn jet(&self, x: f64, y: f64) -> Jet3 {
        Jet3 {
            f: self.d[0].eval(x, y),
            fx: self.d[1].eval(x, y),
            fy: self.d[2].eval(x, y),
            fxx: self.d[3].eval(x, y),
            fxy: self.d[4].eval(x, y),
            fyy: self.d[5].eval(x, y),
            fxxx: self.d[6].eval(x, y),
            fxxy: self.d[7].eval(x, y),
            fxyy: self.d[8].eval(x, y),
            fyyy: self.d[9].eval(x, y),
        }
    }
}

/// Polynomial vector field `ψ = (ψ₁, ψ₂)` used as a smooth domain
/// perturbation in the pull-back identities.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialField {
    pub x: Poly2,
    pub y: Poly2,
}

impl PolynomialField {
    pub fn new(x: Poly2, y: Poly2) -> Self {
        PolynomialField { x, y }
    }

    pub fn zero() -> Self {
        PolynomialField {
            x: Poly2::zero(),
            y: Poly2::zero(),
        }
    }

    /// The identity field `ψ(p) = p` (dilation direction).
    pub fn identity() -> Self {
        PolynomialField {
            x: Poly2::x(),
            y: Poly2::y(),
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> [f64; 2] {
        [self.x.eval(x, y), self.y.eval(x, y)]
    }

    pub fn jets(&self, x: f64, y: f64) -> [Jet3; 2] {
        [self.x.jet(x, y), self.y.jet(x, y)]
    }

    /// Jacobian matrix `[[∂ψ₁/∂x, ∂ψ₁/∂y], [∂ψ₂/∂x, ∂ψ₂/∂y]]`.
    pub fn jacobian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        [
            [self.x.diff_x().eval(x, y), self.x.diff_y().eval(x, y)],
            [self.y.diff_x().eval(x, y), self.y.diff_y().eval(x, y)],
        ]
    }

    pub fn divergence(&self, x: f64, y: f64) -> f64 {
        self.x.diff_x().eval(x, y) + self.y.diff_y().eval(x, y)
    }
}
