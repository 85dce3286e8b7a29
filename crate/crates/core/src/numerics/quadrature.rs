use std::f64::consts::PI;

/// Nodes and weights of a one-dimensional quadrature rule.
///
/// Nodes are strictly increasing and weights strictly positive. A
/// Gauss-Legendre rule lives on `[-1, 1]` (weights sum to 2), the
/// periodic rule on `[0, 2π)` (weights sum to 2π).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate `f` over the rule's native interval.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .collect();
        pairwise_sum(&terms)
    }
}

/// Pairwise (cascade) summation. Deterministic and with O(log n) error
/// growth; used for every quadrature reduction in the crate.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2 => v[0] + v[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
        }
    }
}

/// n-point Gauss-Legendre rule on `[-1, 1]`, exact for polynomials of
/// degree `2n - 1`. Nodes are the roots of the Legendre polynomial
/// `P_n`, found by Newton iteration from the Chebyshev-like initial
/// guess.
pub fn gauss_legendre(n: usize) -> QuadratureRule {
    assert!(n >= 1, "gauss_legendre requires n >= 1");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // initial guess for the i-th root in (0, 1]
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_deriv(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (p2, d2) = legendre_with_deriv(n, x);
                dp = d2;
                x -= p2 / d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_with_deriv(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    QuadratureRule { nodes, weights }
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// m-point periodic trapezoid rule on `[0, 2π)`: nodes `2πj/m`, equal
/// weights `2π/m`. Spectrally exact for trigonometric polynomials of
/// degree below `m/2`.
pub fn periodic_trapezoid(m: usize) -> QuadratureRule {
    assert!(m >= 1, "periodic_trapezoid requires m >= 1");
    let w = 2.0 * PI / m as f64;
    QuadratureRule {
        nodes: (0..m).map(|j| w * j as f64).collect(),
        weights: vec![w; m],
    }
}
