//! The bilinear forms of the plate eigenproblems — `M`, `B`, `L`,
//! `P = (1−σ)M + σB + τL` and the three right-hand forms `J₁`, `J₂`,
//! `J₃` — as quadrature-backed evaluators and assembled matrices, plus
//! their pull-backs under deformations `φ_t = id + tψ`.

use crate::geometry::{boundary_frame, BoundaryFrame, StarChart};
use crate::jet::Jet3;
use crate::numerics::{gauss_legendre, pairwise_sum, SymMatrix};
use crate::poly::{Poly2, PolynomialField};
use crate::{PlateError, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Physical parameters: Poisson ratio `σ` and lateral tension `τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateParams {
    pub sigma: f64,
    pub tau: f64,
}

impl PlateParams {
    pub fn new(sigma: f64, tau: f64) -> Self {
        PlateParams { sigma, tau }
    }

    /// Coercivity range in two dimensions is `σ ∈ (−1, 1)`; tension is
    /// nonnegative, and strictly positive for the problems whose
    /// quadratic form would otherwise lose the gradient term it needs.
    pub fn validate(&self, kind: ProblemKind) -> Result<()> {
        if !(self.sigma > -1.0 && self.sigma < 1.0) {
            return Err(PlateError::InvalidParams(format!(
                "sigma must lie in (-1, 1), got {}",
                self.sigma
            )));
        }
        if !(self.tau >= 0.0) {
            return Err(PlateError::InvalidParams(format!(
                "tau must be >= 0, got {}",
                self.tau
            )));
        }
        if self.tau == 0.0
            && matches!(kind, ProblemKind::Neumann | ProblemKind::SteklovBP)
        {
            return Err(PlateError::InvalidParams(format!(
                "{kind:?} requires tau > 0"
            )));
        }
        Ok(())
    }
}

/// The five boundary-value problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProblemKind {
    Dirichlet,
    Navier,
    Neumann,
    SteklovKS,
    SteklovBP,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 5] = [
        ProblemKind::Dirichlet,
        ProblemKind::Navier,
        ProblemKind::Neumann,
        ProblemKind::SteklovKS,
        ProblemKind::SteklovBP,
    ];
}

/// Essential constraint satisfied by the trial space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constraint {
    /// No essential condition.
    Free,
    /// `u = 0` on the boundary.
    Pinned,
    /// `u = ∂u/∂ν = 0` on the boundary.
    Clamped,
}

/// A problem kind together with its weak-form data: which `J` form it
/// pairs with, the essential constraint of its space, and whether the
/// constant kernel must be quotiented away.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryProblem {
    pub kind: ProblemKind,
    pub form_index: u8,
    pub space_constraint: Constraint,
    pub quotient_constants: bool,
}

impl BoundaryProblem {
    pub fn new(kind: ProblemKind) -> Self {
        let (form_index, space_constraint, quotient_constants) = match kind {
            ProblemKind::Dirichlet => (1, Constraint::Clamped, false),
            ProblemKind::Navier => (1, Constraint::Pinned, false),
            ProblemKind::Neumann => (1, Constraint::Free, true),
            ProblemKind::SteklovKS => (2, Constraint::Pinned, false),
            ProblemKind::SteklovBP => (3, Constraint::Free, true),
        };
        BoundaryProblem {
            kind,
            form_index,
            space_constraint,
            quotient_constants,
        }
    }
}

/// Anything that can report its third-order jet at a point.
pub trait Field2: Sync {
    fn jet(&self, x: f64, y: f64) -> Jet3;
}

impl Field2 for Poly2 {
    fn jet(&self, x: f64, y: f64) -> Jet3 {
        Poly2::jet(self, x, y)
    }
}

/// Quadrature sizes for assembly and form evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub n_radial: usize,
    pub n_angular: usize,
    pub n_boundary: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            n_radial: 48,
            n_angular: 128,
            n_boundary: 256,
        }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_radial == 0 || self.n_angular < 4 || self.n_boundary < 4 {
            return Err(PlateError::InvalidParams(format!(
                "quadrature sizes too small: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Tensor quadrature over a star chart: radial Gauss–Legendre times
/// angular trapezoid, with Jacobian `s R(θ)²`.
#[derive(Debug, Clone)]
pub struct VolumeRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl VolumeRule {
    pub fn new(chart: &StarChart, n_radial: usize, n_angular: usize) -> Self {
        let gl = gauss_legendre(n_radial);
        let dtheta = 2.0 * PI / n_angular as f64;
        let mut points = Vec::with_capacity(n_radial * n_angular);
        let mut weights = Vec::with_capacity(n_radial * n_angular);
        for j in 0..n_angular {
            let theta = dtheta * j as f64;
            let r = chart.radius(theta);
            let (st, ct) = theta.sin_cos();
            for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
                let s = 0.5 * (x + 1.0);
                points.push([s * r * ct, s * r * st]);
                weights.push(0.5 * w * dtheta * s * r * r);
            }
        }
        VolumeRule { points, weights }
    }

    pub fn integrate<F: Fn([f64; 2]) -> f64>(&self, f: F) -> f64 {
        let terms: Vec<f64> = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .collect();
        pairwise_sum(&terms)
    }
}

/// Boundary quadrature: the periodic trapezoid rule in `θ` with the
/// arc element folded into the weights.
#[derive(Debug, Clone)]
pub struct BoundaryRule {
    pub thetas: Vec<f64>,
    pub frames: Vec<BoundaryFrame>,
    pub weights: Vec<f64>,
}

impl BoundaryRule {
    pub fn new(chart: &StarChart, m: usize) -> Self {
        let dtheta = 2.0 * PI / m as f64;
        let thetas: Vec<f64> = (0..m).map(|j| dtheta * j as f64).collect();
        let frames: Vec<BoundaryFrame> =
            thetas.iter().map(|&t| boundary_frame(chart, t)).collect();
        let weights: Vec<f64> = frames.iter().map(|f| dtheta * f.arc_weight).collect();
        BoundaryRule {
            thetas,
            frames,
            weights,
        }
    }

    /// `∮ f dσ` with `f` given per grid node.
    pub fn integrate<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        let terms: Vec<f64> = (0..self.thetas.len())
            .map(|i| self.weights[i] * f(i))
            .collect();
        pairwise_sum(&terms)
    }

    pub fn perimeter(&self) -> f64 {
        pairwise_sum(&self.weights)
    }
}

/// Frobenius product of the two Hessians, `D²u : D²v`.
pub fn hess_dot(u: &Jet3, v: &Jet3) -> f64 {
    u.fxx * v.fxx + 2.0 * u.fxy * v.fxy + u.fyy * v.fyy
}

pub fn m_density(u: &Jet3, v: &Jet3) -> f64 {
    hess_dot(u, v)
}

pub fn b_density(u: &Jet3, v: &Jet3) -> f64 {
    u.laplacian() * v.laplacian()
}

pub fn l_density(u: &Jet3, v: &Jet3) -> f64 {
    u.fx * v.fx + u.fy * v.fy
}

/// Integrand of `P = (1−σ)M + σB + τL`.
pub fn p_density(params: &PlateParams, u: &Jet3, v: &Jet3) -> f64 {
    (1.0 - params.sigma) * m_density(u, v)
        + params.sigma * b_density(u, v)
        + params.tau * l_density(u, v)
}

/// All six forms plus `P`, assembled over a basis.
#[derive(Debug, Clone)]
pub struct FormMatrices {
    pub m: SymMatrix,
    pub b: SymMatrix,
    pub l: SymMatrix,
    pub p: SymMatrix,
    /// The `J` form selected by the problem (`J₁`, `J₂` or `J₃`),
    /// already deflated against constants when the problem quotients
    /// them.
    pub j: SymMatrix,
    /// Per-field constant offsets used by the deflation (zero when the
    /// problem does not quotient constants). The function represented
    /// by a coefficient vector `c` is `Σ cᵢ(uᵢ − offsetᵢ)`.
    pub offsets: Vec<f64>,
    pub labels: Vec<String>,
}

/// Assemble the form matrices of `problem` over `fields`.
///
/// When the problem quotients constants, each field is replaced by
/// `u − c(u)` where `c(u)` is the mean in the inner product carried by
/// the problem's `J` form (volume mean for `J₁`, boundary mean for
/// `J₃`). Derivative-based forms are unaffected; the shift makes the
/// discrete problem equivalent to the Galerkin problem on the full
/// span restricted to its nonzero eigenvalues.
pub fn assemble(
    chart: &StarChart,
    params: &PlateParams,
    problem: &BoundaryProblem,
    fields: &[&(dyn Field2 + Sync)],
    labels: Vec<String>,
    quad: &QuadSpec,
) -> Result<FormMatrices> {
    params.validate(problem.kind)?;
    quad.validate()?;
    let n = fields.len();
    if labels.len() != n {
        return Err(PlateError::InvalidParams(format!(
            "{} labels for {} fields",
            labels.len(),
            n
        )));
    }

    let vol = VolumeRule::new(chart, quad.n_radial, quad.n_angular);
    let bnd = BoundaryRule::new(chart, quad.n_boundary);

    // cache jets at every quadrature node, in parallel over fields
    let vol_jets: Vec<Vec<Jet3>> = fields
        .par_iter()
        .map(|f| vol.points.iter().map(|&[x, y]| f.jet(x, y)).collect())
        .collect();
    let bnd_jets: Vec<Vec<Jet3>> = fields
        .par_iter()
        .map(|f| {
            bnd.frames
                .iter()
                .map(|fr| f.jet(fr.point[0], fr.point[1]))
                .collect()
        })
        .collect();

    // constant offsets for the quotient problems
    let offsets: Vec<f64> = if problem.quotient_constants {
        match problem.form_index {
            1 => {
                let area = pairwise_sum(&vol.weights);
                (0..n)
                    .map(|i| {
                        let terms: Vec<f64> = vol
                            .weights
                            .iter()
                            .zip(&vol_jets[i])
                            .map(|(&w, j)| w * j.f)
                            .collect();
                        pairwise_sum(&terms) / area
                    })
                    .collect()
            }
            3 => {
                let per = bnd.perimeter();
                (0..n)
                    .map(|i| bnd.integrate(|k| bnd_jets[i][k].f) / per)
                    .collect()
            }
            _ => {
                return Err(PlateError::InvalidParams(
                    "quotienting is only defined for the J1 and J3 problems".into(),
                ))
            }
        }
    } else {
        vec![0.0; n]
    };

    // interior forms, parallel over the upper triangle
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .collect();
    let sigma = params.sigma;
    let tau = params.tau;
    let interior: Vec<(f64, f64, f64, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (ui, uj) = (&vol_jets[i], &vol_jets[j]);
            let nn = vol.weights.len();
            let mut tm = Vec::with_capacity(nn);
            let mut tb = Vec::with_capacity(nn);
            let mut tl = Vec::with_capacity(nn);
            let mut tj1 = Vec::with_capacity(nn);
            for k in 0..nn {
                let w = vol.weights[k];
                let (a, b) = (&ui[k], &uj[k]);
                tm.push(w * m_density(a, b));
                tb.push(w * b_density(a, b));
                tl.push(w * l_density(a, b));
                tj1.push(w * (a.f - offsets[i]) * (b.f - offsets[j]));
            }
            (
                pairwise_sum(&tm),
                pairwise_sum(&tb),
                pairwise_sum(&tl),
                pairwise_sum(&tj1),
            )
        })
        .collect();

    let mut m = SymMatrix::zeros(n);
    let mut b = SymMatrix::zeros(n);
    let mut l = SymMatrix::zeros(n);
    let mut p = SymMatrix::zeros(n);
    let mut j1 = SymMatrix::zeros(n);
    for (&(i, j), &(vm, vb, vl, vj)) in pairs.iter().zip(&interior) {
        m.set(i, j, vm);
        b.set(i, j, vb);
        l.set(i, j, vl);
        p.set(i, j, (1.0 - sigma) * vm + sigma * vb + tau * vl);
        j1.set(i, j, vj);
    }

    let j = match problem.form_index {
        1 => j1,
        2 => SymMatrix::from_fn(n, |i, j| {
            bnd.integrate(|k| {
                let nu = bnd.frames[k].normal;
                let a = &bnd_jets[i][k];
                let b = &bnd_jets[j][k];
                (a.fx * nu[0] + a.fy * nu[1]) * (b.fx * nu[0] + b.fy * nu[1])
            })
        }),
        3 => SymMatrix::from_fn(n, |i, j| {
            bnd.integrate(|k| (bnd_jets[i][k].f - offsets[i]) * (bnd_jets[j][k].f - offsets[j]))
        }),
        other => {
            return Err(PlateError::InvalidParams(format!(
                "unknown form index {other}"
            )))
        }
    };

    Ok(FormMatrices {
        m,
        b,
        l,
        p,
        j,
        offsets,
        labels,
    })
}

/// The six form labels accepted by [`pullback_form_value`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormKind {
    M,
    B,
    L,
    J1,
    J2,
    J3,
}

/// Value, gradient and Hessian of the transported field
/// `v = u ∘ φ_t⁻¹` at `y = φ_t(x)`.
#[derive(Debug, Clone, Copy)]
pub struct PulledJet {
    pub f: f64,
    pub grad: [f64; 2],
    pub hess: [[f64; 2]; 2],
    pub det: f64,
}

fn mat_inv(a: [[f64; 2]; 2]) -> ([[f64; 2]; 2], f64) {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    (
        [
            [a[1][1] / det, -a[0][1] / det],
            [-a[1][0] / det, a[0][0] / det],
        ],
        det,
    )
}

/// Transport the jet of `u` at `x` to derivatives of `v = u ∘ φ_t⁻¹`
/// at `φ_t(x)`, `φ_t = id + tψ`, by the inverse-Jacobian chain rule.
///
/// First order: `∇v = A⁻ᵀ∇u` with `A = I + t Dψ`. Second order by
/// differentiating that identity once more; the derivative of `A⁻¹`
/// is `−A⁻¹(∂A)A⁻¹`.
pub fn pullback_jet(u: &Jet3, psi: &[Jet3; 2], t: f64) -> Result<PulledJet> {
    let a = [
        [1.0 + t * psi[0].fx, t * psi[0].fy],
        [t * psi[1].fx, 1.0 + t * psi[1].fy],
    ];
    let (ainv, det) = mat_inv(a);
    if !(det > 0.0) {
        return Err(PlateError::NotInjective { det, t });
    }

    let grad_u = [u.fx, u.fy];
    let grad = [
        ainv[0][0] * grad_u[0] + ainv[1][0] * grad_u[1],
        ainv[0][1] * grad_u[0] + ainv[1][1] * grad_u[1],
    ];

    // ∂_l A: second derivatives of ψ
    let da = [
        [
            [t * psi[0].fxx, t * psi[0].fxy],
            [t * psi[1].fxx, t * psi[1].fxy],
        ],
        [
            [t * psi[0].fxy, t * psi[0].fyy],
            [t * psi[1].fxy, t * psi[1].fyy],
        ],
    ];
    // ∂_l (A⁻¹) = −A⁻¹ (∂_l A) A⁻¹
    let mut dainv = [[[0.0; 2]; 2]; 2];
    for l in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                let mut s = 0.0;
                for p in 0..2 {
                    for q in 0..2 {
                        s += ainv[i][p] * da[l][p][q] * ainv[q][j];
                    }
                }
                dainv[l][i][j] = -s;
            }
        }
    }

    let hess_u = [[u.fxx, u.fxy], [u.fxy, u.fyy]];
    // ∂_l w_j with w_j = Σ_i (A⁻¹)_{ij} ∂_i u
    let mut dw = [[0.0; 2]; 2];
    for l in 0..2 {
        for j in 0..2 {
            let mut s = 0.0;
            for i in 0..2 {
                s += dainv[l][i][j] * grad_u[i] + ainv[i][j] * hess_u[i][l];
            }
            dw[l][j] = s;
        }
    }
    let mut hess = [[0.0; 2]; 2];
    for k in 0..2 {
        for j in 0..2 {
            let mut s = 0.0;
            for l in 0..2 {
                s += ainv[l][k] * dw[l][j];
            }
            hess[k][j] = s;
        }
    }
    // symmetrize away the last bits of roundoff
    let off = 0.5 * (hess[0][1] + hess[1][0]);
    hess[0][1] = off;
    hess[1][0] = off;

    Ok(PulledJet {
        f: u.f,
        grad,
        hess,
        det,
    })
}

fn pulled_pair(
    u1: &Poly2,
    u2: &Poly2,
    psi: &PolynomialField,
    t: f64,
    x: f64,
    y: f64,
) -> Result<(PulledJet, PulledJet)> {
    let pj = psi.jets(x, y);
    let a = pullback_jet(&u1.jet(x, y), &pj, t)?;
    let b = pullback_jet(&u2.jet(x, y), &pj, t)?;
    Ok((a, b))
}

/// Evaluate one of the six forms on the deformed domain `φ_t(Ω)` for
/// the transported fields `v_i = u_i ∘ φ_t⁻¹`, by change of variables
/// back to the chart.
pub fn pullback_form_value(
    form: FormKind,
    psi: &PolynomialField,
    t: f64,
    u1: &Poly2,
    u2: &Poly2,
    chart: &StarChart,
    quad: &QuadSpec,
) -> Result<f64> {
    quad.validate()?;
    match form {
        FormKind::M | FormKind::B | FormKind::L | FormKind::J1 => {
            let vol = VolumeRule::new(chart, quad.n_radial, quad.n_angular);
            let mut terms = Vec::with_capacity(vol.points.len());
            for (&[x, y], &w) in vol.points.iter().zip(&vol.weights) {
                let (a, b) = pulled_pair(u1, u2, psi, t, x, y)?;
                let density = match form {
                    FormKind::M => {
                        a.hess[0][0] * b.hess[0][0]
                            + 2.0 * a.hess[0][1] * b.hess[0][1]
                            + a.hess[1][1] * b.hess[1][1]
                    }
                    FormKind::B => {
                        (a.hess[0][0] + a.hess[1][1]) * (b.hess[0][0] + b.hess[1][1])
                    }
                    FormKind::L => a.grad[0] * b.grad[0] + a.grad[1] * b.grad[1],
                    _ => a.f * b.f,
                };
                terms.push(w * density * a.det);
            }
            Ok(pairwise_sum(&terms))
        }
        FormKind::J2 | FormKind::J3 => {
            let m = quad.n_boundary;
            let dtheta = 2.0 * PI / m as f64;
            let mut terms = Vec::with_capacity(m);
            for jdx in 0..m {
                let theta = dtheta * jdx as f64;
                let [r, r1, _, _] = chart.radius_derivs(theta);
                let (st, ct) = theta.sin_cos();
                let (x, y) = (r * ct, r * st);
                // tangent of the deformed curve: A(c(θ)) c'(θ)
                let cp = [r1 * ct - r * st, r1 * st + r * ct];
                let pj = psi.jets(x, y);
                let a_mat = [
                    [1.0 + t * pj[0].fx, t * pj[0].fy],
                    [t * pj[1].fx, 1.0 + t * pj[1].fy],
                ];
                let tx = a_mat[0][0] * cp[0] + a_mat[0][1] * cp[1];
                let ty = a_mat[1][0] * cp[0] + a_mat[1][1] * cp[1];
                let arc = (tx * tx + ty * ty).sqrt();
                let density = match form {
                    FormKind::J3 => u1.eval(x, y) * u2.eval(x, y),
                    _ => {
                        let nu = [ty / arc, -tx / arc];
                        let (a, b) = pulled_pair(u1, u2, psi, t, x, y)?;
                        (a.grad[0] * nu[0] + a.grad[1] * nu[1])
                            * (b.grad[0] * nu[0] + b.grad[1] * nu[1])
                    }
                };
                terms.push(dtheta * arc * density);
            }
            Ok(pairwise_sum(&terms))
        }
    }
}

/// Area of the deformed domain, `∫_Ω |det(I + t Dψ)| dx`, with the
/// same injectivity guard as the form pull-backs.
pub fn pullback_volume(
    psi: &PolynomialField,
    t: f64,
    chart: &StarChart,
    quad: &QuadSpec,
) -> Result<f64> {
    quad.validate()?;
    let vol = VolumeRule::new(chart, quad.n_radial, quad.n_angular);
    let mut terms = Vec::with_capacity(vol.points.len());
    for (&[x, y], &w) in vol.points.iter().zip(&vol.weights) {
        let j = psi.jacobian(x, y);
        let a = [
            [1.0 + t * j[0][0], t * j[0][1]],
            [t * j[1][0], 1.0 + t * j[1][1]],
        ];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if !(det > 0.0) {
            return Err(PlateError::NotInjective { det, t });
        }
        terms.push(w * det);
    }
    Ok(pairwise_sum(&terms))
}
