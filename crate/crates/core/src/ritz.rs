//! Conforming Ritz/Galerkin eigensolver on star-shaped charts.
//!
//! Basis functions are bivariate polynomials multiplied by
//! `w(x)^c`, `w(x) = 1 − (|x| / R(θ(x)))²`, so the essential
//! conditions hold identically: `c = 1` pins the boundary trace,
//! `c = 2` also kills the normal derivative (`w` vanishes to first
//! order on the boundary). The generalized problem `P w = λ J w` is
//! solved in the reciprocal form `J v = μ P v` — `P` is positive
//! definite on every constrained space, the spurious `J`-kernel lands
//! harmlessly at `μ = 0`, and the eigenvectors come back P-orthonormal
//! exactly as the cluster machinery needs them.

use crate::forms::{
    assemble, BoundaryProblem, Constraint, Field2, FormMatrices, PlateParams, QuadSpec,
};
use crate::geometry::StarChart;
use crate::jet::{radius_jet, Jet3};
use crate::numerics::sym_generalized_eig;
use crate::poly::{Poly2, PolyDerivs};
use crate::reference_spectra::{cluster, EigenCluster};
use crate::{PlateError, Result};
use std::sync::Arc;

/// Reciprocal eigenvalues below this threshold are treated as the
/// `J`-kernel (`λ = ∞` directions) and discarded.
const MU_FLOOR: f64 = 1e-13;
const CLUSTER_REL_TOL: f64 = 1e-9;

/// One basis function `p(x, y) · w(x)^c`.
#[derive(Debug, Clone)]
pub struct RitzField {
    p: PolyDerivs,
    c: u8,
    chart: StarChart,
    label: String,
}

impl RitzField {
    fn w_jet(&self, x: f64, y: f64) -> Jet3 {
        let r = radius_jet(x, y);
        let big_r = self.chart.radius_field_jet(x, y);
        let ratio = r.div(&big_r);
        Jet3::constant(1.0).sub(&ratio.mul(&ratio))
    }
}

impl Field2 for RitzField {
    fn jet(&self, x: f64, y: f64) -> Jet3 {
        let base = self.p.jet(x, y);
        match self.c {
            0 => base,
            c => base.mul(&self.w_jet(x, y).powi(c as u32)),
        }
    }
}

/// Boundary-adapted polynomial basis on a chart.
#[derive(Debug, Clone)]
pub struct RitzBasis {
    pub constraint: Constraint,
    pub degree: u32,
    pub chart: StarChart,
    fields: Vec<RitzField>,
}

impl RitzBasis {
    /// Basis for a problem: base polynomials
    /// `Re/Im[(x+iy)ⁿ]·(x²+y²)ʲ` with `n + 2j ≤ degree`, times the
    /// boundary factor demanded by the problem's essential constraint.
    /// The constant is omitted when the problem quotients constants.
    pub fn for_problem(chart: &StarChart, problem: &BoundaryProblem, degree: u32) -> Self {
        let c = match problem.space_constraint {
            Constraint::Free => 0,
            Constraint::Pinned => 1,
            Constraint::Clamped => 2,
        };
        let s = Poly2::from_terms(&[(2, 0, 1.0), (0, 2, 1.0)]);
        let mut fields = Vec::new();
        for n in 0..=degree {
            for j in 0..=(degree - n) / 2 {
                if n == 0 && j == 0 && c == 0 && problem.quotient_constants {
                    continue;
                }
                let mut radial = Poly2::constant(1.0);
                for _ in 0..j {
                    radial = radial.mul(&s);
                }
                let parities: &[bool] = if n == 0 { &[false] } else { &[false, true] };
                for &imag in parities {
                    let p = Poly2::harmonic(n, imag).mul(&radial);
                    fields.push(RitzField {
                        p: PolyDerivs::new(&p),
                        c,
                        chart: chart.clone(),
                        label: format!(
                            "{}{n}_r{j}_w{c}",
                            if imag { "im" } else { "re" }
                        ),
                    });
                }
            }
        }
        RitzBasis {
            constraint: problem.space_constraint,
            degree,
            chart: chart.clone(),
            fields,
        }
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.fields.iter().map(|f| f.label.clone()).collect()
    }
}

/// One Ritz eigenfunction: coefficients over the basis plus the
/// deflation offset of the quotient problems.
#[derive(Debug, Clone)]
pub struct RitzSolution {
    pub lambda: f64,
    pub coeffs: Vec<f64>,
    offset: f64,
    basis: Arc<RitzBasis>,
}

impl RitzSolution {
    /// Cartesian third-order jet at an interior or boundary point.
    pub fn eval(&self, x: f64, y: f64) -> Result<Jet3> {
        let r = x.hypot(y);
        let big_r = self.basis.chart.radius(y.atan2(x));
        if r > big_r * (1.0 + 1e-9) {
            return Err(PlateError::InvalidParams(format!(
                "point ({x}, {y}) lies outside the chart"
            )));
        }
        Ok(self.jet(x, y))
    }
}

impl Field2 for RitzSolution {
    fn jet(&self, x: f64, y: f64) -> Jet3 {
        let mut out = Jet3::constant(-self.offset);
        for (c, f) in self.coeffs.iter().zip(&self.basis.fields) {
            if *c != 0.0 {
                out = out.add(&f.jet(x, y).scale(*c));
            }
        }
        out
    }
}

/// Assemble the form matrices of `problem` over `basis`.
pub fn assemble_basis(
    chart: &StarChart,
    params: &PlateParams,
    problem: &BoundaryProblem,
    basis: &RitzBasis,
    quad: &QuadSpec,
) -> Result<FormMatrices> {
    if basis.constraint != problem.space_constraint {
        return Err(PlateError::InvalidParams(format!(
            "basis constraint {:?} does not match problem constraint {:?}",
            basis.constraint, problem.space_constraint
        )));
    }
    let fields: Vec<&(dyn Field2 + Sync)> = basis
        .fields
        .iter()
        .map(|f| f as &(dyn Field2 + Sync))
        .collect();
    assemble(chart, params, problem, &fields, basis.labels(), quad)
}

/// Lowest `count` Ritz eigenvalues of `P w = λ J w`, clustered, with
/// P-orthonormal eigenfunctions.
pub fn ritz_spectrum(
    chart: &StarChart,
    params: &PlateParams,
    problem: &BoundaryProblem,
    basis: &RitzBasis,
    quad: &QuadSpec,
    count: usize,
) -> Result<Vec<EigenCluster<RitzSolution>>> {
    if count == 0 || count > basis.len() {
        return Err(PlateError::InvalidParams(format!(
            "count {count} out of range for a basis of dimension {}",
            basis.len()
        )));
    }
    let fm = assemble_basis(chart, params, problem, basis, quad)?;
    // reciprocal route: J v = μ P v with P positive definite
    let (mu, vecs) = sym_generalized_eig(&fm.j, &fm.p)?;
    let usable: Vec<(f64, &Vec<f64>)> = mu
        .iter()
        .zip(&vecs)
        .rev() // largest μ = smallest λ first
        .filter(|(&m, _)| m > MU_FLOOR)
        .map(|(&m, v)| (1.0 / m, v))
        .collect();
    if usable.len() < count {
        return Err(PlateError::SpectrumTruncated {
            requested: count,
            found: usable.len(),
            n_max: basis.len(),
        });
    }

    let shared = Arc::new(basis.clone());
    let solutions: Vec<RitzSolution> = usable[..count]
        .iter()
        .map(|&(lambda, v)| RitzSolution {
            lambda,
            coeffs: v.clone(),
            offset: v
                .iter()
                .zip(&fm.offsets)
                .map(|(c, o)| c * o)
                .sum(),
            basis: Arc::clone(&shared),
        })
        .collect();

    let lambdas: Vec<f64> = solutions.iter().map(|s| s.lambda).collect();
    let groups = cluster(&lambdas, CLUSTER_REL_TOL);
    Ok(groups
        .into_iter()
        .map(|g| {
            let lambda =
                g.iter().map(|&i| lambdas[i]).sum::<f64>() / g.len() as f64;
            EigenCluster {
                lambda,
                indices: g.iter().map(|&i| i + 1).collect(),
                members: g.iter().map(|&i| solutions[i].clone()).collect(),
            }
        })
        .collect())
}

/// Diagnostic solve with constant-quotienting disabled.
///
/// The constant function lies in the kernel of `P` for the free-plate
/// quotient problems, so the plain pencil `(J, P)` is not definite.
/// The shifted pencil `J w = μ (P + J) w` is, and `λ = (1 − μ)/μ`
/// recovers the eigenvalues including the spurious `λ = 0` mode that
/// the quotient removes.
pub fn ritz_unquotiented_spectrum(
    chart: &StarChart,
    params: &PlateParams,
    kind: crate::forms::ProblemKind,
    degree: u32,
    quad: &QuadSpec,
    count: usize,
) -> Result<Vec<EigenCluster<RitzSolution>>> {
    let mut problem = BoundaryProblem::new(kind);
    problem.quotient_constants = false;
    let basis = RitzBasis::for_problem(chart, &problem, degree);
    if count == 0 || count > basis.len() {
        return Err(PlateError::InvalidParams(format!(
            "count {count} out of range for a basis of dimension {}",
            basis.len()
        )));
    }
    let fm = assemble_basis(chart, params, &problem, &basis, quad)?;
    let n = basis.len();
    let shifted = crate::numerics::SymMatrix::from_fn(n, |i, j| fm.p.get(i, j) + fm.j.get(i, j));
    let (mu, vecs) = sym_generalized_eig(&fm.j, &shifted)?;
    let usable: Vec<(f64, &Vec<f64>)> = mu
        .iter()
        .zip(&vecs)
        .rev() // largest μ = smallest λ first
        .filter(|(&m, _)| m > MU_FLOOR)
        .map(|(&m, v)| ((1.0 - m) / m, v))
        .collect();
    if usable.len() < count {
        return Err(PlateError::SpectrumTruncated {
            requested: count,
            found: usable.len(),
            n_max: basis.len(),
        });
    }
    let shared = Arc::new(basis.clone());
    let solutions: Vec<RitzSolution> = usable[..count]
        .iter()
        .map(|&(lambda, v)| RitzSolution {
            lambda,
            coeffs: v.clone(),
            offset: 0.0,
            basis: Arc::clone(&shared),
        })
        .collect();
    let lambdas: Vec<f64> = solutions.iter().map(|s| s.lambda).collect();
    let groups = cluster(&lambdas, CLUSTER_REL_TOL);
    Ok(groups
        .into_iter()
        .map(|g| {
            let lambda = g.iter().map(|&i| lambdas[i]).sum::<f64>() / g.len() as f64;
            EigenCluster {
                lambda,
                indices: g.iter().map(|&i| i + 1).collect(),
                members: g.iter().map(|&i| solutions[i].clone()).collect(),
            }
        })
        .collect())
}
