//! Semi-analytic reference spectra: the disk through Bessel boundary
//! determinants for all five problems, and the rectangle closed form
//! for the Navier problem.
//!
//! Disk eigenfunctions separate as `f(r)·cos nθ` / `f(r)·sin nθ`. For
//! the interior problems (`Δ²u − τΔu = λu`) the radial factor combines
//! `J_n(kr)` and `I_n(lr)` with `k² = (√(τ²+4λ)−τ)/2`, `l² = k² + τ`,
//! `λ = k²l²`; roots of a 2×2 boundary determinant in `k` give the
//! spectrum. For the Steklov problems (`Δ²u − τΔu = 0` inside, λ on
//! the boundary) the radial space is `{rⁿ, I_n(√τ r)}` (`τ > 0`) or
//! `{rⁿ, rⁿ⁺²}` (`τ = 0`) and λ enters one boundary row linearly, so
//! each angular index carries exactly one eigenvalue.

use crate::forms::{p_density, BoundaryProblem, Field2, PlateParams, ProblemKind, QuadSpec, VolumeRule};
use crate::geometry::StarChart;
use crate::jet::{radius_jet, theta_jet, Jet3};
use crate::numerics::{bessel_i_scaled, bessel_j, find_roots};
use crate::{PlateError, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Angular factor of a disk mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Cos,
    Sin,
}

/// Radial solution space of a disk mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RadialBasis {
    /// `J_n(kr)` and (rescaled) `I_n(lr)`; interior eigenvalue λ = k²l².
    Interior { k: f64, l: f64 },
    /// `rⁿ` and (rescaled) `I_n(sr)` with `s = √τ`; Steklov, τ > 0.
    SteklovTension { s: f64 },
    /// `rⁿ` and `rⁿ⁺²`; Steklov, τ = 0.
    SteklovHarmonic,
}

/// One eigenfunction of a disk problem, `scale·[A f₁(r) + B f₂(r)]·g(nθ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskMode {
    pub problem: ProblemKind,
    pub n: u32,
    pub parity: Parity,
    pub lambda: f64,
    pub radial: RadialBasis,
    pub coeffs: [f64; 2],
    pub radius: f64,
    /// Multiplier making the mode P-normalized.
    pub scale: f64,
}

/// A group of members sharing one eigenvalue, P-orthonormal.
/// `indices` are 1-based positions in the global ascending ordering.
#[derive(Debug, Clone)]
pub struct EigenCluster<M> {
    pub lambda: f64,
    pub indices: Vec<usize>,
    pub members: Vec<M>,
}

/// `[f, f', f'', f''']` of `r^p`.
fn power_derivs(p: u32, r: f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (m, o) in out.iter_mut().enumerate() {
        let m = m as u32;
        if p >= m {
            let mut c = 1.0;
            for i in 0..m {
                c *= (p - i) as f64;
            }
            *o = c * r.powi((p - m) as i32);
        }
    }
    out
}

impl DiskMode {
    /// `[f, f', f'', f''']` of radial component `which` at `r`.
    ///
    /// The `I` components are rescaled by `e^{−aR}` (`a` the growth
    /// rate), which keeps every value representable; the rescaling is
    /// absorbed into the coefficient normalization.
    fn component_derivs(&self, which: usize, r: f64) -> Result<[f64; 4]> {
        let n = self.n;
        match (self.radial, which) {
            (RadialBasis::Interior { k, .. }, 0) => {
                let mut d = [0.0; 4];
                for (m, o) in d.iter_mut().enumerate() {
                    *o = k.powi(m as i32) * bessel_j(n, k * r, m as u8)?;
                }
                Ok(d)
            }
            (RadialBasis::Interior { l, .. }, _) => scaled_i_derivs(n, l, r, self.radius),
            (RadialBasis::SteklovTension { .. }, 0) | (RadialBasis::SteklovHarmonic, 0) => {
                Ok(power_derivs(n, r))
            }
            (RadialBasis::SteklovTension { s }, _) => scaled_i_derivs(n, s, r, self.radius),
            (RadialBasis::SteklovHarmonic, _) => Ok(power_derivs(n + 2, r)),
        }
    }

    /// `[f, f', f'', f''']` of the full normalized radial factor.
    pub fn radial_derivs(&self, r: f64) -> Result<[f64; 4]> {
        let a = self.component_derivs(0, r)?;
        let b = self.component_derivs(1, r)?;
        let mut out = [0.0; 4];
        for m in 0..4 {
            out[m] = self.scale * (self.coeffs[0] * a[m] + self.coeffs[1] * b[m]);
        }
        Ok(out)
    }

    /// Cartesian third-order jet of the mode at the polar point
    /// `(r cos θ, r sin θ)`; rejects exterior points.
    pub fn eval(&self, r: f64, theta: f64) -> Result<Jet3> {
        if !(0.0 <= r && r <= self.radius * (1.0 + 1e-9)) {
            return Err(PlateError::InvalidParams(format!(
                "r = {r} outside the disk of radius {}",
                self.radius
            )));
        }
        let f = self.radial_derivs(r)?;
        let (x, y) = (r * theta.cos(), r * theta.sin());
        let fr = radius_jet(x, y).compose(f);
        if self.n == 0 {
            return Ok(fr);
        }
        let th = theta_jet(x, y).scale(self.n as f64);
        let g = match self.parity {
            Parity::Cos => th.cos(),
            Parity::Sin => th.sin(),
        };
        Ok(fr.mul(&g))
    }
}

impl Field2 for DiskMode {
    fn jet(&self, x: f64, y: f64) -> Jet3 {
        let r = x.hypot(y);
        self.eval(r.min(self.radius), y.atan2(x))
            .expect("disk mode evaluation")
    }
}

fn scaled_i_derivs(n: u32, rate: f64, r: f64, radius: f64) -> Result<[f64; 4]> {
    let damp = (rate * (r - radius)).exp();
    let mut d = [0.0; 4];
    for (m, o) in d.iter_mut().enumerate() {
        *o = rate.powi(m as i32) * damp * bessel_i_scaled(n, rate * r, m as u8)?;
    }
    Ok(d)
}

/// Boundary operators applied to a radial factor on the circle `r = R`,
/// written through the polar Laplacian `Δ = ∂ᵣᵣ + ∂ᵣ/r − n²/r²`.
#[derive(Debug, Clone, Copy)]
enum BoundaryRow {
    /// `u`
    Value,
    /// `∂u/∂ν`
    Slope,
    /// `(1−σ)∂²u/∂ν² + σΔu`
    Moment,
    /// `τ∂u/∂ν − ∂Δu/∂ν − (1−σ)div_∂Ω(ν·D²u)_∂Ω`
    Shear,
}

fn row_value(row: BoundaryRow, f: &[f64; 4], n: u32, radius: f64, params: &PlateParams) -> f64 {
    let nn = (n * n) as f64;
    let r = radius;
    match row {
        BoundaryRow::Value => f[0],
        BoundaryRow::Slope => f[1],
        BoundaryRow::Moment => f[2] + params.sigma * (f[1] / r - nn * f[0] / (r * r)),
        BoundaryRow::Shear => {
            params.tau * f[1]
                - (f[3] + f[2] / r - (1.0 + nn) * f[1] / (r * r) + 2.0 * nn * f[0] / (r * r * r))
                + (1.0 - params.sigma) * (nn / r) * (f[1] / r - f[0] / (r * r))
        }
    }
}

fn interior_rows(kind: ProblemKind) -> [BoundaryRow; 2] {
    match kind {
        ProblemKind::Dirichlet => [BoundaryRow::Value, BoundaryRow::Slope],
        ProblemKind::Navier => [BoundaryRow::Value, BoundaryRow::Moment],
        ProblemKind::Neumann => [BoundaryRow::Moment, BoundaryRow::Shear],
        _ => unreachable!("interior_rows is only called for interior problems"),
    }
}

/// Scan/bisection step in the dimensionless variable `x = kR`.
const SCAN_STEP: f64 = 0.01;
const SCAN_START: f64 = 0.05;
const CLUSTER_REL_TOL: f64 = 1e-9;

fn unnormalized_interior(
    kind: ProblemKind,
    params: &PlateParams,
    n: u32,
    k: f64,
    radius: f64,
) -> Result<DiskMode> {
    let l = (k * k + params.tau).sqrt();
    let lambda = k * k * l * l;
    let mut mode = DiskMode {
        problem: kind,
        n,
        parity: Parity::Cos,
        lambda,
        radial: RadialBasis::Interior { k, l },
        coeffs: [1.0, 0.0],
        radius,
        scale: 1.0,
    };
    let fa = mode.component_derivs(0, radius)?;
    mode.coeffs = [0.0, 1.0];
    let fb = mode.component_derivs(1, radius)?;
    let rows = interior_rows(kind);
    let a = [
        row_value(rows[0], &fa, n, radius, params),
        row_value(rows[0], &fb, n, radius, params),
    ];
    let b = [
        row_value(rows[1], &fa, n, radius, params),
        row_value(rows[1], &fb, n, radius, params),
    ];
    // null vector of the (singular) 2×2 matrix, from its larger row
    mode.coeffs = if a[0].hypot(a[1]) >= b[0].hypot(b[1]) {
        [a[1], -a[0]]
    } else {
        [b[1], -b[0]]
    };
    Ok(mode)
}

fn interior_determinant(
    kind: ProblemKind,
    params: &PlateParams,
    n: u32,
    k: f64,
    radius: f64,
) -> Result<f64> {
    let l = (k * k + params.tau).sqrt();
    let probe = DiskMode {
        problem: kind,
        n,
        parity: Parity::Cos,
        lambda: 0.0,
        radial: RadialBasis::Interior { k, l },
        coeffs: [1.0, 0.0],
        radius,
        scale: 1.0,
    };
    let fa = probe.component_derivs(0, radius)?;
    let fb = probe.component_derivs(1, radius)?;
    let rows = interior_rows(kind);
    Ok(row_value(rows[0], &fa, n, radius, params) * row_value(rows[1], &fb, n, radius, params)
        - row_value(rows[0], &fb, n, radius, params)
            * row_value(rows[1], &fa, n, radius, params))
}

/// Roots in `k` for one angular index of an interior problem, ascending.
fn interior_roots(
    kind: ProblemKind,
    params: &PlateParams,
    n: u32,
    radius: f64,
    x_max: f64,
) -> Result<Vec<f64>> {
    let steps = ((x_max - SCAN_START) / SCAN_STEP).ceil() as usize;
    find_roots(
        |x| interior_determinant(kind, params, n, x / radius, radius).unwrap_or(f64::NAN),
        SCAN_START,
        x_max,
        steps.max(2),
        1e-13,
    )
    .map(|xs| xs.into_iter().map(|x| x / radius).collect())
}

/// The single Steklov eigenvalue for angular index `n`, plus the
/// unnormalized mode. `None` when only the quotiented `λ = 0` exists.
fn steklov_mode(
    kind: ProblemKind,
    params: &PlateParams,
    n: u32,
    radius: f64,
) -> Result<Option<DiskMode>> {
    let radial = if params.tau > 0.0 {
        RadialBasis::SteklovTension {
            s: params.tau.sqrt(),
        }
    } else {
        RadialBasis::SteklovHarmonic
    };
    let mut mode = DiskMode {
        problem: kind,
        n,
        parity: Parity::Cos,
        lambda: 0.0,
        radial,
        coeffs: [1.0, 0.0],
        radius,
        scale: 1.0,
    };
    let fa = mode.component_derivs(0, radius)?;
    let fb = mode.component_derivs(1, radius)?;
    // normalize each component to unit max so the combination and the
    // collinearity test are scale-free (the tension component decays
    // factorially in n and would otherwise dwarf the threshold)
    let scale = |f: &[f64; 4]| f.iter().fold(0.0_f64, |s, v| s.max(v.abs()));
    let na = scale(&fa);
    let nb = scale(&fb);
    if na == 0.0 || nb == 0.0 {
        return Err(PlateError::DegenerateDeterminant(n as usize));
    }
    let fa_n = [fa[0] / na, fa[1] / na, fa[2] / na, fa[3] / na];
    let fb_n = [fb[0] / nb, fb[1] / nb, fb[2] / nb, fb[3] / nb];
    match kind {
        ProblemKind::SteklovKS => {
            // pinned: c = f₂(R) f₁ − f₁(R) f₂ vanishes on the boundary;
            // the natural condition (1−σ)c_νν + σΔc = λ c_ν fixes λ
            mode.coeffs = [fb_n[0] / na, -fa_n[0] / nb];
            let mut c = [0.0; 4];
            for m in 0..4 {
                c[m] = fb_n[0] * fa_n[m] - fa_n[0] * fb_n[m];
            }
            let num = row_value(BoundaryRow::Moment, &c, n, radius, params);
            let den = row_value(BoundaryRow::Slope, &c, n, radius, params);
            if den.abs() <= 1e-12 {
                return Err(PlateError::DegenerateDeterminant(n as usize));
            }
            mode.lambda = num / den;
            Ok(Some(mode))
        }
        ProblemKind::SteklovBP => {
            if n == 0 {
                // the moment-free combination is the constant, carrying
                // only the quotiented λ = 0
                return Ok(None);
            }
            let ra = row_value(BoundaryRow::Moment, &fa_n, n, radius, params);
            let rb = row_value(BoundaryRow::Moment, &fb_n, n, radius, params);
            mode.coeffs = [rb / na, -ra / nb];
            let mut c = [0.0; 4];
            for m in 0..4 {
                c[m] = rb * fa_n[m] - ra * fb_n[m];
            }
            let num = row_value(BoundaryRow::Shear, &c, n, radius, params);
            let den = c[0];
            if den.abs() <= 1e-12 {
                return Err(PlateError::DegenerateDeterminant(n as usize));
            }
            mode.lambda = num / den;
            Ok(Some(mode))
        }
        _ => unreachable!("steklov_mode called for an interior problem"),
    }
}

/// Partition ascending values into maximal runs whose consecutive
/// relative gaps stay within `rel_tol`. Indices are 0-based into the
/// input.
pub fn cluster(eigs: &[f64], rel_tol: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..eigs.len() {
        let start_new = match out.last() {
            None => true,
            Some(run) => {
                let prev = eigs[*run.last().unwrap()];
                (eigs[i] - prev).abs() > rel_tol * prev.abs().max(1e-300)
            }
        };
        if start_new {
            out.push(vec![i]);
        } else {
            out.last_mut().unwrap().push(i);
        }
    }
    out
}

fn p_normalize(mode: &mut DiskMode, params: &PlateParams, quad: &QuadSpec) {
    let vol = VolumeRule::new(&StarChart::disk(mode.radius), quad.n_radial, quad.n_angular);
    let pnorm = vol.integrate(|[x, y]| {
        let j = mode.jet(x, y);
        p_density(params, &j, &j)
    });
    mode.scale /= pnorm.sqrt();
}

/// Disk spectrum of `problem`: the lowest `count` eigenvalues (with
/// multiplicity), grouped into clusters at relative tolerance `1e−9`,
/// with P-normalized eigenfunctions. Modes with `n ≥ 1` appear twice
/// (cos and sin). Within a cluster, members are ordered by ascending
/// `n` with cos before sin.
pub fn disk_spectrum(
    params: &PlateParams,
    problem: &BoundaryProblem,
    radius: f64,
    n_max: u32,
    count: usize,
    quad: &QuadSpec,
) -> Result<Vec<EigenCluster<DiskMode>>> {
    params.validate(problem.kind)?;
    if !(radius > 0.0) || count == 0 {
        return Err(PlateError::InvalidParams(
            "disk_spectrum needs radius > 0 and count >= 1".into(),
        ));
    }

    let interior = matches!(
        problem.kind,
        ProblemKind::Dirichlet | ProblemKind::Navier | ProblemKind::Neumann
    );

    // one unnormalized candidate per root, with its angular index
    let mut raw: Vec<DiskMode> = Vec::new();
    let mut first_root_last_n: Option<f64>;
    if interior {
        let mut x_max = (2.0 * count as f64 + n_max as f64) * PI / 2.0 + 10.0;
        loop {
            raw.clear();
            let mut per_n: Vec<Vec<f64>> = Vec::new();
            for n in 0..=n_max {
                per_n.push(interior_roots(problem.kind, params, n, radius, x_max)?);
            }
            for (n, ks) in per_n.iter().enumerate() {
                for &k in ks {
                    raw.push(unnormalized_interior(
                        problem.kind,
                        params,
                        n as u32,
                        k,
                        radius,
                    )?);
                }
            }
            let total: usize = raw
                .iter()
                .map(|m| if m.n == 0 { 1 } else { 2 })
                .sum();
            first_root_last_n = per_n[n_max as usize].first().map(|&k| {
                let l2 = k * k + params.tau;
                k * k * l2
            });
            if total >= count || x_max > 400.0 {
                break;
            }
            x_max *= 1.6;
        }
    } else {
        for n in 0..=n_max {
            if let Some(mode) = steklov_mode(problem.kind, params, n, radius)? {
                raw.push(mode);
            }
        }
        first_root_last_n = raw
            .iter()
            .filter(|m| m.n == n_max)
            .map(|m| m.lambda)
            .next();
    }

    // expand parities and sort globally
    let mut modes: Vec<DiskMode> = Vec::new();
    for m in raw {
        if m.n == 0 {
            modes.push(m);
        } else {
            let mut sin = m.clone();
            sin.parity = Parity::Sin;
            modes.push(m);
            modes.push(sin);
        }
    }
    modes.sort_by(|a, b| {
        (a.lambda, a.n, a.parity == Parity::Sin)
            .partial_cmp(&(b.lambda, b.n, b.parity == Parity::Sin))
            .unwrap()
    });

    if modes.len() < count {
        return Err(PlateError::SpectrumTruncated {
            requested: count,
            found: modes.len(),
            n_max: n_max as usize,
        });
    }
    let lambda_top = modes[count - 1].lambda;
    // indices beyond n_max only contribute above the first value seen
    // at n_max itself (first roots increase with n)
    if let Some(first) = first_root_last_n {
        if first <= lambda_top {
            return Err(PlateError::SpectrumTruncated {
                requested: count,
                found: count,
                n_max: n_max as usize,
            });
        }
    } else {
        return Err(PlateError::SpectrumTruncated {
            requested: count,
            found: modes.len(),
            n_max: n_max as usize,
        });
    }
    modes.truncate(count);

    let lambdas: Vec<f64> = modes.iter().map(|m| m.lambda).collect();
    let groups = cluster(&lambdas, CLUSTER_REL_TOL);
    let mut clusters = Vec::with_capacity(groups.len());
    for g in groups {
        let mut members: Vec<DiskMode> = g.iter().map(|&i| modes[i].clone()).collect();
        for m in members.iter_mut() {
            p_normalize(m, params, quad);
        }
        let lambda = members
            .iter()
            .map(|m| m.lambda)
            .sum::<f64>()
            / g.len() as f64;
        clusters.push(EigenCluster {
            lambda,
            indices: g.iter().map(|&i| i + 1).collect(),
            members,
        });
    }
    Ok(clusters)
}

/// Closed-form Navier spectrum of the `a × b` rectangle:
/// `λ_{mn} = μ² + τμ` with `μ = π²(m²/a² + n²/b²)`, ascending, ties
/// ordered by `(m, n)`.
pub fn rectangle_navier_spectrum(
    a: f64,
    b: f64,
    tau: f64,
    count: usize,
) -> Result<Vec<(f64, u32, u32)>> {
    if !(a > 0.0 && b > 0.0) || tau < 0.0 || count == 0 {
        return Err(PlateError::InvalidParams(
            "rectangle_navier_spectrum needs positive sides, tau >= 0, count >= 1".into(),
        ));
    }
    let top = 2 * count + 16;
    let mut all: Vec<(f64, u32, u32)> = Vec::new();
    for m in 1..=top {
        for n in 1..=top {
            let mu = PI * PI * ((m * m) as f64 / (a * a) + (n * n) as f64 / (b * b));
            all.push((mu * mu + tau * mu, m as u32, n as u32));
        }
    }
    all.sort_by(|x, y| x.partial_cmp(y).unwrap());
    all.truncate(count);
    Ok(all)
}
