//! Star-shaped planar domains with Fourier radius profiles, their
//! boundary differential geometry, and normal perturbation fields.

use crate::jet::{theta_jet, Jet3};
use crate::numerics::{pairwise_sum, periodic_trapezoid};
use crate::{PlateError, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Highest Fourier mode admitted in a radius profile.
pub const MAX_FOURIER_MODES: usize = 32;

/// Default periodic boundary grid size.
pub const DEFAULT_BOUNDARY_GRID: usize = 256;

/// Star-shaped domain with boundary radius
/// `R(θ) = base_radius (1 + Σ_m a_m cos mθ + b_m sin mθ)`.
///
/// Profiles are trigonometric polynomials, so charts are C^∞ and all
/// boundary quadrature stays spectral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarChart {
    pub base_radius: f64,
    #[serde(default)]
    pub cos_coeffs: Vec<f64>,
    #[serde(default)]
    pub sin_coeffs: Vec<f64>,
}

impl StarChart {
    /// Disk of the given radius.
    pub fn disk(radius: f64) -> StarChart {
        StarChart {
            base_radius: radius,
            cos_coeffs: Vec::new(),
            sin_coeffs: Vec::new(),
        }
    }

    /// Validated chart; the radius must stay positive on a fine grid
    /// and the truncation order within [`MAX_FOURIER_MODES`].
    pub fn new(base_radius: f64, cos_coeffs: Vec<f64>, sin_coeffs: Vec<f64>) -> Result<StarChart> {
        let chart = StarChart {
            base_radius,
            cos_coeffs,
            sin_coeffs,
        };
        chart.validate()?;
        Ok(chart)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.base_radius > 0.0) {
            return Err(PlateError::InvalidParams(format!(
                "base_radius must be positive, got {}",
                self.base_radius
            )));
        }
        if self.cos_coeffs.len() > MAX_FOURIER_MODES || self.sin_coeffs.len() > MAX_FOURIER_MODES {
            return Err(PlateError::InvalidParams(format!(
                "Fourier truncation order exceeds {MAX_FOURIER_MODES}"
            )));
        }
        for j in 0..2048 {
            let theta = 2.0 * PI * j as f64 / 2048.0;
            let r = self.radius(theta);
            if !(r > 0.0) {
                return Err(PlateError::NonPositiveRadius { theta, radius: r });
            }
        }
        Ok(())
    }

    pub fn is_disk(&self) -> bool {
        self.cos_coeffs.iter().all(|&c| c == 0.0) && self.sin_coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn radius(&self, theta: f64) -> f64 {
        self.radius_derivs(theta)[0]
    }

    /// `[R, R', R'', R''']` at `θ`.
    pub fn radius_derivs(&self, theta: f64) -> [f64; 4] {
        let mut d = [1.0, 0.0, 0.0, 0.0];
        for (idx, &a) in self.cos_coeffs.iter().enumerate() {
            let m = (idx + 1) as f64;
            let (s, c) = (m * theta).sin_cos();
            d[0] += a * c;
            d[1] -= a * m * s;
            d[2] -= a * m * m * c;
            d[3] += a * m * m * m * s;
        }
        for (idx, &b) in self.sin_coeffs.iter().enumerate() {
            let m = (idx + 1) as f64;
            let (s, c) = (m * theta).sin_cos();
            d[0] += b * s;
            d[1] += b * m * c;
            d[2] -= b * m * m * s;
            d[3] -= b * m * m * m * c;
        }
        d.map(|v| v * self.base_radius)
    }

    /// Jet of the scalar field `x ↦ R(θ(x))` at a point away from the
    /// origin. Used by boundary-conforming basis factors.
    pub fn radius_field_jet(&self, x: f64, y: f64) -> Jet3 {
        let th = theta_jet(x, y);
        let mut out = Jet3::constant(1.0);
        for (idx, &a) in self.cos_coeffs.iter().enumerate() {
            let m = (idx + 1) as f64;
            out = out.add(&th.scale(m).cos().scale(a));
        }
        for (idx, &b) in self.sin_coeffs.iter().enumerate() {
            let m = (idx + 1) as f64;
            out = out.add(&th.scale(m).sin().scale(b));
        }
        out.scale(self.base_radius)
    }
}

/// Boundary point data: position, outward unit normal, curvature and
/// the arc element `dσ/dθ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFrame {
    pub point: [f64; 2],
    pub normal: [f64; 2],
    pub curvature: f64,
    pub arc_weight: f64,
}

/// Differential geometry of the boundary curve `θ ↦ R(θ)(cos θ, sin θ)`.
pub fn boundary_frame(chart: &StarChart, theta: f64) -> BoundaryFrame {
    let [r, r1, r2, _] = chart.radius_derivs(theta);
    let (s, c) = theta.sin_cos();
    let er = [c, s];
    let et = [-s, c];
    let w = (r * r + r1 * r1).sqrt();
    let normal = [(r * er[0] - r1 * et[0]) / w, (r * er[1] - r1 * et[1]) / w];
    let curvature = (r * r + 2.0 * r1 * r1 - r * r2) / (w * w * w);
    BoundaryFrame {
        point: [r * er[0], r * er[1]],
        normal,
        curvature,
        arc_weight: w,
    }
}

/// Enclosed area, `½ ∮ R(θ)² dθ`, spectrally exact for trigonometric
/// profiles.
pub fn volume(chart: &StarChart) -> f64 {
    let q = periodic_trapezoid(DEFAULT_BOUNDARY_GRID);
    0.5 * q.integrate(|t| {
        let r = chart.radius(t);
        r * r
    })
}

/// Differentiate boundary samples with respect to arc length: Fourier
/// differentiation in `θ` divided pointwise by the arc element.
///
/// The samples must live on the equispaced periodic grid of their own
/// length.
pub fn tangential_derivative(chart: &StarChart, samples: &[f64]) -> Result<Vec<f64>> {
    let d = fourier_derivative(samples)?;
    let m = samples.len();
    Ok((0..m)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / m as f64;
            d[j] / boundary_frame(chart, theta).arc_weight
        })
        .collect())
}

/// Spectral d/dθ of periodic samples on the equispaced grid.
pub fn fourier_derivative(samples: &[f64]) -> Result<Vec<f64>> {
    let m = samples.len();
    if m < 4 || m % 2 != 0 {
        return Err(PlateError::InvalidParams(format!(
            "periodic grid size must be even and >= 4, got {m}"
        )));
    }
    let half = m / 2;
    let mut a = vec![0.0; half];
    let mut b = vec![0.0; half];
    for k in 1..half {
        let mut ca = Vec::with_capacity(m);
        let mut cb = Vec::with_capacity(m);
        for (j, &f) in samples.iter().enumerate() {
            let ang = 2.0 * PI * (k * j) as f64 / m as f64;
            ca.push(f * ang.cos());
            cb.push(f * ang.sin());
        }
        a[k] = 2.0 / m as f64 * pairwise_sum(&ca);
        b[k] = 2.0 / m as f64 * pairwise_sum(&cb);
    }
    // the Nyquist mode carries no usable derivative information
    Ok((0..m)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / m as f64;
            let mut acc = 0.0;
            for k in 1..half {
                let kf = k as f64;
                let (s, c) = (kf * theta).sin_cos();
                acc += kf * (-a[k] * s + b[k] * c);
            }
            acc
        })
        .collect())
}

/// Boundary normal displacement speed profile
/// `f(θ) = c + Σ_m fc_m cos mθ + fs_m sin mθ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalPerturbation {
    pub constant: f64,
    #[serde(default)]
    pub cos_coeffs: Vec<f64>,
    #[serde(default)]
    pub sin_coeffs: Vec<f64>,
}

impl NormalPerturbation {
    pub fn constant(c: f64) -> Self {
        NormalPerturbation {
            constant: c,
            cos_coeffs: Vec::new(),
            sin_coeffs: Vec::new(),
        }
    }

    pub fn cosine(m: usize, amplitude: f64) -> Self {
        let mut cos_coeffs = vec![0.0; m];
        cos_coeffs[m - 1] = amplitude;
        NormalPerturbation {
            constant: 0.0,
            cos_coeffs,
            sin_coeffs: Vec::new(),
        }
    }

    pub fn sine(m: usize, amplitude: f64) -> Self {
        let mut sin_coeffs = vec![0.0; m];
        sin_coeffs[m - 1] = amplitude;
        NormalPerturbation {
            constant: 0.0,
            cos_coeffs: Vec::new(),
            sin_coeffs,
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut v = self.constant;
        for (idx, &a) in self.cos_coeffs.iter().enumerate() {
            v += a * ((idx + 1) as f64 * theta).cos();
        }
        for (idx, &b) in self.sin_coeffs.iter().enumerate() {
            v += b * ((idx + 1) as f64 * theta).sin();
        }
        v
    }
}

/// The deformed chart with radius profile `R_t(θ) = R(θ) + t f(θ)`.
/// Fails (naming the offending angle) if the new profile is not
/// positive.
pub fn deformation(chart: &StarChart, f: &NormalPerturbation, t: f64) -> Result<StarChart> {
    let base = chart.base_radius + t * f.constant;
    if !(base > 0.0) {
        return Err(PlateError::NonPositiveRadius {
            theta: 0.0,
            radius: base,
        });
    }
    let modes = chart
        .cos_coeffs
        .len()
        .max(chart.sin_coeffs.len())
        .max(f.cos_coeffs.len())
        .max(f.sin_coeffs.len());
    let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    let cos_coeffs: Vec<f64> = (0..modes)
        .map(|i| {
            (chart.base_radius * get(&chart.cos_coeffs, i) + t * get(&f.cos_coeffs, i)) / base
        })
        .collect();
    let sin_coeffs: Vec<f64> = (0..modes)
        .map(|i| {
            (chart.base_radius * get(&chart.sin_coeffs, i) + t * get(&f.sin_coeffs, i)) / base
        })
        .collect();
    StarChart::new(base, cos_coeffs, sin_coeffs)
}

/// First-order geometric normal speed of the family `R_t = R + t f`:
/// the trace `ζ·ν = f R / √(R² + R'²)` entering the Hadamard formula.
pub fn normal_speed(chart: &StarChart, f: &NormalPerturbation, theta: f64) -> f64 {
    let [r, r1, _, _] = chart.radius_derivs(theta);
    f.eval(theta) * r / (r * r + r1 * r1).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_frames() {
        let disk = StarChart::disk(1.0);
        let f = boundary_frame(&disk, 0.0);
        assert!((f.point[0] - 1.0).abs() < 1e-15 && f.point[1].abs() < 1e-15);
        assert!((f.normal[0] - 1.0).abs() < 1e-15);
        assert!((f.curvature - 1.0).abs() < 1e-14);
        assert!((f.arc_weight - 1.0).abs() < 1e-14);

        let disk2 = StarChart::disk(2.0);
        for j in 0..16 {
            let f = boundary_frame(&disk2, 0.3 * j as f64);
            assert!((f.curvature - 0.5).abs() < 1e-14);
            assert!((f.arc_weight - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn curvature_matches_parametric_oracle() {
        // independent route: κ = (x'y'' - y'x'') / (x'^2 + y'^2)^{3/2}
        // with x(θ) = R cos θ, y(θ) = R sin θ differentiated by hand
        let chart = StarChart::new(1.0, vec![0.0, 0.1], vec![]).unwrap();
        for j in 0..32 {
            let t = 2.0 * PI * j as f64 / 32.0;
            let [r, r1, r2, _] = chart.radius_derivs(t);
            let (s, c) = t.sin_cos();
            let xp = r1 * c - r * s;
            let yp = r1 * s + r * c;
            let xpp = (r2 - r) * c - 2.0 * r1 * s;
            let ypp = (r2 - r) * s + 2.0 * r1 * c;
            let kappa = (xp * ypp - yp * xpp) / (xp * xp + yp * yp).powf(1.5);
            let frame = boundary_frame(&chart, t);
            assert!((frame.curvature - kappa).abs() < 1e-12, "theta = {t}");
        }
    }

    #[test]
    fn normal_is_orthogonal_to_tangent_and_unit() {
        let charts = [
            StarChart::disk(1.3),
            StarChart::new(1.0, vec![0.05, 0.1], vec![0.0, 0.0, 0.07]).unwrap(),
        ];
        for chart in &charts {
            for j in 0..64 {
                let t = 2.0 * PI * j as f64 / 64.0;
                let [r, r1, _, _] = chart.radius_derivs(t);
                let (s, c) = t.sin_cos();
                let tangent = [r1 * c - r * s, r1 * s + r * c];
                let frame = boundary_frame(&chart, t);
                let dot = frame.normal[0] * tangent[0] + frame.normal[1] * tangent[1];
                let norm = (frame.normal[0].powi(2) + frame.normal[1].powi(2)).sqrt();
                assert!(dot.abs() < 1e-13 * frame.arc_weight);
                assert!((norm - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn turning_number() {
        let charts = [
            StarChart::disk(0.7),
            StarChart::new(1.0, vec![0.05, 0.1], vec![0.0, 0.12]).unwrap(),
        ];
        let q = periodic_trapezoid(DEFAULT_BOUNDARY_GRID);
        for chart in &charts {
            let v = q.integrate(|t| {
                let f = boundary_frame(chart, t);
                f.curvature * f.arc_weight
            });
            assert!((v - 2.0 * PI).abs() < 1e-10);
        }
    }

    #[test]
    fn volumes() {
        assert!((volume(&StarChart::disk(1.0)) - PI).abs() < 1e-13);
        assert!((volume(&StarChart::disk(2.0)) - 4.0 * PI).abs() < 1e-13);
        let wavy = StarChart::new(1.0, vec![0.0, 0.1], vec![]).unwrap();
        assert!((volume(&wavy) - PI * 1.005).abs() < 1e-14);
    }

    #[test]
    fn tangential_derivative_examples() {
        let disk = StarChart::disk(1.0);
        let m = DEFAULT_BOUNDARY_GRID;
        let grid: Vec<f64> = (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect();

        let constant = vec![3.5; m];
        for v in tangential_derivative(&disk, &constant).unwrap() {
            assert!(v.abs() < 1e-10);
        }

        let samples: Vec<f64> = grid.iter().map(|&t| t.sin()).collect();
        let d = tangential_derivative(&disk, &samples).unwrap();
        for (j, &t) in grid.iter().enumerate() {
            assert!((d[j] - t.cos()).abs() < 1e-10);
        }

        let disk2 = StarChart::disk(2.0);
        let samples: Vec<f64> = grid.iter().map(|&t| (3.0 * t).cos()).collect();
        let d = tangential_derivative(&disk2, &samples).unwrap();
        for (j, &t) in grid.iter().enumerate() {
            assert!((d[j] + 1.5 * (3.0 * t).sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn deformation_examples() {
        let disk = StarChart::disk(1.0);
        let f = NormalPerturbation::constant(1.0);
        let same = deformation(&disk, &f, 0.0).unwrap();
        assert_eq!(same, disk);
        let bigger = deformation(&disk, &f, 0.5).unwrap();
        assert!(bigger.is_disk() && (bigger.base_radius - 1.5).abs() < 1e-15);

        let wavy = deformation(&disk, &NormalPerturbation::cosine(2, 1.0), 0.05).unwrap();
        assert!((volume(&wavy) - PI * (1.0 + 0.05 * 0.05 / 2.0)).abs() < 1e-14);

        // collapse must error and report an angle
        let bad = deformation(&disk, &NormalPerturbation::cosine(2, 1.0), 1.5);
        assert!(matches!(bad, Err(PlateError::NonPositiveRadius { .. })));
    }

    #[test]
    fn volume_derivative_matches_normal_speed() {
        // d/dt vol(R + t f) at 0 = ∮ f R dθ = ∮ (f R/√(R²+R'²)) dσ
        let chart = StarChart::new(1.0, vec![0.08], vec![0.0, 0.05]).unwrap();
        let f = NormalPerturbation {
            constant: 0.3,
            cos_coeffs: vec![0.2],
            sin_coeffs: vec![0.0, 0.4],
        };
        let h = 1e-6;
        let fd = (volume(&deformation(&chart, &f, h).unwrap())
            - volume(&deformation(&chart, &f, -h).unwrap()))
            / (2.0 * h);
        let q = periodic_trapezoid(DEFAULT_BOUNDARY_GRID);
        let direct = q.integrate(|t| {
            normal_speed(&chart, &f, t) * boundary_frame(&chart, t).arc_weight
        });
        assert!((fd - direct).abs() < 1e-8, "{fd} vs {direct}");
    }

    #[test]
    fn radius_field_jet_consistency() {
        let chart = StarChart::new(1.0, vec![0.1, 0.05], vec![0.02]).unwrap();
        let (x, y) = (0.6, 0.45);
        let jet = chart.radius_field_jet(x, y);
        assert!((jet.f - chart.radius(y.atan2(x))).abs() < 1e-13);
        let h = 1e-5;
        let fx = (chart.radius_field_jet(x + h, y).f - chart.radius_field_jet(x - h, y).f)
            / (2.0 * h);
        assert!((jet.fx - fx).abs() < 1e-8);
    }
}
