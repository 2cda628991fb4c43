//! Gaussian Wigner functions and their evolution under the exact classical
//! flow W(z, t) = W(M(−t)z, 0), marginals, squeezing metrics and grids.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::dynamics::propagator;
use crate::error::{Error, Result};
use crate::params::DerivedParams;
use crate::phase::{Mat4, PhasePoint};

const MIN_DET: f64 = 1e-300;

/// Mean and covariance of a Gaussian Wigner function on the 4D phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub mean: PhasePoint,
    pub covariance: Mat4,
}

impl GaussianState {
    /// Validates symmetry (to 1e-12 relative) and positive definiteness.
    pub fn new(mean: PhasePoint, covariance: Mat4) -> Result<Self> {
        if !mean.is_finite() || covariance.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("state entries must be finite".into()));
        }
        let scale = covariance.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let asym = (covariance - covariance.transpose())
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if asym > 1e-12 * scale {
            return Err(Error::Domain("covariance is not symmetric".into()));
        }
        if covariance.cholesky().is_none() {
            return Err(Error::SingularCovariance(
                "covariance is not positive definite".into(),
            ));
        }
        Ok(Self { mean, covariance })
    }

    pub fn determinant(&self) -> f64 {
        self.covariance.determinant()
    }
}

/// Symmetric coherent state with covariance (ħ/2)·I centred at `mean`.
pub fn coherent_state(mean: PhasePoint, hbar: f64) -> Result<GaussianState> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::Domain(format!("hbar = {hbar} must be positive")));
    }
    GaussianState::new(mean, Mat4::identity() * (hbar / 2.0))
}

/// Exact Gaussian image under the flow: mean → M mean, Σ → M Σ Mᵀ.
pub fn evolve(state: &GaussianState, d: &DerivedParams, t: f64) -> Result<GaussianState> {
    let m = propagator(d, t)?.matrix;
    let cov = m * state.covariance * m.transpose();
    // re-symmetrise rounding noise
    let cov = (cov + cov.transpose()) * 0.5;
    Ok(GaussianState {
        mean: &m * state.mean,
        covariance: cov,
    })
}

/// exp(−½ (z − m)ᵀ Σ⁻¹ (z − m)) / ((2π)² √det Σ)
pub fn evaluate(state: &GaussianState, z: &PhasePoint) -> Result<f64> {
    let chol = state
        .covariance
        .cholesky()
        .ok_or_else(|| Error::SingularCovariance("not positive definite".into()))?;
    let l = chol.l();
    let sqrt_det: f64 = (0..4).map(|i| l[(i, i)]).product();
    if sqrt_det * sqrt_det < MIN_DET {
        return Err(Error::SingularCovariance(format!(
            "det = {:e}",
            sqrt_det * sqrt_det
        )));
    }
    let diff = (*z - state.mean).to_vector();
    let y = l
        .solve_lower_triangular(&diff)
        .ok_or_else(|| Error::SingularCovariance("triangular solve failed".into()))?;
    let quad = y.norm_squared();
    Ok((-0.5 * quad).exp() / (4.0 * PI * PI * sqrt_det))
}

/// Evolves an arbitrary initial phase-space field by pulling back along the
/// flow: returns initial(M(−t)·z).
pub fn flow_evaluate<F>(initial: F, d: &DerivedParams, z: &PhasePoint, t: f64) -> Result<f64>
where
    F: Fn(&PhasePoint) -> f64,
{
    let back = propagator(d, -t)?;
    Ok(initial(&back.apply(*z)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    /// (Q₁, Π₁)
    One,
    /// (Q₂, Π₂)
    Two,
}

impl Subsystem {
    fn indices(self) -> [usize; 2] {
        match self {
            Subsystem::One => [0, 2],
            Subsystem::Two => [1, 3],
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Subsystem::One => 1,
            Subsystem::Two => 2,
        }
    }
}

/// Reduced Gaussian of one oscillator, in (Q, Π) order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalState {
    pub subsystem: Subsystem,
    pub mean: Vector2<f64>,
    pub covariance: Matrix2<f64>,
}

impl MarginalState {
    pub fn determinant(&self) -> f64 {
        let c = &self.covariance;
        c[(0, 0)] * c[(1, 1)] - c[(0, 1)] * c[(1, 0)]
    }

    pub fn var_q(&self) -> f64 {
        self.covariance[(0, 0)]
    }

    pub fn var_p(&self) -> f64 {
        self.covariance[(1, 1)]
    }

    pub fn std_q(&self) -> f64 {
        self.var_q().sqrt()
    }

    pub fn std_p(&self) -> f64 {
        self.var_p().sqrt()
    }

    /// Density of the reduced Gaussian, 1/(2π√det Σ₁) at the peak.
    pub fn evaluate(&self, q: f64, p: f64) -> f64 {
        let det = self.determinant();
        let c = &self.covariance;
        let (dq, dp) = (q - self.mean[0], p - self.mean[1]);
        let quad = (c[(1, 1)] * dq * dq - 2.0 * c[(0, 1)] * dq * dp + c[(0, 0)] * dp * dp) / det;
        (-0.5 * quad).exp() / (2.0 * PI * det.sqrt())
    }

    pub fn peak(&self) -> f64 {
        1.0 / (2.0 * PI * self.determinant().sqrt())
    }

    /// 0 for Q, 1 for Π: the quadrature with the larger variance.
    pub fn amplified_quadrature(&self) -> usize {
        if self.var_q() >= self.var_p() {
            0
        } else {
            1
        }
    }

    /// 0 for Q, 1 for Π: the quadrature with the smaller variance.
    pub fn attenuated_quadrature(&self) -> usize {
        1 - self.amplified_quadrature()
    }
}

/// Exact Gaussian marginal over the other oscillator.
pub fn marginal(state: &GaussianState, subsystem: Subsystem) -> MarginalState {
    let [a, b] = subsystem.indices();
    let c = &state.covariance;
    MarginalState {
        subsystem,
        mean: Vector2::new(state.mean[a], state.mean[b]),
        covariance: Matrix2::new(c[(a, a)], c[(a, b)], c[(b, a)], c[(b, b)]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingMetrics {
    /// Principal variances, largest first.
    pub var_max: f64,
    pub var_min: f64,
    /// r = −½ ln(2σ²_min/ħ)
    pub squeeze: f64,
    /// Angle of the major principal axis from the Q axis, in (−π/2, π/2].
    pub angle: f64,
    /// √det Σ₁
    pub uncertainty: f64,
    /// ħ / (2√det Σ₁)
    pub purity: f64,
}

impl SqueezingMetrics {
    pub fn variance_ratio(&self) -> f64 {
        self.var_max / self.var_min
    }
}

pub fn squeezing_metrics(m: &MarginalState, hbar: f64) -> SqueezingMetrics {
    let c = &m.covariance;
    let (a, b, d) = (c[(0, 0)], c[(0, 1)], c[(1, 1)]);
    let det = m.determinant();
    let half_tr = 0.5 * (a + d);
    let disc = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    let var_max = half_tr + disc;
    // det / λ_max avoids cancellation in the small eigenvalue
    let var_min = det / var_max;
    let uncertainty = det.sqrt();
    SqueezingMetrics {
        var_max,
        var_min,
        squeeze: -0.5 * (2.0 * var_min / hbar).ln() + 0.0,
        angle: 0.5 * (2.0 * b).atan2(a - d),
        uncertainty,
        purity: hbar / (2.0 * uncertainty),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.min + i as f64 * self.spacing()
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::DegenerateAxes(format!(
                "{name} axis [{}, {}] is empty",
                self.min, self.max
            )));
        }
        if self.count < 16 {
            return Err(Error::DegenerateAxes(format!(
                "{name} axis has {} points, need at least 16",
                self.count
            )));
        }
        Ok(())
    }
}

/// Axes of a (Q, Π) grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub q: Axis,
    pub p: Axis,
}

impl GridSpec {
    pub const DEFAULT_SIGMAS: f64 = 6.0;
    pub const DEFAULT_COUNT: usize = 256;

    /// mean ± `sigmas` standard deviations along each axis.
    pub fn around(m: &MarginalState, sigmas: f64, count: usize) -> Self {
        let (sq, sp) = (sigmas * m.std_q(), sigmas * m.std_p());
        Self {
            q: Axis::new(m.mean[0] - sq, m.mean[0] + sq, count),
            p: Axis::new(m.mean[1] - sp, m.mean[1] + sp, count),
        }
    }

    pub fn auto(m: &MarginalState, count: usize) -> Self {
        Self::around(m, Self::DEFAULT_SIGMAS, count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// Probability density; integrates to one.
    Physical,
    /// Rescaled so the largest grid value is 1.
    Figure,
}

/// W sampled on a (Q, Π) grid. `values[i * p.count + j]` is at
/// (q.coord(i), p.coord(j)).
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub subsystem: Subsystem,
    pub spec: GridSpec,
    pub normalization: Normalization,
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.spec.p.count + j]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Riemann sum Σ W ΔQ ΔΠ.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.q.spacing() * self.spec.p.spacing()
    }

    /// Mean and covariance of the grid treated as a weight distribution.
    pub fn moments(&self) -> (Vector2<f64>, Matrix2<f64>) {
        let mut w = 0.0;
        let mut mean = Vector2::zeros();
        for i in 0..self.spec.q.count {
            for j in 0..self.spec.p.count {
                let v = self.get(i, j);
                w += v;
                mean += v * Vector2::new(self.spec.q.coord(i), self.spec.p.coord(j));
            }
        }
        mean /= w;
        let mut cov = Matrix2::zeros();
        for i in 0..self.spec.q.count {
            for j in 0..self.spec.p.count {
                let d = Vector2::new(self.spec.q.coord(i), self.spec.p.coord(j)) - mean;
                cov += self.get(i, j) * d * d.transpose();
            }
        }
        (mean, cov / w)
    }

    /// Ratio of principal standard deviations of the grid distribution, i.e.
    /// the axis ratio of its elliptical contours.
    pub fn aspect_ratio(&self) -> f64 {
        let (_, c) = self.moments();
        let m = MarginalState {
            subsystem: self.subsystem,
            mean: Vector2::zeros(),
            covariance: c,
        };
        squeezing_metrics(&m, 1.0).variance_ratio().sqrt()
    }

    /// Rows (q, p, W) in grid order.
    pub fn rows(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        let np = self.spec.p.count;
        self.values.iter().enumerate().map(move |(k, &v)| {
            [self.spec.q.coord(k / np), self.spec.p.coord(k % np), v]
        })
    }
}

/// Evaluates the marginal of `state` for `subsystem` on a grid.
pub fn evaluate_grid(
    state: &GaussianState,
    subsystem: Subsystem,
    spec: &GridSpec,
    normalization: Normalization,
) -> Result<WignerGrid> {
    spec.q.validate("Q")?;
    spec.p.validate("Pi")?;
    let m = marginal(state, subsystem);
    if !(m.determinant() > MIN_DET) {
        return Err(Error::SingularCovariance(format!(
            "marginal det = {:e}",
            m.determinant()
        )));
    }
    let mut values = Vec::with_capacity(spec.q.count * spec.p.count);
    for i in 0..spec.q.count {
        let q = spec.q.coord(i);
        for j in 0..spec.p.count {
            values.push(m.evaluate(q, spec.p.coord(j)));
        }
    }
    if normalization == Normalization::Figure {
        let peak = values.iter().copied().fold(0.0, f64::max);
        if peak > 0.0 {
            values.iter_mut().for_each(|v| *v /= peak);
        }
    }
    Ok(WignerGrid {
        subsystem,
        spec: *spec,
        normalization,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig(eps: f64) -> DerivedParams {
        DerivedParams::from_figure_controls(eps, 1.0).unwrap()
    }

    #[test]
    fn coherent_peak() {
        let s = coherent_state(PhasePoint::new(1.0, 1.0, 0.0, 0.0), 1.0).unwrap();
        let w = evaluate(&s, &s.mean).unwrap();
        assert!((w - 1.0 / (PI * PI)).abs() < 1e-15);
        let far = PhasePoint::new(100.0, 1.0, 0.0, 0.0);
        assert_eq!(evaluate(&s, &far).unwrap(), 0.0);
        let s = coherent_state(PhasePoint::ZERO, 2.0).unwrap();
        let w = evaluate(&s, &PhasePoint::ZERO).unwrap();
        assert!((w - 1.0 / (PI * PI * 4.0)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_covariance() {
        let mut c = Mat4::identity();
        c[(0, 1)] = 0.3;
        assert!(GaussianState::new(PhasePoint::ZERO, c).is_err());
        let c = Mat4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, -1.0, 1.0));
        assert_eq!(
            GaussianState::new(PhasePoint::ZERO, c).unwrap_err().kind(),
            "SingularCovariance"
        );
        let tiny = GaussianState {
            mean: PhasePoint::ZERO,
            covariance: Mat4::identity() * 1e-80,
        };
        assert_eq!(
            evaluate(&tiny, &PhasePoint::ZERO).unwrap_err().kind(),
            "SingularCovariance"
        );
    }

    #[test]
    fn evolve_zero_time_and_isotropy() {
        let s = coherent_state(PhasePoint::new(1.0, 1.0, 0.0, 0.0), 1.0).unwrap();
        let e = evolve(&s, &fig(0.1), 0.0).unwrap();
        assert_eq!(e, s);
        let d = fig(0.0);
        for t in [0.3, 1.7, 4.0] {
            let e = evolve(&s, &d, t).unwrap();
            assert!((e.covariance - s.covariance).iter().all(|v| v.abs() < 1e-15));
        }
    }

    #[test]
    fn squeezed_marginal_variances() {
        // Γt = π/32 with Γ = 0.1
        let d = fig(0.1);
        let t = PI / 32.0 / d.gamma;
        let s = coherent_state(PhasePoint::new(1.0, 1.0, 0.0, 0.0), 1.0).unwrap();
        let m = marginal(&evolve(&s, &d, t).unwrap(), Subsystem::One);
        assert!((m.var_q() - 0.5 * (PI / 16.0).exp()).abs() < 1e-14);
        assert!((m.var_p() - 0.5 * (-PI / 16.0).exp()).abs() < 1e-14);
        assert!(m.covariance[(0, 1)].abs() < 1e-14);
        let k = squeezing_metrics(&m, 1.0);
        assert!((k.squeeze - PI / 32.0).abs() < 1e-13);
        assert!((k.purity - 1.0).abs() < 1e-13);
    }

    #[test]
    fn symmetric_marginal_metrics() {
        let s = coherent_state(PhasePoint::ZERO, 1.0).unwrap();
        let m = marginal(&s, Subsystem::Two);
        assert_eq!(m.covariance, Matrix2::identity() * 0.5);
        let k = squeezing_metrics(&m, 1.0);
        assert_eq!(k.squeeze, 0.0);
        assert_eq!(k.purity, 1.0);
    }

    #[test]
    fn conjugate_squeezing_between_subsystems() {
        let d = fig(0.1);
        let s = coherent_state(PhasePoint::new(1.0, 1.0, 0.0, 0.0), 1.0).unwrap();
        let e = evolve(&s, &d, 2.0).unwrap();
        let m1 = marginal(&e, Subsystem::One);
        let m2 = marginal(&e, Subsystem::Two);
        assert_eq!(m1.amplified_quadrature(), m2.attenuated_quadrature());
    }

    #[test]
    fn grid_axes_validated() {
        let s = coherent_state(PhasePoint::ZERO, 1.0).unwrap();
        let bad = GridSpec {
            q: Axis::new(1.0, 1.0, 32),
            p: Axis::new(-1.0, 1.0, 32),
        };
        let err = evaluate_grid(&s, Subsystem::One, &bad, Normalization::Physical).unwrap_err();
        assert_eq!(err.kind(), "DegenerateAxes");
        let few = GridSpec {
            q: Axis::new(-1.0, 1.0, 8),
            p: Axis::new(-1.0, 1.0, 32),
        };
        assert!(evaluate_grid(&s, Subsystem::One, &few, Normalization::Physical).is_err());
    }

    #[test]
    fn grid_integrates_to_one() {
        let d = fig(0.1);
        let s = coherent_state(PhasePoint::new(1.0, 1.0, 0.0, 0.0), 1.0).unwrap();
        let e = evolve(&s, &d, 3.0).unwrap();
        let m = marginal(&e, Subsystem::One);
        let g = evaluate_grid(&e, Subsystem::One, &GridSpec::auto(&m, 256), Normalization::Physical)
            .unwrap();
        assert!((g.integral() - 1.0).abs() < 1e-3);
        let g = evaluate_grid(&e, Subsystem::One, &GridSpec::auto(&m, 64), Normalization::Figure)
            .unwrap();
        assert!(g.max_value() == 1.0);
    }

    #[test]
    fn symmetric_grid_is_rotationally_symmetric() {
        let s = coherent_state(PhasePoint::new(1.0, 1.0, 0.0, 0.0), 1.0).unwrap();
        let m = marginal(&s, Subsystem::One);
        let g = evaluate_grid(&s, Subsystem::One, &GridSpec::auto(&m, 64), Normalization::Figure)
            .unwrap();
        // quarter-turn about the centre maps grid (i, j) to (j, n-1-i)
        let n = 64;
        for i in 0..n {
            for j in 0..n {
                assert!((g.get(i, j) - g.get(j, n - 1 - i)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn flow_at_zero_time() {
        let d = fig(0.1);
        let f = |z: &PhasePoint| (-z.norm()).exp();
        let z = PhasePoint::new(0.2, 0.4, -0.1, 0.9);
        assert_eq!(flow_evaluate(f, &d, &z, 0.0).unwrap(), f(&z));
    }
}
