//! Closed-form propagator of the coupled oscillators, a fixed-step RK4
//! integrator used as an independent oracle, and trajectory diagnostics.

use crate::error::{Error, Result};
use crate::params::DerivedParams;
use crate::phase::{Mat4, PhasePoint};
use crate::swmap::hamiltonian_c;

/// Linear map M(t) advancing canonical phase points by time t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator {
    pub matrix: Mat4,
    pub time: f64,
    pub params: DerivedParams,
}

impl Propagator {
    pub fn apply(&self, z: PhasePoint) -> PhasePoint {
        &self.matrix * z
    }
}

/// Builds M(t). With initial data (x, πₓ, y, π_y):
///
/// ```text
/// Q₁(t) = e^{+Γt} [x cos Ωt + (β/α) π_y sin Ωt]
/// Q₂(t) = e^{−Γt} [y cos Ωt + (β/α) πₓ sin Ωt]
/// Π₁(t) = e^{−Γt} [πₓ cos Ωt − (α/β) y sin Ωt]
/// Π₂(t) = e^{+Γt} [π_y cos Ωt − (α/β) x sin Ωt]
/// ```
pub fn propagator(d: &DerivedParams, t: f64) -> Result<Propagator> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("time {t} is not finite")));
    }
    if !(d.big_omega > 0.0) {
        return Err(Error::Domain(format!(
            "Omega = {} must be positive",
            d.big_omega
        )));
    }
    let (s, c) = (d.big_omega * t).sin_cos();
    let grow = (d.gamma * t).exp();
    let decay = (-d.gamma * t).exp();
    let ba = (d.beta_sq / d.alpha_sq).sqrt();
    let ab = 1.0 / ba;
    #[rustfmt::skip]
    let matrix = Mat4::new(
        grow * c,        0.0,              0.0,             grow * ba * s,
        0.0,             decay * c,        decay * ba * s,  0.0,
        0.0,             -decay * ab * s,  decay * c,       0.0,
        -grow * ab * s,  0.0,              0.0,             grow * c,
    );
    Ok(Propagator {
        matrix,
        time: t,
        params: *d,
    })
}

/// Time derivative of (Q₁, Q₂, Π₁, Π₂) under Hamilton's equations:
///
/// ```text
/// Q̇₁ = 2β²Π₂ + ΓQ₁     Q̇₂ = 2β²Π₁ − ΓQ₂
/// Π̇₁ = −2α²Q₂ − ΓΠ₁    Π̇₂ = −2α²Q₁ + ΓΠ₂
/// ```
pub fn eom_rhs(z: &PhasePoint, d: &DerivedParams) -> PhasePoint {
    let (a2, b2, g) = (2.0 * d.alpha_sq, 2.0 * d.beta_sq, d.gamma);
    PhasePoint::new(
        b2 * z.p2() + g * z.q1(),
        b2 * z.p1() - g * z.q2(),
        -a2 * z.q2() - g * z.p1(),
        -a2 * z.q1() + g * z.p2(),
    )
}

/// Time-ordered phase-space samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<PhasePoint>,
    pub params: DerivedParams,
    pub initial: PhasePoint,
    /// Sampling step; samples are equally spaced.
    pub step: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Option<&PhasePoint> {
        self.points.last()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &PhasePoint)> {
        self.times.iter().copied().zip(self.points.iter())
    }

    /// Planar projection of every sample.
    pub fn projection(&self, plane: Projection) -> Vec<(f64, f64)> {
        let (i, j) = plane.indices();
        self.points.iter().map(|z| (z[i], z[j])).collect()
    }

    /// max over samples of ‖self − reference‖∞, divided by the largest entry
    /// of the reference.
    pub fn max_relative_deviation(&self, reference: &Trajectory) -> f64 {
        let scale = reference
            .points
            .iter()
            .fold(0.0f64, |m, z| m.max(z.max_abs()));
        let dev = self
            .points
            .iter()
            .zip(&reference.points)
            .fold(0.0f64, |m, (a, b)| m.max((*a - *b).max_abs()));
        if scale == 0.0 {
            dev
        } else {
            dev / scale
        }
    }
}

/// Closed-form samples at `n_samples` equally spaced times in [t_start, t_end].
pub fn closed_form_trajectory(
    z0: PhasePoint,
    d: &DerivedParams,
    t_start: f64,
    t_end: f64,
    n_samples: usize,
) -> Result<Trajectory> {
    if n_samples < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: n_samples,
        });
    }
    if !(t_start.is_finite() && t_end.is_finite() && t_end > t_start) {
        return Err(Error::Domain(format!(
            "invalid time range [{t_start}, {t_end}]"
        )));
    }
    let step = (t_end - t_start) / (n_samples - 1) as f64;
    let mut times = Vec::with_capacity(n_samples);
    let mut points = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let t = if k == n_samples - 1 {
            t_end
        } else {
            t_start + k as f64 * step
        };
        times.push(t);
        points.push(propagator(d, t)?.apply(z0));
    }
    Ok(Trajectory {
        times,
        points,
        params: *d,
        initial: z0,
        step,
    })
}

/// Classic fixed-step fourth-order Runge–Kutta on [`eom_rhs`] from t = 0.
///
/// The requested step is shrunk to t_end / ceil(t_end / step) so the last
/// sample lands on t_end. Rejects steps longer than a hundredth of a period.
pub fn integrate(z0: PhasePoint, d: &DerivedParams, t_end: f64, step: f64) -> Result<Trajectory> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Domain(format!("step {step} must be positive")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Domain(format!("t_end {t_end} must be positive")));
    }
    let limit = d.period() / 100.0;
    if step > limit {
        return Err(Error::StepTooLarge { step, limit });
    }
    let n = (t_end / step).ceil() as usize;
    let h = t_end / n as f64;
    let mut times = Vec::with_capacity(n + 1);
    let mut points = Vec::with_capacity(n + 1);
    let mut z = z0;
    times.push(0.0);
    points.push(z);
    for k in 1..=n {
        z = rk4_step(z, d, h);
        times.push(if k == n { t_end } else { k as f64 * h });
        points.push(z);
    }
    Ok(Trajectory {
        times,
        points,
        params: *d,
        initial: z0,
        step: h,
    })
}

fn rk4_step(z: PhasePoint, d: &DerivedParams, h: f64) -> PhasePoint {
    let k1 = eom_rhs(&z, d);
    let k2 = eom_rhs(&(z + (0.5 * h) * k1), d);
    let k3 = eom_rhs(&(z + (0.5 * h) * k2), d);
    let k4 = eom_rhs(&(z + h * k3), d);
    z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// RK4 from (t = 0, z0) reporting the state at each of `times` (ascending,
/// non-negative). Each gap is split evenly into steps no longer than
/// `max_step`.
pub fn integrate_sampled(
    z0: PhasePoint,
    d: &DerivedParams,
    times: &[f64],
    max_step: f64,
) -> Result<Trajectory> {
    if !(max_step > 0.0 && max_step.is_finite()) {
        return Err(Error::Domain(format!("step {max_step} must be positive")));
    }
    let limit = d.period() / 100.0;
    if max_step > limit {
        return Err(Error::StepTooLarge {
            step: max_step,
            limit,
        });
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0])
    {
        return Err(Error::Domain("sample times must be ascending and non-negative".into()));
    }
    let mut z = z0;
    let mut now = 0.0;
    let mut points = Vec::with_capacity(times.len());
    for &target in times {
        let gap = target - now;
        if gap > 0.0 {
            let n = (gap / max_step).ceil() as usize;
            let h = gap / n as f64;
            for _ in 0..n {
                z = rk4_step(z, d, h);
            }
        }
        now = target;
        points.push(z);
    }
    let step = if times.len() > 1 {
        times[1] - times[0]
    } else {
        0.0
    };
    Ok(Trajectory {
        times: times.to_vec(),
        points,
        params: *d,
        initial: z0,
        step,
    })
}

/// Max absolute residual of the decoupled second-order equations
///
/// ```text
/// Q̈ₖ + (−1)ᵏ 2Γ Q̇ₖ + (Γ² + 4α²β²) Qₖ = 0
/// Π̈ₖ − (−1)ᵏ 2Γ Π̇ₖ + (Γ² + 4α²β²) Πₖ = 0
/// ```
///
/// with derivatives from central differences at interior samples.
pub fn second_order_residual(traj: &Trajectory, d: &DerivedParams) -> Result<f64> {
    let n = traj.len();
    if n < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: n });
    }
    let h = traj.times[1] - traj.times[0];
    let uniform = traj
        .times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1e-300));
    if !uniform || !(h > 0.0) {
        return Err(Error::NonUniformSampling);
    }
    let stiffness = d.gamma * d.gamma + 4.0 * d.alpha_sq * d.beta_sq;
    // damping sign per coordinate: Q₁ −, Q₂ +, Π₁ +, Π₂ −
    let damping = [-2.0 * d.gamma, 2.0 * d.gamma, 2.0 * d.gamma, -2.0 * d.gamma];
    let mut worst = 0.0f64;
    for w in traj.points.windows(3) {
        for c in 0..4 {
            let (prev, cur, next) = (w[0][c], w[1][c], w[2][c]);
            let first = (next - prev) / (2.0 * h);
            let second = (next - 2.0 * cur + prev) / (h * h);
            worst = worst.max((second + damping[c] * first + stiffness * cur).abs());
        }
    }
    Ok(worst)
}

/// max |H(t) − H(0)| along the samples.
pub fn energy_drift(traj: &Trajectory, d: &DerivedParams) -> f64 {
    let Some(first) = traj.points.first() else {
        return 0.0;
    };
    let h0 = hamiltonian_c(first, d);
    traj.points
        .iter()
        .map(|z| (hamiltonian_c(z, d) - h0).abs())
        .fold(0.0, f64::max)
}

/// Coordinate planes used for phase portraits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Projection {
    Q1Pi1,
    Q2Pi2,
    Q1Pi2,
    Q2Pi1,
}

impl Projection {
    pub const ALL: [Projection; 4] = [
        Projection::Q1Pi1,
        Projection::Q2Pi2,
        Projection::Q1Pi2,
        Projection::Q2Pi1,
    ];

    pub fn indices(self) -> (usize, usize) {
        match self {
            Projection::Q1Pi1 => (0, 2),
            Projection::Q2Pi2 => (1, 3),
            Projection::Q1Pi2 => (0, 3),
            Projection::Q2Pi1 => (1, 2),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Projection::Q1Pi1 => "Q1-Pi1",
            Projection::Q2Pi2 => "Q2-Pi2",
            Projection::Q1Pi2 => "Q1-Pi2",
            Projection::Q2Pi1 => "Q2-Pi1",
        }
    }
}

/// One period of closed-form evolution with its four planar projections.
#[derive(Debug, Clone, PartialEq)]
pub struct SpiralSamples {
    pub trajectory: Trajectory,
    pub projections: [(Projection, Vec<(f64, f64)>); 4],
}

impl SpiralSamples {
    pub fn projection(&self, plane: Projection) -> &[(f64, f64)] {
        &self
            .projections
            .iter()
            .find(|(p, _)| *p == plane)
            .expect("all planes present")
            .1
    }
}

/// Uniform closed-form samples over [0, 2π/Ω].
pub fn spiral_samples(z0: PhasePoint, d: &DerivedParams, n_samples: usize) -> Result<SpiralSamples> {
    let trajectory = closed_form_trajectory(z0, d, 0.0, d.period(), n_samples)?;
    let projections = Projection::ALL.map(|p| (p, trajectory.projection(p)));
    Ok(SpiralSamples {
        trajectory,
        projections,
    })
}

/// Least-squares fit of log-radius against winding angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fits ln r = slope·φ + intercept for a planar curve, φ being the unwrapped
/// polar angle measured in the curve's own sense of rotation (so φ grows).
pub fn fit_log_spiral(points: &[(f64, f64)]) -> Result<SpiralFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: points.len(),
        });
    }
    if points.iter().any(|&(x, y)| x == 0.0 && y == 0.0) {
        return Err(Error::Domain("curve passes through the origin".into()));
    }
    let mut angles = Vec::with_capacity(points.len());
    let mut prev = points[0].1.atan2(points[0].0);
    let mut acc = 0.0;
    angles.push(0.0);
    for &(x, y) in &points[1..] {
        let a = y.atan2(x);
        let mut delta = a - prev;
        if delta > std::f64::consts::PI {
            delta -= std::f64::consts::TAU;
        } else if delta < -std::f64::consts::PI {
            delta += std::f64::consts::TAU;
        }
        acc += delta;
        angles.push(acc);
        prev = a;
    }
    if acc < 0.0 {
        angles.iter_mut().for_each(|a| *a = -*a);
    }
    let logr: Vec<f64> = points.iter().map(|&(x, y)| x.hypot(y).ln()).collect();
    Ok(linear_fit(&angles, &logr))
}

fn linear_fit(x: &[f64], y: &[f64]) -> SpiralFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    SpiralFit {
        slope,
        intercept,
        r_squared,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{max_abs, symplectic_form};

    fn fig(eps: f64) -> DerivedParams {
        DerivedParams::from_figure_controls(eps, 1.0).unwrap()
    }

    #[test]
    fn identity_at_zero() {
        let m = propagator(&fig(0.1), 0.0).unwrap();
        assert_eq!(m.matrix, Mat4::identity());
        assert!(propagator(&fig(0.1), f64::NAN).is_err());
    }

    #[test]
    fn closed_orbit_without_coupling() {
        let d = fig(0.0);
        let m = propagator(&d, d.period()).unwrap();
        assert!(max_abs(&(m.matrix - Mat4::identity())) < 1e-14);
    }

    #[test]
    fn rhs_examples() {
        assert_eq!(eom_rhs(&PhasePoint::ZERO, &fig(0.3)), PhasePoint::ZERO);
        // Γ = 0, α = β: (Q₁, Π₂) and (Q₂, Π₁) rotate independently
        let d = fig(0.0);
        let r = eom_rhs(&PhasePoint::new(1.0, 0.0, 0.0, 0.0), &d);
        assert_eq!(r, PhasePoint::new(0.0, 0.0, 0.0, -1.0));
        let r = eom_rhs(&PhasePoint::new(0.0, 0.0, 1.0, 0.0), &d);
        assert_eq!(r, PhasePoint::new(0.0, 1.0, 0.0, 0.0));
    }

    #[test]
    fn symplectic_and_unimodular() {
        let d = DerivedParams {
            alpha_sq: 0.7,
            beta_sq: 0.2,
            gamma: 0.05,
            big_omega: 2.0 * (0.14f64).sqrt(),
            eps_small: 0.05,
            eps_ratio: 0.05 / (2.0 * 0.14f64.sqrt()),
        };
        let j = symplectic_form();
        for k in 0..20 {
            let t = d.period() * k as f64 / 19.0;
            let m = propagator(&d, t).unwrap().matrix;
            assert!(max_abs(&(m.transpose() * j * m - j)) < 1e-12);
            assert!((m.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rk4_step_guard() {
        let d = fig(0.1);
        let err = integrate(PhasePoint::ZERO, &d, 1.0, d.period() / 50.0).unwrap_err();
        assert_eq!(err.kind(), "StepTooLarge");
    }

    #[test]
    fn rk4_zero_stays_zero() {
        let d = fig(0.1);
        let tr = integrate(PhasePoint::ZERO, &d, d.period(), d.period() / 1e3).unwrap();
        assert!(tr.points.iter().all(|z| *z == PhasePoint::ZERO));
        assert_eq!(*tr.times.last().unwrap(), d.period());
    }

    #[test]
    fn residual_needs_three_points() {
        let d = fig(0.1);
        let tr = closed_form_trajectory(PhasePoint::ZERO, &d, 0.0, 1.0, 2).unwrap();
        assert_eq!(
            second_order_residual(&tr, &d).unwrap_err().kind(),
            "InsufficientSamples"
        );
        let tr = closed_form_trajectory(PhasePoint::ZERO, &d, 0.0, 1.0, 10).unwrap();
        assert_eq!(second_order_residual(&tr, &d).unwrap(), 0.0);
        assert_eq!(energy_drift(&tr, &d), 0.0);
    }

    #[test]
    fn sampled_rk4_tracks_closed_form() {
        let d = fig(0.1);
        let z0 = PhasePoint::new(1.0, 0.5, -0.3, 0.2);
        let times: Vec<f64> = (0..17).map(|k| 0.5 + k as f64 * 0.37).collect();
        let rk = integrate_sampled(z0, &d, &times, d.period() / 1e4).unwrap();
        for (t, z) in rk.iter() {
            let exact = propagator(&d, t).unwrap().apply(z0);
            assert!((*z - exact).max_abs() < 1e-10);
        }
        assert!(integrate_sampled(z0, &d, &[1.0, 0.5], 1e-3).is_err());
    }

    #[test]
    fn spiral_fit_pure_spiral() {
        let pts: Vec<(f64, f64)> = (0..200)
            .map(|k| {
                let phi = k as f64 * 0.05;
                let r = (0.3 * phi).exp();
                (r * phi.cos(), -r * phi.sin())
            })
            .collect();
        let fit = fit_log_spiral(&pts).unwrap();
        assert!((fit.slope - 0.3).abs() < 1e-12);
        assert!(fit.r_squared > 1.0 - 1e-12);
    }
}
