//! Noncommutative parameters, the λμ constraint and the effective constants
//! of the coupled-oscillator dynamics.
//!
//! Units default to ħ = m = ω = 1. Every value here is immutable once built.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the λμ(1 − λμ) = θη/4ħ² residual for user-supplied splits.
pub const CONSTRAINT_TOL: f64 = 1e-10;

/// Physical and map parameters of the noncommutative two-oscillator system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NcParams {
    pub theta: f64,
    pub eta: f64,
    pub mass: f64,
    pub omega: f64,
    pub hbar: f64,
    pub lambda: f64,
    pub mu: f64,
}

/// Returns λμ solving λμ(1 − λμ) = θη/4ħ² on the branch that tends to 1 in
/// the commutative limit.
pub fn solve_constraint(theta: f64, eta: f64, hbar: f64) -> Result<f64> {
    if !(theta.is_finite() && eta.is_finite() && hbar.is_finite()) {
        return Err(Error::Domain("theta, eta and hbar must be finite".into()));
    }
    if hbar <= 0.0 {
        return Err(Error::Domain(format!("hbar = {hbar} must be positive")));
    }
    let theta_eta = theta * eta;
    if theta_eta < 0.0 {
        return Err(Error::Domain(format!(
            "theta*eta = {theta_eta} must be non-negative"
        )));
    }
    let hbar_sq = hbar * hbar;
    if theta_eta >= hbar_sq {
        return Err(Error::SingularMap { theta_eta, hbar_sq });
    }
    let x = theta_eta / hbar_sq;
    // 1 - λμ written without cancellation
    let deficit = 0.5 * x / (1.0 + (1.0 - x).sqrt());
    Ok(1.0 - deficit)
}

/// |λμ(1 − λμ) − θη/4ħ²|
pub fn constraint_residual(theta: f64, eta: f64, hbar: f64, lambda_mu: f64) -> f64 {
    (lambda_mu * (1.0 - lambda_mu) - theta * eta / (4.0 * hbar * hbar)).abs()
}

impl NcParams {
    /// Builds parameters with the symmetric split λ = μ = √(λμ).
    pub fn new(theta: f64, eta: f64, mass: f64, omega: f64, hbar: f64) -> Result<Self> {
        Self::with_split(theta, eta, mass, omega, hbar, None, None)
    }

    /// Commutative system in default units.
    pub fn commutative() -> Self {
        Self {
            theta: 0.0,
            eta: 0.0,
            mass: 1.0,
            omega: 1.0,
            hbar: 1.0,
            lambda: 1.0,
            mu: 1.0,
        }
    }

    /// Builds parameters with an optional explicit λ and/or μ.
    ///
    /// With one of them given the other is fixed by the constraint; with both
    /// given their product must satisfy it to [`CONSTRAINT_TOL`].
    pub fn with_split(
        theta: f64,
        eta: f64,
        mass: f64,
        omega: f64,
        hbar: f64,
        lambda: Option<f64>,
        mu: Option<f64>,
    ) -> Result<Self> {
        for (name, v) in [("mass", mass), ("omega", omega), ("hbar", hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} = {v} must be positive")));
            }
        }
        let product = solve_constraint(theta, eta, hbar)?;
        let (lambda, mu) = match (lambda, mu) {
            (None, None) => (product.sqrt(), product.sqrt()),
            (Some(l), None) => (l, product / l),
            (None, Some(m)) => (product / m, m),
            (Some(l), Some(m)) => {
                let res = constraint_residual(theta, eta, hbar, l * m);
                if res > CONSTRAINT_TOL {
                    return Err(Error::Domain(format!(
                        "lambda*mu = {} violates the constraint (residual {res:e})",
                        l * m
                    )));
                }
                (l, m)
            }
        };
        for (name, v) in [("lambda", lambda), ("mu", mu)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} = {v} must be positive")));
            }
        }
        Ok(Self {
            theta,
            eta,
            mass,
            omega,
            hbar,
            lambda,
            mu,
        })
    }

    pub fn lambda_mu(&self) -> f64 {
        self.lambda * self.mu
    }

    pub fn constraint_residual(&self) -> f64 {
        constraint_residual(self.theta, self.eta, self.hbar, self.lambda_mu())
    }

    /// 1 − θη/ħ², the Jacobian of the forward map.
    pub fn jacobian(&self) -> f64 {
        1.0 - self.theta * self.eta / (self.hbar * self.hbar)
    }

    pub fn is_commutative(&self) -> bool {
        self.theta == 0.0 && self.eta == 0.0
    }

    /// ε = (mωθ − η/mω)/2ħ
    pub fn eps_small(&self) -> f64 {
        let mw = self.mass * self.omega;
        (mw * self.theta - self.eta / mw) / (2.0 * self.hbar)
    }

    /// Ω from its second closed form, ω√((2λμ − 1)² − ε²). Returns NaN in the
    /// overdamped regime.
    pub fn big_omega_from_eps(&self) -> f64 {
        let d = 2.0 * self.lambda_mu() - 1.0;
        let e = self.eps_small();
        self.omega * (d * d - e * e).sqrt()
    }

    /// Parses the flat `name = value` configuration format; see
    /// [`ParamOverrides::from_config_str`].
    pub fn from_config_str(text: &str) -> Result<Self> {
        ParamOverrides::from_config_str(text)?.build()
    }

    /// Inverse of [`NcParams::from_config_str`].
    pub fn to_config_string(&self) -> String {
        format!(
            "theta = {:?}\neta = {:?}\nmass = {:?}\nomega = {:?}\nhbar = {:?}\nlambda = {:?}\nmu = {:?}\n",
            self.theta, self.eta, self.mass, self.omega, self.hbar, self.lambda, self.mu
        )
    }
}

/// Partially specified parameters, as read from a config file or flags.
/// Unset physical values fall back to ħ = m = ω = 1 and θ = η = 0.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ParamOverrides {
    pub theta: Option<f64>,
    pub eta: Option<f64>,
    pub mass: Option<f64>,
    pub omega: Option<f64>,
    pub hbar: Option<f64>,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
}

impl ParamOverrides {
    /// Parses `name = value` lines. Recognised names: theta, eta, mass,
    /// omega, hbar, lambda, mu. Blank lines and `#` comments are skipped.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut out = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, value) = line.split_once('=').ok_or_else(|| {
                Error::Domain(format!("line {}: expected `name = value`", lineno + 1))
            })?;
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::Domain(format!(
                    "line {}: `{}` is not a number",
                    lineno + 1,
                    value.trim()
                ))
            })?;
            let slot = match name.trim() {
                "theta" => &mut out.theta,
                "eta" => &mut out.eta,
                "mass" => &mut out.mass,
                "omega" => &mut out.omega,
                "hbar" => &mut out.hbar,
                "lambda" => &mut out.lambda,
                "mu" => &mut out.mu,
                other => {
                    return Err(Error::Domain(format!(
                        "line {}: unknown parameter `{other}`",
                        lineno + 1
                    )))
                }
            };
            *slot = Some(value);
        }
        Ok(out)
    }

    /// Values set in `other` win.
    pub fn merge(self, other: ParamOverrides) -> Self {
        Self {
            theta: other.theta.or(self.theta),
            eta: other.eta.or(self.eta),
            mass: other.mass.or(self.mass),
            omega: other.omega.or(self.omega),
            hbar: other.hbar.or(self.hbar),
            lambda: other.lambda.or(self.lambda),
            mu: other.mu.or(self.mu),
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }

    pub fn build(&self) -> Result<NcParams> {
        NcParams::with_split(
            self.theta.unwrap_or(0.0),
            self.eta.unwrap_or(0.0),
            self.mass.unwrap_or(1.0),
            self.omega.unwrap_or(1.0),
            self.hbar.unwrap_or(1.0),
            self.lambda,
            self.mu,
        )
    }
}

impl Default for NcParams {
    fn default() -> Self {
        Self::commutative()
    }
}

impl FromStr for NcParams {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_config_str(s)
    }
}

/// Effective constants of the coupled dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub alpha_sq: f64,
    pub beta_sq: f64,
    /// Γ, the coupling rate.
    pub gamma: f64,
    /// Ω = 2αβ, the rotation frequency.
    pub big_omega: f64,
    /// ε = Γ/ω
    pub eps_small: f64,
    /// ϵ = Γ/Ω, slope of the logarithmic spirals.
    pub eps_ratio: f64,
}

impl DerivedParams {
    pub fn alpha(&self) -> f64 {
        self.alpha_sq.sqrt()
    }

    pub fn beta(&self) -> f64 {
        self.beta_sq.sqrt()
    }

    /// 2π/Ω
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.big_omega
    }

    /// Parameterization used by the figures: α = β = √(Ω/2), Γ = ϵΩ.
    ///
    /// No (θ, η) is implied. `eps_small` is reported as ϵ/√(1 + ϵ²), i.e. the
    /// value of ε giving ratio ϵ when |2λμ − 1| = 1.
    pub fn from_figure_controls(eps_ratio: f64, big_omega: f64) -> Result<Self> {
        if !(eps_ratio.is_finite() && eps_ratio >= 0.0) {
            return Err(Error::Domain(format!(
                "eps_ratio = {eps_ratio} must be non-negative"
            )));
        }
        if !(big_omega.is_finite() && big_omega > 0.0) {
            return Err(Error::Domain(format!(
                "big_omega = {big_omega} must be positive"
            )));
        }
        let half = big_omega / 2.0;
        Ok(Self {
            alpha_sq: half,
            beta_sq: half,
            gamma: eps_ratio * big_omega,
            big_omega,
            eps_small: eps_ratio / (1.0 + eps_ratio * eps_ratio).sqrt(),
            eps_ratio,
        })
    }
}

impl fmt::Display for DerivedParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha^2={} beta^2={} Gamma={} Omega={} eps={} eps_ratio={}",
            self.alpha_sq, self.beta_sq, self.gamma, self.big_omega, self.eps_small, self.eps_ratio
        )
    }
}

/// Derives α², β², Γ, Ω, ε and ϵ from the noncommutative parameters.
pub fn derive(p: &NcParams) -> Result<DerivedParams> {
    let NcParams {
        theta,
        eta,
        mass: m,
        omega: w,
        hbar: h,
        lambda: l,
        mu,
    } = *p;
    let alpha_sq = l * l * m * w * w / 2.0 - eta * eta / (8.0 * m * mu * mu * h * h);
    let beta_sq = mu * mu / (2.0 * m) - m * w * w * theta * theta / (8.0 * l * l * h * h);
    if !(alpha_sq > 0.0) {
        return Err(Error::NonPositiveStiffness {
            name: "alpha^2",
            value: alpha_sq,
        });
    }
    if !(beta_sq > 0.0) {
        return Err(Error::NonPositiveStiffness {
            name: "beta^2",
            value: beta_sq,
        });
    }
    let gamma = theta * m * w * w / (2.0 * h) - eta / (2.0 * m * h);
    let eps_small = p.eps_small();
    let d = 2.0 * p.lambda_mu() - 1.0;
    if d * d <= eps_small * eps_small {
        return Err(Error::OverdampedRegime {
            lhs: d * d,
            eps_sq: eps_small * eps_small,
        });
    }
    let big_omega = 2.0 * (alpha_sq * beta_sq).sqrt();
    Ok(DerivedParams {
        alpha_sq,
        beta_sq,
        gamma,
        big_omega,
        eps_small,
        eps_ratio: gamma / big_omega,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn commutative_limit_is_identity_branch() {
        assert_eq!(solve_constraint(0.0, 0.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn three_quarter_root() {
        // θη/ħ² = 3/4 forces λμ = 3/4
        let p = solve_constraint(0.75, 1.0, 1.0).unwrap();
        assert!((p - 0.75).abs() < 1e-15);
    }

    #[test]
    fn residual_for_small_nc() {
        let p = solve_constraint(0.2, 0.1, 1.0).unwrap();
        assert!((p - 0.99498).abs() < 1e-5);
        assert!(constraint_residual(0.2, 0.1, 1.0, p) < 1e-12);
    }

    #[test]
    fn constraint_domain_errors() {
        assert_eq!(solve_constraint(-0.1, 0.2, 1.0).unwrap_err().kind(), "DomainError");
        assert_eq!(solve_constraint(1.0, 1.0, 1.0).unwrap_err().kind(), "SingularMap");
        assert_eq!(solve_constraint(2.0, 1.0, 1.0).unwrap_err().kind(), "SingularMap");
        assert_eq!(solve_constraint(0.1, 0.1, 0.0).unwrap_err().kind(), "DomainError");
    }

    #[test]
    fn derive_commutative() {
        let d = derive(&NcParams::commutative()).unwrap();
        assert_eq!(d.alpha_sq, 0.5);
        assert_eq!(d.beta_sq, 0.5);
        assert_eq!(d.gamma, 0.0);
        assert_eq!(d.big_omega, 1.0);
        assert_eq!(d.eps_small, 0.0);
        assert_eq!(d.eps_ratio, 0.0);
    }

    #[test]
    fn symmetric_units_give_alpha_equal_beta() {
        let p = NcParams::new(0.3, 0.3, 1.0, 1.0, 1.0).unwrap();
        let d = derive(&p).unwrap();
        assert_relative_eq!(d.alpha_sq, d.beta_sq, max_relative = 1e-15);
    }

    #[test]
    fn derive_small_nc_example() {
        let p = NcParams::new(0.2, 0.1, 1.0, 1.0, 1.0).unwrap();
        let d = derive(&p).unwrap();
        assert_relative_eq!(d.gamma, 0.05, max_relative = 1e-14);
        assert_relative_eq!(d.eps_small, 0.05, max_relative = 1e-14);
        // independent recomputation: λμ = (1 + √0.98)/2
        let lm = (1.0 + 0.98f64.sqrt()) / 2.0;
        let expect = ((2.0 * lm - 1.0).powi(2) - 0.0025).sqrt();
        assert_relative_eq!(d.big_omega, expect, max_relative = 1e-12);
        assert!((d.big_omega - 0.98869).abs() < 5e-5);
        assert_relative_eq!(d.big_omega, p.big_omega_from_eps(), max_relative = 1e-12);
    }

    #[test]
    fn figure_controls() {
        let d = DerivedParams::from_figure_controls(0.0, 1.0).unwrap();
        assert_eq!(d.gamma, 0.0);
        assert_relative_eq!(d.alpha(), 0.5f64.sqrt(), max_relative = 1e-15);
        assert_eq!(d.alpha_sq, d.beta_sq);

        let d = DerivedParams::from_figure_controls(0.1, 1.0).unwrap();
        assert_relative_eq!(d.gamma, 0.1, max_relative = 1e-15);

        let d = DerivedParams::from_figure_controls(1e-3, 2.0).unwrap();
        assert_relative_eq!(d.gamma, 0.002, max_relative = 1e-15);
        assert_relative_eq!(d.alpha(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(d.beta(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(2.0 * d.alpha() * d.beta(), d.big_omega, max_relative = 1e-15);

        assert!(DerivedParams::from_figure_controls(-0.1, 1.0).is_err());
        assert!(DerivedParams::from_figure_controls(0.1, 0.0).is_err());
    }

    #[test]
    fn negative_stiffness_rejected() {
        // β² ∝ (λμ)² − θ²/4 in default units, negative once θ > 2λμ
        let p = NcParams::new(3.0, 0.1, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(
            derive(&p).unwrap_err(),
            Error::NonPositiveStiffness {
                name: "beta^2",
                value: derive_beta_sq(&p)
            }
        );
        let p = NcParams::new(0.1, 3.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(derive(&p).unwrap_err().kind(), "NonPositiveStiffness");
    }

    fn derive_beta_sq(p: &NcParams) -> f64 {
        p.mu * p.mu / 2.0 - p.theta * p.theta / (8.0 * p.lambda * p.lambda)
    }

    #[test]
    fn explicit_split() {
        let p = NcParams::with_split(0.2, 0.1, 1.0, 1.0, 1.0, Some(1.1), None).unwrap();
        assert!(p.constraint_residual() < 1e-15);
        assert!((p.mu - p.lambda_mu() / 1.1).abs() < 1e-15);
        let bad = NcParams::with_split(0.2, 0.1, 1.0, 1.0, 1.0, Some(1.0), Some(1.0));
        assert_eq!(bad.unwrap_err().kind(), "DomainError");
    }

    #[test]
    fn config_round_trip() {
        let p = NcParams::with_split(0.2, 0.1, 1.5, 0.7, 1.0, Some(0.9), None).unwrap();
        let q: NcParams = p.to_config_string().parse().unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn overrides_merge() {
        let file = ParamOverrides::from_config_str("theta = 0.2\neta = 0.1\nlambda = 0.9").unwrap();
        let flags = ParamOverrides {
            theta: Some(0.3),
            ..Default::default()
        };
        let p = file.merge(flags).build().unwrap();
        assert_eq!(p.theta, 0.3);
        assert_eq!(p.eta, 0.1);
        assert_eq!(p.lambda, 0.9);
        assert!(ParamOverrides::default().is_empty());
    }

    #[test]
    fn config_parse_errors() {
        assert!(NcParams::from_config_str("theta 0.1").is_err());
        assert!(NcParams::from_config_str("theta = abc").is_err());
        assert!(NcParams::from_config_str("kappa = 1").is_err());
        let p = NcParams::from_config_str("# comment\n\ntheta = 0.2\neta=0.1\n").unwrap();
        assert_eq!(p.theta, 0.2);
        assert_eq!(p.mass, 1.0);
    }
}
