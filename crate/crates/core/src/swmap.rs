//! Seiberg–Witten coordinate maps between the noncommutative variables
//! (q, p) and canonical variables (Q, Π), and the two Hamiltonian forms.
//!
//! Levi-Civita convention: ε₁₂ = +1 = −ε₂₁.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::params::{DerivedParams, NcParams};
use crate::phase::{symplectic_form, Mat4, PhasePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapDirection {
    /// (Q, Π) → (q, p)
    CanonicalToNc,
    /// (q, p) → (Q, Π)
    NcToCanonical,
}

/// A linear change of phase-space coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMap {
    pub matrix: Mat4,
    pub direction: MapDirection,
}

impl LinearMap {
    pub fn apply(&self, z: PhasePoint) -> PhasePoint {
        &self.matrix * z
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }
}

/// Matrix 𝛀 of the deformed algebra, [z_a, z_b] = iħ 𝛀_ab in (q₁, q₂, p₁, p₂).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorMatrix(pub Mat4);

impl CommutatorMatrix {
    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    /// Pfaffian up to sign: 1 − θη/ħ², equal to √det 𝛀 in the valid domain.
    pub fn sqrt_det(&self) -> f64 {
        let m = &self.0;
        -(m[(0, 1)] * m[(2, 3)] - m[(0, 2)] * m[(1, 3)] + m[(0, 3)] * m[(1, 2)])
    }
}

/// S with (q, p) = S·(Q, Π):
/// qᵢ = λQᵢ − (θ/2λħ) Σⱼ εᵢⱼ Πⱼ,  pᵢ = μΠᵢ + (η/2μħ) Σⱼ εᵢⱼ Qⱼ.
pub fn forward_map(p: &NcParams) -> LinearMap {
    let a = p.theta / (2.0 * p.lambda * p.hbar);
    let b = p.eta / (2.0 * p.mu * p.hbar);
    let (l, m) = (p.lambda, p.mu);
    #[rustfmt::skip]
    let matrix = Mat4::new(
        l,   0.0, 0.0, -a,
        0.0, l,   a,   0.0,
        0.0, b,   m,   0.0,
        -b,  0.0, 0.0, m,
    );
    LinearMap {
        matrix,
        direction: MapDirection::CanonicalToNc,
    }
}

/// T with (Q, Π) = T·(q, p):
/// Qᵢ = μ s (qᵢ + (θ/2λμħ) Σⱼ εᵢⱼ pⱼ),  Πᵢ = λ s (pᵢ − (η/2λμħ) Σⱼ εᵢⱼ qⱼ),
/// s = (1 − θη/ħ²)^(−1/2).
pub fn inverse_map(p: &NcParams) -> Result<LinearMap> {
    let jac = p.jacobian();
    if !(jac > 0.0) {
        return Err(Error::SingularMap {
            theta_eta: p.theta * p.eta,
            hbar_sq: p.hbar * p.hbar,
        });
    }
    let s = jac.powf(-0.5);
    let lm = p.lambda_mu();
    let c = p.theta / (2.0 * lm * p.hbar);
    let d = p.eta / (2.0 * lm * p.hbar);
    let (ms, ls) = (p.mu * s, p.lambda * s);
    #[rustfmt::skip]
    let matrix = Mat4::new(
        ms,       0.0,      0.0,     ms * c,
        0.0,      ms,       -ms * c, 0.0,
        0.0,      -ls * d,  ls,      0.0,
        ls * d,   0.0,      0.0,     ls,
    );
    Ok(LinearMap {
        matrix,
        direction: MapDirection::NcToCanonical,
    })
}

pub fn commutator_matrix(p: &NcParams) -> CommutatorMatrix {
    let t = p.theta / p.hbar;
    let e = p.eta / p.hbar;
    #[rustfmt::skip]
    let m = Mat4::new(
        0.0,  t,    1.0, 0.0,
        -t,   0.0,  0.0, 1.0,
        -1.0, 0.0,  0.0, e,
        0.0,  -1.0, -e,  0.0,
    );
    CommutatorMatrix(m)
}

/// H = (1/m) p₁p₂ + mω² q₁q₂, the off-diagonal metric reading of two
/// oscillators.
pub fn hamiltonian_nc(z: &PhasePoint, p: &NcParams) -> f64 {
    z.p1() * z.p2() / p.mass + p.mass * p.omega * p.omega * z.q1() * z.q2()
}

/// Energy of one ordinary oscillator, k²/2m + mω²x²/2.
pub fn ho_energy(x: f64, k: f64, mass: f64, omega: f64) -> f64 {
    k * k / (2.0 * mass) + 0.5 * mass * omega * omega * x * x
}

/// (q₁, q₂, p₁, p₂) → (x₁, x₂, k₁, k₂) with xⱼ = (q₁ − (−1)ʲ q₂)/√2 and the
/// same for k.
pub fn rotate_45(z: &PhasePoint) -> PhasePoint {
    let r = FRAC_1_SQRT_2;
    PhasePoint::new(
        r * (z.q1() + z.q2()),
        r * (z.q1() - z.q2()),
        r * (z.p1() + z.p2()),
        r * (z.p1() - z.p2()),
    )
}

/// Inverse of [`rotate_45`]. The rotation matrix is symmetric and orthogonal,
/// so this is the same linear map.
pub fn unrotate_45(x: &PhasePoint) -> PhasePoint {
    rotate_45(x)
}

/// H = 2α² Q₁Q₂ + 2β² Π₁Π₂ + Γ(Q₁Π₁ − Q₂Π₂)
pub fn hamiltonian_c(z: &PhasePoint, d: &DerivedParams) -> f64 {
    2.0 * d.alpha_sq * z.q1() * z.q2()
        + 2.0 * d.beta_sq * z.p1() * z.p2()
        + d.gamma * (z.q1() * z.p1() - z.q2() * z.p2())
}

/// Standard form J, the commutator matrix at θ = η = 0.
pub fn standard_form() -> Mat4 {
    symplectic_form()
}
