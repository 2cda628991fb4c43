use std::ops::{Add, Index, Mul, Sub};

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

/// 4×4 real matrix in (q₁, q₂, p₁, p₂) / (Q₁, Q₂, Π₁, Π₂) order.
pub type Mat4 = Matrix4<f64>;

/// A point of the four-dimensional phase space.
///
/// Index 0 and 1 are the positions of oscillators 1 and 2, index 2 and 3 the
/// matching momenta. The same layout is used on both sides of the coordinate
/// map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint(pub [f64; 4]);

impl PhasePoint {
    pub const ZERO: PhasePoint = PhasePoint([0.0; 4]);

    pub fn new(q1: f64, q2: f64, p1: f64, p2: f64) -> Self {
        Self([q1, q2, p1, p2])
    }

    /// Builds a point from initial conditions named (x, πₓ, y, π_y), where
    /// x = Q₁(0), πₓ = Π₁(0), y = Q₂(0), π_y = Π₂(0).
    pub fn from_initial(x: f64, pi_x: f64, y: f64, pi_y: f64) -> Self {
        Self([x, y, pi_x, pi_y])
    }

    pub fn q1(&self) -> f64 {
        self.0[0]
    }
    pub fn q2(&self) -> f64 {
        self.0[1]
    }
    pub fn p1(&self) -> f64 {
        self.0[2]
    }
    pub fn p2(&self) -> f64 {
        self.0[3]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn to_vector(self) -> Vector4<f64> {
        Vector4::from(self.0)
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        Self([v[0], v[1], v[2], v[3]])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl Index<usize> for PhasePoint {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for PhasePoint {
    type Output = PhasePoint;
    fn add(self, rhs: PhasePoint) -> PhasePoint {
        PhasePoint(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for PhasePoint {
    type Output = PhasePoint;
    fn sub(self, rhs: PhasePoint) -> PhasePoint {
        PhasePoint(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Mul<PhasePoint> for f64 {
    type Output = PhasePoint;
    fn mul(self, rhs: PhasePoint) -> PhasePoint {
        PhasePoint(rhs.0.map(|v| self * v))
    }
}

impl Mul<PhasePoint> for &Mat4 {
    type Output = PhasePoint;
    fn mul(self, rhs: PhasePoint) -> PhasePoint {
        PhasePoint::from_vector(&(self * rhs.to_vector()))
    }
}

impl From<[f64; 4]> for PhasePoint {
    fn from(a: [f64; 4]) -> Self {
        Self(a)
    }
}

/// The canonical symplectic form J, [z_a, z_b] = iħ J_ab for (Q, Π).
pub fn symplectic_form() -> Mat4 {
    Mat4::new(
        0.0, 0.0, 1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, -1.0, 0.0, 0.0,
    )
}

/// Largest absolute entry.
pub fn max_abs(m: &Mat4) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}
