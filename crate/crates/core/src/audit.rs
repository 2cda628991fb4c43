//! Seeded invariant suite over random parameter sets and phase points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{closed_form_trajectory, energy_drift, integrate, propagator};
use crate::error::Result;
use crate::params::{derive, DerivedParams, NcParams};
use crate::phase::{max_abs, symplectic_form, Mat4, PhasePoint};
use crate::swmap::{commutator_matrix, forward_map, hamiltonian_c, hamiltonian_nc, inverse_map};

pub const MAP_TOL: f64 = 1e-12;
pub const HAMILTONIAN_TOL: f64 = 1e-10;
pub const SYMPLECTIC_TOL: f64 = 1e-10;
pub const ORACLE_TOL: f64 = 1e-6;
pub const DRIFT_TOL: f64 = 1e-10;

/// Random phase points checked per parameter set.
const POINTS_PER_CASE: usize = 10;
/// Sample times per period for the propagator checks.
const TIMES_PER_CASE: usize = 20;

/// Draws a parameter set with positive stiffnesses and real Ω.
///
/// Masses, frequencies and ħ lie in [0.5, 2]; θη/ħ² in [0, 0.6); λ is
/// perturbed away from the symmetric split by up to ±30%.
pub fn random_params<R: Rng>(rng: &mut R) -> (NcParams, DerivedParams) {
    loop {
        let mass = rng.gen_range(0.5..2.0);
        let omega = rng.gen_range(0.5..2.0);
        let hbar = rng.gen_range(0.5..2.0);
        let x: f64 = rng.gen_range(0.0..0.6);
        let ratio: f64 = rng.gen_range(-1.0f64..1.0).exp();
        let theta = hbar * (x * ratio).sqrt();
        let eta = hbar * (x / ratio).sqrt();
        let stretch: f64 = rng.gen_range(0.7..1.3);
        let Ok(sym) = NcParams::new(theta, eta, mass, omega, hbar) else {
            continue;
        };
        let Ok(p) = NcParams::with_split(
            theta,
            eta,
            mass,
            omega,
            hbar,
            Some(sym.lambda * stretch),
            None,
        ) else {
            continue;
        };
        if let Ok(d) = derive(&p) {
            return (p, d);
        }
    }
}

pub fn random_point<R: Rng>(rng: &mut R, scale: f64) -> PhasePoint {
    PhasePoint(std::array::from_fn(|_| rng.gen_range(-scale..scale)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    /// Largest error seen, already divided by whatever scale the tolerance
    /// refers to.
    pub worst: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.worst < self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub cases: usize,
    pub checks: Vec<CheckResult>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.passed())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AuditTarget {
    /// The same parameters for every case; only phase points and times vary.
    Fixed(NcParams),
    /// A fresh random parameter set per case.
    Random,
}

struct Worst([f64; 6]);

impl Worst {
    fn bump(&mut self, i: usize, v: f64) {
        // NaN must register as a failure
        if v.is_nan() || v > self.0[i] {
            self.0[i] = if v.is_nan() { f64::INFINITY } else { v };
        }
    }
}

pub fn run_audit(target: AuditTarget, cases: usize, seed: u64) -> Result<AuditReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let j = symplectic_form();
    let mut w = Worst([0.0; 6]);
    for _ in 0..cases {
        let (p, d) = match target {
            AuditTarget::Fixed(p) => (p, derive(&p)?),
            AuditTarget::Random => random_params(&mut rng),
        };
        let s = forward_map(&p).matrix;
        let t = inverse_map(&p)?.matrix;
        let om = *commutator_matrix(&p).matrix();

        w.bump(0, max_abs(&(t * s - Mat4::identity())));
        w.bump(0, max_abs(&(s * t - Mat4::identity())));
        w.bump(1, max_abs(&(s * j * s.transpose() - om)));
        w.bump(1, max_abs(&(t * om * t.transpose() - j)));
        w.bump(1, (s.determinant() - p.jacobian()).abs());

        for _ in 0..POINTS_PER_CASE {
            let z = random_point(&mut rng, 2.0);
            let hc = hamiltonian_c(&z, &d);
            let hnc = hamiltonian_nc(&(&s * z), &p);
            w.bump(2, (hnc - hc).abs() / (1.0 + hc.abs()));
        }

        let period = d.period();
        for k in 0..TIMES_PER_CASE {
            let tau = period * k as f64 / (TIMES_PER_CASE - 1) as f64;
            let m = propagator(&d, tau)?.matrix;
            w.bump(3, max_abs(&(m.transpose() * j * m - j)));
        }

        let z0 = random_point(&mut rng, 2.0);
        let exact = integrate_reference(z0, &d)?;
        let rk = integrate(z0, &d, period, period / 1e4)?;
        let closed = closed_form_trajectory(z0, &d, 0.0, period, rk.len())?;
        w.bump(4, rk.max_relative_deviation(&closed));
        w.bump(5, energy_drift(&exact, &d));
    }
    let names = [
        ("map composition", MAP_TOL),
        ("symplectic transform", MAP_TOL),
        ("hamiltonian equivalence", HAMILTONIAN_TOL),
        ("propagator symplecticity", SYMPLECTIC_TOL),
        ("oracle equivalence", ORACLE_TOL),
        ("energy drift", DRIFT_TOL),
    ];
    Ok(AuditReport {
        cases,
        checks: names
            .iter()
            .zip(w.0)
            .map(|(&(name, tolerance), worst)| CheckResult {
                name,
                worst,
                tolerance,
            })
            .collect(),
    })
}

fn integrate_reference(
    z0: PhasePoint,
    d: &DerivedParams,
) -> Result<crate::dynamics::Trajectory> {
    closed_form_trajectory(z0, d, 0.0, d.period(), 1024)
}
