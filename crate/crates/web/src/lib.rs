//! Browser bindings for the spiral and squeezing demo in `www/`.

use ncsqueeze::dynamics::closed_form_trajectory;
use ncsqueeze::figures::{figure2_times, FIGURE1_INITIAL, FIGURE2_STEPS};
use ncsqueeze::wigner::{
    coherent_state, evaluate_grid, evolve, marginal, squeezing_metrics, Axis, GridSpec,
    Normalization, Subsystem,
};
use ncsqueeze::{derive, DerivedParams, NcParams, PhasePoint};
use wasm_bindgen::prelude::*;

/// Closed-form orbit over one period `2π/Ω` with Ω = 1, flattened as
/// `[tau, Q1, Q2, Pi1, Pi2]` per sample.
#[wasm_bindgen]
pub fn spiral(
    eps_ratio: f64,
    x: f64,
    pi_x: f64,
    y: f64,
    pi_y: f64,
    samples: usize,
) -> Result<Vec<f64>, String> {
    let d = DerivedParams::from_figure_controls(eps_ratio, 1.0).map_err(|e| e.to_string())?;
    let z0 = PhasePoint::from_initial(x, pi_x, y, pi_y);
    let tr = closed_form_trajectory(z0, &d, 0.0, d.period(), samples).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(5 * tr.len());
    for (t, z) in tr.iter() {
        out.push(t);
        out.extend_from_slice(&z.0);
    }
    Ok(out)
}

/// Oscillator-1 Wigner marginal at squeezing step `k` (0..=6) on an
/// `n × n` grid, peak normalised to 1.
///
/// Layout: `[q_min, q_max, p_min, p_max, r, tau]` followed by the values,
/// row `i` along Q1 and column `j` along Pi1. The window is the same for every
/// `k` so successive frames are comparable.
#[wasm_bindgen]
pub fn squeezed_grid(eps_ratio: f64, k: usize, n: usize) -> Result<Vec<f64>, String> {
    if k >= FIGURE2_STEPS {
        return Err(format!("k must be below {FIGURE2_STEPS}"));
    }
    if eps_ratio <= 0.0 {
        return Err("eps_ratio must be positive".into());
    }
    let err = |e: ncsqueeze::Error| e.to_string();
    let d = DerivedParams::from_figure_controls(eps_ratio, 1.0).map_err(err)?;
    let init = FIGURE1_INITIAL[0];
    let state0 = coherent_state(PhasePoint::from_initial(init[0], init[1], init[2], init[3]), 1.0)
        .map_err(err)?;
    let times = figure2_times(&d);

    let first = GridSpec::auto(&marginal(&state0, Subsystem::One), n);
    let last_state = evolve(&state0, &d, times[FIGURE2_STEPS - 1]).map_err(err)?;
    let last = GridSpec::auto(&marginal(&last_state, Subsystem::One), n);
    let union = |a: Axis, b: Axis| Axis::new(a.min.min(b.min), a.max.max(b.max), n);
    let spec = GridSpec {
        q: union(first.q, last.q),
        p: union(first.p, last.p),
    };

    let state = evolve(&state0, &d, times[k]).map_err(err)?;
    let sq = squeezing_metrics(&marginal(&state, Subsystem::One), 1.0);
    let grid = evaluate_grid(&state, Subsystem::One, &spec, Normalization::Figure).map_err(err)?;
    let mut out = vec![
        spec.q.min,
        spec.q.max,
        spec.p.min,
        spec.p.max,
        sq.squeeze,
        times[k],
    ];
    out.extend_from_slice(&grid.values);
    Ok(out)
}

/// Plain-text report of the derived constants for physical parameters.
#[wasm_bindgen]
pub fn derive_report(theta: f64, eta: f64, mass: f64, omega: f64, hbar: f64) -> String {
    let p = match NcParams::new(theta, eta, mass, omega, hbar) {
        Ok(p) => p,
        Err(e) => return format!("error: {e}"),
    };
    let d = match derive(&p) {
        Ok(d) => d,
        Err(e) => return format!("error: {e}"),
    };
    format!(
        "lambda = mu = {:.12}\n\
         lambda*mu   = {:.12}\n\
         residual    = {:.3e}\n\
         alpha^2     = {:.12}\n\
         beta^2      = {:.12}\n\
         Gamma       = {:.12}\n\
         Omega       = {:.12}\n\
         eps         = {:.12}\n\
         Gamma/Omega = {:.12}\n\
         period      = {:.12}\n",
        p.lambda,
        p.lambda_mu(),
        p.constraint_residual(),
        d.alpha_sq,
        d.beta_sq,
        d.gamma,
        d.big_omega,
        d.eps_small,
        d.eps_ratio,
        d.period()
    )
}
