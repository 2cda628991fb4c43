//! Data behind the two phase-space figures: spiral trajectories for several
//! coupling ratios and the squeezing sequence of the oscillator-1 marginal.

use std::f64::consts::PI;

use crate::dynamics::spiral_samples;
use crate::error::Result;
use crate::export::ExportTable;
use crate::params::DerivedParams;
use crate::phase::PhasePoint;
use crate::wigner::{
    coherent_state, evaluate_grid, evolve, marginal, squeezing_metrics, GridSpec, Normalization,
    Subsystem, WignerGrid,
};

pub const TOOL: &str = "ncsqueeze";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Coupling ratios of the four rows of the spiral figure.
pub const FIGURE1_EPS: [f64; 4] = [0.0, 0.1, 0.01, 0.001];

/// Departure points (x, πₓ, y, π_y) of the two columns of the spiral figure.
pub const FIGURE1_INITIAL: [[f64; 4]; 2] = [[1.0, 0.0, 1.0, 0.0], [1.0, 1.0, 1.0, 0.0]];

pub const FIGURE1_SAMPLES: usize = 1024;

pub const FIGURE2_EPS: f64 = 0.1;
pub const FIGURE2_STEPS: usize = 7;

/// Columns of every trajectory table.
pub const TRAJECTORY_COLUMNS: [&str; 5] = ["tau", "Q1", "Q2", "Pi1", "Pi2"];

pub const METRICS_COLUMNS: [&str; 6] = ["k", "tau", "var_Q1", "var_Pi1", "r", "purity"];

/// A table and the file stem it should be written under.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedTable {
    pub name: String,
    pub table: ExportTable,
}

pub fn eps_label(eps: f64) -> String {
    format!("{eps}")
}

fn base_meta(table: &mut ExportTable, command: &str, rerun: String) {
    table.push_meta("tool", TOOL);
    table.push_meta("version", VERSION);
    table.push_meta("command", command);
    table.push_meta("rerun", rerun);
}

fn push_derived(table: &mut ExportTable, d: &DerivedParams) {
    table.push_meta("alpha_sq", format!("{:?}", d.alpha_sq));
    table.push_meta("beta_sq", format!("{:?}", d.beta_sq));
    table.push_meta("gamma", format!("{:?}", d.gamma));
    table.push_meta("big_omega", format!("{:?}", d.big_omega));
    table.push_meta("eps_ratio", format!("{:?}", d.eps_ratio));
}

/// One table per (departure point, ϵ): `samples` rows over [0, 2π/Ω].
pub fn figure1_tables(big_omega: f64, samples: usize) -> Result<Vec<NamedTable>> {
    let mut out = Vec::new();
    for (col, init) in FIGURE1_INITIAL.iter().enumerate() {
        let z0 = PhasePoint::from_initial(init[0], init[1], init[2], init[3]);
        for &eps in &FIGURE1_EPS {
            let d = DerivedParams::from_figure_controls(eps, big_omega)?;
            let spiral = spiral_samples(z0, &d, samples)?;
            let mut table = ExportTable::new(TRAJECTORY_COLUMNS);
            base_meta(
                &mut table,
                "figure1",
                format!("{TOOL} figure1 --big-omega {big_omega:?} --samples {samples}"),
            );
            push_derived(&mut table, &d);
            table.push_meta("initial_x_pix_y_piy", format!("{init:?}"));
            table.push_meta("samples", samples);
            for (t, z) in spiral.trajectory.iter() {
                table.push_row(vec![t, z.q1(), z.q2(), z.p1(), z.p2()])?;
            }
            out.push(NamedTable {
                name: format!("figure1_ic{}_eps{}", col + 1, eps_label(eps)),
                table,
            });
        }
    }
    Ok(out)
}

/// τₖ = kπ/(32ϵΩ), the squeezing schedule with Γτₖ = kπ/32.
pub fn figure2_times(d: &DerivedParams) -> Vec<f64> {
    (0..FIGURE2_STEPS)
        .map(|k| {
            if k == 0 {
                0.0
            } else {
                k as f64 * PI / (32.0 * d.eps_ratio * d.big_omega)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure2 {
    pub grids: Vec<WignerGrid>,
    pub grid_tables: Vec<NamedTable>,
    pub metrics: NamedTable,
}

/// Evolves the coherent state at the departure point (1, 0, 1, 0) and samples
/// the (Q₁, Π₁) marginal at each τₖ on an auto-extent grid (±6σ), peak
/// normalised to 1.
pub fn figure2(eps_ratio: f64, big_omega: f64, grid: usize, hbar: f64) -> Result<Figure2> {
    let d = DerivedParams::from_figure_controls(eps_ratio, big_omega)?;
    if eps_ratio == 0.0 {
        return Err(crate::Error::Domain(
            "the squeezing schedule needs eps_ratio > 0".into(),
        ));
    }
    let init = FIGURE1_INITIAL[0];
    let z0 = PhasePoint::from_initial(init[0], init[1], init[2], init[3]);
    let state0 = coherent_state(z0, hbar)?;
    let rerun = format!(
        "{TOOL} figure2 --eps-ratio {eps_ratio:?} --big-omega {big_omega:?} --grid {grid} --hbar {hbar:?}"
    );

    let mut metrics = ExportTable::new(METRICS_COLUMNS);
    base_meta(&mut metrics, "figure2", rerun.clone());
    push_derived(&mut metrics, &d);
    metrics.push_meta("hbar", format!("{hbar:?}"));

    let mut grids = Vec::new();
    let mut grid_tables = Vec::new();
    for (k, &tau) in figure2_times(&d).iter().enumerate() {
        let state = evolve(&state0, &d, tau)?;
        let m = marginal(&state, Subsystem::One);
        let sq = squeezing_metrics(&m, hbar);
        metrics.push_row(vec![k as f64, tau, m.var_q(), m.var_p(), sq.squeeze, sq.purity])?;

        let spec = GridSpec::auto(&m, grid);
        let g = evaluate_grid(&state, Subsystem::One, &spec, Normalization::Figure)?;
        let mut table = ExportTable::new(["Q1", "Pi1", "W"]);
        base_meta(&mut table, "figure2", rerun.clone());
        push_derived(&mut table, &d);
        table.push_meta("hbar", format!("{hbar:?}"));
        table.push_meta("k", k);
        table.push_meta("tau", format!("{tau:?}"));
        table.push_meta("normalization", "figure (peak = 1)");
        table.push_meta(
            "extent",
            format!(
                "Q1 [{:?}, {:?}] x Pi1 [{:?}, {:?}] (mean +/- 6 sigma), {} x {} points",
                spec.q.min, spec.q.max, spec.p.min, spec.p.max, spec.q.count, spec.p.count
            ),
        );
        for row in g.rows() {
            table.push_row(row.to_vec())?;
        }
        grid_tables.push(NamedTable {
            name: format!("figure2_k{k}"),
            table,
        });
        grids.push(g);
    }
    Ok(Figure2 {
        grids,
        grid_tables,
        metrics: NamedTable {
            name: "figure2_metrics".into(),
            table: metrics,
        },
    })
}
