//! `ncsqueeze` command line: parameter reports, invariant audits, trajectory
//! and figure-data exports.
//!
//! Exit codes: 0 success, 1 invariant failure, 2 invalid parameters,
//! 3 I/O failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ncsqueeze::audit::{run_audit, AuditTarget};
use ncsqueeze::dynamics::{closed_form_trajectory, integrate_sampled};
use ncsqueeze::export::{ExportTable, Format};
use ncsqueeze::figures::{self, NamedTable, TOOL, VERSION};
use ncsqueeze::{derive, DerivedParams, NcParams, ParamOverrides, PhasePoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_PARAMS: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ncsqueeze", version, about = "Noncommutative oscillator squeezing toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the lambda*mu constraint and report the derived constants.
    Derive {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the invariant suite over seeded random cases.
    Audit {
        #[command(flatten)]
        params: ParamArgs,
        /// Number of random cases.
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Export the spiral trajectories (four coupling ratios, two departure points).
    Figure1 {
        #[arg(long = "big-omega", default_value_t = 1.0)]
        big_omega: f64,
        #[arg(long, default_value_t = figures::FIGURE1_SAMPLES)]
        samples: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Export the squeezing sequence of the oscillator-1 Wigner marginal.
    Figure2 {
        #[arg(long = "eps-ratio", default_value_t = figures::FIGURE2_EPS)]
        eps_ratio: f64,
        #[arg(long = "big-omega", default_value_t = 1.0)]
        big_omega: f64,
        /// Points per grid axis.
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sample the closed-form evolution from one initial point.
    Trajectory {
        #[command(flatten)]
        params: ParamArgs,
        /// Initial Q1.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        x: f64,
        /// Initial Pi1.
        #[arg(long = "pi-x", default_value_t = 0.0, allow_negative_numbers = true)]
        pi_x: f64,
        /// Initial Q2.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        y: f64,
        /// Initial Pi2.
        #[arg(long = "pi-y", default_value_t = 0.0, allow_negative_numbers = true)]
        pi_y: f64,
        #[arg(long = "t-start", default_value_t = 0.0, allow_negative_numbers = true)]
        t_start: f64,
        /// Defaults to one period 2*pi/Omega.
        #[arg(long = "t-end", allow_negative_numbers = true)]
        t_end: Option<f64>,
        #[arg(long, default_value_t = figures::FIGURE1_SAMPLES)]
        samples: usize,
        /// Add RK4 columns next to the closed form.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hbar: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Figure controls: coupling ratio Gamma/Omega (bypasses theta, eta).
    #[arg(long = "eps-ratio", allow_negative_numbers = true)]
    pub eps_ratio: Option<f64>,
    /// Figure controls: rotation frequency Omega.
    #[arg(long = "big-omega", allow_negative_numbers = true)]
    pub big_omega: Option<f64>,
    /// `name = value` parameter file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Output directory. Tables go to stdout when omitted (derive,
    /// trajectory) or to the current directory (figure commands).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Where the system parameters come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamSource {
    Physical(NcParams),
    Figure { eps_ratio: f64, big_omega: f64 },
}

impl ParamSource {
    pub fn derived(&self) -> ncsqueeze::Result<DerivedParams> {
        match self {
            ParamSource::Physical(p) => derive(p),
            ParamSource::Figure {
                eps_ratio,
                big_omega,
            } => DerivedParams::from_figure_controls(*eps_ratio, *big_omega),
        }
    }

    fn describe(&self) -> String {
        match self {
            ParamSource::Physical(p) => format!(
                "--theta {:?} --eta {:?} --mass {:?} --omega {:?} --hbar {:?} --lambda {:?} --mu {:?}",
                p.theta, p.eta, p.mass, p.omega, p.hbar, p.lambda, p.mu
            ),
            ParamSource::Figure {
                eps_ratio,
                big_omega,
            } => format!("--eps-ratio {eps_ratio:?} --big-omega {big_omega:?}"),
        }
    }
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn params(e: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_PARAMS,
            message: e.to_string(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("IoError: {}: {e}", path.display()),
        }
    }
}

impl From<ncsqueeze::Error> for Failure {
    fn from(e: ncsqueeze::Error) -> Self {
        Failure::params(e)
    }
}

type CmdResult = Result<(), Failure>;

impl ParamArgs {
    fn physical_overrides(&self) -> ParamOverrides {
        ParamOverrides {
            theta: self.theta,
            eta: self.eta,
            mass: self.mass,
            omega: self.omega,
            hbar: self.hbar,
            lambda: self.lambda,
            mu: self.mu,
        }
    }

    fn has_physical(&self) -> bool {
        !self.physical_overrides().is_empty() || self.config.is_some()
    }

    pub fn resolve(&self) -> Result<ParamSource, Failure> {
        let figure = self.eps_ratio.is_some() || self.big_omega.is_some();
        if figure {
            if self.has_physical() {
                return Err(Failure::params(
                    "DomainError: --eps-ratio/--big-omega cannot be combined with physical parameters",
                ));
            }
            return Ok(ParamSource::Figure {
                eps_ratio: self.eps_ratio.unwrap_or(0.0),
                big_omega: self.big_omega.unwrap_or(1.0),
            });
        }
        let mut base = ParamOverrides::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
            base = ParamOverrides::from_config_str(&text)?;
        }
        Ok(ParamSource::Physical(
            base.merge(self.physical_overrides()).build()?,
        ))
    }
}

fn write_tables(
    tables: &[NamedTable],
    output: &OutputArgs,
    stdout: &mut dyn Write,
) -> CmdResult {
    let dir = output.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| Failure::io(&dir, e))?;
    let format: Format = output.format.into();
    for t in tables {
        let path = dir.join(format!("{}.{}", t.name, format.extension()));
        fs::write(&path, t.table.render(format)).map_err(|e| Failure::io(&path, e))?;
        let _ = writeln!(stdout, "wrote {}", path.display());
    }
    Ok(())
}

/// Writes one table to `--out/<name>.<ext>` or to stdout.
fn emit(table: NamedTable, output: &OutputArgs, stdout: &mut dyn Write) -> CmdResult {
    if output.out.is_some() {
        write_tables(std::slice::from_ref(&table), output, stdout)
    } else {
        stdout
            .write_all(table.table.render(output.format.into()).as_bytes())
            .map_err(|e| Failure::io(Path::new("<stdout>"), e))
    }
}

fn verdict(source: &ParamSource, d: &DerivedParams) -> &'static str {
    match source {
        ParamSource::Figure { .. } => "figure controls",
        ParamSource::Physical(p) if p.is_commutative() => "commutative limit",
        _ if d.gamma == 0.0 => "uncoupled (eps = 0)",
        _ => "coupled",
    }
}

fn cmd_derive(params: &ParamArgs, output: &OutputArgs, stdout: &mut dyn Write) -> CmdResult {
    let source = params.resolve()?;
    let d = source.derived()?;
    let mut columns = vec![
        "alpha_sq",
        "beta_sq",
        "gamma",
        "big_omega",
        "eps_small",
        "eps_ratio",
        "period",
    ];
    let mut row = vec![
        d.alpha_sq,
        d.beta_sq,
        d.gamma,
        d.big_omega,
        d.eps_small,
        d.eps_ratio,
        d.period(),
    ];
    if let ParamSource::Physical(p) = &source {
        columns.extend([
            "theta",
            "eta",
            "mass",
            "omega",
            "hbar",
            "lambda",
            "mu",
            "lambda_mu",
            "constraint_residual",
            "jacobian",
            "big_omega_alt",
        ]);
        row.extend([
            p.theta,
            p.eta,
            p.mass,
            p.omega,
            p.hbar,
            p.lambda,
            p.mu,
            p.lambda_mu(),
            p.constraint_residual(),
            p.jacobian(),
            p.big_omega_from_eps(),
        ]);
    }
    let mut table = ExportTable::new(columns);
    table.push_meta("tool", TOOL);
    table.push_meta("version", VERSION);
    table.push_meta("command", "derive");
    table.push_meta("rerun", format!("{TOOL} derive {}", source.describe()));
    table.push_meta("verdict", verdict(&source, &d));
    table.push_meta("alpha_sq_positive", d.alpha_sq > 0.0);
    table.push_meta("beta_sq_positive", d.beta_sq > 0.0);
    table.push_meta("omega_real", true);
    table.push_row(row)?;
    emit(
        NamedTable {
            name: "derive".into(),
            table,
        },
        output,
        stdout,
    )
}

fn cmd_audit(
    params: &ParamArgs,
    cases: usize,
    seed: u64,
    stdout: &mut dyn Write,
) -> CmdResult {
    let target = if params.eps_ratio.is_some() || params.big_omega.is_some() {
        return Err(Failure::params(
            "DomainError: audit needs physical parameters (the map checks use theta, eta)",
        ));
    } else if params.has_physical() {
        match params.resolve()? {
            ParamSource::Physical(p) => AuditTarget::Fixed(p),
            ParamSource::Figure { .. } => unreachable!(),
        }
    } else {
        AuditTarget::Random
    };
    let report = run_audit(target, cases, seed)?;
    let _ = writeln!(
        stdout,
        "audit: {} cases, seed {seed}, {}",
        report.cases,
        match target {
            AuditTarget::Fixed(_) => "fixed parameters",
            AuditTarget::Random => "random parameters",
        }
    );
    for c in &report.checks {
        let _ = writeln!(
            stdout,
            "{}  {}: worst {:.3e} (tolerance {:.0e})",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name,
            c.worst,
            c.tolerance
        );
    }
    match report.first_failure() {
        None => Ok(()),
        Some(c) => Err(Failure {
            code: EXIT_INVARIANT,
            message: format!("invariant failed: {}", c.name),
        }),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_trajectory(
    params: &ParamArgs,
    z0: PhasePoint,
    t_start: f64,
    t_end: Option<f64>,
    samples: usize,
    oracle: bool,
    output: &OutputArgs,
    stdout: &mut dyn Write,
) -> CmdResult {
    let source = params.resolve()?;
    let d = source.derived()?;
    let t_end = t_end.unwrap_or(d.period());
    if !(t_start.is_finite() && t_end.is_finite() && t_start >= 0.0 && t_end > t_start) {
        return Err(Failure::params(format!(
            "DomainError: invalid time range [{t_start}, {t_end}]"
        )));
    }
    let tr = closed_form_trajectory(z0, &d, t_start, t_end, samples)?;
    let mut columns = vec!["tau", "Q1", "Q2", "Pi1", "Pi2"];
    let rk = if oracle {
        columns.extend(["Q1_rk4", "Q2_rk4", "Pi1_rk4", "Pi2_rk4"]);
        Some(integrate_sampled(z0, &d, &tr.times, d.period() / 1e4)?)
    } else {
        None
    };
    let mut table = ExportTable::new(columns);
    table.push_meta("tool", TOOL);
    table.push_meta("version", VERSION);
    table.push_meta("command", "trajectory");
    table.push_meta(
        "rerun",
        format!(
            "{TOOL} trajectory {} --x {:?} --pi-x {:?} --y {:?} --pi-y {:?} --t-start {t_start:?} --t-end {t_end:?} --samples {samples}{}",
            source.describe(),
            z0.q1(),
            z0.p1(),
            z0.q2(),
            z0.p2(),
            if oracle { " --oracle" } else { "" }
        ),
    );
    table.push_meta("derived", d);
    for (k, (t, z)) in tr.iter().enumerate() {
        let mut row = vec![t, z.q1(), z.q2(), z.p1(), z.p2()];
        if let Some(rk) = &rk {
            let r = rk.points[k];
            row.extend([r.q1(), r.q2(), r.p1(), r.p2()]);
        }
        table.push_row(row)?;
    }
    emit(
        NamedTable {
            name: "trajectory".into(),
            table,
        },
        output,
        stdout,
    )
}

pub fn execute(cli: Cli, stdout: &mut dyn Write) -> CmdResult {
    match cli.command {
        Command::Derive { params, output } => cmd_derive(&params, &output, stdout),
        Command::Audit {
            params,
            cases,
            seed,
        } => cmd_audit(&params, cases, seed, stdout),
        Command::Figure1 {
            big_omega,
            samples,
            output,
        } => {
            let tables = figures::figure1_tables(big_omega, samples)?;
            write_tables(&tables, &output, stdout)
        }
        Command::Figure2 {
            eps_ratio,
            big_omega,
            grid,
            hbar,
            output,
        } => {
            let fig = figures::figure2(eps_ratio, big_omega, grid, hbar)?;
            let mut tables = fig.grid_tables;
            tables.push(fig.metrics);
            write_tables(&tables, &output, stdout)
        }
        Command::Trajectory {
            params,
            x,
            pi_x,
            y,
            pi_y,
            t_start,
            t_end,
            samples,
            oracle,
            output,
        } => cmd_trajectory(
            &params,
            PhasePoint::from_initial(x, pi_x, y, pi_y),
            t_start,
            t_end,
            samples,
            oracle,
            &output,
            stdout,
        ),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARAMS } else { EXIT_OK };
            let _ = if code == EXIT_OK {
                write!(stdout, "{e}")
            } else {
                write!(stderr, "{e}")
            };
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
