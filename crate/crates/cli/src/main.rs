//! `berezin-lab`: Berezin ranges, numerical ranges, sector indices,
//! inequality checks and figures from the command line.

mod output;
mod svg;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use berezin_core::berezin::{sample_range, DiskGrid, SeriesPolicy};
use berezin_core::inequalities::{
    falsify, verify, Alpha, FalsifyConfig, Family, Outcome, TheoremId, VerifyParams,
};
use berezin_core::operators::file::parse_operands;
use berezin_core::operators::OperatorModel;
use berezin_core::ranges::{
    classify, dphi_closed_bounds, numerical_range_boundary, DEFAULT_ANGLES,
};
use berezin_core::{Error, C64, VERSION};
use clap::{Args, Parser, Subcommand};

use output::{circle, csv, json, PointKind};

/// Drift between the N and 2N truncations above which an advisory is printed.
const DRIFT_ADVISORY: f64 = 1e-6;
const CIRCLE_POINTS: usize = 256;

#[derive(Parser)]
#[command(
    name = "berezin-lab",
    version,
    about = "Berezin transforms, ranges and inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct OperatorArgs {
    /// Composition-differentiation operator with φ(z) = ρz.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    shift_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    shift_im: f64,
    /// JSON operand file.
    #[arg(long)]
    operands: Option<PathBuf>,
    /// Operand name within the file (defaults to the only one, or `T`).
    #[arg(long)]
    operator: Option<String>,
}

#[derive(Args, Clone, Debug)]
struct GridArgs {
    #[arg(long)]
    grid_r: Option<usize>,
    #[arg(long)]
    grid_k: Option<usize>,
    #[arg(long)]
    refine: Option<usize>,
    #[arg(long)]
    trunc: Option<usize>,
}

impl GridArgs {
    fn grid(&self, default: DiskGrid) -> Result<DiskGrid, Error> {
        DiskGrid::full(
            self.grid_r.unwrap_or(default.radial),
            self.grid_k.unwrap_or(default.angular),
        )
    }
}

#[derive(Args, Clone, Debug)]
struct InequalityArgs {
    #[arg(long)]
    theorem: String,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Positive number, or `search` for the log-grid maximization.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    /// Number of nodes of the t grid.
    #[arg(long)]
    t_grid: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Berezin range samples as CSV.
    Range {
        #[command(flatten)]
        op: OperatorArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numerical-range boundary of a truncation as CSV.
    Nrange {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, default_value_t = 64)]
        trunc: usize,
        #[arg(long, default_value_t = DEFAULT_ANGLES)]
        angles: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Berezin and classical sector indices as JSON.
    Sector {
        #[command(flatten)]
        op: OperatorArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = DEFAULT_ANGLES)]
        angles: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form radii for the composition-differentiation operator.
    Bounds {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluates one inequality on an operand file.
    Verify {
        #[command(flatten)]
        ineq: InequalityArgs,
        #[arg(long)]
        operands: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded random search for counterexamples.
    Falsify {
        #[command(flatten)]
        ineq: InequalityArgs,
        #[arg(long, default_value = "diagonal-sectorial")]
        family: String,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Renders figure 1, 2 or 3 as SVG.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        number: u8,
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = DEFAULT_ANGLES)]
        angles: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Input(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(e) if !e.is_input_error() => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Input(s) | Failure::Io(s) => f.write_str(s),
        }
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn read_operands(path: &Path) -> Result<berezin_core::inequalities::Operands, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_operands(&text)?)
}

fn build_operator(a: &OperatorArgs) -> Result<OperatorModel, Failure> {
    let base = match (&a.operands, a.rho) {
        (Some(_), Some(_)) => {
            return Err(Failure::Input(
                "give either --rho or --operands, not both".into(),
            ))
        }
        (None, None) => {
            return Err(Failure::Input(
                "an operator is required: --rho or --operands".into(),
            ))
        }
        (None, Some(rho)) => OperatorModel::dphi(rho)?,
        (Some(path), None) => {
            let mut ops = read_operands(path)?;
            let name = match &a.operator {
                Some(n) => n.clone(),
                None if ops.len() == 1 => ops.keys().next().cloned().unwrap_or_default(),
                None => "T".to_string(),
            };
            ops.remove(&name).ok_or_else(|| {
                Failure::Input(format!("operand '{name}' not found in {}", path.display()))
            })?
        }
    };
    let shift = C64::new(a.shift_re, a.shift_im);
    Ok(if shift == C64::new(0.0, 0.0) {
        base
    } else {
        base.shift_identity(shift)
    })
}

fn verify_params(
    a: &InequalityArgs,
    g: &GridArgs,
    base: VerifyParams,
) -> Result<VerifyParams, Failure> {
    let mut p = base;
    p.theta = a.theta.or(p.theta);
    if let Some(s) = &a.alpha {
        p.alpha = if s.eq_ignore_ascii_case("search") {
            Alpha::Search
        } else {
            Alpha::Fixed(
                s.parse()
                    .map_err(|_| Failure::Input(format!("invalid --alpha '{s}'")))?,
            )
        };
    }
    if let Some(n) = a.n {
        p.n = n;
    }
    if let Some(t) = a.t_grid {
        p.t_grid = t;
    }
    p.grid = g.grid(p.grid)?;
    if let Some(r) = g.refine {
        p.refine = r;
    }
    if let Some(n) = g.trunc {
        p.truncation = n;
    }
    p.validate()?;
    Ok(p)
}

fn command_line() -> String {
    let args: Vec<String> = std::env::args().skip(1).collect();
    format!("berezin-lab {}", args.join(" "))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Range { op, grid, out } => {
            let model = build_operator(&op)?;
            let g = grid.grid(DiskGrid::default())?;
            let n = grid.trunc.unwrap_or(64);
            let sampling = sample_range(&model, &g, SeriesPolicy::Fixed(n))?;
            let mut rows: Vec<(C64, PointKind)> = sampling
                .values()
                .into_iter()
                .map(|z| (z, PointKind::Berezin))
                .collect();
            if let Some(rho) = op.rho {
                let b = dphi_closed_bounds(rho)?;
                let c = C64::new(op.shift_re, op.shift_im);
                for (r, kind) in [
                    (b.r1, PointKind::CircleR1),
                    (b.r2, PointKind::CircleR2),
                    (b.r3, PointKind::CircleR3),
                ] {
                    rows.extend(circle(c, r, CIRCLE_POINTS).into_iter().map(|z| (z, kind)));
                }
            }
            write_out(out.as_deref(), &csv(&rows))?;
        }
        Command::Nrange {
            op,
            trunc,
            angles,
            out,
        } => {
            let model = build_operator(&op)?;
            let m = model.truncate(trunc)?;
            let pts = numerical_range_boundary(&m, angles)?;
            let rows: Vec<_> = pts
                .into_iter()
                .map(|z| (z, PointKind::NrangeBoundary))
                .collect();
            write_out(out.as_deref(), &csv(&rows))?;
        }
        Command::Sector {
            op,
            grid,
            angles,
            out,
        } => {
            let model = build_operator(&op)?;
            let g = grid.grid(DiskGrid::default())?;
            let c = classify(&model, &g, grid.trunc.unwrap_or(64), angles)?;
            if c.drift > DRIFT_ADVISORY {
                eprintln!(
                    "advisory: N vs 2N drift {:.3e} exceeds {DRIFT_ADVISORY:e}; consider a larger --trunc",
                    c.drift
                );
            }
            write_out(
                out.as_deref(),
                &json(&c).map_err(|e| Failure::Io(e.to_string()))?,
            )?;
        }
        Command::Bounds { rho, out } => {
            let b = dphi_closed_bounds(rho)?;
            write_out(
                out.as_deref(),
                &json(&b).map_err(|e| Failure::Io(e.to_string()))?,
            )?;
        }
        Command::Verify {
            ineq,
            operands,
            grid,
            out,
        } => {
            let id: TheoremId = ineq.theorem.parse()?;
            let params = verify_params(&ineq, &grid, VerifyParams::default())?;
            let ops = read_operands(&operands)?;
            let mut report = verify(id, &ops, &params)?;
            report.seed = Some(ineq.seed);
            write_out(
                out.as_deref(),
                &json(&report).map_err(|e| Failure::Io(e.to_string()))?,
            )?;
            if report.outcome == Outcome::Violated {
                return Ok(1);
            }
        }
        Command::Falsify {
            ineq,
            family,
            dim,
            trials,
            grid,
            out,
        } => {
            let id: TheoremId = ineq.theorem.parse()?;
            let family: Family = family.parse()?;
            let mut cfg = FalsifyConfig::new(id, family, dim, ineq.seed, trials);
            cfg.params = verify_params(&ineq, &grid, cfg.params)?;
            let report = falsify(&cfg)?;
            write_out(
                out.as_deref(),
                &json(&report).map_err(|e| Failure::Io(e.to_string()))?,
            )?;
            if report.violations > 0 {
                return Ok(1);
            }
        }
        Command::Figure {
            number,
            rho,
            grid,
            angles,
            out,
        } => {
            let shift = [0.0, 0.41, 0.66][usize::from(number - 1)];
            let bounds = dphi_closed_bounds(rho)?;
            let model = OperatorModel::dphi(rho)?.shift_identity(C64::new(shift, 0.0));
            let g = grid.grid(DiskGrid::default())?;
            let n = grid.trunc.unwrap_or(64);
            let sampling = sample_range(&model, &g, SeriesPolicy::Fixed(n))?;
            let berezin_radius = sampling
                .values()
                .iter()
                .map(|z| (z - shift).norm())
                .fold(0.0, f64::max);
            let nrange = numerical_range_boundary(&model.truncate(n)?, angles)?;
            let (berezin_index, classical_index) = if number == 1 {
                (None, None)
            } else {
                let c = classify(&model, &g, n, angles)?;
                (c.berezin.index, c.classical.index)
            };
            let data = svg::FigureData {
                number,
                shift,
                bounds,
                berezin_radius,
                nrange,
                berezin_index,
                classical_index,
                command: command_line(),
                version: VERSION,
            };
            write_out(out.as_deref(), &svg::render(&data))?;
        }
    }
    Ok(0)
}

fn configure_threads() {
    #[cfg(feature = "parallel")]
    if let Some(n) = std::env::var("BEREZIN_LAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
