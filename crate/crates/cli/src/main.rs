mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use psde_core::{Rational, ScalarExpr};

use report::Format;

#[derive(Parser, Debug)]
#[command(
    name = "psde",
    version,
    about = "Exact and numeric verification of the pseudo-diffusion equation Q_t - Q_xx/4 + Q_pp/(4t^2) = 0"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Seed for randomized checks; recorded in every report.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Working precision in bits for sampled values (f64 when absent).
    #[arg(long, global = true)]
    pub precision: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Commutator table of the symmetry algebra and its structure.
    Table(TableArgs),
    /// Run one family of exact identity checks.
    Verify {
        #[command(subcommand)]
        kind: VerifyKind,
    },
    /// Build a closed-form solution, its residual and optional samples.
    Solution {
        #[command(subcommand)]
        kind: SolutionKind,
    },
    /// Apply a finite group transformation to a solution.
    ApplyGroup(ApplyArgs),
    /// Classify the equation u_t = u_xx - b(t) u_pp by its symmetry algebra.
    ClassifyB {
        /// Coefficient b(t), e.g. `(2*t+3)^-2` or `t^2 + 1`.
        #[arg(long)]
        b: String,
    },
    /// Integrate the flow of a group generator with RK4.
    Flow(FlowArgs),
    /// Delta-sequence limit of a one-sided kernel.
    DeltaTest(DeltaArgs),
    /// Time independence of the two marginal integrals.
    Invariance(InvarianceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Basis {
    #[value(name = "A")]
    A,
    #[value(name = "X")]
    X,
    #[value(name = "so31")]
    So31,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(long, value_enum, default_value_t = Basis::A)]
    pub basis: Basis,
    /// Contraction parameter at which the so(3,1) table is also evaluated.
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub gamma: Option<Rational>,
}

#[derive(Subcommand, Debug)]
pub enum VerifyKind {
    /// [L, A_i] = xi L for the nine generators.
    Symmetry,
    /// Determining equations for X_1..X_9 and random members of the general family.
    Determining {
        #[arg(long, default_value_t = 5)]
        families: usize,
    },
    /// Witt relations of t^n L and the brackets with K+, K0, K-.
    Virasoro {
        #[arg(long, default_value_t = 4)]
        range: i64,
    },
    /// Contraction of so(3,1) onto the x-p subalgebra.
    Contraction,
    /// The exchange x <-> p, t -> 1/t on operators and solutions.
    Duality,
    /// Lift of solutions of u_t = u_xx - u_yy.
    Lift,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Side {
    X,
    P,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Grid {
    /// 9 points per axis on [-2, 2].
    Default,
    /// 41 points per axis on [-2, 2].
    Fine,
}

#[derive(Args, Debug, Clone)]
pub struct SampleArgs {
    /// Sample the solution on an (x, p) grid at three times.
    #[arg(long, value_enum)]
    pub grid: Option<Grid>,
    /// Sampling times (default: three times inside the window of the solution).
    #[arg(long, value_parser = parse_rational, value_delimiter = ',')]
    pub t: Vec<Rational>,
    /// Write the expression in parseable form to this file.
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum SolutionKind {
    /// Fundamental solutions in x, in p, or both.
    Kernel {
        #[arg(long)]
        two_sided: bool,
        #[arg(long, value_enum, default_value_t = Side::X, conflicts_with = "two_sided")]
        side: Side,
        #[arg(long, value_parser = parse_rational, default_value = "0", allow_hyphen_values = true)]
        x0: Rational,
        #[arg(long, value_parser = parse_rational, default_value = "0", allow_hyphen_values = true)]
        t0: Rational,
        #[arg(long, value_parser = parse_rational, default_value = "0", allow_hyphen_values = true)]
        p0: Rational,
        #[arg(long, value_parser = parse_rational, default_value = "1", allow_hyphen_values = true)]
        t1: Rational,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Thermal distribution with mean occupation nbar.
    Thermal {
        #[arg(long, value_parser = parse_rational, default_value = "0", allow_hyphen_values = true)]
        nbar: Rational,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Heat polynomial v_n(2x, t), or v_n(x, t) with --unscaled.
    Heatpoly {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        unscaled: bool,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Hermite polynomial H_n(x).
    Hermite {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Generalized Hermite polynomial with generating function exp(l*alpha*x - beta*l^2).
    Ghp {
        #[arg(long)]
        n: u32,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        alpha: Rational,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        beta: Rational,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// G_3(gamma) applied to v_n(2x, t).
    Transformed {
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        gamma: Rational,
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        sample: SampleArgs,
    },
}

#[derive(Args, Debug)]
pub struct ApplyArgs {
    /// Generator index 1..9.
    #[arg(long)]
    pub i: usize,
    /// Additive parameter (all generators except 2 and 4).
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, conflicts_with_all = ["scale", "c"])]
    pub lambda: Option<Rational>,
    /// Scale factor e^lambda > 0 for G_2.
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, conflicts_with = "c")]
    pub scale: Option<Rational>,
    /// cosh(lambda) for G_4; requires --s.
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, requires = "s")]
    pub c: Option<Rational>,
    /// sinh(lambda) for G_4; requires --c.
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, requires = "c")]
    pub s: Option<Rational>,
    /// File holding the solution expression.
    #[arg(long, conflicts_with = "expr", required_unless_present = "expr")]
    pub solution: Option<PathBuf>,
    /// Solution expression.
    #[arg(long, allow_hyphen_values = true)]
    pub expr: Option<String>,
    /// Time fixing the branch of square roots in the image.
    #[arg(long, value_parser = parse_rational)]
    pub reference_t: Option<Rational>,
    /// Write the image in parseable form to this file.
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FlowArgs {
    #[arg(long)]
    pub i: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    /// Record every k-th step.
    #[arg(long, default_value_t = 100)]
    pub every: usize,
    /// Tolerance against the closed-form map.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct DeltaArgs {
    #[arg(long, value_enum, default_value_t = Side::X)]
    pub side: Side,
    /// Test functions: gaussian, lorentzian, cosine, one.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Phi::Gaussian, Phi::Lorentzian, Phi::Cosine])]
    pub phi: Vec<Phi>,
    #[arg(long, value_parser = parse_rational, default_value = "0", allow_hyphen_values = true)]
    pub center: Rational,
    #[arg(long, value_delimiter = ',', default_values_t = [1e-1, 1e-2, 1e-3])]
    pub eps: Vec<f64>,
    /// Allowed factor between the observed and the ideal error reduction.
    #[arg(long, default_value_t = 2.0)]
    pub slack: f64,
    /// Errors below this are treated as converged.
    #[arg(long, default_value_t = 1e-13)]
    pub floor: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Phi {
    Gaussian,
    Lorentzian,
    Cosine,
    One,
}

#[derive(Args, Debug)]
pub struct InvarianceArgs {
    #[arg(long, value_parser = parse_rational, default_value = "1")]
    pub gamma: Rational,
    #[arg(long, value_parser = parse_rational, value_delimiter = ',', default_values = ["1/4", "1", "4"])]
    pub t: Vec<Rational>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

/// A rational number written as an exact expression, e.g. `-3/4` or `2^-3`.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let e: ScalarExpr = s.parse().map_err(|e| format!("{e}"))?;
    e.constant_value()
        .ok_or_else(|| format!("`{s}` is not a rational constant"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            if let Err(e) = report.write(cli.format, &mut out) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            let _ = out.flush();
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
