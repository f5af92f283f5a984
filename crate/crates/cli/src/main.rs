use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use hyperfrac_cli::{
    cmd_attractor, cmd_code_expand, cmd_hausdorff, cmd_prop32, cmd_prop33, cmd_render, cmd_thm41, cmd_verify,
    configure_workers, parse_point, parse_scalar, to_json, AttractorArgs, Prop33Args, RunReport, Thm41Args,
};
use hyperfrac_core::theorems::CountingParams;

/// Exact hyperspace computations: attractors, Hausdorff distances and
/// porosity certificates. Prints a JSON run report; exits 0 iff every check
/// passed, 1 on a failed check, 2 on an error.
#[derive(Parser)]
#[command(name = "hyperfrac", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve (or weakly iterate) an IFS from a JSON spec.
    Attractor {
        spec: PathBuf,
        /// Stopping tolerance, e.g. `1/1000` or `3^-10`.
        #[arg(long, default_value = "1/1000000")]
        tol: String,
        /// Best-effort iteration for weak contractions.
        #[arg(long)]
        weak: bool,
        #[arg(long, default_value_t = 1000)]
        max_iter: usize,
        /// Start set file (defaults to [0,1]).
        #[arg(long)]
        start: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact Hausdorff distance between two set files.
    Hausdorff { a: PathBuf, b: PathBuf },
    /// Expand a code file to its depth-m interval union.
    CodeExpand {
        code: PathBuf,
        #[arg(short = 'm', long)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Witness searches for sampled (or given) Y near a coded set E.
    Thm41 {
        code: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// Search depth; chosen as j + 6 per trial when omitted.
        #[arg(short = 'm', long)]
        depth: Option<usize>,
        /// Use Y = expand(E, m) itself.
        #[arg(long)]
        no_perturb: bool,
        /// Run a single search on this Y instead of sampling.
        #[arg(long)]
        y: Option<PathBuf>,
        /// Directory for per-trial certificates and the summary.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the annulus construction and its condition trace.
    Prop32 {
        #[arg(default_value_t = 4)]
        annuli: usize,
        #[arg(long, default_value = "1/2")]
        ratio: String,
        #[arg(long, default_value_t = 1)]
        f_size: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Annulus index for the counting check (defaults to the last one).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Strong-porosity witness at a point of a finite set.
    Prop33 {
        set: PathBuf,
        /// Removed point, comma-separated coordinates.
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 4)]
        count: usize,
        /// First radius r_1.
        #[arg(long)]
        radius: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        attempts: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a certificate file, or every certificate in a directory.
    Verify { path: PathBuf },
    /// Draw a set, code, IFS or certificate file as SVG.
    Render {
        input: PathBuf,
        #[arg(short = 'm', long)]
        depth: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<RunReport> {
    match cli.command {
        Command::Attractor { spec, tol, weak, max_iter, start, out } => cmd_attractor(&AttractorArgs {
            spec: &spec,
            tol: &parse_scalar(&tol)?,
            weak,
            max_iter,
            start: start.as_deref(),
            out: out.as_deref(),
        }),
        Command::Hausdorff { a, b } => cmd_hausdorff(&a, &b),
        Command::CodeExpand { code, depth, out } => cmd_code_expand(&code, depth, out.as_deref()),
        Command::Thm41 { code, k, seed, trials, depth, no_perturb, y, out } => cmd_thm41(&Thm41Args {
            code: &code,
            k,
            seed,
            trials,
            depth,
            perturb: !no_perturb,
            y: y.as_deref(),
            out: out.as_deref(),
        }),
        Command::Prop32 { annuli, ratio, f_size, k, n, out } => cmd_prop32(
            annuli,
            &parse_scalar(&ratio)?,
            CountingParams { f_size, k, n: n.unwrap_or(annuli) },
            out.as_deref(),
        ),
        Command::Prop33 { set, x, count, radius, attempts, seed, out } => cmd_prop33(&Prop33Args {
            set: &set,
            x: &parse_point(&x)?,
            count,
            radius: radius.as_deref().map(parse_scalar).transpose()?,
            attempts,
            seed,
            out: out.as_deref(),
        }),
        Command::Verify { path } => cmd_verify(&path),
        Command::Render { input, depth, out } => cmd_render(&input, depth, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_workers().and_then(|()| run(cli));
    match result {
        Ok(report) => {
            match to_json(&report) {
                Ok(s) => print!("{s}"),
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(2);
                }
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                eprintln!("{}: checks failed", report.command);
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
