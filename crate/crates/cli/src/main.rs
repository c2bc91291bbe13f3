//! `syzygy`: linear syzygies of quadric ideals over prime fields.

mod commands;
mod io;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use report::{error_object, render_text, Report, Stages, EXIT_PARSE};

#[derive(Parser, Debug)]
#[command(
    name = "syzygy",
    version,
    about = "Linear syzygies of quadric ideals over prime fields",
    long_about = "Computes the linear strand of the minimal free resolution of an ideal generated \
by quadrics, ranks and schemes of individual syzygies, generic syzygy schemes, and the \
Grassmannian Gr(n,2) together with its K3 and canonical curve sections of genus 6 and 8.\n\n\
Reports are printed as JSON on standard output (aligned text with --text). Errors are JSON \
objects on standard error with exit codes 2 (parse), 3 (file not found), 4 (degenerate random \
section), 5 (minor budget exceeded) and 1 (anything else)."
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize)]
pub struct Global {
    /// Seed for every random choice
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Characteristic of the prime field F_p
    #[arg(long = "p", global = true, default_value_t = 101)]
    pub p: u64,
    /// Print aligned text instead of JSON
    #[arg(long, global = true)]
    #[serde(skip)]
    pub text: bool,
    /// Include per-stage wall-clock timings (makes output nondeterministic)
    #[arg(long, global = true)]
    #[serde(skip)]
    pub timings: bool,
}

/// Selects one syzygy of an ideal.
#[derive(Args, Debug, Serialize)]
pub struct SyzygyArgs {
    /// Syzygy file written by `grass --syzygy-out` or `gensyz --syzygy-out`
    #[arg(long, conflicts_with_all = ["coords", "random"])]
    pub syzygy: Option<PathBuf>,
    /// Homological index p of the syzygy (with --coords or --random)
    #[arg(long)]
    pub index: Option<usize>,
    /// Coordinates in the computed basis of V_p, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coords: Option<Vec<i64>>,
    /// A seeded random element of V_p
    #[arg(long, conflicts_with = "coords")]
    pub random: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Linear strand dimensions dim V_p, where V_p is the kernel of
    /// Λ^p V ⊗ I_2 → Λ^(p-1) V ⊗ I_3
    Strand(commands::StrandArgs),
    /// Rank of a syzygy: the number of independent linear forms it involves,
    /// together with a basis of that space L_s
    Rank(commands::RankArgs),
    /// Syzygy scheme: the quadrics Q with s = Σ e_I ⊗ Q_I spanning the
    /// quadrics involved in a syzygy
    Scheme(commands::SchemeArgs),
    /// Restriction of V_p to a linear section, or the change of rank of one
    /// syzygy under a hyperplane section
    Restrict(commands::RestrictArgs),
    /// Hilbert function of the ideal of (r+1)-minors of the matrix of linear
    /// forms on P(V_p^*) whose points are syzygies of rank at most r; for
    /// p = 0 the quadrics of rank at most r in I_2
    Ranklocus(commands::RankLocusArgs),
    /// Generic syzygy scheme {l ∧ a = 0} in P(L ⊕ Λ^(r-p-1) L) with its
    /// canonical syzygy, witness matrix and point classification
    Gensyz(commands::GensyzArgs),
    /// Writes a syzygy of rank r as the pullback of the generic one along a
    /// linear map, checking pulled-back equations against the ideal
    Lift(commands::LiftArgs),
    /// Plücker ideal of Gr(n,2) (4x4 Pfaffians of a skew matrix) and its
    /// minimal-rank syzygies attached to vectors u
    Grass(commands::GrassArgs),
    /// Seeded K3 surface or canonical curve of genus 2k as a linear (and for
    /// k = 3 quadric) section of Gr(k+2,2)
    Mukai(commands::MukaiArgs),
    /// Hilbert function of the dual Grassmannian intersected with the space
    /// orthogonal to a Mukai section: degree 5 or 14 for curves, empty for K3s
    Dualdeg(commands::DualDegArgs),
    /// Closed-form counts for genus 2k: dim V_(k-2) and the number of scrollar
    /// lines via three degree formulas
    Counts(commands::CountsArgs),
    /// Cohomology of homogeneous bundles E(λ) on projective space by Bott's
    /// theorem, or the table for the Eagon–Northcott terms
    Bott(commands::BottArgs),
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    let g = &cli.global;
    // rejects a bad --p even for commands that never build a field
    commands::field(g)?;
    let mut stages = Stages::default();
    let (name, args, results) = match &cli.command {
        Command::Strand(a) => ("strand", to_value(a), commands::strand(g, a, &mut stages)?),
        Command::Rank(a) => ("rank", to_value(a), commands::rank(g, a, &mut stages)?),
        Command::Scheme(a) => ("scheme", to_value(a), commands::scheme(g, a, &mut stages)?),
        Command::Restrict(a) => ("restrict", to_value(a), commands::restrict(g, a, &mut stages)?),
        Command::Ranklocus(a) => ("ranklocus", to_value(a), commands::ranklocus(g, a, &mut stages)?),
        Command::Gensyz(a) => ("gensyz", to_value(a), commands::gensyz(g, a, &mut stages)?),
        Command::Lift(a) => ("lift", to_value(a), commands::lift(g, a, &mut stages)?),
        Command::Grass(a) => ("grass", to_value(a), commands::grass(g, a, &mut stages)?),
        Command::Mukai(a) => ("mukai", to_value(a), commands::mukai(g, a, &mut stages)?),
        Command::Dualdeg(a) => ("dualdeg", to_value(a), commands::dualdeg(g, a, &mut stages)?),
        Command::Counts(a) => ("counts", to_value(a), commands::counts(a, &mut stages)?),
        Command::Bott(a) => ("bott", to_value(a), commands::bott(a, &mut stages)?),
    };
    let mut inputs = to_value(g);
    if let (Value::Object(map), Value::Object(extra)) = (&mut inputs, args) {
        map.extend(extra);
    }
    Ok(Report {
        command: name.to_string(),
        inputs,
        results,
        timings: g.timings.then(|| stages.into_map()),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("arguments serialize")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let obj = serde_json::json!({
                "error": {
                    "kind": "parse",
                    "exit_code": EXIT_PARSE,
                    "message": e.to_string().trim_end(),
                    "causes": [],
                }
            });
            eprintln!("{obj}");
            return ExitCode::from(EXIT_PARSE as u8);
        }
    };
    match run(&cli) {
        Ok(report) => {
            let body = if cli.global.text {
                render_text(&to_value(&report))
            } else {
                serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
            };
            // a closed pipe downstream is not an error of ours
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
            ExitCode::SUCCESS
        }
        Err(err) => {
            let (code, obj) = error_object(&err);
            eprintln!("{obj}");
            ExitCode::from(code as u8)
        }
    }
}
