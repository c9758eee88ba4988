//! Command-line driver: parses an input document describing a quiver, its
//! representations and a homological system, dispatches the checks and
//! constructions, and emits human-readable or machine-readable reports.
//! Exit status is 0 exactly when every verdict in the report passes.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use homsys::field::FieldCfg;
use homsys_cli::{commands, doc, report};

#[derive(Parser)]
#[command(name = "homsys", version, about = "homological systems over exact fields")]
struct Cli {
    /// Input document (JSON).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Session seed; overrides the document's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Scalar field: `rational` or `p:<prime>`; overrides the document.
    #[arg(long, global = true)]
    field: Option<String>,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Budget for randomized probe suites.
    #[arg(long, global = true, default_value_t = 32)]
    probes: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check the system axioms S1-S5.
    CheckTheta,
    /// Check the relative-projective axioms PS1-PS5.
    CheckProjective,
    /// Check the relative-injective axioms IS1-IS5.
    CheckInjective,
    /// Construct the relative-projective family.
    BuildProjective,
    /// Construct the relative-injective family.
    BuildInjective,
    /// Solve for filtration multiplicities of an object.
    Multiplicity {
        #[arg(long)]
        object: String,
    },
    /// Build the relative-projective precover triangle of an object.
    Precover {
        #[arg(long)]
        object: String,
    },
    /// Build the two approximation triangles of an object.
    Approximate {
        #[arg(long)]
        object: String,
    },
    /// Run the cotorsion-pair desk check over the probe set.
    Cotorsion,
    /// Present the endomorphism algebra of the constructed family.
    EndoAlgebra,
    /// Verify that the projective modules are filtered by standard modules.
    StandardlyStratified,
    /// Decide whether the standard modules have division endomorphism rings.
    QuasiHereditary,
    /// Check the exceptional-sequence axioms ES1-ES4 on the system.
    Exceptional,
    /// Run a bundled pipeline: a3, simples or strongly-exceptional.
    Demo { which: String },
}

fn load_session(cli: &Cli) -> Result<doc::Session> {
    let path = cli
        .input
        .as_ref()
        .ok_or_else(|| anyhow!("this command needs --input <document.json>"))?;
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let document: doc::Document =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let field = cli.field.as_deref().map(doc::parse_field_flag).transpose()?;
    doc::parse_session(&document, field, cli.seed)
}

fn run(cli: &Cli) -> Result<report::Report> {
    match &cli.command {
        Command::Demo { which } => {
            let field = cli
                .field
                .as_deref()
                .map(doc::parse_field_flag)
                .transpose()?
                .unwrap_or(FieldCfg::Rational);
            commands::demo(which, field, cli.seed.unwrap_or(42))
        }
        other => {
            let session = load_session(cli)?;
            match other {
                Command::CheckTheta => commands::check_theta(&session),
                Command::CheckProjective => commands::check_projective(&session),
                Command::CheckInjective => commands::check_injective(&session),
                Command::BuildProjective => commands::build_projective(&session),
                Command::BuildInjective => commands::build_injective(&session),
                Command::Multiplicity { object } => commands::multiplicity(&session, Some(object)),
                Command::Precover { object } => commands::precover(&session, Some(object)),
                Command::Approximate { object } => {
                    commands::approximate_cmd(&session, Some(object))
                }
                Command::Cotorsion => commands::cotorsion(&session, cli.probes),
                Command::EndoAlgebra => commands::endo_algebra_cmd(&session),
                Command::StandardlyStratified => commands::standardly_stratified(&session),
                Command::QuasiHereditary => commands::quasi_hereditary(&session),
                Command::Exceptional => commands::exceptional(&session),
                Command::Demo { .. } => unreachable!(),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(rep) => {
            match cli.format {
                Format::Human => print!("{}", rep.to_human()),
                Format::Json => println!("{}", rep.to_json()),
            }
            if rep.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
