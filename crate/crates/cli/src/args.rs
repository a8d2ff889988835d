//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sheafaccord_core::Mode;

use crate::{cmd_check, cmd_reconcile, cmd_sections, cmd_verify_sheaf, CommandOutput, Format, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "sheafaccord", version, about = "Find agreement, disagreement and contradiction across theories")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify every predicate and explain contradictions.
    Check(Common),
    /// List maximal sections over a subset of theories.
    Sections {
        #[command(flatten)]
        common: Common,
        /// Comma-separated theory ids (default: all theories).
        #[arg(long, value_delimiter = ',')]
        nodes: Option<Vec<String>>,
    },
    /// Check the composition law of generic_sheaf blocks.
    VerifySheaf(Common),
    /// Suggest the sections most theories can live with.
    Reconcile(Common),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Strict,
    Permissive,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Theory files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "strict")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "text")]
    pub format: FormatArg,
    /// Only report this predicate.
    #[arg(long)]
    pub predicate: Option<String>,
    /// Upper bound on minimal models per theory and on model combinations.
    #[arg(long, env = "SHEAFACCORD_MODEL_CAP", default_value_t = 4096, value_parser = clap::value_parser!(u64).range(1..))]
    pub model_cap: u64,
    /// Cross-check verdicts against ground enumeration.
    #[arg(long)]
    pub oracle: bool,
}

impl Common {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            inputs: self.inputs.clone(),
            mode: match self.mode {
                ModeArg::Strict => Mode::Strict,
                ModeArg::Permissive => Mode::Permissive,
            },
            predicate: self.predicate.clone(),
            format: match self.format {
                FormatArg::Text => Format::Text,
                FormatArg::Json => Format::Json,
            },
            model_cap: usize::try_from(self.model_cap).unwrap_or(usize::MAX),
            oracle: self.oracle,
        }
    }
}

pub fn run(cli: &Cli) -> CommandOutput {
    match &cli.command {
        Command::Check(c) => cmd_check(&c.config()),
        Command::Sections { common, nodes } => cmd_sections(&common.config(), nodes.as_deref()),
        Command::VerifySheaf(c) => cmd_verify_sheaf(&c.config()),
        Command::Reconcile(c) => cmd_reconcile(&c.config()),
    }
}
