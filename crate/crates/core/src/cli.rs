//! The `plnn` command line: JSON in, JSON or SMT-LIB out.
//!
//! Exit codes: 0 success or equivalent, 1 not equivalent, 2 input error,
//! 3 piece cap exceeded.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::arith::Rat;
use crate::envelope::{corners_1d, minimize};
use crate::equivalence::{equivalent_with, gen_permuted, gen_scaled};
use crate::error::{Error, Result};
use crate::formula::{
    coverage_formula, emit_smtlib, equivalence_formula, redundancy_formula, stratum_formula, SymbolicPieces,
};
use crate::network::{
    decompose, piece_counts, Architecture, DecomposeOptions, Network, PieceCounts, DEFAULT_PIECE_CAP,
};
use crate::pl::{PLFunc, PLVec};
use crate::sample;

#[derive(Parser, Debug)]
#[command(
    name = "plnn",
    version,
    about = "Exact tropical tools for piecewise-linear networks"
)]
pub struct Cli {
    /// Refuse work whose piece count would exceed this bound.
    #[arg(long, global = true, env = "PLNN_PIECE_CAP", default_value_t = DEFAULT_PIECE_CAP,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub piece_cap: u64,

    /// Keep only relevant pieces while decomposing (default).
    #[arg(long, global = true, overrides_with = "no_prune")]
    pub prune: bool,

    /// Keep every piece produced by the recursion.
    #[arg(long, global = true, overrides_with = "prune")]
    pub no_prune: bool,

    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decompose a network into positive and negative envelopes.
    Expand { network: PathBuf },
    /// Canonical minimal representation of an envelope.
    Minimize { plfunc: PathBuf },
    /// Decide whether two networks compute the same function.
    Equiv { first: PathBuf, second: PathBuf },
    /// Corner abscissas of a one-dimensional envelope.
    Corners { plfunc: PathBuf },
    /// Emit a membership condition as an SMT-LIB script.
    #[command(subcommand)]
    Emit(EmitCommand),
    /// Produce an equivalent network by relabelling or rescaling hidden units.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Subcommand, Debug)]
pub enum EmitCommand {
    /// The listed pieces jointly cover the input space.
    Coverage { pieces: PathBuf },
    /// A given piece is redundant.
    Redundancy {
        pieces: PathBuf,
        /// 0-based piece index.
        #[arg(long)]
        index: usize,
    },
    /// A given index set is exactly the set of relevant pieces.
    Stratum {
        pieces: PathBuf,
        /// Comma-separated 0-based piece indices; empty for none.
        #[arg(long, default_value = "")]
        relevant: String,
    },
    /// Parameters on one architecture equivalent to a network on another.
    Equivalence {
        /// Widths with the input dimension first, e.g. `1,2,1`.
        #[arg(long)]
        arch1: Architecture,
        /// Defaults to the architecture of `--n0`, or to `--arch1`.
        #[arg(long)]
        arch2: Option<Architecture>,
        /// Concrete reference network.
        #[arg(long)]
        n0: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct LayerArgs {
    pub network: PathBuf,
    /// 1-based hidden layer; the next layer absorbs the change.
    #[arg(long)]
    pub layer: usize,
    /// Draw the transform from this seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum GenCommand {
    /// New unit i is old unit perm[i].
    Permute {
        #[command(flatten)]
        target: LayerArgs,
        /// Comma-separated 1-based permutation.
        #[arg(long, conflicts_with = "seed", required_unless_present = "seed")]
        perm: Option<String>,
    },
    /// Multiply unit i by scales[i] > 0.
    Scale {
        #[command(flatten)]
        target: LayerArgs,
        /// Comma-separated positive rationals.
        #[arg(long, conflicts_with = "seed", required_unless_present = "seed")]
        scales: Option<String>,
    },
}

/// Output of `expand`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ExpandOutput {
    pub pos: PLVec,
    pub neg: PLVec,
    pub piece_counts: Vec<PieceCounts>,
}

impl Cli {
    pub fn decompose_options(&self) -> DecomposeOptions {
        DecomposeOptions {
            prune: !self.no_prune,
            piece_cap: self.piece_cap,
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn parse_list<T: FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Invalid(format!("bad {what} entry `{s}`")))
        })
        .collect()
}

fn hidden_layer(net: &Network, layer: usize) -> Result<usize> {
    if layer == 0 {
        return Err(Error::Invalid("layers are numbered from 1".into()));
    }
    net.validate()?;
    if layer >= net.depth() {
        return Err(Error::LastLayer { layer });
    }
    Ok(layer - 1)
}

/// Runs one command and returns the text to print with the exit code.
pub fn execute(cli: &Cli) -> Result<(String, i32)> {
    let opts = cli.decompose_options();
    Ok(match &cli.command {
        Command::Expand { network } => {
            let net: Network = read_json(network)?;
            let pair = decompose(&net, &opts)?;
            let piece_counts = piece_counts(&pair);
            (
                to_json(&ExpandOutput {
                    pos: pair.pos,
                    neg: pair.neg,
                    piece_counts,
                })?,
                0,
            )
        }
        Command::Minimize { plfunc } => {
            let f: PLFunc = read_json(plfunc)?;
            (to_json(&minimize(&f))?, 0)
        }
        Command::Equiv { first, second } => {
            let n1: Network = read_json(first)?;
            let n2: Network = read_json(second)?;
            let verdict = equivalent_with(&n1, &n2, &opts)?;
            let code = if verdict.equivalent { 0 } else { 1 };
            (to_json(&verdict)?, code)
        }
        Command::Corners { plfunc } => {
            let f: PLFunc = read_json(plfunc)?;
            (to_json(&corners_1d(&f)?)?, 0)
        }
        Command::Emit(kind) => (emit_smtlib(&emit_formula(kind, cli.piece_cap)?), 0),
        Command::Gen(kind) => (to_json(&generate(kind)?)?, 0),
    })
}

fn emit_formula(kind: &EmitCommand, cap: u64) -> Result<crate::formula::Formula> {
    match kind {
        EmitCommand::Coverage { pieces } => coverage_formula(&read_json::<SymbolicPieces>(pieces)?),
        EmitCommand::Redundancy { pieces, index } => {
            redundancy_formula(&read_json::<SymbolicPieces>(pieces)?, *index)
        }
        EmitCommand::Stratum { pieces, relevant } => stratum_formula(
            &read_json::<SymbolicPieces>(pieces)?,
            &parse_list(relevant, "index")?,
        ),
        EmitCommand::Equivalence { arch1, arch2, n0 } => {
            let n0: Option<Network> = n0.as_deref().map(read_json).transpose()?;
            if let Some(net) = &n0 {
                net.validate()?;
            }
            let arch2 = match (arch2, &n0) {
                (Some(a), _) => a.clone(),
                (None, Some(net)) => net.architecture(),
                (None, None) => arch1.clone(),
            };
            equivalence_formula(arch1, &arch2, n0.as_ref(), cap)
        }
    }
}

fn generate(kind: &GenCommand) -> Result<Network> {
    match kind {
        GenCommand::Permute { target, perm } => {
            let net: Network = read_json(&target.network)?;
            let layer = hidden_layer(&net, target.layer)?;
            let width = net.layers[layer].outputs();
            let perm: Vec<usize> = match (perm, target.seed) {
                (Some(text), _) => parse_list::<usize>(text, "permutation")?
                    .into_iter()
                    .map(|p| {
                        p.checked_sub(1)
                            .ok_or_else(|| Error::InvalidPermutation("entries are numbered from 1".into()))
                    })
                    .collect::<Result<_>>()?,
                (None, Some(seed)) => sample::permutation(&mut ChaCha8Rng::seed_from_u64(seed), width),
                (None, None) => unreachable!("clap requires --perm or --seed"),
            };
            gen_permuted(&net, layer, &perm)
        }
        GenCommand::Scale { target, scales } => {
            let net: Network = read_json(&target.network)?;
            let layer = hidden_layer(&net, target.layer)?;
            let width = net.layers[layer].outputs();
            let scales: Vec<Rat> = match (scales, target.seed) {
                (Some(text), _) => text.split(',').map(|s| s.trim().parse()).collect::<Result<_>>()?,
                (None, Some(seed)) => sample::scales(&mut ChaCha8Rng::seed_from_u64(seed), width),
                (None, None) => unreachable!("clap requires --scales or --seed"),
            };
            gen_scaled(&net, layer, &scales)
        }
    }
}

/// Parses `args`, runs the command, writes its output and returns the exit
/// code. Errors go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = execute(&cli).and_then(|(text, code)| {
        match &cli.output {
            Some(path) => fs::write(path, text)?,
            None => stdout.write_all(text.as_bytes())?,
        }
        Ok(code)
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
