use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use maxcomplex_core::lattice::DEFAULT_BUDGET;

/// Exact state complexity of finite languages and the bounds that go with it.
#[derive(Debug, Parser)]
#[command(name = "maxcomplex", version)]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for searches.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimal partial automaton size of a language file.
    Complexity(ComplexityArgs),
    /// Evaluate an upper bound.
    Bound(BoundArgs),
    /// Write a language attaining the general bound.
    Construct(ConstructArgs),
    /// Count the languages of maximal complexity.
    CountMax(CountMaxArgs),
    /// Monotone and complete-simple-game lattices.
    #[command(subcommand)]
    Lattice(LatticeCommand),
    /// Compare the residual method with the pairwise class oracle on random languages.
    Crosscheck(CrosscheckArgs),
}

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    pub input: PathBuf,
    /// Write the minimal automaton as Graphviz.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
    /// Also count classes with the pairwise oracle and fail on disagreement.
    #[arg(long)]
    pub mn_crosscheck: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    General,
    Complete,
    Monotone,
    Csg,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, value_enum, default_value_t = Kind::General)]
    pub kind: Kind,
    #[arg(long, default_value_t = 2)]
    pub b: u32,
    #[arg(long, default_value_t = 2)]
    pub c: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long)]
    pub b: u32,
    #[arg(long)]
    pub c: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CountMaxArgs {
    #[arg(long)]
    pub b: u32,
    #[arg(long)]
    pub c: u32,
    #[arg(long)]
    pub n: u32,
    /// Check against every language; needs c^(b^n) <= 2^20.
    #[arg(long)]
    pub verify_brute: bool,
    /// With --verify-brute, print every maximal language.
    #[arg(long, requires = "verify_brute")]
    pub emit: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Monotone,
    Early,
    Csg,
}

#[derive(Debug, Subcommand)]
pub enum LatticeCommand {
    /// Count a function family, with a digest of its sorted masks.
    Enumerate {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Family::Monotone)]
        family: Family,
        /// Print every mask in hex.
        #[arg(long)]
        list: bool,
        #[arg(long)]
        json: bool,
    },
    /// Check a named embedding; all of them without --name.
    VerifyEmbedding {
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Search for a relation from the cube (or E_i) into F_j^- (or C_j^-).
    Search(SearchArgs),
    /// Write a language attaining the monotone (or game) bound.
    Witness {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        csg: bool,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        json: bool,
    },
    /// Check the switching lemma over all pairs of 3-variable monotone functions.
    LemmaLes,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub i: u32,
    #[arg(long)]
    pub j: u32,
    /// Majorization order into complete simple games.
    #[arg(long)]
    pub csg: bool,
    /// With --csg, also require the composed language to be early.
    #[arg(long, requires = "csg")]
    pub early: bool,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Partial certificate to continue from.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// Where to write the certificate or checkpoint.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CrosscheckArgs {
    #[arg(long, default_value_t = 2)]
    pub b: u32,
    #[arg(long, default_value_t = 2)]
    pub c: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long)]
    pub json: bool,
}
