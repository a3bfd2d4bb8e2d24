use clap::{Parser, Subcommand};

use novarch::rational::Rat;

use crate::report::Format;

fn rat(s: &str) -> Result<Rat, String> {
    s.trim().parse::<Rat>().map_err(|_| format!("`{s}` is not an exact fraction (write p, p/q or a finite decimal)"))
}

/// Exact computations with filtered complexes over the Novikov field.
///
/// Inputs are JSON documents (`-` reads standard input). Reports go to
/// standard output; the exit code is 0 on success, 1 on a mathematical
/// failure or a failed check, 2 on a usage error and 3 on unreadable or
/// invalid input.
#[derive(Debug, Parser)]
#[command(name = "novarch", version)]
pub struct Cli {
    /// Truncation precision E, replacing the document's value.
    #[arg(long, global = true, value_parser = rat)]
    pub precision: Option<Rat>,
    /// Splitting constant ħ, replacing the document's value.
    #[arg(long, global = true, value_parser = rat)]
    pub hbar: Option<Rat>,
    /// Seed for random models.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Ignore unknown fields in input documents instead of rejecting them.
    #[arg(long, global = true)]
    pub lax: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Boundary depth, by the torsion barcode and by its definition.
    Depth {
        #[arg(default_value = "-")]
        input: String,
    },
    /// Special deformation retraction of the reduction and its perturbation.
    Hpt {
        #[arg(default_value = "-")]
        input: String,
        /// ε for the retraction of the reduction.
        #[arg(long, value_parser = rat, default_value = "1/100")]
        epsilon: Rat,
    },
    /// Spectral sequence pages and τ; several inputs, given in increasing
    /// truncation order, are also checked for Hausdorff failure.
    Ss {
        #[arg(required = true)]
        inputs: Vec<String>,
        /// Last page to compute; defaults to the last page below the precision.
        #[arg(long)]
        pages: Option<usize>,
        /// Growth that marks a tracked class as divergent.
        #[arg(long, value_parser = rat, default_value = "1")]
        threshold: Rat,
        /// Generators to track across a family; defaults to every generator
        /// of the first input that is a cycle in each input containing it.
        #[arg(long, value_delimiter = ',')]
        track: Vec<String>,
    },
    /// τ over a flux polytope and the dual cone of a star shape.
    Tau {
        #[arg(default_value = "-")]
        input: String,
    },
    /// Rigidity isomorphism for a perturbed product on an affinoid model.
    Rigidity {
        #[arg(default_value = "-")]
        input: String,
    },
    /// Emit a model complex as a complex document.
    Model {
        #[command(subcommand)]
        kind: ModelKind,
    },
}

#[derive(Debug, Subcommand)]
pub enum ModelKind {
    /// Truncated model of the circle-fibre complex at radius r.
    Cp1 {
        #[arg(long, value_parser = rat)]
        r: Rat,
        #[arg(long, default_value_t = 8)]
        truncation: usize,
    },
    /// x → T^λ y, with boundary depth λ.
    Lambda {
        #[arg(long, value_parser = rat)]
        lambda: Rat,
    },
    /// Random Floer-type complex with boundary depth at most `beta`.
    Random {
        #[arg(long)]
        rank: usize,
        #[arg(long, value_parser = rat)]
        beta: Rat,
    },
    /// Random complex whose perturbation is below the depth of its reduction.
    Deformable {
        #[arg(long)]
        rank: usize,
        #[arg(long, value_parser = rat)]
        beta: Rat,
    },
}
