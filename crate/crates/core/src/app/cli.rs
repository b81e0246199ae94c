use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "ppt-bounds", version, about = "SDP bounds on PPT-assisted entanglement distillation and cost")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Relative duality-gap tolerance of the interior-point solver.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub gap_tol: f64,
    /// Relative primal/dual residual tolerance of the solver.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub feas_tol: f64,
    /// Eigenvalues below this fraction of the largest are dropped from the support of file-based states.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub support_cutoff: f64,
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute every bound for one state and decide irreversibility.
    Bounds {
        /// State name (`rho_v`, `rho_alpha:0.45`, `ranktwo:p,theta`, `antisym3`, `maxent:d`, `tau`, `product:d`) or a state file.
        state: String,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Tabulate E_N, E_W and E_eta over the rho_alpha family as CSV.
    ScanAlpha {
        #[arg(long, default_value_t = 0.42)]
        from: f64,
        #[arg(long, default_value_t = 0.50)]
        to: f64,
        #[arg(long, default_value_t = 17)]
        steps: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every closed-form witness and the tensor-product constructions.
    Verify {
        /// Pass threshold for each claim.
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        /// Write the detailed checks as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Adds a deliberately corrupted witness (for testing the failure path).
        #[arg(long, hide = true)]
        inject_corrupt: bool,
    },
    /// Compare E_eta of a product with the sum of the factors.
    Additivity {
        state1: String,
        state2: String,
        /// Largest product dimension attempted.
        #[arg(long, default_value_t = 100)]
        max_dim: usize,
    },
    /// Write or validate state files.
    #[command(subcommand)]
    State(StateCommand),
}

#[derive(Debug, Subcommand)]
pub enum StateCommand {
    /// Write a named state as a JSON state file.
    Emit {
        state: String,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a state file and summarize it.
    Check {
        path: PathBuf,
        /// Hermiticity, positivity and trace tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
}
