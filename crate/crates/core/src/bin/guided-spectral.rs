use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use guided_spectral::analysis::NullModel;
use guided_spectral::embedding::Alignment;
use guided_spectral::graph::MergeRule;
use guided_spectral::pipeline::{cmd_cluster, cmd_spectrum, cmd_sweep, FocusSpec, RunConfig};
use guided_spectral::{Error, Result};

#[derive(Parser)]
#[command(name = "guided-spectral", version, about = "Guided spectral embedding of graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Concentration, embedded-distance and guided spectra.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Bandwidths for the concentration and embedded-distance spectra.
        #[arg(long, value_delimiter = ',')]
        bandwidth: Vec<usize>,
        /// Taylor orders for the approximated guided spectra.
        #[arg(long, value_delimiter = ',', default_value = "1,2,5,10,20")]
        orders: Vec<usize>,
    },
    /// Trajectory of the 2-D embedding as the off-focus weight decreases.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Cluster the final frame of a trajectory and test its modularity.
    Cluster {
        #[command(flatten)]
        common: Common,
        /// trajectory.json written by `sweep`.
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long, default_value_t = 2)]
        k_min: usize,
        #[arg(long, default_value_t = 10)]
        k_max: usize,
        #[arg(long, default_value_t = 20)]
        repetitions: usize,
        #[arg(long, default_value_t = 999)]
        draws: usize,
        #[arg(long, default_value = "permute")]
        null: NullModel,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    nodes: PathBuf,
    #[arg(long, short)]
    out: PathBuf,
    /// Only keep edges of these layers.
    #[arg(long, value_delimiter = ',')]
    layers: Vec<String>,
    #[arg(long, default_value = "or")]
    merge: MergeRule,
    /// Keep edge weights instead of binarizing the merged graph.
    #[arg(long)]
    weighted: bool,
    #[arg(long)]
    drop_isolated: bool,
    /// Node classes in focus.
    #[arg(long, value_delimiter = ',')]
    focus_class: Vec<String>,
    /// Nodes in focus, by label or index.
    #[arg(long, value_delimiter = ',')]
    focus_node: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 21)]
    steps: usize,
    #[arg(long, default_value_t = 1.0)]
    start: f64,
    #[arg(long, default_value_t = 0.0)]
    end: f64,
    /// 1-based indices of the two embedding vectors.
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    eigvecs: Vec<usize>,
    /// Use the order-K Taylor criterion instead of the exact one.
    #[arg(long)]
    approx_order: Option<usize>,
    #[arg(long, default_value = "chained")]
    alignment: Alignment,
}

impl Common {
    fn config(&self) -> RunConfig {
        let mut c = RunConfig::new(&self.edges, &self.nodes, &self.out);
        let mut load = c.load.clone().with_merge(self.merge).with_binarize(!self.weighted);
        if !self.layers.is_empty() {
            load = load.with_layers(self.layers.iter().cloned());
        }
        c.load = load;
        c.drop_isolated = self.drop_isolated;
        c.focus = FocusSpec {
            classes: self.focus_class.clone(),
            nodes: self.focus_node.clone(),
        };
        c.seed = self.seed;
        c
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Spectrum {
            common,
            bandwidth,
            orders,
        } => {
            let mut c = common.config();
            c.bandwidths = bandwidth;
            c.orders = orders;
            for f in cmd_spectrum(&c)? {
                println!("{}", f.display());
            }
        }
        Command::Sweep { common, sweep } => {
            let mut c = common.config();
            let [i, j] = sweep.eigvecs[..] else {
                return Err(Error::Config("--eigvecs takes exactly two indices".into()));
            };
            c.steps = sweep.steps;
            c.start = sweep.start;
            c.end = sweep.end;
            c.eigvecs = (i, j);
            c.approx_order = sweep.approx_order;
            c.alignment = sweep.alignment;
            let out = cmd_sweep(&c)?;
            for w in &out.warnings {
                eprintln!(
                    "warning: step {}: eigengap {:.3e} between vectors {} and {}",
                    w.step, w.gap, w.between.0, w.between.1
                );
            }
            for f in out.files {
                println!("{}", f.display());
            }
        }
        Command::Cluster {
            common,
            trajectory,
            k_min,
            k_max,
            repetitions,
            draws,
            null,
        } => {
            let mut c = common.config();
            c.k_min = k_min;
            c.k_max = k_max;
            c.repetitions = repetitions;
            c.draws = draws;
            c.null_model = null;
            let out = cmd_cluster(&c, &trajectory)?;
            eprintln!(
                "k = {}, Q = {:.6}, p = {:.4}",
                out.report.k, out.report.q_observed, out.report.p_value
            );
            for f in out.files {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
