use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ddpmc::model::ModelKind;
use ddpmc::simulation::{MixWeight, Scenario};
use ddpmc_cli::config::{self, CompareConfig, FitConfig, PriorChoice, SimulateConfig, TauConfig};
use ddpmc_cli::grid::GridSpec;
use ddpmc_cli::{cmd_compare, cmd_fit, cmd_simulate, cmd_tau, exit, Result};

#[derive(Parser)]
#[command(name = "ddpmc", version, about = "Covariate-dependent copula estimation with DDP mixtures of Gaussian copulas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset and its true tau curve.
    Simulate(SimulateArgs),
    /// Fit a model by MCMC and write the chain.
    Fit(FitArgs),
    /// Summarize the conditional Kendall's tau of a chain over a grid.
    Tau(TauArgs),
    /// Integrated L1 error of fitted tau curves against a truth table.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    II,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Ddpmc,
    Ldvr,
}

fn parse_mix_weight(s: &str) -> std::result::Result<MixWeight, String> {
    match s {
        "linear" => Ok(MixWeight::Linear),
        "complement" => Ok(MixWeight::Complement),
        _ => s
            .strip_prefix("constant:")
            .and_then(|c| c.parse().ok())
            .map(MixWeight::Constant)
            .ok_or_else(|| format!("`{s}` is not linear, complement or constant:<c>")),
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    scenario: Option<ScenarioArg>,
    #[arg(long)]
    n: Option<usize>,
    /// Degrees of freedom of the t copulas.
    #[arg(long)]
    nu: Option<f64>,
    /// Scenario II mixing weight: linear, complement or constant:<c>.
    #[arg(long, value_parser = parse_mix_weight)]
    mix_weight: Option<MixWeight>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo pairs per grid point for the Scenario II truth.
    #[arg(long)]
    truth_pairs: Option<usize>,
    #[arg(long)]
    grid_points: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV file with a header row.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    thin: Option<usize>,
    /// Truncation level of the stick-breaking weights.
    #[arg(long)]
    truncation: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Independent chains run concurrently.
    #[arg(long)]
    chains: Option<usize>,
    /// Isotropic prior variance for both coefficient families.
    #[arg(long, conflicts_with = "gprior")]
    prior_variance: Option<f64>,
    /// Use a calibrated block g-prior.
    #[arg(long)]
    gprior: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TauArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    chain: Option<PathBuf>,
    /// Points of the default grid on [0.01, 0.99].
    #[arg(long, conflicts_with = "grid")]
    points: Option<usize>,
    /// JSON grid specification file.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Credible level of the pointwise band.
    #[arg(long)]
    level: Option<f64>,
    /// Quantile level of the independence test threshold.
    #[arg(long)]
    p: Option<f64>,
    /// Sample size used in the test statistic.
    #[arg(long)]
    n: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Truth table with columns x and tau_true.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Chain files (repeatable).
    #[arg(long = "chain")]
    chains: Vec<PathBuf>,
    /// Tau curve CSV files (repeatable).
    #[arg(long = "curve")]
    curves: Vec<PathBuf>,
    /// Output JSON file.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut cfg: SimulateConfig = config::load(a.config.as_deref())?;
    let s = &mut cfg.scenario;
    if let Some(v) = a.scenario {
        s.scenario = match v {
            ScenarioArg::I => Scenario::I,
            ScenarioArg::II => Scenario::II,
        };
    }
    s.n = a.n.unwrap_or(s.n);
    s.nu = a.nu.unwrap_or(s.nu);
    s.mix_weight = a.mix_weight.unwrap_or(s.mix_weight);
    s.seed = a.seed.unwrap_or(s.seed);
    s.truth_pairs = a.truth_pairs.unwrap_or(s.truth_pairs);
    cfg.grid_points = a.grid_points.unwrap_or(cfg.grid_points);
    cfg.out_dir = a.out.or(cfg.out_dir);
    report(cmd_simulate(&cfg)?);
    Ok(())
}

fn fit(a: FitArgs) -> Result<()> {
    let mut cfg: FitConfig = config::load(a.config.as_deref())?;
    cfg.data = a.data.or(cfg.data);
    if let Some(m) = a.model {
        cfg.model = match m {
            ModelArg::Ddpmc => ModelKind::Ddpmc,
            ModelArg::Ldvr => ModelKind::Ldvr,
        };
    }
    let c = &mut cfg.chain;
    c.iterations = a.iterations.unwrap_or(c.iterations);
    c.burn_in = a.burn_in.unwrap_or(c.burn_in);
    c.thin = a.thin.unwrap_or(c.thin);
    c.truncation = a.truncation.unwrap_or(c.truncation);
    c.seed = a.seed.unwrap_or(c.seed);
    cfg.chains = a.chains.unwrap_or(cfg.chains);
    if let Some(variance) = a.prior_variance {
        cfg.prior = PriorChoice::Isotropic { variance };
    }
    if a.gprior && !matches!(cfg.prior, PriorChoice::Gprior { .. }) {
        cfg.prior = PriorChoice::Gprior { c_v: None, c_rho: None, targets: Default::default() };
    }
    cfg.out_dir = a.out.or(cfg.out_dir);
    report(cmd_fit(&cfg)?);
    Ok(())
}

fn tau(a: TauArgs) -> Result<()> {
    let mut cfg: TauConfig = config::load(a.config.as_deref())?;
    cfg.chain = a.chain.or(cfg.chain);
    if let Some(path) = &a.grid {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ddpmc_cli::CliError::File { path: path.clone(), source })?;
        cfg.grid = serde_json::from_str(&text)
            .map_err(|e| ddpmc_cli::CliError::Usage(format!("invalid grid {}: {e}", path.display())))?;
    }
    if let Some(points) = a.points {
        let covariate = match &cfg.grid {
            GridSpec::Il1 { covariate, .. } => covariate.clone(),
            _ => "x".into(),
        };
        cfg.grid = GridSpec::Il1 { covariate, points };
    }
    cfg.level = a.level.unwrap_or(cfg.level);
    cfg.test_level = a.p.unwrap_or(cfg.test_level);
    cfg.n = a.n.or(cfg.n);
    cfg.out_dir = a.out.or(cfg.out_dir);
    report(cmd_tau(&cfg)?);
    Ok(())
}

fn compare(a: CompareArgs) -> Result<()> {
    let mut cfg: CompareConfig = config::load(a.config.as_deref())?;
    cfg.truth = a.truth.or(cfg.truth);
    if !a.chains.is_empty() {
        cfg.chains = a.chains;
    }
    if !a.curves.is_empty() {
        cfg.curves = a.curves;
    }
    cfg.out = a.out.or(cfg.out);
    report(cmd_compare(&cfg)?);
    Ok(())
}

fn report(files: Vec<PathBuf>) {
    for f in files {
        println!("{}", f.display());
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Fit(a) => fit(a),
        Command::Tau(a) => tau(a),
        Command::Compare(a) => compare(a),
    };
    match result {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
