use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use posr_core::estimation::{min_reachability, Normalization};
use posr_core::experiments::{
    load_game, run_experiment, write_outputs, ExperimentConfig, GameSource, GeneratorSpec, Mode, RunOutput,
};
use posr_core::learner::Regularizer;
use posr_core::MarkovGame;

/// Decentralized swap-regret learning in layered Markov games.
#[derive(Parser, Debug)]
#[command(name = "posr", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a game file and print its sizes.
    Validate {
        #[arg(long)]
        game: PathBuf,
    },
    /// Print the minimum reach probability of a game.
    Reach(GameArgs),
    /// Full-information run with exact Q-functions.
    RunFull(RunArgs),
    /// Blocked run with sampled Q-estimates.
    RunBandit(RunArgs),
    /// FTRL against POSR on the scripted non-stationary MDP.
    FtrlDemo(RunArgs),
    /// Full-information run on a game with independent transitions.
    RunIndependent(RunArgs),
    /// Print the summary of a finished run directory.
    Report {
        /// Directory written by a previous run.
        dir: PathBuf,
    },
}

#[derive(Args, Debug, Clone)]
struct GameArgs {
    /// Game file (JSON); a random game is generated when absent.
    #[arg(long)]
    game: Option<PathBuf>,
    #[arg(long)]
    players: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    /// States per decision layer after the first.
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    actions: Option<usize>,
    /// Seed of the game generator.
    #[arg(long)]
    game_seed: Option<u64>,
    /// Redraw generated games until their minimum reach probability is at least this.
    #[arg(long)]
    min_beta: Option<f64>,
    /// Write the generated game to this file.
    #[arg(long)]
    save_game: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    game: GameArgs,
    /// Seed of the episode sampler.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of episodes.
    #[arg(long = "T")]
    episodes: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Block length of bandit runs.
    #[arg(long)]
    block: Option<usize>,
    #[arg(long)]
    checkpoints: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// FTRL regularizer: entropy or log-barrier (both when absent).
    #[arg(long)]
    regularizer: Option<Regularizer>,
    /// Comma-separated FTRL step sizes.
    #[arg(long, value_delimiter = ',')]
    eta_grid: Option<Vec<f64>>,
    /// Divide bandit estimates by the visit count or the block length.
    #[arg(long)]
    normalization: Option<Normalization>,
    /// Largest number of swap functions enumerated exactly.
    #[arg(long)]
    enumeration_cap: Option<u64>,
}

impl GameArgs {
    fn has_generator_flags(&self) -> bool {
        self.players.is_some()
            || self.horizon.is_some()
            || self.width.is_some()
            || self.actions.is_some()
            || self.game_seed.is_some()
            || self.min_beta.is_some()
    }

    fn apply(&self, source: &mut GameSource) -> Result<()> {
        if let Some(path) = &self.game {
            if self.has_generator_flags() {
                bail!("--game cannot be combined with generator flags");
            }
            *source = GameSource::File(path.clone());
            return Ok(());
        }
        if !self.has_generator_flags() {
            return Ok(());
        }
        let mut spec = match source {
            GameSource::Generator(g) => g.clone(),
            GameSource::File(_) => GeneratorSpec::default(),
        };
        spec.players = self.players.unwrap_or(spec.players);
        spec.horizon = self.horizon.unwrap_or(spec.horizon);
        spec.width = self.width.unwrap_or(spec.width);
        spec.actions = self.actions.unwrap_or(spec.actions);
        spec.seed = self.game_seed.unwrap_or(spec.seed);
        spec.min_beta = self.min_beta.or(spec.min_beta);
        *source = GameSource::Generator(spec);
        Ok(())
    }

    fn source(&self) -> Result<GameSource> {
        let mut source = GameSource::default();
        self.apply(&mut source)?;
        Ok(source)
    }
}

impl RunArgs {
    fn config(&self, mode: Mode) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        c.mode = mode;
        self.game.apply(&mut c.game)?;
        macro_rules! set {
            ($field:ident) => {
                if let Some(v) = self.$field.clone() {
                    c.$field = v;
                }
            };
            (opt $field:ident) => {
                if let Some(v) = self.$field.clone() {
                    c.$field = Some(v);
                }
            };
        }
        set!(seed);
        set!(episodes);
        set!(checkpoints);
        set!(normalization);
        set!(enumeration_cap);
        set!(opt eta);
        set!(opt gamma);
        set!(opt epsilon);
        set!(opt delta);
        set!(opt block);
        set!(opt out);
        set!(opt regularizer);
        set!(opt eta_grid);
        Ok(c)
    }
}

fn save_generated(args: &GameArgs, game: &MarkovGame) -> Result<()> {
    if let Some(path) = &args.save_game {
        game.save(path)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn run(args: &RunArgs, mode: Mode) -> Result<()> {
    let config = args.config(mode)?;
    if args.game.save_game.is_some() {
        save_generated(&args.game, &load_game(&config.game)?.0)?;
    }
    let output = run_experiment(&config).with_context(|| format!("{mode} run failed"))?;
    let mut stdout = std::io::stdout().lock();
    output.report.write_summary(&mut stdout, &output.header)?;
    print_extras(&output);
    if let Some(dir) = &config.out {
        for path in write_outputs(dir, &output)? {
            eprintln!("wrote {}", path.display());
        }
        let cfg_path = dir.join("config.json");
        std::fs::write(&cfg_path, config.to_json() + "\n")
            .with_context(|| format!("writing {}", cfg_path.display()))?;
    }
    Ok(())
}

fn print_extras(output: &RunOutput) {
    if let Some(b) = &output.bandit {
        println!();
        println!(
            "estimation: {} of {} cells missed epsilon (max error {}), beta {}",
            b.inaccurate_cells, b.cells, b.max_error, b.beta
        );
    }
    if let Some(k) = output.kernels_invariant {
        println!();
        println!("induced kernels invariant: {k}");
    }
    if let Some(f) = &output.ftrl {
        println!();
        println!("{:<16} {:>8} {:>10} {:>9} {:>12} {:>10}", "learner", "eta", "gamma", "episodes", "regret", "regret/T");
        for r in &f.rows {
            println!(
                "{:<16} {:>8} {:>10.3e} {:>9} {:>12.3} {:>10.4}",
                r.learner, r.eta, r.gamma, r.episodes, r.regret, r.regret_per_episode
            );
        }
    }
}

fn report(dir: &Path) -> Result<()> {
    let path = dir.join("summary.txt");
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    print!("{text}");
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { game } => {
            let g = MarkovGame::load(&game)?;
            println!(
                "ok: {} players, horizon {}, {} decision states, actions {:?}",
                g.num_players(),
                g.horizon(),
                g.layout().num_decision_states(),
                g.action_counts()
            );
        }
        Command::Reach(args) => {
            let (game, _) = load_game(&args.source()?)?;
            save_generated(&args, &game)?;
            let r = min_reachability(&game);
            println!("beta = {} (attained at state {})", r.beta, r.argmin);
        }
        Command::RunFull(a) => run(&a, Mode::FullInfo)?,
        Command::RunBandit(a) => run(&a, Mode::BanditBlocked)?,
        Command::FtrlDemo(a) => run(&a, Mode::FtrlDemo)?,
        Command::RunIndependent(a) => run(&a, Mode::IndependentTransition)?,
        Command::Report { dir } => report(&dir)?,
    }
    Ok(())
}
