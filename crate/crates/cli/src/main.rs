mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Metamorphic consistency testing and repair for translation services.
#[derive(Parser)]
#[command(name = "transcheck", version)]
struct Cli {
    /// Log verbosity (error, warn, info, debug, trace).
    #[arg(long, global = true, default_value = "warn")]
    log: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Context-similarity corpus construction.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Inverse document frequency tables.
    Idf {
        #[command(subcommand)]
        action: IdfAction,
    },
    /// Word alignment models.
    Align {
        #[command(subcommand)]
        action: AlignAction,
    },
    /// Generate test mutants.
    Mutate(MutateArgs),
    /// Translate sentences through a translator profile.
    Translate(TranslateArgs),
    /// Translate mutants and judge consistency.
    Test(StageArgs),
    /// Repair translations flagged by the test stage.
    Repair(StageArgs),
    /// Run every stage, or every stage from `--from` on.
    Run(RunArgs),
    /// Score histogram of a reports file.
    Report(ReportArgs),
    /// Learn per-metric thresholds from labelled translation pairs.
    Calibrate(CalibrateArgs),
}

#[derive(Subcommand)]
enum CorpusAction {
    Build {
        #[arg(long)]
        model1: PathBuf,
        #[arg(long)]
        model2: PathBuf,
        #[arg(long, default_value_t = 0.9)]
        sim_threshold: f64,
        /// Lowercase vocabulary on load.
        #[arg(long)]
        lowercase: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum IdfAction {
    Build {
        /// One sentence per line.
        #[arg(long)]
        corpus: PathBuf,
        /// Language tag deciding tokenization.
        #[arg(long, default_value = "en")]
        lang: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum AlignAction {
    Train {
        /// `source<TAB>target` sentence pairs.
        #[arg(long)]
        parallel: PathBuf,
        #[arg(long, default_value_t = 10)]
        iters: usize,
        #[arg(long, default_value = "en")]
        source: String,
        #[arg(long, default_value = "en")]
        target: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Overrides applied on top of a run configuration file.
#[derive(Args, Clone, Default)]
pub struct Overrides {
    /// Comma-separated metrics or `all`.
    #[arg(long)]
    metric: Option<String>,
    #[arg(long)]
    thresholds: Option<PathBuf>,
    #[arg(long)]
    max_mutants: Option<usize>,
    #[arg(long)]
    repair_mutants: Option<usize>,
    /// `cross-reference` or `probability`.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl Overrides {
    fn out_dir(out_dir: Option<PathBuf>) -> Self {
        Overrides {
            out_dir,
            ..Overrides::default()
        }
    }
}

#[derive(Args)]
struct StageArgs {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// First stage to run: corpus, mutate, translate, test, repair or report.
    #[arg(long, default_value = "corpus")]
    from: String,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct MutateArgs {
    /// Run the stage inside a configured pipeline instead of standalone.
    #[arg(long, conflicts_with_all = ["corpus", "input", "out"])]
    config: Option<PathBuf>,
    /// Output directory override for `--config`.
    #[arg(long, requires = "config")]
    out_dir: Option<PathBuf>,
    #[arg(long, requires_all = ["input", "out"])]
    corpus: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    max_mutants: usize,
    /// `sentence` or `word`.
    #[arg(long, default_value = "sentence")]
    filter: String,
    /// Extra `word TAG` lexicon entries.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long, default_value = "en")]
    lang: String,
}

#[derive(Args)]
struct TranslateArgs {
    #[arg(long, conflicts_with_all = ["profile", "input", "cache", "out"])]
    config: Option<PathBuf>,
    /// Output directory override for `--config`.
    #[arg(long, requires = "config")]
    out_dir: Option<PathBuf>,
    #[arg(long, requires = "input")]
    profile: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Persistent response cache; in-memory when omitted.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Write records here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, conflicts_with = "reports")]
    config: Option<PathBuf>,
    #[arg(long)]
    reports: Option<PathBuf>,
    /// Also write the CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    /// `consistent|inconsistent<TAB>translation<TAB>translation` lines.
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, default_value = "all")]
    metric: String,
    #[arg(long, default_value_t = 0.001)]
    step: f64,
    #[arg(long, default_value = "en")]
    lang: String,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    env_logger::Builder::new().parse_filters(&cli.log).init();
    let result = match cli.command {
        Command::Corpus {
            action:
                CorpusAction::Build {
                    model1,
                    model2,
                    sim_threshold,
                    lowercase,
                    out,
                },
        } => commands::corpus_build(&model1, &model2, sim_threshold, lowercase, &out),
        Command::Idf {
            action: IdfAction::Build { corpus, lang, out },
        } => commands::idf_build(&corpus, &lang, &out),
        Command::Align {
            action:
                AlignAction::Train {
                    parallel,
                    iters,
                    source,
                    target,
                    out,
                },
        } => commands::align_train(&parallel, iters, &source, &target, &out),
        Command::Mutate(a) => match a.config {
            Some(config) => commands::stages(&config, &Overrides::out_dir(a.out_dir), &["mutate"]),
            None => commands::mutate_standalone(&commands::MutateOptions {
                corpus: a.corpus,
                input: a.input,
                out: a.out,
                max_mutants: a.max_mutants,
                filter: a.filter,
                lexicon: a.lexicon,
                lang: a.lang,
            }),
        },
        Command::Translate(a) => match a.config {
            Some(config) => commands::stages(&config, &Overrides::out_dir(a.out_dir), &["translate"]),
            None => commands::translate_standalone(a.profile, a.input, a.cache, a.out),
        },
        Command::Test(a) => commands::stages(&a.config, &a.overrides, &["translate", "test"]),
        Command::Repair(a) => commands::stages(&a.config, &a.overrides, &["repair"]),
        Command::Run(a) => commands::run(&a.config, &a.from, &a.overrides),
        Command::Report(a) => commands::report(a.config, a.reports, a.out),
        Command::Calibrate(a) => commands::calibrate(&a.labels, &a.metric, a.step, &a.lang, &a.out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", commands::describe(&e));
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
