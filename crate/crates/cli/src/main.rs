use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use gridrate::eval::table::{fmt_sig, row};
use gridrate::eval::{self, CurveSpec, SynthSpec};
use gridrate::matchlog::{read_log, MatchLog};
use gridrate::{EngineKind, Error, RatingStore, SystemConfig};

#[derive(Parser, Debug)]
#[command(name = "gridrate", version, about = "Bayesian grid ratings for paired matches")]
struct Cli {
    /// key=value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Rating store snapshot
    #[arg(long, global = true, default_value = "ratings.jsonl")]
    store: PathBuf,
    /// Override the configured engine
    #[arg(long, global = true)]
    engine: Option<EngineKind>,
    /// Abort on the first malformed log line (default)
    #[arg(long, global = true, conflicts_with = "lenient")]
    strict: bool,
    /// Skip malformed log lines and report how many were skipped
    #[arg(long, global = true)]
    lenient: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Create an empty store
    Init {
        #[arg(long)]
        force: bool,
    },
    /// Apply a match log to the store
    Process { log: PathBuf },
    /// Probability that A beats B
    Predict { a: String, b: String },
    /// Ranked players
    Leaderboard {
        #[arg(long)]
        top: Option<usize>,
        #[arg(long, default_value_t = 0)]
        min_matches: u64,
    },
    /// Walk-forward log loss over a match log, starting from the store
    Logloss(LoglossArgs),
    /// Posterior mean shift after one win, as a function of the prior mean
    Curve(CurveArgs),
    /// Generate a synthetic match log
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
struct LoglossArgs {
    log: PathBuf,
    /// Events that update without being scored
    #[arg(long, conflicts_with = "burn_in_fraction")]
    burn_in: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    burn_in_fraction: f64,
    /// Deviation cap in display units; defaults to the configured value
    #[arg(long)]
    var_cap: Option<f64>,
    /// Write the smoothed loss density table here
    #[arg(long)]
    density: Option<PathBuf>,
    #[arg(long, default_value_t = 5.0)]
    bandwidth: f64,
    #[arg(long, default_value_t = 1.0)]
    density_step: f64,
    /// Write per-match records here
    #[arg(long)]
    records: Option<PathBuf>,
    /// Save the updated store afterwards
    #[arg(long)]
    save: bool,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[arg(long, default_value_t = 0.8)]
    beta: f64,
    #[arg(long, default_value_t = 50.0)]
    sigma: f64,
    #[arg(long, default_value_t = 2000.0)]
    opponent: f64,
    #[arg(long, default_value_t = 0.0)]
    from: f64,
    #[arg(long, default_value_t = 4000.0)]
    to: f64,
    #[arg(long, default_value_t = 10.0)]
    step: f64,
    #[arg(long, default_value_t = 4001)]
    nodes: usize,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, default_value_t = 100)]
    players: usize,
    #[arg(long, default_value_t = 10_000)]
    matches: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Luck mixing weight; defaults to the configured value
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 0.7)]
    strength_sd: f64,
    /// Match log output; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Ground-truth strengths; defaults to `<out>.truth.tsv`
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Lib(e) => match e {
                Error::InvalidParameter(_) | Error::UnsupportedLuck(_) | Error::UnsupportedKernel(_) => 1,
                Error::Integrity(_)
                | Error::IntegrityAt { .. }
                | Error::IncompatibleGrids(..)
                | Error::LengthMismatch { .. } => 3,
                _ => 2,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Lib(e) => write!(f, "{e}"),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn load_config(cli: &Cli) -> Result<SystemConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => SystemConfig::load(path).map_err(|e| match e {
            Error::Io(io) => Failure::Usage(format!("cannot read config {}: {io}", path.display())),
            other => Failure::Usage(format!("config {}: {other}", path.display())),
        })?,
        None => SystemConfig::default(),
    };
    if let Some(engine) = cli.engine {
        cfg.engine = engine;
    }
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

fn open_store(cli: &Cli, cfg: SystemConfig) -> Result<RatingStore, Failure> {
    Ok(RatingStore::open(cfg, &cli.store)?)
}

fn read_events(cli: &Cli, path: &Path) -> Result<MatchLog, Failure> {
    let file = File::open(path).map_err(|e| Failure::Usage(format!("cannot open {}: {e}", path.display())))?;
    let log = read_log(BufReader::new(file), !cli.lenient)?;
    for (line, msg) in &log.skipped {
        eprintln!("warning: skipped line {line}: {msg}");
    }
    Ok(log)
}

fn duplicate_ids(log: &MatchLog) -> usize {
    let mut seen = HashSet::new();
    log.events.iter().filter(|e| !seen.insert(e.match_id.as_str())).count()
}

fn run(cli: Cli) -> CmdResult {
    let out = io::stdout();
    let mut out = BufWriter::new(out.lock());
    match &cli.command {
        Command::Init { force } => {
            if cli.store.exists() && !force {
                return Err(Failure::Usage(format!("{} exists; pass --force to overwrite", cli.store.display())));
            }
            let store = RatingStore::new(load_config(&cli)?)?;
            store.snapshot_save(&cli.store)?;
            writeln!(out, "initialized {}", cli.store.display())?;
        }
        Command::Process { log } => {
            let mut store = open_store(&cli, load_config(&cli)?)?;
            let log = read_events(&cli, log)?;
            let dups = duplicate_ids(&log);
            if dups > 0 {
                eprintln!("warning: {dups} duplicate match ids");
            }
            let start = Instant::now();
            let processed = store.process_all(&log.events)?;
            let secs = start.elapsed().as_secs_f64();
            if processed > 0 {
                store.snapshot_save(&cli.store)?;
            }
            let rate = if secs > 0.0 { processed as f64 / secs } else { 0.0 };
            writeln!(
                out,
                "processed {processed} matches, skipped {}, duplicate ids {dups}, players {}, {secs:.3} s, {rate:.1} matches/s",
                log.skipped.len(),
                store.len(),
            )?;
        }
        Command::Predict { a, b } => {
            let store = open_store(&cli, load_config(&cli)?)?;
            let p = store.predict(a, b)?;
            let display = store.config().display;
            writeln!(out, "#player\trating\tdeviation")?;
            for id in [a, b] {
                let (r, d) = display.rating(&store.get(id).expect("predict checked existence").belief);
                writeln!(out, "{}", row(&[id.clone(), fmt_sig(r), fmt_sig(d)]))?;
            }
            writeln!(out, "#p_first_wins\n{}", fmt_sig(p))?;
        }
        Command::Leaderboard { top, min_matches } => {
            let store = open_store(&cli, load_config(&cli)?)?;
            writeln!(out, "#rank\tplayer\trating\tdeviation\tmatches")?;
            for r in eval::leaderboard(&store, *top, *min_matches) {
                writeln!(
                    out,
                    "{}",
                    row(&[
                        r.rank.to_string(),
                        r.player_id,
                        fmt_sig(r.rating),
                        fmt_sig(r.deviation),
                        r.matches_played.to_string()
                    ])
                )?;
            }
        }
        Command::Logloss(args) => logloss(&cli, args, &mut out)?,
        Command::Curve(args) => {
            let spec = CurveSpec {
                beta: args.beta,
                sigma: args.sigma,
                opponent: args.opponent,
                m_start: args.from,
                m_end: args.to,
                m_step: args.step,
                nodes: args.nodes,
            };
            spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            writeln!(out, "#m\tshift")?;
            for (m, d) in eval::mean_shift_curve(&spec)? {
                writeln!(out, "{}", row(&[fmt_sig(m), fmt_sig(d)]))?;
            }
        }
        Command::Synth(args) => synth(&cli, args, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn logloss(cli: &Cli, args: &LoglossArgs, out: &mut impl Write) -> CmdResult {
    let cfg = load_config(cli)?;
    let var_cap = args.var_cap.unwrap_or(cfg.var_cap);
    if !(0.0..1.0).contains(&args.burn_in_fraction) {
        return Err(Failure::Usage("burn-in fraction must lie in [0, 1)".into()));
    }
    let mut store = open_store(cli, cfg)?;
    let log = read_events(cli, &args.log)?;
    let burn_in = args.burn_in.unwrap_or_else(|| (args.burn_in_fraction * log.events.len() as f64).floor() as usize);
    let report = eval::evaluate_log_loss(&mut store, &log.events, var_cap, burn_in)?;
    if args.save && !log.events.is_empty() {
        store.snapshot_save(&cli.store)?;
    }

    writeln!(out, "#metric\tvalue")?;
    let lines: [(&str, String); 9] = [
        ("processed", report.processed().to_string()),
        ("burn_in", report.burn_in.to_string()),
        ("included", report.included.to_string()),
        ("excluded", report.excluded.to_string()),
        ("average", fmt_sig(report.average)),
        ("decisive_included", report.decisive_included.to_string()),
        ("decisive_average", fmt_sig(report.decisive_average)),
        ("draws_included", report.draws_included.to_string()),
        ("draw_average", fmt_sig(report.draw_average)),
    ];
    for (k, v) in lines {
        writeln!(out, "{k}\t{v}")?;
    }

    if let Some(path) = &args.records {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "#match_id\trating_diff\tp\tloss\ttheta\tincluded")?;
        for r in &report.records {
            writeln!(
                w,
                "{}",
                row(&[
                    r.match_id.clone(),
                    fmt_sig(r.rating_diff),
                    fmt_sig(r.p),
                    fmt_sig(r.loss),
                    fmt_sig(r.theta),
                    (r.included as u8).to_string()
                ])
            )?;
        }
        w.flush()?;
    }
    if let Some(path) = &args.density {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "#abs_rating_diff\tdensity")?;
        for (x, y) in eval::loss_density(&report, args.bandwidth, args.density_step) {
            writeln!(w, "{}", row(&[fmt_sig(x), fmt_sig(y)]))?;
        }
        w.flush()?;
    }
    Ok(())
}

fn synth(cli: &Cli, args: &SynthArgs, out: &mut impl Write) -> CmdResult {
    let mut cfg = load_config(cli)?;
    if let Some(beta) = args.beta {
        cfg.beta = beta;
        cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let luck = cfg.luck_function()?;
    let spec =
        SynthSpec { players: args.players, matches: args.matches, seed: args.seed, strength_sd: args.strength_sd };
    let log = eval::generate(&spec, &luck).map_err(|e| Failure::Usage(e.to_string()))?;
    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            log.write_events(&mut w)?;
            w.flush()?;
            let truth = args.truth.clone().unwrap_or_else(|| {
                let mut p = path.clone().into_os_string();
                p.push(".truth.tsv");
                PathBuf::from(p)
            });
            let mut t = BufWriter::new(File::create(&truth)?);
            log.write_truths(&mut t)?;
            t.flush()?;
        }
        None => {
            log.write_events(&mut *out)?;
            if let Some(truth) = &args.truth {
                let mut t = BufWriter::new(File::create(truth)?);
                log.write_truths(&mut t)?;
                t.flush()?;
            }
        }
    }
    Ok(())
}
