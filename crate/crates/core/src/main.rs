use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lineup::binsweep::{sweep_bins, DEFAULT_RANGE};
use lineup::export::{export_analysis, Analysis};
use lineup::inference::{distance_matrix, mean_distances_from_matrix};
use lineup::render::{render_lineup, PanelLayout};
use lineup::service::{serve_study, ServiceConfig};
use lineup::study::{add_lineup, load_lineups, read_responses, response_times_csv, score_lineups, summarize, RESPONSES_FILE};
use lineup::{
    difficulty, empirical_distribution, generate_lineup, load_dataset, Error, ErrorClass, Lineup,
    MetricKind, NullMechanism, PlotType, Result, Schema,
};

#[derive(Parser)]
#[command(name = "lineup", version, about = "Lineup protocol toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a lineup from data, a null mechanism and a seed.
    Generate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        /// e.g. '{"kind":"permutation","target":"group","seed":42}'
        #[arg(long)]
        mechanism: String,
        #[arg(long, default_value_t = 20)]
        m: usize,
        /// Overrides the mechanism's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "scatter")]
        plot_type: String,
        #[arg(long, default_value = "Which plot is the most different?")]
        question: String,
        /// Lineup JSON output.
        #[arg(long)]
        out: PathBuf,
        /// Also add the lineup to this study directory, under `--id`.
        #[arg(long, requires = "id")]
        store: Option<PathBuf>,
        #[arg(long)]
        id: Option<String>,
    },
    /// Pairwise and mean distances for a lineup.
    Metrics {
        #[arg(long)]
        lineup: PathBuf,
        #[arg(long)]
        metric: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Empirical null distribution of a metric's mean distance.
    Distribution {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        mechanism: String,
        #[arg(long)]
        metric: String,
        #[arg(long, default_value_t = 20)]
        m: usize,
        #[arg(long = "N", default_value_t = 1000)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Lineup whose mean distances are drawn as rug marks (SVG output).
        #[arg(long)]
        lineup: Option<PathBuf>,
        /// .csv (samples), .json or .svg (density with rug).
        #[arg(long)]
        out: PathBuf,
    },
    /// δ, γ and the easy/difficult verdict for a lineup.
    Difficulty {
        #[arg(long)]
        lineup: PathBuf,
        #[arg(long)]
        metric: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid search of binned-distance bin counts.
    Sweep {
        #[arg(long)]
        lineup: PathBuf,
        /// Inclusive, e.g. 2..10 or 2-10.
        #[arg(long = "p-range")]
        p_range: Option<String>,
        #[arg(long = "q-range")]
        q_range: Option<String>,
        /// .csv, .json (tile spec) or .svg (tile plot).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a lineup to SVG.
    Render {
        #[arg(long)]
        lineup: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Outline the true panel.
        #[arg(long)]
        reveal: bool,
    },
    /// Run the observer study service.
    Serve {
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        metric: Option<String>,
        #[arg(long, default_value = "*")]
        cors_origin: String,
    },
    /// Join stored responses with difficulty scores.
    Summarize {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        metric: Option<String>,
        /// Summary CSV; raw times go next to it as `<stem>.times.csv`.
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>> {
    let (a, b) = s
        .split_once("..")
        .or_else(|| s.split_once('-'))
        .ok_or_else(|| Error::Parse(format!("range `{s}` is not of the form a..b")))?;
    let num = |t: &str| {
        t.trim_start_matches('=')
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad range bound `{t}`")))
    };
    Ok(num(a)?..=num(b)?)
}

fn load_data(data: &Path, schema: &Path) -> Result<lineup::Dataset> {
    load_dataset(data, &Schema::load(schema)?)
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate {
            data,
            schema,
            mechanism,
            m,
            seed,
            plot_type,
            question,
            out,
            store,
            id,
        } => {
            let data = load_data(&data, &schema)?;
            let mech = NullMechanism::from_json_str(&mechanism)?;
            let plot: PlotType = plot_type.parse()?;
            let seed = seed.unwrap_or(mech.seed);
            let l = generate_lineup(&data, &mech, m, seed, plot, question)?;
            l.save(&out)?;
            if let (Some(dir), Some(id)) = (store, id) {
                add_lineup(&dir, &id, &l)?;
            }
            println!("wrote lineup m={} seed={} to {}", l.m(), seed, out.display());
        }
        Command::Metrics { lineup, metric, out } => {
            let l = Lineup::load(&lineup)?;
            let kind = MetricKind::from_json_str(&metric)?;
            kind.validate(l.true_panel())?;
            let matrix = distance_matrix(l.panels(), &kind)?;
            let md = mean_distances_from_matrix(&matrix, l.true_position() - 1)?;
            let report = serde_json::json!({
                "metric": kind,
                "distances": matrix.values,
                "mean_distances": md,
            });
            let text = serde_json::to_string_pretty(&report)?;
            match out {
                Some(p) => write_out(&p, &text)?,
                None => println!("{text}"),
            }
        }
        Command::Distribution {
            data,
            schema,
            mechanism,
            metric,
            m,
            n,
            seed,
            lineup,
            out,
        } => {
            let data = load_data(&data, &schema)?;
            let mech = NullMechanism::from_json_str(&mechanism)?;
            let kind = MetricKind::from_json_str(&metric)?;
            let seed = seed.unwrap_or(mech.seed);
            let dist = empirical_distribution(&data, &mech, &kind, m, n, seed)?;
            let md = match lineup {
                Some(p) => Some(lineup::mean_distances(&Lineup::load(&p)?, &kind)?),
                None => None,
            };
            export_analysis(&Analysis::Distribution(&dist, md.as_ref()), &out)?;
            println!("wrote {} samples to {}", dist.samples.len(), out.display());
        }
        Command::Difficulty { lineup, metric, out } => {
            let l = Lineup::load(&lineup)?;
            let kind = MetricKind::from_json_str(&metric)?;
            let report = difficulty(&lineup::mean_distances(&l, &kind)?)?;
            let verdict = serde_json::to_value(report.verdict)?;
            println!(
                "delta={} gamma={} verdict={}",
                report.delta,
                report.gamma,
                verdict.as_str().unwrap_or_default()
            );
            if let Some(p) = out {
                export_analysis(&Analysis::Difficulty(&report), &p)?;
            }
        }
        Command::Sweep {
            lineup,
            p_range,
            q_range,
            out,
        } => {
            let l = Lineup::load(&lineup)?;
            let p = p_range.as_deref().map(parse_range).transpose()?.unwrap_or(DEFAULT_RANGE);
            let q = q_range.as_deref().map(parse_range).transpose()?.unwrap_or(DEFAULT_RANGE);
            let sweep = sweep_bins(&l, p, q)?;
            match sweep.best {
                Some(b) => println!(
                    "best p={} q={} delta={} worst={} skipped={}",
                    b.p,
                    b.q,
                    b.delta,
                    sweep.worst.unwrap_or(f64::NAN),
                    sweep.skipped.len()
                ),
                None => return Err(Error::Precondition("every sweep cell failed".into())),
            }
            match out {
                Some(path) => export_analysis(&Analysis::Sweep(&sweep), &path)?,
                None => print!("{}", sweep.to_csv()),
            }
        }
        Command::Render { lineup, out, reveal } => {
            let l = Lineup::load(&lineup)?;
            let svg = render_lineup(&l, &PanelLayout::for_lineup(&l)?, reveal)?;
            write_out(&out, &svg)?;
        }
        Command::Serve {
            store,
            port,
            metric,
            cors_origin,
        } => {
            let metric = metric.as_deref().map(MetricKind::from_json_str).transpose()?;
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Error::io("<runtime>", e))?;
            runtime.block_on(serve_study(ServiceConfig {
                study_dir: store,
                port,
                metric,
                cors_origin,
            }))?;
        }
        Command::Summarize { store, metric, out } => {
            let metric = metric.as_deref().map(MetricKind::from_json_str).transpose()?;
            let lineups = load_lineups(&store)?;
            let responses = read_responses(&store.join(RESPONSES_FILE))?;
            let scores = metric.map(|m| score_lineups(&lineups, &m)).unwrap_or_default();
            let summary = summarize(&lineups, &responses, metric, &scores);
            write_out(&out, &summary.to_csv())?;
            let times = out.with_extension("times.csv");
            write_out(&times, &response_times_csv(&lineups, &responses))?;
            println!(
                "summarized {} responses over {} lineups into {}",
                responses.len(),
                lineups.len(),
                out.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, class) = match e.class() {
                ErrorClass::Io => (2, "io"),
                ErrorClass::Schema => (3, "schema"),
                ErrorClass::Precondition => (4, "precondition"),
            };
            eprintln!("error[{class}]: {e}");
            ExitCode::from(code)
        }
    }
}
