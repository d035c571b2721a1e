use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use proplang::config::PipelineConfig;
use proplang::reports::{self, RunRecordFile};
use proplang::runner::{run_eval, RunOptions};
use proplang::{client, corpus, keys, CliError};
use proplang_core::{
    detranslate, parse_set_name, render_report, translate_text, ConstantClient, DatasetSpec,
    InvertedOracleClient, ModelClient, OracleClient, Origin, Provenance, ReportFormat, RunResult,
    SamplePlan,
};

/// Translate logical statements through configurable keys, build chat
/// fine-tuning datasets, evaluate models on seen/unseen test sets, and
/// aggregate accuracy reports.
#[derive(Parser)]
#[command(name = "proplang", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate (or decode) a file of statements, one per line.
    Translate {
        /// Input file: one statement per line.
        #[arg(long)]
        input: PathBuf,
        /// Key definition file.
        #[arg(long)]
        key: PathBuf,
        /// Symbol inventory file; built-in default when omitted.
        #[arg(long)]
        inventory: Option<PathBuf>,
        /// Output file.
        #[arg(long)]
        output: PathBuf,
        /// Decode translated statements back to their source form.
        #[arg(long)]
        decode: bool,
    },
    /// Build training files and test sets from the configured corpora.
    Build {
        #[arg(long)]
        config: PathBuf,
        /// Override the configured output directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Override the configured seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate a model (or mock) on every built test set.
    Eval {
        #[arg(long)]
        config: PathBuf,
        /// Mock client: oracle, inverted, constant:true, constant:false,
        /// or replay:<fixture-path>.
        #[arg(long, conflicts_with = "model")]
        mock: Option<String>,
        /// Model name for the configured HTTP endpoint.
        #[arg(long)]
        model: Option<String>,
        /// Label recorded in run files (defaults to the mock or model name).
        #[arg(long)]
        label: Option<String>,
        /// Override the configured request parallelism.
        #[arg(long)]
        parallelism: Option<usize>,
        /// Directory holding the built test sets (defaults to the
        /// configured output directory).
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Aggregate run files into text/CSV reports and the figure matrix.
    Report {
        /// Directory of run-*.json files.
        #[arg(long)]
        results: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::TableText)]
        format: FormatArg,
        /// Where to write report.txt, runs.csv, and figure1.csv
        /// (defaults to the results directory).
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Also write an SVG bar chart to this path.
        #[arg(long)]
        chart: Option<PathBuf>,
        /// Append query-count-weighted cross-set means.
        #[arg(long)]
        weighted: bool,
        /// Compare two model labels as AFTER,BEFORE (training-size effect).
        #[arg(long)]
        compare: Option<String>,
        /// Claimed seen-set delta to check --compare against.
        #[arg(long)]
        claimed_seen: Option<f64>,
        /// Claimed unseen-set delta to check --compare against.
        #[arg(long)]
        claimed_unseen: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    TableText,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Translate {
            input,
            key,
            inventory,
            output,
            decode,
        } => cmd_translate(&input, &key, inventory.as_deref(), &output, decode),
        Command::Build {
            config,
            output_dir,
            seed,
        } => cmd_build(&config, output_dir, seed),
        Command::Eval {
            config,
            mock,
            model,
            label,
            parallelism,
            output_dir,
        } => cmd_eval(&config, mock, model, label, parallelism, output_dir),
        Command::Report {
            results,
            format,
            out_dir,
            chart,
            weighted,
            compare,
            claimed_seen,
            claimed_unseen,
        } => cmd_report(
            &results,
            format,
            out_dir,
            chart,
            weighted,
            compare,
            claimed_seen,
            claimed_unseen,
        ),
    }
}

fn cmd_translate(
    input: &Path,
    key_path: &Path,
    inventory: Option<&Path>,
    output: &Path,
    decode: bool,
) -> Result<(), CliError> {
    let key = keys::load_key(key_path)?;
    let inv = keys::load_inventory(inventory)?;
    let text = proplang::read_to_string(input)?;
    let mut out = String::new();
    for (i, line) in text.lines().enumerate() {
        let result = if decode {
            detranslate(line, &key, &inv)
        } else {
            translate_text(line, &key, &inv)
        };
        let converted = result.map_err(|e| {
            CliError::data(format!("{}:{}: {e}", input.display(), i + 1))
        })?;
        out.push_str(&converted);
        out.push('\n');
    }
    proplang::write_string(output, &out)
}

fn cmd_build(
    config_path: &Path,
    output_dir: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let mut cfg = PipelineConfig::load(config_path)?;
    if let Some(dir) = output_dir {
        cfg.paths.output_dir = dir;
    }
    if let Some(seed) = seed {
        cfg.build.seed = seed;
    }
    cfg.check_paths()?;

    let key = keys::load_key(&cfg.paths.key)?;
    let inv = keys::load_inventory(cfg.paths.inventory.as_deref())?;
    let training = corpus::read_corpus(&cfg.paths.training_corpus, Origin::TrainingCorpus)?;
    let unseen = corpus::read_corpus(&cfg.paths.unseen_corpus, Origin::UnseenCorpus)?;
    let out = &cfg.paths.output_dir;
    let prompt = &cfg.build.system_prompt;

    for &size in &cfg.build.train_sizes {
        let spec = DatasetSpec {
            key_name: key.name().to_string(),
            size,
            seed: cfg.build.seed,
        };
        let path = out.join(format!("train-{}-{}.jsonl", key.name(), size));
        let summary = corpus::emit_dataset(&training, &spec, Some(&key), &inv, prompt, &path)?;
        println!("wrote {} ({} records)", path.display(), summary.written);
    }

    let seen_plan = SamplePlan {
        n: cfg.build.seen_n,
        seed: cfg.build.seed,
        replicas: cfg.build.replicas,
        disjoint: cfg.build.disjoint,
    };
    let seen =
        corpus::build_test_sets(&training, Provenance::Seen, &key, &inv, prompt, &seen_plan, out)?;
    let unseen_plan = SamplePlan {
        n: cfg.build.unseen_n,
        ..seen_plan
    };
    let unseen_sets = corpus::build_test_sets(
        &unseen,
        Provenance::Unseen,
        &key,
        &inv,
        prompt,
        &unseen_plan,
        out,
    )?;
    println!(
        "wrote {} test sets into {}",
        seen.len() + unseen_sets.len(),
        out.display()
    );
    Ok(())
}

fn make_client(
    cfg: &PipelineConfig,
    mock: Option<&str>,
    model: Option<&str>,
) -> Result<(Box<dyn ModelClient>, String), CliError> {
    if let Some(mock) = mock {
        let client: Box<dyn ModelClient> = match mock {
            "oracle" => Box::new(OracleClient),
            "inverted" => Box::new(InvertedOracleClient),
            "constant:true" => Box::new(ConstantClient::new("True")),
            "constant:false" => Box::new(ConstantClient::new("False")),
            other => match other.strip_prefix("replay:") {
                Some(path) => Box::new(client::load_replay(Path::new(path))?),
                None => {
                    return Err(CliError::data(format!(
                        "unknown mock {other:?}; expected oracle, inverted, constant:true, constant:false, or replay:<path>"
                    )))
                }
            },
        };
        let label = mock.split(':').next().unwrap_or(mock).to_string();
        return Ok((client, label));
    }
    let model = model
        .map(str::to_string)
        .or_else(|| cfg.eval.model.clone())
        .ok_or_else(|| CliError::data("eval needs --mock or --model (or eval.model in config)"))?;
    let endpoint = cfg
        .eval
        .endpoint
        .as_deref()
        .ok_or_else(|| CliError::data("eval.endpoint missing from config"))?;
    let client = client::HttpChatClient::new(endpoint, &model, &cfg.eval.api_key_env)?;
    Ok((Box::new(client), model))
}

fn cmd_eval(
    config_path: &Path,
    mock: Option<String>,
    model: Option<String>,
    label: Option<String>,
    parallelism: Option<usize>,
    output_dir: Option<PathBuf>,
) -> Result<(), CliError> {
    let mut cfg = PipelineConfig::load(config_path)?;
    if let Some(dir) = output_dir {
        cfg.paths.output_dir = dir;
    }
    let sets_dir = cfg.paths.output_dir.clone();
    let results_dir = sets_dir.join("results");
    let (client, default_label) = make_client(&cfg, mock.as_deref(), model.as_deref())?;
    let label = label.unwrap_or(default_label);
    let opts = RunOptions {
        parallelism: parallelism.unwrap_or(cfg.eval.parallelism),
        max_retries: cfg.eval.max_retries,
        backoff: std::time::Duration::from_millis(cfg.eval.backoff_ms),
    };

    let names = corpus::list_test_sets(&sets_dir)?;
    if names.is_empty() {
        return Err(CliError::data(format!(
            "no test sets found in {} (run `proplang build` first)",
            sets_dir.display()
        )));
    }
    for name in names {
        let set = corpus::load_test_set(&sets_dir, &name)?;
        let (provenance, form, run_index) = parse_set_name(&set.name)
            .ok_or_else(|| CliError::data(format!("bad test set name {:?}", set.name)))?;
        match run_eval(&set, client.as_ref(), &opts) {
            Ok(result) => {
                let record = RunRecordFile {
                    model_label: label.clone(),
                    provenance,
                    form,
                    run_index,
                    valid: true,
                    result,
                };
                let path = reports::write_run_file(&results_dir, &record)?;
                println!(
                    "{}: {}/{} correct -> {}",
                    set.name,
                    record.result.correct,
                    record.result.total,
                    path.display()
                );
            }
            Err(e) => {
                let correct = e
                    .completed
                    .iter()
                    .filter(|r| r.verdict.matches(r.expected))
                    .count();
                let record = RunRecordFile {
                    model_label: label.clone(),
                    provenance,
                    form,
                    run_index,
                    valid: false,
                    result: RunResult {
                        test_set_name: set.name.clone(),
                        total: e.completed.len(),
                        correct,
                        per_item: e.completed.clone(),
                    },
                };
                reports::write_run_file(&results_dir, &record)?;
                return Err(CliError::Transport(format!(
                    "{}: {} (partial run saved as invalid)",
                    set.name, e
                )));
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_report(
    results: &Path,
    format: FormatArg,
    out_dir: Option<PathBuf>,
    chart: Option<PathBuf>,
    weighted: bool,
    compare: Option<String>,
    claimed_seen: Option<f64>,
    claimed_unseen: Option<f64>,
) -> Result<(), CliError> {
    let records = reports::read_run_files(results)?;
    let invalid = records.iter().filter(|r| !r.valid).count();
    if invalid > 0 {
        eprintln!("warning: skipping {invalid} invalid run file(s)");
    }
    let models = reports::build_model_summaries(&records)?;
    let out_dir = out_dir.unwrap_or_else(|| results.to_path_buf());
    reports::emit_report_files(&models, &out_dir)?;

    match format {
        FormatArg::TableText => {
            print!("{}", render_report(&models, ReportFormat::Text));
            println!();
            print!("{}", reports::cross_model_section(&models));
        }
        FormatArg::Csv => print!("{}", render_report(&models, ReportFormat::Csv)),
    }
    if weighted {
        println!();
        print!("{}", reports::weighted_section(&models));
    }
    if let Some(compare) = compare {
        let (after, before) = compare.split_once(',').ok_or_else(|| {
            CliError::data("--compare expects AFTER_LABEL,BEFORE_LABEL")
        })?;
        let mut claims = Vec::new();
        if let Some(c) = claimed_seen {
            claims.push((Provenance::Seen, c));
        }
        if let Some(c) = claimed_unseen {
            claims.push((Provenance::Unseen, c));
        }
        println!();
        if claims.is_empty() {
            for provenance in [Provenance::Seen, Provenance::Unseen] {
                let effect =
                    reports::size_effect(&models, after, before, provenance, 0.0, f64::INFINITY)?;
                println!(
                    "training-size effect {before} -> {after} ({}): {:+.4}",
                    provenance.as_str(),
                    effect.computed
                );
            }
        } else {
            print!(
                "{}",
                reports::size_effect_lines(&models, after, before, &claims, 0.05)?
            );
        }
    }
    if let Some(chart_path) = chart {
        proplang::write_string(&chart_path, &reports::svg_chart(&models))?;
        println!("wrote chart {}", chart_path.display());
    }
    Ok(())
}
