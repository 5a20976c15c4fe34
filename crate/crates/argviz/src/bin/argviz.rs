//! Command-line interface for the argviz toolkit.
//!
//! Each subcommand wraps one pipeline stage; `node-pipeline` and
//! `graph-pipeline` chain them end to end. All stages are seeded and
//! deterministic: rerunning a command reproduces its outputs byte for byte.

use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use argviz::gcn;
use argviz::generators::GeneratorSpec;
use argviz::graph_core::{self, ArgumentationFramework, LabeledFramework};
use argviz::hope::hope_embed;
use argviz::metrics::{knn_label_agreement, silhouette, LabeledPoints};
use argviz::numerics::Matrix;
use argviz::pipeline::{
    self, hope_features_csv, load_dataset_dir, run_graph_pipeline, run_node_pipeline,
    stage_seed, synthetic_domain_dataset, PipelineConfig, SYNTHETIC_DOMAINS,
};
use argviz::tsne::tsne_embed;
use argviz::viz::{export_csv_with_ids, render_svg, PlotSpec};

#[derive(Parser)]
#[command(name = "argviz", version, about = "Argumentation framework visualisation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Apx,
    Tgf,
}

/// Flags shared by every stage; explicit flags override --config values.
#[derive(Args)]
struct Common {
    /// Global seed; per-stage seeds derive from it.
    #[arg(long)]
    seed: Option<u64>,
    /// JSON config file with pipeline defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path prefix.
    #[arg(long, default_value = "argviz-out")]
    out: String,
}

impl Common {
    fn load_config(&self) -> Result<PipelineConfig, Box<dyn Error>> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::from_json(&fs::read_to_string(path)?)?,
            None => PipelineConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct DatasetArgs {
    /// Dataset directory: one subdirectory per domain label with APX/TGF files.
    #[arg(long, conflicts_with = "synthetic")]
    data_dir: Option<PathBuf>,
    /// Generate a synthetic dataset over all available domains instead.
    #[arg(long)]
    synthetic: bool,
    /// Graphs per domain for --synthetic.
    #[arg(long, default_value_t = 30)]
    per_domain: usize,
    /// Minimum argument count per synthetic graph.
    #[arg(long, default_value_t = 30)]
    n_min: usize,
    /// Maximum argument count per synthetic graph.
    #[arg(long, default_value_t = 150)]
    n_max: usize,
}

impl DatasetArgs {
    fn load(&self, seed: u64) -> Result<Vec<LabeledFramework>, Box<dyn Error>> {
        match (&self.data_dir, self.synthetic) {
            (Some(dir), _) => Ok(load_dataset_dir(dir)?),
            (None, true) => Ok(synthetic_domain_dataset(
                &SYNTHETIC_DOMAINS,
                self.per_domain,
                self.n_min,
                self.n_max,
                seed,
            )?),
            (None, false) => Err("pass either --data-dir or --synthetic".into()),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic framework and write it to <out>.<format>.
    Generate {
        #[command(flatten)]
        common: Common,
        /// Generator spec as JSON, e.g. '{"domain":"sembuster","k":100}'.
        #[arg(long)]
        spec: String,
        #[arg(long, value_enum, default_value_t = Format::Apx)]
        format: Format,
    },
    /// Parse a framework and re-serialize it to <out>.<format>.
    Ingest {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
        /// Output format; defaults to the input format.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// HOPE node features for a framework, written to <out>.hope.csv.
    EmbedHope {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
    /// t-SNE on a feature CSV (id,f0,...), written to <out>.layout.csv.
    Tsne {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
    /// Train the GCN classifier; writes <out>.gcn and <out>.train.json.
    TrainGcn {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        dataset: DatasetArgs,
    },
    /// Per-graph GCN embeddings for a dataset, written to <out>.embed.csv.
    EmbedGcn {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        dataset: DatasetArgs,
        /// Trained model checkpoint from train-gcn.
        #[arg(long)]
        model: PathBuf,
    },
    /// Scatter plot of a layout CSV (id,x,y,label), written to <out>.svg.
    Plot {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
    /// knn label agreement and silhouette of a layout CSV, as JSON on stdout.
    Metrics {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
        /// Neighbour count for the knn metric.
        #[arg(long, short, default_value_t = 10)]
        k: usize,
    },
    /// Full node-level experiment: HOPE, t-SNE, plot, metrics.
    NodePipeline {
        #[command(flatten)]
        common: Common,
        /// Framework file; mutually exclusive with --sembuster.
        #[arg(long, conflicts_with = "sembuster")]
        input: Option<PathBuf>,
        /// Generate a Sembuster instance with this k (labels A/B/C).
        #[arg(long)]
        sembuster: Option<usize>,
    },
    /// Full graph-level experiment: GCN training, t-SNE, plot, metrics.
    GraphPipeline {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        dataset: DatasetArgs,
        /// Reuse a trained checkpoint instead of training.
        #[arg(long)]
        load: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn parse_framework(path: &Path) -> Result<ArgumentationFramework, Box<dyn Error>> {
    let text = fs::read_to_string(path)?;
    let af = match path.extension().and_then(|e| e.to_str()) {
        Some("tgf") => graph_core::parse_tgf(&text)?,
        _ => graph_core::parse_apx(&text)?,
    };
    Ok(af)
}

fn write_framework(
    af: &ArgumentationFramework,
    prefix: &str,
    format: Format,
) -> Result<String, Box<dyn Error>> {
    let (text, ext) = match format {
        Format::Apx => (graph_core::serialize_apx(af), "apx"),
        Format::Tgf => (graph_core::serialize_tgf(af), "tgf"),
    };
    let path = format!("{prefix}.{ext}");
    fs::write(&path, text)?;
    Ok(path)
}

/// Parses a feature CSV with an id column followed by float columns.
fn parse_feature_csv(text: &str) -> Result<(Vec<String>, Matrix), Box<dyn Error>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty CSV")?;
    let cols = header.split(',').count();
    if cols < 2 {
        return Err("feature CSV needs an id column and at least one feature".into());
    }
    let mut ids = Vec::new();
    let mut data = Vec::new();
    for (i, line) in lines.enumerate() {
        let mut fields = line.split(',');
        ids.push(fields.next().unwrap_or_default().to_string());
        let mut count = 1;
        for field in fields {
            data.push(
                field
                    .parse::<f64>()
                    .map_err(|e| format!("row {}: {e}", i + 2))?,
            );
            count += 1;
        }
        if count != cols {
            return Err(format!("row {}: expected {cols} columns, got {count}", i + 2).into());
        }
    }
    let n = ids.len();
    Ok((ids, Matrix::from_vec(n, cols - 1, data)?))
}

/// Parses a layout CSV (id,x,y,label).
fn parse_layout_csv(text: &str) -> Result<(Vec<String>, Matrix, Vec<String>), Box<dyn Error>> {
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut data = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(format!("row {}: expected id,x,y,label", i + 1).into());
        }
        ids.push(fields[0].to_string());
        data.push(fields[1].parse::<f64>()?);
        data.push(fields[2].parse::<f64>()?);
        labels.push(fields[3].to_string());
    }
    let n = ids.len();
    Ok((ids, Matrix::from_vec(n, 2, data)?, labels))
}

fn write_outputs(prefix: &str, files: &[(&str, &str)]) -> Result<Vec<String>, Box<dyn Error>> {
    let mut written = Vec::new();
    for (suffix, content) in files {
        let path = format!("{prefix}{suffix}");
        fs::write(&path, content)?;
        written.push(path);
    }
    Ok(written)
}

fn run(cli: Cli) -> Result<(), Box<dyn Error>> {
    match cli.command {
        Command::Generate { common, spec, format } => {
            let spec: GeneratorSpec = serde_json::from_str(&spec)?;
            let lf = spec.generate()?;
            let path = write_framework(&lf.framework, &common.out, format)?;
            println!("wrote {path}");
        }
        Command::Ingest { common, input, format } => {
            let af = parse_framework(&input)?;
            let format = format.unwrap_or(
                match input.extension().and_then(|e| e.to_str()) {
                    Some("tgf") => Format::Tgf,
                    _ => Format::Apx,
                },
            );
            let path = write_framework(&af, &common.out, format)?;
            println!("wrote {path} ({} arguments, {} attacks)", af.argument_count(), af.attack_count());
        }
        Command::EmbedHope { common, input } => {
            let cfg = common.load_config()?;
            let af = parse_framework(&input)?;
            let emb = hope_embed(
                &af,
                cfg.hope_dimensions,
                cfg.hope_beta,
                stage_seed(cfg.seed, "hope"),
            )?;
            let lf = LabeledFramework::unlabeled(af);
            let path = format!("{}.hope.csv", common.out);
            fs::write(&path, hope_features_csv(&lf, &emb))?;
            println!("wrote {path} (beta = {})", emb.beta);
        }
        Command::Tsne { common, input } => {
            let cfg = common.load_config()?;
            let (ids, features) = parse_feature_csv(&fs::read_to_string(&input)?)?;
            let layout = tsne_embed(&features, &cfg.tsne_config(stage_seed(cfg.seed, "tsne")))?;
            let labels = vec!["node".to_string(); ids.len()];
            let path = format!("{}.layout.csv", common.out);
            fs::write(&path, export_csv_with_ids(&ids, &layout.y, &labels)?)?;
            println!("wrote {path} (final KL = {})", layout.final_kl);
        }
        Command::TrainGcn { common, dataset } => {
            let cfg = common.load_config()?;
            let data = dataset.load(cfg.seed)?;
            let (model, report) =
                gcn::train(&data, &cfg.train_config(stage_seed(cfg.seed, "gcn-train")))?;
            let model_path = format!("{}.gcn", common.out);
            let mut file = fs::File::create(&model_path)?;
            gcn::save_checkpoint(&model, &mut file)?;
            let report_path = format!("{}.train.json", common.out);
            fs::write(
                &report_path,
                serde_json::to_string_pretty(&serde_json::json!({
                    "epochs_run": report.epochs_run,
                    "best_epoch": report.best_epoch,
                    "best_val_accuracy": report.best_val_accuracy,
                    "loss_history": report.loss_history,
                    "val_accuracy": report.val_accuracy,
                }))?,
            )?;
            println!(
                "wrote {model_path}, {report_path} (best val accuracy = {})",
                report.best_val_accuracy
            );
        }
        Command::EmbedGcn { common, dataset, model } => {
            let cfg = common.load_config()?;
            let data = dataset.load(cfg.seed)?;
            let model = gcn::load_checkpoint(&mut fs::File::open(&model)?)?;
            let embeddings = pipeline::extract_all_embeddings(&model, &data)?;
            let mut out = String::from("id,label");
            for c in 0..embeddings.cols() {
                out.push_str(&format!(",e{c}"));
            }
            out.push('\n');
            for (i, lf) in data.iter().enumerate() {
                out.push_str(&format!(
                    "g{i},{}",
                    lf.graph_label.as_deref().unwrap_or("unlabeled")
                ));
                for c in 0..embeddings.cols() {
                    out.push_str(&format!(",{}", argviz::viz::fmt_sig9(embeddings[(i, c)])));
                }
                out.push('\n');
            }
            let path = format!("{}.embed.csv", common.out);
            fs::write(&path, out)?;
            println!("wrote {path}");
        }
        Command::Plot { common, input } => {
            let cfg = common.load_config()?;
            let (_ids, points, labels) = parse_layout_csv(&fs::read_to_string(&input)?)?;
            let mut spec = PlotSpec::new(points, labels)?;
            spec.width = cfg.plot_width;
            spec.height = cfg.plot_height;
            spec.margin = cfg.plot_margin;
            spec.point_radius = cfg.plot_point_radius;
            spec.legend = cfg.plot_legend;
            spec.title = cfg.plot_title.clone();
            let path = format!("{}.svg", common.out);
            fs::write(&path, render_svg(&spec)?)?;
            println!("wrote {path}");
        }
        Command::Metrics { common: _, input, k } => {
            let (_ids, points, labels) = parse_layout_csv(&fs::read_to_string(&input)?)?;
            let lp = LabeledPoints::new(points, labels)?;
            let knn = knn_label_agreement(&lp, k)?;
            let sil = silhouette(&lp)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "knn_label_agreement": knn,
                    "silhouette": sil,
                    "k": k,
                }))?
            );
        }
        Command::NodePipeline { common, input, sembuster } => {
            let cfg = common.load_config()?;
            let lf = match (input, sembuster) {
                (Some(path), None) => LabeledFramework::unlabeled(parse_framework(&path)?),
                (None, Some(k)) => argviz::generators::gen_sembuster(k)?,
                _ => return Err("pass either --input or --sembuster".into()),
            };
            let out = run_node_pipeline(&lf, &cfg)?;
            let mut written = write_outputs(
                &common.out,
                &[
                    (".svg", &out.svg),
                    (".layout.csv", &out.layout_csv),
                    (".kl.csv", &out.kl_csv),
                ],
            )?;
            let mut report = out.report;
            report.outputs = written.clone();
            let report_path = format!("{}.report.json", common.out);
            fs::write(&report_path, report.to_json())?;
            written.push(report_path);
            for path in &written {
                println!("wrote {path}");
            }
            for (name, value) in &report.metrics {
                println!("{name} = {value}");
            }
        }
        Command::GraphPipeline { common, dataset, load } => {
            let cfg = common.load_config()?;
            let data = dataset.load(cfg.seed)?;
            let pretrained = match &load {
                Some(path) => Some(gcn::load_checkpoint(&mut fs::File::open(path)?)?),
                None => None,
            };
            let out = run_graph_pipeline(&data, &cfg, pretrained)?;
            let mut written = write_outputs(
                &common.out,
                &[(".svg", &out.svg), (".layout.csv", &out.layout_csv)],
            )?;
            if load.is_none() {
                let model_path = format!("{}.gcn", common.out);
                let mut file = fs::File::create(&model_path)?;
                gcn::save_checkpoint(&out.model, &mut file)?;
                written.push(model_path);
            }
            let mut report = out.report;
            report.outputs = written.clone();
            let report_path = format!("{}.report.json", common.out);
            fs::write(&report_path, report.to_json())?;
            written.push(report_path);
            for path in &written {
                println!("wrote {path}");
            }
            for (name, value) in &report.metrics {
                println!("{name} = {value}");
            }
        }
    }
    Ok(())
}
