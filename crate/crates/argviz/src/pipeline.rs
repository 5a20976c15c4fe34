//! Pipeline orchestration shared by the CLI: configuration with JSON
//! overrides, per-stage seed derivation, the node-level (HOPE + t-SNE) and
//! graph-level (GCN + t-SNE) experiments, dataset directory loading and run
//! reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gcn::{self, GcnDims, GcnModel, TrainConfig, TrainReport};
use crate::generators::{GeneratorError, GeneratorSpec};
use crate::graph_core::{self, GraphError, LabeledFramework};
use crate::hope::{hope_embed, node_feature_matrix, HopeEmbedding, HopeError};
use crate::metrics::{knn_label_agreement, silhouette, LabeledPoints, MetricsError};
use crate::numerics::Matrix;
use crate::tsne::{tsne_embed, Layout2D, TsneConfig, TsneError};
use crate::viz::{export_csv_with_ids, render_svg, PlotSpec, VizError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Hope(#[from] HopeError),
    #[error(transparent)]
    Tsne(#[from] TsneError),
    #[error(transparent)]
    Gcn(#[from] gcn::GcnError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Viz(#[from] VizError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("config error: {0}")]
    Config(String),
    #[error("dataset error: {0}")]
    Dataset(String),
}

/// Flat pipeline configuration. Every default stated by the stage modules is
/// overridable here; unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    // HOPE
    pub hope_dimensions: usize,
    pub hope_beta: Option<f64>,
    // t-SNE
    pub perplexity: f64,
    pub output_dims: usize,
    pub tsne_iterations: usize,
    pub tsne_learning_rate: Option<f64>,
    pub tsne_momentum_early: f64,
    pub tsne_momentum_late: f64,
    pub tsne_momentum_switch: usize,
    pub tsne_exaggeration_factor: f64,
    pub tsne_exaggeration_iters: usize,
    // GCN
    pub gcn_hidden: usize,
    pub gcn_embedding: usize,
    pub gcn_fc_hidden: usize,
    pub gcn_learning_rate: f64,
    pub gcn_max_epochs: usize,
    pub gcn_patience: usize,
    pub gcn_validation_fraction: f64,
    // metrics
    pub node_knn_k: usize,
    pub graph_knn_k: usize,
    // plot
    pub plot_width: u32,
    pub plot_height: u32,
    pub plot_margin: f64,
    pub plot_point_radius: f64,
    pub plot_legend: bool,
    pub plot_title: Option<String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 42,
            hope_dimensions: 64,
            hope_beta: None,
            perplexity: 30.0,
            output_dims: 2,
            tsne_iterations: 1000,
            tsne_learning_rate: None,
            tsne_momentum_early: 0.5,
            tsne_momentum_late: 0.8,
            tsne_momentum_switch: 250,
            tsne_exaggeration_factor: 12.0,
            tsne_exaggeration_iters: 250,
            gcn_hidden: 64,
            gcn_embedding: 32,
            gcn_fc_hidden: 32,
            gcn_learning_rate: 1e-3,
            gcn_max_epochs: 1500,
            gcn_patience: 300,
            gcn_validation_fraction: 0.2,
            node_knn_k: 10,
            graph_knn_k: 5,
            plot_width: 800,
            plot_height: 800,
            plot_margin: 40.0,
            plot_point_radius: 2.5,
            plot_legend: false,
            plot_title: None,
        }
    }
}

impl PipelineConfig {
    /// Loads a JSON config file; unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        serde_json::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn tsne_config(&self, seed: u64) -> TsneConfig {
        TsneConfig {
            perplexity: self.perplexity,
            output_dims: self.output_dims,
            iterations: self.tsne_iterations,
            learning_rate: self.tsne_learning_rate,
            momentum_early: self.tsne_momentum_early,
            momentum_late: self.tsne_momentum_late,
            momentum_switch: self.tsne_momentum_switch,
            exaggeration_factor: self.tsne_exaggeration_factor,
            exaggeration_iters: self.tsne_exaggeration_iters,
            seed,
        }
    }

    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            dims: GcnDims {
                hidden: self.gcn_hidden,
                embedding: self.gcn_embedding,
                fc_hidden: self.gcn_fc_hidden,
            },
            learning_rate: self.gcn_learning_rate,
            max_epochs: self.gcn_max_epochs,
            patience: self.gcn_patience,
            validation_fraction: self.gcn_validation_fraction,
            seed,
            ..TrainConfig::default()
        }
    }

    fn plot_spec(&self, points: Matrix, labels: Vec<String>) -> Result<PlotSpec, VizError> {
        let mut spec = PlotSpec::new(points, labels)?;
        spec.width = self.plot_width;
        spec.height = self.plot_height;
        spec.margin = self.plot_margin;
        spec.point_radius = self.plot_point_radius;
        spec.legend = self.plot_legend;
        spec.title = self.plot_title.clone();
        Ok(spec)
    }
}

/// Per-stage seed: the global seed mixed with an FNV-1a hash of the stage
/// name through a splitmix64 finalizer. Stages can be re-run independently
/// yet reproducibly.
pub fn stage_seed(global: u64, stage: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in stage.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = h ^ global.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Run summary: config echo, per-stage wall times, metric values and the
/// manifest of files written.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: PipelineConfig,
    pub stage_seconds: BTreeMap<String, f64>,
    pub metrics: BTreeMap<String, f64>,
    pub outputs: Vec<String>,
}

impl RunReport {
    fn new(config: &PipelineConfig) -> Self {
        RunReport {
            config: config.clone(),
            stage_seconds: BTreeMap::new(),
            metrics: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub struct NodePipelineOutput {
    pub embedding: HopeEmbedding,
    pub layout: Layout2D,
    pub labels: Vec<String>,
    pub svg: String,
    pub layout_csv: String,
    pub kl_csv: String,
    pub report: RunReport,
}

/// Node-level experiment: HOPE features, t-SNE projection, plot and metrics.
pub fn run_node_pipeline(
    lf: &LabeledFramework,
    cfg: &PipelineConfig,
) -> Result<NodePipelineOutput, PipelineError> {
    let mut report = RunReport::new(cfg);
    let af = &lf.framework;

    let t0 = Instant::now();
    let embedding = hope_embed(af, cfg.hope_dimensions, cfg.hope_beta, stage_seed(cfg.seed, "hope"))?;
    let features = node_feature_matrix(&embedding);
    report
        .stage_seconds
        .insert("hope".into(), t0.elapsed().as_secs_f64());

    let t0 = Instant::now();
    let layout = tsne_embed(&features, &cfg.tsne_config(stage_seed(cfg.seed, "tsne")))?;
    report
        .stage_seconds
        .insert("tsne".into(), t0.elapsed().as_secs_f64());
    report.metrics.insert("final_kl".into(), layout.final_kl);

    let labels: Vec<String> = match &lf.node_labels {
        Some(map) => (0..af.argument_count())
            .map(|i| map.get(&i).cloned().unwrap_or_else(|| "node".to_string()))
            .collect(),
        None => vec!["node".to_string(); af.argument_count()],
    };

    let t0 = Instant::now();
    let distinct = {
        let mut d: Vec<&String> = labels.iter().collect();
        d.sort();
        d.dedup();
        d.len()
    };
    if distinct >= 2 {
        let lp = LabeledPoints::new(layout.y.clone(), labels.clone())?;
        let k = cfg.node_knn_k.min(af.argument_count() - 1);
        report
            .metrics
            .insert("knn_label_agreement".into(), knn_label_agreement(&lp, k)?);
        report.metrics.insert("silhouette".into(), silhouette(&lp)?);
    }
    report
        .stage_seconds
        .insert("metrics".into(), t0.elapsed().as_secs_f64());

    let t0 = Instant::now();
    let ids: Vec<String> = af.arguments().to_vec();
    let layout_csv = export_csv_with_ids(&ids, &layout.y, &labels)?;
    let svg = render_svg(&cfg.plot_spec(layout.y.clone(), labels.clone())?)?;
    let mut kl_csv = String::from("iteration,kl\n");
    for &(iteration, kl) in &layout.kl_history {
        let _ = writeln!(kl_csv, "{iteration},{kl}");
    }
    report
        .stage_seconds
        .insert("render".into(), t0.elapsed().as_secs_f64());

    Ok(NodePipelineOutput {
        embedding,
        layout,
        labels,
        svg,
        layout_csv,
        kl_csv,
        report,
    })
}

pub struct GraphPipelineOutput {
    pub model: GcnModel,
    pub train_report: Option<TrainReport>,
    pub embeddings: Matrix,
    pub layout: Layout2D,
    pub labels: Vec<String>,
    pub svg: String,
    pub layout_csv: String,
    pub report: RunReport,
}

/// Graph-level experiment: GCN training (or a preloaded checkpoint),
/// per-graph embedding extraction, t-SNE projection, plot and metrics.
pub fn run_graph_pipeline(
    dataset: &[LabeledFramework],
    cfg: &PipelineConfig,
    pretrained: Option<GcnModel>,
) -> Result<GraphPipelineOutput, PipelineError> {
    let mut report = RunReport::new(cfg);
    let labels: Vec<String> = dataset
        .iter()
        .map(|lf| {
            lf.graph_label
                .clone()
                .ok_or_else(|| PipelineError::Dataset("graph without domain label".into()))
        })
        .collect::<Result<_, _>>()?;
    {
        let mut distinct = labels.clone();
        distinct.sort();
        distinct.dedup();
        if distinct.len() < 2 {
            return Err(PipelineError::Dataset(format!(
                "graph-level pipeline needs >= 2 domain classes, found {}",
                distinct.len()
            )));
        }
    }

    let (model, train_report) = match pretrained {
        Some(model) => (model, None),
        None => {
            let t0 = Instant::now();
            let (model, tr) = gcn::train(dataset, &cfg.train_config(stage_seed(cfg.seed, "gcn-train")))?;
            report
                .stage_seconds
                .insert("gcn-train".into(), t0.elapsed().as_secs_f64());
            report
                .metrics
                .insert("validation_accuracy".into(), tr.best_val_accuracy);
            (model, Some(tr))
        }
    };

    let t0 = Instant::now();
    let embeddings = extract_all_embeddings(&model, dataset)?;
    report
        .stage_seconds
        .insert("embed".into(), t0.elapsed().as_secs_f64());

    let t0 = Instant::now();
    let layout = tsne_embed(&embeddings, &cfg.tsne_config(stage_seed(cfg.seed, "tsne")))?;
    report
        .stage_seconds
        .insert("tsne".into(), t0.elapsed().as_secs_f64());
    report.metrics.insert("final_kl".into(), layout.final_kl);

    let lp = LabeledPoints::new(layout.y.clone(), labels.clone())?;
    let k = cfg.graph_knn_k.min(dataset.len() - 1);
    report
        .metrics
        .insert("knn_label_agreement".into(), knn_label_agreement(&lp, k)?);
    report.metrics.insert("silhouette".into(), silhouette(&lp)?);

    let ids: Vec<String> = (0..dataset.len()).map(|i| format!("g{i}")).collect();
    let layout_csv = export_csv_with_ids(&ids, &layout.y, &labels)?;
    let svg = render_svg(&cfg.plot_spec(layout.y.clone(), labels.clone())?)?;
    report
        .stage_seconds
        .insert("render".into(), t0.elapsed().as_secs_f64());

    Ok(GraphPipelineOutput {
        model,
        train_report,
        embeddings,
        layout,
        labels,
        svg,
        layout_csv,
        report,
    })
}

/// Worker count for per-graph embedding extraction, bounded by the
/// ARGVIZ_THREADS environment variable (default 1).
fn thread_budget() -> usize {
    std::env::var("ARGVIZ_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or(1)
}

/// Embeddings for every graph, one row per dataset entry in input order.
/// Parallel extraction writes disjoint rows, so the output is identical to
/// the sequential order.
pub fn extract_all_embeddings(
    model: &GcnModel,
    dataset: &[LabeledFramework],
) -> Result<Matrix, PipelineError> {
    let width = model.embedding_width();
    let threads = thread_budget().min(dataset.len().max(1));
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); dataset.len()];
    if threads <= 1 {
        for (i, lf) in dataset.iter().enumerate() {
            rows[i] = gcn::extract_embedding(model, &lf.framework)?;
        }
    } else {
        let results: Vec<Result<Vec<(usize, Vec<f64>)>, gcn::GcnError>> =
            std::thread::scope(|scope| {
                let chunk = dataset.len().div_ceil(threads);
                let handles: Vec<_> = (0..threads)
                    .map(|t| {
                        let start = t * chunk;
                        let end = ((t + 1) * chunk).min(dataset.len());
                        scope.spawn(move || {
                            let mut out = Vec::with_capacity(end.saturating_sub(start));
                            for i in start..end.max(start) {
                                out.push((i, gcn::extract_embedding(model, &dataset[i].framework)?));
                            }
                            Ok(out)
                        })
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().unwrap()).collect()
            });
        for result in results {
            for (i, row) in result? {
                rows[i] = row;
            }
        }
    }
    let mut m = Matrix::zeros(dataset.len(), width);
    for (i, row) in rows.iter().enumerate() {
        m.row_mut(i).copy_from_slice(row);
    }
    Ok(m)
}

/// HOPE feature CSV: header `id,f0,...,f{2d-1}`, one row per argument.
pub fn hope_features_csv(lf: &LabeledFramework, emb: &HopeEmbedding) -> String {
    let features = node_feature_matrix(emb);
    let mut out = String::from("id");
    for c in 0..features.cols() {
        let _ = write!(out, ",f{c}");
    }
    out.push('\n');
    for i in 0..features.rows() {
        let _ = write!(out, "{}", lf.framework.argument_name(i));
        for c in 0..features.cols() {
            let _ = write!(out, ",{}", crate::viz::fmt_sig9(features[(i, c)]));
        }
        out.push('\n');
    }
    out
}

/// Loads a graph-level dataset directory: one subdirectory per domain label
/// containing `.apx`/`.tgf` files; the label is the directory name.
pub fn load_dataset_dir(path: &Path) -> Result<Vec<LabeledFramework>, PipelineError> {
    let mut dataset = Vec::new();
    let mut domains: Vec<_> = fs::read_dir(path)?
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|e| e.path().is_dir())
        .collect();
    domains.sort_by_key(|e| e.file_name());
    for domain in domains {
        let label = domain.file_name().to_string_lossy().to_string();
        let mut files: Vec<_> = fs::read_dir(domain.path())?
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .map(|e| e.path())
            .filter(|p| {
                matches!(
                    p.extension().and_then(|e| e.to_str()),
                    Some("apx") | Some("tgf")
                )
            })
            .collect();
        files.sort();
        for file in files {
            let text = fs::read_to_string(&file)?;
            let af = match file.extension().and_then(|e| e.to_str()) {
                Some("apx") => graph_core::parse_apx(&text)?,
                _ => graph_core::parse_tgf(&text)?,
            };
            dataset.push(LabeledFramework::new(af, Some(label.clone()), None)?);
        }
    }
    if dataset.is_empty() {
        return Err(PipelineError::Dataset(format!(
            "no .apx/.tgf files found under {}",
            path.display()
        )));
    }
    Ok(dataset)
}

/// The synthetic domains that can be generated locally (AdmBuster excluded:
/// its structure is only in the original benchmark note).
pub const SYNTHETIC_DOMAINS: [&str; 6] = ["BA", "ER", "WS", "grd", "scc", "sembuster"];

/// Builds a balanced synthetic dataset: `per_domain` graphs per domain with
/// sizes in [n_min, n_max], every graph seeded from the global seed and its
/// position.
pub fn synthetic_domain_dataset(
    domains: &[&str],
    per_domain: usize,
    n_min: usize,
    n_max: usize,
    seed: u64,
) -> Result<Vec<LabeledFramework>, PipelineError> {
    use rand::Rng;
    use rand::SeedableRng;
    if n_min < 9 || n_max < n_min {
        return Err(PipelineError::Config(format!(
            "size range [{n_min}, {n_max}] must satisfy 9 <= n_min <= n_max"
        )));
    }
    let mut dataset = Vec::with_capacity(domains.len() * per_domain);
    for &domain in domains {
        for g in 0..per_domain {
            let graph_seed = stage_seed(seed, &format!("dataset-{domain}-{g}"));
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(graph_seed);
            let n = rng.gen_range(n_min..=n_max);
            let spec = match domain {
                "sembuster" => GeneratorSpec::Sembuster { k: (n / 3).max(3) },
                "admbuster" => GeneratorSpec::Admbuster { k: n },
                "BA" => GeneratorSpec::BarabasiAlbert {
                    n,
                    m: 2,
                    seed: graph_seed,
                },
                "ER" => GeneratorSpec::ErdosRenyi {
                    n,
                    p: rng.gen_range(0.10..0.15),
                    seed: graph_seed,
                },
                "WS" => GeneratorSpec::WattsStrogatz {
                    n,
                    k_ring: 8,
                    beta: rng.gen_range(0.1..0.2),
                    seed: graph_seed,
                },
                "grd" => GeneratorSpec::Grounded {
                    n,
                    depth: rng.gen_range(3..=7).min(n),
                    seed: graph_seed,
                },
                "scc" => {
                    let n_components = rng.gen_range(4..=5);
                    GeneratorSpec::Scc {
                        n_components,
                        component_size: (n / n_components).max(2),
                        p_intra: rng.gen_range(0.25..0.35),
                        p_inter: rng.gen_range(0.01..0.03),
                        seed: graph_seed,
                    }
                }
                other => {
                    return Err(PipelineError::Config(format!("unknown domain {other:?}")))
                }
            };
            let mut lf = spec.generate()?;
            lf.graph_label = Some(domain.to_string());
            dataset.push(lf);
        }
    }
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_sembuster;

    #[test]
    fn stage_seeds_differ_by_stage_and_seed() {
        let a = stage_seed(42, "hope");
        let b = stage_seed(42, "tsne");
        let c = stage_seed(43, "hope");
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, stage_seed(42, "hope"));
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(PipelineConfig::from_json("{\"bogus\": 1}").is_err());
        let cfg = PipelineConfig::from_json("{\"perplexity\": 12.5}").unwrap();
        assert_eq!(cfg.perplexity, 12.5);
        assert_eq!(cfg.hope_dimensions, 64);
    }

    #[test]
    fn node_pipeline_small_sembuster() {
        let lf = gen_sembuster(10).unwrap();
        let cfg = PipelineConfig {
            hope_dimensions: 8,
            perplexity: 5.0,
            tsne_iterations: 300,
            ..PipelineConfig::default()
        };
        let out = run_node_pipeline(&lf, &cfg).unwrap();
        assert_eq!(out.layout.y.rows(), 30);
        assert_eq!(out.svg.matches("<circle").count(), 30);
        assert_eq!(out.layout_csv.lines().count(), 31);
        assert!(out.report.metrics.contains_key("knn_label_agreement"));
        assert!(out.report.metrics.contains_key("silhouette"));
    }

    #[test]
    fn node_pipeline_deterministic() {
        let lf = gen_sembuster(8).unwrap();
        let cfg = PipelineConfig {
            hope_dimensions: 6,
            perplexity: 4.0,
            tsne_iterations: 260,
            ..PipelineConfig::default()
        };
        let a = run_node_pipeline(&lf, &cfg).unwrap();
        let b = run_node_pipeline(&lf, &cfg).unwrap();
        assert_eq!(a.svg, b.svg);
        assert_eq!(a.layout_csv, b.layout_csv);
    }

    #[test]
    fn node_pipeline_without_labels_single_colour() {
        let lf = LabeledFramework::unlabeled(
            crate::generators::gen_erdos_renyi(25, 0.15, 3).unwrap().framework,
        );
        let cfg = PipelineConfig {
            hope_dimensions: 4,
            perplexity: 8.0,
            tsne_iterations: 260,
            ..PipelineConfig::default()
        };
        let out = run_node_pipeline(&lf, &cfg).unwrap();
        assert!(!out.report.metrics.contains_key("knn_label_agreement"));
        assert!(out.labels.iter().all(|l| l == "node"));
    }

    #[test]
    fn graph_pipeline_small_end_to_end() {
        let dataset =
            synthetic_domain_dataset(&["ER", "scc", "grd"], 8, 12, 24, 5).unwrap();
        let cfg = PipelineConfig {
            perplexity: 6.0,
            tsne_iterations: 300,
            gcn_hidden: 8,
            gcn_embedding: 8,
            gcn_fc_hidden: 8,
            gcn_max_epochs: 10,
            ..PipelineConfig::default()
        };
        let out = run_graph_pipeline(&dataset, &cfg, None).unwrap();
        assert_eq!(out.embeddings.rows(), 24);
        assert!(out.report.metrics.contains_key("validation_accuracy"));
        assert!(out.report.metrics.contains_key("knn_label_agreement"));
        // Rerun from the trained model: identical layout without training.
        let again = run_graph_pipeline(&dataset, &cfg, Some(out.model.clone())).unwrap();
        assert!(again.train_report.is_none());
        assert_eq!(out.layout_csv, again.layout_csv);
        assert_eq!(out.svg, again.svg);
    }

    #[test]
    fn graph_pipeline_rejects_single_domain() {
        let dataset = synthetic_domain_dataset(&["ER"], 5, 12, 20, 1).unwrap();
        let cfg = PipelineConfig::default();
        assert!(matches!(
            run_graph_pipeline(&dataset, &cfg, None),
            Err(PipelineError::Dataset(_))
        ));
    }

    #[test]
    fn dataset_dir_round_trip() {
        let dir = std::env::temp_dir().join(format!("argviz-test-{}", std::process::id()));
        for domain in ["alpha", "beta"] {
            fs::create_dir_all(dir.join(domain)).unwrap();
        }
        let a = gen_sembuster(3).unwrap();
        fs::write(
            dir.join("alpha/one.apx"),
            graph_core::serialize_apx(&a.framework),
        )
        .unwrap();
        fs::write(
            dir.join("beta/two.tgf"),
            graph_core::serialize_tgf(&a.framework),
        )
        .unwrap();
        let dataset = load_dataset_dir(&dir).unwrap();
        assert_eq!(dataset.len(), 2);
        assert_eq!(dataset[0].graph_label.as_deref(), Some("alpha"));
        assert_eq!(dataset[1].graph_label.as_deref(), Some("beta"));
        assert_eq!(dataset[0].framework, dataset[1].framework);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn synthetic_dataset_is_balanced_and_deterministic() {
        let a = synthetic_domain_dataset(&SYNTHETIC_DOMAINS, 3, 30, 60, 42).unwrap();
        let b = synthetic_domain_dataset(&SYNTHETIC_DOMAINS, 3, 30, 60, 42).unwrap();
        assert_eq!(a.len(), 18);
        assert_eq!(a, b);
        for lf in &a {
            let n = lf.framework.argument_count();
            assert!(n >= 9 && n <= 66, "n = {n}");
        }
    }
}
