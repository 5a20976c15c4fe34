//! Graph convolutional network for graph-level domain classification:
//! 4 convolutional layers over a symmetrized normalized adjacency, mean
//! pooling, 2 fully connected layers. Forward, reverse-mode backward and the
//! Adam training loop are implemented here; the pooled output of the last
//! convolutional layer doubles as the graph embedding.

use std::io::{Read, Write};

use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph_core::{ArgumentationFramework, LabeledFramework};
use crate::numerics::{adam_step, AdamState, Matrix, NumericsError};

#[derive(Debug, Error)]
pub enum GcnError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("stale cache: cached graph has {cached} arguments / {cached_attacks} attacks, input has {actual} / {actual_attacks}")]
    StaleCache {
        cached: usize,
        cached_attacks: usize,
        actual: usize,
        actual_attacks: usize,
    },
    #[error("dataset needs at least 2 distinct classes, found {0}")]
    SingleClass(usize),
    #[error("graph without a graph_label in the training dataset")]
    UnlabeledGraph,
    #[error("class {0:?} has no graphs")]
    EmptyClass(String),
    #[error("checkpoint format error: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub const INPUT_FEATURES: usize = 4;
const CONV_LAYERS: usize = 4;

/// Structural per-node input features: [1, in_degree/n, out_degree/n,
/// self_attack_flag].
pub fn node_features(af: &ArgumentationFramework) -> Matrix {
    let n = af.argument_count();
    let mut x = Matrix::zeros(n, INPUT_FEATURES);
    for i in 0..n {
        x[(i, 0)] = 1.0;
        x[(i, 1)] = af.in_degree(i) as f64 / n as f64;
        x[(i, 2)] = af.out_degree(i) as f64 / n as f64;
        x[(i, 3)] = if af.has_attack(i, i) { 1.0 } else { 0.0 };
    }
    x
}

/// D̃^{-1/2} Ã D̃^{-1/2} with Ã = sign(A + Aᵀ) + I.
pub fn normalized_adjacency(af: &ArgumentationFramework) -> Matrix {
    let n = af.argument_count();
    let mut a = Matrix::zeros(n, n);
    for (i, j) in af.attacks() {
        a[(i, j)] = 1.0;
        a[(j, i)] = 1.0;
    }
    for i in 0..n {
        a[(i, i)] = 1.0;
    }
    let inv_sqrt_deg: Vec<f64> = (0..n)
        .map(|i| 1.0 / a.row(i).iter().sum::<f64>().sqrt())
        .collect();
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] *= inv_sqrt_deg[i] * inv_sqrt_deg[j];
        }
    }
    a
}

#[derive(Debug, Clone, PartialEq)]
pub struct GcnModel {
    pub conv_weights: Vec<Matrix>,
    pub fc1_weight: Matrix,
    pub fc1_bias: Vec<f64>,
    pub fc2_weight: Matrix,
    pub fc2_bias: Vec<f64>,
    /// Class label per output index.
    pub classes: Vec<String>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct GcnDims {
    pub hidden: usize,
    pub embedding: usize,
    pub fc_hidden: usize,
}

impl Default for GcnDims {
    fn default() -> Self {
        GcnDims { hidden: 64, embedding: 32, fc_hidden: 32 }
    }
}

impl GcnModel {
    /// Seeded Glorot-uniform initialization.
    pub fn init(dims: GcnDims, classes: Vec<String>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let widths = [
            (INPUT_FEATURES, dims.hidden),
            (dims.hidden, dims.hidden),
            (dims.hidden, dims.hidden),
            (dims.hidden, dims.embedding),
        ];
        let conv_weights = widths
            .iter()
            .map(|&(fan_in, fan_out)| glorot(fan_in, fan_out, &mut rng))
            .collect();
        let fc1_weight = glorot(dims.embedding, dims.fc_hidden, &mut rng);
        let fc2_weight = glorot(dims.fc_hidden, classes.len(), &mut rng);
        GcnModel {
            conv_weights,
            fc1_weight,
            fc1_bias: vec![0.0; dims.fc_hidden],
            fc2_weight,
            fc2_bias: vec![0.0; classes.len()],
            classes,
            seed,
        }
    }

    pub fn embedding_width(&self) -> usize {
        self.conv_weights[CONV_LAYERS - 1].cols()
    }
}

fn glorot(fan_in: usize, fan_out: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let data = (0..fan_in * fan_out)
        .map(|_| rng.gen_range(-limit..limit))
        .collect();
    Matrix::from_vec(fan_in, fan_out, data).expect("finite init")
}

/// Intermediates retained by the forward pass for backprop.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    n: usize,
    attack_count: usize,
    a_norm: Matrix,
    /// h[0] = input features, h[l] = ReLU output of conv layer l.
    h: Vec<Matrix>,
    pooled: Vec<f64>,
    z_fc1: Vec<f64>,
    a_fc1: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ForwardPass {
    pub logits: Vec<f64>,
    pub embedding: Vec<f64>,
    pub cache: ForwardCache,
}

pub fn gcn_forward(model: &GcnModel, af: &ArgumentationFramework) -> Result<ForwardPass, GcnError> {
    let x = node_features(af);
    if model.conv_weights[0].rows() != x.cols() {
        return Err(GcnError::DimensionMismatch(format!(
            "conv layer 0 expects {} input features, got {}",
            model.conv_weights[0].rows(),
            x.cols()
        )));
    }
    let a_norm = normalized_adjacency(af);
    let mut h = vec![x];
    for w in &model.conv_weights {
        let z = a_norm.matmul(h.last().unwrap())?.matmul(w)?;
        let mut activated = z;
        for v in 0..activated.rows() {
            for c in 0..activated.cols() {
                if activated[(v, c)] < 0.0 {
                    activated[(v, c)] = 0.0;
                }
            }
        }
        h.push(activated);
    }

    let n = af.argument_count();
    let last = h.last().unwrap();
    let mut pooled = vec![0.0; last.cols()];
    for i in 0..n {
        for (c, p) in pooled.iter_mut().enumerate() {
            *p += last[(i, c)];
        }
    }
    for p in pooled.iter_mut() {
        *p /= n as f64;
    }

    let z_fc1 = affine(&pooled, &model.fc1_weight, &model.fc1_bias);
    let a_fc1: Vec<f64> = z_fc1.iter().map(|&v| v.max(0.0)).collect();
    let logits = affine(&a_fc1, &model.fc2_weight, &model.fc2_bias);

    Ok(ForwardPass {
        logits,
        embedding: pooled.clone(),
        cache: ForwardCache {
            n,
            attack_count: af.attack_count(),
            a_norm,
            h,
            pooled,
            z_fc1,
            a_fc1,
        },
    })
}

/// Mean-pooled last-conv activations, with no FC layers applied.
pub fn extract_embedding(model: &GcnModel, af: &ArgumentationFramework) -> Result<Vec<f64>, GcnError> {
    Ok(gcn_forward(model, af)?.embedding)
}

fn affine(x: &[f64], w: &Matrix, b: &[f64]) -> Vec<f64> {
    let mut out = b.to_vec();
    for (i, &xi) in x.iter().enumerate() {
        for (j, o) in out.iter_mut().enumerate() {
            *o += xi * w[(i, j)];
        }
    }
    out
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|v| v / sum).collect()
}

pub fn cross_entropy(logits: &[f64], target: usize) -> f64 {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let log_sum: f64 = logits.iter().map(|&v| (v - max).exp()).sum::<f64>().ln() + max;
    log_sum - logits[target]
}

/// Gradients for every parameter block, same shapes as the model.
#[derive(Debug, Clone)]
pub struct GcnGradients {
    pub conv_weights: Vec<Matrix>,
    pub fc1_weight: Matrix,
    pub fc1_bias: Vec<f64>,
    pub fc2_weight: Matrix,
    pub fc2_bias: Vec<f64>,
}

/// Exact reverse-mode gradients of cross-entropy(softmax(logits), target).
pub fn gcn_backward(
    model: &GcnModel,
    af: &ArgumentationFramework,
    target_class: usize,
    cache: &ForwardCache,
) -> Result<GcnGradients, GcnError> {
    if cache.n != af.argument_count() || cache.attack_count != af.attack_count() {
        return Err(GcnError::StaleCache {
            cached: cache.n,
            cached_attacks: cache.attack_count,
            actual: af.argument_count(),
            actual_attacks: af.attack_count(),
        });
    }
    let logits = affine(&cache.a_fc1, &model.fc2_weight, &model.fc2_bias);
    let mut d_logits = softmax(&logits);
    d_logits[target_class] -= 1.0;

    // FC2: logits = a_fc1 · W2 + b2
    let fc_hidden = cache.a_fc1.len();
    let classes = d_logits.len();
    let mut d_fc2_w = Matrix::zeros(fc_hidden, classes);
    for i in 0..fc_hidden {
        for j in 0..classes {
            d_fc2_w[(i, j)] = cache.a_fc1[i] * d_logits[j];
        }
    }
    let d_fc2_b = d_logits.clone();
    let mut d_a_fc1 = vec![0.0; fc_hidden];
    for i in 0..fc_hidden {
        for j in 0..classes {
            d_a_fc1[i] += model.fc2_weight[(i, j)] * d_logits[j];
        }
    }

    // FC1 with ReLU.
    let d_z_fc1: Vec<f64> = d_a_fc1
        .iter()
        .zip(&cache.z_fc1)
        .map(|(&g, &z)| if z > 0.0 { g } else { 0.0 })
        .collect();
    let emb_width = cache.pooled.len();
    let mut d_fc1_w = Matrix::zeros(emb_width, fc_hidden);
    for i in 0..emb_width {
        for j in 0..fc_hidden {
            d_fc1_w[(i, j)] = cache.pooled[i] * d_z_fc1[j];
        }
    }
    let d_fc1_b = d_z_fc1.clone();
    let mut d_pooled = vec![0.0; emb_width];
    for i in 0..emb_width {
        for j in 0..fc_hidden {
            d_pooled[i] += model.fc1_weight[(i, j)] * d_z_fc1[j];
        }
    }

    // Mean pooling spreads the gradient evenly over nodes.
    let n = cache.n as f64;
    let mut d_h = Matrix::zeros(cache.n, emb_width);
    for i in 0..cache.n {
        for (c, &g) in d_pooled.iter().enumerate() {
            d_h[(i, c)] = g / n;
        }
    }

    // Conv layers in reverse: H_{l+1} = ReLU(Â H_l W_l).
    let mut d_conv = vec![Matrix::zeros(0, 0); CONV_LAYERS];
    for layer in (0..CONV_LAYERS).rev() {
        let h_out = &cache.h[layer + 1];
        let mut d_z = d_h;
        for i in 0..d_z.rows() {
            for c in 0..d_z.cols() {
                if h_out[(i, c)] <= 0.0 {
                    d_z[(i, c)] = 0.0;
                }
            }
        }
        let propagated = cache.a_norm.matmul(&cache.h[layer])?; // Â H_l
        d_conv[layer] = propagated.transpose().matmul(&d_z)?;
        d_h = cache
            .a_norm
            .transpose()
            .matmul(&d_z)?
            .matmul(&model.conv_weights[layer].transpose())?;
    }

    Ok(GcnGradients {
        conv_weights: d_conv,
        fc1_weight: d_fc1_w,
        fc1_bias: d_fc1_b,
        fc2_weight: d_fc2_w,
        fc2_bias: d_fc2_b,
    })
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub dims: GcnDims,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub max_epochs: usize,
    pub patience: usize,
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dims: GcnDims::default(),
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            max_epochs: 200,
            patience: 20,
            validation_fraction: 0.2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub loss_history: Vec<f64>,
    pub train_accuracy: Vec<f64>,
    pub val_accuracy: Vec<f64>,
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub best_val_accuracy: f64,
    pub seed: u64,
}

struct AdamBlocks {
    conv: Vec<AdamState>,
    fc1_w: AdamState,
    fc1_b: AdamState,
    fc2_w: AdamState,
    fc2_b: AdamState,
}

/// Trains on labeled frameworks with a seeded stratified 80/20 split, one
/// graph per Adam step, early stopping on validation accuracy. Returns the
/// best-validation model.
pub fn train(
    dataset: &[LabeledFramework],
    config: &TrainConfig,
) -> Result<(GcnModel, TrainReport), GcnError> {
    let mut classes: Vec<String> = Vec::new();
    let mut targets = Vec::with_capacity(dataset.len());
    for lf in dataset {
        let label = lf.graph_label.as_ref().ok_or(GcnError::UnlabeledGraph)?;
        if !classes.contains(label) {
            classes.push(label.clone());
        }
        targets.push(label.clone());
    }
    classes.sort();
    if classes.len() < 2 {
        return Err(GcnError::SingleClass(classes.len()));
    }
    let targets: Vec<usize> = targets
        .iter()
        .map(|l| classes.iter().position(|c| c == l).unwrap())
        .collect();

    // Stratified split, shuffled per class with the training seed.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut train_idx = Vec::new();
    let mut val_idx = Vec::new();
    for class in 0..classes.len() {
        let mut members: Vec<usize> =
            (0..dataset.len()).filter(|&i| targets[i] == class).collect();
        if members.is_empty() {
            return Err(GcnError::EmptyClass(classes[class].clone()));
        }
        members.shuffle(&mut rng);
        let n_val = ((members.len() as f64) * config.validation_fraction).round() as usize;
        let n_val = n_val.min(members.len() - 1);
        val_idx.extend_from_slice(&members[..n_val]);
        train_idx.extend_from_slice(&members[n_val..]);
    }

    let mut model = GcnModel::init(config.dims, classes, config.seed);
    let mut adam = AdamBlocks {
        conv: model
            .conv_weights
            .iter()
            .map(|w| AdamState::new(w.data().len()))
            .collect(),
        fc1_w: AdamState::new(model.fc1_weight.data().len()),
        fc1_b: AdamState::new(model.fc1_bias.len()),
        fc2_w: AdamState::new(model.fc2_weight.data().len()),
        fc2_b: AdamState::new(model.fc2_bias.len()),
    };

    let mut report = TrainReport {
        loss_history: Vec::new(),
        train_accuracy: Vec::new(),
        val_accuracy: Vec::new(),
        epochs_run: 0,
        best_epoch: 0,
        best_val_accuracy: -1.0,
        seed: config.seed,
    };
    let mut best_model = model.clone();
    let mut epochs_without_improvement = 0;

    for epoch in 0..config.max_epochs {
        let mut order = train_idx.clone();
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for &i in &order {
            let af = &dataset[i].framework;
            let pass = gcn_forward(&model, af)?;
            loss_sum += cross_entropy(&pass.logits, targets[i]);
            let grads = gcn_backward(&model, af, targets[i], &pass.cache)?;
            apply_adam(&mut model, &grads, &mut adam, config)?;
        }
        let train_acc = accuracy(&model, dataset, &targets, &train_idx)?;
        let val_acc = accuracy(&model, dataset, &targets, &val_idx)?;
        report.loss_history.push(loss_sum / order.len() as f64);
        report.train_accuracy.push(train_acc);
        report.val_accuracy.push(val_acc);
        report.epochs_run = epoch + 1;

        if val_acc > report.best_val_accuracy {
            report.best_val_accuracy = val_acc;
            report.best_epoch = epoch;
            best_model = model.clone();
            epochs_without_improvement = 0;
        } else {
            epochs_without_improvement += 1;
            if epochs_without_improvement >= config.patience {
                break;
            }
        }
    }
    Ok((best_model, report))
}

fn apply_adam(
    model: &mut GcnModel,
    grads: &GcnGradients,
    adam: &mut AdamBlocks,
    config: &TrainConfig,
) -> Result<(), GcnError> {
    let step = |p: &mut [f64], g: &[f64], st: &mut AdamState| {
        adam_step(p, g, st, config.learning_rate, config.beta1, config.beta2, config.eps)
    };
    for (layer, w) in model.conv_weights.iter_mut().enumerate() {
        let rows = w.rows();
        let cols = w.cols();
        let mut data = w.data().to_vec();
        step(&mut data, grads.conv_weights[layer].data(), &mut adam.conv[layer])?;
        *w = Matrix::from_vec(rows, cols, data)?;
    }
    let mut data = model.fc1_weight.data().to_vec();
    step(&mut data, grads.fc1_weight.data(), &mut adam.fc1_w)?;
    model.fc1_weight = Matrix::from_vec(
        grads.fc1_weight.rows(),
        grads.fc1_weight.cols(),
        data,
    )?;
    step(&mut model.fc1_bias, &grads.fc1_bias, &mut adam.fc1_b)?;
    let mut data = model.fc2_weight.data().to_vec();
    step(&mut data, grads.fc2_weight.data(), &mut adam.fc2_w)?;
    model.fc2_weight = Matrix::from_vec(
        grads.fc2_weight.rows(),
        grads.fc2_weight.cols(),
        data,
    )?;
    step(&mut model.fc2_bias, &grads.fc2_bias, &mut adam.fc2_b)?;
    Ok(())
}

fn accuracy(
    model: &GcnModel,
    dataset: &[LabeledFramework],
    targets: &[usize],
    indices: &[usize],
) -> Result<f64, GcnError> {
    if indices.is_empty() {
        return Ok(0.0);
    }
    let mut correct = 0;
    for &i in indices {
        let pass = gcn_forward(model, &dataset[i].framework)?;
        let predicted = argmax(&pass.logits);
        if predicted == targets[i] {
            correct += 1;
        }
    }
    Ok(correct as f64 / indices.len() as f64)
}

pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

const CHECKPOINT_MAGIC: &[u8; 4] = b"AGCN";
const CHECKPOINT_VERSION: u32 = 1;

/// Binary checkpoint: all dimensions, weights as little-endian f64 bits and
/// the training seed. Round-trips bit-exactly.
pub fn save_checkpoint(model: &GcnModel, w: &mut impl Write) -> Result<(), GcnError> {
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    w.write_all(&model.seed.to_le_bytes())?;
    w.write_all(&(model.classes.len() as u32).to_le_bytes())?;
    for class in &model.classes {
        let bytes = class.as_bytes();
        w.write_all(&(bytes.len() as u32).to_le_bytes())?;
        w.write_all(bytes)?;
    }
    w.write_all(&(model.conv_weights.len() as u32).to_le_bytes())?;
    for m in &model.conv_weights {
        write_matrix(w, m)?;
    }
    write_matrix(w, &model.fc1_weight)?;
    write_floats(w, &model.fc1_bias)?;
    write_matrix(w, &model.fc2_weight)?;
    write_floats(w, &model.fc2_bias)?;
    Ok(())
}

pub fn load_checkpoint(r: &mut impl Read) -> Result<GcnModel, GcnError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(GcnError::Checkpoint("bad magic".into()));
    }
    let version = read_u32(r)?;
    if version != CHECKPOINT_VERSION {
        return Err(GcnError::Checkpoint(format!("unsupported version {version}")));
    }
    let seed = read_u64(r)?;
    let class_count = read_u32(r)? as usize;
    let mut classes = Vec::with_capacity(class_count);
    for _ in 0..class_count {
        let len = read_u32(r)? as usize;
        let mut buf = vec![0u8; len];
        r.read_exact(&mut buf)?;
        classes.push(
            String::from_utf8(buf).map_err(|e| GcnError::Checkpoint(e.to_string()))?,
        );
    }
    let conv_count = read_u32(r)? as usize;
    let mut conv_weights = Vec::with_capacity(conv_count);
    for _ in 0..conv_count {
        conv_weights.push(read_matrix(r)?);
    }
    let fc1_weight = read_matrix(r)?;
    let fc1_bias = read_floats(r)?;
    let fc2_weight = read_matrix(r)?;
    let fc2_bias = read_floats(r)?;
    Ok(GcnModel {
        conv_weights,
        fc1_weight,
        fc1_bias,
        fc2_weight,
        fc2_bias,
        classes,
        seed,
    })
}

fn write_matrix(w: &mut impl Write, m: &Matrix) -> Result<(), GcnError> {
    w.write_all(&(m.rows() as u32).to_le_bytes())?;
    w.write_all(&(m.cols() as u32).to_le_bytes())?;
    for &v in m.data() {
        w.write_all(&v.to_bits().to_le_bytes())?;
    }
    Ok(())
}

fn read_matrix(r: &mut impl Read) -> Result<Matrix, GcnError> {
    let rows = read_u32(r)? as usize;
    let cols = read_u32(r)? as usize;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        data.push(f64::from_bits(read_u64(r)?));
    }
    Matrix::from_vec(rows, cols, data).map_err(GcnError::from)
}

fn write_floats(w: &mut impl Write, v: &[f64]) -> Result<(), GcnError> {
    w.write_all(&(v.len() as u32).to_le_bytes())?;
    for &x in v {
        w.write_all(&x.to_bits().to_le_bytes())?;
    }
    Ok(())
}

fn read_floats(r: &mut impl Read) -> Result<Vec<f64>, GcnError> {
    let len = read_u32(r)? as usize;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(f64::from_bits(read_u64(r)?));
    }
    Ok(out)
}

fn read_u32(r: &mut impl Read) -> Result<u32, GcnError> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64(r: &mut impl Read) -> Result<u64, GcnError> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_erdos_renyi, gen_sembuster};

    fn small_dims() -> GcnDims {
        GcnDims { hidden: 5, embedding: 4, fc_hidden: 3 }
    }

    fn edgeless(n: usize) -> ArgumentationFramework {
        ArgumentationFramework::new((0..n).map(|i| format!("v{i}")).collect(), vec![]).unwrap()
    }

    fn complete(n: usize) -> ArgumentationFramework {
        let mut attacks = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    attacks.push((i, j));
                }
            }
        }
        ArgumentationFramework::new((0..n).map(|i| format!("v{i}")).collect(), attacks).unwrap()
    }

    #[test]
    fn features_edgeless() {
        let x = node_features(&edgeless(3));
        for i in 0..3 {
            assert_eq!(x.row(i), &[1.0, 0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn features_self_attack() {
        let af = ArgumentationFramework::new(vec!["a".into()], vec![(0, 0)]).unwrap();
        let x = node_features(&af);
        assert_eq!(x.row(0), &[1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn features_sembuster_b2() {
        let af = gen_sembuster(2).unwrap().framework;
        let x = node_features(&af); // b2 has index 3
        assert!((x[(3, 2)] - 4.0 / 6.0).abs() < 1e-15);
        assert_eq!(x[(3, 3)], 0.0);
    }

    #[test]
    fn normalized_adjacency_single_node() {
        let a = normalized_adjacency(&edgeless(1));
        assert_eq!(a.data(), &[1.0]);
    }

    #[test]
    fn normalized_adjacency_single_attack() {
        let af = ArgumentationFramework::new(
            vec!["a".into(), "b".into()],
            vec![(0, 1)],
        )
        .unwrap();
        let a = normalized_adjacency(&af);
        for &v in a.data() {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn normalized_adjacency_symmetric_unit_top_eigenpair() {
        let n = 15;
        let af = gen_erdos_renyi(n, 0.2, 3).unwrap().framework;
        let a = normalized_adjacency(&af);
        for i in 0..n {
            for j in 0..n {
                assert!((a[(i, j)] - a[(j, i)]).abs() < 1e-15);
            }
        }
        // Â (D̃^{1/2} 1) = D̃^{1/2} 1 exactly: eigenvalue 1.
        let degrees: Vec<f64> = (0..n)
            .map(|i| {
                1.0 + (0..n)
                    .filter(|&j| j != i && (af.has_attack(i, j) || af.has_attack(j, i)))
                    .count() as f64
            })
            .collect();
        let v: Vec<f64> = degrees.iter().map(|d| d.sqrt()).collect();
        for i in 0..n {
            let av: f64 = (0..n).map(|j| a[(i, j)] * v[j]).sum();
            assert!((av - v[i]).abs() < 1e-12, "row {i}: {av} vs {}", v[i]);
        }
        // Spectrum lies in [-1, 1]: the dominant eigenvalue of I + Â is at
        // most 2 (power iteration on the shifted PSD matrix).
        let mut x = vec![1.0; n];
        x[0] = 2.0; // break symmetry
        let mut lambda = 0.0;
        for _ in 0..200 {
            let mut y = vec![0.0; n];
            for i in 0..n {
                y[i] = x[i] + (0..n).map(|j| a[(i, j)] * x[j]).sum::<f64>();
            }
            lambda = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            for (xi, yi) in x.iter_mut().zip(&y) {
                *xi = yi / lambda;
            }
        }
        assert!(lambda <= 2.0 + 1e-9, "dominant shifted eigenvalue {lambda}");
        assert!((lambda - 2.0).abs() < 1e-6, "top eigenvalue should be 1");
    }

    #[test]
    fn zero_weights_give_uniform_softmax() {
        let mut model = GcnModel::init(small_dims(), vec!["x".into(), "y".into()], 0);
        for w in model.conv_weights.iter_mut() {
            *w = Matrix::zeros(w.rows(), w.cols());
        }
        model.fc1_weight = Matrix::zeros(4, 3);
        model.fc2_weight = Matrix::zeros(3, 2);
        let pass = gcn_forward(&model, &edgeless(4)).unwrap();
        assert!(pass.logits.iter().all(|&v| v == 0.0));
        assert!(pass.embedding.iter().all(|&v| v == 0.0));
        let probs = softmax(&pass.logits);
        assert!(probs.iter().all(|&p| (p - 0.5).abs() < 1e-15));
    }

    fn permuted(af: &ArgumentationFramework, perm: &[usize]) -> ArgumentationFramework {
        // perm[new_index] = old_index
        let names: Vec<String> = perm
            .iter()
            .map(|&old| af.argument_name(old).to_string())
            .collect();
        let mut inverse = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let attacks: Vec<_> = af
            .attacks()
            .map(|(a, t)| (inverse[a], inverse[t]))
            .collect();
        ArgumentationFramework::new(names, attacks).unwrap()
    }

    #[test]
    fn permutation_invariance() {
        let model = GcnModel::init(small_dims(), vec!["x".into(), "y".into(), "z".into()], 5);
        for seed in 0..5 {
            let af = gen_erdos_renyi(9, 0.3, seed).unwrap().framework;
            let mut perm: Vec<usize> = (0..9).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            perm.shuffle(&mut rng);
            let shuffled = permuted(&af, &perm);
            let a = gcn_forward(&model, &af).unwrap();
            let b = gcn_forward(&model, &shuffled).unwrap();
            for (x, y) in a.logits.iter().zip(&b.logits) {
                assert!((x - y).abs() < 1e-10);
            }
            for (x, y) in a.embedding.iter().zip(&b.embedding) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn extract_embedding_matches_forward() {
        let model = GcnModel::init(small_dims(), vec!["x".into(), "y".into()], 2);
        let af = gen_erdos_renyi(8, 0.25, 1).unwrap().framework;
        let pass = gcn_forward(&model, &af).unwrap();
        assert_eq!(extract_embedding(&model, &af).unwrap(), pass.embedding);
    }

    #[test]
    fn backward_rejects_stale_cache() {
        let model = GcnModel::init(small_dims(), vec!["x".into(), "y".into()], 2);
        let af = gen_erdos_renyi(8, 0.25, 1).unwrap().framework;
        let other = gen_erdos_renyi(9, 0.25, 2).unwrap().framework;
        let pass = gcn_forward(&model, &af).unwrap();
        assert!(matches!(
            gcn_backward(&model, &other, 0, &pass.cache),
            Err(GcnError::StaleCache { .. })
        ));
    }

    #[test]
    fn last_layer_bias_gradient_closed_form() {
        let model = GcnModel::init(small_dims(), vec!["p".into(), "q".into(), "r".into()], 7);
        let af = gen_erdos_renyi(6, 0.3, 4).unwrap().framework;
        let pass = gcn_forward(&model, &af).unwrap();
        let target = 1;
        let grads = gcn_backward(&model, &af, target, &pass.cache).unwrap();
        let probs = softmax(&pass.logits);
        for c in 0..3 {
            let expected = probs[c] - if c == target { 1.0 } else { 0.0 };
            assert!((grads.fc2_bias[c] - expected).abs() < 1e-12);
        }
    }

    /// Central finite differences over every parameter block.
    #[test]
    fn backward_matches_finite_differences() {
        let mut model = GcnModel::init(small_dims(), vec!["p".into(), "q".into(), "r".into()], 11);
        let af = gen_erdos_renyi(6, 0.4, 8).unwrap().framework;
        let target = 2;
        let pass = gcn_forward(&model, &af).unwrap();
        let grads = gcn_backward(&model, &af, target, &pass.cache).unwrap();
        let h = 1e-5;

        let loss = |m: &GcnModel| {
            let pass = gcn_forward(m, &af).unwrap();
            cross_entropy(&pass.logits, target)
        };
        let mut check = |analytic: f64, fd: f64, block: &str| {
            let denom = analytic.abs().max(fd.abs()).max(1e-8);
            assert!(
                (analytic - fd).abs() / denom <= 1e-4,
                "{block}: analytic {analytic} vs fd {fd}"
            );
        };

        for layer in 0..CONV_LAYERS {
            for idx in 0..model.conv_weights[layer].data().len() {
                let rows = model.conv_weights[layer].rows();
                let cols = model.conv_weights[layer].cols();
                let orig = model.conv_weights[layer].data()[idx];
                let mut perturb = |delta: f64, model: &mut GcnModel| {
                    let mut data = model.conv_weights[layer].data().to_vec();
                    data[idx] = orig + delta;
                    model.conv_weights[layer] = Matrix::from_vec(rows, cols, data).unwrap();
                };
                perturb(h, &mut model);
                let up = loss(&model);
                perturb(-h, &mut model);
                let down = loss(&model);
                perturb(0.0, &mut model);
                check(
                    grads.conv_weights[layer].data()[idx],
                    (up - down) / (2.0 * h),
                    &format!("conv{layer}[{idx}]"),
                );
            }
        }
        for idx in 0..model.fc1_weight.data().len() {
            let orig = model.fc1_weight.data()[idx];
            let mut data = model.fc1_weight.data().to_vec();
            data[idx] = orig + h;
            model.fc1_weight = Matrix::from_vec(4, 3, data.clone()).unwrap();
            let up = loss(&model);
            data[idx] = orig - h;
            model.fc1_weight = Matrix::from_vec(4, 3, data.clone()).unwrap();
            let down = loss(&model);
            data[idx] = orig;
            model.fc1_weight = Matrix::from_vec(4, 3, data).unwrap();
            check(grads.fc1_weight.data()[idx], (up - down) / (2.0 * h), "fc1_w");
        }
        for idx in 0..model.fc1_bias.len() {
            let orig = model.fc1_bias[idx];
            model.fc1_bias[idx] = orig + h;
            let up = loss(&model);
            model.fc1_bias[idx] = orig - h;
            let down = loss(&model);
            model.fc1_bias[idx] = orig;
            check(grads.fc1_bias[idx], (up - down) / (2.0 * h), "fc1_b");
        }
        for idx in 0..model.fc2_weight.data().len() {
            let orig = model.fc2_weight.data()[idx];
            let mut data = model.fc2_weight.data().to_vec();
            data[idx] = orig + h;
            model.fc2_weight = Matrix::from_vec(3, 3, data.clone()).unwrap();
            let up = loss(&model);
            data[idx] = orig - h;
            model.fc2_weight = Matrix::from_vec(3, 3, data.clone()).unwrap();
            let down = loss(&model);
            data[idx] = orig;
            model.fc2_weight = Matrix::from_vec(3, 3, data).unwrap();
            check(grads.fc2_weight.data()[idx], (up - down) / (2.0 * h), "fc2_w");
        }
        for idx in 0..model.fc2_bias.len() {
            let orig = model.fc2_bias[idx];
            model.fc2_bias[idx] = orig + h;
            let up = loss(&model);
            model.fc2_bias[idx] = orig - h;
            let down = loss(&model);
            model.fc2_bias[idx] = orig;
            check(grads.fc2_bias[idx], (up - down) / (2.0 * h), "fc2_b");
        }
    }

    fn sanity_dataset() -> Vec<LabeledFramework> {
        let mut data = Vec::new();
        for i in 0..20 {
            let mut lf = LabeledFramework::unlabeled(edgeless(6 + i % 5));
            lf.graph_label = Some("edgeless".into());
            data.push(lf);
            let mut lf = LabeledFramework::unlabeled(complete(6 + i % 5));
            lf.graph_label = Some("complete".into());
            data.push(lf);
        }
        data
    }

    #[test]
    fn separable_dataset_reaches_full_validation_accuracy() {
        let config = TrainConfig {
            dims: GcnDims { hidden: 8, embedding: 8, fc_hidden: 8 },
            max_epochs: 50,
            seed: 1,
            ..TrainConfig::default()
        };
        let (_model, report) = train(&sanity_dataset(), &config).unwrap();
        assert!(
            (report.best_val_accuracy - 1.0).abs() < 1e-12,
            "best val acc {}",
            report.best_val_accuracy
        );
        assert!(report.epochs_run <= 50);
    }

    #[test]
    fn initial_loss_near_ln_c() {
        let model = GcnModel::init(
            GcnDims::default(),
            vec!["a".into(), "b".into(), "c".into()],
            3,
        );
        let mut total = 0.0;
        let mut count = 0;
        for seed in 0..12 {
            let af = gen_erdos_renyi(10, 0.2, seed).unwrap().framework;
            let pass = gcn_forward(&model, &af).unwrap();
            total += cross_entropy(&pass.logits, (seed % 3) as usize);
            count += 1;
        }
        let mean = total / count as f64;
        assert!((mean - (3.0f64).ln()).abs() < 0.2, "mean loss {mean}");
    }

    #[test]
    fn training_is_deterministic() {
        let config = TrainConfig {
            dims: GcnDims { hidden: 6, embedding: 4, fc_hidden: 4 },
            max_epochs: 5,
            seed: 9,
            ..TrainConfig::default()
        };
        let data = sanity_dataset();
        let (m1, r1) = train(&data, &config).unwrap();
        let (m2, r2) = train(&data, &config).unwrap();
        assert_eq!(m1, m2);
        assert_eq!(r1.loss_history, r2.loss_history);
        assert_eq!(r1.val_accuracy, r2.val_accuracy);
    }

    #[test]
    fn single_class_rejected() {
        let mut data = Vec::new();
        for _ in 0..4 {
            let mut lf = LabeledFramework::unlabeled(edgeless(5));
            lf.graph_label = Some("only".into());
            data.push(lf);
        }
        assert!(matches!(
            train(&data, &TrainConfig::default()),
            Err(GcnError::SingleClass(1))
        ));
    }

    #[test]
    fn checkpoint_round_trip_bit_exact() {
        let model = GcnModel::init(small_dims(), vec!["x".into(), "y".into()], 17);
        let mut bytes = Vec::new();
        save_checkpoint(&model, &mut bytes).unwrap();
        let loaded = load_checkpoint(&mut bytes.as_slice()).unwrap();
        assert_eq!(model, loaded);
        let mut bytes2 = Vec::new();
        save_checkpoint(&loaded, &mut bytes2).unwrap();
        assert_eq!(bytes, bytes2);
    }

    #[test]
    fn checkpoint_rejects_garbage() {
        assert!(load_checkpoint(&mut &b"nope"[..]).is_err());
        assert!(load_checkpoint(&mut &b"AGCN\xff\xff\xff\xff"[..]).is_err());
    }
}
