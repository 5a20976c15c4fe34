//! Exact O(n²) t-SNE: perplexity-calibrated Gaussian input affinities,
//! Student-t output affinities, KL gradient descent with momentum and early
//! exaggeration. No Barnes-Hut approximation; every quantity is checkable
//! against finite differences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::numerics::Matrix;

#[derive(Debug, Error)]
pub enum TsneError {
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("perplexity {perplexity} must satisfy 1 < perplexity < n (n = {n})")]
    PerplexityOutOfRange { perplexity: f64, n: usize },
    #[error("degenerate input: all points identical")]
    DegenerateInput,
    #[error("optimization diverged (NaN) at iteration {iteration}")]
    Diverged { iteration: usize },
    #[error("iterations ({iterations}) must cover the exaggeration phase ({exaggeration_iters})")]
    TooFewIterations { iterations: usize, exaggeration_iters: usize },
}

#[derive(Debug, Clone)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub output_dims: usize,
    pub iterations: usize,
    /// Defaults to max(n/12, 50) when None.
    pub learning_rate: Option<f64>,
    pub momentum_early: f64,
    pub momentum_late: f64,
    pub momentum_switch: usize,
    pub exaggeration_factor: f64,
    pub exaggeration_iters: usize,
    pub seed: u64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        TsneConfig {
            perplexity: 30.0,
            output_dims: 2,
            iterations: 1000,
            learning_rate: None,
            momentum_early: 0.5,
            momentum_late: 0.8,
            momentum_switch: 250,
            exaggeration_factor: 12.0,
            exaggeration_iters: 250,
            seed: 0,
        }
    }
}

/// Final layout plus the KL trace (recorded every 10 iterations and at the end).
#[derive(Debug, Clone)]
pub struct Layout2D {
    pub y: Matrix,
    pub final_kl: f64,
    pub kl_history: Vec<(usize, f64)>,
}

const KL_FLOOR: f64 = 1e-12;
const PERPLEXITY_TOL: f64 = 1e-5;
const MAX_BISECTIONS: usize = 64;

fn squared_distances(x: &Matrix) -> Matrix {
    let n = x.rows();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let dist: f64 = x
                .row(i)
                .iter()
                .zip(x.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d[(i, j)] = dist;
            d[(j, i)] = dist;
        }
    }
    d
}

/// Row i of the result holds p_{j|i}; σᵢ is found by bisection so that the
/// row's perplexity 2^H matches the target within 1e-5.
pub fn conditional_affinities(
    x: &Matrix,
    perplexity: f64,
) -> Result<(Matrix, Vec<f64>), TsneError> {
    let n = x.rows();
    if n < 3 {
        return Err(TsneError::TooFewPoints(n));
    }
    if perplexity <= 1.0 || perplexity >= n as f64 {
        return Err(TsneError::PerplexityOutOfRange { perplexity, n });
    }
    let d2 = squared_distances(x);
    if d2.data().iter().all(|&v| v == 0.0) {
        return Err(TsneError::DegenerateInput);
    }

    let mut p = Matrix::zeros(n, n);
    let mut sigmas = vec![0.0; n];
    for i in 0..n {
        // precision = 1 / (2σ²); higher precision → lower perplexity
        let mut precision = 1.0;
        let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
        // Bracket expansion, then bisection.
        for _ in 0..MAX_BISECTIONS {
            let achieved = row_affinities(&d2, i, precision, p.row_mut(i));
            if (achieved - perplexity).abs() <= PERPLEXITY_TOL {
                break;
            }
            if achieved > perplexity {
                lo = precision;
                precision = if hi.is_finite() { (lo + hi) / 2.0 } else { precision * 2.0 };
            } else {
                hi = precision;
                precision = if lo > 0.0 { (lo + hi) / 2.0 } else { precision / 2.0 };
            }
        }
        row_affinities(&d2, i, precision, p.row_mut(i));
        sigmas[i] = (0.5 / precision).sqrt();
    }
    Ok((p, sigmas))
}

/// Fills `row` with p_{j|i} for the given precision and returns the achieved
/// perplexity 2^H.
fn row_affinities(d2: &Matrix, i: usize, precision: f64, row: &mut [f64]) -> f64 {
    let n = row.len();
    // Shift exponents by the row minimum for stability.
    let min_d2 = (0..n)
        .filter(|&j| j != i)
        .map(|j| d2[(i, j)])
        .fold(f64::INFINITY, f64::min);
    let mut sum = 0.0;
    for j in 0..n {
        if j == i {
            row[j] = 0.0;
            continue;
        }
        let w = (-(d2[(i, j)] - min_d2) * precision).exp();
        row[j] = w;
        sum += w;
    }
    let mut entropy_bits = 0.0;
    for j in 0..n {
        if j == i {
            continue;
        }
        row[j] /= sum;
        if row[j] > 0.0 {
            entropy_bits -= row[j] * row[j].log2();
        }
    }
    entropy_bits.exp2()
}

/// Symmetrized joint affinities p_ij = (p_{j|i} + p_{i|j}) / 2n; the result
/// is symmetric with zero diagonal and sums to 1.
pub fn symmetrize(p_conditional: &Matrix) -> Matrix {
    let n = p_conditional.rows();
    let mut p = Matrix::zeros(n, n);
    let scale = 1.0 / (2.0 * n as f64);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                p[(i, j)] = (p_conditional[(i, j)] + p_conditional[(j, i)]) * scale;
            }
        }
    }
    p
}

/// Student-t output affinities q_ij = (1+‖yᵢ−yⱼ‖²)⁻¹ / Z and the
/// normalizer Z.
pub fn student_t_affinities(y: &Matrix) -> (Matrix, f64) {
    let n = y.rows();
    let d2 = squared_distances(y);
    let mut q = Matrix::zeros(n, n);
    let mut z = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let w = 1.0 / (1.0 + d2[(i, j)]);
                q[(i, j)] = w;
                z += w;
            }
        }
    }
    for v in 0..n {
        for w in 0..n {
            q[(v, w)] /= z;
        }
    }
    (q, z)
}

/// KL gradient: grad_i = 4 Σ_j (p_ij − q_ij)(1+‖yᵢ−yⱼ‖²)⁻¹ (yᵢ − yⱼ).
pub fn tsne_gradient(p: &Matrix, y: &Matrix) -> Matrix {
    let n = y.rows();
    let dims = y.cols();
    let (q, _z) = student_t_affinities(y);
    let d2 = squared_distances(y);
    let mut grad = Matrix::zeros(n, dims);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let coeff = 4.0 * (p[(i, j)] - q[(i, j)]) / (1.0 + d2[(i, j)]);
            for c in 0..dims {
                grad[(i, c)] += coeff * (y[(i, c)] - y[(j, c)]);
            }
        }
    }
    grad
}

/// KL(P ‖ Q) with both sides floored at 1e-12 inside the log.
pub fn kl_divergence(p: &Matrix, y: &Matrix) -> f64 {
    let (q, _) = student_t_affinities(y);
    let n = p.rows();
    let mut kl = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let pij = p[(i, j)];
            if pij > 0.0 {
                kl += pij * (pij.max(KL_FLOOR) / q[(i, j)].max(KL_FLOOR)).ln();
            }
        }
    }
    kl
}

/// Full t-SNE run: affinity calibration, seeded Gaussian init (std 1e-4),
/// momentum gradient descent with early exaggeration.
pub fn tsne_embed(x: &Matrix, config: &TsneConfig) -> Result<Layout2D, TsneError> {
    let n = x.rows();
    if n < 2 {
        return Err(TsneError::TooFewPoints(n));
    }
    if config.iterations < config.exaggeration_iters {
        return Err(TsneError::TooFewIterations {
            iterations: config.iterations,
            exaggeration_iters: config.exaggeration_iters,
        });
    }
    let p = if n == 2 {
        // Forced: the only neighbour takes the whole conditional mass.
        let mut p = Matrix::zeros(2, 2);
        p[(0, 1)] = 0.5;
        p[(1, 0)] = 0.5;
        p
    } else {
        let (p_cond, _sigmas) = conditional_affinities(x, config.perplexity)?;
        symmetrize(&p_cond)
    };

    let lr = config
        .learning_rate
        .unwrap_or_else(|| (n as f64 / 12.0).max(50.0));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let dims = config.output_dims;
    let mut y = Matrix::zeros(n, dims);
    for i in 0..n {
        for c in 0..dims {
            y[(i, c)] = 1e-4 * gaussian(&mut rng);
        }
    }

    let mut velocity = Matrix::zeros(n, dims);
    let mut kl_history = Vec::new();
    for iter in 0..config.iterations {
        let p_run = if iter < config.exaggeration_iters {
            p.scale(config.exaggeration_factor)
        } else {
            p.clone()
        };
        let grad = tsne_gradient(&p_run, &y);
        let momentum = if iter < config.momentum_switch {
            config.momentum_early
        } else {
            config.momentum_late
        };
        for i in 0..n {
            for c in 0..dims {
                velocity[(i, c)] = momentum * velocity[(i, c)] - lr * grad[(i, c)];
                y[(i, c)] += velocity[(i, c)];
            }
        }
        if y.data().iter().any(|v| !v.is_finite()) {
            return Err(TsneError::Diverged { iteration: iter });
        }
        if (iter + 1) % 10 == 0 {
            kl_history.push((iter + 1, kl_divergence(&p, &y)));
        }
    }
    let final_kl = kl_divergence(&p, &y);
    if kl_history.last().map(|&(it, _)| it) != Some(config.iterations) {
        kl_history.push((config.iterations, final_kl));
    }
    Ok(Layout2D { y, final_kl, kl_history })
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
