//! HOPE node embeddings: the Katz proximity matrix of the attack graph is
//! factorized by truncated SVD into source/target embedding halves, giving a
//! directionality-preserving per-argument representation.

use thiserror::Error;

use crate::graph_core::ArgumentationFramework;
use crate::numerics::{solve, truncated_svd, Matrix, NumericsError};

#[derive(Debug, Error)]
pub enum HopeError {
    #[error("beta={beta} violates convergence: beta * ||A||_inf = {product} must be < 1")]
    BetaTooLarge { beta: f64, product: f64 },
    #[error("beta must be positive, got {0}")]
    BetaNotPositive(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Asymmetric node embedding: row i of `u_source` describes argument i as an
/// attacker, row i of `u_target` as a target.
#[derive(Debug, Clone)]
pub struct HopeEmbedding {
    pub u_source: Matrix,
    pub u_target: Matrix,
    pub singular_values: Vec<f64>,
    pub beta: f64,
    pub d: usize,
}

/// Katz proximity S = (I − βA)⁻¹ βA = Σ_{l≥1} β^l A^l.
/// Computed by one LU solve with n right-hand sides.
pub fn katz_matrix(a: &Matrix, beta: f64) -> Result<Matrix, HopeError> {
    if beta <= 0.0 {
        return Err(HopeError::BetaNotPositive(beta));
    }
    let product = beta * a.infinity_norm();
    if product >= 1.0 {
        return Err(HopeError::BetaTooLarge { beta, product });
    }
    let n = a.rows();
    let beta_a = a.scale(beta);
    let lhs = Matrix::identity(n).sub(&beta_a)?;
    Ok(solve(&lhs, &beta_a)?)
}

/// Decay that always satisfies the Katz convergence precondition.
pub fn default_beta(a: &Matrix) -> f64 {
    0.5 / (1.0 + a.infinity_norm())
}

/// Embeds a framework: S = katz_matrix(A, β), truncated SVD of S, and the
/// halves U√Σ and V√Σ so that U_source·U_targetᵀ ≈ S.
pub fn hope_embed(
    af: &ArgumentationFramework,
    d: usize,
    beta: Option<f64>,
    seed: u64,
) -> Result<HopeEmbedding, HopeError> {
    let a = af.adjacency_matrix();
    let beta = beta.unwrap_or_else(|| default_beta(&a));
    let s = katz_matrix(&a, beta)?;
    let svd = truncated_svd(&s, d, seed)?;

    let mut u_source = svd.u;
    let mut u_target = svd.v;
    for j in 0..d {
        let root = svd.singular_values[j].sqrt();
        for i in 0..u_source.rows() {
            u_source[(i, j)] *= root;
            u_target[(i, j)] *= root;
        }
    }
    Ok(HopeEmbedding {
        u_source,
        u_target,
        singular_values: svd.singular_values,
        beta,
        d,
    })
}

/// Concatenated [U_source | U_target] feature matrix, n×2d.
/// With the default d=64 each argument gets 128 features.
pub fn node_feature_matrix(emb: &HopeEmbedding) -> Matrix {
    emb.u_source.hcat(&emb.u_target).expect("halves share row count")
}
