use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Matrix, NumericsError};

/// Top-d singular triplets. Columns of `u` and `v` are orthonormal,
/// `singular_values` sorted non-increasing.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: Matrix,
    pub singular_values: Vec<f64>,
    pub v: Matrix,
}

const OVERSAMPLING: usize = 8;
const POWER_ITERATIONS: usize = 4;

/// Randomized subspace iteration for the top-d singular triplets of a dense
/// matrix. The subspace is refined until every returned triplet satisfies
/// `‖M v − σ u‖ ≤ 1e-6·σ₁ + 1e-10`.
pub fn truncated_svd(m: &Matrix, d: usize, seed: u64) -> Result<SvdResult, NumericsError> {
    let (rows, cols) = (m.rows(), m.cols());
    let rank_cap = rows.min(cols);
    if d == 0 || d > rank_cap {
        return Err(NumericsError::InvalidDimension(format!(
            "truncated_svd: d={} not in 1..={}",
            d, rank_cap
        )));
    }
    if m.frobenius_norm() == 0.0 {
        // Zero matrix: zero spectrum with canonical orthonormal bases.
        return Ok(SvdResult {
            u: canonical_columns(rows, d),
            singular_values: vec![0.0; d],
            v: canonical_columns(cols, d),
        });
    }

    let mt = m.transpose();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sketch = (d + OVERSAMPLING).min(rank_cap);
    loop {
        let omega_data = (0..cols * sketch)
            .map(|_| gaussian(&mut rng))
            .collect::<Vec<_>>();
        let omega = Matrix::from_vec(cols, sketch, omega_data)?;

        let mut q = orthonormalize(&m.matmul(&omega)?);
        for _ in 0..POWER_ITERATIONS {
            q = power_round(m, &mt, &q)?;
        }

        // Residual-driven refinement: a few extra power rounds, and when
        // clustered singular values near the sketch boundary stall them, a
        // wider sketch. At sketch == rank_cap the extraction is exact.
        for _round in 0..4 {
            let result = ritz_triplets(m, &mt, &q, d)?;
            if triplets_converged(m, &result) {
                return Ok(result);
            }
            q = power_round(m, &mt, &q)?;
        }
        if sketch == rank_cap {
            return Ok(ritz_triplets(m, &mt, &q, d)?);
        }
        sketch = (sketch * 2).min(rank_cap);
    }
}

fn power_round(m: &Matrix, mt: &Matrix, q: &Matrix) -> Result<Matrix, NumericsError> {
    let z = orthonormalize(&mt.matmul(q)?);
    Ok(orthonormalize(&m.matmul(&z)?))
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller, deterministic draw order.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Rayleigh-Ritz extraction: eigen-decompose (QᵀM)(QᵀM)ᵀ and map back.
fn ritz_triplets(
    m: &Matrix,
    mt: &Matrix,
    q: &Matrix,
    d: usize,
) -> Result<SvdResult, NumericsError> {
    let b = q.transpose().matmul(m)?; // sketch × cols
    let bbt = b.matmul(&mt.matmul(q)?)?; // sketch × sketch, equals B Bᵀ
    let (eigvals, eigvecs) = jacobi_eigen(&bbt);

    let u_full = q.matmul(&eigvecs)?;
    let bt = b.transpose();
    let mut u = Matrix::zeros(m.rows(), d);
    let mut v = Matrix::zeros(m.cols(), d);
    let mut sigma = Vec::with_capacity(d);
    let sigma0 = eigvals[0].max(0.0).sqrt();
    for j in 0..d {
        let s = eigvals[j].max(0.0).sqrt();
        sigma.push(s);
        for i in 0..m.rows() {
            u[(i, j)] = u_full[(i, j)];
        }
        if s > 1e-12 * sigma0.max(1.0) {
            // v_j = Bᵀ w_j / σ_j
            for i in 0..m.cols() {
                let mut acc = 0.0;
                for k in 0..bt.cols() {
                    acc += bt[(i, k)] * eigvecs[(k, j)];
                }
                v[(i, j)] = acc / s;
            }
        } else {
            sigma[j] = 0.0;
            fill_orthonormal_column(&mut v, j);
        }
    }
    Ok(SvdResult { u, singular_values: sigma, v })
}

fn triplets_converged(m: &Matrix, r: &SvdResult) -> bool {
    let sigma0 = r.singular_values[0];
    let bound = 1e-6 * sigma0 + 1e-10;
    for j in 0..r.singular_values.len() {
        let mut err = 0.0f64;
        for i in 0..m.rows() {
            let mut mv = 0.0;
            for k in 0..m.cols() {
                mv += m[(i, k)] * r.v[(k, j)];
            }
            let diff = mv - r.singular_values[j] * r.u[(i, j)];
            err += diff * diff;
        }
        if err.sqrt() > bound {
            return false;
        }
    }
    true
}

fn canonical_columns(n: usize, k: usize) -> Matrix {
    let mut m = Matrix::zeros(n, k);
    for j in 0..k.min(n) {
        m[(j, j)] = 1.0;
    }
    m
}

/// Replaces column `j` with a unit vector orthogonal to columns 0..j
/// (Gram-Schmidt over the canonical basis). Used for zero singular values.
fn fill_orthonormal_column(v: &mut Matrix, j: usize) {
    let n = v.rows();
    for cand in 0..n {
        let mut col = vec![0.0; n];
        col[cand] = 1.0;
        for prev in 0..j {
            let dot: f64 = (0..n).map(|i| col[i] * v[(i, prev)]).sum();
            for i in 0..n {
                col[i] -= dot * v[(i, prev)];
            }
        }
        let norm: f64 = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for i in 0..n {
                v[(i, j)] = col[i] / norm;
            }
            return;
        }
    }
}

/// Thin-Q Householder orthonormalization of the columns of `a`.
/// Zero or dependent columns still yield orthonormal output columns.
pub(crate) fn orthonormalize(a: &Matrix) -> Matrix {
    let n = a.rows();
    let k = a.cols().min(n);
    let mut r = a.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(k);

    for j in 0..k {
        let mut v: Vec<f64> = (j..n).map(|i| r[(i, j)]).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-300 {
            reflectors.push(Vec::new()); // identity reflector
            continue;
        }
        let alpha = if v[0] >= 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm < 1e-300 {
            reflectors.push(Vec::new());
            continue;
        }
        for x in v.iter_mut() {
            *x /= vnorm;
        }
        // Apply H = I - 2vvᵀ to the trailing block of R.
        for c in j..k {
            let dot: f64 = (0..n - j).map(|i| v[i] * r[(j + i, c)]).sum();
            for i in 0..n - j {
                r[(j + i, c)] -= 2.0 * dot * v[i];
            }
        }
        reflectors.push(v);
    }

    // Q = H_0 · ... · H_{k-1} applied to the first k columns of I.
    let mut q = canonical_columns(n, k);
    for j in (0..k).rev() {
        let v = &reflectors[j];
        if v.is_empty() {
            continue;
        }
        for c in 0..k {
            let dot: f64 = (0..n - j).map(|i| v[i] * q[(j + i, c)]).sum();
            for i in 0..n - j {
                q[(j + i, c)] -= 2.0 * dot * v[i];
            }
        }
    }
    q
}

/// Cyclic Jacobi eigensolver for a symmetric matrix. Returns eigenvalues in
/// non-increasing order with matching eigenvector columns.
fn jacobi_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.rows();
    let mut m = a.clone();
    let mut vecs = Matrix::identity(n);
    let scale = m.infinity_norm().max(1e-300);

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(m[(p, q)].abs());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = c * mip - s * miq;
                    m[(i, q)] = s * mip + c * miq;
                }
                for i in 0..n {
                    let mpi = m[(p, i)];
                    let mqi = m[(q, i)];
                    m[(p, i)] = c * mpi - s * mqi;
                    m[(q, i)] = s * mpi + c * mqi;
                }
                for i in 0..n {
                    let vip = vecs[(i, p)];
                    let viq = vecs[(i, q)];
                    vecs[(i, p)] = c * vip - s * viq;
                    vecs[(i, q)] = s * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].partial_cmp(&m[(i, i)]).unwrap());
    let vals = order.iter().map(|&i| m[(i, i)]).collect();
    let mut sorted = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            sorted[(i, dst)] = vecs[(i, src)];
        }
    }
    (vals, sorted)
}
