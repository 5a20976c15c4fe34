//! Cluster-separation measures over labeled point sets: k-nearest-neighbour
//! label agreement and the silhouette coefficient. Both use the Euclidean
//! metric and have fully specified tie-breaking so results are reproducible
//! across implementations.

use thiserror::Error;

use crate::numerics::Matrix;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("points ({points}) and labels ({labels}) counts differ")]
    CountMismatch { points: usize, labels: usize },
    #[error("k={k} must be positive and smaller than n={n}")]
    InvalidK { k: usize, n: usize },
    #[error("need at least 2 distinct labels, found {0}")]
    TooFewLabels(usize),
}

#[derive(Debug, Clone)]
pub struct LabeledPoints {
    pub points: Matrix,
    pub labels: Vec<String>,
}

impl LabeledPoints {
    pub fn new(points: Matrix, labels: Vec<String>) -> Result<Self, MetricsError> {
        if points.rows() != labels.len() {
            return Err(MetricsError::CountMismatch {
                points: points.rows(),
                labels: labels.len(),
            });
        }
        Ok(LabeledPoints { points, labels })
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        self.points
            .row(i)
            .iter()
            .zip(self.points.row(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Fraction of points whose majority label among the k nearest neighbours
/// matches their own. Neighbours are ordered by (distance, index); majority
/// ties break by smaller within-tie distance sum, then lexicographic label.
pub fn knn_label_agreement(lp: &LabeledPoints, k: usize) -> Result<f64, MetricsError> {
    let n = lp.points.rows();
    if k == 0 || k >= n {
        return Err(MetricsError::InvalidK { k, n });
    }
    let mut agree = 0usize;
    for i in 0..n {
        let mut neighbours: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (lp.distance(i, j), j))
            .collect();
        neighbours.sort_by(|a, b| a.partial_cmp(b).unwrap());
        neighbours.truncate(k);

        // Tally votes and per-label distance sums among the k neighbours.
        let mut tally: Vec<(&str, usize, f64)> = Vec::new();
        for &(d, j) in &neighbours {
            let label = lp.labels[j].as_str();
            match tally.iter_mut().find(|(l, _, _)| *l == label) {
                Some(entry) => {
                    entry.1 += 1;
                    entry.2 += d;
                }
                None => tally.push((label, 1, d)),
            }
        }
        tally.sort_by(|a, b| {
            b.1.cmp(&a.1)
                .then(a.2.partial_cmp(&b.2).unwrap())
                .then(a.0.cmp(b.0))
        });
        if tally[0].0 == lp.labels[i] {
            agree += 1;
        }
    }
    Ok(agree as f64 / n as f64)
}

/// Mean silhouette coefficient. Singleton-label points score 0, as does the
/// 0/0 case when all distances vanish.
pub fn silhouette(lp: &LabeledPoints) -> Result<f64, MetricsError> {
    let n = lp.points.rows();
    let mut labels: Vec<&str> = lp.labels.iter().map(|s| s.as_str()).collect();
    labels.sort();
    labels.dedup();
    if labels.len() < 2 {
        return Err(MetricsError::TooFewLabels(labels.len()));
    }

    let mut total = 0.0;
    for i in 0..n {
        let own = lp.labels[i].as_str();
        let own_count = lp.labels.iter().filter(|l| l.as_str() == own).count();
        if own_count == 1 {
            continue; // contributes 0
        }
        let mut intra = 0.0;
        for j in 0..n {
            if j != i && lp.labels[j] == own {
                intra += lp.distance(i, j);
            }
        }
        let a = intra / (own_count - 1) as f64;

        let mut b = f64::INFINITY;
        for &other in &labels {
            if other == own {
                continue;
            }
            let mut sum = 0.0;
            let mut count = 0usize;
            for j in 0..n {
                if lp.labels[j] == other {
                    sum += lp.distance(i, j);
                    count += 1;
                }
            }
            if count > 0 {
                b = b.min(sum / count as f64);
            }
        }
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}
