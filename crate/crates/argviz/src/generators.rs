//! Seeded generators for the synthetic argumentation domains: the Sembuster
//! family with its A/B/C partition labels, classic random graph models, and
//! structure-constrained domains (acyclic "grd", block-structured "scc").
//!
//! Every generator is a pure function of its parameters; the same spec and
//! seed always reproduce the same framework. Random draws come from a single
//! ChaCha8 stream per call, consumed in the documented construction order.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph_core::{ArgumentationFramework, GraphError, LabeledFramework};

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("generator {0:?} is unavailable: {1}")]
    Unavailable(&'static str, &'static str),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Sembuster partition membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionLabel {
    A,
    B,
    C,
}

impl PartitionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PartitionLabel::A => "A",
            PartitionLabel::B => "B",
            PartitionLabel::C => "C",
        }
    }
}

/// One generator invocation, expressible in config files and CLI flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "domain", rename_all = "lowercase", deny_unknown_fields)]
pub enum GeneratorSpec {
    Sembuster { k: usize },
    Admbuster { k: usize },
    #[serde(rename = "ba")]
    BarabasiAlbert { n: usize, m: usize, seed: u64 },
    #[serde(rename = "er")]
    ErdosRenyi { n: usize, p: f64, seed: u64 },
    #[serde(rename = "ws")]
    WattsStrogatz { n: usize, k_ring: usize, beta: f64, seed: u64 },
    #[serde(rename = "grd")]
    Grounded { n: usize, depth: usize, seed: u64 },
    Scc {
        n_components: usize,
        component_size: usize,
        p_intra: f64,
        p_inter: f64,
        seed: u64,
    },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<LabeledFramework, GeneratorError> {
        match *self {
            GeneratorSpec::Sembuster { k } => gen_sembuster(k),
            GeneratorSpec::Admbuster { k } => gen_admbuster(k),
            GeneratorSpec::BarabasiAlbert { n, m, seed } => gen_barabasi_albert(n, m, seed),
            GeneratorSpec::ErdosRenyi { n, p, seed } => gen_erdos_renyi(n, p, seed),
            GeneratorSpec::WattsStrogatz { n, k_ring, beta, seed } => {
                gen_watts_strogatz(n, k_ring, beta, seed)
            }
            GeneratorSpec::Grounded { n, depth, seed } => gen_grounded(n, depth, seed),
            GeneratorSpec::Scc {
                n_components,
                component_size,
                p_intra,
                p_inter,
                seed,
            } => gen_scc(n_components, component_size, p_intra, p_inter, seed),
        }
    }

    pub fn domain_label(&self) -> &'static str {
        match self {
            GeneratorSpec::Sembuster { .. } => "sembuster",
            GeneratorSpec::Admbuster { .. } => "admbuster",
            GeneratorSpec::BarabasiAlbert { .. } => "BA",
            GeneratorSpec::ErdosRenyi { .. } => "ER",
            GeneratorSpec::WattsStrogatz { .. } => "WS",
            GeneratorSpec::Grounded { .. } => "grd",
            GeneratorSpec::Scc { .. } => "scc",
        }
    }
}

/// Sembuster family: 3k arguments a1..ak, b1..bk, c1..ck.
/// A-arguments attack only themselves; b_i attacks a_j (i ≥ j), b_j (i > j)
/// and c_i; c_i counter-attacks b_i. Total attacks: k² + 3k.
pub fn gen_sembuster(k: usize) -> Result<LabeledFramework, GeneratorError> {
    if k == 0 {
        return Err(GeneratorError::InvalidParameter("sembuster requires k >= 1".into()));
    }
    let mut names = Vec::with_capacity(3 * k);
    for prefix in ["a", "b", "c"] {
        for i in 1..=k {
            names.push(format!("{prefix}{i}"));
        }
    }
    let a = |i: usize| i - 1; // 1-based helpers into the three blocks
    let b = |i: usize| k + i - 1;
    let c = |i: usize| 2 * k + i - 1;

    let mut attacks = Vec::new();
    for i in 1..=k {
        attacks.push((a(i), a(i)));
        for j in 1..=i {
            attacks.push((b(i), a(j)));
        }
        for j in 1..i {
            attacks.push((b(i), b(j)));
        }
        attacks.push((b(i), c(i)));
        attacks.push((c(i), b(i)));
    }

    let framework = ArgumentationFramework::new(names, attacks)?;
    let mut node_labels = BTreeMap::new();
    for i in 0..3 * k {
        let label = if i < k {
            PartitionLabel::A
        } else if i < 2 * k {
            PartitionLabel::B
        } else {
            PartitionLabel::C
        };
        node_labels.insert(i, label.as_str().to_string());
    }
    Ok(LabeledFramework::new(
        framework,
        Some("sembuster".to_string()),
        Some(node_labels),
    )?)
}

/// AdmBuster (Caminada and Podlaszewski). The attack structure lives only in
/// the original benchmark note, which is not available here; corpus instances
/// can still be ingested through the APX/TGF parsers.
pub fn gen_admbuster(k: usize) -> Result<LabeledFramework, GeneratorError> {
    if k == 0 {
        return Err(GeneratorError::InvalidParameter("admbuster requires k >= 1".into()));
    }
    Err(GeneratorError::Unavailable(
        "admbuster",
        "attack structure is defined only in the original benchmark note; \
         ingest corpus APX/TGF files instead",
    ))
}

/// Each ordered pair (i,j), i≠j, becomes an attack with probability p.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<LabeledFramework, GeneratorError> {
    if n == 0 {
        return Err(GeneratorError::InvalidParameter("er requires n >= 1".into()));
    }
    check_probability("p", p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attacks = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen::<f64>() < p {
                attacks.push((i, j));
            }
        }
    }
    let framework = ArgumentationFramework::new(vertex_names(n), attacks)?;
    Ok(LabeledFramework::new(framework, Some("ER".to_string()), None)?)
}

/// Preferential attachment on an undirected scaffold (initial (m+1)-clique,
/// each new node attaches to m distinct degree-weighted targets), then each
/// undirected edge is oriented by a fair coin flip.
pub fn gen_barabasi_albert(
    n: usize,
    m: usize,
    seed: u64,
) -> Result<LabeledFramework, GeneratorError> {
    if m == 0 || m >= n {
        return Err(GeneratorError::InvalidParameter(format!(
            "ba requires 1 <= m < n, got n={n} m={m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // Endpoint multiset: each occurrence weights a node by its degree.
    let mut endpoints: Vec<usize> = Vec::new();

    for i in 0..=m {
        for j in 0..i {
            edges.push((j, i));
            endpoints.push(j);
            endpoints.push(i);
        }
    }
    for v in m + 1..n {
        let mut targets = BTreeSet::new();
        while targets.len() < m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            targets.insert(t);
        }
        for &t in &targets {
            edges.push((t, v));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    let attacks = orient(&edges, &mut rng);
    let framework = ArgumentationFramework::new(vertex_names(n), attacks)?;
    Ok(LabeledFramework::new(framework, Some("BA".to_string()), None)?)
}

/// Ring lattice with `k_ring` neighbours per node, each edge rewired with
/// probability `beta`, then oriented by coin flip. Attack count is n·k_ring/2.
pub fn gen_watts_strogatz(
    n: usize,
    k_ring: usize,
    beta: f64,
    seed: u64,
) -> Result<LabeledFramework, GeneratorError> {
    if k_ring == 0 || k_ring % 2 != 0 || k_ring >= n {
        return Err(GeneratorError::InvalidParameter(format!(
            "ws requires even k_ring with 0 < k_ring < n, got n={n} k_ring={k_ring}"
        )));
    }
    check_probability("beta", beta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut adjacent: BTreeSet<(usize, usize)> = BTreeSet::new(); // min,max pairs
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for d in 1..=k_ring / 2 {
        for i in 0..n {
            let j = (i + d) % n;
            edges.push((i, j));
            adjacent.insert(key(i, j));
        }
    }
    // Standard Watts-Strogatz rewiring order: distance ring by ring.
    for e in 0..edges.len() {
        if rng.gen::<f64>() >= beta {
            continue;
        }
        let (i, old_j) = edges[e];
        // Skip when i is already adjacent to everyone else.
        if adjacent.iter().filter(|&&(a, b)| a == i || b == i).count() >= n - 1 {
            continue;
        }
        loop {
            let j = rng.gen_range(0..n);
            if j != i && !adjacent.contains(&key(i, j)) {
                adjacent.remove(&key(i, old_j));
                adjacent.insert(key(i, j));
                edges[e] = (i, j);
                break;
            }
        }
    }
    let attacks = orient(&edges, &mut rng);
    let framework = ArgumentationFramework::new(vertex_names(n), attacks)?;
    Ok(LabeledFramework::new(framework, Some("WS".to_string()), None)?)
}

/// Layered acyclic framework: attacks only run from layer ℓ+1 to layer ℓ,
/// so the grounded extension is the unique complete extension.
pub fn gen_grounded(n: usize, depth: usize, seed: u64) -> Result<LabeledFramework, GeneratorError> {
    if n == 0 || depth == 0 {
        return Err(GeneratorError::InvalidParameter("grd requires n >= 1, depth >= 1".into()));
    }
    if depth > n {
        return Err(GeneratorError::InvalidParameter(format!(
            "grd requires depth <= n, got n={n} depth={depth}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // First `depth` nodes pin one node per layer, the rest land at random.
    let mut layers = vec![0usize; n];
    for (i, layer) in layers.iter_mut().enumerate() {
        *layer = if i < depth { i } else { rng.gen_range(0..depth) };
    }
    let mut attacks = Vec::new();
    for u in 0..n {
        if layers[u] == 0 {
            continue;
        }
        for w in 0..n {
            if layers[w] + 1 == layers[u] && rng.gen::<f64>() < 0.5 {
                attacks.push((u, w));
            }
        }
    }
    let framework = ArgumentationFramework::new(vertex_names(n), attacks)?;
    Ok(LabeledFramework::new(framework, Some("grd".to_string()), None)?)
}

/// Block-structured framework whose strongly connected components are exactly
/// the constructed blocks: each block is a directed cycle plus random
/// intra-block attacks; inter-block attacks run only from lower-indexed to
/// higher-indexed blocks.
pub fn gen_scc(
    n_components: usize,
    component_size: usize,
    p_intra: f64,
    p_inter: f64,
    seed: u64,
) -> Result<LabeledFramework, GeneratorError> {
    if n_components < 2 || component_size < 2 {
        return Err(GeneratorError::InvalidParameter(format!(
            "scc requires n_components >= 2 and component_size >= 2, got {n_components}/{component_size}"
        )));
    }
    check_probability("p_intra", p_intra)?;
    check_probability("p_inter", p_inter)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n_components * component_size;
    let mut attacks = Vec::new();
    for c in 0..n_components {
        let base = c * component_size;
        for i in 0..component_size {
            attacks.push((base + i, base + (i + 1) % component_size));
        }
        for i in 0..component_size {
            for j in 0..component_size {
                if i != j && rng.gen::<f64>() < p_intra {
                    attacks.push((base + i, base + j));
                }
            }
        }
    }
    for c1 in 0..n_components {
        for c2 in c1 + 1..n_components {
            for i in 0..component_size {
                for j in 0..component_size {
                    if rng.gen::<f64>() < p_inter {
                        attacks.push((c1 * component_size + i, c2 * component_size + j));
                    }
                }
            }
        }
    }
    let framework = ArgumentationFramework::new(vertex_names(n), attacks)?;
    Ok(LabeledFramework::new(framework, Some("scc".to_string()), None)?)
}

fn vertex_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

fn check_probability(name: &str, p: f64) -> Result<(), GeneratorError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GeneratorError::InvalidParameter(format!("{name}={p} not in [0,1]")));
    }
    Ok(())
}

/// One fair coin per undirected edge, in edge order.
fn orient(edges: &[(usize, usize)], rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    edges
        .iter()
        .map(|&(a, b)| if rng.gen::<bool>() { (a, b) } else { (b, a) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sembuster_k1_exact() {
        let lf = gen_sembuster(1).unwrap();
        let af = &lf.framework;
        assert_eq!(af.arguments(), &["a1", "b1", "c1"]);
        let attacks: Vec<_> = af.attacks().collect();
        assert_eq!(attacks, vec![(0, 0), (1, 0), (1, 2), (2, 1)]);
        assert_eq!(af.attack_count(), 4);
    }

    #[test]
    fn sembuster_k2_exact() {
        let lf = gen_sembuster(2).unwrap();
        let af = &lf.framework;
        assert_eq!(af.argument_count(), 6);
        assert_eq!(af.attack_count(), 10);
        // b2 = index 3, a1 = 0, a2 = 1, b1 = 2
        assert!(af.has_attack(3, 0));
        assert!(af.has_attack(3, 1));
        assert!(af.has_attack(3, 2));
    }

    #[test]
    fn sembuster_k2_infinity_norm_is_four() {
        // b2 attacks a1, a2, b1, c2: the densest row.
        let m = gen_sembuster(2).unwrap().framework.adjacency_matrix();
        assert_eq!(m.infinity_norm(), 4.0);
    }

    #[test]
    fn sembuster_attack_count_closed_form() {
        for k in 1..=50 {
            let lf = gen_sembuster(k).unwrap();
            assert_eq!(lf.framework.attack_count(), k * k + 3 * k, "k={k}");
        }
    }

    #[test]
    fn sembuster_labels_partition() {
        let lf = gen_sembuster(3).unwrap();
        let labels = lf.node_labels.unwrap();
        assert_eq!(labels[&0], "A");
        assert_eq!(labels[&3], "B");
        assert_eq!(labels[&6], "C");
        assert_eq!(labels.len(), 9);
    }

    #[test]
    fn sembuster_zero_rejected() {
        assert!(gen_sembuster(0).is_err());
    }

    #[test]
    fn admbuster_unavailable() {
        assert!(matches!(gen_admbuster(3), Err(GeneratorError::Unavailable(..))));
        assert!(gen_admbuster(0).is_err());
    }

    #[test]
    fn er_extremes() {
        let empty = gen_erdos_renyi(5, 0.0, 1).unwrap();
        assert_eq!(empty.framework.attack_count(), 0);
        let full = gen_erdos_renyi(3, 1.0, 1).unwrap();
        assert_eq!(full.framework.attack_count(), 6);
        assert!(!full.framework.has_attack(0, 0));
    }

    #[test]
    fn er_binomial_concentration() {
        let lf = gen_erdos_renyi(100, 0.05, 7).unwrap();
        let mean = 0.05 * 100.0 * 99.0;
        let sigma = (100.0f64 * 99.0 * 0.05 * 0.95).sqrt();
        let observed = lf.framework.attack_count() as f64;
        assert!((observed - mean).abs() <= 3.0 * sigma, "observed {observed}");
    }

    #[test]
    fn er_invalid_p() {
        assert!(gen_erdos_renyi(5, 1.5, 0).is_err());
        assert!(gen_erdos_renyi(5, -0.1, 0).is_err());
    }

    #[test]
    fn ba_clique_when_n_is_m_plus_one() {
        let lf = gen_barabasi_albert(4, 3, 0).unwrap();
        assert_eq!(lf.framework.attack_count(), 6);
    }

    #[test]
    fn ba_edge_count_closed_form() {
        let lf = gen_barabasi_albert(50, 2, 1).unwrap();
        // m(m+1)/2 clique edges + m per node beyond the clique.
        assert_eq!(lf.framework.attack_count(), 3 + 2 * (50 - 3));
    }

    #[test]
    fn ba_max_degree_grows_with_n() {
        let max_degree = |n: usize| {
            let lf = gen_barabasi_albert(n, 2, 9).unwrap();
            (0..n)
                .map(|i| lf.framework.in_degree(i) + lf.framework.out_degree(i))
                .max()
                .unwrap()
        };
        let (d50, d100, d200) = (max_degree(50), max_degree(100), max_degree(200));
        assert!(d50 <= d100 && d100 <= d200, "{d50} {d100} {d200}");
    }

    #[test]
    fn ba_invalid_m() {
        assert!(gen_barabasi_albert(3, 3, 0).is_err());
        assert!(gen_barabasi_albert(3, 0, 0).is_err());
    }

    #[test]
    fn ws_pure_ring() {
        let lf = gen_watts_strogatz(10, 2, 0.0, 4).unwrap();
        let af = &lf.framework;
        assert_eq!(af.attack_count(), 10);
        for i in 0..10 {
            let j = (i + 1) % 10;
            assert!(af.has_attack(i, j) || af.has_attack(j, i));
        }
    }

    #[test]
    fn ws_full_rewire_invariants() {
        let lf = gen_watts_strogatz(20, 4, 1.0, 3).unwrap();
        let af = &lf.framework;
        assert_eq!(af.attack_count(), 40);
        for (a, t) in af.attacks() {
            assert_ne!(a, t);
            assert!(!(af.has_attack(a, t) && af.has_attack(t, a)));
        }
    }

    #[test]
    fn ws_invalid_params() {
        assert!(gen_watts_strogatz(10, 3, 0.1, 0).is_err()); // odd k
        assert!(gen_watts_strogatz(4, 4, 0.1, 0).is_err()); // k >= n
        assert!(gen_watts_strogatz(10, 2, 1.5, 0).is_err());
    }

    fn has_cycle(af: &ArgumentationFramework) -> bool {
        // Iterative DFS with colors; independent of generator internals.
        let n = af.argument_count();
        let mut adj = vec![Vec::new(); n];
        for (a, t) in af.attacks() {
            adj[a].push(t);
        }
        let mut color = vec![0u8; n]; // 0 white, 1 gray, 2 black
        for start in 0..n {
            if color[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            color[start] = 1;
            while let Some(&mut (u, ref mut next)) = stack.last_mut() {
                if *next < adj[u].len() {
                    let v = adj[u][*next];
                    *next += 1;
                    match color[v] {
                        0 => {
                            color[v] = 1;
                            stack.push((v, 0));
                        }
                        1 => return true,
                        _ => {}
                    }
                } else {
                    color[u] = 2;
                    stack.pop();
                }
            }
        }
        false
    }

    #[test]
    fn grd_single_layer_empty() {
        let lf = gen_grounded(5, 1, 0).unwrap();
        assert_eq!(lf.framework.attack_count(), 0);
    }

    #[test]
    fn grd_outputs_acyclic() {
        for seed in 0..20 {
            let lf = gen_grounded(30, 4, seed).unwrap();
            assert!(!has_cycle(&lf.framework), "seed {seed}");
        }
    }

    #[test]
    fn grd_depth_exceeds_n() {
        assert!(gen_grounded(3, 4, 0).is_err());
    }

    fn tarjan_scc_sizes(af: &ArgumentationFramework) -> Vec<usize> {
        let n = af.argument_count();
        let mut adj = vec![Vec::new(); n];
        for (a, t) in af.attacks() {
            adj[a].push(t);
        }
        // Iterative Tarjan.
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut next_index = 0usize;
        let mut sizes = Vec::new();
        for start in 0..n {
            if index[start] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(start, 0)];
            while let Some(&mut (u, ref mut ni)) = call.last_mut() {
                if *ni == 0 {
                    index[u] = next_index;
                    low[u] = next_index;
                    next_index += 1;
                    stack.push(u);
                    on_stack[u] = true;
                }
                if *ni < adj[u].len() {
                    let v = adj[u][*ni];
                    *ni += 1;
                    if index[v] == usize::MAX {
                        call.push((v, 0));
                    } else if on_stack[v] {
                        low[u] = low[u].min(index[v]);
                    }
                } else {
                    if low[u] == index[u] {
                        let mut size = 0;
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack[w] = false;
                            size += 1;
                            if w == u {
                                break;
                            }
                        }
                        sizes.push(size);
                    }
                    call.pop();
                    if let Some(&mut (parent, _)) = call.last_mut() {
                        low[parent] = low[parent].min(low[u]);
                    }
                }
            }
        }
        sizes
    }

    #[test]
    fn scc_disjoint_cycles() {
        let lf = gen_scc(3, 4, 0.0, 0.0, 0).unwrap();
        assert_eq!(lf.framework.attack_count(), 12);
    }

    #[test]
    fn scc_structure_matches_blocks() {
        for seed in 0..20 {
            let lf = gen_scc(4, 5, 0.2, 0.1, seed).unwrap();
            let sizes = tarjan_scc_sizes(&lf.framework);
            assert_eq!(sizes.len(), 4, "seed {seed}");
            assert!(sizes.iter().all(|&s| s == 5), "seed {seed}: {sizes:?}");
        }
    }

    #[test]
    fn scc_invalid_params() {
        assert!(gen_scc(1, 4, 0.0, 0.0, 0).is_err());
        assert!(gen_scc(3, 1, 0.0, 0.0, 0).is_err());
    }

    #[test]
    fn determinism_per_spec() {
        let specs = [
            GeneratorSpec::Sembuster { k: 5 },
            GeneratorSpec::ErdosRenyi { n: 40, p: 0.1, seed: 11 },
            GeneratorSpec::BarabasiAlbert { n: 40, m: 3, seed: 11 },
            GeneratorSpec::WattsStrogatz { n: 40, k_ring: 4, beta: 0.3, seed: 11 },
            GeneratorSpec::Grounded { n: 40, depth: 4, seed: 11 },
            GeneratorSpec::Scc {
                n_components: 3,
                component_size: 5,
                p_intra: 0.2,
                p_inter: 0.1,
                seed: 11,
            },
        ];
        for spec in &specs {
            assert_eq!(spec.generate().unwrap(), spec.generate().unwrap(), "{spec:?}");
        }
    }
}
