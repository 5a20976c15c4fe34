//! Abstract argumentation frameworks (directed attack graphs) plus the two
//! ICCMA interchange formats, APX and TGF.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::numerics::Matrix;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("argument name {0:?} contains a forbidden character (whitespace, parentheses or comma)")]
    BadArgumentName(String),
    #[error("duplicate argument declaration {0:?}")]
    DuplicateArgument(String),
    #[error("attack ({0}, {1}) references an index out of range (n = {2})")]
    AttackOutOfRange(usize, usize, usize),
    #[error("line {line}: malformed line {text:?}")]
    MalformedLine { line: usize, text: String },
    #[error("line {line}: attack references undeclared argument {name:?}")]
    UndeclaredArgument { line: usize, name: String },
    #[error("line {line}: duplicate argument declaration {name:?}")]
    DuplicateDeclaration { line: usize, name: String },
    #[error("TGF input has no '#' separator line")]
    MissingSeparator,
    #[error("node label index {0} out of range (n = {1})")]
    NodeLabelOutOfRange(usize, usize),
}

/// Directed attack graph with named arguments. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgumentationFramework {
    arguments: Vec<String>,
    attacks: BTreeSet<(usize, usize)>,
}

impl ArgumentationFramework {
    /// Duplicate attacks collapse (set semantics); self-attacks are allowed.
    pub fn new(
        arguments: Vec<String>,
        attacks: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for name in &arguments {
            if name.is_empty()
                || name.chars().any(|c| c.is_whitespace() || "(),".contains(c))
            {
                return Err(GraphError::BadArgumentName(name.clone()));
            }
            if !seen.insert(name.clone()) {
                return Err(GraphError::DuplicateArgument(name.clone()));
            }
        }
        let n = arguments.len();
        let mut set = BTreeSet::new();
        for (a, t) in attacks {
            if a >= n || t >= n {
                return Err(GraphError::AttackOutOfRange(a, t, n));
            }
            set.insert((a, t));
        }
        Ok(ArgumentationFramework { arguments, attacks: set })
    }

    pub fn argument_count(&self) -> usize {
        self.arguments.len()
    }

    pub fn arguments(&self) -> &[String] {
        &self.arguments
    }

    pub fn argument_name(&self, i: usize) -> &str {
        &self.arguments[i]
    }

    /// Attacks in sorted (attacker, target) order.
    pub fn attacks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.attacks.iter().copied()
    }

    pub fn attack_count(&self) -> usize {
        self.attacks.len()
    }

    pub fn has_attack(&self, attacker: usize, target: usize) -> bool {
        self.attacks.contains(&(attacker, target))
    }

    /// Dense n×n matrix with M[i][j] = 1 iff i attacks j.
    pub fn adjacency_matrix(&self) -> Matrix {
        let n = self.arguments.len();
        let mut m = Matrix::zeros(n, n);
        for &(a, t) in &self.attacks {
            m[(a, t)] = 1.0;
        }
        m
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.attacks.range((i, 0)..=(i, usize::MAX)).count()
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.attacks.iter().filter(|&&(_, t)| t == i).count()
    }
}

/// A framework plus optional domain / per-argument labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledFramework {
    pub framework: ArgumentationFramework,
    pub graph_label: Option<String>,
    pub node_labels: Option<BTreeMap<usize, String>>,
}

impl LabeledFramework {
    pub fn unlabeled(framework: ArgumentationFramework) -> Self {
        LabeledFramework { framework, graph_label: None, node_labels: None }
    }

    pub fn new(
        framework: ArgumentationFramework,
        graph_label: Option<String>,
        node_labels: Option<BTreeMap<usize, String>>,
    ) -> Result<Self, GraphError> {
        if let Some(labels) = &node_labels {
            let n = framework.argument_count();
            if let Some((&i, _)) = labels.iter().find(|(&i, _)| i >= n) {
                return Err(GraphError::NodeLabelOutOfRange(i, n));
            }
        }
        Ok(LabeledFramework { framework, graph_label, node_labels })
    }
}

/// Parses the APX format: `arg(NAME).` and `att(A,B).` lines.
/// Blank lines and `%` comments are ignored.
pub fn parse_apx(text: &str) -> Result<ArgumentationFramework, GraphError> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut attacks: Vec<(usize, usize)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = lineno + 1;
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if let Some(name) = strip_clause(line, "arg(") {
            if index.contains_key(name) {
                return Err(GraphError::DuplicateDeclaration {
                    line: lineno,
                    name: name.to_string(),
                });
            }
            index.insert(name.to_string(), names.len());
            names.push(name.to_string());
        } else if let Some(body) = strip_clause(line, "att(") {
            let (a, b) = body.split_once(',').ok_or_else(|| GraphError::MalformedLine {
                line: lineno,
                text: raw.to_string(),
            })?;
            let a = a.trim();
            let b = b.trim();
            let ai = *index.get(a).ok_or_else(|| GraphError::UndeclaredArgument {
                line: lineno,
                name: a.to_string(),
            })?;
            let bi = *index.get(b).ok_or_else(|| GraphError::UndeclaredArgument {
                line: lineno,
                name: b.to_string(),
            })?;
            attacks.push((ai, bi));
        } else {
            return Err(GraphError::MalformedLine { line: lineno, text: raw.to_string() });
        }
    }
    ArgumentationFramework::new(names, attacks)
}

fn strip_clause<'a>(line: &'a str, head: &str) -> Option<&'a str> {
    line.strip_prefix(head)?.strip_suffix(").")
}

/// Parses the TGF format: node-id lines, a `#` separator, then `SRC DST` lines.
pub fn parse_tgf(text: &str) -> Result<ArgumentationFramework, GraphError> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut attacks: Vec<(usize, usize)> = Vec::new();
    let mut past_separator = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = lineno + 1;
        if line.is_empty() {
            continue;
        }
        if line == "#" {
            past_separator = true;
            continue;
        }
        if !past_separator {
            if line.split_whitespace().count() != 1 {
                return Err(GraphError::MalformedLine { line: lineno, text: raw.to_string() });
            }
            if index.contains_key(line) {
                return Err(GraphError::DuplicateDeclaration {
                    line: lineno,
                    name: line.to_string(),
                });
            }
            index.insert(line.to_string(), names.len());
            names.push(line.to_string());
        } else {
            let mut parts = line.split_whitespace();
            let (src, dst) = match (parts.next(), parts.next(), parts.next()) {
                (Some(s), Some(d), None) => (s, d),
                _ => {
                    return Err(GraphError::MalformedLine {
                        line: lineno,
                        text: raw.to_string(),
                    })
                }
            };
            let ai = *index.get(src).ok_or_else(|| GraphError::UndeclaredArgument {
                line: lineno,
                name: src.to_string(),
            })?;
            let bi = *index.get(dst).ok_or_else(|| GraphError::UndeclaredArgument {
                line: lineno,
                name: dst.to_string(),
            })?;
            attacks.push((ai, bi));
        }
    }
    if !past_separator {
        return Err(GraphError::MissingSeparator);
    }
    ArgumentationFramework::new(names, attacks)
}

/// Serializes to APX: args in stored order, attacks sorted by index pair.
pub fn serialize_apx(af: &ArgumentationFramework) -> String {
    let mut out = String::new();
    for name in af.arguments() {
        let _ = writeln!(out, "arg({name}).");
    }
    for (a, t) in af.attacks() {
        let _ = writeln!(out, "att({},{}).", af.argument_name(a), af.argument_name(t));
    }
    out
}

/// Serializes to TGF: node ids, `#`, then `SRC DST` pairs.
pub fn serialize_tgf(af: &ArgumentationFramework) -> String {
    let mut out = String::new();
    for name in af.arguments() {
        let _ = writeln!(out, "{name}");
    }
    out.push_str("#\n");
    for (a, t) in af.attacks() {
        let _ = writeln!(out, "{} {}", af.argument_name(a), af.argument_name(t));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn af(names: &[&str], attacks: &[(usize, usize)]) -> ArgumentationFramework {
        ArgumentationFramework::new(
            names.iter().map(|s| s.to_string()).collect(),
            attacks.iter().copied(),
        )
        .unwrap()
    }

    #[test]
    fn adjacency_empty() {
        let a = af(&["x", "y", "z"], &[]);
        let m = a.adjacency_matrix();
        assert!(m.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn adjacency_single_attack() {
        let a = af(&["x", "y"], &[(0, 1)]);
        let m = a.adjacency_matrix();
        assert_eq!(m.data(), &[0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn duplicate_attacks_collapse() {
        let a = ArgumentationFramework::new(
            vec!["x".into(), "y".into()],
            vec![(0, 1), (0, 1), (0, 1)],
        )
        .unwrap();
        assert_eq!(a.attack_count(), 1);
    }

    #[test]
    fn forbidden_names_rejected() {
        for bad in ["a b", "a(", "x)", "p,q", ""] {
            assert!(ArgumentationFramework::new(vec![bad.to_string()], vec![]).is_err());
        }
    }

    #[test]
    fn parse_apx_minimal() {
        let a = parse_apx("arg(a).\narg(b).\natt(a,b).").unwrap();
        assert_eq!(a.argument_count(), 2);
        assert_eq!(a.attacks().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn parse_apx_self_attack() {
        let a = parse_apx("arg(a).\natt(a,a).").unwrap();
        assert_eq!(a.argument_count(), 1);
        assert!(a.has_attack(0, 0));
    }

    #[test]
    fn parse_apx_undeclared() {
        assert!(matches!(
            parse_apx("att(a,b)."),
            Err(GraphError::UndeclaredArgument { line: 1, .. })
        ));
    }

    #[test]
    fn parse_apx_comments_and_blanks() {
        let a = parse_apx("% header\n\narg(a).\n  % more\narg(b).\n").unwrap();
        assert_eq!(a.argument_count(), 2);
    }

    #[test]
    fn parse_apx_malformed_line_number() {
        match parse_apx("arg(a).\nbogus") {
            Err(GraphError::MalformedLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected malformed line, got {other:?}"),
        }
    }

    #[test]
    fn parse_apx_duplicate_declaration() {
        assert!(matches!(
            parse_apx("arg(a).\narg(a)."),
            Err(GraphError::DuplicateDeclaration { line: 2, .. })
        ));
    }

    #[test]
    fn parse_tgf_minimal() {
        let a = parse_tgf("1\n2\n#\n1 2").unwrap();
        assert_eq!(a.argument_count(), 2);
        assert_eq!(a.attacks().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn parse_tgf_edgeless() {
        let a = parse_tgf("1\n#\n").unwrap();
        assert_eq!(a.argument_count(), 1);
        assert_eq!(a.attack_count(), 0);
    }

    #[test]
    fn parse_tgf_missing_separator() {
        assert!(matches!(parse_tgf("1\n2\n1 2"), Err(_)));
    }

    #[test]
    fn parse_tgf_unknown_node() {
        assert!(matches!(
            parse_tgf("1\n#\n1 9"),
            Err(GraphError::UndeclaredArgument { .. })
        ));
    }

    #[test]
    fn serialize_apx_exact_bytes() {
        let a = af(&["a0", "a1"], &[(0, 1)]);
        assert_eq!(serialize_apx(&a), "arg(a0).\narg(a1).\natt(a0,a1).\n");
    }

    #[test]
    fn serialize_apx_edgeless() {
        let a = af(&["a", "b"], &[]);
        assert_eq!(serialize_apx(&a), "arg(a).\narg(b).\n");
    }

    #[test]
    fn round_trip_both_formats() {
        let a = af(&["n1", "n2", "n3"], &[(0, 1), (1, 2), (2, 2)]);
        assert_eq!(parse_apx(&serialize_apx(&a)).unwrap(), a);
        assert_eq!(parse_tgf(&serialize_tgf(&a)).unwrap(), a);
    }

    #[test]
    fn node_labels_validated() {
        let a = af(&["x"], &[]);
        let mut labels = BTreeMap::new();
        labels.insert(3usize, "A".to_string());
        assert!(LabeledFramework::new(a, None, Some(labels)).is_err());
    }
}
