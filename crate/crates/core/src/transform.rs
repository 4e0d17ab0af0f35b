//! Unwinding reflexive clusters into irreflexive path copies so that the relativized
//! translation of a formula holds wherever the formula held.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::kripke::{validate_frame, FrameClass, KripkeModel, ModelError, Violation};
use crate::provability_semantics::{
    translate_k4_to_gl, validate_assignment, AssignmentError, TranslationError, TranslationT,
};
use crate::syntax::{is_q_atom, Formula, Position};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("input is not a finite transitive tree with clusters: {0:?}")]
    FrameViolation(Vec<Violation>),
    #[error(transparent)]
    Translation(#[from] TranslationError),
    #[error("model valuation already uses the generated atom `{0}`")]
    QAtomCollision(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl From<AssignmentError> for TransformError {
    fn from(e: AssignmentError) -> Self {
        TransformError::Translation(TranslationError::Invalid(e))
    }
}

/// Complexity of every subformula occurrence under a translation: -1 when box-free,
/// otherwise the largest number assigned inside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TComplexity {
    by_position: BTreeMap<Position, i64>,
}

impl TComplexity {
    pub fn get(&self, pos: &Position) -> Option<i64> {
        self.by_position.get(pos).copied()
    }

    /// Complexity of the whole formula.
    pub fn root(&self) -> i64 {
        self.by_position[&Position(Vec::new())]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Position, i64)> {
        self.by_position.iter().map(|(p, c)| (p, *c))
    }
}

pub fn t_complexity(a: &Formula, t: &TranslationT) -> Result<TComplexity, AssignmentError> {
    validate_assignment(a, t.as_slice())?;
    let boxes: Vec<(Position, u64)> = a
        .box_occurrences()
        .into_iter()
        .zip(t.as_slice().iter().copied())
        .collect();
    let mut by_position = BTreeMap::new();
    walk_positions(a, &mut Vec::new(), &mut |pos| {
        let c = boxes
            .iter()
            .filter(|(b, _)| b.0.starts_with(pos))
            .map(|(_, n)| *n as i64)
            .max()
            .unwrap_or(-1);
        by_position.insert(Position(pos.to_vec()), c);
    });
    Ok(TComplexity { by_position })
}

fn walk_positions(f: &Formula, path: &mut Vec<u8>, visit: &mut impl FnMut(&[u8])) {
    visit(path);
    for (i, c) in f.children().into_iter().enumerate() {
        path.push(i as u8);
        walk_positions(c, path, visit);
        path.pop();
    }
}

/// A world of the unwound model.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathNode {
    /// An irreflexive world kept as it is.
    Irreflexive(usize),
    /// A nonempty walk inside one reflexive cluster.
    Path(Vec<usize>),
}

impl PathNode {
    /// Rightmost world.
    pub fn end(&self) -> usize {
        match self {
            PathNode::Irreflexive(k) => *k,
            PathNode::Path(p) => *p.last().expect("paths are nonempty"),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            PathNode::Irreflexive(_) => 1,
            PathNode::Path(p) => p.len(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Unwound {
    pub model: KripkeModel,
    /// Origin of each world of `model`, by index.
    pub nodes: Vec<PathNode>,
    /// `C(A)`: the largest number of the translation, -1 for box-free formulas.
    pub n: i64,
}

impl Unwound {
    /// Worlds standing for `k` whose path length is at most `bound`: `k` itself when
    /// irreflexive, otherwise the paths ending in `k`.
    pub fn copies(&self, k: usize, bound: i64) -> impl Iterator<Item = usize> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(move |(i, node)| match node {
                PathNode::Irreflexive(j) if *j == k => Some(i),
                PathNode::Path(p) if p.last() == Some(&k) && p.len() as i64 <= bound => Some(i),
                _ => None,
            })
    }
}

fn ensure_clusters(model: &KripkeModel) -> KripkeModel {
    if model.clusters().is_some() {
        model.clone()
    } else {
        model.clone().with_computed_clusters()
    }
}

/// Replaces each reflexive cluster by its walks of length at most `C(A) + 2`, ordered by
/// proper-prefix, and relates copies of distinct clusters whenever the clusters are related.
pub fn unwind(
    model: &KripkeModel,
    a: &Formula,
    t: &TranslationT,
) -> Result<Unwound, TransformError> {
    let model = ensure_clusters(model);
    let violations = validate_frame(&model, FrameClass::K4Frame);
    if !violations.is_empty() {
        return Err(TransformError::FrameViolation(violations));
    }
    let n = t_complexity(a, t)?.root();
    if let Some(q) = a.atoms().into_iter().find(|x| is_q_atom(x)) {
        return Err(TranslationError::QAtomCollision(q.to_string()).into());
    }
    if let Some(q) = model.valuation().keys().find(|x| is_q_atom(x)) {
        return Err(TransformError::QAtomCollision(q.clone()));
    }
    let max_len = (n + 2) as usize;
    let clusters = model.clusters().expect("clusters ensured").to_vec();

    let mut nodes = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for cluster in &clusters {
        let start = nodes.len();
        if cluster.len() == 1 && !model.is_reflexive(cluster[0]) {
            nodes.push(PathNode::Irreflexive(cluster[0]));
        } else {
            let mut layer: Vec<Vec<usize>> = cluster.iter().map(|&k| vec![k]).collect();
            for _ in 0..max_len {
                nodes.extend(layer.iter().cloned().map(PathNode::Path));
                layer = layer
                    .iter()
                    .flat_map(|p| {
                        cluster.iter().map(move |&k| {
                            let mut q = p.clone();
                            q.push(k);
                            q
                        })
                    })
                    .collect();
            }
        }
        members.push((start..nodes.len()).collect());
    }

    let mut owner = vec![0; model.len()];
    for (ci, cluster) in clusters.iter().enumerate() {
        for &k in cluster {
            owner[k] = ci;
        }
    }
    let mut cluster_edges = BTreeSet::new();
    for (k, l) in model.edges() {
        if owner[k] != owner[l] {
            cluster_edges.insert((owner[k], owner[l]));
        }
    }
    let mut edges = Vec::new();
    for &(ci, cj) in &cluster_edges {
        for &x in &members[ci] {
            for &y in &members[cj] {
                edges.push((x, y));
            }
        }
    }
    for m in &members {
        for &x in m {
            for &y in m {
                if let (PathNode::Path(p), PathNode::Path(q)) = (&nodes[x], &nodes[y]) {
                    if p.len() < q.len() && q.starts_with(p) {
                        edges.push((x, y));
                    }
                }
            }
        }
    }

    let mut valuation: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    for (atom, set) in model.valuation() {
        let image = nodes
            .iter()
            .enumerate()
            .filter(|(_, node)| set.contains(&node.end()))
            .map(|(i, _)| i)
            .collect();
        valuation.insert(atom.clone(), image);
    }
    for i in 0..=n.max(-1) {
        let bound = n + 2 - i;
        let set = nodes
            .iter()
            .enumerate()
            .filter(|(_, node)| match node {
                PathNode::Irreflexive(_) => true,
                PathNode::Path(p) => p.len() as i64 <= bound,
            })
            .map(|(j, _)| j)
            .collect();
        valuation.insert(format!("q{i}"), set);
    }

    let names = nodes
        .iter()
        .map(|node| match node {
            PathNode::Irreflexive(k) => model.name(*k).to_string(),
            PathNode::Path(p) => {
                let parts: Vec<&str> = p.iter().map(|&k| model.name(k)).collect();
                format!("({})", parts.join(","))
            }
        })
        .collect();
    let singletons = (0..nodes.len()).map(|i| vec![i]).collect();
    let out = KripkeModel::new(names, edges, valuation, Some(singletons))?;
    Ok(Unwound {
        model: out,
        nodes,
        n,
    })
}

/// Failure of the transfer property at one node for one subformula occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransferFailure {
    pub node: String,
    pub subformula: String,
    pub holds_at_node: bool,
    pub copy: String,
}

/// Outcome of checking the transfer property over all subformulas at every node.
#[derive(Clone, Debug, Serialize)]
pub struct TransferReport {
    pub unwound_nodes: usize,
    pub frame_ok: bool,
    pub checked: usize,
    pub failures: Vec<TransferFailure>,
}

impl TransferReport {
    pub fn ok(&self) -> bool {
        self.frame_ok && self.failures.is_empty()
    }
}

fn box_slice(a: &Formula, t: &TranslationT, pos: &Position) -> TranslationT {
    TranslationT(
        a.box_occurrences()
            .iter()
            .zip(t.as_slice())
            .filter(|(b, _)| b.0.starts_with(&pos.0))
            .map(|(_, n)| *n)
            .collect(),
    )
}

/// For each subformula occurrence `B` of `a` and each node `k` in `nodes`: `B` and `B^t` have
/// the same truth value at `k` when `k` is irreflexive, and at every path ending in `k` of
/// length at most `C(A) + 1 - C(B)` when `k` is reflexive.
pub fn transfer_report(
    model: &KripkeModel,
    a: &Formula,
    t: &TranslationT,
    nodes: &[usize],
) -> Result<TransferReport, TransformError> {
    let model = ensure_clusters(model);
    let unwound = unwind(&model, a, t)?;
    let cx = t_complexity(a, t)?;
    let frame_ok = validate_frame(&unwound.model, FrameClass::GLFrame).is_empty();
    let mut failures = Vec::new();
    let mut checked = 0;
    for (pos, c) in cx.iter() {
        let b = a.at(pos).expect("position from the formula");
        let bt = translate_k4_to_gl(b, &box_slice(a, t, pos))?;
        let before = model.truth_set(b);
        let after = unwound.model.truth_set(&bt);
        for &k in nodes {
            for copy in unwound.copies(k, unwound.n + 1 - c) {
                checked += 1;
                if after[copy] != before[k] {
                    failures.push(TransferFailure {
                        node: model.name(k).to_string(),
                        subformula: b.to_string(),
                        holds_at_node: before[k],
                        copy: unwound.model.name(copy).to_string(),
                    });
                }
            }
        }
    }
    Ok(TransferReport {
        unwound_nodes: unwound.model.len(),
        frame_ok,
        checked,
        failures,
    })
}

/// Whether the transfer property holds at `node`, in both directions and for every
/// subformula.
pub fn verify_transfer(
    model: &KripkeModel,
    a: &Formula,
    t: &TranslationT,
    node: usize,
) -> Result<bool, TransformError> {
    if node >= model.len() {
        return Err(ModelError::UnknownNode(format!("#{node}")).into());
    }
    Ok(transfer_report(model, a, t, &[node])?.ok())
}
