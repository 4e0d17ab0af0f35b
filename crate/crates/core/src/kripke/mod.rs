//! Finite Kripke models: forcing for modal and propositional semantics, frame-class
//! predicates, and bounded countermodel search.

mod dot;
mod enumerate;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Formula, PropFormula};

pub use dot::to_dot;
pub use enumerate::{
    enumerate_frames, enumerate_models, find_countermodel, find_countermodel_between,
    find_countermodel_within, find_refutation, Countermodel, Exhausted, SmallFrame,
};

/// Valuation key under which the minimal-logic semantics stores the nodes forcing `bot`.
pub const BOT_KEY: &str = "bot";

/// Propositional semantics variants over persistent models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntFlavor {
    Bpc,
    Ipc,
    Mpc,
    Fpl,
    Cpc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FrameClass {
    /// Finite transitive tree with clusters.
    K4Frame,
    /// K4 frame whose final clusters are reflexive (every node has a successor).
    KD4Frame,
    /// Finite transitive irreflexive frame.
    GLFrame,
    /// Finite reflexive transitive tree with clusters.
    S4Frame,
    /// Persistent models for a propositional logic.
    IntFrame(IntFlavor),
}

impl fmt::Display for FrameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameClass::IntFrame(fl) => write!(f, "IntFrame({fl:?})"),
            other => write!(f, "{other:?}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("model violates {class}: {violations:?}")]
    FrameViolation {
        class: String,
        violations: Vec<Violation>,
    },
    #[error("invalid model json: {0}")]
    Json(String),
}

/// One failed frame condition with the nodes that witness it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: String,
    pub nodes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    names: Vec<String>,
    succ: Vec<Vec<usize>>,
    valuation: BTreeMap<String, BTreeSet<usize>>,
    clusters: Option<Vec<Vec<usize>>>,
}

impl KripkeModel {
    /// Builds a model from node names, an edge list, a valuation and optional clusters,
    /// all indexed by position in `names`.
    pub fn new(
        names: Vec<String>,
        relation: impl IntoIterator<Item = (usize, usize)>,
        valuation: BTreeMap<String, BTreeSet<usize>>,
        clusters: Option<Vec<Vec<usize>>>,
    ) -> Result<Self, ModelError> {
        let n = names.len();
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name) {
                return Err(ModelError::DuplicateNode(name.clone()));
            }
        }
        let mut succ = vec![Vec::new(); n];
        for (a, b) in relation {
            if a >= n || b >= n {
                return Err(ModelError::UnknownNode(format!("#{}", a.max(b))));
            }
            succ[a].push(b);
        }
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        let bad = valuation
            .values()
            .flatten()
            .chain(clusters.iter().flatten().flatten())
            .find(|&&k| k >= n);
        if let Some(k) = bad {
            return Err(ModelError::UnknownNode(format!("#{k}")));
        }
        Ok(KripkeModel {
            names,
            succ,
            valuation,
            clusters,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, node: usize) -> &str {
        &self.names[node]
    }

    pub fn node_index(&self, name: &str) -> Result<usize, ModelError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ModelError::UnknownNode(name.to_string()))
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.succ[node]
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.succ[a].binary_search(&b).is_ok()
    }

    pub fn is_reflexive(&self, node: usize) -> bool {
        self.related(node, node)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, s)| s.iter().map(move |&b| (a, b)))
    }

    pub fn valuation(&self) -> &BTreeMap<String, BTreeSet<usize>> {
        &self.valuation
    }

    pub fn clusters(&self) -> Option<&[Vec<usize>]> {
        self.clusters.as_deref()
    }

    /// Nodes where `atom` holds; missing atoms hold nowhere.
    pub fn holds(&self, atom: &str, node: usize) -> bool {
        self.valuation
            .get(atom)
            .is_some_and(|set| set.contains(&node))
    }

    /// Replaces the cluster partition with the one induced by the relation: reflexive nodes
    /// that see each other share a cluster, every other node is a singleton.
    pub fn with_computed_clusters(mut self) -> Self {
        let n = self.len();
        let mut assigned = vec![false; n];
        let mut clusters = Vec::new();
        for k in 0..n {
            if assigned[k] {
                continue;
            }
            let mut cluster = vec![k];
            assigned[k] = true;
            if self.is_reflexive(k) {
                for l in k + 1..n {
                    if !assigned[l] && self.related(k, l) && self.related(l, k) {
                        assigned[l] = true;
                        cluster.push(l);
                    }
                }
            }
            clusters.push(cluster);
        }
        self.clusters = Some(clusters);
        self
    }

    fn check_node(&self, node: usize) -> Result<(), ModelError> {
        if node < self.len() {
            Ok(())
        } else {
            Err(ModelError::UnknownNode(format!("#{node}")))
        }
    }

    /// Truth set of a modal formula under classical forcing.
    pub fn truth_set(&self, f: &Formula) -> Vec<bool> {
        let n = self.len();
        match f {
            Formula::Atom(a) => (0..n).map(|k| self.holds(a, k)).collect(),
            Formula::Bot => vec![false; n],
            Formula::Top => vec![true; n],
            Formula::Neg(a) => self.truth_set(a).into_iter().map(|b| !b).collect(),
            Formula::And(a, b) => zip_with(self.truth_set(a), self.truth_set(b), |x, y| x && y),
            Formula::Or(a, b) => zip_with(self.truth_set(a), self.truth_set(b), |x, y| x || y),
            Formula::Imp(a, b) => zip_with(self.truth_set(a), self.truth_set(b), |x, y| !x || y),
            Formula::Box(a) => {
                let inner = self.truth_set(a);
                (0..n)
                    .map(|k| self.succ[k].iter().all(|&l| inner[l]))
                    .collect()
            }
        }
    }

    /// Persistent-model forcing for propositional formulas. Implication quantifies over
    /// successors; `bot` is an ordinary persistent atom under the minimal flavor.
    pub fn int_truth_set(&self, f: &Formula, flavor: IntFlavor) -> Vec<bool> {
        let n = self.len();
        match f {
            Formula::Atom(a) => (0..n).map(|k| self.holds(a, k)).collect(),
            Formula::Bot if flavor == IntFlavor::Mpc => {
                (0..n).map(|k| self.holds(BOT_KEY, k)).collect()
            }
            Formula::Bot => vec![false; n],
            Formula::Top => vec![true; n],
            Formula::And(a, b) => zip_with(
                self.int_truth_set(a, flavor),
                self.int_truth_set(b, flavor),
                |x, y| x && y,
            ),
            Formula::Or(a, b) => zip_with(
                self.int_truth_set(a, flavor),
                self.int_truth_set(b, flavor),
                |x, y| x || y,
            ),
            Formula::Imp(a, b) => {
                let (ta, tb) = (self.int_truth_set(a, flavor), self.int_truth_set(b, flavor));
                (0..n)
                    .map(|k| self.succ[k].iter().all(|&l| !ta[l] || tb[l]))
                    .collect()
            }
            Formula::Neg(a) => {
                self.int_truth_set(&Formula::imp((**a).clone(), Formula::Bot), flavor)
            }
            // Boxes never occur in certified propositional formulas.
            Formula::Box(a) => self.int_truth_set(a, flavor),
        }
    }

    pub fn to_json(&self) -> ModelJson {
        let name = |k: &usize| self.names[*k].clone();
        ModelJson {
            nodes: self.names.clone(),
            relation: self.edges().map(|(a, b)| [name(&a), name(&b)]).collect(),
            clusters: self
                .clusters
                .as_ref()
                .map(|cs| cs.iter().map(|c| c.iter().map(name).collect()).collect()),
            valuation: self
                .valuation
                .iter()
                .map(|(atom, set)| (atom.clone(), set.iter().map(name).collect()))
                .collect(),
        }
    }

    pub fn from_json(json: &ModelJson) -> Result<Self, ModelError> {
        let index: HashMap<&str, usize> = json
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let lookup = |name: &String| {
            index
                .get(name.as_str())
                .copied()
                .ok_or_else(|| ModelError::UnknownNode(name.clone()))
        };
        let relation = json
            .relation
            .iter()
            .map(|[a, b]| Ok((lookup(a)?, lookup(b)?)))
            .collect::<Result<Vec<_>, ModelError>>()?;
        let valuation = json
            .valuation
            .iter()
            .map(|(atom, nodes)| {
                let set = nodes.iter().map(lookup).collect::<Result<_, _>>()?;
                Ok((atom.clone(), set))
            })
            .collect::<Result<_, ModelError>>()?;
        let clusters = json
            .clusters
            .as_ref()
            .map(|cs| {
                cs.iter()
                    .map(|c| c.iter().map(lookup).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        KripkeModel::new(json.nodes.clone(), relation, valuation, clusters)
    }

    pub fn from_json_str(text: &str) -> Result<Self, ModelError> {
        let json: ModelJson =
            serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        KripkeModel::from_json(&json)
    }
}

fn zip_with(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

/// Wire format: `{"nodes":[..],"relation":[[a,b],..],"clusters":[[..],..],"valuation":{"p":[..]}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelJson {
    pub nodes: Vec<String>,
    pub relation: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clusters: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

/// Classical forcing of a modal formula at a node.
pub fn check(model: &KripkeModel, node: usize, f: &Formula) -> Result<bool, ModelError> {
    model.check_node(node)?;
    Ok(model.truth_set(f)[node])
}

/// Persistent forcing of a propositional formula; the model must belong to the flavor's class.
pub fn check_int(
    model: &KripkeModel,
    node: usize,
    f: &PropFormula,
    flavor: IntFlavor,
) -> Result<bool, ModelError> {
    model.check_node(node)?;
    let class = FrameClass::IntFrame(flavor);
    let violations = validate_frame(model, class);
    if !violations.is_empty() {
        return Err(ModelError::FrameViolation {
            class: class.to_string(),
            violations,
        });
    }
    Ok(model.int_truth_set(f.formula(), flavor)[node])
}

/// Checks the class predicate; an empty result means the model belongs to the class.
pub fn validate_frame(model: &KripkeModel, class: FrameClass) -> Vec<Violation> {
    let mut v = Violations::new(model);
    match class {
        FrameClass::K4Frame => tree_with_clusters(model, &mut v),
        FrameClass::KD4Frame => {
            tree_with_clusters(model, &mut v);
            seriality(model, &mut v);
        }
        FrameClass::S4Frame => {
            reflexivity(model, &mut v);
            tree_with_clusters(model, &mut v);
        }
        FrameClass::GLFrame => {
            irreflexivity(model, &mut v);
            transitivity(model, &mut v);
        }
        FrameClass::IntFrame(flavor) => {
            match flavor {
                IntFlavor::Bpc => tree_with_clusters(model, &mut v),
                IntFlavor::Ipc | IntFlavor::Mpc => {
                    reflexivity(model, &mut v);
                    tree_with_clusters(model, &mut v);
                }
                IntFlavor::Fpl => {
                    irreflexivity(model, &mut v);
                    transitivity(model, &mut v);
                }
                IntFlavor::Cpc => {
                    if model.len() != 1 {
                        v.push("single-node", &[]);
                    }
                    reflexivity(model, &mut v);
                }
            }
            persistence(model, flavor, &mut v);
        }
    }
    v.out
}

struct Violations<'a> {
    model: &'a KripkeModel,
    out: Vec<Violation>,
}

impl<'a> Violations<'a> {
    fn new(model: &'a KripkeModel) -> Self {
        Violations {
            model,
            out: Vec::new(),
        }
    }

    fn push(&mut self, condition: &str, nodes: &[usize]) {
        self.out.push(Violation {
            condition: condition.to_string(),
            nodes: nodes
                .iter()
                .map(|&k| self.model.name(k).to_string())
                .collect(),
        });
    }
}

fn reflexivity(m: &KripkeModel, v: &mut Violations) {
    for k in 0..m.len() {
        if !m.is_reflexive(k) {
            v.push("reflexivity", &[k]);
        }
    }
}

fn irreflexivity(m: &KripkeModel, v: &mut Violations) {
    for k in 0..m.len() {
        if m.is_reflexive(k) {
            v.push("irreflexivity", &[k]);
        }
    }
}

fn transitivity(m: &KripkeModel, v: &mut Violations) {
    for a in 0..m.len() {
        for &b in m.successors(a) {
            for &c in m.successors(b) {
                if !m.related(a, c) {
                    v.push("transitivity", &[a, b, c]);
                    return;
                }
            }
        }
    }
}

fn seriality(m: &KripkeModel, v: &mut Violations) {
    for k in 0..m.len() {
        if m.successors(k).is_empty() {
            v.push("seriality", &[k]);
        }
    }
}

fn persistence(m: &KripkeModel, flavor: IntFlavor, v: &mut Violations) {
    for (atom, set) in m.valuation() {
        if atom == BOT_KEY && flavor != IntFlavor::Mpc {
            continue;
        }
        for &k in set {
            if let Some(&l) = m.successors(k).iter().find(|l| !set.contains(l)) {
                v.push(&format!("persistence:{atom}"), &[k, l]);
            }
        }
    }
}

/// Transitive, explicit clusters that agree with the relation, and a quotient that is a
/// rooted tree.
fn tree_with_clusters(m: &KripkeModel, v: &mut Violations) {
    transitivity(m, v);
    let Some(clusters) = m.clusters() else {
        v.push("clusters-missing", &[]);
        return;
    };
    let n = m.len();
    let mut owner = vec![None; n];
    for (ci, cluster) in clusters.iter().enumerate() {
        if cluster.is_empty() {
            v.push("cluster-partition", &[]);
        }
        for &k in cluster {
            if owner[k].is_some() {
                v.push("cluster-partition", &[k]);
            }
            owner[k] = Some(ci);
        }
    }
    if let Some(k) = owner.iter().position(Option::is_none) {
        v.push("cluster-partition", &[k]);
        return;
    }
    let owner: Vec<usize> = owner.into_iter().map(Option::unwrap).collect();
    for cluster in clusters {
        if cluster.len() == 1 {
            continue;
        }
        for &a in cluster {
            for &b in cluster {
                if !m.related(a, b) {
                    v.push("cluster-coherence", &[a, b]);
                    return;
                }
            }
        }
    }
    // Quotient relation between distinct clusters must be uniform and antisymmetric.
    let c = clusters.len();
    let mut above = vec![vec![false; c]; c];
    for (a, b) in m.edges() {
        let (ca, cb) = (owner[a], owner[b]);
        if ca != cb {
            above[ca][cb] = true;
        }
    }
    for i in 0..c {
        for j in 0..c {
            if !above[i][j] {
                continue;
            }
            if above[j][i] {
                v.push("cluster-maximality", &[clusters[i][0], clusters[j][0]]);
                return;
            }
            for &a in &clusters[i] {
                for &b in &clusters[j] {
                    if !m.related(a, b) {
                        v.push("cluster-uniformity", &[a, b]);
                        return;
                    }
                }
            }
        }
    }
    let roots: Vec<usize> = (0..c).filter(|&j| (0..c).all(|i| !above[i][j])).collect();
    if roots.len() != 1 {
        let reps: Vec<usize> = roots.iter().map(|&r| clusters[r][0]).collect();
        v.push("tree-root", &reps);
    }
    for j in 0..c {
        let preds: Vec<usize> = (0..c).filter(|&i| above[i][j]).collect();
        for (x, &a) in preds.iter().enumerate() {
            for &b in &preds[x + 1..] {
                if !above[a][b] && !above[b][a] {
                    v.push(
                        "tree-branching",
                        &[clusters[j][0], clusters[a][0], clusters[b][0]],
                    );
                    return;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_modal, parse_prop};

    pub(crate) fn model(
        n: usize,
        edges: &[(usize, usize)],
        val: &[(&str, &[usize])],
        clusters: Option<Vec<Vec<usize>>>,
    ) -> KripkeModel {
        KripkeModel::new(
            (0..n).map(|i| format!("k{i}")).collect(),
            edges.iter().copied(),
            val.iter()
                .map(|(a, ks)| (a.to_string(), ks.iter().copied().collect()))
                .collect(),
            clusters,
        )
        .unwrap()
    }

    #[test]
    fn irreflexive_point_refutes_t_for_bot() {
        let m = model(1, &[], &[], Some(vec![vec![0]]));
        assert!(!check(&m, 0, &parse_modal("[]bot -> bot").unwrap()).unwrap());
    }

    #[test]
    fn reflexive_point_refutes_lob() {
        let m = model(1, &[(0, 0)], &[], Some(vec![vec![0]]));
        let lob = parse_modal("[]([]p -> p) -> []p").unwrap();
        assert!(!check(&m, 0, &lob).unwrap());
    }

    #[test]
    fn chain_forcing() {
        let m = model(2, &[(0, 1)], &[("p", &[1])], None);
        assert!(check(&m, 0, &parse_modal("[]p").unwrap()).unwrap());
        assert!(!check(&m, 0, &parse_modal("p").unwrap()).unwrap());
        assert_eq!(
            check(&m, 7, &Formula::Top),
            Err(ModelError::UnknownNode("#7".into()))
        );
    }

    #[test]
    fn minimal_point_forcing_bot() {
        let m = model(1, &[(0, 0)], &[(BOT_KEY, &[0])], Some(vec![vec![0]]));
        let f = parse_prop("bot -> p").unwrap();
        assert!(!check_int(&m, 0, &f, IntFlavor::Mpc).unwrap());
        assert!(check_int(&m, 0, &f, IntFlavor::Ipc).unwrap());
    }

    #[test]
    fn excluded_middle_fails_on_two_node_chain() {
        let m = model(2, &[(0, 0), (0, 1), (1, 1)], &[("p", &[1])], None).with_computed_clusters();
        let f = parse_prop("p \\/ ~p").unwrap();
        assert!(!check_int(&m, 0, &f, IntFlavor::Ipc).unwrap());
        let t = parse_prop("top -> top").unwrap();
        for flavor in [IntFlavor::Ipc, IntFlavor::Mpc, IntFlavor::Bpc] {
            assert!(check_int(&m, 0, &t, flavor).unwrap());
        }
    }

    #[test]
    fn check_int_rejects_non_persistent_models() {
        let m = model(2, &[(0, 0), (0, 1), (1, 1)], &[("p", &[0])], None).with_computed_clusters();
        let f = parse_prop("p").unwrap();
        assert!(matches!(
            check_int(&m, 0, &f, IntFlavor::Ipc),
            Err(ModelError::FrameViolation { .. })
        ));
    }

    #[test]
    fn frame_violations_name_witnesses() {
        let refl = model(1, &[(0, 0)], &[], None);
        let v = validate_frame(&refl, FrameClass::GLFrame);
        assert_eq!(
            v,
            vec![Violation {
                condition: "irreflexivity".into(),
                nodes: vec!["k0".into()]
            }]
        );
        let chain = model(
            3,
            &[(0, 1), (1, 2)],
            &[],
            Some(vec![vec![0], vec![1], vec![2]]),
        );
        let v = validate_frame(&chain, FrameClass::K4Frame);
        assert_eq!(v[0].condition, "transitivity");
        assert_eq!(v[0].nodes, ["k0", "k1", "k2"]);
    }

    #[test]
    fn tree_conditions() {
        // Two roots.
        let forest = model(2, &[], &[], Some(vec![vec![0], vec![1]]));
        assert_eq!(
            validate_frame(&forest, FrameClass::K4Frame)[0].condition,
            "tree-root"
        );
        assert!(validate_frame(&forest, FrameClass::GLFrame).is_empty());
        // Diamond: 0 -> 1, 0 -> 2, 1 -> 3, 2 -> 3.
        let diamond = model(
            4,
            &[(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)],
            &[],
            Some(vec![vec![0], vec![1], vec![2], vec![3]]),
        );
        assert_eq!(
            validate_frame(&diamond, FrameClass::K4Frame)[0].condition,
            "tree-branching"
        );
        // Proper cluster.
        let cl = model(
            3,
            &[(0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (1, 2)],
            &[],
            Some(vec![vec![0, 1], vec![2]]),
        );
        assert!(validate_frame(&cl, FrameClass::K4Frame).is_empty());
        assert_eq!(
            validate_frame(&cl, FrameClass::KD4Frame)[0].condition,
            "seriality"
        );
        let split = model(
            2,
            &[(0, 0), (0, 1), (1, 0), (1, 1)],
            &[],
            Some(vec![vec![0], vec![1]]),
        );
        assert_eq!(
            validate_frame(&split, FrameClass::S4Frame)[0].condition,
            "cluster-maximality"
        );
        let missing = model(1, &[], &[], None);
        assert_eq!(
            validate_frame(&missing, FrameClass::K4Frame)[0].condition,
            "clusters-missing"
        );
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"nodes":["k0","k1","k2"],"relation":[["k0","k1"],["k0","k2"],["k1","k1"],["k1","k2"],["k2","k1"],["k2","k2"]],"clusters":[["k0"],["k1","k2"]],"valuation":{"p":["k1"]}}"#;
        let m = KripkeModel::from_json_str(text).unwrap();
        assert!(validate_frame(&m, FrameClass::K4Frame).is_empty());
        let back = serde_json::to_string(&m.to_json()).unwrap();
        assert_eq!(KripkeModel::from_json_str(&back).unwrap(), m);
        assert!(matches!(
            KripkeModel::from_json_str(r#"{"nodes":["a"],"relation":[["a","b"]]}"#),
            Err(ModelError::UnknownNode(_))
        ));
    }
}
