//! Bounded model enumeration over bitmask frames.
//!
//! Frames are generated per class: rooted trees of clusters up to isomorphism for the
//! tree-with-clusters classes, naturally labelled strict partial orders for GL. Each frame
//! is then paired with every valuation (every up-closed valuation for persistent classes).
//! Ordering is by node count, then adjacency rows, then valuation index.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::{validate_frame, FrameClass, IntFlavor, KripkeModel, BOT_KEY};
use crate::syntax::Formula;

/// Largest frame the bitmask representation supports.
pub const MAX_SMALL_NODES: usize = 16;

type Mask = u32;

/// A frame on at most [`MAX_SMALL_NODES`] nodes with successor sets as bitmasks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallFrame {
    pub succ: Vec<Mask>,
    pub clusters: Vec<Vec<usize>>,
}

impl SmallFrame {
    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    fn full(&self) -> Mask {
        ((1u64 << self.len()) - 1) as Mask
    }

    /// All up-closed node sets, in increasing mask order.
    fn up_sets(&self) -> Vec<Mask> {
        (0..=self.full())
            .filter(|&m| (0..self.len()).all(|k| m & (1 << k) == 0 || self.succ[k] & !m == 0))
            .collect()
    }

    pub fn to_model(&self, atoms: &[Arc<str>], masks: &[Mask]) -> KripkeModel {
        let n = self.len();
        let edges = (0..n).flat_map(|a| {
            (0..n)
                .filter(move |&b| self.succ[a] & (1 << b) != 0)
                .map(move |b| (a, b))
        });
        let valuation: BTreeMap<String, BTreeSet<usize>> = atoms
            .iter()
            .zip(masks)
            .map(|(a, &m)| {
                (
                    a.to_string(),
                    (0..n).filter(|&k| m & (1 << k) != 0).collect(),
                )
            })
            .collect();
        KripkeModel::new(
            (0..n).map(|i| format!("k{i}")).collect(),
            edges,
            valuation,
            Some(self.clusters.clone()),
        )
        .expect("generated frames are well formed")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ClusterKind {
    Irreflexive,
    Reflexive(usize),
}

impl ClusterKind {
    fn size(self) -> usize {
        match self {
            ClusterKind::Irreflexive => 1,
            ClusterKind::Reflexive(s) => s,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TreeFamily {
    Any,
    ReflexiveOnly,
    IrreflexiveOnly,
    SerialLeaves,
}

#[derive(Clone, Debug)]
struct Shape {
    root: ClusterKind,
    children: Vec<usize>,
    size: usize,
}

/// Rooted trees of clusters up to isomorphism, indexed so that ids grow with size.
fn tree_shapes(family: TreeFamily, max_nodes: usize) -> Vec<Shape> {
    let mut shapes: Vec<Shape> = Vec::new();
    for size in 1..=max_nodes {
        let mut kinds = Vec::new();
        if matches!(
            family,
            TreeFamily::Any | TreeFamily::IrreflexiveOnly | TreeFamily::SerialLeaves
        ) {
            kinds.push(ClusterKind::Irreflexive);
        }
        if family != TreeFamily::IrreflexiveOnly {
            kinds.extend((1..=size).map(ClusterKind::Reflexive));
        }
        let mut new = Vec::new();
        for root in kinds {
            if root.size() > size {
                continue;
            }
            let rest = size - root.size();
            let mut lists = Vec::new();
            child_multisets(&shapes, rest, shapes.len(), &mut Vec::new(), &mut lists);
            for children in lists {
                if family == TreeFamily::SerialLeaves
                    && children.is_empty()
                    && root == ClusterKind::Irreflexive
                {
                    continue;
                }
                new.push(Shape {
                    root,
                    children,
                    size,
                });
            }
        }
        shapes.extend(new);
    }
    shapes
}

fn child_multisets(
    shapes: &[Shape],
    remaining: usize,
    max_id: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if remaining == 0 {
        out.push(current.clone());
        return;
    }
    for id in (0..max_id).rev() {
        if shapes[id].size <= remaining {
            current.push(id);
            child_multisets(shapes, remaining - shapes[id].size, id + 1, current, out);
            current.pop();
        }
    }
}

fn flatten(shapes: &[Shape], id: usize) -> SmallFrame {
    let mut frame = SmallFrame {
        succ: Vec::new(),
        clusters: Vec::new(),
    };
    place(shapes, id, &mut frame);
    frame
}

/// Lays out a subtree in preorder; returns the mask of all its nodes.
fn place(shapes: &[Shape], id: usize, frame: &mut SmallFrame) -> Mask {
    let shape = &shapes[id];
    let start = frame.succ.len();
    let size = shape.root.size();
    let own: Mask = (((1u64 << size) - 1) << start) as Mask;
    frame.clusters.push((start..start + size).collect());
    frame.succ.extend(std::iter::repeat_n(0, size));
    let mut below: Mask = 0;
    for &c in &shape.children {
        below |= place(shapes, c, frame);
    }
    let reach = if matches!(shape.root, ClusterKind::Reflexive(_)) {
        own | below
    } else {
        below
    };
    for k in start..start + size {
        frame.succ[k] = reach;
    }
    own | below
}

/// Strict partial orders on `0..n` where every edge goes from a lower to a higher index.
fn natural_posets(max_nodes: usize, rooted: bool) -> Vec<SmallFrame> {
    let mut out = Vec::new();
    let mut level: Vec<Vec<Mask>> = vec![vec![]];
    for n in 1..=max_nodes {
        let mut next = Vec::new();
        for preds in &level {
            let j = preds.len();
            for p in 0..(1 as Mask) << j {
                if rooted && j > 0 && p & 1 == 0 {
                    continue;
                }
                let down_closed = (0..j).all(|a| p & (1 << a) == 0 || preds[a] & !p == 0);
                if down_closed {
                    let mut ext = preds.clone();
                    ext.push(p);
                    next.push(ext);
                }
            }
        }
        for preds in &next {
            let mut succ = vec![0 as Mask; n];
            for (b, &p) in preds.iter().enumerate() {
                for (a, s) in succ.iter_mut().enumerate() {
                    if p & (1 << a) != 0 {
                        *s |= 1 << b;
                    }
                }
            }
            out.push(SmallFrame {
                succ,
                clusters: (0..n).map(|k| vec![k]).collect(),
            });
        }
        level = next;
    }
    out
}

fn reflexive_point() -> SmallFrame {
    SmallFrame {
        succ: vec![1],
        clusters: vec![vec![0]],
    }
}

/// Frames of a class with at most `max_nodes` nodes. With `rooted`, only frames where node 0
/// sees (or, for a one-node frame, is) every node; for the tree classes every frame is rooted.
pub fn enumerate_frames(class: FrameClass, max_nodes: usize, rooted: bool) -> Vec<SmallFrame> {
    assert!(
        max_nodes <= MAX_SMALL_NODES,
        "at most {MAX_SMALL_NODES} nodes"
    );
    let family = match class {
        FrameClass::K4Frame | FrameClass::IntFrame(IntFlavor::Bpc) => Some(TreeFamily::Any),
        FrameClass::KD4Frame => Some(TreeFamily::SerialLeaves),
        FrameClass::S4Frame | FrameClass::IntFrame(IntFlavor::Ipc | IntFlavor::Mpc) => {
            Some(TreeFamily::ReflexiveOnly)
        }
        FrameClass::GLFrame | FrameClass::IntFrame(IntFlavor::Fpl) => None,
        FrameClass::IntFrame(IntFlavor::Cpc) => {
            return if max_nodes >= 1 {
                vec![reflexive_point()]
            } else {
                vec![]
            };
        }
    };
    let mut frames = match family {
        Some(family) => {
            let shapes = tree_shapes(family, max_nodes);
            (0..shapes.len()).map(|id| flatten(&shapes, id)).collect()
        }
        None => natural_posets(max_nodes, rooted),
    };
    frames.sort_by(|a: &SmallFrame, b: &SmallFrame| {
        a.len().cmp(&b.len()).then_with(|| a.succ.cmp(&b.succ))
    });
    frames
}

fn atoms_for(class: FrameClass, atoms: &BTreeSet<Arc<str>>) -> Vec<Arc<str>> {
    let mut out: Vec<Arc<str>> = atoms.iter().cloned().collect();
    if class == FrameClass::IntFrame(IntFlavor::Mpc) && !out.iter().any(|a| &**a == BOT_KEY) {
        out.push(Arc::from(BOT_KEY));
    }
    out
}

fn persistent(class: FrameClass) -> bool {
    matches!(class, FrameClass::IntFrame(_))
}

/// Per-atom candidate masks for a frame.
fn candidate_masks(frame: &SmallFrame, class: FrameClass) -> Vec<Mask> {
    if persistent(class) {
        frame.up_sets()
    } else {
        (0..=frame.full()).collect()
    }
}

/// Calls `visit` on each valuation (one mask per atom) in odometer order, atom 0 fastest.
/// Stops early when `visit` returns false.
fn for_each_valuation(
    candidates: &[Mask],
    atoms: usize,
    mut visit: impl FnMut(&[Mask]) -> bool,
) -> bool {
    let mut idx = vec![0usize; atoms];
    let mut masks: Vec<Mask> = vec![candidates[0]; atoms];
    loop {
        if !visit(&masks) {
            return false;
        }
        let mut i = 0;
        loop {
            if i == atoms {
                return true;
            }
            idx[i] += 1;
            if idx[i] < candidates.len() {
                masks[i] = candidates[idx[i]];
                break;
            }
            idx[i] = 0;
            masks[i] = candidates[0];
            i += 1;
        }
    }
}

/// Every model of the class with at most `max_nodes` nodes over `atoms`, in canonical order.
/// Tree classes yield rooted trees of clusters; GL yields every naturally labelled strict
/// order. Isomorphic duplicates may occur.
pub fn enumerate_models(
    max_nodes: usize,
    class: FrameClass,
    atoms: &BTreeSet<Arc<str>>,
) -> impl Iterator<Item = KripkeModel> {
    let atoms = atoms_for(class, atoms);
    enumerate_frames(class, max_nodes, false)
        .into_iter()
        .flat_map(move |frame| {
            let cands = candidate_masks(&frame, class);
            let mut models = Vec::new();
            for_each_valuation(&cands, atoms.len(), |masks| {
                models.push(frame.to_model(&atoms, masks));
                true
            });
            models
        })
}

/// A model together with the node at which it refutes some formula or sequent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Countermodel {
    pub model: KripkeModel,
    pub node: usize,
}

impl Serialize for Countermodel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            model: super::ModelJson,
            node: &'a str,
        }
        Wire {
            model: self.model.to_json(),
            node: self.model.name(self.node),
        }
        .serialize(s)
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("model budget of {0} evaluations exhausted")]
pub struct Exhausted(pub u64);

#[derive(Clone, Copy, Debug)]
enum Op {
    Atom(usize),
    Const(bool),
    Neg(usize),
    And(usize, usize),
    Or(usize, usize),
    Imp(usize, usize),
    /// Successor-quantified implication of the persistent semantics.
    SuccImp(usize, usize),
    Box(usize),
}

/// A formula flattened into shared subterm slots, evaluated bitwise over a frame.
struct Program {
    ops: Vec<Op>,
    roots: Vec<usize>,
}

impl Program {
    #[cfg(test)]
    fn compile(f: &Formula, atoms: &[Arc<str>], int: Option<IntFlavor>) -> Self {
        Program::compile_all(std::slice::from_ref(f), atoms, int)
    }

    fn compile_all(fs: &[Formula], atoms: &[Arc<str>], int: Option<IntFlavor>) -> Self {
        let mut p = Program {
            ops: Vec::new(),
            roots: Vec::new(),
        };
        let mut memo = HashMap::new();
        for f in fs {
            let slot = p.emit(f, atoms, int, &mut memo);
            p.roots.push(slot);
        }
        p
    }

    fn emit(
        &mut self,
        f: &Formula,
        atoms: &[Arc<str>],
        int: Option<IntFlavor>,
        memo: &mut HashMap<Formula, usize>,
    ) -> usize {
        if let Some(&slot) = memo.get(f) {
            return slot;
        }
        let atom_slot = |name: &str| atoms.iter().position(|a| &**a == name);
        let op = match f {
            Formula::Atom(a) => match atom_slot(a) {
                Some(i) => Op::Atom(i),
                None => Op::Const(false),
            },
            Formula::Bot if int == Some(IntFlavor::Mpc) => match atom_slot(BOT_KEY) {
                Some(i) => Op::Atom(i),
                None => Op::Const(false),
            },
            Formula::Bot => Op::Const(false),
            Formula::Top => Op::Const(true),
            Formula::Neg(a) if int.is_some() => {
                let x = self.emit(a, atoms, int, memo);
                let bot = self.emit(&Formula::Bot, atoms, int, memo);
                Op::SuccImp(x, bot)
            }
            Formula::Neg(a) => Op::Neg(self.emit(a, atoms, int, memo)),
            Formula::And(a, b) => Op::And(
                self.emit(a, atoms, int, memo),
                self.emit(b, atoms, int, memo),
            ),
            Formula::Or(a, b) => Op::Or(
                self.emit(a, atoms, int, memo),
                self.emit(b, atoms, int, memo),
            ),
            Formula::Imp(a, b) => {
                let (x, y) = (
                    self.emit(a, atoms, int, memo),
                    self.emit(b, atoms, int, memo),
                );
                if int.is_some() {
                    Op::SuccImp(x, y)
                } else {
                    Op::Imp(x, y)
                }
            }
            Formula::Box(a) => Op::Box(self.emit(a, atoms, int, memo)),
        };
        self.ops.push(op);
        memo.insert(f.clone(), self.ops.len() - 1);
        self.ops.len() - 1
    }

    /// Evaluates up to 64 valuations at once. `lanes[i][k]` has bit j set when atom i holds at
    /// node k under valuation j; afterwards `scratch[slot * n + k]` holds the same for `slot`.
    fn eval_lanes(&self, frame: &SmallFrame, lanes: &[Vec<u64>], scratch: &mut Vec<u64>) {
        let n = frame.len();
        scratch.clear();
        scratch.resize(self.ops.len() * n, 0);
        fn all_succ(mut s: Mask, word: impl Fn(usize) -> u64) -> u64 {
            let mut acc = !0u64;
            while s != 0 {
                acc &= word(s.trailing_zeros() as usize);
                s &= s - 1;
            }
            acc
        }
        for (o, op) in self.ops.iter().enumerate() {
            for k in 0..n {
                let v = match *op {
                    Op::Atom(i) => lanes[i][k],
                    Op::Const(b) => {
                        if b {
                            !0
                        } else {
                            0
                        }
                    }
                    Op::Neg(a) => !scratch[a * n + k],
                    Op::And(a, b) => scratch[a * n + k] & scratch[b * n + k],
                    Op::Or(a, b) => scratch[a * n + k] | scratch[b * n + k],
                    Op::Imp(a, b) => !scratch[a * n + k] | scratch[b * n + k],
                    Op::SuccImp(a, b) => {
                        all_succ(frame.succ[k], |l| !scratch[a * n + l] | scratch[b * n + l])
                    }
                    Op::Box(a) => all_succ(frame.succ[k], |l| scratch[a * n + l]),
                };
                scratch[o * n + k] = v;
            }
        }
    }

    #[cfg(test)]
    fn eval(&self, frame: &SmallFrame, masks: &[Mask], scratch: &mut Vec<Mask>) -> Mask {
        let full = frame.full();
        scratch.clear();
        for op in &self.ops {
            let v = match *op {
                Op::Atom(i) => masks[i],
                Op::Const(b) => {
                    if b {
                        full
                    } else {
                        0
                    }
                }
                Op::Neg(a) => !scratch[a] & full,
                Op::And(a, b) => scratch[a] & scratch[b],
                Op::Or(a, b) => scratch[a] | scratch[b],
                Op::Imp(a, b) => (!scratch[a] | scratch[b]) & full,
                Op::SuccImp(a, b) => {
                    let bad = scratch[a] & !scratch[b];
                    frame.succ.iter().enumerate().fold(0, |acc, (k, &s)| {
                        if s & bad == 0 {
                            acc | (1 << k)
                        } else {
                            acc
                        }
                    })
                }
                Op::Box(a) => {
                    let bad = !scratch[a];
                    frame.succ.iter().enumerate().fold(0, |acc, (k, &s)| {
                        if s & bad == 0 {
                            acc | (1 << k)
                        } else {
                            acc
                        }
                    })
                }
            };
            scratch.push(v);
        }
        scratch[self.roots[0]]
    }
}

/// First rooted model of the class with at most `max_nodes` nodes whose root refutes `f`.
/// Persistent classes use the propositional forcing clauses.
pub fn find_countermodel(f: &Formula, class: FrameClass, max_nodes: usize) -> Option<Countermodel> {
    let mut unbounded = u64::MAX;
    find_countermodel_within(f, class, max_nodes, &mut unbounded)
        .expect("unbounded search cannot exhaust")
}

/// As [`find_countermodel`], charging one unit of `budget` per evaluated model.
///
/// Refutability within the bound is decided exactly: a formula refuted at some node of a
/// class model is refuted at the root of that node's generated submodel, which is rooted and
/// belongs to the same class.
pub fn find_countermodel_within(
    f: &Formula,
    class: FrameClass,
    max_nodes: usize,
    budget: &mut u64,
) -> Result<Option<Countermodel>, Exhausted> {
    find_countermodel_between(f, class, 1, max_nodes, budget)
}

/// As [`find_countermodel_within`], skipping frames with fewer than `min_nodes` nodes.
pub fn find_countermodel_between(
    f: &Formula,
    class: FrameClass,
    min_nodes: usize,
    max_nodes: usize,
    budget: &mut u64,
) -> Result<Option<Countermodel>, Exhausted> {
    find_refutation(
        &[],
        std::slice::from_ref(f),
        class,
        min_nodes,
        max_nodes,
        budget,
    )
}

/// How valuations are packed into 64-bit lanes for one frame. The `inner` fastest atoms are
/// laid out across lanes by precomputed blocks; the remaining atoms are constant per batch.
struct LaneLayout {
    inner: usize,
    blocks: Vec<LaneBlock>,
}

struct LaneBlock {
    /// Position of lane 0 within the inner odometer range.
    offset: usize,
    width: usize,
    rows: Vec<Vec<u64>>,
}

impl LaneLayout {
    fn new(cands: &[Mask], atoms: usize, nodes: usize) -> Self {
        let base = cands.len();
        // Largest inner group whose odometer range fits into one word; at least one atom.
        let mut inner = 0;
        let mut span = 1usize;
        while inner < atoms && span.saturating_mul(base) <= 64 {
            inner += 1;
            span *= base;
        }
        if inner == 0 && atoms > 0 {
            inner = 1;
            span = base;
        }
        let blocks = (0..span)
            .step_by(64)
            .map(|offset| {
                let width = (span - offset).min(64);
                let mut rows = vec![vec![0u64; nodes]; inner];
                for j in 0..width {
                    let mut pos = offset + j;
                    for row in rows.iter_mut() {
                        let mut m = cands[pos % base];
                        pos /= base;
                        while m != 0 {
                            row[m.trailing_zeros() as usize] |= 1 << j;
                            m &= m - 1;
                        }
                    }
                }
                LaneBlock {
                    offset,
                    width,
                    rows,
                }
            })
            .collect();
        LaneLayout { inner, blocks }
    }
}

/// First rooted model of the class whose root forces every formula of `ant` and none of
/// `suc`, under classical forcing or, for persistent classes, the propositional clauses.
pub fn find_refutation(
    ant: &[Formula],
    suc: &[Formula],
    class: FrameClass,
    min_nodes: usize,
    max_nodes: usize,
    budget: &mut u64,
) -> Result<Option<Countermodel>, Exhausted> {
    let all: Vec<Formula> = ant.iter().chain(suc).cloned().collect();
    let atoms = atoms_for(class, &all.iter().flat_map(Formula::atoms).collect());
    let int = match class {
        FrameClass::IntFrame(flavor) => Some(flavor),
        _ => None,
    };
    let program = Program::compile_all(&all, &atoms, int);
    let (ant_slots, suc_slots) = program.roots.split_at(ant.len());
    let start = *budget;
    let mut scratch = Vec::new();
    for frame in enumerate_frames(class, max_nodes, true) {
        if frame.len() < min_nodes {
            continue;
        }
        let cands = candidate_masks(&frame, class);
        let layout = LaneLayout::new(&cands, atoms.len(), frame.len());
        let n = frame.len();
        let mut lanes: Vec<Vec<u64>> = vec![vec![0u64; n]; atoms.len()];
        let mut outer = vec![0usize; atoms.len() - layout.inner];
        loop {
            for (i, &d) in outer.iter().enumerate() {
                let m = cands[d];
                for (k, word) in lanes[layout.inner + i].iter_mut().enumerate() {
                    *word = if m & (1 << k) != 0 { !0 } else { 0 };
                }
            }
            for block in &layout.blocks {
                let width = block
                    .width
                    .min(usize::try_from(*budget).unwrap_or(usize::MAX));
                if width == 0 {
                    return Err(Exhausted(start));
                }
                *budget -= width as u64;
                lanes[..layout.inner].clone_from_slice(&block.rows);
                program.eval_lanes(&frame, &lanes, &mut scratch);
                let mut hits = if width == 64 {
                    !0u64
                } else {
                    (1u64 << width) - 1
                };
                for &slot in ant_slots {
                    hits &= scratch[slot * n];
                }
                for &slot in suc_slots {
                    hits &= !scratch[slot * n];
                }
                if hits != 0 {
                    let mut inner_pos = block.offset + hits.trailing_zeros() as usize;
                    let mut masks = Vec::with_capacity(atoms.len());
                    for _ in 0..layout.inner {
                        masks.push(cands[inner_pos % cands.len()]);
                        inner_pos /= cands.len();
                    }
                    masks.extend(outer.iter().map(|&d| cands[d]));
                    let model = frame.to_model(&atoms, &masks);
                    debug_assert!(validate_frame(&model, class).is_empty());
                    return Ok(Some(Countermodel { model, node: 0 }));
                }
                if width < block.width {
                    return Err(Exhausted(start));
                }
            }
            // Odometer over the outer atoms, lowest first.
            let mut carried = true;
            for d in outer.iter_mut() {
                *d += 1;
                if *d < cands.len() {
                    carried = false;
                    break;
                }
                *d = 0;
            }
            if carried {
                break;
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::check;
    use crate::syntax::parse_modal;

    fn atoms(names: &[&str]) -> BTreeSet<Arc<str>> {
        names.iter().map(|a| Arc::from(*a)).collect()
    }

    /// Brute force: every relation on `n` labelled nodes passing `keep`.
    fn brute_force_relations(n: usize, keep: impl Fn(&[Mask]) -> bool) -> usize {
        let bits = n * n;
        (0u64..1 << bits)
            .filter(|code| {
                let succ: Vec<Mask> = (0..n)
                    .map(|a| ((code >> (a * n)) & ((1 << n) - 1)) as Mask)
                    .collect();
                keep(&succ)
            })
            .count()
    }

    fn transitive(succ: &[Mask]) -> bool {
        (0..succ.len()).all(|a| {
            (0..succ.len())
                .filter(|&b| succ[a] & (1 << b) != 0)
                .all(|b| succ[b] & !succ[a] == 0)
        })
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(
            enumerate_models(1, FrameClass::GLFrame, &atoms(&["p"])).count(),
            2
        );
        assert_eq!(
            enumerate_models(1, FrameClass::S4Frame, &atoms(&[])).count(),
            1
        );
        assert_eq!(enumerate_frames(FrameClass::GLFrame, 2, false).len(), 3);
    }

    #[test]
    fn natural_posets_cover_all_strict_orders_up_to_relabelling() {
        // Labelled strict orders on 3 nodes: 19. Each natural labelling has 3!/|Aut| relabellings;
        // instead check every enumerated frame is a strict order and that the
        // isomorphism classes (5 posets on 3 points) are all present.
        let frames: Vec<_> = enumerate_frames(FrameClass::GLFrame, 3, false)
            .into_iter()
            .filter(|f| f.len() == 3)
            .collect();
        let strict = |s: &[Mask]| transitive(s) && (0..s.len()).all(|k| s[k] & (1 << k) == 0);
        assert_eq!(brute_force_relations(3, strict), 19);
        assert!(frames.iter().all(|f| strict(&f.succ)));
        let mut classes = BTreeSet::new();
        for f in &frames {
            classes.insert(canonical(&f.succ));
        }
        assert_eq!(classes.len(), 5);
    }

    fn canonical(succ: &[Mask]) -> Vec<Mask> {
        let n = succ.len();
        let mut best: Option<Vec<Mask>> = None;
        let mut perm: Vec<usize> = (0..n).collect();
        permute(&mut perm, 0, &mut |p| {
            let mut img = vec![0 as Mask; n];
            for a in 0..n {
                for b in 0..n {
                    if succ[a] & (1 << b) != 0 {
                        img[p[a]] |= 1 << p[b];
                    }
                }
            }
            if best.as_ref().is_none_or(|b| img < *b) {
                best = Some(img);
            }
        });
        best.unwrap()
    }

    fn permute(p: &mut Vec<usize>, i: usize, f: &mut impl FnMut(&[usize])) {
        if i == p.len() {
            f(p);
            return;
        }
        for j in i..p.len() {
            p.swap(i, j);
            permute(p, i + 1, f);
            p.swap(i, j);
        }
    }

    #[test]
    fn cluster_trees_match_brute_force_isomorphism_classes() {
        // Rooted transitive trees with clusters on n nodes, counted by brute force over all
        // relations and reduced up to isomorphism.
        for n in 1..=3 {
            let mut brute = BTreeSet::new();
            let bits = n * n;
            for code in 0u64..1 << bits {
                let succ: Vec<Mask> = (0..n)
                    .map(|a| ((code >> (a * n)) & ((1 << n) - 1)) as Mask)
                    .collect();
                let model = SmallFrame {
                    succ: succ.clone(),
                    clusters: vec![],
                }
                .to_model(&[], &[])
                .with_computed_clusters();
                if validate_frame(&model, FrameClass::K4Frame).is_empty() {
                    brute.insert(canonical(&succ));
                }
            }
            let ours: BTreeSet<_> = enumerate_frames(FrameClass::K4Frame, n, true)
                .into_iter()
                .filter(|f| f.len() == n)
                .map(|f| canonical(&f.succ))
                .collect();
            assert_eq!(ours, brute, "n = {n}");
        }
    }

    #[test]
    fn generated_frames_pass_validation() {
        for class in [
            FrameClass::K4Frame,
            FrameClass::KD4Frame,
            FrameClass::S4Frame,
            FrameClass::GLFrame,
            FrameClass::IntFrame(IntFlavor::Fpl),
            FrameClass::IntFrame(IntFlavor::Cpc),
        ] {
            for frame in enumerate_frames(class, 4, false) {
                let model = frame.to_model(&[], &[]);
                assert!(
                    validate_frame(&model, class).is_empty(),
                    "{class}: {frame:?}"
                );
            }
        }
        for model in enumerate_models(3, FrameClass::IntFrame(IntFlavor::Mpc), &atoms(&["p"])) {
            assert!(validate_frame(&model, FrameClass::IntFrame(IntFlavor::Mpc)).is_empty());
        }
    }

    #[test]
    fn countermodels_for_simple_formulas() {
        let t = parse_modal("[]p -> p").unwrap();
        let cm = find_countermodel(&t, FrameClass::K4Frame, 1).unwrap();
        assert_eq!(cm.model.len(), 1);
        assert!(!cm.model.is_reflexive(0));
        assert!(!check(&cm.model, cm.node, &t).unwrap());
        let four = parse_modal("[]p -> [][]p").unwrap();
        assert!(find_countermodel(&four, FrameClass::K4Frame, 4).is_none());
        let ex = parse_modal("~[](~[]p /\\ p)").unwrap();
        assert!(find_countermodel(&ex, FrameClass::S4Frame, 4).is_none());
        let lob = parse_modal("[]([]p -> p) -> []p").unwrap();
        assert!(find_countermodel(&lob, FrameClass::GLFrame, 4).is_none());
        assert!(find_countermodel(&lob, FrameClass::K4Frame, 1).is_some());
    }

    #[test]
    fn fast_evaluator_agrees_with_model_checker() {
        let fs = [
            "[](p -> [] q) \\/ ~[]p",
            "[]([]p -> p) -> []p",
            "[]~[]p -> q",
            "~p /\\ [](q \\/ p)",
        ];
        for text in fs {
            let f = parse_modal(text).unwrap();
            let atoms: Vec<Arc<str>> = f.atoms().into_iter().collect();
            let prog = Program::compile(&f, &atoms, None);
            let mut scratch = Vec::new();
            for frame in enumerate_frames(FrameClass::K4Frame, 3, true) {
                let cands = candidate_masks(&frame, FrameClass::K4Frame);
                for_each_valuation(&cands, atoms.len(), |masks| {
                    let fast = prog.eval(&frame, masks, &mut scratch);
                    let model = frame.to_model(&atoms, masks);
                    let slow = model.truth_set(&f);
                    for (k, &b) in slow.iter().enumerate() {
                        assert_eq!(fast & (1 << k) != 0, b);
                    }
                    true
                });
            }
        }
    }

    /// Scalar reference for the batched search: first refuting valuation in odometer order.
    fn scalar_first(f: &Formula, class: FrameClass, max: usize) -> Option<KripkeModel> {
        let atoms = atoms_for(class, &f.atoms());
        let int = match class {
            FrameClass::IntFrame(fl) => Some(fl),
            _ => None,
        };
        let prog = Program::compile(f, &atoms, int);
        let mut scratch = Vec::new();
        for frame in enumerate_frames(class, max, true) {
            let cands = candidate_masks(&frame, class);
            let mut hit = None;
            for_each_valuation(&cands, atoms.len(), |masks| {
                if prog.eval(&frame, masks, &mut scratch) & 1 == 0 {
                    hit = Some(frame.to_model(&atoms, masks));
                    return false;
                }
                true
            });
            if hit.is_some() {
                return hit;
            }
        }
        None
    }

    #[test]
    fn batched_search_matches_scalar_search() {
        let fs = [
            "[]p -> p",
            "[](p -> q) \\/ []q -> [][]p",
            "~[]bot",
            "[]([]p -> p) -> []p",
            "p \\/ (p -> q /\\ r)",
        ];
        let classes = [
            FrameClass::K4Frame,
            FrameClass::KD4Frame,
            FrameClass::S4Frame,
            FrameClass::GLFrame,
            FrameClass::IntFrame(IntFlavor::Ipc),
            FrameClass::IntFrame(IntFlavor::Mpc),
            FrameClass::IntFrame(IntFlavor::Bpc),
        ];
        for text in fs {
            let f = parse_modal(text).unwrap();
            for class in classes {
                let fast = find_countermodel(&f, class, 4).map(|c| c.model);
                assert_eq!(fast, scalar_first(&f, class, 4), "{text} {class}");
            }
        }
    }

    #[test]
    fn sequent_refutation() {
        let p = parse_modal("p").unwrap();
        let q = parse_modal("q").unwrap();
        let imp = parse_modal("p -> q").unwrap();
        let class = FrameClass::IntFrame(IntFlavor::Bpc);
        let mut b = u64::MAX;
        let cm = find_refutation(&[p.clone(), imp.clone()], std::slice::from_ref(&q), class, 1, 3, &mut b)
            .unwrap()
            .unwrap();
        assert!(cm.model.holds("p", 0) && !cm.model.holds("q", 0));
        let ipc = FrameClass::IntFrame(IntFlavor::Ipc);
        assert!(find_refutation(&[p, imp], &[q], ipc, 1, 4, &mut b)
            .unwrap()
            .is_none());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let ex = parse_modal("~[](~[]p /\\ p)").unwrap();
        let mut budget = 10;
        assert_eq!(
            find_countermodel_within(&ex, FrameClass::S4Frame, 4, &mut budget),
            Err(Exhausted(10))
        );
    }
}
