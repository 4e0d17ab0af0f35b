//! Provability interpretations handled symbolically: witnesses, expansions, interpretation
//! terms, the BHK-style translations and the relativized K4 to GL translation.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{is_q_atom, q_atom, Formula, PropFormula, WEAK_BHK_ATOM};

/// Problems with a number assignment to box occurrences.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AssignmentError {
    #[error("expected {expected} numbers (one per box occurrence), got {found}")]
    LengthMismatch { expected: usize, found: usize },
    /// Box occurrence `outer` has a number not exceeding that of `inner`, which lies in its scope.
    #[error("box #{outer} has {outer_value}, which does not exceed {inner_value} on box #{inner} in its scope")]
    Order {
        outer: usize,
        inner: usize,
        outer_value: u64,
        inner_value: u64,
    },
    #[error("invalid number list `{0}`")]
    Parse(String),
}

/// Checks that `nums` has one entry per box occurrence of `f` (preorder) and that every box
/// carries a number larger than all numbers in its scope.
pub fn validate_assignment(f: &Formula, nums: &[u64]) -> Result<(), AssignmentError> {
    let occ = f.box_occurrences();
    if occ.len() != nums.len() {
        return Err(AssignmentError::LengthMismatch {
            expected: occ.len(),
            found: nums.len(),
        });
    }
    for (i, outer) in occ.iter().enumerate() {
        // Preorder puts the scope of box i right after it.
        for (j, inner) in occ.iter().enumerate().skip(i + 1) {
            if !inner.0.starts_with(&outer.0) {
                break;
            }
            if nums[i] <= nums[j] {
                return Err(AssignmentError::Order {
                    outer: i,
                    inner: j,
                    outer_value: nums[i],
                    inner_value: nums[j],
                });
            }
        }
    }
    Ok(())
}

fn parse_numbers(text: &str) -> Result<Vec<u64>, AssignmentError> {
    let t = text
        .trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',')
        .map(|s| s.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|_| AssignmentError::Parse(text.to_string()))
}

fn write_numbers(nums: &[u64], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (i, n) in nums.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{n}")?;
    }
    Ok(())
}

macro_rules! number_sequence {
    ($name:ident) => {
        #[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub Vec<u64>);

        impl $name {
            pub fn as_slice(&self) -> &[u64] {
                &self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }
        }

        impl FromStr for $name {
            type Err = AssignmentError;

            /// `"5,3,1,2"`; surrounding parentheses and the empty string are accepted.
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                parse_numbers(s).map($name)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write_numbers(&self.0, f)
            }
        }

        impl From<Vec<u64>> for $name {
            fn from(v: Vec<u64>) -> Self {
                $name(v)
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

number_sequence!(Witness);
number_sequence!(TranslationT);

/// `Ok(true)` iff every box's number exceeds the numbers inside its scope.
pub fn witness_check(wit: &Witness, f: &Formula) -> Result<bool, AssignmentError> {
    match validate_assignment(f, &wit.0) {
        Ok(()) => Ok(true),
        Err(AssignmentError::Order { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Each box gets the modal degree of its scope plus `start`.
pub fn canonical_witness(f: &Formula, start: u64) -> Witness {
    Witness(
        f.box_occurrences()
            .iter()
            .map(|pos| {
                let body = f.at(pos).and_then(Formula::unbox).expect("box occurrence");
                body.modal_degree() as u64 + start
            })
            .collect(),
    )
}

/// Rebuilds `f` bottom-up, handing each box (with its preorder number) to `on_box`.
fn map_boxes<T>(
    f: &Formula,
    nums: &[u64],
    next: &mut usize,
    on_box: &mut impl FnMut(u64, T) -> T,
    leaf: &mut impl FnMut(&Formula) -> T,
    node: &mut impl FnMut(&Formula, Vec<T>) -> T,
) -> T {
    match f {
        Formula::Box(body) => {
            let n = nums[*next];
            *next += 1;
            let inner = map_boxes(body, nums, next, on_box, leaf, node);
            on_box(n, inner)
        }
        Formula::Atom(_) | Formula::Bot | Formula::Top => leaf(f),
        _ => {
            let kids = f
                .children()
                .into_iter()
                .map(|c| map_boxes(c, nums, next, on_box, leaf, node))
                .collect();
            node(f, kids)
        }
    }
}

fn rebuild(f: &Formula, mut kids: Vec<Formula>) -> Formula {
    match f {
        Formula::Neg(_) => Formula::neg(kids.remove(0)),
        Formula::And(..) => {
            let b = kids.pop().unwrap();
            Formula::and(kids.pop().unwrap(), b)
        }
        Formula::Or(..) => {
            let b = kids.pop().unwrap();
            Formula::or(kids.pop().unwrap(), b)
        }
        Formula::Imp(..) => {
            let b = kids.pop().unwrap();
            Formula::imp(kids.pop().unwrap(), b)
        }
        Formula::Box(_) => Formula::boxed(kids.remove(0)),
        _ => f.clone(),
    }
}

/// A formula paired with the formula it expands.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Expansion {
    expanded: Formula,
    source: Formula,
}

impl Expansion {
    pub fn new(expanded: Formula, source: Formula) -> Option<Self> {
        is_expansion(&expanded, &source).then_some(Expansion { expanded, source })
    }

    pub fn expanded(&self) -> &Formula {
        &self.expanded
    }

    pub fn source(&self) -> &Formula {
        &self.source
    }
}

/// Whether `b` is obtained from `a` by replacing the scope of each box with a finite
/// disjunction of expansions of that scope. The disjunction may be bracketed either way.
pub fn is_expansion(b: &Formula, a: &Formula) -> bool {
    fn disjunction_of(b: &Formula, scope: &Formula) -> bool {
        if is_expansion(b, scope) {
            return true;
        }
        match b {
            Formula::Or(x, y) => disjunction_of(x, scope) && disjunction_of(y, scope),
            _ => false,
        }
    }
    match (b, a) {
        (Formula::Box(y), Formula::Box(x)) => disjunction_of(y, x),
        (Formula::Neg(y), Formula::Neg(x)) => is_expansion(y, x),
        (Formula::And(b1, b2), Formula::And(a1, a2))
        | (Formula::Or(b1, b2), Formula::Or(a1, a2))
        | (Formula::Imp(b1, b2), Formula::Imp(a1, a2)) => {
            is_expansion(b1, a1) && is_expansion(b2, a2)
        }
        _ => matches!(a, Formula::Atom(_) | Formula::Bot | Formula::Top) && a == b,
    }
}

/// Members of the expansion set of `a` with at most `max_disjuncts` disjuncts under each box
/// and size at most `max_size`. Disjuncts are ordered sequences with repetition, nested to
/// the right. The first element is `a` itself whenever it fits.
pub fn expansions(a: &Formula, max_disjuncts: usize, max_size: usize) -> Vec<Formula> {
    assert!(max_disjuncts >= 1, "max_disjuncts must be positive");
    let mut out = expand(a, max_disjuncts, max_size);
    let mut seen = HashSet::new();
    out.retain(|f| seen.insert(f.clone()));
    out
}

fn expand(a: &Formula, k: usize, max: usize) -> Vec<Formula> {
    match a {
        Formula::Atom(_) | Formula::Bot | Formula::Top => {
            if a.size() <= max {
                vec![a.clone()]
            } else {
                Vec::new()
            }
        }
        Formula::Neg(x) => expand(x, k, max.saturating_sub(1))
            .into_iter()
            .map(Formula::neg)
            .collect(),
        Formula::And(x, y) | Formula::Or(x, y) | Formula::Imp(x, y) => {
            let budget = max.saturating_sub(1);
            let min_right = y.size();
            let left = expand(x, k, budget.saturating_sub(min_right));
            let right = expand(y, k, budget.saturating_sub(x.size()));
            let mut out = Vec::new();
            for l in &left {
                for r in &right {
                    if l.size() + r.size() < max {
                        out.push(rebuild(a, vec![l.clone(), r.clone()]));
                    }
                }
            }
            out
        }
        Formula::Box(x) => {
            let budget = max.saturating_sub(1);
            let parts = expand(x, k, budget);
            let mut out = Vec::new();
            // Sequences of length 1..=k, shortest first, lexicographic in `parts` order.
            let mut frontier: Vec<Formula> = Vec::new();
            for len in 1..=k {
                let mut grown = Vec::new();
                if len == 1 {
                    grown.extend(parts.iter().cloned());
                } else {
                    // Prepend a disjunct so that nesting stays to the right.
                    for d in &parts {
                        for tail in &frontier {
                            if d.size() + tail.size() < budget {
                                grown.push(Formula::or(d.clone(), tail.clone()));
                            }
                        }
                    }
                }
                out.extend(grown.iter().map(|f| Formula::boxed(f.clone())));
                frontier = grown;
                if frontier.is_empty() {
                    break;
                }
            }
            out
        }
    }
}

/// Arithmetical sentences built from substituted atoms and indexed provability predicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum InterpretationTerm {
    Sigma(String),
    Falsum,
    Verum,
    Not(Box<InterpretationTerm>),
    And(Box<InterpretationTerm>, Box<InterpretationTerm>),
    Or(Box<InterpretationTerm>, Box<InterpretationTerm>),
    Imp(Box<InterpretationTerm>, Box<InterpretationTerm>),
    Pr(u64, Box<InterpretationTerm>),
}

impl InterpretationTerm {
    fn precedence(&self) -> u8 {
        match self {
            InterpretationTerm::Imp(..) => 1,
            InterpretationTerm::Or(..) => 2,
            InterpretationTerm::And(..) => 3,
            InterpretationTerm::Not(_) => 4,
            _ => 5,
        }
    }

    /// Pr indices in left-to-right order.
    pub fn pr_indices(&self) -> Vec<u64> {
        let mut out = Vec::new();
        self.collect_pr(&mut out);
        out
    }

    fn collect_pr(&self, out: &mut Vec<u64>) {
        match self {
            InterpretationTerm::Pr(n, b) => {
                out.push(*n);
                b.collect_pr(out);
            }
            InterpretationTerm::Not(a) => a.collect_pr(out),
            InterpretationTerm::And(a, b)
            | InterpretationTerm::Or(a, b)
            | InterpretationTerm::Imp(a, b) => {
                a.collect_pr(out);
                b.collect_pr(out);
            }
            _ => {}
        }
    }
}

impl fmt::Display for InterpretationTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(
            out: &mut fmt::Formatter<'_>,
            c: &InterpretationTerm,
            parens: bool,
        ) -> fmt::Result {
            if parens {
                write!(out, "({c})")
            } else {
                write!(out, "{c}")
            }
        }
        let prec = self.precedence();
        match self {
            InterpretationTerm::Sigma(s) => f.write_str(s),
            InterpretationTerm::Falsum => f.write_str("bot"),
            InterpretationTerm::Verum => f.write_str("top"),
            InterpretationTerm::Pr(n, body) => write!(f, "Pr_{n}({body})"),
            InterpretationTerm::Not(c) => {
                f.write_str("~")?;
                child(f, c, c.precedence() < prec)
            }
            InterpretationTerm::And(a, b)
            | InterpretationTerm::Or(a, b)
            | InterpretationTerm::Imp(a, b) => {
                let op = match self {
                    InterpretationTerm::And(..) => " /\\ ",
                    InterpretationTerm::Or(..) => " \\/ ",
                    _ => " -> ",
                };
                child(f, a, a.precedence() <= prec)?;
                f.write_str(op)?;
                child(f, b, b.precedence() < prec)
            }
        }
    }
}

/// Substitutes atoms through `sigma` (unmapped atoms render as `sigma(p)`) and reads the
/// i-th box as `Pr_{wit[i]}`.
pub fn interpret(
    a: &Formula,
    wit: &Witness,
    sigma: &BTreeMap<String, String>,
) -> Result<InterpretationTerm, AssignmentError> {
    validate_assignment(a, &wit.0)?;
    use InterpretationTerm as T;
    let mut next = 0;
    Ok(map_boxes(
        a,
        &wit.0,
        &mut next,
        &mut |n, body| T::Pr(n, Box::new(body)),
        &mut |leaf| match leaf {
            Formula::Atom(p) => T::Sigma(
                sigma
                    .get(&**p)
                    .cloned()
                    .unwrap_or_else(|| format!("sigma({p})")),
            ),
            Formula::Bot => T::Falsum,
            _ => T::Verum,
        },
        &mut |node, mut kids| {
            let mut two = || {
                let b = Box::new(kids.pop().unwrap());
                (Box::new(kids.pop().unwrap()), b)
            };
            match node {
                Formula::Neg(_) => T::Not(Box::new(kids.remove(0))),
                Formula::And(..) => {
                    let (x, y) = two();
                    T::And(x, y)
                }
                Formula::Or(..) => {
                    let (x, y) = two();
                    T::Or(x, y)
                }
                _ => {
                    let (x, y) = two();
                    T::Imp(x, y)
                }
            }
        },
    ))
}

/// Which provability reading of the propositional connectives to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// BHK: `bot` is the provability of falsity.
    B,
    /// Weak BHK: `bot` is the provability of the fresh atom `qw`.
    W,
    /// Goedel-style: `bot` is falsity itself.
    G,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown translation flavor `{0}` (expected b, w or g)")]
pub struct UnknownFlavor(pub String);

impl FromStr for Flavor {
    type Err = UnknownFlavor;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "b" => Ok(Flavor::B),
            "w" => Ok(Flavor::W),
            "g" => Ok(Flavor::G),
            _ => Err(UnknownFlavor(s.to_string())),
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::B => "b",
            Flavor::W => "w",
            Flavor::G => "g",
        })
    }
}

/// Clause-by-clause translation into the modal language. `A -> bot` is read as `~A`, which
/// agrees with the implication clause for b and w. `top` is kept as `top`.
pub fn translate_bhk(p: &PropFormula, flavor: Flavor) -> Formula {
    fn go(f: &Formula, flavor: Flavor) -> Formula {
        let bot = || match flavor {
            Flavor::B => Formula::boxed(Formula::Bot),
            Flavor::W => Formula::boxed(Formula::atom(WEAK_BHK_ATOM)),
            Flavor::G => Formula::Bot,
        };
        match f {
            Formula::Atom(_) => Formula::boxed(f.clone()),
            Formula::Bot => bot(),
            Formula::Top => Formula::Top,
            Formula::And(a, b) => Formula::and(go(a, flavor), go(b, flavor)),
            Formula::Or(a, b) => Formula::or(go(a, flavor), go(b, flavor)),
            Formula::Neg(a) => negation(go(a, flavor), flavor, bot()),
            Formula::Imp(a, b) if **b == Formula::Bot => negation(go(a, flavor), flavor, bot()),
            Formula::Imp(a, b) => Formula::boxed(Formula::imp(go(a, flavor), go(b, flavor))),
            Formula::Box(_) => unreachable!("propositional formulas are box-free"),
        }
    }
    fn negation(a: Formula, flavor: Flavor, bot: Formula) -> Formula {
        match flavor {
            Flavor::G => Formula::boxed(Formula::neg(a)),
            _ => Formula::boxed(Formula::imp(a, bot)),
        }
    }
    go(p.formula(), flavor)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslationError {
    #[error("invalid translation")]
    Invalid(#[from] AssignmentError),
    #[error("formula already uses the generated atom `{0}`")]
    QAtomCollision(String),
}

/// Replaces each `[]B` numbered n by `[](q0 /\ ... /\ qn -> B')`.
pub fn translate_k4_to_gl(a: &Formula, t: &TranslationT) -> Result<Formula, TranslationError> {
    validate_assignment(a, &t.0)?;
    if let Some(q) = a.atoms().into_iter().find(|x| is_q_atom(x)) {
        return Err(TranslationError::QAtomCollision(q.to_string()));
    }
    let mut next = 0;
    Ok(map_boxes(
        a,
        &t.0,
        &mut next,
        &mut |n, body| {
            let guard = Formula::conj((0..=n as usize).map(q_atom));
            Formula::boxed(Formula::imp(guard, body))
        },
        &mut |leaf| leaf.clone(),
        &mut |node, kids| rebuild(node, kids),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_modal, parse_prop};

    fn f(s: &str) -> Formula {
        parse_modal(s).unwrap()
    }

    #[test]
    fn witness_order() {
        let a = f("[](p -> q) \\/ [](~[]p -> []q)");
        assert!(witness_check(&"5,3,1,2".parse().unwrap(), &a).unwrap());
        assert!(!witness_check(&"5,1,3,2".parse().unwrap(), &a).unwrap());
        assert!(!witness_check(&"5,2,1,2".parse().unwrap(), &a).unwrap());
        assert!(witness_check(&Witness::default(), &f("p")).unwrap());
        assert!(!witness_check(&Witness(vec![1, 2]), &f("[][]p")).unwrap());
        assert!(witness_check(&Witness(vec![2, 1]), &f("[][]p")).unwrap());
        assert!(matches!(
            witness_check(&Witness(vec![1]), &f("[][]p")),
            Err(AssignmentError::LengthMismatch {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn canonical_witnesses() {
        assert_eq!(
            canonical_witness(&f("[]([]p /\\ q)"), 0),
            Witness(vec![1, 0])
        );
        assert_eq!(canonical_witness(&f("p -> q"), 7), Witness(vec![]));
        let w = canonical_witness(&f("[][]p"), 2);
        assert_eq!(w, Witness(vec![3, 2]));
        assert!(witness_check(&w, &f("[][]p")).unwrap());
    }

    #[test]
    fn number_lists_round_trip() {
        let w: Witness = "(5, 3,1,2)".parse().unwrap();
        assert_eq!(w.to_string(), "5,3,1,2");
        assert_eq!("".parse::<TranslationT>().unwrap(), TranslationT(vec![]));
        assert!("1,x".parse::<Witness>().is_err());
        assert_eq!(serde_json::to_string(&w).unwrap(), "\"5,3,1,2\"");
    }

    #[test]
    fn example_expansion() {
        let a = f("[]~[][]p");
        let b = f("[](~[]([]p \\/ []p) \\/ ~[][](p \\/ p))");
        assert!(is_expansion(&b, &a));
        assert!(is_expansion(&a, &a));
        assert!(!is_expansion(&f("q"), &f("p")));
        assert!(!is_expansion(&f("[](p \\/ q)"), &f("[]p")));
        assert!(expansions(&a, 2, 40).contains(&b));
        assert!(Expansion::new(b, a).is_some());
    }

    #[test]
    fn expansion_enumeration() {
        assert_eq!(expansions(&f("p"), 3, 10), vec![f("p")]);
        let e = expansions(&f("[]p"), 2, 64);
        assert_eq!(e, vec![f("[]p"), f("[](p \\/ p)")]);
        let e = expansions(&f("[][]p"), 2, 64);
        assert_eq!(e.len(), 6);
        assert_eq!(e[0], f("[][]p"));
        for x in &e {
            assert!(is_expansion(x, &f("[][]p")), "{x}");
        }
        assert_eq!(expansions(&f("[]p"), 2, 3), vec![f("[]p")]);
    }

    #[test]
    fn example_rendering() {
        let a = f("[](p -> q) \\/ [](~[]p -> []q)");
        let t = interpret(&a, &"5,3,1,2".parse().unwrap(), &BTreeMap::new()).unwrap();
        assert_eq!(
            t.to_string(),
            "Pr_5(sigma(p) -> sigma(q)) \\/ Pr_3(~Pr_1(sigma(p)) -> Pr_2(sigma(q)))"
        );
        assert_eq!(t.pr_indices(), vec![5, 3, 1, 2]);
        let sigma = BTreeMap::from([("p".to_string(), "phi".to_string())]);
        assert_eq!(
            interpret(&f("p"), &Witness::default(), &sigma)
                .unwrap()
                .to_string(),
            "phi"
        );
        assert_eq!(
            interpret(&f("[]p"), &Witness(vec![4]), &BTreeMap::new())
                .unwrap()
                .to_string(),
            "Pr_4(sigma(p))"
        );
        assert!(interpret(&f("[][]p"), &Witness(vec![0, 0]), &BTreeMap::new()).is_err());
    }

    #[test]
    fn bhk_clauses() {
        let tr = |s: &str, fl| translate_bhk(&parse_prop(s).unwrap(), fl);
        assert_eq!(tr("p -> q", Flavor::B), f("[]([]p -> []q)"));
        assert_eq!(tr("~p", Flavor::B), f("[]([]p -> []bot)"));
        assert_eq!(tr("bot", Flavor::W), f("[]qw"));
        assert_eq!(tr("bot", Flavor::G), f("bot"));
        assert_eq!(tr("~p", Flavor::W), f("[]([]p -> []qw)"));
        assert_eq!(tr("~p", Flavor::G), f("[]~[]p"));
        assert_eq!(tr("p /\\ q \\/ top", Flavor::G), f("[]p /\\ []q \\/ top"));
    }

    #[test]
    fn k4_to_gl_example() {
        let a = f("[]p -> [][]p");
        let out = translate_k4_to_gl(&a, &"1,2,1".parse().unwrap()).unwrap();
        assert_eq!(
            out,
            f("[](q0 /\\ q1 -> p) -> [](q0 /\\ q1 /\\ q2 -> [](q0 /\\ q1 -> p))")
        );
        assert_eq!(
            translate_k4_to_gl(&f("p -> q"), &TranslationT::default()).unwrap(),
            f("p -> q")
        );
        assert!(matches!(
            translate_k4_to_gl(&f("[][]p"), &TranslationT(vec![0, 1])),
            Err(TranslationError::Invalid(AssignmentError::Order { .. }))
        ));
        assert!(matches!(
            translate_k4_to_gl(&f("[]q1"), &TranslationT(vec![0])),
            Err(TranslationError::QAtomCollision(_))
        ));
    }
}
