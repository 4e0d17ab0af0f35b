//! Modal and propositional formulas, sequents, and their ASCII surface syntax.
//!
//! Grammar (loosest binding first):
//!
//! ```text
//! formula := disj ( "->" formula )?
//! disj    := conj ( "\/" disj )?
//! conj    := unary ( "/\" conj )?
//! unary   := "~" unary | "[]" unary | atom | "bot" | "top" | "(" formula ")"
//! atom    := [a-z][a-z0-9_]*
//! ```
//!
//! All binary connectives associate to the right.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A formula of the modal language. Propositional formulas are the box-free fragment.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Arc<str>),
    Bot,
    Top,
    Neg(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Imp(Arc<Formula>, Arc<Formula>),
    Box(Arc<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Self {
        Formula::Atom(Arc::from(name))
    }

    pub fn neg(f: Formula) -> Self {
        Formula::Neg(Arc::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Arc::new(a), Arc::new(b))
    }

    pub fn boxed(f: Formula) -> Self {
        Formula::Box(Arc::new(f))
    }

    /// `a <-> b` as `(a -> b) /\ (b -> a)`.
    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
    }

    /// Right-nested conjunction; the empty conjunction is `top`.
    pub fn conj<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        let mut items: Vec<Formula> = items.into_iter().collect();
        match items.pop() {
            None => Formula::Top,
            Some(last) => items
                .into_iter()
                .rev()
                .fold(last, |acc, f| Formula::and(f, acc)),
        }
    }

    /// Right-nested disjunction; the empty disjunction is `bot`.
    pub fn disj<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        let mut items: Vec<Formula> = items.into_iter().collect();
        match items.pop() {
            None => Formula::Bot,
            Some(last) => items
                .into_iter()
                .rev()
                .fold(last, |acc, f| Formula::or(f, acc)),
        }
    }

    pub fn is_box(&self) -> bool {
        matches!(self, Formula::Box(_))
    }

    /// The scope of an outermost box, if any.
    pub fn unbox(&self) -> Option<&Formula> {
        match self {
            Formula::Box(f) => Some(f),
            _ => None,
        }
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::Bot | Formula::Top => vec![],
            Formula::Neg(f) | Formula::Box(f) => vec![f],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => vec![a, b],
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Formula::size)
            .sum::<usize>()
    }

    /// Number of connective nodes (everything except atoms and constants).
    pub fn connectives(&self) -> usize {
        self.size() - self.leaves()
    }

    fn leaves(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bot | Formula::Top => 1,
            _ => self.children().into_iter().map(Formula::leaves).sum(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Arc<str>>) {
        if let Formula::Atom(name) = self {
            out.insert(name.clone());
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    pub fn is_box_free(&self) -> bool {
        self.modal_degree() == 0
    }

    /// Maximum nesting depth of boxes.
    pub fn modal_degree(&self) -> usize {
        let inner = self
            .children()
            .into_iter()
            .map(Formula::modal_degree)
            .max()
            .unwrap_or(0);
        if self.is_box() {
            inner + 1
        } else {
            inner
        }
    }

    /// Box nodes in preorder: left to right, outer boxes before the boxes in their scope.
    /// Witnesses and translations are indexed by this order.
    pub fn box_occurrences(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.walk_boxes(&mut Vec::new(), &mut out);
        out
    }

    fn walk_boxes(&self, path: &mut Vec<u8>, out: &mut Vec<Position>) {
        if self.is_box() {
            out.push(Position(path.clone()));
        }
        for (i, c) in self.children().into_iter().enumerate() {
            path.push(i as u8);
            c.walk_boxes(path, out);
            path.pop();
        }
    }

    pub fn box_count(&self) -> usize {
        let own = usize::from(self.is_box());
        own + self
            .children()
            .into_iter()
            .map(Formula::box_count)
            .sum::<usize>()
    }

    /// The subformula at `pos`, if the path is valid.
    pub fn at(&self, pos: &Position) -> Option<&Formula> {
        pos.0
            .iter()
            .try_fold(self, |f, &i| f.children().get(i as usize).copied())
    }

    /// Distinct subformulas of the form `[]B`, in box-occurrence order.
    pub fn boxed_subformulas(&self) -> Vec<Formula> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for pos in self.box_occurrences() {
            let f = self.at(&pos).expect("occurrence path is valid").clone();
            if seen.insert(f.clone()) {
                out.push(f);
            }
        }
        out
    }

    /// All subformula occurrences in preorder.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = vec![self];
        for c in self.children() {
            out.extend(c.subformulas());
        }
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Imp(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Neg(_) | Formula::Box(_) => 4,
            Formula::Atom(_) | Formula::Bot | Formula::Top => 5,
        }
    }
}

/// Path from the root to a subformula; each step picks a child index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position(pub Vec<u8>);

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(out: &mut fmt::Formatter<'_>, c: &Formula, parens: bool) -> fmt::Result {
            if parens {
                write!(out, "({c})")
            } else {
                write!(out, "{c}")
            }
        }
        let prec = self.precedence();
        match self {
            Formula::Atom(name) => write!(f, "{name}"),
            Formula::Bot => write!(f, "bot"),
            Formula::Top => write!(f, "top"),
            Formula::Neg(c) | Formula::Box(c) => {
                f.write_str(if self.is_box() { "[]" } else { "~" })?;
                child(f, c, c.precedence() < prec)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                let op = match self {
                    Formula::And(..) => " /\\ ",
                    Formula::Or(..) => " \\/ ",
                    _ => " -> ",
                };
                child(f, a, a.precedence() <= prec)?;
                f.write_str(op)?;
                child(f, b, b.precedence() < prec)
            }
        }
    }
}

/// A formula certified box-free, with `~A` stored as `A -> bot`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropFormula(Formula);

impl PropFormula {
    /// Certifies a box-free formula, unfolding negations. Reserved atoms are rejected.
    pub fn new(f: Formula) -> Result<Self, ParseError> {
        if !f.is_box_free() {
            return Err(ParseError::NotPropositional);
        }
        if let Some(name) = f.atoms().into_iter().find(|a| is_reserved_atom(a)) {
            return Err(ParseError::ReservedAtom(name.to_string()));
        }
        Ok(PropFormula(unfold_negation(&f)))
    }

    pub fn formula(&self) -> &Formula {
        &self.0
    }

    pub fn into_formula(self) -> Formula {
        self.0
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn unfold_negation(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) | Formula::Bot | Formula::Top => f.clone(),
        Formula::Neg(a) => Formula::imp(unfold_negation(a), Formula::Bot),
        Formula::And(a, b) => Formula::and(unfold_negation(a), unfold_negation(b)),
        Formula::Or(a, b) => Formula::or(unfold_negation(a), unfold_negation(b)),
        Formula::Imp(a, b) => Formula::imp(unfold_negation(a), unfold_negation(b)),
        Formula::Box(a) => Formula::boxed(unfold_negation(a)),
    }
}

/// Name of the fresh atom used by the weak BHK translation.
pub const WEAK_BHK_ATOM: &str = "qw";

/// Names generated for fresh atoms: `q0`, `q1`, ... and `qw`.
pub fn is_reserved_atom(name: &str) -> bool {
    name == WEAK_BHK_ATOM || is_q_atom(name)
}

/// `q` followed by one or more digits.
pub fn is_q_atom(name: &str) -> bool {
    name.len() > 1 && name.starts_with('q') && name[1..].bytes().all(|b| b.is_ascii_digit())
}

pub fn q_atom(i: usize) -> Formula {
    Formula::atom(&format!("q{i}"))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("atom `{0}` is reserved for generated atoms")]
    ReservedAtom(String),
    #[error("formula contains a box but a propositional formula was expected")]
    NotPropositional,
}

fn syntax(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        offset,
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Box,
    Neg,
    And,
    Or,
    Imp,
    LParen,
    RParen,
    Bot,
    Top,
    Atom(String),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let rest = &text[i..];
        let (tok, len) = if rest.starts_with("[]") {
            (Tok::Box, 2)
        } else if rest.starts_with("/\\") {
            (Tok::And, 2)
        } else if rest.starts_with("\\/") {
            (Tok::Or, 2)
        } else if rest.starts_with("->") {
            (Tok::Imp, 2)
        } else if c == b'~' {
            (Tok::Neg, 1)
        } else if c == b'(' {
            (Tok::LParen, 1)
        } else if c == b')' {
            (Tok::RParen, 1)
        } else if c.is_ascii_lowercase() {
            let len = rest
                .bytes()
                .take_while(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || *b == b'_')
                .count();
            let word = &rest[..len];
            let tok = match word {
                "bot" => Tok::Bot,
                "top" => Tok::Top,
                _ => Tok::Atom(word.to_string()),
            };
            (tok, len)
        } else {
            let ch = rest.chars().next().unwrap_or('?');
            return Err(syntax(i, format!("unexpected character `{ch}`")));
        };
        out.push((i, tok));
        i += len;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        if self.eat(&Tok::Imp) {
            Ok(Formula::imp(lhs, self.formula()?))
        } else {
            Ok(lhs)
        }
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.conj()?;
        if self.eat(&Tok::Or) {
            Ok(Formula::or(lhs, self.disj()?))
        } else {
            Ok(lhs)
        }
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.eat(&Tok::And) {
            Ok(Formula::and(lhs, self.conj()?))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let offset = self.offset();
        let tok = self.peek().cloned();
        self.pos += 1;
        match tok {
            Some(Tok::Neg) => Ok(Formula::neg(self.unary()?)),
            Some(Tok::Box) => Ok(Formula::boxed(self.unary()?)),
            Some(Tok::Bot) => Ok(Formula::Bot),
            Some(Tok::Top) => Ok(Formula::Top),
            Some(Tok::Atom(name)) => Ok(Formula::atom(&name)),
            Some(Tok::LParen) => {
                let inner = self.formula()?;
                if self.eat(&Tok::RParen) {
                    Ok(inner)
                } else {
                    Err(syntax(self.offset(), "expected `)`"))
                }
            }
            Some(_) => Err(syntax(offset, "expected a formula")),
            None => Err(syntax(offset, "unexpected end of input")),
        }
    }
}

/// Parses a modal formula.
pub fn parse_modal(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.formula()?;
    if p.pos < p.toks.len() {
        return Err(syntax(p.offset(), "unexpected trailing input"));
    }
    Ok(f)
}

/// Parses a propositional formula: no boxes, no reserved atoms, `~A` unfolded to `A -> bot`.
pub fn parse_prop(text: &str) -> Result<PropFormula, ParseError> {
    PropFormula::new(parse_modal(text)?)
}

/// `Gamma => Delta` over ordered sequences of formulas.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Sequent {
    pub antecedent: Vec<Formula>,
    pub succedent: Vec<Formula>,
}

impl Sequent {
    pub fn new(antecedent: Vec<Formula>, succedent: Vec<Formula>) -> Self {
        Sequent {
            antecedent,
            succedent,
        }
    }

    /// `=> f`
    pub fn goal(f: Formula) -> Self {
        Sequent::new(vec![], vec![f])
    }

    /// `/\Gamma -> \/Delta`
    pub fn as_formula(&self) -> Formula {
        Formula::imp(
            Formula::conj(self.antecedent.iter().cloned()),
            Formula::disj(self.succedent.iter().cloned()),
        )
    }

    pub fn atoms(&self) -> BTreeSet<Arc<str>> {
        self.antecedent
            .iter()
            .chain(&self.succedent)
            .flat_map(Formula::atoms)
            .collect()
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |fs: &[Formula]| {
            fs.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        let (l, r) = (join(&self.antecedent), join(&self.succedent));
        match (l.is_empty(), r.is_empty()) {
            (true, true) => write!(f, "=>"),
            (true, false) => write!(f, "=> {r}"),
            (false, true) => write!(f, "{l} =>"),
            (false, false) => write!(f, "{l} => {r}"),
        }
    }
}

/// Parses `A, B => C, D`. Either side may be empty; a string without `=>` is read as `=> A`.
pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let side = |part: &str, base: usize| -> Result<Vec<Formula>, ParseError> {
        if part.trim().is_empty() {
            return Ok(vec![]);
        }
        let mut out = Vec::new();
        let mut start = 0;
        for piece in part.split(',') {
            out.push(parse_modal(piece).map_err(|e| shift(e, base + start))?);
            start += piece.len() + 1;
        }
        Ok(out)
    };
    match text.find("=>") {
        Some(i) => Ok(Sequent::new(
            side(&text[..i], 0)?,
            side(&text[i + 2..], i + 2)?,
        )),
        None => Ok(Sequent::goal(parse_modal(text)?)),
    }
}

fn shift(e: ParseError, by: usize) -> ParseError {
    match e {
        ParseError::Syntax { offset, message } => ParseError::Syntax {
            offset: offset + by,
            message,
        },
        other => other,
    }
}
