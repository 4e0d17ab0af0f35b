//! Deterministic formula corpora: exhaustive enumeration in a canonical order, optionally
//! down-sampled with a seeded generator.

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::syntax::Formula;

/// Bounds of a corpus. Formulas range over `atoms`, `bot` and `top`, with at most
/// `max_connectives` connectives and modal degree at most `max_degree`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusParams {
    pub atoms: Vec<String>,
    pub max_connectives: usize,
    pub max_degree: usize,
    /// Keep this many formulas, chosen uniformly without replacement; `None` keeps all.
    pub sample: Option<usize>,
    pub seed: u64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            atoms: vec!["p".into(), "q".into()],
            max_connectives: 7,
            max_degree: 3,
            sample: Some(2000),
            seed: 1,
        }
    }
}

impl CorpusParams {
    /// The default corpus restricted to box-free formulas.
    pub fn box_free() -> Self {
        CorpusParams {
            max_degree: 0,
            ..CorpusParams::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    /// Rank in the canonical enumeration.
    pub index: u128,
    pub formula: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    pub params: CorpusParams,
    pub entries: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.entries.iter().map(|e| &e.formula)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `table[c][d]`: formulas with exactly `c` connectives and modal degree at most `d`.
///
/// Canonical order inside one connective count: negations, boxes, then conjunctions,
/// disjunctions and implications, each binary block split by the size of its left operand
/// and ordered by (left rank, right rank).
struct Counts {
    leaves: Vec<Formula>,
    table: Vec<Vec<u128>>,
}

impl Counts {
    fn new(params: &CorpusParams) -> Self {
        let mut leaves: Vec<Formula> = params.atoms.iter().map(|a| Formula::atom(a)).collect();
        leaves.push(Formula::Bot);
        leaves.push(Formula::Top);
        let (cmax, dmax) = (params.max_connectives, params.max_degree);
        let mut table = vec![vec![0u128; dmax + 1]; cmax + 1];
        for d in 0..=dmax {
            table[0][d] = leaves.len() as u128;
        }
        for c in 1..=cmax {
            for d in 0..=dmax {
                let mut n = table[c - 1][d];
                if d > 0 {
                    n += table[c - 1][d - 1];
                }
                let pairs: u128 = (0..c).map(|i| table[i][d] * table[c - 1 - i][d]).sum();
                table[c][d] = n + 3 * pairs;
            }
        }
        Counts { leaves, table }
    }

    fn unrank(&self, c: usize, d: usize, mut r: u128) -> Formula {
        if c == 0 {
            return self.leaves[r as usize].clone();
        }
        let neg = self.table[c - 1][d];
        if r < neg {
            return Formula::neg(self.unrank(c - 1, d, r));
        }
        r -= neg;
        if d > 0 {
            let boxes = self.table[c - 1][d - 1];
            if r < boxes {
                return Formula::boxed(self.unrank(c - 1, d - 1, r));
            }
            r -= boxes;
        }
        for op in 0..3 {
            for i in 0..c {
                let (nl, nr) = (self.table[i][d], self.table[c - 1 - i][d]);
                if r < nl * nr {
                    let l = self.unrank(i, d, r / nr);
                    let rt = self.unrank(c - 1 - i, d, r % nr);
                    return match op {
                        0 => Formula::and(l, rt),
                        1 => Formula::or(l, rt),
                        _ => Formula::imp(l, rt),
                    };
                }
                r -= nl * nr;
            }
        }
        unreachable!("rank within the counted range")
    }
}

/// Number of formulas within the bounds, before sampling.
pub fn corpus_size(params: &CorpusParams) -> u128 {
    let counts = Counts::new(params);
    counts.table.iter().map(|row| row[params.max_degree]).sum()
}

/// The formula of canonical rank `index`.
pub fn unrank(params: &CorpusParams, index: u128) -> Option<Formula> {
    let counts = Counts::new(params);
    let d = params.max_degree;
    let mut r = index;
    for c in 0..=params.max_connectives {
        let here = counts.table[c][d];
        if r < here {
            return Some(counts.unrank(c, d, r));
        }
        r -= here;
    }
    None
}

pub fn generate_corpus(params: &CorpusParams) -> Corpus {
    let counts = Counts::new(params);
    let d = params.max_degree;
    let total: u128 = counts.table.iter().map(|row| row[d]).sum();
    let indices: Vec<u128> = match params.sample {
        Some(k) if (k as u128) < total => {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            let mut chosen = BTreeSet::new();
            while chosen.len() < k {
                chosen.insert(rng.gen_range(0..total));
            }
            chosen.into_iter().collect()
        }
        _ => (0..total).collect(),
    };
    let entries = indices
        .into_iter()
        .map(|index| {
            let mut r = index;
            let mut c = 0;
            while r >= counts.table[c][d] {
                r -= counts.table[c][d];
                c += 1;
            }
            CorpusEntry {
                index,
                formula: counts.unrank(c, d, r),
            }
        })
        .collect();
    Corpus {
        params: params.clone(),
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent enumeration: grow formula sets by connective count and filter by degree.
    fn brute(atoms: &[&str], cmax: usize, dmax: usize) -> BTreeSet<Formula> {
        let mut by_size: Vec<Vec<Formula>> = vec![atoms
            .iter()
            .map(|a| Formula::atom(a))
            .chain([Formula::Bot, Formula::Top])
            .collect()];
        for c in 1..=cmax {
            let mut out = Vec::new();
            for f in &by_size[c - 1] {
                out.push(Formula::neg(f.clone()));
                out.push(Formula::boxed(f.clone()));
            }
            for i in 0..c {
                for l in &by_size[i] {
                    for r in &by_size[c - 1 - i] {
                        out.push(Formula::and(l.clone(), r.clone()));
                        out.push(Formula::or(l.clone(), r.clone()));
                        out.push(Formula::imp(l.clone(), r.clone()));
                    }
                }
            }
            by_size.push(out);
        }
        by_size
            .into_iter()
            .flatten()
            .filter(|f| f.modal_degree() <= dmax)
            .collect()
    }

    fn params(atoms: &[&str], c: usize, d: usize) -> CorpusParams {
        CorpusParams {
            atoms: atoms.iter().map(|s| s.to_string()).collect(),
            max_connectives: c,
            max_degree: d,
            sample: None,
            seed: 1,
        }
    }

    #[test]
    fn golden_small_corpus() {
        let corpus = generate_corpus(&params(&["p"], 1, 1));
        assert_eq!(corpus.len(), 36);
        let shown: Vec<String> = corpus.formulas().take(9).map(|f| f.to_string()).collect();
        assert_eq!(
            shown,
            ["p", "bot", "top", "~p", "~bot", "~top", "[]p", "[]bot", "[]top"]
        );
        assert_eq!(corpus.entries[9].formula.to_string(), "p /\\ p");
        assert_eq!(corpus.entries[35].formula.to_string(), "top -> top");
        let got: BTreeSet<Formula> = corpus.formulas().cloned().collect();
        assert_eq!(got, brute(&["p"], 1, 1));
    }

    #[test]
    fn matches_brute_force() {
        for (c, d) in [(0, 0), (2, 0), (3, 1), (3, 2), (4, 1)] {
            let p = params(&["p", "q"], c, d);
            let corpus = generate_corpus(&p);
            let got: BTreeSet<Formula> = corpus.formulas().cloned().collect();
            assert_eq!(got.len(), corpus.len(), "duplicates at {c},{d}");
            assert_eq!(got, brute(&["p", "q"], c, d), "{c},{d}");
            assert_eq!(corpus_size(&p), corpus.len() as u128);
            for e in corpus.entries.iter().step_by(7) {
                assert_eq!(unrank(&p, e.index).as_ref(), Some(&e.formula));
            }
        }
    }

    #[test]
    fn size_zero_is_leaves() {
        let corpus = generate_corpus(&params(&["p", "q"], 0, 3));
        let shown: Vec<String> = corpus.formulas().map(|f| f.to_string()).collect();
        assert_eq!(shown, ["p", "q", "bot", "top"]);
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = CorpusParams::default();
        let a = generate_corpus(&p);
        let b = generate_corpus(&p);
        assert_eq!(a, b);
        assert_eq!(a.len(), 2000);
        assert!(a.entries.windows(2).all(|w| w[0].index < w[1].index));
        assert!(a
            .formulas()
            .all(|f| f.connectives() <= 7 && f.modal_degree() <= 3));
        let other = generate_corpus(&CorpusParams { seed: 2, ..p });
        assert_ne!(a, other);
        assert!(generate_corpus(&CorpusParams::box_free())
            .formulas()
            .all(Formula::is_box_free));
    }
}
