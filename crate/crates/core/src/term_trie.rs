//! A trie of terms that can be restricted variable by variable and rolled
//! back.
//!
//! Words are the canonical literal sequences of the terms. Because variables
//! are fixed in increasing order, every live term mentioning the branching
//! variable `x` starts with `x` or `¬x`, so the root's two children for `x`
//! hold exactly `D_x` and `D_x̄`; everything else is `D_nox`.

use thiserror::Error;

use crate::dnf::{Dnf, Lit, Term};
use crate::stats::StepCounter;
use crate::trie::{ChildRepr, NodeId, Trie};

#[derive(Debug, Clone, Copy)]
enum Edit {
    Detached { parent: NodeId, sym: u32, child: NodeId },
    Inserted { root: NodeId, leaf: NodeId },
    Rerooted { prev: NodeId },
}

/// Handle for one restriction step; undo in LIFO order.
#[derive(Debug, PartialEq, Eq)]
#[must_use]
pub struct UndoToken {
    depth: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UndoError {
    #[error("undo token {got} is not the most recent one ({expected:?})")]
    OutOfOrder { got: usize, expected: Option<usize> },
}

/// Sizes of the three parts of the formula around a variable `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Split {
    pub neg: usize,
    pub pos: usize,
    pub none: usize,
}

impl Split {
    /// Terms that take part in `D[x ↦ b]` before deduplication.
    pub fn surviving(&self, b: bool) -> usize {
        self.none + if b { self.pos } else { self.neg }
    }
}

#[derive(Debug, Clone)]
pub struct TermTrie {
    n: usize,
    trie: Trie<()>,
    log: Vec<Edit>,
    marks: Vec<usize>,
}

fn word(lits: &[Lit]) -> Vec<u32> {
    lits.iter().map(|l| l.code()).collect()
}

impl TermTrie {
    pub fn new(n: usize) -> TermTrie {
        TermTrie::with_repr(n, ChildRepr::Array)
    }

    pub fn with_repr(n: usize, repr: ChildRepr) -> TermTrie {
        TermTrie { n, trie: Trie::new(2 * n as u32, repr), log: Vec::new(), marks: Vec::new() }
    }

    /// Maintain the minimum term width (needed by the complement switch).
    pub fn with_min_width(mut self) -> TermTrie {
        self.trie = self.trie.with_min_depth();
        self
    }

    pub fn from_dnf(d: &Dnf, steps: &mut StepCounter) -> TermTrie {
        let mut t = TermTrie::new(d.num_vars());
        for term in d.terms() {
            t.insert_term(term.lits(), steps);
        }
        t
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn trie(&self) -> &Trie<()> {
        &self.trie
    }

    pub fn len(&self) -> usize {
        self.trie.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trie.is_empty()
    }

    pub fn has_empty_term(&self) -> bool {
        self.trie.is_terminal(self.trie.root())
    }

    pub fn min_width(&self) -> Option<usize> {
        self.trie.min_depth(self.trie.root())
    }

    pub fn insert_term(&mut self, lits: &[Lit], steps: &mut StepCounter) -> bool {
        let root = self.trie.root();
        self.trie
            .insert_with(root, &word(lits), steps, || ())
            .expect("literal within alphabet")
            .1
    }

    pub fn contains_term(&self, lits: &[Lit], steps: &mut StepCounter) -> bool {
        self.trie.find_at(self.trie.root(), &word(lits), steps).expect("literal within alphabet").is_some()
    }

    /// Number of live terms whose first literal is `lit`.
    pub fn lit_count(&self, lit: Lit, steps: &mut StepCounter) -> usize {
        self.trie.child(self.trie.root(), lit.code(), steps).map_or(0, |c| self.trie.count(c))
    }

    pub fn split(&self, x: usize, steps: &mut StepCounter) -> Split {
        let neg = self.lit_count(Lit::new(x, false), steps);
        let pos = self.lit_count(Lit::new(x, true), steps);
        Split { neg, pos, none: self.len() - neg - pos }
    }

    /// Decoded term set, in canonical order.
    pub fn terms(&self) -> Vec<Term> {
        self.trie
            .words(self.trie.root())
            .into_iter()
            .map(|w| Term::from_sorted_unchecked(w.into_iter().map(Lit::from_code).collect()))
            .collect()
    }

    pub fn to_dnf(&self) -> Dnf {
        Dnf::new(self.n, self.terms()).expect("trie terms are valid")
    }

    fn open(&mut self) -> UndoToken {
        self.marks.push(self.log.len());
        UndoToken { depth: self.marks.len() - 1 }
    }

    fn detach_logged(&mut self, sym: u32, steps: &mut StepCounter) -> Option<NodeId> {
        let parent = self.trie.root();
        let child = self.trie.detach(parent, sym, steps)?;
        self.log.push(Edit::Detached { parent, sym, child });
        Some(child)
    }

    fn insert_logged(&mut self, root: NodeId, w: &[u32], steps: &mut StepCounter) {
        let (leaf, new) = self.trie.insert_with(root, w, steps, || ()).expect("literal within alphabet");
        if new {
            self.log.push(Edit::Inserted { root, leaf });
        }
    }

    /// Collects the words under `node` (minus the top-level `skip` symbols)
    /// into a flat buffer.
    fn gather(&self, node: NodeId, skip: &[u32], steps: &mut StepCounter) -> (Vec<u32>, Vec<usize>) {
        let mut buf = Vec::new();
        let mut ends = Vec::new();
        self.trie.for_each_word(node, skip, steps, |w, _| {
            buf.extend_from_slice(w);
            ends.push(buf.len());
        });
        (buf, ends)
    }

    fn insert_all(&mut self, root: NodeId, buf: &[u32], ends: &[usize], steps: &mut StepCounter) {
        let mut start = 0;
        for &end in ends {
            self.insert_logged(root, &buf[start..end], steps);
            start = end;
        }
    }

    /// Restricts to `x ↦ b` by dropping the falsified subtree and merging the
    /// satisfied one into the root. Cost is proportional to the total length
    /// of the merged terms.
    ///
    /// `x` must be the smallest variable still occurring in the trie.
    pub fn set_variable(&mut self, x: usize, b: bool, steps: &mut StepCounter) -> UndoToken {
        let tok = self.open();
        let sat = Lit::new(x, b);
        self.detach_logged(sat.negate().code(), steps);
        if let Some(sub) = self.detach_logged(sat.code(), steps) {
            let (buf, ends) = self.gather(sub, &[], steps);
            let root = self.trie.root();
            self.insert_all(root, &buf, &ends, steps);
        }
        tok
    }

    /// Same result as [`set_variable`](Self::set_variable), built the other
    /// way around: the satisfied subtree becomes the root and the terms not
    /// mentioning `x` are merged into it. Cost is proportional to the total
    /// length of `D_nox`.
    pub fn set_variable_fast(&mut self, x: usize, b: bool, steps: &mut StepCounter) -> UndoToken {
        let sat = Lit::new(x, b);
        let old = self.trie.root();
        let Some(base) = self.trie.child(old, sat.code(), steps) else {
            return self.set_variable(x, b, steps);
        };
        let tok = self.open();
        let (buf, ends) = self.gather(old, &[sat.code(), sat.negate().code()], steps);
        self.trie.set_root(base);
        self.log.push(Edit::Rerooted { prev: old });
        self.insert_all(base, &buf, &ends, steps);
        tok
    }

    /// Keeps only the terms starting with `lit`, stripped of it. Returns
    /// `None` (and changes nothing) when there are none.
    pub fn keep_only(&mut self, lit: Lit, steps: &mut StepCounter) -> Option<UndoToken> {
        let old = self.trie.root();
        let base = self.trie.child(old, lit.code(), steps)?;
        let tok = self.open();
        self.trie.set_root(base);
        self.log.push(Edit::Rerooted { prev: old });
        Some(tok)
    }

    /// Reverts the most recent restriction.
    pub fn undo(&mut self, token: UndoToken, steps: &mut StepCounter) -> Result<(), UndoError> {
        let expected = self.marks.len().checked_sub(1);
        if Some(token.depth) != expected {
            return Err(UndoError::OutOfOrder { got: token.depth, expected });
        }
        let mark = self.marks.pop().expect("checked above");
        while self.log.len() > mark {
            match self.log.pop().expect("log longer than mark") {
                Edit::Detached { parent, sym, child } => self.trie.attach(parent, sym, child, steps),
                Edit::Inserted { root, leaf } => {
                    self.trie.remove_leaf(root, leaf, steps);
                }
                Edit::Rerooted { prev } => {
                    steps.tick();
                    self.trie.set_root(prev);
                }
            }
        }
        Ok(())
    }

    /// Outstanding restriction steps.
    pub fn undo_depth(&self) -> usize {
        self.marks.len()
    }

    pub fn node_count(&self) -> usize {
        self.trie.node_count()
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::dnf::PartialAssignment;

    fn tt(n: usize, terms: &[&[i64]]) -> (Dnf, TermTrie) {
        let d = Dnf::from_dimacs(n, terms).unwrap();
        let t = TermTrie::from_dnf(&d, &mut StepCounter::new());
        (d, t)
    }

    fn sorted(d: &Dnf) -> Vec<Term> {
        d.sorted_terms()
    }

    #[test]
    fn set_variable_examples() {
        let mut s = StepCounter::new();
        let (d, mut t) = tt(2, &[&[1], &[-1, 2], &[2]]);
        let tok = t.set_variable(1, false, &mut s);
        assert_eq!(t.terms(), vec![Term::from_dimacs(&[2]).unwrap()]);
        t.undo(tok, &mut s).unwrap();
        assert_eq!(t.terms(), sorted(&d));

        let tok = t.set_variable(1, true, &mut s);
        assert!(t.has_empty_term());
        assert_eq!(t.terms(), sorted(&d.restrict(&PartialAssignment::from_pairs([(1, true)]))));
        t.undo(tok, &mut s).unwrap();
        assert_eq!(t.terms(), sorted(&d));
    }

    #[test]
    fn fast_matches_slow_on_examples() {
        let mut s = StepCounter::new();
        let (_, mut a) = tt(2, &[&[1], &[-1, 2], &[2]]);
        let (_, mut b) = tt(2, &[&[1], &[-1, 2], &[2]]);
        for v in [false, true] {
            let ta = a.set_variable(1, v, &mut s);
            let tb = b.set_variable_fast(1, v, &mut s);
            assert_eq!(a.terms(), b.terms());
            assert_eq!(a.len(), b.len());
            a.undo(ta, &mut s).unwrap();
            b.undo(tb, &mut s).unwrap();
            assert_eq!(a.terms(), b.terms());
        }
    }

    #[test]
    fn out_of_order_undo_rejected() {
        let mut s = StepCounter::new();
        let (_, mut t) = tt(3, &[&[1, 2], &[2, 3]]);
        let t1 = t.set_variable(1, true, &mut s);
        let t2 = t.set_variable(2, true, &mut s);
        assert_eq!(t.undo(t1, &mut s), Err(UndoError::OutOfOrder { got: 0, expected: Some(1) }));
        t.undo(t2, &mut s).unwrap();
        // the rejected token was consumed; re-create the state to finish
        assert_eq!(t.undo_depth(), 1);
    }

    #[test]
    fn split_counts() {
        let mut s = StepCounter::new();
        let (_, t) = tt(3, &[&[1], &[-1, 2], &[2], &[3], &[1, 3]]);
        assert_eq!(t.split(1, &mut s), Split { neg: 1, pos: 2, none: 2 });
    }

    #[test]
    fn min_width_tracked() {
        let mut s = StepCounter::new();
        let d = Dnf::from_dimacs(3, &[&[1, 2, 3], &[2, 3]]).unwrap();
        let mut t = TermTrie::new(3).with_min_width();
        for term in d.terms() {
            t.insert_term(term.lits(), &mut s);
        }
        assert_eq!(t.min_width(), Some(2));
        let tok = t.set_variable(1, true, &mut s);
        assert_eq!(t.min_width(), Some(2));
        let tok2 = t.set_variable(2, true, &mut s);
        assert_eq!(t.min_width(), Some(1));
        t.undo(tok2, &mut s).unwrap();
        t.undo(tok, &mut s).unwrap();
        assert_eq!(t.min_width(), Some(2));
    }

    fn arb_dnf(max_n: usize) -> impl Strategy<Value = Dnf> {
        (2..=max_n).prop_flat_map(|n| {
            let term = prop::collection::vec((1..=n, any::<bool>()), 0..=n).prop_map(|pairs| {
                let mut seen = std::collections::BTreeMap::new();
                for (v, b) in pairs {
                    seen.entry(v).or_insert(b);
                }
                Term::new(seen.into_iter().map(|(v, b)| Lit::new(v, b)).collect()).unwrap()
            });
            prop::collection::vec(term, 0..40).prop_map(move |ts| Dnf::new(n, ts).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        /// Random walks of restrictions and undos always decode to the
        /// restriction of the original formula.
        #[test]
        fn decoded_set_tracks_restriction(
            d in arb_dnf(14),
            moves in prop::collection::vec((any::<bool>(), any::<bool>(), any::<bool>()), 0..40),
        ) {
            let mut s = StepCounter::new();
            let mut t = TermTrie::from_dnf(&d, &mut s);
            let mut tokens: Vec<UndoToken> = Vec::new();
            let mut tau: Vec<bool> = Vec::new();
            for (down, b, fast) in moves {
                if down && tau.len() < d.num_vars() {
                    let x = tau.len() + 1;
                    let tok = if fast { t.set_variable_fast(x, b, &mut s) } else { t.set_variable(x, b, &mut s) };
                    tokens.push(tok);
                    tau.push(b);
                } else if let Some(tok) = tokens.pop() {
                    t.undo(tok, &mut s).unwrap();
                    tau.pop();
                }
                let pa = PartialAssignment::from_pairs(tau.iter().enumerate().map(|(i, &b)| (i + 1, b)));
                prop_assert_eq!(t.terms(), d.restrict(&pa).sorted_terms());
                prop_assert_eq!(t.len(), d.restrict(&pa).num_terms());
            }
            while let Some(tok) = tokens.pop() {
                t.undo(tok, &mut s).unwrap();
            }
            prop_assert_eq!(t.terms(), d.sorted_terms());
        }

        #[test]
        fn fast_and_slow_agree(d in arb_dnf(10), b in any::<bool>()) {
            let mut s = StepCounter::new();
            let mut a = TermTrie::from_dnf(&d, &mut s);
            let mut f = TermTrie::from_dnf(&d, &mut s);
            let ta = a.set_variable(1, b, &mut s);
            let tf = f.set_variable_fast(1, b, &mut s);
            prop_assert_eq!(a.terms(), f.terms());
            a.undo(ta, &mut s).unwrap();
            f.undo(tf, &mut s).unwrap();
            prop_assert_eq!(f.terms(), d.sorted_terms());
        }
    }
}
