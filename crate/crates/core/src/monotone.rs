//! Monotone DNF: unate normalization, minimization, and three enumerators.
//!
//! * [`enum_monotone_rs`]: reverse search over each term's upward cone,
//!   remembering outputs in a binary model trie; worst-case delay `O(n²)`.
//! * [`enum_monotone_avg`]: the trie flashlight of [`crate::avg`].
//! * [`enum_monotone_log`]: the same flashlight, switching to a trie of
//!   term complements once every live term is nearly full.

use thiserror::Error;

use crate::avg::{enum_avg, AvgEnum, AvgMode};
use crate::dnf::{Dnf, Lit, Term};
use crate::stats::{ModelEnumerator, StepCounter};
use crate::term_trie::{TermTrie, UndoToken};
use crate::trie::{ChildRepr, Trie};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MonotoneError {
    #[error("x{var} occurs negated; the formula is not monotone")]
    Negated { var: usize },
    #[error("x{var} occurs with both signs; the formula is not unate")]
    NotUnate { var: usize },
}

/// A DNF without negated literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneDnf {
    dnf: Dnf,
    minimized: bool,
}

impl MonotoneDnf {
    pub fn new(dnf: Dnf) -> Result<MonotoneDnf, MonotoneError> {
        for t in dnf.terms() {
            if let Some(l) = t.lits().iter().find(|l| !l.is_positive()) {
                return Err(MonotoneError::Negated { var: l.var() });
            }
        }
        Ok(MonotoneDnf { dnf, minimized: false })
    }

    pub fn dnf(&self) -> &Dnf {
        &self.dnf
    }

    pub fn is_minimized(&self) -> bool {
        self.minimized
    }

    pub fn num_vars(&self) -> usize {
        self.dnf.num_vars()
    }
}

/// Flips every variable that occurs only negatively. Returns the monotone
/// formula and the flip mask (indexed by variable − 1); models of the
/// original are the models of the result XOR the mask.
pub fn normalize_unate(d: &Dnf) -> Result<(MonotoneDnf, Vec<bool>), MonotoneError> {
    let n = d.num_vars();
    let mut pos = vec![false; n + 1];
    let mut neg = vec![false; n + 1];
    for t in d.terms() {
        for l in t.lits() {
            if l.is_positive() {
                pos[l.var()] = true;
            } else {
                neg[l.var()] = true;
            }
        }
    }
    if let Some(v) = (1..=n).find(|&v| pos[v] && neg[v]) {
        return Err(MonotoneError::NotUnate { var: v });
    }
    let mask: Vec<bool> = (1..=n).map(|v| neg[v]).collect();
    let terms = d.terms().iter().map(|t| {
        Term::new(t.lits().iter().map(|l| Lit::new(l.var(), true)).collect()).expect("one sign per variable")
    });
    let dnf = Dnf::new(n, terms).expect("same variables");
    Ok((MonotoneDnf { dnf, minimized: false }, mask))
}

/// Drops every term that has a proper subset among the terms. Terms come
/// out in canonical order.
pub fn minimize_monotone(d: &MonotoneDnf) -> MonotoneDnf {
    let n = d.num_vars();
    let words = n.div_ceil(64);
    let bits = |t: &Term| {
        let mut b = vec![0u64; words];
        for v in t.vars() {
            b[(v - 1) / 64] |= 1 << ((v - 1) % 64);
        }
        b
    };
    let mut terms = d.dnf.terms().to_vec();
    terms.sort_by_key(Term::len);
    let mut kept: Vec<(Term, Vec<u64>)> = Vec::new();
    for t in terms {
        let b = bits(&t);
        let absorbed = kept.iter().any(|(_, k)| k.iter().zip(&b).all(|(x, y)| x & !y == 0));
        if !absorbed {
            kept.push((t, b));
        }
    }
    let mut out: Vec<Term> = kept.into_iter().map(|(t, _)| t).collect();
    out.sort();
    MonotoneDnf { dnf: Dnf::new(n, out).expect("subset of a valid formula"), minimized: true }
}

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct RsNode {
    parent: u32,
    /// Index in `free` of the largest added variable (`NIL` at the root).
    top: u32,
    next: u32,
}

/// Reverse search: for each term `T_i`, the sets `S` of extra variables
/// form a tree (parent `S \ max S`); only nodes whose model has not been
/// output are visited, and their subtrees are skipped otherwise.
pub struct ReverseSearch {
    n: usize,
    terms: Vec<Term>,
    i: usize,
    free: Vec<usize>,
    nodes: Vec<RsNode>,
    cur: u32,
    regs: Vec<bool>,
    word: Vec<u32>,
    seen: Trie<()>,
    fresh: Vec<u32>,
    check: bool,
    started: bool,
    steps: StepCounter,
    pre: u64,
}

pub fn enum_monotone_rs(d: &MonotoneDnf) -> ReverseSearch {
    let mut steps = StepCounter::new();
    let n = d.num_vars();
    let m = d.dnf.num_terms() as u64;
    let min = if d.minimized { d.clone() } else { minimize_monotone(d) };
    steps.add(m * m * n.div_ceil(64) as u64 + m);
    ReverseSearch {
        n,
        terms: min.dnf.terms().to_vec(),
        i: 0,
        free: Vec::new(),
        nodes: Vec::new(),
        cur: NIL,
        regs: vec![false; n],
        word: vec![0; n],
        seen: Trie::new(2, ChildRepr::SortedList),
        fresh: Vec::new(),
        check: false,
        started: false,
        pre: steps.get(),
        steps,
    }
}

impl ReverseSearch {
    /// Verify every skipped subtree root against the earlier terms.
    pub fn with_checks(mut self) -> ReverseSearch {
        self.check = true;
        self
    }

    /// Nodes in the output-model trie.
    pub fn model_trie_nodes(&self) -> usize {
        self.seen.node_count()
    }

    fn set_reg(&mut self, i: usize, b: bool) {
        self.regs[i] = b;
        self.word[i] = b as u32;
        self.steps.tick();
    }

    fn start_term(&mut self) {
        let t = &self.terms[self.i];
        let mut in_t = vec![false; self.n];
        for v in t.vars() {
            in_t[v - 1] = true;
        }
        self.free = (0..self.n).filter(|&i| !in_t[i]).collect();
        for (i, &b) in in_t.iter().enumerate() {
            self.set_reg(i, b);
        }
        self.nodes.clear();
        self.nodes.push(RsNode { parent: NIL, top: NIL, next: NIL });
        self.cur = 0;
    }

    /// Clears the extra variables of `from` and sets those of `to`.
    fn move_to(&mut self, from: u32, to: u32) {
        let mut a = from;
        while a != NIL && self.nodes[a as usize].top != NIL {
            let r = self.free[self.nodes[a as usize].top as usize];
            self.set_reg(r, false);
            a = self.nodes[a as usize].parent;
        }
        let mut b = to;
        while b != NIL && self.nodes[b as usize].top != NIL {
            let r = self.free[self.nodes[b as usize].top as usize];
            self.set_reg(r, true);
            b = self.nodes[b as usize].parent;
        }
    }

    /// Records the current node's model and threads its fresh successors.
    fn visit(&mut self) {
        let root = self.seen.root();
        self.seen.insert_with(root, &self.word, &mut self.steps, || ()).expect("bits");
        let node = self.nodes[self.cur as usize];
        let from = if node.top == NIL { 0 } else { node.top as usize + 1 };
        self.fresh.clear();
        for k in from..self.free.len() {
            let r = self.free[k];
            self.word[r] = 1;
            let hit = self.seen.find_at(root, &self.word, &mut self.steps).expect("bits").is_some();
            self.word[r] = 0;
            self.steps.add(2);
            if hit {
                if self.check {
                    let mut probe = self.regs.clone();
                    probe[r] = true;
                    assert!(
                        self.terms[..self.i].iter().any(|t| t.satisfied_by(&probe)),
                        "skipped a model of no earlier term"
                    );
                }
                continue;
            }
            let id = self.nodes.len() as u32;
            self.nodes.push(RsNode { parent: self.cur, top: k as u32, next: NIL });
            self.fresh.push(id);
        }
        let after = node.next;
        for w in 0..self.fresh.len() {
            let succ = self.fresh.get(w + 1).copied().unwrap_or(after);
            let id = self.fresh[w];
            self.nodes[id as usize].next = succ;
            self.steps.tick();
        }
        self.nodes[self.cur as usize].next = self.fresh.first().copied().unwrap_or(after);
    }
}

impl ModelEnumerator for ReverseSearch {
    fn num_vars(&self) -> usize {
        self.n
    }

    fn next_model(&mut self) -> Option<&[bool]> {
        if !self.started {
            self.started = true;
            if self.terms.is_empty() {
                return None;
            }
            self.start_term();
        } else {
            if self.i >= self.terms.len() {
                return None;
            }
            let next = self.nodes[self.cur as usize].next;
            self.steps.tick();
            if next == NIL {
                self.i += 1;
                if self.i == self.terms.len() {
                    return None;
                }
                self.start_term();
            } else {
                self.move_to(self.cur, next);
                self.cur = next;
            }
        }
        self.visit();
        Some(&self.regs)
    }

    fn steps(&self) -> u64 {
        self.steps.get()
    }

    fn precompute_steps(&self) -> u64 {
        self.pre
    }

    fn aux_memory_estimate(&self) -> usize {
        self.seen.node_count()
    }
}

/// Trie flashlight on a monotone formula.
pub fn enum_monotone_avg(d: &MonotoneDnf) -> AvgEnum {
    enum_avg(&d.dnf, AvgMode::SmallerSide)
}

/// Whether a node with `live` unassigned variables and `len` terms of
/// minimum width `min_width` switches to complement words.
pub fn should_switch(live: usize, len: usize, min_width: usize, n: usize) -> bool {
    if len == 0 {
        return false;
    }
    let k = (len as f64).log2() + 2.0 * (n as f64).log2();
    ((live - min_width) as f64) < k
}

/// Complement words of the terms of `src` with respect to the variables
/// `first..=n`.
pub fn complement_trie(src: &TermTrie, first: usize, steps: &mut StepCounter) -> TermTrie {
    let n = src.num_vars();
    let mut out = TermTrie::new(n);
    let mut words: Vec<Vec<u32>> = Vec::with_capacity(src.len());
    src.trie().for_each_word(src.trie().root(), &[], steps, |w, _| words.push(w.to_vec()));
    let mut comp: Vec<Lit> = Vec::with_capacity(n);
    for w in words {
        comp.clear();
        let mut j = 0;
        for v in first..=n {
            steps.tick();
            if j < w.len() && Lit::from_code(w[j]).var() == v {
                j += 1;
            } else {
                comp.push(Lit::new(v, true));
            }
        }
        out.insert_term(&comp, steps);
    }
    out
}

/// Flashlight that hands a subtree over to complement words once
/// [`should_switch`] holds. In complement form unassigned registers are
/// kept at 1, so a node whose only complement word is empty is a model
/// as it stands.
pub struct MonotoneLog {
    n: usize,
    trie: TermTrie,
    comp: Option<TermTrie>,
    switch_depth: usize,
    switches: u64,
    regs: Vec<bool>,
    tried: Vec<u8>,
    tokens: Vec<(UndoToken, bool)>,
    depth: usize,
    started: bool,
    done: bool,
    steps: StepCounter,
    pre: u64,
}

pub fn enum_monotone_log(d: &MonotoneDnf) -> MonotoneLog {
    let n = d.num_vars();
    let mut steps = StepCounter::new();
    let mut trie = TermTrie::new(n).with_min_width();
    for t in d.dnf.terms() {
        trie.insert_term(t.lits(), &mut steps);
    }
    let mut e = MonotoneLog {
        n,
        trie,
        comp: None,
        switch_depth: 0,
        switches: 0,
        regs: vec![false; n],
        tried: vec![0; n + 1],
        tokens: Vec::with_capacity(n),
        depth: 0,
        started: false,
        done: false,
        steps,
        pre: 0,
    };
    e.maybe_switch();
    e.pre = e.steps.get();
    e
}

impl MonotoneLog {
    /// Number of subtrees handed to complement words so far.
    pub fn switches(&self) -> u64 {
        self.switches
    }

    /// Whether the current node is in complement form.
    pub fn in_complement(&self) -> bool {
        self.comp.is_some()
    }

    fn maybe_switch(&mut self) {
        if self.comp.is_some() || self.trie.is_empty() {
            return;
        }
        let live = self.n - self.depth;
        let w = self.trie.min_width().expect("non-empty");
        self.steps.tick();
        if !should_switch(live, self.trie.len(), w, self.n) {
            return;
        }
        let c = complement_trie(&self.trie, self.depth + 1, &mut self.steps);
        for r in self.depth..self.n {
            self.regs[r] = true;
            self.steps.tick();
        }
        self.comp = Some(c);
        self.switch_depth = self.depth;
        self.switches += 1;
    }

    fn at_leaf(&self) -> bool {
        self.depth == self.n
            || self.comp.as_ref().is_some_and(|c| c.len() == 1 && c.has_empty_term())
    }

    fn pop(&mut self) {
        self.depth -= 1;
        let (tok, in_comp) = self.tokens.pop().expect("one token per level");
        if in_comp {
            let c = self.comp.as_mut().expect("complement live");
            c.undo(tok, &mut self.steps).expect("LIFO undo");
            if !self.regs[self.depth] {
                self.regs[self.depth] = true;
                self.steps.tick();
            }
        } else {
            self.trie.undo(tok, &mut self.steps).expect("LIFO undo");
        }
        if self.comp.is_some() && self.depth < self.switch_depth {
            self.comp = None;
        }
    }

    /// Tries `x_{level+1} = b`; returns whether a non-empty child was entered.
    fn descend(&mut self, level: usize, b: bool) -> bool {
        let x = level + 1;
        if let Some(c) = self.comp.as_mut() {
            let lit = Lit::new(x, true);
            let tok = if b {
                let has = c.lit_count(lit, &mut self.steps);
                let rest = c.len() - has;
                if rest < has {
                    c.set_variable_fast(x, true, &mut self.steps)
                } else {
                    c.set_variable(x, true, &mut self.steps)
                }
            } else {
                match c.keep_only(lit, &mut self.steps) {
                    Some(t) => t,
                    None => return false,
                }
            };
            if !b {
                self.regs[level] = false;
                self.steps.tick();
            }
            self.tokens.push((tok, true));
            self.depth += 1;
            return true;
        }
        let split = self.trie.split(x, &mut self.steps);
        if split.surviving(b) == 0 {
            return false;
        }
        let lit_side = if b { split.pos } else { split.neg };
        let tok = if split.none < lit_side {
            self.trie.set_variable_fast(x, b, &mut self.steps)
        } else {
            self.trie.set_variable(x, b, &mut self.steps)
        };
        self.tokens.push((tok, false));
        self.regs[level] = b;
        self.steps.tick();
        self.depth += 1;
        self.maybe_switch();
        true
    }
}

impl ModelEnumerator for MonotoneLog {
    fn num_vars(&self) -> usize {
        self.n
    }

    fn next_model(&mut self) -> Option<&[bool]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if self.trie.is_empty() {
                self.done = true;
                return None;
            }
        } else {
            if self.depth == 0 {
                self.done = true;
                return None;
            }
            self.tried[self.depth] = 0;
            self.pop();
        }
        loop {
            self.steps.tick();
            if self.at_leaf() {
                return Some(&self.regs);
            }
            let level = self.depth;
            let v = self.tried[level];
            if v == 2 {
                self.tried[level] = 0;
                if level == 0 {
                    self.done = true;
                    return None;
                }
                self.pop();
                continue;
            }
            self.tried[level] = v + 1;
            self.descend(level, v == 1);
        }
    }

    fn steps(&self) -> u64 {
        self.steps.get()
    }

    fn precompute_steps(&self) -> u64 {
        self.pre
    }

    fn aux_memory_estimate(&self) -> usize {
        self.trie.node_count() + self.comp.as_ref().map_or(0, TermTrie::node_count)
    }
}

/// Maps the models of a normalized formula back through the flip mask.
pub struct Unmask<E> {
    inner: E,
    mask: Vec<bool>,
    out: Vec<bool>,
    steps: StepCounter,
}

impl<E: ModelEnumerator> Unmask<E> {
    pub fn new(inner: E, mask: Vec<bool>) -> Unmask<E> {
        let n = inner.num_vars();
        Unmask { inner, mask, out: vec![false; n], steps: StepCounter::new() }
    }
}

impl<E: ModelEnumerator> ModelEnumerator for Unmask<E> {
    fn num_vars(&self) -> usize {
        self.inner.num_vars()
    }

    fn next_model(&mut self) -> Option<&[bool]> {
        let m = self.inner.next_model()?;
        for ((o, &b), &f) in self.out.iter_mut().zip(m).zip(&self.mask) {
            *o = b ^ f;
        }
        self.steps.add(self.out.len() as u64);
        Some(&self.out)
    }

    fn steps(&self) -> u64 {
        self.inner.steps() + self.steps.get()
    }

    fn precompute_steps(&self) -> u64 {
        self.inner.precompute_steps()
    }

    fn aux_memory_estimate(&self) -> usize {
        self.inner.aux_memory_estimate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dnf::brute_force_models;
    use crate::stats::collect_models;

    fn oracle(d: &Dnf) -> Vec<Vec<bool>> {
        brute_force_models(d).unwrap().iter().map(|a| a.bits().to_vec()).collect()
    }

    fn sorted(mut v: Vec<Vec<bool>>) -> Vec<Vec<bool>> {
        v.sort();
        v
    }

    fn mono(n: usize, terms: &[&[i64]]) -> MonotoneDnf {
        MonotoneDnf::new(Dnf::from_dimacs(n, terms).unwrap()).unwrap()
    }

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn unate_normalization() {
        let d = Dnf::from_dimacs(2, &[&[1, -2]]).unwrap();
        let (m, mask) = normalize_unate(&d).unwrap();
        assert_eq!(m.dnf(), &Dnf::from_dimacs(2, &[&[1, 2]]).unwrap());
        assert_eq!(mask, vec![false, true]);
        let got = collect_models(&mut Unmask::new(enum_monotone_rs(&m), mask));
        assert_eq!(got, vec![bits("10")]);

        let d = Dnf::from_dimacs(3, &[&[1, 3], &[2]]).unwrap();
        let (m, mask) = normalize_unate(&d).unwrap();
        assert_eq!(m.dnf(), &d);
        assert!(mask.iter().all(|&b| !b));

        let d = Dnf::from_dimacs(1, &[&[1], &[-1]]).unwrap();
        assert_eq!(normalize_unate(&d), Err(MonotoneError::NotUnate { var: 1 }));
        assert!(MonotoneDnf::new(Dnf::from_dimacs(2, &[&[-2]]).unwrap()).is_err());
    }

    #[test]
    fn minimization() {
        let m = minimize_monotone(&mono(2, &[&[1], &[1, 2]]));
        assert_eq!(m.dnf(), &Dnf::from_dimacs(2, &[&[1]]).unwrap());
        assert!(m.is_minimized());
        let anti = mono(3, &[&[1, 2], &[2, 3], &[1, 3]]);
        assert_eq!(minimize_monotone(&anti).dnf().sorted_terms(), anti.dnf().sorted_terms());
        let d = mono(4, &[&[1, 2], &[1, 2, 3], &[4], &[2, 4], &[3]]);
        assert_eq!(oracle(minimize_monotone(&d).dnf()), oracle(d.dnf()));
    }

    #[test]
    fn reverse_search_examples() {
        let d = mono(3, &[&[1], &[2, 3]]);
        let got = collect_models(&mut enum_monotone_rs(&d).with_checks());
        assert_eq!(got.len(), 5);
        assert_eq!(sorted(got), oracle(d.dnf()));
        let full = mono(4, &[&[1, 2, 3, 4]]);
        assert_eq!(collect_models(&mut enum_monotone_rs(&full)), vec![bits("1111")]);
        let taut = mono(3, &[&[], &[1]]);
        assert_eq!(collect_models(&mut enum_monotone_rs(&taut)).len(), 8);
        assert!(enum_monotone_rs(&mono(3, &[])).next_model().is_none());
    }

    #[test]
    fn reverse_search_memory_counts_models() {
        let d = mono(6, &[&[1, 2], &[3], &[4, 5, 6], &[2, 6]]);
        let mut e = enum_monotone_rs(&d).with_checks();
        let n = collect_models(&mut e).len();
        assert_eq!(n, oracle(d.dnf()).len());
        assert!(e.model_trie_nodes() <= (6 + 1) * n);
        let mut steps = StepCounter::new();
        assert_eq!(e.seen.len(), n);
        assert!(e.seen.search(&[1, 1, 1, 1, 1, 1], &mut steps).unwrap());
    }

    #[test]
    fn avg_examples() {
        for d in [mono(3, &[&[1], &[2, 3]]), mono(4, &[&[1, 2, 3, 4]])] {
            assert_eq!(sorted(collect_models(&mut enum_monotone_avg(&d))), oracle(d.dnf()));
        }
    }

    fn all_but_one(n: usize) -> MonotoneDnf {
        let terms: Vec<Vec<i64>> =
            (1..=n as i64).map(|skip| (1..=n as i64).filter(|&v| v != skip).collect()).collect();
        let refs: Vec<&[i64]> = terms.iter().map(Vec::as_slice).collect();
        mono(n, &refs)
    }

    #[test]
    fn log_switches_on_near_full_terms() {
        let d = all_but_one(6);
        let mut e = enum_monotone_log(&d);
        assert!(e.in_complement());
        let got = collect_models(&mut e);
        assert_eq!(got.len(), 7);
        assert_eq!(got, oracle(d.dnf()));
        assert_eq!(e.switches(), 1);

        let d = mono(8, &[&[1]]);
        let mut e = enum_monotone_log(&d);
        assert!(!e.in_complement());
        assert_eq!(collect_models(&mut e), oracle(d.dnf()));
    }

    #[test]
    fn switch_rule() {
        // 6 live variables, 6 terms of width 5: complement length 1 < log2 6 + 2 log2 6.
        assert!(should_switch(6, 6, 5, 6));
        assert!(!should_switch(20, 1, 1, 20));
        assert!(!should_switch(3, 0, 0, 3));
    }

    #[test]
    fn complement_round_trip() {
        let d = mono(5, &[&[1, 2], &[2, 3, 5], &[4], &[1, 2, 3, 4, 5]]);
        let mut steps = StepCounter::new();
        let t = TermTrie::from_dnf(d.dnf(), &mut steps);
        let c = complement_trie(&t, 1, &mut steps);
        let back = complement_trie(&c, 1, &mut steps);
        assert_eq!(back.terms(), d.dnf().sorted_terms());
        assert!(c.has_empty_term());
    }

    #[test]
    fn log_matches_flashlight_order() {
        let d = mono(7, &[&[1, 2, 3, 4, 5, 6], &[2, 3, 4, 5, 6, 7], &[1, 3, 4, 5, 6, 7], &[7], &[1, 2]]);
        let a = collect_models(&mut enum_monotone_log(&d));
        assert_eq!(a, oracle(d.dnf()));
    }
}
