//! Baseline enumerators: priority-rule union, ordered merge, flashlight.

use crate::dnf::{Dnf, Term};
use crate::graycode::TermModelEnum;
use crate::stats::{ModelEnumerator, StepCounter};
use crate::trie::{ChildRepr, Trie};

fn satisfies(term: &Term, bits: &[bool], steps: &mut StepCounter) -> bool {
    for l in term.lits() {
        steps.tick();
        if !l.eval(bits[l.var() - 1]) {
            return false;
        }
    }
    true
}

/// Round-robin over per-term Gray enumerators; a model is output only by
/// the largest-index term it satisfies.
pub struct PriorityUnion {
    terms: Vec<Term>,
    enums: Vec<TermModelEnum>,
    live: Vec<bool>,
    live_count: usize,
    cursor: usize,
    last: Option<usize>,
    n: usize,
    steps: StepCounter,
    pre: u64,
}

pub fn enum_union_priority(d: &Dnf) -> PriorityUnion {
    let n = d.num_vars();
    let terms = d.terms().to_vec();
    let enums: Vec<TermModelEnum> = terms.iter().map(|t| TermModelEnum::new(t, n)).collect();
    let mut steps = StepCounter::new();
    steps.add(enums.iter().map(|e| e.steps()).sum::<u64>() + terms.len() as u64);
    let pre = steps.get();
    PriorityUnion {
        live: vec![true; terms.len()],
        live_count: terms.len(),
        terms,
        enums,
        cursor: 0,
        last: None,
        n,
        steps,
        pre,
    }
}

impl ModelEnumerator for PriorityUnion {
    fn num_vars(&self) -> usize {
        self.n
    }

    fn next_model(&mut self) -> Option<&[bool]> {
        let m = self.terms.len();
        loop {
            if self.live_count == 0 {
                self.last = None;
                return None;
            }
            let i = self.cursor;
            self.cursor = (i + 1) % m;
            self.steps.tick();
            if !self.live[i] {
                continue;
            }
            let before = self.enums[i].steps();
            let has = self.enums[i].advance();
            self.steps.add(self.enums[i].steps() - before);
            if !has {
                self.live[i] = false;
                self.live_count -= 1;
                continue;
            }
            let model = self.enums[i].current();
            let mut owned_later = false;
            for j in i + 1..m {
                if satisfies(&self.terms[j], model, &mut self.steps) {
                    owned_later = true;
                    break;
                }
            }
            if !owned_later {
                self.last = Some(i);
                return Some(self.enums[i].current());
            }
        }
    }

    fn steps(&self) -> u64 {
        self.steps.get()
    }

    fn precompute_steps(&self) -> u64 {
        self.pre
    }

    fn aux_memory_estimate(&self) -> usize {
        self.terms.len() * self.n
    }
}

impl PriorityUnion {
    /// Index of the term that produced the last output.
    pub fn last_source(&self) -> Option<usize> {
        self.last
    }
}

/// Models of one term in lexicographic order (x1 most significant).
#[derive(Debug, Clone)]
struct LexTermEnum {
    regs: Vec<bool>,
    free: Vec<usize>,
    started: bool,
}

impl LexTermEnum {
    fn new(term: &Term, n: usize) -> LexTermEnum {
        let mut regs = vec![false; n];
        let mut bound = vec![false; n];
        for l in term.lits() {
            regs[l.var() - 1] = l.is_positive();
            bound[l.var() - 1] = true;
        }
        LexTermEnum { regs, free: (0..n).filter(|&i| !bound[i]).collect(), started: false }
    }

    fn advance(&mut self, steps: &mut StepCounter) -> bool {
        steps.tick();
        if !self.started {
            self.started = true;
            return true;
        }
        for &p in self.free.iter().rev() {
            steps.tick();
            if self.regs[p] {
                self.regs[p] = false;
            } else {
                self.regs[p] = true;
                return true;
            }
        }
        false
    }

    fn word(&self) -> Vec<u32> {
        self.regs.iter().map(|&b| b as u32).collect()
    }
}

/// Merges per-term lexicographic streams through a trie holding each live
/// term's next model; the trie minimum is the next output.
pub struct OrderedMerge {
    enums: Vec<LexTermEnum>,
    frontier: Trie<Vec<u32>>,
    out: Vec<bool>,
    n: usize,
    steps: StepCounter,
    pre: u64,
}

pub fn enum_union_ordered(d: &Dnf) -> OrderedMerge {
    let n = d.num_vars();
    let mut steps = StepCounter::new();
    let mut enums: Vec<LexTermEnum> = d.terms().iter().map(|t| LexTermEnum::new(t, n)).collect();
    steps.add((enums.len() * n) as u64);
    let mut frontier = Trie::new(2, ChildRepr::SortedList);
    for (i, e) in enums.iter_mut().enumerate() {
        if e.advance(&mut steps) {
            push_source(&mut frontier, &e.word(), i as u32, &mut steps);
        }
    }
    let pre = steps.get();
    OrderedMerge { enums, frontier, out: vec![false; n], n, steps, pre }
}

fn push_source(frontier: &mut Trie<Vec<u32>>, word: &[u32], src: u32, steps: &mut StepCounter) {
    let root = frontier.root();
    let (leaf, _) = frontier.insert_with(root, word, steps, Vec::new).expect("binary word");
    steps.tick();
    frontier.value_mut(leaf).expect("terminal").push(src);
}

impl ModelEnumerator for OrderedMerge {
    fn num_vars(&self) -> usize {
        self.n
    }

    fn next_model(&mut self) -> Option<&[bool]> {
        let root = self.frontier.root();
        let (word, leaf) = self.frontier.min_word(root, &mut self.steps)?;
        let sources = self.frontier.remove_leaf(root, leaf, &mut self.steps);
        for (o, &s) in self.out.iter_mut().zip(&word) {
            *o = s == 1;
        }
        self.steps.add(word.len() as u64);
        for s in sources {
            let e = &mut self.enums[s as usize];
            if e.advance(&mut self.steps) {
                let w = e.word();
                push_source(&mut self.frontier, &w, s, &mut self.steps);
            }
        }
        Some(&self.out)
    }

    fn steps(&self) -> u64 {
        self.steps.get()
    }

    fn precompute_steps(&self) -> u64 {
        self.pre
    }

    fn aux_memory_estimate(&self) -> usize {
        self.frontier.node_count()
    }
}

/// Backtracking over x1..xn (0 before 1), pruned by per-term falsified
/// literal counters `f` and the number `c` of terms with `f = 0`.
pub struct Flashlight {
    n: usize,
    term_len: Vec<usize>,
    occ: Vec<Vec<u32>>,
    f: Vec<u32>,
    c: usize,
    regs: Vec<bool>,
    tried: Vec<u8>,
    depth: usize,
    started: bool,
    done: bool,
    terms: Vec<Term>,
    steps: StepCounter,
    pre: u64,
}

pub fn enum_flashlight(d: &Dnf) -> Flashlight {
    let n = d.num_vars();
    let mut steps = StepCounter::new();
    let mut occ = vec![Vec::new(); 2 * n];
    for (i, t) in d.terms().iter().enumerate() {
        for l in t.lits() {
            steps.tick();
            occ[l.code() as usize].push(i as u32);
        }
    }
    let m = d.num_terms();
    steps.add((m + n) as u64);
    let pre = steps.get();
    Flashlight {
        n,
        term_len: d.terms().iter().map(Term::len).collect(),
        occ,
        f: vec![0; m],
        c: m,
        regs: vec![false; n],
        tried: vec![0; n],
        depth: 0,
        started: false,
        done: false,
        terms: d.terms().to_vec(),
        steps,
        pre,
    }
}

impl Flashlight {
    /// Code of the literal made false by `x_{level+1} = b`.
    fn falsified(level: usize, b: bool) -> usize {
        2 * level + (!b) as usize
    }

    fn assign(&mut self, level: usize, b: bool) {
        self.regs[level] = b;
        self.steps.tick();
        for &t in &self.occ[Self::falsified(level, b)] {
            self.steps.tick();
            let f = &mut self.f[t as usize];
            if *f == 0 {
                self.c -= 1;
            }
            *f += 1;
        }
    }

    fn unassign(&mut self, level: usize) {
        let b = self.regs[level];
        self.steps.tick();
        for &t in &self.occ[Self::falsified(level, b)] {
            self.steps.tick();
            let f = &mut self.f[t as usize];
            *f -= 1;
            if *f == 0 {
                self.c += 1;
            }
        }
    }

    /// Recomputes the counters from the current prefix and compares.
    pub fn check_counters(&self) -> bool {
        let mut c = 0;
        for (i, t) in self.terms.iter().enumerate() {
            let f = t
                .lits()
                .iter()
                .filter(|l| l.var() <= self.depth && !l.eval(self.regs[l.var() - 1]))
                .count();
            if f as u32 != self.f[i] || f > self.term_len[i] {
                return false;
            }
            c += (f == 0) as usize;
        }
        c == self.c
    }

    /// Number of terms not falsified by the current prefix.
    pub fn live_terms(&self) -> usize {
        self.c
    }

    pub fn depth(&self) -> usize {
        self.depth
    }
}

impl ModelEnumerator for Flashlight {
    fn num_vars(&self) -> usize {
        self.n
    }

    fn next_model(&mut self) -> Option<&[bool]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if self.c == 0 {
                self.done = true;
                return None;
            }
        } else {
            // Resume from the previous leaf.
            if self.depth == 0 {
                self.done = true;
                return None;
            }
            self.depth -= 1;
            self.unassign(self.depth);
        }
        loop {
            self.steps.tick();
            if self.depth == self.n {
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
                self.depth -= 1;
                self.unassign(self.depth);
                continue;
            }
            self.tried[level] = v + 1;
            self.assign(level, v == 1);
            if self.c > 0 {
                self.depth += 1;
            } else {
                self.unassign(level);
            }
        }
    }

    fn steps(&self) -> u64 {
        self.steps.get()
    }

    fn precompute_steps(&self) -> u64 {
        self.pre
    }
}
