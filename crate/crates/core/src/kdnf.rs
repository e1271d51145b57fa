//! Bounded-delay enumeration of k-DNF models.
//!
//! For a formula `D` with a shortest term `C`, the models split into those
//! extending `1_C` and, for each `y ∈ var(C)`, those extending `0_C^y`.
//! The first block is walked with a Gray code; while it runs, each output
//! is preceded by a bounded slice of work building the tries of the
//! restricted formulas `D[0_C^y]`, which become the next jobs. With
//! `d = ⌈k^{3/2} 4^k⌉` the Gray block is always long enough for the
//! restrictions to be ready when it ends.

use thiserror::Error;

use crate::avg::{AvgEnum, AvgMode};
use crate::dnf::{Dnf, Lit, PartialAssignment, Term};
use crate::graycode::GrayWalk;
use crate::stats::{ModelEnumerator, StepCounter};
use crate::term_trie::TermTrie;
use crate::trie::NodeId;

/// Default hybrid cutoff: below `lambda * k` live variables the remaining
/// subformula goes to the trie flashlight.
pub const DEFAULT_LAMBDA: f64 = 3.55301;

/// Steps charged per (term × literal) of restriction work, rounded up from
/// the measured cost of [`TermTrie`] traversal plus insertion.
pub const DEFAULT_STEP_CONSTANT: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KdnfConfig {
    pub k: usize,
    /// Budget unit per output.
    pub d: u64,
    /// Steps per unit of `d`.
    pub step_constant: u64,
    pub lambda: f64,
}

impl KdnfConfig {
    pub fn new(k: usize) -> KdnfConfig {
        KdnfConfig { k, d: default_d(k), step_constant: DEFAULT_STEP_CONSTANT, lambda: DEFAULT_LAMBDA }
    }

    pub fn with_lambda(mut self, lambda: f64) -> KdnfConfig {
        self.lambda = lambda;
        self
    }

    /// Restriction steps allowed before each output.
    pub fn budget(&self) -> u64 {
        self.d.saturating_mul(self.step_constant)
    }

    /// `2^(N-k') d ≥ k'^2 M`: enough Gray outputs to pay for all restrictions.
    pub fn guard_holds(&self, live_vars: usize, width: usize, terms: usize) -> bool {
        let lhs = 2f64.powi((live_vars - width) as i32) * self.d as f64;
        lhs >= (width * width * terms) as f64
    }
}

/// `⌈k^{3/2} 2^{2k}⌉`, at least 1.
pub fn default_d(k: usize) -> u64 {
    let v = (k as f64).powf(1.5) * 4f64.powi(k as i32);
    (v.ceil() as u64).max(1)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KdnfError {
    #[error("term of width {width} exceeds k = {k}")]
    TermTooWide { width: usize, k: usize },
}

/// Returns `1_t` and `0_t^y` for `y ∈ var(t)`, ascending.
pub fn partition_assignments(t: &Term) -> (PartialAssignment, Vec<PartialAssignment>) {
    let one = t.one_assignment();
    let lits = t.lits();
    let zeros = (0..lits.len())
        .map(|i| {
            let mut p = PartialAssignment::from_pairs(lits[..i].iter().map(|l| (l.var(), l.is_positive())));
            p.set(lits[i].var(), !lits[i].is_positive());
            p
        })
        .collect();
    (one, zeros)
}

/// A shortest term, first in canonical order among those; `None` for an
/// empty formula.
pub fn choose_min_term(d: &Dnf) -> Option<Term> {
    d.terms().iter().min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.lits().cmp(b.lits()))).cloned()
}

/// One recursion frame, as recorded by [`KdnfEnum::with_frame_log`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameInfo {
    pub id: u32,
    pub parent: Option<u32>,
    pub prefix: PartialAssignment,
    pub chosen: Term,
}

struct Job {
    id: u32,
    parent: Option<u32>,
    prefix: Vec<(usize, bool)>,
    trie: TermTrie,
    min_term: Vec<Lit>,
    live_vars: usize,
}

/// Resumable construction of `D[0_C^y]` for every `y ∈ var(C)`.
struct Builder {
    c: Vec<Lit>,
    y: usize,
    val: Vec<u8>,
    stack: Vec<(NodeId, usize, bool)>,
    word: Vec<Lit>,
    target: Option<TermTrie>,
    best: Option<Vec<Lit>>,
    seen: Vec<u32>,
    live: usize,
    done: Vec<Built>,
}

/// A finished restriction: assigned literals, its trie, its minimum term
/// and its live variable count.
type Built = (Vec<(usize, bool)>, TermTrie, Vec<Lit>, usize);

const UNSET: u8 = 0;

impl Builder {
    fn new(c: Vec<Lit>, n: usize) -> Builder {
        Builder {
            c,
            y: 0,
            val: vec![UNSET; n + 1],
            stack: Vec::new(),
            word: Vec::new(),
            target: None,
            best: None,
            seen: vec![0; n + 1],
            live: 0,
            done: Vec::new(),
        }
    }

    fn finished(&self) -> bool {
        self.y == self.c.len()
    }

    /// Value code: 1 = false, 2 = true.
    fn start_cofactor(&mut self, src: &TermTrie, steps: &mut StepCounter) {
        for (i, l) in self.c.iter().enumerate() {
            steps.tick();
            self.val[l.var()] = if i < self.y {
                1 + l.is_positive() as u8
            } else if i == self.y {
                1 + !l.is_positive() as u8
            } else {
                UNSET
            };
        }
        self.stack.clear();
        self.word.clear();
        self.stack.push((src.trie().root(), 0, false));
        self.target = Some(TermTrie::new(src.num_vars()));
        self.best = None;
        self.live = 0;
    }

    /// Runs until `budget` steps are spent (or everything is built).
    fn run(&mut self, src: &TermTrie, budget: Option<u64>, steps: &mut StepCounter) {
        let start = steps.get();
        let trie = src.trie();
        while !self.finished() {
            if budget.is_some_and(|b| steps.get() - start >= b) {
                return;
            }
            if self.target.is_none() {
                self.start_cofactor(src, steps);
                continue;
            }
            let Some(top) = self.stack.last_mut() else {
                self.close_cofactor(steps);
                continue;
            };
            steps.tick();
            let (node, idx, _) = *top;
            let kids = trie.children(node);
            if idx == kids.len() {
                let (_, _, pushed) = self.stack.pop().expect("non-empty");
                if pushed {
                    self.word.pop();
                }
                continue;
            }
            top.1 += 1;
            let (sym, child) = kids[idx];
            let lit = Lit::from_code(sym);
            let pushed = match self.val[lit.var()] {
                UNSET => {
                    self.word.push(lit);
                    true
                }
                v if (v == 2) == lit.is_positive() => false,
                _ => continue,
            };
            self.stack.push((child, 0, pushed));
            if trie.is_terminal(child) {
                self.emit(steps);
            }
        }
    }

    fn emit(&mut self, steps: &mut StepCounter) {
        let target = self.target.as_mut().expect("building");
        if !target.insert_term(&self.word, steps) {
            return;
        }
        let stamp = self.y as u32 + 1;
        for l in &self.word {
            steps.tick();
            if self.seen[l.var()] != stamp {
                self.seen[l.var()] = stamp;
                self.live += 1;
            }
        }
        let better = match &self.best {
            None => true,
            Some(b) => {
                steps.add(self.word.len() as u64);
                (self.word.len(), &self.word[..]) < (b.len(), &b[..])
            }
        };
        if better {
            self.best = Some(self.word.clone());
        }
    }

    fn close_cofactor(&mut self, steps: &mut StepCounter) {
        let target = self.target.take().expect("building");
        if !target.is_empty() {
            let assigned: Vec<(usize, bool)> = self.c[..=self.y]
                .iter()
                .enumerate()
                .map(|(i, l)| (l.var(), if i < self.y { l.is_positive() } else { !l.is_positive() }))
                .collect();
            steps.add(assigned.len() as u64);
            let best = self.best.take().expect("non-empty trie has a term");
            self.done.push((assigned, target, best, self.live));
        }
        self.y += 1;
    }
}

struct Active {
    job: Job,
    walk: GrayWalk,
    builder: Option<Builder>,
}

enum Phase {
    Idle,
    Gray(Box<Active>),
    Hybrid(u32, Box<AvgEnum>),
}

pub struct KdnfEnum {
    cfg: KdnfConfig,
    hybrid: bool,
    n: usize,
    jobs: Vec<Job>,
    phase: Phase,
    regs: Vec<bool>,
    next_id: u32,
    last_frame: Option<u32>,
    frames: Option<Vec<FrameInfo>>,
    guard_violations: u64,
    max_live_nodes: usize,
    steps: StepCounter,
    pre: u64,
}

pub fn enum_kdnf(d: &Dnf, cfg: KdnfConfig) -> Result<KdnfEnum, KdnfError> {
    KdnfEnum::new(d, cfg, false)
}

pub fn enum_kdnf_hybrid(d: &Dnf, cfg: KdnfConfig) -> Result<KdnfEnum, KdnfError> {
    KdnfEnum::new(d, cfg, true)
}

impl KdnfEnum {
    fn new(d: &Dnf, cfg: KdnfConfig, hybrid: bool) -> Result<KdnfEnum, KdnfError> {
        if d.max_width() > cfg.k {
            return Err(KdnfError::TermTooWide { width: d.max_width(), k: cfg.k });
        }
        let n = d.num_vars();
        let mut steps = StepCounter::new();
        let trie = TermTrie::from_dnf(d, &mut steps);
        let mut jobs = Vec::new();
        if let Some(t) = choose_min_term(d) {
            steps.add(d.size() as u64);
            let mut seen = vec![false; n + 1];
            for term in d.terms() {
                for v in term.vars() {
                    seen[v] = true;
                }
            }
            let live_vars = seen.iter().filter(|&&s| s).count();
            jobs.push(Job { id: 0, parent: None, prefix: Vec::new(), trie, min_term: t.lits().to_vec(), live_vars });
        }
        let pre = steps.get();
        Ok(KdnfEnum {
            cfg,
            hybrid,
            n,
            jobs,
            phase: Phase::Idle,
            regs: vec![false; n],
            next_id: 1,
            last_frame: None,
            frames: None,
            guard_violations: 0,
            max_live_nodes: 0,
            steps,
            pre,
        })
    }

    /// Records every frame; see [`frames`](Self::frames).
    pub fn with_frame_log(mut self) -> KdnfEnum {
        self.frames = Some(Vec::new());
        self
    }

    pub fn frames(&self) -> &[FrameInfo] {
        self.frames.as_deref().unwrap_or(&[])
    }

    /// Frame that produced the last output.
    pub fn last_frame(&self) -> Option<u32> {
        self.last_frame
    }

    /// Number of frames where the budget inequality failed.
    pub fn guard_violations(&self) -> u64 {
        self.guard_violations
    }

    pub fn config(&self) -> &KdnfConfig {
        &self.cfg
    }

    fn start_job(&mut self, job: Job) {
        if let Some(f) = self.frames.as_mut() {
            f.push(FrameInfo {
                id: job.id,
                parent: job.parent,
                prefix: PartialAssignment::from_pairs(job.prefix.iter().copied()),
                chosen: Term::from_sorted_unchecked(job.min_term.clone()),
            });
        }
        let mut fixed = vec![false; self.n + 1];
        for &(v, b) in &job.prefix {
            fixed[v] = true;
            self.regs[v - 1] = b;
        }
        self.steps.add(self.n as u64);
        if self.hybrid && (job.live_vars as f64) < self.cfg.lambda * self.cfg.k as f64 {
            let vars: Vec<usize> = (1..=self.n).filter(|&v| !fixed[v]).collect();
            let regs = self.regs.clone();
            let inner = AvgEnum::on_trie(job.trie, regs, vars, AvgMode::SmallerSide, StepCounter::new());
            self.phase = Phase::Hybrid(job.id, Box::new(inner));
            return;
        }
        for &l in &job.min_term {
            fixed[l.var()] = true;
            self.regs[l.var() - 1] = l.is_positive();
        }
        for (r, &f) in self.regs.iter_mut().zip(&fixed[1..]) {
            if !f {
                *r = false;
            }
        }
        let free: Vec<usize> = (0..self.n).filter(|&i| !fixed[i + 1]).collect();
        self.steps.add(2 * self.n as u64);
        let needs_split = job.trie.len() > 1 && !job.min_term.is_empty();
        let builder = if needs_split {
            let w = job.min_term.len();
            if !self.cfg.guard_holds(job.live_vars, w, job.trie.len()) {
                self.guard_violations += 1;
            }
            Some(Builder::new(job.min_term.clone(), self.n))
        } else {
            None
        };
        self.max_live_nodes = self.max_live_nodes.max(self.live_nodes() + job.trie.node_count());
        self.phase = Phase::Gray(Box::new(Active { job, walk: GrayWalk::new(free), builder }));
    }

    fn live_nodes(&self) -> usize {
        self.jobs.iter().map(|j| j.trie.node_count()).sum()
    }

    /// Turns finished restrictions into jobs, first `y` on top.
    fn push_children(&mut self, parent: &Job, built: Vec<Built>) {
        for (assigned, trie, min_term, live_vars) in built.into_iter().rev() {
            let mut prefix = parent.prefix.clone();
            prefix.extend(assigned);
            self.steps.add(prefix.len() as u64);
            let id = self.next_id;
            self.next_id += 1;
            self.jobs.push(Job { id, parent: Some(parent.id), prefix, trie, min_term, live_vars });
        }
    }
}

impl ModelEnumerator for KdnfEnum {
    fn num_vars(&self) -> usize {
        self.n
    }

    fn next_model(&mut self) -> Option<&[bool]> {
        loop {
            match &mut self.phase {
                Phase::Idle => {
                    let job = self.jobs.pop()?;
                    self.steps.tick();
                    self.start_job(job);
                }
                Phase::Hybrid(id, inner) => {
                    let id = *id;
                    if inner.next_model().is_some() {
                        self.last_frame = Some(id);
                        let Phase::Hybrid(_, inner) = &self.phase else { unreachable!() };
                        return Some(inner.current());
                    }
                    self.steps.add(inner.steps());
                    self.phase = Phase::Idle;
                }
                Phase::Gray(active) => {
                    let budget = self.cfg.budget();
                    if let Some(b) = active.builder.as_mut() {
                        b.run(&active.job.trie, Some(budget), &mut self.steps);
                    }
                    if active.walk.advance(&mut self.regs, &mut self.steps).is_ok() {
                        self.last_frame = Some(active.job.id);
                        return Some(&self.regs);
                    }
                    let Phase::Gray(active) = std::mem::replace(&mut self.phase, Phase::Idle) else {
                        unreachable!()
                    };
                    let Active { job, builder, .. } = *active;
                    if let Some(mut b) = builder {
                        b.run(&job.trie, None, &mut self.steps);
                        let built = std::mem::take(&mut b.done);
                        self.push_children(&job, built);
                    }
                }
            }
        }
    }

    fn steps(&self) -> u64 {
        match &self.phase {
            Phase::Hybrid(_, inner) => self.steps.get() + inner.steps(),
            _ => self.steps.get(),
        }
    }

    fn precompute_steps(&self) -> u64 {
        self.pre
    }

    fn aux_memory_estimate(&self) -> usize {
        self.max_live_nodes
    }
}
