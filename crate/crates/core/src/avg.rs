//! Flashlight over a term trie, with restricted formulas built by trie
//! surgery instead of being recomputed.
//!
//! Two branching policies are available. [`AvgMode::MergeAlways`] always
//! merges the satisfied subtree into the root. [`AvgMode::SmallerSide`]
//! instead grafts the terms that do not mention the variable onto the
//! satisfied subtree whenever they are strictly fewer, so the smaller side
//! is always the one copied.

use crate::dnf::Dnf;
use crate::stats::{ModelEnumerator, StepCounter};
use crate::term_trie::{TermTrie, UndoToken};

/// `log_3 2`.
pub const GAMMA: f64 = 0.630_929_753_571_457_4;

/// Lower bound `m^γ` on the model count of a formula with `m` distinct
/// non-empty terms.
pub fn min_models_bound(m: usize) -> f64 {
    if m == 0 {
        0.0
    } else {
        (m as f64).powf(GAMMA)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AvgMode {
    /// Always restrict by merging into the root (`--mode t10`).
    MergeAlways,
    /// Copy whichever side is smaller (`--mode t11`).
    SmallerSide,
}

/// Called at every visited inner node with the assigned prefix (values of
/// the branching variables so far) and the restricted formula.
pub type NodeHook = Box<dyn FnMut(&[(usize, bool)], &TermTrie)>;

pub struct AvgEnum {
    trie: TermTrie,
    mode: AvgMode,
    vars: Vec<usize>,
    regs: Vec<bool>,
    tried: Vec<u8>,
    tokens: Vec<UndoToken>,
    prefix: Vec<(usize, bool)>,
    depth: usize,
    started: bool,
    done: bool,
    fast: u64,
    slow: u64,
    hook: Option<NodeHook>,
    steps: StepCounter,
    pre: u64,
}

pub fn enum_avg(d: &Dnf, mode: AvgMode) -> AvgEnum {
    let mut steps = StepCounter::new();
    let trie = TermTrie::from_dnf(d, &mut steps);
    let n = d.num_vars();
    AvgEnum::on_trie(trie, vec![false; n], (1..=n).collect(), mode, steps)
}

impl AvgEnum {
    /// Enumerates the models of `trie` over `vars` (ascending, covering
    /// every variable the trie mentions); other registers keep the values
    /// in `regs`. Steps already in `steps` count as precomputation.
    pub fn on_trie(
        trie: TermTrie,
        regs: Vec<bool>,
        vars: Vec<usize>,
        mode: AvgMode,
        mut steps: StepCounter,
    ) -> AvgEnum {
        steps.add(vars.len() as u64);
        let pre = steps.get();
        AvgEnum {
            trie,
            mode,
            tried: vec![0; vars.len()],
            tokens: Vec::with_capacity(vars.len()),
            prefix: Vec::with_capacity(vars.len()),
            vars,
            regs,
            depth: 0,
            started: false,
            done: false,
            fast: 0,
            slow: 0,
            hook: None,
            steps,
            pre,
        }
    }

    pub fn with_hook(mut self, hook: NodeHook) -> AvgEnum {
        self.hook = Some(hook);
        self
    }

    /// Registers as of the last output.
    pub fn current(&self) -> &[bool] {
        &self.regs
    }

    pub fn trie(&self) -> &TermTrie {
        &self.trie
    }

    /// Returns the trie once enumeration is over (it is then restored to
    /// its initial content).
    pub fn into_trie(self) -> TermTrie {
        self.trie
    }

    /// Number of fast and slow restrictions performed so far.
    pub fn branch_counts(&self) -> (u64, u64) {
        (self.fast, self.slow)
    }

    fn pop(&mut self) {
        self.depth -= 1;
        self.prefix.pop();
        let tok = self.tokens.pop().expect("one token per level");
        self.trie.undo(tok, &mut self.steps).expect("LIFO undo");
    }

    fn restrict(&mut self, x: usize, b: bool, parent_len: usize, none: usize, lit_side: usize) -> UndoToken {
        match self.mode {
            AvgMode::MergeAlways => {
                self.slow += 1;
                self.trie.set_variable(x, b, &mut self.steps)
            }
            AvgMode::SmallerSide if none < lit_side => {
                assert!(2 * none <= parent_len, "fast branch on a large remainder");
                self.fast += 1;
                self.trie.set_variable_fast(x, b, &mut self.steps)
            }
            AvgMode::SmallerSide => {
                self.slow += 1;
                self.trie.set_variable(x, b, &mut self.steps)
            }
        }
    }
}

impl ModelEnumerator for AvgEnum {
    fn num_vars(&self) -> usize {
        self.regs.len()
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
            if let Some(h) = self.hook.as_mut() {
                h(&self.prefix, &self.trie);
            }
        } else {
            if self.depth == 0 {
                self.done = true;
                return None;
            }
            self.pop();
        }
        let k = self.vars.len();
        loop {
            self.steps.tick();
            if self.depth == k {
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
            let b = v == 1;
            let x = self.vars[level];
            let split = self.trie.split(x, &mut self.steps);
            if split.surviving(b) == 0 {
                continue;
            }
            let lit_side = if b { split.pos } else { split.neg };
            let tok = self.restrict(x, b, self.trie.len(), split.none, lit_side);
            self.tokens.push(tok);
            self.regs[x - 1] = b;
            self.steps.tick();
            self.prefix.push((x, b));
            self.depth += 1;
            if self.depth < k {
                if let Some(h) = self.hook.as_mut() {
                    h(&self.prefix, &self.trie);
                }
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
        self.trie.node_count()
    }
}

#[cfg(test)]
mod tests {
    use std::cell::RefCell;
    use std::rc::Rc;

    use super::*;
    use crate::classic::enum_flashlight;
    use crate::dnf::{brute_force_count, brute_force_models, PartialAssignment};
    use crate::stats::collect_models;

    fn oracle(d: &Dnf) -> Vec<Vec<bool>> {
        brute_force_models(d).unwrap().iter().map(|a| a.bits().to_vec()).collect()
    }

    #[test]
    fn gamma_value() {
        assert!((3f64.powf(GAMMA) - 2.0).abs() < 1e-12);
        assert!((GAMMA - 2f64.ln() / 3f64.ln()).abs() < 1e-15);
        assert_eq!(min_models_bound(0), 0.0);
        assert_eq!(min_models_bound(1), 1.0);
        assert!((min_models_bound(8) - 3.7137).abs() < 1e-3);
    }

    #[test]
    fn example_both_modes() {
        let d = Dnf::from_dimacs(3, &[&[1, 2], &[-3]]).unwrap();
        let a = collect_models(&mut enum_avg(&d, AvgMode::MergeAlways));
        let b = collect_models(&mut enum_avg(&d, AvgMode::SmallerSide));
        assert_eq!(a, oracle(&d));
        assert_eq!(a, b);
        assert_eq!(a, collect_models(&mut enum_flashlight(&d)));
    }

    #[test]
    fn zero_terms_and_tautology() {
        let d = Dnf::new(4, []).unwrap();
        assert!(enum_avg(&d, AvgMode::SmallerSide).next_model().is_none());
        let d = Dnf::from_dimacs(3, &[&[], &[2]]).unwrap();
        assert_eq!(collect_models(&mut enum_avg(&d, AvgMode::SmallerSide)).len(), 8);
    }

    #[test]
    fn trie_restored_after_enumeration() {
        let d = Dnf::from_dimacs(5, &[&[1, -2], &[2, 3, -5], &[-1, 4], &[5], &[3]]).unwrap();
        for mode in [AvgMode::MergeAlways, AvgMode::SmallerSide] {
            let mut e = enum_avg(&d, mode);
            let got = collect_models(&mut e);
            assert_eq!(got, oracle(&d));
            assert_eq!(e.trie().undo_depth(), 0);
            assert_eq!(e.trie().terms(), d.sorted_terms());
        }
    }

    #[test]
    fn every_visited_node_has_enough_models() {
        let d = Dnf::from_dimacs(
            6,
            &[&[1, 2], &[-1, 3], &[2, -4, 5], &[-2, 6], &[3, 4], &[-5, -6], &[1, -3, 6], &[4]],
        )
        .unwrap();
        let seen = Rc::new(RefCell::new(0usize));
        let dd = d.clone();
        let counter = Rc::clone(&seen);
        let hook: NodeHook = Box::new(move |prefix, trie| {
            let tau = PartialAssignment::from_pairs(prefix.iter().copied());
            let restricted = dd.restrict(&tau);
            assert_eq!(trie.terms(), restricted.sorted_terms());
            let models = dd.models_compatible(&tau).len();
            if !restricted.has_empty_term() {
                assert!(models as f64 + 1e-9 >= min_models_bound(restricted.num_terms()));
            }
            *counter.borrow_mut() += 1;
        });
        let mut e = enum_avg(&d, AvgMode::SmallerSide).with_hook(hook);
        let got = collect_models(&mut e);
        assert_eq!(got.len() as u64, brute_force_count(&d).unwrap());
        assert!(*seen.borrow() > 0);
    }

    #[test]
    fn fast_branching_used_on_skewed_input() {
        // Many terms under x1, few without it.
        let mut terms: Vec<Vec<i64>> = Vec::new();
        for a in [-2, 2] {
            for b in [-3, 3] {
                for c in [-4, 4] {
                    terms.push(vec![1, a, b, c]);
                }
            }
        }
        terms.push(vec![5]);
        let refs: Vec<&[i64]> = terms.iter().map(Vec::as_slice).collect();
        let d = Dnf::from_dimacs(5, &refs).unwrap();
        let mut e = enum_avg(&d, AvgMode::SmallerSide);
        let got = collect_models(&mut e);
        assert_eq!(got, oracle(&d));
        assert!(e.branch_counts().0 > 0);
    }
}
