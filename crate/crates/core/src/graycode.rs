//! Binary reflected Gray code and constant-delay term-model enumeration.

use crate::dnf::Term;
use crate::stats::{ModelEnumerator, StepCounter};

/// Loopless generator of the flip positions of the reflected Gray code on
/// `k` bits (focus-pointer form: the flipped position is the lowest set bit
/// of a running counter).
#[derive(Debug, Clone)]
pub struct GrayCode {
    k: usize,
    focus: Vec<usize>,
    done: bool,
}

impl GrayCode {
    pub fn new(k: usize) -> GrayCode {
        GrayCode { k, focus: (0..=k).collect(), done: false }
    }

    pub fn width(&self) -> usize {
        self.k
    }

    /// Next position to flip, 1-based, or `None` once all `2^k` patterns
    /// have been visited (the all-zero start counts as the first).
    pub fn next_flip(&mut self) -> Option<usize> {
        if self.done {
            return None;
        }
        let j = self.focus[0];
        self.focus[0] = 0;
        if j == self.k {
            self.done = true;
            return None;
        }
        self.focus[j] = self.focus[j + 1];
        self.focus[j + 1] = j + 1;
        Some(j + 1)
    }
}

/// Advances `g`; free-function form of [`GrayCode::next_flip`].
pub fn gray_next(g: &mut GrayCode) -> Option<usize> {
    g.next_flip()
}

/// Constant-delay enumerator of the models of `c` over `n` variables.
pub fn enum_term_models(c: &Term, n: usize) -> TermModelEnum {
    TermModelEnum::new(c, n)
}

/// Walks all values of a set of free register positions by single flips.
#[derive(Debug, Clone)]
pub struct GrayWalk {
    sigma: Vec<usize>,
    gray: GrayCode,
    started: bool,
}

/// Every pattern of a [`GrayWalk`] has been visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exhausted;

impl GrayWalk {
    /// `free` holds 0-based register positions, ascending.
    pub fn new(free: Vec<usize>) -> GrayWalk {
        let gray = GrayCode::new(free.len());
        GrayWalk { sigma: free, gray, started: false }
    }

    /// Moves `regs` to the next pattern. The first call leaves `regs`
    /// untouched; returns the flipped register, `None` for the first call,
    /// and `Err(Exhausted)` once every pattern has been visited.
    pub fn advance(&mut self, regs: &mut [bool], steps: &mut StepCounter) -> Result<Option<usize>, Exhausted> {
        steps.tick();
        if !self.started {
            self.started = true;
            return Ok(None);
        }
        match self.gray.next_flip() {
            Some(pos) => {
                let r = self.sigma[pos - 1];
                regs[r] = !regs[r];
                steps.add(2);
                Ok(Some(r))
            }
            None => Err(Exhausted),
        }
    }

    pub fn free_count(&self) -> usize {
        self.sigma.len()
    }
}

/// Enumerates the `2^(n-|C|)` models of a term, starting from `1_C` with
/// free variables at 0, each further model one register flip away.
#[derive(Debug, Clone)]
pub struct TermModelEnum {
    regs: Vec<bool>,
    walk: GrayWalk,
    steps: StepCounter,
    pre: u64,
    done: bool,
}

impl TermModelEnum {
    pub fn new(term: &Term, n: usize) -> TermModelEnum {
        let mut steps = StepCounter::new();
        let mut regs = vec![false; n];
        let mut bound = vec![false; n];
        for l in term.lits() {
            regs[l.var() - 1] = l.is_positive();
            bound[l.var() - 1] = true;
        }
        steps.add(n as u64);
        let free: Vec<usize> = (0..n).filter(|&i| !bound[i]).collect();
        steps.add(n as u64);
        let pre = steps.get();
        TermModelEnum { regs, walk: GrayWalk::new(free), steps, pre, done: false }
    }

    /// Moves to the next model without borrowing it; `false` once exhausted.
    pub fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        if self.walk.advance(&mut self.regs, &mut self.steps).is_err() {
            self.done = true;
        }
        !self.done
    }

    pub fn current(&self) -> &[bool] {
        &self.regs
    }
}

impl ModelEnumerator for TermModelEnum {
    fn num_vars(&self) -> usize {
        self.regs.len()
    }

    fn next_model(&mut self) -> Option<&[bool]> {
        if self.advance() {
            Some(&self.regs)
        } else {
            None
        }
    }

    fn steps(&self) -> u64 {
        self.steps.get()
    }

    fn precompute_steps(&self) -> u64 {
        self.pre
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::dnf::{brute_force_models, Dnf};
    use crate::stats::collect_models;

    fn flips(k: usize) -> Vec<usize> {
        let mut g = GrayCode::new(k);
        std::iter::from_fn(|| g.next_flip()).collect()
    }

    /// Reflected code by its closed form `i ^ (i >> 1)`, bit 0 = position 1.
    fn oracle_flips(k: usize) -> Vec<usize> {
        (1u64..1 << k)
            .map(|i| {
                let diff = (i ^ (i >> 1)) ^ ((i - 1) ^ ((i - 1) >> 1));
                diff.trailing_zeros() as usize + 1
            })
            .collect()
    }

    #[test]
    fn flip_sequences() {
        assert_eq!(flips(2), vec![1, 2, 1]);
        assert_eq!(flips(0), Vec::<usize>::new());
        for k in 0..=10 {
            assert_eq!(flips(k), oracle_flips(k), "k={k}");
        }
        let mut seen = HashSet::new();
        let mut pat = 0u32;
        seen.insert(pat);
        for p in flips(3) {
            pat ^= 1 << (p - 1);
            assert!(seen.insert(pat));
        }
        assert_eq!(seen.len(), 8);
    }

    #[test]
    fn exhausted_stays_exhausted() {
        let mut g = GrayCode::new(1);
        assert_eq!(g.next_flip(), Some(1));
        assert_eq!(g.next_flip(), None);
        assert_eq!(g.next_flip(), None);
    }

    #[test]
    fn visits_patterns_00_10_11_01() {
        let t = Term::empty();
        let mut e = TermModelEnum::new(&t, 2);
        let got: Vec<Vec<bool>> = collect_models(&mut e);
        assert_eq!(got, vec![vec![false, false], vec![true, false], vec![true, true], vec![false, true]]);
    }

    fn models_of(term: &[i64], n: usize) -> Vec<String> {
        let t = Term::from_dimacs(term).unwrap();
        let mut e = TermModelEnum::new(&t, n);
        let mut v: Vec<String> = collect_models(&mut e)
            .iter()
            .map(|m| m.iter().map(|&b| if b { '1' } else { '0' }).collect())
            .collect();
        v.sort();
        v
    }

    #[test]
    fn term_model_examples() {
        assert_eq!(models_of(&[1, -3], 3), vec!["100", "110"]);
        assert_eq!(models_of(&[1, -2, 3], 3), vec!["101"]);
        let t = Term::empty();
        let mut e = TermModelEnum::new(&t, 3);
        let ms = collect_models(&mut e);
        assert_eq!(ms.len(), 8);
        for w in ms.windows(2) {
            assert_eq!(w[0].iter().zip(&w[1]).filter(|(a, b)| a != b).count(), 1);
        }
    }

    #[test]
    fn matches_oracle_and_first_model_convention() {
        let term = Term::from_dimacs(&[2, -5, 7]).unwrap();
        let n = 9;
        let mut e = TermModelEnum::new(&term, n);
        let first = e.next_model().unwrap().to_vec();
        let expect_first: Vec<bool> = (1..=n).map(|i| i == 2 || i == 7).collect();
        assert_eq!(first, expect_first);
        let mut all = vec![first];
        all.extend(collect_models(&mut e));
        all.sort();
        let oracle = brute_force_models(&Dnf::new(n, [term]).unwrap()).unwrap();
        assert_eq!(all, oracle.iter().map(|a| a.bits().to_vec()).collect::<Vec<_>>());
    }

    #[test]
    fn constant_steps_between_outputs() {
        for n in [8, 30, 64] {
            let term = Term::from_dimacs(&[1, -3]).unwrap();
            let mut e = TermModelEnum::new(&term, n);
            let mut last = e.steps();
            for _ in 0..5000 {
                if e.next_model().is_none() {
                    break;
                }
                assert!(e.steps() - last <= 32);
                last = e.steps();
            }
        }
    }
}
