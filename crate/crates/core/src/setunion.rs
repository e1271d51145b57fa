//! Enumeration of the distinct unions of a family of sets.
//!
//! Flashlight over the elements `1..=n` (absent before present). A set is
//! *alive* while none of its elements has been fixed absent; the prefix
//! extends to a union iff every element fixed present lies in some alive
//! set and, when nothing is present yet, some alive set exists (an empty
//! set only counts as itself).
//!
//! Alive sets are a bitmask, so fixing an element absent kills its sets in
//! `O(m/64)` word operations. For coverage, present elements are grouped by
//! their signature (the alive sets containing them): killing sets maps
//! every signature through the same mask, and the prefix dies iff some
//! signature becomes empty. Only inclusion-minimal signatures are kept;
//! they form an antichain over at most `m` sets, so at fixed `m` a node
//! costs O(1).

use thiserror::Error;

use crate::dnf::PartialAssignment;
use crate::stats::{ModelEnumerator, StepCounter};
use crate::trie::{ChildRepr, Trie};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SetError {
    #[error("element {elem} outside 1..={n}")]
    OutOfRange { elem: usize, n: usize },
}

/// Distinct subsets of `1..=n`, each sorted, in first-seen order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    n: usize,
    sets: Vec<Vec<usize>>,
}

impl SetFamily {
    pub fn new(n: usize, sets: impl IntoIterator<Item = Vec<usize>>) -> Result<SetFamily, SetError> {
        let mut seen: Trie<()> = Trie::new(n as u32 + 1, ChildRepr::SortedList);
        let mut steps = StepCounter::new();
        let mut kept = Vec::new();
        for mut s in sets {
            s.sort_unstable();
            s.dedup();
            if let Some(&e) = s.iter().find(|&&e| e == 0 || e > n) {
                return Err(SetError::OutOfRange { elem: e, n });
            }
            let word: Vec<u32> = s.iter().map(|&e| e as u32).collect();
            if seen.insert(&word, &mut steps).expect("checked range") {
                kept.push(s);
            }
        }
        Ok(SetFamily { n, sets: kept })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    fn has_empty_set(&self) -> bool {
        self.sets.iter().any(Vec::is_empty)
    }
}

/// Whether some union of a non-empty subfamily agrees with `prefix`
/// (membership bits of elements `1..=k`).
pub fn extendable_union(f: &SetFamily, prefix: &PartialAssignment) -> bool {
    let alive = |s: &Vec<usize>| s.iter().all(|&e| prefix.get(e) != Some(false));
    let mut union = vec![false; f.n + 1];
    for s in f.sets.iter().filter(|s| alive(s)) {
        for &e in s {
            union[e] = true;
        }
    }
    let ones: Vec<usize> = prefix.iter().filter(|&(_, b)| b).map(|(e, _)| e).collect();
    let covered = ones.iter().all(|&e| union[e]);
    let nonempty = union.iter().any(|&b| b);
    covered && (nonempty || (ones.is_empty() && f.has_empty_set()))
}

/// Every union of a non-empty subfamily, computed by brute force over the
/// `2^m - 1` subfamilies. Sorted, as bit vectors.
pub fn brute_force_unions(f: &SetFamily) -> Vec<Vec<bool>> {
    assert!(f.len() <= 24, "brute force limited to 24 sets");
    let mut out = std::collections::BTreeSet::new();
    for mask in 1u32..(1 << f.len()) {
        let mut u = vec![false; f.n];
        for (i, s) in f.sets.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for &e in s {
                    u[e - 1] = true;
                }
            }
        }
        out.insert(u);
    }
    out.into_iter().collect()
}

/// Every union, by testing each of the `2^n` subsets `U`: `U` is a union
/// iff the sets inside it cover it and at least one set fits. Sorted.
pub fn unions_by_closure(f: &SetFamily) -> Vec<Vec<bool>> {
    assert!(f.n <= 24, "closure oracle limited to 24 elements");
    let masks: Vec<u32> = f.sets.iter().map(|s| s.iter().fold(0u32, |a, &e| a | 1 << (e - 1))).collect();
    let mut out = Vec::new();
    for u in 0u32..(1 << f.n) {
        let inside = masks.iter().filter(|&&s| s & !u == 0);
        let mut any = false;
        let mut cover = 0u32;
        for &s in inside {
            any = true;
            cover |= s;
        }
        if any && cover == u {
            out.push((0..f.n).map(|i| u >> i & 1 == 1).collect());
        }
    }
    out.sort();
    out
}

pub struct UnionEnum {
    n: usize,
    words: usize,
    /// `cov[e * words..]`: bitmask of the sets containing element `e`.
    cov: Vec<u64>,
    nonempty: Vec<u64>,
    alive: Vec<u64>,
    alive_nonempty: usize,
    has_empty: bool,
    /// Inclusion-minimal alive-cover signatures of the present elements,
    /// `words` per entry. A signature becomes empty only if a minimal one
    /// below it does, so the others need not be kept.
    regions: Vec<u64>,
    /// Sets killed by each element fixed absent.
    killed: Vec<u64>,
    /// Signature list before each fixed element, if it changed.
    saved: Vec<Option<Vec<u64>>>,
    ones: usize,
    regs: Vec<bool>,
    tried: Vec<u8>,
    depth: usize,
    started: bool,
    done: bool,
    steps: StepCounter,
    pre: u64,
}

pub fn enum_unions(f: &SetFamily) -> UnionEnum {
    let n = f.n;
    let words = f.len().div_ceil(64).max(1);
    let mut steps = StepCounter::new();
    let mut cov = vec![0u64; (n + 1) * words];
    let mut nonempty = vec![0u64; words];
    for (i, s) in f.sets.iter().enumerate() {
        if !s.is_empty() {
            nonempty[i / 64] |= 1 << (i % 64);
        }
        for &e in s {
            steps.tick();
            cov[e * words + i / 64] |= 1 << (i % 64);
        }
    }
    steps.add(((n + 1) * words + f.len()) as u64);
    UnionEnum {
        n,
        words,
        cov,
        alive: nonempty.clone(),
        alive_nonempty: f.sets.iter().filter(|s| !s.is_empty()).count(),
        nonempty,
        has_empty: f.has_empty_set(),
        regions: Vec::new(),
        killed: Vec::with_capacity(n * words),
        saved: Vec::new(),
        ones: 0,
        regs: vec![false; n],
        tried: vec![0; n],
        depth: 0,
        started: false,
        done: false,
        pre: steps.get(),
        steps,
    }
}

impl UnionEnum {
    fn feasible_counts(&self) -> bool {
        self.alive_nonempty > 0 || (self.ones == 0 && self.has_empty)
    }

    /// Number of distinct signatures currently tracked.
    pub fn region_count(&self) -> usize {
        self.regions.len() / self.words
    }

    /// Fixes `e` and reports whether the prefix still extends to a union.
    /// On `false` the state is already restored.
    fn assign(&mut self, e: usize, present: bool) -> bool {
        self.steps.tick();
        let w = self.words;
        if present {
            let x: Vec<u64> = (0..w).map(|i| self.cov[e * w + i] & self.alive[i]).collect();
            self.steps.add(w as u64);
            if x.iter().all(|&v| v == 0) {
                return false;
            }
            let mut rows: Vec<&[u64]> = self.regions.chunks_exact(w).collect();
            self.steps.add(rows.len() as u64);
            if rows.iter().any(|r| subset(r, &x)) {
                // Covered whenever a smaller signature is.
                self.saved.push(None);
            } else {
                rows.retain(|r| !subset(&x, r));
                rows.push(&x);
                let next = rows.concat();
                let old = std::mem::replace(&mut self.regions, next);
                self.saved.push(Some(old));
            }
            self.regs[e - 1] = true;
            self.ones += 1;
            return true;
        }
        let mut lost = 0;
        let mut hit = 0;
        for i in 0..w {
            self.steps.tick();
            let k = self.cov[e * w + i] & self.alive[i];
            self.alive[i] &= !k;
            lost += (k & self.nonempty[i]).count_ones() as usize;
            hit |= k;
            self.killed.push(k);
        }
        self.alive_nonempty -= lost;
        if hit == 0 {
            // No alive set contains e: nothing changes but the register.
            self.saved.push(None);
            return true;
        }
        let base = self.killed.len() - w;
        let mut ok = self.feasible_counts();
        let mut next = Vec::with_capacity(self.regions.len());
        let mut changed = false;
        for r in self.regions.chunks_exact(w) {
            self.steps.tick();
            let mut any = 0;
            for (&ri, &k) in r.iter().zip(&self.killed[base..base + w]) {
                let x = ri & !k;
                changed |= x != ri;
                any |= x;
                next.push(x);
            }
            if any == 0 {
                ok = false;
                break;
            }
        }
        if !ok {
            self.revive_sets();
            return false;
        }
        if changed {
            let next = minimal_rows(&next, w);
            self.steps.add((next.len() / w) as u64);
            let old = std::mem::replace(&mut self.regions, next);
            self.saved.push(Some(old));
        } else {
            self.saved.push(None);
        }
        true
    }

    fn revive_sets(&mut self) {
        let w = self.words;
        let base = self.killed.len() - w;
        let mut back = 0;
        for i in 0..w {
            self.steps.tick();
            let k = self.killed[base + i];
            self.alive[i] |= k;
            back += (k & self.nonempty[i]).count_ones() as usize;
        }
        self.killed.truncate(base);
        self.alive_nonempty += back;
    }

    fn unassign(&mut self, e: usize) {
        self.steps.tick();
        if let Some(old) = self.saved.pop().expect("one entry per fixed element") {
            self.steps.add((old.len() / self.words) as u64);
            self.regions = old;
        }
        if self.regs[e - 1] {
            self.ones -= 1;
            self.regs[e - 1] = false;
        } else {
            self.revive_sets();
        }
    }
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// The inclusion-minimal rows of `flat` (rows of `w` words), deduplicated.
fn minimal_rows(flat: &[u64], w: usize) -> Vec<u64> {
    let mut rows: Vec<&[u64]> = flat.chunks_exact(w).collect();
    rows.sort_unstable_by_key(|r| (r.iter().map(|x| x.count_ones()).sum::<u32>(), *r));
    rows.dedup();
    let mut kept: Vec<&[u64]> = Vec::with_capacity(rows.len());
    for r in rows {
        if !kept.iter().any(|k| subset(k, r)) {
            kept.push(r);
        }
    }
    kept.concat()
}

impl ModelEnumerator for UnionEnum {
    fn num_vars(&self) -> usize {
        self.n
    }

    fn next_model(&mut self) -> Option<&[bool]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if !self.feasible_counts() {
                self.done = true;
                return None;
            }
        } else {
            if self.depth == 0 {
                self.done = true;
                return None;
            }
            self.depth -= 1;
            self.unassign(self.depth + 1);
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
                self.unassign(self.depth + 1);
                continue;
            }
            self.tried[level] = v + 1;
            if self.assign(level + 1, v == 1) {
                self.depth += 1;
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
        self.killed.len()
    }
}
