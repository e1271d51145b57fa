//! Tries over a bounded integer alphabet.
//!
//! Nodes live in an arena and are addressed by [`NodeId`]. Every node keeps
//! the number of words stored in its subtree, so the size of any subtree is
//! an O(1) query. Children are stored either as a sorted list (binary model
//! tries) or as a lazily initialized array indexed by symbol (term tries over
//! the literal alphabet).
//!
//! The array representation never trusts memory it has not written: a slot
//! `back[node * alphabet + sym]` is only believed when it points into the
//! node's child stack at an entry labelled `sym`. The child stack doubles as
//! the node's child list, so iteration costs the number of children.
//!
//! Count updates stop at the root argument passed to each operation, which
//! lets callers treat any node as the current root of the stored set.

use crate::stats::StepCounter;

pub type NodeId = u32;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChildRepr {
    SortedList,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("symbol {sym} outside alphabet of size {alphabet}")]
pub struct SymbolOutOfRange {
    pub sym: u32,
    pub alphabet: u32,
}

#[derive(Debug, Clone)]
struct Node<V> {
    parent: NodeId,
    label: u32,
    count: u32,
    min_depth: u32,
    value: Option<V>,
    kids: Vec<(u32, NodeId)>,
}

impl<V> Node<V> {
    fn fresh(parent: NodeId, label: u32) -> Node<V> {
        Node { parent, label, count: 0, min_depth: NONE, value: None, kids: Vec::new() }
    }
}

#[derive(Debug, Clone)]
pub struct Trie<V> {
    alphabet: u32,
    repr: ChildRepr,
    nodes: Vec<Node<V>>,
    back: Vec<u32>,
    free: Vec<NodeId>,
    root: NodeId,
    track_min_depth: bool,
}

impl<V> Trie<V> {
    pub fn new(alphabet: u32, repr: ChildRepr) -> Trie<V> {
        let mut t = Trie {
            alphabet,
            repr,
            nodes: Vec::new(),
            back: Vec::new(),
            free: Vec::new(),
            root: 0,
            track_min_depth: false,
        };
        t.root = t.alloc(NONE, NONE);
        t
    }

    /// Also maintain, per node, the depth of the shallowest word below it.
    pub fn with_min_depth(mut self) -> Trie<V> {
        assert!(self.is_empty(), "enable depth tracking before inserting");
        self.track_min_depth = true;
        self
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn repr(&self) -> ChildRepr {
        self.repr
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn set_root(&mut self, root: NodeId) {
        self.root = root;
    }

    /// Number of words under the current root.
    pub fn len(&self) -> usize {
        self.count(self.root)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn count(&self, node: NodeId) -> usize {
        self.nodes[node as usize].count as usize
    }

    pub fn is_terminal(&self, node: NodeId) -> bool {
        self.nodes[node as usize].value.is_some()
    }

    pub fn value(&self, node: NodeId) -> Option<&V> {
        self.nodes[node as usize].value.as_ref()
    }

    pub fn value_mut(&mut self, node: NodeId) -> Option<&mut V> {
        self.nodes[node as usize].value.as_mut()
    }

    pub fn label(&self, node: NodeId) -> u32 {
        self.nodes[node as usize].label
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        let p = self.nodes[node as usize].parent;
        (p != NONE).then_some(p)
    }

    /// Depth of the shallowest word under `node`, relative to `node`.
    pub fn min_depth(&self, node: NodeId) -> Option<usize> {
        assert!(self.track_min_depth, "min-depth tracking disabled");
        let d = self.nodes[node as usize].min_depth;
        (d != NONE).then_some(d as usize)
    }

    /// Children of `node` as `(symbol, child)`; sorted only for
    /// [`ChildRepr::SortedList`].
    pub fn children(&self, node: NodeId) -> &[(u32, NodeId)] {
        &self.nodes[node as usize].kids
    }

    /// Live nodes, detached subtrees included.
    pub fn node_count(&self) -> usize {
        self.nodes.len() - self.free.len()
    }

    fn alloc(&mut self, parent: NodeId, label: u32) -> NodeId {
        if let Some(id) = self.free.pop() {
            self.nodes[id as usize] = Node::fresh(parent, label);
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(Node::fresh(parent, label));
        if self.repr == ChildRepr::Array {
            // Contents are irrelevant: slots are validated against the stack.
            self.back.resize(self.back.len() + self.alphabet as usize, 0);
        }
        id
    }

    fn release(&mut self, id: NodeId) {
        let n = &mut self.nodes[id as usize];
        debug_assert!(n.kids.is_empty() && n.value.is_none());
        n.kids.clear();
        self.free.push(id);
    }

    fn check_sym(&self, sym: u32) -> Result<(), SymbolOutOfRange> {
        if sym >= self.alphabet {
            Err(SymbolOutOfRange { sym, alphabet: self.alphabet })
        } else {
            Ok(())
        }
    }

    fn kid_index(&self, node: NodeId, sym: u32) -> Option<usize> {
        let kids = &self.nodes[node as usize].kids;
        match self.repr {
            ChildRepr::SortedList => kids.binary_search_by_key(&sym, |&(s, _)| s).ok(),
            ChildRepr::Array => {
                let b = self.back[node as usize * self.alphabet as usize + sym as usize] as usize;
                (b < kids.len() && kids[b].0 == sym).then_some(b)
            }
        }
    }

    /// Child of `node` labelled `sym`.
    pub fn child(&self, node: NodeId, sym: u32, steps: &mut StepCounter) -> Option<NodeId> {
        steps.tick();
        if sym >= self.alphabet {
            return None;
        }
        self.kid_index(node, sym).map(|i| self.nodes[node as usize].kids[i].1)
    }

    fn link(&mut self, parent: NodeId, sym: u32, child: NodeId) {
        match self.repr {
            ChildRepr::SortedList => {
                let kids = &mut self.nodes[parent as usize].kids;
                let pos = kids.binary_search_by_key(&sym, |&(s, _)| s).unwrap_err();
                kids.insert(pos, (sym, child));
            }
            ChildRepr::Array => {
                let kids = &mut self.nodes[parent as usize].kids;
                self.back[parent as usize * self.alphabet as usize + sym as usize] = kids.len() as u32;
                kids.push((sym, child));
            }
        }
        self.nodes[child as usize].parent = parent;
        self.nodes[child as usize].label = sym;
    }

    fn unlink(&mut self, parent: NodeId, sym: u32) -> Option<NodeId> {
        let i = self.kid_index(parent, sym)?;
        let child = match self.repr {
            ChildRepr::SortedList => self.nodes[parent as usize].kids.remove(i).1,
            ChildRepr::Array => {
                let kids = &mut self.nodes[parent as usize].kids;
                let (_, child) = kids.swap_remove(i);
                if i < kids.len() {
                    let moved = kids[i].0;
                    self.back[parent as usize * self.alphabet as usize + moved as usize] = i as u32;
                }
                child
            }
        };
        Some(child)
    }

    fn recompute_min_depth(&mut self, node: NodeId, steps: &mut StepCounter) {
        let n = &self.nodes[node as usize];
        let mut best = if n.value.is_some() { 0 } else { NONE };
        for &(_, c) in &n.kids {
            steps.tick();
            let d = self.nodes[c as usize].min_depth;
            if d != NONE {
                best = best.min(d + 1);
            }
        }
        self.nodes[node as usize].min_depth = best;
    }

    /// Inserts `word` under `root`; the value is built only for a new word.
    ///
    /// Returns the terminal node and whether the word was new.
    pub fn insert_with(
        &mut self,
        root: NodeId,
        word: &[u32],
        steps: &mut StepCounter,
        value: impl FnOnce() -> V,
    ) -> Result<(NodeId, bool), SymbolOutOfRange> {
        for &s in word {
            self.check_sym(s)?;
        }
        let mut cur = root;
        for &s in word {
            steps.tick();
            cur = match self.kid_index(cur, s) {
                Some(i) => self.nodes[cur as usize].kids[i].1,
                None => {
                    let c = self.alloc(cur, s);
                    self.link(cur, s, c);
                    c
                }
            };
        }
        steps.tick();
        if self.nodes[cur as usize].value.is_some() {
            return Ok((cur, false));
        }
        self.nodes[cur as usize].value = Some(value());
        let leaf = cur;
        let mut dist = 0u32;
        loop {
            steps.tick();
            let n = &mut self.nodes[cur as usize];
            n.count += 1;
            if self.track_min_depth {
                n.min_depth = n.min_depth.min(dist);
            }
            if cur == root {
                break;
            }
            cur = n.parent;
            dist += 1;
        }
        Ok((leaf, true))
    }

    /// Terminal node of `word` under `root`, if stored.
    pub fn find_at(
        &self,
        root: NodeId,
        word: &[u32],
        steps: &mut StepCounter,
    ) -> Result<Option<NodeId>, SymbolOutOfRange> {
        for &s in word {
            self.check_sym(s)?;
        }
        let mut cur = root;
        for &s in word {
            match self.child(cur, s, steps) {
                Some(c) => cur = c,
                None => return Ok(None),
            }
        }
        steps.tick();
        Ok(self.is_terminal(cur).then_some(cur))
    }

    /// Removes the word ending at `leaf` from the set under `root`, pruning
    /// nodes left without words. `leaf` must be a terminal below `root`.
    pub fn remove_leaf(&mut self, root: NodeId, leaf: NodeId, steps: &mut StepCounter) -> V {
        let value = self.nodes[leaf as usize].value.take().expect("remove_leaf on a non-terminal node");
        let mut cur = leaf;
        loop {
            steps.tick();
            self.nodes[cur as usize].count -= 1;
            let parent = self.nodes[cur as usize].parent;
            if cur != root && self.nodes[cur as usize].count == 0 {
                let label = self.nodes[cur as usize].label;
                self.unlink(parent, label);
                self.release(cur);
            } else if self.track_min_depth {
                self.recompute_min_depth(cur, steps);
            }
            if cur == root {
                break;
            }
            cur = parent;
        }
        value
    }

    pub fn remove_at(
        &mut self,
        root: NodeId,
        word: &[u32],
        steps: &mut StepCounter,
    ) -> Result<Option<V>, SymbolOutOfRange> {
        Ok(self.find_at(root, word, steps)?.map(|leaf| self.remove_leaf(root, leaf, steps)))
    }

    /// Unhooks the subtree under `parent`'s child `sym`; the subtree keeps
    /// its nodes and can be re-attached with [`attach`](Self::attach).
    pub fn detach(&mut self, parent: NodeId, sym: u32, steps: &mut StepCounter) -> Option<NodeId> {
        steps.tick();
        let child = self.unlink(parent, sym)?;
        let c = self.nodes[child as usize].count;
        self.nodes[parent as usize].count -= c;
        if self.track_min_depth {
            self.recompute_min_depth(parent, steps);
        }
        Some(child)
    }

    pub fn attach(&mut self, parent: NodeId, sym: u32, child: NodeId, steps: &mut StepCounter) {
        steps.tick();
        debug_assert!(self.kid_index(parent, sym).is_none(), "slot already occupied");
        self.link(parent, sym, child);
        let c = self.nodes[child as usize].count;
        let cd = self.nodes[child as usize].min_depth;
        let p = &mut self.nodes[parent as usize];
        p.count += c;
        if self.track_min_depth && cd != NONE {
            p.min_depth = p.min_depth.min(cd + 1);
        }
    }

    /// Calls `f(word, terminal)` for each word under `node`, words taken
    /// relative to `node`. Children whose symbol is in `skip` are not
    /// entered at the top level. Charges one step per node visited.
    pub fn for_each_word(
        &self,
        node: NodeId,
        skip: &[u32],
        steps: &mut StepCounter,
        mut f: impl FnMut(&[u32], NodeId),
    ) {
        let mut word = Vec::new();
        steps.tick();
        if self.is_terminal(node) {
            f(&word, node);
        }
        // (node, next kid index)
        let mut stack: Vec<(NodeId, usize)> = vec![(node, 0)];
        while let Some(top) = stack.last_mut() {
            let (cur, i) = *top;
            let kids = &self.nodes[cur as usize].kids;
            if i == kids.len() {
                stack.pop();
                word.pop();
                continue;
            }
            top.1 += 1;
            let (sym, child) = kids[i];
            if cur == node && skip.contains(&sym) {
                continue;
            }
            steps.tick();
            word.push(sym);
            if self.is_terminal(child) {
                f(&word, child);
            }
            stack.push((child, 0));
        }
    }

    /// All words under `node`, sorted.
    pub fn words(&self, node: NodeId) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        self.for_each_word(node, &[], &mut StepCounter::new(), |w, _| out.push(w.to_vec()));
        out.sort();
        out
    }

    /// Lexicographically smallest word under `node` (prefixes first).
    pub fn min_word(&self, node: NodeId, steps: &mut StepCounter) -> Option<(Vec<u32>, NodeId)> {
        if self.count(node) == 0 {
            return None;
        }
        let mut word = Vec::new();
        let mut cur = node;
        loop {
            steps.tick();
            if self.is_terminal(cur) {
                return Some((word, cur));
            }
            let kids = &self.nodes[cur as usize].kids;
            let &(sym, child) = match self.repr {
                ChildRepr::SortedList => kids.first(),
                ChildRepr::Array => {
                    steps.add(kids.len() as u64);
                    kids.iter().min_by_key(|&&(s, _)| s)
                }
            }
            .expect("non-empty subtree has a child");
            word.push(sym);
            cur = child;
        }
    }

    /// Word spelled by the path from `root` down to `node`.
    pub fn word_of(&self, root: NodeId, node: NodeId) -> Vec<u32> {
        let mut w = Vec::new();
        let mut cur = node;
        while cur != root {
            w.push(self.nodes[cur as usize].label);
            cur = self.nodes[cur as usize].parent;
        }
        w.reverse();
        w
    }

    #[cfg(test)]
    pub(crate) fn scramble_slots(&mut self, seed: u64) {
        let mut x = seed | 1;
        for b in &mut self.back {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            *b = (x % 7) as u32;
        }
        // Restore the validated entries; scrambling must not change the set.
        for id in 0..self.nodes.len() {
            for (i, &(s, _)) in self.nodes[id].kids.iter().enumerate() {
                self.back[id * self.alphabet as usize + s as usize] = i as u32;
            }
        }
    }
}

impl<V: Default> Trie<V> {
    /// Set-semantics insert at the current root.
    pub fn insert(&mut self, word: &[u32], steps: &mut StepCounter) -> Result<bool, SymbolOutOfRange> {
        let root = self.root;
        Ok(self.insert_with(root, word, steps, V::default)?.1)
    }

    pub fn search(&self, word: &[u32], steps: &mut StepCounter) -> Result<bool, SymbolOutOfRange> {
        Ok(self.find_at(self.root, word, steps)?.is_some())
    }

    pub fn delete(&mut self, word: &[u32], steps: &mut StepCounter) -> Result<bool, SymbolOutOfRange> {
        let root = self.root;
        Ok(self.remove_at(root, word, steps)?.is_some())
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn both() -> [ChildRepr; 2] {
        [ChildRepr::SortedList, ChildRepr::Array]
    }

    #[test]
    fn insert_examples() {
        for repr in both() {
            let mut s = StepCounter::new();
            let mut t: Trie<()> = Trie::new(2, repr);
            assert!(t.insert(&[1, 1, 0], &mut s).unwrap());
            assert_eq!(t.len(), 1);
            assert!(!t.insert(&[1, 1, 0], &mut s).unwrap());
            assert_eq!(t.len(), 1);

            let mut t: Trie<()> = Trie::new(2, repr);
            t.insert(&[1, 0], &mut s).unwrap();
            t.insert(&[1, 1], &mut s).unwrap();
            assert_eq!(t.len(), 2);
            assert_eq!(t.children(t.root()).len(), 1, "shared prefix node");
            assert_eq!(t.node_count(), 4);
        }
    }

    #[test]
    fn search_and_delete() {
        for repr in both() {
            let mut s = StepCounter::new();
            let mut t: Trie<()> = Trie::new(4, repr);
            t.insert(&[3, 1], &mut s).unwrap();
            assert!(t.search(&[3, 1], &mut s).unwrap());
            assert!(!t.search(&[3], &mut s).unwrap());
            assert!(!t.delete(&[2], &mut s).unwrap());
            assert_eq!(t.len(), 1);
            assert!(t.delete(&[3, 1], &mut s).unwrap());
            assert_eq!(t.node_count(), 1, "inner nodes pruned");
            assert!(t.insert(&[4], &mut s).is_err());
            assert!(t.search(&[9], &mut s).is_err());
        }
    }

    #[test]
    fn differential_against_reference_set() {
        for repr in both() {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let mut s = StepCounter::new();
            let mut t: Trie<()> = Trie::new(6, repr);
            let mut reference = BTreeSet::new();
            for i in 0..10_000 {
                let len = rng.gen_range(0..5);
                let w: Vec<u32> = (0..len).map(|_| rng.gen_range(0..6)).collect();
                match rng.gen_range(0..3) {
                    0 => assert_eq!(t.insert(&w, &mut s).unwrap(), reference.insert(w.clone())),
                    1 => assert_eq!(t.search(&w, &mut s).unwrap(), reference.contains(&w)),
                    _ => assert_eq!(t.delete(&w, &mut s).unwrap(), reference.remove(&w)),
                }
                assert_eq!(t.len(), reference.len());
                if i % 1000 == 0 && repr == ChildRepr::Array {
                    t.scramble_slots(i as u64 + 1);
                }
            }
            assert_eq!(t.words(t.root()), reference.into_iter().collect::<Vec<_>>());
        }
    }

    #[test]
    fn array_ops_visit_linear_nodes() {
        let mut t: Trie<()> = Trie::new(200, ChildRepr::Array);
        let mut s = StepCounter::new();
        for i in 0..150u32 {
            t.insert(&[i, i + 1, i + 2], &mut s).unwrap();
        }
        for w in [[5u32, 6, 7], [100, 101, 102], [199, 0, 1]] {
            let mut c = StepCounter::new();
            t.insert(&w, &mut c).unwrap();
            assert!(c.get() <= 4 * w.len() as u64 + 4, "insert cost {}", c.get());
            let mut c = StepCounter::new();
            t.search(&w, &mut c).unwrap();
            assert!(c.get() <= 4 * w.len() as u64 + 4, "search cost {}", c.get());
        }
    }

    #[test]
    fn detach_and_attach_restore_counts() {
        let mut s = StepCounter::new();
        let mut t: Trie<()> = Trie::new(4, ChildRepr::Array).with_min_depth();
        t.insert(&[0, 1], &mut s).unwrap();
        t.insert(&[0, 2, 3], &mut s).unwrap();
        t.insert(&[1, 2], &mut s).unwrap();
        let root = t.root();
        assert_eq!(t.min_depth(root), Some(2));
        let sub = t.detach(root, 0, &mut s).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.count(sub), 2);
        t.attach(root, 0, sub, &mut s);
        assert_eq!(t.len(), 3);
        assert_eq!(t.words(root), vec![vec![0, 1], vec![0, 2, 3], vec![1, 2]]);
        t.insert(&[3], &mut s).unwrap();
        assert_eq!(t.min_depth(root), Some(1));
        t.delete(&[3], &mut s).unwrap();
        assert_eq!(t.min_depth(root), Some(2));
    }

    #[test]
    fn min_word_is_leftmost() {
        for repr in both() {
            let mut s = StepCounter::new();
            let mut t: Trie<()> = Trie::new(2, repr);
            for w in [[1, 1], [0, 1], [1, 0]] {
                t.insert(&w, &mut s).unwrap();
            }
            assert_eq!(t.min_word(t.root(), &mut s).unwrap().0, vec![0, 1]);
        }
    }
}
