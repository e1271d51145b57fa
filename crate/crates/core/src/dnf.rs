//! Formulas, assignments and the brute-force model oracle.
//!
//! Variables are numbered `1..=n`. A literal is stored as a single code so
//! that the natural integer order on codes is the literal order used by the
//! term tries: `¬x1 < x1 < ¬x2 < x2 < ...`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

/// Largest variable count accepted by [`brute_force_models`].
pub const ORACLE_MAX_VARS: usize = 24;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    /// Literal on variable `var` (1-based), positive when `positive` is set.
    pub fn new(var: usize, positive: bool) -> Lit {
        debug_assert!(var >= 1);
        Lit(2 * (var as u32 - 1) + positive as u32)
    }

    pub fn from_code(code: u32) -> Lit {
        Lit(code)
    }

    /// Parses the signed integer convention of `.dnf` files.
    pub fn from_dimacs(x: i64) -> Lit {
        Lit::new(x.unsigned_abs() as usize, x > 0)
    }

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn var(self) -> usize {
        (self.0 / 2) as usize + 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn negate(self) -> Lit {
        Lit(self.0 ^ 1)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var() as i64;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    /// Value this literal takes under a variable value.
    pub fn eval(self, value: bool) -> bool {
        value == self.is_positive()
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A conjunction of literals over pairwise distinct variables, kept sorted
/// in literal order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Term(Vec<Lit>);

impl Term {
    /// Builds a term, sorting and deduplicating the literals.
    ///
    /// Returns the offending variable if both polarities occur.
    pub fn new(mut lits: Vec<Lit>) -> Result<Term, usize> {
        lits.sort_unstable();
        lits.dedup();
        for w in lits.windows(2) {
            if w[0].var() == w[1].var() {
                return Err(w[0].var());
            }
        }
        Ok(Term(lits))
    }

    pub fn from_dimacs(lits: &[i64]) -> Result<Term, usize> {
        Term::new(lits.iter().map(|&x| Lit::from_dimacs(x)).collect())
    }

    pub(crate) fn from_sorted_unchecked(lits: Vec<Lit>) -> Term {
        debug_assert!(lits.windows(2).all(|w| w[0].var() < w[1].var()));
        Term(lits)
    }

    pub fn empty() -> Term {
        Term(Vec::new())
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|l| l.var())
    }

    pub fn satisfied_by(&self, bits: &[bool]) -> bool {
        self.0.iter().all(|l| l.eval(bits[l.var() - 1]))
    }

    /// The unique assignment of `var(T)` satisfying the term.
    pub fn one_assignment(&self) -> PartialAssignment {
        PartialAssignment::from_pairs(self.0.iter().map(|l| (l.var(), l.is_positive())))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("variable {var} out of range 1..={n}")]
    VarOutOfRange { var: usize, n: usize },
    #[error("term contains both x{0} and its negation")]
    Contradictory(usize),
    #[error("variable count must be positive")]
    NoVariables,
}

/// A DNF formula: a set of terms over `n` variables.
///
/// Terms keep their first-occurrence input order; duplicates are dropped.
#[derive(Clone, PartialEq, Eq)]
pub struct Dnf {
    n: usize,
    terms: Vec<Term>,
}

impl Dnf {
    pub fn new(n: usize, terms: impl IntoIterator<Item = Term>) -> Result<Dnf, FormulaError> {
        if n == 0 {
            return Err(FormulaError::NoVariables);
        }
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        for t in terms {
            if let Some(l) = t.lits().iter().find(|l| l.var() > n) {
                return Err(FormulaError::VarOutOfRange { var: l.var(), n });
            }
            if seen.insert(t.clone()) {
                kept.push(t);
            }
        }
        Ok(Dnf { n, terms: kept })
    }

    /// Convenience constructor from signed-integer literal lists.
    pub fn from_dimacs(n: usize, terms: &[&[i64]]) -> Result<Dnf, FormulaError> {
        let mut ts = Vec::with_capacity(terms.len());
        for t in terms {
            ts.push(Term::from_dimacs(t).map_err(FormulaError::Contradictory)?);
        }
        Dnf::new(n, ts)
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// `‖D‖`, the total number of literal occurrences.
    pub fn size(&self) -> usize {
        self.terms.iter().map(Term::len).sum()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Terms in canonical (trie) order.
    pub fn sorted_terms(&self) -> Vec<Term> {
        let mut ts = self.terms.clone();
        ts.sort();
        ts
    }

    pub fn max_width(&self) -> usize {
        self.terms.iter().map(Term::len).max().unwrap_or(0)
    }

    pub fn has_empty_term(&self) -> bool {
        self.terms.iter().any(Term::is_empty)
    }

    pub fn is_monotone(&self) -> bool {
        self.terms.iter().all(|t| t.lits().iter().all(|l| l.is_positive()))
    }

    pub fn eval(&self, a: &Assignment) -> bool {
        assert_eq!(a.len(), self.n, "assignment length must equal n");
        self.terms.iter().any(|t| t.satisfied_by(a.bits()))
    }

    /// `D[τ]`: drops terms falsified by `tau` and strips assigned variables.
    pub fn restrict(&self, tau: &PartialAssignment) -> Dnf {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        'terms: for t in &self.terms {
            let mut lits = Vec::with_capacity(t.len());
            for &l in t.lits() {
                match tau.get(l.var()) {
                    Some(v) if !l.eval(v) => continue 'terms,
                    Some(_) => {}
                    None => lits.push(l),
                }
            }
            let t = Term(lits);
            if seen.insert(t.clone()) {
                out.push(t);
            }
        }
        Dnf { n: self.n, terms: out }
    }

    /// Models compatible with `tau`, computed through the oracle.
    pub fn models_compatible(&self, tau: &PartialAssignment) -> Vec<Assignment> {
        brute_force_models(self)
            .expect("oracle size")
            .into_iter()
            .filter(|a| tau.is_compatible(a))
            .collect()
    }
}

impl fmt::Debug for Dnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dnf(n={}, {:?})", self.n, self.terms)
    }
}

/// Canonical `.dnf` serialization: header, then terms in canonical order.
impl fmt::Display for Dnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p dnf {} {}", self.n, self.terms.len())?;
        for t in self.sorted_terms() {
            for l in t.lits() {
                write!(f, "{} ", l.to_dimacs())?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

/// A full assignment; position `i` holds the value of `x_{i+1}`.
///
/// The derived order is the lexicographic order with `0 < 1` and `x1` most
/// significant.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Assignment {
        Assignment(bits)
    }

    pub fn from_slice(bits: &[bool]) -> Assignment {
        Assignment(bits.to_vec())
    }

    /// Parses a string of `0`/`1` characters, `x1` first.
    pub fn parse(s: &str) -> Option<Assignment> {
        s.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Assignment)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, var: usize) -> bool {
        self.0[var - 1]
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// An assignment of a subset of the variables.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialAssignment(BTreeMap<usize, bool>);

impl PartialAssignment {
    pub fn new() -> PartialAssignment {
        PartialAssignment::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, bool)>) -> PartialAssignment {
        PartialAssignment(pairs.into_iter().collect())
    }

    pub fn set(&mut self, var: usize, value: bool) {
        self.0.insert(var, value);
    }

    pub fn get(&self, var: usize) -> Option<bool> {
        self.0.get(&var).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.0.iter().map(|(&v, &b)| (v, b))
    }

    /// `σ ≃ τ`: the full assignment agrees with this one on its domain.
    pub fn is_compatible(&self, a: &Assignment) -> bool {
        self.0.iter().all(|(&v, &b)| a.get(v) == b)
    }

    /// Union of two assignments with disjoint domains.
    pub fn union(&self, other: &PartialAssignment) -> PartialAssignment {
        let mut out = self.clone();
        for (v, b) in other.iter() {
            debug_assert!(self.get(v).is_none());
            out.set(v, b);
        }
        out
    }
}

impl fmt::Debug for PartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.0.iter().map(|(v, b)| (format!("x{v}"), *b as u8)))
            .finish()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("brute-force oracle refuses n = {0} (limit {ORACLE_MAX_VARS})")]
pub struct OracleTooLarge(pub usize);

/// Term as (care mask, value mask) with `x1` at the most significant bit.
fn term_masks(t: &Term, n: usize) -> (u32, u32) {
    let mut care = 0u32;
    let mut val = 0u32;
    for l in t.lits() {
        let bit = 1u32 << (n - l.var());
        care |= bit;
        if l.is_positive() {
            val |= bit;
        }
    }
    (care, val)
}

fn code_to_assignment(code: u32, n: usize) -> Assignment {
    Assignment((1..=n).map(|i| (code >> (n - i)) & 1 == 1).collect())
}

/// Every model of `d`, by exhaustive scan, in lexicographic order.
pub fn brute_force_models(d: &Dnf) -> Result<Vec<Assignment>, OracleTooLarge> {
    let n = d.num_vars();
    if n > ORACLE_MAX_VARS {
        return Err(OracleTooLarge(n));
    }
    let masks: Vec<_> = d.terms().iter().map(|t| term_masks(t, n)).collect();
    Ok((0..1u32 << n)
        .filter(|&c| masks.iter().any(|&(care, val)| c & care == val))
        .map(|c| code_to_assignment(c, n))
        .collect())
}

/// Number of models of `d`, by exhaustive scan.
pub fn brute_force_count(d: &Dnf) -> Result<u64, OracleTooLarge> {
    let n = d.num_vars();
    if n > ORACLE_MAX_VARS {
        return Err(OracleTooLarge(n));
    }
    let masks: Vec<_> = d.terms().iter().map(|t| term_masks(t, n)).collect();
    Ok((0..1u32 << n)
        .filter(|&c| masks.iter().any(|&(care, val)| c & care == val))
        .count() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> Assignment {
        Assignment::parse(s).unwrap()
    }

    fn example() -> Dnf {
        Dnf::from_dimacs(3, &[&[1, 2], &[-3]]).unwrap()
    }

    #[test]
    fn literal_order_interleaves_polarities() {
        let mut lits = [Lit::new(2, true), Lit::new(1, true), Lit::new(2, false), Lit::new(1, false)];
        lits.sort();
        assert_eq!(lits.iter().map(|l| l.to_dimacs()).collect::<Vec<_>>(), vec![-1, 1, -2, 2]);
    }

    #[test]
    fn eval_examples() {
        let d = example();
        assert!(d.eval(&a("110")));
        assert!(!d.eval(&a("001")));
        let empty = Dnf::new(3, []).unwrap();
        assert!(!empty.eval(&a("101")));
    }

    #[test]
    fn restrict_examples() {
        let d = Dnf::from_dimacs(3, &[&[1, 2, -3]]).unwrap();
        let r = d.restrict(&PartialAssignment::from_pairs([(1, true)]));
        assert_eq!(r, Dnf::from_dimacs(3, &[&[2, -3]]).unwrap());

        let r = example().restrict(&PartialAssignment::from_pairs([(3, true)]));
        assert_eq!(r, Dnf::from_dimacs(3, &[&[1, 2]]).unwrap());

        let d = Dnf::from_dimacs(2, &[&[1], &[1, 2]]).unwrap();
        let r = d.restrict(&PartialAssignment::from_pairs([(1, true)]));
        assert_eq!(r.terms(), &[Term::empty(), Term::from_dimacs(&[2]).unwrap()]);
        assert!(r.has_empty_term());
        // x1 is assigned, so the tautology on x2 gives 4 models over 2 variables.
        assert_eq!(brute_force_count(&r).unwrap(), 4);
    }

    #[test]
    fn oracle_examples() {
        let models = brute_force_models(&example()).unwrap();
        let got: Vec<String> = models.iter().map(|m| m.to_string()).collect();
        assert_eq!(got, vec!["000", "010", "100", "110", "111"]);

        let mut all = Vec::new();
        for a in [-1i64, 0, 1] {
            for b in [-2i64, 0, 2] {
                let t: Vec<i64> = [a, b].into_iter().filter(|&x| x != 0).collect();
                if !t.is_empty() {
                    all.push(Term::from_dimacs(&t).unwrap());
                }
            }
        }
        let d = Dnf::new(2, all).unwrap();
        assert_eq!(d.num_terms(), 8);
        assert_eq!(brute_force_count(&d).unwrap(), 4);

        assert!(brute_force_models(&Dnf::new(3, []).unwrap()).unwrap().is_empty());
        assert_eq!(brute_force_models(&Dnf::new(25, []).unwrap()), Err(OracleTooLarge(25)));
    }

    #[test]
    fn contradictory_term_rejected() {
        assert_eq!(Term::from_dimacs(&[1, -1]), Err(1));
        assert_eq!(
            Dnf::from_dimacs(2, &[&[3]]),
            Err(FormulaError::VarOutOfRange { var: 3, n: 2 })
        );
    }

    #[test]
    fn duplicate_terms_keep_first_occurrence_order() {
        let d = Dnf::from_dimacs(3, &[&[-3], &[2, 1], &[1, 2]]).unwrap();
        assert_eq!(d.num_terms(), 2);
        assert_eq!(d.terms()[0], Term::from_dimacs(&[-3]).unwrap());
        assert_eq!(d.size(), 3);
    }
}
