//! Seeded random instances.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dnf::{Dnf, Lit, Term};
use crate::setunion::SetFamily;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    /// Width uniform in `1..=k`, then a uniform term of that width.
    Random,
    /// Positive terms, width uniform in `1..=k`.
    Monotone,
    /// Uniform over all terms of width `1..=k`.
    Kdnf,
    /// Every non-empty term over `n` variables (`m` and `k` ignored).
    AllTerms,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("cannot draw {m} distinct items, only {max} exist")]
    Infeasible { m: usize, max: u128 },
    #[error("{0}")]
    BadParams(String),
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// Number of distinct terms of width `w` (signed unless `monotone`).
fn width_count(n: usize, w: usize, monotone: bool) -> u128 {
    binom(n, w) << if monotone { 0 } else { w }
}

fn random_term(rng: &mut ChaCha8Rng, n: usize, w: usize, monotone: bool) -> Term {
    let mut lits: Vec<Lit> = sample(rng, n, w)
        .into_iter()
        .map(|i| Lit::new(i + 1, monotone || rng.gen_bool(0.5)))
        .collect();
    lits.sort();
    Term::new(lits).expect("distinct variables")
}

/// All terms with widths in `1..=k`, canonical order.
fn all_terms_up_to(n: usize, k: usize, monotone: bool) -> Vec<Term> {
    fn extend(v: usize, n: usize, k: usize, monotone: bool, lits: &mut Vec<Lit>, out: &mut Vec<Term>) {
        if !lits.is_empty() {
            out.push(Term::new(lits.clone()).expect("one sign per variable"));
        }
        if lits.len() == k {
            return;
        }
        let signs: &[bool] = if monotone { &[true] } else { &[false, true] };
        for u in v..=n {
            for &sign in signs {
                lits.push(Lit::new(u, sign));
                extend(u + 1, n, k, monotone, lits, out);
                lits.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(1, n, k, monotone, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Every non-empty term over `n ≤ 15` variables: `3^n - 1` terms, `2^n` models.
pub fn all_terms(n: usize) -> Result<Dnf, GenError> {
    if n == 0 || n > 15 {
        return Err(GenError::BadParams(format!("all-terms needs 1 <= n <= 15, got {n}")));
    }
    Ok(Dnf::new(n, all_terms_up_to(n, n, false)).expect("valid terms"))
}

pub fn generate_dnf(kind: GenKind, n: usize, m: usize, k: usize, seed: u64) -> Result<Dnf, GenError> {
    if kind == GenKind::AllTerms {
        return all_terms(n);
    }
    if n == 0 {
        return Err(GenError::BadParams("n must be positive".into()));
    }
    if k == 0 || k > n {
        return Err(GenError::BadParams(format!("width bound k must lie in 1..={n}, got {k}")));
    }
    let monotone = kind == GenKind::Monotone;
    let max: u128 = (1..=k).map(|w| width_count(n, w, monotone)).sum();
    if m as u128 > max {
        return Err(GenError::Infeasible { m, max });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Dense requests: pick from the explicit list instead of rejecting.
    if 2 * m as u128 > max && max <= 1 << 20 {
        let mut pool = all_terms_up_to(n, k, monotone);
        let chosen: Vec<Term> = match kind {
            GenKind::Kdnf => sample(&mut rng, pool.len(), m).into_iter().map(|i| pool[i].clone()).collect(),
            _ => {
                let mut out = Vec::with_capacity(m);
                let mut by_width: Vec<Vec<Term>> = vec![Vec::new(); k + 1];
                for t in pool.drain(..) {
                    by_width[t.len()].push(t);
                }
                while out.len() < m {
                    let w = rng.gen_range(1..=k);
                    let bucket = &mut by_width[w];
                    if bucket.is_empty() {
                        continue;
                    }
                    let i = rng.gen_range(0..bucket.len());
                    out.push(bucket.swap_remove(i));
                }
                out
            }
        };
        return Ok(Dnf::new(n, chosen).expect("valid terms"));
    }
    let weights: Vec<u128> = (1..=k).map(|w| width_count(n, w, monotone)).collect();
    let mut seen = HashSet::with_capacity(m);
    let mut terms = Vec::with_capacity(m);
    let mut per_width = vec![0u128; k + 1];
    while terms.len() < m {
        let w = match kind {
            GenKind::Kdnf => {
                let mut r = rng.gen_range(0..max);
                let mut w = 1;
                for (i, &c) in weights.iter().enumerate() {
                    if r < c {
                        w = i + 1;
                        break;
                    }
                    r -= c;
                }
                w
            }
            _ => rng.gen_range(1..=k),
        };
        if per_width[w] == weights[w - 1] {
            continue;
        }
        let t = random_term(&mut rng, n, w, monotone);
        if seen.insert(t.clone()) {
            per_width[w] += 1;
            terms.push(t);
        }
    }
    Ok(Dnf::new(n, terms).expect("valid terms"))
}

/// `m` distinct non-empty subsets of `1..=n`, each element present with
/// probability 1/2.
pub fn generate_sets(n: usize, m: usize, seed: u64) -> Result<SetFamily, GenError> {
    if n == 0 {
        return Err(GenError::BadParams("n must be positive".into()));
    }
    let max = if n >= 127 { u128::MAX } else { (1u128 << n) - 1 };
    if m as u128 > max {
        return Err(GenError::Infeasible { m, max });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(m);
    let mut sets = Vec::with_capacity(m);
    while sets.len() < m {
        let s: Vec<usize> = (1..=n).filter(|_| rng.gen_bool(0.5)).collect();
        if !s.is_empty() && seen.insert(s.clone()) {
            sets.push(s);
        }
    }
    Ok(SetFamily::new(n, sets).expect("elements in range"))
}
