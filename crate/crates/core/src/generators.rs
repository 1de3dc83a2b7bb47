//! Random AP hypergraphs and random k-AP-NAE-SAT formulas.
//!
//! All samplers draw with replacement from the `n^2` progressions (or the
//! `n(n-1)` non-trivial ones) and are pure functions of their parameters
//! and the [`TrialRng`] stream they are handed.

use serde::{Deserialize, Serialize};

use crate::ap::{enumerate_progressions, PrimeModulus, Progression};
use crate::error::{Error, Result};
use crate::rng::TrialRng;

/// A k-uniform hypergraph whose edges are progressions mod `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApHypergraph {
    pub n: PrimeModulus,
    pub k: usize,
    pub edges: Vec<Progression>,
}

impl ApHypergraph {
    pub fn new(n: PrimeModulus, k: usize, edges: Vec<Progression>) -> Result<Self> {
        n.check_length(k)?;
        for e in &edges {
            check_edge(e, n, k)?;
        }
        Ok(ApHypergraph { n, k, edges })
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// The NAE formula with the same progressions and all-positive literals.
    /// An edge is bichromatic exactly when its clause is NAE-satisfied.
    pub fn to_formula(&self) -> Formula {
        Formula {
            n: self.n,
            k: self.k,
            clauses: self
                .edges
                .iter()
                .map(|&prog| SignedClause { prog, signs: 0 })
                .collect(),
        }
    }
}

/// A clause over the variables of a progression. Bit i of `signs` set means
/// literal i is negated; literal i is true under σ iff `σ(v_i) != sign_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedClause {
    pub prog: Progression,
    pub signs: u32,
}

impl SignedClause {
    #[inline]
    pub fn sign(&self, i: usize) -> bool {
        (self.signs >> i) & 1 == 1
    }
}

/// A k-AP-NAE-SAT instance: a multiset of clauses over `n` variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Formula {
    pub n: PrimeModulus,
    pub k: usize,
    pub clauses: Vec<SignedClause>,
}

impl Formula {
    pub fn new(n: PrimeModulus, k: usize, clauses: Vec<SignedClause>) -> Result<Self> {
        n.check_length(k)?;
        for c in &clauses {
            check_edge(&c.prog, n, k)?;
            if k < 32 && c.signs >> k != 0 {
                return Err(Error::InvalidParameter(format!(
                    "sign mask {:#b} wider than k = {k}",
                    c.signs
                )));
            }
        }
        Ok(Formula { n, k, clauses })
    }

    pub fn empty(n: PrimeModulus, k: usize) -> Result<Self> {
        Formula::new(n, k, Vec::new())
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    /// Clause density `m / n`.
    pub fn density(&self) -> f64 {
        self.m() as f64 / self.n.get() as f64
    }
}

fn check_edge(p: &Progression, n: PrimeModulus, k: usize) -> Result<()> {
    if p.length != k {
        return Err(Error::InvalidParameter(format!(
            "edge length {} differs from k = {k}",
            p.length
        )));
    }
    p.validate(n)
}

/// `m = round(r n)` with halves rounded up.
///
/// A relative slack of 1e-9 absorbs binary representation error, so a grid
/// point such as `r = 1.1` at `n = 5` gives `m = 6`, not 5.
pub fn clause_count(r: f64, n: PrimeModulus) -> Result<usize> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "density r = {r} must be finite and >= 0"
        )));
    }
    let x = r * n.get() as f64;
    Ok((x + 0.5 + 1e-9 * x.max(1.0)).floor() as usize)
}

fn sample_progression(
    n: PrimeModulus,
    k: usize,
    exclude_trivial: bool,
    rng: &mut TrialRng,
) -> Progression {
    let start = rng.residue(n.get());
    let step = if exclude_trivial {
        1 + rng.residue(n.get() - 1)
    } else {
        rng.residue(n.get())
    };
    Progression::new(start, step, k)
}

/// `H_k^AP(n, m)`: `m` edges drawn uniformly with replacement.
pub fn sample_ap_hypergraph_m(
    n: PrimeModulus,
    k: usize,
    m: usize,
    exclude_trivial: bool,
    rng: &mut TrialRng,
) -> Result<ApHypergraph> {
    n.check_length(k)?;
    let edges = (0..m)
        .map(|_| sample_progression(n, k, exclude_trivial, rng))
        .collect();
    Ok(ApHypergraph { n, k, edges })
}

/// `H_k^AP(n, p)`: each candidate progression kept independently with
/// probability `p`, in lexicographic `(a, x)` order.
pub fn sample_ap_hypergraph_p(
    n: PrimeModulus,
    k: usize,
    p: f64,
    exclude_trivial: bool,
    rng: &mut TrialRng,
) -> Result<ApHypergraph> {
    n.check_length(k)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "edge probability p = {p} outside [0, 1]"
        )));
    }
    let edges = enumerate_progressions(n, k, exclude_trivial)
        .filter(|_| rng.bernoulli(p))
        .collect();
    Ok(ApHypergraph { n, k, edges })
}

/// Random k-AP-NAE-SAT formula: each clause is a uniform progression with
/// `k` independent fair sign bits.
pub fn sample_nae_formula(
    n: PrimeModulus,
    k: usize,
    m: usize,
    exclude_trivial: bool,
    rng: &mut TrialRng,
) -> Result<Formula> {
    n.check_length(k)?;
    if k > 32 {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds the 32-literal clause limit"
        )));
    }
    let clauses = (0..m)
        .map(|_| {
            let prog = sample_progression(n, k, exclude_trivial, rng);
            let signs = rng.bits(k);
            SignedClause { prog, signs }
        })
        .collect();
    Ok(Formula { n, k, clauses })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: usize) -> PrimeModulus {
        PrimeModulus::new(v).unwrap()
    }

    #[test]
    fn empty_samples() {
        let mut rng = TrialRng::new(1, 0);
        assert!(sample_ap_hypergraph_m(n(5), 3, 0, false, &mut rng)
            .unwrap()
            .edges
            .is_empty());
        assert!(sample_ap_hypergraph_p(n(5), 3, 0.0, false, &mut rng)
            .unwrap()
            .edges
            .is_empty());
        assert!(sample_nae_formula(n(5), 3, 0, false, &mut rng)
            .unwrap()
            .clauses
            .is_empty());
    }

    #[test]
    fn p_one_takes_every_edge_once() {
        let mut rng = TrialRng::new(1, 0);
        let h = sample_ap_hypergraph_p(n(7), 3, 1.0, false, &mut rng).unwrap();
        let all: Vec<_> = enumerate_progressions(n(7), 3, false).collect();
        assert_eq!(h.edges, all);
        let h = sample_ap_hypergraph_p(n(7), 3, 1.0, true, &mut rng).unwrap();
        assert_eq!(h.m(), 42);
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = TrialRng::new(1, 0);
        let err = sample_ap_hypergraph_p(n(5), 3, 1.5, false, &mut rng).unwrap_err();
        assert_eq!(err.kind(), "invalid-parameter");
        let err = sample_nae_formula(n(5), 5, 3, false, &mut rng).unwrap_err();
        assert_eq!(err.kind(), "invalid-progression");
    }

    #[test]
    fn deterministic_given_seed() {
        let a = sample_nae_formula(n(31), 3, 50, false, &mut TrialRng::new(77, 4)).unwrap();
        let b = sample_nae_formula(n(31), 3, 50, false, &mut TrialRng::new(77, 4)).unwrap();
        assert_eq!(a, b);
        let c = sample_nae_formula(n(31), 3, 50, false, &mut TrialRng::new(78, 4)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn exclude_trivial_never_yields_step_zero() {
        let mut rng = TrialRng::new(3, 0);
        let h = sample_ap_hypergraph_m(n(5), 3, 10_000, true, &mut rng).unwrap();
        assert!(h.edges.iter().all(|e| e.step != 0));
        assert!(h.edges.iter().any(|e| e.step == 4));
    }

    #[test]
    fn clause_count_rounding() {
        assert_eq!(clause_count(0.5, n(5)).unwrap(), 3); // 2.5 rounds up
        assert_eq!(clause_count(1.1, n(5)).unwrap(), 6);
        assert_eq!(clause_count(1.2, n(53)).unwrap(), 64);
        assert_eq!(clause_count(1.5, n(53)).unwrap(), 80);
        assert_eq!(clause_count(2.0, n(101)).unwrap(), 202);
        assert!(clause_count(-1.0, n(5)).is_err());
    }

    #[test]
    fn hypergraph_reduces_to_all_positive_formula() {
        let h = ApHypergraph::new(
            n(5),
            3,
            vec![Progression::new(0, 1, 3), Progression::new(2, 0, 3)],
        )
        .unwrap();
        let f = h.to_formula();
        assert_eq!(f.m(), 2);
        assert!(f.clauses.iter().all(|c| c.signs == 0));
    }
}
