//! Brute-force oracles shared by the integration tests. They work on raw
//! bit masks and `(a + i x) mod n` arithmetic only, independent of the
//! library's counting, moment and solver code.

#![allow(dead_code)]

use num_rational::Ratio;

pub fn ap(n: usize, k: usize, a: usize, x: usize) -> Vec<usize> {
    (0..k).map(|i| (a + i * x) % n).collect()
}

pub fn all_aps(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..n)
        .flat_map(|a| (0..n).map(move |x| ap(n, k, a, x)))
        .collect()
}

pub fn bit(mask: u64, v: usize) -> bool {
    (mask >> v) & 1 == 1
}

pub fn monochromatic(mask: u64, edge: &[usize]) -> bool {
    edge.iter().all(|&v| bit(mask, v) == bit(mask, edge[0]))
}

/// NAE clause `(edge, signs)` under assignment `mask`.
pub fn clause_nae(mask: u64, edge: &[usize], signs: u32) -> bool {
    let lit = |i: usize| bit(mask, edge[i]) != ((signs >> i) & 1 == 1);
    (1..edge.len()).any(|i| lit(i) != lit(0))
}

/// All `2^k n^2` clauses.
pub fn all_clauses(n: usize, k: usize) -> Vec<(Vec<usize>, u32)> {
    all_aps(n, k)
        .into_iter()
        .flat_map(|e| (0..1u32 << k).map(move |s| (e.clone(), s)))
        .collect()
}

/// Exact probability that both assignments NAE-satisfy a uniform clause.
pub fn pair_clause_prob(n: usize, k: usize, s: u64, t: u64) -> Ratio<u64> {
    let clauses = all_clauses(n, k);
    let good = clauses
        .iter()
        .filter(|(e, sg)| clause_nae(s, e, *sg) && clause_nae(t, e, *sg))
        .count();
    Ratio::new(good as u64, clauses.len() as u64)
}

/// Exact probability that both colorings make a uniform AP edge bichromatic.
pub fn pair_edge_prob(n: usize, k: usize, s: u64, t: u64) -> Ratio<u64> {
    let edges = all_aps(n, k);
    let good = edges
        .iter()
        .filter(|e| !monochromatic(s, e) && !monochromatic(t, e))
        .count();
    Ratio::new(good as u64, edges.len() as u64)
}

/// `E[X^2] = sum over ordered pairs of P(both solutions of one item)^m`,
/// computed as an f64 sum of exact per-pair rationals.
pub fn brute_second_moment(n: usize, m: i32, pair: impl Fn(u64, u64) -> Ratio<u64>) -> f64 {
    let mut total = 0.0;
    for s in 0..1u64 << n {
        for t in 0..1u64 << n {
            let p = pair(s, t);
            total += (*p.numer() as f64 / *p.denom() as f64).powi(m);
        }
    }
    total
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
