//! NAE-SAT evaluation, exhaustive solution counting, and a DPLL-style
//! decision procedure. Hypergraph 2-coloring goes through the all-positive
//! NAE reduction.

use rayon::prelude::*;
use serde::Serialize;

use crate::ap::Coloring;
use crate::error::{Error, Result};
use crate::generators::{ApHypergraph, Formula, SignedClause};

/// Default upper bound on `n` for 2^n enumeration.
pub const EXHAUSTIVE_LIMIT: usize = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    #[serde(rename = "SAT")]
    Sat,
    #[serde(rename = "UNSAT")]
    Unsat,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub status: Status,
    pub witness: Option<Coloring>,
    /// Number of solutions; only set by exhaustive counting.
    pub count: Option<u64>,
    pub nodes_explored: u64,
    pub budget_exhausted: bool,
}

/// Literal i of `c` under `s`: true iff `s(v_i) != sign_i`.
#[inline]
fn literal(c: &SignedClause, i: usize, s: &Coloring, f: &Formula) -> bool {
    s.get(c.prog.vertex(i, f.n)) != c.sign(i)
}

/// True iff every clause has both a true and a false literal under `s`.
pub fn nae_evaluate(f: &Formula, s: &Coloring) -> bool {
    assert_eq!(s.len(), f.n.get(), "assignment length must equal n");
    f.clauses.iter().all(|c| {
        let first = literal(c, 0, s, f);
        (1..f.k).any(|i| literal(c, i, s, f) != first)
    })
}

/// True iff every edge has vertices of both colors under `s`.
pub fn is_proper_2coloring(h: &ApHypergraph, s: &Coloring) -> bool {
    nae_evaluate(&h.to_formula(), s)
}

/// A clause after merging repeated variables.
enum Normalized {
    /// Contains `v` and `!v`: satisfied by every assignment.
    AlwaysSat,
    /// A single distinct literal: its values can never differ.
    AlwaysViolated,
    Lits(Vec<(usize, bool)>),
}

fn normalize(c: &SignedClause, f: &Formula) -> Normalized {
    let mut lits: Vec<(usize, bool)> = Vec::with_capacity(f.k);
    for i in 0..f.k {
        let lit = (c.prog.vertex(i, f.n), c.sign(i));
        match lits.iter().find(|(v, _)| *v == lit.0) {
            Some(&(_, sign)) if sign != lit.1 => return Normalized::AlwaysSat,
            Some(_) => {}
            None => lits.push(lit),
        }
    }
    if lits.len() == 1 {
        Normalized::AlwaysViolated
    } else {
        Normalized::Lits(lits)
    }
}

/// Lane patterns: bit j of `LANES[v]` is bit v of j.
const LANES: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Counts NAE-satisfying assignments by enumerating all `2^n` of them.
pub fn count_nae_exhaustive(f: &Formula) -> Result<SolveResult> {
    count_nae_exhaustive_with_limit(f, EXHAUSTIVE_LIMIT)
}

/// As [`count_nae_exhaustive`] with a caller-chosen bound on `n` (at most 40).
///
/// Assignments are evaluated 64 at a time: the lowest six variables vary
/// across the bit lanes of a word, the rest are fixed per word. A clause is
/// violated in a lane iff the AND or the NOR of its literal words is set.
pub fn count_nae_exhaustive_with_limit(f: &Formula, limit: usize) -> Result<SolveResult> {
    let n = f.n.get();
    if n > limit.min(40) {
        return Err(Error::TooLarge {
            n,
            limit: limit.min(40),
        });
    }
    let mut clauses = Vec::with_capacity(f.m());
    for c in &f.clauses {
        match normalize(c, f) {
            Normalized::AlwaysSat => {}
            Normalized::AlwaysViolated => {
                return Ok(SolveResult {
                    status: Status::Unsat,
                    witness: None,
                    count: Some(0),
                    nodes_explored: 0,
                    budget_exhausted: false,
                })
            }
            Normalized::Lits(l) => clauses.push(l),
        }
    }

    let low = n.min(6);
    let lane_mask = if low == 6 {
        u64::MAX
    } else {
        (1u64 << (1 << low)) - 1
    };
    let high_vars = n - low;
    let words = 1u64 << high_vars;

    let eval = |h: u64| -> u64 {
        let var_word = |v: usize| -> u64 {
            if v < low {
                LANES[v]
            } else if (h >> (v - low)) & 1 == 1 {
                u64::MAX
            } else {
                0
            }
        };
        let mut sat = lane_mask;
        for lits in &clauses {
            let (mut all, mut any) = (u64::MAX, 0u64);
            for &(v, sign) in lits {
                let w = var_word(v) ^ if sign { u64::MAX } else { 0 };
                all &= w;
                any |= w;
            }
            sat &= any & !all;
            if sat == 0 {
                break;
            }
        }
        sat
    };

    const CHUNK: u64 = 1 << 10;
    let chunks = words.div_ceil(CHUNK);
    let per_chunk = |chunk: u64| -> (u64, Option<u64>) {
        let mut count = 0u64;
        let mut first = None;
        for h in chunk * CHUNK..((chunk + 1) * CHUNK).min(words) {
            let sat = eval(h);
            if sat != 0 {
                count += u64::from(sat.count_ones());
                first.get_or_insert((h << low) | u64::from(sat.trailing_zeros()));
            }
        }
        (count, first)
    };
    let (count, first) = if chunks > 1 {
        (0..chunks)
            .into_par_iter()
            .map(per_chunk)
            .reduce(|| (0, None), |a, b| (a.0 + b.0, a.1.or(b.1)))
    } else {
        per_chunk(0)
    };

    let witness = first.map(|mask| Coloring::from_mask(mask, n));
    if let Some(w) = &witness {
        assert!(nae_evaluate(f, w), "exhaustive witness failed verification");
    }
    Ok(SolveResult {
        status: if count > 0 {
            Status::Sat
        } else {
            Status::Unsat
        },
        witness,
        count: Some(count),
        nodes_explored: 0,
        budget_exhausted: false,
    })
}

/// Counts proper 2-colorings of `h` exhaustively.
pub fn count_2col_exhaustive(h: &ApHypergraph) -> Result<SolveResult> {
    count_nae_exhaustive(&h.to_formula())
}

const UNASSIGNED: u8 = 2;

struct Search {
    clauses: Vec<Vec<(usize, bool)>>,
    occurs: Vec<Vec<usize>>,
    value: Vec<u8>,
    trail: Vec<usize>,
    queue_head: usize,
}

impl Search {
    fn assign(&mut self, v: usize, b: bool) {
        debug_assert_eq!(self.value[v], UNASSIGNED);
        self.value[v] = u8::from(b);
        self.trail.push(v);
    }

    fn undo_to(&mut self, len: usize) {
        for v in self.trail.drain(len..) {
            self.value[v] = UNASSIGNED;
        }
        self.queue_head = len;
    }

    /// Returns false on conflict. A clause whose assigned literals are all
    /// equal with exactly one literal left forces that literal to differ.
    fn propagate(&mut self) -> bool {
        while self.queue_head < self.trail.len() {
            let v = self.trail[self.queue_head];
            self.queue_head += 1;
            for ci in 0..self.occurs[v].len() {
                let c = self.occurs[v][ci];
                let (mut seen_true, mut seen_false) = (false, false);
                let mut open = None;
                let mut open_count = 0;
                for &(u, sign) in &self.clauses[c] {
                    match self.value[u] {
                        UNASSIGNED => {
                            open_count += 1;
                            open = Some((u, sign));
                        }
                        val => {
                            if (val == 1) != sign {
                                seen_true = true;
                            } else {
                                seen_false = true;
                            }
                        }
                    }
                }
                if seen_true && seen_false {
                    continue;
                }
                match (open_count, open) {
                    (0, _) => return false,
                    (1, Some((u, sign))) => {
                        // literal must take the value opposite to the others
                        let lit = !seen_true;
                        self.assign(u, lit != sign);
                    }
                    _ => {}
                }
            }
        }
        true
    }
}

/// Decides NAE-satisfiability by chronological backtracking with NAE unit
/// propagation. Branches on the lowest unassigned variable, false first;
/// the root's true branch is skipped because it mirrors the false one.
///
/// `nodes_explored` counts decision assignments (both branches of a
/// variable count). The search stops with `Unknown` once it reaches
/// `node_budget`.
pub fn decide_nae(f: &Formula, node_budget: u64) -> SolveResult {
    let n = f.n.get();
    let mut clauses = Vec::with_capacity(f.m());
    for c in &f.clauses {
        match normalize(c, f) {
            Normalized::AlwaysSat => {}
            Normalized::AlwaysViolated => {
                return SolveResult {
                    status: Status::Unsat,
                    witness: None,
                    count: None,
                    nodes_explored: 0,
                    budget_exhausted: false,
                }
            }
            Normalized::Lits(l) => clauses.push(l),
        }
    }
    let mut occurs = vec![Vec::new(); n];
    for (ci, lits) in clauses.iter().enumerate() {
        for &(v, _) in lits {
            occurs[v].push(ci);
        }
    }
    let mut s = Search {
        clauses,
        occurs,
        value: vec![UNASSIGNED; n],
        trail: Vec::with_capacity(n),
        queue_head: 0,
    };

    // (trail length before the decision, variable, second branch taken)
    let mut decisions: Vec<(usize, usize, bool)> = Vec::new();
    let mut nodes = 0u64;
    let unknown = |nodes| SolveResult {
        status: Status::Unknown,
        witness: None,
        count: None,
        nodes_explored: nodes,
        budget_exhausted: true,
    };

    loop {
        if !s.propagate() {
            loop {
                let Some((len, v, flipped)) = decisions.pop() else {
                    return SolveResult {
                        status: Status::Unsat,
                        witness: None,
                        count: None,
                        nodes_explored: nodes,
                        budget_exhausted: false,
                    };
                };
                s.undo_to(len);
                // NAE is invariant under complementing every variable, so a
                // refuted root branch (x_0 = false on an empty trail)
                // refutes x_0 = true as well.
                if !flipped && len == 0 {
                    return SolveResult {
                        status: Status::Unsat,
                        witness: None,
                        count: None,
                        nodes_explored: nodes,
                        budget_exhausted: false,
                    };
                }
                if !flipped {
                    if nodes >= node_budget {
                        return unknown(nodes);
                    }
                    nodes += 1;
                    decisions.push((len, v, true));
                    s.assign(v, true);
                    break;
                }
            }
            continue;
        }
        let Some(v) = s.value.iter().position(|&x| x == UNASSIGNED) else {
            let witness = Coloring::from_fn(n, |i| s.value[i] == 1);
            assert!(
                nae_evaluate(f, &witness),
                "search witness failed verification"
            );
            return SolveResult {
                status: Status::Sat,
                witness: Some(witness),
                count: None,
                nodes_explored: nodes,
                budget_exhausted: false,
            };
        };
        if nodes >= node_budget {
            return unknown(nodes);
        }
        nodes += 1;
        decisions.push((s.trail.len(), v, false));
        s.assign(v, false);
    }
}

/// 2-colorability via [`decide_nae`] on the all-positive formula.
pub fn decide_2col(h: &ApHypergraph, node_budget: u64) -> SolveResult {
    decide_nae(&h.to_formula(), node_budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ap::{PrimeModulus, Progression};
    use crate::generators::sample_nae_formula;
    use crate::rng::TrialRng;

    fn n(v: usize) -> PrimeModulus {
        PrimeModulus::new(v).unwrap()
    }

    fn clause(a: usize, x: usize, signs: u32) -> SignedClause {
        SignedClause {
            prog: Progression::new(a, x, 3),
            signs,
        }
    }

    fn naive_count(f: &Formula) -> u64 {
        (0..1u64 << f.n.get())
            .filter(|&m| nae_evaluate(f, &Coloring::from_mask(m, f.n.get())))
            .count() as u64
    }

    #[test]
    fn evaluate_examples() {
        let f = Formula::new(n(5), 3, vec![clause(0, 1, 0)]).unwrap();
        assert!(!nae_evaluate(&f, &Coloring::ones(5)));
        let f = Formula::new(n(5), 3, vec![clause(2, 0, 0b100)]).unwrap();
        for m in 0..32 {
            assert!(nae_evaluate(&f, &Coloring::from_mask(m, 5)));
        }
        let empty = Formula::empty(n(5), 3).unwrap();
        assert!(nae_evaluate(&empty, &Coloring::zeros(5)));
    }

    #[test]
    fn exhaustive_examples() {
        let empty = Formula::empty(n(5), 3).unwrap();
        assert_eq!(count_nae_exhaustive(&empty).unwrap().count, Some(32));
        let one = Formula::new(n(5), 3, vec![clause(0, 1, 0)]).unwrap();
        let res = count_nae_exhaustive(&one).unwrap();
        assert_eq!(res.count, Some(24));
        assert_eq!(res.status, Status::Sat);
        let trivial_bad = Formula::new(n(5), 3, vec![clause(1, 0, 0b111)]).unwrap();
        assert_eq!(
            count_nae_exhaustive(&trivial_bad).unwrap().status,
            Status::Unsat
        );
        let big = Formula::empty(n(29), 3).unwrap();
        assert_eq!(count_nae_exhaustive(&big).unwrap_err().kind(), "too-large");
    }

    #[test]
    fn bitsliced_count_matches_naive_evaluation() {
        for (nv, seed) in [(5, 1), (7, 2), (11, 3), (13, 4)] {
            for m in [1, 3, 8, 20] {
                let f = sample_nae_formula(n(nv), 3, m, false, &mut TrialRng::new(seed, m as u64))
                    .unwrap();
                assert_eq!(
                    count_nae_exhaustive(&f).unwrap().count,
                    Some(naive_count(&f)),
                    "n={nv} m={m}"
                );
            }
        }
        let f = sample_nae_formula(n(11), 4, 6, false, &mut TrialRng::new(8, 0)).unwrap();
        assert_eq!(
            count_nae_exhaustive(&f).unwrap().count,
            Some(naive_count(&f))
        );
    }

    #[test]
    fn mined_unsat_fixture() {
        // Smallest NAE-unsatisfiable formula found by random search over
        // non-trivial clauses at n = 5.
        let f = Formula::new(
            n(5),
            3,
            vec![
                clause(0, 3, 0b011),
                clause(3, 1, 0b100),
                clause(3, 3, 0b100),
                clause(1, 4, 0b111),
            ],
        )
        .unwrap();
        assert_eq!(count_nae_exhaustive(&f).unwrap().count, Some(0));
        let res = decide_nae(&f, 1_000);
        assert_eq!(res.status, Status::Unsat);
        assert!(!res.budget_exhausted);
        for drop in 0..4 {
            let mut g = f.clone();
            g.clauses.remove(drop);
            assert_eq!(decide_nae(&g, 1_000).status, Status::Sat);
        }
    }

    #[test]
    fn empty_formula_gets_all_false_witness() {
        let res = decide_nae(&Formula::empty(n(7), 3).unwrap(), 100);
        assert_eq!(res.status, Status::Sat);
        assert_eq!(res.witness.unwrap(), Coloring::zeros(7));
    }

    #[test]
    fn trivial_hyperedge_is_uncolorable() {
        let h = ApHypergraph::new(
            n(7),
            3,
            vec![Progression::new(0, 1, 3), Progression::new(4, 0, 3)],
        )
        .unwrap();
        assert_eq!(decide_2col(&h, 100).status, Status::Unsat);
        assert_eq!(count_2col_exhaustive(&h).unwrap().count, Some(0));
        let h = ApHypergraph::new(n(7), 3, vec![]).unwrap();
        assert_eq!(decide_2col(&h, 100).status, Status::Sat);
    }

    #[test]
    fn budget_gives_unknown() {
        let f = sample_nae_formula(n(101), 3, 215, true, &mut TrialRng::new(12, 0)).unwrap();
        let res = decide_nae(&f, 3);
        assert_eq!(res.status, Status::Unknown);
        assert!(res.budget_exhausted);
        assert_eq!(res.nodes_explored, 3);
    }

    #[test]
    fn exhaustive_counts_are_even() {
        for seed in 0..20 {
            let f = sample_nae_formula(n(13), 3, 20, false, &mut TrialRng::new(seed, 0)).unwrap();
            let c = count_nae_exhaustive(&f).unwrap().count.unwrap();
            assert_eq!(c % 2, 0);
        }
    }
}
