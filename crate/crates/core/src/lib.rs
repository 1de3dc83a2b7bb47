//! Random arithmetic-progression hypergraphs and the constraint problems
//! built on them: k-AP-NAE-SAT and hypergraph 2-coloring over a prime
//! modulus.
//!
//! The crate covers instance generation, exact monochromatic-progression
//! counting, closed-form first and second moments of the solution count,
//! exhaustive and backtracking solvers, and Monte Carlo threshold scans.

pub mod ap;
pub mod counting;
pub mod error;
pub mod format;
pub mod generators;
pub mod harness;
pub mod moments;
pub mod rng;
pub mod solvers;

pub use ap::{enumerate_progressions, is_prime, Coloring, PrimeModulus, Progression};
pub use counting::{
    beta_fraction, bichromatic_prob_single, count_monochromatic_brute, mono_ap3_closed_form,
    pair_bichromatic_prob, pair_nae_satisfy_prob, MonoCount,
};
pub use error::{Error, Result};
pub use format::{parse_instance, write_instance, Instance};
pub use generators::{
    clause_count, sample_ap_hypergraph_m, sample_ap_hypergraph_p, sample_nae_formula, ApHypergraph,
    Formula, SignedClause,
};
pub use harness::{
    crossover_estimate, estimate_sat_probability, threshold_scan, verify_moments_montecarlo,
    Experiment, MomentCheck, ScanRow,
};
pub use moments::{moment_report, second_moment_diagnostic, MomentReport, Problem};
pub use rng::TrialRng;
pub use solvers::{
    count_nae_exhaustive, decide_2col, decide_nae, nae_evaluate, SolveResult, Status,
};
