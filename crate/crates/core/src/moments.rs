//! First and second moments of the number of solutions, in log2 space.
//!
//! Every sum is evaluated as a base-2 log-sum-exp over log-factorial
//! weights, so nothing overflows at a few hundred variables. Terms whose
//! probability is exactly zero (monochromatic colorings in the 2-coloring
//! sums) are detected in integer arithmetic and dropped.

use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ap::PrimeModulus;
use crate::counting::mono_ap3_closed_form;
use crate::error::{Error, Result};
use crate::generators::clause_count;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Problem {
    #[serde(rename = "nae")]
    Nae,
    #[serde(rename = "2col")]
    TwoCol,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::Nae => "nae",
            Problem::TwoCol => "2col",
        })
    }
}

impl std::str::FromStr for Problem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nae" => Ok(Problem::Nae),
            "2col" => Ok(Problem::TwoCol),
            other => Err(Error::InvalidParameter(format!(
                "unknown problem {other:?}"
            ))),
        }
    }
}

/// `ln k!` for `k = 0..=n`.
#[derive(Debug, Clone)]
pub struct LogFactorials(Vec<f64>);

impl LogFactorials {
    pub fn new(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        let mut acc = 0.0f64;
        table.push(0.0);
        for i in 1..=n {
            acc += (i as f64).ln();
            table.push(acc);
        }
        LogFactorials(table)
    }

    pub fn log2_binomial(&self, n: usize, z: usize) -> f64 {
        (self.0[n] - self.0[z] - self.0[n - z]) / LN_2
    }

    pub fn log2_multinomial(&self, n: usize, parts: &[usize]) -> f64 {
        (self.0[n] - parts.iter().map(|&p| self.0[p]).sum::<f64>()) / LN_2
    }
}

/// `log2(sum 2^t)`, with the shifted terms added by pairwise reduction so
/// the result does not depend on how callers chunk the work.
pub fn log2_sum_exp2(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let shifted: Vec<f64> = terms.iter().map(|t| (t - max).exp2()).collect();
    max + pairwise_sum(&shifted).log2()
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1..=8 => xs.iter().sum(),
        len => {
            let (a, b) = xs.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Binary entropy in bits, with `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

fn log2_one_minus_pow2(e: i32) -> f64 {
    (-(2f64.powi(e))).ln_1p() / LN_2
}

/// `log2 E[X] = n + m log2(1 - 2^(1-k))` for random k-AP-NAE-SAT.
pub fn log2_first_moment_nae(n: usize, k: usize, m: usize) -> f64 {
    n as f64 + m as f64 * log2_one_minus_pow2(1 - k as i32)
}

/// Density at which the first moment crosses 1: `-1 / log2(1 - 2^(1-k))`.
pub fn first_moment_threshold(k: usize) -> f64 {
    -1.0 / log2_one_minus_pow2(1 - k as i32)
}

/// `f_k(alpha) = 1 - 2^(2-k) + 2^(1-k) (alpha^k + (1 - alpha)^k)`.
pub fn f_alpha(alpha: f64, k: usize) -> f64 {
    let ki = k as i32;
    1.0 - 2f64.powi(2 - ki) + 2f64.powi(1 - ki) * (alpha.powi(ki) + (1.0 - alpha).powi(ki))
}

/// `log2 E[X^2] = log2( 2^n sum_z C(n,z) f(z/n)^m )` at `m = round(r n)`.
pub fn log2_second_moment_nae(n: PrimeModulus, k: usize, r: f64) -> Result<f64> {
    log2_second_moment_nae_m(n, k, clause_count(r, n)?)
}

pub fn log2_second_moment_nae_m(n: PrimeModulus, k: usize, m: usize) -> Result<f64> {
    if k != 3 {
        return Err(Error::UnsupportedK(k));
    }
    let nv = n.get();
    if m == 0 {
        return Ok(2.0 * nv as f64);
    }
    let lf = LogFactorials::new(nv);
    let nn = (nv * nv) as f64;
    let terms: Vec<f64> = (0..=nv)
        .map(|z| {
            // f(z/n) = 1/2 + mono(z) / (4 n^2), exact numerator in integers
            let mono = mono_ap3_closed_form(n, z).expect("z <= n");
            let f = (2.0 * nn + mono as f64) / (4.0 * nn);
            lf.log2_binomial(nv, z) + m as f64 * f.log2()
        })
        .collect();
    Ok(nv as f64 + log2_sum_exp2(&terms))
}

/// `log2 sum_z C(n,z) q(z)^m` with `q(z)` the probability a random AP edge
/// is bichromatic under a coloring with `z` black vertices.
pub fn log2_first_moment_2col(n: PrimeModulus, r: f64) -> Result<f64> {
    Ok(log2_first_moment_2col_m(n, clause_count(r, n)?))
}

pub fn log2_first_moment_2col_m(n: PrimeModulus, m: usize) -> f64 {
    let nv = n.get();
    if m == 0 {
        return nv as f64;
    }
    let lf = LogFactorials::new(nv);
    let nn = (nv * nv) as u64;
    let terms: Vec<f64> = (0..=nv)
        .map(|z| {
            let bich = nn - mono_ap3_closed_form(n, z).expect("z <= n");
            if bich == 0 {
                f64::NEG_INFINITY
            } else {
                lf.log2_binomial(nv, z) + m as f64 * (bich as f64 / nn as f64).log2()
            }
        })
        .collect();
    log2_sum_exp2(&terms)
}

/// `n^3 p(alpha, beta, gamma)` for cell counts `(z1, z2, z3, z4)`: black in
/// both, black only in the first coloring, black only in the second, white
/// in both. Exact in integers.
fn pair_bichromatic_cells_cubed(n: i128, z: [i128; 4]) -> i128 {
    let a = z[0] + z[1];
    let b = z[0] + z[2];
    let cube = |v: i128| v * v * v;
    cube(n) - cube(a) - cube(n - a) - cube(b) - cube(n - b)
        + z.iter().map(|&c| cube(c)).sum::<i128>()
}

/// `log2 sum_{z1+z2+z3+z4=n} multinom(n; z) p((z1+z2)/n, (z1+z3)/n, z1/n)^m`.
///
/// `z1` counts vertices black under both colorings, so it is the `gamma`
/// argument. This is the closed form for hyperedges with independent
/// uniform vertices; it is not exact for AP edges.
pub fn log2_second_moment_2col(n: PrimeModulus, r: f64) -> Result<f64> {
    Ok(log2_second_moment_2col_m(n, clause_count(r, n)?))
}

pub fn log2_second_moment_2col_m(n: PrimeModulus, m: usize) -> f64 {
    let nv = n.get();
    if m == 0 {
        return 2.0 * nv as f64;
    }
    let lf = LogFactorials::new(nv);
    let ni = nv as i128;
    let n3 = (ni * ni * ni) as f64;
    let mut terms = Vec::with_capacity((nv + 1) * (nv + 2) * (nv + 3) / 6);
    for z1 in 0..=nv {
        for z2 in 0..=nv - z1 {
            for z3 in 0..=nv - z1 - z2 {
                let z4 = nv - z1 - z2 - z3;
                let num = pair_bichromatic_cells_cubed(
                    ni,
                    [z1 as i128, z2 as i128, z3 as i128, z4 as i128],
                );
                if num > 0 {
                    let lp = (num as f64 / n3).log2();
                    terms.push(lf.log2_multinomial(nv, &[z1, z2, z3, z4]) + m as f64 * lp);
                }
            }
        }
    }
    log2_sum_exp2(&terms)
}

/// Outcome of the per-variable second-moment comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostic {
    pub argmax_alpha: f64,
    /// `max log2` of the per-variable second-moment exponent.
    pub max_log2: f64,
    /// Per-variable exponent of `E[X]^2` in log2.
    pub baseline_log2: f64,
    pub success: bool,
}

/// Default slack in the log2 comparison.
pub const DIAGNOSTIC_TOL: f64 = 1e-9;

/// Maximizes `log2 g(alpha) = H(alpha) + r log2 f_k(alpha)` over `[0, 1]`
/// (grid step 1e-4, then golden-section refinement to 1e-9) and compares
/// with the per-variable exponent of `E[X]^2`.
///
/// Summing over ordered pairs gives `E[X^2] = 2^n sum_z C(n,z) f(z/n)^m
/// ~ (2 max g)^n`, and `E[X]^2 = (4 f_k(1/2)^r)^n`, so the test is
/// `max g <= 2 f_k(1/2)^r = g(1/2)`: the maximum must sit at `alpha = 1/2`.
pub fn second_moment_diagnostic(k: usize, r: f64, tol: f64) -> Diagnostic {
    let log_g = |a: f64| binary_entropy(a) + r * f_alpha(a, k).log2();
    const STEPS: usize = 10_000;
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..=STEPS {
        let v = log_g(i as f64 / STEPS as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let h = 1.0 / STEPS as f64;
    let centre = best_i as f64 * h;
    let (alpha, refined) = golden_max(log_g, (centre - h).max(0.0), (centre + h).min(1.0), 1e-9);
    let (argmax_alpha, max_log2) = if refined > best {
        (alpha, refined)
    } else {
        (centre, best)
    };
    let baseline_log2 = 1.0 + r * f_alpha(0.5, k).log2();
    Diagnostic {
        argmax_alpha,
        max_log2,
        baseline_log2,
        success: max_log2 <= baseline_log2 + tol,
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Two-coloring analogue of [`second_moment_diagnostic`] for `k = 3`.
///
/// Maximizes `H(c1, c2, c3, c4) + r log2 p(c1+c2, c1+c3, c1)` over the
/// simplex of cell fractions (grid step 1/200, then pattern search) and
/// compares with twice the first-moment exponent
/// `max_alpha H(alpha) + r log2(1 - alpha^3 - (1-alpha)^3)`. Success means
/// the pair exponent peaks at the independent point `alpha = beta = 1/2,
/// gamma = 1/4`.
pub fn second_moment_diagnostic_2col(r: f64, tol: f64) -> Diagnostic {
    let first = |a: f64| {
        let q = 1.0 - a.powi(3) - (1.0 - a).powi(3);
        if q <= 0.0 {
            f64::NEG_INFINITY
        } else {
            binary_entropy(a) + r * q.log2()
        }
    };
    let mut first_max = f64::NEG_INFINITY;
    for i in 0..=10_000 {
        first_max = first_max.max(first(i as f64 / 10_000.0));
    }
    let (_, refined) = golden_max(first, 0.4999, 0.5001, 1e-12);
    first_max = first_max.max(refined);

    let pair = |c: [f64; 3]| {
        let c4 = 1.0 - c[0] - c[1] - c[2];
        if c.iter().any(|&v| v < 0.0) || c4 < -1e-15 {
            return f64::NEG_INFINITY;
        }
        let cells = [c[0], c[1], c[2], c4.max(0.0)];
        let a = cells[0] + cells[1];
        let b = cells[0] + cells[2];
        let p = 1.0 - a.powi(3) - (1.0 - a).powi(3) - b.powi(3) - (1.0 - b).powi(3)
            + cells.iter().map(|v| v.powi(3)).sum::<f64>();
        if p <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let ent: f64 = cells
            .iter()
            .map(|&v| if v <= 0.0 { 0.0 } else { -v * v.log2() })
            .sum();
        ent + r * p.log2()
    };
    const G: usize = 200;
    let mut best = ([0.25; 3], f64::NEG_INFINITY);
    for i in 0..=G {
        for j in 0..=G - i {
            for l in 0..=G - i - j {
                let c = [
                    i as f64 / G as f64,
                    j as f64 / G as f64,
                    l as f64 / G as f64,
                ];
                let v = pair(c);
                if v > best.1 {
                    best = (c, v);
                }
            }
        }
    }
    let (mut point, mut value) = best;
    let mut step = 1.0 / G as f64;
    while step > 1e-10 {
        let mut moved = false;
        for axis in 0..3 {
            for dir in [-1.0, 1.0] {
                let mut cand = point;
                cand[axis] += dir * step;
                let v = pair(cand);
                if v > value {
                    point = cand;
                    value = v;
                    moved = true;
                }
            }
        }
        if !moved {
            step /= 2.0;
        }
    }
    Diagnostic {
        argmax_alpha: point[0] + point[1],
        max_log2: value,
        baseline_log2: 2.0 * first_max,
        success: value <= 2.0 * first_max + tol,
    }
}

/// Moment summary for one `(problem, n, k, r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub problem: Problem,
    pub n: usize,
    pub k: usize,
    pub r: f64,
    pub m: usize,
    #[serde(rename = "log2_EX")]
    pub log2_ex: f64,
    /// `None` where no closed form exists (NAE with `k != 3`).
    #[serde(rename = "log2_EX2")]
    pub log2_ex2: Option<f64>,
    pub per_n_gap: Option<f64>,
    pub diag_argmax_alpha: Option<f64>,
    pub diag_success: Option<bool>,
}

pub fn moment_report(
    problem: Problem,
    n: PrimeModulus,
    k: usize,
    r: f64,
    diagnostic: bool,
) -> Result<MomentReport> {
    n.check_length(k)?;
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "density r = {r} must be finite and >= 0"
        )));
    }
    let m = clause_count(r, n)?;
    let (log2_ex, log2_ex2, diag) = match problem {
        Problem::Nae => {
            let ex2 = if k == 3 {
                Some(log2_second_moment_nae_m(n, k, m)?)
            } else {
                None
            };
            let diag = diagnostic.then(|| second_moment_diagnostic(k, r, DIAGNOSTIC_TOL));
            (log2_first_moment_nae(n.get(), k, m), ex2, diag)
        }
        Problem::TwoCol => {
            if k != 3 {
                return Err(Error::UnsupportedK(k));
            }
            let diag = diagnostic.then(|| second_moment_diagnostic_2col(r, DIAGNOSTIC_TOL));
            (
                log2_first_moment_2col_m(n, m),
                Some(log2_second_moment_2col_m(n, m)),
                diag,
            )
        }
    };
    Ok(MomentReport {
        problem,
        n: n.get(),
        k,
        r,
        m,
        log2_ex,
        log2_ex2,
        per_n_gap: log2_ex2.map(|e2| (e2 - 2.0 * log2_ex) / n.get() as f64),
        diag_argmax_alpha: diag.map(|d| d.argmax_alpha),
        diag_success: diag.map(|d| d.success),
    })
}
