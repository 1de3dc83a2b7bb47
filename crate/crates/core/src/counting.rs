//! Monochromatic progression counts and the per-clause probabilities
//! derived from them.
//!
//! For `k = 3` and prime `n`, a coloring with `z` ones has exactly
//! `n^2 - 3zn + 3z^2` monochromatic progressions (trivial ones included),
//! so every quantity here depends on the coloring only through `z`. For
//! `k > 3` that stops being true; [`count_monochromatic_brute`] is the only
//! general route.

use num_rational::Ratio;
use serde::Serialize;

use crate::ap::{enumerate_progressions, Coloring, PrimeModulus};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonoCount {
    pub total_progressions: u64,
    pub monochromatic: u64,
    pub fraction: f64,
}

impl MonoCount {
    pub fn exact_fraction(&self) -> Ratio<u64> {
        Ratio::new(self.monochromatic, self.total_progressions)
    }
}

fn check_len(c: &Coloring, n: PrimeModulus) -> Result<()> {
    if c.len() == n.get() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "coloring has {} vertices, modulus is {n}",
            c.len()
        )))
    }
}

/// Counts monochromatic length-`k` progressions by evaluating
/// `sum over all n^2 progressions of prod z_v + prod (1 - z_v)`.
pub fn count_monochromatic_brute(c: &Coloring, k: usize, n: PrimeModulus) -> Result<MonoCount> {
    check_len(c, n)?;
    n.check_length(k)?;
    let mut mono = 0u64;
    for p in enumerate_progressions(n, k, false) {
        let (mut ones, mut zeros) = (1u64, 1u64);
        for v in p.vertices_unchecked(n) {
            let z = u64::from(c.get(v));
            ones *= z;
            zeros *= 1 - z;
        }
        mono += ones + zeros;
    }
    let total = (n.get() * n.get()) as u64;
    Ok(MonoCount {
        total_progressions: total,
        monochromatic: mono,
        fraction: mono as f64 / total as f64,
    })
}

/// `n^2 - 3zn + 3z^2`, the monochromatic 3-AP count of any coloring of
/// `Z_n` with `z` ones.
pub fn mono_ap3_closed_form(n: PrimeModulus, z: usize) -> Result<u64> {
    if z > n.get() {
        return Err(Error::InvalidParameter(format!("z = {z} exceeds n = {n}")));
    }
    let (n, z) = (n.get() as i128, z as i128);
    Ok((n * n - 3 * z * n + 3 * z * z) as u64)
}

/// Fraction of length-`k` progressions monochromatic in `s xor t`.
pub fn beta_fraction(s: &Coloring, t: &Coloring, k: usize) -> Result<f64> {
    Ok(beta_exact(s, t, k)?.to_f64())
}

fn beta_count(s: &Coloring, t: &Coloring, k: usize) -> Result<MonoCount> {
    let x = s.xor(t)?;
    let n = PrimeModulus::new(x.len())?;
    count_monochromatic_brute(&x, k, n)
}

pub fn beta_exact(s: &Coloring, t: &Coloring, k: usize) -> Result<ExactProb> {
    Ok(ExactProb(beta_count(s, t, k)?.exact_fraction()))
}

/// Probability that both assignments NAE-satisfy a uniform random AP clause:
/// `1 - 2^(2-k) + 2^(1-k) beta`.
pub fn pair_nae_satisfy_prob(s: &Coloring, t: &Coloring, k: usize) -> Result<f64> {
    Ok(pair_nae_satisfy_exact(s, t, k)?.to_f64())
}

pub fn pair_nae_satisfy_exact(s: &Coloring, t: &Coloring, k: usize) -> Result<ExactProb> {
    if k > 40 {
        return Err(Error::InvalidParameter(format!(
            "k = {k} too large for exact arithmetic"
        )));
    }
    let mc = beta_count(s, t, k)?;
    let pow = 1u64 << k;
    let total = mc.total_progressions;
    // (2^k n^2 - 4 n^2 + 2 mono) / (2^k n^2)
    let num = pow * total - 4 * total + 2 * mc.monochromatic;
    Ok(ExactProb(Ratio::new(num, pow * total)))
}

/// An exact probability with a documented float conversion (numerator and
/// denominator converted separately, then divided).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactProb(pub Ratio<u64>);

impl ExactProb {
    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

/// Probability a uniform random 3-AP edge is bichromatic under a coloring
/// with ones-fraction `alpha`: `1 - alpha^3 - (1 - alpha)^3`.
pub fn bichromatic_prob_single(alpha: f64) -> f64 {
    1.0 - alpha.powi(3) - (1.0 - alpha).powi(3)
}

/// Exact form of [`bichromatic_prob_single`] for `z` ones out of `n`.
pub fn bichromatic_single_exact(n: PrimeModulus, z: usize) -> Result<ExactProb> {
    let nn = (n.get() * n.get()) as u64;
    Ok(ExactProb(Ratio::new(nn - mono_ap3_closed_form(n, z)?, nn)))
}

/// Probability that a hyperedge with `k` independent uniform vertices is
/// bichromatic under two colorings with black fractions `alpha`, `beta`
/// and common-black fraction `gamma`.
///
/// For AP edges this is only an approximation: the joint count depends on
/// more than the four cell sizes.
pub fn pair_bichromatic_prob(alpha: f64, beta: f64, gamma: f64, k: usize) -> Result<f64> {
    const EPS: f64 = 1e-12;
    let feasible = [alpha, beta, gamma]
        .iter()
        .all(|v| (-EPS..=1.0 + EPS).contains(v))
        && gamma <= alpha.min(beta) + EPS
        && alpha + beta - gamma <= 1.0 + EPS;
    if !feasible {
        return Err(Error::InvalidOverlap { alpha, beta, gamma });
    }
    let k = k as i32;
    let cells = [
        gamma,
        alpha - gamma,
        beta - gamma,
        1.0 - alpha - beta + gamma,
    ];
    let both_mono: f64 = cells.iter().map(|c| c.max(0.0).powi(k)).sum();
    Ok(
        1.0 - alpha.powi(k) - (1.0 - alpha).powi(k) - beta.powi(k) - (1.0 - beta).powi(k)
            + both_mono,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: usize) -> PrimeModulus {
        PrimeModulus::new(v).unwrap()
    }

    #[test]
    fn brute_examples() {
        let c = count_monochromatic_brute(&Coloring::ones(5), 3, n(5)).unwrap();
        assert_eq!(c.monochromatic, 25);
        let two = Coloring::from_bitstring("11000").unwrap();
        assert_eq!(
            count_monochromatic_brute(&two, 3, n(5))
                .unwrap()
                .monochromatic,
            7
        );
        let err = count_monochromatic_brute(&two, 3, n(7)).unwrap_err();
        assert_eq!(err.kind(), "invalid-parameter");
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(mono_ap3_closed_form(n(5), 0).unwrap(), 25);
        assert_eq!(mono_ap3_closed_form(n(5), 2).unwrap(), 7);
        assert_eq!(mono_ap3_closed_form(n(7), 3).unwrap(), 13);
        assert!(mono_ap3_closed_form(n(5), 6).is_err());
    }

    #[test]
    fn closed_form_matches_every_three_ones_coloring_of_z7() {
        for mask in 0u64..128 {
            if mask.count_ones() == 3 {
                let c = Coloring::from_mask(mask, 7);
                assert_eq!(
                    count_monochromatic_brute(&c, 3, n(7))
                        .unwrap()
                        .monochromatic,
                    13
                );
            }
        }
    }

    #[test]
    fn beta_examples() {
        let s = Coloring::from_bitstring("10110").unwrap();
        for k in [3, 4] {
            assert_eq!(beta_fraction(&s, &s, k).unwrap(), 1.0);
        }
        // overlap 3/5: xor has two ones
        let t = Coloring::from_bitstring("01110").unwrap();
        assert_eq!(s.overlap_fraction(&t).unwrap(), 0.6);
        assert_eq!(beta_exact(&s, &t, 3).unwrap().0, Ratio::new(7, 25));
        assert!((beta_fraction(&s, &t, 3).unwrap() - 0.28).abs() < 1e-15);
    }

    #[test]
    fn pair_nae_examples() {
        let s = Coloring::from_bitstring("10110").unwrap();
        assert_eq!(
            pair_nae_satisfy_exact(&s, &s, 3).unwrap().0,
            Ratio::new(3, 4)
        );
        let t = Coloring::from_bitstring("01110").unwrap();
        assert_eq!(
            pair_nae_satisfy_exact(&s, &t, 3).unwrap().0,
            Ratio::new(57, 100)
        );
        assert!((pair_nae_satisfy_prob(&s, &t, 3).unwrap() - 0.57).abs() < 1e-15);
    }

    #[test]
    fn bichromatic_single_examples() {
        assert_eq!(bichromatic_prob_single(0.0), 0.0);
        assert_eq!(bichromatic_prob_single(0.5), 0.75);
        assert!((bichromatic_prob_single(0.4) - 18.0 / 25.0).abs() < 1e-15);
        assert_eq!(
            bichromatic_single_exact(n(5), 2).unwrap().0,
            Ratio::new(18, 25)
        );
    }

    #[test]
    fn pair_bichromatic_examples() {
        for a in [0.0, 0.2, 0.5, 0.9] {
            let p = pair_bichromatic_prob(a, a, a, 3).unwrap();
            assert!((p - bichromatic_prob_single(a)).abs() < 1e-15);
        }
        assert!((pair_bichromatic_prob(0.5, 0.5, 0.25, 3).unwrap() - 9.0 / 16.0).abs() < 1e-15);
        assert!((pair_bichromatic_prob(0.4, 0.6, 0.2, 3).unwrap() - 0.528).abs() < 1e-15);
        let err = pair_bichromatic_prob(0.3, 0.3, 0.4, 3).unwrap_err();
        assert_eq!(err.kind(), "invalid-overlap");
        assert!(pair_bichromatic_prob(0.8, 0.8, 0.5, 3).is_err());
    }
}
