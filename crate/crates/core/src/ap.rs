//! Arithmetic over a prime modulus, AP edges, and 2-colorings of `Z_n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deterministic primality test, exact for every `u64`.
///
/// Miller-Rabin with the first twelve primes as witnesses, which is known
/// to be deterministic below 3.3 * 10^24.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// A prime modulus `n > 2`: the vertex (or variable) set is `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct PrimeModulus(usize);

impl PrimeModulus {
    pub fn new(n: usize) -> Result<Self> {
        if n > 2 && is_prime(n as u64) {
            Ok(PrimeModulus(n))
        } else {
            Err(Error::NotPrime { n: n as u64 })
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Checks that progressions of length `k` are valid over this modulus.
    pub fn check_length(self, k: usize) -> Result<()> {
        if k >= 3 && k < self.0 {
            Ok(())
        } else {
            Err(Error::InvalidProgression {
                n: self.0 as u64,
                k,
            })
        }
    }

    /// Number of progressions per length: `n^2`, or `n(n-1)` without step 0.
    pub fn progression_count(self, exclude_trivial: bool) -> usize {
        if exclude_trivial {
            self.0 * (self.0 - 1)
        } else {
            self.0 * self.0
        }
    }
}

impl TryFrom<usize> for PrimeModulus {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        PrimeModulus::new(n)
    }
}

impl From<PrimeModulus> for usize {
    fn from(n: PrimeModulus) -> usize {
        n.0
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The progression `(start, start + step, ..., start + (length - 1) step) mod n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Progression {
    pub start: usize,
    pub step: usize,
    pub length: usize,
}

impl Progression {
    pub fn new(start: usize, step: usize, length: usize) -> Self {
        Progression {
            start,
            step,
            length,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.step == 0
    }

    /// The i-th vertex, without validation.
    #[inline]
    pub fn vertex(&self, i: usize, n: PrimeModulus) -> usize {
        (self.start + i * self.step) % n.get()
    }

    /// Vertices in order. Fails if the length is not below `n` or the
    /// residues are out of range.
    pub fn vertices(&self, n: PrimeModulus) -> Result<Vec<usize>> {
        self.validate(n)?;
        Ok(self.vertices_unchecked(n).collect())
    }

    pub(crate) fn vertices_unchecked(&self, n: PrimeModulus) -> impl Iterator<Item = usize> + '_ {
        let n = n.get();
        let (a, x) = (self.start, self.step);
        (0..self.length).map(move |i| (a + i * x) % n)
    }

    pub fn validate(&self, n: PrimeModulus) -> Result<()> {
        if self.length >= n.get() || self.length == 0 {
            return Err(Error::InvalidProgression {
                n: n.get() as u64,
                k: self.length,
            });
        }
        if self.start >= n.get() || self.step >= n.get() {
            return Err(Error::InvalidParameter(format!(
                "progression residues ({}, {}) out of range for n = {}",
                self.start, self.step, n
            )));
        }
        Ok(())
    }

    /// The same vertex set traversed backwards: start at the last vertex, step `-x`.
    pub fn reversed(&self, n: PrimeModulus) -> Progression {
        let last = self.vertex(self.length - 1, n);
        Progression::new(last, (n.get() - self.step) % n.get(), self.length)
    }
}

/// All `(a, x)` progressions of length `k` in lexicographic order.
///
/// Yields `n^2` items, or `n(n-1)` when step 0 is excluded.
pub fn enumerate_progressions(
    n: PrimeModulus,
    k: usize,
    exclude_trivial: bool,
) -> impl Iterator<Item = Progression> {
    let nn = n.get();
    let first_step = usize::from(exclude_trivial);
    (0..nn).flat_map(move |a| (first_step..nn).map(move |x| Progression::new(a, x, k)))
}

/// A 2-coloring of `0..n` (equivalently a truth assignment), stored as
/// packed bits with a cached popcount.
///
/// Bit 1 is "true"/black, bit 0 is "false"/white.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    words: Vec<u64>,
    len: usize,
    ones: usize,
}

impl Coloring {
    pub fn zeros(len: usize) -> Self {
        Coloring {
            words: vec![0; len.div_ceil(64)],
            len,
            ones: 0,
        }
    }

    pub fn ones(len: usize) -> Self {
        Coloring::from_fn(len, |_| true)
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut words = vec![0u64; len.div_ceil(64)];
        for i in 0..len {
            if f(i) {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Coloring::from_words(words, len)
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Coloring::from_fn(bits.len(), |i| bits[i])
    }

    /// Low `len` bits of `mask`; bit i is vertex i. Requires `len <= 64`.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        assert!(len <= 64, "mask colorings hold at most 64 vertices");
        let mask = if len == 64 {
            mask
        } else {
            mask & ((1u64 << len) - 1)
        };
        let words = if len == 0 { Vec::new() } else { vec![mask] };
        Coloring::from_words(words, len)
    }

    /// Parses a `0`/`1` string; character i is vertex i.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidParameter(format!(
                    "invalid bit {other:?} in coloring"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Coloring::from_bools(&bits))
    }

    fn from_words(words: Vec<u64>, len: usize) -> Self {
        let ones = words.iter().map(|w| w.count_ones() as usize).sum();
        Coloring { words, len, ones }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn ones_count(&self) -> usize {
        self.ones
    }

    /// Fraction of 1 bits.
    pub fn alpha(&self) -> f64 {
        self.ones as f64 / self.len as f64
    }

    /// The low 64 bits as a mask (vertex i is bit i).
    pub fn to_mask(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub fn complement(&self) -> Coloring {
        Coloring::from_fn(self.len, |i| !self.get(i))
    }

    pub fn xor(&self, other: &Coloring) -> Result<Coloring> {
        self.check_pair(other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Coloring::from_words(words, self.len))
    }

    /// Number of vertices that are 1 in both colorings.
    pub fn and_count(&self, other: &Coloring) -> Result<usize> {
        self.check_pair(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum())
    }

    /// Fraction of positions on which the two colorings agree.
    pub fn overlap_fraction(&self, other: &Coloring) -> Result<f64> {
        let diff = self.xor(other)?.ones_count();
        Ok((self.len - diff) as f64 / self.len as f64)
    }

    fn check_pair(&self, other: &Coloring) -> Result<()> {
        if self.len == other.len {
            Ok(())
        } else {
            Err(Error::InvalidPair {
                left: self.len,
                right: other.len,
            })
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    pub fn to_bitstring(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }
}

impl fmt::Debug for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coloring({})", self.to_bitstring())
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

impl Serialize for Coloring {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_bitstring())
    }
}

impl<'de> Deserialize<'de> for Coloring {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Coloring::from_bitstring(&s).map_err(serde::de::Error::custom)
    }
}
