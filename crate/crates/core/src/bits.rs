//! Bit-level primitives on positive integers.
//!
//! For `n = 2^t_1 + ... + 2^t_p` with `t_1 < ... < t_p`, [`lam`] returns `t_1`
//! and [`mu`] returns `t_p`. A set is *apart* when the exponent intervals
//! `[lam(x), mu(x)]` of its elements are disjoint and ascend with the elements.

use std::fmt;
use std::num::NonZeroU64;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("λ undefined at 0")]
    LamOfZero,
    #[error("μ undefined at 0")]
    MuOfZero,
    #[error("0 is not a positive integer")]
    Zero,
    #[error("{value} exceeds the bit budget of {bits} bits")]
    OverBudget { value: u128, bits: u32 },
    #[error("bit budget must be between 1 and 63, got {0}")]
    InvalidBudget(u32),
    #[error("set is empty")]
    EmptySet,
    #[error("set is not strictly increasing at position {position} ({prev} then {next})")]
    NotIncreasing { position: usize, prev: u64, next: u64 },
    #[error("set is not apart at position {position}: μ({prev}) = {mu} is not below λ({next}) = {lam}")]
    NotApart {
        position: usize,
        prev: u64,
        next: u64,
        mu: u32,
        lam: u32,
    },
    #[error("run lengths must satisfy 1 <= min_len <= max_len (got {min_len}..{max_len})")]
    RunLength { min_len: usize, max_len: usize },
    #[error("run ({start}, {end}) out of range for a set of {len} elements")]
    RunOutOfRange { start: usize, end: usize, len: usize },
    #[error("run sum overflows 64 bits")]
    SumOverflow,
}

/// Least exponent in the binary expansion of `n`.
pub fn lam(n: u64) -> Result<u32, NumericError> {
    if n == 0 {
        return Err(NumericError::LamOfZero);
    }
    Ok(n.trailing_zeros())
}

/// Greatest exponent in the binary expansion of `n`.
pub fn mu(n: u64) -> Result<u32, NumericError> {
    if n == 0 {
        return Err(NumericError::MuOfZero);
    }
    Ok(63 - n.leading_zeros())
}

pub fn popcount(n: u64) -> u32 {
    n.count_ones()
}

/// Cap on the magnitude of every integer the crate constructs: values stay
/// strictly below `2^bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitBudget(u32);

impl BitBudget {
    pub const MAX_BITS: u32 = 63;

    pub fn new(bits: u32) -> Result<Self, NumericError> {
        if bits == 0 || bits > Self::MAX_BITS {
            return Err(NumericError::InvalidBudget(bits));
        }
        Ok(Self(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Largest representable value, `2^bits - 1`.
    pub fn max_value(self) -> u64 {
        (1u64 << self.0) - 1
    }

    pub fn check(self, value: u128) -> Result<u64, NumericError> {
        if value > self.max_value() as u128 {
            return Err(NumericError::OverBudget {
                value,
                bits: self.0,
            });
        }
        Ok(value as u64)
    }
}

impl Default for BitBudget {
    fn default() -> Self {
        Self(Self::MAX_BITS)
    }
}

impl fmt::Display for BitBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A positive integer below the bit budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PosInt(NonZeroU64);

impl PosInt {
    pub fn new(value: u64, budget: BitBudget) -> Result<Self, NumericError> {
        let nz = NonZeroU64::new(value).ok_or(NumericError::Zero)?;
        budget.check(value as u128)?;
        Ok(Self(nz))
    }

    pub fn get(self) -> u64 {
        self.0.get()
    }

    pub fn lam(self) -> u32 {
        self.0.trailing_zeros()
    }

    pub fn mu(self) -> u32 {
        63 - self.0.leading_zeros()
    }

    pub fn popcount(self) -> u32 {
        self.0.get().count_ones()
    }
}

impl fmt::Display for PosInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn check_increasing(xs: &[u64]) -> Result<(), NumericError> {
    let first = *xs.first().ok_or(NumericError::EmptySet)?;
    if first == 0 {
        return Err(NumericError::Zero);
    }
    for (position, w) in xs.windows(2).enumerate() {
        if w[0] >= w[1] {
            return Err(NumericError::NotIncreasing {
                position: position + 1,
                prev: w[0],
                next: w[1],
            });
        }
    }
    Ok(())
}

/// Checks the Apartness Condition on a strictly increasing set of positive
/// integers. Only adjacent pairs are compared: once `mu(x) < lam(x')` holds for
/// neighbours the exponent intervals chain for every pair.
pub fn is_apart(xs: &[u64]) -> Result<bool, NumericError> {
    check_increasing(xs)?;
    Ok(first_apart_violation(xs).is_none())
}

/// Position (1-based, of the left element) of the first adjacent pair that
/// breaks apartness. Assumes positive entries.
pub(crate) fn first_apart_violation(xs: &[u64]) -> Option<usize> {
    xs.windows(2)
        .position(|w| w[0].ilog2() >= w[1].trailing_zeros())
        .map(|p| p + 1)
}

/// A strictly increasing, apart, nonempty set of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ApartSet(Vec<u64>);

impl ApartSet {
    pub fn new(elements: Vec<u64>) -> Result<Self, NumericError> {
        check_increasing(&elements)?;
        if let Some(position) = first_apart_violation(&elements) {
            let (prev, next) = (elements[position - 1], elements[position]);
            return Err(NumericError::NotApart {
                position,
                prev,
                next,
                mu: prev.ilog2(),
                lam: next.trailing_zeros(),
            });
        }
        Ok(Self(elements))
    }

    pub fn elements(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }
}

impl AsRef<[u64]> for ApartSet {
    fn as_ref(&self) -> &[u64] {
        &self.0
    }
}

/// A run of consecutive elements `h_start + ... + h_end` (1-based, inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Run {
    pub start: usize,
    pub end: usize,
    pub sum: u64,
}

impl Run {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Enumerates the runs of consecutive elements whose length lies in
/// `min_len..=max_len`.
///
/// Runs are listed by length first and then by start index, so `AS^{=t}`
/// occupies a contiguous block and singletons come first: for `{1, 2, 4}` the
/// sums are `1 2 4 3 6 7`.
pub fn adjacent_sums(h: &[u64], min_len: usize, max_len: usize) -> Result<Vec<Run>, NumericError> {
    check_increasing(h)?;
    if min_len == 0 || min_len > max_len {
        return Err(NumericError::RunLength { min_len, max_len });
    }
    let m = h.len();
    let mut prefix = Vec::with_capacity(m + 1);
    prefix.push(0u128);
    for &x in h {
        prefix.push(prefix.last().unwrap() + x as u128);
    }
    let mut runs = Vec::new();
    for len in min_len..=max_len.min(m) {
        for start in 1..=m + 1 - len {
            let end = start + len - 1;
            let sum = prefix[end] - prefix[start - 1];
            let sum = u64::try_from(sum).map_err(|_| NumericError::SumOverflow)?;
            runs.push(Run { start, end, sum });
        }
    }
    Ok(runs)
}

/// All runs of `h`, i.e. `AS(H)`.
pub fn all_adjacent_sums(h: &[u64]) -> Result<Vec<Run>, NumericError> {
    adjacent_sums(h, 1, h.len().max(1))
}

/// `(lam(h_i), mu(h_j))` for the run `h_i + ... + h_j` of an apart set; on apart
/// sets this coincides with `(lam, mu)` of the run's sum.
pub fn run_endpoints(h: &ApartSet, i: usize, j: usize) -> Result<(u32, u32), NumericError> {
    let len = h.len();
    if i == 0 || i > j || j > len {
        return Err(NumericError::RunOutOfRange { start: i, end: j, len });
    }
    let xs = h.elements();
    Ok((xs[i - 1].trailing_zeros(), xs[j - 1].ilog2()))
}
