use std::fmt;
use std::str::FromStr;

use super::IdentifyError;

/// Maximum number of substantive variables a pattern can describe.
pub const MAX_K: usize = 128;

/// A missingness pattern `r` over `k` indicators. Bit `i` is `r_{i+1}`;
/// a set bit means the variable is observed.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MissingnessPattern {
    bits: u128,
    k: u8,
}

impl MissingnessPattern {
    pub fn from_bits(bits: u128, k: usize) -> Result<Self, IdentifyError> {
        if k > MAX_K {
            return Err(IdentifyError::TooManyVariables(k));
        }
        let mask = Self::full_mask(k);
        if bits & !mask != 0 {
            return Err(IdentifyError::BadPattern(format!("bits {bits:#b} exceed length {k}")));
        }
        Ok(MissingnessPattern { bits, k: k as u8 })
    }

    fn full_mask(k: usize) -> u128 {
        if k == 128 {
            u128::MAX
        } else {
            (1u128 << k) - 1
        }
    }

    /// The all-ones pattern.
    pub fn complete(k: usize) -> Result<Self, IdentifyError> {
        Self::from_bits(Self::full_mask(k.min(MAX_K)), k)
    }

    /// Builds from `r_1..r_k` given as booleans (`true` = observed).
    pub fn from_observed(observed: &[bool]) -> Result<Self, IdentifyError> {
        let bits = observed.iter().enumerate().fold(0u128, |acc, (i, &o)| acc | ((o as u128) << i));
        Self::from_bits(bits & Self::full_mask(observed.len().min(MAX_K)), observed.len())
    }

    pub fn bits(self) -> u128 {
        self.bits
    }

    pub fn k(self) -> usize {
        self.k as usize
    }

    pub fn is_observed(self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    pub fn is_missing(self, i: usize) -> bool {
        !self.is_observed(i)
    }

    pub fn is_complete(self) -> bool {
        self.bits == Self::full_mask(self.k())
    }

    /// `M(r)`, ascending.
    pub fn missing(self) -> impl Iterator<Item = usize> {
        (0..self.k()).filter(move |&i| self.is_missing(i))
    }

    /// `O(r)`, ascending.
    pub fn observed(self) -> impl Iterator<Item = usize> {
        (0..self.k()).filter(move |&i| self.is_observed(i))
    }

    pub fn missing_count(self) -> usize {
        self.k() - self.bits.count_ones() as usize
    }

    /// The same pattern with index `i` switched to observed.
    pub fn with_observed(self, i: usize) -> Self {
        MissingnessPattern { bits: self.bits | (1u128 << i), k: self.k }
    }

    /// Indices where the two patterns disagree, as a bit mask.
    pub fn diff_mask(self, other: Self) -> u128 {
        self.bits ^ other.bits
    }

    /// Value of the bit string read with index 1 as the most significant
    /// digit, so "110" is 6.
    pub fn numeric(self) -> u128 {
        let mut v = 0u128;
        for i in 0..self.k() {
            v = (v << 1) | (self.is_observed(i) as u128);
        }
        v
    }

    /// Every pattern of length `k`, in descending numeric order.
    pub fn all(k: usize) -> Result<Vec<Self>, IdentifyError> {
        if k > super::MAX_ENUMERATED_K {
            return Err(IdentifyError::TooManyVariables(k));
        }
        let mut out: Vec<Self> = (0..1u128 << k)
            .map(|b| MissingnessPattern { bits: b, k: k as u8 })
            .collect();
        out.sort_by(|a, b| b.numeric().cmp(&a.numeric()));
        Ok(out)
    }
}

impl Ord for MissingnessPattern {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.k, self.numeric()).cmp(&(other.k, other.numeric()))
    }
}

impl PartialOrd for MissingnessPattern {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MissingnessPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.k() {
            f.write_str(if self.is_observed(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for MissingnessPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{self}")
    }
}

impl FromStr for MissingnessPattern {
    type Err = IdentifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let observed = s
            .chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                _ => Err(IdentifyError::BadPattern(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_observed(&observed)
    }
}
