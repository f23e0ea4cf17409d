//! Ternary/binary digit labels and the multiset orbits of the digit-permutation action.
//!
//! A vector of length `3^N` is indexed by ternary strings `j_0 j_1 … j_{N-1}` with `j_0`
//! the most significant digit, so the 1-based position of a label is
//! `1 + Σ j_p 3^{N-1-p}`. The rows of `A^{⊗N}` are indexed the same way by binary
//! strings. Internally every index is 0-based; the 1-based form only appears in
//! [`ternary_to_linear`] and [`TernaryLabel::from_linear`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest system order the dense builders support.
pub const MAX_ORDER: usize = 12;

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::InvalidOrder(order));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TernaryLabel {
    digits: Vec<u8>,
}

impl TernaryLabel {
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        check_order(digits.len())?;
        if let Some((position, &digit)) = digits.iter().enumerate().find(|(_, &d)| d > 2) {
            return Err(Error::InvalidDigit {
                digit,
                position,
                radix: 3,
            });
        }
        Ok(Self { digits })
    }

    /// Label at 0-based position `index` among the `3^order` labels.
    pub fn from_index(order: usize, index: usize) -> Result<Self> {
        check_order(order)?;
        if index >= pow3(order) {
            return Err(Error::IndexOutOfRange { index, order });
        }
        let mut digits = vec![0u8; order];
        let mut rest = index;
        for d in digits.iter_mut().rev() {
            *d = (rest % 3) as u8;
            rest /= 3;
        }
        Ok(Self { digits })
    }

    /// Inverse of [`ternary_to_linear`]: `linear` is 1-based.
    pub fn from_linear(order: usize, linear: usize) -> Result<Self> {
        if linear == 0 {
            return Err(Error::IndexOutOfRange {
                index: linear,
                order,
            });
        }
        Self::from_index(order, linear - 1)
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn order(&self) -> usize {
        self.digits.len()
    }

    /// 0-based position.
    pub fn index(&self) -> usize {
        self.digits.iter().fold(0, |acc, &d| acc * 3 + d as usize)
    }

    /// The label with every digit `j` replaced by `2 - j`.
    pub fn complement(&self) -> Self {
        Self {
            digits: self.digits.iter().map(|&d| 2 - d).collect(),
        }
    }
}

impl fmt::Display for TernaryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryLabel {
    digits: Vec<u8>,
}

impl BinaryLabel {
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        check_order(digits.len())?;
        if let Some((position, &digit)) = digits.iter().enumerate().find(|(_, &d)| d > 1) {
            return Err(Error::InvalidDigit {
                digit,
                position,
                radix: 2,
            });
        }
        Ok(Self { digits })
    }

    pub fn from_index(order: usize, index: usize) -> Result<Self> {
        check_order(order)?;
        if index >= 1 << order {
            return Err(Error::IndexOutOfRange { index, order });
        }
        let digits = (0..order)
            .map(|p| ((index >> (order - 1 - p)) & 1) as u8)
            .collect();
        Ok(Self { digits })
    }

    /// `0…0 1…1` with `ones` trailing ones.
    pub fn trailing_ones(order: usize, ones: usize) -> Result<Self> {
        check_order(order)?;
        if ones > order {
            return Err(Error::IndexOutOfRange { index: ones, order });
        }
        let mut digits = vec![0u8; order];
        digits[order - ones..].fill(1);
        Ok(Self { digits })
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn order(&self) -> usize {
        self.digits.len()
    }

    pub fn index(&self) -> usize {
        self.digits.iter().fold(0, |acc, &d| (acc << 1) | d as usize)
    }

    pub fn ones(&self) -> usize {
        self.digits.iter().filter(|&&d| d == 1).count()
    }
}

impl fmt::Display for BinaryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// The orbit `[N0, N1, N2]`: all ternary strings with `N0` zeros, `N1` ones and `N2` twos.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultisetLabel {
    pub n0: usize,
    pub n1: usize,
    pub n2: usize,
}

impl MultisetLabel {
    pub fn new(n0: usize, n1: usize, n2: usize) -> Self {
        Self { n0, n1, n2 }
    }

    /// Validates the counts against a system order.
    pub fn with_order(order: usize, n0: usize, n1: usize, n2: usize) -> Result<Self> {
        check_order(order)?;
        let sum = n0 + n1 + n2;
        if sum != order {
            return Err(Error::LabelOrderMismatch { sum, order });
        }
        Ok(Self { n0, n1, n2 })
    }

    pub fn order(&self) -> usize {
        self.n0 + self.n1 + self.n2
    }

    /// `[N2, N1, N0]`, the orbit hit by the `j -> 2 - j` digit complement.
    pub fn reversed(&self) -> Self {
        Self::new(self.n2, self.n1, self.n0)
    }

    /// Number of strings in the orbit, `N! / (N0! N1! N2!)`.
    pub fn orbit_size(&self) -> u64 {
        binomial(self.order(), self.n0) * binomial(self.n1 + self.n2, self.n1)
    }

    /// 0-based position of this label in [`column_order`].
    pub fn column_index(&self) -> usize {
        let n = self.order();
        let k = self.n1;
        // groups N1 = 0..k hold N+1, N, …, N-k+2 labels
        k * (n + 1) - k * k.saturating_sub(1) / 2 + self.n2
    }
}

impl fmt::Display for MultisetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}{}{}]", self.n0, self.n1, self.n2)
    }
}

/// 1-based linear position `1 + Σ j_p 3^{N-1-p}`.
pub fn ternary_to_linear(label: &TernaryLabel) -> usize {
    label.index() + 1
}

pub fn label_orbit(label: &TernaryLabel) -> MultisetLabel {
    let mut counts = [0usize; 3];
    for &d in label.digits() {
        counts[d as usize] += 1;
    }
    MultisetLabel::new(counts[0], counts[1], counts[2])
}

/// Number of orbits, `(N+1)(N+2)/2`.
pub fn p_count(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Canonical column order: grouped by increasing `N1`, `N0` decreasing within a group.
///
/// For `N = 2` this is `[200] [101] [002] [110] [011] [020]`.
pub fn column_order(order: usize) -> Vec<MultisetLabel> {
    let mut labels = Vec::with_capacity(p_count(order));
    for n1 in 0..=order {
        for n2 in 0..=order - n1 {
            labels.push(MultisetLabel::new(order - n1 - n2, n1, n2));
        }
    }
    labels
}

/// Column index (in [`column_order`]) of the orbit of every ternary label, by 0-based position.
pub fn orbit_map(order: usize) -> Vec<usize> {
    let len = pow3(order);
    let mut map = Vec::with_capacity(len);
    // walk labels in lexicographic order, updating digit counts incrementally
    let mut digits = vec![0u8; order];
    let mut c = [order, 0, 0];
    for _ in 0..len {
        map.push(MultisetLabel::new(c[0], c[1], c[2]).column_index());
        for p in (0..order).rev() {
            c[digits[p] as usize] -= 1;
            if digits[p] < 2 {
                digits[p] += 1;
                c[digits[p] as usize] += 1;
                break;
            }
            digits[p] = 0;
            c[0] += 1;
        }
    }
    map
}

pub fn pow3(order: usize) -> usize {
    3usize.pow(order as u32)
}

/// Exact binomial coefficient via Pascal's rule; `0` when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut row = vec![0u64; n + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=i).rev() {
            row[j] += row[j - 1];
        }
    }
    row[k]
}
