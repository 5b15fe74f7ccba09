use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

/// A tuple of non-negative integers indexing a mixed partial derivative.
///
/// Ordering is lexicographic on the components.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    components: Vec<u32>,
}

impl MultiIndex {
    pub fn new(components: Vec<u32>) -> Self {
        Self { components }
    }

    pub fn zero(dim: usize) -> Self {
        Self { components: vec![0; dim] }
    }

    /// The unit index `e_axis` (zero-based axis).
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut components = vec![0; dim];
        components[axis] = 1;
        Self { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[u32] {
        &self.components
    }

    pub fn get(&self, axis: usize) -> u32 {
        self.components[axis]
    }

    /// `|α| = Σ αᵢ`.
    pub fn order(&self) -> u32 {
        self.components.iter().sum()
    }

    /// `α! = Π αᵢ!`, exact.
    pub fn factorial(&self) -> BigInt {
        self.components
            .iter()
            .fold(BigInt::one(), |acc, &c| acc * factorial(c))
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "multi-index dimension mismatch");
        Self {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Componentwise difference, `None` if any component would go negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        assert_eq!(self.dim(), other.dim(), "multi-index dimension mismatch");
        let mut components = Vec::with_capacity(self.dim());
        for (a, b) in self.components.iter().zip(&other.components) {
            components.push(a.checked_sub(*b)?);
        }
        Some(Self { components })
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.components
            .iter()
            .zip(&other.components)
            .all(|(a, b)| a <= b)
    }

    /// Same index with `axis` raised by one.
    pub fn bumped(&self, axis: usize) -> Self {
        let mut out = self.clone();
        out.components[axis] += 1;
        out
    }

    /// First axis with a nonzero component.
    pub fn first_nonzero_axis(&self) -> Option<usize> {
        self.components.iter().position(|&c| c > 0)
    }

    /// All multi-indices of dimension `dim` with `|α| == order`, lexicographic.
    pub fn with_order(dim: usize, order: u32) -> Vec<Self> {
        let mut out = Vec::new();
        let mut current = vec![0; dim];
        fill_order(&mut current, 0, order, &mut out);
        out
    }

    /// All multi-indices with `|α| ≤ max_order`, graded by order then lexicographic.
    pub fn up_to_order(dim: usize, max_order: u32) -> Vec<Self> {
        (0..=max_order)
            .flat_map(|o| Self::with_order(dim, o))
            .collect()
    }

    /// All `k` with `0 ≤ k ≤ self` componentwise, lexicographic.
    pub fn sub_indices(&self) -> Vec<Self> {
        let mut out = vec![Vec::with_capacity(self.dim())];
        for &c in &self.components {
            let mut next = Vec::with_capacity(out.len() * (c as usize + 1));
            for prefix in &out {
                for v in 0..=c {
                    let mut p = prefix.clone();
                    p.push(v);
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(Self::new).collect()
    }
}

fn fill_order(current: &mut Vec<u32>, axis: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    let dim = current.len();
    if axis + 1 == dim {
        current[axis] = remaining;
        out.push(MultiIndex::new(current.clone()));
        return;
    }
    for v in 0..=remaining {
        current[axis] = v;
        fill_order(current, axis + 1, remaining - v, out);
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub fn factorial(n: u32) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_and_factorial() {
        let a = MultiIndex::new(vec![2, 3, 0]);
        assert_eq!(a.order(), 5);
        assert_eq!(a.factorial(), BigInt::from(12));
    }

    #[test]
    fn with_order_counts() {
        assert_eq!(MultiIndex::with_order(2, 3).len(), 4);
        assert_eq!(MultiIndex::with_order(3, 2).len(), 6);
        assert_eq!(MultiIndex::up_to_order(2, 5).len(), 21);
    }

    #[test]
    fn sub_indices_are_lexicographic() {
        let a = MultiIndex::new(vec![1, 2]);
        let subs = a.sub_indices();
        assert_eq!(subs.len(), 6);
        let mut sorted = subs.clone();
        sorted.sort();
        assert_eq!(subs, sorted);
    }

    #[test]
    fn checked_sub_rejects_negative() {
        let a = MultiIndex::new(vec![1, 0]);
        assert!(a.checked_sub(&MultiIndex::new(vec![0, 1])).is_none());
        assert_eq!(
            a.checked_sub(&MultiIndex::new(vec![1, 0])),
            Some(MultiIndex::zero(2))
        );
    }
}
