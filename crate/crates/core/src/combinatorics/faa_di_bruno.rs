//! One-dimensional and multivariate Faà di Bruno formulas.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::multi_index::factorial;
use super::partitions::{enumerate_partitions_1d, enumerate_partitions_multi};
use super::{CombinatoricsError, MultiIndex};

/// Scalars the Faà di Bruno sums can be evaluated in.
pub trait FdbScalar: Clone + Zero + One + Add<Output = Self> + Mul<Output = Self> {
    fn from_rational(r: &BigRational) -> Self;
}

impl FdbScalar for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
}

impl FdbScalar for f64 {
    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
}

/// `x^e` by repeated multiplication, with `0⁰ = 1`.
pub fn int_pow<T: FdbScalar>(x: &T, e: u32) -> T {
    let mut acc = T::one();
    for _ in 0..e {
        acc = acc * x.clone();
    }
    acc
}

/// `f⁽ⁿ⁾(x₀)` for `f = h∘g` in one variable.
///
/// `h_derivs[k] = h⁽ᵏ⁾(g(x₀))` and `g_derivs[j] = g⁽ʲ⁾(x₀)`; both need at
/// least `n + 1` entries (index 0 is not read for `g`).
pub fn faa_di_bruno_1d<T: FdbScalar>(h_derivs: &[T], g_derivs: &[T], n: u32) -> Result<T, CombinatoricsError> {
    if h_derivs.len() <= n as usize || g_derivs.len() <= n as usize {
        return Err(CombinatoricsError::MissingDerivative(format!(
            "need {} derivatives of h and g",
            n + 1
        )));
    }
    let n_fact = factorial(n);
    let mut total = T::zero();
    for k in 1..=n {
        for p in enumerate_partitions_1d(n, k) {
            let mut denom = BigInt::one();
            let mut prod = T::one();
            for (idx, &kj) in p.k.iter().enumerate() {
                if kj == 0 {
                    continue;
                }
                let j = idx as u32 + 1;
                denom *= factorial(kj) * num_traits::pow(factorial(j), kj as usize);
                prod = prod * int_pow(&g_derivs[j as usize], kj);
            }
            let weight = BigRational::new(n_fact.clone(), denom);
            total = total + T::from_rational(&weight) * h_derivs[k as usize].clone() * prod;
        }
    }
    Ok(total)
}

/// One term of a precomputed multivariate Faà di Bruno sum:
/// `weight · ∂^α h · Π_j (∂^{ℓ_j} g)^{k_j}`.
#[derive(Clone, Debug)]
pub struct PlanTerm {
    pub alpha: MultiIndex,
    /// `n! / Π_j (k_j! (ℓ_j!)^{|k_j|})`.
    pub weight: BigRational,
    /// `(ℓ_j, k_j)` pairs.
    pub factors: Vec<(u32, MultiIndex)>,
}

/// Flattened term list of the multivariate formula for a fixed `(n, d)`.
#[derive(Clone, Debug)]
pub struct FaaDiBrunoPlan {
    pub n: u32,
    pub dim: usize,
    pub terms: Vec<PlanTerm>,
}

impl FaaDiBrunoPlan {
    pub fn new(n: u32, dim: usize) -> Self {
        let n_fact = factorial(n);
        let mut terms = Vec::new();
        for order in 1..=n {
            for alpha in MultiIndex::with_order(dim, order) {
                for (_, parts) in enumerate_partitions_multi(n, &alpha) {
                    for p in parts {
                        let mut denom = BigInt::one();
                        let mut factors = Vec::with_capacity(p.s());
                        for (k, &l) in p.ks.iter().zip(&p.ls) {
                            denom *= k.factorial() * num_traits::pow(factorial(l), k.order() as usize);
                            factors.push((l, k.clone()));
                        }
                        terms.push(PlanTerm {
                            alpha: alpha.clone(),
                            weight: BigRational::new(n_fact.clone(), denom),
                            factors,
                        });
                    }
                }
            }
        }
        Self { n, dim, terms }
    }

    /// Multi-indices `α` whose derivative `∂^α h` the plan reads.
    pub fn required_alphas(&self) -> Vec<MultiIndex> {
        let mut out: Vec<MultiIndex> = self.terms.iter().map(|t| t.alpha.clone()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Evaluates the sum. `g_derivs[ℓ-1]` is the d-vector `∂^ℓ g(x₀)`.
    pub fn evaluate<T: FdbScalar>(
        &self,
        h_derivs: &BTreeMap<MultiIndex, T>,
        g_derivs: &[Vec<T>],
    ) -> Result<T, CombinatoricsError> {
        self.evaluate_with(|alpha| h_derivs.get(alpha).cloned(), g_derivs)
    }

    /// As [`evaluate`](Self::evaluate) with `∂^α h` supplied by a lookup closure.
    pub fn evaluate_with<T: FdbScalar>(
        &self,
        h: impl Fn(&MultiIndex) -> Option<T>,
        g_derivs: &[Vec<T>],
    ) -> Result<T, CombinatoricsError> {
        if g_derivs.len() < self.n as usize {
            return Err(CombinatoricsError::MissingDerivative(format!(
                "need {} derivatives of g, got {}",
                self.n,
                g_derivs.len()
            )));
        }
        let mut total = T::zero();
        for term in &self.terms {
            let h_val = h(&term.alpha)
                .ok_or_else(|| CombinatoricsError::MissingDerivative(format!("h derivative {}", term.alpha)))?;
            let mut prod = T::from_rational(&term.weight) * h_val;
            for (l, k) in &term.factors {
                let g = &g_derivs[*l as usize - 1];
                for (axis, &e) in k.components().iter().enumerate() {
                    if e > 0 {
                        prod = prod * int_pow(&g[axis], e);
                    }
                }
            }
            total = total + prod;
        }
        Ok(total)
    }
}

/// `f⁽ⁿ⁾(x₀)` for `f = h∘g` with `g: ℝ → ℝᵈ`.
///
/// `h_derivs` must hold `(∂^α h)(g(x₀))` for every `1 ≤ |α| ≤ n`, and
/// `g_derivs[ℓ-1]` is the d-vector `g⁽ℓ⁾(x₀)` for `ℓ = 1..=n`.
pub fn faa_di_bruno_multi<T: FdbScalar>(
    h_derivs: &BTreeMap<MultiIndex, T>,
    g_derivs: &[Vec<T>],
    n: u32,
) -> Result<T, CombinatoricsError> {
    let dim = match g_derivs.first() {
        Some(g) => g.len(),
        None => return Err(CombinatoricsError::MissingDerivative("g derivatives".into())),
    };
    FaaDiBrunoPlan::new(n, dim).evaluate(h_derivs, g_derivs)
}
