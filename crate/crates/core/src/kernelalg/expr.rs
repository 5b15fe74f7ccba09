use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::KernelError;
use crate::combinatorics::MultiIndex;

/// Identity of a term up to its rational coefficient:
/// `π^pi_power · y^monomial · |y|^{−radial_power} · e^{−gauss_rate·|y|²}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    pub pi_power: i32,
    pub gauss_rate: BigRational,
    pub radial_power: i32,
    pub monomial: MultiIndex,
}

/// One term `coeff · π^pi_power · y^β · |y|^{−p} · e^{−q|y|²}`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelTerm {
    pub coeff: BigRational,
    pub pi_power: i32,
    pub monomial: MultiIndex,
    pub radial_power: i32,
    pub gauss_rate: BigRational,
}

impl KernelTerm {
    pub fn new(coeff: BigRational, pi_power: i32, monomial: MultiIndex, radial_power: i32, gauss_rate: BigRational) -> Self {
        Self { coeff, pi_power, monomial, radial_power, gauss_rate }
    }

    fn key(&self) -> TermKey {
        TermKey {
            pi_power: self.pi_power,
            gauss_rate: self.gauss_rate.clone(),
            radial_power: self.radial_power,
            monomial: self.monomial.clone(),
        }
    }
}

/// A canonical sum of kernel terms in `d` variables.
///
/// Canonical form: equal keys are merged, zero coefficients dropped, and
/// the last coordinate appears with exponent at most one, using
/// `y_d² = |y|² − Σ_{i<d} y_i²`. Two sums are equal as functions of `y ≠ 0`
/// exactly when their canonical forms coincide.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TermSum {
    dim: usize,
    terms: BTreeMap<TermKey, BigRational>,
}

impl TermSum {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = KernelTerm>) -> Self {
        let mut out = Self::zero(dim);
        for t in terms {
            out.push(t);
        }
        out
    }

    /// The constant `c · π^pi_power`.
    pub fn constant(dim: usize, c: BigRational, pi_power: i32) -> Self {
        Self::from_terms(dim, [KernelTerm::new(c, pi_power, MultiIndex::zero(dim), 0, BigRational::zero())])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = KernelTerm> + '_ {
        self.terms.iter().map(|(k, c)| KernelTerm {
            coeff: c.clone(),
            pi_power: k.pi_power,
            monomial: k.monomial.clone(),
            radial_power: k.radial_power,
            gauss_rate: k.gauss_rate.clone(),
        })
    }

    /// Adds one term, reducing it to canonical form.
    pub fn push(&mut self, term: KernelTerm) {
        assert_eq!(term.monomial.dim(), self.dim, "term dimension mismatch");
        if term.coeff.is_zero() {
            return;
        }
        let last = self.dim - 1;
        if term.monomial.get(last) >= 2 {
            // y_d² → |y|² − Σ_{i<d} y_i²
            let mut base = term.monomial.components().to_vec();
            base[last] -= 2;
            let mut with_r = term.clone();
            with_r.monomial = MultiIndex::new(base.clone());
            with_r.radial_power -= 2;
            self.push(with_r);
            for i in 0..last {
                let mut m = base.clone();
                m[i] += 2;
                let mut t = term.clone();
                t.monomial = MultiIndex::new(m);
                t.coeff = -t.coeff;
                self.push(t);
            }
            return;
        }
        let key = term.key();
        let entry = self.terms.entry(key.clone()).or_insert_with(BigRational::zero);
        *entry += term.coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for t in other.terms() {
            out.push(t);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(-1)), 0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiplies by `c · π^pi_power`.
    pub fn scale(&self, c: &BigRational, pi_power: i32) -> Self {
        let mut out = Self::zero(self.dim);
        for mut t in self.terms() {
            t.coeff *= c;
            t.pi_power += pi_power;
            out.push(t);
        }
        out
    }

    /// Product of two sums.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "term dimension mismatch");
        let mut out = Self::zero(self.dim);
        for a in self.terms() {
            for b in other.terms() {
                out.push(KernelTerm {
                    coeff: &a.coeff * &b.coeff,
                    pi_power: a.pi_power + b.pi_power,
                    monomial: a.monomial.add(&b.monomial),
                    radial_power: a.radial_power + b.radial_power,
                    gauss_rate: &a.gauss_rate + &b.gauss_rate,
                });
            }
        }
        out
    }

    /// `∂/∂y_axis` (zero-based axis) by the product rule.
    pub fn derive(&self, axis: usize) -> Self {
        let mut out = Self::zero(self.dim);
        let two = BigRational::from_integer(BigInt::from(2));
        for t in self.terms() {
            let b = t.monomial.get(axis);
            if b > 0 {
                let mut m = t.monomial.components().to_vec();
                m[axis] -= 1;
                out.push(KernelTerm {
                    coeff: &t.coeff * BigRational::from_integer(BigInt::from(b)),
                    monomial: MultiIndex::new(m),
                    ..t.clone()
                });
            }
            if t.radial_power != 0 {
                out.push(KernelTerm {
                    coeff: &t.coeff * BigRational::from_integer(BigInt::from(-t.radial_power)),
                    monomial: t.monomial.bumped(axis),
                    radial_power: t.radial_power + 2,
                    ..t.clone()
                });
            }
            if !t.gauss_rate.is_zero() {
                out.push(KernelTerm {
                    coeff: -(&t.coeff * &two * &t.gauss_rate),
                    monomial: t.monomial.bumped(axis),
                    ..t.clone()
                });
            }
        }
        out
    }

    /// `∂^α` applied axis by axis.
    pub fn derive_multi(&self, alpha: &MultiIndex) -> Self {
        let mut out = self.clone();
        for (axis, &k) in alpha.components().iter().enumerate() {
            for _ in 0..k {
                out = out.derive(axis);
            }
        }
        out
    }

    /// Homogeneity degree when no term carries a Gaussian and all terms share it.
    pub fn homogeneity(&self) -> Option<i32> {
        let mut deg = None;
        for t in self.terms() {
            if !t.gauss_rate.is_zero() {
                return None;
            }
            let h = t.monomial.order() as i32 - t.radial_power;
            match deg {
                None => deg = Some(h),
                Some(d) if d != h => return None,
                _ => {}
            }
        }
        deg
    }

    /// True when every term is free of the Gaussian factor.
    pub fn is_gauss_free(&self) -> bool {
        self.terms.keys().all(|k| k.gauss_rate.is_zero())
    }

    /// Floating evaluation at `y ≠ 0` with Neumaier-compensated summation
    /// in canonical term order.
    pub fn evaluate(&self, y: &[f64]) -> Result<f64, KernelError> {
        check_point(y, self.dim)?;
        let r2: f64 = y.iter().map(|v| v * v).sum();
        let mut acc = Neumaier::default();
        for (k, c) in &self.terms {
            acc.add(term_value(k, c, y, r2));
        }
        Ok(acc.total())
    }
}

pub(crate) fn check_point(y: &[f64], dim: usize) -> Result<(), KernelError> {
    if y.len() != dim {
        return Err(KernelError::DimensionMismatch { expected: dim, got: y.len() });
    }
    if y.iter().all(|&v| v == 0.0) {
        return Err(KernelError::SingularEvaluation);
    }
    Ok(())
}

pub(crate) fn coeff_to_f64(c: &BigRational, pi_power: i32) -> f64 {
    c.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI.powi(pi_power)
}

/// `|y|^{−p}` from `|y|²`, using only a square root for odd `p`.
pub(crate) fn inv_radial(r2: f64, p: i32) -> f64 {
    if p % 2 == 0 {
        r2.powi(-p / 2)
    } else {
        r2.sqrt().powi(-p)
    }
}

fn term_value(k: &TermKey, c: &BigRational, y: &[f64], r2: f64) -> f64 {
    let mut v = coeff_to_f64(c, k.pi_power);
    for (yi, &e) in y.iter().zip(k.monomial.components()) {
        v *= yi.powi(e as i32);
    }
    v *= inv_radial(r2, k.radial_power);
    if !k.gauss_rate.is_zero() {
        v *= (-k.gauss_rate.to_f64().unwrap_or(f64::NAN) * r2).exp();
    }
    v
}

#[derive(Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

impl fmt::Display for TermSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
                write!(f, "{}", c.abs())?;
            } else {
                write!(f, "{c}")?;
            }
            if k.pi_power != 0 {
                write!(f, "·π^{}", k.pi_power)?;
            }
            for (axis, &e) in k.monomial.components().iter().enumerate() {
                if e > 0 {
                    write!(f, "·y{}^{}", axis + 1, e)?;
                }
            }
            if k.radial_power != 0 {
                write!(f, "·|y|^{}", -k.radial_power)?;
            }
            if !k.gauss_rate.is_zero() {
                write!(f, "·exp(-{}|y|²)", k.gauss_rate)?;
            }
        }
        Ok(())
    }
}

/// Layout of a kernel's components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Scalar,
    Vector,
    /// Row-major `d × d`.
    Matrix,
}

impl Shape {
    pub fn len(self, dim: usize) -> usize {
        match self {
            Shape::Scalar => 1,
            Shape::Vector => dim,
            Shape::Matrix => dim * dim,
        }
    }
}

/// A scalar, vector or matrix kernel whose components are [`TermSum`]s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelExpr {
    dim: usize,
    shape: Shape,
    comps: Vec<TermSum>,
}

impl KernelExpr {
    pub fn new(dim: usize, shape: Shape, comps: Vec<TermSum>) -> Result<Self, KernelError> {
        if !(1..=3).contains(&dim) {
            return Err(KernelError::UnsupportedDimension(dim));
        }
        if comps.len() != shape.len(dim) || comps.iter().any(|c| c.dim() != dim) {
            return Err(KernelError::ShapeMismatch);
        }
        Ok(Self { dim, shape, comps })
    }

    pub fn scalar(sum: TermSum) -> Self {
        Self { dim: sum.dim(), shape: Shape::Scalar, comps: vec![sum] }
    }

    pub fn vector(comps: Vec<TermSum>) -> Self {
        let dim = comps.len();
        Self::new(dim, Shape::Vector, comps).expect("vector components match dimension")
    }

    pub fn matrix(dim: usize, comps: Vec<TermSum>) -> Self {
        Self::new(dim, Shape::Matrix, comps).expect("matrix components match dimension")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn components(&self) -> &[TermSum] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(TermSum::is_zero)
    }

    pub fn term_count(&self) -> usize {
        self.comps.iter().map(TermSum::len).sum()
    }

    fn map(&self, f: impl Fn(&TermSum) -> TermSum) -> Self {
        Self { dim: self.dim, shape: self.shape, comps: self.comps.iter().map(f).collect() }
    }

    fn zip(&self, other: &Self, f: impl Fn(&TermSum, &TermSum) -> TermSum) -> Result<Self, KernelError> {
        if self.dim != other.dim || self.shape != other.shape {
            return Err(KernelError::ShapeMismatch);
        }
        Ok(Self {
            dim: self.dim,
            shape: self.shape,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, KernelError> {
        self.zip(other, TermSum::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, KernelError> {
        self.zip(other, TermSum::sub)
    }

    pub fn neg(&self) -> Self {
        self.map(TermSum::neg)
    }

    pub fn scale(&self, c: &BigRational, pi_power: i32) -> Self {
        self.map(|s| s.scale(c, pi_power))
    }

    /// Every component multiplied by the scalar sum `factor`.
    pub fn mul_scalar(&self, factor: &TermSum) -> Self {
        self.map(|s| s.mul(factor))
    }

    /// `∂/∂y_axis`, zero-based axis.
    pub fn derive(&self, axis: usize) -> Result<Self, KernelError> {
        if axis >= self.dim {
            return Err(KernelError::AxisOutOfRange { axis, dim: self.dim });
        }
        Ok(self.map(|s| s.derive(axis)))
    }

    pub fn derive_multi(&self, alpha: &MultiIndex) -> Self {
        self.map(|s| s.derive_multi(alpha))
    }

    /// Shared homogeneity degree of all nonzero components, if any.
    pub fn homogeneity(&self) -> Option<i32> {
        let mut deg = None;
        for c in self.comps.iter().filter(|c| !c.is_zero()) {
            let h = c.homogeneity()?;
            match deg {
                None => deg = Some(h),
                Some(d) if d != h => return None,
                _ => {}
            }
        }
        deg
    }

    /// Component values at `y ≠ 0` (row-major for matrices).
    pub fn evaluate(&self, y: &[f64]) -> Result<Vec<f64>, KernelError> {
        self.comps.iter().map(|c| c.evaluate(y)).collect()
    }
}

impl fmt::Display for KernelExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.comps.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}
