//! Truncated Taylor series in one variable ("jets").
//!
//! Coefficients are normalized: `coeffs[n] = f⁽ⁿ⁾(t₀)/n!`. Arithmetic never
//! reads past the jet's order.

mod kernel;

pub use kernel::{kernel_on_jet, JetKernel, JetWorkspace};

use crate::kernelalg::KernelError;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum JetError {
    #[error("jet orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("power of a jet with non-positive constant term {0}")]
    NonPositiveBase(f64),
    #[error("kernel evaluated on a zero displacement")]
    SingularDisplacement,
    #[error("vector jet has no components")]
    Empty,
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// A scalar jet of order `coeffs.len() − 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    coeffs: Vec<f64>,
}

impl Jet {
    /// Panics on an empty coefficient list.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![0.0; order + 1] }
    }

    pub fn constant(c: f64, order: usize) -> Self {
        let mut j = Self::zero(order);
        j.coeffs[0] = c;
        j
    }

    /// The jet of `t ↦ t₀ + t`.
    pub fn variable(t0: f64, order: usize) -> Self {
        let mut j = Self::constant(t0, order);
        if order >= 1 {
            j.coeffs[1] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    fn check(&self, other: &Self) -> Result<(), JetError> {
        if self.order() != other.order() {
            return Err(JetError::OrderMismatch(self.order(), other.order()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, JetError> {
        self.check(other)?;
        Ok(Self::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, JetError> {
        self.check(other)?;
        Ok(Self::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect()))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self, JetError> {
        self.check(other)?;
        let mut out = vec![0.0; self.coeffs.len()];
        cauchy_into(&self.coeffs, &other.coeffs, &mut out);
        Ok(Self::new(out))
    }

    /// `u^exponent` for `u₀ > 0`.
    pub fn pow_real(&self, exponent: f64) -> Result<Self, JetError> {
        if !(self.coeffs[0] > 0.0) {
            return Err(JetError::NonPositiveBase(self.coeffs[0]));
        }
        let mut out = vec![0.0; self.coeffs.len()];
        pow_into(&self.coeffs, exponent, &mut out);
        Ok(Self::new(out))
    }

    /// `e^u`.
    pub fn exp(&self) -> Self {
        let mut out = vec![0.0; self.coeffs.len()];
        exp_into(&self.coeffs, &mut out);
        Self::new(out)
    }

    /// Value of the truncated series at offset `h` (Horner).
    pub fn eval(&self, h: f64) -> f64 {
        horner(&self.coeffs, h)
    }

    /// The jet of `f′`, one order lower.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero(0);
        }
        Self::new(self.coeffs[1..].iter().enumerate().map(|(k, c)| c * (k + 1) as f64).collect())
    }

    /// The jet of `∫f` with constant term `c0`, one order higher.
    pub fn integrate(&self, c0: f64) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(c0);
        out.extend(self.coeffs.iter().enumerate().map(|(k, c)| c / (k + 1) as f64));
        Self::new(out)
    }
}

/// `out[n] = Σ_{k≤n} a_k b_{n−k}` for `n < out.len()`.
#[inline]
pub(crate) fn cauchy_into(a: &[f64], b: &[f64], out: &mut [f64]) {
    for n in 0..out.len() {
        out[n] = cauchy_at(a, b, n);
    }
}

#[inline]
pub(crate) fn cauchy_at(a: &[f64], b: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for k in 0..=n {
        s += a[k] * b[n - k];
    }
    s
}

/// `n·u₀·w_n = Σ_{k=1}^{n} ((e+1)k − n) u_k w_{n−k}`, `w₀ = u₀^e`.
#[inline]
pub(crate) fn pow_into(u: &[f64], e: f64, out: &mut [f64]) {
    pow_into_from(u, e, u[0].powf(e), out);
}

/// [`pow_into`] with a precomputed `w₀`.
#[inline]
pub(crate) fn pow_into_from(u: &[f64], e: f64, lead: f64, out: &mut [f64]) {
    out[0] = lead;
    let inv_u0 = 1.0 / u[0];
    for n in 1..out.len() {
        let mut s = 0.0;
        for k in 1..=n {
            s += ((e + 1.0) * k as f64 - n as f64) * u[k] * out[n - k];
        }
        out[n] = s * inv_u0 / n as f64;
    }
}

/// `n·w_n = Σ_{k=1}^{n} k u_k w_{n−k}`, `w₀ = e^{u₀}`.
#[inline]
pub(crate) fn exp_into(u: &[f64], out: &mut [f64]) {
    out[0] = u[0].exp();
    for n in 1..out.len() {
        let mut s = 0.0;
        for k in 1..=n {
            s += k as f64 * u[k] * out[n - k];
        }
        out[n] = s / n as f64;
    }
}

/// Horner evaluation of `Σ c_n hⁿ`.
#[inline]
pub fn horner(c: &[f64], h: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * h + v)
}

/// A jet with vector coefficients, stored component by component.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorJet {
    comps: Vec<Jet>,
}

impl VectorJet {
    pub fn new(comps: Vec<Jet>) -> Result<Self, JetError> {
        let first = comps.first().ok_or(JetError::Empty)?;
        for c in &comps[1..] {
            first.check(c)?;
        }
        Ok(Self { comps })
    }

    /// Constant vector jet.
    pub fn constant(v: &[f64], order: usize) -> Self {
        Self { comps: v.iter().map(|&x| Jet::constant(x, order)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn order(&self) -> usize {
        self.comps[0].order()
    }

    pub fn components(&self) -> &[Jet] {
        &self.comps
    }

    /// Coefficient `n` as a d-vector.
    pub fn coeff(&self, n: usize) -> Vec<f64> {
        self.comps.iter().map(|c| c.coeffs()[n]).collect()
    }

    /// Euclidean norm of coefficient `n`.
    pub fn coeff_norm(&self, n: usize) -> f64 {
        self.comps.iter().map(|c| c.coeffs()[n] * c.coeffs()[n]).sum::<f64>().sqrt()
    }

    pub fn eval(&self, h: f64) -> Vec<f64> {
        self.comps.iter().map(|c| c.eval(h)).collect()
    }

    pub fn sub(&self, other: &Self) -> Result<Self, JetError> {
        if self.dim() != other.dim() {
            return Err(JetError::OrderMismatch(self.dim(), other.dim()));
        }
        Self::new(self.comps.iter().zip(&other.comps).map(|(a, b)| a.sub(b)).collect::<Result<_, _>>()?)
    }
}

pub fn jet_add(a: &Jet, b: &Jet) -> Result<Jet, JetError> {
    a.add(b)
}

pub fn jet_scale(a: &Jet, c: f64) -> Jet {
    a.scale(c)
}

pub fn jet_mul(a: &Jet, b: &Jet) -> Result<Jet, JetError> {
    a.mul(b)
}

/// `Σ_i v_i²` via Cauchy products.
pub fn jet_norm_sq(v: &VectorJet) -> Jet {
    let mut out = vec![0.0; v.order() + 1];
    for c in v.components() {
        for (n, o) in out.iter_mut().enumerate() {
            *o += cauchy_at(c.coeffs(), c.coeffs(), n);
        }
    }
    Jet::new(out)
}

pub fn jet_pow_real(u: &Jet, exponent: f64) -> Result<Jet, JetError> {
    u.pow_real(exponent)
}

pub fn jet_exp(u: &Jet) -> Jet {
    u.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_one_plus_and_minus_t() {
        let a = Jet::new(vec![1.0, 1.0, 0.0]);
        let b = Jet::new(vec![1.0, -1.0, 0.0]);
        assert_eq!(a.mul(&b).unwrap().coeffs(), &[1.0, 0.0, -1.0]);
        assert_eq!(a.scale(0.0), Jet::zero(2));
        assert!(a.mul(&Jet::zero(3)).is_err());
    }

    #[test]
    fn norm_sq_examples() {
        let v = VectorJet::new(vec![Jet::new(vec![0.0, 1.0, 0.0]), Jet::zero(2)]).unwrap();
        assert_eq!(jet_norm_sq(&v).coeffs(), &[0.0, 0.0, 1.0]);
        let c = VectorJet::constant(&[3.0, 4.0], 2);
        assert_eq!(jet_norm_sq(&c).coeffs(), &[25.0, 0.0, 0.0]);
    }

    #[test]
    fn pow_examples() {
        let u = Jet::new(vec![1.0, 1.0, 0.0]);
        assert_eq!(u.pow_real(-0.5).unwrap().coeffs(), &[1.0, -0.5, 0.375]);
        assert_eq!(u.pow_real(1.0).unwrap(), u);
        assert!(Jet::new(vec![0.0, 1.0]).pow_real(0.5).is_err());
    }

    #[test]
    fn exp_examples() {
        let t = Jet::variable(0.0, 3);
        let e = t.exp();
        let want = [1.0, 1.0, 0.5, 1.0 / 6.0];
        for (a, b) in e.coeffs().iter().zip(want) {
            assert!((a - b).abs() < 1e-16);
        }
        assert_eq!(Jet::zero(4).exp(), Jet::constant(1.0, 4));
    }

    #[test]
    fn derivative_and_integral_round_trip() {
        let j = Jet::new(vec![2.0, 3.0, 5.0, 7.0]);
        let back = j.derivative().integrate(2.0);
        assert_eq!(back, j);
    }
}
