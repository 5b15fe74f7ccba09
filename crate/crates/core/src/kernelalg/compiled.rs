use num_traits::{ToPrimitive, Zero};

use super::expr::{coeff_to_f64, inv_radial, KernelExpr, TermSum};

const MAX_FACTORS: usize = 32;
const MAX_DEGREE: usize = 16;
const NO_RATE: u16 = u16::MAX;

#[derive(Clone, Debug)]
struct CompiledTerm {
    out: u32,
    coeff: f64,
    mono: [u8; 3],
    radial: u16,
    rate: u16,
}

/// Floating-point form of a list of term sums, evaluated together so that
/// `|y|^{−p}` and Gaussian factors are computed once per point.
#[derive(Clone, Debug)]
pub struct CompiledKernel {
    dim: usize,
    n_out: usize,
    terms: Vec<CompiledTerm>,
    radial: Vec<i32>,
    rates: Vec<f64>,
    max_pow: [usize; 3],
}

impl CompiledKernel {
    pub fn new(dim: usize, comps: &[&TermSum]) -> Self {
        let mut radial: Vec<i32> = Vec::new();
        let mut rates: Vec<f64> = Vec::new();
        let mut terms = Vec::new();
        let mut max_pow = [0usize; 3];
        for (out, sum) in comps.iter().enumerate() {
            assert_eq!(sum.dim(), dim, "component dimension mismatch");
            for t in sum.terms() {
                let r_idx = match radial.iter().position(|&p| p == t.radial_power) {
                    Some(i) => i,
                    None => {
                        radial.push(t.radial_power);
                        radial.len() - 1
                    }
                };
                let rate_idx = if t.gauss_rate.is_zero() {
                    NO_RATE
                } else {
                    let q = t.gauss_rate.to_f64().unwrap_or(f64::NAN);
                    match rates.iter().position(|&r| r == q) {
                        Some(i) => i as u16,
                        None => {
                            rates.push(q);
                            (rates.len() - 1) as u16
                        }
                    }
                };
                let mut mono = [0u8; 3];
                for (axis, &e) in t.monomial.components().iter().enumerate() {
                    assert!((e as usize) < MAX_DEGREE, "monomial degree too large to compile");
                    mono[axis] = e as u8;
                    max_pow[axis] = max_pow[axis].max(e as usize);
                }
                terms.push(CompiledTerm {
                    out: out as u32,
                    coeff: coeff_to_f64(&t.coeff, t.pi_power),
                    mono,
                    radial: r_idx as u16,
                    rate: rate_idx,
                });
            }
        }
        assert!(radial.len() <= MAX_FACTORS && rates.len() <= MAX_FACTORS, "too many distinct factors");
        Self { dim, n_out: comps.len(), terms, radial, rates, max_pow }
    }

    pub fn from_expr(expr: &KernelExpr) -> Self {
        let comps: Vec<&TermSum> = expr.components().iter().collect();
        Self::new(expr.dim(), &comps)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_outputs(&self) -> usize {
        self.n_out
    }

    /// Writes every component at `y` into `out` (length `n_outputs`).
    /// The caller guarantees `y ≠ 0`.
    #[inline]
    pub fn eval_into(&self, y: &[f64], out: &mut [f64]) {
        let r2: f64 = y[..self.dim].iter().map(|v| v * v).sum();
        let mut rad = [0.0f64; MAX_FACTORS];
        for (slot, &p) in rad.iter_mut().zip(&self.radial) {
            *slot = inv_radial(r2, p);
        }
        let mut gau = [0.0f64; MAX_FACTORS];
        for (slot, &q) in gau.iter_mut().zip(&self.rates) {
            *slot = (-q * r2).exp();
        }
        let mut pw = [[1.0f64; MAX_DEGREE]; 3];
        for axis in 0..self.dim {
            for k in 1..=self.max_pow[axis] {
                pw[axis][k] = pw[axis][k - 1] * y[axis];
            }
        }
        for o in out[..self.n_out].iter_mut() {
            *o = 0.0;
        }
        for t in &self.terms {
            let mut v = t.coeff * rad[t.radial as usize];
            if t.rate != NO_RATE {
                v *= gau[t.rate as usize];
            }
            for axis in 0..self.dim {
                v *= pw[axis][t.mono[axis] as usize];
            }
            out[t.out as usize] += v;
        }
    }
}
