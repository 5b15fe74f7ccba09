use num_traits::{ToPrimitive, Zero};

use super::{cauchy_at, exp_into, pow_into_from, Jet, JetError, VectorJet};
use crate::kernelalg::{KernelExpr, TermSum};

const NO_RATE: u16 = u16::MAX;

/// Gaussian jets whose every coefficient is below `e^{−GAUSS_CUTOFF}` are
/// dropped; at order zero this is the blob cutoff of the pair sums.
const GAUSS_CUTOFF: f64 = 40.0;

#[derive(Clone, Debug)]
struct Group {
    out: usize,
    factor: usize,
    entries: Vec<(usize, f64)>,
}

/// A kernel compiled for evaluation on displacement jets.
///
/// `|y|²` is expanded once, each distinct `|y|^{−p}` and `e^{−q|y|²}` once,
/// each distinct monomial once, and terms sharing an output and a radial
/// factor are summed before the single Cauchy product with that factor.
#[derive(Clone, Debug)]
pub struct JetKernel {
    dim: usize,
    n_out: usize,
    radial: Vec<i32>,
    rates: Vec<f64>,
    factors: Vec<(usize, u16)>,
    monos: Vec<[u8; 3]>,
    groups: Vec<Group>,
    max_pow: [usize; 3],
}

/// Scratch buffers for [`JetKernel::eval_into`], reusable across calls.
#[derive(Clone, Debug, Default)]
pub struct JetWorkspace {
    s: Vec<f64>,
    u: Vec<f64>,
    rad: Vec<f64>,
    gau: Vec<f64>,
    live: Vec<bool>,
    fac: Vec<f64>,
    pw: Vec<f64>,
    mono: Vec<f64>,
    acc: Vec<f64>,
    shape: (usize, usize, usize, usize, usize, usize),
}

impl JetWorkspace {
    fn prepare(&mut self, k: &JetKernel, len: usize, maxp: usize) {
        let shape = (len, k.radial.len(), k.rates.len(), k.factors.len(), k.monos.len(), maxp);
        if self.shape == shape {
            return;
        }
        self.shape = shape;
        self.s.resize(len, 0.0);
        self.u.resize(len, 0.0);
        self.rad.resize(shape.1 * len, 0.0);
        self.gau.resize(shape.2 * len, 0.0);
        self.live.resize(shape.2, false);
        self.fac.resize(shape.3 * len, 0.0);
        self.mono.resize(shape.4 * len, 0.0);
        self.pw.resize(3 * (maxp + 1) * len, 0.0);
        self.acc.resize(len, 0.0);
    }
}

fn index_of<T: PartialEq + Copy>(v: &mut Vec<T>, x: T) -> usize {
    match v.iter().position(|&y| y == x) {
        Some(i) => i,
        None => {
            v.push(x);
            v.len() - 1
        }
    }
}

impl JetKernel {
    pub fn new(dim: usize, comps: &[&TermSum]) -> Self {
        assert!((1..=3).contains(&dim), "jet kernels support d ≤ 3");
        let mut radial = Vec::new();
        let mut rates: Vec<f64> = Vec::new();
        let mut factors = Vec::new();
        let mut monos = Vec::new();
        let mut groups: Vec<Group> = Vec::new();
        let mut max_pow = [0usize; 3];
        for (out, sum) in comps.iter().enumerate() {
            assert_eq!(sum.dim(), dim, "component dimension mismatch");
            for t in sum.terms() {
                let r = index_of(&mut radial, t.radial_power);
                let q = if t.gauss_rate.is_zero() {
                    NO_RATE
                } else {
                    index_of(&mut rates, t.gauss_rate.to_f64().unwrap_or(f64::NAN)) as u16
                };
                let factor = index_of(&mut factors, (r, q));
                let mut m = [0u8; 3];
                for (axis, &e) in t.monomial.components().iter().enumerate() {
                    m[axis] = u8::try_from(e).expect("monomial degree too large");
                    max_pow[axis] = max_pow[axis].max(e as usize);
                }
                let mono = index_of(&mut monos, m);
                let coeff = crate::kernelalg::coeff_to_f64(&t.coeff, t.pi_power);
                match groups.iter_mut().find(|g| g.out == out && g.factor == factor) {
                    Some(g) => g.entries.push((mono, coeff)),
                    None => groups.push(Group { out, factor, entries: vec![(mono, coeff)] }),
                }
            }
        }
        Self { dim, n_out: comps.len(), radial, rates, factors, monos, groups, max_pow }
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

    /// Fills `out[o·(order+1) + k]` with coefficient `k` of output `o`.
    ///
    /// `y[axis·stride + k]` holds coefficient `k` of displacement component
    /// `axis`, for `k ≤ order ≤ stride − 1`. The caller guarantees `y(0) ≠ 0`.
    pub fn eval_into(&self, y: &[f64], stride: usize, order: usize, ws: &mut JetWorkspace, out: &mut [f64]) {
        let len = order + 1;
        let d = self.dim;
        let ycoef = |axis: usize| &y[axis * stride..axis * stride + len];

        let maxp = self.max_pow.iter().copied().max().unwrap_or(0);
        ws.prepare(self, len, maxp);
        ws.s.fill(0.0);
        for axis in 0..d {
            let c = ycoef(axis);
            for n in 0..len {
                ws.s[n] += cauchy_at(c, c, n);
            }
        }

        for (i, &p) in self.radial.iter().enumerate() {
            let slot = &mut ws.rad[i * len..(i + 1) * len];
            if p == 0 {
                slot.fill(0.0);
                slot[0] = 1.0;
            } else {
                radial_pow_into(&ws.s, p, slot);
            }
        }

        // |e^{−q s(t)}|_n ≤ e^{−q(s₀ − Σ_{k≥1}|s_k|)} by majorants
        let spread: f64 = ws.s[1..].iter().map(|v| v.abs()).sum();
        for (i, &q) in self.rates.iter().enumerate() {
            ws.live[i] = q * (ws.s[0] - spread) <= GAUSS_CUTOFF;
            if !ws.live[i] {
                continue;
            }
            for n in 0..len {
                ws.u[n] = -q * ws.s[n];
            }
            exp_into(&ws.u, &mut ws.gau[i * len..(i + 1) * len]);
        }

        for (i, &(r, q)) in self.factors.iter().enumerate() {
            let rad = &ws.rad[r * len..(r + 1) * len];
            let slot = &mut ws.fac[i * len..(i + 1) * len];
            if q == NO_RATE {
                slot.copy_from_slice(rad);
            } else if ws.live[q as usize] {
                let g = &ws.gau[q as usize * len..(q as usize + 1) * len];
                for n in 0..len {
                    slot[n] = cauchy_at(rad, g, n);
                }
            }
        }

        // pw[(axis·(maxp+1) + k)·len ..] = y_axis^k
        for axis in 0..d {
            let base = axis * (maxp + 1);
            {
                let p0 = &mut ws.pw[base * len..(base + 1) * len];
                p0.fill(0.0);
                p0[0] = 1.0;
            }
            for k in 1..=self.max_pow[axis] {
                let (lo, hi) = ws.pw.split_at_mut((base + k) * len);
                let prev = &lo[(base + k - 1) * len..];
                let c = ycoef(axis);
                for n in 0..len {
                    hi[n] = cauchy_at(prev, c, n);
                }
            }
        }

        for (i, m) in self.monos.iter().enumerate() {
            let mut first = true;
            let slot_range = i * len..(i + 1) * len;
            for axis in 0..d {
                let e = m[axis] as usize;
                if e == 0 {
                    continue;
                }
                let src = (axis * (maxp + 1) + e) * len;
                if first {
                    ws.mono[slot_range.clone()].copy_from_slice(&ws.pw[src..src + len]);
                    first = false;
                } else {
                    {
                        let cur = &ws.mono[slot_range.clone()];
                        let p = &ws.pw[src..src + len];
                        for n in 0..len {
                            ws.acc[n] = cauchy_at(cur, p, n);
                        }
                    }
                    ws.mono[slot_range.clone()].copy_from_slice(&ws.acc[..len]);
                }
            }
            if first {
                let slot = &mut ws.mono[slot_range];
                slot.fill(0.0);
                slot[0] = 1.0;
            }
        }

        out[..self.n_out * len].fill(0.0);
        for g in &self.groups {
            let q = self.factors[g.factor].1;
            if q != NO_RATE && !ws.live[q as usize] {
                continue;
            }
            ws.acc[..len].fill(0.0);
            for &(m, c) in &g.entries {
                let mj = &ws.mono[m * len..(m + 1) * len];
                for n in 0..len {
                    ws.acc[n] += c * mj[n];
                }
            }
            let f = &ws.fac[g.factor * len..(g.factor + 1) * len];
            let o = &mut out[g.out * len..(g.out + 1) * len];
            for n in 0..len {
                o[n] += cauchy_at(&ws.acc, f, n);
            }
        }
    }
}

/// `s^{−p/2}` on a jet, without `powf` for the leading coefficient.
fn radial_pow_into(s: &[f64], p: i32, out: &mut [f64]) {
    let inv = 1.0 / s[0];
    let mut lead = inv.powi(p / 2);
    if p % 2 != 0 {
        lead *= if p > 0 { inv.sqrt() } else { s[0].sqrt() };
    }
    pow_into_from(s, -0.5 * p as f64, lead, out);
}

/// Taylor coefficients of `t ↦ K(y(t))`, one scalar jet per component of
/// `expr` (row-major for matrices).
pub fn kernel_on_jet(expr: &KernelExpr, y: &VectorJet) -> Result<Vec<Jet>, JetError> {
    if y.dim() != expr.dim() {
        return Err(crate::kernelalg::KernelError::DimensionMismatch { expected: expr.dim(), got: y.dim() }.into());
    }
    if y.coeff_norm(0) == 0.0 {
        return Err(JetError::SingularDisplacement);
    }
    let order = y.order();
    let len = order + 1;
    let flat: Vec<f64> = y.components().iter().flat_map(|c| c.coeffs().iter().copied()).collect();
    let k = JetKernel::from_expr(expr);
    let mut out = vec![0.0; k.n_outputs() * len];
    k.eval_into(&flat, len, order, &mut JetWorkspace::default(), &mut out);
    Ok(out.chunks(len).map(|c| Jet::new(c.to_vec())).collect())
}
