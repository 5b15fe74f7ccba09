use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::compiled::CompiledKernel;
use super::expr::{check_point, KernelExpr};
use super::KernelError;
use crate::combinatorics::MultiIndex;

/// `∂^α expr` for every `|α| ≤ max_order`, built by one derivation per entry
/// from its parent index.
#[derive(Clone, Debug)]
pub struct DerivativeTable {
    pub alphas: Vec<MultiIndex>,
    pub exprs: Vec<KernelExpr>,
}

impl DerivativeTable {
    pub fn new(expr: &KernelExpr, max_order: u32) -> Self {
        let alphas = MultiIndex::up_to_order(expr.dim(), max_order);
        let mut exprs: Vec<KernelExpr> = Vec::with_capacity(alphas.len());
        for alpha in &alphas {
            let e = match alpha.first_nonzero_axis() {
                None => expr.clone(),
                Some(axis) => {
                    let mut parent = alpha.components().to_vec();
                    parent[axis] -= 1;
                    let parent = MultiIndex::new(parent);
                    let idx = alphas.iter().position(|a| *a == parent).expect("parent precedes child");
                    exprs[idx].derive(axis).expect("axis within dimension")
                }
            };
            exprs.push(e);
        }
        Self { alphas, exprs }
    }

    pub fn get(&self, alpha: &MultiIndex) -> Option<&KernelExpr> {
        self.alphas.iter().position(|a| a == alpha).map(|i| &self.exprs[i])
    }
}

/// Which form of the derivative bound to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `c^|α| |α|! |y|^{−(|α|+offset)} e^{−|y|²/2}`.
    Inner,
    /// `c^|α| |α|! |y|^{−(|α|+offset)}`.
    Outer,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderReport {
    pub order: u32,
    pub worst_ratio: f64,
    pub worst_alpha: String,
    pub worst_sample: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub c_k: f64,
    pub power_offset: i32,
    pub per_order: Vec<OrderReport>,
    pub worst_ratio: f64,
    pub pass: bool,
}

fn bound(kind: BoundKind, c_k: f64, order: u32, offset: i32, r: f64) -> f64 {
    let fact: f64 = (1..=order).map(f64::from).product();
    let mut b = c_k.powi(order as i32) * fact * r.powi(-(order as i32 + offset));
    if kind == BoundKind::Inner {
        b *= (-r * r / 2.0).exp();
    }
    b
}

/// Checks `|∂^α expr(y)| ≤ bound` for all `|α| ≤ max_order` and all samples,
/// using exact derivatives. `|·|` is the Euclidean (Frobenius) norm over
/// components. Reports the worst ratio per order.
pub fn verify_derivative_bound(
    expr: &KernelExpr,
    c_k: f64,
    power_offset: i32,
    max_order: u32,
    samples: &[Vec<f64>],
    kind: BoundKind,
) -> Result<BoundReport, KernelError> {
    if max_order > 6 {
        return Err(KernelError::OrderTooLarge(max_order));
    }
    for y in samples {
        check_point(y, expr.dim())?;
    }
    let table = DerivativeTable::new(expr, max_order);
    let compiled: Vec<CompiledKernel> = table.exprs.iter().map(CompiledKernel::from_expr).collect();
    let n_out = expr.components().len();

    let mut per_order = Vec::new();
    for order in 0..=max_order {
        let idxs: Vec<usize> = (0..table.alphas.len()).filter(|&i| table.alphas[i].order() == order).collect();
        // (ratio, sample index, alpha index); ties resolved by lowest indices.
        let worst = samples
            .par_iter()
            .enumerate()
            .map(|(s, y)| {
                let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                let b = bound(kind, c_k, order, power_offset, r);
                let mut buf = vec![0.0; n_out];
                let mut best = (f64::NEG_INFINITY, s, 0usize);
                for &i in &idxs {
                    compiled[i].eval_into(y, &mut buf);
                    let norm = buf.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let ratio = norm / b;
                    if ratio > best.0 {
                        best = (ratio, s, i);
                    }
                }
                best
            })
            .reduce(
                || (f64::NEG_INFINITY, usize::MAX, usize::MAX),
                |a, b| {
                    if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
                        b
                    } else {
                        a
                    }
                },
            );
        let (ratio, s, i) = worst;
        per_order.push(OrderReport {
            order,
            worst_ratio: ratio,
            worst_alpha: table.alphas.get(i).map(|a| a.to_string()).unwrap_or_default(),
            worst_sample: samples.get(s).cloned().unwrap_or_default(),
        });
    }
    let worst_ratio = per_order.iter().map(|o| o.worst_ratio).fold(f64::NEG_INFINITY, f64::max);
    Ok(BoundReport {
        kind,
        c_k,
        power_offset,
        pass: worst_ratio <= 1.0,
        per_order,
        worst_ratio,
    })
}

/// Points with log-uniform radius in `[r_min, r_max]` and uniform direction.
pub fn log_uniform_samples(dim: usize, n: usize, r_min: f64, r_max: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (r_min.ln(), r_max.ln());
    (0..n)
        .map(|_| {
            let r = rng.gen_range(lo..=hi).exp();
            let phi = rng.gen_range(0.0..2.0 * PI);
            match dim {
                2 => vec![r * phi.cos(), r * phi.sin()],
                3 => {
                    let z: f64 = rng.gen_range(-1.0..=1.0);
                    let s = (1.0 - z * z).max(0.0).sqrt();
                    vec![r * s * phi.cos(), r * s * phi.sin(), r * z]
                }
                _ => vec![r; dim],
            }
        })
        .collect()
}

/// Mean of each component over the circle (2D) or sphere (3D) of `radius`.
///
/// 2D uses the `quad_points`-point trapezoid rule in angle. 3D uses a tensor
/// rule: trapezoid in longitude and Gauss–Legendre in `cos θ`, with
/// `quad_points` nodes in each direction.
pub fn circle_mean(expr: &KernelExpr, radius: f64, quad_points: usize) -> Result<Vec<f64>, KernelError> {
    if !(radius > 0.0) || quad_points < 8 {
        return Err(KernelError::InvalidQuadrature { radius, quad_points });
    }
    let compiled = CompiledKernel::from_expr(expr);
    let n_out = compiled.n_outputs();
    let mut sum = vec![0.0; n_out];
    let mut buf = vec![0.0; n_out];
    let mut total_weight = 0.0;
    let mut visit = |y: &[f64], w: f64| {
        compiled.eval_into(y, &mut buf);
        for (s, v) in sum.iter_mut().zip(&buf) {
            *s += w * v;
        }
        total_weight += w;
    };
    match expr.dim() {
        2 => {
            for k in 0..quad_points {
                let phi = 2.0 * PI * k as f64 / quad_points as f64;
                visit(&[radius * phi.cos(), radius * phi.sin()], 1.0);
            }
        }
        3 => {
            for (z, wz) in gauss_legendre(quad_points) {
                let s = (1.0 - z * z).sqrt();
                for k in 0..quad_points {
                    let phi = 2.0 * PI * k as f64 / quad_points as f64;
                    visit(&[radius * s * phi.cos(), radius * s * phi.sin(), radius * z], wz);
                }
            }
        }
        d => return Err(KernelError::UnsupportedDimension(d)),
    }
    Ok(sum.into_iter().map(|s| s / total_weight).collect())
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 0 { 0.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}
