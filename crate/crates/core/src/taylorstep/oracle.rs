use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::{TaylorError, TrajectoryJets};
use crate::combinatorics::{factorial, FaaDiBrunoPlan};
use crate::dynamics::{ModelSpec, ParticleState};
use crate::kernelalg::{regularize, sqg_kernel, biot_savart_2d, CompiledKernel, DerivativeTable, Model, TermSum};

pub const ORACLE_MAX_ORDER: usize = 8;
pub const ORACLE_MAX_PARTICLES: usize = 64;

/// Faà di Bruno plan with `f64` weights and `∂^α` resolved to table slots.
struct FlatPlan {
    terms: Vec<(usize, f64, Vec<(usize, [u32; 2])>)>,
}

impl FlatPlan {
    fn new(n: u32, table: &DerivativeTable) -> Self {
        let plan = FaaDiBrunoPlan::new(n, 2);
        let terms = plan
            .terms
            .iter()
            .map(|t| {
                let slot = table.alphas.iter().position(|a| *a == t.alpha).expect("table covers plan");
                let factors = t
                    .factors
                    .iter()
                    .map(|(l, k)| (*l as usize, [k.get(0), k.get(1)]))
                    .collect();
                (slot, t.weight.to_f64().unwrap_or(f64::NAN), factors)
            })
            .collect();
        Self { terms }
    }

    /// `Σ weight · ∂^α K · Π (y⁽ˡ⁾)^k`, component `c`; `dy[l-1]` is `y⁽ˡ⁾(0)`.
    fn eval(&self, derivs: &[f64], c: usize, dy: &[[f64; 2]]) -> f64 {
        let mut total = 0.0;
        for (slot, w, factors) in &self.terms {
            let mut p = w * derivs[2 * slot + c];
            for (l, k) in factors {
                let v = &dy[l - 1];
                p *= v[0].powi(k[0] as i32) * v[1].powi(k[1] as i32);
            }
            total += p;
        }
        total
    }
}

/// Jets from the multivariate Faà di Bruno formula with exact symbolic
/// kernel derivatives at the initial displacements. Positions only;
/// Euler2D and SQG, at most 64 particles and order 8.
pub fn time_jets_oracle(spec: &ModelSpec, state: &ParticleState, order: usize) -> Result<TrajectoryJets, TaylorError> {
    if !matches!(spec.model, Model::Euler2D | Model::Sqg) {
        return Err(TaylorError::UnsupportedModel(spec.model));
    }
    spec.validate(state)?;
    if order > ORACLE_MAX_ORDER {
        return Err(TaylorError::OrderTooLarge { order, max: ORACLE_MAX_ORDER });
    }
    let np = state.len();
    if np > ORACLE_MAX_PARTICLES {
        return Err(TaylorError::TooManyParticles { count: np, max: ORACLE_MAX_PARTICLES });
    }
    let base = if spec.model == Model::Sqg { sqg_kernel() } else { biot_savart_2d() };
    let kernel = if spec.delta > 0.0 { regularize(&base, spec.delta)? } else { base };
    let table = DerivativeTable::new(&kernel, order.saturating_sub(1) as u32);
    let comps: Vec<&TermSum> = table.exprs.iter().flat_map(|e| e.components()).collect();
    let compiled = CompiledKernel::new(2, &comps);
    let plans: Vec<FlatPlan> = (1..order as u32).map(|n| FlatPlan::new(n, &table)).collect();
    let density: Vec<f64> = (0..np)
        .map(|j| state.weights[j] * if spec.model == Model::Sqg { state.theta0[j] } else { state.omega0[j][2] })
        .collect();

    // exact derivatives at every initial displacement, row-major by pair
    let n_slots = compiled.n_outputs();
    let derivs: Vec<Option<Vec<f64>>> = (0..np * np)
        .into_par_iter()
        .map(|p| {
            let (i, j) = (p / np, p % np);
            let y = [state.positions[i][0] - state.positions[j][0], state.positions[i][1] - state.positions[j][1]];
            if i == j || (y[0] == 0.0 && y[1] == 0.0) {
                return None;
            }
            let mut out = vec![0.0; n_slots];
            compiled.eval_into(&y, &mut out);
            Some(out)
        })
        .collect();
    for (p, d) in derivs.iter().enumerate() {
        if d.is_none() && p / np != p % np && spec.delta == 0.0 {
            return Err(TaylorError::SingularDisplacement);
        }
    }

    let mut x: Vec<Vec<[f64; 3]>> = state.positions.iter().map(|p| vec![*p]).collect();
    for n in 0..order {
        let n_fact = factorial(n as u32).to_f64().unwrap_or(f64::INFINITY);
        let next: Vec<[f64; 3]> = (0..np)
            .map(|i| {
                let mut acc = [0.0; 2];
                for j in 0..np {
                    let Some(d) = &derivs[i * np + j] else { continue };
                    // y⁽ˡ⁾(0) = l!·(x_i[l] − x_j[l])
                    let dy: Vec<[f64; 2]> = (1..=n)
                        .map(|l| {
                            let f = factorial(l as u32).to_f64().unwrap_or(f64::INFINITY);
                            [f * (x[i][l][0] - x[j][l][0]), f * (x[i][l][1] - x[j][l][1])]
                        })
                        .collect();
                    for (c, a) in acc.iter_mut().enumerate() {
                        let dn = if n == 0 { d[c] } else { plans[n - 1].eval(d, c, &dy) };
                        *a += density[j] * dn / n_fact;
                    }
                }
                let inv = 1.0 / (n + 1) as f64;
                [acc[0] * inv, acc[1] * inv, 0.0]
            })
            .collect();
        for (xi, c) in x.iter_mut().zip(next) {
            xi.push(c);
        }
    }
    Ok(TrajectoryJets { t0: state.t, order, dim: 2, x, g: None })
}
