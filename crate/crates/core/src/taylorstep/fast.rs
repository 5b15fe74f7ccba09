use rayon::prelude::*;

use super::{check_model, TaylorError, TrajectoryJets, FAST_MAX_ORDER};
use crate::dynamics::{pairwise_sum, Mat3, ModelSpec, ParticleState};
use crate::jets::{JetKernel, JetWorkspace};
use crate::kernelalg::{biot_savart_2d, regularize, sqg_kernel, strain_kernel_2d, KernelExpr, Model, TermSum};

/// Pair kernel on jets with the dynamics' regularization.
pub(super) fn pair_kernels(spec: &ModelSpec, with_strain: bool) -> Result<JetKernel, TaylorError> {
    let reg = |e: KernelExpr| -> Result<KernelExpr, TaylorError> {
        Ok(if spec.delta > 0.0 { regularize(&e, spec.delta)? } else { e })
    };
    let mut exprs = Vec::new();
    match spec.model {
        Model::Sqg => exprs.push(reg(sqg_kernel())?),
        _ => {
            exprs.push(reg(biot_savart_2d())?);
            if with_strain {
                exprs.push(reg(strain_kernel_2d())?);
            }
        }
    }
    let comps: Vec<&TermSum> = exprs.iter().flat_map(|e| e.components()).collect();
    Ok(JetKernel::new(2, &comps))
}

/// Jets by propagation: at order level `n` each pair kernel is expanded on
/// the displacement jet known to order `n`, giving velocity coefficient `n`
/// and hence position coefficient `n+1`. Gradient jets follow from
/// `dG/dt = (∇u)·G` by Cauchy products. Supports Euler2D, SQG and IPM.
pub fn time_jets_fast(spec: &ModelSpec, state: &ParticleState, order: usize) -> Result<TrajectoryJets, TaylorError> {
    check_model(spec.model)?;
    spec.validate(state)?;
    if order > FAST_MAX_ORDER {
        return Err(TaylorError::OrderTooLarge { order, max: FAST_MAX_ORDER });
    }
    let model = spec.model;
    let with_g = spec.gradients_needed();
    let kernel = pair_kernels(spec, with_g)?;
    let n_out = kernel.n_outputs();
    let np = state.len();
    let len = order + 1;

    let mut x: Vec<Vec<[f64; 3]>> = state.positions.iter().map(|p| vec![*p; 1]).collect();
    let mut g: Vec<Vec<Mat3>> = state.gradients.iter().map(|m| vec![*m; 1]).collect();
    let mut a_hist: Vec<Vec<Mat3>> = vec![Vec::with_capacity(len); np];

    for n in 0..order {
        let stride = n + 1;
        // source densities as jets to order n
        let dens: Vec<Vec<[f64; 3]>> = (0..np)
            .map(|j| {
                let w = state.weights[j];
                (0..=n)
                    .map(|k| match model {
                        Model::Euler2D => [if k == 0 { w * state.omega0[j][2] } else { 0.0 }, 0.0, 0.0],
                        Model::Ipm => {
                            let d = &state.grad_theta0[j];
                            let gk = &g[j][k];
                            [-w * (d[0] * gk[1][1] - d[1] * gk[1][0]), 0.0, 0.0]
                        }
                        _ => {
                            let d = &state.grad_theta0[j];
                            let gk = &g[j][k];
                            let theta = if k == 0 { w * state.theta0[j] } else { 0.0 };
                            if with_g {
                                [theta, w * (gk[1][1] * d[0] - gk[1][0] * d[1]), w * (-gk[0][1] * d[0] + gk[0][0] * d[1])]
                            } else {
                                [theta, 0.0, 0.0]
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        let x_ref = &x;
        let per_target: Vec<Result<[f64; 6], TaylorError>> = (0..np)
            .into_par_iter()
            .map_init(
                || (JetWorkspace::default(), vec![0.0; 2 * len], vec![0.0; n_out * len], Vec::new()),
                |(ws, y, out, contrib), i| {
                    contrib.clear();
                    for j in 0..np {
                        if j == i {
                            contrib.push([0.0; 6]);
                            continue;
                        }
                        for axis in 0..2 {
                            for k in 0..=n {
                                y[axis * stride + k] = x_ref[i][k][axis] - x_ref[j][k][axis];
                            }
                        }
                        if y[0] == 0.0 && y[stride] == 0.0 {
                            if spec.delta > 0.0 {
                                contrib.push([0.0; 6]);
                                continue;
                            }
                            return Err(TaylorError::SingularDisplacement);
                        }
                        kernel.eval_into(y, stride, n, ws, out);
                        contrib.push(pair_term(model, with_g, &dens[j], out, n));
                    }
                    Ok(pairwise_sum::<6, _>(np, &|j, acc| {
                        for (a, c) in acc.iter_mut().zip(&contrib[j]) {
                            *a += c;
                        }
                    }))
                },
            )
            .collect();
        let inv = 1.0 / (n + 1) as f64;
        for (i, r) in per_target.into_iter().enumerate() {
            let s = r?;
            x[i].push([s[0] * inv, s[1] * inv, 0.0]);
            if with_g {
                let mut a = [[s[2], s[3], 0.0], [s[4], s[5], 0.0], [0.0; 3]];
                let half_vort = match model {
                    Model::Euler2D if n == 0 => 0.5 * state.omega0[i][2],
                    Model::Ipm => {
                        let d = &state.grad_theta0[i];
                        let gn = &g[i][n];
                        -0.5 * (d[0] * gn[1][1] - d[1] * gn[1][0])
                    }
                    _ => 0.0,
                };
                a[0][1] -= half_vort;
                a[1][0] += half_vort;
                a_hist[i].push(a);
                let mut next = [[0.0; 3]; 3];
                for k in 0..=n {
                    let (ak, gk) = (&a_hist[i][k], &g[i][n - k]);
                    for r in 0..2 {
                        for c in 0..2 {
                            next[r][c] += ak[r][0] * gk[0][c] + ak[r][1] * gk[1][c];
                        }
                    }
                }
                for row in next.iter_mut().take(2) {
                    for v in row.iter_mut().take(2) {
                        *v *= inv;
                    }
                }
                g[i].push(next);
            }
        }
        if x.iter().any(|c| c[n + 1].iter().any(|v| !v.is_finite())) {
            return Err(TaylorError::NumericalFailure(format!("jet coefficient {}", n + 1)));
        }
    }
    Ok(TrajectoryJets { t0: state.t, order, dim: 2, x, g: with_g.then_some(g) })
}

/// Coefficient `n` of one source's contribution `[u₁, u₂, M₁₁, M₁₂, M₂₁, M₂₂]`.
/// `out` holds the kernel jets, component-major with stride `n+1`.
#[inline]
fn pair_term(model: Model, with_g: bool, dens: &[[f64; 3]], out: &[f64], n: usize) -> [f64; 6] {
    let len = n + 1;
    let comp = |c: usize, k: usize| out[c * len + k];
    let mut r = [0.0; 6];
    match model {
        Model::Sqg => {
            r[0] = dens[0][0] * comp(0, n);
            r[1] = dens[0][0] * comp(1, n);
            if with_g {
                for k in 0..=n {
                    let (k1, k2) = (comp(0, n - k), comp(1, n - k));
                    let (s1, s2) = (dens[k][1], dens[k][2]);
                    r[2] += k1 * s1;
                    r[3] += k1 * s2;
                    r[4] += k2 * s1;
                    r[5] += k2 * s2;
                }
            }
        }
        _ => {
            for k in 0..=n {
                let d = dens[k][0];
                if d == 0.0 {
                    continue;
                }
                let m = n - k;
                r[0] += d * comp(0, m);
                r[1] += d * comp(1, m);
                if with_g {
                    for c in 0..4 {
                        r[2 + c] += d * comp(2 + c, m);
                    }
                }
            }
        }
    }
    r
}
