use std::f64::consts::PI;

use rayon::prelude::*;

use super::sum::pairwise_sum;
use super::{mat_mul, mat_vec, DynamicsError, Mat3, ModelSpec, ParticleState, Vec3};
use crate::kernelalg::Model;

/// Right-hand side of the particle ODE at one state.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivatives {
    pub velocity: Vec<Vec3>,
    /// `∇u` along each path: nonlocal kernel sum plus the local rotation.
    pub grad_u: Vec<Mat3>,
    /// `dG/dt = (∇u)·G`.
    pub dgrad: Vec<Mat3>,
    /// Boussinesq `dW/dt = {θ₀, X₂}`; zero for other models.
    pub dw: Vec<f64>,
}

/// `(∂₁f)(∂₂g) − (∂₂f)(∂₁g)`.
pub fn poisson_bracket(f_grad: [f64; 2], g_grad: [f64; 2]) -> f64 {
    f_grad[0] * g_grad[1] - f_grad[1] * g_grad[0]
}

/// `{θ₀, X₂}` at particle `i`: `∇_a X₂` is the second row of `G`.
fn bracket_theta_x2(state: &ParticleState, i: usize) -> f64 {
    let g = &state.grad_theta0[i];
    let row = &state.gradients[i][1];
    poisson_bracket([g[0], g[1]], [row[0], row[1]])
}

/// Lagrangian vorticity of 2D vortex-type models.
fn vorticity_2d(model: Model, state: &ParticleState, i: usize) -> f64 {
    match model {
        Model::Euler2D => state.omega0[i][2],
        Model::Boussinesq2D => state.omega0[i][2] + state.w_acc[i],
        Model::Ipm => -bracket_theta_x2(state, i),
        _ => unreachable!("not a vortex-type model"),
    }
}

/// `1 − e^{−r²/δ²}`; exactly 1 once the exponential is below half an ulp.
#[inline(always)]
fn blob(r2: f64, inv_d2: f64) -> f64 {
    let x = r2 * inv_d2;
    if x > 40.0 {
        1.0
    } else {
        -(-x).exp_m1()
    }
}

/// Pair sources packed for cache-friendly sweeps.
enum Sources {
    /// `[x₁, x₂, wω]`
    Vortex2D(Vec<[f64; 3]>),
    /// `[x₁, x₂, wθ₀, wσ₁, wσ₂]` with `σ = cof(G)∇θ₀`.
    Sqg(Vec<[f64; 5]>),
    /// `[x₁, x₂, x₃, wGω₀]`
    Vortex3D(Vec<[f64; 6]>),
}

impl Sources {
    fn new(model: Model, state: &ParticleState) -> Self {
        let n = state.len();
        match model {
            Model::Euler2D | Model::Ipm | Model::Boussinesq2D => Sources::Vortex2D(
                (0..n)
                    .map(|i| {
                        let x = &state.positions[i];
                        [x[0], x[1], state.weights[i] * vorticity_2d(model, state, i)]
                    })
                    .collect(),
            ),
            Model::Sqg => Sources::Sqg(
                (0..n)
                    .map(|i| {
                        let x = &state.positions[i];
                        let g = &state.gradients[i];
                        let d = &state.grad_theta0[i];
                        let w = state.weights[i];
                        let s1 = g[1][1] * d[0] - g[1][0] * d[1];
                        let s2 = -g[0][1] * d[0] + g[0][0] * d[1];
                        [x[0], x[1], w * state.theta0[i], w * s1, w * s2]
                    })
                    .collect(),
            ),
            Model::Euler3D => Sources::Vortex3D(
                (0..n)
                    .map(|i| {
                        let x = &state.positions[i];
                        let r = mat_vec(&state.gradients[i], &state.omega0[i]);
                        let w = state.weights[i];
                        [x[0], x[1], x[2], w * r[0], w * r[1], w * r[2]]
                    })
                    .collect(),
            ),
        }
    }

    /// Velocity and nonlocal gradient sum at `x`, skipping source `exclude`.
    #[inline]
    fn eval(&self, x: &Vec3, exclude: usize, inv_d2: f64) -> (Vec3, Mat3) {
        let regular = inv_d2 > 0.0;
        match self {
            Sources::Vortex2D(src) => {
                let acc = pairwise_sum::<4, _>(src.len(), &|j, acc| {
                    if j == exclude {
                        return;
                    }
                    let s = &src[j];
                    let (y1, y2) = (x[0] - s[0], x[1] - s[1]);
                    let r2 = y1 * y1 + y2 * y2;
                    if r2 == 0.0 && regular {
                        return;
                    }
                    let inv = 1.0 / r2;
                    let f = if regular { blob(r2, inv_d2) } else { 1.0 };
                    let c = s[2] * f * inv;
                    acc[0] -= y2 * c;
                    acc[1] += y1 * c;
                    let c2 = c * inv;
                    acc[2] += 2.0 * y1 * y2 * c2;
                    acc[3] += (y2 * y2 - y1 * y1) * c2;
                });
                let k = 1.0 / (2.0 * PI);
                let (a, b) = (acc[2] * k, acc[3] * k);
                ([acc[0] * k, acc[1] * k, 0.0], [[a, b, 0.0], [b, -a, 0.0], [0.0; 3]])
            }
            Sources::Sqg(src) => {
                let acc = pairwise_sum::<6, _>(src.len(), &|j, acc| {
                    if j == exclude {
                        return;
                    }
                    let s = &src[j];
                    let (y1, y2) = (x[0] - s[0], x[1] - s[1]);
                    let r2 = y1 * y1 + y2 * y2;
                    if r2 == 0.0 && regular {
                        return;
                    }
                    let f = if regular { blob(r2, inv_d2) } else { 1.0 };
                    let c = f / (r2 * r2.sqrt());
                    let (k1, k2) = (-y2 * c, y1 * c);
                    acc[0] += k1 * s[2];
                    acc[1] += k2 * s[2];
                    acc[2] += k1 * s[3];
                    acc[3] += k1 * s[4];
                    acc[4] += k2 * s[3];
                    acc[5] += k2 * s[4];
                });
                let k = 1.0 / (2.0 * PI);
                (
                    [acc[0] * k, acc[1] * k, 0.0],
                    [[acc[2] * k, acc[3] * k, 0.0], [acc[4] * k, acc[5] * k, 0.0], [0.0; 3]],
                )
            }
            Sources::Vortex3D(src) => {
                let acc = pairwise_sum::<9, _>(src.len(), &|j, acc| {
                    if j == exclude {
                        return;
                    }
                    let s = &src[j];
                    let y = [x[0] - s[0], x[1] - s[1], x[2] - s[2]];
                    let r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
                    if r2 == 0.0 && regular {
                        return;
                    }
                    let f = if regular { blob(r2, inv_d2) } else { 1.0 };
                    let c = f / (r2 * r2.sqrt());
                    // z = y × ρ; the velocity is ρ × y = −z.
                    let z = [y[1] * s[5] - y[2] * s[4], y[2] * s[3] - y[0] * s[5], y[0] * s[4] - y[1] * s[3]];
                    acc[0] -= z[0] * c;
                    acc[1] -= z[1] * c;
                    acc[2] -= z[2] * c;
                    let c5 = c / r2;
                    acc[3] += 2.0 * z[0] * y[0] * c5;
                    acc[4] += 2.0 * z[1] * y[1] * c5;
                    acc[5] += 2.0 * z[2] * y[2] * c5;
                    acc[6] += (z[0] * y[1] + z[1] * y[0]) * c5;
                    acc[7] += (z[0] * y[2] + z[2] * y[0]) * c5;
                    acc[8] += (z[1] * y[2] + z[2] * y[1]) * c5;
                });
                let k = 1.0 / (4.0 * PI);
                let t = 3.0 / (8.0 * PI);
                let s = [acc[3] * t, acc[4] * t, acc[5] * t, acc[6] * t, acc[7] * t, acc[8] * t];
                (
                    [acc[0] * k, acc[1] * k, acc[2] * k],
                    [[s[0], s[3], s[4]], [s[3], s[1], s[5]], [s[4], s[5], s[2]]],
                )
            }
        }
    }
}

fn inv_delta2(spec: &ModelSpec) -> f64 {
    if spec.delta > 0.0 {
        1.0 / (spec.delta * spec.delta)
    } else {
        0.0
    }
}

/// Local rotation added to the nonlocal gradient sum at particle `i`.
fn local_term(model: Model, state: &ParticleState, i: usize) -> Mat3 {
    match model {
        Model::Sqg => [[0.0; 3]; 3],
        Model::Euler3D => {
            let r = mat_vec(&state.gradients[i], &state.omega0[i]);
            [[0.0, -0.5 * r[2], 0.5 * r[1]], [0.5 * r[2], 0.0, -0.5 * r[0]], [-0.5 * r[1], 0.5 * r[0], 0.0]]
        }
        _ => {
            let h = 0.5 * vorticity_2d(model, state, i);
            [[0.0, -h, 0.0], [h, 0.0, 0.0], [0.0; 3]]
        }
    }
}

fn all_finite<const R: usize>(rows: &[[f64; R]]) -> bool {
    rows.iter().all(|r| r.iter().all(|v| v.is_finite()))
}

pub fn evaluate_rhs(spec: &ModelSpec, state: &ParticleState) -> Result<Derivatives, DynamicsError> {
    spec.validate(state)?;
    let model = spec.model;
    let sources = Sources::new(model, state);
    let inv_d2 = inv_delta2(spec);
    let per: Vec<(Vec3, Mat3, Mat3)> = (0..state.len())
        .into_par_iter()
        .map(|i| {
            let (u, mut a) = sources.eval(&state.positions[i], i, inv_d2);
            let local = local_term(model, state, i);
            for r in 0..3 {
                for c in 0..3 {
                    a[r][c] += local[r][c];
                }
            }
            let dg = mat_mul(&a, &state.gradients[i]);
            (u, a, dg)
        })
        .collect();
    let mut out = Derivatives {
        velocity: Vec::with_capacity(per.len()),
        grad_u: Vec::with_capacity(per.len()),
        dgrad: Vec::with_capacity(per.len()),
        dw: vec![0.0; per.len()],
    };
    for (u, a, dg) in per {
        out.velocity.push(u);
        out.grad_u.push(a);
        out.dgrad.push(dg);
    }
    if model == Model::Boussinesq2D {
        for (i, d) in out.dw.iter_mut().enumerate() {
            *d = bracket_theta_x2(state, i);
        }
    }
    if !all_finite(&out.velocity) || !out.grad_u.iter().all(|m| all_finite(m)) {
        return Err(DynamicsError::NumericalFailure("right-hand side".into()));
    }
    Ok(out)
}

pub fn velocity(spec: &ModelSpec, state: &ParticleState) -> Result<Vec<Vec3>, DynamicsError> {
    Ok(evaluate_rhs(spec, state)?.velocity)
}

pub fn grad_rhs(spec: &ModelSpec, state: &ParticleState) -> Result<Vec<Mat3>, DynamicsError> {
    Ok(evaluate_rhs(spec, state)?.dgrad)
}

/// `∇u` at every particle, equal to `(dG/dt)·G⁻¹`.
pub fn velocity_gradient(spec: &ModelSpec, state: &ParticleState) -> Result<Vec<Mat3>, DynamicsError> {
    Ok(evaluate_rhs(spec, state)?.grad_u)
}

/// Velocity induced at an arbitrary point by all particles except `exclude`.
pub fn induced_velocity(
    spec: &ModelSpec,
    state: &ParticleState,
    x: Vec3,
    exclude: Option<usize>,
) -> Result<Vec3, DynamicsError> {
    spec.validate(state)?;
    let sources = Sources::new(spec.model, state);
    let (u, _) = sources.eval(&x, exclude.unwrap_or(usize::MAX), inv_delta2(spec));
    if u.iter().all(|v| v.is_finite()) {
        Ok(u)
    } else {
        Err(DynamicsError::NumericalFailure("induced velocity".into()))
    }
}

fn advance(base: &ParticleState, k: &Derivatives, h: f64, evolve_g: bool) -> ParticleState {
    let mut s = base.clone();
    for (x, u) in s.positions.iter_mut().zip(&k.velocity) {
        for c in 0..3 {
            x[c] += h * u[c];
        }
    }
    if evolve_g {
        for (g, dg) in s.gradients.iter_mut().zip(&k.dgrad) {
            for r in 0..3 {
                for c in 0..3 {
                    g[r][c] += h * dg[r][c];
                }
            }
        }
    }
    for (w, d) in s.w_acc.iter_mut().zip(&k.dw) {
        *w += h * d;
    }
    s.t += h;
    s
}

/// One classical fourth-order Runge–Kutta step for `(X, G, W)`.
pub fn rk4_step(spec: &ModelSpec, state: &ParticleState, dt: f64) -> Result<ParticleState, DynamicsError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(DynamicsError::InvalidArgument(format!("dt = {dt}")));
    }
    let eg = spec.gradients_needed();
    let k1 = evaluate_rhs(spec, state)?;
    let k2 = evaluate_rhs(spec, &advance(state, &k1, 0.5 * dt, eg))?;
    let k3 = evaluate_rhs(spec, &advance(state, &k2, 0.5 * dt, eg))?;
    let k4 = evaluate_rhs(spec, &advance(state, &k3, dt, eg))?;
    let mut s = state.clone();
    let h6 = dt / 6.0;
    for i in 0..s.len() {
        for c in 0..3 {
            s.positions[i][c] += h6
                * (k1.velocity[i][c] + 2.0 * k2.velocity[i][c] + 2.0 * k3.velocity[i][c] + k4.velocity[i][c]);
        }
        if eg {
            for r in 0..3 {
                for c in 0..3 {
                    s.gradients[i][r][c] +=
                        h6 * (k1.dgrad[i][r][c] + 2.0 * k2.dgrad[i][r][c] + 2.0 * k3.dgrad[i][r][c] + k4.dgrad[i][r][c]);
                }
            }
        }
        s.w_acc[i] += h6 * (k1.dw[i] + 2.0 * k2.dw[i] + 2.0 * k3.dw[i] + k4.dw[i]);
    }
    s.t = state.t + dt;
    let finite = all_finite(&s.positions) && s.gradients.iter().all(|m| all_finite(m)) && s.w_acc.iter().all(|w| w.is_finite());
    if !finite {
        return Err(DynamicsError::NumericalFailure("RK4 stage".into()));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernelalg::{biot_savart_2d, biot_savart_3d, regularize, sqg_kernel, strain_kernel_2d, strain_kernel_3d};

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol * (1.0 + b.abs()), "{a} vs {b}");
    }

    fn one_source(dim: usize, model: Model) -> ParticleState {
        let mut s = ParticleState::at_labels(dim, vec![[0.0; 3], [0.0; 3]], vec![1.0, 1.0]).unwrap();
        s.positions[1] = if dim == 2 { [-0.3, 0.7, 0.0] } else { [-0.3, 0.7, 0.4] };
        s.labels[1] = s.positions[1];
        match model {
            Model::Sqg => {
                s.theta0 = vec![0.0, 1.0];
                s.grad_theta0[1] = [0.6, -0.2, 0.0];
            }
            Model::Euler3D => s.omega0[1] = [0.2, -0.5, 0.9],
            _ => s.omega0[1] = [0.0, 0.0, 1.0],
        }
        s
    }

    #[test]
    fn pair_kernels_match_catalog() {
        for delta in [0.0, 0.8] {
            let reg = |e: crate::kernelalg::KernelExpr| if delta > 0.0 { regularize(&e, delta).unwrap() } else { e };
            // Euler 2D
            let s = one_source(2, Model::Euler2D);
            let (u, m) = Sources::new(Model::Euler2D, &s).eval(&s.positions[0], 0, inv_delta2(&ModelSpec::new(Model::Euler2D, delta)));
            let y = [0.3, -0.7];
            let v = reg(biot_savart_2d()).evaluate(&y).unwrap();
            let k = reg(strain_kernel_2d()).evaluate(&y).unwrap();
            close(u[0], v[0], 1e-14);
            close(u[1], v[1], 1e-14);
            for r in 0..2 {
                for c in 0..2 {
                    close(m[r][c], k[2 * r + c], 1e-14);
                }
            }
            // SQG
            let s = one_source(2, Model::Sqg);
            let (u, m) = Sources::new(Model::Sqg, &s).eval(&s.positions[0], 0, inv_delta2(&ModelSpec::new(Model::Sqg, delta)));
            let kk = reg(sqg_kernel()).evaluate(&y).unwrap();
            close(u[0], kk[0], 1e-14);
            close(u[1], kk[1], 1e-14);
            close(m[0][1], kk[0] * -0.2, 1e-14);
            close(m[1][0], kk[1] * 0.6, 1e-14);
            // Euler 3D
            let s = one_source(3, Model::Euler3D);
            let (u, m) = Sources::new(Model::Euler3D, &s).eval(&s.positions[0], 0, inv_delta2(&ModelSpec::new(Model::Euler3D, delta)));
            let y3 = [0.3, -0.7, -0.4];
            let rho = s.omega0[1];
            let bs = biot_savart_3d();
            let st = strain_kernel_3d();
            let mut want_u = [0.0; 3];
            let mut want_s = [0.0; 9];
            for mm in 0..3 {
                let v = reg(bs[mm].clone()).evaluate(&y3).unwrap();
                let t = reg(st[mm].clone()).evaluate(&y3).unwrap();
                for c in 0..3 {
                    want_u[c] += rho[mm] * v[c];
                }
                for c in 0..9 {
                    want_s[c] += rho[mm] * t[c];
                }
            }
            for c in 0..3 {
                close(u[c], want_u[c], 1e-14);
            }
            for r in 0..3 {
                for c in 0..3 {
                    close(m[r][c], want_s[3 * r + c], 1e-14);
                }
            }
        }
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(poisson_bracket([1.0, 0.0], [0.0, 1.0]), 1.0);
        assert_eq!(poisson_bracket([2.0, 3.0], [2.0, 3.0]), 0.0);
        assert_eq!(poisson_bracket([2.0, 3.0], [-1.0, 4.0]), 11.0);
    }

    #[test]
    fn blob_cutoff_is_exact() {
        assert_eq!(-(-40.0f64).exp_m1(), 1.0);
        assert_eq!(blob(0.0, 1.0), 0.0);
    }
}
