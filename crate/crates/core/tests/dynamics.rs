use std::f64::consts::PI;

use lagpath::dynamics::*;
use lagpath::kernelalg::Model;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn point_spec() -> ModelSpec {
    ModelSpec { model: Model::Euler2D, delta: 0.0, evolve_gradients: false }
}

fn two_vortices() -> ParticleState {
    ParticleState::point_vortices(&[[0.0, 0.0], [1.0, 0.0]], &[1.0, 1.0]).unwrap()
}

/// Exact corotation: centre (½, 0), radius ½, angular velocity 1/π.
fn corotation_exact(t: f64) -> [[f64; 2]; 2] {
    let phi = t / PI;
    let p = |offset: f64| [0.5 + 0.5 * (offset + phi).cos(), 0.5 * (offset + phi).sin()];
    [p(PI), p(0.0)]
}

fn run(spec: &ModelSpec, mut s: ParticleState, t_end: f64, steps: usize) -> ParticleState {
    let dt = t_end / steps as f64;
    for _ in 0..steps {
        s = rk4_step(spec, &s, dt).unwrap();
    }
    s
}

fn pos_error(s: &ParticleState, exact: [[f64; 2]; 2]) -> f64 {
    (0..2)
        .map(|i| ((s.positions[i][0] - exact[i][0]).powi(2) + (s.positions[i][1] - exact[i][1]).powi(2)).sqrt())
        .fold(0.0, f64::max)
}

fn gaussian_bump(amp: f64, width: f64, center: [f64; 2]) -> AnalyticField<impl Fn(&Vec3) -> f64 + Sync, impl Fn(&Vec3) -> Vec3 + Sync> {
    let s2 = width * width;
    AnalyticField {
        value: move |a: &Vec3| amp * (-((a[0] - center[0]).powi(2) + (a[1] - center[1]).powi(2)) / s2).exp(),
        gradient: move |a: &Vec3| {
            let (dx, dy) = (a[0] - center[0], a[1] - center[1]);
            let g = amp * (-(dx * dx + dy * dy) / s2).exp();
            [-2.0 * dx / s2 * g, -2.0 * dy / s2 * g, 0.0]
        },
    }
}

#[test]
fn two_vortex_velocity() {
    let u = velocity(&point_spec(), &two_vortices()).unwrap();
    assert!(u[0][0].abs() < 1e-16);
    assert!((u[0][1] + 1.0 / (2.0 * PI)).abs() < 1e-16);
    assert!((u[1][1] - 1.0 / (2.0 * PI)).abs() < 1e-16);
}

#[test]
fn two_vortex_local_rotation_term() {
    let spec = ModelSpec::new(Model::Euler2D, 0.0);
    let s = two_vortices();
    let dg = grad_rhs(&spec, &s).unwrap();
    // nonlocal part at y = (−1, 0): [[0, −1], [−1, 0]]/(2π)
    let k = 1.0 / (2.0 * PI);
    let want = [[0.0, -k - 0.5], [-k + 0.5, 0.0]];
    for r in 0..2 {
        for c in 0..2 {
            assert!((dg[0][r][c] - want[r][c]).abs() < 1e-15, "{:?}", dg[0]);
        }
    }
}

#[test]
fn coincident_point_vortices_fail() {
    let s = ParticleState::point_vortices(&[[0.0, 0.0], [0.0, 0.0]], &[1.0, 1.0]).unwrap();
    assert!(matches!(velocity(&point_spec(), &s), Err(DynamicsError::NumericalFailure(_))));
    assert!(rk4_step(&point_spec(), &two_vortices(), 0.0).is_err());
}

#[test]
fn corotation_period() {
    let t = 2.0 * PI * PI;
    let s = run(&point_spec(), two_vortices(), t, 100_000);
    assert!(pos_error(&s, corotation_exact(t)) < 1e-6 * 0.5);
    assert!((s.t - t).abs() < 1e-9);
}

#[test]
fn point_vortex_invariants_are_conserved() {
    let t = 2.0 * PI * PI;
    let spec = point_spec();
    let mut s = ParticleState::point_vortices(&[[0.0, 0.0], [1.0, 0.0], [0.3, 0.8]], &[1.0, 0.5, -0.7]).unwrap();
    let start = invariants_euler2d(&s);
    let dt = t / 20_000.0;
    for _ in 0..20_000 {
        s = rk4_step(&spec, &s, dt).unwrap();
    }
    let end = invariants_euler2d(&s);
    assert!((end.hamiltonian - start.hamiltonian).abs() < 1e-8);
    assert!((end.momentum[0] - start.momentum[0]).abs() < 1e-8);
    assert!((end.momentum[1] - start.momentum[1]).abs() < 1e-8);
    assert!((end.angular_impulse - start.angular_impulse).abs() < 1e-8);
}

#[test]
fn vortex_pair_translates() {
    let s0 = ParticleState::point_vortices(&[[0.0, 0.0], [1.0, 0.0]], &[1.0, -1.0]).unwrap();
    let s = run(&point_spec(), s0, 1.0, 100);
    let speed = 1.0 / (2.0 * PI);
    for (i, x0) in [0.0, 1.0].iter().enumerate() {
        assert!((s.positions[i][0] - x0).abs() < 1e-8);
        assert!((s.positions[i][1] - speed).abs() < 1e-8);
    }
}

#[test]
fn rk4_is_fourth_order() {
    let t = 2.0 * PI * PI;
    let errs: Vec<f64> =
        [1000, 2000, 4000].iter().map(|&n| pos_error(&run(&point_spec(), two_vortices(), t, n), corotation_exact(t))).collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order > 3.8 && order < 4.2, "errors {errs:?}");
    }
}

#[test]
fn zero_velocity_state_is_fixed() {
    let s = ParticleState::point_vortices(&[[0.0, 0.0], [1.0, 0.0]], &[0.0, 0.0]).unwrap();
    let next = rk4_step(&point_spec(), &s, 0.1).unwrap();
    assert_eq!(next.positions, s.positions);
    assert_eq!(next.t, 0.1);
}

#[test]
fn strain_sums_match_finite_differences_of_velocity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for model in [Model::Euler2D, Model::Euler3D] {
        let dim = model.dim();
        let n = 12;
        let labels: Vec<Vec3> =
            (0..n).map(|_| { let mut a = [0.0; 3]; for c in a.iter_mut().take(dim) { *c = rng.gen_range(-1.0..1.0); } a }).collect();
        let mut s = ParticleState::at_labels(dim, labels, vec![0.1; n]).unwrap();
        for o in s.omega0.iter_mut() {
            *o = if dim == 2 { [0.0, 0.0, rng.gen_range(-1.0..1.0)] } else { [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)] };
        }
        let spec = ModelSpec::new(model, 0.0);
        let a = velocity_gradient(&spec, &s).unwrap();
        let h = 1e-5;
        for i in 0..n {
            let mut fd = [[0.0; 3]; 3];
            for k in 0..dim {
                let mut xp = s.positions[i];
                let mut xm = s.positions[i];
                xp[k] += h;
                xm[k] -= h;
                let up = induced_velocity(&spec, &s, xp, Some(i)).unwrap();
                let um = induced_velocity(&spec, &s, xm, Some(i)).unwrap();
                for r in 0..dim {
                    fd[r][k] = (up[r] - um[r]) / (2.0 * h);
                }
            }
            // the local rotation is the antisymmetric part; compare symmetric parts
            let scale = 1.0 + fd.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            for r in 0..dim {
                for c in 0..dim {
                    let sym_fd = 0.5 * (fd[r][c] + fd[c][r]);
                    let sym_a = 0.5 * (a[i][r][c] + a[i][c][r]);
                    assert!((sym_fd - sym_a).abs() < 1e-6 * scale, "{model} i={i}: {sym_fd} vs {sym_a}");
                }
            }
            if dim == 2 {
                // in 2D the point-vortex field is also curl free away from the source
                let skew = 0.5 * (fd[1][0] - fd[0][1]);
                let local = s.omega0[i][2] * 0.5;
                assert!((0.5 * (a[i][1][0] - a[i][0][1]) - skew - local).abs() < 1e-6 * scale);
            }
        }
    }
}

#[test]
fn trace_free_gradient_rhs_at_start() {
    let patch = |a: &Vec3| { let r2 = a[0] * a[0] + a[1] * a[1]; [0.0, 0.0, (-4.0 * r2).exp()] };
    let s = init_grid(GridSpec { dim: 2, lo: -1.0, hi: 1.0, n_per_axis: 16 }, &|_: &Vec3| 0.0, Some(&patch)).unwrap();
    let spec = ModelSpec::new(Model::Euler2D, 2.0 * 2.0 / 16.0);
    for m in grad_rhs(&spec, &s).unwrap() {
        assert!((m[0][0] + m[1][1]).abs() < 1e-12);
    }
    let u = velocity(&spec, &s).unwrap();
    let mut total = [0.0; 2];
    for i in 0..s.len() {
        let g = s.weights[i] * s.omega0[i][2];
        total[0] += g * u[i][0];
        total[1] += g * u[i][1];
    }
    assert!(total[0].abs() < 1e-12 && total[1].abs() < 1e-12, "{total:?}");
}

#[test]
fn sqg_radial_bump_velocity_is_tangential() {
    let bump = gaussian_bump(1.0, 0.5, [0.0, 0.0]);
    let n = 64;
    let s = init_grid(GridSpec { dim: 2, lo: -2.0, hi: 2.0, n_per_axis: n }, &bump, None).unwrap();
    let spec = ModelSpec::new(Model::Sqg, 2.0 * 4.0 / n as f64);
    let u = velocity(&spec, &s).unwrap();
    for (x, v) in s.positions.iter().zip(&u) {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let speed = (v[0] * v[0] + v[1] * v[1]).sqrt();
        let radial = (x[0] * v[0] + x[1] * v[1]) / r;
        assert!(radial.abs() <= 1e-3 * speed + 1e-14, "radial {radial} speed {speed}");
    }
}

#[test]
fn sqg_constant_data_has_no_gradient_forcing() {
    let s = init_grid(GridSpec { dim: 2, lo: -1.0, hi: 1.0, n_per_axis: 12 }, &|_: &Vec3| 2.0, None).unwrap();
    let spec = ModelSpec::new(Model::Sqg, 0.2);
    let d = evaluate_rhs(&spec, &s).unwrap();
    assert!(d.dgrad.iter().all(|m| m.iter().flatten().all(|v| *v == 0.0)));
    // antisymmetry: the weighted total of induced velocities cancels
    let mut total = [0.0; 2];
    for (i, u) in d.velocity.iter().enumerate() {
        total[0] += s.weights[i] * u[0];
        total[1] += s.weights[i] * u[1];
    }
    assert!(total[0].abs() < 1e-12 && total[1].abs() < 1e-12);
    // the grid is symmetric under a → −a, so velocities are odd
    let n = s.len();
    for i in 0..n {
        let j = n - 1 - i;
        assert!((d.velocity[i][0] + d.velocity[j][0]).abs() < 1e-12);
        assert!((d.velocity[i][1] + d.velocity[j][1]).abs() < 1e-12);
    }
}

/// Modified Bessel functions `I₀`, `I₁` by their power series.
fn bessel_i01(x: f64) -> (f64, f64) {
    let (mut i0, mut i1) = (0.0, 0.0);
    let mut term = 1.0; // (x/2)^{2k} / (k!)²
    for k in 0..200 {
        let kf = k as f64;
        i0 += term;
        i1 += term * (x / 2.0) / (kf + 1.0);
        term *= (x / 2.0).powi(2) / ((kf + 1.0) * (kf + 1.0));
    }
    (i0, i1)
}

/// SQG velocity of `θ = A e^{−|y|²/σ²}`: `u = −∇⊥ψ` with
/// `ψ = (−Δ)^{−1/2}θ = (Aσ√π/2) e^{−x} I₀(x)`, `x = r²/(2σ²)`.
fn sqg_bump_velocity(amp: f64, sigma: f64, y: [f64; 2]) -> [f64; 2] {
    let r = (y[0] * y[0] + y[1] * y[1]).sqrt();
    let x = r * r / (2.0 * sigma * sigma);
    let (i0, i1) = bessel_i01(x);
    let dpsi = amp * sigma * PI.sqrt() / 2.0 * (-x).exp() * (i1 - i0) * r / (sigma * sigma);
    [dpsi * y[1] / r, -dpsi * y[0] / r]
}

#[test]
fn sqg_velocity_converges_under_refinement() {
    let (amp, sigma, c) = (1.0, 0.8, [0.1, -0.05]);
    let bump = gaussian_bump(amp, sigma, c);
    let x = [0.37, 0.21, 0.0];
    let exact = sqg_bump_velocity(amp, sigma, [x[0] - c[0], x[1] - c[1]]);
    // each grid is shifted so that x is the centre of a cell
    let errs: Vec<f64> = [32, 64, 128, 256, 512]
        .iter()
        .map(|&n| {
            let (len, h) = (8.0, 8.0 / n as f64);
            let lo = x[0] - 0.5 * len - 0.5 * h;
            let mut s = init_grid(GridSpec { dim: 2, lo, hi: lo + len, n_per_axis: n }, &bump, None).unwrap();
            let shift = x[1] - x[0];
            for a in s.labels.iter_mut().chain(s.positions.iter_mut()) {
                a[1] += shift;
            }
            for (i, a) in s.labels.iter().enumerate() {
                s.theta0[i] = bump.value(a);
                s.grad_theta0[i] = bump.gradient(a).unwrap();
            }
            let i = (n / 2) * n + n / 2;
            assert!((s.positions[i][0] - x[0]).abs() < 1e-12 && (s.positions[i][1] - x[1]).abs() < 1e-12);
            let u = induced_velocity(&ModelSpec::new(Model::Sqg, 2.0 * h), &s, x, Some(i)).unwrap();
            ((u[0] - exact[0]).powi(2) + (u[1] - exact[1]).powi(2)).sqrt()
        })
        .collect();
    // blob error O(δ) with δ = 2h: first order once h is well below the bump width
    for w in errs.windows(2) {
        assert!(w[1] < w[0], "errors {errs:?}");
    }
    for w in errs[2..].windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 1.0).abs() < 0.05, "errors {errs:?}");
    }
}

#[test]
fn stratified_ipm_is_at_rest() {
    let field = AnalyticField {
        value: |a: &Vec3| -(a[1] / 0.5).tanh(),
        gradient: |a: &Vec3| [0.0, -2.0 / (a[1] / 0.5).cosh().powi(2), 0.0],
    };
    let s = init_grid(GridSpec { dim: 2, lo: -1.0, hi: 1.0, n_per_axis: 10 }, &field, None).unwrap();
    let d = evaluate_rhs(&ModelSpec::new(Model::Ipm, 0.4), &s).unwrap();
    assert!(d.velocity.iter().flatten().all(|v| *v == 0.0));
}

#[test]
fn boussinesq_accumulator_integrates_bracket() {
    let field = AnalyticField { value: |a: &Vec3| 0.3 * a[0], gradient: |_: &Vec3| [0.3, 0.0, 0.0] };
    let s = init_grid(GridSpec { dim: 2, lo: -1.0, hi: 1.0, n_per_axis: 6 }, &field, None).unwrap();
    let spec = ModelSpec::new(Model::Boussinesq2D, 0.5);
    let d = evaluate_rhs(&spec, &s).unwrap();
    assert!(d.dw.iter().all(|w| (w - 0.3).abs() < 1e-15));
    let next = rk4_step(&spec, &s, 0.01).unwrap();
    assert!(next.w_acc.iter().all(|w| w.abs() > 0.0029 && w.abs() < 0.0031));
}

#[test]
fn sqg_bump_stays_incompressible_and_chord_arc_holds() {
    let bump = gaussian_bump(0.5, 0.5, [0.0, 0.0]);
    let n = 24;
    let mut s = init_grid(GridSpec { dim: 2, lo: -1.5, hi: 1.5, n_per_axis: n }, &bump, None).unwrap();
    let spec = ModelSpec::new(Model::Sqg, 2.0 * 3.0 / n as f64);
    assert_eq!(incompressibility_residual(&s), 0.0);
    let c0 = chord_arc(&s, 200, 1).unwrap();
    assert_eq!((c0.min, c0.max), (1.0, 1.0));
    let dt = 0.05;
    let mut hist = vec![grad_u_sup(&velocity_gradient(&spec, &s).unwrap(), 2)];
    for _ in 0..10 {
        s = rk4_step(&spec, &s, dt).unwrap();
        hist.push(grad_u_sup(&velocity_gradient(&spec, &s).unwrap(), 2));
    }
    assert!(incompressibility_residual(&s) < 1e-3);
    let lam = lambda_accumulate(&hist, dt).unwrap();
    let c = chord_arc(&s, 2000, 7).unwrap();
    assert!(c.min >= 1.0 / lam * 0.95 && c.max <= lam * 1.05, "{c:?} λ={lam}");
    // with det G = 1 the inverse is the adjugate
    for g in &s.gradients {
        let adj = [[g[1][1], -g[0][1]], [-g[1][0], g[0][0]]];
        let prod = [
            [g[0][0] * adj[0][0] + g[0][1] * adj[1][0], g[0][0] * adj[0][1] + g[0][1] * adj[1][1]],
            [g[1][0] * adj[0][0] + g[1][1] * adj[1][0], g[1][0] * adj[0][1] + g[1][1] * adj[1][1]],
        ];
        let res = incompressibility_residual(&s);
        assert!((prod[0][0] - 1.0).abs() <= res + 1e-15 && prod[0][1].abs() <= 1e-15);
    }
}

#[test]
fn rigid_rotation_keeps_chord_arc_at_one() {
    let mut s = init_grid(GridSpec { dim: 2, lo: -1.0, hi: 1.0, n_per_axis: 8 }, &|_: &Vec3| 0.0, None).unwrap();
    let (c, sn) = (0.6f64, 0.8f64);
    for x in s.positions.iter_mut() {
        *x = [c * x[0] - sn * x[1], sn * x[0] + c * x[1], 0.0];
    }
    let r = chord_arc(&s, 500, 3).unwrap();
    assert!((r.min - 1.0).abs() < 1e-14 && (r.max - 1.0).abs() < 1e-14);
    assert!(!r.coincident);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let bump = gaussian_bump(1.0, 0.5, [0.2, 0.0]);
    let s = init_grid(GridSpec { dim: 2, lo: -1.0, hi: 1.0, n_per_axis: 20 }, &bump, None).unwrap();
    let spec = ModelSpec::new(Model::Sqg, 0.2);
    let eval = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| rk4_step(&spec, &s, 0.1).unwrap())
    };
    let (a, b) = (eval(1), eval(3));
    let bits = |st: &ParticleState| st.positions.iter().flatten().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn euler3d_ring_step_preserves_volume() {
    // a thin vortex ring in the x₃ = 0 plane
    let omega = |a: &Vec3| {
        let rho = (a[0] * a[0] + a[1] * a[1]).sqrt();
        let core = ((rho - 0.6).powi(2) + a[2] * a[2]) / 0.04;
        let mag = (-core).exp();
        if rho == 0.0 { [0.0; 3] } else { [-a[1] / rho * mag, a[0] / rho * mag, 0.0] }
    };
    let s = init_grid(GridSpec { dim: 3, lo: -1.0, hi: 1.0, n_per_axis: 10 }, &|_: &Vec3| 0.0, Some(&omega)).unwrap();
    let spec = ModelSpec::new(Model::Euler3D, 0.4);
    let d = evaluate_rhs(&spec, &s).unwrap();
    for m in &d.grad_u {
        assert!((m[0][0] + m[1][1] + m[2][2]).abs() < 1e-12);
    }
    // the ring self-propagates along its axis
    let mean_u3: f64 = d.velocity.iter().zip(&s.weights).map(|(u, w)| u[2] * w).sum();
    assert!(mean_u3 > 0.0);
    let next = rk4_step(&spec, &s, 0.05).unwrap();
    assert!(incompressibility_residual(&next) < 1e-3);
}
