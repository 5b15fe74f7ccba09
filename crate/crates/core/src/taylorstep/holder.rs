use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::TaylorError;
use crate::dynamics::{operator_norm, Mat3, ParticleState, Vec3};

/// Discrete norms of the initial data and of the current flow map.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderStats {
    pub gamma: f64,
    pub lambda: f64,
    /// `[θ₀]_{Cγ}`.
    pub theta_seminorm: f64,
    pub theta_l1: f64,
    pub theta_linf: f64,
    /// `[∇θ₀]_{Cγ}`.
    pub grad_seminorm: f64,
    /// `‖∇θ₀‖_{Cγ} = ‖∇θ₀‖_{L∞} + [∇θ₀]_{Cγ}`.
    pub grad_cgamma: f64,
    pub grad_l1: f64,
    pub grad_linf: f64,
    /// `‖X − a‖_{L∞} + ‖∇_aX‖_{L∞} + [∇_aX]_{Cγ}`; equal to 1 at `t = 0`.
    pub x_norm: f64,
}

fn check_params(gamma: f64, lambda: f64) -> Result<(), TaylorError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(TaylorError::InvalidParameter(format!("gamma = {gamma} not in (0, 1)")));
    }
    if !(lambda > 1.0 && lambda <= 1.5) {
        return Err(TaylorError::InvalidParameter(format!("lambda = {lambda} not in (1, 3/2]")));
    }
    Ok(())
}

fn dist(a: &Vec3, b: &Vec3) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Label pairs for the Hölder quotients: grid neighbours at offsets 1 and 2
/// along each axis and along the diagonals, plus a seeded random sample.
fn sample_pairs(state: &ParticleState, random_pairs: usize, seed: u64) -> Vec<(usize, usize)> {
    let n = state.len();
    let mut pairs = Vec::new();
    match &state.grid {
        Some(g) if g.n_per_axis.pow(state.dim as u32) == n => {
            let m = g.n_per_axis as isize;
            let d = state.dim;
            let mut offsets: Vec<[isize; 3]> = Vec::new();
            for axis in 0..d {
                for step in [1, 2] {
                    let mut o = [0; 3];
                    o[axis] = step;
                    offsets.push(o);
                }
            }
            for a in 0..d {
                for b in a + 1..d {
                    for sign in [1, -1] {
                        let mut o = [0; 3];
                        o[a] = 1;
                        o[b] = sign;
                        offsets.push(o);
                    }
                }
            }
            for i in 0..n {
                let idx = [(i as isize) % m, (i as isize / m) % m, i as isize / (m * m)];
                for o in &offsets {
                    let k = [idx[0] + o[0], idx[1] + o[1], idx[2] + o[2]];
                    if k[..d].iter().all(|&v| (0..m).contains(&v)) {
                        pairs.push((i, (k[0] + m * k[1] + m * m * k[2]) as usize));
                    }
                }
            }
        }
        _ => {
            for i in 0..n {
                let mut near: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                near.sort_by(|&a, &b| dist(&state.labels[i], &state.labels[a]).total_cmp(&dist(&state.labels[i], &state.labels[b])));
                pairs.extend(near.into_iter().take(2).map(|j| (i, j)));
            }
        }
    }
    if n >= 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..random_pairs {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            pairs.push((i, j));
        }
    }
    pairs
}

fn mat_diff_norm(a: &Mat3, b: &Mat3, dim: usize) -> f64 {
    let mut d = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            d[r][c] = a[r][c] - b[r][c];
        }
    }
    operator_norm(&d, dim)
}

/// Sampled Hölder seminorms (a lower-bound estimator: the maximum of the
/// quotient over the sampled pairs), quadrature `L¹` norms and maxima.
pub fn holder_stats(
    state: &ParticleState,
    gamma: f64,
    lambda: f64,
    random_pairs: usize,
    seed: u64,
) -> Result<HolderStats, TaylorError> {
    check_params(gamma, lambda)?;
    state.check()?;
    let dim = state.dim;
    let gnorm = |v: &Vec3| v[..dim].iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut theta_sem: f64 = 0.0;
    let mut grad_sem: f64 = 0.0;
    let mut g_sem: f64 = 0.0;
    for (i, j) in sample_pairs(state, random_pairs, seed) {
        let da = dist(&state.labels[i], &state.labels[j]);
        if da == 0.0 {
            continue;
        }
        let den = da.powf(gamma);
        theta_sem = theta_sem.max((state.theta0[i] - state.theta0[j]).abs() / den);
        let dg = [
            state.grad_theta0[i][0] - state.grad_theta0[j][0],
            state.grad_theta0[i][1] - state.grad_theta0[j][1],
            state.grad_theta0[i][2] - state.grad_theta0[j][2],
        ];
        grad_sem = grad_sem.max(gnorm(&dg) / den);
        g_sem = g_sem.max(mat_diff_norm(&state.gradients[i], &state.gradients[j], dim) / den);
    }
    let theta_l1 = state.theta0.iter().zip(&state.weights).map(|(t, w)| t.abs() * w).sum();
    let theta_linf = state.theta0.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let grad_l1 = state.grad_theta0.iter().zip(&state.weights).map(|(g, w)| gnorm(g) * w).sum();
    let grad_linf = state.grad_theta0.iter().fold(0.0f64, |m, g| m.max(gnorm(g)));
    let disp = state.positions.iter().zip(&state.labels).map(|(x, a)| dist(x, a)).fold(0.0, f64::max);
    let g_sup = state.gradients.iter().map(|g| operator_norm(g, dim)).fold(0.0, f64::max);
    Ok(HolderStats {
        gamma,
        lambda,
        theta_seminorm: theta_sem,
        theta_l1,
        theta_linf,
        grad_seminorm: grad_sem,
        grad_cgamma: grad_linf + grad_sem,
        grad_l1,
        grad_linf,
        x_norm: disp + g_sup + g_sem,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constraint {
    pub name: String,
    /// Lower bound this constraint places on `C₀`; absent when not enforced.
    pub value: Option<f64>,
    pub enforced: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusBound {
    pub c0: f64,
    pub c1: f64,
    pub r_paper: f64,
    pub provenance: Vec<Constraint>,
}

/// Explicit lower bound `R = 1/(C₀C₁)` on the time-analyticity radius, with
/// `C₁ = 27λc_k` and `C₀` the largest of the explicit constraints.
pub fn paper_radius_bound(stats: &HolderStats, c_k: f64) -> Result<RadiusBound, TaylorError> {
    let (g, l) = (stats.gamma, stats.lambda);
    check_params(g, l)?;
    if !(c_k > 0.0 && c_k.is_finite()) {
        return Err(TaylorError::InvalidParameter(format!("c_k = {c_k}")));
    }
    let c1 = 27.0 * l * c_k;
    let gi = 1.0 / g;
    let enforced = [
        ("flow-map norm at the expansion time", stats.x_norm),
        (
            "data Hölder seminorm and L1 norm",
            2.0 * (8.0 * l * l * (gi + l) * stats.theta_seminorm + stats.theta_l1),
        ),
        (
            "gradient Hölder norm and L1 norm against C1 squared",
            8.0 * (8.0 * (gi + l) * l * l * stats.grad_cgamma + stats.grad_l1) / (c1 * c1),
        ),
        ("gradient Hölder norm against the kernel constant", 160.0 * PI * gi * stats.grad_cgamma / (c_k * c_k)),
        (
            "outer-kernel Hölder estimate",
            16.0 * 288.0 * PI / (1.0 - g) * 4f64.powf(g - 1.0) * stats.grad_cgamma,
        ),
        (
            "gradient L1 and L-infinity norms",
            8.0 * (16.0 * PI).powf(g / 2.0) * (stats.grad_l1 + stats.grad_linf),
        ),
    ];
    let mut provenance: Vec<Constraint> = enforced
        .iter()
        .map(|(name, v)| Constraint { name: (*name).to_string(), value: Some(*v), enforced: true })
        .collect();
    for name in [
        "interpolation constant for the L^(2/(2-gamma)) gradient norm: not enforced, constant implicit",
        "sufficiently large time-analyticity constant: not enforced, constant implicit",
    ] {
        provenance.push(Constraint { name: name.to_string(), value: None, enforced: false });
    }
    let c0 = enforced.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    Ok(RadiusBound { c0, c1, r_paper: 1.0 / (c0 * c1), provenance })
}
