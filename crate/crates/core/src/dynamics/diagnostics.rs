use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{norm, DynamicsError, Mat3, ParticleState};

/// Per-snapshot diagnostics, one row of the diagnostics CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub chord_min: f64,
    pub chord_max: f64,
    pub lambda_bound: f64,
    pub grad_u_sup: f64,
    pub det_dev: f64,
    pub invariants: Option<PointVortexInvariants>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PointVortexInvariants {
    pub hamiltonian: f64,
    pub momentum: [f64; 2],
    pub angular_impulse: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChordArc {
    pub min: f64,
    pub max: f64,
    pub pairs: usize,
    /// Some sampled pair had coincident positions; `max` is then `+∞`.
    pub coincident: bool,
}

pub fn det(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Largest singular value of the leading `dim × dim` block.
pub fn operator_norm(m: &Mat3, dim: usize) -> f64 {
    if dim == 2 {
        let f = m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1];
        let d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let disc = (f * f - 4.0 * d * d).max(0.0).sqrt();
        return (0.5 * (f + disc)).sqrt();
    }
    // largest eigenvalue of B = mᵀm by the trigonometric formula
    let mut b = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = (0..3).map(|k| m[k][i] * m[k][j]).sum();
        }
    }
    let p1 = b[0][1] * b[0][1] + b[0][2] * b[0][2] + b[1][2] * b[1][2];
    let lmax = if p1 == 0.0 {
        b[0][0].max(b[1][1]).max(b[2][2])
    } else {
        let q = (b[0][0] + b[1][1] + b[2][2]) / 3.0;
        let p2 = (b[0][0] - q).powi(2) + (b[1][1] - q).powi(2) + (b[2][2] - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let mut c = b;
        for (i, row) in c.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (*v - if i == j { q } else { 0.0 }) / p;
            }
        }
        let r = (det(&c) / 2.0).clamp(-1.0, 1.0);
        q + 2.0 * p * (r.acos() / 3.0).cos()
    };
    lmax.max(0.0).sqrt()
}

/// `max_i ‖∇u(Xᵢ)‖₂`.
pub fn grad_u_sup(grad_u: &[Mat3], dim: usize) -> f64 {
    grad_u.iter().map(|m| operator_norm(m, dim)).fold(0.0, f64::max)
}

/// `exp ∫ ‖∇u‖_∞ dt` by the trapezoid rule on a uniform history.
pub fn lambda_accumulate(history: &[f64], dt: f64) -> Result<f64, DynamicsError> {
    if history.iter().any(|v| !(*v >= 0.0)) {
        return Err(DynamicsError::InvalidArgument("grad_u_sup history must be nonnegative".into()));
    }
    if history.len() < 2 {
        return Ok(1.0);
    }
    let inner: f64 = history[1..history.len() - 1].iter().sum();
    let integral = dt * (0.5 * (history[0] + history[history.len() - 1]) + inner);
    Ok(integral.exp())
}

/// Extreme values of `|aᵢ − aⱼ| / |Xᵢ − Xⱼ|` over `sample_pairs` seeded random
/// pairs plus every nearest-neighbour pair in label space.
pub fn chord_arc(state: &ParticleState, sample_pairs: usize, seed: u64) -> Result<ChordArc, DynamicsError> {
    let n = state.len();
    if n < 2 {
        return Err(DynamicsError::InvalidState("chord-arc needs two particles".into()));
    }
    let mut out = ChordArc { min: f64::INFINITY, max: 0.0, pairs: 0, coincident: false };
    let mut visit = |i: usize, j: usize| {
        let da = dist(&state.labels[i], &state.labels[j]);
        let dx = dist(&state.positions[i], &state.positions[j]);
        let r = if dx == 0.0 {
            out.coincident = true;
            f64::INFINITY
        } else {
            da / dx
        };
        out.min = out.min.min(r);
        out.max = out.max.max(r);
        out.pairs += 1;
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..sample_pairs {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        visit(i, j);
    }
    match &state.grid {
        Some(g) if g.n_per_axis.pow(state.dim as u32) == n => {
            let m = g.n_per_axis;
            for i in 0..n {
                for axis in 0..state.dim {
                    let s = m.pow(axis as u32);
                    if (i / s) % m + 1 < m {
                        visit(i, i + s);
                    }
                }
            }
        }
        _ => {
            for i in 0..n {
                let j = (0..n)
                    .filter(|&j| j != i)
                    .min_by(|&a, &b| {
                        dist(&state.labels[i], &state.labels[a]).total_cmp(&dist(&state.labels[i], &state.labels[b]))
                    })
                    .expect("at least two particles");
                visit(i, j);
            }
        }
    }
    Ok(out)
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    norm(&[a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

/// Point-vortex Hamiltonian, linear impulse and angular impulse, with
/// circulations `Γᵢ = wᵢω₀ᵢ`.
pub fn invariants_euler2d(state: &ParticleState) -> PointVortexInvariants {
    let gamma: Vec<f64> = (0..state.len()).map(|i| state.weights[i] * state.omega0[i][2]).collect();
    let x = &state.positions;
    let mut h = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            h += gamma[i] * gamma[j] * dist(&x[i], &x[j]).ln();
        }
    }
    let mut p = [0.0; 2];
    let mut ang = 0.0;
    for (g, xi) in gamma.iter().zip(x) {
        p[0] += g * xi[0];
        p[1] += g * xi[1];
        ang += g * (xi[0] * xi[0] + xi[1] * xi[1]);
    }
    PointVortexInvariants { hamiltonian: -h / (4.0 * PI), momentum: p, angular_impulse: ang }
}

/// `max_i |det Gᵢ − 1|`.
pub fn incompressibility_residual(state: &ParticleState) -> f64 {
    state.gradients.iter().map(|g| (det(g) - 1.0).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_norms() {
        let a = [[3.0, 0.0, 0.0], [4.0, 5.0, 0.0], [0.0, 0.0, 1.0]];
        // singular values of [[3,0],[4,5]] are 3√5 and √5
        assert!((operator_norm(&a, 2) - 45f64.sqrt()).abs() < 1e-12);
        let b = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, -1.0]];
        assert!((operator_norm(&b, 3) - 3.0).abs() < 1e-12);
        let rot = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
        assert!((operator_norm(&rot, 3) - 1.0).abs() < 1e-12);
        let diag = [[0.5, 0.0, 0.0], [0.0, -7.0, 0.0], [0.0, 0.0, 2.0]];
        assert_eq!(operator_norm(&diag, 3), 7.0);
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_accumulate(&[0.0; 10], 0.1).unwrap(), 1.0);
        let l = lambda_accumulate(&[0.7; 11], 0.2).unwrap();
        assert!((l - (0.7f64 * 2.0).exp()).abs() < 1e-12);
        assert!(lambda_accumulate(&[-1.0, 0.0], 0.1).is_err());
    }

    #[test]
    fn two_vortex_invariants_at_start() {
        let s = ParticleState::point_vortices(&[[0.0, 0.0], [1.0, 0.0]], &[1.0, 1.0]).unwrap();
        let inv = invariants_euler2d(&s);
        assert_eq!(inv.hamiltonian, 0.0);
        assert_eq!(inv.momentum, [1.0, 0.0]);
        assert_eq!(inv.angular_impulse, 1.0);
    }
}
