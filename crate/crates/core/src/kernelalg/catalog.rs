use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::expr::{KernelExpr, KernelTerm, TermSum};
use super::KernelError;
use crate::combinatorics::MultiIndex;

/// The five particle models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Euler2D,
    Sqg,
    Ipm,
    Boussinesq2D,
    Euler3D,
}

impl Model {
    pub const ALL: [Model; 5] = [Model::Euler2D, Model::Sqg, Model::Ipm, Model::Boussinesq2D, Model::Euler3D];

    pub fn tag(self) -> &'static str {
        match self {
            Model::Euler2D => "euler2d",
            Model::Sqg => "sqg",
            Model::Ipm => "ipm",
            Model::Boussinesq2D => "boussinesq2d",
            Model::Euler3D => "euler3d",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Model::Euler3D => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Model {
    type Err = KernelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Model::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| KernelError::UnknownModel(s.to_string()))
    }
}

/// Exact kernels of one model.
///
/// The velocity is `u(x) = Σ_m velocity[m](x − y) ρ_m` and the nonlocal part
/// of `∇u` is `Σ_m gradient[m](x − y) σ_m`, where `ρ` and `σ` are the model's
/// Lagrangian densities (scalar in 2D Euler-type models; vector for the SQG
/// gradient density and in 3D). Gradient matrices are row-major with entry
/// `(i, k)` contributing to `∂u_i/∂x_k`.
#[derive(Clone, Debug)]
pub struct KernelCatalogEntry {
    pub model: Model,
    pub velocity: Vec<KernelExpr>,
    pub gradient: Vec<KernelExpr>,
    /// Homogeneity of the velocity kernels near the origin.
    pub singularity_order: i32,
    /// Homogeneity of the gradient kernels.
    pub gradient_singularity_order: i32,
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn term(c: BigRational, pi: i32, mono: &[u32], p: i32, rate: BigRational) -> KernelTerm {
    KernelTerm::new(c, pi, MultiIndex::new(mono.to_vec()), p, rate)
}

/// `c · y^mono · |y|^{−p} / π` as a one-term sum.
fn mono_over_pi(dim: usize, c: BigRational, mono: &[u32], p: i32) -> TermSum {
    TermSum::from_terms(dim, [term(c, -1, mono, p, BigRational::zero())])
}

/// `y⊥/(2π|y|^p)` with `y⊥ = (−y₂, y₁)`.
fn perp_kernel(p: i32) -> KernelExpr {
    KernelExpr::vector(vec![
        mono_over_pi(2, q(-1, 2), &[0, 1], p),
        mono_over_pi(2, q(1, 2), &[1, 0], p),
    ])
}

/// SQG velocity kernel `y⊥/(2π|y|³)`.
pub fn sqg_kernel() -> KernelExpr {
    perp_kernel(3)
}

/// 2D Biot–Savart kernel `y⊥/(2π|y|²)`.
pub fn biot_savart_2d() -> KernelExpr {
    perp_kernel(2)
}

/// Strain kernel of the 2D Biot–Savart law,
/// `(1/2π|y|⁴)[[2y₁y₂, y₂²−y₁²], [y₂²−y₁², −2y₁y₂]]`.
pub fn strain_kernel_2d() -> KernelExpr {
    let off = mono_over_pi(2, q(1, 2), &[0, 2], 4).add(&mono_over_pi(2, q(-1, 2), &[2, 0], 4));
    KernelExpr::matrix(
        2,
        vec![
            mono_over_pi(2, q(1, 1), &[1, 1], 4),
            off.clone(),
            off,
            mono_over_pi(2, q(-1, 1), &[1, 1], 4),
        ],
    )
}

fn levi_civita(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

fn unit_mono(dims: &[usize]) -> [u32; 3] {
    let mut m = [0u32; 3];
    for &d in dims {
        m[d] += 1;
    }
    m
}

/// 3D Biot–Savart kernels: `V^{(m)}(y) = (e_m × y)/(4π|y|³)`, so that
/// `u = Σ_m V^{(m)} ρ_m = ρ × y/(4π|y|³)`.
pub fn biot_savart_3d() -> Vec<KernelExpr> {
    (0..3)
        .map(|m| {
            let comps = (0..3)
                .map(|i| {
                    let mut s = TermSum::zero(3);
                    for k in 0..3 {
                        let e = levi_civita(i, m, k);
                        if e != 0 {
                            s.push(term(q(e, 4), -1, &unit_mono(&[k]), 3, BigRational::zero()));
                        }
                    }
                    s
                })
                .collect();
            KernelExpr::vector(comps)
        })
        .collect()
}

/// 3D strain kernels `T^{(m)}_{ik} = (3/8π)[(y×e_m)_i y_k + (y×e_m)_k y_i]/|y|⁵`.
pub fn strain_kernel_3d() -> Vec<KernelExpr> {
    (0..3)
        .map(|m| {
            let mut comps = Vec::with_capacity(9);
            for i in 0..3 {
                for k in 0..3 {
                    let mut s = TermSum::zero(3);
                    // (y × e_m)_i = ε_{i a m} y_a
                    for a in 0..3 {
                        let e = levi_civita(i, a, m);
                        if e != 0 {
                            s.push(term(q(3 * e, 8), -1, &unit_mono(&[a, k]), 5, BigRational::zero()));
                        }
                        let e = levi_civita(k, a, m);
                        if e != 0 {
                            s.push(term(q(3 * e, 8), -1, &unit_mono(&[a, i]), 5, BigRational::zero()));
                        }
                    }
                    comps.push(s);
                }
            }
            KernelExpr::matrix(3, comps)
        })
        .collect()
}

/// `v ⊗ e_m` for every `m`: the gradient kernels of a velocity kernel
/// contracted with a vector density.
fn outer_with_units(v: &KernelExpr) -> Vec<KernelExpr> {
    let d = v.dim();
    (0..d)
        .map(|m| {
            let mut comps = Vec::with_capacity(d * d);
            for i in 0..d {
                for k in 0..d {
                    comps.push(if k == m { v.components()[i].clone() } else { TermSum::zero(d) });
                }
            }
            KernelExpr::matrix(d, comps)
        })
        .collect()
}

/// Exact kernels for `model`.
///
/// The IPM entry carries the vorticity sign: its density is the bracket
/// `{θ₀, X₂}`, and the vorticity is minus that bracket.
pub fn catalog(model: Model) -> KernelCatalogEntry {
    match model {
        Model::Sqg => {
            let k = sqg_kernel();
            KernelCatalogEntry {
                model,
                gradient: outer_with_units(&k),
                velocity: vec![k],
                singularity_order: -2,
                gradient_singularity_order: -2,
            }
        }
        Model::Euler2D | Model::Boussinesq2D => KernelCatalogEntry {
            model,
            velocity: vec![biot_savart_2d()],
            gradient: vec![strain_kernel_2d()],
            singularity_order: -1,
            gradient_singularity_order: -2,
        },
        Model::Ipm => KernelCatalogEntry {
            model,
            velocity: vec![biot_savart_2d().neg()],
            gradient: vec![strain_kernel_2d().neg()],
            singularity_order: -1,
            gradient_singularity_order: -2,
        },
        Model::Euler3D => KernelCatalogEntry {
            model,
            velocity: biot_savart_3d(),
            gradient: strain_kernel_3d(),
            singularity_order: -2,
            gradient_singularity_order: -3,
        },
    }
}

/// `e^{−rate·|y|²}` as a one-term scalar sum.
pub fn gaussian(dim: usize, rate: BigRational) -> TermSum {
    TermSum::from_terms(dim, [KernelTerm::new(BigRational::one(), 0, MultiIndex::zero(dim), 0, rate)])
}

/// Splits a Gaussian-free kernel into `expr·e^{−|y|²}` and `expr·(1 − e^{−|y|²})`.
pub fn split_gaussian(expr: &KernelExpr) -> Result<(KernelExpr, KernelExpr), KernelError> {
    if !expr.components().iter().all(TermSum::is_gauss_free) {
        return Err(KernelError::AlreadyGaussian);
    }
    let g = gaussian(expr.dim(), BigRational::one());
    let inner = expr.mul_scalar(&g);
    let outer = expr.sub(&inner)?;
    Ok((inner, outer))
}

/// `K_in^{(1)} = −e^{−|y|²}/(2π|y|)` and `K_in^{(2)} = −y⊥e^{−|y|²}/(π|y|)`,
/// with `∇⊥K_in^{(1)} + K_in^{(2)} = K_in` for the SQG kernel.
pub fn decompose_kin(model: Model) -> Result<(KernelExpr, KernelExpr), KernelError> {
    if model != Model::Sqg {
        return Err(KernelError::UnsupportedModel(model));
    }
    let one = BigRational::one();
    let k1 = TermSum::from_terms(2, [term(q(-1, 2), -1, &[0, 0], 1, one.clone())]);
    let k2 = KernelExpr::vector(vec![
        TermSum::from_terms(2, [term(q(1, 1), -1, &[0, 1], 1, one.clone())]),
        TermSum::from_terms(2, [term(q(-1, 1), -1, &[1, 0], 1, one)]),
    ]);
    Ok((KernelExpr::scalar(k1), k2))
}

/// `∇⊥f = (−∂₂f, ∂₁f)` of a 2D scalar kernel.
pub fn perp_gradient(f: &KernelExpr) -> Result<KernelExpr, KernelError> {
    if f.dim() != 2 || f.shape() != super::Shape::Scalar {
        return Err(KernelError::ShapeMismatch);
    }
    let s = &f.components()[0];
    Ok(KernelExpr::vector(vec![s.derive(1).neg(), s.derive(0)]))
}

/// `expr·(1 − e^{−|y|²/δ²})`.
pub fn regularize(expr: &KernelExpr, delta: f64) -> Result<KernelExpr, KernelError> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(KernelError::InvalidDelta(delta));
    }
    let d = BigRational::from_float(delta).ok_or(KernelError::InvalidDelta(delta))?;
    let rate = BigRational::one() / (&d * &d);
    let factor = TermSum::constant(expr.dim(), BigRational::one(), 0).sub(&gaussian(expr.dim(), rate));
    Ok(expr.mul_scalar(&factor))
}

/// The SQG inner kernel `K_in = y⊥e^{−|y|²}/(2π|y|³)`.
pub fn sqg_inner() -> KernelExpr {
    split_gaussian(&sqg_kernel()).expect("SQG kernel is Gaussian free").0
}
