use serde::Serialize;

use super::{estimate_radius, time_jets_fast, TaylorError, TrajectoryJets};
use crate::dynamics::{ModelSpec, ParticleState};
use crate::jets::Jet;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepReport {
    pub h: f64,
    pub order: usize,
    /// Ratio-test radius used to size the step (may be infinite).
    pub radius: f64,
    /// `max_i |c_N|·h^N`.
    pub truncation: f64,
}

/// Advances by a fixed `h` using jets of the given order.
pub fn taylor_advance(
    spec: &ModelSpec,
    state: &ParticleState,
    order: usize,
    h: f64,
) -> Result<(ParticleState, TrajectoryJets), TaylorError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(TaylorError::InvalidParameter(format!("h = {h}")));
    }
    let jets = time_jets_fast(spec, state, order)?;
    let mut next = state.clone();
    next.positions = jets.eval_positions(h);
    if let Some(g) = jets.eval_gradients(h) {
        next.gradients = g;
    }
    next.t = state.t + h;
    let finite = next.positions.iter().flatten().all(|v| v.is_finite())
        && next.gradients.iter().flatten().flatten().all(|v| v.is_finite());
    if !finite {
        return Err(TaylorError::NumericalFailure("Taylor step".into()));
    }
    Ok((next, jets))
}

/// One Taylor step of size `h = safety·min(radius, h_cap)`, where the radius
/// is the ratio-test estimate from the jets at the current time.
pub fn taylor_step(
    spec: &ModelSpec,
    state: &ParticleState,
    order: usize,
    safety: f64,
    h_cap: Option<f64>,
) -> Result<(ParticleState, StepReport), TaylorError> {
    if !(safety > 0.0 && safety < 1.0) {
        return Err(TaylorError::InvalidParameter(format!("safety = {safety}")));
    }
    if let Some(c) = h_cap {
        if !(c > 0.0) {
            return Err(TaylorError::InvalidParameter(format!("h_cap = {c}")));
        }
    }
    let jets = time_jets_fast(spec, state, order)?;
    let est = estimate_radius(&jets)?;
    let radius = if est.no_finite_radius { f64::INFINITY } else { est.ratio };
    let bound = match h_cap {
        Some(c) => radius.min(c),
        None => radius,
    };
    if !bound.is_finite() {
        return Err(TaylorError::NoFiniteRadius);
    }
    let h = safety * bound;
    let mut next = state.clone();
    next.positions = jets.eval_positions(h);
    if let Some(g) = jets.eval_gradients(h) {
        next.gradients = g;
    }
    next.t = state.t + h;
    if !next.positions.iter().flatten().all(|v| v.is_finite()) {
        return Err(TaylorError::NumericalFailure("Taylor step".into()));
    }
    let truncation = (0..jets.len()).map(|i| jets.coeff_norm(i, order)).fold(0.0, f64::max) * h.powi(order as i32);
    Ok((next, StepReport { h, order, radius, truncation }))
}

/// Taylor coefficients at 0 of the solution of `g′ = h(g)`, `g(0) = g0`.
/// `h` maps a jet of `g` to the jet of `h∘g` of the same order.
pub fn ode1d_testbed(h: impl Fn(&Jet) -> Jet, g0: f64, order: usize) -> Jet {
    let mut coeffs = vec![g0];
    for n in 0..order {
        let rhs = h(&Jet::new(coeffs.clone()));
        coeffs.push(rhs.coeffs()[n] / (n + 1) as f64);
    }
    Jet::new(coeffs)
}
