use super::{DynamicsError, GridInfo, ParticleState, Vec3};

/// Initial scalar data sampled at labels.
pub trait ScalarField: Sync {
    fn value(&self, a: &Vec3) -> f64;

    /// Analytic gradient, if known. Otherwise the grid is differenced.
    fn gradient(&self, _a: &Vec3) -> Option<Vec3> {
        None
    }
}

impl<F: Fn(&Vec3) -> f64 + Sync> ScalarField for F {
    fn value(&self, a: &Vec3) -> f64 {
        self(a)
    }
}

/// A field with a closed-form gradient.
pub struct AnalyticField<F, G> {
    pub value: F,
    pub gradient: G,
}

impl<F, G> ScalarField for AnalyticField<F, G>
where
    F: Fn(&Vec3) -> f64 + Sync,
    G: Fn(&Vec3) -> Vec3 + Sync,
{
    fn value(&self, a: &Vec3) -> f64 {
        (self.value)(a)
    }

    fn gradient(&self, a: &Vec3) -> Option<Vec3> {
        Some((self.gradient)(a))
    }
}

/// The cube `[lo, hi]^dim` cut into `n_per_axis^dim` cells.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    pub lo: f64,
    pub hi: f64,
    pub n_per_axis: usize,
}

/// Particles at cell centers with weights equal to the cell volume.
///
/// Labels are ordered with the first axis varying fastest. The vorticity
/// sampler returns a vector; 2D models read its third component.
pub fn init_grid(
    grid: GridSpec,
    theta0: &dyn ScalarField,
    omega0: Option<&(dyn Fn(&Vec3) -> Vec3 + Sync)>,
) -> Result<ParticleState, DynamicsError> {
    let GridSpec { dim, lo, hi, n_per_axis: n } = grid;
    if n < 2 {
        return Err(DynamicsError::InvalidArgument(format!("n_per_axis = {n}")));
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(DynamicsError::InvalidArgument(format!("degenerate extent [{lo}, {hi}]")));
    }
    if !(dim == 2 || dim == 3) {
        return Err(DynamicsError::InvalidArgument(format!("dimension {dim}")));
    }
    let h = (hi - lo) / n as f64;
    let count = n.pow(dim as u32);
    let center = |k: usize| lo + (k as f64 + 0.5) * h;
    let index = |i: usize| -> [usize; 3] { [i % n, (i / n) % n, if dim == 3 { i / (n * n) } else { 0 }] };
    let labels: Vec<Vec3> = (0..count)
        .map(|i| {
            let k = index(i);
            [center(k[0]), center(k[1]), if dim == 3 { center(k[2]) } else { 0.0 }]
        })
        .collect();
    let mut state = ParticleState::at_labels(dim, labels, vec![h.powi(dim as i32); count])?;
    state.theta0 = state.labels.iter().map(|a| theta0.value(a)).collect();
    if state.theta0.iter().any(|v| !v.is_finite()) {
        return Err(DynamicsError::InvalidArgument("theta0 sampler returned a non-finite value".into()));
    }
    let stride = |axis: usize| n.pow(axis as u32);
    for i in 0..count {
        state.grad_theta0[i] = match theta0.gradient(&state.labels[i]) {
            Some(g) => g,
            None => {
                let k = index(i);
                let mut g = [0.0; 3];
                for (axis, slot) in g.iter_mut().enumerate().take(dim) {
                    let s = stride(axis);
                    let f = &state.theta0;
                    *slot = if k[axis] == 0 {
                        (f[i + s] - f[i]) / h
                    } else if k[axis] == n - 1 {
                        (f[i] - f[i - s]) / h
                    } else {
                        (f[i + s] - f[i - s]) / (2.0 * h)
                    };
                }
                g
            }
        };
    }
    if let Some(w) = omega0 {
        for (o, a) in state.omega0.iter_mut().zip(&state.labels) {
            let v = w(a);
            *o = if dim == 2 { [0.0, 0.0, v[2]] } else { v };
        }
    }
    state.grid = Some(GridInfo { n_per_axis: n, lo, hi });
    Ok(state)
}
