//! Built-in initial conditions.

use std::f64::consts::PI;

use lagpath::dynamics::{init_grid, GridSpec, ParticleState, ScalarField, Vec3};
use lagpath::kernelalg::Model;

use crate::config::{FieldSpec, GridConfig, ScenarioSpec};
use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Scenario {
    /// Two unit vortices a unit distance apart; they corotate with period 2π².
    TwoVortex,
    /// Opposite unit vortices a unit distance apart; they translate at 1/(2π).
    VortexPair,
    /// Gaussian θ₀ = ½·exp(−|a|²/¼).
    SqgBump,
    /// Stable density layer with a sinusoidal interface.
    IpmStratified,
    /// Buoyant Gaussian blob below the origin, fluid at rest.
    BoussinesqBubble,
    /// Gaussian-cored vortex ring of radius 0.6 in the x₃ = 0 plane.
    Euler3dRing,
    /// An analytic field: ω₀ for Euler2D, θ₀ otherwise.
    Field(FieldSpec),
}

pub const TAGS: [&str; 6] = ["two_vortex", "vortex_pair", "sqg_bump", "ipm_stratified", "boussinesq_bubble", "euler3d_ring"];

const SQG_BUMP: FieldSpec = FieldSpec::Gaussian { amplitude: 0.5, width: 0.5, center: [0.0, 0.0] };
const IPM_LAYER: FieldSpec = FieldSpec::Layer { amplitude: 1.0, thickness: 0.5, perturbation: 0.1 };
const BUBBLE: FieldSpec = FieldSpec::Gaussian { amplitude: 0.5, width: 0.3, center: [0.0, -0.4] };

impl ScalarField for FieldSpec {
    fn value(&self, a: &Vec3) -> f64 {
        match *self {
            FieldSpec::Gaussian { amplitude, width, center } => {
                let (x, y) = (a[0] - center[0], a[1] - center[1]);
                amplitude * (-(x * x + y * y) / (width * width)).exp()
            }
            FieldSpec::Layer { amplitude, thickness, perturbation } => {
                -amplitude * ((a[1] - perturbation * (PI * a[0]).sin()) / thickness).tanh()
            }
        }
    }

    fn gradient(&self, a: &Vec3) -> Option<Vec3> {
        Some(match *self {
            FieldSpec::Gaussian { width, center, .. } => {
                let v = self.value(a);
                let k = -2.0 / (width * width);
                [k * (a[0] - center[0]) * v, k * (a[1] - center[1]) * v, 0.0]
            }
            FieldSpec::Layer { amplitude, thickness, perturbation } => {
                let z = (a[1] - perturbation * (PI * a[0]).sin()) / thickness;
                let d = -amplitude / (thickness * z.cosh().powi(2));
                [-d * perturbation * PI * (PI * a[0]).cos(), d, 0.0]
            }
        })
    }
}

fn ring_vorticity(a: &Vec3) -> Vec3 {
    let rho = (a[0] * a[0] + a[1] * a[1]).sqrt();
    let core = ((rho - 0.6).powi(2) + a[2] * a[2]) / 0.04;
    let mag = (-core).exp();
    if rho == 0.0 {
        [0.0; 3]
    } else {
        [-a[1] / rho * mag, a[0] / rho * mag, 0.0]
    }
}

impl Scenario {
    pub fn resolve(spec: &ScenarioSpec, model: Model) -> Result<Self, CliError> {
        let s = match spec {
            ScenarioSpec::Named(tag) => match tag.as_str() {
                "two_vortex" => Scenario::TwoVortex,
                "vortex_pair" => Scenario::VortexPair,
                "sqg_bump" => Scenario::SqgBump,
                "ipm_stratified" => Scenario::IpmStratified,
                "boussinesq_bubble" => Scenario::BoussinesqBubble,
                "euler3d_ring" => Scenario::Euler3dRing,
                other => {
                    return Err(CliError::Config(format!("unknown scenario {other:?}; expected one of {}", TAGS.join(", "))))
                }
            },
            ScenarioSpec::Field(f) => {
                match *f {
                    FieldSpec::Gaussian { amplitude, width, center } => {
                        if !(amplitude.is_finite() && width > 0.0 && width.is_finite() && center.iter().all(|c| c.is_finite())) {
                            return Err(CliError::Config("gaussian field needs finite amplitude and center, width > 0".into()));
                        }
                    }
                    FieldSpec::Layer { amplitude, thickness, perturbation } => {
                        if !(amplitude.is_finite() && thickness > 0.0 && thickness.is_finite() && perturbation.is_finite()) {
                            return Err(CliError::Config("layer field needs finite amplitude, thickness > 0".into()));
                        }
                    }
                }
                Scenario::Field(f.clone())
            }
        };
        if let Some(native) = s.native_model() {
            if native != model {
                return Err(CliError::Config(format!("scenario {} runs the {native} model, not {model}", s.tag())));
            }
        } else if model == Model::Euler3D {
            return Err(CliError::Config("inline fields are two-dimensional; euler3d needs euler3d_ring".into()));
        }
        Ok(s)
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Scenario::TwoVortex => "two_vortex",
            Scenario::VortexPair => "vortex_pair",
            Scenario::SqgBump => "sqg_bump",
            Scenario::IpmStratified => "ipm_stratified",
            Scenario::BoussinesqBubble => "boussinesq_bubble",
            Scenario::Euler3dRing => "euler3d_ring",
            Scenario::Field(FieldSpec::Gaussian { .. }) => "gaussian",
            Scenario::Field(FieldSpec::Layer { .. }) => "layer",
        }
    }

    pub fn native_model(&self) -> Option<Model> {
        match self {
            Scenario::TwoVortex | Scenario::VortexPair => Some(Model::Euler2D),
            Scenario::SqgBump => Some(Model::Sqg),
            Scenario::IpmStratified => Some(Model::Ipm),
            Scenario::BoussinesqBubble => Some(Model::Boussinesq2D),
            Scenario::Euler3dRing => Some(Model::Euler3D),
            Scenario::Field(_) => None,
        }
    }

    pub fn is_point_vortex(&self) -> bool {
        matches!(self, Scenario::TwoVortex | Scenario::VortexPair)
    }

    /// The grid used when the configuration gives none; `None` for point vortices.
    pub fn default_grid(&self) -> Option<GridConfig> {
        match self {
            Scenario::TwoVortex | Scenario::VortexPair => None,
            Scenario::SqgBump | Scenario::Field(_) => Some(GridConfig { extent: [-1.5, 1.5], n_per_axis: 32 }),
            Scenario::IpmStratified | Scenario::BoussinesqBubble => Some(GridConfig { extent: [-1.0, 1.0], n_per_axis: 32 }),
            Scenario::Euler3dRing => Some(GridConfig { extent: [-1.0, 1.0], n_per_axis: 10 }),
        }
    }

    pub fn build(&self, model: Model, grid: Option<GridConfig>) -> Result<ParticleState, CliError> {
        let bad = |e: lagpath::dynamics::DynamicsError| CliError::Config(e.to_string());
        let grid_spec = |dim: usize| -> Result<GridSpec, CliError> {
            let g = grid.ok_or_else(|| CliError::Config(format!("scenario {} needs a grid", self.tag())))?;
            Ok(GridSpec { dim, lo: g.extent[0], hi: g.extent[1], n_per_axis: g.n_per_axis })
        };
        let zero = |_: &Vec3| 0.0;
        match self {
            Scenario::TwoVortex => ParticleState::point_vortices(&[[0.0, 0.0], [1.0, 0.0]], &[1.0, 1.0]).map_err(bad),
            Scenario::VortexPair => ParticleState::point_vortices(&[[0.0, 0.5], [0.0, -0.5]], &[1.0, -1.0]).map_err(bad),
            Scenario::SqgBump => init_grid(grid_spec(2)?, &SQG_BUMP, None).map_err(bad),
            Scenario::IpmStratified => init_grid(grid_spec(2)?, &IPM_LAYER, None).map_err(bad),
            Scenario::BoussinesqBubble => init_grid(grid_spec(2)?, &BUBBLE, None).map_err(bad),
            Scenario::Euler3dRing => init_grid(grid_spec(3)?, &zero, Some(&ring_vorticity)).map_err(bad),
            Scenario::Field(f) if model == Model::Euler2D => {
                let omega = |a: &Vec3| [0.0, 0.0, f.value(a)];
                init_grid(grid_spec(2)?, &zero, Some(&omega)).map_err(bad)
            }
            Scenario::Field(f) => init_grid(grid_spec(2)?, f, None).map_err(bad),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layer_gradient_matches_differences() {
        let f = FieldSpec::Layer { amplitude: 1.3, thickness: 0.4, perturbation: 0.2 };
        let a = [0.31, -0.12, 0.0];
        let g = f.gradient(&a).unwrap();
        let h = 1e-6;
        for axis in 0..2 {
            let (mut p, mut m) = (a, a);
            p[axis] += h;
            m[axis] -= h;
            let fd = (f.value(&p) - f.value(&m)) / (2.0 * h);
            assert!((fd - g[axis]).abs() < 1e-8);
        }
    }

    #[test]
    fn scenarios_build_for_their_models() {
        let models = [Model::Euler2D, Model::Euler2D, Model::Sqg, Model::Ipm, Model::Boussinesq2D, Model::Euler3D];
        for (tag, model) in TAGS.iter().zip(models) {
            let s = Scenario::resolve(&ScenarioSpec::Named(tag.to_string()), model).unwrap();
            assert_eq!(s.native_model(), Some(model));
            let state = s.build(model, s.default_grid()).unwrap();
            assert_eq!(state.dim, model.dim());
        }
        assert!(Scenario::resolve(&ScenarioSpec::Named("sqg_bump".into()), Model::Ipm).is_err());
        assert!(Scenario::resolve(&ScenarioSpec::Named("bump".into()), Model::Sqg).is_err());
    }

    #[test]
    fn euler2d_field_sets_vorticity() {
        let f = FieldSpec::Gaussian { amplitude: 2.0, width: 0.5, center: [0.0, 0.0] };
        let g = GridConfig { extent: [-1.0, 1.0], n_per_axis: 4 };
        let s = Scenario::Field(f).build(Model::Euler2D, Some(g)).unwrap();
        assert!(s.omega0.iter().all(|w| w[2] > 0.0));
        assert!(s.theta0.iter().all(|t| *t == 0.0));
    }
}
