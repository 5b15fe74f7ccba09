//! `simulate`, `taylor` and `radius-bound`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use lagpath::dynamics::{
    chord_arc, grad_u_sup, incompressibility_residual, invariants_euler2d, rk4_step, velocity_gradient,
    write_diagnostics_csv, write_diagnostics_header, write_state_csv, write_state_header, DiagnosticsRecord, ModelSpec,
    ParticleState, PointVortexInvariants,
};
use lagpath::kernelalg::Model;
use lagpath::taylorstep::{
    estimate_radius, fit_cauchy_form, holder_stats, paper_radius_bound, taylor_step, time_jets_fast,
    write_coefficients_csv, CauchyFit, EnvelopeForm, HolderStats, RadiusBound,
};
use serde::Serialize;

use crate::config::{IntegratorKind, Plan};
use crate::CliError;

pub const STATES_CSV: &str = "states.csv";
pub const DIAGNOSTICS_CSV: &str = "diagnostics.csv";
pub const COEFFICIENTS_CSV: &str = "coefficients.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const RADIUS_BOUND_JSON: &str = "radius_bound.json";

fn spec_for(plan: &Plan) -> ModelSpec {
    // point vortices carry no gradient data worth evolving
    ModelSpec { model: plan.model, delta: plan.delta, evolve_gradients: !plan.scenario.is_point_vortex() }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct InvariantDrifts {
    pub hamiltonian: f64,
    pub momentum: f64,
    pub angular_impulse: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TaylorStepStats {
    pub min_h: f64,
    pub max_h: f64,
    pub max_truncation: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RunSummary {
    pub model: Model,
    pub scenario: String,
    pub integrator: IntegratorKind,
    pub particles: usize,
    pub steps: usize,
    pub final_t: f64,
    pub chord_min: f64,
    pub chord_max: f64,
    pub lambda: f64,
    pub det_dev: f64,
    pub grad_u_sup_max: f64,
    /// Largest relative drift over the outputs; point vortices only.
    pub invariant_drifts: Option<InvariantDrifts>,
    pub taylor: Option<TaylorStepStats>,
}

fn rel_drift(now: f64, start: f64) -> f64 {
    let d = (now - start).abs();
    if start == 0.0 {
        d
    } else {
        d / start.abs()
    }
}

struct Recorder {
    states: BufWriter<File>,
    diags: BufWriter<File>,
    model: Model,
    pair_samples: usize,
    seed: u64,
    first: Option<PointVortexInvariants>,
    summary_chord: (f64, f64),
    det_dev: f64,
    drifts: Option<InvariantDrifts>,
}

impl Recorder {
    fn record(&mut self, state: &ParticleState, lambda: f64, gsup: f64) -> Result<(), CliError> {
        let ca = chord_arc(state, self.pair_samples, self.seed)?;
        let det_dev = incompressibility_residual(state);
        let invariants = (self.model == Model::Euler2D && state.grid.is_none()).then(|| invariants_euler2d(state));
        if let Some(inv) = invariants {
            let first = *self.first.get_or_insert(inv);
            let p = |m: [f64; 2]| m[0].hypot(m[1]);
            let d = self.drifts.get_or_insert(InvariantDrifts { hamiltonian: 0.0, momentum: 0.0, angular_impulse: 0.0 });
            d.hamiltonian = d.hamiltonian.max(rel_drift(inv.hamiltonian, first.hamiltonian));
            let dp = [inv.momentum[0] - first.momentum[0], inv.momentum[1] - first.momentum[1]];
            let scale = p(first.momentum);
            d.momentum = d.momentum.max(if scale == 0.0 { p(dp) } else { p(dp) / scale });
            d.angular_impulse = d.angular_impulse.max(rel_drift(inv.angular_impulse, first.angular_impulse));
        }
        self.summary_chord.0 = self.summary_chord.0.min(ca.min);
        self.summary_chord.1 = self.summary_chord.1.max(ca.max);
        self.det_dev = self.det_dev.max(det_dev);
        let rec = DiagnosticsRecord {
            t: state.t,
            chord_min: ca.min,
            chord_max: ca.max,
            lambda_bound: lambda,
            grad_u_sup: gsup,
            det_dev,
            invariants,
        };
        write_diagnostics_csv(&mut self.diags, &rec)?;
        write_state_csv(&mut self.states, state, self.model)?;
        Ok(())
    }
}

/// Integrates the scenario to `t_end`, writing states and diagnostics every
/// `output_every` steps and at the end, then a JSON summary.
pub fn simulate(plan: &Plan) -> Result<RunSummary, CliError> {
    let spec = spec_for(plan);
    let mut state = plan.scenario.build(plan.model, plan.grid)?;
    spec.validate(&state)?;
    let dir = plan.output.as_path();
    create_dir(dir)?;
    let mut rec = Recorder {
        states: create(dir, STATES_CSV)?,
        diags: create(dir, DIAGNOSTICS_CSV)?,
        model: plan.model,
        pair_samples: plan.diagnostics.pair_samples,
        seed: plan.seed,
        first: None,
        summary_chord: (f64::INFINITY, 0.0),
        det_dev: 0.0,
        drifts: None,
    };
    write_state_header(&mut rec.states, state.dim)?;
    write_diagnostics_header(&mut rec.diags)?;

    let it = &plan.integrator;
    let dim = state.dim;
    let mut gsup = grad_u_sup(&velocity_gradient(&spec, &state)?, dim);
    let mut gmax = gsup;
    let mut integral = 0.0;
    rec.record(&state, 1.0, gsup)?;

    let t_end = it.t_end;
    let eps = 1e-12 * t_end.max(1.0);
    let mut steps = 0usize;
    let mut taylor = (it.kind == IntegratorKind::Taylor).then_some(TaylorStepStats {
        min_h: f64::INFINITY,
        max_h: 0.0,
        max_truncation: 0.0,
    });
    while t_end - state.t > eps {
        let remaining = t_end - state.t;
        let (next, h) = match &mut taylor {
            None => {
                let h = it.dt.min(remaining);
                (rk4_step(&spec, &state, h)?, h)
            }
            Some(ts) => {
                // the cap lands the last step on t_end
                let cap = it.dt.min(remaining / it.safety);
                let (next, rep) = taylor_step(&spec, &state, it.taylor_order, it.safety, Some(cap))?;
                ts.min_h = ts.min_h.min(rep.h);
                ts.max_h = ts.max_h.max(rep.h);
                ts.max_truncation = ts.max_truncation.max(rep.truncation);
                (next, rep.h)
            }
        };
        state = next;
        if t_end - state.t <= eps {
            state.t = t_end;
        }
        steps += 1;
        let g = grad_u_sup(&velocity_gradient(&spec, &state)?, dim);
        integral += 0.5 * (gsup + g) * h;
        gsup = g;
        gmax = gmax.max(g);
        let done = t_end - state.t <= eps;
        if done || steps % plan.diagnostics.output_every == 0 {
            rec.record(&state, integral.exp(), gsup)?;
        }
    }
    rec.states.flush()?;
    rec.diags.flush()?;

    let summary = RunSummary {
        model: plan.model,
        scenario: plan.scenario.tag().to_string(),
        integrator: it.kind,
        particles: state.len(),
        steps,
        final_t: state.t,
        chord_min: rec.summary_chord.0,
        chord_max: rec.summary_chord.1,
        lambda: integral.exp(),
        det_dev: rec.det_dev,
        grad_u_sup_max: gmax,
        invariant_drifts: rec.drifts,
        taylor,
    };
    write_json(dir, SUMMARY_JSON, &summary)?;
    Ok(summary)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PaperBound {
    pub r_paper: f64,
    pub c0: f64,
    pub c1: f64,
    pub enforced_constraints: Vec<String>,
    pub unenforced_constraints: Vec<String>,
    pub holder: HolderStats,
}

impl PaperBound {
    fn new(bound: RadiusBound, holder: HolderStats) -> Self {
        let names = |enforced: bool| {
            bound.provenance.iter().filter(|c| c.enforced == enforced).map(|c| c.name.clone()).collect()
        };
        Self {
            r_paper: bound.r_paper,
            c0: bound.c0,
            c1: bound.c1,
            enforced_constraints: names(true),
            unenforced_constraints: names(false),
            holder,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TaylorSummary {
    pub model: Model,
    pub scenario: String,
    pub order: usize,
    pub particles: usize,
    pub aggregate_radius: f64,
    pub root_radius: f64,
    pub no_finite_radius: bool,
    pub fitted_c: f64,
    pub fitted_r: f64,
    pub envelope_satisfied: bool,
    pub half_binomial_fit: CauchyFit,
    /// Present for SQG grid scenarios only.
    pub paper_bound: Option<PaperBound>,
}

fn sqg_paper_bound(plan: &Plan, state: &ParticleState) -> Result<Option<PaperBound>, CliError> {
    if plan.model != Model::Sqg || state.grid.is_none() {
        return Ok(None);
    }
    let rb = &plan.radius_bound;
    let stats = holder_stats(state, rb.gamma, rb.lambda, plan.diagnostics.pair_samples, plan.seed)?;
    let bound = paper_radius_bound(&stats, rb.c_k)?;
    Ok(Some(PaperBound::new(bound, stats)))
}

/// Trajectory jets of the initial state: coefficient norms, radius
/// estimates, Cauchy fits and, for SQG, the explicit radius bound.
pub fn taylor(plan: &Plan) -> Result<TaylorSummary, CliError> {
    if !matches!(plan.model, Model::Euler2D | Model::Sqg | Model::Ipm) {
        return Err(CliError::Config(format!("taylor does not support {}", plan.model)));
    }
    let spec = spec_for(plan);
    let state = plan.scenario.build(plan.model, plan.grid)?;
    spec.validate(&state)?;
    let order = plan.integrator.taylor_order;
    let jets = time_jets_fast(&spec, &state, order)?;
    let est = estimate_radius(&jets)?;
    let geo = fit_cauchy_form(&jets, EnvelopeForm::Geometric)?;
    let half = fit_cauchy_form(&jets, EnvelopeForm::HalfBinomial)?;
    let paper_bound = sqg_paper_bound(plan, &state)?;

    let dir = plan.output.as_path();
    create_dir(dir)?;
    let mut w = create(dir, COEFFICIENTS_CSV)?;
    write_coefficients_csv(&mut w, &jets)?;
    w.flush()?;
    let summary = TaylorSummary {
        model: plan.model,
        scenario: plan.scenario.tag().to_string(),
        order,
        particles: state.len(),
        aggregate_radius: est.ratio,
        root_radius: est.root,
        no_finite_radius: est.no_finite_radius,
        fitted_c: geo.c,
        fitted_r: geo.r,
        envelope_satisfied: geo.satisfied,
        half_binomial_fit: half,
        paper_bound,
    };
    write_json(dir, SUMMARY_JSON, &summary)?;
    Ok(summary)
}

/// Hölder statistics of the initial data and the explicit radius bound.
pub fn radius_bound(plan: &Plan) -> Result<PaperBound, CliError> {
    if plan.model != Model::Sqg {
        return Err(CliError::Config(format!("radius-bound applies to sqg, not {}", plan.model)));
    }
    let state = plan.scenario.build(plan.model, plan.grid)?;
    let bound = sqg_paper_bound(plan, &state)?.expect("SQG grid scenario");
    create_dir(&plan.output)?;
    write_json(&plan.output, RADIUS_BOUND_JSON, &bound)?;
    Ok(bound)
}
