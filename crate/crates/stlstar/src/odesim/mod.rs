//! Parameterized ODE models and fixed-step integration into timed state
//! sequences. Ships the two built-in population models (an epidemic
//! outbreak and a predator-prey system) plus models assembled from
//! arithmetic right-hand-side expressions.

mod expr;

pub use expr::{parse_expr, Expr, ExprError};

use thiserror::Error;

use crate::signal::TimedStateSequence;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("unknown builtin model `{0}` (available: sir, lotka_volterra)")]
    UnknownModel(String),
    #[error("sampling step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("horizon {horizon} shorter than one step {step}")]
    HorizonTooShort { horizon: f64, step: f64 },
    #[error("initial state has {got} values, model `{model}` has {expected} variables")]
    InitDimension {
        model: String,
        got: usize,
        expected: usize,
    },
    #[error("parameter vector has {got} values, model `{model}` has {expected} parameters")]
    ParamDimension {
        model: String,
        got: usize,
        expected: usize,
    },
    #[error("state became non-finite at t = {time} (diverging trajectory)")]
    NonFinite { time: f64 },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

enum Rhs {
    Builtin(fn(&[f64], &[f64], &mut [f64])),
    Exprs(Vec<Expr>),
}

/// A deterministic first-order ODE system `dx/dt = f(x; p)` with named
/// state variables and parameters, default initial state and default
/// parameter values.
pub struct OdeModel {
    name: String,
    state_names: Vec<String>,
    param_names: Vec<String>,
    default_init: Vec<f64>,
    default_params: Vec<f64>,
    rhs: Rhs,
}

impl OdeModel {
    /// A model whose derivatives are arithmetic expressions over the state
    /// variables and parameters.
    pub fn from_expressions(
        name: impl Into<String>,
        states: Vec<(String, String, f64)>, // (variable, rhs expression, initial value)
        params: Vec<(String, f64)>,
    ) -> Result<Self, SimError> {
        let state_names: Vec<String> = states.iter().map(|(n, _, _)| n.clone()).collect();
        let param_names: Vec<String> = params.iter().map(|(n, _)| n.clone()).collect();
        let exprs = states
            .iter()
            .map(|(_, rhs, _)| parse_expr(rhs, &state_names, &param_names))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(OdeModel {
            name: name.into(),
            default_init: states.iter().map(|(_, _, init)| *init).collect(),
            default_params: params.iter().map(|(_, v)| *v).collect(),
            state_names,
            param_names,
            rhs: Rhs::Exprs(exprs),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn param_names(&self) -> &[String] {
        &self.param_names
    }

    pub fn default_init(&self) -> &[f64] {
        &self.default_init
    }

    pub fn default_params(&self) -> &[f64] {
        &self.default_params
    }

    pub fn dim(&self) -> usize {
        self.state_names.len()
    }

    fn derivative(&self, state: &[f64], params: &[f64], out: &mut [f64]) {
        match &self.rhs {
            Rhs::Builtin(f) => f(state, params, out),
            Rhs::Exprs(exprs) => {
                for (slot, expr) in out.iter_mut().zip(exprs) {
                    *slot = expr.eval(state, params);
                }
            }
        }
    }
}

/// Built-in case-study models by name: `sir` or `lotka_volterra`.
pub fn builtin(name: &str) -> Result<OdeModel, SimError> {
    match name {
        // susceptible/infected/recovered epidemic outbreak:
        //   dS/dt = -alpha*S*I, dI/dt = alpha*S*I - beta*I, dR/dt = beta*I
        // with contact rate alpha and recovery rate beta
        "sir" => Ok(OdeModel {
            name: "sir".into(),
            state_names: vec!["S".into(), "I".into(), "R".into()],
            param_names: vec!["alpha".into(), "beta".into()],
            default_init: vec![95.0, 5.0, 0.0],
            default_params: vec![0.01, 0.1],
            rhs: Rhs::Builtin(|x, p, out| {
                let (s, i) = (x[0], x[1]);
                let (alpha, beta) = (p[0], p[1]);
                out[0] = -alpha * s * i;
                out[1] = alpha * s * i - beta * i;
                out[2] = beta * i;
            }),
        }),
        // prey/predator oscillations:
        //   dX/dt = nu*X - alpha*X*Y, dY/dt = alpha*X*Y - mu*Y
        // with prey natality nu, predation rate alpha, predator mortality mu
        "lotka_volterra" => Ok(OdeModel {
            name: "lotka_volterra".into(),
            state_names: vec!["X".into(), "Y".into()],
            param_names: vec!["nu".into(), "alpha".into(), "mu".into()],
            default_init: vec![80.0, 20.0],
            default_params: vec![0.1, 0.005, 0.1],
            rhs: Rhs::Builtin(|x, p, out| {
                let (prey, pred) = (x[0], x[1]);
                let (nu, alpha, mu) = (p[0], p[1], p[2]);
                out[0] = nu * prey - alpha * prey * pred;
                out[1] = alpha * prey * pred - mu * pred;
            }),
        }),
        other => Err(SimError::UnknownModel(other.to_string())),
    }
}

/// Integrates the model with the classical 4th-order Runge-Kutta scheme at
/// a fixed step, sampling every step from 0 to the first grid point at or
/// past `horizon`.
pub fn integrate(
    model: &OdeModel,
    init: &[f64],
    params: &[f64],
    step: f64,
    horizon: f64,
) -> Result<TimedStateSequence, SimError> {
    if step <= 0.0 || step.is_nan() {
        return Err(SimError::NonPositiveStep(step));
    }
    if horizon < step {
        return Err(SimError::HorizonTooShort { horizon, step });
    }
    let n = model.dim();
    if init.len() != n {
        return Err(SimError::InitDimension {
            model: model.name.clone(),
            got: init.len(),
            expected: n,
        });
    }
    if params.len() != model.param_names.len() {
        return Err(SimError::ParamDimension {
            model: model.name.clone(),
            got: params.len(),
            expected: model.param_names.len(),
        });
    }

    let count = (horizon / step).ceil() as usize;
    let mut times = Vec::with_capacity(count + 1);
    let mut states = Vec::with_capacity(count + 1);
    let mut state = init.to_vec();
    times.push(0.0);
    states.push(state.clone());

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut stage = vec![0.0; n];

    for k in 1..=count {
        model.derivative(&state, params, &mut k1);
        for j in 0..n {
            stage[j] = state[j] + 0.5 * step * k1[j];
        }
        model.derivative(&stage, params, &mut k2);
        for j in 0..n {
            stage[j] = state[j] + 0.5 * step * k2[j];
        }
        model.derivative(&stage, params, &mut k3);
        for j in 0..n {
            stage[j] = state[j] + step * k3[j];
        }
        model.derivative(&stage, params, &mut k4);
        for j in 0..n {
            state[j] += step / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        let t = k as f64 * step;
        if state.iter().any(|v| !v.is_finite()) {
            return Err(SimError::NonFinite { time: t });
        }
        times.push(t);
        states.push(state.clone());
    }

    Ok(TimedStateSequence::new(model.state_names.clone(), times, states)
        .expect("integration grid is strictly increasing"))
}

/// [`integrate`] with the model's default initial state and parameters.
pub fn integrate_default(
    model: &OdeModel,
    step: f64,
    horizon: f64,
) -> Result<TimedStateSequence, SimError> {
    integrate(model, &model.default_init, &model.default_params, step, horizon)
}
