//! Downward gradient flow of the energy with adaptive RK4 stepping.
//!
//! A trial step is accepted when the energy does not rise (up to a roundoff
//! allowance of `1e-14·(1+E)`) and the constraint norm grows by at most
//! `drift_tol·dt`. Rejection halves `dt`; five consecutive acceptances grow it
//! by 1.5, capped at `dt_init`. The constraint is monitored, never projected.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FlowError, RepError};
use crate::handsaw::handsaw_constraint;
use crate::quiver::StabilityParameter;
use crate::rep::{energy_and_grad, moment_complex, Representation};
use crate::linalg::{frob_all, CMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    None,
    DoubledMomentC,
    Handsaw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    pub dt_init: f64,
    pub dt_min: f64,
    pub grad_tol: f64,
    /// Converge also once the energy drops below this value; `0` disables it.
    /// Only useful when the limit is known to have zero energy.
    #[serde(default)]
    pub energy_tol: f64,
    pub max_time: f64,
    pub max_steps: usize,
    pub drift_tol: f64,
    pub sample_stride: usize,
    pub constraint: Constraint,
    /// When positive, each step is also compared with two half steps and
    /// rejected if they differ by more than `step_tol·(1+‖x‖)`.
    #[serde(default)]
    pub step_tol: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            dt_init: 1e-2,
            dt_min: 1e-9,
            grad_tol: 1e-8,
            energy_tol: 0.0,
            max_time: 1e4,
            max_steps: 1_000_000,
            drift_tol: 1e-8,
            sample_stride: 1,
            constraint: Constraint::None,
            step_tol: 0.0,
        }
    }
}

impl FlowOptions {
    pub fn with_constraint(mut self, constraint: Constraint) -> Self {
        self.constraint = constraint;
        self
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        let positive = [
            ("dt_init", self.dt_init),
            ("dt_min", self.dt_min),
            ("grad_tol", self.grad_tol),
            ("max_time", self.max_time),
            ("drift_tol", self.drift_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(FlowError::Options(format!("{name} must be positive")));
            }
        }
        if !(self.energy_tol >= 0.0) || !(self.step_tol >= 0.0) {
            return Err(FlowError::Options("energy_tol and step_tol must be non-negative".into()));
        }
        if self.dt_min >= self.dt_init {
            return Err(FlowError::Options("dt_min must be below dt_init".into()));
        }
        if self.max_steps == 0 || self.sample_stride == 0 {
            return Err(FlowError::Options("max_steps and sample_stride must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStatus {
    Converged,
    MaxTime,
    MaxSteps,
    StepUnderflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub energy: f64,
    pub grad_norm: f64,
    pub constraint_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    pub limit: Representation,
    pub status: FlowStatus,
    pub trajectory: Vec<Sample>,
    pub final_grad_norm: f64,
    pub final_energy: f64,
    pub final_time: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Largest constraint norm seen on accepted states.
    pub max_constraint_norm: f64,
}

impl FlowResult {
    pub fn converged(&self) -> bool {
        self.status == FlowStatus::Converged
    }

    /// Header `t,energy,grad_norm,constraint_norm`, one row per sample.
    pub fn trajectory_csv(&self) -> String {
        let mut out = String::from("t,energy,grad_norm,constraint_norm\n");
        for s in &self.trajectory {
            out.push_str(&format!("{:e},{:e},{:e},{:e}\n", s.t, s.energy, s.grad_norm, s.constraint_norm));
        }
        out
    }
}

/// Norm of the selected constraint at `x`.
pub fn constraint_norm(x: &Representation, constraint: Constraint) -> Result<f64, RepError> {
    match constraint {
        Constraint::None => Ok(0.0),
        Constraint::DoubledMomentC => Ok(moment_complex(x)?.norm()),
        Constraint::Handsaw => Ok(handsaw_constraint(x)?.norm()),
    }
}

fn axpy(x: &Representation, k: &[CMat], h: f64) -> Representation {
    x.displaced(k, -h)
}

/// One RK4 step of `ẋ = −grad f` given the gradient at `x`.
fn rk4_step(x: &Representation, alpha: &[f64], g1: &[CMat], dt: f64) -> Representation {
    let g2 = energy_and_grad(&axpy(x, g1, dt / 2.0), alpha).1;
    let g3 = energy_and_grad(&axpy(x, &g2, dt / 2.0), alpha).1;
    let g4 = energy_and_grad(&axpy(x, &g3, dt), alpha).1;
    let mats = x
        .mats
        .iter()
        .enumerate()
        .map(|(i, m)| m - (&g1[i] + g2[i].scale(2.0) + g3[i].scale(2.0) + &g4[i]).scale(dt / 6.0))
        .collect();
    x.with_mats(mats)
}

/// Flow with a rational stability parameter.
pub fn flow(x0: &Representation, alpha: &StabilityParameter, opts: &FlowOptions) -> Result<FlowResult, FlowError> {
    flow_f64(x0, &alpha.to_f64(), opts)
}

pub fn flow_f64(x0: &Representation, alpha: &[f64], opts: &FlowOptions) -> Result<FlowResult, FlowError> {
    opts.validate()?;
    if alpha.len() != x0.dims.len() {
        return Err(FlowError::Options(format!("{} weights for {} vertices", alpha.len(), x0.dims.len())));
    }
    if !x0.is_finite() {
        return Err(FlowError::NaN { t: 0.0, steps: 0 });
    }
    let mut x = x0.clone();
    let (mut e, mut g) = energy_and_grad(&x, alpha);
    let mut gn = frob_all(&g);
    let mut cn = constraint_norm(&x, opts.constraint)?;
    let mut t = 0.0;
    let mut dt = opts.dt_init;
    let mut streak = 0usize;
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let mut max_c = cn;
    let mut trajectory = vec![Sample { t, energy: e, grad_norm: gn, constraint_norm: cn }];
    let done = |gn: f64, e: f64| gn < opts.grad_tol || e < opts.energy_tol;

    let status = loop {
        if done(gn, e) {
            break FlowStatus::Converged;
        }
        if t >= opts.max_time {
            break FlowStatus::MaxTime;
        }
        if accepted + rejected >= opts.max_steps {
            break FlowStatus::MaxSteps;
        }
        if dt < opts.dt_min {
            break FlowStatus::StepUnderflow;
        }
        let h = dt.min(opts.max_time - t).max(opts.dt_min);
        let mut trial = rk4_step(&x, alpha, &g, h);
        let mut error_ok = true;
        if opts.step_tol > 0.0 && trial.is_finite() {
            let half = rk4_step(&x, alpha, &g, h / 2.0);
            let g_half = energy_and_grad(&half, alpha).1;
            let two_halves = rk4_step(&half, alpha, &g_half, h / 2.0);
            error_ok = trial.distance(&two_halves) <= opts.step_tol * (1.0 + x.norm());
            trial = two_halves;
        }
        let (e_new, g_new) = energy_and_grad(&trial, alpha);
        if !trial.is_finite() || !e_new.is_finite() {
            // Overflow counts as a rejection; only give up if it persists.
            rejected += 1;
            streak = 0;
            dt *= 0.5;
            if dt < opts.dt_min {
                return Err(FlowError::NaN { t, steps: accepted + rejected });
            }
            continue;
        }
        let c_new = constraint_norm(&trial, opts.constraint)?;
        let energy_ok = e_new <= e + 1e-14 * (1.0 + e);
        let drift_ok = c_new - cn <= opts.drift_tol * h;
        if energy_ok && drift_ok && error_ok {
            x = trial;
            e = e_new;
            g = g_new;
            gn = frob_all(&g);
            cn = c_new;
            max_c = max_c.max(cn);
            t += h;
            accepted += 1;
            streak += 1;
            if streak >= 5 {
                dt = (dt * 1.5).min(opts.dt_init);
                streak = 0;
            }
            if accepted % opts.sample_stride == 0 || done(gn, e) {
                trajectory.push(Sample { t, energy: e, grad_norm: gn, constraint_norm: cn });
            }
        } else {
            rejected += 1;
            streak = 0;
            dt *= 0.5;
        }
    };
    if trajectory.last().map(|s| s.t) != Some(t) {
        trajectory.push(Sample { t, energy: e, grad_norm: gn, constraint_norm: cn });
    }
    Ok(FlowResult {
        limit: x,
        status,
        trajectory,
        final_grad_norm: gn,
        final_energy: e,
        final_time: t,
        accepted_steps: accepted,
        rejected_steps: rejected,
        max_constraint_norm: max_c,
    })
}

/// Flows every input independently and in parallel; results keep input order.
pub fn flow_batch(
    xs: &[Representation],
    alpha: &StabilityParameter,
    opts: &FlowOptions,
) -> Vec<Result<FlowResult, FlowError>> {
    xs.par_iter().map(|x| flow(x, alpha, opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::c;

    #[test]
    fn a2_matches_closed_form_limit() {
        let r = flow(&fixtures::a2_rep(c(2.0, 0.0)), &fixtures::a2_stability(), &FlowOptions::default()).unwrap();
        assert!(r.converged());
        assert!((r.limit.mats[0][(0, 0)].norm() - 2f64.sqrt()).abs() < 1e-8);
        assert!(r.final_energy < 1e-12);
        for w in r.trajectory.windows(2) {
            assert!(w[1].energy <= w[0].energy + 1e-12 * (1.0 + w[0].energy));
        }
    }

    #[test]
    fn a2_trajectory_follows_the_scalar_ode() {
        // ȧ = −2a(a²/2 − 1) gives the logistic law a² = 2/(1 + (2/a0² − 1)e^{−4t}).
        let opts = FlowOptions { max_time: 0.5, ..FlowOptions::default() };
        let r = flow(&fixtures::a2_rep(c(2.0, 0.0)), &fixtures::a2_stability(), &opts).unwrap();
        assert_eq!(r.status, FlowStatus::MaxTime);
        let t = r.final_time;
        let exact = (2.0 / (1.0 - 0.5 * (-4.0 * t).exp())).sqrt();
        let err = (r.limit.mats[0][(0, 0)].re - exact).abs();
        assert!(err < 1e-7, "deviation {err:e}");
    }

    #[test]
    fn f1_keeps_the_constraint() {
        let opts = FlowOptions::default().with_constraint(Constraint::DoubledMomentC);
        let r = flow(&fixtures::f1_rep(c(0.0, 0.0), c(3.0, 0.0)), &fixtures::f1_stability(), &opts).unwrap();
        assert!(r.converged());
        assert_eq!(r.limit.mats[0][(0, 0)], c(0.0, 0.0));
        assert!((r.limit.mats[1][(0, 0)].norm() - 2f64.sqrt()).abs() < 1e-6);
        assert!(r.max_constraint_norm < 1e-8);
    }

    #[test]
    fn critical_start_returns_immediately() {
        let x = fixtures::a2_rep(c(2f64.sqrt(), 0.0));
        let r = flow(&x, &fixtures::a2_stability(), &FlowOptions::default()).unwrap();
        assert!(r.converged());
        assert_eq!(r.accepted_steps, 0);
        assert_eq!(r.limit, x);
    }

    #[test]
    fn options_and_inputs_are_checked() {
        let x = fixtures::a2_rep(c(1.0, 0.0));
        let bad = FlowOptions { dt_min: 1.0, ..FlowOptions::default() };
        assert!(matches!(flow(&x, &fixtures::a2_stability(), &bad), Err(FlowError::Options(_))));
        let nan = fixtures::a2_rep(c(f64::NAN, 0.0));
        assert!(matches!(flow(&nan, &fixtures::a2_stability(), &FlowOptions::default()), Err(FlowError::NaN { .. })));
    }

    #[test]
    fn batch_isolates_failures() {
        let xs = vec![fixtures::a2_rep(c(2.0, 0.0)), fixtures::a2_rep(c(f64::NAN, 0.0)), fixtures::a2_rep(c(0.5, 0.0))];
        let rs = flow_batch(&xs, &fixtures::a2_stability(), &FlowOptions::default());
        assert!(rs[0].as_ref().unwrap().converged());
        assert!(rs[1].is_err());
        assert!(rs[2].as_ref().unwrap().converged());
        assert!(flow_batch(&[], &fixtures::a2_stability(), &FlowOptions::default()).is_empty());
    }

    #[test]
    fn csv_has_header() {
        let r = flow(&fixtures::a2_rep(c(2.0, 0.0)), &fixtures::a2_stability(), &FlowOptions::default()).unwrap();
        let csv = r.trajectory_csv();
        assert!(csv.starts_with("t,energy,grad_norm,constraint_norm\n"));
        assert_eq!(csv.lines().count(), r.trajectory.len() + 1);
    }
}
