//! Monte Carlo tracking experiment: desired trajectory, perturbed initial
//! conditions, closed-loop runs and run-averaged metric series.

use std::f64::consts::PI;

use eqtrack::control::{ControllerKind, Gains};
use eqtrack::lie_poisson::{self, InertiaTensor, LPInput, LPState, VelocityModel};
use eqtrack::tracking::{self, DesiredSample, DesiredTrajectory};
use eqtrack::{AlgebraVec, CoalgebraVec, Rotation, SemidirectElement};
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{Result, SimError};

/// Desired torque profile `τ_d(t) = (cos t, sin t, cos t · sin t)`.
pub fn desired_torque(t: f64) -> CoalgebraVec {
    let (s, c) = t.sin_cos();
    CoalgebraVec::new(c, s, c * s)
}

/// Desired trajectory from rest at the identity under [`desired_torque`].
pub fn desired_trajectory(inertia: &InertiaTensor, dt: f64, t_final: f64) -> Result<DesiredTrajectory> {
    let x0 = SemidirectElement::identity();
    Ok(DesiredTrajectory::simulate(inertia, x0, desired_torque, dt, t_final)?)
}

/// Intrinsic ZYX (yaw, pitch, roll) rotation `R_z(ψ) R_y(θ) R_x(φ)`.
pub fn euler_zyx(yaw: f64, pitch: f64, roll: f64) -> Rotation {
    Rotation::about_axis(2, yaw)
        * Rotation::about_axis(1, pitch)
        * Rotation::about_axis(0, roll)
}

/// One draw of the initial-condition perturbation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Perturbation {
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
    /// Body angular-velocity offset `ω_p`.
    pub omega: AlgebraVec,
}

impl Perturbation {
    pub fn zero() -> Self {
        Self { yaw: 0.0, pitch: 0.0, roll: 0.0, omega: AlgebraVec::zeros() }
    }

    /// Euler angles uniform on `[−π, π]`, `ω_p ~ N(0, 1)` per axis.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let yaw = rng.random_range(-PI..=PI);
        let pitch = rng.random_range(-PI..=PI);
        let roll = rng.random_range(-PI..=PI);
        let omega = AlgebraVec::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        Self { yaw, pitch, roll, omega }
    }

    pub fn rotation(&self) -> Rotation {
        euler_zyx(self.yaw, self.pitch, self.roll)
    }
}

/// Generator for run `run_index`: ChaCha8 keyed by `seed`, stream `run_index`.
pub fn run_rng(seed: u64, run_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run_index as u64);
    rng
}

/// Plant initial state `R(0) = R_d(0) R_p`, `ω(0) = ω_d(0) + ω_p`, `π(0) = 𝕀ω(0)`.
pub fn perturb_initial(perturbation: &Perturbation, desired: &DesiredSample, inertia: &InertiaTensor) -> LPState {
    let q = desired.q * perturbation.rotation();
    let omega = desired.v + perturbation.omega;
    let p = inertia.momentum(&omega, desired.t);
    LPState::new(SemidirectElement::new(q, p), desired.t)
}

/// Metrics at one sample time.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SimRecord {
    pub t: f64,
    /// Geodesic attitude error `‖log R_E‖` in rad.
    pub att_err: f64,
    /// `‖π − π_d‖`.
    pub mom_err: f64,
    /// `‖τ‖²` of the torque held over the next step.
    pub ctrl_effort: f64,
    /// `∫₀ᵗ ‖τ‖² dt` by the left rectangle rule.
    pub cum_energy: f64,
    pub lyapunov: f64,
}

impl SimRecord {
    pub fn is_finite(&self) -> bool {
        [self.t, self.att_err, self.mom_err, self.ctrl_effort, self.cum_energy, self.lyapunov]
            .iter()
            .all(|v| v.is_finite())
    }

    fn accumulate(&mut self, other: &SimRecord) {
        self.att_err += other.att_err;
        self.mom_err += other.mom_err;
        self.ctrl_effort += other.ctrl_effort;
        self.cum_energy += other.cum_energy;
        self.lyapunov += other.lyapunov;
    }

    fn scale(&mut self, s: f64) {
        self.att_err *= s;
        self.mom_err *= s;
        self.ctrl_effort *= s;
        self.cum_energy *= s;
        self.lyapunov *= s;
    }
}

/// Shared inputs of every closed-loop run.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub inertia: InertiaTensor,
    pub gains: Gains,
    pub desired: DesiredTrajectory,
    pub t_final: f64,
}

impl Scenario {
    pub fn new(inertia: InertiaTensor, gains: Gains, dt: f64, t_final: f64) -> Result<Self> {
        let desired = desired_trajectory(&inertia, dt, t_final)?;
        Ok(Self { inertia, gains, desired, t_final })
    }

    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        Self::new(cfg.inertia.clone(), cfg.gains, cfg.dt, cfg.t_final)
    }

    pub fn dt(&self) -> f64 {
        self.desired.dt()
    }

    /// Closed-loop run of `kind` from `initial`, one record per step.
    ///
    /// The desired torque enters as a continuous feed-forward and the
    /// feedback correction is held over each step.
    pub fn run_single(&self, kind: ControllerKind, initial: &LPState) -> Result<Vec<SimRecord>> {
        let (inertia, gains) = (&self.inertia, &self.gains);
        let model = VelocityModel::Constrained(inertia.clone());
        let controller = |k: usize, state: &LPState| -> eqtrack::Result<LPInput> {
            let tau = kind.torque(state, self.desired.sample(k), inertia, gains)?;
            Ok(LPInput::new(AlgebraVec::zeros(), tau))
        };
        let samples =
            lie_poisson::simulate_with_feedforward(initial, &model, desired_torque, controller, self.t_final, self.dt())?;

        let dt = self.dt();
        let mut cum_energy = 0.0;
        let mut out = Vec::with_capacity(samples.len());
        for (k, sample) in samples.iter().enumerate() {
            let desired = self.desired.sample(k);
            let x = &sample.state.x;
            let e = tracking::error(x, &desired.element());
            let ctrl_effort = sample.input.t.0.norm_squared();
            out.push(SimRecord {
                t: sample.state.t,
                att_err: e.q.angle(),
                mom_err: (x.p - desired.p).norm(),
                ctrl_effort,
                cum_energy,
                lyapunov: kind.lyapunov(&sample.state, desired, inertia, gains)?,
            });
            cum_energy += ctrl_effort * dt;
        }
        Ok(out)
    }
}

/// Run-averaged series for one controller kind.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub kind: ControllerKind,
    pub records: Vec<SimRecord>,
}

impl Series {
    /// Mean record at the sample closest to `t`.
    pub fn at(&self, t: f64) -> &SimRecord {
        let dt = if self.records.len() > 1 { self.records[1].t - self.records[0].t } else { 1.0 };
        let k = ((t - self.records[0].t) / dt).round().max(0.0) as usize;
        &self.records[k.min(self.records.len() - 1)]
    }

    pub fn last(&self) -> &SimRecord {
        self.records.last().expect("series is never empty")
    }
}

/// Runs every configured controller on `cfg.runs` paired perturbations.
///
/// Run `i` draws one [`Perturbation`] from [`run_rng`]`(seed, i)` and every
/// kind starts from it. Runs execute in parallel batches; per-kind sums are
/// accumulated in run-index order so the result does not depend on the
/// thread schedule.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<Series>> {
    cfg.validate()?;
    let scenario = Scenario::from_config(cfg)?;
    let initial_desired = *scenario.desired.sample(0);
    let n = scenario.desired.len();
    let kinds = &cfg.controllers;

    let mut sums: Vec<Vec<SimRecord>> = kinds
        .iter()
        .map(|_| {
            (0..n)
                .map(|k| SimRecord { t: scenario.desired.sample(k).t, ..SimRecord::default() })
                .collect()
        })
        .collect();

    let batch = 4 * rayon::current_num_threads().max(1);
    let mut start = 0;
    while start < cfg.runs {
        let end = (start + batch).min(cfg.runs);
        let results: Vec<Result<Vec<Vec<SimRecord>>>> = (start..end)
            .into_par_iter()
            .map(|run| {
                let perturbation = Perturbation::sample(&mut run_rng(cfg.seed, run));
                let initial = perturb_initial(&perturbation, &initial_desired, &scenario.inertia);
                kinds
                    .iter()
                    .map(|&kind| {
                        let records = scenario
                            .run_single(kind, &initial)
                            .map_err(|source| SimError::diverged(run, cfg.seed, kind, source.to_string()))?;
                        if let Some(bad) = records.iter().find(|r| !r.is_finite()) {
                            return Err(SimError::diverged(
                                run,
                                cfg.seed,
                                kind,
                                format!("non-finite metrics at t = {}", bad.t),
                            ));
                        }
                        Ok(records)
                    })
                    .collect()
            })
            .collect();
        for per_run in results {
            for (sum, records) in sums.iter_mut().zip(per_run?) {
                for (acc, r) in sum.iter_mut().zip(&records) {
                    acc.accumulate(r);
                }
            }
        }
        start = end;
    }

    let inv = 1.0 / cfg.runs as f64;
    Ok(kinds
        .iter()
        .zip(sums)
        .map(|(&kind, mut records)| {
            records.iter_mut().for_each(|r| r.scale(inv));
            Series { kind, records }
        })
        .collect())
}

/// `cum_energy(EqT) / cum_energy(GT)` at time `t`, when both kinds are
/// present and `t` lies within the simulated horizon.
pub fn energy_ratio(series: &[Series], t: f64) -> Option<f64> {
    let find = |kind| series.iter().find(|s| s.kind == kind);
    let (eqt, gt) = (find(ControllerKind::EqT)?, find(ControllerKind::GT)?);
    if t > eqt.last().t + 1e-9 {
        return None;
    }
    Some(eqt.at(t).cum_energy / gt.at(t).cum_energy)
}
