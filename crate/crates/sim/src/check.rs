//! Randomized identity suites run by the `check` subcommand.
//!
//! Each suite draws its inputs from a fixed ChaCha8 seed, evaluates an
//! identity on every sample and reports the worst residual against its
//! tolerance.

use std::fmt;

use eqtrack::control::{self, Gains};
use eqtrack::group::{self, exp, hat, log, pairing, vee};
use eqtrack::lie_poisson::{self, InertiaTensor, LPInput, LPState, VelocityModel};
use eqtrack::semidirect::{self, inv, mul, SemidirectAlgebra, SemidirectElement};
use eqtrack::tracking;
use eqtrack::tracking::DesiredSample;
use eqtrack::{AlgebraVec, CoalgebraVec, Mat3, Rotation, Vec3};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tolerance of exact algebraic identities.
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Tolerance of central finite-difference oracles.
pub const FD_TOL: f64 = 1e-6;
/// Step of the central finite differences.
pub const FD_STEP: f64 = 1e-5;

/// Worst residual of one identity suite.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.max_error.is_finite() && self.max_error < self.tolerance
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<28} samples={:<5} max_err={:.3e} tol={:.0e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.samples,
            self.max_error,
            self.tolerance
        )
    }
}

struct Sampler(ChaCha8Rng);

impl Sampler {
    fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    fn vec(&mut self, scale: f64) -> Vec3 {
        Vec3::from_fn(|_, _| self.0.random_range(-scale..scale))
    }

    fn algebra(&mut self) -> AlgebraVec {
        AlgebraVec(self.vec(1.0))
    }

    fn coalgebra(&mut self) -> CoalgebraVec {
        CoalgebraVec(self.vec(1.0))
    }

    fn rotation(&mut self) -> Rotation {
        exp(&AlgebraVec(self.vec(3.0)))
    }

    fn element(&mut self) -> SemidirectElement {
        SemidirectElement::new(self.rotation(), self.coalgebra())
    }

    fn semi_algebra(&mut self) -> SemidirectAlgebra {
        SemidirectAlgebra::new(self.algebra(), self.coalgebra())
    }

    fn inertia(&mut self) -> InertiaTensor {
        let a = Mat3::from_fn(|_, _| self.0.random_range(-1.0..1.0));
        InertiaTensor::constant(a * a.transpose() + Mat3::identity() * 0.5).expect("SPD by construction")
    }

    fn desired(&mut self, inertia: &InertiaTensor) -> DesiredSample {
        let v = AlgebraVec(self.vec(2.0));
        DesiredSample {
            t: 0.0,
            q: self.rotation(),
            p: inertia.momentum(&v, 0.0),
            v,
            tau: CoalgebraVec(self.vec(1.0)),
        }
    }
}

fn suite(name: &'static str, samples: usize, tolerance: f64, seed: u64, mut residual: impl FnMut(&mut Sampler) -> f64) -> CheckOutcome {
    let mut s = Sampler::new(seed);
    let max_error = (0..samples).map(|_| residual(&mut s)).fold(0.0, |a: f64, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) });
    CheckOutcome { name, samples, max_error, tolerance }
}

fn element_distance(a: &SemidirectElement, b: &SemidirectElement) -> f64 {
    (a.q.matrix() - b.q.matrix()).norm() + (a.p - b.p).norm()
}

fn algebra_distance(a: &SemidirectAlgebra, b: &SemidirectAlgebra) -> f64 {
    (a.v - b.v).norm() + (a.t - b.t).norm()
}

/// Central difference of `s ↦ f(s)` at `s = 0`, as `(Q̇, Ṗ)`.
fn fd_curve(f: impl Fn(f64) -> SemidirectElement) -> (Mat3, Vec3) {
    let (a, b) = (f(FD_STEP), f(-FD_STEP));
    ((a.q.matrix() - b.q.matrix()) / (2.0 * FD_STEP), (a.p.0 - b.p.0) / (2.0 * FD_STEP))
}

fn curve(u: &SemidirectAlgebra, s: f64) -> SemidirectElement {
    SemidirectElement::from_algebra(&(*u * s))
}

/// Identities of `so(3)`, its dual and the semidirect product, including
/// the closed forms of the tangent maps and adjoint actions checked
/// against finite differences.
pub fn algebraic_suite() -> Vec<CheckOutcome> {
    let n = 1000;
    vec![
        suite("hat_vee_round_trip", n, ALGEBRAIC_TOL, 1, |s| {
            let u = s.algebra();
            (vee(&hat(&u)).expect("hat is skew") - u).norm()
        }),
        suite("bracket_homomorphism", n, ALGEBRAIC_TOL, 2, |s| {
            let (u, v) = (s.algebra(), s.algebra());
            let (a, b) = (hat(&u), hat(&v));
            (hat(&group::ad(&u, &v)) - (a * b - b * a)).norm()
        }),
        suite("adjoint_conjugation", n, ALGEBRAIC_TOL, 3, |s| {
            let (r, u) = (s.rotation(), s.algebra());
            (hat(&group::adjoint(&r, &u)) - r.matrix() * hat(&u) * r.matrix().transpose()).norm()
        }),
        suite("coadjoint_pairing", n, ALGEBRAIC_TOL, 4, |s| {
            let (r, p, v) = (s.rotation(), s.coalgebra(), s.algebra());
            (pairing(&group::coadjoint(&r, &p), &v) - pairing(&p, &group::adjoint(&r, &v))).abs()
        }),
        suite("ad_star_pairing", n, ALGEBRAIC_TOL, 5, |s| {
            let (u, p, v) = (s.algebra(), s.coalgebra(), s.algebra());
            (pairing(&group::ad_star(&u, &p), &v) - pairing(&p, &group::ad(&u, &v))).abs()
        }),
        suite("exp_log_round_trip", n, ALGEBRAIC_TOL, 6, |s| {
            let u = AlgebraVec(s.vec(1.7));
            (log(&exp(&u)) - u).norm()
        }),
        suite("semidirect_associativity", n, ALGEBRAIC_TOL, 7, |s| {
            let (a, b, c) = (s.element(), s.element(), s.element());
            element_distance(&mul(&mul(&a, &b), &c), &mul(&a, &mul(&b, &c)))
        }),
        suite("semidirect_identity_inverse", n, ALGEBRAIC_TOL, 8, |s| {
            let (x, e) = (s.element(), SemidirectElement::identity());
            element_distance(&mul(&e, &x), &x)
                + element_distance(&mul(&x, &e), &x)
                + element_distance(&mul(&x, &inv(&x)), &e)
                + element_distance(&mul(&inv(&x), &x), &e)
        }),
        suite("adjoint_homomorphism", n, ALGEBRAIC_TOL, 9, |s| {
            let (a, b, u) = (s.element(), s.element(), s.semi_algebra());
            algebra_distance(
                &semidirect::adjoint(&mul(&a, &b), &u),
                &semidirect::adjoint(&a, &semidirect::adjoint(&b, &u)),
            )
        }),
        suite("left_translation_fd", n, FD_TOL, 10, |s| {
            let (x, u) = (s.element(), s.semi_algebra());
            let (q_dot, p_dot) = fd_curve(|h| mul(&x, &curve(&u, h)));
            let exact = semidirect::d_left(&x, &u);
            (q_dot - exact.q_dot()).norm() + (p_dot - exact.p_dot.0).norm()
        }),
        suite("right_translation_fd", n, FD_TOL, 11, |s| {
            let (y, u) = (s.element(), s.semi_algebra());
            let (q_dot, p_dot) = fd_curve(|h| mul(&curve(&u, h), &y));
            let exact = semidirect::d_right(&y, &u);
            (q_dot - exact.q_dot()).norm() + (p_dot - exact.p_dot.0).norm()
        }),
        suite("adjoint_closed_form_fd", n, FD_TOL, 12, |s| {
            let (y, u) = (s.element(), s.semi_algebra());
            let (q_dot, p_dot) = fd_curve(|h| mul(&mul(&y, &curve(&u, h)), &inv(&y)));
            let exact = semidirect::adjoint(&y, &u);
            (q_dot - hat(&exact.v)).norm() + (p_dot - exact.t.0).norm()
        }),
        suite("little_ad_closed_form_fd", n, FD_TOL, 13, |s| {
            let (u, w) = (s.semi_algebra(), s.semi_algebra());
            let at = |h: f64| semidirect::adjoint(&curve(&u, h), &w);
            let (a, b) = (at(FD_STEP), at(-FD_STEP));
            let fd = (a - b) * (0.5 / FD_STEP);
            algebra_distance(&fd, &semidirect::little_ad(&u, &w))
        }),
    ]
}

/// The extended Lie-Poisson vector field equals the left translation
/// `DL_X[U]` for every state and input.
pub fn vector_field_suite(samples: usize) -> CheckOutcome {
    suite("vector_field_is_left_translation", samples, 1e-14, 20, |s| {
        let (x, u) = (s.element(), s.semi_algebra());
        let f = lie_poisson::vector_field(&LPState::new(x, 0.0), &u);
        let dl = semidirect::d_left(&x, &u);
        (f.q_dot() - dl.q_dot()).norm() + (f.p_dot - dl.p_dot).norm()
    })
}

/// EqT and GT feed-forward powers equal the gyroscopic power.
pub fn power_identity_suite(samples: usize) -> CheckOutcome {
    suite("power_identities", samples, ALGEBRAIC_TOL, 21, |s| {
        let inertia = s.inertia();
        let (w, wd) = (s.algebra(), s.algebra());
        let wt = w - wd;
        let i = inertia.base();
        let (eqt, gt) = control::power_identity_check(&wt, &w, &wd, i).expect("consistent ω̃");
        let target = control::gyroscopic_power(&wt, &w, &wd, i);
        (eqt - target).abs().max((gt - target).abs())
    })
}

/// The group-generic tracker reproduces the closed-form EqT law.
pub fn generic_tracker_suite(samples: usize) -> CheckOutcome {
    suite("track_general_equals_eqt", samples, 1e-11, 22, |s| {
        let inertia = s.inertia();
        let gains = Gains::new(
            Mat3::from_diagonal(&(s.vec(1.0).abs() + Vec3::repeat(0.1))),
            Mat3::from_diagonal(&(s.vec(1.0).abs() + Vec3::repeat(0.1))),
        )
        .expect("valid gains");
        let desired = s.desired(&inertia);
        let x = SemidirectElement::new(s.rotation(), CoalgebraVec(s.vec(2.0)));
        let a = control::track_general(&x, &desired, &inertia, &gains).expect("regular inertia");
        let b = control::tau_eqt(&x, &desired, &inertia, &gains).expect("regular inertia");
        (a - b).norm()
    })
}

/// Relative drifts `(|Δh|/h₀, |Δ‖π‖|/‖π₀‖)` of the free rigid body with the
/// fixed-wing inertia after `t_final` seconds at step `dt`.
pub fn conservation_drift(dt: f64, t_final: f64) -> (f64, f64) {
    let inertia = InertiaTensor::fixed_wing();
    let x0 = SemidirectElement::new(exp(&AlgebraVec::new(0.3, -0.2, 0.1)), CoalgebraVec::new(0.6, -1.1, 1.4));
    let model = VelocityModel::Constrained(inertia.clone());
    let free = |_: usize, _: &LPState| Ok(SemidirectAlgebra::zeros());
    let recs = lie_poisson::simulate(&LPState::new(x0, 0.0), &model, free, t_final, dt).expect("free body is regular");
    let p1 = recs.last().expect("at least one sample").state.x.p;
    let h = |p: &CoalgebraVec| inertia.hamiltonian(p, 0.0).expect("constant inertia");
    (((h(&p1) - h(&x0.p)) / h(&x0.p)).abs(), ((p1.norm() - x0.p.norm()) / x0.p.norm()).abs())
}

type Sampled = Vec<(LPState, LPInput)>;

/// Plant and desired rigid-body trajectories sampled every `dt` over 2 s,
/// each state paired with its input `(𝕀⁻¹P, τ(t))`.
fn error_pair(dt: f64) -> (InertiaTensor, Sampled, Sampled) {
    let inertia = InertiaTensor::fixed_wing();
    let run = |x0: SemidirectElement, tau: &dyn Fn(f64) -> CoalgebraVec| {
        let field = |t: f64, x: &SemidirectElement| {
            Ok(lie_poisson::euler_rigid_body_field(&LPState::new(*x, t), &inertia, &tau(t))?.trivialized())
        };
        let n = lie_poisson::sample_count(2.0, dt);
        let mut state = LPState::new(x0, 0.0);
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            state.t = k as f64 * dt;
            let u = LPInput::new(inertia.velocity(&state.x.p, state.t).expect("regular"), tau(state.t));
            out.push((state, u));
            state = lie_poisson::step(&state, field, dt).expect("finite field");
        }
        out
    };
    let plant_tau = |t: f64| CoalgebraVec::new(0.3 * (2.0 * t).sin(), -0.2 * t.cos(), 0.1 * t);
    let plant = run(
        SemidirectElement::new(exp(&AlgebraVec::new(0.9, -1.4, 0.6)), CoalgebraVec::new(0.4, -0.3, 0.8)),
        &plant_tau,
    );
    let desired = run(SemidirectElement::identity(), &crate::experiment::desired_torque);
    (inertia, plant, desired)
}

/// Largest central-difference residual of the error system
/// `Q̇_E = Q_E V_E`, `Ṗ_E = ad*_{V_E} P_E + τ_E` along simulated trajectories.
pub fn error_system_residual(dt: f64) -> f64 {
    let (_, plant, desired) = error_pair(dt);
    let error_at = |k: usize| tracking::error(&plant[k].0.x, &desired[k].0.x);
    (1..plant.len() - 1)
        .map(|k| {
            let (prev, e, next) = (error_at(k - 1), error_at(k), error_at(k + 1));
            let u_e = tracking::error_input(&plant[k].1, &desired[k].1, &desired[k].0.x);
            let f = lie_poisson::vector_field(&LPState::new(e, plant[k].0.t), &u_e);
            let q_dot = (next.q.matrix() - prev.q.matrix()) / (2.0 * dt);
            let p_dot = (next.p - prev.p) * (0.5 / dt);
            (q_dot - e.q.matrix() * hat(&f.body)).norm() + (p_dot - f.p_dot).norm()
        })
        .fold(0.0, f64::max)
}

/// Largest `‖V_E − 𝕀̄⁻¹ P_E‖` along simulated trajectories.
pub fn error_velocity_residual(dt: f64) -> f64 {
    let (inertia, plant, desired) = error_pair(dt);
    plant
        .iter()
        .zip(&desired)
        .map(|((x, u), (xd, ud))| {
            let e = tracking::error(&x.x, &xd.x);
            let u_e = tracking::error_input(u, ud, &xd.x);
            let bar = tracking::error_inertia(&inertia, &xd.x.q).expect("constant inertia");
            (u_e.v - bar.velocity(&e.p, 0.0).expect("regular")).norm()
        })
        .fold(0.0, f64::max)
}

/// Every suite run by the `check` subcommand.
pub fn run_all() -> Vec<CheckOutcome> {
    let mut out = algebraic_suite();
    out.push(vector_field_suite(1000));
    out.push(power_identity_suite(1000));
    out.push(generic_tracker_suite(1000));
    let (h, casimir) = conservation_drift(1e-3, 10.0);
    out.push(CheckOutcome { name: "energy_conservation", samples: 1, max_error: h, tolerance: 1e-8 });
    out.push(CheckOutcome { name: "casimir_conservation", samples: 1, max_error: casimir, tolerance: 1e-8 });
    for dt in [1e-3, 5e-4] {
        out.push(CheckOutcome {
            name: if dt == 1e-3 { "error_system_dt_1e-3" } else { "error_system_dt_5e-4" },
            samples: lie_poisson::sample_count(2.0, dt) - 2,
            max_error: error_system_residual(dt),
            tolerance: 5.0 * dt * dt,
        });
    }
    out.push(CheckOutcome {
        name: "error_velocity",
        samples: lie_poisson::sample_count(2.0, 1e-3),
        max_error: error_velocity_residual(1e-3),
        tolerance: 1e-10,
    });
    out
}
