//! Right-invariant tracking error on the phase-space group.
//!
//! For a plant `X = (Q, P)` and a desired Lie-Poisson trajectory
//! `X_d = (Q_d, P_d)` the error is `E = X X_d⁻¹`, the error input is
//! `U_E = Ad_{X_d}(U − U_d)`, and `E` again follows an extended Lie-Poisson
//! system driven by `U_E`. With the velocity constraint on both trajectories
//! the error is Lie-Poisson for the time-varying inertia
//! `𝕀̄_t = Ad*_{Q_d⁻¹} ∘ 𝕀 ∘ Ad_{Q_d⁻¹}`.

use crate::group::{self, AlgebraVec, CoalgebraVec, Rotation};
use crate::lie_poisson::{self, InertiaTensor, LPInput, LPState, sample_count};
use crate::semidirect::{self, SemidirectAlgebra, SemidirectElement};
use crate::{Error, Result};

/// Error state `E = (Q_E, P_E)`.
pub type ErrorState = SemidirectElement;

/// `E = X X_d⁻¹ = (Q Q_d⁻¹, Ad*_{Q_d⁻¹}(P − P_d))`
pub fn error(x: &SemidirectElement, xd: &SemidirectElement) -> ErrorState {
    semidirect::mul(x, &semidirect::inv(xd))
}

/// `U_E = Ad_{X_d}(U − U_d)`
pub fn error_input(u: &SemidirectAlgebra, ud: &SemidirectAlgebra, xd: &SemidirectElement) -> SemidirectAlgebra {
    semidirect::adjoint(xd, &(*u - *ud))
}

/// Error inertia `𝕀̄ = Ad*_{Q_d⁻¹} ∘ 𝕀 ∘ Ad_{Q_d⁻¹}` at one instant; on SO(3)
/// this is `R_d 𝕀 R_dᵀ`. The plant inertia must be constant.
pub fn error_inertia(inertia: &InertiaTensor, qd: &Rotation) -> Result<InertiaTensor> {
    if !inertia.is_constant() {
        return Err(Error::InvalidArgument(
            "error inertia requires a constant plant inertia".into(),
        ));
    }
    let r = qd.matrix();
    let m = r * inertia.base() * r.transpose();
    // exact symmetrization; the conjugation leaves round-off asymmetry
    InertiaTensor::constant((m + m.transpose()) * 0.5)
}

/// `Ṡ_tᵀ S_t⁻ᵀ P_E = −ad*_{Ad_{Q_d} u_d} P_E` for the error factor path
/// `S_t = Ad_{Q_d(t)⁻¹}`, where `Q̇_d = Q_d u_d`.
pub fn s_dot_star_term(ud: &AlgebraVec, qd: &Rotation, pe: &CoalgebraVec) -> CoalgebraVec {
    -group::ad_star(&group::adjoint(qd, ud), pe)
}

/// `τ = τ_d + Ad^τ_{X_d⁻¹}(V_E, τ_E)`, the physical torque that realizes the
/// error input `(V_E, τ_E)`. `ud` is the desired input `(V_d, τ_d)`.
pub fn recover_input(
    tau_e: &CoalgebraVec,
    v_e: &AlgebraVec,
    ud: &SemidirectAlgebra,
    xd: &SemidirectElement,
) -> CoalgebraVec {
    ud.t + semidirect::adjoint_tau(&semidirect::inv(xd), &SemidirectAlgebra::new(*v_e, *tau_e))
}

/// One point `(Q_d, P_d, V_d, τ_d)` of a desired trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DesiredSample {
    pub t: f64,
    pub q: Rotation,
    pub p: CoalgebraVec,
    pub v: AlgebraVec,
    pub tau: CoalgebraVec,
}

impl DesiredSample {
    pub fn element(&self) -> SemidirectElement {
        SemidirectElement::new(self.q, self.p)
    }

    /// `U_d = (V_d, τ_d)`
    pub fn input(&self) -> SemidirectAlgebra {
        SemidirectAlgebra::new(self.v, self.tau)
    }

    /// `ω̇_d = 𝕀⁻¹(−ω_d × 𝕀ω_d + τ_d)` from the desired Euler equations.
    pub fn angular_acceleration(&self, inertia: &InertiaTensor) -> Result<AlgebraVec> {
        let rate = group::ad_star(&self.v, &self.p) + self.tau;
        inertia.velocity(&rate, self.t)
    }
}

/// Desired Lie-Poisson trajectory, simulated once and cached per step.
/// Lookups between steps snap to the nearest sample.
#[derive(Clone, Debug)]
pub struct DesiredTrajectory {
    dt: f64,
    t0: f64,
    samples: Vec<DesiredSample>,
}

impl DesiredTrajectory {
    /// Integrates the controlled Euler equations from `x0` under the
    /// open-loop torque `tau_d(t)`, recording `floor(t_final/dt) + 1` samples.
    pub fn simulate<F>(inertia: &InertiaTensor, x0: SemidirectElement, tau_d: F, dt: f64, t_final: f64) -> Result<Self>
    where
        F: Fn(f64) -> CoalgebraVec,
    {
        if !(dt > 0.0) || !(t_final >= dt) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < dt <= t_final, got dt = {dt}, t_final = {t_final}"
            )));
        }
        let n = sample_count(t_final, dt);
        let field = |t: f64, x: &SemidirectElement| {
            Ok(lie_poisson::euler_rigid_body_field(&LPState::new(*x, t), inertia, &tau_d(t))?.trivialized())
        };
        let mut samples = Vec::with_capacity(n);
        let mut state = LPState::new(x0, 0.0);
        for k in 0..n {
            let t = k as f64 * dt;
            state.t = t;
            samples.push(DesiredSample {
                t,
                q: state.x.q,
                p: state.x.p,
                v: inertia.velocity(&state.x.p, t)?,
                tau: tau_d(t),
            });
            if k + 1 < n {
                state = lie_poisson::step(&state, field, dt)?;
            }
        }
        Ok(Self { dt, t0: 0.0, samples })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[DesiredSample] {
        &self.samples
    }

    pub fn sample(&self, k: usize) -> &DesiredSample {
        &self.samples[k.min(self.samples.len() - 1)]
    }

    /// Nearest-step lookup, clamped to the cached horizon.
    pub fn at(&self, t: f64) -> &DesiredSample {
        let k = ((t - self.t0) / self.dt).round().max(0.0) as usize;
        self.sample(k)
    }

    /// Largest `‖𝕀 V_d − P_d‖` over the cache.
    pub fn constraint_residual(&self, inertia: &InertiaTensor) -> f64 {
        self.samples
            .iter()
            .map(|s| (inertia.momentum(&s.v, s.t) - s.p).norm())
            .fold(0.0, f64::max)
    }
}

/// Velocity error `V_E = 𝕀̄⁻¹ P_E` of the constrained error system.
pub fn error_velocity(inertia: &InertiaTensor, qd: &Rotation, pe: &CoalgebraVec) -> Result<AlgebraVec> {
    error_inertia(inertia, qd)?.velocity(pe, 0.0)
}

/// Plant input `U = (V, τ)` given the plant state under the velocity constraint.
pub fn constrained_input(inertia: &InertiaTensor, state: &LPState, tau: CoalgebraVec) -> Result<LPInput> {
    Ok(LPInput::new(inertia.velocity(&state.x.p, state.t)?, tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::exp;
    use crate::{Mat3, Vec3};
    use approx::assert_abs_diff_eq;
    use nalgebra::SymmetricEigen;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rv(rng: &mut ChaCha8Rng, s: f64) -> Vec3 {
        Vec3::from_fn(|_, _| rng.random_range(-s..s))
    }

    fn element(rng: &mut ChaCha8Rng) -> SemidirectElement {
        SemidirectElement::new(exp(&AlgebraVec(rv(rng, 3.0))), CoalgebraVec(rv(rng, 2.0)))
    }

    fn algebra(rng: &mut ChaCha8Rng) -> SemidirectAlgebra {
        SemidirectAlgebra::new(AlgebraVec(rv(rng, 2.0)), CoalgebraVec(rv(rng, 2.0)))
    }

    fn dist(a: &SemidirectElement, b: &SemidirectElement) -> f64 {
        (a.q.matrix() - b.q.matrix()).norm() + (a.p - b.p).norm()
    }

    #[test]
    fn error_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let x = element(&mut rng);
        assert!(dist(&error(&x, &x), &SemidirectElement::identity()) < 1e-13);
        assert_eq!(error(&x, &SemidirectElement::identity()), x);

        for _ in 0..100 {
            let (x, xd) = (element(&mut rng), element(&mut rng));
            let e = error(&x, &xd);
            assert_eq!(e, semidirect::mul(&x, &semidirect::inv(&xd)));
            // (R R_dᵀ, R_d(π − π_d))
            let rd = xd.q.matrix();
            assert_abs_diff_eq!(*e.q.matrix(), x.q.matrix() * rd.transpose(), epsilon = 1e-14);
            assert_abs_diff_eq!(e.p.0, rd * (x.p.0 - xd.p.0), epsilon = 1e-13);
        }
    }

    #[test]
    fn error_is_right_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let (x, xd, z) = (element(&mut rng), element(&mut rng), element(&mut rng));
            let moved = error(&semidirect::mul(&x, &z), &semidirect::mul(&xd, &z));
            assert!(dist(&moved, &error(&x, &xd)) < 1e-13 * 10.0);
        }
    }

    #[test]
    fn error_input_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let (u, ud, xd) = (algebra(&mut rng), algebra(&mut rng), element(&mut rng));
        assert_eq!(error_input(&u, &u, &xd), SemidirectAlgebra::zeros());
        assert_eq!(error_input(&u, &ud, &SemidirectElement::identity()), u - ud);
    }

    #[test]
    fn error_inertia_examples() {
        let fw = InertiaTensor::fixed_wing();
        let same = error_inertia(&fw, &Rotation::identity()).unwrap();
        assert_abs_diff_eq!(*same.base(), *fw.base(), epsilon = 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let spectrum = |m: &Mat3| {
            let mut e: Vec<f64> = SymmetricEigen::new(*m).eigenvalues.iter().copied().collect();
            e.sort_by(f64::total_cmp);
            e
        };
        let base_spec = spectrum(fw.base());
        for _ in 0..50 {
            let qd = exp(&AlgebraVec(rv(&mut rng, 3.0)));
            let bar = error_inertia(&fw, &qd).unwrap();
            for (a, b) in spectrum(bar.base()).iter().zip(&base_spec) {
                assert!((a - b).abs() < 1e-12);
            }

            // 𝕀̄⁻¹[P_E] = Ad_{Q_d} 𝕀⁻¹[Ad*_{Q_d} P_E]
            let pe = CoalgebraVec(rv(&mut rng, 2.0));
            let direct = bar.velocity(&pe, 0.0).unwrap();
            let via = group::adjoint(&qd, &fw.velocity(&group::coadjoint(&qd, &pe), 0.0).unwrap());
            assert!((direct - via).norm() < 1e-11);
        }
    }

    #[test]
    fn s_dot_star_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let qd = exp(&AlgebraVec(rv(&mut rng, 3.0)));
        let pe = CoalgebraVec(rv(&mut rng, 2.0));
        let ud = AlgebraVec(rv(&mut rng, 2.0));
        assert_eq!(s_dot_star_term(&AlgebraVec::zeros(), &qd, &pe), CoalgebraVec::zeros());
        assert_eq!(s_dot_star_term(&ud, &qd, &CoalgebraVec::zeros()), CoalgebraVec::zeros());
    }

    #[test]
    fn s_dot_star_matches_factor_path_difference() {
        // S_t = Ad_{Q_d(t)⁻¹} = R_d(t)ᵀ along a simulated desired trajectory
        let fw = InertiaTensor::fixed_wing();
        let dt = 1e-3;
        let traj = DesiredTrajectory::simulate(
            &fw,
            SemidirectElement::new(Rotation::identity(), CoalgebraVec::new(0.3, -0.8, 1.1)),
            |t| CoalgebraVec::new(t.cos(), t.sin(), t.cos() * t.sin()),
            dt,
            3.0,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let st = |k: usize| traj.sample(k).q.matrix().transpose();
        for k in (2..traj.len() - 2).step_by(347) {
            let cur = traj.sample(k);
            let s = st(k);
            let s_dot = (8.0 * (st(k + 1) - st(k - 1)) - (st(k + 2) - st(k - 2))) / (12.0 * dt);
            let pe = CoalgebraVec(rv(&mut rng, 2.0));
            let fd = s_dot.transpose() * s.transpose().lu().solve(&pe.0).unwrap();
            let analytic = s_dot_star_term(&cur.v, &cur.q, &pe);
            assert!((fd - analytic.0).norm() < 1e-6, "{}", (fd - analytic.0).norm());
        }
    }

    #[test]
    fn recover_input_examples_and_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let ud = algebra(&mut rng);
        let xd = element(&mut rng);
        assert_eq!(recover_input(&CoalgebraVec::zeros(), &AlgebraVec::zeros(), &ud, &xd), ud.t);
        let tau_e = CoalgebraVec(rv(&mut rng, 1.0));
        let v_e = AlgebraVec(rv(&mut rng, 1.0));
        let at_id = recover_input(&tau_e, &v_e, &ud, &SemidirectElement::identity());
        assert!((at_id - (ud.t + tau_e)).norm() < 1e-15);

        for _ in 0..500 {
            let (u, ud, xd) = (algebra(&mut rng), algebra(&mut rng), element(&mut rng));
            let ue = error_input(&u, &ud, &xd);
            let tau = recover_input(&ue.t, &ue.v, &ud, &xd);
            assert!((tau - u.t).norm() < 1e-12);
        }
    }

    #[test]
    fn desired_trajectory_cache() {
        let fw = InertiaTensor::fixed_wing();
        let traj = DesiredTrajectory::simulate(
            &fw,
            SemidirectElement::identity(),
            |t| CoalgebraVec::new(t.cos(), t.sin(), t.cos() * t.sin()),
            0.01,
            1.0,
        )
        .unwrap();
        assert_eq!(traj.len(), 101);
        assert!(traj.constraint_residual(&fw) < 1e-9);
        let first = traj.sample(0);
        assert_eq!(first.q, Rotation::identity());
        assert_eq!(first.v, AlgebraVec::zeros());
        assert_eq!(first.tau, CoalgebraVec::new(1.0, 0.0, 0.0));
        assert_eq!(traj.at(0.504).t, traj.sample(50).t);
        assert_eq!(traj.at(0.506).t, traj.sample(51).t);
        assert_eq!(traj.at(99.0).t, traj.sample(100).t);
    }
}
