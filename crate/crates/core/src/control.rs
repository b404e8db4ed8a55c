//! Energy-shaping stabilization and tracking on SO(3).
//!
//! All laws share the navigation function `Υ(R) = tr(K_p(I − R))`, whose
//! left-trivialized differential is `(K_p R − Rᵀ K_pᵀ)^∨`, and a Rayleigh
//! dissipation `ℛ(v, w) = vᵀ K_d w`.
//!
//! The tracking laws differ only in their feed-forward terms:
//!
//! | kind | feed-forward on top of `τ_d` | damping |
//! |------|------------------------------|---------|
//! | EqT  | `ω̃ × 𝕀ω_d + ω_d × 𝕀ω̃` | `R_dᵀ K_d R_d ω̃` |
//! | GT   | `𝕀(∇_ω ω_d + ω̇_d) − τ_d` | `K_d ω̃` |
//! | nog  | `ω_d × 𝕀ω̃` | `R_dᵀ K_d R_d ω̃` |
//! | asym | `ω̃ × 𝕀ω_d + ½ ω_d × 𝕀ω̃ + ½ 𝕀(ω × ω_d)` | `R_dᵀ K_d R_d ω̃` |
//!
//! with `ω̃ = ω − ω_d` and `R_E = R R_dᵀ`.

use std::fmt;
use std::str::FromStr;

use nalgebra::SymmetricEigen;

use crate::group::{self, unskew, AlgebraVec, CoalgebraVec, Rotation};
use crate::lie_poisson::{InertiaTensor, LPState};
use crate::semidirect::{SemidirectAlgebra, SemidirectElement};
use crate::tracking::{self, DesiredSample};
use crate::{Error, Mat3, Result, Vec3};

/// Proportional (navigation) and derivative (Rayleigh) gains.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gains {
    kp: Mat3,
    kd: Mat3,
}

impl Gains {
    /// `kp` must be diagonal with `λ_i + λ_j > 0` for `i ≠ j`; `kd` must be SPD.
    pub fn new(kp: Mat3, kd: Mat3) -> Result<Self> {
        let off_diag = (kp - Mat3::from_diagonal(&kp.diagonal())).norm();
        if off_diag > 1e-12 {
            return Err(Error::InvalidGains(format!("K_p must be diagonal (off-diagonal norm {off_diag:.3e})")));
        }
        let d = kp.diagonal();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            if !(d[i] + d[j] > 0.0) {
                return Err(Error::InvalidGains(format!(
                    "K_p eigenvalues {i} and {j} must have a positive sum, got {} + {}",
                    d[i], d[j]
                )));
            }
        }
        if !((kd - kd.transpose()).norm() <= 1e-12) {
            return Err(Error::InvalidGains("K_d must be symmetric".into()));
        }
        if !(SymmetricEigen::new(kd).eigenvalues.min() > 0.0) {
            return Err(Error::InvalidGains("K_d must be positive definite".into()));
        }
        Ok(Self { kp, kd })
    }

    /// `K_p = I`, `K_d = ½ I`.
    pub fn reference() -> Self {
        Self {
            kp: Mat3::identity(),
            kd: Mat3::identity() * 0.5,
        }
    }

    pub fn kp(&self) -> &Mat3 {
        &self.kp
    }

    pub fn kd(&self) -> &Mat3 {
        &self.kd
    }

    /// Rayleigh damping torque `ℛ[v] = K_d v`.
    pub fn rayleigh(&self, v: &AlgebraVec) -> CoalgebraVec {
        CoalgebraVec(self.kd * v.0)
    }
}

/// `Υ(R) = tr(K_p(I − R))`
pub fn navigation(r: &Rotation, kp: &Mat3) -> f64 {
    (kp * (Mat3::identity() - r.matrix())).trace()
}

/// `L*_R dΥ ≅ (K_p R − Rᵀ K_pᵀ)^∨`
pub fn navigation_grad(r: &Rotation, kp: &Mat3) -> CoalgebraVec {
    let m = kp * r.matrix();
    CoalgebraVec(unskew(&(m - m.transpose())))
}

/// Navigation function with its minimum moved to `target`: `Υ(Q Q₀⁻¹)`.
pub fn shifted_navigation(q: &Rotation, target: &Rotation, kp: &Mat3) -> f64 {
    navigation(&(q * &target.inverse()), kp)
}

/// Left-trivialized gradient of [`shifted_navigation`]: `Ad*_{Q₀}` of the
/// gradient at `Q Q₀⁻¹`.
pub fn shifted_navigation_grad(q: &Rotation, target: &Rotation, kp: &Mat3) -> CoalgebraVec {
    group::coadjoint(target, &navigation_grad(&(q * &target.inverse()), kp))
}

/// Energy-shaping stabilizer `τ = Ṡᵀ S⁻ᵀ P − ℛ[V] − L*_Q dΥ(Q)` with the
/// navigation minimum at `target`.
pub fn stabilize(state: &LPState, inertia: &InertiaTensor, gains: &Gains, target: &Rotation) -> Result<CoalgebraVec> {
    let (p, t) = (&state.x.p, state.t);
    let v = inertia.velocity(p, t)?;
    let ff = inertia.factor_feedforward(p, t)?;
    let pd = -gains.rayleigh(&v) - shifted_navigation_grad(&state.x.q, target, &gains.kp);
    Ok(ff + pd)
}

/// `ℒ = h(P, t) + Υ(Q Q₀⁻¹)`
pub fn stabilization_lyapunov(state: &LPState, inertia: &InertiaTensor, gains: &Gains, target: &Rotation) -> Result<f64> {
    Ok(inertia.hamiltonian(&state.x.p, state.t)? + shifted_navigation(&state.x.q, target, &gains.kp))
}

/// Group-generic tracker: builds `E`, `V_E = 𝕀̄⁻¹ P_E`, the error torque
/// `τ_E = −ad*_{Ad_{Q_d} u_d} P_E − ℛ[V_E] − L*_{Q_E} dΥ(Q_E)` and maps it
/// back through `τ = τ_d + Ad^τ_{X_d⁻¹}(V_E, τ_E)`.
pub fn track_general(
    x: &SemidirectElement,
    desired: &DesiredSample,
    inertia: &InertiaTensor,
    gains: &Gains,
) -> Result<CoalgebraVec> {
    let xd = desired.element();
    let e = tracking::error(x, &xd);
    let v_e = tracking::error_velocity(inertia, &desired.q, &e.p)?;
    let ff = tracking::s_dot_star_term(&desired.v, &desired.q, &e.p);
    let pd = -gains.rayleigh(&v_e) - navigation_grad(&e.q, &gains.kp);
    Ok(tracking::recover_input(&(ff + pd), &v_e, &desired.input(), &xd))
}

/// Quantities shared by the closed-form SO(3) laws.
struct Terms {
    w: Vec3,
    wd: Vec3,
    wt: Vec3,
    i: Mat3,
    rd: Mat3,
    tau_d: Vec3,
}

impl Terms {
    fn new(x: &SemidirectElement, desired: &DesiredSample, inertia: &InertiaTensor) -> Result<Self> {
        let w = inertia.velocity(&x.p, desired.t)?.0;
        let wd = desired.v.0;
        Ok(Self {
            w,
            wd,
            wt: w - wd,
            i: inertia.matrix_at(desired.t),
            rd: *desired.q.matrix(),
            tau_d: desired.tau.0,
        })
    }

    /// `R_dᵀ (K_p R_E − R_Eᵀ K_pᵀ)^∨`
    fn prop(&self, re: &Rotation, kp: &Mat3) -> Vec3 {
        self.rd.transpose() * navigation_grad(re, kp).0
    }

    /// `R_dᵀ K_d R_d ω̃`
    fn spatial_damping(&self, kd: &Mat3) -> Vec3 {
        self.rd.transpose() * kd * self.rd * self.wt
    }
}

fn feedback(x: &SemidirectElement, desired: &DesiredSample, inertia: &InertiaTensor) -> Result<(Terms, Rotation)> {
    let terms = Terms::new(x, desired, inertia)?;
    Ok((terms, x.q * desired.q.inverse()))
}

/// Equivariant tracking (EqT) law.
pub fn tau_eqt(x: &SemidirectElement, desired: &DesiredSample, inertia: &InertiaTensor, gains: &Gains) -> Result<CoalgebraVec> {
    let (s, re) = feedback(x, desired, inertia)?;
    let ff = s.wt.cross(&(s.i * s.wd)) + s.wd.cross(&(s.i * s.wt));
    Ok(CoalgebraVec(s.tau_d + ff - s.spatial_damping(&gains.kd) - s.prop(&re, &gains.kp)))
}

/// Geometric tracking (GT) law in expanded form.
pub fn tau_gt(x: &SemidirectElement, desired: &DesiredSample, inertia: &InertiaTensor, gains: &Gains) -> Result<CoalgebraVec> {
    let (s, re) = feedback(x, desired, inertia)?;
    let (i, w, wd) = (&s.i, &s.w, &s.wd);
    let ff = 0.5 * (i * w.cross(wd)) + 0.5 * w.cross(&(i * wd)) + 0.5 * wd.cross(&(i * w)) - wd.cross(&(i * wd));
    Ok(CoalgebraVec(s.tau_d + ff - gains.kd * s.wt - s.prop(&re, &gains.kp)))
}

/// GT law assembled from the Levi-Civita connection of the kinetic-energy
/// metric, `τ = 𝕀(∇_ω ω_d + ω̇_d) − K_d ω̃ − R_dᵀ(K_p R_E − R_Eᵀ K_pᵀ)^∨`.
pub fn tau_gt_connection(
    x: &SemidirectElement,
    desired: &DesiredSample,
    inertia: &InertiaTensor,
    gains: &Gains,
) -> Result<CoalgebraVec> {
    let (s, re) = feedback(x, desired, inertia)?;
    let (i, w, wd) = (&s.i, &s.w, &s.wd);
    let t = desired.t;
    let solve = |v: Vec3| inertia.velocity(&CoalgebraVec(v), t).map(|a| a.0);
    let nabla = 0.5 * w.cross(wd) + 0.5 * solve(wd.cross(&(i * w)))? + 0.5 * solve(w.cross(&(i * wd)))?;
    let wd_dot = desired.angular_acceleration(inertia)?.0;
    Ok(CoalgebraVec(i * (nabla + wd_dot) - gains.kd * s.wt - s.prop(&re, &gains.kp)))
}

/// EqT without the gyroscopic `ω̃ × 𝕀ω_d` term.
pub fn tau_nog(x: &SemidirectElement, desired: &DesiredSample, inertia: &InertiaTensor, gains: &Gains) -> Result<CoalgebraVec> {
    let (s, re) = feedback(x, desired, inertia)?;
    let ff = s.wd.cross(&(s.i * s.wt));
    Ok(CoalgebraVec(s.tau_d + ff - s.spatial_damping(&gains.kd) - s.prop(&re, &gains.kp)))
}

/// EqT with half of `ω_d × 𝕀ω̃` swapped for the power-equivalent `½𝕀(ω × ω_d)`.
pub fn tau_asym(x: &SemidirectElement, desired: &DesiredSample, inertia: &InertiaTensor, gains: &Gains) -> Result<CoalgebraVec> {
    let (s, re) = feedback(x, desired, inertia)?;
    let (i, w, wd, wt) = (&s.i, &s.w, &s.wd, &s.wt);
    let ff = wt.cross(&(i * wd)) + 0.5 * wd.cross(&(i * wt)) + 0.5 * (i * w.cross(wd));
    Ok(CoalgebraVec(s.tau_d + ff - s.spatial_damping(&gains.kd) - s.prop(&re, &gains.kp)))
}

/// Selects a feedback law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ControllerKind {
    EqT,
    GT,
    NoGyro,
    Asym,
    /// Stabilizer aimed at the current desired attitude; ignores its motion.
    Stabilize,
}

impl ControllerKind {
    /// The four tracking laws in reporting order.
    pub const TRACKING: [ControllerKind; 4] = [Self::EqT, Self::GT, Self::NoGyro, Self::Asym];

    pub fn name(&self) -> &'static str {
        match self {
            Self::EqT => "eqt",
            Self::GT => "gt",
            Self::NoGyro => "nog",
            Self::Asym => "asym",
            Self::Stabilize => "stabilize",
        }
    }

    /// Feedback torque for plant state `state` against `desired`.
    pub fn torque(
        &self,
        state: &LPState,
        desired: &DesiredSample,
        inertia: &InertiaTensor,
        gains: &Gains,
    ) -> Result<CoalgebraVec> {
        let x = &state.x;
        match self {
            Self::EqT => tau_eqt(x, desired, inertia, gains),
            Self::GT => tau_gt(x, desired, inertia, gains),
            Self::NoGyro => tau_nog(x, desired, inertia, gains),
            Self::Asym => tau_asym(x, desired, inertia, gains),
            Self::Stabilize => stabilize(state, inertia, gains, &desired.q),
        }
    }

    /// Lyapunov function certifying this law.
    ///
    /// Tracking laws: `ℒ = ½⟨P_E, 𝕀̄⁻¹ P_E⟩ + Υ(Q_E)`; the stabilizer uses
    /// `h(P) + Υ(Q Q_d⁻¹)`.
    pub fn lyapunov(&self, state: &LPState, desired: &DesiredSample, inertia: &InertiaTensor, gains: &Gains) -> Result<f64> {
        match self {
            Self::Stabilize => stabilization_lyapunov(state, inertia, gains, &desired.q),
            _ => tracking_lyapunov(&state.x, desired, inertia, gains),
        }
    }

    /// Rate `−ℒ̇` the law guarantees: `ω_Eᵀ K_d ω_E` with `ω_E = R_d ω̃` for the
    /// spatially damped laws, `ω̃ᵀ K_d ω̃` for GT, `Vᵀ K_d V` for the stabilizer.
    pub fn dissipation(&self, state: &LPState, desired: &DesiredSample, inertia: &InertiaTensor, gains: &Gains) -> Result<f64> {
        let w = inertia.velocity(&state.x.p, state.t)?.0;
        let kd = &gains.kd;
        Ok(match self {
            Self::Stabilize => w.dot(&(kd * w)),
            Self::GT => {
                let wt = w - desired.v.0;
                wt.dot(&(kd * wt))
            }
            _ => {
                let we = desired.q.matrix() * (w - desired.v.0);
                we.dot(&(kd * we))
            }
        })
    }
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ControllerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "eqt" => Ok(Self::EqT),
            "gt" => Ok(Self::GT),
            "nog" => Ok(Self::NoGyro),
            "asym" => Ok(Self::Asym),
            "stabilize" => Ok(Self::Stabilize),
            other => Err(Error::InvalidArgument(format!("unknown controller kind `{other}`"))),
        }
    }
}

/// Error-system Lyapunov function `h_E(P_E) + Υ(Q_E)`.
pub fn tracking_lyapunov(x: &SemidirectElement, desired: &DesiredSample, inertia: &InertiaTensor, gains: &Gains) -> Result<f64> {
    let e = tracking::error(x, &desired.element());
    let h_e = tracking::error_inertia(inertia, &desired.q)?.hamiltonian(&e.p, 0.0)?;
    Ok(h_e + navigation(&e.q, &gains.kp))
}

/// Feed-forward powers `(ω̃ᵀ(τ^EqT_ff − τ_d), ω̃ᵀ(τ^GT_ff − τ_d))`.
///
/// Both equal `(𝕀ω̃)ᵀ(ω × ω_d)`, see [`gyroscopic_power`]. `omega_tilde`
/// must equal `omega − omega_d`.
pub fn power_identity_check(
    omega_tilde: &AlgebraVec,
    omega: &AlgebraVec,
    omega_d: &AlgebraVec,
    inertia: &Mat3,
) -> Result<(f64, f64)> {
    let (wt, w, wd) = (omega_tilde.0, omega.0, omega_d.0);
    let mismatch = (wt - (w - wd)).norm();
    if mismatch > 1e-12 * (1.0 + w.norm() + wd.norm()) {
        return Err(Error::InconsistentVelocityError(mismatch));
    }
    let i = inertia;
    let eqt = wt.cross(&(i * wd)) + wd.cross(&(i * wt));
    let gt = 0.5 * wt.cross(&(i * wd)) + 0.5 * wd.cross(&(i * wt)) + 0.5 * (i * w.cross(&wd));
    Ok((wt.dot(&eqt), wt.dot(&gt)))
}

/// `(𝕀ω̃)ᵀ(ω × ω_d)`
pub fn gyroscopic_power(omega_tilde: &AlgebraVec, omega: &AlgebraVec, omega_d: &AlgebraVec, inertia: &Mat3) -> f64 {
    (inertia * omega_tilde.0).dot(&omega.0.cross(&omega_d.0))
}

/// Torque input as an extended-system input with the constrained velocity.
pub fn as_input(inertia: &InertiaTensor, state: &LPState, tau: CoalgebraVec) -> Result<SemidirectAlgebra> {
    tracking::constrained_input(inertia, state, tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::exp;
    use approx::assert_abs_diff_eq;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rv(rng: &mut ChaCha8Rng, s: f64) -> Vec3 {
        Vec3::from_fn(|_, _| rng.random_range(-s..s))
    }

    fn rot(rng: &mut ChaCha8Rng) -> Rotation {
        exp(&AlgebraVec(rv(rng, 3.0)))
    }

    fn desired(rng: &mut ChaCha8Rng, inertia: &InertiaTensor) -> DesiredSample {
        let v = AlgebraVec(rv(rng, 2.0));
        DesiredSample {
            t: 0.0,
            q: rot(rng),
            p: inertia.momentum(&v, 0.0),
            v,
            tau: CoalgebraVec(rv(rng, 1.0)),
        }
    }

    fn plant(rng: &mut ChaCha8Rng, inertia: &InertiaTensor) -> SemidirectElement {
        SemidirectElement::new(rot(rng), inertia.momentum(&AlgebraVec(rv(rng, 2.0)), 0.0))
    }

    fn at_desired(d: &DesiredSample) -> SemidirectElement {
        d.element()
    }

    #[test]
    fn gains_validation() {
        assert!(Gains::new(Mat3::identity(), Mat3::identity()).is_ok());
        // one negative eigenvalue is allowed as long as pairwise sums stay positive
        assert!(Gains::new(Mat3::from_diagonal(&Vec3::new(-0.5, 1.0, 1.0)), Mat3::identity()).is_ok());
        assert!(Gains::new(Mat3::from_diagonal(&Vec3::new(-1.0, 1.0, 1.0)), Mat3::identity()).is_err());
        let mut kp = Mat3::identity();
        kp[(0, 2)] = 0.1;
        assert!(Gains::new(kp, Mat3::identity()).is_err());
        assert!(Gains::new(Mat3::identity(), -Mat3::identity()).is_err());
    }

    #[test]
    fn navigation_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let kp = Mat3::from_diagonal(&Vec3::new(0.7, 1.3, 2.0));
        assert_eq!(navigation(&Rotation::identity(), &kp), 0.0);

        // tr(I − R(θ, n)) = 2(1 − cos θ)
        let n = rv(&mut rng, 1.0).normalize();
        for &theta in &[0.1, 1.0, 2.5, PI] {
            let r = exp(&AlgebraVec(n * theta));
            assert_abs_diff_eq!(navigation(&r, &Mat3::identity()), 2.0 * (1.0 - theta.cos()), epsilon = 1e-14);
        }
        assert_abs_diff_eq!(navigation(&exp(&AlgebraVec(n * PI)), &Mat3::identity()), 4.0, epsilon = 1e-14);

        for _ in 0..50 {
            let r = rot(&mut rng);
            let m = r.matrix();
            let direct: f64 = (0..3).map(|i| kp[(i, i)] * (1.0 - m[(i, i)])).sum();
            assert_abs_diff_eq!(navigation(&r, &kp), direct, epsilon = 1e-14);
        }
    }

    #[test]
    fn navigation_gradient() {
        let kp = Mat3::from_diagonal(&Vec3::new(0.7, 1.3, 2.0));
        assert_eq!(navigation_grad(&Rotation::identity(), &kp), CoalgebraVec::zeros());

        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let h = 1e-5;
        for _ in 0..200 {
            let r = rot(&mut rng);
            let u = AlgebraVec(rv(&mut rng, 1.0));
            let f = |s: f64| navigation(&(r * exp(&(u * s))), &kp);
            let fd = (f(h) - f(-h)) / (2.0 * h);
            let g = group::pairing(&navigation_grad(&r, &kp), &u);
            assert!((fd - g).abs() <= 1e-6 * g.abs().max(1.0));
        }

        // K_p = I, R = exp(θ e₃^×): (R − Rᵀ)^∨ = 2 sin θ e₃
        let theta = 0.8;
        let g = navigation_grad(&Rotation::about_axis(2, theta), &Mat3::identity());
        assert_abs_diff_eq!(g.0, Vec3::new(0.0, 0.0, 2.0 * theta.sin()), epsilon = 1e-15);
        // descent direction −∇ points back towards the identity
        assert!(g.0.z > 0.0);
    }

    #[test]
    fn shifted_gradient_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let kp = Mat3::from_diagonal(&Vec3::new(1.0, 0.5, 1.5));
        let h = 1e-5;
        for _ in 0..100 {
            let (q, q0) = (rot(&mut rng), rot(&mut rng));
            let u = AlgebraVec(rv(&mut rng, 1.0));
            let f = |s: f64| shifted_navigation(&(q * exp(&(u * s))), &q0, &kp);
            let fd = (f(h) - f(-h)) / (2.0 * h);
            let g = group::pairing(&shifted_navigation_grad(&q, &q0, &kp), &u);
            assert!((fd - g).abs() < 1e-6);
        }
        assert_abs_diff_eq!(shifted_navigation(&Rotation::about_axis(1, 0.4), &Rotation::about_axis(1, 0.4), &kp), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn stabilize_equilibrium_and_feedforward() {
        let fw = InertiaTensor::fixed_wing();
        let gains = Gains::reference();
        let target = Rotation::about_axis(0, 0.7);
        let s = LPState::new(SemidirectElement::new(target, CoalgebraVec::zeros()), 0.0);
        assert!(stabilize(&s, &fw, &gains, &target).unwrap().norm() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let x = plant(&mut rng, &fw);
        assert_eq!(fw.factor_feedforward(&x.p, 1.0).unwrap(), CoalgebraVec::zeros());
        // constant inertia, target I: τ = −(K_p R − Rᵀ K_pᵀ)^∨ − K_d ω
        let s = LPState::new(x, 0.0);
        let w = fw.velocity(&x.p, 0.0).unwrap();
        let expected = -navigation_grad(&x.q, gains.kp()) - gains.rayleigh(&w);
        assert!((stabilize(&s, &fw, &gains, &Rotation::identity()).unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn general_tracker_special_cases() {
        let fw = InertiaTensor::fixed_wing();
        let gains = Gains::reference();
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        let d = desired(&mut rng, &fw);
        let tau = track_general(&at_desired(&d), &d, &fw, &gains).unwrap();
        assert!((tau - d.tau).norm() < 1e-14);

        // stationary desired trajectory reduces to the stabilizer
        let still = DesiredSample {
            t: 0.0,
            q: Rotation::identity(),
            p: CoalgebraVec::zeros(),
            v: AlgebraVec::zeros(),
            tau: CoalgebraVec::zeros(),
        };
        let x = plant(&mut rng, &fw);
        let a = track_general(&x, &still, &fw, &gains).unwrap();
        let b = stabilize(&LPState::new(x, 0.0), &fw, &gains, &Rotation::identity()).unwrap();
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn general_tracker_equals_eqt() {
        let fw = InertiaTensor::fixed_wing();
        let gains = Gains::new(
            Mat3::from_diagonal(&Vec3::new(1.0, 2.0, 0.5)),
            Mat3::new(1.0, 0.2, 0.0, 0.2, 0.8, 0.1, 0.0, 0.1, 0.6),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..500 {
            let d = desired(&mut rng, &fw);
            let x = plant(&mut rng, &fw);
            let a = track_general(&x, &d, &fw, &gains).unwrap();
            let b = tau_eqt(&x, &d, &fw, &gains).unwrap();
            assert!((a - b).norm() < 1e-11);
        }
    }

    #[test]
    fn zero_error_fixed_point() {
        let fw = InertiaTensor::fixed_wing();
        let gains = Gains::reference();
        let mut rng = ChaCha8Rng::seed_from_u64(56);
        for _ in 0..50 {
            let d = desired(&mut rng, &fw);
            let x = at_desired(&d);
            for f in [tau_eqt, tau_nog, tau_asym, tau_gt] {
                assert!((f(&x, &d, &fw, &gains).unwrap() - d.tau).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn homogeneous_damping_is_frame_free() {
        let fw = InertiaTensor::fixed_wing();
        let kappa = 0.7;
        let gains = Gains::new(Mat3::identity(), Mat3::identity() * kappa).unwrap();
        let no_damp = |g: &Gains| Gains::new(*g.kp(), Mat3::identity() * 1e-300).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        for _ in 0..50 {
            let d = desired(&mut rng, &fw);
            let x = plant(&mut rng, &fw);
            let wt = fw.velocity(&x.p, 0.0).unwrap() - d.v;
            let damp = tau_eqt(&x, &d, &fw, &gains).unwrap() - tau_eqt(&x, &d, &fw, &no_damp(&gains)).unwrap();
            assert!((damp.0 + wt.0 * kappa).norm() < 1e-13);
        }
    }

    #[test]
    fn gt_forms_agree() {
        let fw = InertiaTensor::fixed_wing();
        let gains = Gains::new(Mat3::from_diagonal(&Vec3::new(1.0, 2.0, 0.5)), Mat3::identity() * 0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(58);
        for _ in 0..500 {
            let d = desired(&mut rng, &fw);
            let x = plant(&mut rng, &fw);
            let a = tau_gt(&x, &d, &fw, &gains).unwrap();
            let b = tau_gt_connection(&x, &d, &fw, &gains).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn asym_minus_nog() {
        let fw = InertiaTensor::fixed_wing();
        let gains = Gains::reference();
        let i = *fw.base();
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..200 {
            let d = desired(&mut rng, &fw);
            let x = plant(&mut rng, &fw);
            let w = fw.velocity(&x.p, 0.0).unwrap().0;
            let (wd, wt) = (d.v.0, w - d.v.0);
            let expected = wt.cross(&(i * wd)) - 0.5 * wd.cross(&(i * wt)) + 0.5 * (i * w.cross(&wd));
            let diff = tau_asym(&x, &d, &fw, &gains).unwrap() - tau_nog(&x, &d, &fw, &gains).unwrap();
            assert!((diff.0 - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn laws_agree_for_stationary_reference_velocity() {
        let fw = InertiaTensor::fixed_wing();
        let gains = Gains::reference();
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        for _ in 0..100 {
            let mut d = desired(&mut rng, &fw);
            d.v = AlgebraVec::zeros();
            d.p = CoalgebraVec::zeros();
            let x = plant(&mut rng, &fw);
            let eqt = tau_eqt(&x, &d, &fw, &gains).unwrap();
            for f in [tau_gt, tau_nog, tau_asym] {
                assert!((f(&x, &d, &fw, &gains).unwrap() - eqt).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn power_identities() {
        let i = *InertiaTensor::fixed_wing().base();
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let w = AlgebraVec(rv(&mut rng, 2.0));
        assert_eq!(power_identity_check(&AlgebraVec::zeros(), &w, &w, &i).unwrap(), (0.0, 0.0));
        let (a, b) = power_identity_check(&w, &w, &AlgebraVec::zeros(), &i).unwrap();
        assert!(a.abs() < 1e-15 && b.abs() < 1e-15);

        for _ in 0..1000 {
            let w = AlgebraVec(rv(&mut rng, 3.0));
            let wd = AlgebraVec(rv(&mut rng, 3.0));
            let wt = w - wd;
            let (eqt, gt) = power_identity_check(&wt, &w, &wd, &i).unwrap();
            let reference = gyroscopic_power(&wt, &w, &wd, &i);
            assert!((eqt - reference).abs() < 1e-12);
            assert!((gt - reference).abs() < 1e-12);
        }
        assert!(matches!(
            power_identity_check(&AlgebraVec::new(1.0, 0.0, 0.0), &w, &w, &i),
            Err(Error::InconsistentVelocityError(_))
        ));
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in ControllerKind::TRACKING.iter().chain([ControllerKind::Stabilize].iter()) {
            assert_eq!(kind.name().parse::<ControllerKind>().unwrap(), *kind);
        }
        assert!("pid".parse::<ControllerKind>().is_err());
    }
}
