//! Extended and constrained Lie-Poisson dynamics on `SO(3) ⋉ so*(3)`.
//!
//! The extended system treats `U = (V, τ)` as a free input,
//!
//! ```text
//! Q̇ = Q V,   Ṗ = ad*_V P + τ,
//! ```
//!
//! and the physical (constrained) system closes it with `V = 𝕀_t⁻¹ P` for a
//! kinetic-energy Hamiltonian `h(P, t) = ½⟨P, 𝕀_t⁻¹ P⟩`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Cholesky, SymmetricEigen, U3};

use crate::group::{self, AlgebraVec, CoalgebraVec, Rotation};
use crate::semidirect::{SemidirectAlgebra, SemidirectElement, Tangent};
use crate::{Error, Mat3, Result};

/// Largest condition number accepted for an inertia tensor.
pub const MAX_INERTIA_CONDITION: f64 = 1e12;

/// Symmetry tolerance for inertia tensors, `‖𝕀 − 𝕀ᵀ‖_F`.
pub const INERTIA_SYMMETRY_TOL: f64 = 1e-12;

/// Orthogonality defect above which the stepper re-projects `Q`.
pub const REPROJECT_TOL: f64 = 1e-12;

/// Time-varying factor `S_t` with `𝕀_t = S_tᵀ 𝕀₀ S_t`, `S_0 = I`.
///
/// Both `S_t` and `Ṡ_t` are supplied analytically.
pub trait FactorPath: Send + Sync {
    fn factor(&self, t: f64) -> Mat3;
    fn factor_rate(&self, t: f64) -> Mat3;
}

/// Factor path built from a pair of closures.
pub struct FnFactorPath<F, G> {
    pub factor: F,
    pub rate: G,
}

impl<F, G> FactorPath for FnFactorPath<F, G>
where
    F: Fn(f64) -> Mat3 + Send + Sync,
    G: Fn(f64) -> Mat3 + Send + Sync,
{
    fn factor(&self, t: f64) -> Mat3 {
        (self.factor)(t)
    }

    fn factor_rate(&self, t: f64) -> Mat3 {
        (self.rate)(t)
    }
}

/// Symmetric positive-definite inertia `𝕀_t : so(3) → so*(3)`, optionally
/// time-varying through a [`FactorPath`].
#[derive(Clone)]
pub struct InertiaTensor {
    base: Mat3,
    chol: Cholesky<f64, U3>,
    path: Option<Arc<dyn FactorPath>>,
}

impl fmt::Debug for InertiaTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InertiaTensor")
            .field("base", &self.base)
            .field("time_varying", &self.path.is_some())
            .finish()
    }
}

fn check_spd(m: &Mat3, t: f64) -> Result<()> {
    let eig = SymmetricEigen::new(*m).eigenvalues;
    let (lo, hi) = (eig.min(), eig.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= MAX_INERTIA_CONDITION) {
        return Err(Error::SingularInertia { t, condition });
    }
    Ok(())
}

impl InertiaTensor {
    pub fn constant(m: Mat3) -> Result<Self> {
        let asym = (m - m.transpose()).norm();
        if !(asym <= INERTIA_SYMMETRY_TOL) {
            return Err(Error::AsymmetricInertia(asym));
        }
        check_spd(&m, 0.0)?;
        let chol = Cholesky::new(m).ok_or(Error::SingularInertia {
            t: 0.0,
            condition: f64::INFINITY,
        })?;
        Ok(Self {
            base: m,
            chol,
            path: None,
        })
    }

    /// `𝕀_t = S_tᵀ 𝕀₀ S_t`.
    pub fn time_varying(base: Mat3, path: Arc<dyn FactorPath>) -> Result<Self> {
        let mut inertia = Self::constant(base)?;
        inertia.path = Some(path);
        Ok(inertia)
    }

    /// The fixed-wing airframe inertia with light roll-yaw coupling (kg·m²).
    pub fn fixed_wing() -> Self {
        Self::constant(Mat3::new(0.824, 0.0, 0.12, 0.0, 1.135, 0.0, 0.12, 0.0, 1.759))
            .expect("fixed-wing inertia is SPD")
    }

    pub fn is_constant(&self) -> bool {
        self.path.is_none()
    }

    /// `𝕀₀`
    pub fn base(&self) -> &Mat3 {
        &self.base
    }

    /// `𝕀_t` as a matrix.
    pub fn matrix_at(&self, t: f64) -> Mat3 {
        match &self.path {
            None => self.base,
            Some(path) => {
                let s = path.factor(t);
                s.transpose() * self.base * s
            }
        }
    }

    /// `𝕀_t V`
    pub fn momentum(&self, v: &AlgebraVec, t: f64) -> CoalgebraVec {
        CoalgebraVec(self.matrix_at(t) * v.0)
    }

    /// Solves `𝕀_t V = P` without forming an inverse.
    pub fn velocity(&self, p: &CoalgebraVec, t: f64) -> Result<AlgebraVec> {
        match &self.path {
            None => Ok(AlgebraVec(self.chol.solve(&p.0))),
            Some(path) => {
                check_spd(&self.matrix_at(t), t)?;
                let s = path.factor(t);
                let singular = || Error::SingularInertia {
                    t,
                    condition: f64::INFINITY,
                };
                let s_lu = s.lu();
                // 𝕀_t⁻¹ = S⁻¹ 𝕀₀⁻¹ S⁻ᵀ
                let y = s.transpose().lu().solve(&p.0).ok_or_else(singular)?;
                let z = self.chol.solve(&y);
                Ok(AlgebraVec(s_lu.solve(&z).ok_or_else(singular)?))
            }
        }
    }

    /// `h(P, t) = ½⟨P, 𝕀_t⁻¹ P⟩`
    pub fn hamiltonian(&self, p: &CoalgebraVec, t: f64) -> Result<f64> {
        Ok(0.5 * group::pairing(p, &self.velocity(p, t)?))
    }

    /// Feed-forward momentum term `Ṡ_tᵀ S_t⁻ᵀ P`; zero for constant inertia.
    pub fn factor_feedforward(&self, p: &CoalgebraVec, t: f64) -> Result<CoalgebraVec> {
        match &self.path {
            None => Ok(CoalgebraVec::zeros()),
            Some(path) => {
                let y = path
                    .factor(t)
                    .transpose()
                    .lu()
                    .solve(&p.0)
                    .ok_or(Error::SingularInertia {
                        t,
                        condition: f64::INFINITY,
                    })?;
                Ok(CoalgebraVec(path.factor_rate(t).transpose() * y))
            }
        }
    }

    /// Explicit time derivative `∂h/∂t = −⟨Ṡᵀ S⁻ᵀ P, 𝕀_t⁻¹ P⟩`.
    pub fn hamiltonian_rate(&self, p: &CoalgebraVec, t: f64) -> Result<f64> {
        let ff = self.factor_feedforward(p, t)?;
        Ok(-group::pairing(&ff, &self.velocity(p, t)?))
    }
}

/// Free function form of [`InertiaTensor::velocity`].
pub fn velocity_from_momentum(inertia: &InertiaTensor, p: &CoalgebraVec, t: f64) -> Result<AlgebraVec> {
    inertia.velocity(p, t)
}

/// Free function form of [`InertiaTensor::hamiltonian`].
pub fn hamiltonian(inertia: &InertiaTensor, p: &CoalgebraVec, t: f64) -> Result<f64> {
    inertia.hamiltonian(p, t)
}

/// Phase-space state at time `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LPState {
    pub x: SemidirectElement,
    pub t: f64,
}

impl LPState {
    pub fn new(x: SemidirectElement, t: f64) -> Self {
        Self { x, t }
    }
}

/// Free input `(V, τ)` of the extended system.
pub type LPInput = SemidirectAlgebra;

/// `f_U(X) = (Q V, ad*_V P + τ)`, which is exactly `DL_X[U]`.
pub fn vector_field(state: &LPState, input: &LPInput) -> Tangent {
    Tangent {
        base: state.x,
        body: input.v,
        p_dot: group::ad_star(&input.v, &state.x.p) + input.t,
    }
}

/// Controlled Euler equations: `ω = 𝕀⁻¹π`, `π̇ = −ω × π + τ`.
pub fn euler_rigid_body_field(state: &LPState, inertia: &InertiaTensor, tau: &CoalgebraVec) -> Result<Tangent> {
    let v = inertia.velocity(&state.x.p, state.t)?;
    Ok(vector_field(state, &LPInput::new(v, *tau)))
}

/// Closest rotation in Frobenius norm (polar factor).
fn reproject(m: &Mat3) -> Rotation {
    let svd = m.svd(true, true);
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut r = u * v_t;
    if r.determinant() < 0.0 {
        let mut u = u;
        u.column_mut(2).neg_mut();
        r = u * v_t;
    }
    Rotation::from_matrix_unchecked(r)
}

/// One RKMK4 step of `Q̇ = Q V(t, X)`, `Ṗ = g(t, X)`.
///
/// `field` returns the left-trivialized phase velocity `(V, Ṗ)`. Stage
/// velocities are pulled back through `J_r⁻¹`, combined in the algebra and
/// applied as `Q ← Q exp(Θ)`; the momentum takes the classical RK4 update.
pub fn step<F>(state: &LPState, field: F, dt: f64) -> Result<LPState>
where
    F: Fn(f64, &SemidirectElement) -> Result<SemidirectAlgebra>,
{
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("step size must be positive, got {dt}")));
    }
    let (q0, p0, t0) = (state.x.q, state.x.p, state.t);

    let eval = |t: f64, theta: &AlgebraVec, p: CoalgebraVec| -> Result<SemidirectAlgebra> {
        let x = SemidirectElement::new(q0 * group::exp(theta), p);
        let f = field(t, &x)?;
        if !f.is_finite() {
            return Err(Error::NonFiniteField { t });
        }
        Ok(SemidirectAlgebra::new(
            AlgebraVec(group::right_jacobian_inv(theta) * f.v.0),
            f.t,
        ))
    };

    let k1 = eval(t0, &AlgebraVec::zeros(), p0)?;
    let k2 = eval(t0 + 0.5 * dt, &(k1.v * (0.5 * dt)), p0 + k1.t * (0.5 * dt))?;
    let k3 = eval(t0 + 0.5 * dt, &(k2.v * (0.5 * dt)), p0 + k2.t * (0.5 * dt))?;
    let k4 = eval(t0 + dt, &(k3.v * dt), p0 + k3.t * dt)?;

    let incr = (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    let mut q = q0 * group::exp(&incr.v);
    if q.orthogonality_defect() > REPROJECT_TOL {
        q = reproject(q.matrix());
    }
    Ok(LPState::new(SemidirectElement::new(q, p0 + incr.t), t0 + dt))
}

/// How the velocity `V` is determined during simulation.
#[derive(Clone, Debug)]
pub enum VelocityModel {
    /// Extended system: `V` is the controller's output.
    Free,
    /// Lie-Poisson system: `V = 𝕀_t⁻¹ P`; the controller's `V` is ignored.
    Constrained(InertiaTensor),
}

impl VelocityModel {
    fn phase_velocity(&self, t: f64, x: &SemidirectElement, input: &LPInput) -> Result<SemidirectAlgebra> {
        let v = match self {
            VelocityModel::Free => input.v,
            VelocityModel::Constrained(inertia) => inertia.velocity(&x.p, t)?,
        };
        Ok(vector_field(&LPState::new(*x, t), &LPInput::new(v, input.t)).trivialized())
    }
}

/// One recorded point of a simulation: state and the input applied from it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub state: LPState,
    pub input: LPInput,
}

/// Number of recorded samples for horizon `t_final` at step `dt`:
/// `floor(t_final/dt) + 1`, tolerant to the rounding of `t_final/dt`.
pub fn sample_count(t_final: f64, dt: f64) -> usize {
    (t_final / dt + 1e-9).floor() as usize + 1
}

/// Fixed-step closed-loop simulation.
///
/// `controller(k, state)` is evaluated at each sample time `t₀ + k·dt` and
/// held over the following step. The last sample also carries the input the
/// controller would apply there.
pub fn simulate<C>(initial: &LPState, model: &VelocityModel, controller: C, t_final: f64, dt: f64) -> Result<Vec<Sample>>
where
    C: FnMut(usize, &LPState) -> Result<LPInput>,
{
    simulate_with_feedforward(initial, model, |_| CoalgebraVec::zeros(), controller, t_final, dt)
}

/// Closed-loop simulation around an open-loop torque `feedforward(t)`.
///
/// The controller returns the total input. Its deviation from
/// `feedforward(t_k)` is held over the step while `feedforward(t)` itself is
/// applied at every integrator stage, so a controller that returns exactly
/// the feed-forward reproduces the open-loop solution to integrator accuracy.
/// Recorded inputs are the controller outputs.
pub fn simulate_with_feedforward<F, C>(
    initial: &LPState,
    model: &VelocityModel,
    feedforward: F,
    mut controller: C,
    t_final: f64,
    dt: f64,
) -> Result<Vec<Sample>>
where
    F: Fn(f64) -> CoalgebraVec,
    C: FnMut(usize, &LPState) -> Result<LPInput>,
{
    if !(dt > 0.0) || !(t_final > 0.0) || dt > t_final {
        return Err(Error::InvalidArgument(format!(
            "need 0 < dt <= t_final, got dt = {dt}, t_final = {t_final}"
        )));
    }
    let n = sample_count(t_final, dt);
    let mut out = Vec::with_capacity(n);
    let mut state = *initial;

    for k in 0..n {
        let mut input = controller(k, &state)?;
        if !input.is_finite() {
            return Err(Error::NonFiniteControl { step: k });
        }
        if let VelocityModel::Constrained(inertia) = model {
            input.v = inertia.velocity(&state.x.p, state.t)?;
        }
        out.push(Sample { state, input });
        if k + 1 == n {
            break;
        }
        let held = LPInput::new(input.v, input.t - feedforward(state.t));
        let field = |t: f64, x: &SemidirectElement| {
            model.phase_velocity(t, x, &LPInput::new(held.v, held.t + feedforward(t)))
        };
        let mut next = step(&state, field, dt)?;
        next.t = initial.t + (k + 1) as f64 * dt;
        state = next;
    }
    Ok(out)
}
