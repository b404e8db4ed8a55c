//! The phase-space group `SO(3) ⋉ so*(3)`.
//!
//! Elements are pairs `(Q, P)` with
//!
//! ```text
//! (Q₁, P₁)(Q₂, P₂) = (Q₁Q₂, Ad*_{Q₂} P₁ + P₂)
//! (Q, P)⁻¹         = (Q⁻¹, −Ad*_{Q⁻¹} P)
//! ```
//!
//! The group is kept as a pair rather than a faithful matrix representation.
//! Tangent vectors are stored as a [`Tangent`]: basepoint plus the body
//! velocity `Q⁻¹Q̇` and the raw momentum rate `Ṗ`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::group::{self, AlgebraVec, CoalgebraVec, Rotation};
use crate::Mat3;

/// Point `(Q, P)` of the semidirect product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemidirectElement {
    pub q: Rotation,
    pub p: CoalgebraVec,
}

/// Element `(V, τ)` of the semidirect algebra `so(3) ⋉ so*(3)`.
///
/// Also used as the left-trivialized form `(Q⁻¹Q̇, Ṗ)` of a phase velocity.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SemidirectAlgebra {
    pub v: AlgebraVec,
    pub t: CoalgebraVec,
}

/// Tangent vector at `base`, stored as `(Q⁻¹Q̇, Ṗ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tangent {
    pub base: SemidirectElement,
    pub body: AlgebraVec,
    pub p_dot: CoalgebraVec,
}

impl SemidirectElement {
    pub fn new(q: Rotation, p: CoalgebraVec) -> Self {
        Self { q, p }
    }

    pub fn identity() -> Self {
        Self {
            q: Rotation::identity(),
            p: CoalgebraVec::zeros(),
        }
    }

    pub fn inverse(&self) -> Self {
        inv(self)
    }

    /// The flow element `(exp(V), τ)` of an algebra element, used by the
    /// defining curves `t ↦ (exp(tV), tτ)`.
    pub fn from_algebra(u: &SemidirectAlgebra) -> Self {
        Self {
            q: group::exp(&u.v),
            p: u.t,
        }
    }
}

impl SemidirectAlgebra {
    pub fn new(v: AlgebraVec, t: CoalgebraVec) -> Self {
        Self { v, t }
    }

    pub fn zeros() -> Self {
        Self::default()
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.t.is_finite()
    }
}

impl Add for SemidirectAlgebra {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.v + rhs.v, self.t + rhs.t)
    }
}

impl Sub for SemidirectAlgebra {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.v - rhs.v, self.t - rhs.t)
    }
}

impl Neg for SemidirectAlgebra {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.v, -self.t)
    }
}

impl Mul<f64> for SemidirectAlgebra {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.v * rhs, self.t * rhs)
    }
}

impl Mul for SemidirectElement {
    type Output = SemidirectElement;
    fn mul(self, rhs: SemidirectElement) -> SemidirectElement {
        mul(&self, &rhs)
    }
}

impl Tangent {
    /// The matrix tangent `Q̇ = Q V` of the configuration component.
    pub fn q_dot(&self) -> Mat3 {
        self.base.q.matrix() * group::hat(&self.body)
    }

    /// Body velocity and momentum rate as an algebra-shaped pair.
    pub fn trivialized(&self) -> SemidirectAlgebra {
        SemidirectAlgebra::new(self.body, self.p_dot)
    }

    /// Pushforward by right translation `X ↦ X Y`.
    ///
    /// `(Q̇, Ṗ) ↦ (Q̇ Q_Y, Ad*_{Q_Y} Ṗ)` at basepoint `X Y`.
    pub fn right_translate(&self, y: &SemidirectElement) -> Tangent {
        Tangent {
            base: mul(&self.base, y),
            body: group::adjoint(&y.q.inverse(), &self.body),
            p_dot: group::coadjoint(&y.q, &self.p_dot),
        }
    }

    /// Pushforward by left translation `X ↦ Y X`.
    ///
    /// `(Q̇, Ṗ) ↦ (Q_Y Q̇, ad*_V Ad*_Q P_Y + Ṗ)` at basepoint `Y X`.
    pub fn left_translate(&self, y: &SemidirectElement) -> Tangent {
        let moved = group::coadjoint(&self.base.q, &y.p);
        Tangent {
            base: mul(y, &self.base),
            body: self.body,
            p_dot: group::ad_star(&self.body, &moved) + self.p_dot,
        }
    }
}

/// `(Q_a Q_b, Ad*_{Q_b} P_a + P_b)`
pub fn mul(a: &SemidirectElement, b: &SemidirectElement) -> SemidirectElement {
    SemidirectElement {
        q: a.q * b.q,
        p: group::coadjoint(&b.q, &a.p) + b.p,
    }
}

/// `(Q⁻¹, −Ad*_{Q⁻¹} P)`; on SO(3) this is `(Qᵀ, −Q P)`.
pub fn inv(a: &SemidirectElement) -> SemidirectElement {
    let q_inv = a.q.inverse();
    SemidirectElement {
        q: q_inv,
        p: -group::coadjoint(&q_inv, &a.p),
    }
}

/// Left-translated tangent `DL_X[U] = (Q V, ad*_V P + τ)` at `X`.
pub fn d_left(x: &SemidirectElement, u: &SemidirectAlgebra) -> Tangent {
    Tangent {
        base: *x,
        body: u.v,
        p_dot: group::ad_star(&u.v, &x.p) + u.t,
    }
}

/// Right-translated tangent `DR_Y[U] = (V Q_Y, Ad*_{Q_Y} τ)` at `Y`.
pub fn d_right(y: &SemidirectElement, u: &SemidirectAlgebra) -> Tangent {
    Tangent {
        base: *y,
        body: group::adjoint(&y.q.inverse(), &u.v),
        p_dot: group::coadjoint(&y.q, &u.t),
    }
}

/// `Ad_Y U = (Ad_{Q_Y} V, Ad*_{Q_Y⁻¹}(ad*_V P_Y + τ))`.
pub fn adjoint(y: &SemidirectElement, u: &SemidirectAlgebra) -> SemidirectAlgebra {
    SemidirectAlgebra {
        v: group::adjoint(&y.q, &u.v),
        t: adjoint_tau(y, u),
    }
}

/// Second (coalgebra) component of [`adjoint`].
pub fn adjoint_tau(y: &SemidirectElement, u: &SemidirectAlgebra) -> CoalgebraVec {
    group::coadjoint(&y.q.inverse(), &(group::ad_star(&u.v, &y.p) + u.t))
}

/// `ad_W U = (ad_{V_W} V_U, ad*_{V_U} P_W − ad*_{V_W} P_U)`.
pub fn little_ad(w: &SemidirectAlgebra, u: &SemidirectAlgebra) -> SemidirectAlgebra {
    SemidirectAlgebra {
        v: group::ad(&w.v, &u.v),
        t: group::ad_star(&u.v, &w.t) - group::ad_star(&w.v, &u.t),
    }
}
