//! SO(3) as a matrix Lie group.
//!
//! The Lie algebra `so(3)` and its dual `so*(3)` are both identified with
//! ℝ³ through the hat map, `⟨π, u^×⟩ = πᵀu`. Under this identification
//!
//! | operator            | vector form |
//! |---------------------|-------------|
//! | `Ad_R u`            | `R u`       |
//! | `Ad*_R π`           | `Rᵀ π`      |
//! | `ad_u v`            | `u × v`     |
//! | `ad*_u π`           | `−u × π`    |
//!
//! [`AlgebraVec`] and [`CoalgebraVec`] keep velocities and momenta apart at
//! the type level; the pairing is the only way to combine the two.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::Matrix3;

use crate::{Error, Mat3, Result, Vec3};

/// Tolerance on `‖RᵀR − I‖_F` and `|det R − 1|` for a matrix to count as a rotation.
pub const ROTATION_TOL: f64 = 1e-9;

/// Largest symmetric-part norm accepted by [`vee`].
pub const SKEW_TOL: f64 = 1e-6;

/// Below this angle `exp` switches to its second-order Taylor expansion.
const EXP_TAYLOR_THRESHOLD: f64 = 1e-6;

/// Within this distance of π, `log` extracts the axis from the symmetric part.
const LOG_NEAR_PI: f64 = 1e-3;

macro_rules! vector_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, Default, PartialEq)]
        pub struct $name(pub Vec3);

        impl $name {
            pub const fn new(x: f64, y: f64, z: f64) -> Self {
                Self(Vec3::new(x, y, z))
            }

            pub fn zeros() -> Self {
                Self(Vec3::zeros())
            }

            pub fn norm(&self) -> f64 {
                self.0.norm()
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|c| c.is_finite())
            }

            pub fn as_vec(&self) -> &Vec3 {
                &self.0
            }
        }

        impl From<Vec3> for $name {
            fn from(v: Vec3) -> Self {
                Self(v)
            }
        }

        impl From<$name> for Vec3 {
            fn from(v: $name) -> Self {
                v.0
            }
        }

        impl Add for $name {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                Self(self.0 + rhs.0)
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(self, rhs: Self) -> Self {
                Self(self.0 - rhs.0)
            }
        }

        impl Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                Self(-self.0)
            }
        }

        impl Mul<f64> for $name {
            type Output = Self;
            fn mul(self, rhs: f64) -> Self {
                Self(self.0 * rhs)
            }
        }

        impl Mul<$name> for f64 {
            type Output = $name;
            fn mul(self, rhs: $name) -> $name {
                $name(rhs.0 * self)
            }
        }

        impl AddAssign for $name {
            fn add_assign(&mut self, rhs: Self) {
                self.0 += rhs.0;
            }
        }

        impl SubAssign for $name {
            fn sub_assign(&mut self, rhs: Self) {
                self.0 -= rhs.0;
            }
        }
    };
}

vector_newtype!(
    /// Element of `so(3)` in the hat basis: angular velocities and the
    /// configuration part of semidirect algebra elements (rad/s).
    AlgebraVec
);

vector_newtype!(
    /// Element of `so*(3)`: angular momenta (N·m·s) and torques (N·m).
    CoalgebraVec
);

/// Rotation matrix, `RᵀR = I`, `det R = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation(Mat3);

impl Rotation {
    pub fn identity() -> Self {
        Self(Mat3::identity())
    }

    /// Validates `m` against [`ROTATION_TOL`] and wraps it.
    pub fn new(m: Mat3) -> Result<Self> {
        let r = Self(m);
        let orthogonality = r.orthogonality_defect();
        let det = m.determinant();
        if !(orthogonality <= ROTATION_TOL) || !((det - 1.0).abs() <= ROTATION_TOL) {
            return Err(Error::NotARotation { orthogonality, det });
        }
        Ok(r)
    }

    /// Wraps `m` without validation. The caller guarantees it is a rotation.
    pub fn from_matrix_unchecked(m: Mat3) -> Self {
        Self(m)
    }

    /// Rotation about a unit axis `e_axis` (0, 1, 2) by `angle`.
    pub fn about_axis(axis: usize, angle: f64) -> Self {
        let mut u = Vec3::zeros();
        u[axis] = angle;
        exp(&AlgebraVec(u))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn inverse(&self) -> Self {
        self.transpose()
    }

    /// `‖RᵀR − I‖_F`
    pub fn orthogonality_defect(&self) -> f64 {
        (self.0.transpose() * self.0 - Mat3::identity()).norm()
    }

    /// Geodesic distance to the identity, in `[0, π]`.
    pub fn angle(&self) -> f64 {
        let (sin_half2, cos) = sin_cos_parts(&self.0);
        sin_half2.atan2(cos)
    }

    pub fn log(&self) -> AlgebraVec {
        log(self)
    }

    /// Applies the rotation to a plain vector.
    pub fn rotate(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// Applies the transpose to a plain vector.
    pub fn rotate_inverse(&self, v: &Vec3) -> Vec3 {
        self.0.tr_mul(v)
    }
}

impl Mul for Rotation {
    type Output = Rotation;
    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

impl Mul<&Rotation> for &Rotation {
    type Output = Rotation;
    fn mul(self, rhs: &Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = self.log();
        write!(f, "Rotation(log = [{:.6}, {:.6}, {:.6}])", l.0.x, l.0.y, l.0.z)
    }
}

/// `u ↦ u^×`, the skew matrix with `u^× w = u × w`.
pub fn hat(u: &AlgebraVec) -> Mat3 {
    skew(&u.0)
}

pub(crate) fn skew(u: &Vec3) -> Mat3 {
    Matrix3::new(0.0, -u.z, u.y, u.z, 0.0, -u.x, -u.y, u.x, 0.0)
}

/// Inverse of [`hat`]. Rejects matrices whose symmetric part exceeds [`SKEW_TOL`].
pub fn vee(m: &Mat3) -> Result<AlgebraVec> {
    let sym = ((m + m.transpose()) * 0.5).norm();
    if !(sym <= SKEW_TOL) {
        return Err(Error::NotSkew(sym));
    }
    Ok(AlgebraVec(unskew(m)))
}

/// Reads the skew part of `m` as a vector without any check.
pub(crate) fn unskew(m: &Mat3) -> Vec3 {
    Vec3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    )
}

/// Rodrigues formula.
pub fn exp(u: &AlgebraVec) -> Rotation {
    let theta = u.norm();
    let k = hat(u);
    let k2 = k * k;
    let (a, b) = if theta < EXP_TAYLOR_THRESHOLD {
        (1.0 - theta * theta / 6.0, 0.5 - theta * theta / 24.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
    };
    Rotation(Mat3::identity() + k * a + k2 * b)
}

/// Result of [`log_checked`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Log {
    pub value: AlgebraVec,
    /// Set when the angle is within 1e-3 of π and the axis came from the
    /// symmetric part. The angle stays accurate; the axis loses digits.
    pub reduced_accuracy: bool,
}

/// Principal logarithm, norm in `[0, π]`.
pub fn log(r: &Rotation) -> AlgebraVec {
    log_checked(r).value
}

pub fn log_checked(r: &Rotation) -> Log {
    let m = &r.0;
    let (s, c) = sin_cos_parts(m);
    let theta = s.atan2(c);
    let w = unskew(m);

    if theta < 1e-6 {
        // θ / sin θ = 1 + θ²/6 + O(θ⁴)
        return Log {
            value: AlgebraVec(w * (1.0 + theta * theta / 6.0)),
            reduced_accuracy: false,
        };
    }
    if std::f64::consts::PI - theta > LOG_NEAR_PI {
        return Log {
            value: AlgebraVec(w * (theta / theta.sin())),
            reduced_accuracy: false,
        };
    }

    // (R + Rᵀ)/2 = cos θ I + (1 − cos θ) n nᵀ
    let sym = (m + m.transpose()) * 0.5;
    let nnt = (sym - Mat3::identity() * c) / (1.0 - c);
    let i = (0..3)
        .max_by(|&a, &b| nnt[(a, a)].total_cmp(&nnt[(b, b)]))
        .unwrap_or(0);
    let mut n = nnt.column(i).into_owned() / nnt[(i, i)].max(0.0).sqrt();
    n /= n.norm();
    if n.dot(&w) < 0.0 {
        n = -n;
    }
    Log {
        value: AlgebraVec(n * theta),
        reduced_accuracy: true,
    }
}

/// `(sin θ, cos θ)` from the skew part and trace of a rotation matrix.
fn sin_cos_parts(m: &Mat3) -> (f64, f64) {
    let c = ((m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let s = unskew(m).norm();
    (s, c)
}

/// Inverse right Jacobian of `exp`: if `R(t) = R₀ exp(θ(t))` then
/// `θ̇ = J_r⁻¹(θ) ω` where `ω = R⁻¹Ṙ`. Valid for `‖θ‖ < 2π`.
pub fn right_jacobian_inv(theta: &AlgebraVec) -> Mat3 {
    let t = theta.norm();
    let k = hat(theta);
    let coeff = if t < 1e-4 {
        1.0 / 12.0 + t * t / 720.0
    } else {
        1.0 / (t * t) - (1.0 + t.cos()) / (2.0 * t * t.sin())
    };
    Mat3::identity() + k * 0.5 + k * k * coeff
}

/// `Ad_R u = R u`
pub fn adjoint(r: &Rotation, u: &AlgebraVec) -> AlgebraVec {
    AlgebraVec(r.0 * u.0)
}

/// `Ad*_R π = Rᵀ π`
pub fn coadjoint(r: &Rotation, p: &CoalgebraVec) -> CoalgebraVec {
    CoalgebraVec(r.0.tr_mul(&p.0))
}

/// `ad_u v = u × v`
pub fn ad(u: &AlgebraVec, v: &AlgebraVec) -> AlgebraVec {
    AlgebraVec(u.0.cross(&v.0))
}

/// `ad*_u π = −u × π`
pub fn ad_star(u: &AlgebraVec, p: &CoalgebraVec) -> CoalgebraVec {
    CoalgebraVec(p.0.cross(&u.0))
}

/// `⟨π, u⟩ = πᵀu`
pub fn pairing(p: &CoalgebraVec, u: &AlgebraVec) -> f64 {
    p.0.dot(&u.0)
}
