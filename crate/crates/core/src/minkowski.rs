//! The Lorentz-Minkowski plane: pseudo-scalar product, causal character,
//! the perpendicular operator and pseudo-circles.

use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::math;

/// Default relative threshold below which `<u, u>` counts as zero.
pub const DEFAULT_EPS_LIGHT: f64 = 1e-12;

/// A point or vector of the Minkowski plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MinkVec {
    pub u0: f64,
    pub u1: f64,
}

impl MinkVec {
    pub const ZERO: MinkVec = MinkVec { u0: 0.0, u1: 0.0 };

    #[inline]
    pub const fn new(u0: f64, u1: f64) -> Self {
        Self { u0, u1 }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.u0.is_finite() && self.u1.is_finite()
    }

    /// `<self, other> = -u0 v0 + u1 v1`.
    #[inline]
    pub fn dot(self, other: MinkVec) -> f64 {
        pseudo_dot(self, other)
    }

    /// `u^⊥ = (u1, u0)`.
    #[inline]
    pub fn perp(self) -> MinkVec {
        perp(self)
    }

    /// Squared length in the ordinary Euclidean metric.
    #[inline]
    pub fn euclid_norm2(self) -> f64 {
        self.u0 * self.u0 + self.u1 * self.u1
    }

    #[inline]
    pub fn euclid_norm(self) -> f64 {
        math::sqrt(self.euclid_norm2())
    }

    /// Minkowski norm `sqrt(|<u, u>|)`.
    #[inline]
    pub fn mink_norm(self) -> f64 {
        math::sqrt(libm::fabs(self.dot(self)))
    }

    /// Euclidean determinant `u0 v1 - u1 v0`.
    #[inline]
    pub fn det(self, other: MinkVec) -> f64 {
        self.u0 * other.u1 - self.u1 * other.u0
    }

    pub fn causal_type(self) -> CausalType {
        causal_type(self)
    }
}

impl Add for MinkVec {
    type Output = MinkVec;
    #[inline]
    fn add(self, o: MinkVec) -> MinkVec {
        MinkVec::new(self.u0 + o.u0, self.u1 + o.u1)
    }
}

impl Sub for MinkVec {
    type Output = MinkVec;
    #[inline]
    fn sub(self, o: MinkVec) -> MinkVec {
        MinkVec::new(self.u0 - o.u0, self.u1 - o.u1)
    }
}

impl Neg for MinkVec {
    type Output = MinkVec;
    #[inline]
    fn neg(self) -> MinkVec {
        MinkVec::new(-self.u0, -self.u1)
    }
}

impl Mul<MinkVec> for f64 {
    type Output = MinkVec;
    #[inline]
    fn mul(self, v: MinkVec) -> MinkVec {
        MinkVec::new(self * v.u0, self * v.u1)
    }
}

impl Mul<f64> for MinkVec {
    type Output = MinkVec;
    #[inline]
    fn mul(self, s: f64) -> MinkVec {
        MinkVec::new(self.u0 * s, self.u1 * s)
    }
}

/// Causal character of a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CausalType {
    Timelike,
    Spacelike,
    Lightlike,
}

/// Pseudo-scalar product `-u0 v0 + u1 v1`.
#[inline]
pub fn pseudo_dot(u: MinkVec, v: MinkVec) -> f64 {
    -u.u0 * v.u0 + u.u1 * v.u1
}

/// Perpendicular operator `(u0, u1) -> (u1, u0)`.
#[inline]
pub fn perp(u: MinkVec) -> MinkVec {
    MinkVec::new(u.u1, u.u0)
}

/// True when `value` (a pseudo-square of something with Euclidean squared
/// size `scale2`) is within the relative lightlike band.
#[inline]
pub fn is_light(value: f64, scale2: f64, eps_light: f64) -> bool {
    libm::fabs(value) <= eps_light * scale2.max(1.0)
}

/// Causal type with the default threshold.
pub fn causal_type(u: MinkVec) -> CausalType {
    causal_type_with(u, DEFAULT_EPS_LIGHT)
}

/// Causal type; `<u,u>` is compared against `eps_light * max(1, |u|²)`.
pub fn causal_type_with(u: MinkVec, eps_light: f64) -> CausalType {
    let q = pseudo_dot(u, u);
    if is_light(q, u.euclid_norm2(), eps_light) {
        CausalType::Lightlike
    } else if q < 0.0 {
        CausalType::Timelike
    } else {
        CausalType::Spacelike
    }
}

/// Kind of pseudo-circle, named after the sign of `<p - c, p - c>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CircleKind {
    /// `<p-c, p-c> = -r²`; branches open along the first axis.
    H,
    /// `<p-c, p-c> = r²`; branches open along the second axis.
    S,
    /// `<p-c, p-c> = 0`; two lightlike lines through the removed centre.
    LC,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// A pseudo-circle stored by centre and signed squared radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoCircle {
    pub kind: CircleKind,
    pub center: MinkVec,
    pub r2: f64,
}

impl PseudoCircle {
    /// Builds the circle whose kind follows from the sign of `r2`.
    /// `scale2` is the squared Euclidean size used for the lightlike band.
    pub fn from_r2(center: MinkVec, r2: f64, scale2: f64, eps_light: f64) -> Self {
        let kind = if is_light(r2, scale2, eps_light) {
            CircleKind::LC
        } else if r2 < 0.0 {
            CircleKind::H
        } else {
            CircleKind::S
        };
        Self { kind, center, r2 }
    }

    pub fn h(center: MinkVec, r: f64) -> Self {
        Self { kind: CircleKind::H, center, r2: -r * r }
    }

    pub fn s(center: MinkVec, r: f64) -> Self {
        Self { kind: CircleKind::S, center, r2: r * r }
    }

    pub fn radius(&self) -> f64 {
        math::sqrt(libm::fabs(self.r2))
    }

    /// Lightlike directions of the two lines making up an `LC` circle.
    pub fn lightcone_directions() -> [MinkVec; 2] {
        [MinkVec::new(1.0, 1.0), MinkVec::new(1.0, -1.0)]
    }

    /// Point at hyperbolic angle `theta` on `branch`.
    ///
    /// `H`: `c + (±r cosh θ, r sinh θ)`; `S`: `c + (r sinh θ, ±r cosh θ)`.
    pub fn point(&self, branch: Branch, theta: f64) -> Result<MinkVec> {
        let r = self.radius();
        let s = branch.sign();
        let off = match self.kind {
            CircleKind::H => MinkVec::new(s * r * math::cosh(theta), r * math::sinh(theta)),
            CircleKind::S => MinkVec::new(r * math::sinh(theta), s * r * math::cosh(theta)),
            CircleKind::LC => return Err(Error::LightconeCircle),
        };
        Ok(self.center + off)
    }

    /// Unit tangent at `p`, oriented as `perp(p - c) / r`.
    ///
    /// The orientation is the one induced by point reflection through the
    /// centre, so the two branches are traversed in opposite senses.
    pub fn unit_tangent(&self, p: MinkVec) -> Result<MinkVec> {
        if self.kind == CircleKind::LC {
            return Err(Error::LightconeCircle);
        }
        Ok((1.0 / self.radius()) * perp(p - self.center))
    }

    /// Which branch `p` lies on. `tol` bounds the relative residual
    /// `|<p-c,p-c> - r2| / max(1, |p-c|²)`.
    pub fn branch_of(&self, p: MinkVec, tol: f64) -> Result<Branch> {
        let d = p - self.center;
        let residual = libm::fabs(d.dot(d) - self.r2) / d.euclid_norm2().max(1.0);
        if residual > tol {
            return Err(Error::NotOnCircle { residual });
        }
        let key = match self.kind {
            CircleKind::H => d.u0,
            CircleKind::S => d.u1,
            CircleKind::LC => return Err(Error::LightconeCircle),
        };
        if libm::fabs(key) < 0.5 * self.radius() {
            return Err(Error::NotOnCircle { residual });
        }
        Ok(if key > 0.0 { Branch::Plus } else { Branch::Minus })
    }

    /// Branch of `p` without the on-circle check.
    pub fn side_of(&self, p: MinkVec) -> Result<Branch> {
        let d = p - self.center;
        let key = match self.kind {
            CircleKind::H => d.u0,
            CircleKind::S => d.u1,
            CircleKind::LC => return Err(Error::LightconeCircle),
        };
        Ok(if key >= 0.0 { Branch::Plus } else { Branch::Minus })
    }
}

/// `pseudo_circle_point` as a free function.
pub fn pseudo_circle_point(pc: &PseudoCircle, branch: Branch, theta: f64) -> Result<MinkVec> {
    pc.point(branch, theta)
}

/// `branch_of` as a free function with a `1e-9` residual tolerance.
pub fn branch_of(pc: &PseudoCircle, p: MinkVec) -> Result<Branch> {
    pc.branch_of(p, 1e-9)
}
