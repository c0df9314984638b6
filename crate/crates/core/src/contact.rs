//! The family of distance-squared functions `f(t, c) = <γ(t) - c, γ(t) - c>`,
//! contact order against a centre, and the caustic.

use crate::curve::{curvature_numerator, Jet, ParamCurve, JET_ORDER};
use crate::error::{Error, Result};
use crate::math::binom;
use crate::minkowski::{Branch, CausalType, MinkVec};

/// `f` and its first five `t`-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistDerivs {
    pub f: f64,
    /// `f', f'', f''', f'''', f⁽⁵⁾`.
    pub d: [f64; 5],
}

impl DistDerivs {
    /// Derivative of order `k` (`k = 0` is `f` itself).
    #[inline]
    pub fn order(&self, k: usize) -> f64 {
        if k == 0 {
            self.f
        } else {
            self.d[k - 1]
        }
    }
}

/// A tangency between the curve and a pseudo-circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactPoint {
    pub t: f64,
    /// `k` of the `A_k` singularity of `f_c` at `t`; `None` when the gap rule
    /// could not separate zero from nonzero derivatives.
    pub order: Option<usize>,
    pub point: MinkVec,
    pub causal: CausalType,
    pub kappa: Option<f64>,
    pub kappa_prime: Option<f64>,
    /// Branch of the pseudo-circle holding `point`; absent for `LC` circles.
    pub branch: Option<Branch>,
    pub near_lightlike: bool,
}

/// `<γ(t) - c, γ(t) - c>`.
pub fn dist_sq<C: ParamCurve>(curve: &C, t: f64, c: MinkVec) -> f64 {
    let e = curve.point(t) - c;
    e.dot(e)
}

/// Derivatives of `f_c` at `t` by the Leibniz rule over the pseudo-scalar
/// product.
pub fn dist_sq_derivs<C: ParamCurve>(curve: &C, t: f64, c: MinkVec) -> DistDerivs {
    derivs_from_jet(&curve.jet(t), c)
}

pub(crate) fn derivs_from_jet(jet: &Jet, c: MinkVec) -> DistDerivs {
    let mut e = *jet;
    e[0] = jet[0] - c;
    let mut d = [0.0; 5];
    for (n, slot) in d.iter_mut().enumerate() {
        let n = n + 1;
        let mut acc = 0.0;
        for k in 0..=n {
            acc += binom(n, k) * e[k].dot(e[n - k]);
        }
        *slot = acc;
    }
    DistDerivs { f: e[0].dot(e[0]), d }
}

/// `f'` alone, the normal-line condition `2<γ', γ - c>`.
#[inline]
pub(crate) fn first_derivative(p: MinkVec, v: MinkVec, c: MinkVec) -> f64 {
    2.0 * v.dot(p - c)
}

/// Thresholds for [`contact_order`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactTolerance {
    /// Normalised derivatives at or below this are zero.
    pub tol: f64,
    /// Nonzero derivatives must exceed `gap · tol`.
    pub gap: f64,
}

impl Default for ContactTolerance {
    fn default() -> Self {
        Self { tol: 1e-6, gap: 10.0 }
    }
}

/// Normalised derivatives `f⁽ʲ⁾ / (‖γ'‖ʲ · max(1, |f|))`, `j = 1..=5`.
pub fn normalized_derivs(jet: &Jet, dd: &DistDerivs) -> [f64; 5] {
    let speed = jet[1].euclid_norm().max(f64::MIN_POSITIVE);
    let denom_f = libm::fabs(dd.f).max(1.0);
    let mut out = [0.0; 5];
    let mut s = 1.0;
    for j in 0..5 {
        s *= speed;
        out[j] = dd.d[j] / (s * denom_f);
    }
    out
}

/// Contact order `k` of `γ` with the pseudo-circle centred at `c` through
/// `γ(t)`: `Ok(None)` when `f'` is not zero (no tangency), `Ok(Some(k))` for
/// an `A_k` singularity with `k <= 4`, `Err(Ambiguous)` when the first
/// derivative above `tol` does not clear `gap · tol` or none does.
pub fn contact_order<C: ParamCurve>(curve: &C, t: f64, c: MinkVec, tol: ContactTolerance) -> Result<Option<usize>> {
    let jet = curve.jet(t);
    order_from_jet(&jet, c, tol)
}

pub(crate) fn order_from_jet(jet: &Jet, c: MinkVec, tol: ContactTolerance) -> Result<Option<usize>> {
    let dd = derivs_from_jet(jet, c);
    let n = normalized_derivs(jet, &dd);
    let first = n.iter().position(|v| libm::fabs(*v) > tol.tol);
    match first {
        None => Err(Error::Ambiguous),
        Some(0) => {
            if libm::fabs(n[0]) > tol.gap * tol.tol {
                Ok(None)
            } else {
                Err(Error::Ambiguous)
            }
        }
        Some(j) => {
            if libm::fabs(n[j]) > tol.gap * tol.tol {
                Ok(Some(j))
            } else {
                Err(Error::Ambiguous)
            }
        }
    }
}

/// Centre `c` solving `<γ', γ - c> = 0`, `<γ'', γ - c> + <γ', γ'> = 0`.
///
/// Defined at lightlike points too, where it returns `γ(t)` itself.
pub fn caustic_point<C: ParamCurve>(curve: &C, t: f64) -> Result<MinkVec> {
    caustic_from_jet(&curve.jet(t), t)
}

pub(crate) fn caustic_from_jet(jet: &Jet, t: f64) -> Result<MinkVec> {
    let (p, d1, d2) = (jet[0], jet[1], jet[2]);
    // rows <d1, c> = <d1, p>, <d2, c> = <d2, p> + <d1, d1>; <a, c> = -a0 c0 + a1 c1
    let det = curvature_numerator(d1, d2);
    if !(libm::fabs(det) > 1e-12 * d1.euclid_norm() * d2.euclid_norm()) {
        return Err(Error::SingularSystem { t });
    }
    let r1 = d1.dot(p);
    let r2 = d2.dot(p) + d1.dot(d1);
    let c0 = (r1 * d2.u1 - d1.u1 * r2) / det;
    let c1 = (-d1.u0 * r2 + d2.u0 * r1) / det;
    Ok(MinkVec::new(c0, c1))
}

/// `∂/∂c` of `f⁽ʲ⁾(t; c)` for `j >= 0`, as the pair `(∂/∂c0, ∂/∂c1)`.
pub(crate) fn center_gradient(jet: &Jet, c: MinkVec, j: usize) -> MinkVec {
    let e = if j == 0 { jet[0] - c } else { jet[j] };
    // d/dc f⁽ʲ⁾ · δ = -2 <e, δ>
    MinkVec::new(2.0 * e.u0, -2.0 * e.u1)
}

/// `∂/∂u` of `f⁽ʲ⁾(t; c)` given the `t`-jet of `∂γ/∂u`.
pub(crate) fn family_derivative(jet: &Jet, u_jet: &[MinkVec; JET_ORDER], c: MinkVec, j: usize) -> f64 {
    let mut acc = 0.0;
    for k in 0..=j {
        let e = if j - k == 0 { jet[0] - c } else { jet[j - k] };
        acc += binom(j, k) * u_jet[k].dot(e);
    }
    2.0 * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CurveFamily, FourierComponent, PseudoCircleArc};
    use crate::minkowski::PseudoCircle;
    use alloc::vec;

    fn circle() -> CurveFamily {
        CurveFamily::new(
            FourierComponent::new(0.0, vec![1.0], vec![0.0]).unwrap(),
            FourierComponent::new(0.0, vec![0.0], vec![1.0]).unwrap(),
        )
    }

    #[test]
    fn dist_sq_examples() {
        let c = circle();
        assert_eq!(dist_sq(&c.at(0.0), 0.0, MinkVec::ZERO), -1.0);
        assert_eq!(dist_sq(&c.at(0.0), 0.0, MinkVec::new(1.0, 0.0)), 0.0);
        // (γ - c) lightlike
        assert_eq!(dist_sq(&c.at(0.0), 0.0, MinkVec::new(0.0, -1.0)), 0.0);
    }

    #[test]
    fn unit_circle_caustic_solves_the_system() {
        let c = circle();
        let cc = caustic_point(&c.at(0.0), 0.0).unwrap();
        // -c1 = 0 and (1 - c0) + 1 = 0
        assert!((cc - MinkVec::new(2.0, 0.0)).euclid_norm() < 1e-12);
        let dd = dist_sq_derivs(&c.at(0.0), 0.0, cc);
        assert!(dd.d[0].abs() < 1e-12 && dd.d[1].abs() < 1e-12);
    }

    #[test]
    fn pseudo_circle_center_is_ambiguous() {
        let arc = PseudoCircleArc { circle: PseudoCircle::s(MinkVec::new(3.0, 4.0), 1.0), branch: Branch::Plus, speed: 1.0 };
        let r = contact_order(&arc, 0.2, MinkVec::new(3.0, 4.0), ContactTolerance::default());
        assert_eq!(r, Err(Error::Ambiguous));
    }

    #[test]
    fn off_normal_is_not_tangent() {
        let c = circle();
        let r = contact_order(&c.at(0.0), 0.3, MinkVec::new(0.2, 0.7), ContactTolerance::default());
        assert_eq!(r, Ok(None));
    }

    #[test]
    fn normal_line_point_is_a1() {
        let c = circle();
        // on the normal line at t = 0 (c1 = 0) but not the osculating centre
        let r = contact_order(&c.at(0.0), 0.0, MinkVec::new(0.5, 0.0), ContactTolerance::default());
        assert_eq!(r, Ok(Some(1)));
    }

    #[test]
    fn lightlike_caustic_is_curve_point() {
        let c = circle();
        let t = core::f64::consts::FRAC_PI_4;
        let cc = caustic_point(&c.at(0.0), t).unwrap();
        assert!((cc - c.at(0.0).point(t)).euclid_norm() < 1e-12);
    }
}
