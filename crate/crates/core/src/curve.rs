//! Closed curves given by finite Fourier series, 1-parameter families that
//! depend polynomially on the family parameter, and their Minkowski
//! differential geometry.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{self, TAU};
use crate::minkowski::{
    causal_type_with, is_light, perp, CausalType, MinkVec, PseudoCircle, Branch, CircleKind,
    DEFAULT_EPS_LIGHT,
};

/// Highest `t`-derivative carried in a [`Jet`].
pub const JET_ORDER: usize = 5;

/// `γ, γ', ..., γ⁽⁵⁾` at one parameter value.
pub type Jet = [MinkVec; JET_ORDER + 1];

/// A trigonometric polynomial `const + Σ a_n cos(nt) + b_n sin(nt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierComponent {
    pub constant: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl FourierComponent {
    /// Validates finiteness and `K >= 1` where `K` is the longer of the two
    /// coefficient lists.
    pub fn new(constant: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        if cos.is_empty() && sin.is_empty() {
            return Err(Error::InvalidArgument { what: "fourier component needs at least one harmonic" });
        }
        if !constant.is_finite() || cos.iter().chain(sin.iter()).any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument { what: "fourier coefficients must be finite" });
        }
        Ok(Self { constant, cos, sin })
    }

    pub fn harmonics(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }

    /// Writes the derivatives of order `0..out.len()` at `t`.
    pub fn derivs_into(&self, t: f64, out: &mut [f64]) {
        for o in out.iter_mut() {
            *o = 0.0;
        }
        if let Some(first) = out.first_mut() {
            *first = self.constant;
        }
        let (s1, c1) = (math::sin(t), math::cos(t));
        let (mut s, mut c) = (0.0, 1.0);
        for n in 1..=self.harmonics() {
            // angle addition; the drift stays far below the tolerances used
            (s, c) = (s * c1 + c * s1, c * c1 - s * s1);
            let a = self.cos.get(n - 1).copied().unwrap_or(0.0);
            let b = self.sin.get(n - 1).copied().unwrap_or(0.0);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let nf = n as f64;
            // d^k/dt^k of a cos + b sin cycles with period four
            let mut scale = 1.0;
            for (k, o) in out.iter_mut().enumerate() {
                let v = match k % 4 {
                    0 => a * c + b * s,
                    1 => -a * s + b * c,
                    2 => -a * c - b * s,
                    _ => a * s - b * c,
                };
                *o += scale * v;
                scale *= nf;
            }
        }
    }

    /// The `k`-th derivative at `t`.
    pub fn eval(&self, t: f64, k: usize) -> f64 {
        let mut buf = [0.0; 8];
        assert!(k < buf.len(), "derivative order {k} unsupported");
        self.derivs_into(t, &mut buf[..=k]);
        buf[k]
    }
}

/// One polynomial term `u^order · (dx(t), dy(t))` of a family.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub order: u32,
    pub dx: FourierComponent,
    pub dy: FourierComponent,
}

/// `γ(t, u) = γ₀(t) + Σ u^m δγ_m(t)` with `t ∈ [0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFamily {
    pub base_x: FourierComponent,
    pub base_y: FourierComponent,
    pub perturbations: Vec<Perturbation>,
}

impl CurveFamily {
    pub fn new(base_x: FourierComponent, base_y: FourierComponent) -> Self {
        Self { base_x, base_y, perturbations: Vec::new() }
    }

    pub fn with_perturbation(mut self, order: u32, dx: FourierComponent, dy: FourierComponent) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument { what: "perturbation order must be at least 1" });
        }
        self.perturbations.push(Perturbation { order, dx, dy });
        Ok(self)
    }

    pub fn is_family(&self) -> bool {
        !self.perturbations.is_empty()
    }

    /// The curve of the family at parameter `u`.
    pub fn at(&self, u: f64) -> FamilySlice<'_> {
        FamilySlice { family: self, u }
    }

    /// Exact `k`-th `t`-derivative of `γ(·, u)` at `t`.
    pub fn eval(&self, t: f64, u: f64, k: usize) -> MinkVec {
        assert!(k <= JET_ORDER, "derivative order {k} unsupported");
        self.at(u).jet(t)[k]
    }

    /// `t`-derivatives of `∂γ/∂u` of order `0..=4`.
    pub fn u_jet(&self, t: f64, u: f64) -> [MinkVec; JET_ORDER] {
        let mut out = [MinkVec::ZERO; JET_ORDER];
        let mut bx = [0.0; JET_ORDER];
        let mut by = [0.0; JET_ORDER];
        for p in &self.perturbations {
            let m = p.order as i32;
            let w = f64::from(m) * math::powi(u, m - 1);
            if w == 0.0 {
                continue;
            }
            p.dx.derivs_into(t, &mut bx);
            p.dy.derivs_into(t, &mut by);
            for k in 0..JET_ORDER {
                out[k] = out[k] + w * MinkVec::new(bx[k], by[k]);
            }
        }
        out
    }
}

/// A plane curve parametrized by `t`, with derivatives up to [`JET_ORDER`].
pub trait ParamCurve {
    fn jet(&self, t: f64) -> Jet;

    /// Whether the parameter domain is the circle `[0, 2π)`.
    fn is_closed(&self) -> bool {
        true
    }

    fn point(&self, t: f64) -> MinkVec {
        self.jet(t)[0]
    }

    fn velocity(&self, t: f64) -> MinkVec {
        self.jet(t)[1]
    }
}

impl<C: ParamCurve + ?Sized> ParamCurve for &C {
    fn jet(&self, t: f64) -> Jet {
        (**self).jet(t)
    }
    fn is_closed(&self) -> bool {
        (**self).is_closed()
    }
}

/// A member `γ(·, u)` of a [`CurveFamily`].
#[derive(Debug, Clone, Copy)]
pub struct FamilySlice<'a> {
    pub family: &'a CurveFamily,
    pub u: f64,
}

impl ParamCurve for FamilySlice<'_> {
    fn jet(&self, t: f64) -> Jet {
        let mut xs = [0.0; JET_ORDER + 1];
        let mut ys = [0.0; JET_ORDER + 1];
        let mut bx = [0.0; JET_ORDER + 1];
        let mut by = [0.0; JET_ORDER + 1];
        self.family.base_x.derivs_into(t, &mut xs);
        self.family.base_y.derivs_into(t, &mut ys);
        for p in &self.family.perturbations {
            let w = math::powi(self.u, p.order as i32);
            if w == 0.0 {
                continue;
            }
            p.dx.derivs_into(t, &mut bx);
            p.dy.derivs_into(t, &mut by);
            for k in 0..=JET_ORDER {
                xs[k] += w * bx[k];
                ys[k] += w * by[k];
            }
        }
        let mut out = [MinkVec::ZERO; JET_ORDER + 1];
        for k in 0..=JET_ORDER {
            out[k] = MinkVec::new(xs[k], ys[k]);
        }
        out
    }
}

/// An arc of a pseudo-circle, `t ↦ circle.point(branch, speed·t)`, evaluated
/// in closed form. Not a closed curve; used to check curvature formulas
/// without Fourier truncation.
#[derive(Debug, Clone, Copy)]
pub struct PseudoCircleArc {
    pub circle: PseudoCircle,
    pub branch: Branch,
    pub speed: f64,
}

impl ParamCurve for PseudoCircleArc {
    fn jet(&self, t: f64) -> Jet {
        let r = self.circle.radius();
        let s = self.branch.sign();
        let w = self.speed;
        let (ch, sh) = (math::cosh(w * t), math::sinh(w * t));
        let mut out = [MinkVec::ZERO; JET_ORDER + 1];
        let mut scale = 1.0;
        for (k, o) in out.iter_mut().enumerate() {
            // even orders reproduce (cosh, sinh), odd orders swap them
            let (c, h) = if k % 2 == 0 { (ch, sh) } else { (sh, ch) };
            let off = match self.circle.kind {
                CircleKind::H => MinkVec::new(s * r * c, r * h),
                _ => MinkVec::new(r * h, s * r * c),
            };
            *o = if k == 0 { self.circle.center + off } else { scale * off };
            scale *= w;
        }
        out
    }

    fn is_closed(&self) -> bool {
        false
    }
}

/// `<γ', γ'>`.
pub fn tangent_square<C: ParamCurve>(curve: &C, t: f64) -> f64 {
    let d = curve.velocity(t);
    d.dot(d)
}

/// `<γ', γ''^⊥>`, the numerator of the curvature; also the determinant of the
/// caustic linear system.
#[inline]
pub(crate) fn curvature_numerator(d1: MinkVec, d2: MinkVec) -> f64 {
    d1.dot(perp(d2))
}

fn require_non_light(jet: &Jet, t: f64, eps_light: f64) -> Result<f64> {
    let d1 = jet[1];
    if d1.euclid_norm2() == 0.0 {
        return Err(Error::Irregular { t });
    }
    let q = d1.dot(d1);
    if is_light(q, d1.euclid_norm2(), eps_light) {
        return Err(Error::LightlikeTangent { t });
    }
    Ok(q)
}

/// Minkowski curvature `<γ', γ''^⊥> / |<γ', γ'>|^{3/2}`.
pub fn curvature<C: ParamCurve>(curve: &C, t: f64) -> Result<f64> {
    curvature_with(curve, t, DEFAULT_EPS_LIGHT)
}

pub fn curvature_with<C: ParamCurve>(curve: &C, t: f64, eps_light: f64) -> Result<f64> {
    let jet = curve.jet(t);
    let q = require_non_light(&jet, t, eps_light)?;
    let aq = libm::fabs(q);
    Ok(curvature_numerator(jet[1], jet[2]) / (aq * math::sqrt(aq)))
}

/// Derivative of curvature with respect to arclength, `(dκ/dt) / ‖γ'‖`.
pub fn curvature_arclength_derivative<C: ParamCurve>(curve: &C, t: f64) -> Result<f64> {
    curvature_arclength_derivative_with(curve, t, DEFAULT_EPS_LIGHT)
}

pub fn curvature_arclength_derivative_with<C: ParamCurve>(curve: &C, t: f64, eps_light: f64) -> Result<f64> {
    let jet = curve.jet(t);
    let q = require_non_light(&jet, t, eps_light)?;
    Ok(kappa_prime_from_jet(&jet, q))
}

fn kappa_prime_from_jet(jet: &Jet, q: f64) -> f64 {
    let (d1, d2, d3) = (jet[1], jet[2], jet[3]);
    let num = curvature_numerator(d1, d2);
    // the γ''·γ'' terms cancel in the derivative of the numerator
    let num_dt = curvature_numerator(d1, d3);
    let q_dt = 2.0 * d1.dot(d2);
    let aq = libm::fabs(q);
    let sq = math::sqrt(aq);
    let sign = if q > 0.0 { 1.0 } else { -1.0 };
    let dkappa = num_dt / (aq * sq) - 1.5 * num * sign * q_dt / (aq * aq * sq);
    dkappa / sq
}

/// Unit tangent and normal. `N = σ·perp(T)` with `σ = sign<γ', γ'>`, the
/// sign for which `γ - N/κ` is the centre of the osculating pseudo-circle.
pub fn unit_tangent_normal<C: ParamCurve>(curve: &C, t: f64) -> Result<(MinkVec, MinkVec)> {
    let jet = curve.jet(t);
    let q = require_non_light(&jet, t, DEFAULT_EPS_LIGHT)?;
    Ok(frame_from(jet[1], q))
}

fn frame_from(d1: MinkVec, q: f64) -> (MinkVec, MinkVec) {
    let tangent = (1.0 / math::sqrt(libm::fabs(q))) * d1;
    let sigma = if q > 0.0 { 1.0 } else { -1.0 };
    (tangent, sigma * perp(tangent))
}

/// Evolute point `γ - N/κ`.
pub fn evolute<C: ParamCurve>(curve: &C, t: f64) -> Result<MinkVec> {
    let jet = curve.jet(t);
    let q = require_non_light(&jet, t, DEFAULT_EPS_LIGHT)?;
    let num = curvature_numerator(jet[1], jet[2]);
    if libm::fabs(num) <= 1e-12 * jet[1].euclid_norm() * jet[2].euclid_norm() {
        return Err(Error::VanishingCurvature { t });
    }
    let aq = libm::fabs(q);
    let kappa = num / (aq * math::sqrt(aq));
    let (_, normal) = frame_from(jet[1], q);
    Ok(jet[0] - (1.0 / kappa) * normal)
}

/// Local differential data of a curve at one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePointData {
    pub t: f64,
    pub point: MinkVec,
    /// `γ'` through `γ''''`.
    pub derivs: [MinkVec; 4],
    pub causal: CausalType,
    /// Unit tangent; `None` at lightlike points.
    pub tangent: Option<MinkVec>,
    pub kappa: Option<f64>,
    pub kappa_prime: Option<f64>,
}

pub fn point_data<C: ParamCurve>(curve: &C, t: f64, eps_light: f64) -> CurvePointData {
    let jet = curve.jet(t);
    let causal = causal_type_with(jet[1], eps_light);
    let (tangent, kappa, kappa_prime) = if causal == CausalType::Lightlike {
        (None, None, None)
    } else {
        let q = jet[1].dot(jet[1]);
        let aq = libm::fabs(q);
        let kappa = curvature_numerator(jet[1], jet[2]) / (aq * math::sqrt(aq));
        (Some(frame_from(jet[1], q).0), Some(kappa), Some(kappa_prime_from_jet(&jet, q)))
    };
    CurvePointData {
        t,
        point: jet[0],
        derivs: [jet[1], jet[2], jet[3], jet[4]],
        causal,
        tangent,
        kappa,
        kappa_prime,
    }
}

/// Roots of `<γ', γ'>` on `[0, 2π)`, by sign changes on a `grid`-point
/// sampling refined with bisection to `tol`.
pub fn lightlike_points<C: ParamCurve>(curve: &C, grid: usize, tol: f64) -> Vec<f64> {
    let grid = grid.max(8);
    let h = TAU / grid as f64;
    let q = |t: f64| tangent_square(curve, t);
    let mut roots = Vec::new();
    let mut t_a = 0.0;
    let mut q_a = q(t_a);
    for i in 0..grid {
        let t_b = if i + 1 == grid { TAU } else { (i + 1) as f64 * h };
        let q_b = q(t_b);
        if q_a == 0.0 {
            roots.push(t_a);
        } else if q_a * q_b < 0.0 {
            roots.push(bisect(&q, t_a, t_b, q_a, tol));
        }
        t_a = t_b;
        q_a = q_b;
    }
    let mut out: Vec<f64> = roots.into_iter().map(math::wrap_angle).collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| libm::fabs(*a - *b) < 10.0 * tol);
    if out.len() > 1 && TAU - out[out.len() - 1] + out[0] < 10.0 * tol {
        out.pop();
    }
    out
}

/// Bisection on `[a, b]` where `f(a) = fa` and `f(b)` have opposite signs.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a <= tol || m <= a || m >= b {
            return m;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Fails with [`Error::Irregular`] at the first of `samples` parameters where
/// the speed drops below `1e-9` of the curve's size.
pub fn check_regular<C: ParamCurve>(curve: &C, samples: usize) -> Result<()> {
    let floor = 1e-9 * curve_scale(curve, samples);
    for i in 0..samples.max(4) {
        let t = TAU * i as f64 / samples.max(4) as f64;
        if !(curve.velocity(t).euclid_norm() > floor) {
            return Err(Error::Irregular { t });
        }
    }
    Ok(())
}

/// Half the diagonal of the Euclidean bounding box of the curve, sampled at
/// `samples` parameters of `[0, 2π)`.
pub fn curve_scale<C: ParamCurve>(curve: &C, samples: usize) -> f64 {
    let (lo, hi) = bounding_box(curve, samples);
    0.5 * (hi - lo).euclid_norm()
}

pub fn bounding_box<C: ParamCurve>(curve: &C, samples: usize) -> (MinkVec, MinkVec) {
    let mut lo = MinkVec::new(f64::INFINITY, f64::INFINITY);
    let mut hi = MinkVec::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for i in 0..samples.max(4) {
        let p = curve.point(TAU * i as f64 / samples.max(4) as f64);
        lo = MinkVec::new(lo.u0.min(p.u0), lo.u1.min(p.u1));
        hi = MinkVec::new(hi.u0.max(p.u0), hi.u1.max(p.u1));
    }
    (lo, hi)
}

/// Hyperbolic angle of `p` in the branch parametrisation of `circle`.
pub fn hyperbolic_angle(circle: &PseudoCircle, p: MinkVec) -> Option<f64> {
    let d = p - circle.center;
    let r = circle.radius();
    match circle.kind {
        CircleKind::H => Some(libm::asinh(d.u1 / r)),
        CircleKind::S => Some(libm::asinh(d.u0 / r)),
        CircleKind::LC => None,
    }
}
