//! Test curves, families with planted events, and brute-force oracles.
//!
//! Events are planted by jet matching: a closed Fourier curve is corrected
//! (minimum weighted norm over its coefficients) so that at chosen parameters
//! its `k`-jet equals the jet of a pseudo-circle parametrisation
//! `t ↦ P(θ + ρ (t - t₀))`. Matching the `k`-jet forces
//! `f' = … = f⁽ᵏ⁾ = 0` against that circle's centre, so the contact is an
//! `A_k` by construction and the construction itself is the oracle.

use std::f64::consts::{PI, TAU};

use mss_core::curve::bounding_box;
use mss_core::minkowski::{Branch, CircleKind, MinkVec, PseudoCircle};
use mss_core::mss::{bitangency_residual, normal_intersection, MssPoint, MssTrace};
use mss_core::Config;
use mss_core::transition::{EventKind, Seed, Subtype};
use mss_core::{CurveFamily, FourierComponent, ParamCurve};
use nalgebra::{DMatrix, DVector};

pub fn fourier(constant: f64, cos: &[f64], sin: &[f64]) -> FourierComponent {
    FourierComponent::new(constant, cos.to_vec(), sin.to_vec()).expect("valid coefficients")
}

pub fn curve(x: FourierComponent, y: FourierComponent) -> CurveFamily {
    CurveFamily::new(x, y)
}

pub fn unit_circle() -> CurveFamily {
    curve(fourier(0.0, &[1.0], &[0.0]), fourier(0.0, &[0.0], &[1.0]))
}

pub fn ellipse(a: f64, b: f64) -> CurveFamily {
    curve(fourier(0.0, &[a], &[0.0]), fourier(0.0, &[0.0], &[b]))
}

/// A curve with no symmetry.
pub fn perturbed_circle() -> CurveFamily {
    curve(
        fourier(0.1, &[1.0, 0.12, 0.0], &[0.0, 0.0, 0.05]),
        fourier(-0.05, &[0.0, 0.0, -0.04], &[1.1, 0.09, 0.0]),
    )
}

/// Symmetric under `u1 ↦ -u1` with `t ↦ -t`.
pub fn mirror_curve() -> CurveFamily {
    curve(fourier(0.0, &[1.3, 0.2, 0.05], &[]), fourier(0.0, &[], &[1.0, 0.1, -0.05]))
}

/// Closed test curves used across suites.
pub fn test_curves() -> Vec<(&'static str, CurveFamily)> {
    vec![("ellipse", ellipse(2.0, 1.0)), ("perturbed_circle", perturbed_circle()), ("mirror", mirror_curve())]
}

/// A perturbation direction with no special relation to any planted event.
pub fn generic_delta() -> (FourierComponent, FourierComponent) {
    (
        fourier(0.03, &[0.05, 0.3, 0.0, 0.1], &[0.2, 0.0, 0.15]),
        fourier(-0.02, &[0.1, 0.0, -0.2], &[0.04, 0.25, 0.0, -0.1]),
    )
}

pub fn with_delta(base: &CurveFamily, delta: (FourierComponent, FourierComponent)) -> CurveFamily {
    base.clone().with_perturbation(1, delta.0, delta.1).expect("order 1")
}

/// `d^j/dt^j P(θ + ρ (t - t₀))` at `t₀` for `j = 0..=order`.
pub fn circle_jet(circle: &PseudoCircle, branch: Branch, theta: f64, rate: f64, order: usize) -> Vec<MinkVec> {
    let r = circle.radius();
    let s = branch.sign();
    let (ch, sh) = (theta.cosh(), theta.sinh());
    (0..=order)
        .map(|j| {
            let (c, h) = if j % 2 == 0 { (ch, sh) } else { (sh, ch) };
            let off = match circle.kind {
                CircleKind::H => MinkVec::new(s * r * c, r * h),
                _ => MinkVec::new(r * h, s * r * c),
            };
            if j == 0 {
                circle.center + off
            } else {
                rate.powi(j as i32) * off
            }
        })
        .collect()
}

/// Required derivatives of the corrected curve at one parameter.
#[derive(Debug, Clone)]
pub struct JetConstraint {
    pub t: f64,
    pub derivs: Vec<MinkVec>,
}

fn basis_deriv(idx: usize, t: f64, j: usize) -> f64 {
    if idx == 0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    let k = ((idx + 1) / 2) as f64;
    let phase = k * t + j as f64 * PI / 2.0;
    let v = if idx % 2 == 1 { phase.cos() } else { phase.sin() };
    k.powi(j as i32) * v
}

fn plant_component(base: &FourierComponent, rows: &[(f64, usize, f64)], harmonics: usize) -> FourierComponent {
    let m = 2 * harmonics + 1;
    let a = DMatrix::from_fn(rows.len(), m, |i, k| basis_deriv(k, rows[i].0, rows[i].1));
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|&(t, j, target)| target - base.eval(t, j)));
    // minimise Σ w_k a_k² subject to A a = b
    let w_inv = DVector::from_fn(m, |k, _| {
        let h = ((k + 1) / 2) as f64;
        1.0 / (1.0 + h * h).powi(2)
    });
    let aw = DMatrix::from_fn(rows.len(), m, |i, k| a[(i, k)] * w_inv[k]);
    let gram = &aw * a.transpose();
    let lambda = gram.lu().solve(&b).expect("independent jet constraints");
    let coef = aw.transpose() * lambda;
    let mut out = base.clone();
    out.cos.resize(harmonics.max(out.cos.len()), 0.0);
    out.sin.resize(harmonics.max(out.sin.len()), 0.0);
    out.constant += coef[0];
    for k in 1..=harmonics {
        out.cos[k - 1] += coef[2 * k - 1];
        out.sin[k - 1] += coef[2 * k];
    }
    out
}

/// Minimum-norm Fourier correction of `base` meeting every constraint.
pub fn plant(base: &CurveFamily, constraints: &[JetConstraint], harmonics: usize) -> CurveFamily {
    let mut rx = Vec::new();
    let mut ry = Vec::new();
    for c in constraints {
        for (j, d) in c.derivs.iter().enumerate() {
            rx.push((c.t, j, d.u0));
            ry.push((c.t, j, d.u1));
        }
    }
    CurveFamily::new(plant_component(&base.base_x, &rx, harmonics), plant_component(&base.base_y, &ry, harmonics))
}

/// One contact to plant against a pseudo-circle.
#[derive(Debug, Clone, Copy)]
pub struct Contact {
    pub t: f64,
    pub branch: Branch,
    pub theta: f64,
    /// `k` of the planted `A_k`.
    pub order: usize,
    /// Added to derivative `order + 1` along the radial direction, to steer
    /// the next coefficient (for instance the sign of `κ'` at an `A2`).
    pub bend: Option<f64>,
}

impl Contact {
    pub fn new(t: f64, branch: Branch, theta: f64, order: usize) -> Self {
        Self { t, branch, theta, order, bend: None }
    }

    pub fn bend(mut self, b: f64) -> Self {
        self.bend = Some(b);
        self
    }
}

/// Plants every contact against `circle`. The reparametrisation rate at each
/// contact keeps the base curve's speed and orientation.
pub fn plant_contacts(base: &CurveFamily, circle: &PseudoCircle, contacts: &[Contact], harmonics: usize) -> CurveFamily {
    let b = base.at(0.0);
    let constraints: Vec<JetConstraint> = contacts
        .iter()
        .map(|c| {
            let v = b.velocity(c.t);
            let dp = circle_jet(circle, c.branch, c.theta, 1.0, 1)[1];
            let sign = if v.u0 * dp.u0 + v.u1 * dp.u1 >= 0.0 { 1.0 } else { -1.0 };
            let rate = sign * v.euclid_norm() / dp.euclid_norm();
            let extra = usize::from(c.bend.is_some());
            let mut derivs = circle_jet(circle, c.branch, c.theta, rate, c.order + extra);
            if let Some(bend) = c.bend {
                let p = derivs[0];
                let radial = (1.0 / circle.radius()) * (p - circle.center);
                let last = derivs.len() - 1;
                derivs[last] = derivs[last] + bend * radial;
            }
            JetConstraint { t: c.t, derivs }
        })
        .collect();
    plant(base, &constraints, harmonics)
}

/// Parameter of the point of the ellipse `(a cos t, b sin t)` in the
/// direction of `p`.
pub fn ellipse_angle(a: f64, b: f64, p: MinkVec) -> f64 {
    (p.u1 / b).atan2(p.u0 / a).rem_euclid(TAU)
}

/// A family with an exact event at `u = 0`.
#[derive(Debug, Clone)]
pub struct PlantedEvent {
    pub name: String,
    pub family: CurveFamily,
    /// The exact configuration at `u = 0`.
    pub seed: Seed,
    pub circle: PseudoCircle,
    /// Subtype the Minkowski column of the classification table assigns.
    pub expected: Subtype,
}

impl PlantedEvent {
    pub fn label(&self) -> String {
        label(self.seed.kind, self.expected)
    }
}

pub fn label(kind: EventKind, subtype: Subtype) -> String {
    match subtype {
        Subtype::Single => kind.as_str().to_string(),
        s => format!("{}({})", kind.as_str(), s.as_str()),
    }
}

fn swap_xy(v: MinkVec) -> MinkVec {
    MinkVec::new(v.u1, v.u0)
}

/// Mirror of a whole construction in the line `u0 = u1`. This exchanges the
/// roles of `H` and `S` circles.
fn swapped(ev: &PlantedEvent, harmonics: usize, base: &CurveFamily, contacts: &[Contact]) -> PlantedEvent {
    let circle = PseudoCircle {
        kind: match ev.circle.kind {
            CircleKind::H => CircleKind::S,
            CircleKind::S => CircleKind::H,
            k => k,
        },
        center: swap_xy(ev.circle.center),
        r2: -ev.circle.r2,
    };
    let base = CurveFamily::new(base.base_y.clone(), base.base_x.clone());
    build(&format!("{}_swapped", ev.name), ev.seed.kind, ev.expected, &base, circle, contacts, harmonics)
}

fn build(
    name: &str,
    kind: EventKind,
    expected: Subtype,
    base: &CurveFamily,
    circle: PseudoCircle,
    contacts: &[Contact],
    harmonics: usize,
) -> PlantedEvent {
    let planted = plant_contacts(base, &circle, contacts, harmonics);
    let family = with_delta(&planted, generic_delta());
    let mut order: Vec<&Contact> = contacts.iter().collect();
    // solver role order: highest contact order first
    order.sort_by(|a, b| b.order.cmp(&a.order));
    let seed = Seed { kind, t_params: order.iter().map(|c| c.t).collect(), center: circle.center, u: 0.0 };
    PlantedEvent { name: name.to_string(), family, seed, circle, expected }
}

fn on_ellipse(a: f64, b: f64, circle: &PseudoCircle, branch: Branch, theta: f64, order: usize) -> Contact {
    let p = circle.point(branch, theta).expect("non-lightcone circle");
    Contact::new(ellipse_angle(a, b, p), branch, theta, order)
}

/// The exact `A4`: the ellipse `(2 cos t, sin t)` corrected to have
/// five-point contact with its osculating circle at `t = 0`.
pub fn a4_event() -> PlantedEvent {
    let circle = PseudoCircle::h(MinkVec::new(2.5, 0.0), 0.5);
    // the ellipse is symmetric in t, so without a bend f⁽⁵⁾ would vanish too
    let contacts = [Contact::new(0.0, Branch::Minus, 0.0, 4).bend(30.0)];
    build("a4", EventKind::A4, Subtype::Single, &ellipse(2.0, 1.0), circle, &contacts, 6)
}

/// Two `A2` contacts on `H((0,0), 1)`, one per branch. The second sits at
/// `θ = 0.5` so the two normal lines are not collinear and the caustic
/// pieces cross transversally. `bends` steer the signs of `κ'`.
pub fn a22_event(bends: (f64, f64), expected: Subtype) -> PlantedEvent {
    let circle = PseudoCircle::h(MinkVec::ZERO, 1.0);
    let (a, b) = (1.2, 1.0);
    let contacts = [
        on_ellipse(a, b, &circle, Branch::Plus, -0.35, 2).bend(bends.0),
        on_ellipse(a, b, &circle, Branch::Minus, 0.5, 2).bend(bends.1),
    ];
    build("a22", EventKind::A22, expected, &ellipse(a, b), circle, &contacts, 8)
}

/// Four `A1` contacts on `H((0,0), 1)` at the given `(branch, θ)`.
pub fn a14_event(name: &str, placement: &[(Branch, f64); 4], a: f64, b: f64) -> PlantedEvent {
    let circle = PseudoCircle::h(MinkVec::ZERO, 1.0);
    let contacts: Vec<Contact> = placement.iter().map(|&(br, th)| on_ellipse(a, b, &circle, br, th, 1)).collect();
    let plus = placement.iter().filter(|p| p.0 == Branch::Plus).count();
    let expected = if plus % 2 == 1 { Subtype::A } else { Subtype::B };
    build(name, EventKind::A14, expected, &ellipse(a, b), circle, &contacts, 8)
}

pub fn a12a2_event(name: &str, a2: (Branch, f64), a1: [(Branch, f64); 2]) -> PlantedEvent {
    let circle = PseudoCircle::h(MinkVec::ZERO, 1.0);
    let (a, b) = (1.2, 1.0);
    let mut contacts = vec![on_ellipse(a, b, &circle, a2.0, a2.1, 2).bend(0.7)];
    contacts.extend(a1.iter().map(|&(br, th)| on_ellipse(a, b, &circle, br, th, 1)));
    let expected = if a1[0].0 == a1[1].0 { Subtype::A } else { Subtype::B };
    build(name, EventKind::A12A2, expected, &ellipse(a, b), circle, &contacts, 8)
}

pub fn a1a3_event(name: &str, a3: (Branch, f64), a1: (Branch, f64)) -> PlantedEvent {
    let circle = PseudoCircle::h(MinkVec::ZERO, 1.0);
    let (a, b) = (1.2, 1.0);
    let contacts = [on_ellipse(a, b, &circle, a3.0, a3.1, 3).bend(0.7), on_ellipse(a, b, &circle, a1.0, a1.1, 1)];
    let expected = if a3.0 != a1.0 { Subtype::A } else { Subtype::B };
    build(name, EventKind::A1A3, expected, &ellipse(a, b), circle, &contacts, 8)
}

/// One planted event for each row of the classification table (both `H`
/// and, by the coordinate swap, `S` circles). The `A2_2` rows are separate
/// because their subtype depends on measured `κ'` signs, see
/// [`a22_pair`].
pub fn table_events() -> Vec<PlantedEvent> {
    use Branch::*;
    let mut out = Vec::new();
    let mut push = |ev: PlantedEvent, base: CurveFamily, contacts: Vec<Contact>, harmonics: usize| {
        let s = swapped(&ev, harmonics, &base, &contacts);
        out.push(ev);
        out.push(s);
    };
    let rows: [(&str, [(Branch, f64); 4], f64, f64); 3] = [
        ("a14_3_1", [(Plus, -0.8), (Plus, 0.0), (Plus, 0.8), (Minus, 0.0)], 1.3, 1.0),
        ("a14_2_2", [(Plus, -0.6), (Plus, 0.6), (Minus, 0.6), (Minus, -0.6)], 1.3, 0.8),
        ("a14_4_0", [(Plus, -1.1), (Plus, -0.35), (Plus, 0.35), (Plus, 1.1)], 1.4, 1.4),
    ];
    for (name, placement, a, b) in rows {
        let ev = a14_event(name, &placement, a, b);
        let circle = ev.circle;
        let contacts = placement.iter().map(|&(br, th)| on_ellipse(a, b, &circle, br, th, 1)).collect();
        push(ev, ellipse(a, b), contacts, 8);
    }
    let circle = PseudoCircle::h(MinkVec::ZERO, 1.0);
    let (a, b) = (1.2, 1.0);
    for (name, a2, a1) in [
        ("a12a2_same", (Plus, 0.0), [(Minus, 0.7), (Minus, -0.7)]),
        ("a12a2_opposite", (Plus, 0.0), [(Plus, 0.9), (Minus, -0.5)]),
    ] {
        let ev = a12a2_event(name, a2, a1);
        let mut contacts = vec![on_ellipse(a, b, &circle, a2.0, a2.1, 2).bend(0.7)];
        contacts.extend(a1.iter().map(|&(br, th)| on_ellipse(a, b, &circle, br, th, 1)));
        push(ev, ellipse(a, b), contacts, 8);
    }
    for (name, a3, a1) in [("a1a3_opposite", (Plus, 0.0), (Minus, 0.3)), ("a1a3_same", (Plus, 0.0), (Plus, 1.0))] {
        let ev = a1a3_event(name, a3, a1);
        let contacts = vec![on_ellipse(a, b, &circle, a3.0, a3.1, 3).bend(0.7), on_ellipse(a, b, &circle, a1.0, a1.1, 1)];
        push(ev, ellipse(a, b), contacts, 8);
    }
    let a4 = a4_event();
    out.push(a4);
    out
}

/// `A2_2` constructions whose measured `κ'` signs are `(+,+)` and `(+,-)`.
/// Flipping a bend flips the sign of `κ'` at that contact; the signs are
/// measured with [`fd_kappa_prime`] rather than assumed.
pub fn a22_pair() -> [(PlantedEvent, (f64, f64)); 2] {
    let ks = |e: &PlantedEvent| {
        let c = e.family.at(0.0);
        let t = &e.seed.t_params;
        (fd_kappa_prime(&c, t[0]), fd_kappa_prime(&c, t[1]))
    };
    let k = ks(&a22_event((1.0, 1.0), Subtype::A));
    let (s1, s2) = (k.0.signum(), k.1.signum());
    // unequal magnitudes keep κ₁' + κ₂' away from zero
    let same = a22_event((2.0 * s1, s2), Subtype::A);
    let mixed = a22_event((2.0 * s1, -s2), Subtype::B);
    let (ka, kb) = (ks(&same), ks(&mixed));
    [(same, ka), (mixed, kb)]
}

/// Central difference of `f` at `t`.
pub fn fd(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (f(t + h) - f(t - h)) / (2.0 * h)
}

/// Five-point stencil first derivative.
pub fn fd5(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h)
}

/// `κ` from finite-difference derivatives of the curve points alone.
pub fn fd_kappa<C: ParamCurve>(curve: &C, t: f64) -> f64 {
    let h = 1e-3;
    let d1 = MinkVec::new(fd5(|s| curve.point(s).u0, t, h), fd5(|s| curve.point(s).u1, t, h));
    let p = |s: f64| curve.point(s);
    let d2 = (1.0 / (h * h)) * (p(t + h) - 2.0 * p(t) + p(t - h));
    let q = d1.dot(d1);
    d1.dot(d2.perp()) / q.abs().powf(1.5)
}

/// `dκ/ds` by differencing [`fd_kappa`] along arclength.
pub fn fd_kappa_prime<C: ParamCurve>(curve: &C, t: f64) -> f64 {
    let h = 1e-3;
    let v = curve.velocity(t);
    fd(|s| fd_kappa(curve, s), t, h) / v.dot(v).abs().sqrt()
}

/// Symmetric torus distance between parameter pairs, identifying
/// `(t1, t2)` with `(t2, t1)`.
pub fn pair_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let cd = |x: f64, y: f64| {
        let d = (x - y).rem_euclid(TAU);
        d.min(TAU - d)
    };
    let direct = cd(a.0, b.0).hypot(cd(a.1, b.1));
    let swapped = cd(a.0, b.1).hypot(cd(a.1, b.0));
    direct.min(swapped)
}

/// Directed Hausdorff distance `sup_a inf_b`.
pub fn directed_hausdorff(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    a.iter()
        .map(|&p| b.iter().map(|&q| pair_distance(p, q)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

pub fn hausdorff(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

/// Brute-force zero set of the bitangency residual: every node of an
/// `n × n` grid with `t1 < t2` where `g` vanishes to roundoff, and every
/// sign change of `g` between adjacent nodes, located by linear
/// interpolation. Poles are dropped when `g` at the interpolated point is
/// not clearly smaller than at the larger node; pairs within `band` of the
/// diagonal are skipped.
pub fn dense_oracle<C: ParamCurve>(curve: &C, n: usize, band: f64) -> Vec<(f64, f64)> {
    let h = TAU / n as f64;
    let pts: Vec<MinkVec> = (0..n).map(|k| curve.point(k as f64 * h)).collect();
    let vel: Vec<MinkVec> = (0..n).map(|k| curve.velocity(k as f64 * h)).collect();
    let s = scale(curve);
    let zero = 1e-12 * s * s;
    let g = |a: usize, b: usize| -> Option<f64> {
        let (a, b) = (a % n, b % n);
        let c = normal_intersection(pts[a], vel[a], pts[b], vel[b])?;
        let (e1, e2) = (pts[a] - c, pts[b] - c);
        Some(e1.dot(e1) - e2.dot(e2))
    };
    let near_diag = |t1: f64, t2: f64| {
        let d = (t1 - t2).rem_euclid(TAU);
        d.min(TAU - d) <= band
    };
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let Some(g0) = g(i, j) else { continue };
            if g0.abs() <= zero {
                let (t1, t2) = (i as f64 * h, j as f64 * h);
                if !near_diag(t1, t2) {
                    out.push((t1, t2));
                }
                continue;
            }
            for (di, dj) in [(1usize, 0usize), (0, 1)] {
                let Some(g1) = g(i + di, j + dj) else { continue };
                if g0 * g1 >= 0.0 || g1.abs() <= zero {
                    continue;
                }
                let lam = g0 / (g0 - g1);
                let t1 = (i as f64 + lam * di as f64) * h;
                let t2 = (j as f64 + lam * dj as f64) * h;
                if near_diag(t1, t2) {
                    continue;
                }
                let Ok(gm) = bitangency_residual(curve, t1, t2) else { continue };
                if gm.abs() < 0.5 * g0.abs().max(g1.abs()) {
                    out.push((t1.rem_euclid(TAU), t2.rem_euclid(TAU)));
                }
            }
        }
    }
    out
}

/// Euclidean size used to scale tolerances: half the bounding-box diagonal.
pub fn scale<C: ParamCurve>(curve: &C) -> f64 {
    let (lo, hi) = bounding_box(curve, 1024);
    0.5 * (hi - lo).euclid_norm()
}

/// Hausdorff distance, in `(t1, t2)`, between a trace and the dense oracle
/// on an `oracle_n` grid. Both sides drop points inside the trace's masked
/// cells; the oracle skips the trace's diagonal band.
pub fn trace_vs_oracle<C: ParamCurve>(curve: &C, trace: &MssTrace, oracle_n: usize) -> f64 {
    let n = trace.grid_n;
    let h = TAU / n as f64;
    let masked: std::collections::BTreeSet<(usize, usize)> = trace.masked.iter().map(|m| (m.0, m.1)).collect();
    let in_mask = |p: &(f64, f64)| {
        let (a, b) = if p.0 <= p.1 { *p } else { (p.1, p.0) };
        masked.contains(&((a / h) as usize % n, (b / h) as usize % n))
    };
    let oracle: Vec<(f64, f64)> =
        dense_oracle(curve, oracle_n, Config::diagonal_band(n)).into_iter().filter(|p| !in_mask(p)).collect();
    let traced: Vec<(f64, f64)> = trace.points().map(|p| (p.t1, p.t2)).filter(|p| !in_mask(p)).collect();
    hausdorff(&traced, &oracle)
}

/// `max(|f'(t1)|, |f'(t2)|, |f(t1) - f(t2)|)` for a traced point, from curve
/// points and velocities only.
pub fn point_residual<C: ParamCurve>(curve: &C, p: &MssPoint) -> f64 {
    let e1 = curve.point(p.t1) - p.center;
    let e2 = curve.point(p.t2) - p.center;
    let d1 = 2.0 * curve.velocity(p.t1).dot(e1);
    let d2 = 2.0 * curve.velocity(p.t2).dot(e2);
    d1.abs().max(d2.abs()).max((e1.dot(e1) - e2.dot(e2)).abs())
}
