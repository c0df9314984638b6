//! Transition events of the symmetry set in 1-parameter families: location
//! by augmented Newton systems, and classification of the subtype.
//!
//! Each event kind is the zero set of a square system in the contact
//! parameters `t_i`, the centre `c` and the family parameter `u`, built from
//! the `t`-derivatives of `f(t, c) = <γ(t, u) - c, γ(t, u) - c>`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::config::Config;
use crate::contact::{caustic_from_jet, center_gradient, derivs_from_jet, dist_sq, dist_sq_derivs, family_derivative, order_from_jet};
use crate::curve::{curvature_arclength_derivative_with, curvature_numerator, curve_scale, CurveFamily, ParamCurve};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math::{circ_diff, wrap_angle, TAU};
use crate::minkowski::{Branch, CausalType, CircleKind, MinkVec, PseudoCircle};
use crate::mss::{normal_center, tangencies_interp, trace_zero_set, Samples};
use crate::newton::{self, NewtonSolution, NonlinearSystem};

/// Accepted residual of a converged event, times `scale²`.
pub const EVENT_RESIDUAL: f64 = 1e-8;

/// `|κ'|` and `|κ₁' + κ₂'|` at or below this make an `A2_2` event non-generic.
pub const KAPPA_PRIME_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    /// Four-fold tangency.
    A14,
    /// Two `A2` contacts on one pseudo-circle.
    A22,
    /// One `A2` and two `A1` contacts.
    A12A2,
    /// One `A3` and one `A1` contact.
    A1A3,
    /// A single `A4` contact.
    A4,
}

impl EventKind {
    pub const ALL: [EventKind; 5] = [EventKind::A14, EventKind::A22, EventKind::A12A2, EventKind::A1A3, EventKind::A4];

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::A14 => "A1_4",
            EventKind::A22 => "A2_2",
            EventKind::A12A2 => "A1_2A2",
            EventKind::A1A3 => "A1A3",
            EventKind::A4 => "A4",
        }
    }

    /// Number of contact parameters.
    pub fn contacts(self) -> usize {
        match self {
            EventKind::A14 => 4,
            EventKind::A22 | EventKind::A1A3 => 2,
            EventKind::A12A2 => 3,
            EventKind::A4 => 1,
        }
    }

    fn equations(self) -> Vec<Equation> {
        use Equation::*;
        match self {
            EventKind::A14 => vec![D(0, 1), D(1, 1), D(2, 1), D(3, 1), Diff(0, 3), Diff(1, 3), Diff(2, 3)],
            EventKind::A22 => vec![D(0, 1), D(0, 2), D(1, 1), D(1, 2), Diff(0, 1)],
            EventKind::A12A2 => vec![D(0, 1), D(0, 2), D(1, 1), D(2, 1), Diff(0, 1), Diff(0, 2)],
            EventKind::A1A3 => vec![D(0, 1), D(0, 2), D(0, 3), D(1, 1), Diff(0, 1)],
            EventKind::A4 => vec![D(0, 1), D(0, 2), D(0, 3), D(0, 4)],
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subtype {
    A,
    B,
    Single,
}

impl Subtype {
    pub fn as_str(self) -> &'static str {
        match self {
            Subtype::A => "a",
            Subtype::B => "b",
            Subtype::Single => "single",
        }
    }
}

impl fmt::Display for Subtype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Starting point for [`solve_event`]. For `A1_2A2` and `A1A3` the first
/// parameter is the contact of higher order.
#[derive(Debug, Clone, PartialEq)]
pub struct Seed {
    pub kind: EventKind,
    pub t_params: Vec<f64>,
    pub center: MinkVec,
    pub u: f64,
}

/// Point-in-triangle diagnostic for four concyclic contacts, with
/// `q1 = γ2 - γ3`, `q2 = γ3 - γ4`, `q3 = γ4 - γ1`, `q4 = γ1 - γ2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleTest {
    /// Whether each point lies inside the triangle of the other three.
    pub inside: [bool; 4],
    /// `det(q1,q2), det(q2,q3), det(q3,q4), det(q4,q1)`.
    pub dets: [f64; 4],
}

impl TriangleTest {
    /// Containment means a `3 + 1` split, hence type (a).
    pub fn predicts(&self) -> Subtype {
        if self.inside.iter().any(|&b| b) {
            Subtype::A
        } else {
            Subtype::B
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClassificationEvidence {
    /// Contacts on the `(Plus, Minus)` branches.
    pub branch_counts: Option<(usize, usize)>,
    pub kappa_primes: Option<(f64, f64)>,
    /// `<T1, Ti>` with `T1` the tangent at the distinguished contact.
    pub tangent_dots: Option<Vec<f64>>,
    pub triangle_test: Option<TriangleTest>,
    /// `<T1,T1> (<T1,T1> - <T1,T2>)` for `A1A3`; positive for (a).
    pub a1a3_sign: Option<f64>,
    /// Whether the tangent products sit on the side of `±1` predicted by the
    /// branch placement.
    pub threshold_consistent: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EventFlags {
    /// The A1_4 parity rule and triangle diagnostic disagree.
    pub criterion_conflict: bool,
    /// A contact is at or next to a lightlike point.
    pub near_lightlike: bool,
    /// Why no subtype could be assigned.
    pub unclassified: Option<Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionEvent {
    pub kind: EventKind,
    pub subtype: Option<Subtype>,
    pub u_star: f64,
    /// Ascending.
    pub t_params: Vec<f64>,
    /// Index into `t_params` of the contact of highest order.
    pub distinguished: usize,
    pub contact_orders: Vec<Option<usize>>,
    pub branches: Vec<Option<Branch>>,
    pub center: MinkVec,
    pub f_value: f64,
    pub circle: PseudoCircle,
    pub evidence: ClassificationEvidence,
    /// Max-norm of the defining system, recomputed from scratch.
    pub residual: f64,
    pub scale: f64,
    pub flags: EventFlags,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Equation {
    /// `f⁽ʲ⁾(t_i) = 0`.
    D(usize, usize),
    /// `f(t_i) - f(t_k) = 0`.
    Diff(usize, usize),
}

/// Defining system in `x = [t.., c0, c1, u]`, or `[t.., c0, c1]` when `u` is
/// held fixed.
struct EventSystem<'f> {
    family: &'f CurveFamily,
    nt: usize,
    eqs: Vec<Equation>,
    fixed_u: Option<f64>,
}

impl EventSystem<'_> {
    fn unknowns(&self) -> usize {
        self.nt + 2 + usize::from(self.fixed_u.is_none())
    }
}

impl NonlinearSystem for EventSystem<'_> {
    fn dim(&self) -> usize {
        debug_assert_eq!(self.eqs.len(), self.unknowns());
        self.eqs.len()
    }

    fn eval(&self, x: &[f64], f: &mut [f64], jac: Option<&mut Matrix>) {
        let nt = self.nt;
        let c = MinkVec::new(x[nt], x[nt + 1]);
        let u = self.fixed_u.unwrap_or_else(|| x[nt + 2]);
        let curve = self.family.at(u);
        let jets: Vec<_> = x[..nt].iter().map(|&t| curve.jet(t)).collect();
        let dds: Vec<_> = jets.iter().map(|j| derivs_from_jet(j, c)).collect();
        for (row, eq) in self.eqs.iter().enumerate() {
            f[row] = match *eq {
                Equation::D(i, j) => dds[i].order(j),
                Equation::Diff(i, k) => dds[i].f - dds[k].f,
            };
        }
        let Some(jac) = jac else { return };
        jac.data.iter_mut().for_each(|v| *v = 0.0);
        let free_u = self.fixed_u.is_none();
        let ujets: Vec<_> = if free_u { x[..nt].iter().map(|&t| self.family.u_jet(t, u)).collect() } else { Vec::new() };
        for (row, eq) in self.eqs.iter().enumerate() {
            match *eq {
                Equation::D(i, j) => {
                    jac[(row, i)] = dds[i].order(j + 1);
                    let g = center_gradient(&jets[i], c, j);
                    jac[(row, nt)] = g.u0;
                    jac[(row, nt + 1)] = g.u1;
                    if free_u {
                        jac[(row, nt + 2)] = family_derivative(&jets[i], &ujets[i], c, j);
                    }
                }
                Equation::Diff(i, k) => {
                    jac[(row, i)] += dds[i].d[0];
                    jac[(row, k)] -= dds[k].d[0];
                    let g = center_gradient(&jets[i], c, 0) - center_gradient(&jets[k], c, 0);
                    jac[(row, nt)] = g.u0;
                    jac[(row, nt + 1)] = g.u1;
                    if free_u {
                        jac[(row, nt + 2)] =
                            family_derivative(&jets[i], &ujets[i], c, 0) - family_derivative(&jets[k], &ujets[k], c, 0);
                    }
                }
            }
        }
    }
}

fn run_system(
    family: &CurveFamily,
    eqs: Vec<Equation>,
    t: &[f64],
    c: MinkVec,
    u: f64,
    fixed_u: bool,
    tol: f64,
    cfg: &Config,
) -> Result<NewtonSolution> {
    let sys = EventSystem { family, nt: t.len(), eqs, fixed_u: fixed_u.then_some(u) };
    let mut x0 = t.to_vec();
    x0.extend([c.u0, c.u1]);
    if !fixed_u {
        x0.push(u);
    }
    newton::solve(&sys, &x0, tol, &cfg.newton)
}

/// Max-norm of the defining equations of `kind`, evaluated directly from the
/// distance-squared derivatives. `t` is in the seed's role order.
pub fn defining_residual<C: ParamCurve>(curve: &C, kind: EventKind, t: &[f64], c: MinkVec) -> f64 {
    let dds: Vec<_> = t.iter().map(|&ti| dist_sq_derivs(curve, ti, c)).collect();
    kind.equations()
        .iter()
        .map(|eq| match *eq {
            Equation::D(i, j) => libm::fabs(dds[i].order(j)),
            Equation::Diff(i, k) => libm::fabs(dds[i].f - dds[k].f),
        })
        .fold(0.0, f64::max)
}

/// Locates an event of `seed.kind` by damped Newton from `seed` and
/// classifies it.
pub fn solve_event(family: &CurveFamily, seed: &Seed, cfg: &Config) -> Result<TransitionEvent> {
    let kind = seed.kind;
    if seed.t_params.len() != kind.contacts() {
        return Err(Error::InvalidArgument { what: "seed has the wrong number of contact parameters" });
    }
    let scale = curve_scale(&family.at(seed.u), 1024);
    let tol = cfg.solver_tol * scale * scale;
    let sol = run_system(family, kind.equations(), &seed.t_params, seed.center, seed.u, false, tol, cfg)?;
    let nt = kind.contacts();
    let u = sol.x[nt + 2];
    let center = MinkVec::new(sol.x[nt], sol.x[nt + 1]);
    let t: Vec<f64> = sol.x[..nt].iter().map(|&v| wrap_angle(v)).collect();
    if !u.is_finite() || !center.is_finite() {
        return Err(Error::NoConvergence { iterations: sol.iterations, residual: f64::INFINITY });
    }
    let band = Config::diagonal_band(cfg.grid_n);
    for i in 0..nt {
        for k in i + 1..nt {
            if libm::fabs(circ_diff(t[i], t[k])) <= band {
                return Err(Error::NonGeneric { what: "contacts merged" });
            }
        }
    }
    let curve = family.at(u);
    let scale = curve_scale(&curve, 1024);
    let residual = defining_residual(&curve, kind, &t, center);
    if !(residual <= EVENT_RESIDUAL * scale * scale) {
        return Err(Error::NoConvergence { iterations: sol.iterations, residual });
    }
    Ok(build_event(&curve, kind, &t, center, u, residual, scale, cfg))
}

fn build_event<C: ParamCurve>(
    curve: &C,
    kind: EventKind,
    t: &[f64],
    center: MinkVec,
    u: f64,
    residual: f64,
    scale: f64,
    cfg: &Config,
) -> TransitionEvent {
    let mut ts = t.to_vec();
    ts.sort_by(f64::total_cmp);
    let orders: Vec<Option<usize>> =
        ts.iter().map(|&ti| order_from_jet(&curve.jet(ti), center, cfg.contact_tolerance()).ok().flatten()).collect();
    // highest order wins; the solver's first parameter breaks ties
    let role0 = ts.iter().position(|&v| v == t[0]).unwrap_or(0);
    let best = orders.iter().map(|o| o.unwrap_or(0)).max().unwrap_or(0);
    let distinguished = if orders[role0].unwrap_or(0) == best {
        role0
    } else {
        orders.iter().position(|o| o.unwrap_or(0) == best).unwrap_or(role0)
    };
    let f_value = dist_sq(curve, ts[distinguished], center);
    let e = curve.point(ts[distinguished]) - center;
    let circle = PseudoCircle::from_r2(center, f_value, e.euclid_norm2().max(scale * scale * 1e-6), cfg.eps_light);
    let near_lightlike = ts.iter().any(|&ti| crate::curve::point_data(curve, ti, cfg.eps_light).causal == CausalType::Lightlike);
    let branches: Vec<Option<Branch>> = ts
        .iter()
        .map(|&ti| if circle.kind == CircleKind::LC { None } else { circle.side_of(curve.point(ti)).ok() })
        .collect();
    let mut ev = TransitionEvent {
        kind,
        subtype: None,
        u_star: u,
        t_params: ts,
        distinguished,
        contact_orders: orders,
        branches,
        center,
        f_value,
        circle,
        evidence: ClassificationEvidence::default(),
        residual,
        scale,
        flags: EventFlags { near_lightlike, ..EventFlags::default() },
    };
    classify_event(curve, &mut ev, cfg);
    ev
}

/// Parity rule: an odd number of contacts on each branch is (a).
pub fn classify_a14(branch_counts: (usize, usize)) -> Subtype {
    if branch_counts.0 % 2 == 1 {
        Subtype::A
    } else {
        Subtype::B
    }
}

/// Moth (a) when `κ₁'κ₂' > 0`, nib (b) when negative.
pub fn classify_a22(kappa1: f64, kappa2: f64, tol: f64) -> Result<Subtype> {
    if !(libm::fabs(kappa1) > tol && libm::fabs(kappa2) > tol && libm::fabs(kappa1 + kappa2) > tol) {
        return Err(Error::NonGeneric { what: "A2_2 needs nonzero kappa' with nonzero sum" });
    }
    Ok(if kappa1 * kappa2 > 0.0 { Subtype::A } else { Subtype::B })
}

/// (a) when the two `A1` contacts share a branch.
pub fn classify_a12a2(a1: Branch, a1_other: Branch) -> Subtype {
    if a1 == a1_other {
        Subtype::A
    } else {
        Subtype::B
    }
}

/// (a) when the `A3` and `A1` contacts are on opposite branches.
pub fn classify_a1a3(a3: Branch, a1: Branch) -> Subtype {
    if a3 != a1 {
        Subtype::A
    } else {
        Subtype::B
    }
}

pub fn classify_a4() -> Subtype {
    Subtype::Single
}

/// `<T1, T2>` for the unit tangents of `circle` at `p1`, `p2`.
pub fn tangent_dot(circle: &PseudoCircle, p1: MinkVec, p2: MinkVec) -> Result<f64> {
    Ok(circle.unit_tangent(p1)?.dot(circle.unit_tangent(p2)?))
}

/// Whether `<T1, T2>` places the two points on the same branch:
/// `<T1,T1> <T1,T2> >= 1` for one branch, `<= -1` across.
pub fn same_branch_from_dot(t1_sq: f64, dot: f64) -> bool {
    t1_sq * dot > 0.0
}

fn in_triangle(p: MinkVec, a: MinkVec, b: MinkVec, c: MinkVec) -> bool {
    let d1 = (b - a).det(p - a);
    let d2 = (c - b).det(p - b);
    let d3 = (a - c).det(p - c);
    (d1 > 0.0 && d2 > 0.0 && d3 > 0.0) || (d1 < 0.0 && d2 < 0.0 && d3 < 0.0)
}

pub fn triangle_test(p: [MinkVec; 4]) -> TriangleTest {
    let q = [p[1] - p[2], p[2] - p[3], p[3] - p[0], p[0] - p[1]];
    let dets = [q[0].det(q[1]), q[1].det(q[2]), q[2].det(q[3]), q[3].det(q[0])];
    let mut inside = [false; 4];
    for i in 0..4 {
        let o: Vec<MinkVec> = (0..4).filter(|&k| k != i).map(|k| p[k]).collect();
        inside[i] = in_triangle(p[i], o[0], o[1], o[2]);
    }
    TriangleTest { inside, dets }
}

/// Fills `subtype`, `evidence` and flags of `ev` from the curve at `u_star`.
pub fn classify_event<C: ParamCurve>(curve: &C, ev: &mut TransitionEvent, cfg: &Config) {
    let pts: Vec<MinkVec> = ev.t_params.iter().map(|&t| curve.point(t)).collect();
    let lc = ev.circle.kind == CircleKind::LC;
    let d = ev.distinguished;
    let result: Result<Subtype> = match ev.kind {
        EventKind::A4 => Ok(classify_a4()),
        _ if lc && ev.kind != EventKind::A22 => Err(Error::LightconeCircle),
        EventKind::A14 => {
            let plus = ev.branches.iter().filter(|b| **b == Some(Branch::Plus)).count();
            let minus = ev.branches.iter().filter(|b| **b == Some(Branch::Minus)).count();
            let counts = (plus, minus);
            let tri = triangle_test([pts[0], pts[1], pts[2], pts[3]]);
            let sub = classify_a14(counts);
            ev.flags.criterion_conflict = tri.predicts() != sub;
            ev.evidence.branch_counts = Some(counts);
            ev.evidence.triangle_test = Some(tri);
            Ok(sub)
        }
        EventKind::A22 => {
            let kp: Result<Vec<f64>> = ev
                .t_params
                .iter()
                .map(|&t| curvature_arclength_derivative_with(curve, t, cfg.eps_light))
                .collect();
            kp.and_then(|kp| {
                ev.evidence.kappa_primes = Some((kp[0], kp[1]));
                classify_a22(kp[0], kp[1], KAPPA_PRIME_TOL)
            })
        }
        EventKind::A12A2 | EventKind::A1A3 => {
            let t1 = ev.circle.unit_tangent(pts[d]);
            let dots: Result<Vec<f64>> =
                (0..pts.len()).filter(|&i| i != d).map(|i| tangent_dot(&ev.circle, pts[d], pts[i])).collect();
            match (t1, dots) {
                (Ok(t1), Ok(dots)) => {
                    let t1_sq = t1.dot(t1);
                    let others: Vec<usize> = (0..pts.len()).filter(|&i| i != d).collect();
                    let consistent = others
                        .iter()
                        .zip(&dots)
                        .all(|(&i, &dot)| same_branch_from_dot(t1_sq, dot) == (ev.branches[i] == ev.branches[d]) && libm::fabs(dot) >= 1.0 - 1e-9);
                    ev.evidence.threshold_consistent = Some(consistent);
                    let sub = if ev.kind == EventKind::A12A2 {
                        let (a, b) = (ev.branches[others[0]], ev.branches[others[1]]);
                        match (a, b) {
                            (Some(a), Some(b)) => Ok(classify_a12a2(a, b)),
                            _ => Err(Error::LightconeCircle),
                        }
                    } else {
                        ev.evidence.a1a3_sign = Some(t1_sq * (t1_sq - dots[0]));
                        match (ev.branches[d], ev.branches[others[0]]) {
                            (Some(a), Some(b)) => Ok(classify_a1a3(a, b)),
                            _ => Err(Error::LightconeCircle),
                        }
                    };
                    ev.evidence.tangent_dots = Some(dots);
                    sub
                }
                (Err(e), _) | (_, Err(e)) => Err(e),
            }
        }
    };
    match result {
        Ok(s) => ev.subtype = Some(s),
        Err(e) => {
            ev.subtype = None;
            ev.flags.unclassified = Some(e);
        }
    }
}

/// A seed that did not produce an event.
#[derive(Debug, Clone, PartialEq)]
pub struct FailedSeed {
    pub seed: Seed,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    /// Sorted by `(u_star, kind, t_params)`.
    pub events: Vec<TransitionEvent>,
    pub u_grid: Vec<f64>,
    pub seeds_tried: usize,
    pub failed: Vec<FailedSeed>,
}

/// An indicator value attached to a configuration; sign changes between
/// matched features at consecutive `u` seed the solver.
#[derive(Debug, Clone)]
struct Feature {
    key: Vec<f64>,
    value: f64,
    seed: Seed,
}

#[derive(Debug, Clone, Default)]
struct Snapshot {
    u: f64,
    scale: f64,
    vertices: Vec<(f64, MinkVec)>,
    features: Vec<Feature>,
}

fn key_dist(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| libm::fabs(circ_diff(*x, *y))).fold(0.0, f64::max)
}

/// Greedy nearest matching of keys within `radius`.
fn greedy_match(a: &[&[f64]], b: &[&[f64]], radius: f64) -> Vec<(usize, usize)> {
    let mut cand = Vec::new();
    for (i, ka) in a.iter().enumerate() {
        for (j, kb) in b.iter().enumerate() {
            let d = key_dist(ka, kb);
            if d <= radius {
                cand.push((d, i, j));
            }
        }
    }
    cand.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut out = Vec::new();
    for (_, i, j) in cand {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            out.push((i, j));
        }
    }
    out
}

/// Linear interpolation between two seeds of the same kind, pairing contact
/// parameters in role order.
fn interpolate(a: &Seed, b: &Seed, lam: f64) -> Seed {
    let t = a
        .t_params
        .iter()
        .zip(&b.t_params)
        .map(|(&x, &y)| wrap_angle(x + lam * circ_diff(y, x)))
        .collect();
    Seed { kind: a.kind, t_params: t, center: a.center + lam * (b.center - a.center), u: a.u + lam * (b.u - a.u) }
}

/// Parameter exclusion around known contacts when enumerating further
/// tangencies.
fn exclusion(n: usize) -> f64 {
    3.0 * TAU / n as f64
}

struct Sampled<'f> {
    curve: crate::curve::FamilySlice<'f>,
    samples: Samples,
    caustic: Vec<Option<MinkVec>>,
    dsign: Vec<bool>,
    scale: f64,
    tol: f64,
}

impl<'f> Sampled<'f> {
    fn new(family: &'f CurveFamily, u: f64, n: usize, cfg: &Config) -> Self {
        let curve = family.at(u);
        let samples = Samples::new(&curve, n);
        let scale = curve_scale(&curve, 1024);
        let (lo, hi) = crate::curve::bounding_box(&curve, 256);
        let mid = 0.5 * (lo + hi);
        let mut caustic = Vec::with_capacity(n);
        let mut dsign = Vec::with_capacity(n);
        for k in 0..n {
            let jet = curve.jet(samples.t(k));
            dsign.push(curvature_numerator(jet[1], jet[2]) > 0.0);
            caustic.push(caustic_from_jet(&jet, 0.0).ok().filter(|c| (*c - mid).euclid_norm() < 20.0 * scale));
        }
        Self { curve, samples, caustic, dsign, scale, tol: cfg.root_tol }
    }

    fn n(&self) -> usize {
        self.samples.n
    }

    /// Whether the caustic is continuous from sample `k` to `k + 1`.
    fn link(&self, k: usize) -> bool {
        let k1 = (k + 1) % self.n();
        self.caustic[k].is_some() && self.caustic[k1].is_some() && self.dsign[k] == self.dsign[k1]
    }

    fn h3(&self, t: f64) -> f64 {
        let jet = self.curve.jet(t);
        match caustic_from_jet(&jet, t) {
            Ok(c) => derivs_from_jet(&jet, c).d[2],
            Err(_) => f64::NAN,
        }
    }

    /// Roots of `f'''(t; caustic(t))`: the `A3` contacts.
    fn vertices(&self) -> Vec<(f64, MinkVec)> {
        let n = self.n();
        let hs: Vec<f64> = (0..n).map(|k| self.h3(self.samples.t(k))).collect();
        let mut out = Vec::new();
        for k in 0..n {
            if !self.link(k) {
                continue;
            }
            let (a, b) = (hs[k], hs[(k + 1) % n]);
            if a == 0.0 || a * b < 0.0 {
                let t0 = self.samples.t(k);
                let t = if a == 0.0 {
                    t0
                } else {
                    crate::curve::bisect(&|t| self.h3(t), t0, t0 + TAU / n as f64, a, self.tol)
                };
                let t = wrap_angle(t);
                if let Ok(c) = caustic_from_jet(&self.curve.jet(t), t) {
                    out.push((t, c));
                }
            }
        }
        out
    }

    fn tangencies(&self, c: MinkVec, exclude: &[f64]) -> Vec<f64> {
        let r = exclusion(self.n());
        tangencies_interp(&self.samples, c)
            .into_iter()
            .filter(|t| exclude.iter().all(|e| libm::fabs(circ_diff(*t, *e)) > r))
            .collect()
    }

    fn caustic_r2(&self, t: f64) -> Option<(MinkVec, f64)> {
        let c = caustic_from_jet(&self.curve.jet(t), t).ok()?;
        Some((c, dist_sq(&self.curve, t, c)))
    }

    /// Newton on `caustic(t1) = caustic(t2)` from a crossing of the caustic
    /// polyline; the chord crossing alone is too coarse to sign `Δr²`.
    /// Gives up when a step leaves the `radius` neighbourhood.
    fn refine_crossing(&self, t1: f64, t2: f64, radius: f64) -> Option<(f64, f64, MinkVec, f64)> {
        let e = 1e-6;
        let slope = |t: f64| Some((0.5 / e) * (self.caustic_r2(t + e)?.0 - self.caustic_r2(t - e)?.0));
        let (mut x1, mut x2) = (t1, t2);
        for _ in 0..16 {
            let (c1, r1) = self.caustic_r2(x1)?;
            let (c2, r2) = self.caustic_r2(x2)?;
            let gap = c1 - c2;
            if gap.euclid_norm() <= 1e-12 * self.scale {
                return Some((wrap_angle(x1), wrap_angle(x2), c1, r1 - r2));
            }
            // [c1' | -c2'] (d1, d2) = -gap
            let (a, b) = (slope(x1)?, -slope(x2)?);
            let det = a.det(b);
            if det == 0.0 || !det.is_finite() {
                return None;
            }
            x1 += (-gap).det(b) / det;
            x2 += a.det(-gap) / det;
            if libm::fabs(circ_diff(x1, t1)) > radius || libm::fabs(circ_diff(x2, t2)) > radius {
                return None;
            }
        }
        None
    }
}

fn a22_features(s: &Sampled<'_>, u: f64) -> Vec<Feature> {
    let n = s.n();
    let h = TAU / n as f64;
    let mut out = Vec::new();
    for a in 0..n {
        if !s.link(a) {
            continue;
        }
        let (p0, p1) = (s.caustic[a].unwrap(), s.caustic[(a + 1) % n].unwrap());
        for b in a + 3..n {
            if n - (b - a) < 3 || !s.link(b) {
                continue;
            }
            let (q0, q1) = (s.caustic[b].unwrap(), s.caustic[(b + 1) % n].unwrap());
            let (r, w) = (p1 - p0, q1 - q0);
            let den = r.det(w);
            if den == 0.0 {
                continue;
            }
            let sa = (q0 - p0).det(w) / den;
            let sb = (q0 - p0).det(r) / den;
            if !(0.0..1.0).contains(&sa) || !(0.0..1.0).contains(&sb) {
                continue;
            }
            let t1 = wrap_angle((a as f64 + sa) * h);
            let t2 = wrap_angle((b as f64 + sb) * h);
            let Some((t1, t2, c, value)) = s.refine_crossing(t1, t2, 2.0 * h) else { continue };
            // neighbouring chords can lead to the same crossing
            if out.iter().any(|f: &Feature| key_dist(&f.key, &[t1, t2]) < 1e-8) {
                continue;
            }
            out.push(Feature { key: vec![t1, t2], value, seed: Seed { kind: EventKind::A22, t_params: vec![t1, t2], center: c, u } });
        }
    }
    out
}

fn a1a3_features(s: &Sampled<'_>, vertices: &[(f64, MinkVec)], u: f64) -> Vec<Feature> {
    let mut out = Vec::new();
    for &(tv, c) in vertices {
        let fv = dist_sq(&s.curve, tv, c);
        for t in s.tangencies(c, &[tv]) {
            out.push(Feature {
                key: vec![tv, t],
                value: dist_sq(&s.curve, t, c) - fv,
                seed: Seed { kind: EventKind::A1A3, t_params: vec![tv, t], center: c, u },
            });
        }
    }
    out
}

/// Cusps of the symmetry set: an `A2` contact on the caustic plus an `A1`
/// contact with the same pseudo-radius.
fn cusps(family: &CurveFamily, s: &Sampled<'_>, u: f64, cfg: &Config) -> Vec<([f64; 2], MinkVec)> {
    let n = s.n();
    let tol = cfg.solver_tol * s.scale * s.scale;
    let mut prev: Option<(usize, Vec<(f64, f64)>)> = None;
    let mut found: Vec<([f64; 2], MinkVec)> = Vec::new();
    for k in 0..=n {
        let kk = k % n;
        let Some(c) = s.caustic[kk] else {
            prev = None;
            continue;
        };
        let tk = s.samples.t(kk);
        let fk = dist_sq(&s.curve, tk, c);
        let cur: Vec<(f64, f64)> = s.tangencies(c, &[tk]).into_iter().map(|t| (t, dist_sq(&s.curve, t, c) - fk)).collect();
        if let Some((pk, pv)) = &prev {
            if s.link(*pk) {
                let ka: Vec<[f64; 1]> = pv.iter().map(|v| [v.0]).collect();
                let kb: Vec<[f64; 1]> = cur.iter().map(|v| [v.0]).collect();
                let ra: Vec<&[f64]> = ka.iter().map(|v| &v[..]).collect();
                let rb: Vec<&[f64]> = kb.iter().map(|v| &v[..]).collect();
                for (i, j) in greedy_match(&ra, &rb, 0.25) {
                    let (va, vb) = (pv[i].1, cur[j].1);
                    if va * vb > 0.0 {
                        continue;
                    }
                    let lam = if va == vb { 0.0 } else { va / (va - vb) };
                    let t1 = s.samples.t(*pk) + lam * (TAU / n as f64);
                    let t2 = wrap_angle(pv[i].0 + lam * circ_diff(cur[j].0, pv[i].0));
                    let c0 = s.caustic[*pk].unwrap();
                    let c0 = c0 + lam * (c - c0);
                    let eqs = vec![Equation::D(0, 1), Equation::D(0, 2), Equation::D(1, 1), Equation::Diff(0, 1)];
                    if let Ok(sol) = run_system(family, eqs, &[t1, t2], c0, u, true, tol, cfg) {
                        let t = [wrap_angle(sol.x[0]), wrap_angle(sol.x[1])];
                        let cc = MinkVec::new(sol.x[2], sol.x[3]);
                        if libm::fabs(circ_diff(t[0], t[1])) > exclusion(n)
                            && !found.iter().any(|(q, _)| key_dist(q, &t) < 1e-8)
                        {
                            found.push((t, cc));
                        }
                    }
                }
            }
        }
        prev = Some((kk, cur));
    }
    found
}

fn a12a2_features(s: &Sampled<'_>, cusps: &[([f64; 2], MinkVec)], u: f64) -> Vec<Feature> {
    let mut out = Vec::new();
    for &([t1, t2], c) in cusps {
        let f1 = dist_sq(&s.curve, t1, c);
        for t3 in s.tangencies(c, &[t1, t2]) {
            let (lo, hi) = if t2 <= t3 { (t2, t3) } else { (t3, t2) };
            out.push(Feature {
                key: vec![t1, lo, hi],
                value: dist_sq(&s.curve, t3, c) - f1,
                seed: Seed { kind: EventKind::A12A2, t_params: vec![t1, t2, t3], center: c, u },
            });
        }
    }
    out
}

/// Triple points of the symmetry set, refined from third-tangency sign
/// changes along the traced branches.
fn triple_points(family: &CurveFamily, s: &Sampled<'_>, u: f64, grid_n: usize, cfg: &Config) -> Vec<([f64; 3], MinkVec)> {
    let Ok(zs) = trace_zero_set(&s.curve, grid_n, cfg) else { return Vec::new() };
    let tol = cfg.solver_tol * s.scale * s.scale;
    let mut found: Vec<([f64; 3], MinkVec)> = Vec::new();
    for branch in &zs.branches {
        let mut pairs = branch.pairs.clone();
        if branch.closed {
            if let Some(&first) = branch.pairs.first() {
                pairs.push(first);
            }
        }
        let mut prev: Option<((f64, f64), MinkVec, Vec<(f64, f64)>)> = None;
        for (t1, t2) in pairs {
            let Ok(c) = normal_center(&s.curve, t1, t2) else {
                prev = None;
                continue;
            };
            let f = dist_sq(&s.curve, t1, c);
            let cur: Vec<(f64, f64)> =
                s.tangencies(c, &[t1, t2]).into_iter().map(|t| (t, dist_sq(&s.curve, t, c) - f)).collect();
            if let Some((q, qc, pv)) = &prev {
                let ka: Vec<[f64; 1]> = pv.iter().map(|v| [v.0]).collect();
                let kb: Vec<[f64; 1]> = cur.iter().map(|v| [v.0]).collect();
                let ra: Vec<&[f64]> = ka.iter().map(|v| &v[..]).collect();
                let rb: Vec<&[f64]> = kb.iter().map(|v| &v[..]).collect();
                for (i, j) in greedy_match(&ra, &rb, 0.25) {
                    let (va, vb) = (pv[i].1, cur[j].1);
                    if va * vb > 0.0 {
                        continue;
                    }
                    let lam = if va == vb { 0.0 } else { va / (va - vb) };
                    let mix = |a: f64, b: f64| wrap_angle(a + lam * circ_diff(b, a));
                    let t0 = [mix(q.0, t1), mix(q.1, t2), mix(pv[i].0, cur[j].0)];
                    let c0 = *qc + lam * (c - *qc);
                    let eqs = vec![Equation::D(0, 1), Equation::D(1, 1), Equation::D(2, 1), Equation::Diff(0, 1), Equation::Diff(0, 2)];
                    if let Ok(sol) = run_system(family, eqs, &t0, c0, u, true, tol, cfg) {
                        let mut t = [wrap_angle(sol.x[0]), wrap_angle(sol.x[1]), wrap_angle(sol.x[2])];
                        t.sort_by(f64::total_cmp);
                        let distinct = (0..3).all(|a| (a + 1..3).all(|b| libm::fabs(circ_diff(t[a], t[b])) > exclusion(s.n())));
                        if distinct && !found.iter().any(|(q, _)| key_dist(q, &t) < 1e-8) {
                            found.push((t, MinkVec::new(sol.x[3], sol.x[4])));
                        }
                    }
                }
            }
            prev = Some(((t1, t2), c, cur));
        }
    }
    found
}

fn a14_features(s: &Sampled<'_>, triples: &[([f64; 3], MinkVec)], u: f64) -> Vec<Feature> {
    let mut out = Vec::new();
    for &(t, c) in triples {
        let f1 = dist_sq(&s.curve, t[0], c);
        for t4 in s.tangencies(c, &t) {
            let mut key = vec![t[0], t[1], t[2], t4];
            key.sort_by(f64::total_cmp);
            out.push(Feature {
                key,
                value: dist_sq(&s.curve, t4, c) - f1,
                seed: Seed { kind: EventKind::A14, t_params: vec![t[0], t[1], t[2], t4], center: c, u },
            });
        }
    }
    out
}

fn snapshot(family: &CurveFamily, u: f64, grid_n: usize, cfg: &Config) -> Snapshot {
    let s = Sampled::new(family, u, cfg.tangency_grid, cfg);
    let vertices = s.vertices();
    let mut features = a22_features(&s, u);
    features.extend(a1a3_features(&s, &vertices, u));
    let cusps = cusps(family, &s, u, cfg);
    features.extend(a12a2_features(&s, &cusps, u));
    let triples = triple_points(family, &s, u, grid_n, cfg);
    features.extend(a14_features(&s, &triples, u));
    Snapshot { u, scale: s.scale, vertices, features }
}

fn seeds_between(a: &Snapshot, b: &Snapshot, cfg: &Config, out: &mut Vec<Seed>) {
    let small = cfg.seed_factor * cfg.solver_tol * a.scale * a.scale;
    for kind in EventKind::ALL {
        if kind == EventKind::A4 {
            continue;
        }
        let fa: Vec<&Feature> = a.features.iter().filter(|f| f.seed.kind == kind).collect();
        let fb: Vec<&Feature> = b.features.iter().filter(|f| f.seed.kind == kind).collect();
        let ka: Vec<&[f64]> = fa.iter().map(|f| &f.key[..]).collect();
        let kb: Vec<&[f64]> = fb.iter().map(|f| &f.key[..]).collect();
        for (i, j) in greedy_match(&ka, &kb, 0.25) {
            let (va, vb) = (fa[i].value, fb[j].value);
            if va * vb < 0.0 {
                out.push(interpolate(&fa[i].seed, &fb[j].seed, va / (va - vb)));
            }
        }
        out.extend(fb.iter().filter(|f| libm::fabs(f.value) <= small).map(|f| f.seed.clone()));
    }
    // vertex pairs are born or die at A4 events
    if a.vertices.len() != b.vertices.len() {
        let (more, other) = if a.vertices.len() > b.vertices.len() { (a, b) } else { (b, a) };
        let km: Vec<[f64; 1]> = more.vertices.iter().map(|v| [v.0]).collect();
        let ko: Vec<[f64; 1]> = other.vertices.iter().map(|v| [v.0]).collect();
        let rm: Vec<&[f64]> = km.iter().map(|v| &v[..]).collect();
        let ro: Vec<&[f64]> = ko.iter().map(|v| &v[..]).collect();
        let matched: Vec<usize> = greedy_match(&rm, &ro, 0.25).into_iter().map(|(i, _)| i).collect();
        for (i, &(t, c)) in more.vertices.iter().enumerate() {
            if !matched.contains(&i) {
                out.push(Seed { kind: EventKind::A4, t_params: vec![t], center: c, u: more.u });
            }
        }
    }
}

fn same_event(a: &TransitionEvent, b: &TransitionEvent, tol: f64) -> bool {
    a.kind == b.kind
        && libm::fabs(a.u_star - b.u_star) <= tol
        && (a.center - b.center).euclid_norm() <= tol * a.scale.max(b.scale)
}

fn event_order(a: &TransitionEvent, b: &TransitionEvent) -> core::cmp::Ordering {
    a.u_star
        .total_cmp(&b.u_star)
        .then(a.kind.cmp(&b.kind))
        .then_with(|| {
            a.t_params
                .iter()
                .zip(&b.t_params)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(core::cmp::Ordering::Equal)
        })
}

/// Scans `u` over `steps` equally spaced values in `[u_min, u_max]`, seeds
/// the event solvers from indicator sign changes, and returns the distinct
/// converged events inside the range.
pub fn scan_family(
    family: &CurveFamily,
    u_min: f64,
    u_max: f64,
    steps: usize,
    grid_n: usize,
    cfg: &Config,
) -> Result<ScanResult> {
    if steps < 2 {
        return Err(Error::InvalidArgument { what: "scan needs at least two steps" });
    }
    if !(u_min < u_max) || !u_min.is_finite() || !u_max.is_finite() {
        return Err(Error::InvalidArgument { what: "scan range must satisfy u_min < u_max" });
    }
    let u_grid: Vec<f64> = (0..steps).map(|k| u_min + (u_max - u_min) * k as f64 / (steps - 1) as f64).collect();
    let mut seeds = Vec::new();
    let mut prev: Option<Snapshot> = None;
    for &u in &u_grid {
        let snap = snapshot(family, u, grid_n, cfg);
        if let Some(p) = &prev {
            seeds_between(p, &snap, cfg, &mut seeds);
        } else {
            let small = cfg.seed_factor * cfg.solver_tol * snap.scale * snap.scale;
            seeds.extend(snap.features.iter().filter(|f| libm::fabs(f.value) <= small).map(|f| f.seed.clone()));
        }
        prev = Some(snap);
    }
    let mut events: Vec<TransitionEvent> = Vec::new();
    let mut failed = Vec::new();
    let slack = cfg.dedup_tol;
    for seed in &seeds {
        match solve_event(family, seed, cfg) {
            Ok(ev) => {
                if ev.u_star < u_min - slack || ev.u_star > u_max + slack {
                    continue;
                }
                if !events.iter().any(|e| same_event(e, &ev, cfg.dedup_tol)) {
                    events.push(ev);
                }
            }
            Err(error) => failed.push(FailedSeed { seed: seed.clone(), error }),
        }
    }
    events.sort_by(event_order);
    Ok(ScanResult { events, u_grid, seeds_tried: seeds.len(), failed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_rule() {
        assert_eq!(classify_a14((3, 1)), Subtype::A);
        assert_eq!(classify_a14((1, 3)), Subtype::A);
        assert_eq!(classify_a14((2, 2)), Subtype::B);
        assert_eq!(classify_a14((4, 0)), Subtype::B);
        assert_eq!(classify_a14((0, 4)), Subtype::B);
    }

    #[test]
    fn moth_and_nib() {
        assert_eq!(classify_a22(0.3, 0.2, KAPPA_PRIME_TOL), Ok(Subtype::A));
        assert_eq!(classify_a22(0.3, -0.2, KAPPA_PRIME_TOL), Ok(Subtype::B));
        assert!(matches!(classify_a22(1e-12, 0.5, KAPPA_PRIME_TOL), Err(Error::NonGeneric { .. })));
        assert!(matches!(classify_a22(0.5, -0.5, KAPPA_PRIME_TOL), Err(Error::NonGeneric { .. })));
    }

    #[test]
    fn branch_rules() {
        use Branch::*;
        assert_eq!(classify_a12a2(Plus, Plus), Subtype::A);
        assert_eq!(classify_a12a2(Plus, Minus), Subtype::B);
        assert_eq!(classify_a1a3(Plus, Minus), Subtype::A);
        assert_eq!(classify_a1a3(Minus, Minus), Subtype::B);
        assert_eq!(classify_a4(), Subtype::Single);
    }

    #[test]
    fn names() {
        let names: Vec<&str> = EventKind::ALL.iter().map(|k| k.as_str()).collect();
        assert_eq!(names, ["A1_4", "A2_2", "A1_2A2", "A1A3", "A4"]);
        for k in EventKind::ALL {
            assert_eq!(k.equations().len(), k.contacts() + 3);
        }
    }

    #[test]
    fn triangle_containment() {
        let p = [MinkVec::new(0.0, 0.0), MinkVec::new(4.0, 0.0), MinkVec::new(0.0, 4.0), MinkVec::new(1.0, 1.0)];
        let t = triangle_test(p);
        assert_eq!(t.inside, [false, false, false, true]);
        assert_eq!(t.predicts(), Subtype::A);
        let sq = [MinkVec::new(0.0, 0.0), MinkVec::new(1.0, 0.0), MinkVec::new(1.0, 1.0), MinkVec::new(0.0, 1.0)];
        assert_eq!(triangle_test(sq).predicts(), Subtype::B);
    }

    #[test]
    fn greedy_match_prefers_nearest() {
        let a = [[0.1], [1.0]];
        let b = [[1.05], [0.12], [3.0]];
        let ra: Vec<&[f64]> = a.iter().map(|v| &v[..]).collect();
        let rb: Vec<&[f64]> = b.iter().map(|v| &v[..]).collect();
        let mut m = greedy_match(&ra, &rb, 0.25);
        m.sort();
        assert_eq!(m, [(0, 1), (1, 0)]);
    }
}
