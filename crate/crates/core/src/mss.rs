//! The Minkowski symmetry set: centres of pseudo-circles tangent to the curve
//! at two or more points.
//!
//! Bitangent pairs `(t1, t2)` are the zero set of
//! `g(t1, t2) = f(t1, c) - f(t2, c)` where `c` is the intersection of the two
//! pseudo-normal lines. The zero set is traced by marching squares on the
//! torus quotiented by `(t1, t2) ~ (t2, t1)`, with every edge crossing refined
//! by bisection.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::config::Config;
use crate::contact::{dist_sq, first_derivative, order_from_jet, ContactPoint};
use crate::curve::{check_regular, curve_scale, lightlike_points, point_data, ParamCurve};
use crate::error::{Error, Result};
use crate::math::{circ_diff, wrap_angle, TAU};
use crate::minkowski::{CausalType, CircleKind, MinkVec, PseudoCircle};

/// Local type of a symmetry-set point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MssLabel {
    /// Ordinary bitangency.
    A1A1,
    /// One contact is an inflection of `f_c`: a cusp of the symmetry set.
    A2A1,
    /// Higher contact at one point: an endpoint of the symmetry set.
    A3,
    /// A third tangency with the same pseudo-radius: a triple point.
    A1Cubed,
    /// The circle is the lightcone or a contact sits at a lightlike point.
    NearLightlike,
    /// The two contacts are within two diagonal bands of each other.
    NearDiagonal,
}

impl MssLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            MssLabel::A1A1 => "A1A1",
            MssLabel::A2A1 => "A2A1",
            MssLabel::A3 => "A3",
            MssLabel::A1Cubed => "A1cubed",
            MssLabel::NearLightlike => "NearLightlike",
            MssLabel::NearDiagonal => "NearDiagonal",
        }
    }
}

/// A bitangent configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MssPoint {
    pub t1: f64,
    pub t2: f64,
    pub center: MinkVec,
    /// Common value `f(t1, c) = f(t2, c)`.
    pub f_value: f64,
    pub circle: PseudoCircle,
    pub contacts: Vec<ContactPoint>,
    pub label: MssLabel,
    pub medial: bool,
    /// Some contact order was ambiguous under the gap rule.
    pub near_transition: bool,
}

/// A polyline of the traced symmetry set.
#[derive(Debug, Clone, PartialEq)]
pub struct MssBranch {
    pub points: Vec<MssPoint>,
    pub closed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MaskReason {
    ParallelNormals,
    Lightlike,
    Pole,
}

/// Bounding box, in `(t1, t2)`, of a connected group of masked cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskedRegion {
    pub t1_min: f64,
    pub t1_max: f64,
    pub t2_min: f64,
    pub t2_max: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MssTrace {
    pub grid_n: usize,
    pub scale: f64,
    pub lightlike: Vec<f64>,
    pub branches: Vec<MssBranch>,
    /// Masked cells `(i, j)` with `i < j`, row-major; cell `(i, j)` spans
    /// `[i h, (i+1) h] × [j h, (j+1) h]` with `h = 2π / grid_n`.
    pub masked: Vec<(usize, usize, MaskReason)>,
    pub masked_cells: usize,
    pub masked_by_reason: [(MaskReason, usize); 3],
    pub masked_regions: Vec<MaskedRegion>,
}

impl MssTrace {
    pub fn points(&self) -> impl Iterator<Item = &MssPoint> {
        self.branches.iter().flat_map(|b| b.points.iter())
    }
}

/// Intersection of the pseudo-normal lines at two curve points
/// (`p_i`, tangent `v_i`). `None` when the normals are parallel to within
/// `1e-10` in sine of the angle between the tangents.
#[inline]
pub fn normal_intersection(p1: MinkVec, v1: MinkVec, p2: MinkVec, v2: MinkVec) -> Option<MinkVec> {
    // <v_i, c> = <v_i, p_i>
    let det = -v1.u0 * v2.u1 + v1.u1 * v2.u0;
    let scale = v1.euclid_norm() * v2.euclid_norm();
    if !(libm::fabs(det) > 1e-10 * scale) {
        return None;
    }
    let r1 = v1.dot(p1);
    let r2 = v2.dot(p2);
    let c0 = (r1 * v2.u1 - v1.u1 * r2) / det;
    let c1 = (-v1.u0 * r2 + v2.u0 * r1) / det;
    Some(MinkVec::new(c0, c1))
}

/// Centre of the pseudo-circle tangent to the normal lines at `t1`, `t2`.
pub fn normal_center<C: ParamCurve>(curve: &C, t1: f64, t2: f64) -> Result<MinkVec> {
    let j1 = curve.jet(t1);
    let j2 = curve.jet(t2);
    normal_intersection(j1[0], j1[1], j2[0], j2[1]).ok_or(Error::ParallelNormals { t1, t2 })
}

/// `g(t1, t2) = f(t1, c) - f(t2, c)` with `c = normal_center(t1, t2)`.
pub fn bitangency_residual<C: ParamCurve>(curve: &C, t1: f64, t2: f64) -> Result<f64> {
    let c = normal_center(curve, t1, t2)?;
    Ok(dist_sq(curve, t1, c) - dist_sq(curve, t2, c))
}

#[inline]
fn residual_from(p1: MinkVec, v1: MinkVec, p2: MinkVec, v2: MinkVec) -> Option<(f64, MinkVec)> {
    let c = normal_intersection(p1, v1, p2, v2)?;
    let (e1, e2) = (p1 - c, p2 - c);
    Some((e1.dot(e1) - e2.dot(e2), c))
}

/// Points and velocities of a curve at `n` equally spaced parameters.
#[derive(Debug, Clone)]
pub struct Samples {
    pub n: usize,
    pub points: Vec<MinkVec>,
    pub velocities: Vec<MinkVec>,
}

impl Samples {
    pub fn new<C: ParamCurve>(curve: &C, n: usize) -> Self {
        let mut points = Vec::with_capacity(n);
        let mut velocities = Vec::with_capacity(n);
        for k in 0..n {
            let jet = curve.jet(TAU * k as f64 / n as f64);
            points.push(jet[0]);
            velocities.push(jet[1]);
        }
        Self { n, points, velocities }
    }

    #[inline]
    pub fn t(&self, k: usize) -> f64 {
        TAU * k as f64 / self.n as f64
    }
}

/// Everything needed to lift a bitangent pair into an [`MssPoint`].
#[derive(Debug, Clone)]
pub struct MssContext<'c, C: ParamCurve> {
    pub curve: &'c C,
    pub cfg: Config,
    pub scale: f64,
    pub lightlike: Vec<f64>,
    /// Parameter distance to a lightlike point below which a contact is
    /// flagged near-lightlike.
    pub lightlike_radius: f64,
    pub diagonal_band: f64,
    tangency: Samples,
}

impl<'c, C: ParamCurve> MssContext<'c, C> {
    pub fn new(curve: &'c C, cfg: &Config, grid_n: usize) -> Self {
        let lightlike = lightlike_points(curve, cfg.lightlike_grid, cfg.root_tol);
        Self {
            curve,
            cfg: *cfg,
            scale: curve_scale(curve, 1024),
            lightlike,
            lightlike_radius: TAU / grid_n as f64,
            diagonal_band: Config::diagonal_band(grid_n),
            tangency: Samples::new(curve, cfg.tangency_grid),
        }
    }

    pub fn scale2(&self) -> f64 {
        self.scale * self.scale
    }

    pub fn near_lightlike(&self, t: f64) -> bool {
        self.lightlike.iter().any(|&l| libm::fabs(circ_diff(t, l)) < self.lightlike_radius)
    }

    /// All `t` with `f'(t; c) = 0`, excluding parameters within `exclude_radius`
    /// of those in `exclude`.
    pub fn tangencies(&self, c: MinkVec, exclude: &[f64], exclude_radius: f64) -> Vec<f64> {
        tangencies_on(self.curve, &self.tangency, c, self.cfg.root_tol)
            .into_iter()
            .filter(|t| exclude.iter().all(|e| libm::fabs(circ_diff(*t, *e)) > exclude_radius))
            .collect()
    }

    /// Contact record for `γ(t)` against `circle`.
    pub fn contact(&self, t: f64, circle: &PseudoCircle) -> ContactPoint {
        let jet = self.curve.jet(t);
        let data = point_data(self.curve, t, self.cfg.eps_light);
        let order = order_from_jet(&jet, circle.center, self.cfg.contact_tolerance()).ok().flatten();
        let branch = match circle.kind {
            CircleKind::LC => None,
            _ => circle.side_of(jet[0]).ok(),
        };
        ContactPoint {
            t,
            order,
            point: jet[0],
            causal: data.causal,
            kappa: data.kappa,
            kappa_prime: data.kappa_prime,
            branch,
            near_lightlike: data.causal == CausalType::Lightlike || self.near_lightlike(t),
        }
    }

    /// Lifts the bitangent pair `(t1, t2)` to a labelled point.
    pub fn lift(&self, t1: f64, t2: f64) -> Result<MssPoint> {
        let (t1, t2) = ordered(t1, t2);
        let center = normal_center(self.curve, t1, t2)?;
        let f1 = dist_sq(self.curve, t1, center);
        let f2 = dist_sq(self.curve, t2, center);
        let f_value = 0.5 * (f1 + f2);
        let e = self.curve.point(t1) - center;
        let circle = PseudoCircle::from_r2(center, f_value, e.euclid_norm2(), self.cfg.eps_light);
        let contacts = vec![self.contact(t1, &circle), self.contact(t2, &circle)];
        let mut p = MssPoint {
            t1,
            t2,
            center,
            f_value,
            circle,
            contacts,
            label: MssLabel::A1A1,
            medial: false,
            near_transition: false,
        };
        let (label, near_transition) = label_mss_point(self, &p);
        p.label = label;
        p.near_transition = near_transition;
        p.medial = medial_flag(&p);
        Ok(p)
    }
}

fn ordered(a: f64, b: f64) -> (f64, f64) {
    let (a, b) = (wrap_angle(a), wrap_angle(b));
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Roots of `t ↦ f'(t; c)` on the closed curve.
pub fn tangencies_on<C: ParamCurve>(curve: &C, samples: &Samples, c: MinkVec, tol: f64) -> Vec<f64> {
    let n = samples.n;
    let fp = |t: f64| {
        let jet = curve.jet(t);
        first_derivative(jet[0], jet[1], c)
    };
    let mut roots = Vec::new();
    let mut prev = first_derivative(samples.points[0], samples.velocities[0], c);
    let first = prev;
    for k in 0..n {
        let next = if k + 1 == n {
            first
        } else {
            first_derivative(samples.points[k + 1], samples.velocities[k + 1], c)
        };
        if prev == 0.0 {
            roots.push(samples.t(k));
        } else if prev * next < 0.0 {
            let b = if k + 1 == n { TAU } else { samples.t(k + 1) };
            roots.push(wrap_angle(crate::curve::bisect(&fp, samples.t(k), b, prev, tol)));
        }
        prev = next;
    }
    roots
}

/// Roots of `t ↦ f'(t; c)` by linear interpolation between samples, with
/// no further curve evaluations. Accurate to `O(h²)`.
pub fn tangencies_interp(samples: &Samples, c: MinkVec) -> Vec<f64> {
    let n = samples.n;
    let h = TAU / n as f64;
    let fp: Vec<f64> = (0..n).map(|k| first_derivative(samples.points[k], samples.velocities[k], c)).collect();
    let mut roots = Vec::new();
    for k in 0..n {
        let (a, b) = (fp[k], fp[(k + 1) % n]);
        if a == 0.0 {
            roots.push(samples.t(k));
        } else if a * b < 0.0 {
            roots.push(wrap_angle(samples.t(k) + h * a / (a - b)));
        }
    }
    roots
}

/// Label of a symmetry-set point and whether a contact order was ambiguous.
pub fn label_mss_point<C: ParamCurve>(ctx: &MssContext<'_, C>, p: &MssPoint) -> (MssLabel, bool) {
    let tol = ctx.cfg.contact_tolerance();
    let mut ambiguous = false;
    let mut orders = [0usize; 2];
    for (slot, t) in orders.iter_mut().zip([p.t1, p.t2]) {
        match order_from_jet(&ctx.curve.jet(t), p.center, tol) {
            Ok(Some(k)) => *slot = k,
            Ok(None) => *slot = 0,
            Err(_) => {
                ambiguous = true;
                *slot = 0;
            }
        }
    }
    if p.circle.kind == CircleKind::LC || p.contacts.iter().any(|c| c.near_lightlike) {
        return (MssLabel::NearLightlike, ambiguous);
    }
    if orders.iter().any(|&k| k >= 3) {
        return (MssLabel::A3, ambiguous);
    }
    if orders.iter().filter(|&&k| k == 2).count() == 1 {
        return (MssLabel::A2A1, ambiguous);
    }
    let exclude = ctx.diagonal_band;
    let third = ctx.tangencies(p.center, &[p.t1, p.t2], exclude);
    let band = ctx.cfg.contact_tol * libm::fabs(p.f_value).max(ctx.scale2()).max(1.0);
    if third.iter().any(|&t| libm::fabs(dist_sq(ctx.curve, t, p.center) - p.f_value) <= band) {
        return (MssLabel::A1Cubed, ambiguous);
    }
    if libm::fabs(circ_diff(p.t1, p.t2)) < 2.0 * ctx.diagonal_band {
        return (MssLabel::NearDiagonal, ambiguous);
    }
    (MssLabel::A1A1, ambiguous)
}

/// Whether every contact lies on the same branch of the bitangent circle.
pub fn medial_flag(p: &MssPoint) -> bool {
    if p.circle.kind == CircleKind::LC {
        return false;
    }
    let mut branches = p.contacts.iter().map(|c| c.branch);
    match branches.next().flatten() {
        Some(first) => branches.all(|b| b == Some(first)),
        None => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Node {
    Value(f64),
    Diagonal,
    Parallel,
}

type NodeKey = (usize, usize);
type EdgeKey = (NodeKey, NodeKey);

#[derive(Debug, Clone, Copy, PartialEq)]
enum Crossing {
    Point(f64, f64),
    Pole,
}

fn canonical_node(a: usize, b: usize, n: usize) -> NodeKey {
    let (a, b) = (a % n, b % n);
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn canonical_edge(a: NodeKey, b: NodeKey, n: usize) -> EdgeKey {
    let x = canonical_node(a.0, a.1, n);
    let y = canonical_node(b.0, b.1, n);
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

/// Bitangent pairs along one traced branch.
#[derive(Debug, Clone, PartialEq)]
pub struct PairBranch {
    pub pairs: Vec<(f64, f64)>,
    pub closed: bool,
}

/// The traced zero set of the bitangency residual, before lifting.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub grid_n: usize,
    pub branches: Vec<PairBranch>,
    /// Masked cells `(i, j)` with `i < j`, row-major.
    pub masked: Vec<(usize, usize, MaskReason)>,
    pub masked_cells: usize,
    pub masked_by_reason: [(MaskReason, usize); 3],
    pub masked_regions: Vec<MaskedRegion>,
}

/// Traces the symmetry set of a closed curve on a `grid_n × grid_n` grid.
pub fn trace_mss<C: ParamCurve>(curve: &C, grid_n: usize, cfg: &Config) -> Result<MssTrace> {
    check_grid(grid_n)?;
    check_regular(curve, 4 * grid_n)?;
    let ctx = MssContext::new(curve, cfg, grid_n);
    let zs = zero_set_with(curve, grid_n, cfg, &ctx.lightlike, ctx.scale)?;
    let branches = zs
        .branches
        .iter()
        .filter_map(|b| {
            let points: Vec<MssPoint> = b.pairs.iter().filter_map(|&(t1, t2)| ctx.lift(t1, t2).ok()).collect();
            (!points.is_empty()).then_some(MssBranch { points, closed: b.closed })
        })
        .collect();
    Ok(MssTrace {
        grid_n,
        scale: ctx.scale,
        lightlike: ctx.lightlike.clone(),
        branches,
        masked: zs.masked,
        masked_cells: zs.masked_cells,
        masked_by_reason: zs.masked_by_reason,
        masked_regions: zs.masked_regions,
    })
}

/// The zero set alone, without labelling its points.
pub fn trace_zero_set<C: ParamCurve>(curve: &C, grid_n: usize, cfg: &Config) -> Result<ZeroSet> {
    check_grid(grid_n)?;
    check_regular(curve, 4 * grid_n)?;
    let lightlike = lightlike_points(curve, cfg.lightlike_grid, cfg.root_tol);
    zero_set_with(curve, grid_n, cfg, &lightlike, curve_scale(curve, 1024))
}

fn check_grid(grid_n: usize) -> Result<()> {
    if grid_n < 64 {
        return Err(Error::InvalidArgument { what: "grid_n must be at least 64" });
    }
    Ok(())
}

fn zero_set_with<C: ParamCurve>(curve: &C, grid_n: usize, cfg: &Config, lightlike: &[f64], scale: f64) -> Result<ZeroSet> {
    let n = grid_n;
    let samples = Samples::new(curve, n);
    let h = TAU / n as f64;
    let band_nodes = 2usize;

    let mut grid = vec![Node::Diagonal; n * n];
    for a in 0..n {
        for b in a + 1..n {
            let d = (b - a).min(n - (b - a));
            if d <= band_nodes {
                continue;
            }
            let node = match residual_from(samples.points[a], samples.velocities[a], samples.points[b], samples.velocities[b]) {
                Some((g, _)) => Node::Value(g),
                None => Node::Parallel,
            };
            grid[a * n + b] = node;
            grid[b * n + a] = match node {
                Node::Value(g) => Node::Value(-g),
                other => other,
            };
        }
    }
    let node = |a: usize, b: usize| grid[(a % n) * n + (b % n)];

    let mut lightlike_interval = vec![false; n];
    for &l in lightlike {
        let k = ((l / h) as usize).min(n - 1);
        lightlike_interval[k] = true;
        // a root on a grid node touches both neighbouring intervals
        if libm::fabs(l - k as f64 * h) < 1e-12 {
            lightlike_interval[(k + n - 1) % n] = true;
        }
    }

    let refine_limit = cfg.refine_residual * (scale * scale).max(f64::MIN_POSITIVE);
    let mut crossings: BTreeMap<EdgeKey, Crossing> = BTreeMap::new();
    let mut links: BTreeMap<EdgeKey, Vec<EdgeKey>> = BTreeMap::new();
    let mut masked = vec![None::<MaskReason>; n * n];

    let mut edge_crossing = |a: NodeKey, b: NodeKey, ga: f64, gb: f64| -> Crossing {
        let key = canonical_edge(a, b, n);
        if let Some(c) = crossings.get(&key) {
            return *c;
        }
        let (a1, a2) = (a.0 as f64 * h, a.1 as f64 * h);
        let (b1, b2) = (b.0 as f64 * h, b.1 as f64 * h);
        let eval = |lam: f64| -> f64 {
            let t1 = a1 + lam * (b1 - a1);
            let t2 = a2 + lam * (b2 - a2);
            bitangency_residual(curve, t1, t2).unwrap_or(f64::NAN)
        };
        // Illinois false position, stopped once |g| is well inside the pole threshold
        let (mut lo, mut hi, mut glo, mut ghi) = (0.0f64, 1.0f64, ga, gb);
        let mut side = 0i8;
        let mut gl = f64::NAN;
        let mut lam = 0.5;
        for _ in 0..80 {
            lam = (lo * ghi - hi * glo) / (ghi - glo);
            if !(lam > lo && lam < hi) {
                lam = 0.5 * (lo + hi);
            }
            gl = eval(lam);
            if gl.is_nan() || libm::fabs(gl) <= 1e-3 * refine_limit || hi - lo <= 1e-15 {
                break;
            }
            if (gl < 0.0) == (glo < 0.0) {
                lo = lam;
                glo = gl;
                if side == -1 {
                    ghi *= 0.5;
                }
                side = -1;
            } else {
                hi = lam;
                ghi = gl;
                if side == 1 {
                    glo *= 0.5;
                }
                side = 1;
            }
        }
        let result = if libm::fabs(gl) <= refine_limit {
            Crossing::Point(a1 + lam * (b1 - a1), a2 + lam * (b2 - a2))
        } else {
            Crossing::Pole
        };
        crossings.insert(key, result);
        result
    };

    for i in 0..n {
        for j in i + 1..n {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let vals: Vec<Node> = corners.iter().map(|&(a, b)| node(a, b)).collect();
            if vals.iter().any(|v| *v == Node::Diagonal) {
                continue;
            }
            if vals.iter().any(|v| *v == Node::Parallel) {
                masked[i * n + j] = Some(MaskReason::ParallelNormals);
                continue;
            }
            if lightlike_interval[i] || lightlike_interval[j % n] {
                masked[i * n + j] = Some(MaskReason::Lightlike);
                continue;
            }
            let g: Vec<f64> = vals
                .iter()
                .map(|v| match v {
                    Node::Value(g) => *g,
                    _ => unreachable!(),
                })
                .collect();
            let pos: Vec<bool> = g.iter().map(|v| *v >= 0.0).collect();
            // edges in ring order: bottom, right, top, left
            let mut hits: Vec<(usize, EdgeKey)> = Vec::new();
            let mut pole = false;
            for e in 0..4 {
                let (a, b) = (e, (e + 1) % 4);
                if pos[a] != pos[b] {
                    match edge_crossing(corners[a], corners[b], g[a], g[b]) {
                        Crossing::Point(..) => hits.push((e, canonical_edge(corners[a], corners[b], n))),
                        Crossing::Pole => pole = true,
                    }
                }
            }
            if pole {
                masked[i * n + j] = Some(MaskReason::Pole);
                continue;
            }
            let mut link = |x: EdgeKey, y: EdgeKey| {
                links.entry(x).or_default().push(y);
                links.entry(y).or_default().push(x);
            };
            match hits.len() {
                2 => link(hits[0].1, hits[1].1),
                4 => {
                    let tc1 = (i as f64 + 0.5) * h;
                    let tc2 = (j as f64 + 0.5) * h;
                    let centre_pos = bitangency_residual(curve, tc1, tc2).map(|v| v >= 0.0).unwrap_or(pos[0]);
                    if centre_pos == pos[0] {
                        // corner 0 region passes through the centre: cut off corners 1 and 3
                        link(hits[0].1, hits[1].1);
                        link(hits[2].1, hits[3].1);
                    } else {
                        link(hits[3].1, hits[0].1);
                        link(hits[1].1, hits[2].1);
                    }
                }
                _ => {}
            }
        }
    }

    let mut branches = Vec::new();
    let mut visited: BTreeSet<EdgeKey> = BTreeSet::new();
    let starts: Vec<EdgeKey> = links
        .iter()
        .filter(|(_, v)| v.len() == 1)
        .map(|(k, _)| *k)
        .chain(links.keys().copied())
        .collect();
    for start in starts {
        if visited.contains(&start) {
            continue;
        }
        let mut chain = vec![start];
        visited.insert(start);
        let mut current = start;
        let closed;
        loop {
            let next = links[&current].iter().copied().find(|k| !visited.contains(k));
            match next {
                Some(k) => {
                    visited.insert(k);
                    chain.push(k);
                    current = k;
                }
                None => {
                    closed = chain.len() > 2 && links[&current].contains(&start);
                    break;
                }
            }
        }
        let pairs: Vec<(f64, f64)> = chain
            .iter()
            .filter_map(|key| match crossings.get(key) {
                Some(Crossing::Point(t1, t2)) => Some(ordered(*t1, *t2)),
                _ => None,
            })
            .collect();
        if !pairs.is_empty() {
            branches.push(PairBranch { pairs, closed });
        }
    }

    let (regions, counts) = masked_regions(&masked, n, h);
    let masked_cells = counts.iter().map(|c| c.1).sum();
    let masked = masked.iter().enumerate().filter_map(|(k, m)| m.map(|r| (k / n, k % n, r))).collect();
    Ok(ZeroSet { grid_n: n, branches, masked, masked_cells, masked_by_reason: counts, masked_regions: regions })
}

fn masked_regions(masked: &[Option<MaskReason>], n: usize, h: f64) -> (Vec<MaskedRegion>, [(MaskReason, usize); 3]) {
    let mut counts = [
        (MaskReason::ParallelNormals, 0),
        (MaskReason::Lightlike, 0),
        (MaskReason::Pole, 0),
    ];
    let mut seen = vec![false; n * n];
    let mut regions = Vec::new();
    for idx in 0..n * n {
        let Some(reason) = masked[idx] else { continue };
        for c in counts.iter_mut() {
            if c.0 == reason {
                c.1 += 1;
            }
        }
        if seen[idx] {
            continue;
        }
        seen[idx] = true;
        let mut queue = VecDeque::from([idx]);
        let (mut i0, mut i1, mut j0, mut j1, mut cells) = (n, 0, n, 0, 0);
        while let Some(k) = queue.pop_front() {
            let (i, j) = (k / n, k % n);
            cells += 1;
            i0 = i0.min(i);
            i1 = i1.max(i);
            j0 = j0.min(j);
            j1 = j1.max(j);
            let mut push = |ii: usize, jj: usize| {
                let kk = ii * n + jj;
                if masked[kk].is_some() && !seen[kk] {
                    seen[kk] = true;
                    queue.push_back(kk);
                }
            };
            if i > 0 {
                push(i - 1, j);
            }
            if i + 1 < n {
                push(i + 1, j);
            }
            if j > 0 {
                push(i, j - 1);
            }
            if j + 1 < n {
                push(i, j + 1);
            }
        }
        regions.push(MaskedRegion {
            t1_min: i0 as f64 * h,
            t1_max: (i1 + 1) as f64 * h,
            t2_min: j0 as f64 * h,
            t2_max: (j1 + 1) as f64 * h,
            cells,
        });
    }
    (regions, counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CurveFamily, FourierComponent};

    fn circle() -> CurveFamily {
        CurveFamily::new(
            FourierComponent::new(0.0, vec![1.0], vec![0.0]).unwrap(),
            FourierComponent::new(0.0, vec![0.0], vec![1.0]).unwrap(),
        )
    }

    #[test]
    fn circle_pair_center_is_origin() {
        let c = circle();
        let cc = normal_center(&c.at(0.0), 0.0, core::f64::consts::FRAC_PI_2).unwrap();
        assert!(cc.euclid_norm() < 1e-12);
    }

    #[test]
    fn coincident_normals_fail() {
        let c = circle();
        assert!(matches!(normal_center(&c.at(0.0), 0.3, 0.3), Err(Error::ParallelNormals { .. })));
    }

    #[test]
    fn residual_antisymmetric() {
        let c = circle();
        let a = bitangency_residual(&c.at(0.0), 0.4, 2.0).unwrap();
        let b = bitangency_residual(&c.at(0.0), 2.0, 0.4).unwrap();
        assert!((a + b).abs() < 1e-14);
    }

    #[test]
    fn small_grid_rejected() {
        let c = circle();
        assert!(trace_mss(&c.at(0.0), 32, &Config::default()).is_err());
    }

    #[test]
    fn canonical_edges_glue_the_seam() {
        let n = 16;
        // top edge of cell (3, n-1) is the left edge of cell (0, 3)
        let top = canonical_edge((3, n), (4, n), n);
        let left = canonical_edge((0, 3), (0, 4), n);
        assert_eq!(top, left);
    }
}
