//! JSON reports written by `analyze` and `scan`.

use std::f64::consts::TAU;

use mss_core::contact::caustic_point;
use mss_core::curve::bounding_box;
use mss_core::mss::{trace_mss, MaskReason};
use mss_core::transition::{scan_family, FailedSeed, ScanResult};
use mss_core::{Branch, CircleKind, Config, MinkVec, MssPoint, ParamCurve, Subtype, TransitionEvent};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ToolError};
use crate::settings::ConfigEcho;
use crate::spec::CurveSpec;

/// Samples used for the curve and caustic polylines.
pub const POLYLINE_SAMPLES: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MssRecord {
    pub t1: f64,
    pub t2: f64,
    pub center: [f64; 2],
    pub f: f64,
    /// `H`, `S` or `LC`.
    pub kind: String,
    pub label: String,
    pub medial: bool,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskedBox {
    pub t1_min: f64,
    pub t1_max: f64,
    pub t2_min: f64,
    pub t2_max: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskedSummary {
    pub count: usize,
    pub parallel_normals: usize,
    pub lightlike: usize,
    pub pole: usize,
    pub boxes: Vec<MaskedBox>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisReport {
    pub curve_name: String,
    pub u: f64,
    pub grid_n: usize,
    pub scale: f64,
    /// The curve at `POLYLINE_SAMPLES` equally spaced parameters.
    pub curve_polyline: Vec<[f64; 2]>,
    pub mss_branches: Vec<Vec<MssRecord>>,
    /// The caustic, split where it leaves the plotting region or is undefined.
    pub caustic_polyline: Vec<Vec<[f64; 2]>>,
    pub lightlike_ts: Vec<f64>,
    pub lightlike_points: Vec<[f64; 2]>,
    pub masked_cells: MaskedSummary,
    pub config_echo: ConfigEcho,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangleRecord {
    pub inside: [bool; 4],
    pub dets: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvidenceRecord {
    /// Contacts on the `+` and `-` branches.
    pub branch_counts: Option<[usize; 2]>,
    pub kappa_primes: Option<[f64; 2]>,
    pub tangent_dots: Option<Vec<f64>>,
    pub triangle_test: Option<TriangleRecord>,
    pub a1a3_sign: Option<f64>,
    pub threshold_consistent: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventFlagsRecord {
    pub criterion_conflict: bool,
    pub near_lightlike: bool,
    pub unclassified: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventRecord {
    pub kind: String,
    pub subtype: Option<String>,
    /// Kind with subtype, e.g. `A1_4(a)`.
    pub label: String,
    pub u_star: f64,
    pub t_params: Vec<f64>,
    pub distinguished: usize,
    pub contact_orders: Vec<Option<usize>>,
    pub branches: Vec<Option<String>>,
    pub center: [f64; 2],
    pub f_value: f64,
    pub circle_kind: String,
    pub evidence: EvidenceRecord,
    pub residual: f64,
    pub scale: f64,
    pub flags: EventFlagsRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailedSeedRecord {
    pub kind: String,
    pub t_params: Vec<f64>,
    pub center: [f64; 2],
    pub u: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventReport {
    pub curve_name: String,
    pub u_min: f64,
    pub u_max: f64,
    pub steps: usize,
    pub grid_n: usize,
    pub u_grid: Vec<f64>,
    pub seeds_tried: usize,
    pub non_converged: Vec<FailedSeedRecord>,
    /// Sorted by `u_star`.
    pub events: Vec<EventRecord>,
    pub config_echo: ConfigEcho,
}

fn xy(p: MinkVec) -> [f64; 2] {
    [p.u0, p.u1]
}

fn kind_name(k: CircleKind) -> &'static str {
    match k {
        CircleKind::H => "H",
        CircleKind::S => "S",
        CircleKind::LC => "LC",
    }
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::Plus => "+",
        Branch::Minus => "-",
    }
}

pub fn event_label(kind: &str, subtype: Option<&str>) -> String {
    match subtype {
        Some("single") | None => kind.to_string(),
        Some(s) => format!("{kind}({s})"),
    }
}

impl MssRecord {
    pub fn from_point(p: &MssPoint) -> Self {
        let mut flags = Vec::new();
        if p.near_transition {
            flags.push("near_transition".to_string());
        }
        if p.contacts.iter().any(|c| c.near_lightlike) {
            flags.push("near_lightlike".to_string());
        }
        Self {
            t1: p.t1,
            t2: p.t2,
            center: xy(p.center),
            f: p.f_value,
            kind: kind_name(p.circle.kind).to_string(),
            label: p.label.as_str().to_string(),
            medial: p.medial,
            flags,
        }
    }
}

impl AnalysisReport {
    pub fn build(spec: &CurveSpec, u: f64, cfg: &Config) -> Result<Self> {
        if !u.is_finite() {
            return Err(ToolError::Input(format!("u must be finite, got {u}")));
        }
        let family = spec.to_family()?;
        let curve = family.at(u);
        let trace = trace_mss(&curve, cfg.grid_n, cfg)?;
        let n = POLYLINE_SAMPLES;
        let ts = (0..n).map(|k| TAU * k as f64 / n as f64);
        let curve_polyline = ts.clone().map(|t| xy(curve.point(t))).collect();
        let count = |r: MaskReason| trace.masked_by_reason.iter().find(|c| c.0 == r).map_or(0, |c| c.1);
        Ok(Self {
            curve_name: spec.name.clone(),
            u,
            grid_n: trace.grid_n,
            scale: trace.scale,
            curve_polyline,
            mss_branches: trace
                .branches
                .iter()
                .map(|b| b.points.iter().map(MssRecord::from_point).collect())
                .collect(),
            caustic_polyline: caustic_pieces(&curve, n),
            lightlike_ts: trace.lightlike.clone(),
            lightlike_points: trace.lightlike.iter().map(|&t| xy(curve.point(t))).collect(),
            masked_cells: MaskedSummary {
                count: trace.masked_cells,
                parallel_normals: count(MaskReason::ParallelNormals),
                lightlike: count(MaskReason::Lightlike),
                pole: count(MaskReason::Pole),
                boxes: trace
                    .masked_regions
                    .iter()
                    .map(|r| MaskedBox { t1_min: r.t1_min, t1_max: r.t1_max, t2_min: r.t2_min, t2_max: r.t2_max, cells: r.cells })
                    .collect(),
            },
            config_echo: ConfigEcho::from(cfg),
        })
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| ToolError::Parse { what: "analysis report", source })
    }
}

/// Caustic samples, split at undefined points and where the caustic runs
/// more than two curve diameters from the curve's bounding box.
fn caustic_pieces<C: ParamCurve>(curve: &C, n: usize) -> Vec<Vec<[f64; 2]>> {
    let (lo, hi) = bounding_box(curve, n);
    let diam = (hi - lo).euclid_norm();
    let mid = 0.5 * (lo + hi);
    let keep = |p: MinkVec| p.is_finite() && (p - mid).euclid_norm() <= 2.0 * diam;
    let mut pieces = Vec::new();
    let mut piece: Vec<[f64; 2]> = Vec::new();
    for k in 0..=n {
        let t = TAU * k as f64 / n as f64;
        match caustic_point(curve, t) {
            Ok(p) if keep(p) => piece.push(xy(p)),
            _ => {
                if piece.len() > 1 {
                    pieces.push(std::mem::take(&mut piece));
                }
                piece.clear();
            }
        }
    }
    if piece.len() > 1 {
        pieces.push(piece);
    }
    // the first and last pieces meet at t = 0 when neither was cut there
    if pieces.len() > 1 && pieces[0].first() == pieces.last().and_then(|p| p.last()) {
        let first = pieces.remove(0);
        pieces.last_mut().expect("non-empty").extend_from_slice(&first[1..]);
    }
    pieces
}

impl EventRecord {
    pub fn from_event(e: &TransitionEvent) -> Self {
        let kind = e.kind.as_str().to_string();
        let subtype = e.subtype.map(|s: Subtype| s.as_str().to_string());
        let ev = &e.evidence;
        Self {
            label: event_label(&kind, subtype.as_deref()),
            kind,
            subtype,
            u_star: e.u_star,
            t_params: e.t_params.clone(),
            distinguished: e.distinguished,
            contact_orders: e.contact_orders.clone(),
            branches: e.branches.iter().map(|b| b.map(|b| branch_name(b).to_string())).collect(),
            center: xy(e.center),
            f_value: e.f_value,
            circle_kind: kind_name(e.circle.kind).to_string(),
            evidence: EvidenceRecord {
                branch_counts: ev.branch_counts.map(|(p, m)| [p, m]),
                kappa_primes: ev.kappa_primes.map(|(a, b)| [a, b]),
                tangent_dots: ev.tangent_dots.clone(),
                triangle_test: ev.triangle_test.map(|t| TriangleRecord { inside: t.inside, dets: t.dets }),
                a1a3_sign: ev.a1a3_sign,
                threshold_consistent: ev.threshold_consistent,
            },
            residual: e.residual,
            scale: e.scale,
            flags: EventFlagsRecord {
                criterion_conflict: e.flags.criterion_conflict,
                near_lightlike: e.flags.near_lightlike,
                unclassified: e.flags.unclassified.map(|err| err.to_string()),
            },
        }
    }
}

impl FailedSeedRecord {
    pub fn from_failed(f: &FailedSeed) -> Self {
        Self {
            kind: f.seed.kind.as_str().to_string(),
            t_params: f.seed.t_params.clone(),
            center: xy(f.seed.center),
            u: f.seed.u,
            error: f.error.to_string(),
        }
    }
}

impl EventReport {
    pub fn build(spec: &CurveSpec, u_min: f64, u_max: f64, cfg: &Config) -> Result<Self> {
        if !spec.has_family() {
            return Err(ToolError::Input(format!("curve spec '{}' has no family", spec.name)));
        }
        if !(u_min < u_max) {
            return Err(ToolError::Input(format!("u_min ({u_min}) must be below u_max ({u_max})")));
        }
        let family = spec.to_family()?;
        let scan = scan_family(&family, u_min, u_max, cfg.scan_steps, cfg.scan_grid_n, cfg)?;
        Ok(Self::from_scan(&spec.name, u_min, u_max, cfg, &scan))
    }

    pub fn from_scan(name: &str, u_min: f64, u_max: f64, cfg: &Config, scan: &ScanResult) -> Self {
        let mut events: Vec<EventRecord> = scan.events.iter().map(EventRecord::from_event).collect();
        events.sort_by(|a, b| a.u_star.total_cmp(&b.u_star));
        Self {
            curve_name: name.to_string(),
            u_min,
            u_max,
            steps: cfg.scan_steps,
            grid_n: cfg.scan_grid_n,
            u_grid: scan.u_grid.clone(),
            seeds_tried: scan.seeds_tried,
            non_converged: scan.failed.iter().map(FailedSeedRecord::from_failed).collect(),
            events,
            config_echo: ConfigEcho::from(cfg),
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| ToolError::Parse { what: "event report", source })
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("plain data serialises");
    s.push('\n');
    s
}
