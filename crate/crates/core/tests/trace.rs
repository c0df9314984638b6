use std::f64::consts::TAU;

use mss_core::mss::{trace_mss, trace_zero_set, MssContext};
use mss_core::{Branch, Config, Error, MinkVec, MssLabel, ParamCurve, PseudoCircle};
use mss_testkit::{
    curve, ellipse, ellipse_angle, fourier, mirror_curve, plant_contacts, point_residual, test_curves, trace_vs_oracle,
    Contact,
};

#[test]
fn traced_points_are_bitangent() {
    let cfg = Config::default();
    for (name, fam) in test_curves() {
        let c = fam.at(0.0);
        let tr = trace_mss(&c, 128, &cfg).unwrap();
        let s2 = tr.scale * tr.scale;
        assert!(tr.points().count() > 100, "{name}");
        for p in tr.points() {
            assert!(point_residual(&c, p) <= 1e-8 * s2, "{name} {:?}", (p.t1, p.t2));
            assert!(p.t1 <= p.t2);
        }
    }
}

#[test]
fn trace_matches_dense_oracle() {
    let cfg = Config::default();
    for (name, fam) in test_curves() {
        let c = fam.at(0.0);
        let tr = trace_mss(&c, 128, &cfg).unwrap();
        let d = trace_vs_oracle(&c, &tr, 512);
        assert!(d < 2.0 * TAU / 128.0, "{name}: {d}");
    }
}

#[test]
fn mirror_trace_contains_axis_centres() {
    let fam = mirror_curve();
    let c = fam.at(0.0);
    let tr = trace_mss(&c, 128, &Config::default()).unwrap();
    let on_axis = tr.points().filter(|p| (p.t1 + p.t2 - TAU).abs() < 1e-6).count();
    assert!(on_axis > 10);
    for p in tr.points().filter(|p| (p.t1 + p.t2 - TAU).abs() < 1e-9) {
        assert!(p.center.u1.abs() <= 1e-8, "{p:?}");
    }
}

#[test]
fn zero_set_matches_lifted_trace() {
    let fam = ellipse(2.0, 1.0);
    let c = fam.at(0.0);
    let cfg = Config::default();
    let zs = trace_zero_set(&c, 96, &cfg).unwrap();
    let tr = trace_mss(&c, 96, &cfg).unwrap();
    assert_eq!(zs.masked, tr.masked);
    let pairs: usize = zs.branches.iter().map(|b| b.pairs.len()).sum();
    assert_eq!(pairs, tr.points().count());
}

#[test]
fn small_grid_is_rejected() {
    let fam = ellipse(2.0, 1.0);
    let c = fam.at(0.0);
    assert!(matches!(trace_mss(&c, 32, &Config::default()), Err(Error::InvalidArgument { .. })));
}

#[test]
fn degenerate_curve_is_rejected() {
    let fam = curve(fourier(1.0, &[0.0], &[]), fourier(2.0, &[], &[0.0]));
    let c = fam.at(0.0);
    assert!(matches!(trace_mss(&c, 64, &Config::default()), Err(Error::Irregular { .. })));
}

fn on_ellipse(circle: &PseudoCircle, branch: Branch, theta: f64, order: usize) -> Contact {
    let p = circle.point(branch, theta).unwrap();
    Contact::new(ellipse_angle(1.2, 1.0, p), branch, theta, order)
}

/// Lifts a pair of planted contacts on `H((0,0), 1)` and returns the point.
fn lift_planted(contacts: &[Contact]) -> (MssLabel, bool, MinkVec) {
    let circle = PseudoCircle::h(MinkVec::ZERO, 1.0);
    let fam = plant_contacts(&ellipse(1.2, 1.0), &circle, contacts, 8);
    let c = fam.at(0.0);
    let ctx = MssContext::new(&c, &Config::default(), 512);
    let p = ctx.lift(contacts[0].t, contacts[1].t).unwrap();
    (p.label, p.medial, p.center)
}

#[test]
fn ordinary_bitangent_on_one_branch_is_medial() {
    let circle = PseudoCircle::h(MinkVec::ZERO, 1.0);
    let contacts = [on_ellipse(&circle, Branch::Plus, -0.6, 1), on_ellipse(&circle, Branch::Plus, 0.6, 1)];
    let (label, medial, centre) = lift_planted(&contacts);
    assert_eq!(label, MssLabel::A1A1);
    assert!(medial);
    assert!(centre.euclid_norm() <= 1e-9);
}

#[test]
fn inflection_contact_is_a_cusp() {
    let circle = PseudoCircle::h(MinkVec::ZERO, 1.0);
    let contacts = [on_ellipse(&circle, Branch::Plus, 0.0, 2).bend(0.7), on_ellipse(&circle, Branch::Minus, 0.4, 1)];
    let (label, medial, _) = lift_planted(&contacts);
    assert_eq!(label, MssLabel::A2A1);
    assert!(!medial);
}

#[test]
fn higher_contact_is_an_endpoint() {
    let circle = PseudoCircle::h(MinkVec::ZERO, 1.0);
    let contacts = [on_ellipse(&circle, Branch::Plus, 0.0, 3).bend(0.7), on_ellipse(&circle, Branch::Minus, 0.4, 1)];
    let (label, _, _) = lift_planted(&contacts);
    assert_eq!(label, MssLabel::A3);
}

#[test]
fn third_tangency_is_a_triple_point() {
    let circle = PseudoCircle::h(MinkVec::ZERO, 1.0);
    let contacts = [
        on_ellipse(&circle, Branch::Plus, -0.6, 1),
        on_ellipse(&circle, Branch::Plus, 0.6, 1),
        on_ellipse(&circle, Branch::Minus, 0.2, 1),
    ];
    let (label, medial, _) = lift_planted(&contacts);
    assert_eq!(label, MssLabel::A1Cubed);
    assert!(medial);
}

#[test]
fn trace_is_deterministic() {
    let fam = mirror_curve();
    let c = fam.at(0.0);
    let cfg = Config::default();
    let a = trace_mss(&c, 128, &cfg).unwrap();
    let b = trace_mss(&c, 128, &cfg).unwrap();
    assert_eq!(a, b);
    assert!(a.points().all(|p| p.center.is_finite() && c.point(p.t1).is_finite()));
}
