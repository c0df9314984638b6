use mss_core::contact::dist_sq_derivs;
use mss_core::transition::{
    classify_a12a2, classify_a14, classify_a1a3, classify_a22, classify_a4, scan_family, solve_event, triangle_test, Seed,
    KAPPA_PRIME_TOL,
};
use mss_core::{Branch, Config, Error, EventKind, MinkVec, ParamCurve, PseudoCircle, Subtype, TransitionEvent};
use mss_testkit::{
    a22_pair, a4_event, curve, ellipse_angle, fourier, label, plant_contacts, table_events, with_delta, Contact,
    PlantedEvent,
};

fn planted() -> Vec<PlantedEvent> {
    let mut out = table_events();
    out.extend(a22_pair().into_iter().map(|(e, _)| e));
    out
}

/// Defining equations at the event, recomputed from the curve jet: `f' = 0`
/// at every contact, equal `f`, and `f'' .. f⁽ᵏ⁾ = 0` at the contact of
/// order `k`.
fn recomputed_residual(ev: &TransitionEvent, family: &mss_core::CurveFamily, orders: &[usize]) -> f64 {
    let c = family.at(ev.u_star);
    let dds: Vec<_> = ev.t_params.iter().map(|&t| dist_sq_derivs(&c, t, ev.center)).collect();
    let mut worst: f64 = 0.0;
    for (dd, &k) in dds.iter().zip(orders) {
        for j in 1..=k {
            worst = worst.max(dd.order(j).abs());
        }
        worst = worst.max((dd.f - dds[0].f).abs());
    }
    worst
}

#[test]
fn planted_events_are_recovered_and_classified() {
    let cfg = Config::default();
    for ev in planted() {
        let got = solve_event(&ev.family, &ev.seed, &cfg).unwrap_or_else(|e| panic!("{}: {e}", ev.name));
        assert_eq!(got.kind, ev.seed.kind, "{}", ev.name);
        assert_eq!(got.subtype, Some(ev.expected), "{}", ev.name);
        assert_eq!(label(got.kind, got.subtype.unwrap()), ev.label());
        assert!(got.u_star.abs() <= 1e-8, "{}: u* = {}", ev.name, got.u_star);
        assert!((got.center - ev.circle.center).euclid_norm() <= 1e-6, "{}", ev.name);
        let s2 = got.scale * got.scale;
        assert!(got.residual <= 1e-8 * s2, "{}", ev.name);
        let orders: Vec<usize> = got.contact_orders.iter().map(|o| o.unwrap_or(1)).collect();
        assert!(recomputed_residual(&got, &ev.family, &orders) <= 1e-8 * s2, "{}", ev.name);
        assert!(!got.flags.criterion_conflict, "{}", ev.name);
    }
}

#[test]
fn perturbed_seed_converges_to_the_same_event() {
    let cfg = Config::default();
    let ev = a4_event();
    let mut seed = ev.seed.clone();
    seed.t_params[0] += 1e-2;
    seed.center = seed.center + MinkVec::new(1e-2, -1e-2);
    seed.u += 1e-2;
    let got = solve_event(&ev.family, &seed, &cfg).unwrap();
    assert!(got.u_star.abs() <= 1e-8, "{}", got.u_star);
}

#[test]
fn far_seed_fails_cleanly() {
    let cfg = Config::default();
    let ev = a4_event();
    let seed = Seed { kind: EventKind::A4, t_params: vec![2.0], center: MinkVec::ZERO, u: 0.0 };
    match solve_event(&ev.family, &seed, &cfg) {
        Err(Error::NoConvergence { .. } | Error::DegenerateJacobian { .. }) => {}
        Ok(e) => panic!("unexpected event at u = {}", e.u_star),
        Err(e) => panic!("unexpected error {e}"),
    }
    let bad = Seed { kind: EventKind::A14, t_params: vec![0.0, 1.0], center: MinkVec::ZERO, u: 0.0 };
    assert!(matches!(solve_event(&ev.family, &bad, &cfg), Err(Error::InvalidArgument { .. })));
}

#[test]
fn classification_table() {
    assert_eq!(classify_a14((3, 1)), Subtype::A);
    assert_eq!(classify_a14((1, 3)), Subtype::A);
    assert_eq!(classify_a14((2, 2)), Subtype::B);
    assert_eq!(classify_a14((4, 0)), Subtype::B);
    assert_eq!(classify_a22(0.5, 2.0, KAPPA_PRIME_TOL).unwrap(), Subtype::A);
    assert_eq!(classify_a22(-0.5, -2.0, KAPPA_PRIME_TOL).unwrap(), Subtype::A);
    assert_eq!(classify_a22(0.5, -2.0, KAPPA_PRIME_TOL).unwrap(), Subtype::B);
    assert!(matches!(classify_a22(1.0, -1.0, KAPPA_PRIME_TOL), Err(Error::NonGeneric { .. })));
    assert!(matches!(classify_a22(0.0, 1.0, KAPPA_PRIME_TOL), Err(Error::NonGeneric { .. })));
    assert_eq!(classify_a12a2(Branch::Minus, Branch::Minus), Subtype::A);
    assert_eq!(classify_a12a2(Branch::Plus, Branch::Minus), Subtype::B);
    assert_eq!(classify_a1a3(Branch::Plus, Branch::Minus), Subtype::A);
    assert_eq!(classify_a1a3(Branch::Plus, Branch::Plus), Subtype::B);
    assert_eq!(classify_a4(), Subtype::Single);
}

#[test]
fn every_table_label_is_produced() {
    let cfg = Config::default();
    let mut labels: Vec<String> = planted()
        .iter()
        .map(|ev| {
            let got = solve_event(&ev.family, &ev.seed, &cfg).unwrap();
            label(got.kind, got.subtype.unwrap())
        })
        .collect();
    labels.sort();
    labels.dedup();
    let want = [
        "A1A3(a)", "A1A3(b)", "A1_2A2(a)", "A1_2A2(b)", "A1_4(a)", "A1_4(b)", "A2_2(a)", "A2_2(b)", "A4",
    ];
    assert_eq!(labels, want);
}

#[test]
fn triangle_diagnostic_on_square_and_star() {
    let square = [MinkVec::new(0.0, 0.0), MinkVec::new(1.0, 0.0), MinkVec::new(1.0, 1.0), MinkVec::new(0.0, 1.0)];
    assert_eq!(triangle_test(square).predicts(), Subtype::B);
    let star = [MinkVec::new(0.0, 0.0), MinkVec::new(3.0, 0.0), MinkVec::new(0.0, 3.0), MinkVec::new(0.5, 0.5)];
    let t = triangle_test(star);
    assert!(t.inside[3]);
    assert_eq!(t.predicts(), Subtype::A);
}

/// Two `A2` contacts placed symmetrically about the first axis on the mirror
/// curve, with a symmetric family direction: the event centre must stay on
/// the axis.
#[test]
fn mirror_symmetric_a22_centre_on_axis() {
    let base = curve(fourier(0.0, &[1.3, 0.2, 0.05], &[]), fourier(0.0, &[], &[1.0, 0.1, -0.05]));
    let circle = PseudoCircle::s(MinkVec::new(0.2, 0.0), 0.9);
    let theta = 0.3;
    let p = circle.point(Branch::Plus, theta).unwrap();
    let t = ellipse_angle(1.3, 1.0, p);
    let contacts = [
        Contact::new(t, Branch::Plus, theta, 2).bend(0.5),
        // γ''' is odd under t ↦ -t, so the mirrored bend flips
        Contact::new(std::f64::consts::TAU - t, Branch::Minus, theta, 2).bend(-0.5),
    ];
    let planted = plant_contacts(&base, &circle, &contacts, 8);
    let slice = planted.at(0.0);
    for s in [0.4, 1.1, 2.5] {
        let (a, b) = (slice.point(s), slice.point(-s));
        assert!((a.u0 - b.u0).abs() <= 1e-9 && (a.u1 + b.u1).abs() <= 1e-9, "planted curve is not mirror symmetric");
    }
    let family = with_delta(&planted, (fourier(0.02, &[0.1, 0.2], &[]), fourier(0.0, &[], &[0.15, -0.1])));
    let seed = Seed { kind: EventKind::A22, t_params: vec![contacts[0].t, contacts[1].t], center: circle.center, u: 0.0 };
    let got = solve_event(&family, &seed, &Config::default()).unwrap();
    assert!(got.center.u1.abs() <= 1e-9, "{:?}", got.center);
    assert!(got.u_star.abs() <= 1e-8);
}

fn matches_planted(ev: &PlantedEvent, e: &TransitionEvent) -> bool {
    let tau = std::f64::consts::TAU;
    let close = |a: f64, b: f64| {
        let d = (a - b).rem_euclid(tau);
        d.min(tau - d) <= 1e-6
    };
    e.kind == ev.seed.kind
        && e.u_star.abs() <= 1e-6
        && ev.seed.t_params.iter().all(|&w| e.t_params.iter().any(|&g| close(g, w)))
}

fn scan(ev: &PlantedEvent, half_width: f64, steps: usize) -> Vec<TransitionEvent> {
    scan_family(&ev.family, -half_width, half_width, steps, 128, &Config::default()).unwrap().events
}

/// The planted event is the only one of its kind in the window.
fn one_event_near_zero(ev: &PlantedEvent, half_width: f64, steps: usize) {
    let events = scan(ev, half_width, steps);
    let hits: Vec<&TransitionEvent> = events.iter().filter(|e| e.kind == ev.seed.kind).collect();
    assert_eq!(hits.len(), 1, "{}: {:?}", ev.name, events.iter().map(|e| (e.kind, e.u_star)).collect::<Vec<_>>());
    assert!(matches_planted(ev, hits[0]), "{}: {:?}", ev.name, hits[0]);
    assert_eq!(hits[0].subtype, Some(ev.expected), "{}", ev.name);
}

#[test]
fn scan_finds_planted_a4() {
    one_event_near_zero(&a4_event(), 2e-3, 12);
}

#[test]
fn scan_finds_planted_a14() {
    // the symmetric base ellipse has other genuine A1_4 events nearby
    let ev = table_events().into_iter().find(|e| e.name == "a14_3_1").unwrap();
    let events = scan(&ev, 2e-3, 12);
    let hit = events.iter().find(|e| matches_planted(&ev, e)).expect("planted A1_4 recovered");
    assert_eq!(hit.subtype, Some(ev.expected));
}

#[test]
fn scan_finds_planted_a22() {
    for (ev, _) in a22_pair() {
        one_event_near_zero(&ev, 2e-4, 12);
    }
}

#[test]
fn scan_rejects_bad_ranges() {
    let ev = a4_event();
    let cfg = Config::default();
    assert!(scan_family(&ev.family, 1.0, 0.0, 10, 128, &cfg).is_err());
    assert!(scan_family(&ev.family, 0.0, 1.0, 1, 128, &cfg).is_err());
    assert!(scan_family(&ev.family, f64::NAN, 1.0, 10, 128, &cfg).is_err());
}
