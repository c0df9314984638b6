use std::f64::consts::{FRAC_PI_4, PI, TAU};

use mss_core::contact::caustic_point;
use mss_core::curve::{
    curvature, curvature_arclength_derivative, evolute, lightlike_points, tangent_square, unit_tangent_normal,
    PseudoCircleArc,
};
use mss_core::{Branch, Error, FourierComponent, MinkVec, ParamCurve, PseudoCircle};
use mss_testkit::{ellipse, fd, fd5, fourier, perturbed_circle, test_curves, unit_circle};
use proptest::prelude::*;

/// Pseudo-circle through three points, from the two linear equations
/// `<p_i, p_i> - 2 <p_i, c>` equal for all `i`.
fn circle_through(p: [MinkVec; 3]) -> (MinkVec, f64) {
    let row = |a: MinkVec, b: MinkVec| {
        // 2<b - a, c> = <b,b> - <a,a>, with <x, c> = -x0 c0 + x1 c1
        let d = b - a;
        (-2.0 * d.u0, 2.0 * d.u1, b.dot(b) - a.dot(a))
    };
    let (a11, a12, b1) = row(p[0], p[1]);
    let (a21, a22, b2) = row(p[0], p[2]);
    let det = a11 * a22 - a12 * a21;
    let c = MinkVec::new((b1 * a22 - a12 * b2) / det, (a11 * b2 - b1 * a21) / det);
    let e = p[0] - c;
    (c, e.dot(e))
}

fn component() -> impl Strategy<Value = FourierComponent> {
    // amplitudes fall off like 1/k² so sixth derivatives stay moderate
    (-1.0f64..1.0, prop::collection::vec(-1.0f64..1.0, 3), prop::collection::vec(-1.0f64..1.0, 3)).prop_map(
        |(c0, cs, ss)| {
            let decay = |v: Vec<f64>| v.iter().enumerate().map(|(k, a)| a / ((k + 1) * (k + 1)) as f64).collect();
            FourierComponent::new(c0, decay(cs), decay(ss)).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fourier_derivatives_match_differences(comp in component(), t in 0.0f64..TAU) {
        let h = 1e-4;
        for k in 1..=4 {
            let exact = comp.eval(t, k);
            let approx = fd(|s| comp.eval(s, k - 1), t, h);
            prop_assert!((exact - approx).abs() <= 1e-6 * exact.abs().max(1.0), "k={} {} vs {}", k, exact, approx);
        }
    }

    #[test]
    fn fourier_is_periodic(comp in component(), t in 0.0f64..TAU) {
        for k in 0..=5 {
            prop_assert!((comp.eval(t, k) - comp.eval(t + TAU, k)).abs() <= 1e-12);
        }
    }
}

#[test]
fn curvature_of_pseudo_circles_is_inverse_radius() {
    for r in [0.5, 1.0, 2.0] {
        for circle in [PseudoCircle::h(MinkVec::new(0.4, -1.0), r), PseudoCircle::s(MinkVec::new(-2.0, 0.5), r)] {
            for branch in [Branch::Plus, Branch::Minus] {
                let arc = PseudoCircleArc { circle, branch, speed: 0.7 };
                for i in 0..32 {
                    let t = -2.0 + 4.0 * i as f64 / 31.0;
                    let k = curvature(&arc, t).unwrap();
                    assert!((k.abs() - 1.0 / r).abs() <= 1e-9, "r={r} t={t} kappa={k}");
                    // oracle: the circle through three nearby curve points is exact on an arc
                    let h = 0.05;
                    let (c, r2) = circle_through([arc.point(t - h), arc.point(t), arc.point(t + h)]);
                    assert!((1.0 / r2.abs().sqrt() - k.abs()).abs() <= 1e-9);
                    assert!((c - circle.center).euclid_norm() <= 1e-9);
                    assert!(curvature_arclength_derivative(&arc, t).unwrap().abs() <= 1e-8);
                }
            }
        }
    }
}

#[test]
fn unit_circle_curvature() {
    let fam = unit_circle();
    let c = fam.at(0.0);
    assert!((curvature(&c, 0.0).unwrap() + 1.0).abs() <= 1e-12);
    assert!(matches!(curvature(&c, FRAC_PI_4), Err(Error::LightlikeTangent { .. })));
    assert!(curvature_arclength_derivative(&c, 0.0).unwrap().abs() <= 1e-12);
}

#[test]
fn kappa_prime_matches_differences() {
    let fam = perturbed_circle();
    let c = fam.at(0.0);
    let light = lightlike_points(&c, 4096, 1e-12);
    for i in 0..40 {
        let t = 0.05 + TAU * i as f64 / 40.0;
        if light.iter().any(|l| (t - l).abs() < 0.1 || (t - l).abs() > TAU - 0.1) {
            continue;
        }
        let exact = curvature_arclength_derivative(&c, t).unwrap();
        let speed = c.velocity(t).dot(c.velocity(t)).abs().sqrt();
        let approx = fd5(|s| curvature(&c, s).unwrap(), t, 1e-3) / speed;
        assert!((exact - approx).abs() <= 1e-6 * exact.abs().max(1.0), "t={t} {exact} vs {approx}");
    }
}

#[test]
fn frame_is_orthonormal() {
    for (_, fam) in test_curves() {
        let c = fam.at(0.0);
        for i in 0..200 {
            let t = TAU * (i as f64 + 0.37) / 200.0;
            let Ok((tan, nor)) = unit_tangent_normal(&c, t) else { continue };
            assert!(tan.dot(nor).abs() <= 1e-12);
            assert!((tan.dot(tan).abs() - 1.0).abs() <= 1e-12);
            assert!((tan.dot(tan) + nor.dot(nor)).abs() <= 1e-12);
        }
    }
}

#[test]
fn evolute_of_arc_is_centre() {
    let circle = PseudoCircle::s(MinkVec::new(3.0, 4.0), 1.0);
    let arc = PseudoCircleArc { circle, branch: Branch::Plus, speed: 1.0 };
    for t in [-1.0, 0.0, 0.3, 1.7] {
        assert!((evolute(&arc, t).unwrap() - circle.center).euclid_norm() <= 1e-9);
    }
}

#[test]
fn evolute_equals_caustic() {
    for (name, fam) in test_curves() {
        let c = fam.at(0.0);
        let mut checked = 0;
        for i in 0..200 {
            let t = TAU * (i as f64 + 0.5) / 200.0;
            let Ok(e) = evolute(&c, t) else { continue };
            let k = caustic_point(&c, t).unwrap();
            assert!((e - k).euclid_norm() <= 1e-9 * e.euclid_norm().max(1.0), "{name} t={t}");
            checked += 1;
        }
        assert!(checked > 150, "{name}");
    }
}

#[test]
fn lightlike_points_of_circle_and_ellipse() {
    let fam = unit_circle();
    let circle = fam.at(0.0);
    let got = lightlike_points(&circle, 4096, 1e-12);
    let want = [FRAC_PI_4, 3.0 * FRAC_PI_4, 5.0 * FRAC_PI_4, 7.0 * FRAC_PI_4];
    assert_eq!(got.len(), 4);
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() <= 1e-10);
    }

    // -4 sin² t + cos² t = 0, so tan t = ±1/2
    let fam = ellipse(2.0, 1.0);
    let el = fam.at(0.0);
    let got = lightlike_points(&el, 4096, 1e-12);
    let a = 0.5f64.atan();
    let want = [a, PI - a, PI + a, TAU - a];
    assert_eq!(got.len(), 4);
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() <= 1e-10, "{g} vs {w}");
    }
}

#[test]
fn closed_curves_have_lightlike_points() {
    for (name, fam) in test_curves() {
        let c = fam.at(0.0);
        let pts = lightlike_points(&c, 4096, 1e-12);
        assert!(pts.len() >= 4, "{name}: {pts:?}");
        for t in pts {
            let v = c.velocity(t);
            assert!(tangent_square(&c, t).abs() <= 1e-10 * v.euclid_norm2());
        }
    }
}

#[test]
fn caustic_touches_curve_at_lightlike_points() {
    for (name, fam) in test_curves() {
        let c = fam.at(0.0);
        for t in lightlike_points(&c, 4096, 1e-12) {
            let k = caustic_point(&c, t).unwrap();
            assert!((k - c.point(t)).euclid_norm() <= 1e-9, "{name} t={t}");
            let h = 1e-5;
            let d = caustic_point(&c, t + h).unwrap() - caustic_point(&c, t - h).unwrap();
            let v = c.velocity(t);
            let angle = (v.det(d) / (v.euclid_norm() * d.euclid_norm())).asin().abs();
            assert!(angle <= 1e-4, "{name} t={t} angle={angle}");
        }
    }
}

#[test]
fn fourier_rejects_bad_coefficients() {
    assert!(FourierComponent::new(f64::NAN, vec![], vec![]).is_err());
    assert!(FourierComponent::new(0.0, vec![f64::INFINITY], vec![]).is_err());
    assert!(FourierComponent::new(1.0, vec![], vec![]).is_err());
    let _ = fourier(0.0, &[1.0], &[]);
}
