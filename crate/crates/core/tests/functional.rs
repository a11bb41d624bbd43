use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use swtk_core::dirac::SpinorField;
use swtk_core::functional::{
    bound_suite, directional_check, el_residual_connection, el_residual_spinor, gradient, sw_energy, sw_first_order,
    ConfigurationPoint, Tangent,
};
use swtk_core::gauge::{apply_gauge, random_fluctuation, Connection, FluxMatrix, GaugeTransform};
use swtk_core::geometry::{Geometry, KSpec};

fn bumpy() -> Geometry {
    let k = KSpec::Bump {
        center: [0.5; 4],
        radius: 0.4,
        depth: 2.0,
    };
    Geometry::new([4, 5, 4, 4], [0.25, 0.2, 0.25, 0.25], &k).unwrap()
}

fn point(g: &Geometry, flux: [i64; 6], rng: &mut ChaCha8Rng) -> ConfigurationPoint {
    let a = Connection::new(FluxMatrix::new(flux).unwrap(), random_fluctuation(g, rng, 0.4), g).unwrap();
    ConfigurationPoint::new(a, SpinorField::random(g, rng, 0.6), g).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn functionals_are_gauge_invariant() {
    let g = bumpy();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let p = point(&g, [2, 0, 0, 0, -2, 2], &mut rng);
    let e0 = sw_energy(&p, &g).unwrap();
    let s0 = el_residual_spinor(&p, &g).unwrap();
    let c0 = el_residual_connection(&p, &g).unwrap();
    for _ in 0..10 {
        let t = GaugeTransform::random(&g, &mut rng, 2.5, 3);
        let (a, phi) = apply_gauge(&t, &p.a, &p.phi, &g).unwrap();
        let q = ConfigurationPoint::new(a, phi, &g).unwrap();
        let e = sw_energy(&q, &g).unwrap();
        assert!(rel(e.sw_energy, e0.sw_energy) < 1e-10);
        assert!(rel(e.sw_first_order, e0.sw_first_order) < 1e-10);
        assert!(rel(el_residual_spinor(&q, &g).unwrap(), s0) < 1e-10);
        assert!(rel(el_residual_connection(&q, &g).unwrap(), c0) < 1e-10);
    }
}

#[test]
fn gradient_matches_central_differences() {
    let g = bumpy();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10 {
        let p = point(&g, [0, 2, 0, 0, 2, 0], &mut rng);
        for _ in 0..10 {
            let d = Tangent {
                phi: SpinorField::random(&g, &mut rng, 1.0),
                a: random_fluctuation(&g, &mut rng, 1.0),
            };
            let (an, fd) = directional_check(&p, &d, 1e-5, &g).unwrap();
            assert!(rel(an, fd) <= 1e-6, "{an} vs {fd}");
        }
    }
}

#[test]
fn connection_residual_matches_curvature_gradient_at_zero_spinor() {
    // φ = 0: the residual is ‖d*F‖ = 2‖grad of ¼‖F‖²‖
    let g = bumpy();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut p = point(&g, [2, 0, 0, 0, 0, 0], &mut rng);
    p.phi = SpinorField::zeros(&g);
    let grad = gradient(&p, &g).unwrap();
    let r = el_residual_connection(&p, &g).unwrap();
    assert!(rel(r, 2.0 * grad.link_norm(&g)) < 1e-12);
    let d = Tangent {
        phi: SpinorField::zeros(&g),
        a: grad.a.clone(),
    };
    let (an, fd) = directional_check(&p, &d, 1e-5, &g).unwrap();
    assert!(rel(an, fd) < 1e-6);
    assert!(rel(an, 0.25 * r * r) < 1e-10);
}

#[test]
fn first_order_never_negative() {
    let g = bumpy();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let p = point(&g, [2, 2, 0, 0, 0, 2], &mut rng);
        assert!(sw_first_order(&p, &g).unwrap() >= 0.0);
    }
}

#[test]
fn energy_terms_sum_and_signs() {
    let g = bumpy();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let p = point(&g, [0, 0, 2, 2, 0, 0], &mut rng);
    let r = sw_energy(&p, &g).unwrap();
    let t = r.terms;
    assert!(t.curvature_quarter >= 0.0 && t.grad_sq >= 0.0 && t.quartic_eighth >= 0.0);
    assert_eq!(r.sw_energy, t.total());
    assert_eq!(r.topological_gap, r.sw_first_order - r.sw_energy);
}

#[test]
fn holder_slack_is_non_negative() {
    let g = bumpy();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..10 {
        let p = point(&g, [0; 6], &mut rng);
        let b = bound_suite(&p, &g, 0).unwrap();
        assert!(b.holder_slack >= -1e-12);
        // f(x) ≤ 0 forces real roots bracketing x
        let x = b.l2_norm * b.l2_norm;
        if b.quadratic_value <= 0.0 {
            let (lo, hi) = (b.root_low.unwrap(), b.root_high.unwrap());
            assert!(lo - 1e-9 <= x && x <= hi + 1e-9);
        }
    }
}

#[test]
fn harmonic_sector_energies() {
    let g = Geometry::new([4; 4], [0.25; 4], &KSpec::Constant(0.0)).unwrap();
    let n = FluxMatrix::new([2, 0, 0, 0, 0, 0]).unwrap();
    let p = ConfigurationPoint::new(Connection::harmonic(n, &g), SpinorField::zeros(&g), &g).unwrap();
    let r = sw_energy(&p, &g).unwrap();
    assert!(rel(r.sw_energy, 4.0 * PI * PI) < 1e-13);
    assert!(rel(r.sw_first_order, 4.0 * PI * PI) < 1e-13);
}
