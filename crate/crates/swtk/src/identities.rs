//! The identity suite behind `swtk identities`.
//!
//! Each check owns a ChaCha stream derived from the run seed, so changing one
//! sample count leaves every other check's inputs untouched.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use serde_json::{json, Value};

use swtk_core::dirac::{smooth_test_field, weitzenbock_residual_scaled, SpinorField};
use swtk_core::functional::{
    directional_check, el_residual_connection, el_residual_spinor, sw_energy, sw_first_order, topological_gap,
    ConfigurationPoint, Tangent,
};
use swtk_core::gauge::{
    alpha_square_from_flux, apply_gauge, chern_square, curvature, random_fluctuation, reassemble, split_pointwise,
    wedge_density, Connection, FluxMatrix, GaugeTransform,
};
use swtk_core::geometry::{lp_norm, Geometry, KSpec, Norm};
use swtk_core::spinor_algebra::{
    apply_endo, clifford_sd_scaled, endo_inner, sd_pairing, sigma, SelfDualTriple, Spinor, C_RHO,
};

use crate::config::ExperimentConfig;
use crate::report::Metadata;

pub const CHERN_FLUXES: usize = 20;
pub const HOLDER_FIELDS: usize = 500;
pub const GAUGE_TRANSFORMS: usize = 50;
pub const GRADIENT_POINTS: usize = 10;
pub const GRADIENT_DIRECTIONS: usize = 10;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    /// Informational checks are reported but never fail the run.
    pub gating: bool,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub details: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct SupBoundBranch {
    pub k_min: f64,
    pub k_minus: f64,
    /// `k_minus_zero` when the scalar curvature is non-negative everywhere.
    pub branch: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub metadata: Metadata,
    pub config: ExperimentConfig,
    pub all_passed: bool,
    pub sup_bound: SupBoundBranch,
    pub checks: Vec<Check>,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(id);
    r
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn random_spinor<R: Rng>(rng: &mut R) -> Spinor {
    Spinor::new(
        Complex64::new(gaussian(rng), gaussian(rng)),
        Complex64::new(gaussian(rng), gaussian(rng)),
    )
}

fn random_flux<R: Rng>(rng: &mut R) -> FluxMatrix {
    let n: [i64; 6] = std::array::from_fn(|_| 2 * rng.random_range(-2i64..=2));
    FluxMatrix::new(n).expect("even by construction")
}

fn check(name: &'static str, measured: f64, tolerance: f64, details: Value) -> Check {
    Check {
        name,
        gating: true,
        passed: measured <= tolerance,
        measured,
        tolerance,
        details,
    }
}

/// Traceless σ, `|σ(φ)|² = |φ|⁴/4` and `σ(φ)φ = ½|φ|²φ`.
pub fn sigma_checks(n: usize, seed: u64) -> Vec<Check> {
    let mut rng = stream(seed, 1);
    let (mut trace, mut norm, mut eigen) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..n {
        let phi = random_spinor(&mut rng);
        let s = sigma(&phi);
        let r2 = phi.norm_sq();
        trace = trace.max(s.trace().norm() / r2);
        norm = norm.max(rel(endo_inner(&s, &s), 0.25 * r2 * r2));
        let lhs = apply_endo(&s, &phi);
        let rhs = phi.scale(Complex64::new(0.5 * r2, 0.0));
        let d = Spinor::new(lhs.c1 - rhs.c1, lhs.c2 - rhs.c2);
        eigen = eigen.max(d.norm() / rhs.norm());
    }
    vec![
        check("sigma_traceless", trace, 1e-12, json!({ "samples": n })),
        check("sigma_norm", norm, 1e-12, json!({ "samples": n })),
        check("sigma_eigenvector", eigen, 1e-12, json!({ "samples": n })),
    ]
}

/// `⟨ω, σ(φ)⟩ = ½ ⟨ρ(ω)φ, φ⟩`, with `ρ` scaled by `scale`.
pub fn clifford_pairing(n: usize, seed: u64, scale: f64) -> Check {
    let mut rng = stream(seed, 2);
    let c_rho = C_RHO * scale;
    let (mut worst, mut imag) = (0.0f64, 0.0f64);
    for _ in 0..n {
        let phi = random_spinor(&mut rng);
        let w = SelfDualTriple([gaussian(&mut rng), gaussian(&mut rng), gaussian(&mut rng)]);
        let lhs = sd_pairing(&w, &sigma(&phi));
        let rho_phi = apply_endo(&clifford_sd_scaled(&w, c_rho), &phi);
        let z = rho_phi.inner(&phi);
        let s = w.norm_sq().sqrt() * phi.norm_sq();
        worst = worst.max((lhs - 0.5 * z.re).abs() / s);
        imag = imag.max(z.im.abs() / s);
    }
    check(
        "clifford_pairing",
        worst.max(imag),
        1e-12,
        json!({ "samples": n, "c_rho": c_rho, "pairing_error": worst, "imaginary_part": imag }),
    )
}

/// Pointwise self-dual/anti-self-dual split of random 2-forms.
pub fn sd_split(n: usize, seed: u64) -> Check {
    let mut rng = stream(seed, 3);
    let (mut recon, mut pyth, mut wedge) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..n {
        let f: [f64; 6] = std::array::from_fn(|_| gaussian(&mut rng));
        let total: f64 = f.iter().map(|x| x * x).sum();
        let (sd, asd) = split_pointwise(&f);
        let back = reassemble(&sd, &asd);
        recon = recon.max(f.iter().zip(&back).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / total.sqrt());
        pyth = pyth.max((sd.norm_sq() + asd.norm_sq() - total).abs() / total);
        wedge = wedge.max((sd.norm_sq() - asd.norm_sq() - wedge_density(&f)).abs() / total);
    }
    check(
        "sd_split",
        recon.max(pyth).max(wedge),
        1e-12,
        json!({ "samples": n, "reconstruction": recon, "norm_sum": pyth, "wedge_density": wedge }),
    )
}

/// Integrated `F ∧ F / 4π²` against the flux formula, with and without
/// random link fluctuations.
pub fn chern_weil(g: &Geometry, seed: u64) -> Check {
    let mut rng = stream(seed, 4);
    let (mut harm, mut fluct) = (0.0f64, 0.0f64);
    let mut rows = Vec::new();
    for _ in 0..CHERN_FLUXES {
        let n = random_flux(&mut rng);
        let expect = alpha_square_from_flux(&n) as f64;
        let h = chern_square(&curvature(&Connection::harmonic(n, g), g).unwrap(), g).unwrap();
        let a = Connection::new(n, random_fluctuation(g, &mut rng, 0.5), g).unwrap();
        let f = chern_square(&curvature(&a, g).unwrap(), g).unwrap();
        let scale = expect.abs().max(1.0);
        harm = harm.max((h - expect).abs() / scale);
        fluct = fluct.max((f - expect).abs() / scale);
        rows.push(json!({ "flux": n.entries(), "alpha_square": expect, "harmonic": h, "fluctuated": f }));
    }
    check(
        "chern_weil",
        harm.max(fluct),
        1e-10,
        json!({ "harmonic_error": harm, "fluctuated_error": fluct, "fluxes": rows }),
    )
}

fn slope(hs: &[f64], rs: &[f64]) -> f64 {
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

/// Observed order of the Weitzenböck defect on unit tori of the given sides.
/// The flat sector has no defect at all, so it falls back to `n12 = 2`.
pub fn weitzenbock_order(flux: &FluxMatrix, grids: &[usize], c_rho: f64) -> (Vec<f64>, f64) {
    let n = if flux.entries() == [0; 6] {
        FluxMatrix::new([2, 0, 0, 0, 0, 0]).unwrap()
    } else {
        *flux
    };
    let mut hs = Vec::new();
    let mut rs = Vec::new();
    for &side in grids {
        let h = 1.0 / side as f64;
        let g = Geometry::new([side; 4], [h; 4], &KSpec::Constant(0.0)).unwrap();
        let a = Connection::harmonic(n, &g);
        let phi = smooth_test_field(&n, &g);
        hs.push(h);
        rs.push(weitzenbock_residual_scaled(&a, &phi, &g, c_rho).unwrap() / phi.norm(&g));
    }
    let order = slope(&hs, &rs);
    (rs, order)
}

fn weitzenbock(c: &ExperimentConfig, flux: &FluxMatrix) -> Check {
    let c_rho = C_RHO * c.clifford_scale;
    let (rs, order) = weitzenbock_order(flux, &c.weitzenbock_grids, c_rho);
    let dev = (order - 2.0).abs();
    let mut ck = check(
        "weitzenbock_order",
        dev,
        0.3,
        json!({ "grids": c.weitzenbock_grids, "relative_defects": rs, "observed_order": order, "c_rho": c_rho }),
    );
    ck.passed = order.is_finite() && dev <= 0.3;
    ck
}

/// `v^{1/4} ‖φ‖₄ ≥ ‖φ‖₂` on random fields.
pub fn holder(g: &Geometry, seed: u64) -> Check {
    let mut rng = stream(seed, 5);
    let v = g.volume();
    let mut worst = 0.0f64;
    let mut min_slack = f64::INFINITY;
    for i in 0..HOLDER_FIELDS {
        let amp = 0.1 * (1 + i % 20) as f64;
        let m = SpinorField::random(g, &mut rng, amp).modulus();
        let l2 = lp_norm(&m, Norm::L2, g).unwrap();
        let l4 = lp_norm(&m, Norm::L4, g).unwrap();
        let s = (v.powf(0.25) * l4 - l2) / l2;
        min_slack = min_slack.min(s);
        worst = worst.max(-s);
    }
    check(
        "holder",
        worst,
        1e-12,
        json!({ "fields": HOLDER_FIELDS, "min_relative_slack": min_slack }),
    )
}

fn random_point<R: Rng>(g: &Geometry, flux: FluxMatrix, rng: &mut R) -> ConfigurationPoint {
    let a = Connection::new(flux, random_fluctuation(g, rng, 0.4), g).unwrap();
    ConfigurationPoint::new(a, SpinorField::random(g, rng, 0.6), g).unwrap()
}

/// Invariance of both functionals and both residuals under random gauge
/// transformations with winding.
pub fn gauge_invariance(g: &Geometry, flux: FluxMatrix, seed: u64, transforms: usize) -> Check {
    let mut rng = stream(seed, 6);
    let p = random_point(g, flux, &mut rng);
    let e0 = sw_energy(&p, g).unwrap();
    let s0 = el_residual_spinor(&p, g).unwrap();
    let c0 = el_residual_connection(&p, g).unwrap();
    let mut worst = [0.0f64; 4];
    for _ in 0..transforms {
        let t = GaugeTransform::random(g, &mut rng, 2.5, 3);
        let (a, phi) = apply_gauge(&t, &p.a, &p.phi, g).unwrap();
        let q = ConfigurationPoint::new(a, phi, g).unwrap();
        let e = sw_energy(&q, g).unwrap();
        let now = [
            rel(sw_first_order(&q, g).unwrap(), e0.sw_first_order),
            rel(e.sw_energy, e0.sw_energy),
            rel(el_residual_spinor(&q, g).unwrap(), s0),
            rel(el_residual_connection(&q, g).unwrap(), c0),
        ];
        for (w, x) in worst.iter_mut().zip(now) {
            *w = w.max(x);
        }
    }
    check(
        "gauge_invariance",
        worst.iter().cloned().fold(0.0, f64::max),
        1e-10,
        json!({
            "transforms": transforms,
            "sw_first_order": worst[0],
            "sw_energy": worst[1],
            "el_residual_spinor": worst[2],
            "el_residual_connection": worst[3],
        }),
    )
}

/// Analytic directional derivative against central differences.
pub fn gradient_check(g: &Geometry, flux: FluxMatrix, seed: u64, points: usize, directions: usize) -> Check {
    let mut rng = stream(seed, 7);
    let mut worst = 0.0f64;
    for _ in 0..points {
        let p = random_point(g, flux, &mut rng);
        for _ in 0..directions {
            let d = Tangent {
                phi: SpinorField::random(g, &mut rng, 1.0),
                a: random_fluctuation(g, &mut rng, 1.0),
            };
            let (an, fd) = directional_check(&p, &d, 1e-5, g).unwrap();
            worst = worst.max(rel(an, fd));
        }
    }
    check(
        "gradient",
        worst,
        1e-6,
        json!({ "pairs": points * directions, "fd_step": 1e-5 }),
    )
}

/// `k ≡ -1`, `φ ≡ (1, 0)`, flat connection solves both equations.
pub fn constant_solution(dims: [usize; 4], spacing: [f64; 4]) -> Check {
    let g = Geometry::new(dims, spacing, &KSpec::Constant(-1.0)).unwrap();
    let p = ConfigurationPoint::new(
        Connection::flat(&g),
        SpinorField::constant(&g, Spinor::from_re(1.0, 0.0)),
        &g,
    )
    .unwrap();
    let s = el_residual_spinor(&p, &g).unwrap();
    let c = el_residual_connection(&p, &g).unwrap();
    check(
        "constant_solution",
        s.max(c),
        1e-12,
        json!({ "el_residual_spinor": s, "el_residual_connection": c }),
    )
}

/// `SW - E` at the harmonic point with `φ = 0`, beside `-2π²α²`. Reported,
/// never gating.
pub fn gap_report(g: &Geometry, flux: FluxMatrix) -> Check {
    let p = ConfigurationPoint::new(Connection::harmonic(flux, g), SpinorField::zeros(g), g).unwrap();
    let gap = topological_gap(&p, g).unwrap();
    let a2 = alpha_square_from_flux(&flux);
    let expected = -2.0 * PI * PI * a2 as f64;
    Check {
        name: "topological_gap",
        gating: false,
        passed: (gap - expected).abs() <= 1e-9 * expected.abs().max(1.0),
        measured: (gap - expected).abs(),
        tolerance: 1e-9 * expected.abs().max(1.0),
        details: json!({ "alpha_square": a2, "gap": gap, "expected": expected }),
    }
}

pub fn run(c: &ExperimentConfig) -> Result<IdentityReport, crate::CliError> {
    let g = c.geometry()?;
    let flux = c.flux_matrix()?;
    let seed = c.seed;
    let mut checks = sigma_checks(c.samples, seed);
    checks.push(clifford_pairing(c.samples, seed, c.clifford_scale));
    checks.push(sd_split(c.samples, seed));
    checks.push(chern_weil(&g, seed));
    log::info!("weitzenbock grids {:?}", c.weitzenbock_grids);
    checks.push(weitzenbock(c, &flux));
    checks.push(holder(&g, seed));
    checks.push(gauge_invariance(&g, flux, seed, GAUGE_TRANSFORMS));
    checks.push(gradient_check(&g, flux, seed, GRADIENT_POINTS, GRADIENT_DIRECTIONS));
    checks.push(constant_solution(c.dims, c.spacing));
    checks.push(gap_report(&g, flux));
    for ck in &checks {
        log::info!(
            "{} measured {:e} tol {:e} passed {}",
            ck.name,
            ck.measured,
            ck.tolerance,
            ck.passed
        );
    }
    let k_minus = g.k_minus();
    let sup_bound = SupBoundBranch {
        k_min: g.k_min(),
        k_minus,
        branch: if g.k_min() >= 0.0 {
            "k_minus_zero"
        } else {
            "k_minus_sqrt"
        },
    };
    let all_passed = checks.iter().all(|ck| ck.passed || !ck.gating);
    Ok(IdentityReport {
        metadata: Metadata::new("identities", seed, c.parallel),
        config: c.clone(),
        all_passed,
        sup_bound,
        checks,
    })
}
