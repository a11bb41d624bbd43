//! The Seiberg–Witten functional in first-order and expanded form.
//!
//! Expanded energy, integrated with the lattice cell volume:
//!
//! ```text
//! E = ∫ ¼|F|² + |∇φ|² + ⅛|φ|⁴ + ¼ k |φ|²
//! ```
//!
//! Gradients are Riesz representatives for the cell-weighted `L²` product, so
//! `dE(δ) = ⟨grad, δ⟩` with the same weights used for every norm here.
//!
//! * `grad_φ = 2 (∇*∇φ + ¼|φ|²φ + ¼kφ)`
//! * `grad_a = ½ d*F + ½ J`, where `J_μ(y)` collects `½ Im` of the two
//!   link terms of `|∇_μ φ|²` that contain `a_μ(y)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::dirac::{SpinorField, SpinorOneForm, Transport};
use crate::error::{Error, Result};
use crate::gauge::{
    backward, curvature, fluctuation_curvature, harmonic_curvature, split_pointwise, Connection, Curvature2Form,
    FluxMatrix, PLANES,
};
use crate::geometry::{lp_norm, Geometry, Norm};
use crate::spinor_algebra::sigma_triple;

/// A point `(A, φ)` of the configuration space.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigurationPoint {
    pub a: Connection,
    pub phi: SpinorField,
}

impl ConfigurationPoint {
    pub fn new(a: Connection, phi: SpinorField, g: &Geometry) -> Result<Self> {
        a.check(g)?;
        g.check_len(phi.len())?;
        Ok(Self { a, phi })
    }

    /// `p + t δ`.
    pub fn step(&self, t: f64, d: &Tangent, g: &Geometry) -> Result<Self> {
        let mut fluct = self.a.fluct().clone();
        for mu in 0..4 {
            for (x, y) in fluct[mu].iter_mut().zip(&d.a[mu]) {
                *x += t * y;
            }
        }
        Ok(Self {
            a: Connection::new(*self.a.flux(), fluct, g)?,
            phi: self.phi.axpy(t, &d.phi),
        })
    }
}

/// A tangent vector: spinor part and real link part.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangent {
    pub phi: SpinorField,
    pub a: [Vec<f64>; 4],
}

impl Tangent {
    pub fn zeros(g: &Geometry) -> Self {
        let n = g.n_sites();
        Self {
            phi: SpinorField::zeros(g),
            a: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        }
    }

    pub fn dot(&self, other: &Tangent, g: &Geometry) -> f64 {
        let links: f64 = (0..4)
            .map(|mu| self.a[mu].iter().zip(&other.a[mu]).map(|(x, y)| x * y).sum::<f64>())
            .sum();
        self.phi.dot(&other.phi, g) + links * g.cell_volume()
    }

    pub fn norm_sq(&self, g: &Geometry) -> f64 {
        self.dot(self, g)
    }

    pub fn link_norm(&self, g: &Geometry) -> f64 {
        let s: f64 = self.a.iter().flatten().map(|x| x * x).sum();
        (s * g.cell_volume()).sqrt()
    }

    pub fn scale(&self, s: f64) -> Tangent {
        Tangent {
            phi: self.phi.scale(num_complex::Complex64::new(s, 0.0)),
            a: self.a.clone().map(|v| v.into_iter().map(|x| x * s).collect()),
        }
    }
}

/// The four integrals of the expanded functional and derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyTerms {
    pub curvature_quarter: f64,
    pub grad_sq: f64,
    pub quartic_eighth: f64,
    pub curvature_coupling: f64,
}

impl EnergyTerms {
    pub fn total(&self) -> f64 {
        self.curvature_quarter + self.grad_sq + self.quartic_eighth + self.curvature_coupling
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    pub sw_first_order: f64,
    pub sw_energy: f64,
    pub topological_gap: f64,
    pub terms: EnergyTerms,
}

fn check(p: &ConfigurationPoint, g: &Geometry) -> Result<()> {
    p.a.check(g)?;
    g.check_len(p.phi.len())
}

fn terms_from(f: &Curvature2Form, nabla: &SpinorOneForm, phi: &SpinorField, g: &Geometry) -> EnergyTerms {
    let k = g.k_field();
    let curvature_quarter = 0.25 * g.sum_sites(|i| f.0[i].iter().map(|v| v * v).sum());
    let grad_sq = nabla.norm_sq(g);
    let quartic_eighth = 0.125 * g.sum_sites(|i| phi.0[i].norm_sq().powi(2));
    let curvature_coupling = 0.25 * g.sum_sites(|i| k[i] * phi.0[i].norm_sq());
    EnergyTerms {
        curvature_quarter,
        grad_sq,
        quartic_eighth,
        curvature_coupling,
    }
}

/// The expanded energy's four terms.
pub fn energy_terms(p: &ConfigurationPoint, g: &Geometry) -> Result<EnergyTerms> {
    check(p, g)?;
    let t = Transport::new(&p.a, g)?;
    let f = curvature(&p.a, g)?;
    Ok(terms_from(&f, &t.covariant_derivative(&p.phi)?, &p.phi, g))
}

/// `¼ ∫ |F_harmonic|²`, the sector constant of the curvature term.
pub fn harmonic_energy(flux: &FluxMatrix, g: &Geometry) -> f64 {
    0.25 * g.volume() * harmonic_curvature(flux, g).iter().map(|v| v * v).sum::<f64>()
}

/// `sw_energy - harmonic_energy`, evaluated without the large constant so
/// that small decreases stay resolvable. The cross term `½∫F_h·f` vanishes
/// identically on the periodic lattice and is kept only for safety.
pub fn excess_energy(p: &ConfigurationPoint, g: &Geometry) -> Result<f64> {
    check(p, g)?;
    let t = Transport::new(&p.a, g)?;
    let f = fluctuation_curvature(&p.a, g)?;
    let hc = harmonic_curvature(p.a.flux(), g);
    let mut terms = terms_from(&f, &t.covariant_derivative(&p.phi)?, &p.phi, g);
    terms.curvature_quarter += 0.5 * g.sum_sites(|i| f.0[i].iter().zip(&hc).map(|(x, y)| x * y).sum());
    Ok(terms.total())
}

/// `½ ∫ |F⁺ - σ(φ)|² + |Dφ|²`.
pub fn sw_first_order(p: &ConfigurationPoint, g: &Geometry) -> Result<f64> {
    check(p, g)?;
    let t = Transport::new(&p.a, g)?;
    let f = curvature(&p.a, g)?;
    let dphi = t.dirac(&p.phi)?;
    let mono = g.sum_sites(|i| {
        let (sd, _) = split_pointwise(&f.0[i]);
        (sd - sigma_triple(&p.phi.0[i])).norm_sq()
    });
    Ok(0.5 * (mono + dphi.norm_sq(g)))
}

pub fn sw_energy(p: &ConfigurationPoint, g: &Geometry) -> Result<EnergyReport> {
    let terms = energy_terms(p, g)?;
    let first = sw_first_order(p, g)?;
    let e = terms.total();
    Ok(EnergyReport {
        sw_first_order: first,
        sw_energy: e,
        topological_gap: first - e,
        terms,
    })
}

/// `sw_first_order - sw_energy`.
pub fn topological_gap(p: &ConfigurationPoint, g: &Geometry) -> Result<f64> {
    Ok(sw_energy(p, g)?.topological_gap)
}

/// `‖F⁺ - σ(φ)‖₂` and `‖Dφ‖₂`, the two monopole-equation defects.
pub fn monopole_defects(p: &ConfigurationPoint, g: &Geometry) -> Result<(f64, f64)> {
    check(p, g)?;
    let t = Transport::new(&p.a, g)?;
    let f = curvature(&p.a, g)?;
    let curv = g.sum_sites(|i| {
        let (sd, _) = split_pointwise(&f.0[i]);
        (sd - sigma_triple(&p.phi.0[i])).norm_sq()
    });
    Ok((curv.sqrt(), t.dirac(&p.phi)?.norm(g)))
}

fn spinor_el(t: &Transport, p: &ConfigurationPoint, g: &Geometry) -> Result<SpinorField> {
    let lap = t.laplacian(&p.phi)?;
    let k = g.k_field();
    Ok(SpinorField(g.map_sites(|i| {
        let s = p.phi.0[i];
        lap.0[i] + s * (0.25 * s.norm_sq() + 0.25 * k[i])
    })))
}

/// `‖∇*∇φ + ¼|φ|²φ + ¼kφ‖₂`.
pub fn el_residual_spinor(p: &ConfigurationPoint, g: &Geometry) -> Result<f64> {
    check(p, g)?;
    let t = Transport::new(&p.a, g)?;
    Ok(spinor_el(&t, p, g)?.norm(g))
}

/// `(d*F)_ν = -Σ_μ ∂⁻_μ F_{μν}`, the adjoint of the plaquette curvature.
pub fn codifferential(f: &Curvature2Form, g: &Geometry) -> [Vec<f64>; 4] {
    let h = g.spacing();
    let comp: Vec<Vec<f64>> = (0..6).map(|k| f.0.iter().map(|v| v[k]).collect()).collect();
    [0, 1, 2, 3].map(|nu| {
        g.map_sites(|i| {
            let mut s = 0.0;
            for (k, &(a, b)) in PLANES.iter().enumerate() {
                // F_{ab} contributes to ν = b via μ = a, and to ν = a via μ = b with a sign flip
                if b == nu {
                    s -= backward(&comp[k], i, a, g, &h);
                } else if a == nu {
                    s += backward(&comp[k], i, b, g, &h);
                }
            }
            s
        })
    })
}

/// Spinor current: the `a`-gradient of `∫|∇φ|²`.
fn current(t: &Transport, p: &ConfigurationPoint, nabla: &SpinorOneForm, g: &Geometry) -> [Vec<f64>; 4] {
    let links = t.links();
    let phi = &p.phi.0;
    [0, 1, 2, 3].map(|mu| {
        g.map_sites(|y| {
            let f = g.fwd(y, mu);
            let u = links[mu][y];
            let t1 = nabla.0[mu][y].inner(&phi[f].scale(u));
            let t2 = nabla.0[mu][f].inner(&phi[y].scale(u.conj()));
            // inner() conjugates its argument; Im(conj z) = -Im z
            -0.5 * (t1.im + t2.im)
        })
    })
}

/// `‖d*F + J‖₂`, with `J` twice the spinor part of the link gradient.
pub fn el_residual_connection(p: &ConfigurationPoint, g: &Geometry) -> Result<f64> {
    let grad = gradient(p, g)?;
    Ok(2.0 * grad.link_norm(g))
}

/// Analytic first variation of [`sw_energy`].
pub fn gradient(p: &ConfigurationPoint, g: &Geometry) -> Result<Tangent> {
    Ok(energy_and_gradient(p, g)?.1)
}

/// Energy terms and gradient sharing one transport and one `∇φ`.
pub fn energy_and_gradient(p: &ConfigurationPoint, g: &Geometry) -> Result<(EnergyTerms, Tangent)> {
    check(p, g)?;
    let t = Transport::new(&p.a, g)?;
    let f = curvature(&p.a, g)?;
    let nabla = t.covariant_derivative(&p.phi)?;
    let terms = terms_from(&f, &nabla, &p.phi, g);
    let lap = t.laplacian_from(&nabla)?;
    let k = g.k_field();
    let gphi = SpinorField(g.map_sites(|i| {
        let s = p.phi.0[i];
        (lap.0[i] + s * (0.25 * s.norm_sq() + 0.25 * k[i])) * 2.0
    }));
    let dsf = codifferential(&f, g);
    let j = current(&t, p, &nabla, g);
    let ga = [0, 1, 2, 3].map(|mu| dsf[mu].iter().zip(&j[mu]).map(|(x, y)| 0.5 * x + y).collect());
    Ok((terms, Tangent { phi: gphi, a: ga }))
}

/// Analytic and central finite-difference directional derivatives of the
/// energy along `d`.
pub fn directional_check(p: &ConfigurationPoint, d: &Tangent, eps: f64, g: &Geometry) -> Result<(f64, f64)> {
    let analytic = gradient(p, g)?.dot(d, g);
    let plus = energy_terms(&p.step(eps, d, g)?, g)?.total();
    let minus = energy_terms(&p.step(-eps, d, g)?, g)?.total();
    Ok((analytic, (plus - minus) / (2.0 * eps)))
}

/// Quantities entering the a-priori bounds on solutions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub volume: f64,
    pub k_minus: f64,
    pub sup_norm: f64,
    pub sup_bound_holds: bool,
    pub l2_norm: f64,
    pub l4_norm: f64,
    /// `v^{1/4} ‖φ‖₄ - ‖φ‖₂`, non-negative by Hölder.
    pub holder_slack: f64,
    pub sw: f64,
    /// `f(x) = x² - 8v k⁻² x - 8v SW` at `x = ‖φ‖₂²`.
    pub quadratic_value: f64,
    /// `32 v (2 v k⁻⁴ + SW)`.
    pub discriminant: f64,
    pub root_low: Option<f64>,
    pub root_high: Option<f64>,
    pub alpha_square: i64,
    /// `max{2π²α², -2v k⁻⁴}`.
    pub lower_bound: f64,
    pub lower_bound_holds: bool,
}

pub fn bound_suite(p: &ConfigurationPoint, g: &Geometry, alpha_square: i64) -> Result<BoundReport> {
    bound_suite_with_tolerance(p, g, alpha_square, 1e-9)
}

/// [`bound_suite`] with an explicit absolute tolerance for the two flags.
pub fn bound_suite_with_tolerance(
    p: &ConfigurationPoint,
    g: &Geometry,
    alpha_square: i64,
    tol: f64,
) -> Result<BoundReport> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidOptions(format!("tolerance {tol} must be non-negative")));
    }
    let sw = energy_terms(p, g)?.total();
    let v = g.volume();
    let km = g.k_minus();
    let modulus = p.phi.modulus();
    let sup_norm = lp_norm(&modulus, Norm::Sup, g)?;
    let l2 = lp_norm(&modulus, Norm::L2, g)?;
    let l4 = lp_norm(&modulus, Norm::L4, g)?;
    let x = l2 * l2;
    let b = 8.0 * v * km * km;
    let quadratic_value = x * x - b * x - 8.0 * v * sw;
    let discriminant = 32.0 * v * (2.0 * v * km.powi(4) + sw);
    let (root_low, root_high) = if discriminant >= 0.0 {
        let s = discriminant.sqrt();
        (Some(0.5 * (b - s)), Some(0.5 * (b + s)))
    } else {
        (None, None)
    };
    let lower_bound = (2.0 * PI * PI * alpha_square as f64).max(-2.0 * v * km.powi(4));
    Ok(BoundReport {
        volume: v,
        k_minus: km,
        sup_norm,
        sup_bound_holds: sup_norm <= km + tol,
        l2_norm: l2,
        l4_norm: l4,
        holder_slack: v.powf(0.25) * l4 - l2,
        sw,
        quadratic_value,
        discriminant,
        root_low,
        root_high,
        alpha_square,
        lower_bound,
        lower_bound_holds: sw >= lower_bound - tol,
    })
}
