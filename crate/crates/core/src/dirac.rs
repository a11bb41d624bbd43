//! Covariant derivative, Dirac operator and connection Laplacian.
//!
//! `∇_μ φ(x) = (U_μ(x) φ(x+μ) - U_μ(x-μ)^* φ(x-μ)) / 2h_μ` is skew-adjoint
//! for the discrete `L²` product. With the chiral matrices
//! `Γ = (I, iZ, iX, iY)` the operator `D φ = Σ Γ_μ ∇_μ φ` has adjoint
//! `D* ψ = -Σ Γ_μ† ∇_μ ψ`, and `D*D - ∇*∇` reproduces `ρ(F⁺)/2` with the
//! Clifford constant from [`crate::spinor_algebra::C_RHO`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::gauge::{curvature, split_pointwise, Connection, FluxMatrix, PLANES};
use crate::geometry::Geometry;
use crate::spinor_algebra::{apply_endo, clifford_sd_scaled, Spinor, C_RHO};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// One spinor per lattice site.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField(pub Vec<Spinor>);

/// `∇_μ φ` for the four lattice directions.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorOneForm(pub [Vec<Spinor>; 4]);

impl SpinorField {
    pub fn zeros(g: &Geometry) -> Self {
        Self(vec![Spinor::ZERO; g.n_sites()])
    }

    pub fn constant(g: &Geometry, s: Spinor) -> Self {
        Self(vec![s; g.n_sites()])
    }

    /// Independent complex Gaussian entries with the given standard deviation.
    pub fn random<R: Rng>(g: &Geometry, rng: &mut R, amplitude: f64) -> Self {
        let mut c = || {
            Complex64::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            ) * amplitude
        };
        Self((0..g.n_sites()).map(|_| Spinor::new(c(), c())).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `∫ ⟨φ, ψ⟩ dv`, conjugate-linear in `other`.
    pub fn inner(&self, other: &SpinorField, g: &Geometry) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.inner(b)).sum::<Complex64>() * g.cell_volume()
    }

    /// Real part of [`SpinorField::inner`].
    pub fn dot(&self, other: &SpinorField, g: &Geometry) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.dot(b)).sum::<f64>() * g.cell_volume()
    }

    pub fn norm_sq(&self, g: &Geometry) -> f64 {
        self.0.iter().map(Spinor::norm_sq).sum::<f64>() * g.cell_volume()
    }

    pub fn norm(&self, g: &Geometry) -> f64 {
        self.norm_sq(g).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().map(Spinor::norm).fold(0.0, f64::max)
    }

    /// Pointwise `|φ(x)|`.
    pub fn modulus(&self) -> Vec<f64> {
        self.0.iter().map(Spinor::norm).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(Spinor::is_finite)
    }

    /// `self + t * other`.
    pub fn axpy(&self, t: f64, other: &SpinorField) -> SpinorField {
        SpinorField(self.0.iter().zip(&other.0).map(|(a, b)| *a + *b * t).collect())
    }

    pub fn sub(&self, other: &SpinorField) -> SpinorField {
        self.axpy(-1.0, other)
    }

    pub fn scale(&self, s: Complex64) -> SpinorField {
        SpinorField(self.0.iter().map(|a| a.scale(s)).collect())
    }
}

impl SpinorOneForm {
    pub fn norm_sq(&self, g: &Geometry) -> f64 {
        self.0.iter().flatten().map(Spinor::norm_sq).sum::<f64>() * g.cell_volume()
    }
}

#[inline]
fn gamma(mu: usize, s: Spinor) -> Spinor {
    match mu {
        0 => s,
        1 => Spinor::new(I * s.c1, -I * s.c2),
        2 => Spinor::new(I * s.c2, I * s.c1),
        _ => Spinor::new(s.c2, -s.c1),
    }
}

#[inline]
fn gamma_adj(mu: usize, s: Spinor) -> Spinor {
    match mu {
        0 => s,
        1 => Spinor::new(-I * s.c1, I * s.c2),
        2 => Spinor::new(-I * s.c2, -I * s.c1),
        _ => Spinor::new(-s.c2, s.c1),
    }
}

/// Link variables of a connection, reusable across operator applications.
pub struct Transport<'g> {
    g: &'g Geometry,
    links: [Vec<Complex64>; 4],
}

impl<'g> Transport<'g> {
    pub fn new(a: &Connection, g: &'g Geometry) -> Result<Self> {
        a.check(g)?;
        Ok(Self {
            g,
            links: a.transport_links(g),
        })
    }

    pub fn links(&self) -> &[Vec<Complex64>; 4] {
        &self.links
    }

    #[inline]
    fn nabla_at(&self, phi: &[Spinor], i: usize, mu: usize, h: f64) -> Spinor {
        let f = self.g.fwd(i, mu);
        let b = self.g.bwd(i, mu);
        (phi[f].scale(self.links[mu][i]) - phi[b].scale(self.links[mu][b].conj())) * (0.5 / h)
    }

    fn nabla_dir(&self, phi: &[Spinor], mu: usize) -> Vec<Spinor> {
        let h = self.g.spacing()[mu];
        self.g.map_sites(|i| self.nabla_at(phi, i, mu, h))
    }

    pub fn covariant_derivative(&self, phi: &SpinorField) -> Result<SpinorOneForm> {
        self.g.check_len(phi.len())?;
        Ok(SpinorOneForm([0, 1, 2, 3].map(|mu| self.nabla_dir(&phi.0, mu))))
    }

    pub fn dirac(&self, phi: &SpinorField) -> Result<SpinorField> {
        self.g.check_len(phi.len())?;
        let h = self.g.spacing();
        Ok(SpinorField(self.g.map_sites(|i| {
            (0..4).fold(Spinor::ZERO, |acc, mu| {
                acc + gamma(mu, self.nabla_at(&phi.0, i, mu, h[mu]))
            })
        })))
    }

    pub fn dirac_adjoint(&self, psi: &SpinorField) -> Result<SpinorField> {
        self.g.check_len(psi.len())?;
        let h = self.g.spacing();
        Ok(SpinorField(self.g.map_sites(|i| {
            (0..4).fold(Spinor::ZERO, |acc, mu| {
                acc - gamma_adj(mu, self.nabla_at(&psi.0, i, mu, h[mu]))
            })
        })))
    }

    /// `∇*∇ φ = -Σ ∇_μ ∇_μ φ`.
    pub fn laplacian(&self, phi: &SpinorField) -> Result<SpinorField> {
        let d = self.covariant_derivative(phi)?;
        self.laplacian_from(&d)
    }

    /// `∇*` applied to an already computed one-form.
    pub fn laplacian_from(&self, d: &SpinorOneForm) -> Result<SpinorField> {
        let h = self.g.spacing();
        Ok(SpinorField(self.g.map_sites(|i| {
            (0..4).fold(Spinor::ZERO, |acc, mu| acc - self.nabla_at(&d.0[mu], i, mu, h[mu]))
        })))
    }
}

pub fn covariant_derivative(a: &Connection, phi: &SpinorField, g: &Geometry) -> Result<SpinorOneForm> {
    Transport::new(a, g)?.covariant_derivative(phi)
}

pub fn dirac(a: &Connection, phi: &SpinorField, g: &Geometry) -> Result<SpinorField> {
    Transport::new(a, g)?.dirac(phi)
}

pub fn dirac_adjoint(a: &Connection, psi: &SpinorField, g: &Geometry) -> Result<SpinorField> {
    Transport::new(a, g)?.dirac_adjoint(psi)
}

pub fn laplacian(a: &Connection, phi: &SpinorField, g: &Geometry) -> Result<SpinorField> {
    Transport::new(a, g)?.laplacian(phi)
}

/// `‖D*Dφ - ∇*∇φ - (k/4)φ - ρ(F⁺)φ/2‖₂`.
pub fn weitzenbock_residual(a: &Connection, phi: &SpinorField, g: &Geometry) -> Result<f64> {
    weitzenbock_residual_scaled(a, phi, g, C_RHO)
}

/// Weitzenböck defect with the Clifford constant `c_rho` in place of the
/// built-in one. Used to check that a wrong normalization is detected.
pub fn weitzenbock_residual_scaled(a: &Connection, phi: &SpinorField, g: &Geometry, c_rho: f64) -> Result<f64> {
    let t = Transport::new(a, g)?;
    let dd = t.dirac_adjoint(&t.dirac(phi)?)?;
    let lap = t.laplacian(phi)?;
    let f = curvature(a, g)?;
    let k = g.k_field();
    let defect = SpinorField(g.map_sites(|i| {
        let (sd, _) = split_pointwise(&f.0[i]);
        let rho = clifford_sd_scaled(&sd, c_rho);
        dd.0[i] - lap.0[i] - phi.0[i] * (0.25 * k[i]) - apply_endo(&rho, &phi.0[i]) * 0.5
    }));
    Ok(defect.norm(g))
}

/// Plane wave `exp(i m·2πx/L) s` with integer wavenumbers `m`.
pub fn plane_wave(g: &Geometry, m: [i64; 4], s: Spinor) -> SpinorField {
    let l = g.lengths();
    SpinorField(g.map_sites(|i| {
        let x = g.position(i);
        let ph: f64 = (0..4).map(|d| 2.0 * PI * m[d] as f64 * x[d] / l[d]).sum();
        s.scale(Complex64::from_polar(1.0, ph))
    }))
}

/// Discrete symbol `sin(2π m_μ h_μ / L_μ) / h_μ` of the flat central difference.
pub fn flat_symbol(g: &Geometry, m: [i64; 4]) -> [f64; 4] {
    let h = g.spacing();
    let l = g.lengths();
    [0, 1, 2, 3].map(|d| (2.0 * PI * m[d] as f64 * h[d] / l[d]).sin() / h[d])
}

/// Smooth section of the spinor bundle of a flux sector on the harmonic
/// background: a product of theta-type sections, one per flux plane,
/// modulated by low periodic harmonics (different for the two components).
pub fn smooth_test_field(flux: &FluxMatrix, g: &Geometry) -> SpinorField {
    let l = g.lengths();
    let n = flux.entries();
    let planes: Vec<(usize, usize, f64)> = PLANES
        .iter()
        .enumerate()
        .filter(|(k, _)| n[*k] != 0)
        .map(|(k, &(mu, nu))| (mu, nu, PI * n[k] as f64 / (l[mu] * l[nu])))
        .collect();
    let mod1 =
        |x: &[f64; 4]| 1.0 + 0.3 * (2.0 * PI * x[0] / l[0] + 0.4).cos() + 0.2 * (2.0 * PI * x[2] / l[2] - 1.1).sin();
    let mod2 = |x: &[f64; 4]| {
        Complex64::new(
            0.5 + 0.25 * (2.0 * PI * x[1] / l[1] + 0.7).cos(),
            0.2 * (2.0 * PI * x[3] / l[3]).sin(),
        )
    };
    SpinorField(g.map_sites(|i| {
        let x = g.position(i);
        let mut base = Complex64::new(1.0, 0.0);
        for &(mu, nu, b) in &planes {
            let w = b.abs();
            let c = 0.5 * l[mu];
            let mut s = Complex64::new(0.0, 0.0);
            for k in -6i64..=6 {
                let y = x[mu] + k as f64 * l[mu] - c;
                s += Complex64::from_polar((-0.5 * w * y * y).exp(), -(k as f64) * b * l[mu] * x[nu]);
            }
            base *= s;
        }
        Spinor::new(base * mod1(&x), base * mod2(&x))
    }))
}
