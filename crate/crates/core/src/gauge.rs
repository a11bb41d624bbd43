//! U(1) connections on the determinant line of the lattice torus.
//!
//! A connection is a flux sector (six even integers `n_{μν}`, one per
//! coordinate plane) plus a real periodic fluctuation `a_μ(x)` living on the
//! link `x → x + μ`. Curvature is real-valued:
//!
//! ```text
//! F_{μν}(x) = ∂⁺_μ a_ν(x) - ∂⁺_ν a_μ(x) + 2π n_{μν} / (L_μ L_ν)
//! ```
//!
//! with `∂⁺` the forward difference, so `F_{μν}(x)` is the plaquette at `x`
//! spanned by `μ, ν`. This is the form that is exactly invariant under the
//! link gauge action `a → a + 2 ∂⁺θ`; a central-difference curvature is not.
//! `∫ F ∧ F` is evaluated with the cubical cup product, pairing each
//! plaquette with the complementary one at the far corner, which makes it
//! exactly topological.
//!
//! Spinors couple to half of the connection. Their transport across the link
//! `x → x + μ` is `U_μ(x) = exp(i ψ_μ(x) - i h_μ a_μ(x) / 2)` where `ψ` is a
//! twisted background carrying half-fluxes `π n_{μν}` per plane.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::admissibility::SpincClass;
use crate::dirac::SpinorField;
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::spinor_algebra::{AntiSelfDualTriple, SelfDualTriple};

/// Coordinate planes in storage order `12, 13, 14, 23, 24, 34`.
pub const PLANES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
pub const PLANE_NAMES: [&str; 6] = ["12", "13", "14", "23", "24", "34"];

/// Storage slot of the plane `(mu, nu)` together with the orientation sign.
#[inline]
pub fn plane_slot(mu: usize, nu: usize) -> Option<(usize, f64)> {
    let (a, b, s) = if mu < nu { (mu, nu, 1.0) } else { (nu, mu, -1.0) };
    PLANES.iter().position(|&p| p == (a, b)).map(|k| (k, s))
}

/// Flux integers `n_{μν}` of a torus sector; every entry is even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FluxMatrix([i64; 6]);

impl FluxMatrix {
    pub fn new(n: [i64; 6]) -> Result<Self> {
        for (k, &v) in n.iter().enumerate() {
            if v % 2 != 0 {
                return Err(Error::OddFlux {
                    plane: PLANE_NAMES[k],
                    value: v,
                });
            }
        }
        Ok(Self(n))
    }

    pub fn zero() -> Self {
        Self([0; 6])
    }

    pub fn entries(&self) -> [i64; 6] {
        self.0
    }

    /// The class as an integer vector in the plane basis.
    pub fn class(&self) -> SpincClass {
        SpincClass(self.0.to_vec())
    }
}

/// `α² = 2 (n12 n34 - n13 n24 + n14 n23)`.
pub fn alpha_square_from_flux(n: &FluxMatrix) -> i64 {
    let [n12, n13, n14, n23, n24, n34] = n.0;
    2 * (n12 * n34 - n13 * n24 + n14 * n23)
}

/// Connection on the determinant line: flux sector plus link fluctuation.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    flux: FluxMatrix,
    fluct: [Vec<f64>; 4],
}

impl Connection {
    pub fn new(flux: FluxMatrix, fluct: [Vec<f64>; 4], g: &Geometry) -> Result<Self> {
        for a in &fluct {
            g.check_len(a.len())?;
        }
        Ok(Self { flux, fluct })
    }

    /// Harmonic representative of a sector (zero fluctuation).
    pub fn harmonic(flux: FluxMatrix, g: &Geometry) -> Self {
        let n = g.n_sites();
        Self {
            flux,
            fluct: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        }
    }

    pub fn flat(g: &Geometry) -> Self {
        Self::harmonic(FluxMatrix::zero(), g)
    }

    pub fn flux(&self) -> &FluxMatrix {
        &self.flux
    }

    pub fn fluct(&self) -> &[Vec<f64>; 4] {
        &self.fluct
    }

    pub fn fluct_mut(&mut self) -> &mut [Vec<f64>; 4] {
        &mut self.fluct
    }

    pub fn check(&self, g: &Geometry) -> Result<()> {
        self.fluct.iter().try_for_each(|a| g.check_len(a.len()))
    }

    /// Spinor transport `U_μ(x)` for every link.
    pub fn transport_links(&self, g: &Geometry) -> [Vec<Complex64>; 4] {
        let lengths = g.lengths();
        let h = g.spacing();
        let dims = g.dims();
        // half-flux densities B'_{μν} = π n_{μν} / (L_μ L_ν)
        let mut half = [[0.0f64; 4]; 4];
        for (k, &(mu, nu)) in PLANES.iter().enumerate() {
            half[mu][nu] = PI * self.flux.0[k] as f64 / (lengths[mu] * lengths[nu]);
        }
        [0, 1, 2, 3].map(|mu| {
            g.map_sites(|i| {
                let x = g.position(i);
                let mut phase = -0.5 * h[mu] * self.fluct[mu][i];
                for lam in 0..mu {
                    phase -= h[mu] * half[lam][mu] * x[lam];
                }
                if g.coord(i, mu) + 1 == dims[mu] {
                    for nu in (mu + 1)..4 {
                        phase += half[mu][nu] * lengths[mu] * x[nu];
                    }
                }
                Complex64::from_polar(1.0, phase)
            })
        })
    }
}

/// Six real components `F_{μν}` per site in [`PLANES`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct Curvature2Form(pub Vec<[f64; 6]>);

impl Curvature2Form {
    pub fn pointwise_norm_sq(&self) -> Vec<f64> {
        self.0.iter().map(|f| f.iter().map(|v| v * v).sum()).collect()
    }
}

/// Constant curvature `2π n_{μν}/(L_μ L_ν)` of the harmonic representative.
pub fn harmonic_curvature(flux: &FluxMatrix, g: &Geometry) -> [f64; 6] {
    let l = g.lengths();
    let mut out = [0.0; 6];
    for (k, &(mu, nu)) in PLANES.iter().enumerate() {
        out[k] = 2.0 * PI * flux.0[k] as f64 / (l[mu] * l[nu]);
    }
    out
}

#[inline]
pub(crate) fn forward(f: &[f64], i: usize, mu: usize, g: &Geometry, h: &[f64; 4]) -> f64 {
    (f[g.fwd(i, mu)] - f[i]) / h[mu]
}

#[inline]
pub(crate) fn backward(f: &[f64], i: usize, mu: usize, g: &Geometry, h: &[f64; 4]) -> f64 {
    (f[i] - f[g.bwd(i, mu)]) / h[mu]
}

pub fn curvature(a: &Connection, g: &Geometry) -> Result<Curvature2Form> {
    curvature_with(a, g, harmonic_curvature(&a.flux, g))
}

/// Curvature of the fluctuation alone, `F - F_harmonic`.
pub fn fluctuation_curvature(a: &Connection, g: &Geometry) -> Result<Curvature2Form> {
    curvature_with(a, g, [0.0; 6])
}

fn curvature_with(a: &Connection, g: &Geometry, harm: [f64; 6]) -> Result<Curvature2Form> {
    a.check(g)?;
    let h = g.spacing();
    let fl = &a.fluct;
    Ok(Curvature2Form(g.map_sites(|i| {
        let mut f = harm;
        for (k, &(mu, nu)) in PLANES.iter().enumerate() {
            f[k] += forward(&fl[nu], i, mu, g, &h) - forward(&fl[mu], i, nu, g, &h);
        }
        f
    })))
}

const R2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Self-dual and anti-self-dual coefficients of one 2-form.
#[inline]
pub fn split_pointwise(f: &[f64; 6]) -> (SelfDualTriple, AntiSelfDualTriple) {
    let [f12, f13, f14, f23, f24, f34] = *f;
    (
        SelfDualTriple([R2 * (f12 + f34), R2 * (f13 - f24), R2 * (f14 + f23)]),
        AntiSelfDualTriple([R2 * (f12 - f34), R2 * (f13 + f24), R2 * (f14 - f23)]),
    )
}

/// Inverse of [`split_pointwise`].
pub fn reassemble(sd: &SelfDualTriple, asd: &AntiSelfDualTriple) -> [f64; 6] {
    let [s1, s2, s3] = sd.0;
    let [a1, a2, a3] = asd.0;
    [
        R2 * (s1 + a1),
        R2 * (s2 + a2),
        R2 * (s3 + a3),
        R2 * (s3 - a3),
        R2 * (a2 - s2),
        R2 * (s1 - a1),
    ]
}

pub fn split_sd_asd(f: &Curvature2Form) -> (Vec<SelfDualTriple>, Vec<AntiSelfDualTriple>) {
    f.0.iter().map(split_pointwise).unzip()
}

/// `F ∧ F / vol = 2 (F12 F34 - F13 F24 + F14 F23) = |F⁺|² - |F⁻|²`.
#[inline]
pub fn wedge_density(f: &[f64; 6]) -> f64 {
    2.0 * (f[0] * f[5] - f[1] * f[4] + f[2] * f[3])
}

/// `(1/4π²) ∫ F ∧ F` via the cup product of plaquettes.
pub fn chern_square(f: &Curvature2Form, g: &Geometry) -> Result<f64> {
    g.check_len(f.0.len())?;
    // (front plane, back plane, sign); the back plaquette sits at x + ê_a + ê_b
    const SPLITS: [(usize, usize, f64); 6] = [
        (0, 5, 1.0),
        (5, 0, 1.0),
        (1, 4, -1.0),
        (4, 1, -1.0),
        (2, 3, 1.0),
        (3, 2, 1.0),
    ];
    let f = &f.0;
    let total = g.sum_sites(|i| {
        SPLITS
            .iter()
            .map(|&(p, q, s)| {
                let (a, b) = PLANES[p];
                s * f[i][p] * f[g.fwd(g.fwd(i, a), b)][q]
            })
            .sum()
    });
    Ok(total / (4.0 * PI * PI))
}

/// Largest deviation of a plane flux `Σ F_{μν} h_μ h_ν` (over each coordinate
/// 2-plane slice) from `2π n_{μν}`.
pub fn flux_defect(f: &Curvature2Form, flux: &FluxMatrix, g: &Geometry) -> Result<f64> {
    g.check_len(f.0.len())?;
    let h = g.spacing();
    let dims = g.dims();
    let mut worst = 0.0f64;
    for (k, &(mu, nu)) in PLANES.iter().enumerate() {
        let others: Vec<usize> = (0..4).filter(|&d| d != mu && d != nu).collect();
        let target = 2.0 * PI * flux.0[k] as f64;
        for p in 0..dims[others[0]] {
            for q in 0..dims[others[1]] {
                let mut sum = 0.0;
                for s in 0..dims[mu] {
                    for t in 0..dims[nu] {
                        let mut c = [0usize; 4];
                        c[others[0]] = p;
                        c[others[1]] = q;
                        c[mu] = s;
                        c[nu] = t;
                        sum += f.0[g.index(c)][k];
                    }
                }
                worst = worst.max((sum * h[mu] * h[nu] - target).abs());
            }
        }
    }
    Ok(worst)
}

/// A lattice gauge transformation `exp(iΘ)`, `Θ(x) = θ(x) + Σ 2π w_μ x_μ / L_μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeTransform {
    pub theta: Vec<f64>,
    pub winding: [i64; 4],
}

impl GaugeTransform {
    pub fn constant(theta: f64, g: &Geometry) -> Self {
        Self {
            theta: vec![theta; g.n_sites()],
            winding: [0; 4],
        }
    }

    /// White-noise phase of the given amplitude plus windings in `-max..=max`.
    pub fn random<R: Rng>(g: &Geometry, rng: &mut R, amplitude: f64, max_winding: i64) -> Self {
        let theta = (0..g.n_sites())
            .map(|_| amplitude * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let winding = [0; 4].map(|_| {
            if max_winding > 0 {
                rng.random_range(-max_winding..=max_winding)
            } else {
                0
            }
        });
        Self { theta, winding }
    }

    /// `Θ(x)` at a site.
    pub fn phase(&self, site: usize, g: &Geometry) -> f64 {
        let x = g.position(site);
        let l = g.lengths();
        self.theta[site]
            + (0..4)
                .map(|mu| 2.0 * PI * self.winding[mu] as f64 * x[mu] / l[mu])
                .sum::<f64>()
    }

    /// Lifted forward increment of `Θ` along the link `x → x + μ`.
    pub fn increment(&self, site: usize, mu: usize, g: &Geometry) -> f64 {
        let h = g.spacing()[mu];
        let l = g.lengths()[mu];
        self.theta[g.fwd(site, mu)] - self.theta[site] + 2.0 * PI * self.winding[mu] as f64 * h / l
    }
}

/// `φ → e^{iΘ} φ`, `a_μ → a_μ + 2 (Θ(x+μ) - Θ(x)) / h_μ`.
pub fn apply_gauge(
    t: &GaugeTransform,
    a: &Connection,
    phi: &SpinorField,
    g: &Geometry,
) -> Result<(Connection, SpinorField)> {
    g.check_len(t.theta.len())?;
    a.check(g)?;
    g.check_len(phi.0.len())?;
    let h = g.spacing();
    let fluct = [0, 1, 2, 3].map(|mu| g.map_sites(|i| a.fluct[mu][i] + 2.0 * t.increment(i, mu, g) / h[mu]));
    let rotated = g.map_sites(|i| phi.0[i].scale(Complex64::from_polar(1.0, t.phase(i, g))));
    Ok((Connection { flux: a.flux, fluct }, SpinorField(rotated)))
}

/// White-noise fluctuation of the given standard deviation.
pub fn random_fluctuation<R: Rng>(g: &Geometry, rng: &mut R, amplitude: f64) -> [Vec<f64>; 4] {
    [0, 1, 2, 3].map(|_| {
        (0..g.n_sites())
            .map(|_| amplitude * rng.sample::<f64, _>(StandardNormal))
            .collect()
    })
}

/// Band-limited fluctuation: a few random Fourier modes with wavenumbers
/// `|m_μ| ≤ 2` per axis.
pub fn random_smooth_fluctuation<R: Rng>(g: &Geometry, rng: &mut R, amplitude: f64, modes: usize) -> [Vec<f64>; 4] {
    let l = g.lengths();
    [0, 1, 2, 3].map(|_| {
        let spec: Vec<([f64; 4], f64, f64)> = (0..modes)
            .map(|_| {
                let m = [0; 4].map(|_| rng.random_range(-2i64..=2) as f64);
                let k = [0, 1, 2, 3].map(|d| 2.0 * PI * m[d] / l[d]);
                (k, rng.random_range(-1.0..1.0), rng.random_range(0.0..2.0 * PI))
            })
            .collect();
        (0..g.n_sites())
            .map(|i| {
                let x = g.position(i);
                amplitude
                    * spec
                        .iter()
                        .map(|(k, c, p)| c * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + k[3] * x[3] + p).cos())
                        .sum::<f64>()
            })
            .collect()
    })
}
