//! Flat lattice 4-torus: sites, quadrature, norms and the prescribed
//! scalar-curvature weight.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prescribed scalar-curvature profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum KSpec {
    Constant(f64),
    /// `k(x) = -depth · exp(1 - 1/(1 - r²))` for `r = |x - center|/radius < 1`,
    /// zero outside; distances use the minimal periodic image.
    Bump {
        center: [f64; 4],
        radius: f64,
        depth: f64,
    },
}

/// Lattice torus with sites `x_μ = i_μ h_μ`, `0 ≤ i_μ < n_μ`.
#[derive(Debug, Clone)]
pub struct Geometry {
    dims: [usize; 4],
    spacing: [f64; 4],
    strides: [usize; 4],
    k_field: Vec<f64>,
    volume: f64,
    k_min: f64,
    k_minus: f64,
    parallel: bool,
}

/// Norm exponent for [`lp_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Norm {
    L2,
    L4,
    Sup,
}

impl Norm {
    /// Parses `2`, `4`, `inf`; anything else is rejected.
    pub fn from_exponent(p: &str) -> Result<Norm> {
        match p.trim() {
            "2" => Ok(Norm::L2),
            "4" => Ok(Norm::L4),
            "inf" | "infinity" | "∞" => Ok(Norm::Sup),
            other => Err(Error::UnsupportedNorm(other.to_string())),
        }
    }
}

/// `k⁻ = 0` when `k_min ≥ 0`, otherwise `sqrt(-k_min)`.
pub fn k_minus_of(k_min: f64) -> f64 {
    if k_min >= 0.0 {
        0.0
    } else {
        (-k_min).sqrt()
    }
}

impl Geometry {
    pub fn new(dims: [usize; 4], spacing: [f64; 4], k_spec: &KSpec) -> Result<Self> {
        for (mu, &n) in dims.iter().enumerate() {
            if n < 4 {
                return Err(Error::InvalidGeometry(format!(
                    "dims[{mu}] = {n}; at least 4 sites per axis are required"
                )));
            }
        }
        for (mu, &h) in spacing.iter().enumerate() {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidGeometry(format!(
                    "spacing[{mu}] = {h}; spacings must be positive and finite"
                )));
            }
        }
        let strides = [1, dims[0], dims[0] * dims[1], dims[0] * dims[1] * dims[2]];
        let n_sites = dims.iter().product::<usize>();
        let volume = (0..4).map(|mu| dims[mu] as f64 * spacing[mu]).product::<f64>();

        let mut geom = Geometry {
            dims,
            spacing,
            strides,
            k_field: Vec::new(),
            volume,
            k_min: 0.0,
            k_minus: 0.0,
            parallel: false,
        };

        let k_field: Vec<f64> = match k_spec {
            KSpec::Constant(k) => {
                if !k.is_finite() {
                    return Err(Error::InvalidGeometry("k must be finite".into()));
                }
                vec![*k; n_sites]
            }
            KSpec::Bump { center, radius, depth } => {
                if !(*radius > 0.0) || !depth.is_finite() {
                    return Err(Error::InvalidGeometry(
                        "bump radius must be positive and depth finite".into(),
                    ));
                }
                let lengths = geom.lengths();
                (0..n_sites)
                    .map(|i| {
                        let x = geom.position(i);
                        let r2 = (0..4)
                            .map(|mu| {
                                let mut d = (x[mu] - center[mu]).rem_euclid(lengths[mu]);
                                if d > 0.5 * lengths[mu] {
                                    d -= lengths[mu];
                                }
                                d * d
                            })
                            .sum::<f64>()
                            / (radius * radius);
                        if r2 < 1.0 {
                            -depth * (1.0 - 1.0 / (1.0 - r2)).exp()
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
        };
        geom.set_k_field(k_field)?;
        Ok(geom)
    }

    /// Replaces the curvature weight and recomputes `k_min`, `k⁻`.
    pub fn set_k_field(&mut self, k_field: Vec<f64>) -> Result<()> {
        self.check_len(k_field.len())?;
        if k_field.iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidGeometry("k field has non-finite values".into()));
        }
        self.k_min = k_field.iter().copied().fold(f64::INFINITY, f64::min);
        self.k_minus = k_minus_of(self.k_min);
        self.k_field = k_field;
        Ok(())
    }

    /// Enables rayon-parallel site maps and reductions. Parallel reductions
    /// change the summation order, so results are no longer bit-reproducible.
    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn parallel(&self) -> bool {
        self.parallel
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    pub fn spacing(&self) -> [f64; 4] {
        self.spacing
    }

    pub fn lengths(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|mu| self.dims[mu] as f64 * self.spacing[mu])
    }

    pub fn n_sites(&self) -> usize {
        self.strides[3] * self.dims[3]
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn k_field(&self) -> &[f64] {
        &self.k_field
    }

    pub fn k_min(&self) -> f64 {
        self.k_min
    }

    pub fn k_minus(&self) -> f64 {
        self.k_minus
    }

    #[inline]
    pub fn coords(&self, site: usize) -> [usize; 4] {
        [0, 1, 2, 3].map(|mu| (site / self.strides[mu]) % self.dims[mu])
    }

    #[inline]
    pub fn index(&self, c: [usize; 4]) -> usize {
        c[0] * self.strides[0] + c[1] * self.strides[1] + c[2] * self.strides[2] + c[3] * self.strides[3]
    }

    /// Physical coordinates of a site.
    #[inline]
    pub fn position(&self, site: usize) -> [f64; 4] {
        let c = self.coords(site);
        [0, 1, 2, 3].map(|mu| c[mu] as f64 * self.spacing[mu])
    }

    #[inline]
    pub fn coord(&self, site: usize, mu: usize) -> usize {
        (site / self.strides[mu]) % self.dims[mu]
    }

    #[inline]
    pub fn fwd(&self, site: usize, mu: usize) -> usize {
        if self.coord(site, mu) + 1 == self.dims[mu] {
            site + self.strides[mu] - self.strides[mu] * self.dims[mu]
        } else {
            site + self.strides[mu]
        }
    }

    #[inline]
    pub fn bwd(&self, site: usize, mu: usize) -> usize {
        if self.coord(site, mu) == 0 {
            site + self.strides[mu] * (self.dims[mu] - 1)
        } else {
            site - self.strides[mu]
        }
    }

    pub fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n_sites() {
            return Err(Error::SizeMismatch {
                expected: self.n_sites(),
                actual: len,
            });
        }
        Ok(())
    }

    /// Evaluates `f` at every site, in parallel when enabled.
    pub fn map_sites<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        if self.parallel {
            (0..self.n_sites()).into_par_iter().map(f).collect()
        } else {
            (0..self.n_sites()).map(f).collect()
        }
    }

    /// `Σ_sites f(x) · cellVolume`, with `f` given pointwise.
    pub fn sum_sites<F>(&self, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        let s = if self.parallel {
            (0..self.n_sites()).into_par_iter().map(f).sum::<f64>()
        } else {
            (0..self.n_sites()).map(f).sum::<f64>()
        };
        s * self.cell_volume()
    }
}

/// Site-sum quadrature `Σ f(x) · cellVolume`.
pub fn integrate(f: &[f64], g: &Geometry) -> Result<f64> {
    g.check_len(f.len())?;
    Ok(g.sum_sites(|i| f[i]))
}

/// `(∫|f|^p)^{1/p}` for `p = 2, 4`; the maximum modulus for `Sup`.
pub fn lp_norm(f: &[f64], p: Norm, g: &Geometry) -> Result<f64> {
    g.check_len(f.len())?;
    Ok(match p {
        Norm::L2 => g.sum_sites(|i| f[i] * f[i]).sqrt(),
        Norm::L4 => g.sum_sites(|i| (f[i] * f[i]).powi(2)).sqrt().sqrt(),
        Norm::Sup => f.iter().fold(0.0f64, |m, v| m.max(v.abs())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn unit_grid(k: KSpec) -> Geometry {
        Geometry::new([8; 4], [0.125; 4], &k).unwrap()
    }

    #[test]
    fn curvature_constants() {
        let g = unit_grid(KSpec::Constant(0.0));
        assert!((g.volume() - 1.0).abs() < 1e-15);
        assert_eq!(g.k_minus(), 0.0);

        let g = unit_grid(KSpec::Constant(-4.0));
        assert_eq!(g.k_min(), -4.0);
        assert_eq!(g.k_minus(), 2.0);

        let g = unit_grid(KSpec::Constant(3.0));
        assert_eq!(g.k_minus(), 0.0);
    }

    #[test]
    fn bump_profile_reaches_depth_at_center() {
        let g = unit_grid(KSpec::Bump {
            center: [0.5; 4],
            radius: 0.3,
            depth: 2.0,
        });
        assert!((g.k_min() + 2.0).abs() < 1e-12);
        assert!((g.k_minus() - 2.0f64.sqrt()).abs() < 1e-12);
        assert_eq!(g.k_field()[0], 0.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(
            Geometry::new([8, 8, 3, 8], [0.1; 4], &KSpec::Constant(0.0)),
            Err(Error::InvalidGeometry(_))
        ));
        assert!(Geometry::new([8; 4], [0.1, 0.0, 0.1, 0.1], &KSpec::Constant(0.0)).is_err());
        assert!(Geometry::new([8; 4], [0.1, -1.0, 0.1, 0.1], &KSpec::Constant(0.0)).is_err());
    }

    #[test]
    fn neighbours_wrap() {
        let g = Geometry::new([4, 5, 6, 7], [1.0; 4], &KSpec::Constant(0.0)).unwrap();
        for i in 0..g.n_sites() {
            for mu in 0..4 {
                assert_eq!(g.bwd(g.fwd(i, mu), mu), i);
                let c = g.coords(i);
                let mut f = c;
                f[mu] = (c[mu] + 1) % g.dims()[mu];
                assert_eq!(g.index(f), g.fwd(i, mu));
            }
        }
    }

    #[test]
    fn quadrature_basics() {
        let g = unit_grid(KSpec::Constant(0.0));
        let ones = vec![1.0; g.n_sites()];
        assert!((integrate(&ones, &g).unwrap() - 1.0).abs() < 1e-14);
        let c = vec![-2.5; g.n_sites()];
        assert!((integrate(&c, &g).unwrap() + 2.5).abs() < 1e-13);

        let g = Geometry::new([6, 8, 4, 10], [0.3, 0.2, 0.5, 0.1], &KSpec::Constant(0.0)).unwrap();
        let l = g.lengths();
        let f: Vec<f64> = (0..g.n_sites())
            .map(|i| {
                let x = g.position(i);
                (0..4).map(|mu| (2.0 * PI * x[mu] / l[mu]).cos()).product()
            })
            .collect();
        assert!(integrate(&f, &g).unwrap().abs() < 1e-12);

        assert!(matches!(integrate(&[1.0; 3], &g), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn norms_of_constants() {
        let g = Geometry::new([4, 4, 4, 4], [0.5, 1.0, 0.25, 2.0], &KSpec::Constant(0.0)).unwrap();
        let v = g.volume();
        let f = vec![-3.0; g.n_sites()];
        assert!((lp_norm(&f, Norm::L2, &g).unwrap() - 3.0 * v.sqrt()).abs() < 1e-12);
        assert!((lp_norm(&f, Norm::L4, &g).unwrap() - 3.0 * v.powf(0.25)).abs() < 1e-12);
        assert_eq!(lp_norm(&f, Norm::Sup, &g).unwrap(), 3.0);
        assert!(matches!(Norm::from_exponent("3"), Err(Error::UnsupportedNorm(_))));
        assert_eq!(Norm::from_exponent("inf").unwrap(), Norm::Sup);
    }

    #[test]
    fn holder_on_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let dims = [0; 4].map(|_| rng.random_range(4..7usize));
            let spacing = [0; 4].map(|_| rng.random_range(0.05..1.5f64));
            let g = Geometry::new(dims, spacing, &KSpec::Constant(0.0)).unwrap();
            let f: Vec<f64> = (0..g.n_sites()).map(|_| rng.random_range(-5.0..5.0)).collect();
            let l2 = lp_norm(&f, Norm::L2, &g).unwrap();
            let l4 = lp_norm(&f, Norm::L4, &g).unwrap();
            assert!(l2 <= g.volume().powf(0.25) * l4 + 1e-12);
            let sq: Vec<f64> = f.iter().map(|v| v * v).collect();
            assert!(integrate(&sq, &g).unwrap() >= 0.0);
        }
    }

    #[test]
    fn k_minus_branches() {
        for k in [-3.0, -1e-9, 0.0, 2.0] {
            let km = k_minus_of(k);
            assert_eq!(km > 0.0, k < 0.0);
            if k < 0.0 {
                assert!((km.powi(4) - k * k).abs() < 1e-14 * k * k);
            }
        }
    }
}
