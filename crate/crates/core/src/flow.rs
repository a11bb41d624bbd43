//! Gradient descent on the expanded functional within one flux sector.

use log::debug;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::admissibility::window;
use crate::dirac::SpinorField;
use crate::error::{Error, Result};
use crate::functional::{
    bound_suite, excess_energy, gradient, harmonic_energy, monopole_defects, BoundReport, ConfigurationPoint,
};
use crate::gauge::{apply_gauge, random_smooth_fluctuation, Connection, FluxMatrix, GaugeTransform};
use crate::geometry::Geometry;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepRule {
    Fixed {
        eta: f64,
    },
    /// Armijo backtracking: accept `t` once `E(p - t g) ≤ E(p) - c t ‖g‖²`,
    /// otherwise shrink `t` by `rho`. The next trial starts at `t / rho`.
    Backtracking {
        c: f64,
        rho: f64,
        initial: f64,
    },
}

/// Classification thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub eps_mono: f64,
    pub eps_phi: f64,
}

impl Thresholds {
    /// `ε_mono = 1e-4 √v`, `ε_phi = 1e-4`.
    pub fn for_volume(v: f64) -> Self {
        Self {
            eps_mono: 1e-4 * v.sqrt(),
            eps_phi: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowOptions {
    pub max_iters: usize,
    pub step_rule: StepRule,
    pub grad_tol: f64,
    pub gauge_fix: bool,
    /// Iterations between Coulomb projections when `gauge_fix` is set.
    pub gauge_fix_every: usize,
    pub seed: u64,
    pub thresholds: Thresholds,
}

impl FlowOptions {
    pub fn new(g: &Geometry) -> Self {
        Self {
            max_iters: 5000,
            step_rule: StepRule::Backtracking {
                c: 1e-4,
                rho: 0.5,
                initial: 1e-3,
            },
            grad_tol: 1e-6,
            gauge_fix: false,
            gauge_fix_every: 50,
            seed: 0,
            thresholds: Thresholds::for_volume(g.volume()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidOptions(m));
        match self.step_rule {
            StepRule::Fixed { eta } if !(eta > 0.0 && eta.is_finite()) => {
                return bad(format!("step eta = {eta} must be positive"))
            }
            StepRule::Backtracking { c, rho, initial } => {
                if !(c > 0.0 && c < 1.0) {
                    return bad(format!("armijo c = {c} must lie in (0, 1)"));
                }
                if !(rho > 0.0 && rho < 1.0) {
                    return bad(format!("shrink factor rho = {rho} must lie in (0, 1)"));
                }
                if !(initial > 0.0 && initial.is_finite()) {
                    return bad(format!("initial step {initial} must be positive"));
                }
            }
            _ => {}
        }
        if !(self.grad_tol > 0.0) {
            return bad(format!("grad_tol = {} must be positive", self.grad_tol));
        }
        if self.gauge_fix && self.gauge_fix_every == 0 {
            return bad("gauge_fix_every must be at least 1".into());
        }
        if !(self.thresholds.eps_mono > 0.0 && self.thresholds.eps_phi > 0.0) {
            return bad("classification thresholds must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStatus {
    Converged,
    MaxIters,
    StepUnderflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    Monopole,
    PhiVanishes,
    ReducibleMin,
    NotConverged,
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    pub point: ConfigurationPoint,
    pub energy_trace: Vec<f64>,
    pub grad_norm_trace: Vec<f64>,
    pub final_grad_norm: f64,
    pub iterations: usize,
    pub status: FlowStatus,
    pub classification: Classification,
    pub bounds: BoundReport,
}

impl FlowResult {
    pub fn final_energy(&self) -> f64 {
        *self.energy_trace.last().expect("trace holds the starting energy")
    }
}

/// Discrete Poisson solve `d*dχ = d*a` for the periodic forward/backward
/// Laplacian by conjugate gradients; `a - ∂⁺χ` is co-closed.
fn coulomb_potential(a: &[Vec<f64>; 4], g: &Geometry) -> Result<Vec<f64>> {
    for v in a {
        g.check_len(v.len())?;
    }
    let h = g.spacing();
    let n = g.n_sites();
    let div = |a: &[Vec<f64>; 4]| -> Vec<f64> {
        g.map_sites(|i| -(0..4).map(|mu| (a[mu][i] - a[mu][g.bwd(i, mu)]) / h[mu]).sum::<f64>())
    };
    let grad =
        |x: &[f64]| -> [Vec<f64>; 4] { [0, 1, 2, 3].map(|mu| g.map_sites(|i| (x[g.fwd(i, mu)] - x[i]) / h[mu])) };
    let op = |x: &[f64]| div(&grad(x));
    let b = div(a);
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut p = r.clone();
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(p, q)| p * q).sum::<f64>();
    // stop relative to the size of a itself, so co-closed input is a fixed point
    let scale: f64 = (0..4)
        .map(|mu| a[mu].iter().map(|x| x * x).sum::<f64>() / (h[mu] * h[mu]))
        .sum();
    let mut rr = dot(&b, &b);
    let budget = 10 * (g.dims().iter().max().copied().unwrap_or(1)).pow(2) + 200;
    for _ in 0..budget {
        if rr <= 1e-28 * scale {
            break;
        }
        let ap = op(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rr / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for k in 0..n {
            p[k] = r[k] + beta * p[k];
        }
        rr = rr_new;
    }
    Ok(x)
}

/// `a - ∂⁺χ` with `χ` from the Coulomb Poisson solve.
pub fn coulomb_project(a: &[Vec<f64>; 4], g: &Geometry) -> Result<[Vec<f64>; 4]> {
    let chi = coulomb_potential(a, g)?;
    let h = g.spacing();
    Ok([0, 1, 2, 3].map(|mu| g.map_sites(|i| a[mu][i] - (chi[g.fwd(i, mu)] - chi[i]) / h[mu])))
}

/// `d*a = -Σ ∂⁻_μ a_μ`.
pub fn divergence(a: &[Vec<f64>; 4], g: &Geometry) -> Vec<f64> {
    let h = g.spacing();
    g.map_sites(|i| -(0..4).map(|mu| (a[mu][i] - a[mu][g.bwd(i, mu)]) / h[mu]).sum::<f64>())
}

/// Moves a configuration to Coulomb gauge, rotating the spinor along.
pub fn gauge_fix(p: &ConfigurationPoint, g: &Geometry) -> Result<ConfigurationPoint> {
    let chi = coulomb_potential(p.a.fluct(), g)?;
    let t = GaugeTransform {
        theta: chi.iter().map(|x| -0.5 * x).collect(),
        winding: [0; 4],
    };
    let (a, phi) = apply_gauge(&t, &p.a, &p.phi, g)?;
    ConfigurationPoint::new(a, phi, g)
}

/// Seeded starting point: band-limited link fluctuation and white-noise spinor.
pub fn random_start(
    g: &Geometry,
    flux: FluxMatrix,
    seed: u64,
    phi_amplitude: f64,
    fluct_amplitude: f64,
) -> Result<ConfigurationPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fluct = random_smooth_fluctuation(g, &mut rng, fluct_amplitude, 4);
    let phi = SpinorField::random(g, &mut rng, phi_amplitude);
    ConfigurationPoint::new(Connection::new(flux, fluct, g)?, phi, g)
}

/// Classification of a point from its residuals alone.
pub fn classify_point(p: &ConfigurationPoint, g: &Geometry, th: &Thresholds) -> Result<Classification> {
    if p.phi.sup_norm() <= th.eps_phi {
        return Ok(Classification::PhiVanishes);
    }
    let (curv, dirac) = monopole_defects(p, g)?;
    if curv + dirac <= th.eps_mono && p.phi.norm(g) >= th.eps_phi {
        Ok(Classification::Monopole)
    } else {
        Ok(Classification::ReducibleMin)
    }
}

/// Classification of a converged flow result; unconverged input is refused.
pub fn classify(r: &FlowResult, g: &Geometry, th: &Thresholds) -> Result<Classification> {
    if r.status != FlowStatus::Converged {
        return Err(Error::NotConverged);
    }
    classify_point(&r.point, g, th)
}

pub fn minimize(p0: &ConfigurationPoint, g: &Geometry, opts: &FlowOptions) -> Result<FlowResult> {
    opts.validate()?;
    let mut p = if opts.gauge_fix { gauge_fix(p0, g)? } else { p0.clone() };
    let base = harmonic_energy(p.a.flux(), g);
    let mut excess = excess_energy(&p, g)?;
    let mut grad = gradient(&p, g)?;
    let mut gnorm = grad.norm_sq(g).sqrt();
    let mut energy_trace = vec![base + excess];
    let mut grad_norm_trace = vec![gnorm];
    let mut trial = match opts.step_rule {
        StepRule::Fixed { eta } => eta,
        StepRule::Backtracking { initial, .. } => initial,
    };
    let floor = trial * 1e-12;
    let mut status = FlowStatus::MaxIters;
    let mut iterations = 0;
    loop {
        if gnorm <= opts.grad_tol {
            status = FlowStatus::Converged;
            break;
        }
        if iterations >= opts.max_iters {
            break;
        }
        let (next, e_next) = match opts.step_rule {
            StepRule::Fixed { eta } => {
                let cand = p.step(-eta, &grad, g)?;
                let e = excess_energy(&cand, g)?;
                (cand, e)
            }
            StepRule::Backtracking { c, rho, .. } => {
                let decrease = gnorm * gnorm;
                let mut t = trial;
                let mut accepted = None;
                while t >= floor {
                    let cand = p.step(-t, &grad, g)?;
                    let e = excess_energy(&cand, g)?;
                    if e.is_finite() && e <= excess - c * t * decrease {
                        accepted = Some((cand, e));
                        trial = t / rho;
                        break;
                    }
                    t *= rho;
                }
                match accepted {
                    Some(x) => x,
                    None => {
                        status = FlowStatus::StepUnderflow;
                        break;
                    }
                }
            }
        };
        if !e_next.is_finite() {
            return Err(Error::InvalidOptions(format!(
                "energy diverged at iteration {}; reduce the step",
                iterations + 1
            )));
        }
        iterations += 1;
        p = next;
        excess = e_next;
        if opts.gauge_fix && iterations % opts.gauge_fix_every == 0 {
            // the energy is gauge invariant; keep the accepted value
            p = gauge_fix(&p, g)?;
        }
        grad = gradient(&p, g)?;
        gnorm = grad.norm_sq(g).sqrt();
        energy_trace.push(base + excess);
        grad_norm_trace.push(gnorm);
        if iterations % 500 == 0 {
            debug!("iter {iterations}: energy {:.12e}, |grad| {gnorm:.3e}", base + excess);
        }
    }
    if opts.gauge_fix {
        p = gauge_fix(&p, g)?;
    }
    let alpha_sq = crate::gauge::alpha_square_from_flux(p.a.flux());
    let bounds = bound_suite(&p, g, alpha_sq)?;
    let classification = if status == FlowStatus::Converged {
        classify_point(&p, g, &opts.thresholds)?
    } else {
        Classification::NotConverged
    };
    Ok(FlowResult {
        point: p,
        energy_trace,
        grad_norm_trace,
        final_grad_norm: gnorm,
        iterations,
        status,
        classification,
        bounds,
    })
}

/// Post-hoc consistency of a classification with the admissibility window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremCheck {
    pub alpha_square: i64,
    pub volume: f64,
    pub k_minus: f64,
    pub window_low: f64,
    pub window_high: f64,
    pub in_window: bool,
    pub monopole: bool,
    /// A monopole may only appear when `α²` lies in the window.
    pub consistent: bool,
}

pub fn theorem_check(c: Classification, alpha_square: i64, g: &Geometry) -> Result<TheoremCheck> {
    let w = window(g.volume(), g.k_minus())?;
    let in_window = w.contains(alpha_square as f64);
    let monopole = c == Classification::Monopole;
    Ok(TheoremCheck {
        alpha_square,
        volume: g.volume(),
        k_minus: g.k_minus(),
        window_low: w.lo,
        window_high: w.hi,
        in_window,
        monopole,
        consistent: !monopole || in_window,
    })
}
