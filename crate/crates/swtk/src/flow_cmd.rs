//! `swtk flow`: one seeded minimization with its bound and window verdicts.

use serde::Serialize;

use swtk_core::dirac::SpinorField;
use swtk_core::flow::{
    classify_point, minimize, random_start, theorem_check, Classification, FlowOptions, FlowStatus, TheoremCheck,
};
use swtk_core::functional::{
    el_residual_connection, el_residual_spinor, harmonic_energy, monopole_defects, sw_energy, BoundReport,
    ConfigurationPoint, EnergyReport,
};
use swtk_core::gauge::{alpha_square_from_flux, Connection};
use swtk_core::geometry::Geometry;
use swtk_core::spinor_algebra::Spinor;

use crate::config::{ExperimentConfig, InitKind};
use crate::report::{fmt_f64, Metadata};
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct FlowReport {
    pub metadata: Metadata,
    pub config: ExperimentConfig,
    pub options: FlowOptions,
    pub status: FlowStatus,
    pub classification: Classification,
    /// Classification of the final point from residuals alone, shown even
    /// when the run did not converge.
    pub final_point_class: Classification,
    pub iterations: usize,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub final_grad_norm: f64,
    pub harmonic_energy: f64,
    pub energy: EnergyReport,
    pub el_residual_spinor: f64,
    pub el_residual_connection: f64,
    pub curvature_defect: f64,
    pub dirac_defect: f64,
    pub sup_phi: f64,
    pub bounds: BoundReport,
    pub theorem: TheoremCheck,
}

pub struct FlowRun {
    pub report: FlowReport,
    pub trace: Vec<Vec<String>>,
}

/// Starting point named by `flow.init`.
///
/// `constant` puts `|φ|² = max(-k, 0)` on the harmonic connection, which is a
/// critical point of the spinor equation when `k` is constant.
pub fn initial_point(c: &ExperimentConfig, g: &Geometry) -> Result<ConfigurationPoint, CliError> {
    let flux = c.flux_matrix()?;
    let p = match c.init {
        InitKind::Random => random_start(g, flux, c.seed, c.init_amplitude, c.fluct_amplitude)?,
        InitKind::Zero => ConfigurationPoint::new(Connection::harmonic(flux, g), SpinorField::zeros(g), g)?,
        InitKind::Constant => {
            let phi = SpinorField(
                g.k_field()
                    .iter()
                    .map(|&k| Spinor::from_re((-k).max(0.0).sqrt(), 0.0))
                    .collect(),
            );
            ConfigurationPoint::new(Connection::harmonic(flux, g), phi, g)?
        }
    };
    Ok(p)
}

pub fn run(c: &ExperimentConfig) -> Result<FlowRun, CliError> {
    let g = c.geometry()?;
    let flux = c.flux_matrix()?;
    let opts = c.flow_options(&g);
    let p0 = initial_point(c, &g)?;
    let r = minimize(&p0, &g, &opts)?;
    log::info!("flow {:?} after {} iterations", r.status, r.iterations);
    let alpha_square = alpha_square_from_flux(&flux);
    let final_point_class = classify_point(&r.point, &g, &opts.thresholds)?;
    let theorem = theorem_check(r.classification, alpha_square, &g)?;
    let (curvature_defect, dirac_defect) = monopole_defects(&r.point, &g)?;
    let trace = r
        .energy_trace
        .iter()
        .zip(&r.grad_norm_trace)
        .enumerate()
        .map(|(i, (e, gn))| vec![i.to_string(), fmt_f64(*e), fmt_f64(*gn)])
        .collect();
    let report = FlowReport {
        metadata: Metadata::new("flow", c.seed, c.parallel),
        config: c.clone(),
        options: opts,
        status: r.status,
        classification: r.classification,
        final_point_class,
        iterations: r.iterations,
        initial_energy: r.energy_trace[0],
        final_energy: r.final_energy(),
        final_grad_norm: r.final_grad_norm,
        harmonic_energy: harmonic_energy(&flux, &g),
        energy: sw_energy(&r.point, &g)?,
        el_residual_spinor: el_residual_spinor(&r.point, &g)?,
        el_residual_connection: el_residual_connection(&r.point, &g)?,
        curvature_defect,
        dirac_defect,
        sup_phi: r.point.phi.sup_norm(),
        bounds: r.bounds,
        theorem,
    };
    Ok(FlowRun { report, trace })
}
