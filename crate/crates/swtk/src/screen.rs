//! `swtk screen`: characteristic classes of a form whose square lies in the
//! admissibility window.

use serde::Serialize;

use swtk_core::admissibility::{enumerate_admissible_with_budget, q_value, window, Window};

use crate::config::ExperimentConfig;
use crate::report::{fmt_f64, Metadata};
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct ScreenRow {
    pub alpha: Vec<i64>,
    pub q_value: i64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScreenReport {
    pub metadata: Metadata,
    pub config: ExperimentConfig,
    pub form: String,
    pub rank: usize,
    pub determinant: i64,
    pub even: bool,
    pub volume: f64,
    pub k_minus: f64,
    pub window: Window,
    pub coeff_bound: u32,
    pub count: usize,
    pub rows: Vec<ScreenRow>,
}

impl ScreenReport {
    pub fn csv(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let mut header: Vec<String> = (1..=self.rank).map(|i| format!("alpha_{i}")).collect();
        header.extend(["q_value", "window_lo", "window_hi", "margin"].map(String::from));
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut row: Vec<String> = r.alpha.iter().map(|a| a.to_string()).collect();
                row.push(r.q_value.to_string());
                row.push(fmt_f64(self.window.lo));
                row.push(fmt_f64(self.window.hi));
                row.push(fmt_f64(r.margin));
                row
            })
            .collect();
        (header, rows)
    }
}

/// Volume and `k⁻` default to those of the configured geometry.
pub fn run(c: &ExperimentConfig) -> Result<ScreenReport, CliError> {
    let q = c.intersection_form()?;
    let g = c.geometry()?;
    let v = c.screen_volume.unwrap_or_else(|| g.volume());
    let k_minus = c.screen_k_minus.unwrap_or_else(|| g.k_minus());
    let w = window(v, k_minus)?;
    let classes = enumerate_admissible_with_budget(&q, c.coeff_bound, v, k_minus, c.budget)?;
    let rows = classes
        .iter()
        .map(|a| {
            let s = q_value(&q, a)?;
            Ok(ScreenRow {
                alpha: a.0.clone(),
                q_value: s,
                margin: w.margin(s as f64),
            })
        })
        .collect::<Result<Vec<_>, swtk_core::Error>>()?;
    Ok(ScreenReport {
        metadata: Metadata::new("screen", c.seed, c.parallel),
        config: c.clone(),
        form: c.form.clone(),
        rank: q.rank(),
        determinant: q.determinant() as i64,
        even: q.is_even(),
        volume: v,
        k_minus,
        window: w,
        coeff_bound: c.coeff_bound,
        count: rows.len(),
        rows,
    })
}
