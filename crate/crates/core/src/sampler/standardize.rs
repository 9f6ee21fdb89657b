//! Centering and scaling of sampled counts by their leading asymptotics.
//!
//! Bulk: `pi^{1/4} (N - b r^{2b} n - sqrt(2) b r^b s sqrt(n)) / (sqrt(b r^b) n^{1/4})`.
//! Edge: `(N - n - c_1(s) sqrt(n)) / (sqrt(c_2(s)) n^{1/4})`.

use std::f64::consts::{PI, SQRT_2};

use super::SampleBatch;
use crate::asymptotics::closed_form::{edge_c1, edge_c2};
use crate::asymptotics::RegimeKind;
use crate::ensemble::{radii, MergeConfig, Regime};
use crate::error::{Error, Result};

fn check_origin(batch: &SampleBatch, cfg: &MergeConfig, mode: RegimeKind) -> Result<()> {
    if RegimeKind::from(cfg.regime()) != mode {
        return Err(Error::param(
            "mode",
            format!(
                "{mode:?} standardization requested for a {:?} configuration",
                RegimeKind::from(cfg.regime())
            ),
        ));
    }
    let want = radii(&batch.params, cfg)?;
    let same = want.len() == batch.radii.len()
        && want
            .iter()
            .zip(&batch.radii)
            .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs());
    if !same {
        return Err(Error::param("batch", "radii do not belong to this configuration"));
    }
    Ok(())
}

/// Per-offset `(center, scale)`.
fn affine(batch: &SampleBatch, cfg: &MergeConfig) -> Vec<(f64, f64)> {
    let p = &batch.params;
    let (b, n) = (p.b(), p.n() as f64);
    let (rn, qn) = (n.sqrt(), n.sqrt().sqrt());
    cfg.offsets()
        .iter()
        .map(|&s| match cfg.regime() {
            Regime::Bulk { r } => {
                let rb = r.powf(b);
                (
                    b * rb * rb * n + SQRT_2 * b * rb * s * rn,
                    (b * rb).sqrt() * qn / PI.powf(0.25),
                )
            }
            Regime::Edge => (n + edge_c1(b, s) * rn, edge_c2(b, s).sqrt() * qn),
        })
        .collect()
}

/// Rows are replicas, columns offsets.
pub fn standardize(batch: &SampleBatch, cfg: &MergeConfig, mode: RegimeKind) -> Result<Vec<Vec<f64>>> {
    check_origin(batch, cfg, mode)?;
    let coef = affine(batch, cfg);
    Ok(batch
        .counts
        .iter()
        .map(|row| {
            row.iter()
                .zip(&coef)
                .map(|(&c, (mu, sd))| (f64::from(c) - mu) / sd)
                .collect()
        })
        .collect())
}

/// As [`standardize`], but each column is centered at its sample mean.
pub fn standardize_centered(batch: &SampleBatch, cfg: &MergeConfig, mode: RegimeKind) -> Result<Vec<Vec<f64>>> {
    check_origin(batch, cfg, mode)?;
    let coef = affine(batch, cfg);
    let count = batch.replicas() as f64;
    let means: Vec<f64> = (0..batch.m())
        .map(|l| batch.counts.iter().map(|row| f64::from(row[l])).sum::<f64>() / count)
        .collect();
    Ok(batch
        .counts
        .iter()
        .map(|row| {
            row.iter()
                .zip(&coef)
                .zip(&means)
                .map(|((&c, (_, sd)), mu)| (f64::from(c) - mu) / sd)
                .collect()
        })
        .collect())
}
