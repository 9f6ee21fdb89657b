//! One function per subcommand, each turning a resolved config into a table.

use diskstat_core::asymptotics::{closed_form_moments, clt_covariance, expansion_coeffs, RegimeKind};
use diskstat_core::ensemble::{covariance_exact, log_mgf_exact, mean_exact, radii, variance_exact};
use diskstat_core::sampler::{
    column_cumulants, empirical_correlation, empirical_cumulants, sample_counts_with_budget, standardize,
};
use diskstat_core::Fugacities;

use crate::config::RunConfig;
use crate::output::{Cell, Table};
use crate::CliError;

/// Exact log-MGF for every `n` of the grid.
pub fn mgf(cfg: &RunConfig) -> Result<Table, CliError> {
    let mut table = Table::new("mgf", &["n", "u", "radii", "log_mgf"]);
    let u = Fugacities::new(cfg.u.clone())?;
    for &n in &cfg.n_grid {
        let params = cfg.params(n)?;
        let rad = match &cfg.radii {
            Some(r) => r.clone(),
            None => radii(&params, &cfg.merge_config()?)?,
        };
        let value = log_mgf_exact(&params, &rad, &u)?;
        table.push(vec![
            Cell::Int(n as u64),
            Cell::List(cfg.u.clone()),
            Cell::List(rad),
            value.into(),
        ]);
    }
    Ok(table)
}

fn regime_name(kind: RegimeKind) -> &'static str {
    match kind {
        RegimeKind::Bulk => "bulk",
        RegimeKind::Edge => "edge",
    }
}

/// `C1..C4` with error estimates; the individual integrals go to the summary.
pub fn coeffs(cfg: &RunConfig) -> Result<Table, CliError> {
    let merge = cfg.merge_config()?;
    let c = expansion_coeffs(cfg.b, cfg.alpha, &merge, &cfg.u, &cfg.quadrature()?)?;
    let mut table = Table::new(
        "coeffs",
        &["regime", "C1", "C2", "C3", "C4", "err_C1", "err_C2", "err_C3", "err_C4"],
    );
    let mut row = vec![Cell::from(regime_name(c.regime))];
    row.extend(c.c.iter().map(|&x| Cell::Num(x)));
    row.extend(c.errors.iter().map(|&x| Cell::Num(x)));
    table.push(row);
    for rep in &c.integrals {
        table.note(format!("integral {}", rep.name), Cell::List(vec![rep.value, rep.error]));
    }
    Ok(table)
}

/// Least-squares slope of `ln|R|` against `ln n`; `None` if any residual is 0.
fn decay_exponent(grid: &[usize], residuals: &[f64]) -> Option<f64> {
    if residuals.contains(&0.0) {
        return None;
    }
    let xs: Vec<f64> = grid.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|r| r.abs().ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

/// Exact versus four-term expansion across the grid.
pub fn converge(cfg: &RunConfig) -> Result<Table, CliError> {
    let merge = cfg.merge_config()?;
    let c = expansion_coeffs(cfg.b, cfg.alpha, &merge, &cfg.u, &cfg.quadrature()?)?;
    let u = Fugacities::new(cfg.u.clone())?;
    let mut table = Table::new("converge", &["n", "exact", "asymptotic", "residual", "scaled_residual"]);
    let mut residuals = Vec::new();
    for &n in &cfg.n_grid {
        let params = cfg.params(n)?;
        let exact = log_mgf_exact(&params, &radii(&params, &merge)?, &u)?;
        let asym = c.evaluate(n as f64);
        let res = exact - asym;
        let nf = n as f64;
        residuals.push(res);
        table.push(vec![
            Cell::Int(n as u64),
            exact.into(),
            asym.into(),
            res.into(),
            (res.abs() * nf / nf.ln().powi(2)).into(),
        ]);
    }
    table.note("fitted_exponent", decay_exponent(&cfg.n_grid, &residuals));
    Ok(table)
}

fn pair_label(l: usize, k: usize) -> String {
    format!("{}-{}", l + 1, k + 1)
}

fn unit_vec(m: usize, entries: &[(usize, u32)]) -> Vec<u32> {
    let mut j = vec![0; m];
    for &(i, k) in entries {
        j[i] += k;
    }
    j
}

/// Monte Carlo moments against exact and asymptotic values.
#[allow(clippy::needless_range_loop)]
pub fn sample(cfg: &RunConfig) -> Result<Table, CliError> {
    let merge = cfg.merge_config()?;
    let n = cfg.n_grid[0];
    let params = cfg.params(n)?;
    let rad = radii(&params, &merge)?;
    let batch = sample_counts_with_budget(&params, &rad, cfg.replicas, cfg.seed, cfg.max_draws)?;
    let quad = cfg.quadrature()?;
    let closed = closed_form_moments(cfg.b, cfg.alpha, &merge, &quad)?;
    let sigma = clt_covariance(cfg.b, cfg.alpha, &merge, &quad)?;
    let m = merge.m();
    let nf = n as f64;

    let mut table = Table::new(
        "sample",
        &["quantity", "index", "empirical", "stderr", "exact", "asymptotic", "z"],
    );
    let push = |table: &mut Table, q: &str, idx: String, est: f64, se: f64, exact: Option<f64>, asym: f64| {
        let reference = exact.unwrap_or(asym);
        let z = if se > 0.0 { Some((est - reference) / se) } else { None };
        table.push(vec![
            q.into(),
            idx.into(),
            est.into(),
            se.into(),
            exact.into(),
            asym.into(),
            z.into(),
        ]);
    };

    for l in 0..m {
        let e = empirical_cumulants(&batch, &unit_vec(m, &[(l, 1)]))?;
        let exact = mean_exact(&params, rad[l])?;
        push(
            &mut table,
            "mean",
            (l + 1).to_string(),
            e.estimate,
            e.stderr,
            Some(exact),
            closed.mean[l].evaluate(nf),
        );
    }
    for l in 0..m {
        let e = empirical_cumulants(&batch, &unit_vec(m, &[(l, 2)]))?;
        let exact = variance_exact(&params, rad[l])?;
        push(
            &mut table,
            "variance",
            (l + 1).to_string(),
            e.estimate,
            e.stderr,
            Some(exact),
            closed.variance[l].evaluate(nf),
        );
    }
    for pair in &closed.covariance {
        let (l, k) = (pair.l, pair.k);
        let e = empirical_cumulants(&batch, &unit_vec(m, &[(l, 1), (k, 1)]))?;
        let exact = covariance_exact(&params, rad[l], rad[k])?;
        push(
            &mut table,
            "covariance",
            pair_label(l, k),
            e.estimate,
            e.stderr,
            Some(exact),
            pair.covariance.evaluate(nf),
        );
    }

    let kind = RegimeKind::from(merge.regime());
    let z = standardize(&batch, &merge, kind)?;
    let columns: Vec<Vec<f64>> = (0..m).map(|l| z.iter().map(|row| row[l]).collect()).collect();
    for l in 0..m {
        let e = column_cumulants(&columns, &unit_vec(m, &[(l, 1)]))?;
        push(
            &mut table,
            "standardized_mean",
            (l + 1).to_string(),
            e.estimate,
            e.stderr,
            None,
            0.0,
        );
        let e = column_cumulants(&columns, &unit_vec(m, &[(l, 2)]))?;
        push(
            &mut table,
            "standardized_variance",
            (l + 1).to_string(),
            e.estimate,
            e.stderr,
            None,
            1.0,
        );
    }
    for l in 0..m {
        for k in l + 1..m {
            let e = empirical_correlation(&z, l, k)?;
            push(
                &mut table,
                "standardized_correlation",
                pair_label(l, k),
                e.estimate,
                e.stderr,
                None,
                sigma[l][k],
            );
        }
    }
    table.note("n", Cell::Int(n as u64));
    table.note("replicas", Cell::Int(cfg.replicas as u64));
    table.note("seed", Cell::Int(cfg.seed));
    Ok(table)
}

/// Closed-form coefficients of means, variances and covariances, and the
/// limiting correlation matrix.
pub fn moments(cfg: &RunConfig) -> Result<Table, CliError> {
    let merge = cfg.merge_config()?;
    let quad = cfg.quadrature()?;
    let closed = closed_form_moments(cfg.b, cfg.alpha, &merge, &quad)?;
    let sigma = clt_covariance(cfg.b, cfg.alpha, &merge, &quad)?;
    let mut table = Table::new(
        "moments",
        &[
            "quantity",
            "index",
            "offsets",
            "coef_n",
            "coef_sqrt_n",
            "coef_1",
            "coef_inv_sqrt_n",
            "value",
        ],
    );
    let s = merge.offsets();
    let expansion_row = |q: &str, idx: String, offs: Vec<f64>, e: &diskstat_core::asymptotics::Expansion| {
        let mut row = vec![q.into(), idx.into(), Cell::List(offs)];
        row.extend(e.to_array().iter().map(|&x| Cell::Num(x)));
        row.push(Cell::Empty);
        row
    };
    for (l, e) in closed.mean.iter().enumerate() {
        table.push(expansion_row("mean", (l + 1).to_string(), vec![s[l]], e));
    }
    for (l, e) in closed.variance.iter().enumerate() {
        table.push(expansion_row("variance", (l + 1).to_string(), vec![s[l]], e));
    }
    for p in &closed.covariance {
        table.push(expansion_row(
            "covariance",
            pair_label(p.l, p.k),
            vec![s[p.l], s[p.k]],
            &p.covariance,
        ));
    }
    for l in 0..s.len() {
        for k in l + 1..s.len() {
            let mut row = vec![
                "clt_correlation".into(),
                pair_label(l, k).into(),
                Cell::List(vec![s[l], s[k]]),
            ];
            row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, sigma[l][k].into()]);
            table.push(row);
        }
    }
    table.note("regime", regime_name(closed.regime));
    Ok(table)
}
