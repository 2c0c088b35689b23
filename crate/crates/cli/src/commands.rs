use std::time::Instant;

use num_traits::ToPrimitive;

use penrose_strichartz::criticality::{criticality_report, first_variation, i_exact_d2};
use penrose_strichartz::deficit::{
    constant_identities, deficit_report, dist_to_m, fstar_norm_sq_closed, is_sharp, lower_bound_constant,
    phi, sharp_constant, sharp_constant_closed, taylor_check, DistOptions,
};
use penrose_strichartz::penrose::fstar;
use penrose_strichartz::quadform::{build_t5, gap_certificate, gap_constant, gap_lower_bound, T5Kind};
use penrose_strichartz::random::{random_orthogonal, random_pair};
use penrose_strichartz::{CoeffField, DataPair, MultiIndex, NormFamily};

use crate::output::{Cell, Format, Report, Table};
use crate::suites::{self, Suite, VerifyConfig};
use crate::{Cli, CliError, Command, DataArgs, LMAX_GUARD};

type Out = Result<(Report, Format), CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    /// (ε, ψ/ε², φ/ε²) per seed.
    Taylor,
    /// Rows of the d = 5 dominance certificates.
    Gap5,
    /// I(d) for even d ≤ 16.
    Criticality,
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn check_lmax(cli: &Cli, lmax: usize) -> Result<(), CliError> {
    if lmax > LMAX_GUARD && !cli.allow_large_lmax {
        return usage(format!("--lmax {lmax} exceeds {LMAX_GUARD}; pass --allow-large-lmax to proceed"));
    }
    Ok(())
}

/// f minus its component along f⋆.
fn orthogonalize(f: &DataPair<f64>, family: NormFamily) -> Result<DataPair<f64>, CliError> {
    let star = fstar::<f64>(f.d(), f.lmax());
    let c = family.inner(f, &star)? / family.norm_sq(&star)?;
    Ok(f.axpy(-c, &star)?)
}

fn load(cli: &Cli, a: &DataArgs) -> Result<DataPair<f64>, CliError> {
    match &a.input {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let f = DataPair::<f64>::from_json(&text)?;
            check_lmax(cli, f.lmax())?;
            Ok(f)
        }
        None => {
            check_lmax(cli, a.lmax)?;
            Ok(random_pair(a.d, a.lmax, a.decay, a.seed)?)
        }
    }
}

fn opt_tag(v: Option<f64>, paper: bool) -> Cell {
    match v {
        Some(x) if paper => Cell::paper(x),
        Some(x) => Cell::computed(x),
        None => Cell::Null,
    }
}

pub fn run(cli: &Cli) -> Out {
    match &cli.command {
        Command::Constants { d } => constants(d),
        Command::Criticality { d, seeds, seed, lmax, tolerance } => {
            check_lmax(cli, lmax.unwrap_or(0))?;
            criticality(d, *seeds, *seed, *lmax, *tolerance)
        }
        Command::Gap { d, lscan, lmax, seeds, seed } => {
            check_lmax(cli, *lmax)?;
            gap(d, *lscan, *lmax, *seeds, *seed)
        }
        Command::Deficit { data, eps } => deficit(&load(cli, data)?, *eps),
        Command::Dist { data, restarts } => dist(&load(cli, data)?, *restarts, data.seed),
        Command::Taylor { d, lmax, seed, seeds, eps, decay, tolerance } => {
            check_lmax(cli, *lmax)?;
            taylor(*d, *lmax, *seed, *seeds, eps, *decay, *tolerance)
        }
        Command::RandomData { d, lmax, seed, decay, orthogonal } => {
            check_lmax(cli, *lmax)?;
            if cli.format == Some(Format::Csv) {
                return usage("random-data writes DataPair JSON; --format csv is not available");
            }
            let f = if *orthogonal {
                random_orthogonal(*d, *lmax, *decay, *seed)?
            } else {
                random_pair(*d, *lmax, *decay, *seed)?
            };
            Ok((data_report(&f), Format::Json))
        }
        Command::Verify { suite, lscan, seed, tolerance, inject } => {
            let cfg = VerifyConfig {
                lscan: *lscan,
                seed: *seed,
                tolerances: tolerance.iter().cloned().collect(),
                fault: *inject,
            };
            verify(suite, &cfg)
        }
        Command::PlotData { kind, d, lmax, seed, seeds, eps, lscan } => {
            check_lmax(cli, *lmax)?;
            plot_data(*kind, *d, *lmax, *seed, *seeds, eps, *lscan)
        }
    }
}

/// DataPair JSON is emitted verbatim, whatever the format.
fn data_report(f: &DataPair<f64>) -> Report {
    let mut r = Report::new("random-data", Table::new(&[]));
    r.raw = Some(f.to_json() + "\n");
    r
}

fn constants(dims: &[usize]) -> Out {
    let mut t = Table::new(&[
        "d",
        "family",
        "p",
        "sharp",
        "fstar_norm_sq",
        "fstar_norm_sq_computed",
        "sharp_constant",
        "sharp_constant_quadrature",
        "quadrature_error",
        "gap_constant",
        "lower_bound_constant",
        "lower_bound_computed",
    ]);
    for &d in dims {
        let family = NormFamily::for_dim(d);
        let norm = family.norm_sq(&fstar::<f64>(d, 0))?;
        let s = sharp_constant::<f64>(d, family)?;
        let gap = gap_constant::<f64>(d).ok();
        let lower = lower_bound_constant(d).ok();
        t.push(vec![
            d.into(),
            format!("{family:?}").to_lowercase().as_str().into(),
            family.exponent::<f64>(d).into(),
            is_sharp(d).into(),
            opt_tag(fstar_norm_sq_closed(d, family), true),
            Cell::computed(norm),
            opt_tag(sharp_constant_closed(d, family), true),
            Cell::computed(s.value),
            s.error.into(),
            opt_tag(gap, true),
            opt_tag(lower, true),
            opt_tag(gap.map(|g| g / (2.0 * s.value * s.value * norm)), false),
        ]);
    }
    let mut r = Report::new("constants", t);
    r.detail("identities", &constant_identities());
    for &d in dims {
        if !is_sharp(d) {
            r.notes.push(format!("d = {d}: quadrature only, f⋆ is not an extremizer (non-sharp)"));
        }
    }
    Ok((r, Format::Text))
}

fn criticality(dims: &[usize], seeds: u64, seed: u64, lmax: Option<usize>, tol: Option<f64>) -> Out {
    let mut t = Table::new(&[
        "d",
        "quantity",
        "exact_fraction",
        "exact",
        "value",
        "error",
        "i_fourier",
        "sign_expected",
        "sign_observed",
        "seeds",
        "passed",
    ]);
    let mut failures = Vec::new();
    for &d in dims {
        if d % 2 == 0 {
            let rep = criticality_report(d, tol.unwrap_or(1e-8))?;
            let exact = (d == 2).then(|| i_exact_d2().to_f64().unwrap_or(f64::NAN));
            if !rep.passed() {
                failures.push(format!("I({d})"));
            }
            t.push(vec![
                d.into(),
                "I(d)".into(),
                rep.i_exact.clone().map_or(Cell::Null, Cell::Text),
                exact.map_or(Cell::Null, Cell::paper),
                Cell::computed(rep.i_direct),
                rep.i_direct_error.into(),
                Cell::opt(rep.i_fourier.as_ref().map(|f| f.value)),
                rep.sign_expected.into(),
                rep.sign_observed.into(),
                Cell::Null,
                rep.passed().into(),
            ]);
        } else {
            let tol = tol.unwrap_or(1e-10);
            let family = NormFamily::HalfWave;
            // sphere grids grow quickly with d
            let lmax = lmax.unwrap_or(if d <= 7 { 8 } else { 4 });
            let (mut worst, mut err) = (0.0f64, 0.0f64);
            for k in 0..seeds {
                let f = orthogonalize(&random_pair(d, lmax, 3.0, seed + k)?, family)?;
                let norm = family.norm_sq(&f)?.sqrt();
                let v = first_variation(d, &f)?;
                worst = worst.max(v.value.abs() / norm);
                err = err.max(v.error / norm);
            }
            let passed = worst <= tol;
            if !passed {
                failures.push(format!("first variation d = {d}"));
            }
            t.push(vec![
                d.into(),
                "max |first variation|/‖f‖".into(),
                Cell::Null,
                Cell::Null,
                Cell::computed(worst),
                err.into(),
                Cell::Null,
                Cell::Null,
                Cell::Null,
                seeds.into(),
                passed.into(),
            ]);
        }
    }
    let mut r = Report::new("criticality", t);
    r.passed = Some(failures.is_empty());
    r.failures = failures;
    Ok((r, Format::Text))
}

fn gap(dims: &[usize], lscan: usize, lmax: usize, seeds: u64, seed: u64) -> Out {
    let mut t = Table::new(&["d", "check", "value", "bound", "holds"]);
    let mut failures = Vec::new();
    let mut r_details = Vec::new();
    let mut record = |t: &mut Table, d: usize, check: &str, value: Cell, bound: Cell, holds: bool| {
        if !holds {
            failures.push(format!("d = {d}: {check}"));
        }
        t.push(vec![d.into(), check.into(), value, bound, holds.into()]);
    };
    for &d in dims {
        if d != 3 && d != 5 {
            return usage(format!("spectral gaps are available for d = 3 and d = 5, not {d}"));
        }
        let bound = gap_constant::<f64>(d)?;
        let slack = if d == 3 { 1e-12 } else { 1e-10 };
        let mut lowest = f64::INFINITY;
        for k in 0..seeds {
            let f = random_orthogonal::<f64>(d, lmax, 2.0, seed + k)?;
            lowest = lowest.min(gap_lower_bound(&f)?.ratio);
        }
        record(
            &mut t,
            d,
            "min Rayleigh quotient",
            Cell::computed(lowest),
            Cell::paper(bound),
            lowest >= bound * (1.0 - slack),
        );
        if d == 3 {
            let mode = CoeffField::mode(3, 4, 2, &MultiIndex(vec![0, 0]), 1.0)?;
            let f = DataPair::new(CoeffField::zeros(3, 4), mode)?;
            let ratio = gap_lower_bound(&f)?.ratio;
            record(
                &mut t,
                d,
                "Rayleigh quotient of the l = 2 mode",
                Cell::computed(ratio),
                Cell::paper(bound),
                (ratio - bound).abs() <= 1e-14 * bound,
            );
        } else {
            for (kind, name) in
                [(T5Kind::Zero, "T5 zero-block dominance"), (T5Kind::One, "T5 one-block dominance")]
            {
                let cert = gap_certificate(&build_t5(kind, lscan)?, true);
                let min_slack = cert.rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
                record(&mut t, d, name, Cell::computed(min_slack), Cell::Num(0.0), cert.holds);
                r_details.push((name, cert.summary()));
            }
        }
    }
    let mut r = Report::new("gap", t);
    for (name, s) in &r_details {
        r.notes.push(format!("{name}: {s}"));
    }
    r.detail("certificates", &r_details.iter().map(|(n, s)| (n.to_string(), s.clone())).collect::<Vec<_>>());
    r.passed = Some(failures.is_empty());
    r.failures = failures;
    Ok((r, Format::Text))
}

fn deficit(f: &DataPair<f64>, eps: Option<f64>) -> Out {
    let family = NormFamily::for_dim(f.d());
    let g = match eps {
        Some(e) => fstar::<f64>(f.d(), f.lmax()).axpy(e, &orthogonalize(f, family)?)?,
        None => f.clone(),
    };
    let rep = deficit_report(&g, family)?;
    let mut t = Table::new(&[
        "d",
        "family",
        "p",
        "sharp_constant",
        "sobolev_norm",
        "strichartz_norm",
        "psi",
        "phi",
        "quadrature_error",
        "label",
    ]);
    t.push(vec![
        rep.d.into(),
        format!("{:?}", rep.family).to_lowercase().as_str().into(),
        rep.p.into(),
        Cell::computed(rep.sharp_constant),
        rep.sobolev_norm.into(),
        rep.strichartz_norm.into(),
        rep.psi.into(),
        rep.phi.into(),
        rep.quadrature_error.into(),
        rep.label.clone().into(),
    ]);
    let mut r = Report::new("deficit", t);
    if rep.sharp {
        r.passed = Some(rep.nonnegative());
        if !rep.nonnegative() {
            r.failures.push("psi is negative beyond its error bound".into());
        }
    }
    r.detail("report", &rep);
    Ok((r, Format::Text))
}

fn dist(f: &DataPair<f64>, restarts: usize, seed: u64) -> Out {
    let d = f.d();
    let family = NormFamily::for_dim(d);
    let opts = DistOptions { restarts, seed, ..Default::default() };
    let res = dist_to_m(f, &opts)?;
    let norm = family.norm_sq(f)?.sqrt();
    let mut t = Table::new(&["d", "lmax", "norm", "dist_upper", "converged", "evaluations", "tail"]);
    let mut cells = vec![
        d.into(),
        f.lmax().into(),
        norm.into(),
        res.dist_upper.into(),
        res.converged.into(),
        res.history_len.into(),
        res.tail.into(),
    ];
    let mut r_passed = None;
    let mut failures = Vec::new();
    if is_sharp(d) && (d == 3 || d == 5) {
        let ph = phi(f, family)?;
        let s = sharp_constant::<f64>(d, family)?.value;
        let upper = s * s * res.dist_upper.powi(2);
        let holds = ph.value <= upper + ph.error + 1e-12 * s * s * norm * norm;
        if !holds {
            failures.push("phi <= S^2 dist^2".to_string());
        }
        t.columns.extend(["phi", "upper_bound", "holds"]);
        cells.extend([ph.value.into(), upper.into(), holds.into()]);
        r_passed = Some(holds);
    }
    t.push(cells);
    let mut r = Report::new("dist", t);
    r.detail("params", &res.params);
    r.passed = r_passed;
    r.failures = failures;
    Ok((r, Format::Text))
}

/// The ε grid continued by two halvings of its smallest entry.
fn extended(eps: &[f64]) -> Vec<f64> {
    let m = eps.iter().copied().fold(f64::INFINITY, f64::min);
    let mut out = eps.to_vec();
    out.extend([m / 2.0, m / 4.0]);
    out
}

fn taylor(d: usize, lmax: usize, seed: u64, seeds: u64, eps: &[f64], decay: f64, tol: f64) -> Out {
    let mut t = Table::new(&[
        "seed",
        "q",
        "limit",
        "rel_error",
        "phi_target",
        "phi_limit",
        "phi_rel_error",
        "slope",
        "orders",
        "linear_decay",
        "passed",
    ]);
    let mut failures = Vec::new();
    let mut reports = Vec::new();
    for k in seed..seed + seeds {
        let f = random_orthogonal::<f64>(d, lmax, decay, k)?;
        let rep = taylor_check(&f, eps)?;
        let ext = taylor_check(&f, &extended(eps))?;
        let passed = rep.rel_error() <= tol && rep.phi_rel_error() <= tol && ext.linear_decay();
        if !passed {
            failures.push(format!("seed {k}"));
        }
        let orders: Vec<String> = ext.orders.iter().map(|o| format!("{o:.4}")).collect();
        t.push(vec![
            k.into(),
            rep.q.into(),
            rep.limit.into(),
            rep.rel_error().into(),
            rep.phi_target.into(),
            rep.phi_limit.into(),
            rep.phi_rel_error().into(),
            rep.slope.into(),
            orders.join(" ").into(),
            ext.linear_decay().into(),
            passed.into(),
        ]);
        reports.push(rep);
    }
    let mut r = Report::new("taylor", t);
    r.detail("reports", &reports);
    r.passed = Some(failures.is_empty());
    r.failures = failures;
    Ok((r, Format::Text))
}

fn verify(selected: &[Suite], cfg: &VerifyConfig) -> Out {
    let suites: Vec<Suite> = if selected.is_empty() { Suite::ALL.to_vec() } else { selected.to_vec() };
    let clock = Instant::now();
    let checks = suites::run(&suites, cfg);
    let mut t = Table::new(&["suite", "check", "value", "tolerance", "passed"]);
    let mut failures = Vec::new();
    let mut r_notes = Vec::new();
    for c in &checks {
        if !c.passed {
            failures.push(format!("{}.{}", c.suite, c.name));
        }
        t.push(vec![
            c.suite.into(),
            c.name.clone().into(),
            Cell::opt(c.value),
            Cell::opt(c.tolerance),
            c.passed.into(),
        ]);
        if !c.passed {
            r_notes.push(format!("FAIL {}.{} ({:.2} s)", c.suite, c.name, c.seconds));
        }
    }
    let mut r = Report::new("verify", t);
    r_notes.push(format!("{} checks in {:.1} s", checks.len(), clock.elapsed().as_secs_f64()));
    r.notes = r_notes;
    r.passed = Some(failures.is_empty());
    r.failures = failures;
    Ok((r, Format::Text))
}

fn plot_data(kind: PlotKind, d: usize, lmax: usize, seed: u64, seeds: u64, eps: &[f64], lscan: usize) -> Out {
    let r = match kind {
        PlotKind::Taylor => {
            let mut t = Table::new(&["seed", "eps", "psi_ratio", "phi_ratio", "q", "phi_target"]);
            for k in seed..seed + seeds {
                let rep = taylor_check(&random_orthogonal::<f64>(d, lmax, 3.0, k)?, eps)?;
                for i in 0..rep.eps.len() {
                    t.push(vec![
                        k.into(),
                        rep.eps[i].into(),
                        rep.psi_ratios[i].into(),
                        rep.phi_ratios[i].into(),
                        rep.q.into(),
                        rep.phi_target.into(),
                    ]);
                }
            }
            Report::new("plot-data", t)
        }
        PlotKind::Gap5 => {
            let mut t = Table::new(&["block", "l", "m1", "a", "b", "slack"]);
            for (kind, name) in [(T5Kind::Zero, "zero"), (T5Kind::One, "one")] {
                for row in gap_certificate(&build_t5(kind, lscan)?, false).rows {
                    t.push(vec![
                        name.into(),
                        row.l.into(),
                        row.m1.into(),
                        row.a.into(),
                        row.b.into(),
                        row.slack.into(),
                    ]);
                }
            }
            Report::new("plot-data", t)
        }
        PlotKind::Criticality => {
            let mut t = Table::new(&["d", "i_direct", "error", "sign"]);
            for d in (2..=16).step_by(2) {
                let rep = criticality_report(d, 1e-8)?;
                t.push(vec![
                    d.into(),
                    rep.i_direct.into(),
                    rep.i_direct_error.into(),
                    rep.sign_observed.into(),
                ]);
            }
            Report::new("plot-data", t)
        }
    };
    Ok((r, Format::Csv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_grid() {
        assert_eq!(extended(&[0.1, 0.05, 0.025]), vec![0.1, 0.05, 0.025, 0.0125, 0.00625]);
    }

    #[test]
    fn orthogonalized_data() {
        let f = random_pair::<f64>(7, 3, 2.0, 1).unwrap();
        let g = orthogonalize(&f, NormFamily::HalfWave).unwrap();
        let ip = NormFamily::HalfWave.inner(&g, &fstar(7, 3)).unwrap();
        assert!(ip.abs() < 1e-13);
    }
}
