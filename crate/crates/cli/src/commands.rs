use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use waveguide_spectra::dirac2d::{
    asymptotic_report, existence_check, AsymptoticReport, ReportOptions, Truncation, CSV_HEADER,
};
use waveguide_spectra::effective::{
    count_negative, count_negative_on_line, effective_eigs, schrodinger_matrix, FluxChoice,
};
use waveguide_spectra::geometry::{bump_line, circle, ellipse, CurveGeometry, GeometryDocument, DEFAULT_SAMPLES};
use waveguide_spectra::transverse::{
    k_branch, k_tilde, nu, nu0, series_k1, series_k1_exact, series_nu1, series_nu1_exact,
};

use crate::args::{
    Cli, Command, DispersionArgs, EffectiveArgs, Format, Full2dArgs, GeometryCommand, SeriesArgs, TransverseArgs,
    TruncationArgs, VerifyArgs,
};
use crate::output::{config_value, num, Sink};
use crate::{ChecksFailed, InputError};

/// Grid for the open-curve Schrödinger model and the count schedule.
const OPEN_RESOLUTION: usize = 1600;
const CLOSED_RESOLUTION: usize = 64;
const LINE_STEPS: usize = 24_000;
const RESIDUAL_FACTOR: f64 = 0.6;
const SYMMETRY_TOL: f64 = 1e-8;

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Transverse(a) => transverse(&a),
        Command::Dispersion(a) => dispersion(&a),
        Command::Series(a) => series(&a),
        Command::Effective(a) => effective(&a),
        Command::Full2d(a) => full2d(&a),
        Command::Verify(a) => verify(&a),
        Command::Geometry(g) => geometry(g),
    }
}

fn input(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

/// Geometry from a JSON document or an inline `kind:params` spec.
pub fn load_geometry(spec: &str) -> anyhow::Result<CurveGeometry> {
    let inline = |kind: &str| spec.strip_prefix(kind).and_then(|r| r.strip_prefix(':'));
    let params = |rest: &str, n: usize| -> anyhow::Result<Vec<f64>> {
        let v: Vec<f64> = rest
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| input(format!("bad number '{t}' in '{spec}'"))))
            .collect::<anyhow::Result<_>>()?;
        if v.len() != n {
            return Err(input(format!("'{spec}' needs {n} comma-separated parameters")));
        }
        Ok(v)
    };
    if let Some(rest) = inline("circle") {
        return Ok(circle(params(rest, 1)?[0], DEFAULT_SAMPLES)?);
    }
    if let Some(rest) = inline("ellipse") {
        let v = params(rest, 2)?;
        return Ok(ellipse(v[0], v[1], DEFAULT_SAMPLES)?);
    }
    if let Some(rest) = inline("bump") {
        let v = params(rest, 3)?;
        return Ok(bump_line(v[0], v[1], v[2])?);
    }
    let text = std::fs::read_to_string(spec).map_err(|e| input(format!("cannot read geometry '{spec}': {e}")))?;
    let doc: GeometryDocument =
        serde_json::from_str(&text).map_err(|e| input(format!("invalid geometry document '{spec}': {e}")))?;
    Ok(doc.into_geometry()?)
}

fn transverse(a: &TransverseArgs) -> anyhow::Result<()> {
    if a.branch == 0 {
        return Err(input("branch index starts at 1"));
    }
    let config = config_value("transverse", a)?;
    let mut sink = Sink::csv(&config, "mu,k,nu,kind");
    for mu in a.mu_range.points() {
        let (k, kind) = if a.branch == 1 && mu <= -0.5 {
            (k_tilde(mu)?, "hyperbolic")
        } else {
            (k_branch(a.branch, mu)?, "oscillatory")
        };
        sink.row(&[num(mu), num(k), num(nu0(a.branch, mu)?), kind.into()]);
    }
    sink.finish(a.out.output.as_deref())
}

fn dispersion(a: &DispersionArgs) -> anyhow::Result<()> {
    if a.branches == 0 {
        return Err(input("need at least one branch"));
    }
    let config = config_value("dispersion", a)?;
    let header: Vec<String> = std::iter::once("xi".to_string())
        .chain((1..=a.branches).map(|j| format!("nu_{j}")))
        .collect();
    let mut sink = Sink::csv(&config, &header.join(","));
    for xi in a.xi_range.points() {
        let mut row = vec![num(xi)];
        for j in 1..=a.branches {
            row.push(num(nu(j, xi, a.mu)?));
        }
        sink.row(&row);
    }
    sink.finish(a.out.output.as_deref())
}

fn series(a: &SeriesArgs) -> anyhow::Result<()> {
    let config = config_value("series", a)?;
    let mut sink = Sink::csv(&config, "power,k1_exact,k1,nu1_exact,nu1");
    let (ke, kv) = (series_k1_exact(a.order), series_k1(a.order));
    let (ne, nv) = (series_nu1_exact(a.order), series_nu1(a.order));
    for j in 0..=a.order {
        sink.row(&[
            j.to_string(),
            ke[j].to_string(),
            num(kv.coefficients[j]),
            ne[j].to_string(),
            num(nv.coefficients[j]),
        ]);
    }
    sink.finish(a.out.output.as_deref())
}

fn effective(a: &EffectiveArgs) -> anyhow::Result<()> {
    let geom = load_geometry(&a.geom)?;
    let flux = match &a.flux {
        Some(s) => Some(s.parse::<FluxChoice>()?),
        None => None,
    };
    if flux.is_some() && !geom.is_closed() {
        return Err(input("a flux applies to closed curves only"));
    }
    let resolution = a
        .resolution
        .unwrap_or(if geom.is_closed() { CLOSED_RESOLUTION } else { OPEN_RESOLUTION });
    let op = schrodinger_matrix(&geom, resolution, flux)?;
    let count = a.count.min(op.dim());
    let values = effective_eigs(&op, count)?;
    let schedule = if geom.is_closed() {
        vec![resolution, 2 * resolution]
    } else {
        vec![resolution / 4, resolution / 2, resolution]
    };
    let negative = count_negative(&geom, &schedule)?;

    #[derive(Serialize)]
    struct Resolved<'a> {
        #[serde(flatten)]
        args: &'a EffectiveArgs,
        resolution: usize,
        flux_value: Option<f64>,
    }
    let flux_value = match &geom {
        CurveGeometry::Closed(c) => Some(flux.unwrap_or(FluxChoice::PiPlusTwo).value(c.length())),
        CurveGeometry::Open(_) => None,
    };
    let config = config_value("effective", &Resolved { args: a, resolution, flux_value })?;
    let mut sink = Sink::csv(&config, "j,eigenvalue");
    for (j, v) in values.iter().enumerate() {
        sink.row(&[(j + 1).to_string(), num(*v)]);
    }
    sink.comment(&format!("negative_count: {negative}"));
    if !geom.is_closed() {
        sink.comment(&format!("negative_count_line: {}", count_negative_on_line(&geom, LINE_STEPS)?));
    }
    sink.finish(a.out.output.as_deref())
}

fn truncation(t: &TruncationArgs) -> anyhow::Result<Truncation> {
    if t.p == 0 || t.nt == 0 || t.nq < 2 {
        return Err(input("truncation needs P >= 1, Nt >= 1 and at least 2 quadrature nodes"));
    }
    Ok(Truncation { p: t.p, nt: t.nt, nq_t: t.nq })
}

fn full2d(a: &Full2dArgs) -> anyhow::Result<()> {
    let geom = load_geometry(&a.geom)?;
    let opts = ReportOptions {
        truncation: truncation(&a.truncation)?,
        jmax: a.jmax,
        refine: !a.no_refine,
        workers: 1,
        effective_resolution: if geom.is_closed() { CLOSED_RESOLUTION } else { OPEN_RESOLUTION },
    };
    let report = asymptotic_report(&geom, a.m, &[a.eps], &opts)?;

    #[derive(Serialize)]
    struct Out<'a> {
        config: serde_json::Value,
        report: &'a waveguide_spectra::dirac2d::SpectrumReport,
    }
    let out = Out {
        config: config_value("full2d", a)?,
        report: &report.reports[0],
    };
    Sink::json(&out)?.finish(a.out.output.as_deref())
}

/// One PASS/FAIL verdict of `verify`.
#[derive(Debug, Clone, Serialize)]
struct Check {
    name: String,
    passed: bool,
    detail: String,
}

fn checks(geom: &CurveGeometry, a: &VerifyArgs, report: &AsymptoticReport, trunc: Truncation) -> Vec<Check> {
    let mut out = Vec::new();
    let rows = report.winning_residuals();
    for j in 0..a.jmax {
        let r: Vec<f64> = rows.iter().map(|row| row[j]).collect();
        let decreasing = report.converged[j];
        let factor = r.len() < 2 || r[r.len() - 1] <= RESIDUAL_FACTOR * r[0];
        out.push(Check {
            name: format!("residual decrease j={}", j + 1),
            passed: decreasing && factor,
            detail: format!(
                "r = [{}], flux {}",
                r.iter().map(|v| format!("{v:.6e}")).collect::<Vec<_>>().join(", "),
                report.winning_flux
            ),
        });
    }
    let sym = report.reports.iter().map(|r| r.symmetry_defect).fold(0.0, f64::max);
    out.push(Check {
        name: "spectral symmetry".into(),
        passed: sym <= SYMMETRY_TOL,
        detail: format!("max |lambda + lambda'| = {sym:.3e}"),
    });
    if geom.is_closed() {
        out.push(Check {
            name: "flux arbitration".into(),
            passed: true,
            detail: format!("winner {} (tie: {})", report.winning_flux, report.flux_tie),
        });
    } else {
        let eps = *a.eps_list.0.last().expect("non-empty list");
        let schedule = [OPEN_RESOLUTION / 4, OPEN_RESOLUTION / 2, OPEN_RESOLUTION];
        out.push(match existence_check(geom, eps, a.m, trunc, &schedule) {
            Ok(c) => Check {
                name: "bound-state existence".into(),
                passed: c.effective_count >= 1 && c.gap_count >= c.effective_count,
                detail: format!(
                    "eps={eps}: {} gap eigenvalues, effective negative count {}",
                    c.gap_count, c.effective_count
                ),
            },
            Err(e) => Check {
                name: "bound-state existence".into(),
                passed: false,
                detail: e.to_string(),
            },
        });
    }
    out
}

fn verify(a: &VerifyArgs) -> anyhow::Result<()> {
    let geom = load_geometry(&a.geom)?;
    let trunc = truncation(&a.truncation)?;
    if a.eps_list.0.is_empty() {
        return Err(input("empty width list"));
    }
    let opts = ReportOptions {
        truncation: trunc,
        jmax: a.jmax,
        refine: !a.no_refine,
        workers: a.workers.max(1),
        effective_resolution: a.effective_resolution,
    };
    let report = asymptotic_report(&geom, a.m, &a.eps_list.0, &opts)?;
    let checks = checks(&geom, a, &report, trunc);
    let failed = checks.iter().filter(|c| !c.passed).count();
    let config = config_value("verify", a)?;
    let sink = match a.format {
        Format::Csv => {
            let mut sink = Sink::csv(&config, CSV_HEADER);
            for row in report.csv_rows() {
                sink.line(&row);
            }
            sink.comment(&format!("winning_flux: {} tie: {}", report.winning_flux, report.flux_tie));
            for c in &checks {
                sink.comment(&format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
            }
            sink
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                config: serde_json::Value,
                report: &'a AsymptoticReport,
                checks: &'a [Check],
            }
            Sink::json(&Out { config, report: &report, checks: &checks })?
        }
    };
    sink.finish(a.out.output.as_deref())?;
    if failed > 0 {
        return Err(ChecksFailed(failed).into());
    }
    Ok(())
}

fn write_document(geom: &CurveGeometry, path: Option<&Path>) -> anyhow::Result<()> {
    let doc = GeometryDocument::from(geom);
    Sink::json(&doc).context("serializing geometry")?.finish(path)
}

fn geometry(cmd: GeometryCommand) -> anyhow::Result<()> {
    match cmd {
        GeometryCommand::Circle { radius, samples, out } => write_document(&circle(radius, samples)?, out.output.as_deref()),
        GeometryCommand::Ellipse { a, b, samples, out } => write_document(&ellipse(a, b, samples)?, out.output.as_deref()),
        GeometryCommand::Bump { amp, width, half_length, out } => {
            write_document(&bump_line(amp, width, half_length)?, out.output.as_deref())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_geometries() {
        assert!(load_geometry("circle:1").unwrap().is_closed());
        assert!(load_geometry("ellipse:1.5,1").unwrap().is_closed());
        assert!(!load_geometry("bump:0.5,1,12").unwrap().is_closed());
    }

    #[test]
    fn bad_inline_geometry_is_an_input_error() {
        for spec in ["circle:x", "ellipse:1", "bump:1,2", "no/such/file.json"] {
            let e = load_geometry(spec).unwrap_err();
            assert!(e.downcast_ref::<InputError>().is_some(), "{spec}: {e}");
        }
    }

    #[test]
    fn invalid_shape_is_a_library_argument_error() {
        let e = load_geometry("circle:-1").unwrap_err();
        assert!(matches!(e.downcast_ref::<waveguide_spectra::Error>(), Some(waveguide_spectra::Error::Argument(_))));
    }
}
