use std::fs;

use anyhow::{bail, ensure, Context, Result};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use releq::freqmap::{
    adapted_structure, frequency_map, HermitianStructure, InertiaSpectrum, Pairing,
};
use releq::horn::{
    basic_hull_polytope, basic_set, conjecture_verify_with, fflp_split, global_polytope,
    BasicPoint, VerifyOptions, DEFAULT_HORN_TOL,
};
use releq::matkit::{Matrix, Rotation};
use releq::nbody::{
    certify as certify_configuration, BalanceStatus, Configuration, DEFAULT_CERTIFY_TOL,
};
use releq::p2::{
    contour, contour_levels, critical_analysis, grid, structure_at, SphereCoords, GRID_PHI,
    GRID_THETA,
};
use serde_json::json;

use crate::output::Outputs;
use crate::svg;
use crate::{Common, FreqArgs, PolytopeArgs, VerifyArgs};

/// Number of contour levels drawn in the p = 2 plot.
const CONTOUR_COUNT: usize = 9;

fn read_configuration(c: &Common) -> Result<Configuration> {
    let path = c.input.as_ref().context("--input FILE is required")?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Configuration::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Spectrum from `--sigma` or from the inertia tensor of `--input`.
fn spectrum(c: &Common) -> Result<InertiaSpectrum> {
    match (&c.sigma, &c.input) {
        (Some(s), None) => Ok(InertiaSpectrum::from_unsorted(s.clone())?),
        (None, Some(_)) => {
            let conf = read_configuration(c)?;
            Ok(InertiaSpectrum::of_inertia_tensor(&conf.inertia_tensor())?)
        }
        _ => bail!("exactly one of --sigma and --input is required"),
    }
}

pub fn certify(c: &Common) -> Result<bool> {
    ensure!(
        c.sigma.is_none(),
        "certify reads a configuration file, not --sigma"
    );
    let conf = read_configuration(c)?;
    let tol = c.tol.unwrap_or(DEFAULT_CERTIFY_TOL);
    let cert = certify_configuration(&conf, tol)?;
    Outputs::new(c)?.json("certificate", &cert)?;
    Ok(cert.status != BalanceStatus::Neither)
}

fn parse_rho(text: &str) -> Result<Rotation> {
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .map(|r| {
            r.split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()
        .context("--rho expects rows of numbers separated by ';'")?;
    ensure!(
        rows.iter().all(|r| r.len() == rows.len()),
        "--rho must be square"
    );
    Ok(Rotation::new(Matrix::from_rows(&rows))?)
}

fn parse_perm(text: &str) -> Result<Matrix> {
    let cols: Vec<i64> = text
        .split(',')
        .map(|x| x.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .context("--perm expects signed 1-based column indices")?;
    let n = cols.len();
    ensure!(
        cols.iter()
            .all(|&k| k != 0 && k.unsigned_abs() as usize <= n),
        "--perm entries must lie in 1..={n} up to sign"
    );
    Ok(Matrix::from_fn(n, n, |i, j| {
        let k = cols[i];
        if k.unsigned_abs() as usize == j + 1 {
            k.signum() as f64
        } else {
            0.0
        }
    }))
}

pub fn freq(a: &FreqArgs) -> Result<bool> {
    let c = &a.common;
    let s = spectrum(c)?;
    let p = s.p();
    let (j, structure) = if let Some(text) = &a.pairing {
        let pairing: Pairing = text.parse()?;
        ensure!(
            pairing.p() == p,
            "pairing {pairing} is for p = {}, spectrum has p = {p}",
            pairing.p()
        );
        (
            releq::freqmap::basic_structure(&pairing),
            json!({ "kind": "pairing", "pairing": pairing }),
        )
    } else if let Some(angles) = &a.angles {
        ensure!(angles.len() == 2, "--angles expects phi,theta");
        ensure!(p == 2, "--angles needs a spectrum of length 4");
        let coords = SphereCoords::new(angles[0], angles[1]);
        (
            structure_at(coords),
            json!({ "kind": "angles", "phi": angles[0], "theta": angles[1] }),
        )
    } else if let Some(perm_text) = &a.perm {
        let perm = parse_perm(perm_text)?;
        let rho = match &a.rho {
            Some(text) => parse_rho(text)?,
            None => Rotation::identity(p),
        };
        ensure!(rho.dim() == p, "--rho must be {p} x {p}");
        let j = adapted_structure(&rho, &perm)?;
        (
            j,
            json!({ "kind": "adapted", "rho": rho.matrix(), "perm": perm }),
        )
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
        (
            HermitianStructure::random(p, &mut rng)?,
            json!({ "kind": "random", "seed": c.seed }),
        )
    };
    let nu = frequency_map(&j, &s)?;
    let residual = (nu.sum() - s.trace()).abs();
    let out = Outputs::new(c)?;
    out.json(
        "freq",
        &json!({
            "sigma": s.values(),
            "trace": s.trace(),
            "structure": structure,
            "nu": nu,
            "trace_residual": residual,
        }),
    )?;
    out.csv(
        "freq",
        &headers(&["k", "nu"]),
        nu.values()
            .iter()
            .enumerate()
            .map(|(k, v)| vec![(k + 1).to_string(), v.to_string()]),
    )?;
    Ok(true)
}

fn headers(names: &[&str]) -> Vec<String> {
    names.iter().map(|n| n.to_string()).collect()
}

/// Writes the basic set as `label, pairing, nu1, ..., nup`.
fn basic_csv(out: &Outputs, p: usize, basic: &[BasicPoint]) -> Result<()> {
    let mut header = headers(&["label", "pairing"]);
    header.extend((1..=p).map(|k| format!("nu{k}")));
    let rows = basic.iter().enumerate().map(|(k, b)| {
        let mut row = vec![(k + 1).to_string(), b.pairing.to_string()];
        row.extend(b.nu.values().iter().map(f64::to_string));
        row
    });
    out.csv("basic_set", &header, rows)
}

pub fn polytope(a: &PolytopeArgs) -> Result<bool> {
    let c = &a.common;
    let s = spectrum(c)?;
    let p = s.p();
    ensure!(
        a.hull_only || p <= 3,
        "exact polytope is available for p <= 3; pass --hull-only for p = {p}"
    );
    let (poly, vertices) = if a.hull_only {
        (basic_hull_polytope(&s), None)
    } else {
        let poly = global_polytope(&s)?;
        let v = poly.vertices()?;
        (poly, Some(v))
    };
    let basic = if p <= 5 { basic_set(&s)? } else { Vec::new() };
    let out = Outputs::new(c)?;
    out.json(
        "polytope",
        &json!({
            "sigma": s.values(),
            "trace": s.trace(),
            "p": p,
            "mode": if a.hull_only { "basic-hull" } else { "exact" },
            "split": fflp_split(&s),
            "inequalities": poly.inequalities(),
            "vertices": vertices,
            "basic_set": basic,
        }),
    )?;
    basic_csv(&out, p, &basic)?;
    if let Some(v) = &vertices {
        if p == 2 || p == 3 {
            out.svg("polytope", || svg::polytope(&s, v, &basic))?;
        }
    }
    Ok(true)
}

pub fn verify(a: &VerifyArgs) -> Result<bool> {
    let c = &a.common;
    let s = spectrum(c)?;
    let p = s.p();
    ensure!(
        a.hull_only || p <= 3,
        "exact verification is available for p <= 3; pass --hull-only for p = {p}"
    );
    let opts = VerifyOptions {
        hull_only: a.hull_only,
        parallel: true,
    };
    let samples = usize::try_from(a.samples)?;
    let mut report = conjecture_verify_with(&s, samples, c.seed, opts)?;
    report.tolerance = c.tol.unwrap_or(DEFAULT_HORN_TOL) * s.trace().max(1.0);
    let out = Outputs::new(c)?;
    out.json(
        "verify",
        &json!({ "report": report, "contained": report.contained() }),
    )?;
    basic_csv(&out, p, &report.basic_set)?;
    Ok(report.contained())
}

pub fn p2(c: &Common) -> Result<bool> {
    let s = spectrum(c)?;
    ensure!(
        s.p() == 2,
        "p2 needs a spectrum of length 4, got {}",
        2 * s.p()
    );
    let analysis = critical_analysis(&s)?;
    let g = grid(&s, GRID_PHI, GRID_THETA)?;
    let contours: Vec<_> = contour_levels(&g, CONTOUR_COUNT)
        .into_iter()
        .map(|l| contour(&g, l))
        .collect();
    let mid = (analysis.fmin + analysis.fmax) / 2.0;
    let mid_components = if analysis.fmax > analysis.fmin {
        contour(&g, mid).components
    } else {
        0
    };
    let out = Outputs::new(c)?;
    out.json(
        "p2",
        &json!({
            "critical": analysis,
            "grid": { "n_phi": GRID_PHI, "n_theta": GRID_THETA },
            "contours": contours.iter().map(|k| json!({ "level": k.level, "components": k.components })).collect::<Vec<_>>(),
            "mid_level": mid,
            "mid_level_components": mid_components,
        }),
    )?;
    let cols = g.thetas.len();
    out.csv(
        "grid",
        &headers(&["phi", "theta", "f", "nu1", "nu2"]),
        g.f.iter().enumerate().map(|(k, f)| {
            [g.phis[k / cols], g.thetas[k % cols], *f, g.nu1[k], g.nu2[k]]
                .iter()
                .map(f64::to_string)
                .collect()
        }),
    )?;
    out.svg("contour", || svg::contour_plot(&analysis, &contours))?;
    Ok(true)
}
