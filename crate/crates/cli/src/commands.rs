use std::f64::consts::PI;
use std::fmt;

use cocycle_core::asymptotics::{
    acceleration_bound_check, check_k_constants, log_integral_bound_check, rederive_k_constants, stratum_quantities,
    theorem_constants, verify_large_coupling, verify_stratum, zero_set_geometry, Status, REFERENCE_CASE1_C, REFERENCE_K2,
    REFERENCE_K3, REFERENCE_TOL,
};
use cocycle_core::cocycle::{acceleration, complexified_profile, lyapunov_exponent, CocycleSpec};
use cocycle_core::constants;
use cocycle_core::jensen::{acceleration_functional, jensen_integral, jensen_integral_quadrature};
use cocycle_core::zeros::laurent_roots;
use cocycle_core::Error;
use num_complex::Complex64;

use crate::config::{CampaignConfig, Violation};
use crate::report::{format_sig, Table};

/// Quadrature nodes used by the `jensen` cross-check.
pub const JENSEN_NODES: usize = 512;
pub const JENSEN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Le,
    Profile,
    Accel,
    Zeros,
    Jensen,
    VerifyAsymptotics,
    VerifyStratified,
    VerifyConstants,
    Bounds,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Le,
        Command::Profile,
        Command::Accel,
        Command::Zeros,
        Command::Jensen,
        Command::VerifyAsymptotics,
        Command::VerifyStratified,
        Command::VerifyConstants,
        Command::Bounds,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Le => "le",
            Command::Profile => "profile",
            Command::Accel => "accel",
            Command::Zeros => "zeros",
            Command::Jensen => "jensen",
            Command::VerifyAsymptotics => "verify-asymptotics",
            Command::VerifyStratified => "verify-stratified",
            Command::VerifyConstants => "verify-constants",
            Command::Bounds => "bounds",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug)]
pub enum RunError {
    Usage(Vec<Violation>),
    Compute(Error),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Usage(vs) => {
                for v in vs {
                    writeln!(f, "{v}")?;
                }
                Ok(())
            }
            RunError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Contract(msg) => RunError::Usage(vec![Violation { key: "contract".into(), message: msg }]),
            other => RunError::Compute(other),
        }
    }
}

pub struct Outcome {
    pub table: Table,
    pub status: Status,
    /// One line per cell.
    pub summary: Vec<String>,
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Pass => EXIT_PASS,
        Status::Fail => EXIT_FAIL,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn violation(key: &str, message: impl Into<String>) -> Violation {
    Violation { key: key.into(), message: message.into() }
}

/// `(lambda, E)` cells: every listed energy, then `mu lambda` for every listed `mu`.
pub fn cells(cfg: &CampaignConfig) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &l in &cfg.lambdas {
        if cfg.energies.is_empty() && cfg.mus.is_empty() {
            out.push((l, 0.0));
        }
        out.extend(cfg.energies.iter().map(|&e| (l, e)));
        out.extend(cfg.mus.iter().map(|&mu| (l, mu * l)));
    }
    out
}

/// Shifts `mu`: the listed values, then `E/lambda` for every cell.
pub fn shifts(cfg: &CampaignConfig) -> Vec<f64> {
    let mut out = cfg.mus.clone();
    for &l in &cfg.lambdas {
        out.extend(cfg.energies.iter().map(|&e| e / l));
    }
    if out.is_empty() {
        out.push(0.0);
    }
    out
}

/// Command-specific requirements beyond the config's own validation.
pub fn validate_for(cmd: Command, cfg: &CampaignConfig) -> Vec<Violation> {
    let mut v = Vec::new();
    let needs_lambda = matches!(
        cmd,
        Command::Le | Command::Profile | Command::Accel | Command::VerifyAsymptotics | Command::VerifyStratified
    );
    if needs_lambda && cfg.lambdas.is_empty() {
        v.push(violation("campaign.lambda", format!("{} needs at least one coupling", cmd.name())));
    }
    if matches!(cmd, Command::Zeros | Command::Jensen) && cfg.lambdas.is_empty() && !cfg.energies.is_empty() {
        v.push(violation("campaign.energy", "energies need couplings; give mu instead"));
    }
    if matches!(cmd, Command::VerifyAsymptotics | Command::Bounds) && cfg.rho.is_none() {
        v.push(violation("campaign.rho", format!("{} needs rho", cmd.name())));
    }
    if matches!(cmd, Command::VerifyAsymptotics | Command::Bounds | Command::VerifyStratified)
        && !cfg.potential.is_real_analytic()
    {
        v.push(violation("potential", "a real-analytic potential is needed"));
    }
    if cmd == Command::VerifyStratified {
        if cfg.stratum.is_none() {
            v.push(violation("stratum", "verify-stratified needs [stratum] mu1, mu2"));
        }
        if cfg.lambdas.iter().any(|&l| l <= 0.0) {
            v.push(violation("campaign.lambda", "stratified couplings must be positive"));
        }
    }
    if cmd == Command::Profile && cfg.heights.len() < 3 {
        v.push(violation("campaign.heights", "a profile needs at least three heights"));
    }
    if cmd == Command::Bounds {
        if let Some(rho) = cfg.rho {
            if let Some(d) = cfg.deltas.iter().find(|&&d| !(d > 0.0 && d < rho)) {
                v.push(violation("bounds.delta", format!("delta must satisfy 0 < delta < rho = {rho}, got {d}")));
            }
        }
    }
    v
}

pub fn run_command(cmd: Command, cfg: &CampaignConfig) -> Result<Outcome, RunError> {
    let v = validate_for(cmd, cfg);
    if !v.is_empty() {
        return Err(RunError::Usage(v));
    }
    match cmd {
        Command::Le => le(cfg),
        Command::Profile => profile(cfg),
        Command::Accel => accel(cfg),
        Command::Zeros => zeros(cfg),
        Command::Jensen => jensen(cfg),
        Command::VerifyAsymptotics => verify_asymptotics(cfg),
        Command::VerifyStratified => verify_stratified(cfg),
        Command::VerifyConstants => verify_constants(),
        Command::Bounds => bounds(cfg),
    }
}

fn g(x: f64) -> String {
    format_sig(x, 6)
}

fn spec(cfg: &CampaignConfig, lambda: f64, energy: f64, y: f64) -> Result<CocycleSpec, Error> {
    CocycleSpec::new(cfg.potential.clone(), cfg.alpha, lambda, energy, y)
}

fn le(cfg: &CampaignConfig) -> Result<Outcome, RunError> {
    let est = cfg.estimator;
    let mut table = Table::new(&["lambda", "E", "y", "value", "l_n", "l_2n", "spread", "n", "m"]);
    let mut summary = Vec::new();
    for (lambda, energy) in cells(cfg) {
        for &y in &cfg.heights {
            let e = lyapunov_exponent(&spec(cfg, lambda, energy, y)?, est.n, est.m)?;
            table.push(vec![
                lambda.into(),
                energy.into(),
                y.into(),
                e.value.into(),
                e.raw_pairs.0.into(),
                e.raw_pairs.1.into(),
                e.spread.into(),
                e.n.into(),
                e.m.into(),
            ]);
            summary.push(format!("lambda={} E={} y={} L={} spread={}", g(lambda), g(energy), g(y), g(e.value), g(e.spread)));
        }
    }
    Ok(Outcome { table, status: Status::Pass, summary })
}

fn profile(cfg: &CampaignConfig) -> Result<Outcome, RunError> {
    let est = cfg.estimator;
    let mut table = Table::new(&["lambda", "E", "y", "value", "spread", "convexity_excess", "evenness_defect", "status"]);
    let mut summary = Vec::new();
    let mut status = Status::Pass;
    for (lambda, energy) in cells(cfg) {
        let r = complexified_profile(&spec(cfg, lambda, energy, 0.0)?, &cfg.heights, est.n, est.m)?;
        let s = if r.convex_ok && r.even_ok { Status::Pass } else { Status::Fail };
        status = status.and(s);
        for p in &r.points {
            table.push(vec![
                lambda.into(),
                energy.into(),
                p.y.into(),
                p.estimate.value.into(),
                p.estimate.spread.into(),
                r.convexity_excess.into(),
                r.evenness_defect.unwrap_or(f64::NAN).into(),
                s.as_str().into(),
            ]);
        }
        summary.push(format!(
            "lambda={} E={} convexity_excess={} evenness_defect={} status={}",
            g(lambda),
            g(energy),
            g(r.convexity_excess),
            r.evenness_defect.map_or("n/a".into(), g),
            s.as_str()
        ));
    }
    Ok(Outcome { table, status, summary })
}

fn accel(cfg: &CampaignConfig) -> Result<Outcome, RunError> {
    let est = cfg.estimator;
    let mut table = Table::new(&["lambda", "E", "y", "t", "raw", "quantized", "residual", "spread", "status"]);
    let mut summary = Vec::new();
    let mut status = Status::Pass;
    for (lambda, energy) in cells(cfg) {
        let c = spec(cfg, lambda, energy, 0.0)?;
        for &y in &cfg.heights {
            let a = acceleration(&c, y, est.t, est.n, est.m)?;
            let s = if a.flagged { Status::Inconclusive } else { Status::Pass };
            status = status.and(s);
            table.push(vec![
                lambda.into(),
                energy.into(),
                y.into(),
                a.t.into(),
                a.raw.into(),
                a.quantized.into(),
                a.residual.into(),
                a.spread.into(),
                s.as_str().into(),
            ]);
            summary.push(format!(
                "lambda={} E={} y={} omega={} raw={} status={}",
                g(lambda),
                g(energy),
                g(y),
                a.quantized,
                g(a.raw),
                s.as_str()
            ));
        }
    }
    Ok(Outcome { table, status, summary })
}

fn zeros(cfg: &CampaignConfig) -> Result<Outcome, RunError> {
    let mut table = Table::new(&["mu", "re", "im", "multiplicity", "in_strip"]);
    let mut summary = Vec::new();
    for mu in shifts(cfg) {
        let zs = laurent_roots(&cfg.potential, Complex64::new(mu, 0.0))?;
        for (z, inside) in zs.zeros.iter().map(|z| (z, true)).chain(zs.far_zeros.iter().map(|z| (z, false))) {
            table.push(vec![mu.into(), z.z.re.into(), z.z.im.into(), z.multiplicity.into(), inside.into()]);
        }
        summary.push(format!(
            "mu={} zeros_in_strip={} far={}",
            g(mu),
            zs.total_multiplicity(),
            zs.far_zeros.len()
        ));
    }
    Ok(Outcome { table, status: Status::Pass, summary })
}

fn jensen(cfg: &CampaignConfig) -> Result<Outcome, RunError> {
    let mut table = Table::new(&["mu", "y", "closed_form", "quadrature", "difference", "two_omega", "boundary", "status"]);
    let mut summary = Vec::new();
    let mut status = Status::Pass;
    for mu in shifts(cfg) {
        let m = Complex64::new(mu, 0.0);
        for &y in &cfg.heights {
            let closed = jensen_integral(&cfg.potential, m, y)?;
            let acc = acceleration_functional(&cfg.potential, m, y)?;
            let (quad, diff, s) = match jensen_integral_quadrature(&cfg.potential, m, y, JENSEN_NODES) {
                Ok(q) => {
                    let d = (q - closed).abs();
                    let s = if d <= JENSEN_TOL { Status::Pass } else { Status::Fail };
                    status = status.and(s);
                    (q, d, s.as_str())
                }
                Err(Error::Contract(_)) => (f64::NAN, f64::NAN, "skipped"),
                Err(e) => return Err(e.into()),
            };
            table.push(vec![
                mu.into(),
                y.into(),
                closed.into(),
                quad.into(),
                diff.into(),
                acc.two_omega.into(),
                acc.boundary.into(),
                s.into(),
            ]);
            summary.push(format!("mu={} y={} I={} 2omega={} status={s}", g(mu), g(y), g(closed), acc.two_omega));
        }
    }
    Ok(Outcome { table, status, summary })
}

fn verify_asymptotics(cfg: &CampaignConfig) -> Result<Outcome, RunError> {
    let rho = cfg.rho.expect("validated");
    let tc = theorem_constants(&cfg.potential, rho)?;
    let below: Vec<Violation> = cfg
        .lambdas
        .iter()
        .filter(|l| l.abs() <= tc.lambda0)
        .map(|l| violation("campaign.lambda", format!("need |lambda| > lambda0 = {}, got {l}", tc.lambda0)))
        .collect();
    if !below.is_empty() {
        return Err(RunError::Usage(below));
    }
    let mut table = Table::new(&[
        "lambda",
        "E",
        "predicted",
        "measured",
        "residual",
        "bound",
        "spread",
        "omega0",
        "sup_two_omega",
        "n_hat",
        "status",
    ]);
    let mut summary = Vec::new();
    let mut status = Status::Pass;
    for (lambda, energy) in cells(cfg) {
        let cert = verify_large_coupling(&tc, &cfg.potential, cfg.alpha, lambda, energy, cfg.estimator)?;
        let acc = acceleration_bound_check(&tc, &cfg.potential, cfg.alpha, lambda, energy, cfg.estimator)?;
        let s = cert.status.and(acc.status);
        status = status.and(s);
        table.push(vec![
            lambda.into(),
            energy.into(),
            cert.predicted.into(),
            cert.measured.value.into(),
            cert.residual.into(),
            cert.bound.into(),
            cert.spread.into(),
            acc.omega0.quantized.into(),
            acc.sup_two_omega.into(),
            tc.n.into(),
            s.as_str().into(),
        ]);
        let failed: Vec<&str> = cert.checks.iter().chain(&acc.checks).filter(|c| !c.ok).map(|c| c.name.as_str()).collect();
        summary.push(format!(
            "lambda={} E={} residual={} bound={} status={}{}",
            g(lambda),
            g(energy),
            g(cert.residual),
            g(cert.bound),
            s.as_str(),
            if failed.is_empty() { String::new() } else { format!(" failed={}", failed.join(",")) }
        ));
    }
    Ok(Outcome { table, status, summary })
}

fn verify_stratified(cfg: &CampaignConfig) -> Result<Outcome, RunError> {
    let (mu1, mu2) = cfg.stratum.expect("validated");
    let sc = stratum_quantities(&cfg.potential, mu1, mu2)?;
    let mut table = Table::new(&[
        "lambda",
        "E",
        "mu",
        "predicted",
        "measured",
        "residual",
        "bound",
        "omega0",
        "omega0_bound",
        "band_min_modulus",
        "status",
    ]);
    let mut summary = Vec::new();
    let mut status = Status::Pass;
    let all = cells(cfg);
    for &lambda in &cfg.lambdas {
        let energies: Vec<f64> = all.iter().filter(|(l, _)| *l == lambda).map(|&(_, e)| e).collect();
        let r = verify_stratum(&sc, &cfg.potential, cfg.alpha, lambda, &energies, cfg.estimator, true)?;
        status = status.and(r.status);
        for row in &r.rows {
            table.push(vec![
                lambda.into(),
                row.energy.into(),
                row.mu.into(),
                row.predicted.into(),
                row.measured.value.into(),
                row.residual.into(),
                row.bound.into(),
                row.omega0.quantized.into(),
                row.omega0_bound.into(),
                row.band_min_modulus.into(),
                row.status.as_str().into(),
            ]);
            summary.push(format!(
                "lambda={} E={} residual={} bound={} omega0={} status={}",
                g(lambda),
                g(row.energy),
                g(row.residual),
                g(row.bound),
                row.omega0.quantized,
                row.status.as_str()
            ));
        }
    }
    Ok(Outcome { table, status, summary })
}

fn verify_constants() -> Result<Outcome, RunError> {
    let mut table = Table::new(&["name", "value", "reference", "ok"]);
    let (r, status) = match check_k_constants() {
        Ok(r) => (r, Status::Pass),
        Err(e) => {
            eprintln!("{e}");
            (rederive_k_constants(), Status::Fail)
        }
    };
    let k1 = constants::k1();
    let k1_alt = (-4.0 * PI).exp() / (2.0 * (1.0 + (-2.0 * PI).exp()));
    let near = |x: f64, y: f64| (x - y).abs() < REFERENCE_TOL;
    let rows: [(&str, f64, f64, bool); 6] = [
        ("K1", k1, k1_alt, (k1 - k1_alt).abs() <= 1e-15 * k1_alt),
        ("K2", r.k2, REFERENCE_K2, near(r.k2, REFERENCE_K2)),
        ("K3", r.k3, REFERENCE_K3, near(r.k3, REFERENCE_K3)),
        ("c", r.case1_lower.value, REFERENCE_CASE1_C, near(r.case1_lower.value, REFERENCE_CASE1_C)),
        ("sup_m2_lower", r.direct_lower.value, r.k2, r.direct_lower.value <= r.k2),
        ("sup_m2_upper", r.direct_upper.value, r.k3, r.direct_upper.value <= r.k3),
    ];
    let mut summary = Vec::new();
    for (name, value, reference, ok) in rows {
        table.push(vec![name.into(), value.into(), reference.into(), ok.into()]);
        summary.push(format!("{name}={} reference={} ok={ok}", format_sig(value, 8), format_sig(reference, 8)));
    }
    Ok(Outcome { table, status, summary })
}

fn bounds(cfg: &CampaignConfig) -> Result<Outcome, RunError> {
    let rho = cfg.rho.expect("validated");
    let p = &cfg.potential;
    let mut table = Table::new(&["kind", "delta", "value", "limit", "violations", "status"]);
    let mut summary = Vec::new();
    let mut status = Status::Pass;
    let tc = theorem_constants(p, rho)?;
    for &delta in &cfg.deltas {
        let r = log_integral_bound_check(p, &tc, delta)?;
        let min_lhs = r.rows.iter().map(|row| row.lhs).fold(f64::INFINITY, f64::min);
        let s = if r.verified { Status::Pass } else { Status::Fail };
        status = status.and(s);
        table.push(vec![
            "lower_bound".into(),
            delta.into(),
            min_lhs.into(),
            r.bound.into(),
            r.violations.into(),
            s.as_str().into(),
        ]);
        summary.push(format!("lower_bound delta={} bound={} violations={} status={}", g(delta), g(r.bound), r.violations, s.as_str()));
    }
    match zero_set_geometry(p)? {
        Some(geo) => {
            for frac in [0.25, 0.5, 1.0] {
                let e = geo.verify_eta(frac * geo.r)?;
                let s = if e.ok { Status::Pass } else { Status::Fail };
                status = status.and(s);
                table.push(vec![
                    "eta".into(),
                    e.delta.into(),
                    e.brute_min.into(),
                    e.eta.into(),
                    usize::from(!e.ok).into(),
                    s.as_str().into(),
                ]);
                summary.push(format!("eta delta={} eta={} grid_min={} status={}", g(e.delta), g(e.eta), g(e.brute_min), s.as_str()));
            }
        }
        None => {
            table.push(vec!["eta".into(), f64::NAN.into(), f64::NAN.into(), f64::NAN.into(), 0usize.into(), "inapplicable".into()]);
            summary.push("eta inapplicable: no zeros on the torus".into());
        }
    }
    Ok(Outcome { table, status, summary })
}
