//! `glab`: batch front end for the finite groupoid laboratory.
//!
//! Every subcommand prints one JSON report to standard output. Exit codes:
//! 0 when every assertion passes, 1 on an assertion failure, 2 on malformed
//! input, 3 when an enumeration cap is exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use glab_core::algebra::normalizer_from_bisection;
use glab_core::gamma2::{Gamma2Certificate, DEFAULT_TOL};
use glab_core::groupoid::DEFAULT_ENUMERATION_CAP;
use glab_core::io::{self, coeff_json, names};
use glab_core::linalg::{self, CMatrix};
use glab_core::multiplier::{check_bounded_fejer, default_testset, weak_amenability_certificate};
use glab_core::report::Report;
use glab_core::theorems::{self, DEFAULT_TRIALS};
use glab_core::{corpus, Error, Exec, Groupoid};

#[derive(Parser)]
#[command(name = "glab", version, about = "Finite groupoid C*-algebra laboratory")]
struct Cli {
    /// Also write a short prose summary to standard error.
    #[arg(long, global = true)]
    summary: bool,

    /// Parse the emitted report back and fail unless it re-serializes
    /// identically.
    #[arg(long, global = true)]
    check_report: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the groupoid axioms.
    Validate { groupoid: PathBuf },
    /// Reduced norm of a function.
    Norm { groupoid: PathBuf, function: PathBuf },
    /// Completely bounded norm of a pointwise multiplier.
    Cbnorm {
        groupoid: PathBuf,
        multiplier: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Check a Fejér net and its weak-amenability certificate.
    Fejer {
        groupoid: PathBuf,
        net: PathBuf,
        /// Overrides the tolerance stored in the net file.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Exactness of the restriction sequence for every invariant unit set.
    Innerexact { groupoid: PathBuf },
    /// Random intermediate algebras against subgroupoids.
    Galois {
        groupoid: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random diagonal bimodules against open sets of arrows.
    Bimodule {
        groupoid: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Transformation groupoid of a group action.
    Transform {
        action: PathBuf,
        /// Write the groupoid table to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a function into bisection-supported pieces.
    Decompose { groupoid: PathBuf, function: PathBuf },
    /// Brute-force census of intermediate algebras and subgroupoids.
    Census { groupoid: PathBuf },
    /// Write a bundled groupoid table.
    Export {
        /// One of r2, z2, z3, z2_z3, z2_swap, s3_on_3.
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Read a report, re-serialize it and exit with its verdict.
    CheckReport { report: PathBuf },
}

enum Failure {
    Lib(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Lib(e) => match e {
                Error::CapExceeded { .. } => 3,
                Error::InvalidGroupoid(_)
                | Error::InvalidAction(_)
                | Error::UnknownArrow(_)
                | Error::GroupoidMismatch
                | Error::Malformed(_)
                | Error::InvalidMeasure(_) => 2,
                _ => 1,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

type Outcome = Result<(Report, String), Failure>;

fn cap() -> Result<usize, Failure> {
    match std::env::var("GLAB_CAP") {
        Ok(v) => v.parse().map_err(|_| Failure::Usage(format!("GLAB_CAP must be a nonnegative integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_ENUMERATION_CAP),
    }
}

fn fmt12(x: f64) -> String {
    format!("{x:.12}")
}

fn matrix_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect())).collect(),
    )
}

fn certificate_json(g: &Groupoid, unit: usize, c: &Gamma2Certificate) -> Value {
    json!({
        "unit": g.name(unit),
        "value": c.value,
        "upper": c.upper,
        "lower": c.lower,
        "gap": c.gap(),
        "method": c.method,
        "iterations": c.iterations,
        "primal": matrix_json(&c.primal),
        "dual_left": c.dual_left,
        "dual_right": c.dual_right,
    })
}

fn validate(path: &Path) -> Outcome {
    let mut report = Report::new("validate");
    let text = fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
    match io::parse_groupoid(&text) {
        Ok(g) => {
            let orbits: Vec<Vec<String>> = g.orbits().into_iter().map(|o| names(&g, o)).collect();
            let summary = format!(
                "valid groupoid: {} arrows, {} units, {} orbits, {}principal",
                g.len(),
                g.units().len(),
                orbits.len(),
                if g.is_principal() { "" } else { "not " }
            );
            report.push(
                json!({
                    "arrows": g.len(),
                    "units": names(&g, g.units().iter().copied()),
                    "orbits": orbits,
                    "principal": g.is_principal(),
                }),
                true,
            );
            Ok((report, summary))
        }
        Err(Error::InvalidGroupoid(violations)) => {
            let listed: Vec<String> = violations.iter().map(ToString::to_string).collect();
            let summary = format!("invalid groupoid: {} violations", listed.len());
            report.push(json!({ "violations": listed }), false);
            Ok((report, summary))
        }
        Err(e) => Err(e.into()),
    }
}

fn norm(gpath: &Path, fpath: &Path) -> Outcome {
    let g = io::read_groupoid(gpath)?;
    let f = io::read_function(&g, fpath)?;
    let value = f.reduced_norm();
    let blocks: Vec<Value> = f
        .rep_blocks(Exec::default())
        .iter()
        .map(|b| {
            json!({
                "unit": g.name(b.unit),
                "norm": linalg::spectral_norm(&b.matrix),
                "power_iteration": linalg::spectral_norm_power(&b.matrix, 500),
            })
        })
        .collect();
    let mut report = Report::new("reduced_norm");
    report.push(json!({ "value": value, "value_fmt": fmt12(value), "sup_norm": f.sup_norm(), "blocks": blocks }), true);
    Ok((report, format!("reduced norm {}", fmt12(value))))
}

fn cbnorm(gpath: &Path, hpath: &Path, tol: f64) -> Outcome {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
    }
    let g = io::read_groupoid(gpath)?;
    let h = io::read_multiplier(&g, hpath)?;
    let cb = h.cb_norm(tol)?;
    let op = h.op_norm(tol, 0)?;
    let gaps_ok = cb.certificates.iter().all(|(_, c)| c.gap() <= 2.0 * tol);
    let op_ok = op.lower_bound <= cb.value + 2.0 * tol;
    let mut report = Report::new("cb_norm");
    report.push(
        json!({
            "value": cb.value,
            "value_fmt": fmt12(cb.value),
            "tol": tol,
            "op_norm": op.value,
            "op_lower_bound": op.lower_bound,
        }),
        gaps_ok && op_ok,
    );
    for (x, c) in &cb.certificates {
        report.witness(certificate_json(&g, *x, c));
    }
    Ok((report, format!("cb norm {}", fmt12(cb.value))))
}

fn fejer(gpath: &Path, npath: &Path, eps: Option<f64>, tol: f64) -> Outcome {
    let g = io::read_groupoid(gpath)?;
    let mut net = io::read_net(&g, npath)?;
    if let Some(eps) = eps {
        if eps.is_nan() || eps <= 0.0 {
            return Err(Failure::Usage(format!("--eps must be positive, got {eps}")));
        }
        net.eps = eps;
    }
    let tests = default_testset(&g, 8, 0);
    let (bounded, bound) = check_bounded_fejer(&net, tol)?;
    let wa = weak_amenability_certificate(&net, &tests, tol)?;
    let mut report = Report::new("fejer");
    report.push(
        json!({
            "eps": net.eps,
            "terms": net.symbols.len(),
            "tests": tests.len(),
            "final_distance": wa.fejer.final_distance,
            "final_distance_fmt": fmt12(wa.fejer.final_distance),
            "bounded": bounded,
            "cb_bound": bound,
            "cb_bound_fmt": fmt12(bound),
            "uniform_distances": wa.uniform_distances,
            "bisection_bound_holds": wa.bisection_bound_holds,
            "weak_amenability": wa.pass,
        }),
        wa.fejer.pass,
    );
    report.witness(json!({ "distances": wa.fejer.distances }));
    let verdict = if wa.fejer.pass { "passes" } else { "fails" };
    Ok((
        report,
        format!(
            "net {verdict}: final distance {:.3e} against eps {:.3e}, cb bound {}",
            wa.fejer.final_distance,
            net.eps,
            fmt12(bound)
        ),
    ))
}

fn innerexact(gpath: &Path) -> Outcome {
    let g = io::read_groupoid(gpath)?;
    let report = theorems::check_inner_exact(&g, Exec::default())?;
    let summary = format!(
        "{} invariant unit sets checked; {}",
        report.instances.len(),
        if report.pass { "G is inner exact" } else { "exactness fails" }
    );
    Ok((report, summary))
}

fn expected_failures(report: &Report) -> usize {
    report.instances.iter().filter(|i| i["expected_failure"] == true).count()
}

fn verdict(report: &Report, ok: &str) -> String {
    match (report.pass, expected_failures(report)) {
        (false, _) => "mismatch found".to_string(),
        (true, 0) => ok.to_string(),
        (true, k) => format!("{k} expected failures on a non-principal groupoid"),
    }
}

fn galois(gpath: &Path, trials: usize, seed: u64) -> Outcome {
    let g = io::read_groupoid(gpath)?;
    let report = theorems::check_galois(&g, trials, seed, cap()?, Exec::default())?;
    let summary = format!("{trials} random intermediate algebras; {}", verdict(&report, "all match subgroupoids"));
    Ok((report, summary))
}

fn bimodule(gpath: &Path, trials: usize, seed: u64) -> Outcome {
    let g = io::read_groupoid(gpath)?;
    let report = theorems::check_bimodule(&g, trials, seed, Exec::default())?;
    let summary = format!("{trials} random bimodules; {}", verdict(&report, "all equal A_U"));
    Ok((report, summary))
}

fn transform(apath: &Path, out: Option<&Path>) -> Outcome {
    let action = io::read_action(apath)?;
    let g = action.transformation_groupoid();
    let table = io::groupoid_json(&g);
    if let Some(out) = out {
        write_json(out, &table)?;
    }
    let mut report = Report::new("transformation_groupoid");
    report.push(
        json!({
            "arrows": g.len(),
            "units": g.units().len(),
            "principal": g.is_principal(),
            "groupoid": table,
        }),
        true,
    );
    Ok((report, format!("transformation groupoid with {} arrows", g.len())))
}

fn decompose(gpath: &Path, fpath: &Path) -> Outcome {
    let g = io::read_groupoid(gpath)?;
    let f = io::read_function(&g, fpath)?;
    let pieces = f.decompose_partition_of_unity();
    let total = pieces.iter().fold(glab_core::ArrowFunction::zero(&g), |acc, p| &acc + p);
    let exact = total == f;
    let mut all_isometric = true;
    let listed: Vec<Value> = pieces
        .iter()
        .map(|p| {
            let support = p.support(0.0);
            let (r, s) = (p.reduced_norm(), p.sup_norm());
            let isometric = (r - s).abs() <= 1e-9 * (1.0 + s);
            let normalizer = normalizer_from_bisection(p, &support).map(|m| m.is_normalizer(1e-12)).unwrap_or(false);
            all_isometric &= isometric && normalizer;
            json!({
                "bisection": names(&g, support.iter()),
                "coeffs": coeff_json(p),
                "reduced_norm": r,
                "sup_norm": s,
                "normalizer": normalizer,
            })
        })
        .collect();
    let mut report = Report::new("decompose");
    report.push(json!({ "pieces": pieces.len(), "sums_to_f": exact, "reduced_norm": f.reduced_norm() }), exact && all_isometric);
    report.witnesses = listed;
    Ok((report, format!("{} bisection pieces", pieces.len())))
}

fn census(gpath: &Path) -> Outcome {
    let g = io::read_groupoid(gpath)?;
    let census = theorems::galois_census(&g, &[], cap()?, Exec::default())?;
    let mut report = Report::new("galois_census");
    report.push(json!({ "principal": g.is_principal(), "census": census.to_json(&g) }), census.bijection);
    let summary =
        format!("{} intermediate algebras, {} unit-containing subgroupoids", census.algebras.len(), census.subgroupoids.len());
    Ok((report, summary))
}

fn export(name: &str, out: Option<&Path>) -> Outcome {
    let g = corpus::bundled()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, g)| g)
        .ok_or_else(|| Failure::Usage(format!("unknown bundled groupoid `{name}`")))?;
    let table = io::groupoid_json(&g);
    if let Some(out) = out {
        write_json(out, &table)?;
    }
    let mut report = Report::new("export");
    report.push(json!({ "name": name, "groupoid": table }), true);
    Ok((report, format!("{name}: {} arrows", g.len())))
}

fn check_report(path: &Path) -> Outcome {
    let text = fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
    let report = Report::from_json(&text)?;
    if report.to_json() != text {
        return Err(Error::Malformed("report does not re-serialize identically".into()).into());
    }
    let summary = format!("report `{}` round-trips; pass = {}", report.theorem, report.pass);
    Ok((report, summary))
}

fn write_json(path: &Path, value: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Validate { groupoid } => validate(groupoid),
        Command::Norm { groupoid, function } => norm(groupoid, function),
        Command::Cbnorm { groupoid, multiplier, tol } => cbnorm(groupoid, multiplier, *tol),
        Command::Fejer { groupoid, net, eps, tol } => fejer(groupoid, net, *eps, *tol),
        Command::Innerexact { groupoid } => innerexact(groupoid),
        Command::Galois { groupoid, trials, seed } => galois(groupoid, *trials, *seed),
        Command::Bimodule { groupoid, trials, seed } => bimodule(groupoid, *trials, *seed),
        Command::Transform { action, out } => transform(action, out.as_deref()),
        Command::Decompose { groupoid, function } => decompose(groupoid, function),
        Command::Census { groupoid } => census(groupoid),
        Command::Export { name, out } => export(name, out.as_deref()),
        Command::CheckReport { report } => check_report(report),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, summary)) => {
            let text = report.to_json();
            if cli.check_report {
                match Report::from_json(&text) {
                    Ok(back) if back.to_json() == text => {}
                    _ => {
                        eprintln!("error: report failed its round trip");
                        return ExitCode::from(2);
                    }
                }
            }
            print!("{text}");
            if cli.summary {
                eprintln!("{summary}");
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            let code = f.code();
            eprintln!("error: {}", f.message());
            ExitCode::from(code)
        }
    }
}
