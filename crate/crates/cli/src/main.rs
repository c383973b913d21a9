//! `gshiu`: solve, tabulate and cross-check Gerber-Shiu functions of
//! perturbed phase-type renewal risk models described in TOML files.

mod model_file;
mod output;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gerber_shiu::simulate::{estimate, SimConfig};
use gerber_shiu::{find_roots, solve, Error, GerberShiuSolution, Penalty, PenaltyKind, RiskModel};
use serde_json::json;

use model_file::LoadError;
use output::{complex_json, complex_list, complex_text, matrix_text, parse_grid, parse_list, sig6, terms_json};

#[derive(Parser)]
#[command(
    name = "gshiu",
    version,
    about = "Gerber-Shiu functions for Brownian-perturbed phase-type renewal risk models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file and print its summary and safety loading.
    Validate { file: PathBuf },
    /// Roots of the generalized Lundberg equation.
    Roots {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Tabulate phi_w, phi_d and phi over a grid of initial capitals.
    Solve {
        file: PathBuf,
        /// Grid as start:stop:step.
        #[arg(long, default_value = "0:10:1")]
        u_grid: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Also print roots, derivatives at zero and expansion coefficients.
        #[arg(long)]
        explain: bool,
        /// Add per-phase columns.
        #[arg(long)]
        phases: bool,
    },
    /// Laplace transform of the ruin time, E[exp(-delta T) 1(T < inf)], for several delta.
    Laplace {
        file: PathBuf,
        /// Comma-separated positive discount rates.
        #[arg(long, default_value = "0.1,0.2")]
        delta_list: String,
        #[arg(long, default_value = "0:10:1")]
        u_grid: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Compare the analytic solution with Monte Carlo estimates.
    Compare {
        file: PathBuf,
        #[arg(long, default_value = "0.5,2,5")]
        u_list: String,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Simulation horizon; derived from the model when omitted.
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        grid_step: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Shift the analytic values (exercises the failure path).
        #[arg(long, hide = true, default_value_t = 0.0)]
        corrupt_analytic: f64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonStochasticAlpha(_)
            | Error::NotSubIntensity(_)
            | Error::SingularB
            | Error::Dimension(_)
            | Error::InvalidParameter(_)
            | Error::InvalidClaim(_)
            | Error::NonpositiveLoading { .. }
            | Error::ZeroVolatility => 2,
            _ => 4,
        };
        Failure { code, message: e.to_string() }
    }
}

fn load(path: &PathBuf) -> Result<RiskModel<f64>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    model_file::load(&text).map_err(|e| match e {
        LoadError::Parse(m) => Failure::parse(format!("{}: {m}", path.display())),
        LoadError::Invalid(e) => e.into(),
    })
}

fn penalty_text(p: &Penalty<f64>) -> String {
    let kind = match p.kind {
        PenaltyKind::Unit => "unit".to_string(),
        PenaltyKind::BivariateExponential { s1, s2 } => format!("exp(-{s1} x - {s2} y)"),
        PenaltyKind::DeficitPower { j } => format!("y^{j}"),
    };
    format!("{kind}, w0 = {}", p.w0)
}

fn cmd_validate(path: &PathBuf) -> Result<String, Failure> {
    let m = load(path)?;
    let mut s = String::new();
    writeln!(s, "model: c = {}, sigma = {}, delta = {}", m.c(), m.sigma(), m.delta()).unwrap();
    writeln!(s, "interclaims: {} phases, E[V] = {}", m.phases(), sig6(m.interclaims().mean())).unwrap();
    writeln!(s, "claims: order {}, E[Z] = {}", m.claim_order(), sig6(m.claims().mean())).unwrap();
    writeln!(s, "penalty: {}", penalty_text(m.penalty())).unwrap();
    writeln!(s, "loading = {}", sig6(m.loading())).unwrap();
    Ok(s)
}

fn cmd_roots(path: &PathBuf, format: Format) -> Result<String, Failure> {
    let m = load(path)?;
    let r = find_roots(&m)?;
    if let Format::Json = format {
        let v = json!({
            "rhos": complex_list(&r.rhos),
            "Rs": complex_list(&r.rs),
            "residuals": r.residuals,
            "all_real": r.all_real,
        });
        return Ok(serde_json::to_string_pretty(&v).unwrap() + "\n");
    }
    let csv = matches!(format, Format::Csv);
    let mut s = String::new();
    if csv {
        writeln!(s, "kind,index,re,im,residual").unwrap();
    } else {
        writeln!(s, "{:<5} {:>3}  {:>24}  {:>12}", "root", "i", "value", "|det L|").unwrap();
    }
    let n = r.rhos.len();
    let rows = r.rhos.iter().map(|&z| ("rho", z)).chain(r.rs.iter().map(|&z| ("R", z)));
    for (k, (kind, z)) in rows.enumerate() {
        let i = if k < n { k + 1 } else { k - n + 1 };
        if csv {
            writeln!(s, "{kind},{i},{},{},{}", z.re, z.im, r.residuals[k]).unwrap();
        } else {
            writeln!(s, "{kind:<5} {i:>3}  {:>24}  {:>12}", complex_text(z), sig6(r.residuals[k])).unwrap();
        }
    }
    if !r.all_real && !csv {
        writeln!(s, "note: some roots are complex").unwrap();
    }
    Ok(s)
}

fn explain_text(sol: &GerberShiuSolution<f64>) -> String {
    let list = |zs: &[gerber_shiu::C64]| zs.iter().map(|&z| complex_text(z)).collect::<Vec<_>>().join(", ");
    let d = &sol.diagnostics;
    let mut s = String::new();
    writeln!(s, "# rho: {}", list(&sol.roots.rhos)).unwrap();
    writeln!(s, "# R: {}", list(&sol.roots.rs)).unwrap();
    writeln!(s, "# phi_w'(0): {}", list(&sol.phi_w_prime0)).unwrap();
    writeln!(s, "# phi_d'(0): {}", list(&sol.phi_d_prime0)).unwrap();
    writeln!(s, "# Q_w(rho_n): {}", list(&d.q_w)).unwrap();
    writeln!(s, "# Q_d(rho_n): {}", list(&d.q_d)).unwrap();
    writeln!(s, "# G: {}", list(&d.partial_fractions.g)).unwrap();
    for (i, (mn, mn1)) in d.partial_fractions.m_n.iter().zip(&d.partial_fractions.m_n1).enumerate() {
        writeln!(s, "# M{}^(n): {}", i + 1, matrix_text(mn)).unwrap();
        writeln!(s, "# M{}^(n-1): {}", i + 1, matrix_text(mn1)).unwrap();
    }
    writeln!(s, "# boundary defect: {:e}, pruned terms: {}", d.boundary_defect, d.pruned_terms).unwrap();
    writeln!(s, "# phi(u) = {}", sol.phi).unwrap();
    s
}

fn explain_json(sol: &GerberShiuSolution<f64>) -> serde_json::Value {
    let d = &sol.diagnostics;
    let matrix = |m: &gerber_shiu::CMatrix64| {
        (0..m.dim()).map(|i| (0..m.dim()).map(|j| complex_json(m[(i, j)])).collect::<Vec<_>>()).collect::<Vec<_>>()
    };
    json!({
        "phi_w_prime0": complex_list(&sol.phi_w_prime0),
        "phi_d_prime0": complex_list(&sol.phi_d_prime0),
        "q_w": complex_list(&d.q_w),
        "q_d": complex_list(&d.q_d),
        "G": complex_list(&d.partial_fractions.g),
        "M_n": d.partial_fractions.m_n.iter().map(matrix).collect::<Vec<_>>(),
        "M_n_minus_1": d.partial_fractions.m_n1.iter().map(matrix).collect::<Vec<_>>(),
        "boundary_defect": d.boundary_defect,
        "pruned_terms": d.pruned_terms,
    })
}

fn cmd_solve(path: &PathBuf, grid: &str, format: Format, explain: bool, phases: bool) -> Result<String, Failure> {
    let grid = parse_grid(grid).map_err(Failure::parse)?;
    let m = load(path)?;
    let sol = solve(&m)?;
    let (w, d) = (sol.w_part(), sol.d_part());
    let n = m.phases();
    let row = |u: f64| {
        let mut v = vec![u, w.evaluate(u).re, d.evaluate(u).re, sol.value(u)];
        if phases {
            for i in 0..n {
                v.push(sol.phi_w[i].evaluate(u).re);
                v.push(sol.phi_d[i].evaluate(u).re);
            }
        }
        v
    };
    let mut header = vec!["u".to_string(), "phi_w".into(), "phi_d".into(), "phi".into()];
    if phases {
        for i in 1..=n {
            header.push(format!("phi_w_{i}"));
            header.push(format!("phi_d_{i}"));
        }
    }
    match format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = grid
                .iter()
                .map(|&u| {
                    serde_json::Value::Object(
                        header.iter().cloned().zip(row(u).into_iter().map(|x| json!(x))).collect(),
                    )
                })
                .collect();
            let mut v = json!({
                "roots": { "rhos": complex_list(&sol.roots.rhos), "Rs": complex_list(&sol.roots.rs) },
                "alpha": sol.alpha(),
                "w0": sol.w0(),
                "phi_w": sol.phi_w.iter().map(terms_json).collect::<Vec<_>>(),
                "phi_d": sol.phi_d.iter().map(terms_json).collect::<Vec<_>>(),
                "phi": terms_json(&sol.phi),
                "grid": rows,
            });
            if explain {
                v["explain"] = explain_json(&sol);
            }
            Ok(serde_json::to_string_pretty(&v).unwrap() + "\n")
        }
        Format::Csv => {
            let mut s = if explain { explain_text(&sol) } else { String::new() };
            writeln!(s, "{}", header.join(",")).unwrap();
            for &u in &grid {
                writeln!(s, "{}", row(u).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")).unwrap();
            }
            Ok(s)
        }
        Format::Text => {
            let mut s = if explain { explain_text(&sol) } else { String::new() };
            writeln!(s, "{}", header.iter().map(|h| format!("{h:>12}")).collect::<String>()).unwrap();
            for &u in &grid {
                writeln!(s, "{}", row(u).iter().map(|&x| format!("{:>12}", sig6(x))).collect::<String>()).unwrap();
            }
            Ok(s)
        }
    }
}

fn cmd_laplace(path: &PathBuf, deltas: &str, grid: &str, format: Format) -> Result<String, Failure> {
    let deltas = parse_list(deltas).map_err(Failure::parse)?;
    let grid = parse_grid(grid).map_err(Failure::parse)?;
    let base = load(path)?;
    if let Some(bad) = deltas.iter().find(|&&d| d.is_nan() || d <= 0.0) {
        return Err(Error::InvalidParameter(format!("discount rate {bad} must be positive")).into());
    }
    let mut curves = Vec::with_capacity(deltas.len());
    for &delta in &deltas {
        let m = base.with_delta(delta)?.with_penalty(Penalty::ruin_probability())?;
        let sol = solve(&m)?;
        curves.push(grid.iter().map(|&u| sol.value(u)).collect::<Vec<f64>>());
    }
    let names: Vec<String> = deltas.iter().map(|d| format!("delta={d}")).collect();
    match format {
        Format::Json => {
            let v = json!({
                "u": grid,
                "curves": deltas.iter().zip(&curves).map(|(d, c)| json!({"delta": d, "values": c})).collect::<Vec<_>>(),
            });
            Ok(serde_json::to_string_pretty(&v).unwrap() + "\n")
        }
        Format::Csv => {
            let mut s = format!("u,{}\n", names.join(","));
            for (k, u) in grid.iter().enumerate() {
                let vals: Vec<String> = curves.iter().map(|c| c[k].to_string()).collect();
                writeln!(s, "{u},{}", vals.join(",")).unwrap();
            }
            Ok(s)
        }
        Format::Text => {
            let mut s = format!("{:>12}{}\n", "u", names.iter().map(|n| format!("{n:>14}")).collect::<String>());
            for (k, &u) in grid.iter().enumerate() {
                let vals: String = curves.iter().map(|c| format!("{:>14}", sig6(c[k]))).collect();
                writeln!(s, "{:>12}{vals}", sig6(u)).unwrap();
            }
            Ok(s)
        }
    }
}

fn z_score(sim: f64, analytic: f64, se: f64) -> f64 {
    let diff = sim - analytic;
    if se > 0.0 {
        diff / se
    } else if diff.abs() < 1e-12 {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    }
}

struct CompareOpts<'a> {
    u_list: &'a str,
    paths: usize,
    seed: u64,
    t_max: Option<f64>,
    grid_step: f64,
    format: Format,
    corrupt: f64,
}

fn cmd_compare(path: &PathBuf, o: CompareOpts) -> Result<(String, bool), Failure> {
    let us = parse_list(o.u_list).map_err(Failure::parse)?;
    if let Some(bad) = us.iter().find(|&&u| u < 0.0) {
        return Err(Error::InvalidParameter(format!("initial capital {bad} must be nonnegative")).into());
    }
    let m = load(path)?;
    let sol = solve(&m)?;
    let mut rows = Vec::new();
    let mut ok = true;
    for &u in &us {
        let t_max = match o.t_max {
            Some(t) => t,
            None => SimConfig::default_t_max(&m, u)?,
        };
        let cfg = SimConfig { grid_step: o.grid_step, ..SimConfig::new(o.paths, t_max, o.seed) };
        let e = estimate(&m, u, &cfg)?;
        let (aw, ad, ap) = (sol.w_at(u) + o.corrupt, sol.d_at(u) + o.corrupt, sol.value(u) + o.corrupt);
        let z =
            [z_score(e.psi_w, aw, e.se_psi_w), z_score(e.psi_d, ad, e.se_psi_d), z_score(e.penalty, ap, e.se_penalty)];
        ok &= z.iter().all(|z| z.abs() <= 4.0);
        rows.push((u, t_max, [aw, ad, ap], [e.psi_w, e.psi_d, e.penalty], [e.se_psi_w, e.se_psi_d, e.se_penalty], z));
    }
    let names = ["phi_w", "phi_d", "phi"];
    let out = match o.format {
        Format::Json => {
            let v = json!({
                "paths": o.paths,
                "seed": o.seed,
                "pass": ok,
                "rows": rows.iter().map(|(u, t, a, s, se, z)| {
                    let mut r = json!({"u": u, "t_max": t});
                    for k in 0..3 {
                        r[names[k]] = json!({"analytic": a[k], "simulated": s[k], "se": se[k], "z": z[k]});
                    }
                    r
                }).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&v).unwrap() + "\n"
        }
        Format::Csv => {
            let mut s = String::from("u,t_max");
            for n in names {
                write!(s, ",{n}_analytic,{n}_sim,{n}_se,{n}_z").unwrap();
            }
            s.push('\n');
            for (u, t, a, sim, se, z) in &rows {
                write!(s, "{u},{t}").unwrap();
                for k in 0..3 {
                    write!(s, ",{},{},{},{}", a[k], sim[k], se[k], z[k]).unwrap();
                }
                s.push('\n');
            }
            s
        }
        Format::Text => {
            let mut s = format!("paths = {}, seed = {}\n", o.paths, o.seed);
            writeln!(s, "{:>8} {:>8} {:>12} {:>12} {:>10} {:>8}", "u", "", "analytic", "simulated", "se", "z").unwrap();
            for (u, _, a, sim, se, z) in &rows {
                for k in 0..3 {
                    let ulabel = if k == 0 { sig6(*u) } else { String::new() };
                    writeln!(
                        s,
                        "{:>8} {:>8} {:>12} {:>12} {:>10} {:>8.2}",
                        ulabel,
                        names[k],
                        sig6(a[k]),
                        sig6(sim[k]),
                        sig6(se[k]),
                        z[k]
                    )
                    .unwrap();
                }
            }
            writeln!(s, "{}", if ok { "agreement: all |z| <= 4" } else { "agreement FAILED: some |z| > 4" }).unwrap();
            s
        }
    };
    Ok((out, ok))
}

fn run(cli: Cli) -> Result<(String, u8), Failure> {
    match cli.command {
        Command::Validate { file } => cmd_validate(&file).map(|s| (s, 0)),
        Command::Roots { file, format } => cmd_roots(&file, format).map(|s| (s, 0)),
        Command::Solve { file, u_grid, format, explain, phases } => {
            cmd_solve(&file, &u_grid, format, explain, phases).map(|s| (s, 0))
        }
        Command::Laplace { file, delta_list, u_grid, format } => {
            cmd_laplace(&file, &delta_list, &u_grid, format).map(|s| (s, 0))
        }
        Command::Compare { file, u_list, paths, seed, t_max, grid_step, format, corrupt_analytic } => {
            let opts =
                CompareOpts { u_list: &u_list, paths, seed, t_max, grid_step, format, corrupt: corrupt_analytic };
            cmd_compare(&file, opts).map(|(s, ok)| (s, if ok { 0 } else { 5 }))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
