use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nalgebra::DMatrix;
use serde_json::{json, Value};

use liext::extension::{build_extension, is_admissible, random_admissible, random_perturbed, Couple};
use liext::holonomy::{connecting_partial2, monodromy_partial, parallel_transport, MonodromyElement};
use liext::io::{AlgebraJson, Manifest};
use liext::liealg::{cohomology_dims, LieAlgebra, Representation};
use liext::paths::{is_homotopy, ASphere};
use liext::spectral::{abutment, all_pages};
use liext::{Error, Rational};

#[derive(Parser)]
#[command(name = "liext", version, about = "Lie algebra extensions from admissible couples")]
struct Cli {
    /// Manifest with named algebras, couples, paths, grids and representations
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// ODE tolerance (defaults to the manifest's, then 1e-6)
    #[arg(long, global = true)]
    tol_ode: Option<f64>,
    /// RK4 steps over the unit interval (defaults to the manifest's, then 512)
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Seed for randomized commands
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Named matrix representation
    #[arg(long, global = true)]
    rep: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Jacobi identity of an algebra, or derivation, admissibility and Jacobi checks of a couple
    Validate { name: String },
    /// Cohomology dimensions of an algebra or of the extension of a couple
    Cohomology { name: String },
    /// Spectral sequence pages and abutment of a couple
    Spectral { name: String },
    /// Structure constants of the extension of a couple
    Extend { name: String },
    /// Parallel transport along a base path
    Transport {
        couple: String,
        path: String,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// Monodromy of a base homotopy grid
    Monodromy {
        couple: String,
        grid: String,
        /// Treat the grid as a sphere and use the connecting map
        #[arg(long)]
        sphere: bool,
    },
    /// Whether a grid is a homotopy (vanishing terminal β)
    HomotopyCheck { grid: String },
    /// Compares Jacobi of the extension with admissibility on random couples
    Fuzz {
        #[arg(long, default_value_t = 200)]
        count: u64,
    },
}

struct Report {
    text: String,
    json: Value,
    code: u8,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Self { text, json, code: 0 }
    }

    fn checked(text: String, json: Value, pass: bool) -> Self {
        Self { text, json, code: if pass { 0 } else { 1 } }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Contract(_) => 1,
        Error::Numerical(_) => 3,
        Error::Shape(_) | Error::Degree { .. } | Error::Parse(_) => 2,
    }
}

struct Ctx {
    manifest: Manifest,
    tol_ode: f64,
    steps: usize,
    seed: u64,
    rep: Option<String>,
}

impl Ctx {
    fn rep(&self) -> liext::Result<Option<Representation<Rational>>> {
        self.rep.as_deref().map(|r| self.manifest.representation(r)).transpose()
    }

    fn algebra_or_extension(&self, name: &str) -> liext::Result<LieAlgebra<Rational>> {
        if self.manifest.algebras.contains_key(name) {
            self.manifest.algebra_named(name)
        } else if self.manifest.couples.contains_key(name) {
            Ok(build_extension(&self.manifest.couple(name)?).total().clone())
        } else {
            Err(Error::Parse(format!("unknown algebra or couple '{name}'")))
        }
    }
}

fn pass_word(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn joined(v: &[usize]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn fmt_matrix(m: &[Vec<f64>]) -> String {
    m.iter()
        .map(|r| r.iter().map(|x| format!("{:>14.6e}", x + 0.0)).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n")
}

fn validate(ctx: &Ctx, name: &str) -> liext::Result<Report> {
    let m = &ctx.manifest;
    if m.algebras.contains_key(name) {
        let alg = m.algebra_named(name)?;
        let rep = alg.check_jacobi();
        let text = format!("algebra {name} (dim {})\njacobi  {}\n", alg.dim(), pass_word(rep.ok()));
        let json = json!({"name": name, "kind": "algebra", "checks": {"jacobi": rep.ok()}});
        return Ok(Report::checked(text, json, rep.ok()));
    }
    if !m.couples.contains_key(name) {
        return Err(Error::Parse(format!("unknown algebra or couple '{name}'")));
    }
    let (base, kernel, d, omega) = m.couple_parts(name)?;
    let mut checks: Vec<(&str, bool, Option<f64>)> = vec![
        ("base_jacobi", base.check_jacobi().ok(), None),
        ("kernel_jacobi", kernel.check_jacobi().ok(), None),
    ];
    let derivations = d.len() == base.dim()
        && d.iter().all(|x| x.rows() == kernel.dim() && x.cols() == kernel.dim() && kernel.is_derivation(x));
    checks.push(("derivations", derivations, None));
    if derivations && checks.iter().all(|c| c.1) {
        let cpl = Couple::new(base, kernel, d, &omega)?;
        let adm = is_admissible(&cpl);
        checks.push(("closure", adm.closure.pass, Some(adm.closure.residual)));
        checks.push(("curvature_identity", adm.curvature_identity.pass, Some(adm.curvature_identity.residual)));
        checks.push(("extension_jacobi", build_extension(&cpl).total().check_jacobi().ok(), None));
    }
    let pass = checks.iter().all(|c| c.1);
    let mut text = format!("couple {name}\n");
    for (label, ok, r) in &checks {
        match r {
            Some(r) => writeln!(text, "{label:<20} {}  residual {r:e}", pass_word(*ok)),
            None => writeln!(text, "{label:<20} {}", pass_word(*ok)),
        }
        .expect("write to string");
    }
    let json = json!({
        "name": name,
        "kind": "couple",
        "checks": checks.iter().map(|(l, ok, r)| (l.to_string(), json!({"pass": ok, "residual": r}))).collect::<serde_json::Map<_, _>>(),
        "pass": pass,
    });
    Ok(Report::checked(text, json, pass))
}

fn cohomology(ctx: &Ctx, name: &str) -> liext::Result<Report> {
    let alg = ctx.algebra_or_extension(name)?;
    let rep = ctx.rep()?;
    if let Some(r) = &rep {
        r.check(&alg)?;
    }
    let dims = cohomology_dims(&alg, rep.as_ref())?;
    Ok(Report::ok(format!("{}\n", joined(&dims)), json!({"name": name, "dims": dims})))
}

fn spectral(ctx: &Ctx, name: &str) -> liext::Result<Report> {
    let cpl = ctx.manifest.couple(name)?;
    let pages = all_pages(&cpl)?;
    let ab = abutment(&cpl)?;
    let (nb, nk) = (cpl.base().dim(), cpl.kernel().dim());
    let mut text = String::new();
    let mut pj = Vec::new();
    for page in &pages {
        let _ = writeln!(text, "E{}", page.r);
        for q in (0..=nk).rev() {
            let row: Vec<String> = (0..=nb).map(|p| format!("{:>4}", page.dim(p, q))).collect();
            let _ = writeln!(text, "q={q:<2}{}", row.join(""));
        }
        let header: Vec<String> = (0..=nb).map(|p| format!("{p:>4}")).collect();
        let _ = writeln!(text, "  p={}", header.join(""));
        let table: Vec<_> = page.table().into_iter().map(|(p, q, d)| json!([p, q, d])).collect();
        pj.push(json!({"r": page.r, "table": table}));
    }
    let _ = writeln!(text, "abutment {}", joined(&ab.e_infinity));
    let _ = writeln!(text, "betti    {}", joined(&ab.betti));
    let json = json!({"pages": pj, "abutment": ab.e_infinity, "betti": ab.betti});
    Ok(Report::checked(text, json, ab.ok()))
}

fn extend(ctx: &Ctx, name: &str) -> liext::Result<Report> {
    let cpl = ctx.manifest.couple(name)?;
    let ext = build_extension(&cpl);
    let alg = AlgebraJson::dump(ext.total());
    let jacobi = ext.total().check_jacobi().ok();
    let value = serde_json::to_value(&alg).expect("algebra json");
    let mut text = format!("extension of {name}: dim {} (kernel first)\n", alg.dim);
    for b in &alg.brackets {
        let v = match &b.v {
            liext::io::Num::Text(s) => s.clone(),
            liext::io::Num::Float(f) => f.to_string(),
        };
        let names = alg.basis.as_deref().unwrap_or_default();
        let _ = writeln!(text, "[{}, {}] += {} {}", names[b.i], names[b.j], v, names[b.k]);
    }
    let _ = writeln!(text, "jacobi {}", pass_word(jacobi));
    Ok(Report::checked(text, json!({"name": name, "algebra": value, "jacobi": jacobi}), jacobi))
}

fn transport(ctx: &Ctx, couple: &str, path: &str, t: f64) -> liext::Result<Report> {
    let cpl = ctx.manifest.couple(couple)?.to_f64();
    let a = ctx.manifest.path(path)?;
    if a.algebra() != cpl.base() {
        return Err(Error::Shape(format!("path '{path}' does not live in the base of '{couple}'")));
    }
    let phi = parallel_transport(&cpl, &a, t, ctx.steps)?;
    let defect = phi.defect(cpl.kernel());
    if defect > ctx.tol_ode {
        return Err(Error::Numerical(format!("transport bracket defect {defect:e} exceeds {:e}", ctx.tol_ode)));
    }
    let m = rows(&phi.matrix);
    let text = format!("Phi_{{{t},0}}\n{}\nbracket defect {defect:e}\n", fmt_matrix(&m));
    Ok(Report::ok(text, json!({"t": t, "matrix": m, "defect": defect})))
}

fn element_json(el: &MonodromyElement) -> (String, Value) {
    let samples: Vec<Vec<f64>> = el.kpath.samples().iter().map(|v| v.iter().copied().collect()).collect();
    let integral: Vec<f64> = el.kpath.integral().iter().copied().collect();
    let group = el.group_element.as_ref().map(rows);
    let abelian = el.abelian_element.as_ref().map(|v| v.iter().copied().collect::<Vec<f64>>());
    let mut text = format!("kernel path: {} samples\nintegral {:?}\n", samples.len(), integral);
    if let Some(a) = &abelian {
        let _ = writeln!(text, "abelian element {a:?}");
    }
    if let Some(g) = &group {
        let _ = writeln!(text, "group element\n{}", fmt_matrix(g));
    }
    let json = json!({"kpath": {"N": samples.len() - 1, "samples": samples}, "integral": integral, "abelian_element": abelian, "group_element": group});
    (text, json)
}

fn monodromy(ctx: &Ctx, couple: &str, grid: &str, sphere: bool) -> liext::Result<Report> {
    let cpl = ctx.manifest.couple(couple)?;
    if !is_admissible(&cpl).ok() {
        return Err(Error::Contract(format!("couple '{couple}' is not admissible")));
    }
    let cpl = cpl.to_f64();
    let h = ctx.manifest.grid(grid)?;
    let rep = ctx.rep()?.map(|r| r.to_f64());
    let el = if sphere {
        connecting_partial2(&cpl, &ASphere::new(h)?, rep.as_ref(), ctx.tol_ode, ctx.steps)?
    } else {
        monodromy_partial(&cpl, &h, rep.as_ref(), ctx.steps)?
    };
    let (text, json) = element_json(&el);
    Ok(Report::ok(text, json))
}

fn homotopy_check(ctx: &Ctx, grid: &str) -> liext::Result<Report> {
    let h = ctx.manifest.grid(grid)?;
    let c = is_homotopy(&h, ctx.tol_ode, ctx.steps)?;
    let text = format!("homotopy {}  residual {:e}\n", pass_word(c.pass), c.residual);
    Ok(Report::checked(text, json!({"grid": grid, "pass": c.pass, "residual": c.residual}), c.pass))
}

fn fuzz(ctx: &Ctx, count: u64) -> liext::Result<Report> {
    let (mut agree, mut admissible) = (0u64, 0u64);
    let mut mismatches = Vec::new();
    for i in 0..count {
        let seed = ctx.seed.wrapping_add(i);
        let cpl = if i % 2 == 0 { random_admissible(seed) } else { random_perturbed(seed) };
        let adm = is_admissible(&cpl).ok();
        let jac = build_extension(&cpl).total().check_jacobi().ok();
        admissible += adm as u64;
        if adm == jac {
            agree += 1;
        } else {
            mismatches.push(seed);
        }
    }
    let pass = mismatches.is_empty();
    let text = format!(
        "couples {count}  admissible {admissible}  agreement {agree}/{count}  {}\n",
        pass_word(pass)
    );
    Ok(Report::checked(
        text,
        json!({"seed": ctx.seed, "count": count, "admissible": admissible, "agree": agree, "mismatch_seeds": mismatches}),
        pass,
    ))
}

fn run(cli: &Cli) -> liext::Result<Report> {
    let manifest = match &cli.manifest {
        Some(p) => Manifest::from_file(p)?,
        None => Manifest::default(),
    };
    let ctx = Ctx {
        tol_ode: cli.tol_ode.unwrap_or(manifest.defaults.tol_ode),
        steps: cli.steps.unwrap_or(manifest.defaults.steps),
        seed: cli.seed,
        rep: cli.rep.clone(),
        manifest,
    };
    match &cli.command {
        Command::Validate { name } => validate(&ctx, name),
        Command::Cohomology { name } => cohomology(&ctx, name),
        Command::Spectral { name } => spectral(&ctx, name),
        Command::Extend { name } => extend(&ctx, name),
        Command::Transport { couple, path, t } => transport(&ctx, couple, path, *t),
        Command::Monodromy { couple, grid, sphere } => monodromy(&ctx, couple, grid, *sphere),
        Command::HomotopyCheck { grid } => homotopy_check(&ctx, grid),
        Command::Fuzz { count } => fuzz(&ctx, *count),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => {
            let out = if cli.json { serde_json::to_string_pretty(&r.json).expect("json") + "\n" } else { r.text };
            // a closed pipe downstream is not an error of ours
            let _ = std::io::stdout().write_all(out.as_bytes());
            ExitCode::from(r.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
