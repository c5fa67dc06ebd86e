//! Command-line front end. `run` is pure: it returns the exit code and the
//! text to print, so it can be tested without spawning a process.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fuzzy::{self, FuzzySubset};
use crate::ideal::{self, MAX_ENUM_CAP};
use crate::io::{algebra_to_json, GlueScript, InputDocument};
use crate::localization::LocalizedSemiring;
use crate::semiring::{ElementId, FiniteSemiring, TernaryGammaSemiring};
use crate::sheaf::{SectionFamily, StructureSheaf};
use crate::spectral::{self, clean, ComparabilityGraph, Connectivity, LaplacianAnalysis};
use crate::spectrum::{find_power_decomposition, Spectrum};
use crate::triadic::{self, FilippovStatus};
use crate::verify::{verify_all, Status, VerifyOptions};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
    Csv,
}

#[derive(Parser, Debug, Clone)]
#[command(name = "gammaspec", version, about = "Prime spectra, structure sheaves and Laplacians of finite ternary Γ-semirings")]
#[command(group(ArgGroup::new("source").required(true).args(["chain", "boolean_product", "input"])))]
pub struct Cli {
    /// Use the n-element chain lattice.
    #[arg(long, value_name = "N", global = true)]
    pub chain: Option<usize>,
    /// Use the n-fold product of the Boolean semiring.
    #[arg(long = "boolean-product", value_name = "N", global = true)]
    pub boolean_product: Option<usize>,
    /// Read a JSON semiring description.
    #[arg(long, value_name = "PATH", global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Eigensolver off-diagonal tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Exhaustive enumeration cap on the carrier size (at most 20).
    #[arg(long, env = "GAMMASPEC_CAP", global = true)]
    pub cap: Option<usize>,
    /// Use covering relations instead of full comparability for graphs.
    #[arg(long, global = true)]
    pub hasse: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// Check semiring, Γ and unit-map axioms.
    Validate,
    /// List prime ideals and their containment.
    Spec,
    /// Check the closed-set axioms and the principal-open basis.
    Topology,
    /// Compare D(f) with the union of D(fᵢ) and find a power witness.
    Cover { f: String, fs: Vec<String> },
    /// Localize at an element.
    Localize { f: String },
    /// Stalk at a prime, by index.
    Stalk { p: usize },
    /// Glue the section families scripted in the input file.
    Glue,
    /// Filippov identity and bracket compatibility of restrictions.
    Bracket,
    /// Automorphism group and its action on the spectrum.
    Autos,
    /// Specialization graph, Laplacian, eigenvalues and connectivity.
    Laplacian,
    /// Spectral clustering of the spectrum.
    Cluster {
        #[arg(short = 'k')]
        k: usize,
    },
    /// Fuzzy-ideal and α-cut stability checks for the input's fuzzy subsets.
    Fuzzy,
    /// Run every check and report pass/fail.
    Verify,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    Chain(usize),
    BooleanProduct(usize),
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub source: Source,
    pub command: Command,
    pub format: Format,
    pub seed: u64,
    pub tolerance: f64,
    pub cap: usize,
    pub hasse: bool,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let source = match (cli.chain, cli.boolean_product, cli.input) {
            (Some(n), None, None) => Source::Chain(n),
            (None, Some(n), None) => Source::BooleanProduct(n),
            (None, None, Some(p)) => Source::File(p),
            _ => return Err(Error::Input("exactly one of --chain, --boolean-product, --input is required".into())),
        };
        let tolerance = cli.tol.unwrap_or(spectral::SOLVER_TOLERANCE);
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::Input(format!("tolerance must be positive, got {tolerance}")));
        }
        let cap = cli.cap.unwrap_or(ideal::DEFAULT_ENUM_CAP);
        if cap > MAX_ENUM_CAP {
            return Err(Error::Input(format!("cap {cap} exceeds the hard limit {MAX_ENUM_CAP}")));
        }
        Ok(RunConfig { source, command: cli.command, format: cli.format, seed: cli.seed, tolerance, cap, hasse: cli.hasse })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses arguments (including the program name) and runs.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => match RunConfig::from_cli(cli) {
            Ok(cfg) => run(&cfg),
            Err(e) => failure(&e),
        },
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            }
        }
    }
}

fn failure(e: &Error) -> Outcome {
    let code = if e.is_consistency() { 2 } else { 1 };
    Outcome { code, stdout: String::new(), stderr: format!("error: {e}\n") }
}

pub fn run(cfg: &RunConfig) -> Outcome {
    match dispatch(cfg) {
        Ok((code, stdout)) => Outcome { code, stdout, stderr: String::new() },
        Err(e) => failure(&e),
    }
}

struct Loaded {
    doc: Option<InputDocument>,
    algebra: Option<TernaryGammaSemiring>,
}

fn load(cfg: &RunConfig) -> Result<Loaded> {
    match &cfg.source {
        Source::Chain(n) => Ok(Loaded { doc: None, algebra: Some(TernaryGammaSemiring::with_trivial_gamma(FiniteSemiring::chain(*n)?)) }),
        Source::BooleanProduct(n) => {
            Ok(Loaded { doc: None, algebra: Some(TernaryGammaSemiring::with_trivial_gamma(FiniteSemiring::boolean_power(*n)?)) })
        }
        Source::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
            Ok(Loaded { doc: Some(InputDocument::parse(&text)?), algebra: None })
        }
    }
}

impl Loaded {
    fn algebra(&self) -> Result<TernaryGammaSemiring> {
        match (&self.algebra, &self.doc) {
            (Some(a), _) => Ok(a.clone()),
            (None, Some(d)) => d.algebra(),
            (None, None) => unreachable!("a source was loaded"),
        }
    }
}

fn unsupported(cfg: &RunConfig, command: &str) -> Error {
    Error::Input(format!("format {:?} is not supported by `{command}`", cfg.format).to_lowercase())
}

fn envelope(command: &str, body: Value) -> String {
    let mut out = json!({ "schema": SCHEMA_VERSION, "command": command });
    if let (Some(o), Value::Object(b)) = (out.as_object_mut(), body) {
        o.extend(b);
    }
    format!("{}\n", serde_json::to_string_pretty(&out).expect("serializable"))
}

fn element(t: &TernaryGammaSemiring, name: &str) -> Result<ElementId> {
    t.semiring().index_of(name).ok_or_else(|| Error::Input(format!("unknown element \"{name}\"")))
}

fn set_names(t: &TernaryGammaSemiring, set: crate::bitset::Subset) -> Vec<String> {
    set.iter().map(|x| t.semiring().name(x).to_string()).collect()
}

fn matrix_text(out: &mut String, rows: &[Vec<i64>]) {
    let width = rows.iter().flatten().map(|x| x.to_string().len()).max().unwrap_or(1);
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>width$}")).collect();
        writeln!(out, "  [{}]", cells.join(" ")).unwrap();
    }
}

fn values_text(values: &[f64]) -> String {
    values.iter().map(|&v| clean(v).to_string()).collect::<Vec<_>>().join(", ")
}

fn dispatch(cfg: &RunConfig) -> Result<(i32, String)> {
    let loaded = load(cfg)?;
    match &cfg.command {
        Command::Validate => cmd_validate(cfg, &loaded),
        Command::Spec => cmd_spec(cfg, &loaded.algebra()?),
        Command::Topology => cmd_topology(cfg, &loaded.algebra()?),
        Command::Cover { f, fs } => cmd_cover(cfg, &loaded.algebra()?, f, fs),
        Command::Localize { f } => cmd_localize(cfg, &loaded.algebra()?, f),
        Command::Stalk { p } => cmd_stalk(cfg, &loaded.algebra()?, *p),
        Command::Glue => cmd_glue(cfg, &loaded),
        Command::Bracket => cmd_bracket(cfg, &loaded.algebra()?),
        Command::Autos => cmd_autos(cfg, &loaded.algebra()?),
        Command::Laplacian => cmd_laplacian(cfg, &loaded.algebra()?),
        Command::Cluster { k } => cmd_cluster(cfg, &loaded.algebra()?, *k),
        Command::Fuzzy => cmd_fuzzy(cfg, &loaded),
        Command::Verify => cmd_verify(cfg, &loaded),
    }
}

fn cmd_validate(cfg: &RunConfig, loaded: &Loaded) -> Result<(i32, String)> {
    let report = match &loaded.doc {
        Some(doc) => doc.validate()?,
        None => Default::default(),
    };
    let t = if report.is_valid() { Some(loaded.algebra()?) } else { None };
    let violations: Vec<String> = report.all().iter().map(ToString::to_string).collect();
    let code = if report.is_valid() { 0 } else { 1 };
    let out = match cfg.format {
        Format::Json => envelope(
            "validate",
            json!({
                "valid": report.is_valid(),
                "carrier": t.as_ref().map(|t| t.size()),
                "gamma": t.as_ref().map(|t| t.gamma().size()),
                "idempotent": t.as_ref().map(|t| t.semiring().is_idempotent()),
                "units": t.as_ref().map(|t| t.semiring().unit_group().iter().map(|&u| t.semiring().name(u).to_string()).collect::<Vec<_>>()),
                "violations": violations,
                "algebra": t.as_ref().map(algebra_to_json),
            }),
        ),
        Format::Text => {
            let mut out = String::new();
            for (label, list) in [("semiring", &report.semiring), ("Γ", &report.gamma), ("unit map", &report.units)] {
                if list.is_empty() {
                    writeln!(out, "{label}: ok").unwrap();
                } else {
                    writeln!(out, "{label}: {} violation(s)", list.len()).unwrap();
                    for v in list.iter().take(10) {
                        writeln!(out, "  {v}").unwrap();
                    }
                }
            }
            if let Some(t) = &t {
                let s = t.semiring();
                writeln!(out, "carrier: {} elements [{}]", s.size(), s.names().join(", ")).unwrap();
                writeln!(out, "Γ: {} element(s); idempotent addition: {}", t.gamma().size(), s.is_idempotent()).unwrap();
            }
            out
        }
        _ => return Err(unsupported(cfg, "validate")),
    };
    Ok((code, out))
}

fn cmd_spec(cfg: &RunConfig, t: &TernaryGammaSemiring) -> Result<(i32, String)> {
    let x = Spectrum::with_cap(t, cfg.cap)?;
    let out = match cfg.format {
        Format::Text => {
            let mut out = format!("{} elements, {} prime(s)\n", t.size(), x.len());
            for i in 0..x.len() {
                writeln!(out, "P{i} = {}", x.prime_label(i)).unwrap();
            }
            writeln!(out, "containment (row ⊆ column):").unwrap();
            let rows: Vec<Vec<i64>> = x.containment().iter().map(|r| r.iter().map(|&b| b as i64).collect()).collect();
            matrix_text(&mut out, &rows);
            out
        }
        Format::Json => envelope(
            "spec",
            json!({
                "elements": t.semiring().names(),
                "primes": (0..x.len()).map(|i| json!({ "index": i, "label": x.prime_label(i), "members": set_names(t, x.prime(i)) })).collect::<Vec<_>>(),
                "containment": x.containment(),
                "hasse_edges": x.hasse_edges(),
            }),
        ),
        Format::Dot => x.to_dot(cfg.hasse),
        Format::Csv => {
            let mut out = String::new();
            for row in x.containment() {
                writeln!(out, "{}", row.iter().map(|&b| (b as u8).to_string()).collect::<Vec<_>>().join(",")).unwrap();
            }
            out
        }
    };
    Ok((0, out))
}

fn cmd_topology(cfg: &RunConfig, t: &TernaryGammaSemiring) -> Result<(i32, String)> {
    let x = Spectrum::with_cap(t, cfg.cap)?;
    let rep = x.verify_topology_axioms()?;
    let opens: Vec<Vec<usize>> = (0..t.size()).map(|f| x.principal_open(f).points.iter().collect()).collect();
    let code = if rep.holds() { 0 } else { 2 };
    let out = match cfg.format {
        Format::Text => {
            let mut out = format!("topology axioms: {} instance(s), {} failure(s)\n", rep.instances, rep.failures.len());
            for f in &rep.failures {
                writeln!(out, "  {f}").unwrap();
            }
            for (f, pts) in opens.iter().enumerate() {
                let labels: Vec<String> = pts.iter().map(|p| format!("P{p}")).collect();
                writeln!(out, "D({}) = {{{}}}", t.semiring().name(f), labels.join(", ")).unwrap();
            }
            out
        }
        Format::Json => envelope(
            "topology",
            json!({
                "instances": rep.instances,
                "failures": rep.failures,
                "principal_opens": t.semiring().names().iter().zip(&opens).map(|(n, p)| json!({ "element": n, "points": p })).collect::<Vec<_>>(),
            }),
        ),
        _ => return Err(unsupported(cfg, "topology")),
    };
    Ok((code, out))
}

fn cmd_cover(cfg: &RunConfig, t: &TernaryGammaSemiring, f: &str, fs: &[String]) -> Result<(i32, String)> {
    let x = Spectrum::with_cap(t, cfg.cap)?;
    let f = element(t, f)?;
    let fs: Vec<ElementId> = fs.iter().map(|g| element(t, g)).collect::<Result<_>>()?;
    let v = x.check_standard_cover(f, &fs)?;
    let dec = find_power_decomposition(t, f, &fs)?;
    if let Some(d) = &dec {
        if !d.reproduces(t, f, &fs) {
            return Err(Error::Consistency("power decomposition does not reproduce f^N".into()));
        }
    }
    let s = t.semiring();
    let names: Vec<&str> = fs.iter().map(|&g| s.name(g)).collect();
    let out = match cfg.format {
        Format::Text => {
            let mut out = String::new();
            let f_name = s.name(f);
            let union = names.iter().map(|g| format!("D({g})")).collect::<Vec<_>>().join(" ∪ ");
            let union = if union.is_empty() { "∅".to_string() } else { union };
            writeln!(out, "D({f_name}) ⊆ {union}: {}", v.covers).unwrap();
            writeln!(out, "D({f_name}) = {union}: {}", v.equal).unwrap();
            writeln!(out, "{f_name} in radical of <{}>: {}", names.join(", "), v.radical_member).unwrap();
            match &dec {
                Some(d) => {
                    let terms: Vec<String> =
                        d.coefficients.iter().zip(&names).map(|(&a, g)| format!("{}·{g}", s.name(a))).collect();
                    let rhs = if terms.is_empty() { s.name(s.zero()).to_string() } else { terms.join(" + ") };
                    writeln!(out, "witness: {f_name}^{} = {rhs}", d.exponent).unwrap();
                }
                None => writeln!(out, "witness: none").unwrap(),
            }
            out
        }
        Format::Json => envelope(
            "cover",
            json!({
                "f": s.name(f),
                "fs": names,
                "covers": v.covers,
                "equal": v.equal,
                "radical_member": v.radical_member,
                "refines": v.refines,
                "witness": dec.as_ref().map(|d| json!({
                    "exponent": d.exponent,
                    "coefficients": d.coefficients.iter().map(|&a| s.name(a)).collect::<Vec<_>>(),
                })),
            }),
        ),
        _ => return Err(unsupported(cfg, "cover")),
    };
    Ok((0, out))
}

fn localized_json(l: &LocalizedSemiring) -> Value {
    let s = l.semiring();
    let n = s.size();
    let table = |op: &dyn Fn(usize, usize) -> usize| -> Vec<Vec<String>> {
        (0..n).map(|a| (0..n).map(|b| s.name(op(a, b)).to_string()).collect()).collect()
    };
    let base = l.base().semiring();
    json!({
        "element": base.name(l.element()),
        "classes": (0..n).map(|c| json!({
            "name": s.name(c),
            "members": l.members(c).iter().map(|&(a, d)| format!("{}/{}", base.name(a), base.name(d))).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "add": table(&|a, b| s.add(a, b)),
        "mul": table(&|a, b| s.mul(a, b)),
        "canonical": l.canonical().iter().map(|&c| s.name(c)).collect::<Vec<_>>(),
    })
}

fn localized_text(out: &mut String, l: &LocalizedSemiring) {
    let s = l.semiring();
    let base = l.base().semiring();
    writeln!(out, "{} class(es)", s.size()).unwrap();
    for c in 0..s.size() {
        let members: Vec<String> = l.members(c).iter().map(|&(a, d)| format!("{}/{}", base.name(a), base.name(d))).collect();
        writeln!(out, "  {} = [{}]", s.name(c), members.join(", ")).unwrap();
    }
    let iota: Vec<String> = (0..base.size()).map(|a| format!("{} ↦ {}", base.name(a), s.name(l.iota(a)))).collect();
    writeln!(out, "canonical map: {}", iota.join(", ")).unwrap();
}

fn cmd_localize(cfg: &RunConfig, t: &TernaryGammaSemiring, f: &str) -> Result<(i32, String)> {
    let f = element(t, f)?;
    let l = crate::localization::localize(t, f)?;
    if !l.relation_is_equivalence() {
        return Err(Error::Consistency("fraction relation is not an equivalence".into()));
    }
    let out = match cfg.format {
        Format::Text => {
            let mut out = format!("localization at {}: ", t.semiring().name(f));
            localized_text(&mut out, &l);
            out
        }
        Format::Json => envelope("localize", localized_json(&l)),
        _ => return Err(unsupported(cfg, "localize")),
    };
    Ok((0, out))
}

fn sheaf_for(cfg: &RunConfig, t: &TernaryGammaSemiring) -> Result<StructureSheaf> {
    StructureSheaf::from_spectrum(Spectrum::with_cap(t, cfg.cap)?)
}

fn cmd_stalk(cfg: &RunConfig, t: &TernaryGammaSemiring, p: usize) -> Result<(i32, String)> {
    let sheaf = sheaf_for(cfg, t)?;
    let stalk = sheaf.stalk(p)?;
    let label = sheaf.spectrum().prime_label(p);
    let out = match cfg.format {
        Format::Text => {
            let mut out = format!("stalk at P{p} = {label}, realized as the localization at {}: ", t.semiring().name(stalk.element()));
            localized_text(&mut out, &stalk);
            out
        }
        Format::Json => {
            let mut body = localized_json(&stalk);
            body["prime"] = json!({ "index": p, "label": label });
            envelope("stalk", body)
        }
        _ => return Err(unsupported(cfg, "stalk")),
    };
    Ok((0, out))
}

fn script_family(sheaf: &StructureSheaf, script: &GlueScript) -> Result<SectionFamily> {
    let s = sheaf.algebra().semiring();
    let sections = script
        .cover
        .iter()
        .zip(&script.sections)
        .map(|(&fi, &(a, d))| {
            sheaf.sections(fi).class_of(a, d).ok_or_else(|| {
                Error::Input(format!("{}/{} is not a fraction over D({})", s.name(a), s.name(d), s.name(fi)))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SectionFamily { element: script.f, cover: script.cover.clone(), sections })
}

fn cmd_glue(cfg: &RunConfig, loaded: &Loaded) -> Result<(i32, String)> {
    let Some(doc) = &loaded.doc else {
        return Err(Error::Input("`glue` needs --input with a glue_scripts section".into()));
    };
    let input = doc.load()?;
    if input.glue_scripts.is_empty() {
        return Err(Error::Input("input has no glue_scripts".into()));
    }
    let t = &input.algebra;
    let s = t.semiring();
    let sheaf = sheaf_for(cfg, t)?;
    let mut results = Vec::new();
    for script in &input.glue_scripts {
        let family = script_family(&sheaf, script)?;
        let glued = sheaf.glue(&family)?;
        sheaf.check_gluing_uniqueness(script.f, &script.cover)?;
        results.push((script, glued));
    }
    let out = match cfg.format {
        Format::Text => {
            let mut out = String::new();
            for (script, g) in &results {
                let local = sheaf.sections(script.f).semiring();
                let cover: Vec<&str> = script.cover.iter().map(|&c| s.name(c)).collect();
                writeln!(
                    out,
                    "D({}) covered by [{}]: glued section {} (numerator {}, f-power {}, common exponent {}); unique",
                    s.name(script.f),
                    cover.join(", "),
                    local.name(g.section),
                    s.name(g.numerator),
                    g.exponent,
                    g.common_exponent
                )
                .unwrap();
            }
            out
        }
        Format::Json => envelope(
            "glue",
            json!({
                "results": results.iter().map(|(script, g)| json!({
                    "f": s.name(script.f),
                    "cover": script.cover.iter().map(|&c| s.name(c)).collect::<Vec<_>>(),
                    "section": sheaf.sections(script.f).semiring().name(g.section),
                    "numerator": s.name(g.numerator),
                    "exponent": g.exponent,
                    "common_exponent": g.common_exponent,
                    "coefficients": g.coefficients.iter().map(|&a| s.name(a)).collect::<Vec<_>>(),
                    "unique": true,
                })).collect::<Vec<_>>(),
            }),
        ),
        _ => return Err(unsupported(cfg, "glue")),
    };
    Ok((0, out))
}

fn filippov_json(label: &str, status: &FilippovStatus) -> Value {
    match status {
        FilippovStatus::HypothesisNotMet => json!({ "target": label, "status": "hypothesis not met" }),
        FilippovStatus::Holds { tuples } => json!({ "target": label, "status": "holds", "tuples": tuples }),
        FilippovStatus::Violated { tuple, gamma } => {
            json!({ "target": label, "status": "violated", "tuple": tuple, "gamma": gamma })
        }
    }
}

fn cmd_bracket(cfg: &RunConfig, t: &TernaryGammaSemiring) -> Result<(i32, String)> {
    let sheaf = sheaf_for(cfg, t)?;
    let s = t.semiring();
    let n = t.size();
    let mut statuses = vec![("T".to_string(), triadic::verify_filippov(t))];
    for f in 0..n {
        statuses.push((format!("T_{}", s.name(f)), triadic::verify_filippov(sheaf.sections(f).algebra())));
    }
    let mut compat_checked = 0;
    let mut compat_failures = Vec::new();
    for f in 0..n {
        for g in 0..n {
            if !sheaf.open_contained(g, f) {
                continue;
            }
            for gamma in 0..t.gamma().size() {
                compat_checked += 1;
                if !triadic::verify_restriction_compat(&sheaf, f, g, gamma)? {
                    compat_failures.push(format!("ρ({},{}) at γ={gamma}", s.name(f), s.name(g)));
                }
            }
        }
    }
    let failed = statuses.iter().any(|(_, st)| matches!(st, FilippovStatus::Violated { .. })) || !compat_failures.is_empty();
    let code = if failed { 2 } else { 0 };
    let out = match cfg.format {
        Format::Text => {
            let mut out = String::new();
            for (label, st) in &statuses {
                let text = match st {
                    FilippovStatus::HypothesisNotMet => "skipped (addition not idempotent)".to_string(),
                    FilippovStatus::Holds { tuples } => format!("holds on {tuples} tuple(s)"),
                    FilippovStatus::Violated { tuple, gamma } => format!("VIOLATED at {tuple:?}, γ = {gamma}"),
                };
                writeln!(out, "Filippov identity on {label}: {text}").unwrap();
            }
            writeln!(out, "bracket compatibility of restrictions: {compat_checked} checked, {} failure(s)", compat_failures.len()).unwrap();
            for f in &compat_failures {
                writeln!(out, "  {f}").unwrap();
            }
            out
        }
        Format::Json => envelope(
            "bracket",
            json!({
                "filippov": statuses.iter().map(|(l, st)| filippov_json(l, st)).collect::<Vec<_>>(),
                "restriction_checks": compat_checked,
                "restriction_failures": compat_failures,
            }),
        ),
        _ => return Err(unsupported(cfg, "bracket")),
    };
    Ok((code, out))
}

fn cmd_autos(cfg: &RunConfig, t: &TernaryGammaSemiring) -> Result<(i32, String)> {
    let x = Spectrum::with_cap(t, cfg.cap)?;
    let cap = cfg.cap.max(triadic::AUTOMORPHISM_CAP);
    let autos = triadic::enumerate_gamma_automorphisms_with_cap(t, cap)?;
    let s = t.semiring();
    let mut rows = Vec::new();
    let mut all_hold = true;
    for sigma in &autos {
        let act = triadic::automorphism_action(sigma, &x)?;
        let inv = spectral::check_permutation_invariance(t, sigma)?;
        all_hold &= act.holds() && inv.holds();
        rows.push((sigma, act, inv));
    }
    let code = if all_hold { 0 } else { 2 };
    let out = match cfg.format {
        Format::Text => {
            let mut out = format!("{} automorphism(s)\n", autos.len());
            for (sigma, act, inv) in &rows {
                let map: Vec<String> = (0..t.size()).map(|a| format!("{}→{}", s.name(a), s.name(sigma.apply(a)))).collect();
                let points: Vec<String> = act.point_map.iter().enumerate().map(|(i, j)| format!("P{i}→P{j}")).collect();
                writeln!(
                    out,
                    "  [{}]  points [{}]  homeomorphism: {}  bracket: {}  Laplacian invariant: {}",
                    map.join(" "),
                    points.join(" "),
                    act.preserves_containment,
                    act.preserves_bracket,
                    inv.holds()
                )
                .unwrap();
            }
            out
        }
        Format::Json => envelope(
            "autos",
            json!({
                "count": autos.len(),
                "automorphisms": rows.iter().map(|(sigma, act, inv)| json!({
                    "map": sigma.map().iter().map(|&a| s.name(a)).collect::<Vec<_>>(),
                    "point_map": act.point_map,
                    "preserves_containment": act.preserves_containment,
                    "preserves_bracket": act.preserves_bracket,
                    "laplacian_invariant": inv.holds(),
                })).collect::<Vec<_>>(),
            }),
        ),
        _ => return Err(unsupported(cfg, "autos")),
    };
    Ok((code, out))
}

fn analysis_for(cfg: &RunConfig, t: &TernaryGammaSemiring) -> Result<(Spectrum, LaplacianAnalysis)> {
    let x = Spectrum::with_cap(t, cfg.cap)?;
    let graph = if cfg.hasse { ComparabilityGraph::hasse(&x) } else { ComparabilityGraph::from_spectrum(&x) };
    let a = LaplacianAnalysis::with_tolerance(graph, cfg.tolerance)?;
    Ok((x, a))
}

fn connectivity_text(c: &Connectivity) -> String {
    match c {
        Connectivity::Empty => "empty spectrum".into(),
        Connectivity::TriviallyConnected => "trivially connected (one point)".into(),
        Connectivity::Verdict { combinatorial: true, .. } => "connected".into(),
        Connectivity::Verdict { components, .. } => format!("disconnected ({components} components)"),
    }
}

fn cmd_laplacian(cfg: &RunConfig, t: &TernaryGammaSemiring) -> Result<(i32, String)> {
    let (x, a) = analysis_for(cfg, t)?;
    let verdict = a.connectivity_verdict()?;
    let blocks = a.block_decomposition()?;
    let out = match cfg.format {
        Format::Text => {
            let mut out = String::new();
            for i in 0..x.len() {
                writeln!(out, "P{i} = {}", x.prime_label(i)).unwrap();
            }
            writeln!(out, "L =").unwrap();
            matrix_text(&mut out, &a.matrices.laplacian);
            writeln!(out, "eigenvalues: {}", values_text(a.eigenvalues())).unwrap();
            if let Some(l2) = a.fiedler_value() {
                writeln!(out, "λ₂ = {}", clean(l2)).unwrap();
            }
            writeln!(out, "connectivity: {}", connectivity_text(&verdict)).unwrap();
            let comps: Vec<String> = a
                .components
                .iter()
                .map(|c| format!("{{{}}}", c.iter().map(|p| format!("P{p}")).collect::<Vec<_>>().join(", ")))
                .collect();
            writeln!(out, "components: {}", comps.join(" ")).unwrap();
            writeln!(out, "block sizes: {:?} (spectra agree: {})", blocks.block_sizes, blocks.verified).unwrap();
            out
        }
        Format::Json => {
            let mut body = a.to_json(None);
            body["connectivity"] = serde_json::to_value(&verdict).expect("serializable");
            body["blocks"] = json!({ "permutation": blocks.permutation, "sizes": blocks.block_sizes, "verified": blocks.verified });
            envelope("laplacian", body)
        }
        Format::Csv => a.eigenvalues_csv(),
        Format::Dot => x.to_dot(cfg.hasse),
    };
    Ok((if blocks.verified { 0 } else { 2 }, out))
}

fn cmd_cluster(cfg: &RunConfig, t: &TernaryGammaSemiring, k: usize) -> Result<(i32, String)> {
    let (_, a) = analysis_for(cfg, t)?;
    let c = spectral::spectral_cluster(&a, k, cfg.seed)?;
    let out = match cfg.format {
        Format::Text => {
            let mut out = format!("k = {k}, seed = {}, {} iteration(s), objective {}\n", cfg.seed, c.iterations, clean(c.objective()));
            for (i, cluster) in c.clusters().iter().enumerate() {
                let pts: Vec<String> = cluster.iter().map(|p| format!("P{p}")).collect();
                writeln!(out, "cluster {i}: {{{}}}", pts.join(", ")).unwrap();
            }
            out
        }
        Format::Json => envelope("cluster", a.to_json(Some(&c))),
        Format::Csv => {
            let mut out = String::from("point,cluster\n");
            for (p, l) in c.assignment.iter().enumerate() {
                writeln!(out, "{p},{l}").unwrap();
            }
            out
        }
        Format::Dot => return Err(unsupported(cfg, "cluster")),
    };
    Ok((0, out))
}

fn cmd_fuzzy(cfg: &RunConfig, loaded: &Loaded) -> Result<(i32, String)> {
    let Some(doc) = &loaded.doc else {
        return Err(Error::Input("`fuzzy` needs --input with a fuzzy section".into()));
    };
    let input = doc.load()?;
    if input.fuzzy.is_empty() {
        return Err(Error::Input("input has no fuzzy subsets".into()));
    }
    let t = &input.algebra;
    let s = t.semiring();
    let mut entries = Vec::new();
    for (label, mu) in &input.fuzzy {
        let violation = fuzzy::fuzzy_ideal_violation(t, mu)?;
        let cuts: Vec<(String, Vec<String>, bool)> = mu
            .levels()
            .into_iter()
            .filter(|a| *a > 0.into())
            .map(|alpha| {
                let cut = fuzzy::alpha_cut(mu, alpha);
                (alpha.to_string(), set_names(t, cut), ideal::is_gamma_ideal(t, cut))
            })
            .collect();
        if violation.is_none() && cuts.iter().any(|(_, members, is_ideal)| !members.is_empty() && !is_ideal) {
            return Err(Error::Consistency(format!("{label} is a fuzzy ideal with a non-ideal cut")));
        }
        entries.push((label, violation, cuts));
    }
    let mut pairs = Vec::new();
    for (i, (l1, mu)) in input.fuzzy.iter().enumerate() {
        for (l2, nu) in &input.fuzzy[i + 1..] {
            let eps = fuzzy::sup_distance(mu, nu)?;
            let grid = fuzzy::alpha_grid(mu, nu, eps);
            for alpha in &grid {
                fuzzy::verify_stability(mu, nu, *alpha, eps)?;
            }
            pairs.push((l1, l2, eps, grid.len()));
        }
    }
    let out = match cfg.format {
        Format::Text => {
            let mut out = String::new();
            for (label, violation, cuts) in &entries {
                let grades: Vec<String> = mu_text(s, input.fuzzy.iter().find(|(l, _)| l == *label).map(|(_, m)| m).unwrap());
                writeln!(out, "{label} = ({})", grades.join(", ")).unwrap();
                match violation {
                    None => writeln!(out, "  fuzzy Γ-ideal: yes").unwrap(),
                    Some(v) => writeln!(out, "  fuzzy Γ-ideal: no ({v})").unwrap(),
                }
                for (alpha, members, is_ideal) in cuts {
                    writeln!(out, "  cut at {alpha}: {{{}}} ideal: {is_ideal}", members.join(", ")).unwrap();
                }
            }
            for (l1, l2, eps, n) in &pairs {
                writeln!(out, "stability of {l1} vs {l2} at ε = {eps}: holds at {n} breakpoint(s)").unwrap();
            }
            out
        }
        Format::Json => envelope(
            "fuzzy",
            json!({
                "subsets": entries.iter().map(|(label, violation, cuts)| json!({
                    "name": label,
                    "fuzzy_ideal": violation.is_none(),
                    "violation": violation.as_ref().map(ToString::to_string),
                    "cuts": cuts.iter().map(|(a, m, i)| json!({ "alpha": a, "members": m, "ideal": i })).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
                "stability": pairs.iter().map(|(l1, l2, eps, n)| json!({
                    "mu": l1, "nu": l2, "epsilon": eps.to_string(), "breakpoints": n, "holds": true,
                })).collect::<Vec<_>>(),
            }),
        ),
        _ => return Err(unsupported(cfg, "fuzzy")),
    };
    Ok((0, out))
}

fn mu_text(s: &FiniteSemiring, mu: &FuzzySubset) -> Vec<String> {
    mu.grades().iter().enumerate().map(|(x, g)| format!("{}: {g}", s.name(x))).collect()
}

fn cmd_verify(cfg: &RunConfig, loaded: &Loaded) -> Result<(i32, String)> {
    let (t, fuzzy) = match &loaded.doc {
        Some(doc) => {
            let input = doc.load()?;
            (input.algebra, input.fuzzy)
        }
        None => (loaded.algebra()?, Vec::new()),
    };
    let opts = VerifyOptions { cap: cfg.cap, seed: cfg.seed, solver_tolerance: cfg.tolerance, fuzzy, ..Default::default() };
    let report = verify_all(&t, &opts)?;
    let code = if report.passed() { 0 } else { 2 };
    let out = match cfg.format {
        Format::Text => {
            let mut out = String::new();
            for c in &report.checks {
                let tag = match c.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Skipped => "SKIP",
                };
                write!(out, "{tag}  [{}] {} ({} instance(s))", c.module, c.name, c.instances).unwrap();
                if !c.detail.is_empty() {
                    write!(out, ": {}", c.detail).unwrap();
                }
                out.push('\n');
            }
            let failed = report.failures().count();
            writeln!(out, "{} check(s), {failed} failure(s)", report.checks.len()).unwrap();
            out
        }
        Format::Json => envelope("verify", json!({ "passed": report.passed(), "checks": report.checks })),
        _ => return Err(unsupported(cfg, "verify")),
    };
    Ok((code, out))
}
