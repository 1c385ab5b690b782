//! Command dispatch: argument parsing, input resolution, computation,
//! and the human and machine renderings.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};

use ratho::algebra::validate_algebra;
use ratho::certcheck::{check_infeasibility, check_join, check_retraction, CheckReport};
use ratho::homology::cohomology;
use ratho::ideal::NilCertificate;
use ratho::invariants::{
    cuplength, kernel_nilpotency, msecat, tc_report, ConstraintId, ConstraintKey, ExactReason,
    MsecatOptions, MsecatReport, StageResult, TcInput,
};
use ratho::morphism::{left_unit_section, multiplication_morphism};
use ratho::scalar;
use ratho::sullivan::{join_model, AdjoinReason};
use ratho::{Algebra, Error, Morphism};

use crate::build::{build, build_validated, Built};
use crate::corpus;
use crate::document::{parse_model, ParseError};
use crate::report::Report;

#[derive(Parser)]
#[command(
    name = "ratho",
    version,
    about = "Exact rational-homotopy invariants of CDGA models"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a model and check every algebra and morphism axiom
    Validate {
        /// Corpus entry or path to a model file
        input: String,
        /// Write a machine-readable report to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cohomology with chosen class representatives
    Cohomology {
        input: String,
        /// Highest degree computed
        #[arg(long, default_value_t = 16)]
        cutoff: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Longest nonzero product of positive-degree cohomology classes
    Cuplength {
        input: String,
        #[arg(long, default_value_t = 16)]
        cutoff: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zero-divisor cup-length: nilpotency of ker(mu) on cohomology
    Zcl {
        input: String,
        #[arg(long, default_value_t = 16)]
        cutoff: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Nilpotency of the kernel ideal of a morphism
    Nilker {
        /// A model with one morphism, or an algebra (uses its multiplication)
        input: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Staircase models of a section-carrying morphism, stage by stage
    JoinModel {
        /// A model with one section-carrying morphism, or `NAME-diagonal`
        input: String,
        /// Highest stage built
        #[arg(long, default_value_t = 4)]
        n_max: u32,
        #[arg(long, default_value_t = 16)]
        cutoff: u32,
        /// Write the generator-by-generator construction log to this path
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Least stage whose staircase model retracts onto the source
    Msecat {
        input: String,
        /// Highest stage tried
        #[arg(long, default_value_t = 4)]
        n_max: u32,
        #[arg(long, default_value_t = 16)]
        cutoff: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-sided bounds on the diagonal invariant TC_0
    TcReport {
        input: String,
        /// Assert formality even if the model's metadata does not
        #[arg(long)]
        formal: bool,
        /// Also run the retraction search through this stage
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long, default_value_t = 16)]
        cutoff: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    /// Unreadable, unparseable, or structurally inconsistent input.
    Input(String),
    /// A constructed object failed an axiom or certificate check.
    Invariant(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Invariant(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Invariant(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Validation(_) | Error::NoConvergence(_) => Failure::Invariant(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Failure {
        Failure::Input(e.to_string())
    }
}

pub fn run_from(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = i32::from(e.exit_code() != 0) * 2;
            let stream: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(stream, "{e}");
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(cmd: Cmd, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Cmd::Validate { input, out: path } => cmd_validate(&input, path.as_deref(), out),
        Cmd::Cohomology { input, cutoff, out: path } => {
            cmd_cohomology(&input, cutoff, path.as_deref(), out, err)
        }
        Cmd::Cuplength { input, cutoff, out: path } => {
            cmd_cuplength(&input, cutoff, path.as_deref(), out, err)
        }
        Cmd::Zcl { input, cutoff, out: path } => cmd_zcl(&input, cutoff, path.as_deref(), out, err),
        Cmd::Nilker { input, out: path } => cmd_nilker(&input, path.as_deref(), out, err),
        Cmd::JoinModel { input, n_max, cutoff, log, out: path } => {
            cmd_join_model(&input, n_max, cutoff, log.as_deref(), path.as_deref(), out, err)
        }
        Cmd::Msecat { input, n_max, cutoff, out: path } => {
            cmd_msecat(&input, n_max, cutoff, path.as_deref(), out, err)
        }
        Cmd::TcReport { input, formal, n_max, cutoff, out: path } => {
            cmd_tc_report(&input, formal, n_max, cutoff, path.as_deref(), out, err)
        }
    }
}

// ---------------------------------------------------------------- loading

/// Corpus entry first, then the filesystem. `Ok(None)` means the name
/// resolved to neither.
fn read_input(input: &str) -> Result<Option<String>, Failure> {
    if let Some(entry) = corpus::lookup(input) {
        return Ok(Some(entry.text.to_string()));
    }
    let path = Path::new(input);
    if path.is_file() {
        return std::fs::read_to_string(path)
            .map(Some)
            .map_err(|e| Failure::Input(format!("cannot read `{input}`: {e}")));
    }
    Ok(None)
}

fn unknown_input(input: &str) -> Failure {
    let names: Vec<&str> = corpus::ENTRIES.iter().map(|e| e.name).collect();
    Failure::Input(format!(
        "`{input}` is neither a corpus entry nor an existing file; corpus entries: {}",
        names.join(", ")
    ))
}

struct Loaded {
    label: String,
    formal_metadata: bool,
    built: Built,
}

fn load(input: &str, err: &mut dyn Write) -> Result<Loaded, Failure> {
    let Some(text) = read_input(input)? else {
        return Err(unknown_input(input));
    };
    let doc = parse_model(&text)?;
    let built = build_validated(&doc)?;
    warn_degree_one(&built, err);
    Ok(Loaded {
        label: input.to_string(),
        formal_metadata: doc.metadata.formal,
        built,
    })
}

/// Degree-1 elements break the simple connectivity the bounds assume;
/// the computation still runs.
fn warn_degree_one(built: &Built, err: &mut dyn Write) {
    for (name, a) in &built.algebras {
        if a.basis().dim_in(1) > 0 {
            let _ = writeln!(
                err,
                "warning: `{name}` has degree-1 elements; the bounds assume simply-connected models"
            );
        }
    }
}

fn the_algebra(l: &Loaded) -> Result<(String, Arc<Algebra>), Failure> {
    if l.built.algebras.len() != 1 {
        return Err(Failure::Input(format!(
            "`{}` declares {} algebras; this command needs a single-algebra model",
            l.label,
            l.built.algebras.len()
        )));
    }
    let (n, a) = &l.built.algebras[0];
    Ok((n.clone(), Arc::clone(a)))
}

/// The two-fold multiplication with its canonical left-unit section.
fn diagonal(a: &Arc<Algebra>) -> Result<Morphism, Error> {
    let mu = multiplication_morphism(a, 2)?;
    let power = Arc::clone(mu.source());
    let s = left_unit_section(a, &power)?;
    mu.with_section(s)
}

struct SelfMap {
    label: String,
    describe: String,
    morphism: Morphism,
}

fn describe(m: &Morphism) -> String {
    format!(
        "{}: {} -> {}",
        display_name(m.name()),
        m.source().name(),
        m.target().name()
    )
}

fn display_name(name: &str) -> &str {
    if name == "μ" {
        "mu"
    } else {
        name
    }
}

/// Resolve a morphism input: a document with one morphism block, a
/// single-algebra document (multiplication is implied), or the
/// `NAME-diagonal` spelling of the latter.
fn load_morphism(
    input: &str,
    need_section: bool,
    err: &mut dyn Write,
) -> Result<SelfMap, Failure> {
    let (label, loaded) = match read_input(input)? {
        Some(_) => (input.to_string(), load(input, err)?),
        None => match input.strip_suffix("-diagonal") {
            Some(base) if read_input(base)?.is_some() => (input.to_string(), load(base, err)?),
            _ => return Err(unknown_input(input)),
        },
    };
    let explicit = !input.ends_with("-diagonal") && !loaded.built.morphisms.is_empty();
    let morphism = if explicit {
        if loaded.built.morphisms.len() > 1 {
            return Err(Failure::Input(format!(
                "`{label}` declares {} morphisms; this command needs exactly one",
                loaded.built.morphisms.len()
            )));
        }
        let (name, m) = &loaded.built.morphisms[0];
        if need_section && m.section().is_none() {
            return Err(Failure::Input(format!(
                "morphism `{name}` carries no section; this command needs one"
            )));
        }
        m.clone()
    } else {
        let (_, a) = the_algebra(&loaded)?;
        diagonal(&a)?
    };
    Ok(SelfMap {
        label,
        describe: describe(&morphism),
        morphism,
    })
}

fn finish(
    human: String,
    rep: &Report,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    if let Some(p) = path {
        std::fs::write(p, rep.render())
            .map_err(|e| Failure::Input(format!("cannot write `{}`: {e}", p.display())))?;
    }
    let _ = out.write_all(human.as_bytes());
    Ok(())
}

// -------------------------------------------------------------- rendering

fn algebra_line(name: &str, a: &Algebra) -> String {
    let kind = if a.generators().is_some() { "free" } else { "table" };
    let range = if a.is_complete() {
        "complete".to_string()
    } else {
        format!("truncated above degree {}", a.top())
    };
    format!("algebra: {name} ({kind}, dim {}, {range})", a.dim())
}

fn cert_marker(certified: bool) -> &'static str {
    if certified {
        "certified"
    } else {
        "uncertified"
    }
}

/// Shared rendering for nilpotency certificates, human and machine.
fn nil_lines(
    human: &mut String,
    rep: &mut Report,
    prefix: &str,
    label: &str,
    ambient: &Arc<Algebra>,
    cert: &NilCertificate,
) {
    let pad = &label[..label.len() - label.trim_start().len()];
    let _ = writeln!(human, "{label} = {} ({})", cert.value, cert_marker(cert.certified));
    let _ = writeln!(human, "{pad}reason: {}", cert.vanishing);
    rep.field(format!("{prefix}.value"), cert.value);
    rep.field(format!("{prefix}.certified"), cert.certified);
    rep.field(format!("{prefix}.reason"), &cert.vanishing);
    match &cert.witness {
        Some(w) => {
            let _ = writeln!(human, "{pad}witness factors:");
            for f in &w.factors {
                let _ = writeln!(human, "{pad}  {}", ambient.render(f));
            }
            let _ = writeln!(human, "{pad}witness product: {}", ambient.render(&w.product));
            for (k, f) in w.factors.iter().enumerate() {
                rep.field(format!("{prefix}.witness.factor.{}", k + 1), ambient.render(f));
            }
            rep.field(format!("{prefix}.witness.product"), ambient.render(&w.product));
        }
        None if cert.value > 0 => {
            let _ = writeln!(human, "{pad}witness: none found within the search budget");
            rep.field(format!("{prefix}.witness"), "none");
        }
        None => {}
    }
}

fn constraint_text(id: &ConstraintId) -> String {
    match &id.key {
        ConstraintKey::Chain { element } => {
            format!("chain[{element}] @ {}", id.coordinate)
        }
        ConstraintKey::Module { factor, element } => {
            format!("module[{factor}, {element}] @ {}", id.coordinate)
        }
    }
}

fn check_failures(human: &mut String, rep: &mut Report, prefix: &str, report: &CheckReport) -> bool {
    if report.all_ok() {
        return true;
    }
    for item in report.failures() {
        let _ = writeln!(human, "  CHECK FAILED {}: {}", item.name, item.detail);
        rep.field(format!("{prefix}.failed.{}", item.name), &item.detail);
    }
    false
}

// --------------------------------------------------------------- commands

fn cmd_validate(input: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<i32, Failure> {
    let Some(text) = read_input(input)? else {
        return Err(unknown_input(input));
    };
    let doc = parse_model(&text)?;
    let mut human = format!("model: {input}\n");
    let mut rep = Report::new("validate");
    rep.field("input", input);

    let mut findings: Vec<String> = Vec::new();
    match build(&doc) {
        Ok(built) => {
            for (name, a) in &built.algebras {
                let _ = writeln!(human, "{}", algebra_line(name, a));
                rep.field(format!("algebra.{name}.dim"), a.dim());
                let report = validate_algebra(a)?;
                rep.field(
                    format!("algebra.{name}.checked"),
                    format!(
                        "{} products, {} triples",
                        report.checked_products, report.checked_triples
                    ),
                );
                for v in &report.violations {
                    findings.push(format!("{name}: {}: {}", v.axiom, v.witness));
                }
            }
            for (name, m) in &built.morphisms {
                let _ = writeln!(
                    human,
                    "morphism: {name}: {} -> {} (multiplicative, chain, unital{})",
                    m.source().name(),
                    m.target().name(),
                    if m.section().is_some() { ", sectioned" } else { "" }
                );
                rep.field(
                    format!("morphism.{name}"),
                    format!("{} -> {}", m.source().name(), m.target().name()),
                );
            }
        }
        // The document parsed but describes an inconsistent object; report
        // it as a finding rather than dying with an unrendered error.
        Err(e) => findings.push(e.to_string()),
    }

    for f in &findings {
        let _ = writeln!(human, "violation: {f}");
    }
    rep.field("violations", findings.len());
    for (k, f) in findings.iter().enumerate() {
        rep.field(format!("violation.{}", k + 1), f);
    }
    let ok = findings.is_empty();
    rep.field("result", if ok { "valid" } else { "invalid" });
    let _ = writeln!(human, "result: {}", if ok { "valid" } else { "invalid" });
    finish(human, &rep, path, out)?;
    Ok(if ok { 0 } else { 1 })
}

fn cmd_cohomology(
    input: &str,
    cutoff: u32,
    path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let loaded = load(input, err)?;
    let (name, a) = the_algebra(&loaded)?;
    let h = cohomology(&a, cutoff)?;
    let ha = h.algebra();

    let mut human = format!("model: {input}\n{}\n", algebra_line(&name, &a));
    let mut rep = Report::new("cohomology");
    rep.field("input", input);
    rep.field("cutoff", cutoff);
    rep.field("algebra", &name);

    let scope = if ha.is_complete() {
        "exact in all degrees".to_string()
    } else {
        format!("degrees above {cutoff} not computed")
    };
    let _ = writeln!(
        human,
        "cohomology through degree {cutoff}: {} classes ({scope})",
        ha.dim()
    );
    rep.field("classes", ha.dim());
    rep.field("scope", &scope);
    for deg in 0..=cutoff.min(ha.max_degree()) {
        let block = ha.basis().indices_in(deg);
        if block.is_empty() {
            continue;
        }
        let _ = writeln!(human, "H^{deg}: dim {}", block.len());
        rep.field(format!("h.{deg}.dim"), block.len());
        for (j, &i) in block.iter().enumerate() {
            let line = format!("{} = [{}]", ha.basis().name(i), a.render(h.representative(i)));
            let _ = writeln!(human, "  {line}");
            rep.field(format!("h.{deg}.class.{}", j + 1), &line);
        }
    }
    finish(human, &rep, path, out)?;
    Ok(0)
}

/// The algebra a ring-level invariant reads: the model itself when its
/// differential vanishes, its cohomology otherwise.
fn ring_of(
    name: &str,
    a: &Arc<Algebra>,
    cutoff: u32,
) -> Result<(Arc<Algebra>, String), Failure> {
    if a.has_zero_differential() {
        Ok((Arc::clone(a), name.to_string()))
    } else {
        let h = cohomology(a, cutoff)?;
        Ok((
            Arc::clone(h.algebra()),
            format!("H({name}) through degree {cutoff}"),
        ))
    }
}

fn cmd_cuplength(
    input: &str,
    cutoff: u32,
    path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let loaded = load(input, err)?;
    let (name, a) = the_algebra(&loaded)?;
    let (ring, ring_desc) = ring_of(&name, &a, cutoff)?;
    let cert = cuplength(&ring)?;

    let mut human = format!("model: {input}\n{}\n", algebra_line(&name, &a));
    let _ = writeln!(human, "ring: {ring_desc}");
    let mut rep = Report::new("cuplength");
    rep.field("input", input);
    rep.field("cutoff", cutoff);
    rep.field("ring", &ring_desc);
    nil_lines(&mut human, &mut rep, "cuplength", "cuplength", &ring, &cert);
    finish(human, &rep, path, out)?;
    Ok(0)
}

fn cmd_zcl(
    input: &str,
    cutoff: u32,
    path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let loaded = load(input, err)?;
    let (name, a) = the_algebra(&loaded)?;
    let (ring, ring_desc) = ring_of(&name, &a, cutoff)?;
    // Keep the tensor square around: the witness vectors live there.
    let mu = multiplication_morphism(&ring, 2)?;
    let power = Arc::clone(mu.source());
    let cert = kernel_nilpotency(&mu)?;

    let mut human = format!("model: {input}\n{}\n", algebra_line(&name, &a));
    let _ = writeln!(human, "ring: {ring_desc}");
    let _ = writeln!(human, "kernel of: mu: {} -> {}", power.name(), ring.name());
    let mut rep = Report::new("zcl");
    rep.field("input", input);
    rep.field("cutoff", cutoff);
    rep.field("ring", &ring_desc);
    nil_lines(&mut human, &mut rep, "zcl", "nil(ker mu)", &power, &cert);
    finish(human, &rep, path, out)?;
    Ok(0)
}

fn cmd_nilker(
    input: &str,
    path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let sm = load_morphism(input, false, err)?;
    let cert = kernel_nilpotency(&sm.morphism)?;
    let source = Arc::clone(sm.morphism.source());

    let mut human = format!("model: {}\nmorphism: {}\n", sm.label, sm.describe);
    let mut rep = Report::new("nilker");
    rep.field("input", &sm.label);
    rep.field("morphism", &sm.describe);
    let label = format!("nil(ker {})", display_name(sm.morphism.name()));
    nil_lines(&mut human, &mut rep, "nilker", &label, &source, &cert);
    finish(human, &rep, path, out)?;
    Ok(0)
}

fn cmd_join_model(
    input: &str,
    n_max: u32,
    cutoff: u32,
    log_path: Option<&Path>,
    path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let sm = load_morphism(input, true, err)?;
    let mut human = format!("model: {}\nmorphism: {}\ncutoff: {cutoff}\n", sm.label, sm.describe);
    let mut rep = Report::new("join-model");
    rep.field("input", &sm.label);
    rep.field("morphism", &sm.describe);
    rep.field("n-max", n_max);
    rep.field("cutoff", cutoff);

    let mut log_text = String::new();
    let mut code = 0;
    for n in 0..=n_max {
        let model = join_model(&sm.morphism, n, cutoff)?;
        let rel = model.relative();
        let check = check_join(&model)?;
        let prefix = format!("stage.{n}");
        let _ = writeln!(
            human,
            "stage n={n}: extension dim {}, generators adjoined: {}, quasi-iso through {cutoff}: {}",
            rel.extension().dim(),
            rel.log().len(),
            if rel.quasi_iso().holds() { "yes" } else { "no" }
        );
        rep.field(format!("{prefix}.extension.dim"), rel.extension().dim());
        rep.field(format!("{prefix}.generators"), rel.log().len());
        rep.field(format!("{prefix}.quasi-iso"), rel.quasi_iso().holds());
        if check_failures(&mut human, &mut rep, &prefix, &check) {
            let _ = writeln!(human, "  checks: all pass ({} items)", check.items.len());
            rep.field(format!("{prefix}.checks"), format!("pass ({} items)", check.items.len()));
        } else {
            rep.field(format!("{prefix}.checks"), "fail");
            code = 1;
        }

        let _ = writeln!(log_text, "stage n={n}");
        for g in rel.log() {
            let _ = writeln!(
                log_text,
                "  {} (degree {}): {}; D{} = {}",
                g.name,
                g.degree,
                reason_text(&g.reason),
                g.name,
                g.differential
            );
        }
    }
    if let Some(p) = log_path {
        std::fs::write(p, &log_text)
            .map_err(|e| Failure::Input(format!("cannot write `{}`: {e}", p.display())))?;
    }
    finish(human, &rep, path, out)?;
    Ok(code)
}

fn reason_text(r: &AdjoinReason) -> String {
    match r {
        AdjoinReason::MissingClass { degree, class } => {
            format!("hits the missing degree-{degree} class {class}")
        }
        AdjoinReason::ExtraClass { degree, class } => {
            format!("kills the extra degree-{degree} class {class}")
        }
    }
}

/// Per-stage rendering shared by `msecat` and the `tc-report` refinement.
/// Re-checks every certificate; returns false when the checker rejects one.
fn msecat_lines(
    human: &mut String,
    rep: &mut Report,
    prefix: &str,
    report: &MsecatReport,
) -> Result<bool, Failure> {
    let mut accepted = true;
    for stage in &report.stages {
        let n = stage.n;
        let sp = if prefix.is_empty() {
            format!("stage.{n}")
        } else {
            format!("{prefix}.stage.{n}")
        };
        match &stage.result {
            StageResult::Infeasible(c) => {
                let _ = writeln!(
                    human,
                    "stage n={n}: infeasible; obstruction in degree {} at {}{}",
                    c.degree,
                    constraint_text(&c.failing),
                    if c.crosschecked { " (crosschecked)" } else { "" }
                );
                rep.field(format!("{sp}.result"), "infeasible");
                rep.field(format!("{sp}.degree"), c.degree);
                rep.field(format!("{sp}.constraint"), constraint_text(&c.failing));
                rep.field(format!("{sp}.crosschecked"), c.crosschecked);
                for (k, (id, coeff)) in c.witness.iter().enumerate() {
                    rep.field(
                        format!("{sp}.witness.{}", k + 1),
                        format!("{} * {}", scalar::render(coeff), constraint_text(id)),
                    );
                }
                let check = check_infeasibility(&stage.model, c)?;
                if !check_failures(human, rep, &sp, &check) {
                    accepted = false;
                }
                rep.field(format!("{sp}.checker"), if check.all_ok() { "accepted" } else { "rejected" });
            }
            StageResult::Feasible(c) => {
                let f = &c.flags;
                let _ = writeln!(
                    human,
                    "stage n={n}: feasible; retraction is chain={}, identity-on-base={}, module-linear={}, kernel-on-positive={}",
                    f.chain, f.identity_on_base, f.module_linear, f.kernel_on_positive
                );
                rep.field(format!("{sp}.result"), "feasible");
                rep.field(format!("{sp}.flags.chain"), f.chain);
                rep.field(format!("{sp}.flags.identity-on-base"), f.identity_on_base);
                rep.field(format!("{sp}.flags.module-linear"), f.module_linear);
                rep.field(format!("{sp}.flags.kernel-on-positive"), f.kernel_on_positive);
                let map = c.map();
                let src = map.source();
                for i in 0..src.dim() {
                    rep.field(
                        format!("{sp}.retraction.{}", src.basis().name(i)),
                        map.target().render(map.image_of(i)),
                    );
                }
                let check = check_retraction(&stage.model, c)?;
                if !check_failures(human, rep, &sp, &check) {
                    accepted = false;
                }
                rep.field(format!("{sp}.checker"), if check.all_ok() { "accepted" } else { "rejected" });
            }
        }
    }
    Ok(accepted)
}

fn cmd_msecat(
    input: &str,
    n_max: u32,
    cutoff: u32,
    path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let sm = load_morphism(input, true, err)?;
    let opts = MsecatOptions { n_max, cutoff };
    let report = msecat(&sm.morphism, &opts)?;

    let mut human = format!(
        "model: {}\nmorphism: {}\nn-max: {n_max}\ncutoff: {cutoff}\n",
        sm.label, sm.describe
    );
    let mut rep = Report::new("msecat");
    rep.field("input", &sm.label);
    rep.field("morphism", &sm.describe);
    rep.field("n-max", n_max);
    rep.field("cutoff", cutoff);

    let accepted = msecat_lines(&mut human, &mut rep, "", &report)?;
    match report.value {
        Some(v) => {
            let _ = writeln!(human, "msecat = {v}");
            rep.field("value", v);
        }
        None => {
            let _ = writeln!(human, "msecat > {n_max} (every stage through n-max is infeasible)");
            rep.field("value", format!("> {n_max}"));
        }
    }
    finish(human, &rep, path, out)?;
    Ok(if accepted { 0 } else { 1 })
}

fn cmd_tc_report(
    input: &str,
    formal_flag: bool,
    n_max: Option<u32>,
    cutoff: u32,
    path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let loaded = load(input, err)?;
    let (name, a) = the_algebra(&loaded)?;
    let formal = formal_flag || loaded.formal_metadata;
    let tc_input = TcInput {
        algebra: Arc::clone(&a),
        formal,
        cutoff,
        msecat: n_max.map(|n| MsecatOptions { n_max: n, cutoff }),
    };
    let b = tc_report(&tc_input)?;

    let mut human = format!("model: {input}\n{}\n", algebra_line(&name, &a));
    let _ = writeln!(
        human,
        "formal: {}",
        if formal { "yes (asserted)" } else { "not asserted" }
    );
    let mut rep = Report::new("tc-report");
    rep.field("input", input);
    rep.field("cutoff", b.cutoff);
    rep.field("formal", formal);

    // Witness vectors live in the tensor squares of the cohomology and of
    // the model; rebuild those ambients for rendering.
    let h = cohomology(&a, cutoff)?;
    let h_power = Arc::clone(multiplication_morphism(h.algebra(), 2)?.source());
    let _ = writeln!(human, "lower bound, nil(ker mu) on cohomology:");
    nil_lines(&mut human, &mut rep, "lower", "  zcl", &h_power, &b.lower);
    if formal {
        let _ = writeln!(human, "upper bound: equals the lower bound (formal model)");
        rep.field("upper.value", b.upper.value);
        rep.field("upper.certified", b.upper.certified);
        rep.field("upper.reason", "formal: upper bound read off the cohomology");
    } else {
        let a_power = Arc::clone(multiplication_morphism(&a, 2)?.source());
        let _ = writeln!(human, "upper bound, nil(ker mu) on the model:");
        nil_lines(&mut human, &mut rep, "upper", "  nil(ker mu)", &a_power, &b.upper);
    }

    match &b.exact {
        Some((v, ExactReason::Formal)) => {
            let _ = writeln!(human, "TC_0 = TC_0^M = {v} (exact: formal)");
            rep.field("exact", format!("{v} (formal)"));
        }
        Some((v, ExactReason::BoundsMeet)) => {
            let _ = writeln!(human, "TC_0 = TC_0^M = {v} (exact: bounds meet)");
            rep.field("exact", format!("{v} (bounds meet)"));
        }
        None => {
            let _ = writeln!(
                human,
                "TC_0 bounds: {} <= TC_0 <= TC_0^M <= {} (exactness not claimed)",
                b.lower.value, b.upper.value
            );
            rep.field("exact", "none");
        }
    }

    let mut accepted = true;
    if let Some(ms) = &b.msecat {
        let _ = writeln!(human, "retraction search on the model's multiplication:");
        accepted = msecat_lines(&mut human, &mut rep, "msecat", ms)?;
        match ms.value {
            Some(v) => {
                let _ = writeln!(human, "msecat = {v}");
                rep.field("msecat.value", v);
            }
            None => {
                let _ = writeln!(human, "msecat > {} (every stage tried is infeasible)", ms.n_max);
                rep.field("msecat.value", format!("> {}", ms.n_max));
            }
        }
    }
    finish(human, &rep, path, out)?;
    Ok(if accepted { 0 } else { 1 })
}
