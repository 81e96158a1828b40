//! Command-line front end.

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orbispark_core::atlas::{validate_atlas, GoodAtlas};
use orbispark_core::cochain::Domain;
use orbispark_core::functorial::ChoiceMap;
use orbispark_core::homology::{cech_integer_cohomology, cohomology_all, compare_quasi_iso};
use orbispark_core::morphisms::{validate_compatible_system, validate_natural_transformation};
use orbispark_core::report::{Check, Status, ValidationReport};
use orbispark_core::spark::{
    character_mul, check_witness, spark_equivalent, Equivalence, SearchBound, Spark, SparkCharacter,
};
use orbispark_core::suites::{
    appendix_suite, complex_suite, cup_suite, functor_suite, homotopy_suite, missing, ProbeConfig,
};

use crate::format::{load_file, ComplexSpec, LoadError, Loaded, NamedCochain};
use crate::output::{CochainRecord, GroupRecord, Report};

#[derive(Debug, Parser)]
#[command(name = "orbispark", version, about = "Exact spark complexes on good orbifold atlases")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate every atlas, compatible system and natural transformation in FILE.
    Validate { file: PathBuf },
    /// Integer Čech cohomology of the nerve.
    Cohomology(CohomologyArgs),
    /// Run identity suites on random cochains.
    Verify(VerifyArgs),
    /// Spark decomposition, products and equivalence of cochain literals.
    Spark(SparkArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Complex {
    Big,
    Small,
}

impl From<Complex> for Domain {
    fn from(c: Complex) -> Domain {
        match c {
            Complex::Big => ComplexSpec::Big.into(),
            Complex::Small => ComplexSpec::Small.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Choice {
    Min,
    Max,
}

#[derive(Debug, Args)]
pub struct CohomologyArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = Complex::Big)]
    pub complex: Complex,
    /// A degree, or `all` for every degree up to the support bound.
    #[arg(long, default_value = "all", value_parser = parse_degree)]
    pub degree: Degree,
    /// Also compare with the small complex through this vertex choice.
    #[arg(long, value_enum)]
    pub phi: Option<Choice>,
    /// Restrict to one atlas of the document.
    #[arg(long)]
    pub atlas: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degree {
    All,
    One(usize),
}

fn parse_degree(s: &str) -> Result<Degree, String> {
    if s == "all" {
        return Ok(Degree::All);
    }
    s.parse().map(Degree::One).map_err(|_| format!("expected a degree or `all`, got `{s}`"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Complex,
    Cup,
    Functor,
    Homotopy,
    Appendix,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random inputs per identity.
    #[arg(long, default_value_t = 8)]
    pub probes: usize,
    /// Polynomial degree of random coefficients.
    #[arg(long, default_value_t = 3)]
    pub max_deg: u32,
    /// Polynomial degree of witnesses in spark equivalence searches.
    #[arg(long, default_value_t = 3)]
    pub bound: u32,
    /// Exit with status 3 when a check is UNKNOWN.
    #[arg(long)]
    pub strict_unknown: bool,
}

#[derive(Debug, Args)]
pub struct SparkArgs {
    #[command(subcommand)]
    pub op: SparkOp,
    /// Polynomial degree of witnesses in equivalence searches.
    #[arg(long, default_value_t = 3, global = true)]
    pub bound: u32,
    /// Spark degree; inferred from the literals when omitted.
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    /// Exit with status 3 when a check is UNKNOWN.
    #[arg(long, global = true)]
    pub strict_unknown: bool,
}

#[derive(Debug, Subcommand)]
pub enum SparkOp {
    /// Split `D a` into a global form `e` and an integer cochain `r` with `D a = e - r`.
    Decompose { file: PathBuf, cochain: String },
    /// Product of two spark characters, checked against its alternate representative.
    Mul { file: PathBuf, left: String, right: String },
    /// Search for `b`, `s` with `a - a' = D b + s`.
    Equiv { file: PathBuf, left: String, right: String },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{0}")]
    Core(#[from] orbispark_core::Error),
    #[error("{0}")]
    Usage(String),
}

/// A finished command: its report and whether UNKNOWN should fail.
pub struct Outcome {
    pub report: Report,
    pub strict_unknown: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        self.report.exit_code(self.strict_unknown)
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Validate { file } => Ok(Outcome { report: validate(&load_file(file)?), strict_unknown: false }),
        Command::Cohomology(a) => Ok(Outcome { report: cohomology(&load_file(&a.file)?, a)?, strict_unknown: false }),
        Command::Verify(a) => {
            Ok(Outcome { report: verify(&load_file(&a.file)?, a)?, strict_unknown: a.strict_unknown })
        }
        Command::Spark(a) => {
            let file = match &a.op {
                SparkOp::Decompose { file, .. } | SparkOp::Mul { file, .. } | SparkOp::Equiv { file, .. } => file,
            };
            Ok(Outcome { report: spark(&load_file(file)?, a)?, strict_unknown: a.strict_unknown })
        }
    }
}

fn tagged(r: ValidationReport, name: &str) -> ValidationReport {
    let checks = r
        .checks
        .into_iter()
        .map(|mut c| {
            c.name = format!("{}[{name}]", c.name);
            c
        })
        .collect();
    ValidationReport { checks }
}

pub fn validate(doc: &Loaded) -> Report {
    let mut report = Report::new("validate");
    for a in &doc.atlases {
        report.add_checks(&tagged(validate_atlas(a), a.name()));
    }
    for s in &doc.systems {
        report.add_checks(&tagged(validate_compatible_system(s), s.name()));
    }
    for t in &doc.transformations {
        report.add_checks(&tagged(validate_natural_transformation(t), t.name()));
    }
    report
}

fn selected<'a>(doc: &'a Loaded, name: &Option<String>) -> Result<Vec<&'a Arc<GoodAtlas>>, CliError> {
    match name {
        Some(n) => Ok(vec![doc.atlas(n)?]),
        None => Ok(doc.atlases.iter().collect()),
    }
}

pub fn cohomology(doc: &Loaded, args: &CohomologyArgs) -> Result<Report, CliError> {
    let mut report = Report::new("cohomology");
    let domain = Domain::from(args.complex);
    let label = ComplexSpec::from(domain).to_string();
    for a in selected(doc, &args.atlas)? {
        match args.degree {
            Degree::All => {
                for (k, g) in cohomology_all(a, domain).iter().enumerate() {
                    report.cohomology.push(GroupRecord::new(a.name(), &label, k, g));
                }
            }
            Degree::One(k) => {
                report.cohomology.push(GroupRecord::new(a.name(), &label, k, &cech_integer_cohomology(a, domain, k)));
            }
        }
        if let Some(choice) = args.phi {
            let phi = match choice {
                Choice::Min => ChoiceMap::min_vertex(a),
                Choice::Max => ChoiceMap::max_vertex(a),
            };
            report.add_checks(&tagged(compare_quasi_iso(a, &phi, 3)?, a.name()));
        }
    }
    Ok(report)
}

type Job<'a> = Box<dyn Fn() -> ValidationReport + Send + Sync + 'a>;

pub fn verify(doc: &Loaded, args: &VerifyArgs) -> Result<Report, CliError> {
    let cfg = ProbeConfig {
        seed: args.seed,
        probes: args.probes,
        max_deg: args.max_deg,
        bound: SearchBound { max_deg: args.bound, ..SearchBound::default() },
        ..ProbeConfig::default()
    };
    let want = |s: Suite| args.suite == s || args.suite == Suite::All;
    let mut jobs: Vec<Job> = Vec::new();
    if doc.atlases.is_empty() {
        return Err(missing("an atlas").into());
    }
    for a in &doc.atlases {
        for d in [Domain::Subsets, Domain::Vertices] {
            if want(Suite::Complex) {
                jobs.push(Box::new(move || complex_suite(a, d, &cfg)));
            }
            if want(Suite::Cup) {
                jobs.push(Box::new(move || cup_suite(a, d, &cfg)));
            }
        }
    }
    if want(Suite::Functor) {
        if doc.systems.is_empty() && args.suite == Suite::Functor {
            return Err(missing("compatible systems").into());
        }
        if !doc.systems.is_empty() {
            jobs.push(Box::new(|| functor_suite(&doc.systems, &cfg)));
        }
    }
    if want(Suite::Homotopy) {
        if doc.transformations.is_empty() && args.suite == Suite::Homotopy {
            return Err(missing("natural transformations").into());
        }
        if !doc.transformations.is_empty() {
            jobs.push(Box::new(|| homotopy_suite(&doc.transformations, &cfg)));
        }
    }
    if want(Suite::Appendix) {
        for a in &doc.atlases {
            jobs.push(Box::new(move || appendix_suite(a, &cfg)));
        }
    }
    let results: Vec<ValidationReport> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs.iter().map(|j| s.spawn(j)).collect();
        handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
    });
    let mut report = Report::new("verify");
    for r in &results {
        report.add_checks(r);
    }
    Ok(report)
}

fn degree_of(c: &NamedCochain, given: Option<usize>) -> Result<usize, CliError> {
    if let Some(k) = given {
        return Ok(k);
    }
    let degrees = c.value.total_degrees();
    match degrees.len() {
        1 => Ok(*degrees.iter().next().expect("one degree")),
        0 => Err(CliError::Usage(format!("cochain `{}` is zero; pass --degree", c.name))),
        _ => Err(CliError::Usage(format!("cochain `{}` mixes total degrees {degrees:?}", c.name))),
    }
}

fn spark_of(c: &NamedCochain, given: Option<usize>) -> Result<Result<Spark, String>, CliError> {
    let k = degree_of(c, given)?;
    match Spark::new(c.value.clone(), k) {
        Ok(s) => Ok(Ok(s)),
        Err(orbispark_core::Error::NotASpark(m)) => Ok(Err(m)),
        Err(e) => Err(e.into()),
    }
}

fn equivalence_check(name: &str, anchor: &str, e: &Equivalence) -> Check {
    match e {
        Equivalence::Equivalent { .. } => Check::new(name, anchor, Status::Pass, 1, "witness found"),
        Equivalence::Unknown(why) => Check::new(name, anchor, Status::Unknown, 1, why.clone()),
    }
}

pub fn spark(doc: &Loaded, args: &SparkArgs) -> Result<Report, CliError> {
    let bound = SearchBound { max_deg: args.bound, ..SearchBound::default() };
    let mut report = Report::new("spark");
    match &args.op {
        SparkOp::Decompose { cochain, .. } => {
            let c = doc.cochain(cochain)?;
            let name = format!("spark.equation[{cochain}]");
            match spark_of(c, args.degree)? {
                Ok(s) => {
                    report.cochains.push(CochainRecord::alternating("e", s.e().cochain()));
                    report.cochains.push(CochainRecord::ordered("r", s.r()));
                    report.add_check(&Check::new(&name, "D a = e - r", Status::Pass, 1, ""));
                }
                Err(m) => {
                    report.add_check(&Check::new(&name, "D a = e - r", Status::Fail, 1, format!("not a spark: {m}")))
                }
            }
        }
        SparkOp::Mul { left, right, .. } => {
            let (x, y) = (doc.cochain(left)?, doc.cochain(right)?);
            let (sx, sy) = (spark_of(x, args.degree)?, spark_of(y, args.degree)?);
            let (sx, sy) = match (sx, sy) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(m), _) | (_, Err(m)) => {
                    let name = format!("spark.product[{left},{right}]");
                    report.add_check(&Check::new(&name, "x ⋆ y", Status::Fail, 1, format!("not a spark: {m}")));
                    return Ok(report);
                }
            };
            if sx.atlas().name() != sy.atlas().name() {
                return Err(CliError::Usage("factors live on different atlases".into()));
            }
            let p = character_mul(&SparkCharacter::new(sx), &SparkCharacter::new(sy), &bound)?;
            report.cochains.push(CochainRecord::ordered("product", p.product.spark.a()));
            report.cochains.push(CochainRecord::ordered("alternate", &p.alternate));
            report.add_check(&equivalence_check(
                &format!("spark.product-representatives[{left},{right}]"),
                "ω∪c + (-1)^(k+1) r∪η ~ ω∪s + (-1)^(k+1) e∪η",
                &p.agreement,
            ));
        }
        SparkOp::Equiv { left, right, .. } => {
            let (x, y) = (doc.cochain(left)?, doc.cochain(right)?);
            let k = degree_of(x, args.degree)?;
            let name = format!("spark.equivalent[{left},{right}]");
            let e = spark_equivalent(&x.value, &y.value, k, &bound)?;
            if let Equivalence::Equivalent { b, s } = &e {
                if !check_witness(&x.value, &y.value, b, s)? {
                    report.add_check(&Check::new(&name, "a - a' = D b + s", Status::Fail, 1, "witness does not check"));
                    return Ok(report);
                }
                report.cochains.push(CochainRecord::ordered("b", b));
                report.cochains.push(CochainRecord::ordered("s", s));
            }
            report.add_check(&equivalence_check(&name, "a - a' = D b + s", &e));
        }
    }
    Ok(report)
}

pub fn render(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Text => report.to_text(),
    }
}
