use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tnnflag::homology::reduced_homology;
use tnnflag::io::{poset_to_dot, PosetJson};
use tnnflag::poset::label::{el_label_twisted_interval, verify_el, ChainReading, ReflectionOrder};
use tnnflag::poset::{order_complex, ComplexMode};
use tnnflag::suite::{run_suite, SuiteConfig, SuiteKind, Verdict};
use tnnflag::twisted::ParabolicContext;
use tnnflag::{Budget, CartanConfig, CartanMatrix, Error, WeylElement, WeylGroup, Word};

/// Exit code when every check passes.
const EXIT_PASS: u8 = 0;
/// Exit code when some check fails.
const EXIT_FAIL: u8 = 2;
/// Exit code when no check fails but some were cut short by a budget.
const EXIT_INCONCLUSIVE: u8 = 3;
/// Exit code for invalid input.
const EXIT_USAGE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "tnnflag",
    version,
    about = "Twisted Bruhat orders, positive cells and poset certificates"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// JSON file `{"cartan": [[2,-1],[-1,2]], "labels": ["1","2"]}`.
    #[arg(long, global = true, conflicts_with = "cartan_type")]
    config: Option<PathBuf>,
    /// Named Cartan type instead of a config file (A3, B2, G2, A1~, H3,3, ...).
    #[arg(long = "type", global = true)]
    cartan_type: Option<String>,
    /// Node labels of J, comma or space separated.
    #[arg(long = "J", global = true, default_value = "")]
    j: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest number of group elements any enumeration may visit.
    #[arg(long = "budget-elems", global = true)]
    budget_elems: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include per-check wall-clock timings (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Compare two elements in the twisted order.
    Order { v: String, w: String },
    /// Build the twisted interval [x, y] and run checks on it.
    Interval {
        x: String,
        y: String,
        /// Checks to run.
        #[arg(long, value_delimiter = ',', default_value = "pure,thin,el,homology")]
        checks: Vec<IntervalCheck>,
    },
    /// Run a verification suite.
    VerifySuite {
        #[arg(value_enum)]
        suite: SuiteArg,
        /// Reduced sizes for a fast smoke run.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IntervalCheck {
    Pure,
    Thin,
    El,
    Homology,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Flags,
    Twisted,
    Doubleflag,
    All,
}

/// A failed command: message plus exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => EXIT_INCONCLUSIVE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok((output, code)) => match emit(&cli.global, &output) {
            Ok(()) => ExitCode::from(code),
            Err(f) => {
                eprintln!("error: {}", f.message);
                ExitCode::from(f.code)
            }
        },
        Err(f) => {
            eprintln!("error: {}", f.message);
            if f.code == EXIT_INCONCLUSIVE && cli.global.format == Format::Json {
                let marker = json!({ "verdict": "inconclusive", "reason": f.message });
                let _ = emit(&cli.global, &format!("{marker}\n"));
            }
            ExitCode::from(f.code)
        }
    }
}

fn emit(global: &GlobalArgs, output: &str) -> Result<(), Failure> {
    match &global.out {
        Some(path) => fs::write(path, output)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{output}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<(String, u8), Failure> {
    match &cli.command {
        Command::Order { v, w } => cmd_order(&cli.global, v, w),
        Command::Interval { x, y, checks } => cmd_interval(&cli.global, x, y, checks),
        Command::VerifySuite { suite, quick } => cmd_verify_suite(&cli.global, *suite, *quick),
    }
}

fn load_group(global: &GlobalArgs) -> Result<WeylGroup, Failure> {
    let cartan = match (&global.config, &global.cartan_type) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            let config: CartanConfig = serde_json::from_str(&text).map_err(Error::from)?;
            config.build()?
        }
        (None, Some(name)) => CartanMatrix::from_name(name)?,
        (None, None) => return Err(usage("one of --config or --type is required")),
    };
    let mut budget = Budget::default();
    if let Some(n) = global.budget_elems {
        if n == 0 {
            return Err(usage("--budget-elems must be positive"));
        }
        budget.max_elements = n;
    }
    Ok(WeylGroup::with_budget(cartan, budget))
}

fn load_context(global: &GlobalArgs, group: &WeylGroup) -> Result<ParabolicContext, Failure> {
    let j = Word::parse(&global.j, group.cartan()).map_err(Failure::from)?;
    Ok(ParabolicContext::new(group, j.letters())?)
}

fn parse_element(text: &str, group: &WeylGroup) -> Result<WeylElement, Failure> {
    let word = Word::parse(text, group.cartan())?;
    Ok(group.from_word(word.letters())?)
}

fn word_json(w: &WeylElement) -> Value {
    json!(w.canonical_word().letters())
}

fn render(
    global: &GlobalArgs,
    value: &Value,
    text: impl FnOnce() -> String,
) -> Result<String, Failure> {
    match global.format {
        Format::Json => Ok(serde_json::to_string_pretty(value).map_err(Error::from)? + "\n"),
        Format::Text => Ok(text()),
        Format::Dot => Err(usage("DOT output is only available for intervals")),
    }
}

fn cmd_order(global: &GlobalArgs, v: &str, w: &str) -> Result<(String, u8), Failure> {
    let group = load_group(global)?;
    let ctx = load_context(global, &group)?;
    let (v, w) = (parse_element(v, &group)?, parse_element(w, &group)?);
    let comparable = ctx.j_leq(&v, &w)?;
    let witness = if comparable {
        Some(ctx.minimal_c(&v, &w)?)
    } else {
        None
    };
    let cartan = group.cartan();
    let value = json!({
        "J": ctx.members(),
        "v": word_json(&v),
        "w": word_json(&w),
        "length": [v.length(), w.length()],
        "j_length": [ctx.j_length(&v), ctx.j_length(&w)],
        "comparable": comparable,
        "witness": witness.as_ref().map(word_json),
    });
    let out = render(global, &value, || {
        let mut s = format!(
            "v = {:?}, w = {:?}\nlength: {} {}\nJ-length: {} {}\nv <=^J w: {}\n",
            v.canonical_word().display(cartan),
            w.canonical_word().display(cartan),
            v.length(),
            w.length(),
            ctx.j_length(&v),
            ctx.j_length(&w),
            comparable
        );
        if let Some(c) = &witness {
            s += &format!(
                "minimal witness c = {:?}\n",
                c.canonical_word().display(cartan)
            );
        }
        s
    })?;
    Ok((out, EXIT_PASS))
}

/// `Some(true)`/`Some(false)` for a decided check, `None` when it was cut
/// short by a budget.
type Outcome = Option<bool>;

fn decided(r: tnnflag::Result<bool>) -> Result<Outcome, Failure> {
    match r {
        Ok(b) => Ok(Some(b)),
        Err(Error::BudgetExceeded { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn cmd_interval(
    global: &GlobalArgs,
    x: &str,
    y: &str,
    checks: &[IntervalCheck],
) -> Result<(String, u8), Failure> {
    let group = load_group(global)?;
    let ctx = load_context(global, &group)?;
    let (x, y) = (parse_element(x, &group)?, parse_element(y, &group)?);
    if !ctx.j_leq(&x, &y)? {
        return Err(usage("x is not below y in the twisted order"));
    }
    let iv = ctx.interval(&x, &y)?;
    let poset = iv.to_poset();
    let order = if group.cartan().is_finite_type() {
        let all: Vec<usize> = (0..group.rank()).collect();
        let w0 = group.longest_element(&all).expect("finite type");
        ReflectionOrder::from_word(&group, w0.canonical_word())?
    } else {
        ReflectionOrder::root_functional(&group, &(0..group.rank()).collect::<Vec<_>>())?
    };
    let labeled = el_label_twisted_interval(&iv, &order)?;
    let mut verdicts = serde_json::Map::new();
    let mut outcomes: Vec<Outcome> = Vec::new();
    let mut sphere = Value::Null;
    let mut homology = Value::Null;
    for check in checks {
        let (name, outcome) = match check {
            IntervalCheck::Pure => ("pure", Some(poset.check_pure().pure)),
            IntervalCheck::Thin => ("thin", decided(poset.check_thin().map(|r| r.thin))?),
            IntervalCheck::El => ("el", Some(verify_el(&labeled, ChainReading::BottomUp).ok)),
            IntervalCheck::Homology => {
                let gap = ctx.j_length(&y) - ctx.j_length(&x);
                let r = if poset.len() == 1 {
                    tnnflag::poset::SimplicialComplex::new(0, vec![Vec::new()])
                } else {
                    order_complex(&poset, ComplexMode::OpenInterval)
                }
                .and_then(|c| reduced_homology(&c));
                match r {
                    Ok(h) => {
                        let d = h.sphere_dimension();
                        sphere = json!(d);
                        homology = serde_json::to_value(&h).map_err(Error::from)?;
                        // A singleton is the (-1)-sphere by convention.
                        let expected = if gap == 0 { -1 } else { gap - 2 };
                        ("homology", Some(d == Some(expected)))
                    }
                    Err(Error::BudgetExceeded { .. }) => ("homology", None),
                    Err(e) => return Err(e.into()),
                }
            }
        };
        verdicts.insert(
            name.into(),
            outcome.map_or(json!("inconclusive"), Value::Bool),
        );
        outcomes.push(outcome);
    }
    let code = if outcomes.contains(&Some(false)) {
        EXIT_FAIL
    } else if outcomes.contains(&None) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_PASS
    };
    let labels: Vec<String> = labeled.labels.iter().map(|l| l.display()).collect();
    if global.format == Format::Dot {
        return Ok((poset_to_dot(&poset, Some(&labels)), code));
    }
    let value = json!({
        "J": ctx.members(),
        "x": word_json(&x),
        "y": word_json(&y),
        "poset": PosetJson::from_labeled(&labeled),
        "checks": verdicts,
        "homology": homology,
        "sphere": sphere,
    });
    let out = render(global, &value, || {
        let mut s = format!(
            "interval with {} elements, {} covers\n",
            poset.len(),
            poset.covers().len()
        );
        for (k, v) in &verdicts {
            s += &format!("{k}: {v}\n");
        }
        s += &format!("sphere dimension: {sphere}\n");
        s
    })?;
    Ok((out, code))
}

fn cmd_verify_suite(
    global: &GlobalArgs,
    suite: SuiteArg,
    quick: bool,
) -> Result<(String, u8), Failure> {
    let kind = match suite {
        SuiteArg::Flags => SuiteKind::Flags,
        SuiteArg::Twisted => SuiteKind::Twisted,
        SuiteArg::Doubleflag => SuiteKind::Doubleflag,
        SuiteArg::All => SuiteKind::All,
    };
    let mut cfg = if quick {
        SuiteConfig::quick(global.seed)
    } else {
        SuiteConfig {
            seed: global.seed,
            ..SuiteConfig::default()
        }
    };
    if let Some(n) = global.budget_elems {
        if n == 0 {
            return Err(usage("--budget-elems must be positive"));
        }
        cfg.budget.max_elements = n;
    }
    let mut report = run_suite(kind, &cfg);
    if !global.timing {
        report = report.without_timing();
    }
    let code = match report.verdict {
        Verdict::Pass => EXIT_PASS,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    };
    let value = serde_json::to_value(&report).map_err(Error::from)?;
    let out = render(global, &value, || {
        let mut s = format!("seed {}\n", report.seed);
        for c in &report.checks {
            s += &format!(
                "{:<26} {:?} ({} cases, {} failures",
                c.name, c.verdict, c.cases, c.failures
            );
            if let Some(ms) = c.elapsed_ms {
                s += &format!(", {ms} ms");
            }
            s += ")\n";
            if let Some(d) = &c.detail {
                s += &format!("  {d}\n");
            }
        }
        s
    })?;
    Ok((out, code))
}
