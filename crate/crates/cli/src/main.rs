mod manifest;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use focn_core::generators::{self, GadgetBundle, RandomSpec, SimpleGraph};
use focn_core::learner::{self, Hypothesis, LearnerConfig, Mode, TrainingSequence, Verdict};
use focn_core::logic::{evaluate_formula, evaluate_term, Interpretation, Parser as FormulaParser, PredicateCollection};
use focn_core::oracle::{brute_force_consistent, brute_force_min_error, OracleBudget};
use focn_core::pac::{run_pac_experiment, Distribution};
use focn_core::structure::{Signature, Structure};

use manifest::RunManifest;

/// Learn sphere-type classifiers over a fixed relational structure.
///
/// All randomness comes from --seed (default 0). --jobs sets the worker
/// count (default 1); results do not depend on it.
#[derive(Parser)]
#[command(name = "focn", version)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Where to write the run manifest (learn and gen have defaults).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a hypothesis from a training file.
    Learn(LearnArgs),
    /// Classify tuples with a stored hypothesis.
    Eval {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        hypothesis: PathBuf,
        #[arg(long)]
        tuples: PathBuf,
    },
    /// Evaluate a formula or counting term under an assignment.
    Check {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        formula: String,
        /// Structure variables, e.g. c=1,p=8.
        #[arg(long, default_value = "")]
        assign: String,
        /// Number variables, e.g. kappa=2.
        #[arg(long, default_value = "")]
        nassign: String,
    },
    /// Run the PAC experiment on a finite distribution.
    Pac {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        dist: PathBuf,
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        bounded_degree: Option<usize>,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Write a generated structure with its training data and formulas.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        #[arg(long, global = true, default_value = "out")]
        out_prefix: PathBuf,
    },
    /// Compare the learners against the brute-force oracles.
    Verify {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        train: PathBuf,
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        bounded_degree: Option<usize>,
    },
    /// Size, degree and radius figures for a structure.
    Stats {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        w: usize,
        #[arg(long, default_value_t = 1)]
        ell: usize,
    },
}

#[derive(Args, Clone)]
struct Params {
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    ell: usize,
    #[arg(long)]
    r: u32,
    #[arg(long)]
    w: usize,
}

#[derive(Args)]
struct LearnArgs {
    #[arg(long)]
    structure: PathBuf,
    #[arg(long)]
    train: PathBuf,
    #[command(flatten)]
    params: Params,
    #[arg(long, value_enum, default_value_t = ModeArg::Consistent)]
    mode: ModeArg,
    #[arg(long)]
    bounded_degree: Option<usize>,
    /// Maximum degree of the structure; computed from the file if omitted.
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Consistent,
    Minerr,
}

#[derive(Subcommand)]
enum GenKind {
    /// The eight-page encyclopedia example.
    Encyclopedia,
    /// Lower-bound gadget with t blocks per side of size n.
    Thm2 {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: usize,
    },
    /// Clique gadget over a seeded G(n, p).
    Eth {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long)]
        q: usize,
    },
    /// Seeded random graph of bounded degree.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_degree: usize,
        #[arg(long)]
        edges: usize,
    },
}

enum Status {
    Ok,
    Reject,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Reject) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_structure(m: &mut RunManifest, path: &Path) -> Result<Structure> {
    let text = m.read(path)?;
    Structure::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn config(p: &Params, mode: Mode, bound: Option<usize>, degree: usize, jobs: usize) -> LearnerConfig {
    let mut cfg = LearnerConfig::new(p.k, p.ell, p.r, p.w)
        .with_mode(mode)
        .with_degree(degree)
        .with_jobs(jobs);
    if let Some(d) = bound {
        cfg = cfg.with_bound(d);
    }
    cfg
}

fn record_params(m: &mut RunManifest, p: &Params) {
    m.flag("k", p.k);
    m.flag("ell", p.ell);
    m.flag("r", p.r);
    m.flag("w", p.w);
}

fn emit(m: &mut RunManifest, text: &str) {
    print!("{text}");
    m.stdout(text);
}

fn finish(m: RunManifest, path: Option<PathBuf>) -> Result<()> {
    match path {
        Some(p) => m.save(&p),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> Result<Status> {
    let jobs = cli.jobs.max(1);
    match cli.command {
        Command::Learn(a) => learn(a, cli.seed, jobs, cli.manifest),
        Command::Eval {
            structure,
            hypothesis,
            tuples,
        } => {
            let mut m = RunManifest::new("eval", cli.seed, jobs);
            let s = load_structure(&mut m, &structure)?;
            let h = Hypothesis::parse(&m.read(&hypothesis)?, &s).context("parsing hypothesis")?;
            let text = m.read(&tuples)?;
            s.reset_access();
            let mut out = String::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let tuple = line
                    .split_whitespace()
                    .map(|n| s.lookup(n))
                    .collect::<Result<Vec<_>, _>>()
                    .with_context(|| format!("line {}", i + 1))?;
                let bit = learner::evaluate_hypothesis(&s, &h, &tuple).with_context(|| format!("line {}", i + 1))?;
                writeln!(out, "{}", u8::from(bit))?;
            }
            emit(&mut m, &out);
            m.receipt(s.access_receipt());
            finish(m, cli.manifest)?;
            Ok(Status::Ok)
        }
        Command::Check {
            structure,
            formula,
            assign,
            nassign,
        } => {
            let mut m = RunManifest::new("check", cli.seed, jobs);
            m.flag("formula", &formula);
            m.flag("assign", &assign);
            m.flag("nassign", &nassign);
            let s = load_structure(&mut m, &structure)?;
            let out = check(&s, &formula, &assign, &nassign)?;
            emit(&mut m, &out);
            finish(m, cli.manifest)?;
            Ok(Status::Ok)
        }
        Command::Pac {
            structure,
            dist,
            params,
            bounded_degree,
            eps,
            delta,
            trials,
        } => {
            let mut m = RunManifest::new("pac", cli.seed, jobs);
            record_params(&mut m, &params);
            m.flag("eps", eps);
            m.flag("delta", delta);
            m.flag("trials", trials);
            let s = load_structure(&mut m, &structure)?;
            let d = Distribution::parse(&m.read(&dist)?, &s, params.k).context("parsing distribution")?;
            let degree = s.max_degree();
            let cfg = config(&params, Mode::MinError, Some(bounded_degree.unwrap_or(degree)), degree, 1);
            if let Some(b) = bounded_degree {
                m.flag("bounded_degree", b);
            }
            let report = run_pac_experiment(&s, &d, &cfg, eps, delta, trials, cli.seed)?;
            emit(&mut m, &format!("{report}\n"));
            finish(m, cli.manifest)?;
            Ok(Status::Ok)
        }
        Command::Gen { kind, out_prefix } => gen(kind, &out_prefix, cli.seed, jobs, cli.manifest),
        Command::Verify {
            structure,
            train,
            params,
            bounded_degree,
        } => {
            let mut m = RunManifest::new("verify", cli.seed, jobs);
            record_params(&mut m, &params);
            let s = load_structure(&mut m, &structure)?;
            let t = TrainingSequence::parse(&m.read(&train)?, &s, params.k).context("parsing training file")?;
            let (out, agree) = verify(&s, &t, &params, bounded_degree, jobs)?;
            emit(&mut m, &out);
            finish(m, cli.manifest)?;
            Ok(if agree { Status::Ok } else { Status::Reject })
        }
        Command::Stats { structure, r, w, ell } => {
            let mut m = RunManifest::new("stats", cli.seed, jobs);
            let s = load_structure(&mut m, &structure)?;
            let out = stats(&s, r, w, ell)?;
            emit(&mut m, &out);
            finish(m, cli.manifest)?;
            Ok(Status::Ok)
        }
    }
}

fn learn(a: LearnArgs, seed: u64, jobs: usize, manifest: Option<PathBuf>) -> Result<Status> {
    let mut m = RunManifest::new("learn", seed, jobs);
    record_params(&mut m, &a.params);
    let mode = match a.mode {
        ModeArg::Consistent => Mode::Consistent,
        ModeArg::Minerr => Mode::MinError,
    };
    m.flag("mode", mode);
    let s = load_structure(&mut m, &a.structure)?;
    let t = TrainingSequence::parse(&m.read(&a.train)?, &s, a.params.k).context("parsing training file")?;
    let degree = a.degree.unwrap_or_else(|| s.max_degree());
    m.flag("degree", degree);
    if let Some(b) = a.bounded_degree {
        m.flag("bounded_degree", b);
    }
    let cfg = config(&a.params, mode, a.bounded_degree, degree, jobs);
    s.reset_access();
    let outcome = learner::learn(&s, &t, &cfg)?;
    m.receipt(outcome.receipt);
    let mut out = String::new();
    let status = match &outcome.verdict {
        Verdict::Reject => {
            writeln!(out, "Reject")?;
            Status::Reject
        }
        Verdict::Hypothesis(h) => {
            m.write(&a.out, &h.to_text(&s))?;
            writeln!(out, "hypothesis written to {}", a.out.display())?;
            writeln!(out, "parameters {}", h.params().iter().map(|e| s.name(*e)).collect::<Vec<_>>().join(" "))?;
            writeln!(out, "positive types {}", h.positive_types().count())?;
            writeln!(out, "training errors {} of {}", outcome.training_errors, t.len())?;
            Status::Ok
        }
    };
    writeln!(out, "candidates examined {}", outcome.candidates_examined)?;
    writeln!(
        out,
        "access queries {} (neighbors {}, tuples {})",
        outcome.receipt.total(),
        outcome.receipt.neighbor_queries,
        outcome.receipt.tuple_queries
    )?;
    emit(&mut m, &out);
    let path = manifest.unwrap_or_else(|| with_suffix(&a.out, ".manifest.json"));
    m.save(&path)?;
    Ok(status)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn pairs(text: &str) -> Result<Vec<(String, String)>> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| match p.split_once('=') {
            Some((a, b)) => Ok((a.trim().to_string(), b.trim().to_string())),
            None => bail!("expected name=value, found {p}"),
        })
        .collect()
}

fn check(s: &Structure, text: &str, assign: &str, nassign: &str) -> Result<String> {
    let preds = PredicateCollection::builtin();
    let numbers = pairs(nassign)?;
    let parser = FormulaParser::new(s.signature(), &preds).number_vars(numbers.iter().map(|(n, _)| n.as_str()));
    let mut interp = Interpretation::new(s, &preds);
    for (var, name) in pairs(assign)? {
        interp = interp.bind(&var, s.lookup(&name)?);
    }
    for (var, value) in &numbers {
        let v: i128 = value.parse().with_context(|| format!("{var} = {value} is not an integer"))?;
        interp = interp.bind_number(var, v);
    }
    match parser.parse_formula(text) {
        Ok(phi) => Ok(format!("{}\n", u8::from(evaluate_formula(&interp, &phi)?))),
        Err(formula_err) => match parser.parse_term(text) {
            Ok(term) => Ok(format!("{}\n", evaluate_term(&interp, &term)?)),
            Err(_) => Err(formula_err.into()),
        },
    }
}

fn verify(
    s: &Structure,
    t: &TrainingSequence,
    p: &Params,
    bound: Option<usize>,
    jobs: usize,
) -> Result<(String, bool)> {
    let budget = OracleBudget::default();
    let degree = s.max_degree();
    let mut out = String::new();
    let mut agree = true;
    writeln!(out, "{:<22} {:>14} {:>14} {:>6}", "check", "learner", "oracle", "agree")?;

    let cfg = config(p, Mode::Consistent, None, degree, jobs);
    let ours = learner::learn_consistent(s, t, &cfg)?;
    let theirs = brute_force_consistent(s, t, &cfg, &budget)?;
    let row = |r: bool| if r { "reject" } else { "hypothesis" };
    let same = ours.is_reject() == theirs.is_none();
    agree &= same;
    writeln!(
        out,
        "{:<22} {:>14} {:>14} {:>6}",
        "consistent",
        row(ours.is_reject()),
        row(theirs.is_none()),
        if same { "yes" } else { "NO" }
    )?;

    if !t.is_empty() {
        let cfg = config(p, Mode::MinError, None, degree, jobs);
        let ours = learner::learn_min_error(s, t, &cfg)?;
        let err = learner::training_error(s, ours.hypothesis().expect("never rejects"), t)?;
        let (_, best) = brute_force_min_error(s, t, &cfg, &budget)?;
        let same = err == best;
        agree &= same;
        writeln!(
            out,
            "{:<22} {:>14} {:>14} {:>6}",
            "minimum error",
            err.to_string(),
            best.to_string(),
            if same { "yes" } else { "NO" }
        )?;
        if let Some(d) = bound {
            let cfg = config(p, Mode::MinError, Some(d), degree, jobs);
            let ours = learner::learn_bounded(s, t, &cfg)?;
            let err = learner::training_error(s, ours.hypothesis().expect("never rejects"), t)?;
            let same = err == best;
            agree &= same;
            writeln!(
                out,
                "{:<22} {:>14} {:>14} {:>6}",
                "bounded minimum error",
                err.to_string(),
                best.to_string(),
                if same { "yes" } else { "NO" }
            )?;
        }
    }
    writeln!(out, "{}", if agree { "agreement" } else { "DISAGREEMENT" })?;
    Ok((out, agree))
}

fn stats(s: &Structure, r: u32, w: usize, ell: usize) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "n {}", s.len())?;
    writeln!(out, "max degree {}", s.max_degree())?;
    let sig: &Signature = s.signature();
    for rel in sig.name_order() {
        let sym = &sig.relations()[rel];
        writeln!(out, "relation {} arity {} tuples {}", sym.name, sym.arity, s.tuples(rel).len())?;
    }
    let cfg = LearnerConfig::new(1, ell, r, w);
    writeln!(out, "radius {} (r {r}, w {w})", cfg.radius()?)?;
    writeln!(out, "search radius {} (ell {ell})", cfg.search_radius()?)?;
    Ok(out)
}

fn gen(kind: GenKind, prefix: &Path, seed: u64, jobs: usize, manifest: Option<PathBuf>) -> Result<Status> {
    let mut m = RunManifest::new("gen", seed, jobs);
    let bundle: GadgetBundle = match kind {
        GenKind::Encyclopedia => {
            m.flag("kind", "encyclopedia");
            generators::gen_encyclopedia()?
        }
        GenKind::Thm2 { t, n } => {
            m.flag("kind", "thm2");
            m.flag("t", t);
            m.flag("n", n);
            generators::gen_thm2(t, n)?
        }
        GenKind::Eth { n, p, q } => {
            m.flag("kind", "eth");
            m.flag("n", n);
            m.flag("p", p);
            m.flag("q", q);
            if !(0.0..=1.0).contains(&p) {
                bail!("p = {p} is not a probability");
            }
            generators::gen_eth(&SimpleGraph::random(n, p, seed), q)?
        }
        GenKind::Random { n, max_degree, edges } => {
            m.flag("kind", "random");
            m.flag("n", n);
            m.flag("max_degree", max_degree);
            m.flag("edges", edges);
            GadgetBundle {
                structure: generators::gen_random(&RandomSpec::graph(n, max_degree, edges), seed)?,
                formulas: Default::default(),
                trainings: Default::default(),
                facts: Default::default(),
            }
        }
    };
    let s = &bundle.structure;
    let mut written = Vec::new();
    let path = with_suffix(prefix, ".struct");
    m.write(&path, &s.to_document())?;
    written.push(path);
    for (name, t) in &bundle.trainings {
        let path = if bundle.trainings.len() == 1 {
            with_suffix(prefix, ".train")
        } else {
            with_suffix(prefix, &format!(".{name}.train"))
        };
        m.write(&path, &t.to_text(s))?;
        written.push(path);
    }
    if !bundle.formulas.is_empty() {
        let mut text = String::new();
        for (name, f) in &bundle.formulas {
            writeln!(text, "{name}: {f}")?;
        }
        let path = with_suffix(prefix, ".formula");
        m.write(&path, &text)?;
        written.push(path);
    }
    if !bundle.facts.is_empty() {
        let mut text = String::new();
        for (name, v) in &bundle.facts {
            writeln!(text, "{name} {v}")?;
        }
        let path = with_suffix(prefix, ".facts");
        m.write(&path, &text)?;
        written.push(path);
    }
    let mut out = String::new();
    for p in &written {
        writeln!(out, "wrote {}", p.display())?;
    }
    emit(&mut m, &out);
    m.save(&manifest.unwrap_or_else(|| with_suffix(prefix, ".manifest.json")))?;
    Ok(Status::Ok)
}
