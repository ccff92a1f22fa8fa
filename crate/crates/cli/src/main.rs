//! Command-line front end: law suites, representations, quotients,
//! term evaluation, generated predicate algebras, loop unrolling, and the
//! built-in example systems.
//!
//! Exit codes: 0 all checks pass; 1 a law or verification check failed
//! (reports carry witnesses); 2 input or capability error.

use std::collections::BTreeMap;
use std::io::Read;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context as _};
use clap::{Args, Parser, Subcommand, ValueEnum};

use nonhalt_core::algebra::{
    check_congruence, from_model, quotient, ClosureOps, FiniteAlgebra, Partition, TableModel,
};
use nonhalt_core::calg;
use nonhalt_core::context::{full_model_context, ConcreteModel, ModelFile, OpKind};
use nonhalt_core::filters;
use nonhalt_core::laws::{self, AnyContext, CheckMode, CheckReport};
use nonhalt_core::pfun::{PartialMap, TestSet};
use nonhalt_core::terms::{self, VarSort};
use nonhalt_core::EvalContext;

#[derive(Parser)]
#[command(
    name = "nonhalt",
    about = "Workbench for algebras of possibly non-halting programs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run law suites against a model or algebra.
    Check(CheckArgs),
    /// Build a functional representation, verify it, and export it.
    Represent(RepresentArgs),
    /// Check a partition for congruence, form the quotient, re-run a suite.
    Quotient(QuotientArgs),
    /// Emit the full model on n points.
    Model(ModelArgs),
    /// Parse and evaluate a term under explicit bindings.
    Eval(EvalArgs),
    /// Generate the algebra of non-halting predicates and check its
    /// three-valued semantics.
    Cstar(CstarArgs),
    /// Unroll a while-loop into nested if-then-else and compare.
    WhileUnroll(WhileUnrollArgs),
    /// Emit a built-in example system.
    PaperExample(PaperExampleArgs),
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Abstract algebra file (tables).
    #[arg(long)]
    algebra: Option<String>,
    /// Concrete model file (maps and tests).
    #[arg(long)]
    model: Option<String>,
}

#[derive(Args, Clone)]
struct ModeArgs {
    /// Enumerate every sort-correct assignment.
    #[arg(long)]
    exhaustive: bool,
    /// Draw this many seeded samples instead.
    #[arg(long)]
    samples: Option<u64>,
    /// Seed for sampled runs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; the report is identical for any count.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

impl ModeArgs {
    fn mode(&self) -> anyhow::Result<CheckMode> {
        if self.exhaustive && self.samples.is_some() {
            bail!("--exhaustive and --samples are mutually exclusive");
        }
        Ok(if self.exhaustive {
            CheckMode::Exhaustive
        } else if let Some(count) = self.samples {
            CheckMode::Sampled { count, seed: self.seed }
        } else {
            CheckMode::Auto { count: laws::DEFAULT_SAMPLES, seed: self.seed }
        })
    }
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<String>,
    /// Emit structured JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Suite name; repeatable. Without it, every suite the input supports.
    #[arg(long)]
    suite: Vec<String>,
    #[command(flatten)]
    mode: ModeArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RepresentArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Operations to close a model under before tabulating
    /// (comma-separated of: domain,star,neq,eite,wc,while).
    #[arg(long, default_value = "domain")]
    ops: String,
    /// Closure bound on new elements for model input.
    #[arg(long, default_value_t = 512)]
    bound: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct QuotientArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Partition file, or `builtin` for the fixture partitions.
    #[arg(long)]
    partition: String,
    /// Suite to re-run on the quotient.
    #[arg(long)]
    suite: Option<String>,
    /// Operations to close a model under before tabulating.
    #[arg(long)]
    ops: Option<String>,
    /// Closure bound on new elements for model input.
    #[arg(long, default_value_t = 512)]
    bound: usize,
    #[command(flatten)]
    mode: ModeArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ModelArgs {
    /// Emit the full model on this many points.
    #[arg(long)]
    full: usize,
    /// Output flavour.
    #[arg(long, value_enum, default_value_t = Emit::Algebra)]
    what: Emit,
    /// Tables to include for the algebra flavour; defaults shrink with
    /// size (the weak-comparison table on 3 points already has 16.7M
    /// entries).
    #[arg(long)]
    ops: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Model,
    Algebra,
    Partition,
}

#[derive(Args)]
struct EvalArgs {
    /// The term, e.g. "D(s);t" or "ite(s,a,t,u)".
    #[arg(long)]
    term: String,
    #[command(flatten)]
    input: InputArgs,
    /// Bindings var=element, by name (models) or index; repeatable.
    #[arg(long = "bind")]
    bind: Vec<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CstarArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Cap on the number of generated predicates.
    #[arg(long, default_value_t = 4096)]
    bound: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct WhileUnrollArgs {
    #[command(flatten)]
    input: InputArgs,
    /// The tested element t of ((t,a):s).
    #[arg(short = 't', long)]
    test_map: String,
    /// The guard test a.
    #[arg(short = 'a', long)]
    guard: String,
    /// The body s.
    #[arg(short = 's', long)]
    body: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PaperExampleArgs {
    /// Which fixture: the eight-point twisted-agreeable system (quasiv)
    /// or the ten-point disagreeable one.
    #[arg(value_parser = ["quasiv", "disagreeable"])]
    which: String,
    #[arg(long, value_enum, default_value_t = Emit::Model)]
    what: Emit,
    #[command(flatten)]
    output: OutputArgs,
}

fn read_input(path_or_stdin: Option<&str>) -> anyhow::Result<String> {
    match path_or_stdin {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {path}")),
        None => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf).context("reading stdin")?;
            Ok(buf)
        }
    }
}

fn load_context(input: &InputArgs) -> anyhow::Result<AnyContext> {
    if input.algebra.is_some() && input.model.is_some() {
        bail!("--algebra and --model are mutually exclusive");
    }
    if let Some(path) = &input.algebra {
        let text = read_input(Some(path))?;
        let file = serde_json::from_str(&text).context("parsing algebra file")?;
        return Ok(AnyContext::Algebra(Box::new(FiniteAlgebra::from_file(&file)?)));
    }
    if let Some(path) = &input.model {
        let text = read_input(Some(path))?;
        let file: ModelFile = serde_json::from_str(&text).context("parsing model file")?;
        return Ok(AnyContext::Model(Box::new(ConcreteModel::from_file(&file)?)));
    }
    // stdin: detect the format by its top-level keys
    let text = read_input(None)?;
    let value: serde_json::Value = serde_json::from_str(&text).context("parsing stdin")?;
    if value.get("points").is_some() {
        let file: ModelFile = serde_json::from_value(value).context("parsing model from stdin")?;
        Ok(AnyContext::Model(Box::new(ConcreteModel::from_file(&file)?)))
    } else if value.get("size").is_some() {
        let file = serde_json::from_value(value).context("parsing algebra from stdin")?;
        Ok(AnyContext::Algebra(Box::new(FiniteAlgebra::from_file(&file)?)))
    } else {
        bail!("stdin is neither a model (needs `points`) nor an algebra (needs `size`)")
    }
}

fn parse_ops(text: &str) -> anyhow::Result<ClosureOps> {
    let mut ops = ClosureOps::default();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item {
            "domain" => ops.domain = true,
            "star" => ops.star = true,
            "neq" => ops.neq = true,
            "eite" => ops.eite = true,
            "wc" => ops.wc = true,
            "while" => ops.whl = true,
            other => bail!("unknown operation `{other}` (expected domain,star,neq,eite,wc,while)"),
        }
    }
    Ok(ops)
}

fn write_output(output: &OutputArgs, text: &str) -> anyhow::Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {path}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// 0 = pass, 1 = check failure, 2 = input/capability error.
enum Outcome {
    Pass,
    CheckFailed,
}

fn suites_for(ctx: &AnyContext, requested: &[String]) -> anyhow::Result<Vec<laws::Suite>> {
    let all = laws::suites();
    if requested.is_empty() {
        // keep every suite whose operations the context supplies
        Ok(all
            .into_iter()
            .filter(|s| {
                s.laws.iter().all(|l| {
                    l.required_ops().iter().all(|&op| ctx.supports(op))
                        && (!l.has_domelem_vars()
                            || [OpKind::Domain, OpKind::Star, OpKind::Wc]
                                .iter()
                                .any(|&op| ctx.supports(op)))
                })
            })
            .collect())
    } else {
        requested
            .iter()
            .map(|name| {
                laws::suite(name).ok_or_else(|| {
                    anyhow!(
                        "unknown suite `{name}` (expected one of: {})",
                        laws::suites()
                            .iter()
                            .map(|s| s.name.clone())
                            .collect::<Vec<_>>()
                            .join(", ")
                    )
                })
            })
            .collect()
    }
}

fn cmd_check(args: &CheckArgs) -> anyhow::Result<Outcome> {
    let ctx = load_context(&args.input)?;
    let mode = args.mode.mode()?;
    let selected = suites_for(&ctx, &args.suite)?;
    let mut reports: Vec<CheckReport> = Vec::new();
    for suite in &selected {
        reports.push(ctx.check_suite(suite, mode, args.mode.workers)?);
    }
    let all_pass = reports.iter().all(CheckReport::passed);
    let text = if args.output.json {
        serde_json::to_string_pretty(&reports)? + "\n"
    } else {
        let mut out = String::new();
        for r in &reports {
            out.push_str(&format!("== suite {}\n{}", r.suite, r.render_text()));
        }
        out.push_str(if all_pass { "all suites passed\n" } else { "FAILURES above\n" });
        out
    };
    write_output(&args.output, &text)?;
    Ok(if all_pass { Outcome::Pass } else { Outcome::CheckFailed })
}

fn table_model_of(
    ctx: AnyContext,
    ops: ClosureOps,
    bound: usize,
) -> anyhow::Result<(FiniteAlgebra, Option<TableModel>)> {
    match ctx {
        AnyContext::Algebra(a) => Ok((*a, None)),
        AnyContext::Model(m) => {
            let tm = from_model(&m, ops, bound)?;
            Ok((tm.algebra.clone(), Some(tm)))
        }
    }
}

fn cmd_represent(args: &RepresentArgs) -> anyhow::Result<Outcome> {
    let ctx = load_context(&args.input)?;
    let ops = parse_ops(&args.ops)?;
    let (alg, _) = table_model_of(ctx, ops, args.bound)?;
    let rep = filters::build_representation(&alg)?;
    let report = filters::verify_representation(&alg, &rep);
    let export = filters::export_representation(&rep);
    let text = if args.output.json {
        serde_json::to_string_pretty(&serde_json::json!({
            "representation": export,
            "failures": report.failures,
        }))? + "\n"
    } else {
        let mut out = format!(
            "representation over {} states from {} components\n",
            rep.state_count,
            rep.components.len()
        );
        for c in &rep.components {
            out.push_str(&format!(
                "  component: filter generator {}, separating pair ({}, {}), {} states\n",
                c.generator,
                c.pair.0,
                c.pair.1,
                c.classes.len()
            ));
        }
        if report.passed() {
            out.push_str("verification: all checks passed\n");
        } else {
            for f in &report.failures {
                out.push_str(&format!(
                    "verification FAILURE: {} at {:?}: {}\n",
                    f.check, f.location, f.detail
                ));
            }
        }
        out
    };
    write_output(&args.output, &text)?;
    Ok(if report.passed() { Outcome::Pass } else { Outcome::CheckFailed })
}

/// Recognizes which fixture a model is, extensionally.
fn builtin_partition(tm: &TableModel) -> anyhow::Result<Partition> {
    let quasiv = nonhalt_core::fixtures::quasiv_model();
    let ten = nonhalt_core::fixtures::ten_point_model();
    let matches = |model: &ConcreteModel| {
        model.maps().iter().all(|m| tm.index_of(m).is_some())
            && model.points() == tm.elements.first().map_or(0, PartialMap::points)
    };
    if matches(&quasiv) {
        Ok(nonhalt_core::fixtures::quasiv_partition(tm))
    } else if matches(&ten) {
        Ok(nonhalt_core::fixtures::ten_point_partition(tm))
    } else {
        bail!("`--partition builtin` only applies to the built-in example systems")
    }
}

fn cmd_quotient(args: &QuotientArgs) -> anyhow::Result<Outcome> {
    let ctx = load_context(&args.input)?;
    let ops = parse_ops(args.ops.as_deref().unwrap_or("domain,star,neq"))?;
    let (alg, tm) = table_model_of(ctx, ops, args.bound)?;
    let partition = if args.partition == "builtin" {
        let tm = tm.as_ref().ok_or_else(|| anyhow!("`--partition builtin` needs a model input"))?;
        builtin_partition(tm)?
    } else {
        let text = read_input(Some(&args.partition))?;
        serde_json::from_str(&text).context("parsing partition file")?
    };
    let congruence = check_congruence(&alg, &partition)?;
    let mut out = String::new();
    if let Some(tm) = &tm {
        let generated = tm.names.iter().filter(|n| n.starts_with('x')).count();
        if generated > 0 {
            out.push_str(&format!(
                "note: closure added {generated} elements beyond the listed generators\n"
            ));
        }
    }
    if !congruence.is_congruence() {
        let v = congruence.violation.as_ref().unwrap();
        let text = if args.output.json {
            serde_json::to_string_pretty(&congruence)? + "\n"
        } else {
            format!(
                "{out}partition is NOT a congruence: `{}` is unstable at {:?} vs {:?} ({} vs {})\n",
                v.op, v.args_lhs, v.args_rhs, v.result_lhs, v.result_rhs
            )
        };
        write_output(&args.output, &text)?;
        return Ok(Outcome::CheckFailed);
    }
    out.push_str("partition is a congruence");
    out.push_str(if congruence.mixed_blocks.is_empty() {
        "; no block mixes tests with non-tests\n"
    } else {
        "; WARNING: mixed test/non-test blocks\n"
    });
    let (q, _block) = quotient(&alg, &partition)?;
    out.push_str(&format!("quotient has {} elements, {} tests\n", q.size(), q.tests().len()));

    let mut failed = false;
    let mut json_reports = Vec::new();
    if let Some(suite_name) = &args.suite {
        let suite =
            laws::suite(suite_name).ok_or_else(|| anyhow!("unknown suite `{suite_name}`"))?;
        let report = laws::check_suite(&q, &suite, args.mode.mode()?, args.mode.workers)?;
        failed = !report.passed();
        out.push_str(&format!(
            "== suite {} on the quotient\n{}",
            report.suite,
            report.render_text()
        ));
        json_reports.push(report);
    }
    let text = if args.output.json {
        serde_json::to_string_pretty(&serde_json::json!({
            "congruence": congruence,
            "quotient": q.to_file(),
            "reports": json_reports,
        }))? + "\n"
    } else {
        out
    };
    write_output(&args.output, &text)?;
    Ok(if failed { Outcome::CheckFailed } else { Outcome::Pass })
}

fn cmd_model(args: &ModelArgs) -> anyhow::Result<Outcome> {
    let n = args.full;
    let model = full_model_context(n)?;
    let text = match args.what {
        Emit::Model => serde_json::to_string_pretty(&model.to_file())? + "\n",
        Emit::Algebra => {
            let ops = match &args.ops {
                Some(text) => parse_ops(text)?,
                None if n <= 2 => ClosureOps::all(),
                None if n == 3 => ClosureOps { wc: false, ..ClosureOps::all() },
                None => ClosureOps::disagreeable(),
            };
            let tm = from_model(&model, ops, 0)
                .map_err(|e| anyhow!("full model should be closed: {e}"))?;
            serde_json::to_string_pretty(&tm.algebra.to_file())? + "\n"
        }
        Emit::Partition => bail!("`model` cannot emit a partition"),
    };
    write_output(&args.output, &text)?;
    Ok(Outcome::Pass)
}

fn resolve_binding(ctx: &AnyContext, what: &str) -> anyhow::Result<usize> {
    match ctx {
        AnyContext::Model(m) => {
            if let Some(i) = m.lookup_name(what) {
                return Ok(i);
            }
            let idx: usize = what
                .parse()
                .map_err(|_| anyhow!("`{what}` is neither an element name nor an index"))?;
            if idx >= m.element_count() {
                bail!("index {idx} is out of range (model has {} elements)", m.element_count());
            }
            Ok(idx)
        }
        AnyContext::Algebra(a) => {
            let idx: usize =
                what.parse().map_err(|_| anyhow!("algebra bindings are element indices"))?;
            if idx >= a.size() {
                bail!("index {idx} is out of range (algebra has {} elements)", a.size());
            }
            Ok(idx)
        }
    }
}

fn infer_sort(ctx: &AnyContext, idx: usize) -> VarSort {
    match ctx {
        AnyContext::Model(m) => {
            if m.test_elements().contains(&idx) {
                VarSort::Test
            } else if m.maps()[idx].is_identity_restriction() {
                VarSort::DomElem
            } else {
                VarSort::Elem
            }
        }
        AnyContext::Algebra(a) => {
            if a.is_test(idx) {
                VarSort::Test
            } else if a.d(idx) == Some(idx) {
                VarSort::DomElem
            } else {
                VarSort::Elem
            }
        }
    }
}

fn describe_element(ctx: &AnyContext, idx: usize) -> String {
    match ctx {
        AnyContext::Model(m) => format!("{} = {:?}", m.name_of(idx), m.maps()[idx]),
        AnyContext::Algebra(_) => format!("element {idx}"),
    }
}

fn cmd_eval(args: &EvalArgs) -> anyhow::Result<Outcome> {
    let ctx = load_context(&args.input)?;
    let term = terms::parse(&args.term).map_err(|e| anyhow!("{e}"))?;
    let mut bindings: BTreeMap<String, usize> = BTreeMap::new();
    for b in &args.bind {
        let (var, target) =
            b.split_once('=').ok_or_else(|| anyhow!("binding `{b}` must look like var=element"))?;
        bindings.insert(var.to_string(), resolve_binding(&ctx, target)?);
    }
    let sorts: BTreeMap<String, VarSort> =
        bindings.iter().map(|(v, &i)| (v.clone(), infer_sort(&ctx, i))).collect();
    term.sort_check(&sorts).map_err(|e| anyhow!("{e}"))?;
    let described = match &ctx {
        AnyContext::Model(m) => {
            let asg: BTreeMap<String, PartialMap> =
                bindings.iter().map(|(v, &i)| (v.clone(), m.element(i))).collect();
            let value = term.eval(m.as_ref(), &asg).map_err(|e| anyhow!("{e}"))?;
            match m.lookup_map(&value) {
                Some(i) => format!("{} -> {}\n", term, describe_element(&ctx, i)),
                None => format!("{} -> {:?} (outside the model's element list)\n", term, value),
            }
        }
        AnyContext::Algebra(a) => {
            let asg: BTreeMap<String, usize> =
                bindings.iter().map(|(v, &i)| (v.clone(), i)).collect();
            let value = term.eval(a.as_ref(), &asg).map_err(|e| anyhow!("{e}"))?;
            format!("{term} -> element {value}\n")
        }
    };
    let text = if args.output.json {
        serde_json::to_string_pretty(&serde_json::json!({
            "term": term.to_string(),
            "result": described.trim_end(),
        }))? + "\n"
    } else {
        described
    };
    write_output(&args.output, &text)?;
    Ok(Outcome::Pass)
}

fn cmd_cstar(args: &CstarArgs) -> anyhow::Result<Outcome> {
    let ctx = load_context(&args.input)?;
    match ctx {
        AnyContext::Model(m) => {
            let preds = calg::generate_bstar(m.as_ref(), args.bound)?;
            let report = calg::three_valued_check(&m, &preds)?;
            let entries = calg::export_bstar(&m, &preds)?;
            let text = if args.output.json {
                serde_json::to_string_pretty(&serde_json::json!({
                    "predicates": entries,
                    "check": report,
                }))? + "\n"
            } else {
                let mut out = format!(
                    "{} generated predicates; {} connective pairs checked\n",
                    report.predicates, report.pairs_checked
                );
                for e in &entries {
                    out.push_str(&format!("  {}  {}\n", e.trace, e.expression));
                }
                out.push_str(if report.passed() {
                    "three-valued semantics: all traces match\n"
                } else {
                    "three-valued semantics: MISMATCHES found\n"
                });
                out
            };
            write_output(&args.output, &text)?;
            Ok(if report.passed() { Outcome::Pass } else { Outcome::CheckFailed })
        }
        AnyContext::Algebra(a) => {
            let preds = calg::generate_bstar(a.as_ref(), args.bound)?;
            let text = format!(
                "{} generated predicates (abstract context: no per-state traces)\n",
                preds.len()
            );
            write_output(&args.output, &text)?;
            Ok(Outcome::Pass)
        }
    }
}

fn cmd_while_unroll(args: &WhileUnrollArgs) -> anyhow::Result<Outcome> {
    let ctx = load_context(&args.input)?;
    let t = resolve_binding(&ctx, &args.test_map)?;
    let a = resolve_binding(&ctx, &args.guard)?;
    let s = resolve_binding(&ctx, &args.body)?;
    match &ctx {
        AnyContext::Model(m) => {
            let (tv, av, sv) = (m.element(t), m.element(a), m.element(s));
            let guard = TestSet::from_map(&av)
                .ok_or_else(|| anyhow!("guard must be a restriction of the identity"))?;
            let un = filters::while_unroll(m.as_ref(), &tv, &av, &sv)?;
            let direct = nonhalt_core::pfun::ext_while(&tv, &guard, &sv);
            let agree = un.result == direct;
            let mut out = format!("stabilization bound n = {}\n", un.bound);
            for (k, v) in un.steps.iter().enumerate() {
                out.push_str(&format!("  v_{k} = {v:?}\n"));
            }
            out.push_str(&format!("direct loop = {direct:?}\n"));
            out.push_str(if agree { "v_n equals the loop\n" } else { "MISMATCH\n" });
            if !un.powers_below_result {
                out.push_str("WARNING: some power is not below the result\n");
            }
            write_output(&args.output, &out)?;
            Ok(if agree && un.powers_below_result { Outcome::Pass } else { Outcome::CheckFailed })
        }
        AnyContext::Algebra(alg) => {
            let un = filters::while_unroll(alg.as_ref(), &t, &a, &s)?;
            let mut out = format!("stabilization bound n = {}\n", un.bound);
            for (k, v) in un.steps.iter().enumerate() {
                out.push_str(&format!("  v_{k} = element {v}\n"));
            }
            let verdict = match alg.whl_of(t, a, s) {
                Some(w) => {
                    out.push_str(&format!("while table entry = element {w}\n"));
                    let agree = w == un.result;
                    out.push_str(if agree { "v_n equals the table entry\n" } else { "MISMATCH\n" });
                    agree
                }
                None => {
                    out.push_str("algebra has no while table; emitted the unrolling only\n");
                    true
                }
            };
            write_output(&args.output, &out)?;
            Ok(if verdict && un.powers_below_result { Outcome::Pass } else { Outcome::CheckFailed })
        }
    }
}

fn cmd_paper_example(args: &PaperExampleArgs) -> anyhow::Result<Outcome> {
    let quasiv = args.which == "quasiv";
    let text = match args.what {
        Emit::Model => {
            let file = if quasiv {
                nonhalt_core::fixtures::quasiv_model_file()
            } else {
                nonhalt_core::fixtures::ten_point_model_file()
            };
            serde_json::to_string_pretty(&file)? + "\n"
        }
        Emit::Algebra => {
            let tm = if quasiv {
                nonhalt_core::fixtures::quasiv_table_model()
            } else {
                nonhalt_core::fixtures::ten_point_table_model()
            };
            serde_json::to_string_pretty(&tm.algebra.to_file())? + "\n"
        }
        Emit::Partition => {
            let p = if quasiv {
                nonhalt_core::fixtures::quasiv_partition(
                    &nonhalt_core::fixtures::quasiv_table_model(),
                )
            } else {
                nonhalt_core::fixtures::ten_point_partition(
                    &nonhalt_core::fixtures::ten_point_table_model(),
                )
            };
            serde_json::to_string_pretty(&p)? + "\n"
        }
    };
    write_output(&args.output, &text)?;
    Ok(Outcome::Pass)
}

fn run() -> anyhow::Result<Outcome> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Check(args) => cmd_check(args),
        Command::Represent(args) => cmd_represent(args),
        Command::Quotient(args) => cmd_quotient(args),
        Command::Model(args) => cmd_model(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Cstar(args) => cmd_cstar(args),
        Command::WhileUnroll(args) => cmd_while_unroll(args),
        Command::PaperExample(args) => cmd_paper_example(args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
