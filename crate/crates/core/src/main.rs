use clap::{Args, Parser, Subcommand};
use frobheis::action::{ActionError, Oracle};
use frobheis::diagram::{word_str, Morphism};
use frobheis::frobenius::{self, FrobeniusAlgebra};
use frobheis::io;
use frobheis::macros::Heis;
use frobheis::relations::{self, RelationInstance, Suite, SuiteOptions};
use frobheis::rewrite::{self, ClosedValue, Status};
use frobheis::sample;
use frobheis::wreath;
use frobheis::Scalar;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "frobheis", version, about = "Exact computations in Frobenius Heisenberg categories")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an algebra and check its Frobenius identities.
    Validate {
        /// Built-in name (trivial, clifford, trunc-poly-N) or TOML path.
        algebra: String,
        #[arg(long)]
        json: bool,
    },
    /// Run relation suites through the action and report verdicts as JSON.
    Check(CheckArgs),
    /// Print the matrix of a diagram at one base level.
    Eval {
        #[command(flatten)]
        ctx: Context,
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 0)]
        level: usize,
    },
    /// Rewrite a diagram with the oriented rules.
    Simplify {
        #[command(flatten)]
        ctx: Context,
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 500)]
        fuel: usize,
        /// Comma-separated rule ids; all rules when omitted.
        #[arg(long, value_delimiter = ',')]
        rules: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a closed diagram to a scalar or a polynomial in bubbles.
    EvalClosed {
        #[command(flatten)]
        ctx: Context,
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 5000)]
        fuel: usize,
    },
    /// List the rewrite rules for an algebra and level.
    Rules {
        #[command(flatten)]
        ctx: Context,
    },
    /// Random diagrams: check that simplification preserves the action.
    Fuzz {
        #[command(flatten)]
        ctx: Context,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value = "0..1", value_parser = parse_levels)]
        levels: (usize, usize),
    },
}

#[derive(Args, Clone)]
struct Context {
    #[arg(long, default_value = "trivial")]
    algebra: String,
    #[arg(long, allow_hyphen_values = true, default_value_t = -1)]
    k: i64,
    /// Cyclotomic parameters (TOML with [[factor]] tables) over the opposite algebra.
    #[arg(long)]
    cyclo: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    max_level: usize,
}

#[derive(Args)]
struct Input {
    /// Diagram JSON file.
    #[arg(long, conflicts_with = "macro_name")]
    diagram: Option<PathBuf>,
    /// Macro name instead of a file.
    #[arg(long = "macro")]
    macro_name: Option<String>,
    /// Macro parameters as JSON.
    #[arg(long, default_value = "{}")]
    params: String,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    ctx: Context,
    #[arg(long, default_value = "0..2", value_parser = parse_levels)]
    levels: (usize, usize),
    /// defining, presentation, consequences, central or all.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long, value_delimiter = ',')]
    relation: Vec<String>,
    #[arg(long, default_value_t = 4)]
    t_max: i64,
    #[arg(long, default_value_t = 3)]
    r_max: u32,
    #[arg(long, default_value_t = 500)]
    fuel: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_levels(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or("expected A..B")?;
    let a: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
    if a > b {
        return Err("empty level range".into());
    }
    Ok((a, b))
}

type Fallible<T> = Result<T, Box<dyn std::error::Error>>;

fn load_algebra(name: &str) -> Fallible<Arc<FrobeniusAlgebra>> {
    Ok(Arc::new(frobenius::load(name)?))
}

fn heis(ctx: &Context) -> Fallible<Heis> {
    Ok(Heis::new(load_algebra(&ctx.algebra)?, ctx.k))
}

fn oracle(ctx: &Context) -> Result<Oracle, Box<dyn std::error::Error>> {
    let alg = load_algebra(&ctx.algebra)?;
    Ok(match &ctx.cyclo {
        None => Oracle::new(alg, ctx.k, ctx.max_level)?,
        Some(p) => {
            let params = wreath::parse_cyclo_toml(&alg.opposite(), &std::fs::read_to_string(p)?)?;
            Oracle::with_params(alg, ctx.k, params, ctx.max_level)?
        }
    })
}

fn read_input(h: &Heis, input: &Input) -> Fallible<Morphism> {
    if let Some(name) = &input.macro_name {
        let params: serde_json::Value = serde_json::from_str(&input.params)?;
        return Ok(io::macro_morphism(h, name, &params)?);
    }
    let Some(path) = &input.diagram else {
        return Err("give --diagram FILE or --macro NAME".into());
    };
    Ok(io::parse_morphism(h, &std::fs::read_to_string(path)?)?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Fallible<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n"))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_validate(name: &str, as_json: bool) -> Fallible<bool> {
    let alg = match frobenius::load(name) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(false);
        }
    };
    let checks = frobenius::check_frobenius_identities(&alg);
    let ok = checks.iter().all(|c| c.passed);
    let duals: Vec<(String, String)> = (0..alg.dim())
        .map(|i| (alg.basis[i].symbol.clone(), alg.format_element(alg.dual(i))))
        .collect();
    if as_json {
        let v = json!({
            "algebra": alg.name,
            "dim": alg.dim(),
            "delta": alg.top_degree(),
            "theta": alg.nakayama_order(),
            "dual_basis": duals,
            "checks": checks,
            "passed": ok,
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        println!("algebra {} (dim {})", alg.name, alg.dim());
        println!("Δ = {}", alg.top_degree());
        println!("θ = {}", alg.nakayama_order());
        for (b, d) in &duals {
            println!("dual of {b}: {d}");
        }
        for c in &checks {
            let w = c.witness.as_deref().map(|w| format!(" ({w})")).unwrap_or_default();
            println!("{:<24} {}{w}", c.identity, if c.passed { "ok" } else { "FAIL" });
        }
    }
    Ok(ok)
}

#[derive(Serialize)]
struct Verdict {
    relation: &'static str,
    params: String,
    level: usize,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

fn first_nonzero(o: &Oracle, diff: &Morphism, level: usize) -> Option<String> {
    let m = o.matrix(diff, level).ok()?;
    for (j, col) in m.matrix.cols.iter().enumerate() {
        if let Some((i, c)) = col.first() {
            return Some(format!("entry ({i}, {j}) = {c}"));
        }
    }
    None
}

fn verdict_oracle(o: &Oracle, inst: &RelationInstance, level: usize) -> Verdict {
    let diff = inst.lhs.minus(&inst.rhs);
    let (verdict, witness) = match o.vanishes(&diff, level) {
        Ok(true) => ("pass", None),
        Ok(false) => ("fail", first_nonzero(o, &diff, level)),
        Err(ActionError::LevelBound(..)) => ("error", Some("level bound exceeded; raise --max-level".into())),
        Err(e) => ("error", Some(e.to_string())),
    };
    Verdict { relation: inst.id, params: inst.params.clone(), level, verdict, witness }
}

fn verdict_symbolic(h: &Heis, rules: &[rewrite::RewriteRule], inst: &RelationInstance, fuel: usize) -> Verdict {
    let s = rewrite::simplify(h, &inst.lhs.minus(&inst.rhs), rules, fuel);
    let (verdict, witness) = if s.morphism.is_zero() {
        ("pass", None)
    } else {
        ("unknown", Some(format!("{} terms remain after rewriting ({:?})", s.morphism.len(), s.status)))
    };
    Verdict { relation: inst.id, params: inst.params.clone(), level: 0, verdict, witness }
}

fn cmd_check(a: &CheckArgs) -> Fallible<bool> {
    let h = heis(&a.ctx)?;
    let opts = SuiteOptions { t_max: a.t_max, r_max: a.r_max };
    let mut ids: Vec<&'static str> = Vec::new();
    match a.suite.as_deref() {
        None | Some("all") if a.relation.is_empty() => ids.extend(relations::all_ids()),
        None | Some("all") => {}
        Some(s) => ids.extend(Suite::parse(s).ok_or_else(|| format!("unknown suite {s}"))?.ids()),
    }
    for r in &a.relation {
        let id = relations::all_ids().into_iter().find(|x| x == r).ok_or_else(|| format!("unknown relation {r}"))?;
        if !ids.contains(&id) {
            ids.push(id);
        }
    }
    let mut instances = Vec::new();
    for id in &ids {
        instances.extend(relations::instances(&h, id, &opts)?);
    }
    let levels: Vec<usize> = (a.levels.0..=a.levels.1).collect();
    let mut verdicts: Vec<Verdict> = if h.k == 0 {
        eprintln!("warning: no action exists for k = 0; relations are checked by rewriting only");
        let rules = rewrite::rule_set(&h);
        instances.par_iter().map(|inst| verdict_symbolic(&h, &rules, inst, a.fuel)).collect()
    } else {
        let o = oracle(&a.ctx)?;
        let jobs: Vec<(&RelationInstance, usize)> =
            instances.iter().flat_map(|i| levels.iter().map(move |&l| (i, l))).collect();
        jobs.par_iter().map(|(inst, l)| verdict_oracle(&o, inst, *l)).collect()
    };
    verdicts.sort_by(|x, y| (x.relation, &x.params, x.level).cmp(&(y.relation, &y.params, y.level)));
    let passed = verdicts.iter().all(|v| v.verdict == "pass");
    let n_fail = verdicts.iter().filter(|v| v.verdict != "pass").count();
    let report = json!({
        "algebra": h.alg.name,
        "k": h.k,
        "levels": levels,
        "mode": if h.k == 0 { "symbolic" } else if h.k > 0 { "omega" } else { "direct" },
        "checks": verdicts,
        "failures": n_fail,
        "passed": passed,
    });
    emit(&a.out, &serde_json::to_string_pretty(&report)?)?;
    Ok(passed)
}

fn cmd_eval(ctx: &Context, input: &Input, level: usize) -> Fallible<bool> {
    let o = oracle(ctx)?;
    let m = read_input(&o.heis, input)?;
    let r = o.matrix(&m, level)?;
    let mut rows = vec![vec![Scalar::zero(); r.domain_dim]; r.codomain_dim];
    for (j, col) in r.matrix.cols.iter().enumerate() {
        for (i, c) in col {
            rows[*i as usize][j] = c.clone();
        }
    }
    println!(
        "{} -> {} at level {level}: {}x{}",
        word_str(&m.domain),
        word_str(&m.codomain),
        r.codomain_dim,
        r.domain_dim
    );
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        println!("[{}]", cells.join(", "));
    }
    Ok(true)
}

fn cmd_simplify(ctx: &Context, input: &Input, fuel: usize, ids: &[String], out: &Option<PathBuf>) -> Fallible<bool> {
    let h = heis(ctx)?;
    let m = read_input(&h, input)?;
    let all = rewrite::rule_set(&h);
    let rules = if ids.is_empty() {
        all
    } else {
        rewrite::select_rules(&all, &ids.iter().map(String::as_str).collect::<Vec<_>>())?
    };
    let s = rewrite::simplify(&h, &m, &rules, fuel);
    let v = json!({
        "status": s.status,
        "steps": s.steps,
        "rules_fired": s.trace,
        "result": io::morphism_to_value(&h.alg, &s.morphism),
    });
    emit(out, &serde_json::to_string_pretty(&v)?)?;
    Ok(s.status == Status::Normalized)
}

fn cmd_eval_closed(ctx: &Context, input: &Input, fuel: usize) -> Fallible<bool> {
    let h = heis(ctx)?;
    let m = read_input(&h, input)?;
    let rules = rewrite::rule_set(&h);
    match rewrite::eval_closed(&h, &m, &rules, fuel)? {
        ClosedValue::Scalar(s) => println!("{s}"),
        ClosedValue::Polynomial(p) => println!("{}", p.display(&h)),
        ClosedValue::Irreducible(rest) => {
            println!("irreducible");
            println!("{}", io::morphism_to_string(&h.alg, &rest));
            return Ok(false);
        }
    }
    Ok(true)
}

fn cmd_rules(ctx: &Context) -> Fallible<bool> {
    let h = heis(ctx)?;
    for r in rewrite::rule_set(&h) {
        println!("{:<30} {:<10} {}", r.id, format!("{:?}", r.priority), r.note);
    }
    Ok(true)
}

fn cmd_fuzz(ctx: &Context, seed: u64, count: usize, levels: (usize, usize)) -> Fallible<bool> {
    println!("seed {seed}");
    let o = oracle(ctx)?;
    let h = o.heis.clone();
    let rules = rewrite::rule_set(&h);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let shape = sample::DiagramShape::default();
    let lv: Vec<usize> = (levels.0..=levels.1).collect();
    let mut bad = 0;
    for i in 0..count {
        let dom = sample::random_word(2, &mut rng);
        let d = sample::random_diagram(&h.alg, &dom, &shape, &mut rng);
        let m = Morphism::from_diagram(d);
        let s = rewrite::simplify(&h, &m, &rules, 200);
        match o.check_equal(&m, &s.morphism, &lv) {
            Ok(None) | Err(ActionError::LevelBound(..)) => {}
            Ok(Some(l)) => {
                bad += 1;
                println!("diagram {i}: simplification changes the action at level {l}");
                println!("{}", io::morphism_to_string(&h.alg, &m));
            }
            Err(e) => return Err(e.into()),
        }
    }
    println!("{count} diagrams, {bad} failures");
    Ok(bad == 0)
}

fn run(cli: Cli) -> Fallible<bool> {
    match cli.cmd {
        Cmd::Validate { algebra, json } => cmd_validate(&algebra, json),
        Cmd::Check(a) => cmd_check(&a),
        Cmd::Eval { ctx, input, level } => cmd_eval(&ctx, &input, level),
        Cmd::Simplify { ctx, input, fuel, rules, out } => cmd_simplify(&ctx, &input, fuel, &rules, &out),
        Cmd::EvalClosed { ctx, input, fuel } => cmd_eval_closed(&ctx, &input, fuel),
        Cmd::Rules { ctx } => cmd_rules(&ctx),
        Cmd::Fuzz { ctx, seed, count, levels } => cmd_fuzz(&ctx, seed, count, levels),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
