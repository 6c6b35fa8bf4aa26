use std::io::Write;
use std::process::ExitCode;

use e8p_core::painleve::{compare_with_word, iterate, Equation, EquationState, OrbitRecord};
use e8p_core::picard::{classify_translation, enumerate_short_vectors, word_matrix};
use e8p_core::scalar::{cx, from_c64, to_c64};
use e8p_core::suites::{elliptic_suite, extended_suite, landen_suite, lattice_suite, SuiteReport};
use e8p_core::weierstrass::{
    base_point_transport_residual, jacobi_to_weierstrass, make_frame, weierstrass_to_jacobi, WeierstrassSetting,
};
use e8p_core::weyl::equivalence_deviation;
use e8p_core::{Cx, DoubleDouble, EllipticContext, EllipticError, Precision, ProjectiveValue, Real, Word};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Cli, Command, Format, Function, Setting, Suite};
use crate::output::{affine, json_line, num, orbit_columns, orbit_row, sink, write_json, SCHEMA_VERSION};
use crate::params::StartSpec;
use crate::CliError;

/// Context tolerance handed to the elliptic layer.
const CONTEXT_TOL: f64 = 1e-12;
const COMPARE_TOL: f64 = 1e-8;

macro_rules! at_precision {
    ($p:expr, $f:ident ( $($a:expr),* )) => {
        match $p {
            Precision::Double => $f::<f64>($($a),*),
            Precision::Extended => $f::<DoubleDouble>($($a),*),
        }
    };
}

pub fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    if let Some(t) = cli.tol {
        if !t.is_finite() || t <= 0.0 {
            return Err(CliError::Config(format!("--tol must be positive, got {t}")));
        }
    }
    match &cli.command {
        Command::Verify { suite, samples } => verify(cli, *suite, *samples),
        Command::Roots { norm, dump } => roots(cli, *norm, *dump),
        Command::Classify { word } => classify(cli, word),
        Command::Iterate { equation, params, steps, perturb, canonical } => {
            let spec = StartSpec::load(*equation, params.as_deref(), cli.seed)?;
            at_precision!(cli.precision, iterate_cmd(cli, &spec, *steps, *perturb, *canonical))
        }
        Command::Compare { equation, params, steps, setting } => {
            let spec = StartSpec::load(*equation, params.as_deref(), cli.seed)?;
            match setting {
                Setting::Jacobi => at_precision!(cli.precision, compare_jacobi(cli, &spec, *steps)),
                Setting::Weierstrass => at_precision!(cli.precision, compare_weierstrass(cli, &spec, *steps)),
            }
        }
        Command::Eval { function, u, k } => {
            let (u, k) = (parse_complex(u, "--u")?, parse_complex(k, "--k")?);
            at_precision!(cli.precision, eval(cli, *function, u, k))
        }
    }
}

fn out(cli: &Cli) -> Result<Box<dyn Write>, CliError> {
    sink(cli.out.as_deref())
}

fn code(ok: bool, fail: u8) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(fail)
    }
}

// verify

fn run_suites<R: Real>(cli: &Cli, suite: Suite, samples: Option<usize>) -> Vec<SuiteReport> {
    let extended = matches!(cli.precision, Precision::Extended);
    let mut reports = Vec::new();
    if matches!(suite, Suite::Lattice | Suite::All) {
        reports.push(lattice_suite());
    }
    if matches!(suite, Suite::Extended | Suite::All) {
        let tol = cli.tol.unwrap_or(if extended { 1e-8 } else { 1e-6 });
        reports.push(extended_suite::<R>(samples.unwrap_or(20), cli.seed, tol));
    }
    if matches!(suite, Suite::Elliptic | Suite::All) {
        reports.push(elliptic_suite::<R>(samples.unwrap_or(100), cli.seed, cli.tol.unwrap_or(1e-10)));
    }
    if matches!(suite, Suite::Landen | Suite::All) {
        let (tol, transport) = match cli.tol {
            Some(t) => (t, t),
            None => (1e-9, 1e-8),
        };
        reports.push(landen_suite::<R>(samples.unwrap_or(100), cli.seed, tol, transport));
    }
    reports
}

fn verify(cli: &Cli, suite: Suite, samples: Option<usize>) -> Result<ExitCode, CliError> {
    if samples == Some(0) {
        return Err(CliError::Config("--samples must be at least 1".into()));
    }
    let reports = at_precision!(cli.precision, run_suites(cli, suite, samples));
    let passed = reports.iter().all(|r| r.all_passed());
    for r in &reports {
        let ok = r.checks.iter().filter(|c| c.passed).count();
        eprintln!("{}: {ok}/{} checks passed", r.suite, r.checks.len());
        for c in r.checks.iter().filter(|c| !c.passed) {
            eprintln!("  FAILED {} (max residual {:?}, tol {:?})", c.name, c.max_residual, c.tol);
        }
    }
    let mut w = out(cli)?;
    match cli.format {
        Format::Json => write_json(
            &mut *w,
            &json!({
                "schema_version": SCHEMA_VERSION,
                "command": "verify",
                "seed": cli.seed,
                "precision": cli.precision,
                "passed": passed,
                "suites": reports,
            }),
        )?,
        Format::Csv => {
            writeln!(w, "# e8p verify schema_version={SCHEMA_VERSION} seed={} precision={}", cli.seed, cli.precision)?;
            let mut c = csv::Writer::from_writer(w);
            c.write_record(["suite", "check", "passed", "samples", "max_residual", "tol", "detail"])?;
            for r in &reports {
                for k in &r.checks {
                    c.write_record([
                        r.suite.clone(),
                        k.name.clone(),
                        k.passed.to_string(),
                        k.samples.to_string(),
                        k.max_residual.map(num).unwrap_or_default(),
                        k.tol.map(num).unwrap_or_default(),
                        k.detail.clone().unwrap_or_default(),
                    ])?;
                }
            }
            c.flush()?;
        }
    }
    Ok(code(passed, 1))
}

// roots

fn roots(cli: &Cli, norm: i64, dump: bool) -> Result<ExitCode, CliError> {
    if norm < 0 || norm % 2 != 0 {
        return Err(CliError::Config(format!("--norm must be even and non-negative, got {norm}")));
    }
    let vectors: Vec<[f64; 8]> = enumerate_short_vectors(norm).map(|v| v.coordinates()).collect();
    let mut w = out(cli)?;
    match cli.format {
        Format::Json => {
            let mut v = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "roots",
                "norm": norm,
                "count": vectors.len(),
            });
            if dump {
                v["vectors"] = json!(vectors);
            }
            write_json(&mut *w, &v)?;
        }
        Format::Csv => {
            writeln!(w, "# e8p roots schema_version={SCHEMA_VERSION} norm={norm} count={}", vectors.len())?;
            let mut c = csv::Writer::from_writer(w);
            if dump {
                c.write_record((1..=8).map(|i| format!("x{i}")))?;
                for v in &vectors {
                    c.write_record(v.iter().map(|x| x.to_string()))?;
                }
            } else {
                c.write_record(["norm", "count"])?;
                c.write_record([norm.to_string(), vectors.len().to_string()])?;
            }
            c.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

// classify

fn parse_word(tokens: &[String]) -> Result<Word, CliError> {
    let text = tokens.join(" ");
    if let Some(w) = Word::named(text.trim()) {
        return Ok(w);
    }
    text.parse().map_err(|e| CliError::Config(format!("{e}")))
}

fn classify(cli: &Cli, tokens: &[String]) -> Result<ExitCode, CliError> {
    let word = parse_word(tokens)?;
    let m = word_matrix(&word);
    let mut v = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "classify",
        "word": word,
        "length": word.len(),
    });
    match classify_translation(&m) {
        Ok(c) => {
            v["is_translation"] = json!(true);
            v["alpha_pairings"] = json!(c.alpha_pairings);
            v["squared_length"] = json!(c.squared_length);
            v["alpha"] = json!(c.alpha.to_string());
            v["e8_doubled"] = json!(c.e8_doubled);
            v["class"] = json!(c.class.label());
            v["matches_kac"] = json!(c.matches_kac);
        }
        Err(e) => {
            v["is_translation"] = json!(false);
            v["reason"] = json!(e.to_string());
        }
    }
    let mut w = out(cli)?;
    match cli.format {
        Format::Json => write_json(&mut *w, &v)?,
        Format::Csv => {
            let mut c = csv::Writer::from_writer(w);
            let keys = ["word", "length", "is_translation", "squared_length", "class", "alpha"];
            c.write_record(keys)?;
            c.write_record(keys.map(|k| match &v[k] {
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                other => other.to_string(),
            }))?;
            c.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

// iterate

fn canonicalize(r: &mut OrbitRecord, ctx: &EllipticContext<f64>) {
    let reduce = |p: &mut [f64; 2]| {
        let z = ctx.reduce(cx(p[0], p[1])).0;
        *p = [z.re, z.im];
    };
    r.c.iter_mut().for_each(reduce);
    reduce(&mut r.eta);
}

fn iterate_cmd<R: Real>(
    cli: &Cli,
    spec: &StartSpec,
    steps: usize,
    perturb: Option<f64>,
    canonical: bool,
) -> Result<ExitCode, CliError> {
    let start: EquationState<R> = spec.build(CONTEXT_TOL)?;
    let equation = start.equation();
    let orbit = iterate(&start, steps, perturb);
    let mut initial = start.record(0);
    let mut records = orbit.records;
    if canonical {
        let ctx = start.surface().ctx.convert::<f64>().map_err(|e| CliError::Config(e.to_string()))?;
        canonicalize(&mut initial, &ctx);
        records.iter_mut().for_each(|r| canonicalize(r, &ctx));
    }
    let error = orbit.error.as_ref().map(|(step, e)| json!({ "step": step, "message": e.to_string() }));
    let mut w = out(cli)?;
    match cli.format {
        Format::Json => {
            json_line(
                &mut *w,
                &json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "iterate",
                    "equation": equation,
                    "seed": cli.seed,
                    "precision": cli.precision,
                    "steps": steps,
                    "perturb": perturb,
                    "canonical": canonical,
                    "perturbed_at": orbit.perturbed_at,
                    "error": error,
                    "initial": initial,
                }),
            )?;
            for r in &records {
                json_line(&mut *w, r)?;
            }
            w.flush()?;
        }
        Format::Csv => {
            writeln!(
                w,
                "# e8p iterate schema_version={SCHEMA_VERSION} equation={equation} seed={} precision={} steps={steps}",
                cli.seed, cli.precision
            )?;
            if !orbit.perturbed_at.is_empty() {
                writeln!(w, "# perturbed at steps {:?}", orbit.perturbed_at)?;
            }
            if let Some((step, e)) = &orbit.error {
                writeln!(w, "# stopped at step {step}: {e}")?;
            }
            let mut c = csv::Writer::from_writer(w);
            c.write_record(orbit_columns())?;
            for r in &records {
                c.write_record(orbit_row(r))?;
            }
            c.flush()?;
        }
    }
    if let Some((step, e)) = &orbit.error {
        eprintln!("orbit stopped at step {step}: {e}");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

// compare

#[derive(Serialize)]
struct CompareReport {
    schema_version: u32,
    command: &'static str,
    setting: &'static str,
    equation: Equation,
    seed: u64,
    precision: Precision,
    steps: usize,
    word_length: usize,
    parameter_deviation: f64,
    coordinate_deviation: f64,
    max_deviation: f64,
    tol: f64,
    passed: bool,
}

fn compare_jacobi<R: Real>(cli: &Cli, spec: &StartSpec, steps: usize) -> Result<ExitCode, CliError> {
    let start: EquationState<R> = spec.build(CONTEXT_TOL)?;
    let tol = cli.tol.unwrap_or(COMPARE_TOL);
    let cmp = match compare_with_word(&start, steps) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("comparison failed: {e}");
            return Ok(ExitCode::from(3));
        }
    };
    let max = cmp.deviation.max();
    let report = CompareReport {
        schema_version: SCHEMA_VERSION,
        command: "compare",
        setting: "jacobi",
        equation: cmp.equation,
        seed: cli.seed,
        precision: cli.precision,
        steps,
        word_length: cmp.word.len(),
        parameter_deviation: cmp.deviation.parameters,
        coordinate_deviation: cmp.deviation.coordinates,
        max_deviation: max,
        tol,
        passed: max <= tol,
    };
    let mut w = out(cli)?;
    match cli.format {
        Format::Json => write_json(&mut *w, &report)?,
        Format::Csv => {
            let mut c = csv::Writer::from_writer(w);
            c.serialize(&report)?;
            c.flush()?;
        }
    }
    eprintln!("{} vs word ({} steps): deviation {max:e}", cmp.equation, steps);
    Ok(code(report.passed, 3))
}

#[derive(Serialize)]
struct WeierstrassStep {
    step: usize,
    t: [f64; 2],
    f: Option<[f64; 2]>,
    g: Option<[f64; 2]>,
    transport_residual: f64,
    round_trip: f64,
}

fn pair<R: Real>(z: Cx<R>) -> [f64; 2] {
    let z = to_c64(z);
    [z.re, z.im]
}

fn compare_weierstrass<R: Real>(cli: &Cli, spec: &StartSpec, steps: usize) -> Result<ExitCode, CliError> {
    let start: EquationState<R> = spec.build(CONTEXT_TOL)?;
    let tol = cli.tol.unwrap_or(COMPARE_TOL);
    let mut rows = Vec::with_capacity(steps + 1);
    let mut cur = start.clone();
    let mut failure = None;
    for step in 0..=steps {
        let st = cur.surface();
        let setting = WeierstrassSetting::new(st.ctx, R::one()).map_err(|e| CliError::Config(e.to_string()))?;
        let res = base_point_transport_residual(&st, &setting).and_then(|t| {
            let w = jacobi_to_weierstrass(&st, &setting)?;
            let back = weierstrass_to_jacobi(&w, &setting)?;
            Ok((t, w, equivalence_deviation(&back, &st).max()))
        });
        match res {
            Ok((t, w, rt)) => rows.push(WeierstrassStep {
                step,
                t: pair(w.t),
                f: w.f.to_pair(),
                g: w.g.to_pair(),
                transport_residual: t,
                round_trip: rt,
            }),
            Err(e) => {
                failure = Some(format!("step {step}: {e}"));
                break;
            }
        }
        if step < steps {
            match cur.step() {
                Ok(n) => cur = n,
                Err(e) => {
                    failure = Some(format!("step {}: {e}", step + 1));
                    break;
                }
            }
        }
    }
    let max = rows.iter().map(|r| r.transport_residual.max(r.round_trip)).fold(0.0, f64::max);
    let passed = failure.is_none() && max <= tol;
    let mut w = out(cli)?;
    match cli.format {
        Format::Json => write_json(
            &mut *w,
            &json!({
                "schema_version": SCHEMA_VERSION,
                "command": "compare",
                "setting": "weierstrass",
                "equation": start.equation(),
                "seed": cli.seed,
                "precision": cli.precision,
                "steps": steps,
                "max_residual": max,
                "tol": tol,
                "passed": passed,
                "error": failure,
                "orbit": rows,
            }),
        )?,
        Format::Csv => {
            writeln!(
                w,
                "# e8p compare setting=weierstrass schema_version={SCHEMA_VERSION} equation={} seed={} precision={}",
                start.equation(),
                cli.seed,
                cli.precision
            )?;
            let mut c = csv::Writer::from_writer(w);
            c.write_record([
                "step",
                "t_re",
                "t_im",
                "f_re",
                "f_im",
                "g_re",
                "g_im",
                "transport_residual",
                "round_trip",
            ])?;
            for r in &rows {
                let mut row = vec![r.step.to_string(), num(r.t[0]), num(r.t[1])];
                row.extend(affine(r.f));
                row.extend(affine(r.g));
                row.push(num(r.transport_residual));
                row.push(num(r.round_trip));
                c.write_record(row)?;
            }
            c.flush()?;
        }
    }
    if let Some(f) = &failure {
        eprintln!("correspondence failed at {f}");
    }
    eprintln!("weierstrass correspondence over {} states: max residual {max:e}", rows.len());
    Ok(code(passed, 3))
}

// eval

fn parse_complex(s: &str, flag: &str) -> Result<[f64; 2], CliError> {
    let bad = || CliError::Config(format!("{flag}: expected `re,im` or `re`, got `{s}`"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let v: Result<Vec<f64>, _> = parts.iter().map(|p| p.parse::<f64>()).collect();
    match v.map_err(|_| bad())?.as_slice() {
        [re] => Ok([*re, 0.0]),
        [re, im] => Ok([*re, *im]),
        _ => Err(bad()),
    }
}

fn value<R: Real>(r: Result<Cx<R>, EllipticError>) -> Result<Value, CliError> {
    match r {
        Ok(z) => Ok(json!(pair(z))),
        Err(EllipticError::PoleEncountered { .. }) => Ok(json!("inf")),
        Err(e) => Err(CliError::Config(e.to_string())),
    }
}

fn projective<R: Real>(p: ProjectiveValue<R>) -> Value {
    match p.to_pair() {
        Some(z) => json!(z),
        None => json!("inf"),
    }
}

fn eval<R: Real>(cli: &Cli, function: Function, u: [f64; 2], k: [f64; 2]) -> Result<ExitCode, CliError> {
    let kz = from_c64::<R>(cx(k[0], k[1]));
    let uz = from_c64::<R>(cx(u[0], u[1]));
    let ctx = EllipticContext::<R>::new(kz, CONTEXT_TOL).map_err(|e| CliError::Config(e.to_string()))?;
    let (name, v) = match function {
        Function::Sn => ("sn", value(ctx.sn(uz))?),
        Function::Cn => ("cn", value(ctx.cn(uz))?),
        Function::Dn => ("dn", value(ctx.dn(uz))?),
        Function::Cd => ("cd", projective(ctx.cd_projective(uz))),
        Function::Theta => {
            let t = ctx.theta(uz).map_err(|e| CliError::Config(e.to_string()))?;
            ("theta", json!({ "H": pair(t.h), "Theta": pair(t.theta), "H1": pair(t.h1), "Theta1": pair(t.theta1) }))
        }
        Function::Wp => {
            let f = make_frame(kz, R::one(), CONTEXT_TOL).map_err(|e| CliError::Config(e.to_string()))?;
            ("wp", projective(f.wp_projective(uz)))
        }
        Function::K => (
            "K",
            json!({
                "K": pair(ctx.big_k),
                "Kprime": pair(ctx.big_kprime),
                "kappa": pair(ctx.kappa()),
                "kprime": pair(ctx.kprime),
                "q": pair(ctx.q),
            }),
        ),
    };
    let mut w = out(cli)?;
    match cli.format {
        Format::Json => write_json(
            &mut *w,
            &json!({
                "schema_version": SCHEMA_VERSION,
                "command": "eval",
                "fn": name,
                "u": u,
                "k": k,
                "precision": cli.precision,
                "value": v,
            }),
        )?,
        Format::Csv => {
            let mut c = csv::Writer::from_writer(w);
            c.write_record(["fn", "component", "re", "im"])?;
            let mut emit = |comp: &str, val: &Value| -> Result<(), CliError> {
                let [re, im] = match val {
                    Value::Array(a) => [a[0].to_string(), a[1].to_string()],
                    _ => ["inf".into(), "inf".into()],
                };
                c.write_record([name, comp, &re, &im])?;
                Ok(())
            };
            match &v {
                Value::Object(m) => {
                    for (key, val) in m {
                        emit(key, val)?;
                    }
                }
                other => emit(name, other)?,
            }
            c.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
