//! `cremona`: command-line front end for exact plane Cremona group
//! computations.
//!
//! Subcommands classify degree growth, run monomial conjugacy algorithms,
//! reduce generator systems modulo a well-chosen prime, and trace boundary
//! rays on blown-up fans. Every certificate is re-verified in-process before
//! it is printed, and a fixed `--seed` makes the output byte-identical
//! across runs.
//!
//! Exit codes: 0 success, 2 parse/validation error, 3 budget exhausted,
//! 4 internal verification failure (a bug trap, never expected).

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use cremona_core::cremona::{normalize, CremonaMap};
use cremona_core::dynamics::{
    classify_growth, degree_sequence_map, degree_sequence_monomial, dynamical_degree_monomial,
    DynamicsError, GrowthClass,
};
use cremona_core::exact::{parse_map, Rat};
use cremona_core::modp::{
    choose_prime, collect_bad_set, finite_image_experiment, reduce_system, GeneratorSystem,
    ModpError, PrimeStrategy,
};
use cremona_core::monomial::{
    conjugate_to_nonnegative, is_loxodromic, semidirect_compose, solve_commuting_torus,
    trace_conjugacy_classes, IntMatrix2, MonomialElement, TorusElement,
};
use cremona_core::toric::{
    blow_up, boundary_orbit, e_of_monomial, ray_image, Ray, RayImage, ToricSurfaceModel,
};

#[derive(Parser)]
#[command(
    name = "cremona",
    version,
    about = "Exact computations in the plane Cremona group",
    propagate_version = true
)]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Run-wide knobs. A fixed seed makes every report byte-identical.
#[derive(Args, Clone)]
struct RunConfig {
    /// Seed for all randomized choices (blow-up placement, random prime).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest iterate degree computed before giving up.
    #[arg(long, global = true, default_value_t = 10_000)]
    budget_degree: u32,
    /// Largest word length enumerated before giving up.
    #[arg(long, global = true, default_value_t = 16)]
    budget_words: usize,
    /// Output format; csv is only available for degree sequences.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Decimal places for numeric output.
    #[arg(long, global = true, default_value_t = 6)]
    precision: usize,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the degree growth of a map `[f0 : f1 : f2]` or a monomial
    /// matrix `[[a,b],[c,d]]`.
    Classify {
        /// Map text or integer matrix.
        input: String,
        /// Number of iterates to compute.
        #[arg(short = 'n', long, default_value_t = 20)]
        iterates: usize,
    },
    /// Conjugacy algorithms in the monomial group.
    #[command(subcommand)]
    MonomialConj(ConjCommand),
    /// Reduce a generator system modulo a well-chosen prime.
    ///
    /// File grammar: one generator per line, `<index> <inverse-index>
    /// <map>`, e.g. `0 1 [2*x : 3*y : z]`; `#` starts a comment; indices
    /// must run 0, 1, 2, … in order and the pairing must be an involution.
    Modp {
        /// Generator file (UTF-8 text).
        file: PathBuf,
        /// Override the prime instead of choosing one away from the bad set.
        #[arg(long)]
        prime: Option<u64>,
        /// Choose the prime at random (seeded) instead of smallest-first.
        #[arg(long, default_value_t = false)]
        random_prime: bool,
        /// Run the finite-image experiment with this degree bound.
        #[arg(long, value_name = "K")]
        experiment: Option<u32>,
    },
    /// Trace boundary-ray orbits of a monomial map on a blown-up fan.
    FanTrace {
        /// Integer matrix `[[a,b],[c,d]]`.
        matrix: String,
        /// Number of random blow-ups applied to the standard fan.
        #[arg(long, default_value_t = 0)]
        blowups: usize,
        /// Orbit steps per starting ray (requires a loxodromic matrix if
        /// positive).
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
}

#[derive(Subcommand)]
enum ConjCommand {
    /// Conjugate a loxodromic SL2(Z) matrix to a non-negative one:
    /// B = P^-1 (±A) P.
    Nonneg { matrix: String },
    /// One representative per trace-t class of loxodromic conjugacy.
    Classes { trace: i64 },
    /// Solve d'^-1 (A, d) d' = (A, 1) for a torus element d'.
    TorusSolve {
        /// Integer matrix `[[a,b],[c,d]]`.
        matrix: String,
        /// Torus element as two nonzero rationals, e.g. `2,3` or `(2x,3y)`.
        torus: String,
    },
}

/// CLI-level failures with their exit codes.
enum CliError {
    /// Unparseable or invalid input (exit 2).
    Parse(String),
    /// A budget ran out; the message carries the partial data (exit 3).
    Budget(String),
    /// An in-process re-verification failed: a bug, never user error (exit 4).
    Verify(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Verify(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Budget(m) | CliError::Verify(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let cfg = &cli.config;
    if cfg.format == Format::Csv && !matches!(cli.command, Command::Classify { .. }) {
        return Err(CliError::Parse(
            "csv output is only available for degree sequences (classify)".to_string(),
        ));
    }
    match &cli.command {
        Command::Classify { input, iterates } => cmd_classify(cfg, input, *iterates),
        Command::MonomialConj(sub) => cmd_monomial_conj(cfg, sub),
        Command::Modp {
            file,
            prime,
            random_prime,
            experiment,
        } => cmd_modp(cfg, file, *prime, *random_prime, *experiment),
        Command::FanTrace {
            matrix,
            blowups,
            steps,
        } => cmd_fan_trace(cfg, matrix, *blowups, *steps),
    }
}

// ---------------------------------------------------------------------------
// Input parsing
// ---------------------------------------------------------------------------

/// Parses `[[a,b],[c,d]]` with optional whitespace into an integer matrix.
fn parse_matrix(s: &str) -> Result<IntMatrix2, CliError> {
    let err = || CliError::Parse(format!("expected a matrix like [[2,1],[1,1]], got `{s}`"));
    let v: Value = serde_json::from_str(s.trim()).map_err(|_| err())?;
    let rows = v.as_array().filter(|r| r.len() == 2).ok_or_else(err)?;
    let mut e = [[0i64; 2]; 2];
    for (i, row) in rows.iter().enumerate() {
        let cols = row.as_array().filter(|c| c.len() == 2).ok_or_else(err)?;
        for (j, c) in cols.iter().enumerate() {
            e[i][j] = c.as_i64().ok_or_else(err)?;
        }
    }
    Ok(IntMatrix2::new(e[0][0], e[0][1], e[1][0], e[1][1]))
}

/// Parses a map `[f0 : f1 : f2]` and normalizes it.
fn parse_map_text(s: &str) -> Result<CremonaMap<Rat>, CliError> {
    let [f0, f1, f2] =
        parse_map(s).map_err(|e| CliError::Parse(format!("cannot parse map `{s}`: {e}")))?;
    normalize(f0, f1, f2).map_err(|e| CliError::Parse(format!("cannot normalize `{s}`: {e}")))
}

/// Parses a torus element from `2,3` or `(2x,3y)`.
fn parse_torus(s: &str) -> Result<TorusElement, CliError> {
    let err = || {
        CliError::Parse(format!(
            "expected a torus element like `2,3` or `(2x,3y)`, got `{s}`"
        ))
    };
    let inner = s
        .trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .replace(['x', 'y'], "");
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(err());
    }
    let rat_of = |t: &str| -> Result<Rat, CliError> {
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n, d),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if num_traits::Zero::is_zero(&d) {
            return Err(err());
        }
        Ok(Rat::new(n, d))
    };
    TorusElement::from_rationals(&rat_of(parts[0])?, &rat_of(parts[1])?)
        .map_err(|e| CliError::Parse(format!("invalid torus element `{s}`: {e}")))
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

fn cmd_classify(cfg: &RunConfig, input: &str, iterates: usize) -> Result<String, CliError> {
    if iterates < 2 {
        return Err(CliError::Parse("need at least 2 iterates".to_string()));
    }
    // A matrix selects the combinatorial monomial path with exact λ;
    // anything else is parsed as a map and iterated by composition.
    let (seq, lambda_exact) = match parse_matrix(input) {
        Ok(a) => {
            let lam = match is_loxodromic(&a) {
                Ok(true) => Some(
                    dynamical_degree_monomial(&a)
                        .map_err(|e| CliError::Parse(e.to_string()))?
                        .to_string(),
                ),
                _ => None,
            };
            (degree_sequence_monomial(&a, iterates), lam)
        }
        Err(_) => {
            let f = parse_map_text(input)?;
            let seq = degree_sequence_map(&f, iterates, Some(cfg.budget_degree)).map_err(|e| {
                match e {
                    DynamicsError::BudgetExceeded(partial) => CliError::Budget(format!(
                        "degree budget {} exhausted after {} iterates: {:?}",
                        cfg.budget_degree,
                        partial.values().len(),
                        partial.values()
                    )),
                    other => CliError::Parse(other.to_string()),
                }
            })?;
            (seq, None)
        }
    };
    let report = classify_growth(&seq).map_err(|e| CliError::Parse(e.to_string()))?;
    let class_name = match report.class {
        GrowthClass::Bounded => "Bounded",
        GrowthClass::Linear => "Linear",
        GrowthClass::Quadratic => "Quadratic",
        GrowthClass::Exponential(_) => "Exponential",
    };
    let lambda_estimate = match report.class {
        GrowthClass::Exponential(l) => Some(format!("{l:.prec$}", prec = cfg.precision)),
        _ => None,
    };
    let degrees: Vec<String> = seq.values().iter().map(|d| d.to_string()).collect();

    match cfg.format {
        Format::Csv => {
            let mut out = String::from("n,degree");
            for (i, d) in degrees.iter().enumerate() {
                write!(out, "\n{},{}", i + 1, d).unwrap();
            }
            Ok(out)
        }
        Format::Json => Ok(render_json(json!({
            "schema": 1,
            "command": "classify",
            "input": input,
            "degrees": degrees,
            "class": class_name,
            "lambda_exact": lambda_exact,
            "lambda_estimate": lambda_estimate,
            "diagnostics": report.diagnostics,
        }))),
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "source:   {}", seq.source()).unwrap();
            writeln!(out, "degrees:  {}", degrees.join(", ")).unwrap();
            writeln!(out, "class:    {class_name}").unwrap();
            if let Some(l) = &lambda_exact {
                writeln!(out, "lambda:   {l} (exact)").unwrap();
            }
            if let Some(l) = &lambda_estimate {
                writeln!(out, "estimate: {l}").unwrap();
            }
            write!(out, "details:  {}", report.diagnostics).unwrap();
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------------------
// monomial-conj
// ---------------------------------------------------------------------------

fn matrix_json(m: &IntMatrix2) -> Value {
    json!([
        [m.entry(0, 0).to_string(), m.entry(0, 1).to_string()],
        [m.entry(1, 0).to_string(), m.entry(1, 1).to_string()]
    ])
}

fn matrix_text(m: &IntMatrix2) -> String {
    format!(
        "[[{}, {}], [{}, {}]]",
        m.entry(0, 0),
        m.entry(0, 1),
        m.entry(1, 0),
        m.entry(1, 1)
    )
}

fn cmd_monomial_conj(cfg: &RunConfig, sub: &ConjCommand) -> Result<String, CliError> {
    match sub {
        ConjCommand::Nonneg { matrix } => {
            let a = parse_matrix(matrix)?;
            let (b, p, sign) =
                conjugate_to_nonnegative(&a).map_err(|e| CliError::Parse(e.to_string()))?;
            // Re-verify the certificate before printing: B = P^-1 (±A) P
            // exactly, with B non-negative.
            let p_inv = p.inverse().map_err(|e| CliError::Verify(e.to_string()))?;
            let signed_a = if sign < 0 { a.neg() } else { a.clone() };
            if p_inv.mul(&signed_a).mul(&p) != b || !b.is_nonnegative() {
                return Err(CliError::Verify(
                    "conjugation certificate failed re-verification".to_string(),
                ));
            }
            match cfg.format {
                Format::Json => Ok(render_json(json!({
                    "schema": 1,
                    "command": "monomial-conj nonneg",
                    "a": matrix_json(&a),
                    "b": matrix_json(&b),
                    "p": matrix_json(&p),
                    "sign": sign,
                    "verified": true,
                }))),
                _ => Ok(format!(
                    "B    = {}\nP    = {}\nsign = {}\nverified: B = P^-1 ({}A) P with B >= 0",
                    matrix_text(&b),
                    matrix_text(&p),
                    sign,
                    if sign < 0 { "-" } else { "+" }
                )),
            }
        }
        ConjCommand::Classes { trace } => {
            let reps =
                trace_conjugacy_classes(*trace).map_err(|e| CliError::Parse(e.to_string()))?;
            match cfg.format {
                Format::Json => Ok(render_json(json!({
                    "schema": 1,
                    "command": "monomial-conj classes",
                    "trace": trace,
                    "count": reps.len(),
                    "representatives": reps.iter().map(matrix_json).collect::<Vec<_>>(),
                }))),
                _ => {
                    let mut out = format!("{} class(es) of trace {}", reps.len(), trace);
                    for r in &reps {
                        write!(out, "\n  {}", matrix_text(r)).unwrap();
                    }
                    Ok(out)
                }
            }
        }
        ConjCommand::TorusSolve { matrix, torus } => {
            let a = parse_matrix(matrix)?;
            let d = parse_torus(torus)?;
            let dp = solve_commuting_torus(&a, &d).map_err(|e| CliError::Parse(e.to_string()))?;
            // Re-verify at the group level: d'^-1 (A, d) d' = (A, 1).
            let g = MonomialElement::new(a.clone(), d.clone())
                .map_err(|e| CliError::Parse(e.to_string()))?;
            let conj = MonomialElement::new(IntMatrix2::identity(), dp.clone())
                .map_err(|e| CliError::Verify(e.to_string()))?;
            let pure = MonomialElement::from_matrix(a.clone())
                .map_err(|e| CliError::Verify(e.to_string()))?;
            if semidirect_compose(&semidirect_compose(&conj.inverse(), &g), &conj) != pure {
                return Err(CliError::Verify(
                    "torus conjugator failed re-verification".to_string(),
                ));
            }
            match cfg.format {
                Format::Json => Ok(render_json(json!({
                    "schema": 1,
                    "command": "monomial-conj torus-solve",
                    "a": matrix_json(&a),
                    "d": d.to_string(),
                    "d_prime": dp.to_string(),
                    "verified": true,
                }))),
                _ => Ok(format!(
                    "d' = {dp}\nverified: d'^-1 (A, d) d' = (A, 1)"
                )),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// modp
// ---------------------------------------------------------------------------

/// Parses the generator file grammar: `<index> <inverse-index> <map>` per
/// line, `#` comments, indices dense and in order.
fn parse_generator_file(text: &str) -> Result<GeneratorSystem, CliError> {
    let mut generators = Vec::new();
    let mut inverse_of = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.splitn(3, char::is_whitespace);
        let bad = |what: &str| {
            CliError::Parse(format!(
                "generator file line {}: {what} (grammar: `<index> <inverse-index> <map>`)",
                lineno + 1
            ))
        };
        let index: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("missing or invalid index"))?;
        if index != generators.len() {
            return Err(bad(&format!(
                "generator {index} out of order, expected {}",
                generators.len()
            )));
        }
        let inv: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("missing or invalid inverse index"))?;
        let map_text = parts.next().ok_or_else(|| bad("missing map"))?;
        generators.push(parse_map_text(map_text)?);
        inverse_of.push(inv);
    }
    GeneratorSystem::new(generators, inverse_of).map_err(|e| match e {
        ModpError::IdentityGenerator(i) => {
            CliError::Parse(format!("generator {i} is the identity"))
        }
        ModpError::NotInverse(i, j) => CliError::Parse(format!(
            "generator {i} is paired with {j} but they do not compose to the identity"
        )),
        other => CliError::Parse(other.to_string()),
    })
}

fn cmd_modp(
    cfg: &RunConfig,
    file: &PathBuf,
    prime: Option<u64>,
    random_prime: bool,
    experiment: Option<u32>,
) -> Result<String, CliError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", file.display())))?;
    let sys = parse_generator_file(&text)?;
    let bad = collect_bad_set(&sys);
    let strategy = if random_prime {
        PrimeStrategy::SeededRandom(cfg.seed)
    } else {
        PrimeStrategy::Smallest
    };
    let p = prime.unwrap_or_else(|| choose_prime(&bad, strategy));
    let hom = reduce_system(&sys, p).map_err(|e| match prime {
        // A user-supplied prime may legitimately be bad; a chosen one never.
        Some(_) => CliError::Parse(e.to_string()),
        None => CliError::Verify(e.to_string()),
    })?;

    let experiment_report = match experiment {
        None => None,
        Some(k) => Some(
            finite_image_experiment(&sys, k, p, cfg.budget_words).map_err(|e| match e {
                ModpError::BudgetExceeded(partial) => CliError::Budget(format!(
                    "word budget {} exhausted before closure: {}",
                    cfg.budget_words,
                    render_json(partial.to_json())
                )),
                other => CliError::Verify(other.to_string()),
            })?,
        ),
    };

    match cfg.format {
        Format::Json => {
            let mut v = json!({
                "schema": 1,
                "command": "modp",
                "p": p,
                "bad_set_size": bad.len(),
                "generators": sys.len(),
                "reduced": hom
                    .reduced_generators()
                    .iter()
                    .map(|g| g.to_string())
                    .collect::<Vec<_>>(),
                "degree_drops": serde_json::to_value(hom.degree_drops()).unwrap(),
                "verified": true,
            });
            if let Some(r) = &experiment_report {
                v["experiment"] = r.to_json();
            }
            Ok(render_json(v))
        }
        _ => {
            let mut out = String::new();
            writeln!(out, "prime:      {p}").unwrap();
            writeln!(out, "bad set:    {} element(s)", bad.len()).unwrap();
            for (i, g) in hom.reduced_generators().iter().enumerate() {
                writeln!(out, "phi(g{i}) =  {g}").unwrap();
            }
            for d in hom.degree_drops() {
                writeln!(
                    out,
                    "degree drop: generator {} from {} to {}",
                    d.generator, d.from, d.to
                )
                .unwrap();
            }
            write!(out, "verified:   inverse identities and nontriviality witness hold mod {p}")
                .unwrap();
            if let Some(r) = &experiment_report {
                write!(
                    out,
                    "\nexperiment: image size {} ({})",
                    r.image_size,
                    if r.closure { "closed" } else { "not closed" }
                )
                .unwrap();
            }
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------------------
// fan-trace
// ---------------------------------------------------------------------------

fn ray_json(r: &Ray) -> Value {
    json!([r[0].to_string(), r[1].to_string()])
}

fn ray_text(r: &Ray) -> String {
    format!("({}, {})", r[0], r[1])
}

fn tag_json(t: &RayImage) -> Value {
    match t {
        RayImage::OntoRay(r) => json!({ "onto_ray": ray_json(r) }),
        RayImage::IntoConeInterior(a, b) => {
            json!({ "into_cone_interior": [ray_json(a), ray_json(b)] })
        }
    }
}

fn tag_text(t: &RayImage) -> String {
    match t {
        RayImage::OntoRay(r) => format!("onto ray {}", ray_text(r)),
        RayImage::IntoConeInterior(a, b) => format!(
            "into interior of cone {} .. {}",
            ray_text(a),
            ray_text(b)
        ),
    }
}

fn cmd_fan_trace(
    cfg: &RunConfig,
    matrix: &str,
    blowups: usize,
    steps: usize,
) -> Result<String, CliError> {
    let a = parse_matrix(matrix)?;
    if a == IntMatrix2::identity() {
        return Err(CliError::Parse(
            "the identity fixes every ray; nothing to trace".to_string(),
        ));
    }
    if !a.is_unimodular() {
        return Err(CliError::Parse("matrix must have determinant ±1".to_string()));
    }
    let loxodromic = is_loxodromic(&a).map_err(|e| CliError::Parse(e.to_string()))?;
    if steps > 0 && !loxodromic {
        return Err(CliError::Parse(
            "orbit steps require a loxodromic matrix; pass --steps 0 for the contraction report"
                .to_string(),
        ));
    }

    // Seeded random blow-ups of adjacent ray pairs on the standard fan.
    let mut model = ToricSurfaceModel::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..blowups {
        let rays = model.fan().rays().to_vec();
        let i = rng.gen_range(0..rays.len());
        let j = (i + 1) % rays.len();
        model = blow_up(&model, &rays[i], &rays[j])
            .map_err(|e| CliError::Verify(format!("blow-up of adjacent pair failed: {e}")))?;
    }
    let fan = model.fan();

    // Contraction report: where each fan ray goes, and E(f_A) on the
    // standard fan.
    let tags: Vec<RayImage> = fan
        .rays()
        .iter()
        .map(|r| ray_image(&a, r, fan))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let e = e_of_monomial(&a).map_err(|e| CliError::Parse(e.to_string()))?;

    // Orbit trace: no starting ray may ever be fixed (re-checked here; a
    // fixed ray under a loxodromic matrix would be a library bug).
    let mut orbits = Vec::new();
    if loxodromic {
        for start in fan.rays() {
            let report = boundary_orbit(&a, start, steps, fan)
                .map_err(|e| CliError::Parse(e.to_string()))?;
            if let Some(step) = report.fixed_at {
                return Err(CliError::Verify(format!(
                    "ray {} became fixed at step {step} under a loxodromic matrix",
                    ray_text(start)
                )));
            }
            orbits.push((start.clone(), report));
        }
    }

    match cfg.format {
        Format::Json => Ok(render_json(json!({
            "schema": 1,
            "command": "fan-trace",
            "matrix": matrix_json(&a),
            "rays": fan.rays().iter().map(ray_json).collect::<Vec<_>>(),
            "tags": tags.iter().map(tag_json).collect::<Vec<_>>(),
            "e": e,
            "orbits": orbits
                .iter()
                .map(|(start, r)| json!({
                    "start": ray_json(start),
                    "rays": r.rays.iter().map(ray_json).collect::<Vec<_>>(),
                    "tags": r.tags.iter().map(tag_json).collect::<Vec<_>>(),
                }))
                .collect::<Vec<_>>(),
            "no_fixed_ray": loxodromic,
        }))),
        _ => {
            let mut out = String::new();
            writeln!(out, "fan rays:  {} (after {blowups} blow-up(s))", fan.num_rays()).unwrap();
            for (r, t) in fan.rays().iter().zip(&tags) {
                writeln!(out, "  {} -> {}", ray_text(r), tag_text(t)).unwrap();
            }
            write!(out, "E(f_A) = {e} contracted coordinate line(s)").unwrap();
            for (start, r) in &orbits {
                let path: Vec<String> = r.rays.iter().map(ray_text).collect();
                write!(out, "\norbit from {}: {}", ray_text(start), path.join(" -> ")).unwrap();
            }
            if loxodromic {
                write!(out, "\nno fixed ray in {steps} step(s) from any starting ray").unwrap();
            }
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

/// Deterministic JSON rendering: serde_json orders object keys canonically,
/// so identical inputs produce identical bytes.
fn render_json(v: Value) -> String {
    serde_json::to_string_pretty(&v).expect("json values render")
}
