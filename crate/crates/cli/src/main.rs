mod parse;

use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use ffspecial::carlitz::{pi_tilde, Engine};
use ffspecial::gamma::{
    gamma_eval, gamma_monomial_check, gamma_trdeg, gauss_mult_check, joint_trdeg, reflection_check,
    translation_check,
};
use ffspecial::motives::{det_shape, polylog_matrices, verify_trivialization, TSeriesTrunc};
use ffspecial::recognize::Outcome;
use ffspecial::zeta::{
    anderson_thakur_solve, euler_carlitz_ratio, frobenius_check, u_set, zeta, zeta_galois_dim,
    zeta_trdeg,
};
use ffspecial::{Config, Context, Error};

const EXIT_OK: u8 = 0;
const EXIT_UNRECOGNIZED: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "ffspecial",
    version,
    about = "Carlitz zeta values, geometric Gamma values and their difference equations"
)]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct GlobalOpts {
    /// Field order q (a prime power).
    #[arg(long, global = true, default_value_t = 3)]
    q: u64,
    /// Absolute precision target P.
    #[arg(long, global = true, default_value_t = 100)]
    prec: i64,
    /// Guard g for certified comparisons.
    #[arg(long, global = true, default_value_t = 10)]
    guard: i64,
    /// Truncation order T for t-series.
    #[arg(long = "T", alias = "t-order", global = true, default_value_t = 30)]
    t_order: usize,
    /// Largest number of monic polynomials an enumeration may visit.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    budget: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = EngineArg::Auto)]
    engine: EngineArg,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum EngineArg {
    Auto,
    Enumeration,
    Accelerated,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Auto => Engine::Auto,
            EngineArg::Enumeration => Engine::Enumeration,
            EngineArg::Accelerated => Engine::Accelerated,
        }
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// The Carlitz zeta value ζ_C(n).
    Zeta {
        #[arg(long)]
        n: u64,
    },
    /// The geometric Gamma value Γ(r).
    Gamma {
        #[arg(long)]
        r: String,
        /// Also recognize Γ(r)/π̃ in k(θ̃).
        #[arg(long, value_enum)]
        recognize_over: Option<Over>,
    },
    /// The Carlitz period π̃.
    PiTilde,
    /// Certifies a relation; exit 0 when verified, 2 when unrecognized at precision.
    Verify {
        #[arg(value_enum)]
        relation: Relation,
        #[arg(long)]
        r: Option<String>,
        /// Translation shift.
        #[arg(long, default_value = "1")]
        a: String,
        /// Gauss multiplier (monic).
        #[arg(long, default_value = "x")]
        g: String,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Include the Ψ matrix in motive output.
        #[arg(long)]
        include_psi: bool,
    },
    /// Predicted transcendence degrees and the numerically computed Galois dimension.
    Trdeg {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        s: Option<u64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Over {
    Pi,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Relation {
    Translation,
    Reflection,
    Gauss,
    EulerCarlitz,
    Frobenius,
    AndersonThakur,
    Motive,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Which {
    Gamma,
    Zeta,
    Joint,
    ZetaGalois,
}

/// Everything needed to reproduce a run.
#[derive(Serialize)]
struct RunManifest<'a> {
    q: u64,
    p: u32,
    e: u32,
    precision: i64,
    guard: i64,
    t_order: usize,
    budget: u64,
    seed: u64,
    engine: EngineArg,
    command: &'static str,
    args: &'a Command,
    version: &'static str,
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Zeta { .. } => "zeta",
        Command::Gamma { .. } => "gamma",
        Command::PiTilde => "pi-tilde",
        Command::Verify { .. } => "verify",
        Command::Trdeg { .. } => "trdeg",
    }
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| anyhow::anyhow!("missing required flag --{flag}"))
}

fn outcome_code(ok: bool) -> u8 {
    if ok {
        EXIT_OK
    } else {
        EXIT_UNRECOGNIZED
    }
}

fn warn_all(v: &mut Value) {
    if let Some(w) = v.as_object_mut().and_then(|o| o.remove("warnings")) {
        for msg in w.as_array().into_iter().flatten() {
            eprintln!("warning: {}", msg.as_str().unwrap_or_default());
        }
    }
}

fn run(ctx: &Context, command: &Command) -> Result<(Value, u8)> {
    let fq = &ctx.fq;
    match command {
        Command::Zeta { n } => {
            let mut v = zeta(ctx, *n, ctx.cfg.prec)?.to_json();
            warn_all(&mut v);
            Ok((v, EXIT_OK))
        }
        Command::Gamma { r, recognize_over } => {
            let r = parse::rational(fq, r)?;
            let mut v = gamma_eval(ctx, &r, ctx.cfg.prec)?.to_json();
            warn_all(&mut v);
            let mut code = EXIT_OK;
            if recognize_over.is_some() {
                let cert = gamma_monomial_check(ctx, "gamma-over-pi", vec![(r, 1)], 1)?;
                code = outcome_code(cert.is_recognized());
                v["recognition"] = cert.to_json();
            }
            Ok((v, code))
        }
        Command::PiTilde => {
            let pi = pi_tilde(&ctx.cache, ctx.cfg.prec);
            Ok((
                json!({"value": pi.to_json(), "text": pi.to_string(), "precision": ctx.cfg.prec}),
                EXIT_OK,
            ))
        }
        Command::Verify {
            relation,
            r,
            a,
            g,
            n,
            m,
            include_psi,
        } => {
            let rarg = || parse::rational(fq, require(r.as_deref(), "r")?);
            match relation {
                Relation::Translation => {
                    let cert = translation_check(ctx, &rarg()?, &parse::polynomial(fq, a)?)?;
                    Ok((cert.to_json(), outcome_code(cert.is_recognized())))
                }
                Relation::Reflection => {
                    let cert = reflection_check(ctx, &rarg()?)?;
                    Ok((cert.to_json(), outcome_code(cert.is_recognized())))
                }
                Relation::Gauss => {
                    let cert = gauss_mult_check(ctx, &rarg()?, &parse::polynomial(fq, g)?)?;
                    Ok((cert.to_json(), outcome_code(cert.is_recognized())))
                }
                Relation::EulerCarlitz => {
                    let cert = euler_carlitz_ratio(ctx, require(*n, "n")?)?;
                    Ok((
                        cert.to_json(),
                        outcome_code(cert.recognition.outcome == Outcome::Recognized),
                    ))
                }
                Relation::Frobenius => {
                    let cert = frobenius_check(ctx, require(*n, "n")?, *m, ctx.cfg.prec)?;
                    Ok((cert.to_json(), outcome_code(cert.passed)))
                }
                Relation::AndersonThakur => match anderson_thakur_solve(ctx, require(*n, "n")?) {
                    Ok(cert) => Ok((cert.to_json(), outcome_code(cert.passed()))),
                    Err(Error::Precision(msg)) => Ok((
                        json!({"relation": "anderson-thakur", "outcome": Outcome::UnrecognizedAtPrecision, "note": msg}),
                        EXIT_UNRECOGNIZED,
                    )),
                    Err(e) => Err(e.into()),
                },
                Relation::Motive => verify_motive(ctx, require(*n, "n")?, *include_psi),
            }
        }
        Command::Trdeg { which, f, s } => trdeg(ctx, *which, f.as_deref(), *s),
    }
}

fn verify_motive(ctx: &Context, n: u64, include_psi: bool) -> Result<(Value, u8)> {
    let cert = anderson_thakur_solve(ctx, n)?;
    let n32 = u32::try_from(n).map_err(|_| anyhow::anyhow!("n = {n} is too large"))?;
    let (phi, psi) = polylog_matrices(&ctx.fq, n32, &cert.iota, ctx.cfg.t_order, ctx.cfg.prec)?;
    let det = det_shape(&phi)?;
    let check = verify_trivialization(&phi, &psi, ctx.cfg.threshold())?;
    let passed = check.passed && det.exponent as u64 == n;
    let mut v = json!({
        "relation": "motive",
        "n": n,
        "iota": cert.iota,
        "m_n": cert.m_n,
        "size": phi.len(),
        "t_order": ctx.cfg.t_order,
        "precision": ctx.cfg.prec,
        "phi": phi.iter().map(|row| row.iter().map(|e| e.to_json()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "det_exponent": det.exponent,
        "det_constant": det.constant.to_json(),
        "verification": check.to_json(),
        "passed": passed,
    });
    if include_psi {
        v["psi"] = psi
            .iter()
            .map(|row| row.iter().map(TSeriesTrunc::to_json).collect::<Vec<_>>())
            .collect();
    }
    Ok((v, outcome_code(passed)))
}

fn trdeg(ctx: &Context, which: Which, f: Option<&str>, s: Option<u64>) -> Result<(Value, u8)> {
    let fq = &ctx.fq;
    let (p, q) = (fq.p() as u64, fq.q() as u64);
    let zeta_terms = |s: u64| json!({"s": s, "floor_s_over_p": s / p, "floor_s_over_q_minus_1": s / (q - 1), "floor_s_over_p_q_minus_1": s / (p * (q - 1))});
    let poly = |f: Option<&str>| -> Result<ffspecial::Poly> {
        let f = parse::polynomial(fq, require(f, "f")?)?;
        if !f.is_monic() || f.is_constant() {
            anyhow::bail!("--f must be monic of positive degree");
        }
        Ok(f)
    };
    let phi_a = |f: &ffspecial::Poly| ffspecial::factor::euler_phi_a(f, ctx.cfg.seed);
    let v = match which {
        Which::Gamma => {
            let f = poly(f)?;
            json!({"which": "gamma", "f": f.to_string(), "value": gamma_trdeg(&f, ctx.cfg.seed)?, "units": phi_a(&f)?})
        }
        Which::Zeta => {
            let s = require(s, "s")?;
            json!({"which": "zeta", "value": zeta_trdeg(p, q, s), "terms": zeta_terms(s)})
        }
        Which::Joint => {
            let f = poly(f)?;
            let s = require(s, "s")?;
            json!({
                "which": "joint",
                "f": f.to_string(),
                "value": joint_trdeg(&f, s, ctx.cfg.seed)?,
                "units": phi_a(&f)?,
                "terms": zeta_terms(s),
            })
        }
        Which::ZetaGalois => {
            let s = require(s, "s")?;
            let g = zeta_galois_dim(ctx, s)?;
            let predicted = zeta_trdeg(p, q, s);
            json!({
                "which": "zeta-galois",
                "value": g.dim,
                "galois": g.to_json(),
                "u_set": u_set(p, q, s),
                "zeta_trdeg": predicted,
                "agrees": g.dim == predicted,
            })
        }
    };
    Ok((v, EXIT_OK))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_PRECONDITION
            } else {
                EXIT_OK
            });
        }
    };
    let o = &cli.opts;
    let cfg = Config {
        prec: o.prec,
        guard: o.guard,
        t_order: o.t_order,
        budget: o.budget,
        seed: o.seed,
        engine: o.engine.into(),
    };
    let ctx = match Context::with_order(o.q, cfg) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_PRECONDITION);
        }
    };
    let manifest = RunManifest {
        q: o.q,
        p: ctx.fq.p(),
        e: ctx.fq.e(),
        precision: o.prec,
        guard: o.guard,
        t_order: o.t_order,
        budget: o.budget,
        seed: o.seed,
        engine: o.engine,
        command: command_name(&cli.command),
        args: &cli.command,
        version: env!("CARGO_PKG_VERSION"),
    };
    match run(&ctx, &cli.command) {
        Ok((result, code)) => {
            let doc = json!({"manifest": manifest, "result": result});
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("JSON values serialize")
            );
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_PRECONDITION)
        }
    }
}
