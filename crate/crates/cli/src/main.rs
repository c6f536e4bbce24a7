use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hypdisk::io::{self, Command, RunConfig, RunResult};
use hypdisk::{Error, ErrorKind};

/// Hyperbolic disk experiments: Bloch radii, iterated function systems and
/// the non-constant-limit constructions.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    /// bloch, ifs-run, construct-t7, construct-t8, dw, verify-lemmas, qc,
    /// or the two-word forms `construct t7|t8` and `verify lemma1|lemma2`
    command: String,
    /// Second word of a two-word command.
    variant: Option<String>,
    /// JSON run configuration; defaults are used when omitted.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(short, long)]
    seed: Option<u64>,
    /// Output directory (default: `out`).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

/// Resolves the command words to a command plus an optional lemma filter.
fn resolve(command: &str, variant: Option<&str>) -> Result<(Command, Option<u8>), Error> {
    let simple = |c| match variant {
        None => Ok((c, None)),
        Some(v) => Err(Error::Config(format!("`{command}` takes no second word, got `{v}`"))),
    };
    match (command, variant) {
        ("bloch", _) => simple(Command::Bloch),
        ("ifs-run", _) => simple(Command::IfsRun),
        ("construct-t7", _) | ("construct", Some("t7")) => Ok((Command::ConstructT7, None)),
        ("construct-t8", _) | ("construct", Some("t8")) => Ok((Command::ConstructT8, None)),
        ("dw", _) => simple(Command::Dw),
        ("verify-lemmas", _) => simple(Command::VerifyLemmas),
        ("verify", Some("lemma1")) => Ok((Command::VerifyLemmas, Some(1))),
        ("verify", Some("lemma2")) => Ok((Command::VerifyLemmas, Some(2))),
        ("qc", _) => simple(Command::Qc),
        _ => Err(Error::Config(format!(
            "unknown command `{command}{}`",
            variant.map(|v| format!(" {v}")).unwrap_or_default()
        ))),
    }
}

fn load(args: &Args) -> Result<RunConfig, Error> {
    let (command, lemma) = resolve(&args.command, args.variant.as_deref())?;
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::new(command),
    };
    if cfg.command != command {
        return Err(Error::Config(format!(
            "config is for `{}` but the command line asks for `{}`",
            cfg.command.name(),
            command.name()
        )));
    }
    if let Some(l) = lemma {
        cfg.lemmas = Some(vec![l]);
    }
    if let Some(s) = args.seed {
        cfg.seed = Some(s);
    }
    if let Some(o) = &args.out {
        cfg.out = Some(o.display().to_string());
    }
    cfg.with_defaults()
}

fn summary(result: &RunResult) -> String {
    match result {
        RunResult::Bloch(b) => format!("{}: inradius {} at {:?}, verdict {:?}", b.domain, b.inradius, b.center, b.verdict),
        RunResult::Qc(q) => {
            let rows: Vec<String> = q
                .images
                .iter()
                .map(|r| format!("K={} inradius {}", r.stretch, r.report.inradius))
                .collect();
            format!("{}; consistent: {}", rows.join(", "), q.all_consistent)
        }
        RunResult::IfsRun(r) => format!("verdict {:?}", r.engine.verdict),
        RunResult::Dw(d) => format!("limit {:?} ({}) after {} steps", d.limit, d.class, d.steps),
        RunResult::ConstructT7(t) => {
            let ok = t.steps.iter().all(|s| {
                let c = &s.checks;
                c.preimages && c.proximity && c.intrinsic && c.confinement && c.intrinsic_confinement
            });
            format!(
                "{} steps, all checks {}; F_N(0) = {:?}, F_N(w~_N) = {:?}; engine {:?}",
                t.steps.len(),
                if ok { "pass" } else { "FAIL" },
                t.final_origin,
                t.final_marked,
                t.engine.verdict
            )
        }
        RunResult::ConstructT8(t) => format!("{} steps; engine {:?}", t.steps.len(), t.engine.verdict),
        RunResult::VerifyLemmas(l) => {
            let mut parts = Vec::new();
            if let Some(rows) = &l.lemma1 {
                let eps: Vec<String> = rows.iter().map(|r| format!("C={}: {:.3e}", r.big_radius, r.epsilon_hat)).collect();
                parts.push(format!("lemma 1 eps_hat {}", eps.join(", ")));
            }
            if let Some(r) = &l.lemma2 {
                let gaps: Vec<String> = r.rows.iter().map(|x| format!("|a|={}: {:.3e}", x.modulus, x.gap)).collect();
                parts.push(format!("lemma 2 gaps {}", gaps.join(", ")));
            }
            parts.join("; ")
        }
    }
}

fn run(args: &Args) -> Result<(), Error> {
    io::configure_threads()?;
    let cfg = load(args)?;
    let dir = PathBuf::from(cfg.out.clone().unwrap_or_else(|| "out".into()));
    let output = io::execute(&cfg)?;
    for path in io::emit_outputs(&output, &dir)? {
        println!("wrote {}", path.display());
    }
    println!("{}: {}", cfg.command.name(), summary(&output.report.result));
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Precondition => 2,
                ErrorKind::Numeric => 3,
                ErrorKind::Io => 1,
            })
        }
    }
}
