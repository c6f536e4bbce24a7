//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! non-zero if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use hypdisk::bloch::{bloch_radius_search, qc_image_experiment, SearchBudget};
use hypdisk::constructions::{self, ArgumentMode};
use hypdisk::domain::DomainModel;
use hypdisk::hyperbolic::rho;
use hypdisk::ifs::{self, ProbeGrid, RunOptions, Verdict};
use hypdisk::io::{emit_outputs, execute, parse_config};
use hypdisk::maps::compose_eval;
use hypdisk::{Blaschke2, Complex, DiskPoint, Domain, MobiusAut};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Plain `artanh|(z − w)/(1 − w̄z)|`.
fn rho_oracle(z: Complex<f64>, w: Complex<f64>) -> f64 {
    ((z - w) / (Complex::new(1.0, 0.0) - w.conj() * z)).norm().atanh()
}

fn random_point(rng: &mut ChaCha8Rng, max: f64) -> DiskPoint {
    let r = max * rng.gen::<f64>().sqrt();
    DiskPoint::new(Complex::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))).unwrap()
}

fn domain(spec: &str) -> Domain {
    Domain::parse(spec).unwrap()
}

fn metric_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut iso = 0.0f64;
    for _ in 0..10_000 {
        let (z, w) = (random_point(&mut rng, 0.9), random_point(&mut rng, 0.9));
        let m = MobiusAut::new(random_point(&mut rng, 0.9), rng.gen_range(0.0..std::f64::consts::TAU));
        let before = rho_oracle(z.value(), w.value());
        iso = iso.max((rho(m.apply(z), m.apply(w)) - before).abs());
    }
    ensure(iso < 1e-12, format!("isometry error {iso:e}"))?;

    let (mut vieta, mut identity) = (0.0f64, 0.0f64);
    for _ in 0..1_000 {
        let a = random_point(&mut rng, 0.999);
        // preimages are defined for ρ(0, c) < 1
        let c = random_point(&mut rng, 0.999 * 1f64.tanh());
        let (z1, z2) = Blaschke2::new(a).map_err(err)?.preimages(c).map_err(err)?;
        vieta = vieta.max((z1.value() * z2.value() + c.value()).norm());
        identity = identity.max((rho_oracle(Complex::new(0.0, 0.0), z1.value()) - rho_oracle(a.value(), z2.value())).abs());
    }
    ensure(vieta < 1e-12, format!("Vieta error {vieta:e}"))?;
    ensure(identity < 1e-10, format!("preimage distance identity error {identity:e}"))?;
    Ok(format!("isometry {iso:.1e}, Vieta {vieta:.1e}, identity {identity:.1e}"))
}

/// Small-modulus root of `z² + (cā − a)z − c = 0` for real `a` and `c`.
fn small_root(a: f64, c: f64) -> f64 {
    let b = c * a - a;
    let disc = (b * b + 4.0 * c).sqrt();
    let roots = [(-b + disc) / 2.0, (-b - disc) / 2.0];
    if roots[0].abs() < roots[1].abs() {
        roots[0]
    } else {
        roots[1]
    }
}

fn preimage_asymptotics() -> Outcome {
    let c = 0.3;
    let moduli = [0.9, 0.99, 0.999];
    let r = constructions::lemma2_verify(DiskPoint::real(c), &moduli, ArgumentMode::Fixed(0.0)).map_err(err)?;
    let target = c.atanh();
    let mut gaps = Vec::new();
    for (row, &m) in r.rows.iter().zip(&moduli) {
        let oracle = small_root(m, c).abs().atanh();
        ensure(
            (row.rho_origin_z1 - oracle).abs() < 1e-12,
            format!("|a| = {m}: rho(0, z1) = {} but quadratic formula gives {oracle}", row.rho_origin_z1),
        )?;
        gaps.push((oracle - target).abs());
    }
    ensure(gaps[0] < 0.02, format!("gap {} at 0.9", gaps[0]))?;
    ensure(gaps[1] < 0.002, format!("gap {} at 0.99", gaps[1]))?;
    ensure(gaps.windows(2).all(|g| g[1] < g[0]) && r.gaps_decreasing, format!("gaps not monotone: {gaps:?}"))?;
    Ok(format!("gaps {:.4e}, {:.4e}, {:.4e}", gaps[0], gaps[1], gaps[2]))
}

fn lemma1() -> Outcome {
    let samples = 1000;
    let mut eps = Vec::new();
    for big in [2.0f64, 4.0, 8.0] {
        let r = constructions::lemma1_verify(big, samples).map_err(err)?;
        ensure(r.domination_holds, format!("domination fails for C = {big}"))?;
        let top = 1f64.tanh();
        let mut oracle = f64::NEG_INFINITY;
        for i in 1..=samples {
            let x = top * i as f64 / (samples as f64 + 1.0);
            let (d, delta) = ((x / big.tanh()).atanh(), x.atanh());
            ensure(d >= delta, format!("rho_D < rho at C = {big}, r = {x}"))?;
            oracle = oracle.max(d / delta - 1.0);
        }
        ensure(
            (r.epsilon_hat - oracle).abs() < 1e-12,
            format!("C = {big}: eps_hat {} vs recomputed {oracle}", r.epsilon_hat),
        )?;
        eps.push(r.epsilon_hat);
    }
    ensure(eps[0] > eps[1] && eps[1] > eps[2], format!("not strictly decreasing: {eps:?}"))?;
    ensure(eps[2] < 0.01, format!("eps_hat(8) = {}", eps[2]))?;
    Ok(format!("eps_hat {:.3e}, {:.3e}, {:.3e}", eps[0], eps[1], eps[2]))
}

fn relatively_compact_target() -> Outcome {
    let x = domain("disk(0,0,0.3)");
    let alt = ProbeGrid {
        radius: 2.5,
        rings: 5,
        spokes: 7,
    };
    let mut worst_diam = 0.0f64;
    let mut worst_shift = 0.0f64;
    for seed in 0..20u64 {
        let seq = ifs::random_system(&x, seed, 50).map_err(err)?;
        let opts = RunOptions::default();
        let (_, report) = ifs::run(&seq, &opts);
        let Verdict::ConstantLimit { value } = report.verdict else {
            return Err(format!("seed {seed}: verdict {}", report.verdict.name()));
        };
        let last = *report.diameters.last().unwrap();
        ensure(report.diameters.len() == 51 && last < 1e-6, format!("seed {seed}: diameter {last:e} at n = 50"))?;
        worst_diam = worst_diam.max(last);
        let (_, other) = ifs::run(&seq, &RunOptions { probe: alt, ..opts });
        let Verdict::ConstantLimit { value: v2 } = other.verdict else {
            return Err(format!("seed {seed}: alternate probe verdict {}", other.verdict.name()));
        };
        worst_shift = worst_shift.max((value - v2).norm());
    }
    ensure(worst_shift < 1e-8, format!("limit moves by {worst_shift:e} between probes"))?;
    Ok(format!("20/20 constant, max diameter {worst_diam:.1e}, probe shift {worst_shift:.1e}"))
}

fn non_constant_construction() -> Outcome {
    let x = domain("horodisk(0,0.5)");
    let phi = x.riemann().ok_or("no Riemann map")?;
    let a0 = phi.to(DiskPoint::origin());
    let w0 = constructions::w0_at_distance(&x, a0, 0.3, 0.0).map_err(err)?;
    ensure((x.rho_x(a0, w0).map_err(err)? - 0.3).abs() < 1e-12, "rho_X(a0, w0) != 0.3")?;
    let b = constructions::theorem7_build(&x, a0, w0, 20).map_err(err)?;
    ensure(b.states.len() == 20, "wrong number of steps")?;
    let (mut a_prev, mut w_prev, mut rx_prev) = (a0, w0, b.rho_c0);
    for s in &b.states {
        let checks = constructions::theorem7_checks(&x, s, a_prev, w_prev, rx_prev, b.rho_c0).map_err(err)?;
        ensure(checks.iter().all(|&c| c), format!("step {}: checks {checks:?}", s.n))?;
        let r = rho_oracle(Complex::new(0.0, 0.0), s.w_tilde.value());
        ensure(r < 1.0, format!("step {}: rho(0, w~) = {r}", s.n))?;
        (a_prev, w_prev, rx_prev) = (s.a, s.w, s.rho_x_aw);
    }
    let w_tilde = b.states.last().unwrap().w_tilde;
    let f0 = compose_eval(&b.maps, DiskPoint::origin(), 20).map_err(err)?;
    let fw = compose_eval(&b.maps, w_tilde, 20).map_err(err)?;
    let (e0, ew) = ((f0.value() - a0.value()).norm(), (fw.value() - w0.value()).norm());
    ensure(e0 < 1e-8 && ew < 1e-8, format!("|F_N(0) - a0| = {e0:e}, |F_N(w~) - w0| = {ew:e}"))?;
    let (_, report) = ifs::run(&b.maps, &RunOptions { steps: 20, ..RunOptions::default() });
    let floor_needed = rho(a0, w0) / 2.0;
    match report.verdict {
        Verdict::NonConstant { diameter_floor } if diameter_floor >= floor_needed => Ok(format!(
            "checks pass, endpoint errors {e0:.1e}/{ew:.1e}, diameter floor {diameter_floor:.4} >= {floor_needed:.4}"
        )),
        v => Err(format!("engine verdict {v:?}, need NonConstant with floor >= {floor_needed}")),
    }
}

fn two_accumulation_points() -> Outcome {
    let x = domain("horodisk(0,0.5)");
    let (a, a1) = (DiskPoint::real(0.5), DiskPoint::real(0.7));
    let b = constructions::theorem8_build(&x, a, a1, 12).map_err(err)?;
    let mut prev = a1;
    for s in &b.states {
        let checks = constructions::theorem8_checks(&x, s, a, prev).map_err(err)?;
        ensure(checks.iter().all(|&c| c), format!("step {}: checks {checks:?}", s.n))?;
        prev = s.a;
    }
    let mut worst = 0.0f64;
    for n in 0..=12 {
        let v = compose_eval(&b.maps, a, n).map_err(err)?;
        let target = if n % 2 == 0 { a } else { a1 };
        worst = worst.max((v.value() - target.value()).norm());
    }
    ensure(worst < 1e-8, format!("orbit misses a/a1 by {worst:e}"))?;
    let opts = RunOptions {
        steps: 12,
        marked: vec![a],
        ..RunOptions::default()
    };
    let (_, report) = ifs::run(&b.maps, &opts);
    let clusters = report.marked_clusters[0].len();
    ensure(clusters == 2, format!("{clusters} clusters"))?;
    ensure(
        matches!(&report.verdict, Verdict::MultipleAccumulation { clusters } if clusters.len() == 2),
        format!("verdict {:?}", report.verdict),
    )?;
    Ok(format!("orbit error {worst:.1e}, 2 clusters"))
}

fn bloch_radius() -> Outcome {
    let budget = SearchBudget::with_depth(5.0);
    let disk = bloch_radius_search(&domain("disk(0,0,0.5)"), &budget).map_err(err)?;
    let diff = (disk.best_inradius - 0.5f64.atanh()).abs();
    ensure(diff < 1e-3, format!("disk inradius {} (off by {diff:e})", disk.best_inradius))?;
    ensure(!disk.verdict.is_witness(), "disk reported as witness")?;
    let horo = bloch_radius_search(&domain("horodisk(0,0.5)"), &budget).map_err(err)?;
    let r = match horo.verdict {
        hypdisk::bloch::BlochVerdict::NonBlochWitness { radius } if radius >= 3.0 => radius,
        v => return Err(format!("horodisk verdict {v:?}")),
    };
    let dense = bloch_radius_search(&domain("rdense(0.5,4)"), &budget).map_err(err)?;
    ensure(dense.best_inradius <= 0.55, format!("rdense inradius {}", dense.best_inradius))?;
    ensure(!dense.verdict.is_witness(), "rdense reported as witness")?;
    Ok(format!(
        "disk {:.6}, horodisk witness {r:.3}, rdense {:.4}",
        disk.best_inradius, dense.best_inradius
    ))
}

fn radial_stretch() -> Outcome {
    let budget = SearchBudget::with_depth(5.0);
    let mut parts = Vec::new();
    for spec in ["rdense(0.5,4)", "horodisk(0,0.5)"] {
        let x = domain(spec);
        let original = bloch_radius_search(&x, &budget).map_err(err)?;
        for k in [1.0, 2.0, 4.0] {
            let r = qc_image_experiment(&x, k, &budget).map_err(err)?;
            ensure(
                r.verdict.is_witness() == original.verdict.is_witness(),
                format!("{spec}, K = {k}: {} vs {}", r.verdict.name(), original.verdict.name()),
            )?;
            if k == 1.0 {
                ensure(r == original, format!("{spec}: K = 1 report differs"))?;
            }
        }
        parts.push(format!("{spec} {}", original.verdict.name()));
    }
    Ok(format!("{} preserved for K = 1, 2, 4", parts.join(", ")))
}

fn run_scenario(config: &str, dir: &Path) -> Result<(Vec<u8>, Vec<u8>), String> {
    let cfg = parse_config(config).map_err(err)?;
    let out = execute(&cfg).map_err(err)?;
    emit_outputs(&out, dir).map_err(err)?;
    let read = |name: &str| fs::read(dir.join(name)).map_err(err);
    Ok((read("trace.csv")?, read("report.json")?))
}

fn determinism() -> Outcome {
    let scenarios = [
        r#"{"command":"ifs-run","domain":"disk(0,0,0.3)","seed":7}"#,
        r#"{"command":"construct-t7","domain":"horodisk(0,0.5)","N":20}"#,
        r#"{"command":"construct-t8","domain":"horodisk(0,0.5)","N":12}"#,
    ];
    for config in scenarios {
        let (d1, d2) = (tempfile::tempdir().map_err(err)?, tempfile::tempdir().map_err(err)?);
        let first = run_scenario(config, d1.path())?;
        let second = run_scenario(config, d2.path())?;
        ensure(!first.0.is_empty() && first.0.iter().filter(|&&b| b == b'\n').count() > 1, "empty trace")?;
        ensure(first.0 == second.0, format!("trace.csv differs for {config}"))?;
        ensure(first.1 == second.1, format!("report.json differs for {config}"))?;
    }
    Ok(format!("{} scenarios byte-identical", scenarios.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("metric and algebra identities", metric_algebra),
        ("preimage asymptotics", preimage_asymptotics),
        ("subdisk metric comparison", lemma1),
        ("relatively compact target", relatively_compact_target),
        ("non-constant limit construction", non_constant_construction),
        ("two accumulation points", two_accumulation_points),
        ("Bloch radius search", bloch_radius),
        ("radial stretch invariance", radial_stretch),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail} ({secs:.1}s)", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail} ({secs:.1}s)", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
