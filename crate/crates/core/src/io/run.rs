use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{Command, ProbeConfig, RunConfig};
use super::report::*;
use crate::bloch::{bloch_radius_search, qc_image_experiment, SearchBudget};
use crate::constructions::{self, ArgumentMode};
use crate::domain::{Domain, DomainModel};
use crate::ifs::{self, DwClass, IfsTrace, ProbeGrid, RunOptions};
use crate::maps::{compose_eval, MapDescriptor};
use crate::{Complex, DiskPoint, Error, Result};

/// Everything a run produces before it is written out.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: Report,
    pub trace: Option<IfsTrace<f64>>,
    pub grid: Option<Vec<GridRow>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub ring: usize,
    pub spoke: usize,
    pub re: f64,
    pub im: f64,
    pub image_re: Option<f64>,
    pub image_im: Option<f64>,
}

#[derive(Serialize)]
struct TraceRow {
    n: usize,
    probe_index: usize,
    re: f64,
    im: f64,
    diameter: f64,
}

fn probe_grid(p: ProbeConfig) -> ProbeGrid<f64> {
    ProbeGrid {
        radius: p.radius,
        rings: p.rings,
        spokes: p.spokes,
    }
}

fn disk_point(p: [f64; 2]) -> Result<DiskPoint> {
    DiskPoint::new(Complex::new(p[0], p[1]))
}

/// Image of the probe grid under `F_N`.
fn grid(seq: &[MapDescriptor<f64>], probe: ProbeConfig) -> Vec<GridRow> {
    let g = probe_grid(probe);
    g.points()
        .into_iter()
        .enumerate()
        .map(|(i, z)| {
            let image = compose_eval(seq, z, seq.len()).ok();
            GridRow {
                ring: i / g.spokes.max(1) + 1,
                spoke: i % g.spokes.max(1),
                re: z.value().re,
                im: z.value().im,
                image_re: image.map(|w| w.value().re),
                image_im: image.map(|w| w.value().im),
            }
        })
        .collect()
}

fn engine(seq: &[MapDescriptor<f64>], cfg: &RunConfig, marked: Vec<DiskPoint>) -> (IfsTrace<f64>, EngineSummary) {
    let tol = cfg.tol.unwrap_or(1e-8);
    let opts = RunOptions {
        probe: probe_grid(cfg.probe.unwrap_or_default()),
        steps: seq.len(),
        tol,
        constant_threshold: tol,
        sustain: 5,
        marked,
    };
    let (trace, report) = ifs::run(seq, &opts);
    let summary = EngineSummary::new(&report, trace.errors.len());
    (trace, summary)
}

fn budget(cfg: &RunConfig) -> SearchBudget<f64> {
    SearchBudget {
        witness_threshold: cfg.threshold,
        ..SearchBudget::with_depth(cfg.depth.unwrap_or(5.0))
    }
}

/// Runs the command described by `cfg` (defaults are filled first).
pub fn execute(cfg: &RunConfig) -> Result<RunOutput> {
    let cfg = cfg.clone().with_defaults()?;
    let mut trace = None;
    let mut grid_rows = None;
    let result = match cfg.command {
        Command::Bloch => {
            let x = cfg.domain()?;
            let r = bloch_radius_search(&x, &budget(&cfg))?;
            RunResult::Bloch(BlochSummary::new(x.label(), &r))
        }
        Command::Qc => {
            let x = cfg.domain()?;
            let b = budget(&cfg);
            let original = BlochSummary::new(x.label(), &bloch_radius_search(&x, &b)?);
            let mut images = Vec::new();
            for &k in cfg.stretch.as_deref().unwrap_or_default() {
                let r = qc_image_experiment(&x, k, &b)?;
                let report = BlochSummary::new(format!("stretch({k})[{}]", x.label()), &r);
                images.push(QcRow {
                    stretch: k,
                    consistent: report.is_witness() == original.is_witness(),
                    report,
                });
            }
            RunResult::Qc(QcSummary {
                all_consistent: images.iter().all(|r| r.consistent),
                original,
                images,
            })
        }
        Command::IfsRun => {
            let n = cfg.steps.unwrap_or_default();
            let seq = match &cfg.map {
                Some(_) => vec![cfg.map()?; n],
                None => ifs::random_system(&cfg.domain()?, cfg.seed.unwrap_or_default(), n)?,
            };
            let (t, summary) = engine(&seq, &cfg, Vec::new());
            trace = Some(t);
            grid_rows = Some(grid(&seq, cfg.probe.unwrap_or_default()));
            RunResult::IfsRun(IfsSummary {
                maps: seq.iter().map(|m| m.to_string()).collect(),
                engine: summary,
            })
        }
        Command::Dw => {
            let f = cfg.map()?;
            let n = cfg.steps.unwrap_or_default();
            let r = ifs::denjoy_wolff(&f, disk_point(cfg.z0.unwrap_or_default())?, n, cfg.tol.unwrap_or(1e-10))?;
            grid_rows = Some(grid(&vec![f; r.steps], ProbeConfig::default()));
            RunResult::Dw(DwSummary {
                limit: pair(r.limit),
                class: match r.class {
                    DwClass::Interior => "interior".into(),
                    DwClass::Boundary => "boundary".into(),
                },
                steps: r.steps,
            })
        }
        Command::ConstructT7 => {
            let x = cfg.domain()?;
            let pts = cfg.points.clone().unwrap_or_default();
            let b = constructions::theorem7_build(&x, disk_point(pts[0])?, disk_point(pts[1])?, cfg.steps.unwrap_or_default())?;
            let (t, summary) = engine(&b.maps, &cfg, Vec::new());
            trace = Some(t);
            grid_rows = Some(grid(&b.maps, cfg.probe.unwrap_or_default()));
            RunResult::ConstructT7(t7_summary(&x, &b, summary))
        }
        Command::ConstructT8 => {
            let x = cfg.domain()?;
            let pts = cfg.points.clone().unwrap_or_default();
            let (base, first) = (disk_point(pts[0])?, disk_point(pts[1])?);
            let b = constructions::theorem8_build(&x, base, first, cfg.steps.unwrap_or_default())?;
            let orbit = (0..=b.maps.len())
                .map(|n| compose_eval(&b.maps, base, n).map(point))
                .collect::<Result<Vec<_>>>()?;
            let (t, summary) = engine(&b.maps, &cfg, vec![base]);
            trace = Some(t);
            grid_rows = Some(grid(&b.maps, cfg.probe.unwrap_or_default()));
            RunResult::ConstructT8(T8Summary {
                domain: x.label(),
                base: point(base),
                first: point(first),
                steps: b
                    .states
                    .iter()
                    .map(|s| T8Step {
                        n: s.n,
                        a: point(s.a),
                        theta: s.theta,
                        rho_to_base: s.rho_to_base,
                        rho_x_prev: s.rho_x_prev,
                        map: s.map.to_string(),
                        checks: T8Checks {
                            preimages: s.checks[0],
                            inside: s.checks[1],
                            isometric: s.checks[2],
                        },
                    })
                    .collect(),
                orbit,
                engine: summary,
            })
        }
        Command::VerifyLemmas => RunResult::VerifyLemmas(lemmas(&cfg)?),
    };
    let mut echoed = cfg;
    // the output location is not part of the result
    echoed.out = None;
    Ok(RunOutput {
        report: Report {
            config: echoed,
            result,
        },
        trace,
        grid: grid_rows,
    })
}

fn t7_summary(x: &Domain<f64>, b: &constructions::Theorem7Build<f64>, engine: EngineSummary) -> T7Summary {
    T7Summary {
        domain: x.label(),
        a0: point(b.a0),
        w0: point(b.w0),
        rho_c0: b.rho_c0,
        steps: b
            .states
            .iter()
            .map(|s| T7Step {
                n: s.n,
                t: s.t,
                a: point(s.a),
                w: point(s.w),
                w_tilde: point(s.w_tilde),
                c_prev: point(s.c_prev),
                theta: s.theta,
                inradius: s.inradius,
                epsilon: s.epsilon,
                product: s.product,
                product_sq: s.product_sq,
                rho_aw: s.rho_aw,
                rho_x_aw: s.rho_x_aw,
                rho_origin_w_tilde: s.rho_origin_w_tilde,
                map: s.map.to_string(),
                checks: s.checks.into(),
            })
            .collect(),
        final_origin: point(b.final_origin),
        final_marked: point(b.final_marked),
        engine,
    }
}

fn lemmas(cfg: &RunConfig) -> Result<LemmaSummary> {
    let which = cfg.lemmas.clone().unwrap_or_default();
    let mut out = LemmaSummary {
        lemma1: None,
        lemma1_decreasing: None,
        lemma2: None,
    };
    if which.contains(&1) {
        let samples = cfg.samples.unwrap_or(1000);
        let rows = cfg
            .radii
            .as_deref()
            .unwrap_or_default()
            .iter()
            .map(|&c| {
                constructions::lemma1_verify(c, samples).map(|r| Lemma1Json {
                    big_radius: r.big_radius,
                    euclidean_radius: r.euclidean_radius,
                    epsilon_hat: r.epsilon_hat,
                    domination_holds: r.domination_holds,
                    samples: r.samples,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.lemma1_decreasing = Some(rows.windows(2).all(|w| w[1].epsilon_hat < w[0].epsilon_hat));
        out.lemma1 = Some(rows);
    }
    if which.contains(&2) {
        let args = match cfg.seed {
            Some(s) => ArgumentMode::Seeded(s),
            None => ArgumentMode::Fixed(0.0),
        };
        let c = disk_point(cfg.c.unwrap_or([0.3, 0.0]))?;
        let r = constructions::lemma2_verify(c, cfg.moduli.as_deref().unwrap_or_default(), args)?;
        out.lemma2 = Some(Lemma2Json {
            c: point(r.c),
            rho_origin_c: r.rho_origin_c,
            rows: r
                .rows
                .iter()
                .map(|row| Lemma2RowJson {
                    modulus: row.modulus,
                    a: point(row.a),
                    z1: point(row.z1),
                    z2: point(row.z2),
                    rho_origin_z1: row.rho_origin_z1,
                    rho_a_z2: row.rho_a_z2,
                    gap: row.gap,
                })
                .collect(),
            identity_error: r.identity_error,
            gaps_decreasing: r.gaps_decreasing,
            converged: r.converged,
        });
    }
    Ok(out)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e.to_string()),
    }
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(csv_err(path))
}

/// Writes `report.json`, `trace.csv` (header only when the run has no
/// trace) and, for runs with a map sequence, `grid.csv` into `dir`.
pub fn emit_outputs(out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();

    let report_path = dir.join("report.json");
    fs::write(&report_path, out.report.to_json()).map_err(io_err(&report_path))?;
    written.push(report_path);

    let trace_path = dir.join("trace.csv");
    {
        let mut w = writer(&trace_path)?;
        w.write_record(["n", "probe_index", "re", "im", "diameter"])
            .map_err(csv_err(&trace_path))?;
        if let Some(trace) = &out.trace {
            for step in &trace.steps {
                for (i, v) in step.values.iter().enumerate() {
                    let Some(v) = v else { continue };
                    let row = TraceRow {
                        n: step.n,
                        probe_index: i,
                        re: v.re,
                        im: v.im,
                        diameter: step.diameter,
                    };
                    w.serialize(row).map_err(csv_err(&trace_path))?;
                }
            }
        }
        w.flush().map_err(io_err(&trace_path))?;
    }
    written.push(trace_path);

    if let Some(rows) = &out.grid {
        let grid_path = dir.join("grid.csv");
        let mut w = writer(&grid_path)?;
        w.write_record(["ring", "spoke", "re", "im", "image_re", "image_im"])
            .map_err(csv_err(&grid_path))?;
        for row in rows {
            w.serialize(row).map_err(csv_err(&grid_path))?;
        }
        w.flush().map_err(io_err(&grid_path))?;
        written.push(grid_path);
    }
    Ok(written)
}
