//! Serialized report types. Complex numbers are `[re, im]` pairs, angles are
//! radians and distances are in ρ-units.

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::bloch::{BlochReport, BlochVerdict, SearchBudget};
use crate::ifs::{ConvergenceReport, Verdict};
use crate::{Complex, DiskPoint};

pub type Pair = [f64; 2];

pub(crate) fn pair(z: Complex<f64>) -> Pair {
    [z.re, z.im]
}

pub(crate) fn point(z: DiskPoint) -> Pair {
    pair(z.value())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub config: RunConfig,
    pub result: RunResult,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunResult {
    Bloch(BlochSummary),
    Qc(QcSummary),
    IfsRun(IfsSummary),
    Dw(DwSummary),
    ConstructT7(T7Summary),
    ConstructT8(T8Summary),
    VerifyLemmas(LemmaSummary),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetJson {
    pub depth: f64,
    pub radial_step: f64,
    pub angular_spacing: f64,
    pub max_ring_points: usize,
    pub refine_rounds: usize,
    pub trust_radius: f64,
    pub witness_threshold: f64,
    pub witness_samples: usize,
}

impl From<&SearchBudget<f64>> for BudgetJson {
    fn from(b: &SearchBudget<f64>) -> Self {
        BudgetJson {
            depth: b.depth,
            radial_step: b.radial_step,
            angular_spacing: b.angular_spacing,
            max_ring_points: b.max_ring_points,
            refine_rounds: b.refine_rounds,
            trust_radius: b.trust_radius,
            witness_threshold: b.threshold(),
            witness_samples: b.witness_samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BlochVerdictJson {
    BlochUpTo { bound: f64 },
    NonBlochWitness { radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochSummary {
    pub domain: String,
    pub center: Pair,
    pub inradius: f64,
    pub verdict: BlochVerdictJson,
    pub budget: BudgetJson,
    pub centers_evaluated: usize,
}

impl BlochSummary {
    pub fn new(domain: String, r: &BlochReport<f64>) -> Self {
        BlochSummary {
            domain,
            center: point(r.best_center),
            inradius: r.best_inradius,
            verdict: match r.verdict {
                BlochVerdict::BlochUpTo { bound } => BlochVerdictJson::BlochUpTo { bound },
                BlochVerdict::NonBlochWitness { radius } => BlochVerdictJson::NonBlochWitness { radius },
            },
            budget: (&r.budget).into(),
            centers_evaluated: r.centers_evaluated,
        }
    }

    pub fn is_witness(&self) -> bool {
        matches!(self.verdict, BlochVerdictJson::NonBlochWitness { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QcRow {
    #[serde(rename = "K")]
    pub stretch: f64,
    pub report: BlochSummary,
    /// Same witness/bounded classification as the original domain.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QcSummary {
    pub original: BlochSummary,
    pub images: Vec<QcRow>,
    pub all_consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum VerdictJson {
    ConstantLimit { value: Pair },
    NonConstant { diameter_floor: f64 },
    MultipleAccumulation { clusters: Vec<Pair> },
    Undecided,
}

impl From<&Verdict<f64>> for VerdictJson {
    fn from(v: &Verdict<f64>) -> Self {
        match v {
            Verdict::ConstantLimit { value } => VerdictJson::ConstantLimit { value: pair(*value) },
            Verdict::NonConstant { diameter_floor } => VerdictJson::NonConstant {
                diameter_floor: *diameter_floor,
            },
            Verdict::MultipleAccumulation { clusters } => VerdictJson::MultipleAccumulation {
                clusters: clusters.iter().map(|&c| pair(c)).collect(),
            },
            Verdict::Undecided => VerdictJson::Undecided,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterJson {
    pub center: Pair,
    pub steps: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineSummary {
    pub verdict: VerdictJson,
    pub diameters: Vec<f64>,
    pub schwarz_pick_ok: bool,
    pub composition_consistent: bool,
    pub point_errors: usize,
    /// Per marked point.
    pub clusters: Vec<Vec<ClusterJson>>,
}

impl EngineSummary {
    pub fn new(r: &ConvergenceReport<f64>, point_errors: usize) -> Self {
        EngineSummary {
            verdict: (&r.verdict).into(),
            diameters: r.diameters.clone(),
            schwarz_pick_ok: r.schwarz_pick_ok,
            composition_consistent: r.composition_consistent,
            point_errors,
            clusters: r
                .marked_clusters
                .iter()
                .map(|cs| {
                    cs.iter()
                        .map(|c| ClusterJson {
                            center: pair(c.center),
                            steps: c.members.clone(),
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfsSummary {
    pub maps: Vec<String>,
    pub engine: EngineSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DwSummary {
    pub limit: Pair,
    pub class: String,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct T7Checks {
    pub preimages: bool,
    pub proximity: bool,
    pub intrinsic: bool,
    pub confinement: bool,
    pub intrinsic_confinement: bool,
}

impl From<[bool; 5]> for T7Checks {
    fn from(c: [bool; 5]) -> Self {
        T7Checks {
            preimages: c[0],
            proximity: c[1],
            intrinsic: c[2],
            confinement: c[3],
            intrinsic_confinement: c[4],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct T7Step {
    pub n: usize,
    pub t: f64,
    pub a: Pair,
    pub w: Pair,
    pub w_tilde: Pair,
    pub c_prev: Pair,
    pub theta: f64,
    pub inradius: f64,
    pub epsilon: f64,
    pub product: f64,
    pub product_sq: f64,
    pub rho_aw: f64,
    pub rho_x_aw: f64,
    pub rho_origin_w_tilde: f64,
    pub map: String,
    pub checks: T7Checks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct T7Summary {
    pub domain: String,
    pub a0: Pair,
    pub w0: Pair,
    pub rho_c0: f64,
    pub steps: Vec<T7Step>,
    pub final_origin: Pair,
    pub final_marked: Pair,
    pub engine: EngineSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct T8Checks {
    pub preimages: bool,
    pub inside: bool,
    pub isometric: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct T8Step {
    pub n: usize,
    pub a: Pair,
    pub theta: f64,
    pub rho_to_base: f64,
    pub rho_x_prev: f64,
    pub map: String,
    pub checks: T8Checks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct T8Summary {
    pub domain: String,
    pub base: Pair,
    pub first: Pair,
    pub steps: Vec<T8Step>,
    /// `F_n(base)` for `n = 0..=N`.
    pub orbit: Vec<Pair>,
    pub engine: EngineSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lemma1Json {
    #[serde(rename = "C")]
    pub big_radius: f64,
    pub euclidean_radius: f64,
    pub epsilon_hat: f64,
    pub domination_holds: bool,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lemma2RowJson {
    pub modulus: f64,
    pub a: Pair,
    pub z1: Pair,
    pub z2: Pair,
    pub rho_origin_z1: f64,
    pub rho_a_z2: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lemma2Json {
    pub c: Pair,
    pub rho_origin_c: f64,
    pub rows: Vec<Lemma2RowJson>,
    pub identity_error: f64,
    pub gaps_decreasing: bool,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaSummary {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma1: Option<Vec<Lemma1Json>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma1_decreasing: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma2: Option<Lemma2Json>,
}
