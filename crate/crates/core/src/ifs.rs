//! Iterated function systems `F_n = f_1 ∘ … ∘ f_n`.
//!
//! [`run`] evaluates `F_n` on a polar probe grid of a compact hyperbolic
//! disk `K = {ρ(0, z) ≤ ρ₀}`, records the ρ-diameter of `F_n(K)`, checks the
//! Schwarz–Pick contraction on every pair of probes and classifies the
//! limiting behaviour. [`denjoy_wolff`] and [`random_system`] are the two
//! classical baselines.

use std::time::{Duration, Instant};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::domain::DomainModel;
use crate::hyperbolic::{point_at, rho, Blaschke2, DiskPoint, MobiusAut};
use crate::maps::{compose_eval, MapDescriptor, Piece};
use crate::{Error, Result, Scalar};

/// Polar grid on `{ρ(0, z) ≤ radius}`: rings at `radius·i/rings`
/// (`i = 1..=rings`) times `spokes` equally spaced angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeGrid<T> {
    pub radius: T,
    pub rings: usize,
    pub spokes: usize,
}

impl<T: Scalar> Default for ProbeGrid<T> {
    fn default() -> Self {
        ProbeGrid {
            radius: T::lit(1.2),
            rings: 24,
            spokes: 24,
        }
    }
}

impl<T: Scalar> ProbeGrid<T> {
    pub fn points(&self) -> Vec<DiskPoint<T>> {
        let mut out = Vec::with_capacity(self.rings * self.spokes);
        for i in 1..=self.rings {
            let r = self.radius * T::from_usize(i).unwrap() / T::from_usize(self.rings).unwrap();
            for j in 0..self.spokes {
                let angle = T::TAU() * T::from_usize(j).unwrap() / T::from_usize(self.spokes).unwrap();
                out.push(point_at(DiskPoint::origin(), angle, r));
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions<T> {
    pub probe: ProbeGrid<T>,
    pub steps: usize,
    /// Cluster tolerance; single linkage uses `10·tol`.
    pub tol: T,
    /// `ConstantLimit` needs the diameter below this for `sustain` steps.
    pub constant_threshold: T,
    pub sustain: usize,
    /// Extra points whose orbits `F_n(p)` are recorded and clustered.
    pub marked: Vec<DiskPoint<T>>,
}

impl<T: Scalar> Default for RunOptions<T> {
    fn default() -> Self {
        RunOptions {
            probe: ProbeGrid::default(),
            steps: 50,
            tol: T::lit(1e-8),
            constant_threshold: T::lit(1e-8),
            sustain: 5,
            marked: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StepRecord<T> {
    pub n: usize,
    /// `F_n` on the probe grid; `None` where the orbit hit the boundary guard.
    pub values: Vec<Option<Complex<T>>>,
    pub diameter: T,
    pub marked: Vec<Option<Complex<T>>>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct PointError {
    pub n: usize,
    pub probe_index: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct IfsTrace<T> {
    pub probes: Vec<DiskPoint<T>>,
    pub steps: Vec<StepRecord<T>>,
    pub errors: Vec<PointError>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<T> {
    ConstantLimit { value: Complex<T> },
    NonConstant { diameter_floor: T },
    MultipleAccumulation { clusters: Vec<Complex<T>> },
    Undecided,
}

impl<T> Verdict<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::ConstantLimit { .. } => "ConstantLimit",
            Verdict::NonConstant { .. } => "NonConstant",
            Verdict::MultipleAccumulation { .. } => "MultipleAccumulation",
            Verdict::Undecided => "Undecided",
        }
    }
}

/// Cluster of orbit values of one marked point.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster<T> {
    pub center: Complex<T>,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport<T> {
    pub verdict: Verdict<T>,
    pub diameters: Vec<T>,
    /// Per marked point, clusters of `F_n(p)` over `n ≥ 1`.
    pub marked_clusters: Vec<Vec<Cluster<T>>>,
    pub schwarz_pick_ok: bool,
    pub composition_consistent: bool,
}

/// Runs the system for `opts.steps` steps (bounded by `seq.len()`).
///
/// Each `F_n` is evaluated directly on every probe, so the cost is
/// `O(N²·|probe|)` map evaluations.
pub fn run<T: Scalar>(seq: &[MapDescriptor<T>], opts: &RunOptions<T>) -> (IfsTrace<T>, ConvergenceReport<T>) {
    let steps = opts.steps.min(seq.len());
    let probes = opts.probe.points();
    let base_rho = pair_matrix(&probes);
    let slack = T::lit(1e-9);

    let mut trace = IfsTrace {
        probes: probes.clone(),
        steps: Vec::with_capacity(steps + 1),
        errors: Vec::new(),
    };
    let mut schwarz_pick_ok = true;
    let mut composition_consistent = true;

    for n in 0..=steps {
        let started = Instant::now();
        let evaluated: Vec<Result<DiskPoint<T>>> =
            probes.par_iter().map(|&z| compose_eval(seq, z, n)).collect();
        let mut values = Vec::with_capacity(evaluated.len());
        for (i, r) in evaluated.into_iter().enumerate() {
            match r {
                Ok(w) => values.push(Some(w.value())),
                Err(e) => {
                    trace.errors.push(PointError {
                        n,
                        probe_index: i,
                        message: e.to_string(),
                    });
                    values.push(None);
                }
            }
        }
        if n > 0 {
            // F_n(z) = F_{n−1}(f_n(z)) on a thinned subset of probes
            for (i, z) in probes.iter().enumerate().step_by(7) {
                let (Some(v), Ok(inner)) = (values[i], seq[n - 1].apply(*z)) else {
                    continue;
                };
                if let Ok(w) = compose_eval(seq, inner, n - 1) {
                    if (w.value() - v).norm() > T::lit(1e-10) {
                        composition_consistent = false;
                    }
                }
            }
        }
        let (diameter, contracts) = diameter_and_contraction(&values, &base_rho, slack);
        schwarz_pick_ok &= contracts || n == 0;
        let marked = opts
            .marked
            .iter()
            .map(|&p| compose_eval(seq, p, n).ok().map(|w| w.value()))
            .collect();
        trace.steps.push(StepRecord {
            n,
            values,
            diameter,
            marked,
            elapsed: started.elapsed(),
        });
    }

    let report = classify(&trace, opts, schwarz_pick_ok, composition_consistent);
    (trace, report)
}

fn pair_matrix<T: Scalar>(pts: &[DiskPoint<T>]) -> Vec<Vec<T>> {
    pts.par_iter()
        .map(|&p| pts.iter().map(|&q| rho(p, q)).collect())
        .collect()
}

fn diameter_and_contraction<T: Scalar>(values: &[Option<Complex<T>>], base: &[Vec<T>], slack: T) -> (T, bool) {
    let rows: Vec<(T, bool)> = (0..values.len())
        .into_par_iter()
        .map(|i| {
            let Some(vi) = values[i] else {
                return (T::zero(), true);
            };
            let vi = DiskPoint::trusted(vi);
            let mut diam = T::zero();
            let mut ok = true;
            for j in (i + 1)..values.len() {
                let Some(vj) = values[j] else { continue };
                let d = rho(vi, DiskPoint::trusted(vj));
                diam = diam.max(d);
                if d > base[i][j] * (T::one() + slack) + slack {
                    ok = false;
                }
            }
            (diam, ok)
        })
        .collect();
    rows.into_iter()
        .fold((T::zero(), true), |(d, ok), (di, oki)| (d.max(di), ok && oki))
}

/// Single-linkage clustering of `values` under the ρ-distance.
pub fn cluster_values<T: Scalar>(values: &[(usize, Complex<T>)], link: T) -> Vec<Cluster<T>> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        let mut k = i;
        while label[k] != r {
            let next = label[k];
            label[k] = r;
            k = next;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let d = rho(DiskPoint::trusted(values[i].1), DiskPoint::trusted(values[j].1));
            if d <= link {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut clusters: Vec<(usize, Cluster<T>)> = Vec::new();
    for i in 0..n {
        let root = find(&mut label, i);
        match clusters.iter_mut().find(|(r, _)| *r == root) {
            Some((_, c)) => c.members.push(values[i].0),
            None => clusters.push((
                root,
                Cluster {
                    center: values[i].1,
                    members: vec![values[i].0],
                },
            )),
        }
    }
    clusters.into_iter().map(|(_, c)| c).collect()
}

fn classify<T: Scalar>(
    trace: &IfsTrace<T>,
    opts: &RunOptions<T>,
    schwarz_pick_ok: bool,
    composition_consistent: bool,
) -> ConvergenceReport<T> {
    let diameters: Vec<T> = trace.steps.iter().map(|s| s.diameter).collect();
    let link = opts.tol * T::lit(10.0);
    let marked_clusters: Vec<Vec<Cluster<T>>> = (0..opts.marked.len())
        .map(|k| {
            let vals: Vec<(usize, Complex<T>)> = trace
                .steps
                .iter()
                .filter(|s| s.n >= 1)
                .filter_map(|s| s.marked[k].map(|v| (s.n, v)))
                .collect();
            cluster_values(&vals, link)
        })
        .collect();
    let verdict = decide(trace, opts, &diameters, &marked_clusters);
    ConvergenceReport {
        verdict,
        diameters,
        marked_clusters,
        schwarz_pick_ok,
        composition_consistent,
    }
}

fn decide<T: Scalar>(
    trace: &IfsTrace<T>,
    opts: &RunOptions<T>,
    diameters: &[T],
    marked_clusters: &[Vec<Cluster<T>>],
) -> Verdict<T> {
    let last = trace.steps.last();
    let has_probes = last.is_some_and(|s| s.values.iter().any(Option::is_some));
    if has_probes && diameters.len() > opts.sustain {
        let tail = &diameters[diameters.len() - opts.sustain..];
        if tail.iter().all(|&d| d < opts.constant_threshold) {
            let vals: Vec<Complex<T>> = last.unwrap().values.iter().flatten().copied().collect();
            let count = T::from_usize(vals.len()).unwrap();
            let sum = vals.iter().fold(Complex::new(T::zero(), T::zero()), |a, &v| a + v);
            return Verdict::ConstantLimit { value: sum / count };
        }
    }
    for clusters in marked_clusters {
        let recurring: Vec<Complex<T>> = clusters
            .iter()
            .filter(|c| c.members.len() >= 2)
            .map(|c| c.center)
            .collect();
        if recurring.len() >= 2 {
            return Verdict::MultipleAccumulation { clusters: recurring };
        }
    }
    if !has_probes || diameters.len() < 3 {
        return Verdict::Undecided;
    }
    // second half of the run; a floor that is still shrinking geometrically
    // is not evidence of a non-constant limit
    let tail = &diameters[diameters.len() / 2..];
    let floor = tail.iter().copied().fold(T::infinity(), T::min);
    let first = tail[0];
    let lastd = *tail.last().unwrap();
    let span = T::from_usize(tail.len() - 1).unwrap().max(T::one());
    let ratio = if first > T::zero() {
        (lastd / first).powf(T::one() / span)
    } else {
        T::zero()
    };
    if floor > opts.constant_threshold * T::lit(100.0) && ratio >= T::lit(0.99) {
        Verdict::NonConstant { diameter_floor: floor }
    } else {
        Verdict::Undecided
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DwClass {
    Interior,
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DwResult<T> {
    pub limit: Complex<T>,
    pub class: DwClass,
    pub steps: usize,
}

/// Iterates `f` from `z0` until successive iterates differ by less than `tol`.
///
/// The limit is refined with Aitken's Δ² step; it is classified as a
/// boundary point when `1 − |limit| ≤ 10·tol` or when the orbit reaches the
/// boundary guard.
pub fn denjoy_wolff<T: Scalar>(f: &MapDescriptor<T>, z0: DiskPoint<T>, max_steps: usize, tol: T) -> Result<DwResult<T>> {
    if f.is_automorphism() {
        return Err(Error::Automorphism);
    }
    let boundary = |z: Complex<T>, steps| {
        let n = z.norm();
        let limit = if n > T::zero() { z / n } else { z };
        Ok(DwResult {
            limit,
            class: DwClass::Boundary,
            steps,
        })
    };
    let mut prev2: Option<Complex<T>> = None;
    let mut prev = z0.value();
    let mut z = z0;
    let mut last_step = T::infinity();
    for k in 1..=max_steps {
        let next = match f.apply(z) {
            Ok(w) => w,
            Err(Error::BoundaryGuard { re, im }) => {
                return boundary(Complex::new(T::lit(re), T::lit(im)), k);
            }
            Err(e) => return Err(e),
        };
        let w = next.value();
        last_step = (w - prev).norm();
        if last_step < tol {
            let mut limit = w;
            if let Some(p2) = prev2 {
                let d1 = prev - p2;
                let d2 = w - prev;
                let den = d2 - d1;
                if den.norm() > T::zero() {
                    let est = w - d2 * d2 / den;
                    if est.re.is_finite() && est.im.is_finite() && (est - w).norm() < T::lit(1e3) * tol {
                        limit = est;
                    }
                }
            }
            let n = limit.norm();
            if T::one() - n <= T::lit(10.0) * tol {
                return boundary(limit, k);
            }
            return Ok(DwResult {
                limit,
                class: DwClass::Interior,
                steps: k,
            });
        }
        prev2 = Some(prev);
        prev = w;
        z = next;
    }
    Err(Error::Undecided {
        steps: max_steps,
        last_step: last_step.to_f64_lossy(),
    })
}

/// `n` maps `f_i = φ ∘ b_i` into a simply connected domain, where `φ` is the
/// Riemann map and each `b_i` is a seeded random automorphism or degree-2
/// Blaschke product.
pub fn random_system<T: Scalar, D: DomainModel<T> + ?Sized>(domain: &D, seed: u64, n: usize) -> Result<Vec<MapDescriptor<T>>> {
    let phi = domain.riemann().ok_or_else(|| Error::NoRiemannMap(domain.label()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let modulus: f64 = rng.gen_range(0.05..0.95);
        let arg: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let a = DiskPoint::new(Complex::from_polar(T::lit(modulus), T::lit(arg)))?;
        let inner = if rng.gen_bool(0.5) {
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            Piece::Mobius(MobiusAut::new(a, T::lit(theta)))
        } else {
            Piece::Blaschke(Blaschke2::new(a)?)
        };
        out.push(MapDescriptor::into_domain(vec![inner, Piece::RiemannTo(phi)], domain)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use approx::assert_abs_diff_eq;

    type P = DiskPoint<f64>;

    fn small_opts(steps: usize) -> RunOptions<f64> {
        RunOptions {
            probe: ProbeGrid {
                radius: 1.2,
                rings: 6,
                spokes: 8,
            },
            steps,
            ..RunOptions::default()
        }
    }

    #[test]
    fn probe_grid_stays_in_compact_set() {
        let g = ProbeGrid::<f64>::default();
        let pts = g.points();
        assert_eq!(pts.len(), 576);
        for p in pts {
            assert!(rho(P::origin(), p) <= 1.2 + 1e-12);
        }
        assert!(ProbeGrid::<f64> { radius: 1.2, rings: 0, spokes: 24 }.points().is_empty());
    }

    #[test]
    fn relatively_compact_system_has_constant_limit() {
        let x = Domain::<f64>::parse("disk(0,0,0.3)").unwrap();
        let seq = random_system(&x, 17, 50).unwrap();
        let (trace, report) = run(&seq, &small_opts(50));
        assert!(matches!(report.verdict, Verdict::ConstantLimit { .. }), "{:?}", report.verdict);
        assert!(trace.steps[50].diameter < 1e-6);
        assert!(report.schwarz_pick_ok && report.composition_consistent);
        // geometric decay bounded by the Lipschitz constant of z ↦ 0.3z
        for w in report.diameters.windows(2).take(15) {
            assert!(w[1] <= 0.3 * w[0] + 1e-15, "{w:?}");
        }
    }

    #[test]
    fn identity_system_is_not_constant() {
        let id = MapDescriptor::new(vec![Piece::Mobius(MobiusAut::identity())]);
        let seq = vec![id; 10];
        let (_, report) = run(&seq, &small_opts(10));
        match report.verdict {
            Verdict::NonConstant { diameter_floor } => assert_abs_diff_eq!(diameter_floor, report.diameters[0], epsilon = 1e-12),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn alternating_marked_orbit_gives_two_clusters() {
        // a rotation by π swaps ±0.3 on every step
        let flip = MapDescriptor::new(vec![Piece::Mobius(MobiusAut::rotation(std::f64::consts::PI))]);
        let seq = vec![flip; 8];
        let mut opts = small_opts(8);
        opts.marked = vec![P::real(0.3)];
        let (trace, report) = run(&seq, &opts);
        assert_eq!(trace.steps.len(), 9);
        match &report.verdict {
            Verdict::MultipleAccumulation { clusters } => assert_eq!(clusters.len(), 2),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn empty_probe_grid() {
        let id = MapDescriptor::new(vec![Piece::Power(2)]);
        let mut opts = small_opts(3);
        opts.probe.rings = 0;
        let (trace, report) = run(&[id.clone(), id.clone(), id], &opts);
        assert!(trace.steps.iter().all(|s| s.values.is_empty()));
        assert_eq!(report.verdict, Verdict::Undecided);
    }

    #[test]
    fn denjoy_wolff_examples() {
        let sq = MapDescriptor::<f64>::parse("power(2)").unwrap();
        let r = denjoy_wolff(&sq, P::real(0.5), 1000, 1e-10).unwrap();
        assert!(r.limit.norm() < 1e-9);
        assert_eq!(r.class, DwClass::Interior);

        let aff = MapDescriptor::<f64>::parse("affine(0.5,0.2)").unwrap();
        let r = denjoy_wolff(&aff, P::real(0.1), 1000, 1e-10).unwrap();
        assert_abs_diff_eq!(r.limit.re, 0.4, epsilon = 1e-10);
        assert_abs_diff_eq!(r.limit.im, 0.0, epsilon = 1e-10);

        let half = MapDescriptor::<f64>::parse("affine(0.5,0.5)").unwrap();
        let r = denjoy_wolff(&half, P::real(0.0), 1000, 1e-10).unwrap();
        assert_eq!(r.class, DwClass::Boundary);
        assert_abs_diff_eq!(r.limit.re, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn denjoy_wolff_rejects_automorphisms_and_reports_undecided() {
        let m = MapDescriptor::<f64>::parse("mobius(0.3,0.1,1.0)").unwrap();
        assert!(matches!(denjoy_wolff(&m, P::origin(), 100, 1e-10), Err(Error::Automorphism)));
        // parabolic-like slow approach: z ↦ (1+z)/2 needs ~35 steps for 1e-10
        let half = MapDescriptor::<f64>::parse("affine(0.5,0.5)").unwrap();
        assert!(matches!(denjoy_wolff(&half, P::origin(), 5, 1e-10), Err(Error::Undecided { .. })));
    }

    #[test]
    fn denjoy_wolff_limit_independent_of_start() {
        let f = MapDescriptor::<f64>::parse("blaschke(0.5,0.2);affine(0.6,0.1)").unwrap();
        let reference = denjoy_wolff(&f, P::origin(), 10_000, 1e-12).unwrap().limit;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10 {
            let z0 = P::new(Complex::from_polar(rng.gen::<f64>() * 0.95, rng.gen_range(0.0..6.3))).unwrap();
            let r = denjoy_wolff(&f, z0, 10_000, 1e-12).unwrap();
            assert!((r.limit - reference).norm() < 1e-10);
        }
    }

    #[test]
    fn random_system_is_reproducible_and_lands_in_domain() {
        let x = Domain::<f64>::parse("disk(0,0,0.3)").unwrap();
        let a = random_system(&x, 3, 20).unwrap();
        let b = random_system(&x, 3, 20).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_system(&x, 4, 20).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for f in &a {
            for _ in 0..1000 {
                let z = P::new(Complex::from_polar(rng.gen::<f64>().sqrt() * 0.9999, rng.gen_range(0.0..6.3))).unwrap();
                assert!(x.contains_point(f.apply(z).unwrap()));
            }
        }
        let r = Domain::<f64>::parse("rdense(0.5,2)").unwrap();
        assert!(random_system(&r, 1, 3).is_err());
    }

    #[test]
    fn clustering_links_chains() {
        let vals: Vec<(usize, Complex<f64>)> = vec![
            (1, Complex::new(0.0, 0.0)),
            (2, Complex::new(5e-8, 0.0)),
            (3, Complex::new(0.5, 0.0)),
            (4, Complex::new(1e-7, 0.0)),
        ];
        let c = cluster_values(&vals, 1e-7);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].members, vec![1, 2, 4]);
    }
}
