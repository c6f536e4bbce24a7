//! Map sequences with prescribed limit behaviour on non-Bloch domains.
//!
//! [`theorem7_build`] produces `f_n = π_n ∘ A_{a_n}` whose left compositions
//! keep two marked points at a fixed positive distance, so the system has a
//! non-constant accumulation point. [`theorem8_build`] produces covering
//! maps whose compositions alternate between two values at a fixed point.
//! [`lemma1_verify`] and [`lemma2_verify`] check the two estimates both
//! builders rely on.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{DomainModel, RiemannMap};
use crate::hyperbolic::{point_at, rho, Blaschke2, DiskPoint, MobiusAut};
use crate::maps::{compose_eval, covering_with_basepoint, MapDescriptor, Piece};
use crate::{Error, Result, Scalar};

/// `ε_n = 2^{2^{−(n+1)}} − 1`, so that `∏_{i≥1} (1 + ε_i)² = 2`.
pub fn epsilon_sequence<T: Scalar>(n: usize) -> T {
    assert!(n >= 1, "epsilon_sequence is indexed from 1");
    let exponent = T::lit(2.0).powi(-(n as i32 + 1));
    // exp_m1 keeps the tiny values accurate
    (exponent * T::LN_2()).exp_m1()
}

/// `∏_{i=1}^{n} (1 + ε_i)`.
pub fn epsilon_product<T: Scalar>(n: usize) -> T {
    (1..=n).fold(T::one(), |p, i| p * (T::one() + epsilon_sequence::<T>(i)))
}

const T_START: f64 = 2.0;
const T_CAP: f64 = 60.0;
const T_RESOLUTION: f64 = 1e-3;
const STATE_TOL: f64 = 1e-9;

/// One step of the non-constant-limit construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem7State<T> {
    pub n: usize,
    /// Deep-point parameter chosen for `a_n`.
    pub t: T,
    pub a: DiskPoint<T>,
    pub w: DiskPoint<T>,
    pub w_tilde: DiskPoint<T>,
    /// Lift `c_{n−1}` of `w_{n−1}` under `π_n`.
    pub c_prev: DiskPoint<T>,
    pub theta: T,
    pub inradius: T,
    pub epsilon: T,
    /// `∏_{i≤n} (1 + ε_i)`.
    pub product: T,
    pub product_sq: T,
    pub rho_aw: T,
    pub rho_x_aw: T,
    pub rho_origin_w_tilde: T,
    pub map: MapDescriptor<T>,
    /// The five per-step relations, in order: preimage identities, the
    /// proximity bound, the intrinsic bound, confinement of `w̃_n` and
    /// confinement of `ρ_X(a_n, w_n)`.
    pub checks: [bool; 5],
}

#[derive(Debug, Clone)]
pub struct Theorem7Build<T> {
    pub a0: DiskPoint<T>,
    pub w0: DiskPoint<T>,
    /// `ρ(0, c₀) = ρ_X(a₀, w₀)`.
    pub rho_c0: T,
    pub maps: Vec<MapDescriptor<T>>,
    pub states: Vec<Theorem7State<T>>,
    /// `F_N(0)` and `F_N(w̃_N)`.
    pub final_origin: DiskPoint<T>,
    pub final_marked: DiskPoint<T>,
}

impl<T: Scalar> Theorem7Build<T> {
    pub fn all_checks_pass(&self) -> bool {
        self.states.iter().all(|s| s.checks.iter().all(|&c| c))
    }
}

/// `w0` at intrinsic distance `dist` from `a0`, along the direction `angle`
/// of the Riemann chart at `a0`.
pub fn w0_at_distance<T: Scalar, D: DomainModel<T> + ?Sized>(domain: &D, a0: DiskPoint<T>, dist: T, angle: T) -> Result<DiskPoint<T>> {
    let phi = riemann(domain)?;
    domain.require(a0)?;
    Ok(phi.to(point_at(phi.from(a0)?, angle, dist)))
}

fn riemann<T: Scalar, D: DomainModel<T> + ?Sized>(domain: &D) -> Result<RiemannMap<T>> {
    domain.riemann().ok_or_else(|| Error::NoRiemannMap(domain.label()))
}

struct Candidate<T> {
    t: T,
    a: DiskPoint<T>,
    w: DiskPoint<T>,
    w_tilde: DiskPoint<T>,
    inradius: T,
    rho_aw: T,
    rho_x_aw: T,
    rho_origin_w_tilde: T,
}

/// Per-step targets shared by the search and the checks.
struct StepTargets<T> {
    c: DiskPoint<T>,
    rho_c: T,
    epsilon: T,
    confine: T,
}

fn attempt<T: Scalar, D: DomainModel<T> + ?Sized>(domain: &D, tg: &StepTargets<T>, t: T) -> Result<std::result::Result<Candidate<T>, String>> {
    let a = domain.deep_point(t)?;
    let (z1, z2) = Blaschke2::new(a)?.preimages(tg.c)?;
    let one_eps = T::one() + tg.epsilon;
    let rho_origin_w_tilde = rho(DiskPoint::origin(), z1);
    if !(rho_origin_w_tilde < one_eps * tg.rho_c) {
        return Ok(Err(format!(
            "proximity: rho(0, w~) = {rho_origin_w_tilde} not below (1+eps) rho(0, c) = {}",
            one_eps * tg.rho_c
        )));
    }
    if !(rho_origin_w_tilde < tg.confine) {
        return Ok(Err(format!(
            "confinement: rho(0, w~) = {rho_origin_w_tilde} not below {}",
            tg.confine
        )));
    }
    let inradius = domain.inradius_at(a)?;
    let rho_aw = rho(a, z2);
    if !(inradius > T::one() && inradius > rho_aw && domain.contains_point(z2)) {
        return Ok(Err(format!("inradius {inradius} at a_n does not exceed max(1, rho(a, w) = {rho_aw})")));
    }
    let lemma1 = (rho_aw.tanh() / inradius.tanh()).atanh();
    if !(lemma1 < one_eps * rho_aw) {
        return Ok(Err(format!(
            "subdisk bound: {lemma1} not below (1+eps) rho(a, w) = {}",
            one_eps * rho_aw
        )));
    }
    let rho_x_aw = domain.rho_x(a, z2)?;
    if !(rho_x_aw < one_eps * rho_aw && rho_x_aw < tg.confine) {
        return Ok(Err(format!(
            "intrinsic bound: rho_X(a, w) = {rho_x_aw} exceeds min((1+eps) rho(a, w), {})",
            tg.confine
        )));
    }
    Ok(Ok(Candidate {
        t,
        a,
        w: z2,
        w_tilde: z1,
        inradius,
        rho_aw,
        rho_x_aw,
        rho_origin_w_tilde,
    }))
}

/// Doubles `t` from 2 (capped at 60) until every step condition holds, then
/// bisects back to the smallest passing `t` above the last failure.
fn choose_deep_point<T: Scalar, D: DomainModel<T> + ?Sized>(domain: &D, tg: &StepTargets<T>, step: usize) -> Result<Candidate<T>> {
    let cap = T::lit(T_CAP);
    let mut t = T::lit(T_START);
    let mut lo = t;
    let mut violated;
    let mut found = loop {
        match attempt(domain, tg, t) {
            Ok(Ok(c)) => break c,
            Ok(Err(why)) => violated = why,
            Err(e) => violated = e.to_string(),
        }
        if t >= cap {
            return Err(Error::ConstructionFailed {
                step,
                bound: format!("no deep point up to t = {t}; last violation: {violated}"),
            });
        }
        lo = t;
        t = (t + t).min(cap);
    };
    let mut hi = found.t;
    while hi - lo > T::lit(T_RESOLUTION) {
        let mid = (lo + hi) * T::lit(0.5);
        match attempt(domain, tg, mid) {
            Ok(Ok(c)) => {
                hi = mid;
                found = c;
            }
            _ => lo = mid,
        }
    }
    Ok(found)
}

/// Builds `f_1, …, f_N` with `F_n(0) = a₀` and `F_n(w̃_n) = w₀`.
///
/// Each step lifts `w_{n−1}` to the positive real axis of the cover
/// `π_n(0) = a_{n−1}`, picks `a_n` deep inside `X` and takes `w_n`, `w̃_n` as
/// the two preimages of the lift under `A_{a_n}`. Besides the five per-step
/// relations the search keeps `ρ_X(a_n, w_n) < ∏_{i≤n}(1+ε_i)·ρ(0, c₀)`.
pub fn theorem7_build<T: Scalar, D: DomainModel<T> + ?Sized>(domain: &D, a0: DiskPoint<T>, w0: DiskPoint<T>, steps: usize) -> Result<Theorem7Build<T>> {
    let phi = riemann(domain)?;
    domain.require(a0)?;
    domain.require(w0)?;
    domain.deep_point(T::zero())?;
    let rho_c0 = domain.rho_x(a0, w0)?;
    if !(rho_c0 > T::zero() && rho_c0 < T::lit(0.5)) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < rho_X(a0, w0) < 1/2, got {rho_c0}"
        )));
    }
    let mut maps = Vec::with_capacity(steps);
    let mut states: Vec<Theorem7State<T>> = Vec::with_capacity(steps);
    let (mut a_prev, mut w_prev, mut rho_x_prev) = (a0, w0, rho_c0);
    let (mut product, mut product_sq) = (T::one(), T::one());
    for n in 1..=steps {
        let epsilon = epsilon_sequence::<T>(n);
        product = product * (T::one() + epsilon);
        product_sq = product_sq * (T::one() + epsilon) * (T::one() + epsilon);

        let p = phi.from(a_prev)?;
        let q = phi.from(w_prev)?;
        let lift = MobiusAut::translation(p).apply(q).value();
        let theta = lift.arg();
        let c = DiskPoint::new(Complex::new(lift.norm(), T::zero()))?;
        let cover = MobiusAut::two_point(DiskPoint::origin(), p, theta);
        let tg = StepTargets {
            c,
            rho_c: rho(DiskPoint::origin(), c),
            epsilon,
            confine: product * rho_c0,
        };
        let cand = choose_deep_point(domain, &tg, n)?;
        let map = MapDescriptor::into_domain(
            vec![
                Piece::Blaschke(Blaschke2::new(cand.a)?),
                Piece::Mobius(cover),
                Piece::RiemannTo(phi),
            ],
            domain,
        )?;
        let mut state = Theorem7State {
            n,
            t: cand.t,
            a: cand.a,
            w: cand.w,
            w_tilde: cand.w_tilde,
            c_prev: c,
            theta,
            inradius: cand.inradius,
            epsilon,
            product,
            product_sq,
            rho_aw: cand.rho_aw,
            rho_x_aw: cand.rho_x_aw,
            rho_origin_w_tilde: cand.rho_origin_w_tilde,
            map: map.clone(),
            checks: [false; 5],
        };
        state.checks = theorem7_checks(domain, &state, a_prev, w_prev, rho_x_prev, rho_c0)?;
        a_prev = state.a;
        w_prev = state.w;
        rho_x_prev = state.rho_x_aw;
        maps.push(map);
        states.push(state);
    }
    let final_origin = compose_eval(&maps, DiskPoint::origin(), steps)?;
    let marked = states.last().map_or(w0, |s| s.w_tilde);
    let final_marked = compose_eval(&maps, marked, steps)?;
    Ok(Theorem7Build {
        a0,
        w0,
        rho_c0,
        maps,
        states,
        final_origin,
        final_marked,
    })
}

/// Re-evaluates the five relations of one step from the recorded points,
/// the map and freshly computed distances.
pub fn theorem7_checks<T: Scalar, D: DomainModel<T> + ?Sized>(
    domain: &D,
    s: &Theorem7State<T>,
    a_prev: DiskPoint<T>,
    w_prev: DiskPoint<T>,
    rho_x_prev: T,
    rho_c0: T,
) -> Result<[bool; 5]> {
    let tol = T::lit(STATE_TOL);
    let close = |z: DiskPoint<T>, target: DiskPoint<T>| s.map.apply(z).is_ok_and(|v| (v.value() - target.value()).norm() < tol);
    let identities = close(DiskPoint::origin(), a_prev)
        && close(s.a, a_prev)
        && close(s.w, w_prev)
        && close(s.w_tilde, w_prev)
        && domain.contains_point(s.a)
        && domain.contains_point(s.w);
    let one_eps = T::one() + s.epsilon;
    let rho_aw = rho(s.a, s.w);
    let rho_wt = rho(DiskPoint::origin(), s.w_tilde);
    let rho_x_aw = domain.rho_x(s.a, s.w)?;
    let proximity = (rho_aw - rho_wt).abs() < tol && rho_wt < one_eps * rho_x_prev;
    let intrinsic = rho_x_aw < one_eps * rho_aw && one_eps * rho_aw < one_eps * one_eps * rho_x_prev;
    let product = epsilon_product::<T>(s.n);
    let confined = rho_wt < product * rho_c0 && product * rho_c0 < T::one();
    let intrinsic_confined = rho_x_aw < product * product * rho_c0 && product * product * rho_c0 < T::one();
    Ok([identities, proximity, intrinsic, confined, intrinsic_confined])
}

/// One step of the two-accumulation-point construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem8State<T> {
    pub n: usize,
    /// `a_n`, the preimage of the base point under `f_n`.
    pub a: DiskPoint<T>,
    pub theta: T,
    pub map: MapDescriptor<T>,
    /// `ρ(a_n, a)`.
    pub rho_to_base: T,
    /// `ρ_X(a, a_{n−1})`.
    pub rho_x_prev: T,
    pub checks: [bool; 3],
}

#[derive(Debug, Clone)]
pub struct Theorem8Build<T> {
    pub base: DiskPoint<T>,
    pub first: DiskPoint<T>,
    pub maps: Vec<MapDescriptor<T>>,
    pub states: Vec<Theorem8State<T>>,
}

impl<T: Scalar> Theorem8Build<T> {
    pub fn all_checks_pass(&self) -> bool {
        self.states.iter().all(|s| s.checks.iter().all(|&c| c))
    }
}

const THETA_SAMPLES: usize = 4096;

/// Builds covering maps `f_n` with `f_n(base) = a_{n−1}` and `f_n(a_n) = base`,
/// starting from `a_0 = first`, so `F_{2n}(base) = base` and
/// `F_{2n+1}(base) = first`.
pub fn theorem8_build<T: Scalar, D: DomainModel<T> + ?Sized>(domain: &D, base: DiskPoint<T>, first: DiskPoint<T>, steps: usize) -> Result<Theorem8Build<T>> {
    let phi = riemann(domain)?;
    domain.require(base)?;
    domain.require(first)?;
    if domain.relatively_compact() {
        return Err(Error::InvalidParameter(format!(
            "{} is relatively compact; the construction needs a domain reaching the circle",
            domain.label()
        )));
    }
    if base == first {
        return Err(Error::InvalidParameter("base point and first point must differ".into()));
    }
    let base_pre = phi.from(base)?;
    let mut maps = Vec::with_capacity(steps);
    let mut states = Vec::with_capacity(steps);
    let mut prev = first;
    for n in 1..=steps {
        let q = phi.from(prev)?;
        let preimage = |theta: T| MobiusAut::two_point(base, q, theta).invert().apply(base_pre);
        let inside = |theta: T| domain.contains_point(preimage(theta));
        let theta = scan_rotation(domain, &preimage, &inside).ok_or_else(|| Error::RotationScanFailed {
            step: n,
            radius: rho(base, q).to_f64_lossy(),
        })?;
        let a = preimage(theta);
        if !domain.contains_point(a) {
            return Err(Error::RotationScanFailed {
                step: n,
                radius: rho(base, q).to_f64_lossy(),
            });
        }
        let map = covering_with_basepoint(domain, base, prev, theta)?;
        let rho_x_prev = domain.rho_x(base, prev)?;
        let mut state = Theorem8State {
            n,
            a,
            theta,
            map: map.clone(),
            rho_to_base: rho(a, base),
            rho_x_prev,
            checks: [false; 3],
        };
        state.checks = theorem8_checks(domain, &state, base, prev)?;
        prev = a;
        maps.push(map);
        states.push(state);
    }
    Ok(Theorem8Build {
        base,
        first,
        maps,
        states,
    })
}

pub fn theorem8_checks<T: Scalar, D: DomainModel<T> + ?Sized>(domain: &D, s: &Theorem8State<T>, base: DiskPoint<T>, prev: DiskPoint<T>) -> Result<[bool; 3]> {
    let tol = T::lit(STATE_TOL);
    let close = |z: DiskPoint<T>, target: DiskPoint<T>| s.map.apply(z).is_ok_and(|v| (v.value() - target.value()).norm() < tol);
    let identities = close(base, prev) && close(s.a, base);
    let inside = domain.contains_point(s.a);
    let isometric = (rho(s.a, base) - domain.rho_x(base, prev)?).abs() < tol;
    Ok([identities, inside, isometric])
}

/// Samples the rotation circle, takes the longest circular run of samples
/// whose preimage lies in `X`, sharpens both ends by bisection and returns
/// the middle of the run. A circle entirely inside `X` yields the sample
/// with the largest inradius.
fn scan_rotation<T: Scalar, D: DomainModel<T> + ?Sized>(
    domain: &D,
    preimage: &impl Fn(T) -> DiskPoint<T>,
    inside: &impl Fn(T) -> bool,
) -> Option<T> {
    let n = THETA_SAMPLES;
    let step = T::TAU() / T::from_usize(n).unwrap();
    let angle = |k: usize| step * T::from_usize(k).unwrap();
    let flags: Vec<bool> = (0..n).map(|k| inside(angle(k))).collect();
    if flags.iter().all(|&f| f) {
        let mut best: Option<(T, usize)> = None;
        for k in 0..n {
            let r = domain.inradius_at(preimage(angle(k))).ok()?;
            if best.map_or(true, |(b, _)| r > b) {
                best = Some((r, k));
            }
        }
        return best.map(|(_, k)| angle(k));
    }
    let first_out = flags.iter().position(|&f| !f)?;
    // longest run of `true`, walking circularly from an outside sample
    let (mut best_start, mut best_len) = (0usize, 0usize);
    let mut run_start = 0usize;
    let mut run_len = 0usize;
    for i in 1..=n {
        let k = (first_out + i) % n;
        if flags[k] {
            if run_len == 0 {
                run_start = k;
            }
            run_len += 1;
        } else {
            if run_len > best_len {
                best_start = run_start;
                best_len = run_len;
            }
            run_len = 0;
        }
    }
    if best_len == 0 {
        return None;
    }
    let sharpen = |mut out: T, mut inn: T| {
        for _ in 0..60 {
            let mid = (out + inn) * T::lit(0.5);
            if inside(mid) {
                inn = mid;
            } else {
                out = mid;
            }
        }
        inn
    };
    let lo_in = angle(best_start);
    let lo = sharpen(lo_in - step, lo_in);
    let hi_in = lo_in + step * T::from_usize(best_len - 1).unwrap();
    let hi = sharpen(hi_in + step, hi_in);
    Some((lo + hi) * T::lit(0.5))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Report<T> {
    pub big_radius: T,
    /// Euclidean radius `c = tanh C` of the comparison disk.
    pub euclidean_radius: T,
    /// `max ρ_D(0, z)/ρ(0, z) − 1` over the samples.
    pub epsilon_hat: T,
    pub domination_holds: bool,
    pub samples: usize,
}

/// Compares the Poincaré metric of the hyperbolic disk `D = {ρ(0, z) < C}`
/// with that of `Δ` at `samples` radii in `(0, tanh 1)`.
pub fn lemma1_verify<T: Scalar>(big_radius: T, samples: usize) -> Result<Lemma1Report<T>> {
    if !(big_radius > T::one() && big_radius.is_finite()) || samples == 0 {
        return Err(Error::InvalidParameter(format!(
            "lemma 1 needs finite C > 1 and at least one sample, got C = {big_radius}, {samples} samples"
        )));
    }
    let c = big_radius.tanh();
    let top = T::one().tanh();
    let count = T::from_usize(samples).unwrap();
    let mut epsilon_hat = T::neg_infinity();
    let mut domination_holds = true;
    for i in 1..=samples {
        let r = top * T::from_usize(i).unwrap() / (count + T::one());
        let in_disk = (r / c).atanh();
        let in_delta = r.atanh();
        domination_holds &= in_disk >= in_delta;
        epsilon_hat = epsilon_hat.max(in_disk / in_delta - T::one());
    }
    Ok(Lemma1Report {
        big_radius,
        euclidean_radius: c,
        epsilon_hat,
        domination_holds,
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArgumentMode<T> {
    Fixed(T),
    Seeded(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma2Row<T> {
    pub modulus: T,
    pub a: DiskPoint<T>,
    pub z1: DiskPoint<T>,
    pub z2: DiskPoint<T>,
    pub rho_origin_z1: T,
    pub rho_a_z2: T,
    /// `|ρ(0, z1) − ρ(0, c)|`.
    pub gap: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma2Report<T> {
    pub c: DiskPoint<T>,
    pub rho_origin_c: T,
    pub rows: Vec<Lemma2Row<T>>,
    /// Largest `|ρ(0, z1) − ρ(a, z2)|`.
    pub identity_error: T,
    pub gaps_decreasing: bool,
    /// Final gap below 0.01.
    pub converged: bool,
}

/// Preimages of `c` under `A_a` for each modulus `|a|` in turn.
pub fn lemma2_verify<T: Scalar>(c: DiskPoint<T>, moduli: &[T], args: ArgumentMode<T>) -> Result<Lemma2Report<T>> {
    let rho_origin_c = rho(DiskPoint::origin(), c);
    if c.norm() == T::zero() || !(rho_origin_c < T::one()) {
        return Err(Error::InvalidParameter(format!("lemma 2 needs c != 0 with rho(0, c) < 1, got {rho_origin_c}")));
    }
    let mut rng = match args {
        ArgumentMode::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        ArgumentMode::Fixed(_) => None,
    };
    let mut rows = Vec::with_capacity(moduli.len());
    for &m in moduli {
        let arg = match (&mut rng, args) {
            (Some(r), _) => T::lit(r.gen_range(0.0..std::f64::consts::TAU)),
            (None, ArgumentMode::Fixed(t)) => t,
            (None, ArgumentMode::Seeded(_)) => unreachable!(),
        };
        let a = DiskPoint::new(Complex::from_polar(m, arg))?;
        let (z1, z2) = Blaschke2::new(a)?.preimages(c)?;
        let rho_origin_z1 = rho(DiskPoint::origin(), z1);
        rows.push(Lemma2Row {
            modulus: m,
            a,
            z1,
            z2,
            rho_origin_z1,
            rho_a_z2: rho(a, z2),
            gap: (rho_origin_z1 - rho_origin_c).abs(),
        });
    }
    let identity_error = rows
        .iter()
        .map(|r| (r.rho_origin_z1 - r.rho_a_z2).abs())
        .fold(T::zero(), T::max);
    let gaps_decreasing = rows.windows(2).all(|w| w[1].gap < w[0].gap);
    let converged = rows.last().is_some_and(|r| r.gap < T::lit(0.01));
    Ok(Lemma2Report {
        c,
        rho_origin_c,
        rows,
        identity_error,
        gaps_decreasing,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use approx::assert_abs_diff_eq;

    type P = DiskPoint<f64>;

    fn horo() -> Domain<f64> {
        Domain::parse("horodisk(0,0.5)").unwrap()
    }

    #[test]
    fn epsilon_schedule() {
        assert_abs_diff_eq!(epsilon_sequence::<f64>(1), 2f64.powf(0.25) - 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(epsilon_sequence::<f64>(1), 0.189207115, epsilon = 1e-9);
        // ∏(1+ε_i)² = 2^{Σ 2^{−i}}
        let p = epsilon_product::<f64>(10);
        assert_abs_diff_eq!(p * p, 2f64.powf(1.0 - 2f64.powi(-10)), epsilon = 1e-13);
        assert_abs_diff_eq!(p * p, 1.998646655, epsilon = 1e-9);
        for n in 2..=50 {
            assert!(epsilon_sequence::<f64>(n) < epsilon_sequence::<f64>(n - 1));
            let q = epsilon_product::<f64>(n);
            assert!(q * q <= 2.0);
        }
    }

    #[test]
    fn w0_helper_on_the_axis() {
        let x = horo();
        let w0 = w0_at_distance(&x, P::real(0.5), 0.3, 0.0).unwrap();
        assert_abs_diff_eq!(w0.value().re, 0.5 + 0.5 * 0.3f64.tanh(), epsilon = 1e-15);
        assert_abs_diff_eq!(x.rho_x(P::real(0.5), w0).unwrap(), 0.3, epsilon = 1e-14);
    }

    #[test]
    fn theorem7_short_build() {
        let x = horo();
        let a0 = P::real(0.5);
        let w0 = w0_at_distance(&x, a0, 0.3, 0.0).unwrap();
        let b = theorem7_build(&x, a0, w0, 20).unwrap();
        assert!(b.all_checks_pass(), "{:?}", b.states.iter().map(|s| s.checks).collect::<Vec<_>>());
        assert!((b.final_origin.value() - a0.value()).norm() < 1e-8);
        assert!((b.final_marked.value() - w0.value()).norm() < 1e-8);
        for s in &b.states {
            assert!(s.rho_origin_w_tilde < 1.0);
            assert!(s.t >= 2.0 && s.inradius >= s.t);
        }
        // the deep points move toward the circle
        for w in b.states.windows(2) {
            assert!(w[1].a.norm() >= w[0].a.norm());
        }
    }

    #[test]
    fn theorem7_rejects_bloch_and_far_points() {
        let d = Domain::<f64>::parse("disk(0,0,0.5)").unwrap();
        assert!(matches!(
            theorem7_build(&d, P::origin(), P::real(0.1), 3),
            Err(Error::NoDeepPoints(_))
        ));
        let x = horo();
        let far = w0_at_distance(&x, P::real(0.5), 0.6, 0.0).unwrap();
        assert!(matches!(theorem7_build(&x, P::real(0.5), far, 3), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn theorem8_alternates() {
        let x = horo();
        let (a, a1) = (P::real(0.5), P::real(0.7));
        let b = theorem8_build(&x, a, a1, 12).unwrap();
        assert!(b.all_checks_pass());
        for n in 0..=12 {
            let v = compose_eval(&b.maps, a, n).unwrap().value();
            let target = if n % 2 == 0 { a } else { a1 };
            assert!((v - target.value()).norm() < 1e-8, "n = {n}");
        }
        let r = Domain::<f64>::parse("disk(0,0,0.5)").unwrap();
        assert!(theorem8_build(&r, P::origin(), P::real(0.1), 2).is_err());
    }

    #[test]
    fn rotation_scan_off_axis() {
        // rotated horodisk: every construction point leaves the real axis
        let x = Domain::<f64>::parse("horodisk(1.3,0.4)").unwrap();
        let phi = x.riemann().unwrap();
        let a = phi.to(P::origin());
        let a1 = phi.to(P::from_parts(0.2, 0.3).unwrap());
        let b = theorem8_build(&x, a, a1, 4).unwrap();
        assert!(b.all_checks_pass());
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn lemma1_against_quadrature() {
        let mut prev = f64::INFINITY;
        for big in [2.0, 4.0, 8.0] {
            let r = lemma1_verify(big, 400).unwrap();
            assert!(r.domination_holds);
            assert!(r.epsilon_hat < prev);
            prev = r.epsilon_hat;
            // worst ratio sits at the outermost sample
            let c = r.euclidean_radius;
            let z = 1f64.tanh() * 400.0 / 401.0;
            let rd = simpson(|t| c / (c * c - t * t), 0.0, z, 2000);
            let rr = simpson(|t| 1.0 / (1.0 - t * t), 0.0, z, 2000);
            assert_abs_diff_eq!(r.epsilon_hat, rd / rr - 1.0, epsilon = 1e-10);
        }
        assert!(prev < 0.01);
        assert!(lemma1_verify(1.0f64, 10).is_err());
    }

    #[test]
    fn lemma2_examples() {
        let c = P::real(0.3);
        let r = lemma2_verify(c, &[0.9, 0.99, 0.999], ArgumentMode::Fixed(0.0)).unwrap();
        assert!(r.gaps_decreasing && r.converged);
        assert!(r.identity_error < 1e-10);
        // quadratic formula for real a and c
        for row in &r.rows {
            let a = row.modulus;
            let b = a - a * 0.3;
            let z1 = (b - (b * b + 1.2f64).sqrt()) / 2.0;
            assert_abs_diff_eq!(row.z1.value().re, z1, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(r.rows[0].rho_origin_z1, 0.328133384, epsilon = 1e-9);
        assert_abs_diff_eq!(r.rows[0].gap, 0.0186138, epsilon = 1e-6);
        assert_abs_diff_eq!(r.rows[1].gap, 0.00178348, epsilon = 1e-7);
        let s = lemma2_verify(c, &[0.9, 0.99, 0.999], ArgumentMode::Seeded(5)).unwrap();
        assert!(s.converged && s.identity_error < 1e-10);
        assert_eq!(s, lemma2_verify(c, &[0.9, 0.99, 0.999], ArgumentMode::Seeded(5)).unwrap());
    }
}
