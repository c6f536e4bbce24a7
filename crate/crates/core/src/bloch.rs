//! Bloch radius search `R(X, Δ) = sup_a R(X, Δ, a)` and radial-stretch images.
//!
//! The search scores centers on a fixed hyperbolic polar lattice, refines the
//! best two centers of every lattice ring by alternating golden-section
//! searches along orthogonal geodesics and reports the largest inradius
//! found. Large values are certified by sampling a witness disk.

use num_complex::Complex;
use rayon::prelude::*;

use crate::domain::{DiskHomeomorphism, DomainModel, ImageDomain, PunctureRing};
use crate::hyperbolic::{point_at, DiskPoint, HyperbolicDisk};
use crate::{Error, Result, Scalar};

/// The K-quasiconformal radial stretch `z ↦ z|z|^{K−1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialStretch<T> {
    k: T,
}

impl<T: Scalar> RadialStretch<T> {
    pub fn new(k: T) -> Result<Self> {
        if !(k >= T::one() && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("radial stretch needs finite K >= 1, got {k}")));
        }
        Ok(RadialStretch { k })
    }

    pub fn k(&self) -> T {
        self.k
    }

    fn scale(z: Complex<T>, exponent: T) -> Complex<T> {
        z * z.norm().powf(exponent)
    }
}

impl<T: Scalar> DiskHomeomorphism<T> for RadialStretch<T> {
    fn forward(&self, z: Complex<T>) -> Complex<T> {
        Self::scale(z, self.k - T::one())
    }

    fn inverse(&self, z: Complex<T>) -> Complex<T> {
        Self::scale(z, T::one() / self.k - T::one())
    }

    fn label(&self) -> String {
        format!("stretch({})", self.k)
    }

    fn map_ring(&self, ring: &PunctureRing<T>) -> Option<PunctureRing<T>> {
        Some(PunctureRing {
            radius: ring.radius.powf(self.k),
            ..*ring
        })
    }
}

/// Image of a domain under a radial stretch.
pub type QcImage<D, T> = ImageDomain<D, RadialStretch<T>, T>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBudget<T> {
    /// Largest ρ(0, a) of a lattice center.
    pub depth: T,
    /// ρ-spacing of the lattice rings.
    pub radial_step: T,
    /// Target ρ-spacing of centers along a ring.
    pub angular_spacing: T,
    pub max_ring_points: usize,
    pub refine_rounds: usize,
    /// Half-length of the first refinement segment; halved every round.
    pub trust_radius: T,
    /// Inradius that triggers a witness certification; `0.6·depth` when unset.
    pub witness_threshold: Option<T>,
    pub witness_samples: usize,
}

impl<T: Scalar> SearchBudget<T> {
    pub fn with_depth(depth: T) -> Self {
        SearchBudget {
            depth,
            radial_step: T::lit(0.25),
            angular_spacing: T::lit(0.5),
            max_ring_points: 4096,
            refine_rounds: 4,
            trust_radius: T::lit(0.5),
            witness_threshold: None,
            witness_samples: 10_000,
        }
    }

    pub fn threshold(&self) -> T {
        self.witness_threshold.unwrap_or(self.depth * T::lit(0.6))
    }

    fn validate(&self) -> Result<()> {
        let ok = self.depth >= T::zero()
            && self.depth.is_finite()
            && self.radial_step > T::zero()
            && self.angular_spacing > T::zero()
            && self.max_ring_points > 0
            && self.trust_radius >= T::zero();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid search budget {self:?}")))
        }
    }

    /// Lattice rings at `ρ = k·radial_step ≤ depth`; ring `k` depends only
    /// on `k`, so deeper budgets see a superset of centers.
    pub fn lattice(&self) -> Vec<Vec<DiskPoint<T>>> {
        let count = (self.depth / self.radial_step + T::lit(1e-9)).floor().to_usize().unwrap_or(0);
        (0..=count)
            .map(|k| {
                let r = self.radial_step * T::from_usize(k).unwrap();
                // hyperbolic circumference of a ρ-circle of radius r is π·sinh 2r
                let wanted = (T::PI() * (r + r).sinh() / self.angular_spacing).ceil();
                let n = wanted.to_usize().unwrap_or(usize::MAX).clamp(1, self.max_ring_points);
                let step = T::TAU() / T::from_usize(n).unwrap();
                (0..n)
                    .map(|j| point_at(DiskPoint::origin(), step * T::from_usize(j).unwrap(), r))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlochVerdict<T> {
    /// Nothing larger than `bound` was found within the budget.
    BlochUpTo { bound: T },
    /// A hyperbolic disk of this radius was verified to lie in the domain.
    NonBlochWitness { radius: T },
}

impl<T: Scalar> BlochVerdict<T> {
    pub fn name(&self) -> &'static str {
        match self {
            BlochVerdict::BlochUpTo { .. } => "BlochUpTo",
            BlochVerdict::NonBlochWitness { .. } => "NonBlochWitness",
        }
    }

    pub fn is_witness(&self) -> bool {
        matches!(self, BlochVerdict::NonBlochWitness { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlochReport<T> {
    pub best_center: DiskPoint<T>,
    pub best_inradius: T,
    pub budget: SearchBudget<T>,
    pub verdict: BlochVerdict<T>,
    pub centers_evaluated: usize,
}

type Scored<T> = (T, DiskPoint<T>);

/// Larger inradius wins; ties go to the lexicographically smaller center.
fn better<T: Scalar>(a: &Scored<T>, b: &Scored<T>) -> bool {
    if a.0 != b.0 {
        return a.0 > b.0;
    }
    let (za, zb) = (a.1.value(), b.1.value());
    (za.re, za.im) < (zb.re, zb.im)
}

fn score<T: Scalar, D: DomainModel<T> + ?Sized>(domain: &D, z: DiskPoint<T>) -> Option<T> {
    if !domain.contains_point(z) || !domain.admissible_center(z) {
        return None;
    }
    domain.inradius_at(z).ok()
}

pub fn bloch_radius_search<T: Scalar, D: DomainModel<T> + ?Sized>(domain: &D, budget: &SearchBudget<T>) -> Result<BlochReport<T>> {
    budget.validate()?;
    let lattice = budget.lattice();
    let evaluated: usize = lattice.iter().map(Vec::len).sum();

    // best two centers of every ring
    let seeds: Vec<Scored<T>> = lattice
        .par_iter()
        .flat_map_iter(|ring| {
            let scored: Vec<Option<T>> = ring.iter().map(|&z| score(domain, z)).collect();
            let mut top: Vec<Scored<T>> = Vec::with_capacity(2);
            for (z, s) in ring.iter().zip(scored) {
                let Some(s) = s else { continue };
                let cand = (s, *z);
                let pos = top.iter().position(|t| better(&cand, t)).unwrap_or(top.len());
                if pos < 2 {
                    top.insert(pos, cand);
                    top.truncate(2);
                }
            }
            top
        })
        .collect();

    let refined: Vec<Scored<T>> = seeds.par_iter().map(|&s| refine(domain, s, budget)).collect();
    let best = seeds
        .iter()
        .chain(refined.iter())
        .fold(None::<Scored<T>>, |acc, c| match acc {
            Some(a) if !better(c, &a) => Some(a),
            _ => Some(*c),
        })
        .ok_or_else(|| Error::EmptySearch {
            domain: domain.label(),
            depth: budget.depth.to_f64_lossy(),
        })?;

    let (best_inradius, best_center) = best;
    let mut verdict = BlochVerdict::BlochUpTo { bound: best_inradius };
    if best_inradius >= budget.threshold() {
        let radius = best_inradius - T::lit(1e-6);
        let disk = HyperbolicDisk::new(best_center, radius)?;
        if witness_disk_verify(domain, &disk, budget.witness_samples) {
            verdict = BlochVerdict::NonBlochWitness { radius };
        }
    }
    Ok(BlochReport {
        best_center,
        best_inradius,
        budget: *budget,
        verdict,
        centers_evaluated: evaluated,
    })
}

fn refine<T: Scalar, D: DomainModel<T> + ?Sized>(domain: &D, start: Scored<T>, budget: &SearchBudget<T>) -> Scored<T> {
    let mut best = start;
    let mut trust = budget.trust_radius;
    for _ in 0..budget.refine_rounds {
        for angle in [T::zero(), T::FRAC_PI_2()] {
            let center = best.1;
            let line = |u: T| {
                let z = point_at(center, angle, u);
                score(domain, z).unwrap_or(T::neg_infinity())
            };
            let (u, value) = golden_max(line, -trust, trust, T::lit(1e-9));
            let cand = (value, point_at(center, angle, u));
            if better(&cand, &best) {
                best = cand;
            }
        }
        trust = trust * T::lit(0.5);
    }
    best
}

/// Enough for any `tol` at `f64` resolution; also stops `f32` runs.
const MAX_SECTIONS: usize = 100;

fn golden_max<T: Scalar>(f: impl Fn(T) -> T, lo: T, hi: T, tol: T) -> (T, T) {
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let (mut fc, mut fd) = (f(c), f(d));
    let mut steps = 0;
    while b - a > tol && steps < MAX_SECTIONS {
        steps += 1;
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Samples `d` on its boundary circle and on a golden-angle spiral inside
/// and checks every sample for membership in `X`.
pub fn witness_disk_verify<T: Scalar, D: DomainModel<T> + ?Sized>(domain: &D, d: &HyperbolicDisk<T>, samples: usize) -> bool {
    let on_circle = (samples / 4).max(1);
    let inside = samples.saturating_sub(on_circle).max(1);
    let golden_angle = T::PI() * (T::lit(3.0) - T::lit(5.0).sqrt());
    let n_in = T::from_usize(inside).unwrap();
    let n_on = T::from_usize(on_circle).unwrap();
    let interior_ok = (0..inside).into_par_iter().all(|i| {
        let fi = T::from_usize(i).unwrap();
        let r = d.radius * ((fi + T::lit(0.5)) / n_in).sqrt();
        domain.contains_point(point_at(d.center, golden_angle * fi, r))
    });
    interior_ok
        && (0..on_circle).into_par_iter().all(|j| {
            let angle = T::TAU() * T::from_usize(j).unwrap() / n_on;
            domain.contains_point(point_at(d.center, angle, d.radius))
        })
}

/// Bloch search on `f(X)` for the radial stretch `f` with parameter `k`.
pub fn qc_image_experiment<T: Scalar, D: DomainModel<T>>(domain: D, k: T, budget: &SearchBudget<T>) -> Result<BlochReport<T>> {
    let image: QcImage<D, T> = ImageDomain::new(domain, RadialStretch::new(k)?);
    bloch_radius_search(&image, budget)
}
