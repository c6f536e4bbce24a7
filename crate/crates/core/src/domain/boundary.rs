use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::hyperbolic::{rho_raw, DiskPoint};
use crate::Scalar;

/// Coarse samples taken along a boundary curve before golden-section refinement.
pub const CURVE_SAMPLES: usize = 256;

const GOLDEN_TOL: f64 = 1e-9;
const MAX_SECTIONS: usize = 100;

/// Closed curve `φ ↦ γ(φ)`, `φ ∈ [0, 2π)`; points on the unit circle are
/// allowed (they are infinitely far away).
#[derive(Clone)]
pub struct Curve<T> {
    f: Arc<dyn Fn(T) -> Complex<T> + Send + Sync>,
}

impl<T: Scalar> Curve<T> {
    pub fn new(f: impl Fn(T) -> Complex<T> + Send + Sync + 'static) -> Self {
        Curve { f: Arc::new(f) }
    }

    /// Euclidean circle `center + radius·e^{iφ}`.
    pub fn circle(center: Complex<T>, radius: T) -> Self {
        Curve::new(move |phi| center + Complex::from_polar(radius, phi))
    }

    #[inline]
    pub fn at(&self, phi: T) -> Complex<T> {
        (self.f)(phi)
    }

    /// `g ∘ γ`.
    pub fn map(&self, g: impl Fn(Complex<T>) -> Complex<T> + Send + Sync + 'static) -> Self {
        let f = self.f.clone();
        Curve::new(move |phi| g(f(phi)))
    }
}

impl<T> fmt::Debug for Curve<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Curve(..)")
    }
}

/// `count` punctures evenly spaced on the Euclidean circle `|z| = radius`,
/// starting at angle `offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PunctureRing<T> {
    pub radius: T,
    pub count: usize,
    pub offset: T,
}

impl<T: Scalar> PunctureRing<T> {
    pub fn point(&self, k: usize) -> Complex<T> {
        let step = T::TAU() / T::from_usize(self.count).unwrap();
        Complex::from_polar(self.radius, self.offset + step * T::from_usize(k).unwrap())
    }

    pub fn points(&self) -> impl Iterator<Item = Complex<T>> + '_ {
        (0..self.count).map(|k| self.point(k))
    }

    /// Index of the puncture closest in angle to `z`; for fixed moduli the
    /// ρ-distance is increasing in the angle difference.
    fn nearest_index(&self, z: Complex<T>) -> usize {
        if self.count <= 1 || self.radius == T::zero() {
            return 0;
        }
        let n = T::from_usize(self.count).unwrap();
        let step = T::TAU() / n;
        let k = ((z.arg() - self.offset) / step).round();
        let k = k.to_i64().unwrap_or(0).rem_euclid(self.count as i64);
        k as usize
    }

    fn distance(&self, a: Complex<T>) -> T {
        if self.count == 0 {
            return T::infinity();
        }
        let k = self.nearest_index(a);
        let n = self.count;
        [k, (k + 1) % n, (k + n - 1) % n]
            .into_iter()
            .map(|j| rho_raw(a, self.point(j)))
            .fold(T::infinity(), T::min)
    }
}

/// A piece of `∂(Δ \ X)` inside the disk.
#[derive(Debug, Clone)]
pub enum BoundaryPiece<T> {
    Curve(Curve<T>),
    Rings(Vec<PunctureRing<T>>),
    Points(Vec<Complex<T>>),
}

impl<T: Scalar> BoundaryPiece<T> {
    pub fn distance(&self, a: DiskPoint<T>) -> T {
        let a = a.value();
        match self {
            BoundaryPiece::Curve(c) => curve_distance(c, a),
            BoundaryPiece::Rings(rings) => {
                rings.iter().map(|r| r.distance(a)).fold(T::infinity(), T::min)
            }
            BoundaryPiece::Points(ps) => {
                ps.iter().map(|&p| rho_raw(a, p)).fold(T::infinity(), T::min)
            }
        }
    }
}

/// ρ-distance from `a` to the complement described by `pieces`.
pub fn complement_distance<T: Scalar>(pieces: &[BoundaryPiece<T>], a: DiskPoint<T>) -> T {
    pieces
        .iter()
        .map(|p| p.distance(a))
        .fold(T::infinity(), T::min)
}

/// Coarse scan of `ρ(a, γ(φ))` followed by golden-section refinement
/// around the best sample.
fn curve_distance<T: Scalar>(curve: &Curve<T>, a: Complex<T>) -> T {
    let n = CURVE_SAMPLES;
    let step = T::TAU() / T::from_usize(n).unwrap();
    // half-step offset keeps φ = 0 (a tangency point for horodisks) off the grid
    let offset = step * T::lit(0.5);
    let f = |phi: T| rho_raw(a, curve.at(phi));
    let mut best = (T::infinity(), T::zero());
    for k in 0..n {
        let phi = offset + step * T::from_usize(k).unwrap();
        let d = f(phi);
        if d < best.0 {
            best = (d, phi);
        }
    }
    if !best.0.is_finite() {
        return best.0;
    }
    let refined = golden_min(f, best.1 - step, best.1 + step, T::lit(GOLDEN_TOL));
    best.0.min(refined)
}

/// Golden-section search for the minimum value of `f` on `[lo, hi]`.
pub(crate) fn golden_min<T: Scalar>(f: impl Fn(T) -> T, lo: T, hi: T, tol: T) -> T {
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = fc.min(fd);
    let mut steps = 0;
    while (b - a).abs() > tol && steps < MAX_SECTIONS {
        steps += 1;
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
            best = best.min(fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
            best = best.min(fd);
        }
    }
    best.min(f((a + b) * T::lit(0.5)))
}
