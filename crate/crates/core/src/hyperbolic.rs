//! Exact-formula complex algebra on the unit disk.
//!
//! Everything here is a closed-form expression: the Poincaré distance,
//! the automorphism group `z ↦ e^{iθ}(z − a)/(1 − āz)`, the degree-2
//! Blaschke product `A_a(z) = z(z − a)/(1 − āz)` with its two preimages,
//! and the conversion between hyperbolic and Euclidean disks.

use num_complex::Complex;

use crate::{Error, Result, Scalar};

/// A point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint<T>(Complex<T>);

impl<T: Scalar> DiskPoint<T> {
    /// Rejects anything with `1 - |z|` below [`Scalar::boundary_margin`].
    pub fn new(z: Complex<T>) -> Result<Self> {
        if z.re.is_finite() && z.im.is_finite() && T::one() - z.norm() >= T::boundary_margin() {
            Ok(DiskPoint(z))
        } else {
            Err(Error::outside(z))
        }
    }

    pub fn from_parts(re: T, im: T) -> Result<Self> {
        Self::new(Complex::new(re, im))
    }

    /// Real point `x` of the disk; panics when `|x| >= 1`.
    pub fn real(x: f64) -> Self {
        Self::new(Complex::new(T::lit(x), T::zero())).expect("real point inside the disk")
    }

    /// Wraps a value known to lie in the disk (images of disk points under
    /// self-maps). Only checked in debug builds.
    pub(crate) fn trusted(z: Complex<T>) -> Self {
        debug_assert!(z.norm() < T::one() + T::lit(1e-12), "trusted point {z:?} outside disk");
        DiskPoint(z)
    }

    pub fn origin() -> Self {
        DiskPoint(Complex::new(T::zero(), T::zero()))
    }

    #[inline]
    pub fn value(self) -> Complex<T> {
        self.0
    }

    #[inline]
    pub fn norm(self) -> T {
        self.0.norm()
    }

    /// `1 - |z|²`, the reciprocal of the metric density.
    #[inline]
    pub fn gap(self) -> T {
        one_minus_norm_sqr(self.0)
    }
}

impl<T: Scalar> From<DiskPoint<T>> for Complex<T> {
    fn from(p: DiskPoint<T>) -> Self {
        p.0
    }
}

#[inline]
fn one_minus_norm_sqr<T: Scalar>(z: Complex<T>) -> T {
    let r = z.norm();
    (T::one() - r) * (T::one() + r)
}

/// Pseudo-hyperbolic distance `|(z − w)/(1 − w̄z)|`.
#[inline]
pub fn pseudo_distance<T: Scalar>(z: DiskPoint<T>, w: DiskPoint<T>) -> T {
    pseudo_raw(z.0, w.0)
}

#[inline]
fn pseudo_raw<T: Scalar>(z: Complex<T>, w: Complex<T>) -> T {
    let den = (Complex::new(T::one(), T::zero()) - w.conj() * z).norm();
    (z - w).norm() / den
}

/// Poincaré distance `artanh |(z − w)/(1 − w̄z)|` for the density `1/(1 − |z|²)`.
///
/// Close to the boundary `1 − t` is recovered from the identity
/// `1 − t² = (1 − |z|²)(1 − |w|²)/|1 − w̄z|²` instead of by subtraction.
pub fn rho<T: Scalar>(z: DiskPoint<T>, w: DiskPoint<T>) -> T {
    rho_raw(z.0, w.0)
}

/// Poincaré distance between arbitrary complex numbers; `+∞` when either
/// lies on or outside the unit circle.
pub fn rho_raw<T: Scalar>(z: Complex<T>, w: Complex<T>) -> T {
    let gz = one_minus_norm_sqr(z);
    let gw = one_minus_norm_sqr(w);
    if !(gz > T::zero() && gw > T::zero()) {
        return T::infinity();
    }
    let one = T::one();
    let half = T::lit(0.5);
    let den = (Complex::new(one, T::zero()) - w.conj() * z).norm();
    let t = (z - w).norm() / den;
    if t < half {
        // artanh t = ½ log1p(2t / (1 − t)), no cancellation for small t
        half * (T::lit(2.0) * t / (one - t)).ln_1p()
    } else {
        // artanh t = log(1 + t) − ½ log(1 − t²)
        (one + t).ln() - half * (gz.ln() + gw.ln()) + den.ln()
    }
}

/// Point at ρ-distance `dist` from `center` in the direction `angle`
/// (measured in the chart that moves `center` to the origin).
pub fn point_at<T: Scalar>(center: DiskPoint<T>, angle: T, dist: T) -> DiskPoint<T> {
    let local = Complex::from_polar(dist.tanh(), angle);
    MobiusAut::translation(center).invert().apply_raw(local).map_or_else(
        || DiskPoint::trusted(local),
        DiskPoint::trusted,
    )
}

fn normalize_angle<T: Scalar>(theta: T) -> T {
    let tau = T::TAU();
    let r = theta % tau;
    let r = if r < T::zero() { r + tau } else { r };
    if r >= tau {
        T::zero()
    } else {
        r
    }
}

/// Conformal automorphism `z ↦ e^{iθ}(z − a)/(1 − āz)` of the disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusAut<T> {
    a: DiskPoint<T>,
    theta: T,
}

impl<T: Scalar> MobiusAut<T> {
    /// `theta` is reduced into `[0, 2π)`.
    pub fn new(a: DiskPoint<T>, theta: T) -> Self {
        MobiusAut {
            a,
            theta: normalize_angle(theta),
        }
    }

    pub fn identity() -> Self {
        Self::new(DiskPoint::origin(), T::zero())
    }

    pub fn rotation(theta: T) -> Self {
        Self::new(DiskPoint::origin(), theta)
    }

    /// `z ↦ (z − a)/(1 − āz)`, sending `a` to the origin.
    pub fn translation(a: DiskPoint<T>) -> Self {
        Self::new(a, T::zero())
    }

    pub fn zero_point(&self) -> DiskPoint<T> {
        self.a
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    fn unit(&self) -> Complex<T> {
        Complex::from_polar(T::one(), self.theta)
    }

    /// Evaluates the formula on any complex number off the pole `1/ā`.
    pub fn apply_raw(&self, z: Complex<T>) -> Option<Complex<T>> {
        let a = self.a.0;
        let den = Complex::new(T::one(), T::zero()) - a.conj() * z;
        if den.norm() == T::zero() {
            return None;
        }
        Some(self.unit() * (z - a) / den)
    }

    pub fn apply(&self, z: DiskPoint<T>) -> DiskPoint<T> {
        let a = self.a.0;
        let den = Complex::new(T::one(), T::zero()) - a.conj() * z.0;
        DiskPoint::trusted(self.unit() * (z.0 - a) / den)
    }

    /// Complex derivative `e^{iθ}(1 − |a|²)/(1 − āz)²`.
    pub fn derivative(&self, z: Complex<T>) -> Complex<T> {
        let den = Complex::new(T::one(), T::zero()) - self.a.0.conj() * z;
        self.unit() * self.a.gap() / (den * den)
    }

    /// `self ∘ inner`: applies `inner` first.
    pub fn compose(&self, inner: &MobiusAut<T>) -> MobiusAut<T> {
        let a = inner.invert().apply(self.a);
        // arg of (self ∘ inner)'(a) = θ_self + θ_inner − 2 arg(1 − ā_inner a)
        let w = Complex::new(T::one(), T::zero()) - inner.a.0.conj() * a.0;
        let two = T::lit(2.0);
        MobiusAut::new(a, self.theta + inner.theta - two * w.arg())
    }

    pub fn invert(&self) -> MobiusAut<T> {
        let a = DiskPoint::trusted(-(self.unit() * self.a.0));
        MobiusAut::new(a, -self.theta)
    }

    /// An automorphism sending `p` to `q`; `theta` is the residual rotation
    /// about `q` (the map is `T_q⁻¹ ∘ R_θ ∘ T_p`).
    pub fn two_point(p: DiskPoint<T>, q: DiskPoint<T>, theta: T) -> MobiusAut<T> {
        MobiusAut::translation(q)
            .invert()
            .compose(&MobiusAut::rotation(theta).compose(&MobiusAut::translation(p)))
    }
}

/// Degree-2 Blaschke product `A_a(z) = z(z − a)/(1 − āz)` with `a ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Blaschke2<T> {
    a: DiskPoint<T>,
}

impl<T: Scalar> Blaschke2<T> {
    pub fn new(a: DiskPoint<T>) -> Result<Self> {
        if a.value().norm() == T::zero() {
            return Err(Error::ZeroBlaschkeParameter);
        }
        Ok(Blaschke2 { a })
    }

    pub fn parameter(&self) -> DiskPoint<T> {
        self.a
    }

    pub fn apply_raw(&self, z: Complex<T>) -> Complex<T> {
        let a = self.a.0;
        z * (z - a) / (Complex::new(T::one(), T::zero()) - a.conj() * z)
    }

    pub fn apply(&self, z: DiskPoint<T>) -> DiskPoint<T> {
        DiskPoint::trusted(self.apply_raw(z.0))
    }

    /// Both solutions of `A_a(z) = c`, i.e. roots of `z² − (a − āc)z − c = 0`,
    /// ordered so that `|z1| < |z2|`.
    ///
    /// The larger root is computed first and the smaller one recovered from
    /// `z1·z2 = −c`, which avoids cancellation when `|a|` is close to 1.
    pub fn preimages(&self, c: DiskPoint<T>) -> Result<(DiskPoint<T>, DiskPoint<T>)> {
        let cv = c.value();
        if cv.norm() == T::zero() {
            return Err(Error::ZeroPreimageTarget);
        }
        let rc = rho(DiskPoint::origin(), c);
        if rc >= T::one() {
            return Err(Error::PreimageTargetTooFar {
                rho: rc.to_f64_lossy(),
            });
        }
        let a = self.a.0;
        let two = T::lit(2.0);
        let b = a - a.conj() * cv;
        let s = (b * b + cv * T::lit(4.0)).sqrt();
        let big = if (b.conj() * s).re >= T::zero() {
            (b + s) / two
        } else {
            (b - s) / two
        };
        let small = -cv / big;
        if (big.norm() - small.norm()).abs() <= T::lit(1e-14) {
            return Err(Error::AmbiguousPreimages {
                modulus: big.norm().to_f64_lossy(),
            });
        }
        Ok((DiskPoint::trusted(small), DiskPoint::trusted(big)))
    }
}

/// Hyperbolic disk `{z : ρ(center, z) < radius}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicDisk<T> {
    pub center: DiskPoint<T>,
    pub radius: T,
}

impl<T: Scalar> HyperbolicDisk<T> {
    pub fn new(center: DiskPoint<T>, radius: T) -> Result<Self> {
        if !(radius >= T::zero() && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "hyperbolic radius must be finite and nonnegative, got {radius}"
            )));
        }
        Ok(HyperbolicDisk { center, radius })
    }

    pub fn contains(&self, z: DiskPoint<T>) -> bool {
        rho(self.center, z) < self.radius
    }

    /// Euclidean center and radius of the same set.
    pub fn to_euclid(&self) -> (Complex<T>, T) {
        let t = self.radius.tanh();
        let c = self.center.value();
        let c2 = c.norm_sqr();
        let gap = self.center.gap();
        let den = T::one() - c2 * t * t;
        (c * ((T::one() - t * t) / den), t * gap / den)
    }

    /// Inverse of [`HyperbolicDisk::to_euclid`]; the closed Euclidean disk
    /// must lie strictly inside the unit disk.
    pub fn from_euclid(center: Complex<T>, radius: T) -> Result<Self> {
        let m = center.norm();
        let inside = radius >= T::zero()
            && radius.is_finite()
            && m.is_finite()
            && T::one() - (m + radius) >= T::boundary_margin();
        if !inside {
            return Err(Error::DiskNotInside {
                re: center.re.to_f64_lossy(),
                im: center.im.to_f64_lossy(),
                radius: radius.to_f64_lossy(),
            });
        }
        let dir = if m > T::zero() {
            center / m
        } else {
            Complex::new(T::one(), T::zero())
        };
        // diameter endpoints along the ray through the center
        let lo = (m - radius).atanh();
        let hi = (m + radius).atanh();
        let half = T::lit(0.5);
        let x = ((lo + hi) * half).tanh();
        let c = DiskPoint::new(dir * x)?;
        HyperbolicDisk::new(c, (hi - lo) * half)
    }
}
