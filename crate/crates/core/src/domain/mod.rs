//! Concrete subdomains `X ⊂ Δ`.
//!
//! Every domain describes its complement in the disk through a list of
//! [`BoundaryPiece`]s. The inradius `R(X, Δ, a)` is the ρ-distance from `a`
//! to that complement, so one routine serves all entries and all of their
//! images under self-maps of the disk.

mod boundary;
mod disk;
mod image;
mod rdense;
mod spec;

use std::fmt;

use num_complex::Complex;

pub use boundary::{complement_distance, BoundaryPiece, Curve, PunctureRing, CURVE_SAMPLES};
pub use disk::{EuclideanSubdisk, Horodisk};
pub use image::{DiskHomeomorphism, ImageDomain, MobiusImage};
pub use rdense::RDenseComplement;
pub(crate) use spec::parse_call as spec_call;

use crate::hyperbolic::{rho, DiskPoint, MobiusAut};
use crate::{Error, Result, Scalar};

/// Conformal map of the disk onto a simply connected entry, written as
/// `u ↦ post(center + scale·u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannMap<T> {
    center: Complex<T>,
    scale: T,
    post: MobiusAut<T>,
}

impl<T: Scalar> RiemannMap<T> {
    pub fn affine(center: Complex<T>, scale: T) -> Self {
        RiemannMap {
            center,
            scale,
            post: MobiusAut::identity(),
        }
    }

    /// `m ∘ self`.
    pub fn then(&self, m: &MobiusAut<T>) -> Self {
        RiemannMap {
            post: m.compose(&self.post),
            ..*self
        }
    }

    pub fn to_raw(&self, u: Complex<T>) -> Complex<T> {
        let v = self.center + u * self.scale;
        self.post.apply_raw(v).unwrap_or(v)
    }

    /// Riemann map `Δ → X`.
    pub fn to(&self, u: DiskPoint<T>) -> DiskPoint<T> {
        self.post
            .apply(DiskPoint::trusted(self.center + u.value() * self.scale))
    }

    pub fn from_raw(&self, x: Complex<T>) -> Complex<T> {
        let v = self.post.invert().apply_raw(x).unwrap_or(x);
        (v - self.center) / self.scale
    }

    /// Inverse map `X → Δ`; fails for points outside `X`.
    pub fn from(&self, x: DiskPoint<T>) -> Result<DiskPoint<T>> {
        DiskPoint::new(self.from_raw(x.value()))
    }
}

/// Interface shared by all catalog entries and their images.
pub trait DomainModel<T: Scalar>: Send + Sync {
    /// Short human readable label (the spec string for catalog entries).
    fn label(&self) -> String;

    /// Exact membership; `z` outside the open unit disk is never contained.
    fn contains(&self, z: Complex<T>) -> bool;

    /// Boundary of `Δ \ X` inside the disk; empty means `X = Δ`.
    fn boundary(&self) -> &[BoundaryPiece<T>];

    /// Present iff the domain is simply connected with a closed-form map.
    fn riemann(&self) -> Option<RiemannMap<T>> {
        None
    }

    fn relatively_compact(&self) -> bool;

    fn expected_bloch(&self) -> bool;

    /// Centers for which Bloch-radius claims are meaningful (truncated nets
    /// restrict this).
    fn admissible_center(&self, _a: DiskPoint<T>) -> bool {
        true
    }

    /// Point of `X` with inradius at least `t`; only non-Bloch entries.
    fn deep_point(&self, _t: T) -> Result<DiskPoint<T>> {
        Err(Error::NoDeepPoints(self.label()))
    }

    fn contains_point(&self, z: DiskPoint<T>) -> bool {
        self.contains(z.value())
    }

    /// ρ-radius of the largest hyperbolic disk centred at `a` inside `X`.
    fn inradius_at(&self, a: DiskPoint<T>) -> Result<T> {
        self.require(a)?;
        Ok(complement_distance(self.boundary(), a))
    }

    /// Intrinsic Poincaré distance of `X`, transported by the Riemann map.
    fn rho_x(&self, u: DiskPoint<T>, v: DiskPoint<T>) -> Result<T> {
        let map = self.riemann().ok_or_else(|| Error::NoRiemannMap(self.label()))?;
        self.require(u)?;
        self.require(v)?;
        Ok(rho(map.from(u)?, map.from(v)?))
    }

    fn require(&self, z: DiskPoint<T>) -> Result<()> {
        if self.contains_point(z) {
            Ok(())
        } else {
            Err(Error::NotInDomain {
                domain: self.label(),
                re: z.value().re.to_f64_lossy(),
                im: z.value().im.to_f64_lossy(),
            })
        }
    }
}

impl<T: Scalar, D: DomainModel<T> + ?Sized> DomainModel<T> for &D {
    fn label(&self) -> String {
        (**self).label()
    }
    fn contains(&self, z: Complex<T>) -> bool {
        (**self).contains(z)
    }
    fn boundary(&self) -> &[BoundaryPiece<T>] {
        (**self).boundary()
    }
    fn riemann(&self) -> Option<RiemannMap<T>> {
        (**self).riemann()
    }
    fn relatively_compact(&self) -> bool {
        (**self).relatively_compact()
    }
    fn expected_bloch(&self) -> bool {
        (**self).expected_bloch()
    }
    fn admissible_center(&self, a: DiskPoint<T>) -> bool {
        (**self).admissible_center(a)
    }
    fn deep_point(&self, t: T) -> Result<DiskPoint<T>> {
        (**self).deep_point(t)
    }
    fn inradius_at(&self, a: DiskPoint<T>) -> Result<T> {
        (**self).inradius_at(a)
    }
    fn rho_x(&self, u: DiskPoint<T>, v: DiskPoint<T>) -> Result<T> {
        (**self).rho_x(u, v)
    }
}

/// The catalog: every entry reachable from the domain spec grammar.
#[derive(Debug, Clone)]
pub enum Domain<T> {
    Disk(EuclideanSubdisk<T>),
    Horodisk(Horodisk<T>),
    RDense(RDenseComplement<T>),
}

impl<T: Scalar> Domain<T> {
    /// Parses `disk(cx,cy,r)`, `horodisk(angle,s)` or `rdense(R,depth)`.
    pub fn parse(spec: &str) -> Result<Self> {
        spec::parse(spec)
    }

    fn inner(&self) -> &dyn DomainModel<T> {
        match self {
            Domain::Disk(d) => d,
            Domain::Horodisk(h) => h,
            Domain::RDense(r) => r,
        }
    }
}

impl<T: Scalar> fmt::Display for Domain<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.inner().label())
    }
}

impl<T: Scalar> DomainModel<T> for Domain<T> {
    fn label(&self) -> String {
        self.inner().label()
    }
    fn contains(&self, z: Complex<T>) -> bool {
        self.inner().contains(z)
    }
    fn boundary(&self) -> &[BoundaryPiece<T>] {
        self.inner().boundary()
    }
    fn riemann(&self) -> Option<RiemannMap<T>> {
        self.inner().riemann()
    }
    fn relatively_compact(&self) -> bool {
        self.inner().relatively_compact()
    }
    fn expected_bloch(&self) -> bool {
        self.inner().expected_bloch()
    }
    fn admissible_center(&self, a: DiskPoint<T>) -> bool {
        self.inner().admissible_center(a)
    }
    fn deep_point(&self, t: T) -> Result<DiskPoint<T>> {
        self.inner().deep_point(t)
    }
    fn inradius_at(&self, a: DiskPoint<T>) -> Result<T> {
        self.inner().inradius_at(a)
    }
    fn rho_x(&self, u: DiskPoint<T>, v: DiskPoint<T>) -> Result<T> {
        self.inner().rho_x(u, v)
    }
}
