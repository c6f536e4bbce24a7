use num_complex::Complex;

use super::{BoundaryPiece, DomainModel, PunctureRing, RiemannMap};
use crate::hyperbolic::{DiskPoint, MobiusAut};
use crate::{Result, Scalar};

/// A self-homeomorphism of the disk that domains can be pushed through.
pub trait DiskHomeomorphism<T: Scalar>: Clone + Send + Sync + 'static {
    fn forward(&self, z: Complex<T>) -> Complex<T>;
    fn inverse(&self, z: Complex<T>) -> Complex<T>;

    fn label(&self) -> String;

    /// Image of a puncture ring when it is again a ring.
    fn map_ring(&self, _ring: &PunctureRing<T>) -> Option<PunctureRing<T>> {
        None
    }

    /// Present when the map is a conformal automorphism.
    fn as_mobius(&self) -> Option<MobiusAut<T>> {
        None
    }
}

impl<T: Scalar> DiskHomeomorphism<T> for MobiusAut<T> {
    fn forward(&self, z: Complex<T>) -> Complex<T> {
        self.apply_raw(z).unwrap_or(z)
    }

    fn inverse(&self, z: Complex<T>) -> Complex<T> {
        self.invert().apply_raw(z).unwrap_or(z)
    }

    fn label(&self) -> String {
        let a = self.zero_point().value();
        format!("mobius({},{},{})", a.re, a.im, self.theta())
    }

    fn as_mobius(&self) -> Option<MobiusAut<T>> {
        Some(*self)
    }
}

/// `f(X)` for a disk homeomorphism `f`; membership is tested through `f⁻¹`
/// and the complement boundary is pushed forward through `f`.
#[derive(Debug, Clone)]
pub struct ImageDomain<D, F, T> {
    inner: D,
    map: F,
    boundary: Vec<BoundaryPiece<T>>,
}

pub type MobiusImage<D, T> = ImageDomain<D, MobiusAut<T>, T>;

impl<T: Scalar, D: DomainModel<T>, F: DiskHomeomorphism<T>> ImageDomain<D, F, T> {
    pub fn new(inner: D, map: F) -> Self {
        let boundary = inner
            .boundary()
            .iter()
            .map(|piece| match piece {
                BoundaryPiece::Curve(c) => {
                    let f = map.clone();
                    BoundaryPiece::Curve(c.map(move |z| f.forward(z)))
                }
                BoundaryPiece::Rings(rings) => {
                    let mapped: Option<Vec<_>> = rings.iter().map(|r| map.map_ring(r)).collect();
                    match mapped {
                        Some(rs) => BoundaryPiece::Rings(rs),
                        None => BoundaryPiece::Points(
                            rings
                                .iter()
                                .flat_map(|r| r.points())
                                .map(|z| map.forward(z))
                                .collect(),
                        ),
                    }
                }
                BoundaryPiece::Points(ps) => {
                    BoundaryPiece::Points(ps.iter().map(|&z| map.forward(z)).collect())
                }
            })
            .collect();
        ImageDomain {
            inner,
            map,
            boundary,
        }
    }

    pub fn map(&self) -> &F {
        &self.map
    }

    pub fn inner(&self) -> &D {
        &self.inner
    }

    fn pull(&self, z: DiskPoint<T>) -> Option<DiskPoint<T>> {
        DiskPoint::new(self.map.inverse(z.value())).ok()
    }
}

impl<T: Scalar, D: DomainModel<T>, F: DiskHomeomorphism<T>> DomainModel<T> for ImageDomain<D, F, T> {
    fn label(&self) -> String {
        format!("{}[{}]", self.map.label(), self.inner.label())
    }

    fn contains(&self, z: Complex<T>) -> bool {
        if z.norm() >= T::one() {
            return false;
        }
        self.inner.contains(self.map.inverse(z))
    }

    fn boundary(&self) -> &[BoundaryPiece<T>] {
        &self.boundary
    }

    fn riemann(&self) -> Option<RiemannMap<T>> {
        let m = self.map.as_mobius()?;
        Some(self.inner.riemann()?.then(&m))
    }

    fn relatively_compact(&self) -> bool {
        self.inner.relatively_compact()
    }

    fn expected_bloch(&self) -> bool {
        self.inner.expected_bloch()
    }

    fn admissible_center(&self, a: DiskPoint<T>) -> bool {
        self.pull(a).is_some_and(|p| self.inner.admissible_center(p))
    }

    fn deep_point(&self, t: T) -> Result<DiskPoint<T>> {
        // only isometries carry inradius over unchanged
        match self.map.as_mobius() {
            Some(m) => Ok(m.apply(self.inner.deep_point(t)?)),
            None => Err(crate::Error::NoDeepPoints(self.label())),
        }
    }
}
