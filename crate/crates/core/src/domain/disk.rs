use num_complex::Complex;

use super::{BoundaryPiece, Curve, DomainModel, RiemannMap};
use crate::hyperbolic::DiskPoint;
use crate::{Error, Result, Scalar};

const MAX_BISECTIONS: usize = 200;

/// Euclidean disk whose closure lies in the open unit disk.
#[derive(Debug, Clone)]
pub struct EuclideanSubdisk<T> {
    center: Complex<T>,
    radius: T,
    boundary: Vec<BoundaryPiece<T>>,
}

impl<T: Scalar> EuclideanSubdisk<T> {
    pub fn new(center: Complex<T>, radius: T) -> Result<Self> {
        let ok = radius > T::zero()
            && radius.is_finite()
            && T::one() - (center.norm() + radius) >= T::boundary_margin();
        if !ok {
            return Err(Error::DiskNotInside {
                re: center.re.to_f64_lossy(),
                im: center.im.to_f64_lossy(),
                radius: radius.to_f64_lossy(),
            });
        }
        Ok(EuclideanSubdisk {
            center,
            radius,
            boundary: vec![BoundaryPiece::Curve(Curve::circle(center, radius))],
        })
    }

    pub fn center(&self) -> Complex<T> {
        self.center
    }

    pub fn radius(&self) -> T {
        self.radius
    }
}

impl<T: Scalar> DomainModel<T> for EuclideanSubdisk<T> {
    fn label(&self) -> String {
        format!("disk({},{},{})", self.center.re, self.center.im, self.radius)
    }

    fn contains(&self, z: Complex<T>) -> bool {
        (z - self.center).norm() < self.radius
    }

    fn boundary(&self) -> &[BoundaryPiece<T>] {
        &self.boundary
    }

    fn riemann(&self) -> Option<RiemannMap<T>> {
        Some(RiemannMap::affine(self.center, self.radius))
    }

    fn relatively_compact(&self) -> bool {
        true
    }

    fn expected_bloch(&self) -> bool {
        true
    }
}

/// Horodisk `{|z − (1 − s)ξ| < s}` tangent to the unit circle at `ξ`.
#[derive(Debug, Clone)]
pub struct Horodisk<T> {
    angle: T,
    s: T,
    boundary: Vec<BoundaryPiece<T>>,
}

impl<T: Scalar> Horodisk<T> {
    /// `angle` fixes the tangency point `ξ = e^{i·angle}`; `s ∈ (0, 1)`.
    pub fn new(angle: T, s: T) -> Result<Self> {
        if !(s > T::zero() && s < T::one() && angle.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "horodisk needs a finite angle and 0 < s < 1, got angle {angle}, s {s}"
            )));
        }
        let center = Complex::from_polar(T::one() - s, angle);
        // parameterised from the tangency point: φ = 0 is ξ itself
        let xi = Complex::from_polar(T::one(), angle);
        let curve = Curve::new(move |phi: T| center + xi * Complex::from_polar(s, phi));
        Ok(Horodisk {
            angle,
            s,
            boundary: vec![BoundaryPiece::Curve(curve)],
        })
    }

    pub fn tangency(&self) -> Complex<T> {
        Complex::from_polar(T::one(), self.angle)
    }

    pub fn angle(&self) -> T {
        self.angle
    }

    pub fn euclidean_center(&self) -> Complex<T> {
        Complex::from_polar(T::one() - self.s, self.angle)
    }

    pub fn euclidean_radius(&self) -> T {
        self.s
    }

    /// Point on the geodesic from the Euclidean center toward `ξ`, at
    /// ρ-distance `u` from the center.
    fn axis_point(&self, u: T) -> Result<DiskPoint<T>> {
        if u == T::zero() {
            return DiskPoint::new(self.euclidean_center());
        }
        let x = ((T::one() - self.s).atanh() + u).tanh();
        DiskPoint::new(Complex::from_polar(x, self.angle)).map_err(|_| Error::DeepPointExhausted {
            domain: self.label(),
            depth: u.to_f64_lossy(),
        })
    }
}

impl<T: Scalar> DomainModel<T> for Horodisk<T> {
    fn label(&self) -> String {
        format!("horodisk({},{})", self.angle, self.s)
    }

    fn contains(&self, z: Complex<T>) -> bool {
        (z - self.euclidean_center()).norm() < self.s
    }

    fn boundary(&self) -> &[BoundaryPiece<T>] {
        &self.boundary
    }

    fn riemann(&self) -> Option<RiemannMap<T>> {
        Some(RiemannMap::affine(self.euclidean_center(), self.s))
    }

    fn relatively_compact(&self) -> bool {
        false
    }

    fn expected_bloch(&self) -> bool {
        false
    }

    /// Walks from the Euclidean center toward the tangency point and inverts
    /// the inradius along that geodesic by bisection (tolerance 1e-9 in ρ).
    fn deep_point(&self, t: T) -> Result<DiskPoint<T>> {
        if !(t >= T::zero()) {
            return Err(Error::InvalidParameter(format!("deep_point needs t >= 0, got {t}")));
        }
        let anchor = self.axis_point(T::zero())?;
        if self.inradius_at(anchor)? >= t {
            return Ok(anchor);
        }
        let mut lo = T::zero();
        let mut hi = T::one();
        loop {
            let p = self.axis_point(hi)?;
            if self.inradius_at(p)? >= t {
                break;
            }
            lo = hi;
            hi = hi + hi;
        }
        let tol = T::lit(1e-9);
        for _ in 0..MAX_BISECTIONS {
            if hi - lo <= tol {
                break;
            }
            let mid = (lo + hi) * T::lit(0.5);
            if self.inradius_at(self.axis_point(mid)?)? >= t {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        self.axis_point(hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::rho;
    use approx::assert_abs_diff_eq;

    type P = DiskPoint<f64>;

    fn horo() -> Horodisk<f64> {
        Horodisk::new(0.0, 0.5).unwrap()
    }

    #[test]
    fn membership_examples() {
        let h = horo();
        assert!(h.contains(Complex::new(0.6, 0.0)));
        assert!(!h.contains(Complex::new(-0.5, 0.0)));
        assert!(!h.contains(Complex::new(1.0, 0.0)));
        let d = EuclideanSubdisk::new(Complex::new(0.0, 0.0), 0.5).unwrap();
        assert!(d.contains(Complex::new(0.0, 0.0)));
        assert!(!d.contains(Complex::new(0.5, 0.0)));
    }

    #[test]
    fn disk_must_be_relatively_compact() {
        assert!(EuclideanSubdisk::new(Complex::new(0.5, 0.0), 0.5f64).is_err());
        assert!(EuclideanSubdisk::new(Complex::new(0.0, 0.0), 0.0f64).is_err());
        assert!(Horodisk::new(0.0, 1.0f64).is_err());
        assert!(Horodisk::new(0.0, 0.0f64).is_err());
    }

    #[test]
    fn inradius_examples() {
        let d = EuclideanSubdisk::new(Complex::new(0.0, 0.0), 0.5).unwrap();
        assert_abs_diff_eq!(d.inradius_at(P::origin()).unwrap(), 0.5493061443, epsilon = 1e-9);
        // the nearest horocycle point to a real x > 0 is the origin, so R = artanh x
        let h = horo();
        for x in [0.5, 0.7, 0.9, 0.999, 1.0 - 1e-7] {
            let got = h.inradius_at(P::real(x)).unwrap();
            assert_abs_diff_eq!(got, rho(P::origin(), P::real(x)), epsilon = 1e-9);
        }
    }

    #[test]
    fn inradius_vanishes_near_boundary_of_x() {
        let d = EuclideanSubdisk::new(Complex::new(0.0, 0.0), 0.5).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [1e-1, 1e-2, 1e-3, 1e-4, 1e-6] {
            let r = d.inradius_at(P::real(0.5 - eps)).unwrap();
            assert!(r < prev);
            prev = r;
        }
        assert!(prev < 1e-5);
        let h = horo();
        let r = h.inradius_at(P::from_parts(0.5, 0.5 - 1e-6).unwrap()).unwrap();
        assert!(r < 1e-5);
    }

    #[test]
    fn deep_point_examples() {
        let h = horo();
        assert_eq!(h.deep_point(0.0).unwrap().value(), Complex::new(0.5, 0.0));
        let p2 = h.deep_point(2.0).unwrap();
        assert_eq!(p2.value().im, 0.0);
        assert!(p2.value().re > 0.5);
        assert!(h.inradius_at(p2).unwrap() >= 2.0);
        assert_abs_diff_eq!(p2.value().re, 2f64.tanh(), epsilon = 1e-8);
        let p5 = h.deep_point(5.0).unwrap();
        assert!(p5.norm() > p2.norm());
        for t in 1..=5 {
            let p = h.deep_point(t as f64).unwrap();
            assert!(h.inradius_at(p).unwrap() >= t as f64);
        }
    }

    #[test]
    fn deep_point_exhaustion_is_loud() {
        let h = horo();
        assert!(matches!(h.deep_point(40.0), Err(Error::DeepPointExhausted { .. })));
        let d = EuclideanSubdisk::new(Complex::new(0.0, 0.0), 0.5).unwrap();
        assert!(matches!(d.deep_point(1.0), Err(Error::NoDeepPoints(_))));
    }

    #[test]
    fn rotated_horodisk() {
        let h = Horodisk::new(2.0, 0.3).unwrap();
        let p = h.deep_point(3.0).unwrap();
        assert!(h.contains_point(p));
        assert_abs_diff_eq!(p.value().arg(), 2.0, epsilon = 1e-12);
        assert!(h.inradius_at(p).unwrap() >= 3.0);
    }
}
