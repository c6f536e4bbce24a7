use num_complex::Complex;

use super::{BoundaryPiece, DomainModel, PunctureRing};
use crate::hyperbolic::{rho, DiskPoint};
use crate::{Error, Result, Scalar};

/// The disk minus a hyperbolic `R`-net of punctures.
///
/// Punctures sit on concentric hyperbolic circles of ρ-radius `0, R, 2R, …`
/// up to the first multiple of `R` reaching `depth`. Ring `k` carries the
/// fewest evenly spaced points whose neighbours are at most `R/2` apart, so
/// every point within the covered depth is at most `R` from a puncture.
#[derive(Debug, Clone)]
pub struct RDenseComplement<T> {
    mesh: T,
    depth: T,
    boundary: Vec<BoundaryPiece<T>>,
}

impl<T: Scalar> RDenseComplement<T> {
    pub fn new(mesh: T, depth: T) -> Result<Self> {
        if !(mesh > T::zero() && depth > T::zero() && depth.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "rdense needs R > 0 and depth > 0, got R {mesh}, depth {depth}"
            )));
        }
        let rings_needed = (depth / mesh).ceil().to_usize().unwrap_or(0);
        if rings_needed > 10_000 {
            return Err(Error::InvalidParameter(format!(
                "rdense with R {mesh} and depth {depth} needs too many rings"
            )));
        }
        let mut rings = Vec::with_capacity(rings_needed + 1);
        rings.push(PunctureRing {
            radius: T::zero(),
            count: 1,
            offset: T::zero(),
        });
        let two = T::lit(2.0);
        for k in 1..=rings_needed {
            let r = mesh * T::from_usize(k).unwrap();
            let radius = r.tanh();
            if T::one() - radius < T::boundary_margin() {
                return Err(Error::InvalidParameter(format!(
                    "rdense depth {depth} exceeds the representable disk"
                )));
            }
            // chord between neighbours at angle α on a circle of ρ-radius r:
            // cosh(2d) = 1 + sinh²(2r)(1 − cos α); require 2d ≤ R
            let sh = (two * r).sinh();
            let max_one_minus_cos = (mesh.cosh() - T::one()) / (sh * sh);
            let alpha = if max_one_minus_cos >= two {
                T::PI()
            } else {
                (T::one() - max_one_minus_cos).acos()
            };
            let count = (T::TAU() / alpha).ceil().to_usize().unwrap_or(1).max(1);
            rings.push(PunctureRing {
                radius,
                count,
                // stagger rings so punctures do not line up radially
                offset: T::lit(0.5) * T::TAU() / T::from_usize(count).unwrap() * T::from_usize(k % 2).unwrap(),
            });
        }
        Ok(RDenseComplement {
            mesh,
            depth,
            boundary: vec![BoundaryPiece::Rings(rings)],
        })
    }

    pub fn mesh(&self) -> T {
        self.mesh
    }

    pub fn depth(&self) -> T {
        self.depth
    }

    pub fn rings(&self) -> &[PunctureRing<T>] {
        match &self.boundary[0] {
            BoundaryPiece::Rings(r) => r,
            _ => unreachable!(),
        }
    }

    pub fn puncture_count(&self) -> usize {
        self.rings().iter().map(|r| r.count).sum()
    }

    /// ρ-radius up to which the net is complete.
    pub fn covered_depth(&self) -> T {
        self.mesh * T::from_usize(self.rings().len() - 1).unwrap()
    }
}

impl<T: Scalar> DomainModel<T> for RDenseComplement<T> {
    fn label(&self) -> String {
        format!("rdense({},{})", self.mesh, self.depth)
    }

    fn contains(&self, z: Complex<T>) -> bool {
        match DiskPoint::new(z) {
            Ok(p) => self.boundary[0].distance(p) > T::zero(),
            Err(_) => false,
        }
    }

    fn boundary(&self) -> &[BoundaryPiece<T>] {
        &self.boundary
    }

    fn relatively_compact(&self) -> bool {
        false
    }

    fn expected_bloch(&self) -> bool {
        true
    }

    fn admissible_center(&self, a: DiskPoint<T>) -> bool {
        rho(DiskPoint::origin(), a) <= self.depth - self.mesh
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::rho_raw;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn punctures_are_excluded() {
        let x = RDenseComplement::new(0.5f64, 2.0).unwrap();
        assert!(!x.contains(Complex::new(0.0, 0.0)));
        let p = x.rings()[2].point(3);
        assert!(!x.contains(p));
        assert!(x.contains(p * 0.999));
        assert!(!x.contains(Complex::new(1.0, 0.0)));
    }

    #[test]
    fn r_net_property() {
        let x = RDenseComplement::new(0.5f64, 4.0).unwrap();
        let depth = x.covered_depth();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let all: Vec<_> = x.rings().iter().flat_map(|r| r.points()).collect();
        for i in 0..10_000 {
            let r = rng.gen_range(0.0..depth);
            let z = Complex::from_polar(r.tanh(), rng.gen_range(0.0..std::f64::consts::TAU));
            let near = x.boundary()[0].distance(DiskPoint::new(z).unwrap());
            assert!(near <= 0.5 + 1e-9, "point {z} at {near}");
            if i % 100 == 0 {
                // brute force over every puncture
                let brute = all.iter().map(|&p| rho_raw(z, p)).fold(f64::INFINITY, f64::min);
                assert!((brute - near).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn admissibility_follows_depth() {
        let x = RDenseComplement::new(0.5f64, 4.0).unwrap();
        assert!(x.admissible_center(DiskPoint::real(3.4f64.tanh())));
        assert!(!x.admissible_center(DiskPoint::real(3.6f64.tanh())));
        assert!(x.puncture_count() > 1000);
    }
}
