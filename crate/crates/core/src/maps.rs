//! Holomorphic maps `Δ → Δ` as chains of primitive pieces.

use std::fmt;

use num_complex::Complex;

use crate::domain::{DomainModel, RiemannMap};
use crate::hyperbolic::{Blaschke2, DiskPoint, MobiusAut};
use crate::{Error, Result, Scalar};

/// Orbits are aborted once `1 − |z|` drops below this.
pub const BOUNDARY_GUARD: f64 = 1e-14;

/// One primitive holomorphic map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece<T> {
    Mobius(MobiusAut<T>),
    Blaschke(Blaschke2<T>),
    /// `z ↦ scale·z + shift` with `|scale| + |shift| ≤ 1`.
    Affine { scale: Complex<T>, shift: Complex<T> },
    /// `z ↦ z^k`, `k ≥ 1`.
    Power(u32),
    RiemannTo(RiemannMap<T>),
    RiemannFrom(RiemannMap<T>),
}

impl<T: Scalar> Piece<T> {
    pub fn affine(scale: Complex<T>, shift: Complex<T>) -> Result<Self> {
        if !(scale.norm() + shift.norm() <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "affine map z -> {scale}z + {shift} does not map the disk into itself"
            )));
        }
        Ok(Piece::Affine { scale, shift })
    }

    pub fn power(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("power map needs k >= 1".into()));
        }
        Ok(Piece::Power(k))
    }

    #[inline]
    pub fn apply_raw(&self, z: Complex<T>) -> Complex<T> {
        match self {
            Piece::Mobius(m) => m.apply_raw(z).unwrap_or(z),
            Piece::Blaschke(b) => b.apply_raw(z),
            Piece::Affine { scale, shift } => *scale * z + *shift,
            Piece::Power(k) => z.powu(*k),
            Piece::RiemannTo(r) => r.to_raw(z),
            Piece::RiemannFrom(r) => r.from_raw(z),
        }
    }

    fn is_automorphism(&self) -> bool {
        match self {
            Piece::Mobius(_) => true,
            Piece::Affine { scale, shift } => scale.norm() == T::one() && shift.norm() == T::zero(),
            Piece::Power(k) => *k == 1,
            _ => false,
        }
    }
}

impl<T: Scalar> fmt::Display for Piece<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Piece::Mobius(m) => {
                let a = m.zero_point().value();
                write!(f, "mobius({},{},{})", a.re, a.im, m.theta())
            }
            Piece::Blaschke(b) => {
                let a = b.parameter().value();
                write!(f, "blaschke({},{})", a.re, a.im)
            }
            Piece::Affine { scale, shift } => {
                write!(f, "affine({},{},{},{})", scale.re, scale.im, shift.re, shift.im)
            }
            Piece::Power(k) => write!(f, "power({k})"),
            Piece::RiemannTo(_) => f.write_str("riemann_to"),
            Piece::RiemannFrom(_) => f.write_str("riemann_from"),
        }
    }
}

/// A chain of pieces applied left to right: `[p1, p2]` is `p2 ∘ p1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MapDescriptor<T> {
    pieces: Vec<Piece<T>>,
    target: Option<String>,
}

/// Sample points used to check that a chain lands in its target.
fn check_samples<T: Scalar>() -> impl Iterator<Item = DiskPoint<T>> {
    [0.0, 0.3, 0.6, 0.9, 0.99].into_iter().flat_map(|r| {
        (0..16).map(move |k| {
            let z = Complex::from_polar(T::lit(r), T::lit(k as f64 * std::f64::consts::TAU / 16.0));
            DiskPoint::trusted(z)
        })
    })
}

impl<T: Scalar> MapDescriptor<T> {
    pub fn new(pieces: Vec<Piece<T>>) -> Self {
        MapDescriptor {
            pieces,
            target: None,
        }
    }

    /// Builds a chain and checks on samples that it maps into `target`.
    pub fn into_domain<D: DomainModel<T> + ?Sized>(pieces: Vec<Piece<T>>, target: &D) -> Result<Self> {
        let map = MapDescriptor {
            pieces,
            target: Some(target.label()),
        };
        for z in check_samples() {
            let w = map.apply_raw(z.value());
            if !target.contains(w) {
                return Err(Error::ChainLeavesTarget {
                    re: z.value().re.to_f64_lossy(),
                    im: z.value().im.to_f64_lossy(),
                });
            }
        }
        Ok(map)
    }

    /// Parses pieces separated by `;`, applied left to right:
    /// `mobius(re,im,theta)`, `blaschke(re,im)`, `affine(s,b)` (real),
    /// `affine(s_re,s_im,b_re,b_im)`, `power(k)`.
    pub fn parse(spec: &str) -> Result<Self> {
        let fail = |reason: String| Error::MapSpec {
            spec: spec.to_string(),
            reason,
        };
        let mut pieces = Vec::new();
        for part in spec.split(';').filter(|p| !p.trim().is_empty()) {
            let (name, args) = crate::domain::spec_call(part).map_err(fail)?;
            let c = |re: f64, im: f64| Complex::new(T::lit(re), T::lit(im));
            let piece = match (name.as_str(), args.as_slice()) {
                ("mobius", [re, im, th]) => DiskPoint::new(c(*re, *im))
                    .map(|a| Piece::Mobius(MobiusAut::new(a, T::lit(*th)))),
                ("blaschke", [re, im]) => {
                    DiskPoint::new(c(*re, *im)).and_then(Blaschke2::new).map(Piece::Blaschke)
                }
                ("affine", [s, b]) => Piece::affine(c(*s, 0.0), c(*b, 0.0)),
                ("affine", [sr, si, br, bi]) => Piece::affine(c(*sr, *si), c(*br, *bi)),
                ("power", [k]) if *k >= 1.0 && k.fract() == 0.0 => Piece::power(*k as u32),
                _ => {
                    return Err(fail(format!(
                        "cannot read piece `{}` (expected mobius(re,im,theta), blaschke(re,im), affine(s,b), affine(sr,si,br,bi) or power(k))",
                        part.trim()
                    )))
                }
            };
            pieces.push(piece.map_err(|e| fail(e.to_string()))?);
        }
        if pieces.is_empty() {
            return Err(fail("empty map".into()));
        }
        Ok(MapDescriptor::new(pieces))
    }

    pub fn pieces(&self) -> &[Piece<T>] {
        &self.pieces
    }

    pub fn target(&self) -> Option<&str> {
        self.target.as_deref()
    }

    /// True when every piece is a conformal automorphism of the disk.
    pub fn is_automorphism(&self) -> bool {
        self.pieces.iter().all(Piece::is_automorphism)
    }

    pub fn apply_raw(&self, z: Complex<T>) -> Complex<T> {
        self.pieces.iter().fold(z, |z, p| p.apply_raw(z))
    }

    /// Evaluates the chain, aborting when an intermediate value comes within
    /// [`BOUNDARY_GUARD`] of the unit circle.
    pub fn apply(&self, z: DiskPoint<T>) -> Result<DiskPoint<T>> {
        let guard = T::lit(BOUNDARY_GUARD);
        let mut w = z.value();
        for p in &self.pieces {
            w = p.apply_raw(w);
            if !(T::one() - w.norm() >= guard) {
                return Err(Error::BoundaryGuard {
                    re: w.re.to_f64_lossy(),
                    im: w.im.to_f64_lossy(),
                });
            }
        }
        Ok(DiskPoint::trusted(w))
    }
}

impl<T: Scalar> fmt::Display for MapDescriptor<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{p}")?;
        }
        if let Some(t) = &self.target {
            write!(f, " -> {t}")?;
        }
        Ok(())
    }
}

/// `F_n(z) = f_1(f_2(…f_n(z)))`: the last map is applied first.
pub fn compose_eval<T: Scalar>(seq: &[MapDescriptor<T>], z: DiskPoint<T>, n: usize) -> Result<DiskPoint<T>> {
    assert!(n <= seq.len(), "compose_eval: n = {n} exceeds {} maps", seq.len());
    seq[..n].iter().rev().try_fold(z, |w, f| f.apply(w))
}

/// Covering (here: Riemann) map `π = φ ∘ M` with `M = two_point(u0, φ⁻¹(x0), θ)`,
/// so `π(u0) = x0`; `theta` is the rotation freedom about `u0`.
pub fn covering_with_basepoint<T: Scalar, D: DomainModel<T> + ?Sized>(
    domain: &D,
    u0: DiskPoint<T>,
    x0: DiskPoint<T>,
    theta: T,
) -> Result<MapDescriptor<T>> {
    let phi = domain.riemann().ok_or_else(|| Error::NoRiemannMap(domain.label()))?;
    domain.require(x0)?;
    let m = MobiusAut::two_point(u0, phi.from(x0)?, theta);
    MapDescriptor::into_domain(vec![Piece::Mobius(m), Piece::RiemannTo(phi)], domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::hyperbolic::rho;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type P = DiskPoint<f64>;

    #[test]
    fn empty_composition_is_identity() {
        let seq: Vec<MapDescriptor<f64>> = Vec::new();
        let z = P::from_parts(0.3, -0.2).unwrap();
        assert_eq!(compose_eval(&seq, z, 0).unwrap(), z);
    }

    #[test]
    fn inverse_pair_cancels() {
        let m = MobiusAut::new(P::from_parts(0.4, 0.1).unwrap(), 0.9);
        let seq = vec![
            MapDescriptor::new(vec![Piece::Mobius(m)]),
            MapDescriptor::new(vec![Piece::Mobius(m.invert())]),
        ];
        let z = P::from_parts(-0.3, 0.5).unwrap();
        let w = compose_eval(&seq, z, 2).unwrap();
        assert!((w.value() - z.value()).norm() < 1e-12);
    }

    #[test]
    fn two_blaschke_steps() {
        let b = Blaschke2::new(P::real(0.9)).unwrap();
        let f = MapDescriptor::new(vec![Piece::Blaschke(b)]);
        let seq = vec![f.clone(), f];
        let w = compose_eval(&seq, P::real(0.5), 2).unwrap();
        // A(−0.363636…) = −0.363636…·(−1.263636…)/(1 + 0.327272…)
        let inner = -0.2 / 0.55;
        let oracle = inner * (inner - 0.9) / (1.0 - 0.9 * inner);
        assert_abs_diff_eq!(w.value().re, oracle, epsilon = 1e-15);
        assert_abs_diff_eq!(w.value().re, 0.3462017435, epsilon = 1e-9);
    }

    #[test]
    fn evaluation_order_is_innermost_last() {
        let sq = MapDescriptor::new(vec![Piece::Power(2)]);
        let half = MapDescriptor::new(vec![Piece::affine(Complex::new(0.5, 0.0), Complex::new(0.0, 0.0)).unwrap()]);
        // F_2 = sq ∘ half: (0.5·0.8)² = 0.16
        let w = compose_eval(&[sq, half], P::real(0.8), 2).unwrap();
        assert_abs_diff_eq!(w.value().re, 0.16, epsilon = 1e-15);
    }

    #[test]
    fn parses_map_specs() {
        let m = MapDescriptor::<f64>::parse("affine(0.5,0.2)").unwrap();
        assert_abs_diff_eq!(m.apply(P::real(0.4)).unwrap().value().re, 0.4, epsilon = 1e-15);
        let m = MapDescriptor::<f64>::parse("blaschke(0.9,0); mobius(0.1,0,0)").unwrap();
        assert_eq!(m.pieces().len(), 2);
        assert!(MapDescriptor::<f64>::parse("mobius(0.1,0,0)").unwrap().is_automorphism());
        for bad in ["affine(0.8,0.5)", "power(0)", "blaschke(0,0)", "twist(1)", "", "mobius(2,0,0)"] {
            assert!(matches!(MapDescriptor::<f64>::parse(bad), Err(Error::MapSpec { .. })), "{bad}");
        }
    }

    #[test]
    fn boundary_guard_aborts() {
        let m = MapDescriptor::<f64>::parse("affine(0.5,0.5)").unwrap();
        let mut z = P::real(0.9);
        let mut hit = false;
        for _ in 0..200 {
            match m.apply(z) {
                Ok(w) => z = w,
                Err(Error::BoundaryGuard { .. }) => {
                    hit = true;
                    break;
                }
                Err(e) => panic!("{e}"),
            }
        }
        assert!(hit);
    }

    #[test]
    fn covering_examples() {
        let x = Domain::<f64>::parse("horodisk(0,0.5)").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for theta in [0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI] {
            let pi = covering_with_basepoint(&x, P::origin(), P::real(0.5), theta).unwrap();
            assert!((pi.apply(P::origin()).unwrap().value() - Complex::new(0.5, 0.0)).norm() < 1e-10);
            for _ in 0..100 {
                let p = P::new(Complex::from_polar(rng.gen::<f64>() * 0.95, rng.gen_range(0.0..6.3))).unwrap();
                let q = P::new(Complex::from_polar(rng.gen::<f64>() * 0.95, rng.gen_range(0.0..6.3))).unwrap();
                let dx = x.rho_x(pi.apply(p).unwrap(), pi.apply(q).unwrap()).unwrap();
                assert!((dx - rho(p, q)).abs() < 1e-10);
            }
        }
        let r = Domain::<f64>::parse("rdense(0.5,2)").unwrap();
        assert!(matches!(
            covering_with_basepoint(&r, P::origin(), P::real(0.3), 0.0),
            Err(Error::NoRiemannMap(_))
        ));
        assert!(covering_with_basepoint(&x, P::origin(), P::real(-0.5), 0.0).is_err());
    }

    #[test]
    fn into_domain_rejects_escaping_chain() {
        let x = Domain::<f64>::parse("disk(0,0,0.3)").unwrap();
        let piece = Piece::affine(Complex::new(0.5, 0.0), Complex::new(0.0, 0.0)).unwrap();
        assert!(matches!(
            MapDescriptor::into_domain(vec![piece], &x),
            Err(Error::ChainLeavesTarget { .. })
        ));
    }
}
