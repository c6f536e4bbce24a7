//! Hyperbolic geometry of the unit disk and random holomorphic iteration.
//!
//! The crate is organised bottom-up:
//!
//! * [`hyperbolic`]: the Poincaré metric, Möbius automorphisms, degree-2
//!   Blaschke products and hyperbolic/Euclidean disk conversion.
//! * [`domain`]: concrete subdomains of the disk with membership, Riemann
//!   maps, intrinsic metrics and inradius fields.
//! * [`bloch`]: numerical search for the ρ-Bloch radius and the
//!   quasiconformal image experiments.
//! * [`maps`] and [`ifs`]: holomorphic map chains and the iterated function
//!   system engine (left compositions `F_n = f_1 ∘ … ∘ f_n`).
//! * [`constructions`]: builders for map sequences with a non-constant limit
//!   and with two accumulation points, plus the two lemma verifiers.
//! * [`io`]: run configuration, reports and output files used by the CLI.
//!
//! All geometry is generic over a [`Scalar`] (`f32` or `f64`). The type
//! aliases at the crate root fix the scalar to `f64`, which is what the
//! constructions and the CLI use.
//!
//! Distances use the normalisation ρ(z) = 1/(1 − |z|²), so
//! `ρ(z, w) = artanh |(z − w)/(1 − w̄z)|`.

pub mod bloch;
pub mod constructions;
pub mod domain;
mod error;
pub mod hyperbolic;
pub mod ifs;
pub mod io;
pub mod maps;
mod scalar;

pub use error::{Error, ErrorKind, Result};
pub use num_complex::Complex;
pub use scalar::Scalar;

/// Complex number over `f64`.
pub type C64 = Complex<f64>;

pub type DiskPoint = hyperbolic::DiskPoint<f64>;
pub type MobiusAut = hyperbolic::MobiusAut<f64>;
pub type Blaschke2 = hyperbolic::Blaschke2<f64>;
pub type HyperbolicDisk = hyperbolic::HyperbolicDisk<f64>;
pub type Domain = domain::Domain<f64>;
pub type RadialStretch = bloch::RadialStretch<f64>;
pub type BlochReport = bloch::BlochReport<f64>;
pub type MapDescriptor = maps::MapDescriptor<f64>;
pub type Theorem7State = constructions::Theorem7State<f64>;
pub type Theorem8State = constructions::Theorem8State<f64>;
