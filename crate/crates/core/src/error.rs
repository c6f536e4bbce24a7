use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used for CLI exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// A documented precondition was violated by the caller.
    Precondition,
    /// A numerical procedure failed (non-convergence, exhausted search, boundary guard).
    Numeric,
    /// Reading or writing files failed.
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({re}, {im}) is not inside the open unit disk")]
    OutsideDisk { re: f64, im: f64 },
    #[error("blaschke parameter must be nonzero")]
    ZeroBlaschkeParameter,
    #[error("preimage target must be nonzero")]
    ZeroPreimageTarget,
    #[error("preimage target too far from the origin: rho(0, c) = {rho} >= 1")]
    PreimageTargetTooFar { rho: f64 },
    #[error("preimage ordering is ambiguous: |z1| = |z2| = {modulus}")]
    AmbiguousPreimages { modulus: f64 },
    #[error("euclidean disk (center ({re}, {im}), radius {radius}) is not strictly inside the unit disk")]
    DiskNotInside { re: f64, im: f64, radius: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point ({re}, {im}) does not belong to the domain {domain}")]
    NotInDomain { domain: String, re: f64, im: f64 },
    #[error("domain {0} has no Riemann map")]
    NoRiemannMap(String),
    #[error("domain {0} is a Bloch domain and has no deep-point parameterization")]
    NoDeepPoints(String),
    #[error("deep point search exhausted in {domain}: depth {depth} reaches the boundary guard")]
    DeepPointExhausted { domain: String, depth: f64 },
    #[error("search budget exhausted in {domain}: no admissible center within depth {depth}")]
    EmptySearch { domain: String, depth: f64 },
    #[error("map chain does not land in its target domain at sample ({re}, {im})")]
    ChainLeavesTarget { re: f64, im: f64 },
    #[error("orbit reached the boundary guard at ({re}, {im})")]
    BoundaryGuard { re: f64, im: f64 },
    #[error("iteration did not converge within {steps} steps (last step size {last_step})")]
    Undecided { steps: usize, last_step: f64 },
    #[error("map is a conformal automorphism; iterates do not converge")]
    Automorphism,
    #[error("construction step {step} failed: {bound}")]
    ConstructionFailed { step: usize, bound: String },
    #[error("rotation scan failed at step {step}: no preimage inside the domain on the circle of radius {radius}")]
    RotationScanFailed { step: usize, radius: f64 },
    #[error("domain spec `{spec}`: {reason}")]
    DomainSpec { spec: String, reason: String },
    #[error("map spec `{spec}`: {reason}")]
    MapSpec { spec: String, reason: String },
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            DeepPointExhausted { .. }
            | EmptySearch { .. }
            | ChainLeavesTarget { .. }
            | BoundaryGuard { .. }
            | Undecided { .. }
            | ConstructionFailed { .. }
            | RotationScanFailed { .. }
            | AmbiguousPreimages { .. } => ErrorKind::Numeric,
            Io { .. } => ErrorKind::Io,
            _ => ErrorKind::Precondition,
        }
    }

    pub(crate) fn outside<T: crate::Scalar>(z: num_complex::Complex<T>) -> Self {
        Error::OutsideDisk {
            re: z.re.to_f64_lossy(),
            im: z.im.to_f64_lossy(),
        }
    }
}
