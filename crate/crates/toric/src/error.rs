use thiserror::Error;

/// Errors produced by fan, divisor, morphism and MMP operations.
///
/// Variants carry enough context (ray indices, cone generator sets) to point
/// at the offending input; indices refer to the ray order of the fan they
/// came from.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("zero vector where a nonzero lattice vector is required")]
    ZeroVector,
    #[error("vector is not a lattice point: {0}")]
    NotALatticePoint(String),
    #[error("cone is not strongly convex: generators {0:?}")]
    NotStronglyConvex(Vec<usize>),
    #[error("enumeration region is unbounded: functional is not positive on the cone")]
    UnboundedRegion,
    #[error("empty fan")]
    EmptyFan,
    #[error("ray {0} is not primitive")]
    NonPrimitiveRay(usize),
    #[error("not a fan: {0}")]
    NotAFan(String),
    #[error("character is not integral on the lattice")]
    NonIntegralCharacter,
    #[error("divisor is not Q-Cartier")]
    NotQCartier,
    #[error("morphism is not proper")]
    NotProper,
    #[error("cone {0:?} is not compatible with the target fan")]
    IncompatibleCone(Vec<usize>),
    #[error("matrix does not map the source lattice into the target lattice")]
    NonIntegralMap,
    #[error("morphism is not birational")]
    NotBirational,
    #[error("fiber over this cone is reducible; minimal cones: {0:?}")]
    ReducibleFiber(Vec<Vec<usize>>),
    #[error("no unique minimal cone over the given target cone")]
    NoMinimalCone,
    #[error("wall lies on the support boundary")]
    BoundaryWall,
    #[error("the relative curve cone is not pointed")]
    ConeNotPointed,
    #[error("no contracted curves over the target")]
    NoContractedCurves,
    #[error("merged cone union is not convex: rays {0:?}")]
    MergeNotConvex(Vec<usize>),
    #[error("merge does not produce a valid fan: {0}")]
    NotAFanAfterMerge(String),
    #[error("section polyhedron over target cone {0:?} is empty")]
    EmptySectionPolyhedron(Vec<usize>),
    #[error("relative Proj over a non-birational morphism is unsupported")]
    NonBirationalUnsupported,
    #[error("morphism is not small")]
    NotSmall,
    #[error("-D is not ample over the base")]
    MinusDNotAmple,
    #[error("divisor ray is not exceptional")]
    NotExceptional,
    #[error("divisor is not a single exceptional ray")]
    NotIrreducible,
    #[error("no negative extremal ray although the divisor is not nef")]
    NoNegativeRay,
    #[error("MMP exceeded its iteration cap of {0}")]
    IterationCapExceeded(usize),
    #[error("pushforwards disagree on ray {0:?}")]
    PushforwardMismatch(Vec<i64>),
    #[error("canonical divisor is not Q-Cartier")]
    NotQGorenstein,
    #[error("vector is a ray of the fan")]
    RayOfFan,
    #[error("vector lies outside the support of the fan")]
    OutsideSupport,
    #[error("expected a cone of dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("invalid quotient weights")]
    InvalidWeights,
    #[error("completion failed: {0}")]
    CompletionFailed(String),
    #[error("fan is not complete")]
    NotComplete,
    #[error("cannot preserve requested property `{property}`: {detail}")]
    CannotPreserveProperty { property: String, detail: String },
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
