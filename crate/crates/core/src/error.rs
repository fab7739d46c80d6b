use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("relator {index} violates C'(1/6): piece of length {piece} in relator of length {len}")]
    RelatorViolation { index: usize, piece: usize, len: usize },
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),
    #[error("letter {0} is outside the alphabet")]
    InvalidLetter(i32),
    #[error("elements belong to different group specs")]
    SpecMismatch,
    #[error("coset search exhausted its exponent bound {bound}")]
    BoundedSearchExhausted { bound: i64 },
    #[error("ball exceeds the vertex cap of {cap}")]
    SizeLimitExceeded { cap: usize },
    #[error("path leaves the finite ball at {0}")]
    OutOfBall(String),
    #[error("vertex {0} is not adjacent to the combing base")]
    NotAdjacent(usize),
    #[error("edge endpoint {0} already lies on the path")]
    EndpointOnPath(usize),
    #[error("consecutive vertices {0} and {1} are not adjacent")]
    NotAPath(usize, usize),
    #[error("loop edge ({0}, {1}) is not in the complex")]
    NotInComplex(usize, usize),
    #[error("cone transit {0} -> {1} does not stay in one coset")]
    TransitUnresolvable(usize, usize),
    #[error("edge group of edge {edge} fixes {count} vertices of piece {piece}, expected exactly one")]
    FixedPointNotUnique { edge: usize, piece: usize, count: usize },
    #[error("no attachment point recorded for tree vertex {0}")]
    AttachmentMissing(usize),
    #[error("maximality of edge group {0} cannot be verified")]
    MaximalityUnverifiable(usize),
    #[error("edge group {0} is not maximal cyclic in either endpoint group")]
    NotMaximalCyclic(usize),
    #[error("edge group {0} is peripheral in both endpoint groups")]
    PeripheralEdge(usize),
    #[error("missing value on edge ({0}, {1})")]
    MissingEdgeValue(usize, usize),
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
}
