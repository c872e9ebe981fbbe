//! Hard Boolean function families for polynomial threshold functions,
//! their explicit gates, and exact verification of degree and weight
//! claims by exhaustive evaluation and rational linear programming.

pub mod boolfun;
pub mod polynomial;
pub mod shape;
pub mod threshold_analysis;
pub mod tuple_order;

pub use boolfun::{make_g, make_gt, make_hard, BoolFun, Convention, GVariant, MsbSide};
pub use polynomial::{symmetrize, to_uv, witness_gate, Basis, IntPolynomial, UvAssignment, Var};
pub use shape::{parse_ks, GroupShape, Variant};
pub use tuple_order::{OrderContext, TupleIndex};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("invalid tuple: {0}")]
    InvalidTuple(String),
    #[error("input mismatch: {0}")]
    Input(String),
    #[error("size cap exceeded: {0}")]
    Cap(String),
    #[error("basis mismatch: {0}")]
    Basis(String),
    #[error("degree overflow: {0}")]
    Degree(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("certificate rejected: {0}")]
    Certificate(String),
    #[error(transparent)]
    Lp(#[from] exact_lp::LpError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
