use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the toolkit. Each variant corresponds to one class of
/// rejected input; none of them signal an internal failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("value `{value}` is outside the domain of `{var}`")]
    ValueOutsideDomain { var: String, value: String },
    #[error("duplicate assignment to `{0}` inside an intervention")]
    DuplicateAssignment(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("model is not recursive: cycle through {0:?}")]
    NotRecursive(Vec<String>),
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("premise of do-calculus rule {0} does not hold")]
    PremiseViolated(u8),
    #[error("constraint of degree {0} given to the linear procedure")]
    Nonlinear(u32),
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("invalid program: {0}")]
    InvalidProgram(String),
    #[error("exogenous weight {0} is not dyadic")]
    NonDyadic(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("witness construction failed: {0}")]
    Witness(String),
}
