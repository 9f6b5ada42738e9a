//! The executable example categories.

pub mod circuits;
pub mod compilers;
pub mod netpipes;
pub mod pipes;

use thiserror::Error;

use crate::kernel::Category;

pub const BUILTIN_NAMES: [&str; 4] = ["pipes", "compilers", "circuits", "netpipes"];

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown builtin category `{0}` (expected one of pipes, compilers, circuits, netpipes)")]
pub struct UnknownBuiltin(pub String);

pub fn builtin_category(name: &str) -> Result<Category, UnknownBuiltin> {
    match name {
        "pipes" => Ok(pipes::pipes()),
        "compilers" => Ok(compilers::compilers()),
        "circuits" => Ok(circuits::circuits()),
        "netpipes" => Ok(netpipes::netpipes()),
        other => Err(UnknownBuiltin(other.to_string())),
    }
}
