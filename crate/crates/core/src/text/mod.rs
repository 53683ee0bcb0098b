// SPDX-License-Identifier: Apache-2.0

//! Textual form of circuit graphs (`.scifr` files).
//!
//! ```text
//! func @half_adder(%a: !lwe, %b: !lwe) -> !lwe, !lwe {
//!   %0 = scifr_bool.xor %a, %b : !lwe
//!   %1 = scifr_bool.and %a, %b : !lwe
//!   return %0, %1 : !lwe, !lwe
//! }
//! ```

mod lexer;
mod parser;
mod printer;

use std::fmt;

pub use parser::{parse, MAX_DIAGNOSTICS};
pub use printer::print;

/// Position of a token in the source; lines and columns are 1-based and
/// columns count characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: SourceSpan,
    pub message: String,
}

impl Diagnostic {
    pub fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic {
            span,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}
