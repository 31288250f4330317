//! Textual authoring language for lawmaps and its JSON interchange.
//!
//! ```text
//! lawmap m "Title" {
//!   lane seller "Seller"
//!   entry s in seller
//!   decision d "Registered?" in seller prompt "Is the title registered?" {
//!     ref statute "Land Registration Act" s "27" year 2002
//!   }
//!   exit e in seller
//!   flow s -> d
//!   flow d -> e [label "yes"]
//!   flow d -> e [label "no"]
//! }
//! ```
//!
//! Files use the `.lawmap` extension. A file may hold several documents;
//! the first is the root of the set.

mod json;
mod lexer;
mod parser;
mod printer;

pub use crate::diagnostic::{Diagnostic, Severity};
pub use json::{doc_to_json_value, from_json, to_json, to_json_value};
pub use parser::{parse, parse_bytes, parse_set, parse_set_bytes, ParseResult, SetParseResult, RESERVED};
pub use printer::{print_canonical, print_set, quote};

/// True when `id` is usable as a lane, node or document id in the
/// textual syntax: dot-separated `[A-Za-z_][A-Za-z0-9_]*` segments, not a
/// reserved word.
pub fn is_valid_id(id: &str) -> bool {
    !RESERVED.contains(&id)
        && id.split('.').all(|seg| {
            let mut chars = seg.chars();
            matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
                && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_syntax() {
        assert!(is_valid_id("s"));
        assert!(is_valid_id("b_take.mortgage"));
        assert!(!is_valid_id("in"));
        assert!(!is_valid_id("1a"));
        assert!(!is_valid_id("a..b"));
        assert!(!is_valid_id(""));
        assert!(!is_valid_id("a b"));
    }
}
