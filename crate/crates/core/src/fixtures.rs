//! The bundled example maps.

use crate::validate::{analyze_source, ResolvedSet};

/// Interim rent under the Landlord and Tenant Act 1954 s24C.
pub const S24C: &str = include_str!("../../../fixtures/s24c.lawmap");

/// A simple conveyancing transaction with seller and buyer lanes.
pub const CONVEYANCING: &str = include_str!("../../../fixtures/conveyancing.lawmap");

/// Plain-language listing of s24C for the outline compiler.
pub const S24C_OUTLINE: &str = include_str!("../../../fixtures/s24c.lwo");

/// Bundled maps by file stem.
pub const ALL: &[(&str, &str)] = &[("s24c", S24C), ("conveyancing", CONVEYANCING)];

fn load(name: &str, text: &str) -> ResolvedSet {
    match analyze_source(text, name) {
        (Some(rs), _) => rs,
        (None, diags) => panic!("bundled map {name} does not load: {diags:?}"),
    }
}

pub fn s24c() -> ResolvedSet {
    load("s24c.lawmap", S24C)
}

pub fn conveyancing() -> ResolvedSet {
    load("conveyancing.lawmap", CONVEYANCING)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::check;

    #[test]
    fn bundled_maps_are_clean() {
        for (name, text) in ALL {
            let (rs, diags) = analyze_source(text, name);
            assert!(rs.is_some(), "{name}: {diags:#?}");
            assert!(diags.is_empty(), "{name}: {diags:#?}");
        }
        assert!(check(&s24c()).is_empty());
    }
}
