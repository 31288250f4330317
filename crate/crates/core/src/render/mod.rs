//! Layered layout and DOT/SVG output.
//!
//! Flow runs top to bottom. Each lane is a vertical band, in declaration
//! order, with unlaned nodes in a final band of their own. Nodes sit on
//! the layer given by their longest flow path from a source; within a
//! layer and band they are ordered by the median position of their flow
//! neighbours, ties broken by id.

mod dot;
mod layout;
mod svg;

pub use dot::emit_dot;
pub use layout::{layout, LaneBand, LayoutGraph, PlacedNode, RoutedEdge, EdgeStyle};
pub use svg::{emit_svg, RenderError};

use crate::model::NodeKind;

/// Drawing shape of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Glyph {
    Terminator,
    Box,
    BoxDouble,
    Diamond,
    DiamondDouble,
}

impl Glyph {
    pub fn for_kind(kind: NodeKind) -> Glyph {
        match kind {
            NodeKind::Entry | NodeKind::Exit => Glyph::Terminator,
            NodeKind::Activity => Glyph::Box,
            NodeKind::NestedActivity => Glyph::BoxDouble,
            NodeKind::Decision => Glyph::Diamond,
            NodeKind::NestedDecision => Glyph::DiamondDouble,
        }
    }

    /// Width and height in drawing units.
    pub fn size(self) -> (f64, f64) {
        match self {
            Glyph::Terminator => (128.0, 44.0),
            Glyph::Box | Glyph::BoxDouble => (168.0, 60.0),
            Glyph::Diamond | Glyph::DiamondDouble => (176.0, 88.0),
        }
    }

    pub fn is_double(self) -> bool {
        matches!(self, Glyph::BoxDouble | Glyph::DiamondDouble)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Glyph::Terminator => "terminator",
            Glyph::Box => "box",
            Glyph::BoxDouble => "box-double",
            Glyph::Diamond => "diamond",
            Glyph::DiamondDouble => "diamond-double",
        }
    }
}

/// Fixed-precision coordinate text.
pub(crate) fn num(v: f64) -> String {
    format!("{v:.1}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_kind_has_a_glyph() {
        let glyphs: Vec<Glyph> = NodeKind::ALL.iter().map(|k| Glyph::for_kind(*k)).collect();
        assert_eq!(glyphs.len(), 6);
        assert!(glyphs.iter().filter(|g| g.is_double()).count() == 2);
    }
}
