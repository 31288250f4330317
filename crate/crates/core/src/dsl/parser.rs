use std::collections::BTreeSet;

use crate::diagnostic::{codes, Diagnostic};
use crate::model::{
    Edge, Explanation, ExplanationKind, Lane, LawmapDoc, LawmapSet, Node, NodeKind, Origin,
    SourceRef, SourceRefKind, Span,
};

use super::lexer::{tokenize, Pos, Tok, Token};

/// Words that cannot be used as lane, node or document ids.
pub const RESERVED: &[&str] = &[
    "lawmap", "lane", "entry", "exit", "activity", "nested", "decision", "flow", "depends", "link",
    "ref", "note", "in", "prompt", "outcome", "map",
];

const ITEM_KEYWORDS: &[&str] = &[
    "lane", "entry", "exit", "activity", "decision", "nested", "flow", "depends", "link", "ref",
];

pub(crate) const NOTE_KINDS: &[(&str, ExplanationKind)] = &[
    ("rationale", ExplanationKind::Rationale),
    ("task", ExplanationKind::TaskDescription),
    ("advice", ExplanationKind::ClientAdvice),
    ("record", ExplanationKind::RecordKeeping),
    ("correspondence", ExplanationKind::Correspondence),
];

/// Outcome of parsing one document.
///
/// `doc` is present exactly when no error-severity diagnostic was raised.
#[derive(Debug, Clone)]
pub struct ParseResult {
    pub doc: Option<LawmapDoc>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Outcome of parsing a file holding one or more documents; the first
/// document is the root of the set.
#[derive(Debug, Clone)]
pub struct SetParseResult {
    pub set: Option<LawmapSet>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Parses a single `lawmap` document.
pub fn parse(text: &str, file_name: &str) -> ParseResult {
    parse_bytes(text.as_bytes(), file_name)
}

pub fn parse_bytes(bytes: &[u8], file_name: &str) -> ParseResult {
    let res = parse_docs(bytes, file_name);
    match res {
        Ok(mut docs) if docs.len() == 1 => ParseResult {
            doc: docs.pop(),
            diagnostics: Vec::new(),
        },
        Ok(docs) => {
            let (span, message) = match docs.get(1) {
                Some(second) => (
                    second.origin.span().cloned(),
                    "expected end of input, found a second `lawmap`; use a set file".to_string(),
                ),
                None => (None, "expected `lawmap`, found end of input".to_string()),
            };
            ParseResult {
                doc: None,
                diagnostics: vec![Diagnostic::error(codes::SYNTAX, message).at(span.as_ref())],
            }
        }
        Err(diagnostics) => ParseResult {
            doc: None,
            diagnostics,
        },
    }
}

/// Parses a set file: one or more `lawmap` documents.
pub fn parse_set(text: &str, file_name: &str) -> SetParseResult {
    parse_set_bytes(text.as_bytes(), file_name)
}

pub fn parse_set_bytes(bytes: &[u8], file_name: &str) -> SetParseResult {
    match parse_docs(bytes, file_name) {
        Ok(docs) if docs.is_empty() => SetParseResult {
            set: None,
            diagnostics: vec![Diagnostic::error(codes::SYNTAX, "expected `lawmap`, found end of input")
                .at(Some(&Span::new(file_name, (1, 1), (1, 1))))],
        },
        Ok(docs) => {
            let mut seen = BTreeSet::new();
            let mut diagnostics = Vec::new();
            for d in &docs {
                if !seen.insert(d.id.clone()) {
                    diagnostics.push(
                        Diagnostic::error(codes::DUPLICATE_ID, format!("duplicate document id '{}'", d.id))
                            .at(d.origin.span())
                            .on(&d.id),
                    );
                }
            }
            if diagnostics.is_empty() {
                SetParseResult {
                    set: LawmapSet::from_docs(docs),
                    diagnostics,
                }
            } else {
                SetParseResult { set: None, diagnostics }
            }
        }
        Err(diagnostics) => SetParseResult { set: None, diagnostics },
    }
}

fn parse_docs(bytes: &[u8], file: &str) -> Result<Vec<LawmapDoc>, Vec<Diagnostic>> {
    let tokens = tokenize(bytes, file).map_err(|d| vec![d])?;
    let mut p = Parser { tokens, at: 0, file };
    let mut docs = Vec::new();
    while p.peek() != &Tok::Eof {
        docs.push(p.doc().map_err(|d| vec![d])?);
    }
    let dups: Vec<Diagnostic> = docs.iter().flat_map(duplicate_ids).collect();
    if dups.is_empty() {
        Ok(docs)
    } else {
        Err(dups)
    }
}

fn duplicate_ids(doc: &LawmapDoc) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut check = |what: &str, id: &str, origin: &Origin, seen: &mut BTreeSet<String>| {
        if !seen.insert(id.to_string()) {
            out.push(
                Diagnostic::error(codes::DUPLICATE_ID, format!("duplicate {what} id '{id}' in '{}'", doc.id))
                    .at(origin.span())
                    .on(id),
            );
        }
    };
    let mut seen = BTreeSet::new();
    for l in &doc.lanes {
        check("lane", &l.id, &l.origin, &mut seen);
    }
    let mut seen = BTreeSet::new();
    for n in &doc.nodes {
        check("node", &n.id, &n.origin, &mut seen);
    }
    let mut seen = BTreeSet::new();
    for e in &doc.edges {
        check("edge", &e.id, &e.origin, &mut seen);
    }
    out
}

struct Parser<'a> {
    tokens: Vec<Token>,
    at: usize,
    file: &'a str,
}

type PResult<T> = Result<T, Diagnostic>;

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn peek_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn start(&self) -> Pos {
        self.tokens[self.at].start
    }

    fn last_end(&self) -> Pos {
        self.tokens[self.at.saturating_sub(1)].end
    }

    fn span_from(&self, start: Pos) -> Span {
        let end = self.last_end();
        Span::new(self.file, (start.line, start.col), (end.line, end.col))
    }

    fn advance(&mut self) -> &Token {
        let t = &self.tokens[self.at];
        if t.tok != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> Diagnostic {
        let t = &self.tokens[self.at];
        let expected = match expected {
            [one] => one.to_string(),
            many => format!("one of {}", many.join(", ")),
        };
        Diagnostic::error(
            codes::SYNTAX,
            format!("expected {expected}, found {}", t.tok.describe()),
        )
        .at(Some(&Span::new(
            self.file,
            (t.start.line, t.start.col),
            (t.end.line, t.end.col),
        )))
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        if self.peek_keyword(kw) {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("`{kw}`")]))
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.peek_keyword(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn punct(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(&[&tok.describe()]))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if RESERVED.contains(&s.as_str()) => {
                let mut d = self.unexpected(&["identifier"]);
                d.message.push_str(" (reserved word)");
                Err(d)
            }
            Tok::Ident(s) => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    /// A `doc.node` reference, split at the first dot.
    fn qualified(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if Edge::split_qualified(&s).is_some() => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected(&["qualified reference `doc.node`"])),
        }
    }

    fn string(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected(&["string"])),
        }
    }

    fn opt_string(&mut self) -> Option<String> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.advance();
                Some(s)
            }
            _ => None,
        }
    }

    fn keyed_string(&mut self, kw: &str) -> PResult<Option<String>> {
        if self.eat_keyword(kw) {
            self.string().map(Some)
        } else {
            Ok(None)
        }
    }

    fn doc(&mut self) -> PResult<LawmapDoc> {
        let start = self.start();
        self.keyword("lawmap")?;
        let id = self.ident()?;
        let title = self.string()?;
        self.punct(Tok::LBrace)?;
        let mut doc = LawmapDoc::new(id, title);
        loop {
            if *self.peek() == Tok::RBrace {
                self.advance();
                break;
            }
            self.item(&mut doc)?;
        }
        doc.origin = self.span_from(start).into();
        Ok(doc)
    }

    fn item(&mut self, doc: &mut LawmapDoc) -> PResult<()> {
        let start = self.start();
        let kw = match self.peek() {
            Tok::Ident(s) if ITEM_KEYWORDS.contains(&s.as_str()) => s.clone(),
            _ => {
                let mut expected: Vec<String> = ITEM_KEYWORDS.iter().map(|k| format!("`{k}`")).collect();
                expected.push("`}`".into());
                let refs: Vec<&str> = expected.iter().map(String::as_str).collect();
                return Err(self.unexpected(&refs));
            }
        };
        self.advance();
        match kw.as_str() {
            "lane" => {
                let id = self.ident()?;
                let label = self.string()?;
                let mut lane = Lane::new(id, label);
                lane.origin = self.span_from(start).into();
                doc.lanes.push(lane);
            }
            "entry" | "exit" | "activity" | "decision" => {
                let kind = match kw.as_str() {
                    "entry" => NodeKind::Entry,
                    "exit" => NodeKind::Exit,
                    "activity" => NodeKind::Activity,
                    _ => NodeKind::Decision,
                };
                let id = self.ident()?;
                let label = self.opt_string().unwrap_or_default();
                let mut node = Node::new(id, kind, label);
                node.lane = self.in_lane()?;
                node.prompt = self.keyed_string("prompt")?;
                node.outcome_label = self.keyed_string("outcome")?;
                self.opt_body(&mut node.explanations, &mut node.refs)?;
                node.origin = self.span_from(start).into();
                doc.nodes.push(node);
            }
            "nested" => {
                let kind = if self.eat_keyword("activity") {
                    NodeKind::NestedActivity
                } else if self.eat_keyword("decision") {
                    NodeKind::NestedDecision
                } else {
                    return Err(self.unexpected(&["`activity`", "`decision`"]));
                };
                let id = self.ident()?;
                let label = self.string()?;
                self.keyword("map")?;
                let target = self.ident()?;
                let mut node = Node::new(id, kind, label).with_map(target);
                node.lane = self.in_lane()?;
                node.prompt = self.keyed_string("prompt")?;
                self.opt_body(&mut node.explanations, &mut node.refs)?;
                node.origin = self.span_from(start).into();
                doc.nodes.push(node);
            }
            "flow" | "depends" => {
                let from = self.ident()?;
                self.punct(Tok::Arrow)?;
                let to = self.ident()?;
                let mut edge = if kw == "flow" {
                    if *self.peek() == Tok::LBracket {
                        self.advance();
                        self.keyword("label")?;
                        let criterion = self.string()?;
                        self.punct(Tok::RBracket)?;
                        Edge::branch(from, to, criterion)
                    } else {
                        Edge::flow(from, to)
                    }
                } else {
                    Edge::dependency(from, to)
                };
                self.opt_body(&mut edge.explanations, &mut edge.refs)?;
                edge.origin = self.span_from(start).into();
                doc.edges.push(edge);
            }
            "link" => {
                let from = self.qualified()?;
                self.punct(Tok::Arrow)?;
                let to = self.qualified()?;
                let (fd, fnode) = Edge::split_qualified(&from).expect("checked by qualified()");
                let (td, tnode) = Edge::split_qualified(&to).expect("checked by qualified()");
                let mut edge = Edge::link(fd, fnode, td, tnode);
                self.opt_body(&mut edge.explanations, &mut edge.refs)?;
                edge.origin = self.span_from(start).into();
                doc.edges.push(edge);
            }
            "ref" => {
                let r = self.source_ref()?;
                doc.source_refs.push(r);
            }
            _ => unreachable!("filtered by ITEM_KEYWORDS"),
        }
        Ok(())
    }

    fn in_lane(&mut self) -> PResult<Option<String>> {
        if self.eat_keyword("in") {
            self.ident().map(Some)
        } else {
            Ok(None)
        }
    }

    fn opt_body(&mut self, notes: &mut Vec<Explanation>, refs: &mut Vec<SourceRef>) -> PResult<()> {
        if *self.peek() != Tok::LBrace {
            return Ok(());
        }
        self.advance();
        loop {
            if *self.peek() == Tok::RBrace {
                self.advance();
                return Ok(());
            }
            if self.eat_keyword("note") {
                let kind = match self.peek() {
                    Tok::Ident(w) => {
                        let w = w.clone();
                        match NOTE_KINDS.iter().find(|(k, _)| *k == w) {
                            Some((_, kind)) => {
                                self.advance();
                                *kind
                            }
                            None => {
                                return Err(self.unexpected(&[
                                    "`rationale`",
                                    "`task`",
                                    "`advice`",
                                    "`record`",
                                    "`correspondence`",
                                    "string",
                                ]))
                            }
                        }
                    }
                    _ => ExplanationKind::Other,
                };
                let text = self.string()?;
                notes.push(Explanation::new(kind, text));
            } else if self.eat_keyword("ref") {
                refs.push(self.source_ref()?);
            } else {
                return Err(self.unexpected(&["`note`", "`ref`", "`}`"]));
            }
        }
    }

    /// Everything after the `ref` keyword.
    fn source_ref(&mut self) -> PResult<SourceRef> {
        let mut r = if self.eat_keyword("statute") {
            let act = self.string()?;
            self.keyword("s")?;
            let mut path = vec![self.string()?];
            while let Some(seg) = self.opt_string() {
                path.push(seg);
            }
            SourceRef::statute(act, path)
        } else if self.eat_keyword("case") {
            SourceRef::case(self.string()?)
        } else if self.eat_keyword("rule") {
            SourceRef::rule(self.string()?)
        } else if self.eat_keyword("text") {
            SourceRef::text(self.string()?)
        } else {
            return Err(self.unexpected(&["`statute`", "`case`", "`rule`", "`text`"]));
        };
        if self.eat_keyword("year") {
            match *self.peek() {
                Tok::Int(y) if i32::try_from(y).is_ok() => {
                    self.advance();
                    r.year = Some(y as i32);
                }
                _ => return Err(self.unexpected(&["year number"])),
            }
        }
        r.quote = self.keyed_string("quote")?;
        if r.kind != SourceRefKind::Text {
            r.note = self.keyed_string("memo")?;
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::EdgeKind;

    #[test]
    fn minimal_map() {
        let r = parse(r#"lawmap m "T" { entry s exit e flow s -> e }"#, "m.lawmap");
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
        let d = r.doc.unwrap();
        assert_eq!(d.nodes.len(), 2);
        assert_eq!(d.edges.len(), 1);
        assert_eq!(d.edges[0].kind, EdgeKind::Flow);
        assert_eq!(d.nodes[0].kind, NodeKind::Entry);
        let span = d.nodes[1].origin.span().unwrap();
        assert_eq!((span.start_line, span.start_col), (1, 24));
    }

    #[test]
    fn single_branch_decision_parses() {
        let r = parse(
            r#"lawmap m "T" { entry s decision d "Q?" activity a "A" exit e
               flow s -> d flow d -> a flow a -> e }"#,
            "m",
        );
        assert!(r.doc.is_some(), "{:?}", r.diagnostics);
    }

    #[test]
    fn full_node_syntax() {
        let src = r#"
lawmap m "Title" {
  lane seller "Seller"
  ref statute "Landlord and Tenant Act" s "24C" "(2)" year 1954 quote "q" memo "n"
  entry s "Start" in seller
  decision d "D" in seller prompt "Q?" {
    note rationale "why"
    note "plain"
    ref case "[1971] 1 WLR 591" memo "Cardshops v Davies"
    ref rule "SRA 6.1"
    ref text "listing item 1" quote "The Landlord"
  }
  nested activity n "Nested" map sub in seller prompt "P"
  exit e outcome "yes"
  flow s -> d
  flow d -> n [label "yes"] { note task "go" }
  depends n -> e
  link m.e -> other.s
}"#;
        let r = parse(src, "m");
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
        let d = r.doc.unwrap();
        assert_eq!(d.source_refs[0].section_path, vec!["24C", "(2)"]);
        assert_eq!(d.source_refs[0].year, Some(1954));
        assert_eq!(d.source_refs[0].note.as_deref(), Some("n"));
        let dec = d.node("d").unwrap();
        assert_eq!(dec.explanations.len(), 2);
        assert_eq!(dec.explanations[1].kind, ExplanationKind::Other);
        assert_eq!(dec.refs.len(), 3);
        assert_eq!(dec.refs[2].quote.as_deref(), Some("The Landlord"));
        let n = d.node("n").unwrap();
        assert_eq!(n.nested_ref.as_deref(), Some("sub"));
        assert_eq!(n.prompt.as_deref(), Some("P"));
        assert_eq!(d.node("e").unwrap().outcome_label.as_deref(), Some("yes"));
        assert_eq!(d.edges[1].id, "d->n[yes]");
        assert_eq!(d.edges[1].explanations[0].kind, ExplanationKind::TaskDescription);
        assert_eq!(d.edges[2].kind, EdgeKind::Dependency);
        assert_eq!(d.edges[3].from, "m.e");
        assert_eq!(d.edges[3].to, "other.s");
    }

    #[test]
    fn duplicate_ids_are_e010() {
        let r = parse(r#"lawmap m "T" { entry s exit s }"#, "m");
        assert!(r.doc.is_none());
        assert_eq!(r.diagnostics[0].code, "E010");
        let r = parse(r#"lawmap m "T" { entry s exit e flow s -> e flow s -> e }"#, "m");
        assert_eq!(r.diagnostics[0].code, "E010");
    }

    #[test]
    fn syntax_error_lists_expected() {
        let r = parse(r#"lawmap m "T" { bogus }"#, "m");
        let d = &r.diagnostics[0];
        assert_eq!(d.code, "P002");
        assert!(d.message.starts_with("expected one of `lane`"), "{}", d.message);
        assert!(d.message.ends_with("found `bogus`"), "{}", d.message);
    }

    #[test]
    fn reserved_word_as_id() {
        let r = parse(r#"lawmap m "T" { entry in }"#, "m");
        assert!(r.diagnostics[0].message.contains("reserved"));
    }

    #[test]
    fn set_parsing() {
        let src = r#"lawmap a "A" { entry s } lawmap b "B" { exit e }"#;
        let r = parse_set(src, "f");
        let set = r.set.unwrap();
        assert_eq!(set.root, "a");
        assert_eq!(set.docs.len(), 2);
        assert!(parse(src, "f").doc.is_none());
        let r = parse_set(r#"lawmap a "A" {} lawmap a "B" {}"#, "f");
        assert_eq!(r.diagnostics[0].code, "E010");
        assert!(parse_set("", "f").set.is_none());
    }

    #[test]
    fn eof_error_span_is_within_text() {
        let r = parse("lawmap m \"T\" {\n entry", "m");
        let s = r.diagnostics[0].span.as_ref().unwrap();
        assert_eq!((s.start_line, s.start_col), (2, 7));
    }
}
