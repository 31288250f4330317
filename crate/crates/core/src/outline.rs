//! Plain-language logic listings and their compilation into draft maps.
//!
//! A listing is a sequence of blocks, each opened by a connective header
//! and holding enumerated items nested by indentation:
//!
//! ```text
//! Where:
//!   1. The landlord has not opposed; or
//!   2. The tenant has requested a new tenancy:
//!     a. By virtue of s26
//! Unless:
//!   3. The court is satisfied that:
//!     a. The rent differs; or
//!     b. The terms differ
//! In which case:
//!   4. The court determines the rent
//! Otherwise:
//!   5. The existing rent applies
//! ```
//!
//! Each level is indented by two spaces or one tab. Enumerators are
//! numbers, letters or lower-case roman numerals followed by `. `. A
//! trailing `; or` / `; and` joins an item to its next sibling. Negation
//! emphasis is written `<u>...</u>` or `_..._`.

use std::fmt;

use thiserror::Error;

use crate::diagnostic::{codes, Diagnostic};
use crate::model::{Edge, Explanation, ExplanationKind, LawmapDoc, Node, NodeKind, SourceRef, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connective {
    Where,
    Unless,
    InWhichCase,
    Otherwise,
}

impl Connective {
    pub fn header(self) -> &'static str {
        match self {
            Connective::Where => "Where:",
            Connective::Unless => "Unless:",
            Connective::InWhichCase => "In which case:",
            Connective::Otherwise => "Otherwise:",
        }
    }

    fn from_header(line: &str) -> Option<Self> {
        let l = line.trim().to_ascii_lowercase();
        [Connective::Where, Connective::Unless, Connective::InWhichCase, Connective::Otherwise]
            .into_iter()
            .find(|c| c.header().to_ascii_lowercase() == l)
    }
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.header().trim_end_matches(':'))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Junction {
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emphasis {
    Not,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    /// Dotted enumerator path, e.g. `2.a.ii`.
    pub path: String,
    pub text: String,
    /// How this item joins its following sibling.
    pub junction: Option<Junction>,
    pub emphasis: Option<Emphasis>,
    pub children: Vec<Item>,
    pub line: u32,
}

impl Item {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// The item and its descendants, depth first.
    pub fn walk(&self) -> Vec<&Item> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.walk());
        }
        out
    }

    fn enumerator(&self) -> &str {
        self.path.rsplit('.').next().unwrap_or(&self.path)
    }

    /// The item followed by its sub-tree, as one sentence.
    pub fn full_text(&self) -> String {
        let mut s = self.text.clone();
        for c in &self.children {
            s.push(' ');
            s.push_str(c.enumerator());
            s.push_str(". ");
            s.push_str(&c.full_text());
            match c.junction {
                Some(Junction::Or) => s.push_str("; or"),
                Some(Junction::And) => s.push_str("; and"),
                None => {}
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub connective: Connective,
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OutlineDoc {
    pub blocks: Vec<Block>,
}

impl OutlineDoc {
    fn items_of(&self, c: Connective) -> Vec<&Item> {
        self.blocks
            .iter()
            .filter(|b| b.connective == c)
            .flat_map(|b| b.items.iter())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutlineResult {
    pub outline: Option<OutlineDoc>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EnumKind {
    Number,
    Letter,
    Roman,
}

fn roman_value(s: &str) -> Option<u32> {
    let digit = |c| match c {
        'i' => Some(1),
        'v' => Some(5),
        'x' => Some(10),
        'l' => Some(50),
        'c' => Some(100),
        _ => None,
    };
    let vals: Option<Vec<u32>> = s.chars().map(digit).collect();
    let vals = vals.filter(|v| !v.is_empty())?;
    let mut total = 0;
    for (i, &v) in vals.iter().enumerate() {
        if vals.get(i + 1).is_some_and(|&n| n > v) {
            total -= v as i64;
        } else {
            total += v as i64;
        }
    }
    u32::try_from(total).ok().filter(|&t| t > 0)
}

fn classify(token: &str, prev: Option<EnumKind>) -> Option<(EnumKind, u32)> {
    if !token.is_empty() && token.chars().all(|c| c.is_ascii_digit()) {
        return token.parse().ok().map(|n| (EnumKind::Number, n));
    }
    let lower = token.to_ascii_lowercase();
    let letter = (lower.len() == 1 && lower.as_bytes()[0].is_ascii_lowercase())
        .then(|| (EnumKind::Letter, (lower.as_bytes()[0] - b'a' + 1) as u32));
    let roman = roman_value(&lower).map(|v| (EnumKind::Roman, v));
    match prev {
        Some(EnumKind::Roman) => roman.or(letter),
        Some(EnumKind::Letter) => letter.or(roman),
        _ if lower == "i" => roman,
        _ => letter.or(roman),
    }
}

fn strip_emphasis(text: &str) -> (String, Option<Emphasis>) {
    if text.contains("<u>") {
        return (text.replace("<u>", "").replace("</u>", ""), Some(Emphasis::Not));
    }
    let words: Vec<&str> = text.split(' ').collect();
    let open = words.iter().position(|w| w.len() > 1 && w.starts_with('_'));
    if let Some(o) = open {
        let close = (o..words.len()).find(|&i| {
            let w = words[i].trim_end_matches([';', ':', ',', '.']);
            w.ends_with('_') && (i > o || w.len() > 1)
        });
        if let Some(c) = close {
            let mut out: Vec<String> = words.iter().map(|w| w.to_string()).collect();
            out[o] = out[o][1..].to_string();
            let w = &out[c];
            let tail = w.len() - w.trim_end_matches([';', ':', ',', '.']).len();
            let cut = w.len() - tail - 1;
            out[c] = format!("{}{}", &w[..cut], &w[cut + 1..]);
            return (out.join(" "), Some(Emphasis::Not));
        }
    }
    (text.to_string(), None)
}

fn split_junction(text: &str) -> (String, Option<Junction>) {
    let t = text.trim_end();
    for (suffix, j) in [("; or", Junction::Or), ("; and", Junction::And)] {
        if let Some(head) = t.strip_suffix(suffix) {
            return (head.trim_end().to_string(), Some(j));
        }
    }
    (t.trim_end_matches(';').trim_end().to_string(), None)
}

struct Pending {
    level: usize,
    item: Item,
}

/// Parses a listing; `file_name` labels diagnostic spans.
pub fn parse_outline(text: &str, file_name: &str) -> OutlineResult {
    let mut diags = Vec::new();
    let mut blocks: Vec<Block> = Vec::new();
    // Open items from the outermost level inwards.
    let mut stack: Vec<Pending> = Vec::new();
    // Last enumerator seen at each level under the current parent.
    let mut last_sibling: Vec<Option<(EnumKind, u32)>> = Vec::new();
    let mut last_top_number = 0;

    let span = |line: u32, len: usize| Some(Span::new(file_name, (line, 1), (line, len.max(1) as u32)));

    fn close_to(stack: &mut Vec<Pending>, level: usize, blocks: &mut [Block]) {
        while stack.last().is_some_and(|p| p.level >= level) {
            let done = stack.pop().map(|p| p.item);
            if let Some(done) = done {
                match stack.last_mut() {
                    Some(parent) => parent.item.children.push(done),
                    None => {
                        if let Some(b) = blocks.last_mut() {
                            b.items.push(done);
                        }
                    }
                }
            }
        }
    }

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx as u32 + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let body = raw.trim_start_matches([' ', '\t']);
        let indent = &raw[..raw.len() - body.len()];
        let level = if indent.chars().all(|c| c == '\t') {
            Some(indent.len())
        } else if indent.chars().all(|c| c == ' ') && indent.len() % 2 == 0 {
            Some(indent.len() / 2)
        } else {
            None
        };
        let Some(level) = level else {
            diags.push(
                Diagnostic::error(
                    codes::OUTLINE_INDENT,
                    "indentation must be two spaces or one tab per level".to_string(),
                )
                .at(span(line_no, raw.len()).as_ref()),
            );
            continue;
        };
        if level == 0 {
            close_to(&mut stack, 0, &mut blocks);
            match Connective::from_header(body) {
                Some(c) => {
                    blocks.push(Block {
                        connective: c,
                        items: Vec::new(),
                    });
                    last_sibling.clear();
                }
                None => diags.push(
                    Diagnostic::error(
                        codes::OUTLINE_STRUCTURE,
                        format!("expected a block header (Where:, Unless:, In which case:, Otherwise:), found '{body}'"),
                    )
                    .at(span(line_no, raw.len()).as_ref()),
                ),
            }
            continue;
        }
        if blocks.is_empty() {
            diags.push(
                Diagnostic::error(codes::OUTLINE_STRUCTURE, "item appears before any block header".to_string())
                    .at(span(line_no, raw.len()).as_ref()),
            );
            continue;
        }
        let depth_now = stack.last().map_or(0, |p| p.level);
        if level > depth_now + 1 {
            diags.push(
                Diagnostic::error(
                    codes::OUTLINE_INDENT,
                    format!("item is indented {level} levels but its parent is at level {depth_now}"),
                )
                .at(span(line_no, raw.len()).as_ref()),
            );
            continue;
        }
        let Some((token, rest)) = body.split_once(". ").filter(|(t, _)| !t.is_empty() && !t.contains(' ')) else {
            diags.push(
                Diagnostic::error(
                    codes::OUTLINE_STRUCTURE,
                    format!("expected an enumerated item such as '1. text', found '{body}'"),
                )
                .at(span(line_no, raw.len()).as_ref()),
            );
            continue;
        };
        close_to(&mut stack, level, &mut blocks);
        last_sibling.truncate(level);
        last_sibling.resize(level, None);
        let prev = last_sibling[level - 1];
        let Some((kind, value)) = classify(token, prev.map(|p| p.0)) else {
            diags.push(
                Diagnostic::error(codes::OUTLINE_STRUCTURE, format!("'{token}' is not a number, letter or roman numeral"))
                    .at(span(line_no, raw.len()).as_ref()),
            );
            continue;
        };
        let expected = match prev {
            Some((k, v)) if k == kind => v + 1,
            _ if level == 1 && kind == EnumKind::Number => last_top_number + 1,
            _ => 1,
        };
        if value != expected || prev.is_some_and(|(k, _)| k != kind) {
            diags.push(
                Diagnostic::warning(
                    codes::OUTLINE_SEQUENCE,
                    format!("enumerator '{token}' breaks the sequence of its siblings"),
                )
                .at(span(line_no, raw.len()).as_ref()),
            );
        }
        if level == 1 && kind == EnumKind::Number {
            last_top_number = value;
        }
        last_sibling[level - 1] = Some((kind, value));
        let (text, junction) = split_junction(rest);
        let (text, emphasis) = strip_emphasis(&text);
        let path = match stack.last() {
            Some(p) => format!("{}.{token}", p.item.path),
            None => token.to_string(),
        };
        stack.push(Pending {
            level,
            item: Item {
                path,
                text: text.trim().to_string(),
                junction,
                emphasis,
                children: Vec::new(),
                line: line_no,
            },
        });
    }
    close_to(&mut stack, 0, &mut blocks);

    if !blocks.iter().any(|b| b.connective == Connective::Where) {
        diags.push(Diagnostic::error(codes::OUTLINE_STRUCTURE, "a listing needs at least one Where: block".to_string()));
    }
    for b in &blocks {
        if b.items.is_empty() {
            diags.push(Diagnostic::error(
                codes::OUTLINE_STRUCTURE,
                format!("the {} block has no items", b.connective),
            ));
        }
        if matches!(b.connective, Connective::InWhichCase | Connective::Otherwise) {
            for item in b.items.iter().filter(|i| !i.is_leaf()) {
                diags.push(
                    Diagnostic::error(
                        codes::OUTLINE_STRUCTURE,
                        format!("items of the {} block cannot have sub-items ({})", b.connective, item.path),
                    )
                    .at(span(item.line, item.text.len()).as_ref()),
                );
            }
        }
    }
    let failed = diags.iter().any(Diagnostic::is_error);
    OutlineResult {
        outline: (!failed).then_some(OutlineDoc { blocks }),
        diagnostics: diags,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OutlineError {
    #[error("the listing has no Where: conditions")]
    Empty,
}

/// One condition to decide: the item asked and the lead-in it completes.
struct Term<'a> {
    item: &'a Item,
    lead_in: Option<&'a Item>,
}

impl Term<'_> {
    fn prompt(&self) -> String {
        match self.lead_in {
            Some(l) => format!("{} {}", l.text, self.item.full_text()),
            None => self.item.full_text(),
        }
    }
}

fn id_for(path: &str) -> String {
    path.replace('.', "_")
}

fn item_refs(item: &Item) -> Vec<SourceRef> {
    item.walk()
        .into_iter()
        .map(|i| SourceRef::text(format!("outline item {}", i.path)).with_quote(i.text.clone()))
        .collect()
}

fn block_ref(c: Connective) -> SourceRef {
    SourceRef::text(format!("outline {} block", c))
}

/// Splits sibling terms into groups joined by `or`; terms in a group are
/// joined by `and`.
fn or_groups<'a>(terms: Vec<Term<'a>>) -> Vec<Vec<Term<'a>>> {
    let mut groups = vec![Vec::new()];
    for t in terms {
        let or = t.item.junction == Some(Junction::Or);
        groups.last_mut().map(|g| g.push(t));
        if or {
            groups.push(Vec::new());
        }
    }
    groups.retain(|g| !g.is_empty());
    groups
}

struct Draft {
    doc: LawmapDoc,
}

impl Draft {
    fn node(&mut self, node: Node) -> String {
        let id = node.id.clone();
        self.doc.nodes.push(node);
        id
    }

    fn flow(&mut self, from: &str, to: &str, label: Option<&str>) {
        self.doc.edges.push(match label {
            Some(l) => Edge::branch(from, to, l),
            None => Edge::flow(from, to),
        });
    }

    fn decision(&mut self, id: String, label: &str, prompt: String, refs: Vec<SourceRef>) -> String {
        let mut n = Node::new(id, NodeKind::Decision, label).with_prompt(prompt);
        n.refs = refs;
        self.node(n)
    }

    /// Chains yes/no decisions for terms evaluated left to right. Returns
    /// the first decision and the pending (from, label) edges for success
    /// and failure.
    fn chain(&mut self, groups: &[Vec<Term<'_>>]) -> (String, Vec<(String, String)>, Vec<(String, String)>) {
        let mut first = None;
        let mut yes = Vec::new();
        let mut no: Vec<(String, String)> = Vec::new();
        for group in groups {
            let mut group_first = None;
            let mut prev: Option<String> = None;
            for t in group {
                let mut refs = t.lead_in.map(|l| vec![SourceRef::text(format!("outline item {}", l.path)).with_quote(l.text.clone())]).unwrap_or_default();
                refs.extend(item_refs(t.item));
                let id = self.decision(format!("c_{}", id_for(&t.item.path)), &t.item.text, t.prompt(), refs);
                if let Some(p) = prev.take() {
                    self.flow(&p, &id, Some("yes"));
                }
                group_first.get_or_insert(id.clone());
                prev = Some(id);
            }
            let group_first = group_first.unwrap_or_default();
            for (from, label) in no.drain(..) {
                self.flow(&from, &group_first, Some(&label));
            }
            first.get_or_insert(group_first);
            for t in group {
                no.push((format!("c_{}", id_for(&t.item.path)), "no".to_string()));
            }
            if let Some(p) = prev {
                yes.push((p, "yes".to_string()));
            }
        }
        (first.unwrap_or_default(), yes, no)
    }

    /// Activities for a list of outcome items, ending at an exit.
    fn outcome(&mut self, items: &[&Item], exit_id: &str, exit_label: &str, c: Connective) -> String {
        let exit = self.node(Node::new(exit_id, NodeKind::Exit, exit_label).with_ref(block_ref(c)));
        let mut next = exit;
        for item in items.iter().rev() {
            let mut n = Node::new(format!("a_{}", id_for(&item.path)), NodeKind::Activity, item.text.clone());
            n.refs = item_refs(item);
            let id = n.id.clone();
            self.doc.nodes.push(n);
            self.flow(&id, &next, None);
            next = id;
        }
        next
    }
}

/// Compiles a listing into a draft map.
///
/// Where conditions joined by `or` become one gate decision with a `yes:`
/// option per alternative, all leading to a merge activity; conditions
/// joined by `and` become a chain of yes/no decisions. Each Unless item
/// with sub-items is a lead-in whose sub-items are asked as separate
/// decisions. In-which-case and Otherwise items become activities ending
/// at their own exits.
pub fn compile_outline(o: &OutlineDoc, id: &str, title: &str) -> Result<LawmapDoc, OutlineError> {
    let wheres = o.items_of(Connective::Where);
    if wheres.is_empty() {
        return Err(OutlineError::Empty);
    }
    let unless = o.items_of(Connective::Unless);
    let in_which_case = o.items_of(Connective::InWhichCase);
    let otherwise = o.items_of(Connective::Otherwise);

    let mut d = Draft {
        doc: LawmapDoc::new(id, title),
    };
    let entry = d.node(Node::new("start", NodeKind::Entry, "Start").with_ref(block_ref(Connective::Where)));

    let (success, failure) = if unless.is_empty() {
        let yes = d.outcome(&in_which_case, "x_applies", "Conditions met", Connective::InWhichCase);
        let no = d.outcome(&otherwise, "x_otherwise", "Conditions not met", Connective::Otherwise);
        (yes, no)
    } else {
        let not_applicable = d.outcome(&[], "x_not_applicable", "Conditions not met", Connective::Where);
        let yes_target = d.outcome(&in_which_case, "x_in_which_case", "Exception applies", Connective::InWhichCase);
        let no_target = d.outcome(&otherwise, "x_otherwise", "No exception applies", Connective::Otherwise);
        if let Some(n) = d.doc.nodes.iter_mut().find(|n| n.id == yes_target) {
            n.explanations.push(Explanation::new(
                ExplanationKind::Rationale,
                "Draft routing: when an Unless condition holds the listing continues with its In which case items.",
            ));
        }
        let mut terms = Vec::new();
        for item in &unless {
            if item.is_leaf() {
                terms.push(Term { item, lead_in: None });
            } else {
                terms.extend(item.children.iter().map(|c| Term { item: c, lead_in: Some(*item) }));
            }
        }
        let (first, yes, no) = d.chain(&or_groups(terms));
        let target = if yes.len() > 1 {
            let merge = d.node(
                Node::new("unless_met", NodeKind::Activity, "An Unless condition holds").with_ref(block_ref(Connective::Unless)),
            );
            d.flow(&merge, &yes_target, None);
            merge
        } else {
            yes_target
        };
        for (from, label) in yes {
            d.flow(&from, &target, Some(&label));
        }
        for (from, label) in no {
            d.flow(&from, &no_target, Some(&label));
        }
        (first, not_applicable)
    };

    let terms: Vec<Term> = wheres.iter().map(|item| Term { item, lead_in: None }).collect();
    let groups = or_groups(terms);
    if groups.len() > 1 {
        let names: Vec<String> = groups
            .iter()
            .map(|g| g.iter().map(|t| t.item.path.clone()).collect::<Vec<_>>().join(" and "))
            .collect();
        let prompt = groups
            .iter()
            .zip(&names)
            .map(|(g, name)| format!("({name}) {}", g.iter().map(|t| t.prompt()).collect::<Vec<_>>().join(" and ")))
            .collect::<Vec<_>>()
            .join(" or ");
        let refs = groups.iter().flatten().flat_map(|t| item_refs(t.item)).collect();
        let gate = d.decision(
            format!(
                "c_{}",
                groups
                    .iter()
                    .map(|g| g.iter().map(|t| id_for(&t.item.path)).collect::<Vec<_>>().join("_and_"))
                    .collect::<Vec<_>>()
                    .join("_or_")
            ),
            &format!("Where {}", names.join(" or ")),
            format!("Which of these applies, if any? {prompt}"),
            refs,
        );
        let merge = d.node(Node::new("where_met", NodeKind::Activity, "Where conditions met").with_ref(block_ref(Connective::Where)));
        d.flow(&entry, &gate, None);
        for name in &names {
            d.flow(&gate, &merge, Some(&format!("yes: {name}")));
        }
        d.flow(&gate, &failure, Some("no"));
        d.flow(&merge, &success, None);
    } else {
        let (first, yes, no) = d.chain(&groups);
        d.flow(&entry, &first, None);
        for (from, label) in yes {
            d.flow(&from, &success, Some(&label));
        }
        for (from, label) in no {
            d.flow(&from, &failure, Some(&label));
        }
    }
    Ok(in_flow_order(d.doc))
}

/// Reorders nodes breadth first from the entry, and edges by source.
fn in_flow_order(mut doc: LawmapDoc) -> LawmapDoc {
    let mut order: Vec<String> = doc.nodes_of(NodeKind::Entry).map(|n| n.id.clone()).collect();
    let mut i = 0;
    while i < order.len() {
        let next: Vec<String> = doc.outgoing_flows(&order[i]).map(|e| e.to.clone()).collect();
        for n in next {
            if !order.contains(&n) {
                order.push(n);
            }
        }
        i += 1;
    }
    let rank = |id: &str| order.iter().position(|o| o == id).unwrap_or(usize::MAX);
    doc.nodes.sort_by_key(|n| rank(&n.id));
    doc.edges.sort_by_key(|e| rank(&e.from));
    doc
}
