use crate::diagnostic::{codes, Diagnostic};
use crate::model::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Identifier, possibly dotted (`doc.node`). Keywords are identifiers
    /// too; the parser decides by position.
    Ident(String),
    Str(String),
    Int(i64),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Arrow,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(_) => "string".into(),
            Tok::Int(i) => format!("number {i}"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub start: Pos,
    pub end: Pos,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
    file: &'a str,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Position just past the last character of `text`.
pub fn end_position(text: &str) -> Pos {
    let mut pos = Pos { line: 1, col: 1 };
    for c in text.chars() {
        if c == '\n' {
            pos.line += 1;
            pos.col = 1;
        } else {
            pos.col += 1;
        }
    }
    pos
}

impl<'a> Lexer<'a> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn error(&self, start: Pos, end: Pos, message: String) -> Diagnostic {
        Diagnostic::error(codes::LEXICAL, message).at(Some(&Span::new(
            self.file,
            (start.line, start.col),
            (end.line, end.col),
        )))
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == '#' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn string(&mut self, start: Pos) -> Result<String, Diagnostic> {
        let mut out = String::new();
        loop {
            let here = self.pos;
            match self.bump() {
                None | Some('\n') => {
                    return Err(self.error(start, here, "unterminated string".into()));
                }
                Some('"') => return Ok(out),
                Some('\\') => {
                    let esc = self.pos;
                    match self.bump() {
                        Some('"') => out.push('"'),
                        Some('\\') => out.push('\\'),
                        Some('n') => out.push('\n'),
                        Some('t') => out.push('\t'),
                        Some('r') => out.push('\r'),
                        Some('u') => out.push(self.unicode_escape(esc)?),
                        Some(c) => {
                            return Err(self.error(esc, self.pos, format!("unknown escape `\\{c}`")));
                        }
                        None => return Err(self.error(start, self.pos, "unterminated string".into())),
                    }
                }
                Some(c) => out.push(c),
            }
        }
    }

    fn unicode_escape(&mut self, start: Pos) -> Result<char, Diagnostic> {
        if self.bump() != Some('{') {
            return Err(self.error(start, self.pos, "expected `{` after `\\u`".into()));
        }
        let mut hex = String::new();
        loop {
            match self.bump() {
                Some('}') => break,
                Some(c) if c.is_ascii_hexdigit() && hex.len() < 6 => hex.push(c),
                _ => return Err(self.error(start, self.pos, "malformed unicode escape".into())),
            }
        }
        u32::from_str_radix(&hex, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| self.error(start, self.pos, format!("invalid unicode scalar `{hex}`")))
    }

    fn ident(&mut self, first: char, start: Pos) -> Result<String, Diagnostic> {
        let mut out = String::from(first);
        loop {
            match self.chars.peek().copied() {
                Some(c) if is_ident_continue(c) => {
                    out.push(c);
                    self.bump();
                }
                Some('.') => {
                    self.bump();
                    match self.chars.peek().copied() {
                        Some(c) if is_ident_start(c) => out.push('.'),
                        _ => {
                            return Err(self.error(
                                start,
                                self.pos,
                                "expected identifier segment after `.`".into(),
                            ))
                        }
                    }
                }
                _ => return Ok(out),
            }
        }
    }

    fn next_token(&mut self) -> Result<Token, Diagnostic> {
        self.skip_trivia();
        let start = self.pos;
        let Some(c) = self.bump() else {
            return Ok(Token {
                tok: Tok::Eof,
                start,
                end: start,
            });
        };
        let tok = match c {
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '-' if self.chars.peek() == Some(&'>') => {
                self.bump();
                Tok::Arrow
            }
            '"' => Tok::Str(self.string(start)?),
            c if c.is_ascii_digit() => {
                let mut digits = String::from(c);
                while let Some(&d) = self.chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    digits.push(d);
                    self.bump();
                }
                if matches!(self.chars.peek(), Some(&c) if is_ident_start(c)) {
                    return Err(self.error(start, self.pos, "identifiers cannot start with a digit".into()));
                }
                let value = digits
                    .parse()
                    .map_err(|_| self.error(start, self.pos, "number out of range".into()))?;
                Tok::Int(value)
            }
            c if is_ident_start(c) => Tok::Ident(self.ident(c, start)?),
            c => {
                return Err(self.error(start, self.pos, format!("unexpected character {c:?}")));
            }
        };
        Ok(Token {
            tok,
            start,
            end: self.pos,
        })
    }
}

/// Tokenizes `bytes`; the first lexical error stops the scan.
pub fn tokenize(bytes: &[u8], file: &str) -> Result<Vec<Token>, Diagnostic> {
    let text = match std::str::from_utf8(bytes) {
        Ok(t) => t,
        Err(e) => {
            let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or_default();
            let p = end_position(valid);
            return Err(Diagnostic::error(
                codes::LEXICAL,
                format!("invalid UTF-8 at byte {}", e.valid_up_to()),
            )
            .at(Some(&Span::new(file, (p.line, p.col), (p.line, p.col)))));
        }
    };
    let mut lexer = Lexer {
        chars: text.chars().peekable(),
        pos: Pos { line: 1, col: 1 },
        file,
    };
    let mut out = Vec::new();
    loop {
        let t = lexer.next_token()?;
        let eof = t.tok == Tok::Eof;
        out.push(t);
        if eof {
            return Ok(out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s.as_bytes(), "t").unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn basic_tokens() {
        assert_eq!(
            toks("flow a -> b.c [label \"y\\\"es\"] # comment\n year 1954"),
            vec![
                Tok::Ident("flow".into()),
                Tok::Ident("a".into()),
                Tok::Arrow,
                Tok::Ident("b.c".into()),
                Tok::LBracket,
                Tok::Ident("label".into()),
                Tok::Str("y\"es".into()),
                Tok::RBracket,
                Tok::Ident("year".into()),
                Tok::Int(1954),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let t = tokenize(b"\n  entry", "t").unwrap();
        assert_eq!(t[0].start, Pos { line: 2, col: 3 });
        assert_eq!(t[0].end, Pos { line: 2, col: 8 });
    }

    #[test]
    fn unicode_escape() {
        assert_eq!(toks("\"\\u{e9}\""), vec![Tok::Str("é".into()), Tok::Eof]);
    }

    #[test]
    fn unterminated_string() {
        let e = tokenize(b"lawmap m \"abc", "t").unwrap_err();
        assert_eq!(e.code, "P001");
        assert!(e.message.contains("unterminated"));
    }

    #[test]
    fn invalid_utf8_reports_position() {
        let e = tokenize(b"ab\n c\xff", "t").unwrap_err();
        let span = e.span.unwrap();
        assert_eq!((span.start_line, span.start_col), (2, 3));
    }

    #[test]
    fn stray_characters() {
        assert!(tokenize(b"a - b", "t").is_err());
        assert!(tokenize(b"a.", "t").is_err());
        assert!(tokenize(b"9a", "t").is_err());
        assert!(tokenize(b"@", "t").is_err());
    }
}
