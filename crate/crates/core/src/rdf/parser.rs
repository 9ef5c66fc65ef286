//! Recursive-descent parser for the Turtle subset used for instance exchange:
//! `@prefix`/`PREFIX`, prefixed names, absolute IRIs, `a`, predicate lists,
//! object lists, plain and typed literals, bare numbers and booleans, and
//! `#` comments. Blank nodes, collections and `@base` are rejected.

use std::collections::BTreeMap;

use super::{Graph, Node, RdfError, Term, Triple};
use crate::ontology::{Datatype, Iri, Literal, Namespaces};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    IriRef(String),
    PName { prefix: String, local: String },
    Str(String),
    Number(String),
    Word(String),
    AtPrefix,
    AtBase,
    Dot,
    Semicolon,
    Comma,
    Carets,
    Eof,
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

struct Lexer {
    chars: Vec<char>,
    i: usize,
    line: usize,
    column: usize,
}

fn is_pn_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.')
}

impl Lexer {
    fn new(text: &str) -> Lexer {
        Lexer {
            chars: text.chars().collect(),
            i: 0,
            line: 1,
            column: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn peek_at(&self, off: usize) -> Option<char> {
        self.chars.get(self.i + off).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn err(&self, pos: Pos, msg: impl Into<String>) -> RdfError {
        RdfError::Syntax {
            line: pos.line,
            column: pos.column,
            message: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, Pos), RdfError> {
        self.skip_ws();
        let pos = self.pos();
        let Some(c) = self.peek() else {
            return Ok((Tok::Eof, pos));
        };
        let tok = match c {
            '<' => self.iri_ref(pos)?,
            '"' | '\'' => self.string(pos)?,
            '.' if !self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) => {
                self.bump();
                Tok::Dot
            }
            ';' => {
                self.bump();
                Tok::Semicolon
            }
            ',' => {
                self.bump();
                Tok::Comma
            }
            '^' => {
                self.bump();
                if self.bump() != Some('^') {
                    return Err(self.err(pos, "expected `^^`"));
                }
                Tok::Carets
            }
            '@' => {
                self.bump();
                let word = self.word();
                match word.as_str() {
                    "prefix" => Tok::AtPrefix,
                    "base" => Tok::AtBase,
                    _ => return Err(self.err(pos, format!("unsupported directive or language tag `@{word}`"))),
                }
            }
            '[' | ']' | '(' | ')' => {
                return Err(self.err(pos, "blank node property lists and collections are not supported"));
            }
            c if c.is_ascii_digit() || c == '+' || c == '-' || c == '.' => self.number(pos)?,
            c if c == ':' || c.is_alphabetic() || c == '_' => self.name(pos)?,
            other => return Err(self.err(pos, format!("unexpected character `{other}`"))),
        };
        Ok((tok, pos))
    }

    fn word(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' || c == '-' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn iri_ref(&mut self, pos: Pos) -> Result<Tok, RdfError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                Some('>') => return Ok(Tok::IriRef(s)),
                Some(c) if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') => {
                    return Err(self.err(pos, format!("character `{}` not allowed in an IRI", c.escape_default())));
                }
                Some(c) => s.push(c),
                None => return Err(self.err(pos, "unterminated IRI")),
            }
        }
    }

    fn string(&mut self, pos: Pos) -> Result<Tok, RdfError> {
        let quote = self.bump().expect("peeked");
        let mut s = String::new();
        loop {
            match self.bump() {
                None | Some('\n') | Some('\r') => return Err(self.err(pos, "unterminated string literal")),
                Some(c) if c == quote => return Ok(Tok::Str(s)),
                Some('\\') => {
                    let esc = self.bump();
                    let decoded = match esc {
                        Some('n') => '\n',
                        Some('t') => '\t',
                        Some('r') => '\r',
                        Some('b') => '\u{8}',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some(u @ ('u' | 'U')) => {
                            let n = if u == 'u' { 4 } else { 8 };
                            let mut hex = String::new();
                            for _ in 0..n {
                                match self.bump() {
                                    Some(h) if h.is_ascii_hexdigit() => hex.push(h),
                                    _ => return Err(self.err(pos, "malformed unicode escape")),
                                }
                            }
                            u32::from_str_radix(&hex, 16)
                                .ok()
                                .and_then(char::from_u32)
                                .ok_or_else(|| self.err(pos, "invalid unicode scalar in escape"))?
                        }
                        _ => return Err(self.err(pos, "invalid escape sequence")),
                    };
                    s.push(decoded);
                }
                Some(c) => s.push(c),
            }
        }
    }

    fn digits(&mut self, s: &mut String) -> usize {
        let mut n = 0;
        while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
            s.push(c);
            self.bump();
            n += 1;
        }
        n
    }

    fn number(&mut self, pos: Pos) -> Result<Tok, RdfError> {
        let mut s = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            s.push(c);
            self.bump();
        }
        let mut n = self.digits(&mut s);
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            s.push('.');
            self.bump();
            n += self.digits(&mut s);
        }
        if n == 0 {
            return Err(self.err(pos, "malformed number"));
        }
        if let Some(e @ ('e' | 'E')) = self.peek() {
            s.push(e);
            self.bump();
            if let Some(c @ ('+' | '-')) = self.peek() {
                s.push(c);
                self.bump();
            }
            if self.digits(&mut s) == 0 {
                return Err(self.err(pos, "malformed exponent"));
            }
        }
        Ok(Tok::Number(s))
    }

    fn name(&mut self, pos: Pos) -> Result<Tok, RdfError> {
        let mut prefix = String::new();
        while let Some(c) = self.peek() {
            if is_pn_char(c) {
                prefix.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if self.peek() != Some(':') {
            return Ok(Tok::Word(prefix));
        }
        if prefix == "_" {
            return Err(self.err(pos, "blank nodes are not supported"));
        }
        if prefix.ends_with('.') {
            return Err(self.err(pos, "prefix may not end with `.`"));
        }
        self.bump();
        let mut local = String::new();
        while let Some(c) = self.peek() {
            if is_pn_char(c) || c == ':' {
                local.push(c);
                self.bump();
            } else {
                break;
            }
        }
        // a trailing '.' terminates the statement rather than the name
        while local.ends_with('.') {
            local.pop();
            self.i -= 1;
            self.column -= 1;
        }
        Ok(Tok::PName { prefix, local })
    }
}

struct Parser<'a> {
    lexer: Lexer,
    current: Tok,
    pos: Pos,
    prefixes: BTreeMap<String, String>,
    namespaces: &'a Namespaces,
    graph: Graph,
}

impl<'a> Parser<'a> {
    fn advance(&mut self) -> Result<Tok, RdfError> {
        let (tok, pos) = self.lexer.next()?;
        let prev = std::mem::replace(&mut self.current, tok);
        self.pos = pos;
        Ok(prev)
    }

    fn err(&self, msg: impl Into<String>) -> RdfError {
        self.lexer.err(self.pos, msg)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), RdfError> {
        if self.current == tok {
            self.advance()?;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}, found {}", describe(&self.current))))
        }
    }

    fn document(mut self) -> Result<Graph, RdfError> {
        self.advance()?;
        loop {
            match &self.current {
                Tok::Eof => return Ok(self.graph),
                Tok::AtPrefix => {
                    self.advance()?;
                    self.prefix_decl()?;
                    self.expect(Tok::Dot, "`.` after prefix declaration")?;
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("prefix") => {
                    self.advance()?;
                    self.prefix_decl()?;
                }
                Tok::AtBase => return Err(self.err("`@base` is not supported")),
                Tok::Word(w) if w.eq_ignore_ascii_case("base") => return Err(self.err("`BASE` is not supported")),
                _ => {
                    self.triples()?;
                    self.expect(Tok::Dot, "`.` terminating the statement")?;
                }
            }
        }
    }

    fn prefix_decl(&mut self) -> Result<(), RdfError> {
        let prefix = match self.advance()? {
            Tok::PName { prefix, local } if local.is_empty() => prefix,
            other => return Err(self.err(format!("expected prefix name, found {}", describe(&other)))),
        };
        match self.advance()? {
            Tok::IriRef(iri) => {
                self.prefixes.insert(prefix, iri);
                Ok(())
            }
            other => Err(self.err(format!("expected namespace IRI, found {}", describe(&other)))),
        }
    }

    fn node_from_absolute(&self, absolute: String) -> Node {
        match self.namespaces.compact(&absolute) {
            Some(iri) => Node::Named(iri),
            None => Node::Foreign(absolute),
        }
    }

    fn iri(&mut self) -> Result<Node, RdfError> {
        let pos = self.pos;
        match self.advance()? {
            Tok::IriRef(abs) => Ok(self.node_from_absolute(abs)),
            Tok::PName { prefix, local } => {
                let ns = self.prefixes.get(&prefix).ok_or(RdfError::UnknownPrefix {
                    prefix: prefix.clone(),
                    line: pos.line,
                    column: pos.column,
                })?;
                Ok(self.node_from_absolute(format!("{ns}{local}")))
            }
            other => Err(self.lexer.err(pos, format!("expected IRI, found {}", describe(&other)))),
        }
    }

    fn triples(&mut self) -> Result<(), RdfError> {
        let subject = match &self.current {
            Tok::IriRef(_) | Tok::PName { .. } => self.iri()?,
            Tok::Str(_) | Tok::Number(_) => return Err(self.err("literals cannot be subjects")),
            other => return Err(self.err(format!("expected subject, found {}", describe(other)))),
        };
        loop {
            let predicate = match &self.current {
                Tok::Word(w) if w == "a" => {
                    self.advance()?;
                    Node::Named(Iri::rdf_type())
                }
                Tok::IriRef(_) | Tok::PName { .. } => self.iri()?,
                other => return Err(self.err(format!("expected predicate, found {}", describe(other)))),
            };
            loop {
                let object = self.object()?;
                self.graph.insert(Triple {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                if self.current == Tok::Comma {
                    self.advance()?;
                } else {
                    break;
                }
            }
            if self.current != Tok::Semicolon {
                return Ok(());
            }
            while self.current == Tok::Semicolon {
                self.advance()?;
            }
            // a trailing ';' before '.' is allowed
            if self.current == Tok::Dot {
                return Ok(());
            }
        }
    }

    fn object(&mut self) -> Result<Term, RdfError> {
        let pos = self.pos;
        match self.current.clone() {
            Tok::IriRef(_) | Tok::PName { .. } => Ok(Term::Node(self.iri()?)),
            Tok::Str(s) => {
                self.advance()?;
                if self.current == Tok::Carets {
                    self.advance()?;
                    let dt_pos = self.pos;
                    let dt = self.iri()?;
                    let datatype = dt
                        .as_iri()
                        .and_then(Datatype::from_iri)
                        .ok_or_else(|| self.lexer.err(dt_pos, format!("unsupported datatype {dt}")))?;
                    Literal::new(s, datatype).map(Term::Literal).map_err(|e| self.lexer.err(pos, e.to_string()))
                } else {
                    Ok(Term::Literal(Literal::string(s)))
                }
            }
            Tok::Number(n) => {
                self.advance()?;
                let datatype = if n.contains(['e', 'E']) {
                    Datatype::Double
                } else {
                    Datatype::Decimal
                };
                Literal::new(n, datatype).map(Term::Literal).map_err(|e| self.lexer.err(pos, e.to_string()))
            }
            Tok::Word(w) if w == "true" || w == "false" => {
                self.advance()?;
                Ok(Term::Literal(Literal::new(w, Datatype::Boolean).expect("boolean")))
            }
            other => Err(self.err(format!("expected object, found {}", describe(&other)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::IriRef(s) => format!("<{s}>"),
        Tok::PName { prefix, local } => format!("`{prefix}:{local}`"),
        Tok::Str(_) => "string literal".into(),
        Tok::Number(n) => format!("number `{n}`"),
        Tok::Word(w) => format!("`{w}`"),
        Tok::AtPrefix => "`@prefix`".into(),
        Tok::AtBase => "`@base`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Semicolon => "`;`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Carets => "`^^`".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses Turtle text using the default namespace table for compaction.
pub fn parse_turtle(text: &str) -> Result<Graph, RdfError> {
    parse_turtle_with(text, &Namespaces::default())
}

/// Parses Turtle text; absolute IRIs under a namespace of `namespaces` are
/// compacted to registered names, all others are kept verbatim.
pub fn parse_turtle_with(text: &str, namespaces: &Namespaces) -> Result<Graph, RdfError> {
    Parser {
        lexer: Lexer::new(text),
        current: Tok::Eof,
        pos: Pos { line: 1, column: 1 },
        prefixes: BTreeMap::new(),
        namespaces,
        graph: Graph::new(namespaces.clone()),
    }
    .document()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::Prefix;

    #[test]
    fn empty_input() {
        assert!(parse_turtle("").unwrap().is_empty());
        assert!(parse_turtle("  # only a comment\n").unwrap().is_empty());
    }

    #[test]
    fn single_typed_statement() {
        let g = parse_turtle("@prefix iedm: <http://example.org/iedm#> .\niedm:FCC-Radmon a iedm:IrradiationExperiment .")
            .unwrap();
        assert_eq!(g.len(), 1);
        let t = g.triples().iter().next().unwrap();
        assert_eq!(t.subject, Node::Named(Iri::iedm("FCC-Radmon")));
        assert_eq!(t.predicate, Node::Named(Iri::rdf_type()));
        assert_eq!(t.object, Term::from(Iri::iedm("IrradiationExperiment")));
    }

    #[test]
    fn missing_terminator() {
        let err = parse_turtle("@prefix iedm: <http://example.org/iedm#> .\niedm:x iedm:y iedm:z").unwrap_err();
        assert!(matches!(err, RdfError::Syntax { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn undeclared_prefix() {
        let err = parse_turtle("iedm:x iedm:y iedm:z .").unwrap_err();
        assert_eq!(
            err,
            RdfError::UnknownPrefix {
                prefix: "iedm".into(),
                line: 1,
                column: 1
            }
        );
    }

    #[test]
    fn lists_literals_and_comments() {
        let text = r#"
@prefix iedm: <http://example.org/iedm#> .
PREFIX xsd: <http://www.w3.org/2001/XMLSchema#>
# fluence individual
iedm:q a iedm:Fluence, iedm:CumulatedQuantity ;   # two types
    iedm:hasValue "3e17"^^xsd:double, 2.5, 7, -1e3, true, "a \"quoted\" é" ;
.
"#;
        let g = parse_turtle(text).unwrap();
        assert_eq!(g.len(), 8);
        let lits: Vec<_> = g
            .triples()
            .iter()
            .filter_map(|t| match &t.object {
                Term::Literal(l) => Some((l.lexical().to_string(), l.datatype())),
                _ => None,
            })
            .collect();
        assert!(lits.contains(&("3e17".into(), Datatype::Double)));
        assert!(lits.contains(&("2.5".into(), Datatype::Decimal)));
        assert!(lits.contains(&("7".into(), Datatype::Decimal)));
        assert!(lits.contains(&("-1e3".into(), Datatype::Double)));
        assert!(lits.contains(&("true".into(), Datatype::Boolean)));
        assert!(lits.contains(&("a \"quoted\" é".into(), Datatype::String)));
    }

    #[test]
    fn trailing_dot_after_name() {
        let g = parse_turtle("@prefix iedm: <http://example.org/iedm#> .\niedm:a iedm:b iedm:c.").unwrap();
        let t = g.triples().iter().next().unwrap();
        assert_eq!(t.object, Term::from(Iri::iedm("c")));
    }

    #[test]
    fn foreign_iris_are_preserved() {
        let g = parse_turtle("<http://other.org/x> <http://other.org/p> <http://example.org/iedm#DUT> .").unwrap();
        let t = g.triples().iter().next().unwrap();
        assert_eq!(t.subject, Node::Foreign("http://other.org/x".into()));
        assert_eq!(t.object, Term::from(Iri::iedm("DUT")));
        // a prefix token rebound to another namespace does not alias the registry
        let g = parse_turtle("@prefix iedm: <http://other.org/> .\niedm:a iedm:b iedm:c .").unwrap();
        assert_eq!(g.triples().iter().next().unwrap().subject, Node::Foreign("http://other.org/a".into()));
        // and a foreign token bound to a registered namespace compacts
        let g = parse_turtle("@prefix ex: <http://xmlns.com/foaf/0.1/> .\nex:a ex:b ex:c .").unwrap();
        assert_eq!(g.triples().iter().next().unwrap().subject, Node::Named(Iri::new(Prefix::Foaf, "a").unwrap()));
    }

    #[test]
    fn rejected_constructs() {
        for bad in [
            "@base <http://x/> .",
            "_:b <http://x/p> <http://x/o> .",
            "<http://x/s> <http://x/p> [ <http://x/q> 1 ] .",
            "<http://x/s> <http://x/p> ( 1 2 ) .",
            "<http://x/s> <http://x/p> \"x\"@en .",
            "<http://x/s> <http://x/p> \"x\"^^<http://x/dt> .",
            "<http://x/s> <http://x/p> \"1.2.3\"^^<http://www.w3.org/2001/XMLSchema#decimal> .",
            "<http://x/s> <http://x/p> \"unterminated .",
            "<http://x/s p> <http://x/p> 1 .",
            "\"lit\" <http://x/p> 1 .",
            "<http://x/s> <http://x/p> 1e .",
        ] {
            assert!(matches!(parse_turtle(bad), Err(RdfError::Syntax { .. })), "accepted: {bad}");
        }
    }

    #[test]
    fn error_positions() {
        let err = parse_turtle("<http://x/s> <http://x/p>\n   <http://x/o> ;; ?").unwrap_err();
        assert_eq!(
            err,
            RdfError::Syntax {
                line: 2,
                column: 20,
                message: "unexpected character `?`".into()
            }
        );
    }
}
