//! Turtle subset and N-Triples reader.
//!
//! Supported Turtle: `@prefix`/`PREFIX`, IRIs, prefixed names, the `a`
//! keyword, blank node labels, literals (short and long quotes, language
//! tags, datatypes, numeric and boolean shorthands), predicate lists and
//! object lists. Anonymous blank nodes, collections, quoted triples and
//! base IRIs are rejected as unsupported features.

use std::io::Read;

use super::vocab::{rdf, xsd};
use super::{
    BlankNode, Graph, Iri, Literal, PrefixMap, RdfError, RdfFormat, Subject, Term, Triple,
};

pub fn parse_document(mut input: impl Read, format: RdfFormat) -> Result<Graph, RdfError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let text = String::from_utf8(bytes).map_err(|_| RdfError::InvalidUtf8)?;
    parse_str(&text, format)
}

pub fn parse_str(text: &str, format: RdfFormat) -> Result<Graph, RdfError> {
    let mut parser = Parser::new(text, format == RdfFormat::NTriples);
    parser.document()?;
    Ok(parser.graph)
}

/// Parses a single term written in N-Triples syntax, e.g. `<http://x>`
/// or `"v"^^<http://www.w3.org/2001/XMLSchema#dateTime>`.
pub fn parse_ntriples_term(text: &str) -> Result<Term, RdfError> {
    let mut parser = Parser::new(text, true);
    parser.skip_ws();
    let term = parser.object()?;
    parser.skip_ws();
    if !parser.at_eof() {
        return Err(parser.syntax("trailing characters after term"));
    }
    Ok(term)
}

/// Reads one Turtle object term at the start of `text`, resolving
/// prefixed names with `prefixes`. Returns the term and the number of
/// bytes consumed.
pub(crate) fn read_turtle_term(
    text: &str,
    prefixes: &PrefixMap,
) -> Result<(Term, usize), RdfError> {
    let mut parser = Parser::new(text, false);
    parser.graph = Graph::with_prefixes(prefixes.clone());
    let term = parser.object()?;
    Ok((term, parser.pos))
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
    ntriples: bool,
    graph: Graph,
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || (c as u32) > 0x7F
}

fn is_name_char(c: char) -> bool {
    is_name_start(c) || c.is_ascii_digit() || c == '-'
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, ntriples: bool) -> Self {
        Parser {
            src,
            pos: 0,
            line: 1,
            column: 1,
            ntriples,
            graph: Graph::new(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn at_eof(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_nth(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn syntax(&self, message: impl Into<String>) -> RdfError {
        RdfError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn unsupported(&self, feature: &str) -> RdfError {
        RdfError::UnsupportedFeature {
            line: self.line,
            column: self.column,
            feature: feature.to_string(),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), RdfError> {
        match self.peek() {
            Some(found) if found == c => {
                self.bump();
                Ok(())
            }
            Some(found) => Err(self.syntax(format!("expected '{c}', found '{found}'"))),
            None => Err(self.syntax(format!("expected '{c}', found end of input"))),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn starts_with_keyword(&self, keyword: &str) -> bool {
        let rest = self.rest();
        rest.len() >= keyword.len()
            && rest[..keyword.len()].eq_ignore_ascii_case(keyword)
            && !rest[keyword.len()..]
                .chars()
                .next()
                .is_some_and(|c| is_name_char(c) || c == ':')
    }

    fn document(&mut self) -> Result<(), RdfError> {
        loop {
            self.skip_ws();
            if self.at_eof() {
                return Ok(());
            }
            if self.ntriples {
                self.ntriples_statement()?;
            } else {
                self.turtle_statement()?;
            }
        }
    }

    fn ntriples_statement(&mut self) -> Result<(), RdfError> {
        let subject = self.subject()?;
        self.skip_ws();
        let predicate = self.predicate()?;
        self.skip_ws();
        let object = self.object()?;
        self.skip_ws();
        self.expect('.')?;
        self.graph.insert(Triple {
            subject,
            predicate,
            object,
        });
        Ok(())
    }

    fn turtle_statement(&mut self) -> Result<(), RdfError> {
        if self.rest().starts_with("@prefix") {
            self.advance("@prefix".len());
            self.prefix_directive(true)
        } else if self.starts_with_keyword("PREFIX") {
            self.advance("PREFIX".len());
            self.prefix_directive(false)
        } else if self.rest().starts_with("@base") || self.starts_with_keyword("BASE") {
            Err(self.unsupported("base IRI directive"))
        } else {
            let subject = self.subject()?;
            self.skip_ws();
            self.predicate_object_list(&subject)?;
            self.skip_ws();
            self.expect('.')
        }
    }

    fn advance(&mut self, n: usize) {
        let target = self.pos + n;
        while self.pos < target {
            self.bump();
        }
    }

    fn prefix_directive(&mut self, dotted: bool) -> Result<(), RdfError> {
        self.skip_ws();
        let mut label = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if is_name_char(c) || c == '.' {
                label.push(c);
                self.bump();
            } else {
                return Err(self.syntax(format!("invalid character '{c}' in prefix label")));
            }
        }
        if label.ends_with('.') || label.starts_with(|c: char| c == '_' || c.is_ascii_digit()) {
            return Err(self.syntax(format!("invalid prefix label '{label}'")));
        }
        self.expect(':')?;
        self.skip_ws();
        let ns = self.iri_ref()?;
        self.graph.prefixes_mut().rebind(label, ns);
        if dotted {
            self.skip_ws();
            self.expect('.')?;
        }
        Ok(())
    }

    fn check_unsupported(&self) -> Result<(), RdfError> {
        match self.peek() {
            Some('[') => Err(self.unsupported("anonymous blank node")),
            Some('(') => Err(self.unsupported("collection")),
            Some('<') if self.peek_nth(1) == Some('<') => Err(self.unsupported("quoted triple")),
            Some('{') => Err(self.unsupported("graph block")),
            _ => Ok(()),
        }
    }

    fn subject(&mut self) -> Result<Subject, RdfError> {
        self.check_unsupported()?;
        match self.peek() {
            Some('<') => Ok(Subject::Iri(self.iri_ref()?)),
            Some('_') if self.peek_nth(1) == Some(':') => Ok(Subject::Blank(self.blank_label()?)),
            Some('"') | Some('\'') => Err(self.syntax("literal in subject position")),
            Some(_) if !self.ntriples => Ok(Subject::Iri(self.prefixed_name()?)),
            Some(c) => Err(self.syntax(format!("unexpected '{c}' at start of subject"))),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn predicate(&mut self) -> Result<Iri, RdfError> {
        match self.peek() {
            Some('<') => self.iri_ref(),
            Some('a')
                if !self.ntriples
                    && !self
                        .peek_nth(1)
                        .is_some_and(|c| is_name_char(c) || c == ':' || c == '.') =>
            {
                self.bump();
                Ok(rdf::type_())
            }
            Some(_) if !self.ntriples => self.prefixed_name(),
            Some(c) => Err(self.syntax(format!("unexpected '{c}' at start of predicate"))),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn object(&mut self) -> Result<Term, RdfError> {
        self.check_unsupported()?;
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('_') if self.peek_nth(1) == Some(':') => Ok(Term::Blank(self.blank_label()?)),
            Some('"') => self.literal(),
            Some('\'') if !self.ntriples => self.literal(),
            Some(c) if !self.ntriples && (c.is_ascii_digit() || matches!(c, '+' | '-' | '.')) => {
                self.numeric_literal()
            }
            Some(_) if !self.ntriples && self.starts_with_keyword("true") => {
                self.advance(4);
                Ok(Literal::typed("true", xsd::boolean())?.into())
            }
            Some(_) if !self.ntriples && self.starts_with_keyword("false") => {
                self.advance(5);
                Ok(Literal::typed("false", xsd::boolean())?.into())
            }
            Some(_) if !self.ntriples => Ok(Term::Iri(self.prefixed_name()?)),
            Some(c) => Err(self.syntax(format!("unexpected '{c}' at start of object"))),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn predicate_object_list(&mut self, subject: &Subject) -> Result<(), RdfError> {
        loop {
            let predicate = self.predicate()?;
            loop {
                self.skip_ws();
                let object = self.object()?;
                self.graph.insert(Triple {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                self.skip_ws();
                if self.peek() == Some(',') {
                    self.bump();
                } else {
                    break;
                }
            }
            // One or more ';' may separate predicates, and a trailing ';'
            // before '.' is allowed.
            let mut saw_semicolon = false;
            while self.peek() == Some(';') {
                self.bump();
                self.skip_ws();
                saw_semicolon = true;
            }
            if !saw_semicolon || matches!(self.peek(), Some('.') | None) {
                return Ok(());
            }
        }
    }

    fn iri_ref(&mut self) -> Result<Iri, RdfError> {
        let (line, column) = (self.line, self.column);
        self.expect('<')?;
        let mut value = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some('\\') => value.push(self.unicode_escape()?),
                Some(c) if c.is_whitespace() || c == '<' || c == '"' => {
                    return Err(self.syntax(format!("invalid character {c:?} in IRI")))
                }
                Some(c) => value.push(c),
                None => return Err(self.syntax("unterminated IRI")),
            }
        }
        Iri::new(&value).map_err(|_| RdfError::Syntax {
            line,
            column,
            message: format!("invalid or relative IRI <{value}>"),
        })
    }

    fn unicode_escape(&mut self) -> Result<char, RdfError> {
        let len = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.syntax("invalid escape sequence")),
        };
        let mut code = 0u32;
        for _ in 0..len {
            let digit = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.syntax("invalid hex digit in escape"))?;
            code = code * 16 + digit;
        }
        char::from_u32(code).ok_or_else(|| self.syntax("escape is not a valid code point"))
    }

    fn blank_label(&mut self) -> Result<BlankNode, RdfError> {
        self.advance(2);
        let label = self.name_chars(true);
        if label.is_empty() {
            return Err(self.syntax("empty blank node label"));
        }
        BlankNode::new(&label)
            .map_err(|_| self.syntax(format!("invalid blank node label '{label}'")))
    }

    /// Reads name characters, allowing interior '.' only when followed by
    /// another name character.
    fn name_chars(&mut self, allow_leading_digit: bool) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            let ok = if out.is_empty() {
                is_name_start(c) || (allow_leading_digit && c.is_ascii_digit())
            } else {
                is_name_char(c)
            };
            if ok || (c == '.' && !out.is_empty() && self.peek_nth(1).is_some_and(is_name_char)) {
                out.push(c);
                self.bump();
            } else {
                break;
            }
        }
        out
    }

    fn prefixed_name(&mut self) -> Result<Iri, RdfError> {
        let (line, column) = (self.line, self.column);
        let prefix = self.name_chars(false);
        if self.peek() != Some(':') {
            return Err(match self.peek() {
                Some(c) if prefix.is_empty() => self.syntax(format!("unexpected '{c}'")),
                _ => self.syntax(format!("expected ':' after prefix '{prefix}'")),
            });
        }
        self.bump();
        let mut local = String::new();
        while let Some(c) = self.peek() {
            if is_name_char(c) || c == ':' || (local.is_empty() && c.is_ascii_digit()) {
                local.push(c);
                self.bump();
            } else if c == '%' {
                self.bump();
                local.push('%');
                for _ in 0..2 {
                    match self.bump() {
                        Some(h) if h.is_ascii_hexdigit() => local.push(h),
                        _ => return Err(self.syntax("invalid percent escape in local name")),
                    }
                }
            } else if c == '\\' {
                self.bump();
                match self.bump() {
                    Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => local.push(e),
                    _ => return Err(self.syntax("invalid escape in local name")),
                }
            } else if c == '.'
                && !local.is_empty()
                && self
                    .peek_nth(1)
                    .is_some_and(|n| is_name_char(n) || n == ':')
            {
                local.push(c);
                self.bump();
            } else {
                break;
            }
        }
        let ns = self
            .graph
            .prefixes()
            .get(&prefix)
            .cloned()
            .ok_or(RdfError::Syntax {
                line,
                column,
                message: format!("undeclared prefix '{prefix}'"),
            })?;
        ns.join(&local).map_err(|_| RdfError::Syntax {
            line,
            column,
            message: format!("prefixed name {prefix}:{local} expands to an invalid IRI"),
        })
    }

    fn literal(&mut self) -> Result<Term, RdfError> {
        let quote = self.bump().expect("caller checked quote");
        let long = self.peek() == Some(quote) && self.peek_nth(1) == Some(quote);
        if long {
            self.advance(2);
        }
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None => return Err(self.syntax("unterminated string literal")),
                Some(c) if c == quote => {
                    if !long {
                        break;
                    }
                    if self.peek() == Some(quote) && self.peek_nth(1) == Some(quote) {
                        self.advance(2);
                        // Quotes directly before the closing delimiter belong
                        // to the content.
                        while self.peek() == Some(quote) {
                            lexical.push(quote);
                            self.bump();
                        }
                        break;
                    }
                    lexical.push(c);
                }
                Some('\\') => {
                    let c = match self.peek() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') | Some('U') => {
                            lexical.push(self.unicode_escape()?);
                            continue;
                        }
                        _ => return Err(self.syntax("invalid escape sequence in literal")),
                    };
                    self.bump();
                    lexical.push(c);
                }
                Some(c @ ('\n' | '\r')) if !long => {
                    return Err(self.syntax(format!("raw {c:?} in short string literal")))
                }
                Some(c) => lexical.push(c),
            }
        }
        match self.peek() {
            Some('@') => {
                self.bump();
                let mut tag = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '-' {
                        tag.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Literal::lang_tagged(&lexical, &tag)
                    .map(Term::Literal)
                    .map_err(|_| self.syntax(format!("invalid language tag '{tag}'")))
            }
            Some('^') if self.peek_nth(1) == Some('^') => {
                self.advance(2);
                let datatype = if self.peek() == Some('<') || self.ntriples {
                    self.iri_ref()?
                } else {
                    self.prefixed_name()?
                };
                Literal::typed(&lexical, datatype)
                    .map(Term::Literal)
                    .map_err(|e| self.syntax(e.to_string()))
            }
            _ => Ok(Term::Literal(Literal::string(lexical))),
        }
    }

    fn numeric_literal(&mut self) -> Result<Term, RdfError> {
        let mut text = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            text.push(c);
            self.bump();
        }
        let mut digits_before = 0;
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            text.push(c);
            self.bump();
            digits_before += 1;
        }
        let mut datatype = xsd::integer();
        if self.peek() == Some('.') && self.peek_nth(1).is_some_and(|c| c.is_ascii_digit()) {
            text.push('.');
            self.bump();
            while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                text.push(c);
                self.bump();
            }
            datatype = xsd::decimal();
        } else if digits_before == 0 {
            return Err(self.syntax("malformed number"));
        }
        if let Some(e @ ('e' | 'E')) = self.peek() {
            text.push(e);
            self.bump();
            if let Some(c @ ('+' | '-')) = self.peek() {
                text.push(c);
                self.bump();
            }
            let mut exp_digits = 0;
            while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                text.push(c);
                self.bump();
                exp_digits += 1;
            }
            if exp_digits == 0 {
                return Err(self.syntax("malformed exponent"));
            }
            datatype = xsd::double();
        }
        Ok(Literal::typed(text, datatype)?.into())
    }
}
