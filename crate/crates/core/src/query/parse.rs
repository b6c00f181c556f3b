use std::collections::BTreeSet;

use super::{Filter, FilterOp, OrderKey, PatternTerm, Query, QueryError, TriplePattern};
use crate::rdf::vocab::{self, rdf};
use crate::rdf::{read_turtle_term, Iri, PrefixMap, RdfError, Term};

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    prefixes: PrefixMap,
}

fn is_var_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn line(&self) -> usize {
        self.src[..self.pos].matches('\n').count() + 1
    }

    fn error(&self, message: impl Into<String>) -> QueryError {
        QueryError::Syntax {
            line: self.line(),
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    /// Consumes `kw` if it is the next word, ignoring case.
    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let rest = self.rest();
        let matches = rest.len() >= kw.len()
            && rest[..kw.len()].eq_ignore_ascii_case(kw)
            && !rest[kw.len()..].starts_with(|c: char| is_var_char(c) || c == ':');
        if matches {
            self.pos += kw.len();
        }
        matches
    }

    fn punct(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), QueryError> {
        if self.punct(c) {
            Ok(())
        } else {
            let found = self
                .peek()
                .map(|f| format!("'{f}'"))
                .unwrap_or("end of query".into());
            Err(self.error(format!("expected '{c}', found {found}")))
        }
    }

    fn variable(&mut self) -> Option<String> {
        if !matches!(self.peek(), Some('?' | '$')) {
            return None;
        }
        let name: String = self.rest()[1..]
            .chars()
            .take_while(|c| is_var_char(*c))
            .collect();
        if name.is_empty() {
            return None;
        }
        self.pos += 1 + name.len();
        Some(name)
    }

    fn term(&mut self) -> Result<Term, QueryError> {
        self.skip_ws();
        let line = self.line();
        let (term, used) = read_turtle_term(self.rest(), &self.prefixes).map_err(|e| {
            let message = match e {
                RdfError::Syntax { message, .. } => message,
                other => other.to_string(),
            };
            QueryError::Syntax { line, message }
        })?;
        if term.is_blank() {
            return Err(self.error("blank nodes are not allowed in queries"));
        }
        self.pos += used;
        Ok(term)
    }

    fn position(&mut self, predicate: bool) -> Result<PatternTerm, QueryError> {
        if let Some(v) = self.variable() {
            return Ok(PatternTerm::Var(v));
        }
        if predicate && self.keyword("a") {
            return Ok(PatternTerm::Term(Term::Iri(rdf::type_())));
        }
        let term = self.term()?;
        if predicate && term.as_iri().is_none() {
            return Err(self.error("predicate must be an IRI or a variable"));
        }
        Ok(PatternTerm::Term(term))
    }

    fn string(&mut self) -> Result<String, QueryError> {
        match self.term()? {
            Term::Literal(l) => Ok(l.lexical().to_string()),
            _ => Err(self.error("expected a string literal")),
        }
    }
}

pub(super) fn parse(text: &str) -> Result<Query, QueryError> {
    let mut prefixes = PrefixMap::new();
    for (label, ns) in vocab::standard_prefixes() {
        prefixes
            .insert(label, Iri::new(ns).expect("static"))
            .expect("distinct");
    }
    let mut c = Cursor {
        src: text,
        pos: 0,
        prefixes,
    };
    while c.keyword("PREFIX") {
        c.skip_ws();
        let label: String = c.rest().chars().take_while(|ch| *ch != ':').collect();
        if label.chars().any(char::is_whitespace) || c.rest().len() == label.len() {
            return Err(c.error("malformed PREFIX declaration"));
        }
        c.pos += label.len() + 1;
        let ns = match c.term()? {
            Term::Iri(i) => i,
            _ => return Err(c.error("PREFIX namespace must be an IRI")),
        };
        c.prefixes.rebind(label, ns);
    }
    if !c.keyword("SELECT") {
        return Err(c.error("expected SELECT"));
    }
    let distinct = c.keyword("DISTINCT");
    let mut select = Vec::new();
    let star = c.punct('*');
    if !star {
        while let Some(v) = c.variable() {
            select.push(v);
        }
        if select.is_empty() {
            return Err(c.error("SELECT needs at least one variable"));
        }
    }
    if !c.keyword("WHERE") {
        return Err(c.error("expected WHERE"));
    }
    c.expect_punct('{')?;
    let mut patterns = Vec::new();
    let mut filters = Vec::new();
    loop {
        if c.punct('}') {
            break;
        }
        if c.punct('.') {
            continue;
        }
        if c.keyword("FILTER") {
            filters.push(filter(&mut c)?);
            continue;
        }
        if c.peek().is_none() {
            return Err(c.error("unterminated group, expected '}'"));
        }
        let s = c.position(false)?;
        if matches!(s, PatternTerm::Term(Term::Literal(_))) {
            return Err(c.error("literal in subject position"));
        }
        loop {
            let p = c.position(true)?;
            loop {
                let o = c.position(false)?;
                patterns.push(TriplePattern {
                    s: s.clone(),
                    p: p.clone(),
                    o,
                });
                if !c.punct(',') {
                    break;
                }
            }
            if !c.punct(';') {
                break;
            }
            if matches!(c.peek(), Some('.' | '}')) {
                break;
            }
        }
        let save = c.pos;
        let at_filter = c.keyword("FILTER");
        c.pos = save;
        if !at_filter && !matches!(c.peek(), Some('.' | '}')) {
            return Err(c.error("expected '.' or '}' after triple pattern"));
        }
    }
    let mut order_by = Vec::new();
    if c.keyword("ORDER") {
        if !c.keyword("BY") {
            return Err(c.error("expected BY after ORDER"));
        }
        loop {
            let descending = if c.keyword("ASC") {
                false
            } else if c.keyword("DESC") {
                true
            } else if let Some(var) = c.variable() {
                order_by.push(OrderKey {
                    var,
                    descending: false,
                });
                continue;
            } else {
                break;
            };
            c.expect_punct('(')?;
            let var = c.variable().ok_or_else(|| c.error("expected a variable"))?;
            c.expect_punct(')')?;
            order_by.push(OrderKey { var, descending });
        }
        if order_by.is_empty() {
            return Err(c.error("ORDER BY needs at least one key"));
        }
    }
    if c.peek().is_some() {
        return Err(c.error("unexpected trailing text"));
    }

    let mut bound = Vec::new();
    for p in &patterns {
        for t in [&p.s, &p.p, &p.o] {
            if let PatternTerm::Var(v) = t {
                if !bound.contains(v) {
                    bound.push(v.clone());
                }
            }
        }
    }
    if star {
        select = bound.clone();
    }
    let known: BTreeSet<&String> = bound.iter().collect();
    let used = select
        .iter()
        .chain(filters.iter().map(|f| &f.var))
        .chain(order_by.iter().map(|o| &o.var));
    if let Some(v) = used.into_iter().find(|v| !known.contains(v)) {
        return Err(QueryError::UnboundVariable(v.clone()));
    }
    Ok(Query {
        select,
        patterns,
        filters,
        distinct,
        order_by,
        prefixes: c.prefixes,
    })
}

fn filter(c: &mut Cursor) -> Result<Filter, QueryError> {
    c.expect_punct('(')?;
    let f = if c.keyword("CONTAINS") {
        c.expect_punct('(')?;
        let (var, on_str) = if c.keyword("STR") {
            c.expect_punct('(')?;
            let v = c.variable().ok_or_else(|| c.error("expected a variable"))?;
            c.expect_punct(')')?;
            (v, true)
        } else {
            (
                c.variable().ok_or_else(|| c.error("expected a variable"))?,
                false,
            )
        };
        c.expect_punct(',')?;
        let value = c.string()?;
        c.expect_punct(')')?;
        Filter {
            var,
            op: FilterOp::Contains { value, on_str },
        }
    } else {
        let var = c
            .variable()
            .ok_or_else(|| c.error("expected a variable or CONTAINS"))?;
        c.expect_punct('=')?;
        let term = c.term()?;
        Filter {
            var,
            op: FilterOp::Equals(term),
        }
    };
    c.expect_punct(')')?;
    Ok(f)
}
