//! Conjunctive graph-pattern queries for competency-question tests.

mod parse;
mod results;

use std::collections::HashMap;

use crate::rdf::{Graph, Iri, PrefixMap, Subject, Term, Triple};

pub use results::{compare_results, parse_tsv, ResultDiff, ResultTable};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("query syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("variable ?{0} does not occur in any triple pattern")]
    UnboundVariable(String),
    #[error("malformed expected-results file at line {line}: {message}")]
    ExpectedFileMalformed { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternTerm {
    Var(String),
    Term(Term),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriplePattern {
    pub s: PatternTerm,
    pub p: PatternTerm,
    pub o: PatternTerm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FilterOp {
    Equals(Term),
    /// Substring test on a literal's lexical form, or on any term's
    /// string value when wrapped in `STR()`.
    Contains {
        value: String,
        on_str: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filter {
    pub var: String,
    pub op: FilterOp,
}

impl Filter {
    pub fn accepts(&self, t: &Term) -> bool {
        match &self.op {
            FilterOp::Equals(v) => t == v,
            FilterOp::Contains { value, on_str } => match t {
                Term::Literal(l) => l.lexical().contains(value.as_str()),
                Term::Iri(i) if *on_str => i.as_str().contains(value.as_str()),
                _ => false,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderKey {
    pub var: String,
    pub descending: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub select: Vec<String>,
    pub patterns: Vec<TriplePattern>,
    pub filters: Vec<Filter>,
    pub distinct: bool,
    pub order_by: Vec<OrderKey>,
    pub prefixes: PrefixMap,
}

/// Parses `PREFIX* SELECT [DISTINCT] (?v+ | *) WHERE { ... } [ORDER BY ...]`.
pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    parse::parse(text)
}

struct Index<'g> {
    all: Vec<&'g Triple>,
    by_s: HashMap<&'g Subject, Vec<&'g Triple>>,
    by_p: HashMap<&'g Iri, Vec<&'g Triple>>,
    by_o: HashMap<&'g Term, Vec<&'g Triple>>,
}

impl<'g> Index<'g> {
    fn new(g: &'g Graph) -> Self {
        let mut idx = Index {
            all: Vec::with_capacity(g.len()),
            by_s: HashMap::new(),
            by_p: HashMap::new(),
            by_o: HashMap::new(),
        };
        for t in g.iter() {
            idx.all.push(t);
            idx.by_s.entry(&t.subject).or_default().push(t);
            idx.by_p.entry(&t.predicate).or_default().push(t);
            idx.by_o.entry(&t.object).or_default().push(t);
        }
        idx
    }

    /// Smallest indexed candidate list for the given bound positions.
    fn candidates(&self, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> &[&'g Triple] {
        let mut best: &[&Triple] = &self.all;
        if let Some(s) = s {
            match s.to_subject() {
                Some(subj) => match self.by_s.get(&subj) {
                    Some(v) if v.len() < best.len() => best = v,
                    Some(_) => {}
                    None => return &[],
                },
                None => return &[],
            }
        }
        if let Some(p) = p {
            match p.as_iri().and_then(|i| self.by_p.get(i)) {
                Some(v) if v.len() < best.len() => best = v,
                Some(_) => {}
                None => return &[],
            }
        }
        if let Some(o) = o {
            match self.by_o.get(o) {
                Some(v) if v.len() < best.len() => best = v,
                Some(_) => {}
                None => return &[],
            }
        }
        best
    }
}

#[derive(Clone, Copy)]
enum Slot<'q> {
    Var(usize),
    Const(&'q Term),
}

fn subject_term(s: &Subject) -> Term {
    match s {
        Subject::Iri(i) => Term::Iri(i.clone()),
        Subject::Blank(b) => Term::Blank(b.clone()),
    }
}

fn matches_slot(
    slot: Slot,
    value: &Term,
    row: &mut [Option<Term>],
    fresh: &mut Vec<usize>,
) -> bool {
    match slot {
        Slot::Const(c) => c == value,
        Slot::Var(i) => match &row[i] {
            Some(bound) => bound == value,
            None => {
                row[i] = Some(value.clone());
                fresh.push(i);
                true
            }
        },
    }
}

struct Plan<'q> {
    patterns: Vec<[Slot<'q>; 3]>,
    /// Filters to check once the given pattern has been matched.
    filters_after: Vec<Vec<(usize, &'q Filter)>>,
}

fn join<'g>(
    idx: &Index<'g>,
    plan: &Plan,
    depth: usize,
    row: &mut Vec<Option<Term>>,
    out: &mut Vec<Vec<Option<Term>>>,
) {
    if depth == plan.patterns.len() {
        out.push(row.clone());
        return;
    }
    let [s, p, o] = plan.patterns[depth];
    let bound = |slot: Slot, row: &[Option<Term>]| -> Option<Term> {
        match slot {
            Slot::Const(c) => Some(c.clone()),
            Slot::Var(i) => row[i].clone(),
        }
    };
    let (bs, bp, bo) = (bound(s, row), bound(p, row), bound(o, row));
    for t in idx.candidates(bs.as_ref(), bp.as_ref(), bo.as_ref()) {
        let mut fresh = Vec::new();
        let ok = matches_slot(s, &subject_term(&t.subject), row, &mut fresh)
            && matches_slot(p, &Term::Iri(t.predicate.clone()), row, &mut fresh)
            && matches_slot(o, &t.object, row, &mut fresh)
            && plan.filters_after[depth]
                .iter()
                .all(|(v, f)| row[*v].as_ref().is_some_and(|t| f.accepts(t)));
        if ok {
            join(idx, plan, depth + 1, row, out);
        }
        for i in fresh {
            row[i] = None;
        }
    }
}

/// Evaluates `q` over `g`. Rows are projected, deduplicated when
/// DISTINCT, and sorted by the ORDER BY keys and then canonically.
pub fn execute(q: &Query, g: &Graph) -> ResultTable {
    execute_inner(q, g)
}

fn var_id<'q>(name: &'q str, vars: &mut Vec<&'q str>) -> usize {
    match vars.iter().position(|v| *v == name) {
        Some(i) => i,
        None => {
            vars.push(name);
            vars.len() - 1
        }
    }
}

fn execute_inner<'q>(q: &'q Query, g: &Graph) -> ResultTable {
    let mut vars: Vec<&str> = Vec::new();
    let idx = Index::new(g);
    let mut slots: Vec<[Slot; 3]> = Vec::new();
    for p in &q.patterns {
        let mut conv = |t: &'q PatternTerm| match t {
            PatternTerm::Var(v) => Slot::Var(var_id(v, &mut vars)),
            PatternTerm::Term(t) => Slot::Const(t),
        };
        slots.push([conv(&p.s), conv(&p.p), conv(&p.o)]);
    }
    // Ascending static candidate count; ties keep query order.
    fn constant<'a>(s: Slot<'a>) -> Option<&'a Term> {
        match s {
            Slot::Const(t) => Some(t),
            Slot::Var(_) => None,
        }
    }
    let estimate = |sl: &[Slot; 3]| {
        idx.candidates(constant(sl[0]), constant(sl[1]), constant(sl[2]))
            .len()
    };
    let mut order: Vec<usize> = (0..slots.len()).collect();
    order.sort_by_key(|i| estimate(&slots[*i]));
    let patterns: Vec<[Slot; 3]> = order.iter().map(|i| slots[*i]).collect();

    let mut filters_after = vec![Vec::new(); patterns.len()];
    for f in &q.filters {
        let v = vars
            .iter()
            .position(|n| *n == f.var)
            .expect("validated at parse");
        let first = patterns
            .iter()
            .position(|pat| pat.iter().any(|s| matches!(s, Slot::Var(i) if *i == v)))
            .expect("variable occurs in a pattern");
        filters_after[first].push((v, f));
    }
    let plan = Plan {
        patterns,
        filters_after,
    };
    let mut raw = Vec::new();
    if !plan.patterns.is_empty() {
        join(&idx, &plan, 0, &mut vec![None; vars.len()], &mut raw);
    }
    let cols: Vec<usize> = q
        .select
        .iter()
        .map(|v| vars.iter().position(|n| n == v).expect("validated"))
        .collect();
    let keys: Vec<(usize, bool)> = q
        .order_by
        .iter()
        .map(|k| {
            (
                vars.iter().position(|n| *n == k.var).expect("validated"),
                k.descending,
            )
        })
        .collect();
    let mut keyed: Vec<(Vec<Term>, Vec<Term>)> = raw
        .into_iter()
        .map(|r| {
            let key = keys
                .iter()
                .map(|(i, _)| r[*i].clone().expect("bound"))
                .collect();
            let row = cols.iter().map(|i| r[*i].clone().expect("bound")).collect();
            (key, row)
        })
        .collect();
    sort_rows(
        &mut keyed,
        &keys.iter().map(|(_, d)| *d).collect::<Vec<_>>(),
    );
    let mut rows: Vec<Vec<Term>> = keyed.into_iter().map(|(_, r)| r).collect();
    if q.distinct {
        let mut seen = std::collections::HashSet::new();
        rows.retain(|r| seen.insert(r.clone()));
    }
    ResultTable {
        header: q.select.clone(),
        rows,
    }
}

pub(crate) fn sort_rows(rows: &mut [(Vec<Term>, Vec<Term>)], descending: &[bool]) {
    rows.sort_by(|(ka, ra), (kb, rb)| {
        for ((a, b), desc) in ka.iter().zip(kb).zip(descending) {
            let o = if *desc { b.cmp(a) } else { a.cmp(b) };
            if o.is_ne() {
                return o;
            }
        }
        ra.cmp(rb)
    });
}
