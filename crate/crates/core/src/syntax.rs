//! Text formats for grammars, term systems and μ-expressions.
//!
//! A file starts with a header line `#grammar`, `#terms` or `#mu`, followed
//! by `key: value` fields and definitions. `//` starts a comment. See
//! `docs/formats.md` for the full grammar.

use std::collections::{BTreeSet, HashMap};

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::grammar::{format_polynomial, CFGrammar, GrammarSystem, Monomial, Polynomial, Symbol};
use crate::muexpr::{format_mu, ClosedMuExpr, MuExpr};
use crate::semiring::{Semiring, SemiringKind};
use crate::terms::{format_term, Term, TermSystem};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FileKind {
    Grammar,
    Terms,
    Mu,
}

impl FileKind {
    pub fn name(self) -> &'static str {
        match self {
            FileKind::Grammar => "grammar",
            FileKind::Terms => "terms",
            FileKind::Mu => "mu",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Header {
    pub kind: FileKind,
    pub semiring: Option<SemiringKind>,
}

#[derive(Clone, Debug)]
pub struct GrammarFile<K> {
    pub system: GrammarSystem<K>,
    pub start: Option<Polynomial<K>>,
}

#[derive(Clone, Debug)]
pub struct TermsFile<K> {
    pub system: TermSystem<K>,
    pub start: Option<Term<K>>,
}

#[derive(Clone, Debug)]
pub struct MuFile<K> {
    pub alphabet: Alphabet,
    pub expr: ClosedMuExpr<K>,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// A nonempty source line with comments stripped; `col` is the 1-based
/// column of `text`'s first character.
#[derive(Clone, Copy, Debug)]
struct Line<'a> {
    no: usize,
    col: usize,
    text: &'a str,
}

impl<'a> Line<'a> {
    fn at(&self, offset: usize) -> usize {
        self.col + self.text[..offset].chars().count()
    }

    fn sub(&self, offset: usize) -> Line<'a> {
        let rest = &self.text[offset..];
        let lead = rest.len() - rest.trim_start().len();
        Line {
            no: self.no,
            col: self.at(offset + lead),
            text: rest.trim(),
        }
    }
}

fn source_lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let code = raw.find("//").map_or(raw, |p| &raw[..p]);
            let lead = code.len() - code.trim_start().len();
            let t = code.trim();
            (!t.is_empty()).then(|| Line {
                no: i + 1,
                col: raw[..lead].chars().count() + 1,
                text: t,
            })
        })
        .collect()
}

struct Fields<'a> {
    alphabet: Alphabet,
    start: Option<Line<'a>>,
    body: Vec<Line<'a>>,
}

fn field<'a>(line: &Line<'a>) -> Option<(&'a str, Line<'a>)> {
    let colon = line.text.find(':')?;
    let key = line.text[..colon].trim();
    matches!(key, "semiring" | "alphabet" | "start").then(|| (key, line.sub(colon + 1)))
}

/// Reads the header line and the optional `semiring:` field.
pub fn detect(text: &str) -> Result<Header> {
    let lines = source_lines(text);
    let Some(first) = lines.first() else {
        return Err(err(1, 1, "empty input; expected a header line"));
    };
    let kind = match first.text {
        "#grammar" => FileKind::Grammar,
        "#terms" => FileKind::Terms,
        "#mu" => FileKind::Mu,
        other => {
            return Err(err(
                first.no,
                first.col,
                format!("expected `#grammar`, `#terms` or `#mu`, found `{other}`"),
            ))
        }
    };
    let mut semiring = None;
    for line in &lines[1..] {
        if let Some(("semiring", value)) = field(line) {
            semiring = Some(
                value
                    .text
                    .parse::<SemiringKind>()
                    .map_err(|m| err(value.no, value.col, m))?,
            );
        }
    }
    Ok(Header { kind, semiring })
}

fn split_fields<'a, K: Semiring>(text: &'a str, expect: FileKind) -> Result<Fields<'a>> {
    let header = detect(text)?;
    let lines = source_lines(text);
    if header.kind != expect {
        return Err(err(
            lines[0].no,
            lines[0].col,
            format!("expected a {} file, found `#{}`", expect.name(), header.kind.name()),
        ));
    }
    if let Some(s) = header.semiring {
        if s.name() != K::NAME {
            return Err(Error::SemiringMismatch {
                left: s.name().into(),
                right: K::NAME.into(),
            });
        }
    }
    let mut alphabet = None;
    let mut start = None;
    let mut body = Vec::new();
    for line in &lines[1..] {
        match field(line) {
            Some(("alphabet", v)) => {
                if alphabet.is_some() {
                    return Err(err(line.no, line.col, "duplicate `alphabet:` field"));
                }
                let a = Alphabet::new(v.text.split_whitespace()).map_err(|e| err(v.no, v.col, e.to_string()))?;
                alphabet = Some(a);
            }
            Some(("start", v)) => {
                if start.is_some() {
                    return Err(err(line.no, line.col, "duplicate `start:` field"));
                }
                start = Some(v);
            }
            Some(_) => {}
            None => body.push(*line),
        }
    }
    let alphabet = alphabet.ok_or_else(|| err(lines[0].no, lines[0].col, "missing `alphabet:` field"))?;
    Ok(Fields { alphabet, start, body })
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '~' | '^' | '\'')
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Ident(String),
    Num(String),
    LParen,
    RParen,
    Plus,
    Star,
    Dot,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

fn lex(line: &Line<'_>) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = line.text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (off, c) = chars[i];
        let col = line.at(off);
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '+' => Some(Tok::Plus),
            '*' => Some(Tok::Star),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, col });
            i += 1;
        } else if c.is_ascii_digit() || c == '#' {
            let mut j = i + usize::from(c == '#');
            while j < chars.len() && chars[j].1.is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[i + usize::from(c == '#')..j].iter().map(|p| p.1).collect();
            if digits.is_empty() {
                return Err(err(line.no, col, "expected digits after `#`"));
            }
            out.push(Token {
                tok: Tok::Num(digits),
                col,
            });
            i = j;
        } else if is_ident_start(c) {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j].1) {
                j += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[i..j].iter().map(|p| p.1).collect()),
                col,
            });
            i = j;
        } else {
            return Err(err(line.no, col, format!("unexpected character `{c}`")));
        }
    }
    out.push(Token {
        tok: Tok::End,
        col: line.col + line.text.chars().count(),
    });
    Ok(out)
}

/// Untyped expression tree with source columns.
#[derive(Clone, Debug)]
enum Ast {
    Num(String, usize),
    Ident(String, usize),
    Sum(Box<Ast>, Box<Ast>),
    Prod(Box<Ast>, Box<Ast>),
    Mu(String, usize, Box<Ast>),
    StarOf(Box<Ast>, usize),
}

struct ExprParser {
    toks: Vec<Token>,
    pos: usize,
    line: usize,
}

impl ExprParser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(err(self.line, self.peek().col, msg))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn expr(&mut self) -> Result<Ast> {
        if self.is_keyword("mu") {
            self.bump();
            let t = self.bump();
            let Tok::Ident(name) = t.tok else {
                return Err(err(self.line, t.col, "expected a variable after `mu`"));
            };
            self.expect(Tok::Dot, "`.`")?;
            let body = self.expr()?;
            return Ok(Ast::Mu(name, t.col, Box::new(body)));
        }
        let lhs = self.product()?;
        if self.peek().tok == Tok::Plus {
            self.bump();
            let rhs = self.expr()?;
            return Ok(Ast::Sum(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Ast> {
        let lhs = self.atom()?;
        if self.peek().tok == Tok::Star {
            self.bump();
            let rhs = if self.is_keyword("mu") {
                self.expr()?
            } else {
                self.product()?
            };
            return Ok(Ast::Prod(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<Ast> {
        let t = self.peek().clone();
        match t.tok {
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Num(d) => {
                self.bump();
                Ok(Ast::Num(d, t.col))
            }
            Tok::Ident(ref s) if s == "star" => {
                self.bump();
                self.expect(Tok::LParen, "`(` after `star`")?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Ast::StarOf(Box::new(e), t.col))
            }
            Tok::Ident(ref s) if s == "mu" => self.fail("`mu` must be parenthesized here"),
            Tok::Ident(s) => {
                self.bump();
                Ok(Ast::Ident(s, t.col))
            }
            Tok::End => self.fail("unexpected end of expression"),
            _ => self.fail("expected an expression"),
        }
    }
}

fn parse_ast(line: &Line<'_>) -> Result<Ast> {
    let mut p = ExprParser {
        toks: lex(line)?,
        pos: 0,
        line: line.no,
    };
    let e = p.expr()?;
    if p.peek().tok != Tok::End {
        return p.fail("unexpected trailing input");
    }
    Ok(e)
}

fn constant<K: Semiring>(digits: &str, line: usize, col: usize) -> Result<K> {
    K::parse(digits).ok_or_else(|| err(line, col, format!("`{digits}` is not an element of {}", K::NAME)))
}

fn ast_to_term<K: Semiring>(
    ast: &Ast,
    line: usize,
    alphabet: &Alphabet,
    vars: &HashMap<String, usize>,
) -> Result<Term<K>> {
    Ok(match ast {
        Ast::Num(d, col) => Term::constant(constant(d, line, *col)?),
        Ast::Ident(s, col) => {
            if let Some(a) = alphabet.index_of(s) {
                Term::letter(a)
            } else if let Some(&x) = vars.get(s) {
                Term::var(x)
            } else {
                return Err(err(line, *col, format!("unknown name `{s}`")));
            }
        }
        Ast::Sum(l, r) => Term::sum(
            ast_to_term(l, line, alphabet, vars)?,
            ast_to_term(r, line, alphabet, vars)?,
        ),
        Ast::Prod(l, r) => Term::prod(
            ast_to_term(l, line, alphabet, vars)?,
            ast_to_term(r, line, alphabet, vars)?,
        ),
        Ast::Mu(_, col, _) | Ast::StarOf(_, col) => {
            return Err(err(line, *col, "binders are not allowed in a term system"))
        }
    })
}

fn ast_to_mu<K: Semiring>(ast: &Ast, line: usize, alphabet: &Alphabet, bound: &mut Vec<String>) -> Result<MuExpr<K>> {
    Ok(match ast {
        Ast::Num(d, col) => MuExpr::constant(constant(d, line, *col)?),
        Ast::Ident(s, col) => {
            if bound.contains(s) {
                MuExpr::var(s.as_str())
            } else if let Some(a) = alphabet.index_of(s) {
                MuExpr::letter(a)
            } else {
                return Err(err(line, *col, format!("unbound variable `{s}`")));
            }
        }
        Ast::Sum(l, r) => MuExpr::sum(
            ast_to_mu(l, line, alphabet, bound)?,
            ast_to_mu(r, line, alphabet, bound)?,
        ),
        Ast::Prod(l, r) => MuExpr::prod(
            ast_to_mu(l, line, alphabet, bound)?,
            ast_to_mu(r, line, alphabet, bound)?,
        ),
        Ast::Mu(x, col, body) => {
            if x.contains('~') {
                return Err(err(line, *col, format!("variable `{x}` may not contain `~`")));
            }
            if alphabet.index_of(x).is_some() {
                return Err(err(line, *col, format!("`{x}` is a letter and cannot be bound")));
            }
            bound.push(x.clone());
            let b = ast_to_mu(body, line, alphabet, bound)?;
            bound.pop();
            if !crate::muexpr::check_guarded(&b) {
                return Err(err(line, *col, format!("body of `mu {x}` is not guarded")));
            }
            MuExpr::fix(x.as_str(), b)
        }
        Ast::StarOf(inner, col) => {
            let e = ast_to_mu(inner, line, alphabet, bound)?;
            let e = ClosedMuExpr::new(e).map_err(|_| err(line, *col, "the argument of `star` must be closed"))?;
            star(&e, alphabet, bound)
        }
    })
}

/// `t* = μx.(1̄ + Σ_a (ā × (t_a × x)))` with `x` chosen away from letters
/// and enclosing binders.
fn star<K: Semiring>(t: &ClosedMuExpr<K>, alphabet: &Alphabet, bound: &[String]) -> MuExpr<K> {
    let taken = |n: &str| alphabet.index_of(n).is_some() || bound.iter().any(|b| b == n);
    let x = std::iter::once("s".to_owned())
        .chain((1..).map(|i| format!("s{i}")))
        .find(|n| !taken(n))
        .expect("unbounded supply of names");
    let guards = alphabet
        .letters()
        .map(|a| {
            MuExpr::prod(
                MuExpr::letter(a),
                MuExpr::prod(t.derivative(a).into_expr(), MuExpr::var(x.as_str())),
            )
        })
        .collect();
    MuExpr::fix(x.as_str(), MuExpr::sum(MuExpr::one(), MuExpr::sum_all(guards)))
}

/// Splits `lhs.member = rhs`.
fn split_definition<'a>(line: &Line<'a>) -> Option<(&'a str, &'a str, Line<'a>)> {
    let eq = line.text.find('=')?;
    let lhs = line.text[..eq].trim();
    let (x, member) = lhs.split_once('.')?;
    Some((x.trim(), member.trim(), line.sub(eq + 1)))
}

fn check_name(name: &str, line: &Line<'_>, alphabet: &Alphabet) -> Result<()> {
    let mut chars = name.chars();
    let ok = chars.next().is_some_and(is_ident_start) && chars.all(is_ident_char) && name != "_";
    if !ok || matches!(name, "mu" | "star") {
        return Err(err(
            line.no,
            line.col,
            format!("`{name}` is not a valid nonterminal name"),
        ));
    }
    if alphabet.index_of(name).is_some() {
        return Err(err(line.no, line.col, format!("`{name}` is already a letter")));
    }
    Ok(())
}

/// Collects nonterminal names in order of first definition.
fn declare(
    names: &mut Vec<String>,
    index: &mut HashMap<String, usize>,
    name: &str,
    line: &Line<'_>,
    alphabet: &Alphabet,
) -> Result<usize> {
    if let Some(&i) = index.get(name) {
        return Ok(i);
    }
    check_name(name, line, alphabet)?;
    index.insert(name.to_owned(), names.len());
    names.push(name.to_owned());
    Ok(names.len() - 1)
}

fn parse_polynomial<K: Semiring>(line: &Line<'_>, vars: &HashMap<String, usize>) -> Result<Polynomial<K>> {
    let mut p = Polynomial::zero();
    let mut offset = 0;
    for piece in line.text.split('+') {
        let part = line.sub(offset);
        let part = Line {
            text: &part.text[..piece.trim().len()],
            ..part
        };
        offset += piece.len() + 1;
        if part.text.is_empty() {
            return Err(err(part.no, part.col, "empty summand"));
        }
        let is_number = |t: &str| t.trim_start_matches('#').chars().all(|c| c.is_ascii_digit());
        let (k, word) = match part.text.split_once('*') {
            Some((k, w)) => (constant(k.trim().trim_start_matches('#'), part.no, part.col)?, w.trim()),
            None if is_number(part.text) => (constant(part.text.trim_start_matches('#'), part.no, part.col)?, "_"),
            None => (K::one(), part.text),
        };
        let mut m = Vec::new();
        if word != "_" {
            for name in word.split_whitespace() {
                match vars.get(name) {
                    Some(&x) => m.push(x),
                    None => return Err(err(part.no, part.col, format!("unknown nonterminal `{name}`"))),
                }
            }
            if m.is_empty() {
                return Err(err(part.no, part.col, "missing monomial after `*`"));
            }
        }
        p.add_term(Monomial(m), k);
    }
    Ok(p)
}

enum Style {
    Productions,
    Equations,
}

/// Parses a `#grammar` file.
pub fn parse_grammar<K: Semiring>(text: &str) -> Result<GrammarFile<K>> {
    let f = split_fields::<K>(text, FileKind::Grammar)?;
    let mut names = Vec::new();
    let mut index = HashMap::new();
    let mut styles: Vec<Style> = Vec::new();
    // First pass: declare nonterminals in order of appearance.
    for line in &f.body {
        let (name, style) = if let Some(arrow) = line.text.find("->") {
            (line.text[..arrow].trim(), Style::Productions)
        } else if let Some((x, _, _)) = split_definition(line) {
            (x, Style::Equations)
        } else {
            return Err(err(
                line.no,
                line.col,
                "expected `x -> ...`, `x.out = k` or `x.a = ...`",
            ));
        };
        let i = declare(&mut names, &mut index, name, line, &f.alphabet)?;
        match (styles.get(i), &style) {
            (None, _) => styles.push(style),
            (Some(Style::Productions), Style::Equations) | (Some(Style::Equations), Style::Productions) => {
                return Err(err(
                    line.no,
                    line.col,
                    format!("`{name}` mixes productions with output/derivative equations"),
                ))
            }
            (Some(Style::Productions), Style::Productions) => {
                return Err(err(line.no, line.col, format!("productions of `{name}` given twice")))
            }
            _ => {}
        }
    }
    let n = names.len();
    let na = f.alphabet.len();
    let mut output = vec![K::zero(); n];
    let mut deriv = vec![vec![Polynomial::zero(); na]; n];
    let mut seen_eq: BTreeSet<(usize, String)> = BTreeSet::new();
    let mut productions: Vec<BTreeSet<Vec<Symbol>>> = vec![BTreeSet::new(); n];
    for line in &f.body {
        if let Some(arrow) = line.text.find("->") {
            let x = index[line.text[..arrow].trim()];
            let rhs = line.sub(arrow + 2);
            if rhs.text.is_empty() {
                continue;
            }
            for alt in rhs.text.split('|') {
                let alt = alt.trim();
                if alt.is_empty() {
                    return Err(err(rhs.no, rhs.col, "empty alternative; write `_` for the empty word"));
                }
                let mut body = Vec::new();
                if alt != "_" {
                    for tok in alt.split_whitespace() {
                        if let Some(a) = f.alphabet.index_of(tok) {
                            body.push(Symbol::Letter(a));
                        } else if let Some(&y) = index.get(tok) {
                            body.push(Symbol::Nonterminal(y));
                        } else {
                            let offset = tok.as_ptr() as usize - rhs.text.as_ptr() as usize;
                            return Err(err(rhs.no, rhs.col + offset, format!("unknown symbol `{tok}`")));
                        }
                    }
                }
                productions[x].insert(body);
            }
        } else {
            let (name, member, rhs) = split_definition(line).expect("checked in the first pass");
            let x = index[name];
            if !seen_eq.insert((x, member.to_owned())) {
                return Err(err(line.no, line.col, format!("`{name}.{member}` defined twice")));
            }
            if member == "out" {
                output[x] = constant(rhs.text.trim_start_matches('#'), rhs.no, rhs.col)?;
            } else if let Some(a) = f.alphabet.index_of(member) {
                deriv[x][a] = parse_polynomial(&rhs, &index)?;
            } else {
                return Err(err(
                    line.no,
                    line.col,
                    format!("`{member}` is neither `out` nor a letter"),
                ));
            }
        }
    }
    // Production-style nonterminals go through the GNF coalgebra.
    let grammar = CFGrammar::new(f.alphabet.clone(), names.clone(), productions)?;
    for (x, style) in styles.iter().enumerate() {
        if let Style::Productions = style {
            for body in grammar.productions(x) {
                match body.split_first() {
                    None => output[x] = output[x].add(&K::one()),
                    Some((Symbol::Letter(a), rest)) => {
                        let mut w = Vec::with_capacity(rest.len());
                        for s in rest {
                            match *s {
                                Symbol::Nonterminal(y) => w.push(y),
                                Symbol::Letter(_) => {
                                    return Err(Error::NotGnf {
                                        nonterminal: names[x].clone(),
                                        body: grammar.format_body(body),
                                    })
                                }
                            }
                        }
                        deriv[x][*a].add_term(Monomial(w), K::one());
                    }
                    Some(_) => {
                        return Err(Error::NotGnf {
                            nonterminal: names[x].clone(),
                            body: grammar.format_body(body),
                        })
                    }
                }
            }
        }
    }
    let system = GrammarSystem::new(f.alphabet, names, output, deriv)?;
    let start = f.start.map(|l| parse_polynomial(&l, &index)).transpose()?;
    Ok(GrammarFile { system, start })
}

/// Parses a `#terms` file.
pub fn parse_terms<K: Semiring>(text: &str) -> Result<TermsFile<K>> {
    let f = split_fields::<K>(text, FileKind::Terms)?;
    let mut names = Vec::new();
    let mut index = HashMap::new();
    let mut defs = Vec::new();
    for line in &f.body {
        let Some((x, member, rhs)) = split_definition(line) else {
            return Err(err(line.no, line.col, "expected `x.out = k` or `x.a = term`"));
        };
        declare(&mut names, &mut index, x, line, &f.alphabet)?;
        defs.push((*line, x, member, rhs));
    }
    let n = names.len();
    let mut output = vec![K::zero(); n];
    let mut deriv = vec![vec![Term::zero(); f.alphabet.len()]; n];
    let mut seen: BTreeSet<(usize, &str)> = BTreeSet::new();
    for (line, name, member, rhs) in defs {
        let x = index[name];
        if !seen.insert((x, member)) {
            return Err(err(line.no, line.col, format!("`{name}.{member}` defined twice")));
        }
        if member == "out" {
            output[x] = constant(rhs.text.trim_start_matches('#'), rhs.no, rhs.col)?;
        } else if let Some(a) = f.alphabet.index_of(member) {
            deriv[x][a] = ast_to_term(&parse_ast(&rhs)?, rhs.no, &f.alphabet, &index)?;
        } else {
            return Err(err(
                line.no,
                line.col,
                format!("`{member}` is neither `out` nor a letter"),
            ));
        }
    }
    let start = f
        .start
        .map(|l| parse_ast(&l).and_then(|a| ast_to_term(&a, l.no, &f.alphabet, &index)))
        .transpose()?;
    let system = TermSystem::new(f.alphabet, names, output, deriv)?;
    Ok(TermsFile { system, start })
}

/// Parses a `#mu` file: the fields followed by one closed expression, which
/// may span several lines.
pub fn parse_mu<K: Semiring>(text: &str) -> Result<MuFile<K>> {
    let f = split_fields::<K>(text, FileKind::Mu)?;
    if let Some(s) = f.start {
        return Err(err(s.no, s.col, "`start:` is not used in a mu file"));
    }
    let Some(first) = f.body.first() else {
        return Err(err(1, 1, "missing expression"));
    };
    let expr = parse_mu_lines::<K>(&f.body, &f.alphabet)?;
    let expr = ClosedMuExpr::new(expr).map_err(|e| err(first.no, first.col, e.to_string()))?;
    Ok(MuFile {
        alphabet: f.alphabet,
        expr,
    })
}

fn parse_mu_lines<K: Semiring>(lines: &[Line<'_>], alphabet: &Alphabet) -> Result<MuExpr<K>> {
    // Tokens keep the line they came from so errors point at the right place.
    if lines.len() == 1 {
        return ast_to_mu(&parse_ast(&lines[0])?, lines[0].no, alphabet, &mut Vec::new());
    }
    let joined: String = lines.iter().map(|l| l.text).collect::<Vec<_>>().join(" ");
    let line = Line {
        no: lines[0].no,
        col: lines[0].col,
        text: &joined,
    };
    ast_to_mu(&parse_ast(&line)?, line.no, alphabet, &mut Vec::new())
}

/// Parses a single μ-expression over `alphabet`.
pub fn parse_mu_expr<K: Semiring>(text: &str, alphabet: &Alphabet) -> Result<ClosedMuExpr<K>> {
    let line = Line {
        no: 1,
        col: 1,
        text: text.trim(),
    };
    let e = ast_to_mu(&parse_ast(&line)?, 1, alphabet, &mut Vec::new())?;
    ClosedMuExpr::new(e)
}

/// Parses a single term over a term system's names.
pub fn parse_term<K: Semiring>(text: &str, system: &TermSystem<K>) -> Result<Term<K>> {
    let line = Line {
        no: 1,
        col: 1,
        text: text.trim(),
    };
    let vars: HashMap<String, usize> = system
        .nonterminals()
        .iter()
        .enumerate()
        .map(|(i, x)| (x.clone(), i))
        .collect();
    ast_to_term(&parse_ast(&line)?, 1, system.alphabet(), &vars)
}

/// Parses a polynomial over a grammar system's nonterminals.
pub fn parse_polynomial_over<K: Semiring>(text: &str, system: &GrammarSystem<K>) -> Result<Polynomial<K>> {
    let line = Line {
        no: 1,
        col: 1,
        text: text.trim(),
    };
    let vars: HashMap<String, usize> = system
        .nonterminals()
        .iter()
        .enumerate()
        .map(|(i, x)| (x.clone(), i))
        .collect();
    parse_polynomial(&line, &vars)
}

fn preamble<K: Semiring>(kind: FileKind, alphabet: &Alphabet) -> String {
    format!("#{}\nsemiring: {}\nalphabet: {}\n", kind.name(), K::NAME, alphabet)
}

/// Prints a grammar file. Boolean systems use production lines, weighted
/// ones use output and derivative equations.
pub fn print_grammar<K: Semiring>(file: &GrammarFile<K>) -> String {
    let s = &file.system;
    let mut out = preamble::<K>(FileKind::Grammar, s.alphabet());
    if let Some(p) = &file.start {
        out.push_str(&format!("start: {}\n", s.format_polynomial(p)));
    }
    match s.to_grammar() {
        Ok(g) => {
            for (x, name) in s.nonterminals().iter().enumerate() {
                let bodies: Vec<String> = g.productions(x).iter().map(|b| g.format_body(b)).collect();
                if bodies.is_empty() {
                    out.push_str(&format!("{name} ->\n"));
                } else {
                    out.push_str(&format!("{name} -> {}\n", bodies.join(" | ")));
                }
            }
        }
        Err(_) => {
            for (x, name) in s.nonterminals().iter().enumerate() {
                out.push_str(&format!("{name}.out = {}\n", s.var_output(x)));
                for a in s.alphabet().letters() {
                    out.push_str(&format!(
                        "{name}.{} = {}\n",
                        s.alphabet().name(a),
                        format_polynomial(s.var_derivative(x, a), s.nonterminals())
                    ));
                }
            }
        }
    }
    out
}

pub fn print_terms<K: Semiring>(file: &TermsFile<K>) -> String {
    let s = &file.system;
    let mut out = preamble::<K>(FileKind::Terms, s.alphabet());
    if let Some(t) = &file.start {
        out.push_str(&format!("start: {}\n", s.format_term(t)));
    }
    for (x, name) in s.nonterminals().iter().enumerate() {
        out.push_str(&format!("{name}.out = {}\n", s.var_output(x)));
        for a in s.alphabet().letters() {
            out.push_str(&format!(
                "{name}.{} = {}\n",
                s.alphabet().name(a),
                format_term(s.var_derivative(x, a), s.alphabet().names(), s.nonterminals())
            ));
        }
    }
    out
}

pub fn print_mu<K: Semiring>(file: &MuFile<K>) -> String {
    let mut out = preamble::<K>(FileKind::Mu, &file.alphabet);
    out.push_str(&format_mu(file.expr.expr(), file.alphabet.names()));
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{Boolean, Natural};

    const RUNNING: &str = "#grammar
semiring: bool
alphabet: a b
x -> _ | a x z | b y z
y -> _ | b y z
z -> a
";

    #[test]
    fn grammar_round_trip() {
        let g: GrammarFile<Boolean> = parse_grammar(RUNNING).unwrap();
        assert_eq!(g.system.nonterminals(), ["x", "y", "z"]);
        assert_eq!(*g.system.var_derivative(0, 0), Polynomial::word(vec![0, 2]));
        assert_eq!(print_grammar(&g), RUNNING);
    }

    #[test]
    fn weighted_grammar() {
        let text = "#grammar
semiring: nat
alphabet: a
start: x
x.out = 1
x.a = x x
";
        let g: GrammarFile<Natural> = parse_grammar(text).unwrap();
        assert_eq!(
            g.system.coefficient(&Polynomial::var(0), &[0, 0, 0]).unwrap(),
            Natural::new(5)
        );
        assert_eq!(print_grammar(&g), text);
        let two: GrammarFile<Natural> =
            parse_grammar("#grammar\nalphabet: a\nx.out = 3\nx.a = 2*x x + 1 + x\n").unwrap();
        assert_eq!(
            two.system.format_polynomial(two.system.var_derivative(0, 0)),
            "1 + x + 2*x x"
        );
    }

    #[test]
    fn grammar_errors() {
        let mixed = "#grammar\nalphabet: a\nx -> a\nx.out = 1\n";
        assert!(matches!(
            parse_grammar::<Boolean>(mixed),
            Err(Error::Parse { line: 4, .. })
        ));
        let undefined = "#grammar\nalphabet: a\nx -> a y\n";
        assert!(matches!(
            parse_grammar::<Boolean>(undefined),
            Err(Error::Parse { line: 3, .. })
        ));
        let not_gnf = "#grammar\nalphabet: a\nx -> x a\n";
        assert!(matches!(parse_grammar::<Boolean>(not_gnf), Err(Error::NotGnf { .. })));
        assert!(matches!(
            parse_grammar::<Natural>(RUNNING),
            Err(Error::SemiringMismatch { .. })
        ));
        assert!(matches!(
            parse_grammar::<Boolean>("#terms\nalphabet: a\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn terms_round_trip() {
        let text = "#terms
semiring: bool
alphabet: a b
start: x
x.out = 1
x.a = x * a
x.b = y * a
y.out = 1
y.a = 0
y.b = y * a
";
        let t: TermsFile<Boolean> = parse_terms(text).unwrap();
        assert_eq!(print_terms(&t), text);
        let p: TermsFile<Boolean> =
            parse_terms("#terms\nalphabet: a\nx.out = 0\nx.a = a + x * a + 1 // tail\n").unwrap();
        assert_eq!(p.system.format_term(p.system.var_derivative(0, 0)), "a + ((x * a) + 1)");
    }

    #[test]
    fn mu_round_trip() {
        let text = "#mu
semiring: bool
alphabet: a b
mu x . (1 + (a * (x * b)))
";
        let m: MuFile<Boolean> = parse_mu(text).unwrap();
        assert_eq!(print_mu(&m), text);
        let loose: MuFile<Boolean> = parse_mu("#mu\nalphabet: a b\nmu x . 1 + a * x * b\n").unwrap();
        assert_eq!(loose.expr, m.expr);
    }

    #[test]
    fn mu_errors() {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        assert!(parse_mu_expr::<Boolean>("mu x . x", &ab).is_err());
        assert!(parse_mu_expr::<Boolean>("a * y", &ab).is_err());
        assert!(parse_mu_expr::<Boolean>("mu x~1 . 1", &ab).is_err());
        match parse_mu_expr::<Boolean>("a + (b", &ab) {
            Err(Error::Parse { line: 1, column: 7, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_mu_expr::<Boolean>("#2", &ab).is_err());
        assert_eq!(
            parse_mu_expr::<Natural>("#2 * a", &ab).unwrap().format(ab.names()),
            "#2 * a"
        );
    }

    #[test]
    fn star_sugar() {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        let e = parse_mu_expr::<Boolean>("star(a)", &ab).unwrap();
        assert_eq!(e.format(ab.names()), "mu s . (1 + ((a * (1 * s)) + (b * (0 * s))))");
        assert_eq!(e.coefficient(&[0, 0, 0]), Boolean(true));
        assert_eq!(e.coefficient(&[0, 1]), Boolean(false));
    }

    #[test]
    fn detection() {
        let h = detect("// leading comment\n#mu\nsemiring: nat\nalphabet: a\n1\n").unwrap();
        assert_eq!(h.kind, FileKind::Mu);
        assert_eq!(h.semiring, Some(SemiringKind::Nat));
        assert!(detect("").is_err());
    }
}
