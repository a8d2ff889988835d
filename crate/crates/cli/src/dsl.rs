//! The theory language.
//!
//! ```text
//! # comment
//! type Age = interval 0..120 unit "years"
//! type Flag = truth4
//! lattice Exam { m, bx, m_bx <= m, m_bx <= bx }
//! convert Daily -> Weekly mul 7
//! pred s(Age, Exam, Freq)
//! theory Tc { s(Age:[50,54], m, an)  s([55,74], m, bi) | s([55,74], m, an) }
//! theory No { not s(Age:[55,74], Exam:m, an) }
//! generic_sheaf Numbers {
//!   nodes 0, 1
//!   order 0 <= 1
//!   stalk 0 = {"{0}"}
//!   stalk 1 = {"{1}", "{0}"}
//!   map 0 -> 1 { "{0}" -> "{1}" }
//! }
//! ```
//!
//! Declarations may appear in any file and in any order; all files of a run
//! share one vocabulary.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use sheafaccord_core::{
    Atom, ConversionMap, Corpus, FiniteLattice, GenericSheafSpec, LatticeTypeDecl, LatticeValue, Literal,
    PredicateSignature, Rational, Truth, TypeId, TypeKind, TypeTable, Upper, Vocabulary,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub file: String,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: error: {}", self.file, self.line, self.col, self.message)
    }
}

impl std::error::Error for Diagnostic {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => f.write_str("end of file"),
        }
    }
}

const PUNCT: [&str; 15] = ["->", "<=", "..", "{", "}", "(", ")", "[", "]", ",", ";", ":", "|", "=", "/"];

fn lex(file: &str, src: &str) -> Result<Vec<(Tok, Pos)>, Diagnostic> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, message: String| Diagnostic { file: file.to_string(), line, col, message };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            advance(1, &mut i, &mut col);
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c == '"' {
            let start = i;
            i += 1;
            let mut s = String::new();
            while i < chars.len() && chars[i] != '"' {
                if chars[i] == '\n' {
                    return Err(err(pos.line, pos.col, "unterminated string".into()));
                }
                s.push(chars[i]);
                i += 1;
            }
            if i == chars.len() {
                return Err(err(pos.line, pos.col, "unterminated string".into()));
            }
            i += 1;
            col += i - start;
            out.push((Tok::Str(s), pos));
        } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse::<i64>().map_err(|_| err(pos.line, pos.col, format!("integer `{text}` out of range")))?;
            col += i - start;
            out.push((Tok::Int(n), pos));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            col += i - start;
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let Some(p) = PUNCT.iter().find(|p| rest.starts_with(**p)) else {
                return Err(err(line, col, format!("unexpected character `{c}`")));
            };
            advance(p.len(), &mut i, &mut col);
            out.push((Tok::Punct(p), pos));
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[derive(Clone, Debug)]
enum ValueAst {
    Interval(i64, Option<i64>),
    Int(i64),
    Name(String),
}

#[derive(Clone, Debug)]
struct ArgAst {
    ty: Option<String>,
    value: ValueAst,
    pos: Pos,
}

#[derive(Clone, Debug)]
struct LiteralAst {
    positive: bool,
    predicate: String,
    args: Vec<ArgAst>,
    pos: Pos,
}

#[derive(Clone, Debug)]
enum TypeAst {
    Interval { min: Option<i64>, max: Option<i64>, unit: Option<String> },
    Truth3,
    Truth4,
    Lattice { elems: Vec<String>, order: Vec<(String, String)> },
}

/// `map from -> to { element -> element, ... }`
type MapAst = (String, String, Vec<(String, String)>);

#[derive(Clone, Debug)]
enum Item {
    Type { name: String, kind: TypeAst },
    Convert { source: String, target: String, num: i64, den: i64, offset: i64 },
    Pred { name: String, args: Vec<String> },
    Theory { id: String, clauses: Vec<Vec<LiteralAst>> },
    Sheaf {
        id: String,
        nodes: Vec<String>,
        order: Vec<(String, String)>,
        stalks: Vec<(String, Vec<String>)>,
        maps: Vec<MapAst>,
    },
}

struct Parser<'a> {
    file: &'a str,
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, pos: Pos, message: impl Into<String>) -> Result<T, Diagnostic> {
        Err(Diagnostic { file: self.file.to_string(), line: pos.line, col: pos.col, message: message.into() })
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, Diagnostic> {
        self.error(self.pos(), format!("expected {wanted}, found {}", self.peek()))
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), Diagnostic> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.unexpected(&format!("`{p}`"))
        }
    }

    fn expect_keyword(&mut self, k: &str) -> Result<(), Diagnostic> {
        if self.is_keyword(k) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("`{k}`"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected(what),
        }
    }

    fn int(&mut self) -> Result<i64, Diagnostic> {
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.unexpected("an integer"),
        }
    }

    /// Identifier, integer or quoted string, as text.
    fn element(&mut self) -> Result<String, Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(s) | Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            Tok::Int(n) => {
                self.bump();
                Ok(n.to_string())
            }
            _ => self.unexpected("a name"),
        }
    }

    fn items(&mut self) -> Result<Vec<(Item, Pos)>, Diagnostic> {
        let mut items = Vec::new();
        loop {
            while self.eat_punct(";") {}
            let pos = self.pos();
            let item = match self.peek().clone() {
                Tok::Eof => return Ok(items),
                Tok::Ident(k) => match k.as_str() {
                    "type" => self.type_decl()?,
                    "lattice" => self.lattice()?,
                    "convert" => self.convert()?,
                    "pred" => self.pred()?,
                    "theory" => self.theory()?,
                    "generic_sheaf" => self.sheaf()?,
                    _ => return self.unexpected("a declaration"),
                },
                _ => return self.unexpected("a declaration"),
            };
            items.push((item, pos));
        }
    }

    fn type_decl(&mut self) -> Result<Item, Diagnostic> {
        self.bump();
        let name = self.ident("a type name")?;
        self.expect_punct("=")?;
        let kind = match self.ident("`interval`, `truth3` or `truth4`")?.as_str() {
            "interval" => {
                let (mut min, mut max) = (None, None);
                if matches!(self.peek(), Tok::Int(_)) {
                    min = Some(self.int()?);
                    self.expect_punct("..")?;
                    if self.is_keyword("inf") {
                        self.bump();
                    } else {
                        max = Some(self.int()?);
                    }
                }
                let mut unit = None;
                if self.is_keyword("unit") {
                    self.bump();
                    match self.bump() {
                        (Tok::Str(s), _) => unit = Some(s),
                        (_, pos) => return self.error(pos, "expected a quoted unit label"),
                    }
                }
                TypeAst::Interval { min, max, unit }
            }
            "truth3" => TypeAst::Truth3,
            "truth4" => TypeAst::Truth4,
            other => return self.error(self.toks[self.at - 1].1, format!("unknown type kind `{other}`")),
        };
        Ok(Item::Type { name, kind })
    }

    fn lattice(&mut self) -> Result<Item, Diagnostic> {
        self.bump();
        let name = self.ident("a lattice name")?;
        self.expect_punct("{")?;
        let (mut elems, mut order) = (Vec::new(), Vec::new());
        let add = |e: &String, elems: &mut Vec<String>| {
            if !elems.contains(e) {
                elems.push(e.clone());
            }
        };
        while !self.eat_punct("}") {
            let a = self.ident("an element name")?;
            add(&a, &mut elems);
            if self.eat_punct("<=") {
                let b = self.ident("an element name")?;
                add(&b, &mut elems);
                order.push((a, b));
            }
            if !self.eat_punct(",") && !self.eat_punct(";") && !self.is_punct("}") {
                return self.unexpected("`,` or `}`");
            }
        }
        Ok(Item::Type { name, kind: TypeAst::Lattice { elems, order } })
    }

    fn convert(&mut self) -> Result<Item, Diagnostic> {
        self.bump();
        let source = self.ident("a type name")?;
        self.expect_punct("->")?;
        let target = self.ident("a type name")?;
        self.expect_keyword("mul")?;
        let num = self.int()?;
        let den = if self.eat_punct("/") { self.int()? } else { 1 };
        let offset = if self.is_keyword("add") {
            self.bump();
            self.int()?
        } else {
            0
        };
        Ok(Item::Convert { source, target, num, den, offset })
    }

    fn pred(&mut self) -> Result<Item, Diagnostic> {
        self.bump();
        let name = self.ident("a predicate name")?;
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if !self.eat_punct(")") {
            loop {
                args.push(self.ident("a type name")?);
                if self.eat_punct(")") {
                    break;
                }
                self.expect_punct(",")?;
            }
        }
        Ok(Item::Pred { name, args })
    }

    fn theory(&mut self) -> Result<Item, Diagnostic> {
        self.bump();
        let id = self.element()?;
        self.expect_punct("{")?;
        let mut clauses = Vec::new();
        loop {
            while self.eat_punct(";") || self.eat_punct(",") {}
            if self.eat_punct("}") {
                break;
            }
            let mut clause = vec![self.literal()?];
            while self.eat_punct("|") {
                clause.push(self.literal()?);
            }
            clauses.push(clause);
        }
        Ok(Item::Theory { id, clauses })
    }

    fn literal(&mut self) -> Result<LiteralAst, Diagnostic> {
        let pos = self.pos();
        let mut positive = true;
        if self.is_keyword("not") {
            self.bump();
            positive = false;
            if self.is_keyword("not") {
                return self.error(self.pos(), "double negation is not allowed");
            }
        }
        let predicate = self.ident("a predicate")?;
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if !self.eat_punct(")") {
            loop {
                args.push(self.arg()?);
                if self.eat_punct(")") {
                    break;
                }
                self.expect_punct(",")?;
            }
        }
        Ok(LiteralAst { positive, predicate, args, pos })
    }

    fn arg(&mut self) -> Result<ArgAst, Diagnostic> {
        let pos = self.pos();
        let mut ty = None;
        if matches!(self.peek(), Tok::Ident(_)) && matches!(self.peek_at(1), Tok::Punct(":")) {
            ty = Some(self.ident("a type name")?);
            self.bump();
        }
        let value = match self.peek().clone() {
            Tok::Punct("[") => {
                self.bump();
                let lo = self.int()?;
                self.expect_punct(",")?;
                let hi = if self.is_punct("]") { None } else { Some(self.int()?) };
                self.expect_punct("]")?;
                ValueAst::Interval(lo, hi)
            }
            Tok::Int(n) => {
                self.bump();
                ValueAst::Int(n)
            }
            Tok::Ident(s) => {
                self.bump();
                ValueAst::Name(s)
            }
            _ => return self.unexpected("a value"),
        };
        Ok(ArgAst { ty, value, pos })
    }

    fn sheaf(&mut self) -> Result<Item, Diagnostic> {
        self.bump();
        let id = self.element()?;
        self.expect_punct("{")?;
        let (mut nodes, mut order, mut stalks, mut maps) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        loop {
            while self.eat_punct(";") {}
            if self.eat_punct("}") {
                break;
            }
            match self.ident("`nodes`, `order`, `stalk` or `map`")?.as_str() {
                "nodes" => loop {
                    nodes.push(self.element()?);
                    if !self.eat_punct(",") {
                        break;
                    }
                },
                "order" => loop {
                    let a = self.element()?;
                    self.expect_punct("<=")?;
                    order.push((a, self.element()?));
                    if !self.eat_punct(",") {
                        break;
                    }
                },
                "stalk" => {
                    let node = self.element()?;
                    self.expect_punct("=")?;
                    self.expect_punct("{")?;
                    let mut elems = Vec::new();
                    while !self.eat_punct("}") {
                        elems.push(self.element()?);
                        if !self.eat_punct(",") && !self.is_punct("}") {
                            return self.unexpected("`,` or `}`");
                        }
                    }
                    stalks.push((node, elems));
                }
                "map" => {
                    let from = self.element()?;
                    self.expect_punct("->")?;
                    let to = self.element()?;
                    self.expect_punct("{")?;
                    let mut table = Vec::new();
                    while !self.eat_punct("}") {
                        let a = self.element()?;
                        self.expect_punct("->")?;
                        table.push((a, self.element()?));
                        if !self.eat_punct(",") && !self.eat_punct(";") && !self.is_punct("}") {
                            return self.unexpected("`,` or `}`");
                        }
                    }
                    maps.push((from, to, table));
                }
                other => return self.error(self.toks[self.at - 1].1, format!("unknown generic_sheaf section `{other}`")),
            }
        }
        Ok(Item::Sheaf { id, nodes, order, stalks, maps })
    }
}

/// One source file: its display name and contents.
pub struct Source {
    pub name: String,
    pub text: String,
}

impl Source {
    pub fn read(path: &Path) -> Result<Source, Diagnostic> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Diagnostic { file: name.clone(), line: 0, col: 0, message: format!("cannot read file: {e}") })?;
        Ok(Source { name, text })
    }
}

/// Parses every source and builds one corpus from all of them.
pub fn load(sources: &[Source]) -> Result<Corpus, Diagnostic> {
    let mut parsed: Vec<(&str, Vec<(Item, Pos)>)> = Vec::new();
    for s in sources {
        let toks = lex(&s.name, &s.text)?;
        let items = Parser { file: &s.name, toks, at: 0 }.items()?;
        parsed.push((&s.name, items));
    }
    let all = || parsed.iter().flat_map(|(f, items)| items.iter().map(move |(i, p)| (*f, i, *p)));
    let diag = |file: &str, pos: Pos, message: String| Diagnostic { file: file.to_string(), line: pos.line, col: pos.col, message };

    let mut types = TypeTable::new();
    for (file, item, pos) in all() {
        let Item::Type { name, kind } = item else { continue };
        let (kind, unit) = match kind {
            TypeAst::Interval { min, max, unit } => (TypeKind::IntegerInterval { min: *min, max: *max }, unit.clone()),
            TypeAst::Truth3 => (TypeKind::Truth3, None),
            TypeAst::Truth4 => (TypeKind::Truth4, None),
            TypeAst::Lattice { elems, order } => {
                let idx = |e: &String| elems.iter().position(|x| x == e).expect("collected while parsing");
                let pairs: Vec<(usize, usize)> = order.iter().map(|(a, b)| (idx(a), idx(b))).collect();
                let l = FiniteLattice::new(elems.clone(), &pairs).map_err(|e| diag(file, pos, format!("lattice `{name}`: {e}")))?;
                (TypeKind::Finite(l), None)
            }
        };
        types
            .declare(LatticeTypeDecl { name: name.clone(), kind, unit })
            .map_err(|e| diag(file, pos, e.to_string()))?;
    }
    let lookup = |types: &TypeTable, file: &str, pos: Pos, name: &str| {
        types.lookup(name).ok_or_else(|| diag(file, pos, format!("unknown type `{name}`")))
    };
    for (file, item, pos) in all() {
        let Item::Convert { source, target, num, den, offset } = item else { continue };
        let source = lookup(&types, file, pos, source)?;
        let target = lookup(&types, file, pos, target)?;
        let multiplier = Rational::new(*num, *den)
            .filter(|r| r.num() > 0)
            .ok_or_else(|| diag(file, pos, "conversion multiplier must be a positive rational".into()))?;
        types
            .add_conversion(ConversionMap { source, target, multiplier, offset: *offset })
            .map_err(|e| diag(file, pos, e.to_string()))?;
    }
    let mut vocab = Vocabulary::new(types);
    for (file, item, pos) in all() {
        let Item::Pred { name, args } = item else { continue };
        let args = args.iter().map(|a| lookup(&vocab.types, file, pos, a)).collect::<Result<Vec<TypeId>, _>>()?;
        vocab
            .declare_predicate(PredicateSignature { name: name.clone(), args })
            .map_err(|e| diag(file, pos, e.to_string()))?;
    }

    let mut corpus = Corpus::new(vocab);
    for (file, item, pos) in all() {
        match item {
            Item::Theory { id, clauses } => {
                let mut out = Vec::with_capacity(clauses.len());
                for clause in clauses {
                    let mut lits = Vec::with_capacity(clause.len());
                    for l in clause {
                        lits.push(literal(&corpus.vocab, file, l)?);
                    }
                    out.push(lits);
                }
                corpus
                    .add_theory(sheafaccord_core::TheoryDoc { id: id.clone(), clauses: out })
                    .map_err(|e| diag(file, pos, e.to_string()))?;
            }
            Item::Sheaf { id, nodes, order, stalks, maps } => {
                let stalks: BTreeMap<String, Vec<String>> = stalks.iter().cloned().collect();
                let maps = maps
                    .iter()
                    .map(|(a, b, t)| ((a.clone(), b.clone()), t.iter().cloned().collect()))
                    .collect();
                let spec = GenericSheafSpec::new(id.clone(), nodes.clone(), order, stalks, maps)
                    .map_err(|e| diag(file, pos, e.to_string()))?;
                corpus.add_generic_sheaf(spec);
            }
            _ => {}
        }
    }
    Ok(corpus)
}

fn literal(vocab: &Vocabulary, file: &str, l: &LiteralAst) -> Result<Literal, Diagnostic> {
    let diag = |pos: Pos, message: String| Diagnostic { file: file.to_string(), line: pos.line, col: pos.col, message };
    let sig = vocab
        .predicate(&l.predicate)
        .ok_or_else(|| diag(l.pos, format!("unknown predicate `{}`", l.predicate)))?;
    if sig.args.len() != l.args.len() {
        return Err(diag(
            l.pos,
            format!("predicate `{}` takes {} arguments, found {}", l.predicate, sig.args.len(), l.args.len()),
        ));
    }
    let mut args = Vec::with_capacity(l.args.len());
    for (a, &declared) in l.args.iter().zip(&sig.args) {
        let ty = match &a.ty {
            Some(name) => vocab.types.lookup(name).ok_or_else(|| diag(a.pos, format!("unknown type `{name}`")))?,
            None => declared,
        };
        args.push(value(&vocab.types, ty, &a.value).map_err(|m| diag(a.pos, m))?);
    }
    let atom = Atom { predicate: l.predicate.clone(), args };
    vocab.check_atom(&atom).map_err(|e| diag(l.pos, e.to_string()))?;
    Ok(Literal { atom, positive: l.positive })
}

fn value(types: &TypeTable, ty: TypeId, v: &ValueAst) -> Result<LatticeValue, String> {
    let r = match v {
        ValueAst::Interval(lo, hi) => types.interval(ty, *lo, hi.map_or(Upper::Unbounded, Upper::At)),
        ValueAst::Int(n) => types.interval(ty, *n, Upper::At(*n)),
        ValueAst::Name(name) => match &types.decl(ty).kind {
            TypeKind::Truth3 | TypeKind::Truth4 => match Truth::from_symbol(name) {
                Some(t) => types.truth(ty, t),
                None => return Err(format!("`{name}` is not a truth value of `{}`", types.name(ty))),
            },
            _ => types.element(ty, name),
        },
    };
    r.map_err(|e| e.to_string())
}
