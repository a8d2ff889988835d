//! Parameter types and their meet-semilattice algebra.
//!
//! Every argument of a predicate lives in a declared type: an integer interval
//! lattice ordered by inclusion, a finite meet-semilattice given by its Hasse
//! diagram, or one of the two truth lattices. Values carry the id of their type
//! so that mixing types is caught at the point of the meet rather than later.
//!
//! Only meets are ever required; joins are neither computed nor assumed.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{max, min};
use core::fmt;

/// Index of a declared type in a [`TypeTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeId(pub u32);

/// Upper endpoint of an interval. `Unbounded` sorts above every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Upper {
    At(i64),
    Unbounded,
}

impl Upper {
    fn at_least(self, lo: i64) -> bool {
        match self {
            Upper::At(hi) => hi >= lo,
            Upper::Unbounded => true,
        }
    }
}

/// A non-empty integer interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub lo: i64,
    pub hi: Upper,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Option<Self> {
        (lo <= hi).then_some(Interval { lo, hi: Upper::At(hi) })
    }

    pub fn open(lo: i64) -> Self {
        Interval { lo, hi: Upper::Unbounded }
    }

    pub fn point(x: i64) -> Self {
        Interval { lo: x, hi: Upper::At(x) }
    }

    /// Intersection, `None` when empty.
    pub fn intersect(self, other: Interval) -> Option<Interval> {
        let lo = max(self.lo, other.lo);
        let hi = min(self.hi, other.hi);
        hi.at_least(lo).then_some(Interval { lo, hi })
    }

    pub fn contains(self, other: Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Upper::At(hi) => write!(f, "[{},{}]", self.lo, hi),
            Upper::Unbounded => write!(f, "[{},+inf)", self.lo),
        }
    }
}

/// Truth symbols. `U` ("undefined") sits above both `T` and `F`; the meet of
/// `T` and `F` is bottom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Truth {
    T,
    F,
    U,
}

impl Truth {
    pub fn meet(self, other: Truth) -> Option<Truth> {
        match (self, other) {
            (a, b) if a == b => Some(a),
            (Truth::U, x) | (x, Truth::U) => Some(x),
            _ => None,
        }
    }

    pub fn leq(self, other: Truth) -> bool {
        self.meet(other) == Some(self)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Truth::T => "T",
            Truth::F => "F",
            Truth::U => "U",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Truth> {
        match s {
            "T" => Some(Truth::T),
            "F" => Some(Truth::F),
            "U" => Some(Truth::U),
            _ => None,
        }
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Payload {
    Interval(Interval),
    Element(u16),
    Truth(Truth),
    Bottom,
}

/// A value of some declared type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeValue {
    pub ty: TypeId,
    pub payload: Payload,
}

impl LatticeValue {
    pub fn bottom(ty: TypeId) -> Self {
        LatticeValue { ty, payload: Payload::Bottom }
    }

    pub fn is_bottom(&self) -> bool {
        self.payload == Payload::Bottom
    }

    pub fn as_interval(&self) -> Option<Interval> {
        match self.payload {
            Payload::Interval(iv) => Some(iv),
            _ => None,
        }
    }
}

/// Free function form of [`LatticeValue::is_bottom`].
pub fn is_bottom(v: &LatticeValue) -> bool {
    v.is_bottom()
}

/// A finite meet-semilattice over named elements.
///
/// Built from a set of `a <= b` pairs; the reflexive-transitive closure gives
/// the order and the meet table is derived from it. Elements without a common
/// lower bound meet to bottom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLattice {
    names: Vec<String>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<Option<u16>>>,
}

impl FiniteLattice {
    pub fn new(names: Vec<String>, order: &[(usize, usize)]) -> Result<Self, LatticeError> {
        let n = names.len();
        if n == 0 {
            return Err(LatticeError::EmptyLattice);
        }
        if n > u16::MAX as usize {
            return Err(LatticeError::TooManyElements(n));
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(LatticeError::DuplicateElement(a.clone()));
            }
        }
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in order {
            leq[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    let row = leq[k].clone();
                    for (cell, reach) in leq[i].iter_mut().zip(row) {
                        *cell |= reach;
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i][j] && leq[j][i] {
                    return Err(LatticeError::CyclicOrder(names[i].clone(), names[j].clone()));
                }
            }
        }
        let mut meet = vec![vec![None; n]; n];
        for a in 0..n {
            for b in 0..n {
                let lower: Vec<usize> = (0..n).filter(|&x| leq[x][a] && leq[x][b]).collect();
                if lower.is_empty() {
                    continue;
                }
                let greatest = lower.iter().copied().find(|&g| lower.iter().all(|&x| leq[x][g]));
                match greatest {
                    Some(g) => meet[a][b] = Some(g as u16),
                    None => {
                        return Err(LatticeError::NoGreatestLowerBound(
                            names[a].clone(),
                            names[b].clone(),
                        ))
                    }
                }
            }
        }
        Ok(FiniteLattice { names, leq, meet })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: u16) -> &str {
        &self.names[id as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<u16> {
        self.names.iter().position(|n| n == name).map(|i| i as u16)
    }

    pub fn meet(&self, a: u16, b: u16) -> Option<u16> {
        self.meet[a as usize][b as usize]
    }

    pub fn leq(&self, a: u16, b: u16) -> bool {
        self.leq[a as usize][b as usize]
    }

    /// Minimal elements: the points an element decomposes into.
    pub fn atoms(&self) -> Vec<u16> {
        let n = self.names.len();
        (0..n)
            .filter(|&a| (0..n).all(|x| x == a || !self.leq[x][a]))
            .map(|a| a as u16)
            .collect()
    }

    /// Hasse cover pairs `(a, b)` with `a < b` and nothing strictly between.
    pub fn covers(&self) -> Vec<(u16, u16)> {
        let n = self.names.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a == b || !self.leq[a][b] {
                    continue;
                }
                let between = (0..n).any(|c| c != a && c != b && self.leq[a][c] && self.leq[c][b]);
                if !between {
                    out.push((a as u16, b as u16));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeKind {
    /// Integer intervals ordered by inclusion, optionally confined to `[min, max]`.
    IntegerInterval { min: Option<i64>, max: Option<i64> },
    Finite(FiniteLattice),
    /// `{T, F}` with `T ∧ F = ⊥`.
    Truth3,
    /// `{T, F, U}` with `T, F ≤ U`.
    Truth4,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeTypeDecl {
    pub name: String,
    pub kind: TypeKind,
    pub unit: Option<String>,
}

/// A positive rational `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Option<Self> {
        if num <= 0 || den <= 0 {
            return None;
        }
        let g = gcd(num as u64, den as u64) as i64;
        Some(Rational { num: num / g, den: den / g })
    }

    pub fn integer(n: i64) -> Option<Self> {
        Rational::new(n, 1)
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Affine unit conversion `x -> x * multiplier + offset` between interval types.
///
/// Endpoints that land between integers are rounded outward, and the result is
/// clipped to the target type's declared bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConversionMap {
    pub source: TypeId,
    pub target: TypeId,
    pub multiplier: Rational,
    pub offset: i64,
}

impl ConversionMap {
    pub fn identity(ty: TypeId) -> Self {
        ConversionMap { source: ty, target: ty, multiplier: Rational { num: 1, den: 1 }, offset: 0 }
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.multiplier == (Rational { num: 1, den: 1 }) && self.offset == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeError {
    TypeMismatch { expected: String, found: String },
    UnknownType(String),
    DuplicateType(String),
    UnknownElement { ty: String, element: String },
    DuplicateElement(String),
    EmptyLattice,
    TooManyElements(usize),
    CyclicOrder(String, String),
    NoGreatestLowerBound(String, String),
    InvalidBounds { ty: String },
    EmptyInterval { lo: i64, hi: i64 },
    OutOfBounds { ty: String, value: String },
    /// Down-set enumeration asked for an interval with no upper endpoint.
    UnboundedInterval(String),
    /// The type has no finite universe to enumerate.
    UnboundedType(String),
    InvalidTruth { ty: String, symbol: String },
    NotAnInterval(String),
    NotAFiniteLattice(String),
    NotATruthType(String),
    InvalidConversion { source: String, target: String, reason: &'static str },
    ConversionOverflow { value: String },
    DuplicateConversion { source: String, target: String },
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use LatticeError::*;
        match self {
            TypeMismatch { expected, found } => {
                write!(f, "type mismatch: expected a value of type {expected}, found {found}")
            }
            UnknownType(t) => write!(f, "unknown type `{t}`"),
            DuplicateType(t) => write!(f, "type `{t}` declared twice"),
            UnknownElement { ty, element } => write!(f, "`{element}` is not an element of type {ty}"),
            DuplicateElement(e) => write!(f, "lattice element `{e}` declared twice"),
            EmptyLattice => write!(f, "finite lattice has no elements"),
            TooManyElements(n) => write!(f, "finite lattice has {n} elements; at most 65535 supported"),
            CyclicOrder(a, b) => write!(f, "order is not antisymmetric: `{a}` <= `{b}` <= `{a}`"),
            NoGreatestLowerBound(a, b) => {
                write!(f, "`{a}` and `{b}` have common lower bounds but no greatest one")
            }
            InvalidBounds { ty } => write!(f, "type {ty} has min greater than max"),
            EmptyInterval { lo, hi } => write!(f, "interval [{lo},{hi}] is empty"),
            OutOfBounds { ty, value } => write!(f, "value {value} lies outside the bounds of type {ty}"),
            UnboundedInterval(v) => write!(f, "cannot enumerate the down-set of unbounded interval {v}"),
            UnboundedType(t) => write!(f, "type {t} has no declared bounds"),
            InvalidTruth { ty, symbol } => write!(f, "`{symbol}` is not a truth value of type {ty}"),
            NotAnInterval(t) => write!(f, "type {t} is not an interval type"),
            NotAFiniteLattice(t) => write!(f, "type {t} is not a finite lattice"),
            NotATruthType(t) => write!(f, "type {t} is not a truth type"),
            InvalidConversion { source, target, reason } => {
                write!(f, "invalid conversion {source} -> {target}: {reason}")
            }
            ConversionOverflow { value } => write!(f, "converting {value} overflows 64-bit integers"),
            DuplicateConversion { source, target } => {
                write!(f, "conversion {source} -> {target} declared twice")
            }
        }
    }
}

impl core::error::Error for LatticeError {}

/// Registry of declared types and unit conversions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeTable {
    types: Vec<LatticeTypeDecl>,
    conversions: Vec<ConversionMap>,
}

impl TypeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, decl: LatticeTypeDecl) -> Result<TypeId, LatticeError> {
        if self.lookup(&decl.name).is_some() {
            return Err(LatticeError::DuplicateType(decl.name));
        }
        if let TypeKind::IntegerInterval { min: Some(lo), max: Some(hi) } = decl.kind {
            if lo > hi {
                return Err(LatticeError::InvalidBounds { ty: decl.name });
            }
        }
        self.types.push(decl);
        Ok(TypeId(self.types.len() as u32 - 1))
    }

    pub fn lookup(&self, name: &str) -> Option<TypeId> {
        self.types.iter().position(|t| t.name == name).map(|i| TypeId(i as u32))
    }

    pub fn decl(&self, ty: TypeId) -> &LatticeTypeDecl {
        &self.types[ty.0 as usize]
    }

    pub fn name(&self, ty: TypeId) -> &str {
        &self.decl(ty).name
    }

    pub fn types(&self) -> impl Iterator<Item = (TypeId, &LatticeTypeDecl)> {
        self.types.iter().enumerate().map(|(i, d)| (TypeId(i as u32), d))
    }

    pub fn conversions(&self) -> &[ConversionMap] {
        &self.conversions
    }

    pub fn add_conversion(&mut self, map: ConversionMap) -> Result<(), LatticeError> {
        let source = self.name(map.source).to_string();
        let target = self.name(map.target).to_string();
        let both_intervals = matches!(self.decl(map.source).kind, TypeKind::IntegerInterval { .. })
            && matches!(self.decl(map.target).kind, TypeKind::IntegerInterval { .. });
        if !both_intervals {
            return Err(LatticeError::InvalidConversion {
                source,
                target,
                reason: "conversions are defined between interval types only",
            });
        }
        if map.source == map.target {
            return Err(LatticeError::InvalidConversion { source, target, reason: "source and target coincide" });
        }
        if self.conversion(map.source, map.target).is_some() {
            return Err(LatticeError::DuplicateConversion { source, target });
        }
        self.conversions.push(map);
        Ok(())
    }

    /// The registered map from `source` to `target`; identity when they coincide.
    pub fn conversion(&self, source: TypeId, target: TypeId) -> Option<ConversionMap> {
        if source == target {
            return Some(ConversionMap::identity(source));
        }
        self.conversions.iter().find(|c| c.source == source && c.target == target).cloned()
    }

    pub fn interval(&self, ty: TypeId, lo: i64, hi: Upper) -> Result<LatticeValue, LatticeError> {
        let TypeKind::IntegerInterval { min: tmin, max: tmax } = self.decl(ty).kind else {
            return Err(LatticeError::NotAnInterval(self.name(ty).to_string()));
        };
        if let Upper::At(h) = hi {
            if h < lo {
                return Err(LatticeError::EmptyInterval { lo, hi: h });
            }
        }
        let iv = Interval { lo, hi };
        let below = tmin.is_some_and(|m| lo < m);
        let above = match (tmax, hi) {
            (Some(m), Upper::At(h)) => h > m,
            (Some(_), Upper::Unbounded) => false,
            (None, _) => false,
        };
        if below || above {
            return Err(LatticeError::OutOfBounds { ty: self.name(ty).to_string(), value: iv.to_string() });
        }
        // An open upper end inside a bounded type means "up to the type's maximum".
        let hi = match (tmax, hi) {
            (Some(m), Upper::Unbounded) => {
                if m < lo {
                    return Err(LatticeError::OutOfBounds { ty: self.name(ty).to_string(), value: iv.to_string() });
                }
                Upper::At(m)
            }
            _ => hi,
        };
        Ok(LatticeValue { ty, payload: Payload::Interval(Interval { lo, hi }) })
    }

    pub fn element(&self, ty: TypeId, name: &str) -> Result<LatticeValue, LatticeError> {
        match &self.decl(ty).kind {
            TypeKind::Finite(l) => l
                .index_of(name)
                .map(|e| LatticeValue { ty, payload: Payload::Element(e) })
                .ok_or_else(|| LatticeError::UnknownElement {
                    ty: self.name(ty).to_string(),
                    element: name.to_string(),
                }),
            _ => Err(LatticeError::NotAFiniteLattice(self.name(ty).to_string())),
        }
    }

    pub fn truth(&self, ty: TypeId, t: Truth) -> Result<LatticeValue, LatticeError> {
        match self.decl(ty).kind {
            TypeKind::Truth4 => Ok(LatticeValue { ty, payload: Payload::Truth(t) }),
            TypeKind::Truth3 if t != Truth::U => Ok(LatticeValue { ty, payload: Payload::Truth(t) }),
            TypeKind::Truth3 => Err(LatticeError::InvalidTruth {
                ty: self.name(ty).to_string(),
                symbol: t.symbol().to_string(),
            }),
            _ => Err(LatticeError::NotATruthType(self.name(ty).to_string())),
        }
    }

    fn same_type(&self, a: &LatticeValue, b: &LatticeValue) -> Result<(), LatticeError> {
        if a.ty == b.ty {
            Ok(())
        } else {
            Err(LatticeError::TypeMismatch {
                expected: self.name(a.ty).to_string(),
                found: self.name(b.ty).to_string(),
            })
        }
    }

    /// Greatest lower bound of two values of the same type.
    pub fn meet(&self, a: &LatticeValue, b: &LatticeValue) -> Result<LatticeValue, LatticeError> {
        self.same_type(a, b)?;
        let ty = a.ty;
        let payload = match (a.payload, b.payload) {
            (Payload::Bottom, _) | (_, Payload::Bottom) => Payload::Bottom,
            (Payload::Interval(x), Payload::Interval(y)) => {
                x.intersect(y).map_or(Payload::Bottom, Payload::Interval)
            }
            (Payload::Element(x), Payload::Element(y)) => match &self.decl(ty).kind {
                TypeKind::Finite(l) => l.meet(x, y).map_or(Payload::Bottom, Payload::Element),
                _ => unreachable!("element payload outside a finite lattice"),
            },
            (Payload::Truth(x), Payload::Truth(y)) => x.meet(y).map_or(Payload::Bottom, Payload::Truth),
            _ => unreachable!("payload kinds disagree within one type"),
        };
        Ok(LatticeValue { ty, payload })
    }

    /// `a ≤ b` iff `meet(a, b) = a`.
    pub fn leq(&self, a: &LatticeValue, b: &LatticeValue) -> Result<bool, LatticeError> {
        Ok(self.meet(a, b)? == *a)
    }

    /// Every non-bottom value below `v`, each exactly once, in ascending payload order.
    pub fn enumerate_downset(&self, v: &LatticeValue) -> Result<Vec<LatticeValue>, LatticeError> {
        let ty = v.ty;
        let mut out = Vec::new();
        match v.payload {
            Payload::Bottom => {}
            Payload::Interval(iv) => {
                let Upper::At(hi) = iv.hi else {
                    return Err(LatticeError::UnboundedInterval(iv.to_string()));
                };
                for lo in iv.lo..=hi {
                    for h in lo..=hi {
                        out.push(LatticeValue { ty, payload: Payload::Interval(Interval::point(lo).with_hi(h)) });
                    }
                }
            }
            Payload::Element(e) => {
                let TypeKind::Finite(l) = &self.decl(ty).kind else { unreachable!() };
                for x in 0..l.len() as u16 {
                    if l.leq(x, e) {
                        out.push(LatticeValue { ty, payload: Payload::Element(x) });
                    }
                }
            }
            Payload::Truth(t) => {
                for x in [Truth::T, Truth::F, Truth::U] {
                    if x.leq(t) {
                        out.push(LatticeValue { ty, payload: Payload::Truth(x) });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Apply a conversion map. Bottom maps to bottom and an open upper end stays open.
    pub fn convert(&self, v: &LatticeValue, map: &ConversionMap) -> Result<LatticeValue, LatticeError> {
        if v.ty != map.source {
            return Err(LatticeError::TypeMismatch {
                expected: self.name(map.source).to_string(),
                found: self.name(v.ty).to_string(),
            });
        }
        if map.is_identity() {
            return Ok(*v);
        }
        let target = map.target;
        let iv = match v.payload {
            Payload::Bottom => return Ok(LatticeValue::bottom(target)),
            Payload::Interval(iv) => iv,
            _ => return Err(LatticeError::NotAnInterval(self.name(v.ty).to_string())),
        };
        let overflow = || LatticeError::ConversionOverflow { value: iv.to_string() };
        let scale = |x: i64, round_up: bool| -> Result<i64, LatticeError> {
            let n = x as i128 * map.multiplier.num as i128;
            let d = map.multiplier.den as i128;
            let q = if round_up { div_ceil(n, d) } else { n.div_euclid(d) };
            let r = q + map.offset as i128;
            i64::try_from(r).map_err(|_| overflow())
        };
        let lo = scale(iv.lo, false)?;
        let hi = match iv.hi {
            Upper::At(h) => Upper::At(scale(h, true)?),
            Upper::Unbounded => Upper::Unbounded,
        };
        let converted = Interval { lo, hi };
        let payload = match self.universe_interval(target) {
            Some(u) => converted.intersect(u).map_or(Payload::Bottom, Payload::Interval),
            None => Payload::Interval(converted),
        };
        Ok(LatticeValue { ty: target, payload })
    }

    /// The declared range of an interval type, if it has a lower bound.
    pub fn universe_interval(&self, ty: TypeId) -> Option<Interval> {
        match self.decl(ty).kind {
            TypeKind::IntegerInterval { min: Some(lo), max } => Some(Interval {
                lo,
                hi: max.map_or(Upper::Unbounded, Upper::At),
            }),
            TypeKind::IntegerInterval { min: None, max: Some(_) } => None,
            _ => None,
        }
    }

    /// Atomic values of a type: single integers, minimal lattice elements, `T`/`F`.
    pub fn points(&self, ty: TypeId) -> Result<Vec<LatticeValue>, LatticeError> {
        Ok(match &self.decl(ty).kind {
            TypeKind::IntegerInterval { min: Some(lo), max: Some(hi) } => (*lo..=*hi)
                .map(|x| LatticeValue { ty, payload: Payload::Interval(Interval::point(x)) })
                .collect(),
            TypeKind::IntegerInterval { .. } => {
                return Err(LatticeError::UnboundedType(self.name(ty).to_string()))
            }
            TypeKind::Finite(l) => {
                l.atoms().into_iter().map(|e| LatticeValue { ty, payload: Payload::Element(e) }).collect()
            }
            TypeKind::Truth3 | TypeKind::Truth4 => [Truth::T, Truth::F]
                .into_iter()
                .map(|t| LatticeValue { ty, payload: Payload::Truth(t) })
                .collect(),
        })
    }

    /// Every non-bottom value of a finite type (all elements, or all truth symbols).
    pub fn finite_values(&self, ty: TypeId) -> Option<Vec<LatticeValue>> {
        match &self.decl(ty).kind {
            TypeKind::Finite(l) => {
                Some((0..l.len() as u16).map(|e| LatticeValue { ty, payload: Payload::Element(e) }).collect())
            }
            TypeKind::Truth3 => {
                Some([Truth::T, Truth::F].into_iter().map(|t| LatticeValue { ty, payload: Payload::Truth(t) }).collect())
            }
            TypeKind::Truth4 => Some(
                [Truth::T, Truth::F, Truth::U]
                    .into_iter()
                    .map(|t| LatticeValue { ty, payload: Payload::Truth(t) })
                    .collect(),
            ),
            TypeKind::IntegerInterval { .. } => None,
        }
    }

    pub fn show(&self, v: &LatticeValue) -> ValueDisplay<'_> {
        ValueDisplay { table: self, value: *v }
    }
}

impl Interval {
    fn with_hi(self, hi: i64) -> Interval {
        Interval { lo: self.lo, hi: Upper::At(hi) }
    }
}

fn div_ceil(n: i128, d: i128) -> i128 {
    -((-n).div_euclid(d))
}

pub struct ValueDisplay<'a> {
    table: &'a TypeTable,
    value: LatticeValue,
}

impl fmt::Display for ValueDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value.payload {
            Payload::Interval(iv) => iv.fmt(f),
            Payload::Element(e) => match &self.table.decl(self.value.ty).kind {
                TypeKind::Finite(l) => f.write_str(l.name(e)),
                _ => write!(f, "#{e}"),
            },
            Payload::Truth(t) => t.fmt(f),
            Payload::Bottom => f.write_str("⊥"),
        }
    }
}
