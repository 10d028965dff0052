//! Shared text grammar: polynomials like `3*t^2*x1^4*x2` joined by `+`/`-`,
//! automorphisms `(x1, 2*x2 + t*x1^3)`, field headers `GF(7)` and `QQ`, ring
//! declarations `k`, `k[t]`, `k(t)`, character groups, and instance files.
//!
//! Parsers accept freely spaced input with parentheses, unary minus and
//! coefficient division; printers emit exactly one canonical form, and
//! parse ∘ print is the identity on canonical text.

use std::fmt;

use num::{BigInt, BigRational};

use crate::action::FiniteAbelianSubgroup;
use crate::automorphism::{PolyMap, TameFactor, TameWord};
use crate::bipoly::{frac_to_poly, BiPoly};
use crate::error::{Error, Result};
use crate::fields::{PrimeField, Rationals, UnitGroup};
use crate::lattice::CharacterGroup;
use crate::ratfunc::FracRing;
use crate::ring::{Field, KAlgebra, Ring};
use crate::unipoly::PolyRing;

/// Ground fields whose elements can be written in the text grammar.
pub trait ParseField: Field {
    /// Value of a decimal digit string (no sign).
    fn elem_from_digits(&self, digits: &str) -> Result<Self::Elem>;
    /// Canonical field header, e.g. `GF(7)` or `QQ`.
    fn header(&self) -> String;
}

impl ParseField for PrimeField {
    fn elem_from_digits(&self, digits: &str) -> Result<u64> {
        let p = self.order();
        let mut acc = 0u64;
        for ch in digits.chars() {
            let d = ch
                .to_digit(10)
                .ok_or_else(|| Error::Parse(format!("bad digit {ch:?}")))?;
            acc = (acc * 10 + u64::from(d)) % p;
        }
        Ok(acc)
    }

    fn header(&self) -> String {
        format!("GF({})", self.order())
    }
}

impl ParseField for Rationals {
    fn elem_from_digits(&self, digits: &str) -> Result<BigRational> {
        let n: BigInt = digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad integer {digits:?}")))?;
        Ok(BigRational::from_integer(n))
    }

    fn header(&self) -> String {
        "QQ".to_string()
    }
}

/// Coefficient rings that polynomial text can be evaluated in.
pub trait ParseRing<F: ParseField>: Field + KAlgebra<F> {
    /// The element `t`, for rings that contain one.
    fn t_elem(&self) -> Option<Self::Elem>;
}

impl ParseRing<PrimeField> for PrimeField {
    fn t_elem(&self) -> Option<u64> {
        None
    }
}

impl ParseRing<Rationals> for Rationals {
    fn t_elem(&self) -> Option<BigRational> {
        None
    }
}

impl<F: ParseField> ParseRing<F> for FracRing<F> {
    fn t_elem(&self) -> Option<Self::Elem> {
        Some(self.from_poly(self.poly.var()))
    }
}

/// Which coefficient ring an instance or map declaration names.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingSpec {
    /// The ground field k itself.
    Base,
    /// The polynomial ring k[t].
    Poly,
    /// The rational function field k(t).
    Frac,
}

impl RingSpec {
    /// Suffix appended to a field header: `GF(7)[t]`, `QQ(t)`, ...
    pub fn suffix(self) -> &'static str {
        match self {
            RingSpec::Base => "",
            RingSpec::Poly => "[t]",
            RingSpec::Frac => "(t)",
        }
    }

    /// Standalone declaration used by instance files.
    pub fn decl(self) -> &'static str {
        match self {
            RingSpec::Base => "k",
            RingSpec::Poly => "k[t]",
            RingSpec::Frac => "k(t)",
        }
    }

    pub fn parse_decl(src: &str) -> Result<Self> {
        match src.trim() {
            "k" => Ok(RingSpec::Base),
            "k[t]" => Ok(RingSpec::Poly),
            "k(t)" => Ok(RingSpec::Frac),
            other => Err(Error::Parse(format!(
                "unknown ring declaration {other:?}; expected k, k[t] or k(t)"
            ))),
        }
    }
}

/// A field header as written in text, before a concrete field is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldSpec {
    Gf(u64),
    Q,
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Gf(p) => write!(f, "GF({p})"),
            FieldSpec::Q => write!(f, "QQ"),
        }
    }
}

/// Parse `GF(p)` or `QQ` with an optional ring suffix `[t]` / `(t)`.
pub fn parse_field_and_suffix(src: &str) -> Result<(FieldSpec, RingSpec)> {
    let s = src.trim();
    let (spec, rest) = if let Some(rest) = s.strip_prefix("GF(") {
        let (digits, rest) = rest
            .split_once(')')
            .ok_or_else(|| Error::Parse(format!("unterminated field header in {s:?}")))?;
        let p: u64 = digits
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad prime {digits:?}")))?;
        (FieldSpec::Gf(p), rest)
    } else if let Some(rest) = s.strip_prefix("QQ") {
        (FieldSpec::Q, rest)
    } else {
        return Err(Error::Parse(format!(
            "unknown field header {s:?}; expected GF(p) or QQ"
        )));
    };
    let ring = match rest.trim() {
        "" => RingSpec::Base,
        "[t]" => RingSpec::Poly,
        "(t)" => RingSpec::Frac,
        other => {
            return Err(Error::Parse(format!(
                "unknown ring suffix {other:?}; expected [t] or (t)"
            )))
        }
    };
    Ok((spec, ring))
}

pub fn parse_field_spec(src: &str) -> Result<FieldSpec> {
    let (spec, ring) = parse_field_and_suffix(src)?;
    if ring != RingSpec::Base {
        return Err(Error::Parse(format!(
            "expected a bare field header, got {src:?}"
        )));
    }
    Ok(spec)
}

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(String),
    Ident(String),
    Punct(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(s) | Tok::Ident(s) => write!(f, "{s}"),
            Tok::Punct(c) => write!(f, "{c}"),
        }
    }
}

struct Lexer {
    toks: Vec<Tok>,
    pos: usize,
}

impl Lexer {
    fn new(src: &str) -> Result<Self> {
        let mut toks = Vec::new();
        let chars: Vec<char> = src.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                toks.push(Tok::Int(chars[start..i].iter().collect()));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_')
                {
                    i += 1;
                }
                toks.push(Tok::Ident(chars[start..i].iter().collect()));
            } else if "+-*/^(),;=[]".contains(c) {
                toks.push(Tok::Punct(c));
                i += 1;
            } else {
                return Err(Error::Parse(format!("unexpected character {c:?}")));
            }
        }
        Ok(Lexer { toks, pos: 0 })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_punct(&mut self, c: char) -> Result<()> {
        match self.next() {
            Some(Tok::Punct(p)) if p == c => Ok(()),
            Some(other) => Err(Error::Parse(format!("expected {c:?}, found {other}"))),
            None => Err(Error::Parse(format!("expected {c:?}, found end of input"))),
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_ident(&mut self, word: &str) -> Result<()> {
        match self.next() {
            Some(Tok::Ident(w)) if w == word => Ok(()),
            Some(other) => Err(Error::Parse(format!("expected {word:?}, found {other}"))),
            None => Err(Error::Parse(format!(
                "expected {word:?}, found end of input"
            ))),
        }
    }

    fn expect_end(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(Error::Parse(format!("trailing input from {t}"))),
        }
    }

    fn take_uint(&mut self) -> Result<u64> {
        match self.next() {
            Some(Tok::Int(s)) => s
                .parse()
                .map_err(|_| Error::Parse(format!("integer {s} out of range"))),
            Some(other) => Err(Error::Parse(format!("expected an integer, found {other}"))),
            None => Err(Error::Parse("expected an integer, found end of input".into())),
        }
    }

    fn take_name(&mut self) -> Result<String> {
        match self.next() {
            Some(Tok::Ident(w)) => Ok(w),
            Some(other) => Err(Error::Parse(format!("expected a name, found {other}"))),
            None => Err(Error::Parse("expected a name, found end of input".into())),
        }
    }
}

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct PolyParser<'a, F: ParseField, L: ParseRing<F>> {
    ring: &'a L,
    lex: &'a mut Lexer,
    _field: std::marker::PhantomData<F>,
}

impl<'a, F: ParseField, L: ParseRing<F>> PolyParser<'a, F, L> {
    fn new(ring: &'a L, lex: &'a mut Lexer) -> Self {
        PolyParser { ring, lex, _field: std::marker::PhantomData }
    }

    fn expr(&mut self) -> Result<BiPoly<L>> {
        let mut acc = self.term()?;
        loop {
            if self.lex.eat_punct('+') {
                acc = acc.add(&self.term()?);
            } else if self.lex.eat_punct('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<BiPoly<L>> {
        let mut acc = self.unary()?;
        loop {
            if self.lex.eat_punct('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.lex.eat_punct('/') {
                let rhs = self.unary()?;
                let c = constant_of(&rhs).ok_or_else(|| {
                    Error::Parse(format!("division by a non-constant: {rhs}"))
                })?;
                acc = acc.scale(&self.ring.inv(&c)?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<BiPoly<L>> {
        if self.lex.eat_punct('-') {
            Ok(self.unary()?.neg())
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<BiPoly<L>> {
        let base = self.atom()?;
        if self.lex.eat_punct('^') {
            let e = self.lex.take_uint()?;
            let e = u32::try_from(e)
                .map_err(|_| Error::Parse(format!("exponent {e} out of range")))?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<BiPoly<L>> {
        match self.lex.next() {
            Some(Tok::Int(s)) => {
                let base = self.ring.base_field().elem_from_digits(&s)?;
                Ok(BiPoly::constant(self.ring, self.ring.embed_scalar(&base)))
            }
            Some(Tok::Ident(w)) => match w.as_str() {
                "x1" => Ok(BiPoly::var(self.ring, 1)),
                "x2" => Ok(BiPoly::var(self.ring, 2)),
                "t" => {
                    let t = self.ring.t_elem().ok_or_else(|| {
                        Error::Parse("t is not available over this ring".into())
                    })?;
                    Ok(BiPoly::constant(self.ring, t))
                }
                other => Err(Error::Parse(format!("unknown symbol {other:?}"))),
            },
            Some(Tok::Punct('(')) => {
                let inner = self.expr()?;
                self.lex.expect_punct(')')?;
                Ok(inner)
            }
            Some(other) => Err(Error::Parse(format!("unexpected token {other}"))),
            None => Err(Error::Parse("unexpected end of input".into())),
        }
    }

    /// `(f1, f2)` — a pair of images.
    fn map(&mut self) -> Result<PolyMap<L>> {
        self.lex.expect_punct('(')?;
        let f1 = self.expr()?;
        self.lex.expect_punct(',')?;
        let f2 = self.expr()?;
        self.lex.expect_punct(')')?;
        Ok(PolyMap::new(self.ring.clone(), f1, f2))
    }
}

/// The coefficient when `f` is constant (including zero).
fn constant_of<L: Ring>(f: &BiPoly<L>) -> Option<L::Elem> {
    match f.total_degree() {
        None => Some(f.ring.zero()),
        Some(0) => Some(f.coeff(0, 0)),
        Some(_) => None,
    }
}

/// Parse one polynomial over the given coefficient ring.
pub fn parse_poly<F: ParseField, L: ParseRing<F>>(ring: &L, src: &str) -> Result<BiPoly<L>> {
    let mut lex = Lexer::new(src)?;
    let poly = PolyParser::<F, L>::new(ring, &mut lex).expr()?;
    lex.expect_end()?;
    Ok(poly)
}

/// Parse one automorphism `(f1, f2)` over the given coefficient ring.
pub fn parse_map<F: ParseField, L: ParseRing<F>>(ring: &L, src: &str) -> Result<PolyMap<L>> {
    let mut lex = Lexer::new(src)?;
    let map = PolyParser::<F, L>::new(ring, &mut lex).map()?;
    lex.expect_end()?;
    Ok(map)
}

/// Parse a ground-field scalar such as `2`, `-1` or `5/3`.
pub fn parse_scalar<F>(field: &F, src: &str) -> Result<F::Elem>
where
    F: ParseField + ParseRing<F>,
{
    let mut lex = Lexer::new(src)?;
    let value = scalar_expr(field, &mut lex)?;
    lex.expect_end()?;
    Ok(value)
}

fn scalar_expr<F>(field: &F, lex: &mut Lexer) -> Result<F::Elem>
where
    F: ParseField + ParseRing<F>,
{
    let poly = PolyParser::<F, F>::new(field, lex).expr()?;
    constant_of(&poly)
        .ok_or_else(|| Error::Parse(format!("expected a scalar, got the polynomial {poly}")))
}

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

/// A named automorphism with its declared coefficient ring:
/// `phi = (x1, 2*x2 + t*x1^3) over GF(7)[t]`.
#[derive(Clone, Debug)]
pub struct MapDecl<F: ParseField> {
    pub name: String,
    pub ring_spec: RingSpec,
    /// Images over K = k(t); narrowing to k[t] or k is checked separately.
    pub map: PolyMap<FracRing<F>>,
}

impl<F: ParseField + UnitGroup> MapDecl<F> {
    pub fn print(&self, field: &F) -> String {
        format!(
            "{} = {} over {}{}",
            self.name,
            self.map,
            field.header(),
            self.ring_spec.suffix()
        )
    }
}

fn split_over(src: &str) -> Result<(&str, &str)> {
    src.rsplit_once(" over ")
        .ok_or_else(|| Error::Parse("missing `over <field>` clause".into()))
}

/// Parse a map declaration whose ground field is already known.
pub fn parse_map_decl<F: ParseField + UnitGroup>(field: &F, src: &str) -> Result<MapDecl<F>> {
    let (left, right) = split_over(src)?;
    let (spec, ring_spec) = parse_field_and_suffix(right)?;
    if spec.to_string() != field.header() {
        return Err(Error::Parse(format!(
            "declaration is over {spec} but the context field is {}",
            field.header()
        )));
    }
    let frac = FracRing { poly: PolyRing::new(field.clone()) };
    let mut lex = Lexer::new(left)?;
    let name = lex.take_name()?;
    lex.expect_punct('=')?;
    let map = PolyParser::<F, FracRing<F>>::new(&frac, &mut lex).map()?;
    lex.expect_end()?;
    check_spec(field, &map, ring_spec, &name, false)?;
    Ok(MapDecl { name, ring_spec, map })
}

/// A map declaration over either supported ground field.
#[derive(Clone, Debug)]
pub enum AnyMapDecl {
    Gf(PrimeField, MapDecl<PrimeField>),
    Qq(Rationals, MapDecl<Rationals>),
}

pub fn parse_map_decl_any(src: &str) -> Result<AnyMapDecl> {
    let (_, right) = split_over(src)?;
    let (spec, _) = parse_field_and_suffix(right)?;
    match spec {
        FieldSpec::Gf(p) => {
            let field = PrimeField::new(p)?;
            Ok(AnyMapDecl::Gf(field.clone(), parse_map_decl(&field, src)?))
        }
        FieldSpec::Q => {
            let field = Rationals;
            Ok(AnyMapDecl::Qq(field.clone(), parse_map_decl(&field, src)?))
        }
    }
}

/// Reject entries outside the declared ring: maps over k may not mention t,
/// and maps over k or k[t] may not carry denominators.  The conjugator block
/// is exempt from the denominator rule, since supplied conjugators live over
/// K = k(t) by design.
fn check_spec<F: ParseField + UnitGroup>(
    field: &F,
    map: &PolyMap<FracRing<F>>,
    ring_spec: RingSpec,
    name: &str,
    conjugator: bool,
) -> Result<()> {
    let frac = &map.ring;
    for img in &map.images {
        for (_, c) in img.terms() {
            match ring_spec {
                RingSpec::Base => {
                    if frac.try_scalar(c).is_none() {
                        return Err(Error::Parse(format!(
                            "{name} is declared over {} but has the coefficient {}",
                            field.header(),
                            frac.show(c)
                        )));
                    }
                }
                RingSpec::Poly if !conjugator => {
                    if frac.to_poly(c).is_none() {
                        return Err(Error::Parse(format!(
                            "{name} is declared over {}[t] but has the denominator-bearing \
                             coefficient {}",
                            field.header(),
                            frac.show(c)
                        )));
                    }
                }
                _ => {}
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Character groups
// ---------------------------------------------------------------------------

/// Canonical text of a character group: `GF(7); n=2; gens=[(2,2),(1,3)]`.
pub fn print_character_group<F: ParseField + UnitGroup>(cg: &CharacterGroup<F>) -> String {
    let tuples: Vec<String> = cg
        .gens
        .iter()
        .map(|tuple| {
            let entries: Vec<String> =
                tuple.iter().map(|e| format!("{}", cg.field.show(e))).collect();
            format!("({})", entries.join(","))
        })
        .collect();
    format!("{}; n={}; gens=[{}]", cg.field.header(), cg.n, tuples.join(","))
}

/// Parse a character group over a known ground field.
pub fn parse_character_group<F>(field: &F, src: &str) -> Result<CharacterGroup<F>>
where
    F: ParseField + ParseRing<F> + UnitGroup,
{
    let (header, rest) = src
        .split_once(';')
        .ok_or_else(|| Error::Parse("missing `; n=...` clause".into()))?;
    let spec = parse_field_spec(header)?;
    if spec.to_string() != field.header() {
        return Err(Error::Parse(format!(
            "character group is over {spec} but the context field is {}",
            field.header()
        )));
    }
    let mut lex = Lexer::new(rest)?;
    lex.expect_ident("n")?;
    lex.expect_punct('=')?;
    let n = lex.take_uint()? as usize;
    lex.expect_punct(';')?;
    lex.expect_ident("gens")?;
    lex.expect_punct('=')?;
    lex.expect_punct('[')?;
    let mut gens = Vec::new();
    if !lex.eat_punct(']') {
        loop {
            lex.expect_punct('(')?;
            let mut tuple = Vec::new();
            loop {
                tuple.push(scalar_expr(field, &mut lex)?);
                if !lex.eat_punct(',') {
                    break;
                }
            }
            lex.expect_punct(')')?;
            gens.push(tuple);
            if !lex.eat_punct(',') {
                break;
            }
        }
        lex.expect_punct(']')?;
    }
    lex.expect_end()?;
    CharacterGroup::new(field.clone(), n, gens)
}

/// A character group over either supported ground field.
#[derive(Clone, Debug)]
pub enum AnyCharGroup {
    Gf(CharacterGroup<PrimeField>),
    Qq(CharacterGroup<Rationals>),
}

pub fn parse_character_group_any(src: &str) -> Result<AnyCharGroup> {
    let header = src
        .split_once(';')
        .ok_or_else(|| Error::Parse("missing `; n=...` clause".into()))?
        .0;
    match parse_field_spec(header)? {
        FieldSpec::Gf(p) => Ok(AnyCharGroup::Gf(parse_character_group(
            &PrimeField::new(p)?,
            src,
        )?)),
        FieldSpec::Q => Ok(AnyCharGroup::Qq(parse_character_group(&Rationals, src)?)),
    }
}

// ---------------------------------------------------------------------------
// Instance files
// ---------------------------------------------------------------------------

/// A parsed instance: the field, the coefficient ring of the action, the
/// generator block, and an optional conjugator to descend.
#[derive(Clone, Debug)]
pub struct InstanceFile<F: ParseField + UnitGroup> {
    pub field: F,
    pub ring_spec: RingSpec,
    pub names: Vec<String>,
    /// Generator images over K = k(t); `group_over_poly` narrows to k[t].
    pub gens: Vec<PolyMap<FracRing<F>>>,
    pub orders: Vec<u64>,
    pub zetas: Vec<F::Elem>,
    pub conjugator: Option<PolyMap<FracRing<F>>>,
}

impl<F: ParseField + ParseRing<F> + UnitGroup> InstanceFile<F> {
    /// Canonical rendering; `parse_instance` inverts it exactly.
    pub fn print(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("field {}\n", self.field.header()));
        out.push_str(&format!("ring {}\n", self.ring_spec.decl()));
        for (j, name) in self.names.iter().enumerate() {
            out.push_str(&format!(
                "gen {} order {} zeta {} = {}\n",
                name,
                self.orders[j],
                self.field.show(&self.zetas[j]),
                self.gens[j]
            ));
        }
        if let Some(psi) = &self.conjugator {
            out.push_str(&format!("conjugator = {psi}\n"));
        }
        out
    }

    /// The group acting on k[t][x1,x2], with every generator checked for
    /// polynomial entries and the declared orders and roots revalidated.
    pub fn group_over_poly(&self) -> Result<FiniteAbelianSubgroup<F, PolyRing<F>>> {
        let poly = PolyRing::new(self.field.clone());
        let mut gens = Vec::with_capacity(self.gens.len());
        for (name, map) in self.names.iter().zip(&self.gens) {
            let f1 = frac_to_poly(&map.images[0], &poly);
            let f2 = frac_to_poly(&map.images[1], &poly);
            match (f1, f2) {
                (Some(f1), Some(f2)) => gens.push(PolyMap::new(poly.clone(), f1, f2)),
                _ => {
                    return Err(Error::Unsupported(format!(
                        "generator {name} has denominators; the group must act on k[t][x1,x2]"
                    )))
                }
            }
        }
        FiniteAbelianSubgroup::new(
            poly,
            self.field.clone(),
            gens,
            self.orders.clone(),
            self.zetas.clone(),
        )
    }
}

/// Parse an instance file over a known ground field.
pub fn parse_instance<F>(field: &F, src: &str) -> Result<InstanceFile<F>>
where
    F: ParseField + ParseRing<F> + UnitGroup,
{
    let frac = FracRing { poly: PolyRing::new(field.clone()) };
    let mut ring_spec: Option<RingSpec> = None;
    let mut saw_field = false;
    let mut names = Vec::new();
    let mut gens = Vec::new();
    let mut orders = Vec::new();
    let mut zetas = Vec::new();
    let mut conjugator = None;
    for (lineno, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = |e: Error| Error::Parse(format!("line {}: {e}", lineno + 1));
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match head {
            "field" => {
                let spec = parse_field_spec(rest).map_err(at)?;
                if spec.to_string() != field.header() {
                    return Err(Error::Parse(format!(
                        "line {}: file is over {spec} but the context field is {}",
                        lineno + 1,
                        field.header()
                    )));
                }
                saw_field = true;
            }
            "ring" => {
                ring_spec = Some(RingSpec::parse_decl(rest).map_err(at)?);
            }
            "gen" => {
                let mut lex = Lexer::new(rest).map_err(at)?;
                let name = lex.take_name().map_err(at)?;
                lex.expect_ident("order").map_err(at)?;
                let order = lex.take_uint().map_err(at)?;
                lex.expect_ident("zeta").map_err(at)?;
                let zeta = scalar_expr(field, &mut lex).map_err(at)?;
                lex.expect_punct('=').map_err(at)?;
                let map = PolyParser::<F, FracRing<F>>::new(&frac, &mut lex)
                    .map()
                    .map_err(at)?;
                lex.expect_end().map_err(at)?;
                if names.contains(&name) {
                    return Err(Error::Parse(format!(
                        "line {}: duplicate generator name {name}",
                        lineno + 1
                    )));
                }
                names.push(name);
                gens.push(map);
                orders.push(order);
                zetas.push(zeta);
            }
            "conjugator" => {
                let mut lex = Lexer::new(rest).map_err(at)?;
                lex.expect_punct('=').map_err(at)?;
                let map = PolyParser::<F, FracRing<F>>::new(&frac, &mut lex)
                    .map()
                    .map_err(at)?;
                lex.expect_end().map_err(at)?;
                if conjugator.is_some() {
                    return Err(Error::Parse(format!(
                        "line {}: duplicate conjugator block",
                        lineno + 1
                    )));
                }
                conjugator = Some(map);
            }
            other => {
                return Err(Error::Parse(format!(
                    "line {}: unknown directive {other:?}",
                    lineno + 1
                )))
            }
        }
    }
    if !saw_field {
        return Err(Error::Parse("missing `field` line".into()));
    }
    let ring_spec = ring_spec.ok_or_else(|| Error::Parse("missing `ring` line".into()))?;
    for (name, map) in names.iter().zip(&gens) {
        check_spec(field, map, ring_spec, name, false)?;
    }
    if let Some(psi) = &conjugator {
        check_spec(field, psi, ring_spec, "the conjugator", true)?;
    }
    Ok(InstanceFile { field: field.clone(), ring_spec, names, gens, orders, zetas, conjugator })
}

/// An instance over either supported ground field.
#[derive(Clone, Debug)]
pub enum AnyInstance {
    Gf(InstanceFile<PrimeField>),
    Qq(InstanceFile<Rationals>),
}

/// Parse an instance file, reading the ground field from its `field` line.
pub fn parse_instance_any(src: &str) -> Result<AnyInstance> {
    let field_line = src
        .lines()
        .map(str::trim)
        .find(|l| l.starts_with("field"))
        .ok_or_else(|| Error::Parse("missing `field` line".into()))?;
    let spec = parse_field_spec(field_line.trim_start_matches("field").trim())?;
    match spec {
        FieldSpec::Gf(p) => Ok(AnyInstance::Gf(parse_instance(&PrimeField::new(p)?, src)?)),
        FieldSpec::Q => Ok(AnyInstance::Qq(parse_instance(&Rationals, src)?)),
    }
}

// ---------------------------------------------------------------------------
// Tame words
// ---------------------------------------------------------------------------

/// Canonical factor list of a tame word, one factor per line:
/// `elementary <index> shift <poly>` and `affine [[a,b],[c,d]] + [e,f]`.
pub fn print_tame_word<R: Ring>(word: &TameWord<R>) -> String {
    let ring = &word.ring;
    let mut out = String::new();
    for factor in &word.factors {
        match factor {
            TameFactor::Elementary { index, shift } => {
                out.push_str(&format!("elementary {index} shift {shift}\n"));
            }
            TameFactor::Affine { mat, trans } => {
                out.push_str(&format!(
                    "affine [[{}, {}], [{}, {}]] + [{}, {}]\n",
                    ring.show(&mat[0][0]),
                    ring.show(&mat[0][1]),
                    ring.show(&mat[1][0]),
                    ring.show(&mat[1][1]),
                    ring.show(&trans[0]),
                    ring.show(&trans[1]),
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    fn kt() -> FracRing<PrimeField> {
        FracRing { poly: PolyRing::new(gf7()) }
    }

    fn roundtrip_poly<F: ParseField, L: ParseRing<F>>(ring: &L, src: &str) {
        let parsed = parse_poly::<F, L>(ring, src).unwrap();
        assert_eq!(format!("{parsed}"), src, "canonical text must reparse to itself");
    }

    #[test]
    fn canonical_polynomials_roundtrip_over_gf7() {
        let f = gf7();
        for src in ["0", "5", "x1", "3*x1", "x1^2 + 6*x2", "2*x1^3*x2^2 + x1*x2 + 4"] {
            roundtrip_poly::<PrimeField, PrimeField>(&f, src);
        }
    }

    #[test]
    fn canonical_polynomials_roundtrip_over_k_of_t() {
        let frac = kt();
        for src in [
            "t*x1^3 + x2",
            "(t^2+t)*x1^2",
            "2*t*x1",
            "((t+1)/(t^2))*x1 + 5",
            "((t)/(t^2+1))",
        ] {
            roundtrip_poly::<PrimeField, FracRing<PrimeField>>(&frac, src);
        }
    }

    #[test]
    fn canonical_polynomials_roundtrip_over_the_rationals() {
        let q = Rationals;
        for src in ["-1/2*x1", "x1^2 + -3/4*x2", "22/7"] {
            roundtrip_poly::<Rationals, Rationals>(&q, src);
        }
    }

    #[test]
    fn spaced_and_parenthesised_input_is_accepted() {
        let frac = kt();
        let a = parse_poly::<PrimeField, _>(&frac, "3*t^2*x1^4*x2").unwrap();
        let b = parse_poly::<PrimeField, _>(&frac, " 3 * t^2 * x1^4 * x2 ").unwrap();
        let c = parse_poly::<PrimeField, _>(&frac, "(3*t*t) * x1^2*x1^2 * x2").unwrap();
        assert!(a.sub(&b).is_zero());
        assert!(a.sub(&c).is_zero());
        // Subtraction and unary minus both mean the additive inverse.
        let d = parse_poly::<PrimeField, _>(&frac, "x1 - x2").unwrap();
        let e = parse_poly::<PrimeField, _>(&frac, "x1 + -x2").unwrap();
        assert!(d.sub(&e).is_zero());
        assert_eq!(format!("{d}"), "x1 + 6*x2");
    }

    #[test]
    fn division_by_scalars_and_t_normalises() {
        let frac = kt();
        let f = parse_poly::<PrimeField, _>(&frac, "((t^2+t)/(t^3))*x1").unwrap();
        assert_eq!(format!("{f}"), "((t+1)/(t^2))*x1");
        let err = parse_poly::<PrimeField, _>(&frac, "x1/x2").unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn t_is_rejected_over_a_bare_field() {
        let err = parse_poly::<PrimeField, PrimeField>(&gf7(), "t*x1").unwrap_err();
        assert!(err.to_string().contains("t is not available"));
    }

    #[test]
    fn maps_parse_and_print() {
        let frac = kt();
        let m = parse_map::<PrimeField, _>(&frac, "(x1, 2*x2 + t*x1^3)").unwrap();
        assert_eq!(format!("{m}"), "(x1, t*x1^3 + 2*x2)");
        assert!(parse_map::<PrimeField, _>(&frac, "(x1, x2) trailing").is_err());
    }

    #[test]
    fn scalars_parse_in_both_fields() {
        assert_eq!(parse_scalar(&gf7(), "6").unwrap(), 6);
        assert_eq!(parse_scalar(&gf7(), "-1").unwrap(), 6);
        assert_eq!(parse_scalar(&gf7(), "1/2").unwrap(), 4);
        let q = Rationals;
        let half = parse_scalar(&q, "-1/2").unwrap();
        assert_eq!(half, BigRational::new(BigInt::from(-1), BigInt::from(2)));
    }

    #[test]
    fn field_headers_and_ring_suffixes() {
        assert_eq!(parse_field_and_suffix("GF(7)[t]").unwrap(), (FieldSpec::Gf(7), RingSpec::Poly));
        assert_eq!(parse_field_and_suffix("QQ(t)").unwrap(), (FieldSpec::Q, RingSpec::Frac));
        assert_eq!(parse_field_and_suffix("GF(13)").unwrap(), (FieldSpec::Gf(13), RingSpec::Base));
        assert!(parse_field_and_suffix("ZZ").is_err());
        assert_eq!(FieldSpec::Gf(31).to_string(), "GF(31)");
    }

    #[test]
    fn map_declarations_roundtrip() {
        let src = "phi = (x1, t*x1^3 + 2*x2) over GF(7)[t]";
        match parse_map_decl_any(src).unwrap() {
            AnyMapDecl::Gf(field, decl) => {
                assert_eq!(decl.name, "phi");
                assert_eq!(decl.ring_spec, RingSpec::Poly);
                assert_eq!(decl.print(&field), src);
            }
            AnyMapDecl::Qq(..) => panic!("wrong field"),
        }
    }

    #[test]
    fn map_declaration_ring_mismatch_is_rejected() {
        // t under a bare GF(7) header, and a denominator under GF(7)[t].
        let err = parse_map_decl_any("phi = (x1, t*x2) over GF(7)").unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        let err = parse_map_decl_any("phi = (x1, x2/t) over GF(7)[t]").unwrap_err();
        assert!(err.to_string().contains("denominator"));
        assert!(parse_map_decl_any("phi = (x1, x2/t) over GF(7)(t)").is_ok());
    }

    #[test]
    fn character_groups_roundtrip() {
        let src = "GF(7); n=2; gens=[(2,2),(1,3)]";
        match parse_character_group_any(src).unwrap() {
            AnyCharGroup::Gf(cg) => {
                assert_eq!(cg.n, 2);
                assert_eq!(cg.gens, vec![vec![2, 2], vec![1, 3]]);
                assert_eq!(print_character_group(&cg), src);
            }
            AnyCharGroup::Qq(_) => panic!("wrong field"),
        }
    }

    #[test]
    fn instance_files_roundtrip_on_canonical_form() {
        let src = "field GF(7)\n\
                   ring k[t]\n\
                   gen phi1 order 3 zeta 2 = (x1, t*x1^3 + 2*x2)\n\
                   gen phi2 order 2 zeta 6 = (6*x1, x2)\n\
                   conjugator = (x1, (1)/(t)*x2)\n";
        let inst = match parse_instance_any(src).unwrap() {
            AnyInstance::Gf(inst) => inst,
            AnyInstance::Qq(_) => panic!("wrong field"),
        };
        assert_eq!(inst.print(), src);
        assert_eq!(inst.names, vec!["phi1", "phi2"]);
        assert_eq!(inst.orders, vec![3, 2]);
        assert_eq!(inst.zetas, vec![2, 6]);
        assert!(inst.conjugator.is_some());
        // Comments, blank lines and extra spacing parse to the same instance.
        let noisy = "# twisted shear example\n\nfield GF(7)\nring k[t]\n\
                     gen phi1 order 3 zeta 2 = ( x1 , 2*x2 + t * x1^3 )\n\
                     gen phi2 order 2 zeta -1 = (-x1, x2)\n\
                     conjugator = (x1, (1/t)*x2)\n";
        let again = match parse_instance_any(noisy).unwrap() {
            AnyInstance::Gf(inst) => inst,
            AnyInstance::Qq(_) => panic!("wrong field"),
        };
        assert_eq!(again.print(), src);
    }

    #[test]
    fn instance_group_narrows_to_the_polynomial_ring() {
        let src = "field GF(7)\nring k[t]\n\
                   gen phi1 order 3 zeta 2 = (x1, 2*x2 + t*x1^3)\n";
        let inst = match parse_instance_any(src).unwrap() {
            AnyInstance::Gf(inst) => inst,
            AnyInstance::Qq(_) => panic!("wrong field"),
        };
        let group = inst.group_over_poly().unwrap();
        assert_eq!(group.orders, vec![3]);
        assert_eq!(format!("{}", group.gens[0]), "(x1, t*x1^3 + 2*x2)");
    }

    #[test]
    fn instance_errors_carry_line_numbers() {
        let src = "field GF(7)\nring k[t]\ngen phi1 order 3 zeta 2 = (x1, y*x2)\n";
        let err = parse_instance_any(src).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("unknown symbol"), "{msg}");
        let err = parse_instance_any("ring k[t]\n").unwrap_err();
        assert!(err.to_string().contains("field"), "{err}");
    }

    #[test]
    fn rational_instances_parse() {
        let src = "field QQ\nring k[t]\n\
                   gen phi1 order 2 zeta -1 = (x1, -1*x2 + x1^3)\n";
        let inst = match parse_instance_any(src).unwrap() {
            AnyInstance::Qq(inst) => inst,
            AnyInstance::Gf(_) => panic!("wrong field"),
        };
        assert_eq!(inst.print(), "field QQ\nring k[t]\n\
                   gen phi1 order 2 zeta -1 = (x1, x1^3 + -1*x2)\n");
        inst.group_over_poly().unwrap();
    }

    #[test]
    fn tame_words_print_as_factor_lists() {
        let f = gf7();
        let word = TameWord {
            ring: f.clone(),
            factors: vec![
                TameFactor::elementary(1, BiPoly::term(&f, 3, 0, 2)).unwrap(),
                TameFactor::diagonal(&f, 2, 4),
            ],
        };
        assert_eq!(
            print_tame_word(&word),
            "elementary 1 shift 3*x2^2\naffine [[2, 0], [0, 4]] + [0, 0]\n"
        );
    }
}
