use std::collections::{HashMap, HashSet};

use rust_decimal::prelude::ToPrimitive;
use rust_decimal::Decimal;

use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, ParseErrorKind, SourceLocation, RESERVED};
use crate::model::{ABoxAssertion, ConceptExpr, Facet, KbBuilder, KnowledgeBase, NumericRange, RoleExpr, TBoxAxiom};

const FRAMES: &[&str] = &["Class", "ObjectProperty", "DataProperty", "Individual", "GeneralAxiom"];
const SECTIONS: &[&str] = &[
    "Annotations",
    "SubClassOf",
    "EquivalentTo",
    "DisjointWith",
    "SubPropertyOf",
    "InverseOf",
    "Characteristics",
    "Domain",
    "Range",
    "Types",
    "Facts",
    "SameAs",
    "DifferentFrom",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Class,
    ObjectProperty,
    DataProperty,
    Individual,
}

impl Kind {
    fn describe(self) -> &'static str {
        match self {
            Kind::Class => "a class",
            Kind::ObjectProperty => "an object property",
            Kind::DataProperty => "a data property",
            Kind::Individual => "an individual",
        }
    }
}

/// Parses a knowledge base in the native text format. The first error aborts.
pub fn parse_text(src: &str) -> Result<KnowledgeBase, ParseError> {
    let mut p = Parser::new(tokenize(src)?);
    p.document()?;
    p.finish()
}

/// Parses a single class expression, e.g. `TrafficDanger and hasCondition some Rainy`.
pub fn parse_concept(src: &str) -> Result<ConceptExpr, ParseError> {
    let mut p = Parser::new(tokenize(src)?);
    if p.toks.is_empty() {
        return Err(ParseError::new(
            ParseErrorKind::UnexpectedToken,
            SourceLocation::new(1, 1),
            "empty class expression",
        ));
    }
    let c = p.expr()?;
    if let Some(t) = p.peek_token() {
        return Err(p.unexpected(t));
    }
    Ok(c)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    kb: KbBuilder,
    kinds: HashMap<String, Kind>,
    nominals: Vec<(String, SourceLocation)>,
    individuals: HashSet<String>,
}

impl Parser {
    fn new(toks: Vec<Token>) -> Self {
        Parser {
            toks,
            pos: 0,
            kb: KnowledgeBase::builder(),
            kinds: HashMap::new(),
            nominals: Vec::new(),
            individuals: HashSet::new(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.toks.get(self.pos + offset).map(|t| &t.tok)
    }

    fn peek_token(&self) -> Option<Token> {
        self.toks.get(self.pos).cloned()
    }

    fn next(&mut self) -> Result<Token, ParseError> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => Err(self.eof()),
        }
    }

    /// Error for running out of input; reported at the last token so the
    /// location stays inside the source.
    fn eof(&self) -> ParseError {
        match self.toks.last() {
            Some(t) => ParseError::new(
                ParseErrorKind::UnexpectedToken,
                t.loc,
                format!("unexpected end of input after `{}`", t.text),
            ),
            None => ParseError::new(ParseErrorKind::UnexpectedToken, SourceLocation::new(1, 1), "unexpected end of input"),
        }
    }

    fn unexpected(&self, t: Token) -> ParseError {
        ParseError::new(ParseErrorKind::UnexpectedToken, t.loc, format!("unexpected `{}`", t.text))
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, ParseError> {
        let t = self.next()?;
        if t.tok == tok {
            Ok(t)
        } else {
            Err(self.unexpected(t))
        }
    }

    fn declare(&mut self, name: &str, kind: Kind, loc: SourceLocation) -> Result<(), ParseError> {
        match self.kinds.get(name) {
            Some(&k) if k != kind => Err(ParseError::new(
                ParseErrorKind::DuplicateDeclaration,
                loc,
                format!("`{name}` is already declared as {}", k.describe()),
            )),
            Some(_) => Ok(()),
            None => {
                self.kinds.insert(name.to_string(), kind);
                if kind == Kind::Individual {
                    self.individuals.insert(name.to_string());
                }
                Ok(())
            }
        }
    }

    fn name(&mut self) -> Result<(String, Token), ParseError> {
        let t = self.next()?;
        match &t.tok {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => Ok((s.clone(), t)),
            Tok::Quoted(s) => Ok((s.clone(), t)),
            _ => Err(self.unexpected(t)),
        }
    }

    fn at_name(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(s)) => !RESERVED.contains(&s.as_str()),
            Some(Tok::Quoted(_)) => true,
            _ => false,
        }
    }

    // ---- documents ----

    fn document(&mut self) -> Result<(), ParseError> {
        while let Some(t) = self.peek_token() {
            match &t.tok {
                Tok::Keyword(k) if FRAMES.contains(&k.as_str()) => {
                    self.pos += 1;
                    match k.as_str() {
                        "Class" => self.class_frame()?,
                        "ObjectProperty" => self.object_property_frame()?,
                        "DataProperty" => self.data_property_frame()?,
                        "Individual" => self.individual_frame()?,
                        _ => self.general_axiom()?,
                    }
                }
                Tok::Keyword(k) if SECTIONS.contains(&k.as_str()) => {
                    return Err(ParseError::new(
                        ParseErrorKind::UnexpectedToken,
                        t.loc,
                        format!("`{}` outside of a frame", t.text),
                    ))
                }
                Tok::Keyword(_) => return Err(unknown_keyword(&t)),
                _ => return Err(self.unexpected(t)),
            }
        }
        Ok(())
    }

    /// Next section keyword of the current frame, or `None` at the start of
    /// another frame or at end of input.
    fn section(&mut self, allowed: &[&str], frame: &str) -> Result<Option<String>, ParseError> {
        let Some(t) = self.peek_token() else {
            return Ok(None);
        };
        match &t.tok {
            Tok::Keyword(k) if FRAMES.contains(&k.as_str()) => Ok(None),
            Tok::Keyword(k) if allowed.contains(&k.as_str()) => {
                self.pos += 1;
                Ok(Some(k.clone()))
            }
            Tok::Keyword(k) if SECTIONS.contains(&k.as_str()) => Err(ParseError::new(
                ParseErrorKind::UnexpectedToken,
                t.loc,
                format!("`{}` is not allowed in a {frame} frame", t.text),
            )),
            Tok::Keyword(_) => Err(unknown_keyword(&t)),
            _ => Err(self.unexpected(t)),
        }
    }

    fn class_frame(&mut self) -> Result<(), ParseError> {
        let (name, t) = self.name()?;
        self.declare(&name, Kind::Class, t.loc)?;
        self.kb.declare_class(name.as_str());
        let me = ConceptExpr::atomic(name.as_str());
        let allowed = ["Annotations", "SubClassOf", "EquivalentTo", "DisjointWith"];
        while let Some(s) = self.section(&allowed, "Class")? {
            if s == "Annotations" {
                self.annotations(&name)?;
                continue;
            }
            for e in self.expr_list()? {
                let ax = match s.as_str() {
                    "SubClassOf" => TBoxAxiom::sub_class(me.clone(), e),
                    "EquivalentTo" => TBoxAxiom::EquivalentClasses(me.clone(), e),
                    _ => TBoxAxiom::DisjointClasses(me.clone(), e),
                };
                self.kb.axiom(ax);
            }
        }
        Ok(())
    }

    fn object_property_frame(&mut self) -> Result<(), ParseError> {
        let (name, t) = self.name()?;
        self.declare(&name, Kind::ObjectProperty, t.loc)?;
        self.kb.declare_role(name.as_str());
        let me = RoleExpr::named(name.as_str());
        let allowed = [
            "Annotations",
            "SubPropertyOf",
            "EquivalentTo",
            "InverseOf",
            "Characteristics",
            "Domain",
            "Range",
        ];
        while let Some(s) = self.section(&allowed, "ObjectProperty")? {
            match s.as_str() {
                "Annotations" => self.annotations(&name)?,
                "SubPropertyOf" => loop {
                    let sup = self.role()?;
                    self.kb.rbox_mut().sub_role_axioms.insert((me.clone(), sup));
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                },
                "EquivalentTo" | "InverseOf" => loop {
                    let (other, t) = self.name()?;
                    self.declare(&other, Kind::ObjectProperty, t.loc)?;
                    self.kb.declare_role(other.as_str());
                    let pair = (name.clone(), other);
                    if s == "InverseOf" {
                        self.kb.rbox_mut().inverse_pairs.insert(pair);
                    } else {
                        self.kb.rbox_mut().equivalent_roles.insert(pair);
                    }
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                },
                "Characteristics" => loop {
                    let t = self.next()?;
                    let rb = self.kb.rbox_mut();
                    match &t.tok {
                        Tok::Ident(c) if c == "Transitive" => rb.transitive_roles.insert(name.clone()),
                        Tok::Ident(c) if c == "Functional" => rb.functional_roles.insert(name.clone()),
                        Tok::Ident(c) if c == "InverseFunctional" => rb.inverse_functional_roles.insert(name.clone()),
                        Tok::Ident(c) if c == "Symmetric" => rb.symmetric_roles.insert(name.clone()),
                        Tok::Ident(_) => {
                            return Err(ParseError::new(
                                ParseErrorKind::UnknownKeyword,
                                t.loc,
                                format!("unknown characteristic `{}`", t.text),
                            ))
                        }
                        _ => return Err(self.unexpected(t)),
                    };
                    if !self.eat(&Tok::Comma) && !matches!(self.peek(), Some(Tok::Ident(_))) {
                        break;
                    }
                },
                "Domain" => {
                    for e in self.expr_list()? {
                        self.kb.axiom(TBoxAxiom::Domain {
                            role: me.clone(),
                            concept: e,
                        });
                    }
                }
                _ => {
                    for e in self.expr_list()? {
                        self.kb.axiom(TBoxAxiom::Range {
                            role: me.clone(),
                            concept: e,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn data_property_frame(&mut self) -> Result<(), ParseError> {
        let (name, t) = self.name()?;
        self.declare(&name, Kind::DataProperty, t.loc)?;
        self.kb.declare_data_property(name.as_str());
        let allowed = ["Annotations", "Characteristics", "Domain"];
        while let Some(s) = self.section(&allowed, "DataProperty")? {
            match s.as_str() {
                "Annotations" => self.annotations(&name)?,
                "Characteristics" => {
                    let t = self.next()?;
                    match &t.tok {
                        Tok::Ident(c) if c == "Functional" => {
                            self.kb.functional_data_property(name.as_str());
                        }
                        Tok::Ident(_) => {
                            return Err(ParseError::new(
                                ParseErrorKind::UnsupportedConstruct,
                                t.loc,
                                format!("data properties only support `Functional`, found `{}`", t.text),
                            ))
                        }
                        _ => return Err(self.unexpected(t)),
                    }
                }
                _ => {
                    for e in self.expr_list()? {
                        self.kb.axiom(TBoxAxiom::sub_class(
                            ConceptExpr::DataSome(name.clone(), NumericRange::unbounded()),
                            e,
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn individual_frame(&mut self) -> Result<(), ParseError> {
        let (name, t) = self.name()?;
        self.declare(&name, Kind::Individual, t.loc)?;
        self.kb.declare_individual(name.as_str());
        let allowed = ["Annotations", "Types", "Facts", "SameAs", "DifferentFrom"];
        while let Some(s) = self.section(&allowed, "Individual")? {
            match s.as_str() {
                "Annotations" => self.annotations(&name)?,
                "Types" => {
                    for e in self.expr_list()? {
                        self.kb.assertion(ABoxAssertion::ClassAssertion {
                            concept: e,
                            individual: name.clone(),
                        });
                    }
                }
                "Facts" => loop {
                    self.fact(&name)?;
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                },
                _ => loop {
                    let (other, t) = self.name()?;
                    self.declare(&other, Kind::Individual, t.loc)?;
                    self.kb.declare_individual(other.as_str());
                    if s == "SameAs" {
                        self.kb.assertion(ABoxAssertion::SameAs(name.clone(), other));
                    } else {
                        if other == name {
                            return Err(ParseError::new(
                                ParseErrorKind::UnsupportedConstruct,
                                t.loc,
                                format!("individual `{name}` cannot be different from itself"),
                            ));
                        }
                        self.kb.assertion(ABoxAssertion::DifferentFrom(name.clone(), other));
                    }
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                },
            }
        }
        Ok(())
    }

    fn fact(&mut self, subject: &str) -> Result<(), ParseError> {
        let (role, role_tok) = self.role_with_token()?;
        let t = self.next()?;
        match &t.tok {
            Tok::Number(v) => {
                if role.inverted {
                    return Err(ParseError::new(
                        ParseErrorKind::UnsupportedConstruct,
                        role_tok.loc,
                        "data property `inverse(...)` is not allowed",
                    ));
                }
                self.declare(&role.name, Kind::DataProperty, role_tok.loc)?;
                self.kb.assertion(ABoxAssertion::DataAssertion {
                    property: role.name,
                    individual: subject.to_string(),
                    value: *v,
                });
            }
            Tok::Ident(o) | Tok::Quoted(o) if !(matches!(t.tok, Tok::Ident(_)) && RESERVED.contains(&o.as_str())) => {
                let o = o.clone();
                self.declare(&role.name, Kind::ObjectProperty, role_tok.loc)?;
                self.declare(&o, Kind::Individual, t.loc)?;
                self.kb.assertion(ABoxAssertion::RoleAssertion {
                    role,
                    subject: subject.to_string(),
                    object: o,
                });
            }
            _ => return Err(self.unexpected(t)),
        }
        Ok(())
    }

    fn general_axiom(&mut self) -> Result<(), ParseError> {
        let lhs = self.expr()?;
        let t = self.next()?;
        let rhs = match &t.tok {
            Tok::Keyword(k) if ["SubClassOf", "EquivalentTo", "DisjointWith"].contains(&k.as_str()) => self.expr()?,
            Tok::Keyword(k) if !SECTIONS.contains(&k.as_str()) && !FRAMES.contains(&k.as_str()) => {
                return Err(unknown_keyword(&t))
            }
            _ => return Err(self.unexpected(t)),
        };
        let ax = match &t.tok {
            Tok::Keyword(k) if k == "SubClassOf" => TBoxAxiom::sub_class(lhs, rhs),
            Tok::Keyword(k) if k == "EquivalentTo" => TBoxAxiom::EquivalentClasses(lhs, rhs),
            _ => TBoxAxiom::DisjointClasses(lhs, rhs),
        };
        self.kb.axiom(ax);
        Ok(())
    }

    fn annotations(&mut self, entity: &str) -> Result<(), ParseError> {
        loop {
            let t = self.next()?;
            if !matches!(&t.tok, Tok::Ident(s) if s == "label") {
                return Err(if matches!(t.tok, Tok::Ident(_)) {
                    ParseError::new(
                        ParseErrorKind::UnsupportedConstruct,
                        t.loc,
                        format!("only `label` annotations are supported, found `{}`", t.text),
                    )
                } else {
                    self.unexpected(t)
                });
            }
            let t = self.next()?;
            let Tok::Quoted(text) = t.tok else {
                return Err(self.unexpected(t));
            };
            let lang = if self.eat(&Tok::At) {
                let t = self.next()?;
                match t.tok {
                    Tok::Ident(tag) => tag,
                    _ => return Err(self.unexpected(t)),
                }
            } else {
                "en".to_string()
            };
            self.kb.label(entity, lang, text);
            let more = self.eat(&Tok::Comma) || matches!(self.peek(), Some(Tok::Ident(s)) if s == "label");
            if !more {
                return Ok(());
            }
        }
    }

    // ---- expressions ----

    fn expr_list(&mut self) -> Result<Vec<ConceptExpr>, ParseError> {
        let mut out = vec![self.expr()?];
        while self.eat(&Tok::Comma) {
            out.push(self.expr()?);
        }
        Ok(out)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == w)
    }

    fn expr(&mut self) -> Result<ConceptExpr, ParseError> {
        let mut ops = vec![self.conjunction()?];
        while self.is_word("or") {
            self.pos += 1;
            ops.push(self.conjunction()?);
        }
        Ok(ConceptExpr::or(ops))
    }

    fn conjunction(&mut self) -> Result<ConceptExpr, ParseError> {
        let mut ops = vec![self.unary()?];
        while self.is_word("and") {
            self.pos += 1;
            ops.push(self.unary()?);
        }
        Ok(ConceptExpr::and(ops))
    }

    fn unary(&mut self) -> Result<ConceptExpr, ParseError> {
        if self.is_word("not") {
            self.pos += 1;
            return Ok(ConceptExpr::not(self.unary()?));
        }
        let t = self.peek_token().ok_or_else(|| self.eof())?;
        match &t.tok {
            Tok::LParen => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::LBrace => {
                self.pos += 1;
                let mut names = Vec::new();
                loop {
                    let (n, t) = self.name()?;
                    self.nominals.push((n.clone(), t.loc));
                    names.push(n);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::RBrace)?;
                Ok(ConceptExpr::OneOf(names))
            }
            Tok::Ident(s) if s == "Thing" => {
                self.pos += 1;
                Ok(ConceptExpr::Top)
            }
            Tok::Ident(s) if s == "Nothing" => {
                self.pos += 1;
                Ok(ConceptExpr::Bottom)
            }
            Tok::Ident(s) if s == "inverse" => {
                let (role, role_tok) = self.role_with_token()?;
                self.restriction(role, role_tok)
            }
            _ if self.at_name() => {
                let is_restriction = matches!(
                    self.peek_at(1),
                    Some(Tok::Ident(w)) if ["some", "only", "value", "min", "max"].contains(&w.as_str())
                );
                if is_restriction {
                    let (role, role_tok) = self.role_with_token()?;
                    self.restriction(role, role_tok)
                } else {
                    let (n, t) = self.name()?;
                    self.declare(&n, Kind::Class, t.loc)?;
                    Ok(ConceptExpr::Atomic(n))
                }
            }
            _ => Err(self.unexpected(t)),
        }
    }

    fn role(&mut self) -> Result<RoleExpr, ParseError> {
        let (r, t) = self.role_with_token()?;
        self.declare(&r.name, Kind::ObjectProperty, t.loc)?;
        Ok(r)
    }

    fn role_with_token(&mut self) -> Result<(RoleExpr, Token), ParseError> {
        if self.is_word("inverse") {
            let t = self.next()?;
            self.expect(Tok::LParen)?;
            let inner = self.role_with_token()?.0;
            self.expect(Tok::RParen)?;
            return Ok((inner.inverse(), t));
        }
        let (n, t) = self.name()?;
        Ok((RoleExpr::named(n), t))
    }

    fn restriction(&mut self, role: RoleExpr, role_tok: Token) -> Result<ConceptExpr, ParseError> {
        let op = self.next()?;
        let Tok::Ident(word) = &op.tok else {
            return Err(self.unexpected(op));
        };
        let object_role = |p: &mut Parser| p.declare(&role.name, Kind::ObjectProperty, role_tok.loc);
        let data_property = |p: &mut Parser| {
            if role.inverted {
                return Err(ParseError::new(
                    ParseErrorKind::UnsupportedConstruct,
                    role_tok.loc,
                    format!("`{}` cannot be used with a data range", role_tok.text),
                ));
            }
            p.declare(&role.name, Kind::DataProperty, role_tok.loc)
        };
        match word.as_str() {
            "some" => {
                if self.is_word("range") && self.peek_at(1) == Some(&Tok::LBracket) {
                    data_property(self)?;
                    let range = self.data_range()?;
                    return Ok(ConceptExpr::DataSome(role.name.clone(), range));
                }
                object_role(self)?;
                let filler = self.unary()?;
                Ok(ConceptExpr::Exists(role.clone(), Box::new(filler)))
            }
            "only" => {
                object_role(self)?;
                let filler = self.unary()?;
                Ok(ConceptExpr::ForAll(role.clone(), Box::new(filler)))
            }
            "value" => {
                if let Some(Tok::Number(v)) = self.peek() {
                    let v = *v;
                    self.pos += 1;
                    data_property(self)?;
                    return Ok(ConceptExpr::DataSome(role.name.clone(), NumericRange::exactly(v)));
                }
                object_role(self)?;
                let (n, t) = self.name()?;
                self.nominals.push((n.clone(), t.loc));
                Ok(ConceptExpr::HasValue(role.clone(), n))
            }
            _ => {
                object_role(self)?;
                let t = self.next()?;
                let n = match t.tok {
                    Tok::Number(v) => cardinality(v).ok_or_else(|| {
                        ParseError::new(
                            ParseErrorKind::MalformedNumber,
                            t.loc,
                            format!("cardinality must be a non-negative integer, found `{}`", t.text),
                        )
                    })?,
                    _ => return Err(self.unexpected(t)),
                };
                Ok(if word == "min" {
                    ConceptExpr::AtLeast(n, role.clone())
                } else {
                    ConceptExpr::AtMost(n, role.clone())
                })
            }
        }
    }

    fn data_range(&mut self) -> Result<NumericRange, ParseError> {
        self.pos += 1; // `range`
        self.expect(Tok::LBracket)?;
        let mut range = NumericRange::unbounded();
        if self.eat(&Tok::RBracket) {
            return Ok(range);
        }
        loop {
            let op = self.next()?;
            let t = self.next()?;
            let Tok::Number(v) = t.tok else {
                return Err(self.unexpected(t));
            };
            let (is_lower, facet) = match op.tok {
                Tok::Ge => (true, Facet::inclusive(v)),
                Tok::Gt => (true, Facet::exclusive(v)),
                Tok::Le => (false, Facet::inclusive(v)),
                Tok::Lt => (false, Facet::exclusive(v)),
                _ => return Err(self.unexpected(op)),
            };
            let slot = if is_lower { &mut range.lower } else { &mut range.upper };
            if slot.is_some() {
                return Err(ParseError::new(
                    ParseErrorKind::UnsupportedConstruct,
                    op.loc,
                    format!("second {} facet `{}`", if is_lower { "lower" } else { "upper" }, op.text),
                ));
            }
            *slot = Some(facet);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBracket)?;
        Ok(range)
    }

    fn finish(self) -> Result<KnowledgeBase, ParseError> {
        for (n, loc) in &self.nominals {
            if !self.individuals.contains(n) {
                let what = match self.kinds.get(n) {
                    Some(k) => format!("`{n}` is {}, not an individual", k.describe()),
                    None => format!("undeclared individual `{n}`"),
                };
                return Err(ParseError::new(ParseErrorKind::UndeclaredEntity, *loc, what));
            }
        }
        self.kb.build().map_err(|e| {
            ParseError::new(ParseErrorKind::UnsupportedConstruct, SourceLocation::new(1, 1), e.to_string())
        })
    }
}

fn cardinality(v: Decimal) -> Option<u32> {
    if v.fract() != Decimal::ZERO {
        return None;
    }
    v.to_u32()
}

fn unknown_keyword(t: &Token) -> ParseError {
    ParseError::new(ParseErrorKind::UnknownKeyword, t.loc, format!("unknown keyword `{}`", t.text))
}
