// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;

use super::lexer::{tokenize, Token, TokenKind};
use super::{Diagnostic, SourceSpan};
use crate::ir::{
    validate, CircuitGraph, Location, OpId, OpKind, OpPart, OpTag, Operator, ValueId, ValueInfo,
    ValueType,
};

/// Parsing gives up once this many diagnostics have been collected.
pub const MAX_DIAGNOSTICS: usize = 20;

#[derive(Debug, Clone)]
struct Spanned<T> {
    value: T,
    span: SourceSpan,
}

#[derive(Debug, Clone)]
enum AttrValue {
    Int(i64),
    List(Vec<i64>),
}

#[derive(Debug, Clone)]
struct Attr {
    name: Spanned<String>,
    value: Spanned<AttrValue>,
}

#[derive(Debug, Clone)]
struct Stmt {
    results: Vec<Spanned<String>>,
    op: Spanned<String>,
    operands: Vec<Spanned<String>>,
    attrs: Vec<Attr>,
    ty: Spanned<ValueType>,
}

#[derive(Debug, Default)]
struct Function {
    name: String,
    args: Vec<(Spanned<String>, ValueType)>,
    signature: Vec<Spanned<ValueType>>,
    stmts: Vec<Stmt>,
    returns: Vec<Spanned<String>>,
    return_types: Vec<Spanned<ValueType>>,
    return_span: Option<SourceSpan>,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn at(&self, kind: &TokenKind) -> bool {
        &self.peek().kind == kind
    }

    fn at_keyword(&self, word: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s == word)
    }

    fn error_here(&self, expected: &str) -> Diagnostic {
        let tok = self.peek();
        Diagnostic::new(
            tok.span,
            format!("expected {expected}, found {}", tok.kind.describe()),
        )
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Token> {
        if self.at(&kind) {
            Ok(self.advance())
        } else {
            Err(self.error_here(&kind.describe()))
        }
    }

    fn expect_keyword(&mut self, word: &str) -> PResult<Token> {
        if self.at_keyword(word) {
            Ok(self.advance())
        } else {
            Err(self.error_here(&format!("'{word}'")))
        }
    }

    fn value(&mut self) -> PResult<Spanned<String>> {
        match &self.peek().kind {
            TokenKind::Value(name) => {
                let value = name.clone();
                let span = self.advance().span;
                Ok(Spanned { value, span })
            }
            _ => Err(self.error_here("a value name")),
        }
    }

    fn value_list(&mut self) -> PResult<Vec<Spanned<String>>> {
        let mut out = vec![self.value()?];
        while self.at(&TokenKind::Comma) {
            self.advance();
            out.push(self.value()?);
        }
        Ok(out)
    }

    fn ty(&mut self) -> PResult<Spanned<ValueType>> {
        match &self.peek().kind {
            TokenKind::Type(name) => match ValueType::from_mnemonic(name) {
                Some(value) => {
                    let span = self.advance().span;
                    Ok(Spanned { value, span })
                }
                None => Err(Diagnostic::new(
                    self.peek().span,
                    format!("unknown type '{name}'"),
                )),
            },
            _ => Err(self.error_here("a type")),
        }
    }

    /// Possibly empty comma-separated type list.
    fn type_list(&mut self) -> PResult<Vec<Spanned<ValueType>>> {
        let mut out = Vec::new();
        if !matches!(self.peek().kind, TokenKind::Type(_)) {
            return Ok(out);
        }
        out.push(self.ty()?);
        while self.at(&TokenKind::Comma) {
            self.advance();
            out.push(self.ty()?);
        }
        Ok(out)
    }

    fn int(&mut self) -> PResult<i64> {
        match self.peek().kind {
            TokenKind::Int(v) => {
                self.advance();
                Ok(v)
            }
            _ => Err(self.error_here("an integer")),
        }
    }

    fn attr_value(&mut self) -> PResult<Spanned<AttrValue>> {
        let start = self.peek().span;
        if self.at(&TokenKind::LBracket) {
            self.advance();
            let mut items = vec![self.int()?];
            while self.at(&TokenKind::Comma) {
                self.advance();
                items.push(self.int()?);
            }
            let end = self.expect(TokenKind::RBracket)?.span;
            let span = SourceSpan {
                length: if end.line == start.line {
                    end.column + end.length - start.column
                } else {
                    start.length
                },
                ..start
            };
            Ok(Spanned {
                value: AttrValue::List(items),
                span,
            })
        } else {
            let v = self.int()?;
            Ok(Spanned {
                value: AttrValue::Int(v),
                span: start,
            })
        }
    }

    fn attrs(&mut self) -> PResult<Vec<Attr>> {
        self.expect(TokenKind::LBrace)?;
        let mut out = Vec::new();
        loop {
            let name = match &self.peek().kind {
                TokenKind::Ident(s) if !s.contains('.') => {
                    let value = s.clone();
                    Spanned {
                        value,
                        span: self.advance().span,
                    }
                }
                _ => return Err(self.error_here("an attribute name")),
            };
            self.expect(TokenKind::Equals)?;
            let value = self.attr_value()?;
            out.push(Attr { name, value });
            if self.at(&TokenKind::Comma) {
                self.advance();
            } else {
                break;
            }
        }
        self.expect(TokenKind::RBrace)?;
        Ok(out)
    }

    fn header(&mut self, f: &mut Function) -> PResult<()> {
        self.expect_keyword("func")?;
        self.expect(TokenKind::At)?;
        match &self.peek().kind {
            TokenKind::Ident(s) if !s.contains('.') => {
                f.name = s.clone();
                self.advance();
            }
            _ => return Err(self.error_here("a function name")),
        }
        self.expect(TokenKind::LParen)?;
        if !self.at(&TokenKind::RParen) {
            loop {
                let name = self.value()?;
                self.expect(TokenKind::Colon)?;
                let ty = self.ty()?;
                f.args.push((name, ty.value));
                if self.at(&TokenKind::Comma) {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen)?;
        self.expect(TokenKind::Arrow)?;
        f.signature = self.type_list()?;
        self.expect(TokenKind::LBrace)?;
        Ok(())
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let results = self.value_list()?;
        self.expect(TokenKind::Equals)?;
        let op = match &self.peek().kind {
            TokenKind::Ident(s) => {
                let value = s.clone();
                Spanned {
                    value,
                    span: self.advance().span,
                }
            }
            _ => return Err(self.error_here("an operation name")),
        };
        let operands = if matches!(self.peek().kind, TokenKind::Value(_)) {
            self.value_list()?
        } else {
            Vec::new()
        };
        let attrs = if self.at(&TokenKind::LBrace) {
            self.attrs()?
        } else {
            Vec::new()
        };
        self.expect(TokenKind::Colon)?;
        let ty = self.ty()?;
        Ok(Stmt {
            results,
            op,
            operands,
            attrs,
            ty,
        })
    }

    fn ret(&mut self, f: &mut Function) -> PResult<()> {
        f.return_span = Some(self.expect_keyword("return")?.span);
        if matches!(self.peek().kind, TokenKind::Value(_)) {
            f.returns = self.value_list()?;
        }
        self.expect(TokenKind::Colon)?;
        f.return_types = self.type_list()?;
        Ok(())
    }

    /// Skips to the next token that can start a statement on a fresh line.
    fn synchronize(&mut self, stmt_start: usize) {
        if self.pos <= stmt_start {
            self.advance();
        }
        loop {
            let tok = self.peek();
            match &tok.kind {
                TokenKind::Eof | TokenKind::RBrace => return,
                TokenKind::Value(_) | TokenKind::Ident(_) => {
                    let fresh_line =
                        self.pos > 0 && tok.span.line > self.tokens[self.pos - 1].span.line;
                    let starts = matches!(&tok.kind, TokenKind::Value(_))
                        || matches!(&tok.kind, TokenKind::Ident(s) if s == "return");
                    if fresh_line && starts {
                        return;
                    }
                }
                _ => {}
            }
            self.advance();
        }
    }

    fn full(&mut self) -> Function {
        let mut f = Function::default();
        if let Err(d) = self.header(&mut f) {
            self.diags.push(d);
            return f;
        }
        while !self.at_keyword("return")
            && !self.at(&TokenKind::RBrace)
            && !self.at(&TokenKind::Eof)
        {
            if self.diags.len() >= MAX_DIAGNOSTICS {
                return f;
            }
            let start = self.pos;
            match self.stmt() {
                Ok(s) => f.stmts.push(s),
                Err(d) => {
                    self.diags.push(d);
                    self.synchronize(start);
                }
            }
        }
        let tail = self
            .ret(&mut f)
            .and_then(|_| self.expect(TokenKind::RBrace).map(|_| ()))
            .and_then(|_| self.expect(TokenKind::Eof).map(|_| ()));
        if let Err(d) = tail {
            self.diags.push(d);
        }
        f
    }
}

fn unsigned(attr: &Attr, what: &str, diags: &mut Vec<Diagnostic>) -> Option<u64> {
    match attr.value.value {
        AttrValue::Int(v) if v >= 0 => Some(v as u64),
        AttrValue::Int(_) => {
            diags.push(Diagnostic::new(
                attr.value.span,
                format!("{what} must be non-negative"),
            ));
            None
        }
        AttrValue::List(_) => {
            diags.push(Diagnostic::new(
                attr.value.span,
                format!("attribute '{}' expects an integer", attr.name.value),
            ));
            None
        }
    }
}

fn list(attr: &Attr, diags: &mut Vec<Diagnostic>) -> Option<Vec<i64>> {
    match &attr.value.value {
        AttrValue::List(items) => Some(items.clone()),
        AttrValue::Int(_) => {
            diags.push(Diagnostic::new(
                attr.value.span,
                format!("attribute '{}' expects an integer list", attr.name.value),
            ));
            None
        }
    }
}

/// Builds the operator kind and section from a statement's name and
/// attributes, reporting unknown, duplicate, missing and ill-shaped attributes.
fn lower_stmt(stmt: &Stmt, diags: &mut Vec<Diagnostic>) -> Option<(OpKind, Option<u32>)> {
    let Some(tag) = OpTag::from_op_name(&stmt.op.value) else {
        diags.push(Diagnostic::new(
            stmt.op.span,
            format!("unknown operation '{}'", stmt.op.value),
        ));
        return None;
    };
    let required: &[&str] = match tag {
        OpTag::Lut2 | OpTag::Lut3 => &["lut"],
        OpTag::LutLinComb => &["coeffs", "lut"],
        OpTag::MultiLutLinComb => &["coeffs", "luts"],
        OpTag::Rotate => &["offset"],
        OpTag::Extract => &["index"],
        _ => &[],
    };
    let before = diags.len();
    let mut by_name: HashMap<&str, &Attr> = HashMap::new();
    for attr in &stmt.attrs {
        let name = attr.name.value.as_str();
        if name != "section" && !required.contains(&name) {
            diags.push(Diagnostic::new(
                attr.name.span,
                format!("unknown attribute '{name}' for {}", stmt.op.value),
            ));
        } else if by_name.insert(name, attr).is_some() {
            diags.push(Diagnostic::new(
                attr.name.span,
                format!("duplicate attribute '{name}'"),
            ));
        }
    }
    for name in required {
        if !by_name.contains_key(name) {
            diags.push(Diagnostic::new(
                stmt.op.span,
                format!("missing required attribute '{name}' for {}", stmt.op.value),
            ));
        }
    }
    if diags.len() > before {
        return None;
    }

    let section = match by_name.get("section") {
        Some(attr) => {
            let v = unsigned(attr, "section", diags)?;
            match u32::try_from(v) {
                Ok(s) => Some(s),
                Err(_) => {
                    diags.push(Diagnostic::new(attr.value.span, "section index too large"));
                    return None;
                }
            }
        }
        None => None,
    };
    let mask = |name: &str, diags: &mut Vec<Diagnostic>| {
        let attr = by_name[name];
        match attr.value.value {
            AttrValue::Int(v) if v < 0 => {
                diags.push(Diagnostic::new(
                    attr.value.span,
                    format!("LUT mask out of range: {v} is negative"),
                ));
                None
            }
            _ => unsigned(attr, "LUT mask", diags),
        }
    };
    let kind = match tag {
        OpTag::And => OpKind::And,
        OpTag::Nand => OpKind::Nand,
        OpTag::Nor => OpKind::Nor,
        OpTag::Or => OpKind::Or,
        OpTag::Xor => OpKind::Xor,
        OpTag::XNor => OpKind::XNor,
        OpTag::Not => OpKind::Not,
        OpTag::Packed => OpKind::Packed,
        OpTag::Lut2 => OpKind::Lut2 {
            lut: mask("lut", diags)?,
        },
        OpTag::Lut3 => OpKind::Lut3 {
            lut: mask("lut", diags)?,
        },
        OpTag::LutLinComb => {
            let coeffs = list(by_name["coeffs"], diags);
            let lut = mask("lut", diags);
            OpKind::LutLinComb {
                coeffs: coeffs?,
                lut: lut?,
            }
        }
        OpTag::MultiLutLinComb => {
            let coeffs = list(by_name["coeffs"], diags)?;
            let attr = by_name["luts"];
            let raw = list(attr, diags)?;
            if let Some(neg) = raw.iter().find(|v| **v < 0) {
                diags.push(Diagnostic::new(
                    attr.value.span,
                    format!("LUT mask out of range: {neg} is negative"),
                ));
                return None;
            }
            OpKind::MultiLutLinComb {
                coeffs,
                luts: raw.into_iter().map(|v| v as u64).collect(),
            }
        }
        OpTag::Add => OpKind::Add,
        OpTag::AddPlain => OpKind::AddPlain,
        OpTag::Sub => OpKind::Sub,
        OpTag::SubPlain => OpKind::SubPlain,
        OpTag::Mul => OpKind::Mul,
        OpTag::MulPlain => OpKind::MulPlain,
        OpTag::Rotate => {
            let attr = by_name["offset"];
            match attr.value.value {
                AttrValue::Int(offset) => OpKind::Rotate { offset },
                AttrValue::List(_) => {
                    diags.push(Diagnostic::new(
                        attr.value.span,
                        "attribute 'offset' expects an integer",
                    ));
                    return None;
                }
            }
        }
        OpTag::Extract => OpKind::Extract {
            index: unsigned(by_name["index"], "extract index", diags)?,
        },
        OpTag::Negate => OpKind::Negate,
        OpTag::Relinearize => OpKind::Relinearize,
        OpTag::Rescale => OpKind::Rescale,
    };
    Some((kind, section))
}

/// Parses one `.scifr` function. On success the graph has passed
/// [`validate`]; otherwise every diagnostic (at most [`MAX_DIAGNOSTICS`]) is
/// returned with the span of the offending token.
pub fn parse(text: &str) -> Result<CircuitGraph, Vec<Diagnostic>> {
    let (tokens, lex_diags) = tokenize(text);
    let mut parser = Parser {
        tokens,
        pos: 0,
        diags: lex_diags,
    };
    let f = parser.full();
    let mut diags = parser.diags;
    if !diags.is_empty() {
        diags.truncate(MAX_DIAGNOSTICS);
        return Err(diags);
    }

    let mut kinds = Vec::with_capacity(f.stmts.len());
    for stmt in &f.stmts {
        kinds.push(lower_stmt(stmt, &mut diags));
    }
    if f.signature.len() != f.return_types.len()
        || f.signature
            .iter()
            .zip(&f.return_types)
            .any(|(a, b)| a.value != b.value)
    {
        let span = f
            .return_types
            .first()
            .map(|t| t.span)
            .or(f.return_span)
            .expect("return statement was parsed");
        diags.push(Diagnostic::new(
            span,
            "return types do not match the function signature",
        ));
    }
    if f.returns.len() != f.return_types.len() {
        diags.push(Diagnostic::new(
            f.return_span.expect("return statement was parsed"),
            format!(
                "return lists {} value(s) but {} type(s)",
                f.returns.len(),
                f.return_types.len()
            ),
        ));
    }
    if !diags.is_empty() {
        diags.truncate(MAX_DIAGNOSTICS);
        return Err(diags);
    }

    let mut values: Vec<ValueInfo> = Vec::new();
    let mut ids: HashMap<String, ValueId> = HashMap::new();
    let mut intern = |name: &str, ty: ValueType, values: &mut Vec<ValueInfo>| {
        *ids.entry(name.to_string()).or_insert_with(|| {
            values.push(ValueInfo {
                name: name.to_string(),
                ty,
            });
            ValueId(values.len() as u32 - 1)
        })
    };
    let arguments: Vec<ValueId> = f
        .args
        .iter()
        .map(|(name, ty)| intern(&name.value, *ty, &mut values))
        .collect();
    let results: Vec<Vec<ValueId>> = f
        .stmts
        .iter()
        .map(|s| {
            s.results
                .iter()
                .map(|r| intern(&r.value, s.ty.value, &mut values))
                .collect()
        })
        .collect();
    // Undefined names still get an id so validation can report them.
    let mut resolve =
        |name: &Spanned<String>| intern(&name.value, ValueType::LweCiphertext, &mut values);
    let operators: Vec<Operator> = f
        .stmts
        .iter()
        .zip(kinds)
        .zip(results)
        .enumerate()
        .map(|(i, ((stmt, kind), results))| {
            let (kind, section) = kind.expect("statement errors were reported");
            Operator {
                id: OpId(i as u32),
                kind,
                operands: stmt.operands.iter().map(&mut resolve).collect(),
                results,
                section,
            }
        })
        .collect();
    let returns: Vec<ValueId> = f.returns.iter().map(&mut resolve).collect();
    let graph = CircuitGraph {
        name: f.name.clone(),
        values,
        arguments,
        operators,
        returns,
    };

    for v in validate(&graph) {
        let span = match v.location {
            Location::Argument(i) => f.args[i].0.span,
            Location::Return(i) => f.returns[i].span,
            Location::Operator { position, part } => {
                let stmt = &f.stmts[position];
                match part {
                    OpPart::Name => stmt.op.span,
                    OpPart::Operand(i) => stmt.operands.get(i).map_or(stmt.op.span, |o| o.span),
                    OpPart::Result(i) => stmt.results.get(i).map_or(stmt.op.span, |r| r.span),
                    OpPart::Attr(name) => stmt
                        .attrs
                        .iter()
                        .find(|a| a.name.value == name)
                        .map_or(stmt.op.span, |a| a.value.span),
                }
            }
        };
        diags.push(Diagnostic::new(span, v.to_string()));
    }
    for (i, (&v, declared)) in graph.returns.iter().zip(&f.return_types).enumerate() {
        let defined = graph.arguments.contains(&v)
            || graph.operators.iter().any(|op| op.results.contains(&v));
        let actual = graph.value_type(v).expect("interned");
        if defined && actual != declared.value {
            diags.push(Diagnostic::new(
                f.returns[i].span,
                format!(
                    "type mismatch: returned value {} is {actual}, declared {}",
                    graph.value_name(v),
                    declared.value
                ),
            ));
        }
    }
    if diags.is_empty() {
        Ok(graph)
    } else {
        diags.truncate(MAX_DIAGNOSTICS);
        Err(diags)
    }
}
