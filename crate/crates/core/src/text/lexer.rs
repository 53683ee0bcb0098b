// SPDX-License-Identifier: Apache-2.0

use super::{Diagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    /// Identifier, possibly dotted (`scifr_bool.and`).
    Ident(String),
    /// `%name`, stored without the sigil.
    Value(String),
    /// `!lwe`, stored with the sigil.
    Type(String),
    Int(i64),
    At,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Equals,
    Arrow,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("'{s}'"),
            TokenKind::Value(s) => format!("'%{s}'"),
            TokenKind::Type(s) => format!("'{s}'"),
            TokenKind::Int(i) => format!("'{i}'"),
            TokenKind::At => "'@'".into(),
            TokenKind::LParen => "'('".into(),
            TokenKind::RParen => "')'".into(),
            TokenKind::LBrace => "'{'".into(),
            TokenKind::RBrace => "'}'".into(),
            TokenKind::LBracket => "'['".into(),
            TokenKind::RBracket => "']'".into(),
            TokenKind::Comma => "','".into(),
            TokenKind::Colon => "':'".into(),
            TokenKind::Equals => "'='".into(),
            TokenKind::Arrow => "'->'".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }
}

/// Splits `text` into tokens. Lexical errors are reported and the offending
/// characters skipped, so the token stream is always usable.
pub fn tokenize(text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    let mut diags = Vec::new();

    while let Some(c) = cur.peek() {
        let (line, column) = (cur.line, cur.column);
        let span = |len: usize| SourceSpan {
            line,
            column,
            length: len.max(1),
        };
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' && cur.peek2() == Some('/') {
            cur.take_while(|c| c != '\n');
            continue;
        }
        let single = match c {
            '@' => Some(TokenKind::At),
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            '{' => Some(TokenKind::LBrace),
            '}' => Some(TokenKind::RBrace),
            '[' => Some(TokenKind::LBracket),
            ']' => Some(TokenKind::RBracket),
            ',' => Some(TokenKind::Comma),
            ':' => Some(TokenKind::Colon),
            '=' => Some(TokenKind::Equals),
            _ => None,
        };
        if let Some(kind) = single {
            cur.bump();
            tokens.push(Token {
                kind,
                span: span(1),
            });
            continue;
        }
        if c == '-' && cur.peek2() == Some('>') {
            cur.bump();
            cur.bump();
            tokens.push(Token {
                kind: TokenKind::Arrow,
                span: span(2),
            });
            continue;
        }
        if c == '-' || c.is_ascii_digit() {
            let mut digits = String::new();
            if c == '-' {
                cur.bump();
                digits.push('-');
            }
            digits.push_str(&cur.take_while(|c| c.is_ascii_alphanumeric() || c == '_'));
            let len = digits.chars().count();
            match parse_int(&digits) {
                Some(v) => tokens.push(Token {
                    kind: TokenKind::Int(v),
                    span: span(len),
                }),
                None => diags.push(Diagnostic::new(
                    span(len),
                    format!("invalid integer literal '{digits}'"),
                )),
            }
            continue;
        }
        if c == '%' {
            cur.bump();
            let name = cur.take_while(is_ident_continue);
            let len = name.chars().count() + 1;
            if name.is_empty() {
                diags.push(Diagnostic::new(span(1), "expected value name after '%'"));
            } else {
                tokens.push(Token {
                    kind: TokenKind::Value(name),
                    span: span(len),
                });
            }
            continue;
        }
        if c == '!' {
            cur.bump();
            let name = cur.take_while(is_ident_continue);
            let len = name.chars().count() + 1;
            tokens.push(Token {
                kind: TokenKind::Type(format!("!{name}")),
                span: span(len),
            });
            continue;
        }
        if is_ident_start(c) {
            let mut name = cur.take_while(is_ident_continue);
            while cur.peek() == Some('.') && cur.peek2().is_some_and(is_ident_start) {
                cur.bump();
                name.push('.');
                name.push_str(&cur.take_while(is_ident_continue));
            }
            let len = name.chars().count();
            tokens.push(Token {
                kind: TokenKind::Ident(name),
                span: span(len),
            });
            continue;
        }
        cur.bump();
        diags.push(Diagnostic::new(
            span(1),
            format!("unexpected character '{c}'"),
        ));
    }

    tokens.push(Token {
        kind: TokenKind::Eof,
        span: SourceSpan {
            line: cur.line,
            column: cur.column,
            length: 1,
        },
    });
    (tokens, diags)
}

fn parse_int(s: &str) -> Option<i64> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (radix, digits) = if let Some(hex) = body.strip_prefix("0x") {
        (16, hex)
    } else if let Some(bin) = body.strip_prefix("0b") {
        (2, bin)
    } else {
        (10, body)
    };
    let digits = digits.replace('_', "");
    if digits.is_empty() {
        return None;
    }
    let magnitude = i128::from_str_radix(&digits, radix).ok()?;
    i64::try_from(if neg { -magnitude } else { magnitude }).ok()
}
