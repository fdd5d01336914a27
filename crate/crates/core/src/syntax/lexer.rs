use std::str::FromStr;

use rust_decimal::Decimal;

use super::{is_ident_char, is_ident_start, ParseError, ParseErrorKind, SourceLocation};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    /// `Name:` with the colon stripped.
    Keyword(String),
    Ident(String),
    Quoted(String),
    Number(Decimal),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    At,
    Ge,
    Gt,
    Le,
    Lt,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub loc: SourceLocation,
    /// Source text of the token, for error messages.
    pub text: String,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    while i < chars.len() {
        let c = chars[i];
        let loc = SourceLocation::new(line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }

        let start = i;
        let tok = match c {
            '(' => single(&mut i, Tok::LParen),
            ')' => single(&mut i, Tok::RParen),
            '{' => single(&mut i, Tok::LBrace),
            '}' => single(&mut i, Tok::RBrace),
            '[' => single(&mut i, Tok::LBracket),
            ']' => single(&mut i, Tok::RBracket),
            ',' => single(&mut i, Tok::Comma),
            '@' => single(&mut i, Tok::At),
            '>' | '<' => {
                i += 1;
                let eq = chars.get(i) == Some(&'=');
                if eq {
                    i += 1;
                }
                match (c, eq) {
                    ('>', true) => Tok::Ge,
                    ('>', false) => Tok::Gt,
                    ('<', true) => Tok::Le,
                    _ => Tok::Lt,
                }
            }
            '"' => {
                i += 1;
                let mut s = String::new();
                loop {
                    match chars.get(i) {
                        None | Some('\n') => {
                            return Err(ParseError::new(
                                ParseErrorKind::UnexpectedToken,
                                loc,
                                "unterminated string starting with `\"`",
                            ))
                        }
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') => {
                            let esc = chars.get(i + 1).copied();
                            match esc {
                                Some('n') => s.push('\n'),
                                Some('"') => s.push('"'),
                                Some('\\') => s.push('\\'),
                                other => {
                                    let shown: String = other.into_iter().collect();
                                    return Err(ParseError::new(
                                        ParseErrorKind::UnexpectedToken,
                                        SourceLocation::new(line, col + (i - start)),
                                        format!("unknown escape `\\{shown}`"),
                                    ));
                                }
                            }
                            i += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                Tok::Quoted(s)
            }
            c if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                i += 1;
                while i < chars.len() && (is_ident_char(chars[i]) || chars[i] == '.') {
                    i += 1;
                }
                let raw: String = chars[start..i].iter().collect();
                if !is_decimal_literal(&raw) {
                    return Err(ParseError::new(
                        ParseErrorKind::MalformedNumber,
                        loc,
                        format!("malformed number `{raw}`"),
                    ));
                }
                let value = Decimal::from_str(&raw).map_err(|_| {
                    ParseError::new(ParseErrorKind::MalformedNumber, loc, format!("malformed number `{raw}`"))
                })?;
                Tok::Number(value)
            }
            c if is_ident_start(c) => {
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if chars.get(i) == Some(&':') {
                    i += 1;
                    Tok::Keyword(word)
                } else {
                    Tok::Ident(word)
                }
            }
            other => {
                return Err(ParseError::new(
                    ParseErrorKind::UnexpectedToken,
                    loc,
                    format!("unexpected character `{other}`"),
                ))
            }
        };
        let text: String = chars[start..i].iter().collect();
        col += i - start;
        out.push(Token { tok, loc, text });
    }
    Ok(out)
}

fn single(i: &mut usize, tok: Tok) -> Tok {
    *i += 1;
    tok
}

fn is_decimal_literal(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    let mut parts = body.splitn(2, '.');
    let int = parts.next().unwrap_or("");
    let frac = parts.next();
    !int.is_empty()
        && int.chars().all(|c| c.is_ascii_digit())
        && frac.map_or(true, |f| !f.is_empty() && f.chars().all(|c| c.is_ascii_digit()))
}
