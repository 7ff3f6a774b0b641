use std::fmt;
use std::sync::Arc;

use crate::ir::Loc;

use super::ParseError;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Real(f64),
    Keyword(&'static str),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Int(v) => write!(f, "integer `{v}`"),
            Tok::Real(v) => write!(f, "real `{v}`"),
            Tok::Keyword(k) => write!(f, "`{k}`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

pub const KEYWORDS: &[&str] = &[
    "abstract", "and", "bool", "card", "class", "constraint", "else", "enum", "extends", "false",
    "forall", "if", "implies", "in", "int", "intersect", "main", "model", "not", "or", "real",
    "record", "set", "true",
];

// Longest first so that `..` wins over `.` and `:=` over `:`.
const PUNCTS: &[&str] = &[
    ":=", "..", "!=", "<=", ">=", "{", "}", "(", ")", "[", "]", ";", ",", ".", "+", "-", "*",
    "/", "=", "<", ">",
];

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub loc: Loc,
}

pub fn tokenize(file: &Arc<str>, text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let (mut pos, mut line, mut col) = (0usize, 1u32, 1u32);
    let loc = |line, col| Loc { file: file.clone(), line, col };
    while pos < bytes.len() {
        let c = bytes[pos];
        if c == b'\n' {
            pos += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            pos += 1;
            col += 1;
            continue;
        }
        if text[pos..].starts_with("//") {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        let here = loc(line, col);
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                pos += 1;
            }
            let word = &text[start..pos];
            match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Keyword(k),
                None => Tok::Ident(word.to_string()),
            }
        } else if c.is_ascii_digit() {
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            // `1..n` is a range, not a real.
            let is_real = pos + 1 < bytes.len() && bytes[pos] == b'.' && bytes[pos + 1].is_ascii_digit();
            if is_real {
                pos += 1;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                Tok::Real(text[start..pos].parse().map_err(|_| ParseError::lexical(here.clone(), "malformed real"))?)
            } else {
                Tok::Int(
                    text[start..pos]
                        .parse()
                        .map_err(|_| ParseError::lexical(here.clone(), "integer literal out of range"))?,
                )
            }
        } else if let Some(p) = PUNCTS.iter().find(|p| text[pos..].starts_with(**p)) {
            pos += p.len();
            Tok::Punct(p)
        } else {
            let ch = text[pos..].chars().next().unwrap_or('?');
            return Err(ParseError::lexical(here, &format!("unexpected character `{ch}`")));
        };
        col += (pos - start) as u32;
        out.push(Token { tok, loc: here });
    }
    out.push(Token { tok: Tok::Eof, loc: loc(line, col) });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(&Arc::from("t"), src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn range_is_not_a_real() {
        assert_eq!(
            toks("1..w 2.5"),
            vec![
                Tok::Int(1),
                Tok::Punct(".."),
                Tok::Ident("w".into()),
                Tok::Real(2.5),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_are_skipped_and_columns_tracked() {
        let t = tokenize(&Arc::from("t"), "// c\n  int s := 3; // size").unwrap();
        assert_eq!(t[0].tok, Tok::Keyword("int"));
        assert_eq!((t[0].loc.line, t[0].loc.col), (2, 3));
        assert_eq!((t[3].loc.line, t[3].loc.col), (2, 12));
        assert_eq!(t.len(), 6);
    }

    #[test]
    fn rejects_stray_characters() {
        assert!(tokenize(&Arc::from("t"), "int s := 3 $").is_err());
    }
}
