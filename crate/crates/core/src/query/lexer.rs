use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::FieldName;
use super::QueryError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) enum Prefix {
    Field(FieldName),
    Theme,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) enum TokenKind {
    LParen,
    RParen,
    And,
    Or,
    Word(String),
    Quoted(String),
    Constraint(Prefix, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) struct Token {
    pub kind: TokenKind,
    /// Byte offset of the token's first character.
    pub pos: usize,
}

pub(super) fn syntax(position: usize, expected: &str) -> QueryError {
    QueryError::Syntax {
        position,
        expected: expected.to_string(),
    }
}

fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && c != '(' && c != ')' && c != '"'
}

/// Reads a quoted string starting at the opening quote at `start`.
/// Returns the unescaped content and the offset after the closing quote.
fn read_quoted(input: &str, start: usize) -> Result<(String, usize), QueryError> {
    let mut out = String::new();
    let mut chars = input[start + 1..].char_indices();
    while let Some((i, c)) = chars.next() {
        match c {
            '"' => return Ok((out, start + 1 + i + 1)),
            '\\' => match chars.next() {
                Some((_, e @ ('"' | '\\'))) => out.push(e),
                Some((j, _)) => return Err(syntax(start + 1 + j, "`\"` or `\\` after backslash")),
                None => break,
            },
            c => out.push(c),
        }
    }
    Err(syntax(input.len(), "closing quote"))
}

pub(super) fn lex(input: &str) -> Result<Vec<Token>, QueryError> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < input.len() {
        let c = input[pos..].chars().next().expect("in bounds");
        if c.is_whitespace() {
            pos += c.len_utf8();
            continue;
        }
        let start = pos;
        let kind = match c {
            '(' => {
                pos += 1;
                TokenKind::LParen
            }
            ')' => {
                pos += 1;
                TokenKind::RParen
            }
            '"' => {
                let (text, end) = read_quoted(input, pos)?;
                pos = end;
                TokenKind::Quoted(text)
            }
            _ => {
                let end = input[pos..]
                    .char_indices()
                    .find(|&(_, c)| !is_word_char(c))
                    .map_or(input.len(), |(i, _)| pos + i);
                let word = &input[pos..end];
                pos = end;
                match word {
                    "AND" => TokenKind::And,
                    "OR" => TokenKind::Or,
                    _ => match constraint_prefix(word) {
                        Some((prefix, rest)) => {
                            let value = if !rest.is_empty() {
                                rest.to_string()
                            } else if input[pos..].starts_with('"') {
                                let (text, end) = read_quoted(input, pos)?;
                                pos = end;
                                text
                            } else {
                                return Err(syntax(pos, "value after `:`"));
                            };
                            if value.trim().is_empty() {
                                return Err(syntax(start, "non-empty value"));
                            }
                            TokenKind::Constraint(prefix, value)
                        }
                        None => TokenKind::Word(word.to_string()),
                    },
                }
            }
        };
        tokens.push(Token { kind, pos: start });
    }
    Ok(tokens)
}

/// Splits `name:rest` when `name` is a known field or `theme`.
fn constraint_prefix(word: &str) -> Option<(Prefix, &str)> {
    let (name, rest) = word.split_once(':')?;
    if name.eq_ignore_ascii_case("theme") {
        return Some((Prefix::Theme, rest));
    }
    name.parse::<FieldName>().ok().map(|f| (Prefix::Field(f), rest))
}
