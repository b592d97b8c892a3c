use alloc::string::String;
use alloc::vec::Vec;

use super::ast::QueryAst;
use super::lexer::{lex, syntax, Prefix, Token, TokenKind};
use super::QueryError;
use crate::search::tokenize;

/// Parses a query into its canonical AST.
pub fn parse_query(input: &str) -> Result<QueryAst, QueryError> {
    if input.trim().is_empty() {
        return Err(QueryError::EmptyQuery);
    }
    let tokens = lex(input)?;
    let mut parser = Parser {
        tokens,
        next: 0,
        end: input.len(),
    };
    let ast = parser.or()?;
    if let Some(tok) = parser.peek() {
        return Err(syntax(tok.pos, "end of query"));
    }
    Ok(ast)
}

struct Parser {
    tokens: Vec<Token>,
    next: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.next)
    }

    fn pos(&self) -> usize {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.next).cloned();
        self.next += 1;
        tok
    }

    fn or(&mut self) -> Result<QueryAst, QueryError> {
        let mut children = alloc::vec![self.and()?];
        while matches!(self.peek(), Some(Token { kind: TokenKind::Or, .. })) {
            self.bump();
            children.push(self.and()?);
        }
        Ok(QueryAst::or(children))
    }

    fn and(&mut self) -> Result<QueryAst, QueryError> {
        let mut children = alloc::vec![self.atom()?];
        loop {
            match self.peek().map(|t| &t.kind) {
                Some(TokenKind::And) => {
                    self.bump();
                    children.push(self.atom()?);
                }
                Some(
                    TokenKind::LParen
                    | TokenKind::Word(_)
                    | TokenKind::Quoted(_)
                    | TokenKind::Constraint(..),
                ) => children.push(self.atom()?),
                _ => break,
            }
        }
        Ok(QueryAst::and(children))
    }

    fn atom(&mut self) -> Result<QueryAst, QueryError> {
        let pos = self.pos();
        let Some(tok) = self.bump() else {
            return Err(syntax(pos, "atom"));
        };
        match tok.kind {
            TokenKind::LParen => {
                let inner = self.or()?;
                match self.bump() {
                    Some(Token { kind: TokenKind::RParen, .. }) => Ok(inner),
                    Some(other) => Err(syntax(other.pos, "`)`")),
                    None => Err(syntax(self.end, "`)`")),
                }
            }
            TokenKind::Word(text) => text_atom(&text, false, tok.pos),
            TokenKind::Quoted(text) => text_atom(&text, true, tok.pos),
            TokenKind::Constraint(Prefix::Field(name), value) => Ok(QueryAst::Field { name, value }),
            TokenKind::Constraint(Prefix::Theme, value) => Ok(QueryAst::ThemeRef(value)),
            TokenKind::RParen | TokenKind::And | TokenKind::Or => Err(syntax(tok.pos, "atom")),
        }
    }
}

/// One token becomes a term, several a phrase.
fn text_atom(text: &str, quoted: bool, pos: usize) -> Result<QueryAst, QueryError> {
    let mut tokens: Vec<String> = tokenize(text);
    match tokens.len() {
        0 if quoted => Err(syntax(pos, "a phrase with searchable characters")),
        0 => Err(syntax(pos, "a word with searchable characters")),
        1 => Ok(QueryAst::Term(tokens.pop().expect("one token"))),
        _ => Ok(QueryAst::Phrase(tokens)),
    }
}
