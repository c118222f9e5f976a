//! Tokenizer for the IVL subset.
//!
//! Comments are discarded here (line comments and nested block comments).
//! Constructs outside the subset that are recognizable at the token level
//! (bitvector literals, `<==`, `<:`, real division `/`) become dedicated
//! tokens so the parser can reject them with a precise diagnostic.

use num_bigint::BigInt;

use crate::diag::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(BigInt),
    Str(String),

    // Keywords.
    KwType,
    KwConst,
    KwUnique,
    KwVar,
    KwFunction,
    KwAxiom,
    KwProcedure,
    KwImplementation,
    KwReturns,
    KwRequires,
    KwEnsures,
    KwModifies,
    KwFree,
    KwInvariant,
    KwAssert,
    KwAssume,
    KwHavoc,
    KwCall,
    KwIf,
    KwElse,
    KwWhile,
    KwReturn,
    KwForall,
    KwExists,
    KwOld,
    KwTrue,
    KwFalse,
    KwInt,
    KwBool,
    KwDiv,
    KwMod,
    // Recognized only to produce unsupported-construct diagnostics.
    KwGoto,
    KwBreak,
    KwWhere,

    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Semi,
    Assign,     // :=
    ColonColon, // ::
    Iff,        // <==>
    Implies,    // ==>
    Explies,    // <== (unsupported)
    OrOr,
    AndAnd,
    EqEq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Subtype, // <: (unsupported)
    Plus,
    Minus,
    Star,
    Slash, // real division (unsupported)
    Not,
    BvLit, // e.g. 5bv8 (unsupported)
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Int(v) => format!("integer literal `{v}`"),
            TokenKind::Str(_) => "string literal".to_string(),
            TokenKind::Eof => "end of input".to_string(),
            other => format!("`{}`", other.lexeme()),
        }
    }

    fn lexeme(&self) -> &'static str {
        match self {
            TokenKind::KwType => "type",
            TokenKind::KwConst => "const",
            TokenKind::KwUnique => "unique",
            TokenKind::KwVar => "var",
            TokenKind::KwFunction => "function",
            TokenKind::KwAxiom => "axiom",
            TokenKind::KwProcedure => "procedure",
            TokenKind::KwImplementation => "implementation",
            TokenKind::KwReturns => "returns",
            TokenKind::KwRequires => "requires",
            TokenKind::KwEnsures => "ensures",
            TokenKind::KwModifies => "modifies",
            TokenKind::KwFree => "free",
            TokenKind::KwInvariant => "invariant",
            TokenKind::KwAssert => "assert",
            TokenKind::KwAssume => "assume",
            TokenKind::KwHavoc => "havoc",
            TokenKind::KwCall => "call",
            TokenKind::KwIf => "if",
            TokenKind::KwElse => "else",
            TokenKind::KwWhile => "while",
            TokenKind::KwReturn => "return",
            TokenKind::KwForall => "forall",
            TokenKind::KwExists => "exists",
            TokenKind::KwOld => "old",
            TokenKind::KwTrue => "true",
            TokenKind::KwFalse => "false",
            TokenKind::KwInt => "int",
            TokenKind::KwBool => "bool",
            TokenKind::KwDiv => "div",
            TokenKind::KwMod => "mod",
            TokenKind::KwGoto => "goto",
            TokenKind::KwBreak => "break",
            TokenKind::KwWhere => "where",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::LBracket => "[",
            TokenKind::RBracket => "]",
            TokenKind::LBrace => "{",
            TokenKind::RBrace => "}",
            TokenKind::Comma => ",",
            TokenKind::Colon => ":",
            TokenKind::Semi => ";",
            TokenKind::Assign => ":=",
            TokenKind::ColonColon => "::",
            TokenKind::Iff => "<==>",
            TokenKind::Implies => "==>",
            TokenKind::Explies => "<==",
            TokenKind::OrOr => "||",
            TokenKind::AndAnd => "&&",
            TokenKind::EqEq => "==",
            TokenKind::Neq => "!=",
            TokenKind::Lt => "<",
            TokenKind::Le => "<=",
            TokenKind::Gt => ">",
            TokenKind::Ge => ">=",
            TokenKind::Subtype => "<:",
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
            TokenKind::Star => "*",
            TokenKind::Slash => "/",
            TokenKind::Not => "!",
            TokenKind::BvLit => "bitvector literal",
            TokenKind::Ident(_) | TokenKind::Int(_) | TokenKind::Str(_) | TokenKind::Eof => {
                unreachable!()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: u32,
    pub column: u32,
}

fn keyword(ident: &str) -> Option<TokenKind> {
    Some(match ident {
        "type" => TokenKind::KwType,
        "const" => TokenKind::KwConst,
        "unique" => TokenKind::KwUnique,
        "var" => TokenKind::KwVar,
        "function" => TokenKind::KwFunction,
        "axiom" => TokenKind::KwAxiom,
        "procedure" => TokenKind::KwProcedure,
        "implementation" => TokenKind::KwImplementation,
        "returns" => TokenKind::KwReturns,
        "requires" => TokenKind::KwRequires,
        "ensures" => TokenKind::KwEnsures,
        "modifies" => TokenKind::KwModifies,
        "free" => TokenKind::KwFree,
        "invariant" => TokenKind::KwInvariant,
        "assert" => TokenKind::KwAssert,
        "assume" => TokenKind::KwAssume,
        "havoc" => TokenKind::KwHavoc,
        "call" => TokenKind::KwCall,
        "if" => TokenKind::KwIf,
        "else" => TokenKind::KwElse,
        "while" => TokenKind::KwWhile,
        "return" => TokenKind::KwReturn,
        "forall" => TokenKind::KwForall,
        "exists" => TokenKind::KwExists,
        "old" => TokenKind::KwOld,
        "true" => TokenKind::KwTrue,
        "false" => TokenKind::KwFalse,
        "int" => TokenKind::KwInt,
        "bool" => TokenKind::KwBool,
        "div" => TokenKind::KwDiv,
        "mod" => TokenKind::KwMod,
        "goto" => TokenKind::KwGoto,
        "break" => TokenKind::KwBreak,
        "where" => TokenKind::KwWhere,
        _ => return None,
    })
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || matches!(c, '_' | '$' | '.' | '#' | '\'' | '?' | '~' | '^' | '`')
}

fn is_ident_continue(c: char) -> bool {
    is_ident_start(c) || c.is_ascii_digit()
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    column: u32,
    origin: &'a str,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src.get(self.pos).map(|&b| b as char)
    }

    fn peek_at(&self, off: usize) -> Option<char> {
        self.src.get(self.pos + off).map(|&b| b as char)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn eat(&mut self, expected: &str) -> bool {
        if self.src[self.pos..].starts_with(expected.as_bytes()) {
            for _ in 0..expected.len() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    fn skip_trivia(&mut self, diags: &mut Vec<Diagnostic>) {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some('/') if self.peek_at(1) == Some('/') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some('/') if self.peek_at(1) == Some('*') => {
                    let (line, column) = (self.line, self.column);
                    self.bump();
                    self.bump();
                    let mut depth = 1usize;
                    loop {
                        if self.peek().is_none() {
                            diags.push(Diagnostic::error(
                                self.origin,
                                line,
                                column,
                                "unterminated block comment",
                            ));
                            break;
                        }
                        if self.eat("*/") {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        } else if self.eat("/*") {
                            depth += 1;
                        } else {
                            self.bump();
                        }
                    }
                }
                _ => break,
            }
        }
    }
}

/// Tokenizes `source`. Unknown characters and malformed literals are reported
/// as diagnostics; lexing continues so the parser can still recover at the
/// next declaration.
pub fn lex(source: &str, origin: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut lx = Lexer { src: source.as_bytes(), pos: 0, line: 1, column: 1, origin };
    let mut tokens = Vec::new();
    let mut diags = Vec::new();

    loop {
        lx.skip_trivia(&mut diags);
        let (line, column) = (lx.line, lx.column);
        let Some(c) = lx.peek() else {
            tokens.push(Token { kind: TokenKind::Eof, line, column });
            break;
        };

        let kind = if is_ident_start(c) {
            let start = lx.pos;
            while lx.peek().is_some_and(is_ident_continue) {
                lx.bump();
            }
            let text = std::str::from_utf8(&lx.src[start..lx.pos]).unwrap_or_default();
            keyword(text).unwrap_or_else(|| TokenKind::Ident(text.to_string()))
        } else if c.is_ascii_digit() {
            let start = lx.pos;
            while lx.peek().is_some_and(|c| c.is_ascii_digit()) {
                lx.bump();
            }
            // Boogie bitvector literals look like `5bv8`; outside the subset.
            if lx.peek() == Some('b') && lx.peek_at(1) == Some('v') {
                while lx.peek().is_some_and(is_ident_continue) {
                    lx.bump();
                }
                diags.push(Diagnostic::error(
                    origin,
                    line,
                    column,
                    "bitvector literals are not supported by this subset",
                ));
                TokenKind::BvLit
            } else {
                let text = std::str::from_utf8(&lx.src[start..lx.pos]).unwrap_or_default();
                TokenKind::Int(text.parse::<BigInt>().expect("digits parse as BigInt"))
            }
        } else {
            match c {
                '"' => {
                    lx.bump();
                    let start = lx.pos;
                    let mut terminated = false;
                    while let Some(c) = lx.peek() {
                        if c == '\\' {
                            lx.bump();
                            lx.bump();
                            continue;
                        }
                        if c == '"' {
                            terminated = true;
                            break;
                        }
                        if c == '\n' {
                            break;
                        }
                        lx.bump();
                    }
                    let raw = std::str::from_utf8(&lx.src[start..lx.pos]).unwrap_or_default().to_string();
                    if terminated {
                        lx.bump();
                    } else {
                        diags.push(Diagnostic::error(origin, line, column, "unterminated string literal"));
                    }
                    TokenKind::Str(raw)
                }
                '(' => {
                    lx.bump();
                    TokenKind::LParen
                }
                ')' => {
                    lx.bump();
                    TokenKind::RParen
                }
                '[' => {
                    lx.bump();
                    TokenKind::LBracket
                }
                ']' => {
                    lx.bump();
                    TokenKind::RBracket
                }
                '{' => {
                    lx.bump();
                    TokenKind::LBrace
                }
                '}' => {
                    lx.bump();
                    TokenKind::RBrace
                }
                ',' => {
                    lx.bump();
                    TokenKind::Comma
                }
                ';' => {
                    lx.bump();
                    TokenKind::Semi
                }
                ':' => {
                    if lx.eat("::") {
                        TokenKind::ColonColon
                    } else if lx.eat(":=") {
                        TokenKind::Assign
                    } else {
                        lx.bump();
                        TokenKind::Colon
                    }
                }
                '<' => {
                    if lx.eat("<==>") {
                        TokenKind::Iff
                    } else if lx.eat("<==") {
                        TokenKind::Explies
                    } else if lx.eat("<=") {
                        TokenKind::Le
                    } else if lx.eat("<:") {
                        TokenKind::Subtype
                    } else {
                        lx.bump();
                        TokenKind::Lt
                    }
                }
                '>' => {
                    if lx.eat(">=") {
                        TokenKind::Ge
                    } else {
                        lx.bump();
                        TokenKind::Gt
                    }
                }
                '=' => {
                    if lx.eat("==>") {
                        TokenKind::Implies
                    } else if lx.eat("==") {
                        TokenKind::EqEq
                    } else {
                        // A single `=` only occurs in type synonyms; reuse EqEq
                        // and let the parser treat it there.
                        lx.bump();
                        TokenKind::EqEq
                    }
                }
                '!' => {
                    if lx.eat("!=") {
                        TokenKind::Neq
                    } else {
                        lx.bump();
                        TokenKind::Not
                    }
                }
                '|' => {
                    if lx.eat("||") {
                        TokenKind::OrOr
                    } else {
                        lx.bump();
                        diags.push(Diagnostic::error(origin, line, column, "unexpected character `|`"));
                        continue;
                    }
                }
                '&' => {
                    if lx.eat("&&") {
                        TokenKind::AndAnd
                    } else {
                        lx.bump();
                        diags.push(Diagnostic::error(origin, line, column, "unexpected character `&`"));
                        continue;
                    }
                }
                '+' => {
                    lx.bump();
                    TokenKind::Plus
                }
                '-' => {
                    lx.bump();
                    TokenKind::Minus
                }
                '*' => {
                    lx.bump();
                    TokenKind::Star
                }
                '/' => {
                    lx.bump();
                    TokenKind::Slash
                }
                other => {
                    lx.bump();
                    diags.push(Diagnostic::error(
                        origin,
                        line,
                        column,
                        format!("unexpected character `{other}`"),
                    ));
                    continue;
                }
            }
        };

        tokens.push(Token { kind, line, column });
    }

    (tokens, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        let (tokens, diags) = lex(src, "test.bpl");
        assert!(diags.is_empty(), "unexpected diagnostics: {diags:?}");
        tokens.into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn lexes_operators_longest_match() {
        assert_eq!(
            kinds("<==> ==> <= < := :: == !="),
            vec![
                TokenKind::Iff,
                TokenKind::Implies,
                TokenKind::Le,
                TokenKind::Lt,
                TokenKind::Assign,
                TokenKind::ColonColon,
                TokenKind::EqEq,
                TokenKind::Neq,
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn comments_are_dropped() {
        let toks = kinds("const // trailing\n/* block /* nested */ */ a: int;");
        assert_eq!(toks[0], TokenKind::KwConst);
        assert_eq!(toks[1], TokenKind::Ident("a".into()));
    }

    #[test]
    fn bv_literal_reports_unsupported() {
        let (tokens, diags) = lex("5bv8", "test.bpl");
        assert_eq!(tokens[0].kind, TokenKind::BvLit);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("bitvector"));
    }

    #[test]
    fn positions_are_one_based() {
        let (tokens, _) = lex("a\n  b", "test.bpl");
        assert_eq!((tokens[0].line, tokens[0].column), (1, 1));
        assert_eq!((tokens[1].line, tokens[1].column), (2, 3));
    }
}
