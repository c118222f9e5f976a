//! Recursive-descent parser for the IVL subset.
//!
//! Parsing is single-pass over the token stream; name resolution and type
//! checking happen in a separate whole-unit pass (see [`crate::typecheck`](mod@crate::typecheck)),
//! so forward references between declarations work regardless of order.
//!
//! Error recovery is per declaration: on the first error inside a
//! declaration the parser records a diagnostic and skips ahead to the next
//! top-level declaration keyword.

use crate::ast::*;
use crate::diag::{Diagnostic, Severity};
use crate::lexer::{lex, Token, TokenKind};

/// Parses `source` into a [`Program`]. On failure, returns at least one
/// `Error` diagnostic with a location; no program is returned.
pub fn parse(source: &str, origin: &str) -> Result<Program, Vec<Diagnostic>> {
    let (tokens, mut diags) = lex(source, origin);
    let mut parser = Parser { tokens, pos: 0, origin: origin.to_string(), diags: Vec::new() };
    let program = parser.parse_program();
    diags.extend(parser.diags);
    if diags.iter().any(|d| d.severity == Severity::Error) {
        Err(diags)
    } else {
        Ok(program)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    origin: String,
    diags: Vec<Diagnostic>,
}

type PResult<T> = Result<T, ()>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_kind(&self) -> &TokenKind {
        &self.peek().kind
    }

    fn peek2_kind(&self) -> &TokenKind {
        let idx = (self.pos + 1).min(self.tokens.len() - 1);
        &self.tokens[idx].kind
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos.min(self.tokens.len() - 1)].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        tok
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek_kind() == kind
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn error_at_current<T>(&mut self, message: impl Into<String>) -> PResult<T> {
        let tok = self.peek().clone();
        self.diags.push(Diagnostic::error(&self.origin, tok.line, tok.column, message));
        Err(())
    }

    fn expect(&mut self, kind: TokenKind, context: &str) -> PResult<Token> {
        if self.at(&kind) {
            Ok(self.advance())
        } else {
            let found = self.peek_kind().describe();
            self.error_at_current(format!("expected {} {context}, found {found}", kind.describe()))
        }
    }

    fn expect_ident(&mut self, context: &str) -> PResult<String> {
        match self.peek_kind().clone() {
            TokenKind::Ident(name) => {
                self.advance();
                Ok(name)
            }
            other => {
                let found = other.describe();
                self.error_at_current(format!("expected identifier {context}, found {found}"))
            }
        }
    }

    fn unsupported<T>(&mut self, what: &str) -> PResult<T> {
        self.error_at_current(format!("{what} is not supported by this subset"))
    }

    fn is_decl_start(kind: &TokenKind) -> bool {
        matches!(
            kind,
            TokenKind::KwType
                | TokenKind::KwConst
                | TokenKind::KwVar
                | TokenKind::KwFunction
                | TokenKind::KwAxiom
                | TokenKind::KwProcedure
                | TokenKind::KwImplementation
        )
    }

    /// Skips to the next top-level declaration keyword at brace depth 0.
    fn sync_to_next_declaration(&mut self) {
        let mut depth: i64 = 0;
        while !self.at(&TokenKind::Eof) {
            match self.peek_kind() {
                TokenKind::LBrace => depth += 1,
                TokenKind::RBrace => depth = (depth - 1).max(0),
                kind if depth == 0 && Self::is_decl_start(kind) => return,
                _ => {}
            }
            self.advance();
        }
    }

    fn parse_program(&mut self) -> Program {
        let mut declarations = Vec::new();
        while !self.at(&TokenKind::Eof) {
            let result = match self.peek_kind() {
                TokenKind::KwType => self.parse_type_decl(),
                TokenKind::KwConst => self.parse_const_decl(),
                TokenKind::KwVar => self.parse_global_var_decl(),
                TokenKind::KwFunction => self.parse_function_decl(),
                TokenKind::KwAxiom => self.parse_axiom_decl(),
                TokenKind::KwProcedure => self.parse_procedure_decl(),
                TokenKind::KwImplementation => self.parse_implementation_decl(),
                other => {
                    let found = other.describe();
                    self.error_at_current::<Declaration>(format!(
                        "expected a top-level declaration, found {found}"
                    ))
                }
            };
            match result {
                Ok(decl) => declarations.push(decl),
                Err(()) => {
                    // First error per declaration: skip the rest of it. Every
                    // declaration parser consumes at least its keyword, so
                    // stopping at a declaration-start token still progresses.
                    if !Self::is_decl_start(self.peek_kind()) {
                        self.advance();
                    }
                    self.sync_to_next_declaration();
                }
            }
        }
        Program::new(declarations)
    }

    fn parse_attributes(&mut self) -> PResult<Vec<Attribute>> {
        let mut attrs = Vec::new();
        while self.at(&TokenKind::LBrace) && self.peek2_kind() == &TokenKind::Colon {
            self.advance(); // {
            self.advance(); // :
            let name = self.expect_ident("as attribute name")?;
            let mut args = Vec::new();
            if !self.at(&TokenKind::RBrace) {
                loop {
                    if let TokenKind::Str(s) = self.peek_kind().clone() {
                        self.advance();
                        args.push(AttrArg::Str(s));
                    } else {
                        args.push(AttrArg::Expr(self.parse_expr()?));
                    }
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
            }
            self.expect(TokenKind::RBrace, "to close attribute")?;
            attrs.push(Attribute { name, args });
        }
        Ok(attrs)
    }

    fn parse_type(&mut self) -> PResult<Type> {
        match self.peek_kind().clone() {
            TokenKind::KwInt => {
                self.advance();
                Ok(Type::Int)
            }
            TokenKind::KwBool => {
                self.advance();
                Ok(Type::Bool)
            }
            TokenKind::LBracket => {
                self.advance();
                let mut domain = vec![self.parse_type()?];
                while self.eat(&TokenKind::Comma) {
                    domain.push(self.parse_type()?);
                }
                self.expect(TokenKind::RBracket, "to close map domain")?;
                let range = self.parse_type()?;
                Ok(Type::Map { domain, range: Box::new(range) })
            }
            TokenKind::Ident(name) => {
                self.advance();
                Ok(Type::Named(name))
            }
            TokenKind::Lt => self.unsupported("polymorphic type arguments"),
            other => {
                let found = other.describe();
                self.error_at_current(format!("expected a type, found {found}"))
            }
        }
    }

    fn parse_ident_list(&mut self, context: &str) -> PResult<Vec<String>> {
        let mut names = vec![self.expect_ident(context)?];
        while self.eat(&TokenKind::Comma) {
            names.push(self.expect_ident(context)?);
        }
        Ok(names)
    }

    fn parse_type_decl(&mut self) -> PResult<Declaration> {
        self.advance(); // type
        let attributes = self.parse_attributes()?;
        let name = self.expect_ident("as type name")?;
        let synonym = if self.eat(&TokenKind::EqEq) { Some(self.parse_type()?) } else { None };
        self.expect(TokenKind::Semi, "after type declaration")?;
        Ok(Declaration::Type(TypeDecl { attributes, name, synonym }))
    }

    fn parse_const_decl(&mut self) -> PResult<Declaration> {
        self.advance(); // const
        let attributes = self.parse_attributes()?;
        let unique = self.eat(&TokenKind::KwUnique);
        let names = self.parse_ident_list("as constant name")?;
        self.expect(TokenKind::Colon, "after constant names")?;
        let ty = self.parse_type()?;
        if self.at(&TokenKind::KwWhere) {
            return self.unsupported("`where` clauses");
        }
        self.expect(TokenKind::Semi, "after constant declaration")?;
        Ok(Declaration::Const(ConstDecl { attributes, unique, names, ty }))
    }

    fn parse_global_var_decl(&mut self) -> PResult<Declaration> {
        self.advance(); // var
        let attributes = self.parse_attributes()?;
        let names = self.parse_ident_list("as variable name")?;
        self.expect(TokenKind::Colon, "after variable names")?;
        let ty = self.parse_type()?;
        if self.at(&TokenKind::KwWhere) {
            return self.unsupported("`where` clauses");
        }
        self.expect(TokenKind::Semi, "after variable declaration")?;
        Ok(Declaration::GlobalVar(GlobalVarDecl { attributes, names, ty }))
    }

    /// Function parameters may be unnamed: `function h(int) returns (int)`.
    fn parse_function_param(&mut self) -> PResult<Param> {
        if matches!(self.peek_kind(), TokenKind::Ident(_)) && self.peek2_kind() == &TokenKind::Colon {
            let name = self.expect_ident("as parameter name")?;
            self.advance(); // :
            let ty = self.parse_type()?;
            Ok(Param { name: Some(name), ty })
        } else {
            Ok(Param { name: None, ty: self.parse_type()? })
        }
    }

    fn parse_function_decl(&mut self) -> PResult<Declaration> {
        self.advance(); // function
        let attributes = self.parse_attributes()?;
        let name = self.expect_ident("as function name")?;
        self.expect(TokenKind::LParen, "to open function parameters")?;
        let mut params = Vec::new();
        if !self.at(&TokenKind::RParen) {
            loop {
                params.push(self.parse_function_param()?);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen, "to close function parameters")?;
        // Either `returns (T)` or the short form `: T`.
        let result = if self.eat(&TokenKind::KwReturns) {
            self.expect(TokenKind::LParen, "after `returns`")?;
            let result = self.parse_function_param()?;
            self.expect(TokenKind::RParen, "to close `returns`")?;
            result
        } else if self.eat(&TokenKind::Colon) {
            Param { name: None, ty: self.parse_type()? }
        } else {
            return self.error_at_current("expected `returns (...)` or `: T` in function signature");
        };
        let body = if self.eat(&TokenKind::LBrace) {
            let expr = self.parse_expr()?;
            self.expect(TokenKind::RBrace, "to close function body")?;
            Some(expr)
        } else {
            self.expect(TokenKind::Semi, "after function declaration")?;
            None
        };
        Ok(Declaration::Function(FunctionDecl { attributes, name, params, result, body }))
    }

    fn parse_axiom_decl(&mut self) -> PResult<Declaration> {
        self.advance(); // axiom
        let attributes = self.parse_attributes()?;
        let expr = self.parse_expr()?;
        self.expect(TokenKind::Semi, "after axiom")?;
        Ok(Declaration::Axiom(AxiomDecl { attributes, expr }))
    }

    /// Procedure and implementation parameters must be named.
    fn parse_named_params(&mut self, what: &str) -> PResult<Vec<Param>> {
        let mut params = Vec::new();
        if !self.at(&TokenKind::RParen) {
            loop {
                let name = self.expect_ident(&format!("as {what} name"))?;
                self.expect(TokenKind::Colon, "after parameter name")?;
                let ty = self.parse_type()?;
                if self.at(&TokenKind::KwWhere) {
                    return self.unsupported("`where` clauses");
                }
                params.push(Param { name: Some(name), ty });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        Ok(params)
    }

    fn parse_signature(&mut self, what: &str) -> PResult<Signature> {
        self.expect(TokenKind::LParen, "to open parameter list")?;
        let params = self.parse_named_params(&format!("{what} parameter"))?;
        self.expect(TokenKind::RParen, "to close parameter list")?;
        let returns = if self.eat(&TokenKind::KwReturns) {
            self.expect(TokenKind::LParen, "after `returns`")?;
            let returns = self.parse_named_params(&format!("{what} out-parameter"))?;
            self.expect(TokenKind::RParen, "to close `returns`")?;
            returns
        } else {
            Vec::new()
        };
        Ok(Signature { params, returns })
    }

    fn parse_spec_clauses(&mut self) -> PResult<Specification> {
        let mut spec = Specification::default();
        loop {
            match self.peek_kind() {
                TokenKind::KwFree => {
                    self.advance();
                    match self.peek_kind() {
                        TokenKind::KwRequires => {
                            self.advance();
                            spec.requires.push(self.parse_spec_clause_tail(true)?);
                        }
                        TokenKind::KwEnsures => {
                            self.advance();
                            spec.ensures.push(self.parse_spec_clause_tail(true)?);
                        }
                        _ => {
                            return self
                                .error_at_current("expected `requires` or `ensures` after `free`")
                        }
                    }
                }
                TokenKind::KwRequires => {
                    self.advance();
                    spec.requires.push(self.parse_spec_clause_tail(false)?);
                }
                TokenKind::KwEnsures => {
                    self.advance();
                    spec.ensures.push(self.parse_spec_clause_tail(false)?);
                }
                TokenKind::KwModifies => {
                    self.advance();
                    if !self.at(&TokenKind::Semi) {
                        spec.modifies.extend(self.parse_ident_list("as modified variable")?);
                    }
                    self.expect(TokenKind::Semi, "after `modifies`")?;
                }
                _ => break,
            }
        }
        Ok(spec)
    }

    fn parse_spec_clause_tail(&mut self, free: bool) -> PResult<SpecClause> {
        let attributes = self.parse_attributes()?;
        let expr = self.parse_expr()?;
        self.expect(TokenKind::Semi, "after specification clause")?;
        Ok(SpecClause { free, attributes, expr })
    }

    fn parse_procedure_decl(&mut self) -> PResult<Declaration> {
        self.advance(); // procedure
        let attributes = self.parse_attributes()?;
        let name = self.expect_ident("as procedure name")?;
        let signature = self.parse_signature("procedure")?;
        // A semicolon right after the signature makes this a pure declaration.
        let declaration_only = self.eat(&TokenKind::Semi);
        let spec = self.parse_spec_clauses()?;
        let body = if declaration_only {
            None
        } else {
            Some(self.parse_body()?)
        };
        Ok(Declaration::Procedure(ProcedureDecl { attributes, name, signature, spec, body }))
    }

    fn parse_implementation_decl(&mut self) -> PResult<Declaration> {
        self.advance(); // implementation
        let attributes = self.parse_attributes()?;
        let name = self.expect_ident("as implementation name")?;
        let signature = self.parse_signature("implementation")?;
        let body = self.parse_body()?;
        Ok(Declaration::Implementation(ImplementationDecl { attributes, name, signature, body }))
    }

    /// A procedure/implementation body: local declarations first, then
    /// statements.
    fn parse_body(&mut self) -> PResult<Block> {
        self.expect(TokenKind::LBrace, "to open body")?;
        let mut statements = Vec::new();
        while self.at(&TokenKind::KwVar) {
            self.advance();
            let names = self.parse_ident_list("as local variable name")?;
            self.expect(TokenKind::Colon, "after local variable names")?;
            let ty = self.parse_type()?;
            if self.at(&TokenKind::KwWhere) {
                return self.unsupported("`where` clauses");
            }
            self.expect(TokenKind::Semi, "after local variable declaration")?;
            statements.push(Statement::LocalVarDecl { names, ty });
        }
        while !self.at(&TokenKind::RBrace) && !self.at(&TokenKind::Eof) {
            statements.push(self.parse_statement()?);
        }
        self.expect(TokenKind::RBrace, "to close body")?;
        Ok(Block::new(statements))
    }

    /// A nested block: statements only, no local declarations.
    fn parse_block(&mut self) -> PResult<Block> {
        self.expect(TokenKind::LBrace, "to open block")?;
        let mut statements = Vec::new();
        while !self.at(&TokenKind::RBrace) && !self.at(&TokenKind::Eof) {
            statements.push(self.parse_statement()?);
        }
        self.expect(TokenKind::RBrace, "to close block")?;
        Ok(Block::new(statements))
    }

    fn parse_statement(&mut self) -> PResult<Statement> {
        match self.peek_kind().clone() {
            TokenKind::KwAssert => {
                self.advance();
                let attributes = self.parse_attributes()?;
                let expr = self.parse_expr()?;
                self.expect(TokenKind::Semi, "after `assert`")?;
                Ok(Statement::Assert { attributes, expr })
            }
            TokenKind::KwAssume => {
                self.advance();
                let attributes = self.parse_attributes()?;
                let expr = self.parse_expr()?;
                self.expect(TokenKind::Semi, "after `assume`")?;
                Ok(Statement::Assume { attributes, expr })
            }
            TokenKind::KwHavoc => {
                self.advance();
                let names = self.parse_ident_list("as havoc target")?;
                self.expect(TokenKind::Semi, "after `havoc`")?;
                Ok(Statement::Havoc { names })
            }
            TokenKind::KwCall => {
                self.advance();
                let first = self.expect_ident("as call target")?;
                let (lhs, callee) =
                    if self.at(&TokenKind::Comma) || self.at(&TokenKind::Assign) {
                        let mut lhs = vec![first];
                        while self.eat(&TokenKind::Comma) {
                            lhs.push(self.expect_ident("as call result target")?);
                        }
                        self.expect(TokenKind::Assign, "in call statement")?;
                        let callee = self.expect_ident("as called procedure")?;
                        (lhs, callee)
                    } else {
                        (Vec::new(), first)
                    };
                self.expect(TokenKind::LParen, "to open call arguments")?;
                let mut args = Vec::new();
                if !self.at(&TokenKind::RParen) {
                    loop {
                        args.push(self.parse_expr()?);
                        if !self.eat(&TokenKind::Comma) {
                            break;
                        }
                    }
                }
                self.expect(TokenKind::RParen, "to close call arguments")?;
                self.expect(TokenKind::Semi, "after call")?;
                Ok(Statement::Call { lhs, callee, args })
            }
            TokenKind::KwIf => self.parse_if_statement().map(Statement::If),
            TokenKind::KwWhile => {
                self.advance();
                self.expect(TokenKind::LParen, "after `while`")?;
                if self.at(&TokenKind::Star) {
                    return self.unsupported("nondeterministic `while (*)` conditions");
                }
                let condition = self.parse_expr()?;
                self.expect(TokenKind::RParen, "to close loop condition")?;
                let mut invariants = Vec::new();
                loop {
                    let free = if self.at(&TokenKind::KwFree)
                        && self.peek2_kind() == &TokenKind::KwInvariant
                    {
                        self.advance();
                        true
                    } else {
                        false
                    };
                    if self.at(&TokenKind::KwInvariant) {
                        self.advance();
                        let attributes = self.parse_attributes()?;
                        let expr = self.parse_expr()?;
                        self.expect(TokenKind::Semi, "after loop invariant")?;
                        invariants.push(SpecClause { free, attributes, expr });
                    } else if free {
                        return self.error_at_current("expected `invariant` after `free`");
                    } else {
                        break;
                    }
                }
                let body = self.parse_block()?;
                Ok(Statement::While(WhileStatement { condition, invariants, body }))
            }
            TokenKind::KwReturn => {
                self.advance();
                self.expect(TokenKind::Semi, "after `return`")?;
                Ok(Statement::Return)
            }
            TokenKind::LBrace => Ok(Statement::Block(self.parse_block()?)),
            TokenKind::KwGoto => self.unsupported("`goto` statements"),
            TokenKind::KwBreak => self.unsupported("`break` statements"),
            TokenKind::KwVar => self.error_at_current(
                "local variable declarations must appear at the start of a procedure body",
            ),
            TokenKind::Ident(name) => {
                self.advance();
                match self.peek_kind() {
                    TokenKind::Colon => self.unsupported("statement labels"),
                    TokenKind::Comma => self.unsupported("parallel assignments"),
                    _ => {
                        let mut indices = Vec::new();
                        while self.eat(&TokenKind::LBracket) {
                            let mut group = vec![self.parse_expr()?];
                            while self.eat(&TokenKind::Comma) {
                                group.push(self.parse_expr()?);
                            }
                            self.expect(TokenKind::RBracket, "to close index")?;
                            indices.push(group);
                        }
                        self.expect(TokenKind::Assign, "in assignment")?;
                        let value = self.parse_expr()?;
                        self.expect(TokenKind::Semi, "after assignment")?;
                        Ok(Statement::Assign { target: AssignTarget { name, indices }, value })
                    }
                }
            }
            other => {
                let found = other.describe();
                self.error_at_current(format!("expected a statement, found {found}"))
            }
        }
    }

    fn parse_if_statement(&mut self) -> PResult<IfStatement> {
        self.advance(); // if
        self.expect(TokenKind::LParen, "after `if`")?;
        if self.at(&TokenKind::Star) {
            return self.unsupported("nondeterministic `if (*)` conditions");
        }
        let condition = self.parse_expr()?;
        self.expect(TokenKind::RParen, "to close condition")?;
        let then_branch = self.parse_block()?;
        let else_branch = if self.eat(&TokenKind::KwElse) {
            if self.at(&TokenKind::KwIf) {
                // `else if` sugar: an else-block holding a single if.
                let nested = self.parse_if_statement()?;
                Some(Block::new(vec![Statement::If(nested)]))
            } else {
                Some(self.parse_block()?)
            }
        } else {
            None
        };
        Ok(IfStatement { condition, then_branch, else_branch })
    }

    fn parse_expr(&mut self) -> PResult<Expression> {
        self.parse_iff()
    }

    fn parse_iff(&mut self) -> PResult<Expression> {
        let mut left = self.parse_implies()?;
        while self.eat(&TokenKind::Iff) {
            let right = self.parse_implies()?;
            left = Expression::Binary {
                op: BinaryOp::Iff,
                left: Box::new(left),
                right: Box::new(right),
            };
        }
        Ok(left)
    }

    fn parse_implies(&mut self) -> PResult<Expression> {
        let left = self.parse_or()?;
        if self.at(&TokenKind::Explies) {
            return self.unsupported("`<==` (explies)");
        }
        if self.eat(&TokenKind::Implies) {
            let right = self.parse_implies()?; // right-associative
            Ok(Expression::Binary {
                op: BinaryOp::Implies,
                left: Box::new(left),
                right: Box::new(right),
            })
        } else {
            Ok(left)
        }
    }

    fn parse_or(&mut self) -> PResult<Expression> {
        let mut left = self.parse_and()?;
        while self.eat(&TokenKind::OrOr) {
            let right = self.parse_and()?;
            left = Expression::Binary {
                op: BinaryOp::Or,
                left: Box::new(left),
                right: Box::new(right),
            };
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> PResult<Expression> {
        let mut left = self.parse_relational()?;
        while self.eat(&TokenKind::AndAnd) {
            let right = self.parse_relational()?;
            left = Expression::Binary {
                op: BinaryOp::And,
                left: Box::new(left),
                right: Box::new(right),
            };
        }
        Ok(left)
    }

    fn parse_relational(&mut self) -> PResult<Expression> {
        let left = self.parse_additive()?;
        if self.at(&TokenKind::Subtype) {
            return self.unsupported("`<:` (subtype)");
        }
        let op = match self.peek_kind() {
            TokenKind::EqEq => BinaryOp::Eq,
            TokenKind::Neq => BinaryOp::Neq,
            TokenKind::Lt => BinaryOp::Lt,
            TokenKind::Le => BinaryOp::Le,
            TokenKind::Gt => BinaryOp::Gt,
            TokenKind::Ge => BinaryOp::Ge,
            _ => return Ok(left),
        };
        self.advance();
        // Comparisons are non-associative; chains need parentheses.
        let right = self.parse_additive()?;
        Ok(Expression::Binary { op, left: Box::new(left), right: Box::new(right) })
    }

    fn parse_additive(&mut self) -> PResult<Expression> {
        let mut left = self.parse_multiplicative()?;
        loop {
            let op = match self.peek_kind() {
                TokenKind::Plus => BinaryOp::Add,
                TokenKind::Minus => BinaryOp::Sub,
                _ => break,
            };
            self.advance();
            let right = self.parse_multiplicative()?;
            left = Expression::Binary { op, left: Box::new(left), right: Box::new(right) };
        }
        Ok(left)
    }

    fn parse_multiplicative(&mut self) -> PResult<Expression> {
        let mut left = self.parse_unary()?;
        loop {
            let op = match self.peek_kind() {
                TokenKind::Star => BinaryOp::Mul,
                TokenKind::KwDiv => BinaryOp::Div,
                TokenKind::KwMod => BinaryOp::Mod,
                TokenKind::Slash => return self.unsupported("real division `/`"),
                _ => break,
            };
            self.advance();
            let right = self.parse_unary()?;
            left = Expression::Binary { op, left: Box::new(left), right: Box::new(right) };
        }
        Ok(left)
    }

    fn parse_unary(&mut self) -> PResult<Expression> {
        let op = match self.peek_kind() {
            TokenKind::Not => UnaryOp::Not,
            TokenKind::Minus => UnaryOp::Neg,
            _ => return self.parse_postfix(),
        };
        self.advance();
        let operand = self.parse_unary()?;
        Ok(Expression::Unary { op, operand: Box::new(operand) })
    }

    fn parse_postfix(&mut self) -> PResult<Expression> {
        let mut expr = self.parse_atom()?;
        while self.eat(&TokenKind::LBracket) {
            let mut indices = vec![self.parse_expr()?];
            while self.eat(&TokenKind::Comma) {
                indices.push(self.parse_expr()?);
            }
            if self.eat(&TokenKind::Assign) {
                let value = self.parse_expr()?;
                self.expect(TokenKind::RBracket, "to close map update")?;
                expr = Expression::MapUpdate {
                    map: Box::new(expr),
                    indices,
                    value: Box::new(value),
                };
            } else {
                self.expect(TokenKind::RBracket, "to close map index")?;
                expr = Expression::MapSelect { map: Box::new(expr), indices };
            }
        }
        Ok(expr)
    }

    fn parse_atom(&mut self) -> PResult<Expression> {
        match self.peek_kind().clone() {
            TokenKind::Int(value) => {
                self.advance();
                Ok(Expression::IntLit(value))
            }
            TokenKind::KwTrue => {
                self.advance();
                Ok(Expression::BoolLit(true))
            }
            TokenKind::KwFalse => {
                self.advance();
                Ok(Expression::BoolLit(false))
            }
            TokenKind::KwOld => {
                self.advance();
                self.expect(TokenKind::LParen, "after `old`")?;
                let inner = self.parse_expr()?;
                self.expect(TokenKind::RParen, "to close `old`")?;
                Ok(Expression::Old(Box::new(inner)))
            }
            TokenKind::Ident(name) => {
                self.advance();
                if self.eat(&TokenKind::LParen) {
                    let mut args = Vec::new();
                    if !self.at(&TokenKind::RParen) {
                        loop {
                            args.push(self.parse_expr()?);
                            if !self.eat(&TokenKind::Comma) {
                                break;
                            }
                        }
                    }
                    self.expect(TokenKind::RParen, "to close arguments")?;
                    Ok(Expression::FunctionApp { name, args })
                } else {
                    Ok(Expression::Ident(name))
                }
            }
            TokenKind::LParen => {
                self.advance();
                if matches!(self.peek_kind(), TokenKind::KwForall | TokenKind::KwExists) {
                    let quant = self.parse_quantifier()?;
                    self.expect(TokenKind::RParen, "to close quantifier")?;
                    Ok(Expression::Quantifier(Box::new(quant)))
                } else {
                    let inner = self.parse_expr()?;
                    self.expect(TokenKind::RParen, "to close parenthesized expression")?;
                    Ok(inner)
                }
            }
            TokenKind::BvLit => {
                // The lexer already reported the unsupported literal.
                self.advance();
                Err(())
            }
            other => {
                let found = other.describe();
                self.error_at_current(format!("expected an expression, found {found}"))
            }
        }
    }

    fn parse_quantifier(&mut self) -> PResult<QuantifierExpr> {
        let kind = if self.eat(&TokenKind::KwForall) {
            QuantKind::Forall
        } else {
            self.expect(TokenKind::KwExists, "as quantifier")?;
            QuantKind::Exists
        };
        if self.at(&TokenKind::Lt) {
            return self.unsupported("quantifier type parameters");
        }
        // Binder groups: `x, y: int, b: bool` flattens to three typed binders.
        let mut bound = Vec::new();
        loop {
            let mut names = vec![self.expect_ident("as bound variable")?];
            while self.eat(&TokenKind::Comma) {
                names.push(self.expect_ident("as bound variable")?);
            }
            self.expect(TokenKind::Colon, "after bound variables")?;
            let ty = self.parse_type()?;
            for name in names {
                bound.push(BoundVar { name, ty: ty.clone() });
            }
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        self.expect(TokenKind::ColonColon, "after quantifier binders")?;
        let mut attributes = Vec::new();
        let mut triggers = Vec::new();
        while self.at(&TokenKind::LBrace) {
            if self.peek2_kind() == &TokenKind::Colon {
                attributes.extend(self.parse_attributes()?);
            } else {
                self.advance(); // {
                let mut terms = vec![self.parse_expr()?];
                while self.eat(&TokenKind::Comma) {
                    terms.push(self.parse_expr()?);
                }
                self.expect(TokenKind::RBrace, "to close trigger")?;
                triggers.push(Trigger { terms });
            }
        }
        let body = self.parse_expr()?;
        Ok(QuantifierExpr { kind, bound, attributes, triggers, body })
    }
}

/// Convenience wrapper used in tests and fixtures where the source is known
/// to be well-formed.
pub fn parse_or_panic(source: &str, origin: &str) -> Program {
    match parse(source, origin) {
        Ok(p) => p,
        Err(diags) => panic!("parse of {origin} failed:\n{}", crate::diag::render_all(&diags)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LISTING1: &str = "\
function h(int) returns (int);
axiom (forall x, y: int :: x > y ==> h(x) > y);
const a: [int] int;
axiom (forall i: int :: 0 <= i ==> a[i] < a[i + 1]);
procedure p(i: int) returns (o: int)
  requires i >= 0; ensures o > a[i]; { o := h(a[i + 1]); }
";

    #[test]
    fn listing1_has_five_declarations() {
        let program = parse_or_panic(LISTING1, "listing1.bpl");
        assert_eq!(program.declarations.len(), 5);
        assert!(matches!(program.declarations[0], Declaration::Function(_)));
        assert!(matches!(program.declarations[1], Declaration::Axiom(_)));
        assert!(matches!(program.declarations[2], Declaration::Const(_)));
        assert!(matches!(program.declarations[3], Declaration::Axiom(_)));
        assert!(matches!(program.declarations[4], Declaration::Procedure(_)));
    }

    #[test]
    fn empty_text_parses_to_empty_program() {
        let program = parse_or_panic("", "empty.bpl");
        assert_eq!(program.declarations.len(), 0);
    }

    #[test]
    fn missing_semicolon_is_a_syntax_error_with_location() {
        let err = parse("const a: [int] int", "bad.bpl").unwrap_err();
        assert!(!err.is_empty());
        assert!(err[0].message.contains("expected `;`"), "got: {}", err[0].message);
        assert_eq!(err[0].line, 1);
    }

    #[test]
    fn grouped_binders_flatten() {
        let program = parse_or_panic("axiom (forall x, y: int, b: bool :: b ==> x == y);", "q.bpl");
        let Declaration::Axiom(axiom) = &program.declarations[0] else { panic!() };
        let Expression::Quantifier(q) = &axiom.expr else { panic!() };
        assert_eq!(q.bound.len(), 3);
        assert_eq!(q.bound[0].ty, Type::Int);
        assert_eq!(q.bound[2].ty, Type::Bool);
    }

    #[test]
    fn else_if_parses_as_nested_if() {
        let src = "procedure p(x: int) { if (x > 0) { return; } else if (x < 0) { return; } else { return; } }";
        let program = parse_or_panic(src, "ifs.bpl");
        let Declaration::Procedure(p) = &program.declarations[0] else { panic!() };
        let body = p.body.as_ref().unwrap();
        let Statement::If(outer) = &body.statements[0] else { panic!() };
        let else_block = outer.else_branch.as_ref().unwrap();
        assert_eq!(else_block.statements.len(), 1);
        assert!(matches!(else_block.statements[0], Statement::If(_)));
    }

    #[test]
    fn unsupported_constructs_are_rejected_with_diagnostics() {
        for (src, needle) in [
            ("procedure p() { goto L; }", "goto"),
            ("var g: int where g > 0;", "where"),
            ("procedure p() { x, y := 1, 2; }", "parallel"),
            ("axiom 1bv8 == 1bv8;", "bitvector"),
            ("function f(x: int): int { x / 2 }", "real division"),
        ] {
            let err = parse(src, "unsup.bpl").unwrap_err();
            assert!(
                err.iter().any(|d| d.message.contains(needle)),
                "expected `{needle}` diagnostic for `{src}`, got {err:?}"
            );
        }
    }

    #[test]
    fn recovery_reports_one_error_per_declaration() {
        let src = "const a int;\nconst b: bool;\nconst c bool;\n";
        let err = parse(src, "recover.bpl").unwrap_err();
        let lines: Vec<u32> = err.iter().map(|d| d.line).collect();
        assert_eq!(lines, vec![1, 3]);
    }

    #[test]
    fn map_update_and_select_parse() {
        let program = parse_or_panic(
            "procedure p(m: [int]int) returns (r: [int]int) { r := m[0 := 1]; r := m; }",
            "maps.bpl",
        );
        let Declaration::Procedure(p) = &program.declarations[0] else { panic!() };
        let Statement::Assign { value, .. } = &p.body.as_ref().unwrap().statements[0] else {
            panic!()
        };
        assert!(matches!(value, Expression::MapUpdate { .. }));
    }

    #[test]
    fn integer_literals_are_arbitrary_precision() {
        let big = "123456789012345678901234567890123456789";
        let program = parse_or_panic(&format!("axiom {big} > 0;"), "big.bpl");
        let text = crate::printer::print(&program);
        assert!(text.contains(big));
        assert_eq!(parse_or_panic(&text, "big2.bpl"), program);
    }

    #[test]
    fn free_clauses_parse_through() {
        let src = "procedure p(x: int); free requires x > 0; free ensures true;";
        let program = parse_or_panic(src, "free.bpl");
        let Declaration::Procedure(p) = &program.declarations[0] else { panic!() };
        assert!(p.spec.requires[0].free);
        assert!(p.spec.ensures[0].free);
        assert!(p.body.is_none());
    }
}
