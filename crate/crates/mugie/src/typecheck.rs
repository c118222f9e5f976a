//! Name resolution and type checking for the IVL subset.
//!
//! Checking is two-phase: the first pass collects all top-level names of the
//! whole unit, the second checks every declaration against that table. This
//! makes resolution independent of declaration order, which the structural
//! mutation operators rely on.
//!
//! Typecheck diagnostics carry no line numbers (the AST is location-free);
//! each message names the declaration it concerns.

use std::collections::{HashMap, HashSet};
use std::ops::Deref;

use crate::ast::*;
use crate::diag::Diagnostic;

/// A program that passed [`typecheck`]. Construction is only possible through
/// the checker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedProgram {
    program: Program,
}

impl ValidatedProgram {
    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn into_program(self) -> Program {
        self.program
    }
}

impl Deref for ValidatedProgram {
    type Target = Program;

    fn deref(&self) -> &Program {
        &self.program
    }
}

/// Typechecks `program`. On success all identifiers resolve, expressions are
/// well-typed, and every implementation matches a declared procedure.
pub fn typecheck(program: Program, origin: &str) -> Result<ValidatedProgram, Vec<Diagnostic>> {
    let diags = check(&program, origin);
    if diags.is_empty() {
        Ok(ValidatedProgram { program })
    } else {
        Err(diags)
    }
}

/// Runs all checks and returns the diagnostics (empty means well-formed).
pub fn check(program: &Program, origin: &str) -> Vec<Diagnostic> {
    let mut checker = Checker::new(program, origin);
    checker.collect_toplevel();
    if checker.diags.is_empty() {
        checker.check_declarations();
    }
    checker.diags
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarKind {
    Const,
    Global,
    InParam,
    OutParam,
    Local,
    Bound,
}

impl VarKind {
    fn mutable(self) -> bool {
        matches!(self, VarKind::Global | VarKind::OutParam | VarKind::Local)
    }
}

#[derive(Debug, Clone)]
struct VarInfo {
    ty: Type,
    kind: VarKind,
}

struct FunctionInfo {
    params: Vec<Type>,
    result: Type,
}

struct ProcedureInfo {
    params: Vec<Type>,
    returns: Vec<Type>,
    modifies: Vec<String>,
}

struct Checker<'a> {
    program: &'a Program,
    origin: String,
    diags: Vec<Diagnostic>,
    types: HashMap<String, Option<Type>>, // name -> synonym target (raw)
    values: HashMap<String, VarInfo>,     // consts and global vars
    functions: HashMap<String, FunctionInfo>,
    procedures: HashMap<String, ProcedureInfo>,
}

impl<'a> Checker<'a> {
    fn new(program: &'a Program, origin: &str) -> Self {
        Checker {
            program,
            origin: origin.to_string(),
            diags: Vec::new(),
            types: HashMap::new(),
            values: HashMap::new(),
            functions: HashMap::new(),
            procedures: HashMap::new(),
        }
    }

    fn error(&mut self, ctx: &str, message: impl AsRef<str>) {
        self.diags.push(Diagnostic::unlocated_error(
            &self.origin,
            format!("{ctx}: {}", message.as_ref()),
        ));
    }

    // ------------------------------------------------------------------
    // Phase 1: collect top-level names (order never matters).
    // ------------------------------------------------------------------

    fn collect_toplevel(&mut self) {
        let program = self.program;
        for (index, decl) in program.declarations.iter().enumerate() {
            let ctx = decl.describe(index);
            match decl {
                Declaration::Type(d) => {
                    if self.types.insert(d.name.clone(), d.synonym.clone()).is_some() {
                        self.error(&ctx, "duplicate top-level type name");
                    }
                }
                Declaration::Const(d) => {
                    for name in &d.names {
                        let info = VarInfo { ty: d.ty.clone(), kind: VarKind::Const };
                        if self.values.insert(name.clone(), info).is_some() {
                            self.error(&ctx, format!("duplicate top-level name `{name}`"));
                        }
                    }
                }
                Declaration::GlobalVar(d) => {
                    for name in &d.names {
                        let info = VarInfo { ty: d.ty.clone(), kind: VarKind::Global };
                        if self.values.insert(name.clone(), info).is_some() {
                            self.error(&ctx, format!("duplicate top-level name `{name}`"));
                        }
                    }
                }
                Declaration::Function(d) => {
                    let info = FunctionInfo {
                        params: d.params.iter().map(|p| p.ty.clone()).collect(),
                        result: d.result.ty.clone(),
                    };
                    if self.functions.insert(d.name.clone(), info).is_some() {
                        self.error(&ctx, "duplicate top-level function name");
                    }
                }
                Declaration::Procedure(d) => {
                    let info = ProcedureInfo {
                        params: d.signature.params.iter().map(|p| p.ty.clone()).collect(),
                        returns: d.signature.returns.iter().map(|p| p.ty.clone()).collect(),
                        modifies: d.spec.modifies.clone(),
                    };
                    if self.procedures.insert(d.name.clone(), info).is_some() {
                        self.error(&ctx, "duplicate top-level procedure name");
                    }
                }
                Declaration::Axiom(_) | Declaration::Implementation(_) => {}
            }
        }

        // Canonicalize the collected signatures once names are known.
        let value_names: Vec<String> = self.values.keys().cloned().collect();
        for name in value_names {
            let raw = self.values[&name].ty.clone();
            if let Some(ty) = self.resolve_type_quiet(&raw) {
                self.values.get_mut(&name).unwrap().ty = ty;
            }
        }
        let fn_names: Vec<String> = self.functions.keys().cloned().collect();
        for name in fn_names {
            let params = self.functions[&name].params.clone();
            let result = self.functions[&name].result.clone();
            let params = params.iter().map(|t| self.resolve_type_quiet(t).unwrap_or(t.clone())).collect();
            let result = self.resolve_type_quiet(&result).unwrap_or(result);
            let info = self.functions.get_mut(&name).unwrap();
            info.params = params;
            info.result = result;
        }
        let proc_names: Vec<String> = self.procedures.keys().cloned().collect();
        for name in proc_names {
            let params = self.procedures[&name].params.clone();
            let returns = self.procedures[&name].returns.clone();
            let params = params.iter().map(|t| self.resolve_type_quiet(t).unwrap_or(t.clone())).collect();
            let returns = returns.iter().map(|t| self.resolve_type_quiet(t).unwrap_or(t.clone())).collect();
            let info = self.procedures.get_mut(&name).unwrap();
            info.params = params;
            info.returns = returns;
        }
    }

    // ------------------------------------------------------------------
    // Type resolution (synonym expansion, validity).
    // ------------------------------------------------------------------

    fn resolve_type(&mut self, ty: &Type, ctx: &str) -> Option<Type> {
        match self.try_resolve_type(ty, &mut Vec::new()) {
            Ok(t) => Some(t),
            Err(msg) => {
                self.error(ctx, msg);
                None
            }
        }
    }

    fn resolve_type_quiet(&self, ty: &Type) -> Option<Type> {
        self.try_resolve_type(ty, &mut Vec::new()).ok()
    }

    fn try_resolve_type(&self, ty: &Type, visiting: &mut Vec<String>) -> Result<Type, String> {
        match ty {
            Type::Int => Ok(Type::Int),
            Type::Bool => Ok(Type::Bool),
            Type::Map { domain, range } => {
                let domain = domain
                    .iter()
                    .map(|t| self.try_resolve_type(t, visiting))
                    .collect::<Result<Vec<_>, _>>()?;
                let range = self.try_resolve_type(range, visiting)?;
                Ok(Type::Map { domain, range: Box::new(range) })
            }
            Type::Named(name) => {
                if is_bitvector_name(name) {
                    return Err(format!("bitvector type `{name}` is not supported by this subset"));
                }
                match self.types.get(name) {
                    None => Err(format!("undeclared type `{name}`")),
                    Some(None) => Ok(Type::Named(name.clone())),
                    Some(Some(target)) => {
                        if visiting.iter().any(|n| n == name) {
                            return Err(format!("cyclic type synonym `{name}`"));
                        }
                        visiting.push(name.clone());
                        let resolved = self.try_resolve_type(&target.clone(), visiting);
                        visiting.pop();
                        resolved
                    }
                }
            }
        }
    }

    // ------------------------------------------------------------------
    // Phase 2: per-declaration checks.
    // ------------------------------------------------------------------

    fn check_declarations(&mut self) {
        let program = self.program;
        for (index, decl) in program.declarations.iter().enumerate() {
            let ctx = decl.describe(index);
            match decl {
                Declaration::Type(d) => {
                    if let Some(target) = &d.synonym {
                        self.resolve_type(target, &ctx);
                    }
                }
                Declaration::Const(d) => {
                    self.resolve_type(&d.ty, &ctx);
                }
                Declaration::GlobalVar(d) => {
                    self.resolve_type(&d.ty, &ctx);
                }
                Declaration::Function(d) => self.check_function(d, &ctx),
                Declaration::Axiom(d) => {
                    // Axioms may mention constants and functions, not variables.
                    let scope = Scope::axiom();
                    self.expect_type(&d.expr, &Type::Bool, &scope, &ctx);
                }
                Declaration::Procedure(d) => self.check_procedure(d, &ctx),
                Declaration::Implementation(d) => self.check_implementation(d, &ctx),
            }
        }
    }

    fn check_function(&mut self, d: &FunctionDecl, ctx: &str) {
        let mut scope = Scope::body();
        let mut seen = HashSet::new();
        for param in &d.params {
            let Some(ty) = self.resolve_type(&param.ty, ctx) else { continue };
            if let Some(name) = &param.name {
                if !seen.insert(name.clone()) {
                    self.error(ctx, format!("duplicate parameter `{name}`"));
                }
                scope.bind(name.clone(), VarInfo { ty, kind: VarKind::InParam });
            }
        }
        let result_ty = self.resolve_type(&d.result.ty, ctx);
        if let (Some(body), Some(result_ty)) = (&d.body, result_ty) {
            self.expect_type(body, &result_ty, &scope, ctx);
        }
    }

    fn check_procedure(&mut self, d: &ProcedureDecl, ctx: &str) {
        let Some((ins, outs)) = self.check_signature(&d.signature, ctx) else { return };

        for name in &d.spec.modifies {
            match self.values.get(name) {
                Some(info) if info.kind == VarKind::Global => {}
                Some(_) => self.error(ctx, format!("`{name}` in modifies clause is not a global variable")),
                None => self.error(ctx, format!("unresolved identifier `{name}` in modifies clause")),
            }
        }

        // Preconditions see in-parameters; postconditions also see outs.
        let mut pre_scope = Scope::body();
        for (name, info) in &ins {
            pre_scope.bind(name.clone(), info.clone());
        }
        for clause in &d.spec.requires {
            self.expect_type(&clause.expr, &Type::Bool, &pre_scope, ctx);
        }
        let mut post_scope = pre_scope.clone();
        for (name, info) in &outs {
            post_scope.bind(name.clone(), info.clone());
        }
        for clause in &d.spec.ensures {
            self.expect_type(&clause.expr, &Type::Bool, &post_scope, ctx);
        }

        if let Some(body) = &d.body {
            self.check_body(body, &ins, &outs, &d.spec.modifies, ctx);
        }
    }

    fn check_implementation(&mut self, d: &ImplementationDecl, ctx: &str) {
        let Some((ins, outs)) = self.check_signature(&d.signature, ctx) else { return };
        let modifies = match self.procedures.get(&d.name) {
            None => {
                self.error(ctx, format!("implementation without matching procedure `{}`", d.name));
                return;
            }
            Some(proc_info) => {
                let impl_params: Vec<Type> = ins.iter().map(|(_, i)| i.ty.clone()).collect();
                let impl_returns: Vec<Type> = outs.iter().map(|(_, i)| i.ty.clone()).collect();
                if impl_params != proc_info.params || impl_returns != proc_info.returns {
                    self.error(ctx, "signature does not match the procedure declaration");
                    return;
                }
                proc_info.modifies.clone()
            }
        };
        self.check_body(&d.body, &ins, &outs, &modifies, ctx);
    }

    #[allow(clippy::type_complexity)]
    fn check_signature(
        &mut self,
        sig: &Signature,
        ctx: &str,
    ) -> Option<(Vec<(String, VarInfo)>, Vec<(String, VarInfo)>)> {
        let mut seen = HashSet::new();
        let mut ins = Vec::new();
        let mut outs = Vec::new();
        for (params, out, kind) in [
            (&sig.params, &mut ins, VarKind::InParam),
            (&sig.returns, &mut outs, VarKind::OutParam),
        ] {
            for param in params.iter() {
                let ty = self.resolve_type(&param.ty, ctx)?;
                let Some(name) = &param.name else {
                    self.error(ctx, "procedure parameters must be named");
                    return None;
                };
                if !seen.insert(name.clone()) {
                    self.error(ctx, format!("duplicate parameter `{name}`"));
                }
                out.push((name.clone(), VarInfo { ty, kind }));
            }
        }
        Some((ins, outs))
    }

    fn check_body(
        &mut self,
        body: &Block,
        ins: &[(String, VarInfo)],
        outs: &[(String, VarInfo)],
        modifies: &[String],
        ctx: &str,
    ) {
        let mut scope = Scope::body();
        for (name, info) in ins.iter().chain(outs) {
            scope.bind(name.clone(), info.clone());
        }

        // Local declarations form the body prefix; collect and validate them.
        let prefix = body.local_decl_prefix_len();
        for stmt in &body.statements[prefix..] {
            if matches!(stmt, Statement::LocalVarDecl { .. }) {
                self.error(ctx, "local variable declarations must precede all statements");
            }
        }
        for stmt in &body.statements[..prefix] {
            let Statement::LocalVarDecl { names, ty } = stmt else { unreachable!() };
            let Some(ty) = self.resolve_type(ty, ctx) else { continue };
            for name in names {
                if scope.bound_here(name) {
                    self.error(ctx, format!("duplicate local variable `{name}`"));
                }
                scope.bind(name.clone(), VarInfo { ty: ty.clone(), kind: VarKind::Local });
            }
        }

        for stmt in &body.statements[prefix..] {
            self.check_statement(stmt, &scope, modifies, ctx);
        }
    }

    fn check_statement(&mut self, stmt: &Statement, scope: &Scope, modifies: &[String], ctx: &str) {
        match stmt {
            Statement::LocalVarDecl { .. } => {
                // Only legal in the body prefix, which check_body consumed.
                self.error(ctx, "local variable declaration outside a body prefix");
            }
            Statement::Assign { target, value } => {
                let Some(base_ty) = self.lookup_mutable(&target.name, scope, modifies, ctx) else {
                    return;
                };
                let mut current = base_ty;
                for group in &target.indices {
                    match current {
                        Type::Map { domain, range } => {
                            if domain.len() != group.len() {
                                self.error(
                                    ctx,
                                    format!(
                                        "map index arity mismatch on `{}`: expected {}, found {}",
                                        target.name,
                                        domain.len(),
                                        group.len()
                                    ),
                                );
                                return;
                            }
                            for (index, expected) in group.iter().zip(domain.iter()) {
                                self.expect_type(index, expected, scope, ctx);
                            }
                            current = (*range).clone();
                        }
                        _ => {
                            self.error(ctx, format!("`{}` is indexed but is not a map", target.name));
                            return;
                        }
                    }
                }
                self.expect_type(value, &current, scope, ctx);
            }
            Statement::Assert { expr, .. } | Statement::Assume { expr, .. } => {
                self.expect_type(expr, &Type::Bool, scope, ctx);
            }
            Statement::Havoc { names } => {
                for name in names {
                    self.lookup_mutable(name, scope, modifies, ctx);
                }
            }
            Statement::Call { lhs, callee, args } => {
                let Some(info) = self.procedures.get(callee) else {
                    self.error(ctx, format!("call to undeclared procedure `{callee}`"));
                    return;
                };
                let params = info.params.clone();
                let returns = info.returns.clone();
                let callee_modifies = info.modifies.clone();
                if args.len() != params.len() {
                    self.error(
                        ctx,
                        format!(
                            "call to `{callee}`: expected {} arguments, found {}",
                            params.len(),
                            args.len()
                        ),
                    );
                } else {
                    for (arg, expected) in args.iter().zip(params.iter()) {
                        self.expect_type(arg, expected, scope, ctx);
                    }
                }
                if lhs.len() != returns.len() && !(lhs.is_empty() && !returns.is_empty()) {
                    self.error(
                        ctx,
                        format!(
                            "call to `{callee}`: expected {} result targets, found {}",
                            returns.len(),
                            lhs.len()
                        ),
                    );
                } else if !lhs.is_empty() {
                    let mut seen = HashSet::new();
                    for (name, expected) in lhs.iter().zip(returns.iter()) {
                        if !seen.insert(name.clone()) {
                            self.error(ctx, format!("duplicate call target `{name}`"));
                        }
                        if let Some(ty) = self.lookup_mutable(name, scope, modifies, ctx) {
                            if &ty != expected {
                                self.error(
                                    ctx,
                                    format!(
                                        "call target `{name}` has type {}, expected {}",
                                        crate::printer::print_type(&ty),
                                        crate::printer::print_type(expected)
                                    ),
                                );
                            }
                        }
                    }
                }
                for global in &callee_modifies {
                    if !modifies.contains(global) {
                        self.error(
                            ctx,
                            format!(
                                "call to `{callee}` may modify `{global}`, which is not in the modifies clause"
                            ),
                        );
                    }
                }
            }
            Statement::If(if_stmt) => {
                self.expect_type(&if_stmt.condition, &Type::Bool, scope, ctx);
                self.check_nested_block(&if_stmt.then_branch, scope, modifies, ctx);
                if let Some(else_block) = &if_stmt.else_branch {
                    self.check_nested_block(else_block, scope, modifies, ctx);
                }
            }
            Statement::While(w) => {
                self.expect_type(&w.condition, &Type::Bool, scope, ctx);
                for inv in &w.invariants {
                    self.expect_type(&inv.expr, &Type::Bool, scope, ctx);
                }
                self.check_nested_block(&w.body, scope, modifies, ctx);
            }
            Statement::Return => {}
            Statement::Block(block) => {
                self.check_nested_block(block, scope, modifies, ctx);
            }
        }
    }

    fn check_nested_block(&mut self, block: &Block, scope: &Scope, modifies: &[String], ctx: &str) {
        for stmt in &block.statements {
            self.check_statement(stmt, scope, modifies, ctx);
        }
    }

    fn lookup_mutable(
        &mut self,
        name: &str,
        scope: &Scope,
        modifies: &[String],
        ctx: &str,
    ) -> Option<Type> {
        let info = match scope.lookup(name) {
            Some(info) => info.clone(),
            None => match self.values.get(name) {
                Some(info) => info.clone(),
                None => {
                    self.error(ctx, format!("unresolved identifier `{name}`"));
                    return None;
                }
            },
        };
        if !info.kind.mutable() {
            self.error(ctx, format!("`{name}` is not assignable here"));
            return None;
        }
        if info.kind == VarKind::Global && !modifies.iter().any(|m| m == name) {
            self.error(
                ctx,
                format!("assignment to global `{name}` requires it in the modifies clause"),
            );
        }
        Some(info.ty)
    }

    // ------------------------------------------------------------------
    // Expression typing.
    // ------------------------------------------------------------------

    fn expect_type(&mut self, expr: &Expression, expected: &Type, scope: &Scope, ctx: &str) {
        if let Some(actual) = self.infer(expr, scope, ctx) {
            if &actual != expected {
                self.error(
                    ctx,
                    format!(
                        "type mismatch: expected {}, found {} in `{}`",
                        crate::printer::print_type(expected),
                        crate::printer::print_type(&actual),
                        crate::printer::print_expr(expr)
                    ),
                );
            }
        }
    }

    fn infer(&mut self, expr: &Expression, scope: &Scope, ctx: &str) -> Option<Type> {
        match expr {
            Expression::IntLit(_) => Some(Type::Int),
            Expression::BoolLit(_) => Some(Type::Bool),
            Expression::Ident(name) => {
                if let Some(info) = scope.lookup(name) {
                    return Some(info.ty.clone());
                }
                if !scope.axiom_scope {
                    if let Some(info) = self.values.get(name) {
                        return Some(info.ty.clone());
                    }
                } else if let Some(info) = self.values.get(name) {
                    if info.kind == VarKind::Const {
                        return Some(info.ty.clone());
                    }
                    self.error(ctx, format!("global variable `{name}` may not appear in an axiom"));
                    return None;
                }
                self.error(ctx, format!("unresolved identifier `{name}`"));
                None
            }
            Expression::MapSelect { map, indices } => {
                let map_ty = self.infer(map, scope, ctx)?;
                self.check_map_indices(&map_ty, indices, scope, ctx)
            }
            Expression::MapUpdate { map, indices, value } => {
                let map_ty = self.infer(map, scope, ctx)?;
                let range = self.check_map_indices(&map_ty, indices, scope, ctx)?;
                self.expect_type(value, &range, scope, ctx);
                Some(map_ty)
            }
            Expression::Unary { op, operand } => {
                let expected = match op {
                    UnaryOp::Not => Type::Bool,
                    UnaryOp::Neg => Type::Int,
                };
                self.expect_type(operand, &expected, scope, ctx);
                Some(expected)
            }
            Expression::Binary { op, left, right } => match op {
                BinaryOp::Iff | BinaryOp::Implies | BinaryOp::Or | BinaryOp::And => {
                    self.expect_type(left, &Type::Bool, scope, ctx);
                    self.expect_type(right, &Type::Bool, scope, ctx);
                    Some(Type::Bool)
                }
                BinaryOp::Eq | BinaryOp::Neq => {
                    let lt = self.infer(left, scope, ctx);
                    let rt = self.infer(right, scope, ctx);
                    if let (Some(lt), Some(rt)) = (lt, rt) {
                        if lt != rt {
                            self.error(
                                ctx,
                                format!(
                                    "type mismatch: cannot compare {} with {}",
                                    crate::printer::print_type(&lt),
                                    crate::printer::print_type(&rt)
                                ),
                            );
                        }
                    }
                    Some(Type::Bool)
                }
                BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
                    self.expect_type(left, &Type::Int, scope, ctx);
                    self.expect_type(right, &Type::Int, scope, ctx);
                    Some(Type::Bool)
                }
                BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Mod => {
                    self.expect_type(left, &Type::Int, scope, ctx);
                    self.expect_type(right, &Type::Int, scope, ctx);
                    Some(Type::Int)
                }
            },
            Expression::Quantifier(q) => {
                let mut inner = scope.child();
                let mut bound_names = HashSet::new();
                for bv in &q.bound {
                    if !bound_names.insert(bv.name.clone()) {
                        self.error(ctx, format!("duplicate bound variable `{}`", bv.name));
                    }
                    if let Some(ty) = self.resolve_type(&bv.ty, ctx) {
                        inner.bind(bv.name.clone(), VarInfo { ty, kind: VarKind::Bound });
                    }
                }
                for trigger in &q.triggers {
                    if trigger.terms.is_empty() {
                        self.error(ctx, "trigger must have at least one term");
                    }
                    for term in &trigger.terms {
                        self.infer(term, &inner, ctx);
                        if !mentions_any(term, &bound_names) {
                            self.error(
                                ctx,
                                format!(
                                    "trigger term `{}` mentions no bound variable",
                                    crate::printer::print_expr(term)
                                ),
                            );
                        }
                    }
                }
                self.expect_type(&q.body, &Type::Bool, &inner, ctx);
                Some(Type::Bool)
            }
            Expression::FunctionApp { name, args } => {
                let Some(info) = self.functions.get(name) else {
                    self.error(ctx, format!("unresolved identifier `{name}`"));
                    return None;
                };
                let params = info.params.clone();
                let result = info.result.clone();
                if args.len() != params.len() {
                    self.error(
                        ctx,
                        format!(
                            "`{name}` expects {} arguments, found {}",
                            params.len(),
                            args.len()
                        ),
                    );
                } else {
                    for (arg, expected) in args.iter().zip(params.iter()) {
                        self.expect_type(arg, expected, scope, ctx);
                    }
                }
                Some(result)
            }
            Expression::Old(inner) => self.infer(inner, scope, ctx),
        }
    }

    fn check_map_indices(
        &mut self,
        map_ty: &Type,
        indices: &[Expression],
        scope: &Scope,
        ctx: &str,
    ) -> Option<Type> {
        match map_ty {
            Type::Map { domain, range } => {
                if domain.len() != indices.len() {
                    self.error(
                        ctx,
                        format!(
                            "map index arity mismatch: expected {}, found {}",
                            domain.len(),
                            indices.len()
                        ),
                    );
                    return None;
                }
                for (index, expected) in indices.iter().zip(domain.iter()) {
                    self.expect_type(index, expected, scope, ctx);
                }
                Some((**range).clone())
            }
            other => {
                self.error(
                    ctx,
                    format!("indexed expression has non-map type {}", crate::printer::print_type(other)),
                );
                None
            }
        }
    }
}

fn is_bitvector_name(name: &str) -> bool {
    name.strip_prefix("bv")
        .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
}

/// Returns true when `expr` mentions any identifier from `names`.
fn mentions_any(expr: &Expression, names: &HashSet<String>) -> bool {
    match expr {
        Expression::IntLit(_) | Expression::BoolLit(_) => false,
        Expression::Ident(name) => names.contains(name),
        Expression::MapSelect { map, indices } => {
            mentions_any(map, names) || indices.iter().any(|e| mentions_any(e, names))
        }
        Expression::MapUpdate { map, indices, value } => {
            mentions_any(map, names)
                || indices.iter().any(|e| mentions_any(e, names))
                || mentions_any(value, names)
        }
        Expression::Unary { operand, .. } => mentions_any(operand, names),
        Expression::Binary { left, right, .. } => {
            mentions_any(left, names) || mentions_any(right, names)
        }
        Expression::Quantifier(q) => mentions_any(&q.body, names),
        Expression::FunctionApp { args, .. } => args.iter().any(|e| mentions_any(e, names)),
        Expression::Old(inner) => mentions_any(inner, names),
    }
}

/// Lexical scope for expression and statement checking. Global names live in
/// the checker's tables; this stack only holds parameters, locals, and bound
/// variables (which shadow globals).
#[derive(Clone)]
struct Scope {
    vars: HashMap<String, VarInfo>,
    /// Axiom scope: global variables are not visible, constants are.
    axiom_scope: bool,
}

impl Scope {
    fn body() -> Self {
        Scope { vars: HashMap::new(), axiom_scope: false }
    }

    fn axiom() -> Self {
        Scope { vars: HashMap::new(), axiom_scope: true }
    }

    fn child(&self) -> Self {
        self.clone()
    }

    fn bind(&mut self, name: String, info: VarInfo) {
        self.vars.insert(name, info);
    }

    fn bound_here(&self, name: &str) -> bool {
        self.vars.contains_key(name)
    }

    fn lookup(&self, name: &str) -> Option<&VarInfo> {
        self.vars.get(name)
    }
}
