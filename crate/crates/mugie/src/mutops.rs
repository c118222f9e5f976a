//! The eleven mutation operators, as site-parameterized program
//! transformations.
//!
//! Every operator preserves program semantics by construction — it reorders,
//! splits, joins, or adds redundant material the language defines as
//! immaterial. The one exception is G2 (trigger removal), which can change
//! solver behavior in practice and is only enabled when a run is explicitly
//! flagged as trigger-mutating.
//!
//! Sites address program elements structurally (indices and paths into the
//! AST), never textually; a site is only valid for the exact program it was
//! enumerated from. The textual forms used in lineage headers are:
//!
//! ```text
//! S1(i,j)  S5(procName)  S6(declIndex)
//! L1(dK,i,j)  L2(dK,s)  L4(proc,i,j)  L5(proc,i,j)
//! L6(elemPath,kind,i,j)  L8(stmtPath)  G1(elemPath,kind,pos)  G2(dK.qN,t)
//! ```
//!
//! where paths are `d<declIndex>` followed by `.s<stmtIndex>` steps and the
//! block selectors `.t` (then), `.e` (else), `.b` (loop body).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ast::*;

/// The operator labels. The numbering is non-contiguous by design; these are
/// exactly the eleven supported operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OperatorKind {
    S1,
    S5,
    S6,
    L1,
    L2,
    L4,
    L5,
    L6,
    L8,
    G1,
    G2,
}

/// All operators in the fixed order used for weighted selection.
pub const ALL_OPERATORS: [OperatorKind; 11] = [
    OperatorKind::S1,
    OperatorKind::S5,
    OperatorKind::S6,
    OperatorKind::L1,
    OperatorKind::L2,
    OperatorKind::L4,
    OperatorKind::L5,
    OperatorKind::L6,
    OperatorKind::L8,
    OperatorKind::G1,
    OperatorKind::G2,
];

impl OperatorKind {
    /// G2 may alter the effective semantics (triggers guide quantifier
    /// instantiation), so it is never treated as semantics-preserving.
    pub fn semantics_risky(self) -> bool {
        self == OperatorKind::G2
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OperatorKind::S1 => "S1",
            OperatorKind::S5 => "S5",
            OperatorKind::S6 => "S6",
            OperatorKind::L1 => "L1",
            OperatorKind::L2 => "L2",
            OperatorKind::L4 => "L4",
            OperatorKind::L5 => "L5",
            OperatorKind::L6 => "L6",
            OperatorKind::L8 => "L8",
            OperatorKind::G1 => "G1",
            OperatorKind::G2 => "G2",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OperatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_OPERATORS
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown mutation operator `{s}`"))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MutationError {
    #[error("invalid mutation site: {0}")]
    InvalidSite(String),
}

fn invalid<T>(detail: impl Into<String>) -> Result<T, MutationError> {
    Err(MutationError::InvalidSite(detail.into()))
}

// ---------------------------------------------------------------------------
// Structural addressing.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathStep {
    /// Select statement `i` of the current block (or of a block statement).
    Stmt(usize),
    /// Enter the then-branch of the current if statement.
    Then,
    /// Enter the else-branch of the current if statement.
    Else,
    /// Enter the body of the current while statement.
    LoopBody,
}

/// A structural path into a program: a top-level declaration index followed
/// by steps into its body.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodePath {
    pub decl: usize,
    pub steps: Vec<PathStep>,
}

impl NodePath {
    pub fn decl(decl: usize) -> Self {
        NodePath { decl, steps: Vec::new() }
    }

    fn child(&self, step: PathStep) -> Self {
        let mut steps = self.steps.clone();
        steps.push(step);
        NodePath { decl: self.decl, steps }
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d{}", self.decl)?;
        for step in &self.steps {
            match step {
                PathStep::Stmt(i) => write!(f, ".s{i}")?,
                PathStep::Then => write!(f, ".t")?,
                PathStep::Else => write!(f, ".e")?,
                PathStep::LoopBody => write!(f, ".b")?,
            }
        }
        Ok(())
    }
}

impl FromStr for NodePath {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut segments = s.split('.');
        let head = segments.next().ok_or("empty path")?;
        let decl = head
            .strip_prefix('d')
            .and_then(|n| n.parse::<usize>().ok())
            .ok_or_else(|| format!("bad path head `{head}`"))?;
        let mut steps = Vec::new();
        for seg in segments {
            let step = match seg {
                "t" => PathStep::Then,
                "e" => PathStep::Else,
                "b" => PathStep::LoopBody,
                other => PathStep::Stmt(
                    other
                        .strip_prefix('s')
                        .and_then(|n| n.parse::<usize>().ok())
                        .ok_or_else(|| format!("bad path step `{other}`"))?,
                ),
            };
            steps.push(step);
        }
        Ok(NodePath { decl, steps })
    }
}

fn decl_body(decl: &Declaration) -> Option<&Block> {
    match decl {
        Declaration::Procedure(p) => p.body.as_ref(),
        Declaration::Implementation(i) => Some(&i.body),
        _ => None,
    }
}

fn decl_body_mut(decl: &mut Declaration) -> Option<&mut Block> {
    match decl {
        Declaration::Procedure(p) => p.body.as_mut(),
        Declaration::Implementation(i) => Some(&mut i.body),
        _ => None,
    }
}

enum Cursor<'p> {
    Block(&'p Block),
    Stmt(&'p Statement),
}

fn walk_path<'p>(program: &'p Program, path: &NodePath) -> Result<Cursor<'p>, MutationError> {
    let decl = match program.declarations.get(path.decl) {
        Some(d) => d,
        None => return invalid(format!("declaration index {} out of range", path.decl)),
    };
    let Some(body) = decl_body(decl) else {
        return invalid(format!("declaration {} has no body", path.decl));
    };
    let mut cursor = Cursor::Block(body);
    for step in &path.steps {
        cursor = match (cursor, step) {
            (Cursor::Block(b), PathStep::Stmt(i)) => match b.statements.get(*i) {
                Some(s) => Cursor::Stmt(s),
                None => return invalid(format!("statement index {i} out of range in `{path}`")),
            },
            (Cursor::Stmt(Statement::Block(b)), PathStep::Stmt(i)) => match b.statements.get(*i) {
                Some(s) => Cursor::Stmt(s),
                None => return invalid(format!("statement index {i} out of range in `{path}`")),
            },
            (Cursor::Stmt(Statement::If(s)), PathStep::Then) => Cursor::Block(&s.then_branch),
            (Cursor::Stmt(Statement::If(s)), PathStep::Else) => match &s.else_branch {
                Some(b) => Cursor::Block(b),
                None => return invalid(format!("if at `{path}` has no else branch")),
            },
            (Cursor::Stmt(Statement::While(s)), PathStep::LoopBody) => Cursor::Block(&s.body),
            _ => return invalid(format!("path `{path}` does not fit the program shape")),
        };
    }
    Ok(cursor)
}

fn resolve_block<'p>(program: &'p Program, path: &NodePath) -> Result<&'p Block, MutationError> {
    match walk_path(program, path)? {
        Cursor::Block(b) => Ok(b),
        Cursor::Stmt(Statement::Block(b)) => Ok(b),
        Cursor::Stmt(_) => invalid(format!("path `{path}` does not address a block")),
    }
}

fn resolve_statement<'p>(
    program: &'p Program,
    path: &NodePath,
) -> Result<&'p Statement, MutationError> {
    match walk_path(program, path)? {
        Cursor::Stmt(s) => Ok(s),
        Cursor::Block(_) => invalid(format!("path `{path}` does not address a statement")),
    }
}

enum CursorMut<'p> {
    Block(&'p mut Block),
    Stmt(&'p mut Statement),
}

fn walk_path_mut<'p>(
    program: &'p mut Program,
    path: &NodePath,
) -> Result<CursorMut<'p>, MutationError> {
    let decl_count = program.declarations.len();
    let decl = match program.declarations.get_mut(path.decl) {
        Some(d) => d,
        None => {
            return invalid(format!(
                "declaration index {} out of range ({decl_count} declarations)",
                path.decl
            ))
        }
    };
    let Some(body) = decl_body_mut(decl) else {
        return invalid(format!("declaration {} has no body", path.decl));
    };
    let mut cursor = CursorMut::Block(body);
    for step in &path.steps {
        cursor = match (cursor, step) {
            (CursorMut::Block(b), PathStep::Stmt(i)) => match b.statements.get_mut(*i) {
                Some(s) => CursorMut::Stmt(s),
                None => return invalid(format!("statement index {i} out of range in `{path}`")),
            },
            (CursorMut::Stmt(Statement::Block(b)), PathStep::Stmt(i)) => {
                match b.statements.get_mut(*i) {
                    Some(s) => CursorMut::Stmt(s),
                    None => {
                        return invalid(format!("statement index {i} out of range in `{path}`"))
                    }
                }
            }
            (CursorMut::Stmt(Statement::If(s)), PathStep::Then) => {
                CursorMut::Block(&mut s.then_branch)
            }
            (CursorMut::Stmt(Statement::If(s)), PathStep::Else) => match &mut s.else_branch {
                Some(b) => CursorMut::Block(b),
                None => return invalid(format!("if at `{path}` has no else branch")),
            },
            (CursorMut::Stmt(Statement::While(s)), PathStep::LoopBody) => {
                CursorMut::Block(&mut s.body)
            }
            _ => return invalid(format!("path `{path}` does not fit the program shape")),
        };
    }
    Ok(cursor)
}

fn resolve_block_mut<'p>(
    program: &'p mut Program,
    path: &NodePath,
) -> Result<&'p mut Block, MutationError> {
    match walk_path_mut(program, path)? {
        CursorMut::Block(b) => Ok(b),
        CursorMut::Stmt(Statement::Block(b)) => Ok(b),
        CursorMut::Stmt(_) => invalid(format!("path `{path}` does not address a block")),
    }
}

// ---------------------------------------------------------------------------
// Sites.
// ---------------------------------------------------------------------------

/// Where an operator applies. Coordinates are structural and only meaningful
/// for the program they were enumerated from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    /// S1: unordered pair of top-level declaration indices (stored first < second).
    DeclPair { first: usize, second: usize },
    /// S5: a procedure (by unique name) with an inline body.
    ProcedureName { name: String },
    /// S6: the declaration to move to a companion file.
    DeclIndex { index: usize },
    /// L1: two local-variable-declaration statements in the body of
    /// declaration `owner`.
    LocalPair { owner: usize, first: usize, second: usize },
    /// L2: a multi-variable local declaration statement.
    LocalDecl { owner: usize, stmt: usize },
    /// L4/L5: two requires (resp. ensures) clauses of a procedure.
    ClausePair { procedure: String, first: usize, second: usize },
    /// L6: two same-kind clauses of one program element; for asserts the
    /// indices are adjacent statements of the block at `elem`.
    ClauseSwap { elem: NodePath, kind: ClauseKind, first: usize, second: usize },
    /// L8: an if statement with an explicit else branch.
    IfAt { path: NodePath },
    /// G1: insertion position for a `true` clause.
    ClauseInsert { elem: NodePath, kind: ClauseKind, pos: usize },
    /// G2: trigger `trigger` of the `quantifier`-th quantifier (preorder)
    /// inside declaration `decl`.
    TriggerAt { decl: usize, quantifier: usize, trigger: usize },
}

/// One operator application: the kind plus the site it was applied at. This
/// is the unit lineage is recorded in.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AppliedOp {
    pub kind: OperatorKind,
    pub site: Site,
}

impl fmt::Display for AppliedOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.kind, &self.site) {
            (OperatorKind::S1, Site::DeclPair { first, second }) => {
                write!(f, "S1({first},{second})")
            }
            (OperatorKind::S5, Site::ProcedureName { name }) => write!(f, "S5({name})"),
            (OperatorKind::S6, Site::DeclIndex { index }) => write!(f, "S6({index})"),
            (OperatorKind::L1, Site::LocalPair { owner, first, second }) => {
                write!(f, "L1(d{owner},{first},{second})")
            }
            (OperatorKind::L2, Site::LocalDecl { owner, stmt }) => write!(f, "L2(d{owner},{stmt})"),
            (OperatorKind::L4, Site::ClausePair { procedure, first, second })
            | (OperatorKind::L5, Site::ClausePair { procedure, first, second }) => {
                write!(f, "{}({procedure},{first},{second})", self.kind)
            }
            (OperatorKind::L6, Site::ClauseSwap { elem, kind, first, second }) => {
                write!(f, "L6({elem},{kind},{first},{second})")
            }
            (OperatorKind::L8, Site::IfAt { path }) => write!(f, "L8({path})"),
            (OperatorKind::G1, Site::ClauseInsert { elem, kind, pos }) => {
                write!(f, "G1({elem},{kind},{pos})")
            }
            (OperatorKind::G2, Site::TriggerAt { decl, quantifier, trigger }) => {
                write!(f, "G2(d{decl}.q{quantifier},{trigger})")
            }
            _ => write!(f, "{}(?)", self.kind),
        }
    }
}

impl FromStr for AppliedOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let open = s.find('(').ok_or_else(|| format!("malformed operator application `{s}`"))?;
        if !s.ends_with(')') {
            return Err(format!("malformed operator application `{s}`"));
        }
        let kind: OperatorKind = s[..open].parse()?;
        let args: Vec<&str> = match &s[open + 1..s.len() - 1] {
            "" => Vec::new(),
            inner => inner.split(',').collect(),
        };
        let expect = |n: usize| -> Result<(), String> {
            if args.len() == n {
                Ok(())
            } else {
                Err(format!("`{s}`: expected {n} site arguments, found {}", args.len()))
            }
        };
        let idx = |a: &str| -> Result<usize, String> {
            a.parse::<usize>().map_err(|_| format!("`{s}`: bad index `{a}`"))
        };
        let owner = |a: &str| -> Result<usize, String> {
            a.strip_prefix('d')
                .and_then(|n| n.parse::<usize>().ok())
                .ok_or_else(|| format!("`{s}`: bad body owner `{a}`"))
        };
        let site = match kind {
            OperatorKind::S1 => {
                expect(2)?;
                Site::DeclPair { first: idx(args[0])?, second: idx(args[1])? }
            }
            OperatorKind::S5 => {
                expect(1)?;
                Site::ProcedureName { name: args[0].to_string() }
            }
            OperatorKind::S6 => {
                expect(1)?;
                Site::DeclIndex { index: idx(args[0])? }
            }
            OperatorKind::L1 => {
                expect(3)?;
                Site::LocalPair { owner: owner(args[0])?, first: idx(args[1])?, second: idx(args[2])? }
            }
            OperatorKind::L2 => {
                expect(2)?;
                Site::LocalDecl { owner: owner(args[0])?, stmt: idx(args[1])? }
            }
            OperatorKind::L4 | OperatorKind::L5 => {
                expect(3)?;
                Site::ClausePair {
                    procedure: args[0].to_string(),
                    first: idx(args[1])?,
                    second: idx(args[2])?,
                }
            }
            OperatorKind::L6 => {
                expect(4)?;
                Site::ClauseSwap {
                    elem: args[0].parse()?,
                    kind: args[1].parse()?,
                    first: idx(args[2])?,
                    second: idx(args[3])?,
                }
            }
            OperatorKind::L8 => {
                expect(1)?;
                Site::IfAt { path: args[0].parse()? }
            }
            OperatorKind::G1 => {
                expect(3)?;
                Site::ClauseInsert { elem: args[0].parse()?, kind: args[1].parse()?, pos: idx(args[2])? }
            }
            OperatorKind::G2 => {
                expect(2)?;
                let (decl_part, quant_part) = args[0]
                    .split_once(".q")
                    .ok_or_else(|| format!("`{s}`: bad quantifier path `{}`", args[0]))?;
                Site::TriggerAt {
                    decl: owner(decl_part)?,
                    quantifier: quant_part
                        .parse::<usize>()
                        .map_err(|_| format!("`{s}`: bad quantifier ordinal"))?,
                    trigger: idx(args[1])?,
                }
            }
        };
        Ok(AppliedOp { kind, site })
    }
}

/// The outcome of one operator application. `companion` is present exactly
/// when the operator was S6 (the moved declaration lives in a second file).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutationResult {
    pub primary: Program,
    pub companion: Option<Program>,
    pub applied: AppliedOp,
}

// ---------------------------------------------------------------------------
// Traversals used by enumeration and G2.
// ---------------------------------------------------------------------------

/// Visits every block of every body, preorder, with its path. The flag tells
/// whether the block is a body root (whose prefix may hold local decls).
fn for_each_block<'p>(program: &'p Program, f: &mut impl FnMut(&NodePath, &'p Block, bool)) {
    for (index, decl) in program.declarations.iter().enumerate() {
        if let Some(body) = decl_body(decl) {
            let path = NodePath::decl(index);
            f(&path, body, true);
            for_each_block_in(&path, body, f);
        }
    }
}

fn for_each_block_in<'p>(
    path: &NodePath,
    block: &'p Block,
    f: &mut impl FnMut(&NodePath, &'p Block, bool),
) {
    for (i, stmt) in block.statements.iter().enumerate() {
        let stmt_path = path.child(PathStep::Stmt(i));
        match stmt {
            Statement::If(s) => {
                let then_path = stmt_path.child(PathStep::Then);
                f(&then_path, &s.then_branch, false);
                for_each_block_in(&then_path, &s.then_branch, f);
                if let Some(else_block) = &s.else_branch {
                    let else_path = stmt_path.child(PathStep::Else);
                    f(&else_path, else_block, false);
                    for_each_block_in(&else_path, else_block, f);
                }
            }
            Statement::While(s) => {
                let body_path = stmt_path.child(PathStep::LoopBody);
                f(&body_path, &s.body, false);
                for_each_block_in(&body_path, &s.body, f);
            }
            Statement::Block(b) => {
                f(&stmt_path, b, false);
                for_each_block_in(&stmt_path, b, f);
            }
            _ => {}
        }
    }
}

/// Preorder expression traversal of one declaration: clause expressions in
/// spec order, then body statements. Attribute payloads are opaque and never
/// visited.
fn for_each_expr_in_decl<'p>(decl: &'p Declaration, f: &mut impl FnMut(&'p Expression)) {
    match decl {
        Declaration::Type(_) | Declaration::Const(_) | Declaration::GlobalVar(_) => {}
        Declaration::Function(d) => {
            if let Some(body) = &d.body {
                for_each_expr(body, f);
            }
        }
        Declaration::Axiom(d) => for_each_expr(&d.expr, f),
        Declaration::Procedure(d) => {
            for clause in &d.spec.requires {
                for_each_expr(&clause.expr, f);
            }
            for clause in &d.spec.ensures {
                for_each_expr(&clause.expr, f);
            }
            if let Some(body) = &d.body {
                for_each_expr_in_block(body, f);
            }
        }
        Declaration::Implementation(d) => for_each_expr_in_block(&d.body, f),
    }
}

fn for_each_expr_in_block<'p>(block: &'p Block, f: &mut impl FnMut(&'p Expression)) {
    for stmt in &block.statements {
        match stmt {
            Statement::LocalVarDecl { .. } | Statement::Havoc { .. } | Statement::Return => {}
            Statement::Assign { target, value } => {
                for group in &target.indices {
                    for e in group {
                        for_each_expr(e, f);
                    }
                }
                for_each_expr(value, f);
            }
            Statement::Assert { expr, .. } | Statement::Assume { expr, .. } => {
                for_each_expr(expr, f)
            }
            Statement::Call { args, .. } => {
                for e in args {
                    for_each_expr(e, f);
                }
            }
            Statement::If(s) => {
                for_each_expr(&s.condition, f);
                for_each_expr_in_block(&s.then_branch, f);
                if let Some(else_block) = &s.else_branch {
                    for_each_expr_in_block(else_block, f);
                }
            }
            Statement::While(s) => {
                for_each_expr(&s.condition, f);
                for inv in &s.invariants {
                    for_each_expr(&inv.expr, f);
                }
                for_each_expr_in_block(&s.body, f);
            }
            Statement::Block(b) => for_each_expr_in_block(b, f),
        }
    }
}

fn for_each_expr<'p>(expr: &'p Expression, f: &mut impl FnMut(&'p Expression)) {
    f(expr);
    match expr {
        Expression::IntLit(_) | Expression::BoolLit(_) | Expression::Ident(_) => {}
        Expression::MapSelect { map, indices } => {
            for_each_expr(map, f);
            for e in indices {
                for_each_expr(e, f);
            }
        }
        Expression::MapUpdate { map, indices, value } => {
            for_each_expr(map, f);
            for e in indices {
                for_each_expr(e, f);
            }
            for_each_expr(value, f);
        }
        Expression::Unary { operand, .. } => for_each_expr(operand, f),
        Expression::Binary { left, right, .. } => {
            for_each_expr(left, f);
            for_each_expr(right, f);
        }
        Expression::Quantifier(q) => {
            for trigger in &q.triggers {
                for term in &trigger.terms {
                    for_each_expr(term, f);
                }
            }
            for_each_expr(&q.body, f);
        }
        Expression::FunctionApp { args, .. } => {
            for e in args {
                for_each_expr(e, f);
            }
        }
        Expression::Old(inner) => for_each_expr(inner, f),
    }
}

/// Finds the `n`-th quantifier (preorder) of a declaration, mutably. The
/// traversal order matches [`for_each_expr_in_decl`].
fn nth_quantifier_mut(decl: &mut Declaration, n: usize) -> Option<&mut QuantifierExpr> {
    let mut counter = 0usize;
    match decl {
        Declaration::Type(_) | Declaration::Const(_) | Declaration::GlobalVar(_) => None,
        Declaration::Function(d) => {
            d.body.as_mut().and_then(|body| nth_quant_in_expr(body, n, &mut counter))
        }
        Declaration::Axiom(d) => nth_quant_in_expr(&mut d.expr, n, &mut counter),
        Declaration::Procedure(d) => {
            for clause in &mut d.spec.requires {
                if let Some(q) = nth_quant_in_expr(&mut clause.expr, n, &mut counter) {
                    return Some(q);
                }
            }
            for clause in &mut d.spec.ensures {
                if let Some(q) = nth_quant_in_expr(&mut clause.expr, n, &mut counter) {
                    return Some(q);
                }
            }
            d.body.as_mut().and_then(|body| nth_quant_in_block(body, n, &mut counter))
        }
        Declaration::Implementation(d) => nth_quant_in_block(&mut d.body, n, &mut counter),
    }
}

fn nth_quant_in_block<'e>(
    block: &'e mut Block,
    n: usize,
    counter: &mut usize,
) -> Option<&'e mut QuantifierExpr> {
    for stmt in &mut block.statements {
        let found = match stmt {
            Statement::LocalVarDecl { .. } | Statement::Havoc { .. } | Statement::Return => None,
            Statement::Assign { target, value } => {
                for group in &mut target.indices {
                    for e in group {
                        if let Some(q) = nth_quant_in_expr(e, n, counter) {
                            return Some(q);
                        }
                    }
                }
                nth_quant_in_expr(value, n, counter)
            }
            Statement::Assert { expr, .. } | Statement::Assume { expr, .. } => {
                nth_quant_in_expr(expr, n, counter)
            }
            Statement::Call { args, .. } => {
                for e in args {
                    if let Some(q) = nth_quant_in_expr(e, n, counter) {
                        return Some(q);
                    }
                }
                None
            }
            Statement::If(s) => {
                if let Some(q) = nth_quant_in_expr(&mut s.condition, n, counter) {
                    return Some(q);
                }
                if let Some(q) = nth_quant_in_block(&mut s.then_branch, n, counter) {
                    return Some(q);
                }
                match &mut s.else_branch {
                    Some(else_block) => nth_quant_in_block(else_block, n, counter),
                    None => None,
                }
            }
            Statement::While(s) => {
                if let Some(q) = nth_quant_in_expr(&mut s.condition, n, counter) {
                    return Some(q);
                }
                for inv in &mut s.invariants {
                    if let Some(q) = nth_quant_in_expr(&mut inv.expr, n, counter) {
                        return Some(q);
                    }
                }
                nth_quant_in_block(&mut s.body, n, counter)
            }
            Statement::Block(b) => nth_quant_in_block(b, n, counter),
        };
        if found.is_some() {
            return found;
        }
    }
    None
}

fn nth_quant_in_expr<'e>(
    expr: &'e mut Expression,
    n: usize,
    counter: &mut usize,
) -> Option<&'e mut QuantifierExpr> {
    // Mirror of for_each_expr: preorder, triggers before body.
    match expr {
        Expression::IntLit(_) | Expression::BoolLit(_) | Expression::Ident(_) => None,
        Expression::MapSelect { map, indices } => {
            if let Some(q) = nth_quant_in_expr(map, n, counter) {
                return Some(q);
            }
            for e in indices {
                if let Some(q) = nth_quant_in_expr(e, n, counter) {
                    return Some(q);
                }
            }
            None
        }
        Expression::MapUpdate { map, indices, value } => {
            if let Some(q) = nth_quant_in_expr(map, n, counter) {
                return Some(q);
            }
            for e in indices {
                if let Some(q) = nth_quant_in_expr(e, n, counter) {
                    return Some(q);
                }
            }
            nth_quant_in_expr(value, n, counter)
        }
        Expression::Unary { operand, .. } => nth_quant_in_expr(operand, n, counter),
        Expression::Binary { left, right, .. } => {
            if let Some(q) = nth_quant_in_expr(left, n, counter) {
                return Some(q);
            }
            nth_quant_in_expr(right, n, counter)
        }
        Expression::Quantifier(q) => {
            if *counter == n {
                return Some(q);
            }
            *counter += 1;
            for trigger in &mut q.triggers {
                for term in &mut trigger.terms {
                    if let Some(found) = nth_quant_in_expr(term, n, counter) {
                        return Some(found);
                    }
                }
            }
            nth_quant_in_expr(&mut q.body, n, counter)
        }
        Expression::FunctionApp { args, .. } => {
            for e in args {
                if let Some(q) = nth_quant_in_expr(e, n, counter) {
                    return Some(q);
                }
            }
            None
        }
        Expression::Old(inner) => nth_quant_in_expr(inner, n, counter),
    }
}

// ---------------------------------------------------------------------------
// Site enumeration.
// ---------------------------------------------------------------------------

/// Enumerates every valid site for operator `kind` in `program`. The list is
/// exhaustive and duplicate-free; it is empty exactly when the operator is
/// inapplicable.
pub fn enumerate_sites(program: &Program, kind: OperatorKind) -> Vec<Site> {
    let mut sites = Vec::new();
    match kind {
        OperatorKind::S1 => {
            let n = program.declarations.len();
            for i in 0..n {
                for j in i + 1..n {
                    sites.push(Site::DeclPair { first: i, second: j });
                }
            }
        }
        OperatorKind::S5 => {
            for decl in &program.declarations {
                if let Declaration::Procedure(p) = decl {
                    if p.body.is_some() {
                        sites.push(Site::ProcedureName { name: p.name.clone() });
                    }
                }
            }
        }
        OperatorKind::S6 => {
            if program.declarations.len() >= 2 {
                for index in 0..program.declarations.len() {
                    sites.push(Site::DeclIndex { index });
                }
            }
        }
        OperatorKind::L1 => {
            for (owner, decl) in program.declarations.iter().enumerate() {
                if let Some(body) = decl_body(decl) {
                    let prefix = body.local_decl_prefix_len();
                    for i in 0..prefix {
                        for j in i + 1..prefix {
                            sites.push(Site::LocalPair { owner, first: i, second: j });
                        }
                    }
                }
            }
        }
        OperatorKind::L2 => {
            for (owner, decl) in program.declarations.iter().enumerate() {
                if let Some(body) = decl_body(decl) {
                    for (stmt, statement) in body.statements.iter().enumerate() {
                        if let Statement::LocalVarDecl { names, .. } = statement {
                            if names.len() >= 2 {
                                sites.push(Site::LocalDecl { owner, stmt });
                            }
                        }
                    }
                }
            }
        }
        OperatorKind::L4 | OperatorKind::L5 => {
            for decl in &program.declarations {
                if let Declaration::Procedure(p) = decl {
                    let clauses =
                        if kind == OperatorKind::L4 { &p.spec.requires } else { &p.spec.ensures };
                    let eligible: Vec<usize> = clauses
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| c.is_mutable_site())
                        .map(|(i, _)| i)
                        .collect();
                    for (a, &i) in eligible.iter().enumerate() {
                        for &j in &eligible[a + 1..] {
                            sites.push(Site::ClausePair {
                                procedure: p.name.clone(),
                                first: i,
                                second: j,
                            });
                        }
                    }
                }
            }
        }
        OperatorKind::L6 => {
            for (index, decl) in program.declarations.iter().enumerate() {
                if let Declaration::Procedure(p) = decl {
                    for (clause_kind, clauses) in [
                        (ClauseKind::Requires, &p.spec.requires),
                        (ClauseKind::Ensures, &p.spec.ensures),
                    ] {
                        push_clause_pairs(&mut sites, NodePath::decl(index), clause_kind, clauses);
                    }
                }
            }
            for_each_block(program, &mut |path, block, _| {
                for (i, stmt) in block.statements.iter().enumerate() {
                    if let Statement::While(w) = stmt {
                        push_clause_pairs(
                            &mut sites,
                            path.child(PathStep::Stmt(i)),
                            ClauseKind::Invariant,
                            &w.invariants,
                        );
                    }
                }
                // Adjacent unattributed assert pairs.
                for i in 0..block.statements.len().saturating_sub(1) {
                    let pair = (&block.statements[i], &block.statements[i + 1]);
                    if let (
                        Statement::Assert { attributes: a, .. },
                        Statement::Assert { attributes: b, .. },
                    ) = pair
                    {
                        if a.is_empty() && b.is_empty() {
                            sites.push(Site::ClauseSwap {
                                elem: path.clone(),
                                kind: ClauseKind::Assert,
                                first: i,
                                second: i + 1,
                            });
                        }
                    }
                }
            });
        }
        OperatorKind::L8 => {
            for_each_block(program, &mut |path, block, _| {
                for (i, stmt) in block.statements.iter().enumerate() {
                    if let Statement::If(s) = stmt {
                        if s.else_branch.is_some() {
                            sites.push(Site::IfAt { path: path.child(PathStep::Stmt(i)) });
                        }
                    }
                }
            });
        }
        OperatorKind::G1 => {
            for (index, decl) in program.declarations.iter().enumerate() {
                if let Declaration::Procedure(p) = decl {
                    for (clause_kind, count) in [
                        (ClauseKind::Requires, p.spec.requires.len()),
                        (ClauseKind::Ensures, p.spec.ensures.len()),
                    ] {
                        for pos in 0..=count {
                            sites.push(Site::ClauseInsert {
                                elem: NodePath::decl(index),
                                kind: clause_kind,
                                pos,
                            });
                        }
                    }
                }
            }
            for_each_block(program, &mut |path, block, is_root| {
                for (i, stmt) in block.statements.iter().enumerate() {
                    if let Statement::While(w) = stmt {
                        for pos in 0..=w.invariants.len() {
                            sites.push(Site::ClauseInsert {
                                elem: path.child(PathStep::Stmt(i)),
                                kind: ClauseKind::Invariant,
                                pos,
                            });
                        }
                    }
                }
                // `assert true;` can go anywhere in the statement section;
                // in a body root that starts after the local declarations.
                let lower = if is_root { block.local_decl_prefix_len() } else { 0 };
                for pos in lower..=block.statements.len() {
                    sites.push(Site::ClauseInsert {
                        elem: path.clone(),
                        kind: ClauseKind::Assert,
                        pos,
                    });
                }
            });
        }
        OperatorKind::G2 => {
            for (index, decl) in program.declarations.iter().enumerate() {
                let mut ordinal = 0usize;
                for_each_expr_in_decl(decl, &mut |expr| {
                    if let Expression::Quantifier(q) = expr {
                        for trigger in 0..q.triggers.len() {
                            sites.push(Site::TriggerAt { decl: index, quantifier: ordinal, trigger });
                        }
                        ordinal += 1;
                    }
                });
            }
        }
    }
    sites
}

fn push_clause_pairs(sites: &mut Vec<Site>, elem: NodePath, kind: ClauseKind, clauses: &[SpecClause]) {
    let eligible: Vec<usize> = clauses
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_mutable_site())
        .map(|(i, _)| i)
        .collect();
    for (a, &i) in eligible.iter().enumerate() {
        for &j in &eligible[a + 1..] {
            sites.push(Site::ClauseSwap { elem: elem.clone(), kind, first: i, second: j });
        }
    }
}

// ---------------------------------------------------------------------------
// Application.
// ---------------------------------------------------------------------------

/// Applies operator `kind` at `site`. The input program is untouched; the
/// result is a fresh program (plus a companion file for S6).
pub fn apply(
    program: &Program,
    kind: OperatorKind,
    site: &Site,
) -> Result<MutationResult, MutationError> {
    let applied = AppliedOp { kind, site: site.clone() };
    match (kind, site) {
        (OperatorKind::S1, Site::DeclPair { first, second }) => {
            apply_swap_declarations(program, *first, *second).map(|p| single(p, applied))
        }
        (OperatorKind::S5, Site::ProcedureName { name }) => {
            apply_split_definition(program, name).map(|p| single(p, applied))
        }
        (OperatorKind::S6, Site::DeclIndex { index }) => {
            apply_move_to_companion(program, *index).map(|(primary, companion)| MutationResult {
                primary,
                companion: Some(companion),
                applied,
            })
        }
        (OperatorKind::L1, Site::LocalPair { owner, first, second }) => {
            apply_swap_locals(program, *owner, *first, *second).map(|p| single(p, applied))
        }
        (OperatorKind::L2, Site::LocalDecl { owner, stmt }) => {
            apply_split_locals(program, *owner, *stmt).map(|p| single(p, applied))
        }
        (OperatorKind::L4, Site::ClausePair { procedure, first, second }) => {
            apply_join_clauses(program, procedure, ClauseKind::Requires, *first, *second)
                .map(|p| single(p, applied))
        }
        (OperatorKind::L5, Site::ClausePair { procedure, first, second }) => {
            apply_join_clauses(program, procedure, ClauseKind::Ensures, *first, *second)
                .map(|p| single(p, applied))
        }
        (OperatorKind::L6, Site::ClauseSwap { elem, kind, first, second }) => {
            apply_swap_clauses(program, elem, *kind, *first, *second).map(|p| single(p, applied))
        }
        (OperatorKind::L8, Site::IfAt { path }) => {
            apply_complement_if(program, path).map(|p| single(p, applied))
        }
        (OperatorKind::G1, Site::ClauseInsert { elem, kind, pos }) => {
            apply_insert_true(program, elem, *kind, *pos).map(|p| single(p, applied))
        }
        (OperatorKind::G2, Site::TriggerAt { decl, quantifier, trigger }) => {
            apply_remove_trigger(program, *decl, *quantifier, *trigger).map(|p| single(p, applied))
        }
        (kind, site) => invalid(format!("site {site:?} does not belong to operator {kind}")),
    }
}

fn single(primary: Program, applied: AppliedOp) -> MutationResult {
    MutationResult { primary, companion: None, applied }
}

/// S1: swap two top-level declarations. An involution.
pub fn apply_swap_declarations(
    program: &Program,
    first: usize,
    second: usize,
) -> Result<Program, MutationError> {
    let n = program.declarations.len();
    if first == second {
        return invalid("S1 needs two distinct declarations");
    }
    if first >= n || second >= n {
        return invalid(format!("S1 indices ({first},{second}) out of range for {n} declarations"));
    }
    let mut result = program.clone();
    result.declarations.swap(first, second);
    Ok(result)
}

/// S5: split an inline procedure definition into a declaration plus an
/// implementation inserted immediately after it. The specification stays on
/// the declaration.
pub fn apply_split_definition(program: &Program, name: &str) -> Result<Program, MutationError> {
    let mut result = program.clone();
    let index = result
        .declarations
        .iter()
        .position(|d| matches!(d, Declaration::Procedure(p) if p.name == name))
        .ok_or_else(|| MutationError::InvalidSite(format!("no procedure named `{name}`")))?;
    let Declaration::Procedure(proc_decl) = &mut result.declarations[index] else { unreachable!() };
    let Some(body) = proc_decl.body.take() else {
        return invalid(format!("procedure `{name}` has no inline body"));
    };
    let implementation = Declaration::Implementation(ImplementationDecl {
        attributes: Vec::new(),
        name: name.to_string(),
        signature: proc_decl.signature.clone(),
        body,
    });
    result.declarations.insert(index + 1, implementation);
    Ok(result)
}

/// S6: move one declaration into a companion file. The primary keeps the
/// remaining declarations in order; the verifier later receives
/// primary-then-companion.
pub fn apply_move_to_companion(
    program: &Program,
    index: usize,
) -> Result<(Program, Program), MutationError> {
    if program.declarations.len() < 2 {
        return invalid("S6 needs at least two declarations");
    }
    if index >= program.declarations.len() {
        return invalid(format!("S6 index {index} out of range"));
    }
    let mut primary = program.clone();
    let moved = primary.declarations.remove(index);
    Ok((primary, Program::new(vec![moved])))
}

/// L1: swap two local variable declaration statements. An involution.
pub fn apply_swap_locals(
    program: &Program,
    owner: usize,
    first: usize,
    second: usize,
) -> Result<Program, MutationError> {
    if first == second {
        return invalid("L1 needs two distinct declarations");
    }
    let mut result = program.clone();
    let body = owned_body_mut(&mut result, owner)?;
    let prefix = body.local_decl_prefix_len();
    if first >= prefix || second >= prefix {
        return invalid(format!(
            "L1 indices ({first},{second}) outside the local declaration prefix of length {prefix}"
        ));
    }
    body.statements.swap(first, second);
    Ok(result)
}

/// L2: minimally split a multi-variable local declaration — the first
/// variable keeps the statement, the rest move to a new one right after.
/// Repeated application flattens completely.
pub fn apply_split_locals(
    program: &Program,
    owner: usize,
    stmt: usize,
) -> Result<Program, MutationError> {
    let mut result = program.clone();
    let body = owned_body_mut(&mut result, owner)?;
    let Some(Statement::LocalVarDecl { names, ty }) = body.statements.get_mut(stmt) else {
        return invalid(format!("L2 statement {stmt} is not a local variable declaration"));
    };
    if names.len() < 2 {
        return invalid("L2 needs a declaration of at least two variables");
    }
    let rest = names.split_off(1);
    let ty = ty.clone();
    body.statements.insert(stmt + 1, Statement::LocalVarDecl { names: rest, ty });
    Ok(result)
}

fn owned_body_mut(program: &mut Program, owner: usize) -> Result<&mut Block, MutationError> {
    let count = program.declarations.len();
    let Some(decl) = program.declarations.get_mut(owner) else {
        return invalid(format!("declaration index {owner} out of range ({count} declarations)"));
    };
    decl_body_mut(decl)
        .ok_or_else(|| MutationError::InvalidSite(format!("declaration {owner} has no body")))
}

/// L4/L5: join two requires (resp. ensures) clauses into one conjunctive
/// clause at the earlier position. Free or attributed clauses are never
/// joined.
pub fn apply_join_clauses(
    program: &Program,
    procedure: &str,
    kind: ClauseKind,
    first: usize,
    second: usize,
) -> Result<Program, MutationError> {
    if first == second {
        return invalid("clause join needs two distinct clauses");
    }
    let (lo, hi) = if first < second { (first, second) } else { (second, first) };
    let mut result = program.clone();
    let proc_decl = find_procedure_mut(&mut result, procedure)?;
    let clauses = match kind {
        ClauseKind::Requires => &mut proc_decl.spec.requires,
        ClauseKind::Ensures => &mut proc_decl.spec.ensures,
        _ => return invalid("clause join applies to requires/ensures only"),
    };
    if hi >= clauses.len() {
        return invalid(format!("clause index {hi} out of range ({} clauses)", clauses.len()));
    }
    if !clauses[lo].is_mutable_site() || !clauses[hi].is_mutable_site() {
        return invalid("free or attributed clauses are not mutation sites");
    }
    let removed = clauses.remove(hi);
    clauses[lo].expr = Expression::and(clauses[lo].expr.clone(), removed.expr);
    Ok(result)
}

fn find_procedure_mut<'p>(
    program: &'p mut Program,
    name: &str,
) -> Result<&'p mut ProcedureDecl, MutationError> {
    for decl in &mut program.declarations {
        if let Declaration::Procedure(p) = decl {
            if p.name == name {
                return Ok(p);
            }
        }
    }
    invalid(format!("no procedure named `{name}`"))
}

/// L6: swap two same-kind specification clauses, or two adjacent
/// unattributed assert statements.
pub fn apply_swap_clauses(
    program: &Program,
    elem: &NodePath,
    kind: ClauseKind,
    first: usize,
    second: usize,
) -> Result<Program, MutationError> {
    if first == second {
        return invalid("L6 needs two distinct clauses");
    }
    let mut result = program.clone();
    match kind {
        ClauseKind::Requires | ClauseKind::Ensures => {
            if !elem.steps.is_empty() {
                return invalid("requires/ensures sites address a procedure declaration");
            }
            let count = result.declarations.len();
            let Some(Declaration::Procedure(p)) = result.declarations.get_mut(elem.decl) else {
                return invalid(format!(
                    "declaration {} of {count} is not a procedure",
                    elem.decl
                ));
            };
            let clauses = if kind == ClauseKind::Requires {
                &mut p.spec.requires
            } else {
                &mut p.spec.ensures
            };
            swap_spec_clauses(clauses, first, second)?;
        }
        ClauseKind::Invariant => {
            let CursorMut::Stmt(Statement::While(w)) = walk_path_mut(&mut result, elem)? else {
                return invalid(format!("path `{elem}` does not address a while loop"));
            };
            swap_spec_clauses(&mut w.invariants, first, second)?;
        }
        ClauseKind::Assert => {
            if second != first + 1 {
                return invalid("assert swaps require adjacent statements");
            }
            let block = resolve_block_mut(&mut result, elem)?;
            if second >= block.statements.len() {
                return invalid(format!("statement index {second} out of range"));
            }
            let adjacent = (&block.statements[first], &block.statements[second]);
            match adjacent {
                (
                    Statement::Assert { attributes: a, .. },
                    Statement::Assert { attributes: b, .. },
                ) if a.is_empty() && b.is_empty() => {}
                _ => return invalid("both statements must be unattributed asserts"),
            }
            block.statements.swap(first, second);
        }
    }
    Ok(result)
}

fn swap_spec_clauses(
    clauses: &mut [SpecClause],
    first: usize,
    second: usize,
) -> Result<(), MutationError> {
    if first >= clauses.len() || second >= clauses.len() {
        return invalid(format!(
            "clause indices ({first},{second}) out of range ({} clauses)",
            clauses.len()
        ));
    }
    if !clauses[first].is_mutable_site() || !clauses[second].is_mutable_site() {
        return invalid("free or attributed clauses are not mutation sites");
    }
    clauses.swap(first, second);
    Ok(())
}

/// L8: complement an if condition and switch its branches. Only ifs with an
/// explicit else are sites; the negation stays syntactic (`!(c)`).
pub fn apply_complement_if(program: &Program, path: &NodePath) -> Result<Program, MutationError> {
    let mut result = program.clone();
    let CursorMut::Stmt(Statement::If(if_stmt)) = walk_path_mut(&mut result, path)? else {
        return invalid(format!("path `{path}` does not address an if statement"));
    };
    let Some(else_block) = if_stmt.else_branch.take() else {
        return invalid("L8 applies only to ifs with an explicit else");
    };
    let old_then = std::mem::replace(&mut if_stmt.then_branch, else_block);
    if_stmt.else_branch = Some(old_then);
    if_stmt.condition = Expression::not(std::mem::replace(
        &mut if_stmt.condition,
        Expression::BoolLit(false),
    ));
    Ok(result)
}

/// G1: insert a `true` clause (requires/ensures/invariant) or an
/// `assert true;` statement at the given position.
pub fn apply_insert_true(
    program: &Program,
    elem: &NodePath,
    kind: ClauseKind,
    pos: usize,
) -> Result<Program, MutationError> {
    let mut result = program.clone();
    let true_clause = SpecClause::plain(Expression::BoolLit(true));
    match kind {
        ClauseKind::Requires | ClauseKind::Ensures => {
            if !elem.steps.is_empty() {
                return invalid("requires/ensures sites address a procedure declaration");
            }
            let count = result.declarations.len();
            let Some(Declaration::Procedure(p)) = result.declarations.get_mut(elem.decl) else {
                return invalid(format!(
                    "declaration {} of {count} is not a procedure",
                    elem.decl
                ));
            };
            let clauses = if kind == ClauseKind::Requires {
                &mut p.spec.requires
            } else {
                &mut p.spec.ensures
            };
            if pos > clauses.len() {
                return invalid(format!("insert position {pos} out of range"));
            }
            clauses.insert(pos, true_clause);
        }
        ClauseKind::Invariant => {
            let CursorMut::Stmt(Statement::While(w)) = walk_path_mut(&mut result, elem)? else {
                return invalid(format!("path `{elem}` does not address a while loop"));
            };
            if pos > w.invariants.len() {
                return invalid(format!("insert position {pos} out of range"));
            }
            w.invariants.insert(pos, true_clause);
        }
        ClauseKind::Assert => {
            let is_root = elem.steps.is_empty();
            let block = resolve_block_mut(&mut result, elem)?;
            let lower = if is_root { block.local_decl_prefix_len() } else { 0 };
            if pos < lower || pos > block.statements.len() {
                return invalid(format!(
                    "insert position {pos} outside the statement section ({lower}..={})",
                    block.statements.len()
                ));
            }
            block.statements.insert(
                pos,
                Statement::Assert { attributes: Vec::new(), expr: Expression::BoolLit(true) },
            );
        }
    }
    Ok(result)
}

/// Inverse of [`apply_insert_true`]: removes the clause or statement at
/// `pos`, which must be the literal `true` clause G1 inserts. Deleting an
/// inserted clause restores the original program (and its fingerprint).
pub fn remove_true_clause(
    program: &Program,
    elem: &NodePath,
    kind: ClauseKind,
    pos: usize,
) -> Result<Program, MutationError> {
    let mut result = program.clone();
    match kind {
        ClauseKind::Requires | ClauseKind::Ensures => {
            let Some(Declaration::Procedure(p)) = result.declarations.get_mut(elem.decl) else {
                return invalid(format!("declaration {} is not a procedure", elem.decl));
            };
            let clauses = if kind == ClauseKind::Requires {
                &mut p.spec.requires
            } else {
                &mut p.spec.ensures
            };
            if pos >= clauses.len() || clauses[pos].expr != Expression::BoolLit(true) {
                return invalid(format!("no inserted true clause at position {pos}"));
            }
            clauses.remove(pos);
        }
        ClauseKind::Invariant => {
            let CursorMut::Stmt(Statement::While(w)) = walk_path_mut(&mut result, elem)? else {
                return invalid(format!("path `{elem}` does not address a while loop"));
            };
            if pos >= w.invariants.len() || w.invariants[pos].expr != Expression::BoolLit(true) {
                return invalid(format!("no inserted true invariant at position {pos}"));
            }
            w.invariants.remove(pos);
        }
        ClauseKind::Assert => {
            let block = resolve_block_mut(&mut result, elem)?;
            match block.statements.get(pos) {
                Some(Statement::Assert { attributes, expr })
                    if attributes.is_empty() && *expr == Expression::BoolLit(true) => {}
                _ => return invalid(format!("no inserted `assert true;` at position {pos}")),
            }
            block.statements.remove(pos);
        }
    }
    Ok(result)
}

/// G2: remove one trigger annotation from a quantifier. Not
/// semantics-preserving in practice; callers gate it behind an explicit flag.
pub fn apply_remove_trigger(
    program: &Program,
    decl: usize,
    quantifier: usize,
    trigger: usize,
) -> Result<Program, MutationError> {
    let mut result = program.clone();
    let count = result.declarations.len();
    let Some(declaration) = result.declarations.get_mut(decl) else {
        return invalid(format!("declaration index {decl} out of range ({count} declarations)"));
    };
    let Some(quant) = nth_quantifier_mut(declaration, quantifier) else {
        return invalid(format!("declaration {decl} has no quantifier #{quantifier}"));
    };
    if trigger >= quant.triggers.len() {
        return invalid(format!(
            "trigger index {trigger} out of range ({} triggers)",
            quant.triggers.len()
        ));
    }
    quant.triggers.remove(trigger);
    Ok(result)
}

/// Total number of trigger annotations in the program. Used by shape checks.
pub fn total_trigger_count(program: &Program) -> usize {
    let mut count = 0usize;
    for decl in &program.declarations {
        for_each_expr_in_decl(decl, &mut |expr| {
            if let Expression::Quantifier(q) = expr {
                count += q.triggers.len();
            }
        });
    }
    count
}

/// Resolves the statement a path addresses (read-only). Exposed for tests
/// and shape checks.
pub fn statement_at<'p>(
    program: &'p Program,
    path: &NodePath,
) -> Result<&'p Statement, MutationError> {
    resolve_statement(program, path)
}

/// Resolves the block a path addresses (read-only).
pub fn block_at<'p>(program: &'p Program, path: &NodePath) -> Result<&'p Block, MutationError> {
    resolve_block(program, path)
}
