//! Abstract syntax of the supported IVL subset.
//!
//! A [`Program`] is an ordered list of top-level declarations. Order is
//! significant for serialization (and for the structural mutation operators),
//! but name resolution treats the whole unit as one scope, so any permutation
//! of a well-formed program is still well-formed.
//!
//! The AST carries no source locations and no comments: two programs that
//! print identically are equal, which is what the fingerprint machinery
//! relies on. Attributes (`{:name ...}`) are kept as opaque payloads and are
//! never mutated.

use num_bigint::BigInt;
use sha2::{Digest, Sha256};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    pub declarations: Vec<Declaration>,
}

impl Program {
    pub fn new(declarations: Vec<Declaration>) -> Self {
        Program { declarations }
    }

    /// Concatenates two compilation units, in order. Used to treat a split
    /// (two-file) mutant as one unit for typechecking and further mutation.
    pub fn concat(&self, other: &Program) -> Program {
        let mut declarations = self.declarations.clone();
        declarations.extend(other.declarations.iter().cloned());
        Program { declarations }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Declaration {
    Type(TypeDecl),
    Const(ConstDecl),
    GlobalVar(GlobalVarDecl),
    Function(FunctionDecl),
    Axiom(AxiomDecl),
    Procedure(ProcedureDecl),
    Implementation(ImplementationDecl),
}

impl Declaration {
    /// Short label used in diagnostics, e.g. `procedure p` or `axiom #3`.
    pub fn describe(&self, index: usize) -> String {
        match self {
            Declaration::Type(d) => format!("type {}", d.name),
            Declaration::Const(d) => format!("const {}", d.names.join(", ")),
            Declaration::GlobalVar(d) => format!("var {}", d.names.join(", ")),
            Declaration::Function(d) => format!("function {}", d.name),
            Declaration::Axiom(_) => format!("axiom #{index}"),
            Declaration::Procedure(d) => format!("procedure {}", d.name),
            Declaration::Implementation(d) => format!("implementation {}", d.name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecl {
    pub attributes: Vec<Attribute>,
    pub name: String,
    /// `type T = U;` — the synonym target, treated opaquely.
    pub synonym: Option<Type>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstDecl {
    pub attributes: Vec<Attribute>,
    pub unique: bool,
    pub names: Vec<String>,
    pub ty: Type,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalVarDecl {
    pub attributes: Vec<Attribute>,
    pub names: Vec<String>,
    pub ty: Type,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDecl {
    pub attributes: Vec<Attribute>,
    pub name: String,
    pub params: Vec<Param>,
    pub result: Param,
    pub body: Option<Expression>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomDecl {
    pub attributes: Vec<Attribute>,
    pub expr: Expression,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcedureDecl {
    pub attributes: Vec<Attribute>,
    pub name: String,
    pub signature: Signature,
    pub spec: Specification,
    /// An inline body makes this a procedure *definition*; `None` is a pure
    /// declaration (the body may live in a separate implementation).
    pub body: Option<Block>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplementationDecl {
    pub attributes: Vec<Attribute>,
    pub name: String,
    pub signature: Signature,
    pub body: Block,
}

/// A formal parameter. Function parameters and results may be unnamed
/// (`function h(int) returns (int)`); procedure parameters are always named.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: Option<String>,
    pub ty: Type,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    pub params: Vec<Param>,
    /// Out-parameters. An absent `returns` clause in the source parses to an
    /// empty list; the printer always renders the clause explicitly.
    pub returns: Vec<Param>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Specification {
    pub requires: Vec<SpecClause>,
    pub ensures: Vec<SpecClause>,
    pub modifies: Vec<String>,
}

/// One `requires`/`ensures`/`invariant` clause. Clause lists are implicitly
/// conjoined; their order is serialization order only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecClause {
    pub free: bool,
    pub attributes: Vec<Attribute>,
    pub expr: Expression,
}

impl SpecClause {
    pub fn plain(expr: Expression) -> Self {
        SpecClause { free: false, attributes: Vec::new(), expr }
    }

    /// Free or attributed clauses are carried through but never mutated.
    pub fn is_mutable_site(&self) -> bool {
        !self.free && self.attributes.is_empty()
    }
}

/// The clause kinds addressable by clause-level mutation sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClauseKind {
    Requires,
    Ensures,
    Invariant,
    Assert,
}

impl fmt::Display for ClauseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClauseKind::Requires => "requires",
            ClauseKind::Ensures => "ensures",
            ClauseKind::Invariant => "invariant",
            ClauseKind::Assert => "assert",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for ClauseKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "requires" => Ok(ClauseKind::Requires),
            "ensures" => Ok(ClauseKind::Ensures),
            "invariant" => Ok(ClauseKind::Invariant),
            "assert" => Ok(ClauseKind::Assert),
            _ => Err(format!("unknown clause kind `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Block {
    pub statements: Vec<Statement>,
}

impl Block {
    pub fn new(statements: Vec<Statement>) -> Self {
        Block { statements }
    }

    /// Number of leading `var` declarations. In a procedure or implementation
    /// body, local declarations only appear in this prefix.
    pub fn local_decl_prefix_len(&self) -> usize {
        self.statements
            .iter()
            .take_while(|s| matches!(s, Statement::LocalVarDecl { .. }))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    LocalVarDecl {
        names: Vec<String>,
        ty: Type,
    },
    Assign {
        target: AssignTarget,
        value: Expression,
    },
    Assert {
        attributes: Vec<Attribute>,
        expr: Expression,
    },
    Assume {
        attributes: Vec<Attribute>,
        expr: Expression,
    },
    Havoc {
        names: Vec<String>,
    },
    Call {
        lhs: Vec<String>,
        callee: String,
        args: Vec<Expression>,
    },
    If(IfStatement),
    While(WhileStatement),
    Return,
    Block(Block),
}

/// Assignment target: a variable with zero or more map-index applications,
/// e.g. `a[i][j] := v`. Each element of `indices` is one bracket group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignTarget {
    pub name: String,
    pub indices: Vec<Vec<Expression>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IfStatement {
    pub condition: Expression,
    pub then_branch: Block,
    pub else_branch: Option<Block>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhileStatement {
    pub condition: Expression,
    pub invariants: Vec<SpecClause>,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expression {
    IntLit(BigInt),
    BoolLit(bool),
    Ident(String),
    MapSelect {
        map: Box<Expression>,
        indices: Vec<Expression>,
    },
    MapUpdate {
        map: Box<Expression>,
        indices: Vec<Expression>,
        value: Box<Expression>,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expression>,
    },
    Binary {
        op: BinaryOp,
        left: Box<Expression>,
        right: Box<Expression>,
    },
    Quantifier(Box<QuantifierExpr>),
    FunctionApp {
        name: String,
        args: Vec<Expression>,
    },
    Old(Box<Expression>),
}

impl Expression {
    pub fn int(v: i64) -> Self {
        Expression::IntLit(BigInt::from(v))
    }

    pub fn ident(name: impl Into<String>) -> Self {
        Expression::Ident(name.into())
    }

    pub fn and(left: Expression, right: Expression) -> Self {
        Expression::Binary { op: BinaryOp::And, left: Box::new(left), right: Box::new(right) }
    }

    /// Syntactic negation. Double negations are kept as-is; only the printer
    /// ever shows them away, never the AST.
    #[allow(clippy::should_implement_trait)]
    pub fn not(operand: Expression) -> Self {
        Expression::Unary { op: UnaryOp::Not, operand: Box::new(operand) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Iff,
    Implies,
    Or,
    And,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantKind {
    Forall,
    Exists,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantifierExpr {
    pub kind: QuantKind,
    pub bound: Vec<BoundVar>,
    pub attributes: Vec<Attribute>,
    pub triggers: Vec<Trigger>,
    pub body: Expression,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundVar {
    pub name: String,
    pub ty: Type,
}

/// A quantifier-instantiation hint: `{ t1, ..., tn }` with n >= 1. Every term
/// must mention at least one bound variable of its quantifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trigger {
    pub terms: Vec<Expression>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Type {
    Int,
    Bool,
    Map {
        domain: Vec<Type>,
        range: Box<Type>,
    },
    Named(String),
}

/// An opaque `{:name arg, ...}` payload. Attributes are preserved verbatim
/// through parse/print and are never mutation sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub args: Vec<AttrArg>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttrArg {
    Str(String),
    Expr(Expression),
}

/// A collision-resistant digest of a program's normalized printed text.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fingerprint(pub [u8; 32]);

impl Fingerprint {
    pub fn of_bytes(bytes: &[u8]) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(bytes);
        Fingerprint(hasher.finalize().into())
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fingerprint({self})")
    }
}

/// Returns the normalization of a program: comments dropped, every signature
/// carrying an explicit (possibly empty) `returns` clause, nothing else
/// changed. Idempotent.
///
/// Both normalizing changes are already canonical in this AST — comments are
/// discarded at parse time and an absent `returns` clause parses to an empty
/// out-parameter list — so the normal form materializes when the program is
/// printed. This function exists as the identity that pins that contract.
pub fn normalize(program: &Program) -> Program {
    program.clone()
}

/// Hash of the normalized pretty-printed text. Equal fingerprints hold
/// exactly when the normalized texts are equal; the lineage header is never
/// part of the input.
pub fn program_fingerprint(program: &Program) -> Fingerprint {
    Fingerprint::of_bytes(crate::printer::print(program).as_bytes())
}
