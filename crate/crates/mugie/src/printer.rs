//! Deterministic rendering of programs to concrete syntax.
//!
//! The printer is where normalization materializes: comments never survive
//! (only the optional lineage header is emitted), every procedure and
//! implementation signature carries an explicit `returns (...)` clause, and
//! spacing/indentation are canonical. Declaration order, clause order,
//! statement order, and trigger presence are preserved exactly.
//!
//! Compound operands are always parenthesized (`(i >= 0) && (i < n)`,
//! `!(x > 0)`), so reparsing is faithful independent of precedence.

use crate::ast::*;
use crate::genloop::MutantRecord;

const INDENT: &str = "  ";

/// Renders `program` to text. Reparsing the result yields a program equal to
/// `normalize(program)`; an empty program renders as empty text.
pub fn print(program: &Program) -> String {
    let chunks: Vec<String> = program.declarations.iter().map(print_declaration).collect();
    if chunks.is_empty() {
        String::new()
    } else {
        let mut out = chunks.join("\n\n");
        out.push('\n');
        out
    }
}

/// Renders `program` preceded by the single-line lineage header. The header
/// is a comment; parsers ignore it, and it is excluded from fingerprints.
pub fn print_with_lineage(program: &Program, record: &MutantRecord) -> String {
    format!("{}\n{}", record.header_line(), print(program))
}

fn print_declaration(decl: &Declaration) -> String {
    match decl {
        Declaration::Type(d) => {
            let mut s = String::from("type");
            push_attributes(&mut s, &d.attributes);
            s.push(' ');
            s.push_str(&d.name);
            if let Some(target) = &d.synonym {
                s.push_str(" = ");
                s.push_str(&print_type(target));
            }
            s.push(';');
            s
        }
        Declaration::Const(d) => {
            let mut s = String::from("const");
            push_attributes(&mut s, &d.attributes);
            if d.unique {
                s.push_str(" unique");
            }
            s.push(' ');
            s.push_str(&d.names.join(", "));
            s.push_str(": ");
            s.push_str(&print_type(&d.ty));
            s.push(';');
            s
        }
        Declaration::GlobalVar(d) => {
            let mut s = String::from("var");
            push_attributes(&mut s, &d.attributes);
            s.push(' ');
            s.push_str(&d.names.join(", "));
            s.push_str(": ");
            s.push_str(&print_type(&d.ty));
            s.push(';');
            s
        }
        Declaration::Function(d) => {
            let mut s = String::from("function");
            push_attributes(&mut s, &d.attributes);
            s.push(' ');
            s.push_str(&d.name);
            s.push('(');
            s.push_str(&d.params.iter().map(print_param).collect::<Vec<_>>().join(", "));
            s.push_str(") returns (");
            s.push_str(&print_param(&d.result));
            s.push(')');
            match &d.body {
                Some(body) => {
                    s.push_str(" { ");
                    s.push_str(&print_expr(body));
                    s.push_str(" }");
                }
                None => s.push(';'),
            }
            s
        }
        Declaration::Axiom(d) => {
            let mut s = String::from("axiom");
            push_attributes(&mut s, &d.attributes);
            s.push(' ');
            s.push_str(&print_expr(&d.expr));
            s.push(';');
            s
        }
        Declaration::Procedure(d) => {
            let mut s = String::from("procedure");
            push_attributes(&mut s, &d.attributes);
            s.push(' ');
            s.push_str(&d.name);
            s.push_str(&print_signature(&d.signature));
            if d.body.is_none() {
                s.push(';');
            }
            push_spec(&mut s, &d.spec);
            if let Some(body) = &d.body {
                s.push('\n');
                push_body_braces(&mut s, body, 0);
            }
            s
        }
        Declaration::Implementation(d) => {
            let mut s = String::from("implementation");
            push_attributes(&mut s, &d.attributes);
            s.push(' ');
            s.push_str(&d.name);
            s.push_str(&print_signature(&d.signature));
            s.push('\n');
            push_body_braces(&mut s, &d.body, 0);
            s
        }
    }
}

fn print_signature(sig: &Signature) -> String {
    let params = sig.params.iter().map(print_param).collect::<Vec<_>>().join(", ");
    let returns = sig.returns.iter().map(print_param).collect::<Vec<_>>().join(", ");
    format!("({params}) returns ({returns})")
}

fn print_param(param: &Param) -> String {
    match &param.name {
        Some(name) => format!("{}: {}", name, print_type(&param.ty)),
        None => print_type(&param.ty),
    }
}

fn push_spec(out: &mut String, spec: &Specification) {
    for clause in &spec.requires {
        out.push('\n');
        out.push_str(INDENT);
        out.push_str(&print_clause("requires", clause));
    }
    if !spec.modifies.is_empty() {
        out.push('\n');
        out.push_str(INDENT);
        out.push_str(&format!("modifies {};", spec.modifies.join(", ")));
    }
    for clause in &spec.ensures {
        out.push('\n');
        out.push_str(INDENT);
        out.push_str(&print_clause("ensures", clause));
    }
}

fn print_clause(keyword: &str, clause: &SpecClause) -> String {
    let mut s = String::new();
    if clause.free {
        s.push_str("free ");
    }
    s.push_str(keyword);
    push_attributes(&mut s, &clause.attributes);
    s.push(' ');
    s.push_str(&print_expr(&clause.expr));
    s.push(';');
    s
}

fn push_body_braces(out: &mut String, block: &Block, level: usize) {
    let pad = INDENT.repeat(level);
    out.push_str(&pad);
    out.push('{');
    for stmt in &block.statements {
        out.push('\n');
        push_statement(out, stmt, level + 1);
    }
    out.push('\n');
    out.push_str(&pad);
    out.push('}');
}

fn push_statement(out: &mut String, stmt: &Statement, level: usize) {
    let pad = INDENT.repeat(level);
    match stmt {
        Statement::LocalVarDecl { names, ty } => {
            out.push_str(&format!("{pad}var {}: {};", names.join(", "), print_type(ty)));
        }
        Statement::Assign { target, value } => {
            let mut lhs = target.name.clone();
            for group in &target.indices {
                lhs.push('[');
                lhs.push_str(&group.iter().map(print_expr).collect::<Vec<_>>().join(", "));
                lhs.push(']');
            }
            out.push_str(&format!("{pad}{lhs} := {};", print_expr(value)));
        }
        Statement::Assert { attributes, expr } => {
            let mut s = format!("{pad}assert");
            push_attributes(&mut s, attributes);
            s.push(' ');
            s.push_str(&print_expr(expr));
            s.push(';');
            out.push_str(&s);
        }
        Statement::Assume { attributes, expr } => {
            let mut s = format!("{pad}assume");
            push_attributes(&mut s, attributes);
            s.push(' ');
            s.push_str(&print_expr(expr));
            s.push(';');
            out.push_str(&s);
        }
        Statement::Havoc { names } => {
            out.push_str(&format!("{pad}havoc {};", names.join(", ")));
        }
        Statement::Call { lhs, callee, args } => {
            let args = args.iter().map(print_expr).collect::<Vec<_>>().join(", ");
            if lhs.is_empty() {
                out.push_str(&format!("{pad}call {callee}({args});"));
            } else {
                out.push_str(&format!("{pad}call {} := {callee}({args});", lhs.join(", ")));
            }
        }
        Statement::If(if_stmt) => {
            out.push_str(&pad);
            push_if(out, if_stmt, level);
        }
        Statement::While(w) => {
            out.push_str(&format!("{pad}while ({})", print_expr(&w.condition)));
            for inv in &w.invariants {
                out.push('\n');
                out.push_str(&pad);
                out.push_str(INDENT);
                out.push_str(&print_clause("invariant", inv));
            }
            out.push('\n');
            push_body_braces(out, &w.body, level);
        }
        Statement::Return => {
            out.push_str(&format!("{pad}return;"));
        }
        Statement::Block(block) => {
            push_body_braces(out, block, level);
        }
    }
}

fn push_if(out: &mut String, if_stmt: &IfStatement, level: usize) {
    let pad = INDENT.repeat(level);
    out.push_str(&format!("if ({}) {{", print_expr(&if_stmt.condition)));
    for stmt in &if_stmt.then_branch.statements {
        out.push('\n');
        push_statement(out, stmt, level + 1);
    }
    out.push('\n');
    out.push_str(&pad);
    out.push('}');
    if let Some(else_block) = &if_stmt.else_branch {
        // `else if` sugar when the else-block holds exactly one if.
        if let [Statement::If(nested)] = else_block.statements.as_slice() {
            out.push_str(" else ");
            push_if(out, nested, level);
        } else {
            out.push_str(" else {");
            for stmt in &else_block.statements {
                out.push('\n');
                push_statement(out, stmt, level + 1);
            }
            out.push('\n');
            out.push_str(&pad);
            out.push('}');
        }
    }
}

fn push_attributes(out: &mut String, attrs: &[Attribute]) {
    for attr in attrs {
        out.push_str(" {:");
        out.push_str(&attr.name);
        let args = attr
            .args
            .iter()
            .map(|arg| match arg {
                AttrArg::Str(s) => format!("\"{s}\""),
                AttrArg::Expr(e) => print_expr(e),
            })
            .collect::<Vec<_>>();
        if !args.is_empty() {
            out.push(' ');
            out.push_str(&args.join(", "));
        }
        out.push('}');
    }
}

pub fn print_type(ty: &Type) -> String {
    match ty {
        Type::Int => "int".to_string(),
        Type::Bool => "bool".to_string(),
        Type::Map { domain, range } => {
            let domain = domain.iter().map(print_type).collect::<Vec<_>>().join(", ");
            format!("[{domain}]{}", print_type(range))
        }
        Type::Named(name) => name.clone(),
    }
}

pub fn print_expr(expr: &Expression) -> String {
    match expr {
        Expression::IntLit(v) => v.to_string(),
        Expression::BoolLit(true) => "true".to_string(),
        Expression::BoolLit(false) => "false".to_string(),
        Expression::Ident(name) => name.clone(),
        Expression::MapSelect { map, indices } => {
            let indices = indices.iter().map(print_expr).collect::<Vec<_>>().join(", ");
            format!("{}[{indices}]", print_map_base(map))
        }
        Expression::MapUpdate { map, indices, value } => {
            let indices = indices.iter().map(print_expr).collect::<Vec<_>>().join(", ");
            format!("{}[{indices} := {}]", print_map_base(map), print_expr(value))
        }
        Expression::Unary { op, operand } => {
            let op_text = match op {
                UnaryOp::Not => "!",
                UnaryOp::Neg => "-",
            };
            let inner = print_expr(operand);
            if matches!(operand.as_ref(), Expression::Binary { .. } | Expression::Unary { .. }) {
                format!("{op_text}({inner})")
            } else {
                format!("{op_text}{inner}")
            }
        }
        Expression::Binary { op, left, right } => {
            format!("{} {} {}", print_operand(left), binary_op_text(*op), print_operand(right))
        }
        Expression::Quantifier(q) => {
            let binders = q
                .bound
                .iter()
                .map(|b| format!("{}: {}", b.name, print_type(&b.ty)))
                .collect::<Vec<_>>()
                .join(", ");
            let keyword = match q.kind {
                QuantKind::Forall => "forall",
                QuantKind::Exists => "exists",
            };
            let mut s = format!("({keyword} {binders} ::");
            let mut hints = String::new();
            push_attributes(&mut hints, &q.attributes);
            s.push_str(&hints);
            for trigger in &q.triggers {
                let terms = trigger.terms.iter().map(print_expr).collect::<Vec<_>>().join(", ");
                s.push_str(&format!(" {{{terms}}}"));
            }
            s.push(' ');
            s.push_str(&print_expr(&q.body));
            s.push(')');
            s
        }
        Expression::FunctionApp { name, args } => {
            let args = args.iter().map(print_expr).collect::<Vec<_>>().join(", ");
            format!("{name}({args})")
        }
        Expression::Old(inner) => format!("old({})", print_expr(inner)),
    }
}

/// Binary operands that are themselves binary get explicit parentheses.
fn print_operand(expr: &Expression) -> String {
    let inner = print_expr(expr);
    if matches!(expr, Expression::Binary { .. }) {
        format!("({inner})")
    } else {
        inner
    }
}

/// Select/update bases that are compound get explicit parentheses.
fn print_map_base(expr: &Expression) -> String {
    let inner = print_expr(expr);
    if matches!(expr, Expression::Binary { .. } | Expression::Unary { .. }) {
        format!("({inner})")
    } else {
        inner
    }
}

fn binary_op_text(op: BinaryOp) -> &'static str {
    match op {
        BinaryOp::Iff => "<==>",
        BinaryOp::Implies => "==>",
        BinaryOp::Or => "||",
        BinaryOp::And => "&&",
        BinaryOp::Eq => "==",
        BinaryOp::Neq => "!=",
        BinaryOp::Lt => "<",
        BinaryOp::Le => "<=",
        BinaryOp::Gt => ">",
        BinaryOp::Ge => ">=",
        BinaryOp::Add => "+",
        BinaryOp::Sub => "-",
        BinaryOp::Mul => "*",
        BinaryOp::Div => "div",
        BinaryOp::Mod => "mod",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_or_panic;

    #[test]
    fn empty_program_prints_empty_text() {
        assert_eq!(print(&Program::default()), "");
    }

    #[test]
    fn declaration_only_procedure_gets_explicit_returns() {
        let program = parse_or_panic("procedure q(i: int);", "q.bpl");
        let text = print(&program);
        assert_eq!(text, "procedure q(i: int) returns ();\n");
    }

    #[test]
    fn printing_is_idempotent_through_reparse() {
        let src = "\
function h(int) returns (int);
axiom (forall x, y: int :: x > y ==> h(x) > y);
const a: [int] int;
axiom (forall i: int :: 0 <= i ==> a[i] < a[i + 1]);
procedure p(i: int) returns (o: int)
  requires i >= 0; ensures o > a[i]; { o := h(a[i + 1]); }
";
        let program = parse_or_panic(src, "listing1.bpl");
        let text = print(&program);
        let reparsed = parse_or_panic(&text, "printed.bpl");
        assert_eq!(reparsed, program);
        assert_eq!(print(&reparsed), text);
        assert_eq!(reparsed.declarations.len(), 5);
    }

    #[test]
    fn joined_conjunction_prints_fully_parenthesized() {
        let program = parse_or_panic("axiom (1 >= 0) && (1 < 2);", "conj.bpl");
        let text = print(&program);
        assert_eq!(text, "axiom (1 >= 0) && (1 < 2);\n");
    }

    #[test]
    fn negation_of_compound_is_parenthesized() {
        let e = Expression::not(parse_expr_of("axiom x > 0;"));
        assert_eq!(print_expr(&e), "!(x > 0)");
        let double = Expression::not(e);
        assert_eq!(print_expr(&double), "!(!(x > 0))");
    }

    fn parse_expr_of(src: &str) -> Expression {
        let program = parse_or_panic(src, "expr.bpl");
        match program.declarations.into_iter().next().unwrap() {
            Declaration::Axiom(a) => a.expr,
            _ => panic!(),
        }
    }

    #[test]
    fn triggers_and_attributes_round_trip() {
        let src = "axiom (forall x: int :: {:weight 5} {f(x)} {g(x), f(x)} f(x) > 0);\nfunction f(int) returns (int);\nfunction g(int) returns (int);";
        let program = parse_or_panic(src, "trig.bpl");
        let text = print(&program);
        assert!(text.contains("{:weight 5} {f(x)} {g(x), f(x)}"), "got: {text}");
        assert_eq!(parse_or_panic(&text, "re.bpl"), program);
    }

    #[test]
    fn while_and_if_render_and_round_trip() {
        let src = "\
procedure p(n: int) returns (r: int)
{
  var i: int;
  i := 0;
  r := 0;
  while (i < n)
    invariant i <= n;
    invariant r >= 0;
  {
    if (r > 10) {
      r := 0;
    } else if (r > 5) {
      r := 1;
    } else {
      r := r + 1;
    }
    i := i + 1;
  }
}
";
        let program = parse_or_panic(src, "loop.bpl");
        let text = print(&program);
        assert_eq!(parse_or_panic(&text, "re.bpl"), program);
        assert!(text.contains("} else if (r > 5) {"), "got: {text}");
    }
}
