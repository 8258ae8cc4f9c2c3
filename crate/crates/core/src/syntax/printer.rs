use super::Expr;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Top,
    Fun,
    Arg,
}

/// Renders an expression in the concrete syntax accepted by `parse_expr`.
pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write(e, Prec::Top, &mut out);
    out
}

fn write(e: &Expr, prec: Prec, out: &mut String) {
    let needs_parens = match e {
        Expr::Rec { .. } | Expr::Match(..) => prec > Prec::Top,
        Expr::App(..) => prec == Prec::Arg,
        _ => false,
    };
    if needs_parens {
        out.push('(');
    }
    match e {
        Expr::Int(n) => out.push_str(&n.to_string()),
        Expr::Var(x) => out.push_str(x),
        Expr::Err => out.push_str("err"),
        Expr::Ctor(c, args) => {
            out.push_str(c.name());
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write(a, Prec::Top, out);
                }
                out.push(')');
            }
        }
        Expr::App(f, a) => {
            write(f, Prec::Fun, out);
            out.push(' ');
            write(a, Prec::Arg, out);
        }
        Expr::Rec { fun, param, body } => {
            out.push_str(&format!("rec {fun}({param}) -> "));
            write(body, Prec::Top, out);
        }
        Expr::Match(scrutinee, arms) => {
            out.push_str("match ");
            write(scrutinee, Prec::Top, out);
            if arms.is_empty() {
                out.push_str(" {}");
            } else {
                out.push_str(" { ");
                for (i, arm) in arms.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" | ");
                    }
                    out.push_str(arm.ctor.name());
                    if !arm.binders.is_empty() {
                        out.push('(');
                        out.push_str(&arm.binders.join(", "));
                        out.push(')');
                    }
                    out.push_str(" -> ");
                    write(&arm.body, Prec::Top, out);
                }
                out.push_str(" }");
            }
        }
    }
    if needs_parens {
        out.push(')');
    }
}
