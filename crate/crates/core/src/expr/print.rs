//! Canonical text form. Parentheses are emitted only where the grammar
//! needs them, so printing then parsing rebuilds the same tree.

use std::fmt::{self, Write};

use super::{BinOp, Expr, Node};

pub(super) struct Named<'a> {
    pub expr: &'a Expr,
    pub names: Option<&'a [String]>,
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self.expr, self.names)
    }
}

// Binding levels: 1 add/sub, 2 mul/div, 3 unary minus, 4 pow, 5 atom.
fn level(e: &Expr) -> u8 {
    match e.node() {
        Node::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
        Node::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
        Node::Neg(_) => 3,
        Node::Const(c) if c.is_sign_negative() => 3,
        Node::Pow(..) => 4,
        _ => 5,
    }
}

pub(crate) fn format_number(c: f64) -> String {
    let a = c.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{c:e}")
    } else {
        format!("{c}")
    }
}

fn write_expr<W: Write>(w: &mut W, e: &Expr, names: Option<&[String]>) -> fmt::Result {
    let child = |w: &mut W, e: &Expr, min: u8| -> fmt::Result {
        if level(e) < min {
            w.write_char('(')?;
            write_expr(w, e, names)?;
            w.write_char(')')
        } else {
            write_expr(w, e, names)
        }
    };
    match e.node() {
        Node::Const(c) => w.write_str(&format_number(*c)),
        Node::Var(i) => match names.and_then(|n| n.get(*i)) {
            Some(name) => w.write_str(name),
            None => write!(w, "x{}", i + 1),
        },
        Node::Neg(a) => {
            w.write_char('-')?;
            child(w, a, 4)
        }
        Node::Func(func, a) => {
            w.write_str(func.name())?;
            w.write_char('(')?;
            write_expr(w, a, names)?;
            w.write_char(')')
        }
        Node::Pow(a, c) => {
            child(w, a, 5)?;
            w.write_char('^')?;
            w.write_str(&format_number(*c))
        }
        Node::Binary(op, a, b) => {
            let (sym, lmin, rmin) = match op {
                BinOp::Add => (" + ", 1, 2),
                BinOp::Sub => (" - ", 1, 2),
                BinOp::Mul => ("*", 2, 3),
                BinOp::Div => ("/", 2, 3),
            };
            child(w, a, lmin)?;
            w.write_str(sym)?;
            child(w, b, rmin)
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::parse;

    fn roundtrip(text: &str) -> String {
        let names = ["x1", "x2", "x3"];
        let e = parse(text, &names).unwrap();
        let printed = e.to_string();
        let again = parse(&printed, &names).unwrap();
        assert_eq!(e, again, "{text} -> {printed}");
        printed
    }

    #[test]
    fn minimal_parentheses() {
        assert_eq!(roundtrip("x1*x2 + sin(x1)"), "x1*x2 + sin(x1)");
        assert_eq!(roundtrip("(x1 + x2)*x3"), "(x1 + x2)*x3");
        assert_eq!(roundtrip("x1 - (x2 - x3)"), "x1 - (x2 - x3)");
        assert_eq!(roundtrip("x1/(x2*x3)"), "x1/(x2*x3)");
        assert_eq!(roundtrip("-(x1*x2)"), "-(x1*x2)");
        assert_eq!(roundtrip("-x1*x2"), "-x1*x2");
        assert_eq!(roundtrip("(-x1)^2"), "(-x1)^2");
        assert_eq!(roundtrip("-(-x1)"), "-(-x1)");
        assert_eq!(roundtrip("x1 + -2"), "x1 + -2");
        assert_eq!(roundtrip("x1^-0.5"), "x1^-0.5");
    }

    #[test]
    fn numbers_roundtrip_exactly() {
        assert_eq!(roundtrip("0.1 + x1 + 1e-9"), "0.1 + x1 + 1e-9");
        assert_eq!(roundtrip("0.30000000000000004*x1"), "0.30000000000000004*x1");
        assert_eq!(roundtrip("2e20*x2"), "2e20*x2");
    }

    #[test]
    fn custom_names() {
        let names = vec!["theta".to_string(), "r".to_string()];
        let e = parse("r^2*cos(theta)", &names).unwrap();
        assert_eq!(e.display(&names).to_string(), "r^2*cos(theta)");
        assert_eq!(e.to_string(), "x2^2*cos(x1)");
    }
}
