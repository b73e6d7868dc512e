use std::collections::HashMap;

use super::{BinOp, Expr, Func, Node};

/// Symbolic partial derivative. Iterative post-order over the DAG so that
/// deep closure expressions do not exhaust the stack; shared subtrees are
/// differentiated once.
pub(super) fn diff(root: &Expr, index: usize) -> Expr {
    let mut memo: HashMap<usize, Expr> = HashMap::new();
    let mut stack: Vec<(Expr, bool)> = vec![(root.clone(), false)];
    while let Some((e, expanded)) = stack.pop() {
        if memo.contains_key(&e.ptr()) {
            continue;
        }
        if !expanded {
            stack.push((e.clone(), true));
            match e.node() {
                Node::Const(_) | Node::Var(_) => {}
                Node::Neg(a) | Node::Func(_, a) | Node::Pow(a, _) => stack.push((a.clone(), false)),
                Node::Binary(_, a, b) => {
                    stack.push((a.clone(), false));
                    stack.push((b.clone(), false));
                }
            }
            continue;
        }
        let d = |x: &Expr| memo[&x.ptr()].clone();
        let de = match e.node() {
            Node::Const(_) => Expr::zero(),
            Node::Var(j) => {
                if *j == index {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Neg(a) => -d(a),
            Node::Func(f, a) => {
                let da = d(a);
                if da.is_zero() {
                    Expr::zero()
                } else {
                    match f {
                        Func::Sin => a.cos() * da,
                        Func::Cos => -(a.sin() * da),
                        Func::Tan => da / a.cos().powf(2.0),
                        Func::Exp => &e * &da,
                        Func::Log => da / a,
                        Func::Sqrt => da / (Expr::constant(2.0) * &e),
                    }
                }
            }
            Node::Pow(a, c) => {
                let da = d(a);
                if da.is_zero() {
                    Expr::zero()
                } else {
                    Expr::constant(*c) * a.powf(c - 1.0) * da
                }
            }
            Node::Binary(op, a, b) => {
                let (da, db) = (d(a), d(b));
                match op {
                    BinOp::Add => da + db,
                    BinOp::Sub => da - db,
                    BinOp::Mul => da * b + a * db,
                    BinOp::Div => {
                        if db.is_zero() {
                            da / b
                        } else {
                            (da * b - a * db) / b.powf(2.0)
                        }
                    }
                }
            }
        };
        memo.insert(e.ptr(), de);
    }
    memo.remove(&root.ptr()).expect("root differentiated")
}

#[cfg(test)]
mod tests {
    use crate::expr::{parse, Expr};

    fn central_fd(e: &Expr, i: usize, p: &[f64], h: f64) -> f64 {
        let mut a = p.to_vec();
        let mut b = p.to_vec();
        a[i] += h;
        b[i] -= h;
        (e.eval(&a).unwrap() - e.eval(&b).unwrap()) / (2.0 * h)
    }

    #[test]
    fn product_rule_example() {
        let e = parse("x1*x2", &["x1", "x2"]).unwrap();
        assert_eq!(e.diff(0).to_string(), "x2");
    }

    #[test]
    fn sine_at_zero() {
        let e = parse("sin(x1)", &["x1"]).unwrap();
        assert_eq!(e.diff(0).eval(&[0.0]).unwrap(), 1.0);
    }

    #[test]
    fn cube_matches_finite_differences() {
        let e = parse("x1^3", &["x1"]).unwrap();
        let exact = e.diff(0).eval(&[2.0]).unwrap();
        assert_eq!(exact, 12.0);
        let fd = central_fd(&e, 0, &[2.0], 1e-5);
        assert!(((exact - fd) / exact).abs() < 1e-6);
    }

    #[test]
    fn exponential_at_one() {
        let e = parse("exp(x1)", &["x1"]).unwrap();
        assert!((e.diff(0).eval(&[1.0]).unwrap() - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn constants_differentiate_to_literal_zero() {
        assert!(Expr::constant(3.5).diff(0).is_zero());
        assert!(parse("sin(x2)", &["x1", "x2"]).unwrap().diff(0).is_zero());
    }

    #[test]
    fn every_function_against_fd() {
        let names = ["x1", "x2"];
        let p = [0.7, 1.3];
        for text in [
            "tan(x1*x2)",
            "log(x1 + x2^2)",
            "sqrt(x1*x2)",
            "cos(x1)/x2",
            "exp(-x1)*x2^-1.5",
            "(x1 - x2)/(x1 + x2)",
        ] {
            let e = parse(text, &names).unwrap();
            for i in 0..2 {
                let exact = e.diff(i).eval(&p).unwrap();
                let fd = central_fd(&e, i, &p, 1e-6);
                assert!((exact - fd).abs() / (1.0 + exact.abs()) < 1e-7, "{text} d{i}: {exact} vs {fd}");
            }
        }
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        let mut e = Expr::var(0);
        for _ in 0..5000 {
            e = &e * 0.999 + 0.001;
        }
        let d = e.diff(0);
        let v = d.eval(&[0.5]).unwrap();
        assert!((v - 0.999f64.powi(5000)).abs() < 1e-12);
    }
}
