use std::collections::HashMap;

use super::{BinOp, Expr, ExprError, Func, Node};

#[derive(Debug, Clone)]
enum Op {
    Const(f64),
    Var(usize),
    Neg(usize),
    Func(Func, usize),
    Pow(usize, f64),
    Binary(BinOp, usize, usize),
}

/// A set of expressions compiled into a flat instruction list.
///
/// Shared subtrees (by pointer) are computed once, which matters for the
/// DAG-shaped derivatives produced by bracket closures. Compilation and
/// evaluation are both iterative.
#[derive(Debug, Clone)]
pub struct Tape {
    ops: Vec<Op>,
    nodes: Vec<Expr>,
    outputs: Vec<usize>,
    max_var: Option<usize>,
}

impl Tape {
    pub fn new(exprs: &[Expr]) -> Tape {
        let mut slot: HashMap<usize, usize> = HashMap::new();
        let mut ops = Vec::new();
        let mut nodes = Vec::new();
        let mut max_var: Option<usize> = None;
        let mut outputs = Vec::with_capacity(exprs.len());
        for root in exprs {
            let mut stack: Vec<(Expr, bool)> = vec![(root.clone(), false)];
            while let Some((e, expanded)) = stack.pop() {
                if slot.contains_key(&e.ptr()) {
                    continue;
                }
                if !expanded {
                    stack.push((e.clone(), true));
                    match e.node() {
                        Node::Const(_) | Node::Var(_) => {}
                        Node::Neg(a) | Node::Func(_, a) | Node::Pow(a, _) => stack.push((a.clone(), false)),
                        Node::Binary(_, a, b) => {
                            stack.push((b.clone(), false));
                            stack.push((a.clone(), false));
                        }
                    }
                    continue;
                }
                let s = |x: &Expr| slot[&x.ptr()];
                let op = match e.node() {
                    Node::Const(c) => Op::Const(*c),
                    Node::Var(i) => {
                        max_var = Some(max_var.map_or(*i, |m| m.max(*i)));
                        Op::Var(*i)
                    }
                    Node::Neg(a) => Op::Neg(s(a)),
                    Node::Func(f, a) => Op::Func(*f, s(a)),
                    Node::Pow(a, c) => Op::Pow(s(a), *c),
                    Node::Binary(op, a, b) => Op::Binary(*op, s(a), s(b)),
                };
                slot.insert(e.ptr(), ops.len());
                ops.push(op);
                nodes.push(e);
            }
            outputs.push(slot[&root.ptr()]);
        }
        Tape { ops, nodes, outputs, max_var }
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    fn domain(&self, k: usize, reason: &'static str) -> ExprError {
        let mut node = self.nodes[k].to_string();
        if node.len() > 120 {
            let mut cut = 117;
            while !node.is_char_boundary(cut) {
                cut -= 1;
            }
            node.truncate(cut);
            node.push_str("...");
        }
        ExprError::Domain { node, reason }
    }

    /// Evaluate every output at `point`.
    pub fn eval(&self, point: &[f64]) -> Result<Vec<f64>, ExprError> {
        let mut out = vec![0.0; self.outputs.len()];
        self.eval_into(point, &mut out)?;
        Ok(out)
    }

    pub fn eval_into(&self, point: &[f64], out: &mut [f64]) -> Result<(), ExprError> {
        if let Some(m) = self.max_var {
            if m >= point.len() {
                return Err(ExprError::PointDimension { got: point.len(), index: m });
            }
        }
        let mut v = vec![0.0; self.ops.len()];
        for (k, op) in self.ops.iter().enumerate() {
            let r = match *op {
                Op::Const(c) => c,
                Op::Var(i) => point[i],
                Op::Neg(a) => -v[a],
                Op::Func(f, a) => {
                    let x = v[a];
                    match f {
                        Func::Log if x <= 0.0 => return Err(self.domain(k, "log of a non-positive value")),
                        Func::Sqrt if x < 0.0 => return Err(self.domain(k, "sqrt of a negative value")),
                        _ => f.apply(x),
                    }
                }
                Op::Pow(a, c) => v[a].powf(c),
                Op::Binary(op, a, b) => {
                    let (x, y) = (v[a], v[b]);
                    match op {
                        BinOp::Add => x + y,
                        BinOp::Sub => x - y,
                        BinOp::Mul => x * y,
                        BinOp::Div => {
                            if y == 0.0 {
                                return Err(self.domain(k, "division by zero"));
                            }
                            x / y
                        }
                    }
                }
            };
            if !r.is_finite() {
                return Err(self.domain(k, "non-finite result"));
            }
            v[k] = r;
        }
        for (o, &s) in out.iter_mut().zip(&self.outputs) {
            *o = v[s];
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn simple_sum() {
        let e = parse("x1+x2", &["x1", "x2"]).unwrap();
        assert_eq!(e.eval(&[1.0, 2.0]).unwrap(), 3.0);
    }

    #[test]
    fn division_by_zero_names_node() {
        let e = parse("1/x1", &["x1"]).unwrap();
        match e.eval(&[0.0]) {
            Err(ExprError::Domain { node, reason }) => {
                assert_eq!(node, "1/x1");
                assert_eq!(reason, "division by zero");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn log_and_sqrt_domains() {
        let names = ["x1"];
        assert!(parse("log(x1)", &names).unwrap().eval(&[0.0]).is_err());
        assert!(parse("sqrt(x1)", &names).unwrap().eval(&[-1.0]).is_err());
        assert!(parse("x1^0.5", &names).unwrap().eval(&[-1.0]).is_err());
        assert_eq!(parse("sqrt(x1)", &names).unwrap().eval(&[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn short_point_is_rejected() {
        let e = parse("x2", &["x1", "x2"]).unwrap();
        assert_eq!(e.eval(&[1.0]), Err(ExprError::PointDimension { got: 1, index: 1 }));
    }

    #[test]
    fn shared_tape() {
        let names = ["x1", "x2"];
        let a = parse("sin(x1)*x2", &names).unwrap();
        let b = &a + &a;
        let tape = Tape::new(&[a.clone(), b]);
        let v = tape.eval(&[0.5, 2.0]).unwrap();
        assert_eq!(v[1], 2.0 * v[0]);
    }
}
