//! Symbolic expressions over base coordinates.
//!
//! An [`Expr`] is an immutable, reference-counted tree (in practice a DAG,
//! since derivatives share subtrees). Constructors fold constants and the
//! identities `x+0`, `x*1`, `x*0`; nothing else is simplified.
//!
//! Coordinates are referenced by index. Names only matter for parsing and
//! printing, see [`parse`] and [`Expr::display`].

mod diff;
mod eval;
mod parser;
mod print;

use std::fmt;
use std::ops;
use std::sync::Arc;

pub use eval::Tape;
pub use parser::parse;

/// Maximum tree depth accepted by closure generation and the parser.
pub const MAX_DEPTH: usize = 10_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("domain violation in `{node}`: {reason}")]
    Domain { node: String, reason: &'static str },
    #[error("point has {got} coordinates but expression references coordinate {index}")]
    PointDimension { got: usize, index: usize },
    #[error("expression depth {depth} exceeds the cap of {cap}")]
    DepthExceeded { depth: usize, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 6] = [Func::Sin, Func::Cos, Func::Tan, Func::Exp, Func::Log, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub(crate) fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Sqrt => x.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone)]
pub enum Node {
    Const(f64),
    Var(usize),
    Neg(Expr),
    Func(Func, Expr),
    Binary(BinOp, Expr, Expr),
    /// Power with a constant exponent.
    Pow(Expr, f64),
}

#[derive(Debug)]
struct Inner {
    node: Node,
    depth: usize,
}

fn take_children(node: &mut Node, out: &mut Vec<Expr>) {
    match std::mem::replace(node, Node::Const(0.0)) {
        Node::Const(_) | Node::Var(_) => {}
        Node::Neg(a) | Node::Func(_, a) | Node::Pow(a, _) => out.push(a),
        Node::Binary(_, a, b) => {
            out.push(a);
            out.push(b);
        }
    }
}

// Dropping a long chain recursively would overflow the stack, so uniquely
// owned descendants are unlinked onto an explicit worklist.
impl Drop for Inner {
    fn drop(&mut self) {
        let mut stack = Vec::new();
        take_children(&mut self.node, &mut stack);
        while let Some(e) = stack.pop() {
            if let Ok(mut inner) = Arc::try_unwrap(e.0) {
                take_children(&mut inner.node, &mut stack);
            }
        }
    }
}

/// A symbolic real-valued function of the base coordinates.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

impl Expr {
    fn from_node(node: Node) -> Expr {
        let depth = match &node {
            Node::Const(_) | Node::Var(_) => 1,
            Node::Neg(a) | Node::Func(_, a) | Node::Pow(a, _) => a.depth() + 1,
            Node::Binary(_, a, b) => a.depth().max(b.depth()) + 1,
        };
        Expr(Arc::new(Inner { node, depth }))
    }

    pub fn constant(c: f64) -> Expr {
        Expr::from_node(Node::Const(c))
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    /// Reference to coordinate `index`.
    pub fn var(index: usize) -> Expr {
        Expr::from_node(Node::Var(index))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn depth(&self) -> usize {
        self.0.depth
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// True only for the literal constant zero.
    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    pub(crate) fn ptr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn check_depth(&self) -> Result<(), ExprError> {
        if self.depth() > MAX_DEPTH {
            Err(ExprError::DepthExceeded { depth: self.depth(), cap: MAX_DEPTH })
        } else {
            Ok(())
        }
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        let mut best = None;
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.ptr()) {
                continue;
            }
            match e.node() {
                Node::Const(_) => {}
                Node::Var(i) => best = Some(best.map_or(*i, |b: usize| b.max(*i))),
                Node::Neg(a) | Node::Func(_, a) | Node::Pow(a, _) => stack.push(a.clone()),
                Node::Binary(_, a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
            }
        }
        best
    }

    /// Whether coordinate `index` occurs in the tree.
    pub fn depends_on(&self, index: usize) -> bool {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.ptr()) {
                continue;
            }
            match e.node() {
                Node::Const(_) => {}
                Node::Var(i) => {
                    if *i == index {
                        return true;
                    }
                }
                Node::Neg(a) | Node::Func(_, a) | Node::Pow(a, _) => stack.push(a.clone()),
                Node::Binary(_, a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
            }
        }
        false
    }

    pub fn neg(&self) -> Expr {
        match self.node() {
            Node::Const(c) => Expr::constant(-c),
            _ => Expr::from_node(Node::Neg(self.clone())),
        }
    }

    pub fn func(f: Func, arg: &Expr) -> Expr {
        if let Some(c) = arg.as_const() {
            let v = f.apply(c);
            if v.is_finite() {
                return Expr::constant(v);
            }
        }
        Expr::from_node(Node::Func(f, arg.clone()))
    }

    pub fn sin(&self) -> Expr {
        Expr::func(Func::Sin, self)
    }

    pub fn cos(&self) -> Expr {
        Expr::func(Func::Cos, self)
    }

    pub fn tan(&self) -> Expr {
        Expr::func(Func::Tan, self)
    }

    pub fn exp(&self) -> Expr {
        Expr::func(Func::Exp, self)
    }

    pub fn log(&self) -> Expr {
        Expr::func(Func::Log, self)
    }

    pub fn sqrt(&self) -> Expr {
        Expr::func(Func::Sqrt, self)
    }

    pub fn powf(&self, exponent: f64) -> Expr {
        if exponent == 1.0 {
            return self.clone();
        }
        if exponent == 0.0 {
            return Expr::one();
        }
        if let Some(c) = self.as_const() {
            let v = c.powf(exponent);
            if v.is_finite() {
                return Expr::constant(v);
            }
        }
        Expr::from_node(Node::Pow(self.clone(), exponent))
    }

    pub fn binary(op: BinOp, a: &Expr, b: &Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            let v = match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => x / y,
            };
            if v.is_finite() {
                return Expr::constant(v);
            }
        }
        match op {
            BinOp::Add => {
                if a.is_zero() {
                    return b.clone();
                }
                if b.is_zero() {
                    return a.clone();
                }
            }
            BinOp::Sub => {
                if b.is_zero() {
                    return a.clone();
                }
                if a.is_zero() {
                    return b.neg();
                }
            }
            BinOp::Mul => {
                if a.is_zero() || b.is_zero() {
                    return Expr::zero();
                }
                if a.is_one() {
                    return b.clone();
                }
                if b.is_one() {
                    return a.clone();
                }
            }
            BinOp::Div => {
                if b.is_one() {
                    return a.clone();
                }
                if a.is_zero() && !b.is_zero() {
                    return Expr::zero();
                }
            }
        }
        Expr::from_node(Node::Binary(op, a.clone(), b.clone()))
    }

    /// Sum of an iterator of expressions, folding zeros.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        terms.into_iter().fold(Expr::zero(), |acc, t| &acc + &t)
    }

    /// Exact symbolic partial derivative with respect to coordinate `index`.
    pub fn diff(&self, index: usize) -> Expr {
        diff::diff(self, index)
    }

    /// Evaluate at a point.
    pub fn eval(&self, point: &[f64]) -> Result<f64, ExprError> {
        Ok(Tape::new(std::slice::from_ref(self)).eval(point)?[0])
    }

    /// Canonical text using the given coordinate names.
    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        print::Named { expr: self, names: Some(names) }
    }
}

impl fmt::Display for Expr {
    /// Prints with default coordinate names `x1, x2, ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::Named { expr: self, names: None }.fmt(f)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

/// Structural equality. Constants compare by value.
impl PartialEq for Expr {
    fn eq(&self, other: &Expr) -> bool {
        let mut stack = vec![(self.clone(), other.clone())];
        while let Some((x, y)) = stack.pop() {
            if Arc::ptr_eq(&x.0, &y.0) {
                continue;
            }
            if x.depth() != y.depth() {
                return false;
            }
            let same = match (x.node(), y.node()) {
                (Node::Const(a), Node::Const(b)) => a == b,
                (Node::Var(a), Node::Var(b)) => a == b,
                (Node::Neg(a), Node::Neg(b)) => {
                    stack.push((a.clone(), b.clone()));
                    true
                }
                (Node::Func(f, a), Node::Func(g, b)) => {
                    stack.push((a.clone(), b.clone()));
                    f == g
                }
                (Node::Binary(o, a1, b1), Node::Binary(p, a2, b2)) => {
                    stack.push((a1.clone(), a2.clone()));
                    stack.push((b1.clone(), b2.clone()));
                    o == p
                }
                (Node::Pow(a, c), Node::Pow(b, d)) => {
                    stack.push((a.clone(), b.clone()));
                    c == d
                }
                _ => false,
            };
            if !same {
                return false;
            }
        }
        true
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Expr {
        Expr::constant(c)
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::binary($op, self, rhs)
            }
        }
        impl ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::binary($op, &self, &rhs)
            }
        }
        impl ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::binary($op, &self, rhs)
            }
        }
        impl ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::binary($op, self, &rhs)
            }
        }
        impl ops::$trait<f64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::binary($op, self, &Expr::constant(rhs))
            }
        }
        impl ops::$trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::binary($op, &self, &Expr::constant(rhs))
            }
        }
    };
}

impl_binop!(Add, add, BinOp::Add);
impl_binop!(Sub, sub, BinOp::Sub);
impl_binop!(Mul, mul, BinOp::Mul);
impl_binop!(Div, div, BinOp::Div);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

/// A point of the base manifold, given by its coordinates.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl ops::Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Point {
        Point(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_rules() {
        let x = Expr::var(0);
        assert_eq!(&x + &Expr::zero(), x);
        assert_eq!(&x * &Expr::one(), x);
        assert!((&x * &Expr::zero()).is_zero());
        assert_eq!((Expr::constant(2.0) * Expr::constant(3.0)).as_const(), Some(6.0));
        assert_eq!(Expr::constant(2.0).powf(3.0).as_const(), Some(8.0));
        // 1/0 is not folded into an infinity
        assert!((Expr::one() / Expr::zero()).as_const().is_none());
    }

    #[test]
    fn depth_tracking() {
        let mut e = Expr::var(0);
        for _ in 0..20 {
            e = e.sin();
        }
        assert_eq!(e.depth(), 21);
        assert!(e.check_depth().is_ok());
    }

    #[test]
    fn depends_on_and_max_var() {
        let e = Expr::var(0) * Expr::var(3).cos();
        assert!(e.depends_on(3));
        assert!(!e.depends_on(1));
        assert_eq!(e.max_var(), Some(3));
        assert_eq!(Expr::constant(1.0).max_var(), None);
    }
}
