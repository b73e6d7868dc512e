use super::{Expr, ExprError, Func};

/// Parenthesis/function/unary-minus nesting allowed while parsing.
const MAX_NESTING: usize = 256;

/// Parse `text` into an expression over the coordinates named in `coords`.
///
/// Precedence, tightest first: `^` (constant exponent), unary `-`, `*` `/`,
/// `+` `-`. Binary operators are left-associative.
pub fn parse<S: AsRef<str>>(text: &str, coords: &[S]) -> Result<Expr, ExprError> {
    let mut p = Parser { src: text.as_bytes(), text, pos: 0, coords, nesting: 0 };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    e.check_depth()?;
    Ok(e)
}

struct Parser<'a, S> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
    coords: &'a [S],
    nesting: usize,
}

impl<S: AsRef<str>> Parser<'_, S> {
    fn err(&self, message: &str) -> ExprError {
        ExprError::Syntax { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn enter(&mut self) -> Result<(), ExprError> {
        self.nesting += 1;
        if self.nesting > MAX_NESTING {
            return Err(self.err("nesting too deep"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                lhs = &lhs + &rhs;
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                lhs = &lhs - &rhs;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.factor()?;
                lhs = &lhs * &rhs;
            } else if self.eat(b'/') {
                let rhs = self.factor()?;
                lhs = &lhs / &rhs;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if self.eat(b'-') {
            self.enter()?;
            let e = self.power()?;
            self.nesting -= 1;
            Ok(-e)
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let negative = self.eat(b'-');
            let c = self.number()?;
            Ok(base.powf(if negative { -c } else { c }))
        } else {
            Ok(base)
        }
    }

    fn number(&mut self) -> Result<f64, ExprError> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.peek().is_some_and(|c| c.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            self.pos = start;
            return Err(self.err("expected a number"));
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
                return Err(self.err("malformed exponent"));
            }
        }
        let v: f64 = self.text[start..self.pos]
            .parse()
            .map_err(|_| ExprError::Syntax { offset: start, message: "invalid number".into() })?;
        self.skip_ws();
        Ok(v)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                self.enter()?;
                self.skip_ws();
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.nesting -= 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::constant(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                let name = &self.text[start..self.pos];
                self.skip_ws();
                if let Some(f) = Func::from_name(name) {
                    if self.peek() == Some(b'(') {
                        self.pos += 1;
                        self.enter()?;
                        self.skip_ws();
                        let arg = self.expr()?;
                        if !self.eat(b')') {
                            return Err(self.err("expected `)`"));
                        }
                        self.nesting -= 1;
                        return Ok(Expr::func(f, &arg));
                    }
                }
                match self.coords.iter().position(|c| c.as_ref() == name) {
                    Some(i) => Ok(Expr::var(i)),
                    None => Err(ExprError::UnknownIdentifier { name: name.to_string(), offset: start }),
                }
            }
            Some(_) => Err(self.err("unexpected character")),
        }
    }
}
