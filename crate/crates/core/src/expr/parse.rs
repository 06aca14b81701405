use super::{BinOp, Expr, Func};
use crate::error::ExprError;

/// Parses `source` for a chart of dimension `n`.
pub fn parse(source: &str, n: usize) -> Result<Expr, ExprError> {
    let mut p = Parser {
        src: source.as_bytes(),
        pos: 0,
        n,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn syntax(&self, message: &str) -> ExprError {
        ExprError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == b'+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            let op = if c == b'*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let negate = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut e = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exponent = self.atom()?;
            e = Expr::Binary(BinOp::Pow, Box::new(e), Box::new(exponent));
        }
        Ok(if negate { Expr::Neg(Box::new(e)) } else { e })
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(_) => Err(self.syntax("expected a number, coordinate, function call or '('")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut count = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            self.pos = start;
            return Err(self.syntax("malformed number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = mark;
                return Err(self.syntax("malformed exponent"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        text.parse::<f64>().map(Expr::Const).map_err(|_| {
            self.pos = start;
            self.syntax("malformed number")
        })
    }

    fn identifier(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        if let Some(rest) = name.strip_prefix('x') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                let index: usize = rest.parse().map_err(|_| ExprError::Syntax {
                    offset: start,
                    message: "coordinate index too large".into(),
                })?;
                if index >= self.n {
                    return Err(ExprError::CoordinateOutOfRange {
                        index,
                        dimension: self.n,
                        offset: start,
                    });
                }
                return Ok(Expr::Var(index));
            }
        }
        let func = Func::from_name(name).ok_or_else(|| ExprError::UnknownFunction {
            name: name.to_string(),
            offset: start,
        })?;
        self.expect(b'(')?;
        let mut args = vec![self.expr()?];
        while self.peek() == Some(b',') {
            self.pos += 1;
            args.push(self.expr()?);
        }
        self.expect(b')')?;
        if args.len() != func.arity() {
            return Err(ExprError::Syntax {
                offset: start,
                message: format!(
                    "{} takes {} argument(s), got {}",
                    func.name(),
                    func.arity(),
                    args.len()
                ),
            });
        }
        Ok(Expr::Call(func, args))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_coordinate() {
        assert_eq!(parse("x0", 1).unwrap(), Expr::Var(0));
    }

    #[test]
    fn function_of_product() {
        let e = parse("exp(2*x0)", 2).unwrap();
        assert_eq!(
            e,
            Expr::Call(
                Func::Exp,
                vec![Expr::Binary(
                    BinOp::Mul,
                    Box::new(Expr::Const(2.0)),
                    Box::new(Expr::Var(0))
                )]
            )
        );
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        let e = parse("-x0^2", 1).unwrap();
        assert_eq!(e.value_at(&[3.0]).unwrap(), -9.0);
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse("1 - 2 - 3 * 4 / 2", 1).unwrap();
        assert_eq!(e.value_at(&[0.0]).unwrap(), -7.0);
        let e = parse("2 * -x0 + 1e-1", 1).unwrap();
        assert!((e.value_at(&[1.0]).unwrap() + 1.9).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_offsets() {
        match parse("x0 + * 3", 2) {
            Err(ExprError::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
        match parse("foo(x0)", 2) {
            Err(ExprError::UnknownFunction { name, offset }) => {
                assert_eq!(name, "foo");
                assert_eq!(offset, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse("1 + x3", 3) {
            Err(ExprError::CoordinateOutOfRange {
                index: 3,
                dimension: 3,
                offset: 4,
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("(x0", 1),
            Err(ExprError::Syntax { offset: 3, .. })
        ));
        assert!(matches!(
            parse("x0 x0", 1),
            Err(ExprError::Syntax { offset: 3, .. })
        ));
        assert!(matches!(parse("pow(x0)", 1), Err(ExprError::Syntax { .. })));
        assert!(matches!(
            parse("", 1),
            Err(ExprError::Syntax { offset: 0, .. })
        ));
    }
}
