use super::token::{Token, TokenKind};
use super::{BinOp, Expr, ExprError, Func, Var};

/// Builds an [`Expr`] from a token stream produced by [`super::tokenize`].
pub fn parse(tokens: &[Token]) -> Result<Expr, ExprError> {
    if tokens.is_empty() {
        return Err(ExprError::Empty);
    }
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    match p.peek() {
        None => Ok(e),
        Some(t) => Err(unexpected(t)),
    }
}

fn unexpected(t: &Token) -> ExprError {
    ExprError::UnexpectedToken { position: t.position, found: t.text.clone() }
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<TokenKind> {
        self.peek().map(|t| t.kind)
    }

    fn next(&mut self) -> Result<&'a Token, ExprError> {
        let t = self.tokens.get(self.pos).ok_or(ExprError::UnexpectedEnd)?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, kind: TokenKind) -> Result<&'a Token, ExprError> {
        let t = self.next()?;
        if t.kind == kind {
            Ok(t)
        } else {
            Err(unexpected(t))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Plus) => BinOp::Add,
                Some(TokenKind::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Star) => BinOp::Mul,
                Some(TokenKind::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if self.peek_kind() == Some(TokenKind::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.peek_kind() == Some(TokenKind::Caret) {
            self.pos += 1;
            let exponent = self.factor()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ExprError> {
        let t = self.next()?;
        match t.kind {
            TokenKind::Number => {
                let v: f64 = t.text.parse().map_err(|_| unexpected(t))?;
                if !v.is_finite() {
                    return Err(ExprError::NonFiniteConstant {
                        position: t.position,
                        text: t.text.clone(),
                    });
                }
                Ok(Expr::Const(v))
            }
            TokenKind::Ident => {
                if self.peek_kind() == Some(TokenKind::LParen) {
                    return self.call(t);
                }
                match t.text.as_str() {
                    "x" => Ok(Expr::Var(Var::X)),
                    "y" => Ok(Expr::Var(Var::Y)),
                    _ => Err(ExprError::UnknownIdent { position: t.position, name: t.text.clone() }),
                }
            }
            TokenKind::LParen => {
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            _ => Err(unexpected(t)),
        }
    }

    fn call(&mut self, name: &Token) -> Result<Expr, ExprError> {
        let func = Func::from_name(&name.text).ok_or_else(|| ExprError::UnknownIdent {
            position: name.position,
            name: name.text.clone(),
        })?;
        self.expect(TokenKind::LParen)?;
        let mut args = vec![self.expr()?];
        while self.peek_kind() == Some(TokenKind::Comma) {
            self.pos += 1;
            args.push(self.expr()?);
        }
        self.expect(TokenKind::RParen)?;
        if !func.arity_ok(args.len()) {
            return Err(ExprError::Arity {
                position: name.position,
                name: name.text.clone(),
                expected: func.arity_text(),
                got: args.len(),
            });
        }
        Ok(Expr::Call(func, args))
    }
}
