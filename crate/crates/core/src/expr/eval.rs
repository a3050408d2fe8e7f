use super::{BinOp, Expr, ExprError, Func, Var};

impl Expr {
    /// Evaluates at `(x, y)`.
    ///
    /// Division by zero, logarithms of non-positive values, square roots of
    /// negatives, negative bases under non-integer exponents and overflow are
    /// all reported as errors rather than propagated as infinities or NaNs.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64, ExprError> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var(Var::X) => x,
            Expr::Var(Var::Y) => y,
            Expr::Neg(e) => -e.eval(x, y)?,
            Expr::Binary(op, a, b) => {
                let a_val = a.eval(x, y)?;
                let b_val = b.eval(x, y)?;
                match op {
                    BinOp::Add => a_val + b_val,
                    BinOp::Sub => a_val - b_val,
                    BinOp::Mul => a_val * b_val,
                    BinOp::Div => {
                        if b_val == 0.0 {
                            return Err(ExprError::DivisionByZero { expr: self.to_string() });
                        }
                        a_val / b_val
                    }
                    BinOp::Pow => power(self, a_val, b_val)?,
                }
            }
            Expr::Call(func, args) => call(self, *func, args, x, y)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ExprError::NonFinite { expr: self.to_string() })
        }
    }

    /// Single-variable convenience: binds `x` and leaves `y` at zero.
    pub fn eval_x(&self, x: f64) -> Result<f64, ExprError> {
        self.eval(x, 0.0)
    }
}

fn power(node: &Expr, base: f64, exponent: f64) -> Result<f64, ExprError> {
    if base < 0.0 && exponent.fract() != 0.0 {
        return Err(ExprError::FractionalPowerOfNegative { expr: node.to_string() });
    }
    if base == 0.0 && exponent < 0.0 {
        return Err(ExprError::DivisionByZero { expr: node.to_string() });
    }
    if exponent == 2.0 {
        return Ok(base * base);
    }
    Ok(base.powf(exponent))
}

fn call(node: &Expr, func: Func, args: &[Expr], x: f64, y: f64) -> Result<f64, ExprError> {
    let first = args[0].eval(x, y)?;
    Ok(match func {
        Func::Sqrt => {
            if first < 0.0 {
                return Err(ExprError::SqrtDomain { expr: node.to_string() });
            }
            first.sqrt()
        }
        Func::Exp => first.exp(),
        Func::Ln => {
            if first <= 0.0 {
                return Err(ExprError::LogDomain { expr: node.to_string() });
            }
            first.ln()
        }
        Func::Abs => first.abs(),
        Func::Min | Func::Max => {
            let mut acc = first;
            for a in &args[1..] {
                let v = a.eval(x, y)?;
                acc = if func == Func::Min { acc.min(v) } else { acc.max(v) };
            }
            acc
        }
    })
}
