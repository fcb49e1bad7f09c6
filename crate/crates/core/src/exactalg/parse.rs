//! ASCII parsing and printing for rationals, polynomials in `t`, and rational
//! functions.
//!
//! Accepted forms include `c0 + c1*t + c2*t^2`, the compact `t^3 - t^2`,
//! rationals as `p/q`, and quotients like `6912*t/(4*t-27)`. `/` is ordinary
//! division (binding like `*`), `^` takes a non-negative integer exponent,
//! and `*` may be omitted before `t` or `(`.

use num::{BigInt, BigRational, One, Signed, Zero};

use super::poly::Poly;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(BigInt),
    Var,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(input: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = input.chars().peekable();
    while let Some(&ch) = chars.peek() {
        match ch {
            c if c.is_whitespace() => {
                chars.next();
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        digits.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let n = digits
                    .parse::<BigInt>()
                    .map_err(|_| Error::input(format!("bad number `{digits}`")))?;
                out.push(Token::Num(n));
            }
            't' => {
                chars.next();
                out.push(Token::Var);
            }
            '+' => {
                chars.next();
                out.push(Token::Plus);
            }
            '-' | '\u{2212}' => {
                chars.next();
                out.push(Token::Minus);
            }
            '*' | '\u{00b7}' => {
                chars.next();
                out.push(Token::Star);
            }
            '/' => {
                chars.next();
                out.push(Token::Slash);
            }
            '^' => {
                chars.next();
                out.push(Token::Caret);
            }
            '(' => {
                chars.next();
                out.push(Token::LParen);
            }
            ')' => {
                chars.next();
                out.push(Token::RParen);
            }
            other => {
                return Err(Error::input(format!(
                    "unexpected character `{other}` in expression `{input}`"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        while let Some(tok) = self.peek() {
            match tok {
                Token::Plus => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Token::Minus => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let d = self.unary()?;
                    acc = acc.div(&d)?;
                }
                // implicit multiplication: `4t`, `2(t+1)`
                Some(Token::Var) | Some(Token::LParen) => {
                    acc = &acc * &self.unary()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFunc> {
        if let Some(Token::Minus) = self.peek() {
            self.pos += 1;
            return Ok(-&self.unary()?);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<RatFunc> {
        let base = match self.next() {
            Some(Token::Num(n)) => RatFunc::constant(BigRational::from_integer(n)),
            Some(Token::Var) => RatFunc::from_poly(Poly::var()),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => inner,
                    _ => return Err(Error::input("unbalanced parenthesis")),
                }
            }
            other => return Err(Error::input(format!("unexpected token {other:?}"))),
        };
        if let Some(Token::Caret) = self.peek() {
            self.pos += 1;
            match self.next() {
                Some(Token::Num(e)) => {
                    let e: u32 = e
                        .try_into()
                        .map_err(|_| Error::input("exponent out of range"))?;
                    Ok(base.pow(e))
                }
                _ => Err(Error::input(
                    "`^` must be followed by a non-negative integer",
                )),
            }
        } else {
            Ok(base)
        }
    }
}

/// Parse a rational function in `t`.
pub fn parse_ratfunc(input: &str) -> Result<RatFunc> {
    let tokens = tokenize(input)?;
    if tokens.is_empty() {
        return Err(Error::input("empty expression"));
    }
    let mut p = Parser { tokens, pos: 0 };
    let f = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::input(format!("trailing tokens in `{input}`")));
    }
    Ok(f)
}

/// Parse a polynomial; errors if the expression has a non-trivial denominator.
pub fn parse_poly(input: &str) -> Result<Poly> {
    let f = parse_ratfunc(input)?;
    if f.den().is_one() {
        Ok(f.num().clone())
    } else {
        Err(Error::input(format!("`{input}` is not a polynomial")))
    }
}

/// Parse an exact rational `p`, `-p/q`, etc.
pub fn parse_rational(input: &str) -> Result<BigRational> {
    let f = parse_ratfunc(input)?;
    f.as_constant()
        .ok_or_else(|| Error::input(format!("`{input}` is not a rational constant")))
}

pub fn rational_to_string(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn monomial_to_string(c: &BigRational, k: usize) -> String {
    let var = match k {
        0 => String::new(),
        1 => "t".to_string(),
        _ => format!("t^{k}"),
    };
    if k == 0 {
        return rational_to_string(c);
    }
    if c.is_one() {
        var
    } else if (-c).is_one() {
        format!("-{var}")
    } else {
        format!("{}*{var}", rational_to_string(c))
    }
}

/// Compact form, highest degree first: `t^3-t^2`, `4*t-27`, `27/4`.
pub fn poly_to_string(p: &Poly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for k in (0..p.coeffs().len()).rev() {
        let c = p.coeff(k);
        if c.is_zero() {
            continue;
        }
        if out.is_empty() {
            out.push_str(&monomial_to_string(&c, k));
        } else if c.is_negative() {
            out.push('-');
            out.push_str(&monomial_to_string(&(-&c), k));
        } else {
            out.push('+');
            out.push_str(&monomial_to_string(&c, k));
        }
    }
    out
}

fn term_count(p: &Poly) -> usize {
    p.coeffs().iter().filter(|c| !c.is_zero()).count()
}

/// Quotients print integer-cleared: the canonical monic-denominator pair
/// `1728*t / (t-27/4)` displays as `6912*t/(4*t-27)`.
pub fn ratfunc_to_string(f: &RatFunc) -> String {
    use num::Integer;
    if f.den().is_one() {
        return poly_to_string(f.num());
    }
    let mut scale = BigInt::one();
    for c in f.num().coeffs().iter().chain(f.den().coeffs()) {
        scale = scale.lcm(c.denom());
    }
    let mut content = BigInt::zero();
    for c in f.num().coeffs().iter().chain(f.den().coeffs()) {
        content = content.gcd(&(c.numer() * (&scale / c.denom())));
    }
    let factor = BigRational::new(scale, content);
    let num = f.num().scale(&factor);
    let den = f.den().scale(&factor);
    let num_s = if term_count(&num) > 1 {
        format!("({})", poly_to_string(&num))
    } else {
        poly_to_string(&num)
    };
    let den_s = if term_count(&den) > 1 {
        format!("({})", poly_to_string(&den))
    } else {
        poly_to_string(&den)
    };
    format!("{num_s}/{den_s}")
}
