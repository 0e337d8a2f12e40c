//! A small expression language for Witt computations.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr    := product ('+' product)*
//! product := term ('*' term)*
//! term    := 'teich(' int ')' | 'V(' nat ',' expr ')' | 'F(' nat ',' expr ')'
//!          | 'ghost(' expr ')' | 'fromghost(' int (',' int)* ')'
//!          | 'delta(' nat ',' expr ')' | 'ah(' nat (',' nat)* ')'
//!          | '-' term | '(' expr ')' | int
//! ```
//!
//! A bare integer literal denotes the canonical image of the integer in the
//! Witt ring; `teich(n)` is the Teichmueller lift of the ring element n.
//!
//! Typing: expressions are elaborated against a declared truncation set S.
//! `V(n, e)` analyzes e over S/n; `F(n, e)` and `delta(p, e)` shrink the
//! ambient set from S to S/n. Binary operations unify operand sets by
//! projecting both to the intersection (a legal structure map).

use std::fmt;

use num::BigInt;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rings::Ring;
use crate::truncation::TruncationSet;
use crate::witt::{
    artin_hasse_idempotent, delta_p, frobenius, ghost_of, teichmuller, verschiebung,
    witt_add, witt_from_ghost, witt_int_mul, witt_mul, witt_neg, GhostVector, WittVector,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    /// Canonical image of an integer in the Witt ring: n * <1>.
    Lit(BigInt),
    /// Teichmueller lift of a ring element given by an integer literal.
    Teich(BigInt),
    V(u64, Box<Expr>),
    F(u64, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Ghost(Box<Expr>),
    FromGhost(Vec<BigInt>),
    Delta(u64, Box<Expr>),
    AhIdempotent(Vec<u64>),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(n) => {
                if n.sign() == num::bigint::Sign::Minus {
                    write!(f, "({})", n)
                } else {
                    write!(f, "{}", n)
                }
            }
            Expr::Teich(n) => write!(f, "teich({})", n),
            Expr::V(n, e) => write!(f, "V({}, {})", n, e),
            Expr::F(n, e) => write!(f, "F({}, {})", n, e),
            Expr::Add(a, b) => {
                // the parser is left-associative: parenthesize a right Add
                if matches!(**b, Expr::Add(..)) {
                    write!(f, "{} + ({})", a, b)
                } else {
                    write!(f, "{} + {}", a, b)
                }
            }
            Expr::Mul(a, b) => {
                if matches!(**a, Expr::Add(..)) {
                    write!(f, "({})", a)?;
                } else {
                    write!(f, "{}", a)?;
                }
                write!(f, " * ")?;
                if matches!(**b, Expr::Add(..) | Expr::Mul(..)) {
                    write!(f, "({})", b)
                } else {
                    write!(f, "{}", b)
                }
            }
            Expr::Neg(e) => match **e {
                // parenthesize so "-7" stays a negation, not a literal
                Expr::Add(..) | Expr::Mul(..) | Expr::Lit(_) => write!(f, "-({})", e),
                _ => write!(f, "-{}", e),
            },
            Expr::Ghost(e) => write!(f, "ghost({})", e),
            Expr::FromGhost(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "fromghost({})", parts.join(", "))
            }
            Expr::Delta(p, e) => write!(f, "delta({}, {})", p, e),
            Expr::AhIdempotent(t) => {
                let parts: Vec<String> = t.iter().map(|x| x.to_string()).collect();
                write!(f, "ah({})", parts.join(", "))
            }
        }
    }
}

// --- parser -----------------------------------------------------------------

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Parser<'a> {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn line_col(&self) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for &b in &self.src[..self.pos] {
            if b == b'\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self.line_col();
        Error::Syntax {
            line,
            col,
            msg: msg.into(),
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

    fn eat(&mut self, b: u8) -> Result<()> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {:?}", b as char)))
        }
    }

    fn parse_int(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self
            .src
            .get(self.pos)
            .map(|b| b.is_ascii_digit())
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        if self.pos == start || (self.pos == start + 1 && self.src[start] == b'-') {
            return Err(self.error("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|e| self.error(format!("bad integer: {}", e)))
    }

    fn parse_nat(&mut self) -> Result<u64> {
        let n = self.parse_int()?;
        u64::try_from(n).map_err(|_| self.error("expected a positive integer"))
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .map(|b| b.is_ascii_alphabetic())
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        if self.pos > start {
            Some(String::from_utf8(self.src[start..self.pos].to_vec()).unwrap())
        } else {
            None
        }
    }

    fn parse_int_list(&mut self) -> Result<Vec<BigInt>> {
        let mut out = vec![self.parse_int()?];
        while self.peek() == Some(b',') {
            self.pos += 1;
            out.push(self.parse_int()?);
        }
        Ok(out)
    }

    fn parse_expr(&mut self) -> Result<Expr> {
        let mut acc = self.parse_product()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            let rhs = self.parse_product()?;
            acc = Expr::Add(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn parse_product(&mut self) -> Result<Expr> {
        let mut acc = self.parse_term()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.parse_term()?;
            acc = Expr::Mul(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn parse_term(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                // a minus directly followed by a digit is a literal
                if self
                    .src
                    .get(self.pos)
                    .map(|b| b.is_ascii_digit())
                    .unwrap_or(false)
                {
                    self.pos -= 1;
                    return Ok(Expr::Lit(self.parse_int()?));
                }
                Ok(Expr::Neg(Box::new(self.parse_term()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.parse_expr()?;
                self.eat(b')')?;
                Ok(e)
            }
            Some(b) if b.is_ascii_digit() => Ok(Expr::Lit(self.parse_int()?)),
            Some(b) if b.is_ascii_alphabetic() => {
                let name = self.ident().unwrap();
                self.eat(b'(')?;
                let out = match name.as_str() {
                    "teich" => Expr::Teich(self.parse_int()?),
                    "V" => {
                        let n = self.parse_nat()?;
                        self.eat(b',')?;
                        Expr::V(n, Box::new(self.parse_expr()?))
                    }
                    "F" => {
                        let n = self.parse_nat()?;
                        self.eat(b',')?;
                        Expr::F(n, Box::new(self.parse_expr()?))
                    }
                    "ghost" => Expr::Ghost(Box::new(self.parse_expr()?)),
                    "fromghost" => Expr::FromGhost(self.parse_int_list()?),
                    "delta" => {
                        let p = self.parse_nat()?;
                        self.eat(b',')?;
                        Expr::Delta(p, Box::new(self.parse_expr()?))
                    }
                    "ah" => {
                        let list = self.parse_int_list()?;
                        let nats: Result<Vec<u64>> = list
                            .into_iter()
                            .map(|n| {
                                u64::try_from(n).map_err(|_| self.error("expected positive members"))
                            })
                            .collect();
                        Expr::AhIdempotent(nats?)
                    }
                    other => return Err(self.error(format!("unknown function {:?}", other))),
                };
                self.eat(b')')?;
                Ok(out)
            }
            Some(c) => Err(self.error(format!("unexpected character {:?}", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Parse an expression, reporting position-annotated errors.
pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser::new(src);
    let e = p.parse_expr()?;
    if p.peek().is_some() {
        return Err(p.error("trailing input"));
    }
    Ok(e)
}

// --- typing and evaluation ---------------------------------------------------

/// The kind and ambient set of an expression, computed before evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueKind {
    Witt,
    Ghost,
}

/// Evaluated value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Witt(WittVector),
    Ghost(GhostVector),
}

impl Value {
    pub fn set(&self) -> &TruncationSet {
        match self {
            Value::Witt(w) => &w.set,
            Value::Ghost(g) => &g.set,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Witt(w) => serde_json::json!({"witt": crate::serial::witt_to_json(w)}),
            Value::Ghost(g) => serde_json::json!({"ghost": crate::serial::ghost_to_json(g)}),
        }
    }
}

/// Type-check against a declared set: returns the kind and the resulting
/// (possibly shrunk) set without touching ring arithmetic.
pub fn typecheck(e: &Expr, set: &TruncationSet) -> Result<(ValueKind, TruncationSet)> {
    match e {
        Expr::Lit(_) | Expr::Teich(_) | Expr::AhIdempotent(_) => {
            if let Expr::AhIdempotent(t) = e {
                let sub = TruncationSet::new(t.iter().copied())?;
                if !sub.is_subset_of(set) {
                    return Err(Error::Type(format!("{} is not a subset of {}", sub, set)));
                }
            }
            Ok((ValueKind::Witt, set.clone()))
        }
        Expr::FromGhost(v) => {
            if v.len() != set.len() {
                return Err(Error::Type(format!(
                    "fromghost arity {} does not match |S| = {}",
                    v.len(),
                    set.len()
                )));
            }
            Ok((ValueKind::Witt, set.clone()))
        }
        Expr::V(n, inner) => {
            if !set.contains(*n) {
                return Err(Error::Type(format!("{} is not a member of {}", n, set)));
            }
            let (k, u) = typecheck(inner, &set.quotient(*n)?)?;
            if k != ValueKind::Witt {
                return Err(Error::Type("V applies to Witt values".into()));
            }
            // the target shrinks with the operand: T' = {m : n | m => m/n in U}
            let t2 = TruncationSet::new(
                set.members()
                    .filter(|&m| m % n != 0 || u.contains(m / n)),
            )?;
            Ok((ValueKind::Witt, t2))
        }
        Expr::F(n, inner) | Expr::Delta(n, inner) => {
            let (k, u) = typecheck(inner, set)?;
            if k != ValueKind::Witt {
                return Err(Error::Type("F and delta apply to Witt values".into()));
            }
            if !u.contains(*n) {
                return Err(Error::Type(format!("{} is not a member of {}", n, u)));
            }
            Ok((ValueKind::Witt, u.quotient(*n)?))
        }
        Expr::Neg(inner) => {
            let (k, u) = typecheck(inner, set)?;
            if k != ValueKind::Witt {
                return Err(Error::Type("negation applies to Witt values".into()));
            }
            Ok((ValueKind::Witt, u))
        }
        Expr::Ghost(inner) => {
            let (k, u) = typecheck(inner, set)?;
            if k != ValueKind::Witt {
                return Err(Error::Type("ghost applies to Witt values".into()));
            }
            Ok((ValueKind::Ghost, u))
        }
        Expr::Add(a, b) | Expr::Mul(a, b) => {
            let (ka, ua) = typecheck(a, set)?;
            let (kb, ub) = typecheck(b, set)?;
            if ka != kb {
                return Err(Error::Type(
                    "cannot mix Witt and ghost operands".into(),
                ));
            }
            let inter = TruncationSet::new(ua.members().filter(|&m| ub.contains(m)))?;
            Ok((ka, inter))
        }
    }
}

/// Evaluate over a declared ring and set (after `typecheck`).
pub fn eval(e: &Expr, ring: &Ring, set: &TruncationSet) -> Result<Value> {
    typecheck(e, set)?;
    eval_inner(e, ring, set)
}

fn eval_inner(e: &Expr, ring: &Ring, set: &TruncationSet) -> Result<Value> {
    match e {
        Expr::Lit(n) => Ok(Value::Witt(witt_int_mul(
            n,
            &teichmuller(&ring.one(), set),
        )?)),
        Expr::Teich(n) => Ok(Value::Witt(teichmuller(&ring.from_int(n), set))),
        Expr::V(n, inner) => {
            let v = eval_inner(inner, ring, &set.quotient(*n)?)?;
            let w = expect_witt(v)?;
            let t2 = TruncationSet::new(
                set.members()
                    .filter(|&m| m % n != 0 || w.set.contains(m / n)),
            )?;
            Ok(Value::Witt(verschiebung(*n, &w, &t2)?))
        }
        Expr::F(n, inner) => {
            let w = expect_witt(eval_inner(inner, ring, set)?)?;
            Ok(Value::Witt(frobenius(*n, &w)?))
        }
        Expr::Delta(p, inner) => {
            let w = expect_witt(eval_inner(inner, ring, set)?)?;
            Ok(Value::Witt(delta_p(*p, &w)?))
        }
        Expr::Neg(inner) => {
            let w = expect_witt(eval_inner(inner, ring, set)?)?;
            Ok(Value::Witt(witt_neg(&w)?))
        }
        Expr::Ghost(inner) => {
            let w = expect_witt(eval_inner(inner, ring, set)?)?;
            Ok(Value::Ghost(ghost_of(&w)))
        }
        Expr::FromGhost(v) => {
            let comps = v.iter().map(|n| ring.from_int(n)).collect();
            let g = GhostVector::new(set.clone(), ring.clone(), comps)?;
            Ok(Value::Witt(witt_from_ghost(&g)?))
        }
        Expr::AhIdempotent(t) => {
            let sub = TruncationSet::new(t.iter().copied())?;
            Ok(Value::Witt(artin_hasse_idempotent(set, &sub, ring)?))
        }
        Expr::Add(a, b) => {
            let va = eval_inner(a, ring, set)?;
            let vb = eval_inner(b, ring, set)?;
            binop(va, vb, witt_add, |x, y| x.add(y))
        }
        Expr::Mul(a, b) => {
            let va = eval_inner(a, ring, set)?;
            let vb = eval_inner(b, ring, set)?;
            binop(va, vb, witt_mul, |x, y| x.mul(y))
        }
    }
}

fn expect_witt(v: Value) -> Result<WittVector> {
    match v {
        Value::Witt(w) => Ok(w),
        Value::Ghost(_) => Err(Error::Type("expected a Witt value".into())),
    }
}

fn binop(
    a: Value,
    b: Value,
    witt_op: impl Fn(&WittVector, &WittVector) -> Result<WittVector>,
    ghost_op: impl Fn(&GhostVector, &GhostVector) -> Result<GhostVector>,
) -> Result<Value> {
    let inter = TruncationSet::new(
        a.set().members().filter(|&m| b.set().contains(m)),
    )?;
    match (a, b) {
        (Value::Witt(x), Value::Witt(y)) => Ok(Value::Witt(witt_op(
            &x.project(&inter)?,
            &y.project(&inter)?,
        )?)),
        (Value::Ghost(x), Value::Ghost(y)) => Ok(Value::Ghost(ghost_op(
            &x.project(&inter)?,
            &y.project(&inter)?,
        )?)),
        _ => Err(Error::Type("cannot mix Witt and ghost operands".into())),
    }
}

/// Random expression of bounded depth, for the parse/print round trip.
pub fn random_expr(rng: &mut impl Rng, set: &TruncationSet, depth: u32) -> Expr {
    let members: Vec<u64> = set.members().collect();
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => Expr::Lit(BigInt::from(rng.gen_range(-9i64..=9))),
            1 => Expr::Teich(BigInt::from(rng.gen_range(-9i64..=9))),
            _ => Expr::FromGhost(
                (0..set.len())
                    .map(|_| BigInt::from(rng.gen_range(-9i64..=9)))
                    .collect(),
            ),
        };
    }
    match rng.gen_range(0..6) {
        0 => Expr::Add(
            Box::new(random_expr(rng, set, depth - 1)),
            Box::new(random_expr(rng, set, depth - 1)),
        ),
        1 => Expr::Mul(
            Box::new(random_expr(rng, set, depth - 1)),
            Box::new(random_expr(rng, set, depth - 1)),
        ),
        2 => Expr::Neg(Box::new(random_expr(rng, set, depth - 1))),
        3 => {
            let n = members[rng.gen_range(0..members.len())];
            Expr::V(
                n,
                Box::new(random_expr(rng, &set.quotient(n).unwrap(), depth - 1)),
            )
        }
        4 => {
            let n = members[rng.gen_range(0..members.len())];
            Expr::F(n, Box::new(random_expr(rng, set, depth - 1)))
        }
        _ => Expr::Ghost(Box::new(random_expr(rng, set, depth - 1))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn parse_examples() {
        let e = parse("teich(3) + V(2, teich(5))").unwrap();
        assert_eq!(
            e,
            Expr::Add(
                Box::new(Expr::Teich(BigInt::from(3))),
                Box::new(Expr::V(2, Box::new(Expr::Teich(BigInt::from(5)))))
            )
        );
        // precedence: * binds tighter than +
        let e2 = parse("1 + 2 * 3").unwrap();
        assert_eq!(
            e2,
            Expr::Add(
                Box::new(Expr::Lit(BigInt::from(1))),
                Box::new(Expr::Mul(
                    Box::new(Expr::Lit(BigInt::from(2))),
                    Box::new(Expr::Lit(BigInt::from(3)))
                ))
            )
        );
        // syntax errors carry positions
        match parse("teich(") {
            Err(Error::Syntax { line: 1, col, .. }) => assert!(col >= 6),
            other => panic!("expected syntax error, got {:?}", other),
        }
    }

    #[test]
    fn type_errors() {
        let s = TruncationSet::new([1, 2, 4]).unwrap();
        let e = parse("V(7, teich(1))").unwrap();
        assert!(matches!(typecheck(&e, &s), Err(Error::Type(_))));
        // F shrinks the ambient set; the product unifies over S/2
        let e2 = parse("F(2, teich(3)) * teich(3)").unwrap();
        let (k, u) = typecheck(&e2, &s).unwrap();
        assert_eq!(k, ValueKind::Witt);
        assert_eq!(u, s.quotient(2).unwrap());
        // ghost cannot be added to witt
        let e3 = parse("ghost(teich(1)) + teich(1)").unwrap();
        assert!(matches!(typecheck(&e3, &s), Err(Error::Type(_))));
    }

    #[test]
    fn eval_against_direct_computation() {
        let z = Ring::integers();
        let s = TruncationSet::new([1, 2, 4]).unwrap();
        let v = eval(&parse("teich(3) + V(2, teich(5))").unwrap(), &z, &s).unwrap();
        let direct = witt_add(
            &teichmuller(&z.from_i64(3), &s),
            &crate::witt::v_teichmuller(2, &z.from_i64(5), &s).unwrap(),
        )
        .unwrap();
        assert_eq!(v, Value::Witt(direct));
        // fromghost inverts ghost
        let v2 = eval(&parse("ghost(fromghost(3, 11, 91))").unwrap(), &z, &s).unwrap();
        match v2 {
            Value::Ghost(g) => {
                assert_eq!(
                    g.components(),
                    &[z.from_i64(3), z.from_i64(11), z.from_i64(91)]
                );
            }
            _ => panic!("expected ghost"),
        }
    }

    #[test]
    fn print_parse_round_trip() {
        let s = TruncationSet::new([1, 2, 3, 6]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let e = random_expr(&mut rng, &s, 3);
            let printed = e.to_string();
            let back = parse(&printed).unwrap_or_else(|err| {
                panic!("failed to reparse {:?}: {}", printed, err);
            });
            assert_eq!(back, e, "round trip failed for {}", printed);
        }
    }
}
