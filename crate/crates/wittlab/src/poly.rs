//! Sparse multivariate polynomials with exact coefficients.
//!
//! The same representation backs the universal Witt polynomial tables
//! (integer coefficients) and the de Rham-Witt form calculus (rational
//! coefficients): a map from exponent vectors to nonzero coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Zero};

/// Exponent vector; all monomials of a polynomial have the same length.
pub type Monomial = Vec<u32>;

/// Coefficient domains usable in [`MultiPoly`].
pub trait Coeff: Clone + Eq + Ord + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
}

impl Coeff for BigInt {
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn one() -> Self {
        <BigInt as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl Coeff for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

/// Sparse multivariate polynomial in `nvars` variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MultiPoly<C: Coeff> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

pub type ZPoly = MultiPoly<BigInt>;
pub type QPoly = MultiPoly<BigRational>;

impl<C: Coeff> MultiPoly<C> {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    /// The monomial `c * x_i^e`.
    pub fn var_pow(nvars: usize, i: usize, e: u32, c: C) -> Self {
        assert!(i < nvars);
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            let mut m = vec![0; nvars];
            m[i] = e;
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, it: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in it {
            assert_eq!(m.len(), nvars);
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.neg());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.nvars);
        if c.is_zero() {
            return out;
        }
        for (m, cc) in &self.terms {
            let p = cc.mul(c);
            if !p.is_zero() {
                out.terms.insert(m.clone(), p);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m[i]).max().unwrap_or(0)
    }

    /// Substitute each variable by the given polynomial.
    pub fn substitute(&self, subs: &[Self]) -> Self {
        assert_eq!(subs.len(), self.nvars);
        let nv = subs.first().map(|p| p.nvars).unwrap_or(self.nvars);
        let mut out = Self::zero(nv);
        for (m, c) in &self.terms {
            let mut t = Self::constant(nv, c.clone());
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&subs[i].pow(e));
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Evaluate with a generic coefficient action, used to evaluate integer
    /// table polynomials on elements of an arbitrary ring.
    ///
    /// `mul_add(acc, coeff, monomial_value)` must perform `acc + coeff * value`.
    pub fn fold_terms<T>(&self, mut init: T, mut step: impl FnMut(T, &Monomial, &C) -> T) -> T {
        for (m, c) in &self.terms {
            init = step(init, m, c);
        }
        init
    }

    pub fn map_coeffs<D: Coeff>(&self, mut f: impl FnMut(&C) -> D) -> MultiPoly<D> {
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&C> {
        self.terms.get(m)
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a, C> {
        PolyDisplay { poly: self, names }
    }
}

impl ZPoly {
    /// Exact division of every coefficient by `d`; error text on failure.
    pub fn div_exact_int(&self, d: &BigInt) -> Result<ZPoly, String> {
        assert!(!Zero::is_zero(d));
        let mut out = ZPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let (q, r) = num::Integer::div_rem(c, d);
            if !Zero::is_zero(&r) {
                return Err(format!("coefficient {} not divisible by {}", c, d));
            }
            out.terms.insert(m.clone(), q);
        }
        Ok(out)
    }

    pub fn to_rational(&self) -> QPoly {
        self.map_coeffs(|c| BigRational::from(c.clone()))
    }
}

impl QPoly {
    /// True when every coefficient has denominator 1.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.denom().is_one())
    }

    pub fn to_integer(&self) -> Option<ZPoly> {
        if !self.is_integral() {
            return None;
        }
        Some(self.map_coeffs(|c| c.numer().clone()))
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> QPoly {
        let mut out = QPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m[i] == 0 {
                continue;
            }
            let mut mm = m.clone();
            mm[i] -= 1;
            let factor = BigRational::from(BigInt::from(m[i]));
            out.add_term(mm, c.mul(&factor));
        }
        out
    }
}

pub struct PolyDisplay<'a, C: Coeff> {
    poly: &'a MultiPoly<C>,
    names: &'a [String],
}

impl<C: Coeff> fmt::Display for PolyDisplay<'_, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.poly.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let is_const = m.iter().all(|&e| e == 0);
            if is_const {
                write!(f, "{}", c)?;
            } else {
                let one = C::one();
                if *c != one {
                    write!(f, "{}*", c)?;
                }
                let mut fv = true;
                for (i, &e) in m.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    if !fv {
                        write!(f, "*")?;
                    }
                    fv = false;
                    if e == 1 {
                        write!(f, "{}", self.names[i])?;
                    } else {
                        write!(f, "{}^{}", self.names[i], e)?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn x(i: usize) -> ZPoly {
        ZPoly::var_pow(2, i, 1, BigInt::from(1))
    }

    #[test]
    fn arithmetic_basics() {
        let p = x(0).add(&x(1)); // x + y
        let q = p.mul(&p); // x^2 + 2xy + y^2
        assert_eq!(q.num_terms(), 3);
        assert_eq!(
            q.coeff(&vec![1, 1]).cloned().unwrap(),
            BigInt::from(2)
        );
        assert!(q.sub(&q).is_zero());
        assert_eq!(p.pow(2), q);
    }

    #[test]
    fn exact_division() {
        let p = x(0).scale(&BigInt::from(6));
        let q = p.div_exact_int(&BigInt::from(3)).unwrap();
        assert_eq!(q, x(0).scale(&BigInt::from(2)));
        assert!(p.div_exact_int(&BigInt::from(4)).is_err());
    }

    #[test]
    fn rational_derivative() {
        // d/dx (x^2 y) = 2 x y
        let p = ZPoly::from_terms(2, [(vec![2, 1], BigInt::from(1))]).to_rational();
        let d = p.derivative(0);
        assert_eq!(
            d.coeff(&vec![1, 1]).cloned().unwrap(),
            BigRational::from(BigInt::from(2))
        );
        assert!(d.is_integral());
    }
}
