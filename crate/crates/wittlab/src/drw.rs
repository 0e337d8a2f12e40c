//! Desk-scale relative de Rham-Witt calculus: S-tuples of differential forms
//! over A = Z[t_1..t_d] (rational coefficients internally), the differential
//! d((w_n)) = (n^{-1} d w_n), Frobenius/Verschiebung on form tuples, the
//! generator words `V_{n0}<a0> dV_{n1}<a1> ...` and their realizations, the
//! nine-identity operator suite, and the ghost map to forms over R = A/I.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{QPoly, ZPoly};
use crate::rings::lattice::IntegerLattice;
use crate::truncation::TruncationSet;

/// A single differential r-form over Q[t_1..t_d]: a map from sorted variable
/// index tuples to polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form {
    nvars: usize,
    degree: usize,
    terms: BTreeMap<Vec<usize>, QPoly>,
}

impl Form {
    pub fn zero(nvars: usize, degree: usize) -> Form {
        Form {
            nvars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// Degree-0 form from a polynomial.
    pub fn scalar(p: QPoly) -> Form {
        let nvars = p.nvars();
        let mut f = Form::zero(nvars, 0);
        if !p.is_zero() {
            f.terms.insert(vec![], p);
        }
        f
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &QPoly)> {
        self.terms.iter()
    }

    fn add_term(&mut self, idx: Vec<usize>, p: QPoly) {
        assert_eq!(idx.len(), self.degree);
        if p.is_zero() {
            return;
        }
        match self.terms.entry(idx) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&p);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Form) -> Form {
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (i, p) in &other.terms {
            out.add_term(i.clone(), p.clone());
        }
        out
    }

    pub fn neg(&self) -> Form {
        Form {
            nvars: self.nvars,
            degree: self.degree,
            terms: self.terms.iter().map(|(i, p)| (i.clone(), p.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> Form {
        if c.is_zero() {
            return Form::zero(self.nvars, self.degree);
        }
        Form {
            nvars: self.nvars,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(i, p)| (i.clone(), p.scale(c)))
                .collect(),
        }
    }

    /// Wedge product with the sign of the merge permutation.
    pub fn wedge(&self, other: &Form) -> Form {
        let mut out = Form::zero(self.nvars, self.degree + other.degree);
        for (i1, p1) in &self.terms {
            for (i2, p2) in &other.terms {
                if let Some((idx, sign)) = merge_indices(i1, i2) {
                    let mut p = p1.mul(p2);
                    if sign < 0 {
                        p = p.neg();
                    }
                    out.add_term(idx, p);
                }
            }
        }
        out
    }

    /// Exterior derivative d(f dT) = sum_i (df/dt_i) dt_i ^ dT.
    pub fn exterior_d(&self) -> Form {
        let mut out = Form::zero(self.nvars, self.degree + 1);
        for (idx, p) in &self.terms {
            for i in 0..self.nvars {
                let dp = p.derivative(i);
                if dp.is_zero() {
                    continue;
                }
                if let Some((merged, sign)) = merge_indices(&[i], idx) {
                    let q = if sign < 0 { dp.neg() } else { dp };
                    out.add_term(merged, q);
                }
            }
        }
        out
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|p| p.is_integral())
    }
}

/// Merge two strictly sorted index tuples; `None` on a repeated index,
/// otherwise the sorted union and the sign of the merge.
fn merge_indices(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut sign = 1;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            // b[j] moves past the remaining a-entries
            if (a.len() - i) % 2 == 1 {
                sign = -sign;
            }
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, sign))
}

/// An S-indexed tuple of forms of a common degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormTuple {
    pub set: TruncationSet,
    pub nvars: usize,
    pub degree: usize,
    comps: Vec<Form>,
}

impl FormTuple {
    pub fn zero(set: TruncationSet, nvars: usize, degree: usize) -> FormTuple {
        let comps = vec![Form::zero(nvars, degree); set.len()];
        FormTuple {
            set,
            nvars,
            degree,
            comps,
        }
    }

    pub fn from_components(set: TruncationSet, nvars: usize, comps: Vec<Form>) -> FormTuple {
        assert_eq!(comps.len(), set.len());
        let degree = comps.first().map(|f| f.degree()).unwrap_or(0);
        assert!(comps.iter().all(|f| f.degree() == degree));
        FormTuple {
            set,
            nvars,
            degree,
            comps,
        }
    }

    pub fn get(&self, n: u64) -> &Form {
        &self.comps[self.set.index_of(n).expect("member")]
    }

    pub fn components(&self) -> &[Form] {
        &self.comps
    }

    fn map(&self, f: impl Fn(&Form) -> Form) -> FormTuple {
        let comps: Vec<Form> = self.comps.iter().map(f).collect();
        let degree = comps.first().map(|x| x.degree()).unwrap_or(0);
        FormTuple {
            set: self.set.clone(),
            nvars: self.nvars,
            degree,
            comps,
        }
    }

    pub fn add(&self, other: &FormTuple) -> FormTuple {
        assert_eq!(self.set, other.set);
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.add(b))
            .collect();
        FormTuple {
            set: self.set.clone(),
            nvars: self.nvars,
            degree: self.degree,
            comps,
        }
    }

    pub fn neg(&self) -> FormTuple {
        self.map(|f| f.neg())
    }

    pub fn sub(&self, other: &FormTuple) -> FormTuple {
        self.add(&other.neg())
    }

    pub fn int_scale(&self, c: &BigInt) -> FormTuple {
        let r = BigRational::from(c.clone());
        self.map(|f| f.scale(&r))
    }

    /// Componentwise wedge product.
    pub fn mul(&self, other: &FormTuple) -> FormTuple {
        assert_eq!(self.set, other.set);
        let comps: Vec<Form> = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.wedge(b))
            .collect();
        FormTuple {
            set: self.set.clone(),
            nvars: self.nvars,
            degree: self.degree + other.degree,
            comps,
        }
    }

    /// The de Rham-Witt differential: component n is n^{-1} d(w_n).
    pub fn d_frak(&self) -> FormTuple {
        let comps: Vec<Form> = self
            .set
            .members()
            .map(|n| {
                let inv = BigRational::new(BigInt::one(), BigInt::from(n));
                self.get(n).exterior_d().scale(&inv)
            })
            .collect();
        FormTuple {
            set: self.set.clone(),
            nvars: self.nvars,
            degree: self.degree + 1,
            comps,
        }
    }

    /// Componentwise exterior derivative (no scaling), used by the ghost
    /// compatibility check.
    pub fn d_componentwise(&self) -> FormTuple {
        self.map(|f| f.exterior_d())
    }

    /// F_m selects components (w_{vm}).
    pub fn frobenius(&self, m: u64) -> Result<FormTuple> {
        if !self.set.contains(m) {
            return Err(Error::NotAMember(m));
        }
        let sq = self.set.quotient(m)?;
        let comps = sq.members().map(|v| self.get(v * m).clone()).collect();
        Ok(FormTuple {
            set: sq,
            nvars: self.nvars,
            degree: self.degree,
            comps,
        })
    }

    /// V_n places n * w_{v/n} at multiples of n and 0 elsewhere.
    pub fn verschiebung(&self, n: u64, target: &TruncationSet) -> Result<FormTuple> {
        if !target.contains(n) {
            return Err(Error::NotAMember(n));
        }
        let sq = target.quotient(n)?;
        if sq != self.set {
            return Err(Error::MismatchedShape(format!(
                "V_{} source should be over {}, got {}",
                n, sq, self.set
            )));
        }
        let nb = BigRational::from(BigInt::from(n));
        let comps = target
            .members()
            .map(|m| {
                if m % n == 0 {
                    self.get(m / n).scale(&nb)
                } else {
                    Form::zero(self.nvars, self.degree)
                }
            })
            .collect();
        Ok(FormTuple {
            set: target.clone(),
            nvars: self.nvars,
            degree: self.degree,
            comps,
        })
    }

    pub fn scale_by_index(&self) -> FormTuple {
        // componentwise multiplication by the index: (v)_{v in S} * tuple
        let comps = self
            .set
            .members()
            .map(|n| self.get(n).scale(&BigRational::from(BigInt::from(n))))
            .collect();
        FormTuple {
            set: self.set.clone(),
            nvars: self.nvars,
            degree: self.degree,
            comps,
        }
    }

    pub fn is_integral(&self) -> bool {
        self.comps.iter().all(|f| f.is_integral())
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|f| f.is_zero())
    }
}

/// The tuple `<a>_S = (a^v)_v` for a polynomial a.
pub fn teich_tuple(a: &ZPoly, set: &TruncationSet) -> FormTuple {
    let aq = a.to_rational();
    let comps = set
        .members()
        .map(|v| Form::scalar(aq.pow(v as u32)))
        .collect();
    FormTuple::from_components(set.clone(), a.nvars(), comps)
}

/// `V_n<a> = n (delta_{n|v} a^{v/n})_v` as a degree-0 tuple.
pub fn v_teich_tuple(n: u64, a: &ZPoly, set: &TruncationSet) -> Result<FormTuple> {
    if !set.contains(n) {
        return Err(Error::NotAMember(n));
    }
    let aq = a.to_rational();
    let nb = BigRational::from(BigInt::from(n));
    let comps = set
        .members()
        .map(|v| {
            if v % n == 0 {
                Form::scalar(aq.pow((v / n) as u32).scale(&nb))
            } else {
                Form::zero(a.nvars(), 0)
            }
        })
        .collect();
    Ok(FormTuple::from_components(set.clone(), a.nvars(), comps))
}

/// A generator word `V_{n0}<a0> dV_{n1}<a1> ... dV_{nr}<ar>`.
#[derive(Debug, Clone)]
pub struct GeneratorWord {
    pub leading: (u64, ZPoly),
    pub letters: Vec<(u64, ZPoly)>,
}

/// Realize a word as the componentwise product of `V_{n0}<a0>` and the
/// d V_{imag}<a_i> tuples, computed through the generic differential.
/// The result is asserted integral (it lies in Omega^S, not just its
/// rationalization).
pub fn realize_word(w: &GeneratorWord, set: &TruncationSet) -> Result<FormTuple> {
    let mut acc = v_teich_tuple(w.leading.0, &w.leading.1, set)?;
    for (n, a) in &w.letters {
        let dv = v_teich_tuple(*n, a, set)?.d_frak();
        acc = acc.mul(&dv);
    }
    if !acc.is_integral() {
        return Err(Error::IntegralityViolation(format!(
            "realized word is not integral over {}",
            set
        )));
    }
    Ok(acc)
}

/// Machine-readable result of the operator identity suite.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub samples: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorIdentityReport {
    pub set: Vec<u64>,
    pub nvars: usize,
    pub identities: Vec<IdentityReport>,
}

impl OperatorIdentityReport {
    pub fn all_pass(&self) -> bool {
        self.identities.iter().all(|i| i.failures == 0)
    }
}

fn bezout(a: i64, b: i64) -> (i64, i64) {
    // returns (i, j) with i*a + j*b = gcd(a, b)
    if b == 0 {
        return (1, 0);
    }
    let (i, j) = bezout(b, a % b);
    (j, i - (a / b) * j)
}

/// Evaluate the nine F/V/d operator identities on sampled monomial words over
/// Z[t_1..t_d] and report exact pass/fail per identity.
pub fn verify_operator_identities(set: &TruncationSet, nvars: usize, monomials: &[ZPoly]) -> Result<OperatorIdentityReport> {
    let mut report = OperatorIdentityReport {
        set: set.members().collect(),
        nvars,
        identities: vec![],
    };
    // sample tuples over S/n for relevant n: realized words of length <= 2
    let sample_tuples = |sub: &TruncationSet| -> Result<Vec<FormTuple>> {
        let mut out = vec![];
        for (k, a) in monomials.iter().enumerate() {
            let n0 = sub.members().nth(k % sub.len()).unwrap();
            let w = GeneratorWord {
                leading: (n0, a.clone()),
                letters: vec![(1, monomials[(k + 1) % monomials.len()].clone())],
            };
            out.push(realize_word(&w, sub)?);
            out.push(v_teich_tuple(n0, a, sub)?);
        }
        Ok(out)
    };

    let mut run = |name: &str, pairs: Vec<(FormTuple, FormTuple)>| {
        let failures = pairs.iter().filter(|(l, r)| l != r).count();
        report.identities.push(IdentityReport {
            identity: name.to_string(),
            samples: pairs.len(),
            failures,
        });
    };

    let pairs_nm: Vec<(u64, u64)> = set
        .members()
        .flat_map(|n| set.members().map(move |m| (n, m)))
        .collect();

    // (1) V_n d = n d V_n
    let mut p1 = vec![];
    for n in set.members() {
        let sub = set.quotient(n)?;
        for t in sample_tuples(&sub)? {
            let lhs = t.d_frak().verschiebung(n, set)?;
            let rhs = t.verschiebung(n, set)?.d_frak().int_scale(&BigInt::from(n));
            p1.push((lhs, rhs));
        }
    }
    run("V_n d = n d V_n", p1);

    // (2) m F_m d = d F_m
    let mut p2 = vec![];
    for m in set.members() {
        for t in sample_tuples(set)? {
            let lhs = t.d_frak().frobenius(m)?.int_scale(&BigInt::from(m));
            let rhs = t.frobenius(m)?.d_frak();
            p2.push((lhs, rhs));
        }
    }
    run("m F_m d = d F_m", p2);

    // (3) F_n d V_n = d
    let mut p3 = vec![];
    for n in set.members() {
        let sub = set.quotient(n)?;
        for t in sample_tuples(&sub)? {
            let lhs = t.verschiebung(n, set)?.d_frak().frobenius(n)?;
            let rhs = t.d_frak();
            p3.push((lhs, rhs));
        }
    }
    run("F_n d V_n = d", p3);

    // (4)-(6) on all (n, m) pairs
    let mut p4 = vec![];
    let mut p5 = vec![];
    let mut p6 = vec![];
    for &(n, m) in &pairs_nm {
        let g = num::integer::gcd(n, m);
        let (np, mp) = (n / g, m / g);
        let sub_n = set.quotient(n)?;
        let sub_m = set.quotient(m)?;
        let sub_nm = set.quotient(n * mp)?; // S/[n,m]
        for t in sample_tuples(&sub_n)? {
            let fmdvn = t.verschiebung(n, set)?.d_frak().frobenius(m)?;
            // (4): m' F_m d V_n = d V_{n'} F_{m'}
            let rhs4 = t
                .frobenius(mp)?
                .verschiebung(np, &sub_m)?
                .d_frak();
            p4.push((fmdvn.int_scale(&BigInt::from(mp)), rhs4));
            // (5): n' F_m d V_n = V_{n'} F_{m'} d
            let rhs5 = t.d_frak().frobenius(mp)?.verschiebung(np, &sub_m)?;
            p5.push((fmdvn.int_scale(&BigInt::from(np)), rhs5));
            // (6): F_m d V_n = i d V_{n'} F_{m'} + j V_{n'} F_{m'} d
            let (i, j) = bezout(mp as i64, np as i64);
            let term1 = t
                .frobenius(mp)?
                .verschiebung(np, &sub_m)?
                .d_frak()
                .int_scale(&BigInt::from(i));
            let term2 = t
                .d_frak()
                .frobenius(mp)?
                .verschiebung(np, &sub_m)?
                .int_scale(&BigInt::from(j));
            p6.push((fmdvn.clone(), term1.add(&term2)));
            let _ = &sub_nm;
        }
    }
    run("m' F_m d V_n = d V_n' F_m'", p4);
    run("n' F_m d V_n = V_n' F_m' d", p5);
    run("F_m d V_n = i d V_n' F_m' + j V_n' F_m' d", p6);

    // (7) F_n d <a> = <a^(n-1)> d <a> over S/n
    let mut p7 = vec![];
    for n in set.members() {
        let sub = set.quotient(n)?;
        for a in monomials {
            let lhs = teich_tuple(a, set).d_frak().frobenius(n)?;
            let an1 = teich_tuple(&a.pow((n - 1) as u32), &sub);
            let rhs = an1.mul(&teich_tuple(a, &sub).d_frak());
            p7.push((lhs, rhs));
        }
    }
    run("F_n d <a> = <a^(n-1)> d <a>", p7);

    // (8) F_m d V_n<a> = i d V_{n'}<a^{m'}> + j V_{n'}(<a^{m'-1}> d <a>)
    let mut p8 = vec![];
    for &(n, m) in &pairs_nm {
        let g = num::integer::gcd(n, m);
        let (np, mp) = (n / g, m / g);
        let sub_m = set.quotient(m)?;
        let sub_lcm = sub_m.quotient(np)?; // S/[n,m]
        for a in monomials {
            let sub_n = set.quotient(n)?;
            let lhs = v_teich_tuple(n, a, set)?.d_frak().frobenius(m)?;
            let (i, j) = bezout(mp as i64, np as i64);
            let term1 = v_teich_tuple(np, &a.pow(mp as u32), &sub_m)?
                .d_frak()
                .int_scale(&BigInt::from(i));
            let inner = teich_tuple(&a.pow(mp as u32 - 1), &sub_lcm)
                .mul(&teich_tuple(a, &sub_lcm).d_frak());
            let term2 = inner.verschiebung(np, &sub_m)?.int_scale(&BigInt::from(j));
            p8.push((lhs, term1.add(&term2)));
            let _ = &sub_n;
        }
    }
    run("F_m d V_n<a> = i d V_n'<a^m'> + j V_n'(<a^(m'-1)> d <a>)", p8);

    // (9) V_n(w0 d w1 ... d wr) = V_n(w0) d V_n(w1) ... d V_n(wr), r = 2
    let mut p9 = vec![];
    for n in set.members() {
        let sub = set.quotient(n)?;
        for chunk in monomials.windows(3) {
            let w0 = teich_tuple(&chunk[0], &sub);
            let w1 = teich_tuple(&chunk[1], &sub);
            let w2 = teich_tuple(&chunk[2], &sub);
            let inner = w0.mul(&w1.d_frak()).mul(&w2.d_frak());
            let lhs = inner.verschiebung(n, set)?;
            let rhs = w0
                .verschiebung(n, set)?
                .mul(&w1.verschiebung(n, set)?.d_frak())
                .mul(&w2.verschiebung(n, set)?.d_frak());
            p9.push((lhs, rhs));
        }
    }
    run("V_n(w0 d w1 d w2) = V_n(w0) d V_n(w1) d V_n(w2)", p9);

    Ok(report)
}

// --- ghost map to forms over R = A/I --------------------------------------

/// A presentation 0 -> I -> Z[t_1..t_d] -> R -> 0 with
/// I = (m, f_1(t_1), ..., f_d(t_d)): an optional integer modulus and one
/// monic univariate relation per variable, so R has a finite monomial basis.
#[derive(Debug, Clone)]
pub struct QuotientPresentation {
    pub nvars: usize,
    /// 0 means no integer relation.
    pub int_modulus: BigInt,
    /// coefficient vectors, low-to-high, each monic; entry i is the relation
    /// in variable t_i.
    pub var_moduli: Vec<Vec<BigInt>>,
}

impl QuotientPresentation {
    pub fn new(int_modulus: BigInt, var_moduli: Vec<Vec<BigInt>>) -> Result<QuotientPresentation> {
        for f in &var_moduli {
            if f.len() < 2 || !f.last().unwrap().is_one() {
                return Err(Error::InvalidRing(
                    "variable relations must be monic of degree >= 1".into(),
                ));
            }
        }
        Ok(QuotientPresentation {
            nvars: var_moduli.len(),
            int_modulus,
            var_moduli,
        })
    }

    fn degrees(&self) -> Vec<usize> {
        self.var_moduli.iter().map(|f| f.len() - 1).collect()
    }

    /// Monomial basis of A / (f_1, ..., f_d): exponents below the degrees.
    fn monomial_basis(&self) -> Vec<Vec<u32>> {
        let degs = self.degrees();
        let mut out = vec![];
        let mut cur = vec![0u32; self.nvars];
        loop {
            out.push(cur.clone());
            let mut i = 0;
            loop {
                if i == self.nvars {
                    return out;
                }
                cur[i] += 1;
                if (cur[i] as usize) < degs[i] {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }

    /// Reduce a polynomial by the monic variable relations (and the integer
    /// modulus), landing in the monomial basis.
    fn reduce_poly(&self, p: &ZPoly) -> ZPoly {
        let degs = self.degrees();
        let mut work = p.clone();
        loop {
            let mut target: Option<(Vec<u32>, BigInt, usize)> = None;
            for (mono, c) in work.terms() {
                for i in 0..self.nvars {
                    if mono[i] as usize >= degs[i] {
                        target = Some((mono.clone(), c.clone(), i));
                        break;
                    }
                }
                if target.is_some() {
                    break;
                }
            }
            let Some((mono, c, i)) = target else { break };
            // t_i^deg = -(lower part of f_i); substitute once
            let mut rest = ZPoly::zero(self.nvars);
            let f = &self.var_moduli[i];
            for (e, fc) in f.iter().enumerate().take(f.len() - 1) {
                if fc.is_zero() {
                    continue;
                }
                let mut m2 = mono.clone();
                m2[i] = m2[i] - degs[i] as u32 + e as u32;
                rest.add_term(m2, -fc * &c);
            }
            let mut removed = ZPoly::zero(self.nvars);
            removed.add_term(mono, c);
            work = work.sub(&removed).add(&rest);
        }
        if self.int_modulus.is_zero() {
            work
        } else {
            ZPoly::from_terms(
                self.nvars,
                work.terms()
                    .map(|(m, c)| (m.clone(), num::Integer::mod_floor(c, &self.int_modulus))),
            )
        }
    }

    fn poly_to_vec(&self, basis: &[Vec<u32>], p: &ZPoly) -> Vec<BigInt> {
        let index: BTreeMap<&Vec<u32>, usize> =
            basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut v = vec![BigInt::zero(); basis.len()];
        for (m, c) in p.terms() {
            v[index[m]] = c.clone();
        }
        v
    }

    fn vec_to_poly(&self, basis: &[Vec<u32>], v: &[BigInt]) -> ZPoly {
        ZPoly::from_terms(
            self.nvars,
            v.iter()
                .enumerate()
                .map(|(i, c)| (basis[i].clone(), c.clone())),
        )
    }

    /// The relation lattice for the coefficient of dt_T: spanned by
    /// m * (basis), and f_j'(t_j) * (basis) for j in T.
    fn relation_lattice(&self, basis: &[Vec<u32>], idx_tuple: &[usize]) -> IntegerLattice {
        let mut rows = vec![];
        if !self.int_modulus.is_zero() {
            for (i, _) in basis.iter().enumerate() {
                let mut r = vec![BigInt::zero(); basis.len()];
                r[i] = self.int_modulus.clone();
                rows.push(r);
            }
        }
        for &j in idx_tuple {
            // f_j'(t_j)
            let f = &self.var_moduli[j];
            let mut deriv = ZPoly::zero(self.nvars);
            for (e, fc) in f.iter().enumerate().skip(1) {
                if fc.is_zero() {
                    continue;
                }
                let mut m = vec![0u32; self.nvars];
                m[j] = (e - 1) as u32;
                deriv.add_term(m, fc * BigInt::from(e as u32));
            }
            for b in basis {
                let mut mono = ZPoly::zero(self.nvars);
                mono.add_term(b.clone(), BigInt::one());
                let prod = self.reduce_poly(&deriv.mul(&mono));
                rows.push(self.poly_to_vec(basis, &prod));
            }
        }
        IntegerLattice::span(&rows, basis.len())
    }

    /// Reduce an integral form tuple modulo the differential graded ideal
    /// generated by I: coefficients land in canonical representatives of
    /// A/(I + (f_j' : j in T)) per index tuple T.
    pub fn ghost_form_map(&self, t: &FormTuple) -> Result<FormTuple> {
        if !t.is_integral() {
            return Err(Error::IntegralityViolation(
                "ghost form map requires an integral tuple".into(),
            ));
        }
        if t.nvars != self.nvars {
            return Err(Error::MismatchedShape("variable count differs".into()));
        }
        let basis = self.monomial_basis();
        let mut lattices: BTreeMap<Vec<usize>, IntegerLattice> = BTreeMap::new();
        let comps = t
            .components()
            .iter()
            .map(|form| {
                let mut out = Form::zero(self.nvars, form.degree());
                for (idx, p) in form.terms() {
                    let zp = p.to_integer().expect("integral");
                    let reduced = self.reduce_poly(&zp);
                    let lat = lattices
                        .entry(idx.clone())
                        .or_insert_with(|| self.relation_lattice(&basis, idx));
                    let v = self.poly_to_vec(&basis, &reduced);
                    let canon = lat.reduce(&v);
                    out.add_term(idx.clone(), self.vec_to_poly(&basis, &canon).to_rational());
                }
                out
            })
            .collect();
        Ok(FormTuple::from_components(t.set.clone(), self.nvars, comps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zmono(nvars: usize, exps: &[u32]) -> ZPoly {
        ZPoly::from_terms(nvars, [(exps.to_vec(), BigInt::one())])
    }

    #[test]
    fn wedge_signs_and_d_squared() {
        // d(x dy) = dx ^ dy, d(y dx) = dy ^ dx = -dx ^ dy
        let x = zmono(2, &[1, 0]).to_rational();
        let y = zmono(2, &[0, 1]).to_rational();
        let mut xdy = Form::zero(2, 1);
        xdy.add_term(vec![1], x.clone());
        let d1 = xdy.exterior_d();
        let mut ydx = Form::zero(2, 1);
        ydx.add_term(vec![0], y.clone());
        let d2 = ydx.exterior_d();
        assert_eq!(d1, d2.neg());
        // d^2 = 0 on a scalar
        let f = Form::scalar(x.mul(&y).mul(&x));
        assert!(f.exterior_d().exterior_d().is_zero());
    }

    #[test]
    fn word_realizations_by_hand() {
        let s = TruncationSet::new([1, 2, 4]).unwrap();
        // degree 0: V_2<a> = (0, 2a, 2a^2)
        let a = zmono(1, &[1]);
        let t = v_teich_tuple(2, &a, &s).unwrap();
        assert!(t.get(1).is_zero());
        let two_a = a.to_rational().scale(&BigRational::from(BigInt::from(2)));
        assert_eq!(t.get(2), &Form::scalar(two_a));
        // d V_1<a> = (a^(v-1) da)_v: check integrality and shape at v = 4
        let dv = v_teich_tuple(1, &a, &s).unwrap().d_frak();
        assert!(dv.is_integral());
        let mut expected = Form::zero(1, 1);
        expected.add_term(vec![0], zmono(1, &[3]).to_rational());
        assert_eq!(dv.get(4), &expected);
        // word with a_0 = 0 realizes to zero
        let w = GeneratorWord {
            leading: (1, ZPoly::zero(1)),
            letters: vec![(2, a.clone())],
        };
        assert!(realize_word(&w, &s).unwrap().is_zero());
    }

    #[test]
    fn realized_words_are_integral_and_d_squared_vanishes() {
        let s = TruncationSet::new([1, 2, 3, 4, 6, 12]).unwrap();
        let monos = [zmono(2, &[1, 0]), zmono(2, &[0, 1]), zmono(2, &[1, 1])];
        for (i, a0) in monos.iter().enumerate() {
            let w = GeneratorWord {
                leading: (if i % 2 == 0 { 2 } else { 3 }, a0.clone()),
                letters: vec![
                    (1, monos[(i + 1) % 3].clone()),
                    (2, monos[(i + 2) % 3].clone()),
                ],
            };
            let t = realize_word(&w, &s).unwrap();
            assert!(t.is_integral());
            assert!(t.d_frak().d_frak().is_zero());
        }
    }

    #[test]
    fn words_beyond_variable_count_vanish() {
        // with d = 2 variables, any realized word of degree 3 is zero
        let s = TruncationSet::new([1, 2]).unwrap();
        let w = GeneratorWord {
            leading: (1, zmono(2, &[1, 1])),
            letters: vec![
                (1, zmono(2, &[1, 0])),
                (2, zmono(2, &[0, 1])),
                (1, zmono(2, &[2, 0])),
            ],
        };
        let t = realize_word(&w, &s).unwrap();
        assert_eq!(t.degree, 3);
        assert!(t.is_zero());
    }

    #[test]
    fn form_level_operator_relations() {
        // F_n F_m = F_{nm}, V_n V_m = V_{nm}, and F_m V_n = (n,m) V_{n'} F_{m'}
        // hold for the componentwise F/V on arbitrary form tuples.
        let s = TruncationSet::new([1, 2, 3, 4, 6, 12]).unwrap();
        let words = [
            GeneratorWord {
                leading: (2, zmono(2, &[1, 0])),
                letters: vec![(3, zmono(2, &[0, 1]))],
            },
            GeneratorWord {
                leading: (1, zmono(2, &[1, 1])),
                letters: vec![(2, zmono(2, &[2, 0]))],
            },
        ];
        for w in &words {
            let t = realize_word(w, &s).unwrap();
            for &(n, m) in &[(2u64, 3u64), (2, 2), (3, 2), (2, 6)] {
                if s.contains(n * m) {
                    assert_eq!(
                        t.frobenius(n).unwrap().frobenius(m).unwrap(),
                        t.frobenius(n * m).unwrap()
                    );
                    let sub = s.quotient(n * m).unwrap();
                    let b = t.frobenius(n * m).unwrap();
                    let v1 = b.verschiebung(n * m, &s).unwrap();
                    let v2 = b
                        .verschiebung(m, &s.quotient(n).unwrap())
                        .unwrap()
                        .verschiebung(n, &s)
                        .unwrap();
                    assert_eq!(v1, v2);
                    let _ = sub;
                }
                // F_m V_n = (n,m) V_{n'} F_{m'} from S/n to S/m
                let g = num::integer::gcd(n, m);
                let (np, mp) = (n / g, m / g);
                let sub_n = s.quotient(n).unwrap();
                if !s.quotient(m).unwrap().contains(np) {
                    continue;
                }
                let b = t.frobenius(n).unwrap();
                let lhs = b.verschiebung(n, &s).unwrap().frobenius(m).unwrap();
                let rhs = b
                    .frobenius(mp)
                    .unwrap()
                    .verschiebung(np, &s.quotient(m).unwrap())
                    .unwrap()
                    .int_scale(&BigInt::from(g));
                assert_eq!(lhs, rhs);
                let _ = sub_n;
            }
        }
    }

    #[test]
    fn d_of_constants_and_frobenius_of_v() {
        let s = TruncationSet::new([1, 2, 4]).unwrap();
        // d of a constant degree-0 tuple is zero
        let c = teich_tuple(&ZPoly::one(1), &s);
        assert!(c.d_frak().is_zero());
        // F_n(V_n<a>) = n <a> over S/n
        let a = zmono(1, &[1]);
        for n in [2u64, 4] {
            let v = v_teich_tuple(n, &a, &s).unwrap();
            let f = v.frobenius(n).unwrap();
            let sub = s.quotient(n).unwrap();
            let expected = teich_tuple(&a, &sub).int_scale(&BigInt::from(n));
            assert_eq!(f, expected);
        }
    }

    #[test]
    fn operator_identity_suite_smoke() {
        let s = TruncationSet::new([1, 2, 3, 6]).unwrap();
        let monos = vec![
            zmono(2, &[1, 0]),
            zmono(2, &[0, 1]),
            zmono(2, &[1, 1]),
            zmono(2, &[2, 0]),
        ];
        let report = verify_operator_identities(&s, 2, &monos).unwrap();
        assert!(report.all_pass(), "{:?}", report);
        assert_eq!(report.identities.len(), 9);
    }

    #[test]
    fn ghost_map_kills_ideal_words() {
        // R = F_2[u]/(u^3): presentation I = (2, u^3) of A = Z[u]
        let pres = QuotientPresentation::new(
            BigInt::from(2),
            vec![vec![
                BigInt::zero(),
                BigInt::zero(),
                BigInt::zero(),
                BigInt::one(),
            ]],
        )
        .unwrap();
        let s = TruncationSet::new([1, 2, 4]).unwrap();
        // a = u^3 lies in I: the word d V_1<a> reduces to 0
        let a = zmono(1, &[3]);
        let w = GeneratorWord {
            leading: (1, ZPoly::one(1)),
            letters: vec![(1, a.clone())],
        };
        let t = realize_word(&w, &s).unwrap();
        let red = pres.ghost_form_map(&t).unwrap();
        assert!(red.is_zero(), "{:?}", red);
        // a = 2u also lies in I
        let w2 = GeneratorWord {
            leading: (1, zmono(1, &[1]).scale(&BigInt::from(2))),
            letters: vec![(1, zmono(1, &[1]))],
        };
        let red2 = pres.ghost_form_map(&realize_word(&w2, &s).unwrap()).unwrap();
        assert!(red2.is_zero(), "{:?}", red2);
        // the degree-0 ghost map matches the Witt-side ghost of V_2<u>
        let v2u = v_teich_tuple(2, &zmono(1, &[1]), &s).unwrap();
        let red3 = pres.ghost_form_map(&v2u).unwrap();
        // ghost components: (0, 2u, 2u^2) reduced mod (2, u^3) = (0, 0, 0)
        assert!(red3.is_zero());
        // but V_2<1+u> has ghost (0, 2(1+u), 2(1+u)^2) -> 0 mod 2 as well;
        // use an odd multiple instead: <u> has ghost (u, u^2, u^4=u^3*u -> 0 mod u^3)
        let tu = teich_tuple(&zmono(1, &[1]), &s);
        let red4 = pres.ghost_form_map(&tu).unwrap();
        assert_eq!(red4.get(1), &Form::scalar(zmono(1, &[1]).to_rational()));
        assert_eq!(red4.get(2), &Form::scalar(zmono(1, &[2]).to_rational()));
        assert!(red4.get(4).is_zero());
    }

    #[test]
    fn ghost_map_compatibility_eq_40() {
        // d G(w) = (v)_v G(d w) for sampled words, R = F_3[u]/(u^2-1)
        let pres = QuotientPresentation::new(
            BigInt::from(3),
            vec![vec![-BigInt::one() + BigInt::from(0), BigInt::zero(), BigInt::one()]],
        )
        .unwrap();
        let s = TruncationSet::new([1, 2]).unwrap();
        let words = [
            GeneratorWord {
                leading: (1, zmono(1, &[1])),
                letters: vec![],
            },
            GeneratorWord {
                leading: (2, zmono(1, &[1])),
                letters: vec![],
            },
            GeneratorWord {
                leading: (1, zmono(1, &[2])),
                letters: vec![(1, zmono(1, &[1]))],
            },
        ];
        for w in &words {
            let t = realize_word(w, &s).unwrap();
            let dt = t.d_frak();
            assert!(dt.is_integral());
            let lhs = pres.ghost_form_map(&t).unwrap().d_componentwise();
            let lhs_red = pres.ghost_form_map(&lhs).unwrap();
            let rhs = pres.ghost_form_map(&dt.scale_by_index()).unwrap();
            assert_eq!(lhs_red, rhs);
        }
    }

    #[test]
    fn singleton_set_collapses_to_plain_forms() {
        // S = {1}: d_frak = d and realization is an ordinary form
        let s = TruncationSet::new([1]).unwrap();
        let a = zmono(1, &[2]);
        let w = GeneratorWord {
            leading: (1, a.clone()),
            letters: vec![(1, zmono(1, &[1]))],
        };
        let t = realize_word(&w, &s).unwrap();
        // a^1 * d(u) with a = u^2: u^2 du
        let mut expected = Form::zero(1, 1);
        expected.add_term(vec![0], zmono(1, &[2]).to_rational());
        assert_eq!(t.get(1), &expected);
    }
}
