//! The semigroup algebra ZR, its augmentation ideal powers I^n as integer
//! lattices, the maps `alpha_n : ZR/I^n -> W_n(R)`, the Galois-ring
//! presentation `GR(p^n, k) = W_n(F_{p^k})`, the non-perfect ideals I_n, and
//! the arithmetic derivation delta.

use std::collections::BTreeMap;

use num::{BigInt, Integer, One, Zero};

use crate::error::{Error, Result};
use crate::rings::frobenius::frobenius_lift;
use crate::rings::lattice::{preimage_lattice, IntegerLattice};
use crate::rings::{univar, Payload, Ring, RingElement, RingKind};
use crate::truncation::TruncationSet;
use crate::witt::{teichmuller, witt_add, witt_int_mul, WittVector};

/// Element of ZR: a finitely supported integer combination of symbols `[r]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SemigroupElement {
    pub ring: Ring,
    terms: BTreeMap<RingElement, BigInt>,
}

impl SemigroupElement {
    pub fn zero(ring: Ring) -> SemigroupElement {
        SemigroupElement {
            ring,
            terms: BTreeMap::new(),
        }
    }

    /// The symbol `[r]`.
    pub fn symbol(r: RingElement) -> SemigroupElement {
        let ring = r.ring.clone();
        let mut terms = BTreeMap::new();
        terms.insert(r, BigInt::one());
        SemigroupElement { ring, terms }
    }

    pub fn from_terms(
        ring: Ring,
        it: impl IntoIterator<Item = (RingElement, BigInt)>,
    ) -> SemigroupElement {
        let mut out = SemigroupElement::zero(ring);
        for (r, c) in it {
            out.add_term(r, c);
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&RingElement, &BigInt)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, r: RingElement, c: BigInt) {
        if c.is_zero() {
            return;
        }
        assert_eq!(r.ring, self.ring);
        match self.terms.entry(r) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &SemigroupElement) -> SemigroupElement {
        let mut out = self.clone();
        for (r, c) in &other.terms {
            out.add_term(r.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> SemigroupElement {
        SemigroupElement {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(r, c)| (r.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &SemigroupElement) -> SemigroupElement {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigInt) -> SemigroupElement {
        if c.is_zero() {
            return SemigroupElement::zero(self.ring.clone());
        }
        SemigroupElement {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(r, k)| (r.clone(), k * c)).collect(),
        }
    }

    /// Multiplication induced by `[r][s] = [rs]`.
    pub fn mul(&self, other: &SemigroupElement) -> SemigroupElement {
        let mut out = SemigroupElement::zero(self.ring.clone());
        for (r, a) in &self.terms {
            for (s, b) in &other.terms {
                out.add_term(self.ring.mul(r, s), a * b);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> SemigroupElement {
        let mut acc = SemigroupElement::symbol(self.ring.one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// The augmentation `pi(sum n_r [r]) = sum n_r r` computed in R.
    pub fn augmentation(&self) -> RingElement {
        let mut acc = self.ring.zero();
        for (r, c) in &self.terms {
            acc = self.ring.add(&acc, &self.ring.int_mul(c, r));
        }
        acc
    }

    /// The lifted Frobenius `phi([r]) = [r^p]`, applied m times.
    pub fn phi(&self, p: u64, m: u32) -> SemigroupElement {
        let e = {
            let mut e = 1u64;
            for _ in 0..m {
                e = e.saturating_mul(p);
            }
            e
        };
        SemigroupElement {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(r, c)| (self.ring.pow(r, e), c.clone()))
                .fold(BTreeMap::new(), |mut acc, (r, c)| {
                    let e = acc.entry(r).or_insert_with(BigInt::zero);
                    *e += c;
                    acc
                })
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// The unique ring homomorphism ZR -> W_S(R) extending the Teichmueller
    /// map: `sum n_r <r>`.
    pub fn alpha_to_witt(&self, set: &TruncationSet) -> Result<WittVector> {
        let mut acc = WittVector::zero(set.clone(), self.ring.clone());
        for (r, c) in &self.terms {
            let t = witt_int_mul(c, &teichmuller(r, set))?;
            acc = witt_add(&acc, &t)?;
        }
        Ok(acc)
    }
}

/// The arithmetic derivation delta(a) = (phi(a) - a^p)/p on ZR; the numerator
/// is divisible by p, and a failure signals a bug.
pub fn arithmetic_derivation(a: &SemigroupElement, p: u64) -> Result<SemigroupElement> {
    let num = a.phi(p, 1).sub(&a.pow(p as u32));
    let pb = BigInt::from(p);
    let mut terms = BTreeMap::new();
    for (r, c) in &num.terms {
        let (q, rem) = c.div_rem(&pb);
        if !rem.is_zero() {
            return Err(Error::NotDivisible(format!(
                "derivation numerator coefficient {} at [{}]",
                c, r
            )));
        }
        terms.insert(r.clone(), q);
    }
    Ok(SemigroupElement {
        ring: a.ring.clone(),
        terms,
    })
}

/// Fixed enumeration of a finite ring R, used as the Z-basis of ZR.
pub struct SemigroupBasis {
    pub ring: Ring,
    pub elements: Vec<RingElement>,
    index: BTreeMap<RingElement, usize>,
}

impl SemigroupBasis {
    pub fn new(ring: &Ring, cap: u64) -> Result<SemigroupBasis> {
        let elements = ring
            .enumerate(cap)
            .ok_or_else(|| Error::TooLarge(format!("ring is infinite or larger than {}", cap)))?;
        let index = elements
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        Ok(SemigroupBasis {
            ring: ring.clone(),
            elements,
            index,
        })
    }

    pub fn rank(&self) -> usize {
        self.elements.len()
    }

    pub fn to_vector(&self, x: &SemigroupElement) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.rank()];
        for (r, c) in x.terms() {
            v[self.index[r]] = c.clone();
        }
        v
    }

    pub fn from_vector(&self, v: &[BigInt]) -> SemigroupElement {
        SemigroupElement::from_terms(
            self.ring.clone(),
            v.iter()
                .enumerate()
                .map(|(i, c)| (self.elements[i].clone(), c.clone())),
        )
    }

    /// Additive coordinates of a ring element and their common modulus,
    /// used to present (R, +) as a product of cyclic groups.
    fn additive_coords(&self, r: &RingElement) -> (Vec<BigInt>, BigInt, usize) {
        match (self.ring.kind(), &r.payload) {
            (RingKind::IntegersMod { m }, Payload::Residue(v)) => (vec![v.clone()], m.clone(), 1),
            (RingKind::PrimeField { p }, Payload::Residue(v)) => {
                (vec![v.clone()], BigInt::from(*p), 1)
            }
            (RingKind::FiniteField { p, k, .. }, Payload::PolyQuot(v)) => {
                let mut c = v.clone();
                c.resize(*k as usize, BigInt::zero());
                (c, BigInt::from(*p), *k as usize)
            }
            (RingKind::GaloisRing { p, n, k, .. }, Payload::PolyQuot(v)) => {
                let mut c = v.clone();
                c.resize(*k as usize, BigInt::zero());
                (c, BigInt::from(*p).pow(*n), *k as usize)
            }
            (RingKind::FpQuotient { p, modulus }, Payload::PolyQuot(v)) => {
                let k = modulus.len() - 1;
                let mut c = v.clone();
                c.resize(k, BigInt::zero());
                (c, BigInt::from(*p), k)
            }
            _ => panic!("not a finite ring with additive coordinates"),
        }
    }

    /// The augmentation ideal I = ker(pi : Z^q -> (R, +)) as a lattice.
    pub fn augmentation_ideal(&self) -> IntegerLattice {
        let q = self.rank();
        let (_, modulus, krows) = self.additive_coords(&self.ring.zero());
        // matrix of pi in additive coordinates
        let mut m = vec![vec![BigInt::zero(); q]; krows];
        for (j, e) in self.elements.iter().enumerate() {
            let (coords, _, _) = self.additive_coords(e);
            for (i, c) in coords.iter().enumerate() {
                m[i][j] = c.clone();
            }
        }
        // target lattice: modulus * Z^krows
        let target: Vec<Vec<BigInt>> = (0..krows)
            .map(|i| {
                let mut row = vec![BigInt::zero(); krows];
                row[i] = modulus.clone();
                row
            })
            .collect();
        preimage_lattice(&m, q, &target)
    }

    /// Matrix of `phi^m : ZR -> ZR`, `[r] -> [r^(p^m)]`, in the chosen basis.
    pub fn phi_matrix(&self, p: u64, m: u32) -> Vec<Vec<BigInt>> {
        let q = self.rank();
        let mut mat = vec![vec![BigInt::zero(); q]; q];
        let mut e = 1u64;
        for _ in 0..m {
            e = e.saturating_mul(p);
        }
        for (j, r) in self.elements.iter().enumerate() {
            let img = self.ring.pow(r, e);
            let i = self.index[&img];
            mat[i][j] += BigInt::one();
        }
        mat
    }

    /// Whether the Frobenius r -> r^p is injective on R.
    pub fn frobenius_injective(&self, p: u64) -> bool {
        let mut seen = BTreeMap::new();
        for r in &self.elements {
            let img = self.ring.pow(r, p);
            if seen.insert(img, r.clone()).is_some() {
                return false;
            }
        }
        true
    }
}

/// The lattice model of I^n (or I_n) together with its finite quotient data.
pub struct IdealPowerModel {
    pub ring: Ring,
    pub level: u32,
    pub lattice: IntegerLattice,
    /// Smith normal form invariant factors of Z^q / lattice (1-entries kept).
    pub invariants: Vec<BigInt>,
}

impl IdealPowerModel {
    fn new(ring: &Ring, level: u32, lattice: IntegerLattice) -> IdealPowerModel {
        let invariants =
            crate::rings::lattice::smith_invariants(lattice.basis(), lattice.ambient_rank());
        IdealPowerModel {
            ring: ring.clone(),
            level,
            lattice,
            invariants,
        }
    }

    /// |ZR / lattice| when finite.
    pub fn quotient_size(&self) -> Option<BigInt> {
        self.lattice
            .index_in(&IntegerLattice::full(self.lattice.ambient_rank()))
            .ok()
            .flatten()
    }
}

/// I^n as the HNF span of all n-fold products of the I-basis, with the span
/// re-taken until stable.
pub fn ideal_power(basis: &SemigroupBasis, n: u32) -> IdealPowerModel {
    assert!(n >= 1);
    let i1 = basis.augmentation_ideal();
    if n == 1 {
        return IdealPowerModel::new(&basis.ring, 1, i1);
    }
    let gens: Vec<SemigroupElement> = i1.basis().iter().map(|v| basis.from_vector(v)).collect();
    let mut current: Vec<SemigroupElement> = gens.clone();
    for _ in 1..n {
        let mut next = vec![];
        for a in &current {
            for g in &gens {
                next.push(a.mul(g));
            }
        }
        current = dedup_span(basis, next);
    }
    let rows: Vec<Vec<BigInt>> = current.iter().map(|e| basis.to_vector(e)).collect();
    let mut lat = IntegerLattice::span(&rows, basis.rank());
    // saturate: re-span products of the HNF basis with the I-generators
    loop {
        let cur: Vec<SemigroupElement> = lat.basis().iter().map(|v| basis.from_vector(v)).collect();
        let lat2 = IntegerLattice::span(
            &cur.iter().map(|e| basis.to_vector(e)).collect::<Vec<_>>(),
            basis.rank(),
        );
        if lat2 == lat {
            break;
        }
        lat = lat2;
    }
    IdealPowerModel::new(&basis.ring, n, lat)
}

/// Reduce a list of products to an HNF basis to keep the product lists short.
fn dedup_span(basis: &SemigroupBasis, elems: Vec<SemigroupElement>) -> Vec<SemigroupElement> {
    let rows: Vec<Vec<BigInt>> = elems.iter().map(|e| basis.to_vector(e)).collect();
    IntegerLattice::span(&rows, basis.rank())
        .basis()
        .iter()
        .map(|v| basis.from_vector(v))
        .collect()
}

/// `alpha_n : ZR -> W_n(R)`, `x -> sum n_r <r>`, over S = {1, p, ..., p^(n-1)}.
pub fn alpha_n(x: &SemigroupElement, n: u32) -> Result<WittVector> {
    let p = x
        .ring
        .is_fp_algebra()
        .ok_or_else(|| Error::Type("alpha_n requires an F_p-algebra".into()))?;
    let set = TruncationSet::p_typical(p, n);
    x.alpha_to_witt(&set)
}

/// The explicit inverse for perfect R: `(r_0,...,r_{n-1}) -> sum p^v [phi^{-v}(r_v)]`.
pub fn alpha_n_inverse(w: &WittVector, basis: &SemigroupBasis) -> Result<SemigroupElement> {
    let p = w
        .ring
        .is_fp_algebra()
        .ok_or_else(|| Error::Type("alpha_n_inverse requires an F_p-algebra".into()))?;
    // invert Frobenius by exhaustion
    let mut inv: BTreeMap<RingElement, RingElement> = BTreeMap::new();
    for r in &basis.elements {
        let img = basis.ring.pow(r, p);
        if inv.insert(img, r.clone()).is_some() {
            return Err(Error::NotPerfect);
        }
    }
    if inv.len() != basis.elements.len() {
        return Err(Error::NotPerfect);
    }
    let mut out = SemigroupElement::zero(w.ring.clone());
    let set = w.set.clone();
    for (v, m) in set.members().enumerate() {
        let mut r = w.get(m).clone();
        for _ in 0..v {
            r = inv
                .get(&r)
                .cloned()
                .ok_or(Error::NotPerfect)?;
        }
        out = out.add(&SemigroupElement::symbol(r).scale(&BigInt::from(p).pow(v as u32)));
    }
    Ok(out)
}

/// I_n = phi^(1-n)(I^n) as the preimage lattice of I^n under phi^(n-1);
/// requires the Frobenius of R to be injective.
pub fn ideal_in(basis: &SemigroupBasis, n: u32) -> Result<IdealPowerModel> {
    let p = basis
        .ring
        .is_fp_algebra()
        .ok_or_else(|| Error::Type("I_n requires an F_p-algebra".into()))?;
    if !basis.frobenius_injective(p) {
        return Err(Error::FrobeniusNotInjective);
    }
    Ok(ideal_in_unchecked(basis, n))
}

/// The preimage-lattice computation of I_n without the injectivity gate;
/// used to analyze rings where the Frobenius fails to be injective.
pub fn ideal_in_unchecked(basis: &SemigroupBasis, n: u32) -> IdealPowerModel {
    let p = basis.ring.is_fp_algebra().expect("F_p-algebra");
    let i_n = ideal_power(basis, n);
    let m = basis.phi_matrix(p, n - 1);
    let lat = preimage_lattice(&m, basis.rank(), i_n.lattice.basis());
    IdealPowerModel::new(&basis.ring, n, lat)
}

/// A witnessed certificate that phi^(n-1)(a) lies in I^n: an explicit
/// expansion into products of n augmentation-ideal elements.
pub struct InCertificate {
    /// Each term is (coefficient, n factors), every factor in I.
    pub terms: Vec<(BigInt, Vec<SemigroupElement>)>,
}

/// Verify the certificate exactly: every factor is in I and the expansion
/// equals phi^(n-1)(a).
pub fn verify_in_certificate(
    a: &SemigroupElement,
    n: u32,
    cert: &InCertificate,
) -> Result<()> {
    let p = a
        .ring
        .is_fp_algebra()
        .ok_or_else(|| Error::Type("certificate check requires an F_p-algebra".into()))?;
    let mut total = SemigroupElement::zero(a.ring.clone());
    for (c, factors) in &cert.terms {
        if factors.len() != n as usize {
            return Err(Error::Type(format!(
                "certificate term has {} factors, expected {}",
                factors.len(),
                n
            )));
        }
        let mut prod = SemigroupElement::symbol(a.ring.one());
        for f in factors {
            if !a.ring.is_zero(&f.augmentation()) {
                return Err(Error::Type("certificate factor is not in I".into()));
            }
            prod = prod.mul(f);
        }
        total = total.add(&prod.scale(c));
    }
    if total != a.phi(p, n - 1) {
        return Err(Error::Type(
            "certificate expansion does not equal phi^(n-1)(a)".into(),
        ));
    }
    Ok(())
}

/// The residue field F_{p^k} of GR(p^n, k), with the reduced modulus.
pub fn galois_residue_field(gr: &Ring) -> Result<Ring> {
    match gr.kind() {
        RingKind::GaloisRing { p, k, modulus, .. } => {
            if *k == 1 {
                Ring::prime_field(*p)
            } else {
                let pb = BigInt::from(*p);
                Ring::finite_field(*p, *k, univar::reduce_mod(modulus, &pb))
            }
        }
        _ => Err(Error::Type("expected a Galois ring".into())),
    }
}

/// alpha_n : GR(p^n, k) -> W_n(F_{p^k}), computed as the ghost-inverse of
/// (a, phi(a), ..., phi^{n-1}(a)) with exact division and precision
/// bookkeeping: the coordinate at p^j is recovered mod p^(n-j) and then
/// reduced into the residue field.
pub fn galois_ring_alpha(a: &RingElement) -> Result<WittVector> {
    let (p, n, modulus) = match a.ring.kind() {
        RingKind::GaloisRing { p, n, modulus, .. } => (*p, *n, modulus.clone()),
        _ => return Err(Error::Type("expected a Galois ring element".into())),
    };
    let residue = galois_residue_field(&a.ring)?;
    let pb = BigInt::from(p);
    let c_full = pb.pow(n);
    let lift = frobenius_lift(&a.ring, p)?;
    // ghost components phi^j(a) as coefficient vectors mod p^n
    let mut ghost: Vec<Vec<BigInt>> = Vec::with_capacity(n as usize);
    let mut cur = a.clone();
    for _ in 0..n {
        ghost.push(match &cur.payload {
            Payload::PolyQuot(v) => v.clone(),
            _ => unreachable!(),
        });
        cur = lift.apply(&cur);
    }
    // solve sum_{i <= j} p^i a_i^(p^(j-i)) = ghost[j] for a_j, working mod p^n;
    // a_i is known mod p^(n-i), which suffices for every later term.
    let mut reps: Vec<Vec<BigInt>> = Vec::with_capacity(n as usize);
    let mut comps: Vec<RingElement> = Vec::with_capacity(n as usize);
    for j in 0..n {
        let mut rest = ghost[j as usize].clone();
        for i in 0..j {
            let e = {
                let mut e = BigInt::one();
                for _ in 0..(j - i) {
                    e *= &pb;
                }
                e
            };
            let powed = univar::powmod(&reps[i as usize], &e, &modulus, &c_full);
            let scaled = univar::scale(&powed, &pb.pow(i), &c_full);
            rest = univar::add(&rest, &univar::neg(&scaled, &c_full), &c_full);
        }
        let pj = pb.pow(j);
        let mut divided = Vec::with_capacity(rest.len());
        for coeff in &rest {
            let (q, r) = coeff.div_rem(&pj);
            if !r.is_zero() {
                return Err(Error::PrecisionExhausted(format!(
                    "coordinate at p^{} not divisible by p^{}",
                    j, j
                )));
            }
            divided.push(q);
        }
        let divided = univar::trim(divided);
        // reduce mod p into the residue field
        let red = univar::reduce_mod(&divided, &pb);
        comps.push(match residue.kind() {
            RingKind::PrimeField { .. } => {
                let c0 = red.first().cloned().unwrap_or_else(BigInt::zero);
                residue.from_int(&c0)
            }
            _ => crate::rings::poly_quot_element(&residue, red.clone()),
        });
        reps.push(divided);
    }
    WittVector::new(TruncationSet::p_typical(p, n), residue, comps)
}

/// Exhaustive check that `galois_ring_alpha` is a multiplicative, additive
/// bijection GR(p^n,k) -> W_n(F_{p^k}); returns the forward map table.
pub fn galois_alpha_table(gr: &Ring, cap: u64) -> Result<Vec<(RingElement, WittVector)>> {
    let elems = gr
        .enumerate(cap)
        .ok_or_else(|| Error::TooLarge("Galois ring too large to enumerate".into()))?;
    let mut table = Vec::with_capacity(elems.len());
    let mut seen = std::collections::BTreeSet::new();
    for e in elems {
        let w = galois_ring_alpha(&e)?;
        if !seen.insert(format!("{:?}", w.components())) {
            return Err(Error::Type("galois_ring_alpha is not injective".into()));
        }
        table.push((e, w));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witt::witt_mul;

    fn f2() -> Ring {
        Ring::prime_field(2).unwrap()
    }

    #[test]
    fn augmentation_ideal_of_f2() {
        // ZF_2 = Z[0] + Z[1]; I has index 2 with basis {[0], 2[1]} up to HNF...
        let b = SemigroupBasis::new(&f2(), 10).unwrap();
        let i1 = b.augmentation_ideal();
        assert_eq!(
            i1.index_in(&IntegerLattice::full(2)).unwrap(),
            Some(BigInt::from(2))
        );
        // [0] and 2[1] are members, [1] is not
        let zero_sym = b.to_vector(&SemigroupElement::symbol(f2().zero()));
        assert!(i1.contains(&zero_sym));
        let two_one = b.to_vector(&SemigroupElement::symbol(f2().one()).scale(&BigInt::from(2)));
        assert!(i1.contains(&two_one));
        let one_sym = b.to_vector(&SemigroupElement::symbol(f2().one()));
        assert!(!i1.contains(&one_sym));
    }

    #[test]
    fn ideal_powers_match_witt_sizes() {
        // |ZF_2 / I^2| = 4 = |W_2(F_2)|
        let b = SemigroupBasis::new(&f2(), 10).unwrap();
        let i2 = ideal_power(&b, 2);
        assert_eq!(i2.quotient_size(), Some(BigInt::from(4)));
        // |ZF_4 / I^2| = 16
        let f4 = Ring::finite_field_default(2, 2).unwrap();
        let b4 = SemigroupBasis::new(&f4, 10).unwrap();
        let i2_4 = ideal_power(&b4, 2);
        assert_eq!(i2_4.quotient_size(), Some(BigInt::from(16)));
        // towers: I^(n+1) inside I^n, and I * I^n inside I^(n+1)
        let i1 = ideal_power(&b, 1);
        let i3 = ideal_power(&b, 3);
        assert!(i3.lattice.is_sublattice_of(&i2.lattice));
        assert!(i2.lattice.is_sublattice_of(&i1.lattice));
        for u in i1.lattice.basis() {
            for v in i2.lattice.basis() {
                let prod = b.from_vector(u).mul(&b.from_vector(v));
                assert!(i3.lattice.contains(&b.to_vector(&prod)));
            }
        }
    }

    #[test]
    fn alpha_2_of_three_ones() {
        // alpha_2(3[1]) = (1,1) in W_2(F_2)
        let x = SemigroupElement::symbol(f2().one()).scale(&BigInt::from(3));
        let w = alpha_n(&x, 2).unwrap();
        assert_eq!(w.components(), &[f2().one(), f2().one()]);
        // alpha_n([r]) = <r>
        let u = SemigroupElement::symbol(f2().zero());
        let w2 = alpha_n(&u, 2).unwrap();
        assert_eq!(
            w2,
            teichmuller(&f2().zero(), &TruncationSet::p_typical(2, 2))
        );
    }

    #[test]
    fn alpha_vanishes_on_ideal_powers() {
        let b = SemigroupBasis::new(&f2(), 10).unwrap();
        let i2 = ideal_power(&b, 2);
        for v in i2.lattice.basis() {
            let w = alpha_n(&b.from_vector(v), 2).unwrap();
            assert!(w.components().iter().all(|c| f2().is_zero(c)));
        }
    }

    #[test]
    fn alpha_inverse_formula() {
        // R = F_2, n = 2: (1,1) -> [1] + 2[phi^{-1}(1)] = 3[1]
        let b = SemigroupBasis::new(&f2(), 10).unwrap();
        let s = TruncationSet::p_typical(2, 2);
        let w = WittVector::new(s, f2(), vec![f2().one(), f2().one()]).unwrap();
        let x = alpha_n_inverse(&w, &b).unwrap();
        assert_eq!(
            x,
            SemigroupElement::symbol(f2().one()).scale(&BigInt::from(3))
        );
        // F_4, n = 2: (w, w) -> [w] + 2[w^2]
        let f4 = Ring::finite_field_default(2, 2).unwrap();
        let b4 = SemigroupBasis::new(&f4, 10).unwrap();
        let om = crate::rings::quot_generator(&f4);
        let s4 = TruncationSet::p_typical(2, 2);
        let w4 = WittVector::new(s4, f4.clone(), vec![om.clone(), om.clone()]).unwrap();
        let x4 = alpha_n_inverse(&w4, &b4).unwrap();
        let expected = SemigroupElement::symbol(om.clone())
            .add(&SemigroupElement::symbol(f4.mul(&om, &om)).scale(&BigInt::from(2)));
        assert_eq!(x4, expected);
        // round trip through alpha_2
        assert_eq!(alpha_n(&x4, 2).unwrap(), w4);
        // (r, 0, ..., 0) -> [r] mod I^n (the zero slots contribute p^v [0],
        // and [0] = [0]^n lies in I^n)
        let s3 = TruncationSet::p_typical(2, 3);
        let w5 = teichmuller(&om, &s3);
        let inv5 = alpha_n_inverse(&w5, &b4).unwrap();
        let i3 = ideal_power(&b4, 3);
        let diff = inv5.sub(&SemigroupElement::symbol(om.clone()));
        assert!(i3.lattice.contains(&b4.to_vector(&diff)));
    }

    #[test]
    fn galois_alpha_z4() {
        // Z/4 = GR(4,1) -> W_2(F_2): 3 -> (1,1)
        let gr = Ring::galois_ring_default(2, 2, 1).unwrap();
        let w = galois_ring_alpha(&gr.from_i64(3)).unwrap();
        assert_eq!(w.components(), &[f2().one(), f2().one()]);
        // n = 1: reduction mod p
        let gr1 = Ring::galois_ring_default(3, 1, 1).unwrap();
        let w1 = galois_ring_alpha(&gr1.from_i64(2)).unwrap();
        assert_eq!(w1.components(), &[Ring::prime_field(3).unwrap().from_i64(2)]);
    }

    #[test]
    fn galois_alpha_bijective_and_multiplicative() {
        for (p, n, k) in [(2u64, 2u32, 2u32), (3, 3, 1), (2, 3, 1)] {
            let gr = Ring::galois_ring_default(p, n, k).unwrap();
            let table = galois_alpha_table(&gr, 1 << 12).unwrap();
            let count = table.len() as u64;
            assert_eq!(BigInt::from(count), gr.size().unwrap());
            // ring homomorphism on all pairs (desk scale)
            let map: BTreeMap<RingElement, WittVector> = table.into_iter().collect();
            let elems: Vec<RingElement> = map.keys().cloned().collect();
            for a in &elems {
                for b in &elems {
                    let lhs = map[&gr.mul(a, b)].clone();
                    let rhs = witt_mul(&map[a], &map[b]).unwrap();
                    assert_eq!(lhs, rhs);
                    let lhs_add = map[&gr.add(a, b)].clone();
                    let rhs_add = witt_add(&map[a], &map[b]).unwrap();
                    assert_eq!(lhs_add, rhs_add);
                }
            }
        }
    }

    #[test]
    fn derivation_small_cases() {
        // delta([r]) = 0
        let r = SemigroupElement::symbol(f2().one());
        let d = arithmetic_derivation(&r, 2).unwrap();
        assert!(d.is_zero());
        // p = 2: delta([r] + [s]) = -[rs]
        let f4 = Ring::finite_field_default(2, 2).unwrap();
        let om = crate::rings::quot_generator(&f4);
        let a = SemigroupElement::symbol(om.clone()).add(&SemigroupElement::symbol(f4.one()));
        let d2 = arithmetic_derivation(&a, 2).unwrap();
        let expected = SemigroupElement::symbol(f4.mul(&om, &f4.one())).neg();
        assert_eq!(d2, expected);
        // p = 3: delta([r] + [s]) = -[r s^2] - [r^2 s]
        let f9 = Ring::finite_field_default(3, 2).unwrap();
        let r9 = crate::rings::quot_generator(&f9);
        let s9 = f9.add(&r9, &f9.one());
        let a9 = SemigroupElement::symbol(r9.clone()).add(&SemigroupElement::symbol(s9.clone()));
        let d9 = arithmetic_derivation(&a9, 3).unwrap();
        let expected9 = SemigroupElement::symbol(f9.mul(&r9, &f9.mul(&s9, &s9)))
            .add(&SemigroupElement::symbol(f9.mul(&f9.mul(&r9, &r9), &s9)))
            .neg();
        assert_eq!(d9, expected9);
    }

    #[test]
    fn ideal_in_basics() {
        // I_1 = I
        let b = SemigroupBasis::new(&f2(), 10).unwrap();
        let i1 = ideal_power(&b, 1);
        let in1 = ideal_in(&b, 1).unwrap();
        assert_eq!(in1.lattice, i1.lattice);
        // perfect field: I_n = I^n (alpha_n injective)
        let i2 = ideal_power(&b, 2);
        let in2 = ideal_in(&b, 2).unwrap();
        assert_eq!(in2.lattice, i2.lattice);
        // non-injective Frobenius is rejected
        let r = Ring::fp_quotient(
            2,
            vec![BigInt::zero(), BigInt::one(), BigInt::zero(), BigInt::one()],
        )
        .unwrap(); // F_2[u]/(u^3+u)
        let bq = SemigroupBasis::new(&r, 100).unwrap();
        assert!(!bq.frobenius_injective(2));
        assert!(matches!(ideal_in(&bq, 2), Err(Error::FrobeniusNotInjective)));
        // I^n is always contained in I_n (phi preserves I)
        let in2u = ideal_in_unchecked(&bq, 2);
        let i2u = ideal_power(&bq, 2);
        assert!(i2u.lattice.is_sublattice_of(&in2u.lattice));
    }

    #[test]
    fn alpha_ring_hom_on_sample() {
        let b = SemigroupBasis::new(&f2(), 10).unwrap();
        let x = SemigroupElement::symbol(f2().one()).scale(&BigInt::from(3));
        let y = SemigroupElement::symbol(f2().zero()).sub(&SemigroupElement::symbol(f2().one()));
        let s = TruncationSet::p_typical(2, 3);
        let ax = x.alpha_to_witt(&s).unwrap();
        let ay = y.alpha_to_witt(&s).unwrap();
        assert_eq!(x.mul(&y).alpha_to_witt(&s).unwrap(), witt_mul(&ax, &ay).unwrap());
        assert_eq!(x.add(&y).alpha_to_witt(&s).unwrap(), witt_add(&ax, &ay).unwrap());
        let _ = b;
    }

    #[test]
    fn certificate_verification() {
        // R = F_2[u] (infinite): verify a concrete witnessed membership
        let r = Ring::polynomial(f2(), vec!["u"]).unwrap();
        let u = RingElement {
            ring: r.clone(),
            payload: Payload::Poly(crate::poly::ZPoly::var_pow(1, 0, 1, BigInt::one())),
        };
        // f = 2[1] - [0] and g = 2[u^2] - [0] are in I; a with phi(a) = f*g:
        // f*g = 4[u^2] - 2[0] - 2[0] + [0] = 4[u^2] - 3[0]
        let f = SemigroupElement::symbol(r.one())
            .scale(&BigInt::from(2))
            .sub(&SemigroupElement::symbol(r.zero()));
        let u2 = r.mul(&u, &u);
        let g = SemigroupElement::symbol(u2.clone())
            .scale(&BigInt::from(2))
            .sub(&SemigroupElement::symbol(r.zero()));
        // phi(4[u] - 3[0]) = 4[u^2] - 3[0] = f*g
        let a = SemigroupElement::symbol(u.clone())
            .scale(&BigInt::from(4))
            .sub(&SemigroupElement::symbol(r.zero()).scale(&BigInt::from(3)));
        let cert = InCertificate {
            terms: vec![(BigInt::one(), vec![f, g])],
        };
        verify_in_certificate(&a, 2, &cert).unwrap();
        // and alpha_2(a) = 0, as the kernel identity predicts for a in I_2
        let w = alpha_n(&a, 2).unwrap();
        assert!(w.components().iter().all(|c| r.is_zero(c)));
    }
}
