//! Witt vectors W_S(R): ghost components, the coordinate ring structure via
//! universal polynomial tables, Frobenius/Verschiebung/Teichmueller, the
//! delta_p operator, Artin-Hasse idempotents, the Dwork membership test and
//! the Cartier-Dieudonne parametrization.

pub mod tables;

use std::collections::BTreeMap;

use num::{BigInt, Integer, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::ZPoly;
use crate::rings::frobenius::{apply_phi_n, divides_int, frobenius_lift};
use crate::rings::{Ring, RingElement};
use crate::truncation::{strict_divisors_in, TruncationSet};

pub use tables::{tables_for, UniversalTables};

/// S-indexed coordinates in R, with the transported Witt ring structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WittVector {
    pub set: TruncationSet,
    pub ring: Ring,
    comps: Vec<RingElement>,
}

/// S-indexed element of A^S with the componentwise ring structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhostVector {
    pub set: TruncationSet,
    pub ring: Ring,
    comps: Vec<RingElement>,
}

macro_rules! vec_impl {
    ($t:ident) => {
        impl $t {
            pub fn new(set: TruncationSet, ring: Ring, comps: Vec<RingElement>) -> Result<$t> {
                if comps.len() != set.len() {
                    return Err(Error::MismatchedShape(format!(
                        "{} components for {}",
                        comps.len(),
                        set
                    )));
                }
                for c in &comps {
                    if c.ring != ring {
                        return Err(Error::MismatchedShape(
                            "component from a different ring".into(),
                        ));
                    }
                }
                Ok($t { set, ring, comps })
            }

            pub fn zero(set: TruncationSet, ring: Ring) -> $t {
                let comps = vec![ring.zero(); set.len()];
                $t { set, ring, comps }
            }

            /// Component at index n (a member of S).
            pub fn get(&self, n: u64) -> &RingElement {
                &self.comps[self.set.index_of(n).expect("member")]
            }

            pub fn components(&self) -> &[RingElement] {
                &self.comps
            }

            pub fn set_component(&mut self, n: u64, v: RingElement) {
                let i = self.set.index_of(n).expect("member");
                self.comps[i] = v;
            }

            /// Restriction of coordinates to a truncation subset.
            pub fn project(&self, t: &TruncationSet) -> Result<$t> {
                if !t.is_subset_of(&self.set) {
                    return Err(Error::BadTruncationPair(format!(
                        "{} is not a subset of {}",
                        t, self.set
                    )));
                }
                let comps = t.members().map(|n| self.get(n).clone()).collect();
                Ok($t {
                    set: t.clone(),
                    ring: self.ring.clone(),
                    comps,
                })
            }
        }
    };
}

vec_impl!(WittVector);
vec_impl!(GhostVector);

impl GhostVector {
    pub fn add(&self, other: &GhostVector) -> Result<GhostVector> {
        self.zip(other, |r, a, b| r.add(a, b))
    }

    pub fn mul(&self, other: &GhostVector) -> Result<GhostVector> {
        self.zip(other, |r, a, b| r.mul(a, b))
    }

    fn zip(
        &self,
        other: &GhostVector,
        f: impl Fn(&Ring, &RingElement, &RingElement) -> RingElement,
    ) -> Result<GhostVector> {
        if self.set != other.set || self.ring != other.ring {
            return Err(Error::MismatchedShape("ghost vector shapes differ".into()));
        }
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| f(&self.ring, a, b))
            .collect();
        Ok(GhostVector {
            set: self.set.clone(),
            ring: self.ring.clone(),
            comps,
        })
    }
}

/// Evaluate a table polynomial on Witt coordinates: variables X are bound to
/// `x`, variables Y to `y` (when present).
fn eval_table_poly(
    poly: &ZPoly,
    ring: &Ring,
    set_len: usize,
    x: &[RingElement],
    y: Option<&[RingElement]>,
) -> RingElement {
    // cache powers of each bound variable
    let mut powers: Vec<BTreeMap<u32, RingElement>> = vec![BTreeMap::new(); 2 * set_len];
    let mut acc = ring.zero();
    for (mono, coeff) in poly.terms() {
        let mut term = ring.from_int(coeff);
        for (i, &e) in mono.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let base = if i < set_len {
                &x[i]
            } else {
                &y.expect("polynomial uses Y variables")[i - set_len]
            };
            let p = powers[i]
                .entry(e)
                .or_insert_with(|| base.ring.pow(base, e as u64))
                .clone();
            term = ring.mul(&term, &p);
        }
        acc = ring.add(&acc, &term);
    }
    acc
}

fn check_pair(a: &WittVector, b: &WittVector) -> Result<()> {
    if a.set != b.set || a.ring != b.ring {
        return Err(Error::MismatchedShape(
            "witt vectors have different S or R".into(),
        ));
    }
    Ok(())
}

/// The ghost map: component m is sum_{n | m} n a_n^{m/n}.
pub fn ghost_of(a: &WittVector) -> GhostVector {
    let ring = &a.ring;
    let comps = a
        .set
        .members()
        .map(|m| {
            let mut acc = ring.zero();
            for n in a.set.members().filter(|&n| m % n == 0) {
                let t = ring.int_mul(&BigInt::from(n), &ring.pow(a.get(n), m / n));
                acc = ring.add(&acc, &t);
            }
            acc
        })
        .collect();
    GhostVector {
        set: a.set.clone(),
        ring: a.ring.clone(),
        comps,
    }
}

/// Inverse of the ghost map over an S-torsion-free ring: solves
/// `sum_{n | m} n a_n^{m/n} = x_m` in divisor order with exact division.
/// Failure is the constructive non-membership certificate for the image.
pub fn witt_from_ghost(x: &GhostVector) -> Result<WittVector> {
    if !x.ring.is_torsion_free() {
        return Err(Error::Type(
            "witt_from_ghost requires an S-torsion-free coefficient ring".into(),
        ));
    }
    let ring = &x.ring;
    let mut out = WittVector::zero(x.set.clone(), x.ring.clone());
    for m in x.set.divisor_order() {
        let mut rest = x.get(m).clone();
        for n in strict_divisors_in(&x.set, m) {
            let t = ring.int_mul(&BigInt::from(n), &ring.pow(out.get(n), m / n));
            rest = ring.sub(&rest, &t);
        }
        let a_m = ring
            .div_exact_int(&rest, &BigInt::from(m))
            .map_err(|e| Error::NotInGhostImage(format!("at index {}: {}", m, e)))?;
        out.set_component(m, a_m);
    }
    Ok(out)
}

pub fn witt_add(a: &WittVector, b: &WittVector) -> Result<WittVector> {
    check_pair(a, b)?;
    let t = tables_for(&a.set)?;
    let comps = a
        .set
        .members()
        .map(|s| eval_table_poly(&t.add[&s], &a.ring, a.set.len(), &a.comps, Some(&b.comps)))
        .collect();
    Ok(WittVector {
        set: a.set.clone(),
        ring: a.ring.clone(),
        comps,
    })
}

pub fn witt_mul(a: &WittVector, b: &WittVector) -> Result<WittVector> {
    check_pair(a, b)?;
    let t = tables_for(&a.set)?;
    let comps = a
        .set
        .members()
        .map(|s| eval_table_poly(&t.mul[&s], &a.ring, a.set.len(), &a.comps, Some(&b.comps)))
        .collect();
    Ok(WittVector {
        set: a.set.clone(),
        ring: a.ring.clone(),
        comps,
    })
}

pub fn witt_neg(a: &WittVector) -> Result<WittVector> {
    let t = tables_for(&a.set)?;
    let comps = a
        .set
        .members()
        .map(|s| eval_table_poly(&t.neg[&s], &a.ring, a.set.len(), &a.comps, None))
        .collect();
    Ok(WittVector {
        set: a.set.clone(),
        ring: a.ring.clone(),
        comps,
    })
}

pub fn witt_sub(a: &WittVector, b: &WittVector) -> Result<WittVector> {
    witt_add(a, &witt_neg(b)?)
}

/// n * a in the additive group of W_S(R), by double-and-add.
pub fn witt_int_mul(n: &BigInt, a: &WittVector) -> Result<WittVector> {
    let mut base = if n.is_negative() { witt_neg(a)? } else { a.clone() };
    let mut e = n.abs();
    let mut acc = WittVector::zero(a.set.clone(), a.ring.clone());
    while e.is_positive() {
        if e.is_odd() {
            acc = witt_add(&acc, &base)?;
        }
        e >>= 1;
        if e.is_positive() {
            base = witt_add(&base, &base)?;
        }
    }
    Ok(acc)
}

/// a^e in W_S(R).
pub fn witt_pow(a: &WittVector, e: u32) -> Result<WittVector> {
    let mut acc = teichmuller(&a.ring.one(), &a.set);
    let mut base = a.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = witt_mul(&acc, &base)?;
        }
        e >>= 1;
        if e > 0 {
            base = witt_mul(&base, &base)?;
        }
    }
    Ok(acc)
}

/// The multiplicative section r -> (r, 0, ..., 0).
pub fn teichmuller(r: &RingElement, set: &TruncationSet) -> WittVector {
    let mut out = WittVector::zero(set.clone(), r.ring.clone());
    out.set_component(1, r.clone());
    out
}

/// Frobenius F_n : W_S(R) -> W_{S/n}(R), by the coordinate table.
pub fn frobenius(n: u64, a: &WittVector) -> Result<WittVector> {
    if !a.set.contains(n) {
        return Err(Error::NotAMember(n));
    }
    let t = tables_for(&a.set)?;
    let sq = a.set.quotient(n)?;
    let comps = sq
        .members()
        .map(|v| eval_table_poly(&t.frob[&(n, v)], &a.ring, a.set.len(), &a.comps, None))
        .collect();
    Ok(WittVector {
        set: sq,
        ring: a.ring.clone(),
        comps,
    })
}

/// Verschiebung V_n : W_{S/n}(R) -> W_S(R); `target.quotient(n)` must equal
/// the set of `a`. Coordinates: V_n(a)_m = a_{m/n} when n | m, else 0.
pub fn verschiebung(n: u64, a: &WittVector, target: &TruncationSet) -> Result<WittVector> {
    if !target.contains(n) {
        return Err(Error::NotAMember(n));
    }
    let sq = target.quotient(n)?;
    if sq != a.set {
        return Err(Error::MismatchedShape(format!(
            "V_{} source should be over {}, got {}",
            n, sq, a.set
        )));
    }
    let comps = target
        .members()
        .map(|m| {
            if m % n == 0 {
                a.get(m / n).clone()
            } else {
                a.ring.zero()
            }
        })
        .collect();
    Ok(WittVector {
        set: target.clone(),
        ring: a.ring.clone(),
        comps,
    })
}

/// V_n of the Teichmueller lift: the vector with r at slot n.
pub fn v_teichmuller(n: u64, r: &RingElement, target: &TruncationSet) -> Result<WittVector> {
    if !target.contains(n) {
        return Err(Error::NotAMember(n));
    }
    let mut out = WittVector::zero(target.clone(), r.ring.clone());
    out.set_component(n, r.clone());
    Ok(out)
}

/// Solve l * y = x in W_S(R) for a prime l:
/// over torsion-free rings via the ghost coordinates, otherwise (l invertible
/// in R) via the l-th root of the associated truncated series.
pub fn witt_div_int(l: u64, x: &WittVector) -> Result<WittVector> {
    if x.ring.is_torsion_free() {
        let g = ghost_of(x);
        let comps: Result<Vec<RingElement>> = g
            .components()
            .iter()
            .map(|c| x.ring.div_exact_int(c, &BigInt::from(l)))
            .collect();
        let gv = GhostVector::new(x.set.clone(), x.ring.clone(), comps?)?;
        return witt_from_ghost(&gv);
    }
    if x.ring.inv_int(l).is_none() {
        return Err(Error::PrimeNotInvertible(l));
    }
    // embed into the initial segment {1..max S}, take the series l-th root,
    // and project back; the projection of the unique solution upstairs is the
    // unique solution downstairs since l-multiplication is injective.
    let seg = TruncationSet::initial_segment(x.set.max_member());
    let mut lift = WittVector::zero(seg.clone(), x.ring.clone());
    for n in x.set.members() {
        lift.set_component(n, x.get(n).clone());
    }
    let p = crate::series::lambda_map(&lift)?;
    let root = crate::series::series_lth_root(&p, l)?;
    let y = crate::series::lambda_inverse(&root)?;
    y.project(&x.set)
}

/// The functorial delta_p with F_p(c) = proj(c)^p + p delta_p(c), computed by
/// the branch formulas on `V_n<r>` and the cyclic-orbit cross-term sum.
pub fn delta_p(p: u64, c: &WittVector) -> Result<WittVector> {
    if !c.set.contains(p) {
        return Err(Error::NotAMember(p));
    }
    let ring = &c.ring;
    let s_p = c.set.quotient(p)?;
    let members: Vec<u64> = c.set.members().collect();
    // alpha_n = V_n<c_n> in W_S
    let alphas: BTreeMap<u64, WittVector> = members
        .iter()
        .map(|&n| Ok((n, v_teichmuller(n, c.get(n), &c.set)?)))
        .collect::<Result<_>>()?;
    let mut delta = WittVector::zero(s_p.clone(), ring.clone());
    for &n in &members {
        let term = if n % p != 0 {
            // delta_p(V_n<r>) = (1 - n^(p-1))/p * F_p V_n<r>
            let num = BigInt::one() - BigInt::from(n).pow(p as u32 - 1);
            let coeff = num.div_exact_int_checked(&BigInt::from(p))?;
            witt_int_mul(&coeff, &frobenius(p, &alphas[&n])?)?
        } else {
            // delta_p(V_n<r>) = b - p^(p-2) V_p(b^p), b = V_{n/p}<r>
            let b = v_teichmuller(n / p, c.get(n), &s_p)?;
            if s_p.contains(p) {
                let bq = b.project(&s_p.quotient(p)?)?;
                let bp = witt_pow(&bq, p as u32)?;
                let vb = verschiebung(p, &bp, &s_p)?;
                let scaled = witt_int_mul(&BigInt::from(p).pow(p as u32 - 2), &vb)?;
                witt_sub(&b, &scaled)?
            } else {
                b
            }
        };
        delta = witt_add(&delta, &term)?;
    }
    // cross terms: orbits of the cyclic shift on S^p minus the diagonal,
    // products taken after projection to S/p
    let proj_alphas: BTreeMap<u64, WittVector> = alphas
        .iter()
        .map(|(&n, a)| Ok((n, a.project(&s_p)?)))
        .collect::<Result<_>>()?;
    for tuple in cyclic_orbit_reps(&members, p as usize) {
        let mut prod = teichmuller(&ring.one(), &s_p);
        for &n in &tuple {
            prod = witt_mul(&prod, &proj_alphas[&n])?;
        }
        delta = witt_sub(&delta, &prod)?;
    }
    Ok(delta)
}

/// Minimal-rotation representatives of the non-constant tuples in S^p under
/// the cyclic shift.
fn cyclic_orbit_reps(members: &[u64], p: usize) -> Vec<Vec<u64>> {
    let mut out = vec![];
    let k = members.len();
    let mut idx = vec![0usize; p];
    'outer: loop {
        let tuple: Vec<u64> = idx.iter().map(|&i| members[i]).collect();
        if tuple.iter().any(|&x| x != tuple[0]) {
            let mut min_rot = tuple.clone();
            for r in 1..p {
                let rot: Vec<u64> = (0..p).map(|i| tuple[(i + r) % p]).collect();
                if rot < min_rot {
                    min_rot = rot;
                }
            }
            if min_rot == tuple {
                out.push(tuple);
            }
        }
        let mut i = 0;
        loop {
            if i == p {
                break 'outer;
            }
            idx[i] += 1;
            if idx[i] < k {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
    out
}

trait DivExactExt {
    fn div_exact_int_checked(&self, d: &BigInt) -> Result<BigInt>;
}

impl DivExactExt for BigInt {
    fn div_exact_int_checked(&self, d: &BigInt) -> Result<BigInt> {
        let (q, r) = self.div_rem(d);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::IntegralityViolation(format!("{} / {}", self, d)))
        }
    }
}

/// The Artin-Hasse idempotent e_T = prod over primes l in S \ T of
/// (1 - l^{-1} V_l(1)).
pub fn artin_hasse_idempotent(
    set: &TruncationSet,
    sub: &TruncationSet,
    ring: &Ring,
) -> Result<WittVector> {
    if !sub.is_subset_of(set) {
        return Err(Error::BadTruncationPair(format!(
            "{} is not a subset of {}",
            sub, set
        )));
    }
    // n in T iff all prime divisors of n lie in T
    for n in set.members() {
        let all_primes_in = crate::rings::univar::prime_factors(n)
            .iter()
            .all(|&q| sub.contains(q));
        if sub.contains(n) != all_primes_in {
            return Err(Error::BadTruncationPair(format!(
                "membership of {} in T is not determined by its prime divisors",
                n
            )));
        }
    }
    let primes: Vec<u64> = set
        .members()
        .filter(|&l| !sub.contains(l) && crate::rings::univar::is_prime(l))
        .collect();
    let one = teichmuller(&ring.one(), set);
    let mut e = one.clone();
    for l in primes {
        if ring.inv_int(l).is_none() {
            return Err(Error::PrimeNotInvertible(l));
        }
        let v1 = verschiebung(l, &teichmuller(&ring.one(), &set.quotient(l)?), set)?;
        let divided = witt_div_int(l, &v1)?;
        let factor = witt_sub(&one, &divided)?;
        e = witt_mul(&e, &factor)?;
    }
    Ok(e)
}

/// Dwork's criterion for membership in the ghost image: for every p | n,
/// `phi_p(x_{n/p}) = x_n (mod p^(v_p(n)))`.
pub fn dwork_membership(x: &GhostVector) -> Result<bool> {
    let ring = &x.ring;
    for n in x.set.members() {
        for p in crate::rings::univar::prime_factors(n) {
            let lift = frobenius_lift(ring, p)?;
            let vp = {
                let mut v = 0u32;
                let mut m = n;
                while m % p == 0 {
                    m /= p;
                    v += 1;
                }
                v
            };
            let img = lift.apply(x.get(n / p));
            let diff = ring.sub(&img, x.get(n));
            if !divides_int(ring, &BigInt::from(p).pow(vp), &diff) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The Cartier-Dieudonne homomorphism f_S(a) = psi^{-1}((phi_n(a))_n).
pub fn cartier_dieudonne(a: &RingElement, set: &TruncationSet) -> Result<WittVector> {
    let ring = &a.ring;
    let comps: Result<Vec<RingElement>> = set.members().map(|n| apply_phi_n(ring, n, a)).collect();
    let g = GhostVector::new(set.clone(), ring.clone(), comps?)?;
    witt_from_ghost(&g)
}

/// Inverse of Phi_S(a) = sum_n V_n(f_{S/n}(a_n)): solves
/// `sum_{n | m} n phi_{m/n}(a_n) = x_m` in divisor order with exact division.
pub fn phi_decompose(x: &GhostVector) -> Result<BTreeMap<u64, RingElement>> {
    let ring = &x.ring;
    let mut out: BTreeMap<u64, RingElement> = BTreeMap::new();
    for m in x.set.divisor_order() {
        let mut rest = x.get(m).clone();
        for n in strict_divisors_in(&x.set, m) {
            let t = ring.int_mul(&BigInt::from(n), &apply_phi_n(ring, m / n, &out[&n])?);
            rest = ring.sub(&rest, &t);
        }
        let a_m = ring
            .div_exact_int(&rest, &BigInt::from(m))
            .map_err(|e| Error::NotInGhostImage(format!("at index {}: {}", m, e)))?;
        out.insert(m, a_m);
    }
    Ok(out)
}

/// Phi_S itself, for round-trip checks; returns the ghost vector
/// (sum_{n|m} n phi_{m/n}(a_n))_m.
pub fn phi_compose(
    set: &TruncationSet,
    ring: &Ring,
    a: &BTreeMap<u64, RingElement>,
) -> Result<GhostVector> {
    let comps: Result<Vec<RingElement>> = set
        .members()
        .map(|m| {
            let mut acc = ring.zero();
            for n in set.members().filter(|&n| m % n == 0) {
                let t = ring.int_mul(&BigInt::from(n), &apply_phi_n(ring, m / n, &a[&n])?);
                acc = ring.add(&acc, &t);
            }
            Ok(acc)
        })
        .collect();
    GhostVector::new(set.clone(), ring.clone(), comps?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::Ring;

    fn zvec(set: &TruncationSet, vals: &[i64]) -> WittVector {
        let z = Ring::integers();
        WittVector::new(
            set.clone(),
            z.clone(),
            vals.iter().map(|&v| z.from_i64(v)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn ghost_by_hand() {
        let s = TruncationSet::new([1, 2, 4]).unwrap();
        let a = zvec(&s, &[3, 1, 2]);
        let g = ghost_of(&a);
        let z = Ring::integers();
        assert_eq!(g.components(), &[z.from_i64(3), z.from_i64(11), z.from_i64(91)]);
        // zeros map to zeros
        let zv = WittVector::zero(s.clone(), z.clone());
        assert!(ghost_of(&zv).components().iter().all(|c| z.is_zero(c)));
        // ghost of a Teichmueller lift is (r^v)_v
        let t = teichmuller(&z.from_i64(5), &s);
        let gt = ghost_of(&t);
        assert_eq!(
            gt.components(),
            &[z.from_i64(5), z.from_i64(25), z.from_i64(625)]
        );
    }

    #[test]
    fn ghost_inverse_by_hand() {
        let s = TruncationSet::new([1, 2, 4]).unwrap();
        let z = Ring::integers();
        let g = GhostVector::new(
            s.clone(),
            z.clone(),
            vec![z.from_i64(3), z.from_i64(11), z.from_i64(91)],
        )
        .unwrap();
        assert_eq!(witt_from_ghost(&g).unwrap(), zvec(&s, &[3, 1, 2]));
        // (0,1) is not in the image over Z
        let s2 = TruncationSet::new([1, 2]).unwrap();
        let bad = GhostVector::new(s2, z.clone(), vec![z.from_i64(0), z.from_i64(1)]).unwrap();
        assert!(matches!(
            witt_from_ghost(&bad),
            Err(Error::NotInGhostImage(_))
        ));
    }

    #[test]
    fn constant_ghost_vector_is_integral() {
        // x = (c, ..., c) is the image of c under f_S with phi = id
        let s = TruncationSet::initial_segment(6);
        let z = Ring::integers();
        for c in [-7i64, 0, 3, 12] {
            let g = GhostVector::new(s.clone(), z.clone(), vec![z.from_i64(c); s.len()]).unwrap();
            let w = witt_from_ghost(&g).unwrap();
            assert_eq!(w, cartier_dieudonne(&z.from_i64(c), &s).unwrap());
        }
    }

    #[test]
    fn addition_in_characteristic_two() {
        // (1,0) + (1,0) = (0,1) in W_{1,2}(F_2)
        let f2 = Ring::prime_field(2).unwrap();
        let s = TruncationSet::new([1, 2]).unwrap();
        let a = teichmuller(&f2.one(), &s);
        let sum = witt_add(&a, &a).unwrap();
        assert_eq!(sum.components(), &[f2.zero(), f2.one()]);
    }

    #[test]
    fn unit_laws() {
        let s = TruncationSet::initial_segment(6);
        let z = Ring::integers();
        let a = zvec(&s, &[2, -1, 3, 0, 5, -2]);
        let zero = WittVector::zero(s.clone(), z.clone());
        let one = teichmuller(&z.one(), &s);
        assert_eq!(witt_add(&a, &zero).unwrap(), a);
        assert_eq!(witt_mul(&a, &one).unwrap(), a);
        assert_eq!(witt_add(&a, &witt_neg(&a).unwrap()).unwrap(), zero);
        // <2> * <3> = <6>
        let t2 = teichmuller(&z.from_i64(2), &s);
        let t3 = teichmuller(&z.from_i64(3), &s);
        let t6 = teichmuller(&z.from_i64(6), &s);
        assert_eq!(witt_mul(&t2, &t3).unwrap(), t6);
    }

    #[test]
    fn frobenius_of_teichmuller() {
        let s = TruncationSet::initial_segment(6);
        let z = Ring::integers();
        let r = z.from_i64(3);
        for n in s.members() {
            let f = frobenius(n, &teichmuller(&r, &s)).unwrap();
            assert_eq!(f, teichmuller(&z.pow(&r, n), &s.quotient(n).unwrap()));
        }
        // F_1 is the identity
        let a = zvec(&s, &[1, 2, 3, 4, 5, 6]);
        assert_eq!(frobenius(1, &a).unwrap(), a);
    }

    #[test]
    fn verschiebung_shifts_coordinates() {
        let s = TruncationSet::new([1, 2, 4]).unwrap();
        let z = Ring::integers();
        let sub = s.quotient(2).unwrap();
        let a = WittVector::new(sub, z.clone(), vec![z.from_i64(7), z.from_i64(9)]).unwrap();
        let v = verschiebung(2, &a, &s).unwrap();
        assert_eq!(
            v.components(),
            &[z.zero(), z.from_i64(7), z.from_i64(9)]
        );
        // ghost relation: ghost(V_n a)_m = n ghost(a)_{m/n} for n | m, else 0
        let g = ghost_of(&v);
        let ga = ghost_of(&a);
        assert_eq!(g.get(1), &z.zero());
        assert_eq!(g.get(2), &z.int_mul(&BigInt::from(2), ga.get(1)));
        assert_eq!(g.get(4), &z.int_mul(&BigInt::from(2), ga.get(2)));
    }

    #[test]
    fn delta_p_small_cases() {
        let z = Ring::integers();
        let s = TruncationSet::new([1, 2]).unwrap();
        // c = V_2<r>: delta_2 = <r> over S/2 = {1}
        let r = z.from_i64(5);
        let c = v_teichmuller(2, &r, &s).unwrap();
        let d = delta_p(2, &c).unwrap();
        assert_eq!(d.components(), &[r.clone()]);
        // c = <r>: delta_p(<r>) = 0
        let c2 = teichmuller(&r, &s);
        let d2 = delta_p(2, &c2).unwrap();
        assert!(d2.components().iter().all(|x| z.is_zero(x)));
    }

    #[test]
    fn delta_p_defining_equation_over_z() {
        // F_p(c) - proj(c)^p = p delta_p(c), checked exactly over Z
        let s = TruncationSet::new([1, 2, 4]).unwrap();
        let c = zvec(&s, &[3, -2, 7]);
        let d = delta_p(2, &c).unwrap();
        let lhs = witt_sub(
            &frobenius(2, &c).unwrap(),
            &witt_pow(&c.project(&s.quotient(2).unwrap()).unwrap(), 2).unwrap(),
        )
        .unwrap();
        let rhs = witt_int_mul(&BigInt::from(2), &d).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn artin_hasse_small() {
        // R = Z[1/2], S = {1,2}, T = {1}: e_T = (1, -1/2)
        let r = Ring::localized([2]).unwrap();
        let s = TruncationSet::new([1, 2]).unwrap();
        let t = TruncationSet::new([1]).unwrap();
        let e = artin_hasse_idempotent(&s, &t, &r).unwrap();
        let half = r.div_exact_int(&r.one(), &BigInt::from(2)).unwrap();
        assert_eq!(e.components(), &[r.one(), r.neg(&half)]);
        // T = S: empty product is <1>
        let e2 = artin_hasse_idempotent(&s, &s, &r).unwrap();
        assert_eq!(e2, teichmuller(&r.one(), &s));
        // idempotency and ghost indicator
        assert_eq!(witt_mul(&e, &e).unwrap(), e);
        let g = ghost_of(&e);
        assert_eq!(g.components(), &[r.one(), r.zero()]);
    }

    #[test]
    fn artin_hasse_requires_invertible_primes() {
        let z = Ring::integers();
        let s = TruncationSet::new([1, 2]).unwrap();
        let t = TruncationSet::new([1]).unwrap();
        assert!(matches!(
            artin_hasse_idempotent(&s, &t, &z),
            Err(Error::PrimeNotInvertible(2))
        ));
        // 4 in S with 2 in T but 4 not in T violates the hypothesis
        let s2 = TruncationSet::new([1, 2, 4]).unwrap();
        let t2 = TruncationSet::new([1, 2]).unwrap();
        assert!(matches!(
            artin_hasse_idempotent(&s2, &t2, &Ring::localized([2]).unwrap()),
            Err(Error::BadTruncationPair(_))
        ));
    }

    #[test]
    fn dwork_by_hand() {
        let s = TruncationSet::new([1, 2, 4]).unwrap();
        let z = Ring::integers();
        let g = GhostVector::new(
            s.clone(),
            z.clone(),
            vec![z.from_i64(3), z.from_i64(11), z.from_i64(91)],
        )
        .unwrap();
        assert!(dwork_membership(&g).unwrap());
        let bad = GhostVector::new(
            s.clone(),
            z.clone(),
            vec![z.from_i64(0), z.from_i64(1), z.from_i64(0)],
        )
        .unwrap();
        assert!(!dwork_membership(&bad).unwrap());
        // x = (phi_n(a))_n passes for every a
        for a in [-5i64, 0, 7, 12] {
            let g = ghost_of(&cartier_dieudonne(&z.from_i64(a), &s).unwrap());
            assert!(dwork_membership(&g).unwrap());
        }
    }

    #[test]
    fn cartier_dieudonne_by_hand() {
        let z = Ring::integers();
        let s = TruncationSet::new([1, 2]).unwrap();
        let w = cartier_dieudonne(&z.from_i64(2), &s).unwrap();
        assert_eq!(w.components(), &[z.from_i64(2), z.from_i64(-1)]);
        assert!(ghost_of(&cartier_dieudonne(&z.zero(), &s).unwrap())
            .components()
            .iter()
            .all(|c| z.is_zero(c)));
        assert_eq!(
            cartier_dieudonne(&z.one(), &s).unwrap(),
            teichmuller(&z.one(), &s)
        );
        // over Z[x] with phi_2(x) = x^2: f_S(x) = <x>
        let zx = Ring::polynomial(Ring::integers(), vec!["x"]).unwrap();
        let x = crate::rings::RingElement {
            ring: zx.clone(),
            payload: crate::rings::Payload::Poly(ZPoly::var_pow(1, 0, 1, BigInt::one())),
        };
        let w2 = cartier_dieudonne(&x, &s).unwrap();
        assert_eq!(w2, teichmuller(&x, &s));
    }

    #[test]
    fn phi_decompose_by_hand() {
        let z = Ring::integers();
        let s = TruncationSet::new([1, 2]).unwrap();
        let g = GhostVector::new(s.clone(), z.clone(), vec![z.from_i64(3), z.from_i64(11)]).unwrap();
        let a = phi_decompose(&g).unwrap();
        assert_eq!(a[&1], z.from_i64(3));
        assert_eq!(a[&2], z.from_i64(4));
        // round trip
        let back = phi_compose(&s, &z, &a).unwrap();
        assert_eq!(back, g);
        // ghost of V_n(f(a)) decomposes to a at slot n, 0 elsewhere
        let s3 = TruncationSet::new([1, 2, 4]).unwrap();
        let f = cartier_dieudonne(&z.from_i64(5), &s3.quotient(2).unwrap()).unwrap();
        let v = verschiebung(2, &f, &s3).unwrap();
        let dec = phi_decompose(&ghost_of(&v)).unwrap();
        assert_eq!(dec[&1], z.zero());
        assert_eq!(dec[&2], z.from_i64(5));
        assert_eq!(dec[&4], z.zero());
    }
}
