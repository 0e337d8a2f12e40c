//! The power-series realization of Witt vectors: truncated series in
//! `1 + tR[t] mod t^(m+1)`, the bijection lambda, the logarithmic-derivative
//! ghost expansion mu, Witt's F/V formulas on series, and l-th roots.

use num::BigInt;

use crate::error::{Error, Result};
use crate::rings::{Ring, RingElement};
use crate::truncation::TruncationSet;
use crate::witt::{GhostVector, WittVector};

/// Element of `1 + tR[t]/t^(m+1)`: coefficients c_1..c_m, constant term 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    pub ring: Ring,
    coeffs: Vec<RingElement>,
}

impl TruncatedSeries {
    pub fn new(ring: Ring, coeffs: Vec<RingElement>) -> Result<TruncatedSeries> {
        for c in &coeffs {
            if c.ring != ring {
                return Err(Error::MismatchedShape(
                    "series coefficient from a different ring".into(),
                ));
            }
        }
        Ok(TruncatedSeries { ring, coeffs })
    }

    pub fn one(ring: Ring, bound: usize) -> TruncatedSeries {
        let coeffs = vec![ring.zero(); bound];
        TruncatedSeries { ring, coeffs }
    }

    /// 1 - r t^n truncated at the given bound.
    pub fn one_minus(ring: &Ring, r: &RingElement, n: usize, bound: usize) -> TruncatedSeries {
        let mut s = TruncatedSeries::one(ring.clone(), bound);
        if n >= 1 && n <= bound {
            s.coeffs[n - 1] = ring.neg(r);
        }
        s
    }

    pub fn bound(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of t^i for 1 <= i <= bound.
    pub fn coeff(&self, i: usize) -> &RingElement {
        &self.coeffs[i - 1]
    }

    pub fn coeffs(&self) -> &[RingElement] {
        &self.coeffs
    }

    /// Product truncated at the common bound.
    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        if self.ring != other.ring || self.bound() != other.bound() {
            return Err(Error::MismatchedShape("series shapes differ".into()));
        }
        let ring = &self.ring;
        let m = self.bound();
        let mut out = vec![ring.zero(); m];
        // (1 + sum a_i t^i)(1 + sum b_j t^j)
        for i in 0..m {
            out[i] = ring.add(&out[i], &self.coeffs[i]);
            out[i] = ring.add(&out[i], &other.coeffs[i]);
        }
        for i in 1..=m {
            for j in 1..=m - i {
                let p = ring.mul(&self.coeffs[i - 1], &other.coeffs[j - 1]);
                out[i + j - 1] = ring.add(&out[i + j - 1], &p);
            }
        }
        TruncatedSeries::new(ring.clone(), out)
    }

    /// Inverse of a leading-1 series, truncated.
    pub fn inverse(&self) -> TruncatedSeries {
        let ring = &self.ring;
        let m = self.bound();
        let mut inv = vec![ring.zero(); m];
        for i in 1..=m {
            // coefficient of t^i in self * inv must vanish
            let mut acc = self.coeffs[i - 1].clone();
            for j in 1..i {
                let p = ring.mul(&self.coeffs[j - 1], &inv[i - j - 1]);
                acc = ring.add(&acc, &p);
            }
            inv[i - 1] = ring.neg(&acc);
        }
        TruncatedSeries {
            ring: ring.clone(),
            coeffs: inv,
        }
    }

    pub fn pow(&self, e: u32) -> Result<TruncatedSeries> {
        let mut acc = TruncatedSeries::one(self.ring.clone(), self.bound());
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Project to a smaller bound.
    pub fn truncate(&self, bound: usize) -> TruncatedSeries {
        assert!(bound <= self.bound());
        TruncatedSeries {
            ring: self.ring.clone(),
            coeffs: self.coeffs[..bound].to_vec(),
        }
    }
}

/// lambda(a) = prod_n (1 - a_n t^n) mod t^(m+1), for S = {1..m}.
pub fn lambda_map(a: &WittVector) -> Result<TruncatedSeries> {
    if !a.set.is_initial_segment() {
        return Err(Error::NotInitialSegment);
    }
    let m = a.set.max_member() as usize;
    let mut out = TruncatedSeries::one(a.ring.clone(), m);
    for n in a.set.members() {
        let f = TruncatedSeries::one_minus(&a.ring, a.get(n), n as usize, m);
        out = out.mul(&f)?;
    }
    Ok(out)
}

/// Inverse of lambda by the coefficient recursion: strip the factors
/// (1 - a_n t^n) in increasing n.
pub fn lambda_inverse(p: &TruncatedSeries) -> Result<WittVector> {
    let m = p.bound();
    let ring = &p.ring;
    let set = TruncationSet::initial_segment(m.max(1) as u64);
    if m == 0 {
        return Err(Error::MismatchedShape("empty series".into()));
    }
    let mut rest = p.clone();
    let mut comps = Vec::with_capacity(m);
    for n in 1..=m {
        // rest = 1 - a_n t^n + O(t^(n+1))
        let a_n = ring.neg(rest.coeff(n));
        let inv_f = TruncatedSeries::one_minus(ring, &a_n, n, m).inverse();
        rest = rest.mul(&inv_f)?;
        comps.push(a_n);
    }
    WittVector::new(set, ring.clone(), comps)
}

/// mu(P) = -t P'/P expanded to the bound; requires a torsion-free ring for
/// the expansion to be the exact ghost vector.
pub fn mu_map(p: &TruncatedSeries) -> Result<GhostVector> {
    if !p.ring.is_torsion_free() {
        return Err(Error::Type(
            "mu_map requires a torsion-free coefficient ring".into(),
        ));
    }
    let ring = &p.ring;
    let m = p.bound();
    // -tP' has i-th coefficient -i c_i; divide by P via series multiplication
    // by P^{-1} on the polynomial part.
    let inv = p.inverse();
    let mut out = Vec::with_capacity(m);
    for i in 1..=m {
        // coefficient of t^i in (-tP') * P^{-1}:
        // sum over j <= i of (-j c_j) * inv_{i-j}
        let mut acc = ring.int_mul(&-BigInt::from(i as u64), p.coeff(i));
        for j in 1..i {
            let term = ring.mul(
                &ring.int_mul(&-BigInt::from(j as u64), p.coeff(j)),
                inv.coeff(i - j),
            );
            acc = ring.add(&acc, &term);
        }
        out.push(acc);
    }
    GhostVector::new(
        TruncationSet::initial_segment(m as u64),
        ring.clone(),
        out,
    )
}

/// Witt addition in the series model is plain multiplication.
pub fn series_add_as_witt(p: &TruncatedSeries, q: &TruncatedSeries) -> Result<TruncatedSeries> {
    p.mul(q)
}

/// F_m on series, generator by generator: F_m(1 - r t^n) =
/// (1 - r^(m') t^(n'))^((n,m)) with n' = n/(n,m), m' = m/(n,m).
/// The output bound is floor(bound / m).
pub fn series_frobenius(m: u64, p: &TruncatedSeries) -> Result<TruncatedSeries> {
    let w = lambda_inverse(p)?;
    let ring = &p.ring;
    let new_bound = p.bound() / m as usize;
    let mut out = TruncatedSeries::one(ring.clone(), new_bound);
    if new_bound == 0 {
        return Ok(out);
    }
    for n in w.set.members() {
        let r = w.get(n);
        if ring.is_zero(r) {
            continue;
        }
        let g = num::integer::gcd(n, m);
        let np = (n / g) as usize;
        let mp = m / g;
        let base = TruncatedSeries::one_minus(ring, &ring.pow(r, mp), np, new_bound);
        out = out.mul(&base.pow(g as u32)?)?;
    }
    Ok(out)
}

/// V_m on series: V_m(1 - r t^n) = 1 - r t^(nm), into the given target bound
/// (the target must satisfy floor(target/m) = bound of `p`).
pub fn series_verschiebung(m: u64, p: &TruncatedSeries, target_bound: usize) -> Result<TruncatedSeries> {
    if target_bound / m as usize != p.bound() {
        return Err(Error::MismatchedShape(format!(
            "target bound {} incompatible with V_{} from bound {}",
            target_bound,
            m,
            p.bound()
        )));
    }
    let w = lambda_inverse(p)?;
    let ring = &p.ring;
    let mut out = TruncatedSeries::one(ring.clone(), target_bound);
    for n in w.set.members() {
        let r = w.get(n);
        if ring.is_zero(r) {
            continue;
        }
        let f = TruncatedSeries::one_minus(ring, r, (n * m) as usize, target_bound);
        out = out.mul(&f)?;
    }
    Ok(out)
}

/// The unique h with h^l = p, for a prime l invertible in R, by coefficient
/// induction.
pub fn series_lth_root(p: &TruncatedSeries, l: u64) -> Result<TruncatedSeries> {
    let ring = &p.ring;
    let inv_l = ring.inv_int(l).ok_or(Error::PrimeNotInvertible(l))?;
    let m = p.bound();
    let mut h = vec![ring.zero(); m];
    for i in 1..=m {
        // coefficient of t^i in h^l with h_i unknown: l * h_i + (terms in h_{<i})
        let partial = TruncatedSeries {
            ring: ring.clone(),
            coeffs: h.clone(),
        };
        let hp = partial.pow(l as u32)?;
        let known = hp.coeff(i);
        let rhs = ring.sub(p.coeff(i), known);
        h[i - 1] = ring.mul(&inv_l, &rhs);
    }
    let out = TruncatedSeries {
        ring: ring.clone(),
        coeffs: h,
    };
    debug_assert_eq!(out.pow(l as u32)?, *p);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witt::{teichmuller, witt_add};

    #[test]
    fn lambda_by_hand() {
        let z = Ring::integers();
        let s = TruncationSet::initial_segment(2);
        // (r, 0) -> 1 - r t
        let a = teichmuller(&z.from_i64(4), &s);
        let p = lambda_map(&a).unwrap();
        assert_eq!(p.coeffs(), &[z.from_i64(-4), z.zero()]);
        // zero vector -> 1
        let zero = WittVector::zero(s.clone(), z.clone());
        assert_eq!(lambda_map(&zero).unwrap(), TruncatedSeries::one(z.clone(), 2));
        // F_2, m = 2, a = (1,1): (1-t)(1-t^2) = 1 + t + t^2 mod t^3
        let f2 = Ring::prime_field(2).unwrap();
        let a2 = WittVector::new(s.clone(), f2.clone(), vec![f2.one(), f2.one()]).unwrap();
        let p2 = lambda_map(&a2).unwrap();
        assert_eq!(p2.coeffs(), &[f2.one(), f2.one()]);
        // not an initial segment
        let s3 = TruncationSet::new([1, 2, 4]).unwrap();
        let a3 = WittVector::zero(s3, z.clone());
        assert!(matches!(lambda_map(&a3), Err(Error::NotInitialSegment)));
    }

    #[test]
    fn lambda_round_trip_exhaustive_f2_f3() {
        for (p, m) in [(2u64, 4usize), (3, 4)] {
            let f = Ring::prime_field(p).unwrap();
            let elems = f.enumerate(10).unwrap();
            let set = TruncationSet::initial_segment(m as u64);
            let mut idx = vec![0usize; m];
            loop {
                let comps: Vec<RingElement> = idx.iter().map(|&i| elems[i].clone()).collect();
                let w = WittVector::new(set.clone(), f.clone(), comps).unwrap();
                let back = lambda_inverse(&lambda_map(&w).unwrap()).unwrap();
                assert_eq!(back, w);
                let mut i = 0;
                loop {
                    if i == m {
                        return;
                    }
                    idx[i] += 1;
                    if idx[i] < elems.len() {
                        break;
                    }
                    idx[i] = 0;
                    i += 1;
                }
            }
        }
    }

    #[test]
    fn mu_by_hand() {
        let z = Ring::integers();
        // P = 1 - a t: ghost (a, a^2, ..., a^m)
        let a = z.from_i64(3);
        let p = TruncatedSeries::one_minus(&z, &a, 1, 4);
        let g = mu_map(&p).unwrap();
        assert_eq!(
            g.components(),
            &[z.from_i64(3), z.from_i64(9), z.from_i64(27), z.from_i64(81)]
        );
        // P = 1 - a t^n: n a^k at components kn, 0 elsewhere
        let p2 = TruncatedSeries::one_minus(&z, &a, 2, 5);
        let g2 = mu_map(&p2).unwrap();
        assert_eq!(
            g2.components(),
            &[
                z.zero(),
                z.from_i64(6),
                z.zero(),
                z.from_i64(18),
                z.zero()
            ]
        );
        // P = 1 -> 0
        let g3 = mu_map(&TruncatedSeries::one(z.clone(), 3)).unwrap();
        assert!(g3.components().iter().all(|c| z.is_zero(c)));
    }

    #[test]
    fn psi_equals_mu_after_lambda() {
        let z = Ring::integers();
        let s = TruncationSet::initial_segment(5);
        let w = WittVector::new(
            s,
            z.clone(),
            vec![
                z.from_i64(2),
                z.from_i64(-3),
                z.from_i64(1),
                z.from_i64(4),
                z.from_i64(-1),
            ],
        )
        .unwrap();
        let via_series = mu_map(&lambda_map(&w).unwrap()).unwrap();
        assert_eq!(via_series, crate::witt::ghost_of(&w));
    }

    #[test]
    fn series_addition_matches_witt_addition() {
        let f2 = Ring::prime_field(2).unwrap();
        let s = TruncationSet::initial_segment(2);
        let a = teichmuller(&f2.one(), &s);
        let p = lambda_map(&a).unwrap();
        let prod = series_add_as_witt(&p, &p).unwrap();
        // (1-t)^2 = 1 + t^2 over F_2
        assert_eq!(prod.coeffs(), &[f2.zero(), f2.one()]);
        assert_eq!(lambda_inverse(&prod).unwrap(), witt_add(&a, &a).unwrap());
    }

    #[test]
    fn frobenius_verschiebung_formulas() {
        let z = Ring::integers();
        let r = z.from_i64(5);
        // F_2(1 - r t) = 1 - r^2 t
        let p = TruncatedSeries::one_minus(&z, &r, 1, 4);
        let f = series_frobenius(2, &p).unwrap();
        assert_eq!(f, TruncatedSeries::one_minus(&z, &z.from_i64(25), 1, 2));
        // F_2(1 - r t^2) = (1 - r t)^2
        let p2 = TruncatedSeries::one_minus(&z, &r, 2, 4);
        let f2 = series_frobenius(2, &p2).unwrap();
        assert_eq!(
            f2,
            TruncatedSeries::one_minus(&z, &r, 1, 2).pow(2).unwrap()
        );
        // V_3(1 - r t^2) = 1 - r t^6
        let v = series_verschiebung(3, &p2, 12).unwrap();
        assert_eq!(v, TruncatedSeries::one_minus(&z, &r, 6, 12));
    }

    #[test]
    fn lth_roots() {
        let f3 = Ring::prime_field(3).unwrap();
        // (1 - r t)^2 has square root 1 - r t
        let r = f3.from_i64(2);
        let p = TruncatedSeries::one_minus(&f3, &r, 1, 5).pow(2).unwrap();
        let h = series_lth_root(&p, 2).unwrap();
        assert_eq!(h, TruncatedSeries::one_minus(&f3, &r, 1, 5));
        // root of 1 is 1
        let one = TruncatedSeries::one(f3.clone(), 5);
        assert_eq!(series_lth_root(&one, 2).unwrap(), one);
        // self-check on an arbitrary series
        let q = TruncatedSeries::new(
            f3.clone(),
            vec![f3.from_i64(1), f3.from_i64(2), f3.from_i64(0), f3.from_i64(1), f3.from_i64(2)],
        )
        .unwrap();
        let h2 = series_lth_root(&q, 2).unwrap();
        assert_eq!(h2.pow(2).unwrap(), q);
        // l not invertible
        let f2 = Ring::prime_field(2).unwrap();
        let one2 = TruncatedSeries::one(f2, 3);
        assert!(matches!(
            series_lth_root(&one2, 2),
            Err(Error::PrimeNotInvertible(2))
        ));
    }
}
