//! Declared Frobenius lifts: ring endomorphisms `phi_p` with
//! `phi_p(a) = a^p (mod p)`, and the composites `phi_n`.

use num::{BigInt, Integer, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rings::{univar, Payload, Ring, RingElement, RingKind};

/// A declared lift of Frobenius at a prime.
#[derive(Debug, Clone)]
pub struct FrobeniusLift {
    ring: Ring,
    pub p: u64,
    kind: LiftKind,
}

#[derive(Debug, Clone)]
enum LiftKind {
    /// phi_p = id; valid when a = a^p mod p holds identically (Fermat) or p
    /// is invertible so that the congruence is vacuous.
    Identity,
    /// Polynomial rings: coefficients fixed, variables raised to p-th powers.
    VarsPow,
    /// Char-p rings: a -> a^p.
    Pow,
    /// Galois rings: the unique lift fixing Teichmueller representatives,
    /// determined by the Hensel-lifted image of the generator.
    Galois { gen_image: Vec<BigInt> },
}

impl FrobeniusLift {
    pub fn apply(&self, a: &RingElement) -> RingElement {
        assert_eq!(a.ring, self.ring);
        match &self.kind {
            LiftKind::Identity => a.clone(),
            LiftKind::Pow => self.ring.pow(a, self.p),
            LiftKind::VarsPow => match &a.payload {
                Payload::Poly(q) => {
                    let terms = q.terms().map(|(m, c)| {
                        let mm: Vec<u32> = m.iter().map(|&e| e * self.p as u32).collect();
                        (mm, c.clone())
                    });
                    RingElement {
                        ring: self.ring.clone(),
                        payload: Payload::Poly(crate::poly::ZPoly::from_terms(q.nvars(), terms)),
                    }
                }
                _ => unreachable!(),
            },
            LiftKind::Galois { gen_image } => match &a.payload {
                Payload::PolyQuot(coeffs) => {
                    // evaluate sum c_i * g^i by Horner
                    let g = RingElement {
                        ring: self.ring.clone(),
                        payload: Payload::PolyQuot(gen_image.clone()),
                    };
                    let mut acc = self.ring.zero();
                    for c in coeffs.iter().rev() {
                        acc = self.ring.mul(&acc, &g);
                        acc = self.ring.add(&acc, &self.ring.from_int(c));
                    }
                    acc
                }
                _ => unreachable!(),
            },
        }
    }
}

/// The declared lift of Frobenius at `p`, or `NoLiftDeclared`.
pub fn frobenius_lift(ring: &Ring, p: u64) -> Result<FrobeniusLift> {
    if !univar::is_prime(p) {
        return Err(Error::InvalidRing(format!("{} is not prime", p)));
    }
    let kind = match ring.kind() {
        RingKind::Integers | RingKind::IntegersLocalized { .. } => LiftKind::Identity,
        RingKind::PrimeField { .. } => LiftKind::Identity,
        RingKind::FiniteField { p: q, .. } | RingKind::FpQuotient { p: q, .. } => {
            if *q == p {
                LiftKind::Pow
            } else {
                // p is a unit, the congruence mod p is vacuous
                LiftKind::Identity
            }
        }
        RingKind::Polynomial { base, .. } => match base.kind() {
            RingKind::Integers => LiftKind::VarsPow,
            RingKind::PrimeField { p: q } => {
                if *q == p {
                    LiftKind::VarsPow
                } else {
                    LiftKind::Identity
                }
            }
            _ => return Err(Error::NoLiftDeclared(p)),
        },
        RingKind::GaloisRing { p: q, n, k, modulus } => {
            // p invertible (q != p), or GR(p^N, 1) = Z/p^N where the lift
            // fixing Teichmueller representatives is the identity
            if *q != p || *k == 1 {
                LiftKind::Identity
            } else {
                LiftKind::Galois {
                    gen_image: galois_frobenius_generator_image(p, *n, modulus),
                }
            }
        }
        RingKind::IntegersMod { .. } => return Err(Error::NoLiftDeclared(p)),
    };
    Ok(FrobeniusLift {
        ring: ring.clone(),
        p,
        kind,
    })
}

/// Hensel-lift the root of the modulus congruent to x^p mod p: Newton
/// iteration y <- y - m(y)/m'(y) in GR(p^n, k).
fn galois_frobenius_generator_image(p: u64, n: u32, modulus: &[BigInt]) -> Vec<BigInt> {
    let ring = Ring::galois_ring(p, n, (modulus.len() - 1) as u32, modulus.to_vec())
        .expect("validated modulus");
    let x = crate::rings::quot_generator(&ring);
    let mut y = ring.pow(&x, p);
    // m(y) and m'(y) with integer coefficients of the modulus
    let eval = |y: &RingElement, coeffs: &[BigInt]| -> RingElement {
        let mut acc = ring.zero();
        for cc in coeffs.iter().rev() {
            acc = ring.mul(&acc, y);
            acc = ring.add(&acc, &ring.from_int(cc));
        }
        acc
    };
    let deriv: Vec<BigInt> = modulus
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, cc)| cc * BigInt::from(i))
        .collect();
    for _ in 0..(64 - (n as u64).leading_zeros() + 2) {
        let m_y = eval(&y, modulus);
        if ring.is_zero(&m_y) {
            break;
        }
        let d_y = eval(&y, &deriv);
        let d_inv = ring.invert(&d_y).expect("separable modulus");
        y = ring.sub(&y, &ring.mul(&m_y, &d_inv));
    }
    debug_assert!(ring.is_zero(&eval(&y, modulus)));
    match y.payload {
        Payload::PolyQuot(v) => v,
        _ => unreachable!(),
    }
}

/// phi_n = product over p | n of phi_p^(v_p(n)).
pub fn apply_phi_n(ring: &Ring, n: u64, a: &RingElement) -> Result<RingElement> {
    let mut out = a.clone();
    let mut rest = n;
    let mut d = 2;
    while d * d <= rest {
        if rest % d == 0 {
            let lift = frobenius_lift(ring, d)?;
            while rest % d == 0 {
                out = lift.apply(&out);
                rest /= d;
            }
        }
        d += 1;
    }
    if rest > 1 {
        let lift = frobenius_lift(ring, rest)?;
        out = lift.apply(&out);
    }
    Ok(out)
}

/// Membership of `x` in the principal ideal `n * ring`.
pub fn divides_int(ring: &Ring, n: &BigInt, x: &RingElement) -> bool {
    if n.is_one() {
        return true;
    }
    match (ring.kind(), &x.payload) {
        (RingKind::Integers, Payload::Int(v)) => (v % n).is_zero(),
        (RingKind::IntegersMod { m }, Payload::Residue(v)) => {
            let g = n.gcd(m);
            (v % g).is_zero()
        }
        (RingKind::PrimeField { p }, Payload::Residue(v)) => {
            if (n % BigInt::from(*p)).is_zero() {
                v.is_zero()
            } else {
                true
            }
        }
        (RingKind::FiniteField { p, .. }, Payload::PolyQuot(v))
        | (RingKind::FpQuotient { p, .. }, Payload::PolyQuot(v)) => {
            if (n % BigInt::from(*p)).is_zero() {
                v.is_empty()
            } else {
                true
            }
        }
        (RingKind::GaloisRing { p, n: prec, .. }, Payload::PolyQuot(v)) => {
            let pb = BigInt::from(*p);
            let mut val = 0u32;
            let mut rest = n.clone();
            while (&rest % &pb).is_zero() && val < *prec {
                rest /= &pb;
                val += 1;
            }
            let pv = pb.pow(val.min(*prec));
            v.iter().all(|c| (c % &pv).is_zero())
        }
        (RingKind::Polynomial { base, .. }, Payload::Poly(q)) => match base.kind() {
            RingKind::Integers => q.terms().all(|(_, c)| (c % n).is_zero()),
            RingKind::PrimeField { p } => {
                if (n % BigInt::from(*p)).is_zero() {
                    q.is_zero()
                } else {
                    true
                }
            }
            _ => unreachable!(),
        },
        (RingKind::IntegersLocalized { .. }, Payload::Rational(_)) => {
            ring.div_exact_int(x, &n.abs()).is_ok()
        }
        _ => unreachable!("payload mismatch"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::quot_generator;

    #[test]
    fn integers_identity() {
        let z = Ring::integers();
        let lift = frobenius_lift(&z, 2).unwrap();
        let a = z.from_i64(7);
        assert_eq!(lift.apply(&a), a);
        // a = a^2 mod 2
        let diff = z.sub(&lift.apply(&a), &z.mul(&a, &a));
        assert!(divides_int(&z, &BigInt::from(2), &diff));
    }

    #[test]
    fn polynomial_vars_to_powers() {
        let zx = Ring::polynomial(Ring::integers(), vec!["x"]).unwrap();
        let x = RingElement {
            ring: zx.clone(),
            payload: Payload::Poly(crate::poly::ZPoly::var_pow(1, 0, 1, BigInt::one())),
        };
        let lift = frobenius_lift(&zx, 3).unwrap();
        assert_eq!(lift.apply(&x), zx.pow(&x, 3));
        // multiplicativity on a sum: phi(x + 2) = x^3 + 2
        let e = zx.add(&x, &zx.from_i64(2));
        let img = lift.apply(&e);
        assert_eq!(img, zx.add(&zx.pow(&x, 3), &zx.from_i64(2)));
        // phi_p(a) = a^p mod p
        let diff = zx.sub(&img, &zx.pow(&e, 3));
        assert!(divides_int(&zx, &BigInt::from(3), &diff));
        // lifts for distinct primes commute
        let l2 = frobenius_lift(&zx, 2).unwrap();
        assert_eq!(l2.apply(&lift.apply(&e)), lift.apply(&l2.apply(&e)));
    }

    #[test]
    fn galois_ring_hensel_lift() {
        // GR(4,2) = Z_4[x]/(x^2+x+1): phi is the lifted conjugation, phi^2 = id,
        // and phi(a) = a^2 mod 2 on all 16 elements.
        let gr = Ring::galois_ring(
            2,
            2,
            2,
            vec![BigInt::one(), BigInt::one(), BigInt::one()],
        )
        .unwrap();
        let lift = frobenius_lift(&gr, 2).unwrap();
        for a in gr.enumerate(100).unwrap() {
            let img = lift.apply(&a);
            let diff = gr.sub(&img, &gr.mul(&a, &a));
            assert!(divides_int(&gr, &BigInt::from(2), &diff));
            assert_eq!(lift.apply(&img), a, "phi^2 = id fails at {}", a);
        }
        // ring homomorphism on a sample pair
        let g = quot_generator(&gr);
        let h = gr.add(&g, &gr.one());
        assert_eq!(
            lift.apply(&gr.mul(&g, &h)),
            gr.mul(&lift.apply(&g), &lift.apply(&h))
        );
    }

    #[test]
    fn no_lift_for_plain_residue_rings() {
        let zm = Ring::integers_mod(10).unwrap();
        assert!(matches!(
            frobenius_lift(&zm, 2),
            Err(Error::NoLiftDeclared(2))
        ));
    }
}
