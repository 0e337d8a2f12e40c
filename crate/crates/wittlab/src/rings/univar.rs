//! Dense univariate polynomial arithmetic with coefficients in `Z/c`.
//!
//! Coefficient vectors are low-to-high and trimmed (no trailing zeros).
//! These back the element arithmetic of the finite-field, Galois-ring and
//! quotient-ring kinds.

use num::{BigInt, Integer, One, Signed, Zero};

pub fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
    v
}

pub fn reduce_mod(v: &[BigInt], c: &BigInt) -> Vec<BigInt> {
    trim(v.iter().map(|x| x.mod_floor(c)).collect())
}

pub fn deg(v: &[BigInt]) -> Option<usize> {
    if v.is_empty() {
        None
    } else {
        Some(v.len() - 1)
    }
}

pub fn add(a: &[BigInt], b: &[BigInt], c: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let mut out = vec![BigInt::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    reduce_mod(&out, c)
}

pub fn neg(a: &[BigInt], c: &BigInt) -> Vec<BigInt> {
    reduce_mod(&a.iter().map(|x| -x).collect::<Vec<_>>(), c)
}

pub fn scale(a: &[BigInt], s: &BigInt, c: &BigInt) -> Vec<BigInt> {
    reduce_mod(&a.iter().map(|x| x * s).collect::<Vec<_>>(), c)
}

pub fn mul(a: &[BigInt], b: &[BigInt], c: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    reduce_mod(&out, c)
}

/// Remainder of `a` modulo a monic modulus, coefficients mod `c`.
pub fn rem_monic(a: &[BigInt], modulus: &[BigInt], c: &BigInt) -> Vec<BigInt> {
    let k = modulus.len() - 1;
    debug_assert!(modulus[k].is_one());
    let mut r: Vec<BigInt> = a.to_vec();
    while r.len() > k {
        let top = r.pop().unwrap();
        if top.is_zero() {
            continue;
        }
        let shift = r.len() - k;
        for i in 0..k {
            r[shift + i] -= &top * &modulus[i];
        }
    }
    reduce_mod(&r, c)
}

pub fn mulmod(a: &[BigInt], b: &[BigInt], modulus: &[BigInt], c: &BigInt) -> Vec<BigInt> {
    rem_monic(&mul(a, b, c), modulus, c)
}

pub fn powmod(a: &[BigInt], e: &BigInt, modulus: &[BigInt], c: &BigInt) -> Vec<BigInt> {
    assert!(!e.is_negative());
    let mut acc = vec![BigInt::one()];
    let mut base = rem_monic(a, modulus, c);
    let mut e = e.clone();
    while e.is_positive() {
        if e.is_odd() {
            acc = mulmod(&acc, &base, modulus, c);
        }
        e >>= 1;
        if e.is_positive() {
            base = mulmod(&base, &base, modulus, c);
        }
    }
    acc
}

fn modinv(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(p);
    let e = BigInt::extended_gcd(&a, p);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(p))
    } else {
        None
    }
}

/// Monic gcd over the prime field `F_p`.
pub fn gcd_fp(a: &[BigInt], b: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let mut a = reduce_mod(a, p);
    let mut b = reduce_mod(b, p);
    while !b.is_empty() {
        let lead_inv = modinv(b.last().unwrap(), p).expect("p prime");
        let monic_b = scale(&b, &lead_inv, p);
        let mut r = a.clone();
        while r.len() >= monic_b.len() && !r.is_empty() {
            let top = r.last().unwrap().clone();
            if top.is_zero() {
                r.pop();
                continue;
            }
            let shift = r.len() - monic_b.len();
            for i in 0..monic_b.len() {
                let t = &top * &monic_b[i];
                r[shift + i] -= t;
            }
            r = reduce_mod(&r, p);
        }
        a = monic_b;
        b = trim(r);
    }
    if a.is_empty() {
        return a;
    }
    let li = modinv(a.last().unwrap(), p).expect("p prime");
    scale(&a, &li, p)
}

/// Deterministic irreducibility test for a monic polynomial over `F_p`:
/// `x^(p^k) = x mod f` and `gcd(x^(p^(k/l)) - x, f) = 1` for primes `l | k`.
pub fn irreducible_fp(f: &[BigInt], p: &BigInt) -> bool {
    let f = reduce_mod(f, p);
    let k = match deg(&f) {
        Some(k) if k >= 1 => k,
        _ => return false,
    };
    if !f[k].is_one() {
        return false;
    }
    if k == 1 {
        return true;
    }
    let x = vec![BigInt::zero(), BigInt::one()];
    let xq = powmod(&x, &p.pow(k as u32), &f, p);
    if trim(add(&xq, &neg(&x, p), p)) != Vec::<BigInt>::new() {
        return false;
    }
    for l in prime_factors(k as u64) {
        let e = p.pow((k as u64 / l) as u32);
        let xql = powmod(&x, &e, &f, p);
        let diff = add(&xql, &neg(&x, p), p);
        let g = gcd_fp(&diff, &f, p);
        if deg(&g) != Some(0) {
            return false;
        }
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest monic irreducible polynomial of degree `k` over `F_p`,
/// by lexicographic scan over the non-leading coefficients.
pub fn default_irreducible(p: u64, k: u32) -> Vec<BigInt> {
    let pb = BigInt::from(p);
    let k = k as usize;
    if k == 1 {
        // x
        return vec![BigInt::zero(), BigInt::one()];
    }
    let mut coeffs = vec![0u64; k];
    loop {
        let mut f: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
        f.push(BigInt::one());
        if irreducible_fp(&f, &pb) {
            return f;
        }
        // increment base-p counter
        let mut i = 0;
        loop {
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            i += 1;
            assert!(i < k, "no irreducible polynomial found (impossible)");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn irreducibility_small_cases() {
        let p2 = BigInt::from(2);
        // x^2 + x + 1 irreducible over F_2
        assert!(irreducible_fp(&b(&[1, 1, 1]), &p2));
        // x^2 + 1 = (x+1)^2 over F_2
        assert!(!irreducible_fp(&b(&[1, 0, 1]), &p2));
        let p3 = BigInt::from(3);
        // x^2 + 1 irreducible over F_3
        assert!(irreducible_fp(&b(&[1, 0, 1]), &p3));
        // x^3 + x = x(x^2+1) over F_3
        assert!(!irreducible_fp(&b(&[0, 1, 0, 1]), &p3));
    }

    #[test]
    fn default_modulus_is_irreducible() {
        for (p, k) in [(2u64, 2u32), (2, 3), (2, 6), (2, 12), (3, 2), (3, 4), (3, 6)] {
            let f = default_irreducible(p, k);
            assert_eq!(f.len(), k as usize + 1);
            assert!(irreducible_fp(&f, &BigInt::from(p)));
        }
    }

    #[test]
    fn rem_monic_reduces() {
        let c = BigInt::from(100);
        // x^2 mod (x^2+x+1) = -x-1 = 99x + 99
        let r = rem_monic(&b(&[0, 0, 1]), &b(&[1, 1, 1]), &c);
        assert_eq!(r, b(&[99, 99]));
    }
}
