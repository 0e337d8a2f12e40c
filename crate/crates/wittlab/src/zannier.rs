//! Constructive factorization of truncated series into linear factors:
//! congruence systems over Galois rings, the factorization identity for
//! 1 - x t^m, the inductive factorization of arbitrary leading-1 polynomials
//! mod t^(m+1) over fields containing enough roots of unity, and the
//! counting bound showing non-surjectivity over small prime fields.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Mutex, OnceLock};

use num::{BigInt, Integer, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rings::{poly_quot_element, univar, Payload, Ring, RingElement, RingKind};
use crate::series::TruncatedSeries;

/// Verified data for the power-sum congruence system: pairs (a_i, b_i) in
/// GR(p^N, k) with `sum_i (a_i + b_i x)^l = 0` for l = 1..m-1 and
/// `sum_i (a_i + b_i x)^m = m x`, exactly in `GR(p^N, k)[x]`.
#[derive(Debug, Clone)]
pub struct PowerSumSystem {
    pub p: u64,
    pub m: u64,
    pub precision: u32,
    pub k: u32,
    pub ring: Ring,
    pub pairs: Vec<(RingElement, RingElement)>,
}

/// Multiplicative order of `a` modulo `modulus` (gcd(a, modulus) = 1).
pub fn multiplicative_order(a: u64, modulus: u64) -> u32 {
    assert!(modulus >= 1);
    if modulus == 1 {
        return 1;
    }
    let mut x = a % modulus;
    let mut k = 1u32;
    while x != 1 {
        x = x * (a % modulus) % modulus;
        k += 1;
        assert!(k < 10_000, "order search overflow");
    }
    k
}

fn factor_bigint(n: &BigInt) -> Result<Vec<BigInt>> {
    let mut out = vec![];
    let mut rest = n.clone();
    let mut d = BigInt::from(2);
    let cap = BigInt::from(100_000_000u64);
    while &d * &d <= rest {
        if (&rest % &d).is_zero() {
            out.push(d.clone());
            while (&rest % &d).is_zero() {
                rest /= &d;
            }
        }
        d += 1;
        if d > cap {
            return Err(Error::TooLarge(format!(
                "cannot factor {} by trial division",
                n
            )));
        }
    }
    if rest > BigInt::one() {
        out.push(rest);
    }
    Ok(out)
}

/// Teichmueller representative: the limit of x -> x^(p^k) in GR(p^N, k).
pub fn teichmueller(gr: &Ring, x: &RingElement) -> RingElement {
    let (p, n, k) = match gr.kind() {
        RingKind::GaloisRing { p, n, k, .. } => (*p, *n, *k),
        _ => panic!("teichmueller lift needs a Galois ring"),
    };
    let mut y = x.clone();
    let e = {
        let mut e = 1u64;
        for _ in 0..k {
            e = e.saturating_mul(p);
        }
        e
    };
    for _ in 0..n {
        y = gr.pow(&y, e);
    }
    debug_assert_eq!(gr.pow(&y, e), y);
    y
}

/// A generator of the Teichmueller group of GR(p^N, k): an element of exact
/// multiplicative order p^k - 1, found by seeded random search.
pub fn teichmueller_generator(gr: &Ring) -> Result<RingElement> {
    let (p, k) = match gr.kind() {
        RingKind::GaloisRing { p, k, .. } => (*p, *k),
        _ => return Err(Error::Type("expected a Galois ring".into())),
    };
    let q1 = BigInt::from(p).pow(k) - BigInt::one();
    if q1.is_one() {
        return Ok(gr.one());
    }
    let primes = factor_bigint(&q1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a6e6e69);
    for _ in 0..4096 {
        let coeffs: Vec<BigInt> = (0..k).map(|_| BigInt::from(rng.gen_range(0..p))).collect();
        let cand = poly_quot_element(gr, coeffs);
        if gr.invert(&cand).is_none() {
            continue;
        }
        let t = teichmueller(gr, &cand);
        if pow_big(gr, &t, &q1) != gr.one() {
            continue;
        }
        let full_order = primes
            .iter()
            .all(|l| pow_big(gr, &t, &(&q1 / l)) != gr.one());
        if full_order {
            return Ok(t);
        }
    }
    Err(Error::ConstructionFailed(
        "no multiplicative generator found".into(),
    ))
}

fn pow_big(ring: &Ring, a: &RingElement, e: &BigInt) -> RingElement {
    assert!(!e.is_negative());
    let mut acc = ring.one();
    let mut base = a.clone();
    let mut e = e.clone();
    while e.is_positive() {
        if e.is_odd() {
            acc = ring.mul(&acc, &base);
        }
        e >>= 1;
        if e.is_positive() {
            base = ring.mul(&base, &base);
        }
    }
    acc
}

/// A Teichmueller element of exact order d (requires d | p^k - 1).
fn root_of_unity(gr: &Ring, d: u64) -> Result<RingElement> {
    let (p, k) = match gr.kind() {
        RingKind::GaloisRing { p, k, .. } => (*p, *k),
        _ => return Err(Error::Type("expected a Galois ring".into())),
    };
    let q1 = BigInt::from(p).pow(k) - BigInt::one();
    let db = BigInt::from(d);
    if !(&q1 % &db).is_zero() {
        return Err(Error::ConstructionFailed(format!(
            "mu_{} is not contained in GR({}^.., {})",
            d, p, k
        )));
    }
    let g = teichmueller_generator(gr)?;
    Ok(pow_big(gr, &g, &(&q1 / &db)))
}

/// sum_i (a_i + b_i x)^l as a dense coefficient vector (length l+1).
fn power_sum(ring: &Ring, pairs: &[(RingElement, RingElement)], l: u64) -> Vec<RingElement> {
    let l = l as usize;
    let mut out = vec![ring.zero(); l + 1];
    // binomial coefficients C(l, j)
    let mut binom = vec![BigInt::one()];
    for j in 1..=l {
        let prev = binom[j - 1].clone();
        binom.push(prev * BigInt::from((l - j + 1) as u64) / BigInt::from(j as u64));
    }
    for (a, b) in pairs {
        // powers of a and b
        let mut apow = vec![ring.one()];
        let mut bpow = vec![ring.one()];
        for i in 1..=l {
            let pa = ring.mul(&apow[i - 1], a);
            apow.push(pa);
            let pb = ring.mul(&bpow[i - 1], b);
            bpow.push(pb);
        }
        for j in 0..=l {
            let term = ring.mul(&ring.int_mul(&binom[j], &apow[l - j]), &bpow[j]);
            out[j] = ring.add(&out[j], &term);
        }
    }
    out
}

/// Verify both congruence families of a power-sum system by direct
/// polynomial expansion.
pub fn verify_power_sums(data: &PowerSumSystem) -> Result<()> {
    let ring = &data.ring;
    for l in 1..data.m {
        let ps = power_sum(ring, &data.pairs, l);
        if ps.iter().any(|c| !ring.is_zero(c)) {
            return Err(Error::ConstructionFailed(format!(
                "power sum at l = {} does not vanish",
                l
            )));
        }
    }
    let ps = power_sum(ring, &data.pairs, data.m);
    let m_elem = ring.from_int(&BigInt::from(data.m));
    for (j, c) in ps.iter().enumerate() {
        let expected = if j == 1 { m_elem.clone() } else { ring.zero() };
        if *c != expected {
            return Err(Error::ConstructionFailed(format!(
                "power sum at l = m has wrong x^{} coefficient",
                j
            )));
        }
    }
    Ok(())
}

/// Construct a verified power-sum system for (p, m, N).
pub fn power_sum_system(p: u64, m: u64, precision: u32) -> Result<PowerSumSystem> {
    assert!(univar::is_prime(p) && m >= 2 && precision >= 1);
    let data = if m % p == 1 {
        construct_vandermonde_branch(p, m, precision)?
    } else if m == 2 {
        construct_m2_branch(p, precision)?
    } else {
        construct_roots_branch(p, m, precision)?
    };
    verify_power_sums(&data)?;
    Ok(data)
}

/// Branch m != 1 mod p, m >= 3: S = g copies of mu_{m-1}, R = lambda * S
/// with lambda^(m-1) = -1, T pads |S u T| to a multiple of p^N.
fn construct_roots_branch(p: u64, m: u64, precision: u32) -> Result<PowerSumSystem> {
    let d = m - 1;
    let k_theta = multiplicative_order(p, d) as u64;
    let k = if p == 2 {
        k_theta
    } else {
        num::integer::lcm(k_theta, multiplicative_order(p, 2 * d) as u64)
    };
    let gr = Ring::galois_ring_default(p, precision, k as u32)?;
    let zeta = root_of_unity(&gr, d)?;
    let lambda = if p == 2 {
        // m even here, so d = m-1 is odd and (-1)^d = -1
        gr.neg(&gr.one())
    } else {
        // an element of exact order 2(m-1); its (m-1)-th power is -1
        root_of_unity(&gr, 2 * d)?
    };
    debug_assert_eq!(gr.pow(&lambda, d), gr.neg(&gr.one()));
    let pn = BigInt::from(p).pow(precision);
    // g = (m-1)^{-1} mod p^N as a positive count
    let e = BigInt::extended_gcd(&BigInt::from(d), &pn);
    let g_count = e.x.mod_floor(&pn).to_u64_digits().1.first().copied().unwrap_or(0).max(1);
    let mut pairs = vec![];
    let mut theta_pows = vec![gr.one()];
    for _ in 1..d {
        let prev = theta_pows.last().unwrap().clone();
        theta_pows.push(gr.mul(&prev, &zeta));
    }
    for _ in 0..g_count {
        for th in &theta_pows {
            pairs.push((th.clone(), gr.one()));
            pairs.push((gr.mul(&lambda, th), gr.zero()));
        }
    }
    // T: pad |S u T| to a multiple of p^N with pairs (0, 1)
    let s_count = BigInt::from(g_count) * BigInt::from(d);
    let pad = (-s_count).mod_floor(&pn);
    let pad: u64 = pad.to_u64_digits().1.first().copied().unwrap_or(0);
    for _ in 0..pad {
        pairs.push((gr.zero(), gr.one()));
    }
    Ok(PowerSumSystem {
        p,
        m,
        precision,
        k: k as u32,
        ring: gr,
        pairs,
    })
}

/// Branch m = 2 (so m != 1 mod p requires nothing: p = 2 gives 2 = 0 mod 2,
/// odd p gives 2 != 1). The sketched lambda * S choice cannot satisfy both
/// l = 1 and l = 2; instead:
///  - odd p: S = {(1,1)}, R = {(-1,0), (w,0), (-w,0)} with w^2 = -1;
///  - p = 2: S = {(1,1)}, R = {(-1,0)} + q blocks {(1,0),(1,0),(-2,0)} with
///    3q = -1 mod 2^(N-1), plus (0,1) padding.
fn construct_m2_branch(p: u64, precision: u32) -> Result<PowerSumSystem> {
    let pn = BigInt::from(p).pow(precision);
    if p != 2 {
        let k = multiplicative_order(p, 4) as u32;
        let gr = Ring::galois_ring_default(p, precision, k)?;
        let w = root_of_unity(&gr, 4)?; // w^2 = -1 exactly
        let mut pairs = vec![(gr.one(), gr.one())];
        pairs.push((gr.neg(&gr.one()), gr.zero()));
        pairs.push((w.clone(), gr.zero()));
        pairs.push((gr.neg(&w), gr.zero()));
        // |S u T| = 1 + t = 0 mod p^N
        let pad = (-BigInt::one()).mod_floor(&pn);
        for _ in 0..pad.to_u64_digits().1.first().copied().unwrap_or(0) {
            pairs.push((gr.zero(), gr.one()));
        }
        return Ok(PowerSumSystem {
            p,
            m: 2,
            precision,
            k,
            ring: gr,
        pairs,
        });
    }
    // p = 2: need sum a = 0 and sum a^2 = 0 mod 2^N over U = {1} u R
    let gr = Ring::galois_ring_default(2, precision, 1)?;
    let mut pairs = vec![(gr.one(), gr.one())];
    pairs.push((gr.neg(&gr.one()), gr.zero()));
    // q blocks {1, 1, -2}: sum = 0, sum of squares = 6 each;
    // 2 + 6q = 0 mod 2^N <=> 3q = -1 mod 2^(N-1)
    let modulus = BigInt::from(2).pow(precision.saturating_sub(1).max(1));
    let e = BigInt::extended_gcd(&BigInt::from(3), &modulus);
    let q = (-e.x).mod_floor(&modulus);
    let q: u64 = q.to_u64_digits().1.first().copied().unwrap_or(0);
    for _ in 0..q {
        pairs.push((gr.one(), gr.zero()));
        pairs.push((gr.one(), gr.zero()));
        pairs.push((gr.from_i64(-2), gr.zero()));
    }
    // pad |S u T| to a multiple of 2^N
    let pad = (-BigInt::one()).mod_floor(&BigInt::from(2).pow(precision));
    for _ in 0..pad.to_u64_digits().1.first().copied().unwrap_or(0) {
        pairs.push((gr.zero(), gr.one()));
    }
    Ok(PowerSumSystem {
        p,
        m: 2,
        precision,
        k: 1,
        ring: gr,
        pairs,
    })
}

/// Branch m = 1 mod p: I = g copies of mu_m scaled by (alpha_h, alpha_h xi_h)
/// where the alpha_h^m solve a Vandermonde system with unit determinant and
/// the m-th roots are extracted, enlarging the unramified field if needed.
fn construct_vandermonde_branch(p: u64, m: u64, precision: u32) -> Result<PowerSumSystem> {
    let k1 = multiplicative_order(p, m) as u64;
    // smallest multiple of k1 with p^k >= m + 1 residues for the xi's
    let mut k_small = k1;
    loop {
        let mut size = BigInt::one();
        for _ in 0..k_small {
            size *= BigInt::from(p);
        }
        if size >= BigInt::from(m + 1) {
            break;
        }
        k_small += k1;
    }
    // try the small field with a few xi selections, then the m-fold extension
    for attempt in 0..3u64 {
        if let Some(data) = try_vandermonde(p, m, precision, k_small, k_small, attempt)? {
            return Ok(data);
        }
    }
    let k_full = k_small * m;
    for attempt in 0..3u64 {
        if let Some(data) = try_vandermonde(p, m, precision, k_small, k_full, attempt)? {
            return Ok(data);
        }
    }
    Err(Error::ConstructionFailed(format!(
        "vandermonde branch failed for (p, m, N) = ({}, {}, {})",
        p, m, precision
    )))
}

fn try_vandermonde(
    p: u64,
    m: u64,
    precision: u32,
    k_small: u64,
    k: u64,
    attempt: u64,
) -> Result<Option<PowerSumSystem>> {
    let gr = Ring::galois_ring_default(p, precision, k as u32)?;
    let q1 = BigInt::from(p).pow(k as u32) - BigInt::one();
    let g_full = teichmueller_generator(&gr)?;
    // the subfield F_{p^k_small} sits inside as powers of delta
    let sub_order = BigInt::from(p).pow(k_small as u32) - BigInt::one();
    let delta = pow_big(&gr, &g_full, &(&q1 / &sub_order));
    let zeta = pow_big(&gr, &delta, &(&sub_order / BigInt::from(m)));
    // xi_h: m+1 distinct subfield Teichmueller elements (plus 0), shifted by
    // the attempt number
    let g_count = (m + 1) as usize;
    let mut xis = vec![gr.zero()];
    let mut pw = pow_big(&gr, &delta, &BigInt::from(attempt));
    while xis.len() < g_count {
        xis.push(pw.clone());
        pw = gr.mul(&pw, &delta);
    }
    // solve sum_h c_h xi_h^l = delta_{l,1} m^{-1} for l = 0..m
    let rows = (m + 1) as usize;
    let mut mat: Vec<Vec<RingElement>> = (0..rows)
        .map(|l| xis.iter().map(|x| gr.pow(x, l as u64)).collect())
        .collect();
    let m_inv = gr
        .inv_int(m)
        .ok_or_else(|| Error::ConstructionFailed("m not invertible".into()))?;
    let mut rhs: Vec<RingElement> = (0..rows).map(|_| gr.zero()).collect();
    rhs[1] = m_inv;
    let sol = match solve_unit_system(&gr, &mut mat, &mut rhs) {
        Some(s) => s,
        None => return Ok(None),
    };
    // extract alpha_h = c_h^(1/m); c_h = 0 drops the block
    let mut alphas = vec![];
    for c in &sol {
        if gr.is_zero(c) {
            alphas.push(gr.zero());
            continue;
        }
        if gr.invert(c).is_none() {
            return Ok(None); // c_h in p*GR: retry with other xi's
        }
        match mth_root(&gr, c, m, &g_full, &q1)? {
            Some(a) => alphas.push(a),
            None => return Ok(None), // no root in this field
        }
    }
    // assemble the mu_m orbits
    let mut pairs = vec![];
    let mut gammas = vec![gr.one()];
    for _ in 1..m {
        let prev = gammas.last().unwrap().clone();
        gammas.push(gr.mul(&prev, &zeta));
    }
    for (h, alpha) in alphas.iter().enumerate() {
        if gr.is_zero(alpha) {
            continue;
        }
        let beta = gr.mul(alpha, &xis[h]);
        for gamma in &gammas {
            pairs.push((gr.mul(gamma, alpha), gr.mul(gamma, &beta)));
        }
    }
    let data = PowerSumSystem {
        p,
        m,
        precision,
        k: k as u32,
        ring: gr,
        pairs,
    };
    match verify_power_sums(&data) {
        Ok(()) => Ok(Some(data)),
        Err(_) => Ok(None),
    }
}

/// Gaussian elimination with unit pivots over a Galois ring; `None` when no
/// unit pivot is available (the xi selection must be retried).
fn solve_unit_system(
    ring: &Ring,
    mat: &mut [Vec<RingElement>],
    rhs: &mut [RingElement],
) -> Option<Vec<RingElement>> {
    let n = mat.len();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| ring.invert(&mat[r][col]).is_some())?;
        mat.swap(col, piv);
        rhs.swap(col, piv);
        perm.swap(col, piv);
        let inv = ring.invert(&mat[col][col]).unwrap();
        for c in 0..n {
            mat[col][c] = ring.mul(&mat[col][c], &inv);
        }
        rhs[col] = ring.mul(&rhs[col], &inv);
        for r in 0..n {
            if r == col || ring.is_zero(&mat[r][col]) {
                continue;
            }
            let f = mat[r][col].clone();
            for c in 0..n {
                let t = ring.mul(&f, &mat[col][c]);
                mat[r][c] = ring.sub(&mat[r][c], &t);
            }
            let t = ring.mul(&f, &rhs[col]);
            rhs[r] = ring.sub(&rhs[r], &t);
        }
    }
    Some(rhs.to_vec())
}

/// The m-th root of a unit in GR(p^N, k) when the residue is an m-th power
/// (p does not divide m): Teichmueller part via the order structure of the
/// Teichmueller group, principal part via Hensel iteration on x^m = u.
fn mth_root(
    gr: &Ring,
    c: &RingElement,
    m: u64,
    gen: &RingElement,
    q1: &BigInt,
) -> Result<Option<RingElement>> {
    let mb = BigInt::from(m);
    // split c = tau * eps with tau Teichmueller, eps = 1 mod p
    let tau = teichmueller(gr, c);
    let tau_inv = gr.invert(&tau).expect("teichmueller part of a unit");
    let eps = gr.mul(c, &tau_inv);
    // Teichmueller-part root: tau lies in <gen>; find y with y^m = tau.
    // If m | q1 use the subgroup trick: y0 = gen^(q1/(d*m))-style via the
    // order d of tau; otherwise m is invertible mod q1.
    let tau_root = if (q1 % &mb).is_zero() {
        // smallest d with tau^d = 1 along powers of gen^(q1/(d m)) requires a
        // discrete log in the subgroup generated by tau; the subgroup order
        // divides q1 and is small at desk scale only when tau lives in a
        // small subfield, which is the case in every power-sum system (the c_h
        // are solved in the small subfield).
        let d = element_order(gr, &tau, q1)?;
        if !(q1 % (&d * &mb)).is_zero() {
            return Ok(None);
        }
        let y = pow_big(gr, gen, &(q1 / (&d * &mb)));
        // y has order d*m, y^m generates the order-d subgroup containing tau
        let g1 = pow_big(gr, &y, &mb);
        let e = match discrete_log_small(gr, &g1, &tau, &d)? {
            Some(e) => e,
            None => return Ok(None),
        };
        pow_big(gr, &y, &e)
    } else {
        let inv = BigInt::extended_gcd(&mb, q1).x.mod_floor(q1);
        pow_big(gr, &tau, &inv)
    };
    // principal-part root by Hensel on f(x) = x^m - eps starting at 1
    let mut x = gr.one();
    let iterations = 2 * (32 - precision_of(gr).leading_zeros()) + 2;
    for _ in 0..iterations {
        // x <- x - (x^m - eps) / (m x^(m-1))
        let fx = gr.sub(&gr.pow(&x, m), &eps);
        if gr.is_zero(&fx) {
            break;
        }
        let dfx = gr.int_mul(&mb, &gr.pow(&x, m - 1));
        let dinv = gr.invert(&dfx).expect("m invertible, x a unit");
        x = gr.sub(&x, &gr.mul(&fx, &dinv));
    }
    if gr.pow(&x, m) != eps {
        return Ok(None);
    }
    let root = gr.mul(&tau_root, &x);
    if &gr.pow(&root, m) == c {
        Ok(Some(root))
    } else {
        Ok(None)
    }
}

fn precision_of(gr: &Ring) -> u32 {
    match gr.kind() {
        RingKind::GaloisRing { n, .. } => *n,
        _ => 1,
    }
}

/// Order of a Teichmueller element (divides q1); errors at desk scale caps.
fn element_order(gr: &Ring, t: &RingElement, q1: &BigInt) -> Result<BigInt> {
    let mut order = q1.clone();
    for l in factor_bigint(q1)? {
        while (&order % &l).is_zero() && pow_big(gr, t, &(&order / &l)) == gr.one() {
            order /= &l;
        }
    }
    Ok(order)
}

/// Brute-force discrete log in the cyclic group generated by `g` of order
/// `ord` (small at desk scale).
fn discrete_log_small(
    gr: &Ring,
    g: &RingElement,
    target: &RingElement,
    ord: &BigInt,
) -> Result<Option<BigInt>> {
    let cap = BigInt::from(1u64 << 20);
    if ord > &cap {
        return Err(Error::TooLarge(format!(
            "discrete log in a subgroup of order {}",
            ord
        )));
    }
    let mut x = gr.one();
    let mut e = BigInt::zero();
    while &e < ord {
        if &x == target {
            return Ok(Some(e));
        }
        x = gr.mul(&x, g);
        e += 1;
    }
    Ok(None)
}

/// Linear factors over GR(p^N, k), N = n + floor(log_p m), together with
/// their reductions mod p, satisfying
/// prod (1 - f_i t) = 1 - x t^m  mod (p^n, t^(m+1)).
#[derive(Debug, Clone)]
pub struct LinearFactorSystem {
    pub p: u64,
    pub m: u64,
    pub n: u32,
    pub precision: u32,
    pub ring: Ring,
    pub residue_ring: Ring,
    pub pairs: Vec<(RingElement, RingElement)>,
    pub reduced: Vec<(RingElement, RingElement)>,
}

pub fn linear_factor_system(p: u64, m: u64, n: u32) -> Result<LinearFactorSystem> {
    let b = {
        let mut b = 0u32;
        let mut v = p;
        while v <= m {
            v = v.saturating_mul(p);
            b += 1;
        }
        b
    };
    let precision = n + b;
    let data = power_sum_system(p, m, precision)?;
    let residue_ring = crate::semigroup::galois_residue_field(&data.ring)?;
    let reduced: Vec<(RingElement, RingElement)> = data
        .pairs
        .iter()
        .map(|(a, bb)| (reduce_mod_p(&data.ring, &residue_ring, a), reduce_mod_p(&data.ring, &residue_ring, bb)))
        .collect();
    let out = LinearFactorSystem {
        p,
        m,
        n,
        precision,
        ring: data.ring,
        residue_ring,
        pairs: data.pairs,
        reduced,
    };
    verify_linear_factors(&out)?;
    Ok(out)
}

fn reduce_mod_p(gr: &Ring, residue: &Ring, x: &RingElement) -> RingElement {
    let p = match gr.kind() {
        RingKind::GaloisRing { p, .. } => *p,
        _ => unreachable!(),
    };
    match &x.payload {
        Payload::PolyQuot(v) => {
            let red = univar::reduce_mod(v, &BigInt::from(p));
            match residue.kind() {
                RingKind::PrimeField { .. } => {
                    let c0 = red.first().cloned().unwrap_or_else(BigInt::zero);
                    residue.from_int(&c0)
                }
                _ => poly_quot_element(residue, red),
            }
        }
        _ => unreachable!(),
    }
}

/// Expand prod (1 - f_i t) mod t^(m+1) with f_i = a_i + b_i x, and check it
/// equals 1 - x t^m with every coefficient congruence taken mod p^n.
fn verify_linear_factors(l2: &LinearFactorSystem) -> Result<()> {
    let ring = &l2.ring;
    let m = l2.m as usize;
    // t-coefficients are polynomials in x: Vec<Vec<RingElement>>
    let mut coeffs: Vec<Vec<RingElement>> = vec![vec![]; m + 1];
    coeffs[0] = vec![ring.one()];
    for (a, b) in &l2.pairs {
        // multiply by (1 - (a + b x) t)
        let mut next = coeffs.clone();
        for d in (1..=m).rev() {
            // next[d] -= (a + b x) * coeffs[d-1]
            let prev = &coeffs[d - 1];
            let mut prod = vec![ring.zero(); prev.len() + 1];
            for (i, c) in prev.iter().enumerate() {
                prod[i] = ring.add(&prod[i], &ring.mul(a, c));
                prod[i + 1] = ring.add(&prod[i + 1], &ring.mul(b, c));
            }
            while next[d].len() < prod.len() {
                next[d].push(ring.zero());
            }
            for (i, c) in prod.iter().enumerate() {
                next[d][i] = ring.sub(&next[d][i], c);
            }
        }
        coeffs = next;
    }
    let pn = BigInt::from(l2.p).pow(l2.n);
    for (d, poly) in coeffs.iter().enumerate() {
        for (i, c) in poly.iter().enumerate() {
            let mut expected = ring.zero();
            if d == 0 && i == 0 {
                expected = ring.one();
            }
            if d == m && i == 1 {
                expected = ring.neg(&ring.one());
            }
            let diff = ring.sub(c, &expected);
            if !crate::rings::frobenius::divides_int(ring, &pn, &diff) {
                return Err(Error::ConstructionFailed(format!(
                    "factor product differs from 1 - x t^{} at t^{} x^{}",
                    m, d, i
                )));
            }
        }
    }
    Ok(())
}

// --- the inductive factorization -------------------------------------------

fn field_params(ring: &Ring) -> Result<(u64, u64)> {
    match ring.kind() {
        RingKind::PrimeField { p } => Ok((*p, 1)),
        RingKind::FiniteField { p, k, .. } => Ok((*p, *k as u64)),
        _ => Err(Error::Type("expected a finite field".into())),
    }
}

/// Result of the inductive factorization: the extension field F_{p^k*} that
/// houses the roots, the embedded input, and the factor list.
pub struct Factorization {
    pub field: Ring,
    pub k_star: u64,
    pub roots: Vec<RingElement>,
}

/// Memoized linear-factor systems at n = 1 per (p, m).
fn factor_system_level(p: u64, m: u64) -> Result<LinearFactorSystem> {
    static MEMO: OnceLock<Mutex<HashMap<(u64, u64), LinearFactorSystem>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(l) = memo.lock().unwrap().get(&(p, m)) {
        return Ok(l.clone());
    }
    let built = linear_factor_system(p, m, 1)?;
    memo.lock()
        .unwrap()
        .entry((p, m))
        .or_insert_with(|| built.clone());
    Ok(built)
}

/// A generator of F_{p^k}^x found by seeded search (order verified against
/// the factorization of p^k - 1).
fn finite_field_generator(field: &Ring) -> Result<RingElement> {
    let (p, k) = field_params(field)?;
    let q1 = BigInt::from(p).pow(k as u32) - BigInt::one();
    if q1.is_one() {
        return Ok(field.one());
    }
    let primes = factor_bigint(&q1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x67656e66);
    for _ in 0..8192 {
        let cand = match field.kind() {
            RingKind::PrimeField { p } => field.from_int(&BigInt::from(rng.gen_range(1..*p))),
            RingKind::FiniteField { p, k, .. } => {
                let coeffs: Vec<BigInt> =
                    (0..*k).map(|_| BigInt::from(rng.gen_range(0..*p))).collect();
                poly_quot_element(field, coeffs)
            }
            _ => unreachable!(),
        };
        if field.is_zero(&cand) {
            continue;
        }
        if primes
            .iter()
            .all(|l| pow_big(field, &cand, &(&q1 / l)) != field.one())
        {
            return Ok(cand);
        }
    }
    Err(Error::ConstructionFailed(
        "no finite-field generator found".into(),
    ))
}

// --- polynomial helpers over a finite field ---------------------------------

mod fpoly {
    use super::*;

    pub type FPoly = Vec<RingElement>;

    pub fn trim(f: &Ring, mut v: FPoly) -> FPoly {
        while v.last().map(|c| f.is_zero(c)).unwrap_or(false) {
            v.pop();
        }
        v
    }

    pub fn add(f: &Ring, a: &[RingElement], b: &[RingElement]) -> FPoly {
        let n = a.len().max(b.len());
        let mut out = vec![f.zero(); n];
        for (i, c) in a.iter().enumerate() {
            out[i] = f.add(&out[i], c);
        }
        for (i, c) in b.iter().enumerate() {
            out[i] = f.add(&out[i], c);
        }
        trim(f, out)
    }

    pub fn mul(f: &Ring, a: &[RingElement], b: &[RingElement]) -> FPoly {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![f.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(x, y));
            }
        }
        trim(f, out)
    }

    pub fn rem(f: &Ring, a: &[RingElement], b: &[RingElement]) -> FPoly {
        let db = b.len() - 1;
        let lead_inv = f.invert(b.last().unwrap()).expect("nonzero leading");
        let mut r: FPoly = a.to_vec();
        while r.len() > db {
            let top = r.pop().unwrap();
            if f.is_zero(&top) {
                continue;
            }
            let c = f.mul(&top, &lead_inv);
            let shift = r.len() - db;
            for i in 0..db {
                let t = f.mul(&c, &b[i]);
                r[shift + i] = f.sub(&r[shift + i], &t);
            }
        }
        trim(f, r)
    }

    pub fn gcd(f: &Ring, a: &[RingElement], b: &[RingElement]) -> FPoly {
        let mut a = trim(f, a.to_vec());
        let mut b = trim(f, b.to_vec());
        while !b.is_empty() {
            let r = rem(f, &a, &b);
            a = b;
            b = r;
        }
        if let Some(l) = a.last().cloned() {
            let li = f.invert(&l).unwrap();
            a = a.iter().map(|c| f.mul(c, &li)).collect();
        }
        a
    }

    pub fn pow_big_mod(f: &Ring, a: &[RingElement], e: &BigInt, m: &[RingElement]) -> FPoly {
        let mut acc = vec![f.one()];
        let mut base = rem(f, a, m);
        let mut e = e.clone();
        while e.is_positive() {
            if e.is_odd() {
                acc = rem(f, &mul(f, &acc, &base), m);
            }
            e >>= 1;
            if e.is_positive() {
                base = rem(f, &mul(f, &base, &base), m);
            }
        }
        acc
    }
}

/// A root in `target` of a monic irreducible polynomial with prime-field
/// coefficients, found by Cantor-Zassenhaus degree-one splitting (the
/// polynomial splits completely since its degree divides the target degree).
fn find_root_cz(modulus: &[BigInt], target: &Ring, seed: u64) -> Result<RingElement> {
    let (p, kk) = field_params(target)?;
    let mut f: fpoly::FPoly = modulus.iter().map(|c| target.from_int(c)).collect();
    f = fpoly::trim(target, f);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q1 = BigInt::from(p).pow(kk as u32) - BigInt::one();
    let half = &q1 / BigInt::from(if p == 2 { 1 } else { 2 });
    let mut guard = 0;
    while f.len() > 2 {
        guard += 1;
        if guard > 400 {
            return Err(Error::ConstructionFailed(
                "root splitting did not converge".into(),
            ));
        }
        let deg = f.len() - 1;
        let r: fpoly::FPoly = fpoly::trim(
            target,
            (0..deg)
                .map(|_| match target.kind() {
                    RingKind::PrimeField { p } => target.from_int(&BigInt::from(rng.gen_range(0..*p))),
                    RingKind::FiniteField { p, k, .. } => {
                        let coeffs: Vec<BigInt> =
                            (0..*k).map(|_| BigInt::from(rng.gen_range(0..*p))).collect();
                        poly_quot_element(target, coeffs)
                    }
                    _ => unreachable!(),
                })
                .collect(),
        );
        if r.is_empty() {
            continue;
        }
        let s = if p == 2 {
            // additive trace to F_2: sum of r^(2^i) for i < K
            let mut acc = r.clone();
            let mut cur = r.clone();
            for _ in 1..kk {
                cur = fpoly::rem(target, &fpoly::mul(target, &cur, &cur), &f);
                acc = fpoly::add(target, &acc, &cur);
            }
            acc
        } else {
            // r^((q-1)/2) - 1
            let s = fpoly::pow_big_mod(target, &r, &half, &f);
            fpoly::add(target, &s, &[target.neg(&target.one())])
        };
        if s.is_empty() {
            continue;
        }
        let g = fpoly::gcd(target, &s, &f);
        if g.len() > 1 && g.len() < f.len() {
            let other = {
                // f / g via repeated remainder-free division: compute quotient
                let mut q: Vec<RingElement> = vec![target.zero(); f.len() - g.len() + 1];
                let mut r2 = f.clone();
                let lead_inv = target.invert(g.last().unwrap()).unwrap();
                while r2.len() >= g.len() {
                    let top = r2.pop().unwrap();
                    if target.is_zero(&top) {
                        continue;
                    }
                    let c = target.mul(&top, &lead_inv);
                    let shift = r2.len() + 1 - g.len();
                    q[shift] = c.clone();
                    for i in 0..g.len() - 1 {
                        let t = target.mul(&c, &g[i]);
                        r2[shift + i] = target.sub(&r2[shift + i], &t);
                    }
                }
                fpoly::trim(target, q)
            };
            f = if g.len() <= other.len() { g } else { other };
        }
    }
    if f.len() != 2 {
        return Err(Error::ConstructionFailed("no linear factor found".into()));
    }
    let li = target.invert(&f[1]).unwrap();
    Ok(target.neg(&target.mul(&f[0], &li)))
}

/// Embedding of a subfield F_{p^j} into F_{p^K} (j | K): finds the image of
/// the subfield generator, by scanning the size-p^j subfield of the target
/// when it is small and by Cantor-Zassenhaus splitting otherwise.
#[derive(Debug, Clone)]
pub struct FieldEmbedding {
    pub source: Ring,
    pub target: Ring,
    /// image of the source polynomial generator x
    gen_image: RingElement,
}

/// Memoized embedding lookup.
pub fn field_embedding(source: &Ring, target: &Ring) -> Result<std::sync::Arc<FieldEmbedding>> {
    static MEMO: OnceLock<Mutex<BTreeMap<(Ring, Ring), std::sync::Arc<FieldEmbedding>>>> =
        OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(e) = memo.lock().unwrap().get(&(source.clone(), target.clone())) {
        return Ok(e.clone());
    }
    let built = std::sync::Arc::new(FieldEmbedding::new(source, target)?);
    memo.lock()
        .unwrap()
        .entry((source.clone(), target.clone()))
        .or_insert_with(|| built.clone());
    Ok(built)
}

impl FieldEmbedding {
    pub fn new(source: &Ring, target: &Ring) -> Result<FieldEmbedding> {
        let (p, j) = field_params(source)?;
        let (p2, kk) = field_params(target)?;
        if p != p2 || kk % j != 0 {
            return Err(Error::Type(format!(
                "no embedding of F_{}^{} into F_{}^{}",
                p, j, p2, kk
            )));
        }
        if source == target {
            let gen_image = match source.kind() {
                RingKind::PrimeField { .. } => source.one(),
                _ => crate::rings::quot_generator(source),
            };
            return Ok(FieldEmbedding {
                source: source.clone(),
                target: target.clone(),
                gen_image,
            });
        }
        let modulus = match source.kind() {
            RingKind::PrimeField { .. } => {
                return Ok(FieldEmbedding {
                    source: source.clone(),
                    target: target.clone(),
                    gen_image: target.one(),
                })
            }
            RingKind::FiniteField { modulus, .. } => modulus.clone(),
            _ => unreachable!(),
        };
        let sub_order = BigInt::from(p).pow(j as u32) - BigInt::one();
        if sub_order <= BigInt::from(200_000u64) {
            // enumerate the subfield F_{p^j} = {0} u <delta> inside the target
            let g = finite_field_generator(target)?;
            let q1 = BigInt::from(p).pow(kk as u32) - BigInt::one();
            let delta = pow_big(target, &g, &(&q1 / &sub_order));
            let eval = |x: &RingElement| -> RingElement {
                let mut acc = target.zero();
                for c in modulus.iter().rev() {
                    acc = target.mul(&acc, x);
                    acc = target.add(&acc, &target.from_int(c));
                }
                acc
            };
            let mut x = target.one();
            let mut count = BigInt::zero();
            while &count < &sub_order {
                if target.is_zero(&eval(&x)) {
                    return Ok(FieldEmbedding {
                        source: source.clone(),
                        target: target.clone(),
                        gen_image: x,
                    });
                }
                x = target.mul(&x, &delta);
                count += 1;
            }
            return Err(Error::ConstructionFailed(
                "no root of the subfield modulus in the target field".into(),
            ));
        }
        let root = find_root_cz(&modulus, target, 0x726f6f74)?;
        Ok(FieldEmbedding {
            source: source.clone(),
            target: target.clone(),
            gen_image: root,
        })
    }

    pub fn apply(&self, a: &RingElement) -> RingElement {
        assert_eq!(a.ring, self.source);
        match &a.payload {
            Payload::Residue(v) => self.target.from_int(v),
            Payload::PolyQuot(coeffs) => {
                let mut acc = self.target.zero();
                for c in coeffs.iter().rev() {
                    acc = self.target.mul(&acc, &self.gen_image);
                    acc = self.target.add(&acc, &self.target.from_int(c));
                }
                acc
            }
            _ => unreachable!(),
        }
    }
}

/// Factor a leading-1 truncated series over a finite field into linear
/// factors mod t^(m+1), inside the extension F_{p^k*} given by the
/// linear-factor systems for the levels 2..m. Self-verifying.
pub fn factor_mod_tm(q: &TruncatedSeries, m: u64) -> Result<Factorization> {
    let (p, j) = field_params(&q.ring)?;
    if q.bound() < m as usize {
        return Err(Error::MismatchedShape(format!(
            "series bound {} below the factorization degree {}",
            q.bound(),
            m
        )));
    }
    // determine the composite field
    let mut k_star = j;
    let mut levels: BTreeMap<u64, LinearFactorSystem> = BTreeMap::new();
    for level in 2..=m {
        let l2 = factor_system_level(p, level)?;
        let (_, lk) = field_params(&l2.residue_ring)?;
        k_star = num::integer::lcm(k_star, lk);
        levels.insert(level, l2);
    }
    let field = composite_field(p, k_star)?;
    let embed_q = field_embedding(&q.ring, &field)?;
    let coeffs: Vec<RingElement> = (1..=m as usize)
        .map(|i| embed_q.apply(q.coeff(i)))
        .collect();
    let qq = TruncatedSeries::new(field.clone(), coeffs)?;
    let mut embeds: BTreeMap<u64, std::sync::Arc<FieldEmbedding>> = BTreeMap::new();
    for (level, l2) in &levels {
        embeds.insert(*level, field_embedding(&l2.residue_ring, &field)?);
    }
    let roots = factor_recursive(&qq, m, &levels, &embeds)?;
    // self-verification: the product of the factors reproduces q mod t^(m+1)
    let mut prod = TruncatedSeries::one(field.clone(), m as usize);
    for r in &roots {
        prod = prod.mul(&TruncatedSeries::one_minus(&field, r, 1, m as usize))?;
    }
    if prod != qq {
        return Err(Error::ConstructionFailed(
            "factorization failed self-verification".into(),
        ));
    }
    Ok(Factorization {
        field,
        k_star,
        roots,
    })
}

/// Memoized composite fields F_{p^k}.
fn composite_field(p: u64, k: u64) -> Result<Ring> {
    static MEMO: OnceLock<Mutex<HashMap<(u64, u64), Ring>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = memo.lock().unwrap().get(&(p, k)) {
        return Ok(f.clone());
    }
    let built = if k == 1 {
        Ring::prime_field(p)?
    } else {
        Ring::finite_field_default(p, k as u32)?
    };
    memo.lock().unwrap().entry((p, k)).or_insert_with(|| built.clone());
    Ok(built)
}

fn factor_recursive(
    q: &TruncatedSeries,
    m: u64,
    levels: &BTreeMap<u64, LinearFactorSystem>,
    embeds: &BTreeMap<u64, std::sync::Arc<FieldEmbedding>>,
) -> Result<Vec<RingElement>> {
    let field = &q.ring;
    if m == 1 {
        // 1 + c1 t = 1 - (-c1) t
        let rho = field.neg(q.coeff(1));
        if field.is_zero(&rho) {
            return Ok(vec![]);
        }
        return Ok(vec![rho]);
    }
    let mut roots = factor_recursive(&q.truncate(m as usize - 1), m - 1, levels, embeds)?;
    // q1 = prod(1 - rho t) mod t^(m+1); b = -[t^m](q * q1^{-1})
    let mut q1 = TruncatedSeries::one(field.clone(), m as usize);
    for r in &roots {
        q1 = q1.mul(&TruncatedSeries::one_minus(field, r, 1, m as usize))?;
    }
    let ratio = q.truncate(m as usize).mul(&q1.inverse())?;
    let b = field.neg(ratio.coeff(m as usize));
    if field.is_zero(&b) {
        return Ok(roots);
    }
    let l2 = &levels[&m];
    let emb = &embeds[&m];
    for (a, bb) in &l2.reduced {
        // sigma = f~(b) = a + bb * b
        let sigma = field.add(&emb.apply(a), &field.mul(&emb.apply(bb), &b));
        if !field.is_zero(&sigma) {
            roots.push(sigma);
        }
    }
    Ok(roots)
}

/// The counting bound: exhaustively enumerate the products
/// prod_{a in F_p^*} (1 - a t)^(b_a) with 0 <= b_a <= p^r - 1 (r minimal
/// with m < p^r) mod t^(m+1), count distinct classes, and return
/// (representable, p^m).
pub fn count_representable(p: u64, m: u64) -> Result<(u64, u64)> {
    let mut pm = 1u64;
    for _ in 0..m {
        pm = pm
            .checked_mul(p)
            .ok_or_else(|| Error::TooLarge("p^m overflows".into()))?;
        if pm > (1 << 16) {
            return Err(Error::TooLarge(format!("p^m = {} above desk scale", pm)));
        }
    }
    let mut pr = 1u64;
    while pr <= m {
        pr *= p;
    }
    let field = Ring::prime_field(p)?;
    let units: Vec<RingElement> = (1..p).map(|a| field.from_i64(a as i64)).collect();
    let mut seen: BTreeSet<Vec<RingElement>> = BTreeSet::new();
    let mut exps = vec![0u64; units.len()];
    loop {
        let mut prod = TruncatedSeries::one(field.clone(), m as usize);
        for (i, a) in units.iter().enumerate() {
            let base = TruncatedSeries::one_minus(&field, a, 1, m as usize);
            for _ in 0..exps[i] {
                prod = prod.mul(&base)?;
            }
        }
        seen.insert(prod.coeffs().to_vec());
        let mut i = 0;
        loop {
            if i == exps.len() {
                return Ok((seen.len() as u64, pm));
            }
            exps[i] += 1;
            if exps[i] < pr {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_sum_small_cases() {
        // (3, 4, 1): branch m = 1 mod 3
        let d = power_sum_system(3, 4, 1).unwrap();
        verify_power_sums(&d).unwrap();
        // (2, 3, 2): branch m = 1 mod 2, Gamma = mu_3 in GR(4, .)
        let d2 = power_sum_system(2, 3, 2).unwrap();
        verify_power_sums(&d2).unwrap();
        // l = 1 instance explicitly: both x-coefficients vanish
        let ps = power_sum(&d2.ring, &d2.pairs, 1);
        assert!(ps.iter().all(|c| d2.ring.is_zero(c)));
    }

    #[test]
    fn power_sum_m2_branches() {
        for (p, n) in [(2u64, 1u32), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)] {
            let d = power_sum_system(p, 2, n).unwrap();
            verify_power_sums(&d).unwrap();
        }
    }

    #[test]
    fn power_sum_roots_branch() {
        for (p, m, n) in [(2u64, 4u64, 2u32), (3, 2, 2), (3, 3, 2), (3, 5, 1), (2, 6, 2)] {
            let d = power_sum_system(p, m, n).unwrap();
            verify_power_sums(&d).unwrap();
        }
    }

    #[test]
    fn linear_factor_verification_cases() {
        // (2, 3, 1) and (3, 2, 1) verify the product identity
        let l = linear_factor_system(2, 3, 1).unwrap();
        assert_eq!(l.precision, 2);
        let l2 = linear_factor_system(3, 2, 1).unwrap();
        assert_eq!(l2.precision, 1);
        // reduced factors multiply to 1 - x t^m over the residue field:
        // specialize x at a few residue points and compare series
        let field = l.residue_ring.clone();
        for x0 in field.enumerate(64).unwrap() {
            let mut prod = TruncatedSeries::one(field.clone(), l.m as usize);
            for (a, b) in &l.reduced {
                let f = field.add(a, &field.mul(b, &x0));
                prod = prod
                    .mul(&TruncatedSeries::one_minus(&field, &f, 1, l.m as usize))
                    .unwrap();
            }
            let expected = TruncatedSeries::one_minus(&field, &x0, l.m as usize, l.m as usize);
            assert_eq!(prod, expected);
        }
    }

    #[test]
    fn factor_small_base_cases() {
        let f2 = Ring::prime_field(2).unwrap();
        // m = 1: q = 1 - t
        let q = TruncatedSeries::one_minus(&f2, &f2.one(), 1, 1);
        let f = factor_mod_tm(&q, 1).unwrap();
        assert_eq!(f.roots.len(), 1);
        // q = 1: empty product
        let one = TruncatedSeries::one(f2.clone(), 3);
        let f2r = factor_mod_tm(&one, 3).unwrap();
        assert!(f2r.roots.is_empty());
    }

    #[test]
    fn factor_self_verifies_over_f4() {
        let f4 = Ring::finite_field_default(2, 2).unwrap();
        let om = crate::rings::quot_generator(&f4);
        // q = 1 + w t + t^2 + w^2 t^3
        let q = TruncatedSeries::new(
            f4.clone(),
            vec![om.clone(), f4.one(), f4.mul(&om, &om)],
        )
        .unwrap();
        let f = factor_mod_tm(&q, 3).unwrap();
        // verification happened inside; double-check the root count is sane
        assert!(!f.roots.is_empty());
        assert_eq!(f.k_star % 2, 0);
    }

    #[test]
    fn counting_bound() {
        assert_eq!(count_representable(2, 3).unwrap(), (4, 8));
        assert_eq!(count_representable(2, 1).unwrap(), (2, 2));
        assert_eq!(count_representable(3, 2).unwrap(), (9, 9));
    }
}
