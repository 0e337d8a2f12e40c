//! Integer lattices in Hermite normal form, plus the Smith normal form and
//! kernel/preimage computations used to model ideals of the semigroup algebra.

use num::{BigInt, Integer, One, Signed, Zero};

use crate::error::{Error, Result};

/// A sublattice of Z^ambient_rank, stored as a row-style HNF basis:
/// rows sorted by pivot column, pivots positive, entries below a pivot zero
/// and entries above a pivot reduced into [0, pivot).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerLattice {
    ambient_rank: usize,
    basis: Vec<Vec<BigInt>>,
}

/// Row-style Hermite normal form of arbitrary integer rows.
/// Returns the reduced rows (rank many) with increasing pivot columns.
pub fn hnf(rows: &[Vec<BigInt>], width: usize) -> Vec<Vec<BigInt>> {
    let mut work: Vec<Vec<BigInt>> = rows
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    for r in &work {
        assert_eq!(r.len(), width);
    }
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    let mut col = 0;
    while col < width && !work.is_empty() {
        // gcd-eliminate column `col` across all work rows
        loop {
            let mut nonzero: Vec<usize> = (0..work.len())
                .filter(|&i| !work[i][col].is_zero())
                .collect();
            if nonzero.len() <= 1 {
                break;
            }
            // pick the row with the smallest |entry| as pivot
            nonzero.sort_by_key(|&i| work[i][col].abs());
            let piv = nonzero[0];
            for &i in &nonzero[1..] {
                let q = div_round(&work[i][col], &work[piv][col]);
                if !q.is_zero() {
                    for j in 0..width {
                        let t = &q * &work[piv][j];
                        work[i][j] -= t;
                    }
                }
            }
            work.retain(|r| r.iter().any(|x| !x.is_zero()));
            if work.is_empty() {
                break;
            }
        }
        if let Some(i) = (0..work.len()).find(|&i| !work[i][col].is_zero()) {
            let mut row = work.swap_remove(i);
            if row[col].is_negative() {
                for x in row.iter_mut() {
                    *x = -&*x;
                }
            }
            out.push(row);
        }
        work.retain(|r| r.iter().any(|x| !x.is_zero()));
        col += 1;
    }
    // reduce entries above each pivot, in ascending pivot order so that a
    // reduction never disturbs a column that was already normalized
    for i in 0..out.len() {
        let pcol = pivot_col(&out[i]);
        for j in 0..i {
            let q = out[j][pcol].div_floor(&out[i][pcol]);
            if !q.is_zero() {
                for c in 0..width {
                    let t = &q * &out[i][c];
                    out[j][c] -= t;
                }
            }
        }
    }
    out
}

fn pivot_col(row: &[BigInt]) -> usize {
    row.iter().position(|x| !x.is_zero()).expect("zero row in basis")
}

/// Rounded division used during gcd elimination.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    let two_r = r.abs() * BigInt::from(2);
    if two_r > b.abs() {
        if (a.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

impl IntegerLattice {
    /// HNF span of the given rows; the empty input yields the zero lattice.
    pub fn span(rows: &[Vec<BigInt>], ambient_rank: usize) -> IntegerLattice {
        IntegerLattice {
            ambient_rank,
            basis: hnf(rows, ambient_rank),
        }
    }

    pub fn zero(ambient_rank: usize) -> IntegerLattice {
        IntegerLattice {
            ambient_rank,
            basis: vec![],
        }
    }

    pub fn full(ambient_rank: usize) -> IntegerLattice {
        let mut rows = vec![];
        for i in 0..ambient_rank {
            let mut r = vec![BigInt::zero(); ambient_rank];
            r[i] = BigInt::one();
            rows.push(r);
        }
        IntegerLattice {
            ambient_rank,
            basis: rows,
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.ambient_rank
    }

    /// Reduce a vector to its canonical coset representative: the remainder
    /// of back-substitution against the HNF basis.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.ambient_rank);
        let mut r = v.to_vec();
        for row in &self.basis {
            let pc = pivot_col(row);
            if r[pc].is_zero() {
                continue;
            }
            let q = r[pc].div_floor(&row[pc]);
            if !q.is_zero() {
                for j in 0..self.ambient_rank {
                    let t = &q * &row[j];
                    r[j] -= t;
                }
            }
        }
        r
    }

    /// Lattice membership by back-substitution.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Coordinates of `v` in the HNF basis, when `v` is a member.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.ambient_rank);
        let mut r = v.to_vec();
        let mut coords = vec![BigInt::zero(); self.basis.len()];
        for (i, row) in self.basis.iter().enumerate() {
            let pc = pivot_col(row);
            if r[pc].is_zero() {
                continue;
            }
            let (q, rem) = r[pc].div_rem(&row[pc]);
            if !rem.is_zero() {
                return None;
            }
            coords[i] = q.clone();
            for j in 0..self.ambient_rank {
                let t = &q * &row[j];
                r[j] -= t;
            }
        }
        if r.iter().all(|x| x.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn is_sublattice_of(&self, ambient: &IntegerLattice) -> bool {
        self.ambient_rank == ambient.ambient_rank
            && self.basis.iter().all(|row| ambient.contains(row))
    }

    /// |ambient / self| as `Some(index)`, or `None` for infinite index.
    /// Errors when `self` is not contained in `ambient`.
    pub fn index_in(&self, ambient: &IntegerLattice) -> Result<Option<BigInt>> {
        if self.ambient_rank != ambient.ambient_rank {
            return Err(Error::NotASublattice("ambient ranks differ".into()));
        }
        let mut coord_rows = Vec::with_capacity(self.basis.len());
        for row in &self.basis {
            match ambient.coordinates(row) {
                Some(c) => coord_rows.push(c),
                None => {
                    return Err(Error::NotASublattice(
                        "basis vector outside the ambient lattice".into(),
                    ))
                }
            }
        }
        if self.rank() < ambient.rank() {
            return Ok(None);
        }
        let h = hnf(&coord_rows, ambient.rank());
        if h.len() < ambient.rank() {
            return Ok(None);
        }
        let mut idx = BigInt::one();
        for row in &h {
            idx *= &row[pivot_col(row)];
        }
        Ok(Some(idx))
    }

    /// Sum (join) of two lattices.
    pub fn join(&self, other: &IntegerLattice) -> IntegerLattice {
        assert_eq!(self.ambient_rank, other.ambient_rank);
        let rows: Vec<_> = self.basis.iter().chain(&other.basis).cloned().collect();
        IntegerLattice::span(&rows, self.ambient_rank)
    }

    /// For a full-rank lattice, enumerate canonical coset representatives of
    /// Z^q / L (the HNF pivot box). `None` if not full rank or above `cap`.
    pub fn coset_representatives(&self, cap: u64) -> Option<Vec<Vec<BigInt>>> {
        if !self.is_full_rank() {
            return None;
        }
        let pivots: Vec<BigInt> = self
            .basis
            .iter()
            .map(|row| row[pivot_col(row)].clone())
            .collect();
        let mut count = BigInt::one();
        for p in &pivots {
            count *= p;
        }
        if count > BigInt::from(cap) {
            return None;
        }
        let bounds: Vec<u64> = pivots
            .iter()
            .map(|p| p.to_u64_digits().1.first().copied().unwrap_or(1))
            .collect();
        let mut out = vec![];
        let mut digits = vec![0u64; self.ambient_rank];
        loop {
            out.push(digits.iter().map(|&d| BigInt::from(d)).collect());
            let mut i = 0;
            loop {
                if i == self.ambient_rank {
                    return Some(out);
                }
                digits[i] += 1;
                if digits[i] < bounds[i] {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }
}

/// Kernel of the map Z^q -> Z^k given by `v -> M v` (M is k x q):
/// computed from the unimodular row transform of the HNF of M^T.
pub fn integer_kernel(m: &[Vec<BigInt>], q: usize) -> Vec<Vec<BigInt>> {
    let k = m.len();
    // rows of the work matrix: [M^T | I_q]; row-reduce the left block.
    let mut work: Vec<Vec<BigInt>> = (0..q)
        .map(|i| {
            let mut row: Vec<BigInt> = (0..k).map(|j| m[j][i].clone()).collect();
            let mut id = vec![BigInt::zero(); q];
            id[i] = BigInt::one();
            row.extend(id);
            row
        })
        .collect();
    // HNF-style elimination on the first k columns only
    let mut fixed: Vec<Vec<BigInt>> = vec![];
    for col in 0..k {
        loop {
            let mut nonzero: Vec<usize> = (0..work.len())
                .filter(|&i| !work[i][col].is_zero())
                .collect();
            if nonzero.len() <= 1 {
                break;
            }
            nonzero.sort_by_key(|&i| work[i][col].abs());
            let piv = nonzero[0];
            for &i in &nonzero[1..] {
                let qd = div_round(&work[i][col], &work[piv][col]);
                if !qd.is_zero() {
                    for j in 0..k + q {
                        let t = &qd * &work[piv][j];
                        work[i][j] -= t;
                    }
                }
            }
        }
        if let Some(i) = (0..work.len()).find(|&i| !work[i][col].is_zero()) {
            fixed.push(work.swap_remove(i));
        }
    }
    // remaining rows have zero left block: their right blocks span the kernel
    work.into_iter()
        .map(|row| row[k..].to_vec())
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect()
}

/// Preimage lattice {v in Z^q : M v in L + diag(moduli)} for a map
/// `M : Z^q -> Z^k` and a target lattice spanned by `target_rows` (k wide).
pub fn preimage_lattice(
    m: &[Vec<BigInt>],
    q: usize,
    target_rows: &[Vec<BigInt>],
) -> IntegerLattice {
    let k = m.len();
    // kernel of (v, w) -> M v - T^T w in Z^k
    let t = target_rows.len();
    let big: Vec<Vec<BigInt>> = (0..k)
        .map(|row| {
            let mut r: Vec<BigInt> = (0..q).map(|col| m[row][col].clone()).collect();
            for tr in target_rows {
                r.push(-&tr[row]);
            }
            r
        })
        .collect();
    let ker = integer_kernel(&big, q + t);
    let proj: Vec<Vec<BigInt>> = ker.into_iter().map(|r| r[..q].to_vec()).collect();
    IntegerLattice::span(&proj, q)
}

/// Smith normal form invariant factors (d_1 | d_2 | ...), zeros excluded.
pub fn smith_invariants(rows: &[Vec<BigInt>], width: usize) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let height = a.len();
    if height == 0 || width == 0 {
        return vec![];
    }
    let mut invariants = vec![];
    let mut top = 0;
    let mut left = 0;
    while top < height && left < width {
        // find a nonzero entry with minimal absolute value
        let mut best: Option<(usize, usize)> = None;
        for i in top..height {
            for j in left..width {
                if !a[i][j].is_zero() {
                    if best
                        .map(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                        .unwrap_or(true)
                    {
                        best = Some((i, j));
                    }
                }
            }
        }
        let (bi, bj) = match best {
            Some(x) => x,
            None => break,
        };
        a.swap(top, bi);
        for row in a.iter_mut() {
            row.swap(left, bj);
        }
        // eliminate column and row
        let mut clean = true;
        for i in (top + 1)..height {
            if !a[i][left].is_zero() {
                let qd = div_round(&a[i][left], &a[top][left]);
                for j in left..width {
                    let t = &qd * &a[top][j];
                    a[i][j] -= t;
                }
                if !a[i][left].is_zero() {
                    clean = false;
                }
            }
        }
        for j in (left + 1)..width {
            if !a[top][j].is_zero() {
                let qd = div_round(&a[top][j], &a[top][left]);
                for i in top..height {
                    let t = &qd * &a[i][left];
                    a[i][j] -= t;
                }
                if !a[top][j].is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue;
        }
        // ensure divisibility of the remaining block by the pivot
        let piv = a[top][left].clone();
        let mut disturbed = false;
        'outer: for i in (top + 1)..height {
            for j in (left + 1)..width {
                if !(&a[i][j] % &piv).is_zero() {
                    // add row i to row top and restart this pivot
                    for jj in left..width {
                        let t = a[i][jj].clone();
                        a[top][jj] += t;
                    }
                    disturbed = true;
                    break 'outer;
                }
            }
        }
        if disturbed {
            continue;
        }
        invariants.push(piv.abs());
        top += 1;
        left += 1;
    }
    invariants
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(v: &[&[i64]]) -> Vec<Vec<BigInt>> {
        v.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn hnf_by_hand() {
        // {(2,0),(0,2),(1,1)} -> {(1,1),(0,2)}
        let l = IntegerLattice::span(&rows(&[&[2, 0], &[0, 2], &[1, 1]]), 2);
        assert_eq!(l.basis(), rows(&[&[1, 1], &[0, 2]]).as_slice());
        // idempotent
        let l2 = IntegerLattice::span(l.basis(), 2);
        assert_eq!(l, l2);
        // membership of generators
        assert!(l.contains(&rows(&[&[2, 0]])[0]));
        assert!(l.contains(&rows(&[&[0, 2]])[0]));
        assert!(!l.contains(&rows(&[&[1, 0]])[0]));
    }

    #[test]
    fn zero_and_full() {
        let z = IntegerLattice::span(&rows(&[&[0, 0, 0]]), 3);
        assert_eq!(z.rank(), 0);
        let f = IntegerLattice::span(&rows(&[&[1, 0], &[0, 1]]), 2);
        assert_eq!(
            f.index_in(&IntegerLattice::full(2)).unwrap(),
            Some(BigInt::one())
        );
    }

    #[test]
    fn index_computation() {
        let amb = IntegerLattice::full(2);
        let sub = IntegerLattice::span(&rows(&[&[2, 0], &[0, 2]]), 2);
        assert_eq!(sub.index_in(&amb).unwrap(), Some(BigInt::from(4)));
        assert_eq!(amb.index_in(&amb).unwrap(), Some(BigInt::one()));
        let line = IntegerLattice::span(&rows(&[&[1, 0]]), 2);
        assert_eq!(line.index_in(&amb).unwrap(), None);
        assert!(matches!(
            IntegerLattice::span(&rows(&[&[1, 1]]), 2).index_in(&sub),
            Err(Error::NotASublattice(_))
        ));
    }

    #[test]
    fn kernel_and_preimage() {
        // kernel of (x,y,z) -> x + 2y + 3z
        let m = rows(&[&[1, 2, 3]]);
        let ker = integer_kernel(&m, 3);
        let l = IntegerLattice::span(&ker, 3);
        assert_eq!(l.rank(), 2);
        for b in l.basis() {
            let s = &b[0] + BigInt::from(2) * &b[1] + BigInt::from(3) * &b[2];
            assert!(s.is_zero());
        }
        // preimage of 5Z under x -> 3x is 5Z (gcd(3,5)=1)
        let m2 = rows(&[&[3]]);
        let pre = preimage_lattice(&m2, 1, &rows(&[&[5]]));
        assert_eq!(pre.basis(), rows(&[&[5]]).as_slice());
    }

    #[test]
    fn smith_invariant_factors() {
        let inv = smith_invariants(&rows(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]), 3);
        assert_eq!(
            inv,
            vec![BigInt::from(2), BigInt::from(2), BigInt::from(156)]
        );
    }

    #[test]
    fn coset_enumeration() {
        let sub = IntegerLattice::span(&rows(&[&[1, 1], &[0, 2]]), 2);
        let reps = sub.coset_representatives(100).unwrap();
        assert_eq!(reps.len(), 2);
        // representatives are distinct mod the lattice
        let r0 = sub.reduce(&reps[0]);
        let r1 = sub.reduce(&reps[1]);
        assert_ne!(r0, r1);
    }
}
