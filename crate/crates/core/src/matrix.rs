//! Dense matrices over a [`FieldTower`] with exact Gauss-Jordan elimination.

use std::collections::HashSet;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FElem, FieldTower};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FMatrix {
    rows: usize,
    cols: usize,
    tower: Arc<FieldTower>,
    data: Vec<FElem>,
}

impl FMatrix {
    /// Row-major constructor; every entry must belong to the top field of `tower`.
    pub fn new(tower: Arc<FieldTower>, rows: usize, cols: usize, data: Vec<FElem>) -> Result<FMatrix> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if data.iter().any(|x| !tower.contains(x)) {
            return Err(Error::ForeignElement);
        }
        Ok(FMatrix { rows, cols, tower, data })
    }

    pub fn from_rows(tower: Arc<FieldTower>, rows: &[Vec<FElem>]) -> Result<FMatrix> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        FMatrix::new(tower, rows.len(), cols, rows.concat())
    }

    pub fn zeros(tower: Arc<FieldTower>, rows: usize, cols: usize) -> FMatrix {
        FMatrix { rows, cols, tower, data: vec![FElem::ZERO; rows * cols] }
    }

    pub fn identity(tower: Arc<FieldTower>, n: usize) -> FMatrix {
        let mut m = FMatrix::zeros(tower, n, n);
        for i in 0..n {
            m.data[i * n + i] = FElem::ONE;
        }
        m
    }

    /// A single-row matrix holding `v`.
    pub fn row_vector(tower: Arc<FieldTower>, v: &[FElem]) -> Result<FMatrix> {
        FMatrix::new(tower, 1, v.len(), v.to_vec())
    }

    pub fn random<R: Rng + ?Sized>(tower: Arc<FieldTower>, rows: usize, cols: usize, rng: &mut R) -> FMatrix {
        let data = (0..rows * cols).map(|_| tower.random(rng)).collect();
        FMatrix { rows, cols, tower, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn get(&self, i: usize, j: usize) -> FElem {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FElem) {
        debug_assert!(self.tower.contains(&v));
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[FElem] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn same_field(&self, other: &FMatrix) -> Result<()> {
        if Arc::ptr_eq(&self.tower, &other.tower) || self.tower == other.tower {
            Ok(())
        } else {
            Err(Error::TowerMismatch)
        }
    }

    /// Reduces `self` to reduced row echelon form in place, replaying every row
    /// operation on `aug` when given. Pivots are the first nonzero entry found
    /// scanning each column top-down. Returns the pivot columns.
    fn gauss_jordan(&mut self, mut aug: Option<&mut FMatrix>) -> Vec<usize> {
        let t = Arc::clone(&self.tower);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                self.swap_rows(pr, r);
                if let Some(a) = aug.as_deref_mut() {
                    a.swap_rows(pr, r);
                }
            }
            let inv = t.inv(&self.get(r, c)).expect("pivot is nonzero");
            self.scale_row(r, &inv);
            if let Some(a) = aug.as_deref_mut() {
                a.scale_row(r, &inv);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c);
                if f.is_zero() {
                    continue;
                }
                self.sub_scaled_row(i, r, &f);
                if let Some(a) = aug.as_deref_mut() {
                    a.sub_scaled_row(i, r, &f);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, i: usize, s: &FElem) {
        for j in 0..self.cols {
            let k = i * self.cols + j;
            self.data[k] = self.tower.mul(&self.data[k], s);
        }
    }

    // row[i] -= f * row[src]
    fn sub_scaled_row(&mut self, i: usize, src: usize, f: &FElem) {
        for j in 0..self.cols {
            let s = self.data[src * self.cols + j];
            if s.is_zero() {
                continue;
            }
            let k = i * self.cols + j;
            self.data[k] = self.tower.sub(&self.data[k], &self.tower.mul(f, &s));
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().gauss_jordan(None).len()
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (FMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.gauss_jordan(None);
        (m, pivots)
    }

    pub fn invert(&self) -> Result<FMatrix> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("cannot invert a {}x{} matrix", self.rows, self.cols)));
        }
        let mut work = self.clone();
        let mut inv = FMatrix::identity(Arc::clone(&self.tower), self.rows);
        let rank = work.gauss_jordan(Some(&mut inv)).len();
        if rank < self.rows {
            return Err(Error::Singular { rank, size: self.rows });
        }
        Ok(inv)
    }

    /// One solution of `self * x = rhs`, with every free variable drawn
    /// uniformly from `rng`. This makes the result uniform over the solution set.
    pub fn solve_random<R: Rng + ?Sized>(&self, rhs: &[FElem], rng: &mut R) -> Result<Vec<FElem>> {
        if rhs.len() != self.rows {
            return Err(Error::Dimension(format!("rhs of length {} for {} rows", rhs.len(), self.rows)));
        }
        let t = &self.tower;
        let mut aug = FMatrix::zeros(Arc::clone(t), self.rows, self.cols + 1);
        for i in 0..self.rows {
            aug.data[i * (self.cols + 1)..i * (self.cols + 1) + self.cols].copy_from_slice(self.row(i));
            aug.data[i * (self.cols + 1) + self.cols] = rhs[i];
        }
        let pivots = aug.gauss_jordan(None);
        if pivots.last() == Some(&self.cols) {
            return Err(Error::Inconsistent);
        }
        let pivot_set: HashSet<usize> = pivots.iter().copied().collect();
        let mut x = vec![FElem::ZERO; self.cols];
        for (j, xj) in x.iter_mut().enumerate() {
            if !pivot_set.contains(&j) {
                *xj = t.random(rng);
            }
        }
        for (r, &c) in pivots.iter().enumerate() {
            let mut v = aug.get(r, self.cols);
            for j in (0..self.cols).filter(|j| !pivot_set.contains(j)) {
                v = t.sub(&v, &t.mul(&aug.get(r, j), &x[j]));
            }
            x[c] = v;
        }
        Ok(x)
    }

    pub fn transpose(&self) -> FMatrix {
        let mut out = FMatrix::zeros(Arc::clone(&self.tower), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j);
            }
        }
        out
    }

    pub fn mul(&self, other: &FMatrix) -> Result<FMatrix> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let t = &self.tower;
        let mut out = FMatrix::zeros(Arc::clone(t), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * other.cols + j;
                        out.data[idx] = t.add(&out.data[idx], &t.mul(&a, &b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[FElem]) -> Result<Vec<FElem>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        if v.iter().any(|x| !self.tower.contains(x)) {
            return Err(Error::ForeignElement);
        }
        let t = &self.tower;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(FElem::ZERO, |acc, (a, b)| t.add(&acc, &t.mul(a, b)))
            })
            .collect())
    }

    pub fn vstack(&self, other: &FMatrix) -> Result<FMatrix> {
        self.same_field(other)?;
        if self.cols != other.cols {
            return Err(Error::Dimension(format!("stacking {} over {} columns", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FMatrix { rows: self.rows + other.rows, cols: self.cols, tower: Arc::clone(&self.tower), data })
    }

    /// Stacks a nonempty list of matrices with equal column counts.
    pub fn vstack_all(parts: &[&FMatrix]) -> Result<FMatrix> {
        let (first, rest) = parts.split_first().ok_or_else(|| Error::Dimension("nothing to stack".into()))?;
        rest.iter().try_fold((*first).clone(), |acc, m| acc.vstack(m))
    }

    pub fn take_rows(&self, idx: &[usize]) -> Result<FMatrix> {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            if i >= self.rows {
                return Err(Error::IndexOutOfRange { index: i, limit: self.rows });
            }
            data.extend_from_slice(self.row(i));
        }
        Ok(FMatrix { rows: idx.len(), cols: self.cols, tower: Arc::clone(&self.tower), data })
    }

    pub fn take_cols(&self, idx: &[usize]) -> Result<FMatrix> {
        if let Some(&bad) = idx.iter().find(|&&j| j >= self.cols) {
            return Err(Error::IndexOutOfRange { index: bad, limit: self.cols });
        }
        let mut data = Vec::with_capacity(idx.len() * self.rows);
        for i in 0..self.rows {
            data.extend(idx.iter().map(|&j| self.get(i, j)));
        }
        Ok(FMatrix { rows: self.rows, cols: idx.len(), tower: Arc::clone(&self.tower), data })
    }

    /// Columns of the thick-columns `idx` (0-based, each `alpha` wide), in order.
    pub fn take_thick_cols(&self, idx: &[usize], alpha: usize) -> Result<FMatrix> {
        if alpha == 0 || self.cols % alpha != 0 {
            return Err(Error::Dimension(format!("{} columns do not split into width {alpha}", self.cols)));
        }
        let groups = self.cols / alpha;
        let mut cols = Vec::with_capacity(idx.len() * alpha);
        for &g in idx {
            if g >= groups {
                return Err(Error::IndexOutOfRange { index: g, limit: groups });
            }
            cols.extend(g * alpha..(g + 1) * alpha);
        }
        self.take_cols(&cols)
    }

    /// The same matrix over a larger tower containing this one as a subfield.
    pub fn embed_into(&self, tower: &Arc<FieldTower>) -> Result<FMatrix> {
        if self.tower.subfield_level_in(tower).is_none() {
            return Err(Error::TowerMismatch);
        }
        Ok(FMatrix { rows: self.rows, cols: self.cols, tower: Arc::clone(tower), data: self.data.clone() })
    }

    /// Whether every entry lies in subfield `level` of the tower.
    pub fn within_level(&self, level: usize) -> bool {
        self.data.iter().all(|x| self.tower.contains_at(level, x))
    }

    /// Vandermonde matrix with entry `(i, j) = betas[j]^i`, taking `0^0 = 1`.
    pub fn vandermonde(tower: Arc<FieldTower>, betas: &[FElem], nrows: usize) -> Result<FMatrix> {
        let distinct: HashSet<&FElem> = betas.iter().collect();
        if distinct.len() != betas.len() {
            return Err(Error::DuplicatePoints);
        }
        let mut m = FMatrix::zeros(Arc::clone(&tower), nrows, betas.len());
        for (j, b) in betas.iter().enumerate() {
            if !tower.contains(b) {
                return Err(Error::ForeignElement);
            }
            let mut power = FElem::ONE;
            for i in 0..nrows {
                m.data[i * betas.len() + j] = power;
                power = tower.mul(&power, b);
            }
        }
        Ok(m)
    }

    /// Cauchy matrix with entry `(i, j) = 1 / (xs[i] - ys[j])`.
    pub fn cauchy(tower: Arc<FieldTower>, xs: &[FElem], ys: &[FElem]) -> Result<FMatrix> {
        let all: HashSet<&FElem> = xs.iter().chain(ys).collect();
        if all.len() != xs.len() + ys.len() {
            return Err(Error::DuplicatePoints);
        }
        if xs.iter().chain(ys).any(|x| !tower.contains(x)) {
            return Err(Error::ForeignElement);
        }
        let mut data = Vec::with_capacity(xs.len() * ys.len());
        for x in xs {
            for y in ys {
                data.push(tower.inv(&tower.sub(x, y))?);
            }
        }
        FMatrix::new(tower, xs.len(), ys.len(), data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u64, degs: &[usize]) -> Arc<FieldTower> {
        Arc::new(FieldTower::new(p, degs).unwrap())
    }

    fn s(v: &[u16]) -> Vec<FElem> {
        v.iter().map(|&x| FElem::scalar(x)).collect()
    }

    fn mat(t: &Arc<FieldTower>, rows: &[&[u16]]) -> FMatrix {
        FMatrix::from_rows(Arc::clone(t), &rows.iter().map(|r| s(r)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn rank_examples() {
        let t = gf(5, &[]);
        assert_eq!(FMatrix::identity(Arc::clone(&t), 4).rank(), 4);
        assert_eq!(FMatrix::zeros(Arc::clone(&t), 3, 5).rank(), 0);
        let v = FMatrix::vandermonde(Arc::clone(&t), &s(&[1, 2, 3]), 3).unwrap();
        assert_eq!(v.rank(), 3);
        assert_eq!(mat(&t, &[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn invert_examples() {
        let t = gf(5, &[]);
        let i3 = FMatrix::identity(Arc::clone(&t), 3);
        assert_eq!(i3.invert().unwrap(), i3);
        let d = mat(&t, &[&[2, 0], &[0, 3]]);
        assert_eq!(d.invert().unwrap(), mat(&t, &[&[3, 0], &[0, 2]]));
        let sing = mat(&t, &[&[1, 2], &[2, 4]]);
        assert_eq!(sing.invert(), Err(Error::Singular { rank: 1, size: 2 }));
        assert!(matches!(mat(&t, &[&[1, 2]]).invert(), Err(Error::Dimension(_))));
    }

    #[test]
    fn vandermonde_examples() {
        let t = gf(5, &[]);
        assert_eq!(FMatrix::vandermonde(Arc::clone(&t), &s(&[1]), 1).unwrap(), mat(&t, &[&[1]]));
        let v = FMatrix::vandermonde(Arc::clone(&t), &s(&[1, 2]), 2).unwrap();
        assert_eq!(v, mat(&t, &[&[1, 1], &[1, 2]]));
        assert_eq!(v.rank(), 2);
        assert_eq!(FMatrix::vandermonde(Arc::clone(&t), &s(&[1, 1]), 2), Err(Error::DuplicatePoints));
        // 0^0 = 1
        let z = FMatrix::vandermonde(Arc::clone(&t), &s(&[0]), 3).unwrap();
        assert_eq!(z, mat(&t, &[&[1], &[0], &[0]]));
    }

    #[test]
    fn cauchy_examples() {
        let t = gf(5, &[]);
        assert_eq!(FMatrix::cauchy(Arc::clone(&t), &s(&[0]), &s(&[1])).unwrap(), mat(&t, &[&[4]]));
        let c = FMatrix::cauchy(Arc::clone(&t), &s(&[0, 1]), &s(&[2, 3])).unwrap();
        assert_eq!(c, mat(&t, &[&[2, 3], &[4, 2]]));
        assert_eq!(FMatrix::cauchy(Arc::clone(&t), &s(&[0, 1]), &s(&[1])), Err(Error::DuplicatePoints));
    }

    #[test]
    fn cauchy_every_square_submatrix_invertible() {
        let t = gf(13, &[]);
        let c = FMatrix::cauchy(Arc::clone(&t), &s(&[0, 1, 2, 3, 4, 5]), &s(&[6, 7, 8, 9, 10, 11])).unwrap();
        let mut checked = 0;
        for size in 1..=6 {
            for rows in (0..6).combinations(size) {
                for cols in (0..6).combinations(size) {
                    let sub = c.take_rows(&rows).unwrap().take_cols(&cols).unwrap();
                    assert_eq!(sub.rank(), size, "rows {rows:?} cols {cols:?}");
                    checked += 1;
                }
            }
        }
        assert_eq!(checked, 923);
    }

    #[test]
    fn block_ops() {
        let t = gf(5, &[]);
        let st = FMatrix::identity(Arc::clone(&t), 2).vstack(&FMatrix::zeros(Arc::clone(&t), 1, 2)).unwrap();
        assert_eq!((st.rows(), st.cols(), st.rank()), (3, 2, 2));
        let m = mat(&t, &[&[1, 2, 3, 4], &[0, 1, 0, 1]]);
        assert_eq!(m.mul(&FMatrix::identity(Arc::clone(&t), 4)).unwrap(), m);
        assert_eq!(m.take_thick_cols(&[1], 2).unwrap(), mat(&t, &[&[3, 4], &[0, 1]]));
        assert!(m.take_thick_cols(&[2], 2).is_err());
        assert!(m.take_thick_cols(&[0], 3).is_err());
        assert!(m.take_rows(&[2]).is_err());
        assert!(m.vstack(&FMatrix::identity(Arc::clone(&t), 2)).is_err());
        let other = FMatrix::identity(gf(7, &[]), 4);
        assert_eq!(m.mul(&other), Err(Error::TowerMismatch));
    }

    #[test]
    fn solve_random_hits_solution_line() {
        let t = gf(5, &[]);
        let h = mat(&t, &[&[1, 1]]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut seen = HashSet::new();
        for _ in 0..200 {
            let x = h.solve_random(&s(&[3]), &mut rng).unwrap();
            assert_eq!(h.mul_vec(&x).unwrap(), s(&[3]));
            seen.insert(x);
        }
        assert_eq!(seen.len(), 5);
        let bad = mat(&t, &[&[1, 1], &[2, 2]]);
        assert_eq!(bad.solve_random(&s(&[1, 1]), &mut rng), Err(Error::Inconsistent));
    }

    #[test]
    fn rank_survives_field_extension() {
        let small = gf(3, &[]);
        let big = gf(3, &[2, 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let r = rng.random_range(1..5);
            let c = rng.random_range(1..5);
            let m = FMatrix::random(Arc::clone(&small), r, c, &mut rng);
            assert_eq!(m.rank(), m.embed_into(&big).unwrap().rank());
        }
        assert!(FMatrix::identity(big, 2).embed_into(&small).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]

        #[test]
        fn rank_invariants(seed in any::<u64>(), r in 1usize..6, c in 1usize..6, r2 in 1usize..4) {
            let t = gf(7, &[2]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = FMatrix::random(Arc::clone(&t), r, c, &mut rng);
            let b = FMatrix::random(Arc::clone(&t), r2, c, &mut rng);
            prop_assert!(a.rank() <= r.min(c));
            prop_assert_eq!(a.rank(), a.transpose().rank());
            prop_assert!(a.vstack(&b).unwrap().rank() <= a.rank() + b.rank());
        }

        #[test]
        fn inverse_roundtrip(seed in any::<u64>(), n in 1usize..6) {
            let t = gf(5, &[3]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = FMatrix::random(Arc::clone(&t), n, n, &mut rng);
            match m.invert() {
                Ok(inv) => {
                    prop_assert_eq!(inv.mul(&m).unwrap(), FMatrix::identity(Arc::clone(&t), n));
                    prop_assert_eq!(inv.invert().unwrap(), m);
                }
                Err(Error::Singular { rank, .. }) => prop_assert_eq!(rank, m.rank()),
                Err(e) => prop_assert!(false, "unexpected {e}"),
            }
        }
    }
}
