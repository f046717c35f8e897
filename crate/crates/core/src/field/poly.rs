//! Univariate polynomials over one level of a tower, used to pick moduli.
//! Coefficients are little-endian; the zero polynomial is the empty vector.

use super::{FElem, FieldTower};

struct Ring<'a> {
    t: &'a FieldTower,
    level: usize,
}

impl Ring<'_> {
    fn trim(mut v: Vec<FElem>) -> Vec<FElem> {
        while v.last().is_some_and(FElem::is_zero) {
            v.pop();
        }
        v
    }

    fn mul(&self, a: &[FElem], b: &[FElem]) -> Vec<FElem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![FElem::ZERO; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.t.add(&out[i + j], &self.t.mul_at(self.level, x, y));
            }
        }
        Self::trim(out)
    }

    fn rem(&self, a: &[FElem], f: &[FElem]) -> Vec<FElem> {
        let df = f.len() - 1;
        let lead_inv = self.t.inv_at(self.level, &f[df]).expect("trimmed divisor");
        let mut r = a.to_vec();
        while r.len() > df {
            let top = r.len() - 1;
            let c = self.t.mul_at(self.level, &r[top], &lead_inv);
            if !c.is_zero() {
                for (j, fj) in f.iter().enumerate() {
                    let s = self.t.mul_at(self.level, &c, fj);
                    r[top - df + j] = self.t.sub(&r[top - df + j], &s);
                }
            }
            r.pop();
        }
        Self::trim(r)
    }

    fn powmod(&self, a: &[FElem], mut exp: u64, f: &[FElem]) -> Vec<FElem> {
        let mut base = self.rem(a, f);
        let mut acc = vec![FElem::ONE];
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.rem(&self.mul(&acc, &base), f);
            }
            base = self.rem(&self.mul(&base, &base), f);
            exp >>= 1;
        }
        acc
    }

    fn gcd(&self, a: &[FElem], b: &[FElem]) -> Vec<FElem> {
        let (mut a, mut b) = (Self::trim(a.to_vec()), Self::trim(b.to_vec()));
        while !b.is_empty() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        a
    }
}

/// Ben-Or test: a monic `f` of degree `d` is irreducible iff
/// `gcd(f, x^(Q^i) - x) = 1` for every `1 <= i <= d/2`.
pub(super) fn is_irreducible(t: &FieldTower, level: usize, f: &[FElem]) -> bool {
    let ring = Ring { t, level };
    let d = f.len() - 1;
    let q = t.level_size(level);
    let x = vec![FElem::ZERO, FElem::ONE];
    let mut h = x.clone();
    for _ in 1..=d / 2 {
        h = ring.powmod(&h, q, f);
        let mut diff = h.clone();
        diff.resize(diff.len().max(2), FElem::ZERO);
        diff[1] = t.sub(&diff[1], &FElem::ONE);
        let g = ring.gcd(f, &Ring::trim(diff));
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// First monic irreducible of degree `d` over `level`, scanning the lower
/// coefficients as a little-endian counter in the level's canonical order.
pub(super) fn first_irreducible(t: &FieldTower, level: usize, d: usize) -> Option<Vec<FElem>> {
    let q = t.level_size(level) as u128;
    let total = q.checked_pow(d as u32)?;
    (0..total).find_map(|idx| {
        let mut rest = idx;
        let mut f: Vec<FElem> = (0..d)
            .map(|_| {
                let digit = (rest % q) as u64;
                rest /= q;
                t.elem(digit)
            })
            .collect();
        f.push(FElem::ONE);
        is_irreducible(t, level, &f).then_some(f)
    })
}
