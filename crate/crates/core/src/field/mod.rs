//! Exact arithmetic in towers of finite fields `GF(p) ⊂ GF(p^e1) ⊂ GF(p^(e1 e2)) ⊂ ...`.
//!
//! Every element is stored as its coordinate vector over the prime field in
//! the canonical tower basis. Level `L` elements are polynomials of degree
//! below `d_L` whose coefficients are level `L-1` elements, laid out
//! little-endian: coefficient `j` occupies coordinates
//! `j * w_{L-1} .. (j + 1) * w_{L-1}`. A subfield element therefore has the
//! same coordinates as its image in any larger level, so the canonical
//! inclusion is zero padding.

mod poly;

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::numtheory::{is_prime, prime_factors};

/// Maximum total extension degree over the prime field.
pub const MAX_COORDS: usize = 32;

/// Default upper bound on the size of a constructed field.
pub const DEFAULT_FIELD_CAP: u64 = 1 << 40;

/// A field element: coordinates over the prime field, unused slots zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FElem {
    coords: [u16; MAX_COORDS],
}

impl FElem {
    pub const ZERO: FElem = FElem { coords: [0; MAX_COORDS] };
    pub const ONE: FElem = FElem::scalar(1);

    /// Prime-field element `v` (caller guarantees `v < p`).
    pub const fn scalar(v: u16) -> FElem {
        let mut coords = [0; MAX_COORDS];
        coords[0] = v;
        FElem { coords }
    }

    /// Builds an element from its leading coordinates; the rest are zero.
    pub fn from_coords(c: &[u16]) -> Result<FElem> {
        if c.len() > MAX_COORDS {
            return Err(Error::ForeignElement);
        }
        let mut coords = [0; MAX_COORDS];
        coords[..c.len()].copy_from_slice(c);
        Ok(FElem { coords })
    }

    pub fn coords(&self) -> &[u16; MAX_COORDS] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn chunk(&self, j: usize, w: usize) -> FElem {
        let mut out = FElem::ZERO;
        out.coords[..w].copy_from_slice(&self.coords[j * w..(j + 1) * w]);
        out
    }

    fn set_chunk(&mut self, j: usize, w: usize, v: &FElem) {
        self.coords[j * w..(j + 1) * w].copy_from_slice(&v.coords[..w]);
    }
}

impl fmt::Debug for FElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let used = self.coords.iter().rposition(|&c| c != 0).map_or(1, |i| i + 1);
        let parts: Vec<String> = self.coords[..used].iter().map(|c| c.to_string()).collect();
        write!(f, "F[{}]", parts.join(","))
    }
}

/// Binary field operation selector for [`FieldTower::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Level {
    /// Degree over the previous level.
    degree: usize,
    /// Coordinates over the prime field.
    width: usize,
    size: u64,
    /// Monic modulus, `degree + 1` coefficients from the previous level.
    modulus: Vec<FElem>,
}

/// A prime field extended through a sequence of polynomial extensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldTower {
    p: u16,
    levels: Vec<Level>,
}

impl FieldTower {
    /// Builds the tower over `GF(p)` with the given extension degrees, each
    /// modulus being the first monic irreducible in canonical order.
    pub fn new(p: u64, degrees: &[usize]) -> Result<FieldTower> {
        FieldTower::with_cap(p, degrees, DEFAULT_FIELD_CAP)
    }

    pub fn with_cap(p: u64, degrees: &[usize], cap: u64) -> Result<FieldTower> {
        if !is_prime(p) || p > u16::MAX as u64 {
            return Err(Error::NotPrime(p));
        }
        let mut size = p as u128;
        let mut width = 1usize;
        for &d in degrees {
            if d == 0 {
                return Err(Error::ZeroDegree);
            }
            width *= d;
            size = size.saturating_pow(d as u32);
        }
        if size > cap as u128 || width > MAX_COORDS {
            return Err(Error::FieldTooLarge { size, cap: cap as u128 });
        }

        let mut tower = FieldTower {
            p: p as u16,
            levels: vec![Level { degree: 1, width: 1, size: p, modulus: Vec::new() }],
        };
        for &d in degrees {
            let base = tower.top_level();
            let modulus = poly::first_irreducible(&tower, base, d).ok_or(Error::NoIrreducible(d))?;
            let prev = &tower.levels[base];
            let level = Level {
                degree: d,
                width: prev.width * d,
                size: prev.size.pow(d as u32),
                modulus,
            };
            tower.levels.push(level);
        }
        Ok(tower)
    }

    /// Rebuilds a tower from explicit moduli, checking each is monic and irreducible.
    pub fn from_moduli(p: u64, moduli: Vec<Vec<FElem>>) -> Result<FieldTower> {
        if !is_prime(p) || p > u16::MAX as u64 {
            return Err(Error::NotPrime(p));
        }
        let mut tower = FieldTower {
            p: p as u16,
            levels: vec![Level { degree: 1, width: 1, size: p, modulus: Vec::new() }],
        };
        for modulus in moduli {
            let base = tower.top_level();
            if modulus.len() < 2 {
                return Err(Error::ZeroDegree);
            }
            let d = modulus.len() - 1;
            let prev = tower.levels[base].clone();
            if prev.width * d > MAX_COORDS {
                return Err(Error::FieldTooLarge {
                    size: (prev.size as u128).saturating_pow(d as u32),
                    cap: DEFAULT_FIELD_CAP as u128,
                });
            }
            if modulus.iter().any(|c| !tower.contains_at(base, c)) || modulus[d] != FElem::ONE {
                return Err(Error::ForeignElement);
            }
            if !poly::is_irreducible(&tower, base, &modulus) {
                return Err(Error::NoIrreducible(d));
            }
            let size = (prev.size as u128).saturating_pow(d as u32);
            if size > DEFAULT_FIELD_CAP as u128 {
                return Err(Error::FieldTooLarge { size, cap: DEFAULT_FIELD_CAP as u128 });
            }
            tower.levels.push(Level { degree: d, width: prev.width * d, size: size as u64, modulus });
        }
        Ok(tower)
    }

    pub fn p(&self) -> u64 {
        self.p as u64
    }

    /// Index of the largest field; `0` for a bare prime field.
    pub fn top_level(&self) -> usize {
        self.levels.len() - 1
    }

    /// Extension degrees of each step over the previous level.
    pub fn degrees(&self) -> Vec<usize> {
        self.levels[1..].iter().map(|l| l.degree).collect()
    }

    /// Total degree `e` over the prime field.
    pub fn total_degree(&self) -> usize {
        self.width(self.top_level())
    }

    pub fn width(&self, level: usize) -> usize {
        self.levels[level].width
    }

    pub fn size(&self) -> u64 {
        self.level_size(self.top_level())
    }

    pub fn level_size(&self, level: usize) -> u64 {
        self.levels[level].size
    }

    /// Monic modulus defining `level` over `level - 1`.
    pub fn modulus(&self, level: usize) -> &[FElem] {
        &self.levels[level].modulus
    }

    /// Whether `self` is an initial segment of `other`, so its elements embed
    /// into `other` unchanged. Returns the matching level in `other`.
    pub fn subfield_level_in(&self, other: &FieldTower) -> Option<usize> {
        (self.p == other.p
            && self.levels.len() <= other.levels.len()
            && self.levels[..] == other.levels[..self.levels.len()])
            .then(|| self.top_level())
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level > self.top_level() {
            return Err(Error::LevelOutOfRange { level, top: self.top_level() });
        }
        Ok(())
    }

    /// Whether `x` is a valid element of the field at `level`.
    pub fn contains_at(&self, level: usize, x: &FElem) -> bool {
        if level > self.top_level() {
            return false;
        }
        let w = self.width(level);
        x.coords[..w].iter().all(|&c| c < self.p) && x.coords[w..].iter().all(|&c| c == 0)
    }

    pub fn contains(&self, x: &FElem) -> bool {
        self.contains_at(self.top_level(), x)
    }

    pub fn zero(&self) -> FElem {
        FElem::ZERO
    }

    pub fn one(&self) -> FElem {
        FElem::ONE
    }

    /// Element with canonical index `index` (little-endian base-p digits).
    pub fn elem(&self, index: u64) -> FElem {
        let p = self.p as u64;
        let mut rest = index;
        let mut out = FElem::ZERO;
        for c in out.coords.iter_mut().take(self.total_degree()) {
            *c = (rest % p) as u16;
            rest /= p;
        }
        debug_assert_eq!(rest, 0, "index out of range");
        out
    }

    /// Canonical index of `x`; inverse of [`FieldTower::elem`].
    pub fn index_of(&self, x: &FElem) -> u64 {
        let p = self.p as u64;
        x.coords[..self.total_degree()].iter().rev().fold(0u64, |acc, &c| acc * p + c as u64)
    }

    /// The first `count` elements of the field at `level` in canonical order.
    pub fn enumerate_at(&self, level: usize, count: u64) -> Result<Vec<FElem>> {
        self.check_level(level)?;
        let size = self.level_size(level);
        if count > size {
            return Err(Error::NotEnoughElements { requested: count, size });
        }
        Ok((0..count).map(|i| self.elem(i)).collect())
    }

    pub fn enumerate(&self, count: u64) -> Result<Vec<FElem>> {
        self.enumerate_at(self.top_level(), count)
    }

    /// Image of a level-`from_level` element in the top field.
    pub fn embed(&self, x: &FElem, from_level: usize) -> Result<FElem> {
        self.check_level(from_level)?;
        if !self.contains_at(from_level, x) {
            return Err(Error::ForeignElement);
        }
        Ok(*x)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FElem {
        self.elem(rng.random_range(0..self.size()))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FElem {
        self.elem(rng.random_range(1..self.size()))
    }

    // Arithmetic. The unchecked methods assume valid operands; `arith` checks.

    pub fn add(&self, a: &FElem, b: &FElem) -> FElem {
        let p = self.p;
        let mut out = FElem::ZERO;
        for i in 0..self.total_degree() {
            let s = a.coords[i] as u32 + b.coords[i] as u32;
            out.coords[i] = (s % p as u32) as u16;
        }
        out
    }

    pub fn neg(&self, a: &FElem) -> FElem {
        let p = self.p;
        let mut out = FElem::ZERO;
        for i in 0..self.total_degree() {
            out.coords[i] = if a.coords[i] == 0 { 0 } else { p - a.coords[i] };
        }
        out
    }

    pub fn sub(&self, a: &FElem, b: &FElem) -> FElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FElem, b: &FElem) -> FElem {
        self.mul_at(self.top_level(), a, b)
    }

    /// `a * b` computed at `level`. Both operands must lie in that level.
    pub fn mul_at(&self, level: usize, a: &FElem, b: &FElem) -> FElem {
        if level == 0 {
            let p = self.p as u32;
            return FElem::scalar(((a.coords[0] as u32 * b.coords[0] as u32) % p) as u16);
        }
        let lv = &self.levels[level];
        let d = lv.degree;
        let w = self.levels[level - 1].width;
        if level == 1 {
            return self.mul_prime_poly(a, b, d, &lv.modulus);
        }
        let sub = level - 1;
        let ac: Vec<FElem> = (0..d).map(|j| a.chunk(j, w)).collect();
        let bc: Vec<FElem> = (0..d).map(|j| b.chunk(j, w)).collect();
        let mut prod = vec![FElem::ZERO; 2 * d - 1];
        for (i, ai) in ac.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in bc.iter().enumerate() {
                if !bj.is_zero() {
                    prod[i + j] = self.add(&prod[i + j], &self.mul_at(sub, ai, bj));
                }
            }
        }
        for i in (d..2 * d - 1).rev() {
            let c = prod[i];
            if c.is_zero() {
                continue;
            }
            for j in 0..d {
                let t = self.mul_at(sub, &c, &lv.modulus[j]);
                prod[i - d + j] = self.sub(&prod[i - d + j], &t);
            }
        }
        let mut out = FElem::ZERO;
        for (j, c) in prod.iter().take(d).enumerate() {
            out.set_chunk(j, w, c);
        }
        out
    }

    // Level 1 over the prime field: plain integer polynomial arithmetic.
    fn mul_prime_poly(&self, a: &FElem, b: &FElem, d: usize, modulus: &[FElem]) -> FElem {
        let p = self.p as u64;
        let mut prod = [0u64; 2 * MAX_COORDS];
        for i in 0..d {
            let ai = a.coords[i] as u64;
            if ai == 0 {
                continue;
            }
            for j in 0..d {
                prod[i + j] = (prod[i + j] + ai * b.coords[j] as u64) % p;
            }
        }
        for i in (d..2 * d - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..d {
                let m = modulus[j].coords[0] as u64;
                prod[i - d + j] = (prod[i - d + j] + (p - c) * m) % p;
            }
        }
        let mut out = FElem::ZERO;
        for j in 0..d {
            out.coords[j] = prod[j] as u16;
        }
        out
    }

    pub fn pow(&self, a: &FElem, exp: u64) -> FElem {
        self.pow_at(self.top_level(), a, exp)
    }

    pub fn pow_at(&self, level: usize, a: &FElem, mut exp: u64) -> FElem {
        let mut base = *a;
        let mut acc = FElem::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_at(level, &acc, &base);
            }
            base = self.mul_at(level, &base, &base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FElem) -> Result<FElem> {
        self.inv_at(self.top_level(), a)
    }

    /// Inverse via `a^(Q-2)` in the level's field of size `Q`.
    pub fn inv_at(&self, level: usize, a: &FElem) -> Result<FElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow_at(level, a, self.level_size(level) - 2))
    }

    pub fn div(&self, a: &FElem, b: &FElem) -> Result<FElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Checked binary operation: both operands must belong to this field.
    pub fn arith(&self, x: &FElem, y: &FElem, op: Op) -> Result<FElem> {
        if !self.contains(x) || !self.contains(y) {
            return Err(Error::ForeignElement);
        }
        match op {
            Op::Add => Ok(self.add(x, y)),
            Op::Sub => Ok(self.sub(x, y)),
            Op::Mul => Ok(self.mul(x, y)),
            Op::Div => self.div(x, y),
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, x: &FElem) -> Result<u64> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.size() - 1;
        let mut ord = n;
        for r in prime_factors(n) {
            while ord % r == 0 && self.pow(x, ord / r) == FElem::ONE {
                ord /= r;
            }
        }
        Ok(ord)
    }

    /// First element in canonical order generating the multiplicative group.
    pub fn find_primitive(&self) -> FElem {
        let n = self.size() - 1;
        let primes = prime_factors(n);
        (1..self.size())
            .map(|i| self.elem(i))
            .find(|x| primes.iter().all(|&r| self.pow(x, n / r) != FElem::ONE))
            .expect("a finite field always has a primitive element")
    }
}
