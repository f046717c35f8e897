//! Ground-truth mutual information by exhaustive enumeration.
//!
//! Uniform files `S` plus a uniform choice of `X` in the coset `{X : HX = S}`
//! make `X` uniform over `F^B` whenever `H` has full row rank, so the oracle
//! enumerates every `X`, computes `S = HX` and the observation `E = G'X`, and
//! tabulates exact counts. Every distribution that arises is uniform on an
//! affine set, so all counts are powers of `|F|` and entropies measured in
//! field symbols are exact rationals.

use std::collections::HashMap;
use std::sync::Arc;

use itertools::Itertools;
use num_rational::Ratio;

use crate::coset::CosetCode;
use crate::error::{Error, Result};
use crate::field::{FElem, FieldTower};
use crate::matrix::FMatrix;
use crate::security::observed_generator;
use crate::storage::StorageCode;

/// Default enumeration budget (number of codewords).
pub const DEFAULT_ORACLE_CAP: u128 = 1 << 20;

/// Every codeword with its syndrome and observation, as canonical indices.
pub struct Enumeration {
    q: u64,
    bs: usize,
    total: u128,
    syndromes: Vec<Vec<u64>>,
    observations: Vec<u128>,
}

impl Enumeration {
    pub fn new(h: &FMatrix, gprime: &FMatrix, cap: u128) -> Result<Enumeration> {
        let tower: &Arc<FieldTower> = h.tower();
        if **gprime.tower() != **tower {
            return Err(Error::TowerMismatch);
        }
        if h.cols() != gprime.cols() {
            return Err(Error::Dimension(format!("{} vs {} columns", h.cols(), gprime.cols())));
        }
        let q = tower.size();
        let b = h.cols();
        let total = (q as u128).checked_pow(b as u32).filter(|&t| t <= cap).ok_or(Error::OverCap {
            needed: (q as u128).saturating_pow(b as u32),
            cap,
        })?;

        let dot = |row: &[FElem], x: &[FElem]| {
            row.iter().zip(x).fold(FElem::ZERO, |acc, (a, v)| tower.add(&acc, &tower.mul(a, v)))
        };
        let mut syndromes: Vec<Vec<u64>> = Vec::with_capacity(total as usize);
        let mut observations = Vec::with_capacity(total as usize);
        let mut digits = vec![0u64; b];
        for _ in 0..total {
            let x: Vec<FElem> = digits.iter().map(|&d| tower.elem(d)).collect();
            syndromes.push((0..h.rows()).map(|i| tower.index_of(&dot(h.row(i), &x))).collect());
            let e = (0..gprime.rows())
                .fold(0u128, |acc, i| acc * q as u128 + tower.index_of(&dot(gprime.row(i), &x)) as u128);
            observations.push(e);
            for d in digits.iter_mut() {
                *d += 1;
                if *d < q {
                    break;
                }
                *d = 0;
            }
        }

        // Uniform syndromes certify that H has full row rank.
        let mut counts: HashMap<&[u64], u128> = HashMap::new();
        for s in &syndromes {
            *counts.entry(s.as_slice()).or_default() += 1;
        }
        if counts.len() as u128 != (q as u128).pow(h.rows() as u32) {
            return Err(Error::InvalidParams("parity-check matrix lacks full row rank".into()));
        }
        Ok(Enumeration { q, bs: h.rows(), total, syndromes, observations })
    }

    fn group_key(&self, s: &[u64], group: &[usize]) -> u128 {
        group.iter().fold(0u128, |acc, &i| acc * self.q as u128 + s[i] as u128)
    }

    /// `log_q(c)` when `c` is a power of `q`.
    fn log_q(&self, mut c: u128) -> Result<i128> {
        let mut e = 0;
        while c > 1 {
            if c % self.q as u128 != 0 {
                return Err(Error::NonLattice);
            }
            c /= self.q as u128;
            e += 1;
        }
        Ok(e)
    }

    /// Entropy in field symbols of the empirical distribution with these counts.
    fn entropy<K>(&self, counts: &HashMap<K, u128>) -> Result<Ratio<i128>> {
        let n = self.total as i128;
        let log_n = self.log_q(self.total)?;
        let mut acc = Ratio::from_integer(0);
        for &c in counts.values() {
            acc += Ratio::new(c as i128, n) * Ratio::from_integer(log_n - self.log_q(c)?);
        }
        Ok(acc)
    }

    /// `I(S_group; E)` in field symbols.
    pub fn mutual_information(&self, group: &[usize]) -> Result<Ratio<i128>> {
        if let Some(&bad) = group.iter().find(|&&i| i >= self.bs) {
            return Err(Error::IndexOutOfRange { index: bad, limit: self.bs });
        }
        let mut sg: HashMap<u128, u128> = HashMap::new();
        let mut e: HashMap<u128, u128> = HashMap::new();
        let mut joint: HashMap<(u128, u128), u128> = HashMap::new();
        for (s, &obs) in self.syndromes.iter().zip(&self.observations) {
            let key = self.group_key(s, group);
            *sg.entry(key).or_default() += 1;
            *e.entry(obs).or_default() += 1;
            *joint.entry((key, obs)).or_default() += 1;
        }
        Ok(self.entropy(&sg)? + self.entropy(&e)? - self.entropy(&joint)?)
    }

    /// Whether the law of `E` given `(S_given, S_target)` ignores `S_target`
    /// for every value of `S_given`, i.e. `I(S_target; E | S_given) = 0`.
    pub fn conditionally_independent(&self, given: &[usize], target: usize) -> bool {
        // given value -> target value -> (count, observation -> count)
        type Cell = (u128, HashMap<u128, u128>);
        let mut table: HashMap<u128, HashMap<u64, Cell>> = HashMap::new();
        for (s, &obs) in self.syndromes.iter().zip(&self.observations) {
            let cell = table.entry(self.group_key(s, given)).or_default().entry(s[target]).or_default();
            cell.0 += 1;
            *cell.1.entry(obs).or_default() += 1;
        }
        table.values().all(|by_target| {
            let mut cells = by_target.values();
            let Some((n0, ref0)) = cells.next() else { return true };
            cells.all(|(n1, dist)| {
                dist.keys().chain(ref0.keys()).all(|o| {
                    let a = ref0.get(o).copied().unwrap_or(0);
                    let b = dist.get(o).copied().unwrap_or(0);
                    a * n1 == b * n0
                })
            })
        })
    }
}

/// Exact `I(S_group; G'X)` for uniform files, by enumerating `|F|^B` codewords.
pub fn mi_oracle(h: &FMatrix, gprime: &FMatrix, group: &[usize], cap: u128) -> Result<Ratio<i128>> {
    Enumeration::new(h, gprime, cap)?.mutual_information(group)
}

pub fn mi_oracle_codes(
    outer: &CosetCode,
    inner: &StorageCode,
    nodes: &[usize],
    group: &[usize],
    cap: u128,
) -> Result<Ratio<i128>> {
    mi_oracle(outer.h(), &observed_generator(outer, inner, nodes)?, group, cap)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    /// `I(S_T; E) = 0` for every `T ⊆ G`.
    pub unconditional: bool,
    /// `I(S_i; E | S_T) = 0` for every `T ⊊ G` and `i ∈ G \ T`.
    pub conditional: bool,
    /// First `(T, i)` breaking the conditional form.
    pub witness: Option<(Vec<usize>, usize)>,
}

impl EquivalenceReport {
    pub fn agree(&self) -> bool {
        self.unconditional == self.conditional
    }
}

/// Checks on one instance that the group-secrecy condition over all subsets
/// of `group` matches the side-information form: no file outside a known
/// subset leaks given that subset.
pub fn equivalence_check(h: &FMatrix, gprime: &FMatrix, group: &[usize], cap: u128) -> Result<EquivalenceReport> {
    if let Some(&bad) = group.iter().find(|&&i| i >= h.rows()) {
        return Err(Error::IndexOutOfRange { index: bad, limit: h.rows() });
    }
    let table = Enumeration::new(h, gprime, cap)?;
    let mut unconditional = true;
    for size in 1..=group.len() {
        for subset in group.iter().copied().combinations(size) {
            if table.mutual_information(&subset)? != Ratio::from_integer(0) {
                unconditional = false;
            }
        }
    }
    let mut witness = None;
    'outer: for size in 0..group.len() {
        for given in group.iter().copied().combinations(size) {
            for &target in group.iter().filter(|i| !given.contains(i)) {
                if !table.conditionally_independent(&given, target) {
                    witness = Some((given, target));
                    break 'outer;
                }
            }
        }
    }
    Ok(EquivalenceReport { unconditional, conditional: witness.is_none(), witness })
}

pub fn equivalence_check_codes(
    outer: &CosetCode,
    inner: &StorageCode,
    nodes: &[usize],
    group: &[usize],
    cap: u128,
) -> Result<EquivalenceReport> {
    equivalence_check(outer.h(), &observed_generator(outer, inner, nodes)?, group, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::security::leakage;

    fn gf(p: u64) -> Arc<FieldTower> {
        Arc::new(FieldTower::new(p, &[]).unwrap())
    }

    fn rows(t: &Arc<FieldTower>, r: &[&[u16]]) -> FMatrix {
        let v: Vec<Vec<FElem>> = r.iter().map(|row| row.iter().map(|&x| FElem::scalar(x)).collect()).collect();
        FMatrix::from_rows(Arc::clone(t), &v).unwrap()
    }

    #[test]
    fn intro_example() {
        let t = gf(5);
        let h = FMatrix::identity(Arc::clone(&t), 4);
        let gp = rows(&t, &[&[1, 1, 1, 1], &[1, 2, 3, 4]]);
        let table = Enumeration::new(&h, &gp, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(table.mutual_information(&[]).unwrap(), Ratio::from_integer(0));
        for pair in (0..4).combinations(2) {
            assert_eq!(table.mutual_information(&pair).unwrap(), Ratio::from_integer(0));
        }
        for triple in (0..4).combinations(3) {
            assert_eq!(table.mutual_information(&triple).unwrap(), Ratio::from_integer(1));
        }
        assert_eq!(table.mutual_information(&[0, 1, 2, 3]).unwrap(), Ratio::from_integer(2));
    }

    #[test]
    fn equivalence_on_intro_example() {
        let t = gf(5);
        let h = FMatrix::identity(Arc::clone(&t), 4);
        let gp = rows(&t, &[&[1, 1, 1, 1], &[1, 2, 3, 4]]);
        let ok = equivalence_check(&h, &gp, &[1, 3], DEFAULT_ORACLE_CAP).unwrap();
        assert!(ok.unconditional && ok.conditional);
        let bad = equivalence_check(&h, &gp, &[0, 1, 2], DEFAULT_ORACLE_CAP).unwrap();
        assert!(!bad.unconditional && !bad.conditional);
        assert_eq!(bad.witness, Some((vec![0, 1], 2)));
        let empty = equivalence_check(&h, &gp, &[], DEFAULT_ORACLE_CAP).unwrap();
        assert!(empty.unconditional && empty.conditional);
    }

    #[test]
    fn custom_wide_code_matches_leakage() {
        // Bs = 1 < B = 3: one file masked by two random keys.
        let t = gf(3);
        let h = rows(&t, &[&[1, 1, 2]]);
        for gp in [rows(&t, &[&[0, 1, 2]]), rows(&t, &[&[1, 1, 2]]), rows(&t, &[&[1, 0, 0], &[0, 1, 0]])] {
            let expected = leakage(&h, &gp).unwrap() as i128;
            assert_eq!(mi_oracle(&h, &gp, &[0], DEFAULT_ORACLE_CAP).unwrap(), Ratio::from_integer(expected));
        }
    }

    #[test]
    fn oracle_rejects_bad_instances() {
        let t = gf(7);
        let h = FMatrix::identity(Arc::clone(&t), 8);
        let gp = FMatrix::zeros(Arc::clone(&t), 1, 8);
        assert!(matches!(mi_oracle(&h, &gp, &[0], 1000), Err(Error::OverCap { .. })));
        let singular = rows(&t, &[&[1, 2], &[2, 4]]);
        let gp = FMatrix::zeros(Arc::clone(&t), 1, 2);
        assert!(mi_oracle(&singular, &gp, &[0], DEFAULT_ORACLE_CAP).is_err());
    }
}
