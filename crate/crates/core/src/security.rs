//! Weak-security certification via rank computations.
//!
//! For a coset code `H` over a storage code `G`, an eavesdropper holding nodes
//! `L` learns `rank H_G + rank G' - rank [H_G; G']` symbols about the files
//! `S_G`, where `H_G` keeps the rows of `H` in `G` and `G'` stacks the
//! generators of `L`. The pair is `g`-weakly secure against `l` nodes when
//! that quantity vanishes for every `|L| <= l` and `|G| <= g`.

use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::combin::{binomial, unrank};
use crate::coset::CosetCode;
use crate::error::{Error, Result};
use crate::matrix::FMatrix;
use crate::storage::StorageCode;

/// Symbols of `S_G` revealed by observing `G' X`.
pub fn leakage(h_g: &FMatrix, gprime: &FMatrix) -> Result<usize> {
    if h_g.cols() != gprime.cols() {
        return Err(Error::Dimension(format!("{} vs {} columns", h_g.cols(), gprime.cols())));
    }
    let stacked = h_g.vstack(gprime)?;
    Ok(h_g.rank() + gprime.rank() - stacked.rank())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Every `(L, G)` pair; a secure verdict is a proof.
    Exhaustive,
    /// `budget` pairs drawn uniformly without replacement. Not a proof.
    Sampled { seed: u64, budget: usize },
}

/// Which set sizes are enumerated. Leakage can only grow with `L` and `G`,
/// so the maximal sizes decide the verdict; `AllSizes` re-checks that claim.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantifier {
    Maximal,
    AllSizes,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecurityReport {
    pub l: usize,
    pub g_tested: usize,
    pub secure: bool,
    /// First failing `(L, G)` in enumeration order, 0-based.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
    /// Largest `g' <= g_tested` that passed under the same mode.
    pub max_g: usize,
    pub checked: u128,
    pub mode: Mode,
}

fn one_based(v: &[usize]) -> String {
    v.iter().map(|i| (i + 1).to_string()).join(",")
}

impl fmt::Display for SecurityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "VERDICT {}", if self.secure { "secure" } else { "insecure" })?;
        writeln!(f, "MAXG {}", self.max_g)?;
        if let Some((l, g)) = &self.witness {
            writeln!(f, "WITNESS L={} G={}", one_based(l), one_based(g))?;
        }
        match self.mode {
            Mode::Exhaustive => writeln!(f, "CHECKED {} MODE exhaustive seed=0", self.checked),
            Mode::Sampled { seed, .. } => writeln!(f, "CHECKED {} MODE sampled seed={seed}", self.checked),
        }
    }
}

/// Outcome of checking one batch of pairs.
struct Sweep {
    checked: u128,
    witness: Option<(Vec<usize>, Vec<usize>)>,
}

/// An outer/inner pair prepared for repeated security queries: the inner
/// generators are lifted into the outer code's field and structurally checked.
pub struct Verifier<'a> {
    outer: &'a CosetCode,
    inner: StorageCode,
}

impl<'a> Verifier<'a> {
    pub fn new(outer: &'a CosetCode, inner: &StorageCode) -> Result<Verifier<'a>> {
        let report = inner.verify_structure();
        if !report.passed() {
            return Err(Error::Structure(format!("{report:?}")));
        }
        if inner.spec().b() != outer.b() {
            return Err(Error::Dimension(format!(
                "inner code stores B = {} symbols but the outer code has B = {}",
                inner.spec().b(),
                outer.b()
            )));
        }
        let inner = inner.embed_into(outer.tower())?;
        Ok(Verifier { outer, inner })
    }

    pub fn inner(&self) -> &StorageCode {
        &self.inner
    }

    /// Largest meaningful `g` against `l` nodes: `B - lα`, capped at `Bs`.
    pub fn ceiling(&self, l: usize) -> Result<usize> {
        let spec = self.inner.spec();
        if l >= spec.k {
            return Err(Error::InvalidParams(format!("l = {l} must be below k = {}", spec.k)));
        }
        Ok((self.outer.b() - l * spec.alpha).min(self.outer.bs()))
    }

    pub fn check(&self, l: usize, g: usize, mode: Mode, quantifier: Quantifier) -> Result<SecurityReport> {
        let ceiling = self.ceiling(l)?;
        if g > ceiling {
            return Err(Error::InvalidParams(format!(
                "g = {g} exceeds B - l*alpha = {ceiling}; no code can protect that many symbols"
            )));
        }
        let sweep = self.sweep(l, g, mode, quantifier)?;
        let secure = sweep.witness.is_none();
        let mut max_g = g;
        if !secure {
            max_g = (0..g)
                .rev()
                .find(|&smaller| {
                    self.sweep(l, smaller, mode, Quantifier::Maximal)
                        .map(|s| s.witness.is_none())
                        .unwrap_or(false)
                })
                .unwrap_or(0);
        }
        Ok(SecurityReport { l, g_tested: g, secure, witness: sweep.witness, max_g, checked: sweep.checked, mode })
    }

    /// Verdicts for `g = 1 ..= ceiling(l)`, exhaustive and maximal-size.
    pub fn g_sweep(&self, l: usize) -> Result<Vec<SecurityReport>> {
        (1..=self.ceiling(l)?).map(|g| self.check(l, g, Mode::Exhaustive, Quantifier::Maximal)).collect()
    }

    /// Largest `g` up to the ceiling for which the pair is exhaustively secure.
    pub fn max_g(&self, l: usize) -> Result<usize> {
        let ceiling = self.ceiling(l)?;
        for g in 1..=ceiling {
            if self.sweep(l, g, Mode::Exhaustive, Quantifier::Maximal)?.witness.is_some() {
                return Ok(g - 1);
            }
        }
        Ok(ceiling)
    }

    fn sweep(&self, l: usize, g: usize, mode: Mode, quantifier: Quantifier) -> Result<Sweep> {
        let n = self.inner.spec().n;
        let bs = self.outer.bs();
        let (l_sizes, g_sizes) = match quantifier {
            Quantifier::Maximal => (l..=l, g..=g),
            Quantifier::AllSizes => (0..=l, 0..=g),
        };
        match mode {
            Mode::Exhaustive => {
                let node_sets: Vec<Vec<usize>> = l_sizes.flat_map(|s| (0..n).combinations(s)).collect();
                let groups: Vec<Vec<usize>> = g_sizes.flat_map(|s| (0..bs).combinations(s)).collect();
                let jobs: Vec<(Vec<usize>, Vec<Vec<usize>>)> =
                    node_sets.into_iter().map(|nodes| (nodes, groups.clone())).collect();
                self.run(jobs)
            }
            Mode::Sampled { seed, budget } => {
                if quantifier == Quantifier::AllSizes {
                    return Err(Error::InvalidParams("sampled mode checks maximal sizes only".into()));
                }
                let per_l = binomial(bs, g);
                let total = binomial(n, l) * per_l;
                let population = usize::try_from(total).map_err(|_| Error::PopulationTooLarge(total))?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut picks = rand::seq::index::sample(&mut rng, population, budget.min(population)).into_vec();
                picks.sort_unstable();
                let mut jobs: Vec<(Vec<usize>, Vec<Vec<usize>>)> = Vec::new();
                for (li, chunk) in &picks.iter().chunk_by(|&&idx| idx as u128 / per_l) {
                    let nodes = unrank(n, l, li);
                    let groups = chunk.map(|&idx| unrank(bs, g, idx as u128 % per_l)).collect();
                    jobs.push((nodes, groups));
                }
                self.run(jobs)
            }
        }
    }

    fn run(&self, jobs: Vec<(Vec<usize>, Vec<Vec<usize>>)>) -> Result<Sweep> {
        let h = self.outer.h();
        let results: Vec<Result<(u128, Option<Vec<usize>>)>> = jobs
            .par_iter()
            .map(|(nodes, groups)| {
                let gprime = self.inner.stack(nodes)?;
                let gprime_rank = gprime.rank();
                let mut first = None;
                for group in groups {
                    let h_g = h.take_rows(group)?;
                    let leak = h_g.rank() + gprime_rank - h_g.vstack(&gprime)?.rank();
                    if leak > 0 && first.is_none() {
                        first = Some(group.clone());
                    }
                }
                Ok((groups.len() as u128, first))
            })
            .collect();
        let mut sweep = Sweep { checked: 0, witness: None };
        for ((nodes, _), res) in jobs.iter().zip(results) {
            let (count, first) = res?;
            sweep.checked += count;
            if sweep.witness.is_none() {
                sweep.witness = first.map(|group| (nodes.clone(), group));
            }
        }
        Ok(sweep)
    }
}

pub fn is_weakly_secure(
    outer: &CosetCode,
    inner: &StorageCode,
    l: usize,
    g: usize,
    mode: Mode,
) -> Result<SecurityReport> {
    Verifier::new(outer, inner)?.check(l, g, mode, Quantifier::Maximal)
}

pub fn max_g(outer: &CosetCode, inner: &StorageCode, l: usize) -> Result<usize> {
    Verifier::new(outer, inner)?.max_g(l)
}

/// `G'` for the nodes `nodes` of `inner`, lifted into the outer code's field.
pub fn observed_generator(outer: &CosetCode, inner: &StorageCode, nodes: &[usize]) -> Result<FMatrix> {
    let lifted = inner.embed_into(outer.tower())?;
    let view = lifted.eavesdrop(nodes)?;
    debug_assert!(Arc::ptr_eq(view.gprime.tower(), outer.tower()));
    Ok(view.gprime)
}
