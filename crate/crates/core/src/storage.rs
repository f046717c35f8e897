//! Inner storage codes: `n` nodes, each storing `α` linear combinations of
//! the `B = kα` codeword symbols, described by per-node `α × B` generators.

use std::sync::Arc;

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{FElem, FieldTower};
use crate::matrix::FMatrix;
use crate::numtheory::prime_power;

/// `(n, k, d, α, β)` regenerating-code parameters over `GF(q)`.
/// `d` and `β` only feed the capacity bounds; repair is not modelled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StorageCodeSpec {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub alpha: usize,
    pub beta: usize,
    pub q: u64,
}

impl StorageCodeSpec {
    pub fn new(n: usize, k: usize, d: usize, alpha: usize, beta: usize, q: u64) -> Result<StorageCodeSpec> {
        if k == 0 || n < k {
            return Err(Error::InvalidParams(format!("need 1 <= k <= n, got n = {n}, k = {k}")));
        }
        if alpha == 0 {
            return Err(Error::InvalidParams("alpha must be positive".into()));
        }
        prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Ok(StorageCodeSpec { n, k, d, alpha, beta, q })
    }

    /// Number of stored information symbols, `B = kα`.
    pub fn b(&self) -> usize {
        self.k * self.alpha
    }

    /// Cut-set bound on `B` and the perfect-secrecy bound on `Bs` against
    /// `l` observed nodes: sums of `min(α, (d - i)β)` over `i in [0, k)` and
    /// `i in [l, k)` respectively. Negative repair terms count as zero.
    pub fn capacity_bounds(&self, l: usize) -> Result<(usize, usize)> {
        if l >= self.k {
            return Err(Error::InvalidParams(format!("l = {l} must be below k = {}", self.k)));
        }
        let term = |i: usize| {
            let repair = (self.d as i64 - i as i64) * self.beta as i64;
            repair.clamp(0, self.alpha as i64) as usize
        };
        let total = (0..self.k).map(term).sum();
        let secure = (l..self.k).map(term).sum();
        Ok((total, secure))
    }

    /// The base field `GF(q)` as a tower over its prime field.
    pub fn base_tower(&self) -> Result<FieldTower> {
        let (p, t) = prime_power(self.q).ok_or(Error::NotPrimePower(self.q))?;
        let degrees: Vec<usize> = if t > 1 { vec![t as usize] } else { vec![] };
        FieldTower::new(p, &degrees)
    }
}

/// What an eavesdropper holding the nodes `nodes` sees: `G' X` with `G'` the
/// stacked generators, `μ = |nodes| α` symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EavesdropView {
    pub nodes: Vec<usize>,
    pub gprime: FMatrix,
    pub mu: usize,
}

/// Outcome of one structural check, with the first failing index set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub passed: bool,
    pub checked: usize,
    pub witness: Option<Vec<usize>>,
}

impl Check {
    fn from_failures(checked: usize, first_failure: Option<Vec<usize>>) -> Check {
        Check { passed: first_failure.is_none(), checked, witness: first_failure }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    /// Nodes `0..k` hold `I_α` in their own thick-column and zeros elsewhere.
    pub systematic: Check,
    /// Every `k`-subset of nodes stacks to an invertible `B × B` matrix.
    pub reconstruction: Check,
    /// Every parity node has an invertible first thick-column block.
    pub parity_first_block: Check,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.systematic.passed && self.reconstruction.passed && self.parity_first_block.passed
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StorageCode {
    spec: StorageCodeSpec,
    nodes: Vec<FMatrix>,
}

impl StorageCode {
    /// Systematic MDS array code applying one scalar `[n, k]` code to each of
    /// the `α` stripes. Parity node `j` stores `Σ_t c[j][t] X_t` where `X_t` is
    /// the `t`-th thick block of `X` and `c` is an `(n-k) × k` Cauchy matrix,
    /// so every `k`-node stack is a Cauchy-or-identity minor expanded by `I_α`.
    pub fn make_striped_mds(spec: StorageCodeSpec) -> Result<StorageCode> {
        let tower = Arc::new(spec.base_tower()?);
        let (n, k, alpha) = (spec.n, spec.k, spec.alpha);
        let b = spec.b();
        if n > k && spec.q <= n as u64 {
            return Err(Error::InvalidParams(format!("q = {} must exceed n = {n}", spec.q)));
        }
        let mut nodes = Vec::with_capacity(n);
        for i in 0..k {
            let mut g = FMatrix::zeros(Arc::clone(&tower), alpha, b);
            for r in 0..alpha {
                g.set(r, i * alpha + r, FElem::ONE);
            }
            nodes.push(g);
        }
        if n > k {
            let points = tower.enumerate(n as u64 + 1)?;
            let coeffs = FMatrix::cauchy(Arc::clone(&tower), &points[1..=n - k], &points[n - k + 1..])?;
            for j in 0..n - k {
                let mut g = FMatrix::zeros(Arc::clone(&tower), alpha, b);
                for t in 0..k {
                    for r in 0..alpha {
                        g.set(r, t * alpha + r, coeffs.get(j, t));
                    }
                }
                nodes.push(g);
            }
        }
        Ok(StorageCode { spec, nodes })
    }

    /// Wraps user-supplied node generators; they must be `α × B` over one field.
    pub fn from_generators(spec: StorageCodeSpec, nodes: Vec<FMatrix>) -> Result<StorageCode> {
        if nodes.len() != spec.n {
            return Err(Error::Dimension(format!("{} generators for n = {}", nodes.len(), spec.n)));
        }
        let tower = Arc::clone(nodes[0].tower());
        for g in &nodes {
            if g.rows() != spec.alpha || g.cols() != spec.b() {
                return Err(Error::Dimension(format!(
                    "node generator is {}x{}, expected {}x{}",
                    g.rows(),
                    g.cols(),
                    spec.alpha,
                    spec.b()
                )));
            }
            if **g.tower() != *tower {
                return Err(Error::TowerMismatch);
            }
        }
        Ok(StorageCode { spec, nodes })
    }

    pub fn spec(&self) -> &StorageCodeSpec {
        &self.spec
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        self.nodes[0].tower()
    }

    pub fn generators(&self) -> &[FMatrix] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> Result<&FMatrix> {
        self.nodes.get(i).ok_or(Error::IndexOutOfRange { index: i, limit: self.spec.n })
    }

    /// The same code with generators lifted into a larger tower.
    pub fn embed_into(&self, tower: &Arc<FieldTower>) -> Result<StorageCode> {
        let nodes = self.nodes.iter().map(|g| g.embed_into(tower)).collect::<Result<_>>()?;
        Ok(StorageCode { spec: self.spec, nodes })
    }

    /// Generators of `nodes`, stacked in the order given.
    pub fn stack(&self, nodes: &[usize]) -> Result<FMatrix> {
        if nodes.is_empty() {
            return Ok(FMatrix::zeros(Arc::clone(self.tower()), 0, self.spec.b()));
        }
        let parts = nodes.iter().map(|&i| self.node(i)).collect::<Result<Vec<_>>>()?;
        FMatrix::vstack_all(&parts)
    }

    /// `C_i = G_i X` for every node.
    pub fn encode(&self, x: &[FElem]) -> Result<Vec<Vec<FElem>>> {
        self.nodes.iter().map(|g| g.mul_vec(x)).collect()
    }

    /// Recovers `X` from the shares of exactly `k` distinct nodes.
    pub fn reconstruct(&self, nodes: &[usize], shares: &[Vec<FElem>]) -> Result<Vec<FElem>> {
        if nodes.len() != self.spec.k || shares.len() != nodes.len() || !nodes.iter().all_unique() {
            return Err(Error::Dimension(format!(
                "reconstruction needs shares from exactly k = {} distinct nodes",
                self.spec.k
            )));
        }
        if shares.iter().any(|s| s.len() != self.spec.alpha) {
            return Err(Error::Dimension(format!("each share must hold alpha = {} symbols", self.spec.alpha)));
        }
        let inv = self.stack(nodes)?.invert().map_err(|e| match e {
            Error::Singular { rank, .. } => {
                Error::Structure(format!("nodes {nodes:?} stack to rank {rank}; the code is not MDS"))
            }
            other => other,
        })?;
        inv.mul_vec(&shares.concat())
    }

    /// The adversary's view of `nodes` (sorted ascending).
    pub fn eavesdrop(&self, nodes: &[usize]) -> Result<EavesdropView> {
        let mut nodes = nodes.to_vec();
        nodes.sort_unstable();
        nodes.dedup();
        let gprime = self.stack(&nodes)?;
        Ok(EavesdropView { mu: nodes.len() * self.spec.alpha, nodes, gprime })
    }

    /// Exhaustive rank checks of systematic form, any-`k` reconstruction and
    /// invertibility of each parity node's first thick-column block.
    pub fn verify_structure(&self) -> StructureReport {
        let StorageCodeSpec { n, k, alpha, .. } = self.spec;
        let tower = Arc::clone(self.tower());

        let systematic_fail = (0..k).find(|&i| {
            let mut expected = FMatrix::zeros(Arc::clone(&tower), alpha, self.spec.b());
            for r in 0..alpha {
                expected.set(r, i * alpha + r, FElem::ONE);
            }
            self.nodes[i] != expected
        });
        let systematic = Check::from_failures(k, systematic_fail.map(|i| vec![i]));

        let subsets: Vec<Vec<usize>> = (0..n).combinations(k).collect();
        let ok: Vec<bool> = subsets
            .par_iter()
            .map(|s| self.stack(s).map(|m| m.rank() == self.spec.b()).unwrap_or(false))
            .collect();
        let first_bad = ok.iter().position(|&good| !good).map(|i| subsets[i].clone());
        let reconstruction = Check::from_failures(subsets.len(), first_bad);

        let parity_fail = (k..n).find(|&j| {
            self.nodes[j].take_thick_cols(&[0], alpha).map(|b| b.rank() != alpha).unwrap_or(true)
        });
        let parity_first_block = Check::from_failures(n - k, parity_fail.map(|j| vec![j]));

        StructureReport { systematic, reconstruction, parity_first_block }
    }
}
