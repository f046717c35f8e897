//! Outer coset codes. A message `S` is stored as some `X` with `H X = S`;
//! decoding is the syndrome `H X`.
//!
//! Two universal parity-check matrices are provided. Both start from a
//! matrix over an intermediate field `GF(q_r)` and scale selected columns by
//! powers of a primitive element `ω` of an extension `GF(q_r^m)`:
//!
//! * [`CosetCode::construct1`]: a Vandermonde matrix on `B` distinct nonzero
//!   points whose every `α`-th column `j` is scaled by `ω^(j/α)`, with
//!   `m = k + 1`. Protects every single symbol against `k - 1` nodes.
//! * [`CosetCode::construct2`]: `H' W'` where `H'` is Cauchy and `W'` scales the
//!   first `α` columns by `1/ω`, with `m = α + 1`. Protects every group of
//!   `B - α` symbols against a single node.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FElem, FieldTower, DEFAULT_FIELD_CAP};
use crate::matrix::FMatrix;
use crate::numtheory::{prime_power, smallest_power_where};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Construction {
    Construct1,
    Construct2,
    /// `H = I`: no protection at all. Used as a negative control.
    Identity,
    Custom,
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Construction::Construct1 => "CONSTRUCT1",
            Construction::Construct2 => "CONSTRUCT2",
            Construction::Identity => "IDENTITY",
            Construction::Custom => "CUSTOM",
        })
    }
}

impl FromStr for Construction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "CONSTRUCT1" => Ok(Construction::Construct1),
            "CONSTRUCT2" => Ok(Construction::Construct2),
            "IDENTITY" => Ok(Construction::Identity),
            "CUSTOM" => Ok(Construction::Custom),
            other => Err(format!("unknown construction {other:?}")),
        }
    }
}

/// Storage-code parameters the outer code is designed against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OuterParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub alpha: usize,
    pub q: u64,
}

impl OuterParams {
    pub fn new(n: usize, k: usize, d: usize, alpha: usize, q: u64) -> OuterParams {
        OuterParams { n, k, d, alpha, q }
    }

    pub fn b(&self) -> usize {
        self.k * self.alpha
    }

    fn validate(&self) -> Result<(u64, u32)> {
        let (p, t) = prime_power(self.q).ok_or(Error::NotPrimePower(self.q))?;
        if self.k < 2 {
            return Err(Error::InvalidParams(format!("k = {} must be at least 2", self.k)));
        }
        if self.alpha == 0 {
            return Err(Error::InvalidParams("alpha must be positive".into()));
        }
        if self.n < self.k {
            return Err(Error::InvalidParams(format!("n = {} is below k = {}", self.n, self.k)));
        }
        Ok((p, t))
    }
}

/// Parameters recorded with a built code. `m` is the degree of the top field
/// over `GF(q_r)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CosetParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub alpha: usize,
    pub q: u64,
    pub qr: u64,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetCode {
    h: FMatrix,
    h_inv: Option<FMatrix>,
    construction: Construction,
    params: CosetParams,
    omega: FElem,
}

/// Tower `GF(p) [-> GF(q)] [-> GF(q_r)] -> GF(q_r^m)`, skipping trivial steps.
fn outer_tower(p: u64, t: u32, r: u32, m: usize, cap: u64) -> Result<Arc<FieldTower>> {
    let mut degrees = Vec::new();
    if t > 1 {
        degrees.push(t as usize);
    }
    if r > 1 {
        degrees.push(r as usize);
    }
    degrees.push(m);
    Ok(Arc::new(FieldTower::with_cap(p, &degrees, cap)?))
}

impl CosetCode {
    pub fn construct1(params: OuterParams) -> Result<CosetCode> {
        CosetCode::construct1_capped(params, DEFAULT_FIELD_CAP)
    }

    /// Vandermonde-based code over `GF(q_r^(k+1))`, where `q_r` is the
    /// smallest power of `q` exceeding `B` so that `B` nonzero points exist.
    pub fn construct1_capped(params: OuterParams, cap: u64) -> Result<CosetCode> {
        let (p, t) = params.validate()?;
        let b = params.b();
        let (qr, r) = smallest_power_where(params.q, |v| v > b as u128);
        let m = params.k + 1;
        let tower = outer_tower(p, t, r, m, cap)?;
        let qr_level = tower.top_level() - 1;

        let betas = &tower.enumerate_at(qr_level, b as u64 + 1)?[1..];
        let omega = tower.find_primitive();
        let mut h = FMatrix::vandermonde(Arc::clone(&tower), betas, b)?;
        for j in (params.alpha..=b).step_by(params.alpha) {
            let scale = tower.pow(&omega, (j / params.alpha) as u64);
            for i in 0..b {
                h.set(i, j - 1, tower.mul(&h.get(i, j - 1), &scale));
            }
        }
        let params = CosetParams {
            n: params.n,
            k: params.k,
            d: params.d,
            alpha: params.alpha,
            q: params.q,
            qr: qr as u64,
            m,
        };
        CosetCode::from_parts(Construction::Construct1, params, omega, h)
    }

    pub fn construct2(params: OuterParams) -> Result<CosetCode> {
        CosetCode::construct2_capped(params, DEFAULT_FIELD_CAP)
    }

    /// Cauchy-based code over `GF(q_r^(α+1))`, where `q_r` is the smallest
    /// power of `q` that is at least `2B`.
    pub fn construct2_capped(params: OuterParams, cap: u64) -> Result<CosetCode> {
        let (p, t) = params.validate()?;
        let b = params.b();
        let (qr, r) = smallest_power_where(params.q, |v| v >= 2 * b as u128);
        let m = params.alpha + 1;
        let tower = outer_tower(p, t, r, m, cap)?;
        let qr_level = tower.top_level() - 1;

        let points = tower.enumerate_at(qr_level, 2 * b as u64)?;
        let cauchy = FMatrix::cauchy(Arc::clone(&tower), &points[..b], &points[b..])?;
        let omega = tower.find_primitive();
        let omega_inv = tower.inv(&omega)?;
        let mut w = FMatrix::identity(Arc::clone(&tower), b);
        for j in 0..params.alpha {
            w.set(j, j, omega_inv);
        }
        let h = cauchy.mul(&w)?;
        let params = CosetParams {
            n: params.n,
            k: params.k,
            d: params.d,
            alpha: params.alpha,
            q: params.q,
            qr: qr as u64,
            m,
        };
        CosetCode::from_parts(Construction::Construct2, params, omega, h)
    }

    /// `H = I_B` over `GF(q)`.
    pub fn identity(params: OuterParams) -> Result<CosetCode> {
        let (p, t) = params.validate()?;
        let degrees: Vec<usize> = if t > 1 { vec![t as usize] } else { vec![] };
        let tower = Arc::new(FieldTower::new(p, &degrees)?);
        let h = FMatrix::identity(Arc::clone(&tower), params.b());
        let omega = tower.find_primitive();
        let params = CosetParams {
            n: params.n,
            k: params.k,
            d: params.d,
            alpha: params.alpha,
            q: params.q,
            qr: params.q,
            m: 1,
        };
        CosetCode::from_parts(Construction::Identity, params, omega, h)
    }

    /// Arbitrary full-row-rank parity-check matrix `h` (`Bs <= B`).
    pub fn custom(h: FMatrix, params: OuterParams) -> Result<CosetCode> {
        let tower = Arc::clone(h.tower());
        let omega = tower.find_primitive();
        let params = CosetParams {
            n: params.n,
            k: params.k,
            d: params.d,
            alpha: params.alpha,
            q: params.q,
            qr: tower.size(),
            m: 1,
        };
        CosetCode::from_parts(Construction::Custom, params, omega, h)
    }

    /// Assembles a code from stored parts, checking its invariants.
    pub fn from_parts(construction: Construction, params: CosetParams, omega: FElem, h: FMatrix) -> Result<CosetCode> {
        let tower = Arc::clone(h.tower());
        if !tower.contains(&omega) || omega.is_zero() {
            return Err(Error::ForeignElement);
        }
        if h.rows() > h.cols() || h.rank() != h.rows() {
            return Err(Error::InvalidParams(format!(
                "parity-check matrix ({}x{}, rank {}) must have full row rank",
                h.rows(),
                h.cols(),
                h.rank()
            )));
        }
        if construction != Construction::Custom {
            if !h.is_square() || h.cols() != params.k * params.alpha {
                return Err(Error::InvalidParams(format!(
                    "{construction} needs a square parity-check matrix of size k*alpha = {}",
                    params.k * params.alpha
                )));
            }
            if tower.order(&omega)? != tower.size() - 1 {
                return Err(Error::InvalidParams("omega is not primitive".into()));
            }
        }
        let h_inv = if h.is_square() { Some(h.invert()?) } else { None };
        Ok(CosetCode { h, h_inv, construction, params, omega })
    }

    pub fn h(&self) -> &FMatrix {
        &self.h
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        self.h.tower()
    }

    /// Codeword length `B`.
    pub fn b(&self) -> usize {
        self.h.cols()
    }

    /// Message length `Bs`.
    pub fn bs(&self) -> usize {
        self.h.rows()
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn params(&self) -> &CosetParams {
        &self.params
    }

    pub fn omega(&self) -> FElem {
        self.omega
    }

    /// Tower level holding `GF(q_r)`.
    pub fn qr_level(&self) -> usize {
        let top = self.tower().top_level();
        match self.construction {
            Construction::Construct1 | Construction::Construct2 => top - 1,
            _ => top,
        }
    }

    /// Picks `X` with `H X = S`. Square codes are deterministic and ignore
    /// `seed`; otherwise `X` is uniform over the coset under a generator
    /// seeded with `seed`.
    pub fn encode(&self, s: &[FElem], seed: u64) -> Result<Vec<FElem>> {
        if s.len() != self.bs() {
            return Err(Error::Dimension(format!("message of length {} for Bs = {}", s.len(), self.bs())));
        }
        match &self.h_inv {
            Some(inv) => inv.mul_vec(s),
            None => {
                if s.iter().any(|x| !self.tower().contains(x)) {
                    return Err(Error::ForeignElement);
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                self.h.solve_random(s, &mut rng)
            }
        }
    }

    /// The syndrome `H X`.
    pub fn decode(&self, x: &[FElem]) -> Result<Vec<FElem>> {
        self.h.mul_vec(x)
    }
}
