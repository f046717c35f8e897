//! Fixtures shared by the benchmarks.

use wsec_core::{Construction, CosetCode, OuterParams, StorageCode, StorageCodeSpec};

/// An outer code and its striped MDS inner code (`beta = 1`).
pub fn pair(construction: Construction, n: usize, k: usize, d: usize, alpha: usize, q: u64) -> (CosetCode, StorageCode) {
    let params = OuterParams::new(n, k, d, alpha, q);
    let outer = match construction {
        Construction::Construct1 => CosetCode::construct1(params),
        Construction::Construct2 => CosetCode::construct2(params),
        _ => CosetCode::identity(params),
    }
    .expect("outer code");
    let spec = StorageCodeSpec::new(n, k, d, alpha, 1, q).expect("spec");
    (outer, StorageCode::make_striped_mds(spec).expect("inner code"))
}
