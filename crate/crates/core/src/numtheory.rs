//! Small integer helpers: primality, prime powers and factorization by trial division.

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Splits `q` as `p^t` with `p` prime, or returns `None`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = smallest_factor(q);
    let mut rest = q;
    let mut t = 0;
    while rest % p == 0 {
        rest /= p;
        t += 1;
    }
    (rest == 1).then_some((p, t))
}

fn smallest_factor(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return d;
        }
        d += 2;
    }
    n
}

/// Distinct prime divisors of `n` in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest power `q^r` (r >= 1) satisfying `pred`, with its exponent.
pub fn smallest_power_where(q: u64, pred: impl Fn(u128) -> bool) -> (u128, u32) {
    let mut value = q as u128;
    let mut r = 1;
    while !pred(value) {
        value *= q as u128;
        r += 1;
    }
    (value, r)
}
