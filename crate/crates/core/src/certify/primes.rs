//! Small prime utilities used by the witness searches.

/// Trial division bound used by [`prime_factors`].
const TRIAL_LIMIT: u128 = 1 << 20;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// All primes `≤ limit`, ascending.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for n in 2..=limit {
        if !composite[n] {
            primes.push(n as u64);
            let mut m = n * n;
            while m <= limit {
                composite[m] = true;
                m += n;
            }
        }
    }
    primes
}

/// Distinct prime factors of `n` that fit in a `u64`, ascending.
///
/// Factors are found by trial division up to 2^20; a remaining cofactor is
/// reported only when it is provably prime (below 2^40). Larger unfactored
/// cofactors are dropped, so the result may be incomplete for huge inputs but
/// never contains a non-prime.
pub fn prime_factors(n: u128) -> Vec<u64> {
    let mut n = n;
    let mut factors = Vec::new();
    let mut d = 2u128;
    while d <= TRIAL_LIMIT && d * d <= n {
        if n.is_multiple_of(d) {
            factors.push(d as u64);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 && (d * d > n) && n <= u64::MAX as u128 {
        factors.push(n as u64);
    }
    factors
}

/// `base^exp mod p` for `p < 2^64`.
pub fn pow_mod(base: u64, mut exp: u32, p: u64) -> u64 {
    let p = p as u128;
    let mut base = base as u128 % p;
    let mut acc = 1u128 % p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc as u64
}

/// Residue of a signed integer in `[0, p)`.
pub fn residue(value: i128, p: u64) -> u64 {
    value.rem_euclid(p as i128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_matches_trial_division() {
        let sieve = primes_up_to(1000);
        let trial: Vec<u64> = (0..=1000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve, trial);
        assert_eq!(sieve.len(), 168);
    }

    #[test]
    fn factors() {
        assert_eq!(prime_factors(1), Vec::<u64>::new());
        assert_eq!(prime_factors(360), vec![2, 3, 5]);
        assert_eq!(prime_factors(1_000_003), vec![1_000_003]);
        // 2^61 - 1 is prime but beyond the certified cofactor bound
        assert_eq!(prime_factors(3 * ((1u128 << 61) - 1)), vec![3]);
    }

    #[test]
    fn modular_helpers() {
        assert_eq!(pow_mod(2, 10, 1000), 24);
        assert_eq!(pow_mod(5, 0, 7), 1);
        assert_eq!(residue(-1, 3), 2);
        assert_eq!(residue(-9, 3), 0);
    }
}
