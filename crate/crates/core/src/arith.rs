//! Primes, segmented factorization of short intervals, and the elementary
//! arithmetic used by every sum in the crate.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Numbers per segment of the interval sieve. Results do not depend on it.
pub const SEGMENT_LEN: u64 = 1 << 16;

/// An integer `n >= 1` with its ascending `(prime, exponent)` list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn one() -> Self {
        Factorization {
            n: 1,
            factors: Vec::new(),
        }
    }

    /// Builds a factorization from prime powers, checking ordering and that
    /// the product fits in 64 bits. Primality of the bases is not checked.
    pub fn from_factors(factors: Vec<(u64, u32)>) -> Result<Self> {
        let mut n: u64 = 1;
        let mut prev = 1u64;
        for &(p, e) in &factors {
            if p <= prev || e == 0 {
                return Err(Error::ContractViolation(format!(
                    "factor list must have strictly increasing bases >= 2 and positive exponents, got {factors:?}"
                )));
            }
            prev = p;
            let pe = p
                .checked_pow(e)
                .ok_or_else(|| Error::Range(format!("{p}^{e} overflows u64")))?;
            n = n
                .checked_mul(pe)
                .ok_or_else(|| Error::Range(format!("product of {factors:?} overflows u64")))?;
        }
        Ok(Factorization { n, factors })
    }

    pub(crate) fn from_parts(n: u64, factors: Vec<(u64, u32)>) -> Self {
        debug_assert_eq!(factors.iter().map(|&(p, e)| p.pow(e)).product::<u64>(), n);
        Factorization { n, factors }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// `q(n)`; `None` stands for `+inf`, the value at `n = 1`.
    pub fn least_prime_factor(&self) -> Option<u64> {
        self.factors.first().map(|&(p, _)| p)
    }

    /// `q(n)` as a float, `+inf` at `n = 1`.
    pub fn least_prime_factor_f64(&self) -> f64 {
        self.least_prime_factor()
            .map_or(f64::INFINITY, |p| p as f64)
    }

    /// `p(n)`; `p(1) = 1`.
    pub fn greatest_prime_factor(&self) -> u64 {
        self.factors.last().map_or(1, |&(p, _)| p)
    }

    /// Number of prime factors counted with multiplicity.
    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_smooth(&self, bound: f64) -> bool {
        self.greatest_prime_factor() as f64 <= bound
    }

    pub fn is_coprime_to(&self, k: u64) -> bool {
        self.factors.iter().all(|&(p, _)| k % p != 0)
    }
}

/// Splits `n = s * t` with every prime of `s` at most `j` and every prime
/// of `t` above `j`.
pub fn smooth_rough_split(f: &Factorization, j: f64) -> (Factorization, Factorization) {
    let cut = f.factors.partition_point(|&(p, _)| p as f64 <= j);
    let (lo, hi) = f.factors.split_at(cut);
    let s: u64 = lo.iter().map(|&(p, e)| p.pow(e)).product();
    (
        Factorization::from_parts(s, lo.to_vec()),
        Factorization::from_parts(f.n / s, hi.to_vec()),
    )
}

pub fn least_prime_factor(f: &Factorization) -> Option<u64> {
    f.least_prime_factor()
}

pub fn greatest_prime_factor(f: &Factorization) -> u64 {
    f.greatest_prime_factor()
}

/// Integer square root, exact for all of `u64`.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i as u64);
            let mut m = i * i;
            while m <= limit {
                composite[m] = true;
                m += i;
            }
        }
    }
    primes
}

/// All primes `<= limit`, ascending, by a segmented odd-only sieve.
pub fn sieve_primes(limit: u64) -> Result<Vec<u64>> {
    if limit < 2 {
        return Err(Error::EmptyDomain(format!("no primes <= {limit}")));
    }
    let base = simple_sieve(isqrt(limit));
    let mut primes = vec![2u64];
    let seg = SEGMENT_LEN;
    // segment covers odd numbers lo, lo+2, ..., lo + 2*(seg-1)
    let mut lo = 3u64;
    let mut marks = vec![false; seg as usize];
    while lo <= limit {
        let span = ((limit - lo) / 2 + 1).min(seg);
        let hi = lo + 2 * (span - 1);
        marks[..span as usize].fill(false);
        for &p in base.iter().skip(1) {
            let pp = p * p;
            if pp > hi {
                break;
            }
            let mut start = if pp >= lo { pp } else { lo.div_ceil(p) * p };
            if start % 2 == 0 {
                start += p;
            }
            let mut idx = (start - lo) / 2;
            while idx < span {
                marks[idx as usize] = true;
                idx += p;
            }
        }
        primes.extend(
            (0..span)
                .filter(|&i| !marks[i as usize])
                .map(|i| lo + 2 * i),
        );
        match hi.checked_add(2) {
            Some(next) => lo = next,
            None => break,
        }
    }
    Ok(primes)
}

/// An immutable ascending table of every prime up to `limit`.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn new(limit: u64) -> Result<Self> {
        let primes = if limit < 2 {
            Vec::new()
        } else {
            sieve_primes(limit)?
        };
        Ok(PrimeTable { limit, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Primes `<= x`; fails if the table does not reach `x`.
    pub fn up_to(&self, x: f64) -> Result<&[u64]> {
        if x > self.limit as f64 && x.floor() > self.limit as f64 {
            return Err(Error::Range(format!(
                "prime table reaches {} but {x} was requested",
                self.limit
            )));
        }
        let cut = self.primes.partition_point(|&p| p as f64 <= x);
        Ok(&self.primes[..cut])
    }

    /// `pi(x)`, exact within the table.
    pub fn count_up_to(&self, x: f64) -> Result<usize> {
        Ok(self.up_to(x)?.len())
    }
}

/// Factors every integer of `[x, x + y)` by sieving the segment with the
/// primes up to `sqrt(x + y)`; a leftover cofactor above 1 is prime.
pub fn factor_interval(x: u64, y: u64) -> Result<Vec<Factorization>> {
    let end = interval_end(x, y)?;
    let table = PrimeTable::new(isqrt(end - 1))?;
    factor_interval_with(x, y, &table, SEGMENT_LEN)
}

fn interval_end(x: u64, y: u64) -> Result<u64> {
    if x == 0 || y == 0 {
        return Err(Error::Domain(format!(
            "interval [x, x+y) needs x >= 1 and y >= 1, got x = {x}, y = {y}"
        )));
    }
    x.checked_add(y)
        .ok_or_else(|| Error::Range(format!("x + y overflows u64 (x = {x}, y = {y})")))
}

fn check_sieving_table(end: u64, table: &PrimeTable) -> Result<()> {
    let root = isqrt(end - 1);
    if table.limit() < root {
        return Err(Error::Range(format!(
            "prime table reaches {} but sieving [.., {end}) needs {root}",
            table.limit()
        )));
    }
    Ok(())
}

/// As [`factor_interval`] with an explicit prime table (reaching at least
/// `sqrt(x + y - 1)`) and segment length. Segments are factored in
/// parallel and concatenated in order.
pub fn factor_interval_with(
    x: u64,
    y: u64,
    table: &PrimeTable,
    segment_len: u64,
) -> Result<Vec<Factorization>> {
    let end = interval_end(x, y)?;
    check_sieving_table(end, table)?;
    let segment_len = segment_len.max(1);
    let starts: Vec<u64> = (0..y.div_ceil(segment_len))
        .map(|i| x + i * segment_len)
        .collect();
    let parts: Vec<Vec<Factorization>> = starts
        .par_iter()
        .map(|&lo| factor_segment(lo, lo.saturating_add(segment_len).min(end), table.primes()))
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

/// Calls `visit` on the factorization of every integer of `[x, x + y)`,
/// one segment at a time, without materializing the whole interval.
pub fn for_each_factored(
    x: u64,
    y: u64,
    table: &PrimeTable,
    mut visit: impl FnMut(&Factorization),
) -> Result<()> {
    let end = interval_end(x, y)?;
    check_sieving_table(end, table)?;
    let mut lo = x;
    while lo < end {
        let hi = lo.saturating_add(SEGMENT_LEN).min(end);
        for f in factor_segment(lo, hi, table.primes()) {
            visit(&f);
        }
        lo = hi;
    }
    Ok(())
}

fn factor_segment(lo: u64, hi: u64, primes: &[u64]) -> Vec<Factorization> {
    let len = (hi - lo) as usize;
    let mut rest: Vec<u64> = (lo..hi).collect();
    let mut factors: Vec<Vec<(u64, u32)>> = vec![Vec::new(); len];
    let top = hi - 1;
    for &p in primes {
        if p.saturating_mul(p) > top {
            break;
        }
        let first = lo.div_ceil(p) * p;
        let mut idx = (first - lo) as usize;
        while idx < len {
            let mut e = 0u32;
            while rest[idx] % p == 0 {
                rest[idx] /= p;
                e += 1;
            }
            factors[idx].push((p, e));
            idx += p as usize;
        }
    }
    rest.into_iter()
        .zip(factors)
        .enumerate()
        .map(|(i, (r, mut fs))| {
            if r > 1 {
                fs.push((r, 1));
            }
            Factorization::from_parts(lo + i as u64, fs)
        })
        .collect()
}

/// Factorization of a single small integer by trial division; used for
/// moduli, never for interval scans.
pub(crate) fn factor_small(mut n: u64) -> Factorization {
    let orig = n;
    let mut fs = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            fs.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        fs.push((n, 1));
    }
    Factorization::from_parts(orig.max(1), fs)
}

pub fn euler_phi(k: u64) -> u64 {
    factor_small(k)
        .factors()
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The integers of `[x, x + y)` congruent to `a` modulo `k`, ascending.
pub fn residues_in_interval(x: u64, y: u64, k: u64, a: u64) -> Result<Vec<u64>> {
    if k == 0 {
        return Err(Error::Domain("modulus k must be positive".into()));
    }
    let end = x
        .checked_add(y)
        .ok_or_else(|| Error::Range(format!("x + y overflows u64 (x = {x}, y = {y})")))?;
    let a = a % k;
    let first = x + (a + k - x % k) % k;
    Ok((first..end).step_by(k as usize).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_small_limits() {
        assert_eq!(sieve_primes(10).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(sieve_primes(2).unwrap(), vec![2]);
        assert_eq!(sieve_primes(3).unwrap(), vec![2, 3]);
        assert!(matches!(sieve_primes(1), Err(Error::EmptyDomain(_))));
    }

    #[test]
    fn sieve_matches_simple_sieve_across_segments() {
        let limit = 3 * SEGMENT_LEN * 2 + 17;
        assert_eq!(sieve_primes(limit).unwrap(), simple_sieve(limit));
    }

    #[test]
    fn unit_has_empty_factor_list() {
        let f = factor_interval(1, 1).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0], Factorization::one());
        assert_eq!(f[0].least_prime_factor(), None);
        assert_eq!(f[0].greatest_prime_factor(), 1);
        assert_eq!(f[0].least_prime_factor_f64(), f64::INFINITY);
    }

    #[test]
    fn overflow_and_empty_interval_rejected() {
        assert!(matches!(
            factor_interval(u64::MAX - 2, 5),
            Err(Error::Range(_))
        ));
        assert!(matches!(factor_interval(5, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn lpf_gpf_examples() {
        let f60 = factor_small(60);
        assert_eq!(f60.least_prime_factor(), Some(2));
        assert_eq!(f60.greatest_prime_factor(), 5);
        let f101 = factor_small(101);
        assert_eq!(f101.least_prime_factor(), Some(101));
        assert_eq!(f101.greatest_prime_factor(), 101);
    }

    #[test]
    fn split_examples() {
        let (s, t) = smooth_rough_split(&factor_small(60), 3.0);
        assert_eq!((s.n(), t.n()), (12, 5));
        let (s, t) = smooth_rough_split(&factor_small(101), 3.0);
        assert_eq!((s.n(), t.n()), (1, 101));
        let (s, t) = smooth_rough_split(&factor_small(8 * 3 * 47), 10.0);
        assert_eq!((s.n(), t.n()), (24, 47));
    }

    #[test]
    fn phi_examples() {
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(97), 96);
    }

    #[test]
    fn residues_examples() {
        assert_eq!(
            residues_in_interval(100, 20, 5, 1).unwrap(),
            vec![101, 106, 111, 116]
        );
        assert_eq!(
            residues_in_interval(10, 10, 1, 0).unwrap(),
            (10..20).collect::<Vec<_>>()
        );
        assert!(matches!(
            residues_in_interval(1, 1, 0, 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn from_factors_validates() {
        assert_eq!(
            Factorization::from_factors(vec![(2, 2), (5, 2)])
                .unwrap()
                .n(),
            100
        );
        assert!(Factorization::from_factors(vec![(5, 1), (2, 1)]).is_err());
        assert!(Factorization::from_factors(vec![(2, 0)]).is_err());
        assert!(Factorization::from_factors(vec![(2, 64)]).is_err());
    }

    #[test]
    fn isqrt_edges() {
        assert_eq!(isqrt(0), 0);
        assert_eq!(isqrt(15), 3);
        assert_eq!(isqrt(16), 4);
        assert_eq!(isqrt(u64::MAX), 4_294_967_295);
    }
}
