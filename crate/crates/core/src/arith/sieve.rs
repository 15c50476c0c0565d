use crate::error::{Error, Result};

/// Ascending list of all primes up to `limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, u64> {
        self.primes.iter()
    }

    /// Primes `<= x`, as a prefix of the table.
    pub fn up_to(&self, x: u64) -> &[u64] {
        let end = self.primes.partition_point(|&p| p <= x);
        &self.primes[..end]
    }
}

impl<'a> IntoIterator for &'a PrimeTable {
    type Item = &'a u64;
    type IntoIter = std::slice::Iter<'a, u64>;

    fn into_iter(self) -> Self::IntoIter {
        self.primes.iter()
    }
}

// Odd numbers per segment; 2^18 bytes keeps the working set in L2.
const SEGMENT_LEN: u64 = 1 << 18;

fn isqrt(n: u64) -> u64 {
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).map_or(true, |sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Segmented sieve of Eratosthenes over the odd numbers.
pub fn primes_up_to(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::EmptyDomain(format!(
            "no primes up to {limit}; limit must be at least 2"
        )));
    }
    let root = isqrt(limit);
    let base: Vec<u64> = simple_sieve(root).into_iter().skip(1).collect();

    let estimate = (limit as f64 / (limit as f64).ln().max(1.0) * 1.3) as usize + 8;
    let mut primes = Vec::with_capacity(estimate);
    primes.push(2);

    // index i of a segment starting at odd `low` represents low + 2i
    let mut segment = vec![true; SEGMENT_LEN as usize];
    let mut low = 3u64;
    while low <= limit {
        let high = (low + 2 * SEGMENT_LEN).min(limit + 1);
        let len = (high - low).div_ceil(2) as usize;
        segment[..len].fill(true);
        for &p in &base {
            let sq = p * p;
            if sq >= high {
                break;
            }
            let mut start = if sq >= low { sq } else { low.div_ceil(p) * p };
            if start % 2 == 0 {
                start += p;
            }
            let mut idx = ((start - low) / 2) as usize;
            while idx < len {
                segment[idx] = false;
                idx += p as usize;
            }
        }
        primes.extend(
            segment[..len]
                .iter()
                .enumerate()
                .filter(|(_, &keep)| keep)
                .map(|(i, _)| low + 2 * i as u64)
                .filter(|&n| n <= limit),
        );
        low = high + (high % 2 == 0) as u64;
    }
    Ok(PrimeTable { limit, primes })
}

/// Deterministic trial division.
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

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_list(limit: u64) -> Vec<u64> {
        (2..=limit).filter(|&n| is_prime(n)).collect()
    }

    #[test]
    fn small_limits() {
        assert_eq!(primes_up_to(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(primes_up_to(2).unwrap().primes(), &[2]);
        assert_eq!(primes_up_to(3).unwrap().primes(), &[2, 3]);
        assert_eq!(primes_up_to(100).unwrap().len(), trial_division_list(100).len());
        assert_eq!(primes_up_to(100).unwrap().len(), 25);
    }

    #[test]
    fn rejects_empty_domain() {
        assert!(matches!(primes_up_to(1), Err(Error::EmptyDomain(_))));
        assert!(matches!(primes_up_to(0), Err(Error::EmptyDomain(_))));
    }

    #[test]
    fn matches_trial_division_to_1e5() {
        let sieve = primes_up_to(100_000).unwrap();
        assert_eq!(sieve.primes(), trial_division_list(100_000).as_slice());
    }

    #[test]
    fn crosses_segment_boundaries() {
        // pi(10^7) = 664579
        let limit = 10_000_000;
        let t = primes_up_to(limit).unwrap();
        assert_eq!(t.len(), 664_579);
        assert!(t.primes().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*t.primes().last().unwrap(), 9_999_991);
    }

    #[test]
    fn prefix_queries() {
        let t = primes_up_to(50).unwrap();
        assert_eq!(t.up_to(10), &[2, 3, 5, 7]);
        assert_eq!(t.up_to(1), &[] as &[u64]);
    }
}
