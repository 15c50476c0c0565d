//! Exact Bernoulli numbers.
//!
//! Sign convention: `B_1 = -1/2`, so that
//! `sum_{k=0}^{m} C(m+1, k) B_k = 0` for every `m >= 1`. This is the
//! convention the Euler–Maclaurin tails in [`crate::zeta`] are written for;
//! only even-index values enter there.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Largest index held in the exact floating-point cache.
pub const BERNOULLI_EXACT_MAX: usize = 60;

/// `B_0, B_1, ..., B_{2 count}` as exact rationals. Odd indices above 1 are
/// zero-filled.
pub fn bernoulli_numbers(count: usize) -> Vec<BigRational> {
    let n = 2 * count;
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(BigRational::from_integer(1.into()));
    // binomial row C(m+1, k), updated in place
    let mut row: Vec<BigInt> = vec![BigInt::from(1)];
    for m in 1..=n {
        let mut next = vec![BigInt::from(1); m + 2];
        for k in 1..=m {
            next[k] = &row[k - 1] + row.get(k).cloned().unwrap_or_else(|| BigInt::from(1));
        }
        // next is now row m+1 of Pascal's triangle when row held row m
        row = next;
        if m > 1 && m % 2 == 1 {
            b.push(BigRational::zero());
            continue;
        }
        let mut acc = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            if bk.is_zero() {
                continue;
            }
            acc += BigRational::from_integer(row[k].clone()) * bk;
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m as u64 + 1)));
    }
    b
}

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        bernoulli_numbers(BERNOULLI_EXACT_MAX / 2)
            .iter()
            .map(|r| r.to_f64().unwrap_or(f64::NAN))
            .collect()
    })
}

/// `B_n` rounded to `f64`, for `n <= 60`.
pub fn bernoulli_f64(n: usize) -> Option<f64> {
    table().get(n).copied()
}
