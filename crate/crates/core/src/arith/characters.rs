use num_complex::Complex64;

use crate::error::{Error, Result};

/// Moduli above this are rejected rather than optimized for.
pub const MAX_CHARACTER_MODULUS: u64 = 10_000;

/// A Dirichlet character modulo `q`, stored as its full value table.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletCharacter {
    modulus: u64,
    index: usize,
    values: Vec<Complex64>,
    is_principal: bool,
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Position in the list returned by [`characters_mod`]; 0 is principal.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_principal(&self) -> bool {
        self.is_principal
    }

    /// `chi(n)` for any integer `n >= 0`.
    pub fn value(&self, n: u64) -> Complex64 {
        self.values[(n % self.modulus) as usize]
    }

    /// True when every value is real (the character is its own conjugate).
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut k = 0;
            while n % d == 0 {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// One cyclic factor of `(Z/qZ)^*`: residues mod `modulus` carry a discrete
/// log in `0..order` (`None` for non-units).
struct CyclicFactor {
    modulus: u64,
    order: u64,
    log: Vec<Option<u64>>,
}

fn cyclic_factors(q: u64) -> Vec<CyclicFactor> {
    let mut out = Vec::new();
    for (p, k) in factorize(q) {
        let m = p.pow(k);
        if p == 2 {
            if k == 1 {
                continue;
            }
            // (Z/2^k)^* = <-1> x <5>, with <5> trivial when k = 2
            let order5 = if k >= 3 { 1u64 << (k - 2) } else { 1 };
            let mut sign_log = vec![None; m as usize];
            let mut five_log = vec![None; m as usize];
            let mut pw = 1u64;
            for b in 0..order5 {
                for a in 0..2u64 {
                    let n = if a == 0 { pw } else { m - pw };
                    sign_log[n as usize] = Some(a);
                    five_log[n as usize] = Some(b);
                }
                pw = pw * 5 % m;
            }
            out.push(CyclicFactor { modulus: m, order: 2, log: sign_log });
            if order5 > 1 {
                out.push(CyclicFactor { modulus: m, order: order5, log: five_log });
            }
        } else {
            let phi = m / p * (p - 1);
            let phi_primes: Vec<u64> = factorize(phi).into_iter().map(|(r, _)| r).collect();
            let g = (2..m)
                .find(|&g| gcd(g, m) == 1 && phi_primes.iter().all(|&r| pow_mod(g, phi / r, m) != 1))
                .expect("odd prime powers have primitive roots");
            let mut log = vec![None; m as usize];
            let mut pw = 1u64;
            for e in 0..phi {
                log[pw as usize] = Some(e);
                pw = pw * g % m;
            }
            out.push(CyclicFactor { modulus: m, order: phi, log });
        }
    }
    out
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// `exp(2 pi i k / n)`, exact at multiples of a quarter turn.
fn root_of_unity(k: u64, n: u64) -> Complex64 {
    let k = k % n;
    if (4 * k) % n == 0 {
        return match 4 * k / n {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let theta = std::f64::consts::TAU * k as f64 / n as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// All `phi(q)` Dirichlet characters modulo `q`, built from discrete logs on
/// a generating set of `(Z/qZ)^*`. Index 0 is the principal character.
pub fn characters_mod(q: u64) -> Result<Vec<DirichletCharacter>> {
    if q == 0 {
        return Err(Error::Domain("modulus must be at least 1".into()));
    }
    if q > MAX_CHARACTER_MODULUS {
        return Err(Error::Domain(format!(
            "modulus {q} exceeds supported maximum {MAX_CHARACTER_MODULUS}"
        )));
    }
    let factors = cyclic_factors(q);
    let big = factors.iter().fold(1u64, |acc, f| lcm(acc, f.order));
    let count: u64 = factors.iter().map(|f| f.order).product();

    // per residue: sum_j log_j(n) * (big / order_j), or None for non-units
    let base: Vec<Option<Vec<u64>>> = (0..q)
        .map(|n| {
            if gcd(n, q) != 1 {
                return None;
            }
            factors
                .iter()
                .map(|f| f.log[(n % f.modulus) as usize].map(|l| l * (big / f.order)))
                .collect()
        })
        .collect();

    let mut out = Vec::with_capacity(count as usize);
    for index in 0..count {
        let mut rem = index;
        let exps: Vec<u64> = factors
            .iter()
            .map(|f| {
                let e = rem % f.order;
                rem /= f.order;
                e
            })
            .collect();
        let values = base
            .iter()
            .map(|logs| match logs {
                None => Complex64::new(0.0, 0.0),
                Some(logs) => {
                    let k = logs
                        .iter()
                        .zip(&exps)
                        .fold(0u64, |acc, (l, e)| (acc + l * e) % big);
                    root_of_unity(k, big)
                }
            })
            .collect();
        out.push(DirichletCharacter {
            modulus: q,
            index: index as usize,
            values,
            is_principal: index == 0,
        });
    }
    Ok(out)
}
