//! Minimal double-double arithmetic: just enough to get `t ln p mod 2 pi`
//! right to full double precision for `t` up to `1e7`.

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.3190468138462996e-17 };
const TWO_PI: Dd = Dd { hi: std::f64::consts::TAU, lo: 2.4492935982947064e-16 };

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from_f64(q3))
    }
}

/// `ln n` to double-double accuracy, via `n = 2^k m` and the `atanh` series
/// for `ln m` with `m` in `[1/sqrt 2, sqrt 2]`.
pub(crate) fn ln_u64(n: u64) -> Dd {
    assert!(n > 0 && n < (1u64 << 53));
    let x = n as f64;
    let mut k = x.log2().floor() as i32;
    let mut m = x / 2f64.powi(k);
    if m > std::f64::consts::SQRT_2 {
        m *= 0.5;
        k += 1;
    }
    let num = Dd::from_f64(m - 1.0);
    let (dh, dl) = two_sum(m, 1.0);
    let z = num.div(Dd { hi: dh, lo: dl });
    let z2 = z.mul(z);
    let mut power = z;
    let mut sum = z;
    let mut j = 3.0;
    while power.hi.abs() > 1e-36 {
        power = power.mul(z2);
        sum = sum.add(power.div(Dd::from_f64(j)));
        j += 2.0;
    }
    LN2.mul_f64(k as f64).add(sum.mul_f64(2.0))
}

/// `t * ln_n` reduced into `[-pi, pi]`, as a double-double.
pub(crate) fn reduced_phase(t: f64, ln_n: Dd) -> Dd {
    let theta = ln_n.mul_f64(t);
    let k = (theta.hi / TWO_PI.hi).round();
    theta.sub(TWO_PI.mul_f64(k))
}
