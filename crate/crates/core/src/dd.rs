//! Double-double arithmetic: unevaluated sums of two f64s giving roughly 31
//! significant digits. Used where a q-series is evaluated deep along a
//! radial path and the alternating terms grow far beyond the final value,
//! so plain f64 loses the difference entirely.
//!
//! Only the handful of operations the series loops need are implemented.
//! Algorithms are the classical error-free transformations (two_sum, split,
//! two_prod) of Dekker and Knuth.

/// value = hi + lo with |lo| <= ulp(hi)/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let c = 134217729.0 * a; // 2^27 + 1
    let hi = c - (c - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from_f64(q1)));
        let q2 = r.hi / o.hi;
        let r2 = r.sub(o.mul(Dd::from_f64(q2)));
        let q3 = r2.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from_f64(q3))
    }
}

// 2 pi and pi/2 as double-doubles.
const TWO_PI: Dd = Dd {
    hi: 6.283185307179586,
    lo: 2.4492935982947064e-16,
};
const FRAC_PI_2: Dd = Dd {
    hi: 1.5707963267948966,
    lo: 6.123233995736766e-17,
};

/// (cos, sin) of 2 pi num/den in double-double, for exact rational angles.
/// Argument reduction against the double-double pi/2 followed by Taylor
/// series on [-pi/4, pi/4].
pub(crate) fn sincos_2pi_frac(num: i64, den: i64) -> (Dd, Dd) {
    debug_assert!(den > 0);
    let r = num.rem_euclid(den);
    let theta = TWO_PI
        .mul(Dd::from_f64(r as f64))
        .div(Dd::from_f64(den as f64));
    let quadrant = (theta.hi / FRAC_PI_2.hi).round();
    let x = theta.sub(FRAC_PI_2.mul(Dd::from_f64(quadrant)));
    let x2 = x.mul(x);

    // sin(x)/x and cos(x) by Taylor; 1/k! built incrementally in dd.
    let mut sin = Dd::ONE;
    let mut cos = Dd::ONE;
    let mut term_s = Dd::ONE;
    let mut term_c = Dd::ONE;
    let mut k = 1.0f64;
    for _ in 0..16 {
        term_c = term_c.mul(x2).div(Dd::from_f64(k * (k + 1.0))).neg();
        cos = cos.add(term_c);
        term_s = term_s
            .mul(x2)
            .div(Dd::from_f64((k + 1.0) * (k + 2.0)))
            .neg();
        sin = sin.add(term_s);
        k += 2.0;
        if term_c.hi.abs() < 1e-34 && term_s.hi.abs() < 1e-34 {
            break;
        }
    }
    let sin = sin.mul(x);
    match (quadrant as i64).rem_euclid(4) {
        0 => (cos, sin),
        1 => (sin.neg(), cos),
        2 => (cos.neg(), sin.neg()),
        _ => (sin, cos.neg()),
    }
}

/// Complex number with double-double components.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub const ZERO: CDd = CDd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: CDd = CDd {
        re: Dd::ONE,
        im: Dd::ZERO,
    };

    pub fn from_f64(re: f64, im: f64) -> CDd {
        CDd {
            re: Dd::from_f64(re),
            im: Dd::from_f64(im),
        }
    }

    pub fn add(self, o: CDd) -> CDd {
        CDd {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    pub fn sub(self, o: CDd) -> CDd {
        CDd {
            re: self.re.sub(o.re),
            im: self.im.sub(o.im),
        }
    }

    pub fn mul(self, o: CDd) -> CDd {
        CDd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    pub fn div(self, o: CDd) -> CDd {
        let den = o.re.mul(o.re).add(o.im.mul(o.im));
        let num = self.mul(CDd {
            re: o.re,
            im: o.im.neg(),
        });
        CDd {
            re: num.re.div(den),
            im: num.im.div(den),
        }
    }

    /// Magnitude estimate from the leading components, for stopping rules.
    pub fn norm_est(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }

    pub fn to_complex(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.hi + self.re.lo, self.im.hi + self.im.lo)
    }
}
