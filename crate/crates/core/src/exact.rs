//! Exact arithmetic over reduced fractions and roots of unity.
//!
//! Everything on the cusp side of the computation is exact: fractions are
//! reduced with positive denominator, a root of unity is stored as its
//! fractional angle, and finite q-Pochhammer products evaluated at roots of
//! unity are split into an exact vanishing order plus a nonzero floating
//! "unit part". Conversion to floating complex numbers happens only at
//! evaluation boundaries, so zero-versus-nonzero decisions are never made by
//! comparing floats against a tolerance.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};

/// Reduced rational number with positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fraction {
    num: i64,
    den: i64,
}

fn reduce_i128(num: i128, den: i128) -> (i64, i64) {
    debug_assert!(den != 0);
    let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
    let g = num.gcd(&den);
    let (num, den) = if g > 1 {
        (num / g, den / g)
    } else {
        (num, den)
    };
    (
        i64::try_from(num).expect("fraction numerator overflow"),
        i64::try_from(den).expect("fraction denominator overflow"),
    )
}

impl Fraction {
    /// Reduced fraction with positive denominator. Errors on a zero denominator.
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        let (num, den) = reduce_i128(num as i128, den as i128);
        Ok(Fraction { num, den })
    }

    /// As `new`, then reduced into [0, 1) modulo 1. Used for cusps and the
    /// normalized parameter fractions.
    pub fn new_mod1(num: i64, den: i64) -> Result<Self> {
        Ok(Self::new(num, den)?.mod1())
    }

    pub fn zero() -> Self {
        Fraction { num: 0, den: 1 }
    }

    pub fn numer(&self) -> i64 {
        self.num
    }

    pub fn denom(&self) -> i64 {
        self.den
    }

    /// Representative in [0, 1). Reduction is preserved.
    pub fn mod1(self) -> Self {
        Fraction {
            num: self.num.rem_euclid(self.den),
            den: self.den,
        }
    }

    pub fn add(self, other: Self) -> Self {
        let num = self.num as i128 * other.den as i128 + other.num as i128 * self.den as i128;
        let den = self.den as i128 * other.den as i128;
        let (num, den) = reduce_i128(num, den);
        Fraction { num, den }
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }

    pub fn neg(self) -> Self {
        Fraction {
            num: -self.num,
            den: self.den,
        }
    }

    pub fn mul_int(self, k: i64) -> Self {
        let (num, den) = reduce_i128(self.num as i128 * k as i128, self.den as i128);
        Fraction { num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Fraction {
    type Err = Error;

    /// Parses `n/d` or a bare integer `n`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (num_str, den_str) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num: i64 = num_str.trim().parse().map_err(|_| Error::Parse {
            position: 0,
            message: format!("invalid numerator in `{s}`"),
        })?;
        let den: i64 = den_str.trim().parse().map_err(|_| Error::Parse {
            position: num_str.len() + 1,
            message: format!("invalid denominator in `{s}`"),
        })?;
        Fraction::new(num, den)
    }
}

/// Exact root of unity e(j/m) = exp(2 pi i j/m), stored as the reduced angle
/// j/m in [0, 1). The denominator of the stored angle is the exact
/// multiplicative order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct RootOfUnity {
    angle: Fraction,
}

impl RootOfUnity {
    /// e(j/m). Errors when m = 0.
    pub fn new(j: i64, m: i64) -> Result<Self> {
        Ok(RootOfUnity {
            angle: Fraction::new_mod1(j, m)?,
        })
    }

    pub fn from_angle(angle: Fraction) -> Self {
        RootOfUnity {
            angle: angle.mod1(),
        }
    }

    pub fn one() -> Self {
        RootOfUnity {
            angle: Fraction::zero(),
        }
    }

    /// -1 = e(1/2).
    pub fn minus_one() -> Self {
        RootOfUnity {
            angle: Fraction::new(1, 2).unwrap(),
        }
    }

    pub fn angle(&self) -> Fraction {
        self.angle
    }

    /// Exact multiplicative order.
    pub fn order(&self) -> i64 {
        self.angle.den
    }

    pub fn is_one(&self) -> bool {
        self.angle.is_zero()
    }

    pub fn mul(self, other: Self) -> Self {
        RootOfUnity {
            angle: self.angle.add(other.angle).mod1(),
        }
    }

    pub fn inv(self) -> Self {
        RootOfUnity {
            angle: self.angle.neg().mod1(),
        }
    }

    pub fn pow(self, e: i64) -> Self {
        RootOfUnity {
            angle: self.angle.mul_int(e).mod1(),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        unit_phase(self.angle.num, self.angle.den)
    }
}

/// exp(2 pi i num/den) with the angle reduced exactly before evaluation.
pub(crate) fn unit_phase(num: i64, den: i64) -> Complex64 {
    let r = num.rem_euclid(den);
    Complex64::from_polar(1.0, std::f64::consts::TAU * (r as f64) / (den as f64))
}

/// The parameter pair (a/b, A/B): the root-of-unity offset e(a/b) of the
/// elliptic variable and the rational q-power A/B. Both are normalized into
/// [0, 1) and reduced.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SpecParams {
    zeta_pow: Fraction,
    q_pow: Fraction,
}

impl SpecParams {
    pub fn new(zeta_pow: Fraction, q_pow: Fraction) -> Self {
        SpecParams {
            zeta_pow: zeta_pow.mod1(),
            q_pow: q_pow.mod1(),
        }
    }

    pub fn from_ints(a: i64, b: i64, big_a: i64, big_b: i64) -> Result<Self> {
        Ok(Self::new(
            Fraction::new_mod1(a, b)?,
            Fraction::new_mod1(big_a, big_b)?,
        ))
    }

    /// a in a/b.
    pub fn a(&self) -> i64 {
        self.zeta_pow.num
    }

    /// b in a/b.
    pub fn b(&self) -> i64 {
        self.zeta_pow.den
    }

    /// A in A/B.
    pub fn big_a(&self) -> i64 {
        self.q_pow.num
    }

    /// B in A/B.
    pub fn big_b(&self) -> i64 {
        self.q_pow.den
    }

    pub fn zeta_pow(&self) -> Fraction {
        self.zeta_pow
    }

    pub fn q_pow(&self) -> Fraction {
        self.q_pow
    }
}

impl fmt::Display for SpecParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.zeta_pow, self.q_pow)
    }
}

/// A rational boundary point h/k in [0, 1), reduced, approached radially.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Cusp {
    frac: Fraction,
}

impl Cusp {
    pub fn new(h: i64, k: i64) -> Result<Self> {
        Ok(Cusp {
            frac: Fraction::new_mod1(h, k)?,
        })
    }

    pub fn h(&self) -> i64 {
        self.frac.num
    }

    pub fn k(&self) -> i64 {
        self.frac.den
    }

    pub fn fraction(&self) -> Fraction {
        self.frac
    }

    /// The root of unity e(h/k) this cusp approaches.
    pub fn root_of_unity(&self) -> RootOfUnity {
        RootOfUnity::from_angle(self.frac)
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.frac)
    }
}

impl FromStr for Cusp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let f = Fraction::from_str(s)?;
        Ok(Cusp { frac: f.mod1() })
    }
}

/// A finite product evaluated at exact roots of unity, split into the exact
/// order of vanishing and the product of the nonvanishing factors.
///
/// The represented value is 0 exactly when `vanishing_order > 0`; otherwise
/// it equals `unit_part`, which is never 0.
#[derive(Clone, Copy, Debug)]
pub struct StrippedProduct {
    pub vanishing_order: usize,
    pub unit_part: Complex64,
}

impl StrippedProduct {
    pub fn one() -> Self {
        StrippedProduct {
            vanishing_order: 0,
            unit_part: Complex64::new(1.0, 0.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.vanishing_order > 0
    }

    /// The represented value, collapsing a positive vanishing order to 0.
    pub fn value(&self) -> Complex64 {
        if self.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            self.unit_part
        }
    }

    /// Product composition: orders add, unit parts multiply.
    pub fn compose(&self, other: &Self) -> Self {
        StrippedProduct {
            vanishing_order: self.vanishing_order + other.vanishing_order,
            unit_part: self.unit_part * other.unit_part,
        }
    }
}

/// e(j/m) as a double-double complex number.
pub(crate) fn rou_to_cdd(z: RootOfUnity) -> crate::dd::CDd {
    let (cos, sin) = crate::dd::sincos_2pi_frac(z.angle().numer(), z.angle().denom());
    crate::dd::CDd { re: cos, im: sin }
}

/// As `pochhammer_rou`, accumulating the unit part in double-double
/// arithmetic. The curious-identity sweeps compare two finite sums whose
/// terms reach a few hundred in magnitude while agreeing to 1e-10, which
/// leaves no rounding headroom in plain f64.
pub(crate) fn pochhammer_rou_dd(
    start: RootOfUnity,
    step: RootOfUnity,
    n: usize,
) -> (usize, crate::dd::CDd) {
    use crate::dd::{sincos_2pi_frac, CDd, Dd};
    let mut order = 0usize;
    let mut unit = CDd::ONE;
    let mut cur = start;
    for _ in 0..n {
        if cur.is_one() {
            order += 1;
        } else {
            let (cos, sin) = sincos_2pi_frac(cur.angle().numer(), cur.angle().denom());
            unit = unit.mul(CDd {
                re: Dd::ONE.sub(cos),
                im: sin.neg(),
            });
        }
        cur = cur.mul(step);
    }
    (order, unit)
}

/// Finite q-Pochhammer product (start; step)_n = prod_{j<n} (1 - start*step^j)
/// at exact roots of unity, with exact zero detection.
///
/// Returns the number of vanishing factors and the product of the remaining
/// ones. n = 0 yields the empty product (order 0, unit part 1).
pub fn pochhammer_rou(start: RootOfUnity, step: RootOfUnity, n: usize) -> StrippedProduct {
    let mut order = 0usize;
    let mut unit = Complex64::new(1.0, 0.0);
    let mut cur = start;
    for _ in 0..n {
        if cur.is_one() {
            order += 1;
        } else {
            unit *= Complex64::new(1.0, 0.0) - cur.to_complex();
        }
        cur = cur.mul(step);
    }
    StrippedProduct {
        vanishing_order: order,
        unit_part: unit,
    }
}

/// A finite Pochhammer product evaluated along a radial path into a root of
/// unity: factor j is (1 - e(root_j) e^{-c_j t}) with root_j = start*step^j
/// and linear decay exponent c_j = exp_start + j*exp_step.
///
/// A factor whose root is exactly 1 vanishes linearly with rate c_j; the
/// limit of a quotient of such products with equal vanishing orders is the
/// unit-part ratio times the ratio of the rate products. `zero_rate` marks
/// the degenerate case of a vanishing factor that does not move along the
/// path at all (c_j = 0), where no finite limit exists.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RadialProduct {
    pub vanishing_order: usize,
    pub unit_part: Complex64,
    pub rate: f64,
    pub zero_rate: bool,
}

impl RadialProduct {
    pub(crate) fn compose(&self, other: &Self) -> Self {
        RadialProduct {
            vanishing_order: self.vanishing_order + other.vanishing_order,
            unit_part: self.unit_part * other.unit_part,
            rate: self.rate * other.rate,
            zero_rate: self.zero_rate || other.zero_rate,
        }
    }
}

pub(crate) fn pochhammer_radial(
    start: RootOfUnity,
    step: RootOfUnity,
    exp_start: i64,
    exp_step: i64,
    n: usize,
) -> RadialProduct {
    let mut out = RadialProduct {
        vanishing_order: 0,
        unit_part: Complex64::new(1.0, 0.0),
        rate: 1.0,
        zero_rate: false,
    };
    let mut cur = start;
    for j in 0..n {
        if cur.is_one() {
            out.vanishing_order += 1;
            let c = exp_start + j as i64 * exp_step;
            if c == 0 {
                out.zero_rate = true;
            } else {
                out.rate *= c as f64;
            }
        } else {
            out.unit_part *= Complex64::new(1.0, 0.0) - cur.to_complex();
        }
        cur = cur.mul(step);
    }
    out
}

/// The three roots of unity entering the specialized series: the two
/// denominator starts X = e(a/b + hA/k), Y = e(-a/b + h(B-A)/k) and the
/// base R = e(hB/k).
pub(crate) fn specialized_roots(
    params: &SpecParams,
    cusp: &Cusp,
) -> (RootOfUnity, RootOfUnity, RootOfUnity) {
    let h = cusp.h();
    let k = cusp.k();
    let (big_a, big_b) = (params.big_a(), params.big_b());
    let x = RootOfUnity::from_angle(
        params
            .zeta_pow()
            .add(Fraction::new(h * big_a, k).expect("k > 0")),
    );
    let y = RootOfUnity::from_angle(
        params
            .zeta_pow()
            .neg()
            .add(Fraction::new(h * (big_b - big_a), k).expect("k > 0")),
    );
    let r = RootOfUnity::new(h * big_b, k).expect("k > 0");
    (x, y, r)
}

/// Exact order of the zero of (X; R)_{n+1} (Y; R)_{n+1}, the denominator of
/// the n-th series term after specialization to the cusp.
pub fn alpha_order(params: &SpecParams, cusp: &Cusp, n: usize) -> usize {
    let (x, y, r) = specialized_roots(params, cusp);
    pochhammer_rou(x, r, n + 1).vanishing_order + pochhammer_rou(y, r, n + 1).vanishing_order
}

/// Exact order of the zero of (-R; R)_n with R = e(hB/k), the numerator
/// Pochhammer of the n-th series term.
pub fn beta_order(cusp: &Cusp, big_b: i64, n: usize) -> usize {
    let r = RootOfUnity::new(cusp.h() * big_b, cusp.k()).expect("k > 0");
    let start = RootOfUnity::minus_one().mul(r);
    pochhammer_rou(start, r, n).vanishing_order
}

/// Membership in the denominator-pole set: b | k and (B,k) | (ak/b + hA).
pub fn in_q(params: &SpecParams, cusp: &Cusp) -> bool {
    let (h, k) = (cusp.h(), cusp.k());
    let (a, b) = (params.a(), params.b());
    let (big_a, big_b) = (params.big_a(), params.big_b());
    if k % b != 0 {
        return false;
    }
    let g = big_b.gcd(&k);
    (a * (k / b) + h * big_a) % g == 0
}

/// Membership in the shifted pole set: b | 2k, 2 | k and
/// (B,k) | (2Ah + 2ak/b + k/2).
pub fn in_q_prime(params: &SpecParams, cusp: &Cusp) -> bool {
    let (h, k) = (cusp.h(), cusp.k());
    let (a, b) = (params.a(), params.b());
    let (big_a, big_b) = (params.big_a(), params.big_b());
    if (2 * k) % b != 0 || k % 2 != 0 {
        return false;
    }
    let g = big_b.gcd(&k);
    (2 * big_a * h + a * (2 * k / b) + k / 2) % g == 0
}

/// k' = k / (k, B).
pub fn k_prime_of(cusp: &Cusp, big_b: i64) -> i64 {
    let k = cusp.k();
    k / k.gcd(&big_b)
}

/// (k2, k2') where k2 is the denominator of h/k + 1/(2B) and
/// k2' = k2 / (k2, B).
pub fn k2_of(cusp: &Cusp, big_b: i64) -> (i64, i64) {
    let shifted = cusp
        .fraction()
        .add(Fraction::new(1, 2 * big_b).expect("B > 0"));
    let k2 = shifted.denom();
    (k2, k2 / k2.gcd(&big_b))
}

/// 2-adic valuation.
pub fn ord2(mut m: i64) -> u32 {
    assert!(m != 0, "ord2 of zero");
    let mut v = 0;
    while m % 2 == 0 {
        m /= 2;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn frac(n: i64, d: i64) -> Fraction {
        Fraction::new(n, d).unwrap()
    }

    fn params(a: i64, b: i64, big_a: i64, big_b: i64) -> SpecParams {
        SpecParams::from_ints(a, b, big_a, big_b).unwrap()
    }

    fn cusp(h: i64, k: i64) -> Cusp {
        Cusp::new(h, k).unwrap()
    }

    #[test]
    fn fraction_reduces() {
        assert_eq!(frac(2, 4), frac(1, 2));
        assert_eq!(frac(0, 7).numer(), 0);
        assert_eq!(frac(0, 7).denom(), 1);
        assert_eq!(frac(3, -6), frac(-1, 2));
        assert!(Fraction::new(1, 0).is_err());
    }

    #[test]
    fn cusp_constructor_canonicalizes_mod1() {
        let c = cusp(5, 3);
        assert_eq!((c.h(), c.k()), (2, 3));
        let c = cusp(-1, 3);
        assert_eq!((c.h(), c.k()), (2, 3));
    }

    #[test]
    fn root_of_unity_order_is_denominator() {
        let z = RootOfUnity::new(2, 6).unwrap();
        assert_eq!(z.order(), 3);
        assert!(z.pow(3).is_one());
        assert!(!z.pow(2).is_one());
    }

    #[test]
    fn pochhammer_cube_roots() {
        // prod_{j=1}^{2} (1 - zeta_3^j) = 3, with the single vanishing factor
        // at j = 0 stripped out.
        let sp = pochhammer_rou(RootOfUnity::one(), RootOfUnity::new(1, 3).unwrap(), 3);
        assert_eq!(sp.vanishing_order, 1);
        assert!((sp.unit_part - Complex64::new(3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn pochhammer_empty() {
        let sp = pochhammer_rou(
            RootOfUnity::new(3, 7).unwrap(),
            RootOfUnity::new(1, 5).unwrap(),
            0,
        );
        assert_eq!(sp.vanishing_order, 0);
        assert!((sp.unit_part - Complex64::new(1.0, 0.0)).norm() == 0.0);
    }

    #[test]
    fn pochhammer_minus_i_times_fourth_roots() {
        // (-e(1/4); e(1/4))_4: factors 1 + i*i^j, j = 0..3, i.e.
        // (1+i)(1+i^2)(1+i^3)(1+i^4) with the single zero at j = 1 and
        // unit part (1+i)(1-i)*2 = 4.
        let start = RootOfUnity::minus_one().mul(RootOfUnity::new(1, 4).unwrap());
        let sp = pochhammer_rou(start, RootOfUnity::new(1, 4).unwrap(), 4);
        assert_eq!(sp.vanishing_order, 1);
        assert!((sp.unit_part - Complex64::new(4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn alpha_order_examples() {
        let p = params(0, 1, 1, 2);
        assert_eq!(alpha_order(&p, &cusp(1, 3), 0), 0);
        assert_eq!(alpha_order(&p, &cusp(1, 3), 1), 2);
    }

    #[test]
    fn alpha_order_zero_outside_pole_set() {
        // Outside the pole set no factor ever vanishes.
        let p = params(0, 1, 1, 2);
        for k in [2i64, 4, 6, 8] {
            for h in 1..k {
                if h.gcd(&k) != 1 {
                    continue;
                }
                let c = cusp(h, k);
                assert!(!in_q(&p, &c));
                for n in 0..40 {
                    assert_eq!(alpha_order(&p, &c, n), 0, "cusp {h}/{k}, n = {n}");
                }
            }
        }
    }

    #[test]
    fn beta_order_examples() {
        assert_eq!(beta_order(&cusp(1, 4), 1, 2), 1);
        assert_eq!(beta_order(&cusp(1, 4), 1, 4), 1);
        for n in 0..50 {
            assert_eq!(beta_order(&cusp(1, 3), 1, n), 0);
        }
    }

    #[test]
    fn pole_set_examples() {
        let p = params(0, 1, 1, 2);
        for k in [1i64, 3, 5, 7, 9] {
            for h in 0..k {
                if h.gcd(&k) == 1 {
                    assert!(in_q(&p, &cusp(h, k)), "expected {h}/{k} in pole set");
                }
            }
        }
        assert!(!in_q(&p, &cusp(1, 2)));
        assert!(in_q(&params(1, 2, 0, 1), &cusp(1, 2)));
    }

    #[test]
    fn shifted_pole_set_examples() {
        let p = params(0, 1, 1, 2);
        assert!(in_q_prime(&p, &cusp(1, 4)));
        assert!(!in_q_prime(&p, &cusp(1, 2)));
        assert!(!in_q_prime(&p, &cusp(1, 6)));
    }

    #[test]
    fn derived_denominators() {
        assert_eq!(k2_of(&cusp(1, 2), 2), (4, 2));
        assert_eq!(k2_of(&cusp(0, 1), 1), (2, 2));
        assert_eq!(k2_of(&cusp(1, 3), 2), (12, 6));
        assert_eq!(k_prime_of(&cusp(1, 6), 2), 3);
        assert_eq!(k_prime_of(&cusp(1, 5), 2), 5);
        assert_eq!(k_prime_of(&cusp(1, 4), 4), 1);
    }

    #[test]
    fn root_powers_are_exact_up_to_large_order() {
        // (e(j/m))^m = 1 exactly for all m up to 10^4.
        for m in (1..=10_000i64).step_by(97) {
            let j = (m / 3).max(1);
            let z = RootOfUnity::new(j, m).unwrap();
            assert!(z.pow(m).is_one(), "m = {m}");
        }
        assert!(RootOfUnity::new(9_999, 10_000)
            .unwrap()
            .pow(10_000)
            .is_one());
    }

    proptest! {
        #[test]
        fn pochhammer_multiplicativity(
            sn in 0i64..30, sd in 1i64..12,
            tn in 0i64..30, td in 1i64..12,
            n in 0usize..20, m in 0usize..20,
        ) {
            let start = RootOfUnity::new(sn, sd).unwrap();
            let step = RootOfUnity::new(tn, td).unwrap();
            let whole = pochhammer_rou(start, step, n + m);
            let first = pochhammer_rou(start, step, n);
            let rest = pochhammer_rou(start.mul(step.pow(n as i64)), step, m);
            let composed = first.compose(&rest);
            prop_assert_eq!(whole.vanishing_order, composed.vanishing_order);
            prop_assert!((whole.unit_part - composed.unit_part).norm()
                <= 1e-16 * (1.0 + 500.0 * whole.unit_part.norm()));
        }

        #[test]
        fn fraction_add_stays_reduced(a in -200i64..200, b in 1i64..40, c in -200i64..200, d in 1i64..40) {
            let f = Fraction::new(a, b).unwrap().add(Fraction::new(c, d).unwrap());
            prop_assert!(f.denom() >= 1);
            prop_assert_eq!(f.numer().gcd(&f.denom()), 1);
        }
    }
}
