//! Numerical evaluation of the Dedekind eta function, Jacobi's theta
//! function, the two-variable Appell-type mu function, and the theta
//! quotients built from them.
//!
//! Near the real axis every evaluation first reduces the period toward the
//! fundamental domain (translations tau -> tau + 1 and inversions
//! tau -> -1/tau, with the standard multipliers), so values stay accurate
//! along radial paths into rational boundary points. Intermediate factors can
//! exceed the double-precision exponent range there, so the internals carry
//! an explicit power-of-two exponent alongside each complex mantissa.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::unit_phase;

/// Hard cap on series/product length for all kernel evaluations.
pub(crate) const TRUNC_CAP: usize = 100_000;

/// Denominator factors smaller than this abort with a structured pole error.
pub(crate) const POLE_EPS: f64 = 1e-13;

const MAX_REDUCTIONS: usize = 4_000;

/// exp(2 pi i z).
pub fn e2pi(z: Complex64) -> Complex64 {
    (Complex64::new(0.0, std::f64::consts::TAU) * z).exp()
}

fn check_tau(tau: Complex64) -> Result<()> {
    if tau.im > 0.0 {
        Ok(())
    } else {
        Err(Error::NotUpperHalfPlane(tau.im))
    }
}

/// A point tau in the upper half-plane, optionally paired with an elliptic
/// variable z. Derived quantities: q = e(tau), zeta = e(z).
#[derive(Clone, Copy, Debug)]
pub struct ModularPoint {
    tau: Complex64,
    z: Option<Complex64>,
}

impl ModularPoint {
    pub fn new(tau: Complex64) -> Result<Self> {
        check_tau(tau)?;
        Ok(ModularPoint { tau, z: None })
    }

    pub fn with_z(tau: Complex64, z: Complex64) -> Result<Self> {
        check_tau(tau)?;
        Ok(ModularPoint { tau, z: Some(z) })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn z(&self) -> Option<Complex64> {
        self.z
    }

    pub fn q(&self) -> Complex64 {
        e2pi(self.tau)
    }

    pub fn zeta(&self) -> Option<Complex64> {
        self.z.map(e2pi)
    }
}

// ---------------------------------------------------------------------------
// Scaled complex arithmetic: value = mantissa * 2^exp.
// ---------------------------------------------------------------------------

/// Multiply a complex number by 2^k without intermediate overflow.
fn ldexp_c(mut c: Complex64, mut k: i64) -> Complex64 {
    while k > 600 {
        c *= 2f64.powi(600);
        k -= 600;
    }
    while k < -600 {
        c *= 2f64.powi(-600);
        k += 600;
    }
    c * 2f64.powi(k as i32)
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Scaled {
    m: Complex64,
    e: i64,
}

impl Scaled {
    pub(crate) fn new(c: Complex64) -> Self {
        Scaled { m: c, e: 0 }.renorm()
    }

    pub(crate) fn one() -> Self {
        Scaled {
            m: Complex64::new(1.0, 0.0),
            e: 0,
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.m.norm_sqr() == 0.0
    }

    fn renorm(self) -> Self {
        let n = self.m.norm();
        if n == 0.0 || !n.is_finite() {
            return Scaled { m: self.m, e: 0 };
        }
        let k = n.log2().floor() as i64;
        Scaled {
            m: ldexp_c(self.m, -k),
            e: self.e + k,
        }
    }

    pub(crate) fn mul(self, o: Scaled) -> Self {
        Scaled {
            m: self.m * o.m,
            e: self.e + o.e,
        }
        .renorm()
    }

    pub(crate) fn mul_c(self, c: Complex64) -> Self {
        self.mul(Scaled::new(c))
    }

    pub(crate) fn div(self, o: Scaled) -> Self {
        Scaled {
            m: self.m / o.m,
            e: self.e - o.e,
        }
        .renorm()
    }

    pub(crate) fn recip(self) -> Self {
        Scaled {
            m: self.m.inv(),
            e: -self.e,
        }
        .renorm()
    }

    pub(crate) fn neg(self) -> Self {
        Scaled {
            m: -self.m,
            e: self.e,
        }
    }

    pub(crate) fn add(self, o: Scaled) -> Self {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let d = self.e - o.e;
        if d >= 120 {
            self
        } else if d <= -120 {
            o
        } else if d >= 0 {
            Scaled {
                m: self.m + ldexp_c(o.m, -d),
                e: self.e,
            }
            .renorm()
        } else {
            Scaled {
                m: ldexp_c(self.m, d) + o.m,
                e: o.e,
            }
            .renorm()
        }
    }

    pub(crate) fn powu(self, n: u32) -> Self {
        let mut acc = Scaled::one();
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(base);
            }
        }
        acc
    }

    pub(crate) fn to_complex(self) -> Complex64 {
        ldexp_c(self.m, self.e)
    }
}

/// exp(w) in scaled form, valid for arbitrarily large |Re w|.
pub(crate) fn cexp_scaled(w: Complex64) -> Scaled {
    let k = (w.re / std::f64::consts::LN_2).floor();
    let r = w.re - k * std::f64::consts::LN_2;
    Scaled {
        m: Complex64::from_polar(r.exp(), w.im),
        e: k as i64,
    }
    .renorm()
}

// ---------------------------------------------------------------------------
// Dedekind eta.
// ---------------------------------------------------------------------------

/// Reduce tau toward the fundamental domain. Returns the reduced point and
/// the accumulated eta multiplier, so eta(tau0) = factor * eta(tau_red).
fn eta_reduce(tau: Complex64) -> Result<(Complex64, Scaled)> {
    let mut t = tau;
    let mut factor = Scaled::one();
    for _ in 0..MAX_REDUCTIONS {
        let n = t.re.round();
        if n != 0.0 {
            t.re -= n;
            // eta(t + n) = e(n/24) eta(t)
            factor = factor.mul_c(unit_phase(n as i64, 24));
        }
        if t.norm_sqr() >= 1.0 || t.im >= 0.6 {
            return Ok((t, factor));
        }
        // eta(t) = eta(-1/t) / sqrt(-i t)
        let root = (Complex64::new(0.0, -1.0) * t).sqrt();
        factor = factor.mul_c(root.inv());
        t = -t.inv();
    }
    Err(Error::Internal("eta reduction did not terminate".into()))
}

/// Pentagonal-number series for eta at a reduced point (Im tau >= 0.6).
fn eta_series(tau: Complex64) -> Complex64 {
    let q = e2pi(tau);
    let mut sum = Complex64::new(1.0, 0.0);
    // n and -n terms of sum_{n in Z} (-1)^n q^{n(3n-1)/2}
    for n in 1..64i32 {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let a = q.powi((n * (3 * n - 1) / 2) as i32);
        let b = q.powi((n * (3 * n + 1) / 2) as i32);
        let term = sign * (a + b);
        sum += term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    e2pi(tau / 24.0) * sum
}

pub(crate) fn eta_scaled(tau: Complex64) -> Result<Scaled> {
    check_tau(tau)?;
    let (t, factor) = eta_reduce(tau)?;
    Ok(factor.mul_c(eta_series(t)))
}

/// Dedekind eta, evaluated by modular reduction plus the pentagonal series.
pub fn eta(tau: Complex64) -> Result<Complex64> {
    Ok(eta_scaled(tau)?.to_complex())
}

// ---------------------------------------------------------------------------
// Jacobi theta.
// ---------------------------------------------------------------------------

/// Reduce (z, tau) for the odd Jacobi theta function. Returns the reduced
/// pair and a multiplier, so theta(z0; tau0) = factor * theta(z; tau).
fn theta_reduce(z0: Complex64, tau0: Complex64) -> Result<(Complex64, Complex64, Scaled)> {
    let mut z = z0;
    let mut t = tau0;
    let mut factor = Scaled::one();
    let mut done = false;
    for _ in 0..MAX_REDUCTIONS {
        let n = t.re.round();
        if n != 0.0 {
            t.re -= n;
            // theta(z; t + n) = e(n/8) theta(z; t)
            factor = factor.mul_c(unit_phase(n as i64, 8));
        }
        if t.norm_sqr() >= 1.0 || t.im >= 0.6 {
            done = true;
            break;
        }
        // theta(z; t) = theta(z/t; -1/t) / (-i sqrt(-i t) exp(pi i z^2 / t))
        let root = (Complex64::new(0.0, -1.0) * t).sqrt();
        let gauss = cexp_scaled(Complex64::new(0.0, std::f64::consts::PI) * z * z / t);
        factor = factor.div(gauss.mul_c(Complex64::new(0.0, -1.0) * root));
        z /= t;
        t = -t.inv();
    }
    if !done {
        return Err(Error::Internal("theta reduction did not terminate".into()));
    }
    // Quasi-period reduction of z: theta(z + m tau) = (-1)^m q^{-m^2/2} zeta^{-m} theta(z).
    let m = (z.im / t.im).round();
    if m != 0.0 {
        z -= m * t;
        let w = Complex64::new(0.0, -std::f64::consts::PI) * (m * m * t + 2.0 * m * z);
        let mut g = cexp_scaled(w);
        if (m as i64) % 2 != 0 {
            g = g.neg();
        }
        factor = factor.mul(g);
    }
    let n = z.re.round();
    if n != 0.0 {
        z.re -= n;
        if (n as i64) % 2 != 0 {
            factor = factor.neg();
        }
    }
    Ok((z, t, factor))
}

/// Triple product at a reduced point, in scaled arithmetic:
/// -i q^{1/8} zeta^{-1/2} (q)_inf (zeta)_inf (zeta^{-1} q)_inf.
fn theta_product(z: Complex64, tau: Complex64) -> Result<Scaled> {
    let q = e2pi(tau);
    let zeta = cexp_scaled(Complex64::new(0.0, std::f64::consts::TAU) * z);
    let zeta_inv = zeta.recip();
    // log2 magnitudes of zeta and q; after reduction lq < 0 and |lz| <= |lq|/2,
    // so all three product tails decay geometrically in log space.
    let lz = -std::f64::consts::TAU * z.im / std::f64::consts::LN_2;
    let lq = -std::f64::consts::TAU * tau.im / std::f64::consts::LN_2;

    let mut prod = cexp_scaled(Complex64::new(0.0, std::f64::consts::PI) * (tau / 4.0 - z))
        .mul_c(Complex64::new(0.0, -1.0));
    let mut qn = Complex64::new(1.0, 0.0); // q^n
    for n in 0..TRUNC_CAP {
        // (1 - q^{n+1}) (1 - zeta q^n) (1 - zeta^{-1} q^{n+1})
        let f1 = Scaled::one().add(zeta.mul_c(qn).neg());
        qn *= q;
        let f2 = Scaled::new(Complex64::new(1.0, 0.0) - qn);
        let f3 = Scaled::one().add(zeta_inv.mul_c(qn).neg());
        prod = prod.mul(f1).mul(f2).mul(f3);
        let nf = (n + 1) as f64;
        let tail = (lz + nf * lq).max(-lz + (nf + 1.0) * lq).max(nf * lq);
        if tail < -60.0 {
            return Ok(prod);
        }
    }
    Err(Error::Truncation {
        context: "theta triple product",
        max_terms: TRUNC_CAP,
    })
}

pub(crate) fn theta_scaled(z: Complex64, tau: Complex64) -> Result<Scaled> {
    check_tau(tau)?;
    let (zr, tr, factor) = theta_reduce(z, tau)?;
    Ok(factor.mul(theta_product(zr, tr)?))
}

/// Jacobi's odd theta function
/// theta(z; tau) = -i q^{1/8} zeta^{-1/2} (q)_inf (zeta)_inf (zeta^{-1} q)_inf,
/// with zeta^{-1/2} = e(-z/2) fixed by z. Evaluation reduces tau and z by the
/// transformation and quasi-periodicity laws first.
pub fn theta(z: Complex64, tau: Complex64) -> Result<Complex64> {
    Ok(theta_scaled(z, tau)?.to_complex())
}

/// theta'(0; tau) = -2 pi eta(tau)^3.
pub fn theta_prime_zero(tau: Complex64) -> Result<Complex64> {
    Ok(theta_prime_zero_scaled(tau)?.to_complex())
}

pub(crate) fn theta_prime_zero_scaled(tau: Complex64) -> Result<Scaled> {
    Ok(eta_scaled(tau)?
        .powu(3)
        .mul_c(Complex64::new(-2.0 * std::f64::consts::PI, 0.0)))
}

// ---------------------------------------------------------------------------
// Zwegers' mu function and the shift quotient.
// ---------------------------------------------------------------------------

/// Appell-type mu function
/// mu(z1, z2; tau) = e(z1/2)/theta(z2) * sum_{n in Z} (-b)^n q^{n(n+1)/2} / (1 - a q^n)
/// with a = e(z1), b = e(z2). Errors when z1 or z2 degenerates onto the
/// period lattice.
pub fn mu(z1: Complex64, z2: Complex64, tau: Complex64) -> Result<Complex64> {
    check_tau(tau)?;
    let th2 = theta_scaled(z2, tau)?;
    if th2.is_zero() {
        return Err(Error::PoleProximity {
            context: "mu: theta(z2) vanishes",
            n: 0,
            magnitude: 0.0,
        });
    }
    let a = e2pi(z1);
    let b = e2pi(z2);
    let q = e2pi(tau);

    let mut sum = Complex64::new(0.0, 0.0);
    // Forward branch n >= 0 and backward branch n <= -1, each until the
    // quadratic q-power forces the tail below the working tolerance.
    for dir in [1i64, -1] {
        let mut streak = 0;
        let mut n: i64 = if dir == 1 { 0 } else { -1 };
        let mut qq = if dir == 1 {
            Complex64::new(1.0, 0.0) // q^{n(n+1)/2} at n = 0
        } else {
            Complex64::new(1.0, 0.0) // at n = -1 the exponent is also 0
        };
        let mut bp = if dir == 1 {
            Complex64::new(1.0, 0.0)
        } else {
            (-b).inv()
        };
        let mut qn = if dir == 1 {
            Complex64::new(1.0, 0.0)
        } else {
            q.inv()
        };
        for step in 0..TRUNC_CAP {
            let den = Complex64::new(1.0, 0.0) - a * qn;
            if den.norm() < POLE_EPS {
                return Err(Error::PoleProximity {
                    context: "mu denominator 1 - a q^n",
                    n,
                    magnitude: den.norm(),
                });
            }
            let term = bp * qq / den;
            sum += term;
            if term.norm() < 1e-17 * (1.0 + sum.norm()) {
                streak += 1;
                if streak >= 3 && step > 2 {
                    break;
                }
            } else {
                streak = 0;
            }
            if step + 1 == TRUNC_CAP {
                return Err(Error::Truncation {
                    context: "mu bilateral sum",
                    max_terms: TRUNC_CAP,
                });
            }
            if dir == 1 {
                n += 1;
                qq *= q.powi(n as i32); // exponent grows by n
                bp *= -b;
                qn *= q;
            } else {
                n -= 1;
                qq *= q.powi((-n - 1) as i32);
                bp /= -b;
                qn /= q;
            }
        }
    }
    Ok(e2pi(z1 / 2.0) * sum / th2.to_complex())
}

/// The quotient measuring the shift defect of mu:
/// Theta(z1, z2, z; tau) = (1/2 pi i) theta'(0) theta(z1+z2+z) theta(z)
///   / (theta(z1) theta(z2) theta(z1+z) theta(z2+z)).
pub fn big_theta(z1: Complex64, z2: Complex64, z: Complex64, tau: Complex64) -> Result<Complex64> {
    check_tau(tau)?;
    let num = theta_prime_zero_scaled(tau)?
        .mul(theta_scaled(z1 + z2 + z, tau)?)
        .mul(theta_scaled(z, tau)?);
    let mut den = Scaled::new(Complex64::new(0.0, std::f64::consts::TAU));
    for (name, w) in [
        ("theta(z1)", z1),
        ("theta(z2)", z2),
        ("theta(z1+z)", z1 + z),
        ("theta(z2+z)", z2 + z),
    ] {
        let th = theta_scaled(w, tau)?;
        if th.is_zero() {
            return Err(Error::PoleProximity {
                context: match name {
                    "theta(z1)" => "big_theta: theta(z1) vanishes",
                    "theta(z2)" => "big_theta: theta(z2) vanishes",
                    "theta(z1+z)" => "big_theta: theta(z1+z) vanishes",
                    _ => "big_theta: theta(z2+z) vanishes",
                },
                n: 0,
                magnitude: 0.0,
            });
        }
        den = den.mul(th);
    }
    Ok(num.div(den).to_complex())
}

/// K(z; tau) = eta(2 tau)^4 / (i zeta eta(tau)^2 theta(2z; 2 tau)),
/// with zeta = e(z).
pub fn k_fn(z: Complex64, tau: Complex64) -> Result<Complex64> {
    Ok(k_fn_scaled(z, tau)?.to_complex())
}

pub(crate) fn k_fn_scaled(z: Complex64, tau: Complex64) -> Result<Scaled> {
    check_tau(tau)?;
    let th = theta_scaled(2.0 * z, 2.0 * tau)?;
    if th.is_zero() {
        return Err(Error::PoleProximity {
            context: "k_fn: theta(2z; 2tau) vanishes",
            n: 0,
            magnitude: 0.0,
        });
    }
    let num = eta_scaled(2.0 * tau)?.powu(4);
    let den = cexp_scaled(Complex64::new(0.0, std::f64::consts::TAU) * z)
        .mul_c(Complex64::new(0.0, 1.0))
        .mul(eta_scaled(tau)?.powu(2))
        .mul(th);
    Ok(num.div(den))
}
