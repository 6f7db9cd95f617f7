//! Eta quotients: rational q-power prefactor times a product of rescaled
//! eta functions, with exact cusp orders and a small text format.
//!
//! Text format, used by the CLI:
//!
//! ```text
//! q^(-1/2)*eta(4)^5*eta(2)^-4
//! ```
//!
//! Cusp-order convention: the order at h/k is the decay exponent lambda such
//! that |F(h/k + it)| behaves like exp(-2 pi lambda / (k^2 t)) as t -> 0+,
//! normalized so that eta(n tau) has order (n,k)^2 / (24 n). A q-power
//! prefactor has modulus tending to 1 on the radial path, so it contributes
//! nothing to the order; it only enters the value. Positive order means the
//! quotient vanishes at the cusp, negative means it has a pole.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::exact::{Cusp, Fraction};
use crate::modular::{e2pi, eta_scaled, Scaled};

#[derive(Clone, Debug, PartialEq)]
pub struct EtaQuotient {
    /// (scale n, exponent r) pairs with distinct positive scales.
    factors: Vec<(i64, i64)>,
    /// Rational exponent p of the q^p prefactor.
    q_power: Fraction,
}

impl EtaQuotient {
    pub fn new(factors: Vec<(i64, i64)>, q_power: Fraction) -> Result<Self> {
        let mut merged: Vec<(i64, i64)> = Vec::new();
        for (n, r) in factors {
            if n <= 0 {
                return Err(Error::InvalidConfig(format!(
                    "eta scale must be positive, got {n}"
                )));
            }
            match merged.iter_mut().find(|(m, _)| *m == n) {
                Some((_, e)) => *e += r,
                None => merged.push((n, r)),
            }
        }
        merged.sort_by_key(|&(n, _)| n);
        Ok(EtaQuotient {
            factors: merged,
            q_power,
        })
    }

    pub fn factors(&self) -> &[(i64, i64)] {
        &self.factors
    }

    pub fn q_power(&self) -> Fraction {
        self.q_power
    }

    /// q^p * prod_n eta(n tau)^{r_n}.
    pub fn value(&self, tau: Complex64) -> Result<Complex64> {
        Ok(self.value_scaled(tau)?.to_complex())
    }

    pub(crate) fn value_scaled(&self, tau: Complex64) -> Result<Scaled> {
        let mut acc = Scaled::new(e2pi(tau * self.q_power.as_f64()));
        for &(n, r) in &self.factors {
            if r == 0 {
                continue;
            }
            let base = eta_scaled(tau * n as f64)?;
            let pow = base.powu(r.unsigned_abs() as u32);
            acc = if r > 0 { acc.mul(pow) } else { acc.div(pow) };
        }
        Ok(acc)
    }

    /// Exact order of vanishing at the cusp h/k: sum of r (n,k)^2 / (24 n)
    /// over the factors. See the module docs for the normalization; the
    /// q-power prefactor contributes 0.
    pub fn cusp_order(&self, cusp: &Cusp) -> Fraction {
        let k = cusp.k();
        let mut order = Fraction::zero();
        for &(n, r) in &self.factors {
            let g = n.gcd(&k);
            order = order.add(Fraction::new(r * g * g, 24 * n).expect("n > 0"));
        }
        order
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.q_power.is_zero() {
            write!(f, "q^({})", self.q_power)?;
            first = false;
        }
        for &(n, r) in &self.factors {
            if !first {
                write!(f, "*")?;
            }
            write!(f, "eta({n})^{r}")?;
            first = false;
        }
        if first {
            write!(f, "q^(0/1)")?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.pos,
            message: message.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        while self.rest().starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    fn integer(&mut self) -> Result<i64> {
        let start = self.pos;
        if self.eat("-") || self.eat("+") {}
        while self.rest().starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start || self.src[start..self.pos].ends_with(['-', '+']) {
            self.pos = start;
            return self.err("expected integer");
        }
        self.src[start..self.pos]
            .parse()
            .or_else(|_| self.err("integer out of range"))
    }

    fn rational(&mut self) -> Result<Fraction> {
        let num = self.integer()?;
        if self.eat("/") {
            let den_pos = self.pos;
            let den = self.integer()?;
            if den == 0 {
                self.pos = den_pos;
                return self.err("zero denominator");
            }
            Fraction::new(num, den)
        } else {
            Fraction::new(num, 1)
        }
    }
}

impl FromStr for EtaQuotient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0 };
        let mut factors = Vec::new();
        let mut q_power = Fraction::zero();
        loop {
            p.skip_ws();
            if p.eat("q") {
                p.expect("^")?;
                p.expect("(")?;
                q_power = q_power.add(p.rational()?);
                p.expect(")")?;
            } else if p.eat("eta") {
                p.expect("(")?;
                let scale_pos = p.pos;
                let n = p.integer()?;
                if n <= 0 {
                    p.pos = scale_pos;
                    return p.err("eta scale must be positive");
                }
                p.expect(")")?;
                let r = if p.eat("^") { p.integer()? } else { 1 };
                factors.push((n, r));
            } else {
                return p.err("expected `q^(...)` or `eta(...)`");
            }
            p.skip_ws();
            if p.eat("*") {
                continue;
            }
            if p.rest().is_empty() {
                break;
            }
            return p.err("expected `*` or end of input");
        }
        EtaQuotient::new(factors, q_power)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(n: i64, d: i64) -> Fraction {
        Fraction::new(n, d).unwrap()
    }

    fn n_quotient() -> EtaQuotient {
        "q^(-1/2)*eta(4)^5*eta(2)^-4".parse().unwrap()
    }

    #[test]
    fn parses_and_displays() {
        let q = n_quotient();
        assert_eq!(q.q_power(), frac(-1, 2));
        assert_eq!(q.factors(), &[(2, -4), (4, 5)]);
        assert_eq!(q.to_string(), "q^(-1/2)*eta(2)^-4*eta(4)^5");
        let rt: EtaQuotient = q.to_string().parse().unwrap();
        assert_eq!(rt, q);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = "q^(1/2)*eta(x)".parse::<EtaQuotient>().unwrap_err();
        match e {
            Error::Parse { position, .. } => assert_eq!(position, 12),
            other => panic!("unexpected error {other:?}"),
        }
        assert!("".parse::<EtaQuotient>().is_err());
        assert!("eta(0)^2".parse::<EtaQuotient>().is_err());
        assert!("eta(2)^2 eta(3)".parse::<EtaQuotient>().is_err());
    }

    #[test]
    fn value_matches_factor_by_factor() {
        use crate::modular::eta;
        let tau = Complex64::new(0.0, 1.0);
        let q = n_quotient();
        let direct =
            e2pi(-tau / 2.0) * eta(4.0 * tau).unwrap().powi(5) / eta(2.0 * tau).unwrap().powi(4);
        assert!((q.value(tau).unwrap() - direct).norm() < 1e-13 * direct.norm());
    }

    #[test]
    fn value_of_trivial_quotients() {
        let tau = Complex64::new(0.1, 0.7);
        let q = EtaQuotient::new(vec![(2, 0)], frac(-1, 2)).unwrap();
        let expect = e2pi(-tau / 2.0);
        assert!((q.value(tau).unwrap() - expect).norm() < 1e-14);
        let one = EtaQuotient::new(vec![(2, 4), (2, -4)], Fraction::zero()).unwrap();
        assert!((one.value(tau).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn cusp_orders() {
        let eta1 = EtaQuotient::new(vec![(1, 1)], Fraction::zero()).unwrap();
        assert_eq!(eta1.cusp_order(&Cusp::new(0, 1).unwrap()), frac(1, 24));

        // The correction quotient has a pole at every odd-k cusp.
        let n = n_quotient();
        for k in [1i64, 3, 5, 7, 9] {
            assert_eq!(n.cusp_order(&Cusp::new(1, k).unwrap()), frac(-1, 32));
        }

        // eta(4)^7 eta(1)^4 / (eta(2)^6 eta(8)^4) vanishes at odd k.
        let v: EtaQuotient = "eta(4)^7*eta(1)^4*eta(2)^-6*eta(8)^-4".parse().unwrap();
        for k in [1i64, 3, 5] {
            let ord = v.cusp_order(&Cusp::new(1, k).unwrap());
            assert!(ord.as_f64() > 0.0, "k = {k}: {ord}");
        }

        // K(tau; 2tau) as a quotient is cuspidal exactly at 4 | k.
        let kq: EtaQuotient = "q^(-1/2)*eta(4)^5*eta(2)^-4".parse().unwrap();
        for (k, cuspidal) in [(1i64, false), (2, false), (3, false), (4, true), (8, true)] {
            let ord = kq.cusp_order(&Cusp::new(1, k).unwrap());
            assert_eq!(ord.as_f64() > 0.0, cuspidal, "k = {k}: {ord}");
        }
    }

    #[test]
    fn declared_cuspidal_quotients_decay_radially() {
        // For quotients the order calls cuspidal, magnitudes decrease
        // monotonically below 1e-3 along the radial path.
        let kq = n_quotient();
        for &(h, k) in &[(1i64, 4i64), (3, 4), (1, 8)] {
            let cusp = Cusp::new(h, k).unwrap();
            assert!(kq.cusp_order(&cusp).as_f64() > 0.0);
            let mut prev = f64::INFINITY;
            let mut t = 0.2;
            while t >= 0.02 {
                let tau = Complex64::new(h as f64 / k as f64, t / std::f64::consts::TAU);
                let v = kq.value(tau).unwrap().norm();
                assert!(v < prev, "not decreasing at t = {t} for {h}/{k}");
                prev = v;
                t -= 0.02;
            }
            assert!(prev < 1e-3, "cusp {h}/{k}: final magnitude {prev}");
        }
    }
}
