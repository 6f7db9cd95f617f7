//! The q-series layer: the universal mock theta function g2 and its
//! companions, the Appell-Lerch sum, the bilateral-side functions L and M,
//! the three-term theta expression T, and the two shifted corrections t and m.
//!
//! Series are summed termwise with incremental Pochhammer products. Every
//! denominator factor is checked against a pole threshold before use, so
//! radial paths that approach a genuine pole fail with a structured error
//! instead of silently blowing up. Fractional powers of q and zeta are always
//! computed from the (z, tau) coordinates, never from principal roots of the
//! complex values.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    k_prime_of, pochhammer_radial, specialized_roots, Cusp, RootOfUnity, SpecParams,
};
use crate::modular::{
    cexp_scaled, e2pi, eta_scaled, k_fn_scaled, theta_scaled, Scaled, POLE_EPS, TRUNC_CAP,
};

/// Termination contract for series evaluation.
#[derive(Clone, Copy, Debug)]
pub struct SeriesAccuracy {
    pub tolerance: f64,
    pub max_terms: usize,
}

impl SeriesAccuracy {
    pub fn new(tolerance: f64, max_terms: usize) -> Result<Self> {
        if !(tolerance >= 1e-15) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be >= 1e-15, got {tolerance}"
            )));
        }
        if max_terms == 0 || max_terms > 1_000_000 {
            return Err(Error::InvalidConfig(format!(
                "max_terms must be in 1..=10^6, got {max_terms}"
            )));
        }
        Ok(SeriesAccuracy {
            tolerance,
            max_terms,
        })
    }
}

impl Default for SeriesAccuracy {
    fn default() -> Self {
        SeriesAccuracy {
            tolerance: 1e-14,
            max_terms: 200_000,
        }
    }
}

/// Which modular correction is subtracted before taking the radial limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CorrectionId {
    /// The three-term theta expression T.
    MortensonT,
    /// No correction: the series terminates at the cusp.
    None,
    /// The shifted correction t.
    SmallT,
    /// The doubly-shifted correction m = t + i T(shifted).
    SmallM,
}

impl std::fmt::Display for CorrectionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CorrectionId::MortensonT => "MortensonT",
            CorrectionId::None => "None",
            CorrectionId::SmallT => "SmallT",
            CorrectionId::SmallM => "SmallM",
        };
        write!(f, "{s}")
    }
}

/// Tracks a termwise sum with a streak-based stopping rule: stop once the
/// last few terms are all below tolerance relative to the running scale.
struct TermSum {
    sum: Complex64,
    scale: f64,
    streak: usize,
    tol: f64,
}

impl TermSum {
    fn new(tol: f64) -> Self {
        TermSum {
            sum: Complex64::new(0.0, 0.0),
            scale: 1.0,
            streak: 0,
            tol,
        }
    }

    /// Returns true once the tail is certified below tolerance.
    fn push(&mut self, term: Complex64) -> bool {
        self.sum += term;
        self.scale = self.scale.max(self.sum.norm());
        if term.norm() < self.tol * self.scale {
            self.streak += 1;
        } else {
            self.streak = 0;
        }
        self.streak >= 4
    }
}

/// g2(zeta; q) = sum_{n>=0} (-q)_n q^{n(n+1)/2} / ((zeta)_{n+1} (zeta^{-1} q)_{n+1}).
pub fn g2_series(zeta: Complex64, q: Complex64, acc: &SeriesAccuracy) -> Result<Complex64> {
    if q.norm() >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "|q| must be < 1, got {}",
            q.norm()
        )));
    }
    let zeta_inv = zeta.inv();
    let check = |factor: Complex64, context: &'static str, n: usize| -> Result<Complex64> {
        if factor.norm() < POLE_EPS {
            Err(Error::PoleProximity {
                context,
                n: n as i64,
                magnitude: factor.norm(),
            })
        } else {
            Ok(factor)
        }
    };

    let one = Complex64::new(1.0, 0.0);
    let mut num = one; // (-q)_n
    let mut den1 = check(one - zeta, "g2 denominator (zeta)_{n+1}", 0)?;
    let mut den2 = check(one - zeta_inv * q, "g2 denominator (zeta^{-1} q)_{n+1}", 0)?;
    let mut qpow = one; // q^{n(n+1)/2}
    let mut qn1 = q; // q^{n+1}
    let mut acc_sum = TermSum::new(acc.tolerance);
    for n in 0..acc.max_terms {
        let term = num * qpow / (den1 * den2);
        if acc_sum.push(term) {
            return Ok(acc_sum.sum);
        }
        num *= one + qn1;
        den1 *= check(one - zeta * qn1, "g2 denominator (zeta)_{n+1}", n + 1)?;
        qpow *= qn1;
        qn1 *= q;
        den2 *= check(
            one - zeta_inv * qn1,
            "g2 denominator (zeta^{-1} q)_{n+1}",
            n + 2,
        )?;
    }
    Err(Error::Truncation {
        context: "g2 series",
        max_terms: acc.max_terms,
    })
}

/// The bilateral Appell-Lerch sum
/// A(zeta; q) = sum_{n in Z} (-1)^n q^{3n(n+1)/2} / (1 + zeta q^n).
pub fn appell_sum(zeta: Complex64, q: Complex64, acc: &SeriesAccuracy) -> Result<Complex64> {
    if q.norm() >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "|q| must be < 1, got {}",
            q.norm()
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let mut total = Complex64::new(0.0, 0.0);
    for dir in [1i64, -1] {
        let mut acc_sum = TermSum::new(acc.tolerance * 0.5);
        let mut n: i64 = if dir == 1 { 0 } else { -1 };
        let mut qpow = one; // q^{3n(n+1)/2}: zero exponent at n = 0 and n = -1
        let mut qn = if dir == 1 { one } else { q.inv() }; // q^n
        let mut converged = false;
        for _ in 0..acc.max_terms {
            let den = one + zeta * qn;
            if den.norm() < POLE_EPS {
                return Err(Error::PoleProximity {
                    context: "appell denominator 1 + zeta q^n",
                    n,
                    magnitude: den.norm(),
                });
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            if acc_sum.push(sign * qpow / den) {
                converged = true;
                break;
            }
            if dir == 1 {
                // exponent 3n(n+1)/2 grows by 3(n+1) going to n+1
                n += 1;
                qpow *= qn.powi(3) * q.powi(3);
                qn *= q;
            } else {
                // exponent grows by 3|n| going from n to n-1
                qpow *= qn.powi(-3);
                n -= 1;
                qn /= q;
            }
        }
        if !converged {
            return Err(Error::Truncation {
                context: "appell bilateral sum",
                max_terms: acc.max_terms,
            });
        }
        total += acc_sum.sum;
    }
    Ok(total)
}

/// L(zeta; q) = (1/2) sum_{n>=0} q^n (zeta^{-1} q, zeta; q)_n / (-q; q)_n.
pub fn l_series(zeta: Complex64, q: Complex64, acc: &SeriesAccuracy) -> Result<Complex64> {
    if q.norm() >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "|q| must be < 1, got {}",
            q.norm()
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let zeta_inv = zeta.inv();
    let mut num = one; // (zeta^{-1} q, zeta; q)_n
    let mut den = one; // (-q)_n
    let mut qn = one; // q^n
    let mut acc_sum = TermSum::new(acc.tolerance);
    for n in 0..acc.max_terms {
        if acc_sum.push(qn * num / den) {
            return Ok(0.5 * acc_sum.sum);
        }
        // advance products from n to n+1
        num *= (one - zeta_inv * q * qn) * (one - zeta * qn);
        let dfac = one + q * qn;
        if dfac.norm() < POLE_EPS {
            return Err(Error::PoleProximity {
                context: "l_series denominator (-q)_n",
                n: n as i64 + 1,
                magnitude: dfac.norm(),
            });
        }
        den *= dfac;
        qn *= q;
    }
    Err(Error::Truncation {
        context: "L series",
        max_terms: acc.max_terms,
    })
}

/// The three specialized Pochhammer products of the n-th term, carrying the
/// per-factor radial decay rates: X-product, Y-product with base R, and the
/// (-R; R) product. Factor exponents: A + Bj, (B - A) + Bj, and B + Bj.
fn term_products(
    params: &SpecParams,
    cusp: &Cusp,
    n_x: usize,
    n_d: usize,
) -> (
    crate::exact::RadialProduct,
    crate::exact::RadialProduct,
    crate::exact::RadialProduct,
) {
    let (x, y, r) = specialized_roots(params, cusp);
    let minus_r = RootOfUnity::minus_one().mul(r);
    let (big_a, big_b) = (params.big_a(), params.big_b());
    let px = pochhammer_radial(x, r, big_a, big_b, n_x);
    let py = pochhammer_radial(y, r, big_b - big_a, big_b, n_x);
    let pd = pochhammer_radial(minus_r, r, big_b, big_b, n_d);
    (px, py, pd)
}

/// One term of the terminating bilateral-side sum at a pole-set cusp:
/// (1/2) zeta_k^{hBn} (X, Y; R)_n / (-R; R)_n, with exactly-zero terms
/// recorded as zero. Terms where numerator and denominator vanish to the
/// same order pick up the ratio of the factors' linear decay rates. A
/// negative net vanishing order means the cusp was misclassified and
/// yields an error.
pub fn l_finite_terms(params: &SpecParams, cusp: &Cusp) -> Result<Vec<Complex64>> {
    let k_prime = k_prime_of(cusp, params.big_b());
    let r = specialized_roots(params, cusp).2;
    let mut terms = Vec::with_capacity(k_prime as usize);
    for n in 0..k_prime as usize {
        let (px, py, pd) = term_products(params, cusp, n, n);
        let num = px.compose(&py);
        let net = num.vanishing_order as i64 - pd.vanishing_order as i64;
        if net < 0 {
            return Err(Error::ClassificationViolation { n, net_order: net });
        }
        if net > 0 {
            terms.push(Complex64::new(0.0, 0.0));
        } else {
            if num.zero_rate || pd.zero_rate {
                return Err(Error::Internal(format!(
                    "term {n} has a vanishing factor that is constant along the path"
                )));
            }
            let rate = num.rate / pd.rate;
            terms.push(0.5 * rate * r.pow(n as i64).to_complex() * num.unit_part / pd.unit_part);
        }
    }
    Ok(terms)
}

/// Finite value of L at a pole-set cusp (the series terminates there).
pub fn l_finite(params: &SpecParams, cusp: &Cusp) -> Result<Complex64> {
    Ok(l_finite_terms(params, cusp)?.into_iter().sum())
}

/// Terms of the terminating value of g2 itself at a cusp outside the pole
/// set with ord_2(k) > ord_2(B):
/// zeta_k^{hBn(n+1)/2} (-R; R)_n / ((X, Y; R)_{n+1}), n < k'/2.
pub fn g2_terminating_terms(params: &SpecParams, cusp: &Cusp) -> Result<Vec<Complex64>> {
    let k_prime = k_prime_of(cusp, params.big_b());
    if k_prime % 2 != 0 {
        return Err(Error::Internal(format!(
            "terminating sum needs even k', got {k_prime}"
        )));
    }
    let r = specialized_roots(params, cusp).2;
    let mut terms = Vec::with_capacity(k_prime as usize / 2);
    for n in 0..(k_prime / 2) as usize {
        let (px, py, pd) = term_products(params, cusp, n + 1, n);
        let den = px.compose(&py);
        if den.vanishing_order > 0 {
            return Err(Error::ClassificationViolation {
                n,
                net_order: -(den.vanishing_order as i64),
            });
        }
        let num = if pd.vanishing_order > 0 {
            Complex64::new(0.0, 0.0)
        } else {
            pd.unit_part
        };
        let exponent = (n as i64) * (n as i64 + 1) / 2;
        terms.push(r.pow(exponent).to_complex() * num / den.unit_part);
    }
    Ok(terms)
}

/// M(zeta; q) = -(i/2) zeta^{1/2} q^{-1/8} theta(z; tau) A(zeta; q)
///            / ((q)_inf (q^2; q^2)_inf),
/// evaluated on the (z, tau) cover so the half-power branches are fixed:
/// zeta = e(z), q = e(tau).
pub fn m_fn(z: Complex64, tau: Complex64, acc: &SeriesAccuracy) -> Result<Complex64> {
    let zeta = e2pi(z);
    let q = e2pi(tau);
    let appell = appell_sum(zeta, q, acc)?;
    let th = theta_scaled(z, tau)?;
    // (q)_inf = eta(tau) e(-tau/24), (q^2; q^2)_inf = eta(2 tau) e(-tau/12)
    let pinf = eta_scaled(tau)?.mul_c(e2pi(-tau / 24.0));
    let pinf2 = eta_scaled(2.0 * tau)?.mul_c(e2pi(-tau / 12.0));
    let pre = cexp_scaled(Complex64::new(0.0, std::f64::consts::TAU) * (z / 2.0 - tau / 8.0))
        .mul_c(Complex64::new(0.0, -0.5));
    Ok(pre.mul(th).mul_c(appell).div(pinf.mul(pinf2)).to_complex())
}

/// The three-term theta expression T(zeta; q) on the (z, tau) cover:
///
/// ```text
/// T = -i eta(2t)^4 / (zeta eta(t)^2 theta(2z; 2t))
///     - i eta(2t)^10 theta(2z + 1/2; 2t)
///         / (2 zeta^2 q^{1/4} eta(t)^4 eta(4t)^4 theta(2z; 2t) theta(2z + t + 1/2; 2t))
///     - i eta(2t)^4 theta(z; t)
///         / (2 q^{1/4} zeta^2 eta(4t)^2 theta(z + 1/2; t) theta(2z + t + 1/2; 2t))
/// ```
pub fn t_mortenson(z: Complex64, tau: Complex64) -> Result<Complex64> {
    Ok(t_mortenson_with_scale(z, tau)?.0)
}

/// T together with the largest term magnitude, which bounds the rounding
/// noise left in the assembled value after internal cancellation.
pub(crate) fn t_mortenson_with_scale(z: Complex64, tau: Complex64) -> Result<(Complex64, f64)> {
    let half = Complex64::new(0.5, 0.0);
    let eta1 = eta_scaled(tau)?;
    let eta2 = eta_scaled(2.0 * tau)?;
    let eta4 = eta_scaled(4.0 * tau)?;
    let th_2z = nonzero(
        theta_scaled(2.0 * z, 2.0 * tau)?,
        "T term 1: theta(2z; 2tau)",
    )?;
    let th_2z_half = theta_scaled(2.0 * z + half, 2.0 * tau)?;
    let th_mixed = nonzero(
        theta_scaled(2.0 * z + tau + half, 2.0 * tau)?,
        "T terms 2-3: theta(2z + tau + 1/2; 2tau)",
    )?;
    let th_z = theta_scaled(z, tau)?;
    let th_z_half = nonzero(
        theta_scaled(z + half, tau)?,
        "T term 3: theta(z + 1/2; tau)",
    )?;

    let zeta = cexp_scaled(Complex64::new(0.0, std::f64::consts::TAU) * z);
    let zeta2 = zeta.powu(2);
    let q_quarter = cexp_scaled(Complex64::new(0.0, std::f64::consts::PI) * tau / 2.0);
    let minus_i = Complex64::new(0.0, -1.0);

    let term1 = eta2
        .powu(4)
        .mul_c(minus_i)
        .div(zeta.mul(eta1.powu(2)).mul(th_2z));
    let term2 = eta2.powu(10).mul(th_2z_half).mul_c(minus_i).div(
        zeta2
            .mul(q_quarter)
            .mul(eta1.powu(4))
            .mul(eta4.powu(4))
            .mul(th_2z)
            .mul(th_mixed)
            .mul_c(Complex64::new(2.0, 0.0)),
    );
    let term3 = eta2.powu(4).mul(th_z).mul_c(minus_i).div(
        q_quarter
            .mul(zeta2)
            .mul(eta4.powu(2))
            .mul(th_z_half)
            .mul(th_mixed)
            .mul_c(Complex64::new(2.0, 0.0)),
    );
    let scale = term1
        .to_complex()
        .norm()
        .max(term2.to_complex().norm())
        .max(term3.to_complex().norm());
    Ok((term1.add(term2).add(term3).to_complex(), scale))
}

fn nonzero(s: Scaled, context: &'static str) -> Result<Scaled> {
    if s.is_zero() {
        Err(Error::PoleProximity {
            context,
            n: 0,
            magnitude: 0.0,
        })
    } else {
        Ok(s)
    }
}

/// The shifted correction
/// t(zeta; q) = K(z; tau) - i K(z + 1/4; tau + 1/2)
///              + i q^{-1/4} Theta(2z, tau, 1/2; 2 tau).
pub fn t_correction(z: Complex64, tau: Complex64) -> Result<Complex64> {
    Ok(t_correction_with_scale(z, tau)?.0)
}

pub(crate) fn t_correction_with_scale(z: Complex64, tau: Complex64) -> Result<(Complex64, f64)> {
    let quarter = Complex64::new(0.25, 0.0);
    let half = Complex64::new(0.5, 0.0);
    let k1 = k_fn_scaled(z, tau)?;
    let k2 = k_fn_scaled(z + quarter, tau + half)?;
    let big = crate::modular::big_theta(2.0 * z, tau, half, 2.0 * tau)?;
    let i = Complex64::new(0.0, 1.0);
    let theta_piece =
        cexp_scaled(Complex64::new(0.0, -std::f64::consts::PI) * tau / 2.0).mul_c(i * big);
    let scale = k1
        .to_complex()
        .norm()
        .max(k2.to_complex().norm())
        .max(theta_piece.to_complex().norm());
    Ok((k1.add(k2.mul_c(-i)).add(theta_piece).to_complex(), scale))
}

/// The doubly-shifted correction for the specialized family,
/// m = t(zeta_b^a q^A; q^B) + i T(i zeta_b^a q^A; -q^B), realized as the
/// quarter/half shifts z -> z + 1/4, tau -> tau + 1/2 on the cover. Here
/// `tau_prime` is the cover coordinate of q, i.e. q = e(tau_prime).
pub fn m_correction(params: &SpecParams, tau_prime: Complex64) -> Result<Complex64> {
    Ok(m_correction_with_scale(params, tau_prime)?.0)
}

pub(crate) fn m_correction_with_scale(
    params: &SpecParams,
    tau_prime: Complex64,
) -> Result<(Complex64, f64)> {
    let (z, tau) = specialized_cover(params, tau_prime);
    let (t_part, t_scale) = t_correction_with_scale(z, tau)?;
    let (t_mort, mort_scale) = t_mortenson_with_scale(
        z + Complex64::new(0.25, 0.0),
        tau + Complex64::new(0.5, 0.0),
    )?;
    Ok((
        t_part + Complex64::new(0.0, 1.0) * t_mort,
        t_scale.max(mort_scale),
    ))
}

/// The cover coordinates (z, tau) = (a/b + A tau', B tau') of the
/// specialization g2(zeta_b^a q^A; q^B) at q = e(tau').
pub fn specialized_cover(params: &SpecParams, tau_prime: Complex64) -> (Complex64, Complex64) {
    let z = Complex64::new(params.zeta_pow().as_f64(), 0.0) + params.big_a() as f64 * tau_prime;
    let tau = params.big_b() as f64 * tau_prime;
    (z, tau)
}

/// f(q) = sum_{n>=0} q^{n^2} / (-q)_n^2.
pub fn f_series(q: Complex64, acc: &SeriesAccuracy) -> Result<Complex64> {
    if q.norm() >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "|q| must be < 1, got {}",
            q.norm()
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let mut den = one; // (-q)_n
    let mut qsq = one; // q^{n^2}
    let mut qn = one; // q^n
    let mut acc_sum = TermSum::new(acc.tolerance);
    for n in 0..acc.max_terms {
        if acc_sum.push(qsq / (den * den)) {
            return Ok(acc_sum.sum);
        }
        qsq *= qn * qn * q; // q^{(n+1)^2} = q^{n^2} q^{2n+1}
        qn *= q;
        let dfac = one + qn;
        if dfac.norm() < POLE_EPS {
            return Err(Error::PoleProximity {
                context: "f denominator (-q)_n",
                n: n as i64 + 1,
                magnitude: dfac.norm(),
            });
        }
        den *= dfac;
    }
    Err(Error::Truncation {
        context: "f series",
        max_terms: acc.max_terms,
    })
}

/// b(q) = (q)_inf / (-q)_inf^2.
pub fn b_product(q: Complex64, acc: &SeriesAccuracy) -> Result<Complex64> {
    if q.norm() >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "|q| must be < 1, got {}",
            q.norm()
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let mut prod = one;
    let mut qn = one;
    for n in 1..=acc.max_terms.min(TRUNC_CAP) {
        qn *= q;
        let dfac = one + qn;
        if dfac.norm() < POLE_EPS {
            return Err(Error::PoleProximity {
                context: "b denominator (-q)_inf",
                n: n as i64,
                magnitude: dfac.norm(),
            });
        }
        prod *= (one - qn) / (dfac * dfac);
        if qn.norm() < acc.tolerance && n > 4 {
            return Ok(prod);
        }
    }
    Err(Error::Truncation {
        context: "b product",
        max_terms: acc.max_terms,
    })
}

/// B(q) = sum_{n>=0} q^n (-q; q^2)_n / (q; q^2)_{n+1}.
pub fn big_b_series(q: Complex64, acc: &SeriesAccuracy) -> Result<Complex64> {
    if q.norm() >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "|q| must be < 1, got {}",
            q.norm()
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let check = |factor: Complex64, n: usize| -> Result<Complex64> {
        if factor.norm() < POLE_EPS {
            Err(Error::PoleProximity {
                context: "B denominator (q; q^2)_{n+1}",
                n: n as i64,
                magnitude: factor.norm(),
            })
        } else {
            Ok(factor)
        }
    };
    let mut num = one; // (-q; q^2)_n
    let mut den = check(one - q, 0)?; // (q; q^2)_{n+1}
    let mut qodd = q; // q^{2n+1}
    let mut qn = one; // q^n
    let mut acc_sum = TermSum::new(acc.tolerance);
    for n in 0..acc.max_terms {
        if acc_sum.push(qn * num / den) {
            return Ok(acc_sum.sum);
        }
        num *= one + qodd;
        qodd *= q * q;
        den *= check(one - qodd, n + 1)?;
        qn *= q;
    }
    Err(Error::Truncation {
        context: "B series",
        max_terms: acc.max_terms,
    })
}

/// f(q) in double-double arithmetic. Along radial paths into even-order
/// roots of unity the terms of f alternate with magnitudes far above the
/// sum, so plain f64 runs out around t = 0.03; this pushes the usable
/// window deep enough for the limit extrapolation.
pub(crate) fn f_series_dd(q: Complex64, acc: &SeriesAccuracy) -> Result<crate::dd::CDd> {
    use crate::dd::CDd;
    if q.norm() >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "|q| must be < 1, got {}",
            q.norm()
        )));
    }
    let q = CDd::from_f64(q.re, q.im);
    let mut den = CDd::ONE; // (-q)_n
    let mut qsq = CDd::ONE; // q^{n^2}
    let mut qn = CDd::ONE; // q^n
    let mut sum = CDd::ZERO;
    let mut scale = 1.0f64;
    let mut streak = 0;
    for n in 0..acc.max_terms {
        let term = qsq.div(den.mul(den));
        sum = sum.add(term);
        scale = scale.max(sum.norm_est());
        // The tail must sit below the double-double noise floor of the sum,
        // not below the caller's f64 tolerance: the value extracted later is
        // a near-complete cancellation against the modular companion.
        if term.norm_est() < 1e-29 * scale {
            streak += 1;
            if streak >= 4 {
                return Ok(sum);
            }
        } else {
            streak = 0;
        }
        qsq = qsq.mul(qn).mul(qn).mul(q);
        qn = qn.mul(q);
        let dfac = CDd::ONE.add(qn);
        if dfac.norm_est() < POLE_EPS {
            return Err(Error::PoleProximity {
                context: "f denominator (-q)_n",
                n: n as i64 + 1,
                magnitude: dfac.norm_est(),
            });
        }
        den = den.mul(dfac);
    }
    Err(Error::Truncation {
        context: "f series (double-double)",
        max_terms: acc.max_terms,
    })
}

/// b(q) in double-double arithmetic, for the same radial windows.
pub(crate) fn b_product_dd(q: Complex64, acc: &SeriesAccuracy) -> Result<crate::dd::CDd> {
    use crate::dd::CDd;
    if q.norm() >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "|q| must be < 1, got {}",
            q.norm()
        )));
    }
    let qd = CDd::from_f64(q.re, q.im);
    let mut prod = CDd::ONE;
    let mut qn = CDd::ONE;
    for n in 1..=acc.max_terms.min(TRUNC_CAP) {
        qn = qn.mul(qd);
        let dfac = CDd::ONE.add(qn);
        if dfac.norm_est() < POLE_EPS {
            return Err(Error::PoleProximity {
                context: "b denominator (-q)_inf",
                n: n as i64,
                magnitude: dfac.norm_est(),
            });
        }
        prod = prod.mul(CDd::ONE.sub(qn)).div(dfac.mul(dfac));
        if qn.norm_est() < 1e-32 && n > 4 {
            return Ok(prod);
        }
    }
    Err(Error::Truncation {
        context: "b product (double-double)",
        max_terms: acc.max_terms,
    })
}

/// f(q) - sign * b(q) with the subtraction carried out in double-double,
/// so the huge common growth of the two sides cancels before any rounding
/// back to f64.
pub(crate) fn watson_difference(
    q: Complex64,
    sign: f64,
    acc: &SeriesAccuracy,
) -> Result<Complex64> {
    use crate::dd::CDd;
    let f = f_series_dd(q, acc)?;
    let b = b_product_dd(q, acc)?;
    let s = CDd::from_f64(sign, 0.0);
    Ok(f.sub(b.mul(s)).to_complex())
}

/// N(q) = 2 q^{-1/2} eta(4 tau)^5 / eta(2 tau)^4 at q = e(tau).
pub fn n_quotient(tau: Complex64) -> Result<Complex64> {
    let num = eta_scaled(4.0 * tau)?
        .powu(5)
        .mul_c(Complex64::new(2.0, 0.0));
    let den = eta_scaled(2.0 * tau)?.powu(4);
    Ok(num
        .div(den)
        .mul(cexp_scaled(
            Complex64::new(0.0, -std::f64::consts::PI) * tau,
        ))
        .to_complex())
}
