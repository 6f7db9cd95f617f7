//! Radial limits of the specialized series g2(zeta_b^a q^A; q^B) at rational
//! boundary points: classification of each cusp into one of four cases, the
//! closed-form limit constant for the matching modular correction, numeric
//! verification by radial extrapolation, and batch sweeps.
//!
//! Case analysis, in priority order:
//!
//! * `DenominatorPole` - the cusp lies in the pole set; subtract the
//!   three-term theta expression T and the limit is a finite sum over n < k'.
//! * `EvenTerminating` - outside the pole set with ord_2(k) > ord_2(B); the
//!   series itself terminates, no correction.
//! * `ShiftedPole` - ord_2(k) <= ord_2(B) and the cusp lies in the shifted
//!   pole set; subtract m and evaluate the pole case at the shifted
//!   parameters, times i.
//! * `ShiftedTerminating` - remaining cusps; subtract t and evaluate the
//!   terminating case at the shifted parameters, times i.
//!
//! The shift sends h/k to h/k + 1/(2B) and a/b to a/b + 1/4 - A/(2B), both in
//! exact fraction arithmetic, and reuses the two unshifted engines.

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    in_q, in_q_prime, k2_of, k_prime_of, ord2, pochhammer_rou, pochhammer_rou_dd, rou_to_cdd, Cusp,
    Fraction, RootOfUnity, SpecParams,
};
use crate::modular::e2pi;
use crate::qseries::{
    g2_series, g2_terminating_terms, l_finite_terms, l_series, m_fn, specialized_cover,
    CorrectionId, SeriesAccuracy,
};

/// Which of the four limit formulas applies at a cusp.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    DenominatorPole,
    EvenTerminating,
    ShiftedPole,
    ShiftedTerminating,
}

impl CaseTag {
    /// The modular correction canonically attached to the case.
    pub fn correction(&self) -> CorrectionId {
        match self {
            CaseTag::DenominatorPole => CorrectionId::MortensonT,
            CaseTag::EvenTerminating => CorrectionId::None,
            CaseTag::ShiftedPole => CorrectionId::SmallM,
            CaseTag::ShiftedTerminating => CorrectionId::SmallT,
        }
    }
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseTag::DenominatorPole => "DenominatorPole",
            CaseTag::EvenTerminating => "EvenTerminating",
            CaseTag::ShiftedPole => "ShiftedPole",
            CaseTag::ShiftedTerminating => "ShiftedTerminating",
        };
        write!(f, "{s}")
    }
}

/// Closed-form radial limit: the case, the subtracted correction, the
/// constant as a finite sum of exactly evaluated terms, and the number of
/// terms the sum runs over (k' or k2').
#[derive(Clone, Debug)]
pub struct RadialLimitResult {
    pub case: CaseTag,
    pub correction: CorrectionId,
    pub constant: Complex64,
    pub terms: Vec<Complex64>,
    pub k_effective: i64,
}

/// Extrapolated numeric limit along the radial path q = e(h/k) e^{-t}.
#[derive(Clone, Debug)]
pub struct RadialEstimate {
    pub value: Complex64,
    pub error_estimate: f64,
    pub t_grid: Vec<f64>,
    pub samples: Vec<Complex64>,
    /// Grid points dropped because a series hit a pole there.
    pub dropped: Vec<f64>,
}

/// Outcome of one closed-form versus numeric verification.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub params: SpecParams,
    pub cusp: Cusp,
    pub closed: RadialLimitResult,
    pub numeric: RadialEstimate,
    pub abs_diff: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Classify a cusp. Pole-set membership wins; then the parity split on
/// ord_2(k) versus ord_2(B); then shifted pole-set membership.
pub fn classify(params: &SpecParams, cusp: &Cusp) -> CaseTag {
    if in_q(params, cusp) {
        CaseTag::DenominatorPole
    } else if ord2(cusp.k()) > ord2(params.big_b()) {
        CaseTag::EvenTerminating
    } else if in_q_prime(params, cusp) {
        CaseTag::ShiftedPole
    } else {
        CaseTag::ShiftedTerminating
    }
}

/// The exact parameter/cusp shift realizing the half-period move:
/// h/k -> h/k + 1/(2B), a/b -> a/b + 1/4 - A/(2B).
pub fn shifted_setup(params: &SpecParams, cusp: &Cusp) -> (SpecParams, Cusp) {
    let big_b = params.big_b();
    let half_step = Fraction::new(1, 2 * big_b).expect("B > 0");
    let shifted = cusp.fraction().add(half_step);
    let shifted_cusp = Cusp::new(shifted.numer(), shifted.denom()).expect("positive denominator");
    let shifted_zeta = params
        .zeta_pow()
        .add(Fraction::new(1, 4).unwrap())
        .sub(Fraction::new(params.big_a(), 2 * big_b).expect("B > 0"));
    (SpecParams::new(shifted_zeta, params.q_pow()), shifted_cusp)
}

/// Closed-form limit constant with its term list.
pub fn closed_form(params: &SpecParams, cusp: &Cusp) -> Result<RadialLimitResult> {
    let case = classify(params, cusp);
    let i = Complex64::new(0.0, 1.0);
    let (correction, terms, k_eff) = match case {
        CaseTag::DenominatorPole => {
            // -(1/2) sum: the negated terminating bilateral-side sum.
            let terms: Vec<Complex64> = l_finite_terms(params, cusp)?
                .into_iter()
                .map(|t| -t)
                .collect();
            (
                CorrectionId::MortensonT,
                terms,
                k_prime_of(cusp, params.big_b()),
            )
        }
        CaseTag::EvenTerminating => (
            CorrectionId::None,
            g2_terminating_terms(params, cusp)?,
            k_prime_of(cusp, params.big_b()),
        ),
        CaseTag::ShiftedPole => {
            let (sp, sc) = shifted_setup(params, cusp);
            debug_assert!(in_q(&sp, &sc), "shifted cusp must land in the pole set");
            let terms: Vec<Complex64> = l_finite_terms(&sp, &sc)?
                .into_iter()
                .map(|t| -(i * t))
                .collect();
            (CorrectionId::SmallM, terms, k2_of(cusp, params.big_b()).1)
        }
        CaseTag::ShiftedTerminating => {
            let (sp, sc) = shifted_setup(params, cusp);
            debug_assert!(!in_q(&sp, &sc), "shifted cusp must avoid the pole set");
            let terms: Vec<Complex64> = g2_terminating_terms(&sp, &sc)?
                .into_iter()
                .map(|t| i * t)
                .collect();
            (CorrectionId::SmallT, terms, k2_of(cusp, params.big_b()).1)
        }
    };
    Ok(RadialLimitResult {
        case,
        correction,
        constant: terms.iter().sum(),
        terms,
        k_effective: k_eff,
    })
}

/// The subtracted modular correction evaluated at q = e(tau_prime), on the
/// (z, tau) cover of the specialized arguments.
pub fn correction_value(
    correction: CorrectionId,
    params: &SpecParams,
    tau_prime: Complex64,
) -> Result<Complex64> {
    Ok(correction_with_scale(correction, params, tau_prime)?.0)
}

/// Correction value together with its internal term scale: the magnitude of
/// the largest constituent, which bounds the rounding noise surviving the
/// cancellation between the terms.
fn correction_with_scale(
    correction: CorrectionId,
    params: &SpecParams,
    tau_prime: Complex64,
) -> Result<(Complex64, f64)> {
    let (z, tau) = specialized_cover(params, tau_prime);
    match correction {
        CorrectionId::MortensonT => crate::qseries::t_mortenson_with_scale(z, tau),
        CorrectionId::None => Ok((Complex64::new(0.0, 0.0), 0.0)),
        CorrectionId::SmallT => crate::qseries::t_correction_with_scale(z, tau),
        CorrectionId::SmallM => crate::qseries::m_correction_with_scale(params, tau_prime),
    }
}

/// Default radial grid, largest point first.
pub fn default_t_grid() -> Vec<f64> {
    vec![0.20, 0.16, 0.12, 0.09, 0.06, 0.04, 0.03, 0.02]
}

/// Grid for the order-three radial checks, scaled toward higher-order
/// roots of unity like the verification grids.
pub fn watson_t_grid() -> Vec<f64> {
    vec![
        0.10, 0.082, 0.067, 0.055, 0.045, 0.037, 0.030, 0.024, 0.019, 0.015, 0.012,
    ]
}

/// tau' on the radial path q = e(h/k) e^{-t}.
pub fn path_tau(cusp: &Cusp, t: f64) -> Complex64 {
    Complex64::new(cusp.h() as f64 / cusp.k() as f64, t / std::f64::consts::TAU)
}

/// Least-squares polynomial fit c0 + c1 t + ... + cd t^d via the normal
/// equations on the rescaled variable u = t / t_max (which keeps the system
/// well-conditioned); returns (c0, per-point residual norms). The degree
/// escalates with the number of points: the corrected differences carry
/// large higher-order coefficients, and a quadratic alone cannot reach the
/// 1e-3 window from desk-scale grids.
fn extrapolate_to_zero(ts: &[f64], vals: &[Complex64]) -> (Complex64, Vec<f64>) {
    let degree = match ts.len() {
        0..=4 => 2,
        5..=7 => ts.len() - 4,
        8..=9 => 4,
        _ => 5,
    };
    let t_max = ts.iter().cloned().fold(f64::MIN, f64::max);
    let n = degree + 1;
    let mut a = vec![vec![0.0f64; n]; n];
    let mut b = vec![Complex64::new(0.0, 0.0); n];
    for (t, v) in ts.iter().zip(vals) {
        let u = t / t_max;
        let mut phi = vec![1.0f64; n];
        for p in 1..n {
            phi[p] = phi[p - 1] * u;
        }
        for i in 0..n {
            for j in 0..n {
                a[i][j] += phi[i] * phi[j];
            }
            b[i] += *v * phi[i];
        }
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            let bc = b[col];
            b[row] -= bc * f;
        }
    }
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in (row + 1)..n {
            s -= c[k] * a[row][k];
        }
        c[row] = s / a[row][row];
    }
    let residuals: Vec<f64> = ts
        .iter()
        .zip(vals)
        .map(|(t, v)| {
            let u = t / t_max;
            let mut acc = Complex64::new(0.0, 0.0);
            for p in (0..n).rev() {
                acc = acc * u + c[p];
            }
            (*v - acc).norm()
        })
        .collect();
    (c[0], residuals)
}

/// Difference g2(specialized) - correction at one grid point.
///
/// Near a pole both sides grow exponentially while the difference stays
/// bounded, so the direct subtraction loses all double precision once the
/// values pass ~1e8. In that regime the sample switches to an identically
/// equal route: the bilateral-side pair M - L for the pole case, and the
/// shifted series i g2(i zeta; -q) (plus shifted M - L for the m case) for
/// the other corrections.
fn radial_sample(
    params: &SpecParams,
    correction: CorrectionId,
    tau_prime: Complex64,
    acc: &SeriesAccuracy,
) -> Result<Complex64> {
    let (z, tau) = specialized_cover(params, tau_prime);
    let zeta = e2pi(z);
    let q = e2pi(tau);
    let g2 = g2_series(zeta, q, acc)?;
    let (corr, corr_scale) = correction_with_scale(correction, params, tau_prime)?;
    let cancellation = (g2.norm() + corr_scale) * 1e-15;
    if !cancellation.is_finite() || cancellation > 1e-7 {
        let i = Complex64::new(0.0, 1.0);
        let quarter = Complex64::new(0.25, 0.0);
        let half = Complex64::new(0.5, 0.0);
        match correction {
            CorrectionId::MortensonT => {
                let m = m_fn(z, tau, acc)?;
                let l = l_series(zeta, q, acc)?;
                return Ok(m - l);
            }
            CorrectionId::SmallT => {
                // g2 - t = i g2(i zeta; -q)
                let shifted = g2_series(e2pi(z + quarter), e2pi(tau + half), acc)?;
                return Ok(i * shifted);
            }
            CorrectionId::SmallM => {
                // g2 - m = i (g2 - T)(shifted) = i (M - L)(shifted)
                let zs = z + quarter;
                let taus = tau + half;
                let m = m_fn(zs, taus, acc)?;
                let l = l_series(e2pi(zs), e2pi(taus), acc)?;
                return Ok(i * (m - l));
            }
            CorrectionId::None => {}
        }
    }
    Ok(g2 - corr)
}

/// Numeric radial limit: evaluate the corrected difference on the grid, fit
/// a quadratic in t by least squares, and report the constant term. The
/// error estimate combines the worst fit residual with the change in the
/// constant when the smallest grid point is removed.
pub fn numeric_radial_limit(
    params: &SpecParams,
    cusp: &Cusp,
    correction: CorrectionId,
    t_grid: &[f64],
    acc: &SeriesAccuracy,
) -> Result<RadialEstimate> {
    let decreasing = t_grid.windows(2).all(|w| w[0] > w[1]);
    if t_grid.is_empty() || !decreasing || *t_grid.last().unwrap() <= 0.0 {
        return Err(Error::InvalidConfig(
            "t grid must be strictly decreasing and positive".into(),
        ));
    }
    let mut ts = Vec::new();
    let mut vals = Vec::new();
    let mut dropped = Vec::new();
    for &t in t_grid {
        match radial_sample(params, correction, path_tau(cusp, t), acc) {
            Ok(v) => {
                ts.push(t);
                vals.push(v);
            }
            Err(Error::PoleProximity { .. }) => dropped.push(t),
            Err(e) => return Err(e),
        }
    }
    if ts.len() < 4 {
        return Err(Error::InsufficientData { usable: ts.len() });
    }
    let (c0, residuals) = extrapolate_to_zero(&ts, &vals);
    let (c0_short, _) = extrapolate_to_zero(&ts[..ts.len() - 1], &vals[..vals.len() - 1]);
    let error_estimate = residuals.iter().cloned().fold(0.0, f64::max) + (c0 - c0_short).norm();
    Ok(RadialEstimate {
        value: c0,
        error_estimate,
        t_grid: ts,
        samples: vals,
        dropped,
    })
}

/// Grid used by `verify`: the default grid scaled toward the cusp by the
/// square of the largest denominator entering the case analysis. The
/// corrected difference approaches its limit with transients decaying like
/// exp(-c/(k^2 t)), so the grid must shrink quadratically with the
/// denominator before the quadratic extrapolation becomes reliable.
pub fn verification_t_grid(params: &SpecParams, cusp: &Cusp) -> Vec<f64> {
    let case = classify(params, cusp);
    let k_star = match case {
        CaseTag::DenominatorPole | CaseTag::EvenTerminating => cusp.k(),
        CaseTag::ShiftedPole | CaseTag::ShiftedTerminating => {
            cusp.k().max(k2_of(cusp, params.big_b()).0)
        }
    };
    let scale = (2.0 / (k_star as f64).powi(2)).min(1.0);
    default_t_grid().iter().map(|t| t * scale).collect()
}

/// Full pipeline: classify, closed form, numeric verification with the
/// matched correction on the cusp-scaled grid, and the absolute difference.
pub fn verify(params: &SpecParams, cusp: &Cusp, tolerance: f64) -> Result<VerifyReport> {
    verify_with_grid(params, cusp, tolerance, &verification_t_grid(params, cusp))
}

pub fn verify_with_grid(
    params: &SpecParams,
    cusp: &Cusp,
    tolerance: f64,
    t_grid: &[f64],
) -> Result<VerifyReport> {
    let closed = closed_form(params, cusp)?;
    let numeric = numeric_radial_limit(
        params,
        cusp,
        closed.correction,
        t_grid,
        &SeriesAccuracy::default(),
    )?;
    let abs_diff = (closed.constant - numeric.value).norm();
    Ok(VerifyReport {
        params: *params,
        cusp: *cusp,
        pass: abs_diff < tolerance,
        closed,
        numeric,
        abs_diff,
        tolerance,
    })
}

/// All reduced cusps h/k with 0 <= h < k <= k_max, ordered by (k, h).
pub fn cusps_up_to(k_max: i64) -> Vec<Cusp> {
    let mut out = Vec::new();
    for k in 1..=k_max {
        for h in 0..k {
            if h.gcd(&k) == 1 {
                out.push(Cusp::new(h, k).expect("valid cusp"));
            }
        }
    }
    out
}

/// One row of a sweep table.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub cusp: Cusp,
    pub case: CaseTag,
    pub correction: CorrectionId,
    pub constant: Complex64,
    pub numeric: Option<Complex64>,
    pub abs_diff: Option<f64>,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SweepTable {
    pub params: SpecParams,
    pub rows: Vec<SweepRow>,
    pub distinct_corrections: Vec<CorrectionId>,
    pub pass_count: usize,
}

/// Verify every reduced cusp with k <= k_max. Rows are ordered by (k, h)
/// regardless of evaluation order; failures are flagged but do not abort
/// the sweep.
pub fn sweep(params: &SpecParams, k_max: i64, tolerance: f64) -> SweepTable {
    let cusps = cusps_up_to(k_max);
    let rows: Vec<SweepRow> = cusps
        .par_iter()
        .map(|cusp| match verify(params, cusp, tolerance) {
            Ok(rep) => SweepRow {
                cusp: *cusp,
                case: rep.closed.case,
                correction: rep.closed.correction,
                constant: rep.closed.constant,
                numeric: Some(rep.numeric.value),
                abs_diff: Some(rep.abs_diff),
                pass: rep.pass,
                error: None,
            },
            Err(e) => {
                let case = classify(params, cusp);
                SweepRow {
                    cusp: *cusp,
                    case,
                    correction: case.correction(),
                    constant: Complex64::new(f64::NAN, f64::NAN),
                    numeric: None,
                    abs_diff: None,
                    pass: false,
                    error: Some(e.to_string()),
                }
            }
        })
        .collect();
    let mut distinct: Vec<CorrectionId> = Vec::new();
    for row in &rows {
        if !distinct.contains(&row.correction) {
            distinct.push(row.correction);
        }
    }
    let pass_count = rows.iter().filter(|r| r.pass).count();
    SweepTable {
        params: *params,
        rows,
        distinct_corrections: distinct,
        pass_count,
    }
}

// ---------------------------------------------------------------------------
// The worked second-order example and its curious identities.
// ---------------------------------------------------------------------------

/// Shared summand of the shifted closed forms of the second-order example:
/// i sum_{n=0}^{n_max} (-1)^{n(n+1)/2} zeta_k^{h n(n+1)} (zeta_k^{2h}; -zeta_k^{2h})_n
///   / (i zeta_k^h; -zeta_k^{2h})_{n+1}^2.
fn shifted_b_sum_dd(h: i64, k: i64, n_max: i64) -> Result<crate::dd::CDd> {
    use crate::dd::CDd;
    let r2 = RootOfUnity::new(2 * h, k).expect("k > 0");
    let minus_r2 = RootOfUnity::minus_one().mul(r2);
    let i_zeta = RootOfUnity::new(1, 4)
        .unwrap()
        .mul(RootOfUnity::new(h, k).expect("k > 0"));
    let root = RootOfUnity::new(h, k).expect("k > 0");
    let mut sum = CDd::ZERO;
    for n in 0..=n_max {
        let (num_ord, num) = pochhammer_rou_dd(r2, minus_r2, n as usize);
        let (den_ord, den) = pochhammer_rou_dd(i_zeta, minus_r2, n as usize + 1);
        if den_ord > 0 {
            return Err(Error::ClassificationViolation {
                n: n as usize,
                net_order: -2 * (den_ord as i64),
            });
        }
        if num_ord > 0 {
            continue;
        }
        let mut term = rou_to_cdd(root.pow(n * (n + 1))).mul(num).div(den.mul(den));
        if (n * (n + 1) / 2) % 2 != 0 {
            term = CDd::ZERO.sub(term);
        }
        sum = sum.add(term);
    }
    // times i
    Ok(CDd {
        re: sum.im.neg(),
        im: sum.re,
    })
}

fn shifted_b_sum(h: i64, k: i64, n_max: i64) -> Result<Complex64> {
    Ok(shifted_b_sum_dd(h, k, n_max)?.to_complex())
}

/// Identity between the pole-case sum and the shifted sum at odd k:
/// -(1/2) sum_{n <= (k-1)/2} ... = i sum_{n <= k-1} ..., both exact finite
/// sums over roots of unity. Returns (lhs, rhs, |lhs - rhs|).
pub fn curious_identity_62(h: i64, k: i64) -> Result<(Complex64, Complex64, f64)> {
    if k <= 0 || k % 2 == 0 || h.gcd(&k) != 1 {
        return Err(Error::InvalidConfig(format!(
            "need odd k and gcd(h, k) = 1, got {h}/{k}"
        )));
    }
    use crate::dd::CDd;
    let zeta = RootOfUnity::new(h, k).unwrap();
    let r2 = RootOfUnity::new(2 * h, k).unwrap();
    let minus_r2 = RootOfUnity::minus_one().mul(r2);
    let mut lhs = CDd::ZERO;
    for n in 0..=(k - 1) / 2 {
        let (num_ord, num) = pochhammer_rou_dd(zeta, r2, n as usize);
        let (den_ord, den) = pochhammer_rou_dd(minus_r2, r2, n as usize);
        if den_ord > 0 {
            return Err(Error::ClassificationViolation {
                n: n as usize,
                net_order: -(den_ord as i64),
            });
        }
        if num_ord > 0 {
            continue;
        }
        lhs = lhs.add(rou_to_cdd(r2.pow(n)).mul(num).mul(num).div(den));
    }
    lhs = lhs.mul(CDd::from_f64(-0.5, 0.0));
    let rhs = shifted_b_sum_dd(h, k, k - 1)?;
    let diff = lhs.sub(rhs).to_complex().norm();
    Ok((lhs.to_complex(), rhs.to_complex(), diff))
}

/// Identity between the direct plug-in of the Eulerian series and the
/// shifted sum at k = 2 mod 4. Returns (lhs, rhs, |lhs - rhs|).
pub fn curious_identity_63(h: i64, k: i64) -> Result<(Complex64, Complex64, f64)> {
    if k <= 0 || k.rem_euclid(4) != 2 || h.gcd(&k) != 1 {
        return Err(Error::InvalidConfig(format!(
            "need k = 2 mod 4 and gcd(h, k) = 1, got {h}/{k}"
        )));
    }
    use crate::dd::CDd;
    let zeta = RootOfUnity::new(h, k).unwrap();
    let r2 = RootOfUnity::new(2 * h, k).unwrap();
    let minus_zeta = RootOfUnity::minus_one().mul(zeta);
    let mut lhs = CDd::ZERO;
    for n in 0..=(k - 2) / 4 {
        let (num_ord, num) = pochhammer_rou_dd(minus_zeta, r2, n as usize);
        let (den_ord, den) = pochhammer_rou_dd(zeta, r2, n as usize + 1);
        if den_ord > 0 {
            return Err(Error::ClassificationViolation {
                n: n as usize,
                net_order: -(den_ord as i64),
            });
        }
        if num_ord > 0 {
            continue;
        }
        lhs = lhs.add(rou_to_cdd(zeta.pow(n)).mul(num).div(den));
    }
    let rhs = shifted_b_sum_dd(h, k, k / 2 - 1)?;
    let diff = lhs.sub(rhs).to_complex().norm();
    Ok((lhs.to_complex(), rhs.to_complex(), diff))
}

/// Closed-form limit of the worked second-order example at any cusp,
/// dispatching on k mod 4. Agrees with `closed_form` for the parameter pair
/// (0/1, 1/2).
pub fn second_order_closed_form(cusp: &Cusp) -> Result<Complex64> {
    let (h, k) = (cusp.h(), cusp.k());
    if k % 2 == 1 {
        let zeta = RootOfUnity::new(h, k).unwrap();
        let r2 = RootOfUnity::new(2 * h, k).unwrap();
        let minus_r2 = RootOfUnity::minus_one().mul(r2);
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 0..=(k - 1) / 2 {
            let num = pochhammer_rou(zeta, r2, n as usize);
            let den = pochhammer_rou(minus_r2, r2, n as usize);
            sum += r2.pow(n).to_complex() * num.value() * num.value() / den.unit_part;
        }
        Ok(-0.5 * sum)
    } else if k % 4 == 0 {
        let zeta = RootOfUnity::new(h, k).unwrap();
        let r2 = RootOfUnity::new(2 * h, k).unwrap();
        let minus_r2 = RootOfUnity::minus_one().mul(r2);
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 0..k / 4 {
            let num = pochhammer_rou(minus_r2, r2, n as usize);
            let den = pochhammer_rou(zeta, r2, n as usize + 1);
            let phase = RootOfUnity::new(h * n * (n + 1), k).unwrap().to_complex();
            sum += phase * num.value() / (den.unit_part * den.unit_part);
        }
        Ok(sum)
    } else {
        shifted_b_sum(h, k, k / 2 - 1)
    }
}

// ---------------------------------------------------------------------------
// Radial limits of the order-three series f with its modular companion.
// ---------------------------------------------------------------------------

/// Finite limit formula -4 sum_{n=0}^{k-1} (-xi; xi)_n^2 xi^{n+1} at a
/// primitive even-order root of unity xi = e(h/(2k)).
pub fn watson_finite_sum(cusp: &Cusp) -> Result<Complex64> {
    if cusp.k() % 2 != 0 {
        return Err(Error::InvalidConfig(format!(
            "need an even-order root of unity, got {cusp}"
        )));
    }
    let order_k = cusp.k() / 2;
    let xi = cusp.root_of_unity();
    let minus_xi = RootOfUnity::minus_one().mul(xi);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..order_k {
        let p = pochhammer_rou(minus_xi, xi, n as usize);
        sum += p.value() * p.value() * xi.pow(n + 1).to_complex();
    }
    Ok(-4.0 * sum)
}

/// Radial estimate of f(q) - (-1)^k b(q) into an even-order cusp, where 2k
/// is the order of the root of unity. The difference is formed in
/// double-double arithmetic: both sides grow like exp(c/t) while the
/// difference stays bounded, and the grid is scaled toward the cusp.
pub fn watson_radial(cusp: &Cusp, t_grid: &[f64], acc: &SeriesAccuracy) -> Result<RadialEstimate> {
    if cusp.k() % 2 != 0 {
        return Err(Error::InvalidConfig(format!(
            "need an even-order root of unity, got {cusp}"
        )));
    }
    let order_k = cusp.k() / 2;
    let sign = if order_k % 2 == 0 { 1.0 } else { -1.0 };
    let scale = (2.0 / cusp.k() as f64).powi(2).min(1.0);
    let mut ts = Vec::new();
    let mut vals = Vec::new();
    let mut dropped = Vec::new();
    for &t0 in t_grid {
        let t = t0 * scale;
        let tau = path_tau(cusp, t);
        let q = e2pi(tau);
        match crate::qseries::watson_difference(q, sign, acc) {
            Ok(v) => {
                ts.push(t);
                vals.push(v);
            }
            Err(Error::PoleProximity { .. }) => dropped.push(t),
            Err(e) => return Err(e),
        }
    }
    if ts.len() < 4 {
        return Err(Error::InsufficientData { usable: ts.len() });
    }
    let (c0, residuals) = extrapolate_to_zero(&ts, &vals);
    let (c0_short, _) = extrapolate_to_zero(&ts[..ts.len() - 1], &vals[..vals.len() - 1]);
    Ok(RadialEstimate {
        value: c0,
        error_estimate: residuals.iter().cloned().fold(0.0, f64::max) + (c0 - c0_short).norm(),
        t_grid: ts,
        samples: vals,
        dropped,
    })
}

/// |M| along the radial path, for the vanishing checks.
pub fn m_along_path(
    params: &SpecParams,
    cusp: &Cusp,
    t_grid: &[f64],
    acc: &SeriesAccuracy,
) -> Result<Vec<f64>> {
    t_grid
        .iter()
        .map(|&t| {
            let (z, tau) = specialized_cover(params, path_tau(cusp, t));
            m_fn(z, tau, acc).map(|v| v.norm())
        })
        .collect()
}
