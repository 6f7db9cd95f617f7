//! Named identity suites: each runs a seeded batch of residual checks and
//! reports the worst residual. The CLI exposes these as `verify-identity`.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::exact::Cusp;
use crate::modular::{big_theta, e2pi, eta, k_fn, mu, theta};
use crate::qseries::{
    big_b_series, g2_series, l_series, m_fn, t_correction, t_mortenson, SeriesAccuracy,
};
use crate::radial::{
    curious_identity_62, curious_identity_63, watson_finite_sum, watson_radial, watson_t_grid,
};

/// Result of one identity suite.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub name: &'static str,
    pub samples: usize,
    pub worst_residual: f64,
    pub worst_point: Option<(Complex64, Complex64)>,
    pub tolerance: f64,
    pub pass: bool,
}

pub const IDENTITY_NAMES: &[&str] = &[
    "mortenson",
    "kang",
    "mu-shift",
    "half-shift",
    "decompose",
    "theta-2-2",
    "theta-6-4",
    "curious-62",
    "curious-63",
    "watson",
    "mock-theta-conj-B",
];

/// Seeded interior sample points: tau in the unit strip with
/// Im tau in [0.4, 1.2] and z generic, bounded away from the lattice
/// degeneracies of every tested identity.
fn interior_points(seed: u64, n: usize) -> Vec<(Complex64, Complex64)> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let tau = Complex64::new(rng.gen_range(-0.45..0.45), rng.gen_range(0.4..1.2));
            let z = Complex64::new(rng.gen_range(0.06..0.19), rng.gen_range(0.02..0.14));
            (z, tau)
        })
        .collect()
}

fn report(
    name: &'static str,
    tolerance: f64,
    residuals: Vec<(f64, (Complex64, Complex64))>,
) -> IdentityReport {
    let samples = residuals.len();
    let (worst_residual, worst_point) = residuals.into_iter().fold(
        (0.0f64, None),
        |(w, p), (r, pt)| {
            if r > w {
                (r, Some(pt))
            } else {
                (w, p)
            }
        },
    );
    IdentityReport {
        name,
        samples,
        worst_residual,
        worst_point,
        tolerance,
        pass: worst_residual < tolerance,
    }
}

/// Run the named identity suite with `samples` points (where applicable)
/// and the given seed. Unknown names list the valid ones.
pub fn run_identity(name: &str, samples: usize, seed: u64) -> Result<IdentityReport> {
    let acc = SeriesAccuracy::default();
    let tol = 1e-9;
    match name {
        "mortenson" => {
            // g2 + L = M + T
            let mut res = Vec::new();
            for (z, tau) in interior_points(seed, samples) {
                let zeta = e2pi(z);
                let q = e2pi(tau);
                let lhs = g2_series(zeta, q, &acc)? + l_series(zeta, q, &acc)?;
                let rhs = m_fn(z, tau, &acc)? + t_mortenson(z, tau)?;
                res.push(((lhs - rhs).norm(), (z, tau)));
            }
            Ok(report("mortenson", tol, res))
        }
        "kang" => {
            // g2 = K - i q^{-1/4} mu(2z, tau; 2 tau)
            let mut res = Vec::new();
            for (z, tau) in interior_points(seed, samples) {
                let lhs = g2_series(e2pi(z), e2pi(tau), &acc)?;
                let rhs = k_fn(z, tau)?
                    - Complex64::new(0.0, 1.0) * e2pi(-tau / 4.0) * mu(2.0 * z, tau, 2.0 * tau)?;
                res.push(((lhs - rhs).norm(), (z, tau)));
            }
            Ok(report("kang", tol, res))
        }
        "mu-shift" => {
            // mu(z1 + z, z2 + z) - mu(z1, z2) = Theta(z1, z2, z)
            let mut rng = StdRng::seed_from_u64(seed);
            let mut res = Vec::new();
            for _ in 0..samples {
                let tau = Complex64::new(rng.gen_range(-0.45..0.45), rng.gen_range(0.4..1.2));
                let gen = |rng: &mut StdRng| {
                    Complex64::new(rng.gen_range(0.06..0.19), rng.gen_range(0.02..0.14))
                };
                let (z1, z2, z) = (gen(&mut rng), gen(&mut rng), gen(&mut rng));
                let lhs = mu(z1 + z, z2 + z, tau)? - mu(z1, z2, tau)?;
                let rhs = big_theta(z1, z2, z, tau)?;
                res.push(((lhs - rhs).norm(), (z1, tau)));
            }
            Ok(report("mu-shift", tol, res))
        }
        "half-shift" => {
            // g2(i zeta; -q) = K(z + 1/4; tau + 1/2) - q^{-1/4} mu(2z + 1/2, tau + 1/2; 2 tau)
            let mut res = Vec::new();
            for (z, tau) in interior_points(seed, samples) {
                let lhs = g2_series(
                    e2pi(z + Complex64::new(0.25, 0.0)),
                    e2pi(tau + Complex64::new(0.5, 0.0)),
                    &acc,
                )?;
                let rhs = k_fn(
                    z + Complex64::new(0.25, 0.0),
                    tau + Complex64::new(0.5, 0.0),
                )? - e2pi(-tau / 4.0)
                    * mu(
                        2.0 * z + Complex64::new(0.5, 0.0),
                        tau + Complex64::new(0.5, 0.0),
                        2.0 * tau,
                    )?;
                res.push(((lhs - rhs).norm(), (z, tau)));
            }
            Ok(report("half-shift", tol, res))
        }
        "decompose" => {
            // g2 = t + i g2(i zeta; -q)
            let mut res = Vec::new();
            for (z, tau) in interior_points(seed, samples) {
                let lhs = g2_series(e2pi(z), e2pi(tau), &acc)?;
                let shifted = g2_series(
                    e2pi(z + Complex64::new(0.25, 0.0)),
                    e2pi(tau + Complex64::new(0.5, 0.0)),
                    &acc,
                )?;
                let rhs = t_correction(z, tau)? + Complex64::new(0.0, 1.0) * shifted;
                res.push(((lhs - rhs).norm(), (z, tau)));
            }
            Ok(report("decompose", tol, res))
        }
        "theta-2-2" => {
            // theta(tau; 2 tau) = -i q^{-1/4} eta(tau)^2 / eta(2 tau)
            let mut res = Vec::new();
            for (_, tau) in interior_points(seed, samples) {
                let lhs = theta(tau, 2.0 * tau)?;
                let rhs = Complex64::new(0.0, -1.0) * e2pi(-tau / 4.0) * eta(tau)?.powi(2)
                    / eta(2.0 * tau)?;
                res.push(((lhs - rhs).norm(), (tau, tau)));
            }
            Ok(report("theta-2-2", tol, res))
        }
        "theta-6-4" => {
            // Quasi-periodicity, the half-period value, and the mixed
            // half-period value as eta quotients.
            let mut res = Vec::new();
            for (z, tau) in interior_points(seed, samples) {
                let quasi = theta(z + tau, tau)?
                    + (Complex64::new(0.0, -std::f64::consts::PI) * (tau + 2.0 * z)).exp()
                        * theta(z, tau)?;
                let half = theta(Complex64::new(0.5, 0.0), tau)?
                    + 2.0 * eta(2.0 * tau)?.powi(2) / eta(tau)?;
                let mixed = theta(tau + Complex64::new(0.5, 0.0), 2.0 * tau)?
                    + e2pi(-tau / 4.0) * eta(2.0 * tau)?.powi(5)
                        / (eta(tau)?.powi(2) * eta(4.0 * tau)?.powi(2));
                let worst = quasi.norm().max(half.norm()).max(mixed.norm());
                res.push((worst, (z, tau)));
            }
            Ok(report("theta-6-4", tol, res))
        }
        "curious-62" => {
            let mut res = Vec::new();
            let mut k = 1i64;
            while k <= 15 {
                for h in 0..k {
                    if num_integer::gcd(h, k) == 1 || (k == 1 && h == 0) {
                        let (_, _, d) = curious_identity_62(h, k)?;
                        res.push((
                            d,
                            (Complex64::new(h as f64, 0.0), Complex64::new(k as f64, 0.0)),
                        ));
                    }
                }
                k += 2;
            }
            Ok(report("curious-62", 1e-10, res))
        }
        "curious-63" => {
            let mut res = Vec::new();
            for k in [2i64, 6, 10, 14] {
                for h in 0..k {
                    if num_integer::gcd(h, k) == 1 {
                        let (_, _, d) = curious_identity_63(h, k)?;
                        res.push((
                            d,
                            (Complex64::new(h as f64, 0.0), Complex64::new(k as f64, 0.0)),
                        ));
                    }
                }
            }
            Ok(report("curious-63", 1e-10, res))
        }
        "watson" => {
            // Radial limits of f - (-1)^k b at xi = -1 and xi = i equal the
            // finite sums 4 and 4i.
            let grid = watson_t_grid();
            let mut res = Vec::new();
            for (h, k) in [(1i64, 2i64), (1, 4)] {
                let cusp = Cusp::new(h, k)?;
                let est = watson_radial(&cusp, &grid, &acc)?;
                let expect = watson_finite_sum(&cusp)?;
                res.push((
                    (est.value - expect).norm(),
                    (Complex64::new(h as f64, 0.0), Complex64::new(k as f64, 0.0)),
                ));
            }
            Ok(report("watson", 1e-3, res))
        }
        "mock-theta-conj-B" => {
            // B(q) = g2(q; q^2)
            let mut rng = StdRng::seed_from_u64(seed);
            let mut res = Vec::new();
            for _ in 0..samples {
                let q = Complex64::from_polar(
                    rng.gen_range(0.02..0.5),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                );
                let lhs = big_b_series(q, &acc)?;
                let rhs = g2_series(q, q * q, &acc)?;
                res.push(((lhs - rhs).norm(), (q, q * q)));
            }
            Ok(report("mock-theta-conj-B", 1e-11, res))
        }
        other => Err(Error::InvalidConfig(format!(
            "unknown identity `{other}`; valid names: {}",
            IDENTITY_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::unit_phase;

    #[test]
    fn every_listed_identity_passes() {
        for name in IDENTITY_NAMES {
            let rep = run_identity(name, 8, 7).unwrap();
            assert!(
                rep.pass,
                "{name}: worst residual {} at {:?}",
                rep.worst_residual, rep.worst_point
            );
        }
    }

    #[test]
    fn unknown_identity_lists_names() {
        let e = run_identity("nosuch", 5, 1).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("mortenson") && msg.contains("curious-63"));
    }

    #[test]
    fn mu_tau_shift_phase() {
        // mu(u, v; tau + 1) = e(-1/8) mu(u, v; tau)
        for (z, tau) in interior_points(3, 6) {
            let u = 2.0 * z;
            let v = Complex64::new(0.11, 0.05);
            let lhs = mu(u, v, tau + 1.0).unwrap();
            let rhs = unit_phase(-1, 8) * mu(u, v, tau).unwrap();
            assert!((lhs - rhs).norm() < 1e-11 * (1.0 + rhs.norm()));
        }
    }
}
