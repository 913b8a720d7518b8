//! Closed-form predictions for strong collapse on `X(n, c/n)`.
//!
//! The central object is the sequence `γ_0 = 0`, `γ_{t+1} = exp(-c(1 - γ_t))`,
//! the probability that the root of a depth-`t` Poisson(`c`) tree is isolated
//! by root collapsing within `t - 1` steps. It increases to `γ(c)`, the least
//! fixed point of `x ↦ exp(-c(1 - x))`, and `γ(c) < 1/c` for `c > 1`.
//!
//! Differences such as `γ_{t+1} - γ_t` and `γ - γ_t` shrink geometrically and
//! would be lost to cancellation if formed by subtraction, so they are carried
//! by their own recursions:
//!
//! * `γ_{t+1} - γ_t = γ_{t+1} · (1 - exp(-c (γ_t - γ_{t-1})))`, starting from `e^{-c}`;
//! * `γ - γ_{t+1} = γ · (1 - exp(-c (γ - γ_t)))`, starting from `γ`.

use statrs::function::factorial::ln_factorial;
use thiserror::Error;

pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TheoryError {
    #[error("c = {0} must exceed 1: the least fixed point of exp(-c(1-x)) is 1 for c <= 1")]
    SubcriticalDensity(f64),
    #[error("c = {0} must be positive")]
    NonPositiveDensity(f64),
    #[error("epsilon = {0} must be positive")]
    NonPositiveEpsilon(f64),
    #[error("fixed point check failed at c = {c}: gamma = {gamma}, residual = {residual:e}")]
    FixedPointCheck { c: f64, gamma: f64, residual: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoryParams {
    pub c: f64,
    pub tol: f64,
}

impl TheoryParams {
    pub fn new(c: f64) -> Self {
        Self { c, tol: DEFAULT_TOL }
    }
}

/// `γ_0 ..= γ_T` together with cancellation-free differences.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaTable {
    pub c: f64,
    pub gammas: Vec<f64>,
    /// `gaps[t] = γ_{t+1} - γ_t` for `t < T`.
    pub gaps: Vec<f64>,
    pub gamma_star: Option<f64>,
    /// `dist[t] = γ - γ_t`, filled when the limit is known.
    pub dist: Vec<f64>,
}

impl GammaTable {
    #[inline]
    pub fn gamma(&self, t: usize) -> f64 {
        self.gammas[t]
    }

    /// `β_t = 1 - γ_{t+1}`.
    pub fn beta_of(&self, t: usize) -> f64 {
        1.0 - self.gammas[t + 1]
    }

    pub fn horizon(&self) -> usize {
        self.gammas.len() - 1
    }

    fn star(&self) -> f64 {
        self.gamma_star.expect("table built with its limit")
    }

    /// Expected fraction of non-isolated vertices surviving `t` pruning phases. Needs `t + 1 <= T`.
    pub fn f0_fraction(&self, t: usize) -> f64 {
        let c = self.c;
        let g = self.gammas[t];
        1.0 - self.gammas[t + 1] - c * g + c * g * g
    }

    /// `ε(t) = (γ - γ_{t+1}) + c (1 - γ_t - γ) (γ - γ_t)`. Needs `t + 1 <= T` and the limit.
    pub fn epsilon(&self, t: usize) -> f64 {
        let c = self.c;
        self.dist[t + 1] + c * (1.0 - self.gammas[t] - self.star()) * self.dist[t]
    }

    /// `δ(t) = (γ_{t+2} - γ_{t+1}) + c (1 - γ_t - γ_{t+1}) (γ_{t+1} - γ_t)`. Needs `t + 2 <= T`.
    pub fn delta(&self, t: usize) -> f64 {
        let c = self.c;
        self.gaps[t + 1] + c * (1.0 - self.gammas[t] - self.gammas[t + 1]) * self.gaps[t]
    }

    pub fn core_fraction(&self) -> f64 {
        let g = self.star();
        (1.0 - g) * (1.0 - self.c * g)
    }
}

/// The recursion alone, `T >= 1` steps, without the limit.
pub fn gamma_sequence(c: f64, horizon: usize) -> GammaTable {
    let horizon = horizon.max(1);
    let mut gammas = Vec::with_capacity(horizon + 1);
    let mut gaps: Vec<f64> = Vec::with_capacity(horizon);
    gammas.push(0.0);
    for t in 0..horizon {
        let next = (-c * (1.0 - gammas[t])).exp();
        let gap = if t == 0 { next } else { -next * (-c * gaps[t - 1]).exp_m1() };
        gammas.push(next);
        gaps.push(gap);
    }
    GammaTable { c, gammas, gaps, gamma_star: None, dist: Vec::new() }
}

/// Recursion plus its limit `γ(c)`; requires `c > 1`.
pub fn gamma_table(c: f64, horizon: usize, tol: f64) -> Result<GammaTable, TheoryError> {
    let star = gamma_fixed_point(c, tol)?;
    let mut table = gamma_sequence(c, horizon);
    let mut dist = Vec::with_capacity(table.gammas.len());
    dist.push(star);
    for t in 0..table.horizon() {
        let d = -star * (-c * dist[t]).exp_m1();
        dist.push(d);
    }
    table.gamma_star = Some(star);
    table.dist = dist;
    Ok(table)
}

/// Least root of `exp(-c(1-x)) - x` in `(0, 1)`.
///
/// Monotone iteration from 0 approaches the least fixed point from below; it
/// is stopped once steps fall under `tol` (or after a fixed budget near `c = 1`)
/// and the root is then polished by bisection on `[iterate, 1/c]`.
pub fn gamma_fixed_point(c: f64, tol: f64) -> Result<f64, TheoryError> {
    if !(c > 1.0) {
        return Err(TheoryError::SubcriticalDensity(c));
    }
    let f = |x: f64| (-c * (1.0 - x)).exp();
    let mut x = 0.0f64;
    for _ in 0..1_000_000 {
        let next = f(x);
        let step = next - x;
        x = next;
        if step <= tol {
            break;
        }
    }
    let mut lo = x.min(1.0 / c);
    let mut hi = 1.0 / c;
    let g = |x: f64| f(x) - x;
    if g(lo) < 0.0 {
        // Overshoot by rounding; the root is still bracketed from below by the last sub-root iterate.
        lo = 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let gamma = if g(lo).abs() <= g(hi).abs() { lo } else { hi };
    let residual = g(gamma).abs();
    if !(c * gamma < 1.0) || residual > tol || gamma <= 0.0 {
        return Err(TheoryError::FixedPointCheck { c, gamma, residual });
    }
    Ok(gamma)
}

/// `γ_t^k`: Poisson(`c (1 - γ_{t-1})`) mass at `k`, the root-degree law after `t - 1` steps.
pub fn root_degree_pmf(c: f64, t: usize, k: usize) -> f64 {
    let t = t.max(1);
    let table = gamma_sequence(c, t);
    poisson_pmf(c * (1.0 - table.gammas[t - 1]), k)
}

/// `γ_t^{≥2} = 1 - γ_t (1 + c (1 - γ_{t-1}))`.
pub fn prob_degree_ge2(c: f64, t: usize) -> f64 {
    let t = t.max(1);
    let table = gamma_sequence(c, t);
    1.0 - table.gammas[t] * (1.0 + c * (1.0 - table.gammas[t - 1]))
}

pub fn poisson_pmf(mean: f64, k: usize) -> f64 {
    if mean <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * mean.ln() - mean - ln_factorial(k as u64)).exp()
}

/// `(1 - γ_{t+1} - c γ_t + c γ_t²) n`.
pub fn expected_f0_after_t(c: f64, n: usize, t: usize) -> f64 {
    gamma_sequence(c, t + 1).f0_fraction(t) * n as f64
}

/// `(1 - γ)(1 - cγ) n`.
pub fn core_size_prediction(c: f64, n: usize) -> Result<f64, TheoryError> {
    Ok(core_fraction(c)? * n as f64)
}

pub fn core_fraction(c: f64) -> Result<f64, TheoryError> {
    let g = gamma_fixed_point(c, DEFAULT_TOL)?;
    Ok((1.0 - g) * (1.0 - c * g))
}

pub fn delta_of(c: f64, t: usize) -> Result<f64, TheoryError> {
    if !(c > 1.0) {
        return Err(TheoryError::SubcriticalDensity(c));
    }
    Ok(gamma_sequence(c, t + 2).delta(t))
}

pub fn epsilon_of(c: f64, t: usize) -> Result<f64, TheoryError> {
    Ok(gamma_table(c, t + 1, DEFAULT_TOL)?.epsilon(t))
}

/// Which prefactor the geometric rate bounds carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Prefactor {
    /// `e^{-c}`, obtained by telescoping the ratio bounds from `γ_1 - γ_0 = e^{-c}`.
    #[default]
    Telescoped,
    /// `e^{c}`, as the bounds are usually printed.
    Printed,
}

impl Prefactor {
    fn value(self, c: f64) -> f64 {
        match self {
            Prefactor::Telescoped => (-c).exp(),
            Prefactor::Printed => c.exp(),
        }
    }
}

/// Geometric sandwiches at a given `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateBounds {
    pub t: usize,
    pub gap_lower: f64,
    pub gap_upper: f64,
    pub delta_lower: f64,
    pub delta_upper: f64,
    pub eps_lower: f64,
    pub eps_upper: f64,
}

pub fn epsilon_bounds(c: f64, t: usize) -> Result<RateBounds, TheoryError> {
    epsilon_bounds_with(c, t, Prefactor::Telescoped)
}

pub fn epsilon_bounds_with(c: f64, t: usize, prefactor: Prefactor) -> Result<RateBounds, TheoryError> {
    let gamma = gamma_fixed_point(c, DEFAULT_TOL)?;
    Ok(bounds_from(c, gamma, t, prefactor))
}

fn bounds_from(c: f64, gamma: f64, t: usize, prefactor: Prefactor) -> RateBounds {
    let a = prefactor.value(c);
    let slow = c * (-c).exp();
    let fast = c * gamma;
    let low_geo = slow.powi(t as i32);
    let high_geo = fast.powi(t as i32);
    RateBounds {
        t,
        gap_lower: a * low_geo,
        gap_upper: a * high_geo,
        delta_lower: (c - c * gamma) * a * low_geo,
        delta_upper: (c + 1.0) * a * high_geo,
        eps_lower: (c - c * gamma) * a / (1.0 - slow) * low_geo,
        eps_upper: (c + 1.0) * a / (1.0 - fast) * high_geo,
    }
}

/// Least `t >= 1` with `eps_upper(t) <= epsilon` under the telescoped prefactor.
pub fn rounds_for_epsilon(c: f64, epsilon: f64) -> Result<usize, TheoryError> {
    if !(epsilon > 0.0) {
        return Err(TheoryError::NonPositiveEpsilon(epsilon));
    }
    let gamma = gamma_fixed_point(c, DEFAULT_TOL)?;
    let upper = |t: usize| bounds_from(c, gamma, t, Prefactor::Telescoped).eps_upper;
    let lead = (c + 1.0) * (-c).exp() / (1.0 - c * gamma);
    let estimate = ((epsilon / lead).ln() / (c * gamma).ln()).ceil();
    let mut t = if estimate.is_finite() && estimate > 1.0 { estimate as usize } else { 1 };
    while t > 1 && upper(t - 1) <= epsilon {
        t -= 1;
    }
    while upper(t) > epsilon {
        t += 1;
    }
    Ok(t)
}

/// `(n(n-1)/2) p (1 - p(1-p))^{n-2}`, evaluated in log space. Counts each dominated pair once;
/// the ordered count has twice this mean.
pub fn expected_dominated_pairs(n: usize, p: f64) -> f64 {
    if n < 2 || p <= 0.0 {
        return 0.0;
    }
    let nf = n as f64;
    let log_pairs = (nf * (nf - 1.0) / 2.0).ln();
    (log_pairs + p.ln() + (nf - 2.0) * (-p * (1.0 - p)).ln_1p()).exp()
}

/// `n p^{n-1}`, evaluated in log space.
pub fn expected_universal_vertices(n: usize, p: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if n == 1 {
        return 1.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    let nf = n as f64;
    (nf.ln() + (nf - 1.0) * p.ln()).exp()
}

/// Upper bound on the mean per-step newly-dominated count in the second epoch: `1 - (3/4)(1 - cγ)`.
pub fn drift_bound(c: f64) -> Result<f64, TheoryError> {
    let g = gamma_fixed_point(c, DEFAULT_TOL)?;
    Ok(1.0 - 0.75 * (1.0 - c * g))
}

/// Supremum of the second-epoch budgets `ε` covered by the ending argument:
/// `min{(1/12)(1-γ)(1-cγ), (5/192)(1-γ)(1-cγ)²}`.
pub fn epoch2_epsilon_limit(c: f64) -> Result<f64, TheoryError> {
    let g = gamma_fixed_point(c, DEFAULT_TOL)?;
    let a = (1.0 - g) * (1.0 - c * g);
    Ok((a / 12.0).min(5.0 / 192.0 * a * (1.0 - c * g)))
}

/// Phase budget for a second-epoch target `ε`: the least `t` whose
/// `ε`-upper bound is below `ε (1 - cγ) / 8`, which forces `δ(t) < ε (1 - cγ) / 8`.
pub fn epoch2_phase_budget(c: f64, epsilon: f64) -> Result<usize, TheoryError> {
    let g = gamma_fixed_point(c, DEFAULT_TOL)?;
    rounds_for_epsilon(c, epsilon * (1.0 - c * g) / 8.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: plain bisection on `exp(-c(1-x)) - x` over `[0, 1/c]`.
    fn bisect(c: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0 / c);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (-c * (1.0 - mid)).exp() - mid > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    #[test]
    fn recursion_examples() {
        let t = gamma_sequence(1.5, 3);
        assert_eq!(t.gamma(0), 0.0);
        assert!((t.gamma(1) - 0.223_130_160_148_43).abs() < 1e-12);
        // exp(-1.5 (1 - e^{-1.5}))
        assert!((t.gamma(2) - 0.311_827_615_035_60).abs() < 1e-12);
        assert!((t.gaps[1] - (t.gamma(2) - t.gamma(1))).abs() < 1e-15);
        assert!((t.beta_of(1) - (1.0 - t.gamma(2))).abs() < 1e-15);
    }

    #[test]
    fn fixed_point_matches_bisection() {
        // frozen from the bisection oracle
        assert!((bisect(1.5) - 0.417_188_356_134_188_6).abs() < 1e-12);
        for c in [1.1, 1.5, 2.0, 3.0, 5.0, 1.0001] {
            let g = gamma_fixed_point(c, DEFAULT_TOL).unwrap();
            assert!((g - bisect(c)).abs() < 1e-10, "c = {c}");
            assert!(c * g < 1.0);
            assert!(((-c * (1.0 - g)).exp() - g).abs() <= DEFAULT_TOL);
        }
        assert_eq!(gamma_fixed_point(1.0, 1e-12), Err(TheoryError::SubcriticalDensity(1.0)));
        assert!(gamma_fixed_point(0.5, 1e-12).is_err());
    }

    #[test]
    fn gamma_sequence_is_increasing_below_limit() {
        for c in [1.1, 1.5, 2.0, 3.0, 5.0] {
            let table = gamma_table(c, 60, DEFAULT_TOL).unwrap();
            let star = table.gamma_star.unwrap();
            assert!(star < 1.0 / c);
            for t in 0..table.horizon() {
                assert!(table.gammas[t] < table.gammas[t + 1] || table.gaps[t] < 1e-15);
                // Below double resolution the iterate may round onto the limit.
                assert!(table.gammas[t] < star || table.dist[t] < 4.0 * f64::EPSILON * star);
                assert!(table.dist[t] > 0.0);
            }
        }
    }

    #[test]
    fn degree_law() {
        let c: f64 = 1.5;
        for k in 0..8 {
            let poisson = c.powi(k as i32) * (-c).exp() / (1..=k).product::<usize>() as f64;
            assert!((root_degree_pmf(c, 1, k) - poisson).abs() < 1e-15);
        }
        for c in [1.5, 3.0, 5.0] {
            for t in 1..6 {
                let total: f64 = (0..=200).map(|k| root_degree_pmf(c, t, k)).sum();
                assert!((total - 1.0).abs() < 1e-10);
                let tail: f64 = (61..=200).map(|k| root_degree_pmf(c, t, k)).sum();
                assert!(tail < 1e-12);
                let ge2 = 1.0 - root_degree_pmf(c, t, 0) - root_degree_pmf(c, t, 1);
                assert!((prob_degree_ge2(c, t) - ge2).abs() < 1e-14);
            }
        }
        let s = gamma_sequence(1.5, 2);
        let direct = 1.0 - s.gamma(2) * (1.0 + 1.5 * (1.0 - s.gamma(1)));
        assert!((prob_degree_ge2(1.5, 2) - direct).abs() < 1e-15);
    }

    #[test]
    fn expectation_examples() {
        let c = 1.5;
        let n = 10_000;
        assert!((expected_f0_after_t(c, n, 0) - (1.0 - (-c).exp()) * n as f64).abs() < 1e-9);
        let core = core_size_prediction(c, n).unwrap();
        assert!((expected_f0_after_t(c, n, 200) - core).abs() < 1e-6);
        let e4 = expected_f0_after_t(c, n, 4);
        let e5 = expected_f0_after_t(c, n, 5);
        assert!(e4 > e5 && e5 > core);
        // frozen from the bisection oracle: (1 - γ)(1 - 1.5γ) at γ = 0.4171883561341886
        assert!((core_fraction(1.5).unwrap() - 0.218_098_296_405_448).abs() < 1e-12);
        assert!(core_fraction(1.0001).unwrap() < 0.01);
    }

    #[test]
    fn expectation_strictly_decreasing() {
        for c in [1.1, 1.5, 2.0, 3.0] {
            let table = gamma_sequence(c, 40);
            for t in 0..38 {
                assert!(table.f0_fraction(t + 1) <= table.f0_fraction(t));
            }
        }
    }

    #[test]
    fn epsilon_delta_examples() {
        let c = 1.5;
        // (γ - γ_2) + (c - c(γ_1 + γ))(γ - γ_1) at oracle γ
        let g = bisect(c);
        let s = gamma_sequence(c, 2);
        let direct = (g - s.gamma(2)) + (c - c * (s.gamma(1) + g)) * (g - s.gamma(1));
        let eps1 = epsilon_of(c, 1).unwrap();
        assert!((eps1 - direct).abs() < 1e-12);
        assert!((eps1 - 0.210_059_450_888_103).abs() < 1e-12);
        for t in 0..20 {
            let lhs = delta_of(c, t).unwrap();
            let rhs = epsilon_of(c, t).unwrap() - epsilon_of(c, t + 1).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300) + 1e-16);
            let via_f0 = expected_f0_after_t(c, 1, t) - core_fraction(c).unwrap();
            assert!((via_f0 - epsilon_of(c, t).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn rate_sandwich() {
        for c in [1.5, 2.0, 3.0] {
            let table = gamma_table(c, 40, DEFAULT_TOL).unwrap();
            for t in 0..=30 {
                let b = epsilon_bounds(c, t).unwrap();
                let gap = table.gaps[t];
                assert!(b.gap_lower <= gap && gap <= b.gap_upper, "gap c={c} t={t}");
                let d = table.delta(t);
                assert!(b.delta_lower <= d && d <= b.delta_upper, "delta c={c} t={t}");
                let e = table.epsilon(t);
                assert!(b.eps_lower <= e && e <= b.eps_upper, "eps c={c} t={t}");
            }
        }
        let printed = epsilon_bounds_with(1.5, 1, Prefactor::Printed).unwrap();
        let gap = gamma_sequence(1.5, 2).gaps[1];
        assert!(printed.gap_lower > gap);
    }

    #[test]
    fn sandwich_reference_values() {
        let b = epsilon_bounds(1.5, 1).unwrap();
        assert!((b.gap_lower - 0.074_681).abs() < 1e-5);
        assert!((b.gap_upper - 0.139_631).abs() < 1e-5);
        assert!((b.eps_lower - 0.098_15).abs() < 1e-4);
        assert!((b.eps_upper - 0.932_4).abs() < 1e-3);
    }

    #[test]
    fn rounds_inverse() {
        for c in [1.5, 2.0, 3.0] {
            for t0 in 1..25 {
                let eps = epsilon_bounds(c, t0).unwrap().eps_upper;
                assert_eq!(rounds_for_epsilon(c, eps).unwrap(), t0);
            }
        }
        assert_eq!(rounds_for_epsilon(1.5, 0.01).unwrap(), 11);
        assert_eq!(rounds_for_epsilon(1.5, 5.0).unwrap(), 1);
        assert!(rounds_for_epsilon(1.5, 0.0).is_err());
        assert!(rounds_for_epsilon(1.5, -1.0).is_err());
    }

    #[test]
    fn pair_and_universal_formulas() {
        for p in [0.0, 0.3, 0.9] {
            assert!((expected_dominated_pairs(2, p) - p).abs() < 1e-15);
        }
        assert!((expected_universal_vertices(7, 1.0) - 7.0).abs() < 1e-12);
        // n = 3: ordered mean 6p(1-p(1-p)) is twice the formula
        let p: f64 = 0.4;
        assert!((2.0 * expected_dominated_pairs(3, p) - 6.0 * p * (1.0 - p * (1.0 - p))).abs() < 1e-14);
        let big = expected_dominated_pairs(100_000, 1.5 * (100_000f64).ln() / 100_000.0);
        assert!(big.is_finite() && big > 0.0);
    }

    #[test]
    fn epoch2_helpers() {
        let c = 1.5;
        let g = bisect(c);
        assert!((drift_bound(c).unwrap() - (1.0 - 0.75 * (1.0 - c * g))).abs() < 1e-12);
        let limit = epoch2_epsilon_limit(c).unwrap();
        assert!((limit - 0.002_125).abs() < 1e-5);
        assert_eq!(epoch2_phase_budget(c, 0.01).unwrap(), 18);
        let t = epoch2_phase_budget(c, 0.01).unwrap();
        assert!(delta_of(c, t).unwrap() < 0.01 * (1.0 - c * g) / 8.0);
    }
}
