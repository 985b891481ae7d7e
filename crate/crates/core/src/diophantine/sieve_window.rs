//! The prime window `I = (exp((log N)^rho), exp((log N)^(1 - rho))]` and the
//! integers it sieves.

use serde::Serialize;

use super::primes::{distinct_prime_factors, primes_up_to};
use super::DiophantineError;

/// Largest window endpoint or range the sieves will handle.
pub const SIEVE_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SieveWindow {
    /// Open lower endpoint.
    pub lo: f64,
    /// Closed upper endpoint.
    pub hi: f64,
}

impl SieveWindow {
    pub fn new(n: f64, rho: f64) -> Self {
        Self::from_log(n.ln(), rho)
    }

    /// Window for `N = exp(log_n)`, so that huge `N` need not be formed.
    pub fn from_log(log_n: f64, rho: f64) -> Self {
        SieveWindow {
            lo: log_n.powf(rho).exp(),
            hi: log_n.powf(1.0 - rho).exp(),
        }
    }

    #[inline]
    pub fn contains(&self, p: u64) -> bool {
        let p = p as f64;
        p > self.lo && p <= self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.hi.floor() <= self.lo.floor()
    }

    /// Primes in the window, ascending.
    pub fn primes(&self) -> Result<Vec<u64>, DiophantineError> {
        if self.is_empty() {
            return Ok(Vec::new());
        }
        if self.hi > SIEVE_LIMIT {
            return Err(DiophantineError::SieveBudgetExceeded(self.hi));
        }
        Ok(primes_up_to(self.hi.floor() as u64)
            .into_iter()
            .filter(|&p| self.contains(p))
            .collect())
    }
}

/// Whether `n` has a prime divisor in the window.
pub fn in_s_rho(n: u64, window: &SieveWindow) -> bool {
    omega_i(n, window) > 0
}

/// Number of distinct prime divisors of `m` in the window.
pub fn omega_i(m: u64, window: &SieveWindow) -> u32 {
    distinct_prime_factors(m)
        .into_iter()
        .filter(|&p| window.contains(p))
        .count() as u32
}

/// `prod_{p in I} (1 - 1/p)`.
pub fn mertens_product(window: &SieveWindow) -> Result<f64, DiophantineError> {
    Ok(window
        .primes()?
        .into_iter()
        .map(|p| 1.0 - 1.0 / p as f64)
        .product())
}

/// Exact count of `n <= d` with no prime divisor in the window, together
/// with the prediction `d * P_N`.
pub fn rough_density(d: u64, window: &SieveWindow) -> Result<(u64, f64), DiophantineError> {
    if d as f64 > SIEVE_LIMIT {
        return Err(DiophantineError::SieveBudgetExceeded(d as f64));
    }
    let primes = window.primes()?;
    let mut hit = vec![false; d as usize + 1];
    for &p in &primes {
        let mut k = p;
        while k <= d {
            hit[k as usize] = true;
            k += p;
        }
    }
    let rough = (1..=d as usize).filter(|&k| !hit[k]).count() as u64;
    let pn: f64 = primes.iter().map(|&p| 1.0 - 1.0 / p as f64).product();
    Ok((rough, d as f64 * pn))
}
