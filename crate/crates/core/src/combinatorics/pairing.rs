//! The prime-power pairing β : ω² → ω and its row relabeling γ.
//!
//! Row 0 enumerates the naturals that are not prime powers (0, 1, 6, 10,
//! 12, …); row n ≥ 1 holds the powers `p_n^{k+1}` of the n-th prime.  Rows
//! are strictly increasing, pairwise disjoint, and jointly exhaust ω, so β
//! is a bijection and decoding a value is integer factoring.
//!
//! A [`PairingFamily`] relabels rows through `γ`: row n of the family is raw
//! row `γ_n`, where `γ_n` is the least unused label whose row base bounds the
//! constraint set `r(s_n)` of the n-th enumerated sequence.  With the trivial
//! constraint `γ` is the identity; with range constraints it guarantees
//! `r(s_n) ⊆ {0, …, β(n,0) − 1}`, which is what lets bookkeeping schemes
//! treat recorded entries of `s_n` as indices of strictly earlier rounds.

use super::enumeration::RangeConstraint;
use crate::error::Error;
use crate::Result;
use num::BigUint;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

static PRIMES: Mutex<Vec<u64>> = Mutex::new(Vec::new());

fn with_primes<T>(f: impl FnOnce(&mut Vec<u64>) -> T) -> T {
    let mut guard = PRIMES.lock().expect("prime table poisoned");
    if guard.is_empty() {
        guard.extend([2u64, 3, 5, 7, 11, 13]);
    }
    f(&mut guard)
}

fn extend_primes(primes: &mut Vec<u64>) {
    let mut cand = primes.last().copied().unwrap_or(1) + 2;
    loop {
        let mut is_prime = true;
        for &p in primes.iter() {
            if p * p > cand {
                break;
            }
            if cand % p == 0 {
                is_prime = false;
                break;
            }
        }
        if is_prime {
            primes.push(cand);
            return;
        }
        cand += 2;
    }
}

/// The n-th prime, 1-based: `nth_prime(1) = 2`.
pub fn nth_prime(n: u64) -> u64 {
    assert!(n >= 1, "prime indices are 1-based");
    with_primes(|primes| {
        while (primes.len() as u64) < n {
            extend_primes(primes);
        }
        primes[(n - 1) as usize]
    })
}

/// If `m = p^e` for a prime `p` and `e ≥ 1`, return `(index of p, e)` with a
/// 1-based prime index; otherwise `None` (in particular for 0 and 1).
pub fn is_prime_power(m: u64) -> Option<(u64, u32)> {
    if m < 2 {
        return None;
    }
    let base = with_primes(|primes| {
        let mut i = 0usize;
        loop {
            if i == primes.len() {
                extend_primes(primes);
            }
            let p = primes[i];
            if p * p > m {
                return m; // no factor ≤ √m: m itself is prime
            }
            if m % p == 0 {
                return p;
            }
            i += 1;
        }
    });
    let mut rest = m;
    let mut e = 0u32;
    while rest % base == 0 {
        rest /= base;
        e += 1;
    }
    if rest != 1 {
        return None;
    }
    let idx = with_primes(|primes| {
        while *primes.last().unwrap() < base {
            extend_primes(primes);
        }
        primes.binary_search(&base).expect("base is prime") as u64 + 1
    });
    Some((idx, e))
}

static NON_PRIME_POWERS: Mutex<Vec<u64>> = Mutex::new(Vec::new());

fn with_npp<T>(f: impl FnOnce(&mut Vec<u64>) -> T) -> T {
    let mut guard = NON_PRIME_POWERS.lock().expect("npp table poisoned");
    f(&mut guard)
}

/// The k-th natural (0-based) that is not a prime power.
fn non_prime_power(k: u64) -> u64 {
    with_npp(|table| {
        let mut m = table.last().map(|v| v + 1).unwrap_or(0);
        while (table.len() as u64) <= k {
            if is_prime_power(m).is_none() {
                table.push(m);
            }
            m += 1;
        }
        table[k as usize]
    })
}

/// Rank of `m` among non-prime-powers, if it is one.
fn non_prime_power_rank(m: u64) -> Option<u64> {
    if is_prime_power(m).is_some() {
        return None;
    }
    with_npp(|table| {
        let mut next = table.last().map(|v| v + 1).unwrap_or(0);
        while table.last().map(|v| *v < m).unwrap_or(true) {
            if is_prime_power(next).is_none() {
                table.push(next);
            }
            next += 1;
        }
        table.binary_search(&m).ok().map(|i| i as u64)
    })
}

/// Raw pairing rows: `β*(0, k)` is the k-th non-prime-power and
/// `β*(n, k) = p_n^{k+1}` for n ≥ 1.  Values grow fast, hence the big
/// integer return; engine-scale callers go through [`PairingFamily`].
pub fn beta_star(n: u64, k: u64) -> BigUint {
    if n == 0 {
        BigUint::from(non_prime_power(k))
    } else {
        let k32 = u32::try_from(k + 1).expect("column fits u32");
        BigUint::from(nth_prime(n)).pow(k32)
    }
}

/// Value of `β*(λ, 0)` as a plain integer — the row base used by the γ
/// search (`0` for λ = 0, `p_λ` otherwise).
fn row_base(lam: u64) -> u64 {
    if lam == 0 {
        0
    } else {
        nth_prime(lam)
    }
}

#[derive(Default)]
struct GammaState {
    gammas: Vec<u64>,
    used: BTreeSet<u64>,
    inverse: BTreeMap<u64, u64>,
}

/// The pairing β(n, k) = β*(γ_n, k) for one range constraint.  Memoization
/// is internally synchronized, so one family can serve concurrent games.
pub struct PairingFamily {
    constraint: RangeConstraint,
    search_bound: u64,
    state: Mutex<GammaState>,
}

impl PairingFamily {
    pub fn new(constraint: RangeConstraint) -> Self {
        PairingFamily { constraint, search_bound: 1_000_000, state: Mutex::new(GammaState::default()) }
    }

    pub fn with_search_bound(constraint: RangeConstraint, search_bound: u64) -> Self {
        PairingFamily { constraint, search_bound, state: Mutex::new(GammaState::default()) }
    }

    pub fn constraint(&self) -> &RangeConstraint {
        &self.constraint
    }

    fn ensure_gamma(&self, n: u64, st: &mut GammaState) -> Result<()> {
        while (st.gammas.len() as u64) <= n {
            let j = st.gammas.len() as u64;
            let r = self.constraint.r(j);
            let need = r.iter().max().map(|x| x + 1); // r ⊆ base ⟺ base ≥ max+1
            let mut found = None;
            for lam in 0..=self.search_bound {
                if st.used.contains(&lam) {
                    continue;
                }
                let ok = match need {
                    None => true,
                    Some(bound) => row_base(lam) >= bound,
                };
                if ok {
                    found = Some(lam);
                    break;
                }
            }
            let lam = found.ok_or_else(|| {
                Error::exhausted(format!(
                    "γ search for row {j} (constraint {}) hit bound {}",
                    self.constraint.name, self.search_bound
                ))
            })?;
            st.used.insert(lam);
            st.inverse.insert(lam, j);
            st.gammas.push(lam);
        }
        Ok(())
    }

    /// Row relabeling γ; `γ_0 = 0` for every constraint with `r(0) = ∅`.
    pub fn gamma(&self, n: u64) -> Result<u64> {
        let mut st = self.state.lock().expect("pairing state poisoned");
        self.ensure_gamma(n, &mut st)?;
        Ok(st.gammas[n as usize])
    }

    /// β(n, k) as a big integer (values beyond small grids overflow u64).
    pub fn beta(&self, n: u64, k: u64) -> Result<BigUint> {
        Ok(beta_star(self.gamma(n)?, k))
    }

    /// β(n, k) for engine-scale values (round numbers).
    pub fn beta_u64(&self, n: u64, k: u64) -> Result<u64> {
        u64::try_from(&self.beta(n, k)?)
            .map_err(|_| Error::pre(format!("β({n}, {k}) exceeds u64")))
    }

    /// Decode a value: the unique (n, k) with β(n, k) = m.
    pub fn beta_inverse(&self, m: u64) -> Result<(u64, u64)> {
        let (raw_row, col) = match is_prime_power(m) {
            Some((pi, e)) => (pi, (e - 1) as u64),
            None => (0, non_prime_power_rank(m).expect("checked not prime power")),
        };
        let mut st = self.state.lock().expect("pairing state poisoned");
        let mut n = st.gammas.len() as u64;
        loop {
            if let Some(&row) = st.inverse.get(&raw_row) {
                return Ok((row, col));
            }
            if n > self.search_bound {
                return Err(Error::exhausted(format!(
                    "γ⁻¹ search for raw row {raw_row} hit bound {}",
                    self.search_bound
                )));
            }
            self.ensure_gamma(n, &mut st)?;
            n += 1;
        }
    }
}
