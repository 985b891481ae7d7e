//! Primes: a sieve, a deterministic 64-bit primality test and factorization
//! by trial division followed by Pollard rho.

/// All primes `<= limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Smallest prime factor of every `k <= limit` (0 and 1 map to themselves).
pub fn smallest_prime_factors(limit: usize) -> Vec<u32> {
    let mut spf: Vec<u32> = (0..=limit as u32).collect();
    let mut i = 2usize;
    while i * i <= limit {
        if spf[i] == i as u32 {
            let mut j = i * i;
            while j <= limit {
                if spf[j] == j as u32 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
        i += 1;
    }
    spf
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Miller-Rabin with the first twelve primes as bases, which is exact for
/// every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A nontrivial factor of the odd composite `n` (Brent's variant, with the
/// increment stepped deterministically on failure).
fn pollard_rho(n: u64) -> u64 {
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

const TRIAL_LIMIT: u64 = 10_000;

/// Prime factorization with multiplicity, ascending.
pub fn factorize(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2;
    while p <= TRIAL_LIMIT && p * p <= n {
        while n % p == 0 {
            out.push(p);
            n /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        let mut stack = vec![n];
        while let Some(k) = stack.pop() {
            if k == 1 {
                continue;
            }
            if is_prime(k) {
                out.push(k);
            } else {
                let d = pollard_rho(k);
                stack.push(d);
                stack.push(k / d);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Distinct prime divisors, ascending.
pub fn distinct_prime_factors(n: u64) -> Vec<u64> {
    let mut f = factorize(n);
    f.dedup();
    f
}
