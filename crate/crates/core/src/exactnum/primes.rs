use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const SMALL_PRIMES: [u64; 20] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
];

/// Miller-Rabin with the first twelve prime bases, which is a proof of
/// primality below 3.3e24 and therefore for every n < 2^64. Larger inputs use
/// all twenty bases in `SMALL_PRIMES`; a composite passes with probability
/// below 4^-20 per input.
pub fn is_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    for &p in SMALL_PRIMES.iter() {
        let p = BigInt::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let bases: &[u64] = if n.bits() <= 64 { &SMALL_PRIMES[..12] } else { &SMALL_PRIMES };
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s as usize;
    'witness: for &a in bases {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_prime_u64(n: u64) -> bool {
    is_prime(&BigInt::from(n))
}

fn pollard_brent(n: &BigInt, c: u64) -> Option<BigInt> {
    let c = BigInt::from(c);
    let f = |x: &BigInt| (x * x + &c) % n;
    let mut y = BigInt::from(2);
    let mut r: u64 = 1;
    let mut q = BigInt::one();
    let mut g = BigInt::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    let m = 64;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                q = (q * (&x - &y).abs()) % n;
            }
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
        if r > 1 << 26 {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = (&x - &ys).abs().gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}

fn split_into(n: BigInt, out: &mut Vec<BigInt>) {
    if n.is_one() {
        return;
    }
    if is_prime(&n) {
        out.push(n);
        return;
    }
    for c in 1u64.. {
        if let Some(d) = pollard_brent(&n, c) {
            let other = &n / &d;
            split_into(d, out);
            split_into(other, out);
            return;
        }
    }
}

/// Prime factorization of |n| as sorted (prime, exponent) pairs.
pub fn factor(n: &BigInt) -> Vec<(BigInt, u32)> {
    assert!(!n.is_zero(), "factor(0)");
    let mut n = n.abs();
    let mut primes = Vec::new();
    let mut p: u64 = 2;
    while p < 1000 {
        let bp = BigInt::from(p);
        while (&n % &bp).is_zero() {
            n /= &bp;
            primes.push(bp.clone());
        }
        p += if p == 2 { 1 } else { 2 };
    }
    split_into(n, &mut primes);
    primes.sort();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    out
}

/// Primes below `bound`, by sieve.
pub fn primes_below(bound: u64) -> Vec<u64> {
    let b = bound as usize;
    let mut sieve = vec![true; b.max(2)];
    sieve[0] = false;
    if b > 1 {
        sieve[1] = false;
    }
    let mut i = 2;
    while i * i < b {
        if sieve[i] {
            let mut j = i * i;
            while j < b {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..b).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

pub fn to_u64(n: &BigInt) -> Option<u64> {
    n.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_matches_sieve() {
        let sieve = primes_below(5000);
        for n in 0..5000u64 {
            assert_eq!(is_prime_u64(n), sieve.binary_search(&n).is_ok(), "n = {n}");
        }
        assert!(is_prime(&BigInt::from(18446744073709551557u64)));
        assert!(!is_prime(&BigInt::from(3215031751u64)));
    }

    #[test]
    fn factorization_reassembles() {
        for n in [1i64, 2, 12, 97 * 89, 600851475143, 1 << 40, 999999000001] {
            let f = factor(&BigInt::from(n));
            let prod = f
                .iter()
                .fold(BigInt::one(), |acc, (p, e)| acc * num_traits::pow(p.clone(), *e as usize));
            assert_eq!(prod, BigInt::from(n));
            assert!(f.iter().all(|(p, _)| is_prime(p)));
        }
    }
}
