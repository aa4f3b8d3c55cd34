//! Small-integer helpers: primality, factorization, modular inverses.

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization as `(prime, exponent)` pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn mod_pow(base: u64, mut e: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc = 1u128 % m128;
    let mut b = base as u128 % m128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        e >>= 1;
    }
    acc as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    let g = num_integer::Integer::extended_gcd(&(a as i128 % m as i128), &(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

/// Primes in `[lo, hi]`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Sum of the base-`p` digits of `m`.
pub fn digit_sum(mut m: u64, p: u64) -> u64 {
    let mut s = 0;
    while m > 0 {
        s += m % p;
        m /= p;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        assert!(is_prime(2) && is_prime(31) && !is_prime(1) && !is_prime(4));
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(euler_phi(930), 240);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(mod_inv(3, 7), Some(5));
        assert_eq!(mod_inv(2, 4), None);
        assert_eq!(mod_pow(3, 6, 7), 1);
        assert_eq!(digit_sum(3 * 25 + 2 * 5 + 4, 5), 9);
        assert_eq!(primes_in(10, 20), vec![11, 13, 17, 19]);
    }
}
