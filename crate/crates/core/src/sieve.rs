//! Segmented sieve of Eratosthenes.

/// Segment width in numbers (odd and even); fits comfortably in L2.
const SEGMENT: u64 = 1 << 16;

/// Primes up to `sqrt(limit)` by a plain sieve.
fn base_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// All primes in `[lo, hi]`, ascending.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if hi < 2 || lo > hi {
        return out;
    }
    let lo = lo.max(2);
    let small = base_primes(isqrt(hi));
    let mut mark = vec![false; SEGMENT as usize];
    let mut start = lo;
    while start <= hi {
        let end = (start + SEGMENT - 1).min(hi);
        let width = (end - start + 1) as usize;
        mark[..width].fill(false);
        for &q in &small {
            if q * q > end {
                break;
            }
            let first = (start.div_ceil(q) * q).max(q * q);
            let mut m = first;
            while m <= end {
                mark[(m - start) as usize] = true;
                m += q;
            }
        }
        out.extend((0..width).filter(|&i| !mark[i]).map(|i| start + i as u64));
        start = end + 1;
    }
    out
}

pub fn primes_up_to(x: u64) -> Vec<u64> {
    primes_in_range(2, x)
}

/// Primes `p <= x` with `p = 1 (mod 3)`.
pub fn primes_one_mod_three(lo: u64, hi: u64) -> Vec<u64> {
    primes_in_range(lo, hi).into_iter().filter(|p| p % 3 == 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::is_prime;

    #[test]
    fn matches_primality_test() {
        let sieved = primes_up_to(200_000);
        let direct: Vec<u64> = (0..=200_000).filter(|&m| is_prime(m)).collect();
        assert_eq!(sieved, direct);
    }

    #[test]
    fn ranges() {
        assert_eq!(primes_in_range(0, 1), Vec::<u64>::new());
        assert_eq!(primes_in_range(10, 30), vec![11, 13, 17, 19, 23, 29]);
        assert_eq!(primes_in_range(30, 10), Vec::<u64>::new());
        assert_eq!(primes_one_mod_three(2, 50), vec![7, 13, 19, 31, 37, 43]);
        let far = primes_in_range(1_000_000_000, 1_000_000_100);
        let direct: Vec<u64> = (1_000_000_000..=1_000_000_100).filter(|&m| is_prime(m)).collect();
        assert_eq!(far, direct);
        assert_eq!(far[0], 1_000_000_007);
        assert_eq!(primes_up_to(500).len(), 95);
    }
}
