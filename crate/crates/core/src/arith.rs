pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `C(n, k) mod 2` by Lucas: odd iff the bits of `k` are a subset of those of `n`.
pub fn binomial_is_odd(n: u64, k: u64) -> bool {
    k <= n && k & !n == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_values() {
        assert_eq!(gcd(51, 255), 51);
        assert_eq!(gcd(3, 31), 1);
        assert_eq!(gcd(0, 7), 7);
    }

    #[test]
    fn lucas_matches_pascal() {
        let mut row = vec![1u64];
        for n in 0..40u64 {
            for (k, c) in row.iter().enumerate() {
                assert_eq!(binomial_is_odd(n, k as u64), c % 2 == 1, "C({n},{k})");
            }
            let mut next = vec![1u64; row.len() + 1];
            for k in 1..row.len() {
                next[k] = (row[k - 1] + row[k]) % 1024;
            }
            row = next;
        }
    }
}
