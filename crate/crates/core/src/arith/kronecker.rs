//! Kronecker symbol `(m/n)` for arbitrary integers.

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i64, n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut t = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            t = -t;
        }
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol `(m/n)`, extended to `n = 0`, negative and even `n`.
///
/// Completely multiplicative in both arguments; zero exactly when
/// `gcd(m, n) > 1` (with `(m/0) = ±1` only for `m = ±1`).
pub fn kronecker(m: i64, n: i64) -> i8 {
    if n == 0 {
        return if m == 1 || m == -1 { 1 } else { 0 };
    }
    let mut sign = 1i8;
    let mut n_abs = n.unsigned_abs();
    if n < 0 && m < 0 {
        sign = -1;
    }
    let tz = n_abs.trailing_zeros();
    if tz > 0 {
        if m % 2 == 0 {
            return 0;
        }
        n_abs >>= tz;
        if tz % 2 == 1 {
            let r = m.rem_euclid(8);
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
    }
    if n_abs == 1 {
        return sign;
    }
    sign * jacobi(m, n_abs)
}
