//! Primality testing for field moduli.
//!
//! Below 3.3 * 10^24 the Miller-Rabin test with the first thirteen prime
//! bases is deterministic. Larger candidates go through Baillie-PSW
//! (base-2 strong probable prime plus a strong Lucas test with Selfridge
//! parameters), which has no known counterexample.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

const SMALL_PRIMES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// 3317044064679887385961981, the smallest strong pseudoprime to all of
/// `SMALL_PRIMES`.
const DETERMINISTIC_LIMIT: &str = "3317044064679887385961981";

pub fn is_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let limit: BigUint = DETERMINISTIC_LIMIT.parse().expect("constant parses");
    if *n < limit {
        return SMALL_PRIMES.iter().all(|&a| strong_probable_prime(n, &BigUint::from(a)));
    }
    strong_probable_prime(n, &two) && strong_lucas_probable_prime(n)
}

fn strong_probable_prime(n: &BigUint, base: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    let mut x = base.modpow(&d, n);
    if x == one || x == n_minus_one {
        return true;
    }
    for _ in 1..s {
        x = x.modpow(&BigUint::from(2u32), n);
        if x == n_minus_one {
            return true;
        }
        if x == one {
            return false;
        }
    }
    false
}

fn jacobi(a: &BigInt, n: &BigInt) -> i32 {
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut result = 1;
    let three = BigInt::from(3);
    let four = BigInt::from(4);
    let five = BigInt::from(5);
    let eight = BigInt::from(8);
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = n.mod_floor(&eight);
            if r == three || r == five {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&four) == three && n.mod_floor(&four) == three {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

fn is_square(n: &BigUint) -> bool {
    let r = n.sqrt();
    &r * &r == *n
}

fn strong_lucas_probable_prime(n: &BigUint) -> bool {
    if is_square(n) {
        return false;
    }
    let n_int = BigInt::from(n.clone());
    // Selfridge method A: first D in 5, -7, 9, -11, ... with (D/n) = -1.
    let mut d = BigInt::from(5);
    loop {
        match jacobi(&d, &n_int) {
            -1 => break,
            0 if d.abs() != n_int => {
                return false;
            }
            _ => {}
        }
        d = if d.is_positive() { -(d + 2i32) } else { -(d - 2i32) };
    }
    let p = BigInt::one();
    let q: BigInt = (BigInt::one() - &d) / 4;

    let n_plus_one = n + 1u32;
    let s = n_plus_one.trailing_zeros().unwrap_or(0);
    let k = &n_plus_one >> s;

    let m = &n_int;
    let modn = |x: BigInt| x.mod_floor(m);
    let half = |x: BigInt| {
        let x = if x.is_odd() { x + m } else { x };
        modn(x >> 1)
    };

    // Left-to-right binary ladder for U_k, V_k, Q^k.
    let mut u = BigInt::one();
    let mut v = p.clone();
    let mut qk = modn(q.clone());
    let bits = k.bits();
    for i in (0..bits - 1).rev() {
        u = modn(&u * &v);
        v = modn(&v * &v - (&qk << 1));
        qk = modn(&qk * &qk);
        if k.bit(i) {
            let u_next = half(&p * &u + &v);
            let v_next = half(&d * &u + &p * &v);
            u = u_next;
            v = v_next;
            qk = modn(&qk * &q);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = modn(&v * &v - (&qk << 1));
        if v.is_zero() {
            return true;
        }
        qk = modn(&qk * &qk);
    }
    false
}

/// Convenience for tests and small moduli.
pub fn is_prime_u64(n: u64) -> bool {
    is_prime(&BigUint::from(n))
}
