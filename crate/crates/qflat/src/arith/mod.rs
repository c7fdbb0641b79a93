//! Exact rational arithmetic and special values.
//!
//! Bernoulli numbers B_k, the zeta specials ζ(1-2k) = -B_{2k}/2k, generalized
//! Bernoulli numbers B_{k,χ} for quadratic characters χ, and the exact
//! L-values L(1-k, χ) = -B_{k,χ}/k. The [`interval`] submodule provides the
//! certified real bounds (π, ζ(r), Γ(r)) used by the analytic cutoffs.

pub mod interval;

use crate::error::{Error, Result};
use crate::{rat_int, Int, Rational};
use num::traits::{One, Signed, Zero};
use std::sync::Mutex;

static BERNOULLI_CACHE: Mutex<Vec<Option<Rational>>> = Mutex::new(Vec::new());

/// Binomial coefficient C(n, k) as a big integer.
pub fn binomial(n: usize, k: usize) -> Int {
    if k > n {
        return Int::zero();
    }
    let k = k.min(n - k);
    let mut num = Int::one();
    let mut den = Int::one();
    for i in 0..k {
        num *= Int::from(n - i);
        den *= Int::from(i + 1);
    }
    num / den
}

/// Bernoulli number B_k in the convention x/(e^x - 1) = Σ B_k x^k / k!,
/// so B_1 = -1/2. Values are memoized; the whole pipeline stays below
/// rank ~60 so the convolution recurrence is plenty.
pub fn bernoulli(k: usize) -> Rational {
    let mut cache = BERNOULLI_CACHE.lock().unwrap();
    if cache.len() <= k {
        cache.resize(k + 1, None);
    }
    if let Some(v) = &cache[k] {
        return v.clone();
    }
    // Fill every rank up to k with the recurrence sum_{j<=m} C(m+1, j) B_j = 0.
    for m in 0..=k {
        if cache[m].is_some() {
            continue;
        }
        let value = if m == 0 {
            Rational::one()
        } else if m > 1 && m % 2 == 1 {
            Rational::zero()
        } else {
            let mut acc = Rational::zero();
            for j in 0..m {
                acc += Rational::from(binomial(m + 1, j)) * cache[j].as_ref().unwrap();
            }
            -acc / Rational::from(Int::from(m as i64 + 1))
        };
        cache[m] = Some(value);
    }
    cache[k].clone().unwrap()
}

/// ζ(1-2k) = -B_{2k}/(2k), exactly.
pub fn zeta_special(k: usize) -> Rational {
    assert!(k >= 1, "zeta_special requires k >= 1");
    -bernoulli(2 * k) / rat_int(2 * k as i64)
}

/// Kronecker symbol (a/b), extended to all integers.
pub fn kronecker(mut a: i64, mut b: i64) -> i32 {
    if b == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    if a % 2 == 0 && b % 2 == 0 {
        return 0;
    }
    let tab2 = |x: i64| -> i32 {
        // (-1)^((x^2-1)/8) for odd x
        match x.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => unreachable!("tab2 on even argument"),
        }
    };
    let mut k: i32 = 1;
    let mut v = 0;
    while b % 2 == 0 {
        b /= 2;
        v += 1;
    }
    if v % 2 == 1 {
        k = tab2(a);
    }
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    // b odd positive from here on
    loop {
        if a == 0 {
            return if b > 1 { 0 } else { k };
        }
        v = 0;
        while a % 2 == 0 {
            a /= 2;
            v += 1;
        }
        if v % 2 == 1 {
            k *= tab2(b);
        }
        if a.rem_euclid(4) == 3 && b.rem_euclid(4) == 3 {
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}

/// Trial-division factorization of a small positive integer.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0);
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Squarefree positive integers t with |t| <= bound, including 1.
pub fn is_squarefree_u64(n: u64) -> bool {
    factor_u64(n).iter().all(|&(_, e)| e == 1)
}

/// Deterministic Miller-Rabin, valid for all inputs below 2^64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow_u128(a as u128, d as u128, n as u128);
        if x == 1 || x == n as u128 - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = x * x % n as u128;
            if x == n as u128 - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mod_pow_u128(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut acc: u128 = 1;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Brent's cycle variant of Pollard rho; `n` must be odd composite > 1.
fn brent_rho(n: u64) -> u64 {
    let nn = n as u128;
    for c in 1u128.. {
        let f = |x: u128| (x * x + c) % nn;
        let mut x: u128 = 2;
        let mut y: u128 = 2;
        let mut d: u64 = 1;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = num::integer::gcd(x.abs_diff(y) as u64, n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

/// Full factorization of a u64, using rho for large prime cofactors.
pub fn factor_u64_full(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0);
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13] {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            match out.iter_mut().find(|(p, _)| *p == m) {
                Some((_, e)) => *e += 1,
                None => out.push((m, 1)),
            }
        } else {
            let d = brent_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    out.sort_unstable();
    out
}

/// Factor a nonzero big integer; errors when a cofactor exceeds u64.
pub fn factor_int(x: &Int) -> crate::error::Result<Vec<(u64, u32)>> {
    use num::traits::Signed as _;
    if x.is_zero() {
        return Err(crate::error::Error::ZeroInput("factor_int"));
    }
    let abs = x.abs();
    match u64::try_from(&abs) {
        Ok(v) => Ok(factor_u64_full(v)),
        Err(_) => {
            // peel small primes, then insist the cofactor fits in u64
            let mut rest = abs;
            let mut out: Vec<(u64, u32)> = Vec::new();
            for p in 2u64..=100_000 {
                if !is_prime_u64(p) {
                    continue;
                }
                let pp = Int::from(p);
                let mut e = 0;
                loop {
                    let (q, r) = num::Integer::div_rem(&rest, &pp);
                    if r.is_zero() {
                        rest = q;
                        e += 1;
                    } else {
                        break;
                    }
                }
                if e > 0 {
                    out.push((p, e));
                }
                if u64::try_from(&rest).is_ok() {
                    break;
                }
            }
            let tail = u64::try_from(&rest)
                .map_err(|_| crate::error::Error::Unfactorable(x.to_string()))?;
            if tail > 1 {
                for (p, e) in factor_u64_full(tail) {
                    match out.iter_mut().find(|(q, _)| *q == p) {
                        Some((_, ee)) => *ee += e,
                        None => out.push((p, e)),
                    }
                }
            }
            out.sort_unstable();
            Ok(out)
        }
    }
}

/// Positive squarefree part of a nonzero rational: the canonical integer
/// representative of its global squareclass (num * den modulo squares).
pub fn squarefree_part(x: &Rational) -> crate::error::Result<Int> {
    use num::traits::Signed as _;
    if x.is_zero() {
        return Err(crate::error::Error::ZeroInput("squarefree_part"));
    }
    let prod = x.numer().abs() * x.denom();
    let mut out = Int::one();
    for (p, e) in factor_int(&prod)? {
        if e % 2 == 1 {
            out *= Int::from(p);
        }
    }
    Ok(out)
}

/// Primes up to and including `limit`, by sieve.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2;
    while p * p <= n {
        if sieve[p] {
            let mut q = p * p;
            while q <= n {
                sieve[q] = false;
                q += p;
            }
        }
        p += 1;
    }
    (2..=n as u64).filter(|&i| sieve[i as usize]).collect()
}

/// A primitive quadratic Dirichlet character, parametrized by its
/// fundamental discriminant D. χ(m) is the Kronecker symbol (D/m);
/// the conductor is |D| and χ(-1) = sign(D). D = 1 is the trivial character.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticCharacter {
    d: i64,
}

impl QuadraticCharacter {
    /// Build from a fundamental discriminant: D ≡ 1 (mod 4) squarefree, or
    /// D = 4t with t ≡ 2, 3 (mod 4) squarefree.
    pub fn from_fundamental(d: i64) -> Result<Self> {
        if d == 0 {
            return Err(Error::NotFundamental(d));
        }
        let ok = if d.rem_euclid(4) == 1 {
            is_squarefree_u64(d.unsigned_abs())
        } else if d.rem_euclid(4) == 0 {
            let t = d / 4;
            matches!(t.rem_euclid(4), 2 | 3) && is_squarefree_u64(t.unsigned_abs())
        } else {
            false
        };
        if ok {
            Ok(Self { d })
        } else {
            Err(Error::NotFundamental(d))
        }
    }

    /// Character attached to a nonzero squarefree integer t: the Kronecker
    /// character of the field discriminant of Q(√t).
    pub fn from_squarefree(t: i64) -> Result<Self> {
        if t == 0 || !is_squarefree_u64(t.unsigned_abs()) {
            return Err(Error::NotFundamental(t));
        }
        let d = if t.rem_euclid(4) == 1 { t } else { 4 * t };
        Self::from_fundamental(d)
    }

    pub fn discriminant(&self) -> i64 {
        self.d
    }

    pub fn conductor(&self) -> u64 {
        self.d.unsigned_abs()
    }

    /// χ(-1): +1 for even characters (D > 0), -1 for odd (D < 0).
    pub fn parity(&self) -> i8 {
        if self.d > 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.d == 1
    }

    /// Number of distinct primes dividing the conductor.
    pub fn num_prime_divisors(&self) -> u32 {
        if self.d.abs() == 1 {
            0
        } else {
            factor_u64(self.conductor()).len() as u32
        }
    }

    pub fn eval(&self, m: i64) -> i32 {
        kronecker(self.d, m)
    }
}

/// Bernoulli polynomial B_k(x) = Σ_j C(k,j) B_j x^{k-j}, evaluated exactly.
pub fn bernoulli_polynomial(k: usize, x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    let mut xpow = Rational::one();
    // sum from j = k (x^0 term) down so we can build powers of x upward
    for j in (0..=k).rev() {
        acc += Rational::from(binomial(k, j)) * bernoulli(j) * &xpow;
        xpow *= x;
    }
    acc
}

/// Generalized Bernoulli number B_{k,χ} = q^{k-1} Σ_{a=1}^{q} χ(a) B_k(a/q).
/// Vanishes whenever k and χ have mismatched parity.
pub fn generalized_bernoulli(k: usize, chi: &QuadraticCharacter) -> Rational {
    assert!(k >= 1);
    let q = chi.conductor() as i64;
    let qr = rat_int(q);
    let mut acc = Rational::zero();
    for a in 1..=q {
        let c = chi.eval(a);
        if c == 0 {
            continue;
        }
        let term = bernoulli_polynomial(k, &(rat_int(a) / &qr));
        if c > 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    let mut scale = Rational::one();
    for _ in 1..k {
        scale *= &qr;
    }
    acc * scale
}

/// L(1-k, χ) = -B_{k,χ}/k, exactly. Errors when χ(-1) ≠ (-1)^k, in which
/// case the value vanishes and the caller's parity filter is wrong.
pub fn dirichlet_l_special(k: usize, chi: &QuadraticCharacter) -> Result<Rational> {
    assert!(k >= 1);
    let want: i8 = if k % 2 == 0 { 1 } else { -1 };
    if chi.parity() != want {
        return Err(Error::ParityMismatch {
            k,
            chi_parity: chi.parity(),
        });
    }
    Ok(-generalized_bernoulli(k, chi) / rat_int(k as i64))
}

/// |x| for rationals.
pub fn rational_abs(x: &Rational) -> Rational {
    if x.is_negative() {
        -x.clone()
    } else {
        x.clone()
    }
}
