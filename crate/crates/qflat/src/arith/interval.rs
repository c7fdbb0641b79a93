//! Outward-rounded real interval arithmetic over dyadic rationals.
//!
//! Every constructor and operation preserves containment of the true value,
//! so any inequality certified against an interval bound is safe. Rounding
//! is only performed where series truncation or root extraction forces it;
//! field operations on rational bounds stay exact until `round` is called.

use super::{bernoulli, QuadraticCharacter};
use crate::{rat_int, Int, Rational};
use num::traits::{One, Signed, Zero};

/// Conservatively true when |x| < 2^-bits, judged from bit lengths alone.
fn magnitude_below(x: &Rational, bits: u32) -> bool {
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    nb - db < -(bits as i64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealInterval {
    lo: Rational,
    hi: Rational,
    pub precision_bits: u32,
}

impl RealInterval {
    pub fn exact(x: Rational, precision_bits: u32) -> Self {
        Self {
            lo: x.clone(),
            hi: x,
            precision_bits,
        }
    }

    pub fn from_bounds(lo: Rational, hi: Rational, precision_bits: u32) -> Self {
        assert!(lo <= hi, "interval bounds out of order");
        Self {
            lo,
            hi,
            precision_bits,
        }
    }

    pub fn lower(&self) -> &Rational {
        &self.lo
    }

    pub fn upper(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Round both endpoints outward to dyadics with `bits` fractional bits.
    pub fn round(&self, bits: u32) -> Self {
        Self {
            lo: dyadic_round(&self.lo, bits, false),
            hi: dyadic_round(&self.hi, bits, true),
            precision_bits: bits,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
            precision_bits: self.precision_bits.min(other.precision_bits),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
            precision_bits: self.precision_bits.min(other.precision_bits),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
            precision_bits: self.precision_bits,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Self {
            lo,
            hi,
            precision_bits: self.precision_bits.min(other.precision_bits),
        }
    }

    /// Reciprocal; the interval must not contain zero.
    pub fn recip(&self) -> Self {
        assert!(
            self.lo.is_positive() || self.hi.is_negative(),
            "interval straddles zero in recip"
        );
        Self {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
            precision_bits: self.precision_bits,
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.recip())
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut acc = Self::exact(Rational::one(), self.precision_bits);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Square root of a nonnegative interval, outward-rounded to the
    /// interval's own precision.
    pub fn sqrt(&self) -> Self {
        assert!(!self.lo.is_negative(), "sqrt of a negative interval");
        let bits = self.precision_bits;
        Self {
            lo: dyadic_sqrt(&self.lo, bits, false),
            hi: dyadic_sqrt(&self.hi, bits, true),
            precision_bits: bits,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let a = &self.lo * c;
        let b = &self.hi * c;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Self {
            lo,
            hi,
            precision_bits: self.precision_bits,
        }
    }
}

/// Round p/q to a dyadic with `bits` fractional bits, toward +inf when `up`.
fn dyadic_round(x: &Rational, bits: u32, up: bool) -> Rational {
    let scale = Int::one() << bits;
    let scaled = x * Rational::from(scale.clone());
    let floor = scaled.floor().to_integer();
    let m = if up && Rational::from(floor.clone()) != scaled {
        floor + 1
    } else {
        floor
    };
    Rational::new(m, scale)
}

/// Dyadic enclosure of sqrt(x) with `bits` fractional bits.
fn dyadic_sqrt(x: &Rational, bits: u32, up: bool) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    let scale = Int::one() << bits;
    // sqrt(p/q) ~ isqrt(p * 4^bits / q) / 2^bits with directed rounding
    let t = x.numer() * (&scale * &scale);
    let (quot, rem) = num::Integer::div_rem(&t, x.denom());
    if up {
        let target = if rem.is_zero() { quot } else { quot + 1 };
        let mut s = target.sqrt();
        if &s * &s < target {
            s += 1;
        }
        Rational::new(s, scale)
    } else {
        let s = quot.sqrt();
        Rational::new(s, scale)
    }
}

/// Enclosure of π via Machin's formula with alternating-series tail bounds.
pub fn pi(precision_bits: u32) -> RealInterval {
    let a = arctan_inv(5, precision_bits + 8);
    let b = arctan_inv(239, precision_bits + 8);
    a.scale(&rat_int(16))
        .sub(&b.scale(&rat_int(4)))
        .round(precision_bits)
}

/// arctan(1/x) for integer x >= 2, by the alternating Taylor series.
fn arctan_inv(x: i64, precision_bits: u32) -> RealInterval {
    let xr = rat_int(x);
    let x2 = &xr * &xr;
    let mut term = xr.recip();
    let mut sum = Rational::zero();
    let mut sign = true;
    let mut k = 0u32;
    loop {
        let contribution = &term / rat_int(2 * k as i64 + 1);
        // alternating series: partial sums bracket the limit by the next term
        if magnitude_below(&contribution, precision_bits + 4) {
            return if sign {
                RealInterval::from_bounds(sum.clone(), sum + contribution, precision_bits)
            } else {
                RealInterval::from_bounds(&sum - &contribution, sum, precision_bits)
            };
        }
        if sign {
            sum += contribution;
        } else {
            sum -= contribution;
        }
        sign = !sign;
        term /= &x2;
        k += 1;
    }
}

/// Enclosure of ζ(r) for integer r >= 2 by Euler-Maclaurin with an explicit
/// first-omitted-term remainder bound.
pub fn zeta_real(r: u32, precision_bits: u32) -> RealInterval {
    assert!(r >= 2);
    let m: i64 = 32;
    let mr = rat_int(m);
    let mut sum = Rational::zero();
    for k in 1..m {
        sum += pow_rat(&rat_int(k), r).recip();
    }
    // integral and half-term corrections at M
    sum += pow_rat(&mr, r - 1).recip() / rat_int(r as i64 - 1);
    sum += pow_rat(&mr, r).recip() / rat_int(2);
    let term = |j: usize| -> Rational {
        // B_{2j}/(2j)! * r(r+1)...(r+2j-2) * M^{-(r+2j-1)}
        let mut c = Rational::one();
        for i in 0..(2 * j - 1) {
            c *= rat_int(r as i64 + i as i64);
        }
        let mut fact = Rational::one();
        for i in 1..=2 * j {
            fact *= rat_int(i as i64);
        }
        bernoulli(2 * j) / fact * c * pow_rat(&mr, r + 2 * j as u32 - 1).recip()
    };
    let mut j = 1usize;
    loop {
        let t = term(j);
        let next = term(j + 1);
        let next_abs = if next.is_negative() { -next } else { next };
        // remainder after the j-th correction is bounded by the first
        // omitted term for the completely monotone integrand x^{-r}
        if magnitude_below(&next_abs, precision_bits + 4) {
            sum += t;
            return RealInterval::from_bounds(&sum - &next_abs, &sum + &next_abs, precision_bits)
                .round(precision_bits);
        }
        sum += t;
        j += 1;
    }
}

/// Γ(r) = (r-1)! for integer r >= 1, exact (a width-zero interval).
pub fn gamma_int(r: u32, precision_bits: u32) -> RealInterval {
    assert!(r >= 1);
    let mut f = Int::one();
    for i in 1..r {
        f *= Int::from(i);
    }
    RealInterval::exact(Rational::from(f), precision_bits)
}

fn pow_rat(x: &Rational, e: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// Enclosure of the Hurwitz zeta ζ(r, x) for integer r >= 2 and rational
/// x in (0, 1], by Euler-Maclaurin with a first-omitted-term remainder.
fn hurwitz_zeta(r: u32, x: &Rational, precision_bits: u32) -> RealInterval {
    let m: i64 = 24;
    let mut sum = Rational::zero();
    for k in 0..m {
        sum += pow_rat(&(rat_int(k) + x), r).recip();
    }
    let mx = rat_int(m) + x;
    sum += pow_rat(&mx, r - 1).recip() / rat_int(r as i64 - 1);
    sum += pow_rat(&mx, r).recip() / rat_int(2);
    let term = |j: usize| -> Rational {
        let mut c = Rational::one();
        for i in 0..(2 * j - 1) {
            c *= rat_int(r as i64 + i as i64);
        }
        let mut fact = Rational::one();
        for i in 1..=2 * j {
            fact *= rat_int(i as i64);
        }
        bernoulli(2 * j) / fact * c * pow_rat(&mx, r + 2 * j as u32 - 1).recip()
    };
    let mut j = 1usize;
    loop {
        let t = term(j);
        let next = term(j + 1);
        let next_abs = if next.is_negative() { -next } else { next };
        if magnitude_below(&next_abs, precision_bits + 4) {
            sum += t;
            return RealInterval::from_bounds(&sum - &next_abs, &sum + &next_abs, precision_bits);
        }
        sum += t;
        j += 1;
    }
}

/// Enclosure of L(r, χ) for integer r >= 2 via the Hurwitz decomposition
/// L(r, χ) = q^{-r} Σ_{a=1}^{q} χ(a) ζ(r, a/q).
pub fn l_value_numeric(chi: &QuadraticCharacter, r: u32, precision_bits: u32) -> RealInterval {
    assert!(r >= 2);
    let q = chi.conductor() as i64;
    let work = precision_bits + 16;
    let mut acc = RealInterval::exact(Rational::zero(), work);
    for a in 1..=q {
        let c = chi.eval(a);
        if c == 0 {
            continue;
        }
        let z = hurwitz_zeta(r, &(rat_int(a) / rat_int(q)), work);
        acc = if c > 0 { acc.add(&z) } else { acc.sub(&z) };
        acc = acc.round(work);
    }
    acc.scale(&pow_rat(&rat_int(q), r).recip())
        .round(precision_bits)
}

/// Enclosure of the functional-equation expression
/// 2 (2π)^{-r} q^{r-1/2} Γ(r) L(r, χ), which equals |L(1-r, χ)| for a
/// primitive quadratic χ of conductor q when r matches the parity of χ.
pub fn functional_equation_rhs(
    chi: &QuadraticCharacter,
    r: u32,
    precision_bits: u32,
) -> RealInterval {
    let work = precision_bits + 24;
    let two_pi = pi(work).scale(&rat_int(2));
    let q = rat_int(chi.conductor() as i64);
    let q_pow = RealInterval::exact(pow_rat(&q, r - 1), work);
    let q_sqrt = RealInterval::exact(q, work).sqrt();
    let l = l_value_numeric(chi, r, work);
    gamma_int(r, work)
        .scale(&rat_int(2))
        .mul(&two_pi.powi(r).recip())
        .mul(&q_pow)
        .mul(&q_sqrt)
        .mul(&l)
        .round(precision_bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{dirichlet_l_special, rational_abs};
    use crate::rat;

    fn width_below(iv: &RealInterval, bits: u32) -> bool {
        iv.width() <= Rational::new(Int::one(), Int::one() << bits)
    }

    #[test]
    fn gamma_exact() {
        let g = gamma_int(4, 32);
        assert_eq!(g.lower(), &rat_int(6));
        assert_eq!(g.width(), Rational::zero());
    }

    #[test]
    fn pi_squared_encloses() {
        let p = pi(40);
        let p2 = p.powi(2).round(30);
        // 9.8696044 = π², checked against a coarse rational sandwich
        assert!(p2.lower() > &rat(98696, 10001));
        assert!(p2.upper() < &rat(98697, 10000));
        assert!(width_below(&p2, 28));
    }

    #[test]
    fn zeta2_matches_pi_squared_over_six() {
        let z = zeta_real(2, 40);
        let target = pi(60).powi(2).scale(&rat(1, 6));
        assert!(z.lower() <= target.upper() && target.lower() <= z.upper());
        assert!(width_below(&z, 30));
    }

    #[test]
    fn zeta_agrees_across_precisions() {
        for r in 2..=8 {
            let a = zeta_real(r, 30);
            let b = zeta_real(r, 100);
            assert!(a.lower() <= b.upper() && b.lower() <= a.upper(), "r = {r}");
            assert!(width_below(&b, 90));
        }
    }

    #[test]
    fn interval_ops_preserve_containment() {
        let a = RealInterval::from_bounds(rat(1, 3), rat(1, 2), 30);
        let b = RealInterval::from_bounds(rat(-3, 2), rat(2, 1), 30);
        let s = a.add(&b);
        assert!(s.contains(&(rat(1, 3) + rat(-3, 2))));
        assert!(s.contains(&(rat(1, 2) + rat(2, 1))));
        let m = a.mul(&b);
        assert!(m.contains(&(rat(1, 2) * rat(-3, 2))));
        assert!(m.contains(&(rat(1, 3) * rat(2, 1))));
        let q = b.div(&a);
        assert!(q.contains(&(rat(-3, 2) / rat(1, 3))));
        let r = a.sqrt();
        assert!(r.lower() * r.lower() <= rat(1, 3));
        assert!(r.upper() * r.upper() >= rat(1, 2));
    }

    #[test]
    fn functional_equation_cross_check() {
        // |L(1-r, χ)| from generalized Bernoulli numbers must fall inside the
        // numeric functional-equation interval, width <= 2^-20, for all
        // fundamental |D| <= 40 and matching r <= 5.
        for d in -40i64..=40 {
            let chi = match QuadraticCharacter::from_fundamental(d) {
                Ok(c) => c,
                Err(_) => continue,
            };
            if chi.is_trivial() {
                continue;
            }
            for r in 2..=5u32 {
                if (r % 2 == 0) != (d > 0) {
                    continue;
                }
                let exact = rational_abs(&dirichlet_l_special(r as usize, &chi).unwrap());
                let rhs = functional_equation_rhs(&chi, r, 30);
                assert!(
                    rhs.contains(&exact),
                    "functional equation failed for D = {d}, r = {r}"
                );
                assert!(width_below(&rhs, 20), "interval too wide for D = {d}, r = {r}");
            }
        }
    }
}
