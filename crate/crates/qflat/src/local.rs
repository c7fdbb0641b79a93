//! Local invariants of quadratic spaces over the completions of Q.
//!
//! Squareclasses are kept in canonical form so equality is structural: at an
//! odd prime the unit part is 1 or the least positive nonresidue, at p = 2 it
//! is one of {1, 3, 5, 7}, and at the real place only the sign survives.
//! Standard invariants (n, d, c) translate to and from the GHY data (δ, w)
//! through the anisotropic-dimension case split.

use crate::arith::kronecker;
use crate::error::{Error, Result};
use crate::mass::MassType;
use crate::{Int, Rational};
use num::traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    Real,
    Finite(u64),
}

impl Place {
    pub fn prime(&self) -> Option<u64> {
        match self {
            Place::Real => None,
            Place::Finite(p) => Some(*p),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Place::Finite(_))
    }
}

impl std::fmt::Display for Place {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Place::Real => write!(f, "oo"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// Least positive quadratic nonresidue mod an odd prime.
pub fn least_nonresidue(p: u64) -> u64 {
    (2..).find(|&u| kronecker(u as i64, p as i64) == -1).unwrap()
}

/// An element of Q_v^x / (Q_v^x)^2 in canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SquareClass {
    pub place: Place,
    unit: i64,
    val_parity: u8,
}

impl SquareClass {
    pub fn unit_part(&self) -> i64 {
        self.unit
    }

    pub fn val_parity(&self) -> u8 {
        self.val_parity
    }

    /// The class of 1.
    pub fn one(place: Place) -> Self {
        SquareClass {
            place,
            unit: 1,
            val_parity: 0,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.unit == 1 && self.val_parity == 0
    }

    /// Canonical rational representative: unit * p^val_parity (sign at oo).
    pub fn representative(&self) -> Rational {
        match self.place {
            Place::Real => Rational::from(Int::from(self.unit)),
            Place::Finite(p) => {
                let mut r = self.unit;
                if self.val_parity == 1 {
                    r *= p as i64;
                }
                Rational::from(Int::from(r))
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.place != other.place {
            return Err(Error::PlaceMismatch);
        }
        match self.place {
            Place::Real => Ok(SquareClass {
                place: self.place,
                unit: self.unit * other.unit,
                val_parity: 0,
            }),
            Place::Finite(2) => Ok(SquareClass {
                place: self.place,
                unit: (self.unit * other.unit).rem_euclid(8),
                val_parity: self.val_parity ^ other.val_parity,
            }),
            Place::Finite(p) => {
                let prod = self.unit * other.unit;
                // unit parts are 1 or the fixed nonresidue u; u*u is a residue
                let u = least_nonresidue(p) as i64;
                let unit = if prod == u { u } else { 1 };
                Ok(SquareClass {
                    place: self.place,
                    unit,
                    val_parity: self.val_parity ^ other.val_parity,
                })
            }
        }
    }

    /// All squareclasses at a place: 2 real, 4 at odd p, 8 at p = 2.
    pub fn all(place: Place) -> Vec<SquareClass> {
        match place {
            Place::Real => vec![
                SquareClass {
                    place,
                    unit: 1,
                    val_parity: 0,
                },
                SquareClass {
                    place,
                    unit: -1,
                    val_parity: 0,
                },
            ],
            Place::Finite(2) => {
                let mut out = Vec::new();
                for unit in [1i64, 3, 5, 7] {
                    for val_parity in [0u8, 1] {
                        out.push(SquareClass {
                            place,
                            unit,
                            val_parity,
                        });
                    }
                }
                out
            }
            Place::Finite(p) => {
                let u = least_nonresidue(p) as i64;
                let mut out = Vec::new();
                for unit in [1i64, u] {
                    for val_parity in [0u8, 1] {
                        out.push(SquareClass {
                            place,
                            unit,
                            val_parity,
                        });
                    }
                }
                out
            }
        }
    }
}

fn mod_u(x: &Int, m: u64) -> u64 {
    let r = x % Int::from(m);
    let r = if r.is_negative() { r + Int::from(m) } else { r };
    let digits = r.to_u64_digits().1;
    if digits.is_empty() {
        0
    } else {
        digits[0]
    }
}

fn ord_p(x: &Int, p: u64) -> (u32, Int) {
    assert!(!x.is_zero());
    let mut e = 0;
    let mut y = x.clone();
    let pp = Int::from(p);
    loop {
        let (q, r) = num::Integer::div_rem(&y, &pp);
        if r.is_zero() {
            y = q;
            e += 1;
        } else {
            return (e, y);
        }
    }
}

fn modpow_u64(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        exp >>= 1;
    }
    acc as u64
}

/// Canonical squareclass of a nonzero rational at a place.
pub fn squareclass_of(t: &Rational, v: Place) -> Result<SquareClass> {
    if t.is_zero() {
        return Err(Error::ZeroInput("squareclass_of"));
    }
    match v {
        Place::Real => Ok(SquareClass {
            place: v,
            unit: if t.is_positive() { 1 } else { -1 },
            val_parity: 0,
        }),
        Place::Finite(p) => {
            let (en, nu) = ord_p(t.numer(), p);
            let (ed, du) = ord_p(t.denom(), p);
            let val_parity = ((en + ed) % 2) as u8;
            if p == 2 {
                // odd units are self-inverse mod 8
                let unit = (mod_u(&nu, 8) * mod_u(&du, 8) % 8) as i64;
                Ok(SquareClass {
                    place: v,
                    unit,
                    val_parity,
                })
            } else {
                let inv = modpow_u64(mod_u(&du, p), p - 2, p);
                let u = mod_u(&nu, p) % p * inv % p;
                let unit = if kronecker(u as i64, p as i64) == 1 {
                    1
                } else {
                    least_nonresidue(p) as i64
                };
                Ok(SquareClass {
                    place: v,
                    unit,
                    val_parity,
                })
            }
        }
    }
}

/// Hilbert symbol on canonical squareclasses.
pub fn hilbert_classes(a: &SquareClass, b: &SquareClass) -> i8 {
    debug_assert_eq!(a.place, b.place);
    match a.place {
        Place::Real => {
            if a.unit < 0 && b.unit < 0 {
                -1
            } else {
                1
            }
        }
        Place::Finite(2) => {
            let eps = |u: i64| ((u - 1) / 2).rem_euclid(2);
            let omega = |u: i64| ((u * u - 1) / 8).rem_euclid(2);
            let e = eps(a.unit) * eps(b.unit)
                + a.val_parity as i64 * omega(b.unit)
                + b.val_parity as i64 * omega(a.unit);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Finite(p) => {
            let leg = |u: i64| kronecker(u, p as i64);
            let mut s = 1i32;
            if a.val_parity == 1 && b.val_parity == 1 && p % 4 == 3 {
                s = -s;
            }
            if b.val_parity == 1 {
                s *= leg(a.unit);
            }
            if a.val_parity == 1 {
                s *= leg(b.unit);
            }
            s as i8
        }
    }
}

/// Hilbert symbol (a, b)_v of nonzero rationals: +1 exactly when
/// a x^2 + b y^2 = z^2 has a nontrivial solution over Q_v.
pub fn hilbert_symbol(a: &Rational, b: &Rational, v: Place) -> Result<i8> {
    let ca = squareclass_of(a, v)?;
    let cb = squareclass_of(b, v)?;
    Ok(hilbert_classes(&ca, &cb))
}

/// s^e for symbols valued in {±1}.
fn sym_pow(s: i8, e: usize) -> i8 {
    if e % 2 == 0 {
        1
    } else {
        s
    }
}

/// Standard local invariants of a quadratic space over Q_v.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalStdInvariants {
    pub place: Place,
    pub n: usize,
    pub d: SquareClass,
    pub c: i8,
}

/// Invariants of the diagonal form a_1 x_1^2 + ... + a_n x_n^2 at v:
/// d is the class of the product, c the product of Hilbert symbols over pairs.
pub fn std_invariants_of_diagonal(coeffs: &[Rational], v: Place) -> Result<LocalStdInvariants> {
    if coeffs.is_empty() {
        return Err(Error::EmptyDiagonal);
    }
    let classes: Vec<SquareClass> = coeffs
        .iter()
        .map(|a| squareclass_of(a, v))
        .collect::<Result<_>>()?;
    let mut d = SquareClass::one(v);
    for cl in &classes {
        d = d.mul(cl)?;
    }
    let mut c = 1i8;
    for i in 0..classes.len() {
        for j in i + 1..classes.len() {
            c *= hilbert_classes(&classes[i], &classes[j]);
        }
    }
    Ok(LocalStdInvariants {
        place: v,
        n: coeffs.len(),
        d,
        c,
    })
}

/// (n, d, c) ⊕ (n', d', c') = (n + n', d d', c c' (d, d')_v).
pub fn direct_sum_invariants(
    a: &LocalStdInvariants,
    b: &LocalStdInvariants,
) -> Result<LocalStdInvariants> {
    if a.place != b.place {
        return Err(Error::PlaceMismatch);
    }
    Ok(LocalStdInvariants {
        place: a.place,
        n: a.n + b.n,
        d: a.d.mul(&b.d)?,
        c: a.c * b.c * hilbert_classes(&a.d, &b.d),
    })
}

pub(crate) fn class_of_int(k: i64, v: Place) -> SquareClass {
    squareclass_of(&Rational::from(Int::from(k)), v).unwrap()
}

/// Isotropy over Q_p from (n, d, c) by the standard criteria.
pub(crate) fn is_isotropic(inv: &LocalStdInvariants) -> bool {
    let v = inv.place;
    let minus_one = class_of_int(-1, v);
    match inv.n {
        0 | 1 => false,
        2 => inv.d == minus_one,
        3 => {
            let minus_d = minus_one.mul(&inv.d).unwrap();
            inv.c != -hilbert_classes(&minus_one, &minus_d)
        }
        4 => !(inv.d.is_trivial() && inv.c == -hilbert_classes(&minus_one, &minus_one)),
        _ => true,
    }
}

/// Dimension of the maximal anisotropic subspace, in {0, 1, 2, 3, 4}.
pub fn anisotropic_dimension(inv: &LocalStdInvariants) -> Result<usize> {
    if !inv.place.is_finite() {
        return Err(Error::PlaceMismatch);
    }
    let minus_one = class_of_int(-1, inv.place);
    let mut cur = inv.clone();
    while is_isotropic(&cur) {
        // split off a hyperbolic plane: d' = -d, c' = c (-1, d')
        let new_d = minus_one.mul(&cur.d)?;
        let new_c = cur.c * hilbert_classes(&minus_one, &new_d);
        cur = LocalStdInvariants {
            place: cur.place,
            n: cur.n - 2,
            d: new_d,
            c: new_c,
        };
    }
    Ok(cur.n)
}

/// GHY local data of a quadratic space over Q_p.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GhyLocalData {
    pub place: Place,
    pub n: usize,
    pub delta: SquareClass,
    pub w: i8,
    pub mass_type: MassType,
}

/// True iff Q_p(sqrt(δ)) is a ramified quadratic extension. Square classes
/// give a split algebra and return false by convention.
pub fn is_ramified_quadratic_ext(delta: &SquareClass) -> Result<bool> {
    match delta.place {
        Place::Real => Err(Error::PlaceMismatch),
        Place::Finite(2) => Ok(delta.val_parity() == 1 || matches!(delta.unit_part(), 3 | 7)),
        Place::Finite(_) => Ok(delta.val_parity() == 1),
    }
}

/// Mass-type label from (parity of n, δ, w): the cell of the adjustment
/// tables the data selects. The even case splits by the discriminant algebra
/// E_δ (split / unramified field / ramified field); the ramified column
/// applies for both values of w.
pub fn mass_type_of(n: usize, delta: &SquareClass, w: i8) -> Result<MassType> {
    if !delta.place.is_finite() {
        return Err(Error::PlaceMismatch);
    }
    if !matches!(w, 1 | -1) {
        return Err(Error::InconsistentGhy(format!("bad w {w}")));
    }
    if n % 2 == 1 {
        Ok(match (delta.val_parity(), w) {
            (0, 1) => MassType::Generic,
            (0, _) => MassType::OddI,
            (_, 1) => MassType::OddIIPlus,
            _ => MassType::OddIIMinus,
        })
    } else if delta.is_trivial() {
        Ok(if w == 1 {
            MassType::Generic
        } else {
            MassType::EvenI
        })
    } else if is_ramified_quadratic_ext(delta)? {
        Ok(MassType::EvenIII)
    } else {
        Ok(if w == 1 {
            MassType::Generic
        } else {
            MassType::EvenII
        })
    }
}

/// Translate standard invariants to GHY data via the anisotropic dimension.
pub fn ghy_from_std(inv: &LocalStdInvariants) -> Result<GhyLocalData> {
    if !inv.place.is_finite() {
        return Err(Error::PlaceMismatch);
    }
    let v = inv.place;
    let aniso = anisotropic_dimension(inv)?;
    let minus_one = class_of_int(-1, v);
    let r = inv.n / 2;
    let m1m1 = hilbert_classes(&minus_one, &minus_one);
    let sign_pow = |e: usize| -> SquareClass {
        if e % 2 == 1 {
            minus_one
        } else {
            SquareClass::one(v)
        }
    };
    let (delta, w) = if inv.n % 2 == 1 {
        // d = (-1)^r δ, and w is pinned by the anisotropic dimension
        let delta = sign_pow(r).mul(&inv.d)?;
        let w = if aniso == 1 { 1 } else { -1 };
        (delta, w)
    } else {
        match aniso {
            0 => (SquareClass::one(v), 1),
            4 => (SquareClass::one(v), -1),
            2 => {
                let delta = sign_pow(r).mul(&inv.d)?;
                // c = (-1,-1)^{floor((r-1)/2)} w ((-1)^{r-1}, -δ)
                let minus_delta = minus_one.mul(&delta)?;
                let w = inv.c
                    * sym_pow(m1m1, (r - 1) / 2)
                    * sym_pow(hilbert_classes(&minus_one, &minus_delta), r - 1);
                (delta, w)
            }
            _ => {
                return Err(Error::InconsistentGhy(format!(
                    "even dimension with anisotropic dimension {aniso}"
                )))
            }
        }
    };
    let mass_type = mass_type_of(inv.n, &delta, w)?;
    Ok(GhyLocalData {
        place: v,
        n: inv.n,
        delta,
        w,
        mass_type,
    })
}

/// Translate GHY data back to standard invariants by exact table evaluation.
pub fn std_from_ghy(g: &GhyLocalData) -> Result<LocalStdInvariants> {
    if !g.place.is_finite() {
        return Err(Error::PlaceMismatch);
    }
    let v = g.place;
    if !matches!(g.w, 1 | -1) {
        return Err(Error::InconsistentGhy(format!("bad w {}", g.w)));
    }
    let minus_one = class_of_int(-1, v);
    let m1m1 = hilbert_classes(&minus_one, &minus_one);
    let r = g.n / 2;
    let sign_pow = |e: usize| -> SquareClass {
        if e % 2 == 1 {
            minus_one
        } else {
            SquareClass::one(v)
        }
    };
    if g.n % 2 == 1 {
        if g.n == 1 && g.w == -1 {
            return Err(Error::InconsistentGhy(
                "rank 1 admits no anisotropic ternary core".into(),
            ));
        }
        let d = sign_pow(r).mul(&g.delta)?;
        let c = if g.w == 1 {
            sym_pow(m1m1, r / 2) * sym_pow(hilbert_classes(&minus_one, &g.delta), r)
        } else {
            let minus_delta = minus_one.mul(&g.delta)?;
            -(sym_pow(m1m1, (r - 1) / 2)
                * sym_pow(hilbert_classes(&minus_one, &minus_delta), r - 1)
                * hilbert_classes(&minus_one, &g.delta))
        };
        return Ok(LocalStdInvariants {
            place: v,
            n: g.n,
            d,
            c,
        });
    }
    if g.delta.is_trivial() {
        if g.w == -1 && g.n < 4 {
            return Err(Error::InconsistentGhy(
                "square discriminant with w = -1 needs dimension >= 4".into(),
            ));
        }
        let d = sign_pow(r);
        let c = if g.w == 1 {
            sym_pow(m1m1, r / 2)
        } else {
            -sym_pow(m1m1, r / 2)
        };
        Ok(LocalStdInvariants {
            place: v,
            n: g.n,
            d,
            c,
        })
    } else {
        if g.n < 2 {
            return Err(Error::InconsistentGhy("dimension too small".into()));
        }
        let d = sign_pow(r).mul(&g.delta)?;
        let minus_delta = minus_one.mul(&g.delta)?;
        let c = sym_pow(m1m1, (r - 1) / 2)
            * g.w
            * sym_pow(hilbert_classes(&minus_one, &minus_delta), r - 1);
        Ok(LocalStdInvariants {
            place: v,
            n: g.n,
            d,
            c,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat_int;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(Int::from(n), Int::from(d))
    }

    /// Brute-force solubility oracle for a x^2 + b y^2 - z^2 over Q_p:
    /// with squarefree-valuation inputs, a primitive zero mod p^3 (odd p)
    /// or mod 2^5 lifts by Hensel's lemma.
    fn hilbert_oracle(a: i64, b: i64, p: u64) -> i8 {
        let modulus: i64 = if p == 2 { 32 } else { (p * p * p) as i64 };
        let pi = p as i64;
        for x in 0..modulus {
            for y in 0..modulus {
                for z in 0..modulus {
                    if x % pi == 0 && y % pi == 0 && z % pi == 0 {
                        continue;
                    }
                    if (a * x * x + b * y * y - z * z).rem_euclid(modulus) == 0 {
                        return 1;
                    }
                }
            }
        }
        -1
    }

    #[test]
    fn squareclass_examples() {
        let c = squareclass_of(&rat_int(18), Place::Finite(3)).unwrap();
        assert_eq!(c.unit_part(), 2);
        assert_eq!(c.val_parity(), 0);
        let c = squareclass_of(&rat_int(4), Place::Finite(2)).unwrap();
        assert!(c.is_trivial());
        let c = squareclass_of(&rat_int(-5), Place::Real).unwrap();
        assert_eq!(c.unit_part(), -1);
    }

    #[test]
    fn squareclass_counts() {
        assert_eq!(SquareClass::all(Place::Real).len(), 2);
        assert_eq!(SquareClass::all(Place::Finite(2)).len(), 8);
        assert_eq!(SquareClass::all(Place::Finite(7)).len(), 4);
    }

    #[test]
    fn squareclass_square_scaling() {
        for &p in &[2u64, 3, 5, 7, 11] {
            let v = Place::Finite(p);
            for t in [-30i64, -7, -2, 1, 2, 5, 12, 45, 98] {
                let base = squareclass_of(&rat_int(t), v).unwrap();
                for s in [2i64, 3, 6, 10] {
                    let scaled = squareclass_of(&(rat_int(t) * rat(s * s, 1)), v).unwrap();
                    assert_eq!(base, scaled);
                    let scaled = squareclass_of(&(rat_int(t) / rat(s * s, 1)), v).unwrap();
                    assert_eq!(base, scaled);
                }
            }
        }
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(
            hilbert_symbol(&rat_int(1), &rat_int(7), Place::Finite(2)).unwrap(),
            1
        );
        assert_eq!(
            hilbert_symbol(&rat_int(-1), &rat_int(-1), Place::Finite(2)).unwrap(),
            -1
        );
        assert_eq!(
            hilbert_symbol(&rat_int(2), &rat_int(3), Place::Finite(3)).unwrap(),
            -1
        );
        assert_eq!(
            hilbert_symbol(&rat_int(-1), &rat_int(-1), Place::Real).unwrap(),
            -1
        );
        assert!(hilbert_symbol(&rat_int(0), &rat_int(1), Place::Real).is_err());
    }

    #[test]
    fn hilbert_matches_solubility_oracle() {
        for &p in &[2u64, 3, 5] {
            let v = Place::Finite(p);
            for a in SquareClass::all(v) {
                for b in SquareClass::all(v) {
                    let ra: i64 = a.representative().to_integer().try_into().unwrap();
                    let rb: i64 = b.representative().to_integer().try_into().unwrap();
                    let expected = hilbert_oracle(ra, rb, p);
                    assert_eq!(
                        hilbert_classes(&a, &b),
                        expected,
                        "p = {p}, a = {ra}, b = {rb}"
                    );
                }
            }
        }
    }

    #[test]
    fn hilbert_symmetry_bilinearity() {
        for &p in &[2u64, 3, 5] {
            let v = Place::Finite(p);
            let all = SquareClass::all(v);
            for a in &all {
                let minus_a = class_of_int(-1, v).mul(a).unwrap();
                assert_eq!(hilbert_classes(a, &minus_a), 1);
                for b in &all {
                    assert_eq!(hilbert_classes(a, b), hilbert_classes(b, a));
                    for b2 in &all {
                        let prod = b.mul(b2).unwrap();
                        assert_eq!(
                            hilbert_classes(a, &prod),
                            hilbert_classes(a, b) * hilbert_classes(a, b2)
                        );
                    }
                }
            }
        }
        let v = Place::Real;
        for a in SquareClass::all(v) {
            for b in SquareClass::all(v) {
                assert_eq!(hilbert_classes(&a, &b), hilbert_classes(&b, &a));
            }
        }
    }

    #[test]
    fn hilbert_global_product_formula() {
        // deterministic pseudo-random pairs; product over all places must be 1
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut checked = 0;
        while checked < 200 {
            let a = (next() % 400) as i64 - 200;
            let b = (next() % 400) as i64 - 200;
            if a == 0 || b == 0 {
                continue;
            }
            checked += 1;
            let (ar, br) = (rat_int(a), rat_int(b));
            let mut prod = hilbert_symbol(&ar, &br, Place::Real).unwrap() as i32;
            let mut support = vec![2u64];
            for &(p, _) in crate::arith::factor_u64(a.unsigned_abs())
                .iter()
                .chain(crate::arith::factor_u64(b.unsigned_abs()).iter())
            {
                if !support.contains(&p) {
                    support.push(p);
                }
            }
            for p in support {
                prod *= hilbert_symbol(&ar, &br, Place::Finite(p)).unwrap() as i32;
            }
            assert_eq!(prod, 1, "a = {a}, b = {b}");
        }
    }

    #[test]
    fn diagonal_invariants_examples() {
        let inv =
            std_invariants_of_diagonal(&[rat_int(1), rat_int(1), rat_int(1)], Place::Finite(2))
                .unwrap();
        assert_eq!(inv.n, 3);
        assert!(inv.d.is_trivial());
        assert_eq!(inv.c, 1);

        let inv = std_invariants_of_diagonal(&[rat_int(1)], Place::Finite(5)).unwrap();
        assert_eq!((inv.n, inv.c), (1, 1));
        assert!(inv.d.is_trivial());

        let inv =
            std_invariants_of_diagonal(&[rat_int(2), rat_int(3), rat_int(6)], Place::Finite(5))
                .unwrap();
        assert!(inv.d.is_trivial(), "36 is a square");
        assert!(std_invariants_of_diagonal(&[], Place::Real).is_err());
    }

    #[test]
    fn diagonal_invariants_permutation_and_scaling() {
        let v = Place::Finite(3);
        let base = std_invariants_of_diagonal(&[rat_int(2), rat_int(15), rat_int(7)], v).unwrap();
        let perm = std_invariants_of_diagonal(&[rat_int(15), rat_int(7), rat_int(2)], v).unwrap();
        assert_eq!(base, perm);
        let scaled =
            std_invariants_of_diagonal(&[rat_int(2 * 25), rat_int(15), rat(7, 49)], v).unwrap();
        assert_eq!(base, scaled);
    }

    #[test]
    fn direct_sum_hyperbolic() {
        let v = Place::Finite(2);
        let h = std_invariants_of_diagonal(&[rat_int(1), rat_int(-1)], v).unwrap();
        let hh = direct_sum_invariants(&h, &h).unwrap();
        assert_eq!(hh.n, 4);
        assert!(hh.d.is_trivial());
        assert_eq!(hh.c, -1, "(-1,-1)_2 = -1");
        // direct computation from the diagonalized form x1 x2 + x3 x4
        let direct =
            std_invariants_of_diagonal(&[rat_int(1), rat_int(-1), rat_int(1), rat_int(-1)], v)
                .unwrap();
        assert_eq!(hh, direct);
    }

    #[test]
    fn direct_sum_associativity() {
        let v = Place::Finite(2);
        let parts = [
            std_invariants_of_diagonal(&[rat_int(1), rat_int(3)], v).unwrap(),
            std_invariants_of_diagonal(&[rat_int(2)], v).unwrap(),
            std_invariants_of_diagonal(&[rat_int(7), rat_int(10), rat_int(5)], v).unwrap(),
        ];
        let left = direct_sum_invariants(
            &direct_sum_invariants(&parts[0], &parts[1]).unwrap(),
            &parts[2],
        )
        .unwrap();
        let right = direct_sum_invariants(
            &parts[0],
            &direct_sum_invariants(&parts[1], &parts[2]).unwrap(),
        )
        .unwrap();
        assert_eq!(left, right);
        assert!(direct_sum_invariants(
            &parts[0],
            &std_invariants_of_diagonal(&[rat_int(1)], Place::Finite(3)).unwrap()
        )
        .is_err());
    }

    /// Primitive-zero search oracle for isotropy of a diagonal form mod p^k.
    fn oracle_isotropic_diag(coeffs: &[i64], p: u64) -> bool {
        let modulus: i64 = if p == 2 { 32 } else { (p * p * p) as i64 };
        let pi = p as i64;
        let n = coeffs.len();
        let mut x = vec![0i64; n];
        loop {
            let mut i = 0;
            while i < n {
                x[i] += 1;
                if x[i] < modulus {
                    break;
                }
                x[i] = 0;
                i += 1;
            }
            if i == n {
                return false;
            }
            if x.iter().all(|&c| c % pi == 0) {
                continue;
            }
            let val: i64 = coeffs
                .iter()
                .zip(&x)
                .map(|(&a, &c)| (a * c % modulus) * c % modulus)
                .sum::<i64>()
                .rem_euclid(modulus);
            if val == 0 {
                return true;
            }
        }
    }

    #[test]
    fn anisotropic_dimension_examples() {
        let v2 = Place::Finite(2);
        let v5 = Place::Finite(5);
        let three_squares =
            std_invariants_of_diagonal(&[rat_int(1), rat_int(1), rat_int(1)], v2).unwrap();
        assert_eq!(anisotropic_dimension(&three_squares).unwrap(), 3);
        let at5 = std_invariants_of_diagonal(&[rat_int(1), rat_int(1), rat_int(1)], v5).unwrap();
        assert_eq!(anisotropic_dimension(&at5).unwrap(), 1);
        // H^r rows: (2r, (-1)^r, (-1,-1)^{floor(r/2)}) -> 0
        for &p in &[2u64, 3, 5] {
            let v = Place::Finite(p);
            let h = std_invariants_of_diagonal(&[rat_int(1), rat_int(-1)], v).unwrap();
            let mut acc = h.clone();
            for _ in 1..4 {
                assert_eq!(anisotropic_dimension(&acc).unwrap(), 0);
                acc = direct_sum_invariants(&acc, &h).unwrap();
            }
        }
    }

    #[test]
    fn isotropy_matches_search_oracle() {
        let pools: [&[i64]; 10] = [
            &[1, 1, 1],
            &[1, 1, 3],
            &[1, 2, 7],
            &[2, 3, 6],
            &[1, 5, 5],
            &[1, 1, 1, 1],
            &[1, 1, 2, 3],
            &[1, 3, 5, 15],
            &[2, 2, 5, 10],
            &[1, 7, 10, 14],
        ];
        for &p in &[2u64, 3, 5] {
            let v = Place::Finite(p);
            for coeffs in pools {
                let rats: Vec<Rational> = coeffs.iter().map(|&c| rat_int(c)).collect();
                let inv = std_invariants_of_diagonal(&rats, v).unwrap();
                let expected = oracle_isotropic_diag(coeffs, p);
                assert_eq!(is_isotropic(&inv), expected, "p = {p}, coeffs = {coeffs:?}");
            }
        }
    }

    #[test]
    fn ghy_translation_examples() {
        let v2 = Place::Finite(2);
        let v5 = Place::Finite(5);
        let inv = std_invariants_of_diagonal(&[rat_int(1), rat_int(1), rat_int(1)], v2).unwrap();
        let g = ghy_from_std(&inv).unwrap();
        assert_eq!(g.delta, squareclass_of(&rat_int(-1), v2).unwrap());
        assert_eq!(g.w, -1);
        assert_eq!(g.mass_type, MassType::OddI);

        let inv5 = std_invariants_of_diagonal(&[rat_int(1), rat_int(1), rat_int(1)], v5).unwrap();
        let g5 = ghy_from_std(&inv5).unwrap();
        assert_eq!(g5.delta, squareclass_of(&rat_int(-1), v5).unwrap());
        assert!(g5.delta.is_trivial(), "-1 is a square mod 5");
        assert_eq!(g5.w, 1);
        assert_eq!(g5.mass_type, MassType::Generic);

        // quaternary anisotropic at 2: delta = 1, w = -1, type EvenI
        let inv4 =
            std_invariants_of_diagonal(&[rat_int(1), rat_int(1), rat_int(1), rat_int(1)], v2)
                .unwrap();
        let g4 = ghy_from_std(&inv4).unwrap();
        assert!(g4.delta.is_trivial());
        assert_eq!(g4.w, -1);
        assert_eq!(g4.mass_type, MassType::EvenI);

        // inverse of the first example
        let back = std_from_ghy(&g).unwrap();
        assert_eq!(back, inv);
    }

    #[test]
    fn ghy_round_trip_exhaustive() {
        for &p in &[2u64, 3, 5, 7] {
            let v = Place::Finite(p);
            for n in 3..=10usize {
                for delta in SquareClass::all(v) {
                    for w in [1i8, -1] {
                        if n % 2 == 0 && delta.is_trivial() && w == -1 && n < 4 {
                            continue;
                        }
                        let mass_type = match mass_type_of(n, &delta, w) {
                            Ok(t) => t,
                            Err(_) => continue,
                        };
                        let g = GhyLocalData {
                            place: v,
                            n,
                            delta,
                            w,
                            mass_type,
                        };
                        let inv = std_from_ghy(&g).unwrap();
                        let back = ghy_from_std(&inv).unwrap();
                        // EvenIII admits both w at the same mass type; the
                        // translation must still recover the exact w
                        assert_eq!(back, g, "p = {p}, n = {n}");
                    }
                }
            }
        }
    }

    #[test]
    fn ramified_extension_examples() {
        let v2 = Place::Finite(2);
        let v3 = Place::Finite(3);
        let delta_p = squareclass_of(&rat_int(3), v3).unwrap();
        assert!(is_ramified_quadratic_ext(&delta_p).unwrap());
        let five = squareclass_of(&rat_int(5), v2).unwrap();
        assert!(!is_ramified_quadratic_ext(&five).unwrap());
        let three = squareclass_of(&rat_int(3), v2).unwrap();
        assert!(is_ramified_quadratic_ext(&three).unwrap());
        let square = SquareClass::one(v3);
        assert!(!is_ramified_quadratic_ext(&square).unwrap());
    }
}
