//! The exact mass formula for maximal lattices and the eligibility bounds
//! that make the enumeration finite.
//!
//! For a positive definite space of rank n >= 3 the proper mass of the genus
//! of maximal lattices is a rank prefactor times a product of zeta (and, in
//! even rank, L-) specials times local adjustment factors λ_p read off the
//! GHY data. Bounding the λ product bounds everything: conductors of the
//! eligible characters, the primes that can carry non-generic data, and the
//! admissible local types at each of them.

use crate::arith::interval::{gamma_int, pi, zeta_real, RealInterval};
use crate::arith::{
    dirichlet_l_special, factor_u64, is_prime_u64, rational_abs, zeta_special, QuadraticCharacter,
};
use crate::error::{Error, Result};
use crate::local::{is_ramified_quadratic_ext, squareclass_of, Place};
use crate::space::GlobalProfile;
use crate::{rat, rat_int, Int, Rational};
use num::traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Cell label of the local mass adjustment tables. `Generic` stands for the
/// cells with λ = 1 that are never stored explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MassType {
    Generic,
    OddI,
    OddIIPlus,
    OddIIMinus,
    EvenI,
    EvenII,
    EvenIII,
}

impl MassType {
    pub fn is_odd_rank(&self) -> bool {
        matches!(self, MassType::OddI | MassType::OddIIPlus | MassType::OddIIMinus)
    }

    pub fn is_even_rank(&self) -> bool {
        matches!(self, MassType::EvenI | MassType::EvenII | MassType::EvenIII)
    }
}

impl std::fmt::Display for MassType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MassType::Generic => "--",
            MassType::OddI => "I",
            MassType::OddIIPlus => "II+",
            MassType::OddIIMinus => "II-",
            MassType::EvenI => "I",
            MassType::EvenII => "II",
            MassType::EvenIII => "III",
        };
        write!(f, "{s}")
    }
}

fn pow_int(p: u64, e: u32) -> Int {
    Int::from(p).pow(e)
}

/// Local adjustment factor λ_{odd/even, p} for rank n and the given cell.
pub fn lambda_factor(p: u64, n: usize, t: MassType) -> Result<Rational> {
    if n < 3 {
        return Err(Error::BadConfig("lambda_factor needs rank >= 3".into()));
    }
    let parity_ok = match t {
        MassType::Generic => true,
        _ if n % 2 == 1 => t.is_odd_rank(),
        _ => t.is_even_rank(),
    };
    if !parity_ok {
        return Err(Error::InconsistentGhy(format!(
            "mass type {t} does not match rank {n}"
        )));
    }
    let two_p1 = rat_int(2 * (p as i64 + 1));
    Ok(match t {
        MassType::Generic => Rational::one(),
        MassType::OddI => {
            Rational::from(pow_int(p, (n - 1) as u32) - Int::one()) / two_p1
        }
        MassType::OddIIPlus => {
            Rational::from(pow_int(p, ((n - 1) / 2) as u32) + Int::one()) / rat_int(2)
        }
        MassType::OddIIMinus => {
            Rational::from(pow_int(p, ((n - 1) / 2) as u32) - Int::one()) / rat_int(2)
        }
        MassType::EvenI => {
            Rational::from(
                (pow_int(p, ((n - 2) / 2) as u32) - Int::one())
                    * (pow_int(p, (n / 2) as u32) - Int::one()),
            ) / two_p1
        }
        MassType::EvenII => {
            Rational::from(
                (pow_int(p, ((n - 2) / 2) as u32) + Int::one())
                    * (pow_int(p, (n / 2) as u32) + Int::one()),
            ) / two_p1
        }
        MassType::EvenIII => rat(1, 2),
    })
}

/// Product of |ζ(1-2k)| for k = 1..=k_max.
pub fn zeta_abs_product(k_max: usize) -> Rational {
    let mut acc = Rational::one();
    for k in 1..=k_max {
        acc *= rational_abs(&zeta_special(k));
    }
    acc
}

/// 2^e for a (possibly negative) integer exponent.
fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from(Int::one() << e as usize)
    } else {
        Rational::new(Int::one(), Int::one() << (-e) as usize)
    }
}

/// A profile together with its character and exact proper mass.
#[derive(Debug, Clone)]
pub struct GenusMassStatement {
    pub profile: GlobalProfile,
    pub character: Option<QuadraticCharacter>,
    pub proper_mass: Rational,
}

/// Exact proper mass of the genus of maximal lattices on a space with the
/// given profile. For even rank the quadratic character is forced by the
/// profile; passing one that disagrees is an error.
pub fn mass_from_profile(
    prof: &GlobalProfile,
    chi: Option<&QuadraticCharacter>,
) -> Result<GenusMassStatement> {
    let n = prof.n;
    if n < 3 {
        return Err(Error::BadConfig("mass formula needs rank >= 3".into()));
    }
    let character = if n % 2 == 0 {
        let derived = prof.character()?;
        if let Some(given) = chi {
            if *given != derived {
                return Err(Error::IncoherentCharacter {
                    expected: derived.discriminant(),
                    got: given.discriminant(),
                });
            }
        }
        Some(derived)
    } else {
        if chi.is_some() {
            return Err(Error::BadConfig(
                "odd-rank masses take no character".into(),
            ));
        }
        None
    };
    let mut mass = if n % 2 == 1 {
        pow2((3 - n as i64) / 2) * zeta_abs_product((n - 1) / 2)
    } else {
        let chi = character.as_ref().unwrap();
        let l = rational_abs(&dirichlet_l_special(n / 2, chi)?);
        pow2((2 - n as i64) / 2) * l * zeta_abs_product((n - 2) / 2)
    };
    for &p in prof.local.keys() {
        mass *= lambda_factor(p, n, prof.mass_type_at(p)?)?;
    }
    debug_assert!(mass.is_positive());
    Ok(GenusMassStatement {
        profile: prof.clone(),
        character,
        proper_mass: mass,
    })
}

const BOUND_PRECISION: u32 = 96;

/// The interval X = K (2π)^r ζ(r) / (Γ(r) ζ(2r)).
fn cutoff_expression(k_const: &Rational, r: u32, bits: u32) -> RealInterval {
    let two_pi = pi(bits).scale(&rat_int(2));
    two_pi
        .powi(r)
        .mul(&zeta_real(r, bits))
        .div(&gamma_int(r, bits))
        .div(&zeta_real(2 * r, bits))
        .scale(k_const)
}

/// Least N such that every prime power exceeding N certifiably fails the
/// eligibility inequality: N = ceil of the certified upper bound of
/// (K (2π)^r ζ(r) / (Γ(r) ζ(2r)))^{2/(2r-1)}.
pub fn prime_power_cutoff(k_const: &Rational, r: u32) -> u64 {
    assert!(r >= 2 && k_const.is_positive());
    let x = cutoff_expression(k_const, r, BOUND_PRECISION);
    let upper_sq = x.upper() * x.upper();
    // smallest N with N^{2r-1} >= upper bound of X^2
    let mut lo = 1u64;
    let mut hi = 2u64;
    let e = 2 * r - 1;
    let ge = |n: u64| Rational::from(Int::from(n).pow(e)) >= upper_sq;
    while !ge(hi) {
        lo = hi;
        hi *= 2;
    }
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if ge(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if ge(lo) {
        lo
    } else {
        hi
    }
}

/// True iff some divisor q' > 1 of q certifiably satisfies
/// ∏_{p | q'} p^{ord_p(q')(r - 1/2)} / 2 > K (2π)^r ζ(r) / (2 Γ(r) ζ(2r)),
/// which forces |L(1-r, χ)| / 2^t > K for the character of conductor q.
/// Returns true only when the inequality is certain.
pub fn divisor_condition_holds(q: u64, k_const: &Rational, r: u32) -> bool {
    assert!(r >= 2);
    if q <= 1 {
        return false;
    }
    // the optimal divisor keeps exactly the prime powers whose factor
    // exceeds 1; compare squares to avoid half-integer exponents
    let mut best_sq = Rational::one();
    let mut any = false;
    for (p, e) in factor_u64(q) {
        let f_sq = Rational::from(pow_int(p, e * (2 * r - 1))) / rat_int(4);
        if f_sq > Rational::one() {
            best_sq *= f_sq;
            any = true;
        }
    }
    if !any {
        return false;
    }
    let rhs = cutoff_expression(k_const, r, BOUND_PRECISION).scale(&rat(1, 2));
    let rhs_sq_hi = rhs.upper() * rhs.upper();
    best_sq > rhs_sq_hi
}

/// Right-hand side of the twist bound: the largest |L(1-n/2, χ)| / 2^t an
/// even-rank genus of class number <= B can carry.
pub fn twist_bound_rhs(n: usize, bound: &Rational) -> Rational {
    assert!(n % 2 == 0 && n >= 4);
    let extra = if n == 4 { rat_int(2) } else { Rational::one() };
    bound.clone() * pow2((n as i64 - 2) / 2) / zeta_abs_product((n - 2) / 2) * extra
}

/// The (B'', ε) pair bounding single factors (λ <= ε B'') and the product
/// (∏ λ <= B''). B'' scales linearly with the class-number bound.
pub fn bound_bpp(
    n: usize,
    chi: Option<&QuadraticCharacter>,
    bound: &Rational,
) -> Result<(Rational, Rational)> {
    if n < 3 {
        return Err(Error::BadConfig("bound_bpp needs rank >= 3".into()));
    }
    let eps = if n <= 4 { rat_int(2) } else { Rational::one() };
    let bpp = if n % 2 == 1 {
        if chi.is_some() {
            return Err(Error::BadConfig("odd rank takes no character".into()));
        }
        bound.clone() * pow2((n as i64 - 3) / 2) / zeta_abs_product((n - 1) / 2)
    } else {
        let chi = chi.ok_or_else(|| Error::BadConfig("even rank needs a character".into()))?;
        let l = rational_abs(&dirichlet_l_special(n / 2, chi)?);
        if l.is_zero() {
            return Err(Error::ParityMismatch {
                k: n / 2,
                chi_parity: chi.parity(),
            });
        }
        bound.clone() * pow2((n as i64 - 2) / 2) / (l * zeta_abs_product((n - 2) / 2))
    };
    Ok((bpp, eps))
}

/// All mass-eligible primitive quadratic characters for even rank n and
/// class-number bound B: χ(-1) = (-1)^{n/2} and the exact twist bound
/// |L(1-n/2, χ)| / 2^t <= twist_bound_rhs(n, B) holds. The trivial character
/// (discriminant 1) occupies the square-discriminant slot when the parity
/// allows it. The search box is closed by the divisor condition.
pub fn enumerate_characters(n: usize, bound: &Rational) -> Vec<QuadraticCharacter> {
    assert!(n % 2 == 0 && n >= 4);
    let r = (n / 2) as u32;
    let sign: i64 = if (n / 2) % 2 == 0 { 1 } else { -1 };
    let t_rhs = twist_bound_rhs(n, bound);
    let mut out = Vec::new();
    if sign == 1 {
        // trivial slot: |ζ(1 - n/2)|; n/2 must be even for a nonzero value
        let triv = QuadraticCharacter::from_fundamental(1).unwrap();
        if let Ok(l) = dirichlet_l_special(n / 2, &triv) {
            if rational_abs(&l) <= t_rhs {
                out.push(triv);
            }
        }
    }
    // conservative search ceiling: q^{2r-1} <= 4^15 * upper(RHS^2);
    // every fundamental conductor has at most 15 prime factors below it
    let rhs = cutoff_expression(&t_rhs, r, BOUND_PRECISION).scale(&rat(1, 2));
    let ceiling_sq = rhs.upper() * rhs.upper() * Rational::from(Int::from(4).pow(15));
    let mut q_stop = 2u64;
    while Rational::from(Int::from(q_stop).pow(2 * r - 1)) <= ceiling_sq {
        q_stop *= 2;
    }
    assert!(
        q_stop < 614_889_782_588_491_410,
        "conductor ceiling exceeds the 15-prime assumption"
    );
    for q in 2..=q_stop {
        let d = sign * q as i64;
        let chi = match QuadraticCharacter::from_fundamental(d) {
            Ok(c) => c,
            Err(_) => continue,
        };
        if divisor_condition_holds(q, &t_rhs, r) {
            continue;
        }
        let l = match dirichlet_l_special(n / 2, &chi) {
            Ok(l) => l,
            Err(_) => continue,
        };
        let t = chi.num_prime_divisors();
        if rational_abs(&l) / pow2(t as i64) <= t_rhs {
            out.push(chi);
        }
    }
    out
}

/// A finite assignment of non-generic mass types surviving the λ bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EligibleTuple {
    pub n: usize,
    pub character: Option<QuadraticCharacter>,
    pub assignments: BTreeMap<u64, MassType>,
    pub bound_b: Rational,
}

impl EligibleTuple {
    pub fn lambda_product(&self) -> Result<Rational> {
        let mut acc = Rational::one();
        for (&p, &t) in &self.assignments {
            acc *= lambda_factor(p, self.n, t)?;
        }
        Ok(acc)
    }
}

fn next_prime(p: u64) -> u64 {
    let mut q = p + 1;
    while !is_prime_u64(q) {
        q += 1;
    }
    q
}

/// All finite mass-type assignments satisfying λ <= ε B'' per factor and
/// ∏ λ <= B'' in total. For even rank the character fixes the ramified
/// primes (type III, mandatory) and the split/unramified flavor available
/// at every other prime. Output order is deterministic: primes ascending,
/// types in fixed label order, depth-first.
pub fn enumerate_tuples(
    n: usize,
    bound: &Rational,
    chi: Option<&QuadraticCharacter>,
) -> Result<Vec<EligibleTuple>> {
    let (bpp, eps) = bound_bpp(n, chi, bound)?;
    let per_factor = &eps * &bpp;
    let mut slots: Vec<(u64, Vec<(MassType, Rational)>)> = Vec::new();
    let mut base = Rational::one();
    let mut mandatory: BTreeMap<u64, MassType> = BTreeMap::new();

    if n % 2 == 1 {
        let mut p = 2u64;
        loop {
            let types = [MassType::OddI, MassType::OddIIPlus, MassType::OddIIMinus];
            let options: Vec<(MassType, Rational)> = types
                .iter()
                .filter_map(|&t| {
                    let l = lambda_factor(p, n, t).ok()?;
                    (l <= per_factor).then_some((t, l))
                })
                .collect();
            let min_possible = lambda_factor(p, n, MassType::OddIIMinus)?;
            if options.is_empty() && min_possible > per_factor {
                break;
            }
            if !options.is_empty() {
                slots.push((p, options));
            }
            p = next_prime(p);
        }
    } else {
        let chi = chi.unwrap();
        let t_disc = if chi.discriminant().rem_euclid(4) == 1 {
            chi.discriminant()
        } else {
            chi.discriminant() / 4
        };
        for (p, _) in factor_u64(chi.conductor()) {
            mandatory.insert(p, MassType::EvenIII);
            base *= lambda_factor(p, n, MassType::EvenIII)?;
        }
        if base > bpp {
            return Ok(Vec::new());
        }
        let mut p = 2u64;
        loop {
            let stop = lambda_factor(p, n, MassType::EvenI)? > per_factor
                && lambda_factor(p, n, MassType::EvenII)? > per_factor;
            if stop {
                break;
            }
            if !mandatory.contains_key(&p) {
                // the discriminant class at p decides which flavor w = -1 buys
                let dc = squareclass_of(&rat_int(t_disc), Place::Finite(p)).unwrap();
                debug_assert!(!is_ramified_quadratic_ext(&dc).unwrap());
                let t = if dc.is_trivial() {
                    MassType::EvenI
                } else {
                    MassType::EvenII
                };
                let l = lambda_factor(p, n, t)?;
                if l <= per_factor {
                    slots.push((p, vec![(t, l)]));
                }
            }
            p = next_prime(p);
        }
    }

    // depth-first over the slots; every node is a tuple. Sub-1 factors only
    // occur at p = 2, which sits first, so pruning on the running product
    // is sound from depth 1 onward.
    let mut out = Vec::new();
    let mut current = mandatory.clone();
    fn dfs(
        slots: &[(u64, Vec<(MassType, Rational)>)],
        idx: usize,
        running: Rational,
        bpp: &Rational,
        n: usize,
        chi: Option<&QuadraticCharacter>,
        bound: &Rational,
        current: &mut BTreeMap<u64, MassType>,
        out: &mut Vec<EligibleTuple>,
    ) {
        if running <= *bpp {
            out.push(EligibleTuple {
                n,
                character: chi.cloned(),
                assignments: current.clone(),
                bound_b: bound.clone(),
            });
        }
        if idx >= slots.len() {
            return;
        }
        if idx >= 1 && running > *bpp {
            return;
        }
        for next in idx..slots.len() {
            let (p, options) = &slots[next];
            for (t, l) in options {
                let new_running = &running * l;
                // all untouched factors at later primes are >= 1
                if next >= 1 && new_running > *bpp {
                    continue;
                }
                current.insert(*p, *t);
                dfs(slots, next + 1, new_running, bpp, n, chi, bound, current, out);
                current.remove(p);
            }
        }
    }
    dfs(
        &slots,
        0,
        base,
        &bpp,
        n,
        chi,
        bound,
        &mut current,
        &mut out,
    );
    // the DFS revisits nothing, but tuples are emitted once per node; drop
    // duplicates defensively and sort for a stable order
    out.sort_by(|a, b| {
        (a.assignments.len(), format!("{:?}", a.assignments))
            .cmp(&(b.assignments.len(), format!("{:?}", b.assignments)))
    });
    out.dedup_by(|a, b| a.assignments == b.assignments);
    Ok(out)
}

/// Global profiles realizing a tuple: Δ collects the odd-valuation primes
/// (for even rank it is pinned by the character), δ classes follow from Δ,
/// w is forced everywhere except at type-III primes, and only branches
/// passing the product formula survive.
pub fn profiles_from_tuple(tuple: &EligibleTuple) -> Result<Vec<GlobalProfile>> {
    let n = tuple.n;
    let mut delta: u64 = 1;
    if n % 2 == 1 {
        for (&p, &t) in &tuple.assignments {
            match t {
                MassType::OddIIPlus | MassType::OddIIMinus => delta *= p,
                MassType::OddI | MassType::Generic => {}
                _ => {
                    return Err(Error::InconsistentGhy(format!(
                        "even-rank type {t} in an odd-rank tuple"
                    )))
                }
            }
        }
    } else {
        let chi = tuple
            .character
            .as_ref()
            .ok_or_else(|| Error::BadConfig("even-rank tuple needs a character".into()))?;
        let d = chi.discriminant();
        let t_disc = if d.rem_euclid(4) == 1 { d } else { d / 4 };
        delta = t_disc.unsigned_abs();
    }

    let mut support: Vec<u64> = vec![2];
    for (p, _) in factor_u64(delta) {
        if !support.contains(&p) {
            support.push(p);
        }
    }
    for &p in tuple.assignments.keys() {
        if !support.contains(&p) {
            support.push(p);
        }
    }
    support.sort_unstable();

    let skeleton = GlobalProfile {
        n,
        delta,
        local: BTreeMap::new(),
    };

    // consistency: every assigned type must be reproducible from (δ_p, w);
    // type III leaves w free and branches
    let mut branch_primes: Vec<u64> = Vec::new();
    let mut fixed: BTreeMap<u64, i8> = BTreeMap::new();
    for &p in &support {
        let dc = skeleton.delta_class_at(p);
        let assigned = tuple
            .assignments
            .get(&p)
            .copied()
            .unwrap_or(MassType::Generic);
        match assigned {
            MassType::EvenIII => {
                if crate::local::mass_type_of(n, &dc, 1)? != MassType::EvenIII {
                    return Ok(Vec::new());
                }
                branch_primes.push(p);
            }
            MassType::Generic => {
                if crate::local::mass_type_of(n, &dc, 1)? != MassType::Generic {
                    // unassigned prime carries forced non-generic data
                    return Ok(Vec::new());
                }
                fixed.insert(p, 1);
            }
            t => {
                let w: i8 = match t {
                    MassType::OddIIPlus => 1,
                    _ => -1,
                };
                if crate::local::mass_type_of(n, &dc, w)? != t {
                    return Ok(Vec::new());
                }
                fixed.insert(p, w);
            }
        }
    }

    let mut out = Vec::new();
    let branches = 1usize << branch_primes.len();
    for mask in 0..branches {
        let mut local = BTreeMap::new();
        for (&p, &w) in &fixed {
            local.insert(p, (skeleton.delta_class_at(p), w));
        }
        for (i, &p) in branch_primes.iter().enumerate() {
            let w: i8 = if mask >> i & 1 == 0 { 1 } else { -1 };
            local.insert(p, (skeleton.delta_class_at(p), w));
        }
        let profile = GlobalProfile { n, delta, local };
        if crate::space::check_product_formula(&profile) {
            out.push(profile);
        }
    }
    Ok(out)
}

/// A certified lower bound on the proper mass over every rank-n profile:
/// the rank prefactor, times the worst admissible λ slack (1/2 exactly when
/// n is 3 or 4), times — in even rank — a certified minimum of
/// |L(1-n/2, χ)| / 2^t over all admissible characters.
pub fn min_mass_lower_bound(n: usize) -> Rational {
    assert!(n >= 3);
    if n % 2 == 1 {
        let pref = pow2((3 - n as i64) / 2) * zeta_abs_product((n - 1) / 2);
        if n == 3 {
            pref / rat_int(2)
        } else {
            pref
        }
    } else {
        let r = n / 2;
        let pref = pow2((2 - n as i64) / 2) * zeta_abs_product((n - 2) / 2);
        let min_l = min_twist_lower_bound(r as u32);
        let slack = if n == 4 { rat(1, 2) } else { Rational::one() };
        pref * min_l * slack
    }
}

/// Certified lower bound of |L(1-r, χ)| / 2^t over all primitive quadratic
/// characters (either parity): exact values for conductors up to 300, the
/// functional-equation chain bound beyond.
fn min_twist_lower_bound(r: u32) -> Rational {
    const Q0: u64 = 300;
    let mut best: Option<Rational> = None;
    let mut consider = |v: Rational| {
        if best.as_ref().map_or(true, |b| v < *b) {
            best = Some(v);
        }
    };
    for q in 1..=Q0 {
        for sign in [1i64, -1] {
            if q == 1 && sign == -1 {
                continue;
            }
            if let Ok(chi) = QuadraticCharacter::from_fundamental(sign * q as i64) {
                if let Ok(l) = dirichlet_l_special(r as usize, &chi) {
                    consider(rational_abs(&l) / pow2(chi.num_prime_divisors() as i64));
                }
            }
        }
    }
    // tail: |L(1-r, χ)|/2^t >= C_r q^{r-1/2} / 2^t >= C_r q^{r-3/2} since
    // 2^t <= q, and q^{r-3/2} >= Q0^{r-2} * 17 for q > Q0 (17 <= sqrt(300))
    let c_r = {
        let bits = BOUND_PRECISION;
        let two_pi = pi(bits).scale(&rat_int(2));
        gamma_int(r, bits)
            .scale(&rat_int(2))
            .mul(&zeta_real(2 * r, bits))
            .div(&two_pi.powi(r))
            .div(&zeta_real(r, bits))
    };
    let tail = c_r.lower().clone() * Rational::from(Int::from(Q0).pow(r - 2)) * rat_int(17);
    if tail.is_positive() {
        consider(tail);
    }
    best.unwrap()
}
