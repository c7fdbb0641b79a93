//! Rational quadratic spaces as diagonal forms, their global invariant
//! profiles, the product formula on GHY data, and constructive assembly of a
//! positive definite space from prescribed local invariants.

use crate::arith::{factor_int, is_squarefree_u64, squarefree_part, QuadraticCharacter};
use crate::error::{Error, Result};
use crate::local::{
    ghy_from_std, hilbert_classes, squareclass_of, std_invariants_of_diagonal, GhyLocalData,
    LocalStdInvariants, Place, SquareClass,
};
use crate::mass::MassType;
use crate::{rat_int, Int, Rational};
use num::traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// A rational quadratic space presented by an orthogonal (diagonal) basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalSpace {
    pub diagonal: Vec<Rational>,
}

impl RationalSpace {
    pub fn new(diagonal: Vec<Rational>) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(Error::EmptyDiagonal);
        }
        if diagonal.iter().any(|d| d.is_zero()) {
            return Err(Error::ZeroInput("RationalSpace diagonal"));
        }
        Ok(Self { diagonal })
    }

    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.diagonal.iter().all(|d| d.is_positive())
    }
}

/// Global invariant profile of a positive definite space: the rank, the
/// positive squarefree representative Δ of the determinant squareclass, and
/// the (δ_p, w_p) data at every prime of the support. Primes outside the map
/// carry generic data. The GHY discriminant class at p is the class of
/// (-1)^{floor(n/2)} Δ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalProfile {
    pub n: usize,
    pub delta: u64,
    pub local: BTreeMap<u64, (SquareClass, i8)>,
}

impl GlobalProfile {
    /// (-1)^{floor(n/2)} Δ, the signed discriminant driving δ classes and
    /// the character for even ranks.
    pub fn signed_discriminant(&self) -> i64 {
        let t = self.delta as i64;
        if (self.n / 2) % 2 == 1 {
            -t
        } else {
            t
        }
    }

    pub fn delta_class_at(&self, p: u64) -> SquareClass {
        squareclass_of(&rat_int(self.signed_discriminant()), Place::Finite(p)).unwrap()
    }

    pub fn w_at(&self, p: u64) -> i8 {
        self.local.get(&p).map(|&(_, w)| w).unwrap_or(1)
    }

    pub fn ghy_at(&self, p: u64) -> Result<GhyLocalData> {
        let delta = self.delta_class_at(p);
        let w = self.w_at(p);
        Ok(GhyLocalData {
            place: Place::Finite(p),
            n: self.n,
            delta,
            w,
            mass_type: crate::local::mass_type_of(self.n, &delta, w)?,
        })
    }

    pub fn std_at(&self, p: u64) -> Result<LocalStdInvariants> {
        crate::local::std_from_ghy(&self.ghy_at(p)?)
    }

    /// Mass type at p; primes outside the support are generic.
    pub fn mass_type_at(&self, p: u64) -> Result<MassType> {
        crate::local::mass_type_of(self.n, &self.delta_class_at(p), self.w_at(p))
    }

    /// The primitive quadratic character attached to an even-rank profile.
    pub fn character(&self) -> Result<QuadraticCharacter> {
        QuadraticCharacter::from_squarefree(self.signed_discriminant())
    }

    /// Canonical identity of the underlying space: rank, Δ, and the set of
    /// primes carrying w = -1. The δ classes are functions of Δ.
    pub fn canonical_key(&self) -> (usize, u64, Vec<u64>) {
        let flipped: Vec<u64> = self
            .local
            .iter()
            .filter(|&(_, &(_, w))| w == -1)
            .map(|(&p, _)| p)
            .collect();
        (self.n, self.delta, flipped)
    }

    pub fn support(&self) -> Vec<u64> {
        self.local.keys().copied().collect()
    }
}

/// Prime support of a list of rationals, always including 2.
fn support_primes(diagonal: &[Rational]) -> Result<BTreeSet<u64>> {
    let mut set = BTreeSet::new();
    set.insert(2u64);
    for d in diagonal {
        for (p, _) in factor_int(d.numer())? {
            set.insert(p);
        }
        for (p, _) in factor_int(d.denom())? {
            set.insert(p);
        }
    }
    Ok(set)
}

/// Invariant profile of a positive definite diagonal space.
pub fn profile_of_space(s: &RationalSpace) -> Result<GlobalProfile> {
    if !s.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let n = s.rank();
    let det: Rational = s.diagonal.iter().product();
    let delta_int = squarefree_part(&det)?;
    let delta = u64::try_from(&delta_int).map_err(|_| Error::Unfactorable(delta_int.to_string()))?;
    let mut local = BTreeMap::new();
    for &p in support_primes(&s.diagonal)?.iter() {
        let inv = std_invariants_of_diagonal(&s.diagonal, Place::Finite(p))?;
        let g = ghy_from_std(&inv)?;
        local.insert(p, (g.delta, g.w));
    }
    let profile = GlobalProfile { n, delta, local };
    // δ stored per prime must agree with the class of the signed discriminant
    debug_assert!(profile
        .local
        .iter()
        .all(|(&p, &(d, _))| d == profile.delta_class_at(p)));
    Ok(profile)
}

/// The product formula on GHY local data:
/// ∏_p w_p = (-1)^{floor(n/4)} ∏_p (-1, δ_p)_p^{floor((n-1)/2)}.
pub fn check_product_formula(profile: &GlobalProfile) -> bool {
    let mut lhs = 1i32;
    for (_, &(_, w)) in profile.local.iter() {
        lhs *= w as i32;
    }
    let mut rhs: i32 = if (profile.n / 4) % 2 == 1 { -1 } else { 1 };
    let e = (profile.n - 1) / 2;
    if e % 2 == 1 {
        let t = rat_int(profile.signed_discriminant());
        let mut primes: BTreeSet<u64> = BTreeSet::new();
        primes.insert(2);
        for (p, _) in crate::arith::factor_u64(profile.delta) {
            primes.insert(p);
        }
        for p in primes {
            let v = Place::Finite(p);
            let minus_one = squareclass_of(&rat_int(-1), v).unwrap();
            let dc = squareclass_of(&t, v).unwrap();
            rhs *= hilbert_classes(&minus_one, &dc) as i32;
        }
    }
    lhs == rhs
}

/// Compare two positive definite spaces by their complete invariant systems.
pub fn spaces_equivalent(a: &RationalSpace, b: &RationalSpace) -> bool {
    if a.rank() != b.rank() {
        return false;
    }
    match (profile_of_space(a), profile_of_space(b)) {
        (Ok(pa), Ok(pb)) => pa.canonical_key() == pb.canonical_key(),
        _ => false,
    }
}

/// Local solvability of standard invariant targets in dimension m at a
/// finite place. Everything is realizable in dimension >= 3; dimension 2
/// excludes exactly (d, c) = (class(-1), -1); dimension 1 forces c = +1.
fn locally_realizable(m: usize, d: &SquareClass, c: i8, v: Place) -> bool {
    match m {
        0 => d.is_trivial() && c == 1,
        1 => c == 1,
        2 => {
            let minus_one = crate::local::class_of_int(-1, v);
            !(*d == minus_one && c == -1)
        }
        _ => true,
    }
}

struct AssemblyState {
    /// residual determinant class, a positive squarefree integer
    det: Int,
    /// residual Hasse targets at tracked primes
    targets: BTreeMap<u64, i8>,
}

impl AssemblyState {
    fn d_class_at(&self, p: u64) -> SquareClass {
        squareclass_of(&Rational::from(self.det.clone()), Place::Finite(p)).unwrap()
    }

    fn c_at(&self, p: u64) -> i8 {
        self.targets.get(&p).copied().unwrap_or(1)
    }
}

fn candidate_entries(support: &BTreeSet<u64>, aux_cap: u64) -> impl Iterator<Item = u64> + '_ {
    // ascending squarefree positive integers supported on the tracked primes
    // with at most one auxiliary prime
    let max_core: u64 = support.iter().product();
    (1..=max_core.saturating_mul(aux_cap)).filter(move |&a| {
        if !is_squarefree_u64(a) {
            return false;
        }
        let outside = crate::arith::factor_u64(a)
            .iter()
            .filter(|(p, _)| !support.contains(p))
            .count();
        outside <= 1
    })
}

/// Constructive Hasse-Minkowski: build a positive definite diagonal space
/// with the exact local data of `profile`. Diagonal entries come out as
/// squarefree positive integers. Errors when no space exists or when the
/// auxiliary-prime search ceiling is exceeded.
pub fn assemble_space(profile: &GlobalProfile, aux_cap: u64) -> Result<RationalSpace> {
    if profile.n < 2 {
        return Err(Error::NoSuchSpace("rank must be at least 2".into()));
    }
    if !check_product_formula(profile) {
        return Err(Error::ProductFormulaViolated);
    }
    let mut support: BTreeSet<u64> = BTreeSet::new();
    support.insert(2);
    for (p, _) in crate::arith::factor_u64(profile.delta) {
        support.insert(p);
    }
    for &p in profile.local.keys() {
        support.insert(p);
    }
    let mut targets = BTreeMap::new();
    for &p in &support {
        let std = profile.std_at(p)?;
        targets.insert(p, std.c);
        debug_assert_eq!(
            std.d,
            squareclass_of(&rat_int(profile.delta as i64), Place::Finite(p)).unwrap(),
            "determinant class must be the class of Δ at p = {p}"
        );
    }
    let mut state = AssemblyState {
        det: Int::from(profile.delta),
        targets,
    };
    let mut entries: Vec<Int> = Vec::new();
    let mut m = profile.n;
    while m > 2 {
        let chosen = choose_entry(&state, m, aux_cap)?;
        apply_entry(&mut state, &chosen)?;
        entries.push(chosen);
        m -= 1;
    }
    // base case: diag(a, b) with b ~ a * det and c_p = (a, -det)_p
    let chosen = choose_binary_entry(&state, aux_cap)?;
    let b = squarefree_part(&(Rational::from(chosen.clone()) * Rational::from(state.det.clone())))?;
    entries.push(chosen);
    entries.push(b);
    let space = RationalSpace::new(entries.into_iter().map(Rational::from).collect())?;
    let check = profile_of_space(&space)?;
    if check.canonical_key() != profile.canonical_key() {
        return Err(Error::NoSuchSpace(
            "assembled space does not reproduce the profile".into(),
        ));
    }
    Ok(space)
}

/// Pick the smallest admissible diagonal entry at dimension m >= 3: the
/// residual (m-1)-dimensional system must stay locally realizable.
fn choose_entry(state: &AssemblyState, m: usize, aux_cap: u64) -> Result<Int> {
    let support: BTreeSet<u64> = state.targets.keys().copied().collect();
    for a in candidate_entries(&support, aux_cap) {
        let a_int = Int::from(a);
        let mut relevant: BTreeSet<u64> = support.clone();
        for (p, _) in crate::arith::factor_u64(a) {
            relevant.insert(p);
        }
        let ok = relevant.iter().all(|&p| {
            let v = Place::Finite(p);
            let a_class = squareclass_of(&Rational::from(a_int.clone()), v).unwrap();
            let d = state.d_class_at(p);
            let minus_d = crate::local::class_of_int(-1, v).mul(&d).unwrap();
            let new_d = a_class.mul(&d).unwrap();
            let new_c = state.c_at(p) * hilbert_classes(&a_class, &minus_d);
            locally_realizable(m - 1, &new_d, new_c, v)
        });
        if ok {
            return Ok(a_int);
        }
    }
    Err(Error::AssemblySearchExceeded(aux_cap))
}

/// Base case: find a with (a, -det)_p matching every Hasse target.
fn choose_binary_entry(state: &AssemblyState, aux_cap: u64) -> Result<Int> {
    let support: BTreeSet<u64> = state.targets.keys().copied().collect();
    for a in candidate_entries(&support, aux_cap) {
        let a_int = Int::from(a);
        let mut relevant: BTreeSet<u64> = support.clone();
        for (p, _) in crate::arith::factor_u64(a) {
            relevant.insert(p);
        }
        let ok = relevant.iter().all(|&p| {
            let v = Place::Finite(p);
            let a_class = squareclass_of(&Rational::from(a_int.clone()), v).unwrap();
            let minus_d = crate::local::class_of_int(-1, v)
                .mul(&state.d_class_at(p))
                .unwrap();
            hilbert_classes(&a_class, &minus_d) == state.c_at(p)
        });
        if ok {
            return Ok(a_int);
        }
    }
    Err(Error::AssemblySearchExceeded(aux_cap))
}

/// Peel `a` off the residual system: d' = a d, c' = c (a, -d).
fn apply_entry(state: &mut AssemblyState, a: &Int) -> Result<()> {
    let a_u: u64 = u64::try_from(a).map_err(|_| Error::Unfactorable(a.to_string()))?;
    let mut relevant: BTreeSet<u64> = state.targets.keys().copied().collect();
    for (p, _) in crate::arith::factor_u64(a_u) {
        relevant.insert(p);
    }
    let new_det = squarefree_part(&(Rational::from(state.det.clone()) * Rational::from(a.clone())))?;
    for &p in &relevant {
        let v = Place::Finite(p);
        let a_class = squareclass_of(&Rational::from(a.clone()), v).unwrap();
        let minus_d = crate::local::class_of_int(-1, v)
            .mul(&state.d_class_at(p))
            .unwrap();
        let new_c = state.c_at(p) * hilbert_classes(&a_class, &minus_d);
        state.targets.insert(p, new_c);
    }
    state.det = new_det;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;
    use num::traits::One;

    fn space(entries: &[i64]) -> RationalSpace {
        RationalSpace::new(entries.iter().map(|&e| rat_int(e)).collect()).unwrap()
    }

    #[test]
    fn profile_three_squares() {
        let p = profile_of_space(&space(&[1, 1, 1])).unwrap();
        assert_eq!(p.delta, 1);
        let (delta2, w2) = p.local[&2];
        assert_eq!(delta2, squareclass_of(&rat_int(-1), Place::Finite(2)).unwrap());
        assert_eq!(w2, -1);
        assert!(check_product_formula(&p));
    }

    #[test]
    fn profile_four_squares() {
        let p = profile_of_space(&space(&[1, 1, 1, 1])).unwrap();
        assert_eq!(p.delta, 1);
        let (delta2, w2) = p.local[&2];
        assert!(delta2.is_trivial());
        assert_eq!(w2, -1);
        assert_eq!(p.mass_type_at(2).unwrap(), MassType::EvenI);
        assert!(check_product_formula(&p));
    }

    #[test]
    fn profile_square_scaling() {
        let a = profile_of_space(&space(&[1, 2])).unwrap();
        let b = profile_of_space(
            &RationalSpace::new(vec![rat_int(9), rat_int(18)]).unwrap(),
        )
        .unwrap();
        assert_eq!(a.canonical_key(), b.canonical_key());
    }

    #[test]
    fn profile_rejects_indefinite() {
        let s = RationalSpace::new(vec![rat_int(1), rat_int(-1)]).unwrap();
        assert!(profile_of_space(&s).is_err());
    }

    #[test]
    fn product_formula_flip_fails() {
        let mut p = profile_of_space(&space(&[1, 1, 1])).unwrap();
        assert!(check_product_formula(&p));
        let (d3, w3) = p
            .local
            .get(&3)
            .copied()
            .unwrap_or((p.delta_class_at(3), 1));
        p.local.insert(3, (d3, -w3));
        assert!(!check_product_formula(&p));
    }

    #[test]
    fn assemble_round_trip_three_squares() {
        let p = profile_of_space(&space(&[1, 1, 1])).unwrap();
        let s = assemble_space(&p, 10_000).unwrap();
        assert!(s.is_positive_definite());
        let back = profile_of_space(&s).unwrap();
        assert_eq!(back.canonical_key(), p.canonical_key());
        for d in &s.diagonal {
            assert!(d.denom().is_one());
            assert!(is_squarefree_u64(u64::try_from(d.numer()).unwrap()));
        }
    }

    #[test]
    fn assemble_trivial_rank8_profile() {
        // all-generic rank-8 profile: the ambient space of the even
        // unimodular lattice
        let p = GlobalProfile {
            n: 8,
            delta: 1,
            local: BTreeMap::new(),
        };
        assert!(check_product_formula(&p));
        let s = assemble_space(&p, 10_000).unwrap();
        let back = profile_of_space(&s).unwrap();
        assert_eq!(back.canonical_key(), p.canonical_key());
    }

    #[test]
    fn assemble_detects_impossible_profile() {
        // rank 3 all-generic with Δ = 1 violates the product formula
        let p = GlobalProfile {
            n: 3,
            delta: 1,
            local: BTreeMap::new(),
        };
        assert!(!check_product_formula(&p));
        assert!(matches!(
            assemble_space(&p, 10_000),
            Err(Error::ProductFormulaViolated)
        ));
    }

    #[test]
    fn equivalence_examples() {
        assert!(spaces_equivalent(&space(&[1, 1, 1]), &space(&[1, 1, 1])));
        // permutation and square scaling
        let scaled = RationalSpace::new(vec![rat_int(1), rat(1, 4), rat_int(4)]).unwrap();
        assert!(spaces_equivalent(&space(&[1, 1, 1]), &scaled));
        assert!(!spaces_equivalent(&space(&[1, 1, 1]), &space(&[1, 1, 3])));
        // equal determinant but different Hasse data at 2: x^2+y^2+2z^2 vs
        // x^2+2y^2+z^2 are equivalent; compare against 2,2,2 scaled det
        assert!(spaces_equivalent(&space(&[1, 1, 2]), &space(&[2, 1, 1])));
    }

    #[test]
    fn random_spaces_satisfy_product_formula() {
        let mut state = 0xdeadbeefcafef00du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let pool = [1i64, 2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 21, 26, 33, 35];
        for _ in 0..100 {
            let n = 3 + (next() % 4) as usize;
            let diag: Vec<Rational> = (0..n)
                .map(|_| rat_int(pool[(next() % pool.len() as u64) as usize]))
                .collect();
            let s = RationalSpace::new(diag).unwrap();
            let p = profile_of_space(&s).unwrap();
            assert!(check_product_formula(&p), "diag = {:?}", s.diagonal);
        }
    }
}
