//! Arch systems, meanders and the bijections between meanders and their
//! meandric and cyclic permutations.
//!
//! Points on the line are numbered `1..=2n` from left to right. Internally
//! partner arrays are 0-based; everything that crosses the public API is
//! 1-based.

use crate::error::{Error, Result};
use crate::permutation::Permutation;

/// Which half-plane an arc lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Upper => Side::Lower,
            Side::Lower => Side::Upper,
        }
    }
}

/// A noncrossing perfect matching of `2n` points on a line.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArchSystem {
    partner: Vec<usize>,
}

impl ArchSystem {
    /// Validates a 1-based partner array.
    pub fn new(partner: &[usize]) -> Result<Self> {
        let len = partner.len();
        if len == 0 || !len.is_multiple_of(2) {
            return Err(Error::OddLength(len));
        }
        for (i, &p) in partner.iter().enumerate() {
            if p == 0 || p > len {
                return Err(Error::OutOfRange {
                    point: i + 1,
                    value: p,
                    len,
                });
            }
        }
        let zero: Vec<usize> = partner.iter().map(|&p| p - 1).collect();
        Self::from_zero_based(zero)
    }

    pub(crate) fn from_zero_based(partner: Vec<usize>) -> Result<Self> {
        for (i, &p) in partner.iter().enumerate() {
            if p == i {
                return Err(Error::FixedPoint(i + 1));
            }
            if partner[p] != i {
                return Err(Error::NotInvolution {
                    point: i + 1,
                    partner: p + 1,
                    back: partner[p] + 1,
                });
            }
        }
        if let Some(w) = find_crossing(&partner) {
            return Err(w);
        }
        Ok(ArchSystem { partner })
    }

    /// Number of arcs, i.e. half the number of points.
    pub fn n(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn points(&self) -> usize {
        self.partner.len()
    }

    /// 1-based partner of the 1-based point `i`.
    pub fn partner_of(&self, i: usize) -> usize {
        self.partner[i - 1] + 1
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.partner.iter().map(|&p| p + 1).collect()
    }

    pub(crate) fn raw(&self) -> &[usize] {
        &self.partner
    }

    /// Arcs as 1-based `(left, right)` pairs ordered by left endpoint.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.partner
            .iter()
            .enumerate()
            .filter(|&(i, &p)| i < p)
            .map(|(i, &p)| (i + 1, p + 1))
    }

    /// Reflects the points left to right.
    pub fn mirrored(&self) -> ArchSystem {
        let last = self.partner.len() - 1;
        let partner = (0..=last).map(|i| last - self.partner[last - i]).collect();
        ArchSystem { partner }
    }
}

impl std::fmt::Debug for ArchSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.arcs()).finish()
    }
}

/// Scans with a stack of open arcs; a closing point whose partner is not on
/// top of the stack witnesses a crossing.
fn find_crossing(partner: &[usize]) -> Option<Error> {
    let mut open: Vec<usize> = Vec::new();
    for (i, &p) in partner.iter().enumerate() {
        if p > i {
            open.push(i);
        } else {
            let top = open.pop().expect("closing point without an open arc");
            if top != p {
                // p < top < i < partner[top]
                return Some(Error::Crossing(p + 1, top + 1, i + 1, partner[top] + 1));
            }
        }
    }
    None
}

/// Length of the cycle through point 0 in the union of two matchings,
/// starting along `first`.
pub(crate) fn cycle_len_through_zero(first: &[usize], second: &[usize]) -> usize {
    let mut len = 0;
    let mut p = 0;
    loop {
        p = first[p];
        p = second[p];
        len += 2;
        if p == 0 {
            return len;
        }
    }
}

/// True iff the union of the two arc systems is a single loop.
pub fn is_meander(upper: &ArchSystem, lower: &ArchSystem) -> Result<bool> {
    if upper.points() != lower.points() {
        return Err(Error::SizeMismatch(upper.points(), lower.points()));
    }
    Ok(cycle_len_through_zero(upper.raw(), lower.raw()) == upper.points())
}

/// A simple closed loop crossing the line `2n` times, stored as its upper and
/// lower arc systems.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Meander {
    upper: ArchSystem,
    lower: ArchSystem,
}

impl Meander {
    pub fn new(upper: ArchSystem, lower: ArchSystem) -> Result<Self> {
        if !is_meander(&upper, &lower)? {
            return Err(Error::NotSingleLoop {
                cycle_len: cycle_len_through_zero(upper.raw(), lower.raw()),
                points: upper.points(),
            });
        }
        Ok(Meander { upper, lower })
    }

    /// Builds from two 1-based partner arrays.
    pub fn from_partners(upper: &[usize], lower: &[usize]) -> Result<Self> {
        Meander::new(ArchSystem::new(upper)?, ArchSystem::new(lower)?)
    }

    pub(crate) fn from_parts_unchecked(upper: ArchSystem, lower: ArchSystem) -> Self {
        debug_assert!(is_meander(&upper, &lower).unwrap_or(false));
        Meander { upper, lower }
    }

    /// The meander whose loop visits the points in line order: upper arcs
    /// `(1,2), (3,4), ...`, lower arcs `(2,3), ..., (2n-2, 2n-1)` and `(1, 2n)`.
    pub fn snake(n: usize) -> Meander {
        assert!(n >= 1, "meander size must be positive");
        let pts = 2 * n;
        let upper = (0..pts).map(|i| i ^ 1).collect();
        let lower = (0..pts)
            .map(|i| {
                if i == 0 {
                    pts - 1
                } else if i == pts - 1 {
                    0
                } else if i % 2 == 1 {
                    i + 1
                } else {
                    i - 1
                }
            })
            .collect();
        Meander {
            upper: ArchSystem { partner: upper },
            lower: ArchSystem { partner: lower },
        }
    }

    /// Size: the loop crosses the line `2n` times.
    pub fn n(&self) -> usize {
        self.upper.n()
    }

    pub fn points(&self) -> usize {
        self.upper.points()
    }

    pub fn upper(&self) -> &ArchSystem {
        &self.upper
    }

    pub fn lower(&self) -> &ArchSystem {
        &self.lower
    }

    pub fn side(&self, side: Side) -> &ArchSystem {
        match side {
            Side::Upper => &self.upper,
            Side::Lower => &self.lower,
        }
    }

    /// Exchanges the upper and lower arc systems (reflection in the line).
    pub fn swapped(&self) -> Meander {
        Meander {
            upper: self.lower.clone(),
            lower: self.upper.clone(),
        }
    }

    /// The 1-based points in the order the loop visits them, starting at
    /// point 1 and leaving it along the `first_step` arc.
    pub fn loop_order(&self, first_step: Side) -> Vec<usize> {
        let (a, b) = match first_step {
            Side::Upper => (self.upper.raw(), self.lower.raw()),
            Side::Lower => (self.lower.raw(), self.upper.raw()),
        };
        let pts = self.points();
        let mut order = Vec::with_capacity(pts);
        let mut p = 0;
        for r in 0..pts {
            order.push(p + 1);
            p = if r % 2 == 0 { a[p] } else { b[p] };
        }
        debug_assert_eq!(p, 0);
        order
    }

    /// `σ(i)` is the loop rank of the point with line rank `i`, using the
    /// canonical traversal that leaves point 1 along its upper arc.
    pub fn meandric_permutation(&self) -> Permutation {
        let order = self.loop_order(Side::Upper);
        let mut sigma = vec![0; order.len()];
        for (rank, &point) in order.iter().enumerate() {
            sigma[point - 1] = rank + 1;
        }
        Permutation::from_vec_unchecked(sigma)
    }

    /// The line-order successor map of the loop, see [`cyclic_from_meandric`].
    pub fn cyclic_permutation(&self) -> Permutation {
        cyclic_from_meandric(&self.meandric_permutation()).expect("meandric permutations fix 1")
    }

    /// The meander re-rooted at its `k`-th point in line order.
    pub fn re_root(&self, k: usize) -> Result<Meander> {
        let sigma = re_root_permutation(&self.meandric_permutation(), k)?;
        Ok(meander_from_permutation(&sigma)
            .expect("re-rooting a meander always yields a meander"))
    }
}

impl std::fmt::Debug for Meander {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Meander")
            .field("upper", &self.upper)
            .field("lower", &self.lower)
            .finish()
    }
}

/// Cheap shape checks shared by the permutation-level operations.
fn check_meandric_shape(sigma: &Permutation) -> Result<()> {
    let m = sigma.len();
    if m == 0 || !m.is_multiple_of(2) {
        return Err(Error::NotMeandric(format!("size {m} is not a positive even number")));
    }
    if sigma.at(1) != 1 {
        return Err(Error::NotMeandric(format!("σ(1) = {} instead of 1", sigma.at(1))));
    }
    Ok(())
}

/// Inverts [`Meander::meandric_permutation`]: consecutive loop ranks
/// `(r, r+1)` with `r` odd become upper arcs, the others (including the
/// closing pair `(2n, 1)`) lower arcs.
pub fn meander_from_permutation(sigma: &Permutation) -> Result<Meander> {
    check_meandric_shape(sigma)?;
    let pts = sigma.len();
    let order = sigma.inverse();
    let order = order.values();
    let mut upper = vec![0; pts];
    let mut lower = vec![0; pts];
    for r in 0..pts {
        let a = order[r] - 1;
        let b = order[(r + 1) % pts] - 1;
        let side = if r % 2 == 0 { &mut upper } else { &mut lower };
        side[a] = b;
        side[b] = a;
    }
    let wrap = |side: &str, e: Error| Error::NotMeandric(format!("{side} arcs invalid: {e}"));
    let upper = ArchSystem::from_zero_based(upper).map_err(|e| wrap("upper", e))?;
    let lower = ArchSystem::from_zero_based(lower).map_err(|e| wrap("lower", e))?;
    // The arcs were read off a single traversal, so the union is one loop.
    Ok(Meander::from_parts_unchecked(upper, lower))
}

/// True iff `sigma` is the meandric permutation of some meander.
pub fn is_meandric(sigma: &Permutation) -> bool {
    meander_from_permutation(sigma).is_ok()
}

/// `τ(j) = σ(σ⁻¹(j) + 1)` with position `2n + 1` wrapping to 1. The one-line
/// notation of σ read as a single cycle is τ.
pub fn cyclic_from_meandric(sigma: &Permutation) -> Result<Permutation> {
    check_meandric_shape(sigma)?;
    let m = sigma.len();
    let inv = sigma.inverse();
    let tau = (1..=m)
        .map(|j| {
            let next = inv.at(j) % m + 1;
            sigma.at(next)
        })
        .collect();
    Ok(Permutation::from_vec_unchecked(tau))
}

/// `σ(j) = τ^(j-1)(1)`; τ must be a single cycle.
pub fn meandric_from_cyclic(tau: &Permutation) -> Result<Permutation> {
    let m = tau.len();
    let mut sigma = Vec::with_capacity(m);
    let mut x = 1;
    loop {
        sigma.push(x);
        x = tau.at(x);
        if x == 1 {
            break;
        }
    }
    if sigma.len() != m {
        return Err(Error::NotSingleCycle {
            orbit: sigma.len(),
            len: m,
        });
    }
    Ok(Permutation::from_vec_unchecked(sigma))
}

/// Conjugates σ by cyclic rotations so that line position `k` becomes the
/// first point: `σ⁽ᵏ⁾(i) = σ(i + k - 1) - σ(k) + 1`, both indices mod `2n`.
pub fn re_root_permutation(sigma: &Permutation, k: usize) -> Result<Permutation> {
    check_meandric_shape(sigma)?;
    let m = sigma.len();
    if k == 0 || k > m {
        return Err(Error::RootOutOfRange { k, len: m });
    }
    let shift = sigma.at(k);
    let values = (1..=m)
        .map(|i| {
            let v = sigma.at((i + k - 2) % m + 1);
            (v + m - shift) % m + 1
        })
        .collect();
    Ok(Permutation::from_vec_unchecked(values))
}

/// The root index that undoes [`re_root_permutation`] at `k` for size `m`.
pub fn inverse_root(k: usize, m: usize) -> usize {
    (m + 1 - k) % m + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig_sigma() -> Permutation {
        "1,4,3,2,5,12,7,8,9,10,11,6".parse().unwrap()
    }

    #[test]
    fn validates_small_arch_systems() {
        assert!(ArchSystem::new(&[2, 1, 4, 3]).is_ok());
        assert!(ArchSystem::new(&[4, 3, 2, 1]).is_ok());
        assert_eq!(
            ArchSystem::new(&[3, 4, 1, 2]).unwrap_err(),
            Error::Crossing(1, 2, 3, 4)
        );
    }

    #[test]
    fn arch_system_error_taxonomy() {
        assert_eq!(ArchSystem::new(&[]).unwrap_err(), Error::OddLength(0));
        assert_eq!(ArchSystem::new(&[2, 1, 3]).unwrap_err(), Error::OddLength(3));
        assert!(matches!(
            ArchSystem::new(&[2, 5, 4, 3]).unwrap_err(),
            Error::OutOfRange { point: 2, value: 5, .. }
        ));
        assert_eq!(ArchSystem::new(&[1, 2]).unwrap_err(), Error::FixedPoint(1));
        assert!(matches!(
            ArchSystem::new(&[2, 3, 4, 1]).unwrap_err(),
            Error::NotInvolution { point: 1, partner: 2, back: 3 }
        ));
    }

    #[test]
    fn small_meander_checks() {
        let side_by_side = ArchSystem::new(&[2, 1, 4, 3]).unwrap();
        let nested = ArchSystem::new(&[4, 3, 2, 1]).unwrap();
        assert!(is_meander(&side_by_side, &nested).unwrap());
        assert!(!is_meander(&side_by_side, &side_by_side).unwrap());
        let two = ArchSystem::new(&[2, 1]).unwrap();
        assert_eq!(
            is_meander(&two, &nested).unwrap_err(),
            Error::SizeMismatch(2, 4)
        );
    }

    #[test]
    fn loop_order_and_permutation_of_n2() {
        let m = Meander::from_partners(&[2, 1, 4, 3], &[4, 3, 2, 1]).unwrap();
        assert_eq!(m.loop_order(Side::Upper), vec![1, 2, 3, 4]);
        assert_eq!(m.loop_order(Side::Lower), vec![1, 4, 3, 2]);
        assert_eq!(m.meandric_permutation(), Permutation::identity(4));
        assert_eq!(
            meander_from_permutation(&Permutation::identity(4)).unwrap(),
            m
        );
    }

    #[test]
    fn non_meandric_rejected() {
        let p: Permutation = "1,3,2,4".parse().unwrap();
        assert!(matches!(
            meander_from_permutation(&p),
            Err(Error::NotMeandric(_))
        ));
        let p: Permutation = "2,1,3,4".parse().unwrap();
        assert!(matches!(
            meander_from_permutation(&p),
            Err(Error::NotMeandric(_))
        ));
    }

    #[test]
    fn smallest_meander() {
        let m = Meander::snake(1);
        assert_eq!(m.meandric_permutation().values(), &[1, 2]);
        assert_eq!(m.re_root(2).unwrap(), m);
    }

    #[test]
    fn snake_is_identity() {
        for n in 1..8 {
            let m = Meander::snake(n);
            assert!(is_meander(m.upper(), m.lower()).unwrap());
            assert_eq!(m.meandric_permutation(), Permutation::identity(2 * n));
        }
    }

    #[test]
    fn figure_example_round_trips() {
        let sigma = fig_sigma();
        let m = meander_from_permutation(&sigma).unwrap();
        assert_eq!(m.n(), 6);
        assert_eq!(m.meandric_permutation(), sigma);
    }

    #[test]
    fn figure_example_cyclic() {
        let tau = cyclic_from_meandric(&fig_sigma()).unwrap();
        let expect = [
            (1, 4),
            (4, 3),
            (3, 2),
            (2, 5),
            (5, 12),
            (12, 7),
            (7, 8),
            (8, 9),
            (9, 10),
            (10, 11),
            (11, 6),
            (6, 1),
        ];
        for (j, t) in expect {
            assert_eq!(tau.at(j), t, "τ({j})");
        }
        assert_eq!(meandric_from_cyclic(&tau).unwrap(), fig_sigma());
    }

    #[test]
    fn identity_gives_shift_cycle() {
        let tau = cyclic_from_meandric(&Permutation::identity(6)).unwrap();
        assert_eq!(tau.values(), &[2, 3, 4, 5, 6, 1]);
        assert_eq!(
            meandric_from_cyclic(&tau).unwrap(),
            Permutation::identity(6)
        );
    }

    #[test]
    fn cyclic_rejects_multiple_cycles() {
        let p: Permutation = "2,1,4,3".parse().unwrap();
        assert_eq!(
            meandric_from_cyclic(&p).unwrap_err(),
            Error::NotSingleCycle { orbit: 2, len: 4 }
        );
    }

    #[test]
    fn figure_example_re_root() {
        let rooted = re_root_permutation(&fig_sigma(), 6).unwrap();
        assert_eq!(rooted.to_string(), "1,8,9,10,11,12,7,2,5,4,3,6");
        assert!(is_meandric(&rooted));
        assert_eq!(
            re_root_permutation(&rooted, inverse_root(6, 12)).unwrap(),
            fig_sigma()
        );
    }

    #[test]
    fn re_root_at_one_is_identity() {
        assert_eq!(re_root_permutation(&fig_sigma(), 1).unwrap(), fig_sigma());
        assert!(re_root_permutation(&fig_sigma(), 13).is_err());
        assert!(re_root_permutation(&fig_sigma(), 0).is_err());
    }

    #[test]
    fn mirrored_matching_stays_valid() {
        let a = ArchSystem::new(&[2, 1, 6, 5, 4, 3]).unwrap();
        let m = a.mirrored();
        assert_eq!(m.to_one_based(), vec![4, 3, 2, 1, 6, 5]);
    }
}
