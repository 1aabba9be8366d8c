//! Random generation: a Metropolis–Hastings chain on meanders of fixed size,
//! rejection samplers for the Baxter classes and uniform permutations.
//!
//! # The meander chain
//!
//! The basic move replaces two arcs of one side by the other noncrossing
//! pairing of their four endpoints: two sibling arcs become nested, and an
//! arc together with one of its direct children become siblings.
//!
//! On a meander such a rewire always splits the loop in two. Every arc joins
//! points of opposite parity, so loop order alternates parity, and two arcs
//! of one side occupy loop edges `i`, `j` of equal parity. The re-pairing
//! that would keep one loop joins the points at ranks `i` and `j`, which
//! have equal parity and cannot be joined by a noncrossing arc.
//!
//! A proposal therefore makes two rewires. It draws a side, an arc `A` of
//! that side uniformly, and a uniform neighbour `B` of `A` (a sibling, the
//! parent or a child), and rewires them. The second rewire is drawn
//! uniformly among all rewires, on either side, that join the two loops
//! again. The reverse proposal passes through the same split state and so
//! has the same number of joining options, and accepting with
//! `min(1, q_rev / q_fwd)` where `q = 1/valence(A) + 1/valence(B)` for the
//! first rewire of each direction makes the transition matrix symmetric.
//! The uniform distribution on meanders of size `n` is stationary.
//!
//! The state keeps per side the partner array, the parent and child count
//! of every arc (arcs keyed by their left endpoint), and the loop as a
//! cyclic array. After the split, one loop is a run of consecutive slots;
//! the joining rewires are listed from the arcs of the smaller loop, and an
//! accepted join rewrites only the smaller loop and the shorter stretch of
//! the larger one.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytics::lis;
use crate::enumerate::ClassTag;
use crate::error::{Error, Result};
use crate::meander::{ArchSystem, Meander};
use crate::permutation::Permutation;
use crate::rng::{seeded, StreamRng};

const NONE: u32 = u32::MAX;

/// Parameters of one chain run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub n: usize,
    pub steps: u64,
    pub burn_in: u64,
    pub thin: u64,
    pub seed: u64,
}

impl ChainConfig {
    /// Uses the default burn-in `⌈50 n ln n⌉` (capped at `steps`) and
    /// thinning `n`.
    pub fn new(n: usize, steps: u64, seed: u64) -> ChainConfig {
        ChainConfig {
            n,
            steps,
            burn_in: default_burn_in(n).min(steps),
            thin: n.max(1) as u64,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("meander size must be positive".into()));
        }
        if self.burn_in > self.steps {
            return Err(Error::InvalidConfig(format!(
                "burn_in {} exceeds steps {}",
                self.burn_in, self.steps
            )));
        }
        if self.thin == 0 {
            return Err(Error::InvalidConfig("thin must be at least 1".into()));
        }
        if 2 * self.n >= NONE as usize {
            return Err(Error::InvalidConfig(format!("size {} is too large", self.n)));
        }
        Ok(())
    }

    /// Number of meanders [`run_chain`] emits.
    pub fn emitted(&self) -> u64 {
        (self.steps - self.burn_in) / self.thin
    }
}

pub fn default_burn_in(n: usize) -> u64 {
    let n = n as f64;
    (50.0 * n * n.ln()).ceil() as u64
}

/// Outcome of one proposal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Proposal {
    Candidate(Meander),
    Rejected,
}

/// One arc system with its forest structure. Arcs are named by their left
/// endpoint; `parent` and `deg` are meaningful at left endpoints only.
#[derive(Clone, Debug)]
struct Forest {
    partner: Vec<u32>,
    parent: Vec<u32>,
    deg: Vec<u32>,
    root_deg: u32,
}

impl Forest {
    fn new(partner: Vec<u32>) -> Forest {
        let len = partner.len();
        let mut parent = vec![NONE; len];
        let mut deg = vec![0; len];
        let mut root_deg = 0;
        let mut open: Vec<u32> = Vec::new();
        for (i, &p) in partner.iter().enumerate() {
            if p as usize > i {
                match open.last() {
                    Some(&top) => {
                        parent[i] = top;
                        deg[top as usize] += 1;
                    }
                    None => root_deg += 1,
                }
                open.push(i as u32);
            } else {
                open.pop();
            }
        }
        Forest {
            partner,
            parent,
            deg,
            root_deg,
        }
    }

    #[inline]
    fn left(&self, p: u32) -> u32 {
        p.min(self.partner[p as usize])
    }

    #[inline]
    fn parent_deg(&self, a: u32) -> u32 {
        match self.parent[a as usize] {
            NONE => self.root_deg,
            p => self.deg[p as usize],
        }
    }

    /// Number of arcs that `a` can be rewired with.
    #[inline]
    fn valence(&self, a: u32) -> u32 {
        let has_parent = (self.parent[a as usize] != NONE) as u32;
        self.deg[a as usize] + has_parent + self.parent_deg(a) - 1
    }

    /// Bounds `(from, to)` such that the children of `node` are the
    /// top-level arcs strictly inside; `None` is the root.
    #[inline]
    fn child_range(&self, node: u32) -> (i64, i64) {
        match node {
            NONE => (-1, self.partner.len() as i64),
            a => (a as i64, self.partner[a as usize] as i64),
        }
    }

    fn for_each_child(&self, node: u32, mut visit: impl FnMut(u32)) {
        let (from, to) = self.child_range(node);
        let mut x = (from + 1) as u32;
        while (x as i64) < to {
            visit(x);
            x = self.partner[x as usize] + 1;
        }
    }

    fn nth_child(&self, node: u32, mut k: u32, skip: u32) -> u32 {
        let (from, to) = self.child_range(node);
        let mut x = (from + 1) as u32;
        while (x as i64) < to {
            if x != skip {
                if k == 0 {
                    return x;
                }
                k -= 1;
            }
            x = self.partner[x as usize] + 1;
        }
        unreachable!("child index out of range")
    }

    /// The `k`-th neighbour of `a`: children first, then the parent, then
    /// the siblings.
    fn neighbor(&self, a: u32, k: u32) -> u32 {
        let d = self.deg[a as usize];
        if k < d {
            return self.nth_child(a, k, NONE);
        }
        let mut k = k - d;
        let p = self.parent[a as usize];
        if p != NONE {
            if k == 0 {
                return p;
            }
            k -= 1;
        }
        self.nth_child(p, k, a)
    }

    /// Rewires neighbours `a` and `c` and returns the left endpoints of the
    /// two new arcs.
    fn rewire(&mut self, a: u32, c: u32) -> (u32, u32) {
        let (a, c) = (a.min(c), a.max(c));
        let b = self.partner[a as usize];
        let d = self.partner[c as usize];
        let (au, bu, cu, du) = (a as usize, b as usize, c as usize, d as usize);
        let out = if b < c {
            // siblings (a,b), (c,d) -> (a,d) ⊃ (b,c)
            debug_assert_eq!(self.parent[au], self.parent[cu]);
            let mid = self.relabel(b, c, b);
            self.relabel(c, d, a);
            let p = self.parent[au];
            self.deg[au] += 1 + self.deg[cu];
            self.deg[bu] = mid;
            *self.deg_of_mut(p) -= 1 + mid;
            self.parent[bu] = a;
            (a, b)
        } else {
            // (a,b) ⊃ (c,d) -> (a,c), (d,b)
            debug_assert_eq!(self.parent[cu], a);
            let p = self.parent[au];
            let inner = self.relabel(c, d, p);
            let right = self.relabel(d, b, d);
            self.deg[au] -= 1 + right;
            self.deg[du] = right;
            *self.deg_of_mut(p) += 1 + inner;
            self.parent[du] = p;
            (a, d)
        };
        self.parent[cu] = NONE;
        self.deg[cu] = 0;
        for (u, v) in self.repaired_from(a, b, c, d) {
            self.partner[u as usize] = v;
            self.partner[v as usize] = u;
        }
        out
    }

    fn repaired_from(&self, a: u32, b: u32, c: u32, d: u32) -> [(u32, u32); 2] {
        if b < c {
            [(a, d), (b, c)]
        } else {
            [(a, c), (d, b)]
        }
    }

    fn deg_of_mut(&mut self, node: u32) -> &mut u32 {
        match node {
            NONE => &mut self.root_deg,
            p => &mut self.deg[p as usize],
        }
    }

    /// Sets the parent of every top-level arc strictly inside `(from, to)`
    /// and returns how many there are.
    fn relabel(&mut self, from: u32, to: u32, new_parent: u32) -> u32 {
        let mut count = 0;
        let mut x = from + 1;
        while x < to {
            self.parent[x as usize] = new_parent;
            count += 1;
            x = self.partner[x as usize] + 1;
        }
        count
    }
}

/// The running state of a meander chain.
#[derive(Clone)]
pub struct MeanderChain {
    pts: usize,
    sides: [Forest; 2],
    /// The loop as a cyclic array with no fixed start or direction;
    /// `at` is its inverse.
    ring: Vec<u32>,
    at: Vec<u32>,
    rng: StreamRng,
    step_index: u64,
    accepted: u64,
    proposed: u64,
    joined: u64,
    /// Buffer of candidate joining rewires.
    joins: Vec<(usize, u32, u32)>,
    scratch: Vec<u32>,
}

/// A loop occupying `len` consecutive ring slots from `start`.
#[derive(Clone, Copy, Debug)]
struct Block {
    start: u32,
    len: u32,
}

impl MeanderChain {
    /// Starts from [`Meander::snake`].
    pub fn new(n: usize, seed: u64) -> MeanderChain {
        MeanderChain::from_meander(&Meander::snake(n), seed)
    }

    pub fn from_meander(m: &Meander, seed: u64) -> MeanderChain {
        let pts = m.points();
        assert!(pts < NONE as usize, "meander too large for the chain");
        let to_u32 = |a: &ArchSystem| -> Vec<u32> {
            (1..=pts).map(|i| (a.partner_of(i) - 1) as u32).collect()
        };
        let sides = [Forest::new(to_u32(m.upper())), Forest::new(to_u32(m.lower()))];
        let mut ring = Vec::with_capacity(pts);
        let mut p = 0u32;
        for r in 0..pts {
            ring.push(p);
            p = sides[r % 2].partner[p as usize];
        }
        let mut at = vec![0; pts];
        for (r, &p) in ring.iter().enumerate() {
            at[p as usize] = r as u32;
        }
        MeanderChain {
            pts,
            sides,
            ring,
            at,
            rng: seeded(seed),
            step_index: 0,
            accepted: 0,
            proposed: 0,
            joined: 0,
            joins: Vec::new(),
            scratch: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.pts / 2
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    pub fn proposed(&self) -> u64 {
        self.proposed
    }

    /// Accepted moves that went through a split into two loops.
    pub fn accepted_joins(&self) -> u64 {
        self.joined
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    /// Materializes the current state.
    pub fn current(&self) -> Meander {
        let sys = |s: usize| {
            ArchSystem::from_zero_based(self.sides[s].partner.iter().map(|&p| p as usize).collect())
                .expect("chain keeps arc systems noncrossing")
        };
        Meander::from_parts_unchecked(sys(0), sys(1))
    }

    /// Meandric permutation of the current state, read off the ring.
    pub fn meandric_permutation(&self) -> Permutation {
        let m = self.pts;
        let origin = self.at[0] as usize;
        let forward = self.ring[(origin + 1) % m] == self.sides[0].partner[0];
        Permutation::from_zero_based(self.at.iter().map(|&r| {
            let d = (r as usize + m - origin) % m;
            if forward || d == 0 {
                d
            } else {
                m - d
            }
        }))
    }

    #[inline]
    fn wrap(&self, r: u32) -> u32 {
        if r as usize >= self.pts {
            r - self.pts as u32
        } else {
            r
        }
    }

    /// Ring slot of the edge `{u, v}`: the edge joins slots `e` and `e + 1`.
    #[inline]
    fn edge_of(&self, u: u32, v: u32) -> u32 {
        let (ru, rv) = (self.at[u as usize], self.at[v as usize]);
        if self.wrap(ru + 1) == rv {
            ru
        } else {
            rv
        }
    }

    fn weight(&self, s: usize, a: u32, c: u32) -> f64 {
        let f = &self.sides[s];
        1.0 / f.valence(a) as f64 + 1.0 / f.valence(c) as f64
    }

    /// Draws one proposal and reports the candidate that would be accepted,
    /// without moving. Advances the random stream.
    pub fn propose(&mut self) -> Proposal {
        let mut trial = self.clone();
        let moved = trial.step();
        self.rng = trial.rng.clone();
        if moved {
            Proposal::Candidate(trial.current())
        } else {
            Proposal::Rejected
        }
    }

    /// One proposal, applied if accepted. Returns whether it was accepted;
    /// an accepted proposal can land back on the same meander.
    pub fn step(&mut self) -> bool {
        self.step_index += 1;
        self.proposed += 1;
        if self.pts == 2 {
            return false;
        }
        let moved = self.attempt();
        if moved {
            self.accepted += 1;
            #[cfg(debug_assertions)]
            self.check_invariants();
        }
        moved
    }

    pub fn run(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
    }

    fn attempt(&mut self) -> bool {
        let s = self.rng.random_range(0..2usize);
        let p = self.rng.random_range(0..self.pts as u32);
        let a = self.sides[s].left(p);
        let k = self.rng.random_range(0..self.sides[s].valence(a));
        let c = self.sides[s].neighbor(a, k);
        let q_fwd = self.weight(s, a, c);

        let f = &self.sides[s];
        let ea = self.edge_of(a, f.partner[a as usize]);
        let ec = self.edge_of(c, f.partner[c as usize]);
        let (i, j) = (ea.min(ec), ea.max(ec));
        debug_assert_eq!((j - i) % 2, 0);

        let u: f64 = self.rng.random();
        let (a2, c2) = self.sides[s].rewire(a, c);
        let pts = self.pts as u32;
        // the loop is now split into slots (i, j] and the rest
        let small = if 2 * (j - i) <= pts {
            Block { start: i + 1, len: j - i }
        } else {
            Block { start: self.wrap(j + 1), len: pts - (j - i) }
        };
        let Some((t, e, g)) = self.draw_join(small) else {
            self.sides[s].rewire(a2, c2);
            return false;
        };
        let old = [
            (e, self.sides[t].partner[e as usize]),
            (g, self.sides[t].partner[g as usize]),
        ];
        let (e2, g2) = self.sides[t].rewire(e, g);
        if u * q_fwd < self.weight(t, e2, g2) {
            self.splice(small, t, old);
            self.joined += 1;
            return true;
        }
        self.sides[t].rewire(e2, g2);
        self.sides[s].rewire(a2, c2);
        false
    }

    #[inline]
    fn offset(&self, b: Block, p: u32) -> u32 {
        let r = self.at[p as usize];
        if r >= b.start {
            r - b.start
        } else {
            r + self.pts as u32 - b.start
        }
    }

    /// Offset `o` within `b` such that the edge `{u, v}` joins offsets `o`
    /// and `o + 1` (cyclically within the block).
    fn edge_offset(&self, b: Block, u: u32, v: u32) -> u32 {
        let (ou, ov) = (self.offset(b, u), self.offset(b, v));
        if (ou + 1) % b.len == ov {
            ou
        } else {
            ov
        }
    }

    /// Rewrites the ring after a join. `x` is the block of one loop, the
    /// other loop fills the rest of the ring, and `old` are the two arcs of
    /// side `t` that the join replaced, one in each loop.
    fn splice(&mut self, x: Block, t: usize, old: [(u32, u32); 2]) {
        let pts = self.pts as u32;
        let y = Block { start: self.wrap(x.start + x.len), len: pts - x.len };
        let (xe, ye) = if self.offset(x, old[0].0) < x.len { (old[0], old[1]) } else { (old[1], old[0]) };
        let ox = self.edge_offset(x, xe.0, xe.1);
        let oy = self.edge_offset(y, ye.0, ye.1);
        let mut buf = std::mem::take(&mut self.scratch);
        buf.clear();
        let slot = |b: Block, o: u32| self.wrap(b.start + o % b.len) as usize;
        let y_end = self.ring[slot(y, oy)];
        let x_lo = self.ring[slot(x, ox)];
        // the x loop opened at its removed edge, starting next to `y_end`
        let push_x = |buf: &mut Vec<u32>, ring: &[u32]| {
            if self.sides[t].partner[y_end as usize] == x_lo {
                buf.extend((0..x.len).map(|k| ring[slot(x, ox + x.len - k)]));
            } else {
                buf.extend((0..x.len).map(|k| ring[slot(x, ox + 1 + k)]));
            }
        };
        // y splits after offset `oy` into y1 then y2; the new loop is
        // y1, x, y2 and one of y1, y2 keeps its slots
        let y1 = oy + 1;
        let y2 = y.len - y1;
        let write_from = if y2 <= y1 {
            push_x(&mut buf, &self.ring);
            buf.extend((y1..y.len).map(|k| self.ring[slot(y, k)]));
            self.wrap(y.start + y1)
        } else {
            buf.extend((0..y1).map(|k| self.ring[slot(y, k)]));
            push_x(&mut buf, &self.ring);
            x.start
        };
        let mut r = write_from;
        for &p in &buf {
            self.ring[r as usize] = p;
            self.at[p as usize] = r;
            r = self.wrap(r + 1);
        }
        self.scratch = buf;
    }

    /// Uniform choice among the rewires joining the two loops of the split
    /// state, listed from the arcs of the smaller loop `small`. Every joining
    /// rewire has one arc in each loop. Returns `(side, arc, arc)`.
    fn draw_join(&mut self, small: Block) -> Option<(usize, u32, u32)> {
        let mut joins = std::mem::take(&mut self.joins);
        joins.clear();
        let other = |x: u32| self.offset(small, x) >= small.len;
        for k in 0..small.len {
            let a = self.ring[self.wrap(small.start + k) as usize];
            for (t, f) in self.sides.iter().enumerate() {
                if f.partner[a as usize] < a {
                    continue;
                }
                let p = f.parent[a as usize];
                if p != NONE && other(p) {
                    joins.push((t, a, p));
                }
                f.for_each_child(a, |x| {
                    if other(x) {
                        joins.push((t, a, x));
                    }
                });
                f.for_each_child(p, |x| {
                    if x != a && other(x) {
                        joins.push((t, a, x));
                    }
                });
            }
        }
        let pick = if joins.is_empty() {
            None
        } else {
            Some(joins[self.rng.random_range(0..joins.len())])
        };
        self.joins = joins;
        pick
    }

    #[cfg(debug_assertions)]
    fn check_invariants(&self) {
        // full validation is O(n); keep it to small states in debug builds
        if self.pts <= 64 {
            let m = self.current();
            assert_eq!(m.meandric_permutation(), self.meandric_permutation());
            for (r, &p) in self.ring.iter().enumerate() {
                assert_eq!(self.at[p as usize] as usize, r);
            }
            for s in 0..2 {
                let fresh = Forest::new(self.sides[s].partner.clone());
                let f = &self.sides[s];
                assert_eq!(fresh.root_deg, f.root_deg);
                for a in 0..self.pts {
                    if f.partner[a] as usize > a {
                        assert_eq!(fresh.parent[a], f.parent[a]);
                        assert_eq!(fresh.deg[a], f.deg[a]);
                    }
                }
            }
        }
    }
}

/// Iterator over the thinned states of a chain run.
pub struct ChainRun {
    chain: MeanderChain,
    cfg: ChainConfig,
    remaining: u64,
}

impl ChainRun {
    pub fn state(&self) -> &MeanderChain {
        &self.chain
    }
}

impl Iterator for ChainRun {
    type Item = Meander;

    fn next(&mut self) -> Option<Meander> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        self.chain.run(self.cfg.thin);
        Some(self.chain.current())
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.remaining as usize;
        (r, Some(r))
    }
}

/// Runs the chain from the snake meander: `burn_in` steps, then one state
/// every `thin` steps until `steps` are used.
pub fn run_chain(cfg: &ChainConfig) -> Result<ChainRun> {
    cfg.validate()?;
    let mut chain = MeanderChain::new(cfg.n, cfg.seed);
    chain.run(cfg.burn_in);
    Ok(ChainRun {
        chain,
        cfg: cfg.clone(),
        remaining: cfg.emitted(),
    })
}

/// One meander from a fresh chain: the default burn-in, then one thinning
/// stride.
pub fn sample_meander(n: usize, seed: u64) -> Result<Meander> {
    let thin = n.max(1) as u64;
    let cfg = ChainConfig::new(n, default_burn_in(n) + thin, seed);
    let mut run = run_chain(&cfg)?;
    Ok(run.next().expect("one state is emitted"))
}

/// Largest size [`sample_class`] accepts.
pub const REJECTION_CAP: usize = 12;

/// Uniform element of a Baxter-type class by rejection from `S_n`.
pub fn sample_class(n: usize, tag: ClassTag, seed: u64) -> Result<Permutation> {
    let pred = tag.permutation_predicate().ok_or_else(|| {
        Error::InvalidConfig(format!("rejection sampling does not apply to {tag}"))
    })?;
    if n > REJECTION_CAP {
        return Err(Error::SizeTooLargeForRejection {
            n,
            cap: REJECTION_CAP,
        });
    }
    let mut rng = seeded(seed);
    loop {
        let p = shuffled(n, &mut rng);
        if pred(&p) {
            return Ok(p);
        }
    }
}

/// Uniform permutation of size `n` (Fisher-Yates).
pub fn uniform_permutation(n: usize, seed: u64) -> Permutation {
    shuffled(n, &mut seeded(seed))
}

pub(crate) fn shuffled<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    let mut v: Vec<usize> = (1..=n).collect();
    v.shuffle(rng);
    Permutation::from_vec_unchecked(v)
}

/// Lag-`k` autocorrelation of the LIS of successive samples; a mixing
/// diagnostic, not a guarantee.
pub fn lis_autocorrelation(samples: &[Permutation], lag: usize) -> Option<f64> {
    let xs: Vec<f64> = samples.iter().map(|p| lis(p) as f64).collect();
    autocorrelation(&xs, lag)
}

pub fn autocorrelation(xs: &[f64], lag: usize) -> Option<f64> {
    if xs.len() <= lag + 1 {
        return None;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    if var == 0.0 {
        return None;
    }
    let cov: f64 = xs
        .windows(lag + 1)
        .map(|w| (w[0] - mean) * (w[lag] - mean))
        .sum();
    Some(cov / var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_meanders;
    use crate::meander::cycle_len_through_zero;
    use crate::rng::derived_seed;
    use std::collections::HashMap;

    type State = [Vec<usize>; 2];

    fn state_of(m: &Meander) -> State {
        [m.upper().raw().to_vec(), m.lower().raw().to_vec()]
    }

    fn meander_of(s: &State) -> Meander {
        Meander::new(
            ArchSystem::from_zero_based(s[0].clone()).unwrap(),
            ArchSystem::from_zero_based(s[1].clone()).unwrap(),
        )
        .unwrap()
    }

    /// The noncrossing way to re-pair arcs `a` and `c`, found by trying both
    /// alternatives, or `None` if neither is noncrossing.
    fn slow_rewire(partner: &[usize], a: usize, c: usize) -> Option<Vec<usize>> {
        let (b, d) = (partner[a], partner[c]);
        [[(a, c), (b, d)], [(a, d), (b, c)]].into_iter().find_map(|pairs| {
            let mut p = partner.to_vec();
            for (u, v) in pairs {
                p[u] = v;
                p[v] = u;
            }
            ArchSystem::from_zero_based(p.clone()).ok().map(|_| p)
        })
    }

    fn slow_neighbors(partner: &[usize], a: usize) -> Vec<usize> {
        (0..partner.len())
            .filter(|&c| c < partner[c] && c != a && slow_rewire(partner, a, c).is_some())
            .collect()
    }

    fn slow_weight(partner: &[usize], a: usize, c: usize) -> f64 {
        1.0 / slow_neighbors(partner, a).len() as f64 + 1.0 / slow_neighbors(partner, c).len() as f64
    }

    fn single_loop(s: &State) -> bool {
        cycle_len_through_zero(&s[0], &s[1]) == s[0].len()
    }

    /// Every single rewire of `s`, as (side, arc, arc, result).
    fn rewires(s: &State) -> Vec<(usize, usize, usize, State)> {
        let mut out = Vec::new();
        for t in 0..2 {
            let p = &s[t];
            for a in (0..p.len()).filter(|&a| a < p[a]) {
                for c in slow_neighbors(p, a).into_iter().filter(|&c| c > a) {
                    let mut next = s.clone();
                    next[t] = slow_rewire(p, a, c).unwrap();
                    out.push((t, a, c, next));
                }
            }
        }
        out
    }

    fn left_arcs_of_change(old: &[usize], new: &[usize]) -> (usize, usize) {
        let mut lefts = (0..new.len()).filter(|&x| new[x] != old[x] && x < new[x]);
        (lefts.next().unwrap(), lefts.next().unwrap())
    }

    /// Transition probabilities out of `s` to other states, computed by
    /// enumerating every random choice of the kernel.
    fn slow_transitions(s: &State) -> HashMap<State, f64> {
        let pts = s[0].len() as f64;
        let mut out = HashMap::new();
        for (t, a, c, mid) in rewires(s) {
            let q_fwd = slow_weight(&s[t], a, c);
            let pick = q_fwd / pts;
            let (a2, c2) = left_arcs_of_change(&s[t], &mid[t]);
            if single_loop(&mid) {
                let q_rev = slow_weight(&mid[t], a2, c2);
                *out.entry(mid).or_insert(0.0) += pick * (q_rev / q_fwd).min(1.0);
                continue;
            }
            let joins: Vec<_> = rewires(&mid).into_iter().filter(|j| single_loop(&j.3)).collect();
            for (u, _, _, end) in &joins {
                let (e2, g2) = left_arcs_of_change(&mid[*u], &end[*u]);
                let q_rev = slow_weight(&end[*u], e2, g2);
                *out.entry(end.clone()).or_insert(0.0) +=
                    pick / joins.len() as f64 * (q_rev / q_fwd).min(1.0);
            }
        }
        out
    }

    #[test]
    fn size_one_never_moves() {
        let mut chain = MeanderChain::new(1, 5);
        let start = chain.current();
        for _ in 0..100 {
            assert!(!chain.step());
            assert_eq!(chain.propose(), Proposal::Rejected);
        }
        assert_eq!(chain.current(), start);
        assert_eq!(chain.proposed(), 100);
    }

    #[test]
    fn single_rewires_always_split() {
        for n in 2..=5 {
            for m in enumerate_meanders(n).unwrap() {
                let s = state_of(&m);
                assert!(!rewires(&s).is_empty());
                assert!(rewires(&s).iter().all(|r| !single_loop(&r.3)));
            }
        }
        let mut chain = MeanderChain::new(4, 9);
        chain.run(1000);
        assert_eq!(chain.accepted_joins(), chain.accepted());
        assert!(chain.accepted() > 0);
    }

    #[test]
    fn kernel_is_symmetric() {
        for n in 2..=4 {
            let states: Vec<State> = enumerate_meanders(n).unwrap().map(|m| state_of(&m)).collect();
            let table: HashMap<&State, HashMap<State, f64>> =
                states.iter().map(|s| (s, slow_transitions(s))).collect();
            for (s, row) in &table {
                assert!(row.values().sum::<f64>() <= 1.0 + 1e-12);
                for (t, p) in row {
                    if t == *s {
                        continue;
                    }
                    let back = table[t].get(*s).copied().unwrap_or(0.0);
                    assert!((p - back).abs() < 1e-12, "n={n}: {p} vs {back}");
                }
            }
        }
    }

    #[test]
    fn one_step_matches_enumerated_kernel() {
        for (n, trials) in [(3usize, 20_000u64), (4, 4_000)] {
            for (idx, m) in enumerate_meanders(n).unwrap().enumerate() {
                let s = state_of(&m);
                let expected = slow_transitions(&s);
                let mut seen: HashMap<State, u64> = HashMap::new();
                for t in 0..trials {
                    let mut chain = MeanderChain::from_meander(&m, derived_seed(idx as u64 * 1_000_003, t));
                    chain.step();
                    *seen.entry(state_of(&chain.current())).or_insert(0) += 1;
                }
                for t in seen.keys() {
                    if *t != s {
                        assert!(expected.contains_key(t), "impossible move at n={n}");
                    }
                }
                for (t, &p) in &expected {
                    if *t == s {
                        continue;
                    }
                    let mean = p * trials as f64;
                    let sd = (mean * (1.0 - p)).sqrt();
                    let got = seen.get(t).copied().unwrap_or(0) as f64;
                    assert!((got - mean).abs() <= 5.0 * sd + 1.0, "n={n}: {got} vs {mean}");
                }
            }
        }
    }

    #[test]
    fn ring_tracks_the_loop() {
        let mut chain = MeanderChain::new(20, 3);
        for _ in 0..2000 {
            chain.run(7);
            let m = chain.current();
            assert_eq!(m.meandric_permutation(), chain.meandric_permutation());
            let back = meander_of(&state_of(&m));
            assert_eq!(back, m);
        }
        assert!(chain.accepted_joins() > 0);
    }

    #[test]
    fn acceptance_is_strictly_between_zero_and_one() {
        for n in 3..=5 {
            for (i, m) in enumerate_meanders(n).unwrap().enumerate() {
                let mut chain = MeanderChain::from_meander(&m, i as u64);
                chain.run(2000);
                let r = chain.acceptance_rate();
                assert!(r > 0.0 && r < 1.0, "n={n} start {i}: {r}");
            }
        }
    }

    #[test]
    fn run_chain_counts_and_determinism() {
        let mut cfg = ChainConfig::new(6, 500, 11);
        cfg.burn_in = 100;
        cfg.thin = 7;
        let a: Vec<Meander> = run_chain(&cfg).unwrap().collect();
        assert_eq!(a.len() as u64, cfg.emitted());
        assert_eq!(a.len(), 57);
        let b: Vec<Meander> = run_chain(&cfg).unwrap().collect();
        assert_eq!(a, b);
        cfg.seed = 12;
        let c: Vec<Meander> = run_chain(&cfg).unwrap().collect();
        assert_ne!(a, c);

        cfg.burn_in = cfg.steps;
        assert_eq!(run_chain(&cfg).unwrap().count(), 0);
    }

    #[test]
    fn config_validation() {
        let cfg = ChainConfig::new(10, 50, 0);
        assert_eq!(cfg.burn_in, 50);
        assert_eq!(cfg.thin, 10);
        assert_eq!(ChainConfig::new(10, 1_000_000, 0).burn_in, default_burn_in(10));
        let mut bad = cfg.clone();
        bad.thin = 0;
        assert!(matches!(run_chain(&bad), Err(Error::InvalidConfig(_))));
        let mut bad = cfg.clone();
        bad.burn_in = 51;
        assert!(bad.validate().is_err());
        let mut bad = cfg;
        bad.n = 0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn propose_does_not_move() {
        let mut chain = MeanderChain::new(5, 1);
        chain.run(100);
        let before = chain.current();
        let mut moved = 0;
        for _ in 0..200 {
            if let Proposal::Candidate(m) = chain.propose() {
                // a split followed by the inverse join lands on the start
                assert!(m.n() == 5);
                moved += 1;
            }
            assert_eq!(chain.current(), before);
        }
        assert!(moved > 0);
    }

    #[test]
    fn uniform_permutation_frequencies() {
        let twelve = (0..10_000).filter(|&s| uniform_permutation(2, s).at(1) == 2).count();
        assert!((twelve as f64 / 1e4 - 0.5).abs() <= 0.02);
        assert_eq!(uniform_permutation(1, 3), Permutation::identity(1));
        assert_eq!(uniform_permutation(50, 8), uniform_permutation(50, 8));
    }

    #[test]
    fn class_samples() {
        for tag in [ClassTag::Baxter, ClassTag::SemiBaxter, ClassTag::StrongBaxter] {
            let pred = tag.permutation_predicate().unwrap();
            assert_eq!(sample_class(1, tag, 0).unwrap(), Permutation::identity(1));
            for seed in 0..50 {
                assert!(pred(&sample_class(9, tag, seed).unwrap()));
            }
            let mut counts: HashMap<Permutation, u32> = HashMap::new();
            for seed in 0..6000 {
                *counts.entry(sample_class(3, tag, seed).unwrap()).or_insert(0) += 1;
            }
            assert_eq!(counts.len(), 6);
            assert!(counts.values().all(|&c| (800..1200).contains(&c)));
        }
        assert!(matches!(
            sample_class(13, ClassTag::Baxter, 0),
            Err(Error::SizeTooLargeForRejection { n: 13, .. })
        ));
        assert!(sample_class(5, ClassTag::Meander, 0).is_err());
    }

    #[test]
    fn autocorrelation_edge_cases() {
        assert_eq!(autocorrelation(&[1.0, 2.0], 1), None);
        assert_eq!(autocorrelation(&[3.0; 10], 1), None);
        let alt: Vec<f64> = (0..100).map(|i| (i % 2) as f64).collect();
        assert!(autocorrelation(&alt, 1).unwrap() < -0.9);
    }
}
