//! Worlds, subsets of worlds, obligation maps and validated models.
//!
//! A [`WorldSet`] is a bitmask over the worlds of one model: bit `i` is world
//! `i`. Everything else in the crate is built from these.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// Largest model accepted for pure formula evaluation.
pub const MAX_WORLDS: usize = 16;

/// Largest model for operations that materialize every subset per context
/// (closure, condition checking, listings).
pub const MAX_DENSE_WORLDS: usize = 8;

/// Index of a world within its model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldId(pub usize);

/// A set of worlds stored as a bitmask.
///
/// Ordering is by raw bitmask, which is the canonical order for contexts.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct WorldSet(u32);

impl WorldSet {
    pub const EMPTY: WorldSet = WorldSet(0);

    pub const fn from_bits(bits: u32) -> Self {
        WorldSet(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    /// All worlds of an `n`-world model.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= 32);
        if n >= 32 {
            WorldSet(u32::MAX)
        } else {
            WorldSet((1u32 << n) - 1)
        }
    }

    pub fn singleton(w: WorldId) -> Self {
        WorldSet(1 << w.0)
    }

    pub fn from_worlds<I: IntoIterator<Item = WorldId>>(worlds: I) -> Self {
        worlds
            .into_iter()
            .fold(WorldSet::EMPTY, |acc, w| acc.with(w))
    }

    pub fn with(self, w: WorldId) -> Self {
        WorldSet(self.0 | (1 << w.0))
    }

    pub fn contains(self, w: WorldId) -> bool {
        w.0 < 32 && self.0 & (1 << w.0) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: WorldSet) -> Self {
        WorldSet(self.0 | other.0)
    }

    pub fn intersection(self, other: WorldSet) -> Self {
        WorldSet(self.0 & other.0)
    }

    pub fn difference(self, other: WorldSet) -> Self {
        WorldSet(self.0 & !other.0)
    }

    /// Complement relative to `universe`.
    pub fn complement_in(self, universe: WorldSet) -> Self {
        universe.difference(self)
    }

    pub fn is_subset(self, other: WorldSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn meets(self, other: WorldSet) -> bool {
        self.0 & other.0 != 0
    }

    /// Worlds in ascending index order.
    pub fn worlds(self) -> impl Iterator<Item = WorldId> {
        let bits = self.0;
        (0..32).filter(move |i| bits & (1 << i) != 0).map(WorldId)
    }

    /// Every subset of `self`, ascending by bitmask, `∅` first and `self` last.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }

    /// Every superset of `self` inside `universe`, ascending by bitmask.
    pub fn supersets_within(self, universe: WorldSet) -> impl Iterator<Item = WorldSet> {
        let base = self;
        universe
            .difference(self)
            .subsets()
            .map(move |extra| base.union(extra))
    }

    /// Comparison key for families: cardinality first, then bitmask.
    pub fn canonical_cmp(&self, other: &WorldSet) -> Ordering {
        (self.len(), self.0).cmp(&(other.len(), other.0))
    }
}

impl fmt::Debug for WorldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, w) in self.worlds().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", w.0)?;
        }
        write!(f, "}}")
    }
}

/// Iterator over the submasks of a mask in ascending order.
#[derive(Debug, Clone)]
pub struct Subsets {
    mask: u32,
    next: Option<u32>,
}

impl Iterator for Subsets {
    type Item = WorldSet;

    fn next(&mut self) -> Option<WorldSet> {
        let current = self.next?;
        self.next = if current == self.mask {
            None
        } else {
            // Next submask in increasing order.
            Some(((current | !self.mask).wrapping_add(1)) & self.mask)
        };
        Some(WorldSet(current))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct Canonical(WorldSet);

impl PartialOrd for Canonical {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Canonical {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.canonical_cmp(&other.0)
    }
}

/// A set of world sets, iterated in canonical order (cardinality, then bitmask).
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Family(BTreeSet<Canonical>);

impl std::hash::Hash for Canonical {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl Family {
    pub fn new() -> Self {
        Family(BTreeSet::new())
    }

    pub fn insert(&mut self, set: WorldSet) -> bool {
        self.0.insert(Canonical(set))
    }

    pub fn remove(&mut self, set: WorldSet) -> bool {
        self.0.remove(&Canonical(set))
    }

    pub fn contains(&self, set: WorldSet) -> bool {
        self.0.contains(&Canonical(set))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = WorldSet> + '_ {
        self.0.iter().map(|c| c.0)
    }

    pub fn is_subfamily(&self, other: &Family) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl FromIterator<WorldSet> for Family {
    fn from_iter<I: IntoIterator<Item = WorldSet>>(iter: I) -> Self {
        Family(iter.into_iter().map(Canonical).collect())
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// `U(base)` restricted to `universe`: every `Y ⊆ universe` with `base ⊆ Y`.
pub fn upset(base: WorldSet, universe: WorldSet) -> Result<Family> {
    if !base.is_subset(universe) {
        return Err(Error::InvalidArgument(format!(
            "upset base {base:?} is not contained in universe {universe:?}"
        )));
    }
    Ok(base.supersets_within(universe).collect())
}

/// The obligation map `π`: a family of contexts for every context.
///
/// Contexts without an entry map to the empty family.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct ObMap {
    world_count: usize,
    entries: BTreeMap<WorldSet, Family>,
}

impl ObMap {
    pub fn new(world_count: usize) -> Self {
        ObMap {
            world_count,
            entries: BTreeMap::new(),
        }
    }

    pub fn world_count(&self) -> usize {
        self.world_count
    }

    pub fn universe(&self) -> WorldSet {
        WorldSet::full(self.world_count)
    }

    /// `π(context)`; `None` stands for the empty family.
    pub fn get(&self, context: WorldSet) -> Option<&Family> {
        self.entries.get(&context)
    }

    /// Members of `π(context)` in canonical order.
    pub fn members(&self, context: WorldSet) -> impl Iterator<Item = WorldSet> + '_ {
        self.entries
            .get(&context)
            .into_iter()
            .flat_map(Family::iter)
    }

    /// `π(context)` as an owned family; empty when unset.
    pub fn family(&self, context: WorldSet) -> Family {
        self.get(context).cloned().unwrap_or_default()
    }

    pub fn contains(&self, context: WorldSet, member: WorldSet) -> bool {
        self.entries
            .get(&context)
            .is_some_and(|fam| fam.contains(member))
    }

    /// Adds `member` to `π(context)`. Returns whether it was new.
    pub fn insert(&mut self, context: WorldSet, member: WorldSet) -> bool {
        debug_assert!(context.is_subset(self.universe()) && member.is_subset(self.universe()));
        self.entries.entry(context).or_default().insert(member)
    }

    /// Replaces `π(context)` wholesale.
    pub fn set(&mut self, context: WorldSet, family: Family) {
        if family.is_empty() {
            self.entries.remove(&context);
        } else {
            self.entries.insert(context, family);
        }
    }

    /// Nonempty entries in ascending context order.
    pub fn entries(&self) -> impl Iterator<Item = (WorldSet, &Family)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    /// Total number of `(context, member)` pairs.
    pub fn membership_count(&self) -> usize {
        self.entries.values().map(Family::len).sum()
    }

    /// Whether every membership of `self` is also one of `other`.
    pub fn is_submap(&self, other: &ObMap) -> bool {
        self.entries.iter().all(|(ctx, fam)| {
            other
                .entries
                .get(ctx)
                .is_some_and(|theirs| fam.is_subfamily(theirs))
        })
    }

    pub(crate) fn to_dense(&self) -> Result<DenseOb> {
        DenseOb::from_ob(self)
    }
}

impl fmt::Debug for ObMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter()).finish()
    }
}

/// Bitset form of an [`ObMap`] for models of at most [`MAX_DENSE_WORLDS`]
/// worlds: one 256-bit membership vector per context.
#[derive(Clone, PartialEq, Eq)]
pub(crate) struct DenseOb {
    world_count: usize,
    rows: Vec<[u64; 4]>,
}

impl DenseOb {
    pub(crate) fn new(world_count: usize) -> Result<Self> {
        check_dense(world_count)?;
        Ok(DenseOb {
            world_count,
            rows: vec![[0; 4]; 1 << world_count],
        })
    }

    pub(crate) fn from_ob(ob: &ObMap) -> Result<Self> {
        let mut dense = DenseOb::new(ob.world_count)?;
        for (ctx, fam) in ob.entries() {
            for member in fam.iter() {
                dense.insert(ctx, member);
            }
        }
        Ok(dense)
    }

    pub(crate) fn to_ob(&self) -> ObMap {
        let mut ob = ObMap::new(self.world_count);
        for ctx in self.universe().subsets() {
            for member in self.members(ctx) {
                ob.insert(ctx, member);
            }
        }
        ob
    }

    pub(crate) fn universe(&self) -> WorldSet {
        WorldSet::full(self.world_count)
    }

    #[inline]
    pub(crate) fn contains(&self, ctx: WorldSet, member: WorldSet) -> bool {
        let m = member.bits() as usize;
        self.rows[ctx.bits() as usize][m >> 6] & (1 << (m & 63)) != 0
    }

    #[inline]
    pub(crate) fn insert(&mut self, ctx: WorldSet, member: WorldSet) -> bool {
        let m = member.bits() as usize;
        let word = &mut self.rows[ctx.bits() as usize][m >> 6];
        let bit = 1u64 << (m & 63);
        let fresh = *word & bit == 0;
        *word |= bit;
        fresh
    }

    pub(crate) fn is_empty_at(&self, ctx: WorldSet) -> bool {
        self.rows[ctx.bits() as usize].iter().all(|w| *w == 0)
    }

    /// Members of `π(ctx)` in canonical order.
    pub(crate) fn members(&self, ctx: WorldSet) -> Vec<WorldSet> {
        let row = &self.rows[ctx.bits() as usize];
        let mut out: Vec<WorldSet> = (0..256u32)
            .filter(|m| row[(*m >> 6) as usize] & (1 << (m & 63)) != 0)
            .map(WorldSet::from_bits)
            .collect();
        out.sort_by(WorldSet::canonical_cmp);
        out
    }
}

pub(crate) fn check_dense(world_count: usize) -> Result<()> {
    if world_count > MAX_DENSE_WORLDS {
        Err(Error::TooLarge {
            worlds: world_count,
            limit: MAX_DENSE_WORLDS,
        })
    } else {
        Ok(())
    }
}

/// A validated CJ model `⟨W, av, pv, π, V⟩`.
///
/// Construction enforces `w ∈ av(w) ⊆ pv(w)` for every world; fields are
/// read-only afterwards.
#[derive(Clone, PartialEq, Eq)]
pub struct Model {
    worlds: Vec<String>,
    valuation: BTreeMap<String, WorldSet>,
    av: Vec<WorldSet>,
    pv: Vec<WorldSet>,
    ob: ObMap,
}

impl Model {
    pub fn new(
        worlds: Vec<String>,
        valuation: BTreeMap<String, WorldSet>,
        av: Vec<WorldSet>,
        pv: Vec<WorldSet>,
        ob: ObMap,
    ) -> Result<Model> {
        let n = worlds.len();
        if n == 0 {
            return Err(Error::EmptyWorldSet);
        }
        if n > MAX_WORLDS {
            return Err(Error::TooLarge {
                worlds: n,
                limit: MAX_WORLDS,
            });
        }
        let mut seen = BTreeSet::new();
        for name in &worlds {
            if name.is_empty() || !seen.insert(name.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "world names must be nonempty and unique (got {name:?})"
                )));
            }
        }
        if av.len() != n || pv.len() != n {
            return Err(Error::InvalidArgument(format!(
                "av and pv must be given for all {n} worlds"
            )));
        }
        if ob.world_count() != n {
            return Err(Error::InvalidArgument(format!(
                "obligation map is over {} worlds, model has {n}",
                ob.world_count()
            )));
        }
        let universe = WorldSet::full(n);
        let out_of_range = |s: &WorldSet| !s.is_subset(universe);
        if valuation.values().any(out_of_range)
            || ob
                .entries()
                .any(|(ctx, fam)| out_of_range(&ctx) || fam.iter().any(|m| out_of_range(&m)))
        {
            return Err(Error::InvalidArgument(
                "valuation or obligation map mentions worlds outside the model".into(),
            ));
        }
        for w in (0..n).map(WorldId) {
            let (a, p) = (av[w.0], pv[w.0]);
            if !a.contains(w) || !a.is_subset(p) || out_of_range(&p) {
                return Err(Error::FrameViolation(worlds[w.0].clone()));
            }
        }
        Ok(Model {
            worlds,
            valuation,
            av,
            pv,
            ob,
        })
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn universe(&self) -> WorldSet {
        WorldSet::full(self.worlds.len())
    }

    pub fn world_ids(&self) -> impl Iterator<Item = WorldId> {
        (0..self.worlds.len()).map(WorldId)
    }

    pub fn world_name(&self, w: WorldId) -> &str {
        &self.worlds[w.0]
    }

    pub fn world_names(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_by_name(&self, name: &str) -> Option<WorldId> {
        self.worlds.iter().position(|n| n == name).map(WorldId)
    }

    pub fn av(&self, w: WorldId) -> WorldSet {
        self.av[w.0]
    }

    pub fn pv(&self, w: WorldId) -> WorldSet {
        self.pv[w.0]
    }

    pub fn ob(&self) -> &ObMap {
        &self.ob
    }

    pub fn valuation(&self) -> &BTreeMap<String, WorldSet> {
        &self.valuation
    }

    pub fn atom(&self, name: &str) -> Option<WorldSet> {
        self.valuation.get(name).copied()
    }

    /// Same model with `av(w)` replaced; revalidated.
    pub fn with_av(&self, w: WorldId, av: WorldSet) -> Result<Model> {
        let mut avs = self.av.clone();
        avs[w.0] = av;
        Model::new(
            self.worlds.clone(),
            self.valuation.clone(),
            avs,
            self.pv.clone(),
            self.ob.clone(),
        )
    }

    /// Same frame and valuation over a different obligation map.
    pub fn with_ob(&self, ob: ObMap) -> Result<Model> {
        Model::new(
            self.worlds.clone(),
            self.valuation.clone(),
            self.av.clone(),
            self.pv.clone(),
            ob,
        )
    }

    /// Renders a set with this model's world names, e.g. `{a, b}`.
    pub fn show_set(&self, set: WorldSet) -> String {
        show_set(&self.worlds, set)
    }
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model")
            .field("worlds", &self.worlds)
            .field("valuation", &self.valuation)
            .field("av", &self.av)
            .field("pv", &self.pv)
            .field("ob", &self.ob)
            .finish()
    }
}

/// `{a, b}` using `names` for world labels, in declaration order.
pub fn show_set(names: &[String], set: WorldSet) -> String {
    let parts: Vec<&str> = set
        .worlds()
        .filter_map(|w| names.get(w.0).map(String::as_str))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

/// `{{a}, {a, b}}` in canonical family order.
pub fn show_family<I: IntoIterator<Item = WorldSet>>(names: &[String], family: I) -> String {
    let parts: Vec<String> = family.into_iter().map(|s| show_set(names, s)).collect();
    format!("{{{}}}", parts.join(", "))
}
