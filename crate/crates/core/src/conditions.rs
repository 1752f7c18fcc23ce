//! Decision procedures for the semantic conditions on `π`.
//!
//! Every quantifier is an explicit loop over `𝒫(W)` in canonical order and
//! every failing tuple is reported, so the output of a check is a stable
//! diagnostic rather than a first-found counterexample.
//!
//! | condition | statement |
//! |-----------|-----------|
//! | (1) | `∅ ∉ π(X)` |
//! | (2) | `Y ∩ X = Z ∩ X → (Y ∈ π(X) ↔ Z ∈ π(X))` |
//! | (3) | `Y, Z ∈ π(X) → Y ∩ Z ∈ π(X)` |
//! | (4) | `X ⊆ Y ⊆ Z ∧ X ∈ π(Y) → (Z ∖ Y) ∪ X ∈ π(Z)` |
//! | (5) | `Z ∈ π(X) ∧ Y ⊆ X ∧ Y ∩ Z ≠ ∅ → Z ∈ π(Y)` |
//! | union | `X ∈ π(Y) ∧ X ∈ π(Z) → X ∈ π(Y ∪ Z)` |

use std::fmt;

use crate::error::Result;
use crate::kernel::{show_set, DenseOb, Model, ObMap, WorldId, WorldSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    /// `w ∈ av(w) ⊆ pv(w)`.
    Frame,
    /// (1)
    NoEmptyMember,
    /// (2)
    Relevance,
    /// (3)
    Intersection,
    /// (4)
    Expansion,
    /// (5)
    Inheritance,
    /// Derived law: membership is preserved under union of contexts.
    Union,
}

impl Condition {
    /// Conditions (1)–(4), the ones every CJ model satisfies.
    pub const BASE: [Condition; 4] = [
        Condition::NoEmptyMember,
        Condition::Relevance,
        Condition::Intersection,
        Condition::Expansion,
    ];

    pub fn from_number(k: u8) -> Option<Condition> {
        match k {
            1 => Some(Condition::NoEmptyMember),
            2 => Some(Condition::Relevance),
            3 => Some(Condition::Intersection),
            4 => Some(Condition::Expansion),
            5 => Some(Condition::Inheritance),
            _ => None,
        }
    }

    pub fn number(self) -> Option<u8> {
        match self {
            Condition::NoEmptyMember => Some(1),
            Condition::Relevance => Some(2),
            Condition::Intersection => Some(3),
            Condition::Expansion => Some(4),
            Condition::Inheritance => Some(5),
            Condition::Frame | Condition::Union => None,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.number() {
            Some(k) => write!(f, "({k})"),
            None if *self == Condition::Frame => f.write_str("frame"),
            None => f.write_str("union"),
        }
    }
}

/// One failing instance of a condition.
///
/// The witness layout depends on the condition:
/// - (1): `[X]` with `∅ ∈ π(X)`
/// - (2): `[X, Y, Z]` with `Y ∈ π(X)`, `Z ∉ π(X)`
/// - (3): `[X, Y, Z]` with `Y, Z ∈ π(X)`, `Y ∩ Z ∉ π(X)`
/// - (4): `[X, Y, Z]` with `X ∈ π(Y)`, `(Z ∖ Y) ∪ X ∉ π(Z)`
/// - (5): `[X, Y, Z]` with `Z ∈ π(X)`, `Z ∉ π(Y)`
/// - union: `[X, Y, Z]` with `X ∈ π(Y)`, `X ∈ π(Z)`, `X ∉ π(Y ∪ Z)`
/// - frame: `[{w}, av(w), pv(w)]`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub witness: Vec<WorldSet>,
    pub message: String,
}

impl Violation {
    fn new(condition: Condition, witness: Vec<WorldSet>, names: &[String]) -> Violation {
        let message = describe(condition, &witness, names);
        Violation {
            condition,
            witness,
            message,
        }
    }

    /// Re-instantiates the condition on the witness sets against `model`;
    /// true when the failure is reproduced.
    pub fn refails(&self, model: &Model) -> bool {
        let ob = model.ob();
        let w = &self.witness;
        match self.condition {
            Condition::Frame => {
                let Some(world) = w[0].worlds().next() else {
                    return false;
                };
                let (av, pv) = (model.av(world), model.pv(world));
                !av.contains(world) || !av.is_subset(pv)
            }
            Condition::NoEmptyMember => ob.contains(w[0], WorldSet::EMPTY),
            Condition::Relevance => {
                let (x, y, z) = (w[0], w[1], w[2]);
                y.intersection(x) == z.intersection(x) && ob.contains(x, y) && !ob.contains(x, z)
            }
            Condition::Intersection => {
                let (x, y, z) = (w[0], w[1], w[2]);
                ob.contains(x, y) && ob.contains(x, z) && !ob.contains(x, y.intersection(z))
            }
            Condition::Expansion => {
                let (x, y, z) = (w[0], w[1], w[2]);
                x.is_subset(y)
                    && y.is_subset(z)
                    && ob.contains(y, x)
                    && !ob.contains(z, z.difference(y).union(x))
            }
            Condition::Inheritance => {
                let (x, y, z) = (w[0], w[1], w[2]);
                ob.contains(x, z) && y.is_subset(x) && y.meets(z) && !ob.contains(y, z)
            }
            Condition::Union => {
                let (x, y, z) = (w[0], w[1], w[2]);
                ob.contains(y, x) && ob.contains(z, x) && !ob.contains(y.union(z), x)
            }
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn describe(condition: Condition, w: &[WorldSet], names: &[String]) -> String {
    let s = |set: WorldSet| show_set(names, set);
    match condition {
        Condition::Frame => format!(
            "frame: world {} has av = {}, pv = {}",
            s(w[0]),
            s(w[1]),
            s(w[2])
        ),
        Condition::NoEmptyMember => format!("(1): ∅ ∈ π({})", s(w[0])),
        Condition::Relevance => format!(
            "(2): {} and {} agree on {}, but {} ∈ π({}) and {} ∉ π({})",
            s(w[1]),
            s(w[2]),
            s(w[0]),
            s(w[1]),
            s(w[0]),
            s(w[2]),
            s(w[0])
        ),
        Condition::Intersection => format!(
            "(3): {} and {} ∈ π({}), but {} ∉ π({})",
            s(w[1]),
            s(w[2]),
            s(w[0]),
            s(w[1].intersection(w[2])),
            s(w[0])
        ),
        Condition::Expansion => format!(
            "(4): {} ∈ π({}) and {} ⊆ {} ⊆ {}, but {} ∉ π({})",
            s(w[0]),
            s(w[1]),
            s(w[0]),
            s(w[1]),
            s(w[2]),
            s(w[2].difference(w[1]).union(w[0])),
            s(w[2])
        ),
        Condition::Inheritance => format!(
            "(5): {} ∈ π({}) and {} ⊆ {} meets it, but {} ∉ π({})",
            s(w[2]),
            s(w[0]),
            s(w[1]),
            s(w[0]),
            s(w[2]),
            s(w[1])
        ),
        Condition::Union => format!(
            "union: {} ∈ π({}) and {} ∈ π({}), but {} ∉ π({})",
            s(w[0]),
            s(w[1]),
            s(w[0]),
            s(w[2]),
            s(w[0]),
            s(w[1].union(w[2]))
        ),
    }
}

/// Violations grouped by condition, in check order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConditionReport {
    pub violations: Vec<Violation>,
}

impl ConditionReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn of(&self, condition: Condition) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(move |v| v.condition == condition)
    }

    pub fn count(&self, condition: Condition) -> usize {
        self.of(condition).count()
    }
}

/// All violations of one condition.
pub fn check_condition(model: &Model, condition: Condition) -> Result<Vec<Violation>> {
    if condition == Condition::Frame {
        return Ok(check_frame(model));
    }
    let dense = model.ob().to_dense()?;
    Ok(violations(&dense, condition, false)
        .into_iter()
        .map(|w| Violation::new(condition, w, model.world_names()))
        .collect())
}

/// Frame invariant, then (1)–(4), then (5) when requested.
pub fn check_all(model: &Model, include5: bool) -> Result<ConditionReport> {
    let dense = model.ob().to_dense()?;
    let mut report = ConditionReport {
        violations: check_frame(model),
    };
    let mut conditions = Condition::BASE.to_vec();
    if include5 {
        conditions.push(Condition::Inheritance);
    }
    for c in conditions {
        report.violations.extend(
            violations(&dense, c, false)
                .into_iter()
                .map(|w| Violation::new(c, w, model.world_names())),
        );
    }
    Ok(report)
}

/// Violations of `X ∈ π(Y) ∧ X ∈ π(Z) ⇒ X ∈ π(Y ∪ Z)`.
pub fn check_union_property(model: &Model) -> Result<Vec<Violation>> {
    check_condition(model, Condition::Union)
}

/// Whether `ob` satisfies `condition`, stopping at the first failure.
pub fn ob_satisfies(ob: &ObMap, condition: Condition) -> Result<bool> {
    let dense = ob.to_dense()?;
    Ok(dense_satisfies(&dense, condition))
}

pub(crate) fn dense_satisfies(dense: &DenseOb, condition: Condition) -> bool {
    violations(dense, condition, true).is_empty()
}

fn check_frame(model: &Model) -> Vec<Violation> {
    model
        .world_ids()
        .filter(|&w| {
            let (av, pv) = (model.av(w), model.pv(w));
            !av.contains(w) || !av.is_subset(pv)
        })
        .map(|w: WorldId| {
            Violation::new(
                Condition::Frame,
                vec![WorldSet::singleton(w), model.av(w), model.pv(w)],
                model.world_names(),
            )
        })
        .collect()
}

/// Raw witness tuples for `condition` over a dense map.
pub(crate) fn violations(
    ob: &DenseOb,
    condition: Condition,
    first_only: bool,
) -> Vec<Vec<WorldSet>> {
    let universe = ob.universe();
    let mut out = Vec::new();
    macro_rules! report {
        ($($s:expr),+) => {{
            out.push(vec![$($s),+]);
            if first_only {
                return out;
            }
        }};
    }
    match condition {
        Condition::Frame => {}
        Condition::NoEmptyMember => {
            for x in universe.subsets() {
                if ob.contains(x, WorldSet::EMPTY) {
                    report!(x);
                }
            }
        }
        Condition::Relevance => {
            for x in universe.subsets() {
                if ob.is_empty_at(x) {
                    continue;
                }
                let outside = universe.difference(x);
                for y in universe.subsets() {
                    if !ob.contains(x, y) {
                        continue;
                    }
                    let core = y.intersection(x);
                    for extra in outside.subsets() {
                        let z = core.union(extra);
                        if !ob.contains(x, z) {
                            report!(x, y, z);
                        }
                    }
                }
            }
        }
        Condition::Intersection => {
            for x in universe.subsets() {
                if ob.is_empty_at(x) {
                    continue;
                }
                let members: Vec<WorldSet> =
                    universe.subsets().filter(|m| ob.contains(x, *m)).collect();
                for (i, &y) in members.iter().enumerate() {
                    for &z in &members[i + 1..] {
                        if !ob.contains(x, y.intersection(z)) {
                            report!(x, y, z);
                        }
                    }
                }
            }
        }
        Condition::Expansion => {
            for y in universe.subsets() {
                if ob.is_empty_at(y) {
                    continue;
                }
                for x in y.subsets() {
                    if !ob.contains(y, x) {
                        continue;
                    }
                    for z in y.supersets_within(universe) {
                        if !ob.contains(z, z.difference(y).union(x)) {
                            report!(x, y, z);
                        }
                    }
                }
            }
        }
        Condition::Inheritance => {
            for x in universe.subsets() {
                if ob.is_empty_at(x) {
                    continue;
                }
                for z in universe.subsets() {
                    if !ob.contains(x, z) {
                        continue;
                    }
                    for y in x.subsets() {
                        if y.meets(z) && !ob.contains(y, z) {
                            report!(x, y, z);
                        }
                    }
                }
            }
        }
        Condition::Union => {
            let contexts: Vec<WorldSet> = universe.subsets().collect();
            for x in universe.subsets() {
                let holders: Vec<WorldSet> = contexts
                    .iter()
                    .copied()
                    .filter(|c| ob.contains(*c, x))
                    .collect();
                for (i, &y) in holders.iter().enumerate() {
                    for &z in &holders[i + 1..] {
                        if !ob.contains(y.union(z), x) {
                            report!(x, y, z);
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::ObMap;
    use std::collections::BTreeMap;

    fn set(bits: u32) -> WorldSet {
        WorldSet::from_bits(bits)
    }

    // w = bit 0, y = bit 1
    fn counter_model_ob() -> ObMap {
        let mut ob = ObMap::new(2);
        for ctx in [0b11, 0b10] {
            ob.insert(set(ctx), set(0b10));
            ob.insert(set(ctx), set(0b11));
        }
        ob
    }

    fn model_over(ob: ObMap) -> Model {
        let n = ob.world_count();
        let names = (0..n).map(|i| format!("v{i}")).collect();
        let own: Vec<WorldSet> = (0..n).map(|i| WorldSet::singleton(WorldId(i))).collect();
        Model::new(names, BTreeMap::new(), own.clone(), own, ob).unwrap()
    }

    #[test]
    fn counter_model_passes_base_conditions() {
        let m = model_over(counter_model_ob());
        for c in Condition::BASE {
            assert!(check_condition(&m, c).unwrap().is_empty(), "{c}");
        }
        assert!(check_all(&m, false).unwrap().is_clean());
    }

    #[test]
    fn empty_member_reported_with_context() {
        let mut ob = counter_model_ob();
        ob.insert(set(0b10), WorldSet::EMPTY);
        let m = model_over(ob);
        let v = check_condition(&m, Condition::NoEmptyMember).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].witness, vec![set(0b10)]);
        assert!(v[0].refails(&m));
    }

    #[test]
    fn relevance_is_checked_both_ways() {
        // {y} ∈ π(W) alone: fine. {y} ∈ π({y}) without {w,y}: (2) fails.
        let mut ob = ObMap::new(2);
        ob.insert(set(0b10), set(0b10));
        let m = model_over(ob);
        let v = check_condition(&m, Condition::Relevance).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].witness, vec![set(0b10), set(0b10), set(0b11)]);
        assert!(v[0].refails(&m));
    }

    #[test]
    fn intersection_failure_per_unordered_pair() {
        let mut ob = ObMap::new(3);
        ob.insert(set(0b111), set(0b011));
        ob.insert(set(0b111), set(0b110));
        let m = model_over(ob);
        let v = check_condition(&m, Condition::Intersection).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].witness, vec![set(0b111), set(0b011), set(0b110)]);
    }

    #[test]
    fn union_property_violation_on_hand_built_map() {
        // {a} ∈ π({a, b}) and π({a, c}), but not π({a, b, c}).
        let mut ob = ObMap::new(3);
        ob.insert(set(0b001), set(0b001));
        ob.insert(set(0b101), set(0b001));
        let m = model_over(ob.clone());
        assert!(check_union_property(&m).unwrap().is_empty());
        ob.insert(set(0b011), set(0b001));
        let m = model_over(ob);
        let v = check_union_property(&m).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].witness, vec![set(0b001), set(0b011), set(0b101)]);
        assert!(v[0].refails(&m));
    }

    #[test]
    fn condition_five_on_counter_model() {
        let m = model_over(counter_model_ob());
        let v = check_condition(&m, Condition::Inheritance).unwrap();
        // W ∈ π(W) must be inherited by {w}.
        assert!(v
            .iter()
            .any(|v| v.witness == vec![set(0b11), set(0b01), set(0b11)]));
        assert!(v.iter().all(|v| v.refails(&m)));
    }

    #[test]
    fn too_large_is_rejected() {
        let m = model_over(ObMap::new(9));
        assert!(matches!(
            check_condition(&m, Condition::NoEmptyMember),
            Err(crate::Error::TooLarge { .. })
        ));
    }
}
