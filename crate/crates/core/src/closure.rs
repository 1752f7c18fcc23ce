//! Seeded fixpoint construction of `π`.
//!
//! Seeds make conditional obligations true by brute force; [`close`] then
//! applies the enabled generation rules until nothing changes:
//!
//! - (2) `Z ∈ π(Y) ∧ X ∩ Y = Z ∩ Y ⇒ X ∈ π(Y)`
//! - (3) `X₁, X₂ ∈ π(Y) ⇒ X₁ ∩ X₂ ∈ π(Y)`
//! - (4) `X ∈ π(Y), X ⊆ Y ⊆ Z ⇒ (Z ∖ Y) ∪ X ∈ π(Z)`
//! - (5) `Z ∈ π(X), Y ⊆ X, Y ∩ Z ≠ ∅ ⇒ Z ∈ π(Y)`
//!
//! All rules only add memberships, so the fixpoint is the least one above
//! the seeds regardless of application order. Condition (1) is the only way
//! to fail; when `∅` is generated the report carries the chain of rule
//! applications that produced it.
//!
//! One sweep applies rule (2) to every context in ascending order, then (3),
//! (4) and (5) likewise, updating in place. The sweep count is reported.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::conditions::{check_all, dense_satisfies, Condition, Violation};
use crate::error::{Error, Result};
use crate::kernel::{check_dense, show_set, DenseOb, Model, ObMap, WorldSet};
use crate::scenario::{resolve_seeds, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClosureOptions {
    pub close2: bool,
    pub close3: bool,
    pub close4: bool,
    pub close5: bool,
    pub max_iterations: usize,
}

impl ClosureOptions {
    /// Enough sweeps for any map on [`crate::MAX_DENSE_WORLDS`] worlds: each
    /// productive sweep adds at least one of the 2^8 · 2^8 memberships.
    pub const DEFAULT_MAX_ITERATIONS: usize = (1 << 16) + 1;

    /// Rules (2) and (3) only; the behaviour of the reference search program.
    pub fn baseline() -> Self {
        ClosureOptions {
            close2: true,
            close3: true,
            close4: false,
            close5: false,
            max_iterations: Self::DEFAULT_MAX_ITERATIONS,
        }
    }

    /// Rules (2)–(4): closed maps are genuine CJ obligation maps.
    pub fn full() -> Self {
        ClosureOptions {
            close4: true,
            ..Self::baseline()
        }
    }

    pub fn with_close4(self, on: bool) -> Self {
        ClosureOptions { close4: on, ..self }
    }

    pub fn with_close5(self, on: bool) -> Self {
        ClosureOptions { close5: on, ..self }
    }

    pub fn enabled_rules(&self) -> Vec<Rule> {
        [
            (self.close2, Rule::Relevance),
            (self.close3, Rule::Intersection),
            (self.close4, Rule::Expansion),
            (self.close5, Rule::Inheritance),
        ]
        .into_iter()
        .filter_map(|(on, r)| on.then_some(r))
        .collect()
    }
}

impl Default for ClosureOptions {
    fn default() -> Self {
        Self::baseline()
    }
}

/// How a membership entered `π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    /// Present before closure (explicit entry or seed).
    Given,
    Relevance,
    Intersection,
    Expansion,
    Inheritance,
}

impl Rule {
    pub fn condition(self) -> Option<Condition> {
        match self {
            Rule::Given => None,
            Rule::Relevance => Some(Condition::Relevance),
            Rule::Intersection => Some(Condition::Intersection),
            Rule::Expansion => Some(Condition::Expansion),
            Rule::Inheritance => Some(Condition::Inheritance),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.condition() {
            Some(c) => write!(f, "{c}"),
            None => f.write_str("given"),
        }
    }
}

/// `member ∈ π(context)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Membership {
    pub context: WorldSet,
    pub member: WorldSet,
}

impl Membership {
    pub fn new(context: WorldSet, member: WorldSet) -> Self {
        Membership { context, member }
    }

    pub fn show(&self, names: &[String]) -> String {
        format!(
            "{} ∈ π({})",
            show_set(names, self.member),
            show_set(names, self.context)
        )
    }
}

/// One rule application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub rule: Rule,
    pub added: Membership,
    pub premises: Vec<Membership>,
}

impl Step {
    /// Whether `added` follows from `premises` by `rule`.
    pub fn is_valid_instance(&self) -> bool {
        let (ctx, new) = (self.added.context, self.added.member);
        match (self.rule, self.premises.as_slice()) {
            (Rule::Relevance, [p]) => {
                p.context == ctx && new.intersection(ctx) == p.member.intersection(ctx)
            }
            (Rule::Intersection, [p, q]) => {
                p.context == ctx && q.context == ctx && new == p.member.intersection(q.member)
            }
            (Rule::Expansion, [p]) => {
                p.member.is_subset(p.context)
                    && p.context.is_subset(ctx)
                    && new == ctx.difference(p.context).union(p.member)
            }
            (Rule::Inheritance, [p]) => {
                ctx.is_subset(p.context) && ctx.meets(p.member) && new == p.member
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("step {0} uses a premise that is not yet established")]
    MissingPremise(usize),
    #[error("step {0} is not an instance of its rule")]
    InvalidStep(usize),
    #[error("the derivation never establishes ∅ ∈ π(X)")]
    NoContradiction,
}

/// A chain of rule applications from `premises` to `∅ ∈ π(contradiction)`,
/// which condition (1) forbids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub premises: Vec<Membership>,
    pub steps: Vec<Step>,
    pub contradiction: WorldSet,
}

impl Derivation {
    /// Re-checks every step in order. Returns the context at which `∅` was
    /// derived.
    pub fn replay(&self) -> std::result::Result<WorldSet, ReplayError> {
        let mut known: HashSet<Membership> = self.premises.iter().copied().collect();
        for (i, step) in self.steps.iter().enumerate() {
            if !step.premises.iter().all(|p| known.contains(p)) {
                return Err(ReplayError::MissingPremise(i));
            }
            if !step.is_valid_instance() {
                return Err(ReplayError::InvalidStep(i));
            }
            known.insert(step.added);
        }
        if known.contains(&Membership::new(self.contradiction, WorldSet::EMPTY)) {
            Ok(self.contradiction)
        } else {
            Err(ReplayError::NoContradiction)
        }
    }

    /// Rules in step order.
    pub fn rules(&self) -> Vec<Rule> {
        self.steps.iter().map(|s| s.rule).collect()
    }

    pub fn rule_count(&self, rule: Rule) -> usize {
        self.steps.iter().filter(|s| s.rule == rule).count()
    }

    /// The part of this derivation that goes beyond `base`: memberships of
    /// `base` become premises and the steps leading to them are dropped.
    pub fn relative_to(&self, base: &ObMap) -> Derivation {
        let by_added: HashMap<Membership, &Step> =
            self.steps.iter().map(|s| (s.added, s)).collect();
        let target = Membership::new(self.contradiction, WorldSet::EMPTY);
        let mut premises = Vec::new();
        let mut steps = Vec::new();
        let mut seen = HashSet::new();
        collect(
            target,
            &by_added,
            &|m| base.contains(m.context, m.member),
            &mut seen,
            &mut premises,
            &mut steps,
        );
        Derivation {
            premises,
            steps: layer(steps),
            contradiction: self.contradiction,
        }
    }

    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        for p in &self.premises {
            out.push_str(&format!("  {:<40} premise\n", p.show(names)));
        }
        for s in &self.steps {
            out.push_str(&format!(
                "  {:<40} from condition {}\n",
                s.added.show(names),
                s.rule
            ));
        }
        out.push_str(&format!(
            "  {:<40} contradicts condition (1)\n",
            format!("∅ ∈ π({})", show_set(names, self.contradiction))
        ));
        out
    }
}

fn collect(
    m: Membership,
    by_added: &HashMap<Membership, &Step>,
    is_leaf: &dyn Fn(&Membership) -> bool,
    seen: &mut HashSet<Membership>,
    premises: &mut Vec<Membership>,
    steps: &mut Vec<Step>,
) {
    if !seen.insert(m) {
        return;
    }
    match by_added.get(&m) {
        Some(step) if !is_leaf(&m) => {
            for p in &step.premises {
                collect(*p, by_added, is_leaf, seen, premises, steps);
            }
            steps.push((*step).clone());
        }
        _ => premises.push(m),
    }
}

/// Stable reorder of a topologically sorted step list by derivation depth,
/// so independent steps of the same depth are listed together.
fn layer(steps: Vec<Step>) -> Vec<Step> {
    let mut depth: HashMap<Membership, usize> = HashMap::new();
    let mut keyed: Vec<(usize, usize, Step)> = Vec::with_capacity(steps.len());
    for (i, step) in steps.into_iter().enumerate() {
        let d = 1 + step
            .premises
            .iter()
            .map(|p| depth.get(p).copied().unwrap_or(0))
            .max()
            .unwrap_or(0);
        depth.insert(step.added, d);
        keyed.push((d, i, step));
    }
    keyed.sort_by_key(|(d, i, _)| (*d, *i));
    keyed.into_iter().map(|(_, _, s)| s).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Closed(ObMap),
    Inconsistent(Derivation),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureReport {
    pub outcome: Outcome,
    /// Sweeps performed, including the final one that changed nothing.
    pub iterations: usize,
    /// Memberships added by each rule.
    pub generated: BTreeMap<Rule, usize>,
}

impl ClosureReport {
    pub fn closed(&self) -> Option<&ObMap> {
        match &self.outcome {
            Outcome::Closed(ob) => Some(ob),
            Outcome::Inconsistent(_) => None,
        }
    }

    pub fn derivation(&self) -> Option<&Derivation> {
        match &self.outcome {
            Outcome::Closed(_) => None,
            Outcome::Inconsistent(d) => Some(d),
        }
    }
}

/// Makes `O(Y|Z)` true: adds `Y` to `π(X)` for every `X ⊆ Z` meeting `Y`.
pub fn seed_conditional(ob: &ObMap, y: WorldSet, z: WorldSet) -> Result<ObMap> {
    let mut out = ob.clone();
    seed_in_place(&mut out, y, z)?;
    Ok(out)
}

pub fn seed_in_place(ob: &mut ObMap, y: WorldSet, z: WorldSet) -> Result<()> {
    let universe = ob.universe();
    if !y.is_subset(universe) || !z.is_subset(universe) {
        return Err(Error::InvalidArgument(
            "seed sets mention worlds outside the map".into(),
        ));
    }
    if !y.meets(z) {
        return Err(Error::DisjointSeed);
    }
    for x in z.subsets().filter(|x| x.meets(y)) {
        ob.insert(x, y);
    }
    Ok(())
}

struct Closer {
    ob: DenseOb,
    origin: HashMap<Membership, (usize, Rule, Vec<Membership>)>,
    clock: usize,
    generated: BTreeMap<Rule, usize>,
}

impl Closer {
    fn add(&mut self, rule: Rule, added: Membership, premises: Vec<Membership>) -> bool {
        if !self.ob.insert(added.context, added.member) {
            return false;
        }
        self.clock += 1;
        self.origin.insert(added, (self.clock, rule, premises));
        *self.generated.entry(rule).or_default() += 1;
        true
    }

    fn apply(&mut self, rule: Rule) -> bool {
        let universe = self.ob.universe();
        let mut changed = false;
        for ctx in universe.subsets() {
            if self.ob.is_empty_at(ctx) {
                continue;
            }
            let members = self.ob.members(ctx);
            match rule {
                Rule::Given => {}
                Rule::Relevance => {
                    let outside = universe.difference(ctx);
                    for &z in &members {
                        let core = z.intersection(ctx);
                        for extra in outside.subsets() {
                            changed |= self.add(
                                rule,
                                Membership::new(ctx, core.union(extra)),
                                vec![Membership::new(ctx, z)],
                            );
                        }
                    }
                }
                Rule::Intersection => {
                    for (i, &a) in members.iter().enumerate() {
                        for &b in &members[i + 1..] {
                            changed |= self.add(
                                rule,
                                Membership::new(ctx, a.intersection(b)),
                                vec![Membership::new(ctx, a), Membership::new(ctx, b)],
                            );
                        }
                    }
                }
                Rule::Expansion => {
                    for &x in members.iter().filter(|x| x.is_subset(ctx)) {
                        for z in ctx.supersets_within(universe).skip(1) {
                            changed |= self.add(
                                rule,
                                Membership::new(z, z.difference(ctx).union(x)),
                                vec![Membership::new(ctx, x)],
                            );
                        }
                    }
                }
                Rule::Inheritance => {
                    for &z in &members {
                        for y in ctx.subsets().filter(|y| *y != ctx && y.meets(z)) {
                            changed |= self.add(
                                rule,
                                Membership::new(y, z),
                                vec![Membership::new(ctx, z)],
                            );
                        }
                    }
                }
            }
        }
        changed
    }

    fn derivation_of(&self, target: Membership) -> Derivation {
        let steps_by_added: HashMap<Membership, Step> = self
            .origin
            .iter()
            .filter(|(_, (_, rule, _))| *rule != Rule::Given)
            .map(|(m, (_, rule, premises))| {
                (
                    *m,
                    Step {
                        rule: *rule,
                        added: *m,
                        premises: premises.clone(),
                    },
                )
            })
            .collect();
        let refs: HashMap<Membership, &Step> =
            steps_by_added.iter().map(|(k, v)| (*k, v)).collect();
        let mut premises = Vec::new();
        let mut steps = Vec::new();
        let mut seen = HashSet::new();
        collect(
            target,
            &refs,
            &|_| false,
            &mut seen,
            &mut premises,
            &mut steps,
        );
        premises.sort();
        Derivation {
            premises,
            steps: layer(steps),
            contradiction: target.context,
        }
    }
}

/// Closes `ob` under the enabled rules; see the module docs.
pub fn close(ob: &ObMap, options: ClosureOptions) -> Result<ClosureReport> {
    check_dense(ob.world_count())?;
    let dense = ob.to_dense()?;
    let mut closer = Closer {
        origin: HashMap::new(),
        clock: 0,
        generated: BTreeMap::new(),
        ob: dense,
    };
    for (ctx, fam) in ob.entries() {
        for m in fam.iter() {
            closer.clock += 1;
            closer
                .origin
                .insert(Membership::new(ctx, m), (closer.clock, Rule::Given, vec![]));
        }
    }

    let rules = options.enabled_rules();
    let mut iterations = 0;
    loop {
        iterations += 1;
        if iterations > options.max_iterations.max(1) {
            return Err(Error::IterationLimit(options.max_iterations));
        }
        let mut changed = false;
        for &rule in &rules {
            changed |= closer.apply(rule);
        }
        if !changed {
            break;
        }
    }

    let universe = closer.ob.universe();
    let first_empty = universe
        .subsets()
        .map(|ctx| Membership::new(ctx, WorldSet::EMPTY))
        .filter_map(|m| closer.origin.get(&m).map(|(t, _, _)| (*t, m)))
        .min();
    let outcome = match first_empty {
        Some((_, m)) => Outcome::Inconsistent(closer.derivation_of(m)),
        None => {
            let mut must_hold = vec![Condition::NoEmptyMember];
            must_hold.extend(rules.iter().filter_map(|r| r.condition()));
            for c in must_hold {
                assert!(
                    dense_satisfies(&closer.ob, c),
                    "closure fixpoint violates {c}"
                );
            }
            Outcome::Closed(closer.ob.to_ob())
        }
    };
    Ok(ClosureReport {
        outcome,
        iterations,
        generated: closer.generated,
    })
}

/// Result of building a model from a scenario.
#[derive(Debug, Clone)]
pub struct CtctdResult {
    /// Absent when the scenario asks for no closure.
    pub closure: Option<ClosureReport>,
    /// Absent when closure was inconsistent.
    pub model: Option<Model>,
    /// Residual violations of (1)–(4) (and (5) when closing under it),
    /// reported whether or not the corresponding rule was enabled.
    pub warnings: Vec<Violation>,
}

/// Builds a scenario's frame, applies its seeds over its explicit `π`
/// entries, closes, and checks the result.
///
/// Closure runs when the scenario has seeds or explicit options; otherwise
/// the explicit `π` is used as given.
pub fn ctctd_model(scenario: &Scenario) -> Result<CtctdResult> {
    let base = scenario.frame_model()?;
    let seeds = resolve_seeds(scenario, &base)?;
    let mut ob = scenario.ob.clone();
    for (y, z) in seeds {
        seed_in_place(&mut ob, y, z)?;
    }
    let Some(options) = scenario.effective_options() else {
        let model = base.with_ob(ob)?;
        let warnings = check_all(&model, false)?.violations;
        return Ok(CtctdResult {
            closure: None,
            model: Some(model),
            warnings,
        });
    };
    let report = close(&ob, options)?;
    let (model, warnings) = match report.closed() {
        Some(closed) => {
            let model = base.with_ob(closed.clone())?;
            let warnings = check_all(&model, options.close5)?.violations;
            (Some(model), warnings)
        }
        None => (None, Vec::new()),
    };
    Ok(CtctdResult {
        closure: Some(report),
        model,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::upset;

    fn set(bits: u32) -> WorldSet {
        WorldSet::from_bits(bits)
    }

    // a=0, b=1, c=2
    fn lemma_seed() -> ObMap {
        seed_conditional(&ObMap::new(3), set(0b001), set(0b111)).unwrap()
    }

    #[test]
    fn seed_adds_to_every_overlapping_subcontext() {
        let ob = seed_conditional(&ObMap::new(4), set(0b0100), set(0b1111)).unwrap();
        assert_eq!(ob.membership_count(), 8);
        for (ctx, fam) in ob.entries() {
            assert!(ctx.meets(set(0b0100)));
            assert_eq!(fam.iter().collect::<Vec<_>>(), vec![set(0b0100)]);
        }
    }

    #[test]
    fn seed_rejects_disjoint_pair() {
        assert_eq!(
            seed_conditional(&ObMap::new(2), set(0b01), set(0b10)),
            Err(Error::DisjointSeed)
        );
    }

    #[test]
    fn lemma_closure_gives_upsets() {
        let report = close(&lemma_seed(), ClosureOptions::full()).unwrap();
        let ob = report.closed().expect("consistent");
        let u = upset(set(0b001), set(0b111)).unwrap();
        for x in set(0b111).subsets() {
            if x.contains(crate::WorldId(0)) {
                assert_eq!(ob.get(x), Some(&u), "{x:?}");
            } else {
                assert!(ob.get(x).is_none(), "{x:?}");
            }
        }
    }

    #[test]
    fn inheritance_makes_lemma_inconsistent() {
        let options = ClosureOptions::full().with_close5(true);
        let report = close(&lemma_seed(), options).unwrap();
        let d = report.derivation().expect("inconsistent");
        assert_eq!(d.contradiction, set(0b110));
        assert_eq!(d.replay(), Ok(set(0b110)));
    }

    #[test]
    fn closing_twice_is_idempotent() {
        let first = close(&lemma_seed(), ClosureOptions::full()).unwrap();
        let ob = first.closed().unwrap();
        let second = close(ob, ClosureOptions::full()).unwrap();
        assert_eq!(second.iterations, 1);
        assert_eq!(second.closed(), Some(ob));
    }

    #[test]
    fn iteration_limit_is_reported() {
        let options = ClosureOptions {
            max_iterations: 1,
            ..ClosureOptions::full()
        };
        assert_eq!(close(&lemma_seed(), options), Err(Error::IterationLimit(1)));
    }

    #[test]
    fn replay_rejects_tampered_steps() {
        let options = ClosureOptions::full().with_close5(true);
        let report = close(&lemma_seed(), options).unwrap();
        let mut d = report.derivation().unwrap().clone();
        let last = d.steps.len() - 1;
        d.steps[last].premises.reverse();
        assert_eq!(d.replay(), Ok(set(0b110)));
        d.steps[last].added.member = set(0b010);
        assert!(d.replay().is_err());
        let mut d = report.derivation().unwrap().clone();
        d.steps.remove(0);
        assert!(matches!(d.replay(), Err(ReplayError::MissingPremise(_))));
    }

    #[test]
    fn too_large_maps_are_rejected() {
        assert!(matches!(
            close(&ObMap::new(9), ClosureOptions::baseline()),
            Err(Error::TooLarge { .. })
        ));
    }
}
