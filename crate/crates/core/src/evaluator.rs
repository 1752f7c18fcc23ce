//! Truth of formulas in a model.
//!
//! Extensions are computed bottom-up as [`WorldSet`]s. For a world `w`:
//!
//! - `[a]A`: `av(w) ⊆ ‖A‖`, and `[]A`: `pv(w) ⊆ ‖A‖`; the diamonds are duals.
//! - `Oa A`: `‖A‖ ∈ π(av(w))` and `av(w) ∩ ‖¬A‖ ≠ ∅`.
//! - `Oi A`: `‖A‖ ∈ π(pv(w))` and `pv(w) ∩ ‖¬A‖ ≠ ∅`.
//! - `O(B|A)`: `‖B‖ ∩ ‖A‖ ≠ ∅` and `‖B‖ ∈ π(X)` for every `X ⊆ ‖A‖` that
//!   meets `‖B‖`. This does not depend on `w`.
//! - `viol(A)` is `Oi A ∧ ¬A`.

use crate::conditions::{dense_satisfies, Condition};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::kernel::{DenseOb, Family, Model, ObMap, WorldId, WorldSet};

/// `‖f‖ = { x ∈ W : ⊨ₓ f }`.
pub fn extension(model: &Model, f: &Formula) -> Result<WorldSet> {
    use Formula::*;
    let universe = model.universe();
    let per_world = |pred: &dyn Fn(WorldId) -> bool| {
        WorldSet::from_worlds(model.world_ids().filter(|w| pred(*w)))
    };
    Ok(match f {
        Atom(name) => model
            .atom(name)
            .ok_or_else(|| Error::UnknownAtom(name.clone()))?,
        Top => universe,
        Bottom => WorldSet::EMPTY,
        Not(g) => extension(model, g)?.complement_in(universe),
        And(a, b) => extension(model, a)?.intersection(extension(model, b)?),
        Or(a, b) => extension(model, a)?.union(extension(model, b)?),
        Implies(a, b) => extension(model, a)?
            .complement_in(universe)
            .union(extension(model, b)?),
        Iff(a, b) => {
            let (ea, eb) = (extension(model, a)?, extension(model, b)?);
            ea.intersection(eb)
                .union(ea.union(eb).complement_in(universe))
        }
        BoxStrong(g) => {
            let e = extension(model, g)?;
            per_world(&|w| model.pv(w).is_subset(e))
        }
        DiaStrong(g) => {
            let e = extension(model, g)?;
            per_world(&|w| model.pv(w).meets(e))
        }
        BoxActual(g) => {
            let e = extension(model, g)?;
            per_world(&|w| model.av(w).is_subset(e))
        }
        DiaActual(g) => {
            let e = extension(model, g)?;
            per_world(&|w| model.av(w).meets(e))
        }
        OblActual(g) => {
            let e = extension(model, g)?;
            per_world(&|w| obligatory_in(model.ob(), model.av(w), e))
        }
        OblIdeal(g) => {
            let e = extension(model, g)?;
            per_world(&|w| obligatory_in(model.ob(), model.pv(w), e))
        }
        OblCond(b, a) => {
            let (eb, ea) = (extension(model, b)?, extension(model, a)?);
            if conditional_holds(model.ob(), eb, ea) {
                universe
            } else {
                WorldSet::EMPTY
            }
        }
        Viol(g) => {
            // Expanded, not primitive: Oi g ∧ ¬g.
            let expanded = Formula::and(Formula::OblIdeal(g.clone()), Formula::Not(g.clone()));
            extension(model, &expanded)?
        }
    })
}

/// `⊨_w f`.
pub fn holds_at(model: &Model, w: WorldId, f: &Formula) -> Result<bool> {
    if w.0 >= model.world_count() {
        return Err(Error::InvalidArgument(format!(
            "world index {} out of range",
            w.0
        )));
    }
    Ok(extension(model, f)?.contains(w))
}

/// Whether `f` is true at every world of `model`.
pub fn valid_in(model: &Model, f: &Formula) -> Result<bool> {
    Ok(extension(model, f)? == model.universe())
}

fn obligatory_in(ob: &ObMap, context: WorldSet, ext: WorldSet) -> bool {
    // ‖A‖ ∈ π(context) and the context meets ‖¬A‖.
    ob.contains(context, ext) && !context.is_subset(ext)
}

fn conditional_holds(ob: &ObMap, consequent: WorldSet, antecedent: WorldSet) -> bool {
    consequent.meets(antecedent)
        && antecedent
            .subsets()
            .filter(|x| x.meets(consequent))
            .all(|x| ob.contains(x, consequent))
}

/// Which first conjunct to use in the selection function.
///
/// The definition as printed requires `X ∩ Y = ∅`; the truth condition for
/// `O(B|A)` requires `‖B‖ ∩ ‖A‖ ≠ ∅`. Only [`SelectionReading::Overlap`]
/// matches `O(B|A)`; the printed reading is kept for comparison and, on any
/// map satisfying (1) and (2), always yields the empty family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionReading {
    #[default]
    Overlap,
    Disjoint,
}

/// `f(X) = { Y : X ∩ Y ≠ ∅ ∧ ∀Z ⊆ X (Z ∩ Y ≠ ∅ → Y ∈ π(Z)) }`.
///
/// Then `⊨_w O(B|A)` iff `‖B‖ ∈ f(‖A‖)`, at every world alike.
pub fn conditional_selection(model: &Model, x: WorldSet) -> Family {
    selection_with(model, x, SelectionReading::Overlap)
}

pub fn selection_with(model: &Model, x: WorldSet, reading: SelectionReading) -> Family {
    let ob = model.ob();
    match reading {
        // Z = X forces Y ∈ π(X), so only members of π(X) are candidates.
        SelectionReading::Overlap => ob
            .members(x)
            .filter(|&y| conditional_holds(ob, y, x))
            .collect(),
        SelectionReading::Disjoint => model
            .universe()
            .subsets()
            .filter(|&y| {
                !x.meets(y)
                    && x.subsets()
                        .filter(|z| !z.meets(y))
                        .all(|z| ob.contains(z, y))
            })
            .collect(),
    }
}

/// Exhaustive enumeration is limited to this many worlds.
pub const MAX_ENUM_WORLDS: usize = 2;
pub const MAX_ENUM_ATOMS: usize = 3;

/// Every model on `n_worlds` worlds (named `w0`, `w1`, …) whose `π`
/// satisfies conditions (1)–(4): all frames, all valuations of `atoms`, all
/// such maps.
///
/// Order is deterministic: frames outermost, then maps, then valuations.
pub fn enumerate_models(n_worlds: usize, atoms: &[&str]) -> Result<impl Iterator<Item = Model>> {
    if n_worlds == 0 || n_worlds > MAX_ENUM_WORLDS {
        return Err(Error::TooLarge {
            worlds: n_worlds,
            limit: MAX_ENUM_WORLDS,
        });
    }
    if atoms.len() > MAX_ENUM_ATOMS {
        return Err(Error::InvalidArgument(format!(
            "at most {MAX_ENUM_ATOMS} atoms can be enumerated"
        )));
    }
    let names: Vec<String> = (0..n_worlds).map(|i| format!("w{i}")).collect();
    let atoms: Vec<String> = atoms.iter().map(|s| s.to_string()).collect();
    let frames = enumerate_frames(n_worlds);
    let maps = enumerate_cj_maps(n_worlds);
    let universe = WorldSet::full(n_worlds);
    let valuation_count = 1usize << (n_worlds * atoms.len());

    let iter = frames.into_iter().flat_map(move |(av, pv)| {
        let names = names.clone();
        let atoms = atoms.clone();
        maps.clone().into_iter().flat_map(move |ob| {
            let (names, atoms, av, pv) = (names.clone(), atoms.clone(), av.clone(), pv.clone());
            (0..valuation_count).map(move |code| {
                let valuation = atoms
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        let bits = (code >> (i * n_worlds)) as u32 & universe.bits();
                        (a.clone(), WorldSet::from_bits(bits))
                    })
                    .collect();
                Model::new(names.clone(), valuation, av.clone(), pv.clone(), ob.clone())
                    .expect("enumerated frames are well formed")
            })
        })
    });
    Ok(iter)
}

/// All `(av, pv)` assignments with `w ∈ av(w) ⊆ pv(w)`.
fn enumerate_frames(n: usize) -> Vec<(Vec<WorldSet>, Vec<WorldSet>)> {
    let universe = WorldSet::full(n);
    let per_world: Vec<Vec<(WorldSet, WorldSet)>> = (0..n)
        .map(|i| {
            let own = WorldSet::singleton(WorldId(i));
            own.supersets_within(universe)
                .flat_map(|av| av.supersets_within(universe).map(move |pv| (av, pv)))
                .collect()
        })
        .collect();
    let mut frames = vec![(Vec::new(), Vec::new())];
    for choices in per_world {
        frames = frames
            .into_iter()
            .flat_map(|(av, pv): (Vec<WorldSet>, Vec<WorldSet>)| {
                choices.iter().map(move |(a, p)| {
                    let mut av = av.clone();
                    let mut pv = pv.clone();
                    av.push(*a);
                    pv.push(*p);
                    (av, pv)
                })
            })
            .collect();
    }
    frames
}

/// Every obligation map on `n ≤ 2` worlds satisfying (1)–(4).
pub fn enumerate_cj_maps(n: usize) -> Vec<ObMap> {
    assert!(n <= MAX_ENUM_WORLDS);
    let contexts: Vec<WorldSet> = WorldSet::full(n).subsets().collect();
    let slots: Vec<(WorldSet, WorldSet)> = contexts
        .iter()
        .flat_map(|&c| contexts.iter().map(move |&m| (c, m)))
        .collect();
    let mut out = Vec::new();
    for code in 0u64..(1u64 << slots.len()) {
        let mut dense = DenseOb::new(n).expect("small");
        for (i, (c, m)) in slots.iter().enumerate() {
            if code & (1 << i) != 0 {
                dense.insert(*c, *m);
            }
        }
        if Condition::BASE.iter().all(|c| dense_satisfies(&dense, *c)) {
            out.push(dense.to_ob());
        }
    }
    out
}
