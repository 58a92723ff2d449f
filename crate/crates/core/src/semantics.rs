//! Finite N-models and the `(m,n)`-accessibility frame condition.
//!
//! An N-model carries one accessibility relation per formula. Relations
//! absent from the map are empty, so a finite map represents a finitely
//! supported family over the whole language. The box clause consults only
//! the relation indexed by the boxed formula:
//!
//! ```text
//! x ||- []B   iff   for all y, x <_B y implies y ||- B
//! ```
//!
//! The chain relation `x <_B^k y` threads through the relations indexed by
//! `[]^{k-1}B, ..., B`, and a model is `(m,n)`-accessible when every
//! m-chain between two worlds is matched by an n-chain. With finite
//! support, an m-chain for `B` (m >= 1) needs a nonempty relation at `B`
//! itself, so checking the condition over a formula universe that contains
//! the whole support is equivalent to checking it over the full language.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::formula::Formula;

/// World identifier; always positive, 0 is reserved.
pub type World = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelError {
    ZeroWorld,
    EmptyWorldSet,
    UnknownWorld(World),
}

impl core::fmt::Display for ModelError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ModelError::ZeroWorld => write!(f, "world id 0 is reserved"),
            ModelError::EmptyWorldSet => write!(f, "a model needs at least one world"),
            ModelError::UnknownWorld(w) => write!(f, "unknown world {}", w),
        }
    }
}

/// A finite N-model: worlds, a finitely supported relation family, and a
/// valuation listing the variables true at each world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NModel {
    worlds: BTreeSet<World>,
    relations: BTreeMap<Formula, BTreeSet<(World, World)>>,
    valuation: BTreeMap<World, BTreeSet<String>>,
}

impl NModel {
    pub fn new(
        worlds: BTreeSet<World>,
        relations: BTreeMap<Formula, BTreeSet<(World, World)>>,
        valuation: BTreeMap<World, BTreeSet<String>>,
    ) -> Result<NModel, ModelError> {
        if worlds.is_empty() {
            return Err(ModelError::EmptyWorldSet);
        }
        if worlds.contains(&0) {
            return Err(ModelError::ZeroWorld);
        }
        for pairs in relations.values() {
            for &(x, y) in pairs {
                if !worlds.contains(&x) {
                    return Err(ModelError::UnknownWorld(x));
                }
                if !worlds.contains(&y) {
                    return Err(ModelError::UnknownWorld(y));
                }
            }
        }
        for w in valuation.keys() {
            if !worlds.contains(w) {
                return Err(ModelError::UnknownWorld(*w));
            }
        }
        // an empty relation entry means the same as no entry
        let relations = relations
            .into_iter()
            .filter(|(_, pairs)| !pairs.is_empty())
            .collect();
        Ok(NModel {
            worlds,
            relations,
            valuation,
        })
    }

    /// Single world `w` with no relations and the given true variables.
    pub fn singleton(w: World, truths: &[&str]) -> NModel {
        let mut valuation = BTreeMap::new();
        valuation.insert(w, truths.iter().map(|s| (*s).to_owned()).collect());
        NModel::new([w].into_iter().collect(), BTreeMap::new(), valuation)
            .expect("singleton model is well formed")
    }

    pub fn worlds(&self) -> &BTreeSet<World> {
        &self.worlds
    }

    pub fn relations(&self) -> &BTreeMap<Formula, BTreeSet<(World, World)>> {
        &self.relations
    }

    pub fn valuation(&self) -> &BTreeMap<World, BTreeSet<String>> {
        &self.valuation
    }

    pub fn relation(&self, b: &Formula) -> Option<&BTreeSet<(World, World)>> {
        self.relations.get(b)
    }

    fn successors(&self, b: &Formula, x: World) -> impl Iterator<Item = World> + '_ {
        self.relations
            .get(b)
            .into_iter()
            .flat_map(move |pairs| pairs.iter().filter(move |(a, _)| *a == x).map(|(_, y)| *y))
    }

    fn var_true_at(&self, w: World, v: &str) -> bool {
        self.valuation.get(&w).is_some_and(|set| set.contains(v))
    }

    /// The forcing relation `w ||- a`.
    pub fn forces(&self, w: World, a: &Formula) -> Result<bool, ModelError> {
        if !self.worlds.contains(&w) {
            return Err(ModelError::UnknownWorld(w));
        }
        Ok(self.forces_unchecked(w, a))
    }

    fn forces_unchecked(&self, w: World, a: &Formula) -> bool {
        match a {
            Formula::Var(v) => self.var_true_at(w, v),
            Formula::Bot => false,
            Formula::Neg(x) => !self.forces_unchecked(w, x),
            Formula::And(x, y) => self.forces_unchecked(w, x) && self.forces_unchecked(w, y),
            Formula::Or(x, y) => self.forces_unchecked(w, x) || self.forces_unchecked(w, y),
            Formula::Imp(x, y) => !self.forces_unchecked(w, x) || self.forces_unchecked(w, y),
            Formula::Box(b) => self.successors(b, w).all(|y| self.forces_unchecked(y, b)),
        }
    }

    /// The chain relation `x <_b^k y`:
    /// identity for `k = 0`, otherwise one step through the relation at
    /// `[]^{k-1} b` followed by a `(k-1)`-chain for `b`.
    pub fn chain(&self, b: &Formula, k: u32, x: World, y: World) -> Result<bool, ModelError> {
        if !self.worlds.contains(&x) {
            return Err(ModelError::UnknownWorld(x));
        }
        if !self.worlds.contains(&y) {
            return Err(ModelError::UnknownWorld(y));
        }
        Ok(self.chain_unchecked(b, k, x, y))
    }

    fn chain_unchecked(&self, b: &Formula, k: u32, x: World, y: World) -> bool {
        if k == 0 {
            return x == y;
        }
        let step = Formula::box_power(k - 1, b.clone());
        self.successors(&step, x)
            .any(|w| self.chain_unchecked(b, k - 1, w, y))
    }

    /// Explicit witness for `x <_b^k y`: the world sequence
    /// `x = w_0, ..., w_k = y` with `w_i <_{[]^{k-1-i} b} w_{i+1}`.
    pub fn chain_path(&self, b: &Formula, k: u32, x: World, y: World) -> Option<Vec<World>> {
        if k == 0 {
            return (x == y).then(|| vec![x]);
        }
        let step = Formula::box_power(k - 1, b.clone());
        for w in self.successors(&step, x) {
            if let Some(mut rest) = self.chain_path(b, k - 1, w, y) {
                let mut path = vec![x];
                path.append(&mut rest);
                return Some(path);
            }
        }
        None
    }

    /// Checks the `(m,n)`-accessibility condition over `universe`: for every
    /// `b` in the universe and every world pair, an m-chain implies an
    /// n-chain. Stops at the first violation and reports it.
    pub fn is_mn_accessible(
        &self,
        m: u32,
        n: u32,
        universe: &BTreeSet<Formula>,
    ) -> AccessReport {
        for b in universe {
            for &x in &self.worlds {
                for &y in &self.worlds {
                    if self.chain_unchecked(b, m, x, y) && !self.chain_unchecked(b, n, x, y) {
                        let chain = self
                            .chain_path(b, m, x, y)
                            .expect("violating m-chain must have a path");
                        return AccessReport {
                            accessible: false,
                            witness: Some(AccessWitness {
                                formula: b.clone(),
                                x,
                                y,
                                m_chain: chain,
                            }),
                        };
                    }
                }
            }
        }
        AccessReport {
            accessible: true,
            witness: None,
        }
    }

    /// `a` forced at every world.
    pub fn valid(&self, a: &Formula) -> bool {
        self.worlds.iter().all(|&w| self.forces_unchecked(w, a))
    }

    /// Largest world id.
    pub fn max_world(&self) -> World {
        *self.worlds.iter().next_back().expect("models are nonempty")
    }

    /// Shifts every world id by `offset`.
    pub fn shift_worlds(&self, offset: World) -> NModel {
        NModel {
            worlds: self.worlds.iter().map(|w| w + offset).collect(),
            relations: self
                .relations
                .iter()
                .map(|(b, pairs)| {
                    (
                        b.clone(),
                        pairs.iter().map(|(x, y)| (x + offset, y + offset)).collect(),
                    )
                })
                .collect(),
            valuation: self
                .valuation
                .iter()
                .map(|(w, vs)| (w + offset, vs.clone()))
                .collect(),
        }
    }
}

/// Result of an accessibility check; a failed check carries the witnessing
/// m-chain that has no matching n-chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccessReport {
    pub accessible: bool,
    pub witness: Option<AccessWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccessWitness {
    pub formula: Formula,
    pub x: World,
    pub y: World,
    pub m_chain: Vec<World>,
}

/// The index set over which relations may be nonempty when searching for
/// countermodels of `a`: every subformula of `a` under up to `max(m,n)`
/// extra boxes.
pub fn relation_universe(a: &Formula, m: u32, n: u32) -> BTreeSet<Formula> {
    let cap = m.max(n);
    let mut out = BTreeSet::new();
    for sub in a.subformulas() {
        for j in 0..=cap {
            out.insert(Formula::box_power(j, sub.clone()));
        }
    }
    out
}

/// Disjoint union of models. World id sets that overlap are shifted apart;
/// forcing at a world of one component agrees with forcing in that
/// component alone.
pub fn disjoint_union(models: &[NModel]) -> Result<NModel, ModelError> {
    if models.is_empty() {
        return Err(ModelError::EmptyWorldSet);
    }
    let mut parts: Vec<NModel> = Vec::new();
    let mut used: BTreeSet<World> = BTreeSet::new();
    for model in models {
        let part = if model.worlds().iter().any(|w| used.contains(w)) {
            let offset = used.iter().next_back().copied().unwrap_or(0);
            model.shift_worlds(offset)
        } else {
            model.clone()
        };
        used.extend(part.worlds().iter().copied());
        parts.push(part);
    }
    let mut worlds = BTreeSet::new();
    let mut relations: BTreeMap<Formula, BTreeSet<(World, World)>> = BTreeMap::new();
    let mut valuation: BTreeMap<World, BTreeSet<String>> = BTreeMap::new();
    for part in parts {
        worlds.extend(part.worlds.iter().copied());
        for (b, pairs) in part.relations {
            relations.entry(b).or_default().extend(pairs);
        }
        valuation.extend(part.valuation);
    }
    NModel::new(worlds, relations, valuation)
}
