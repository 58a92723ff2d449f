//! Bounded decision procedure: axiom-level proof generation paired with an
//! exhaustive countermodel search over finite `(m,n)`-accessible models.
//!
//! The search enumerates, for each world count `k = 1..=max_worlds`, every
//! valuation over the target's variables and every assignment of relations.
//! Forcing of the target only reads the relations indexed by its boxed
//! subformulas, so for `m >= 1` the search assigns exactly those:
//!
//! * restricting an accessible refuting model to the relations the target
//!   reads keeps the refutation, and keeps accessibility — for `n <= m`
//!   because the needed n-chain runs inside the levels of the surviving
//!   m-chain, and for `n > m` because an accessible finitely supported
//!   model has no m-chains at all (an m-chain would force nonempty
//!   relations at ever higher box levels, beyond any finite support).
//!
//! For `m = 0` nothing can be dropped (0-chains always exist) and the
//! search assigns the full universe, which is usually too large to
//! exhaust; the budget then reports the search as inconclusive.
//!
//! Enumeration order is canonical — sizes ascending, then the valuation
//! mask, then the relation masks with the canonically least indexed
//! formula as the least significant digit — so the first certificate found
//! is the same on every run.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::formula::Formula;
use crate::hilbert::{self, Proof};
use crate::semantics::{relation_universe, NModel, World};

/// Resource limits for the countermodel search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_worlds: u32,
    pub max_candidates: u64,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget {
            max_worlds: 4,
            max_candidates: 5_000_000,
        }
    }
}

impl Budget {
    pub fn with_max_worlds(max_worlds: u32) -> Budget {
        Budget {
            max_worlds,
            ..Budget::default()
        }
    }
}

/// What the search got through before stopping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BudgetReport {
    pub max_worlds: u32,
    /// World counts whose candidate space was fully enumerated.
    pub sizes_exhausted: u32,
    pub candidates_tried: u64,
    /// `true` when the candidate cap cut the enumeration short.
    pub cap_hit: bool,
}

/// Outcome of `decide`: a checkable proof, a verified countermodel, or a
/// report on the exhausted budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Provable(Proof),
    Refuted { model: NModel, world: World },
    Unknown(BudgetReport),
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub found: Option<(NModel, World)>,
    pub report: BudgetReport,
}

/// Relation assignment for one candidate, as bit masks over world pairs.
struct Candidate<'a> {
    k: u32,
    rel_formulas: &'a [Formula],
    rel_masks: &'a [u64],
    vars: &'a [String],
    val_mask: u64,
}

impl Candidate<'_> {
    fn pair_bit(&self, x: World, y: World) -> u64 {
        1u64 << ((x - 1) * self.k + (y - 1))
    }

    fn related(&self, b: &Formula, x: World, y: World) -> bool {
        match self.rel_formulas.binary_search(b) {
            Ok(i) => self.rel_masks[i] & self.pair_bit(x, y) != 0,
            Err(_) => false,
        }
    }

    fn var_true(&self, w: World, var: &str) -> bool {
        match self.vars.iter().position(|v| v == var) {
            Some(i) => self.val_mask & (1u64 << ((w - 1) as usize * self.vars.len() + i)) != 0,
            None => false,
        }
    }

    fn forces(&self, w: World, a: &Formula) -> bool {
        match a {
            Formula::Var(v) => self.var_true(w, v),
            Formula::Bot => false,
            Formula::Neg(x) => !self.forces(w, x),
            Formula::And(x, y) => self.forces(w, x) && self.forces(w, y),
            Formula::Or(x, y) => self.forces(w, x) || self.forces(w, y),
            Formula::Imp(x, y) => !self.forces(w, x) || self.forces(w, y),
            Formula::Box(b) => {
                (1..=self.k).all(|y| !self.related(b, w, y) || self.forces(y, b))
            }
        }
    }

    fn chain(&self, b: &Formula, j: u32, x: World, y: World) -> bool {
        if j == 0 {
            return x == y;
        }
        let step = Formula::box_power(j - 1, b.clone());
        (1..=self.k)
            .any(|w| self.related(&step, x, w) && self.chain(b, j - 1, w, y))
    }

    fn accessible(&self, m: u32, n: u32, universe: &BTreeSet<Formula>) -> bool {
        for b in universe {
            for x in 1..=self.k {
                for y in 1..=self.k {
                    if self.chain(b, m, x, y) && !self.chain(b, n, x, y) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn to_model(&self) -> NModel {
        let worlds: BTreeSet<World> = (1..=self.k).collect();
        let mut relations: BTreeMap<Formula, BTreeSet<(World, World)>> = BTreeMap::new();
        for (b, &mask) in self.rel_formulas.iter().zip(self.rel_masks) {
            if mask == 0 {
                continue;
            }
            let mut pairs = BTreeSet::new();
            for x in 1..=self.k {
                for y in 1..=self.k {
                    if mask & self.pair_bit(x, y) != 0 {
                        pairs.insert((x, y));
                    }
                }
            }
            relations.insert(b.clone(), pairs);
        }
        let mut valuation: BTreeMap<World, BTreeSet<String>> = BTreeMap::new();
        for w in 1..=self.k {
            let truths: BTreeSet<String> = self
                .vars
                .iter()
                .filter(|v| self.var_true(w, v))
                .cloned()
                .collect();
            valuation.insert(w, truths);
        }
        NModel::new(worlds, relations, valuation).expect("search candidates are well formed")
    }
}

/// Searches for a finite `(m,n)`-accessible model refuting `a`. Exhaustive
/// per world count within the budget, so an empty result with
/// `sizes_exhausted = k` rules out countermodels up to `k` worlds in the
/// canonical search space.
pub fn search_countermodel(a: &Formula, m: u32, n: u32, budget: Budget) -> SearchOutcome {
    let universe = relation_universe(a, m, n);
    let rel_formulas: Vec<Formula> = if m >= 1 {
        a.subformulas()
            .into_iter()
            .filter_map(|f| match f {
                Formula::Box(inner) => Some((*inner).clone()),
                _ => None,
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    } else {
        universe.iter().cloned().collect()
    };
    let vars: Vec<String> = a.vars().into_iter().collect();

    let mut report = BudgetReport {
        max_worlds: budget.max_worlds,
        sizes_exhausted: 0,
        candidates_tried: 0,
        cap_hit: false,
    };

    for k in 1..=budget.max_worlds {
        let val_bits = k as usize * vars.len();
        let pair_bits = (k * k) as usize;
        if val_bits >= 63 || pair_bits >= 63 {
            report.cap_hit = true;
            break;
        }
        let mut rel_masks: Vec<u64> = alloc::vec![0; rel_formulas.len()];
        let rel_mask_max = (1u64 << pair_bits) - 1;
        'size: for val_mask in 0..(1u64 << val_bits) {
            rel_masks.iter_mut().for_each(|m| *m = 0);
            loop {
                if report.candidates_tried >= budget.max_candidates {
                    report.cap_hit = true;
                    break 'size;
                }
                report.candidates_tried += 1;
                let cand = Candidate {
                    k,
                    rel_formulas: &rel_formulas,
                    rel_masks: &rel_masks,
                    vars: &vars,
                    val_mask,
                };
                let refuted_at = (1..=k).find(|&w| !cand.forces(w, a));
                if let Some(w) = refuted_at {
                    if cand.accessible(m, n, &universe) {
                        return SearchOutcome {
                            found: Some((cand.to_model(), w)),
                            report,
                        };
                    }
                }
                // advance the relation odometer
                let mut digit = 0;
                loop {
                    if digit == rel_masks.len() {
                        break;
                    }
                    if rel_masks[digit] == rel_mask_max {
                        rel_masks[digit] = 0;
                        digit += 1;
                    } else {
                        rel_masks[digit] += 1;
                        break;
                    }
                }
                if digit == rel_masks.len() {
                    break;
                }
            }
        }
        if report.cap_hit {
            break;
        }
        report.sizes_exhausted = k;
    }

    SearchOutcome {
        found: None,
        report,
    }
}

/// Re-checks a refutation certificate: the model must be `(m,n)`-accessible
/// over the closure universe of `a` and must refute `a` at `w`.
pub fn verify_countermodel(a: &Formula, m: u32, n: u32, model: &NModel, w: World) -> bool {
    let universe = relation_universe(a, m, n);
    if !model.is_mn_accessible(m, n, &universe).accessible {
        return false;
    }
    matches!(model.forces(w, a), Ok(false))
}

/// Tries the axiom-level proof generator first, then the countermodel
/// search. `Provable` always carries a proof that passes `check_proof`;
/// `Refuted` always carries a certificate that passes
/// `verify_countermodel`; anything unsettled is `Unknown`.
pub fn decide(a: &Formula, m: u32, n: u32, budget: Budget) -> Decision {
    if let Some(proof) = hilbert::prove_axiom_instance(a, m, n) {
        debug_assert!(hilbert::check_proof(&proof).is_accepted());
        return Decision::Provable(proof);
    }
    let outcome = search_countermodel(a, m, n, budget);
    match outcome.found {
        Some((model, world)) => {
            debug_assert!(verify_countermodel(a, m, n, &model, world));
            Decision::Refuted { model, world }
        }
        None => Decision::Unknown(outcome.report),
    }
}
