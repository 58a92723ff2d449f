//! Modal formula trees and their canonical enumeration order.
//!
//! Formulas are ordinary syntax trees; equality is syntactic identity.
//! The enumeration order used throughout the crate is shortlex over a
//! fully parenthesised serialization: shorter serializations come first,
//! ties break lexicographically over a fixed ASCII alphabet. A proper
//! subformula always serializes strictly shorter than its parent, so the
//! order is monotone along the subformula relation — the property the
//! output machines rely on when they compare enumeration indices.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigUint;

/// A formula of the modal language: variables, falsum, the propositional
/// connectives, and the box.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(String),
    Bot,
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(name.to_owned())
    }

    pub fn neg(a: Formula) -> Formula {
        Formula::Neg(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn boxed(a: Formula) -> Formula {
        Formula::Box(Box::new(a))
    }

    /// `[]^k a`: `k` boxes in front of `a`. `box_power(0, a)` is `a` itself.
    pub fn box_power(k: u32, a: Formula) -> Formula {
        let mut f = a;
        for _ in 0..k {
            f = Formula::boxed(f);
        }
        f
    }

    pub fn node_count(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Bot => 1,
            Formula::Neg(a) | Formula::Box(a) => 1 + a.node_count(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                1 + a.node_count() + b.node_count()
            }
        }
    }

    /// All subformulas of `self`, including `self`, in canonical order.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas(&self, out: &mut BTreeSet<Formula>) {
        if !out.insert(self.clone()) {
            return;
        }
        match self {
            Formula::Var(_) | Formula::Bot => {}
            Formula::Neg(a) | Formula::Box(a) => a.collect_subformulas(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_subformulas(out);
                b.collect_subformulas(out);
            }
        }
    }

    /// Variable names occurring in `self`, in canonical order.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Var(v) => {
                out.insert(v.clone());
            }
            Formula::Bot => {}
            Formula::Neg(a) | Formula::Box(a) => a.collect_vars(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Splits off the maximal run of outermost boxes.
    pub fn box_decompose(&self) -> BoxDecomposition {
        let mut prefix_len = 0u32;
        let mut core = self;
        while let Formula::Box(inner) = core {
            prefix_len += 1;
            core = inner;
        }
        BoxDecomposition {
            prefix_len,
            core: core.clone(),
        }
    }

    /// Fully parenthesised serialization; injective on well-formed formulas
    /// (variable names are identifiers distinct from the keyword `bot`).
    pub fn canonical_ser(&self) -> String {
        let mut s = String::new();
        self.write_ser(&mut s);
        s
    }

    // Binary nodes always parenthesise themselves, so prefix operators can
    // prepend their symbol without further bracketing.
    fn write_ser(&self, out: &mut String) {
        match self {
            Formula::Var(v) => out.push_str(v),
            Formula::Bot => out.push_str("bot"),
            Formula::Neg(a) => {
                out.push('~');
                a.write_ser(out);
            }
            Formula::Box(a) => {
                out.push_str("[]");
                a.write_ser(out);
            }
            Formula::And(a, b) => Self::write_binary(out, a, "&", b),
            Formula::Or(a, b) => Self::write_binary(out, a, "|", b),
            Formula::Imp(a, b) => Self::write_binary(out, a, "->", b),
        }
    }

    fn write_binary(out: &mut String, a: &Formula, op: &str, b: &Formula) {
        out.push('(');
        a.write_ser(out);
        out.push_str(op);
        b.write_ser(out);
        out.push(')');
    }

    /// Position of `self` in the shortlex enumeration of all serializations
    /// over the formula alphabet. Injective, and smaller on proper
    /// subformulas than on the formulas containing them.
    pub fn canonical_index(&self) -> BigUint {
        shortlex_rank(self.canonical_ser().as_bytes())
    }

    /// Length of the canonical serialization, without building it.
    pub fn ser_len(&self) -> usize {
        match self {
            Formula::Var(v) => v.len(),
            Formula::Bot => 3,
            Formula::Neg(a) => 1 + a.ser_len(),
            Formula::Box(a) => 2 + a.ser_len(),
            Formula::And(a, b) | Formula::Or(a, b) => 3 + a.ser_len() + b.ser_len(),
            Formula::Imp(a, b) => 4 + a.ser_len() + b.ser_len(),
        }
    }
}

/// A formula split as `[]^prefix_len core` with `core` not box-headed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxDecomposition {
    pub prefix_len: u32,
    pub core: Formula,
}

impl BoxDecomposition {
    /// Puts the boxes back; inverse of [`Formula::box_decompose`].
    pub fn reconstruct(&self) -> Formula {
        Formula::box_power(self.prefix_len, self.core.clone())
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_ser())
    }
}

impl PartialOrd for Formula {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Formula {
    // shortlex on the canonical serialization; lengths compare without
    // building the strings, which only materialize on a length tie
    fn cmp(&self, other: &Self) -> Ordering {
        self.ser_len().cmp(&other.ser_len()).then_with(|| {
            shortlex_cmp(
                self.canonical_ser().as_bytes(),
                other.canonical_ser().as_bytes(),
            )
        })
    }
}

/// Shortlex comparison: by length first, then by alphabet position — the
/// same order `shortlex_rank` embeds into the naturals.
pub(crate) fn shortlex_cmp(a: &[u8], b: &[u8]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        for (&x, &y) in a.iter().zip(b) {
            match digit_value(x).cmp(&digit_value(y)) {
                Ordering::Equal => {}
                other => return other,
            }
        }
        Ordering::Equal
    })
}

// The serialization alphabet. Ranking treats a string as a numeral over
// this alphabet, offset so that all shorter strings rank below all longer
// ones. Bytes outside the table cannot occur in well-formed serializations.
const ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_()~&|->[]^:=,. ";

fn digit_value(byte: u8) -> usize {
    ALPHABET
        .iter()
        .position(|&c| c == byte)
        .expect("byte outside the serialization alphabet")
}

/// Rank of `s` in the shortlex enumeration of all strings over [`ALPHABET`]:
/// `rank = sum_{l < len} B^l + value(s)` with `value` read base `B`.
pub(crate) fn shortlex_rank(s: &[u8]) -> BigUint {
    let base = BigUint::from(ALPHABET.len());
    let mut offset = BigUint::from(0u32);
    let mut pow = BigUint::from(1u32);
    for _ in 0..s.len() {
        offset += &pow;
        pow *= &base;
    }
    let mut value = BigUint::from(0u32);
    for &byte in s {
        value = value * &base + BigUint::from(digit_value(byte));
    }
    offset + value
}

/// `true` when `sub` occurs strictly inside `sup`.
pub fn is_proper_subformula(sub: &Formula, sup: &Formula) -> bool {
    sub != sup && sup.subformulas().contains(sub)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec::Vec;
    use alloc::vec;

    fn p() -> Formula {
        Formula::var("p")
    }

    fn q() -> Formula {
        Formula::var("q")
    }

    #[test]
    fn box_power_unrolls() {
        assert_eq!(Formula::box_power(0, p()), p());
        assert_eq!(
            Formula::box_power(3, Formula::Bot),
            Formula::boxed(Formula::boxed(Formula::boxed(Formula::Bot)))
        );
    }

    #[test]
    fn subformulas_of_boxed_var() {
        let f = Formula::boxed(p());
        let subs: Vec<_> = f.subformulas().into_iter().collect();
        assert_eq!(subs, vec![p(), Formula::boxed(p())]);
    }

    #[test]
    fn subformulas_of_implication() {
        let f = Formula::imp(Formula::boxed(p()), p());
        let subs = f.subformulas();
        assert_eq!(subs.len(), 3);
        assert!(subs.contains(&p()));
        assert!(subs.contains(&Formula::boxed(p())));
        assert!(subs.contains(&f));
    }

    #[test]
    fn subformulas_of_double_box_bot() {
        let f = Formula::box_power(2, Formula::Bot);
        let subs: Vec<_> = f.subformulas().into_iter().collect();
        assert_eq!(
            subs,
            vec![
                Formula::Bot,
                Formula::boxed(Formula::Bot),
                Formula::box_power(2, Formula::Bot)
            ]
        );
    }

    #[test]
    fn subformula_count_bounded_by_nodes() {
        let f = Formula::imp(
            Formula::and(p(), p()),
            Formula::or(Formula::neg(q()), Formula::boxed(p())),
        );
        assert!(f.subformulas().len() <= f.node_count());
    }

    #[test]
    fn box_decompose_examples() {
        let d = Formula::box_power(2, p()).box_decompose();
        assert_eq!(d.prefix_len, 2);
        assert_eq!(d.core, p());

        let f = Formula::imp(Formula::boxed(p()), q());
        let d = f.box_decompose();
        assert_eq!(d.prefix_len, 0);
        assert_eq!(d.core, f);

        let inner = Formula::neg(Formula::boxed(p()));
        let d = Formula::boxed(inner.clone()).box_decompose();
        assert_eq!(d.prefix_len, 1);
        assert_eq!(d.core, inner);
    }

    #[test]
    fn decompose_reconstruct_roundtrip() {
        let samples = [
            p(),
            Formula::Bot,
            Formula::box_power(4, Formula::imp(p(), q())),
            Formula::neg(Formula::boxed(p())),
            Formula::boxed(Formula::and(Formula::boxed(p()), q())),
        ];
        for f in samples {
            assert_eq!(f.box_decompose().reconstruct(), f);
        }
    }

    #[test]
    fn index_monotone_on_boxes() {
        assert!(p().canonical_index() < Formula::boxed(p()).canonical_index());
        assert_ne!(p().canonical_index(), q().canonical_index());
    }

    #[test]
    fn index_orders_box_powers() {
        // []^{m-1} a ranks below []^{n-1} a whenever m < n.
        let bases = [p(), Formula::imp(p(), q()), Formula::neg(Formula::Bot)];
        for a in bases {
            for m in 1u32..4 {
                for n in (m + 1)..5 {
                    let lo = Formula::box_power(m - 1, a.clone()).canonical_index();
                    let hi = Formula::box_power(n - 1, a.clone()).canonical_index();
                    assert!(lo < hi, "{:?} m={} n={}", a, m, n);
                }
            }
        }
    }

    #[test]
    fn ord_agrees_with_index() {
        let fs = [
            p(),
            q(),
            Formula::Bot,
            Formula::boxed(p()),
            Formula::imp(p(), q()),
            Formula::neg(Formula::Bot),
        ];
        for a in &fs {
            for b in &fs {
                let by_ord = a.cmp(b);
                let by_idx = a.canonical_index().cmp(&b.canonical_index());
                assert_eq!(by_ord, by_idx, "{:?} vs {:?}", a, b);
            }
        }
    }

    #[test]
    fn serialization_is_compositional() {
        let f = Formula::imp(Formula::boxed(p()), Formula::and(p(), q()));
        let ser = f.canonical_ser();
        assert_eq!(format!("{:?}", f), ser);
        for sub in f.subformulas() {
            assert!(
                ser.contains(&sub.canonical_ser()),
                "missing {:?} in {}",
                sub,
                ser
            );
        }
    }
}
