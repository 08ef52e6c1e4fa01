use std::collections::HashSet;

use super::{CFGrammar, Symbol};
use crate::alphabet::Letter;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OracleVerdict {
    /// A leftmost derivation of the target exists within the step bound.
    Yes,
    /// No derivation within the bound. Does not prove non-membership.
    NoWithinBound,
}

/// Sentential form: `target[..matched]` followed by `rest`.
type Form = (usize, Vec<Symbol>);

/// Drops leading letters that agree with the target. `None` if the form can
/// no longer produce the target.
fn settle(target: &[Letter], mut matched: usize, rest: &[Symbol]) -> Option<Form> {
    let mut i = 0;
    while let Some(&Symbol::Letter(a)) = rest.get(i) {
        if target.get(matched) != Some(&a) {
            return None;
        }
        matched += 1;
        i += 1;
    }
    let rest = &rest[i..];
    let letters = rest.iter().filter(|s| matches!(s, Symbol::Letter(_))).count();
    if letters > target.len() - matched {
        return None;
    }
    Some((matched, rest.to_vec()))
}

/// Breadth-first search over leftmost derivations from `start` (a word of
/// nonterminals), pruning forms whose terminal prefix is not a prefix of
/// `target`. Answers `Yes` iff `target` is derivable in at most `max_steps`
/// steps.
pub fn derivation_oracle(grammar: &CFGrammar, start: &[usize], target: &[Letter], max_steps: usize) -> OracleVerdict {
    let initial: Vec<Symbol> = start.iter().map(|&x| Symbol::Nonterminal(x)).collect();
    let Some(first) = settle(target, 0, &initial) else {
        return OracleVerdict::NoWithinBound;
    };
    let done = |f: &Form| f.0 == target.len() && f.1.is_empty();
    if done(&first) {
        return OracleVerdict::Yes;
    }
    let mut seen: HashSet<Form> = HashSet::new();
    seen.insert(first.clone());
    let mut layer = vec![first];
    for _ in 0..max_steps {
        let mut next = Vec::new();
        for (matched, rest) in &layer {
            let Some((&Symbol::Nonterminal(x), tail)) = rest.split_first() else {
                continue;
            };
            for body in grammar.productions(x) {
                let mut expanded = body.clone();
                expanded.extend_from_slice(tail);
                if let Some(form) = settle(target, *matched, &expanded) {
                    if done(&form) {
                        return OracleVerdict::Yes;
                    }
                    if seen.insert(form.clone()) {
                        next.push(form);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    OracleVerdict::NoWithinBound
}
