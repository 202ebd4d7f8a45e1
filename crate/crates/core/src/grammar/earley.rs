//! Scannerless Earley recognition. The chart it builds is later read back by
//! the forest module to count, filter and extract derivations.

use std::collections::{HashMap, HashSet};

use super::{is_word_char, CompiledGrammar, GSym, NtId, RuleId};
use crate::value::Name;

/// One input position: a character, or (in syntax patterns) a meta-variable
/// standing for a whole phrase of nonterminal `nt`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InputSym {
    Char(char),
    Hole { nt: NtId, var: Name },
}

/// `(rule, dot, origin)`
pub(crate) type Item = (RuleId, usize, usize);

pub(crate) struct Chart {
    pub sets: Vec<Vec<Item>>,
    seen: Vec<HashSet<Item>>,
    /// Every set position at which an item occurs.
    pub item_ends: HashMap<Item, Vec<usize>>,
    /// Recognized `(nonterminal, start, end)` spans.
    pub spans: HashSet<(NtId, usize, usize)>,
    max_end: HashMap<(NtId, usize), usize>,
}

impl Chart {
    pub fn has(&self, k: usize, item: Item) -> bool {
        self.seen.get(k).is_some_and(|s| s.contains(&item))
    }

    pub fn max_end(&self, nt: NtId, start: usize) -> usize {
        self.max_end.get(&(nt, start)).copied().unwrap_or(start)
    }

    /// The last position reached by any item.
    pub fn furthest(&self) -> usize {
        self.sets.iter().rposition(|s| !s.is_empty()).unwrap_or(0)
    }

    fn add(&mut self, k: usize, item: Item) {
        if self.seen[k].insert(item) {
            self.sets[k].push(item);
            self.item_ends.entry(item).or_default().push(k);
        }
    }
}

fn lit_at(input: &[InputSym], k: usize, lit: &[char]) -> bool {
    input.len() >= k + lit.len() && lit.iter().enumerate().all(|(j, c)| input[k + j] == InputSym::Char(*c))
}

pub(crate) fn recognize(g: &CompiledGrammar, input: &[InputSym], start: NtId) -> Chart {
    let n = input.len();
    let mut chart = Chart {
        sets: vec![Vec::new(); n + 1],
        seen: vec![HashSet::new(); n + 1],
        item_ends: HashMap::new(),
        spans: HashSet::new(),
        max_end: HashMap::new(),
    };
    let mut waiting: Vec<HashMap<NtId, Vec<Item>>> = vec![HashMap::new(); n + 1];
    for &r in &g.nts[start].rules {
        chart.add(0, (r, 0, 0));
    }
    for k in 0..=n {
        let mut idx = 0;
        while idx < chart.sets[k].len() {
            let item @ (r, dot, origin) = chart.sets[k][idx];
            idx += 1;
            let rule = &g.rules[r];
            match rule.rhs.get(dot) {
                None => {
                    let lhs = rule.lhs;
                    chart.spans.insert((lhs, origin, k));
                    let e = chart.max_end.entry((lhs, origin)).or_insert(k);
                    *e = (*e).max(k);
                    let parents = waiting[origin].get(&lhs).cloned().unwrap_or_default();
                    for (r2, d2, o2) in parents {
                        chart.add(k, (r2, d2 + 1, o2));
                    }
                }
                Some(GSym::Nt(x)) => {
                    let x = *x;
                    waiting[k].entry(x).or_default().push(item);
                    for &r2 in &g.nts[x].rules {
                        chart.add(k, (r2, 0, k));
                    }
                    if g.nts[x].nullable {
                        chart.add(k, (r, dot + 1, origin));
                    }
                    if let Some(InputSym::Hole { nt, .. }) = input.get(k) {
                        if *nt == x {
                            chart.add(k + 1, (r, dot + 1, origin));
                        }
                    }
                }
                Some(GSym::Lit(lit)) => {
                    if lit_at(input, k, lit) {
                        let end = k + lit.len();
                        let blocked = rule.cf
                            && lit.last().is_some_and(|c| is_word_char(*c))
                            && matches!(input.get(end), Some(InputSym::Char(c)) if is_word_char(*c));
                        if !blocked {
                            chart.add(end, (r, dot + 1, origin));
                        }
                    }
                }
                Some(GSym::Class(class)) => {
                    if let Some(InputSym::Char(c)) = input.get(k) {
                        if class.contains(*c) {
                            chart.add(k + 1, (r, dot + 1, origin));
                        }
                    }
                }
            }
        }
    }
    chart
}
