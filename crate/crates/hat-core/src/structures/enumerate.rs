//! Exhaustive enumeration of 2-valued structures over a vocabulary, up to a
//! node bound, with optional filtering by a closed formula.
//!
//! Every structure with `|universe| <= max_nodes` over the canonical node
//! names `"1".."k"` is produced exactly once, in a deterministic order:
//! universe sizes ascending, and within a size the predicate tables are
//! counted in binary, staged by descending arity (declaration order breaks
//! ties), `eq` being forced.
//!
//! When a filter is given, it is split into top-level conjuncts and each
//! conjunct is checked at the earliest stage at which all its predicates
//! have been decided. For integrity formulas of the kind used with linked
//! structures this prunes the search space by orders of magnitude: the
//! functionality conjunct alone cuts the binary-predicate tables from
//! `2^(k^2)` to `(k+1)^k`.

use std::sync::Arc;

use crate::error::Error;
use crate::logic::{Formula, Vocabulary};
use crate::semantics::Evaluator;
use crate::structures::{table_len, TwoValuedStructure};

/// Counters reported by the stream; `examined` is the number of candidate
/// table instantiations (the budget unit), `yielded` the structures emitted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnumStats {
    pub examined: u64,
    pub yielded: u64,
}

/// Analytic count of all structures over `voc` with at most `max_nodes`
/// nodes: `sum over k of prod over non-eq predicates of 2^(k^arity)`.
/// Returns `None` on overflow.
pub fn predicted_structure_count(voc: &Vocabulary, max_nodes: usize) -> Option<u128> {
    let mut total: u128 = 0;
    for k in 0..=max_nodes {
        let mut per_size: u128 = 1;
        for (p, decl) in voc.decls() {
            if p == voc.eq_index() {
                continue;
            }
            let bits = table_len(k, decl.arity);
            if bits >= 128 {
                return None;
            }
            per_size = per_size.checked_mul(1u128 << bits)?;
        }
        total = total.checked_add(per_size)?;
    }
    Some(total)
}

struct Stage {
    pred: usize,
    bits: usize,
    /// Conjuncts of the filter that become checkable once this stage's
    /// table is decided.
    checks: Vec<Arc<Formula>>,
}

/// Decides the order in which predicate tables are enumerated. Without a
/// filter: descending arity, declaration order as tie break. With one,
/// predicates are picked greedily so that filter conjuncts become
/// checkable as early as possible, which is what makes constrained
/// enumeration at larger bounds affordable.
fn stage_order(voc: &Vocabulary, conjuncts: &[(Formula, Vec<usize>)]) -> Vec<usize> {
    let mut remaining: Vec<usize> = (0..voc.len()).filter(|&p| p != voc.eq_index()).collect();
    remaining.sort_by_key(|&p| (std::cmp::Reverse(voc.arity(p)), p));
    if conjuncts.is_empty() {
        return remaining;
    }
    let mut order = Vec::with_capacity(remaining.len());
    let mut decided = vec![false; voc.len()];
    let mut ready = vec![false; conjuncts.len()];
    while !remaining.is_empty() {
        let mut best = 0usize;
        let mut best_key = (usize::MAX, usize::MAX);
        for (slot, &p) in remaining.iter().enumerate() {
            let mut newly_ready = 0usize;
            let mut open_uses = 0usize;
            for (i, (_, support)) in conjuncts.iter().enumerate() {
                if ready[i] || !support.contains(&p) {
                    continue;
                }
                open_uses += 1;
                if support.iter().all(|&q| q == p || decided[q]) {
                    newly_ready += 1;
                }
            }
            // More conjuncts closed is better; among ties, prefer the
            // predicate with the fewest still-open uses (it will not be
            // needed again soon). `remaining` keeps the base order, which
            // settles the rest.
            let key = (usize::MAX - newly_ready, open_uses);
            if key < best_key {
                best_key = key;
                best = slot;
            }
        }
        let p = remaining.remove(best);
        decided[p] = true;
        for (i, (_, support)) in conjuncts.iter().enumerate() {
            if !ready[i] && support.iter().all(|&q| decided[q]) {
                ready[i] = true;
            }
        }
        order.push(p);
    }
    order
}

#[derive(PartialEq)]
enum State {
    SizeStart,
    Search,
    SizeDone,
    Done,
}

/// Streaming enumerator. Iterate with [`StructureStream::next_structure`],
/// or through the `Iterator` impl which wraps items in `Result`.
pub struct StructureStream {
    voc: Vocabulary,
    max_nodes: usize,
    budget: u64,
    stats: EnumStats,
    stages: Vec<Stage>,
    /// Conjuncts whose only predicate is `eq` (or none), checked per size.
    base_checks: Vec<Arc<Formula>>,
    evaluator: Evaluator,
    state: State,
    size: usize,
    counters: Vec<u64>,
    depth: usize,
    current: TwoValuedStructure,
}

impl StructureStream {
    /// Creates a stream with an optional closed filter formula. The filter
    /// may use the NP fragment (set quantifiers).
    pub fn new(voc: &Vocabulary, max_nodes: usize, filter: Option<&Formula>) -> Result<Self, Error> {
        if let Some(f) = filter {
            f.check(voc)?;
            let free = f.free_variables();
            if !free.is_empty() || !f.free_set_variables().is_empty() {
                return Err(Error::NotClosed { vars: free.into_iter().collect() });
            }
        }
        let conjunct_support: Vec<(Formula, Vec<usize>)> = filter
            .map(|f| {
                f.conjuncts()
                    .into_iter()
                    .map(|c| {
                        let support: Vec<usize> = c
                            .predicates()
                            .iter()
                            .filter_map(|name| voc.pred_index(name))
                            .filter(|&p| p != voc.eq_index())
                            .collect();
                        (c, support)
                    })
                    .collect()
            })
            .unwrap_or_default();
        let order = stage_order(voc, &conjunct_support);

        let mut stages: Vec<Stage> =
            order.iter().map(|&pred| Stage { pred, bits: 0, checks: Vec::new() }).collect();
        let mut base_checks = Vec::new();
        for (conjunct, support) in conjunct_support {
            // Last stage whose predicate occurs in the conjunct.
            let mut last: Option<usize> = None;
            for (i, stage) in stages.iter().enumerate() {
                if support.contains(&stage.pred) {
                    last = Some(i);
                }
            }
            match last {
                Some(i) => stages[i].checks.push(Arc::new(conjunct)),
                None => base_checks.push(Arc::new(conjunct)),
            }
        }

        Ok(StructureStream {
            voc: voc.clone(),
            max_nodes,
            budget: u64::MAX,
            stats: EnumStats::default(),
            stages,
            base_checks,
            evaluator: Evaluator::new(),
            state: State::SizeStart,
            size: 0,
            counters: Vec::new(),
            depth: 0,
            current: TwoValuedStructure::new(voc, Vec::<String>::new()).expect("empty universe"),
        })
    }

    /// Caps the number of candidate table instantiations examined.
    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn stats(&self) -> EnumStats {
        self.stats
    }

    /// Builds the empty-valued structure of the current size and checks the
    /// eq-only conjuncts; `false` means the whole size is pruned.
    fn begin_size(&mut self) -> Result<bool, Error> {
        let k = self.size;
        let ids: Vec<String> = (1..=k).map(|i| i.to_string()).collect();
        self.current = TwoValuedStructure::new(&self.voc, ids).expect("canonical node names");
        for stage in &mut self.stages {
            let bits = table_len(k, self.voc.arity(stage.pred));
            if bits > 63 {
                return Err(Error::TableTooLarge {
                    pred: self.voc.name(stage.pred).to_string(),
                    entries: bits,
                });
            }
            stage.bits = bits;
        }
        self.counters = vec![0; self.stages.len()];
        self.depth = 0;
        for i in 0..self.base_checks.len() {
            let check = self.base_checks[i].clone();
            if !self.evaluator.eval_closed(&self.current, &check)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Installs `counter` as the table of the stage's predicate.
    fn apply_stage(&mut self, stage_idx: usize) {
        let stage = &self.stages[stage_idx];
        let counter = self.counters[stage_idx];
        let table = self.current.raw_table_mut(stage.pred);
        for (bit, slot) in table.iter_mut().enumerate() {
            *slot = counter >> bit & 1 == 1;
        }
    }

    fn stage_checks_pass(&mut self, stage_idx: usize) -> Result<bool, Error> {
        // Conjuncts only mention predicates decided at or before this stage.
        for i in 0..self.stages[stage_idx].checks.len() {
            let check = self.stages[stage_idx].checks[i].clone();
            if !self.evaluator.eval_closed(&self.current, &check)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Produces the next structure satisfying the filter, or `None` when
    /// the space is exhausted.
    pub fn next_structure(&mut self) -> Result<Option<TwoValuedStructure>, Error> {
        loop {
            match self.state {
                State::Done => return Ok(None),
                State::SizeDone => {
                    self.size += 1;
                    self.state = State::SizeStart;
                }
                State::SizeStart => {
                    if self.size > self.max_nodes {
                        self.state = State::Done;
                        continue;
                    }
                    if !self.begin_size()? {
                        self.state = State::SizeDone;
                        continue;
                    }
                    if self.stages.is_empty() {
                        // eq-only vocabulary: one structure per size.
                        self.state = State::SizeDone;
                        self.stats.yielded += 1;
                        return Ok(Some(self.current.clone()));
                    }
                    self.state = State::Search;
                }
                State::Search => {
                    if self.depth == self.stages.len() {
                        // A full structure passed every check; yield it and
                        // resume at the last stage.
                        self.depth -= 1;
                        self.counters[self.depth] += 1;
                        self.stats.yielded += 1;
                        return Ok(Some(self.current.clone()));
                    }
                    let d = self.depth;
                    if self.counters[d] >= 1u64 << self.stages[d].bits {
                        if d == 0 {
                            self.state = State::SizeDone;
                        } else {
                            self.depth -= 1;
                            self.counters[self.depth] += 1;
                        }
                        continue;
                    }
                    self.stats.examined += 1;
                    if self.stats.examined > self.budget {
                        self.state = State::Done;
                        return Err(Error::BudgetExceeded {
                            examined: self.stats.examined,
                            budget: self.budget,
                        });
                    }
                    self.apply_stage(d);
                    if self.stage_checks_pass(d)? {
                        self.depth += 1;
                        if self.depth < self.stages.len() {
                            self.counters[self.depth] = 0;
                        }
                    } else {
                        self.counters[d] += 1;
                    }
                }
            }
        }
    }
}

impl Iterator for StructureStream {
    type Item = Result<TwoValuedStructure, Error>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_structure().transpose()
    }
}

/// Convenience constructor matching the module-level contract.
pub fn enumerate_structures(
    voc: &Vocabulary,
    max_nodes: usize,
    filter: Option<&Formula>,
) -> Result<StructureStream, Error> {
    StructureStream::new(voc, max_nodes, filter)
}
