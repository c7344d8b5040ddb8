//! Table-driven interactive relaxation parsing.
//!
//! Lexical nodes are seeded for every sense of every morpheme. Each cycle
//! runs three phases: nodes above Θ generate new nodes by cancellation with
//! adjacent constituents, activation spreads up and down the derivation
//! links, and everything decays, with nodes below Φ removed.

mod chart;
mod params;
mod tree;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fmt::Write as _;

pub use chart::chart_parse;
pub use params::{Constituents, DecayMode, RelaxationParams, SpreadDown};
pub use tree::ParseTree;

use crate::error::{Error, Result};
use crate::grammar::{left_cancel, right_cancel, Category, Lexicon};
use crate::morph::MorphemeLattice;
use crate::table::TriangularTable;

/// 1-based inclusive span.
pub type Span = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Where a node at `span` may generate, paired with where the generated node
/// looks for its other constituent. Leftward: `(k, j)` searching `(k, i−1)`
/// for `k` in `1..i`. Rightward: `(i, k)` searching `(j+1, k)` for `k` in
/// `j+1..=n`.
pub fn generation_positions(span: Span, side: Side, n: usize) -> Vec<(Span, Span)> {
    let (i, j) = span;
    assert!(1 <= i && i <= j && j <= n, "span ({i},{j}) outside 1..{n}");
    match side {
        Side::Left => (1..i).map(|k| ((k, j), (k, i - 1))).collect(),
        Side::Right => (j + 1..=n).map(|k| ((i, k), (j + 1, k))).collect(),
    }
}

/// Upward increments from a child with activation `a` to parents with
/// activations `parents`: `n·ρ·a·a_i² / Σ a_j²`. All-zero parents split the
/// mass evenly.
pub fn spread_up(a: f64, parents: &[f64], rho: f64) -> Vec<f64> {
    let n = parents.len();
    let total = n as f64 * rho * a;
    let norm: f64 = parents.iter().map(|p| p * p).sum();
    if norm == 0.0 {
        return vec![total / n as f64; n];
    }
    parents.iter().map(|p| total * (p * p) / norm).collect()
}

/// Downward increment for each of `m` children of a parent with activation `a`.
pub fn spread_down(a: f64, m: usize, rho_prime: f64, mode: SpreadDown) -> f64 {
    assert!(m >= 1, "spread_down needs a child");
    match mode {
        SpreadDown::Partition => rho_prime * a / m as f64,
        SpreadDown::Whole => rho_prime * a,
    }
}

/// One cycle of decay. `cr == 0` marks a node that needs no constituents.
pub fn decay(a: f64, ca: usize, cr: usize, d: f64, mode: DecayMode) -> f64 {
    let base = match mode {
        DecayMode::PaperLiteral => a * (1.0 - d),
        DecayMode::Retention => a * d,
    };
    if cr == 0 || ca >= cr {
        base
    } else {
        base * ca as f64 / cr as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Morpheme {
    pub form: String,
    pub span: Span,
}

/// Morphemes over positions `1..=positions`. Adjacency is exact span
/// abutment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseInput {
    pub morphemes: Vec<Morpheme>,
    pub positions: usize,
}

impl ParseInput {
    /// One slot per morpheme.
    pub fn sequence<S: AsRef<str>>(forms: &[S]) -> Self {
        ParseInput {
            morphemes: forms
                .iter()
                .enumerate()
                .map(|(k, f)| Morpheme {
                    form: f.as_ref().to_string(),
                    span: (k + 1, k + 1),
                })
                .collect(),
            positions: forms.len(),
        }
    }

    /// Every distinct morpheme of every analysis, at its phoneme span.
    pub fn from_lattice(lattice: &MorphemeLattice) -> Self {
        let morphemes: BTreeSet<Morpheme> = lattice
            .analyses
            .iter()
            .flat_map(|a| &a.morphemes)
            .map(|m| Morpheme {
                form: m.orthographic.clone(),
                span: m.span,
            })
            .collect();
        ParseInput {
            morphemes: morphemes.into_iter().collect(),
            positions: lattice.positions,
        }
    }

    fn validate(&self) -> Result<()> {
        for m in &self.morphemes {
            let (i, j) = m.span;
            if !(1 <= i && i <= j && j <= self.positions) {
                return Err(Error::Params(format!(
                    "morpheme {} at ({i},{j}) lies outside 1..{}",
                    m.form, self.positions
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Lexical { form: String },
    Generated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Derivation {
    pub functor: usize,
    pub arg: usize,
}

#[derive(Debug, Clone)]
pub struct GrammarNode {
    pub id: usize,
    pub category: Category,
    pub span: Span,
    pub activation: f64,
    pub kind: NodeKind,
    /// Ways this node was built; empty for lexical nodes.
    pub derivations: Vec<Derivation>,
    pub cr: usize,
    pub ca: usize,
}

impl GrammarNode {
    pub fn is_lexical(&self) -> bool {
        matches!(self.kind, NodeKind::Lexical { .. })
    }

    /// Distinct constituents over all derivations.
    pub fn children(&self) -> BTreeSet<usize> {
        self.derivations
            .iter()
            .flat_map(|d| [d.functor, d.arg])
            .collect()
    }

    pub fn label(&self) -> String {
        format!("{}({},{})", self.category, self.span.0, self.span.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct NodeKey {
    form: Option<String>,
    category: Category,
    span: Span,
}

type Signature = (BTreeSet<(Option<String>, String, Span)>, Option<usize>);

#[derive(Debug, Clone, PartialEq)]
pub struct TraceLine {
    pub cycle: usize,
    pub node: usize,
    pub category: String,
    pub span: Span,
    pub activation: f64,
}

/// Per-cycle node snapshots plus generation events.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub lines: Vec<TraceLine>,
    pub events: Vec<(usize, String)>,
}

impl Trace {
    /// `cycle<TAB>node_id<TAB>category<TAB>span<TAB>activation` lines, with
    /// each cycle's generation events first as `#` comments.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut events = self.events.iter().peekable();
        let mut lines = self.lines.iter().peekable();
        loop {
            let cycle = match (events.peek(), lines.peek()) {
                (None, None) => break,
                (Some(e), None) => e.0,
                (None, Some(l)) => l.cycle,
                (Some(e), Some(l)) => e.0.min(l.cycle),
            };
            while let Some((_, text)) = events.next_if(|e| e.0 == cycle) {
                let _ = writeln!(out, "# {cycle}: {text}");
            }
            while let Some(l) = lines.next_if(|l| l.cycle == cycle) {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t({},{})\t{:.6}",
                    l.cycle, l.node, l.category, l.span.0, l.span.1, l.activation
                );
            }
        }
        out
    }
}

/// Nodes in a triangular table, with derivation links.
#[derive(Debug, Clone)]
pub struct RelaxationState {
    positions: usize,
    nodes: BTreeMap<usize, GrammarNode>,
    index: HashMap<NodeKey, usize>,
    table: TriangularTable<Vec<usize>>,
    next_id: usize,
    pub cycle: usize,
    pub trace: Option<Trace>,
}

impl RelaxationState {
    /// Seeds one lexical node per sense of every morpheme.
    pub fn new(input: &ParseInput, lexicon: &Lexicon, params: &RelaxationParams) -> Result<Self> {
        input.validate()?;
        let mut state = RelaxationState {
            positions: input.positions,
            nodes: BTreeMap::new(),
            index: HashMap::new(),
            table: TriangularTable::new(input.positions),
            next_id: 0,
            cycle: 0,
            trace: None,
        };
        for m in &input.morphemes {
            for sense in lexicon.require(&m.form)? {
                let key = NodeKey {
                    form: Some(m.form.clone()),
                    category: sense.clone(),
                    span: m.span,
                };
                if state.index.contains_key(&key) {
                    continue;
                }
                state.insert(
                    key,
                    GrammarNode {
                        id: 0,
                        category: sense.clone(),
                        span: m.span,
                        activation: params.init_lexical,
                        kind: NodeKind::Lexical {
                            form: m.form.clone(),
                        },
                        derivations: Vec::new(),
                        cr: 0,
                        ca: 0,
                    },
                );
            }
        }
        Ok(state)
    }

    pub fn with_trace(mut self) -> Self {
        let mut trace = Trace::default();
        self.snapshot_into(&mut trace);
        self.trace = Some(trace);
        self
    }

    pub fn positions(&self) -> usize {
        self.positions
    }

    pub fn nodes(&self) -> impl Iterator<Item = &GrammarNode> {
        self.nodes.values()
    }

    pub fn node(&self, id: usize) -> Option<&GrammarNode> {
        self.nodes.get(&id)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node ids in table cell `(i, j)`.
    pub fn cell(&self, i: usize, j: usize) -> &[usize] {
        self.table.cell(i, j)
    }

    pub fn find(&self, category: &Category, span: Span) -> Option<&GrammarNode> {
        self.nodes
            .values()
            .find(|n| &n.category == category && n.span == span)
    }

    fn insert(&mut self, key: NodeKey, mut node: GrammarNode) -> usize {
        let id = self.next_id;
        self.next_id += 1;
        node.id = id;
        self.table.cell_mut(node.span.0, node.span.1).push(id);
        self.index.insert(key, id);
        self.nodes.insert(id, node);
        id
    }

    fn remove(&mut self, id: usize) {
        if let Some(node) = self.nodes.remove(&id) {
            self.table
                .cell_mut(node.span.0, node.span.1)
                .retain(|&x| x != id);
            let form = match node.kind {
                NodeKind::Lexical { form } => Some(form),
                NodeKind::Generated => None,
            };
            self.index.remove(&NodeKey {
                form,
                category: node.category,
                span: node.span,
            });
        }
    }

    fn constituent_counts(&self, d: &Derivation, params: &RelaxationParams) -> (usize, usize) {
        match params.constituents {
            Constituents::Binary => (2, 2),
            Constituents::Arity => (1, self.nodes[&d.functor].category.arity()),
        }
    }

    /// The derivation giving the most favourable Ca/Cr.
    fn refresh_counts(&mut self, id: usize, params: &RelaxationParams) {
        let best = self.nodes[&id]
            .derivations
            .iter()
            .map(|d| self.constituent_counts(d, params))
            .max_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
        if let (Some((ca, cr)), Some(node)) = (best, self.nodes.get_mut(&id)) {
            node.ca = ca;
            node.cr = cr;
        }
    }

    /// Records `functor + arg → category` at `span`. Returns the node id when
    /// the derivation is new.
    fn derive(
        &mut self,
        category: Category,
        span: Span,
        d: Derivation,
        params: &RelaxationParams,
    ) -> Option<usize> {
        let key = NodeKey {
            form: None,
            category: category.clone(),
            span,
        };
        let id = match self.index.get(&key) {
            Some(&id) => {
                let node = self.nodes.get_mut(&id).expect("indexed node exists");
                if node.derivations.contains(&d) {
                    return None;
                }
                node.derivations.push(d);
                node.activation += params.init_generated;
                id
            }
            None => self.insert(
                key,
                GrammarNode {
                    id: 0,
                    category,
                    span,
                    activation: params.init_generated,
                    kind: NodeKind::Generated,
                    derivations: vec![d],
                    cr: 0,
                    ca: 0,
                },
            ),
        };
        self.refresh_counts(id, params);
        Some(id)
    }

    /// Cancellations between node `x` and an adjacent node `y` on `side`.
    fn combinations(&self, x: usize, y: usize, side: Side) -> Vec<(Category, Derivation)> {
        let (cx, cy) = (&self.nodes[&x].category, &self.nodes[&y].category);
        let mut out = Vec::new();
        // (left node, right node) in surface order
        let (l, r, cl, cr) = match side {
            Side::Left => (y, x, cy, cx),
            Side::Right => (x, y, cx, cy),
        };
        if let Some(c) = left_cancel(cl, cr) {
            out.push((c, Derivation { functor: r, arg: l }));
        }
        if let Some(c) = right_cancel(cl, cr) {
            out.push((c, Derivation { functor: l, arg: r }));
        }
        out
    }

    fn add_nodes(&mut self, params: &RelaxationParams) {
        let firing: Vec<usize> = self
            .nodes
            .values()
            .filter(|n| n.activation > params.theta)
            .map(|n| n.id)
            .collect();
        let n = self.positions;
        let mut events = Vec::new();
        loop {
            let mut changed = false;
            for &x in &firing {
                let span = self.nodes[&x].span;
                for side in [Side::Left, Side::Right] {
                    for (generated, search) in generation_positions(span, side, n) {
                        let partners = self.table.cell(search.0, search.1).to_vec();
                        for y in partners {
                            for (category, d) in self.combinations(x, y, side) {
                                if let Some(id) = self.derive(category, generated, d, params) {
                                    changed = true;
                                    if self.trace.is_some() {
                                        // credit the functor when it fired too
                                        let (by, with) = if firing.contains(&d.functor) {
                                            (d.functor, d.arg)
                                        } else {
                                            (x, y)
                                        };
                                        events.push(format!(
                                            "{} generates {} binding {}",
                                            self.nodes[&by].label(),
                                            self.nodes[&id].label(),
                                            self.nodes[&with].label()
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if let Some(trace) = &mut self.trace {
            trace
                .events
                .extend(events.into_iter().map(|e| (self.cycle, e)));
        }
    }

    fn spread(&mut self, params: &RelaxationParams) {
        let snapshot: BTreeMap<usize, f64> =
            self.nodes.values().map(|n| (n.id, n.activation)).collect();
        let mut parents: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut children: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for node in self.nodes.values() {
            let kids = node.children();
            for &c in &kids {
                parents.entry(c).or_default().push(node.id);
            }
            if !kids.is_empty() {
                children.insert(node.id, kids);
            }
        }
        let mut inc: BTreeMap<usize, f64> = BTreeMap::new();
        for (&c, ps) in &parents {
            let acts: Vec<f64> = ps.iter().map(|p| snapshot[p]).collect();
            for (&p, v) in ps.iter().zip(spread_up(snapshot[&c], &acts, params.rho)) {
                *inc.entry(p).or_default() += v;
            }
        }
        for (&p, kids) in &children {
            let v = spread_down(
                snapshot[&p],
                kids.len(),
                params.rho_prime,
                params.spread_down,
            );
            for &c in kids {
                *inc.entry(c).or_default() += v;
            }
        }
        for (id, v) in inc {
            if let Some(node) = self.nodes.get_mut(&id) {
                node.activation += v;
            }
        }
    }

    fn decay_and_prune(&mut self, params: &RelaxationParams) {
        for node in self.nodes.values_mut() {
            node.activation = decay(
                node.activation,
                node.ca,
                node.cr,
                params.d,
                params.decay_mode,
            );
        }
        let mut doomed: Vec<usize> = self
            .nodes
            .values()
            .filter(|n| n.activation < params.phi)
            .map(|n| n.id)
            .collect();
        // derivations lose their node when a constituent goes
        while !doomed.is_empty() {
            for id in doomed.drain(..) {
                self.remove(id);
            }
            let ids: Vec<usize> = self.nodes.keys().copied().collect();
            for id in ids {
                let node = &self.nodes[&id];
                if node.is_lexical() {
                    continue;
                }
                let kept: Vec<Derivation> = node
                    .derivations
                    .iter()
                    .copied()
                    .filter(|d| {
                        self.nodes.contains_key(&d.functor) && self.nodes.contains_key(&d.arg)
                    })
                    .collect();
                if kept.is_empty() {
                    doomed.push(id);
                } else if kept.len() != node.derivations.len() {
                    self.nodes.get_mut(&id).expect("live node").derivations = kept;
                    self.refresh_counts(id, params);
                }
            }
        }
    }

    fn snapshot_into(&self, trace: &mut Trace) {
        trace.lines.extend(self.nodes.values().map(|n| TraceLine {
            cycle: self.cycle,
            node: n.id,
            category: n.category.to_string(),
            span: n.span,
            activation: n.activation,
        }));
    }

    /// One cycle: add nodes, spread activation, decay.
    pub fn step(&mut self, params: &RelaxationParams) {
        self.cycle += 1;
        self.add_nodes(params);
        self.spread(params);
        self.decay_and_prune(params);
        if let Some(mut trace) = self.trace.take() {
            self.snapshot_into(&mut trace);
            self.trace = Some(trace);
        }
    }

    /// Full-span nodes whose category is the basic root category.
    pub fn roots<'a>(
        &'a self,
        params: &'a RelaxationParams,
    ) -> impl Iterator<Item = &'a GrammarNode> {
        let full = (1, self.positions);
        self.nodes
            .values()
            .filter(move |n| n.span == full && n.category.name() == Some(params.root.as_str()))
    }

    fn signature(&self, params: &RelaxationParams) -> Signature {
        let keys = self
            .nodes
            .values()
            .map(|n| {
                let form = match &n.kind {
                    NodeKind::Lexical { form } => Some(form.clone()),
                    NodeKind::Generated => None,
                };
                (form, n.category.to_string(), n.span)
            })
            .collect();
        let top = self
            .roots(params)
            .max_by(|a, b| a.activation.total_cmp(&b.activation).then(b.id.cmp(&a.id)))
            .map(|n| n.id);
        (keys, top)
    }

    /// Every tree rooted at `id`, at most `limit` of them.
    pub fn trees(&self, id: usize, limit: usize) -> Vec<ParseTree> {
        let mut memo = HashMap::new();
        self.trees_memo(id, limit, &mut memo)
    }

    fn trees_memo(
        &self,
        id: usize,
        limit: usize,
        memo: &mut HashMap<usize, Vec<ParseTree>>,
    ) -> Vec<ParseTree> {
        if let Some(t) = memo.get(&id) {
            return t.clone();
        }
        let node = &self.nodes[&id];
        let out = match &node.kind {
            NodeKind::Lexical { form } => vec![ParseTree::leaf(
                form.clone(),
                node.category.clone(),
                node.span,
                node.activation,
            )],
            NodeKind::Generated => {
                let mut out = Vec::new();
                'derivs: for d in &node.derivations {
                    let fs = self.trees_memo(d.functor, limit, memo);
                    let args = self.trees_memo(d.arg, limit, memo);
                    for f in &fs {
                        for a in &args {
                            if out.len() >= limit {
                                break 'derivs;
                            }
                            out.push(ParseTree::branch(
                                node.category.clone(),
                                node.span,
                                node.activation,
                                f.clone(),
                                a.clone(),
                            ));
                        }
                    }
                }
                out
            }
        };
        memo.insert(id, out.clone());
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Node set and top root unchanged for the stability window.
    Stable,
    MaxCycles,
    /// Every node was removed.
    Extinct,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::Stable => "stable",
            StopReason::MaxCycles => "max-cycles",
            StopReason::Extinct => "extinct",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialSpan {
    pub category: Category,
    pub span: Span,
    pub activation: f64,
}

#[derive(Debug, Clone)]
pub struct ParseOutcome {
    /// Best first: activation, then fewer nodes, then leftmost spans.
    pub trees: Vec<ParseTree>,
    pub cycles: usize,
    pub stop: StopReason,
    /// Widest surviving nodes, for diagnostics when no tree was found.
    pub partial: Vec<PartialSpan>,
    pub trace: Option<Trace>,
}

impl ParseOutcome {
    pub fn best(&self) -> Option<&ParseTree> {
        self.trees.first()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    pub trace: bool,
    /// Cap on trees enumerated per node.
    pub tree_limit: usize,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            trace: false,
            tree_limit: 1000,
        }
    }
}

/// Relaxes until the table is stable, the cycle budget runs out or no node
/// survives, then reads trees off the surviving root nodes.
pub fn parse(
    input: &ParseInput,
    lexicon: &Lexicon,
    params: &RelaxationParams,
    options: ParseOptions,
) -> Result<ParseOutcome> {
    params.validate()?;
    let mut state = RelaxationState::new(input, lexicon, params)?;
    if options.trace {
        state = state.with_trace();
    }
    let stop = run(&mut state, params);
    Ok(outcome(state, params, stop, options))
}

/// Steps `state` until a stop condition holds.
pub fn run(state: &mut RelaxationState, params: &RelaxationParams) -> StopReason {
    let mut last = state.signature(params);
    let mut unchanged = 0;
    while state.cycle < params.max_cycles {
        if state.is_empty() {
            return StopReason::Extinct;
        }
        state.step(params);
        let now = state.signature(params);
        if now == last {
            unchanged += 1;
            if unchanged >= params.stability_window {
                return StopReason::Stable;
            }
        } else {
            unchanged = 0;
        }
        last = now;
    }
    if state.is_empty() {
        StopReason::Extinct
    } else {
        StopReason::MaxCycles
    }
}

fn outcome(
    state: RelaxationState,
    params: &RelaxationParams,
    stop: StopReason,
    options: ParseOptions,
) -> ParseOutcome {
    let mut trees: Vec<ParseTree> = state
        .roots(params)
        .flat_map(|r| state.trees(r.id, options.tree_limit))
        .collect();
    trees.sort_by(ParseTree::rank_cmp);
    trees.dedup_by(|a, b| a.same_shape(b));

    let mut partial: Vec<PartialSpan> = state
        .nodes()
        .map(|n| PartialSpan {
            category: n.category.clone(),
            span: n.span,
            activation: n.activation,
        })
        .collect();
    partial.sort_by(|a, b| {
        let wa = a.span.1 - a.span.0;
        let wb = b.span.1 - b.span.0;
        wb.cmp(&wa)
            .then(b.activation.total_cmp(&a.activation))
            .then(a.span.cmp(&b.span))
    });
    partial.truncate(5);

    ParseOutcome {
        trees,
        cycles: state.cycle,
        stop,
        partial,
        trace: state.trace,
    }
}

#[cfg(test)]
mod tests;
