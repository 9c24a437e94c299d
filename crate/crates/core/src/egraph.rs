//! The e-graph: hash-consed e-nodes, a union-find over e-class ids,
//! congruence-closure rebuilding, and per-class interval data maintained by
//! the analysis in [`crate::analysis`].
//!
//! Merges are deferred: `merge` records dirty classes and `rebuild` restores
//! the hashcons invariant in batch, cascading congruent merges. Class ids are
//! never reused; canonicalization is explicit via `find`.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::expr::{Expr, InputBox, OpKind};
use crate::interval::Interval;

/// An e-class id. Stable under rebuilds; canonical form via [`EGraph::find`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EClassId(pub(crate) u32);

impl std::fmt::Display for EClassId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "c{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ENode {
    Var(String),
    Const(String),
    Op(OpKind, Vec<EClassId>),
}

impl ENode {
    pub fn children(&self) -> &[EClassId] {
        match self {
            ENode::Var(_) | ENode::Const(_) => &[],
            ENode::Op(_, ch) => ch,
        }
    }

    pub fn op(&self) -> Option<OpKind> {
        match self {
            ENode::Op(op, _) => Some(*op),
            _ => None,
        }
    }

    fn canonicalize(&self, g: &EGraph) -> ENode {
        match self {
            ENode::Var(_) | ENode::Const(_) => self.clone(),
            ENode::Op(op, ch) => ENode::Op(*op, ch.iter().map(|&c| g.find(c)).collect()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            ENode::Var(v) => v.clone(),
            ENode::Const(c) => c.clone(),
            ENode::Op(OpKind::Pow(n), _) => format!("pow {n}"),
            ENode::Op(op, _) => op.symbol().to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct EClass {
    pub(crate) nodes: Vec<ENode>,
    pub(crate) parents: Vec<(ENode, EClassId)>,
    pub(crate) data: Interval,
    pub(crate) update_count: u32,
}

/// Deterministic queue shuffling for the propagation-order tests.
pub(crate) struct SplitMix64(pub u64);

impl SplitMix64 {
    pub(crate) fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
}

pub struct EGraph {
    uf: Vec<u32>,
    pub(crate) classes: Vec<Option<EClass>>,
    memo: HashMap<ENode, EClassId>,
    dirty: Vec<EClassId>,
    input_box: InputBox,
    pub(crate) update_cap: u32,
    pub(crate) queue: VecDeque<EClassId>,
    pub(crate) in_queue: HashSet<EClassId>,
    pub(crate) trace: Option<Vec<(EClassId, Interval)>>,
    pub(crate) shuffle: Option<SplitMix64>,
}

impl EGraph {
    pub fn new(input_box: InputBox, update_cap: u32) -> Self {
        assert!(update_cap > 0, "update cap must be positive");
        EGraph {
            uf: Vec::new(),
            classes: Vec::new(),
            memo: HashMap::new(),
            dirty: Vec::new(),
            input_box,
            update_cap,
            queue: VecDeque::new(),
            in_queue: HashSet::new(),
            trace: None,
            shuffle: None,
        }
    }

    pub fn with_defaults(input_box: InputBox) -> Self {
        EGraph::new(input_box, 1000)
    }

    pub fn input_box(&self) -> &InputBox {
        &self.input_box
    }

    /// Canonical representative of `id`.
    pub fn find(&self, id: EClassId) -> EClassId {
        let mut cur = id.0;
        while self.uf[cur as usize] != cur {
            cur = self.uf[cur as usize];
        }
        EClassId(cur)
    }

    pub(crate) fn class(&self, id: EClassId) -> &EClass {
        let id = self.find(id);
        self.classes[id.0 as usize].as_ref().expect("canonical class is live")
    }

    pub(crate) fn class_mut(&mut self, id: EClassId) -> &mut EClass {
        let id = self.find(id);
        self.classes[id.0 as usize].as_mut().expect("canonical class is live")
    }

    /// Canonical class ids, ascending. The iteration order is deterministic.
    pub fn classes(&self) -> impl Iterator<Item = EClassId> + '_ {
        self.classes
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.as_ref().map(|_| EClassId(i as u32)))
    }

    pub fn number_of_classes(&self) -> usize {
        self.classes.iter().filter(|c| c.is_some()).count()
    }

    /// Number of distinct e-nodes (the hashcons size).
    pub fn node_count(&self) -> usize {
        self.memo.len()
    }

    pub fn nodes(&self, id: EClassId) -> &[ENode] {
        &self.class(id).nodes
    }

    /// Looks up a node without inserting; children are canonicalized first.
    pub fn lookup(&self, n: &ENode) -> Option<EClassId> {
        let n = n.canonicalize(self);
        self.memo.get(&n).map(|&id| self.find(id))
    }

    /// Adds an e-node, returning the existing class on a hashcons hit or a
    /// fresh singleton class otherwise. Fresh classes start at top and are
    /// immediately refined by the analysis `make`.
    pub fn add(&mut self, n: ENode) -> Result<EClassId> {
        if let ENode::Op(op, ch) = &n {
            assert_eq!(ch.len(), op.arity(), "arity mismatch adding {}", op);
        }
        let n = n.canonicalize(self);
        if let Some(&id) = self.memo.get(&n) {
            return Ok(self.find(id));
        }
        let data = self.make(&n)?;
        let id = EClassId(self.uf.len() as u32);
        if data.is_empty() {
            return Err(Error::Contradiction {
                class: id,
                existing: crate::interval::TOP,
                incoming: data,
                during: format!("adding node `{}`", n.label()),
            });
        }
        self.uf.push(id.0);
        self.classes.push(Some(EClass {
            nodes: vec![n.clone()],
            parents: Vec::new(),
            data,
            update_count: 0,
        }));
        for &c in n.children() {
            self.class_mut(c).parents.push((n.clone(), id));
        }
        self.memo.insert(n, id);
        Ok(id)
    }

    /// Adds an expression bottom-up and returns its root class.
    pub fn add_expr(&mut self, e: &Expr) -> Result<EClassId> {
        match e {
            Expr::Var(v) => self.add(ENode::Var(v.clone())),
            Expr::Const(c) => self.add(ENode::Const(c.clone())),
            Expr::Op(op, children) => {
                let ids = children
                    .iter()
                    .map(|c| self.add_expr(c))
                    .collect::<Result<Vec<_>>>()?;
                self.add(ENode::Op(*op, ids))
            }
        }
    }

    /// Unifies two classes. The union's interval is the meet of both sides;
    /// an empty meet is a contradiction. Returns the canonical id and whether
    /// the partition changed.
    pub fn merge(&mut self, a: EClassId, b: EClassId) -> Result<(EClassId, bool)> {
        let a = self.find(a);
        let b = self.find(b);
        if a == b {
            return Ok((a, false));
        }
        let da = self.class(a).data;
        let db = self.class(b).data;
        let new_data = da.meet(db);
        if new_data.is_empty() {
            return Err(Error::Contradiction {
                class: a,
                existing: da,
                incoming: db,
                during: format!("merging {a} with {b}"),
            });
        }

        // union by parent-list size, ties toward the smaller id
        let (winner, loser) = {
            let pa = self.class(a).parents.len();
            let pb = self.class(b).parents.len();
            if pa > pb || (pa == pb && a < b) {
                (a, b)
            } else {
                (b, a)
            }
        };
        self.uf[loser.0 as usize] = winner.0;
        let loser_class = self.classes[loser.0 as usize].take().expect("loser class live");
        let data_changed = new_data != da || new_data != db;
        {
            let w = self.classes[winner.0 as usize].as_mut().expect("winner class live");
            w.nodes.extend(loser_class.nodes);
            w.parents.extend(loser_class.parents);
            w.update_count = w.update_count.max(loser_class.update_count);
            w.data = new_data;
        }
        self.dirty.push(winner);
        if data_changed {
            // parents of both sides read the narrowed data
            let parents: Vec<EClassId> =
                self.class(winner).parents.iter().map(|(_, p)| *p).collect();
            for p in parents {
                self.enqueue(p);
            }
            self.enqueue(winner);
        }
        Ok((winner, true))
    }

    /// Restores the hashcons invariant after merges: nodes made congruent by
    /// prior unions are merged, cascading until stable. Touched classes are
    /// seeded into the analysis workqueue.
    pub fn rebuild(&mut self) -> Result<()> {
        let mut touched: HashSet<EClassId> = HashSet::new();
        while !self.dirty.is_empty() {
            let todo: Vec<EClassId> = self.dirty.drain(..).collect();
            for id in todo {
                let id = self.find(id);
                touched.insert(id);
                self.repair_parents(id)?;
            }
        }
        // dedup node lists of everything touched (post-merge canonical form)
        let touched: Vec<EClassId> = {
            let mut v: Vec<EClassId> = touched.into_iter().map(|c| self.find(c)).collect();
            v.sort();
            v.dedup();
            v
        };
        for id in touched {
            let id = self.find(id);
            let nodes = std::mem::take(&mut self.class_mut(id).nodes);
            let mut seen = HashSet::new();
            let mut deduped = Vec::with_capacity(nodes.len());
            for n in nodes {
                let n = n.canonicalize(self);
                if seen.insert(n.clone()) {
                    deduped.push(n);
                }
            }
            self.class_mut(id).nodes = deduped;
            self.enqueue(id);
        }
        Ok(())
    }

    fn repair_parents(&mut self, id: EClassId) -> Result<()> {
        let parents = std::mem::take(&mut self.class_mut(id).parents);
        let mut new_parents: Vec<(ENode, EClassId)> = Vec::with_capacity(parents.len());
        let mut seen: HashSet<ENode> = HashSet::new();
        for (pnode, pclass) in parents {
            self.memo.remove(&pnode);
            let canon = pnode.canonicalize(self);
            let mut pclass = self.find(pclass);
            if let Some(&other) = self.memo.get(&canon) {
                let other = self.find(other);
                if other != pclass {
                    let (merged, _) = self.merge(other, pclass)?;
                    pclass = merged;
                }
            }
            self.memo.insert(canon.clone(), pclass);
            if seen.insert(canon.clone()) {
                new_parents.push((canon, pclass));
            }
        }
        // the class may have been merged away while repairing; append to the
        // current canonical representative
        let id = self.find(id);
        self.class_mut(id).parents.extend(new_parents);
        Ok(())
    }

    pub(crate) fn enqueue(&mut self, id: EClassId) {
        let id = self.find(id);
        if self.in_queue.insert(id) {
            self.queue.push_back(id);
        }
    }

    /// Display extraction: a smallest expression (by node count) represented
    /// by `id`. Plumbing for debug output, not a cost-based extractor.
    pub fn extract_smallest(&self, id: EClassId) -> Option<Expr> {
        let mut best: HashMap<EClassId, (usize, ENode)> = HashMap::new();
        let mut changed = true;
        while changed {
            changed = false;
            for cid in self.classes() {
                for n in self.nodes(cid).to_vec() {
                    let mut cost = 1usize;
                    let mut known = true;
                    for &c in n.children() {
                        match best.get(&self.find(c)) {
                            Some((k, _)) => cost += k,
                            None => {
                                known = false;
                                break;
                            }
                        }
                    }
                    if !known {
                        continue;
                    }
                    let cur = best.get(&cid).map(|(k, _)| *k).unwrap_or(usize::MAX);
                    if cost < cur {
                        best.insert(cid, (cost, n));
                        changed = true;
                    }
                }
            }
        }
        fn build(
            g: &EGraph,
            best: &HashMap<EClassId, (usize, ENode)>,
            id: EClassId,
        ) -> Option<Expr> {
            let (_, n) = best.get(&g.find(id))?;
            Some(match n {
                ENode::Var(v) => Expr::Var(v.clone()),
                ENode::Const(c) => Expr::Const(c.clone()),
                ENode::Op(op, ch) => {
                    let children = ch
                        .iter()
                        .map(|&c| build(g, best, c))
                        .collect::<Option<Vec<_>>>()?;
                    Expr::Op(*op, children)
                }
            })
        }
        build(self, &best, self.find(id))
    }

    /// GraphViz DOT dump with one cluster per class, annotated with its
    /// interval.
    pub fn to_dot(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "digraph egraph {{");
        let _ = writeln!(s, "  compound=true;");
        let _ = writeln!(s, "  node [shape=box];");
        for id in self.classes() {
            let class = self.class(id);
            let _ = writeln!(s, "  subgraph cluster_{} {{", id.0);
            let _ = writeln!(s, "    label=\"{} {}\";", id, class.data);
            let _ = writeln!(s, "    style=dashed;");
            for (i, n) in class.nodes.iter().enumerate() {
                let _ = writeln!(s, "    n{}_{} [label=\"{}\"];", id.0, i, n.label());
            }
            let _ = writeln!(s, "  }}");
        }
        for id in self.classes() {
            let class = self.class(id);
            for (i, n) in class.nodes.iter().enumerate() {
                for (k, &c) in n.children().iter().enumerate() {
                    let c = self.find(c);
                    let _ = writeln!(
                        s,
                        "  n{}_{} -> n{}_0 [lhead=cluster_{}, label=\"{}\"];",
                        id.0, i, c.0, c.0, k
                    );
                }
            }
        }
        let _ = writeln!(s, "}}");
        s
    }
}
