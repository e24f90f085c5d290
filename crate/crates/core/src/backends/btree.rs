//! B+-tree whose internal nodes carry subtree element counts.
//!
//! Elements live only in the bottom nodes. Every internal node `t` stores
//! `C(t)`, the number of elements below it, and the largest element of each
//! child. The counts make a uniform random draw a single root-to-bottom
//! descent: at each node pick `i` uniformly in `1..=C(t_1)+...+C(t_c)` and
//! follow the child whose interval contains `i`.

use rand::{Rng, RngCore};

use crate::error::{invalid, CoverError, Result};
use crate::oracle::{BackendKind, Element, SetBackend};

pub const DEFAULT_ORDER: usize = 16;

#[derive(Clone, Debug)]
enum Node {
    Leaf(Vec<Element>),
    Internal(Internal),
}

#[derive(Clone, Debug)]
struct Internal {
    count: u64,
    max_keys: Vec<Element>,
    children: Vec<Node>,
}

impl Node {
    fn count(&self) -> u64 {
        match self {
            Node::Leaf(keys) => keys.len() as u64,
            Node::Internal(n) => n.count,
        }
    }

    fn max(&self) -> Option<Element> {
        match self {
            Node::Leaf(keys) => keys.last().copied(),
            Node::Internal(n) => n.max_keys.last().copied(),
        }
    }

    fn entries(&self) -> usize {
        match self {
            Node::Leaf(keys) => keys.len(),
            Node::Internal(n) => n.children.len(),
        }
    }
}

impl Internal {
    fn from_children(children: Vec<Node>) -> Internal {
        let count = children.iter().map(Node::count).sum();
        let max_keys = children.iter().map(|c| c.max().expect("nonempty child")).collect();
        Internal {
            count,
            max_keys,
            children,
        }
    }

    fn child_for(&self, x: Element) -> usize {
        self.max_keys.partition_point(|m| *m < x)
    }

    fn refresh_max(&mut self, idx: usize) {
        self.max_keys[idx] = self.children[idx].max().expect("nonempty child");
    }
}

/// Dynamic set backed by a counted B+-tree of the given order (maximum
/// fan-out, also the maximum bottom-node size).
#[derive(Clone, Debug)]
pub struct CountedBTree {
    root: Node,
    order: usize,
}

impl Default for CountedBTree {
    fn default() -> Self {
        CountedBTree::new()
    }
}

impl CountedBTree {
    pub fn new() -> Self {
        CountedBTree {
            root: Node::Leaf(Vec::new()),
            order: DEFAULT_ORDER,
        }
    }

    pub fn with_order(order: usize) -> Result<Self> {
        if order < 3 {
            return Err(invalid("order", format!("{order} is below the minimum of 3")));
        }
        Ok(CountedBTree {
            root: Node::Leaf(Vec::new()),
            order,
        })
    }

    pub fn from_values(values: impl IntoIterator<Item = u64>) -> Self {
        let mut t = CountedBTree::new();
        for v in values {
            t.insert(Element(v));
        }
        t
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> u64 {
        self.root.count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn min_entries(&self) -> usize {
        self.order.div_ceil(2)
    }

    /// Inserts `x`; returns false if it was already present.
    pub fn insert(&mut self, x: Element) -> bool {
        let order = self.order;
        let (inserted, split) = insert_rec(&mut self.root, x, order);
        if let Some(right) = split {
            let left = std::mem::replace(&mut self.root, Node::Leaf(Vec::new()));
            self.root = Node::Internal(Internal::from_children(vec![left, right]));
        }
        inserted
    }

    /// Removes `x`; returns false if it was absent.
    pub fn remove(&mut self, x: Element) -> bool {
        let min = self.min_entries();
        let removed = remove_rec(&mut self.root, x, min);
        loop {
            match &mut self.root {
                Node::Internal(n) if n.children.len() == 1 => {
                    let only = n.children.pop().expect("one child");
                    self.root = only;
                }
                _ => break,
            }
        }
        removed
    }

    pub fn contains(&self, x: Element) -> bool {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf(keys) => return keys.binary_search(&x).is_ok(),
                Node::Internal(n) => {
                    let idx = n.child_for(x);
                    if idx == n.children.len() {
                        return false;
                    }
                    node = &n.children[idx];
                }
            }
        }
    }

    /// The element of 0-based rank `rank` in ascending order.
    pub fn select(&self, mut rank: u64) -> Option<Element> {
        if rank >= self.len() {
            return None;
        }
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf(keys) => return keys.get(rank as usize).copied(),
                Node::Internal(n) => {
                    let mut next = None;
                    for c in &n.children {
                        if rank < c.count() {
                            next = Some(c);
                            break;
                        }
                        rank -= c.count();
                    }
                    node = next?;
                }
            }
        }
    }

    /// Uniform random element by interval descent. Returns the element and
    /// the number of nodes visited.
    pub fn rand_with_path(&self, rng: &mut dyn RngCore) -> Result<(Element, usize)> {
        if self.is_empty() {
            return Err(CoverError::EmptySet);
        }
        let mut node = &self.root;
        let mut visited = 1;
        loop {
            match node {
                Node::Leaf(keys) => {
                    let i = rng.gen_range(0..keys.len());
                    return Ok((keys[i], visited));
                }
                Node::Internal(n) => {
                    let total: u64 = n.children.iter().map(Node::count).sum();
                    let mut i = rng.gen_range(1..=total);
                    let mut chosen = n.children.len() - 1;
                    for (j, c) in n.children.iter().enumerate() {
                        if i <= c.count() {
                            chosen = j;
                            break;
                        }
                        i -= c.count();
                    }
                    node = &n.children[chosen];
                    visited += 1;
                }
            }
        }
    }

    pub fn rand(&self, rng: &mut dyn RngCore) -> Result<Element> {
        self.rand_with_path(rng).map(|(x, _)| x)
    }

    /// Number of node levels from the root to the bottom nodes.
    pub fn height(&self) -> usize {
        let mut h = 1;
        let mut node = &self.root;
        while let Node::Internal(n) = node {
            h += 1;
            node = &n.children[0];
        }
        h
    }

    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        let mut out = Vec::with_capacity(self.len() as usize);
        collect(&self.root, &mut out);
        out.into_iter()
    }

    /// Exact probability that [`rand`](Self::rand) returns each element, as
    /// `(element, numerator, denominator)`, obtained by multiplying the
    /// interval fractions along each root-to-element path.
    pub fn exact_draw_distribution(&self) -> Vec<(Element, u128, u128)> {
        let mut out = Vec::new();
        distribution(&self.root, 1, 1, &mut out);
        out
    }

    /// Checks ordering, balance, node-size bounds, child max keys and that
    /// every stored `C(t)` equals the bottom-up recount.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let mut depth = None;
        check_node(&self.root, true, self.order, self.min_entries(), 1, &mut depth)?;
        let items: Vec<Element> = self.iter().collect();
        if items.windows(2).any(|w| w[0] >= w[1]) {
            return Err("in-order traversal is not strictly increasing".into());
        }
        Ok(())
    }
}

fn insert_rec(node: &mut Node, x: Element, order: usize) -> (bool, Option<Node>) {
    match node {
        Node::Leaf(keys) => match keys.binary_search(&x) {
            Ok(_) => (false, None),
            Err(pos) => {
                keys.insert(pos, x);
                if keys.len() > order {
                    let right = keys.split_off(keys.len() / 2);
                    (true, Some(Node::Leaf(right)))
                } else {
                    (true, None)
                }
            }
        },
        Node::Internal(n) => {
            let idx = n.child_for(x).min(n.children.len() - 1);
            let (inserted, split) = insert_rec(&mut n.children[idx], x, order);
            if !inserted {
                return (false, None);
            }
            n.count += 1;
            n.refresh_max(idx);
            if let Some(right) = split {
                n.max_keys.insert(idx + 1, right.max().expect("split half is nonempty"));
                n.children.insert(idx + 1, right);
            }
            if n.children.len() > order {
                let mid = n.children.len() / 2;
                let children = n.children.split_off(mid);
                n.max_keys.truncate(mid);
                let right = Internal::from_children(children);
                n.count -= right.count;
                (true, Some(Node::Internal(right)))
            } else {
                (true, None)
            }
        }
    }
}

fn remove_rec(node: &mut Node, x: Element, min: usize) -> bool {
    match node {
        Node::Leaf(keys) => match keys.binary_search(&x) {
            Ok(pos) => {
                keys.remove(pos);
                true
            }
            Err(_) => false,
        },
        Node::Internal(n) => {
            let idx = n.child_for(x);
            if idx == n.children.len() || !remove_rec(&mut n.children[idx], x, min) {
                return false;
            }
            n.count -= 1;
            if n.children[idx].entries() < min {
                rebalance(n, idx, min);
            } else {
                n.refresh_max(idx);
            }
            true
        }
    }
}

/// Restores the minimum fill of `parent.children[idx]` by borrowing from a
/// sibling or merging with one.
fn rebalance(parent: &mut Internal, idx: usize, min: usize) {
    let has_left = idx > 0;
    let has_right = idx + 1 < parent.children.len();
    if has_left && parent.children[idx - 1].entries() > min {
        let (l, r) = parent.children.split_at_mut(idx);
        move_last_to_front(&mut l[idx - 1], &mut r[0]);
        parent.refresh_max(idx - 1);
        parent.refresh_max(idx);
    } else if has_right && parent.children[idx + 1].entries() > min {
        let (l, r) = parent.children.split_at_mut(idx + 1);
        move_first_to_back(&mut r[0], &mut l[idx]);
        parent.refresh_max(idx);
        parent.refresh_max(idx + 1);
    } else if has_left {
        let child = parent.children.remove(idx);
        parent.max_keys.remove(idx);
        append(&mut parent.children[idx - 1], child);
        parent.refresh_max(idx - 1);
    } else if has_right {
        let right = parent.children.remove(idx + 1);
        parent.max_keys.remove(idx + 1);
        append(&mut parent.children[idx], right);
        parent.refresh_max(idx);
    } else {
        // Only child: the root collapse in `remove` deals with it.
        parent.refresh_max(idx);
    }
}

fn move_last_to_front(from: &mut Node, to: &mut Node) {
    match (from, to) {
        (Node::Leaf(a), Node::Leaf(b)) => {
            let k = a.pop().expect("donor has spare keys");
            b.insert(0, k);
        }
        (Node::Internal(a), Node::Internal(b)) => {
            let c = a.children.pop().expect("donor has spare children");
            let m = a.max_keys.pop().expect("max per child");
            a.count -= c.count();
            b.count += c.count();
            b.children.insert(0, c);
            b.max_keys.insert(0, m);
        }
        _ => unreachable!("siblings share a level"),
    }
}

fn move_first_to_back(from: &mut Node, to: &mut Node) {
    match (from, to) {
        (Node::Leaf(a), Node::Leaf(b)) => {
            let k = a.remove(0);
            b.push(k);
        }
        (Node::Internal(a), Node::Internal(b)) => {
            let c = a.children.remove(0);
            let m = a.max_keys.remove(0);
            a.count -= c.count();
            b.count += c.count();
            b.children.push(c);
            b.max_keys.push(m);
        }
        _ => unreachable!("siblings share a level"),
    }
}

fn append(into: &mut Node, from: Node) {
    match (into, from) {
        (Node::Leaf(a), Node::Leaf(mut b)) => a.append(&mut b),
        (Node::Internal(a), Node::Internal(mut b)) => {
            a.count += b.count;
            a.children.append(&mut b.children);
            a.max_keys.append(&mut b.max_keys);
        }
        _ => unreachable!("siblings share a level"),
    }
}

fn collect(node: &Node, out: &mut Vec<Element>) {
    match node {
        Node::Leaf(keys) => out.extend_from_slice(keys),
        Node::Internal(n) => n.children.iter().for_each(|c| collect(c, out)),
    }
}

fn distribution(node: &Node, num: u128, den: u128, out: &mut Vec<(Element, u128, u128)>) {
    match node {
        Node::Leaf(keys) => {
            for &k in keys {
                out.push((k, num, den * keys.len() as u128));
            }
        }
        Node::Internal(n) => {
            let total: u128 = n.children.iter().map(|c| c.count() as u128).sum();
            for c in &n.children {
                let (p, q) = reduce(num * c.count() as u128, den * total);
                distribution(c, p, q, out);
            }
        }
    }
}

fn reduce(p: u128, q: u128) -> (u128, u128) {
    let (mut a, mut b) = (p, q);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    p.checked_div(a).map_or((p, q), |r| (r, q / a))
}

fn check_node(
    node: &Node,
    is_root: bool,
    order: usize,
    min: usize,
    level: usize,
    leaf_depth: &mut Option<usize>,
) -> std::result::Result<u64, String> {
    let entries = node.entries();
    if entries > order {
        return Err(format!("node at level {level} has {entries} > {order} entries"));
    }
    if !is_root && entries < min {
        return Err(format!("node at level {level} has {entries} < {min} entries"));
    }
    match node {
        Node::Leaf(keys) => {
            match *leaf_depth {
                None => *leaf_depth = Some(level),
                Some(d) if d != level => {
                    return Err(format!("bottom nodes at depths {d} and {level}"));
                }
                _ => {}
            }
            Ok(keys.len() as u64)
        }
        Node::Internal(n) => {
            if is_root && n.children.len() < 2 {
                return Err("internal root with fewer than two children".into());
            }
            if n.max_keys.len() != n.children.len() {
                return Err("max key count differs from child count".into());
            }
            let mut total = 0;
            for (c, m) in n.children.iter().zip(&n.max_keys) {
                total += check_node(c, false, order, min, level + 1, leaf_depth)?;
                if c.max() != Some(*m) {
                    return Err(format!("stale max key {m} at level {level}"));
                }
            }
            if total != n.count {
                return Err(format!(
                    "stored count {} differs from recount {total} at level {level}",
                    n.count
                ));
            }
            Ok(total)
        }
    }
}

impl SetBackend for CountedBTree {
    fn cardinality(&self) -> u64 {
        self.len()
    }

    fn random_element(&self, rng: &mut dyn RngCore) -> Result<Element> {
        self.rand(rng)
    }

    fn contains(&self, x: Element) -> bool {
        CountedBTree::contains(self, x)
    }

    fn element_at(&self, index: u64) -> Option<Element> {
        self.select(index)
    }

    fn kind(&self) -> BackendKind {
        BackendKind::BTree
    }

    fn materialize(&self) -> Vec<Element> {
        self.iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    #[test]
    fn single_leaf_draw() {
        let t = CountedBTree::from_values([42]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10 {
            assert_eq!(t.rand(&mut rng).unwrap(), Element(42));
        }
    }

    #[test]
    fn empty_tree_draw_fails() {
        let t = CountedBTree::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(t.rand(&mut rng), Err(CoverError::EmptySet));
    }

    #[test]
    fn rejects_small_order() {
        assert!(CountedBTree::with_order(2).is_err());
        assert!(CountedBTree::with_order(3).is_ok());
    }

    #[test]
    fn insert_and_delete_bookkeeping() {
        let mut t = CountedBTree::from_values([1, 3]);
        assert!(t.insert(Element(5)));
        assert_eq!(t.len(), 3);
        assert!(!t.insert(Element(5)));
        assert_eq!(t.len(), 3);
        let mut t = CountedBTree::from_values([1, 3]);
        assert!(t.remove(Element(3)));
        assert_eq!(t.len(), 1);
        assert!(!t.remove(Element(3)));
    }

    #[test]
    fn every_draw_path_has_tree_height() {
        for order in [3, 4, 16] {
            let mut t = CountedBTree::with_order(order).unwrap();
            for v in 0..5000 {
                t.insert(Element(v * 7 % 5003));
            }
            t.check_invariants().unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(order as u64);
            let h = t.height();
            for _ in 0..500 {
                assert_eq!(t.rand_with_path(&mut rng).unwrap().1, h);
            }
            // height is logarithmic in the element count
            let bound = ((5000f64).ln() / ((order.div_ceil(2)) as f64).ln()).ceil() as usize + 1;
            assert!(h <= bound, "order {order}: height {h} > {bound}");
        }
    }

    #[test]
    fn exact_distribution_is_uniform() {
        let mut t = CountedBTree::with_order(3).unwrap();
        for v in [5, 1, 9, 3, 7, 2, 8, 4, 6, 10, 11] {
            t.insert(Element(v));
        }
        t.remove(Element(4));
        let m = t.len() as u128;
        let dist = t.exact_draw_distribution();
        assert_eq!(dist.len() as u128, m);
        for (_, p, q) in dist {
            assert_eq!(p * m, q);
        }
    }

    #[test]
    fn randomized_operations_match_reference_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for order in [3, 5, 16] {
            let mut t = CountedBTree::with_order(order).unwrap();
            let mut reference = BTreeSet::new();
            for step in 0..10_000 {
                let x = rng.gen_range(0..600u64);
                if rng.gen_bool(0.55) {
                    assert_eq!(t.insert(Element(x)), reference.insert(x));
                } else {
                    assert_eq!(t.remove(Element(x)), reference.remove(&x));
                }
                assert_eq!(t.len(), reference.len() as u64);
                let q = rng.gen_range(0..600u64);
                assert_eq!(t.contains(Element(q)), reference.contains(&q));
                if step % 500 == 0 {
                    t.check_invariants().unwrap();
                    let items: Vec<u64> = t.iter().map(|e| e.0).collect();
                    let expect: Vec<u64> = reference.iter().copied().collect();
                    assert_eq!(items, expect);
                }
            }
            t.check_invariants().unwrap();
        }
    }

    #[test]
    fn select_matches_sorted_order() {
        let t = CountedBTree::from_values((0..300).map(|v| v * 3));
        for r in 0..300 {
            assert_eq!(t.select(r), Some(Element(r * 3)));
        }
        assert_eq!(t.select(300), None);
    }

    #[test]
    fn delete_everything() {
        let mut t = CountedBTree::with_order(4).unwrap();
        for v in 0..1000 {
            t.insert(Element(v));
        }
        for v in (0..1000).rev().step_by(2).chain((0..1000).step_by(2)) {
            assert!(t.remove(Element(v)));
            t.check_invariants().unwrap();
        }
        assert!(t.is_empty());
    }
}
