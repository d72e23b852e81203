//! Small shared helpers.

use std::collections::HashSet;
use std::hash::Hash;

/// Closure of a finite set of generators under an associative product.
///
/// Breadth-first: multiplies every discovered element by every generator
/// until nothing new appears. Returns the elements in discovery order,
/// starting with `identity`. Intended for small groups (a few thousand
/// elements); panics are left to the caller's product function.
pub(crate) fn closure_by<T, F>(identity: T, generators: &[T], mut product: F) -> Vec<T>
where
    T: Clone + Eq + Hash,
    F: FnMut(&T, &T) -> T,
{
    let mut seen: HashSet<T> = HashSet::new();
    let mut elements = Vec::new();
    let mut frontier = vec![identity.clone()];
    seen.insert(identity);
    while let Some(x) = frontier.pop() {
        elements.push(x.clone());
        for g in generators {
            let y = product(&x, g);
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    elements
}

/// Union-find over `0..n`, used for clustering and component counts.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    pub fn component_count(&mut self) -> usize {
        let n = self.parent.len();
        (0..n).filter(|&x| self.find(x) == x).count()
    }
}
