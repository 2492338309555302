use crate::error::{Error, Result};

/// A rooted tree over dense node ids `0..node_count`.
///
/// Children keep the order in which they appear in the parent array, which
/// fixes the depth-first leaf order used for flat block numbering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    root: usize,
}

impl RootedTree {
    /// Builds a tree from a parent array where `-1` marks the root.
    pub fn from_parents(parents: &[i64]) -> Result<Self> {
        if parents.is_empty() {
            return Err(Error::InvalidTree("tree has no nodes".into()));
        }
        let n = parents.len();
        let mut parent = Vec::with_capacity(n);
        let mut root = None;
        for (i, &p) in parents.iter().enumerate() {
            if p == -1 {
                if let Some(r) = root {
                    return Err(Error::InvalidTree(format!(
                        "nodes {r} and {i} are both roots"
                    )));
                }
                root = Some(i);
                parent.push(None);
            } else if p < 0 || p as usize >= n {
                return Err(Error::InvalidTree(format!(
                    "node {i} has parent {p}, outside 0..{n}"
                )));
            } else if p as usize == i {
                return Err(Error::InvalidTree(format!("node {i} is its own parent")));
            } else {
                parent.push(Some(p as usize));
            }
        }
        let root = root.ok_or_else(|| Error::InvalidTree("no root (parent -1)".into()))?;

        let mut children = vec![Vec::new(); n];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(i);
            }
        }

        // Breadth-first from the root assigns depths; anything unreached sits on a cycle.
        let mut depth = vec![usize::MAX; n];
        depth[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &c in &children[u] {
                depth[c] = depth[u] + 1;
                queue.push_back(c);
            }
        }
        if let Some(bad) = depth.iter().position(|&d| d == usize::MAX) {
            return Err(Error::InvalidTree(format!(
                "node {bad} does not reach the root (cycle)"
            )));
        }

        Ok(RootedTree {
            parent,
            children,
            depth,
            root,
        })
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parent[node]
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    pub fn depth(&self, node: usize) -> usize {
        self.depth[node]
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        self.children[node].is_empty()
    }

    fn check(&self, node: usize) -> Result<()> {
        if node < self.node_count() {
            Ok(())
        } else {
            Err(Error::UnknownNode(node))
        }
    }

    /// Leaves in depth-first, left-to-right order.
    pub fn leaves(&self) -> Vec<usize> {
        self.leaves_under(self.root)
    }

    /// Leaves of the subtree rooted at `node`, depth-first left-to-right.
    pub fn leaves_under(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(u) = stack.pop() {
            if self.is_leaf(u) {
                out.push(u);
            } else {
                stack.extend(self.children[u].iter().rev());
            }
        }
        out
    }

    pub fn internal_nodes(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&u| !self.is_leaf(u)).collect()
    }

    pub fn nodes_at_depth(&self, depth: usize) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&u| self.depth[u] == depth)
            .collect()
    }

    /// True when `ancestor` lies on the path from `node` to the root (inclusive).
    pub fn is_ancestor(&self, ancestor: usize, node: usize) -> bool {
        let mut u = node;
        loop {
            if u == ancestor {
                return true;
            }
            match self.parent[u] {
                Some(p) => u = p,
                None => return false,
            }
        }
    }

    /// Ancestor of `node` at the given depth (`node` itself when depths match).
    pub fn ancestor_at_depth(&self, node: usize, depth: usize) -> Option<usize> {
        if self.depth[node] < depth {
            return None;
        }
        let mut u = node;
        while self.depth[u] > depth {
            u = self.parent[u].expect("non-root has a parent");
        }
        Some(u)
    }

    /// Lowest common ancestor: the deepest node that is an ancestor of both.
    pub fn lca(&self, a: usize, b: usize) -> Result<usize> {
        self.check(a)?;
        self.check(b)?;
        let (mut a, mut b) = (a, b);
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].unwrap();
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].unwrap();
        }
        while a != b {
            a = self.parent[a].unwrap();
            b = self.parent[b].unwrap();
        }
        Ok(a)
    }

    /// The two children of `lca(a, b)` on the paths toward `a` and toward `b`,
    /// returned in that order.
    pub fn lca_down(&self, a: usize, b: usize) -> Result<(usize, usize)> {
        let l = self.lca(a, b)?;
        if l == a || l == b {
            return Err(Error::Domain(format!(
                "lca_down({a}, {b}) undefined: one node is an ancestor of the other"
            )));
        }
        let da = self.depth[l] + 1;
        Ok((
            self.ancestor_at_depth(a, da).unwrap(),
            self.ancestor_at_depth(b, da).unwrap(),
        ))
    }

    /// Position of `child` among its parent's children.
    pub fn child_position(&self, child: usize) -> Option<usize> {
        let p = self.parent[child]?;
        self.children[p].iter().position(|&c| c == child)
    }

    /// Ordered shape signature of a subtree; equal strings mean equal shapes.
    pub fn shape(&self, node: usize) -> String {
        let mut s = String::new();
        self.write_shape(node, &mut s);
        s
    }

    fn write_shape(&self, node: usize, out: &mut String) {
        out.push('(');
        for &c in &self.children[node] {
            self.write_shape(c, out);
        }
        out.push(')');
    }

    /// Parent array in the file convention (`-1` for the root).
    pub fn to_parents(&self) -> Vec<i64> {
        self.parent
            .iter()
            .map(|p| p.map_or(-1, |p| p as i64))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Fig.-1 style depth-2 tree: green root, purple and orange below it,
    /// red/blue under purple, yellow under orange.
    fn colored() -> RootedTree {
        // 0 green, 1 purple, 2 orange, 3 red, 4 blue, 5 yellow
        RootedTree::from_parents(&[-1, 0, 0, 1, 1, 2]).unwrap()
    }

    #[test]
    fn lca_of_figure_tree() {
        let t = colored();
        assert_eq!(t.lca(3, 4).unwrap(), 1);
        assert_eq!(t.lca(5, 4).unwrap(), 0);
        assert_eq!(t.lca(2, 2).unwrap(), 2);
    }

    #[test]
    fn lca_down_of_figure_tree() {
        let t = colored();
        assert_eq!(t.lca_down(5, 4).unwrap(), (2, 1));
        assert_eq!(t.lca_down(3, 4).unwrap(), (3, 4));
        assert!(matches!(t.lca_down(3, 3), Err(Error::Domain(_))));
        assert!(matches!(t.lca_down(1, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn unknown_node() {
        assert!(matches!(colored().lca(0, 9), Err(Error::UnknownNode(9))));
    }

    #[test]
    fn rejects_malformed_parent_arrays() {
        assert!(RootedTree::from_parents(&[]).is_err());
        assert!(RootedTree::from_parents(&[-1, -1]).is_err());
        assert!(RootedTree::from_parents(&[0, 0]).is_err());
        assert!(RootedTree::from_parents(&[-1, 2, 1]).is_err());
        assert!(RootedTree::from_parents(&[-1, 5]).is_err());
    }

    #[test]
    fn leaves_depth_first() {
        // root 0 -> [1, 2]; 1 -> [4, 3]; 2 -> [5]
        let t = RootedTree::from_parents(&[-1, 0, 0, 1, 1, 2]).unwrap();
        assert_eq!(t.leaves(), vec![3, 4, 5]);
        let t = RootedTree::from_parents(&[-1, 0, 0, 2, 1]).unwrap();
        assert_eq!(t.leaves(), vec![4, 3]);
        assert_eq!(t.internal_nodes(), vec![0, 1, 2]);
    }

    #[test]
    fn shapes() {
        let t = RootedTree::from_parents(&[-1, 0, 0, 1, 1, 2, 2]).unwrap();
        assert_eq!(t.shape(1), t.shape(2));
        let t = RootedTree::from_parents(&[-1, 0, 0, 1, 1, 2]).unwrap();
        assert_ne!(t.shape(1), t.shape(2));
    }
}
