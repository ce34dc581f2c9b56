use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::path::NodePath;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeState {
    /// Created, not explored yet.
    White,
    /// Explored.
    Blue,
    /// Pruned without exploration.
    Black,
    /// Solution.
    Green,
    /// Failure.
    Red,
}

impl NodeState {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeState::White => "white",
            NodeState::Blue => "blue",
            NodeState::Black => "black",
            NodeState::Green => "green",
            NodeState::Red => "red",
        }
    }

    /// Legal recolorings: white to blue or black, blue to green or red.
    pub fn can_become(self, next: NodeState) -> bool {
        use NodeState::*;
        matches!(
            (self, next),
            (White, Blue) | (White, Black) | (Blue, Green) | (Blue, Red)
        ) || self == next
    }
}

impl fmt::Display for NodeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub path: NodePath,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub state: NodeState,
    /// `variable = value` of the choice leading here; empty at the root.
    pub label: String,
    pub visit_order: Option<u64>,
}

/// The shape of a finished (or paused) search, indexed by node id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchTree {
    pub nodes: Vec<TreeNode>,
    index: HashMap<NodePath, usize>,
}

impl SearchTree {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a node; its parent must already be present.
    pub fn add(&mut self, path: NodePath, label: String) -> usize {
        let id = self.nodes.len();
        let parent = path.parent().map(|p| self.index[&p]);
        if let Some(p) = parent {
            self.nodes[p].children.push(id);
        }
        self.index.insert(path.clone(), id);
        self.nodes.push(TreeNode {
            path,
            parent,
            children: Vec::new(),
            state: NodeState::White,
            label,
            visit_order: None,
        });
        id
    }

    pub fn get(&self, path: &NodePath) -> Option<&TreeNode> {
        self.index.get(path).map(|&i| &self.nodes[i])
    }

    pub fn id_of(&self, path: &NodePath) -> Option<usize> {
        self.index.get(path).copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn count(&self, state: NodeState) -> usize {
        self.nodes.iter().filter(|n| n.state == state).count()
    }

    pub fn paths(&self) -> std::collections::BTreeSet<NodePath> {
        self.nodes.iter().map(|n| n.path.clone()).collect()
    }

    /// Node ids of the subtree rooted at `id`, including `id`.
    pub fn subtree(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut todo = vec![id];
        while let Some(n) = todo.pop() {
            out.push(n);
            todo.extend(self.nodes[n].children.iter().rev());
        }
        out
    }

    pub fn contains_solution(&self, id: usize) -> bool {
        self.subtree(id)
            .into_iter()
            .any(|n| self.nodes[n].state == NodeState::Green)
    }

    pub fn max_depth(&self) -> usize {
        self.nodes.iter().map(|n| n.path.depth()).max().unwrap_or(0)
    }

    /// Right children of binary nodes that were expanded into a subtree.
    pub fn right_subtree_report(&self) -> Vec<RightSubtree> {
        let mut out: Vec<RightSubtree> = self
            .nodes
            .iter()
            .filter(|n| n.children.len() == 2)
            .map(|n| n.children[1])
            .filter(|&c| !self.nodes[c].children.is_empty())
            .map(|c| RightSubtree {
                path: self.nodes[c].path.clone(),
                depth: self.nodes[c].path.depth(),
                contains_solution: self.contains_solution(c),
                size: self.subtree(c).len(),
            })
            .collect();
        out.sort_by(|a, b| a.depth.cmp(&b.depth).then_with(|| a.path.cmp(&b.path)));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RightSubtree {
    pub path: NodePath,
    pub depth: usize,
    pub contains_solution: bool,
    /// Number of nodes in the subtree.
    pub size: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u32]) -> NodePath {
        NodePath(v.to_vec())
    }

    #[test]
    fn left_biased_tree_has_no_right_subtrees() {
        let mut t = SearchTree::new();
        t.add(p(&[]), String::new());
        t.add(p(&[0]), "x = 1".into());
        t.add(p(&[1]), "x != 1".into());
        t.add(p(&[0, 0]), "y = 1".into());
        t.add(p(&[0, 1]), "y != 1".into());
        assert!(t.right_subtree_report().is_empty());
    }

    #[test]
    fn expanded_right_child_of_root_is_reported() {
        let mut t = SearchTree::new();
        t.add(p(&[]), String::new());
        t.add(p(&[0]), String::new());
        t.add(p(&[1]), String::new());
        t.add(p(&[1, 0]), String::new());
        let g = t.add(p(&[1, 1]), String::new());
        t.nodes[g].state = NodeState::Green;
        let r = t.right_subtree_report();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].depth, 1);
        assert!(r[0].contains_solution);
        assert_eq!(r[0].size, 3);
    }

    #[test]
    fn state_transitions() {
        use NodeState::*;
        assert!(White.can_become(Blue));
        assert!(White.can_become(Black));
        assert!(Blue.can_become(Red));
        assert!(!Green.can_become(White));
        assert!(!Black.can_become(Blue));
    }
}
