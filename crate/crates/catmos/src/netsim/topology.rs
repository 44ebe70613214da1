//! Tree topologies rooted at the base station.

use super::SimError;

/// Node 0 is the base station; every other node is a mote with a parent
/// link and a hop count to the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    parents: Vec<Option<u32>>,
    hops: Vec<u32>,
    children: Vec<Vec<u32>>,
}

impl Topology {
    /// Complete tree of the given branching factor: node i's parent is
    /// (i-1)/branching. The layout is fully determined by its parameters;
    /// the seed is accepted for signature stability with randomized
    /// layouts.
    pub fn balanced_tree(n_nodes: usize, branching: usize, _seed: u64) -> Result<Self, SimError> {
        if n_nodes == 0 {
            return Err(SimError::EmptyTopology);
        }
        if branching == 0 {
            return Err(SimError::InvalidBranching);
        }
        let mut parents = vec![None];
        let mut hops = vec![0u32];
        let mut children = vec![Vec::new(); n_nodes];
        for i in 1..n_nodes {
            let parent = ((i - 1) / branching) as u32;
            parents.push(Some(parent));
            hops.push(hops[parent as usize] + 1);
            children[parent as usize].push(i as u32);
        }
        Ok(Topology {
            parents,
            hops,
            children,
        })
    }

    pub fn node_count(&self) -> usize {
        self.parents.len()
    }

    /// Every node except the base station.
    pub fn motes(&self) -> impl Iterator<Item = u32> {
        1..self.node_count() as u32
    }

    pub fn parent(&self, node: u32) -> Option<u32> {
        self.parents[node as usize]
    }

    pub fn hops(&self, node: u32) -> u32 {
        self.hops[node as usize]
    }

    pub fn children(&self, node: u32) -> &[u32] {
        &self.children[node as usize]
    }

    pub fn is_leaf(&self, node: u32) -> bool {
        self.children[node as usize].is_empty()
    }

    /// Hop counts for all motes, in node order.
    pub fn mote_hops(&self) -> Vec<u32> {
        self.motes().map(|n| self.hops(n)).collect()
    }

    /// Motes ordered deepest-first, so children precede parents.
    pub fn aggregation_order(&self) -> Vec<u32> {
        let mut order: Vec<u32> = self.motes().collect();
        order.sort_by(|&a, &b| self.hops(b).cmp(&self.hops(a)).then(a.cmp(&b)));
        order
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_is_root_only() {
        let t = Topology::balanced_tree(1, 4, 7).unwrap();
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.hops(0), 0);
        assert_eq!(t.motes().count(), 0);
    }

    #[test]
    fn seven_node_binary_tree_depths() {
        let t = Topology::balanced_tree(7, 2, 0).unwrap();
        let mut depths: Vec<u32> = (0..7).map(|n| t.hops(n)).collect();
        depths.sort_unstable();
        assert_eq!(depths, vec![0, 1, 1, 2, 2, 2, 2]);
        assert_eq!(t.parent(0), None);
        assert_eq!(t.parent(5), Some(2));
    }

    #[test]
    fn same_parameters_give_identical_topology() {
        let a = Topology::balanced_tree(20, 2, 1);
        let b = Topology::balanced_tree(20, 2, 1);
        assert_eq!(a, b);
    }

    #[test]
    fn every_mote_reaches_the_root() {
        let t = Topology::balanced_tree(20, 3, 0).unwrap();
        for node in t.motes() {
            let mut cur = node;
            let mut steps = 0;
            while let Some(p) = t.parent(cur) {
                cur = p;
                steps += 1;
                assert!(steps <= 20, "cycle detected");
            }
            assert_eq!(cur, 0);
            assert_eq!(steps, t.hops(node));
        }
    }

    #[test]
    fn zero_nodes_is_an_error() {
        assert!(matches!(
            Topology::balanced_tree(0, 2, 0),
            Err(SimError::EmptyTopology)
        ));
    }

    #[test]
    fn line_topology_hops_are_sequential() {
        let t = Topology::balanced_tree(6, 1, 0).unwrap();
        let hops: Vec<u32> = t.motes().map(|n| t.hops(n)).collect();
        assert_eq!(hops, vec![1, 2, 3, 4, 5]);
    }
}
