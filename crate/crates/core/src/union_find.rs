//! Disjoint sets with per-component vertex and edge counts.

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    edges: Vec<u64>,
    largest: u32,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            edges: vec![0; n],
            largest: if n > 0 { 1 } else { 0 },
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    /// Adds the edge `{a, b}`; returns true when it merged two components.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            self.edges[ra as usize] += 1;
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        self.edges[ra as usize] += self.edges[rb as usize] + 1;
        self.largest = self.largest.max(self.size[ra as usize]);
        true
    }

    /// Vertex count of the largest component.
    pub fn largest(&self) -> u32 {
        self.largest
    }

    pub fn component_size(&mut self, x: u32) -> u32 {
        let r = self.find(x);
        self.size[r as usize]
    }

    /// `(vertices, edges)` for every component.
    pub fn components(&mut self) -> Vec<(u32, u64)> {
        (0..self.len() as u32)
            .filter(|&x| self.parent[x as usize] == x)
            .map(|r| (self.size[r as usize], self.edges[r as usize]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_vertices_and_edges() {
        let mut uf = UnionFind::new(6);
        assert!(uf.union(0, 1));
        assert!(uf.union(1, 2));
        assert!(!uf.union(0, 2));
        assert!(uf.union(3, 4));
        let mut c = uf.components();
        c.sort();
        assert_eq!(c, vec![(1, 0), (2, 1), (3, 3)]);
        assert_eq!(uf.largest(), 3);
        assert_eq!(uf.component_size(5), 1);
    }
}
