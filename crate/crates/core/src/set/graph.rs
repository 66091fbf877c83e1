use crate::error::{Error, Result};
use crate::field::Elem;

use super::{FSet, SetOp};

/// An explicit bipartite graph `G ⊆ A × B`, stored as sorted, deduplicated
/// index pairs into `left` and `right`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairGraph {
    left: FSet,
    right: FSet,
    edges: Vec<(usize, usize)>,
}

impl PairGraph {
    pub fn new(left: FSet, right: FSet, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        left.same_ctx(&right)?;
        let mut edges: Vec<(usize, usize)> = edges.into_iter().collect();
        for &(i, j) in &edges {
            if i >= left.len() || j >= right.len() {
                return Err(Error::EdgeOutOfRange(i, j));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(PairGraph { left, right, edges })
    }

    pub fn complete(left: FSet, right: FSet) -> Result<Self> {
        let (n, m) = (left.len(), right.len());
        Self::new(left, right, (0..n).flat_map(|i| (0..m).map(move |j| (i, j))))
    }

    pub fn empty(left: FSet, right: FSet) -> Result<Self> {
        Self::new(left, right, std::iter::empty())
    }

    /// Edges given by element pairs rather than indices.
    pub fn from_pairs<'a>(
        left: FSet,
        right: FSet,
        pairs: impl IntoIterator<Item = (&'a Elem, &'a Elem)>,
    ) -> Result<Self> {
        let mut edges = Vec::new();
        for (a, b) in pairs {
            let i = left.index_of(a).ok_or_else(|| Error::InvalidArgument(format!("{a} is not a left vertex")))?;
            let j = right.index_of(b).ok_or_else(|| Error::InvalidArgument(format!("{b} is not a right vertex")))?;
            edges.push((i, j));
        }
        Self::new(left, right, edges)
    }

    pub fn left(&self) -> &FSet {
        &self.left
    }

    pub fn right(&self) -> &FSet {
        &self.right
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_edge(&self, i: usize, j: usize) -> bool {
        self.edges.binary_search(&(i, j)).is_ok()
    }

    pub fn edge_elems(&self) -> impl Iterator<Item = (&Elem, &Elem)> + '_ {
        self.edges.iter().map(|&(i, j)| (&self.left.elements()[i], &self.right.elements()[j]))
    }

    /// Right neighbours of left vertex `i`, ascending.
    pub fn left_neighbors(&self, i: usize) -> &[(usize, usize)] {
        let lo = self.edges.partition_point(|&(a, _)| a < i);
        let hi = self.edges.partition_point(|&(a, _)| a <= i);
        &self.edges[lo..hi]
    }

    pub fn degree_left(&self, i: usize) -> usize {
        self.left_neighbors(i).len()
    }

    pub fn degree_right(&self, j: usize) -> usize {
        self.edges.iter().filter(|&&(_, b)| b == j).count()
    }

    pub fn degrees_left(&self) -> Vec<usize> {
        let mut d = vec![0; self.left.len()];
        for &(i, _) in &self.edges {
            d[i] += 1;
        }
        d
    }

    pub fn degrees_right(&self) -> Vec<usize> {
        let mut d = vec![0; self.right.len()];
        for &(_, j) in &self.edges {
            d[j] += 1;
        }
        d
    }

    /// `A ⊕_G B` for the chosen operation, over edges only.
    pub fn partial_combine(&self, op: SetOp) -> Result<FSet> {
        let ctx = self.left.ctx();
        let mut out = Vec::with_capacity(self.edges.len());
        for (a, b) in self.edge_elems() {
            let v = match op {
                SetOp::Sum => ctx.add_unchecked(a, b),
                SetOp::Diff => ctx.sub_unchecked(a, b),
                SetOp::Prod => ctx.mul_unchecked(a, b),
                SetOp::Ratio => ctx.div_unchecked(a, b)?,
            };
            out.push(v);
        }
        Ok(FSet::canonical(ctx.clone(), out))
    }

    /// The subgraph induced on a subset of the left vertices (given as a set
    /// of elements). Indices are renumbered against the new left set.
    pub fn restrict_left(&self, keep: &FSet) -> Result<PairGraph> {
        let mut edges = Vec::new();
        for &(i, j) in &self.edges {
            if let Some(k) = keep.index_of(&self.left.elements()[i]) {
                edges.push((k, j));
            }
        }
        PairGraph::new(keep.clone(), self.right.clone(), edges)
    }

    /// The graph with left and right swapped.
    pub fn transpose(&self) -> PairGraph {
        let mut edges: Vec<(usize, usize)> = self.edges.iter().map(|&(i, j)| (j, i)).collect();
        edges.sort_unstable();
        PairGraph { left: self.right.clone(), right: self.left.clone(), edges }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;

    fn fp(v: &[i64]) -> FSet {
        FSet::from_i64s(&FieldCtx::prime(7).unwrap(), v)
    }

    #[test]
    fn degrees_and_counts() {
        let g = PairGraph::new(fp(&[1, 2]), fp(&[3, 4, 5]), [(0, 0), (0, 2), (1, 1), (0, 0)]).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.degree_left(0), 2);
        assert_eq!(g.degree_left(1), 1);
        assert_eq!(g.degrees_right(), vec![1, 1, 1]);
        assert_eq!(g.degrees_left().iter().sum::<usize>(), g.edge_count());
        assert_eq!(PairGraph::new(fp(&[1]), fp(&[2]), [(0, 1)]), Err(Error::EdgeOutOfRange(0, 1)));
    }

    #[test]
    fn partial_combine_examples() {
        let (a, b) = (fp(&[1, 2]), fp(&[3, 4]));
        let full = PairGraph::complete(a.clone(), b.clone()).unwrap();
        for op in [SetOp::Sum, SetOp::Diff, SetOp::Prod, SetOp::Ratio] {
            assert_eq!(full.partial_combine(op).unwrap(), a.combine(&b, op).unwrap());
        }
        let none = PairGraph::empty(a.clone(), b.clone()).unwrap();
        assert!(none.partial_combine(SetOp::Sum).unwrap().is_empty());

        let g = PairGraph::new(a, b, [(0, 0), (1, 1)]).unwrap();
        assert_eq!(g.partial_combine(SetOp::Diff).unwrap(), fp(&[5]));
    }

    #[test]
    fn ratio_over_zero_edge_fails() {
        let g = PairGraph::complete(fp(&[1]), fp(&[0, 1])).unwrap();
        assert_eq!(g.partial_combine(SetOp::Ratio), Err(Error::DivisionByZero));
    }

    #[test]
    fn restriction_and_transpose() {
        let g = PairGraph::complete(fp(&[1, 2, 3]), fp(&[4, 5])).unwrap();
        let r = g.restrict_left(&fp(&[2, 3])).unwrap();
        assert_eq!(r.edge_count(), 4);
        let t = g.transpose();
        assert_eq!(t.degrees_left(), vec![3, 3]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn partial_is_subset_of_full(
                edges in proptest::collection::vec((0usize..5, 0usize..4), 0..20),
            ) {
                let (a, b) = (fp(&[1, 2, 3, 4, 5]), fp(&[1, 2, 3, 6]));
                let g = PairGraph::new(a.clone(), b.clone(), edges).unwrap();
                for op in [SetOp::Sum, SetOp::Diff, SetOp::Prod, SetOp::Ratio] {
                    let part = g.partial_combine(op).unwrap();
                    prop_assert!(part.is_subset(&a.combine(&b, op).unwrap()));
                }
                prop_assert_eq!(g.degrees_left().iter().sum::<usize>(), g.edge_count());
            }
        }
    }
}
