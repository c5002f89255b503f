use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationKind {
    /// Voronoi cells of the whole configuration intersect.
    Delaunay,
    /// Delaunay relation restricted to one edge or two edges sharing a vertex.
    #[serde(alias = "local")]
    LocalDelaunay,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("index {index} out of range for a relation on {len} points")]
pub struct IndexError {
    pub index: usize,
    pub len: usize,
}

/// Symmetric, reflexive relation on the points of a configuration, indexed
/// in the configuration's canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    kind: RelationKind,
    n: usize,
    adj: Vec<bool>,
}

impl Relation {
    pub fn identity(kind: RelationKind, n: usize) -> Self {
        let mut adj = vec![false; n * n];
        for i in 0..n {
            adj[i * n + i] = true;
        }
        Relation { kind, n, adj }
    }

    pub(crate) fn relate(&mut self, i: usize, j: usize) {
        self.adj[i * self.n + j] = true;
        self.adj[j * self.n + i] = true;
    }

    pub fn kind(&self) -> RelationKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Panics on out-of-range indices; see [`Relation::try_related`].
    pub fn related(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n + j]
    }

    pub fn try_related(&self, i: usize, j: usize) -> Result<bool, IndexError> {
        self.check(&[i, j])?;
        Ok(self.related(i, j))
    }

    fn check(&self, subset: &[usize]) -> Result<(), IndexError> {
        match subset.iter().find(|&&i| i >= self.n) {
            Some(&index) => Err(IndexError { index, len: self.n }),
            None => Ok(()),
        }
    }

    /// Unordered related pairs `(i, j)` with `i < j`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.related(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Points related to `i`, excluding `i` itself.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| j != i && self.related(i, j)).collect()
    }

    /// All points related to some member of `subset`; includes the subset.
    pub fn neighborhood(&self, subset: &[usize]) -> Result<Vec<usize>, IndexError> {
        self.check(subset)?;
        Ok((0..self.n)
            .filter(|&j| subset.iter().any(|&i| self.related(i, j)))
            .collect())
    }

    /// Clique indicator; the empty set and singletons are cliques.
    pub fn is_clique(&self, subset: &[usize]) -> Result<bool, IndexError> {
        self.check(subset)?;
        Ok(self.is_clique_unchecked(subset))
    }

    pub(crate) fn is_clique_unchecked(&self, subset: &[usize]) -> bool {
        subset
            .iter()
            .enumerate()
            .all(|(a, &i)| subset[a + 1..].iter().all(|&j| self.related(i, j)))
    }

    /// Size of the largest clique (Bron–Kerbosch with pivoting).
    pub fn max_clique_size(&self) -> usize {
        fn expand(r: &Relation, size: usize, p: Vec<usize>, x: Vec<usize>, best: &mut usize) {
            if p.is_empty() {
                if x.is_empty() {
                    *best = (*best).max(size);
                }
                return;
            }
            if size + p.len() <= *best {
                return;
            }
            let pivot = p
                .iter()
                .chain(x.iter())
                .copied()
                .max_by_key(|&u| p.iter().filter(|&&v| v != u && r.related(u, v)).count())
                .unwrap();
            let mut p = p;
            let mut x = x;
            let candidates: Vec<usize> = p
                .iter()
                .copied()
                .filter(|&v| v == pivot || !r.related(pivot, v))
                .collect();
            for v in candidates {
                let adj = |w: &usize| *w != v && r.related(v, *w);
                expand(
                    r,
                    size + 1,
                    p.iter().copied().filter(adj).collect(),
                    x.iter().copied().filter(adj).collect(),
                    best,
                );
                p.retain(|&w| w != v);
                x.push(v);
            }
        }
        let mut best = 0;
        expand(self, 0, (0..self.n).collect(), Vec::new(), &mut best);
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> Relation {
        let mut r = Relation::identity(RelationKind::Delaunay, 3);
        r.relate(0, 1);
        r.relate(1, 2);
        r
    }

    #[test]
    fn neighborhoods() {
        let r = chain3();
        assert_eq!(r.neighborhood(&[]).unwrap(), Vec::<usize>::new());
        assert_eq!(r.neighborhood(&[1]).unwrap(), vec![0, 1, 2]);
        assert_eq!(r.neighborhood(&[0]).unwrap(), vec![0, 1]);
        assert!(r.neighborhood(&[5]).is_err());
    }

    #[test]
    fn cliques() {
        let r = chain3();
        assert!(r.is_clique(&[]).unwrap());
        assert!(r.is_clique(&[2]).unwrap());
        assert!(r.is_clique(&[0, 1]).unwrap());
        assert!(!r.is_clique(&[0, 2]).unwrap());
        assert!(r.is_clique(&[3]).is_err());
        assert_eq!(r.max_clique_size(), 2);
        assert_eq!(Relation::identity(RelationKind::Delaunay, 0).max_clique_size(), 0);
        assert_eq!(Relation::identity(RelationKind::Delaunay, 4).max_clique_size(), 1);
        let mut full = Relation::identity(RelationKind::Delaunay, 4);
        for i in 0..4 {
            for j in 0..i {
                full.relate(i, j);
            }
        }
        assert_eq!(full.max_clique_size(), 4);
    }

    #[test]
    fn kind_names() {
        let k: RelationKind = serde_json::from_str("\"local\"").unwrap();
        assert_eq!(k, RelationKind::LocalDelaunay);
        assert_eq!(serde_json::to_string(&RelationKind::Delaunay).unwrap(), "\"delaunay\"");
    }
}
