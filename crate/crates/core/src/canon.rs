//! Canonical vertex orderings for small graphs.
//!
//! Individualization-refinement: vertices start in cells ordered by an
//! isomorphism-invariant key, cells are split until equitable, and every
//! remaining choice is explored by backtracking. The canonical order is the
//! leaf whose packed upper-triangle adjacency is lexicographically least.
//! Interchangeable twins (same key, same neighborhood apart from each other)
//! are branched on once.

/// Packs the upper triangle (row-major, `i < j`) of the adjacency matrix in
/// `order`, most significant bit first.
pub(crate) fn packed_adjacency(matrix: &AdjMatrix, order: &[usize]) -> Vec<u8> {
    let n = order.len();
    let bits = n * n.saturating_sub(1) / 2;
    let mut out = vec![0u8; bits.div_ceil(8)];
    let mut b = 0;
    for i in 0..n {
        for j in i + 1..n {
            if matrix.get(order[i], order[j]) {
                out[b / 8] |= 0x80 >> (b % 8);
            }
            b += 1;
        }
    }
    out
}

pub(crate) struct AdjMatrix {
    n: usize,
    bits: Vec<bool>,
}

impl AdjMatrix {
    pub(crate) fn new(adj: &[Vec<usize>]) -> Self {
        let n = adj.len();
        let mut bits = vec![false; n * n];
        for (u, list) in adj.iter().enumerate() {
            for &v in list {
                bits[u * n + v] = true;
            }
        }
        Self { n, bits }
    }

    #[inline]
    pub(crate) fn get(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.n + v]
    }
}

struct Search<'a> {
    adj: &'a [Vec<usize>],
    matrix: AdjMatrix,
    best: Option<(Vec<u8>, Vec<usize>)>,
}

/// Returns the canonical order (position -> vertex). Vertices are grouped by
/// ascending `keys`, so equal inputs up to key-preserving isomorphism yield
/// identical packed adjacency along the returned order.
pub(crate) fn canonical_order<K: Ord>(adj: &[Vec<usize>], keys: &[K]) -> Vec<usize> {
    let n = adj.len();
    if n == 0 {
        return Vec::new();
    }
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for &v in &sorted {
        match cells.last_mut() {
            Some(cell) if keys[cell[0]] == keys[v] => cell.push(v),
            _ => cells.push(vec![v]),
        }
    }
    let mut search = Search {
        adj,
        matrix: AdjMatrix::new(adj),
        best: None,
    };
    search.descend(cells);
    search.best.map(|(_, order)| order).unwrap_or_default()
}

impl Search<'_> {
    fn descend(&mut self, mut cells: Vec<Vec<usize>>) {
        refine(self.adj, &mut cells);
        let Some(target) = cells.iter().position(|c| c.len() > 1) else {
            let order: Vec<usize> = cells.into_iter().map(|c| c[0]).collect();
            let code = packed_adjacency(&self.matrix, &order);
            if self.best.as_ref().is_none_or(|(b, _)| code < *b) {
                self.best = Some((code, order));
            }
            return;
        };
        let cell = cells[target].clone();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &cell {
            if tried.iter().any(|&u| self.twins(u, v)) {
                continue;
            }
            tried.push(v);
            let mut next = Vec::with_capacity(cells.len() + 1);
            next.extend_from_slice(&cells[..target]);
            next.push(vec![v]);
            next.push(cell.iter().copied().filter(|&u| u != v).collect());
            next.extend_from_slice(&cells[target + 1..]);
            self.descend(next);
        }
    }

    fn twins(&self, u: usize, v: usize) -> bool {
        let n = self.adj.len();
        (0..n)
            .filter(|&w| w != u && w != v)
            .all(|w| self.matrix.get(u, w) == self.matrix.get(v, w))
    }
}

/// Splits cells by the sorted multiset of neighbor cell indices until stable.
fn refine(adj: &[Vec<usize>], cells: &mut Vec<Vec<usize>>) {
    let n = adj.len();
    let mut cell_of = vec![0usize; n];
    loop {
        for (i, cell) in cells.iter().enumerate() {
            for &v in cell {
                cell_of[v] = i;
            }
        }
        let mut next: Vec<Vec<usize>> = Vec::with_capacity(cells.len());
        for cell in cells.iter() {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut tagged: Vec<(Vec<usize>, usize)> = cell
                .iter()
                .map(|&v| {
                    let mut sig: Vec<usize> = adj[v].iter().map(|&w| cell_of[w]).collect();
                    sig.sort_unstable();
                    (sig, v)
                })
                .collect();
            // Stable sort keeps the incoming order inside each sub-cell.
            tagged.sort_by(|a, b| a.0.cmp(&b.0));
            let mut start = 0;
            for i in 1..=tagged.len() {
                if i == tagged.len() || tagged[i].0 != tagged[start].0 {
                    next.push(tagged[start..i].iter().map(|t| t.1).collect());
                    start = i;
                }
            }
        }
        let changed = next.len() != cells.len();
        *cells = next;
        if !changed {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Vec<Vec<usize>> {
        (0..n).map(|i| vec![(i + n - 1) % n, (i + 1) % n]).collect()
    }

    fn permuted(adj: &[Vec<usize>], perm: &[usize]) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); adj.len()];
        for (u, l) in adj.iter().enumerate() {
            out[perm[u]] = l.iter().map(|&v| perm[v]).collect();
        }
        out
    }

    fn canonical_bits(adj: &[Vec<usize>]) -> Vec<u8> {
        let keys: Vec<usize> = adj.iter().map(Vec::len).collect();
        let order = canonical_order(adj, &keys);
        packed_adjacency(&AdjMatrix::new(adj), &order)
    }

    #[test]
    fn relabeled_cycles_agree() {
        let c = cycle(7);
        let perm = [3, 6, 0, 5, 1, 4, 2];
        assert_eq!(canonical_bits(&c), canonical_bits(&permuted(&c, &perm)));
    }

    #[test]
    fn c6_differs_from_two_triangles() {
        let two_triangles = vec![
            vec![1, 2],
            vec![0, 2],
            vec![0, 1],
            vec![4, 5],
            vec![3, 5],
            vec![3, 4],
        ];
        assert_ne!(canonical_bits(&cycle(6)), canonical_bits(&two_triangles));
    }

    #[test]
    fn empty_graph_is_cheap() {
        let empty = vec![Vec::new(); 40];
        assert_eq!(canonical_bits(&empty), vec![0u8; (40 * 39 / 2usize).div_ceil(8)]);
    }
}
