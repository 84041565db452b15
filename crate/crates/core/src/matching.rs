//! Maximum bipartite matching (augmenting paths, lowest column first) and
//! Hall-violator extraction from a deficient matching.

use std::collections::VecDeque;

/// A matching of rows into columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub row_to_col: Vec<Option<usize>>,
    pub col_to_row: Vec<Option<usize>>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.row_to_col.iter().filter(|c| c.is_some()).count()
    }

    pub fn is_perfect_on_rows(&self) -> bool {
        self.row_to_col.iter().all(|c| c.is_some())
    }
}

fn augment(
    row: usize,
    adj: &[Vec<usize>],
    visited: &mut [bool],
    row_to_col: &mut [Option<usize>],
    col_to_row: &mut [Option<usize>],
) -> bool {
    for &col in &adj[row] {
        if visited[col] {
            continue;
        }
        visited[col] = true;
        let free = match col_to_row[col] {
            None => true,
            Some(r) => augment(r, adj, visited, row_to_col, col_to_row),
        };
        if free {
            row_to_col[row] = Some(col);
            col_to_row[col] = Some(row);
            return true;
        }
    }
    false
}

/// Maximum matching; `adj[row]` lists admissible columns in ascending order.
pub fn max_matching(adj: &[Vec<usize>], n_cols: usize) -> Matching {
    let mut row_to_col = vec![None; adj.len()];
    let mut col_to_row = vec![None; n_cols];
    let mut visited = vec![false; n_cols];
    for row in 0..adj.len() {
        visited.iter_mut().for_each(|v| *v = false);
        augment(row, adj, &mut visited, &mut row_to_col, &mut col_to_row);
    }
    Matching {
        row_to_col,
        col_to_row,
    }
}

/// For a maximum matching leaving some row unmatched: the rows `U` reachable
/// from the first unmatched row by alternating paths and their neighbourhood
/// `V`, with `|V| = |U| - 1`.
pub fn hall_violator(adj: &[Vec<usize>], m: &Matching) -> Option<(Vec<usize>, Vec<usize>)> {
    let start = m.row_to_col.iter().position(|c| c.is_none())?;
    let mut row_seen = vec![false; adj.len()];
    let mut col_seen = vec![false; m.col_to_row.len()];
    let mut queue = VecDeque::from([start]);
    row_seen[start] = true;
    while let Some(r) = queue.pop_front() {
        for &c in &adj[r] {
            if col_seen[c] {
                continue;
            }
            col_seen[c] = true;
            let mate = m.col_to_row[c].expect("maximum matching has no augmenting path");
            if !row_seen[mate] {
                row_seen[mate] = true;
                queue.push_back(mate);
            }
        }
    }
    let rows: Vec<usize> = (0..adj.len()).filter(|&r| row_seen[r]).collect();
    let cols: Vec<usize> = (0..col_seen.len()).filter(|&c| col_seen[c]).collect();
    debug_assert_eq!(cols.len() + 1, rows.len());
    Some((rows, cols))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_when_possible() {
        let adj = vec![vec![0, 1], vec![0], vec![1, 2]];
        let m = max_matching(&adj, 3);
        assert!(m.is_perfect_on_rows());
        assert_eq!(m.row_to_col, vec![Some(1), Some(0), Some(2)]);
    }

    #[test]
    fn violator_from_deficiency() {
        let adj = vec![vec![1], vec![1], vec![0, 2]];
        let m = max_matching(&adj, 3);
        assert_eq!(m.size(), 2);
        let (u, v) = hall_violator(&adj, &m).unwrap();
        assert_eq!(u, vec![0, 1]);
        assert_eq!(v, vec![1]);
    }

    #[test]
    fn empty_row_is_its_own_violator() {
        let adj = vec![vec![0], vec![]];
        let m = max_matching(&adj, 1);
        assert_eq!(hall_violator(&adj, &m).unwrap(), (vec![1], vec![]));
    }
}
