//! Exact rational linear systems.
//!
//! Systems are stored as sparse rows of [`BigRational`] coefficients. When
//! every diagonal coefficient is nonzero, [`solve_exact`] splits the system
//! into strongly connected blocks of the row → column dependency graph and
//! solves them in dependency order, which turns the game's ~4000-unknown
//! policy systems into a few hundred blocks of at most `2n` unknowns. Each
//! block (or the whole system, when the diagonal has holes) goes through
//! fraction-free Bareiss elimination on integer-scaled rows.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::SolveError;

pub use num_rational::BigRational;

/// Shorthand for a small exact fraction.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Nearest `f64`, for display only.
pub fn approx(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// `rows · x = rhs` with one label per unknown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem<L> {
    labels: Vec<L>,
    /// Sorted by column, no explicit zeros.
    rows: Vec<Vec<(usize, BigRational)>>,
    rhs: Vec<BigRational>,
}

impl<L: Ord + Clone> LinearSystem<L> {
    /// An all-zero square system over `labels`, which must be distinct.
    pub fn new(labels: Vec<L>) -> Result<Self, SolveError> {
        let distinct: BTreeSet<&L> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(SolveError::Malformed("duplicate variable label"));
        }
        let m = labels.len();
        Ok(LinearSystem {
            labels,
            rows: vec![Vec::new(); m],
            rhs: vec![BigRational::zero(); m],
        })
    }

    /// Solve and key the solution by label.
    pub fn solve_labelled(&self) -> Result<BTreeMap<L, BigRational>, SolveError> {
        let x = solve_exact(self)?;
        Ok(self.labels.iter().cloned().zip(x).collect())
    }
}

impl<L> LinearSystem<L> {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    /// Adds `value` to the coefficient at (`row`, `col`).
    pub fn add_coefficient(&mut self, row: usize, col: usize, value: BigRational) {
        assert!(col < self.dim(), "column {col} out of range");
        let entries = &mut self.rows[row];
        match entries.binary_search_by_key(&col, |&(c, _)| c) {
            Ok(i) => {
                entries[i].1 += value;
                if entries[i].1.is_zero() {
                    entries.remove(i);
                }
            }
            Err(i) => {
                if !value.is_zero() {
                    entries.insert(i, (col, value));
                }
            }
        }
    }

    pub fn add_rhs(&mut self, row: usize, value: BigRational) {
        self.rhs[row] += value;
    }

    pub fn coefficient(&self, row: usize, col: usize) -> BigRational {
        let entries = &self.rows[row];
        entries
            .binary_search_by_key(&col, |&(c, _)| c)
            .map(|i| entries[i].1.clone())
            .unwrap_or_else(|_| BigRational::zero())
    }

    pub fn row(&self, row: usize) -> &[(usize, BigRational)] {
        &self.rows[row]
    }

    pub fn rhs(&self, row: usize) -> &BigRational {
        &self.rhs[row]
    }

    pub fn dense(&self) -> Vec<Vec<BigRational>> {
        let m = self.dim();
        self.rows
            .iter()
            .map(|entries| {
                let mut row = vec![BigRational::zero(); m];
                for (c, v) in entries {
                    row[*c] = v.clone();
                }
                row
            })
            .collect()
    }

    /// `A·x − rhs`, exactly.
    pub fn residuals(&self, x: &[BigRational]) -> Vec<BigRational> {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(entries, b)| {
                let mut acc = -b.clone();
                for (c, v) in entries {
                    acc += v * &x[*c];
                }
                acc
            })
            .collect()
    }
}

/// Solve `system` exactly, returning unknowns in label order.
pub fn solve_exact<L>(system: &LinearSystem<L>) -> Result<Vec<BigRational>, SolveError> {
    let m = system.dim();
    let full_diagonal = (0..m).all(|i| system.rows[i].iter().any(|(c, _)| *c == i));
    if !full_diagonal {
        return solve_dense(&system.dense(), &system.rhs);
    }

    let adjacency: Vec<Vec<usize>> = system
        .rows
        .iter()
        .enumerate()
        .map(|(i, entries)| {
            entries
                .iter()
                .map(|(c, _)| *c)
                .filter(|&c| c != i)
                .collect()
        })
        .collect();

    let mut x: Vec<Option<BigRational>> = vec![None; m];
    for block in strongly_connected_components(&adjacency) {
        if let [i] = block[..] {
            let diag = system.coefficient(i, i);
            let mut acc = system.rhs[i].clone();
            for (c, v) in &system.rows[i] {
                if *c != i {
                    acc -= v * x[*c].as_ref().expect("dependency solved first");
                }
            }
            x[i] = Some(acc / diag);
            continue;
        }

        let local: BTreeMap<usize, usize> =
            block.iter().enumerate().map(|(k, &g)| (g, k)).collect();
        let size = block.len();
        let mut matrix = vec![vec![BigRational::zero(); size]; size];
        let mut rhs = Vec::with_capacity(size);
        for (k, &g) in block.iter().enumerate() {
            let mut acc = system.rhs[g].clone();
            for (c, v) in &system.rows[g] {
                match local.get(c) {
                    Some(&lc) => matrix[k][lc] = v.clone(),
                    None => acc -= v * x[*c].as_ref().expect("dependency solved first"),
                }
            }
            rhs.push(acc);
        }
        let solved = solve_dense(&matrix, &rhs).map_err(|e| match e {
            SolveError::SingularSystem { column } => SolveError::SingularSystem {
                column: block[column],
            },
            other => other,
        })?;
        for (&g, value) in block.iter().zip(solved) {
            x[g] = Some(value);
        }
    }
    Ok(x.into_iter()
        .map(|v| v.expect("every block solved"))
        .collect())
}

/// Dense fraction-free (Bareiss) elimination.
///
/// Each augmented row is first scaled by the lcm of its denominators, so the
/// elimination runs on integers and every division is exact. The pivot is the
/// first nonzero entry at or below the diagonal.
pub fn solve_dense(
    matrix: &[Vec<BigRational>],
    rhs: &[BigRational],
) -> Result<Vec<BigRational>, SolveError> {
    let m = matrix.len();
    if rhs.len() != m || matrix.iter().any(|row| row.len() != m) {
        return Err(SolveError::Malformed("matrix must be square and match rhs"));
    }

    let mut rows: Vec<Vec<BigInt>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let scale = row
                .iter()
                .chain(core::iter::once(b))
                .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            row.iter()
                .chain(core::iter::once(b))
                .map(|v| v.numer() * (&scale / v.denom()))
                .collect()
        })
        .collect();

    let mut prev = BigInt::one();
    for k in 0..m {
        let pivot = (k..m)
            .find(|&i| !rows[i][k].is_zero())
            .ok_or(SolveError::SingularSystem { column: k })?;
        rows.swap(k, pivot);
        let (top, rest) = rows.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            let factor = core::mem::take(&mut row[k]);
            for j in k + 1..=m {
                let updated = &pivot_row[k] * &row[j] - &factor * &pivot_row[j];
                row[j] = updated.div_floor(&prev);
                debug_assert!((&row[j] * &prev - &updated).is_zero());
            }
        }
        prev = rows[k][k].clone();
    }

    let mut x = vec![BigRational::zero(); m];
    for i in (0..m).rev() {
        let mut acc = BigRational::from_integer(rows[i][m].clone());
        for j in i + 1..m {
            if !rows[i][j].is_zero() {
                acc -= &x[j] * BigRational::from_integer(rows[i][j].clone());
            }
        }
        x[i] = acc / BigRational::from_integer(rows[i][i].clone());
    }
    Ok(x)
}

/// Tarjan's algorithm, iterative. Components come out in dependency order:
/// a component is emitted only after every component it has edges into.
fn strongly_connected_components(adjacency: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = adjacency.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next = 0usize;
    let mut frames: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        frames.push((root, 0));

        while let Some(&(v, edge)) = frames.last() {
            if edge < adjacency[v].len() {
                frames.last_mut().unwrap().1 += 1;
                let w = adjacency[v][edge];
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(u, _)) = frames.last() {
                low[u] = low[u].min(low[v]);
            }
            if low[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                component.sort_unstable();
                components.push(component);
            }
        }
    }
    components
}

/// Exact `|x|`, handy in tolerance-free comparisons.
pub fn abs(value: &BigRational) -> BigRational {
    value.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn system_from(matrix: &[&[i64]], den: i64, rhs: &[BigRational]) -> LinearSystem<usize> {
        let m = matrix.len();
        let mut sys = LinearSystem::new((0..m).collect()).unwrap();
        for (i, row) in matrix.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                sys.add_coefficient(i, j, ratio(v, den));
            }
            sys.add_rhs(i, rhs[i].clone());
        }
        sys
    }

    #[test]
    fn identity() {
        let sys = system_from(&[&[1, 0], &[0, 1]], 1, &[ratio(2, 3), ratio(1, 5)]);
        assert_eq!(solve_exact(&sys).unwrap(), vec![ratio(2, 3), ratio(1, 5)]);
    }

    #[test]
    fn two_by_two_from_banked_two() {
        // x = 1/2 + y/2,  y = 7x/8
        let sys = system_from(&[&[8, -4], &[-7, 8]], 8, &[ratio(1, 2), ratio(0, 1)]);
        assert_eq!(solve_exact(&sys).unwrap(), vec![ratio(8, 9), ratio(7, 9)]);
        assert_eq!(
            solve_dense(&sys.dense(), &[ratio(1, 2), ratio(0, 1)]).unwrap(),
            vec![ratio(8, 9), ratio(7, 9)]
        );
    }

    #[test]
    fn two_point_game_continue_everywhere() {
        // unknowns: P000, P001, P010, P100, P101 with P011 = 2/3
        //   P000 = ½(1 − P000) + ½ P100
        //   P001 = ½(1 − P010) + ½ P101
        //   P010 = ½(1 − P001) + ½
        //   P100 = ½(1 − P000) + ½
        //   P101 = ½(1 − P010) + ½
        let sys = system_from(
            &[
                &[3, 0, 0, -1, 0],
                &[0, 2, 1, 0, -1],
                &[0, 1, 2, 0, 0],
                &[1, 0, 0, 2, 0],
                &[0, 0, 1, 0, 2],
            ],
            2,
            &[
                ratio(1, 2),
                ratio(1, 2),
                ratio(1, 1),
                ratio(1, 1),
                ratio(1, 1),
            ],
        );
        let x = solve_exact(&sys).unwrap();
        assert_eq!(x[0], ratio(4, 7));
        assert!(sys.residuals(&x).iter().all(Zero::is_zero));
    }

    #[test]
    fn singular_detected() {
        let sys = system_from(&[&[1, 2], &[2, 4]], 1, &[ratio(1, 1), ratio(2, 1)]);
        assert!(matches!(
            solve_exact(&sys),
            Err(SolveError::SingularSystem { .. })
        ));
        let holes = system_from(&[&[0, 1], &[0, 1]], 1, &[ratio(1, 1), ratio(2, 1)]);
        assert!(matches!(
            solve_exact(&holes),
            Err(SolveError::SingularSystem { column: 0 })
        ));
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(LinearSystem::new(vec![1, 1]).is_err());
    }

    #[test]
    fn normalisation() {
        let p = ratio(6, -22);
        assert_eq!(p.to_string(), "-3/11");
        assert_eq!(ratio(3, 11) + ratio(-3, 11), ratio(0, 1));
        assert_eq!((ratio(3, 11) + ratio(-3, 11)).denom(), &BigInt::one());
    }

    #[test]
    fn zero_diagonal_uses_dense_path() {
        // permutation matrix
        let sys = system_from(&[&[0, 1], &[1, 0]], 1, &[ratio(1, 3), ratio(2, 7)]);
        assert_eq!(solve_exact(&sys).unwrap(), vec![ratio(2, 7), ratio(1, 3)]);
    }

    #[test]
    fn scc_order_respects_dependencies() {
        // 0 -> 1 -> 2 -> 1, 3 isolated
        let adj = vec![vec![1], vec![2], vec![1], vec![]];
        let comps = strongly_connected_components(&adj);
        let pos = |v: usize| comps.iter().position(|c| c.contains(&v)).unwrap();
        assert!(pos(1) < pos(0));
        assert_eq!(pos(1), pos(2));
        assert_eq!(comps.len(), 3);
    }

    fn small_matrix(max: usize) -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<i64>)> {
        (1..=max).prop_flat_map(|m| {
            (
                proptest::collection::vec(proptest::collection::vec(-4i64..=4, m), m),
                proptest::collection::vec(-9i64..=9, m),
            )
        })
    }

    proptest! {
        #[test]
        fn solutions_satisfy_system((matrix, rhs) in small_matrix(6), den in 1i64..5) {
            let m = matrix.len();
            let mut sys = LinearSystem::new((0..m).collect::<Vec<_>>()).unwrap();
            for (i, row) in matrix.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    sys.add_coefficient(i, j, ratio(v, den));
                }
                sys.add_rhs(i, ratio(rhs[i], den + 1));
            }
            match solve_exact(&sys) {
                Ok(x) => {
                    prop_assert!(sys.residuals(&x).iter().all(Zero::is_zero));
                    prop_assert_eq!(solve_exact(&sys).unwrap(), x);
                }
                Err(SolveError::SingularSystem { .. }) => {
                    // singular systems must also be rejected by the dense route
                    prop_assert!(solve_dense(&sys.dense(), &sys.rhs).is_err());
                }
                Err(e) => prop_assert!(false, "unexpected {e:?}"),
            }
        }

        #[test]
        fn block_and_dense_routes_agree(
            (matrix, rhs) in small_matrix(8),
            mask in proptest::collection::vec(any::<bool>(), 64),
        ) {
            // sparse, strictly diagonally dominant: always solvable, always block path
            let m = matrix.len();
            let mut sys = LinearSystem::new((0..m).collect::<Vec<_>>()).unwrap();
            for i in 0..m {
                let mut off = 0i64;
                for j in 0..m {
                    if i != j && mask[(i * 8 + j) % 64] {
                        sys.add_coefficient(i, j, ratio(matrix[i][j], 3));
                        off += matrix[i][j].abs();
                    }
                }
                sys.add_coefficient(i, i, ratio(off + 1, 1));
                sys.add_rhs(i, ratio(rhs[i], 7));
            }
            let blocked = solve_exact(&sys).unwrap();
            let dense = solve_dense(&sys.dense(), &sys.rhs).unwrap();
            prop_assert_eq!(blocked, dense);
        }
    }
}
