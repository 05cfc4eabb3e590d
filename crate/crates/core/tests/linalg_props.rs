use chiral_duality::linalg::{dense_rank, int, intersect, kernel, rank, row_reduce, solve_affine, sum, Scalar, SparseVector};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

/// Fraction-free (Bareiss) rank over the integers: an elimination oracle
/// independent of the rational RREF.
fn bareiss_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let (n, cols) = (m.len(), m.first().map_or(0, Vec::len));
    let mut prev = BigInt::from(1);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..n).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in (r + 1)..n {
            for j in (c + 1)..cols {
                m[i][j] = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
        if r == n {
            break;
        }
    }
    r
}

fn to_sparse(rows: &[Vec<i64>]) -> Vec<SparseVector> {
    rows.iter().map(|r| SparseVector::from_pairs(r.iter().enumerate().map(|(j, &x)| (j, int(x))))).collect()
}

fn matrix(max_rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, cols), 0..=max_rows)
}

#[test]
fn bareiss_agrees_on_fixed_examples() {
    let m = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
    assert_eq!(bareiss_rank(&m), 2);
    assert_eq!(rank(&to_sparse(&m)), 2);
    let id = vec![vec![1, 0], vec![0, 1]];
    assert_eq!(bareiss_rank(&id), 2);
}

proptest! {
    #[test]
    fn rank_matches_bareiss(m in matrix(6, 5)) {
        let dense: Vec<Vec<Scalar>> = m.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        prop_assert_eq!(rank(&to_sparse(&m)), bareiss_rank(&m));
        prop_assert_eq!(dense_rank(&dense), bareiss_rank(&m));
    }

    #[test]
    fn row_reduce_is_idempotent(m in matrix(6, 5)) {
        let once = row_reduce(&to_sparse(&m), 5).unwrap();
        let twice = row_reduce(once.rows(), 5).unwrap();
        prop_assert_eq!(once.rows(), twice.rows());
    }

    #[test]
    fn row_order_does_not_matter(m in matrix(6, 5), seed in any::<u64>()) {
        let mut shuffled = m.clone();
        let k = shuffled.len();
        if k > 1 {
            shuffled.rotate_left((seed as usize) % k);
            shuffled.swap(0, k - 1);
        }
        let a = row_reduce(&to_sparse(&m), 5).unwrap();
        let b = row_reduce(&to_sparse(&shuffled), 5).unwrap();
        prop_assert_eq!(a.rows(), b.rows());
    }

    #[test]
    fn dimension_formula(u in matrix(4, 5), w in matrix(4, 5)) {
        let uu = row_reduce(&to_sparse(&u), 5).unwrap();
        let ww = row_reduce(&to_sparse(&w), 5).unwrap();
        let s = sum(&uu, &ww).unwrap();
        let i = intersect(&uu, &ww).unwrap();
        prop_assert_eq!(s.rank() + i.rank(), uu.rank() + ww.rank());
        for r in i.rows() {
            prop_assert!(uu.contains(r) && ww.contains(r));
        }
    }

    #[test]
    fn kernel_is_the_null_space(m in matrix(6, 4)) {
        // domain basis vector k maps to row k of m
        let images = to_sparse(&m);
        let ker = kernel(&images);
        prop_assert_eq!(ker.rank() + rank(&images), m.len());
        for v in ker.rows() {
            let mut image = SparseVector::new();
            for (k, c) in v.iter() {
                image.add_scaled(c, &images[k]);
            }
            prop_assert!(image.is_zero());
        }
    }

    #[test]
    fn affine_solutions_solve(m in matrix(4, 4), x in prop::collection::vec(-3i64..=3, 4)) {
        let cols = to_sparse(&m);
        let mut rhs = SparseVector::new();
        for (c, &xi) in cols.iter().zip(&x) {
            rhs.add_scaled(&int(xi), c);
        }
        let sol = solve_affine(&cols, &rhs).expect("consistent by construction");
        let mut check = SparseVector::new();
        for (c, xi) in cols.iter().zip(&sol.particular) {
            check.add_scaled(xi, c);
        }
        prop_assert_eq!(check, rhs);
        prop_assert_eq!(sol.nullity, m.len() - rank(&cols));
    }
}
