//! Gaussian elimination over GF(2) on packed bit rows.

use crate::pauli::Bits;

/// Rank of the row set.
pub fn rank(mut rows: Vec<Bits>) -> usize {
    let Some(width) = rows.first().map(|r| r.len()) else {
        return 0;
    };
    let mut r = 0;
    for col in 0..width {
        let Some(pivot) = (r..rows.len()).find(|&i| rows[i][col]) else {
            continue;
        };
        rows.swap(r, pivot);
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[col] {
                *row ^= pivot_row.as_bitslice();
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Indices of a subset of `rows` whose XOR equals `target`, if any.
pub fn solve(rows: &[Bits], target: &Bits) -> Option<Vec<usize>> {
    let k = rows.len();
    let width = target.len();
    // Augment each row with an identity tag recording which inputs it combines.
    let mut work: Vec<(Bits, Bits)> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut tag = Bits::repeat(false, k);
            tag.set(i, true);
            (row.clone(), tag)
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(p) = (r..k).find(|&i| work[i].0[col]) else {
            continue;
        };
        work.swap(r, p);
        let (prow, ptag) = work[r].clone();
        for (i, (row, tag)) in work.iter_mut().enumerate() {
            if i != r && row[col] {
                *row ^= prow.as_bitslice();
                *tag ^= ptag.as_bitslice();
            }
        }
        pivots.push((col, r));
        r += 1;
        if r == k {
            break;
        }
    }
    let mut residual = target.clone();
    let mut combo = Bits::repeat(false, k);
    for &(col, row) in &pivots {
        if residual[col] {
            residual ^= work[row].0.as_bitslice();
            combo ^= work[row].1.as_bitslice();
        }
    }
    if residual.any() {
        return None;
    }
    Some(combo.iter_ones().collect())
}

/// Basis of the row combinations that XOR to zero, each as a list of row indices.
pub fn left_kernel(rows: &[Bits]) -> Vec<Vec<usize>> {
    let k = rows.len();
    let width = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut work: Vec<(Bits, Bits)> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut tag = Bits::repeat(false, k);
            tag.set(i, true);
            (row.clone(), tag)
        })
        .collect();
    let mut r = 0;
    for col in 0..width {
        let Some(p) = (r..k).find(|&i| work[i].0[col]) else {
            continue;
        };
        work.swap(r, p);
        let (prow, ptag) = work[r].clone();
        for (i, (row, tag)) in work.iter_mut().enumerate() {
            if i != r && row[col] {
                *row ^= prow.as_bitslice();
                *tag ^= ptag.as_bitslice();
            }
        }
        r += 1;
        if r == k {
            break;
        }
    }
    work[r..].iter().map(|(_, tag)| tag.iter_ones().collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Bits {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        assert_eq!(rank(vec![bits("110"), bits("011"), bits("101")]), 2);
        assert_eq!(rank(vec![bits("100"), bits("010"), bits("001")]), 3);
        assert_eq!(rank(vec![]), 0);
    }

    #[test]
    fn solve_finds_combination() {
        let rows = vec![bits("1100"), bits("0110"), bits("0011")];
        let combo = solve(&rows, &bits("1001")).unwrap();
        assert_eq!(combo, vec![0, 1, 2]);
        assert!(solve(&rows, &bits("1000")).is_none());
    }

    #[test]
    fn kernel_of_dependent_rows() {
        let rows = vec![bits("110"), bits("011"), bits("101"), bits("000")];
        let kernel = left_kernel(&rows);
        assert_eq!(kernel.len(), 2);
        for combo in kernel {
            let mut acc = bits("000");
            for i in combo {
                acc ^= rows[i].as_bitslice();
            }
            assert!(acc.not_any());
        }
        assert!(left_kernel(&[bits("10"), bits("01")]).is_empty());
    }
}
