//! Smith normal form of small integer matrices.
//!
//! Only the diagonal and the inverse of the column transform are tracked: with
//! `D = U·R·V`, the rows of `V⁻¹` form a basis `f_i` of `Z^m` in which the row
//! lattice of `R` is `⊕ d_i f_i Z`.

pub struct SmithForm {
    /// `d_1 | d_2 | …`, length `m` (zero-padded when `R` has fewer rows).
    pub diagonal: Vec<i64>,
    /// `V⁻¹`, an `m × m` unimodular matrix.
    pub col_inverse: Vec<Vec<i64>>,
}

pub fn smith_normal_form(rows: &[Vec<i64>], m: usize) -> SmithForm {
    let mut a: Vec<Vec<i64>> = rows.to_vec();
    let r = a.len();
    let mut vinv: Vec<Vec<i64>> = (0..m)
        .map(|i| (0..m).map(|j| i64::from(i == j)).collect())
        .collect();

    // column op col_j += k * col_i  <=>  row op row_i -= k * row_j on V⁻¹
    let col_add = |a: &mut Vec<Vec<i64>>, vinv: &mut Vec<Vec<i64>>, j: usize, i: usize, k: i64| {
        for row in a.iter_mut() {
            row[j] += k * row[i];
        }
        for c in 0..m {
            let t = vinv[j][c];
            vinv[i][c] -= k * t;
        }
    };
    let col_swap = |a: &mut Vec<Vec<i64>>, vinv: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        vinv.swap(i, j);
    };

    let mut diagonal = vec![0i64; m];
    let mut t = 0;
    while t < m.min(r) {
        // pivot: smallest nonzero absolute value in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..m {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        col_swap(&mut a, &mut vinv, t, pj);

        let mut clean = true;
        for i in t + 1..r {
            let q = a[i][t] / a[t][t];
            if q != 0 {
                let pivot_row = a[t].clone();
                for (x, p) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= q * p;
                }
            }
            if a[i][t] != 0 {
                clean = false;
            }
        }
        for j in t + 1..m {
            let q = a[t][j] / a[t][t];
            if q != 0 {
                col_add(&mut a, &mut vinv, j, t, -q);
            }
            if a[t][j] != 0 {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // divisibility: fold an offending row into the pivot row and redo this step
        let d = a[t][t];
        let offending = (t + 1..r).find(|&i| (t + 1..m).any(|j| a[i][j] % d != 0));
        if let Some(i) = offending {
            let row = a[i].clone();
            for (x, y) in a[t].iter_mut().zip(&row) {
                *x += y;
            }
            continue;
        }
        diagonal[t] = d.abs();
        t += 1;
    }
    SmithForm { diagonal, col_inverse: vinv }
}
