use super::{Matrix, NumericsError};

/// Solves A X = B for square A via LU factorization with partial pivoting.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix, NumericsError> {
    let n = a.rows();
    if a.cols() != n {
        return Err(NumericsError::ShapeMismatch(format!(
            "solve needs square A, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if b.rows() != n {
        return Err(NumericsError::ShapeMismatch(format!(
            "solve: A is {}x{} but B has {} rows",
            n,
            n,
            b.rows()
        )));
    }

    let mut lu = a.clone();
    let mut x = b.clone();
    let scale = a.infinity_norm().max(1.0);
    let tol = 1e-14 * scale;

    for col in 0..n {
        // Partial pivoting: largest magnitude in the column at or below the diagonal.
        let mut pivot_row = col;
        let mut pivot_val = lu[(col, col)].abs();
        for r in col + 1..n {
            let v = lu[(r, col)].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val <= tol {
            return Err(NumericsError::Singular { col, pivot: pivot_val });
        }
        if pivot_row != col {
            swap_rows(&mut lu, col, pivot_row);
            swap_rows(&mut x, col, pivot_row);
        }
        let pivot = lu[(col, col)];
        for r in col + 1..n {
            let factor = lu[(r, col)] / pivot;
            if factor == 0.0 {
                continue;
            }
            lu[(r, col)] = 0.0;
            for c in col + 1..n {
                let v = lu[(col, c)];
                lu[(r, c)] -= factor * v;
            }
            for c in 0..x.cols() {
                let v = x[(col, c)];
                x[(r, c)] -= factor * v;
            }
        }
    }

    // Back substitution.
    for col in (0..n).rev() {
        let pivot = lu[(col, col)];
        for c in 0..x.cols() {
            x[(col, c)] /= pivot;
        }
        for r in 0..col {
            let factor = lu[(r, col)];
            if factor == 0.0 {
                continue;
            }
            for c in 0..x.cols() {
                let v = x[(col, c)];
                x[(r, c)] -= factor * v;
            }
        }
    }
    Ok(x)
}

fn swap_rows(m: &mut Matrix, a: usize, b: usize) {
    for c in 0..m.cols() {
        let tmp = m[(a, c)];
        m[(a, c)] = m[(b, c)];
        m[(b, c)] = tmp;
    }
}
