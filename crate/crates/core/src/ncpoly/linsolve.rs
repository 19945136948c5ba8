use crate::coeff::Coeff;

/// Solves `a x = b` exactly by Gauss-Jordan elimination. Free unknowns are
/// set to zero. Returns `None` when the system is inconsistent.
pub(crate) fn solve(mut a: Vec<Vec<Coeff>>, mut b: Vec<Coeff>) -> Option<Vec<Coeff>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].inv().expect("nonzero pivot");
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        b[r] *= &inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let d = &f * &a[r][j];
                    a[i][j] -= &d;
                }
                let d = &f * &b[r];
                b[i] -= &d;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if b[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut x = vec![Coeff::zero(); cols];
    for (i, c) in pivots.into_iter().enumerate() {
        x[c] = b[i].clone();
    }
    Some(x)
}
