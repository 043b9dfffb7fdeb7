//! Small exact integer linear algebra: checked vector/matrix arithmetic,
//! Hermite normal form, and integer kernels. Everything is `i64` with
//! explicit overflow detection; matrices are row-major `Vec<Vec<i64>>`.

use crate::error::{Error, Result};

pub type IVec = Vec<i64>;
pub type IMat = Vec<IVec>;

pub fn checked_add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::Overflow("integer addition"))
}

pub fn checked_mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b)
        .ok_or(Error::Overflow("integer multiplication"))
}

pub fn vec_add(a: &[i64], b: &[i64]) -> Result<IVec> {
    if a.len() != b.len() {
        return Err(Error::RankMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    a.iter().zip(b).map(|(&x, &y)| checked_add(x, y)).collect()
}

pub fn vec_sub(a: &[i64], b: &[i64]) -> Result<IVec> {
    vec_add(a, &vec_neg(b)?)
}

pub fn vec_neg(a: &[i64]) -> Result<IVec> {
    a.iter()
        .map(|&x| x.checked_neg().ok_or(Error::Overflow("negation")))
        .collect()
}

pub fn vec_scale(k: i64, a: &[i64]) -> Result<IVec> {
    a.iter().map(|&x| checked_mul(k, x)).collect()
}

pub fn is_zero_vec(a: &[i64]) -> bool {
    a.iter().all(|&x| x == 0)
}

pub fn mat_identity(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn is_identity(m: &IMat) -> bool {
    m.iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, &x)| x == i64::from(i == j)))
}

pub fn mat_vec(m: &IMat, v: &[i64]) -> Result<IVec> {
    m.iter()
        .map(|row| {
            if row.len() != v.len() {
                return Err(Error::RankMismatch {
                    expected: row.len(),
                    got: v.len(),
                });
            }
            let mut acc = 0i64;
            for (&a, &b) in row.iter().zip(v) {
                acc = checked_add(acc, checked_mul(a, b)?)?;
            }
            Ok(acc)
        })
        .collect()
}

pub fn mat_mul(a: &IMat, b: &IMat) -> Result<IMat> {
    let n = a.len();
    let inner = b.len();
    let m = if inner == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![0i64; m]; n];
    for i in 0..n {
        if a[i].len() != inner {
            return Err(Error::RankMismatch {
                expected: inner,
                got: a[i].len(),
            });
        }
        for k in 0..inner {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] = checked_add(out[i][j], checked_mul(a[i][k], b[k][j])?)?;
            }
        }
    }
    Ok(out)
}

/// Determinant by fraction-free (Bareiss) elimination. Exact for the small
/// matrices used here.
pub fn det(m: &IMat) -> Result<i64> {
    let n = m.len();
    if n == 0 {
        return Ok(1);
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let swap = (k + 1..n).find(|&i| a[i][k] != 0);
            match swap {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j]
                    .checked_mul(a[k][k])
                    .and_then(|x| x.checked_sub(a[i][k].checked_mul(a[k][j])?))
                    .ok_or(Error::Overflow("determinant"))?;
                a[i][j] = num / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    let d = sign * a[n - 1][n - 1];
    i64::try_from(d).map_err(|_| Error::Overflow("determinant"))
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended gcd: returns (g, x, y) with a*x + b*y = g >= 0.
pub fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Content (gcd of entries) of a vector; 0 for the zero vector.
pub fn content(v: &[i64]) -> i64 {
    v.iter().fold(0, |acc, &x| gcd(acc, x))
}

/// Divides by the content and flips sign so the first nonzero entry is
/// positive. Errors on the zero vector.
pub fn primitive(v: &[i64]) -> Result<IVec> {
    let c = content(v);
    if c == 0 {
        return Err(Error::Invalid("zero vector has no primitive form".into()));
    }
    let mut out: IVec = v.iter().map(|&x| x / c).collect();
    if let Some(&first) = out.iter().find(|&&x| x != 0) {
        if first < 0 {
            out = vec_neg(&out)?;
        }
    }
    Ok(out)
}

/// Row Hermite normal form of the lattice spanned by `rows`. Returns the
/// canonical basis: nonzero rows, pivots positive, entries above each pivot
/// reduced into [0, pivot).
pub fn row_hnf(rows: &[IVec]) -> Result<IMat> {
    if rows.is_empty() {
        return Ok(Vec::new());
    }
    let ncols = rows[0].len();
    let mut work: IMat = rows.to_vec();
    for r in &work {
        if r.len() != ncols {
            return Err(Error::RankMismatch {
                expected: ncols,
                got: r.len(),
            });
        }
    }
    let mut pivot_row = 0usize;
    for col in 0..ncols {
        if pivot_row >= work.len() {
            break;
        }
        // clear the column below pivot_row with gcd row operations
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..work.len() {
                if work[i][col] != 0 {
                    match best {
                        None => best = Some(i),
                        Some(b) => {
                            if work[i][col].abs() < work[b][col].abs() {
                                best = Some(i)
                            }
                        }
                    }
                }
            }
            let Some(b) = best else { break };
            work.swap(pivot_row, b);
            let mut done = true;
            let pv = work[pivot_row][col];
            for i in pivot_row + 1..work.len() {
                if work[i][col] != 0 {
                    let q = work[i][col].div_euclid(pv);
                    for j in 0..ncols {
                        work[i][j] = checked_add(work[i][j], checked_mul(-q, work[pivot_row][j])?)?;
                    }
                    if work[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if work[pivot_row][col] != 0 {
            if work[pivot_row][col] < 0 {
                work[pivot_row] = vec_neg(&work[pivot_row])?;
            }
            let pv = work[pivot_row][col];
            let pivot_copy = work[pivot_row].clone();
            for (i, row) in work.iter_mut().enumerate().take(pivot_row) {
                let q = row[col].div_euclid(pv);
                if q != 0 {
                    for j in 0..ncols {
                        row[j] = checked_add(row[j], checked_mul(-q, pivot_copy[j])?)?;
                    }
                }
                let _ = i;
            }
            pivot_row += 1;
        }
    }
    work.truncate(pivot_row);
    Ok(work)
}

/// Basis of the integer kernel { x : M x = 0 }, computed by unimodular
/// column reduction of M stacked over the identity. Deterministic.
pub fn kernel_basis(m: &IMat) -> Result<IMat> {
    let nrows = m.len();
    let ncols = if nrows == 0 { 0 } else { m[0].len() };
    if ncols == 0 {
        return Ok(Vec::new());
    }
    // cols[j] = (column j of M, column j of I)
    let mut cols: Vec<(IVec, IVec)> = (0..ncols)
        .map(|j| {
            let top: IVec = (0..nrows).map(|i| m[i][j]).collect();
            let bottom: IVec = (0..ncols).map(|i| i64::from(i == j)).collect();
            (top, bottom)
        })
        .collect();
    let mut pivot_col = 0usize;
    for row in 0..nrows {
        if pivot_col >= ncols {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for j in pivot_col..ncols {
                if cols[j].0[row] != 0 {
                    match best {
                        None => best = Some(j),
                        Some(b) => {
                            if cols[j].0[row].abs() < cols[b].0[row].abs() {
                                best = Some(j)
                            }
                        }
                    }
                }
            }
            let Some(b) = best else { break };
            cols.swap(pivot_col, b);
            let pv = cols[pivot_col].0[row];
            let mut done = true;
            for j in pivot_col + 1..ncols {
                if cols[j].0[row] != 0 {
                    let q = cols[j].0[row].div_euclid(pv);
                    let (ptop, pbot) = cols[pivot_col].clone();
                    for i in 0..nrows {
                        cols[j].0[i] = checked_add(cols[j].0[i], checked_mul(-q, ptop[i])?)?;
                    }
                    for i in 0..ncols {
                        cols[j].1[i] = checked_add(cols[j].1[i], checked_mul(-q, pbot[i])?)?;
                    }
                    if cols[j].0[row] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if cols[pivot_col].0[row] != 0 {
            pivot_col += 1;
        }
    }
    let mut basis: IMat = cols[pivot_col..]
        .iter()
        .map(|(_, bottom)| bottom.clone())
        .collect();
    // canonicalize: sign-normalize each basis vector
    for b in &mut basis {
        if let Some(&first) = b.iter().find(|&&x| x != 0) {
            if first < 0 {
                *b = vec_neg(b)?;
            }
        }
    }
    Ok(basis)
}

/// Solves B^T x = target exactly over the integers, where the rows of
/// `basis` are linearly independent lattice generators. Returns the
/// coordinate vector when the target lies in the lattice.
pub fn lattice_coordinates(basis: &IMat, target: &[i64]) -> Result<Option<IVec>> {
    let k = basis.len();
    if k == 0 {
        return Ok(if is_zero_vec(target) {
            Some(Vec::new())
        } else {
            None
        });
    }
    let n = basis[0].len();
    if target.len() != n {
        return Err(Error::RankMismatch {
            expected: n,
            got: target.len(),
        });
    }
    // Gaussian elimination over the rationals with exact i128 fractions is
    // avoided: do integer elimination on the augmented system instead.
    // rows: k unknowns, n equations: sum_j x_j basis[j][i] = target[i].
    let mut aug: Vec<Vec<i128>> = (0..n)
        .map(|i| {
            let mut row: Vec<i128> = (0..k).map(|j| basis[j][i] as i128).collect();
            row.push(target[i] as i128);
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut prow = 0;
    for col in 0..k {
        if prow >= n {
            break;
        }
        // gcd-eliminate below
        loop {
            let mut best: Option<usize> = None;
            for r in prow..n {
                if aug[r][col] != 0 {
                    match best {
                        None => best = Some(r),
                        Some(b) => {
                            if aug[r][col].abs() < aug[b][col].abs() {
                                best = Some(r)
                            }
                        }
                    }
                }
            }
            let Some(b) = best else { break };
            aug.swap(prow, b);
            let pv = aug[prow][col];
            let mut done = true;
            for r in prow + 1..n {
                if aug[r][col] != 0 {
                    let q = aug[r][col].div_euclid(pv);
                    let prow_copy = aug[prow].clone();
                    for c in 0..=k {
                        aug[r][c] = aug[r][c]
                            .checked_sub(q.checked_mul(prow_copy[c]).ok_or(Error::Overflow("solve"))?)
                            .ok_or(Error::Overflow("solve"))?;
                    }
                    if aug[r][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if aug[prow][col] != 0 {
            pivots.push((prow, col));
            prow += 1;
        }
    }
    // rows beyond prow must have zero target residue
    for r in prow..n {
        if aug[r][k] != 0 {
            return Ok(None);
        }
    }
    // back substitution
    let mut x = vec![0i128; k];
    for &(r, c) in pivots.iter().rev() {
        let mut rhs = aug[r][k];
        for j in c + 1..k {
            rhs -= aug[r][j] * x[j];
        }
        if rhs % aug[r][c] != 0 {
            return Ok(None);
        }
        x[c] = rhs / aug[r][c];
    }
    let out: Option<Vec<i64>> = x.into_iter().map(|v| i64::try_from(v).ok()).collect();
    match out {
        Some(v) => Ok(Some(v)),
        None => Err(Error::Overflow("solve")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_small() {
        assert_eq!(det(&vec![vec![0, -1], vec![1, 0]]).unwrap(), 1);
        assert_eq!(det(&vec![vec![2, 0], vec![0, 3]]).unwrap(), 6);
        assert_eq!(det(&vec![vec![1, 2], vec![2, 4]]).unwrap(), 0);
        assert_eq!(det(&mat_identity(4)).unwrap(), 1);
    }

    #[test]
    fn hnf_full_lattice() {
        let b = row_hnf(&[vec![2, 1], vec![1, 0]]).unwrap();
        assert_eq!(b, vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn hnf_sublattice() {
        let b = row_hnf(&[vec![2, 0], vec![0, 4], vec![2, 4]]).unwrap();
        assert_eq!(b, vec![vec![2, 0], vec![0, 4]]);
    }

    #[test]
    fn kernel_of_rotation_minus_identity_is_trivial() {
        // order-4 rotation minus identity has trivial integer kernel
        let m = vec![vec![-1, -1], vec![1, -1]];
        assert!(kernel_basis(&m).unwrap().is_empty());
    }

    #[test]
    fn kernel_of_zero_map_is_everything() {
        let m = vec![vec![0, 0], vec![0, 0]];
        let b = kernel_basis(&m).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(row_hnf(&b).unwrap(), mat_identity(2));
    }

    #[test]
    fn kernel_of_diag() {
        // diag(1,-1) - I = diag(0,-2): kernel is the first axis
        let m = vec![vec![0, 0], vec![0, -2]];
        let b = kernel_basis(&m).unwrap();
        assert_eq!(b, vec![vec![1, 0]]);
    }

    #[test]
    fn primitive_normalizes_sign_and_content() {
        assert_eq!(primitive(&[-2, 4]).unwrap(), vec![1, -2]);
        assert_eq!(primitive(&[0, -3, 6]).unwrap(), vec![0, 1, -2]);
        assert!(primitive(&[0, 0]).is_err());
    }

    #[test]
    fn coordinates_in_lattice() {
        let basis = vec![vec![2, 0], vec![1, 3]];
        let c = lattice_coordinates(&basis, &[5, 3]).unwrap().unwrap();
        assert_eq!(c, vec![2, 1]);
        assert!(lattice_coordinates(&basis, &[1, 1]).unwrap().is_none());
    }
}
