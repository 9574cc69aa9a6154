use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{IntMatrix, LinError};

/// Columns spanning the kernel of `m` over F_p, in reduced echelon normalization.
pub fn kernel_mod_p(m: &IntMatrix, p: u64) -> Result<IntMatrix, LinError> {
    if !super::is_prime(p) {
        return Err(LinError::NotPrime(p));
    }
    let (rows, cols) = (m.rows(), m.cols());
    let red = m.reduce_mod(p);
    let mut a = vec![vec![0u64; cols]; rows];
    for (r, c, v) in red.entries() {
        a[r][c] = v.to_u64().expect("reduced entry");
    }
    let inv = |x: u64| -> u64 {
        let (mut res, mut b, mut e) = (1u64, x % p, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                res = res * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        res
    };
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        let Some(pr) = (row..rows).find(|&r| a[r][c] != 0) else { continue };
        a.swap(row, pr);
        let s = inv(a[row][c]);
        for x in a[row].iter_mut() {
            *x = *x * s % p;
        }
        for r in 0..rows {
            if r != row && a[r][c] != 0 {
                let f = a[r][c];
                for k in 0..cols {
                    a[r][k] = (a[r][k] + p * p - f * a[row][k]) % p;
                }
            }
        }
        pivots.push(c);
        row += 1;
        if row == rows {
            break;
        }
    }
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut columns = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut col = vec![(free, BigInt::from(1))];
        for (k, &pc) in pivots.iter().enumerate() {
            let v = a[k][free];
            if v != 0 {
                col.push((pc, BigInt::from((p - v) % p)));
            }
        }
        columns.push(col);
    }
    Ok(IntMatrix::from_columns(cols, columns)?.reduce_mod(p))
}
