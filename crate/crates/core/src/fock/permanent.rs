use crate::linalg::{CMat, C64};

/// Permanent by Ryser's formula with Gray-code subset order, `O(2^d d)`.
///
/// The permanent of the empty matrix is 1.
pub fn permanent(a: &CMat) -> C64 {
    assert!(a.is_square(), "permanent of a non-square matrix");
    let n = a.nrows();
    match n {
        0 => return C64::new(1.0, 0.0),
        1 => return a[(0, 0)],
        2 => return a[(0, 0)] * a[(1, 1)] + a[(0, 1)] * a[(1, 0)],
        _ => {}
    }
    assert!(n < 64, "permanent dimension {n} is out of reach");
    let mut row_sums = vec![C64::new(0.0, 0.0); n];
    let mut total = C64::new(0.0, 0.0);
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let next = k ^ (k >> 1);
        let col = (gray ^ next).trailing_zeros() as usize;
        let added = next & (1 << col) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if added {
                *s += a[(i, col)];
            } else {
                *s -= a[(i, col)];
            }
        }
        gray = next;
        let prod: C64 = row_sums.iter().product();
        if next.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}
