//! Reference computations that do not go through the library's closed forms.
#![allow(dead_code)]

use tensor_nns::{ComplexDenseMatrix, C64};

pub fn zpow(alpha: f64, k: i32) -> C64 {
    C64::from_polar(1.0, alpha * k as f64)
}

/// Orbit columns `[N0,N1,N2]`, grouped by increasing `N1`, `N0` decreasing inside a group.
pub fn orbit_columns(n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for n1 in 0..=n {
        for n0 in (0..=n - n1).rev() {
            out.push((n0, n1, n - n0 - n1));
        }
    }
    out
}

fn ternary_digits(n: usize, mut index: usize) -> Vec<usize> {
    let mut d = vec![0; n];
    for slot in d.iter_mut().rev() {
        *slot = index % 3;
        index /= 3;
    }
    d
}

fn orbit_column(digits: &[usize], columns: &[(usize, usize, usize)]) -> usize {
    let mut counts = [0usize; 3];
    for &d in digits {
        counts[d] += 1;
    }
    columns
        .iter()
        .position(|&c| c == (counts[0], counts[1], counts[2]))
        .unwrap()
}

/// Row `r` (binary digits, most significant first) of `A_red^{⊗N} Q_N`, summed label by label.
pub fn b_row(alpha: f64, row_digits: &[usize]) -> Vec<C64> {
    let n = row_digits.len();
    let a = [
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0), -zpow(alpha, 2)],
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0), zpow(alpha, 1)],
    ];
    let columns = orbit_columns(n);
    let mut row = vec![C64::new(0.0, 0.0); columns.len()];
    for t in 0..3usize.pow(n as u32) {
        let digits = ternary_digits(n, t);
        let mut p = C64::new(1.0, 0.0);
        for (&r, &d) in row_digits.iter().zip(&digits) {
            p *= a[r][d];
            if p == C64::new(0.0, 0.0) {
                break;
            }
        }
        if p != C64::new(0.0, 0.0) {
            row[orbit_column(&digits, &columns)] += p;
        }
    }
    row
}

pub fn b_oracle(alpha: f64, n: usize) -> ComplexDenseMatrix {
    let rows: Vec<Vec<C64>> = (0..1usize << n)
        .map(|r| {
            let digits: Vec<usize> = (0..n).map(|i| (r >> (n - 1 - i)) & 1).collect();
            b_row(alpha, &digits)
        })
        .collect();
    ComplexDenseMatrix::from_rows(&rows).unwrap()
}

/// Rows `0…0, 0…01, …, 1…1` of the oracle `B`.
pub fn c_oracle(alpha: f64, n: usize) -> ComplexDenseMatrix {
    let rows: Vec<Vec<C64>> = (0..=n)
        .map(|ones| {
            let digits: Vec<usize> = (0..n).map(|i| usize::from(i >= n - ones)).collect();
            b_row(alpha, &digits)
        })
        .collect();
    ComplexDenseMatrix::from_rows(&rows).unwrap()
}

/// `C_{α,2}` as displayed, one polynomial in `z` per entry.
pub fn displayed_c2(alpha: f64) -> ComplexDenseMatrix {
    let z = |k| zpow(alpha, k);
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    ComplexDenseMatrix::from_rows(&[
        vec![one, -2.0 * z(2), z(4), o, o, o],
        vec![o, z(1), -z(3), one, -z(2), o],
        vec![o, o, z(2), o, 2.0 * z(1), one],
    ])
    .unwrap()
}

pub fn displayed_c3(alpha: f64) -> ComplexDenseMatrix {
    let z = |k| zpow(alpha, k);
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    ComplexDenseMatrix::from_rows(&[
        vec![one, -3.0 * z(2), 3.0 * z(4), -z(6), o, o, o, o, o, o],
        vec![o, z(1), -2.0 * z(3), z(5), one, -2.0 * z(2), z(4), o, o, o],
        vec![o, o, z(2), -z(4), o, 2.0 * z(1), -2.0 * z(3), one, -z(2), o],
        vec![o, o, o, z(3), o, o, 3.0 * z(2), o, 3.0 * z(1), one],
    ])
    .unwrap()
}

/// `max_i |(C y)_i| / max_i |y_i|` with the oracle `C`.
pub fn oracle_residual(alpha: f64, y: &[f64]) -> f64 {
    let n = orbit_columns_len_to_order(y.len());
    let c = c_oracle(alpha, n);
    let r = c.matvec_real(y).unwrap();
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    r.iter().fold(0.0f64, |m, v| m.max(v.norm())) / scale
}

fn orbit_columns_len_to_order(p: usize) -> usize {
    (0..).find(|n| (n + 1) * (n + 2) / 2 == p).unwrap()
}

/// `min_j (hᵀ [Re C; Im C])_j` with the oracle `C`.
pub fn oracle_margin(alpha: f64, n: usize, h: &[f64]) -> f64 {
    let c = c_oracle(alpha, n);
    let rows = c.rows();
    (0..c.cols())
        .map(|j| {
            (0..rows)
                .map(|i| h[i] * c[(i, j)].re + h[rows + i] * c[(i, j)].im)
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Average of `x` over all `N!` permutations of digit positions.
pub fn permutation_average(n: usize, x: &[f64]) -> Vec<f64> {
    let perms = permutations(n);
    let mut out = vec![0.0; x.len()];
    for (i, slot) in out.iter_mut().enumerate() {
        let digits = ternary_digits(n, i);
        let mut s = 0.0;
        for p in &perms {
            let j = p.iter().fold(0, |acc, &k| acc * 3 + digits[k]);
            s += x[j];
        }
        *slot = s / perms.len() as f64;
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}
