//! Solution symmetries and the maps between full (`3^N`) and reduced (`p_N`) vectors.
//!
//! Two actions preserve the null space of `A_α^{⊗N}`: permuting digit positions of the
//! ternary labels, and (for real vectors) replacing every digit `j` by `2 - j`.
//! Orbit-constant full vectors are exactly the image of [`expand`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{column_order, orbit_map, p_count, pow3, MAX_ORDER};
use crate::matrix::C64;

/// Gate tolerances for [`reduce`], [`reverse_conjugate`] and [`palindrome_check`].
///
/// Deviations are measured against `max(1, ‖x‖_∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryTolerances {
    pub orbit: f64,
    pub real: f64,
    pub palindrome: f64,
}

impl Default for SymmetryTolerances {
    fn default() -> Self {
        Self {
            orbit: 1e-10,
            real: 1e-12,
            palindrome: 1e-12,
        }
    }
}

/// A vector in `C^{3^N}` indexed by ternary labels in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct FullVector {
    order: usize,
    entries: Vec<C64>,
}

impl FullVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        let order = order_of_length(entries.len())?;
        Ok(Self { order, entries })
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            entries: vec![C64::new(0.0, 0.0); pow3(order)],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.entries
    }

    fn scale(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(1.0, f64::max)
    }

    /// `self ⊗ e` for `e ∈ C^3`, an order `N+1` vector.
    pub fn tensor3(&self, e: [C64; 3]) -> Self {
        let entries = self
            .entries
            .iter()
            .flat_map(|&x| e.iter().map(move |&v| x * v))
            .collect();
        Self {
            order: self.order + 1,
            entries,
        }
    }
}

fn order_of_length(len: usize) -> Result<usize> {
    let mut order = 0;
    let mut n = len;
    while n > 1 && n % 3 == 0 {
        n /= 3;
        order += 1;
    }
    if n != 1 || order == 0 || order > MAX_ORDER {
        return Err(Error::LengthNotPowerOfThree(len));
    }
    Ok(order)
}

/// A real vector of orbit values laid out in [`column_order`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedVector {
    order: usize,
    entries: Vec<f64>,
}

impl ReducedVector {
    pub fn new(order: usize, entries: Vec<f64>) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::InvalidOrder(order));
        }
        let expected = p_count(order);
        if entries.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: entries.len(),
            });
        }
        Ok(Self { order, entries })
    }

    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            entries: vec![0.0; p_count(order)],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn min_entry(&self) -> f64 {
        self.entries.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Averages every entry over its orbit under digit-position permutations.
///
/// Computed orbit-wise (orbit sum divided by orbit size), which equals averaging the
/// `N!` permuted copies of `x`.
pub fn symmetrize_permutation(x: &FullVector) -> FullVector {
    let order = x.order;
    let map = orbit_map(order);
    let labels = column_order(order);
    let mut sums = vec![C64::new(0.0, 0.0); labels.len()];
    for (&col, &v) in map.iter().zip(&x.entries) {
        sums[col] += v;
    }
    for (s, l) in sums.iter_mut().zip(&labels) {
        *s /= l.orbit_size() as f64;
    }
    FullVector {
        order,
        entries: map.iter().map(|&col| sums[col]).collect(),
    }
}

/// `x̂_{j_1…j_N} = x_{(2-j_1)…(2-j_N)}` for real `x`.
pub fn reverse_conjugate(x: &FullVector) -> Result<FullVector> {
    reverse_conjugate_with(x, SymmetryTolerances::default().real)
}

pub fn reverse_conjugate_with(x: &FullVector, real_tol: f64) -> Result<FullVector> {
    check_real(x, real_tol)?;
    // complementing every digit maps position i to 3^N - 1 - i
    let entries = x.entries.iter().rev().copied().collect();
    Ok(FullVector {
        order: x.order,
        entries,
    })
}

fn check_real(x: &FullVector, tol: f64) -> Result<()> {
    let bound = tol * x.scale();
    match x.entries.iter().position(|z| z.im.abs() > bound) {
        Some(index) => Err(Error::NonRealInput {
            index,
            imag: x.entries[index].im,
        }),
        None => Ok(()),
    }
}

/// `x = Q_N y`.
pub fn expand(y: &ReducedVector) -> FullVector {
    let entries = orbit_map(y.order)
        .into_iter()
        .map(|col| C64::new(y.entries[col], 0.0))
        .collect();
    FullVector {
        order: y.order,
        entries,
    }
}

/// Left inverse of [`expand`] on real orbit-constant vectors.
pub fn reduce(x: &FullVector) -> Result<ReducedVector> {
    reduce_with(x, &SymmetryTolerances::default())
}

pub fn reduce_with(x: &FullVector, tol: &SymmetryTolerances) -> Result<ReducedVector> {
    check_real(x, tol.real)?;
    let map = orbit_map(x.order);
    let mut reps: Vec<Option<f64>> = vec![None; p_count(x.order)];
    let bound = tol.orbit * x.scale();
    for (index, (&col, v)) in map.iter().zip(&x.entries).enumerate() {
        match reps[col] {
            None => reps[col] = Some(v.re),
            Some(rep) => {
                let deviation = (v.re - rep).abs();
                if deviation > bound {
                    return Err(Error::NotOrbitConstant { index, deviation });
                }
            }
        }
    }
    Ok(ReducedVector {
        order: x.order,
        entries: reps.into_iter().map(|r| r.unwrap_or(0.0)).collect(),
    })
}

/// Whether `y[N0,N1,N2] = y[N2,N1,N0]` for every orbit.
pub fn palindrome_check(y: &ReducedVector) -> bool {
    palindrome_check_with(y, SymmetryTolerances::default().palindrome)
}

pub fn palindrome_check_with(y: &ReducedVector, tol: f64) -> bool {
    let bound = tol * y.max_abs().max(1.0);
    column_order(y.order).iter().enumerate().all(|(i, l)| {
        let j = l.reversed().column_index();
        (y.entries[i] - y.entries[j]).abs() <= bound
    })
}

/// The reduced vector obtained by applying the digit reversal to `expand(y)`.
pub fn reverse_reduced(y: &ReducedVector) -> ReducedVector {
    let labels = column_order(y.order);
    let entries = labels
        .iter()
        .map(|l| y.entries[l.reversed().column_index()])
        .collect();
    ReducedVector {
        order: y.order,
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::{label_orbit, MultisetLabel, TernaryLabel};
    use crate::tensor_system::{a_alpha, kron_power, MatrixForm, PhaseAngle};

    fn re(v: &FullVector) -> Vec<f64> {
        v.entries().iter().map(|z| z.re).collect()
    }

    #[test]
    fn two_element_orbit_average() {
        let mut x = vec![0.0; 9];
        x[1] = 2.0; // label 01
        let s = symmetrize_permutation(&FullVector::from_real(&x).unwrap());
        assert_eq!(re(&s)[1], 1.0);
        assert_eq!(re(&s)[3], 1.0); // label 10
        assert_eq!(re(&s).iter().sum::<f64>(), 2.0);
    }

    #[test]
    fn orbit_constant_vector_is_fixed() {
        let y = ReducedVector::new(3, (0..10).map(|i| i as f64 * 0.5).collect()).unwrap();
        let x = expand(&y);
        assert_eq!(symmetrize_permutation(&x), x);
    }

    #[test]
    fn bad_lengths_rejected() {
        assert!(matches!(
            FullVector::from_real(&[1.0; 8]),
            Err(Error::LengthNotPowerOfThree(8))
        ));
        assert!(FullVector::from_real(&[1.0]).is_err());
        assert!(ReducedVector::new(2, vec![0.0; 5]).is_err());
    }

    #[test]
    fn reverse_conjugate_order_one() {
        let x = FullVector::from_real(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(re(&reverse_conjugate(&x).unwrap()), vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn reverse_conjugate_is_involution_and_rejects_complex() {
        let x = FullVector::from_real(&(0..27).map(|i| (i * i) as f64).collect::<Vec<_>>()).unwrap();
        let twice = reverse_conjugate(&reverse_conjugate(&x).unwrap()).unwrap();
        assert_eq!(twice, x);
        let mut entries = x.into_entries();
        entries[4].im = 1e-6;
        assert!(matches!(
            reverse_conjugate(&FullVector::new(entries).unwrap()),
            Err(Error::NonRealInput { index: 4, .. })
        ));
    }

    #[test]
    fn reverse_conjugate_matches_digit_complement() {
        let x: Vec<f64> = (0..81).map(|i| i as f64).collect();
        let r = reverse_conjugate(&FullVector::from_real(&x).unwrap()).unwrap();
        for i in 0..81 {
            let l = TernaryLabel::from_index(4, i).unwrap();
            assert_eq!(r.entries()[i].re, x[l.complement().index()]);
        }
    }

    #[test]
    fn expand_reproduces_order_two_pattern() {
        // column order [200] [101] [002] [110] [011] [020] holds a, c, f, b, e, d
        let (a, b, c, d, e, f) = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0);
        let y = ReducedVector::new(2, vec![a, c, f, b, e, d]).unwrap();
        assert_eq!(re(&expand(&y)), vec![a, b, c, b, d, e, c, e, f]);
        assert_eq!(expand(&ReducedVector::zeros(2)), FullVector::zeros(2));
        let n1 = expand(&ReducedVector::new(1, vec![1.0, 1.0, 1.0]).unwrap());
        assert_eq!(re(&n1), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn reduce_order_two_pattern() {
        let x = FullVector::from_real(&[1.0, 2.0, 3.0, 2.0, 4.0, 5.0, 3.0, 5.0, 6.0]).unwrap();
        let y = reduce(&x).unwrap();
        // oracle: label_orbit of each label places its value at that orbit's column
        let mut expect = vec![f64::NAN; 6];
        for i in 0..9 {
            let l = TernaryLabel::from_index(2, i).unwrap();
            expect[label_orbit(&l).column_index()] = x.entries()[i].re;
        }
        assert_eq!(y.entries(), expect.as_slice());
        assert_eq!(y.entries(), &[1.0, 3.0, 6.0, 2.0, 5.0, 4.0]);
    }

    #[test]
    fn reduce_rejects_non_constant_orbits() {
        let x = FullVector::from_real(&[1.0, 2.0, 3.0, 2.5, 4.0, 5.0, 3.0, 5.0, 6.0]).unwrap();
        assert!(matches!(reduce(&x), Err(Error::NotOrbitConstant { index: 3, .. })));
    }

    #[test]
    fn palindrome_examples() {
        let alpha = 2.0f64;
        let y = ReducedVector::new(
            2,
            vec![1.0, (2.0 * alpha).cos(), 1.0, -alpha.cos(), -alpha.cos(), 1.0],
        )
        .unwrap();
        assert!(palindrome_check(&y));
        let bad = ReducedVector::new(2, vec![1.0, 0.0, 2.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(!palindrome_check(&bad));
        assert!(palindrome_check(&ReducedVector::new(4, vec![1.0; 15]).unwrap()));
    }

    #[test]
    fn reverse_reduced_agrees_with_full_reversal() {
        let y = ReducedVector::new(3, (0..10).map(|i| (i as f64).sin()).collect()).unwrap();
        let full = reverse_conjugate(&expand(&y)).unwrap();
        assert_eq!(reduce(&full).unwrap(), reverse_reduced(&y));
        let l = MultisetLabel::new(2, 1, 0);
        assert_eq!(
            reverse_reduced(&y).entries()[l.column_index()],
            y.entries()[MultisetLabel::new(0, 1, 2).column_index()]
        );
    }

    #[test]
    fn symmetrization_keeps_null_vectors_null() {
        let alpha = PhaseAngle::new(2.3).unwrap();
        let a = kron_power(&a_alpha(alpha, MatrixForm::Reduced), 2).unwrap();
        let null = a.null_space(1e-12);
        assert_eq!(null.len(), 5);
        for v in null {
            let s = symmetrize_permutation(&FullVector::new(v).unwrap());
            let r = a.matvec(s.entries()).unwrap();
            assert!(r.iter().all(|z| z.norm() <= 1e-12), "{r:?}");
        }
    }
}
