//! Small dense helpers shared by the algebra, Θ-map and realization modules.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Zip};
use num_complex::Complex64;

pub type CMatrix = Array2<Complex64>;
pub type CVector = Array1<Complex64>;
pub type RMatrix = Array2<f64>;
pub type RVector = Array1<f64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn to_complex_vec(v: ArrayView1<f64>) -> CVector {
    v.mapv(|x| c(x, 0.0))
}

pub fn to_complex_mat(m: ArrayView2<f64>) -> CMatrix {
    m.mapv(|x| c(x, 0.0))
}

pub fn conj_vec(v: ArrayView1<Complex64>) -> CVector {
    v.mapv(|z| z.conj())
}

pub fn dagger(m: ArrayView2<Complex64>) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.dot(b) - b.dot(a)
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.dot(b) + b.dot(a)
}

pub fn trace(m: ArrayView2<Complex64>) -> Complex64 {
    m.diag().sum()
}

/// Tr(AB) without forming the product.
pub fn trace_of_product(a: ArrayView2<Complex64>, b: ArrayView2<Complex64>) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for ((i, j), &x) in a.indexed_iter() {
        acc += x * b[[j, i]];
    }
    acc
}

pub fn max_abs_c<'a, I: IntoIterator<Item = &'a Complex64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn max_abs_r<'a, I: IntoIterator<Item = &'a f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_diff_c(a: ArrayView2<Complex64>, b: ArrayView2<Complex64>) -> f64 {
    let mut m: f64 = 0.0;
    Zip::from(a)
        .and(b)
        .for_each(|x, y| m = m.max((x - y).norm()));
    m
}

pub fn max_diff_r(a: ArrayView2<f64>, b: ArrayView2<f64>) -> f64 {
    let mut m: f64 = 0.0;
    Zip::from(a)
        .and(b)
        .for_each(|x, y| m = m.max((x - y).abs()));
    m
}

/// Splits a complex matrix into its real part after checking that the
/// imaginary part is negligible. Returns the real part and the largest
/// imaginary magnitude seen.
pub fn real_part(m: ArrayView2<Complex64>) -> (RMatrix, f64) {
    let im = max_abs_r(m.iter().map(|z| &z.im));
    (m.mapv(|z| z.re), im)
}

pub fn real_part_vec(v: ArrayView1<Complex64>) -> (RVector, f64) {
    let im = max_abs_r(v.iter().map(|z| &z.im));
    (v.mapv(|z| z.re), im)
}

pub fn identity_c(n: usize) -> CMatrix {
    Array2::from_diag_elem(n, c(1.0, 0.0))
}
