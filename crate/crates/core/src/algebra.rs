//! Generalized Gell-Mann basis of su(n) and its structure constants.
//!
//! Generators are built from the matrix units `P_jk = |j⟩⟨k|`:
//!
//! * `u_jk = P_jk + P_kj` (real symmetric),
//! * `v_jk = -i (P_jk - P_kj)` (imaginary antisymmetric),
//! * `w_l  = sqrt(2 / (l (l + 1))) (Σ_{m ≤ l} P_mm - l P_{l+1,l+1})` (diagonal),
//!
//! for `1 ≤ j < k ≤ n` and `1 ≤ l ≤ n - 1`. The order is the standard nested
//! one, which reproduces the Pauli matrices at n = 2 and the textbook
//! Gell-Mann matrices at n = 3: for each `k = 2..=n` emit `u_jk, v_jk` for
//! `j = 1..k-1`, then `w_{k-1}`. Structure constants depend on this order.
//!
//! With `Tr(λiλj) = 2δij` the structure constants are read off by traces:
//! `f_ijk = Tr([λi, λj] λk) / 4i` and `d_ijk = Tr({λi, λj} λk) / 4`, so that
//! `λiλj = (2/n) δij I + Σ_k (i f_ijk + d_ijk) λk`.

use std::sync::OnceLock;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    anticommutator, c, commutator, identity_c, max_abs_c, trace, trace_of_product, CMatrix,
    RMatrix, RVector,
};

/// Entries with magnitude at or below this are dropped from sparse storage.
pub const DEFAULT_ZERO_THRESHOLD: f64 = 1e-12;

/// Tolerance on `|Tr(λiλj) - 2δij|` for a basis to be accepted.
pub const TRACE_ORTHOGONALITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratorKind {
    /// `u_jk` (1-based level indices).
    Symmetric { j: usize, k: usize },
    /// `v_jk` (1-based level indices).
    Antisymmetric { j: usize, k: usize },
    /// `w_l` (1-based).
    Diagonal { l: usize },
    /// Supplied externally through [`GellMannBasis::from_matrices`].
    External,
}

#[derive(Debug, Clone)]
pub struct GellMannBasis {
    n: usize,
    lambdas: Vec<CMatrix>,
    kinds: Vec<GeneratorKind>,
}

impl GellMannBasis {
    /// Wraps arbitrary matrices as a candidate basis. Only shapes are
    /// checked here; [`structure_constants`] rejects non-orthogonal sets.
    pub fn from_matrices(n: usize, lambdas: Vec<CMatrix>) -> Result<Self> {
        if n < 2 {
            return Err(Error::DegenerateAlgebra { n });
        }
        let s = n * n - 1;
        if lambdas.len() != s {
            return Err(Error::dims("generator count", s, lambdas.len()));
        }
        if let Some(bad) = lambdas.iter().find(|m| m.dim() != (n, n)) {
            return Err(Error::dims(
                "generator shape",
                format!("{n}x{n}"),
                format!("{}x{}", bad.nrows(), bad.ncols()),
            ));
        }
        Ok(GellMannBasis {
            n,
            kinds: vec![GeneratorKind::External; s],
            lambdas,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[CMatrix] {
        &self.lambdas
    }

    pub fn lambda(&self, i: usize) -> &CMatrix {
        &self.lambdas[i]
    }

    pub fn kinds(&self) -> &[GeneratorKind] {
        &self.kinds
    }

    /// Largest `|Tr(λiλj) - 2δij|` over all pairs, with the offending pair.
    pub fn trace_orthogonality_residual(&self) -> (f64, (usize, usize)) {
        let mut worst = (0.0, (0, 0));
        for (i, a) in self.lambdas.iter().enumerate() {
            for (j, b) in self.lambdas.iter().enumerate().skip(i) {
                let target = if i == j { 2.0 } else { 0.0 };
                let r = (trace_of_product(a.view(), b.view()) - target).norm();
                if r > worst.0 {
                    worst = (r, (i, j));
                }
            }
        }
        worst
    }

    /// Largest deviation from Hermiticity or tracelessness over all generators.
    pub fn hermitian_traceless_residual(&self) -> f64 {
        self.lambdas
            .iter()
            .map(|m| hermitian_asymmetry(m.view()).max(trace(m.view()).norm()))
            .fold(0.0, f64::max)
    }
}

fn unit(n: usize, j: usize, k: usize) -> CMatrix {
    let mut m = Array2::zeros((n, n));
    m[[j, k]] = c(1.0, 0.0);
    m
}

/// Builds the `n² - 1` generalized Gell-Mann matrices in canonical order.
pub fn build_basis(n: usize) -> Result<GellMannBasis> {
    if n < 2 {
        return Err(Error::DegenerateAlgebra { n });
    }
    let s = n * n - 1;
    let mut lambdas = Vec::with_capacity(s);
    let mut kinds = Vec::with_capacity(s);
    for k in 1..n {
        for j in 0..k {
            lambdas.push(unit(n, j, k) + unit(n, k, j));
            kinds.push(GeneratorKind::Symmetric { j: j + 1, k: k + 1 });

            let mut v = Array2::zeros((n, n));
            v[[j, k]] = c(0.0, -1.0);
            v[[k, j]] = c(0.0, 1.0);
            lambdas.push(v);
            kinds.push(GeneratorKind::Antisymmetric { j: j + 1, k: k + 1 });
        }
        // w_l with l = k: ones on the first l diagonal slots, -l on slot l+1.
        let l = k as f64;
        let scale = (2.0 / (l * (l + 1.0))).sqrt();
        let mut w = Array2::zeros((n, n));
        for m in 0..k {
            w[[m, m]] = c(scale, 0.0);
        }
        w[[k, k]] = c(-l * scale, 0.0);
        lambdas.push(w);
        kinds.push(GeneratorKind::Diagonal { l: k });
    }
    Ok(GellMannBasis { n, lambdas, kinds })
}

/// One nonzero entry of a rank-3 tensor, 0-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

/// Dense adjoint matrices `(F_i)_jk = f_ijk`, `(D_i)_jk = d_ijk` and their
/// stacks `F = (F_1, …, F_s)ᵀ`, `D = (D_1, …, D_s)ᵀ`, so that
/// `vec(Θ⁻(β)) = Fβ` and `vec(Θ⁺(β)) = Dβ`.
#[derive(Debug, Clone)]
pub struct AdjointMatrices {
    pub f_mats: Vec<RMatrix>,
    pub d_mats: Vec<RMatrix>,
    pub f_stack: RMatrix,
    pub d_stack: RMatrix,
}

#[derive(Debug)]
pub struct StructureConstants {
    n: usize,
    s: usize,
    zero_threshold: f64,
    f_canonical: Vec<TensorEntry>,
    d_canonical: Vec<TensorEntry>,
    f_expanded: Vec<TensorEntry>,
    d_expanded: Vec<TensorEntry>,
    f_dense: Vec<f64>,
    d_dense: Vec<f64>,
    adjoint: OnceLock<AdjointMatrices>,
}

/// Structure constants with the default zero threshold.
pub fn structure_constants(basis: &GellMannBasis) -> Result<StructureConstants> {
    StructureConstants::with_threshold(basis, DEFAULT_ZERO_THRESHOLD)
}

const PERMUTATIONS: [([usize; 3], f64); 6] = [
    ([0, 1, 2], 1.0),
    ([1, 2, 0], 1.0),
    ([2, 0, 1], 1.0),
    ([1, 0, 2], -1.0),
    ([0, 2, 1], -1.0),
    ([2, 1, 0], -1.0),
];

impl StructureConstants {
    pub fn with_threshold(basis: &GellMannBasis, zero_threshold: f64) -> Result<Self> {
        let (residual, (i, j)) = basis.trace_orthogonality_residual();
        if residual > TRACE_ORTHOGONALITY_TOL {
            return Err(Error::TraceOrthogonality {
                i: i + 1,
                j: j + 1,
                residual,
            });
        }
        let n = basis.n();
        let s = basis.s();
        let lam = basis.lambdas();

        let mut f_canonical = Vec::new();
        let mut d_canonical = Vec::new();
        for a in 0..s {
            for b in a..s {
                let comm = commutator(&lam[a], &lam[b]);
                let anti = anticommutator(&lam[a], &lam[b]);
                for k in b..s {
                    if a < b && b < k {
                        let f = trace_of_product(comm.view(), lam[k].view()) / c(0.0, 4.0);
                        if f.re.abs() > zero_threshold {
                            f_canonical.push(TensorEntry {
                                i: a,
                                j: b,
                                k,
                                value: f.re,
                            });
                        }
                    }
                    let d = trace_of_product(anti.view(), lam[k].view()) / 4.0;
                    if d.re.abs() > zero_threshold {
                        d_canonical.push(TensorEntry {
                            i: a,
                            j: b,
                            k,
                            value: d.re,
                        });
                    }
                }
            }
        }

        let idx = |i: usize, j: usize, k: usize| (i * s + j) * s + k;
        let mut f_dense = vec![0.0; s * s * s];
        let mut d_dense = vec![0.0; s * s * s];
        for e in &f_canonical {
            let t = [e.i, e.j, e.k];
            for (p, sign) in PERMUTATIONS {
                f_dense[idx(t[p[0]], t[p[1]], t[p[2]])] = sign * e.value;
            }
        }
        for e in &d_canonical {
            let t = [e.i, e.j, e.k];
            for (p, _) in PERMUTATIONS {
                d_dense[idx(t[p[0]], t[p[1]], t[p[2]])] = e.value;
            }
        }
        let expand = |dense: &[f64]| {
            let mut out = Vec::new();
            for i in 0..s {
                for j in 0..s {
                    for k in 0..s {
                        let v = dense[idx(i, j, k)];
                        if v != 0.0 {
                            out.push(TensorEntry { i, j, k, value: v });
                        }
                    }
                }
            }
            out
        };
        let f_expanded = expand(&f_dense);
        let d_expanded = expand(&d_dense);

        Ok(StructureConstants {
            n,
            s,
            zero_threshold,
            f_canonical,
            d_canonical,
            f_expanded,
            d_expanded,
            f_dense,
            d_dense,
            adjoint: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn zero_threshold(&self) -> f64 {
        self.zero_threshold
    }

    /// Nonzero `f_ijk` with `i < j < k` (0-based).
    pub fn f_canonical(&self) -> &[TensorEntry] {
        &self.f_canonical
    }

    /// Nonzero `d_ijk` with `i ≤ j ≤ k` (0-based).
    pub fn d_canonical(&self) -> &[TensorEntry] {
        &self.d_canonical
    }

    /// Every nonzero `f_ijk` over all index orders.
    pub fn f_entries(&self) -> &[TensorEntry] {
        &self.f_expanded
    }

    /// Every nonzero `d_ijk` over all index orders.
    pub fn d_entries(&self) -> &[TensorEntry] {
        &self.d_expanded
    }

    /// `f_ijk`, 0-based.
    #[inline]
    pub fn f(&self, i: usize, j: usize, k: usize) -> f64 {
        self.f_dense[(i * self.s + j) * self.s + k]
    }

    /// `d_ijk`, 0-based.
    #[inline]
    pub fn d(&self, i: usize, j: usize, k: usize) -> f64 {
        self.d_dense[(i * self.s + j) * self.s + k]
    }

    pub fn adjoint(&self) -> &AdjointMatrices {
        self.adjoint.get_or_init(|| {
            let s = self.s;
            let f_mats: Vec<RMatrix> = (0..s)
                .map(|i| Array2::from_shape_fn((s, s), |(j, k)| self.f(i, j, k)))
                .collect();
            let d_mats: Vec<RMatrix> = (0..s)
                .map(|i| Array2::from_shape_fn((s, s), |(j, k)| self.d(i, j, k)))
                .collect();
            // Block i holds F_iᵀ, matching the column-major vec of Θ⁻.
            let f_stack = Array2::from_shape_fn((s * s, s), |(r, k)| {
                let (i, j) = (r / s, r % s);
                f_mats[i][[k, j]]
            });
            let d_stack = Array2::from_shape_fn((s * s, s), |(r, k)| {
                let (i, j) = (r / s, r % s);
                d_mats[i][[k, j]]
            });
            AdjointMatrices {
                f_mats,
                d_mats,
                f_stack,
                d_stack,
            }
        })
    }
}

fn hermitian_asymmetry(h: ArrayView2<Complex64>) -> f64 {
    let mut m: f64 = 0.0;
    for ((i, j), z) in h.indexed_iter() {
        m = m.max((z - h[[j, i]].conj()).norm());
    }
    m
}

/// Relative Hermiticity tolerance used by [`decompose_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Returns `(α₀, α)` with `α₀ = Tr(H)` and `αᵢ = Tr(Hλᵢ)`.
pub fn decompose_hermitian(
    h: ArrayView2<Complex64>,
    basis: &GellMannBasis,
) -> Result<(f64, RVector)> {
    let n = basis.n();
    if h.dim() != (n, n) {
        return Err(Error::dims(
            "Hermitian operator",
            format!("{n}x{n}"),
            format!("{}x{}", h.nrows(), h.ncols()),
        ));
    }
    let asym = hermitian_asymmetry(h);
    let scale = max_abs_c(h.iter()).max(1.0);
    if asym > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian {
            max_asymmetry: asym,
        });
    }
    let alpha0 = trace(h).re;
    let alpha = Array1::from_iter(
        basis
            .lambdas()
            .iter()
            .map(|l| trace_of_product(h, l.view()).re),
    );
    Ok((alpha0, alpha))
}

/// `(1/n) α₀ I + (1/2) Σ αᵢ λᵢ`.
pub fn reconstruct(alpha0: f64, alpha: ArrayView1<f64>, basis: &GellMannBasis) -> Result<CMatrix> {
    let n = basis.n();
    if alpha.len() != basis.s() {
        return Err(Error::dims("coefficient vector", basis.s(), alpha.len()));
    }
    let mut out = identity_c(n) * c(alpha0 / n as f64, 0.0);
    for (a, l) in alpha.iter().zip(basis.lambdas()) {
        if *a != 0.0 {
            out.scaled_add(c(0.5 * a, 0.0), l);
        }
    }
    Ok(out)
}
