//! Operator forms `c₀ I + Σ cᵢ λᵢ` and matrices of them.
//!
//! The product rule `λiλj = (2/n) δij I + Σ_k (i f_ijk + d_ijk) λk` closes
//! the set of forms under multiplication, so operator identities over the
//! generator vector `x = (λ₁, …, λₛ)ᵀ` can be checked exactly in coefficient
//! space: two forms are equal as operators iff their coefficients agree.
//!
//! The matrix represented by a form is `c₀ I + Σ cᵢ λᵢ`, i.e.
//! [`crate::algebra::reconstruct`] with `α₀ = n c₀` and `α = 2c`.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use num_complex::Complex64;

use crate::algebra::{GellMannBasis, StructureConstants};
use crate::error::{Error, Result};
use crate::linalg::{c, identity_c, CMatrix, CVector, I};
use crate::report::IdentityCheck;
use crate::theta::ThetaContext;

/// Residual tolerance for the operator identity checks.
pub const FORM_IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorForm {
    n: usize,
    c0: Complex64,
    c: CVector,
}

impl OperatorForm {
    pub fn new(n: usize, c0: Complex64, coeffs: CVector) -> Result<Self> {
        if n < 2 {
            return Err(Error::DegenerateAlgebra { n });
        }
        if coeffs.len() != n * n - 1 {
            return Err(Error::dims("form coefficients", n * n - 1, coeffs.len()));
        }
        Ok(OperatorForm { n, c0, c: coeffs })
    }

    pub fn zero(n: usize) -> Self {
        Self::scalar(n, c(0.0, 0.0))
    }

    pub fn scalar(n: usize, z: Complex64) -> Self {
        OperatorForm {
            n,
            c0: z,
            c: Array1::zeros(n * n - 1),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, c(1.0, 0.0))
    }

    /// The generator `λ_{i+1}` (0-based index).
    pub fn generator(n: usize, i: usize) -> Self {
        let mut f = Self::zero(n);
        f.c[i] = c(1.0, 0.0);
        f
    }

    /// `Σ βᵢ λᵢ`, i.e. the scalar operator `βx`.
    pub fn linear(n: usize, beta: ArrayView1<Complex64>) -> Result<Self> {
        Self::new(n, c(0.0, 0.0), beta.to_owned())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c0(&self) -> Complex64 {
        self.c0
    }

    pub fn coeffs(&self) -> &CVector {
        &self.c
    }

    fn same_context(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ContextMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_context(other)?;
        Ok(OperatorForm {
            n: self.n,
            c0: self.c0 + other.c0,
            c: &self.c + &other.c,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_context(other)?;
        Ok(OperatorForm {
            n: self.n,
            c0: self.c0 - other.c0,
            c: &self.c - &other.c,
        })
    }

    pub fn scale(&self, z: Complex64) -> Self {
        OperatorForm {
            n: self.n,
            c0: self.c0 * z,
            c: self.c.mapv(|x| x * z),
        }
    }

    /// Largest coefficient difference, identity part included.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_context(other)?;
        let d0 = (self.c0 - other.c0).norm();
        Ok(self
            .c
            .iter()
            .zip(other.c.iter())
            .fold(d0, |m, (a, b)| m.max((a - b).norm())))
    }

    pub fn to_matrix(&self, basis: &GellMannBasis) -> Result<CMatrix> {
        if basis.n() != self.n {
            return Err(Error::ContextMismatch {
                left: self.n,
                right: basis.n(),
            });
        }
        let mut m = identity_c(self.n) * self.c0;
        for (z, l) in self.c.iter().zip(basis.lambdas()) {
            m.scaled_add(*z, l);
        }
        Ok(m)
    }
}

fn check_sc(sc: &StructureConstants, a: &OperatorForm) -> Result<()> {
    if sc.n() != a.n {
        return Err(Error::ContextMismatch {
            left: a.n,
            right: sc.n(),
        });
    }
    Ok(())
}

/// Operator product `ab` expanded back onto the basis.
pub fn form_product(
    a: &OperatorForm,
    b: &OperatorForm,
    sc: &StructureConstants,
) -> Result<OperatorForm> {
    a.same_context(b)?;
    check_sc(sc, a)?;
    let n = a.n as f64;
    let dot: Complex64 = a.c.iter().zip(b.c.iter()).map(|(x, y)| x * y).sum();
    let c0 = a.c0 * b.c0 + dot * (2.0 / n);
    let mut coeffs = &b.c * a.c0 + &a.c * b.c0;
    for e in sc.f_entries() {
        coeffs[e.k] += I * a.c[e.i] * b.c[e.j] * e.value;
    }
    for e in sc.d_entries() {
        coeffs[e.k] += a.c[e.i] * b.c[e.j] * e.value;
    }
    Ok(OperatorForm {
        n: a.n,
        c0,
        c: coeffs,
    })
}

pub fn form_commutator(
    a: &OperatorForm,
    b: &OperatorForm,
    sc: &StructureConstants,
) -> Result<OperatorForm> {
    form_product(a, b, sc)?.sub(&form_product(b, a, sc)?)
}

pub fn form_anticommutator(
    a: &OperatorForm,
    b: &OperatorForm,
    sc: &StructureConstants,
) -> Result<OperatorForm> {
    form_product(a, b, sc)?.add(&form_product(b, a, sc)?)
}

/// Row-major matrix of operator forms over a common algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct FormMatrix {
    rows: usize,
    cols: usize,
    n: usize,
    entries: Vec<OperatorForm>,
}

impl FormMatrix {
    pub fn new(n: usize, rows: usize, cols: usize, entries: Vec<OperatorForm>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::dims(
                "form matrix entries",
                rows * cols,
                entries.len(),
            ));
        }
        if let Some(bad) = entries.iter().find(|e| e.n != n) {
            return Err(Error::ContextMismatch {
                left: n,
                right: bad.n,
            });
        }
        Ok(FormMatrix {
            rows,
            cols,
            n,
            entries,
        })
    }

    pub fn column(n: usize, entries: Vec<OperatorForm>) -> Result<Self> {
        Self::new(n, entries.len(), 1, entries)
    }

    /// The system variables at time zero, `x(0) = (λ₁, …, λₛ)ᵀ`.
    pub fn generators(n: usize) -> Self {
        let s = n * n - 1;
        FormMatrix {
            rows: s,
            cols: 1,
            n,
            entries: (0..s).map(|i| OperatorForm::generator(n, i)).collect(),
        }
    }

    /// `(affine + M x)` as a column: entry `i` is `affine_i I + Σ_j M_ij λ_j`.
    pub fn affine(
        n: usize,
        affine: ArrayView1<Complex64>,
        m: ArrayView2<Complex64>,
    ) -> Result<Self> {
        if affine.len() != m.nrows() {
            return Err(Error::dims("affine offset", m.nrows(), affine.len()));
        }
        let entries = m
            .rows()
            .into_iter()
            .zip(affine.iter())
            .map(|(row, z)| OperatorForm::new(n, *z, row.to_owned()))
            .collect::<Result<Vec<_>>>()?;
        Self::column(n, entries)
    }

    /// `M x` as a column of forms.
    pub fn linear(n: usize, m: ArrayView2<Complex64>) -> Result<Self> {
        Self::affine(n, Array1::zeros(m.nrows()).view(), m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &OperatorForm {
        &self.entries[r * self.cols + c]
    }

    pub fn entries(&self) -> &[OperatorForm] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.get(r, c).clone());
            }
        }
        FormMatrix {
            rows: self.cols,
            cols: self.rows,
            n: self.n,
            entries,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.n, self.rows, self.cols, entries)
    }

    pub fn scale(&self, z: Complex64) -> Self {
        FormMatrix {
            rows: self.rows,
            cols: self.cols,
            n: self.n,
            entries: self.entries.iter().map(|e| e.scale(z)).collect(),
        }
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::dims(
                "form matrix shape",
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        if self.n != other.n {
            return Err(Error::ContextMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Largest coefficient difference over all entries.
    pub fn max_residual(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        self.entries
            .iter()
            .zip(&other.entries)
            .try_fold(0.0f64, |m, (a, b)| Ok(m.max(a.max_abs_diff(b)?)))
    }

    /// Ordered product: entry `(i, j)` is `Σ_k a_ik b_kj` with `a` on the left.
    pub fn matmul(&self, other: &Self, sc: &StructureConstants) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::dims("form matrix product", self.cols, other.rows));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = OperatorForm::zero(self.n);
                for k in 0..self.cols {
                    acc = acc.add(&form_product(self.get(i, k), other.get(k, j), sc)?)?;
                }
                entries.push(acc);
            }
        }
        Self::new(self.n, self.rows, other.cols, entries)
    }

    /// `[u, vᵀ] = u vᵀ - (v uᵀ)ᵀ` for column vectors: entry `(i, j)` is `[u_i, v_j]`.
    pub fn outer_commutator(u: &Self, v: &Self, sc: &StructureConstants) -> Result<Self> {
        if u.cols != 1 || v.cols != 1 {
            return Err(Error::dims(
                "commutator operands",
                "column vectors",
                format!("{}x{} and {}x{}", u.rows, u.cols, v.rows, v.cols),
            ));
        }
        let mut entries = Vec::with_capacity(u.rows * v.rows);
        for a in &u.entries {
            for b in &v.entries {
                entries.push(form_commutator(a, b, sc)?);
            }
        }
        Self::new(u.n, u.rows, v.rows, entries)
    }

    /// Concatenates column vectors side by side.
    pub fn hstack(n: usize, columns: &[FormMatrix]) -> Result<Self> {
        let rows = columns.first().map(|c| c.rows).unwrap_or(0);
        if let Some(bad) = columns.iter().find(|c| c.cols != 1 || c.rows != rows) {
            return Err(Error::dims(
                "stacked column",
                format!("{rows}x1"),
                format!("{}x{}", bad.rows, bad.cols),
            ));
        }
        let mut entries = Vec::with_capacity(rows * columns.len());
        for r in 0..rows {
            for col in columns {
                entries.push(col.entries[r].clone());
            }
        }
        Self::new(n, rows, columns.len(), entries)
    }
}

/// Checks `[λi, λj] = 2i Σ f_ijk λk` and `{λi, λj} = (4/n) δij I + 2 Σ d_ijk λk`
/// with the left sides computed by n×n matrix products, so the structure
/// constants are tested against the defining representation.
pub fn verify_ccr(basis: &GellMannBasis, sc: &StructureConstants) -> Result<Vec<IdentityCheck>> {
    let n = basis.n();
    if sc.n() != n {
        return Err(Error::ContextMismatch {
            left: n,
            right: sc.n(),
        });
    }
    let s = basis.s();
    let th = ThetaContext::new(sc);
    let mut comm = IdentityCheck::new("ccr_commutator", 0.0, FORM_IDENTITY_TOL);
    let mut anti = IdentityCheck::new("ccr_anticommutator", 0.0, FORM_IDENTITY_TOL);
    // Θ±(x) entry (i, j) as forms: row i of Θ±(e_k) stacked over k.
    let mut theta_minus_x = vec![Array1::<Complex64>::zeros(s); s * s];
    let mut theta_plus_x = vec![Array1::<Complex64>::zeros(s); s * s];
    for k in 0..s {
        let mut e = Array1::<f64>::zeros(s);
        e[k] = 1.0;
        let tm = th.theta_minus(e.view())?;
        let tp = th.theta_plus(e.view())?;
        for i in 0..s {
            for j in 0..s {
                theta_minus_x[i * s + j][k] = c(tm[[i, j]], 0.0);
                theta_plus_x[i * s + j][k] = c(tp[[i, j]], 0.0);
            }
        }
    }
    let lam = basis.lambdas();
    for i in 0..s {
        for j in 0..s {
            let lhs_c = crate::linalg::commutator(&lam[i], &lam[j]);
            let rhs_c = OperatorForm::new(
                n,
                c(0.0, 0.0),
                theta_minus_x[i * s + j].mapv(|z| z * 2.0 * I),
            )?;
            comm.absorb(
                crate::linalg::max_diff_c(lhs_c.view(), rhs_c.to_matrix(basis)?.view()),
                FORM_IDENTITY_TOL,
            );
            let lhs_a = crate::linalg::anticommutator(&lam[i], &lam[j]);
            let delta = if i == j { 4.0 / n as f64 } else { 0.0 };
            let rhs_a =
                OperatorForm::new(n, c(delta, 0.0), theta_plus_x[i * s + j].mapv(|z| z * 2.0))?;
            anti.absorb(
                crate::linalg::max_diff_c(lhs_a.view(), rhs_a.to_matrix(basis)?.view()),
                FORM_IDENTITY_TOL,
            );
        }
    }
    Ok(vec![comm, anti])
}

fn check_rows(what: &str, m: ArrayView2<Complex64>, s: usize) -> Result<()> {
    if m.ncols() != s {
        return Err(Error::dims(
            what,
            format!("_x{s}"),
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    Ok(())
}

/// Left and right sides of the three commutator identities for
/// `A, B ∈ ℂ^{n_w×s}` evaluated at `x(0)`:
///
/// * `[x, (Ax)ᵀ] = -2i (Θ⁻(A₁)x, …, Θ⁻(A_nw)x)`
/// * `[x, (Ax)ᵀ] Bx = -2i Σ_k ((2/n)Θ⁻(A_k)B_kᵀ + Θ⁻(A_k)Θ⁺(B_k)x - iΘ⁻(A_k)Θ⁻(B_k)x)`
/// * `(Bx)ᵀ [Ax, xᵀ] = 2i Σ_k ((2/n)Θ⁻(A_k)B_kᵀ + Θ⁻(A_k)Θ⁺(B_k)x + iΘ⁻(A_k)Θ⁻(B_k)x)ᵀ`
pub fn verify_linear_commutators(
    a: ArrayView2<Complex64>,
    b: ArrayView2<Complex64>,
    sc: &StructureConstants,
) -> Result<Vec<IdentityCheck>> {
    let n = sc.n();
    let s = sc.s();
    check_rows("A", a, s)?;
    check_rows("B", b, s)?;
    if a.nrows() != b.nrows() {
        return Err(Error::dims("rows of B", a.nrows(), b.nrows()));
    }
    let th = ThetaContext::new(sc);
    let x = FormMatrix::generators(n);
    let ax = FormMatrix::linear(n, a)?;
    let bx = FormMatrix::linear(n, b)?;

    let lhs_a = FormMatrix::outer_commutator(&x, &ax, sc)?;
    let mut cols = Vec::new();
    let mut sum_b = FormMatrix::column(n, vec![OperatorForm::zero(n); s])?;
    let mut sum_c = sum_b.clone();
    for (ak, bk) in a.rows().into_iter().zip(b.rows()) {
        let tma = th.theta_minus(ak)?;
        let tmb = th.theta_minus(bk)?;
        let tpb = th.theta_plus(bk)?;
        cols.push(FormMatrix::linear(n, tma.view())?.scale(c(0.0, -2.0)));
        let constant = tma.dot(&bk) * (2.0 / n as f64);
        let plus = tma.dot(&tpb);
        let minus = tma.dot(&tmb);
        let m_b = &plus - &minus * I;
        let m_c = &plus + &minus * I;
        sum_b = sum_b.add(&FormMatrix::affine(n, constant.view(), m_b.view())?)?;
        sum_c = sum_c.add(&FormMatrix::affine(n, constant.view(), m_c.view())?)?;
    }
    let rhs_a = FormMatrix::hstack(n, &cols)?;
    let rhs_b = sum_b.scale(c(0.0, -2.0));
    let rhs_c = sum_c.scale(c(0.0, 2.0)).transpose();

    let lhs_b = lhs_a.matmul(&bx, sc)?;
    let lhs_c = bx
        .transpose()
        .matmul(&FormMatrix::outer_commutator(&ax, &x, sc)?, sc)?;

    Ok(vec![
        IdentityCheck::new(
            "commutator_x_linear",
            lhs_a.max_residual(&rhs_a)?,
            FORM_IDENTITY_TOL,
        ),
        IdentityCheck::new(
            "commutator_x_linear_times_linear",
            lhs_b.max_residual(&rhs_b)?,
            FORM_IDENTITY_TOL,
        ),
        IdentityCheck::new(
            "linear_times_commutator_linear_x",
            lhs_c.max_residual(&rhs_c)?,
            FORM_IDENTITY_TOL,
        ),
    ])
}

/// Hamiltonian and coupling operators of a plant as forms: `H = αx`,
/// `L = Λx`, `L# = Λ#x`.
pub struct PlantOperators {
    pub x: FormMatrix,
    pub h: OperatorForm,
    pub l: FormMatrix,
    pub l_conj: FormMatrix,
}

impl PlantOperators {
    pub fn new(alpha: ArrayView1<f64>, lambda: ArrayView2<Complex64>, n: usize) -> Result<Self> {
        let s = n * n - 1;
        if alpha.len() != s {
            return Err(Error::dims("alpha", s, alpha.len()));
        }
        check_rows("Lambda", lambda, s)?;
        Ok(PlantOperators {
            x: FormMatrix::generators(n),
            h: OperatorForm::linear(n, alpha.mapv(|a| c(a, 0.0)).view())?,
            l: FormMatrix::linear(n, lambda)?,
            l_conj: FormMatrix::linear(n, lambda.mapv(|z| z.conj()).view())?,
        })
    }

    /// `[L#, xᵀ]ᵀ L`, entry `i` is `Σ_k [L_k*, x_i] L_k`.
    pub fn ldag_x_l(&self, sc: &StructureConstants) -> Result<FormMatrix> {
        FormMatrix::outer_commutator(&self.l_conj, &self.x, sc)?
            .transpose()
            .matmul(&self.l, sc)
    }

    /// `(L† [x, Lᵀ]ᵀ)ᵀ`, entry `i` is `Σ_k L_k* [x_i, L_k]`.
    pub fn ldag_comm_x_l(&self, sc: &StructureConstants) -> Result<FormMatrix> {
        Ok(self
            .l_conj
            .transpose()
            .matmul(
                &FormMatrix::outer_commutator(&self.x, &self.l, sc)?.transpose(),
                sc,
            )?
            .transpose())
    }

    /// Lindblad drift `-i[x, H] + ½((L†[x, Lᵀ]ᵀ)ᵀ + [L#, xᵀ]ᵀ L)` at `x(0)`.
    pub fn lindblad_drift(&self, sc: &StructureConstants) -> Result<FormMatrix> {
        let h = FormMatrix::column(self.h.n(), vec![self.h.clone()])?;
        let xh = FormMatrix::outer_commutator(&self.x, &h, sc)?;
        let diss = self.ldag_comm_x_l(sc)?.add(&self.ldag_x_l(sc)?)?;
        xh.scale(c(0.0, -1.0)).add(&diss.scale(c(0.5, 0.0)))
    }

    /// Coefficients of `dW̄₁` and `dW̄₂` in the Heisenberg evolution:
    /// `½([x, Lᵀ] - [x, L†])` and `-(i/2)([x, Lᵀ] + [x, L†])`, one column per field.
    pub fn quadrature_noise(&self, sc: &StructureConstants) -> Result<(FormMatrix, FormMatrix)> {
        let xl = FormMatrix::outer_commutator(&self.x, &self.l, sc)?;
        let xl_dag = FormMatrix::outer_commutator(&self.x, &self.l_conj, sc)?;
        let w1 = xl.add(&xl_dag.scale(c(-1.0, 0.0)))?.scale(c(0.5, 0.0));
        let w2 = xl.add(&xl_dag)?.scale(c(0.0, -0.5));
        Ok((w1, w2))
    }
}

/// Checks the five component identities of the Heisenberg evolution for
/// `H = αx`, `L = Λx` at `x(0)`:
///
/// * `[x, H] = -2i Θ⁻(α) x`
/// * `[x, Lᵀ] = -2i (Θ⁻(Λ_k) x)_k`
/// * `[x, L†] = -2i (Θ⁻(Λ_k#) x)_k`
/// * `[L#, xᵀ]ᵀ L = Σ_k (4i/n)Θ⁻(Λ_k#)Λ_kᵀ + 2iΘ⁻(Λ_k#)Θ⁺(Λ_k)x + 2Θ⁻(Λ_k#)Θ⁻(Λ_k)x`
/// * `(L†[x, Lᵀ]ᵀ)ᵀ = Σ_k (4i/n)Θ⁻(Λ_k#)Λ_kᵀ - 2iΘ⁻(Λ_k)Θ⁺(Λ_k#)x + 2Θ⁻(Λ_k)Θ⁻(Λ_k#)x`
pub fn verify_heisenberg_commutators(
    alpha: ArrayView1<f64>,
    lambda: ArrayView2<Complex64>,
    sc: &StructureConstants,
) -> Result<Vec<IdentityCheck>> {
    let n = sc.n();
    let s = sc.s();
    let ops = PlantOperators::new(alpha, lambda, n)?;
    let th = ThetaContext::new(sc);
    let lambda_conj = lambda.mapv(|z| z.conj());

    let h = FormMatrix::column(n, vec![ops.h.clone()])?;
    let lhs_h = FormMatrix::outer_commutator(&ops.x, &h, sc)?;
    let rhs_h = FormMatrix::linear(n, th.theta_minus(alpha)?.mapv(|a| c(0.0, -2.0 * a)).view())?;

    let lhs_l = FormMatrix::outer_commutator(&ops.x, &ops.l, sc)?;
    let lhs_ld = FormMatrix::outer_commutator(&ops.x, &ops.l_conj, sc)?;
    let mut cols_l = Vec::new();
    let mut cols_ld = Vec::new();
    let mut rhs_d = FormMatrix::column(n, vec![OperatorForm::zero(n); s])?;
    let mut rhs_e = rhs_d.clone();
    for (lk, lck) in lambda.rows().into_iter().zip(lambda_conj.rows()) {
        let tm = th.theta_minus(lk)?;
        let tmc = th.theta_minus(lck)?;
        let tp = th.theta_plus(lk)?;
        let tpc = th.theta_plus(lck)?;
        cols_l.push(FormMatrix::linear(n, tm.view())?.scale(c(0.0, -2.0)));
        cols_ld.push(FormMatrix::linear(n, tmc.view())?.scale(c(0.0, -2.0)));
        let constant = tmc.dot(&lk) * c(0.0, 4.0 / n as f64);
        let md = tmc.dot(&tp) * c(0.0, 2.0) + tmc.dot(&tm) * 2.0;
        let me = tm.dot(&tpc) * c(0.0, -2.0) + tm.dot(&tmc) * 2.0;
        rhs_d = rhs_d.add(&FormMatrix::affine(n, constant.view(), md.view())?)?;
        rhs_e = rhs_e.add(&FormMatrix::affine(n, constant.view(), me.view())?)?;
    }
    let rhs_l = FormMatrix::hstack(n, &cols_l)?;
    let rhs_ld = FormMatrix::hstack(n, &cols_ld)?;

    let checks = if lambda.nrows() == 0 {
        // No fields: both sides of the coupling identities are empty.
        vec![
            IdentityCheck::new("heisenberg_x_l", 0.0, FORM_IDENTITY_TOL),
            IdentityCheck::new("heisenberg_x_ldag", 0.0, FORM_IDENTITY_TOL),
            IdentityCheck::new("heisenberg_lconj_x_l", 0.0, FORM_IDENTITY_TOL),
            IdentityCheck::new("heisenberg_ldag_x_l", 0.0, FORM_IDENTITY_TOL),
        ]
    } else {
        vec![
            IdentityCheck::new(
                "heisenberg_x_l",
                lhs_l.max_residual(&rhs_l)?,
                FORM_IDENTITY_TOL,
            ),
            IdentityCheck::new(
                "heisenberg_x_ldag",
                lhs_ld.max_residual(&rhs_ld)?,
                FORM_IDENTITY_TOL,
            ),
            IdentityCheck::new(
                "heisenberg_lconj_x_l",
                ops.ldag_x_l(sc)?.max_residual(&rhs_d)?,
                FORM_IDENTITY_TOL,
            ),
            IdentityCheck::new(
                "heisenberg_ldag_x_l",
                ops.ldag_comm_x_l(sc)?.max_residual(&rhs_e)?,
                FORM_IDENTITY_TOL,
            ),
        ]
    };
    let mut out = vec![IdentityCheck::new(
        "heisenberg_x_h",
        lhs_h.max_residual(&rhs_h)?,
        FORM_IDENTITY_TOL,
    )];
    out.extend(checks);
    Ok(out)
}

/// Complex `Array2` view of a real matrix, convenient for the commutator checks.
pub fn complexify(m: ArrayView2<f64>) -> Array2<Complex64> {
    m.mapv(|x| c(x, 0.0))
}
