//! Singular integral operators on the interface and their dense matrices.
//!
//! For functions on the grid, `delta_{[x,y]} a = a(x) - a(x - y)` and
//!
//! ```text
//! B_{n,m}(a)[b, w](x) = PV int w(x - y) / y * prod_i (delta b_i / y)
//!                                         / prod_k (1 + (delta a_k / y)^2) dy
//! pi A(f)[w]  = PV int (y f'(x) - delta f) / (y^2 + delta f^2) w(x - y) dy
//! B(f)[w]     = PV int (y + f'(x) delta f) / (y^2 + delta f^2) w(x - y) dy
//! pi A(f)*[w] = PV int (delta f - y f'(x - y)) / (y^2 + delta f^2) w(x - y) dy
//! ```
//!
//! Quadrature is the trapezoid rule over the grid nodes `x_l`, `l != j`,
//! with `y = x_j - x_l`; the `1/y` part cancels pairwise around the
//! diagonal. Regular kernels get their analytic limit at `y = 0`. For `B_{n,m}` the
//! kernel is `P(x, y) / y` with `P` smooth, and the omitted node is restored
//! by `h (P_y(x, 0) w(x) - P(x, 0) w'(x))`, which makes the rule spectrally
//! accurate; [`PvRule::PlainOmission`] drops that term. `B(f)` is split as
//! `pi H + R` with the Hilbert part done in Fourier space.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::linalg::DenseMatrix;
use crate::spectral::{derivatives12, hilbert_transform, spectral_derivative};

/// Which operator to discretize, with its function arguments.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelSpec {
    /// `B_{n,m}(a_1..a_m)[b_1..b_n, .]`.
    Bnm {
        a: Vec<GridFunction>,
        b: Vec<GridFunction>,
    },
    A(GridFunction),
    B(GridFunction),
    AStar(GridFunction),
}

impl KernelSpec {
    pub fn bnm(a: &[&GridFunction], b: &[&GridFunction]) -> Self {
        KernelSpec::Bnm {
            a: a.iter().map(|&g| g.clone()).collect(),
            b: b.iter().map(|&g| g.clone()).collect(),
        }
    }

    pub fn grid(&self) -> Option<&Grid> {
        match self {
            KernelSpec::Bnm { a, .. } => a.first().map(|g| g.grid()),
            KernelSpec::A(f) | KernelSpec::B(f) | KernelSpec::AStar(f) => Some(f.grid()),
        }
    }

    fn validate(&self) -> Result<&Grid> {
        match self {
            KernelSpec::Bnm { a, b } => {
                let first = a.first().ok_or(Error::NoDenominator)?;
                for g in a.iter().chain(b) {
                    first.ensure_same_grid(g)?;
                }
                Ok(first.grid())
            }
            KernelSpec::A(f) | KernelSpec::B(f) | KernelSpec::AStar(f) => Ok(f.grid()),
        }
    }
}

/// Treatment of the omitted diagonal node in `B_{n,m}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PvRule {
    /// Adds the next Taylor term of the smooth factor at `y = 0`.
    #[default]
    Corrected,
    /// Symmetric omission only; first order in `h`.
    PlainOmission,
}

#[derive(Clone, Debug)]
enum Weights {
    Bnm { a: Vec<Vec<f64>>, b: Vec<Vec<f64>> },
    A { f: Vec<f64>, fp: Vec<f64> },
    AStar { f: Vec<f64>, fp: Vec<f64> },
    B { f: Vec<f64>, fp: Vec<f64> },
}

/// A discretized operator, ready to apply repeatedly:
/// `(K w)_j = sum_{l != j} weight(j, l) w_l + diag_j w_j + deriv_j w'_j + hilbert (H w)_j`.
#[derive(Clone, Debug)]
pub struct Operator {
    grid: Grid,
    weights: Weights,
    diag: Vec<f64>,
    deriv: Option<Vec<f64>>,
    hilbert: f64,
}

impl Operator {
    pub fn new(spec: &KernelSpec, rule: PvRule) -> Result<Self> {
        let grid = spec.validate()?.clone();
        let h = grid.spacing();
        let n = grid.len();
        let prepared = match spec {
            KernelSpec::Bnm { a, b } => {
                let (diag, deriv) = match rule {
                    PvRule::Corrected => {
                        let (d, e) = bnm_diagonal(a, b, h);
                        (d, Some(e))
                    }
                    PvRule::PlainOmission => (vec![0.0; n], None),
                };
                Operator {
                    grid,
                    weights: Weights::Bnm {
                        a: a.iter().map(|g| g.values().to_vec()).collect(),
                        b: b.iter().map(|g| g.values().to_vec()).collect(),
                    },
                    diag,
                    deriv,
                    hilbert: 0.0,
                }
            }
            KernelSpec::A(f) | KernelSpec::AStar(f) => {
                let (fp, fpp) = derivatives12(f);
                let diag = fp
                    .values()
                    .iter()
                    .zip(fpp.values())
                    .map(|(d1, d2)| h / PI * d2 / (2.0 * (1.0 + d1 * d1)))
                    .collect();
                let fp = fp.into_values();
                let weights = if matches!(spec, KernelSpec::A(_)) {
                    Weights::A { f: f.values().to_vec(), fp }
                } else {
                    Weights::AStar { f: f.values().to_vec(), fp }
                };
                Operator {
                    grid,
                    weights,
                    diag,
                    deriv: None,
                    hilbert: 0.0,
                }
            }
            KernelSpec::B(f) => {
                let (fp, fpp) = derivatives12(f);
                let diag = fp
                    .values()
                    .iter()
                    .zip(fpp.values())
                    .map(|(d1, d2)| h * d1 * d2 / (2.0 * (1.0 + d1 * d1)))
                    .collect();
                Operator {
                    grid,
                    weights: Weights::B {
                        f: f.values().to_vec(),
                        fp: fp.into_values(),
                    },
                    diag,
                    deriv: None,
                    hilbert: PI,
                }
            }
        };
        Ok(prepared)
    }

    /// `h K(x_j, y)` with `y = x_j - x_l`.
    #[inline]
    fn weight(&self, j: usize, l: usize, y: f64) -> f64 {
        let h = self.grid.spacing();
        match &self.weights {
            Weights::Bnm { a, b } => {
                let mut num = 1.0;
                for bi in b {
                    num *= (bi[j] - bi[l]) / y;
                }
                let mut den = 1.0;
                for ak in a {
                    let q = (ak[j] - ak[l]) / y;
                    den *= 1.0 + q * q;
                }
                h * num / (den * y)
            }
            Weights::A { f, fp } => {
                let d = f[j] - f[l];
                h / PI * (y * fp[j] - d) / (y * y + d * d)
            }
            Weights::AStar { f, fp } => {
                let d = f[j] - f[l];
                h / PI * (d - y * fp[l]) / (y * y + d * d)
            }
            Weights::B { f, fp } => {
                let d = f[j] - f[l];
                h * d * (y * fp[j] - d) / (y * (y * y + d * d))
            }
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Applies the operator; `omega` must live on the operator's grid.
    pub fn apply(&self, omega: &GridFunction) -> Result<GridFunction> {
        check_omega(&self.grid, omega)?;
        self.apply_unchecked(omega).ensure_finite("singular integral")
    }

    fn apply_unchecked(&self, omega: &GridFunction) -> GridFunction {
        let n = self.grid.len();
        let h = self.grid.spacing();
        let w = omega.values();
        let mut out = vec![0.0; n];
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (l, wl) in w.iter().enumerate() {
                if l != j {
                    acc += self.weight(j, l, (j as f64 - l as f64) * h) * wl;
                }
            }
            *o = acc + self.diag[j] * w[j];
        }
        if let Some(deriv) = &self.deriv {
            let dw = spectral_derivative(omega, 1).expect("order 1 is valid");
            for ((o, e), d) in out.iter_mut().zip(deriv).zip(dw.values()) {
                *o += e * d;
            }
        }
        if self.hilbert != 0.0 {
            let hw = hilbert_transform(omega);
            for (o, v) in out.iter_mut().zip(hw.values()) {
                *o += self.hilbert * v;
            }
        }
        GridFunction::from_raw(&self.grid, out)
    }

    pub fn matrix(&self) -> DenseMatrix {
        let n = self.grid.len();
        let h = self.grid.spacing();
        let mut mat = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let row = mat.row_mut(j);
            for (l, r) in row.iter_mut().enumerate() {
                if l != j {
                    *r = self.weight(j, l, (j as f64 - l as f64) * h);
                }
            }
            row[j] = self.diag[j];
        }
        if let Some(deriv) = &self.deriv {
            let col = circulant_column(&self.grid, |e| spectral_derivative(e, 1).expect("order 1 is valid"));
            add_circulant(&mut mat, &col, |j| deriv[j]);
        }
        if self.hilbert != 0.0 {
            let col = circulant_column(&self.grid, hilbert_transform);
            let s = self.hilbert;
            add_circulant(&mut mat, &col, |_| s);
        }
        mat
    }
}

// Column 0 of a translation-invariant operator: its action on the first unit vector.
fn circulant_column(grid: &Grid, op: impl Fn(&GridFunction) -> GridFunction) -> Vec<f64> {
    let mut e = vec![0.0; grid.len()];
    e[0] = 1.0;
    op(&GridFunction::from_raw(grid, e)).into_values()
}

fn add_circulant(mat: &mut DenseMatrix, col: &[f64], row_scale: impl Fn(usize) -> f64) {
    let n = col.len();
    for j in 0..n {
        let s = row_scale(j);
        if s == 0.0 {
            continue;
        }
        let row = mat.row_mut(j);
        for (l, r) in row.iter_mut().enumerate() {
            *r += s * col[(j + n - l) % n];
        }
    }
}

/// Diagonal correction of `B_{n,m}`: returns `(h P_y(x, 0), -h P(x, 0))`.
///
/// With `beta_i = delta b_i / y` and `alpha_k = 1 + (delta a_k / y)^2`,
/// `beta_i(0) = b_i'`, `beta_i'(0) = -b_i''/2`, `alpha_k(0) = 1 + a_k'^2`,
/// `alpha_k'(0) = -a_k' a_k''`.
fn bnm_diagonal(a: &[GridFunction], b: &[GridFunction], h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = a[0].len();
    let ad: Vec<_> = a.iter().map(derivatives12).collect();
    let bd: Vec<_> = b.iter().map(derivatives12).collect();
    let mut diag = vec![0.0; n];
    let mut deriv = vec![0.0; n];
    let mut beta = vec![0.0; b.len()];
    let mut dbeta = vec![0.0; b.len()];
    for j in 0..n {
        let mut alpha = 1.0;
        let mut log_dalpha = 0.0;
        for (d1, d2) in &ad {
            let (p, pp) = (d1.values()[j], d2.values()[j]);
            let ak = 1.0 + p * p;
            alpha *= ak;
            log_dalpha += -p * pp / ak;
        }
        for (i, (d1, d2)) in bd.iter().enumerate() {
            beta[i] = d1.values()[j];
            dbeta[i] = -0.5 * d2.values()[j];
        }
        let prod_beta: f64 = beta.iter().product();
        let dprod_beta: f64 = (0..beta.len())
            .map(|i| {
                dbeta[i]
                    * beta
                        .iter()
                        .enumerate()
                        .filter(|&(l, _)| l != i)
                        .map(|(_, v)| v)
                        .product::<f64>()
            })
            .sum();
        let p0 = prod_beta / alpha;
        let py = dprod_beta / alpha - p0 * log_dalpha;
        diag[j] = h * py;
        deriv[j] = -h * p0;
    }
    (diag, deriv)
}

fn check_omega(grid: &Grid, omega: &GridFunction) -> Result<()> {
    if grid.same_as(omega.grid()) {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// `B_{n,m}(a)[b, omega]` with the default corrected PV rule.
pub fn bnm_apply(spec: &KernelSpec, omega: &GridFunction) -> Result<GridFunction> {
    bnm_apply_with(spec, omega, PvRule::Corrected)
}

pub fn bnm_apply_with(spec: &KernelSpec, omega: &GridFunction, rule: PvRule) -> Result<GridFunction> {
    Operator::new(spec, rule)?.apply(omega)
}

/// Applies any [`KernelSpec`].
pub fn apply(spec: &KernelSpec, omega: &GridFunction) -> Result<GridFunction> {
    bnm_apply(spec, omega)
}

pub fn apply_a(f: &GridFunction, omega: &GridFunction) -> Result<GridFunction> {
    f.ensure_same_grid(omega)?;
    apply(&KernelSpec::A(f.clone()), omega)
}

pub fn apply_a_star(f: &GridFunction, phi: &GridFunction) -> Result<GridFunction> {
    f.ensure_same_grid(phi)?;
    apply(&KernelSpec::AStar(f.clone()), phi)
}

pub fn apply_b(f: &GridFunction, omega: &GridFunction) -> Result<GridFunction> {
    f.ensure_same_grid(omega)?;
    apply(&KernelSpec::B(f.clone()), omega)
}

/// Dense matrix of a discretized operator.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub grid: Grid,
    pub entries: DenseMatrix,
    pub kind: KernelSpec,
}

impl OperatorMatrix {
    pub fn apply(&self, omega: &GridFunction) -> Result<GridFunction> {
        check_omega(&self.grid, omega)?;
        Ok(GridFunction::from_raw(&self.grid, self.entries.matvec(omega.values())))
    }
}

pub fn assemble_matrix(spec: &KernelSpec) -> Result<OperatorMatrix> {
    assemble_matrix_with(spec, PvRule::Corrected)
}

pub fn assemble_matrix_with(spec: &KernelSpec, rule: PvRule) -> Result<OperatorMatrix> {
    let prepared = Operator::new(spec, rule)?;
    let entries = prepared.matrix();
    if entries.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("operator matrix"));
    }
    Ok(OperatorMatrix {
        grid: prepared.grid.clone(),
        entries,
        kind: spec.clone(),
    })
}

/// `(A(f)[omega])'` assembled from `B_{n,m}` terms:
///
/// `pi (A w)' = pi A[w'] + f'' B_{0,1}(f)[w] - 2 f' B_{2,2}(f,f)[f',f,w]
///              - B_{1,1}(f)[f',w] + 2 B_{3,2}(f,f)[f',f,f,w]`.
pub fn derivative_of_a(f: &GridFunction, omega: &GridFunction) -> Result<GridFunction> {
    let lot = a_commutator(f, omega)?;
    let dw = spectral_derivative(omega, 1)?;
    Ok(&apply_a(f, &dw)? + &lot)
}

/// `(A(f)[omega])' - A(f)[omega']`, the lower-order part of the derivative.
pub fn a_commutator(f: &GridFunction, omega: &GridFunction) -> Result<GridFunction> {
    f.ensure_same_grid(omega)?;
    let (fp, fpp) = derivatives12(f);
    let b01 = bnm_apply(&KernelSpec::bnm(&[f], &[]), omega)?;
    let b11 = bnm_apply(&KernelSpec::bnm(&[f], &[&fp]), omega)?;
    let b22 = bnm_apply(&KernelSpec::bnm(&[f, f], &[&fp, f]), omega)?;
    let b32 = bnm_apply(&KernelSpec::bnm(&[f, f], &[&fp, f, f]), omega)?;
    let n = f.len();
    let out = (0..n)
        .map(|j| {
            (fpp.values()[j] * b01.values()[j] - 2.0 * fp.values()[j] * b22.values()[j] - b11.values()[j]
                + 2.0 * b32.values()[j])
                / PI
        })
        .collect();
    Ok(GridFunction::from_raw(f.grid(), out))
}

/// `(B(f)[omega])'` assembled from `B_{n,m}` terms:
///
/// `(B w)' = B[w'] - 2 B_{2,2}(f,f)[f',f,w] + f'' B_{1,1}(f)[f,w]
///           + f' B_{1,1}(f)[f',w] - 2 f' B_{3,2}(f,f)[f',f,f,w]`.
pub fn derivative_of_b(f: &GridFunction, omega: &GridFunction) -> Result<GridFunction> {
    f.ensure_same_grid(omega)?;
    let (fp, fpp) = derivatives12(f);
    let dw = spectral_derivative(omega, 1)?;
    let bdw = apply_b(f, &dw)?;
    let b11f = bnm_apply(&KernelSpec::bnm(&[f], &[f]), omega)?;
    let b11fp = bnm_apply(&KernelSpec::bnm(&[f], &[&fp]), omega)?;
    let b22 = bnm_apply(&KernelSpec::bnm(&[f, f], &[&fp, f]), omega)?;
    let b32 = bnm_apply(&KernelSpec::bnm(&[f, f], &[&fp, f, f]), omega)?;
    let out = (0..f.len())
        .map(|j| {
            let (d1, d2) = (fp.values()[j], fpp.values()[j]);
            bdw.values()[j] - 2.0 * b22.values()[j] + d2 * b11f.values()[j] + d1 * b11fp.values()[j]
                - 2.0 * d1 * b32.values()[j]
        })
        .collect();
    Ok(GridFunction::from_raw(f.grid(), out))
}
