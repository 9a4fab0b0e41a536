//! Numerical checks that depend only on `φ`, never on the enumeration or
//! on the binomial formulas.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::bloch::{ensure_gapped, gap, grid_trig, ModelSpec};
use crate::clifford::{conj, frobenius, CMatrix, CliffordRep};
use crate::error::{KrError, Result};

/// Maximum distance from an integer accepted by [`degree_numeric`].
pub const DEGREE_ROUNDING_TOL: f64 = 0.15;

/// Tolerance for the determinant detector's preconditions.
pub const DETECTOR_TOL: f64 = 1e-10;

/// Largest torus dimension for which the degree integral is attempted.
pub const MAX_DEGREE_DIM: usize = 4;

/// k-grid used by [`homotopy_gap_scan`]; contains `{0, π}`.
pub const SCAN_GRID: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegreeResult {
    pub raw: f64,
    pub rounded: i64,
    pub residual: f64,
    pub grid_n: usize,
}

/// `Vol(S^n) = 2π^{(n+1)/2} / Γ((n+1)/2)` via `Vol(S^n) = 2π/(n−1)·Vol(S^{n−2})`.
pub fn sphere_volume(n: usize) -> f64 {
    match n {
        0 => 2.0,
        1 => TAU,
        _ => TAU / (n as f64 - 1.0) * sphere_volume(n - 2),
    }
}

/// Deterministic pairwise sum, independent of thread count.
fn tree_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => tree_sum(&values[..n / 2]) + tree_sum(&values[n / 2..]),
    }
}

/// `det[φ, ∂_1φ, …, ∂_dφ]` at a grid point given `(cos k_j, sin k_j)`.
fn degree_density(m: f64, trig: &[(f64, f64)]) -> f64 {
    let d = trig.len();
    let mut x = vec![m + trig.iter().map(|t| t.0).sum::<f64>()];
    x.extend(trig.iter().map(|t| t.1));
    let n2: f64 = x.iter().map(|v| v * v).sum();
    let n = n2.sqrt();

    let mut mat = DMatrix::<f64>::zeros(d + 1, d + 1);
    for (r, v) in x.iter().enumerate() {
        mat[(r, 0)] = v / n;
    }
    for (j, &(cos, sin)) in trig.iter().enumerate() {
        // ∂_j φ̃ = −sin k_j e_0 + cos k_j e_{j+1}
        let mut dx = vec![0.0; d + 1];
        dx[0] = -sin;
        dx[j + 1] = cos;
        let dot: f64 = x.iter().zip(&dx).map(|(a, b)| a * b).sum();
        for r in 0..=d {
            mat[(r, j + 1)] = dx[r] / n - x[r] * dot / (n2 * n);
        }
    }
    mat.determinant()
}

/// Mapping degree of `φ: T^d → S^d` by a Riemann sum of the pulled-back
/// volume form on a uniform `grid_n^d` grid.
pub fn degree_numeric(spec: &ModelSpec, grid_n: usize) -> Result<DegreeResult> {
    let d = spec.d();
    if !spec.has_full_axes() || spec.extra_b() != 0 {
        return Err(KrError::InvalidSpec(
            "degree oracle needs all axes active and no extra generators".into(),
        ));
    }
    if d > MAX_DEGREE_DIM {
        return Err(KrError::InvalidSpec(format!(
            "degree oracle supports d <= {MAX_DEGREE_DIM}, got {d}"
        )));
    }
    if grid_n < 2 {
        return Err(KrError::InvalidGrid(grid_n));
    }
    let m = spec.m();
    ensure_gapped(d, m)?;

    let trig = grid_trig(grid_n);
    let inner = grid_n.pow(d as u32 - 1);
    let rows: Vec<f64> = (0..grid_n)
        .into_par_iter()
        .map(|first| {
            let mut idx = vec![0usize; d];
            idx[0] = first;
            let mut point = vec![(0.0, 0.0); d];
            let values: Vec<f64> = (0..inner)
                .map(|flat| {
                    let mut rest = flat;
                    for slot in idx.iter_mut().skip(1).rev() {
                        *slot = rest % grid_n;
                        rest /= grid_n;
                    }
                    for (p, &i) in point.iter_mut().zip(&idx) {
                        *p = trig[i];
                    }
                    degree_density(m, &point)
                })
                .collect();
            tree_sum(&values)
        })
        .collect();

    let cell = (TAU / grid_n as f64).powi(d as i32);
    let raw = tree_sum(&rows) * cell / sphere_volume(d);
    let rounded = raw.round() as i64;
    let residual = (raw - rounded as f64).abs();
    if residual >= DEGREE_ROUNDING_TOL {
        return Err(KrError::Inconclusive { raw, residual, grid_n });
    }
    Ok(DegreeResult {
        raw,
        rounded,
        residual,
        grid_n,
    })
}

/// Winding number of `q(k) = (m + cos k) − i sin k`, the upper-right block of
/// the `d = 1` Hamiltonian, over `k ∈ [0, 2π]`.
pub fn winding_d1(m: f64, grid_n: usize) -> Result<i64> {
    ensure_gapped(1, m)?;
    if grid_n < 3 {
        return Err(KrError::InvalidGrid(grid_n));
    }
    let q = |i: usize| {
        let a = TAU * i as f64 / grid_n as f64;
        Complex64::new(m + a.cos(), -a.sin())
    };
    let total: f64 = (0..grid_n).map(|i| (q(i + 1) / q(i)).arg()).sum();
    Ok((total / TAU).round() as i64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomotopyScan {
    pub min_gap: f64,
    /// Mass at which the minimum occurs.
    pub at_m: f64,
}

/// Minimum gap of the full `d`-torus model along `m_from → m_to` in
/// `steps` evenly spaced masses (endpoints included).
pub fn homotopy_gap_scan(d: usize, m_from: f64, m_to: f64, steps: usize) -> Result<HomotopyScan> {
    if steps < 2 {
        return Err(KrError::InvalidSpec(format!("need at least 2 steps, got {steps}")));
    }
    let base = ModelSpec::new(d, m_from)?;
    let mut best = HomotopyScan {
        min_gap: f64::INFINITY,
        at_m: m_from,
    };
    for s in 0..steps {
        let m = m_from + (m_to - m_from) * s as f64 / (steps - 1) as f64;
        let g = gap(&base.with_mass(m), SCAN_GRID)?;
        if g < best.min_gap {
            best = HomotopyScan { min_gap: g, at_m: m };
        }
    }
    Ok(best)
}

/// `ℤ/2` class of an odd, selfadjoint, real unitary in `M_n(Cliff(1,1))`:
/// `0` if the orthogonal off-diagonal block has determinant `+1`, else `1`.
///
/// `m` is written in the basis `rep ⊗ C^n` (Kronecker order), so the
/// grading is `Γ ⊗ 1_n`.
pub fn determinant_detector(m: &CMatrix, rep: &CliffordRep) -> Result<u8> {
    if (rep.a(), rep.b()) != (1, 1) {
        return Err(KrError::InvalidSpec("detector needs a Cliff(1,1) representation".into()));
    }
    let grading = rep.grading();
    let diagonal_grading = (0..2).all(|i| (0..2).all(|j| i == j || grading[(i, j)].norm() == 0.0))
        && (grading[(0, 0)].re - 1.0).abs() < DETECTOR_TOL
        && (grading[(1, 1)].re + 1.0).abs() < DETECTOR_TOL;
    let plain_real = frobenius(&(rep.real_structure().unitary_part() - CMatrix::identity(2, 2))) == 0.0;
    if !diagonal_grading || !plain_real {
        return Err(KrError::BlockExtractionFailed(
            "Cliff(1,1) representation is not in diagonal-grading, plain-conjugation form".into(),
        ));
    }
    if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) || m.nrows() == 0 {
        return Err(KrError::DimensionMismatch {
            expected: 2 * (m.nrows() / 2).max(1),
            found: m.ncols(),
        });
    }
    let n = m.nrows() / 2;
    let full_grading = grading.kronecker(&CMatrix::identity(n, n));

    let odd = frobenius(&(&full_grading * m * &full_grading + m));
    if odd > DETECTOR_TOL {
        return Err(KrError::NotOdd(odd));
    }
    let real = frobenius(&(conj(m) - m));
    if real > DETECTOR_TOL {
        return Err(KrError::NotReal(real));
    }
    let id = CMatrix::identity(2 * n, 2 * n);
    let unitary = frobenius(&(m - m.adjoint())).max(frobenius(&(m * m - id)));
    if unitary > DETECTOR_TOL {
        return Err(KrError::NotUnitary(unitary));
    }

    let block = DMatrix::<f64>::from_fn(n, n, |i, j| m[(i, n + j)].re);
    let det = block.determinant();
    Ok(if det > 0.0 { 0 } else { 1 })
}
