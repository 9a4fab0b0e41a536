//! Symmetry type of `Cliff(a, b)` and transfer of Clifford-valued
//! Hamiltonians to plain matrices with explicit (anti)unitary symmetries.
//!
//! With `j = b − a + 1 mod 8`:
//!
//! | j | Θ role        | Θ² | (ΞΘ)² | chiral |
//! |---|---------------|----|-------|--------|
//! | 0 | time reversal | +1 |       | no     |
//! | 1 | time reversal | +1 | +1    | yes    |
//! | 2 | particle-hole | +1 |       | no     |
//! | 3 | time reversal | −1 | +1    | yes    |
//! | 4 | time reversal | −1 |       | no     |
//! | 5 | time reversal | −1 | −1    | yes    |
//! | 6 | particle-hole | −1 |       | no     |
//! | 7 | time reversal | +1 | −1    | yes    |
//!
//! For an odd number of generators the representation splits into the two
//! eigenspaces of the central element `ω ∝ γ_1⋯γ_n`; the grading swaps them
//! and odd selfadjoint elements take the form `(x, −x)`.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bloch::{hamiltonian, ModelSpec, TorusPoint};
use crate::clifford::{build_rep, c, frobenius, AntiUnitary, CMatrix, CliffordRep};
use crate::error::{KrError, Result};

/// Residual bound for symmetry relations of transferred Hamiltonians.
pub const TRANSFER_TOL: f64 = 1e-10;

const STRUCTURE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaRole {
    TimeReversal,
    ParticleHole,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryClass {
    pub a: usize,
    pub b: usize,
    pub j: u8,
    pub theta_sq: i8,
    pub chiral_present: bool,
    pub xi_theta_sq: Option<i8>,
    pub theta_role: ThetaRole,
    pub real_subalgebra: &'static str,
}

/// JSON form of [`SymmetryClass`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryClassJson {
    pub a: usize,
    pub b: usize,
    pub j: u8,
    pub theta_sq: i8,
    pub chiral: bool,
    pub xi_theta_sq: Option<i8>,
    pub theta_role: ThetaRole,
    pub real_subalgebra: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cartan_label: Option<String>,
}

impl SymmetryClass {
    pub fn to_json(&self, with_cartan: bool) -> SymmetryClassJson {
        SymmetryClassJson {
            a: self.a,
            b: self.b,
            j: self.j,
            theta_sq: self.theta_sq,
            chiral: self.chiral_present,
            xi_theta_sq: self.xi_theta_sq,
            theta_role: self.theta_role,
            real_subalgebra: self.real_subalgebra.to_string(),
            cartan_label: with_cartan.then(|| cartan_label(self.j).to_string()),
        }
    }

    /// Everything except `(a, b)`.
    pub fn signature(&self) -> (u8, i8, bool, Option<i8>, ThetaRole, &'static str) {
        (
            self.j,
            self.theta_sq,
            self.chiral_present,
            self.xi_theta_sq,
            self.theta_role,
            self.real_subalgebra,
        )
    }
}

pub fn j_index(a: usize, b: usize) -> u8 {
    ((b as i64 - a as i64 + 1).rem_euclid(8)) as u8
}

/// Smallest algebra with the given `j`.
pub fn representative(j: u8) -> (usize, usize) {
    match j % 8 {
        0 => (1, 0),
        1 => (1, 1),
        2 => (0, 1),
        3 => (0, 2),
        4 => (0, 3),
        5 => (0, 4),
        6 => (3, 0),
        _ => (2, 0),
    }
}

/// Altland-Zirnbauer label for `j`, following the standard table of
/// real symmetry classes (AI, BDI, D, DIII, AII, CII, C, CI). Annotation only.
pub fn cartan_label(j: u8) -> &'static str {
    ["AI", "BDI", "D", "DIII", "AII", "CII", "C", "CI"][(j % 8) as usize]
}

pub fn classify(a: usize, b: usize) -> Result<SymmetryClass> {
    if a + b == 0 {
        return Err(KrError::DegenerateAlgebra);
    }
    let j = j_index(a, b);
    use ThetaRole::*;
    let (theta_sq, xi_theta_sq, theta_role, real_subalgebra) = match j {
        0 => (1, None, TimeReversal, "M_{2^k}ℝ⊕M_{2^k}ℝ"),
        4 => (-1, None, TimeReversal, "M_{2^{k−1}}ℍ⊕M_{2^{k−1}}ℍ"),
        2 => (1, None, ParticleHole, "M_{2^k}ℂ"),
        6 => (-1, None, ParticleHole, "M_{2^k}ℂ"),
        1 => (1, Some(1), TimeReversal, "M_{2^k}ℝ"),
        7 => (1, Some(-1), TimeReversal, "M_{2^k}ℝ"),
        3 => (-1, Some(1), TimeReversal, "M_{2^{k−1}}ℍ"),
        _ => (-1, Some(-1), TimeReversal, "M_{2^{k−1}}ℍ"),
    };
    Ok(SymmetryClass {
        a,
        b,
        j,
        theta_sq,
        chiral_present: (a + b).is_multiple_of(2),
        xi_theta_sq,
        theta_role,
        real_subalgebra,
    })
}

/// Symmetry operators on the block space of a representation.
#[derive(Clone, Debug)]
pub struct SymmetryOps {
    theta: AntiUnitary,
    xi: Option<CMatrix>,
    role: ThetaRole,
    /// Columns: `ω = +1` eigenvectors, then their images under `Γ`.
    /// Absent for an even number of generators.
    split_basis: Option<CMatrix>,
}

impl SymmetryOps {
    pub fn theta(&self) -> &AntiUnitary {
        &self.theta
    }

    pub fn xi(&self) -> Option<&CMatrix> {
        self.xi.as_ref()
    }

    pub fn role(&self) -> ThetaRole {
        self.role
    }

    pub fn split_basis(&self) -> Option<&CMatrix> {
        self.split_basis.as_ref()
    }

    pub fn block_dim(&self) -> usize {
        self.theta.dim()
    }

    /// `Θ²` as a sign.
    pub fn theta_sq(&self) -> Option<i8> {
        self.theta.square_sign(STRUCTURE_TOL)
    }

    /// `(ΞΘ)²` as a sign.
    pub fn xi_theta_sq(&self) -> Option<i8> {
        let xi = self.xi.as_ref()?;
        AntiUnitary::new(xi * self.theta.unitary_part())
            .ok()?
            .square_sign(STRUCTURE_TOL)
    }

    /// `s` with `Ξ⁻¹ΘΞ = sΘ`.
    pub fn xi_theta_commutation(&self) -> Option<i8> {
        let xi = self.xi.as_ref()?;
        let u = self.theta.unitary_part();
        // Ξ⁻¹ Θ Ξ v = Ξ† U conj(Ξ) conj(v)
        let conjugated = xi.adjoint() * u * xi.map(|z| z.conj());
        if frobenius(&(&conjugated - u)) < STRUCTURE_TOL {
            Some(1)
        } else if frobenius(&(&conjugated + u)) < STRUCTURE_TOL {
            Some(-1)
        } else {
            None
        }
    }

    /// Block `x` of an odd selfadjoint `h`: `h` itself for an even number of
    /// generators, otherwise the first summand of `(x, −x)`.
    pub fn block_of(&self, h: &CMatrix) -> Result<CMatrix> {
        let Some(v) = &self.split_basis else {
            return Ok(h.clone());
        };
        let half = v.ncols() / 2;
        let rotated = v.adjoint() * h * v;
        let x = rotated.view((0, 0), (half, half)).into_owned();
        let lower = rotated.view((half, half), (half, half)).into_owned();
        let off = frobenius(&rotated.view((0, half), (half, half)).into_owned())
            + frobenius(&rotated.view((half, 0), (half, half)).into_owned());
        let residual = off + frobenius(&(&lower + &x));
        if residual > TRANSFER_TOL {
            return Err(KrError::BlockExtractionFailed(format!(
                "element is not of the form (x, -x): residual {residual:e}"
            )));
        }
        Ok(x)
    }
}

/// `ω = λ γ_1⋯γ_n` with `λ ∈ {1, i}` chosen so that `ω² = 1`.
fn central_element(rep: &CliffordRep) -> CMatrix {
    let dim = rep.dim();
    let product = rep
        .gammas()
        .iter()
        .fold(CMatrix::identity(dim, dim), |acc, g| acc * g);
    let sq = &product * &product;
    if sq[(0, 0)].re > 0.0 {
        product
    } else {
        product * c(0.0, 1.0)
    }
}

/// Eigenvectors of `ω` for eigenvalue `+1`, read off from its
/// signed-permutation structure.
fn positive_eigenvectors(omega: &CMatrix) -> Result<Vec<Vec<(usize, f64, num_complex::Complex64)>>> {
    let dim = omega.nrows();
    let mut used = vec![false; dim];
    let mut vectors = Vec::new();
    for i in 0..dim {
        if used[i] {
            continue;
        }
        let nonzero: Vec<usize> = (0..dim).filter(|&r| omega[(r, i)].norm() > STRUCTURE_TOL).collect();
        let [j] = nonzero.as_slice() else {
            return Err(KrError::BlockExtractionFailed(
                "central element is not a phased permutation".into(),
            ));
        };
        let (j, phase) = (*j, omega[(*j, i)]);
        used[i] = true;
        used[j] = true;
        if j == i {
            if (phase - c(1.0, 0.0)).norm() < STRUCTURE_TOL {
                vectors.push(vec![(i, 1.0, c(1.0, 0.0))]);
            }
        } else {
            // ω e_i = c e_j, ω e_j = c⁻¹ e_i, so e_i + c e_j is fixed.
            let s = std::f64::consts::FRAC_1_SQRT_2;
            vectors.push(vec![(i, s, c(1.0, 0.0)), (j, s, phase)]);
        }
    }
    Ok(vectors)
}

fn split_basis(rep: &CliffordRep) -> Result<CMatrix> {
    let dim = rep.dim();
    let omega = central_element(rep);
    let positives = positive_eigenvectors(&omega)?;
    let half = dim / 2;
    if positives.len() != half {
        return Err(KrError::BlockExtractionFailed(format!(
            "expected {half} positive eigenvectors of the central element, found {}",
            positives.len()
        )));
    }
    let mut basis = CMatrix::zeros(dim, dim);
    for (col, entries) in positives.iter().enumerate() {
        for &(row, scale, phase) in entries {
            basis[(row, col)] = phase * scale;
        }
    }
    let upper = basis.columns(0, half).into_owned();
    let lower = rep.grading() * &upper;
    basis.columns_mut(half, half).copy_from(&lower);

    let id = CMatrix::identity(dim, dim);
    let unitary = frobenius(&(basis.adjoint() * &basis - &id));
    let mut expected = id.clone();
    for i in half..dim {
        expected[(i, i)] = c(-1.0, 0.0);
    }
    let diagonal = frobenius(&(basis.adjoint() * &omega * &basis - expected));
    if unitary.max(diagonal) > STRUCTURE_TOL {
        return Err(KrError::BlockExtractionFailed(
            "eigenbasis of the central element is inconsistent".into(),
        ));
    }
    Ok(basis)
}

/// Symmetry operators for the given representation itself.
pub fn symmetry_ops_for(rep: &CliffordRep) -> Result<SymmetryOps> {
    let real = rep.real_structure();
    if rep.generator_count().is_multiple_of(2) {
        return Ok(SymmetryOps {
            theta: real.clone(),
            xi: Some(rep.grading().clone()),
            role: ThetaRole::TimeReversal,
            split_basis: None,
        });
    }

    let basis = split_basis(rep)?;
    let half = rep.dim() / 2;
    let rotated = real.in_basis(&basis);
    let u = rotated.unitary_part();
    let block = |r: usize, c: usize| u.view((r, c), (half, half)).into_owned();
    let (tl, tr, bl, br) = (block(0, 0), block(0, half), block(half, 0), block(half, half));

    let (theta, partner, role) = if frobenius(&tr) + frobenius(&bl) < STRUCTURE_TOL {
        (tl, br, ThetaRole::TimeReversal)
    } else if frobenius(&tl) + frobenius(&br) < STRUCTURE_TOL {
        (tr, bl, ThetaRole::ParticleHole)
    } else {
        return Err(KrError::BlockExtractionFailed(
            "real structure neither preserves nor swaps the two summands".into(),
        ));
    };
    if frobenius(&(&theta - &partner)) > STRUCTURE_TOL {
        return Err(KrError::BlockExtractionFailed(
            "real structure acts differently on the two summands".into(),
        ));
    }
    Ok(SymmetryOps {
        theta: AntiUnitary::new(theta)?,
        xi: None,
        role,
        split_basis: Some(basis),
    })
}

/// Symmetry operators built on the representative algebra for `j(a, b)`.
pub fn build_symmetry_ops(a: usize, b: usize) -> Result<SymmetryOps> {
    if a + b == 0 {
        return Err(KrError::DegenerateAlgebra);
    }
    let (ra, rb) = representative(j_index(a, b));
    symmetry_ops_for(&build_rep(ra, rb)?)
}

/// Residuals of the measured sign data against the table.
pub fn table_mismatch(class: &SymmetryClass, ops: &SymmetryOps) -> Vec<String> {
    let mut problems = Vec::new();
    if ops.theta_sq() != Some(class.theta_sq) {
        problems.push(format!("Θ² = {:?}, table {}", ops.theta_sq(), class.theta_sq));
    }
    if ops.role() != class.theta_role {
        problems.push(format!("Θ role {:?}, table {:?}", ops.role(), class.theta_role));
    }
    if ops.xi().is_some() != class.chiral_present {
        problems.push("chiral operator presence differs from table".into());
    }
    if ops.xi_theta_sq() != class.xi_theta_sq {
        problems.push(format!("(ΞΘ)² = {:?}, table {:?}", ops.xi_theta_sq(), class.xi_theta_sq));
    }
    if let (Some(xt), Some(t)) = (class.xi_theta_sq, ops.xi_theta_commutation()) {
        // (ΞΘ)² = (Ξ⁻¹ΘΞ sign)·Θ²
        if xt != t * class.theta_sq {
            problems.push("Ξ⁻¹ΘΞ sign inconsistent with (ΞΘ)²".into());
        }
    }
    if let Some(xi) = ops.xi() {
        let id = CMatrix::identity(xi.nrows(), xi.ncols());
        if frobenius(&(xi * xi - id)) > STRUCTURE_TOL {
            problems.push("Ξ² ≠ 1".into());
        }
    }
    problems
}

/// A model Hamiltonian as a matrix-valued function with its symmetries.
#[derive(Clone, Debug)]
pub struct HilbertTransfer {
    spec: ModelSpec,
    ops: SymmetryOps,
    class: SymmetryClass,
}

impl HilbertTransfer {
    pub fn ops(&self) -> &SymmetryOps {
        &self.ops
    }

    pub fn class(&self) -> &SymmetryClass {
        &self.class
    }

    pub fn theta(&self) -> &AntiUnitary {
        self.ops.theta()
    }

    pub fn xi(&self) -> Option<&CMatrix> {
        self.ops.xi()
    }

    pub fn block(&self, k: &TorusPoint) -> Result<CMatrix> {
        self.ops.block_of(&hamiltonian(&self.spec, k)?)
    }

    /// Largest residual of `Θx(k)Θ⁻¹ = ±x(−k)`, `Ξx(k)Ξ = −x(k)` and
    /// selfadjointness at `k`.
    pub fn relation_residual(&self, k: &TorusPoint) -> Result<f64> {
        let x = self.block(k)?;
        let x_reflected = self.block(&k.reflect())?;
        let transformed = self.ops.theta().conjugate(&x)?;
        let sign = match self.ops.role() {
            ThetaRole::TimeReversal => 1.0,
            ThetaRole::ParticleHole => -1.0,
        };
        let mut residual = frobenius(&(transformed - x_reflected * c(sign, 0.0)));
        residual = residual.max(frobenius(&(&x - x.adjoint())));
        if let Some(xi) = self.ops.xi() {
            residual = residual.max(frobenius(&(xi * &x * xi + &x)));
        }
        Ok(residual)
    }
}

/// Number of random torus points checked by [`to_hilbert`].
pub const TRANSFER_SAMPLES: usize = 100;

pub fn to_hilbert(spec: &ModelSpec) -> Result<HilbertTransfer> {
    let rep = spec.rep();
    let ops = symmetry_ops_for(rep)?;
    let transfer = HilbertTransfer {
        spec: spec.clone(),
        ops,
        class: classify(rep.a(), rep.b())?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..TRANSFER_SAMPLES {
        let k = TorusPoint::new((0..spec.d()).map(|_| rng.gen_range(0.0..TAU)).collect())?;
        let residual = transfer.relation_residual(&k)?;
        if residual > TRANSFER_TOL {
            return Err(KrError::BlockExtractionFailed(format!(
                "symmetry relation residual {residual:e} at {:?}",
                k.angles()
            )));
        }
    }
    Ok(transfer)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn j_examples() {
        assert_eq!(j_index(1, 0), 0);
        assert_eq!(j_index(0, 3), 4);
        assert_eq!(j_index(1, 1), 1);
        assert_eq!(j_index(2, 0), 7);
        assert_eq!(j_index(3, 0), 6);
    }

    #[test]
    fn classify_examples() {
        let s = classify(2, 0).unwrap();
        assert_eq!((s.j, s.theta_sq, s.xi_theta_sq, s.chiral_present), (7, 1, Some(-1), true));
        let s = classify(0, 2).unwrap();
        assert_eq!((s.j, s.theta_sq, s.xi_theta_sq, s.chiral_present), (3, -1, Some(1), true));
        let s = classify(0, 1).unwrap();
        assert_eq!((s.j, s.theta_sq, s.theta_role, s.chiral_present), (2, 1, ThetaRole::ParticleHole, false));
        assert_eq!(classify(0, 0).unwrap_err(), KrError::DegenerateAlgebra);
    }

    #[test]
    fn even_j_classes_lack_chiral_symmetry() {
        let non_chiral: Vec<u8> = (0..8u8)
            .filter(|&j| {
                let (a, b) = representative(j);
                !classify(a, b).unwrap().chiral_present
            })
            .collect();
        assert_eq!(non_chiral, vec![0, 2, 4, 6]);
    }

    #[test]
    fn representatives_reproduce_table() {
        for j in 0..8u8 {
            let (a, b) = representative(j);
            assert_eq!(j_index(a, b), j);
            let class = classify(a, b).unwrap();
            let ops = build_symmetry_ops(a, b).unwrap();
            assert!(table_mismatch(&class, &ops).is_empty(), "j={j}: {:?}", table_mismatch(&class, &ops));
        }
    }

    #[test]
    fn ops_examples() {
        let ops = build_symmetry_ops(1, 1).unwrap();
        assert_eq!(ops.theta_sq(), Some(1));
        assert_eq!(ops.xi_theta_commutation(), Some(1));

        let ops = build_symmetry_ops(0, 3).unwrap();
        assert_eq!(ops.theta_sq(), Some(-1));
        assert!(ops.xi().is_none());

        let ops = build_symmetry_ops(0, 4).unwrap();
        assert_eq!(ops.theta_sq(), Some(-1));
        assert_eq!(ops.xi_theta_commutation(), Some(1));
        assert_eq!(ops.xi_theta_sq(), Some(-1));
    }

    #[test]
    fn larger_algebras_match_their_class() {
        for n in 1..=7 {
            for a in 0..=n {
                let b = n - a;
                let rep = build_rep(a, b).unwrap();
                let ops = symmetry_ops_for(&rep).unwrap();
                let class = classify(a, b).unwrap();
                assert!(table_mismatch(&class, &ops).is_empty(), "Cliff({a},{b})");
            }
        }
    }

    #[test]
    fn d1_block_is_the_scalar_symbol() {
        let m = 0.3;
        let spec = ModelSpec::new(1, m).unwrap();
        let t = to_hilbert(&spec).unwrap();
        assert_eq!(t.class().j, 1);
        for i in 0..12 {
            let a = TAU * i as f64 / 12.0;
            let k = TorusPoint::new(vec![a]).unwrap();
            let x = t.block(&k).unwrap();
            let q = c(m + a.cos(), -a.sin());
            assert!((x[(0, 1)] - q).norm() < 1e-14);
            let q_reflected = t.block(&k.reflect()).unwrap()[(0, 1)];
            assert!((q_reflected - q.conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn d2_model_has_particle_hole_symmetry() {
        let spec = ModelSpec::new(2, -0.5).unwrap();
        let t = to_hilbert(&spec).unwrap();
        assert_eq!(t.class().j, 2);
        assert_eq!(t.ops().role(), ThetaRole::ParticleHole);
        assert_eq!(t.ops().block_dim(), 2);
        let k = TorusPoint::new(vec![0.4, 2.9]).unwrap();
        let x = t.block(&k).unwrap();
        let lhs = t.theta().conjugate(&x).unwrap();
        let rhs = -t.block(&k.reflect()).unwrap();
        assert!(frobenius(&(lhs - rhs)) < TRANSFER_TOL);
    }

    #[test]
    fn constant_gamma0_commutes_with_theta() {
        // m large and k = 0 on a d = 1 model gives a multiple of γ_0
        for d in 1..=3 {
            let spec = ModelSpec::new(d, 0.5).unwrap();
            let t = to_hilbert(&spec).unwrap();
            let g0 = t.ops().block_of(spec.rep().gamma(0)).unwrap();
            let conjugated = t.theta().conjugate(&g0).unwrap();
            let sign = if t.ops().role() == ThetaRole::TimeReversal { 1.0 } else { -1.0 };
            assert!(frobenius(&(conjugated - &g0 * c(sign, 0.0))) < TRANSFER_TOL);
        }
    }

    #[test]
    fn transfers_for_stacked_and_extended_models() {
        for d in 1..=3 {
            for extra in 0..=2 {
                let spec = ModelSpec::stacked(d, (1..=d).collect(), 0.5 - d as f64, extra).unwrap();
                let t = to_hilbert(&spec).unwrap();
                assert_eq!(t.class().j, j_index(1, d + extra));
                let k = TorusPoint::new(vec![PI / 3.0; d]).unwrap();
                assert!(t.relation_residual(&k).unwrap() < TRANSFER_TOL);
            }
        }
    }

    #[test]
    fn cartan_annotation() {
        assert_eq!(cartan_label(j_index(1, 1)), "BDI");
        assert_eq!(cartan_label(j_index(0, 3)), "AII");
        let json = classify(1, 0).unwrap().to_json(false);
        assert!(json.cartan_label.is_none());
    }
}
