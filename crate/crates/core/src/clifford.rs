//! Matrix representations of the graded "real" Clifford algebras `Cliff(a, b)`.
//!
//! Generators are Jordan-Wigner products of the Pauli matrices on
//! `q = ceil((a+b)/2)` qubits, so every entry is `0`, `±1` or `±i`:
//!
//! ```text
//!   g_{2l}   = Z ⊗ ... ⊗ Z ⊗ X ⊗ I ⊗ ... ⊗ I      (X on qubit l)
//!   g_{2l+1} = Z ⊗ ... ⊗ Z ⊗ Y ⊗ I ⊗ ... ⊗ I
//! ```
//!
//! The grading is `Z ⊗ ... ⊗ Z`. The real structure is `M ↦ U conj(M) U†`
//! for a Pauli string `U`, chosen so that the first `a` generators are fixed
//! and the last `b` change sign. `U = I` (plain conjugation) is preferred
//! whenever it works.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{KrError, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance for exact algebraic identities.
pub const ALGEBRA_TOL: f64 = 1e-12;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Frobenius norm.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn matrix(self) -> CMatrix {
        let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
        match self {
            Pauli::I => CMatrix::from_row_slice(2, 2, &[l, o, o, l]),
            Pauli::X => CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
            Pauli::Y => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
            Pauli::Z => CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        }
    }

    fn is_flip(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn anticommutes(self, other: Pauli) -> bool {
        self != Pauli::I && other != Pauli::I && self != other
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct PauliString(Vec<Pauli>);

impl PauliString {
    fn matrix(&self) -> CMatrix {
        self.0
            .iter()
            .fold(identity(1), |acc, p| acc.kronecker(&p.matrix()))
    }

    /// `conj(P) = ±P`; each `Y` factor contributes a sign.
    fn conj_sign(&self) -> i8 {
        if self.0.iter().filter(|&&p| p == Pauli::Y).count() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `P Q P† = ±Q`.
    fn commutation_sign(&self, other: &PauliString) -> i8 {
        let flips = self
            .0
            .iter()
            .zip(&other.0)
            .filter(|(p, q)| p.anticommutes(**q))
            .count();
        if flips % 2 == 0 {
            1
        } else {
            -1
        }
    }

    fn flip_count(&self) -> usize {
        self.0.iter().filter(|p| p.is_flip()).count()
    }

    fn jordan_wigner(index: usize, qubits: usize) -> Self {
        let site = index / 2;
        let ops = (0..qubits)
            .map(|q| match q.cmp(&site) {
                std::cmp::Ordering::Less => Pauli::Z,
                std::cmp::Ordering::Equal if index.is_multiple_of(2) => Pauli::X,
                std::cmp::Ordering::Equal => Pauli::Y,
                std::cmp::Ordering::Greater => Pauli::I,
            })
            .collect();
        PauliString(ops)
    }

    fn parity(qubits: usize) -> Self {
        PauliString(vec![Pauli::Z; qubits])
    }

    /// The `idx`-th string in base-4 order; index 0 is the identity.
    fn nth(idx: usize, qubits: usize) -> Self {
        let ops = (0..qubits)
            .map(|q| Pauli::ALL[(idx >> (2 * (qubits - 1 - q))) & 3])
            .collect();
        PauliString(ops)
    }
}

/// Antilinear operator `v ↦ U conj(v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AntiUnitary {
    unitary: CMatrix,
}

impl AntiUnitary {
    pub fn new(unitary: CMatrix) -> Result<Self> {
        if !unitary.is_square() {
            return Err(KrError::DimensionMismatch {
                expected: unitary.nrows(),
                found: unitary.ncols(),
            });
        }
        Ok(Self { unitary })
    }

    /// Plain complex conjugation.
    pub fn conjugation(dim: usize) -> Self {
        Self {
            unitary: identity(dim),
        }
    }

    pub fn unitary_part(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn dim(&self) -> usize {
        self.unitary.nrows()
    }

    /// `‖U U† − 1‖`.
    pub fn unitarity_residual(&self) -> f64 {
        frobenius(&(&self.unitary * self.unitary.adjoint() - identity(self.dim())))
    }

    /// The operator `U conj(U)` representing the antiunitary squared.
    pub fn square(&self) -> CMatrix {
        &self.unitary * conj(&self.unitary)
    }

    /// Sign `s` with `U conj(U) = s·1`, if the square is `±1` within `tol`.
    pub fn square_sign(&self, tol: f64) -> Option<i8> {
        let sq = self.square();
        let id = identity(self.dim());
        if frobenius(&(&sq - &id)) < tol {
            Some(1)
        } else if frobenius(&(&sq + &id)) < tol {
            Some(-1)
        } else {
            None
        }
    }

    /// `A M A⁻¹ = U conj(M) U†`.
    pub fn conjugate(&self, m: &CMatrix) -> Result<CMatrix> {
        apply_antiunitary(self, m)
    }

    /// Change of basis: the same operator expressed in the columns of `basis`.
    pub(crate) fn in_basis(&self, basis: &CMatrix) -> Self {
        Self {
            unitary: basis.adjoint() * &self.unitary * conj(basis),
        }
    }
}

pub fn apply_antiunitary(a: &AntiUnitary, m: &CMatrix) -> Result<CMatrix> {
    if m.nrows() != a.dim() || m.ncols() != a.dim() {
        return Err(KrError::DimensionMismatch {
            expected: a.dim(),
            found: m.nrows().max(m.ncols()),
        });
    }
    Ok(&a.unitary * conj(m) * a.unitary.adjoint())
}

#[derive(Clone, Debug)]
pub struct CliffordRep {
    a: usize,
    b: usize,
    gammas: Vec<CMatrix>,
    grading: CMatrix,
    real_structure: AntiUnitary,
    grading_reality: i8,
}

impl CliffordRep {
    /// Assembles a representation without validating it; see [`check_relations`].
    pub fn from_parts(
        a: usize,
        b: usize,
        gammas: Vec<CMatrix>,
        grading: CMatrix,
        real_structure: AntiUnitary,
        grading_reality: i8,
    ) -> Self {
        Self {
            a,
            b,
            gammas,
            grading,
            real_structure,
            grading_reality,
        }
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn generator_count(&self) -> usize {
        self.a + self.b
    }

    pub fn dim(&self) -> usize {
        self.grading.nrows()
    }

    pub fn gammas(&self) -> &[CMatrix] {
        &self.gammas
    }

    pub fn gamma(&self, i: usize) -> &CMatrix {
        &self.gammas[i]
    }

    pub fn grading(&self) -> &CMatrix {
        &self.grading
    }

    pub fn real_structure(&self) -> &AntiUnitary {
        &self.real_structure
    }

    /// Sign `ε` in `R(Γ) = εΓ`. Always `+1` for an odd number of generators;
    /// for an even number it is forced by the algebra to `(-1)^(b + (a+b)/2)`.
    pub fn grading_reality(&self) -> i8 {
        self.grading_reality
    }

    /// Expected `R(γ_i) = ±γ_i`: `+1` for the first `a` generators.
    pub fn reality_sign(&self, i: usize) -> i8 {
        if i < self.a {
            1
        } else {
            -1
        }
    }

    /// `R(M) = U conj(M) U†`.
    pub fn real(&self, m: &CMatrix) -> Result<CMatrix> {
        apply_antiunitary(&self.real_structure, m)
    }
}

pub fn build_rep(a: usize, b: usize) -> Result<CliffordRep> {
    let n = a + b;
    if n == 0 {
        return Err(KrError::DegenerateAlgebra);
    }
    let qubits = n.div_ceil(2);
    let pool: Vec<PauliString> = (0..2 * qubits)
        .map(|g| PauliString::jordan_wigner(g, qubits))
        .collect();

    for idx in 0..(1usize << (2 * qubits)) {
        let u = PauliString::nth(idx, qubits);
        // Γ = Z^{⊗q}, so R(Γ) = (-1)^{#X,Y in U} Γ.
        let grading_reality: i8 = if u.flip_count().is_multiple_of(2) { 1 } else { -1 };
        if n % 2 == 1 && grading_reality != 1 {
            continue;
        }
        let (mut real, mut imaginary) = (Vec::new(), Vec::new());
        for g in &pool {
            if g.conj_sign() * u.commutation_sign(g) == 1 {
                real.push(g);
            } else {
                imaginary.push(g);
            }
        }
        if real.len() < a || imaginary.len() < b {
            continue;
        }
        let gammas = real[..a]
            .iter()
            .chain(&imaginary[..b])
            .map(|g| g.matrix())
            .collect();
        return Ok(CliffordRep {
            a,
            b,
            gammas,
            grading: PauliString::parity(qubits).matrix(),
            real_structure: AntiUnitary { unitary: u.matrix() },
            grading_reality,
        });
    }
    Err(KrError::NoRealStructure { a, b })
}

/// Representation of `Cliff(a, b + extra_b)` containing `rep`'s relations.
///
/// Returns the new representation and the index map sending generator `i`
/// of `rep` to its image.
pub fn extend_generators(rep: &CliffordRep, extra_b: usize) -> Result<(CliffordRep, Vec<usize>)> {
    if extra_b > 2 {
        return Err(KrError::TooManyExtraGenerators(extra_b));
    }
    let index_map = (0..rep.generator_count()).collect();
    if extra_b == 0 {
        return Ok((rep.clone(), index_map));
    }
    Ok((build_rep(rep.a, rep.b + extra_b)?, index_map))
}

/// Maximum residual for each family of defining relations.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RelationReport {
    /// `γ_iγ_j + γ_jγ_i − 2δ_ij`
    pub anticommutation: f64,
    /// `γ_i − γ_i†`
    pub selfadjoint: f64,
    /// `Γ² − 1`, `Γ − Γ†`, `Γγ_iΓ + γ_i`
    pub grading: f64,
    /// `R(γ_i) ∓ γ_i`, `R(Γ) − εΓ`
    pub reality: f64,
    /// `R∘R − id` and unitarity of the real structure
    pub involution: f64,
}

impl RelationReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.anticommutation,
            self.selfadjoint,
            self.grading,
            self.reality,
            self.involution,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() < tol
    }
}

pub fn check_relations(rep: &CliffordRep) -> RelationReport {
    let dim = rep.dim();
    let id = identity(dim);
    let mut report = RelationReport::default();
    let gamma = rep.grading();

    let dims_ok = rep.gammas.iter().all(|g| g.shape() == (dim, dim))
        && rep.real_structure.dim() == dim
        && rep.gammas.len() == rep.generator_count();
    if !dims_ok {
        return RelationReport {
            anticommutation: f64::INFINITY,
            ..report
        };
    }

    for (i, gi) in rep.gammas.iter().enumerate() {
        for (j, gj) in rep.gammas.iter().enumerate().skip(i) {
            let target = if i == j { &id * c(2.0, 0.0) } else { CMatrix::zeros(dim, dim) };
            let r = frobenius(&(gi * gj + gj * gi - target));
            report.anticommutation = report.anticommutation.max(r);
        }
        report.selfadjoint = report.selfadjoint.max(frobenius(&(gi - gi.adjoint())));
        report.grading = report.grading.max(frobenius(&(gamma * gi * gamma + gi)));
        let expected = gi * c(rep.reality_sign(i) as f64, 0.0);
        let real = rep.real(gi).expect("dimensions checked");
        report.reality = report.reality.max(frobenius(&(real - expected)));
    }

    report.grading = report
        .grading
        .max(frobenius(&(gamma * gamma - &id)))
        .max(frobenius(&(gamma - gamma.adjoint())));
    let real_gamma = rep.real(gamma).expect("dimensions checked");
    let eps = c(rep.grading_reality as f64, 0.0);
    report.reality = report.reality.max(frobenius(&(real_gamma - gamma * eps)));

    // R∘R = id on matrices iff U conj(U) is a unimodular scalar; it is ±1 here.
    let sq = rep.real_structure.square();
    let scalar_residual =
        frobenius(&(&sq - &id)).min(frobenius(&(&sq + &id)));
    report.involution = scalar_residual.max(rep.real_structure.unitarity_residual());
    report
}
