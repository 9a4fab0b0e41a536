//! Bloch Hamiltonians `H(k) = Σ_j sin(k_{i_j}) γ_j + (m + Σ_j cos(k_{i_j})) γ_0`
//! on the torus `[0, 2π)^d` with the real involution `k ↦ −k`.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::clifford::{build_rep, c, frobenius, CMatrix, CliffordRep};
use crate::error::{KrError, Result};

/// Below this norm `φ̃(k)` is treated as zero.
pub const GAP_EPS: f64 = 1e-14;

/// Masses closer than this to the closing set are refused by the invariant code.
pub const CLOSING_EPS: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct ModelSpec {
    d: usize,
    axes: Vec<usize>,
    m: f64,
    extra_b: usize,
    rep: CliffordRep,
}

impl ModelSpec {
    /// The model on all `d` axes with values in `Cliff(1, d)`.
    pub fn new(d: usize, m: f64) -> Result<Self> {
        Self::stacked(d, (1..=d).collect(), m, 0)
    }

    /// The model depending only on the coordinates in `axes` (1-based,
    /// strictly increasing), with values in `Cliff(1, |axes| + extra_b)`.
    pub fn stacked(d: usize, axes: Vec<usize>, m: f64, extra_b: usize) -> Result<Self> {
        validate_axes(&axes, d)?;
        if extra_b > 2 {
            return Err(KrError::TooManyExtraGenerators(extra_b));
        }
        if !m.is_finite() {
            return Err(KrError::InvalidSpec(format!("mass {m} is not finite")));
        }
        let rep = build_rep(1, axes.len() + extra_b)?;
        Ok(Self {
            d,
            axes,
            m,
            extra_b,
            rep,
        })
    }

    pub fn with_mass(&self, m: f64) -> Self {
        Self { m, ..self.clone() }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn axes(&self) -> &[usize] {
        &self.axes
    }

    /// Number of active axes.
    pub fn k(&self) -> usize {
        self.axes.len()
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn extra_b(&self) -> usize {
        self.extra_b
    }

    pub fn rep(&self) -> &CliffordRep {
        &self.rep
    }

    pub fn has_full_axes(&self) -> bool {
        self.axes.len() == self.d
    }
}

pub(crate) fn validate_axes(axes: &[usize], d: usize) -> Result<()> {
    let ok = d >= 1
        && !axes.is_empty()
        && axes.iter().all(|&i| (1..=d).contains(&i))
        && axes.windows(2).all(|w| w[0] < w[1]);
    if ok {
        Ok(())
    } else {
        Err(KrError::InvalidAxes {
            axes: axes.to_vec(),
            d,
        })
    }
}

/// The closing set `{−k, −k+2, …, k}`.
pub fn closing_set(k: usize) -> Vec<i64> {
    let k = k as i64;
    (0..=k).map(|j| -k + 2 * j).collect()
}

pub fn is_near_closing(k: usize, m: f64, eps: f64) -> bool {
    closing_set(k).iter().any(|&c| (m - c as f64).abs() <= eps)
}

pub(crate) fn ensure_gapped(k: usize, m: f64) -> Result<()> {
    if is_near_closing(k, m, CLOSING_EPS) {
        Err(KrError::GapClosed { m, k })
    } else {
        Ok(())
    }
}

/// A point of the Brillouin torus, angles in `[0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint {
    angles: Vec<f64>,
}

impl TorusPoint {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        for (index, &angle) in angles.iter().enumerate() {
            if !(0.0..TAU).contains(&angle) {
                return Err(KrError::AngleOutOfRange { index, angle });
            }
        }
        Ok(Self { angles })
    }

    /// Reduces arbitrary angles into `[0, 2π)`.
    pub fn wrapped(angles: &[f64]) -> Self {
        Self {
            angles: angles.iter().map(|&a| wrap_angle(a)).collect(),
        }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn dim(&self) -> usize {
        self.angles.len()
    }

    /// The real involution `k ↦ −k`.
    pub fn reflect(&self) -> Self {
        Self {
            angles: self.angles.iter().map(|&a| wrap_angle(-a)).collect(),
        }
    }
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

fn check_point(spec: &ModelSpec, k: &TorusPoint) -> Result<()> {
    if k.dim() != spec.d {
        return Err(KrError::DimensionMismatch {
            expected: spec.d,
            found: k.dim(),
        });
    }
    Ok(())
}

fn phi_tilde_from_trig(m: f64, cos: &[f64], sin: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(cos.len() + 1);
    out.push(cos.iter().sum::<f64>() + m);
    out.extend_from_slice(sin);
    out
}

/// `(Σ_{j∈axes} cos k_j + m, sin k_{i_1}, …, sin k_{i_k})`.
pub fn phi_tilde(spec: &ModelSpec, k: &TorusPoint) -> Result<Vec<f64>> {
    check_point(spec, k)?;
    let (cos, sin): (Vec<f64>, Vec<f64>) = spec
        .axes
        .iter()
        .map(|&i| {
            let a = k.angles[i - 1];
            (a.cos(), a.sin())
        })
        .unzip();
    Ok(phi_tilde_from_trig(spec.m, &cos, &sin))
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `φ̃(k)/‖φ̃(k)‖` on the sphere `S^{1,k}`.
pub fn phi(spec: &ModelSpec, k: &TorusPoint) -> Result<Vec<f64>> {
    let x = phi_tilde(spec, k)?;
    let n = norm(&x);
    if n < GAP_EPS {
        return Err(KrError::ZeroVector { norm: n });
    }
    Ok(x.into_iter().map(|v| v / n).collect())
}

/// `Σ x_i γ_i`.
pub fn beta(rep: &CliffordRep, x: &[f64]) -> Result<CMatrix> {
    if x.len() != rep.generator_count() {
        return Err(KrError::DimensionMismatch {
            expected: rep.generator_count(),
            found: x.len(),
        });
    }
    let dim = rep.dim();
    Ok(x
        .iter()
        .zip(rep.gammas())
        .fold(CMatrix::zeros(dim, dim), |acc, (&xi, g)| acc + g * c(xi, 0.0)))
}

/// `β(x)(1 + β(x)²)^{-1/2} = β(x)(1 + ‖x‖²)^{-1/2}`.
pub fn bounded_transform(rep: &CliffordRep, x: &[f64]) -> Result<CMatrix> {
    let scale = (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt().recip();
    Ok(beta(rep, x)? * c(scale, 0.0))
}

fn padded(spec: &ModelSpec, mut x: Vec<f64>) -> Vec<f64> {
    x.resize(spec.rep.generator_count(), 0.0);
    x
}

pub fn hamiltonian(spec: &ModelSpec, k: &TorusPoint) -> Result<CMatrix> {
    let x = phi_tilde(spec, k)?;
    beta(&spec.rep, &padded(spec, x))
}

/// Spectral flattening `H(k)/‖φ̃(k)‖`.
pub fn flatten(spec: &ModelSpec, k: &TorusPoint) -> Result<CMatrix> {
    let x = phi_tilde(spec, k)?;
    let n = norm(&x);
    if n < GAP_EPS {
        return Err(KrError::GapClosed { m: spec.m, k: spec.k() });
    }
    Ok(beta(&spec.rep, &padded(spec, x))? * c(n.recip(), 0.0))
}

/// `(cos, sin)` of `2π i / n`, exact at quarter turns.
pub(crate) fn grid_trig(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            if (4 * i) % n == 0 {
                match 4 * i / n {
                    0 => (1.0, 0.0),
                    1 => (0.0, 1.0),
                    2 => (-1.0, 0.0),
                    _ => (0.0, -1.0),
                }
            } else {
                let a = TAU * i as f64 / n as f64;
                (a.cos(), a.sin())
            }
        })
        .collect()
}

/// Iterates a `dims`-dimensional grid of `n` points per axis as
/// multi-indices, splitting the first axis across threads.
pub(crate) fn grid_min<F>(n: usize, dims: usize, f: F) -> f64
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|first| {
            let mut idx = vec![0usize; dims];
            idx[0] = first;
            let inner = n.pow(dims as u32 - 1);
            let mut best = f64::INFINITY;
            for flat in 0..inner {
                let mut rest = flat;
                for slot in idx.iter_mut().skip(1).rev() {
                    *slot = rest % n;
                    rest /= n;
                }
                best = best.min(f(&idx));
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// Twice the minimum of `‖φ̃‖` over a uniform grid of `grid_n` points per
/// active axis. The spectrum of `H(k)` is `±‖φ̃(k)‖`.
pub fn gap(spec: &ModelSpec, grid_n: usize) -> Result<f64> {
    if grid_n < 2 || !grid_n.is_multiple_of(2) {
        return Err(KrError::InvalidGrid(grid_n));
    }
    let trig = grid_trig(grid_n);
    let k = spec.k();
    let min = grid_min(grid_n, k, |idx| {
        let (cos, sin): (Vec<f64>, Vec<f64>) = idx.iter().map(|&i| trig[i]).unzip();
        norm(&phi_tilde_from_trig(spec.m, &cos, &sin))
    });
    // The fixed points {0, π}^k are on every even grid.
    Ok(2.0 * min)
}

/// `R(H(k)) − H(−k)` style residuals for one point, used by checks.
#[derive(Clone, Debug, Default)]
pub struct PointResiduals {
    pub selfadjoint: f64,
    pub odd: f64,
    pub reality: f64,
    pub square: f64,
    pub pullback: f64,
}

impl PointResiduals {
    pub fn max(&self) -> f64 {
        [self.selfadjoint, self.odd, self.reality, self.square, self.pullback]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn point_residuals(spec: &ModelSpec, k: &TorusPoint) -> Result<PointResiduals> {
    let h = hamiltonian(spec, k)?;
    let g = spec.rep.grading();
    let x = phi_tilde(spec, k)?;
    let n2 = x.iter().map(|v| v * v).sum::<f64>();
    let dim = spec.rep.dim();
    let id = CMatrix::identity(dim, dim);
    let h_reflected = hamiltonian(spec, &k.reflect())?;
    let pullback = if n2.sqrt() >= GAP_EPS {
        let flat = flatten(spec, k)?;
        let via_phi = beta(&spec.rep, &padded(spec, phi(spec, k)?))?;
        frobenius(&(flat - via_phi))
    } else {
        0.0
    };
    Ok(PointResiduals {
        selfadjoint: frobenius(&(&h - h.adjoint())),
        odd: frobenius(&(g * &h * g + &h)),
        reality: frobenius(&(spec.rep.real(&h)? - h_reflected)),
        square: frobenius(&(&h * &h - id * c(n2, 0.0))),
        pullback,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::clifford::ALGEBRA_TOL;

    fn pt(a: &[f64]) -> TorusPoint {
        TorusPoint::new(a.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn phi_tilde_examples() {
        let s = ModelSpec::new(1, 0.0).unwrap();
        assert!(close(&phi_tilde(&s, &pt(&[FRAC_PI_2])).unwrap(), &[0.0, 1.0], 1e-15));
        let s = ModelSpec::new(2, -1.0).unwrap();
        assert_eq!(phi_tilde(&s, &pt(&[0.0, 0.0])).unwrap(), vec![1.0, 0.0, 0.0]);
        let s = ModelSpec::new(1, -1.0).unwrap();
        assert!(close(&phi_tilde(&s, &pt(&[PI])).unwrap(), &[-2.0, 0.0], 1e-15));
    }

    #[test]
    fn phi_examples() {
        let s = ModelSpec::new(1, -1.0).unwrap();
        assert!(close(&phi(&s, &pt(&[PI])).unwrap(), &[-1.0, 0.0], 1e-15));
        let s = ModelSpec::new(1, 0.0).unwrap();
        assert!(close(&phi(&s, &pt(&[FRAC_PI_2])).unwrap(), &[0.0, 1.0], 1e-15));
        assert!(close(&phi(&s, &pt(&[0.0])).unwrap(), &[1.0, 0.0], 1e-15));
        let s = ModelSpec::new(2, 2.0).unwrap();
        // cos π = −1 exactly; sin π ≈ 1.2e-16
        assert!(matches!(phi(&s, &pt(&[PI, PI])), Err(KrError::ZeroVector { .. })));
    }

    #[test]
    fn phi_is_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..=4 {
            let s = ModelSpec::new(d, 0.5).unwrap();
            for _ in 0..50 {
                let k = TorusPoint::new((0..d).map(|_| rng.gen_range(0.0..TAU)).collect()).unwrap();
                let p = phi(&s, &k).unwrap();
                let q = phi(&s, &k.reflect()).unwrap();
                assert!((p[0] - q[0]).abs() < 1e-14);
                for i in 1..p.len() {
                    assert!((p[i] + q[i]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn beta_examples() {
        let rep = build_rep(1, 2).unwrap();
        assert_eq!(beta(&rep, &[1.0, 0.0, 0.0]).unwrap(), *rep.gamma(0));
        assert_eq!(beta(&rep, &[0.0; 3]).unwrap(), CMatrix::zeros(4, 4));
        assert!(matches!(beta(&rep, &[1.0]), Err(KrError::DimensionMismatch { .. })));

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let raw: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x: Vec<f64> = raw.iter().map(|v| v / norm(&raw)).collect();
        let m = beta(&rep, &x).unwrap();
        let id = CMatrix::identity(4, 4);
        assert!(frobenius(&(&m * &m - &id)) < ALGEBRA_TOL);
        assert!(frobenius(&(&m - m.adjoint())) < ALGEBRA_TOL);
        let g = rep.grading();
        assert!(frobenius(&(g * &m * g + &m)) < ALGEBRA_TOL);
    }

    #[test]
    fn bounded_transform_examples() {
        let rep = build_rep(1, 2).unwrap();
        let id = CMatrix::identity(4, 4);
        assert_eq!(bounded_transform(&rep, &[0.0; 3]).unwrap(), CMatrix::zeros(4, 4));

        let unit = [0.6, 0.0, 0.8];
        let t = bounded_transform(&rep, &unit).unwrap();
        assert!(frobenius(&(&t * &t - &id * c(0.5, 0.0))) < ALGEBRA_TOL);

        let big = [1e3, 0.0, 0.0];
        let t = bounded_transform(&rep, &big).unwrap();
        assert!(frobenius(&(&t * &t - &id)) < 1e-5);

        // 1 − T² = (1 + ‖x‖²)^{-1}
        let x = [0.3, -1.2, 2.0];
        let t = bounded_transform(&rep, &x).unwrap();
        let expected = (1.0 + x.iter().map(|v| v * v).sum::<f64>()).recip();
        assert!(frobenius(&(&id - &t * &t - &id * c(expected, 0.0))) < ALGEBRA_TOL);
    }

    #[test]
    fn hamiltonian_examples() {
        let s = ModelSpec::new(1, 0.0).unwrap();
        let h = hamiltonian(&s, &pt(&[FRAC_PI_2])).unwrap();
        assert!(frobenius(&(h - s.rep().gamma(1))) < 1e-15);
        let id = CMatrix::identity(2, 2);
        for i in 0..16 {
            let h = hamiltonian(&s, &pt(&[TAU * i as f64 / 16.0])).unwrap();
            assert!(frobenius(&(&h * &h - &id)) < ALGEBRA_TOL);
        }
        let s = ModelSpec::new(2, 1.0).unwrap();
        let h = hamiltonian(&s, &pt(&[PI, PI])).unwrap();
        assert!(frobenius(&(h + s.rep().gamma(0))) < 1e-15);
    }

    #[test]
    fn flatten_examples() {
        let s = ModelSpec::new(1, 5.0).unwrap();
        let f = flatten(&s, &pt(&[0.0])).unwrap();
        assert!(frobenius(&(f - s.rep().gamma(0))) < 1e-15);
        let s = ModelSpec::new(1, -5.0).unwrap();
        let f = flatten(&s, &pt(&[0.0])).unwrap();
        assert!(frobenius(&(f + s.rep().gamma(0))) < 1e-15);

        let s = ModelSpec::new(3, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let k = TorusPoint::new((0..3).map(|_| rng.gen_range(0.0..TAU)).collect()).unwrap();
            let r = point_residuals(&s, &k).unwrap();
            assert!(r.pullback < ALGEBRA_TOL);
        }
        let s = ModelSpec::new(1, 1.0).unwrap();
        assert!(matches!(flatten(&s, &pt(&[PI])), Err(KrError::GapClosed { .. })));
    }

    #[test]
    fn gap_examples() {
        let s = ModelSpec::new(1, 0.0).unwrap();
        assert!((gap(&s, 8).unwrap() - 2.0).abs() < 1e-15);
        let s = ModelSpec::new(2, 2.0).unwrap();
        assert_eq!(gap(&s, 8).unwrap(), 0.0);
        let s = ModelSpec::new(2, 1.0).unwrap();
        assert!((gap(&s, 64).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(gap(&s, 7), Err(KrError::InvalidGrid(7)));
    }

    #[test]
    fn gap_vanishes_exactly_on_closing_set() {
        for d in 1..=4 {
            for c in closing_set(d) {
                let s = ModelSpec::new(d, c as f64).unwrap();
                assert_eq!(gap(&s, 8).unwrap(), 0.0, "d={d} m={c}");
            }
            for c in closing_set(d) {
                let s = ModelSpec::new(d, c as f64 + 1.0).unwrap();
                assert!(gap(&s, 8).unwrap() > 0.01);
            }
        }
    }

    #[test]
    fn identities_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 1..=4 {
            let s = ModelSpec::new(d, 0.37).unwrap();
            for _ in 0..100 {
                let k = TorusPoint::new((0..d).map(|_| rng.gen_range(0.0..TAU)).collect()).unwrap();
                let r = point_residuals(&s, &k).unwrap();
                assert!(r.max() < ALGEBRA_TOL, "d={d}: {r:?}");
            }
        }
    }

    #[test]
    fn stacked_and_extended_models() {
        let s = ModelSpec::stacked(3, vec![2], 0.0, 0).unwrap();
        let k = pt(&[1.0, FRAC_PI_2, 2.0]);
        assert!(close(&phi_tilde(&s, &k).unwrap(), &[0.0, 1.0], 1e-15));

        let s = ModelSpec::stacked(2, vec![1, 2], 0.5, 2).unwrap();
        assert_eq!(s.rep().generator_count(), 5);
        let k = pt(&[0.3, 4.0]);
        assert!(point_residuals(&s, &k).unwrap().max() < ALGEBRA_TOL);
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(ModelSpec::stacked(2, vec![3], 0.0, 0), Err(KrError::InvalidAxes { .. })));
        assert!(matches!(ModelSpec::stacked(2, vec![2, 1], 0.0, 0), Err(KrError::InvalidAxes { .. })));
        assert!(matches!(ModelSpec::stacked(2, vec![], 0.0, 0), Err(KrError::InvalidAxes { .. })));
        assert!(matches!(TorusPoint::new(vec![TAU]), Err(KrError::AngleOutOfRange { .. })));
        assert!(matches!(TorusPoint::new(vec![-0.1]), Err(KrError::AngleOutOfRange { .. })));
        let s = ModelSpec::new(2, 0.5).unwrap();
        assert!(matches!(phi_tilde(&s, &pt(&[0.0])), Err(KrError::DimensionMismatch { .. })));
    }

    #[test]
    fn reflection_wraps() {
        let k = pt(&[0.0, PI, 1.0]);
        let r = k.reflect();
        assert_eq!(r.angles()[0], 0.0);
        assert!((r.angles()[1] - PI).abs() < 1e-15);
        assert!((r.angles()[2] - (TAU - 1.0)).abs() < 1e-15);
    }
}
