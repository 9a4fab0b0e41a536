//! Self-test battery behind `krphase check`.

use std::f64::consts::TAU;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bloch::{closing_set, gap, point_residuals, ModelSpec, TorusPoint};
use crate::clifford::{build_rep, check_relations};
use crate::error::{KrError, Result};
use crate::invariants::{closed_form, kr_class, pullback_stacked};
use crate::oracle::{degree_numeric, DegreeResult};
use crate::symmetry::{build_symmetry_ops, classify, representative, table_mismatch};

/// Default degree-oracle grid for the torus dimension.
pub fn default_grid(d: usize) -> usize {
    match d {
        0..=2 => 128,
        3 => 64,
        _ => 16,
    }
}

/// Degree integral, doubling the grid up to twice when the rounding is
/// inconclusive.
pub fn degree_with_refinement(spec: &ModelSpec, grid_n: usize) -> Result<DegreeResult> {
    let mut grid = grid_n;
    for attempt in 0..3 {
        match degree_numeric(spec, grid) {
            Err(KrError::Inconclusive { .. }) if attempt < 2 => grid *= 2,
            other => return other,
        }
    }
    unreachable!("loop returns on the last attempt")
}

/// Orientation sign `s_d` relating the numerical degree to the enumerated
/// strong invariant, measured in the interval `(d − 2, d)` where the
/// preimage is a single point.
pub fn measured_orientation(d: usize, grid_n: usize) -> Result<i64> {
    let spec = ModelSpec::new(d, d as f64 - 1.0)?;
    let strong = kr_class(&spec)?.strong();
    let degree = degree_with_refinement(&spec, grid_n)?.rounded;
    Ok(degree * strong)
}

/// Mass at the middle of every open interval, plus one value beyond each end.
pub fn sample_masses(d: usize) -> Vec<f64> {
    let mut masses: Vec<f64> = closing_set(d).windows(2).map(|w| (w[0] + w[1]) as f64 / 2.0).collect();
    masses.push(d as f64 + 1.0);
    masses.push(-(d as f64) - 1.0);
    masses
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

pub struct CheckConfig {
    pub max_d: usize,
    pub tol: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            max_d: 3,
            tol: crate::clifford::ALGEBRA_TOL,
        }
    }
}

fn fail(msg: String) -> std::result::Result<String, String> {
    Err(msg)
}

fn clifford_suite(cfg: &CheckConfig) -> std::result::Result<String, String> {
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in 1..=6 {
        for a in 0..=n {
            let rep = build_rep(a, n - a).map_err(|e| e.to_string())?;
            let report = check_relations(&rep);
            worst = worst.max(report.max_residual());
            count += 1;
            if !report.passes(cfg.tol) {
                return fail(format!("Cliff({a},{}) residual {:e}", n - a, report.max_residual()));
            }
        }
    }
    Ok(format!("{count} algebras, max residual {worst:e}"))
}

fn bloch_suite(cfg: &CheckConfig) -> std::result::Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for d in 1..=cfg.max_d {
        let spec = ModelSpec::new(d, 0.5 - d as f64 / 3.0).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let k = TorusPoint::new((0..d).map(|_| rng.gen_range(0.0..TAU)).collect())
                .map_err(|e| e.to_string())?;
            let r = point_residuals(&spec, &k).map_err(|e| e.to_string())?;
            worst = worst.max(r.max());
            if r.max() >= cfg.tol {
                return fail(format!("d={d} at {:?}: {r:?}", k.angles()));
            }
        }
    }
    Ok(format!("max residual {worst:e}"))
}

fn gap_suite(cfg: &CheckConfig) -> std::result::Result<String, String> {
    for d in 1..=cfg.max_d {
        let spec = ModelSpec::new(d, 0.0).map_err(|e| e.to_string())?;
        for c in closing_set(d) {
            let g = gap(&spec.with_mass(c as f64), 8).map_err(|e| e.to_string())?;
            if g != 0.0 {
                return fail(format!("d={d} m={c}: gap {g:e}, expected 0"));
            }
        }
        for m in sample_masses(d) {
            let g = gap(&spec.with_mass(m), 8).map_err(|e| e.to_string())?;
            if g <= 0.01 {
                return fail(format!("d={d} m={m}: gap {g}"));
            }
        }
    }
    Ok("closing set reproduced".into())
}

fn invariants_suite(_: &CheckConfig) -> std::result::Result<String, String> {
    let mut cases = 0;
    for d in 1..=8 {
        for m in sample_masses(d) {
            let spec = ModelSpec::new(d, m).map_err(|e| e.to_string())?;
            let enumerated = kr_class(&spec).map_err(|e| e.to_string())?;
            let closed = closed_form(d, m).map_err(|e| e.to_string())?;
            if enumerated != closed {
                return fail(format!("d={d} m={m}: enumeration {enumerated:?} vs closed form {closed:?}"));
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} (d, m) cases agree"))
}

fn stacking_suite(cfg: &CheckConfig) -> std::result::Result<String, String> {
    let mut cases = 0;
    for d in 1..=cfg.max_d {
        for mask in 1u32..(1 << d) {
            let axes: Vec<usize> = (1..=d).filter(|i| mask >> (i - 1) & 1 == 1).collect();
            let k = axes.len();
            for m in sample_masses(k) {
                let stacked = ModelSpec::stacked(d, axes.clone(), m, 0).map_err(|e| e.to_string())?;
                let direct = kr_class(&stacked).map_err(|e| e.to_string())?;
                let base = kr_class(&ModelSpec::new(k, m).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
                let pulled = pullback_stacked(&base, &axes, d).map_err(|e| e.to_string())?;
                if pulled != direct {
                    return fail(format!("d={d} axes={axes:?} m={m}"));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} stacked cases agree"))
}

fn oracle_suite(cfg: &CheckConfig) -> std::result::Result<String, String> {
    let mut signs = Vec::new();
    for d in 1..=cfg.max_d.min(3) {
        let grid = default_grid(d);
        let s_d = measured_orientation(d, grid).map_err(|e| e.to_string())?;
        if s_d.abs() != 1 {
            return fail(format!("d={d}: orientation sign {s_d}"));
        }
        for m in sample_masses(d) {
            let spec = ModelSpec::new(d, m).map_err(|e| e.to_string())?;
            let strong = kr_class(&spec).map_err(|e| e.to_string())?.strong();
            let deg = degree_with_refinement(&spec, grid).map_err(|e| e.to_string())?;
            if deg.rounded != s_d * strong {
                return fail(format!("d={d} m={m}: degree {} vs s_d*strong {}", deg.rounded, s_d * strong));
            }
        }
        signs.push(format!("s_{d}={s_d:+}"));
    }
    Ok(signs.join(" "))
}

fn symmetry_suite(_: &CheckConfig) -> std::result::Result<String, String> {
    for j in 0..8u8 {
        let (a, b) = representative(j);
        let class = classify(a, b).map_err(|e| e.to_string())?;
        let ops = build_symmetry_ops(a, b).map_err(|e| e.to_string())?;
        let problems = table_mismatch(&class, &ops);
        if !problems.is_empty() {
            return fail(format!("j={j}: {}", problems.join("; ")));
        }
    }
    Ok("8 symmetry types reproduced".into())
}

type Suite = fn(&CheckConfig) -> std::result::Result<String, String>;

const SUITES: [(&str, Suite); 7] = [
    ("clifford", clifford_suite),
    ("bloch", bloch_suite),
    ("gap", gap_suite),
    ("invariants", invariants_suite),
    ("stacking", stacking_suite),
    ("oracle", oracle_suite),
    ("symmetry", symmetry_suite),
];

/// Runs every suite in order.
pub fn run_all(cfg: &CheckConfig) -> Vec<SuiteOutcome> {
    SUITES
        .iter()
        .map(|(name, suite)| {
            let start = Instant::now();
            let result = suite(cfg);
            let seconds = start.elapsed().as_secs_f64();
            let (passed, detail) = match result {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            SuiteOutcome {
                name,
                passed,
                detail,
                seconds,
            }
        })
        .collect()
}
