//! Residual-based verification: does a map preserve a family of fields,
//! does a whole group, does anything sampled outside it.
//!
//! Residuals are scale-normalized by 1 + |X(p)|, and the preserve/violate
//! thresholds are deliberately separated by four orders of magnitude so
//! borderline cases surface as Inconclusive instead of silently passing.

mod flow_probe;
mod invariant_space;

pub use flow_probe::{flow_commutation_probe, FlowCommutationReport};
pub use invariant_space::{
    compare_invariant_spaces, invariant_field_space, invariant_field_space_of, monomials,
    EquivariancePresentation, InvariantSpace,
};

use crate::dsl::{pushforward_residual, Chart, MapExpr, VFieldExpr};
use crate::error::{Error, Result};
use crate::lie::{haar_orthogonal, haar_sample_with, haar_unitary_matrix, Spec};
use crate::linalg::{realify_interleaved, RMat};
use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampleDomain {
    Ball { radius: f64 },
    Sphere { radius: f64 },
    Annulus { r1: f64, r2: f64 },
    ProductBox,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub count: usize,
    pub domain: SampleDomain,
    pub seed: u64,
}

impl SamplePlan {
    pub fn new(count: usize, domain: SampleDomain, seed: u64) -> Result<Self> {
        if count < 1 {
            return Err(Error::InvalidInput("sample count must be >= 1".into()));
        }
        match domain {
            SampleDomain::Ball { radius } | SampleDomain::Sphere { radius } => {
                if radius <= 0.0 {
                    return Err(Error::InvalidInput("radius must be positive".into()));
                }
            }
            SampleDomain::Annulus { r1, r2 } => {
                if r1 <= 0.0 || r2 <= r1 {
                    return Err(Error::InvalidInput(
                        "annulus radii must satisfy 0 < r1 < r2".into(),
                    ));
                }
            }
            SampleDomain::ProductBox => {}
        }
        Ok(SamplePlan {
            count,
            domain,
            seed,
        })
    }

    pub fn ball(count: usize, radius: f64, seed: u64) -> Result<Self> {
        SamplePlan::new(count, SampleDomain::Ball { radius }, seed)
    }

    pub fn sphere(count: usize, radius: f64, seed: u64) -> Result<Self> {
        SamplePlan::new(count, SampleDomain::Sphere { radius }, seed)
    }

    pub fn annulus(count: usize, r1: f64, r2: f64, seed: u64) -> Result<Self> {
        SamplePlan::new(count, SampleDomain::Annulus { r1, r2 }, seed)
    }

    /// Deterministic point set; the Euclidean factor is drawn from the
    /// declared domain and torus angles uniformly.
    pub fn sample_points(&self, chart: &Chart) -> Vec<Vec<f64>> {
        let mut rng = crate::lie::rng_for_task(self.seed, 0);
        let k = chart.x_dim();
        let s = chart.theta_dim();
        (0..self.count)
            .map(|_| {
                let mut p = match self.domain {
                    SampleDomain::Ball { radius } => {
                        let dir = random_direction(k, &mut rng);
                        let u: f64 = rng.gen::<f64>();
                        let r = radius * u.powf(1.0 / k as f64);
                        dir.iter().map(|d| d * r).collect::<Vec<f64>>()
                    }
                    SampleDomain::Sphere { radius } => random_direction(k, &mut rng)
                        .iter()
                        .map(|d| d * radius)
                        .collect(),
                    SampleDomain::Annulus { r1, r2 } => {
                        let dir = random_direction(k, &mut rng);
                        let u: f64 = rng.gen::<f64>();
                        let d = k as f64;
                        let r = (r1.powf(d) + u * (r2.powf(d) - r1.powf(d))).powf(1.0 / d);
                        dir.iter().map(|c| c * r).collect()
                    }
                    SampleDomain::ProductBox => {
                        (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect()
                    }
                };
                for _ in 0..s {
                    p.push(rng.gen_range(0.0..std::f64::consts::TAU));
                }
                p
            })
            .collect()
    }
}

fn random_direction<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    use rand_distr::StandardNormal;
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Preserves,
    Violates,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Preserves => "Preserves",
            Verdict::Violates => "Violates",
            Verdict::Inconclusive => "Inconclusive",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub preserve_tol: f64,
    pub violate_floor: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            preserve_tol: 1e-8,
            violate_floor: 1e-4,
        }
    }
}

impl Thresholds {
    pub fn verdict(&self, max_scaled: f64, evaluated: usize) -> Verdict {
        if evaluated == 0 {
            return Verdict::Inconclusive;
        }
        if max_scaled < self.preserve_tol {
            Verdict::Preserves
        } else if max_scaled > self.violate_floor {
            Verdict::Violates
        } else {
            Verdict::Inconclusive
        }
    }
}

/// One (map, field) row of a report. `max` and `mean` are the
/// scale-normalized residuals |R(p)| / (1 + |X(p)|).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualCase {
    pub map: String,
    pub field: String,
    pub max: f64,
    pub mean: f64,
    pub argmax: Vec<f64>,
    pub verdict: Verdict,
    pub skipped: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub thresholds: Thresholds,
    pub cases: Vec<ResidualCase>,
    pub verdict: Verdict,
}

impl ResidualReport {
    fn aggregate(thresholds: Thresholds, cases: Vec<ResidualCase>) -> ResidualReport {
        let verdict = if cases.iter().any(|c| c.verdict == Verdict::Violates) {
            Verdict::Violates
        } else if !cases.is_empty() && cases.iter().all(|c| c.verdict == Verdict::Preserves) {
            Verdict::Preserves
        } else {
            Verdict::Inconclusive
        };
        ResidualReport {
            thresholds,
            cases,
            verdict,
        }
    }

    /// Aggregate where *every* case must violate (outside-probe reports).
    fn aggregate_all_violate(thresholds: Thresholds, cases: Vec<ResidualCase>) -> ResidualReport {
        let verdict = if !cases.is_empty() && cases.iter().all(|c| c.verdict == Verdict::Violates)
        {
            Verdict::Violates
        } else if !cases.is_empty() && cases.iter().all(|c| c.verdict == Verdict::Preserves) {
            Verdict::Preserves
        } else {
            Verdict::Inconclusive
        };
        ResidualReport {
            thresholds,
            cases,
            verdict,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.cases.iter().map(|c| c.max).fold(0.0, f64::max)
    }
}

fn residual_case(
    label: &str,
    map: &MapExpr,
    field: &VFieldExpr,
    points: &[Vec<f64>],
    thresholds: &Thresholds,
) -> ResidualCase {
    // Per-point results are computed in parallel but reduced in index
    // order, so reports are identical for any worker count.
    let per_point: Vec<Option<f64>> = eval_points(points, |p| {
        let r = pushforward_residual(map, field, p).ok()?;
        let rn = DVector::from_vec(r).norm();
        let scale = 1.0 + field.magnitude(p).ok()?;
        Some(rn / scale)
    });
    let mut max = 0.0f64;
    let mut sum = 0.0f64;
    let mut argmax = Vec::new();
    let mut evaluated = 0usize;
    let mut skipped = 0usize;
    for (p, v) in points.iter().zip(per_point) {
        match v {
            Some(r) => {
                evaluated += 1;
                sum += r;
                if r >= max {
                    max = r;
                    argmax = p.clone();
                }
            }
            None => skipped += 1,
        }
    }
    let mean = if evaluated > 0 {
        sum / evaluated as f64
    } else {
        0.0
    };
    ResidualCase {
        map: label.to_string(),
        field: field.to_string(),
        max,
        mean,
        argmax,
        verdict: thresholds.verdict(max, evaluated),
        skipped,
    }
}

#[cfg(feature = "parallel")]
fn eval_points<F>(points: &[Vec<f64>], f: F) -> Vec<Option<f64>>
where
    F: Fn(&[f64]) -> Option<f64> + Sync,
{
    use rayon::prelude::*;
    points.par_iter().map(|p| f(p)).collect()
}

#[cfg(not(feature = "parallel"))]
fn eval_points<F>(points: &[Vec<f64>], f: F) -> Vec<Option<f64>>
where
    F: Fn(&[f64]) -> Option<f64> + Sync,
{
    points.iter().map(|p| f(p)).collect()
}

/// Does `map` preserve every field? Deterministic given the plan seed;
/// domain errors at sample points are skipped and counted.
pub fn check_automorphism(
    map: &MapExpr,
    fields: &[VFieldExpr],
    plan: &SamplePlan,
) -> Result<ResidualReport> {
    check_automorphism_labeled("map", map, fields, plan, &Thresholds::default())
}

pub fn check_automorphism_labeled(
    label: &str,
    map: &MapExpr,
    fields: &[VFieldExpr],
    plan: &SamplePlan,
    thresholds: &Thresholds,
) -> Result<ResidualReport> {
    for f in fields {
        if !f.chart().compatible(map.chart()) {
            return Err(Error::ChartMismatch(
                f.chart().to_string(),
                map.chart().to_string(),
            ));
        }
    }
    let points = plan.sample_points(map.chart());
    let cases = fields
        .iter()
        .map(|f| residual_case(label, map, f, &points, thresholds))
        .collect();
    Ok(ResidualReport::aggregate(*thresholds, cases))
}

/// Haar-samples the group and checks each sample against each field;
/// Preserves only when every sample preserves every field.
pub fn group_preserves(
    spec: &Spec,
    fields: &[VFieldExpr],
    n_samples: usize,
    plan: &SamplePlan,
) -> Result<ResidualReport> {
    group_preserves_with(spec, fields, n_samples, plan, &Thresholds::default())
}

pub fn group_preserves_with(
    spec: &Spec,
    fields: &[VFieldExpr],
    n_samples: usize,
    plan: &SamplePlan,
    thresholds: &Thresholds,
) -> Result<ResidualReport> {
    let chart = fields
        .first()
        .map(|f| *f.chart())
        .unwrap_or(Chart::euclidean(spec.real_dim()));
    if chart.dim() != spec.real_dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.real_dim(),
            got: chart.dim(),
        });
    }
    let points = plan.sample_points(&chart);
    let mut cases = Vec::new();
    for i in 0..n_samples {
        let mut rng = crate::lie::rng_for_task(plan.seed, 1 + i as u64);
        let g = haar_sample_with(spec, &mut rng)?;
        let map = MapExpr::linear(chart, g.real_matrix())?;
        let label = format!("haar[{i}]");
        for f in fields {
            cases.push(residual_case(&label, &map, f, &points, thresholds));
        }
    }
    Ok(ResidualReport::aggregate(*thresholds, cases))
}

/// Ambient space for outside probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ambient {
    /// Haar on O(n), acting on R^n.
    Orthogonal(usize),
    /// Haar on U(n) realified to O(2n) matrices.
    UnitaryReal(usize),
    /// Gaussian invertible matrices on R^n.
    GeneralLinear(usize),
}

impl Ambient {
    fn real_dim(&self) -> usize {
        match self {
            Ambient::Orthogonal(n) => *n,
            Ambient::UnitaryReal(n) => 2 * n,
            Ambient::GeneralLinear(n) => *n,
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> RMat {
        match self {
            Ambient::Orthogonal(n) => haar_orthogonal(*n, rng),
            Ambient::UnitaryReal(n) => realify_interleaved(&haar_unitary_matrix(*n, rng)),
            Ambient::GeneralLinear(n) => crate::lie::gaussian_matrix(*n, *n, rng),
        }
    }
}

/// Sampler for the complement of a subgroup inside an ambient space:
/// draws from the ambient and keeps only samples the rule certifies as
/// genuinely outside.
pub struct ComplementSampler {
    pub label: String,
    pub ambient: Ambient,
    keep: Box<dyn Fn(&RMat) -> bool + Sync + Send>,
}

const REJECTION_LIMIT: usize = 10_000;

impl ComplementSampler {
    pub fn new(
        label: impl Into<String>,
        ambient: Ambient,
        keep: impl Fn(&RMat) -> bool + Sync + Send + 'static,
    ) -> Self {
        ComplementSampler {
            label: label.into(),
            ambient,
            keep: Box::new(keep),
        }
    }

    /// O(2n) samples at commutator distance >= 0.1 from the complex
    /// structure J (so outside U(n) by a definite margin).
    pub fn orthogonal_minus_unitary(n: usize) -> Self {
        let j = complex_structure_matrix(n);
        ComplementSampler::new(
            format!("O({}) minus U({})", 2 * n, n),
            Ambient::Orthogonal(2 * n),
            move |g| (g * &j - &j * g).norm() >= 0.1,
        )
    }

    /// U(2) samples (realified) at commutator distance >= 0.1 from the
    /// quaternionic structure K (so outside Sp(1)).
    pub fn unitary_minus_sp1() -> Self {
        let k = crate::lie::quaternion_structures(1).remove(1);
        ComplementSampler::new(
            "U(2) minus Sp(1)",
            Ambient::UnitaryReal(2),
            move |g| (g * &k - &k * g).norm() >= 0.1,
        )
    }

    /// Gaussian linear maps at distance >= 0.1 from orthogonality.
    pub fn nonorthogonal_linear(n: usize) -> Self {
        ComplementSampler::new(
            format!("GL({n}) minus O({n})"),
            Ambient::GeneralLinear(n),
            move |g| {
                let n = g.nrows();
                (g.transpose() * g - RMat::identity(n, n)).norm() >= 0.1
            },
        )
    }

    /// The det = -1 sheet of O(n): the complement of SO(n).
    pub fn orthogonal_minus_special(n: usize) -> Self {
        ComplementSampler::new(
            format!("O({n}) minus SO({n})"),
            Ambient::Orthogonal(n),
            |g| g.determinant() < 0.0,
        )
    }

    pub fn draw(&self, seed: u64, index: u64) -> Result<RMat> {
        let mut rng = crate::lie::rng_for_task(seed, index);
        for _ in 0..REJECTION_LIMIT {
            let g = self.ambient.draw(&mut rng);
            if (self.keep)(&g) {
                return Ok(g);
            }
        }
        Err(Error::RejectionExhausted {
            attempts: REJECTION_LIMIT,
        })
    }
}

impl std::fmt::Debug for ComplementSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ComplementSampler")
            .field("label", &self.label)
            .field("ambient", &self.ambient)
            .finish()
    }
}

/// The block rotation J on R^{2n} (multiplication by i in interleaved
/// coordinates).
pub fn complex_structure_matrix(n: usize) -> RMat {
    let mut j = RMat::zeros(2 * n, 2 * n);
    for b in 0..n {
        j[(2 * b, 2 * b + 1)] = -1.0;
        j[(2 * b + 1, 2 * b)] = 1.0;
    }
    j
}

/// Samples witnesses outside a group and checks them against the fields.
/// The report certifies "no sampled outsider preserves" only when every
/// sample violates.
pub fn probe_outside(
    sampler: &ComplementSampler,
    fields: &[VFieldExpr],
    n_samples: usize,
    plan: &SamplePlan,
) -> Result<ResidualReport> {
    probe_outside_with(sampler, fields, n_samples, plan, &Thresholds::default())
}

pub fn probe_outside_with(
    sampler: &ComplementSampler,
    fields: &[VFieldExpr],
    n_samples: usize,
    plan: &SamplePlan,
    thresholds: &Thresholds,
) -> Result<ResidualReport> {
    let chart = fields
        .first()
        .map(|f| *f.chart())
        .unwrap_or(Chart::euclidean(sampler.ambient.real_dim()));
    if chart.dim() != sampler.ambient.real_dim() {
        return Err(Error::DimensionMismatch {
            expected: sampler.ambient.real_dim(),
            got: chart.dim(),
        });
    }
    let points = plan.sample_points(&chart);
    let mut cases = Vec::new();
    for i in 0..n_samples {
        let g = sampler.draw(plan.seed, 1 + i as u64)?;
        let map = MapExpr::linear(chart, g)?;
        let label = format!("{}[{i}]", sampler.label);
        for f in fields {
            cases.push(residual_case(&label, &map, f, &points, thresholds));
        }
    }
    Ok(ResidualReport::aggregate_all_violate(*thresholds, cases))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{radial, un_pair};
    use crate::lie::GroupSpec;

    #[test]
    fn identity_preserves_radial_with_zero_max() {
        let xi = radial(3);
        let id = MapExpr::identity(Chart::euclidean(3));
        let plan = SamplePlan::ball(20, 2.0, 42).unwrap();
        let report = check_automorphism(&id, &[xi], &plan).unwrap();
        assert_eq!(report.verdict, Verdict::Preserves);
        assert_eq!(report.max_residual(), 0.0);
    }

    #[test]
    fn haar_u2_preserves_un_pair() {
        let pair = un_pair(2).unwrap();
        let spec = GroupSpec::unitary(2).unwrap();
        let plan = SamplePlan::ball(50, 3.0, 7).unwrap();
        let report =
            group_preserves(&spec, &[pair.x.clone(), pair.x1.clone()], 5, &plan).unwrap();
        assert_eq!(report.verdict, Verdict::Preserves);
        assert!(report.max_residual() < 1e-10);
    }

    #[test]
    fn reflection_violates_un_pair() {
        let pair = un_pair(2).unwrap();
        let mut d = RMat::identity(4, 4);
        d[(3, 3)] = -1.0; // in O(4) but not U(2)
        let f = MapExpr::linear(Chart::euclidean(4), d).unwrap();
        let plan = SamplePlan::sphere(50, 2.0, 3).unwrap();
        let report = check_automorphism(&f, &[pair.x1.clone()], &plan).unwrap();
        assert_eq!(report.verdict, Verdict::Violates);
    }

    #[test]
    fn outside_probe_all_violate() {
        let pair = un_pair(2).unwrap();
        let sampler = ComplementSampler::orthogonal_minus_unitary(2);
        let plan = SamplePlan::sphere(40, 2.0, 11).unwrap();
        let report = probe_outside(&sampler, &[pair.x1.clone()], 10, &plan).unwrap();
        assert_eq!(report.verdict, Verdict::Violates);
        for case in &report.cases {
            assert_eq!(case.verdict, Verdict::Violates);
            assert!(case.max > 1e-3);
        }
    }

    #[test]
    fn so_complement_preserves_radial_family() {
        // every orthogonal (even det = -1) map preserves f(|x|^2) xi
        let xi = radial(3);
        let r2xi = xi.scale_by(&crate::dsl::norm2(3));
        let sampler = ComplementSampler::orthogonal_minus_special(3);
        let plan = SamplePlan::ball(30, 2.0, 5).unwrap();
        let report = probe_outside(&sampler, &[xi, r2xi], 10, &plan).unwrap();
        assert_eq!(report.verdict, Verdict::Preserves);
    }

    #[test]
    fn plan_validation() {
        assert!(SamplePlan::ball(0, 1.0, 0).is_err());
        assert!(SamplePlan::ball(5, -1.0, 0).is_err());
        assert!(SamplePlan::annulus(5, 2.0, 1.0, 0).is_err());
    }
}
