use super::{GrowthFunction, MeasureVectorField, ReferenceMetric, SourceOperator};
use crate::error::Result;
use crate::exec::Execution;
use crate::measures::{DiscreteMeasure, VelocityMeasure};
use crate::metrics::{flat_value, wasserstein1_1d};
use crate::rng::{random_measure, random_probability_1d, SplitMix64};

/// Slack allowed on every inequality check.
pub const CHECK_TOL: f64 = 1e-9;

const MARGINAL_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MarginalReport {
    pub holds: bool,
    pub input_mass: f64,
    pub output_mass: f64,
    /// `input_mass - output_mass`
    pub mass_deficit: f64,
    /// Largest per-atom weight difference, or `None` when the supports differ.
    pub max_atom_difference: Option<f64>,
}

/// Checks that the spatial marginal of `V[mu]` is `mu`.
pub fn check_marginal(mvf: &dyn MeasureVectorField, mu: &DiscreteMeasure) -> Result<MarginalReport> {
    let v = mvf.eval(mu)?;
    let marginal = v.spatial_marginal();
    let max_atom_difference = marginal.max_atom_difference(mu);
    let scale = mu.total_mass().max(f64::MIN_POSITIVE);
    let holds = max_atom_difference.is_some_and(|d| d <= MARGINAL_REL_TOL * scale);
    Ok(MarginalReport {
        holds,
        input_mass: mu.total_mass(),
        output_mass: v.total_mass(),
        mass_deficit: mu.total_mass() - v.total_mass(),
        max_atom_difference,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct V1Report {
    pub holds: bool,
    /// `max |v| / (1 + max |x|)` over the output support
    pub ratio: f64,
    pub max_speed: f64,
    pub max_location: f64,
}

pub fn v1_report(v: &VelocityMeasure, c_s: f64) -> V1Report {
    let max_speed = v.max_speed();
    let max_location = v.max_location_norm();
    let ratio = max_speed / (1.0 + max_location);
    V1Report { holds: max_speed <= c_s * (1.0 + max_location) + CHECK_TOL, ratio, max_speed, max_location }
}

/// Checks the velocity bound `sup |v| <= c_s (1 + sup |x|)` on `V[mu]`.
pub fn check_v1(mvf: &dyn MeasureVectorField, mu: &DiscreteMeasure, c_s: f64) -> Result<V1Report> {
    Ok(v1_report(&mvf.eval(mu)?, c_s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct V2Report {
    /// flat distance of the outputs on R^d x R^d
    pub lhs: f64,
    /// `C_F` times the reference distance of the inputs
    pub rhs: f64,
    pub reference: f64,
    pub metric: ReferenceMetric,
    /// `lhs / reference`, the empirical `C_F`; `None` when `mu = nu`
    pub ratio: Option<f64>,
}

impl V2Report {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + CHECK_TOL
    }
}

fn reference_distance(metric: ReferenceMetric, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    match metric {
        ReferenceMetric::Flat => flat_value(mu, nu),
        ReferenceMetric::Wasserstein1 => wasserstein1_1d(mu, nu),
    }
}

/// Lipschitz check of `mu -> V[mu]`. The inputs are compared in the field's
/// reference metric; the outputs always in the flat distance on R^{2d} with
/// the Euclidean norm on `(x, v)`.
pub fn check_v2(mvf: &dyn MeasureVectorField, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<V2Report> {
    let lhs = flat_value(&mvf.eval(mu)?.as_joint(), &mvf.eval(nu)?.as_joint())?;
    let metric = mvf.reference_metric();
    let reference = reference_distance(metric, mu, nu)?;
    let ratio = (reference > 0.0).then(|| lhs / reference);
    Ok(V2Report { lhs, rhs: mvf.constants().c_f * reference, reference, metric, ratio })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct V3Report {
    /// `sup_psi int psi(x + tau v) d(V[mu] - V[nu])`, computed as a flat distance
    pub lhs: f64,
    /// `(1 + C_H tau)` times the reference distance
    pub rhs: f64,
    /// `rhs - lhs`
    pub gap: f64,
    pub reference: f64,
    pub metric: ReferenceMetric,
}

impl V3Report {
    pub fn holds(&self) -> bool {
        self.gap >= -CHECK_TOL
    }
}

fn displaced(v: &VelocityMeasure, tau: f64) -> Result<DiscreteMeasure> {
    v.push_forward(v.dim(), |x, u| x.iter().zip(u).map(|(a, b)| a + tau * b).collect())
}

/// The one-step transport stability check. The supremum over test functions
/// of the displaced integral is the flat distance of the two push-forwards
/// under `(x, v) -> x + tau v`, so a single transport solve gives it exactly.
pub fn check_v3(
    mvf: &dyn MeasureVectorField,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    tau: f64,
) -> Result<V3Report> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(crate::Error::InvalidArgument(format!("tau must be finite and >= 0, got {tau}")));
    }
    let lhs = flat_value(&displaced(&mvf.eval(mu)?, tau)?, &displaced(&mvf.eval(nu)?, tau)?)?;
    let metric = mvf.reference_metric();
    let reference = reference_distance(metric, mu, nu)?;
    let rhs = (1.0 + mvf.constants().c_h * tau) * reference;
    Ok(V3Report { lhs, rhs, gap: rhs - lhs, reference, metric })
}

/// Largest `|c(x, mu)|` over the atoms of `mu`, against the declared bound.
pub fn check_growth_bound(c: &dyn GrowthFunction, mu: &DiscreteMeasure) -> (bool, f64) {
    let worst = mu.atoms().map(|(x, _)| c.rate(x, mu).abs()).fold(0.0, f64::max);
    (worst <= c.bound() + CHECK_TOL, worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceReport {
    pub nonnegative: bool,
    pub radius: f64,
    pub radius_ok: bool,
    /// `||s[mu] - s[nu]||` against `L ||mu - nu||`
    pub lhs: f64,
    pub rhs: f64,
}

impl SourceReport {
    pub fn holds(&self) -> bool {
        self.nonnegative && self.radius_ok && self.lhs <= self.rhs + CHECK_TOL
    }
}

pub fn check_source(s: &dyn SourceOperator, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<SourceReport> {
    let (a, b) = (s.eval(mu)?, s.eval(nu)?);
    let nonnegative = a.weights().iter().chain(b.weights()).all(|&w| w >= 0.0);
    let radius = a.support_radius().max(b.support_radius());
    Ok(SourceReport {
        nonnegative,
        radius,
        radius_ok: radius <= s.radius() + CHECK_TOL,
        lhs: flat_value(&a, &b)?,
        rhs: s.lipschitz() * flat_value(mu, nu)?,
    })
}

/// Parameters of a randomized certification sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub samples: usize,
    pub seed: u64,
    /// dimension for fields that accept any
    pub dim: usize,
    pub max_atoms: usize,
    pub half_width: f64,
    pub tau_max: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { samples: 100, seed: 0, dim: 1, max_atoms: 8, half_width: 2.0, tau_max: 1.0 }
    }
}

/// A failed check together with the inputs that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub check: &'static str,
    pub sample: usize,
    pub detail: String,
    pub mu: DiscreteMeasure,
    pub nu: Option<DiscreteMeasure>,
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepReport {
    pub samples: usize,
    pub worst_v1_ratio: f64,
    /// largest empirical `C_F`
    pub worst_v2_ratio: f64,
    /// smallest `rhs - lhs` seen in the transport stability check
    pub min_v3_gap: f64,
    pub violations: Vec<Violation>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// One row per violation: `check,sample,tau,detail`.
    pub fn violations_csv(&self) -> String {
        let mut out = String::from("check,sample,tau,detail\n");
        for v in &self.violations {
            let tau = v.tau.map(|t| t.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},\"{}\"\n", v.check, v.sample, tau, v.detail.replace('"', "'")));
        }
        out
    }
}

struct SampleOutcome {
    v1_ratio: f64,
    v2_ratio: f64,
    v3_gap: f64,
    violations: Vec<Violation>,
}

fn sample_pair(
    mvf: &dyn MeasureVectorField,
    cfg: &SweepConfig,
    rng: &mut SplitMix64,
) -> (DiscreteMeasure, DiscreteMeasure) {
    let max_atoms = cfg.max_atoms.max(1);
    let draw = |rng: &mut SplitMix64| {
        let atoms = rng.range_inclusive(1, max_atoms);
        if mvf.requires_probability() {
            random_probability_1d(rng, atoms, cfg.half_width)
        } else {
            let dim = mvf.fixed_dim().unwrap_or(cfg.dim);
            random_measure(rng, dim, atoms, cfg.half_width, (0.0, 2.0))
        }
    };
    let mu = draw(rng);
    let nu = draw(rng);
    (mu, nu)
}

fn run_sample(
    mvf: &dyn MeasureVectorField,
    source: Option<&dyn SourceOperator>,
    cfg: &SweepConfig,
    k: usize,
) -> Result<SampleOutcome> {
    let mut rng = SplitMix64::substream(cfg.seed, k as u64);
    let (mu, nu) = sample_pair(mvf, cfg, &mut rng);
    let tau = rng.uniform(0.0, cfg.tau_max);
    let constants = mvf.constants();
    let mut violations = Vec::new();
    let mut fail = |check, detail: String, nu: Option<&DiscreteMeasure>, tau| {
        violations.push(Violation { check, sample: k, detail, mu: mu.clone(), nu: nu.cloned(), tau })
    };

    let marginal = check_marginal(mvf, &mu)?;
    if !marginal.holds {
        fail(
            "marginal",
            format!(
                "mass deficit {:e} (input mass {}, output mass {}), max atom difference {:?}",
                marginal.mass_deficit, marginal.input_mass, marginal.output_mass, marginal.max_atom_difference
            ),
            None,
            None,
        );
    }

    let v1 = check_v1(mvf, &mu, constants.c_s)?;
    if !v1.holds {
        fail("v1", format!("speed ratio {} exceeds C_S = {}", v1.ratio, constants.c_s), None, None);
    }

    let v2 = check_v2(mvf, &mu, &nu)?;
    if !v2.holds() {
        fail("v2", format!("lhs {} > rhs {} (C_F = {})", v2.lhs, v2.rhs, constants.c_f), Some(&nu), None);
    }

    let v3 = check_v3(mvf, &mu, &nu, tau)?;
    if !v3.holds() {
        fail(
            "v3",
            format!("gap {} (lhs {}, rhs {}, C_H = {})", v3.gap, v3.lhs, v3.rhs, constants.c_h),
            Some(&nu),
            Some(tau),
        );
    }

    if let Some(s) = source {
        if s.eval(&mu)?.dim() == mu.dim() {
            let r = check_source(s, &mu, &nu)?;
            if !r.holds() {
                fail(
                    "source",
                    format!(
                        "nonnegative {}, radius {} (R = {}), lhs {} > rhs {}",
                        r.nonnegative,
                        r.radius,
                        s.radius(),
                        r.lhs,
                        r.rhs
                    ),
                    Some(&nu),
                    None,
                );
            }
        }
    }

    Ok(SampleOutcome { v1_ratio: v1.ratio, v2_ratio: v2.ratio.unwrap_or(0.0), v3_gap: v3.gap, violations })
}

/// Runs the field checks, and the source checks if a source is given, on
/// `cfg.samples` random inputs. Sample `k` draws from substream `k` of the
/// seed, so results do not depend on the execution mode.
///
/// Growth bounds are not sampled here: `C_b` is a bound over the working
/// domain, which random measures of arbitrary mass leave.
pub fn certify_sweep(
    mvf: &dyn MeasureVectorField,
    source: Option<&dyn SourceOperator>,
    cfg: &SweepConfig,
    exec: Execution,
) -> Result<SweepReport> {
    let outcomes = exec.map_range(cfg.samples, |k| run_sample(mvf, source, cfg, k));
    let mut report = SweepReport { samples: cfg.samples, min_v3_gap: f64::INFINITY, ..Default::default() };
    for o in outcomes {
        let o = o?;
        report.worst_v1_ratio = report.worst_v1_ratio.max(o.v1_ratio);
        report.worst_v2_ratio = report.worst_v2_ratio.max(o.v2_ratio);
        report.min_v3_gap = report.min_v3_gap.min(o.v3_gap);
        report.violations.extend(o.violations);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mvf::{barycenter_mvf, lipschitz_field_mvf, HalfMassField, LipschitzField};
    use approx::assert_abs_diff_eq;

    fn line(atoms: &[(f64, f64)]) -> DiscreteMeasure {
        DiscreteMeasure::on_line(atoms).unwrap()
    }

    #[test]
    fn marginal_examples() {
        assert!(check_marginal(&barycenter_mvf(), &line(&[(0.0, 1.0)])).unwrap().holds);
        let f = LipschitzField::affine(0.5, vec![1.0]);
        assert!(check_marginal(&f, &line(&[(0.0, 0.3), (1.5, 2.0)])).unwrap().holds);

        let broken = HalfMassField(barycenter_mvf());
        let r = check_marginal(&broken, &line(&[(0.0, 1.0)])).unwrap();
        assert!(!r.holds);
        assert_abs_diff_eq!(r.mass_deficit, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn v1_examples() {
        let mu = line(&[(-3.0, 0.2), (0.5, 0.8)]);
        let r = check_v1(&barycenter_mvf(), &mu, 1.0).unwrap();
        assert!(r.holds);
        assert_eq!(r.max_speed, 1.0);

        let id = LipschitzField::affine(1.0, vec![0.0]);
        assert!(check_v1(&id, &line(&[(4.0, 1.0)]), 1.0).unwrap().holds);

        let fast = lipschitz_field_mvf(|_| vec![10.0], 0.0, 1.0);
        let r = check_v1(&fast, &line(&[(0.0, 1.0)]), 1.0).unwrap();
        assert!(!r.holds);
        assert_eq!(r.ratio, 10.0);
    }

    #[test]
    fn v2_identity_field_gives_euclidean_shift() {
        let id = LipschitzField::affine(1.0, vec![0.0]);
        let eps = 1e-3;
        let r = check_v2(&id, &line(&[(0.0, 1.0)]), &line(&[(eps, 1.0)])).unwrap();
        // (0, 0) vs (eps, eps) under the Euclidean norm on R^2
        assert_abs_diff_eq!(r.lhs, 2f64.sqrt() * eps, epsilon = 1e-15);
        assert_abs_diff_eq!(r.rhs, 2.0 * eps, epsilon = 1e-15);
        assert!(r.holds());

        let same = check_v2(&id, &line(&[(1.0, 1.0)]), &line(&[(1.0, 1.0)])).unwrap();
        assert_eq!(same.lhs, 0.0);
        assert_eq!(same.ratio, None);
    }

    #[test]
    fn barycenter_lipschitz_bound_is_wasserstein_not_flat() {
        let mu = line(&[(0.0, 0.5), (10.0, 0.5)]);
        let nu = line(&[(10.0, 0.5), (20.0, 0.5)]);
        let r = check_v2(&barycenter_mvf(), &mu, &nu).unwrap();
        // the atom at 10 flips velocity: lhs 2 while the flat distance is 1
        assert_abs_diff_eq!(r.lhs, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(flat_value(&mu, &nu).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(r.metric, ReferenceMetric::Wasserstein1);
        assert_abs_diff_eq!(r.reference, 10.0, epsilon = 1e-12);
        assert!(r.holds());
    }

    #[test]
    fn v3_examples() {
        let f = LipschitzField::affine(-0.5, vec![0.25]);
        let mu = line(&[(0.0, 1.0), (1.0, 0.5)]);
        let same = check_v3(&f, &mu, &mu, 0.3).unwrap();
        assert_eq!(same.lhs, 0.0);
        assert!(same.gap >= 0.0);

        let nu = line(&[(0.2, 0.7), (1.4, 0.5)]);
        let at_zero = check_v3(&f, &mu, &nu, 0.0).unwrap();
        assert_abs_diff_eq!(at_zero.lhs, flat_value(&mu, &nu).unwrap(), epsilon = 1e-12);
        assert!(check_v3(&f, &mu, &nu, -1.0).is_err());
    }

    #[test]
    fn sweep_is_deterministic_across_execution_modes() {
        let f = LipschitzField::affine(0.7, vec![0.1]);
        let cfg = SweepConfig { samples: 24, seed: 42, ..Default::default() };
        let a = certify_sweep(&f, None, &cfg, Execution::Sequential).unwrap();
        let b = certify_sweep(&f, None, &cfg, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(a.passed(), "{:?}", a.violations);
    }

    #[test]
    fn sweep_flags_broken_marginal() {
        let broken = HalfMassField(barycenter_mvf());
        let cfg = SweepConfig { samples: 5, seed: 1, ..Default::default() };
        let r = certify_sweep(&broken, None, &cfg, Execution::Sequential).unwrap();
        assert!(r.violations.iter().any(|v| v.check == "marginal" && v.detail.contains("mass deficit")));
        assert!(r.violations_csv().starts_with("check,sample,tau,detail\n"));
    }
}
