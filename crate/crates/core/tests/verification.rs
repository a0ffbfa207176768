use std::sync::Arc;

use mdelab::mvf::{ConstantGrowth, LipschitzField, NoSource};
use mdelab::presets::preset_scenario;
use mdelab::scheme::{solve, Scenario};
use mdelab::verify::{check_gradient, continuity_experiment, semigroup_check, weak_residual, Bump, TestFunction};
use mdelab::{DiscreteMeasure, Error, Execution};

/// 1 on the ball of radius `r`, smooth transition to 0 at radius `2r`.
#[derive(Debug)]
struct Plateau {
    r: f64,
}

fn smooth_step(s: f64) -> f64 {
    // standard C^infinity transition from 0 (s <= 0) to 1 (s >= 1)
    let g = |u: f64| if u <= 0.0 { 0.0 } else { (-1.0 / u).exp() };
    g(s) / (g(s) + g(1.0 - s))
}

impl TestFunction for Plateau {
    fn name(&self) -> &str {
        "plateau"
    }

    fn value(&self, x: &[f64]) -> f64 {
        let n = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        1.0 - smooth_step(n / self.r - 1.0)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n <= self.r || n >= 2.0 * self.r {
            return vec![0.0; x.len()];
        }
        let h = 1e-7;
        let dn = (self.value_at(n + h) - self.value_at(n - h)) / (2.0 * h);
        x.iter().map(|c| dn * c / n).collect()
    }

    fn radius(&self) -> f64 {
        2.0 * self.r
    }
}

impl Plateau {
    fn value_at(&self, n: f64) -> f64 {
        1.0 - smooth_step(n / self.r - 1.0)
    }
}

#[test]
fn pure_growth_residual_matches_closed_form() {
    let s = preset_scenario("pure_growth").unwrap();
    let kappa = 0.5;
    let f = Bump::for_scenario(&s);
    let mut previous = None;
    for n in [4u32, 8, 16, 32] {
        let traj = solve(&s, n).unwrap();
        let r = weak_residual(&traj, &s, &f, 1.0).unwrap();
        let dt = 1.0 / f64::from(n);
        let riemann: f64 = (0..n).map(|l| (kappa * f64::from(l) * dt).exp() * dt).sum();
        let expected = (kappa.exp() - (1.0 + kappa * riemann)).abs();
        assert!((r.residual - expected).abs() <= 1e-12, "N={n}: {} vs {expected}", r.residual);
        if let Some(p) = previous {
            let ratio = r.residual / p;
            assert!((0.45..=0.55).contains(&ratio), "ratio {ratio}");
        }
        previous = Some(r.residual);
    }
}

#[test]
fn conservative_residual_vanishes_for_plateau() {
    for name in ["barycenter", "lipschitz"] {
        let s = preset_scenario(name).unwrap();
        let f = Plateau { r: s.support_bound() + 1.0 };
        let traj = solve(&s, 8).unwrap();
        let r = weak_residual(&traj, &s, &f, s.horizon).unwrap();
        assert!(r.residual <= 1e-10, "{name}: {r:?}");
    }
}

#[test]
fn residual_at_time_zero_is_zero() {
    for name in ["transport", "logistic", "decay"] {
        let s = preset_scenario(name).unwrap();
        let traj = solve(&s, 4).unwrap();
        let r = weak_residual(&traj, &s, &Bump::for_scenario(&s), 0.0).unwrap();
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.t, 0.0);
    }
}

#[test]
fn plateau_gradient_is_consistent() {
    let f = Plateau { r: 1.0 };
    assert!(check_gradient(&f, 2, 2.5, 200, 1e-6, 9) < 1e-5);
}

#[test]
fn continuity_guard_and_lipschitz_rate() {
    let s = preset_scenario("lipschitz").unwrap();
    assert!(matches!(
        continuity_experiment(&s, &s.mu0, &s.mu0, 8, &[], Execution::Sequential),
        Err(Error::InitialDataIdentical(_))
    ));

    // a constant-speed field moves both data rigidly: the ratio stays 1
    let rigid = Scenario::new(
        "rigid",
        Arc::new(LipschitzField::affine(0.0, vec![0.5])),
        Arc::new(ConstantGrowth { kappa: 0.0 }),
        Arc::new(NoSource { dim: 1 }),
        DiscreteMeasure::on_line(&[(0.0, 1.0)]).unwrap(),
        1.0,
    )
    .unwrap();
    let nu0 = DiscreteMeasure::on_line(&[(0.25, 1.0)]).unwrap();
    let r = continuity_experiment(&rigid, &rigid.mu0, &nu0, 8, &[0.5, 1.0], Execution::Sequential).unwrap();
    assert_eq!(r.rows.len(), 2);
    assert!(r.rows.iter().all(|row| (row.ratio - 1.0).abs() <= 1e-12));
    assert!(r.c_hat.abs() <= 1e-11);
    assert!(r.to_csv().starts_with("t,ratio,bound\n"));
}

#[test]
fn semigroup_examples() {
    let s = preset_scenario("transport").unwrap();
    assert_eq!(semigroup_check(&s, 4, 0.25, 0.25).unwrap(), 0.0);
    assert_eq!(semigroup_check(&s, 4, 0.0, 0.75).unwrap(), 0.0);
    assert!(matches!(semigroup_check(&s, 4, 0.3, 0.25), Err(Error::NonMeshTime { .. })));
}
