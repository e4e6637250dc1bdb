//! Null generating mechanisms: permutation of one variable, or simulation
//! of a continuous response from a fitted null model.

use serde::{Deserialize, Serialize};

use crate::dataset::{assemble_lineup, Dataset, Lineup, PlotType, Values};
use crate::error::{Error, Result};
use crate::rng;
use crate::stats;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MechanismKind {
    /// Shuffle `target`, keep every other column fixed.
    Permutation { target: String },
    /// Replace `response` with draws from the fitted null model. Without a
    /// covariate the model is intercept-only; with one, the response is
    /// regressed on that single retained covariate and drawn around the
    /// fitted values.
    SimulateNullRegression {
        response: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        covariate: Option<String>,
    },
    /// Replace `target` with i.i.d. Normal(mean, sample variance) draws.
    SimulateNormal { target: String },
}

/// `{"kind":"permutation","target":"group","seed":42}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullMechanism {
    #[serde(flatten)]
    pub kind: MechanismKind,
    #[serde(default)]
    pub seed: u64,
}

impl NullMechanism {
    pub fn new(kind: MechanismKind, seed: u64) -> Self {
        NullMechanism { kind, seed }
    }

    pub fn permutation(target: impl Into<String>) -> Self {
        Self::new(
            MechanismKind::Permutation {
                target: target.into(),
            },
            0,
        )
    }

    pub fn null_regression(response: impl Into<String>) -> Self {
        Self::new(
            MechanismKind::SimulateNullRegression {
                response: response.into(),
                covariate: None,
            },
            0,
        )
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn validate(&self, data: &Dataset) -> Result<()> {
        match &self.kind {
            MechanismKind::Permutation { target } => {
                data.index_of(target)?;
            }
            MechanismKind::SimulateNullRegression {
                response,
                covariate,
            } => {
                require_continuous(data, response)?;
                if let Some(c) = covariate {
                    require_continuous(data, c)?;
                    if c == response {
                        return Err(Error::Precondition(
                            "covariate must differ from the response".into(),
                        ));
                    }
                }
            }
            MechanismKind::SimulateNormal { target } => {
                require_continuous(data, target)?;
            }
        }
        Ok(())
    }
}

fn require_continuous<'a>(data: &'a Dataset, name: &str) -> Result<&'a [f64]> {
    data.variable(name)?.as_continuous().ok_or_else(|| {
        Error::Precondition(format!("variable `{name}` must be continuous"))
    })
}

/// Returns `data` with `target` uniformly permuted (Fisher–Yates).
pub fn permute_variable(data: &Dataset, target: &str, seed: u64) -> Result<Dataset> {
    let index = data.index_of(target)?;
    if data.n() < 2 {
        return Err(Error::Precondition(format!(
            "cannot permute `{target}` with n = {}",
            data.n()
        )));
    }
    let mut order: Vec<usize> = (0..data.n()).collect();
    rng::shuffle(&mut rng::rng_from_seed(seed), &mut order);

    let var = &data.variables()[index];
    let values = match var.values() {
        Values::Continuous(xs) => Values::Continuous(order.iter().map(|&i| xs[i]).collect()),
        Values::Categorical { levels, codes } => Values::Categorical {
            levels: levels.clone(),
            codes: order.iter().map(|&i| codes[i]).collect(),
        },
    };
    Ok(data.replace_variable(index, var.with_values(values)))
}

/// Intercept-only fit: (sample mean, unbiased variance).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NullFit {
    pub beta0_hat: f64,
    pub sigma2_hat: f64,
}

pub fn fit_null_regression(data: &Dataset, response: &str) -> Result<NullFit> {
    let y = require_continuous(data, response)?;
    if y.len() < 2 {
        return Err(Error::Precondition(
            "variance is undefined for fewer than 2 rows".into(),
        ));
    }
    Ok(NullFit {
        beta0_hat: stats::mean(y),
        sigma2_hat: stats::sample_variance(y),
    })
}

/// Per-row means and common variance of a fitted null model.
#[derive(Clone, Debug, PartialEq)]
pub struct NullModel {
    pub fitted: Vec<f64>,
    pub sigma2_hat: f64,
}

/// Fits the null-constrained model for `response`: intercept-only, or OLS
/// on one retained covariate (residual variance with n−2 divisor).
pub fn fit_null_model(data: &Dataset, response: &str, covariate: Option<&str>) -> Result<NullModel> {
    let Some(cov) = covariate else {
        let fit = fit_null_regression(data, response)?;
        return Ok(NullModel {
            fitted: vec![fit.beta0_hat; data.n()],
            sigma2_hat: fit.sigma2_hat,
        });
    };
    let y = require_continuous(data, response)?;
    let z = require_continuous(data, cov)?;
    if y.len() < 3 {
        return Err(Error::Precondition(
            "a one-covariate null model needs at least 3 rows".into(),
        ));
    }
    let line = stats::ols(z, y)?;
    let fitted: Vec<f64> = z.iter().map(|zi| line.intercept + line.slope * zi).collect();
    let rss: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(NullModel {
        fitted,
        sigma2_hat: rss / (y.len() - 2) as f64,
    })
}

fn simulate_column(data: &Dataset, target: &str, model: &NullModel, seed: u64) -> Result<Dataset> {
    let index = data.index_of(target)?;
    let mut rng = rng::rng_from_seed(seed);
    let draws = model
        .fitted
        .iter()
        .map(|&mu| rng::normal(&mut rng, mu, model.sigma2_hat))
        .collect();
    let var = &data.variables()[index];
    Ok(data.replace_variable(index, var.with_values(Values::Continuous(draws))))
}

/// One null dataset drawn from `data` under `mechanism`.
pub fn simulate_null_dataset(data: &Dataset, mechanism: &NullMechanism, seed: u64) -> Result<Dataset> {
    mechanism.validate(data)?;
    match &mechanism.kind {
        MechanismKind::Permutation { target } => permute_variable(data, target, seed),
        MechanismKind::SimulateNullRegression {
            response,
            covariate,
        } => {
            let model = fit_null_model(data, response, covariate.as_deref())?;
            simulate_column(data, response, &model, seed)
        }
        MechanismKind::SimulateNormal { target } => {
            let model = fit_null_model(data, target, None)?;
            simulate_column(data, target, &model, seed)
        }
    }
}

/// `count` independent nulls from `data`; null `k` uses child seed `k`.
pub fn generate_nulls(data: &Dataset, mechanism: &NullMechanism, count: usize, seed: u64) -> Result<Vec<Dataset>> {
    (0..count)
        .map(|k| {
            simulate_null_dataset(
                data,
                mechanism,
                rng::derive_seed(seed, rng::stream::NULL_PANEL, k as u64),
            )
        })
        .collect()
}

/// Generates `m − 1` nulls and hides `true_data` among them.
pub fn generate_lineup(
    true_data: &Dataset,
    mechanism: &NullMechanism,
    m: usize,
    seed: u64,
    plot_type: PlotType,
    question: impl Into<String>,
) -> Result<Lineup> {
    if m < 2 {
        return Err(Error::Precondition(format!("lineup size m = {m} must be at least 2")));
    }
    let nulls = generate_nulls(true_data, mechanism, m - 1, seed)?;
    assemble_lineup(true_data.clone(), nulls, seed, plot_type, question)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Variable;

    fn grouped() -> Dataset {
        Dataset::new(vec![
            Variable::categorical("group", &["A", "A", "B", "B"]),
            Variable::continuous("y", vec![1.0, 2.0, 3.0, 4.0]).unwrap(),
        ])
        .unwrap()
    }

    fn response(y: Vec<f64>) -> Dataset {
        let n = y.len();
        Dataset::new(vec![
            Variable::continuous("x", (0..n).map(|i| i as f64).collect()).unwrap(),
            Variable::continuous("y", y).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn permuting_group_keeps_multiset_and_other_column() {
        let d = grouped();
        let p = permute_variable(&d, "group", 17).unwrap();
        let mut codes = p.variable("group").unwrap().codes().unwrap().to_vec();
        codes.sort_unstable();
        assert_eq!(codes, vec![0, 0, 1, 1]);
        assert_eq!(p.variable("y").unwrap(), d.variable("y").unwrap());
        assert_eq!(p.variable("group").unwrap().levels(), d.variable("group").unwrap().levels());
    }

    #[test]
    fn permutation_needs_two_rows_and_known_target() {
        let one = Dataset::new(vec![Variable::continuous("x", vec![1.0]).unwrap()]).unwrap();
        assert!(matches!(permute_variable(&one, "x", 1), Err(Error::Precondition(_))));
        assert!(matches!(
            permute_variable(&grouped(), "nope", 1),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn permutation_is_seeded() {
        let d = response((0..30).map(|i| i as f64).collect());
        assert_eq!(permute_variable(&d, "y", 5).unwrap(), permute_variable(&d, "y", 5).unwrap());
    }

    #[test]
    fn seeds_give_distinct_permutations() {
        let d = response((0..8).map(|i| i as f64).collect());
        let outs: Vec<Vec<f64>> = (0..100)
            .map(|s| {
                permute_variable(&d, "y", s).unwrap().variable("y").unwrap().as_continuous().unwrap().to_vec()
            })
            .collect();
        let distinct: std::collections::HashSet<Vec<u64>> = outs
            .iter()
            .map(|v| v.iter().map(|x| x.to_bits()).collect())
            .collect();
        // 100 draws from 8! = 40320 permutations: collisions are possible but rare.
        assert!(distinct.len() >= 98, "only {} distinct", distinct.len());
    }

    #[test]
    fn null_fit_by_hand() {
        let fit = fit_null_regression(&response(vec![1.0, 2.0, 3.0]), "y").unwrap();
        assert_eq!(fit, NullFit { beta0_hat: 2.0, sigma2_hat: 1.0 });
        let fit = fit_null_regression(&response(vec![4.5; 3]), "y").unwrap();
        assert_eq!(fit, NullFit { beta0_hat: 4.5, sigma2_hat: 0.0 });
        assert!(fit_null_regression(&response(vec![1.0]), "y").is_err());
    }

    #[test]
    fn null_fit_on_normal_draws() {
        let mut r = rng::rng_from_seed(2024);
        let ys: Vec<f64> = (0..500).map(|_| rng::normal(&mut r, 5.0, 4.0)).collect();
        // independent route: two-pass sums written out here
        let n = ys.len() as f64;
        let m = ys.iter().fold(0.0, |a, b| a + b) / n;
        let v = ys.iter().fold(0.0, |a, b| a + (b - m).powi(2)) / (n - 1.0);
        let fit = fit_null_regression(&response(ys), "y").unwrap();
        assert!((fit.beta0_hat - m).abs() < 1e-12 && (fit.sigma2_hat - v).abs() < 1e-12);
        assert!((fit.beta0_hat - 5.0).abs() < 0.3);
        assert!((fit.sigma2_hat - 4.0).abs() < 0.8);
    }

    #[test]
    fn permutation_mechanism_leaves_other_column() {
        let d = response(vec![3.0, 1.0, 4.0, 1.0, 5.0]);
        let mech = NullMechanism::permutation("x");
        let out = simulate_null_dataset(&d, &mech, 9).unwrap();
        let a = out.variable("y").unwrap().as_continuous().unwrap();
        let b = d.variable("y").unwrap().as_continuous().unwrap();
        assert!(a.iter().zip(b).all(|(p, q)| p.to_bits() == q.to_bits()));
    }

    #[test]
    fn zero_variance_simulation_is_constant() {
        let d = response(vec![7.0; 4]);
        let out = simulate_null_dataset(&d, &NullMechanism::null_regression("y"), 1).unwrap();
        assert_eq!(out.variable("y").unwrap().as_continuous().unwrap(), &[7.0; 4]);
    }

    #[test]
    fn pooled_simulated_mean() {
        let d = response(vec![1.0, 2.0, 3.0]);
        let mech = NullMechanism::null_regression("y");
        let nulls = generate_nulls(&d, &mech, 10_000, 77).unwrap();
        let total: f64 = nulls
            .iter()
            .flat_map(|n| n.variable("y").unwrap().as_continuous().unwrap().to_vec())
            .sum();
        let pooled = total / 30_000.0;
        assert!((pooled - 2.0).abs() < 0.05, "pooled mean {pooled}");
    }

    #[test]
    fn covariate_model_draws_around_fitted_line() {
        let y: Vec<f64> = (0..6).map(|i| 1.0 + 2.0 * i as f64).collect();
        let d = response(y.clone());
        let model = fit_null_model(&d, "y", Some("x")).unwrap();
        assert!(model.sigma2_hat.abs() < 1e-20);
        let mech = NullMechanism::new(
            MechanismKind::SimulateNullRegression {
                response: "y".into(),
                covariate: Some("x".into()),
            },
            0,
        );
        let out = simulate_null_dataset(&d, &mech, 3).unwrap();
        for (a, b) in out.variable("y").unwrap().as_continuous().unwrap().iter().zip(&y) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn mechanism_json() {
        let m = NullMechanism::from_json_str(r#"{"kind":"permutation","target":"group","seed":42}"#).unwrap();
        assert_eq!(
            m,
            NullMechanism::new(MechanismKind::Permutation { target: "group".into() }, 42)
        );
        let m = NullMechanism::from_json_str(r#"{"kind":"simulate_null_regression","response":"y"}"#).unwrap();
        assert_eq!(m.seed, 0);
        assert!(NullMechanism::from_json_str(r#"{"kind":"bootstrap"}"#).is_err());
    }

    #[test]
    fn regression_mechanism_rejects_categorical_response() {
        let err = simulate_null_dataset(&grouped(), &NullMechanism::null_regression("group"), 1);
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn lineup_generation_is_reproducible() {
        let d = response((0..10).map(|i| (i * i) as f64).collect());
        let mech = NullMechanism::permutation("y");
        let a = generate_lineup(&d, &mech, 20, 8, PlotType::Scatter, "q").unwrap();
        let b = generate_lineup(&d, &mech, 20, 8, PlotType::Scatter, "q").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.true_panel(), &d);
    }
}
