//! Global-section feasibility: the incidence system `M' x = v'` and its
//! solution over each semiring, plus factorizable hidden-variable models.

use std::fmt;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::empirical::{
    check_compatibility, Compatibility, CompatibilityWitness, Distribution, EmpiricalError, EmpiricalModel,
    SemiringTag, Weights,
};
use crate::exact;
use crate::rational::Rational;
use crate::scenario::{MeasurementScenario, ScenarioError, Section, DEFAULT_GLOBAL_SECTION_CAP};
use crate::simplex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HiddenVariableError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Empirical(#[from] EmpiricalError),
    #[error("weight vector has length {got}, incidence system has {expected} rows")]
    Dimension { expected: usize, got: usize },
    #[error("model is not compatible")]
    Incompatible(Box<CompatibilityWitness>),
    #[error("classification needs a prob-semiring model, got {0}")]
    NotProbability(SemiringTag),
    #[error("hidden-variable model is malformed: {0}")]
    Malformed(String),
    #[error("response of hidden value {lambda} to measurement {measurement} is not normalized")]
    ResponseNotNormalized { lambda: String, measurement: String },
}

/// The Boolean `p × q` incidence matrix between local sections (rows) and
/// global sections (columns), optionally augmented by a normalization row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceSystem {
    rows: Vec<(usize, Section)>,
    columns: Vec<Section>,
    matrix: Vec<Vec<bool>>,
    augmented: bool,
}

impl IncidenceSystem {
    pub fn rows(&self) -> &[(usize, Section)] {
        &self.rows
    }

    pub fn columns(&self) -> &[Section] {
        &self.columns
    }

    pub fn matrix(&self) -> &[Vec<bool>] {
        &self.matrix
    }

    pub fn augmented(&self) -> bool {
        self.augmented
    }

    /// `p`, the number of local sections.
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// `q`, the number of global sections.
    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    /// `M'` over the rationals (with the all-ones row when augmented).
    pub fn rational_matrix(&self) -> Vec<Vec<Rational>> {
        let mut m: Vec<Vec<Rational>> = self
            .matrix
            .iter()
            .map(|row| row.iter().map(|&b| if b { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        if self.augmented {
            m.push(vec![Rational::one(); self.columns.len()]);
        }
        m
    }

    fn augmented_rhs(&self, v: &[Rational]) -> Vec<Rational> {
        let mut rhs = v.to_vec();
        if self.augmented {
            rhs.push(Rational::one());
        }
        rhs
    }

    fn check_len(&self, got: usize) -> Result<(), HiddenVariableError> {
        if got != self.rows.len() {
            return Err(HiddenVariableError::Dimension { expected: self.rows.len(), got });
        }
        Ok(())
    }

    /// Columns whose every restriction lies in `support`.
    pub fn candidate_columns(&self, support: &[bool]) -> Result<Vec<usize>, HiddenVariableError> {
        self.check_len(support.len())?;
        Ok((0..self.columns.len()).filter(|&j| self.matrix.iter().zip(support).all(|(row, &s)| !row[j] || s)).collect())
    }
}

pub fn build_incidence(scenario: &MeasurementScenario) -> Result<IncidenceSystem, HiddenVariableError> {
    build_incidence_capped(scenario, DEFAULT_GLOBAL_SECTION_CAP)
}

pub fn build_incidence_capped(
    scenario: &MeasurementScenario,
    cap: u64,
) -> Result<IncidenceSystem, HiddenVariableError> {
    let columns = scenario.enumerate_global_sections_capped(cap)?;
    let k = scenario.outcome_count();
    let mut rows = Vec::new();
    let mut offsets = Vec::with_capacity(scenario.cover().len());
    for (ci, context) in scenario.cover().iter().enumerate() {
        offsets.push(rows.len());
        rows.extend(scenario.enumerate_sections(context)?.into_iter().map(|s| (ci, s)));
    }
    let mut matrix = vec![vec![false; columns.len()]; rows.len()];
    for (j, t) in columns.iter().enumerate() {
        for (ci, context) in scenario.cover().iter().enumerate() {
            let local = t.restrict(context)?;
            matrix[offsets[ci] + local.index(k)][j] = true;
        }
    }
    Ok(IncidenceSystem { rows, columns, matrix, augmented: true })
}

/// `v`: the model's weights stacked in incidence row order.
pub fn stack_weights(model: &EmpiricalModel) -> Result<Vec<Rational>, HiddenVariableError> {
    let mut v = Vec::new();
    for d in model.table() {
        match d.rational_weights() {
            Some(w) => v.extend_from_slice(w),
            None => return Err(HiddenVariableError::NotProbability(model.semiring())),
        }
    }
    Ok(v)
}

/// Support of the model stacked in incidence row order.
pub fn stack_support(model: &EmpiricalModel) -> Vec<bool> {
    model
        .table()
        .iter()
        .flat_map(|d| match d.support().weights() {
            Weights::Boolean(b) => b.clone(),
            Weights::Rational(_) => unreachable!("support is boolean"),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Rational(Vec<Rational>),
    Boolean(Vec<bool>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    /// Weights over the incidence columns when feasible.
    pub certificate: Option<Certificate>,
    pub semiring: SemiringTag,
    /// Possibilistic only: number of global sections consistent with the support.
    pub candidate_count: Option<usize>,
}

impl FeasibilityVerdict {
    pub fn rational_certificate(&self) -> Option<&[Rational]> {
        match &self.certificate {
            Some(Certificate::Rational(x)) => Some(x),
            _ => None,
        }
    }
}

/// Nonnegative solution of `M' x = v'` by exact phase-one simplex.
pub fn solve_probabilistic(
    system: &IncidenceSystem,
    v: &[Rational],
) -> Result<FeasibilityVerdict, HiddenVariableError> {
    system.check_len(v.len())?;
    let x = simplex::find_feasible(&system.rational_matrix(), &system.augmented_rhs(v));
    Ok(FeasibilityVerdict {
        feasible: x.is_some(),
        certificate: x.map(Certificate::Rational),
        semiring: SemiringTag::Probability,
        candidate_count: None,
    })
}

/// Any rational solution of `M' x = v'`, sign unrestricted.
pub fn solve_signed(system: &IncidenceSystem, v: &[Rational]) -> Result<FeasibilityVerdict, HiddenVariableError> {
    system.check_len(v.len())?;
    let x = exact::solve(&system.rational_matrix(), &system.augmented_rhs(v));
    Ok(FeasibilityVerdict {
        feasible: x.is_some(),
        certificate: x.map(Certificate::Rational),
        semiring: SemiringTag::Signed,
        candidate_count: None,
    })
}

/// Boolean solution of `M x = v`: feasible iff the global sections lying
/// wholly inside the support cover every supported local section.
pub fn solve_possibilistic(
    system: &IncidenceSystem,
    support: &[bool],
) -> Result<FeasibilityVerdict, HiddenVariableError> {
    let candidates = system.candidate_columns(support)?;
    let covered = system.matrix.iter().zip(support).all(|(row, &s)| !s || candidates.iter().any(|&j| row[j]));
    let feasible = covered && !candidates.is_empty();
    let certificate = feasible.then(|| {
        let mut x = vec![false; system.column_count()];
        for &j in &candidates {
            x[j] = true;
        }
        Certificate::Boolean(x)
    });
    Ok(FeasibilityVerdict {
        feasible,
        certificate,
        semiring: SemiringTag::Possibilistic,
        candidate_count: Some(candidates.len()),
    })
}

/// Position in the hierarchy noncontextual ⊂ … ⊂ strongly contextual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContextualityClass {
    Noncontextual,
    ProbabilisticallyContextual,
    LogicallyContextual,
    StronglyContextual,
}

impl fmt::Display for ContextualityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ContextualityClass::Noncontextual => "Noncontextual",
            ContextualityClass::ProbabilisticallyContextual => "ProbabilisticallyContextual",
            ContextualityClass::LogicallyContextual => "LogicallyContextual",
            ContextualityClass::StronglyContextual => "StronglyContextual",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub class: ContextualityClass,
    pub probabilistic: FeasibilityVerdict,
    pub possibilistic: FeasibilityVerdict,
}

pub fn classify(model: &EmpiricalModel) -> Result<ContextualityClass, HiddenVariableError> {
    classify_detailed(model, DEFAULT_GLOBAL_SECTION_CAP).map(|c| c.class)
}

/// Runs the probabilistic and possibilistic tests on a compatible
/// probability model.
pub fn classify_detailed(model: &EmpiricalModel, cap: u64) -> Result<Classification, HiddenVariableError> {
    if model.semiring() != SemiringTag::Probability {
        return Err(HiddenVariableError::NotProbability(model.semiring()));
    }
    if let Compatibility::Incompatible(w) = check_compatibility(model) {
        return Err(HiddenVariableError::Incompatible(Box::new(w)));
    }
    let system = build_incidence_capped(model.scenario(), cap)?;
    let probabilistic = solve_probabilistic(&system, &stack_weights(model)?)?;
    let possibilistic = solve_possibilistic(&system, &stack_support(model))?;
    let class = if probabilistic.feasible {
        ContextualityClass::Noncontextual
    } else if possibilistic.feasible {
        ContextualityClass::ProbabilisticallyContextual
    } else if possibilistic.candidate_count.unwrap_or(0) > 0 {
        ContextualityClass::LogicallyContextual
    } else {
        ContextualityClass::StronglyContextual
    };
    Ok(Classification { class, probabilistic, possibilistic })
}

/// Global distribution a certificate describes, ready for
/// [`crate::empirical::model_from_global_distribution`].
pub fn certificate_distribution(
    scenario: &MeasurementScenario,
    x: &[Rational],
) -> Result<Distribution, HiddenVariableError> {
    Ok(Distribution::probability(scenario.full_context(), scenario.outcome_count(), x.to_vec())?)
}

/// A factorizable hidden-variable model: a prior over `Λ` and, for each
/// hidden value, one outcome distribution per measurement. Joint responses
/// on a context are products of the single-measurement responses, so
/// context-dependent responses are not representable here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HiddenVariableModel {
    lambdas: Vec<String>,
    prior: Vec<Rational>,
    /// `responses[λ][m][o]`
    responses: Vec<Vec<Vec<Rational>>>,
}

impl HiddenVariableModel {
    pub fn new(
        lambdas: Vec<String>,
        prior: Vec<Rational>,
        responses: Vec<Vec<Vec<Rational>>>,
    ) -> Result<Self, HiddenVariableError> {
        if lambdas.len() != prior.len() || lambdas.len() != responses.len() {
            return Err(HiddenVariableError::Malformed("lambdas, prior and responses differ in length".into()));
        }
        if prior.iter().any(Signed::is_negative) || !crate::rational::sum(&prior).is_one() {
            return Err(HiddenVariableError::Malformed("prior is not a probability distribution".into()));
        }
        Ok(HiddenVariableModel { lambdas, prior, responses })
    }

    /// Deterministic model with `Λ` = global sections and prior `x`.
    pub fn from_global_weights(scenario: &MeasurementScenario, x: &[Rational]) -> Result<Self, HiddenVariableError> {
        let globals = scenario.enumerate_global_sections()?;
        if globals.len() != x.len() {
            return Err(HiddenVariableError::Dimension { expected: globals.len(), got: x.len() });
        }
        let k = scenario.outcome_count();
        let responses = globals
            .iter()
            .map(|t| {
                t.outcomes()
                    .iter()
                    .map(|&o| (0..k).map(|i| if i == o { Rational::one() } else { Rational::zero() }).collect())
                    .collect()
            })
            .collect();
        let lambdas = globals.iter().map(|t| scenario.section_label(t)).collect();
        HiddenVariableModel::new(lambdas, x.to_vec(), responses)
    }

    pub fn lambdas(&self) -> &[String] {
        &self.lambdas
    }

    pub fn prior(&self) -> &[Rational] {
        &self.prior
    }

    pub fn responses(&self) -> &[Vec<Vec<Rational>>] {
        &self.responses
    }
}

/// `e_C(s) = Σ_λ h_Λ(λ) Π_{m∈C} h^λ_m(s(m))`.
pub fn realize_hv(
    hv: &HiddenVariableModel,
    scenario: &MeasurementScenario,
) -> Result<EmpiricalModel, HiddenVariableError> {
    let n = scenario.measurement_count();
    let k = scenario.outcome_count();
    for (lambda, resp) in hv.lambdas.iter().zip(&hv.responses) {
        if resp.len() != n {
            return Err(HiddenVariableError::Malformed(format!("hidden value {lambda} has {} responses", resp.len())));
        }
        for (m, dist) in resp.iter().enumerate() {
            if dist.len() != k || dist.iter().any(Signed::is_negative) || !crate::rational::sum(dist).is_one() {
                return Err(HiddenVariableError::ResponseNotNormalized {
                    lambda: lambda.clone(),
                    measurement: scenario.measurements()[m].clone(),
                });
            }
        }
    }
    let mut table = Vec::with_capacity(scenario.cover().len());
    for context in scenario.cover() {
        let sections = scenario.enumerate_sections(context)?;
        let weights: Vec<Rational> = sections
            .iter()
            .map(|s| {
                hv.prior.iter().zip(&hv.responses).fold(Rational::zero(), |acc, (p, resp)| {
                    if p.is_zero() {
                        return acc;
                    }
                    let joint = s.pairs().fold(Rational::one(), |prod, (m, o)| prod * &resp[m][o]);
                    acc + p * joint
                })
            })
            .collect();
        table.push(Distribution::probability(context.clone(), k, weights)?);
    }
    Ok(EmpiricalModel::new(scenario.clone(), SemiringTag::Probability, table)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::empirical::model_from_global_distribution;
    use crate::rational::{int, ratio};

    fn chsh() -> MeasurementScenario {
        MeasurementScenario::new(
            vec!["A1", "A2", "B1", "B2"],
            vec!["0", "1"],
            vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]],
        )
        .unwrap()
    }

    fn model(rows: [[i64; 4]; 4], den: i64) -> EmpiricalModel {
        EmpiricalModel::from_rows(
            chsh(),
            SemiringTag::Probability,
            rows.iter().map(|r| r.iter().map(|&x| ratio(x, den)).collect()).collect(),
        )
        .unwrap()
    }

    fn table1() -> EmpiricalModel {
        model([[4, 0, 0, 4], [3, 1, 1, 3], [3, 1, 1, 3], [1, 3, 3, 1]], 8)
    }

    fn pr_box() -> EmpiricalModel {
        model([[1, 0, 0, 1], [1, 0, 0, 1], [1, 0, 0, 1], [0, 1, 1, 0]], 2)
    }

    #[test]
    fn chsh_incidence_shape() {
        let sys = build_incidence(&chsh()).unwrap();
        assert_eq!((sys.row_count(), sys.column_count()), (16, 16));
        for j in 0..16 {
            assert_eq!(sys.matrix().iter().filter(|r| r[j]).count(), 4);
        }
        assert!(sys.augmented());
        assert_eq!(sys.rational_matrix().len(), 17);
    }

    #[test]
    fn single_context_cover_is_a_permutation() {
        let s = MeasurementScenario::new(vec!["a", "b"], vec!["0", "1", "2"], vec![vec![0, 1]]).unwrap();
        let sys = build_incidence(&s).unwrap();
        for (i, row) in sys.matrix().iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                assert_eq!(b, i == j);
            }
        }
    }

    #[test]
    fn kcbs_incidence_shape() {
        let s = MeasurementScenario::new(
            (0..5).map(|i| format!("M{i}")).collect(),
            vec!["0", "1"],
            (0..5).map(|i| vec![i, (i + 1) % 5]).collect(),
        )
        .unwrap();
        let sys = build_incidence(&s).unwrap();
        assert_eq!((sys.row_count(), sys.column_count()), (20, 32));
    }

    #[test]
    fn table1_is_probabilistically_contextual() {
        let m = table1();
        let sys = build_incidence(m.scenario()).unwrap();
        let v = stack_weights(&m).unwrap();
        assert!(!solve_probabilistic(&sys, &v).unwrap().feasible);
        let signed = solve_signed(&sys, &v).unwrap();
        assert!(signed.feasible);
        let x = signed.rational_certificate().unwrap();
        let mut rhs = v.clone();
        rhs.push(int(1));
        assert_eq!(exact::mat_vec(&sys.rational_matrix(), x), rhs);
        assert!(solve_possibilistic(&sys, &stack_support(&m)).unwrap().feasible);
        assert_eq!(classify(&m).unwrap(), ContextualityClass::ProbabilisticallyContextual);
    }

    #[test]
    fn pr_box_is_strongly_contextual() {
        let m = pr_box();
        let sys = build_incidence(m.scenario()).unwrap();
        assert!(!solve_probabilistic(&sys, &stack_weights(&m).unwrap()).unwrap().feasible);
        let poss = solve_possibilistic(&sys, &stack_support(&m)).unwrap();
        assert!(!poss.feasible);
        assert_eq!(poss.candidate_count, Some(0));
        assert_eq!(classify(&m).unwrap(), ContextualityClass::StronglyContextual);
    }

    #[test]
    fn deterministic_models_are_noncontextual() {
        let s = chsh();
        let t = s.enumerate_global_sections().unwrap()[9].clone();
        let m = model_from_global_distribution(&s, &Distribution::dirac(&t, 2, SemiringTag::Probability)).unwrap();
        let sys = build_incidence(&s).unwrap();
        let verdict = solve_probabilistic(&sys, &stack_weights(&m).unwrap()).unwrap();
        let mut expected = vec![int(0); 16];
        expected[9] = int(1);
        assert_eq!(verdict.rational_certificate().unwrap(), expected.as_slice());
        assert!(solve_signed(&sys, &stack_weights(&m).unwrap()).unwrap().feasible);
        assert!(solve_possibilistic(&sys, &stack_support(&m)).unwrap().feasible);
        assert_eq!(classify(&m).unwrap(), ContextualityClass::Noncontextual);
    }

    #[test]
    fn unnormalized_mass_fails_the_augmented_row() {
        let sys = build_incidence(&chsh()).unwrap();
        let mut v = stack_weights(&table1()).unwrap();
        for w in v.iter_mut() {
            *w *= int(2);
        }
        assert!(!solve_signed(&sys, &v).unwrap().feasible);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let sys = build_incidence(&chsh()).unwrap();
        assert!(matches!(
            solve_probabilistic(&sys, &[int(1)]),
            Err(HiddenVariableError::Dimension { expected: 16, got: 1 })
        ));
        assert!(solve_signed(&sys, &[int(1)]).is_err());
        assert!(solve_possibilistic(&sys, &[true]).is_err());
    }

    #[test]
    fn classify_rejects_incompatible_models() {
        let bad = EmpiricalModel::from_rows(
            chsh(),
            SemiringTag::Probability,
            vec![
                vec![ratio(3, 5), int(0), int(0), ratio(2, 5)],
                vec![ratio(3, 8), ratio(1, 8), ratio(1, 8), ratio(3, 8)],
                vec![ratio(3, 8), ratio(1, 8), ratio(1, 8), ratio(3, 8)],
                vec![ratio(1, 8), ratio(3, 8), ratio(3, 8), ratio(1, 8)],
            ],
        )
        .unwrap();
        assert!(matches!(classify(&bad), Err(HiddenVariableError::Incompatible(_))));
    }

    #[test]
    fn hv_model_with_deterministic_responses_matches_global_marginals() {
        let s = chsh();
        let mut x = vec![int(0); 16];
        x[0] = ratio(1, 3);
        x[6] = ratio(2, 3);
        let hv = HiddenVariableModel::from_global_weights(&s, &x).unwrap();
        let direct = model_from_global_distribution(&s, &certificate_distribution(&s, &x).unwrap()).unwrap();
        assert_eq!(realize_hv(&hv, &s).unwrap(), direct);
    }

    #[test]
    fn uniform_responses_give_uniform_tables() {
        let s = chsh();
        let half = vec![ratio(1, 2), ratio(1, 2)];
        let hv = HiddenVariableModel::new(vec!["λ".into()], vec![int(1)], vec![vec![half; 4]]).unwrap();
        let m = realize_hv(&hv, &s).unwrap();
        for d in m.table() {
            assert_eq!(d.rational_weights().unwrap(), vec![ratio(1, 4); 4].as_slice());
        }
    }

    #[test]
    fn unnormalized_responses_are_rejected() {
        let s = chsh();
        let bad = vec![ratio(1, 2), ratio(1, 3)];
        let hv = HiddenVariableModel::new(vec!["λ".into()], vec![int(1)], vec![vec![bad; 4]]).unwrap();
        assert!(matches!(realize_hv(&hv, &s), Err(HiddenVariableError::ResponseNotNormalized { .. })));
        assert!(HiddenVariableModel::new(vec!["λ".into()], vec![ratio(1, 2)], vec![vec![]]).is_err());
    }
}
