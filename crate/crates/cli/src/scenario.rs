//! Scenario files: JSON documents naming a torus, a splitting, a Poisson bivector and
//! an ordered list of tasks. Indices in scenario files are 1-based, matching `d<i>`.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::RunError;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub dimension: usize,
    /// Display names of the coordinates; defaults to `t1 .. tn`.
    #[serde(default)]
    pub coordinates: Vec<String>,
    pub splitting: SplittingSpec,
    pub poisson: String,
    /// Seed for randomized tasks; the `--seed` flag overrides it.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tasks: Vec<Task>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplittingSpec {
    /// Leaf coordinate indices (1-based).
    pub leaf: Vec<usize>,
    /// Complement frame: transverse index `a` maps to the coefficients of `d_j` in
    /// `Y_a = d_a + sum_j A_aj d_j`, one expression per leaf index in order.
    #[serde(default)]
    pub frame: BTreeMap<String, Vec<String>>,
}

/// One summand `form (x) d<direction>` of a normal-bundle-valued leaf form.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoliatedTerm {
    pub form: String,
    pub direction: usize,
}

/// A foliation-side argument: either a good multivector (mapped through `phi`) or
/// an explicit list of summands.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum FoliatedInput {
    Multivector(String),
    Terms(Vec<FoliatedTerm>),
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictTag {
    Exact,
    NotExact,
    Inconclusive,
}

impl VerdictTag {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictTag::Exact => "exact",
            VerdictTag::NotExact => "not-exact",
            VerdictTag::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    #[default]
    Good,
    Foliation,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ComplexTag {
    Good,
    Full,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WedgePowerClaim {
    pub power: usize,
    /// Expected path; omitted means the power vanishes identically.
    #[serde(default)]
    pub equals: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankClaim {
    /// Rational parameter values, as expressions.
    pub at: Vec<String>,
    pub rank: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Task {
    #[serde(rename_all = "snake_case")]
    PoissonCheck {
        id: String,
        #[serde(default)]
        bivector: Option<String>,
        #[serde(default)]
        expect_poisson: Option<bool>,
        #[serde(default)]
        expect_rank: Option<usize>,
    },
    Schouten {
        id: String,
        left: String,
        right: String,
        #[serde(default)]
        expect: Option<String>,
    },
    L2 {
        id: String,
        left: String,
        right: String,
        #[serde(default)]
        expect: Option<String>,
    },
    L3 {
        id: String,
        args: [String; 3],
        #[serde(default)]
        expect: Option<String>,
    },
    #[serde(rename_all = "snake_case")]
    Mc {
        id: String,
        element: String,
        #[serde(default)]
        expect_mc: Option<bool>,
    },
    #[serde(rename_all = "snake_case")]
    Kuranishi {
        id: String,
        element: String,
        #[serde(default)]
        side: Side,
        #[serde(default)]
        expect_cochain: Option<FoliatedOrMultivector>,
        #[serde(default)]
        expect_verdict: Option<VerdictTag>,
    },
    #[serde(rename_all = "snake_case")]
    Phi {
        id: String,
        element: String,
        #[serde(default)]
        expect: Option<Vec<FoliatedTerm>>,
        #[serde(default)]
        expect_cocycle: Option<bool>,
        /// Rational values of `t` at which the graph of `t * phi(element)` must be involutive.
        #[serde(default)]
        graph_involutive_at: Option<Vec<String>>,
    },
    V2 {
        id: String,
        left: FoliatedInput,
        right: FoliatedInput,
        #[serde(default)]
        expect: Option<Vec<FoliatedTerm>>,
    },
    #[serde(rename_all = "snake_case")]
    Exactness {
        id: String,
        cocycle: String,
        #[serde(default)]
        complex: Option<ComplexTag>,
        #[serde(default, rename = "box")]
        box_bound: Option<i32>,
        #[serde(default)]
        expect_verdict: Option<VerdictTag>,
        #[serde(default)]
        expect_witness: Option<String>,
    },
    #[serde(rename_all = "snake_case")]
    PathVerify {
        id: String,
        path: String,
        #[serde(default)]
        poisson: Option<bool>,
        #[serde(default)]
        tangent: Option<String>,
        #[serde(default)]
        wedge_power: Vec<WedgePowerClaim>,
        #[serde(default)]
        rank: Option<RankClaim>,
    },
    DiracSuite {
        id: String,
        fibers: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
}

/// Expected Kuranishi cochain: a multivector on the good side, summands on the foliation side.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum FoliatedOrMultivector {
    Multivector(String),
    Terms(Vec<FoliatedTerm>),
}

impl Task {
    pub fn id(&self) -> &str {
        match self {
            Task::PoissonCheck { id, .. }
            | Task::Schouten { id, .. }
            | Task::L2 { id, .. }
            | Task::L3 { id, .. }
            | Task::Mc { id, .. }
            | Task::Kuranishi { id, .. }
            | Task::Phi { id, .. }
            | Task::V2 { id, .. }
            | Task::Exactness { id, .. }
            | Task::PathVerify { id, .. }
            | Task::DiracSuite { id, .. } => id,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Task::PoissonCheck { .. } => "poisson-check",
            Task::Schouten { .. } => "schouten",
            Task::L2 { .. } => "l2",
            Task::L3 { .. } => "l3",
            Task::Mc { .. } => "mc",
            Task::Kuranishi { .. } => "kuranishi",
            Task::Phi { .. } => "phi",
            Task::V2 { .. } => "v2",
            Task::Exactness { .. } => "exactness",
            Task::PathVerify { .. } => "path-verify",
            Task::DiracSuite { .. } => "dirac-suite",
        }
    }
}

impl Scenario {
    /// Parses and structurally validates a scenario document.
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        let sc: Scenario = serde_json::from_str(text).map_err(|e| RunError::Schema(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    fn validate(&self) -> Result<(), RunError> {
        let n = self.dimension;
        let bad = |m: String| Err(RunError::Schema(m));
        if n == 0 || n > 16 {
            return bad(format!("dimension must be between 1 and 16, got {n}"));
        }
        if !self.coordinates.is_empty() && self.coordinates.len() != n {
            return bad(format!("{} coordinate names for dimension {n}", self.coordinates.len()));
        }
        let leaf = &self.splitting.leaf;
        if leaf.iter().any(|&i| i == 0 || i > n) {
            return bad(format!("leaf index out of range 1..={n}"));
        }
        for (key, coeffs) in &self.splitting.frame {
            let a: usize = key.parse().map_err(|_| RunError::Schema(format!("frame key {key:?} is not an index")))?;
            if a == 0 || a > n || leaf.contains(&a) {
                return bad(format!("frame key {a} is not a transverse index"));
            }
            if coeffs.len() != leaf.len() {
                return bad(format!("frame entry {a} has {} coefficients, expected {}", coeffs.len(), leaf.len()));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for t in &self.tasks {
            if !seen.insert(t.id()) {
                return bad(format!("duplicate task id {:?}", t.id()));
            }
            let dirs: Vec<usize> = match t {
                Task::Phi { expect: Some(e), .. } | Task::V2 { expect: Some(e), .. } => e.iter().map(|x| x.direction).collect(),
                _ => vec![],
            };
            if dirs.iter().any(|&d| d == 0 || d > n) {
                return bad(format!("task {:?}: direction out of range", t.id()));
            }
            if let Task::DiracSuite { fibers, .. } = t {
                if *fibers == 0 {
                    return bad(format!("task {:?}: fibers must be positive", t.id()));
                }
            }
        }
        Ok(())
    }

    pub fn coordinate_names(&self) -> Vec<String> {
        if self.coordinates.is_empty() {
            (1..=self.dimension).map(|i| format!("t{i}")).collect()
        } else {
            self.coordinates.clone()
        }
    }
}
