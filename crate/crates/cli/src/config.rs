//! Scenario configuration schema.
//!
//! A config is a TOML document holding an optional top-level `seed` and a
//! list of `[[scenario]]` tables. Each scenario names its `kind`, an
//! `instance` table whose fields depend on the kind, optional `grids`,
//! `tolerances`, `seed` and an `expect` block. See `configs/` for one
//! annotated example per kind.

use serde::{Deserialize, Serialize};

use dense_equilibria::bifunction::{library as bf, Bifunction, ProblemKind};
use dense_equilibria::coercive::CoercivityMode;
use dense_equilibria::dense_sets::{DenseKind, DenseSubset};
use dense_equilibria::economy::{library as econ, ExcessDemand};
use dense_equilibria::games::{library as games, NPersonGame};
use dense_equilibria::geometry::{Ball, Point, Polytope, RecessionSet, Region, SimplexM};
use dense_equilibria::interval::ExtInterval;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default, rename = "scenario")]
    pub scenarios: Vec<Scenario>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Equilibrium,
    Coercive,
    Dgn,
    Nash,
    DenseCheck,
    Counterexample,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Equilibrium => "equilibrium",
            ScenarioKind::Coercive => "coercive",
            ScenarioKind::Dgn => "dgn",
            ScenarioKind::Nash => "nash",
            ScenarioKind::DenseCheck => "dense_check",
            ScenarioKind::Counterexample => "counterexample",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub kind: ScenarioKind,
    /// Catalog entry this scenario reproduces; supplies the anchor text.
    #[serde(default)]
    pub builtin: Option<String>,
    #[serde(default)]
    pub anchor: Option<String>,
    #[serde(default = "empty_table")]
    pub instance: toml::Value,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub tolerances: Tols,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub expect: Option<Expect>,
}

fn empty_table() -> toml::Value {
    toml::Value::Table(Default::default())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    /// Resolution of the domain grid.
    #[serde(default)]
    pub res: Option<f64>,
    /// Resolution of the grid of `D`, defaults to `res`.
    #[serde(default)]
    pub d_res: Option<f64>,
    /// Per-player resolutions for games.
    #[serde(default)]
    pub per_player: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tols {
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub cert_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    /// `Found`, `NoSolutionOnGrid`, `ExtensionFailed`, `pass` or `fail`.
    #[serde(default)]
    pub verdict: Option<String>,
    /// Expected solution point (flattened for games).
    #[serde(default)]
    pub point: Option<Vec<f64>>,
    /// Sup-norm tolerance for `point`; defaults to one grid step.
    #[serde(default)]
    pub point_tol: Option<f64>,
    /// `pass` or `fail` for the hypothesis bundle.
    #[serde(default)]
    pub hypotheses: Option<String>,
    #[serde(default)]
    pub residual: Option<f64>,
    #[serde(default)]
    pub residual_tol: Option<f64>,
}

/// Parses `text` into scenarios; errors carry the offending field path.
pub fn parse(text: &str) -> Result<ConfigFile, CliError> {
    let de = toml::Deserializer::parse(text).map_err(|e| CliError::Config {
        scenario: None,
        path: String::new(),
        message: e.to_string().trim().to_string(),
    })?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config {
            scenario: scenario_name(text, &path),
            path,
            message: e.inner().to_string().trim().to_string(),
        }
    })
}

/// Name of the scenario a `scenario[i]…` error path points into.
fn scenario_name(text: &str, path: &str) -> Option<String> {
    let rest = path.strip_prefix("scenario[")?;
    let i: usize = rest[..rest.find(']')?].parse().ok()?;
    let doc: toml::Table = text.parse().ok()?;
    let name = doc.get("scenario")?.as_array()?.get(i)?.get("name")?.as_str()?;
    Some(name.to_string())
}

/// Deserializes a scenario's `instance` table into the typed form.
pub fn instance<T: for<'de> Deserialize<'de>>(s: &Scenario) -> Result<T, CliError> {
    serde_path_to_error::deserialize(s.instance.clone()).map_err(|e| CliError::Config {
        scenario: Some(s.name.clone()),
        path: format!("instance.{}", e.path()),
        message: e.inner().to_string().trim().to_string(),
    })
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Ball {
        #[serde(default)]
        center: Option<Vec<f64>>,
        #[serde(default = "one")]
        radius: f64,
        #[serde(default)]
        dim: Option<usize>,
    },
    Simplex {
        n: usize,
    },
    Polytope {
        vertices: Vec<Vec<f64>>,
    },
}

fn one() -> f64 {
    1.0
}

pub(crate) fn point(c: &[f64]) -> dense_equilibria::Result<Point> {
    Point::new(c.to_vec())
}

impl DomainSpec {
    pub fn build(&self) -> dense_equilibria::Result<Region> {
        Ok(match self {
            DomainSpec::Box { lo, hi } => Polytope::boxed(lo, hi)?.into(),
            DomainSpec::Ball { center, radius, dim } => {
                let c = match (center, dim) {
                    (Some(c), _) => point(c)?,
                    (None, Some(n)) => Point::zeros(*n),
                    (None, None) => {
                        return Err(dense_equilibria::Error::InvalidParameter {
                            name: "ball",
                            reason: "give a center or a dim".into(),
                        })
                    }
                };
                Ball::new(c, *radius)?.into()
            }
            DomainSpec::Simplex { n } => SimplexM::new(*n)?.into(),
            DomainSpec::Polytope { vertices } => {
                Polytope::new(vertices.iter().map(|v| point(v)).collect::<dense_equilibria::Result<_>>()?)?.into()
            }
        })
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DenseSpec {
    #[default]
    Full,
    RationalGrid {
        max_denominator: u32,
    },
    Punctured {
        removed: Vec<Vec<f64>>,
    },
    SphereInBall,
}

impl DenseSpec {
    pub fn kind(&self) -> dense_equilibria::Result<DenseKind> {
        Ok(match self {
            DenseSpec::Full => DenseKind::Full,
            DenseSpec::RationalGrid { max_denominator } => DenseKind::RationalGrid {
                max_denominator: *max_denominator,
            },
            DenseSpec::Punctured { removed } => DenseKind::Punctured {
                removed: Polytope::new(removed.iter().map(|v| point(v)).collect::<dense_equilibria::Result<_>>()?)?,
            },
            DenseSpec::SphereInBall => DenseKind::SphereInBall,
        })
    }

    pub fn build(&self, parent: Region) -> dense_equilibria::Result<DenseSubset> {
        DenseSubset::new(parent, self.kind()?)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum BifunctionSpec {
    /// `[‖y‖² − ‖x‖², +∞)`
    SqNormGap,
    /// `‖y‖² − ‖x‖²`
    SqNormGapScalar,
    /// `[‖y‖² − ‖x‖², ‖y‖² − ‖x‖² + 1]`
    SqNormBand,
    /// `[⟨x, y⟩ − 1, +∞)`
    InnerUpper,
    /// `(−∞, ⟨x, y⟩ − 1]`
    InnerLower,
    /// `⟨x, y⟩ − 1`
    InnerScalar,
    Constant {
        lo: f64,
        hi: f64,
    },
}

impl BifunctionSpec {
    pub fn build(&self, domain: Region) -> dense_equilibria::Result<Bifunction> {
        let n = domain.dim();
        Ok(match self {
            BifunctionSpec::SqNormGap => bf::sq_norm_gap(domain),
            BifunctionSpec::SqNormGapScalar => bf::sq_norm_gap_scalar(domain),
            BifunctionSpec::SqNormBand => bf::sq_norm_band(domain),
            BifunctionSpec::InnerUpper => bf::inner_upper(n).with_domain(domain),
            BifunctionSpec::InnerLower => bf::inner_lower(n).with_domain(domain),
            BifunctionSpec::InnerScalar => bf::inner_scalar(n).with_domain(domain),
            BifunctionSpec::Constant { lo, hi } => bf::constant(domain, ExtInterval::new(*lo, *hi)?),
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriumInstance {
    pub problem: ProblemKind,
    pub bifunction: BifunctionSpec,
    pub domain: DomainSpec,
    #[serde(default)]
    pub dense: DenseSpec,
    /// Sampled combinations for the KKM covering check; omitted skips the
    /// certificate.
    #[serde(default)]
    pub kkm_samples: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConeSpec {
    Orthant {
        dim: usize,
    },
    WholeSpace {
        dim: usize,
    },
    Custom {
        base: Vec<Vec<f64>>,
        #[serde(default)]
        directions: Vec<Vec<f64>>,
    },
}

impl ConeSpec {
    pub fn build(&self) -> dense_equilibria::Result<RecessionSet> {
        match self {
            ConeSpec::Orthant { dim } => Ok(RecessionSet::orthant(*dim)),
            ConeSpec::WholeSpace { dim } => {
                let mut dirs = Vec::with_capacity(2 * dim);
                for i in 0..*dim {
                    for s in [1.0, -1.0] {
                        let mut c = vec![0.0; *dim];
                        c[i] = s;
                        dirs.push(Point::new(c)?);
                    }
                }
                RecessionSet::new(Polytope::new(vec![Point::zeros(*dim)])?, dirs)
            }
            ConeSpec::Custom { base, directions } => RecessionSet::new(
                Polytope::new(base.iter().map(|v| point(v)).collect::<dense_equilibria::Result<_>>()?)?,
                directions.iter().map(|v| point(v)).collect::<dense_equilibria::Result<_>>()?,
            ),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoerciveInstance {
    pub problem: ProblemKind,
    pub bifunction: BifunctionSpec,
    pub cone: ConeSpec,
    #[serde(default)]
    pub dense: DenseSpec,
    pub mode: CoercivityMode,
    pub r: f64,
    pub r1: f64,
    #[serde(default)]
    pub y0: Option<Vec<f64>>,
    #[serde(default)]
    pub probes: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum EconomySpec {
    /// `C(x) = {Ax}` with the planar rotation `A`.
    Rotation,
    SkewLinear {
        matrix: Vec<Vec<f64>>,
    },
    DenseWalras {
        matrix: Vec<Vec<f64>>,
        q: u32,
    },
    Constant {
        c: Vec<f64>,
    },
    Zero {
        n: usize,
    },
    Jump,
}

impl EconomySpec {
    pub fn build(&self) -> dense_equilibria::Result<ExcessDemand> {
        Ok(match self {
            EconomySpec::Rotation => econ::rotation(),
            EconomySpec::SkewLinear { matrix } => econ::skew_linear(matrix.clone())?,
            EconomySpec::DenseWalras { matrix, q } => econ::dense_walras(matrix.clone(), *q)?,
            EconomySpec::Constant { c } => econ::constant(point(c)?),
            EconomySpec::Zero { n } => econ::zero(*n),
            EconomySpec::Jump => econ::jump(),
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgnInstance {
    pub economy: EconomySpec,
    #[serde(default)]
    pub dense: DenseSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum GameSpec {
    MatchingPennies,
    PrisonersDilemma,
    Singleton,
    RockPaperScissors,
    Quadratic,
    ConcaveKink,
    /// Mixed extension of loss tables, row-major with player 0 slowest.
    Finite {
        actions: Vec<usize>,
        losses: Vec<Vec<f64>>,
    },
}

impl GameSpec {
    pub fn build(&self) -> dense_equilibria::Result<NPersonGame> {
        Ok(match self {
            GameSpec::MatchingPennies => games::matching_pennies(),
            GameSpec::PrisonersDilemma => games::prisoners_dilemma(),
            GameSpec::Singleton => games::singleton(),
            GameSpec::RockPaperScissors => games::rock_paper_scissors(),
            GameSpec::Quadratic => games::quadratic_duopoly(),
            GameSpec::ConcaveKink => games::concave_kink(),
            GameSpec::Finite { actions, losses } => NPersonGame::finite("finite", actions.clone(), losses.clone())?,
        })
    }
}

fn default_rounds() -> usize {
    200
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NashInstance {
    pub game: GameSpec,
    #[serde(default = "default_rounds")]
    pub max_rounds: usize,
    /// Starting profile, one block per player.
    #[serde(default)]
    pub start: Option<Vec<Vec<f64>>>,
    #[serde(default = "yes")]
    pub validate: bool,
    /// Cross-check against exhaustive `V` minimization over the product grid.
    #[serde(default)]
    pub oracle: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DenseCheck {
    Dense,
    SelfSegmentDense,
    HullClosure,
}

fn eps_default() -> f64 {
    0.05
}

fn pairs_default() -> usize {
    50
}

fn per_segment_default() -> usize {
    20
}

fn hull_res_default() -> f64 {
    0.1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DenseCheckInstance {
    pub parent: DomainSpec,
    pub dense: DenseSpec,
    pub checks: Vec<DenseCheck>,
    #[serde(default = "eps_default")]
    pub eps: f64,
    /// Sampled pairs for the segment check, and sampled configurations for
    /// the hull check.
    #[serde(default = "pairs_default")]
    pub pairs: usize,
    #[serde(default = "per_segment_default")]
    pub per_segment: usize,
    #[serde(default = "hull_res_default")]
    pub hull_res: f64,
    /// Explicit segment endpoints; replaces sampling in both the segment and
    /// the hull check.
    #[serde(default)]
    pub pair: Option<[Vec<f64>; 2]>,
}

fn three() -> usize {
    3
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleInstance {
    #[serde(default = "three")]
    pub n: usize,
}
