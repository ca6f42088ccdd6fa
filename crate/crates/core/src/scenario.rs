//! Batch scenarios: a JSON description of nets and tasks, executed in order,
//! with one JSON report per task plus CSV profiles.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "grid": {"base": 0.5, "k": [4, 24]},
//!   "items": ["delta_radial_2d", {"name": "q", "expr": "x1^2 + x2^2"},
//!             {"name": "rot", "field": ["-x2", "x1"]}],
//!   "tasks": [{"classify": {"box": [[-1, 1], [-1, 1]]}}]
//! }
//! ```
//!
//! Exit status of a run: `0` if every verdict or certificate passed, `1` if
//! any failed, `2` on an execution error.

use crate::asymptotics::{classify, growth_profile, AsymptoticClass, GrowthProfile, Thresholds, Verdict};
use crate::embeddings::{affine_form, Gallery, GalleryItem};
use crate::error::{Error, Result};
use crate::expr::{compile, parse_expr, Expr, EXPR_MAX_ORDER};
use crate::flow::{affine_flow, flow, solve_ivp, verify_group_law, FlowNet, FlowOptions, GroupLawReport};
use crate::invariance::{
    all_planes, default_angle_assignments, default_angles, default_etas, default_points, flow_invariance_test,
    generalized_rotation_test, infinitesimal_test, standard_rotation_test, translation_tests, InvarianceVerdict,
};
use crate::net::{CompactBox, EpsilonGrid, GeneralizedNumber, GeneralizedPoint, NetFunction, NetVectorField};
use crate::reduction::{radial_profile, verify_reduction, ReductionResult};
use crate::report::{to_versioned_json, write_text, SCHEMA_VERSION};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Output directory used when a scenario names none.
pub const DEFAULT_OUTPUT_DIR: &str = "colombeau-out";

/// Samples of the reduced profile written per reduction task.
pub const PROFILE_SAMPLES: usize = 201;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub base: f64,
    /// `[k_min, k_max]`: the grid is `base^k` for `k_min ≤ k ≤ k_max`.
    pub k: [i32; 2],
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { base: 0.5, k: [4, 24] }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<EpsilonGrid> {
        EpsilonGrid::geometric(self.k[0], self.k[1], self.base)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ItemSpec {
    Gallery(String),
    Expression {
        name: String,
        expr: String,
        #[serde(default)]
        dim: Option<usize>,
    },
    Field {
        name: String,
        field: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyTask {
    /// Item to classify; all function items of the box dimension when absent.
    #[serde(default)]
    pub item: Option<String>,
    #[serde(rename = "box")]
    pub region: Vec<[f64; 2]>,
    /// Derivative multi-index; value level when absent.
    #[serde(default)]
    pub order: Option<Vec<usize>>,
    /// Expected verdict (`Negligible`, `Moderate(N)`, `LogType`, `Bounded`, `Divergent`).
    #[serde(default)]
    pub expect: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupLawSpec {
    pub t: f64,
    pub s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowTask {
    pub field: String,
    pub x0: Vec<f64>,
    /// `[t0, t1]`.
    pub t: [f64; 2],
    #[serde(default)]
    pub h0: Option<f64>,
    #[serde(default)]
    pub group_law: Option<GroupLawSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvarianceMethod {
    Infinitesimal,
    Flow,
    StandardRotations,
    GeneralizedRotations,
    Translation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvarianceTask {
    pub item: String,
    pub method: InvarianceMethod,
    #[serde(rename = "box")]
    pub region: Vec<[f64; 2]>,
    /// Vector field for `infinitesimal` and `flow`.
    #[serde(default)]
    pub field: Option<String>,
    /// 1-based axis for `translation`.
    #[serde(default)]
    pub axis: Option<usize>,
    /// Angles for `standard_rotations`.
    #[serde(default)]
    pub angles: Option<Vec<f64>>,
    /// 1-based planes for rotations; all planes when absent.
    #[serde(default)]
    pub planes: Option<Vec<[usize; 2]>>,
    /// Expressions in `eps` used as shifts (`flow`, `translation`) or as
    /// generalized angles in every plane (`generalized_rotations`).
    #[serde(default)]
    pub etas: Option<Vec<String>>,
    #[serde(default)]
    pub h0: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceTask {
    pub item: String,
    #[serde(rename = "box")]
    pub region: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskSpec {
    Classify(ClassifyTask),
    Flow(FlowTask),
    Invariance(InvarianceTask),
    Reduce(ReduceTask),
}

impl TaskSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            TaskSpec::Classify(_) => "classify",
            TaskSpec::Flow(_) => "flow",
            TaskSpec::Invariance(_) => "invariance",
            TaskSpec::Reduce(_) => "reduce",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default)]
    schema_version: Option<u32>,
    #[serde(default)]
    grid: GridSpec,
    #[serde(default)]
    items: Vec<ItemSpec>,
    #[serde(default)]
    tasks: Vec<TaskSpec>,
    #[serde(default)]
    output: Option<PathBuf>,
    #[serde(default)]
    thresholds: Thresholds,
}

#[derive(Clone, Debug)]
pub enum ItemValue {
    Function(NetFunction),
    Field(NetVectorField),
}

#[derive(Clone, Debug)]
pub struct ScenarioItem {
    pub name: String,
    pub spec: ItemSpec,
    pub value: ItemValue,
}

/// A validated scenario with every net built.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub grid_spec: GridSpec,
    pub grid: EpsilonGrid,
    pub items: Vec<ScenarioItem>,
    pub tasks: Vec<TaskSpec>,
    pub output: PathBuf,
    pub thresholds: Thresholds,
}

fn expression_dim(e: &Expr, declared: Option<usize>) -> Result<usize> {
    match declared {
        Some(d) if d < e.arity() => Err(Error::Config(format!(
            "expression uses x{} but declares dimension {d}",
            e.arity()
        ))),
        Some(d) => Ok(d),
        None => Ok(e.arity().max(1)),
    }
}

fn build_item(spec: &ItemSpec, grid: &EpsilonGrid, gallery: &mut Option<Gallery>) -> Result<ScenarioItem> {
    let (name, value) = match spec {
        ItemSpec::Gallery(name) => {
            let g = gallery.get_or_insert_with(|| Gallery::on(grid));
            let value = match g.get(name)? {
                GalleryItem::Function(u) => ItemValue::Function(u.clone()),
                GalleryItem::VectorField(v) => ItemValue::Field(v.clone()),
            };
            (name.clone(), value)
        }
        ItemSpec::Expression { name, expr, dim } => {
            let e = parse_expr(expr)?;
            let d = expression_dim(&e, *dim)?;
            (name.clone(), ItemValue::Function(compile(&e, grid, d)?))
        }
        ItemSpec::Field { name, field } => {
            let comps = field.iter().map(|s| parse_expr(s)).collect::<Result<Vec<_>>>()?;
            let n = comps.len();
            if let Some(c) = comps.iter().find(|c| c.arity() > n) {
                return Err(Error::Config(format!("field `{name}` component `{c}` uses more than {n} coordinates")));
            }
            let comps = Arc::new(comps);
            if n == 0 || n > crate::jet::MAX_VARS {
                return Err(Error::Capability(format!("field `{name}` must have 1..={} components", crate::jet::MAX_VARS)));
            }
            let v = NetVectorField::closed_form(grid, n, EXPR_MAX_ORDER, move |eps, x| {
                comps.iter().map(|c| c.eval_jet(eps, x)).collect()
            });
            (name.clone(), ItemValue::Field(v))
        }
    };
    Ok(ScenarioItem {
        name,
        spec: spec.clone(),
        value,
    })
}

/// Parse and validate a scenario; JSON errors carry line and column.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let raw: RawScenario = serde_json::from_str(text).map_err(|e| Error::Scenario {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if let Some(v) = raw.schema_version {
        if v != SCHEMA_VERSION {
            return Err(Error::Config(format!("unsupported schema_version {v} (expected {SCHEMA_VERSION})")));
        }
    }
    let grid = raw.grid.build()?;
    let mut gallery = None;
    let mut items: Vec<ScenarioItem> = Vec::with_capacity(raw.items.len());
    for spec in &raw.items {
        let item = build_item(spec, &grid, &mut gallery)?;
        if items.iter().any(|i| i.name == item.name) {
            return Err(Error::Config(format!("item `{}` defined twice", item.name)));
        }
        items.push(item);
    }
    let scenario = Scenario {
        grid_spec: raw.grid,
        grid,
        items,
        tasks: raw.tasks,
        output: raw.output.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        thresholds: raw.thresholds,
    };
    for task in &scenario.tasks {
        scenario.validate_task(task)?;
    }
    Ok(scenario)
}

/// Read and parse a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    parse_scenario(&std::fs::read_to_string(path)?)
}

fn parse_box(region: &[[f64; 2]]) -> Result<CompactBox> {
    CompactBox::new(region.iter().map(|&[a, b]| (a, b)).collect())
}

fn parse_number(grid: &EpsilonGrid, src: &str) -> Result<GeneralizedNumber> {
    let e = parse_expr(src)?;
    if e.arity() > 0 {
        return Err(Error::Config(format!("`{src}` may depend on eps only")));
    }
    Ok(GeneralizedNumber::new(grid, src, move |eps| e.eval(eps, &[])))
}

fn zero_based_planes(planes: &[[usize; 2]]) -> Result<Vec<(usize, usize)>> {
    planes
        .iter()
        .map(|&[i, j]| {
            if i == 0 || j == 0 {
                Err(Error::Config("planes are numbered from 1".into()))
            } else {
                Ok((i - 1, j - 1))
            }
        })
        .collect()
}

impl Scenario {
    pub fn with_output(mut self, dir: impl Into<PathBuf>) -> Scenario {
        self.output = dir.into();
        self
    }

    pub fn with_thresholds(mut self, t: Thresholds) -> Scenario {
        self.thresholds = t;
        self
    }

    fn item(&self, name: &str) -> Result<&ScenarioItem> {
        self.items
            .iter()
            .find(|i| i.name == name)
            .ok_or_else(|| Error::UnknownGalleryItem(name.to_string()))
    }

    fn function(&self, name: &str) -> Result<&NetFunction> {
        match &self.item(name)?.value {
            ItemValue::Function(u) => Ok(u),
            ItemValue::Field(_) => Err(Error::Config(format!("`{name}` is a vector field, not a function"))),
        }
    }

    fn field(&self, name: &str) -> Result<&NetVectorField> {
        match &self.item(name)?.value {
            ItemValue::Field(v) => Ok(v),
            ItemValue::Function(_) => Err(Error::Config(format!("`{name}` is a function, not a vector field"))),
        }
    }

    fn validate_task(&self, task: &TaskSpec) -> Result<()> {
        match task {
            TaskSpec::Classify(c) => {
                parse_box(&c.region)?;
                if let Some(name) = &c.item {
                    self.function(name)?;
                }
                if let Some(v) = &c.expect {
                    v.parse::<Verdict>()?;
                }
            }
            TaskSpec::Flow(f) => {
                self.field(&f.field)?;
            }
            TaskSpec::Invariance(t) => {
                self.function(&t.item)?;
                parse_box(&t.region)?;
                if let Some(f) = &t.field {
                    self.field(f)?;
                }
                for src in t.etas.iter().flatten() {
                    parse_number(&self.grid, src)?;
                }
            }
            TaskSpec::Reduce(r) => {
                self.function(&r.item)?;
                parse_box(&r.region)?;
            }
        }
        Ok(())
    }

    /// Function items whose dimension is `dim`, in definition order.
    fn functions_of_dim(&self, dim: usize) -> Vec<(&str, &NetFunction)> {
        self.items
            .iter()
            .filter_map(|i| match &i.value {
                ItemValue::Function(u) if u.dim() == dim => Some((i.name.as_str(), u)),
                _ => None,
            })
            .collect()
    }
}

/// Summary of one executed task.
#[derive(Clone, Debug, Serialize)]
pub struct TaskOutcome {
    pub index: usize,
    pub kind: &'static str,
    pub passed: bool,
    pub files: Vec<PathBuf>,
}

/// Summary of a completed run.
#[derive(Clone, Debug, Serialize)]
pub struct RunOutcome {
    pub output: PathBuf,
    pub tasks: Vec<TaskOutcome>,
}

impl RunOutcome {
    pub fn all_passed(&self) -> bool {
        self.tasks.iter().all(|t| t.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }
}

/// `0` all passed, `1` some verdict failed, `2` execution error.
pub fn exit_code(result: &Result<RunOutcome>) -> i32 {
    match result {
        Ok(r) => r.exit_code(),
        Err(_) => 2,
    }
}

struct Writer {
    dir: PathBuf,
    prefix: String,
    files: Vec<PathBuf>,
}

impl Writer {
    fn text(&mut self, suffix: &str, ext: &str, text: &str) -> Result<()> {
        let name = if suffix.is_empty() {
            format!("{}.{ext}", self.prefix)
        } else {
            format!("{}_{suffix}.{ext}", self.prefix)
        };
        let path = self.dir.join(name);
        write_text(&path, text)?;
        self.files.push(path);
        Ok(())
    }
}

#[derive(Serialize)]
struct TaskReport<'a, T: Serialize> {
    task: usize,
    kind: &'static str,
    spec: &'a TaskSpec,
    grid: GridSpec,
    thresholds: Thresholds,
    passed: bool,
    results: T,
}

#[derive(Serialize)]
struct ClassifyResult {
    item: String,
    order: Vec<usize>,
    class: AsymptoticClass,
    expected: Option<String>,
    passed: bool,
    profile: GrowthProfile,
}

#[derive(Serialize)]
struct FlowResult {
    field: String,
    analytic_group_law: Option<bool>,
    substeps: Vec<usize>,
    step_sizes: Vec<f64>,
    endpoints: Vec<(f64, Vec<f64>)>,
    group_law: Option<GroupLawReport>,
}

#[derive(Serialize)]
struct InvarianceResult {
    item: String,
    verdicts: Vec<InvarianceVerdict>,
    agree: Option<bool>,
    difference_slope: Option<f64>,
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect()
}

/// Execute every task in order and write reports into `scenario.output`.
pub fn run(scenario: &Scenario) -> Result<RunOutcome> {
    std::fs::create_dir_all(&scenario.output)?;
    let mut tasks = Vec::with_capacity(scenario.tasks.len());
    for (index, task) in scenario.tasks.iter().enumerate() {
        let mut w = Writer {
            dir: scenario.output.clone(),
            prefix: format!("task_{index:02}_{}", task.kind()),
            files: Vec::new(),
        };
        let passed = run_task(scenario, index, task, &mut w).map_err(|e| Error::Task {
            task: index,
            source: Box::new(e),
        })?;
        tasks.push(TaskOutcome {
            index,
            kind: task.kind(),
            passed,
            files: w.files,
        });
    }
    Ok(RunOutcome {
        output: scenario.output.clone(),
        tasks,
    })
}

fn report<T: Serialize>(s: &Scenario, index: usize, task: &TaskSpec, passed: bool, results: T, w: &mut Writer) -> Result<bool> {
    let body = TaskReport {
        task: index,
        kind: task.kind(),
        spec: task,
        grid: s.grid_spec,
        thresholds: s.thresholds,
        passed,
        results,
    };
    w.text("", "json", &to_versioned_json(&body)?)?;
    Ok(passed)
}

fn run_task(s: &Scenario, index: usize, task: &TaskSpec, w: &mut Writer) -> Result<bool> {
    let t = &s.thresholds;
    match task {
        TaskSpec::Classify(c) => {
            let k = parse_box(&c.region)?;
            let targets: Vec<(&str, &NetFunction)> = match &c.item {
                Some(name) => vec![(name.as_str(), s.function(name)?)],
                None => s.functions_of_dim(k.dim()),
            };
            let expected = c.expect.as_deref().map(str::parse::<Verdict>).transpose()?;
            let mut results = Vec::with_capacity(targets.len());
            for (name, u) in targets {
                let alpha = c.order.clone().unwrap_or_else(|| vec![0; u.dim()]);
                let profile = growth_profile(u, &k, &alpha)?;
                let class = classify(&profile, t)?;
                let passed = expected.is_none_or(|v| v == class.verdict);
                w.text(&sanitize(name), "csv", &profile.to_csv()?)?;
                results.push(ClassifyResult {
                    item: name.to_string(),
                    order: alpha,
                    expected: c.expect.clone(),
                    passed,
                    class,
                    profile,
                });
            }
            let passed = results.iter().all(|r| r.passed);
            report(s, index, task, passed, results, w)
        }
        TaskSpec::Flow(f) => {
            let xi = s.field(&f.field)?;
            let opts = FlowOptions::default().with_h0(f.h0.unwrap_or(crate::flow::DEFAULT_H0));
            let x0 = GeneralizedPoint::constant(&s.grid, &f.x0);
            let traj = solve_ivp(xi, &x0, f.t[0], f.t[1], &opts)?;
            w.text("trajectory", "csv", &traj.to_csv()?)?;
            let group_law = match &f.group_law {
                Some(g) => {
                    let fl = flow_net_for(s, &f.field, xi, g.t.abs() + g.s.abs(), &x0_box(&f.x0)?, &opts)?;
                    let r = verify_group_law(&fl, g.t, g.s, std::slice::from_ref(&f.x0))?;
                    w.text("group_law", "csv", &r.to_csv()?)?;
                    Some(r)
                }
                None => None,
            };
            let passed = group_law.as_ref().is_none_or(|r| r.passed);
            let result = FlowResult {
                field: f.field.clone(),
                analytic_group_law: group_law.as_ref().map(|_| affine_form(&f.field).is_some() && is_gallery(s, &f.field)),
                substeps: traj.substeps().to_vec(),
                step_sizes: traj.step_sizes().to_vec(),
                endpoints: s.grid.values().iter().enumerate().map(|(i, &e)| (e, traj.endpoint(i).to_vec())).collect(),
                group_law,
            };
            report(s, index, task, passed, result, w)
        }
        TaskSpec::Invariance(iv) => {
            let u = s.function(&iv.item)?;
            let k = parse_box(&iv.region)?;
            let etas = match &iv.etas {
                Some(list) => list.iter().map(|e| parse_number(&s.grid, e)).collect::<Result<Vec<_>>>()?,
                None => default_etas(&s.grid),
            };
            let planes = match &iv.planes {
                Some(p) => zero_based_planes(p)?,
                None => all_planes(u.dim()),
            };
            let need_field = || -> Result<(&str, &NetVectorField)> {
                let name = iv
                    .field
                    .as_deref()
                    .ok_or_else(|| Error::Config("this invariance method needs a `field`".into()))?;
                Ok((name, s.field(name)?))
            };
            let mut result = InvarianceResult {
                item: iv.item.clone(),
                verdicts: Vec::new(),
                agree: None,
                difference_slope: None,
            };
            match iv.method {
                InvarianceMethod::Infinitesimal => {
                    let (_, xi) = need_field()?;
                    result.verdicts.push(infinitesimal_test(xi, u, &k, t)?);
                }
                InvarianceMethod::Flow => {
                    let (name, xi) = need_field()?;
                    let reach = etas.iter().flat_map(|e| e.values().iter().map(|v| v.abs())).fold(0.0, f64::max);
                    let opts = FlowOptions::default().with_h0(iv.h0.unwrap_or(crate::flow::DEFAULT_H0));
                    let fl = flow_net_for(s, name, xi, reach, &k, &opts)?;
                    let points = default_points(&s.grid, &k)?;
                    result.verdicts.push(flow_invariance_test(&fl, u, &etas, &points, t)?);
                }
                InvarianceMethod::StandardRotations => {
                    let angles = iv.angles.clone().unwrap_or_else(default_angles);
                    result.verdicts.push(standard_rotation_test(u, &k, &angles, &planes, t)?);
                }
                InvarianceMethod::GeneralizedRotations => {
                    let assignments = match &iv.etas {
                        Some(_) => planes
                            .iter()
                            .flat_map(|&p| etas.iter().map(move |a| vec![(p, a.clone())]))
                            .collect(),
                        None => default_angle_assignments(&s.grid, u.dim()),
                    };
                    result.verdicts.push(generalized_rotation_test(u, &k, &assignments, t)?);
                }
                InvarianceMethod::Translation => {
                    let axis = iv.axis.unwrap_or(1);
                    if axis == 0 {
                        return Err(Error::Config("axes are numbered from 1".into()));
                    }
                    let tv = translation_tests(u, axis - 1, &k, &etas, t)?;
                    result.agree = Some(tv.agree());
                    result.difference_slope = tv.difference_slope;
                    result.verdicts = tv.all().into_iter().cloned().collect();
                }
            }
            for v in &result.verdicts {
                let method = serde_json::to_value(v.method)?;
                w.text(method.as_str().unwrap_or("verdict"), "csv", &v.to_csv()?)?;
            }
            let passed = result.verdicts.iter().all(|v| v.passed);
            report(s, index, task, passed, result, w)
        }
        TaskSpec::Reduce(r) => {
            let u = s.function(&r.item)?;
            let k = parse_box(&r.region)?;
            let res: ReductionResult = verify_reduction(u, &radial_profile(u)?, &k, t)?;
            w.text("residual", "csv", &res.residual_csv()?)?;
            w.text("profile", "csv", &res.profile_csv(s.grid.len() - 1, PROFILE_SAMPLES)?)?;
            let passed = res.certified;
            report(s, index, task, passed, res, w)
        }
    }
}

fn is_gallery(s: &Scenario, name: &str) -> bool {
    s.items
        .iter()
        .any(|i| i.name == name && matches!(i.spec, ItemSpec::Gallery(_)))
}

fn x0_box(x0: &[f64]) -> Result<CompactBox> {
    let r = x0.iter().fold(0.0f64, |m, v| m.max(v.abs())) + 1.0;
    CompactBox::cube(x0.len(), -r, r)
}

/// Analytic flow for gallery fields with an affine closed form, numeric otherwise.
fn flow_net_for(
    s: &Scenario,
    name: &str,
    xi: &NetVectorField,
    reach: f64,
    seed_box: &CompactBox,
    opts: &FlowOptions,
) -> Result<FlowNet> {
    match affine_form(name).filter(|_| is_gallery(s, name)) {
        Some((a, b)) => affine_flow(&s.grid, &a, &b),
        None => flow(xi, (-reach, reach), seed_box, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CLASSIFY: &str = r#"{"grid":{"base":0.5,"k":[4,24]},"items":["delta_radial_2d"],"tasks":[{"classify":{"box":[[-1,1],[-1,1]]}}]}"#;

    #[test]
    fn parses_the_minimal_example() {
        let s = parse_scenario(CLASSIFY).unwrap();
        assert_eq!(s.items.len(), 1);
        assert_eq!(s.tasks.len(), 1);
        assert_eq!(s.grid.len(), 21);
    }

    #[test]
    fn syntax_errors_have_line_and_column() {
        let err = parse_scenario("{\n  \"items\": [\n    \"a\",,\n  ]\n}").unwrap_err();
        assert!(matches!(err, Error::Scenario { line: 3, .. }), "{err}");
    }

    #[test]
    fn semantic_errors_are_typed() {
        assert!(matches!(parse_scenario(r#"{"items":["no_such_net"]}"#), Err(Error::UnknownGalleryItem(_))));
        assert!(matches!(
            parse_scenario(r#"{"items":[{"name":"g","expr":"gamma(x1)"}]}"#),
            Err(Error::UnknownSymbol(_))
        ));
        assert!(matches!(
            parse_scenario(r#"{"items":["norm_sq_2d"],"tasks":[{"reduce":{"item":"missing","box":[[0,1],[0,1]]}}]}"#),
            Err(Error::UnknownGalleryItem(_))
        ));
        assert!(matches!(parse_scenario(r#"{"tasks":[{"bogus":{}}]}"#), Err(Error::Scenario { .. })));
    }

    #[test]
    fn classify_run_writes_reports() {
        let dir = tempfile::tempdir().unwrap();
        let s = parse_scenario(CLASSIFY).unwrap().with_output(dir.path());
        let out = run(&s).unwrap();
        assert_eq!(out.exit_code(), 0);
        let json = std::fs::read_to_string(dir.path().join("task_00_classify.json")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["results"][0]["class"]["verdict"], "Moderate");
        assert_eq!(v["results"][0]["class"]["N"], 2);
        let csv = std::fs::read_to_string(dir.path().join("task_00_classify_delta_radial_2d.csv")).unwrap();
        assert!(csv.starts_with("epsilon,sup\n"));
    }

    #[test]
    fn failing_invariance_exits_one_and_empty_scenario_zero() {
        let dir = tempfile::tempdir().unwrap();
        let text = r#"{"items":["bump_asym_2d"],"tasks":[{"invariance":{"item":"bump_asym_2d","method":"standard_rotations","box":[[-1,1],[-1,1]],"angles":[1.5707963267948966]}}]}"#;
        let out = run(&parse_scenario(text).unwrap().with_output(dir.path())).unwrap();
        assert_eq!(out.exit_code(), 1);
        let empty = run(&parse_scenario("{}").unwrap().with_output(dir.path().join("empty"))).unwrap();
        assert_eq!(exit_code(&Ok(empty.clone())), 0);
        assert!(empty.tasks.is_empty());
    }

    #[test]
    fn blow_up_is_an_execution_error_with_task_and_eps() {
        let dir = tempfile::tempdir().unwrap();
        let text = r#"{"items":[{"name":"q","field":["x1^2"]}],"tasks":[{"flow":{"field":"q","x0":[1],"t":[0,2],"h0":0.01}}]}"#;
        let s = parse_scenario(text).unwrap().with_output(dir.path());
        let r = run(&s);
        assert_eq!(exit_code(&r), 2);
        match r.unwrap_err() {
            Error::Task { task: 0, source } => assert!(matches!(*source, Error::BlowUp { .. } | Error::NotComplete(_))),
            e => panic!("unexpected {e}"),
        }
    }
}
