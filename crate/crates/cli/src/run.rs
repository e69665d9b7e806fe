//! Executes an [`ExperimentSpec`] and renders the result table.

use serde_json::{json, Map, Value};

use rrtcut_core::coupling::{build_coupled_pair, CouplingProfile};
use rrtcut_core::cutting::{record_count, targeted_cut, uniform_edge_cut, CutPolicy, CutResult};
use rrtcut_core::oracle::SmallNOracle;
use rrtcut_core::stats::{
    concentration_bound, estimate_tail_moments, estimate_tv_to_poisson, gamma_trend,
    root_degree_distribution_exact, Accumulator, GAMMA,
};
use rrtcut_core::{Lane, MonteCarlo, RecursiveTree};

use crate::config::{Command, ExperimentSpec, OutputFormat};
use crate::CliError;

pub const CUT_COLUMNS: [&str; 5] = ["policy", "n", "seed", "cuts", "z_at_root_degree"];
pub const COUPLING_COLUMNS: [&str; 9] = [
    "n", "epsilon", "seed", "d", "w", "sym_diff", "differing_degrees", "z_d", "z_d_cond",
];
pub const ESTIMATE_COLUMNS: [&str; 9] = [
    "op", "n", "d", "k", "estimate", "std_error", "theory", "replicates", "seed",
];
pub const GENERATE_COLUMNS: [&str; 6] = [
    "replicate", "n", "seed", "root_degree", "max_degree", "z_at_root_degree",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(v.to_string()),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Summary written as the JSON `aggregate` object.
    pub aggregate: Vec<(String, Cell)>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
            aggregate: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn summarize(&mut self, label: &str, acc: &Accumulator) {
        self.aggregate.push((format!("{label}_mean"), acc.mean().into()));
        self.aggregate.push((format!("{label}_std_error"), acc.std_error().into()));
    }
}

/// Runs the experiment; the table is fully determined by the spec, whatever
/// the worker count.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Table, CliError> {
    let mc = MonteCarlo::new(spec.seed, spec.replicates).with_workers(spec.workers);
    let n = spec.n.unwrap_or(0);
    let mut table = match spec.command {
        Command::Generate => generate(n, spec, &mc)?,
        Command::CutTargeted => cuts(n, spec, &mc, CutPolicy::Targeted)?,
        Command::CutUniform => cuts(n, spec, &mc, CutPolicy::UniformEdge)?,
        Command::Records => cuts(n, spec, &mc, CutPolicy::Records)?,
        Command::Coupling => coupling(n, spec, &mc)?,
        Command::Moments => moments(n, spec, &mc)?,
        Command::Tv => tv(n, spec, &mc)?,
        Command::RootDegree => root_degree(n, spec, &mc)?,
        Command::GammaTrend => trend(spec, &mc)?,
        Command::OracleSmalln => oracle(n, spec)?,
    };
    table.aggregate.insert(0, ("rows".into(), table.rows.len().into()));
    Ok(table)
}

fn generate(n: usize, spec: &ExperimentSpec, mc: &MonteCarlo) -> Result<Table, CliError> {
    let tails = mc.map(|_, rng| RecursiveTree::generate(n, &mut rng.fork(Lane::Tree)).map(|t| t.degree_tail()));
    let mut table = Table::new(&GENERATE_COLUMNS);
    let mut acc = Accumulator::default();
    for (r, tail) in tails.into_iter().enumerate() {
        let tail = tail?;
        acc.push(tail.at_root_degree() as f64);
        table.push(vec![
            r.into(),
            n.into(),
            spec.seed.into(),
            tail.root_degree.into(),
            tail.max_degree.into(),
            tail.at_root_degree().into(),
        ]);
    }
    table.summarize("z_at_root_degree", &acc);
    Ok(table)
}

/// One cutting run on a fresh tree, drawing from the replicate's lanes.
pub fn cut_replicate(n: usize, policy: CutPolicy, rng: &rrtcut_core::RngStream) -> rrtcut_core::Result<CutResult> {
    let tree = RecursiveTree::generate(n, &mut rng.fork(Lane::Tree))?;
    Ok(match policy {
        CutPolicy::Targeted => targeted_cut(&tree, &mut rng.fork(Lane::Ties)),
        CutPolicy::UniformEdge => uniform_edge_cut(&tree, &mut rng.fork(Lane::Cuts)),
        CutPolicy::Records => record_count(&tree, &mut rng.fork(Lane::Labels)),
    })
}

fn cuts(n: usize, spec: &ExperimentSpec, mc: &MonteCarlo, policy: CutPolicy) -> Result<Table, CliError> {
    let results = mc.map(|_, rng| cut_replicate(n, policy, rng));
    let mut table = Table::new(&CUT_COLUMNS);
    let mut acc = Accumulator::default();
    for r in results {
        let r = r?;
        acc.push(r.cuts as f64);
        table.push(vec![
            policy.as_str().into(),
            n.into(),
            spec.seed.into(),
            r.cuts.into(),
            r.z_at_root_degree.into(),
        ]);
    }
    table.summarize("cuts", &acc);
    Ok(table)
}

fn coupling(n: usize, spec: &ExperimentSpec, mc: &MonteCarlo) -> Result<Table, CliError> {
    let epsilon = spec.epsilon.expect("validated");
    let d_values = spec
        .d_values
        .clone()
        .unwrap_or_else(|| vec![(1.1 * (n as f64).ln()).ceil() as usize]);
    let rows = mc.map(|_, rng| {
        let sample = build_coupled_pair(n, epsilon, rng)?;
        let profile = CouplingProfile::new(&sample);
        Ok::<_, rrtcut_core::Error>(d_values.iter().map(|&d| profile.at(d)).collect::<Vec<_>>())
    });
    let mut table = Table::new(&COUPLING_COLUMNS);
    let mut acc = Accumulator::default();
    for diags in rows {
        for w in diags? {
            acc.push(w.w);
            table.push(vec![
                n.into(),
                epsilon.into(),
                spec.seed.into(),
                w.d.into(),
                w.w.into(),
                w.sym_diff_root_children.into(),
                w.differing_degree_count.into(),
                w.z_d.into(),
                w.z_d_cond.into(),
            ]);
        }
    }
    table.summarize("w", &acc);
    Ok(table)
}

fn estimate_row(
    op: &str,
    n: usize,
    d: Option<usize>,
    k: Option<u64>,
    estimate: f64,
    std_error: Option<f64>,
    theory: Option<f64>,
    spec: &ExperimentSpec,
) -> Vec<Cell> {
    vec![
        op.into(),
        n.into(),
        d.into(),
        k.into(),
        estimate.into(),
        std_error.into(),
        theory.into(),
        spec.replicates.into(),
        spec.seed.into(),
    ]
}

fn moments(n: usize, spec: &ExperimentSpec, mc: &MonteCarlo) -> Result<Table, CliError> {
    let d_values = spec
        .d_values
        .clone()
        .unwrap_or_else(|| (0..=(n as f64).log2().floor() as usize).collect());
    let k_values = spec.k_values.clone().unwrap_or_else(|| vec![1, 2]);
    let mut table = Table::new(&ESTIMATE_COLUMNS);
    for e in estimate_tail_moments(n, &d_values, &k_values, mc)? {
        table.push(estimate_row(
            "moment",
            n,
            Some(e.d),
            Some(e.k as u64),
            e.estimate,
            Some(e.std_error),
            e.theory,
            spec,
        ));
    }
    Ok(table)
}

fn tv(n: usize, spec: &ExperimentSpec, mc: &MonteCarlo) -> Result<Table, CliError> {
    let d_values = spec
        .d_values
        .clone()
        .unwrap_or_else(|| vec![(1.2 * (n as f64).ln()).ceil() as usize]);
    let mut table = Table::new(&ESTIMATE_COLUMNS);
    for (j, &d) in d_values.iter().enumerate() {
        // Separate stream blocks per threshold.
        let mc_d = MonteCarlo {
            seed: rrtcut_core::rng::mix64(mc.seed.wrapping_add(j as u64)),
            ..*mc
        };
        let est = estimate_tv_to_poisson(n, d, &mc_d)?;
        table.push(estimate_row("tv", n, Some(d), None, est.tv, None, Some(est.mu), spec));
    }
    Ok(table)
}

fn root_degree(n: usize, spec: &ExperimentSpec, mc: &MonteCarlo) -> Result<Table, CliError> {
    let exact = root_degree_distribution_exact(n)?;
    let ds = mc.map(|_, rng| RecursiveTree::generate(n, &mut rng.fork(Lane::Tree)).map(|t| t.root_degree()));
    let mut counts = vec![0u64; n];
    for d in ds {
        counts[d?] += 1;
    }
    let reps = spec.replicates as f64;
    let mut table = Table::new(&ESTIMATE_COLUMNS);
    for k in 0..n {
        let p = exact.prob(k);
        if p == 0.0 && counts[k] == 0 {
            continue;
        }
        let freq = counts[k] as f64 / reps;
        let se = (p * (1.0 - p) / reps).sqrt();
        table.push(estimate_row("root-degree", n, Some(k), None, freq, Some(se), Some(p), spec));
    }
    if let Some(eps) = spec.epsilon {
        let window = rrtcut_core::coupling::root_degree_window(n, eps)?;
        let outside = 1.0 - exact.prob_in(window);
        table.push(estimate_row(
            "outside-window",
            n,
            None,
            None,
            outside,
            None,
            Some(concentration_bound(n, eps)),
            spec,
        ));
    }
    table.aggregate.push(("exact_mean".into(), exact.mean().into()));
    table.aggregate.push(("dropped_mass".into(), exact.dropped_mass.into()));
    Ok(table)
}

fn trend(spec: &ExperimentSpec, mc: &MonteCarlo) -> Result<Table, CliError> {
    let k_max = spec
        .k_values
        .as_ref()
        .and_then(|k| k.iter().copied().max())
        .unwrap_or(2);
    let mut table = Table::new(&ESTIMATE_COLUMNS);
    for p in gamma_trend(&spec.sizes(), mc, k_max)? {
        table.push(estimate_row(
            "gamma-ratio",
            p.n,
            None,
            None,
            p.mean_ratio,
            Some(p.ratio_std_error),
            Some(GAMMA),
            spec,
        ));
        for k in 0..k_max as usize {
            table.push(estimate_row(
                "gamma-moment",
                p.n,
                None,
                Some(k as u64 + 1),
                p.kth_moment[k],
                Some(p.kth_std_error[k]),
                Some(p.kth_reference[k]),
                spec,
            ));
        }
        for (delta, prob) in &p.tail_probability {
            let op = format!("gamma-outside-{delta}");
            let se = (prob * (1.0 - prob) / p.replicates as f64).sqrt();
            table.push(estimate_row(&op, p.n, None, None, *prob, Some(se), None, spec));
        }
    }
    Ok(table)
}

fn oracle(n: usize, spec: &ExperimentSpec) -> Result<Table, CliError> {
    let o = SmallNOracle::compute(n)?;
    let mut table = Table::new(&ESTIMATE_COLUMNS);
    let mut spec = spec.clone();
    spec.replicates = o.tree_count as u64;
    table.push(estimate_row(
        "exact-targeted-mean",
        n,
        None,
        None,
        o.expected_targeted_cuts,
        None,
        None,
        &spec,
    ));
    for (k, &p) in o.root_degree_pmf.iter().enumerate() {
        if p > 0.0 {
            table.push(estimate_row("exact-root-degree-pmf", n, Some(k), None, p, None, None, &spec));
        }
    }
    for d in 0..n {
        table.push(estimate_row(
            "exact-tail-mean",
            n,
            Some(d),
            Some(1),
            o.tail_factorial_moment(d, 1),
            None,
            None,
            &spec,
        ));
    }
    table.aggregate.push(("trees".into(), o.tree_count.into()));
    table.aggregate.push(("expected_root_degree".into(), o.expected_root_degree().into()));
    Ok(table)
}

pub fn render(table: &Table, spec: &ExperimentSpec) -> Result<String, CliError> {
    match spec.output_format {
        OutputFormat::Csv => render_csv(table),
        OutputFormat::Json => Ok(render_json(table, spec)),
    }
}

pub fn render_csv(table: &Table) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::render))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn render_json(table: &Table, spec: &ExperimentSpec) -> String {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = table
                .columns
                .iter()
                .zip(row)
                .map(|(c, v)| (c.to_string(), v.to_json()))
                .collect();
            Value::Object(obj)
        })
        .collect();
    let aggregate: Map<String, Value> = table
        .aggregate
        .iter()
        .map(|(k, v)| (k.clone(), v.to_json()))
        .collect();
    let doc = json!({
        "spec": spec,
        "rows": rows,
        "aggregate": aggregate,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}
