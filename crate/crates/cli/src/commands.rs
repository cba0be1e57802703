use std::str::FromStr;

use fskq::experiments::{
    bond_closed_form, bond_integrand, integrand_ex1, integrand_ex2, log_grid, run_experiment, true_integral_ex2,
    ExperimentConfig, VasicekParams, EX1_REFERENCE, EX2_DIM,
};
use fskq::io::{points_csv, read_json_file, to_json, write_file, NodeSetFile, NodeSource, RuleFile, ValuesFile};
use fskq::node_selection::{count_nodes, gauss_hermite_basis, random_generators, sparse_grid_generators, NestedBasis};
use fskq::{make_rule, naive_weights, Error, GaussianKernel, GeneratorVector, MeasureKind, SymmetricMeasure};

use crate::{BasisArg, Done, ExperimentCmd, FormatArg, IntegrandArg, IntegrateCmd, NodeArgs, NodesCmd, RuleCmd};

type Result<T> = std::result::Result<T, Error>;

fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

fn generate(args: &NodeArgs) -> Result<NodeSetFile> {
    let dim = args.dim.ok_or_else(|| invalid("dim", "required"))?;
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let (source, generators) = if let Some(list) = &args.generators {
        if args.random || args.basis.is_some() {
            return Err(invalid("generators", "cannot be combined with --random or --basis"));
        }
        (NodeSource::Custom, parse_generators(list, dim)?)
    } else if args.random {
        if args.basis.is_some() {
            return Err(invalid("random", "cannot be combined with --basis"));
        }
        let count = args.count.ok_or_else(|| invalid("J", "required with --random"))?;
        let gens = random_generators(count, dim, args.kind, args.seed, args.truncate_below)?;
        let source = NodeSource::Random {
            kind: args.kind,
            count,
            seed: args.seed,
            truncate_below: args.truncate_below,
        };
        (source, gens)
    } else {
        let basis = args.basis.ok_or_else(|| invalid("basis", "one of --basis, --random or --generators is required"))?;
        let q = args.q.ok_or_else(|| invalid("q", "required with --basis"))?;
        if q == 0 {
            return Err(invalid("q", "must be at least 1"));
        }
        let (name, nested) = match basis {
            BasisArg::Cc => ("cc", NestedBasis::clenshaw_curtis(q + 1)?),
            BasisArg::Gh => ("gh", gauss_hermite_basis(q)?),
        };
        let source = NodeSource::SparseGrid {
            basis: name.into(),
            q,
        };
        (source, sparse_grid_generators(q, dim, &nested)?)
    };
    let count = count_nodes(&generators)?;
    if count > args.node_cap {
        return Err(Error::TooManyNodes {
            count,
            cap: args.node_cap,
        });
    }
    NodeSetFile::new(dim, source, &generators)
}

fn parse_generators(list: &str, dim: usize) -> Result<Vec<GeneratorVector>> {
    let mut out: Vec<GeneratorVector> = Vec::new();
    for (i, part) in list.split(';').map(str::trim).filter(|p| !p.is_empty()).enumerate() {
        let raw = part
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| invalid("generators", format!("'{v}': {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if raw.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: raw.len(),
            });
        }
        let g = GeneratorVector::new(&raw)?;
        if out.contains(&g) {
            return Err(Error::DuplicateGenerator { index: i });
        }
        out.push(g);
    }
    if out.is_empty() {
        return Err(Error::EmptyNodeSet);
    }
    out.sort_by(GeneratorVector::lex_cmp);
    Ok(out)
}

fn summary(file: &NodeSetFile) -> String {
    let sizes: Vec<String> = file.sizes.iter().map(u64::to_string).collect();
    format!("J={} n={} sizes={}", file.generators.len(), file.total_nodes, sizes.join(","))
}

pub fn nodes(cmd: NodesCmd) -> Result<Done> {
    let file = generate(&cmd.nodes)?;
    write_file(&cmd.out, &to_json(&file)?)?;
    if let Some(path) = &cmd.expand {
        write_file(path, &points_csv(&file.node_set()?))?;
    }
    println!("{} hash={}", summary(&file), file.hash);
    Ok(Done { warned: false })
}

pub fn rule(cmd: RuleCmd) -> Result<Done> {
    let node_file = match &cmd.nodes_file {
        Some(path) => read_json_file::<NodeSetFile>(path)?,
        None => generate(&cmd.nodes)?,
    };
    let mut nodes = node_file.node_set()?;
    if cmd.drop_center {
        nodes = nodes.without_center();
    }
    if nodes.is_empty() {
        return Err(Error::EmptyNodeSet);
    }
    let k = GaussianKernel::new(cmd.length_scale)?;
    let mu = SymmetricMeasure::new(cmd.measure, node_file.dim)?;
    let rule = make_rule(nodes, &k, &mu)?;
    let file = RuleFile::new(&rule, node_file.source.clone())?;
    write_file(&cmd.out, &to_json(&file)?)?;
    println!(
        "J={} n={} wce={:e} cond_estimate={:e} hash={}",
        file.generators.len(),
        file.total_nodes,
        file.wce,
        file.cond_estimate,
        file.hash
    );
    if cmd.oracle {
        let n = rule.node_set().total_nodes();
        if n > cmd.oracle_cap {
            return Err(Error::TooManyNodes {
                count: n as u64,
                cap: cmd.oracle_cap as u64,
            });
        }
        let points: Vec<Vec<f64>> = rule.node_set().points().map(<[f64]>::to_vec).collect();
        let naive = naive_weights(&points, &k, &mu)?;
        let fast = rule.expanded_weights();
        let scale = naive.weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
        let deviation = fast
            .iter()
            .zip(&naive.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max)
            / scale;
        println!(
            "oracle_max_rel_deviation={deviation:e} oracle_cond_estimate={:e}",
            naive.cond_estimate
        );
    }
    let mut warned = false;
    if let Some((index, pivot)) = rule.small_pivot() {
        eprintln!("warning: ill-conditioned weight system (pivot {index} is {pivot:e})");
        warned = true;
    }
    if rule.residual_warning() {
        eprintln!("warning: large residual in the weight solve");
        warned = true;
    }
    if rule.wce_unstable() {
        eprintln!("warning: negative squared worst-case error clamped to zero");
        warned = true;
    }
    Ok(Done { warned })
}

type Integrand = Box<dyn Fn(&[f64]) -> f64>;

/// Integrand, its exact value, and the measure it integrates against.
fn builtin(which: IntegrandArg, dim: usize) -> Result<(Integrand, f64, MeasureKind)> {
    Ok(match which {
        IntegrandArg::Ex1 => {
            if dim != 3 {
                return Err(Error::DimensionMismatch { expected: 3, got: dim });
            }
            (Box::new(integrand_ex1), EX1_REFERENCE, MeasureKind::StandardGaussian)
        }
        IntegrandArg::Ex2 => {
            if dim != EX2_DIM {
                return Err(Error::DimensionMismatch {
                    expected: EX2_DIM,
                    got: dim,
                });
            }
            (Box::new(integrand_ex2), true_integral_ex2(), MeasureKind::UniformCube)
        }
        IntegrandArg::Bond => {
            let params = VasicekParams::benchmark(dim + 1);
            let truth = bond_closed_form(&params)?;
            (Box::new(move |x: &[f64]| bond_integrand(&params, x)), truth, MeasureKind::StandardGaussian)
        }
    })
}

pub fn integrate(cmd: IntegrateCmd) -> Result<Done> {
    let rule: RuleFile = read_json_file(&cmd.rule)?;
    rule.verify()?;
    match (&cmd.values, cmd.integrand) {
        (Some(path), _) => {
            let values: ValuesFile = read_json_file(path)?;
            let estimate = rule.apply_values_file(&values)?;
            println!("estimate={estimate:e}");
        }
        (None, Some(which)) => {
            let (f, truth, kind) = builtin(which, rule.dim)?;
            if rule.measure.kind != kind {
                return Err(invalid(
                    "integrand",
                    format!("needs the {} measure, rule uses {}", kind.as_str(), rule.measure.kind.as_str()),
                ));
            }
            let values = ValuesFile::evaluate(&rule.node_set_file(), f)?;
            if let Some(path) = &cmd.save_values {
                write_file(path, &to_json(&values)?)?;
            }
            let estimate = rule.apply_values_file(&values)?;
            let rel_error = ((estimate - truth) / truth).abs();
            println!("estimate={estimate:e} truth={truth:e} rel_error={rel_error:e}");
        }
        (None, None) => return Err(invalid("values", "give --values or --integrand")),
    }
    Ok(Done {
        warned: rule.wce_unstable || rule.ill_conditioned,
    })
}

/// `a:b:step` (inclusive), `a:b`, or `a,b,c`.
fn parse_list<T>(name: &'static str, text: &str) -> Result<Vec<T>>
where
    T: FromStr + Copy + PartialOrd + std::ops::Add<Output = T> + From<u8>,
{
    let num = |s: &str| {
        s.trim()
            .parse::<T>()
            .map_err(|_| invalid(name, format!("cannot parse '{s}'")))
    };
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let (lo, hi, step) = match parts.as_slice() {
            [a, b] => (num(a)?, num(b)?, T::from(1)),
            [a, b, s] => (num(a)?, num(b)?, num(s)?),
            _ => return Err(invalid(name, "expected a:b or a:b:step")),
        };
        if step <= T::from(0) || hi < lo {
            return Err(invalid(name, "range needs a positive step and a <= b"));
        }
        let mut out = Vec::new();
        let mut v = lo;
        while v <= hi {
            out.push(v);
            v = v + step;
        }
        Ok(out)
    } else {
        text.split(',').filter(|s| !s.trim().is_empty()).map(num).collect()
    }
}

fn parse_mle_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        return Err(invalid("mle_grid", "expected lo:hi:count"));
    };
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| invalid("mle_grid", format!("cannot parse '{s}'")));
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    let count: usize = count.trim().parse().map_err(|_| invalid("mle_grid", "count must be an integer"))?;
    if !(lo > 0.0 && hi >= lo && count >= 1) {
        return Err(invalid("mle_grid", "needs 0 < lo <= hi and count >= 1"));
    }
    Ok(log_grid(lo, hi, count))
}

pub fn experiment(cmd: ExperimentCmd) -> Result<Done> {
    let mut config = ExperimentConfig::default_for(cmd.id);
    if let Some(q) = cmd.qmax {
        config.q_max = q;
    }
    if let Some(level) = cmd.level {
        config.level = level;
    }
    if let Some(text) = &cmd.dims {
        config.dims = parse_list::<usize>("dims", text)?;
    }
    if let Some(text) = &cmd.j_values {
        config.j_values = parse_list::<usize>("J", text)?;
    }
    if let Some(text) = &cmd.seeds {
        config.seeds = parse_list::<u64>("seeds", text)?;
    }
    if let Some(text) = &cmd.mle_grid {
        config.mle_grid = parse_mle_grid(text)?;
    }
    if let Some(cap) = cmd.node_cap {
        config.node_cap = cap;
    }
    config.length_scale = cmd.length_scale;
    config.fit_on_fss = cmd.fit_on_fss;
    config.drop_center = !cmd.keep_center;
    config.allow_large = cmd.allow_large;

    let report = run_experiment(cmd.id, &config)?;
    let text = match cmd.format {
        FormatArg::Csv => report.to_csv(),
        FormatArg::Json => {
            let mut s = report.to_json()?;
            s.push('\n');
            s
        }
    };
    match &cmd.out {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for row in report.rows.iter().chain(&report.baselines) {
        if let Some(w) = &row.warning {
            eprintln!("warning: {} n={}: {w}", row.method, row.n);
        }
    }
    for f in &report.failures {
        eprintln!("warning: {} failed: {}", f.label, f.error);
    }
    Ok(Done {
        warned: report.has_warnings(),
    })
}
