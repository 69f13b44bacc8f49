//! `divcalc`: divided differences, jets and cubic extensions from the command line.
//!
//! Every command prints one JSON document on stdout. Failures print
//! `{"error": {"kind": ..., "detail": ...}}` on stderr and exit with
//! 1 (parse error), 2 (domain or singular parameters), 3 (bad flags) or
//! 4 (a verification suite found a counterexample).

use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use divcalc::algebra::{embed_simplicial_in_cubic, parse_subset, subset_label, CubicAlgebra, TruncatedPolyRing};
use divcalc::cubic::{t_extension, CubicArg};
use divcalc::jet::{sj_via_ring, t_via_ring, taylor_coeffs};
use divcalc::simplicial::{divided_difference, eval_points, sj_extension, Point, ScalarTuple, VecTuple};
use divcalc::verify::{run, Suite, VerifyConfig};
use divcalc::{Error, MapExpr, RingDescriptor, RingElement};

#[derive(Parser)]
#[command(name = "divcalc", version, about = "Divided-difference calculus over commutative rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluation points, f^<k>(v; s) and SJ^(s) f (v) for non-singular s.
    Divdiff {
        /// Map source, inline (`f(x) = x^2`) or a file path.
        #[arg(long)]
        map: String,
        #[arg(long)]
        order: usize,
        /// Tuple slots separated by `;`, coordinates by `,`.
        #[arg(long)]
        v: String,
        /// Scalars separated by `,`.
        #[arg(long)]
        s: String,
        #[arg(long, default_value = "rational")]
        ring: String,
    },
    /// SJ^(s) f (v) by scalar extension; any s, singular included.
    Jet {
        #[arg(long)]
        map: String,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        s: String,
        #[arg(long)]
        v: String,
        #[arg(long, default_value = "rational")]
        ring: String,
    },
    /// Radial Taylor coefficients of f at `--at` in direction `--dir`.
    Taylor {
        #[arg(long)]
        map: String,
        #[arg(long)]
        at: String,
        #[arg(long)]
        dir: String,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value = "rational")]
        ring: String,
    },
    /// Cubic extension T^(t) f (x).
    Cubic {
        #[arg(long)]
        map: String,
        /// Parameters such as `t1=2,t2=1,t12=1`; omitted ones are zero.
        #[arg(long, default_value = "")]
        t: String,
        /// 2^k points separated by `;`, in subset counting order (∅, 1, 2, 12, 3, ...).
        #[arg(long)]
        x: String,
        #[arg(long, default_value = "rational")]
        ring: String,
        /// `fd` (finite differences), `ring` (scalar extension) or `auto`.
        #[arg(long, default_value = "auto")]
        method: String,
    },
    /// Operation tables of Z/m, of B^s (with --s) or of A^t (with --t and --order).
    RingTable {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        s: Option<String>,
        #[arg(long)]
        t: Option<String>,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Embeds B^s into the cubic algebra A^{t(s)} and compares polynomials.
    Embed {
        #[arg(long)]
        s: String,
        #[arg(long, default_value = "rational")]
        ring: String,
    },
    /// Runs a randomized verification suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value = "rational")]
        ring: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        max_order: usize,
    },
}

enum Failure {
    Core(Error),
    Usage(String),
    /// A suite found a counterexample; the report is already on stdout.
    Counterexample,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CliResult<T> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Usage(msg.into()))
}

fn load_map(src: &str) -> CliResult<MapExpr> {
    let text = if Path::new(src).is_file() {
        std::fs::read_to_string(src).map_err(|e| Failure::Usage(format!("cannot read {src}: {e}")))?
    } else {
        src.to_string()
    };
    Ok(MapExpr::parse(text.trim()).map_err(Error::from)?)
}

fn parse_ring(text: &str) -> CliResult<RingDescriptor> {
    Ok(text.parse::<RingDescriptor>()?)
}

fn parse_scalars(ring: &RingDescriptor, text: &str) -> CliResult<Vec<RingElement>> {
    if text.trim().is_empty() {
        return usage("empty scalar list");
    }
    Ok(text.split(',').map(|x| ring.parse_element(x)).collect::<Result<_, _>>()?)
}

fn parse_points(ring: &RingDescriptor, text: &str) -> CliResult<Vec<Point>> {
    text.split(';').map(|slot| parse_scalars(ring, slot)).collect()
}

/// `t1=2,t2=1,t12=1`: every digit after `t` names one element of the subset.
fn parse_params(ring: &RingDescriptor, text: &str, k: usize) -> CliResult<Vec<RingElement>> {
    let mut params = vec![ring.zero(); 1 << k];
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let Some((key, value)) = item.split_once('=') else {
            return usage(format!("expected tJ=value, got `{item}`"));
        };
        let Some(digits) = key.trim().strip_prefix('t') else {
            return usage(format!("parameter `{key}` must start with t"));
        };
        let label = digits.chars().map(String::from).collect::<Vec<_>>().join(",");
        let mask = match parse_subset(&label) {
            Some(m) if m > 0 && m < 1 << k => m,
            _ => return usage(format!("parameter `{key}` is not a non-empty subset of 1..{k}")),
        };
        params[mask] = ring.parse_element(value)?;
    }
    Ok(params)
}

fn max_param_element(text: &str) -> usize {
    text.split(',')
        .filter_map(|item| item.trim().strip_prefix('t'))
        .flat_map(|rest| rest.chars().take_while(|c| c.is_ascii_digit()).filter_map(|c| c.to_digit(10)))
        .max()
        .unwrap_or(0) as usize
}

fn check_order(order: usize, v: &VecTuple, s: &ScalarTuple) -> CliResult<()> {
    if s.order() != order || v.len() != order + 1 {
        return usage(format!(
            "--order {order} needs {} tuple slots and {} scalars, got {} and {}",
            order + 1,
            order + 1,
            v.len(),
            s.entries().len()
        ));
    }
    Ok(())
}

fn point_json(p: &[RingElement]) -> Value {
    Value::Array(p.iter().map(RingElement::to_json).collect())
}

fn points_json(ps: &[Point]) -> Value {
    Value::Array(ps.iter().map(|p| point_json(p)).collect())
}

fn execute(command: Command) -> CliResult<Value> {
    match command {
        Command::Divdiff { map, order, v, s, ring } => {
            let ring = parse_ring(&ring)?;
            let f = load_map(&map)?;
            let v = VecTuple::new(parse_points(&ring, &v)?)?;
            let s = ScalarTuple::new(parse_scalars(&ring, &s)?)?;
            check_order(order, &v, &s)?;
            let points = eval_points(&v, &s)?;
            let dd = divided_difference(&f, &v, &s)?;
            let sj = sj_extension(&f, &v, &s)?;
            Ok(json!({"points": points_json(&points), "divdiff": point_json(&dd), "sj": sj.to_json()}))
        }
        Command::Jet { map, order, s, v, ring } => {
            let ring = parse_ring(&ring)?;
            let f = load_map(&map)?;
            let v = VecTuple::new(parse_points(&ring, &v)?)?;
            let s = ScalarTuple::new(parse_scalars(&ring, &s)?)?;
            check_order(order, &v, &s)?;
            if order == 0 {
                return usage("--order must be at least 1");
            }
            Ok(json!({"jet": sj_via_ring(&f, &v, &s)?.to_json()}))
        }
        Command::Taylor { map, at, dir, order, ring } => {
            let ring = parse_ring(&ring)?;
            let f = load_map(&map)?;
            let x = parse_scalars(&ring, &at)?;
            let h = parse_scalars(&ring, &dir)?;
            if x.len() != f.arity_in() || h.len() != f.arity_in() {
                return usage(format!("--at and --dir need {} coordinates", f.arity_in()));
            }
            Ok(json!({"coeffs": points_json(&taylor_coeffs(&f, &x, &h, order)?)}))
        }
        Command::Cubic { map, t, x, ring, method } => {
            let ring = parse_ring(&ring)?;
            let f = load_map(&map)?;
            let xs = parse_points(&ring, &x)?;
            if xs.len() < 2 || !xs.len().is_power_of_two() {
                return usage(format!("--x needs 2^k points, got {}", xs.len()));
            }
            let k = xs.len().trailing_zeros() as usize;
            let arg = CubicArg::new(xs, parse_params(&ring, &t, k)?)?;
            let (used, out) = match method.as_str() {
                "fd" => ("fd", t_extension(&f, &arg)?),
                "ring" => ("ring", t_via_ring(&f, &arg)?),
                "auto" => match t_extension(&f, &arg) {
                    Err(Error::NonsingularRequired(_)) => ("ring", t_via_ring(&f, &arg)?),
                    other => ("fd", other?),
                },
                other => return usage(format!("unknown method `{other}`")),
            };
            let mut components = Map::new();
            for (mask, p) in out.iter().enumerate() {
                components.insert(subset_label(mask), point_json(p));
            }
            Ok(json!({"method": used, "components": components}))
        }
        Command::RingTable { ring, s, t, order } => ring_table(&ring, s, t, order),
        Command::Embed { s, ring } => {
            let ring = parse_ring(&ring)?;
            let report = embed_simplicial_in_cubic(&parse_scalars(&ring, &s)?)?;
            Ok(json!({
                "t": report.algebra.params_json(),
                "minpoly": point_json(&report.minimal_polynomial),
                "match": report.matches,
            }))
        }
        Command::Verify { suite, ring, trials, seed, max_order } => {
            let suite: Suite = suite.parse()?;
            let ring = parse_ring(&ring)?;
            let report = run(&VerifyConfig { suite, ring, trials, seed, max_order })?;
            if !report.all_passed() {
                println!("{}", report.to_json());
                return Err(Failure::Counterexample);
            }
            Ok(report.to_json())
        }
    }
}

const MAX_TABLE_MODULUS: u64 = 64;

fn ring_table(ring: &str, s: Option<String>, t: Option<String>, order: Option<usize>) -> CliResult<Value> {
    let ring = parse_ring(ring)?;
    match (s, t) {
        (Some(_), Some(_)) => usage("pass either --s or --t, not both"),
        (Some(s), None) => {
            let b = TruncatedPolyRing::from_scalars(&parse_scalars(&ring, &s)?)?;
            let n = b.dimension();
            let unit = |j: usize| -> Vec<RingElement> {
                (0..n).map(|i| if i == j { ring.one() } else { ring.zero() }).collect()
            };
            let mut rows = Vec::with_capacity(n);
            for i in 0..n {
                let mut row = Vec::with_capacity(n);
                for j in 0..n {
                    let c = b.from_c_coords(&unit(i))?.mul(&b.from_c_coords(&unit(j))?)?;
                    row.push(point_json(&c.to_c_coords()?));
                }
                rows.push(Value::Array(row));
            }
            Ok(json!({
                "ring": b.to_json(),
                "basis": "c",
                "defining_polynomial": point_json(b.defining_polynomial()),
                "mul": rows,
            }))
        }
        (None, Some(t)) => {
            let k = order.unwrap_or_else(|| max_param_element(&t));
            if k == 0 {
                return usage("--order (or a parameter naming element k) is required with --t");
            }
            let a = CubicAlgebra::new(ring.clone(), k, parse_params(&ring, &t, k)?)?;
            let mut entries = Vec::new();
            for j in 0..a.dimension() {
                for l in j..a.dimension() {
                    let p = a.basis(j).mul(&a.basis(l))?;
                    let mut product = Map::new();
                    for (m, c) in p.coeffs().iter().enumerate() {
                        if !c.is_zero() {
                            product.insert(subset_label(m), c.to_json());
                        }
                    }
                    entries.push(json!({"left": subset_label(j), "right": subset_label(l), "product": product}));
                }
            }
            Ok(json!({"ring": a.to_json(), "mul": entries}))
        }
        (None, None) => {
            let RingDescriptor::ZMod(m) = ring else {
                return usage("tables of base rings are available for zmod:<m> only");
            };
            if m > MAX_TABLE_MODULUS {
                return usage(format!("modulus {m} exceeds table limit {MAX_TABLE_MODULUS}"));
            }
            let elems: Vec<RingElement> = (0..m as i64).map(|i| ring.embed_int(i)).collect();
            let table = |op: &dyn Fn(&RingElement, &RingElement) -> RingElement| -> Value {
                Value::Array(
                    elems.iter().map(|a| Value::Array(elems.iter().map(|b| op(a, b).to_json()).collect())).collect(),
                )
            };
            let add = table(&|a, b| a.add(b).expect("same ring"));
            let mul = table(&|a, b| a.mul(b).expect("same ring"));
            let mut units = Map::new();
            for e in &elems {
                if let Some(inv) = e.try_invert() {
                    units.insert(e.to_string(), inv.to_json());
                }
            }
            Ok(json!({"ring": ring.to_string(), "elements": point_json(&elems), "add": add, "mul": mul, "inverse": units}))
        }
    }
}

fn report_error(kind: &str, detail: String, extra: Option<Value>) {
    let mut err = json!({"kind": kind, "detail": detail});
    if let Some(Value::Object(extra)) = extra {
        for (k, v) in extra {
            err[k] = v;
        }
    }
    eprintln!("{}", json!({ "error": err }));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let detail = text
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:"))
                .filter(|l| !l.is_empty())
                .collect::<Vec<_>>()
                .join(" ");
            report_error("UsageError", detail.trim_start_matches("error: ").to_string(), None);
            return ExitCode::from(3);
        }
    };
    match execute(cli.command) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Counterexample) => ExitCode::from(4),
        Err(Failure::Usage(msg)) => {
            report_error("UsageError", msg, None);
            ExitCode::from(3)
        }
        Err(Failure::Core(e)) => {
            let code = match &e {
                Error::Parse(_) => 1,
                Error::Domain(_) | Error::NonsingularRequired(_) | Error::NotInvertible => 2,
                _ => 3,
            };
            let extra = match &e {
                Error::Parse(p) => Some(json!({"offset": p.offset, "expected": p.expected})),
                Error::Domain(w) => Some(json!({"subexpr": w.subexpr, "value": w.value})),
                _ => None,
            };
            report_error(e.kind(), e.to_string(), extra);
            ExitCode::from(code)
        }
    }
}
