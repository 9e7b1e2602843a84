//! The `exact` subcommand: evaluates closed-form quantities over parameter
//! grids and emits one record per grid point.

use std::collections::BTreeMap;

use clap::{Args, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use googol_core::formulas::{self, exact};
use googol_core::guarantees;
use googol_core::records::{rational_str, Provenance, ValueRecord};

use crate::output::{emit, timestamp, Format};
use crate::{Failure, OutputArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    /// f64 evaluation (covers every operation)
    Float,
    /// exact rationals rendered as "p/q" (rational-valued operations only)
    Rational,
}

#[derive(Args)]
pub struct ExactArgs {
    /// Operation name, e.g. F, q_ij, p_algc, p_algt_stop, a_jt, r_inf, g
    #[arg(long)]
    op: String,
    /// Rank index grid, e.g. `3` or `1..10`
    #[arg(long)]
    i: Option<String>,
    /// Series index grid
    #[arg(long)]
    j: Option<String>,
    /// Couple-structure grid
    #[arg(long)]
    k: Option<String>,
    /// Rank grid for the k-tail bound
    #[arg(long)]
    ell: Option<String>,
    /// Card count for the k-tail bound
    #[arg(long)]
    n: Option<usize>,
    /// Mixing probability in [0,1], or `rstar`
    #[arg(long)]
    r: Option<String>,
    /// Window excess in [0,1], or `tstar`
    #[arg(long)]
    t: Option<String>,
    /// Collision-couple rank: grid points with i = kprime use the
    /// on-collision-card mass
    #[arg(long)]
    kprime: Option<usize>,
    #[arg(long, value_enum, default_value_t = Backend::Float)]
    backend: Backend,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_range(name: &str, spec: &Option<String>) -> Result<Option<Vec<usize>>, Failure> {
    let Some(s) = spec else { return Ok(None) };
    let bad = || Failure::new(3, format!("bad range for --{name}: `{s}`"));
    let vals = if let Some((a, b)) = s.split_once("..") {
        let lo: usize = a.trim().parse().map_err(|_| bad())?;
        let hi: usize = b.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        (lo..=hi).collect()
    } else {
        vec![s.trim().parse().map_err(|_| bad())?]
    };
    Ok(Some(vals))
}

fn parse_unit(name: &str, spec: &Option<String>, star: f64) -> Result<Option<f64>, Failure> {
    let Some(s) = spec else { return Ok(None) };
    let v = match s.trim() {
        "rstar" | "tstar" => star,
        raw => raw
            .parse::<f64>()
            .map_err(|_| Failure::new(3, format!("bad value for --{name}: `{raw}`")))?,
    };
    if !(0.0..=1.0).contains(&v) {
        return Err(Failure::new(3, format!("--{name} must be in [0, 1]")));
    }
    Ok(Some(v))
}

struct Grid {
    i: Option<Vec<usize>>,
    j: Option<Vec<usize>>,
    k: Option<Vec<usize>>,
    ell: Option<Vec<usize>>,
    n: Option<usize>,
    r: Option<f64>,
    t: Option<f64>,
    kprime: Option<usize>,
}

impl Grid {
    fn need(&self, name: &str) -> Result<&[usize], Failure> {
        let field = match name {
            "i" => &self.i,
            "j" => &self.j,
            "k" => &self.k,
            "ell" => &self.ell,
            _ => unreachable!(),
        };
        field
            .as_deref()
            .ok_or_else(|| Failure::new(3, format!("--{name} is required for this op")))
    }

    fn need_r(&self) -> Result<f64, Failure> {
        self.r
            .ok_or_else(|| Failure::new(3, "--r is required for this op"))
    }

    fn need_t(&self) -> Result<f64, Failure> {
        self.t
            .ok_or_else(|| Failure::new(3, "--t is required for this op"))
    }
}

fn record(op: &str, params: &[(&str, Value)], value: Value, trunc: Option<f64>) -> ValueRecord {
    ValueRecord {
        op: op.to_string(),
        params: params
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect::<BTreeMap<_, _>>(),
        value,
        backend: Provenance::Formula,
        truncation_bound: trunc,
    }
}

fn rational_value(x: &BigRational) -> Value {
    json!(rational_str(x))
}

/// Evaluates the requested op over its grid. Returns the CSV column order
/// and the records.
fn evaluate(args: &ExactArgs) -> Result<(Vec<&'static str>, Vec<ValueRecord>), Failure> {
    let r_star = guarantees::r_star();
    let t_star = guarantees::find_t_star(1e-9)?;
    let grid = Grid {
        i: parse_range("i", &args.i)?,
        j: parse_range("j", &args.j)?,
        k: parse_range("k", &args.k)?,
        ell: parse_range("ell", &args.ell)?,
        n: args.n,
        r: parse_unit("r", &args.r, r_star)?,
        t: parse_unit("t", &args.t, t_star)?,
        kprime: args.kprime,
    };
    let rational = args.backend == Backend::Rational;
    let op = args.op.as_str();
    let rational_ops = [
        "F",
        "q_ij",
        "p_max_hidden",
        "p_algc",
        "p_algc_stop",
        "p_algo",
        "p_algo_at_k",
        "p_algo_stop",
        "p_algf",
        "p_algf_stop",
        "p_mixture",
        "p_mixture_lower",
        "p_mixture_stop",
        "g",
        "harmonic",
    ];
    if rational && !rational_ops.contains(&op) {
        return Err(Failure::new(
            3,
            format!("op `{op}` has no rational backend"),
        ));
    }
    let exact_r = |r: f64| BigRational::from_float(r).expect("finite probability");

    let mut recs = Vec::new();
    let columns: Vec<&'static str> = match op {
        "F" => {
            for &k in grid.need("k")? {
                if k < 2 {
                    continue;
                }
                let value = if rational {
                    rational_value(&exact::secretary_win_prob(k))
                } else {
                    json!(formulas::secretary_win_prob(k))
                };
                recs.push(record(op, &[("k", json!(k))], value, None));
            }
            vec!["k"]
        }
        "secretary_limit" => {
            recs.push(record(op, &[], json!(formulas::secretary_limit()), None));
            vec![]
        }
        "q_ij" => {
            for &k in grid.need("k")? {
                for &i in grid.need("i")? {
                    if k < 2 || i == 0 || i > k - 1 {
                        continue;
                    }
                    for &j in grid.need("j")? {
                        let params = [("i", json!(i)), ("j", json!(j)), ("k", json!(k))];
                        let value = if rational {
                            rational_value(&exact::q_ij(i, j, k))
                        } else {
                            json!(formulas::q_ij(i, j, k))
                        };
                        recs.push(record(op, &params, value, None));
                    }
                }
            }
            vec!["i", "j", "k"]
        }
        "p_max_hidden" => {
            for &k in grid.need("k")? {
                for &i in grid.need("i")? {
                    if k < 2 || i == 0 {
                        continue;
                    }
                    let value = if rational {
                        rational_value(&exact::max_hidden_mass(i, k))
                    } else {
                        json!(formulas::max_hidden_mass(i, k))
                    };
                    recs.push(record(op, &[("i", json!(i)), ("k", json!(k))], value, None));
                }
            }
            vec!["i", "k"]
        }
        "p_algc" | "p_algf" => {
            for &k in grid.need("k")? {
                for &i in grid.need("i")? {
                    if k < 2 || i == 0 || i > k - 1 {
                        continue;
                    }
                    let value = match (op, rational) {
                        ("p_algc", true) => rational_value(&exact::closed_mass(i, k)),
                        ("p_algc", false) => json!(formulas::closed_mass(i, k)),
                        (_, true) => rational_value(&exact::full_mass(i, k)),
                        (_, false) => json!(formulas::full_mass(i, k)),
                    };
                    recs.push(record(op, &[("i", json!(i)), ("k", json!(k))], value, None));
                }
            }
            vec!["i", "k"]
        }
        "p_algo" => {
            for &k in grid.need("k")? {
                for &i in grid.need("i")? {
                    if k < 2 || i == 0 || i > k - 1 {
                        continue;
                    }
                    let on_collision = grid.kprime == Some(i);
                    let params = [
                        ("i", json!(i)),
                        ("k", json!(k)),
                        ("i_is_kprime", json!(on_collision)),
                    ];
                    let value = if rational {
                        rational_value(&exact::open_mass(i, k, on_collision))
                    } else {
                        json!(formulas::open_mass(i, k, on_collision))
                    };
                    recs.push(record(op, &params, value, None));
                }
            }
            vec!["i", "k", "i_is_kprime"]
        }
        "p_algc_stop" | "p_algo_stop" | "p_algf_stop" | "p_algo_at_k" | "g" | "harmonic"
        | "error_bound" => {
            for &k in grid.need("k")? {
                let min_k = match op {
                    "harmonic" => 1,
                    "error_bound" => 3,
                    _ => 2,
                };
                if k < min_k {
                    continue;
                }
                let value = match (op, rational) {
                    ("p_algc_stop", true) => rational_value(&exact::closed_stop(k)),
                    ("p_algc_stop", false) => json!(formulas::closed_stop(k)),
                    ("p_algo_stop", true) => rational_value(&exact::open_stop(k)),
                    ("p_algo_stop", false) => json!(formulas::open_stop(k)),
                    ("p_algf_stop", true) => rational_value(&exact::full_stop(k)),
                    ("p_algf_stop", false) => json!(formulas::full_stop(k)),
                    ("p_algo_at_k", true) => rational_value(&exact::open_mass_at_k(k)),
                    ("p_algo_at_k", false) => json!(formulas::open_mass_at_k(k)),
                    ("g", true) => rational_value(&exact::g_of_k(k)),
                    ("g", false) => json!(formulas::g_of_k(k)),
                    ("harmonic", true) => rational_value(&exact::harmonic(k)),
                    ("harmonic", false) => json!(formulas::harmonic(k)),
                    ("error_bound", _) => json!(formulas::large_k_error_bound(k)),
                    _ => unreachable!(),
                };
                recs.push(record(op, &[("k", json!(k))], value, None));
            }
            vec!["k"]
        }
        "p_mixture" | "p_mixture_lower" => {
            let r = grid.need_r()?;
            for &k in grid.need("k")? {
                for &i in grid.need("i")? {
                    if k < 2 || i == 0 || i > k - 1 {
                        continue;
                    }
                    let on_collision = grid.kprime == Some(i);
                    let params = [("i", json!(i)), ("k", json!(k)), ("r", json!(r))];
                    let value = match (op, rational) {
                        ("p_mixture", true) => {
                            rational_value(&exact::mixture_mass(i, k, &exact_r(r), on_collision))
                        }
                        ("p_mixture", false) => {
                            json!(formulas::mixture_mass(i, k, r, on_collision))
                        }
                        (_, true) => rational_value(&exact::mixture_mass_lower(i, k, &exact_r(r))),
                        (_, false) => json!(formulas::mixture_mass_lower(i, k, r)),
                    };
                    recs.push(record(op, &params, value, None));
                }
            }
            vec!["i", "k", "r"]
        }
        "p_mixture_stop" => {
            let r = grid.need_r()?;
            for &k in grid.need("k")? {
                if k < 2 {
                    continue;
                }
                let value = if rational {
                    rational_value(&exact::mixture_stop(k, &exact_r(r)))
                } else {
                    json!(formulas::mixture_stop(k, r))
                };
                recs.push(record(op, &[("k", json!(k)), ("r", json!(r))], value, None));
            }
            vec!["k", "r"]
        }
        "a_of_r" => {
            let r = grid.need_r()?;
            recs.push(record(
                op,
                &[("r", json!(r))],
                json!(formulas::a_of_r(r)),
                None,
            ));
            vec!["r"]
        }
        "tail_check" => {
            let r = grid.need_r()?;
            for &k in grid.need("k")? {
                if k < 2 {
                    continue;
                }
                let value = json!(formulas::tail_series_check(k, r));
                recs.push(record(op, &[("k", json!(k)), ("r", json!(r))], value, None));
            }
            vec!["k", "r"]
        }
        "a_jt" => {
            let t = grid.need_t()?;
            for &j in grid.need("j")? {
                if j < 2 {
                    continue;
                }
                let value = json!(formulas::a_jt(j, t));
                recs.push(record(op, &[("j", json!(j)), ("t", json!(t))], value, None));
            }
            vec!["j", "t"]
        }
        "b_kt" => {
            let t = grid.need_t()?;
            for &k in grid.need("k")? {
                if k < 2 {
                    continue;
                }
                let value = json!(formulas::b_kt(k, t));
                recs.push(record(op, &[("k", json!(k)), ("t", json!(t))], value, None));
            }
            vec!["k", "t"]
        }
        "p_algt" | "r_k" => {
            let t = grid.need_t()?;
            for &k in grid.need("k")? {
                for &i in grid.need("i")? {
                    if k < 2 || i == 0 || i > k - 1 {
                        continue;
                    }
                    let params = [("i", json!(i)), ("k", json!(k)), ("t", json!(t))];
                    let value = if op == "p_algt" {
                        json!(formulas::window_mass(i, k, t))
                    } else {
                        json!(formulas::ratio_finite(i, k, t))
                    };
                    recs.push(record(op, &params, value, None));
                }
            }
            vec!["i", "k", "t"]
        }
        "p_algt_stop" => {
            let t = grid.need_t()?;
            for &k in grid.need("k")? {
                if k < 2 {
                    continue;
                }
                let value = json!(formulas::window_stop(k, t));
                recs.push(record(op, &[("k", json!(k)), ("t", json!(t))], value, None));
            }
            vec!["k", "t"]
        }
        "r_inf_i" => {
            let t = grid.need_t()?;
            for &i in grid.need("i")? {
                if i == 0 {
                    continue;
                }
                let s = formulas::ratio_limit_i(i, t);
                recs.push(record(
                    op,
                    &[("i", json!(i)), ("t", json!(t))],
                    json!(s.value),
                    Some(s.truncation_bound),
                ));
            }
            vec!["i", "t"]
        }
        "r_inf" => {
            let t = grid.need_t()?;
            recs.push(record(
                op,
                &[("t", json!(t))],
                json!(formulas::ratio_limit(t)),
                None,
            ));
            vec!["t"]
        }
        "k_tail" => {
            let n = grid
                .n
                .ok_or_else(|| Failure::new(3, "--n is required for this op"))?;
            for &ell in grid.need("ell")? {
                if ell > n {
                    continue;
                }
                let value = json!(formulas::k_tail_bound(ell, n));
                recs.push(record(
                    op,
                    &[("ell", json!(ell)), ("n", json!(n))],
                    value,
                    None,
                ));
            }
            vec!["ell", "n"]
        }
        "r_star" => {
            recs.push(record(op, &[], json!(r_star), None));
            vec![]
        }
        "t_star" => {
            recs.push(record(op, &[], json!(t_star), None));
            vec![]
        }
        "prophet_guarantee" => {
            recs.push(record(
                op,
                &[],
                json!(guarantees::prophet_guarantee()),
                None,
            ));
            vec![]
        }
        other => return Err(Failure::new(3, format!("unknown op `{other}`"))),
    };
    if recs.is_empty() {
        return Err(Failure::new(
            3,
            "parameter grid is empty after validity filtering",
        ));
    }
    Ok((columns, recs))
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn cmd_exact(args: ExactArgs) -> Result<u8, Failure> {
    let (columns, recs) = evaluate(&args)?;
    let text = match args.output.format {
        Format::Json => {
            let body = json!({
                "timestamp": timestamp(args.output.deterministic),
                "records": recs,
            });
            let mut value = body;
            if args.output.deterministic {
                value.as_object_mut().unwrap().remove("timestamp");
            }
            serde_json::to_string_pretty(&value).expect("serializable")
        }
        Format::Csv => {
            let with_trunc = recs.iter().any(|r| r.truncation_bound.is_some());
            let mut header: Vec<String> = columns.iter().map(|c| c.to_string()).collect();
            header.push("value".into());
            if with_trunc {
                header.push("truncation_bound".into());
            }
            let mut rows = vec![header.join(",")];
            for rec in &recs {
                let mut row: Vec<String> = columns
                    .iter()
                    .map(|c| rec.params.get(*c).map(csv_cell).unwrap_or_default())
                    .collect();
                row.push(csv_cell(&rec.value));
                if with_trunc {
                    row.push(
                        rec.truncation_bound
                            .map(|b| b.to_string())
                            .unwrap_or_default(),
                    );
                }
                rows.push(row.join(","));
            }
            rows.join("\n") + "\n"
        }
    };
    emit(&args.output.out, &text)?;
    Ok(0)
}
