//! Command-line front end. Every subcommand reads one JSON document (a path,
//! or `-` for standard input) and writes canonical JSON to standard output.
//! Exit codes: 0 success, 1 domain error or failed check, 2 malformed input
//! or usage error.

use crate::abgroup::{FgAbelianGroup, GradedGroup, DEFAULT_EXTENSION_BOUND};
use crate::chain::{homology, homology_dims, mapping_cone, spectral_sequence, ChainComplex};
use crate::energy::{generate_pi_datum, pi_combination_certificate};
use crate::error::{Error, Result};
use crate::exactlin::{cokernel_presentation, invert_id_plus_nilpotent, smith_normal_form, Field, IntMatrix, LaurentPoly};
use crate::index::{self, ClosedPairTopology, EnergyData, FlatLimit, IndexConvention};
use crate::json::{self, ChainMapJson, ComplexJson, FiltrationJson, IntJson, JsonRing, MatrixJson, TriangleJson};
use crate::les::{apply_rules, run_poincare, PoincareFacts, TrianglePuzzle};
use crate::lin::{
    build_delta, build_phi_cone, build_total, check_acyclic, generate_valid_instance, run_six_step_ss,
    unipotent_certificate, verify_hypotheses, InstanceParams, IntTriangle, QuasiIsoMode, TriangleHypotheses,
};
use crate::moduli::{enumerate_reducibles, reducible_census, ChargeModel, LatticeProblem};
use crate::rational::{serde_q, Q};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::any::Any;
use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "tricore", version, about = "Exact homological algebra on JSON inputs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for generated data.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Prime for field coefficients.
    #[arg(long, global = true)]
    pub prime: Option<u64>,
    /// Collapse gradings to ℤ/modulus.
    #[arg(long, global = true)]
    pub modulus: Option<u32>,
    /// Search bound (member enumeration, scans).
    #[arg(long, global = true)]
    pub bound: Option<u64>,
    /// Establish quasi-isomorphisms by Id + nilpotent certificates.
    #[arg(long, global = true)]
    pub certificate: bool,
    /// Write a run manifest to this path.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct InputArg {
    /// Input JSON file, or `-` for standard input.
    pub input: Option<String>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Smith normal form U·M·V = D of an integer matrix.
    Snf(InputArg),
    /// Integral homology of a complex over ℤ.
    Homology(InputArg),
    /// Check triangle data from a file, or a generated instance (--seed).
    LinCheck(InputArg),
    /// Mapping cone of a chain map and whether it is acyclic.
    Cone(InputArg),
    /// Spectral sequence of a filtered complex.
    Ss(InputArg),
    /// Deduce the unknown corner of an exact triangle.
    TriangleSolve(InputArg),
    /// Run the two-step deduction for the Poincaré sphere.
    Poincare(InputArg),
    /// Index arithmetic requests.
    Index(InputArg),
    /// Lattice points on rational-offset spheres and reducible census.
    Moduli(InputArg),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Snf(_) => "snf",
            Command::Homology(_) => "homology",
            Command::LinCheck(_) => "lin-check",
            Command::Cone(_) => "cone",
            Command::Ss(_) => "ss",
            Command::TriangleSolve(_) => "triangle-solve",
            Command::Poincare(_) => "poincare",
            Command::Index(_) => "index",
            Command::Moduli(_) => "moduli",
        }
    }

    fn input(&self) -> &InputArg {
        match self {
            Command::Snf(i)
            | Command::Homology(i)
            | Command::LinCheck(i)
            | Command::Cone(i)
            | Command::Ss(i)
            | Command::TriangleSolve(i)
            | Command::Poincare(i)
            | Command::Index(i)
            | Command::Moduli(i) => i,
        }
    }

    /// Subcommands with a built-in default input.
    fn input_optional(&self) -> bool {
        matches!(self, Command::Poincare(_) | Command::LinCheck(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub input_digest: String,
    pub output_digest: String,
    pub versions: BTreeMap<String, String>,
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_malformed() {
        2
    } else {
        1
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, S>(argv: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    dispatch(&cli, stdin)
}

pub fn dispatch(cli: &Cli, stdin: &mut dyn Read) -> Outcome {
    let start = Instant::now();
    let fail = |e: Error| Outcome { code: exit_code(&e), stdout: String::new(), stderr: format!("error: {e}\n") };
    let input = match read_input(&cli.command, stdin) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    let (value, ok) = match execute(cli, input.clone()) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let out = match json::canonical(&value) {
        Ok(s) => s + "\n",
        Err(e) => return fail(e),
    };
    let mut stderr = String::new();
    if let Some(path) = &cli.manifest {
        let m = RunManifest {
            command: cli.command.name().to_string(),
            input_digest: json::sha256_hex(json::canonical(&input).unwrap_or_default().as_bytes()),
            output_digest: json::sha256_hex(out.trim_end().as_bytes()),
            versions: [("tricore".to_string(), VERSION.to_string()), ("format".to_string(), "1".to_string())]
                .into_iter()
                .collect(),
            elapsed_ms: start.elapsed().as_millis(),
        };
        let text = serde_json::to_string_pretty(&m).expect("manifest serializes");
        if let Err(e) = std::fs::write(path, text + "\n") {
            stderr.push_str(&format!("warning: could not write manifest: {e}\n"));
        }
    }
    if !ok {
        stderr.push_str("check failed\n");
    }
    Outcome { code: if ok { 0 } else { 1 }, stdout: out, stderr }
}

fn read_input(cmd: &Command, stdin: &mut dyn Read) -> Result<Value> {
    let text = match cmd.input().input.as_deref() {
        None if cmd.input_optional() => return Ok(Value::Null),
        None | Some("-") => {
            let mut s = String::new();
            stdin.read_to_string(&mut s).map_err(|e| Error::Malformed(format!("cannot read standard input: {e}")))?;
            s
        }
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("cannot read {path}: {e}")))?,
    };
    json::parse(&text)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn execute(cli: &Cli, input: Value) -> Result<(Value, bool)> {
    match &cli.command {
        Command::Snf(_) => snf(input).map(|v| (v, true)),
        Command::Homology(_) => homology_cmd(cli, input).map(|v| (v, true)),
        Command::LinCheck(_) => lin_check(cli, input),
        Command::Cone(_) => cone_cmd(input).map(|v| (v, true)),
        Command::Ss(_) => ss_cmd(cli, input).map(|v| (v, true)),
        Command::TriangleSolve(_) => triangle_solve(cli, input).map(|v| (v, true)),
        Command::Poincare(_) => poincare(input).map(|v| (v, true)),
        Command::Index(_) => index_cmd(cli, input).map(|v| (v, true)),
        Command::Moduli(_) => moduli_cmd(input).map(|v| (v, true)),
    }
}

fn snf(input: Value) -> Result<Value> {
    let mj: MatrixJson<IntJson> = json::from_value(input)?;
    let m: IntMatrix = json::matrix_from_json(&mj)?;
    let s = smith_normal_form(&m);
    let diagonal: Vec<IntJson> = s.diagonal().iter().map(IntJson::from_big).collect();
    Ok(json!({
        "u": json::matrix_to_json(&s.u),
        "d": json::matrix_to_json(&s.d),
        "v": json::matrix_to_json(&s.v),
        "diagonal": diagonal,
        "rank": s.rank(),
        "cokernel": cokernel_presentation(&m.transpose()),
    }))
}

fn groups_json(groups: &BTreeMap<i64, FgAbelianGroup>) -> BTreeMap<String, FgAbelianGroup> {
    groups.iter().map(|(g, h)| (g.to_string(), h.clone())).collect()
}

fn field_from(prime: Option<u64>) -> Result<Field> {
    match prime {
        Some(p) => Field::prime(p),
        None => Ok(Field::Rational),
    }
}

fn int_complex(input: Value) -> Result<ChainComplex<BigInt>> {
    let tag = json::ring_tag(&input)?;
    if tag != BigInt::TAG {
        return Err(Error::UnsupportedRing(format!("homology is computed over Z only, got {tag}")));
    }
    let cj: ComplexJson<IntJson> = json::from_value(input)?;
    json::complex_from_json(&cj)
}

fn homology_cmd(cli: &Cli, input: Value) -> Result<Value> {
    let c = int_complex(input)?;
    let h = homology(&c)?;
    let mut out = json!({
        "groups": groups_json(&h.groups),
        "euler_characteristic": h.euler_characteristic(),
    });
    if let Some(m) = cli.modulus {
        out["graded"] = to_value(&h.to_graded_group(m)?);
    }
    if let Some(p) = cli.prime {
        let f = Field::prime(p)?;
        let dims: BTreeMap<String, usize> =
            homology_dims(&c, f).into_iter().filter(|(_, d)| *d > 0).map(|(g, d)| (g.to_string(), d)).collect();
        out["field"] = json!(f.label());
        out["dims"] = to_value(&dims);
    }
    Ok(out)
}

fn cone_of<R: JsonRing>(input: Value) -> Result<Value> {
    let mj: ChainMapJson<R::Entry> = json::from_value(input)?;
    let f = json::chain_map_from_json::<R>(&mj)?;
    let cone = mapping_cone(&f)?;
    let acyc = check_acyclic(&cone.complex, None, &[2, 3])?;
    let mut out = json!({
        "cone": json::complex_to_json(&cone.complex),
        "acyclicity": acyc,
        "quasi_iso": acyc.is_acyclic(),
    });
    if let Some(z) = (&*cone.complex as &dyn Any).downcast_ref::<ChainComplex<BigInt>>() {
        out["homology"] = to_value(&groups_json(&homology(z)?.groups));
    }
    Ok(out)
}

fn cone_cmd(input: Value) -> Result<Value> {
    let tag = input.get("source").map(json::ring_tag).transpose()?.unwrap_or_default();
    match tag.as_str() {
        "Z" => cone_of::<BigInt>(input),
        "Z[T,T^-1]" => cone_of::<LaurentPoly>(input),
        t => Err(Error::Malformed(format!("unknown ring {t:?}"))),
    }
}

fn ss_cmd(cli: &Cli, input: Value) -> Result<Value> {
    let fj: FiltrationJson<IntJson> = json::from_value(input)?;
    let filt = json::filtration_from_json(&fj)?;
    let field = field_from(cli.prime)?;
    let ss = spectral_sequence(&filt, field)?;
    let pages: Vec<Value> = ss
        .pages
        .iter()
        .map(|p| {
            let dims: Vec<[i64; 3]> = p.dims.iter().map(|((s, g), d)| [*s, *g, *d as i64]).collect();
            let diffs: Vec<Value> = p
                .differentials
                .iter()
                .map(|d| json!({"from_level": d.from_level, "from_grade": d.from_grade, "to_level": d.to_level, "rank": d.rank}))
                .collect();
            json!({"r": p.r, "dims": dims, "differentials": diffs})
        })
        .collect();
    Ok(json!({
        "field": field.label(),
        "pages": pages,
        "stabilized_at": ss.stabilized_at,
        "homology_total": ss.homology_total,
        "abutment_ok": ss.abutment_ok,
    }))
}

fn pi_certificate_json(seed: u64) -> Result<Value> {
    let d = generate_pi_datum(seed, 4, 2)?;
    let c = pi_combination_certificate(&d)?;
    let replayed = c.replay(&d).is_ok();
    let (n1, inv1) = c.at_one();
    let commutes = invert_id_plus_nilpotent(&n1)? == inv1;
    Ok(json!({
        "seed": seed,
        "n": json::matrix_to_json(&c.n),
        "exponent": c.exponent,
        "inverse": json::matrix_to_json(&c.inverse),
        "steps": c.log.len(),
        "replayed": replayed,
        "at_one": {"n": json::matrix_to_json(&n1), "inverse": json::matrix_to_json(&inv1), "commutes": commutes},
    }))
}

fn lin_report<R: JsonRing>(cli: &Cli, h: &TriangleHypotheses<R>) -> Result<(Value, bool)> {
    let mode = if cli.certificate { QuasiIsoMode::Certificate } else if R::TAG == BigInt::TAG { QuasiIsoMode::Cone } else { QuasiIsoMode::Skip };
    let report = verify_hypotheses(h, mode);
    let primes: Vec<u64> = match cli.prime {
        Some(p) => vec![p],
        None => vec![2, 3],
    };
    let mut ok = report.passed();
    let mut out = json!({
        "ring": R::TAG,
        "mode": mode,
        "hypotheses": report,
        "passed": report.passed(),
    });
    if report.equations_hold() {
        let total = build_total(h)?;
        let acyc = check_acyclic(&total.complex, None, &primes)?;
        ok &= acyc.is_acyclic();
        out["total"] = to_value(&acyc);
        if let Some(z) = (h as &dyn Any).downcast_ref::<IntTriangle>() {
            let delta = build_delta(z)?;
            let qi = delta.is_quasi_iso();
            ok &= qi;
            out["delta_quasi_iso"] = json!(qi);
            let datum = build_phi_cone(z)?;
            let mut traces = Vec::new();
            for &p in &primes {
                let t = run_six_step_ss(&datum, p)?;
                ok &= t.collapsed();
                traces.push(to_value(&t));
            }
            out["six_step"] = Value::Array(traces);
        }
    } else {
        ok = false;
    }
    if cli.certificate {
        let unip: Vec<Value> = h
            .big_f
            .iter()
            .map(|f| match unipotent_certificate(f) {
                Ok(k) => json!(k),
                Err(e) => json!(e.to_string()),
            })
            .collect();
        out["unipotent"] = Value::Array(unip);
        out["pi_certificate"] = pi_certificate_json(cli.seed.unwrap_or(0))?;
    }
    out["ok"] = json!(ok);
    Ok((out, ok))
}

fn lin_check(cli: &Cli, input: Value) -> Result<(Value, bool)> {
    if input.is_null() {
        let seed = cli.seed.unwrap_or(0);
        let h = generate_valid_instance(seed, &InstanceParams::default())?;
        let (mut out, ok) = lin_report(cli, &h)?;
        out["seed"] = json!(seed);
        out["instance"] = to_value(&json::triangle_to_json(&h));
        return Ok((out, ok));
    }
    let tag = input
        .get("complexes")
        .and_then(|c| c.get(0))
        .map(json::ring_tag)
        .transpose()?
        .unwrap_or_default();
    match tag.as_str() {
        "Z" => {
            let tj: TriangleJson<IntJson> = json::from_value(input)?;
            lin_report(cli, &json::triangle_from_json::<BigInt>(&tj)?)
        }
        "Z[T,T^-1]" => {
            let tj: TriangleJson<<LaurentPoly as JsonRing>::Entry> = json::from_value(input)?;
            lin_report(cli, &json::triangle_from_json::<LaurentPoly>(&tj)?)
        }
        t => Err(Error::Malformed(format!("unknown ring {t:?}"))),
    }
}

fn triangle_solve(cli: &Cli, input: Value) -> Result<Value> {
    let puzzle: TrianglePuzzle = json::from_value(input)?;
    let d = apply_rules(&puzzle)?;
    let mut solutions = Vec::new();
    for s in &d.solutions {
        let mut v = json!({
            "family": s.family,
            "text": s.family.to_string(),
            "trace": s.trace,
            "trace_text": s.trace.render(),
        });
        if let Some(b) = cli.bound {
            let mut members: Vec<GradedGroup> = Vec::new();
            for a in s.family.assignments(b, DEFAULT_EXTENSION_BOUND)? {
                let g = s.family.instantiate(&a.values)?;
                if !members.contains(&g) {
                    members.push(g);
                }
            }
            v["members"] = to_value(&members);
        }
        solutions.push(v);
    }
    Ok(json!({"schema": d.schema, "solutions": solutions, "pruned": d.pruned}))
}

fn poincare(input: Value) -> Result<Value> {
    let facts = if input.is_null() { PoincareFacts::standard() } else { json::from_value(input)? };
    let r = run_poincare(&facts)?;
    let mut out = to_value(&r);
    out["trace_text"] = json!(format!("{}{}", r.step1.render(), r.step2.render()));
    Ok(out)
}

#[derive(Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum IndexRequest {
    Closed {
        topology: ClosedPairTopology,
        #[serde(with = "serde_q")]
        kappa: Q,
    },
    Excision {
        topology: ClosedPairTopology,
        #[serde(with = "serde_q")]
        kappa: Q,
    },
    Glue {
        first: i64,
        second: i64,
        limit: FlatLimit,
        #[serde(default)]
        convention: IndexConvention,
    },
    Cap {
        closed: i64,
        limit: FlatLimit,
    },
    Rp3 {
        same_limits: bool,
        kappa_positive: bool,
        #[serde(default)]
        kappa_max: Option<u64>,
    },
    S2xs1 {
        flat: bool,
    },
    ChargeScan {
        #[serde(with = "serde_q")]
        bound: Q,
    },
    Charge {
        #[serde(with = "serde_q")]
        k0: Q,
        #[serde(with = "serde_q")]
        l0: Q,
    },
    Energy {
        data: EnergyData,
    },
    Dimension {
        b1: i64,
        b_plus: i64,
        chi_surface: i64,
        self_intersection: i64,
    },
}

fn index_cmd(cli: &Cli, input: Value) -> Result<Value> {
    let req: IndexRequest = json::from_value(input)?;
    Ok(match req {
        IndexRequest::Closed { topology, kappa } => to_value(&index::index_closed(&topology, &kappa)?),
        IndexRequest::Excision { topology, kappa } => to_value(&index::orbifold_excision(&topology, &kappa)?),
        IndexRequest::Glue { first, second, limit, convention } => {
            json!({"index": index::glue_index_with(convention, first, second, &limit), "convention": convention})
        }
        IndexRequest::Cap { closed, limit } => json!({"index": index::cap_index(closed, &limit)?}),
        IndexRequest::Rp3 { same_limits, kappa_positive, kappa_max } => {
            let m = kappa_max.or(cli.bound).unwrap_or(100);
            to_value(&index::rp3_cylinder_indices(same_limits, kappa_positive, m))
        }
        IndexRequest::S2xs1 { flat } => to_value(&index::s2xs1_breaking_bound(flat)),
        IndexRequest::ChargeScan { bound } => to_value(&index::charge_index_scan(&bound)?),
        IndexRequest::Charge { k0, l0 } => json!({"index": index::charge_index(&k0, &l0)?}),
        IndexRequest::Energy { data } => {
            data.validate()?;
            json!({"valid": true, "data": data})
        }
        IndexRequest::Dimension { b1, b_plus, chi_surface, self_intersection } => {
            json!({"dimension": index::dimension_term(b1, b_plus, chi_surface, self_intersection)?})
        }
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CensusRequest {
    #[serde(default = "ChargeModel::blow_up_pair")]
    model: ChargeModel,
    #[serde(with = "serde_q")]
    kappa: Q,
    #[serde(default = "plus_one")]
    lift_sign: i8,
}

fn plus_one() -> i8 {
    1
}

fn moduli_cmd(input: Value) -> Result<Value> {
    if input.get("kappa").is_some() {
        let r: CensusRequest = json::from_value(input)?;
        return Ok(to_value(&reducible_census(&r.model, &r.kappa, r.lift_sign)?));
    }
    let p: LatticeProblem = json::from_value(input)?;
    let sols = enumerate_reducibles(&p)?;
    Ok(json!({"problem": p, "count": sols.len(), "solutions": sols}))
}
