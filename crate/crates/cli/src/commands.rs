use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use syzygy_core::bott::{bott_cohomology, corollary_table};
use syzygy_core::exterior::WedgeBasis;
use syzygy_core::gensyz::{
    classify_point, gensyz_equations, lift_projection, make_generic_syzygy, random_solution_point,
    GensyzModel, PointClass, Regime,
};
use syzygy_core::grass::{
    dual_orthogonal_degree, lu_space, minimal_syzygy, mukai_section, pluecker_ideal, SectionKind,
};
use syzygy_core::ideal_io::{format_poly, ideal_hash};
use syzygy_core::polyring::MonomialBasis;
use syzygy_core::rep::count_table;
use syzygy_core::syzygy::{
    linear_strand, rank_drop_check, rank_locus_probe, restrict_syzygies, syzygy_rank,
    syzygy_scheme_ideal, Syzygy, DEFAULT_MINOR_BUDGET,
};
use syzygy_core::{Matrix, Poly, PrimeField, QuadricIdeal};

use crate::io::{load_ideal, load_matrix, load_syzygy, save_ideal, save_matrix, save_syzygy, signed_rows};
use crate::report::{Stages, UsageError};
use crate::{Global, SyzygyArgs};

/// Environment variable overriding the minor budget of `ranklocus`.
pub const BUDGET_ENV: &str = "SYZYGY_BUDGET";

pub fn field(g: &Global) -> Result<PrimeField> {
    PrimeField::new(g.p).context("invalid --p")
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn rng(g: &Global) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(g.seed)
}

fn quadric_strings(f: PrimeField, rows: &Matrix, names: &[String]) -> Vec<String> {
    let basis = MonomialBasis::new(names.len(), 2);
    (0..rows.rows())
        .map(|i| format_poly(f, &Poly::from_dense(&basis, rows.row(i)), names))
        .collect()
}

fn linear_strings(f: PrimeField, rows: &Matrix, names: &[String]) -> Vec<String> {
    (0..rows.rows())
        .map(|i| format_poly(f, &Poly::linear(f, rows.row(i)), names))
        .collect()
}

/// Resolves the syzygy selected on the command line.
fn select_syzygy(
    g: &Global,
    ideal: &QuadricIdeal,
    a: &SyzygyArgs,
    stages: &mut Stages,
) -> Result<Syzygy> {
    if let Some(path) = &a.syzygy {
        return load_syzygy(path, ideal);
    }
    let p = a
        .index
        .ok_or_else(|| usage("select a syzygy with --syzygy FILE or --index P with --coords/--random"))?;
    let strand = stages.time("strand", || linear_strand(ideal, p))?;
    if p > strand.top() || strand.dim(p) == 0 {
        return Err(usage(format!("V_{p} is zero for this ideal (dims {:?})", strand.dims())));
    }
    let f = ideal.field();
    let coords: Vec<u64> = match (&a.coords, a.random) {
        (Some(c), _) => c.iter().map(|&x| f.from_i64(x)).collect(),
        (None, true) => {
            let mut r = rng(g);
            (0..strand.dim(p)).map(|_| f.random(&mut r)).collect()
        }
        (None, false) => return Err(usage("--index needs --coords or --random")),
    };
    if coords.len() != strand.dim(p) {
        return Err(usage(format!(
            "--coords has {} entries but dim V_{p} = {}",
            coords.len(),
            strand.dim(p)
        )));
    }
    Ok(strand.syzygy(p, &coords)?)
}

#[derive(Args, Debug, Serialize)]
pub struct StrandArgs {
    /// Ideal file (.json, or text with one quadric per line)
    #[arg(long)]
    pub ideal: PathBuf,
    /// Largest p to compute; stops earlier once V_p = 0
    #[arg(long, default_value_t = 10)]
    pub pmax: usize,
}

pub fn strand(g: &Global, a: &StrandArgs, stages: &mut Stages) -> Result<Value> {
    let ideal = stages.time("read", || load_ideal(&a.ideal, g.p))?;
    let strand = stages.time("strand", || linear_strand(&ideal, a.pmax))?;
    Ok(json!({
        "n_vars": ideal.n_vars(),
        "num_quadrics": ideal.num_quadrics(),
        "ideal_hash": ideal_hash(&ideal),
        "dims": strand.dims(),
    }))
}

#[derive(Args, Debug, Serialize)]
pub struct RankArgs {
    #[arg(long)]
    pub ideal: PathBuf,
    #[command(flatten)]
    pub syzygy: SyzygyArgs,
}

pub fn rank(g: &Global, a: &RankArgs, stages: &mut Stages) -> Result<Value> {
    let ideal = stages.time("read", || load_ideal(&a.ideal, g.p))?;
    let s = select_syzygy(g, &ideal, &a.syzygy, stages)?;
    let info = stages.time("rank", || syzygy_rank(&ideal, &s));
    let names = ideal.variable_names();
    Ok(json!({
        "p": s.p(),
        "rank": info.rank,
        "linear_forms": linear_strings(ideal.field(), info.forms.basis(), &names),
        "quadric_rank_convention": info.quadric_rank_convention,
    }))
}

#[derive(Args, Debug, Serialize)]
pub struct SchemeArgs {
    #[arg(long)]
    pub ideal: PathBuf,
    #[command(flatten)]
    pub syzygy: SyzygyArgs,
    /// Write the involved quadrics as an ideal file
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn scheme(g: &Global, a: &SchemeArgs, stages: &mut Stages) -> Result<Value> {
    let ideal = stages.time("read", || load_ideal(&a.ideal, g.p))?;
    let s = select_syzygy(g, &ideal, &a.syzygy, stages)?;
    let scheme = stages.time("scheme", || syzygy_scheme_ideal(&ideal, &s))?;
    let names = ideal.variable_names();
    if let Some(out) = &a.out {
        let q = QuadricIdeal::new(scheme.clone())?.with_variables(names.clone())?;
        save_ideal(out, &q)?;
    }
    Ok(json!({
        "p": s.p(),
        "num_quadrics": scheme.dim(),
        "spans_ideal": scheme.space() == ideal.quadrics().space(),
        "quadrics": quadric_strings(ideal.field(), scheme.basis_rows(), &names),
    }))
}

#[derive(Args, Debug, Serialize)]
pub struct RestrictArgs {
    #[arg(long)]
    pub ideal: PathBuf,
    /// Substitution matrix file (x = sub · y), e.g. from `mukai --sub-out`
    #[arg(long, conflicts_with = "codim")]
    pub sub: Option<PathBuf>,
    /// Use a seeded random linear section of this codimension instead
    #[arg(long)]
    pub codim: Option<usize>,
    /// With --index alone: the restriction map V_p → V_p(section) (default
    /// p = 1). With a selected syzygy: its rank before and after a
    /// hyperplane section (needs codimension 1)
    #[command(flatten)]
    pub syzygy: SyzygyArgs,
}

fn random_section(g: &Global, f: PrimeField, n: usize, codim: usize) -> Result<Matrix> {
    if codim == 0 || codim >= n {
        return Err(usage(format!("--codim must be between 1 and {}", n - 1)));
    }
    let mut r = rng(g);
    // seeded retries until the substitution has full rank
    for _ in 0..16 {
        let m = Matrix::random(f, n, n - codim, &mut r);
        if m.rank() == n - codim {
            return Ok(m);
        }
    }
    Err(syzygy_core::Error::DegenerateSection {
        attempts: 16,
        reason: "random substitution is rank deficient".into(),
    }
    .into())
}

pub fn restrict(g: &Global, a: &RestrictArgs, stages: &mut Stages) -> Result<Value> {
    let ideal = stages.time("read", || load_ideal(&a.ideal, g.p))?;
    let f = ideal.field();
    let sub = match (&a.sub, a.codim) {
        (Some(path), _) => load_matrix(path, f)?,
        (None, Some(c)) => random_section(g, f, ideal.n_vars(), c)?,
        (None, None) => return Err(usage("give --sub FILE or --codim C")),
    };
    let wants_syzygy = a.syzygy.syzygy.is_some() || a.syzygy.coords.is_some() || a.syzygy.random;
    if wants_syzygy {
        let s = select_syzygy(g, &ideal, &a.syzygy, stages)?;
        let drop = stages.time("rank_drop", || rank_drop_check(&ideal, &s, &sub))?;
        return Ok(json!({
            "mode": "rank_drop",
            "p": s.p(),
            "old_rank": drop.old_rank,
            "new_rank": drop.new_rank,
            "hyperplane_in_linear_span": drop.hyperplane_in_ls,
        }));
    }
    let p = a.syzygy.index.unwrap_or(1);
    let strand = stages.time("strand", || linear_strand(&ideal, p))?;
    if p > strand.top() {
        return Err(usage(format!("V_{p} is zero for this ideal (dims {:?})", strand.dims())));
    }
    let map = stages.time("restrict", || restrict_syzygies(&strand, &sub, p))?;
    Ok(json!({
        "mode": "map",
        "p": p,
        "source_dim": strand.dim(p),
        "target_dim": map.restricted.dim(p),
        "shape": [map.matrix.rows(), map.matrix.cols()],
        "rank": map.matrix.rank(),
        "injective": map.injective,
        "restricted_dims": map.restricted.dims(),
    }))
}

#[derive(Args, Debug, Serialize)]
pub struct RankLocusArgs {
    #[arg(long)]
    pub ideal: PathBuf,
    /// Homological index p of the syzygies; 0 probes the quadrics of I_2
    #[arg(long)]
    pub index: usize,
    /// Rank bound r: the locus of syzygies (or quadrics) of rank at most r
    #[arg(long)]
    pub rank: usize,
    /// Largest degree of the Hilbert probe
    #[arg(long, default_value_t = 8)]
    pub dmax: usize,
}

fn budget() -> Result<u128> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{BUDGET_ENV} must be a nonnegative integer, got '{v}'"))),
        Err(_) => Ok(DEFAULT_MINOR_BUDGET),
    }
}

pub fn ranklocus(g: &Global, a: &RankLocusArgs, stages: &mut Stages) -> Result<Value> {
    let budget = budget()?;
    let ideal = stages.time("read", || load_ideal(&a.ideal, g.p))?;
    let strand = stages.time("strand", || linear_strand(&ideal, a.index))?;
    let report = stages.time("minors", || rank_locus_probe(&strand, a.index, a.rank, a.dmax, budget))?;
    let mut v = serde_json::to_value(&report)?;
    v["budget"] = json!(budget.to_string());
    Ok(v)
}

#[derive(Args, Debug, Serialize)]
pub struct GensyzArgs {
    /// Homological index p
    #[arg(long)]
    pub index: usize,
    /// Dimension r of the space of linear forms L
    #[arg(long)]
    pub rank: usize,
    /// Classify this many seeded random points of the zero set (r = p + 3)
    #[arg(long, default_value_t = 0)]
    pub classify: usize,
    /// Write the model's ideal
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the canonical syzygy (needs --out for later use)
    #[arg(long)]
    pub syzygy_out: Option<PathBuf>,
}

fn model_names(m: &GensyzModel) -> Vec<String> {
    let mut names: Vec<String> = (0..m.r).map(|k| format!("l{}", k + 1)).collect();
    for j in WedgeBasis::new(m.r, m.r - m.p - 1).subsets() {
        let idx: Vec<String> = j.iter().map(|x| (x + 1).to_string()).collect();
        names.push(if idx.is_empty() {
            "a".to_string()
        } else {
            format!("a{}", idx.join("_"))
        });
    }
    names
}

pub fn gensyz(g: &Global, a: &GensyzArgs, stages: &mut Stages) -> Result<Value> {
    let f = field(g)?;
    if a.rank < a.index + 1 {
        return Err(usage("need r >= p + 1"));
    }
    let model = stages.time("equations", || gensyz_equations(f, a.index, a.rank))?;
    let names = model_names(&model);
    let ideal = model.ideal.clone().with_variables(names.clone())?;
    let s = stages.time("generic_syzygy", || make_generic_syzygy(&model))?;
    let info = syzygy_rank(&model.ideal, &s);
    let scheme = syzygy_scheme_ideal(&model.ideal, &s)?;
    let mut out = json!({
        "p": model.p,
        "r": model.r,
        "regime": model.regime,
        "n_vars": model.n_vars(),
        "num_equations": model.ideal.num_quadrics(),
        "equations": quadric_strings(f, &model.equations, &names),
        "generic_syzygy": {
            "rank": info.rank,
            "involved_quadrics": scheme.dim(),
            "spans_equations": scheme.space() == model.ideal.quadrics().space(),
        },
        "witness": model.witness,
    });
    if a.classify > 0 {
        if model.regime != Regime::Grassmannian {
            return Err(usage("--classify needs r = p + 3"));
        }
        let mut r = rng(g);
        let mut counts = [0usize; 4];
        stages.time("classify", || -> Result<()> {
            for _ in 0..a.classify {
                let x = random_solution_point(&model, &mut r);
                let c = classify_point(&model, &x)?;
                counts[c as usize] += 1;
            }
            Ok(())
        })?;
        out["classification"] = json!({
            "points": a.classify,
            "on_linear_part": counts[PointClass::OnLinearPart as usize],
            "on_grassmannian_part": counts[PointClass::OnGrassmannianPart as usize],
            "both": counts[PointClass::Both as usize],
            "outside": counts[PointClass::Outside as usize],
        });
    }
    if let Some(path) = &a.out {
        save_ideal(path, &ideal)?;
    }
    if let Some(path) = &a.syzygy_out {
        save_syzygy(path, &ideal, &s)?;
    }
    Ok(out)
}

#[derive(Args, Debug, Serialize)]
pub struct LiftArgs {
    #[arg(long)]
    pub ideal: PathBuf,
    #[command(flatten)]
    pub syzygy: SyzygyArgs,
    /// Write the matrix of the linear map (rows: model coordinates)
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
}

pub fn lift(g: &Global, a: &LiftArgs, stages: &mut Stages) -> Result<Value> {
    let ideal = stages.time("read", || load_ideal(&a.ideal, g.p))?;
    let s = select_syzygy(g, &ideal, &a.syzygy, stages)?;
    let pi = stages.time("lift", || lift_projection(&ideal, &s))?;
    if let Some(path) = &a.matrix_out {
        save_matrix(path, &pi.matrix)?;
    }
    Ok(json!({
        "p": pi.p,
        "r": pi.r,
        "regime": pi.regime,
        "matrix": signed_rows(&pi.matrix),
        "pullbacks_in_ideal": pi.pullbacks_in_ideal,
        "nonzero_pullbacks": pi.nonzero_pullbacks,
        "gauge_dim": pi.gauge_dim,
        "pfaffian_pullbacks_in_ideal": pi.pfaffian_pullbacks_in_ideal,
        "pfaffian_pullback_rank": pi.pfaffian_pullback_rank,
        "embedding": pi.embedding,
    }))
}

#[derive(Args, Debug, Serialize)]
pub struct GrassArgs {
    /// Dimension n of U; the Grassmannian of 2-planes lives in P(Λ^2 U)
    #[arg(long)]
    pub n: usize,
    /// Write the Plücker ideal
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Vector u (comma separated) for the minimal-rank (n-4)-th syzygy
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub minimal: Option<Vec<i64>>,
    /// Write the minimal-rank syzygy
    #[arg(long, requires = "minimal")]
    pub syzygy_out: Option<PathBuf>,
}

pub fn grass(g: &Global, a: &GrassArgs, stages: &mut Stages) -> Result<Value> {
    let f = field(g)?;
    let ideal = stages.time("pluecker", || pluecker_ideal(f, a.n))?;
    let mut out = json!({
        "n": a.n,
        "n_vars": ideal.n_vars(),
        "num_quadrics": ideal.num_quadrics(),
        "variables": ideal.variable_names(),
        "ideal_hash": ideal_hash(&ideal),
    });
    if let Some(u) = &a.minimal {
        let u: Vec<u64> = u.iter().map(|&x| f.from_i64(x)).collect();
        let s = stages.time("minimal_syzygy", || minimal_syzygy(&ideal, a.n, &u))?;
        let info = syzygy_rank(&ideal, &s);
        let names = ideal.variable_names();
        out["minimal"] = json!({
            "p": s.p(),
            "rank": info.rank,
            "linear_span_is_u_wedge_u": info.forms.space == lu_space(f, &u),
            "linear_forms": linear_strings(f, info.forms.basis(), &names),
        });
        if let Some(path) = &a.syzygy_out {
            save_syzygy(path, &ideal, &s)?;
        }
    }
    if let Some(path) = &a.out {
        save_ideal(path, &ideal)?;
    }
    Ok(out)
}

#[derive(Args, Debug, Serialize)]
pub struct MukaiArgs {
    /// Genus is 2k; k = 3 or 4
    #[arg(long)]
    pub k: usize,
    /// k3 or curve
    #[arg(long, default_value = "curve")]
    pub kind: String,
    /// Also compute the linear strand of the section
    #[arg(long)]
    pub strand: bool,
    /// Write the section's ideal
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the substitution from Plücker coordinates to the section's coordinates
    #[arg(long)]
    pub sub_out: Option<PathBuf>,
}

fn kind(s: &str) -> Result<SectionKind> {
    s.parse::<SectionKind>().map_err(anyhow::Error::from)
}

pub fn mukai(g: &Global, a: &MukaiArgs, stages: &mut Stages) -> Result<Value> {
    let f = field(g)?;
    let kind = kind(&a.kind)?;
    let m = stages.time("section", || mukai_section(f, a.k, kind, g.seed))?;
    let mut out = json!({
        "k": m.k,
        "genus": 2 * m.k,
        "kind": m.kind,
        "n_vars": m.result.n_vars(),
        "num_quadrics": m.result.num_quadrics(),
        "cubic_dim": m.cubic_dim,
        "attempt": m.attempt,
        "ideal_hash": ideal_hash(&m.result),
    });
    if a.strand {
        let strand = stages.time("strand", || linear_strand(&m.result, 2 * m.k))?;
        out["dims"] = json!(strand.dims());
    }
    if let Some(path) = &a.out {
        save_ideal(path, &m.result)?;
    }
    if let Some(path) = &a.sub_out {
        save_matrix(path, &m.substitution)?;
    }
    Ok(out)
}

#[derive(Args, Debug, Serialize)]
pub struct DualDegArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value = "curve")]
    pub kind: String,
    /// Largest degree of the Hilbert probe
    #[arg(long, default_value_t = 8)]
    pub dmax: usize,
}

pub fn dualdeg(g: &Global, a: &DualDegArgs, stages: &mut Stages) -> Result<Value> {
    let f = field(g)?;
    let kind = kind(&a.kind)?;
    let m = stages.time("section", || mukai_section(f, a.k, kind, g.seed))?;
    let report = stages.time("hilbert", || dual_orthogonal_degree(&m, a.dmax))?;
    let mut v = serde_json::to_value(&report)?;
    v["degree"] = json!(report.degree());
    v["empty"] = json!(report.is_empty());
    Ok(v)
}

#[derive(Args, Debug, Serialize)]
pub struct CountsArgs {
    #[arg(long)]
    pub k: usize,
}

pub fn counts(a: &CountsArgs, stages: &mut Stages) -> Result<Value> {
    let t = stages.time("counts", || count_table(a.k))?;
    Ok(serde_json::to_value(&t)?)
}

#[derive(Args, Debug, Serialize)]
pub struct BottArgs {
    /// Weight λ in the L_i basis, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "corollary")]
    pub weight: Option<Vec<i64>>,
    /// Table for the Eagon–Northcott terms E(-j-2, 0, .., 0, -j) on P^(k+1)
    #[arg(long, requires = "k")]
    pub corollary: bool,
    #[arg(long)]
    pub k: Option<usize>,
}

pub fn bott(a: &BottArgs, stages: &mut Stages) -> Result<Value> {
    if a.corollary {
        let k = a.k.expect("clap enforces --k");
        let table = stages.time("table", || corollary_table(k))?;
        return Ok(json!({ "k": k, "table": table }));
    }
    let w = a
        .weight
        .as_ref()
        .ok_or_else(|| usage("give --weight or --corollary --k K"))?;
    let r = stages.time("bott", || bott_cohomology(w))?;
    Ok(json!({ "weight": w, "result": r }))
}
