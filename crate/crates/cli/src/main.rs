use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use p4surf::adjunction::{adjunction_chain, family, verify_family, DivisorClass, FAMILIES};
use p4surf::certificate::{verify, Certificate, Provenance};
use p4surf::emod::EMatrix;
use p4surf::fixtures;
use p4surf::geometry::zazb_intersection;
use p4surf::monad::Monad;
use p4surf::search::{
    construct1_trial, construct2_pipeline, family_dimensions, is_hit, sample_a1_with_n, tangent_dimension, trial_rng,
    N_invariant, PipelineOptions, QuotientSampler, Stage, TrialRecord,
};

#[derive(Parser)]
#[command(name = "p4surf", version, about = "Rational surfaces of degree 12 and sectional genus 13 in P^4")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Random search for B_2 with the fixed B_1.
    Construct1(Construct1),
    /// The linear system attached to a linear A_1.
    Construct2(Construct2),
    /// Recompute every field of a certificate.
    Verify {
        path: PathBuf,
    },
    /// Count the points of Z_A ∩ Z_B.
    Intersect(Intersect),
    /// Tangent space of the monad stored in a certificate.
    Tangent {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Adjunction chain and ledger for a hyperplane class.
    Adjunction(Adjunction),
    /// Summarize a trials.jsonl file.
    Stats {
        path: PathBuf,
    },
}

/// Settings shared by the subcommands that draw random data.
#[derive(Args, Clone, Debug)]
struct RunConfig {
    #[arg(long, default_value_t = 5)]
    p: u32,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Row budget of the Gröbner run in the smoothness test.
    #[arg(long, env = "P4SURF_SMOOTHNESS_ROWS", default_value_t = 20_000_000)]
    smoothness_rows: usize,
    /// Matrix file for B_1 (defaults to the shipped one for p = 5 or 3).
    #[arg(long)]
    b1: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunConfig {
    fn b1(&self) -> Result<EMatrix> {
        let b1 = match &self.b1 {
            Some(path) => read_matrix(path)?,
            None => match self.p {
                5 => fixtures::b1_f5(),
                3 => fixtures::b1_f3(),
                p => bail!("no shipped B_1 for p = {p}; pass --b1"),
            },
        };
        if b1.field().p() != self.p {
            bail!("B_1 is defined over F_{}, not F_{}", b1.field().p(), self.p);
        }
        Ok(b1)
    }

    fn options(&self) -> PipelineOptions {
        PipelineOptions { full: true, smoothness_rows: Some(self.smoothness_rows) }
    }

    fn record(&self) -> serde_json::Value {
        json!({ "p": self.p, "seed": self.seed, "smoothness_rows": self.smoothness_rows })
    }

    fn out_dir(&self) -> Result<Option<&Path>> {
        if let Some(dir) = &self.out {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        Ok(self.out.as_deref())
    }
}

#[derive(Args)]
struct Construct1 {
    #[command(flatten)]
    config: RunConfig,
    #[arg(long, env = "P4SURF_TRIALS", default_value_t = 6250)]
    trials: u64,
    /// Also extract ideals and write certificates for the hits.
    #[arg(long)]
    certify: bool,
    /// Re-derive a certificate from its stored matrices and compare bytes.
    #[arg(long)]
    replay: Option<PathBuf>,
}

#[derive(Args)]
struct Construct2 {
    #[command(flatten)]
    config: RunConfig,
    /// Matrix file for A_1.
    #[arg(long, conflicts_with = "random")]
    a1: Option<PathBuf>,
    #[arg(long, requires = "target_n")]
    random: bool,
    #[arg(long)]
    target_n: Option<usize>,
    /// Draws of B_2' before giving up.
    #[arg(long, env = "P4SURF_ATTEMPTS", default_value_t = 12)]
    attempts: usize,
    /// Hyperplane class to audit: a family name or a class literal.
    #[arg(long)]
    class: Option<String>,
}

#[derive(Args)]
struct Intersect {
    #[arg(long)]
    a1: PathBuf,
    #[arg(long)]
    b1: Option<PathBuf>,
    /// Largest residue degree searched by enumeration.
    #[arg(long, default_value_t = 4)]
    max_degree: u32,
}

#[derive(Args)]
struct Adjunction {
    /// Class literal such as "12L - 2*4E - 9*3E - 3*2E - 7*1E", or a family name.
    #[arg(long)]
    class: String,
    /// Number of six-secant lines, for the Le Barz count.
    #[arg(long)]
    six_secants: Option<usize>,
}

fn read_matrix(path: &Path) -> Result<EMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    EMatrix::from_json_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_certificate(path: &Path) -> Result<Certificate> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Certificate::from_json_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn parse_class(s: &str) -> Result<DivisorClass> {
    match family(s) {
        Some(c) => Ok(c),
        None => s.parse().with_context(|| format!("parsing class {s:?}")),
    }
}

fn write_certificate(dir: Option<&Path>, name: &str, cert: &Certificate) -> Result<()> {
    if let Some(dir) = dir {
        let path = dir.join(name);
        fs::write(&path, cert.to_json_string()).with_context(|| format!("writing {}", path.display()))?;
        println!("certificate: {}", path.display());
    }
    Ok(())
}

fn construct1(cmd: &Construct1) -> Result<bool> {
    let cfg = &cmd.config;
    if let Some(path) = &cmd.replay {
        let stored = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cert = Certificate::from_json_str(&stored)?;
        let b = EMatrix::from_json(&cert.b)?;
        let again = Certificate::derive(&b, cert.provenance.clone())?.to_json_string();
        let identical = again == stored.trim_end();
        println!("replay {}: {}", path.display(), if identical { "identical" } else { "differs" });
        return Ok(identical);
    }
    let b1 = cfg.b1()?;
    let sampler = QuotientSampler::new(&b1);
    let out = cfg.out_dir()?;
    let mut writer = match out {
        Some(dir) => Some(BufWriter::new(fs::File::create(dir.join("trials.jsonl"))?)),
        None => None,
    };
    let quick = PipelineOptions { full: false, ..cfg.options() };
    let start = Instant::now();
    let mut stages: BTreeMap<Stage, usize> = BTreeMap::new();
    let mut classes: BTreeMap<String, usize> = BTreeMap::new();
    let mut hits = Vec::new();
    for index in 0..cmd.trials {
        let (rec, _) = construct1_trial(&sampler, &b1, cfg.seed, index, &quick)?;
        *stages.entry(rec.stage).or_default() += 1;
        if let Some((a1, a2)) = rec.a1_class {
            *classes.entry(format!("{a1},{a2}")).or_default() += 1;
        }
        if is_hit(&rec) {
            hits.push(rec.clone());
        }
        if let Some(w) = writer.as_mut() {
            serde_json::to_writer(&mut *w, &rec)?;
            w.write_all(b"\n")?;
        }
    }
    if let Some(w) = writer.as_mut() {
        w.flush()?;
    }
    let mut certified = Vec::new();
    if cmd.certify {
        for rec in hits.iter().filter(|r| r.stage == Stage::Accepted) {
            let b2 = EMatrix::from_json(rec.b2.as_ref().expect("hits carry B_2"))?;
            let b = p4surf::search::assemble_b(&b2, &b1);
            let prov = Provenance {
                construction: "construct1".into(),
                master_seed: Some(cfg.seed),
                trial_index: Some(rec.index),
                ..Default::default()
            };
            match Certificate::derive(&b, prov) {
                Ok(mut cert) => {
                    // one six-secant line leaves seven exceptional lines for the Le Barz count
                    if cert.six_secant_lines == Some(1) {
                        cert.provenance.adjunction_class = family("i").map(|c| c.to_string());
                    }
                    write_certificate(out, &format!("cert-{}.json", rec.index), &cert)?;
                    certified.push(json!({ "index": rec.index, "accepted": true }));
                }
                Err(e) => certified.push(json!({ "index": rec.index, "accepted": false, "reason": e.to_string() })),
            }
        }
    }
    let summary = json!({
        "config": cfg.record(),
        "trials": cmd.trials,
        "stages": stages,
        "betti_classes": classes,
        "hits": hits.len(),
        "hit_indices": hits.iter().map(|r| r.index).collect::<Vec<_>>(),
        "certified": certified,
        "seconds": start.elapsed().as_secs_f64(),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(true)
}

fn construct2(cmd: &Construct2) -> Result<bool> {
    let cfg = &cmd.config;
    let b1 = cfg.b1()?;
    let mut rng = trial_rng(cfg.seed, 0);
    let a1 = match (&cmd.a1, cmd.target_n) {
        (Some(path), _) => read_matrix(path)?,
        (None, Some(n)) if cmd.random => sample_a1_with_n(&b1, n, &mut rng, 1000)?.0,
        _ => bail!("give --a1 FILE or --random --target-n N"),
    };
    let n = N_invariant(&a1, &b1)?;
    let (fam_dim, codim) = family_dimensions(n);
    println!("N = {n} (family dimension {fam_dim}, codimension {codim})");
    let max_degree = if cfg.p == 3 { 3 } else { 4 };
    match zazb_intersection(&a1, &b1, max_degree) {
        Ok(rep) => println!(
            "r = {} (enumerated {} by residue degree {:?}, Gröbner length {})",
            rep.r(),
            rep.enumerated,
            rep.by_residue_degree,
            rep.groebner_degree
        ),
        Err(e) => println!("r: {e}"),
    }
    let (space, outcomes) = construct2_pipeline(&a1, &b1, &mut rng, cmd.attempts, &cfg.options())?;
    println!("solution space dimension {}", space.dim());
    for (i, o) in outcomes.iter().enumerate() {
        println!("attempt {}: {:?}{}", i + 1, o.stage, o.reason.as_ref().map(|r| format!(" ({r})")).unwrap_or_default());
    }
    let Some(accepted) = outcomes.iter().find(|o| o.stage == Stage::Accepted) else {
        let last = outcomes.last().map(|o| o.stage);
        println!("no accepted surface in {} attempts (last stage {last:?})", cmd.attempts);
        return Ok(false);
    };
    let monad = accepted.monad.as_ref().expect("accepted outcomes carry a monad");
    let class = cmd.class.as_deref().map(parse_class).transpose()?;
    let prov = Provenance {
        construction: "construct2".into(),
        master_seed: Some(cfg.seed),
        trial_index: None,
        a1: Some(a1.to_json()),
        n_invariant: Some(n),
        adjunction_class: class.as_ref().map(|c| c.to_string()),
    };
    let cert = Certificate::derive(&monad.b, prov)?;
    println!("Betti table of B:\n{}", cert.betti_b);
    println!("Hilbert polynomial {}", cert.hilbert_polynomial);
    println!("smoothness: {}", cert.smooth);
    println!("quintic residual {} ({:?} lines)", cert.quintic_residual, cert.six_secant_lines);
    println!(
        "tangent: ker dφ {}, tangent {}, moduli {}",
        cert.tangent.kernel_dim, cert.tangent.tangent_dim, cert.tangent.moduli_dim
    );
    let mut ok = true;
    if let Some(h) = &class {
        let rep = verify_family(h, None, cert.six_secant_lines);
        println!(
            "class {h}: d = {}, π = {}, K² = {}, {} exceptional lines + {:?} six-secants (Le Barz {:?})",
            rep.invariants.degree,
            rep.invariants.sectional_genus,
            rep.invariants.k_squared,
            rep.exceptional_lines,
            rep.six_secants,
            rep.le_barz_ok
        );
        ok &= rep.ok();
    }
    write_certificate(cfg.out_dir()?, "construct2.json", &cert)?;
    Ok(ok)
}

fn run_verify(path: &Path) -> Result<bool> {
    let cert = read_certificate(path)?;
    let rep = verify(&cert)?;
    for c in &rep.checks {
        println!("{:<12} {}  {}", c.stage, if c.ok { "ok" } else { "MISMATCH" }, c.detail.replace('\n', " "));
    }
    match rep.failed_stage() {
        Some(stage) => println!("verification failed at {stage}"),
        None => println!("verified"),
    }
    Ok(rep.passed())
}

fn intersect(cmd: &Intersect) -> Result<bool> {
    let a1 = read_matrix(&cmd.a1)?;
    let b1 = match &cmd.b1 {
        Some(p) => read_matrix(p)?,
        None => match a1.field().p() {
            5 => fixtures::b1_f5(),
            3 => fixtures::b1_f3(),
            p => bail!("no shipped B_1 for p = {p}; pass --b1"),
        },
    };
    let n = N_invariant(&a1, &b1)?;
    let rep = zazb_intersection(&a1, &b1, cmd.max_degree)?;
    println!("N = {n}");
    println!("r = {}", rep.r());
    println!("enumerated {} points, by residue degree {:?}", rep.enumerated, rep.by_residue_degree);
    println!("Gröbner length {}, methods agree: {}", rep.groebner_degree, rep.agree());
    Ok(rep.consistent())
}

fn tangent(path: &Path) -> Result<bool> {
    let cert = read_certificate(path)?;
    let monad = Monad::new(EMatrix::from_json(&cert.b)?, EMatrix::from_json(&cert.a)?)?;
    let r = tangent_dimension(&monad)?;
    println!("{} / {} / {}", r.kernel_dim, r.tangent_dim, r.moduli_dim);
    println!("{}", serde_json::to_string_pretty(&r)?);
    Ok(true)
}

fn adjunction(cmd: &Adjunction) -> Result<bool> {
    let h = parse_class(&cmd.class)?;
    let rep = verify_family(&h, None, cmd.six_secants);
    let inv = &rep.invariants;
    println!("class {h}");
    println!(
        "H² = {}, π = {}, K² = {}, Σb = {}, Σb² = {}, {} points",
        inv.degree, inv.sectional_genus, inv.k_squared, inv.sum_b, inv.sum_b_squared, inv.points
    );
    let chain = adjunction_chain(&h)?;
    for (i, s) in chain.iter().enumerate() {
        println!("step {}: {} (degree {}, genus {})", i + 1, s.class, s.degree, s.genus);
    }
    if let Some(last) = chain.last() {
        println!("chain ends at degree {} after {} steps", last.degree, chain.len());
    }
    println!("exceptional lines {}, six-secants {:?}, Le Barz {:?}", rep.exceptional_lines, rep.six_secants, rep.le_barz_ok);
    if !FAMILIES.iter().any(|f| family(f).as_ref() == Some(&h)) {
        println!("(not one of the listed families)");
    }
    Ok(rep.ok())
}

fn stats(path: &Path) -> Result<bool> {
    let file = fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
    let mut stages: BTreeMap<Stage, usize> = BTreeMap::new();
    let mut kernels: BTreeMap<usize, usize> = BTreeMap::new();
    let mut seeds = std::collections::BTreeSet::new();
    let (mut trials, mut hits) = (0usize, 0usize);
    for line in std::io::BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TrialRecord = serde_json::from_str(&line).context("parsing trial record")?;
        trials += 1;
        hits += is_hit(&rec) as usize;
        seeds.insert(rec.master_seed);
        *stages.entry(rec.stage).or_default() += 1;
        *kernels.entry(rec.kernel_dim).or_default() += 1;
    }
    let summary = json!({
        "trials": trials,
        "master_seeds": seeds,
        "hits": hits,
        "stages": stages,
        "kernel_dims": kernels,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(true)
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    let ok = match &cli.command {
        Command::Construct1(c) => construct1(c)?,
        Command::Construct2(c) => construct2(c)?,
        Command::Verify { path } => run_verify(path)?,
        Command::Intersect(c) => intersect(c)?,
        Command::Tangent { cert } => tangent(cert)?,
        Command::Adjunction(c) => adjunction(c)?,
        Command::Stats { path } => stats(path)?,
    };
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
