use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use dhss::field::{parse_modulus, FieldCtx};
use dhss::gpn::{gpn_analyze, gpn_attack_system, SecretVerdict, EXAMPLE_1, EXAMPLE_2};
use dhss::io::{bulletin_from_json, bulletin_to_json, share_from_json, share_in_field, share_to_json};
use dhss::oracle::{perfectness_sweep, OracleError};
use dhss::scheme::{deal_with, reconstruct, unauthorized_reason, AlphaMode, Bulletin, Quorum};
use dhss::AccessStructure;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::{CombineArgs, Command, DealArgs, Determinism, GpnArgs, GpnCase, InspectArgs, PerfectnessArgs};

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Unauthorized(String),
    Guard(String),
    SweepFailed,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Unauthorized(_) => 2,
            CliError::Guard(_) => 3,
            CliError::SweepFailed => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "{m}"),
            CliError::Unauthorized(m) => write!(f, "unauthorized: {m}"),
            CliError::Guard(m) => write!(f, "{m}"),
            CliError::SweepFailed => write!(f, "perfectness sweep found a counterexample"),
        }
    }
}

fn invalid(e: impl fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

pub fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Deal(a) => cmd_deal(a),
        Command::Combine(a) => cmd_combine(a),
        Command::Inspect(a) => cmd_inspect(a),
        Command::GpnDemo(a) => cmd_gpn_demo(a),
        Command::PerfectnessCheck(a) => cmd_perfectness(a),
    }
}

fn rng_for(d: &Determinism) -> Result<Box<dyn RngCore>, CliError> {
    match d.seed {
        Some(_) if !d.insecure_deterministic => {
            Err(invalid("refusing --seed without --insecure-deterministic"))
        }
        Some(seed) => {
            eprintln!("WARNING: insecure deterministic mode, every output is reproducible from the seed");
            Ok(Box::new(ChaCha20Rng::seed_from_u64(seed)))
        }
        None => Ok(Box::new(ChaCha20Rng::from_entropy())),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn structure(levels: &[usize], thresholds: &[usize], modulus: &str) -> Result<(AccessStructure, FieldCtx), CliError> {
    let st = AccessStructure::new(levels.to_vec(), thresholds.to_vec()).map_err(invalid)?;
    let p = parse_modulus(modulus).map_err(invalid)?;
    let ctx = st.validate(&p).map_err(invalid)?;
    Ok((st, ctx))
}

fn cmd_deal(a: DealArgs) -> Result<(), CliError> {
    let (st, ctx) = structure(&a.levels, &a.thresholds, &a.modulus)?;
    let mut rng = rng_for(&a.determinism)?;
    let (secret, generated) = match &a.secret {
        Some(h) => (ctx.from_hex(h).map_err(invalid)?, false),
        None => (ctx.random(&mut rng).map_err(invalid)?, true),
    };
    let mode = if a.random_alphas { AlphaMode::RandomDistinct } else { AlphaMode::Sequential };
    let (shares, bulletin) = deal_with(&st, &secret, &mut rng, mode).map_err(invalid)?;

    fs::create_dir_all(&a.out_dir).map_err(|e| invalid(format!("{}: {e}", a.out_dir.display())))?;
    write(&a.out_dir.join("bulletin.json"), &bulletin_to_json(&bulletin))?;
    for (i, s) in shares.iter() {
        write(&a.out_dir.join(format!("share-{i}.json")), &share_to_json(&ctx, i, s))?;
    }

    if generated {
        println!("secret: {}", secret.to_hex());
    }
    println!("shares: {} files in {}", shares.len(), a.out_dir.display());
    print!("{}", summary(&bulletin));
    Ok(())
}

fn summary(b: &Bulletin) -> String {
    let st = &b.structure;
    let mut out = format!(
        "bulletin: {} alphas, {} r-values, I-table entries per level [",
        b.alphas.len(),
        b.r_values.len()
    );
    let mut counts: Vec<String> = b.i_tables.iter().map(|t| t.len().to_string()).collect();
    counts.push(b.i_table_m.len().to_string());
    out.push_str(&counts.join(", "));
    out.push_str(&format!("] for levels {:?}, thresholds {:?}\n", st.level_sizes(), st.thresholds()));
    out
}

fn cmd_combine(a: CombineArgs) -> Result<(), CliError> {
    let bulletin =
        bulletin_from_json(&read(&a.bulletin)?).map_err(|e| invalid(format!("{}: {e}", a.bulletin.display())))?;
    let mut members = Vec::with_capacity(a.shares.len());
    let mut seen = BTreeSet::new();
    for path in &a.shares {
        let rec = share_from_json(&read(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        let value = share_in_field(&rec, &bulletin.ctx).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        if !seen.insert(rec.index) {
            return Err(invalid(format!("duplicate index {} ({})", rec.index, path.display())));
        }
        members.push((rec.index, value));
    }
    let st = &bulletin.structure;
    let indices: Vec<usize> = members.iter().map(|(i, _)| *i).collect();
    if !st.is_authorized(&indices).map_err(invalid)? {
        return Err(CliError::Unauthorized(unauthorized_reason(st, &indices)));
    }
    let quorum = Quorum::new(members).map_err(invalid)?;
    let secret = reconstruct(st, &bulletin, &quorum).map_err(invalid)?;
    println!("{}", secret.to_hex());
    Ok(())
}

fn cmd_inspect(a: InspectArgs) -> Result<(), CliError> {
    let b = bulletin_from_json(&read(&a.bulletin)?).map_err(|e| invalid(format!("{}: {e}", a.bulletin.display())))?;
    let st = &b.structure;
    println!("modulus     {} (0x{}, {} bits)", b.ctx.modulus(), b.ctx.modulus_hex(), b.ctx.bits());
    println!("family      {}", b.family_id);
    println!("levels      {:?} (n = {})", st.level_sizes(), st.participants());
    println!("thresholds  {:?}", st.thresholds());
    for l in 1..st.levels() {
        println!("level {l}: alpha = {}, r = {}", b.alphas[l - 1], b.r_values[l - 1]);
        for (i, v) in &b.i_tables[l - 1] {
            println!("  I_{i}^({l}) = {v}");
        }
    }
    let m = st.levels();
    for (i, v) in &b.i_table_m {
        println!("  I_{i}^({m}) = {v}");
    }
    Ok(())
}

fn cmd_gpn_demo(a: GpnArgs) -> Result<(), CliError> {
    let system = match a.case {
        GpnCase::Example1 => EXAMPLE_1.system(),
        GpnCase::Example2 => EXAMPLE_2.system(),
        GpnCase::Custom => {
            let need = |v: Option<usize>, name: &str| v.ok_or_else(|| invalid(format!("custom demo needs --{name}")));
            let modulus = a.modulus.as_deref().ok_or_else(|| invalid("custom demo needs --modulus"))?;
            let ctx = FieldCtx::new(parse_modulus(modulus).map_err(invalid)?).map_err(invalid)?;
            let xs: Vec<_> = a.abscissae.iter().map(|&x| ctx.elem(x)).collect();
            gpn_attack_system(&ctx, &xs, need(a.n1, "n1")?, need(a.t1, "t1")?, need(a.t2, "t2")?, &a.coalition)
                .map_err(invalid)?
        }
    };
    let report = gpn_analyze(&system).map_err(invalid)?;
    print!("{}", report.render());
    if let SecretVerdict::Determined(_) = report.verdict {
        println!("the coalition recovers s without solving for the polynomials");
    }
    Ok(())
}

fn cmd_perfectness(a: PerfectnessArgs) -> Result<(), CliError> {
    let st = AccessStructure::new(a.levels.clone(), a.thresholds.clone()).map_err(invalid)?;
    let p = parse_modulus(&a.modulus).map_err(invalid)?;
    let seed = rng_for(&a.determinism)?.next_u64();
    let report = match perfectness_sweep(&st, &p, seed) {
        Ok(r) => r,
        Err(OracleError::GuardExceeded(m)) => return Err(CliError::Guard(m)),
        Err(e) => return Err(invalid(e)),
    };
    if a.json {
        println!("{}", report.to_json());
    } else {
        print!("{report}");
    }
    if report.passed {
        Ok(())
    } else {
        Err(CliError::SweepFailed)
    }
}
