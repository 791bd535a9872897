use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use xtower::extraspecial::{builtin_form, ExtraspecialGroup, IsoTag, BUILTIN_NAMES};
use xtower::forms::{trace_form, FormJson, SesquiForm, TraceFormSpec};
use xtower::gf::{is_prime, prime_divisors, GaloisField};
use xtower::tower::{build_tower, derived_for_spec, materialize, DerivedSpec, Start};
use xtower::weil::{configs, Verify, WeilExtension};

use crate::report::RunReport;

/// Failure of a command: usage errors exit with 2, failed verifications with 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Verification(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<xtower::Error> for CliError {
    fn from(e: xtower::Error) -> Self {
        match e {
            xtower::Error::SplitFailure(m) => CliError::Verification(m),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn write_json(path: &Path, value: &impl Serialize, report: &mut RunReport) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    report.artifact(path.to_path_buf());
    Ok(())
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// `all` or `sample:N`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum VerifyArg {
    All,
    Sample(usize),
}

impl fmt::Display for VerifyArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyArg::All => write!(f, "all"),
            VerifyArg::Sample(n) => write!(f, "sample:{n}"),
        }
    }
}

impl FromStr for VerifyArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            return Ok(VerifyArg::All);
        }
        s.strip_prefix("sample:")
            .and_then(|n| n.parse().ok())
            .map(VerifyArg::Sample)
            .ok_or_else(|| format!("expected `all` or `sample:N`, got {s:?}"))
    }
}

pub fn field_info(p: u32, deg: u32, report: &mut RunReport) -> CliResult<()> {
    report.param("p", p).param("deg", deg);
    let f = GaloisField::new(p, deg)?;
    println!("field {} of order {}", f.name(), f.order());
    println!("modulus (low to high): {:?}", f.modulus());
    println!("canonical generator: {}", f.format(f.generator()));
    if deg == 1 {
        println!("automorphisms: trivial automorphism group");
    } else {
        println!("automorphisms: cyclic of order {deg}, generated by x -> x^{p}");
    }
    match f.involution() {
        Some(eta) => println!("involution: x -> x^{}", (p as u64).pow(eta.power)),
        None => println!("involution: none"),
    }
    let q1 = f.order() as u64 - 1;
    for l in prime_divisors(q1) {
        let eps = f.primitive_root_of_unity(l)?;
        let inv = f
            .inverting_automorphism(eps)
            .map_or("none".to_string(), |a| {
                format!("x -> x^{}", (p as u64).pow(a.power))
            });
        println!(
            "epsilon of order {l}: {}; automorphism inverting it: {inv}",
            f.format(eps)
        );
        report.check(f.element_order(eps) == Some(l));
    }
    Ok(())
}

pub fn field_gauss(p: u32, target: &str, report: &mut RunReport) -> CliResult<()> {
    report.param("p", p).param("target-field", target);
    if p == 2 || !is_prime(p as u64) {
        return Err(CliError::Usage(format!("p must be an odd prime, got {p}")));
    }
    let k = GaloisField::from_name(target)?;
    if k.p() == p {
        return Err(CliError::Usage(
            "the target field must have characteristic different from p".into(),
        ));
    }
    let fp = GaloisField::prime(p)?;
    let eps = k.primitive_root_of_unity(p as u64)?;
    let theta = k.gauss_sum(p, eps, 1)?;
    let chi_m1 = fp.quadratic_character(fp.from_int(-1))?;
    let theta2 = k.mul(theta, theta);
    let rhs = k.mul(k.sign(chi_m1), k.from_int(p as i64));
    let mut ok = theta2 == rhs;
    for z in 1..p {
        let chi = fp.quadratic_character(fp.from_int(z as i64))?;
        ok &= k.gauss_sum(p, eps, z)? == k.mul(k.sign(chi), theta);
    }
    println!("epsilon = {} (order {p}) in {}", k.format(eps), k.name());
    print!(
        "theta={}, theta^2={}, chi(-1)p={}",
        k.format(theta),
        k.format(theta2),
        k.format(rhs)
    );
    if let Some(eta) = k.inverting_automorphism(eps) {
        let conj = eta.apply(&k, theta);
        let expect = k.mul(k.sign(chi_m1), theta);
        ok &= conj == expect;
        print!(", theta^eta'={}", k.format(conj));
    }
    println!(", {}", pass(ok));
    report.check(ok);
    Ok(())
}

pub fn es_classify(
    form: Option<&Path>,
    builtin: Option<&str>,
    report: &mut RunReport,
) -> CliResult<()> {
    let form = match (form, builtin) {
        (Some(path), None) => {
            report.param("form", path.display());
            let json: FormJson = serde_json::from_str(&fs::read_to_string(path)?)?;
            SesquiForm::from_json(&json)?
        }
        (None, Some(name)) => {
            report.param("builtin", name);
            builtin_form(name).map_err(|_| {
                CliError::Usage(format!(
                    "unknown builtin {name:?}; available: {}",
                    BUILTIN_NAMES.join(", ")
                ))
            })?
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --form or --builtin".into(),
            ))
        }
    };
    let form = if form.field().is_prime_field() {
        form
    } else {
        trace_form(&TraceFormSpec::canonical(form))?
    };
    let group = ExtraspecialGroup::new(form)?;
    let iso = group.classify()?;
    if group.p() == 2 {
        let n = group.n();
        let shape = match iso.tag {
            IsoTag::Dn => "D^n",
            IsoTag::Dn1Q => "D^{n-1}Q",
            IsoTag::En => "E^n",
        };
        let count = group.isotropic_count();
        println!("{iso} ({shape}, n={n}), isotropic count {count}");
        let big = 1u64 << (n - 1);
        let expected = if iso.tag == IsoTag::Dn {
            big * ((1 << n) + 1)
        } else {
            big * ((1 << n) - 1)
        };
        report.check(count == expected);
    } else {
        println!("{iso}, exponent {}", group.p());
    }
    report.check(true);
    Ok(())
}

#[derive(Clone, Debug)]
pub struct WeilArgs {
    pub case: String,
    pub p: u32,
    pub n: usize,
    pub w_dim: usize,
    pub d: usize,
    pub k: Option<String>,
    pub rep_field: Option<String>,
    pub verify: VerifyArg,
    pub cap: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub with_s_prime: bool,
    pub semidirect: bool,
}

pub fn weil_extend(a: &WeilArgs, report: &mut RunReport) -> CliResult<()> {
    report
        .param("case", &a.case)
        .param("verify", a.verify)
        .param("seed", a.seed);
    let ext: WeilExtension = match a.case.as_str() {
        "symplectic" => {
            let rf = GaloisField::from_name(a.rep_field.as_deref().unwrap_or("p2r2"))?;
            report
                .param("p", a.p)
                .param("n", a.n)
                .param("rep-field", rf.name());
            configs::symplectic(a.p, a.n, &rf, a.cap)?
        }
        "gl" | "hyperbolic" => {
            let k = GaloisField::from_name(a.k.as_deref().unwrap_or("p2r1"))?;
            let rf = GaloisField::from_name(a.rep_field.as_deref().unwrap_or("p3r1"))?;
            report
                .param("w-dim", a.w_dim)
                .param("k", k.name())
                .param("rep-field", rf.name());
            configs::hyperbolic(&k, a.w_dim, &rf, a.cap)?
        }
        "unitary" => {
            let k = GaloisField::from_name(a.k.as_deref().unwrap_or("p2r2"))?;
            let rf = GaloisField::from_name(a.rep_field.as_deref().unwrap_or("p3r1"))?;
            report
                .param("d", a.d)
                .param("k", k.name())
                .param("rep-field", rf.name());
            configs::unitary(&k, a.d, &rf, a.cap)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown case {other:?} (symplectic, gl, unitary)"
            )))
        }
    };
    let rep = ext.setup().rep();
    println!(
        "case {}: |G| = {}, E(f) of type {} over F_{}, representation of degree {} over {}",
        ext.setup().case().name(),
        ext.order(),
        rep.group().classify()?,
        rep.group().p(),
        rep.degree(),
        rep.field().name()
    );
    let verify = match a.verify {
        VerifyArg::All => Verify::All,
        VerifyArg::Sample(count) => Verify::Sample {
            count,
            seed: a.seed,
        },
    };
    let pairs = ext.pairs(verify);
    let space = (rep.group().p() as u64).pow(rep.group().dim() as u32);
    let radical = rep.group().dim() <= 6;
    let pr = ext.verify_pairs(&pairs, radical);
    println!(
        "pairs: {}/{} {} (split {}, sigma {}, mu {}, dimension {}, radical {}{} failures)",
        pr.checked - pr.failed_pairs,
        pr.checked,
        pass(pr.failed_pairs == 0),
        pr.split_failures,
        pr.sigma_failures,
        pr.mu_failures,
        pr.dimension_failures,
        pr.radical_failures,
        if radical {
            ""
        } else {
            " [radical check skipped above dimension 6]"
        }
    );
    report.checks(pr.checked as u64, pr.failed_pairs as u64);
    let er = ext.verify_elements(if space <= 4096 { 1 } else { 0 })?;
    println!(
        "elements: {}/{} {} (conjugation {}, form {}, mu symmetry {}, audit {}, sigma identities {} failures)",
        er.checked - er.failed_elements,
        er.checked,
        pass(er.failed_elements == 0),
        er.conjugation_failures,
        er.form_failures,
        er.eta_symmetry_failures,
        er.audit_failures,
        er.sigma_identity_failures
    );
    report.checks(er.checked as u64, er.failed_elements as u64);
    if ext.mu_is_trivial() {
        println!("note: mu is identically 1 in {}", rep.field().name());
    }
    if a.semidirect {
        let semi = match a.verify {
            VerifyArg::All => Verify::All,
            VerifyArg::Sample(count) => Verify::Sample {
                count,
                seed: a.seed,
            },
        };
        let bad = ext.verify_semidirect(semi)?;
        let total = match semi {
            Verify::All => (ext.order() * rep.group().order().unwrap_or(0) as usize).pow(2),
            Verify::Sample { count, .. } => count,
        };
        println!(
            "semidirect product: {}/{} {}",
            total - bad,
            total,
            pass(bad == 0)
        );
        report.checks(total as u64, bad as u64);
    }
    if let Some(path) = &a.out {
        write_json(
            path,
            &ext.to_json(a.with_s_prime, pr.checked - pr.failed_pairs),
            report,
        )?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn tower_build(
    start: &str,
    levels: usize,
    cap: u64,
    out: Option<&Path>,
    report: &mut RunReport,
) -> CliResult<()> {
    report
        .param("start", start)
        .param("levels", levels)
        .param("cap", cap);
    let start: Start = start.parse()?;
    let tower = build_tower(&start, levels, cap)?;
    println!("base: {} of order {}", tower.base.name, tower.base.order);
    for l in &tower.levels {
        println!(
            "level {}: {} over F_{}, order {}^{}, {}{}",
            l.index,
            l.type_name(),
            l.prime,
            l.prime,
            l.order_exponent(),
            l.split_case.name(),
            if l.is_concrete() { ", concrete" } else { "" }
        );
    }
    println!("total order: {}", tower.total_order_string());
    report.check(true);
    if let Some(path) = out {
        write_json(path, &tower.to_json(), report)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn tower_materialize(
    start: &str,
    depth: usize,
    samples: usize,
    seed: u64,
    report: &mut RunReport,
) -> CliResult<()> {
    report
        .param("start", start)
        .param("depth", depth)
        .param("samples", samples)
        .param("seed", seed);
    let start: Start = start.parse()?;
    let tower = build_tower(&start, depth, xtower::tower::DEFAULT_DEGREE_CAP)?;
    let mt = materialize(&tower, depth)?;
    println!("materialized depth {depth}: order {}", mt.order());
    let bad = mt.verify_associativity(samples, seed);
    println!(
        "associativity: {}/{samples} {}",
        samples - bad,
        pass(bad == 0)
    );
    report.checks(samples as u64, bad as u64);
    let structural = samples.min(200);
    let bad = mt.verify_structure(structural, seed ^ 1)?;
    println!(
        "inverses, layer normality, action isometries: {} failures over {structural} samples, {}",
        bad,
        pass(bad == 0)
    );
    report.checks(structural as u64, bad as u64);
    Ok(())
}

pub fn tower_derived(spec: &str, cap: usize, report: &mut RunReport) -> CliResult<()> {
    report.param("spec", spec).param("cap", cap);
    let parsed: DerivedSpec = spec.parse()?;
    let r = derived_for_spec(&parsed, cap)?;
    let orders: Vec<String> = r.orders.iter().map(usize::to_string).collect();
    println!("derived series orders: {}", orders.join(" > "));
    println!("derived length {}", r.derived_length);
    if let Some(ok) = r.layered {
        println!("every term is a layer subgroup: {}", pass(ok));
        report.check(ok);
    } else {
        report.check(true);
    }
    Ok(())
}
