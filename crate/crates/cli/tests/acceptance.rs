//! Acceptance checks: one PASS/FAIL line per criterion, with its time budget.
//!
//! Runs without the libtest harness so the lines always print; exits non-zero if any fails.

use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde_json::Value;
use xtower::extraspecial::{builtin_form, ExtraspecialGroup, IsoTag};
use xtower::gf::{is_prime, GaloisField};
use xtower::reps::{rho_base, tensor_rep, BaseKind, MatrixRep};
use xtower::tower::{derived_for_spec, DerivedSpec};
use xtower::weil::{configs, PairReport, Verify, WeilExtension};

const CAP: usize = 1_000_000;

type Check = Result<String, String>;

/// Number, name, time budget in seconds, and the check itself.
type Criterion = (u32, &'static str, u64, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn lib<T>(r: xtower::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Gauss sums for p in {3, 5, 7} over every field of order at most 121 containing a p-th root of 1.
fn gauss_sums() -> Check {
    let mut fields = 0;
    for p in [3u32, 5, 7] {
        let fp = lib(GaloisField::prime(p))?;
        let chi_m1 = lib(fp.quadratic_character(fp.from_int(-1)))?;
        for l in (2u32..=121).filter(|&l| l != p && is_prime(l as u64)) {
            let mut q = l;
            let mut r = 1;
            while q <= 121 {
                if (q - 1) % p == 0 {
                    let k = lib(GaloisField::new(l, r))?;
                    let eps = lib(k.primitive_root_of_unity(p as u64))?;
                    let theta = lib(k.gauss_sum(p, eps, 1))?;
                    let target = k.mul(k.sign(chi_m1), k.from_int(p as i64));
                    ensure(
                        k.mul(theta, theta) == target,
                        format!("theta^2 != chi(-1)p for p={p} over {}", k.name()),
                    )?;
                    for z in 1..p {
                        let chi = lib(fp.quadratic_character(fp.from_int(z as i64)))?;
                        ensure(
                            lib(k.gauss_sum(p, eps, z))? == k.mul(k.sign(chi), theta),
                            format!("theta({z}) != chi({z}) theta for p={p} over {}", k.name()),
                        )?;
                    }
                    if let Some(eta) = k.inverting_automorphism(eps) {
                        ensure(
                            eta.apply(&k, theta) == k.mul(k.sign(chi_m1), theta),
                            format!("theta^eta' != chi(-1) theta for p={p} over {}", k.name()),
                        )?;
                    }
                    fields += 1;
                }
                q *= l;
                r += 1;
            }
        }
    }
    Ok(format!("{fields} (p, K') combinations"))
}

/// Isotropic counts and an order-2 census for the builtin F_2 forms of dimension at most 6.
fn classification_counts() -> Check {
    for name in ["fD", "fQ", "D2", "DQ", "D3", "D2Q"] {
        let group = lib(ExtraspecialGroup::new(lib(builtin_form(name))?))?;
        let n = group.n() as u32;
        let iso = lib(group.classify())?;
        let plus = (1u64 << (n - 1)) * ((1 << n) + 1);
        let minus = (1u64 << (n - 1)) * ((1 << n) - 1);
        let count = group.isotropic_count();
        let expected = if iso.tag == IsoTag::Dn { plus } else { minus };
        ensure(
            count == expected,
            format!("{name}: isotropic count {count}, expected {expected}"),
        )?;
        // Elements of order at most 2, counted by squaring every group element.
        let involutions = lib(group.elements(CAP))?
            .iter()
            .filter(|g| group.mul(g, g).is_identity())
            .count() as u64;
        let oracle = if involutions == 2 * plus {
            IsoTag::Dn
        } else if involutions == 2 * minus {
            IsoTag::Dn1Q
        } else {
            return Err(format!(
                "{name}: {involutions} elements of order <= 2 fits neither type"
            ));
        };
        ensure(
            oracle == iso.tag,
            format!("{name}: classified {iso}, census says {oracle:?}"),
        )?;
    }
    Ok("6 forms".into())
}

fn exhaustive(rep: &MatrixRep, label: &str) -> Result<(), String> {
    let bad = lib(rep.verify_exhaustive(CAP))?;
    ensure(bad == 0, format!("{label}: {bad} failing pairs"))?;
    let (rank, count) = lib(rep.linear_independence_rank(CAP))?;
    ensure(
        rank == count,
        format!("{label}: rho(x, 0) span rank {rank} of {count}"),
    )
}

fn representations() -> Check {
    let f3: Arc<GaloisField> = lib(GaloisField::prime(3))?;
    let f4 = lib(GaloisField::new(2, 2))?;
    let e = lib(rho_base(BaseKind::E(3), &f4))?;
    let d = lib(rho_base(BaseKind::D, &f3))?;
    let q = lib(rho_base(BaseKind::Q, &f3))?;
    exhaustive(&e, "rho_E")?;
    exhaustive(&d, "rho_D")?;
    exhaustive(&q, "rho_Q")?;
    exhaustive(&lib(tensor_rep(&[d, q]))?, "rho_D x rho_Q")?;
    exhaustive(&lib(tensor_rep(&[e.clone(), e]))?, "rho_E x rho_E")?;
    Ok("5 representations".into())
}

fn sp2f3() -> Result<WeilExtension, String> {
    lib(configs::symplectic(
        3,
        1,
        &lib(GaloisField::new(2, 2))?,
        CAP,
    ))
}

fn sweep(ext: &WeilExtension, verify: Verify) -> PairReport {
    ext.verify_pairs(&ext.pairs(verify), true)
}

fn dual_path_sigma() -> Check {
    let ext = sp2f3()?;
    let r = sweep(&ext, Verify::All);
    ensure(
        r.checked == 576,
        format!("{} pairs, expected 576", r.checked),
    )?;
    ensure(
        r.sigma_failures == 0,
        format!("{} sigma mismatches", r.sigma_failures),
    )?;
    let e = lib(ext.verify_elements(1))?;
    ensure(
        e.sigma_identity_failures == 0,
        format!("{} sigma identity failures", e.sigma_identity_failures),
    )?;
    Ok(format!("{} pairs, {} elements", r.checked, e.checked))
}

fn symplectic_splitting() -> Check {
    let ext = sp2f3()?;
    let r = sweep(&ext, Verify::All);
    ensure(r.mu_failures + r.split_failures == 0, format!("{r:?}"))?;
    let e = lib(ext.verify_elements(1))?;
    ensure(
        e.eta_symmetry_failures == 0,
        format!("{} mu symmetry failures", e.eta_symmetry_failures),
    )?;
    ensure(
        e.form_failures == 0,
        format!("{} elements do not preserve J", e.form_failures),
    )?;
    let bad = lib(ext.verify_semidirect(Verify::All))?;
    ensure(bad == 0, format!("{bad} semidirect pairs fail"))?;
    Ok(format!("{} pairs, 648x648 semidirect pairs", r.checked))
}

fn hyperbolic_splitting() -> Check {
    let ext = lib(configs::hyperbolic(
        &lib(GaloisField::prime(2))?,
        2,
        &lib(GaloisField::prime(3))?,
        CAP,
    ))?;
    let r = sweep(&ext, Verify::All);
    ensure(r.checked == 36, format!("{} pairs, expected 36", r.checked))?;
    ensure(
        r.mu_failures + r.split_failures + r.sigma_failures == 0,
        format!("{r:?}"),
    )?;
    Ok("36 pairs".into())
}

fn unitary_splitting() -> Check {
    let ext = lib(configs::unitary(
        &lib(GaloisField::new(2, 2))?,
        3,
        &lib(GaloisField::prime(3))?,
        CAP,
    ))?;
    ensure(ext.order() == 648, format!("|GU_3(2)| = {}", ext.order()))?;
    ensure(
        ext.setup().rep().degree() == 8,
        "representation degree is not 8",
    )?;
    let r = sweep(
        &ext,
        Verify::Sample {
            count: 10_000,
            seed: 0,
        },
    );
    ensure(r.checked >= 10_000, format!("only {} pairs", r.checked))?;
    ensure(
        r.mu_failures + r.split_failures + r.sigma_failures == 0,
        format!("{r:?}"),
    )?;
    Ok(format!("{} sampled pairs", r.checked))
}

fn dimension_identity() -> Check {
    let f2 = lib(GaloisField::prime(2))?;
    let f3 = lib(GaloisField::prime(3))?;
    let f4 = lib(GaloisField::new(2, 2))?;
    let runs = [
        (sp2f3()?, Verify::All),
        (lib(configs::hyperbolic(&f2, 2, &f3, CAP))?, Verify::All),
        (
            lib(configs::unitary(&f4, 3, &f3, CAP))?,
            Verify::Sample {
                count: 10_000,
                seed: 0,
            },
        ),
    ];
    let mut checked = 0;
    for (ext, verify) in &runs {
        let r = sweep(ext, *verify);
        ensure(
            r.dimension_failures == 0,
            format!("{} dimension failures", r.dimension_failures),
        )?;
        ensure(
            r.radical_failures == 0,
            format!("{} radical mismatches", r.radical_failures),
        )?;
        checked += r.checked;
    }
    Ok(format!("{checked} pairs, radicals brute-forced"))
}

fn run_cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_xtower"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(
        out.status.success(),
        format!("xtower {args:?} exited with {}", out.status),
    )?;
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn tower_reproduction() -> Check {
    let path = std::env::temp_dir().join(format!("xtower-acceptance-{}.json", std::process::id()));
    let path_str = path.to_string_lossy().into_owned();
    run_cli(&[
        "tower", "build", "--start", "sp2f3", "--levels", "5", "--out", &path_str,
    ])?;
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let _ = std::fs::remove_file(&path);
    let json: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let levels = json.as_array().ok_or("tower.json is not an array")?;
    let two80 = 1u128 << 80;
    let expected = [
        ("E^1", 3, "3".to_string()),
        ("D^2Q", 2, "7".to_string()),
        ("E^4", 3, "9".to_string()),
        ("D^80Q", 2, "163".to_string()),
        (&*format!("E^{two80}"), 3, (2 * two80 + 1).to_string()),
    ]
    .map(|(t, p, e)| (t.to_string(), p, e));
    ensure(levels.len() == 5, format!("{} levels", levels.len()))?;
    for (level, (iso, p, exp)) in levels.iter().zip(&expected) {
        let got = (
            level["iso_type"].as_str().unwrap_or_default(),
            level["order"]["p"].as_u64().unwrap_or(0),
            level["order"]["exponent"].as_str().unwrap_or_default(),
        );
        ensure(
            got == (iso.as_str(), *p, exp.as_str()),
            format!(
                "level {}: got {got:?}, expected ({iso}, {p}, {exp})",
                level["index"]
            ),
        )?;
    }
    let gl = run_cli(&["tower", "build", "--start", "gl2f3", "--levels", "3"])?;
    ensure(
        gl.contains("total order: 2^11 * 3^13"),
        format!("gl2f3 prefix output:\n{gl}"),
    )?;
    Ok("E, Q^3, E^4, Q^81, E^(2^80); gl2f3 total 2^11 * 3^13".into())
}

fn derived_length() -> Check {
    let top = lib(derived_for_spec(
        &lib("gl2f3".parse::<DerivedSpec>())?,
        2_000_000,
    ))?;
    ensure(
        top.orders.first() == Some(&48),
        format!("|GL_2(F_3)| = {:?}", top.orders.first()),
    )?;
    ensure(
        top.derived_length == 4,
        format!("GL_2(F_3) derived length {}", top.derived_length),
    )?;
    let ext = lib(derived_for_spec(
        &lib("gl2f3-e27".parse::<DerivedSpec>())?,
        2_000_000,
    ))?;
    ensure(
        ext.orders.first() == Some(&1296),
        format!("order {:?}", ext.orders.first()),
    )?;
    ensure(
        ext.derived_length == 6,
        format!("derived length {}", ext.derived_length),
    )?;
    ensure(
        ext.layered == Some(true),
        "a derived term is not a layer subgroup",
    )?;
    Ok(format!("lengths 4 and 6, orders {:?}", ext.orders))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "Gauss-sum identities", 1, gauss_sums),
        (2, "classification counts", 1, classification_counts),
        (3, "representation homomorphisms", 5, representations),
        (4, "dual-path sigma", 10, dual_path_sigma),
        (5, "symplectic splitting", 30, symplectic_splitting),
        (6, "hyperbolic splitting", 5, hyperbolic_splitting),
        (7, "unitary splitting", 300, unitary_splitting),
        (8, "dimension identity", 300, dimension_identity),
        (9, "tower reproduction", 10, tower_reproduction),
        (10, "derived length", 120, derived_length),
    ];
    let mut failed = 0;
    for (n, name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(budget) => Err(format!(
                "{detail}, but took {elapsed:.2?} (budget {budget} s)"
            )),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {n:>2} {name}: {detail} [{elapsed:.2?}]"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {n:>2} {name}: {why} [{elapsed:.2?}]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 10 criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
