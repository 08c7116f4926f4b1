//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so every line is printed; exits non-zero on any failure.

mod common;

use std::time::{Duration, Instant};

use mpsym::catalog::{self, Family, FamilySpec};
use mpsym::cycles::{enumerate_cycles, ConcatMode, CycleCertificate, TripleOperator};
use mpsym::ghz::{ghz_transport_ops, GhzBranch};
use mpsym::linalg::{c64, hadamard, p_mat, prop_check, sigma1, CMatrix, C64, ONE};
use mpsym::mps::{build_state, fiducial_state, ScalarMode};
use mpsym::oracle::{exhaustive_small_cycles, same_cycle_sets, verify_certificate};
use mpsym::slocc::{chi, equivalence_witness, slocc_equivalent, three_tangle, ExtendedComplex};
use mpsym::symmetries::{
    aklt_s_of_x, aklt_triple, cluster_stabilizer, ghz_symmetries, injective_symmetry, verify_symmetry, w_branch,
    w_symmetries, Parametrized,
};
use mpsym::transforms::{decide_transform, injective_to_any, injective_to_any_dressed};
use mpsym::Error;

const STRICT_TOL: f64 = 1e-9;
const SCALAR_TOL: f64 = 1e-8;
const TOL: f64 = 1e-10;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e(err: Error) -> String {
    err.to_string()
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("{what} took {t:?}, limit {limit:?}"))
}

fn strict_residual(cert: &CycleCertificate, a: &mpsym::Rank3Tensor) -> Result<f64, String> {
    let p = verify_symmetry(cert, a, cert.n(), STRICT_TOL).map_err(e)?;
    ensure(p.proportional, format!("strict verification failed, residual {:.3e}", p.residual))?;
    Ok(p.residual)
}

fn c1_cluster_count() -> Check {
    let start = Instant::now();
    let cluster = catalog::ghz_b(&hadamard()).map_err(e)?;
    let mut worst: f64 = 0.0;
    for (n, expect) in [(5, 32), (6, 64)] {
        let certs = cluster_stabilizer(n, TOL).map_err(e)?;
        ensure(certs.len() == expect, format!("N={n}: {} certificates, expected {expect}", certs.len()))?;
        for c in &certs {
            worst = worst.max(strict_residual(c, &cluster)?);
        }
        ensure(worst <= STRICT_TOL, format!("residual {worst:.3e}"))?;
    }
    within(start, Duration::from_secs(2), "cluster stabilizer")?;
    Ok(format!("32 and 64 certificates, worst residual {worst:.1e}, {:?}", start.elapsed()))
}

fn c2_ghz_generic() -> Check {
    let mut r = common::rng(2);
    let mut worst: f64 = 0.0;
    for trial in 0..20 {
        let b = common::generic_b(&mut r);
        let a = catalog::ghz_b(&b).map_err(e)?;
        let expect = &sigma1() * &p_mat(b[(1, 1)] / b[(0, 0)]);
        for n in [5, 6] {
            let sol = ghz_symmetries(&b, n, TOL).map_err(e)?;
            let nontrivial: Vec<&CycleCertificate> = sol
                .certificates
                .iter()
                .filter(|c| !c.site_ops.iter().all(|g| prop_check(g.as_slice(), CMatrix::identity(2).as_slice(), 1e-9).proportional))
                .collect();
            ensure(nontrivial.len() == 1, format!("trial {trial}, N={n}: {} nontrivial symmetries", nontrivial.len()))?;
            let cert = nontrivial[0];
            ensure(
                cert.site_ops.iter().all(|g| prop_check(g.as_slice(), expect.as_slice(), 1e-9).proportional),
                format!("trial {trial}, N={n}: symmetry differs from (s1 P)^N"),
            )?;
            worst = worst.max(strict_residual(cert, &a)?);
        }
    }
    Ok(format!("20 random b, one nontrivial symmetry each at N=5,6, worst residual {worst:.1e}"))
}

fn c3_injectivity_table() -> Check {
    let start = Instant::now();
    let mut r = common::rng(3);
    let cases: Vec<(&str, mpsym::Rank3Tensor, Option<usize>)> = vec![
        ("generic GHZ_b", catalog::ghz_b(&common::generic_b(&mut r)).map_err(e)?, Some(2)),
        ("chi=0 GHZ_b", catalog::ghz_b(&CMatrix::real(&[&[1.0, 1.0], &[1.0, 0.0]])).map_err(e)?, Some(3)),
        ("W", catalog::w_b(&CMatrix::identity(2)).map_err(e)?, Some(2)),
        ("VB", catalog::vb(), Some(1)),
        ("AKLT", catalog::aklt(), Some(2)),
        ("GHZ", catalog::ghz_b(&CMatrix::identity(2)).map_err(e)?, None),
    ];
    let mut row = Vec::new();
    for (name, a, expect) in cases {
        let rep = mpsym::mps::injectivity_length_tol(&a, 56, TOL);
        ensure(rep.injectivity_length == expect, format!("{name}: L = {:?}, expected {expect:?}", rep.injectivity_length))?;
        if expect.is_none() {
            ensure(rep.searched_up_to == 56, format!("{name}: searched only to {}", rep.searched_up_to))?;
        }
        row.push(format!("{name}={}", expect.map_or("none".to_string(), |l| l.to_string())));
    }
    within(start, Duration::from_secs(1), "injectivity table")?;
    Ok(row.join(", "))
}

fn c4_slocc_law() -> Check {
    let b2 = CMatrix::real(&[&[2.0, 1.0], &[1.0, 1.0]]);
    let b2alt = CMatrix::real(&[&[1.0, 1.0], &[1.0, 2.0]]);
    let b_half = CMatrix::real(&[&[1.0, 2.0], &[1.0, 1.0]]);
    let b3 = CMatrix::real(&[&[3.0, 1.0], &[1.0, 1.0]]);
    let chi_of = |b: &CMatrix| chi(b, TOL).map_err(e);
    ensure(chi_of(&b2)? == ExtendedComplex::Finite(C64::from(2.0)), "chi(b2) != 2")?;
    ensure(chi_of(&b2alt)? == ExtendedComplex::Finite(C64::from(2.0)), "chi(b2alt) != 2")?;
    ensure(chi_of(&b_half)? == ExtendedComplex::Finite(C64::from(0.5)), "chi(b_half) != 1/2")?;
    let t = |b: &CMatrix| catalog::ghz_b(b).map_err(e);
    let (t2, t2alt, thalf, t3) = (t(&b2)?, t(&b2alt)?, t(&b_half)?, t(&b3)?);

    ensure(slocc_equivalent(&t2, &thalf, 6, TOL).map_err(e)?, "chi=2 vs 1/2 not equivalent at N=6")?;
    let w = equivalence_witness(&b2, &b_half, 6, TOL).map_err(e)?;
    ensure(w.minimal_period(TOL) == 2, format!("witness period {}, expected 2", w.minimal_period(TOL)))?;
    let p = verify_certificate(&w, &t2, &thalf, ScalarMode::UpToScalar, SCALAR_TOL).map_err(e)?;
    ensure(p.proportional && p.residual <= SCALAR_TOL, format!("2-cycle witness residual {:.3e}", p.residual))?;
    ensure(!slocc_equivalent(&t2, &thalf, 7, TOL).map_err(e)?, "chi=2 vs 1/2 equivalent at N=7")?;
    ensure(equivalence_witness(&b2, &b_half, 7, TOL).is_err(), "witness produced at N=7")?;

    ensure(slocc_equivalent(&t2, &t2alt, 5, TOL).map_err(e)?, "chi=2 vs 2 not equivalent at N=5")?;
    let w1 = equivalence_witness(&b2, &b2alt, 5, TOL).map_err(e)?;
    ensure(w1.minimal_period(TOL) == 1, "chi=2 vs 2 witness is not a 1-cycle")?;
    let p1 = verify_certificate(&w1, &t2, &t2alt, ScalarMode::UpToScalar, SCALAR_TOL).map_err(e)?;
    ensure(p1.proportional, format!("1-cycle witness residual {:.3e}", p1.residual))?;

    for n in 5..=8 {
        ensure(!slocc_equivalent(&t2, &t3, n, TOL).map_err(e)?, format!("chi=2 vs 3 equivalent at N={n}"))?;
    }
    Ok(format!("2-cycle witness residual {:.1e}, 1-cycle residual {:.1e}", p.residual, p1.residual))
}

fn c5_aklt_cluster() -> Check {
    let start = Instant::now();
    let aklt = FamilySpec::plain(Family::Aklt);
    let cluster = FamilySpec::plain(Family::Cluster);
    let mut worst: f64 = 0.0;
    for n in [6, 8, 10] {
        let plan = decide_transform(&aklt, &cluster, n, TOL).map_err(e)?;
        ensure(plan.feasible, format!("N={n} infeasible"))?;
        let res = plan.verification.ok_or(format!("N={n}: certificate not verified"))?;
        ensure(res <= SCALAR_TOL, format!("N={n}: residual {res:.3e}"))?;
        ensure(
            plan.certificate.as_ref().is_some_and(|c| c.site_ops.iter().all(|g| g.shape() == (2, 3))),
            format!("N={n}: site operators are not 2x3"),
        )?;
        worst = worst.max(res);
    }
    for n in [5, 7, 9] {
        ensure(!decide_transform(&aklt, &cluster, n, TOL).map_err(e)?.feasible, format!("N={n} feasible"))?;
    }
    for n in 5..=10 {
        let back = decide_transform(&cluster, &aklt, n, TOL).map_err(e)?;
        ensure(!back.feasible && back.reason.contains("rank"), format!("cluster -> AKLT at N={n}: {}", back.reason))?;
    }
    within(start, Duration::from_secs(10), "AKLT/cluster")?;
    Ok(format!("even N verified (worst {worst:.1e}), odd N and reverse infeasible, {:?}", start.elapsed()))
}

fn c6_aklt_type() -> Check {
    let g = CMatrix::diag(&[ONE, C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 7.0)]);
    let aklt = FamilySpec::plain(Family::Aklt);
    let target = FamilySpec::aklt_g(g);
    let mut feasible = Vec::new();
    let mut res7 = None;
    for n in 5..=14 {
        let plan = decide_transform(&aklt, &target, n, TOL).map_err(e)?;
        if plan.feasible {
            feasible.push(n);
            if n == 7 {
                res7 = plan.verification;
            }
        }
    }
    ensure(feasible == vec![7, 14], format!("feasible at {feasible:?}"))?;
    let r = res7.ok_or("N=7 certificate not verified")?;
    ensure(r <= SCALAR_TOL, format!("N=7 residual {r:.3e}"))?;
    Ok(format!("feasible at {feasible:?}, N=7 residual {r:.1e}"))
}

fn c7_w_symmetries() -> Check {
    let b = CMatrix::identity(2);
    let w = catalog::w_b(&b).map_err(e)?;
    let mut r = common::rng(7);
    let sol6 = w_symmetries(&b, 6, TOL).map_err(e)?;
    let family = sol6
        .parametrized
        .iter()
        .find(|p| matches!(p, Parametrized::WPairs { .. }))
        .ok_or("N=6: no pair family")?;
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let x = common::complex(&mut r) + c64(0.2, 0.0);
        let cert = family.instantiate(&[x], 6, TOL).map_err(e)?;
        for (k, g) in cert.site_ops.iter().enumerate() {
            let z = mpsym::symmetries::w_z(&b, if k % 2 == 0 { x } else { x.inv() });
            ensure(prop_check(g.as_slice(), z.as_slice(), 1e-9).proportional, "site operator is not z(x) / z(1/x)")?;
        }
        worst = worst.max(strict_residual(&cert, &w)?);
    }
    let part_b = format!("N=6 family verified for 10 random x (worst {worst:.1e})");
    let sol5 = w_symmetries(&b, 5, TOL).map_err(e)?;
    let nontrivial: Vec<&CycleCertificate> = sol5
        .certificates
        .iter()
        .filter(|c| !c.site_ops.iter().all(|g| prop_check(g.as_slice(), CMatrix::identity(2).as_slice(), 1e-9).proportional))
        .collect();
    for c in &nontrivial {
        strict_residual(c, &w)?;
    }
    ensure(
        nontrivial.is_empty() && sol5.parametrized.is_empty(),
        format!(
            "N=5 is not trivial-only: {} nontrivial symmetry found and oracle-verified ({}); {part_b}",
            nontrivial.len(),
            nontrivial.first().map_or(String::new(), |c| {
                let g = &c.site_ops[0];
                let s = g[(1, 1)];
                let entries: Vec<String> = g.as_slice().iter().map(|z| format!("{:.3}", (z / s).re)).collect();
                format!("site op 0 ∝ [[{}, {}], [{}, {}]]", entries[0], entries[1], entries[2], entries[3])
            })
        ),
    )?;
    Ok(format!("N=5 trivial only; {part_b}"))
}

fn c8_injective() -> Check {
    let vb = catalog::vb();
    let targets = [
        ("cluster", catalog::ghz_b(&hadamard()).map_err(e)?),
        ("GHZ_b chi=2", catalog::ghz_b(&CMatrix::real(&[&[2.0, 1.0], &[1.0, 1.0]])).map_err(e)?),
        ("W", catalog::w_b(&CMatrix::identity(2)).map_err(e)?),
    ];
    let mut worst: f64 = 0.0;
    for (name, t) in &targets {
        let cert = injective_to_any(&vb, t, 5, TOL).map_err(e)?;
        ensure(cert.minimal_period(TOL) == 1, format!("{name}: not a global operator"))?;
        let p = verify_certificate(&cert, &vb, t, ScalarMode::UpToScalar, STRICT_TOL).map_err(e)?;
        ensure(p.proportional, format!("{name}: residual {:.3e}", p.residual))?;
        worst = worst.max(p.residual);
    }
    let mut r = common::rng(8);
    let xs: Vec<CMatrix> = (0..5).map(|_| common::regular(&mut r, 2)).collect();
    let dressed = injective_to_any_dressed(&vb, &targets[0].1, &xs, TOL).map_err(e)?;
    ensure(dressed.minimal_period(TOL) == 5, "dressed variant is translation invariant")?;
    let p = verify_certificate(&dressed, &vb, &targets[0].1, ScalarMode::UpToScalar, STRICT_TOL).map_err(e)?;
    ensure(p.proportional, format!("dressed variant residual {:.3e}", p.residual))?;
    Ok(format!("3 targets (worst {worst:.1e}) and a non-TI variant ({:.1e})", p.residual))
}

fn c9_properties() -> Check {
    let start = Instant::now();
    let mut r = common::rng(9);
    // gauge invariance
    for _ in 0..50 {
        let a = common::tensor(&mut r, 3, 2);
        let x = common::regular(&mut r, 2);
        let ga = a.gauge(&x).map_err(e)?;
        for n in [5, 6] {
            let p = mpsym::mps::states_equal(
                &build_state(std::slice::from_ref(&ga), n).map_err(e)?,
                &build_state(std::slice::from_ref(&a), n).map_err(e)?,
                ScalarMode::Strict,
                STRICT_TOL,
            )
            .map_err(e)?;
            ensure(p.proportional, format!("gauge invariance residual {:.3e}", p.residual))?;
        }
    }
    // AKLT projective linear group
    for k in 0..30 {
        let x = common::regular(&mut r, 2);
        let y = if k % 2 == 0 { x.scale(common::complex(&mut r) + c64(0.5, 0.0)) } else { common::regular(&mut r, 2) };
        let same_x = prop_check(x.as_slice(), y.as_slice(), 1e-9).proportional;
        let (sx, sy) = (aklt_s_of_x(&x).map_err(e)?, aklt_s_of_x(&y).map_err(e)?);
        let same_s = prop_check(sx.as_slice(), sy.as_slice(), 1e-9).proportional;
        ensure(same_x == same_s, format!("PGL property fails on pair {k}"))?;
    }
    // chi gauge invariance over G_GHZ
    for _ in 0..100 {
        let b = common::regular(&mut r, 2);
        let h = GhzBranch { k: r_bit(&mut r), v: common::complex(&mut r) + c64(0.3, 0.0), w: common::complex(&mut r) + c64(0.3, 0.0) };
        let moved = &(&h.y() * &b) * &h.x();
        let (c0, c1) = (chi(&b, TOL).map_err(e)?, chi(&moved, TOL).map_err(e)?);
        ensure(c0.chordal(c1) <= STRICT_TOL, format!("chi moved from {c0} to {c1}"))?;
    }
    // three-tangle
    let tg = three_tangle(&fiducial_state(&catalog::ghz_b(&CMatrix::identity(2)).map_err(e)?)).map_err(e)?;
    let tw = three_tangle(&fiducial_state(&catalog::w_b(&CMatrix::identity(2)).map_err(e)?)).map_err(e)?;
    ensure((tg - 1.0).abs() <= 1e-10, format!("tangle(GHZ) = {tg}"))?;
    ensure(tw.abs() <= 1e-12, format!("tangle(W) = {tw}"))?;
    // cross-enumeration
    let sets = branch_sets(&mut r)?;
    let mut compared = 0;
    for (name, ops) in &sets {
        for n in 1..=8 {
            let ex = exhaustive_small_cycles(ops, n, TOL).map_err(e)?;
            let en = enumerate_cycles(ops, n, &ConcatMode::Plain, TOL).map_err(e)?;
            ensure(same_cycle_sets(&ex, &en.certificates), format!("{name}, N={n}: {} vs {} walks", ex.len(), en.certificates.len()))?;
            compared += 1;
        }
    }
    within(start, Duration::from_secs(60), "property suites")?;
    Ok(format!("all property suites hold; {compared} enumerations cross-checked, {:?}", start.elapsed()))
}

fn r_bit(r: &mut rand_chacha::ChaCha8Rng) -> usize {
    use rand::Rng;
    r.random_range(0..2)
}

fn branch_sets(r: &mut rand_chacha::ChaCha8Rng) -> Result<Vec<(String, Vec<TripleOperator>)>, String> {
    let mut sets = Vec::new();
    let b0 = CMatrix::real(&[&[1.0, 1.0], &[1.0, 0.0]]);
    for (name, b) in [("cluster", hadamard()), ("generic", common::generic_b(r)), ("chi=0", b0)] {
        sets.push((format!("G_GHZ_b {name}"), ghz_transport_ops(&b, &b, TOL).map_err(e)?));
    }
    let bw = CMatrix::real(&[&[1.0, 0.3], &[-0.4, 1.2]]);
    let ps = [c64(2.0, 0.0), c64(0.5, 0.0), c64(-0.5, 0.0), c64(0.0, 1.0), ONE];
    sets.push(("G_W_b".into(), ps.iter().map(|&p| w_branch(&bw, p)).collect::<mpsym::Result<Vec<_>>>().map_err(e)?));
    let mut aklt_ops = vec![aklt_triple(&CMatrix::identity(2)).map_err(e)?];
    for _ in 0..3 {
        aklt_ops.push(aklt_triple(&common::regular(r, 2)).map_err(e)?);
    }
    sets.push(("G_AKLT".into(), aklt_ops));
    let vb = catalog::vb();
    let xs: Vec<CMatrix> = (0..4).map(|_| common::regular(r, 2)).collect();
    let inj = (0..4)
        .map(|k| injective_symmetry(&vb, &xs[(k + 3) % 4].inverse()?, &xs[k], TOL))
        .collect::<mpsym::Result<Vec<_>>>()
        .map_err(e)?;
    sets.push(("G_VB chain".into(), inj));
    let pairs = mpsym::transforms::aklt_cluster_two_cycles(TOL).map_err(e)?;
    sets.push(("G_AKLT,cluster".into(), pairs.into_iter().flat_map(|(a, b)| [a, b]).collect()));
    Ok(sets)
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("cluster stabilizer count", c1_cluster_count),
        ("GHZ-generic symmetry order", c2_ghz_generic),
        ("injectivity-length table", c3_injectivity_table),
        ("SLOCC equivalence law", c4_slocc_law),
        ("AKLT -> cluster parity", c5_aklt_cluster),
        ("AKLT -> AKLT-type order law", c6_aklt_type),
        ("W-generated symmetries", c7_w_symmetries),
        ("injective universality", c8_injective),
        ("property suites", c9_properties),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed, {:?}", criteria.len() - failed, start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
