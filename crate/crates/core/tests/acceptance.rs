//! Acceptance criteria. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thinset::bw::{
    branch_chain, build_ar_set, super_thin_diagnostic, verify_tree_conditions, BitString,
    TreeFamily,
};
use thinset::constructions::{
    gallery, merge_super_thin, merge_very_thin_super_thin, natural_decomposition,
    split_into_super_thin, thin_intersection_cover, GALLERY,
};
use thinset::convergence::{
    convergence_report, exceedance_set, CatalogSequence, Mode, SequenceDef,
};
use thinset::density::uniform_density_profile;
use thinset::rational::{int, ratio};
use thinset::set_model::{
    BlockCertificate, BlockFamilyKind, Certificate, Generator, GrowthFn, Series,
};
use thinset::thinness::{
    classify_all, greedy_block_decomposition, reciprocal_gap_partial_sums, run_statistic,
    BlockDecomposition, ClassifierConfig, Status, ThinClass, Verdict,
};
use thinset::{Prefix, SetExpr};

/// Named sub-checks of one criterion.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    count: usize,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.count += 1;
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn fail(&mut self, what: impl Into<String>) {
        self.check(false, what);
    }
}

fn status(v: &std::collections::BTreeMap<ThinClass, Verdict>, c: ThinClass) -> Status {
    v[&c].status
}

fn log2_floor(n: u64) -> u64 {
    63 - n.leading_zeros() as u64
}

fn ac1() -> Checks {
    let mut c = Checks::default();
    let started = Instant::now();
    let n: u64 = 1 << 20;
    let cfg = ClassifierConfig::default();
    let all = |name: &str| classify_all(&gallery(name).unwrap(), n, &cfg).unwrap();

    // A_frak
    let v = all("A_frak");
    c.check(
        status(&v, ThinClass::VeryThin) == Status::ProvedSymbolic,
        "A_frak VeryThin proved",
    );
    c.check(
        status(&v, ThinClass::SuperThin) == Status::RefutedSymbolic,
        "A_frak SuperThin refuted",
    );
    c.check(
        status(&v, ThinClass::Thin).is_positive(),
        "A_frak Thin positive",
    );
    let count = gallery("A_frak").unwrap().enumerate_upto(n).unwrap().len() as u64;
    c.check(
        count * n <= 2 * (log2_floor(n) + 1) * n,
        format!("A_frak count {count} above 2(log2 N + 1)"),
    );

    // pow2run
    let run = gallery("pow2run").unwrap();
    let v = all("pow2run");
    c.check(
        status(&v, ThinClass::VeryThin) == Status::InconsistentUpTo(n),
        "pow2run VeryThin inconsistent",
    );
    for k in 4..20u64 {
        let pre = run.enumerate_upto(1 << (k + 1)).unwrap();
        let r = run_statistic(&pre, 1).unwrap();
        c.check(
            r == k + 1,
            format!("pow2run run at 2^{} is {r}, expected {}", k + 1, k + 1),
        );
        let h = (1u64 << k) + k;
        let r = run_statistic(&run.enumerate_upto(h).unwrap(), 1).unwrap();
        c.check(
            r == log2_floor(h) + 1,
            format!("pow2run run at 2^{k}+{k} is {r}"),
        );
    }
    let pre = run.enumerate_upto(n - 1).unwrap();
    let mut count = 0u64;
    let mut it = pre.elements().iter().peekable();
    let mut bad = None;
    for m in 1..n {
        while it.next_if(|&&x| x <= m).is_some() {
            count += 1;
        }
        let k = log2_floor(m);
        // A(m)/m <= (k+1)(k+2)/2^k
        if (count as u128) << k > ((k + 1) * (k + 2)) as u128 * m as u128 && bad.is_none() {
            bad = Some(m);
        }
    }
    c.check(
        bad.is_none(),
        format!("pow2run density bound fails at {bad:?}"),
    );

    // pow2pair
    let v = all("pow2pair");
    c.check(
        status(&v, ThinClass::SuperThin) == Status::ProvedSymbolic,
        "pow2pair SuperThin proved",
    );
    c.check(
        status(&v, ThinClass::VeryVeryThin) == Status::ProvedSymbolic,
        "pow2pair VeryVeryThin proved",
    );
    c.check(
        status(&v, ThinClass::SuperSuperThin) == Status::RefutedSymbolic,
        "pow2pair SuperSuperThin refuted",
    );
    let pre = gallery("pow2pair")
        .unwrap()
        .enumerate_upto((1 << 31) + 31)
        .unwrap();
    let sums = reciprocal_gap_partial_sums(&pre.gap_sequence().unwrap());
    c.check(
        sums.last().is_some_and(|s| *s > int(3)),
        "pow2pair partial sum through block 31 exceeds 3",
    );

    // tri, triY
    let v = all("tri");
    c.check(
        status(&v, ThinClass::SuperThin) == Status::ProvedSymbolic,
        "tri SuperThin proved",
    );
    c.check(
        status(&v, ThinClass::VeryVeryThin) == Status::RefutedSymbolic,
        "tri VeryVeryThin refuted",
    );
    let v = all("triY");
    c.check(
        status(&v, ThinClass::VeryThin) == Status::ProvedSymbolic,
        "triY VeryThin proved",
    );
    c.check(
        status(&v, ThinClass::VeryVeryThin) == Status::RefutedSymbolic,
        "triY VeryVeryThin refuted",
    );

    // cubicgap
    let v = all("cubicgap");
    c.check(
        !status(&v, ThinClass::VeryThin).is_positive(),
        "cubicgap VeryThin not positive",
    );
    c.check(
        matches!(
            status(&v, ThinClass::VeryThin),
            Status::InconsistentUpTo(_) | Status::RefutedSymbolic
        ),
        "cubicgap VeryThin inconsistent",
    );
    c.check(
        status(&v, ThinClass::UniformlyThin).is_positive(),
        "cubicgap UniformlyThin positive",
    );
    let pre = gallery("cubicgap").unwrap().enumerate_upto(n).unwrap();
    let mut a = vec![0u64, 1];
    for p in 2..=6u64 {
        let cubes: u64 = (1..p).map(|j| j * j * j).sum();
        a.push(a[p as usize - 1] + 2 * cubes + 1);
    }
    for nn in 3..=5u64 {
        let b: u64 = (1..=nn).map(|j| j * j * j).sum();
        let (a_n, len) = (a[nn as usize], b + 1);
        let prof = uniform_density_profile(&pre, &[len], a_n).unwrap();
        let sup = prof.rows[0].sup_count;
        c.check(
            sup <= nn + 1,
            format!("cubicgap s_m = {sup} > {} at n = {nn}", nn + 1),
        );
        // independent two-pointer scan of [m+1, m+len]
        let e = pre.elements();
        let (mut lo, mut hi, mut best) = (0usize, 0usize, 0usize);
        for m in a_n..=n - len {
            while lo < e.len() && e[lo] <= m {
                lo += 1;
            }
            while hi < e.len() && e[hi] <= m + len {
                hi += 1;
            }
            best = best.max(hi - lo);
        }
        c.check(
            best as u64 == sup,
            format!("cubicgap window scan {best} differs from profile {sup}"),
        );
    }

    let elapsed = started.elapsed();
    c.check(
        elapsed < Duration::from_secs(60),
        format!("gallery table took {elapsed:?}"),
    );
    c
}

fn brute_run(e: &[u64], m: u64) -> u64 {
    let mut best = 0;
    for i in 0..e.len() {
        let mut j = i;
        while j + 1 < e.len() && e[j + 1] - e[j] <= m {
            j += 1;
        }
        best = best.max(j - i + 1);
    }
    best as u64
}

fn random_set(rng: &mut ChaCha8Rng) -> Vec<u64> {
    let size = rng.gen_range(1..=200);
    let mut v: Vec<u64> = (0..size).map(|_| rng.gen_range(1..=10_000)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn ac2(rng: &mut ChaCha8Rng) -> Checks {
    let mut c = Checks::default();
    for trial in 0..1000 {
        let e = random_set(rng);
        let m = rng.gen_range(1..=60);
        let pre = Prefix::new(10_000, e.clone()).unwrap();
        let fast = run_statistic(&pre, m).unwrap();
        let slow = brute_run(&e, m);
        c.check(
            fast == slow,
            format!("trial {trial}: run statistic {fast} vs {slow}"),
        );
        let d = greedy_block_decomposition(&pre, m).unwrap();
        // x, y share a block iff no gap between them exceeds m
        let block_of: Vec<usize> = d
            .blocks
            .iter()
            .enumerate()
            .flat_map(|(b, blk)| std::iter::repeat_n(b, blk.len()))
            .collect();
        let mut ok = d.elements() == e && block_of.len() == e.len();
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                let linked = e[i..=j].windows(2).all(|w| w[1] - w[0] <= m);
                ok &= linked == (block_of[i] == block_of[j]);
            }
        }
        c.check(
            ok,
            format!("trial {trial}: greedy blocks disagree with the pairwise scan"),
        );
    }
    c
}

/// A certified super-thin set: a catalog generator or an explicit set with a
/// linear gap floor.
fn random_super_thin(rng: &mut ChaCha8Rng, horizon: u64) -> SetExpr {
    match rng.gen_range(0..4) {
        0 => SetExpr::generator(Generator::Powers(rng.gen_range(2..=12))).unwrap(),
        1 => SetExpr::generator(Generator::PowersPlusOne).unwrap(),
        2 => SetExpr::generator(Generator::Triangular).unwrap(),
        _ => {
            let (slope, offset) = (rng.gen_range(1..=40), rng.gen_range(1..=10));
            let mut x = rng.gen_range(1..=100);
            let mut v = vec![x];
            for k in 1u64.. {
                x += slope * k + offset + rng.gen_range(0..=slope);
                if x > horizon {
                    break;
                }
                v.push(x);
            }
            let cert = Certificate::default()
                .with_gap_floor(GrowthFn::Linear {
                    slope,
                    offset,
                    divisor: 1,
                })
                .with_gap_series(Series::Divergent);
            SetExpr::explicit(v).unwrap().with_certificate(cert)
        }
    }
}

fn ac3(rng: &mut ChaCha8Rng) -> Checks {
    let mut c = Checks::default();
    let n = 100_000;
    let very_thin: Vec<BlockDecomposition> = ["A_frak", "triY", "pow2pair"]
        .iter()
        .map(|g| natural_decomposition(&gallery(g).unwrap(), n, 1).unwrap())
        .collect();
    for trial in 0..200 {
        let s = random_super_thin(rng, n).enumerate_upto(n).unwrap();
        let t = random_super_thin(rng, n).enumerate_upto(n).unwrap();
        match merge_super_thin(&s, &t, n) {
            Ok(d) => {
                c.check(
                    d.block_size_max <= 3,
                    format!("trial {trial}: block of size {}", d.block_size_max),
                );
                c.check(
                    d.to_prefix() == s.union(&t),
                    format!("trial {trial}: union not preserved"),
                );
            }
            Err(e) => c.fail(format!("trial {trial}: merge_super_thin failed: {e}")),
        }
        let sd = &very_thin[trial % very_thin.len()];
        match merge_very_thin_super_thin(sd, &t, n) {
            Ok(d) => {
                let bound = 2 * sd.block_size_max + 1;
                c.check(
                    d.block_size_max <= bound,
                    format!(
                        "trial {trial}: block of size {} > {bound}",
                        d.block_size_max
                    ),
                );
                c.check(
                    d.to_prefix() == sd.to_prefix().union(&t),
                    format!("trial {trial}: union not preserved"),
                );
            }
            Err(e) => c.fail(format!(
                "trial {trial}: merge_very_thin_super_thin failed: {e}"
            )),
        }
    }
    c
}

/// Random blocks of at most `m` elements with internal gaps `<= 3` and
/// growing block gaps, carrying a block certificate.
fn random_block_family(rng: &mut ChaCha8Rng, horizon: u64) -> SetExpr {
    let m = rng.gen_range(1..=5usize);
    let mut v = Vec::new();
    let mut x = rng.gen_range(1..=20u64);
    for k in 1u64.. {
        if x > horizon {
            break;
        }
        let size = rng.gen_range(1..=m);
        let mut y = x;
        for i in 0..size {
            if i > 0 {
                y += rng.gen_range(1..=3);
            }
            if y > horizon {
                break;
            }
            v.push(y);
        }
        x = y + 4 + 3 * k + rng.gen_range(0..=5);
    }
    let cert = Certificate::default().with_blocks(BlockCertificate {
        max_size: Some(m),
        gap_floor: Some(GrowthFn::Linear {
            slope: 3,
            offset: 4,
            divisor: 1,
        }),
        ..Default::default()
    });
    SetExpr::explicit(v).unwrap().with_certificate(cert)
}

fn ac4(rng: &mut ChaCha8Rng) -> Checks {
    let mut c = Checks::default();
    let n = 1 << 16;
    let round_trip = |c: &mut Checks, label: String, pre: &Prefix, m: u64| {
        let d = match greedy_block_decomposition(pre, m) {
            Ok(d) => d,
            Err(e) => return c.fail(format!("{label}: {e}")),
        };
        match split_into_super_thin(&d) {
            Ok(parts) => {
                let total: usize = parts.iter().map(Prefix::len).sum();
                let union = parts
                    .iter()
                    .fold(Prefix::new(n, vec![]).unwrap(), |acc, p| acc.union(p));
                c.check(
                    union == *pre && total == pre.len(),
                    format!("{label}: split does not reproduce the prefix"),
                );
            }
            Err(e) => c.fail(format!("{label}: {e}")),
        }
    };
    let cfg = ClassifierConfig::default();
    for (name, _) in GALLERY {
        let expr = gallery(name).unwrap();
        let v = classify_all(&expr, n, &cfg).unwrap();
        if !status(&v, ThinClass::VeryThin).is_positive() {
            continue;
        }
        let pre = expr.enumerate_upto(n).unwrap();
        for m in [1, 2, 4] {
            round_trip(&mut c, format!("{name} at M={m}"), &pre, m);
        }
    }
    for trial in 0..100 {
        let pre = random_block_family(rng, n).enumerate_upto(n).unwrap();
        round_trip(&mut c, format!("random family {trial}"), &pre, 3);
    }
    c
}

fn ac5() -> Checks {
    let mut c = Checks::default();
    let n = 1 << 15;
    let s = SetExpr::generator(Generator::Powers(2))
        .unwrap()
        .enumerate_upto(n)
        .unwrap();
    match thin_intersection_cover(&s, n) {
        Ok(cover) => {
            c.check(
                cover.a.intersection(&cover.b) == s,
                "A' ∩ B' differs from S",
            );
            c.check(
                s.difference(&cover.a).is_empty() && s.difference(&cover.b).is_empty(),
                "S not covered",
            );
            let ra = run_statistic(&cover.a, 1).unwrap();
            let rb = run_statistic(&cover.b, 1).unwrap();
            c.check(ra >= 4, format!("A' longest run {ra}"));
            c.check(rb >= 4, format!("B' longest run {rb}"));
        }
        Err(e) => c.fail(format!("cover failed: {e}")),
    }
    c
}

fn ac6() -> Checks {
    let mut c = Checks::default();
    let cfg = ClassifierConfig::default();
    let x = SequenceDef::Catalog(CatalogSequence::X);
    let y = SequenceDef::Catalog(CatalogSequence::Y);
    let half = [ratio(1, 2)];
    for k in [10u64, 14, 18] {
        let n = 1 << k;
        let ex = exceedance_set(&x, &int(1), &half[0], n).unwrap();
        let count = ex.len() as u64;
        c.check(
            count << k <= (k + 1) * (k + 2) * n,
            format!("paper_x density {count}/{n} at 2^{k}"),
        );
        let rx = &convergence_report(&x, &int(1), &half, n, &[Mode::VeryThin], &cfg).unwrap()[0];
        let vx = rx.mode_conclusions[0].status;
        c.check(
            vx == Status::InconsistentUpTo(n),
            format!("paper_x very-thin verdict {vx} at 2^{k}"),
        );

        let ey = exceedance_set(&y, &int(1), &half[0], n).unwrap();
        let tail_min = ey
            .elements()
            .windows(2)
            .filter(|w| w[1] > n / 2)
            .map(|w| w[1] - w[0])
            .min();
        c.check(
            tail_min == Some(1 << (k - 1)),
            format!("paper_y tail min gap {tail_min:?} at 2^{k}"),
        );
        let ry = &convergence_report(
            &y,
            &int(1),
            &half,
            n,
            &[Mode::SuperThin, Mode::VeryThin],
            &cfg,
        )
        .unwrap()[0];
        let (st, vy) = (ry.mode_conclusions[0].status, ry.mode_conclusions[1].status);
        c.check(
            st.is_positive(),
            format!("paper_y super-thin verdict {st} at 2^{k}"),
        );
        c.check(
            vy.is_positive() && vy != vx,
            format!("very-thin verdicts {vx} and {vy} not separated at 2^{k}"),
        );
    }
    c
}

fn ac7(rng: &mut ChaCha8Rng) -> Checks {
    let mut c = Checks::default();
    let n = 100_000;
    match verify_tree_conditions(&TreeFamily::Dyadic, 10, n) {
        Ok(r) => c.check(r.passed(), format!("tree violations: {:?}", r.violations)),
        Err(e) => c.fail(format!("tree check failed: {e}")),
    }
    let mut branches = vec![
        BitString::zeros(10),
        "1111111111".parse().unwrap(),
        "0101010101".parse().unwrap(),
    ];
    for _ in 0..5 {
        branches.push(BitString::new((0..10).map(|_| rng.gen()).collect()));
    }
    for x in &branches {
        let chain = branch_chain(x).unwrap();
        let diffs: Vec<Prefix> = chain
            .iter()
            .map(|l| l.difference.enumerate_upto(n).unwrap())
            .collect();
        for i in 0..diffs.len() {
            for j in i + 1..diffs.len() {
                c.check(
                    diffs[i].intersection(&diffs[j]).is_empty(),
                    format!("{x}: differences {i}, {j} meet"),
                );
            }
        }
        let rest = thinset::bw::tree_node(x)
            .unwrap()
            .enumerate_upto(n)
            .unwrap();
        let covered = diffs.iter().fold(rest, |acc, d| acc.union(d));
        c.check(
            covered.len() as u64 == n,
            format!("{x}: chain does not cover [1, N]"),
        );

        for indices in [
            (1..=10).collect::<Vec<u64>>(),
            (1..=10).map(|i| 2 * i).collect(),
            vec![1, 3, 9, 27],
        ] {
            match build_ar_set(x, &indices, n) {
                Ok(ar) => {
                    let d = super_thin_diagnostic(&ar);
                    c.check(d.passed(), format!("{x} {indices:?}: diagnostic {d:?}"));
                }
                Err(e) => c.fail(format!("{x} {indices:?}: {e}")),
            }
        }
    }
    c
}

fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> SetExpr {
    let leaf = |rng: &mut ChaCha8Rng| -> SetExpr {
        match rng.gen_range(0..9) {
            0 => SetExpr::generator(Generator::Powers(rng.gen_range(2..=5))).unwrap(),
            1 => SetExpr::generator(Generator::PowersPlusOne).unwrap(),
            2 => SetExpr::generator(Generator::Triangular).unwrap(),
            3 => SetExpr::block_family(BlockFamilyKind::Pow2Pair),
            4 => SetExpr::block_family(BlockFamilyKind::TriY),
            5 => SetExpr::block_family(BlockFamilyKind::Pow2Run),
            6 => SetExpr::block_family(BlockFamilyKind::CubicGap),
            7 => {
                let m = rng.gen_range(1..=6);
                SetExpr::residue_class(m, rng.gen_range(1..=m)).unwrap()
            }
            _ => SetExpr::explicit(
                (0..rng.gen_range(1..6))
                    .map(|_| rng.gen_range(1..500))
                    .collect(),
            )
            .unwrap(),
        }
    };
    if depth == 0 || rng.gen_bool(0.4) {
        return leaf(rng);
    }
    match rng.gen_range(0..3) {
        0 => SetExpr::union(vec![
            random_expr(rng, depth - 1),
            random_expr(rng, depth - 1),
        ]),
        1 => SetExpr::intersection(random_expr(rng, depth - 1), random_expr(rng, depth - 1)),
        _ => SetExpr::difference(random_expr(rng, depth - 1), random_expr(rng, depth - 1)),
    }
}

fn ac8(rng: &mut ChaCha8Rng) -> Checks {
    let mut c = Checks::default();
    let cfg = ClassifierConfig::default();
    let pairs = [
        (ThinClass::SuperSuperThin, ThinClass::SuperThin),
        (ThinClass::VeryVeryThin, ThinClass::VeryThin),
        (ThinClass::VeryThin, ThinClass::Thin),
        (ThinClass::VeryThin, ThinClass::UniformlyThin),
    ];
    let mut exprs: Vec<(String, SetExpr)> = GALLERY
        .iter()
        .map(|(name, _)| (name.to_string(), gallery(name).unwrap()))
        .collect();
    for _ in 0..100 {
        let e = random_expr(rng, 2);
        exprs.push((e.to_string(), e));
    }
    for (label, expr) in &exprs {
        for n in [1u64 << 12, 1 << 16] {
            match classify_all(expr, n, &cfg) {
                Ok(v) => {
                    for (child, parent) in pairs {
                        let ok =
                            !status(&v, child).is_positive() || status(&v, parent).is_positive();
                        c.check(
                            ok,
                            format!(
                                "{label} at {n}: {child} {} but {parent} {}",
                                status(&v, child),
                                status(&v, parent)
                            ),
                        );
                    }
                }
                Err(e) => c.fail(format!("{label} at {n}: {e}")),
            }
        }
    }
    c
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7417_5e7);
    let criteria: Vec<(&str, Box<dyn FnOnce(&mut ChaCha8Rng) -> Checks>)> = vec![
        ("AC1 gallery verdict table", Box::new(|_| ac1())),
        (
            "AC2 run statistic and greedy blocks against brute force",
            Box::new(ac2),
        ),
        ("AC3 block merges on random super-thin pairs", Box::new(ac3)),
        (
            "AC4 split after greedy decomposition round trip",
            Box::new(ac4),
        ),
        (
            "AC5 intersection cover of powers of two",
            Box::new(|_| ac5()),
        ),
        ("AC6 convergence separation", Box::new(|_| ac6())),
        ("AC7 dyadic tree family", Box::new(ac7)),
        ("AC8 hierarchy invariants", Box::new(ac8)),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let started = Instant::now();
        let checks = run(&mut rng);
        let secs = started.elapsed().as_secs_f64();
        if checks.failures.is_empty() {
            println!("[PASS] {name} ({} checks, {secs:.1}s)", checks.count);
        } else {
            failed += 1;
            println!(
                "[FAIL] {name} ({} of {} checks failed, {secs:.1}s)",
                checks.failures.len(),
                checks.count
            );
            for f in checks.failures.iter().take(10) {
                println!("       {f}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
