//! Acceptance suite: one pass/fail line per criterion, non-zero exit on any failure.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zsindex::arith::{gcd, GroupContext};
use zsindex::campaign::{counterexample_scan, verify_n, Filter, VerifyOptions};
use zsindex::index::{g_norm, index_oracle, unit_sum_checked};
use zsindex::sequence::{enumerate_minimal4, ZsSequence};
use zsindex::witness::{
    certify_index_one, cor_witness, scale_witness_below, shift_witnesses, unit_family,
};

const SAMPLE_SEED: u64 = 20_140_601;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Composite moduli in `[lo, hi]` coprime to 6.
fn composite_coprime6(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi)
        .filter(|&n| gcd(n, 6) == 1)
        .filter(|&n| !GroupContext::new(n).unwrap().is_prime())
        .collect()
}

fn within(budget: Duration, start: Instant) -> Result<(), String> {
    ensure(start.elapsed() <= budget, || {
        format!("took {:?}, budget {:?}", start.elapsed(), budget)
    })
}

fn c1_theorem13_desk() -> Outcome {
    let start = Instant::now();
    let ns = composite_coprime6(25, 175);
    let mut seqs = 0;
    for &n in &ns {
        let r = verify_n(n, &VerifyOptions::exhaustive(Filter::Theorem13)).map_err(|e| e.to_string())?;
        ensure(r.violations.is_empty(), || format!("n={n}: {} violations", r.violations.len()))?;
        ensure(r.max_index_seen == 1, || format!("n={n}: max index {}", r.max_index_seen))?;
        ensure(r.passed(), || format!("n={n}: {} fallbacks, {:?}", r.fallback_uses, r.certificate_errors))?;
        seqs += r.sequences_checked;
    }
    within(Duration::from_secs(600), start)?;
    Ok(format!("{} moduli, {seqs} sequences, no violations", ns.len()))
}

fn c2_two_prime_powers() -> Outcome {
    let start = Instant::now();
    let mut seqs = 0;
    for n in [25u64, 35, 49, 55, 77, 121, 125, 175] {
        let r = verify_n(n, &VerifyOptions::exhaustive(Filter::All)).map_err(|e| e.to_string())?;
        ensure(r.violations.is_empty(), || format!("n={n}: {} violations", r.violations.len()))?;
        seqs += r.sequences_checked;
    }
    within(Duration::from_secs(300), start)?;
    Ok(format!("{seqs} sequences, no violations"))
}

fn c3_three_primes_sampled() -> Outcome {
    let start = Instant::now();
    for n in [385u64, 455, 595, 665, 715, 1001] {
        let r = verify_n(n, &VerifyOptions::sampled(Filter::Conjecture, 100_000, SAMPLE_SEED))
            .map_err(|e| e.to_string())?;
        ensure(r.sequences_checked == 100_000, || format!("n={n}: drew {}", r.sequences_checked))?;
        ensure(r.violations.is_empty(), || format!("n={n}: {:?}", r.violations.first()))?;
    }
    within(Duration::from_secs(300), start)?;
    Ok(format!("6 x 100000 samples (seed {SAMPLE_SEED}), no violations"))
}

fn c4_counterexamples() -> Outcome {
    let findings = counterexample_scan(8, 30, false).map_err(|e| e.to_string())?;
    ensure(!findings.is_empty(), || "no findings".into())?;
    for f in &findings {
        let s: ZsSequence = f.sequence.parse().map_err(|e: zsindex::Error| e.to_string())?;
        ensure(gcd(f.n, 6) != 1 && s.n() == f.n, || format!("{} has gcd(n, 6) = 1", f.sequence))?;
        ensure(s.is_minimal_zero_sum(), || format!("{} is not minimal", f.sequence))?;
        let ctx = GroupContext::new(f.n).unwrap();
        for &u in ctx.units() {
            let norm = g_norm(&s, u).unwrap();
            ensure(norm >= 2.into(), || format!("{} has g_norm {norm} at {u}", f.sequence))?;
        }
    }
    Ok(format!("{} findings, all re-validated", findings.len()))
}

fn c5_lemma_two_two() -> Outcome {
    let mut checks = 0u64;
    for n in composite_coprime6(5, 1001) {
        let ctx = GroupContext::new(n).unwrap();
        let primes: Vec<u64> = ctx.primes().collect();
        for &p in &primes {
            for v in 1..n {
                shift_witnesses(&ctx, v, p).map_err(|e| format!("shift n={n} v={v} p={p}: {e}"))?;
                checks += 1;
                if v % p != 0 {
                    scale_witness_below(&ctx, v, p)
                        .map_err(|e| format!("scale n={n} v={v} p={p}: {e}"))?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} witness calls, zero lemma violations"))
}

fn c6_remark() -> Outcome {
    let mut families = 0u64;
    for n in composite_coprime6(5, 1001) {
        let ctx = GroupContext::new(n).unwrap();
        for &(p, e) in ctx.factors() {
            for s in 0..e {
                let fam = unit_family(&ctx, p, s).map_err(|e| e.to_string())?;
                let expected = if fam.alpha % p == 0 { 0 } else { 1 };
                ensure(fam.excluded_count() == expected, || {
                    format!("n={n} p={p} s={s}: {} excluded", fam.excluded_count())
                })?;
                families += 1;
                // every member of the progression fixes multiples of p^(s+1)
                let step = p.pow(s + 1);
                for v in (step..n).step_by(step as usize) {
                    for t in 0..p {
                        let y = fam.multiplier(t);
                        ensure(ctx.mul(y, v) == v, || format!("n={n} y={y} moves {v}"))?;
                    }
                }
            }
        }
    }
    Ok(format!("{families} families, counts and fixing property hold"))
}

fn c7_corollary() -> Outcome {
    let mut calls = 0u64;
    for n in composite_coprime6(5, 1001) {
        let ctx = GroupContext::new(n).unwrap();
        for &(p, e) in ctx.factors() {
            for s in 0..e {
                let ps = p.pow(s);
                for beta in (ps..n).step_by(ps as usize).filter(|b| (b / ps) % p != 0) {
                    cor_witness(&ctx, beta, p, s)
                        .map_err(|e| format!("n={n} beta={beta} p={p} s={s}: {e}"))?;
                    calls += 1;
                }
            }
        }
    }
    Ok(format!("{calls} corollary witnesses, zero failures"))
}

fn c8_dispatcher() -> Outcome {
    let mut certified = 0u64;
    for n in composite_coprime6(25, 175) {
        let ctx = GroupContext::new(n).unwrap();
        for s in enumerate_minimal4(n).filter(|s| s.gcd_profile().meets_main_hypothesis()) {
            let (cert, trace) = certify_index_one(&ctx, &s).map_err(|e| format!("{s}: {e}"))?;
            ensure(!trace.used_fallback(), || format!("{s}: fallback"))?;
            cert.validate(&ctx).map_err(|e| e.to_string())?;
            ensure(trace.product(&ctx) == cert.m, || format!("{s}: trace product"))?;
            certified += 1;
        }
    }
    Ok(format!("{certified} certificates, zero fallbacks"))
}

fn c9_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    for _ in 0..10_000 {
        let n = rng.gen_range(25..=385u64);
        let ctx = GroupContext::new(n).unwrap();
        let k = rng.gen_range(1..=6usize);
        let terms: Vec<u64> = (0..k).map(|_| rng.gen_range(1..n)).collect();
        let s = ZsSequence::new(n, terms).unwrap();
        let u = ctx.units()[rng.gen_range(0..ctx.units().len())];
        let a = index_oracle(&s, &ctx).index_value();
        let b = index_oracle(&s.scale(u).unwrap(), &ctx).index_value();
        ensure(a == b, || format!("{s} scaled by {u}: {a} vs {b}"))?;
    }
    let mut negations = 0;
    while negations < 10_000 {
        let n = 2 * rng.gen_range(3..=192u64) + 1;
        let x: Vec<u64> = (0..3).map(|_| rng.gen_range(1..n)).collect();
        let x4 = (n - x.iter().sum::<u64>() % n) % n;
        if x4 == 0 {
            continue;
        }
        let s = ZsSequence::new(n, vec![x[0], x[1], x[2], x4]).unwrap();
        let ctx = GroupContext::new(n).unwrap();
        let m = ctx.units()[rng.gen_range(0..ctx.units().len())];
        let lhs = unit_sum_checked(&s, n - m).unwrap();
        let rhs = 4 * n - unit_sum_checked(&s, m).unwrap();
        ensure(lhs == rhs, || format!("{s}, m={m}: {lhs} != {rhs}"))?;
        negations += 1;
    }
    Ok("10000 scalings and 10000 negations agree".into())
}

fn c10_small_oracle() -> Outcome {
    let all: Vec<String> = enumerate_minimal4(5).map(|s| s.to_string()).collect();
    let expected = ["5:1,1,1,2", "5:1,3,3,3", "5:2,2,2,4", "5:3,4,4,4"];
    ensure(all == expected, || format!("got {all:?}"))?;
    let ctx = GroupContext::new(5).unwrap();
    let mut reps: Vec<ZsSequence> = enumerate_minimal4(5).map(|s| s.canonical_rep(&ctx)).collect();
    reps.dedup();
    ensure(reps.len() == 1, || format!("{} orbits", reps.len()))?;
    Ok("4 sequences, 1 orbit".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("C1 theorem13 exhaustive, composite n in [25,175]", c1_theorem13_desk),
        ("C2 two prime powers, filter all", c2_two_prime_powers),
        ("C3 three primes, sampled", c3_three_primes_sampled),
        ("C4 counterexamples for gcd(n,6) > 1", c4_counterexamples),
        ("C5 shift and scale witnesses", c5_lemma_two_two),
        ("C6 family exclusions and fixing", c6_remark),
        ("C7 corollary witnesses", c7_corollary),
        ("C8 dispatcher soundness", c8_dispatcher),
        ("C9 scaling and negation invariance", c9_invariance),
        ("C10 enumeration of Z_5", c10_small_oracle),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} ({secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
