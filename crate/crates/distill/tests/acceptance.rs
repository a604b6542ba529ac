//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use distill_core::automata::{Lasso, Letter};
use distill_core::decide::{bounded_check, cross_validate, decide_fragment, CrossValidation, Verdict};
use distill_core::embed::{embed_instance, embed_lds, uniform, LdsInstance};
use distill_core::ratlin::{rat, vector};
use distill_core::reduce::{reduce_full, ReduceOptions, ReducedInstance, StochasticInstance};
use distill_core::spectra::analyze;
use distill_core::{RatMatrix, RatPoly, Rational};
use distill_testkit::gen::{
    centred_target, constant_tail_targets, dyn_zero_chain, planted_chain, planted_spectrum, random_automaton,
    random_lasso, random_lds, random_target,
};
use distill_testkit::oracle::{
    equal_up_to_sign, flatten, float_dyn_dim, orbit_repeat, resultant_with_power, simulated_accept,
};
use distill_testkit::seeded;
use num_traits::{One, Zero};
use rand::Rng;

type Outcome = Result<String, String>;

struct Corpus {
    cases: Vec<(StochasticInstance, ReducedInstance)>,
}

fn corpus() -> Corpus {
    let mut rng = seeded(2024);
    let cases = (0..200)
        .map(|i| {
            let chain = planted_chain(&mut rng, 3 + i % 4);
            let k = chain.matrix.rows();
            let targets = vec![
                random_target(&mut rng, k, 2, false),
                random_target(&mut rng, k, 2, false),
            ];
            let spec = random_automaton(&mut rng, 2, 4);
            let inst = StochasticInstance::new(chain.matrix, chain.initial, targets, spec).expect("stochastic");
            let red = reduce_full(&inst, &ReduceOptions::default()).expect("reducible");
            (inst, red)
        })
        .collect();
    Corpus { cases }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn trajectory_identity(c: &Corpus) -> Outcome {
    let mut steps = 0;
    let mut shapes = std::collections::BTreeSet::new();
    for (i, (inst, red)) in c.cases.iter().enumerate() {
        let cert = &red.certificate;
        shapes.insert((cert.ell, cert.c));
        let start = cert.prefix_len();
        let end = start + 64 * cert.c;
        for (n, x) in inst.trajectory().take(end + 1).enumerate().skip(start) {
            ensure(red.distribution_at(n).as_ref() == Some(&x), || {
                format!("instance {i}, step {n}")
            })?;
            steps += 1;
        }
    }
    Ok(format!(
        "{} instances, {steps} exact steps, (ell, c) shapes {shapes:?}",
        c.cases.len()
    ))
}

fn letter_equivalence(c: &Corpus) -> Outcome {
    for (i, (inst, red)) in c.cases.iter().enumerate() {
        let (letters, _) = bounded_check(inst, 256);
        let rebuilt = red.reconstructed_letters(256);
        if let Some(n) = letters.iter().zip(&rebuilt).position(|(a, b)| a != b) {
            return Err(format!("instance {i}, step {n}"));
        }
    }
    Ok(format!("{} instances x 256 letters", c.cases.len()))
}

fn spectral_identities(c: &Corpus) -> Outcome {
    for (i, (inst, red)) in c.cases.iter().enumerate() {
        let cert = &red.certificate;
        let b = red.stage1.b.charpoly();
        let shifted = &RatPoly::monomial(Rational::one(), cert.ell) * &b;
        ensure(inst.matrix().charpoly() == shifted, || {
            format!("instance {i}: charpoly(M) != x^ell charpoly(B)")
        })?;
        for p in 1..=4 {
            ensure(
                equal_up_to_sign(&red.stage1.b.pow(p as u64).charpoly(), &resultant_with_power(&b, p)),
                || format!("instance {i}: resultant identity at c = {p}"),
            )?;
        }
        ensure(
            equal_up_to_sign(&red.stage2.m2.charpoly(), &resultant_with_power(&b, cert.c)),
            || format!("instance {i}: charpoly(M2)"),
        )?;
        let dim_p = red.stage2.m2.rows() - red.q3.cols();
        let unit = RatPoly::linear(Rational::one()).pow(dim_p as u32);
        ensure(&unit * &red.a.charpoly() == red.stage2.m2.charpoly(), || {
            format!("instance {i}: (x-1)^dimP charpoly(A) != charpoly(M2)")
        })?;
    }
    Ok(format!("{} instances", c.cases.len()))
}

fn separation(eigs: &[(f64, f64)]) -> f64 {
    let mut min = f64::INFINITY;
    let moving: Vec<_> = eigs
        .iter()
        .filter(|(re, im)| (re * re + im * im).sqrt() < 1.0 - 1e-3)
        .collect();
    for (a, x) in moving.iter().enumerate() {
        let r = (x.0 * x.0 + x.1 * x.1).sqrt();
        if r > 0.0 {
            min = min.min(r).min(1.0 - r);
        }
        for y in &moving[a + 1..] {
            min = min.min(((x.0 - y.0).powi(2) + (x.1 - y.1).powi(2)).sqrt());
        }
    }
    min
}

fn dyn_dim_oracle() -> Outcome {
    let mut rng = seeded(77);
    let mut done = 0;
    let mut skipped = 0;
    while done < 100 {
        let k = rng.random_range(1..=4);
        let p = planted_spectrum(&mut rng, k);
        if separation(&p.eigenvalues) < 1e-3 {
            skipped += 1;
            continue;
        }
        let exact = analyze(&p.matrix).dyn_dim;
        let float = float_dyn_dim(&p.matrix, 1e-6);
        ensure(exact == float && exact == p.dyn_dim, || {
            format!("case {done}: exact {exact}, float {float}, planted {}", p.dyn_dim)
        })?;
        done += 1;
    }
    Ok(format!("100 instances agree ({skipped} resampled for separation)"))
}

fn unpack(bits: usize, c: usize) -> impl Fn(Letter) -> Vec<Letter> {
    move |l| (0..c).map(|r| (l >> (r * bits)) & ((1 << bits) - 1)).collect()
}

fn power_construction() -> Outcome {
    let mut rng = seeded(78);
    let mut checks = 0;
    while checks < 10_000 {
        let bits = rng.random_range(1..=2);
        let c = rng.random_range(1..=4);
        let a = random_automaton(&mut rng, bits, 6);
        let p = a
            .power_construct(c, bits * c, unpack(bits, c))
            .map_err(|e| e.to_string())?;
        for _ in 0..25 {
            let w = random_lasso(&mut rng, bits * c, 40 / c);
            let flat = flatten(&w, unpack(bits, c));
            ensure(p.lasso_accept(&w) == simulated_accept(&a, &flat), || {
                format!("check {checks}")
            })?;
            checks += 1;
        }
    }
    Ok(format!("{checks} checks"))
}

fn embedding_round_trip() -> Outcome {
    let s = vec![rat(1, 2), rat(1, 2)];
    let worked =
        embed_lds(&s, &RatMatrix::from_rows(vec![vec![rat(1, 2)]]), &[Rational::one()]).map_err(|e| e.to_string())?;
    let m = RatMatrix::from_rows(vec![vec![rat(3, 4), rat(1, 4)], vec![rat(1, 4), rat(3, 4)]]);
    ensure(worked.m == m && worked.mu == vec![rat(3, 4), rat(1, 4)], || {
        format!("worked fixture gave {:?}", worked.m)
    })?;

    let mut rng = seeded(79);
    for i in 0..100 {
        let k = rng.random_range(1..=4);
        let (a, v) = random_lds(&mut rng, k);
        let targets = vec![random_target(&mut rng, k, 2, true), random_target(&mut rng, k, 1, true)];
        let lds = LdsInstance::new(a.clone(), v.clone(), targets, random_automaton(&mut rng, 2, 3))
            .map_err(|e| e.to_string())?;
        let s = uniform(k + 1);
        let (emb, inst) = embed_instance(&lds, Some(&s)).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(emb.m.entries().all(|x| x > &Rational::zero()), || {
            format!("instance {i}: M not positive")
        })?;
        for j in 0..=k {
            let col: Rational = emb.m.column(j).iter().sum();
            ensure(col.is_one(), || format!("instance {i}: column {j} sums to {col}"))?;
        }
        let mut x = emb.mu.clone();
        let mut y = v.clone();
        let mut scale = emb.eta.clone();
        for n in 0..=50 {
            let expected = vector::add(&s, &vector::scale(&emb.q.mul_vec(&y), &scale));
            ensure(x == expected, || format!("instance {i}: identity fails at n = {n}"))?;
            x = emb.m.mul_vec(&x);
            y = a.mul_vec(&y);
            scale *= &emb.rho;
        }
        ensure(inst.letters(51) == lds.letters(51), || {
            format!("instance {i}: letters differ")
        })?;
    }
    Ok("worked fixture exact, 100 instances x 51 steps".into())
}

fn accepts(v: &Verdict) -> Result<bool, String> {
    match v {
        Verdict::Accept { .. } => Ok(true),
        Verdict::Reject { .. } => Ok(false),
        Verdict::ReducedOnly(_) => Err("fragment left undecided".into()),
    }
}

/// Lasso read off a long exact simulation, checking that the word repeats
/// with period `c` after the prefix.
fn simulated_lasso(inst: &StochasticInstance, red: &ReducedInstance) -> Result<Lasso, String> {
    let cert = &red.certificate;
    let start = cert.prefix_len();
    let horizon = start + cert.c * (inst.spec().num_states() + 1);
    let letters = inst.letters(horizon);
    ensure(
        (start + cert.c..horizon).all(|n| letters[n] == letters[n - cert.c]),
        || "simulated word is not periodic after the prefix".into(),
    )?;
    Ok(Lasso::new(
        letters[..start].to_vec(),
        letters[start..start + cert.c].to_vec(),
    ))
}

fn fragment_decisions() -> Outcome {
    let mut rng = seeded(80);
    let mut tally = [0usize; 2];
    for i in 0..50 {
        let chain = dyn_zero_chain(&mut rng, 2 + i % 5);
        let k = chain.matrix.rows();
        let targets = vec![centred_target(&mut rng, k), centred_target(&mut rng, k)];
        let inst = StochasticInstance::new(
            chain.matrix.clone(),
            chain.initial.clone(),
            targets,
            random_automaton(&mut rng, 2, 5),
        )
        .map_err(|e| e.to_string())?;
        let red = reduce_full(&inst, &ReduceOptions::default()).map_err(|e| e.to_string())?;
        ensure(red.dyn_dim() == 0, || {
            format!("dyn0 case {i} has dyn_dim {}", red.dyn_dim())
        })?;
        let verdict = accepts(&decide_fragment(&inst, &red, &[])).map_err(|e| format!("dyn0 case {i}: {e}"))?;
        let (start, period) = orbit_repeat(&chain.matrix, &chain.initial, 500).ok_or("orbit does not repeat")?;
        let letters = inst.letters(start + period);
        let word = Lasso::new(letters[..start].to_vec(), letters[start..].to_vec());
        ensure(verdict == simulated_accept(inst.spec(), &word), || {
            format!("dyn0 case {i}")
        })?;
        ensure(
            verdict == simulated_accept(inst.spec(), &simulated_lasso(&inst, &red)?),
            || format!("dyn0 case {i}"),
        )?;
        tally[verdict as usize] += 1;
    }
    for i in 0..50 {
        let chain = planted_chain(&mut rng, 3 + i % 4);
        let k = chain.matrix.rows();
        let targets = constant_tail_targets(&mut rng, k);
        let inst = StochasticInstance::new(chain.matrix, chain.initial, targets, random_automaton(&mut rng, 2, 5))
            .map_err(|e| e.to_string())?;
        let red = reduce_full(&inst, &ReduceOptions::default()).map_err(|e| e.to_string())?;
        let verdict = accepts(&decide_fragment(&inst, &red, &[])).map_err(|e| format!("empty-target case {i}: {e}"))?;
        ensure(
            verdict == simulated_accept(inst.spec(), &simulated_lasso(&inst, &red)?),
            || format!("empty-target case {i}"),
        )?;
        tally[verdict as usize] += 1;
    }
    Ok(format!("100 verdicts agree ({} accept, {} reject)", tally[1], tally[0]))
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn exit_code(args: &[&str]) -> Option<i32> {
    Command::new(env!("CARGO_BIN_EXE_distill"))
        .args(args)
        .output()
        .ok()?
        .status
        .code()
}

fn negative_controls(c: &Corpus) -> Outcome {
    let mut caught = 0;
    for (i, (inst, red)) in c.cases.iter().enumerate().take(60) {
        let mut bad = red.clone();
        if bad.certificate.prefix_letters.is_empty() {
            continue;
        }
        let idx = bad.certificate.prefix_letters.len() - 1;
        bad.certificate.prefix_letters[idx] ^= 1;
        match cross_validate(inst, &bad, 64) {
            CrossValidation::Diverge { index, .. } if index == idx => caught += 1,
            other => return Err(format!("instance {i}: corruption reported as {other:?}")),
        }
    }
    ensure(caught >= 10, || format!("only {caught} corruptible certificates"))?;
    let stochastic = exit_code(&["decide", &fixture("non_stochastic.json")]);
    ensure(stochastic == Some(3), || {
        format!("non-stochastic input exited with {stochastic:?}")
    })?;
    let homogeneous = exit_code(&["embed", &fixture("lds_inhomogeneous.json")]);
    ensure(homogeneous == Some(4), || {
        format!("non-homogeneous embed exited with {homogeneous:?}")
    })?;
    Ok(format!("{caught} corrupted certificates caught, exit codes 3 and 4"))
}

fn run(name: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let result = match (result, budget) {
        (Ok(_), Some(b)) if elapsed > b => Err(format!("exceeded {}s budget", b.as_secs())),
        (r, _) => r,
    };
    let (tag, detail, ok) = match result {
        Ok(d) => ("PASS", d, true),
        Err(d) => ("FAIL", d, false),
    };
    println!("{tag} {name} [{:.2}s] {detail}", elapsed.as_secs_f64());
    ok
}

fn main() -> ExitCode {
    let minutes = |m: u64| Some(Duration::from_secs(60 * m));
    let start = Instant::now();
    let corpus = match catch_unwind(corpus) {
        Ok(c) => c,
        Err(_) => {
            println!("FAIL corpus construction");
            return ExitCode::FAILURE;
        }
    };
    println!(
        "corpus of {} reduced instances built in {:.2}s",
        corpus.cases.len(),
        start.elapsed().as_secs_f64()
    );
    let results = [
        run("1 trajectory identity", minutes(2), || trajectory_identity(&corpus)),
        run("2 characteristic-word equivalence", minutes(3), || {
            letter_equivalence(&corpus)
        }),
        run("3 spectral identities", None, || spectral_identities(&corpus)),
        run("4 dynamical-dimension oracle", minutes(1), dyn_dim_oracle),
        run("5 Muller power construction", minutes(1), power_construction),
        run("6 embedding round trip", minutes(1), embedding_round_trip),
        run("7 fragment decisions", minutes(1), fragment_decisions),
        run("8 negative controls", None, || negative_controls(&corpus)),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!(
        "{passed}/{} criteria passed in {:.2}s",
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
