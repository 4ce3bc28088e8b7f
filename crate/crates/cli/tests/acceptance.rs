//! Acceptance suite. Each test prints one `PASS` / `FAIL` line straight to
//! stdout (bypassing the harness capture) and then asserts.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use qpp_core::arith::{divisors, factorize};
use qpp_core::interleave::{generate_s_random, is_mcf, spread_factor, spread_factor_exhaustive, spread_upper_bound};
use qpp_core::parwin::{parallel_turbo_decode, Enforcement};
use qpp_core::poly::{
    count_quadratic_pps, inverse, is_pp_general, is_quadratic_pp, materialize, quadratic_inverses,
    quadratic_pp_with,
};
use qpp_core::turbo::channel::{awgn_channel_with, substream};
use qpp_core::turbo::{code_rate, dmin_upper_bound, encode, run_fer, turbo_decode, FerPoint, RscSpec, SimConfig};
use qpp_core::{Error, Interleaver, PolySpec};
use rand::Rng;

struct Row {
    n: u64,
    f: (u64, u64),
    g: (u64, u64),
    spread: usize,
    divisors: usize,
}

const TABLE: [Row; 4] = [
    Row { n: 256, f: (159, 64), g: (95, 64), spread: 16, divisors: 9 },
    Row { n: 1024, f: (31, 64), g: (991, 64), spread: 32, divisors: 11 },
    Row { n: 4096, f: (2113, 128), g: (4033, 1920), spread: 64, divisors: 13 },
    Row { n: 15120, f: (11, 210), g: (14891, 210), spread: 20, divisors: 80 },
];

/// Weight-3 enumeration bound for the first two reference interleavers,
/// computed once and pinned.
const DMIN_W3_PINNED: [usize; 2] = [27, 27];
const DMIN_REFERENCE: usize = 27;

fn report(id: &str, pass: bool, detail: &str) {
    let line = format!("[acceptance] {id:<4} {} {detail}\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
}

fn qpp(n: u64, f1: u64, f2: u64) -> Interleaver {
    materialize(&PolySpec::quadratic(n, f1, f2).unwrap()).unwrap()
}

fn ex1() -> Interleaver {
    qpp(256, 159, 64)
}

#[test]
fn c1_reference_table() {
    let start = Instant::now();
    let mut problems = Vec::new();
    for row in &TABLE {
        let (f1, f2) = row.f;
        let spec = PolySpec::quadratic(row.n, f1, f2).unwrap();
        if !is_quadratic_pp(row.n, f1, f2).unwrap() {
            problems.push(format!("N={} not a PP", row.n));
            continue;
        }
        let pi = materialize(&spec).unwrap();

        // Pointwise against the listed inverse, coefficient-wise among the
        // quadratic representatives.
        let listed = qpp(row.n, row.g.0, row.g.1);
        if !(0..row.n as usize).all(|x| listed.get(pi.get(x)) == x) {
            problems.push(format!("N={}: listed inverse fails pointwise", row.n));
        }
        let reps = quadratic_inverses(&spec).unwrap();
        if !reps.contains(&row.g) || inverse(&spec).unwrap().as_quadratic() != Some(row.g) {
            problems.push(format!("N={}: quadratic inverses {reps:?}", row.n));
        }

        let d = spread_factor(&pi);
        let d_all = spread_factor_exhaustive(&pi);
        if d != row.spread || d_all != row.spread {
            problems.push(format!("N={}: D={d} (exhaustive {d_all})", row.n));
        }

        let mcf = is_mcf(&pi);
        if !mcf.passed() || mcf.reports.len() != row.divisors {
            problems.push(format!("N={}: MCF over {} divisors, passed={}", row.n, mcf.reports.len(), mcf.passed()));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(300) {
        problems.push(format!("runtime {elapsed:?} over 5 min"));
    }
    let ok = problems.is_empty();
    report("1", ok, &format!("4 rows: PP, inverse, D in {{16,32,64,20}}, MCF over 9/11/13/80 divisors in {elapsed:.2?} {problems:?}"));
    assert!(ok, "{problems:?}");
}

/// Bijection test by direct evaluation, using only additions:
/// f(x + 1) - f(x) = f1 + f2 (2x + 1).
fn permutes_by_evaluation(n: u64, f1: u64, f2: u64, stamp: &mut [u32], token: u32) -> bool {
    let (mut y, mut step) = (0u64, (f1 + f2) % n);
    let two_f2 = 2 * f2 % n;
    for _ in 0..n {
        let slot = &mut stamp[y as usize];
        if *slot == token {
            return false;
        }
        *slot = token;
        y = (y + step) % n;
        step = (step + two_f2) % n;
    }
    true
}

#[test]
fn c2_criterion_sweep() {
    let start = Instant::now();
    let mut disagreements = Vec::new();
    let mut pairs = 0u64;
    let mut stamp = vec![0u32; 513];
    let mut token = 0u32;
    for n in 2u64..=512 {
        let fact = factorize(n).unwrap();
        for f2 in 0..n {
            for f1 in 0..n {
                token += 1;
                pairs += 1;
                if quadratic_pp_with(&fact, f1, f2) != permutes_by_evaluation(n, f1, f2, &mut stamp, token) {
                    disagreements.push((n, f1, f2));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = disagreements.is_empty() && elapsed < Duration::from_secs(600);
    report(
        "2",
        ok,
        &format!("N=2..512, {pairs} pairs, {} disagreements, {elapsed:.2?}", disagreements.len()),
    );
    assert!(ok, "first disagreements: {:?}", &disagreements[..disagreements.len().min(10)]);
}

fn primes_up_to(limit: u64) -> Vec<u64> {
    (2..=limit).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).collect()
}

#[test]
fn c3_counting() {
    let c256 = count_quadratic_pps(256).unwrap();
    report("3a", c256 == 16256, &format!("count(256) = {c256}"));

    let primes = primes_up_to(512);
    let nonzero: Vec<(u64, u64)> = primes
        .iter()
        .map(|&p| (p, count_quadratic_pps(p).unwrap()))
        .filter(|&(_, c)| c != 0)
        .collect();
    let odd_ok = nonzero.iter().all(|&(p, _)| p == 2);
    // Over Z_2, x^2 = x, so (f1, f2) = (0, 1) is a genuine permutation and
    // the closed form, the enumeration and the bijection sweep all agree.
    let two_is_identity = materialize(&PolySpec::quadratic(2, 0, 1).unwrap())
        .map(|pi| pi.as_slice() == [0, 1])
        .unwrap_or(false);
    report(
        "3b",
        nonzero.is_empty(),
        &format!(
            "count = 0 for all {} primes <= 512: nonzero at {nonzero:?}; \
             the {} odd primes give 0, N=2 admits x^2 (= x mod 2)",
            primes.len(),
            primes.len() - 1
        ),
    );
    assert_eq!(c256, 16256);
    assert!(odd_ok, "odd primes with QPPs: {nonzero:?}");
    assert_eq!(nonzero, vec![(2, 1)]);
    assert!(two_is_identity);
}

#[test]
fn c4_higher_degree_mcf() {
    let mut found = Vec::new();
    for n in [16u64, 64, 256] {
        let mut rng = substream(4, &[n]);
        for degree in [3usize, 4] {
            let mut hits = 0;
            while hits < 3 {
                let mut coeffs: Vec<u64> = (0..degree).map(|_| rng.random_range(0..n)).collect();
                if coeffs[degree - 1] == 0 {
                    coeffs[degree - 1] = 1 + rng.random_range(0..n - 1);
                }
                let spec = PolySpec::new(n, coeffs.clone()).unwrap();
                if spec.effective_degree() == degree && is_pp_general(&spec) {
                    let pi = materialize(&spec).unwrap();
                    found.push((n, coeffs, is_mcf(&pi).passed()));
                    hits += 1;
                }
            }
        }
    }
    let failing: Vec<_> = found.iter().filter(|f| !f.2).collect();
    let ok = found.len() >= 10 && failing.is_empty();
    report(
        "4",
        ok,
        &format!("{} degree-3/4 PPs over N in {{16,64,256}}, {} not MCF", found.len(), failing.len()),
    );
    assert!(ok, "{failing:?}");
}

#[test]
fn c5_parallel_equivalence() {
    let pi = ex1();
    let spec = RscSpec::umts();
    let rate = code_rate(pi.len(), &spec);
    let mut mismatches = 0;
    let mut events = 0;
    for frame in 0..100u64 {
        let mut rng = substream(5, &[frame]);
        let info: Vec<u8> = (0..pi.len()).map(|_| rng.random_range(0..2u8)).collect();
        let llrs = awgn_channel_with(&encode(&info, &pi, &spec).unwrap(), 1.0, rate, &mut rng);
        let serial = turbo_decode(&llrs, &pi, 8).unwrap();
        for m in [2, 4, 8, 16] {
            let par = parallel_turbo_decode(&llrs, &pi, m, 8, Enforcement::Record).unwrap();
            mismatches += usize::from(par.output.bits != serial.bits);
            events += par.contentions.len();
        }
    }

    let fixture = Interleaver::new(vec![0, 2, 1, 3]).unwrap();
    let mut rng = substream(5, &[u64::MAX]);
    let llrs = awgn_channel_with(
        &encode(&[1, 0, 1, 1], &fixture, &spec).unwrap(),
        1.0,
        code_rate(4, &spec),
        &mut rng,
    );
    let recorded = parallel_turbo_decode(&llrs, &fixture, 2, 8, Enforcement::Record).unwrap();
    let strict = parallel_turbo_decode(&llrs, &fixture, 2, 8, Enforcement::Strict);
    let fixture_events = recorded.contentions.len();
    let strict_rejects = matches!(strict, Err(Error::Contention(_)));

    let ok = mismatches == 0 && events == 0 && fixture_events >= 1 && strict_rejects;
    report(
        "5",
        ok,
        &format!(
            "100 frames x M in {{2,4,8,16}}: {mismatches} mismatches, {events} contentions; \
             4-point fixture: {fixture_events} contentions, strict mode rejects: {strict_rejects}"
        ),
    );
    assert!(ok);
}

#[test]
fn c6_dmin_bound() {
    let spec = RscSpec::umts();
    let bounds = [dmin_upper_bound(&ex1(), &spec, 3).unwrap(), dmin_upper_bound(&qpp(1024, 31, 64), &spec, 3).unwrap()];
    let weights = [bounds[0].weight, bounds[1].weight];
    let ok = weights.iter().all(|&w| w >= DMIN_REFERENCE) && weights == DMIN_W3_PINNED;
    report(
        "6",
        ok,
        &format!(
            "weight<=3 bounds {weights:?} (pinned {DMIN_W3_PINNED:?}, reference {DMIN_REFERENCE}); witnesses {:?} {:?}",
            bounds[0].positions, bounds[1].positions
        ),
    );
    assert!(ok);
}

fn sim(pi: Interleaver, grid: &[f64], target: u64, max_frames: u64, seed: u64) -> Vec<FerPoint> {
    let config = SimConfig {
        target_frame_errors: target,
        max_frames,
        seed,
        ..SimConfig::new(pi, grid.to_vec())
    };
    run_fer(&config).unwrap()
}

fn fmt_points(points: &[FerPoint]) -> String {
    points
        .iter()
        .map(|p| format!("{}dB:{:.2e}({}/{})", p.ebn0_db, p.fer, p.frame_errors, p.frames))
        .collect::<Vec<_>>()
        .join(" ")
}

#[test]
fn c7a_noiseless_is_error_free() {
    let mut fixtures: Vec<(String, Interleaver)> =
        TABLE.iter().map(|r| (format!("qpp{}", r.n), qpp(r.n, r.f.0, r.f.1))).collect();
    fixtures.push(("srandom256".into(), generate_s_random(256, 11, 1, 10_000).unwrap()));
    let mut dirty = Vec::new();
    for (name, pi) in fixtures {
        let p = &sim(pi, &[f64::INFINITY], 1, 16, 7)[0];
        if p.frame_errors != 0 || p.bit_errors != 0 || p.frames != 16 {
            dirty.push((name, p.frame_errors, p.bit_errors));
        }
    }
    report("7a", dirty.is_empty(), &format!("16 noiseless frames per fixture, errors: {dirty:?}"));
    assert!(dirty.is_empty());
}

/// Adjacent points may rise only while their 95% intervals overlap.
fn monotone_within_ci(points: &[FerPoint]) -> bool {
    points.windows(2).all(|w| w[1].lower() <= w[0].upper())
}

#[test]
fn c7b_monotone_waterfall() {
    let short = sim(ex1(), &[0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6], 100, 200_000, 71);
    let long = sim(qpp(1024, 31, 64), &[0.2, 0.4, 0.6], 100, 50_000, 72);
    let enough_errors = short.iter().chain(&long).all(|p| p.frame_errors >= 100);
    let ok = monotone_within_ci(&short) && monotone_within_ci(&long) && enough_errors;
    report(
        "7b",
        ok,
        &format!("N=256 {} | N=1024 {}", fmt_points(&short), fmt_points(&long)),
    );
    assert!(ok);
}

#[test]
fn c7c_interleaver_gain() {
    const EBN0: f64 = 0.4;
    let f256 = sim(ex1(), &[EBN0], 100, 20_000, 73)[0].clone();
    let f1024 = sim(qpp(1024, 31, 64), &[EBN0], 100, 20_000, 73)[0].clone();
    let f4096 = sim(qpp(4096, 2113, 128), &[EBN0], 40, 5_000, 73)[0].clone();
    let ok = f4096.fer < f1024.fer && f1024.fer < f256.fer;
    report(
        "7c",
        ok,
        &format!(
            "at {EBN0} dB: N=4096 {:.3e}±{:.1e} < N=1024 {:.3e}±{:.1e} < N=256 {:.3e}±{:.1e}",
            f4096.fer, f4096.ci95, f1024.fer, f1024.ci95, f256.fer, f256.ci95
        ),
    );
    assert!(ok);
}

#[test]
fn c7d_matches_s_random() {
    const EBN0: f64 = 1.0;
    let srandom = generate_s_random(256, 11, 1, 10_000).unwrap();
    let q = sim(ex1(), &[EBN0], 100, 50_000, 74)[0].clone();
    let s = sim(srandom, &[EBN0], 100, 50_000, 74)[0].clone();
    let ratio = q.fer.max(s.fer) / q.fer.min(s.fer);
    let ok = ratio <= 3.0;
    report(
        "7d",
        ok,
        &format!("at {EBN0} dB: QPP {:.3e}, S-random(S=11) {:.3e}, ratio {ratio:.2}", q.fer, s.fer),
    );
    assert!(ok);
}

fn run_cli(dir: &Path, args: &[&str]) {
    let status = Command::new(env!("CARGO_BIN_EXE_qpp"))
        .args(args)
        .current_dir(dir)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .status()
        .unwrap();
    assert!(status.code().is_some_and(|c| c <= 1), "{args:?}: {status}");
}

#[test]
fn c8_determinism() {
    let dir = tempfile::TempDir::new().unwrap();
    let d = dir.path();
    fs::write(
        d.join("fer.cfg"),
        "interleaver = qpp 256 159 64\nebn0 = 0.8:0.2:1.2\nseed = 11\niterations = 8\n\
         target_errors = 10\nmax_frames = 300\n",
    )
    .unwrap();
    let runs: [(&str, Vec<&str>); 4] = [
        ("fer", vec!["fer", "fer.cfg"]),
        ("fer-threads", vec!["fer", "fer.cfg", "--threads", "3"]),
        ("srandom", vec!["srandom", "256", "11", "--seed", "5"]),
        ("partrace", vec!["partrace", "qpp", "256", "159", "64", "-m", "8", "--frames", "3", "--format", "json"]),
    ];
    let mut identical = Vec::new();
    for (name, args) in &runs {
        let mut files = Vec::new();
        for rep in 0..2 {
            let out = format!("{name}.{rep}.out");
            let mut a = args.clone();
            a.extend(["--out", out.as_str()]);
            run_cli(d, &a);
            let mut bytes = fs::read(d.join(&out)).unwrap();
            if let Ok(side) = fs::read(d.join(format!("{out}.manifest.json"))) {
                bytes.extend(side);
            }
            files.push(bytes);
        }
        identical.push((*name, files[0] == files[1] && !files[0].is_empty()));
    }
    // Thread count is not part of the result.
    let cross = fs::read(d.join("fer.0.out")).unwrap() == fs::read(d.join("fer-threads.0.out")).unwrap();
    let ok = identical.iter().all(|x| x.1) && cross;
    report("8", ok, &format!("byte-identical reruns {identical:?}, 1 vs 3 threads identical: {cross}"));
    assert!(ok);
}

#[test]
fn divisor_counts_match_table() {
    for row in &TABLE {
        assert_eq!(divisors(row.n).len(), row.divisors);
    }
    assert!((spread_upper_bound(256) - 22.627).abs() < 1e-3);
}
