//! End-to-end acceptance criteria, one line per criterion.

use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use orbispark::format::{load_file, Loaded};
use orbispark_core::atlas::GoodAtlas;
use orbispark_core::cochain::Domain;
use orbispark_core::homology::{cohomology_all, CohomologyGroup};
use orbispark_core::report::{Status, ValidationReport};
use orbispark_core::suites::{appendix_suite, complex_suite, cup_suite, functor_suite, homotopy_suite, ProbeConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

fn fixture(name: &str) -> Loaded {
    load_file(&fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn single_atlases() -> Vec<Arc<GoodAtlas>> {
    ["s1-arcs", "mirror-interval", "cone-z4"].iter().map(|n| fixture(n).atlases[0].clone()).collect()
}

/// Every check whose name starts with one of `prefixes` passed with at least `min_probes` probes.
fn require(r: &ValidationReport, prefixes: &[&str], min_probes: usize) -> Result<usize, String> {
    let mut seen = 0;
    for p in prefixes {
        let matching: Vec<_> = r.checks.iter().filter(|c| c.name.starts_with(p)).collect();
        if matching.is_empty() {
            return Err(format!("no check named {p}*"));
        }
        for c in matching {
            if c.status != Status::Pass {
                return Err(format!("{} is {}: {}", c.name, c.status.as_str(), c.detail));
            }
            if c.probes < min_probes {
                return Err(format!("{} ran {} probes, need {min_probes}", c.name, c.probes));
            }
            seen += 1;
        }
    }
    Ok(seen)
}

fn all_pass(r: &ValidationReport) -> Result<usize, String> {
    match r.checks.iter().find(|c| c.status != Status::Pass) {
        Some(c) => Err(format!("{} is {}: {}", c.name, c.status.as_str(), c.detail)),
        None => Ok(r.checks.len()),
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    if t < limit {
        Ok(t)
    } else {
        Err(format!("took {t:.2?}, limit {limit:?}"))
    }
}

fn complex_axioms() -> Outcome {
    let cfg = ProbeConfig { probes: 100, seed: 1, ..ProbeConfig::default() };
    let start = Instant::now();
    let mut n = 0;
    for a in single_atlases() {
        let r = complex_suite(&a, Domain::Subsets, &cfg);
        let tag = format!("[{}]", a.name());
        let names: Vec<String> = ["delta-squared", "d-squared", "commuting-square", "total-squared"]
            .iter()
            .map(|c| format!("complex.{c}{tag}"))
            .collect();
        n += require(&r, &names.iter().map(String::as_str).collect::<Vec<_>>(), 100)?;
    }
    let t = within(start, Duration::from_secs(10))?;
    Ok(format!("{n} identities x 100 cochains on 3 fixtures in {t:.2?}"))
}

fn triple_clauses() -> Outcome {
    let cfg = ProbeConfig::default();
    let mut n = 0;
    for a in single_atlases() {
        for d in [Domain::Subsets, Domain::Vertices] {
            let r = complex_suite(&a, d, &cfg);
            n += require(&r, &["triple.intersection", "triple.global-forms-closed", "triple.integers-closed"], 1)?;
        }
    }
    Ok(format!("{n} clause checks on both complexes of 3 fixtures"))
}

fn functor_laws() -> Outcome {
    let chain = fixture("chain");
    let cfg = ProbeConfig { probes: 50, seed: 3, ..ProbeConfig::default() };
    let r = functor_suite(&chain.systems, &cfg);
    let n = require(&r, &["functor.identity", "functor.composite"], 50)?;
    all_pass(&r)?;
    Ok(format!("{n} identity and composite laws, 50 cochains each"))
}

fn homotopy_identities() -> Outcome {
    let start = Instant::now();
    let cfg = ProbeConfig { seed: 4, ..ProbeConfig::default() };
    let mut n = 0;
    for name in ["chain", "mirror-interval"] {
        let r = homotopy_suite(&fixture(name).transformations, &cfg);
        let bases = ["homotopy.alpha", "homotopy.gamma", "homotopy.xi"];
        n += require(&r, &bases, 1)?;
        for side in ["vanishes-on-global-forms", "preserves-integers"] {
            for base in bases {
                if !r.checks.iter().any(|c| c.name.starts_with(base) && c.name.ends_with(side)) {
                    return Err(format!("{name}: no {base} {side} check"));
                }
            }
        }
        all_pass(&r)?;
    }
    let t = within(start, Duration::from_secs(60))?;
    Ok(format!("{n} identity and side-condition checks in {t:.2?}"))
}

fn ring_laws() -> Outcome {
    let cfg = ProbeConfig { seed: 5, ..ProbeConfig::default() };
    let mut n = 0;
    let mut unknown = 0;
    for a in single_atlases() {
        for d in [Domain::Subsets, Domain::Vertices] {
            let r = cup_suite(&a, d, &cfg);
            unknown += r.checks.iter().filter(|c| c.status == Status::Unknown).count();
            n += require(&r, &["cup.leibniz", "cup.character-product"], 1)?;
        }
        n += require(&appendix_suite(&a, &cfg), &["appendix.phi-ring-hom"], 1)?;
    }
    let chain = fixture("chain");
    let mirror = fixture("mirror-interval");
    for systems in [&chain.systems, &mirror.systems] {
        n += require(&functor_suite(systems, &cfg), &["functor.ring-hom"], 1)?;
    }
    if unknown > 0 {
        return Err(format!("{unknown} UNKNOWN character products"));
    }
    Ok(format!("{n} checks, 0 UNKNOWN"))
}

fn appendix() -> Outcome {
    let cfg = ProbeConfig { seed: 6, ..ProbeConfig::default() };
    let s1 = fixture("s1-arcs").atlases[0].clone();
    let r = appendix_suite(&s1, &cfg);
    require(
        &r,
        &[
            "appendix.phi-cochain-map",
            "appendix.phi-injective",
            "appendix.global-forms-iso",
            "appendix.cohomology-iso[H0]",
            "appendix.cohomology-iso[H1]",
        ],
        1,
    )?;
    all_pass(&r)?;
    for a in single_atlases() {
        let (big, small) = (cohomology_all(&a, Domain::Subsets), cohomology_all(&a, Domain::Vertices));
        let beyond = |h: &[CohomologyGroup], from: usize| h.iter().skip(from).all(CohomologyGroup::is_zero);
        let n = big.len().min(small.len());
        if big[..n] != small[..n] || !beyond(&big, n) || !beyond(&small, n) {
            return Err(format!("{}: big and small cohomology differ", a.name()));
        }
    }
    Ok(format!("{} checks on s1-arcs; big = small on 3 fixtures", r.checks.len()))
}

/// Betti numbers of the nerve modulo `p` by elimination on simplicial cochains.
fn nerve_betti(a: &GoodAtlas, p: u64) -> Vec<usize> {
    let simplices: Vec<Vec<usize>> = a.nonempty_indices().iter().map(|i| i.members().collect()).collect();
    let top = simplices.iter().map(Vec::len).max().unwrap_or(0);
    let of_dim = |k: usize| simplices.iter().filter(|s| s.len() == k + 1).cloned().collect::<Vec<_>>();
    // rank of the coboundary C^k -> C^{k+1}
    let rank = |k: usize| {
        let (low, high) = (of_dim(k), of_dim(k + 1));
        let mut rows: Vec<Vec<u64>> = high
            .iter()
            .map(|t| {
                low.iter()
                    .map(|s| {
                        match (0..t.len()).find(|&j| {
                            t.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &x)| x).eq(s.iter().copied())
                        }) {
                            Some(j) if j % 2 == 0 => 1,
                            Some(_) => p - 1,
                            None => 0,
                        }
                    })
                    .collect()
            })
            .collect();
        let mut r = 0;
        for col in 0..low.len() {
            let Some(piv) = (r..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
            rows.swap(r, piv);
            let inv = pow(rows[r][col], p - 2, p);
            let pivot = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row[col] != 0 {
                    let f = row[col] * inv % p;
                    for (x, y) in row.iter_mut().zip(&pivot) {
                        *x = (*x + p - f * y % p) % p;
                    }
                }
            }
            r += 1;
        }
        r
    };
    (0..top).map(|k| of_dim(k).len() - rank(k) - if k > 0 { rank(k - 1) } else { 0 }).collect()
}

fn pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut out = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            out = out * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    out
}

fn cohomology_ground_truth() -> Outcome {
    let expected: [(&str, &[usize]); 3] = [("s1-arcs", &[1, 1]), ("mirror-interval", &[1, 0]), ("cone-z4", &[1, 0])];
    for (name, want) in expected {
        let a = fixture(name).atlases[0].clone();
        let mut oracle = nerve_betti(&a, 1_000_003);
        if nerve_betti(&a, 2) != oracle || nerve_betti(&a, 3) != oracle {
            return Err(format!("{name}: nerve has torsion"));
        }
        oracle.resize(oracle.len().max(want.len()), 0);
        if &oracle[..want.len()] != want || oracle[want.len()..].iter().any(|&b| b != 0) {
            return Err(format!("{name}: nerve Betti numbers {oracle:?}, expected {want:?}"));
        }
        for d in [Domain::Subsets, Domain::Vertices] {
            let h = cohomology_all(&a, d);
            for (k, g) in h.iter().enumerate() {
                let b = oracle.get(k).copied().unwrap_or(0);
                if g.free_rank != b || !g.torsion.is_empty() {
                    return Err(format!("{name} {d:?}: H{k} = {g}, oracle rank {b}"));
                }
            }
        }
    }
    Ok("s1-arcs (Z,Z); mirror-interval, cone-z4 (Z,0); matches nerve oracle".into())
}

fn char_consistency() -> Outcome {
    let m = fixture("mirror-interval");
    let flip: Vec<_> = m.transformations.iter().filter(|t| t.name() == "flip").cloned().collect();
    let r = homotopy_suite(&flip, &ProbeConfig { seed: 8, ..ProbeConfig::default() });
    require(&r, &["homotopy.char-consistency[flip]"], 10)?;
    let c = r.checks.iter().find(|c| c.name == "homotopy.char-consistency[flip]").expect("present");
    Ok(format!("{} sparks transported with b = ᾱa, s = -ᾱr", c.probes))
}

fn determinism() -> Outcome {
    let mut n = 0;
    for f in ["chain", "mirror-interval", "s1-arcs"] {
        let path = fixture_path(f);
        let run = || {
            let out = Command::new(env!("CARGO_BIN_EXE_orbispark"))
                .args(["--format", "json", "verify"])
                .arg(&path)
                .args(["--suite", "all", "--seed", "9", "--probes", "3"])
                .output()
                .expect("binary runs");
            out.stdout
        };
        let (a, b) = (run(), run());
        if a.is_empty() || a != b {
            return Err(format!("{f}: reports differ"));
        }
        n += a.len();
    }
    Ok(format!("3 repeated verify runs byte-identical ({n} bytes)"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("complex axioms", complex_axioms),
        ("spark triple clauses", triple_clauses),
        ("functor laws", functor_laws),
        ("homotopy identities", homotopy_identities),
        ("ring laws", ring_laws),
        ("appendix quasi-isomorphism", appendix),
        ("cohomology ground truth", cohomology_ground_truth),
        ("character consistency", char_consistency),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("criterion {} {name}: PASS ({msg})", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({msg})", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
