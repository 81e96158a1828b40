//! Seeded identity suites.
//!
//! Every operator identity is checked by exact evaluation of both sides on
//! random invariant cochains, alternating and ordered, at all canonical
//! strings and a sample of arbitrary words.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::One;

use crate::atlas::GoodAtlas;
use crate::cochain::linear::global_forms;
use crate::cochain::random::CochainSampler;
use crate::cochain::{
    alternates_at, canonical_support, combination, cup_expr, delta_expr, ext_d_expr, first_difference, materialize,
    stored, total_d_expr, view, CochainExpr, Domain, Expr, GlobalForm, IntCochain, OrderedCochain,
};
use crate::fixtures;
use crate::functorial::{homotopy_alpha, homotopy_gamma, homotopy_xi, phi_extend, pullback_system, ChoiceMap};
use crate::homology::{cohomology_all, compare_quasi_iso};
use crate::indexcomb::IndexString;
use crate::morphisms::{compose_systems, hcompose_nat, vcompose_nat, CompatibleSystem, NaturalTransformation};
use crate::polyform::{PolyForm, Rational};
use crate::report::{Check, Status, ValidationReport};
use crate::spark::{
    character_mul, compose_horizontal, compose_vertical, sample_spark, spark_decompose, transport_along, Equivalence,
    Homotopic, SearchBound, Spark, SparkCharacter, SparkHom, SparkHomotopy,
};
use crate::{Error, Result};

/// Probe parameters shared by all suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeConfig {
    pub seed: u64,
    /// Random inputs per identity.
    pub probes: usize,
    /// Polynomial degree of random coefficients.
    pub max_deg: u32,
    /// Random words sampled per word length, on top of all canonical strings.
    pub words: usize,
    /// Witness search bound for spark equivalence.
    pub bound: SearchBound,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { seed: 0, probes: 8, max_deg: 3, words: 24, bound: SearchBound::default() }
    }
}

/// A sampler seeded by the configuration and the check name, so checks are
/// independent of the order they run in.
fn sampler(cfg: &ProbeConfig, name: &str) -> CochainSampler {
    // FNV-1a
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    CochainSampler::new(cfg.seed ^ h, cfg.max_deg)
}

struct Tally {
    probes: usize,
    failure: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { probes: 0, failure: None }
    }

    fn run(&mut self, f: impl FnOnce() -> Result<Option<String>>) {
        self.probes += 1;
        if self.failure.is_some() {
            return;
        }
        match f() {
            Ok(None) => {}
            Ok(Some(m)) => self.failure = Some(format!("probe {}: {m}", self.probes)),
            Err(e) => self.failure = Some(format!("probe {}: {e}", self.probes)),
        }
    }

    fn check(self, name: &str, anchor: &str) -> Check {
        let mut c = Check::from_outcome(name, anchor, self.probes, self.failure);
        if self.probes == 0 {
            c.detail = "no instances in this fixture".into();
        }
        c
    }
}

fn complex_tag(atlas: &GoodAtlas, domain: Domain) -> String {
    match domain {
        Domain::Subsets => format!("[{}]", atlas.name()),
        Domain::Vertices => format!("[{}/small]", atlas.name()),
    }
}

/// All canonical strings up to `max_len` plus random words of each length.
fn probe_words(
    atlas: &GoodAtlas,
    domain: Domain,
    max_len: usize,
    s: &mut CochainSampler,
    count: usize,
) -> Vec<IndexString> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        out.extend(canonical_support(atlas, domain, len));
        out.extend(s.words(atlas, domain, len, count).into_iter().filter(|w| !w.is_canonical()));
    }
    out
}

fn compare(a: &dyn CochainExpr, b: &dyn CochainExpr, words: &[IndexString]) -> Result<Option<String>> {
    Ok(first_difference(a, b, words)?.map(|w| format!("sides differ at {}", a.atlas().vertices().format_string(&w))))
}

fn vanishes(vals: &[PolyForm], words: &[IndexString], atlas: &GoodAtlas) -> Result<Option<String>> {
    Ok(nonzero_at(vals, words, atlas, |v| !v.is_zero()).map(|m| format!("nonzero {m}")))
}

fn values(a: &dyn CochainExpr, words: &[IndexString]) -> Result<Vec<PolyForm>> {
    words.iter().map(|w| a.value(w)).collect()
}

fn nonzero_at(
    vals: &[PolyForm],
    words: &[IndexString],
    atlas: &GoodAtlas,
    bad: impl Fn(&PolyForm) -> bool,
) -> Option<String> {
    vals.iter().zip(words).find(|(v, _)| bad(v)).map(|(_, w)| format!("at {}", atlas.vertices().format_string(w)))
}

fn integral_on_values(vals: &[PolyForm], words: &[IndexString], atlas: &GoodAtlas) -> Result<Option<String>> {
    Ok(nonzero_at(vals, words, atlas, |v| !v.is_zero() && v.as_constant().is_none_or(|c| !c.is_integer()))
        .map(|m| format!("non-integral value {m}")))
}

fn integral_on(a: &dyn CochainExpr, words: &[IndexString]) -> Result<Option<String>> {
    for w in words {
        let v = a.value(w)?;
        if !v.is_zero() && v.as_constant().is_none_or(|c| !c.is_integer()) {
            return Ok(Some(format!("non-integral value at {}", a.atlas().vertices().format_string(w))));
        }
    }
    Ok(None)
}

fn bidegrees(pmax: usize, n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for p in 0..=pmax {
        for q in 0..=n {
            out.push((p, q));
        }
    }
    out
}

/// A random input: alternating on even probes, ordered on odd ones.
fn random_input(
    s: &mut CochainSampler,
    atlas: &Arc<GoodAtlas>,
    domain: Domain,
    bidegs: &[(usize, usize)],
    i: usize,
    words: usize,
) -> OrderedCochain {
    let pmax = bidegs.iter().map(|b| b.0).max().unwrap_or(0);
    if i.is_multiple_of(2) {
        OrderedCochain::from_cochain(&s.cochain(atlas, domain, bidegs), pmax + 1)
    } else {
        s.ordered_cochain(atlas, domain, bidegs, words)
    }
}

fn random_integers(s: &mut CochainSampler, atlas: &Arc<GoodAtlas>, domain: Domain, pmax: usize) -> OrderedCochain {
    let mut c = IntCochain::zero(atlas.clone(), domain).to_cochain();
    for p in 0..=pmax {
        c = c.add(&s.int_cochain(atlas, domain, p).to_cochain()).expect("same complex");
    }
    OrderedCochain::from_cochain(&c, pmax + 1)
}

fn one() -> Rational {
    Rational::one()
}

fn minus() -> Rational {
    -Rational::one()
}

fn pm(k: usize) -> Rational {
    if k.is_multiple_of(2) {
        one()
    } else {
        minus()
    }
}

/// Complex axioms, spark-triple clauses and spark decomposition.
pub fn complex_suite(atlas: &Arc<GoodAtlas>, domain: Domain, cfg: &ProbeConfig) -> ValidationReport {
    let mut report = ValidationReport::default();
    let tag = complex_tag(atlas, domain);
    let n = atlas.dimension();
    let pmax = 2;
    let bidegs = bidegrees(pmax, n);

    type Side = for<'a> fn(Expr<'a>) -> Result<(Expr<'a>, Expr<'a>)>;
    let axioms: [(&str, &str, Side); 4] = [
        ("complex.delta-squared", "δδ = 0", |e| Ok((delta_expr(delta_expr(e.clone())), scaled_zero(e)?))),
        ("complex.d-squared", "dd = 0", |e| Ok((ext_d_expr(ext_d_expr(e.clone())), scaled_zero(e)?))),
        ("complex.commuting-square", "δd = dδ", |e| {
            Ok((delta_expr(ext_d_expr(e.clone())), ext_d_expr(delta_expr(e))))
        }),
        ("complex.total-squared", "D̄D̄ = 0", |e| Ok((total_d_expr(total_d_expr(e.clone())), scaled_zero(e)?))),
    ];
    for (name, anchor, sides) in axioms {
        let name = format!("{name}{tag}");
        let mut s = sampler(cfg, &name);
        let words = probe_words(atlas, domain, pmax + 3, &mut s, cfg.words);
        let mut t = Tally::new();
        for i in 0..cfg.probes {
            let w = random_input(&mut s, atlas, domain, &bidegs, i, cfg.words);
            t.run(|| {
                let (a, b) = sides(view(&w))?;
                compare(&*a, &*b, &words)
            });
        }
        report.push(t.check(&name, anchor));
    }

    let name = format!("complex.alternation{tag}");
    let mut s = sampler(cfg, &name);
    let words = probe_words(atlas, domain, pmax + 2, &mut s, cfg.words);
    let mut t = Tally::new();
    for _ in 0..cfg.probes {
        let c = s.cochain(atlas, domain, &bidegs);
        t.run(|| {
            let d = total_d_expr(stored(&c));
            for w in &words {
                if !alternates_at(&c, w)? || !alternates_at(&*d, w)? {
                    return Ok(Some(format!("not alternating at {}", atlas.vertices().format_string(w))));
                }
            }
            Ok(None)
        });
    }
    report.push(t.check(&name, "values at permuted strings carry the permutation sign"));

    let name = format!("complex.bidegree{tag}");
    let mut s = sampler(cfg, &name);
    let mut t = Tally::new();
    for _ in 0..cfg.probes {
        let c = s.cochain(atlas, domain, &bidegs);
        t.run(|| {
            let parts = c.decompose_bidegree();
            let mut sum = crate::cochain::Cochain::zero(atlas.clone(), domain);
            for ((p, q), part) in &parts {
                sum = sum.add(part)?;
                let dp = crate::cochain::cech_delta(part);
                if dp.bidegrees().iter().any(|&b| b != (p + 1, *q)) {
                    return Ok(Some(format!("δ of a ({p},{q}) part leaves bidegree ({},{q})", p + 1)));
                }
                let ep = crate::cochain::exterior_d(part);
                if ep.bidegrees().iter().any(|&b| b != (*p, q + 1)) {
                    return Ok(Some(format!("d of a ({p},{q}) part leaves bidegree ({p},{})", q + 1)));
                }
            }
            Ok((sum != c).then(|| "parts do not recombine".to_string()))
        });
    }
    report.push(t.check(&name, "bidegree decomposition and the bidegrees of δ and d"));

    report.push(restriction_independence(atlas, domain, cfg));
    report.extend(triple_clauses(atlas, domain, cfg));

    let name = format!("spark.decomposition{tag}");
    let mut s = sampler(cfg, &name);
    let mut t = Tally::new();
    for i in 0..cfg.probes.min(12) {
        let k = i % (n + 1).min(2);
        t.run(|| {
            let sp = sample_spark(atlas, domain, k, &mut s)?;
            let (e, r) = spark_decompose(sp.a(), k)?;
            if &e != sp.e() || &r != sp.r() {
                return Ok(Some("decomposition is not deterministic".into()));
            }
            let d = OrderedCochain::tabulate(&*total_d_expr(view(sp.a())), k + 2)?;
            let split = OrderedCochain::from_cochain(e.cochain(), 1).sub(&r)?;
            if d != split {
                return Ok(Some("D a differs from e - r".into()));
            }
            if d.part(0, k + 1) != OrderedCochain::from_cochain(e.cochain(), 1) || d.part(k + 1, 0).neg() != r {
                return Ok(Some("e - r does not split back".into()));
            }
            Ok(None)
        });
    }
    report.push(t.check(&name, "the spark equation D̄a = e − r has a unique solution"));
    report
}

fn scaled_zero(e: Expr<'_>) -> Result<Expr<'_>> {
    let z = Rational::from_integer(0.into());
    combination(vec![(z, e)])
}

/// Restricting along a composite of stored embeddings agrees with the stored embedding.
fn restriction_independence(atlas: &Arc<GoodAtlas>, domain: Domain, cfg: &ProbeConfig) -> Check {
    let name = format!("complex.restriction-independence{}", complex_tag(atlas, domain));
    let mut s = sampler(cfg, &name);
    let mut t = Tally::new();
    let arrows: Vec<_> = atlas.embeddings().map(|a| (a.source, a.target)).filter(|(i, j)| i != j).collect();
    for &(i, j) in &arrows {
        for &(j2, k) in &arrows {
            if j2 != j || !atlas.has_embedding(i, k) {
                continue;
            }
            let group = atlas.group(k).expect("nonempty chart").clone();
            for q in 0..=atlas.dimension() {
                let f = group.average(&s.form(atlas.dimension(), q));
                t.run(|| {
                    let direct = atlas.restrict(&f, i, k)?;
                    let stepwise = atlas.restrict(&atlas.restrict(&f, j, k)?, i, j)?;
                    Ok((direct != stepwise)
                        .then(|| format!("{} -> {} -> {}", atlas.fmt_index(i), atlas.fmt_index(j), atlas.fmt_index(k))))
                });
            }
        }
    }
    t.check(&name, "restriction is independent of the chain of embeddings")
}

fn triple_clauses(atlas: &Arc<GoodAtlas>, domain: Domain, cfg: &ProbeConfig) -> ValidationReport {
    let mut report = ValidationReport::default();
    let tag = complex_tag(atlas, domain);
    let n = atlas.dimension();
    let top = domain.alphabet(atlas).len();

    // In positive degree k, Ē^k sits in bidegree (0, k) and Ī^k in (k, 0).
    let mut t = Tally::new();
    for k in 1..=top.max(n) {
        t.run(|| {
            let forms = global_forms(atlas, domain, k.min(n + 1), 1);
            let e_bideg: Vec<_> = forms.iter().flat_map(|g| g.cochain().bidegrees()).collect();
            Ok(e_bideg.iter().any(|&(p, q)| p != 0 || q == 0).then(|| format!("global form outside (0,{k})")))
        });
    }
    report.push(t.check(&format!("triple.intersection{tag}"), "Ē ∩ Ī = 0 in positive degree"));

    let mut t = Tally::new();
    for q in 0..=n {
        for g in global_forms(atlas, domain, q, 2) {
            t.run(|| {
                let d = crate::cochain::total_d(g.cochain());
                Ok(GlobalForm::new(d).err().map(|e| format!("D̄ of a global {q}-form: {e}")))
            });
        }
    }
    report.push(t.check(&format!("triple.global-forms-closed{tag}"), "Ē is stable under D̄"));

    let name = format!("triple.integers-closed{tag}");
    let mut s = sampler(cfg, &name);
    let mut t = Tally::new();
    for i in 0..cfg.probes {
        let p = i % top.max(1);
        let r = s.int_cochain(atlas, domain, p);
        t.run(|| {
            let d = crate::cochain::total_d(&r.to_cochain());
            Ok(IntCochain::from_cochain(&d).is_none().then(|| format!("D̄ of an integer {p}-cochain is not integral")))
        });
    }
    report.push(t.check(&name, "Ī is stable under D̄"));
    report
}

/// Leibniz rule, associativity and the ring of spark characters.
pub fn cup_suite(atlas: &Arc<GoodAtlas>, domain: Domain, cfg: &ProbeConfig) -> ValidationReport {
    let mut report = ValidationReport::default();
    let tag = complex_tag(atlas, domain);
    let n = atlas.dimension();

    let name = format!("cup.leibniz{tag}");
    let mut s = sampler(cfg, &name);
    let words = probe_words(atlas, domain, 4, &mut s, cfg.words);
    let mut t = Tally::new();
    for i in 0..cfg.probes {
        let (m, j) = (s.below(2), s.below(n + 1));
        let (p, k) = (s.below(2), s.below(n + 1));
        let w = random_input(&mut s, atlas, domain, &[(m, j)], i, cfg.words);
        let h = random_input(&mut s, atlas, domain, &[(p, k)], i + 1, cfg.words);
        t.run(|| {
            let lhs = total_d_expr(cup_expr(view(&w), view(&h))?);
            let rhs = combination(vec![
                (one(), cup_expr(total_d_expr(view(&w)), view(&h))?),
                (pm(j + m), cup_expr(view(&w), total_d_expr(view(&h)))?),
            ])?;
            compare(&*lhs, &*rhs, &words)
        });
    }
    report.push(t.check(&name, "D̄(ω∪η) = D̄ω∪η + (−1)^{j+m} ω∪D̄η"));

    let name = format!("cup.associativity{tag}");
    let mut s = sampler(cfg, &name);
    let words = probe_words(atlas, domain, 4, &mut s, cfg.words);
    let mut t = Tally::new();
    for i in 0..cfg.probes {
        let x = random_input(&mut s, atlas, domain, &bidegrees(1, n), i, cfg.words);
        let y = random_input(&mut s, atlas, domain, &bidegrees(1, n), i + 1, cfg.words);
        let z = random_input(&mut s, atlas, domain, &bidegrees(1, n), i, cfg.words);
        t.run(|| {
            let l = cup_expr(cup_expr(view(&x), view(&y))?, view(&z))?;
            let r = cup_expr(view(&x), cup_expr(view(&y), view(&z))?)?;
            compare(&*l, &*r, &words)
        });
    }
    report.push(t.check(&name, "(ω∪η)∪θ = ω∪(η∪θ)"));

    let name = format!("cup.graded-commutativity{tag}");
    let mut s = sampler(cfg, &name);
    let words = probe_words(atlas, domain, 1, &mut s, cfg.words);
    let mut t = Tally::new();
    for _ in 0..cfg.probes {
        let (j, k) = (s.below(n + 1), s.below(n + 1));
        let x = s.cochain(atlas, domain, &[(0, j)]);
        let y = s.cochain(atlas, domain, &[(0, k)]);
        t.run(|| {
            let l = cup_expr(stored(&x), stored(&y))?;
            let r = combination(vec![(pm(j * k), cup_expr(stored(&y), stored(&x))?)])?;
            compare(&*l, &*r, &words)
        });
    }
    report.push(t.check(&name, "ω∪η = (−1)^{jk} η∪ω on Čech degree zero"));

    report.extend(character_ring(atlas, domain, cfg));
    report
}

/// Fixture sparks for the ring checks: samples plus the winding spark of the circle.
fn ring_sparks(
    atlas: &Arc<GoodAtlas>,
    domain: Domain,
    s: &mut CochainSampler,
    count: usize,
) -> Result<Vec<SparkCharacter>> {
    let mut out = Vec::new();
    if domain == Domain::Subsets {
        if let Some(w) = fixtures::s1_winding_spark(atlas) {
            out.push(SparkCharacter::new(Spark::from_cochain(&w, 0)?));
        }
    }
    while out.len() < count {
        let k = if atlas.dimension() > 0 { out.len() % 2 } else { 0 };
        let mut low = CochainSampler::new(s.below(1 << 30) as u64, 1);
        out.push(SparkCharacter::new(sample_spark(atlas, domain, k, &mut low)?));
    }
    Ok(out)
}

fn equivalence_status(outcomes: &[Result<Equivalence>]) -> (Status, String) {
    let mut unknown = 0;
    for o in outcomes {
        match o {
            Err(e) => return (Status::Fail, e.to_string()),
            Ok(Equivalence::Unknown(_)) => unknown += 1,
            Ok(Equivalence::Equivalent { .. }) => {}
        }
    }
    if unknown > 0 {
        (Status::Unknown, format!("{unknown} of {} inconclusive within the bound", outcomes.len()))
    } else {
        (Status::Pass, String::new())
    }
}

fn character_ring(atlas: &Arc<GoodAtlas>, domain: Domain, cfg: &ProbeConfig) -> ValidationReport {
    let mut report = ValidationReport::default();
    let tag = complex_tag(atlas, domain);
    let bound = cfg.bound;
    let name = format!("cup.character-product{tag}");
    let mut s = sampler(cfg, &name);
    let sparks = match ring_sparks(atlas, domain, &mut s, 4) {
        Ok(x) => x,
        Err(e) => {
            report.push(Check::new(&name, "product representatives", Status::Fail, 0, e.to_string()));
            return report;
        }
    };
    let degree0: Vec<&SparkCharacter> = sparks.iter().filter(|x| x.degree() == 0).collect();
    let pairs: Vec<(&SparkCharacter, &SparkCharacter)> =
        sparks.iter().flat_map(|x| degree0.iter().map(move |y| (x, *y))).take(6).collect();

    let outcomes: Vec<Result<Equivalence>> =
        pairs.iter().map(|(x, y)| character_mul(x, y, &bound).map(|p| p.agreement)).collect();
    let (status, detail) = equivalence_status(&outcomes);
    report.push(Check::new(
        &name,
        "the two product representatives are spark equivalent",
        status,
        outcomes.len(),
        detail,
    ));

    let outcomes: Vec<Result<Equivalence>> = pairs
        .iter()
        .map(|(x, y)| {
            let xy = character_mul(x, y, &bound)?.product;
            let yx = character_mul(y, x, &bound)?.product;
            let sign = pm((x.degree() + 1) * (y.degree() + 1));
            crate::spark::spark_equivalent(xy.spark.a(), &yx.spark.a().scale(&sign), xy.degree(), &bound)
        })
        .collect();
    let (status, detail) = equivalence_status(&outcomes);
    report.push(Check::new(
        &format!("cup.character-commutativity{tag}"),
        "x⋆y is equivalent to (−1)^{(k+1)(l+1)} y⋆x",
        status,
        outcomes.len(),
        detail,
    ));

    let outcomes: Vec<Result<Equivalence>> = pairs
        .iter()
        .zip(degree0.iter().cycle())
        .map(|((x, y), z)| {
            let sum = character_mul(x, &y.add(z)?, &bound)?.product;
            let parts = character_mul(x, y, &bound)?.product.add(&character_mul(x, z, &bound)?.product)?;
            sum.equivalent(&parts, &bound)
        })
        .collect();
    let (status, detail) = equivalence_status(&outcomes);
    report.push(Check::new(
        &format!("cup.character-distributivity{tag}"),
        "x⋆(y+z) is equivalent to x⋆y + x⋆z",
        status,
        outcomes.len(),
        detail,
    ));

    let outcomes: Vec<Result<Equivalence>> = degree0
        .iter()
        .zip(degree0.iter().skip(1))
        .take(2)
        .map(|(x, y)| {
            let z = x;
            let left = character_mul(&character_mul(x, y, &bound)?.product, z, &bound)?.product;
            let right = character_mul(x, &character_mul(y, z, &bound)?.product, &bound)?.product;
            left.equivalent(&right, &bound)
        })
        .collect();
    let (status, detail) = equivalence_status(&outcomes);
    report.push(Check::new(
        &format!("cup.character-associativity{tag}"),
        "(x⋆y)⋆z is equivalent to x⋆(y⋆z)",
        status,
        outcomes.len(),
        detail,
    ));
    report
}

/// Cochain-map, functoriality and ring laws of `ū f̃`.
pub fn functor_suite(systems: &[Arc<CompatibleSystem>], cfg: &ProbeConfig) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut atlases: Vec<Arc<GoodAtlas>> = Vec::new();
    for f in systems {
        for a in [f.source(), f.target()] {
            if !atlases.iter().any(|b| b.name() == a.name()) {
                atlases.push(a.clone());
            }
        }
    }

    for atlas in &atlases {
        let name = format!("functor.identity[{}]", atlas.name());
        let id = CompatibleSystem::identity(atlas.clone());
        let mut s = sampler(cfg, &name);
        let words = probe_words(atlas, Domain::Subsets, 3, &mut s, cfg.words);
        let mut t = Tally::new();
        for i in 0..cfg.probes {
            let w = random_input(&mut s, atlas, Domain::Subsets, &bidegrees(2, atlas.dimension()), i, cfg.words);
            t.run(|| compare(&*pullback_system(&id, view(&w))?, &w, &words));
        }
        report.push(t.check(&name, "ū of the identity system is the identity"));
    }

    for f in systems {
        let (src, tgt) = (f.source(), f.target());
        let n = tgt.dimension();
        let tag = format!("[{}]", f.name());

        let name = format!("functor.cochain-map{tag}");
        let mut s = sampler(cfg, &name);
        let words = probe_words(src, Domain::Subsets, 3, &mut s, cfg.words);
        let mut t = Tally::new();
        for i in 0..cfg.probes {
            let w = random_input(&mut s, tgt, Domain::Subsets, &bidegrees(2, n), i, cfg.words);
            t.run(|| {
                let l = pullback_system(f, total_d_expr(view(&w)))?;
                let r = total_d_expr(pullback_system(f, view(&w))?);
                compare(&*l, &*r, &words)
            });
        }
        report.push(t.check(&name, "ū∘D̄ = D̄∘ū"));

        let name = format!("functor.preserves-global-forms{tag}");
        let mut t = Tally::new();
        for q in 0..=n {
            for g in global_forms(tgt, Domain::Subsets, q, 2) {
                t.run(|| {
                    let image = materialize(&*pullback_system(f, stored(g.cochain()))?)?;
                    Ok(GlobalForm::new(image).err().map(|e| e.to_string()))
                });
            }
        }
        report.push(t.check(&name, "ū maps Ē to Ē"));

        let name = format!("functor.preserves-integers{tag}");
        let mut s = sampler(cfg, &name);
        let words = probe_words(src, Domain::Subsets, 3, &mut s, cfg.words);
        let mut t = Tally::new();
        for _ in 0..cfg.probes {
            let r = random_integers(&mut s, tgt, Domain::Subsets, 2);
            t.run(|| integral_on(&*pullback_system(f, view(&r))?, &words));
        }
        report.push(t.check(&name, "ū maps Ī to Ī"));

        let name = format!("functor.ring-hom{tag}");
        let mut s = sampler(cfg, &name);
        let words = probe_words(src, Domain::Subsets, 3, &mut s, cfg.words);
        let mut t = Tally::new();
        for i in 0..cfg.probes {
            let x = random_input(&mut s, tgt, Domain::Subsets, &bidegrees(1, n), i, cfg.words);
            let y = random_input(&mut s, tgt, Domain::Subsets, &bidegrees(1, n), i + 1, cfg.words);
            t.run(|| {
                let l = pullback_system(f, cup_expr(view(&x), view(&y))?)?;
                let r = cup_expr(pullback_system(f, view(&x))?, pullback_system(f, view(&y))?)?;
                compare(&*l, &*r, &words)
            });
        }
        report.push(t.check(&name, "ū(ω∪η) = ūω ∪ ūη"));

        let name = format!("functor.lift-pullback{tag}");
        let mut s = sampler(cfg, &name);
        let mut t = Tally::new();
        for _ in 0..cfg.probes.min(4) {
            let w = s.cochain(tgt, Domain::Subsets, &bidegrees(0, n));
            for arrow in src.embeddings() {
                let (i, j) = (arrow.source, arrow.target);
                if !j.is_subset(i) || i == j {
                    continue;
                }
                t.run(|| {
                    let ok = crate::cochain::lift_pullback_check(f, &w, i, j)?;
                    Ok((!ok).then(|| format!("pair {} ⊇ {}", src.fmt_index(i), src.fmt_index(j))))
                });
            }
        }
        report.push(t.check(&name, "pullback along liftings commutes with restriction"));
    }

    for f in systems {
        for g in systems {
            if f.target().name() != g.source().name() {
                continue;
            }
            let name = format!("functor.composite[{}∘{}]", g.name(), f.name());
            let mut t = Tally::new();
            let gf = match compose_systems(g, f) {
                Ok(gf) => gf,
                Err(e) => {
                    report.push(Check::new(&name, "ū(g̃∘f̃) = ūf̃∘ūg̃", Status::Fail, 0, e.to_string()));
                    continue;
                }
            };
            let w_atlas = g.target();
            let mut s = sampler(cfg, &name);
            let words = probe_words(f.source(), Domain::Subsets, 3, &mut s, cfg.words);
            for i in 0..cfg.probes {
                let w =
                    random_input(&mut s, w_atlas, Domain::Subsets, &bidegrees(2, w_atlas.dimension()), i, cfg.words);
                t.run(|| {
                    let l = pullback_system(&gf, view(&w))?;
                    let r = pullback_system(f, pullback_system(g, view(&w))?)?;
                    compare(&*l, &*r, &words)
                });
            }
            report.push(t.check(&name, "ū(g̃∘f̃) = ūf̃∘ūg̃"));
        }
    }
    report
}

fn homotopy_side_conditions(
    report: &mut ValidationReport,
    name: &str,
    atlas: &Arc<GoodAtlas>,
    source_words: &[IndexString],
    cfg: &ProbeConfig,
    apply: &dyn Fn(&dyn CochainExpr) -> Result<Vec<PolyForm>>,
) {
    let n = atlas.dimension();
    let mut t = Tally::new();
    for q in 0..=n {
        for g in global_forms(atlas, Domain::Subsets, q, 2) {
            t.run(|| vanishes(&apply(g.cochain())?, source_words, atlas));
        }
    }
    report.push(t.check(&format!("{name}.vanishes-on-global-forms"), "vanishes on Ē"));
    let mut s = sampler(cfg, name);
    let mut t = Tally::new();
    for _ in 0..cfg.probes {
        let r = random_integers(&mut s, atlas, Domain::Subsets, 3);
        t.run(|| integral_on_values(&apply(&r)?, source_words, atlas));
    }
    report.push(t.check(&format!("{name}.preserves-integers"), "maps Ī into Ī"));
}

/// Homotopy identities for `ᾱ`, `Γ`, `Ξ`, their composites and the induced maps on characters.
pub fn homotopy_suite(transformations: &[Arc<NaturalTransformation>], cfg: &ProbeConfig) -> ValidationReport {
    let mut report = ValidationReport::default();
    let pmax = 3;

    for alpha in transformations {
        let (f1, f2) = (alpha.source_cs(), alpha.target_cs());
        let (src, tgt) = (f1.source().clone(), f1.target().clone());
        let name = format!("homotopy.alpha[{}]", alpha.name());
        let mut s = sampler(cfg, &name);
        let words = probe_words(&src, Domain::Subsets, pmax, &mut s, cfg.words);
        let mut t = Tally::new();
        for i in 0..cfg.probes {
            let w = random_input(&mut s, &tgt, Domain::Subsets, &bidegrees(pmax, tgt.dimension()), i, cfg.words);
            t.run(|| {
                let l = combination(vec![
                    (one(), total_d_expr(homotopy_alpha(alpha, view(&w))?)),
                    (one(), homotopy_alpha(alpha, total_d_expr(view(&w)))?),
                ])?;
                let r = combination(vec![
                    (one(), pullback_system(f2, view(&w))?),
                    (minus(), pullback_system(f1, view(&w))?),
                ])?;
                compare(&*l, &*r, &words)
            });
        }
        report.push(t.check(&name, "D̄ᾱ + ᾱD̄ = ūf̃² − ūf̃¹"));
        homotopy_side_conditions(&mut report, &name, &tgt, &words, cfg, &|e| {
            values(&*homotopy_alpha(alpha, view(e))?, &words)
        });

        let name = format!("homotopy.char-consistency[{}]", alpha.name());
        let mut s = sampler(cfg, &name);
        let mut t = Tally::new();
        for i in 0..cfg.probes.max(10) {
            let k = if tgt.dimension() > 0 { i % 2 } else { 0 };
            let mut low = CochainSampler::new(s.below(1 << 30) as u64, 1);
            t.run(|| {
                let x = SparkCharacter::new(sample_spark(&tgt, Domain::Subsets, k, &mut low)?);
                let pair = transport_along(alpha, &x)?;
                Ok((!pair.verified).then(|| "ūf̃²a − ūf̃¹a ≠ D̄(ᾱa) − ᾱr".to_string()))
            });
        }
        report.push(t.check(&name, "images under ūf̃¹ and ūf̃² are equivalent via b = ᾱa, s = −ᾱr"));
    }

    for alpha in transformations {
        for beta in transformations {
            if alpha.target_cs().name() != beta.source_cs().name() {
                continue;
            }
            let name = format!("homotopy.gamma[{},{}]", beta.name(), alpha.name());
            let composite = match vcompose_nat(beta, alpha) {
                Ok(c) => c,
                Err(e) => {
                    report.push(Check::new(&name, "D̄Γ − ΓD̄ = \u{305}(βα) − (β̄ + ᾱ)", Status::Fail, 0, e.to_string()));
                    continue;
                }
            };
            let (src, tgt) = (alpha.source_cs().source().clone(), alpha.source_cs().target().clone());
            let mut s = sampler(cfg, &name);
            let words = probe_words(&src, Domain::Subsets, pmax - 1, &mut s, cfg.words);
            let mut t = Tally::new();
            for i in 0..cfg.probes {
                let w = random_input(&mut s, &tgt, Domain::Subsets, &bidegrees(pmax, tgt.dimension()), i, cfg.words);
                t.run(|| {
                    let l = combination(vec![
                        (one(), total_d_expr(homotopy_gamma(beta, alpha, view(&w))?)),
                        (minus(), homotopy_gamma(beta, alpha, total_d_expr(view(&w)))?),
                    ])?;
                    let r = combination(vec![
                        (one(), homotopy_alpha(&composite, view(&w))?),
                        (minus(), homotopy_alpha(beta, view(&w))?),
                        (minus(), homotopy_alpha(alpha, view(&w))?),
                    ])?;
                    compare(&*l, &*r, &words)
                });
            }
            report.push(t.check(&name, "D̄Γ − ΓD̄ = (βα)‾ − (β̄ + ᾱ)"));
            homotopy_side_conditions(&mut report, &name, &tgt, &words, cfg, &|e| {
                values(&*homotopy_gamma(beta, alpha, view(e))?, &words)
            });

            let name = format!("homotopy.vertical-composite[{},{}]", beta.name(), alpha.name());
            let phi = Homotopic {
                from: SparkHom::Pullback(alpha.source_cs().clone()),
                to: SparkHom::Pullback(alpha.target_cs().clone()),
                homotopy: SparkHomotopy::Alpha(alpha.clone()),
            };
            let psi = Homotopic {
                from: SparkHom::Pullback(beta.source_cs().clone()),
                to: SparkHom::Pullback(beta.target_cs().clone()),
                homotopy: SparkHomotopy::Alpha(beta.clone()),
            };
            let v = compose_vertical(&phi, &psi);
            report.push(homotopy_identity(&name, "Ψ + Φ is a homotopy from f to h", &v, &src, &tgt, pmax, cfg));
        }
    }

    for alpha in transformations {
        for beta in transformations {
            let (u, v1) = (alpha.source_cs().source().clone(), alpha.source_cs().target());
            let (v2, w) = (beta.source_cs().source(), beta.source_cs().target().clone());
            if v1.name() != v2.name() {
                continue;
            }
            let name = format!("homotopy.xi[{},{}]", alpha.name(), beta.name());
            let composite = match hcompose_nat(beta, alpha) {
                Ok(c) => c,
                Err(e) => {
                    report.push(Check::new(
                        &name,
                        "D̄Ξ − ΞD̄ = (β∘α)‾ − (ᾱ∘ūg̃¹ + ūf̃²∘β̄)",
                        Status::Fail,
                        0,
                        e.to_string(),
                    ));
                    continue;
                }
            };
            let (f2, g1) = (alpha.target_cs(), beta.source_cs());
            let mut s = sampler(cfg, &name);
            let words = probe_words(&u, Domain::Subsets, pmax - 1, &mut s, cfg.words);
            let mut t = Tally::new();
            for i in 0..cfg.probes {
                let om = random_input(&mut s, &w, Domain::Subsets, &bidegrees(pmax, w.dimension()), i, cfg.words);
                t.run(|| {
                    let l = combination(vec![
                        (one(), total_d_expr(homotopy_xi(alpha, beta, view(&om))?)),
                        (minus(), homotopy_xi(alpha, beta, total_d_expr(view(&om)))?),
                    ])?;
                    let r = combination(vec![
                        (one(), homotopy_alpha(&composite, view(&om))?),
                        (minus(), homotopy_alpha(alpha, pullback_system(g1, view(&om))?)?),
                        (minus(), pullback_system(f2, homotopy_alpha(beta, view(&om))?)?),
                    ])?;
                    compare(&*l, &*r, &words)
                });
            }
            report.push(t.check(&name, "D̄Ξ − ΞD̄ = (β∘α)‾ − (ᾱ∘ūg̃¹ + ūf̃²∘β̄)"));
            homotopy_side_conditions(&mut report, &name, &w, &words, cfg, &|e| {
                values(&*homotopy_xi(alpha, beta, view(e))?, &words)
            });

            // The first map is ū g̃ (W to V), the second ū f̃ (V to U).
            let phi = Homotopic {
                from: SparkHom::Pullback(beta.source_cs().clone()),
                to: SparkHom::Pullback(beta.target_cs().clone()),
                homotopy: SparkHomotopy::Alpha(beta.clone()),
            };
            let psi = Homotopic {
                from: SparkHom::Pullback(alpha.source_cs().clone()),
                to: SparkHom::Pullback(alpha.target_cs().clone()),
                homotopy: SparkHomotopy::Alpha(alpha.clone()),
            };
            let h = compose_horizontal(&phi, &psi);
            let name = format!("homotopy.horizontal-composite[{},{}]", alpha.name(), beta.name());
            report.push(homotopy_identity(
                &name,
                "Ψ∘f + k∘Φ is a homotopy from hf to kg",
                &h.representative,
                &u,
                &w,
                pmax,
                cfg,
            ));
            let name = format!("homotopy.horizontal-witness[{},{}]", alpha.name(), beta.name());
            let mut s = sampler(cfg, &name);
            let words = probe_words(&u, Domain::Subsets, pmax - 1, &mut s, cfg.words);
            let mut t = Tally::new();
            for i in 0..cfg.probes {
                let om = random_input(&mut s, &w, Domain::Subsets, &bidegrees(pmax, w.dimension()), i, cfg.words);
                t.run(|| {
                    let l = combination(vec![
                        (one(), total_d_expr(h.witness.apply(view(&om))?)),
                        (minus(), h.witness.apply(total_d_expr(view(&om)))?),
                    ])?;
                    let r = combination(vec![
                        (one(), h.alternate.homotopy.apply(view(&om))?),
                        (minus(), h.representative.homotopy.apply(view(&om))?),
                    ])?;
                    compare(&*l, &*r, &words)
                });
            }
            report.push(t.check(&name, "Γ = −Ψ∘Φ satisfies D̄Γ − ΓD̄ = (Ψ∘g + h∘Φ) − (Ψ∘f + k∘Φ)"));
        }
    }
    report
}

fn homotopy_identity(
    name: &str,
    anchor: &str,
    h: &Homotopic,
    source: &Arc<GoodAtlas>,
    target: &Arc<GoodAtlas>,
    pmax: usize,
    cfg: &ProbeConfig,
) -> Check {
    let mut s = sampler(cfg, name);
    let words = probe_words(source, Domain::Subsets, pmax, &mut s, cfg.words);
    let mut t = Tally::new();
    for i in 0..cfg.probes {
        let w = random_input(&mut s, target, Domain::Subsets, &bidegrees(pmax, target.dimension()), i, cfg.words);
        t.run(|| {
            let l = combination(vec![
                (one(), total_d_expr(h.homotopy.apply(view(&w))?)),
                (one(), h.homotopy.apply(total_d_expr(view(&w)))?),
            ])?;
            let r = combination(vec![(one(), h.to.apply(view(&w))?), (minus(), h.from.apply(view(&w))?)])?;
            compare(&*l, &*r, &words)
        });
    }
    t.check(name, anchor)
}

/// The extension `φ̄` from the small complex and the comparison of cohomology.
pub fn appendix_suite(atlas: &Arc<GoodAtlas>, cfg: &ProbeConfig) -> ValidationReport {
    let mut report = ValidationReport::default();
    let tag = format!("[{}]", atlas.name());
    let n = atlas.dimension();
    let choices = [("min", ChoiceMap::min_vertex(atlas)), ("max", ChoiceMap::max_vertex(atlas))];

    for (label, phi) in &choices {
        let name = format!("appendix.phi-cochain-map{tag}[{label}]");
        let mut s = sampler(cfg, &name);
        let words = probe_words(atlas, Domain::Subsets, 3, &mut s, cfg.words);
        let mut t = Tally::new();
        for i in 0..cfg.probes {
            let w = random_input(&mut s, atlas, Domain::Vertices, &bidegrees(2, n), i, cfg.words);
            t.run(|| {
                let l = phi_extend(phi, total_d_expr(view(&w)))?;
                let r = total_d_expr(phi_extend(phi, view(&w))?);
                compare(&*l, &*r, &words)
            });
        }
        report.push(t.check(&name, "φ̄∘D = D̄∘φ̄"));

        let name = format!("appendix.phi-ring-hom{tag}[{label}]");
        let mut s = sampler(cfg, &name);
        let words = probe_words(atlas, Domain::Subsets, 3, &mut s, cfg.words);
        let mut t = Tally::new();
        for i in 0..cfg.probes {
            let x = random_input(&mut s, atlas, Domain::Vertices, &bidegrees(1, n), i, cfg.words);
            let y = random_input(&mut s, atlas, Domain::Vertices, &bidegrees(1, n), i + 1, cfg.words);
            t.run(|| {
                let l = phi_extend(phi, cup_expr(view(&x), view(&y))?)?;
                let r = cup_expr(phi_extend(phi, view(&x))?, phi_extend(phi, view(&y))?)?;
                compare(&*l, &*r, &words)
            });
        }
        report.push(t.check(&name, "φ̄(ω∪η) = φ̄ω ∪ φ̄η"));

        match compare_quasi_iso(atlas, phi, cfg.max_deg) {
            Ok(r) => {
                for mut c in r.checks {
                    c.name = format!("{}{tag}[{label}]", c.name);
                    report.push(c);
                }
            }
            Err(e) => report.push(Check::new(
                &format!("appendix.quasi-iso{tag}[{label}]"),
                "φ̄ is a quasi-isomorphism",
                Status::Fail,
                0,
                e.to_string(),
            )),
        }
    }

    let mut t = Tally::new();
    for q in 0..=n {
        for g in global_forms(atlas, Domain::Vertices, q, cfg.max_deg) {
            t.run(|| {
                let a = materialize(&*phi_extend(&choices[0].1, stored(g.cochain()))?)?;
                let b = materialize(&*phi_extend(&choices[1].1, stored(g.cochain()))?)?;
                Ok((a != b).then(|| format!("choices disagree on a global {q}-form")))
            });
        }
    }
    report.push(t.check(&format!("appendix.choice-independence{tag}"), "φ̄ on Ē does not depend on φ"));

    let mut t = Tally::new();
    for q in 0..=n {
        for g in global_forms(atlas, Domain::Vertices, q, cfg.max_deg) {
            t.run(|| {
                for w in canonical_support(atlas, Domain::Vertices, 2) {
                    let (i, j) = (w.entries()[0], w.entries()[1]);
                    let u = w.union();
                    let a = atlas.restrict(&g.cochain().value(&IndexString::single(i)), u, i)?;
                    let b = atlas.restrict(&g.cochain().value(&IndexString::single(j)), u, j)?;
                    if a != b {
                        return Ok(Some(format!("mismatch on {}", atlas.fmt_index(u))));
                    }
                }
                Ok(None)
            });
        }
    }
    report.push(
        t.check(&format!("appendix.small-global-forms{tag}"), "global forms of the small complex agree on overlaps"),
    );

    let big = cohomology_all(atlas, Domain::Subsets);
    let small = cohomology_all(atlas, Domain::Vertices);
    let len = big.len().max(small.len());
    let get = |v: &Vec<crate::homology::CohomologyGroup>, k: usize| {
        v.get(k).cloned().unwrap_or_else(crate::homology::CohomologyGroup::zero)
    };
    let mismatch = (0..len).find(|&k| get(&big, k) != get(&small, k));
    report.push(Check::from_outcome(
        &format!("appendix.cohomology-agree{tag}"),
        "big and small integer cohomology agree",
        len,
        mismatch.map(|k| format!("H{k}: {} vs {}", get(&big, k), get(&small, k))),
    ));
    report
}

/// A convenience error for suites whose prerequisites are missing.
pub fn missing(what: &str) -> Error {
    Error::Malformed(format!("suite needs {what}"))
}
