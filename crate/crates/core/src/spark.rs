//! Sparks, spark characters and the maps between them.
//!
//! Sparks live in the ordered complex (see [`OrderedCochain`]): products and
//! homotopy witnesses are not alternating in general.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::rc::Rc;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::atlas::GoodAtlas;
use crate::cochain::linear::{global_forms, invariant_forms, Coordinates};
use crate::cochain::random::CochainSampler;
use crate::cochain::{
    combination, cup_expr, free_support, stored, total_d_expr, view, Cochain, Domain, Expr, GlobalForm, OrderedCochain,
};
use crate::functorial::{homotopy_alpha, phi_extend, pullback_system, ChoiceMap};
use crate::homology::{smith_normal_form, IntMatrix};
use crate::indexcomb::IndexString;
use crate::linalg::{Echelon, SparseRow};
use crate::morphisms::{CompatibleSystem, NaturalTransformation};
use crate::polyform::{PolyForm, Rational};
use crate::{Error, Result};

fn pm(k: usize) -> Rational {
    if k.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// A spark `a` of degree `k` with `D a = e - r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spark {
    degree: usize,
    a: OrderedCochain,
    e: GlobalForm,
    r: OrderedCochain,
}

impl Spark {
    pub fn new(a: OrderedCochain, degree: usize) -> Result<Self> {
        let (e, r) = spark_decompose(&a, degree)?;
        Ok(Spark { degree, a, e, r })
    }

    pub fn from_cochain(a: &Cochain, degree: usize) -> Result<Self> {
        Spark::new(OrderedCochain::from_cochain(a, degree + 1), degree)
    }

    pub fn zero(atlas: Arc<GoodAtlas>, domain: Domain, degree: usize) -> Self {
        Spark {
            degree,
            a: OrderedCochain::zero(atlas.clone(), domain),
            e: GlobalForm::zero(atlas.clone(), domain),
            r: OrderedCochain::zero(atlas, domain),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn a(&self) -> &OrderedCochain {
        &self.a
    }

    pub fn e(&self) -> &GlobalForm {
        &self.e
    }

    pub fn r(&self) -> &OrderedCochain {
        &self.r
    }

    pub fn atlas(&self) -> &Arc<GoodAtlas> {
        self.a.atlas()
    }
}

/// Split `D a` into a global form `e` and an integer cochain `r` with `D a = e - r`.
pub fn spark_decompose(a: &OrderedCochain, k: usize) -> Result<(GlobalForm, OrderedCochain)> {
    if let Some(t) = a.total_degrees().into_iter().find(|&t| t != k) {
        return Err(Error::NotASpark(alloc::format!("component of total degree {t}, expected {k}")));
    }
    let d = OrderedCochain::tabulate(&*total_d_expr(view(a)), k + 2)?;
    let v = a.atlas().vertices();
    for (s, f) in d.terms() {
        let p = s.degree();
        for q in f.degrees() {
            if p > 0 && q > 0 {
                return Err(Error::NotASpark(alloc::format!(
                    "D a has a ({p},{q}) component at {}",
                    v.format_string(s)
                )));
            }
        }
    }
    let e = d.part(0, k + 1);
    let e = e.to_global_form().map_err(|_| Error::NotASpark("the form part of D a is not a global form".into()))?;
    let r = d.part(k + 1, 0).neg();
    if let Some((s, _)) = r.terms().find(|(_, f)| f.as_constant().is_none_or(|c| !c.is_integer())) {
        return Err(Error::NotASpark(alloc::format!("the Čech part of D a is not integral at {}", v.format_string(s))));
    }
    Ok((e, r))
}

/// Search parameters for [`spark_equivalent`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBound {
    /// Polynomial degree of the witness `b`.
    pub max_deg: u32,
    /// Give up (answer unknown) beyond this many unknowns.
    pub max_unknowns: usize,
}

impl Default for SearchBound {
    fn default() -> Self {
        SearchBound { max_deg: 3, max_unknowns: 20_000 }
    }
}

/// Outcome of a bounded equivalence search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    /// `a - a' = D b + s` with `s` integral.
    Equivalent { b: OrderedCochain, s: OrderedCochain },
    /// No witness within the bound; not a proof of inequivalence.
    Unknown(String),
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent { .. })
    }
}

/// Whether `a - a' = D b + s` holds exactly with `s` integral of bidegree `(k, 0)`.
pub fn check_witness(a: &OrderedCochain, a2: &OrderedCochain, b: &OrderedCochain, s: &OrderedCochain) -> Result<bool> {
    let k = a.stored_max_len().max(a2.stored_max_len()).max(s.stored_max_len()).max(b.stored_max_len() + 1);
    if !s.is_integral() || s.bidegrees().iter().any(|&(_, q)| q != 0) {
        return Ok(false);
    }
    let lhs = a.sub(a2)?;
    let db = OrderedCochain::tabulate(&*total_d_expr(view(b)), k.max(1))?;
    Ok(lhs == db.add(s)?)
}

/// Look for `b` of total degree `k - 1` and integral `s` of degree `k` with `a - a' = D b + s`.
pub fn spark_equivalent(a: &OrderedCochain, a2: &OrderedCochain, k: usize, bound: &SearchBound) -> Result<Equivalence> {
    let diff = a.sub(a2)?;
    let (atlas, domain) = (a.atlas().clone(), a.domain());
    let zero = OrderedCochain::zero(atlas.clone(), domain);
    if diff.is_zero() {
        return Ok(Equivalence::Equivalent { b: zero.clone(), s: zero });
    }
    let n = atlas.dimension();

    // Unknowns for b: one invariant form on one word each.
    let mut b_basis: Vec<(IndexString, PolyForm)> = Vec::new();
    if k >= 1 {
        let mut per_chart = BTreeMap::new();
        for q in 0..=(k - 1).min(n) {
            let p = k - 1 - q;
            for w in free_support(&atlas, domain, p + 1, usize::MAX) {
                let u = w.union();
                let forms = per_chart
                    .entry((u, q))
                    .or_insert_with(|| invariant_forms(atlas.group(u).expect("nonempty chart"), q, bound.max_deg));
                for f in forms.iter() {
                    b_basis.push((w.clone(), f.clone()));
                }
            }
        }
    }
    let s_basis = free_support(&atlas, domain, k + 1, usize::MAX);
    let (nb, ns) = (b_basis.len(), s_basis.len());
    if nb + ns > bound.max_unknowns {
        return Ok(Equivalence::Unknown(alloc::format!("{} unknowns exceed the bound", nb + ns)));
    }

    // Columns of the system, keyed by coordinate rows.
    let mut coords = Coordinates::new();
    let mut rows: BTreeMap<usize, SparseRow> = BTreeMap::new();
    let alphabet = domain.alphabet(&atlas);
    for (col, (w, f)) in b_basis.iter().enumerate() {
        let mut single = OrderedCochain::zero(atlas.clone(), domain);
        single.insert(w, f.clone())?;
        let dexpr = total_d_expr(view(&single));
        // D of a single word only reaches the word itself and its one-letter insertions.
        let mut words = BTreeSet::new();
        words.insert(w.clone());
        for pos in 0..=w.len() {
            for &x in &alphabet {
                let mut e = w.entries().to_vec();
                e.insert(pos, x);
                words.insert(IndexString::new(e)?);
            }
        }
        let mut image = OrderedCochain::zero(atlas.clone(), domain);
        for t in &words {
            let v = dexpr.value(t)?;
            if !v.is_zero() {
                image.insert(t, v)?;
            }
        }
        for (i, x) in coords.vectorize_terms(image.terms()) {
            rows.entry(i).or_default().insert(col, x);
        }
    }
    let one = PolyForm::constant(n, Rational::one());
    for (j, w) in s_basis.iter().enumerate() {
        let single = [(w.clone(), one.clone())];
        for (i, x) in coords.vectorize_terms(single.iter().map(|(a, b)| (a, b))) {
            rows.entry(i).or_default().insert(nb + j, x);
        }
    }
    let rhs_col = nb + ns;
    for (i, x) in coords.vectorize_terms(diff.terms()) {
        rows.entry(i).or_default().insert(rhs_col, x);
    }

    // Eliminate with the b unknowns first; rows led by s columns constrain s alone.
    let mut ech = Echelon::new();
    for (_, r) in rows {
        if ech.insert(r) == Some(rhs_col) {
            return Ok(Equivalence::Unknown("no rational witness within the bound".into()));
        }
    }
    let s_rows: Vec<&SparseRow> = ech.rows().filter(|(c, _)| *c >= nb).map(|(_, r)| r).collect();
    let y = match integer_solution(&s_rows, nb, ns) {
        Some(y) => y,
        None => return Ok(Equivalence::Unknown("rational witnesses exist but none with integral s".into())),
    };
    let mut x = vec![Rational::zero(); nb];
    let b_rows: Vec<(usize, &SparseRow)> = ech.rows().filter(|(c, _)| *c < nb).collect();
    for (c, row) in b_rows.into_iter().rev() {
        let mut v = row.get(&rhs_col).cloned().unwrap_or_else(Rational::zero);
        for (&j, a) in row.range(c + 1..rhs_col) {
            if j < nb {
                v -= a * &x[j];
            } else {
                v -= a * Rational::from_integer(y[j - nb].clone());
            }
        }
        x[c] = v;
    }

    let mut b = OrderedCochain::zero(atlas.clone(), domain);
    for ((w, f), c) in b_basis.iter().zip(&x) {
        if !c.is_zero() {
            let mut v = b.get(w);
            v.add_scaled(f, c);
            b.insert(w, v)?;
        }
    }
    let mut s = OrderedCochain::zero(atlas.clone(), domain);
    for (w, c) in s_basis.iter().zip(&y) {
        if !c.is_zero() {
            s.insert(w, PolyForm::constant(n, Rational::from_integer(c.clone())))?;
        }
    }
    if !check_witness(a, a2, &b, &s)? {
        return Err(Error::Malformed("solver produced a witness that does not verify".into()));
    }
    Ok(Equivalence::Equivalent { b, s })
}

/// An integer solution of the rows (columns `offset..offset + n`, right-hand side at `offset + n`).
fn integer_solution(rows: &[&SparseRow], offset: usize, n: usize) -> Option<Vec<BigInt>> {
    if rows.is_empty() {
        return Some(vec![BigInt::zero(); n]);
    }
    let mut m = Vec::with_capacity(rows.len());
    let mut c = Vec::with_capacity(rows.len());
    for r in rows {
        let lcm = r.values().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let scale = |x: &Rational| (x * Rational::from_integer(lcm.clone())).to_integer();
        let mut row = vec![BigInt::zero(); n];
        for (&j, x) in r.range(offset..offset + n) {
            row[j - offset] = scale(x);
        }
        m.push(row);
        c.push(r.get(&(offset + n)).map(scale).unwrap_or_default());
    }
    let m = IntMatrix::from_rows(m, n);
    let snf = smith_normal_form(&m);
    let uc = snf.u.mul_vec(&c);
    let mut z = vec![BigInt::zero(); n];
    for (i, v) in uc.iter().enumerate() {
        if i < snf.rank {
            let d = snf.d.get(i, i);
            if !v.is_multiple_of(d) {
                return None;
            }
            z[i] = v / d;
        } else if !v.is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&z))
}

/// A spark character, represented by a spark.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparkCharacter {
    pub spark: Spark,
}

impl SparkCharacter {
    pub fn new(spark: Spark) -> Self {
        SparkCharacter { spark }
    }

    pub fn degree(&self) -> usize {
        self.spark.degree
    }

    /// Sum of representatives.
    pub fn add(&self, other: &SparkCharacter) -> Result<SparkCharacter> {
        if self.degree() != other.degree() {
            return Err(Error::DimensionMismatch { expected: self.degree(), found: other.degree() });
        }
        let (x, y) = (&self.spark, &other.spark);
        let e = GlobalForm::new(x.e.cochain().add(y.e.cochain())?)?;
        Ok(SparkCharacter::new(Spark { degree: x.degree, a: x.a.add(&y.a)?, e, r: x.r.add(&y.r)? }))
    }

    /// Whether the two characters agree within `bound`.
    pub fn equivalent(&self, other: &SparkCharacter, bound: &SearchBound) -> Result<Equivalence> {
        if self.degree() != other.degree() {
            return Err(Error::DimensionMismatch { expected: self.degree(), found: other.degree() });
        }
        spark_equivalent(&self.spark.a, &other.spark.a, self.degree(), bound)
    }
}

/// The product of two characters with its alternate representative.
#[derive(Clone, Debug)]
pub struct Product {
    pub product: SparkCharacter,
    pub alternate: OrderedCochain,
    pub agreement: Equivalence,
}

fn global_as_ordered(e: &GlobalForm) -> OrderedCochain {
    OrderedCochain::from_cochain(e.cochain(), 1)
}

/// `x ⋆ y` represented by `ω ∪ c + (-1)^{k+1} r ∪ η`, checked against the
/// alternate representative `ω ∪ s + (-1)^{k+1} e ∪ η`.
pub fn character_mul(x: &SparkCharacter, y: &SparkCharacter, bound: &SearchBound) -> Result<Product> {
    let (k, l) = (x.degree(), y.degree());
    let (omega, eta) = (&x.spark.a, &y.spark.a);
    let (e, c) = (global_as_ordered(&x.spark.e), global_as_ordered(&y.spark.e));
    let (r, s) = (&x.spark.r, &y.spark.r);
    let degree = k + l + 1;
    let sign = pm(k + 1);
    let rep = combination(vec![
        (Rational::one(), cup_expr(view(omega), view(&c))?),
        (sign.clone(), cup_expr(view(r), view(eta))?),
    ])?;
    let alt =
        combination(vec![(Rational::one(), cup_expr(view(omega), view(s))?), (sign, cup_expr(view(&e), view(eta))?)])?;
    let rep = OrderedCochain::tabulate(&*rep, degree + 1)?;
    let alternate = OrderedCochain::tabulate(&*alt, degree + 1)?;
    let product = SparkCharacter::new(Spark::new(rep, degree)?);
    let agreement = spark_equivalent(&product.spark.a, &alternate, degree, bound)?;
    Ok(Product { product, alternate, agreement })
}

/// A map of spark complexes given by a formula.
#[derive(Clone, Debug)]
pub enum SparkHom {
    Identity,
    /// `ū f̃`, from the target atlas of the system to its source.
    Pullback(Arc<CompatibleSystem>),
    /// `φ̄`, from the small complex to the big one.
    Extension(Arc<ChoiceMap>),
    /// Apply the first map, then the second.
    Then(Box<SparkHom>, Box<SparkHom>),
}

impl SparkHom {
    pub fn apply<'a>(&'a self, e: Expr<'a>) -> Result<Expr<'a>> {
        match self {
            SparkHom::Identity => Ok(e),
            SparkHom::Pullback(f) => pullback_system(f, e),
            SparkHom::Extension(phi) => phi_extend(phi, e),
            SparkHom::Then(first, second) => second.apply(first.apply(e)?),
        }
    }
}

/// `[a] ↦ [h a]`, checking that `h` maps `e` and `r` to a global form and an integer cochain.
pub fn apply_spark_hom(h: &SparkHom, x: &SparkCharacter) -> Result<SparkCharacter> {
    let k = x.degree();
    let a = OrderedCochain::tabulate(&*h.apply(view(&x.spark.a))?, k + 1)?;
    let e = OrderedCochain::tabulate(&*h.apply(stored(x.spark.e.cochain()))?, 1)?;
    let r = OrderedCochain::tabulate(&*h.apply(view(&x.spark.r))?, k + 2)?;
    let e = e.to_global_form().map_err(|_| Error::NotASpark("the map does not preserve global forms".into()))?;
    if !r.is_integral() {
        return Err(Error::NotASpark("the map does not preserve integer cochains".into()));
    }
    let image = Spark::new(a, k)?;
    if image.e != e || image.r != r {
        return Err(Error::NotASpark("image decomposition differs from the image of the decomposition".into()));
    }
    Ok(SparkCharacter::new(image))
}

/// Whether `h(D b + s) = D(h b) + h s` on one witness.
pub fn respects_equivalence(h: &SparkHom, b: &OrderedCochain, s: &OrderedCochain, k: usize) -> Result<bool> {
    let inner = combination(vec![(Rational::one(), total_d_expr(view(b))), (Rational::one(), view(s))])?;
    let left = OrderedCochain::tabulate(&*h.apply(inner)?, k + 1)?;
    let hb = h.apply(view(b))?;
    let right = combination(vec![(Rational::one(), total_d_expr(hb)), (Rational::one(), h.apply(view(s))?)])?;
    Ok(left == OrderedCochain::tabulate(&*right, k + 1)?)
}

/// A degree `-1` (or `-2`, for homotopies of homotopies) map given by a formula.
#[derive(Clone, Debug)]
pub enum SparkHomotopy {
    /// The zero map into the given complex.
    Zero(Arc<GoodAtlas>, Domain),
    /// `ᾱ` for a natural transformation.
    Alpha(Arc<NaturalTransformation>),
    /// `Σ c_i Φ_i`.
    Sum(Vec<(Rational, SparkHomotopy)>),
    /// `Φ ∘ h`: apply `h`, then `Φ`.
    AfterHom(Box<SparkHomotopy>, SparkHom),
    /// `h ∘ Φ`: apply `Φ`, then `h`.
    BeforeHom(SparkHom, Box<SparkHomotopy>),
    /// `Ψ ∘ Φ`: apply `Φ` (the second field), then `Ψ`.
    Compose(Box<SparkHomotopy>, Box<SparkHomotopy>),
}

impl SparkHomotopy {
    pub fn apply<'a>(&'a self, e: Expr<'a>) -> Result<Expr<'a>> {
        match self {
            SparkHomotopy::Zero(atlas, domain) => {
                let z: Expr<'a> = Rc::new(OrderedCochain::zero(atlas.clone(), *domain));
                Ok(z)
            }
            SparkHomotopy::Alpha(nt) => homotopy_alpha(nt, e),
            SparkHomotopy::Sum(terms) => {
                let mut parts = Vec::with_capacity(terms.len());
                for (c, h) in terms {
                    parts.push((c.clone(), h.apply(e.clone())?));
                }
                combination(parts)
            }
            SparkHomotopy::AfterHom(phi, h) => phi.apply(h.apply(e)?),
            SparkHomotopy::BeforeHom(h, phi) => h.apply(phi.apply(e)?),
            SparkHomotopy::Compose(psi, phi) => psi.apply(phi.apply(e)?),
        }
    }
}

/// A homotopy `Φ: f ⇒ g` between spark maps, meaning `D Φ + Φ D = g - f`.
#[derive(Clone, Debug)]
pub struct Homotopic {
    pub from: SparkHom,
    pub to: SparkHom,
    pub homotopy: SparkHomotopy,
}

/// `Ψ + Φ: f ⇒ h` for `Φ: f ⇒ g` and `Ψ: g ⇒ h`.
pub fn compose_vertical(phi: &Homotopic, psi: &Homotopic) -> Homotopic {
    Homotopic {
        from: phi.from.clone(),
        to: psi.to.clone(),
        homotopy: SparkHomotopy::Sum(vec![
            (Rational::one(), psi.homotopy.clone()),
            (Rational::one(), phi.homotopy.clone()),
        ]),
    }
}

/// The horizontal composite of `Φ: f ⇒ g` (first map) and `Ψ: h ⇒ k` (second map).
#[derive(Clone, Debug)]
pub struct HorizontalComposite {
    /// `Ψ ∘ f + k ∘ Φ: h f ⇒ k g`.
    pub representative: Homotopic,
    /// `Ψ ∘ g + h ∘ Φ`.
    pub alternate: Homotopic,
    /// `Γ` with `D Γ - Γ D = alternate - representative`.
    pub witness: SparkHomotopy,
}

/// Sign of `Ψ ∘ Φ` in the homotopy of homotopies from the representative to the alternate.
pub const HORIZONTAL_WITNESS_SIGN: i64 = -1;

pub fn compose_horizontal(phi: &Homotopic, psi: &Homotopic) -> HorizontalComposite {
    let then = |a: &SparkHom, b: &SparkHom| SparkHom::Then(Box::new(a.clone()), Box::new(b.clone()));
    let from = then(&phi.from, &psi.from);
    let to = then(&phi.to, &psi.to);
    let sum = |x: SparkHomotopy, y: SparkHomotopy| SparkHomotopy::Sum(vec![(Rational::one(), x), (Rational::one(), y)]);
    let representative = sum(
        SparkHomotopy::AfterHom(Box::new(psi.homotopy.clone()), phi.from.clone()),
        SparkHomotopy::BeforeHom(psi.to.clone(), Box::new(phi.homotopy.clone())),
    );
    let alternate = sum(
        SparkHomotopy::AfterHom(Box::new(psi.homotopy.clone()), phi.to.clone()),
        SparkHomotopy::BeforeHom(psi.from.clone(), Box::new(phi.homotopy.clone())),
    );
    let witness = SparkHomotopy::Sum(vec![(
        Rational::from_integer(HORIZONTAL_WITNESS_SIGN.into()),
        SparkHomotopy::Compose(Box::new(psi.homotopy.clone()), Box::new(phi.homotopy.clone())),
    )]);
    HorizontalComposite {
        representative: Homotopic { from: from.clone(), to: to.clone(), homotopy: representative },
        alternate: Homotopic { from, to, homotopy: alternate },
        witness,
    }
}

/// Images of `x` under `ū f̃¹` and `ū f̃²` with the witness `b = ᾱ a`, `s = -ᾱ r`.
#[derive(Clone, Debug)]
pub struct TransportedPair {
    pub first: SparkCharacter,
    pub second: SparkCharacter,
    pub b: OrderedCochain,
    pub s: OrderedCochain,
    /// `ū f̃² a - ū f̃¹ a = D b + s` exactly, with `s` integral.
    pub verified: bool,
}

pub fn transport_along(alpha: &Arc<NaturalTransformation>, x: &SparkCharacter) -> Result<TransportedPair> {
    let k = x.degree();
    let first = apply_spark_hom(&SparkHom::Pullback(alpha.source_cs().clone()), x)?;
    let second = apply_spark_hom(&SparkHom::Pullback(alpha.target_cs().clone()), x)?;
    let b = OrderedCochain::tabulate(&*homotopy_alpha(alpha, view(&x.spark.a))?, k.max(1))?;
    let s = OrderedCochain::tabulate(&*homotopy_alpha(alpha, view(&x.spark.r))?, k + 1)?.neg();
    let verified = check_witness(&second.spark.a, &first.spark.a, &b, &s)?;
    Ok(TransportedPair { first, second, b, s, verified })
}

/// Random sparks of degree `k`: a global form, an integer cochain and an exact term.
pub fn sample_spark(atlas: &Arc<GoodAtlas>, domain: Domain, k: usize, sampler: &mut CochainSampler) -> Result<Spark> {
    let n = atlas.dimension();
    let mut a = Cochain::zero(atlas.clone(), domain);
    if k <= n {
        let globals = global_forms(atlas, domain, k, sampler.max_deg.min(2));
        for g in globals {
            let c = sampler.below(5) as i64 - 2;
            if c != 0 {
                a = a.add_scaled(g.cochain(), &Rational::from_integer(c.into()))?;
            }
        }
    }
    let t = sampler.int_cochain(atlas, domain, k);
    a = a.add(&t.to_cochain())?;
    if k >= 1 {
        let bidegrees: Vec<(usize, usize)> = (0..k).map(|q| (k - 1 - q, q)).filter(|&(_, q)| q <= n).collect();
        let b = sampler.cochain(atlas, domain, &bidegrees);
        let db = OrderedCochain::from_cochain(&crate::cochain::total_d(&b), k + 1);
        return Spark::new(OrderedCochain::from_cochain(&a, k + 1).add(&db)?, k);
    }
    Spark::from_cochain(&a, k)
}
