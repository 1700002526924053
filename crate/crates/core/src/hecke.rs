//! The Hecke algebra of a finite Weyl group over `Z[v, v^-1]`.
//!
//! Normalization: `H_s^2 = H_e + (v^-1 - v) H_s`, `b_s = H_s + v H_e`, so the
//! Kazhdan-Lusztig coefficients `h_{y,w}` (`y < w`) lie in `v Z[v]`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::{CartanType, CoxeterError, CoxeterSystem, WeylElement};
use crate::ring::LaurentPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeckeError {
    #[error("element {element} does not belong to {system}")]
    ForeignElement { element: WeylElement, system: CartanType },
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
}

/// A finitely supported map `W -> Z[v, v^-1]`, read in the standard basis `{H_w}`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct HeckeElement {
    terms: BTreeMap<WeylElement, LaurentPoly>,
}

impl HeckeElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `H_w`.
    pub fn standard(w: WeylElement) -> Self {
        Self::term(w, LaurentPoly::one())
    }

    /// `c H_w`.
    pub fn term(w: WeylElement, c: LaurentPoly) -> Self {
        let mut out = Self::zero();
        out.add_term(w, &c);
        out
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (WeylElement, LaurentPoly)>) -> Self {
        let mut out = Self::zero();
        for (w, c) in terms {
            out.add_term(w, &c);
        }
        out
    }

    pub fn add_term(&mut self, w: WeylElement, c: &LaurentPoly) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(w.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &WeylElement) -> LaurentPoly {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    /// Nonzero coordinates in ShortLex order of the basis index.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&WeylElement, &LaurentPoly)> + '_ {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &WeylElement> + '_ {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, c)| (w.clone(), f(c))))
    }

    /// Relabels basis elements; `f` must be injective.
    pub fn map_basis(&self, f: impl Fn(&WeylElement) -> WeylElement) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, c)| (f(w), c.clone())))
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        self.map_coeffs(|x| x * c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), &-c);
        }
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c);
        }
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.terms.values().all(LaurentPoly::has_nonnegative_coeffs)
    }
}

impl fmt::Debug for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| format!("({c})H_{w:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Display for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The Hecke algebra of a Coxeter system, with memoized bar involution and
/// Kazhdan-Lusztig basis. Caches are internally synchronized.
pub struct HeckeAlgebra {
    system: Arc<CoxeterSystem>,
    bar_cache: Mutex<HashMap<WeylElement, HeckeElement>>,
    kl_cache: Mutex<HashMap<WeylElement, HeckeElement>>,
}

impl fmt::Debug for HeckeAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HeckeAlgebra").field("system", &self.system).finish()
    }
}

impl HeckeAlgebra {
    pub fn new(system: Arc<CoxeterSystem>) -> Self {
        Self {
            system,
            bar_cache: Mutex::new(HashMap::new()),
            kl_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn system(&self) -> &Arc<CoxeterSystem> {
        &self.system
    }

    pub fn check(&self, a: &HeckeElement) -> Result<(), HeckeError> {
        let table = self.system.try_table()?;
        match a.support().find(|w| table.get_index(w).is_none()) {
            Some(w) => Err(HeckeError::ForeignElement {
                element: w.clone(),
                system: self.system.cartan_type(),
            }),
            None => Ok(()),
        }
    }

    /// `a * H_s`.
    pub fn mul_generator(&self, a: &HeckeElement, s: usize) -> HeckeElement {
        let table = self.system.table();
        let quad = LaurentPoly::from_terms([(-1, 1), (1, -1)]);
        let mut out = HeckeElement::zero();
        for (w, c) in a.terms() {
            let i = table.index(w);
            let j = table.right[i][s];
            out.add_term(table.elements[j].clone(), c);
            if table.length(j) < table.length(i) {
                out.add_term(w.clone(), &(c * &quad));
            }
        }
        out
    }

    /// `a * H_w`, multiplying along the normal-form word of `w`.
    pub fn mul_standard(&self, a: &HeckeElement, w: &WeylElement) -> HeckeElement {
        w.word()
            .iter()
            .fold(a.clone(), |acc, &s| self.mul_generator(&acc, s as usize))
    }

    pub fn try_mul(&self, a: &HeckeElement, b: &HeckeElement) -> Result<HeckeElement, HeckeError> {
        self.check(a)?;
        self.check(b)?;
        let mut out = HeckeElement::zero();
        for (y, c) in b.terms() {
            out.add_assign(&self.mul_standard(a, y).scale(c));
        }
        Ok(out)
    }

    /// Product in the Hecke algebra. Panics on elements of another system.
    pub fn mul(&self, a: &HeckeElement, b: &HeckeElement) -> HeckeElement {
        self.try_mul(a, b).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn one(&self) -> HeckeElement {
        HeckeElement::standard(WeylElement::identity())
    }

    /// `bar(H_w) = (H_{w^-1})^-1`.
    pub fn bar_standard(&self, w: &WeylElement) -> HeckeElement {
        if let Some(hit) = self.bar_cache.lock().unwrap().get(w) {
            return hit.clone();
        }
        let res = match w.last_letter() {
            None => self.one(),
            Some(s) => {
                // bar(H_w) = bar(H_{ws}) * (H_s + (v - v^-1) H_e)
                let ws = self.system.mul(w, &self.system.generator(s));
                let prefix = self.bar_standard(&ws);
                let mut out = self.mul_generator(&prefix, s);
                out.add_assign(&prefix.scale(&LaurentPoly::from_terms([(1, 1), (-1, -1)])));
                out
            }
        };
        self.bar_cache.lock().unwrap().insert(w.clone(), res.clone());
        res
    }

    pub fn bar_involution(&self, a: &HeckeElement) -> HeckeElement {
        let mut out = HeckeElement::zero();
        for (w, c) in a.terms() {
            out.add_assign(&self.bar_standard(w).scale(&c.bar()));
        }
        out
    }

    pub fn is_bar_invariant(&self, a: &HeckeElement) -> bool {
        &self.bar_involution(a) == a
    }

    /// The Kazhdan-Lusztig basis element `b_w`.
    pub fn kl_basis(&self, w: &WeylElement) -> HeckeElement {
        if let Some(hit) = self.kl_cache.lock().unwrap().get(w) {
            return hit.clone();
        }
        let res = match w.last_letter() {
            None => self.one(),
            Some(s) => {
                let ws = self.system.mul(w, &self.system.generator(s));
                let lower = self.kl_basis(&ws);
                let mut prod = self.mul_generator(&lower, s);
                prod.add_assign(&lower.scale(&LaurentPoly::v()));
                // b_{ws} b_s = b_w + (bar-invariant combination of lower b_y).
                // Strip terms from the top down until every y != w
                // coefficient lies in v Z[v].
                let mut ys: Vec<WeylElement> = prod.support().filter(|y| *y != w).cloned().collect();
                ys.sort();
                for y in ys.into_iter().rev() {
                    let c = prod.coeff(&y).nonpositive_part();
                    if c.is_zero() {
                        continue;
                    }
                    let neg = LaurentPoly::from_terms(c.terms().filter(|(e, _)| *e < 0).map(|(e, x)| (e, x.clone())));
                    let p = &c + &neg.bar();
                    prod = prod.sub(&self.kl_basis(&y).scale(&p));
                }
                prod
            }
        };
        self.kl_cache.lock().unwrap().insert(w.clone(), res.clone());
        res
    }

    /// `h_{y,w}`, the `H_y` coordinate of `b_w`.
    pub fn kl_coefficient(&self, y: &WeylElement, w: &WeylElement) -> LaurentPoly {
        self.kl_basis(w).coeff(y)
    }

    /// Checks the characterization of `b_w`: bar-invariant, `H_w` coefficient
    /// 1, every other coefficient in `v Z[v]` and supported below `w`.
    pub fn is_kl_element(&self, w: &WeylElement, a: &HeckeElement) -> bool {
        a.coeff(w).is_one()
            && a.terms()
                .all(|(y, c)| y == w || (c.min_degree().is_some_and(|d| d >= 1) && self.system.bruhat_leq(y, w)))
            && self.is_bar_invariant(a)
    }

    /// Installs a precomputed `b_w` (from a disk cache). Rejected unless it
    /// satisfies the characterization, which determines `b_w` uniquely.
    pub fn seed_kl(&self, w: &WeylElement, a: HeckeElement) -> bool {
        let known = self.check(&a).is_ok() && self.check(&HeckeElement::standard(w.clone())).is_ok();
        if !known || !self.is_kl_element(w, &a) {
            return false;
        }
        self.kl_cache.lock().unwrap().insert(w.clone(), a);
        true
    }

    /// All memoized KL elements, ShortLex-sorted.
    pub fn kl_snapshot(&self) -> Vec<(WeylElement, HeckeElement)> {
        let mut v: Vec<_> = self
            .kl_cache
            .lock()
            .unwrap()
            .iter()
            .map(|(w, b)| (w.clone(), b.clone()))
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Coordinates of `a` in the KL basis: `a = sum_y c_y b_y`.
    pub fn kl_expansion(&self, a: &HeckeElement) -> BTreeMap<WeylElement, LaurentPoly> {
        let mut rest = a.clone();
        let mut out = BTreeMap::new();
        loop {
            let Some((y, c)) = rest.terms().next_back().map(|(y, c)| (y.clone(), c.clone())) else {
                break;
            };
            rest = rest.sub(&self.kl_basis(&y).scale(&c));
            out.insert(y, c);
        }
        out
    }

    /// `<a, b> = sum_w a_w * bar(b)_w`: linear in `a`, bar-semilinear in `b`.
    pub fn euler_pairing(&self, a: &HeckeElement, b: &HeckeElement) -> Result<LaurentPoly, HeckeError> {
        self.check(a)?;
        self.check(b)?;
        let bb = self.bar_involution(b);
        let mut out = LaurentPoly::zero();
        for (w, c) in a.terms() {
            out += &(c * &bb.coeff(w));
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// p-canonical tables

/// Which table invariant failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableCheck {
    Triangularity,
    BarInvariance,
    KlPositivity,
    KlAgreement,
}

impl fmt::Display for TableCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableCheck::Triangularity => "triangularity",
            TableCheck::BarInvariance => "bar-invariance",
            TableCheck::KlPositivity => "kl-positivity",
            TableCheck::KlAgreement => "characteristic-0 agreement",
        })
    }
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("table parse error: {0}")]
    Parse(String),
    #[error("table is for {found}, expected {expected}")]
    TypeMismatch { expected: CartanType, found: CartanType },
    #[error("characteristic {0} is neither 0 nor a prime")]
    BadCharacteristic(u64),
    #[error("duplicate entry for {0}")]
    DuplicateEntry(WeylElement),
    #[error("{check} failed at {w}")]
    Invariant { w: WeylElement, check: TableCheck },
    #[error("no table entry for {0}")]
    MissingEntry(WeylElement),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    cartan_type: CartanType,
    characteristic: u64,
    entries: Vec<EntryFile>,
}

#[derive(Serialize, Deserialize)]
struct EntryFile {
    w: Vec<usize>,
    expansion: Vec<TermFile>,
}

#[derive(Serialize, Deserialize)]
struct TermFile {
    y: Vec<usize>,
    coeffs: LaurentPoly,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Standard-basis expansions of the p-canonical basis, validated on
/// construction. Characteristic is only a label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PCanTable {
    cartan_type: CartanType,
    characteristic: u64,
    entries: BTreeMap<WeylElement, HeckeElement>,
}

impl PCanTable {
    /// Validates and builds a table.
    pub fn new(
        hecke: &HeckeAlgebra,
        characteristic: u64,
        entries: BTreeMap<WeylElement, HeckeElement>,
    ) -> Result<Self, TableError> {
        if characteristic != 0 && !is_prime(characteristic) {
            return Err(TableError::BadCharacteristic(characteristic));
        }
        let sys = hecke.system();
        for (w, entry) in &entries {
            hecke.check(&HeckeElement::standard(w.clone()))?;
            hecke.check(entry)?;
            let fail = |check| TableError::Invariant { w: w.clone(), check };
            let triangular = entry.coeff(w).is_one() && entry.support().all(|y| y == w || sys.bruhat_leq(y, w));
            if !triangular {
                return Err(fail(TableCheck::Triangularity));
            }
            if !hecke.is_bar_invariant(entry) {
                return Err(fail(TableCheck::BarInvariance));
            }
            let positive = hecke
                .kl_expansion(entry)
                .values()
                .all(|c| c.is_bar_invariant() && c.has_nonnegative_coeffs());
            if !positive {
                return Err(fail(TableCheck::KlPositivity));
            }
            if characteristic == 0 && *entry != hecke.kl_basis(w) {
                return Err(fail(TableCheck::KlAgreement));
            }
        }
        Ok(Self {
            cartan_type: sys.cartan_type(),
            characteristic,
            entries,
        })
    }

    /// The characteristic-0 table: the KL basis on all of `W`.
    pub fn characteristic_zero(hecke: &HeckeAlgebra) -> Self {
        let entries = hecke
            .system()
            .elements()
            .iter()
            .map(|w| (w.clone(), hecke.kl_basis(w)))
            .collect();
        Self {
            cartan_type: hecke.system().cartan_type(),
            characteristic: 0,
            entries,
        }
    }

    /// Parses and validates a table file.
    pub fn from_json(hecke: &HeckeAlgebra, text: &str) -> Result<Self, TableError> {
        let file: TableFile = serde_json::from_str(text).map_err(|e| TableError::Parse(e.to_string()))?;
        let sys = hecke.system();
        if file.cartan_type != sys.cartan_type() {
            return Err(TableError::TypeMismatch {
                expected: sys.cartan_type(),
                found: file.cartan_type,
            });
        }
        let mut entries = BTreeMap::new();
        for e in file.entries {
            let w = sys.element_one_based(&e.w)?;
            let mut elem = HeckeElement::zero();
            for t in e.expansion {
                elem.add_term(sys.element_one_based(&t.y)?, &t.coeffs);
            }
            if entries.insert(w.clone(), elem).is_some() {
                return Err(TableError::DuplicateEntry(w));
            }
        }
        Self::new(hecke, file.characteristic, entries)
    }

    pub fn to_json(&self) -> String {
        let file = TableFile {
            cartan_type: self.cartan_type,
            characteristic: self.characteristic,
            entries: self
                .entries
                .iter()
                .map(|(w, e)| EntryFile {
                    w: w.one_based(),
                    expansion: e
                        .terms()
                        .map(|(y, c)| TermFile {
                            y: y.one_based(),
                            coeffs: c.clone(),
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("table serialization")
    }

    pub fn cartan_type(&self) -> CartanType {
        self.cartan_type
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn entry(&self, w: &WeylElement) -> Result<&HeckeElement, TableError> {
        self.entries.get(w).ok_or_else(|| TableError::MissingEntry(w.clone()))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&WeylElement, &HeckeElement)> + '_ {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
