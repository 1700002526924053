//! Characters of objects in the mixed derived category of a flag variety.
//!
//! Every object class is a Hecke algebra element in the standard basis, under
//! the following dictionary:
//!
//! | object / functor      | character                        |
//! |-----------------------|----------------------------------|
//! | standard `Δ_w`        | `H_w`                            |
//! | Tate twist `<1>`      | multiplication by `v`            |
//! | shift `[1]`           | multiplication by `-1`           |
//! | internal shift `{1}`  | multiplication by `-v^-1`        |
//! | Verdier duality       | bar involution                   |
//!
//! The `{1}` rule is forced by `<n> = {-n}[n]`. With it, parity sheaves have
//! character `sigma(p_w)` where `p_w` is the p-canonical basis element and
//! `sigma` substitutes `v -> -v^-1` coefficient-wise; on `P^1` this gives
//! `ch(E_s) = H_s - v^-1 H_e`, which the homotopy engine reproduces.
//!
//! The Koszul duality `kappa` to the Langlands dual flag variety is modeled as
//! the sigma-semilinear transport `H_w -> H_{w^-1}`. Tilting characters are
//! defined through it from the dual table, projectives through Ringel
//! duality, and simples by inverting BGG reciprocity.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::coxeter::{CartanType, CoxeterSystem, WeylElement};
use crate::hecke::{HeckeAlgebra, HeckeElement, HeckeError, PCanTable, TableError};
use crate::ring::LaurentPoly;

#[derive(Debug, Error, Clone)]
pub enum MixError {
    #[error("{0}")]
    Table(String),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error("object belongs to {found}, expected {expected}")]
    ContextMismatch { expected: ContextTag, found: ContextTag },
    #[error("{index} is not a simple reflection of rank {rank}")]
    NotAGenerator { index: usize, rank: usize },
    #[error("BGG reciprocity system is singular at {0}; the p-canonical input is invalid")]
    Singular(WeylElement),
    #[error("inconsistent context: {0}")]
    Setup(String),
}

impl From<TableError> for MixError {
    fn from(e: TableError) -> Self {
        MixError::Table(e.to_string())
    }
}

/// Identifies which flag variety an [`ObjectClass`] lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ContextTag {
    pub cartan_type: CartanType,
    /// `true` on the Langlands-dual side of a [`MixedContext`].
    pub dual: bool,
}

impl fmt::Display for ContextTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dual {
            write!(f, "{} (dual side)", self.cartan_type)
        } else {
            write!(f, "{}", self.cartan_type)
        }
    }
}

/// The character of an object of `D^mix`, tied to its context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectClass {
    class: HeckeElement,
    tag: ContextTag,
}

#[derive(Serialize)]
struct ClassDump<'a> {
    basis: &'static str,
    coeffs: BTreeMap<String, &'a LaurentPoly>,
}

impl ObjectClass {
    pub fn hecke(&self) -> &HeckeElement {
        &self.class
    }

    pub fn into_hecke(self) -> HeckeElement {
        self.class
    }

    pub fn tag(&self) -> ContextTag {
        self.tag
    }

    pub fn coeff(&self, w: &WeylElement) -> LaurentPoly {
        self.class.coeff(w)
    }

    fn with(&self, class: HeckeElement) -> Self {
        Self { class, tag: self.tag }
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        self.with(self.class.scale(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.tag, other.tag, "adding classes from different contexts");
        self.with(self.class.add(&other.class))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.tag, other.tag, "subtracting classes from different contexts");
        self.with(self.class.sub(&other.class))
    }

    /// `F<n>`.
    pub fn tate_twist(&self, n: i64) -> Self {
        self.scale(&LaurentPoly::monomial(1, n))
    }

    /// `F[n]`.
    pub fn shift(&self, n: i64) -> Self {
        self.scale(&LaurentPoly::constant(if n % 2 == 0 { 1 } else { -1 }))
    }

    /// `F{n}`.
    pub fn internal_shift(&self, n: i64) -> Self {
        self.scale(&internal_shift_scalar(n))
    }

    /// JSON dump: `{"basis": "standard", "coeffs": {"w-word": {exp: int}}}`.
    pub fn to_json(&self) -> serde_json::Value {
        let dump = ClassDump {
            basis: "standard",
            coeffs: self.class.terms().map(|(w, c)| (w.label(), c)).collect(),
        };
        serde_json::to_value(dump).expect("class serialization")
    }
}

/// `(-v^-1)^n`, the character of `{n}`.
pub fn internal_shift_scalar(n: i64) -> LaurentPoly {
    LaurentPoly::monomial(if n % 2 == 0 { 1 } else { -1 }, -n)
}

/// A standard or costandard class on a partial flag variety `G/P^I`,
/// labelled by the minimal coset representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParabolicClass {
    pub subset: Vec<usize>,
    pub coset: WeylElement,
    pub scalar: LaurentPoly,
    pub costandard: bool,
}

/// Result of the parity-perversity criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerversityReport {
    pub w: WeylElement,
    pub perverse: bool,
    /// `(u, n, (T : ∇_u<n>))` for every nonzero multiplicity with `n > 0`.
    pub violations: Vec<(WeylElement, i64, BigInt)>,
}

/// Bigraded Hilbert series of `Hom^•(E, E)` for a sum `E` of parity objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtHilbert {
    /// Total series in `t`.
    pub total: LaurentPoly,
}

impl ExtHilbert {
    /// Dimension of the `(i, j)` component; zero off the diagonal.
    pub fn dim(&self, i: i64, j: i64) -> BigInt {
        if i == j {
            self.total.coeff(j)
        } else {
            BigInt::zero()
        }
    }

    pub fn diagonal(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.total.terms()
    }
}

/// An element of the integral group ring `Z[W]`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupRingElement {
    pub coeffs: BTreeMap<WeylElement, BigInt>,
}

impl GroupRingElement {
    pub fn mul(&self, other: &Self, sys: &CoxeterSystem) -> Self {
        let mut out = Self::default();
        for (x, a) in &self.coeffs {
            for (y, b) in &other.coeffs {
                let slot = out.coeffs.entry(sys.mul(x, y)).or_default();
                *slot += a * b;
            }
        }
        out.coeffs.retain(|_, c| !c.is_zero());
        out
    }
}

/// A flag variety together with its Langlands dual and a choice of
/// coefficients, given by a pair of p-canonical tables.
#[derive(Clone)]
pub struct MixedContext {
    hecke: Arc<HeckeAlgebra>,
    dual_hecke: Arc<HeckeAlgebra>,
    pcan: Arc<PCanTable>,
    pcan_dual: Arc<PCanTable>,
    dual_side: bool,
    simples: Arc<OnceLock<Result<BTreeMap<WeylElement, HeckeElement>, MixError>>>,
}

impl fmt::Debug for MixedContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MixedContext").field("tag", &self.tag()).finish()
    }
}

impl MixedContext {
    pub fn new(
        hecke: Arc<HeckeAlgebra>,
        dual_hecke: Arc<HeckeAlgebra>,
        pcan: Arc<PCanTable>,
        pcan_dual: Arc<PCanTable>,
    ) -> Result<Self, MixError> {
        let ty = hecke.system().cartan_type();
        let dual_ty = dual_hecke.system().cartan_type();
        if dual_ty != ty.dual() || hecke.system().coxeter_matrix() != dual_hecke.system().coxeter_matrix() {
            return Err(MixError::Setup(format!("{dual_ty} is not the dual of {ty}")));
        }
        if pcan.cartan_type() != ty {
            return Err(MixError::Setup(format!(
                "table for {} used with {ty}",
                pcan.cartan_type()
            )));
        }
        if pcan_dual.cartan_type() != dual_ty {
            return Err(MixError::Setup(format!(
                "dual table for {} used with {dual_ty}",
                pcan_dual.cartan_type()
            )));
        }
        if pcan.characteristic() != pcan_dual.characteristic() {
            return Err(MixError::Setup(format!(
                "characteristics differ: {} vs {}",
                pcan.characteristic(),
                pcan_dual.characteristic()
            )));
        }
        Ok(Self {
            hecke,
            dual_hecke,
            pcan,
            pcan_dual,
            dual_side: false,
            simples: Arc::new(OnceLock::new()),
        })
    }

    /// Context for `ty` with characteristic-0 tables on both sides.
    pub fn characteristic_zero(ty: CartanType) -> Self {
        let sys = Arc::new(CoxeterSystem::new(ty));
        let dual = Arc::new(sys.dual_system());
        let hecke = Arc::new(HeckeAlgebra::new(sys));
        let dual_hecke = Arc::new(HeckeAlgebra::new(dual));
        let pcan = Arc::new(PCanTable::characteristic_zero(&hecke));
        let pcan_dual = Arc::new(PCanTable::characteristic_zero(&dual_hecke));
        Self::new(hecke, dual_hecke, pcan, pcan_dual).expect("characteristic-0 context")
    }

    /// The same pair viewed from the dual side.
    pub fn dual(&self) -> Self {
        Self {
            hecke: self.dual_hecke.clone(),
            dual_hecke: self.hecke.clone(),
            pcan: self.pcan_dual.clone(),
            pcan_dual: self.pcan.clone(),
            dual_side: !self.dual_side,
            simples: Arc::new(OnceLock::new()),
        }
    }

    pub fn tag(&self) -> ContextTag {
        ContextTag {
            cartan_type: self.system().cartan_type(),
            dual: self.dual_side,
        }
    }

    pub fn system(&self) -> &Arc<CoxeterSystem> {
        self.hecke.system()
    }

    pub fn hecke(&self) -> &Arc<HeckeAlgebra> {
        &self.hecke
    }

    pub fn pcan(&self) -> &PCanTable {
        &self.pcan
    }

    pub fn pcan_dual(&self) -> &PCanTable {
        &self.pcan_dual
    }

    pub fn characteristic(&self) -> u64 {
        self.pcan.characteristic()
    }

    /// Wraps a Hecke element as a class in this context.
    pub fn class(&self, h: HeckeElement) -> Result<ObjectClass, MixError> {
        self.hecke.check(&h)?;
        Ok(ObjectClass {
            class: h,
            tag: self.tag(),
        })
    }

    fn wrap(&self, h: HeckeElement) -> ObjectClass {
        ObjectClass {
            class: h,
            tag: self.tag(),
        }
    }

    fn own(&self, c: &ObjectClass) -> Result<(), MixError> {
        if c.tag == self.tag() {
            Ok(())
        } else {
            Err(MixError::ContextMismatch {
                expected: self.tag(),
                found: c.tag,
            })
        }
    }

    fn check_generator(&self, s: usize) -> Result<(), MixError> {
        let rank = self.system().rank();
        if s < rank {
            Ok(())
        } else {
            Err(MixError::NotAGenerator { index: s, rank })
        }
    }

    pub fn std_class(&self, w: &WeylElement) -> ObjectClass {
        self.wrap(HeckeElement::standard(w.clone()))
    }

    pub fn costd_class(&self, w: &WeylElement) -> ObjectClass {
        self.wrap(self.hecke.bar_standard(w))
    }

    /// Class of the indecomposable parity object `E_w`.
    pub fn parity_class(&self, w: &WeylElement) -> Result<ObjectClass, MixError> {
        let entry = self.pcan.entry(w)?;
        Ok(self.wrap(entry.map_coeffs(LaurentPoly::sigma)))
    }

    /// Class of the indecomposable tilting object `T_w`, transported from the
    /// dual parity object `E_{w^-1}`.
    pub fn tilting_class(&self, w: &WeylElement) -> Result<ObjectClass, MixError> {
        let sys = self.system();
        let entry = self.pcan_dual.entry(&sys.inverse(w))?;
        Ok(self.wrap(entry.map_basis(|y| sys.inverse(y))))
    }

    /// Koszul self-duality: `sum a_w H_w -> sum sigma(a_w) H_{w^-1}` on the dual side.
    pub fn kappa(&self, c: &ObjectClass) -> Result<ObjectClass, MixError> {
        self.own(c)?;
        let sys = self.system();
        let image = c.class.map_coeffs(LaurentPoly::sigma).map_basis(|w| sys.inverse(w));
        Ok(ObjectClass {
            class: image,
            tag: ContextTag {
                cartan_type: sys.cartan_type().dual(),
                dual: !self.dual_side,
            },
        })
    }

    /// Ringel duality: right convolution with `Δ_{w0}`.
    pub fn ringel(&self, c: &ObjectClass) -> Result<ObjectClass, MixError> {
        self.own(c)?;
        let w0 = self.system().longest();
        Ok(self.wrap(self.hecke.mul_standard(&c.class, &w0)))
    }

    /// Inverse Ringel duality: right convolution with `∇_{w0}`.
    pub fn ringel_inv(&self, c: &ObjectClass) -> Result<ObjectClass, MixError> {
        self.own(c)?;
        let w0 = self.system().longest();
        Ok(self.wrap(self.hecke.try_mul(&c.class, &self.hecke.bar_standard(&w0))?))
    }

    /// Class of the projective cover `P_w = R(T_{w w0})`.
    pub fn projective_class(&self, w: &WeylElement) -> Result<ObjectClass, MixError> {
        let sys = self.system();
        let t = self.tilting_class(&sys.mul(w, &sys.longest()))?;
        self.ringel(&t)
    }

    /// Class of the simple object `IC_w`, from BGG reciprocity.
    pub fn simple_class(&self, w: &WeylElement) -> Result<ObjectClass, MixError> {
        let simples = self.simples.get_or_init(|| self.solve_simples());
        match simples {
            Ok(map) => Ok(self.wrap(map[w].clone())),
            Err(e) => Err(e.clone()),
        }
    }

    /// `(P_s : Δ_t<n>) = [∇_t<n> : L_s]`, so
    /// `ch ∇_t = sum_s bar(P_s coefficient at H_t) ch L_s`, unitriangular in
    /// ShortLex order. Solve upwards.
    fn solve_simples(&self) -> Result<BTreeMap<WeylElement, HeckeElement>, MixError> {
        let els = self.system().elements();
        let projectives: Vec<HeckeElement> = els
            .iter()
            .map(|s| self.projective_class(s).map(ObjectClass::into_hecke))
            .collect::<Result<_, _>>()?;
        let mut simples: BTreeMap<WeylElement, HeckeElement> = BTreeMap::new();
        for (ti, t) in els.iter().enumerate() {
            let mut rest = self.hecke.bar_standard(t);
            for (si, s) in els.iter().enumerate() {
                let m = projectives[si].coeff(t).bar();
                match si.cmp(&ti) {
                    std::cmp::Ordering::Less => {
                        if !m.is_zero() {
                            rest = rest.sub(&simples[s].scale(&m));
                        }
                    }
                    std::cmp::Ordering::Equal if m.is_one() => {}
                    std::cmp::Ordering::Greater if m.is_zero() => {}
                    _ => return Err(MixError::Singular(t.clone())),
                }
            }
            simples.insert(t.clone(), rest);
        }
        Ok(simples)
    }

    pub fn convolve(&self, a: &ObjectClass, b: &ObjectClass) -> Result<ObjectClass, MixError> {
        self.own(a)?;
        self.own(b)?;
        Ok(self.wrap(self.hecke.try_mul(&a.class, &b.class)?))
    }

    /// `f_* Δ_w = Δ_{w̄}{dim Y_{w̄} - dim X_w}` for `f: G/B -> G/P^I`.
    pub fn push_std(&self, w: &WeylElement, subset: &[usize]) -> Result<ParabolicClass, MixError> {
        subset.iter().try_for_each(|&s| self.check_generator(s))?;
        let rep = self.system().min_coset_rep(w, subset);
        let drop = rep.length() as i64 - w.length() as i64;
        Ok(ParabolicClass {
            subset: subset.to_vec(),
            scalar: internal_shift_scalar(drop),
            coset: rep,
            costandard: false,
        })
    }

    /// `f_* ∇_w = ∇_{w̄}{dim X_w - dim Y_{w̄}}`.
    pub fn push_costd(&self, w: &WeylElement, subset: &[usize]) -> Result<ParabolicClass, MixError> {
        let mut out = self.push_std(w, subset)?;
        let drop = w.length() as i64 - out.coset.length() as i64;
        out.scalar = internal_shift_scalar(drop);
        out.costandard = true;
        Ok(out)
    }

    /// `π^s_† Δ_w = (π^s_* Δ_w){1}`.
    pub fn pi_push_std(&self, w: &WeylElement, s: usize) -> Result<ParabolicClass, MixError> {
        let mut out = self.push_std(w, &[s])?;
        out.scalar = &out.scalar * &internal_shift_scalar(1);
        Ok(out)
    }

    /// `π^{s†} Δ_{w̄}` for the coset of `coset_elem`: with `w` the maximal
    /// representative, the triangle `Δ_w -> π^{s†}Δ_{w̄} -> Δ_{ws}{1}` gives
    /// `H_w - v^-1 H_{ws}`.
    pub fn pi_pull_std(&self, coset_elem: &WeylElement, s: usize) -> Result<ObjectClass, MixError> {
        self.check_generator(s)?;
        let sys = self.system();
        let w = sys.max_coset_rep(coset_elem, &[s]);
        let ws = sys.mul(&w, &sys.generator(s));
        let mut h = HeckeElement::standard(w);
        h.add_term(ws, &internal_shift_scalar(1));
        Ok(self.wrap(h))
    }

    /// Coordinates in the costandard basis: `c = sum_u m_u(v) ∇_u`.
    pub fn costandard_expansion(&self, c: &ObjectClass) -> Result<BTreeMap<WeylElement, LaurentPoly>, MixError> {
        self.own(c)?;
        let barred = self.hecke.bar_involution(&c.class);
        Ok(barred.terms().map(|(u, m)| (u.clone(), m.bar())).collect())
    }

    /// `E_w` is perverse iff the dual tilting object `Ť_{w^-1}` has no
    /// costandard multiplicity `(Ť : ∇̌_u<n>)` with `n > 0`.
    pub fn is_parity_perverse(&self, w: &WeylElement) -> Result<PerversityReport, MixError> {
        let dual = self.dual();
        let t = dual.tilting_class(&self.system().inverse(w))?;
        let mut violations = Vec::new();
        for (u, m) in dual.costandard_expansion(&t)? {
            for (n, c) in m.terms().filter(|(n, _)| *n > 0) {
                violations.push((u.clone(), n, c.clone()));
            }
        }
        Ok(PerversityReport {
            w: w.clone(),
            perverse: violations.is_empty(),
            violations,
        })
    }

    /// Graded dimension of `Hom^•(E_x, E_y)` as a polynomial in `t`.
    pub fn hom_hilbert(&self, x: &WeylElement, y: &WeylElement) -> Result<LaurentPoly, MixError> {
        let a = self.parity_class(x)?;
        let b = self.parity_class(y)?;
        Ok(self.hecke.euler_pairing(&a.class, &b.class)?.subst_neg_inv())
    }

    /// Hilbert series of `Hom^•(E, E)` for `E = ⊕_{w in ws} E_w`. The
    /// cohomology is concentrated on the diagonal of the bigrading.
    pub fn ext_algebra_hilbert(&self, ws: &[WeylElement]) -> Result<ExtHilbert, MixError> {
        let mut total = LaurentPoly::zero();
        for x in ws {
            for y in ws {
                total += &self.hom_hilbert(x, y)?;
            }
        }
        Ok(ExtHilbert { total })
    }

    /// Degrading functor at the level of characters: evaluate at `v = 1`.
    pub fn degrade(&self, c: &ObjectClass) -> Result<GroupRingElement, MixError> {
        self.own(c)?;
        let mut out = GroupRingElement::default();
        for (w, p) in c.class.terms() {
            let x = p.eval_at_one();
            if !x.is_zero() {
                out.coeffs.insert(w.clone(), x);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(t: &str) -> MixedContext {
        MixedContext::characteristic_zero(t.parse().unwrap())
    }

    fn lp(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().copied())
    }

    fn el(c: &MixedContext, w: &[usize]) -> WeylElement {
        c.system().element_one_based(w).unwrap()
    }

    fn h(c: &MixedContext, terms: &[(&[usize], LaurentPoly)]) -> HeckeElement {
        HeckeElement::from_terms(terms.iter().map(|(w, p)| (el(c, w), p.clone())))
    }

    #[test]
    fn shifts_act_as_scalars() {
        let c = ctx("A1");
        let d = c.std_class(&el(&c, &[1]));
        // <n> = {-n}[n]
        for n in -3..=3 {
            assert_eq!(d.tate_twist(n), d.internal_shift(-n).shift(n));
        }
        assert_eq!(d.shift(1).hecke(), &d.hecke().neg());
        assert_eq!(d.internal_shift(1).coeff(&el(&c, &[1])), lp(&[(-1, -1)]));
    }

    #[test]
    fn standard_and_costandard() {
        let c = ctx("B2");
        let e = WeylElement::identity();
        assert_eq!(c.std_class(&e), c.costd_class(&e));
        let s = el(&c, &[1]);
        assert_eq!(
            c.costd_class(&s).hecke(),
            &h(&c, &[(&[1], lp(&[(0, 1)])), (&[], lp(&[(1, 1), (-1, -1)]))])
        );
        for x in c.system().elements() {
            for y in c.system().elements() {
                let p = c
                    .hecke()
                    .euler_pairing(c.std_class(x).hecke(), c.costd_class(y).hecke())
                    .unwrap();
                assert_eq!(
                    p,
                    if x == y {
                        LaurentPoly::one()
                    } else {
                        LaurentPoly::zero()
                    }
                );
            }
        }
    }

    #[test]
    fn parity_classes() {
        let a1 = ctx("A1");
        let s = el(&a1, &[1]);
        assert_eq!(
            a1.parity_class(&s).unwrap().hecke(),
            &h(&a1, &[(&[1], lp(&[(0, 1)])), (&[], lp(&[(-1, -1)]))])
        );
        assert_eq!(
            a1.parity_class(&WeylElement::identity()).unwrap(),
            a1.std_class(&WeylElement::identity())
        );
        let a2 = ctx("A2");
        let w0 = a2.system().longest();
        let expected = HeckeElement::from_terms(a2.system().elements().iter().map(|y| {
            let d = (w0.length() - y.length()) as i64;
            (y.clone(), LaurentPoly::monomial(if d % 2 == 0 { 1 } else { -1 }, -d))
        }));
        assert_eq!(a2.parity_class(&w0).unwrap().hecke(), &expected);
    }

    #[test]
    fn tilting_classes() {
        let a1 = ctx("A1");
        assert_eq!(
            a1.tilting_class(&WeylElement::identity()).unwrap(),
            a1.std_class(&WeylElement::identity())
        );
        let s = el(&a1, &[1]);
        assert_eq!(
            a1.tilting_class(&s).unwrap().hecke(),
            &h(&a1, &[(&[1], lp(&[(0, 1)])), (&[], lp(&[(1, 1)]))])
        );
        let a2 = ctx("A2");
        let w0 = a2.system().longest();
        let expected = HeckeElement::from_terms(
            a2.system()
                .elements()
                .iter()
                .map(|y| (y.clone(), LaurentPoly::monomial(1, (w0.length() - y.length()) as i64))),
        );
        assert_eq!(a2.tilting_class(&w0).unwrap().hecke(), &expected);
    }

    #[test]
    fn kappa_properties() {
        let c = ctx("B2");
        let d = c.dual();
        let e = WeylElement::identity();
        let v = c.std_class(&e).tate_twist(1);
        assert_eq!(
            c.kappa(&v).unwrap().hecke(),
            &HeckeElement::term(e.clone(), lp(&[(-1, -1)]))
        );
        for w in c.system().elements() {
            let winv = c.system().inverse(w);
            assert_eq!(c.kappa(&c.std_class(w)).unwrap(), d.std_class(&winv));
            assert_eq!(c.kappa(&c.costd_class(w)).unwrap(), d.costd_class(&winv));
            assert_eq!(
                c.kappa(&c.parity_class(w).unwrap()).unwrap(),
                d.tilting_class(&winv).unwrap()
            );
            assert_eq!(
                c.kappa(&c.tilting_class(w).unwrap()).unwrap(),
                d.parity_class(&winv).unwrap()
            );
            let p = c.parity_class(w).unwrap();
            assert_eq!(d.kappa(&c.kappa(&p).unwrap()).unwrap(), p);
        }
        // kappa refuses classes from the other side
        assert!(matches!(
            d.kappa(&c.std_class(&e)),
            Err(MixError::ContextMismatch { .. })
        ));
    }

    #[test]
    fn ringel_duality() {
        for t in ["A1", "A2", "B2"] {
            let c = ctx(t);
            let w0 = c.system().longest();
            for w in c.system().elements() {
                let r = c.ringel(&c.costd_class(w)).unwrap();
                assert_eq!(r, c.std_class(&c.system().mul(w, &w0)));
                let p = c.parity_class(w).unwrap();
                assert_eq!(c.ringel_inv(&c.ringel(&p).unwrap()).unwrap(), p);
            }
        }
        let a1 = ctx("A1");
        let s = el(&a1, &[1]);
        assert_eq!(
            a1.ringel(&a1.costd_class(&s)).unwrap(),
            a1.std_class(&WeylElement::identity())
        );
    }

    #[test]
    fn projective_classes() {
        let a1 = ctx("A1");
        let e = WeylElement::identity();
        let s = el(&a1, &[1]);
        // (H_s + v)(H_s) = H_e + v^-1 H_s
        assert_eq!(
            a1.projective_class(&e).unwrap().hecke(),
            &h(&a1, &[(&[], lp(&[(0, 1)])), (&[1], lp(&[(-1, 1)]))])
        );
        assert_eq!(a1.projective_class(&s).unwrap(), a1.std_class(&s));
        let a2 = ctx("A2");
        let w0 = a2.system().longest();
        assert_eq!(a2.projective_class(&w0).unwrap(), a2.std_class(&w0));
        for w in a2.system().elements() {
            let p = a2.projective_class(w).unwrap();
            assert!(p.coeff(w).is_one());
            assert!(p.hecke().has_nonnegative_coeffs());
            for y in p.hecke().support() {
                assert!(a2.system().bruhat_leq(w, y), "P_{w} contains Δ_{y}");
            }
        }
    }

    #[test]
    fn simple_classes() {
        let a1 = ctx("A1");
        assert_eq!(
            a1.simple_class(&WeylElement::identity()).unwrap(),
            a1.std_class(&WeylElement::identity())
        );
        let s = el(&a1, &[1]);
        assert_eq!(
            a1.simple_class(&s).unwrap().hecke(),
            &h(&a1, &[(&[1], lp(&[(0, 1)])), (&[], lp(&[(-1, -1)]))])
        );
        let a2 = ctx("A2");
        for w in a2.system().elements() {
            assert_eq!(a2.simple_class(w).unwrap(), a2.parity_class(w).unwrap());
        }
    }

    #[test]
    fn convolution_identities() {
        let c = ctx("B2");
        let sys = c.system().clone();
        for w in sys.elements() {
            let prod = c.convolve(&c.std_class(w), &c.costd_class(&sys.inverse(w))).unwrap();
            assert_eq!(prod, c.std_class(&WeylElement::identity()));
            let p = c.parity_class(w).unwrap();
            assert_eq!(c.convolve(&c.std_class(&WeylElement::identity()), &p).unwrap(), p);
        }
        let a1 = ctx("A1");
        assert!(matches!(
            c.convolve(
                &c.std_class(&WeylElement::identity()),
                &a1.std_class(&WeylElement::identity())
            ),
            Err(MixError::ContextMismatch { .. })
        ));
    }

    #[test]
    fn partial_flag_pushes_and_pulls() {
        let a1 = ctx("A1");
        let s = el(&a1, &[1]);
        assert_eq!(a1.pi_pull_std(&s, 0).unwrap(), a1.parity_class(&s).unwrap());
        assert_eq!(
            a1.pi_pull_std(&WeylElement::identity(), 0).unwrap(),
            a1.parity_class(&s).unwrap()
        );
        let push = a1.pi_push_std(&s, 0).unwrap();
        assert!(push.coset.is_identity());
        assert!(push.scalar.is_one());
        // π_‡ Δ_{ws} = Δ_{w̄}{-1}; π_† = π_‡{2}
        let push_e = a1.pi_push_std(&WeylElement::identity(), 0).unwrap();
        assert_eq!(push_e.scalar, internal_shift_scalar(1));
        assert!(matches!(a1.pi_push_std(&s, 3), Err(MixError::NotAGenerator { .. })));
        assert!(matches!(a1.pi_pull_std(&s, 1), Err(MixError::NotAGenerator { .. })));

        let a2 = ctx("A2");
        let sys = a2.system().clone();
        for w in sys.elements() {
            for g in 0..2 {
                let ws = sys.mul(w, &sys.generator(g));
                if ws.length() > w.length() {
                    let conv = a2
                        .convolve(&a2.std_class(w), &a2.parity_class(&sys.generator(g)).unwrap())
                        .unwrap();
                    assert_eq!(conv, a2.pi_pull_std(w, g).unwrap());
                } else {
                    let push = a2.pi_push_std(w, g).unwrap();
                    assert!(push.scalar.is_one());
                    assert_eq!(push.coset, ws);
                }
            }
        }
        let costd = a2.push_costd(&el(&a2, &[1, 2]), &[1]).unwrap();
        assert_eq!(costd.coset, el(&a2, &[1]));
        assert_eq!(costd.scalar, internal_shift_scalar(1));
        let std_push = a2.push_std(&el(&a2, &[1, 2]), &[1]).unwrap();
        assert_eq!(std_push.scalar, internal_shift_scalar(-1));
    }

    #[test]
    fn perversity_criterion() {
        let a1 = ctx("A1");
        for w in a1.system().elements() {
            let r = a1.is_parity_perverse(w).unwrap();
            assert!(r.perverse && r.violations.is_empty());
        }
        let c = ctx("A2");
        for w in c.system().elements() {
            assert!(c.is_parity_perverse(w).unwrap().perverse);
        }
    }

    #[test]
    fn perversity_detects_positive_costandard_multiplicity() {
        // p-canonical style entry b_s + (v + v^-1) b_e in A1.
        let sys = Arc::new(CoxeterSystem::parse("A1").unwrap());
        let hecke = Arc::new(HeckeAlgebra::new(sys.clone()));
        let dual_hecke = Arc::new(HeckeAlgebra::new(Arc::new(sys.dual_system())));
        let s = sys.generator(0);
        let e = WeylElement::identity();
        let mut entries = BTreeMap::new();
        entries.insert(e.clone(), hecke.kl_basis(&e));
        entries.insert(
            s.clone(),
            hecke
                .kl_basis(&s)
                .add(&hecke.kl_basis(&e).scale(&lp(&[(1, 1), (-1, 1)]))),
        );
        let pcan = Arc::new(PCanTable::new(&hecke, 2, entries.clone()).unwrap());
        let pcan_dual = Arc::new(PCanTable::new(&dual_hecke, 2, entries).unwrap());
        let c = MixedContext::new(hecke, dual_hecke, pcan, pcan_dual).unwrap();
        let r = c.is_parity_perverse(&s).unwrap();
        assert!(!r.perverse);
        assert_eq!(r.violations, vec![(e.clone(), 1, BigInt::from(1))]);
        assert!(c.is_parity_perverse(&e).unwrap().perverse);
    }

    #[test]
    fn hom_hilbert_examples() {
        let a1 = ctx("A1");
        let e = WeylElement::identity();
        let s = el(&a1, &[1]);
        assert_eq!(a1.hom_hilbert(&s, &s).unwrap(), lp(&[(0, 1), (2, 1)]));
        assert_eq!(a1.hom_hilbert(&e, &e).unwrap(), LaurentPoly::one());
        assert_eq!(a1.hom_hilbert(&e, &s).unwrap(), lp(&[(1, 1)]));
        assert_eq!(a1.hom_hilbert(&s, &e).unwrap(), lp(&[(1, 1)]));
        let ext = a1.ext_algebra_hilbert(&[e.clone(), s.clone()]).unwrap();
        assert_eq!(ext.total, lp(&[(0, 2), (1, 2), (2, 1)]));
        assert_eq!(ext.dim(1, 1), BigInt::from(2));
        assert_eq!(ext.dim(1, 2), BigInt::zero());
        assert_eq!(a1.ext_algebra_hilbert(&[e]).unwrap().total, LaurentPoly::one());
    }

    #[test]
    fn hom_hilbert_positivity_and_parity() {
        for t in ["A2", "B2"] {
            let c = ctx(t);
            let els = c.system().elements();
            for x in els {
                for y in els {
                    let hh = c.hom_hilbert(x, y).unwrap();
                    assert!(hh.has_nonnegative_coeffs(), "{x} {y}: {hh}");
                    let parity = ((x.length() + y.length()) % 2) as i64;
                    assert!(hh.terms().all(|(e, _)| e.rem_euclid(2) == parity));
                    assert_eq!(hh.coeff(0), BigInt::from((x == y) as i64));
                }
            }
            let ext = c.ext_algebra_hilbert(els).unwrap();
            assert_eq!(ext.total.coeff(0), BigInt::from(els.len()));
        }
    }

    #[test]
    fn degrading() {
        let a1 = ctx("A1");
        let e = WeylElement::identity();
        let s = el(&a1, &[1]);
        let d = a1.degrade(&a1.std_class(&s)).unwrap();
        assert_eq!(d.coeffs.len(), 1);
        assert_eq!(d.coeffs[&s], BigInt::from(1));
        let he = a1.std_class(&e);
        assert_eq!(a1.degrade(&he.tate_twist(5)).unwrap(), a1.degrade(&he).unwrap());
        let t = a1.degrade(&a1.tilting_class(&s).unwrap()).unwrap();
        assert_eq!(t.coeffs[&s], BigInt::from(1));
        assert_eq!(t.coeffs[&e], BigInt::from(1));
        // degrading is multiplicative
        let b2 = ctx("B2");
        let bs = b2.system().clone();
        for x in bs.elements() {
            let a = b2.costd_class(x);
            let b = b2.tilting_class(x).unwrap();
            let lhs = b2.degrade(&b2.convolve(&a, &b).unwrap()).unwrap();
            let rhs = b2.degrade(&a).unwrap().mul(&b2.degrade(&b).unwrap(), &bs);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn class_json_dump() {
        let a1 = ctx("A1");
        let s = el(&a1, &[1]);
        let j = a1.parity_class(&s).unwrap().to_json();
        assert_eq!(
            j,
            serde_json::json!({"basis": "standard", "coeffs": {"e": {"-1": -1}, "1": {"0": 1}}})
        );
    }
}
