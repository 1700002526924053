//! Bounded homotopy category of complexes over a presented graded additive
//! category, at a scale where every Hom space is an explicit matrix.
//!
//! A [`PresentedCategory`] lists indecomposable generators `E_a`, the
//! dimensions of `Hom(E_a, E_b{m})`, and structure constants for composition.
//! Basis element 0 of `Hom(E_a, E_a{0})` is the identity; composites with it
//! are implicit. Scalars are rationals.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hecke::HeckeElement;
use crate::mixclass::{internal_shift_scalar, MixError, MixedContext, ObjectClass};

pub type Scalar = BigRational;

#[derive(Debug, Error)]
pub enum HomotopyError {
    #[error("malformed presentation: {0}")]
    Parse(String),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("duplicate generator {0:?}")]
    DuplicateGenerator(String),
    #[error("Hom({a}, {b}{{{m}}}) is nonzero but {m} has the wrong parity")]
    ParityViolation { a: String, b: String, m: i64 },
    #[error("generator {0} has no identity: Hom({0}, {0}{{0}}) is zero")]
    MissingIdentity(String),
    #[error("composites with the identity are implicit ({0})")]
    IdentityComposite(String),
    #[error("basis index {index} out of range for Hom({a}, {b}{{{m}}})")]
    BasisOutOfRange { a: String, b: String, m: i64, index: usize },
    #[error("vector of length {found} where Hom({a}, {b}{{{m}}}) has dimension {expected}")]
    BadVector {
        a: String,
        b: String,
        m: i64,
        expected: usize,
        found: usize,
    },
    #[error("composition is not associative on Hom({0})")]
    Associativity(String),
    #[error("differential matrix has the wrong shape in degree {0}")]
    BadShape(i64),
    #[error("d∘d is nonzero in degree {0}")]
    NotAComplex(i64),
    #[error("map does not commute with differentials in degree {0}")]
    NotAChainMap(i64),
    #[error("objects come from different presented categories")]
    CategoryMismatch,
    #[error("the presentation has no closed-stratum data")]
    NoClosedStratum,
    #[error("{0} is the closed-stratum generator")]
    ClosedGenerator(String),
    #[error("generator {0} has no Weyl group label")]
    UnresolvedLabel(String),
    #[error(transparent)]
    Mix(#[from] MixError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    /// Dimension of the corresponding stratum.
    pub dim: i64,
    /// 1-based reduced word of the Weyl group element labelling the stratum.
    pub weyl: Option<Vec<usize>>,
}

/// Components of the adjunction unit `E_t -> i_* i^* E_t` for a closed stratum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedStratum {
    pub generator: usize,
    /// For each other generator `t`, the summands `E_closed{shift}` of
    /// `i_* i^* E_t` with the unit component in `Hom(t, closed, shift)`.
    pub units: BTreeMap<usize, Vec<(i64, Vec<Scalar>)>>,
}

type CompKey = (usize, usize, usize, i64, i64, usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentedCategory {
    name: String,
    generators: Vec<Generator>,
    hom_dims: BTreeMap<(usize, usize, i64), usize>,
    composition: BTreeMap<CompKey, Vec<Scalar>>,
    closed: Option<ClosedStratum>,
}

#[derive(Serialize, Deserialize)]
struct PresentationFile {
    name: String,
    generators: Vec<GeneratorFile>,
    hom_dims: Vec<HomDimFile>,
    #[serde(default)]
    composition: Vec<CompositionFile>,
    #[serde(default)]
    closed_stratum: Option<ClosedFile>,
}

#[derive(Serialize, Deserialize)]
struct GeneratorFile {
    label: String,
    dim: i64,
    #[serde(default)]
    weyl: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct HomDimFile {
    from: String,
    to: String,
    degree: i64,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct BasisRef {
    from: String,
    to: String,
    degree: i64,
    index: usize,
}

/// `second ∘ first = result`.
#[derive(Serialize, Deserialize)]
struct CompositionFile {
    first: BasisRef,
    second: BasisRef,
    result: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct ClosedFile {
    generator: String,
    units: Vec<UnitFile>,
}

#[derive(Serialize, Deserialize)]
struct UnitFile {
    from: String,
    components: Vec<UnitComponent>,
}

#[derive(Serialize, Deserialize)]
struct UnitComponent {
    shift: i64,
    coeffs: Vec<i64>,
}

fn int(c: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(c))
}

fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn add_scaled(acc: &mut [Scalar], v: &[Scalar], c: &Scalar) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += x * c;
    }
}

impl PresentedCategory {
    /// The cohomology of `P^1` and of a point: strata `e` (point) and `s`.
    pub fn sl2() -> Arc<Self> {
        static SL2: OnceLock<Arc<PresentedCategory>> = OnceLock::new();
        SL2.get_or_init(|| {
            Arc::new(Self::from_json(include_str!("../data/sl2.json")).expect("bundled SL2 presentation"))
        })
        .clone()
    }

    pub fn from_json(text: &str) -> Result<Self, HomotopyError> {
        let file: PresentationFile = serde_json::from_str(text).map_err(|e| HomotopyError::Parse(e.to_string()))?;
        let mut generators = Vec::new();
        let mut index = HashMap::new();
        for g in file.generators {
            if index.insert(g.label.clone(), generators.len()).is_some() {
                return Err(HomotopyError::DuplicateGenerator(g.label));
            }
            generators.push(Generator {
                label: g.label,
                dim: g.dim,
                weyl: g.weyl,
            });
        }
        let lookup = |l: &str| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| HomotopyError::UnknownGenerator(l.to_string()))
        };
        let mut hom_dims = BTreeMap::new();
        for h in &file.hom_dims {
            if h.dim > 0 {
                hom_dims.insert((lookup(&h.from)?, lookup(&h.to)?, h.degree), h.dim);
            }
        }
        let mut composition = BTreeMap::new();
        for c in &file.composition {
            let (a, b, m, i) = (
                lookup(&c.first.from)?,
                lookup(&c.first.to)?,
                c.first.degree,
                c.first.index,
            );
            let (b2, cc, n, j) = (
                lookup(&c.second.from)?,
                lookup(&c.second.to)?,
                c.second.degree,
                c.second.index,
            );
            if b != b2 {
                return Err(HomotopyError::Parse(format!(
                    "composite of {}->{} with {}->{}",
                    c.first.from, c.first.to, c.second.from, c.second.to
                )));
            }
            composition.insert((a, b, cc, m, n, i, j), c.result.iter().map(|&x| int(x)).collect());
        }
        let closed = match file.closed_stratum {
            None => None,
            Some(cf) => {
                let generator = lookup(&cf.generator)?;
                let mut units = BTreeMap::new();
                for u in cf.units {
                    let comps = u
                        .components
                        .iter()
                        .map(|c| (c.shift, c.coeffs.iter().map(|&x| int(x)).collect()))
                        .collect();
                    units.insert(lookup(&u.from)?, comps);
                }
                Some(ClosedStratum { generator, units })
            }
        };
        let cat = Self {
            name: file.name,
            generators,
            hom_dims,
            composition,
            closed,
        };
        cat.validate()?;
        Ok(cat)
    }

    pub fn to_json(&self) -> String {
        let label = |i: usize| self.generators[i].label.clone();
        let file = PresentationFile {
            name: self.name.clone(),
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorFile {
                    label: g.label.clone(),
                    dim: g.dim,
                    weyl: g.weyl.clone(),
                })
                .collect(),
            hom_dims: self
                .hom_dims
                .iter()
                .map(|(&(a, b, m), &dim)| HomDimFile {
                    from: label(a),
                    to: label(b),
                    degree: m,
                    dim,
                })
                .collect(),
            composition: self
                .composition
                .iter()
                .map(|(&(a, b, c, m, n, i, j), r)| CompositionFile {
                    first: BasisRef {
                        from: label(a),
                        to: label(b),
                        degree: m,
                        index: i,
                    },
                    second: BasisRef {
                        from: label(b),
                        to: label(c),
                        degree: n,
                        index: j,
                    },
                    result: r
                        .iter()
                        .map(|x| x.to_integer().try_into().expect("integer structure constant"))
                        .collect(),
                })
                .collect(),
            closed_stratum: self.closed.as_ref().map(|c| ClosedFile {
                generator: label(c.generator),
                units: c
                    .units
                    .iter()
                    .map(|(&t, comps)| UnitFile {
                        from: label(t),
                        components: comps
                            .iter()
                            .map(|(shift, v)| UnitComponent {
                                shift: *shift,
                                coeffs: v
                                    .iter()
                                    .map(|x| x.to_integer().try_into().expect("integer unit"))
                                    .collect(),
                            })
                            .collect(),
                    })
                    .collect(),
            }),
        };
        serde_json::to_string_pretty(&file).expect("presentation serialization")
    }

    fn validate(&self) -> Result<(), HomotopyError> {
        let label = |i: usize| self.generators[i].label.clone();
        for &(a, b, m) in self.hom_dims.keys() {
            if (m - self.generators[a].dim - self.generators[b].dim).rem_euclid(2) != 0 {
                return Err(HomotopyError::ParityViolation {
                    a: label(a),
                    b: label(b),
                    m,
                });
            }
        }
        for a in 0..self.generators.len() {
            if self.hom_dim(a, a, 0) == 0 {
                return Err(HomotopyError::MissingIdentity(label(a)));
            }
        }
        for (&(a, b, c, m, n, i, j), r) in &self.composition {
            if (a == b && m == 0 && i == 0) || (b == c && n == 0 && j == 0) {
                return Err(HomotopyError::IdentityComposite(format!(
                    "{} -> {} -> {}",
                    label(a),
                    label(b),
                    label(c)
                )));
            }
            for (x, y, d, k) in [(a, b, m, i), (b, c, n, j)] {
                if k >= self.hom_dim(x, y, d) {
                    return Err(HomotopyError::BasisOutOfRange {
                        a: label(x),
                        b: label(y),
                        m: d,
                        index: k,
                    });
                }
            }
            self.check_vector(a, c, m + n, r)?;
        }
        if let Some(closed) = &self.closed {
            for (&t, comps) in &closed.units {
                if t == closed.generator {
                    return Err(HomotopyError::ClosedGenerator(label(t)));
                }
                for (shift, v) in comps {
                    self.check_vector(t, closed.generator, *shift, v)?;
                }
            }
        }
        self.check_associativity()
    }

    fn check_vector(&self, a: usize, b: usize, m: i64, v: &[Scalar]) -> Result<(), HomotopyError> {
        let expected = self.hom_dim(a, b, m);
        if v.len() == expected {
            Ok(())
        } else {
            Err(HomotopyError::BadVector {
                a: self.generators[a].label.clone(),
                b: self.generators[b].label.clone(),
                m,
                expected,
                found: v.len(),
            })
        }
    }

    fn check_associativity(&self) -> Result<(), HomotopyError> {
        let spaces: Vec<(usize, usize, i64, usize)> =
            self.hom_dims.iter().map(|(&(a, b, m), &d)| (a, b, m, d)).collect();
        for &(a, b, m, d1) in &spaces {
            for &(_, c, n, d2) in spaces.iter().filter(|s| s.0 == b) {
                for &(_, dd, k, d3) in spaces.iter().filter(|s| s.0 == c) {
                    for i in 0..d1 {
                        let f = unit_vector(d1, i);
                        for j in 0..d2 {
                            let g = unit_vector(d2, j);
                            let gf = self.compose(a, b, c, m, n, &f, &g);
                            for l in 0..d3 {
                                let h = unit_vector(d3, l);
                                let left = self.compose(a, c, dd, m + n, k, &gf, &h);
                                let hg = self.compose(b, c, dd, n, k, &g, &h);
                                let right = self.compose(a, b, dd, m, n + k, &f, &hg);
                                if left != right {
                                    let name = |x: usize| self.generators[x].label.clone();
                                    return Err(HomotopyError::Associativity(format!(
                                        "{} -> {} -> {} -> {}",
                                        name(a),
                                        name(b),
                                        name(c),
                                        name(dd)
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, label: &str) -> Result<usize, HomotopyError> {
        self.generators
            .iter()
            .position(|g| g.label == label)
            .ok_or_else(|| HomotopyError::UnknownGenerator(label.to_string()))
    }

    pub fn closed_stratum(&self) -> Option<&ClosedStratum> {
        self.closed.as_ref()
    }

    /// `dim Hom(E_a, E_b{m})`.
    pub fn hom_dim(&self, a: usize, b: usize, m: i64) -> usize {
        self.hom_dims.get(&(a, b, m)).copied().unwrap_or(0)
    }

    pub fn identity(&self, a: usize) -> Vec<Scalar> {
        unit_vector(self.hom_dim(a, a, 0), 0)
    }

    /// `g ∘ f` for `f ∈ Hom(a, b{m})` and `g ∈ Hom(b, c{n})`.
    #[allow(clippy::too_many_arguments)]
    pub fn compose(&self, a: usize, b: usize, c: usize, m: i64, n: i64, f: &[Scalar], g: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.hom_dim(a, c, m + n)];
        for (i, fi) in f.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, gj) in g.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                let coeff = fi * gj;
                if a == b && m == 0 && i == 0 {
                    out[j] += coeff;
                } else if b == c && n == 0 && j == 0 {
                    out[i] += coeff;
                } else if let Some(r) = self.composition.get(&(a, b, c, m, n, i, j)) {
                    add_scaled(&mut out, r, &coeff);
                }
            }
        }
        out
    }
}

fn unit_vector(len: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); len];
    v[i] = Scalar::one();
    v
}

/// `E_gen{shift}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Summand {
    pub gen: usize,
    pub shift: i64,
}

/// A finite direct sum of shifted generators.
pub type GradedObject = Vec<Summand>;

/// A morphism between graded objects: `rows[target][source]` is a vector in
/// `Hom(E_src, E_tgt{tgt.shift - src.shift})`.
pub type Matrix = Vec<Vec<Vec<Scalar>>>;

/// A bounded complex: `terms[i]` sits in homological degree `i`, and
/// `diffs[i]: terms[i] -> terms[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexObj {
    category: Arc<PresentedCategory>,
    terms: BTreeMap<i64, GradedObject>,
    diffs: BTreeMap<i64, Matrix>,
}

/// Degreewise components `A^i -> B^i`.
pub type ChainMap = BTreeMap<i64, Matrix>;

fn same_category(a: &Arc<PresentedCategory>, b: &Arc<PresentedCategory>) -> Result<(), HomotopyError> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(HomotopyError::CategoryMismatch)
    }
}

fn zero_matrix(cat: &PresentedCategory, src: &[Summand], tgt: &[Summand]) -> Matrix {
    tgt.iter()
        .map(|y| {
            src.iter()
                .map(|x| vec![Scalar::zero(); cat.hom_dim(x.gen, y.gen, y.shift - x.shift)])
                .collect()
        })
        .collect()
}

/// Matrix product `g ∘ f` for `f: xs -> ys`, `g: ys -> zs`.
fn mat_compose(
    cat: &PresentedCategory,
    xs: &[Summand],
    ys: &[Summand],
    zs: &[Summand],
    f: &Matrix,
    g: &Matrix,
) -> Matrix {
    let mut out = zero_matrix(cat, xs, zs);
    for (k, z) in zs.iter().enumerate() {
        for (i, x) in xs.iter().enumerate() {
            for (j, y) in ys.iter().enumerate() {
                let part = cat.compose(
                    x.gen,
                    y.gen,
                    z.gen,
                    y.shift - x.shift,
                    z.shift - y.shift,
                    &f[j][i],
                    &g[k][j],
                );
                add_scaled(&mut out[k][i], &part, &Scalar::one());
            }
        }
    }
    out
}

fn mat_is_zero(m: &Matrix) -> bool {
    m.iter().flatten().all(|v| is_zero_vec(v))
}

fn mat_scale(m: &Matrix, c: &Scalar) -> Matrix {
    m.iter()
        .map(|row| row.iter().map(|v| v.iter().map(|x| x * c).collect()).collect())
        .collect()
}

#[derive(Serialize, Deserialize)]
struct ComplexFile {
    category: String,
    terms: BTreeMap<i64, Vec<SummandFile>>,
    differentials: BTreeMap<i64, Vec<Vec<Vec<String>>>>,
}

#[derive(Serialize, Deserialize)]
struct SummandFile {
    gen: String,
    shift: i64,
}

impl ComplexObj {
    /// Builds a complex, checking matrix shapes and `d ∘ d = 0`. Missing
    /// differentials are zero.
    pub fn new(
        category: Arc<PresentedCategory>,
        terms: BTreeMap<i64, GradedObject>,
        diffs: BTreeMap<i64, Matrix>,
    ) -> Result<Self, HomotopyError> {
        let terms: BTreeMap<i64, GradedObject> = terms.into_iter().filter(|(_, t)| !t.is_empty()).collect();
        let empty = Vec::new();
        for (&i, d) in &diffs {
            let src = terms.get(&i).unwrap_or(&empty);
            let tgt = terms.get(&(i + 1)).unwrap_or(&empty);
            let ok = d.len() == tgt.len()
                && d.iter().zip(tgt).all(|(row, y)| {
                    row.len() == src.len()
                        && row
                            .iter()
                            .zip(src)
                            .all(|(v, x)| v.len() == category.hom_dim(x.gen, y.gen, y.shift - x.shift))
                });
            if !ok {
                return Err(HomotopyError::BadShape(i));
            }
        }
        for g in terms.values().flatten() {
            if g.gen >= category.generators.len() {
                return Err(HomotopyError::UnknownGenerator(g.gen.to_string()));
            }
        }
        let mut out = Self {
            category,
            terms,
            diffs: BTreeMap::new(),
        };
        for (i, d) in diffs {
            if out.terms.contains_key(&i) && out.terms.contains_key(&(i + 1)) && !mat_is_zero(&d) {
                out.diffs.insert(i, d);
            }
        }
        for &i in out.diffs.keys() {
            if let Some(next) = out.diffs.get(&(i + 1)) {
                let dd = mat_compose(
                    &out.category,
                    &out.terms[&i],
                    &out.terms[&(i + 1)],
                    &out.terms[&(i + 2)],
                    &out.diffs[&i],
                    next,
                );
                if !mat_is_zero(&dd) {
                    return Err(HomotopyError::NotAComplex(i));
                }
            }
        }
        Ok(out)
    }

    pub fn zero(category: Arc<PresentedCategory>) -> Self {
        Self {
            category,
            terms: BTreeMap::new(),
            diffs: BTreeMap::new(),
        }
    }

    /// `E_gen` concentrated in degree 0.
    pub fn generator(category: Arc<PresentedCategory>, gen: usize) -> Self {
        Self::from_object(category, vec![Summand { gen, shift: 0 }])
    }

    /// A graded object concentrated in degree 0.
    pub fn from_object(category: Arc<PresentedCategory>, object: GradedObject) -> Self {
        let terms = BTreeMap::from([(0, object)]);
        Self::new(category, terms, BTreeMap::new()).expect("single-term complex")
    }

    /// Two-term complex `src -> tgt` in degrees `degree, degree + 1`.
    pub fn two_term(
        category: Arc<PresentedCategory>,
        degree: i64,
        src: GradedObject,
        tgt: GradedObject,
        d: Matrix,
    ) -> Result<Self, HomotopyError> {
        let terms = BTreeMap::from([(degree, src), (degree + 1, tgt)]);
        Self::new(category, terms, BTreeMap::from([(degree, d)]))
    }

    pub fn category(&self) -> &Arc<PresentedCategory> {
        &self.category
    }

    pub fn terms(&self) -> &BTreeMap<i64, GradedObject> {
        &self.terms
    }

    pub fn term(&self, i: i64) -> &[Summand] {
        self.terms.get(&i).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `d^i`, materialized as a zero matrix when absent.
    pub fn differential(&self, i: i64) -> Matrix {
        self.diffs
            .get(&i)
            .cloned()
            .unwrap_or_else(|| zero_matrix(&self.category, self.term(i), self.term(i + 1)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total number of indecomposable summands.
    pub fn size(&self) -> usize {
        self.terms.values().map(Vec::len).sum()
    }

    /// `A[k]`: `(A[k])^i = A^{i+k}` with differential `(-1)^k d`.
    pub fn shift(&self, k: i64) -> Self {
        let sign = int(if k % 2 == 0 { 1 } else { -1 });
        Self {
            category: self.category.clone(),
            terms: self.terms.iter().map(|(&i, t)| (i - k, t.clone())).collect(),
            diffs: self.diffs.iter().map(|(&i, d)| (i - k, mat_scale(d, &sign))).collect(),
        }
    }

    /// `A{q}`.
    pub fn internal_shift(&self, q: i64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&i, t)| {
                (
                    i,
                    t.iter()
                        .map(|s| Summand {
                            gen: s.gen,
                            shift: s.shift + q,
                        })
                        .collect(),
                )
            })
            .collect();
        Self {
            category: self.category.clone(),
            terms,
            diffs: self.diffs.clone(),
        }
    }

    /// `A<n> = A{-n}[n]`.
    pub fn tate_twist(&self, n: i64) -> Self {
        self.internal_shift(-n).shift(n)
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self, HomotopyError> {
        same_category(&self.category, &other.category)?;
        let cat = &self.category;
        let mut terms = self.terms.clone();
        for (&i, t) in &other.terms {
            terms.entry(i).or_default().extend(t.iter().copied());
        }
        let mut diffs = BTreeMap::new();
        for &i in terms.keys() {
            if !terms.contains_key(&(i + 1)) {
                continue;
            }
            let (a_src, a_tgt) = (self.term(i), self.term(i + 1));
            let (b_src, b_tgt) = (other.term(i), other.term(i + 1));
            let mut d = zero_matrix(cat, &terms[&i], &terms[&(i + 1)]);
            let da = self.differential(i);
            let db = other.differential(i);
            for r in 0..a_tgt.len() {
                for c in 0..a_src.len() {
                    d[r][c] = da[r][c].clone();
                }
            }
            for r in 0..b_tgt.len() {
                for c in 0..b_src.len() {
                    d[a_tgt.len() + r][a_src.len() + c] = db[r][c].clone();
                }
            }
            diffs.insert(i, d);
        }
        Self::new(cat.clone(), terms, diffs)
    }

    /// Checks that `f: self -> target` commutes with the differentials.
    pub fn check_chain_map(&self, target: &Self, f: &ChainMap) -> Result<(), HomotopyError> {
        same_category(&self.category, &target.category)?;
        let cat = &self.category;
        let degrees: Vec<i64> = self.terms.keys().copied().collect();
        for &i in &degrees {
            let fi = f
                .get(&i)
                .cloned()
                .unwrap_or_else(|| zero_matrix(cat, self.term(i), target.term(i)));
            let fn_ = f
                .get(&(i + 1))
                .cloned()
                .unwrap_or_else(|| zero_matrix(cat, self.term(i + 1), target.term(i + 1)));
            let (src, tgt) = (self.term(i), target.term(i));
            if fi.len() != tgt.len() || fi.iter().any(|row| row.len() != src.len()) {
                return Err(HomotopyError::BadShape(i));
            }
            let lhs = mat_compose(cat, src, tgt, target.term(i + 1), &fi, &target.differential(i));
            let rhs = mat_compose(
                cat,
                src,
                self.term(i + 1),
                target.term(i + 1),
                &self.differential(i),
                &fn_,
            );
            if lhs != rhs {
                return Err(HomotopyError::NotAChainMap(i));
            }
        }
        Ok(())
    }

    /// The identity chain map.
    pub fn identity_map(&self) -> ChainMap {
        let cat = &self.category;
        self.terms
            .iter()
            .map(|(&i, t)| {
                let mut m = zero_matrix(cat, t, t);
                for (k, s) in t.iter().enumerate() {
                    m[k][k] = cat.identity(s.gen);
                }
                (i, m)
            })
            .collect()
    }

    /// `cone(f)^i = A^{i+1} ⊕ B^i` with differential `[[-d_A, 0], [f, d_B]]`.
    pub fn cone(a: &Self, b: &Self, f: &ChainMap) -> Result<Self, HomotopyError> {
        a.check_chain_map(b, f)?;
        let cat = &a.category;
        let degrees: std::collections::BTreeSet<i64> =
            a.terms.keys().map(|i| i - 1).chain(b.terms.keys().copied()).collect();
        let mut terms = BTreeMap::new();
        for &i in &degrees {
            let mut t = a.term(i + 1).to_vec();
            t.extend_from_slice(b.term(i));
            terms.insert(i, t);
        }
        let mut diffs = BTreeMap::new();
        for &i in &degrees {
            if !degrees.contains(&(i + 1)) {
                continue;
            }
            let mut d = zero_matrix(cat, &terms[&i], &terms[&(i + 1)]);
            let (a_src, a_tgt) = (a.term(i + 1), a.term(i + 2));
            let (b_src, b_tgt) = (b.term(i), b.term(i + 1));
            let da = a.differential(i + 1);
            let db = b.differential(i);
            let fi = f.get(&(i + 1));
            for r in 0..a_tgt.len() {
                for c in 0..a_src.len() {
                    d[r][c] = da[r][c].iter().map(|x| -x).collect();
                }
            }
            if let Some(fi) = fi {
                for r in 0..b_tgt.len() {
                    for c in 0..a_src.len() {
                        d[a_tgt.len() + r][c] = fi[r][c].clone();
                    }
                }
            }
            for r in 0..b_tgt.len() {
                for c in 0..b_src.len() {
                    d[a_tgt.len() + r][a_src.len() + c] = db[r][c].clone();
                }
            }
            diffs.insert(i, d);
        }
        Self::new(cat.clone(), terms, diffs)
    }

    /// Removes contractible summands `E --c·id--> E` by Gaussian elimination
    /// until no differential component is a nonzero multiple of an identity.
    pub fn minimalize(&self) -> Self {
        let mut cur = self.clone();
        while let Some((i, x, y)) = cur.find_isomorphism() {
            cur = cur.eliminate(i, x, y);
        }
        cur
    }

    fn find_isomorphism(&self) -> Option<(i64, usize, usize)> {
        for (&i, d) in &self.diffs {
            let src = &self.terms[&i];
            let tgt = &self.terms[&(i + 1)];
            for (y, row) in d.iter().enumerate() {
                for (x, v) in row.iter().enumerate() {
                    if src[x] == tgt[y] && !v.is_empty() && !v[0].is_zero() && v[1..].iter().all(Zero::is_zero) {
                        return Some((i, x, y));
                    }
                }
            }
        }
        None
    }

    /// Gaussian elimination of the isomorphism `d^i[y][x] = c·id`: the
    /// complex `A -> X ⊕ B -> Y ⊕ C -> D` is replaced by
    /// `A -> B -> C -> D` with middle differential `ε - γ c^{-1} δ`.
    fn eliminate(&self, i: i64, x: usize, y: usize) -> Self {
        let cat = &self.category;
        let src = &self.terms[&i];
        let tgt = &self.terms[&(i + 1)];
        let d = &self.diffs[&i];
        let inv = d[y][x][0].recip();
        let mut terms = self.terms.clone();
        terms.get_mut(&i).unwrap().remove(x);
        terms.get_mut(&(i + 1)).unwrap().remove(y);
        let mut diffs = self.diffs.clone();
        if let Some(prev) = diffs.get_mut(&(i - 1)) {
            prev.remove(x);
        }
        if let Some(next) = diffs.get_mut(&(i + 1)) {
            for row in next.iter_mut() {
                row.remove(y);
            }
        }
        let pivot = src[x];
        let mut mid = Vec::new();
        for (z, tz) in tgt.iter().enumerate().filter(|&(z, _)| z != y) {
            let mut row = Vec::new();
            for (w, sw) in src.iter().enumerate().filter(|&(w, _)| w != x) {
                let gamma_delta = cat.compose(
                    sw.gen,
                    pivot.gen,
                    tz.gen,
                    pivot.shift - sw.shift,
                    tz.shift - pivot.shift,
                    &d[y][w],
                    &d[z][x],
                );
                let mut v = d[z][w].clone();
                add_scaled(&mut v, &gamma_delta, &-inv.clone());
                row.push(v);
            }
            mid.push(row);
        }
        diffs.insert(i, mid);
        Self::new(cat.clone(), terms, diffs).expect("Gaussian elimination preserves d∘d = 0")
    }

    /// The Hom complex `Hom^•(self, target{q})`.
    pub fn hom_complex(&self, target: &Self, q: i64) -> Result<HomComplex, HomotopyError> {
        same_category(&self.category, &target.category)?;
        let b = target.internal_shift(q);
        let cat = &self.category;
        let (Some((&a_lo, _)), Some((&a_hi, _)), Some((&b_lo, _)), Some((&b_hi, _))) = (
            self.terms.first_key_value(),
            self.terms.last_key_value(),
            b.terms.first_key_value(),
            b.terms.last_key_value(),
        ) else {
            return Ok(HomComplex {
                bases: BTreeMap::new(),
                differentials: BTreeMap::new(),
            });
        };
        let mut bases: BTreeMap<i64, Vec<HomBasis>> = BTreeMap::new();
        for k in (b_lo - a_hi)..=(b_hi - a_lo) {
            let mut basis = Vec::new();
            for (&i, ai) in &self.terms {
                for (tx, x) in ai.iter().enumerate() {
                    for (ty, y) in b.term(i + k).iter().enumerate() {
                        for idx in 0..cat.hom_dim(x.gen, y.gen, y.shift - x.shift) {
                            basis.push(HomBasis {
                                degree: i,
                                src: tx,
                                tgt: ty,
                                index: idx,
                            });
                        }
                    }
                }
            }
            bases.insert(k, basis);
        }
        let mut differentials = BTreeMap::new();
        for (&k, basis) in &bases {
            let Some(next) = bases.get(&(k + 1)) else { continue };
            let position: HashMap<(i64, usize, usize, usize), usize> = next
                .iter()
                .enumerate()
                .map(|(p, h)| ((h.degree, h.src, h.tgt, h.index), p))
                .collect();
            let sign = int(if k % 2 == 0 { -1 } else { 1 });
            let mut columns = Vec::new();
            for h in basis {
                let mut col = vec![Scalar::zero(); next.len()];
                let x = self.term(h.degree)[h.src];
                let y = b.term(h.degree + k)[h.tgt];
                let f = unit_vector(cat.hom_dim(x.gen, y.gen, y.shift - x.shift), h.index);
                // d_B ∘ f
                let db = b.differential(h.degree + k);
                for (tz, z) in b.term(h.degree + k + 1).iter().enumerate() {
                    let v = cat.compose(
                        x.gen,
                        y.gen,
                        z.gen,
                        y.shift - x.shift,
                        z.shift - y.shift,
                        &f,
                        &db[tz][h.tgt],
                    );
                    for (idx, c) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                        col[position[&(h.degree, h.src, tz, idx)]] += c;
                    }
                }
                // -(-1)^k f ∘ d_A
                let da = self.differential(h.degree - 1);
                for (tw, w) in self.term(h.degree - 1).iter().enumerate() {
                    let v = cat.compose(
                        w.gen,
                        x.gen,
                        y.gen,
                        x.shift - w.shift,
                        y.shift - x.shift,
                        &da[h.src][tw],
                        &f,
                    );
                    for (idx, c) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                        col[position[&(h.degree - 1, tw, h.tgt, idx)]] += c * &sign;
                    }
                }
                columns.push(col);
            }
            differentials.insert(k, columns);
        }
        Ok(HomComplex { bases, differentials })
    }

    /// `dim Hom_{K^b}(self, target{q}[k])`.
    pub fn hom_dim(&self, target: &Self, q: i64, k: i64) -> Result<usize, HomotopyError> {
        Ok(self.hom_complex(target, q)?.cohomology_dim(k))
    }

    /// `dim Hom_{K^b}(self, target<n>[i])`.
    pub fn tate_hom_dim(&self, target: &Self, n: i64, i: i64) -> Result<usize, HomotopyError> {
        self.hom_dim(target, -n, n + i)
    }

    /// `Σ_i (-1)^i Σ_{E_g{m} ∈ A^i} (-v^-1)^m ch(E_g)`.
    pub fn ch(&self, ctx: &MixedContext) -> Result<ObjectClass, HomotopyError> {
        let mut total = HeckeElement::zero();
        for (&i, t) in &self.terms {
            for s in t {
                let g = &self.category.generators[s.gen];
                let word = g
                    .weyl
                    .as_ref()
                    .ok_or_else(|| HomotopyError::UnresolvedLabel(g.label.clone()))?;
                let w = ctx
                    .system()
                    .element_one_based(word)
                    .map_err(|_| HomotopyError::UnresolvedLabel(g.label.clone()))?;
                let mut scalar = internal_shift_scalar(s.shift);
                if i % 2 != 0 {
                    scalar = -scalar;
                }
                total.add_assign(&ctx.parity_class(&w)?.hecke().scale(&scalar));
            }
        }
        Ok(ctx.class(total)?)
    }

    pub fn to_json(&self) -> String {
        let cat = &self.category;
        let file = ComplexFile {
            category: cat.name.clone(),
            terms: self
                .terms
                .iter()
                .map(|(&i, t)| {
                    let t = t
                        .iter()
                        .map(|s| SummandFile {
                            gen: cat.generators[s.gen].label.clone(),
                            shift: s.shift,
                        })
                        .collect();
                    (i, t)
                })
                .collect(),
            differentials: self
                .diffs
                .iter()
                .map(|(&i, d)| {
                    let d = d
                        .iter()
                        .map(|row| {
                            row.iter()
                                .map(|v| v.iter().map(ToString::to_string).collect())
                                .collect()
                        })
                        .collect();
                    (i, d)
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("complex serialization")
    }

    pub fn from_json(category: Arc<PresentedCategory>, text: &str) -> Result<Self, HomotopyError> {
        let file: ComplexFile = serde_json::from_str(text).map_err(|e| HomotopyError::Parse(e.to_string()))?;
        if file.category != category.name {
            return Err(HomotopyError::CategoryMismatch);
        }
        let mut terms = BTreeMap::new();
        for (i, t) in file.terms {
            let t = t
                .into_iter()
                .map(|s| {
                    Ok(Summand {
                        gen: category.generator(&s.gen)?,
                        shift: s.shift,
                    })
                })
                .collect::<Result<Vec<_>, HomotopyError>>()?;
            terms.insert(i, t);
        }
        let mut diffs = BTreeMap::new();
        for (i, d) in file.differentials {
            let parse = |s: &String| {
                s.parse::<Scalar>()
                    .map_err(|e| HomotopyError::Parse(format!("{s:?}: {e}")))
            };
            let d = d
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|v| v.iter().map(parse).collect::<Result<Vec<_>, _>>())
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            diffs.insert(i, d);
        }
        Self::new(category, terms, diffs)
    }

    /// `E_t^+ = [E_t -> i_* i^* E_t]` in degrees 0 and 1, the map being the
    /// adjunction unit for the closed stratum.
    pub fn e_plus(category: &Arc<PresentedCategory>, t: usize) -> Result<Self, HomotopyError> {
        let closed = category.closed.as_ref().ok_or(HomotopyError::NoClosedStratum)?;
        let label = || category.generators[t].label.clone();
        if t == closed.generator {
            return Err(HomotopyError::ClosedGenerator(label()));
        }
        let comps = closed.units.get(&t).ok_or(HomotopyError::NoClosedStratum)?;
        let tgt: GradedObject = comps
            .iter()
            .map(|(shift, _)| Summand {
                gen: closed.generator,
                shift: *shift,
            })
            .collect();
        let d = comps.iter().map(|(_, v)| vec![v.clone()]).collect();
        Self::two_term(category.clone(), 0, vec![Summand { gen: t, shift: 0 }], tgt, d)
    }
}

impl fmt::Display for ComplexObj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(i, t)| {
                let t: Vec<String> = t
                    .iter()
                    .map(|s| format!("E_{}{{{}}}", self.category.generators[s.gen].label, s.shift))
                    .collect();
                format!("[{i}] {}", t.join(" + "))
            })
            .collect();
        write!(f, "{}", parts.join(" -> "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct HomBasis {
    degree: i64,
    src: usize,
    tgt: usize,
    index: usize,
}

/// A Hom complex with explicit bases and differentials.
#[derive(Debug, Clone)]
pub struct HomComplex {
    bases: BTreeMap<i64, Vec<HomBasis>>,
    /// `differentials[k]` lists the images of the basis of degree `k`.
    differentials: BTreeMap<i64, Vec<Vec<Scalar>>>,
}

impl HomComplex {
    pub fn dim(&self, k: i64) -> usize {
        self.bases.get(&k).map_or(0, Vec::len)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.bases.keys().copied()
    }

    fn rank(&self, k: i64) -> usize {
        self.differentials.get(&k).map_or(0, |cols| rank(cols.clone()))
    }

    pub fn cohomology_dim(&self, k: i64) -> usize {
        self.dim(k) - self.rank(k) - self.rank(k - 1)
    }

    pub fn is_complex(&self) -> bool {
        self.differentials.iter().all(|(k, cols)| {
            let Some(next) = self.differentials.get(&(k + 1)) else {
                return true;
            };
            cols.iter().all(|col| {
                let mut img = vec![Scalar::zero(); self.dim(k + 2)];
                for (j, c) in col.iter().enumerate() {
                    add_scaled(&mut img, &next[j], c);
                }
                is_zero_vec(&img)
            })
        })
    }
}

/// Rank of a list of vectors over `Q`.
fn rank(mut rows: Vec<Vec<Scalar>>) -> usize {
    let mut r = 0;
    let width = rows.first().map_or(0, Vec::len);
    for col in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][col].clone();
        for i in (r + 1)..rows.len() {
            if rows[i][col].is_zero() {
                continue;
            }
            let factor = &rows[i][col] / &pivot;
            let (top, bottom) = rows.split_at_mut(i);
            for (a, b) in bottom[0].iter_mut().zip(&top[r]) {
                *a -= &factor * b;
            }
        }
        r += 1;
    }
    r
}
