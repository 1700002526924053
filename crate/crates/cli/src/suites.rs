use mixflag::coxeter::WeylElement;
use mixflag::hecke::HeckeElement;
use mixflag::homotopy::{ComplexObj, PresentedCategory, Scalar, Summand};
use mixflag::mixclass::{MixError, MixedContext};
use mixflag::ring::LaurentPoly;
use serde::Serialize;

use crate::Format;

#[derive(Serialize)]
pub struct CheckResult {
    name: String,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

#[derive(Serialize)]
pub struct Report {
    suite: &'static str,
    #[serde(rename = "type")]
    cartan_type: String,
    characteristic: u64,
    pass: bool,
    checks: Vec<CheckResult>,
}

impl Report {
    fn new(suite: &'static str, ctx: &MixedContext) -> Self {
        Self {
            suite,
            cartan_type: ctx.system().cartan_type().to_string(),
            characteristic: ctx.characteristic(),
            pass: true,
            checks: Vec::new(),
        }
    }

    fn record(&mut self, name: impl Into<String>, outcome: Result<(), String>) {
        let pass = outcome.is_ok();
        self.pass &= pass;
        self.checks.push(CheckResult {
            name: name.into(),
            pass,
            detail: outcome.err(),
        });
    }

    pub fn passed(&self) -> bool {
        self.pass
    }

    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            Format::Csv => {
                let mut out = csv::Writer::from_writer(Vec::new());
                out.write_record(["check", "pass", "detail"])?;
                for c in &self.checks {
                    out.write_record([
                        c.name.as_str(),
                        if c.pass { "true" } else { "false" },
                        c.detail.as_deref().unwrap_or(""),
                    ])?;
                }
                Ok(String::from_utf8(out.into_inner()?)?)
            }
        }
    }
}

fn all<T>(
    items: &[T],
    mut f: impl FnMut(&T) -> Result<bool, MixError>,
    describe: impl Fn(&T) -> String,
) -> Result<(), String> {
    for item in items {
        match f(item) {
            Ok(true) => {}
            Ok(false) => return Err(describe(item)),
            Err(e) => return Err(format!("{}: {e}", describe(item))),
        }
    }
    Ok(())
}

/// K-theoretic identities, exhaustively over the Weyl group.
pub fn identities(ctx: &MixedContext) -> Report {
    let mut report = Report::new("identities", ctx);
    let sys = ctx.system().clone();
    let h = ctx.hecke().clone();
    let dual = ctx.dual();
    let els = sys.elements();
    let w0 = sys.longest();
    let pairs: Vec<(WeylElement, WeylElement)> = els
        .iter()
        .flat_map(|x| els.iter().map(move |y| (x.clone(), y.clone())))
        .collect();

    report.record(
        "convolution: std(y) * std(w) = std(yw) when lengths add",
        all(
            &pairs,
            |(y, w)| {
                let yw = sys.mul(y, w);
                if yw.length() != y.length() + w.length() {
                    return Ok(true);
                }
                let prod = ctx.convolve(&ctx.std_class(y), &ctx.std_class(w))?;
                Ok(prod == ctx.std_class(&yw))
            },
            |(y, w)| format!("y = {y}, w = {w}"),
        ),
    );
    report.record(
        "convolution: std(w) * costd(w^-1) = std(e)",
        all(
            els,
            |w| {
                Ok(ctx
                    .convolve(&ctx.std_class(w), &ctx.costd_class(&sys.inverse(w)))?
                    .hecke()
                    == &h.one())
            },
            |w| format!("w = {w}"),
        ),
    );
    report.record(
        "orthogonality: <std(x), costd(y)> = delta(x, y)",
        all(
            &pairs,
            |(x, y)| {
                let p = h.euler_pairing(ctx.std_class(x).hecke(), ctx.costd_class(y).hecke())?;
                Ok(p == if x == y {
                    LaurentPoly::one()
                } else {
                    LaurentPoly::zero()
                })
            },
            |(x, y)| format!("x = {x}, y = {y}"),
        ),
    );
    report.record(
        "verdier: parity classes are bar-invariant",
        all(
            els,
            |w| Ok(h.is_bar_invariant(ctx.parity_class(w)?.hecke())),
            |w| format!("w = {w}"),
        ),
    );
    report.record(
        "ringel: ringel(costd(w)) = std(w w0)",
        all(
            els,
            |w| Ok(ctx.ringel(&ctx.costd_class(w))? == ctx.std_class(&sys.mul(w, &w0))),
            |w| format!("w = {w}"),
        ),
    );
    report.record(
        "ringel: ringel_inv(ringel(parity(w))) = parity(w)",
        all(
            els,
            |w| {
                let p = ctx.parity_class(w)?;
                Ok(ctx.ringel_inv(&ctx.ringel(&p)?)? == p)
            },
            |w| format!("w = {w}"),
        ),
    );
    report.record(
        "kappa: kappa(std(w)) = dual std(w^-1)",
        all(
            els,
            |w| Ok(ctx.kappa(&ctx.std_class(w))? == dual.std_class(&sys.inverse(w))),
            |w| format!("w = {w}"),
        ),
    );
    report.record(
        "kappa: kappa(parity(w)) = dual tilting(w^-1)",
        all(
            els,
            |w| Ok(ctx.kappa(&ctx.parity_class(w)?)? == dual.tilting_class(&sys.inverse(w))?),
            |w| format!("w = {w}"),
        ),
    );
    report.record(
        "kappa: kappa_dual(kappa(c)) = c",
        all(
            els,
            |w| {
                let p = ctx.parity_class(w)?;
                let t = ctx.tilting_class(w)?;
                Ok(dual.kappa(&ctx.kappa(&p)?)? == p && dual.kappa(&ctx.kappa(&t)?)? == t)
            },
            |w| format!("w = {w}"),
        ),
    );
    report.record(
        "tilting: coefficient of H_y in T_w has exponents of parity l(w) - l(y)",
        all(
            els,
            |w| {
                let t = ctx.tilting_class(w)?;
                let ok = t.hecke().terms().all(|(y, p)| {
                    let parity = ((w.length() + y.length()) % 2) as i64;
                    p.terms().all(|(n, _)| n.rem_euclid(2) == parity)
                });
                Ok(ok)
            },
            |w| format!("w = {w}"),
        ),
    );
    report.record(
        "reciprocity: simple classes solve the BGG system",
        all(els, |w| ctx.simple_class(w).map(|_| true), |w| format!("w = {w}")),
    );
    if ctx.characteristic() == 0 {
        report.record(
            "characteristic 0: simple(w) = parity(w)",
            all(
                els,
                |w| Ok(ctx.simple_class(w)? == ctx.parity_class(w)?),
                |w| format!("w = {w}"),
            ),
        );
    }
    report
}

/// Parity-perversity criterion for every `w`, with certificates.
pub fn perversity(ctx: &MixedContext) -> Report {
    let mut report = Report::new("perversity", ctx);
    for w in ctx.system().elements() {
        let outcome = match ctx.is_parity_perverse(w) {
            Ok(r) if r.perverse => Ok(()),
            Ok(r) => {
                let cert: Vec<String> = r
                    .violations
                    .iter()
                    .map(|(u, n, m)| format!("(T : costd({u})<{n}>) = {m}"))
                    .collect();
                Err(cert.join("; "))
            }
            Err(e) => Err(e.to_string()),
        };
        report.record(format!("parity({}) is perverse", w.label()), outcome);
    }
    report
}

/// The SL2 oracle: P^1 with its point stratum.
pub fn calibration() -> Report {
    let ctx = MixedContext::characteristic_zero("A1".parse().expect("A1"));
    let mut report = Report::new("calibration", &ctx);
    let e = WeylElement::identity();
    let s = ctx.system().generator(0);
    let poly = |terms: &[(i64, i64)]| LaurentPoly::from_terms(terms.iter().copied());
    let expect = |got: Result<LaurentPoly, MixError>, want: LaurentPoly| match got {
        Ok(p) if p == want => Ok(()),
        Ok(p) => Err(format!("got {p}, expected {want}")),
        Err(e) => Err(e.to_string()),
    };

    let parity = HeckeElement::from_terms([(s.clone(), LaurentPoly::one()), (e.clone(), poly(&[(-1, -1)]))]);
    report.record(
        "parity(s) = H_s - v^-1 H_e",
        match ctx.parity_class(&s) {
            Ok(c) if c.hecke() == &parity => Ok(()),
            Ok(c) => Err(format!("got {:?}", c.hecke())),
            Err(e) => Err(e.to_string()),
        },
    );
    report.record(
        "hom_hilbert(s, s) = 1 + t^2",
        expect(ctx.hom_hilbert(&s, &s), poly(&[(0, 1), (2, 1)])),
    );
    report.record(
        "hom_hilbert(e, s) = t",
        expect(ctx.hom_hilbert(&e, &s), poly(&[(1, 1)])),
    );
    report.record(
        "ext_algebra_hilbert({e, s}) = 2 + 2t + t^2",
        expect(
            ctx.ext_algebra_hilbert(&[e.clone(), s.clone()]).map(|x| x.total),
            poly(&[(0, 2), (1, 2), (2, 1)]),
        ),
    );

    let cat = PresentedCategory::sl2();
    let (ge, gs) = (cat.generator("e").expect("e"), cat.generator("s").expect("s"));
    let one = || vec![vec![vec![Scalar::from_integer(1.into())]]];
    let delta = ComplexObj::two_term(
        cat.clone(),
        0,
        vec![Summand { gen: gs, shift: 0 }],
        vec![Summand { gen: ge, shift: 1 }],
        one(),
    )
    .expect("standard object");
    let nabla = ComplexObj::two_term(
        cat.clone(),
        -1,
        vec![Summand { gen: ge, shift: -1 }],
        vec![Summand { gen: gs, shift: 0 }],
        one(),
    )
    .expect("costandard object");
    let mut hom = Ok(());
    'outer: for n in -3..=3 {
        for i in -3..=3 {
            match delta.tate_hom_dim(&nabla, n, i) {
                Ok(d) if d == usize::from(n == 0 && i == 0) => {}
                Ok(d) => {
                    hom = Err(format!("dim Hom(std(s), costd(s)<{n}>[{i}]) = {d}"));
                    break 'outer;
                }
                Err(e) => {
                    hom = Err(e.to_string());
                    break 'outer;
                }
            }
        }
    }
    report.record("homotopy: Hom(std(s), costd(s)<n>[i]) = [n = i = 0]", hom);
    report.record(
        "homotopy: ch(std(s) complex) = H_s",
        match delta.ch(&ctx) {
            Ok(c) if c == ctx.std_class(&s) => Ok(()),
            Ok(c) => Err(format!("got {:?}", c.hecke())),
            Err(e) => Err(e.to_string()),
        },
    );
    let mut matches = Ok(());
    for (lx, x) in [("e", &e), ("s", &s)] {
        for (ly, y) in [("e", &e), ("s", &s)] {
            let series = ctx.hom_hilbert(x, y).unwrap_or_else(|_| LaurentPoly::zero());
            let a = ComplexObj::generator(cat.clone(), cat.generator(lx).expect("label"));
            let b = ComplexObj::generator(cat.clone(), cat.generator(ly).expect("label"));
            for m in 0..=2 {
                let dim = a.hom_dim(&b, m, 0).map_err(|e| e.to_string());
                if dim.as_ref().map(|&d| series.coeff(m) != d.into()).unwrap_or(true) {
                    matches = Err(format!("Hom(E_{lx}, E_{ly}{{{m}}}) = {dim:?}, series {series}"));
                }
            }
        }
    }
    report.record("homotopy: parity Hom dimensions match hom_hilbert", matches);
    report
}
