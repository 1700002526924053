use mixflag::mixclass::{MixedContext, ObjectClass};
use serde_json::json;

use crate::{Format, TableKind};

fn kind_name(kind: TableKind) -> &'static str {
    match kind {
        TableKind::Tilting => "tilting",
        TableKind::Projective => "projective",
        TableKind::Simple => "simple",
        TableKind::Parity => "parity",
    }
}

/// One row per `w`, in length-then-ShortLex order.
pub fn table(ctx: &MixedContext, kind: TableKind, format: Format) -> anyhow::Result<String> {
    let els = ctx.system().elements();
    let rows: Vec<ObjectClass> = els
        .iter()
        .map(|w| match kind {
            TableKind::Tilting => ctx.tilting_class(w),
            TableKind::Projective => ctx.projective_class(w),
            TableKind::Simple => ctx.simple_class(w),
            TableKind::Parity => ctx.parity_class(w),
        })
        .collect::<Result<_, _>>()?;
    match format {
        Format::Json => {
            let rows: Vec<_> = els
                .iter()
                .zip(&rows)
                .map(|(w, c)| json!({"w": w.label(), "class": c.to_json()}))
                .collect();
            let doc = json!({
                "type": ctx.system().cartan_type().to_string(),
                "characteristic": ctx.characteristic(),
                "kind": kind_name(kind),
                "rows": rows,
            });
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
        Format::Csv => {
            let mut out = csv::Writer::from_writer(Vec::new());
            out.write_record(std::iter::once("w".to_string()).chain(els.iter().map(|y| y.label())))?;
            for (w, c) in els.iter().zip(&rows) {
                let cells = els.iter().map(|y| c.coeff(y).to_csv_cell());
                out.write_record(std::iter::once(w.label()).chain(cells))?;
            }
            Ok(String::from_utf8(out.into_inner()?)?)
        }
    }
}

/// `Hom^•(E_x, E_y)` for all pairs, plus the total for `E = ⊕ E_w`.
pub fn hilbert(ctx: &MixedContext, format: Format) -> anyhow::Result<String> {
    let els = ctx.system().elements();
    let mut rows = Vec::new();
    for x in els {
        for y in els {
            rows.push((x.label(), y.label(), ctx.hom_hilbert(x, y)?));
        }
    }
    let total = ctx.ext_algebra_hilbert(els)?.total;
    match format {
        Format::Json => {
            let pairs: Vec<_> = rows
                .iter()
                .map(|(x, y, p)| json!({"x": x, "y": y, "series": p}))
                .collect();
            let doc = json!({
                "type": ctx.system().cartan_type().to_string(),
                "characteristic": ctx.characteristic(),
                "variable": "t",
                "pairs": pairs,
                "total": total,
            });
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
        Format::Csv => {
            let mut out = csv::Writer::from_writer(Vec::new());
            out.write_record(["x", "y", "series"])?;
            for (x, y, p) in &rows {
                out.write_record([x.as_str(), y.as_str(), &p.to_csv_cell().replace('v', "t")])?;
            }
            out.write_record(["total", "total", &total.to_csv_cell().replace('v', "t")])?;
            Ok(String::from_utf8(out.into_inner()?)?)
        }
    }
}
