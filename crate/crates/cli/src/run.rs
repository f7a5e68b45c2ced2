//! Command execution.  Every command returns its report as a string so the
//! output is identical between runs.

use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context};
use legsurg::algebra::{format_rational, parse_rational};
use legsurg::complexes::{
    build_cyclic_complex, build_ho_complex, build_hoplus_complex, build_module_mcyc, Bounds, HoComplexSpec,
};
use legsurg::dga::{enumerate_augmentations, linearize, Augmentation, Dga};
use legsurg::homology::GradedChainComplex;
use legsurg::io::{
    corpus, corpus_entry, emit_dga, parse_ainf, parse_augmentation, parse_counts, parse_dga, parse_filling,
    parse_morphism, read_document, DgaDocument, HomologyReport, Metadata, ValidationSummary,
};
use legsurg::lefschetz::{
    build_curved_category, dga_differences, dictionary_check, dualize_tensor_algebra, hochschild_complex,
    lefschetz_dga, LefschetzChordBasis, LefschetzError,
};
use legsurg::surgery::{
    build_lch_surgery, build_sh_surgery, build_shplus_surgery, builtin_ball_filling, FillingModel, SurgeryCountTable,
};
use serde_json::json;

use crate::{Cli, Command, ComplexKind, ExamplesAction, LefschetzEmit, Theory, Window};

pub enum Failure {
    /// A mathematical check failed; `output` is the report produced so far.
    Math { output: String, reason: String },
    Input(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

type Outcome = Result<String, Failure>;

fn load_dga(reference: &str, n: Option<i64>) -> anyhow::Result<DgaDocument> {
    let (text, _) = read_document(reference)?;
    parse_dga(&text, n).with_context(|| format!("in {reference}"))
}

fn bounds(w: &Window) -> Bounds {
    if w.allow_truncated {
        Bounds::truncated(w.min_deg, w.max_deg, w.max_len)
    } else {
        Bounds::new(w.min_deg, w.max_deg, w.max_len)
    }
}

fn require_complete(doc: &DgaDocument, reference: &str) -> anyhow::Result<()> {
    if doc.dga.is_partial() {
        bail!(
            "{reference} is a partial document (unknown differential for {}); it is excluded from homology computations",
            doc.dga.unknown_generators().join(", ")
        );
    }
    Ok(())
}

/// Report a complex, failing with exit code 1 when d^2 != 0.
fn report(cli: &Cli, title: &str, c: &GradedChainComplex, notes: &[String]) -> Outcome {
    if let Err(e) = c.check_d_squared() {
        return Err(Failure::Math { output: String::new(), reason: format!("{title}: {e}") });
    }
    let mut rep = HomologyReport::new(title, c)?;
    rep.notes = notes.to_vec();
    Ok(if cli.json { rep.to_json() + "\n" } else { rep.to_text() })
}

pub fn run(cli: &Cli) -> Outcome {
    let out = dispatch(cli);
    let truncating = matches!(&cli.command, Command::Homology { window, .. } | Command::Surgery { window, .. } if !window.allow_truncated);
    match out {
        Err(Failure::Input(e)) if truncating && format!("{e:#}").contains("not provably finite") => {
            Err(Failure::Input(e.context("rerun with --allow-truncated (and a --max-len bound) to accept a truncated complex")))
        }
        other => other,
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Validate { dga } => validate(cli, dga),
        Command::Homology { dga, complex, window, augmentation } => homology(cli, dga, *complex, window, augmentation.as_deref()),
        Command::Surgery { dga, filling, theory, window, counts } => surgery(cli, dga, filling, *theory, window, counts.as_deref()),
        Command::Augmentations { dga, values } => augmentations(cli, dga, values),
        Command::Morphism { file, check } => morphism(cli, file, *check),
        Command::Lefschetz { ainf, t_order, emit, min_deg, max_deg, max_len } => {
            lefschetz(cli, ainf, *t_order, *emit, Bounds::truncated(*min_deg, *max_deg, *max_len))
        }
        Command::Examples { action } => examples(cli, action),
    }
}

fn validate(cli: &Cli, reference: &str) -> Outcome {
    let doc = load_dga(reference, cli.dim)?;
    let rep = doc.dga.check_d_squared();
    let summary = ValidationSummary::new(&doc.dga, &rep);
    let out = if cli.json { serde_json::to_string_pretty(&summary)? + "\n" } else { summary.to_text() };
    if summary.passes {
        Ok(out)
    } else {
        Err(Failure::Math { output: out, reason: format!("{reference} is not a valid DGA") })
    }
}

fn homology(cli: &Cli, reference: &str, kind: ComplexKind, w: &Window, aug: Option<&str>) -> Outcome {
    let doc = load_dga(reference, cli.dim)?;
    require_complete(&doc, reference)?;
    let dga = &doc.dga;
    let b = bounds(w);
    let (title, c) = match kind {
        ComplexKind::Lin => {
            let eps = match aug {
                Some(path) => {
                    let (text, _) = read_document(path)?;
                    parse_augmentation(&text, dga).with_context(|| format!("in {path}"))?
                }
                None => Augmentation::trivial(dga),
            };
            let mut c = linearize(dga, &eps)?;
            c.window = (c.window.0.max(w.min_deg), c.window.1.min(w.max_deg));
            ("linearized homology", c)
        }
        ComplexKind::Cyc => ("LH^cyc", build_cyclic_complex(dga, &b)?),
        ComplexKind::Hoplus => ("LH^Ho+", build_hoplus_complex(dga, &b)?),
        ComplexKind::Ho => ("LH^Ho", build_ho_complex(&HoComplexSpec::new(dga.clone()), &b)?),
        ComplexKind::Mcyc => ("M^cyc", build_module_mcyc(dga, &b)?),
    };
    if aug.is_some() && kind != ComplexKind::Lin {
        return Err(anyhow!("--augmentation applies only to --complex lin").into());
    }
    report(cli, &format!("{title} of {reference}"), &c, &doc.metadata.notes)
}

fn load_filling(spec: &str, top: i64, n: Option<i64>) -> anyhow::Result<FillingModel> {
    if let Some(dim) = spec.strip_prefix("ball:") {
        let n: i64 = dim.parse().map_err(|_| anyhow!("`{spec}`: expected ball:<n>"))?;
        return Ok(builtin_ball_filling(n, top)?);
    }
    let (text, _) = read_document(spec)?;
    parse_filling(&text, n).with_context(|| format!("in {spec}"))
}

fn surgery(cli: &Cli, reference: &str, filling: &str, theory: Theory, w: &Window, counts: Option<&str>) -> Outcome {
    let ball_dim = filling.strip_prefix("ball:").and_then(|d| d.parse::<i64>().ok());
    let n = cli.dim.or(ball_dim);
    let f = load_filling(filling, w.max_deg + 2, n)?;
    let doc = load_dga(reference, n.or(Some(f.n)))?;
    require_complete(&doc, reference)?;
    if doc.dga.ambient_dim() != f.n {
        return Err(anyhow!("{reference} lives in dimension {} but the filling has n = {}", doc.dga.ambient_dim(), f.n).into());
    }
    let table = match counts {
        Some(path) => {
            let (text, _) = read_document(path)?;
            parse_counts(&text, &f, &doc.dga).with_context(|| format!("in {path}"))?
        }
        None => SurgeryCountTable::zero_localized(),
    };
    let b = bounds(w);
    let (title, c) = match theory {
        Theory::Ch => ("LCH surgery complex", build_lch_surgery(&f, &doc.dga, &table, &b)?),
        Theory::ShPlus => ("SLH+ surgery complex", build_shplus_surgery(&f, &doc.dga, &table, &b)?),
        Theory::Sh => ("SLH surgery complex", build_sh_surgery(&f, &HoComplexSpec::new(doc.dga.clone()), &table, &b)?),
    };
    let mut notes = f.notes.clone();
    notes.extend(table.notes.iter().cloned());
    report(cli, &format!("{title} of {reference} with filling {filling}"), &c, &notes)
}

fn augmentations(cli: &Cli, reference: &str, values: &[String]) -> Outcome {
    let doc = load_dga(reference, cli.dim)?;
    let dga: &Dga = &doc.dga;
    let set = values.iter().map(|v| parse_rational(v)).collect::<Result<Vec<_>, _>>()?;
    let found = enumerate_augmentations(dga, &set);
    let alpha = dga.alphabet();
    let free: Vec<String> = dga.augmentable_generators().iter().map(|&c| alpha.name(c).to_string()).collect();
    let rows: Vec<Vec<(String, String)>> = found
        .iter()
        .map(|a| {
            dga.augmentable_generators().iter().map(|&c| (alpha.name(c).to_string(), format_rational(&a.values[c as usize]))).collect()
        })
        .collect();
    if cli.json {
        let list: Vec<serde_json::Value> =
            rows.iter().map(|r| r.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<_, _>>().into()).collect();
        return Ok(serde_json::to_string_pretty(&json!({ "generators": free, "values": values, "augmentations": list }))? + "\n");
    }
    let mut out = format!("augmentable generators: {}\n", if free.is_empty() { "(none)".into() } else { free.join(", ") });
    if dga.is_partial() {
        let _ = writeln!(out, "PARTIAL: only the known relations were imposed");
    }
    let _ = writeln!(out, "{} augmentation(s) with values in {{{}}}", rows.len(), values.join(", "));
    for r in rows {
        let _ = writeln!(out, "  {}", r.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" "));
    }
    Ok(out)
}

fn morphism(cli: &Cli, reference: &str, check: bool) -> Outcome {
    let (text, base) = read_document(reference)?;
    let f = parse_morphism(&text, base.as_deref(), cli.dim).with_context(|| format!("in {reference}"))?;
    f.check_gradings()?;
    let (sa, ta) = (f.source.alphabet(), f.target.alphabet());
    let mut out = String::new();
    for (c, img) in f.assignment.iter().enumerate() {
        let _ = writeln!(out, "f({}) = {}", sa.name(c as u32), ta.display(img));
    }
    if !check {
        return Ok(out);
    }
    let rep = f.check();
    if cli.json {
        let ce = rep.counterexample.as_ref().map(|(c, l, r)| json!({ "generator": c, "f(d c)": ta.display(l), "d f(c)": ta.display(r) }));
        out = serde_json::to_string_pretty(&json!({ "chain_map": rep.is_chain_map, "counterexample": ce, "skipped": rep.skipped }))? + "\n";
    } else {
        if !rep.skipped.is_empty() {
            let _ = writeln!(out, "not checked (unknown data): {}", rep.skipped.join(", "));
        }
        match &rep.counterexample {
            None => {
                let _ = writeln!(out, "chain map: yes");
            }
            Some((c, l, r)) => {
                let _ = writeln!(out, "chain map: NO at {c}: f(d {c}) = {} but d f({c}) = {}", ta.display(l), ta.display(r));
            }
        }
    }
    if rep.is_chain_map {
        Ok(out)
    } else {
        Err(Failure::Math { output: out, reason: "not a chain map".into() })
    }
}

fn lefschetz(cli: &Cli, reference: &str, order: usize, emit: LefschetzEmit, b: Bounds) -> Outcome {
    let (text, _) = read_document(reference)?;
    let spec = parse_ainf(&text, cli.dim).with_context(|| format!("in {reference}"))?;
    let d = match build_curved_category(&spec, order) {
        Ok(d) => d,
        Err(e @ LefschetzError::Relations { .. }) => return Err(Failure::Math { output: String::new(), reason: e.to_string() }),
        Err(e) => return Err(e.into()),
    };
    match emit {
        LefschetzEmit::Dga => {
            let basis = LefschetzChordBasis::new(&spec, order)?;
            let ours = lefschetz_dga(&basis, &spec.constants)?;
            let dual = dualize_tensor_algebra(&d)?;
            let diffs = dga_differences(&ours, &dual);
            let doc = DgaDocument {
                dga: ours.clone(),
                metadata: Metadata {
                    notes: vec![format!("Lefschetz algebra of {reference}, n = {}, truncated at T^{order}", spec.n)],
                    sign_provenance: None,
                },
            };
            let out = emit_dga(&doc);
            let rep = ours.check_d_squared();
            if !rep.passes() {
                return Err(Failure::Math { output: out, reason: format!("d^2 != 0 on {} generator(s)", rep.d_squared.len()) });
            }
            if !diffs.is_empty() {
                return Err(Failure::Math { output: out, reason: format!("differs from the dual of D: {}", diffs.join("; ")) });
            }
            Ok(out)
        }
        LefschetzEmit::Hochschild => {
            let c = hochschild_complex(&d, &b)?;
            report(cli, &format!("Hochschild complex of {reference} (t-order {order}, degrees negated)"), &c, &[])
        }
        LefschetzEmit::DictionaryCheck => {
            let rep = dictionary_check(&d, &b)?;
            let out = if cli.json {
                serde_json::to_string_pretty(&json!({ "holds": rep.holds(), "compared_entries": rep.compared_entries, "mismatches": rep.mismatches }))? + "\n"
            } else {
                let mut s = format!("compared entries: {}\n", rep.compared_entries);
                for m in &rep.mismatches {
                    let _ = writeln!(s, "mismatch: {m}");
                }
                let _ = writeln!(s, "dictionary: {}", if rep.holds() { "holds" } else { "FAILS" });
                s
            };
            if rep.holds() {
                Ok(out)
            } else {
                Err(Failure::Math { output: out, reason: "dictionary mismatch".into() })
            }
        }
    }
}

fn examples(cli: &Cli, action: &ExamplesAction) -> Outcome {
    match action {
        ExamplesAction::List => {
            let entries = corpus();
            if cli.json {
                let list: Vec<_> = entries
                    .iter()
                    .map(|e| json!({ "name": e.name, "kind": e.kind, "file": e.file, "parametric": e.parametric, "description": e.description }))
                    .collect();
                return Ok(serde_json::to_string_pretty(&list)? + "\n");
            }
            let width = entries.iter().map(|e| e.name.len()).max().unwrap_or(0);
            let mut out = String::new();
            for e in entries {
                let _ = writeln!(out, "{:<width$}  {:<12}  {}", e.name, e.kind.to_string(), e.description);
            }
            Ok(out)
        }
        ExamplesAction::Emit { name } => Ok(corpus_entry(name)?.text.to_string()),
    }
}
