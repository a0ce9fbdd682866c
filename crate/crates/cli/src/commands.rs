use serde_json::{json, Value};

use thinset::bw::{self, BitString, TreeFamily};
use thinset::constructions::{self, gallery, GALLERY};
use thinset::convergence::{convergence_report, CatalogSequence, Mode, SequenceDef};
use thinset::density::{self, doubling_checkpoints, exact_density};
use thinset::rational::format_rational;
use thinset::thinness::{
    classify, classify_all, greedy_block_decomposition, BlockDecomposition, ClassifierConfig,
    ThinClass, Verdict,
};
use thinset::{parse_set_expr, Error, Rational, Result, SetExpr};

use crate::record;
use crate::report::{Record, Report};
use crate::{BwCommand, Command, GalleryCommand, SetHorizon};

/// Gallery names first, then the expression grammar.
fn resolve(text: &str) -> Result<SetExpr> {
    let text = text.trim();
    if GALLERY.iter().any(|(name, _)| *name == text) {
        return gallery(text);
    }
    parse_set_expr(text)
}

fn pq(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

fn pqs(qs: &[Rational]) -> Value {
    Value::Array(qs.iter().map(pq).collect())
}

fn verdict_record(set: &str, v: &Verdict) -> Record {
    let diagnostics: serde_json::Map<String, Value> = v
        .evidence
        .diagnostics
        .iter()
        .map(|d| (d.name.clone(), pqs(&d.values)))
        .collect();
    record! {
        "set" => set,
        "class" => v.class.name(),
        "status" => v.status.to_string(),
        "horizon" => v.horizon,
        "certificate" => v.evidence.certificate,
        "empirical_status" => v.evidence.empirical_status.to_string(),
        "diagnostics" => diagnostics,
    }
}

fn block_records(report: &mut Report, d: &BlockDecomposition) {
    report.summary("blocks", d.len());
    report.summary("block_size_max", d.block_size_max);
    for (i, b) in d.blocks.iter().enumerate() {
        report.push(record! {
            "block" => i + 1,
            "min" => b[0],
            "max" => b[b.len() - 1],
            "size" => b.len(),
            "gap_after" => d.inter_block_gaps.get(i),
            "elements" => b,
        });
    }
}

fn bits(text: &str) -> Result<BitString> {
    text.parse()
}

fn family(constant: Option<&str>) -> Result<TreeFamily> {
    Ok(match constant {
        Some(e) => TreeFamily::Constant(resolve(e)?),
        None => TreeFamily::Dyadic,
    })
}

pub fn run(command: Command, echo: String) -> Result<Report> {
    let mut report = Report::new(echo);
    match command {
        Command::Classify(a) => {
            let SetHorizon { set, horizon } = &a.base;
            let expr = resolve(set)?;
            let mut cfg = ClassifierConfig::default();
            if !a.m_grid.is_empty() {
                cfg.m_grid = a.m_grid.clone();
            }
            let label = expr.to_string();
            if a.all || a.class.is_empty() {
                for v in classify_all(&expr, *horizon, &cfg)?.values() {
                    report.push(verdict_record(&label, v));
                }
            } else {
                for c in &a.class {
                    let class: ThinClass = c.parse()?;
                    report.push(verdict_record(
                        &label,
                        &classify(&expr, class, *horizon, &cfg)?,
                    ));
                }
            }
        }
        Command::Density(a) => {
            let expr = resolve(&a.base.set)?;
            let prefix = expr.enumerate_upto(a.base.horizon)?;
            let cps = if a.checkpoints.is_empty() {
                doubling_checkpoints(a.base.horizon)
            } else {
                a.checkpoints
            };
            let p = density::density_profile_with_tail(&prefix, &cps, &a.tail)?;
            report.summary("set", expr.to_string());
            report.summary("horizon", a.base.horizon);
            report.summary("liminf_estimate", pq(&p.running_liminf_estimate));
            report.summary("limsup_estimate", pq(&p.running_limsup_estimate));
            report.summary("exact_density", exact_density(&expr).as_ref().map(pq));
            for (i, (n, r)) in p.checkpoints.iter().zip(&p.ratios).enumerate() {
                report.push(record! {
                    "n" => n,
                    "count" => prefix.count_upto(*n)?,
                    "ratio" => pq(r),
                    "tail" => i >= p.tail_start,
                });
            }
        }
        Command::Udensity(a) => {
            let expr = resolve(&a.base.set)?;
            let prefix = expr.enumerate_upto(a.base.horizon)?;
            let p = density::uniform_density_profile(&prefix, &a.k, a.burn_in)?;
            report.summary("set", expr.to_string());
            report.summary("horizon", p.horizon);
            report.summary("burn_in", p.burn_in);
            report.summary("sup_nonincreasing", p.sup_nonincreasing);
            for r in &p.rows {
                report.push(record! {
                    "k" => r.k,
                    "sup_count" => r.sup_count,
                    "inf_count" => r.inf_count,
                    "sup_window_avg" => pq(&r.sup_window_avg),
                    "inf_window_avg" => pq(&r.inf_window_avg),
                });
            }
        }
        Command::Decompose(a) => {
            let prefix = resolve(&a.base.set)?.enumerate_upto(a.base.horizon)?;
            let d = greedy_block_decomposition(&prefix, a.m)?;
            report.summary("threshold", a.m);
            block_records(&mut report, &d);
        }
        Command::Merge(a) => {
            let t = resolve(&a.t)?.enumerate_upto(a.horizon)?;
            let s = resolve(&a.s)?;
            let d = match a.lemma.as_str() {
                "1" | "lemma-1" => {
                    report.summary("bound", 3);
                    constructions::merge_super_thin(&s.enumerate_upto(a.horizon)?, &t, a.horizon)?
                }
                _ => {
                    let sd = constructions::natural_decomposition(&s, a.horizon, a.m)?;
                    report.summary("bound", 2 * sd.block_size_max + 1);
                    constructions::merge_very_thin_super_thin(&sd, &t, a.horizon)?
                }
            };
            block_records(&mut report, &d);
        }
        Command::Split(a) => {
            let expr = resolve(&a.base.set)?;
            let d = constructions::natural_decomposition(&expr, a.base.horizon, a.m)?;
            let parts = constructions::split_into_super_thin(&d)?;
            report.summary("block_size_max", d.block_size_max);
            for (i, p) in parts.iter().enumerate() {
                let min_gap = p.elements().windows(2).map(|w| w[1] - w[0]).min();
                report.push(record! {
                    "part" => i + 1,
                    "size" => p.len(),
                    "min_gap" => min_gap,
                    "elements" => p.elements(),
                });
            }
        }
        Command::Cover(a) => {
            let s = resolve(&a.set)?.enumerate_upto(a.horizon)?;
            let cover = constructions::thin_intersection_cover(&s, a.horizon)?;
            report.summary("a_size", cover.a.len());
            report.summary("b_size", cover.b.len());
            report.summary("intersection_is_s", cover.a.intersection(&cover.b) == s);
            for st in &cover.stages {
                report.push(record! {
                    "k" => st.k,
                    "index" => st.index,
                    "t" => st.t,
                    "next" => st.next,
                    "a_block" => st.a_block,
                    "b_block" => st.b_block,
                });
            }
        }
        Command::Converge(a) => {
            let seq = if let Some(name) = &a.seq {
                SequenceDef::Catalog(name.parse::<CatalogSequence>()?)
            } else if let Some(e) = &a.indicator {
                SequenceDef::IndicatorTwoValue {
                    exceptions: resolve(e)?,
                    on: a.on.clone(),
                    off: a.off.clone(),
                }
            } else if !a.table.is_empty() {
                SequenceDef::Table(a.table.clone())
            } else {
                return Err(Error::Sequence(
                    "give one of --seq, --indicator or --table".into(),
                ));
            };
            let modes: Vec<Mode> = if a.modes.is_empty() {
                Mode::ALL.to_vec()
            } else {
                a.modes.iter().map(|m| m.parse()).collect::<Result<_>>()?
            };
            report.summary("sequence", seq.to_string());
            report.summary("limit", pq(&a.limit));
            let reports = convergence_report(
                &seq,
                &a.limit,
                &a.eps,
                a.horizon,
                &modes,
                &ClassifierConfig::default(),
            )?;
            for r in &reports {
                for m in &r.mode_conclusions {
                    report.push(record! {
                        "epsilon" => pq(&r.epsilon),
                        "mode" => m.mode.name(),
                        "class" => m.class.name(),
                        "status" => m.status.to_string(),
                        "convergent" => m.convergent,
                        "horizon" => r.horizon,
                        "exceedance_count" => r.exceedance_count,
                        "exceedance_set" => r.exceedance_expr,
                    });
                }
            }
        }
        Command::Gallery {
            action: GalleryCommand::List,
        } => {
            for (name, description) in GALLERY {
                report.push(record! {
                    "name" => name,
                    "expr" => gallery(name)?.to_string(),
                    "description" => description,
                });
            }
        }
        Command::Bw { action } => bw_command(&mut report, action)?,
    }
    Ok(report)
}

fn bw_command(report: &mut Report, action: BwCommand) -> Result<()> {
    match action {
        BwCommand::Verify {
            depth,
            horizon,
            constant,
        } => {
            let r = bw::verify_tree_conditions(&family(constant.as_deref())?, depth, horizon)?;
            report.summary("depth", r.depth);
            report.summary("horizon", r.horizon);
            report.summary("nodes_checked", r.nodes_checked);
            report.summary("passed", r.passed());
            for v in &r.violations {
                report.push(record! {
                    "condition" => json!(v.condition),
                    "node" => v.node.to_string(),
                    "witness" => v.witness,
                });
            }
        }
        BwCommand::Branch { x } => {
            for link in bw::branch_chain(&bits(&x)?)? {
                report.push(record! {
                    "j" => link.node.len(),
                    "node" => link.node.to_string(),
                    "set" => link.set.to_string(),
                    "difference" => link.difference.to_string(),
                });
            }
        }
        BwCommand::Ar {
            x,
            indices,
            horizon,
        } => {
            let ar = bw::build_ar_set(&bits(&x)?, &indices, horizon)?;
            let d = bw::super_thin_diagnostic(&ar);
            report.summary("size", ar.len());
            report.summary("elements", ar.elements());
            report.summary("min_gap_nondecreasing", d.min_gap_nondecreasing);
            report.summary("density_halving", d.density_halving);
            for ((c, r), g) in d
                .checkpoints
                .iter()
                .zip(&d.density_ratios)
                .zip(&d.window_min_gaps)
            {
                report.push(record! {"n" => c, "ratio" => pq(r), "window_min_gap" => g});
            }
        }
        BwCommand::Case1 {
            x,
            m,
            horizon,
            constant,
        } => {
            let d = bw::case1_witness(&family(constant.as_deref())?, &bits(&x)?, m, horizon)?;
            block_records(report, &d);
        }
    }
    Ok(())
}
