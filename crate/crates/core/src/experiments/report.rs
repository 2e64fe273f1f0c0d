use std::path::{Path, PathBuf};

use serde::Serialize;

use super::ablation::AblationRow;
use super::stats::pearson;
use super::svg::{color, scale, Svg};
use crate::error::{Error, Result};
use crate::inference::FitResult;
use crate::ingestion::write_atomic;
use crate::model::{Dataset, Equation, AXES};

/// Equations shown as panels of the coefficient figure, in panel order.
pub const ERRORBAR_PANELS: [Equation; 4] = [
    Equation::Sympathy,
    Equation::ShortParticipation,
    Equation::Interaction,
    Equation::Activation,
];

pub const HISTOGRAM_BINS: usize = 30;

fn csv_bytes<I, R>(header: &[&str], rows: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e| Error::Csv {
        path: PathBuf::from("<memory>"),
        source: e,
    };
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    w.into_inner().map_err(|e| Error::invalid("csv buffer", e.to_string()))
}

/// `coefficients.csv`: one row per parameter and fit.
pub fn coefficients_csv(fits: &[FitResult]) -> Result<Vec<u8>> {
    let rows = fits.iter().flat_map(|f| {
        f.parameters.iter().map(move |p| {
            vec![
                p.name.clone(),
                p.mean.to_string(),
                p.ci_low.to_string(),
                p.ci_high.to_string(),
                f.var_s.to_string(),
                p.equation.clone(),
                p.sd.to_string(),
                f.structure.label(),
            ]
        })
    });
    csv_bytes(&["name", "mean", "ci_low", "ci_high", "var_S", "equation", "sd", "model"], rows)
}

fn series_label(f: &FitResult, multi_structure: bool) -> String {
    if multi_structure {
        format!("{} var_S={}", f.structure.label(), f.var_s)
    } else {
        format!("var_S={}", f.var_s)
    }
}

/// Interval plot with one panel per equation and one series per fit.
pub fn errorbars_svg(fits: &[FitResult]) -> String {
    let multi = fits.iter().any(|f| f.structure != fits[0].structure);
    let panel_w = 420.0;
    let label_w = 190.0;
    let row_h = 18.0;
    let series_gap = (row_h - 4.0) / fits.len().max(1) as f64;

    let panels: Vec<(Equation, Vec<String>)> = ERRORBAR_PANELS
        .iter()
        .map(|&eq| {
            let mut names: Vec<String> = Vec::new();
            for f in fits {
                for p in f.parameters.iter().filter(|p| p.equation == eq.label()) {
                    if !names.contains(&p.name) {
                        names.push(p.name.clone());
                    }
                }
            }
            (eq, names)
        })
        .collect();
    let heights: Vec<f64> = panels.iter().map(|(_, n)| 50.0 + row_h * n.len().max(1) as f64).collect();
    let total_h = heights.iter().sum::<f64>() + 30.0 + 20.0 * fits.len() as f64;
    let mut svg = Svg::new(label_w + panel_w + 40.0, total_h);

    let mut y0 = 10.0;
    for ((eq, names), h) in panels.iter().zip(&heights) {
        svg.raw(&format!(r#"<g class="panel" data-equation="{}">"#, eq.label()));
        svg.text(10.0, y0 + 16.0, 14.0, "start", eq.label());
        let (mut lo, mut hi) = (0.0f64, 0.0f64);
        for f in fits {
            for p in f.parameters.iter().filter(|p| p.equation == eq.label()) {
                lo = lo.min(p.ci_low);
                hi = hi.max(p.ci_high);
            }
        }
        let x = scale(lo, hi, label_w, label_w + panel_w);
        let top = y0 + 30.0;
        let bottom = y0 + h - 20.0;
        svg.dashed(x(0.0), top, x(0.0), bottom);
        svg.line(label_w, bottom, label_w + panel_w, bottom, "#333", 1.0);
        svg.text(label_w, bottom + 14.0, 10.0, "middle", &format!("{lo:.2}"));
        svg.text(label_w + panel_w, bottom + 14.0, 10.0, "middle", &format!("{hi:.2}"));
        for (r, name) in names.iter().enumerate() {
            svg.text(label_w - 6.0, top + row_h * r as f64 + row_h / 2.0 + 4.0, 11.0, "end", name);
        }
        for (s, f) in fits.iter().enumerate() {
            svg.raw(&format!(
                r#"<g class="series" data-var-s="{}" data-model="{}">"#,
                f.var_s,
                f.structure.label()
            ));
            for p in f.parameters.iter().filter(|p| p.equation == eq.label()) {
                let r = names.iter().position(|n| *n == p.name).unwrap_or(0);
                let y = top + row_h * r as f64 + 2.0 + series_gap * (s as f64 + 0.5);
                svg.line(x(p.ci_low), y, x(p.ci_high), y, color(s), 1.5);
                svg.circle(x(p.mean), y, 2.5, color(s));
            }
            svg.raw("</g>");
        }
        svg.raw("</g>");
        y0 += h;
    }
    for (s, f) in fits.iter().enumerate() {
        let y = y0 + 10.0 + 20.0 * s as f64;
        svg.line(label_w, y, label_w + 20.0, y, color(s), 3.0);
        svg.text(label_w + 26.0, y + 4.0, 11.0, "start", &series_label(f, multi));
    }
    svg.finish()
}

/// Histogram of posterior sympathy means, split by activation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SympathyHistogram {
    pub model: String,
    pub var_s: f64,
    pub edges: Vec<f64>,
    pub activated: Vec<usize>,
    pub not_activated: Vec<usize>,
}

pub fn sympathy_histogram(fit: &FitResult, bins: usize) -> SympathyHistogram {
    let values: Vec<f64> = fit.latents.iter().map(|l| l.sympathy_mean).collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if !lo.is_finite() {
        (-1.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    };
    let width = (hi - lo) / bins as f64;
    let edges = (0..=bins).map(|i| lo + width * i as f64).collect();
    let mut activated = vec![0; bins];
    let mut not_activated = vec![0; bins];
    for l in &fit.latents {
        let b = (((l.sympathy_mean - lo) / width) as usize).min(bins - 1);
        if l.activated {
            activated[b] += 1;
        } else {
            not_activated[b] += 1;
        }
    }
    SympathyHistogram {
        model: fit.structure.label(),
        var_s: fit.var_s,
        edges,
        activated,
        not_activated,
    }
}

pub fn sympathy_csv(hists: &[SympathyHistogram]) -> Result<Vec<u8>> {
    let rows = hists.iter().flat_map(|h| {
        [(true, &h.activated), (false, &h.not_activated)].into_iter().flat_map(move |(a, counts)| {
            counts.iter().enumerate().map(move |(i, c)| {
                vec![
                    h.model.clone(),
                    h.var_s.to_string(),
                    u8::from(a).to_string(),
                    h.edges[i].to_string(),
                    h.edges[i + 1].to_string(),
                    c.to_string(),
                ]
            })
        })
    });
    csv_bytes(&["model", "var_S", "A", "bin_low", "bin_high", "count"], rows)
}

pub fn sympathy_svg(hists: &[SympathyHistogram]) -> String {
    let (pw, ph) = (360.0, 200.0);
    let mut svg = Svg::new(pw + 60.0, (ph + 50.0) * hists.len() as f64 + 40.0);
    for (i, h) in hists.iter().enumerate() {
        let y0 = 10.0 + (ph + 50.0) * i as f64;
        svg.raw(&format!(r#"<g class="panel" data-var-s="{}" data-model="{}">"#, h.var_s, h.model));
        svg.text(30.0, y0 + 14.0, 13.0, "start", &format!("{} var_S={}", h.model, h.var_s));
        let n1 = h.activated.iter().sum::<usize>().max(1) as f64;
        let n0 = h.not_activated.iter().sum::<usize>().max(1) as f64;
        let peak = h
            .activated
            .iter()
            .map(|&c| c as f64 / n1)
            .chain(h.not_activated.iter().map(|&c| c as f64 / n0))
            .fold(0.0, f64::max);
        let bottom = y0 + 20.0 + ph;
        let x = scale(h.edges[0], h.edges[h.edges.len() - 1], 30.0, 30.0 + pw);
        let y = scale(0.0, peak.max(1e-9), bottom, y0 + 24.0);
        for (counts, n, c) in [(&h.not_activated, n0, color(2)), (&h.activated, n1, color(1))] {
            for (b, &k) in counts.iter().enumerate() {
                let top = y(k as f64 / n);
                svg.rect(x(h.edges[b]), top, x(h.edges[b + 1]) - x(h.edges[b]), bottom - top, c, 0.5);
            }
        }
        svg.line(30.0, bottom, 30.0 + pw, bottom, "#333", 1.0);
        svg.text(30.0, bottom + 14.0, 10.0, "middle", &format!("{:.2}", h.edges[0]));
        svg.text(30.0 + pw, bottom + 14.0, 10.0, "middle", &format!("{:.2}", h.edges[h.edges.len() - 1]));
        svg.raw("</g>");
    }
    let ly = (ph + 50.0) * hists.len() as f64 + 20.0;
    svg.rect(30.0, ly - 8.0, 12.0, 10.0, color(1), 0.5);
    svg.text(46.0, ly, 11.0, "start", "A=1");
    svg.rect(90.0, ly - 8.0, 12.0, 10.0, color(2), 0.5);
    svg.text(106.0, ly, 11.0, "start", "A=0");
    svg.finish()
}

pub fn ablation_csv(rows: &[AblationRow]) -> Result<Vec<u8>> {
    let recs = rows.iter().map(|r| {
        vec![
            r.variant.clone(),
            r.var_s.to_string(),
            r.accuracy_mean.to_string(),
            r.accuracy_sd.to_string(),
            r.n_parameters.to_string(),
            r.elbo.to_string(),
        ]
    });
    csv_bytes(&["variant", "var_S", "accuracy_mean", "accuracy_sd", "n_parameters", "elbo"], recs)
}

/// Grouped bars of accuracy per variant, one bar per var(S), with ±sd
/// whiskers.
pub fn ablation_svg(rows: &[AblationRow]) -> String {
    let mut variants: Vec<&str> = Vec::new();
    let mut sweeps: Vec<f64> = Vec::new();
    for r in rows {
        if !variants.contains(&r.variant.as_str()) {
            variants.push(&r.variant);
        }
        if !sweeps.contains(&r.var_s) {
            sweeps.push(r.var_s);
        }
    }
    let group_w = 30.0 + 22.0 * sweeps.len() as f64;
    let (left, top, ph) = (50.0, 20.0, 240.0);
    let width = left + group_w * variants.len() as f64 + 20.0;
    let mut svg = Svg::new(width.max(260.0), top + ph + 70.0);
    let lo = rows.iter().map(|r| r.accuracy_mean - r.accuracy_sd).fold(0.5f64, f64::min).max(0.0);
    let hi = rows.iter().map(|r| r.accuracy_mean + r.accuracy_sd).fold(0.5f64, f64::max).min(1.0);
    let y = scale((lo - 0.02).max(0.0), (hi + 0.02).min(1.0), top + ph, top);
    let bottom = top + ph;
    svg.line(left, bottom, width - 10.0, bottom, "#333", 1.0);
    svg.line(left, top, left, bottom, "#333", 1.0);
    for t in [lo, (lo + hi) / 2.0, hi] {
        svg.text(left - 4.0, y(t) + 4.0, 10.0, "end", &format!("{t:.2}"));
    }
    for (v, name) in variants.iter().enumerate() {
        let gx = left + 15.0 + group_w * v as f64;
        svg.text(gx + 11.0 * sweeps.len() as f64, bottom + 14.0, 11.0, "middle", name);
        for r in rows.iter().filter(|r| r.variant == *name) {
            let s = sweeps.iter().position(|&x| x == r.var_s).unwrap_or(0);
            let x = gx + 22.0 * s as f64;
            svg.rect(x, y(r.accuracy_mean), 18.0, bottom - y(r.accuracy_mean), color(s), 0.8);
            let cx = x + 9.0;
            svg.line(cx, y(r.accuracy_mean - r.accuracy_sd), cx, y(r.accuracy_mean + r.accuracy_sd), "#222", 1.0);
        }
    }
    for (s, v) in sweeps.iter().enumerate() {
        let lx = left + 90.0 * s as f64;
        svg.rect(lx, bottom + 30.0, 12.0, 10.0, color(s), 0.8);
        svg.text(lx + 16.0, bottom + 39.0, 11.0, "start", &format!("var_S={v}"));
    }
    svg.finish()
}

/// Correlation of long-term engagement with each sociodemographic axis of
/// the subreddits a user frequents, and with the fitted latent position when
/// a fit with sociodemographics is given.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EngagementCorrelation {
    pub axis: String,
    pub participation_score: Option<f64>,
    pub latent: Option<f64>,
}

pub fn engagement_demographic_correlations(data: &Dataset, fit: Option<&FitResult>) -> Vec<EngagementCorrelation> {
    let e: Vec<f64> = data.users.iter().map(|u| u.e_long).collect();
    let scores = data.catalog.scores();
    let mean_scores: Vec<[f64; 4]> = data
        .users
        .iter()
        .map(|u| {
            let mut acc = [0.0; 4];
            let mut n = 0.0;
            for (k, _) in u.p_long.iter().enumerate().filter(|(_, &b)| b) {
                for j in 0..4 {
                    acc[j] += scores[k][j];
                }
                n += 1.0;
            }
            if n > 0.0 {
                acc.map(|a| a / n)
            } else {
                acc
            }
        })
        .collect();
    let latent = fit.filter(|f| f.latents.len() == data.n_users()).and_then(FitResult::standardized_demographics);
    AXES.iter()
        .enumerate()
        .map(|(j, axis)| {
            let col: Vec<f64> = mean_scores.iter().map(|r| r[j]).collect();
            EngagementCorrelation {
                axis: axis.to_string(),
                participation_score: pearson(&e, &col).ok(),
                latent: latent.as_ref().and_then(|d| {
                    let col: Vec<f64> = d.iter().map(|r| r[j]).collect();
                    pearson(&e, &col).ok()
                }),
            }
        })
        .collect()
}

pub fn engagement_csv(rows: &[EngagementCorrelation]) -> Result<Vec<u8>> {
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let recs = rows
        .iter()
        .map(|r| vec![r.axis.clone(), fmt(r.participation_score), fmt(r.latent)]);
    csv_bytes(&["axis", "corr_participation_score", "corr_latent"], recs)
}

/// Writes the coefficient table and figures for `fits`, plus the ablation
/// table and figure when `ablation` is given. Returns the written paths.
pub fn report(fits: &[FitResult], ablation: Option<&[AblationRow]>, out_dir: &Path) -> Result<Vec<PathBuf>> {
    if fits.is_empty() {
        return Err(Error::invalid("report", "need at least one fit result"));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: &str, bytes: &[u8]| -> Result<()> {
        let p = out_dir.join(name);
        write_atomic(&p, bytes)?;
        written.push(p);
        Ok(())
    };
    put("coefficients.csv", &coefficients_csv(fits)?)?;
    put("errorbars.svg", errorbars_svg(fits).as_bytes())?;
    let hists: Vec<SympathyHistogram> = fits
        .iter()
        .filter(|f| !f.latents.is_empty())
        .map(|f| sympathy_histogram(f, HISTOGRAM_BINS))
        .collect();
    put("sympathy_hist.csv", &sympathy_csv(&hists)?)?;
    put("sympathy_hist.svg", sympathy_svg(&hists).as_bytes())?;
    if let Some(rows) = ablation {
        put("ablation.csv", &ablation_csv(rows)?)?;
        put("ablation.svg", ablation_svg(rows).as_bytes())?;
    }
    Ok(written)
}
