//! SVG charts of sweep results: one file per predicted field, mean
//! normalized MSE (log scale) against high-fidelity composition share, one
//! polyline per budget with seed-spread error bars and a dashed line for
//! the full-high baseline. Each file embeds its plotted numbers in a
//! leading comment block so downstream tooling never has to scrape paths.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::scaling::{aggregate_runs, AggregateCell, Field, RunRecord};
use crate::sweep::{read_results, STATUS_BASELINE};

const W: f64 = 720.0;
const H: f64 = 480.0;
const ML: f64 = 72.0;
const MR: f64 = 24.0;
const MT: f64 = 42.0;
const MB: f64 = 56.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Renders both field charts into `out_dir` and returns the written paths
/// in field order (u, tau). Fails without writing anything when the rows
/// hold no completed cells.
pub fn emit_plots(records: &[RunRecord], out_dir: &Path) -> Result<Vec<PathBuf>> {
    let cells = aggregate_runs(records);
    if cells.is_empty() {
        return Err(Error::Contract(
            "no completed sweep cells to plot".into(),
        ));
    }
    let baseline = records.iter().find(|r| r.status == STATUS_BASELINE);
    let mut out = Vec::new();
    for field in Field::ALL {
        let baseline_value = baseline.map(|r| match field {
            Field::U => r.mse_u,
            Field::Tau => r.mse_tau,
        });
        let svg = render_field(&cells, field, baseline_value);
        let path = out_dir.join(format!("mse_{}.svg", field.tag()));
        fs::create_dir_all(out_dir)?;
        fs::write(&path, svg)?;
        out.push(path);
    }
    Ok(out)
}

pub fn emit_plots_from_file(results: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    emit_plots(&read_results(results)?, out_dir)
}

fn render_field(cells: &[AggregateCell], field: Field, baseline: Option<f64>) -> String {
    // log-scale range over means, bar ends, and the baseline
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut cover = |v: f64| {
        if v.is_finite() && v > 0.0 {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    };
    for c in cells {
        cover(c.mean(field));
        cover(c.mean(field) + c.std(field));
        cover(bar_floor(c.mean(field), c.std(field)));
    }
    if let Some(b) = baseline {
        cover(b);
    }
    if !lo.is_finite() {
        lo = 1e-6;
        hi = 1.0;
    }
    let (mut log_lo, mut log_hi) = (lo.log10(), hi.log10());
    if log_hi - log_lo < 0.5 {
        let mid = 0.5 * (log_lo + log_hi);
        log_lo = mid - 0.5;
        log_hi = mid + 0.5;
    } else {
        log_lo -= 0.08 * (log_hi - log_lo);
        log_hi += 0.08 * (log_hi - log_lo);
    }

    let x_px = |dc: f64| ML + dc * (W - ML - MR);
    let y_px = |v: f64| {
        let t = (v.max(1e-300).log10() - log_lo) / (log_hi - log_lo);
        MT + (1.0 - t) * (H - MT - MB)
    };

    let mut budgets: Vec<u64> = cells.iter().map(|c| c.budget_db.to_bits()).collect();
    budgets.sort_by(|a, b| f64::from_bits(*a).total_cmp(&f64::from_bits(*b)));
    budgets.dedup();

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n"
    ));

    // machine-readable copy of everything drawn
    s.push_str("<!-- data\nfield,budget_db,composition_dc,mean,std,n_seeds\n");
    for c in cells {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            field.tag(),
            c.budget_db,
            c.composition_dc,
            c.mean(field),
            c.std(field),
            c.n_seeds
        ));
    }
    if let Some(b) = baseline {
        s.push_str(&format!("baseline,{b}\n"));
    }
    s.push_str("-->\n");

    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"24\" font-size=\"15\">mean normalized MSE ({}) vs high-fidelity share</text>\n",
        ML,
        field.tag()
    ));

    // axes
    s.push_str(&format!(
        "<line x1=\"{ML:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#333\"/>\n",
        H - MB,
        W - MR,
        H - MB
    ));
    s.push_str(&format!(
        "<line x1=\"{ML:.2}\" y1=\"{MT:.2}\" x2=\"{ML:.2}\" y2=\"{:.2}\" stroke=\"#333\"/>\n",
        H - MB
    ));

    // x ticks every 25%
    for k in 0..=4 {
        let dc = k as f64 * 0.25;
        let x = x_px(dc);
        s.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#333\"/>\n",
            H - MB,
            H - MB + 5.0
        ));
        s.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}%</text>\n",
            H - MB + 20.0,
            (dc * 100.0) as i64
        ));
    }
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">high-fidelity composition D_c</text>\n",
        ML + 0.5 * (W - ML - MR),
        H - 12.0
    ));

    // y ticks at decades
    let d0 = log_lo.floor() as i64;
    let d1 = log_hi.ceil() as i64;
    for d in d0..=d1 {
        let v = 10f64.powi(d as i32);
        let y = y_px(v);
        if y < MT - 1.0 || y > H - MB + 1.0 {
            continue;
        }
        s.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{ML:.2}\" y2=\"{y:.2}\" stroke=\"#333\"/>\n",
            ML - 5.0
        ));
        s.push_str(&format!(
            "<line x1=\"{ML:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#ddd\"/>\n",
            W - MR
        ));
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">1e{d}</text>\n",
            ML - 9.0,
            y + 4.0
        ));
    }

    if let Some(b) = baseline {
        if b.is_finite() && b > 0.0 {
            let y = y_px(b);
            s.push_str(&format!(
                "<line x1=\"{ML:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
                 stroke=\"#555\" stroke-dasharray=\"6 4\"/>\n",
                W - MR
            ));
            s.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" fill=\"#555\">full high-fidelity pool</text>\n",
                W - MR - 4.0,
                y - 5.0
            ));
        }
    }

    for (bi, &bk) in budgets.iter().enumerate() {
        let budget = f64::from_bits(bk);
        let color = PALETTE[bi % PALETTE.len()];
        let series: Vec<&AggregateCell> = cells
            .iter()
            .filter(|c| c.budget_db.to_bits() == bk)
            .collect();
        let points: String = series
            .iter()
            .map(|c| format!("{:.2},{:.2}", x_px(c.composition_dc), y_px(c.mean(field))))
            .collect::<Vec<_>>()
            .join(" ");
        s.push_str(&format!(
            "<polyline points=\"{points}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n"
        ));
        for c in &series {
            let x = x_px(c.composition_dc);
            let m = c.mean(field);
            let y = y_px(m);
            s.push_str(&format!(
                "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"{color}\"/>\n"
            ));
            if c.std(field) > 0.0 {
                let y_top = y_px(m + c.std(field));
                let y_bot = y_px(bar_floor(m, c.std(field)));
                s.push_str(&format!(
                    "<line x1=\"{x:.2}\" y1=\"{y_top:.2}\" x2=\"{x:.2}\" y2=\"{y_bot:.2}\" stroke=\"{color}\"/>\n"
                ));
                for ye in [y_top, y_bot] {
                    s.push_str(&format!(
                        "<line x1=\"{:.2}\" y1=\"{ye:.2}\" x2=\"{:.2}\" y2=\"{ye:.2}\" stroke=\"{color}\"/>\n",
                        x - 4.0,
                        x + 4.0
                    ));
                }
            }
        }
        // legend entry
        let ly = MT + 16.0 * bi as f64 + 8.0;
        s.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n",
            ML + 10.0,
            ML + 34.0
        ));
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\">D_b = {budget}</text>\n",
            ML + 40.0,
            ly + 4.0
        ));
    }

    s.push_str("</svg>\n");
    s
}

/// Lower end of an error bar on a log axis: mean - std when positive,
/// otherwise clamped three decades under the mean.
fn bar_floor(mean: f64, std: f64) -> f64 {
    let v = mean - std;
    if v > 0.0 {
        v
    } else {
        mean * 1e-3
    }
}

/// Parses the embedded data block back out of a rendered SVG.
pub fn parse_embedded_data(svg: &str) -> Result<(Vec<(f64, f64, f64, f64, usize)>, Option<f64>)> {
    let start = svg
        .find("<!-- data\n")
        .ok_or_else(|| Error::Parse("svg holds no data block".into()))?;
    let rest = &svg[start + "<!-- data\n".len()..];
    let end = rest
        .find("-->")
        .ok_or_else(|| Error::Parse("unterminated data block".into()))?;
    let mut rows = Vec::new();
    let mut baseline = None;
    for (i, line) in rest[..end].lines().enumerate() {
        if i == 0 {
            if line != "field,budget_db,composition_dc,mean,std,n_seeds" {
                return Err(Error::Parse(format!("bad data header {line:?}")));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols[0] == "baseline" && cols.len() == 2 {
            baseline = Some(
                cols[1]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad baseline {line:?}")))?,
            );
            continue;
        }
        if cols.len() != 6 {
            return Err(Error::Parse(format!("bad data row {line:?}")));
        }
        let f = |i: usize| -> Result<f64> {
            cols[i]
                .parse()
                .map_err(|_| Error::Parse(format!("bad number in {line:?}")))
        };
        rows.push((
            f(1)?,
            f(2)?,
            f(3)?,
            f(4)?,
            cols[5]
                .parse()
                .map_err(|_| Error::Parse(format!("bad n_seeds in {line:?}")))?,
        ));
    }
    Ok((rows, baseline))
}
