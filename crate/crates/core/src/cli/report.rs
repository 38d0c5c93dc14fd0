use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::assist::RunResult;
use crate::base::ProblemSpec;
use crate::error::Result;

use super::Comparison;

fn header(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn row(values: impl IntoIterator<Item = f64>) -> String {
    let cells: Vec<String> = values.into_iter().map(|v| v.to_string()).collect();
    cells.join(",")
}

pub(super) fn write_run(dir: &Path, r: &RunResult, spec: &ProblemSpec) -> Result<()> {
    fs::create_dir_all(dir)?;

    let mut history = String::from("ese,best_scalar,indicator\n");
    for h in &r.history {
        let _ = writeln!(history, "{},{},{}", h.ese, h.best_scalar, h.indicator);
    }
    fs::write(dir.join("history.csv"), history)?;

    let mut front = header("f", spec.n_obj).join(",") + "\n";
    for f in r.front_objectives() {
        front += &row(f);
        front.push('\n');
    }
    fs::write(dir.join("front.csv"), front)?;

    let mut cols = header("x", spec.n_var);
    cols.extend(header("f", spec.n_obj));
    cols.extend(header("g", spec.n_constr));
    let mut archive = cols.join(",") + "\n";
    for s in r.archive.entries() {
        let e = s.eval.as_ref().expect("archived solutions are evaluated");
        archive += &row(s.x.iter().chain(&e.f).chain(&e.g).copied());
        archive.push('\n');
    }
    fs::write(dir.join("archive.csv"), archive)?;
    Ok(())
}

pub(super) fn comparison_table(c: &Comparison) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "indicator: {} ({} is better)",
        c.indicator,
        if c.higher_is_better { "higher" } else { "lower" }
    );
    let _ = writeln!(s, "{:>8}  {:>14}  {:>14}  winner", "seed", "a", "b");
    for p in &c.seeds {
        let _ = writeln!(s, "{:>8}  {:>14.6e}  {:>14.6e}  {}", p.seed, p.a, p.b, p.winner);
    }
    let _ = writeln!(
        s,
        "wins a={} b={} ties={}  median a/b={}",
        c.wins_a, c.wins_b, c.ties, c.median_ratio
    );
    s
}

/// Scatter plot of two 2-D fronts over an optional reference front.
pub(super) fn front_svg(a: &[Vec<f64>], b: &[Vec<f64>], reference: Option<&[Vec<f64>]>) -> String {
    const W: f64 = 480.0;
    const PAD: f64 = 40.0;
    let all = a.iter().chain(b).chain(reference.unwrap_or(&[]));
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in all {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = |k: usize| if hi[k] > lo[k] { hi[k] - lo[k] } else { 1.0 };
    let px = |p: &[f64]| {
        (
            PAD + (p[0] - lo[0]) / span(0) * (W - 2.0 * PAD),
            W - PAD - (p[1] - lo[1]) / span(1) * (W - 2.0 * PAD),
        )
    };
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{W}\" viewBox=\"0 0 {W} {W}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    let mut dots = |pts: &[Vec<f64>], r: f64, color: &str| {
        for p in pts {
            let (x, y) = px(p);
            let _ = writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{r}\" fill=\"{color}\"/>");
        }
    };
    if let Some(reference) = reference {
        dots(reference, 1.0, "#bbbbbb");
    }
    dots(a, 3.0, "#1f77b4");
    dots(b, 3.0, "#d62728");
    let _ = writeln!(
        s,
        "<text x=\"{PAD}\" y=\"20\" font-size=\"12\" fill=\"#1f77b4\">a</text>\
         <text x=\"{}\" y=\"20\" font-size=\"12\" fill=\"#d62728\">b</text>",
        PAD + 20.0
    );
    s.push_str("</svg>\n");
    s
}
