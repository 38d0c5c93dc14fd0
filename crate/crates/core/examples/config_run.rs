//! Running a JSON experiment programmatically, the same path `samoo run`
//! takes, and reading back the summary.

use samoo::cli::{cmd_run, Options, RunConfig};

fn main() -> samoo::Result<()> {
    let text = r#"{
        "problem":   { "name": "zdt1", "n_var": 6 },
        "algorithm": { "name": "nsga2" },
        "assist":    { "mode": "bias", "beta": 20 },
        "ese_max":   120,
        "seeds":     [1, 2],
        "indicator": { "name": "hv" }
    }"#;
    // Validation alone never spends an evaluation or touches the disk.
    let exp = RunConfig::from_json(text)?.validate()?;
    println!("pop_size {} assist {:?}", exp.params().pop_size, exp.assist());

    let dir = std::env::temp_dir().join("samoo-config-run");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("config.json");
    std::fs::write(&path, text)?;
    let opts = Options {
        out: Some(dir.join("out")),
        quiet: true,
        ..Options::default()
    };
    let summary = cmd_run(&path, &opts)?;
    for s in &summary.seeds {
        println!("seed {} final {} = {:.4}", s.seed, summary.indicator, s.final_indicator);
    }
    println!("median {:.4}, IQR {:.4}; artifacts in {}", summary.median, summary.iqr, dir.join("out").display());
    Ok(())
}
