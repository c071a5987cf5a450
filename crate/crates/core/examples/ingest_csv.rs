//! Loads monthly prices from CSV, turns them into standardized log returns,
//! aligns them with an index and fits AR(1) noise models.

use wavecoh::ingest::{align, fit_ar1, load_csv, log_returns, standardize};

fn main() -> wavecoh::Result<()> {
    let dir = std::env::temp_dir().join("wavecoh-ingest-example");
    std::fs::create_dir_all(&dir).map_err(|e| wavecoh::Error::io(&dir, e))?;
    let prices = dir.join("prices.csv");
    let index = dir.join("index.csv");
    let mut p = String::from("date,copper\n");
    let mut q = String::from("date,GEPU\n");
    for i in 0..60 {
        let (y, m) = (1999 + i / 12, 1 + i % 12);
        p.push_str(&format!(
            "{y}-{m:02},{}\n",
            100.0 * (1.0 + 0.1 * (i as f64 / 5.0).sin())
        ));
        if i >= 6 {
            q.push_str(&format!(
                "{y}-{m:02}-01,{}\n",
                120.0 + (i as f64 / 7.0).cos() * 30.0
            ));
        }
    }
    std::fs::write(&prices, p).map_err(|e| wavecoh::Error::io(&prices, e))?;
    std::fs::write(&index, q).map_err(|e| wavecoh::Error::io(&index, e))?;

    let copper = log_returns(&load_csv(&prices, "date", "copper")?)?;
    let gepu = load_csv(&index, "date", "GEPU")?;
    println!(
        "copper returns {}..{} ({} months)",
        copper.start(),
        copper.end(),
        copper.len()
    );
    println!(
        "GEPU levels    {}..{} ({} months)",
        gepu.start(),
        gepu.end(),
        gepu.len()
    );

    let (gepu, copper) = align(&gepu, &copper)?;
    let (gepu, copper) = (standardize(&gepu)?, standardize(&copper)?);
    println!(
        "aligned to     {}..{} ({} months)",
        gepu.start(),
        gepu.end(),
        gepu.len()
    );
    for s in [&gepu, &copper] {
        let ar = fit_ar1(s)?;
        println!(
            "{:>6}: mean {:+.1e}, sd {:.3}, alpha {:.3}",
            s.name(),
            s.mean(),
            s.sample_std(),
            ar.alpha()
        );
    }
    Ok(())
}
