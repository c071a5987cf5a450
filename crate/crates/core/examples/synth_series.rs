//! Writes one CSV per synthetic kind into a directory (default `synthetic/`).

use wavecoh::synth::{generate, write_series_csv, SyntheticKind, SyntheticSpec};

fn main() -> wavecoh::Result<()> {
    let dir = std::path::PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "synthetic".into()),
    );
    std::fs::create_dir_all(&dir).map_err(|e| wavecoh::Error::io(&dir, e))?;
    for (name, kind) in [
        ("sinusoid", SyntheticKind::Sinusoid),
        ("ar1", SyntheticKind::Ar1),
        ("shifted_copy", SyntheticKind::ShiftedCopy),
        ("coupled_pair", SyntheticKind::CoupledPair),
        ("sum", SyntheticKind::Sum),
    ] {
        let spec = SyntheticSpec {
            kind,
            noise_alpha: 0.5,
            amplitude: 2.0,
            ..Default::default()
        };
        let series = generate(&spec)?;
        let path = dir.join(format!("{name}.csv"));
        write_series_csv(&path, &series)?;
        println!(
            "{:>13}: {} series -> {}",
            name,
            series.len(),
            path.display()
        );
    }
    Ok(())
}
