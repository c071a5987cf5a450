//! Renders the coherence of a coupled pair with COI shading, significance
//! contours and phase arrows.
//!
//! Usage: `cargo run --release --example render_heatmap -- [out.png|out.ppm]`

use wavecoh::pipeline::{analyze_pair, PairSettings};
use wavecoh::render::{render_heatmap, HeatmapLayers, HeatmapStyle, ValueRange};
use wavecoh::synth::{make_coupled_pair, SyntheticSpec};

fn main() -> wavecoh::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "wtc.png".into());
    let spec = SyntheticSpec {
        amplitude: 4.0,
        noise_alpha: 0.3,
        ..Default::default()
    };
    let (x, y) = make_coupled_pair(&spec)?;
    let a = analyze_pair(&x, &y, &PairSettings::default())?;
    let style = HeatmapStyle {
        range: ValueRange::Fixed(0.0, 1.0),
        ..HeatmapStyle::default()
    };
    let img = render_heatmap(
        &HeatmapLayers {
            grid: a.coherence.r2(),
            periods: a.coherence.periods(),
            coi: a.coherence.coi(),
            mask: Some(a.wtc_mask.mask()),
            phase: Some(a.coherence.phase()),
        },
        &style,
    )?;
    img.save(&out)?;
    println!("{}x{} heatmap written to {out}", img.width(), img.height());
    Ok(())
}
