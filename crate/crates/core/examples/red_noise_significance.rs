//! Chi-square power test and Monte Carlo coherence thresholds against
//! fitted AR(1) noise.

use wavecoh::coherence::wtc;
use wavecoh::cwt::{cwt, WaveletParams};
use wavecoh::ingest::{fit_ar1, AR1Params};
use wavecoh::significance::{
    generate_surrogate, power_significance, surrogate_thresholds, MonteCarloConfig,
    SignificanceMask, SignificanceMethod,
};

fn main() -> wavecoh::Result<()> {
    let n = 304;
    let truth = AR1Params::new(0.7, 1.0, 0.0)?;
    let x = generate_surrogate(&truth, n, 1)?.with_name("x");
    let y = generate_surrogate(&truth, n, 2)?.with_name("y");
    let (ax, ay) = (fit_ar1(&x)?, fit_ar1(&y)?);
    println!("fitted alpha: x {:.3}, y {:.3}", ax.alpha(), ay.alpha());

    let params = WaveletParams::for_length(n, 1.0);
    let (fx, fy) = (cwt(&x, &params)?, cwt(&y, &params)?);
    let power = power_significance(&fx, &ax, 0.95)?;
    println!(
        "x power significant on {:.1}% of reliable cells",
        100.0 * power.fraction_outside_coi(fx.periods(), fx.coi())
    );

    let config = MonteCarloConfig::default();
    let th = surrogate_thresholds(&params, n, &ax, &ay, &config)?;
    let c = wtc(&fx, &fy)?;
    let mask = SignificanceMask::from_thresholds(
        c.r2(),
        th.wtc.clone(),
        0.95,
        SignificanceMethod::MonteCarloWtc,
    )?;
    println!(
        "coherence significant on {:.1}% of reliable cells ({} surrogates, seed {})",
        100.0 * mask.fraction_outside_coi(c.periods(), c.coi()),
        config.n_surrogates,
        config.seed
    );
    for j in (0..th.wtc.len()).step_by(12) {
        println!(
            "period {:6.2}  r2 threshold {:.3}",
            c.periods()[j],
            th.wtc[j]
        );
    }
    Ok(())
}
