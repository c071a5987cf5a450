//! Delays a sinusoid by a few samples and reads the delay back from the
//! coherence phase.
//!
//! Usage: `cargo run --example lead_lag_shift -- [shift] [period]`

use wavecoh::coherence::wtc;
use wavecoh::cwt::{cwt, WaveletParams};
use wavecoh::phase_lag::{classify_direction, time_lag, DEFAULT_PHASE_TOLERANCE};
use wavecoh::synth::{make_shifted_pair, sinusoid};
use wavecoh::YearMonth;

fn main() -> wavecoh::Result<()> {
    let mut args = std::env::args().skip(1);
    let shift: i64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(4);
    let period: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(16.0);
    let n = 304;
    let base = sinusoid("x", YearMonth::new(1997, 1).expect("valid"), n, period, 1.0)?;
    let (x, y) = make_shifted_pair(&base, shift)?;
    let params = WaveletParams::for_length(n, 1.0);
    let c = wtc(&cwt(&x, &params)?, &cwt(&y, &params)?)?;
    let row = (0..c.periods().len())
        .min_by(|&a, &b| {
            (c.periods()[a] - period)
                .abs()
                .total_cmp(&(c.periods()[b] - period).abs())
        })
        .unwrap_or(0);
    let p = c.periods()[row];
    println!("y[t] = x[t - {shift}], period {period}; reading row with period {p:.2}");
    for col in (n / 4..3 * n / 4).step_by(19) {
        let phi = *c.phase().get(row, col);
        println!(
            "{}  r2 {:.3}  phase {:+.3}  lag {:.2}  {}",
            x.time_at(col),
            c.r2().get(row, col),
            phi,
            time_lag(phi, p),
            classify_direction(phi, DEFAULT_PHASE_TOLERANCE)
        );
    }
    Ok(())
}
